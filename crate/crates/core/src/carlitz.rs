//! The Carlitz module: denominator sequences D_i and l_i, the Carlitz
//! factorial, the action coefficients (a)_i, the period pi_tilde, truncated
//! exponential/logarithm operators, and the formal series X/exp_C(X).

use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::poly::FPoly;
use crate::ratfunc::RatFunc;
use crate::tate::TateElem;
use std::sync::Arc;

/// D_0 = l_0 = 1; D_i = (theta^{q^i} - theta) D_{i-1}^q;
/// l_i = (theta - theta^{q^i}) l_{i-1}.
#[derive(Clone, Debug)]
pub struct CarlitzTables {
    pub q: u64,
    pub d: Vec<FPoly>,
    pub l: Vec<FPoly>,
}

impl CarlitzTables {
    pub fn new(fd: &FieldDesc, imax: usize) -> Self {
        let mut d = vec![FPoly::one(fd)];
        let mut l = vec![FPoly::one(fd)];
        for i in 1..=imax {
            let qi = (fd.q as usize).pow(i as u32);
            // theta^{q^i} - theta
            let mut bracket = vec![fd.zero(); qi + 1];
            bracket[qi] = fd.one();
            bracket[1] = fd.neg(&fd.one());
            let bracket = FPoly::from_vec(bracket, fd);
            d.push(bracket.mul(&d[i - 1].pow(fd.q, fd), fd));
            l.push(bracket.neg(fd).mul(&l[i - 1], fd));
        }
        CarlitzTables { q: fd.q, d, l }
    }
}

/// Base-q digits of n, least significant first.
pub fn base_q_digits(mut n: u64, q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % q);
        n /= q;
    }
    out
}

/// Carlitz factorial Pi(N) = prod D_i^{n_i} over the base-q digits of N.
pub fn carlitz_factorial(n: u64, fd: &FieldDesc) -> FPoly {
    let digits = base_q_digits(n, fd.q);
    let tables = CarlitzTables::new(fd, digits.len());
    let mut out = FPoly::one(fd);
    for (i, &ni) in digits.iter().enumerate() {
        if ni > 0 {
            out = out.mul(&tables.d[i].pow(ni, fd), fd);
        }
    }
    out
}

/// Coefficients (a)_0..(a)_d of the Carlitz action C_a = sum (a)_i tau^i,
/// from (a)_0 = a and (a)_i = (tau((a)_{i-1}) - (a)_{i-1}) / (theta^{q^i} - theta).
/// The same list gives phi_a = sum (a)_i tau_alpha^i for any rank-one module.
pub fn carlitz_coeffs(a: &FPoly, fd: &FieldDesc) -> Result<Vec<FPoly>> {
    let d = match a.degree() {
        None => return Ok(vec![FPoly::zero()]),
        Some(d) => d,
    };
    let mut out = vec![a.clone()];
    for i in 1..=d {
        let qi = (fd.q as usize).pow(i as u32);
        let mut bracket = vec![fd.zero(); qi + 1];
        bracket[qi] = fd.one();
        bracket[1] = fd.neg(&fd.one());
        let bracket = FPoly::from_vec(bracket, fd);
        let prev = &out[i - 1];
        let num = prev.tau(1, fd).sub(prev, fd);
        out.push(num.div_exact(&bracket, fd)?);
    }
    Ok(out)
}

/// Compose two Carlitz coefficient lists: (ab)_k = sum_{i+j=k} (a)_i tau^i((b)_j).
pub fn compose_carlitz_coeffs(a: &[FPoly], b: &[FPoly], fd: &FieldDesc) -> Vec<FPoly> {
    let n = a.len() + b.len() - 1;
    let mut out = vec![FPoly::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let term = ai.mul(&bj.tau(i as u32, fd), fd);
            out[i + j] = out[i + j].add(&term, fd);
        }
    }
    while out.last().map_or(false, |c| c.is_zero()) {
        out.pop();
    }
    out
}

/// lambda_theta = exp_C(pi_tilde / theta), the canonical (q-1)-th root of
/// -theta: the pure grade-1 element with unit part 1.
pub fn lambda_theta(field: &Arc<FieldDesc>, s: usize) -> TateElem {
    TateElem::lambda_pow(field, s, 1)
}

/// The Carlitz period, by its infinite product:
/// pi_tilde = (theta - theta^q)^{1/(q-1)} prod_{i>=1} (1 - (theta^{q^i}-theta)/(theta^{q^{i+1}}-theta)).
/// The (q-1)-th root factor is lambda_theta * theta * (1 - theta^{1-q})^{1/(q-1)};
/// factor i deviates from 1 at exponent q^i (q-1), so the product is cut once
/// that passes the precision bound.
pub fn pi_tilde(field: &Arc<FieldDesc>, s: usize, prec: i64) -> TateElem {
    assert!(prec >= 1);
    let q = field.q as i64;
    let wp = prec + 2;
    let one = TateElem::one(field, s);
    let root_arg = one
        .sub(&TateElem::theta_pow(field, s, 1 - q))
        .unwrap()
        .truncate(wp + 1);
    let u0 = root_arg.root_of_one_unit(field.q - 1).expect("1-unit by construction");
    let mut acc = TateElem::lambda_pow(field, s, 1)
        .mul(&TateElem::theta_pow(field, s, 1))
        .mul(&u0);
    let mut i = 1u32;
    loop {
        let qi = q.checked_pow(i).expect("exponent overflow");
        if qi * (q - 1) >= wp {
            break;
        }
        let qi1 = qi * q;
        // 1 - (theta^{q^i}-theta)/(theta^{q^{i+1}}-theta)
        //   = (theta^{q^{i+1}} - theta^{q^i}) / (theta^{q^{i+1}} - theta)
        let num = TateElem::theta_pow(field, s, qi1)
            .sub(&TateElem::theta_pow(field, s, qi))
            .unwrap();
        let den = TateElem::theta_pow(field, s, qi1)
            .sub(&TateElem::theta_pow(field, s, 1))
            .unwrap()
            .truncate(wp);
        let factor = num.mul(&den.inv().expect("monic-led denominator"));
        acc = acc.mul(&factor);
        i += 1;
    }
    acc.truncate(prec)
}

/// Truncated application of exp_C = sum tau^i / D_i; entire, so it applies to
/// every argument. Terms are cut once their valuation bound clears `prec`.
pub fn exp_c_apply(x: &TateElem, prec: i64) -> TateElem {
    twisted_sum_apply(x, prec, false)
}

/// Truncated application of log_C = sum tau^i / l_i on the disk
/// ||x|| < q^{q/(q-1)}.
pub fn log_c_apply(x: &TateElem, prec: i64) -> Result<TateElem> {
    let fd = &x.field;
    let q = fd.q as i64;
    if let Some(vnum) = x.valuation_num() {
        // need (q-1) v(x) > -q
        if vnum <= -q {
            return Err(Error::OutsideLogDomain);
        }
    }
    Ok(twisted_sum_apply(x, prec, true))
}

fn twisted_sum_apply(x: &TateElem, prec: i64, use_l: bool) -> TateElem {
    let field = x.field.clone();
    let fd = &*field;
    let q = fd.q as i64;
    if x.is_zero_stored() {
        return x.truncate(prec);
    }
    let vnum = x.valuation_num().unwrap(); // (q-1) * v(x)
    let mut acc = TateElem::zero_to(&field, x.s, x.grade, prec.min(x.prec));
    let mut tables = CarlitzTables::new(fd, 0);
    let mut i = 0u32;
    loop {
        let qi = match q.checked_pow(i) {
            Some(v) if v < (1 << 40) => v,
            _ => break,
        };
        // (q-1) * v(term_i) = q^i (q-1) v(x) + (q-1) * v(denominator_i)
        let vden = if use_l {
            q * (qi - 1) / (q - 1) // deg l_i
        } else {
            i as i64 * qi // deg D_i
        };
        let term_vnum = qi * vnum + (q - 1) * vden;
        if term_vnum >= (q - 1) * prec {
            break;
        }
        if tables.d.len() <= i as usize {
            tables = CarlitzTables::new(fd, i as usize);
        }
        let den = if use_l { &tables.l[i as usize] } else { &tables.d[i as usize] };
        let xt = x.tau_apply(i);
        // a negative vmin of the twisted argument eats into the product's
        // precision; pad the denominator inverse accordingly
        let pad = xt.vmin().unwrap_or(0).min(0);
        let den_inv = TateElem::from_fpoly(den, &field, x.s)
            .truncate((prec - pad).max(1))
            .inv()
            .expect("monic denominator");
        let term = xt.mul(&den_inv).truncate(prec);
        acc = acc.add(&term).expect("grades match");
        i += 1;
    }
    acc
}

/// exp_C(X) = sum X^{q^i}/D_i and its reciprocal X/exp_C(X), both as exact
/// rational coefficient lists up to X-degree `dmax`. The coefficient of X^n
/// in the reciprocal, times Pi(n), is the Bernoulli-Carlitz number BC_n.
pub fn carlitz_exp_formal(dmax: usize, fd: &FieldDesc) -> (Vec<RatFunc>, Vec<RatFunc>) {
    let mut imax = 0;
    while (fd.q as usize).pow(imax as u32 + 1) <= dmax + 1 {
        imax += 1;
    }
    let tables = CarlitzTables::new(fd, imax);
    let mut exp = vec![RatFunc::zero(fd); dmax + 1];
    for i in 0..=imax {
        let qi = (fd.q as usize).pow(i as u32);
        if qi <= dmax {
            exp[qi] = RatFunc::from_poly(FPoly::one(fd), fd)
                .div(&RatFunc::from_poly(tables.d[i].clone(), fd), fd);
        }
    }
    // g = exp_C(X)/X has constant term 1; invert the power series
    let mut g = vec![RatFunc::zero(fd); dmax + 1];
    for i in 0..=imax {
        let qi = (fd.q as usize).pow(i as u32);
        if qi - 1 <= dmax {
            g[qi - 1] = RatFunc::from_poly(FPoly::one(fd), fd)
                .div(&RatFunc::from_poly(tables.d[i].clone(), fd), fd);
        }
    }
    let mut recip = vec![RatFunc::zero(fd); dmax + 1];
    recip[0] = RatFunc::one(fd);
    for n in 1..=dmax {
        let mut acc = RatFunc::zero(fd);
        for k in 1..=n {
            if !g[k].is_zero() && !recip[n - k].is_zero() {
                acc = acc.add(&g[k].mul(&recip[n - k], fd), fd);
            }
        }
        recip[n] = acc.neg(fd);
    }
    (exp, recip)
}
