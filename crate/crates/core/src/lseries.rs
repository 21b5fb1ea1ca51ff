//! L-series values by degree-wise summation and by Euler product, the
//! polynomials L(-j, phi), the class-module polynomials B_phi, the
//! integrality check exp_phi(L(1,phi)), and local factors / Fitting
//! generators of finite theta-modules.

use crate::apoly::{charpoly_fraction_free, APoly};
use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use crate::poly::{enumerate_primes, is_irreducible, monic_by_index, monic_count, FPoly};
use crate::tate::TateElem;
use crate::tpoly::TPoly;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Coefficients of 1/a^n for monic a of degree d, as pairs (e, coefficient of
/// theta^{-e}) with d n <= e < prec. The 1-unit part is inverted by a
/// geometric recursion, then raised to the n-th power.
pub fn inv_pow_coeffs(a: &FPoly, n: u32, prec: i64, fd: &FieldDesc) -> Vec<(i64, FFElem)> {
    let d = a.degree().expect("nonzero a") as i64;
    debug_assert!(a.is_monic(fd));
    let base = d * n as i64;
    if base >= prec {
        return Vec::new();
    }
    let len = (prec - base) as usize;
    // u_e = coefficient of theta^{-e} in a/theta^d, e = 1..d
    let mut g = vec![fd.zero(); len];
    g[0] = fd.one();
    for e in 1..len {
        let mut acc = fd.zero();
        let kmax = (e as i64).min(d) as usize;
        for k in 1..=kmax {
            let u_k = a.coeff((d as usize) - k, fd);
            if fd.is_zero(&u_k) {
                continue;
            }
            acc = fd.add(&acc, &fd.mul(&u_k, &g[e - k]));
        }
        g[e] = fd.neg(&acc);
    }
    // h = g^n truncated
    let mut h = vec![fd.zero(); len];
    h[0] = fd.one();
    for _ in 0..n {
        let mut nh = vec![fd.zero(); len];
        for i in 0..len {
            if fd.is_zero(&h[i]) {
                continue;
            }
            for j in 0..len - i {
                if !fd.is_zero(&g[j]) {
                    nh[i + j] = fd.add(&nh[i + j], &fd.mul(&h[i], &g[j]));
                }
            }
        }
        h = nh;
    }
    h.into_iter()
        .enumerate()
        .filter(|(_, c)| !fd.is_zero(c))
        .map(|(j, c)| (base + j as i64, c))
        .collect()
}

/// Valuation lower bound of the degree-d block sum: every monomial in the
/// expanded block survives the coefficient sums over F_q only when each of
/// the d free coefficients of `a` appears with total degree a positive
/// multiple of q-1, and the weight contributes at most `weight_deg` to each;
/// the leftover forces extra theta-decay of (q-1-weight_deg)+ per coefficient.
fn block_valuation_bound(d: i64, n: i64, q: i64, weight_deg: i64) -> i64 {
    let c = (q - 1 - weight_deg).max(0);
    d * n + c * d * (d + 1) / 2
}

/// sum_{d} sum_{a in A_{+,d}} weight(a) / a^n at precision `prec`, over the
/// coefficient field `target` (the enumeration always runs over F_q).
///
/// `weight_deg` must bound the degree of weight(a) in each individual
/// coefficient of a; degree blocks whose valuation bound clears `prec` are
/// skipped (they vanish at this precision), and the hard cutoff
/// D = ceil(prec/n) caps the loop either way.
pub fn weighted_l_sum<W>(
    base: &Arc<FieldDesc>,
    target: &Arc<FieldDesc>,
    s: usize,
    n: u32,
    prec: i64,
    weight_deg: i64,
    weight: W,
) -> TateElem
where
    W: Fn(&FPoly) -> TPoly + Sync,
{
    let q = base.q as i64;
    let dmax = (prec + n as i64 - 1) / n as i64;
    let mut acc: BTreeMap<i64, TPoly> = BTreeMap::new();
    for d in 0..=dmax {
        if block_valuation_bound(d, n as i64, q, weight_deg) >= prec {
            break;
        }
        let total = monic_count(base, d as usize);
        let block = (0..total as u64)
            .into_par_iter()
            .fold(
                || BTreeMap::<i64, TPoly>::new(),
                |mut local, idx| {
                    let a = monic_by_index(base, d as usize, idx as u128);
                    let w = weight(&a);
                    if w.is_zero() {
                        return local;
                    }
                    let a_t = crate::poly::lift_to_extension(&a, target);
                    for (e, c) in inv_pow_coeffs(&a_t, n, prec, target) {
                        let term = w.mul_elem(&c, target);
                        if term.is_zero() {
                            continue;
                        }
                        merge_term(&mut local, e, term, target);
                    }
                    local
                },
            )
            .reduce(BTreeMap::new, |mut a, b| {
                for (e, c) in b {
                    merge_term(&mut a, e, c, target);
                }
                a
            });
        for (e, c) in block {
            merge_term(&mut acc, e, c, target);
        }
    }
    let mut out = TateElem::zero_to(target, s, 0, prec);
    out.coeffs = acc;
    out
}

fn merge_term(map: &mut BTreeMap<i64, TPoly>, e: i64, c: TPoly, fd: &FieldDesc) {
    match map.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get().add(&c, fd);
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// L(n, phi) = sum_{a monic} rho_alpha(a) a^{-n}, a norm-one unit of the Tate
/// algebra, truncated at `prec`.
pub fn l_value(phi: &DrinfeldModule, n: u32, prec: i64) -> TateElem {
    assert!(n >= 1);
    weighted_l_sum(
        &phi.field,
        &phi.field,
        phi.s,
        n,
        prec,
        phi.r as i64,
        |a| phi.rho(a),
    )
}

/// The Euler product over primes of degree <= maxdeg of
/// (1 - rho_alpha(P)/P^n)^{-1}, at precision `prec`; agrees with `l_value`
/// to precision min(prec, n (maxdeg+1)).
pub fn euler_product(phi: &DrinfeldModule, n: u32, maxdeg: usize, prec: i64) -> TateElem {
    assert!(n >= 1 && maxdeg >= 1);
    let field = &phi.field;
    let mut acc = TateElem::one(field, phi.s).truncate(prec);
    for d in 1..=maxdeg {
        if (d as i64) * n as i64 >= prec {
            break; // factors are 1 below this precision
        }
        let primes = enumerate_primes(field, d);
        let factors: Vec<TateElem> = primes
            .par_iter()
            .map(|p| {
                let rho = phi.rho(p);
                if rho.is_zero() {
                    return TateElem::one(field, phi.s).truncate(prec);
                }
                let mut term = TateElem::zero_to(field, phi.s, 0, prec);
                for (e, c) in inv_pow_coeffs(p, n, prec, field) {
                    let t = rho.mul_elem(&c, field);
                    if !t.is_zero() {
                        term.coeffs.insert(e, t);
                    }
                }
                let f = TateElem::one(field, phi.s).truncate(prec).sub(&term).unwrap();
                f.inv().expect("1-unit Euler factor")
            })
            .collect();
        for f in factors {
            acc = acc.mul(&f).truncate(prec);
        }
    }
    acc
}

/// L(-j, phi) = sum_d sum_{a in A_{+,d}} rho_alpha(a) a^j, an exact
/// polynomial: degree-d blocks vanish identically once d(q-1) exceeds the
/// joint coefficient degree r + j, which caps the sum; a vanishing-window
/// check re-verifies the cutoff.
pub fn l_negative(phi: &DrinfeldModule, j: u32) -> Result<APoly> {
    let fd = &*phi.field;
    let q = fd.q as i64;
    let cap = (phi.r as i64 + j as i64).div_euclid(q - 1);
    let window = 3i64;
    // hard guard: desk-scale enumeration only
    if (cap + window) as u32 * 2 > 62 {
        return Err(Error::NoStabilization(cap));
    }
    let mut acc = APoly::zero(phi.s);
    for d in 0..=cap {
        let block = l_negative_block(phi, d as usize, j);
        acc = acc.add(&block, fd);
    }
    // the window beyond the cap must vanish (skip when enumeration is huge)
    for d in cap + 1..=cap + window {
        if monic_count(fd, d as usize) > 1 << 20 {
            break;
        }
        let block = l_negative_block(phi, d as usize, j);
        if !block.is_zero() {
            return Err(Error::NoStabilization(d));
        }
    }
    Ok(acc)
}

fn l_negative_block(phi: &DrinfeldModule, d: usize, j: u32) -> APoly {
    let fd = &*phi.field;
    let total = monic_count(fd, d);
    (0..total as u64)
        .into_par_iter()
        .fold(
            || APoly::zero(phi.s),
            |acc, idx| {
                let a = monic_by_index(&phi.field, d, idx as u128);
                let rho = phi.rho(&a);
                if rho.is_zero() {
                    return acc;
                }
                let aj = APoly::from_fpoly(&a.pow(j as u64, fd), phi.s, fd);
                acc.add(&aj.mul_tpoly(&rho, fd), fd)
            },
        )
        .reduce(|| APoly::zero(phi.s), |a, b| a.add(&b, fd))
}

/// The class-module polynomial: either a genuine element of A[t] (torsion
/// case with r >= q) or the tagged rational datum 1/(theta - x) when r = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BPolyValue {
    Poly(APoly),
    /// 1/(theta - x), stored as the denominator theta - x.
    RationalOneOver(APoly),
}

#[derive(Clone, Debug)]
pub struct BPolyReport {
    pub expected_degree: usize,
    pub monic: bool,
    pub degree: Option<usize>,
    pub tail_checked_to: i64,
}

/// B_phi = (-1)^{(r-1)/(q-1)} L(1,phi) omega_alpha / pi_tilde, recognized as
/// a monic polynomial of theta-degree u(alpha); requires -alpha monic in
/// theta and r = 1 mod (q-1) (the torsion case), r >= 1.
pub fn b_poly(phi: &DrinfeldModule, margin: i64) -> Result<(BPolyValue, BPolyReport)> {
    let fd = &*phi.field;
    let q = fd.q as i64;
    let r = phi.r as i64;
    if !phi.monic_negated || r < 1 || (r - 1) % (q - 1) != 0 {
        return Err(Error::NotTorsionCase);
    }
    if r == 1 {
        // alpha = x - theta: B = 1/(theta - x)
        let den = phi.alpha.neg(fd);
        let report = BPolyReport {
            expected_degree: 0,
            monic: true,
            degree: Some(1),
            tail_checked_to: 0,
        };
        return Ok((BPolyValue::RationalOneOver(den), report));
    }
    let u = phi.u as i64;
    // omega and pi_tilde are cheap at high precision; the L-value block sum
    // is the expensive part, so multiply it in last at the minimal precision
    // margin + u + 1 (the product loses u ahead of the polynomial part)
    let wp_aux = margin + u + 6;
    let l1 = l_value(phi, 1, margin + u + 1);
    let omega = phi.omega(wp_aux)?;
    let pi = crate::carlitz::pi_tilde(&phi.field, phi.s, wp_aux + 2);
    let w = omega.mul(&pi.inv()?);
    let mut e = w.mul(&l1);
    let sign_flips = ((r - 1) / (q - 1)) % 2;
    if sign_flips == 1 {
        e = e.neg();
    }
    let outcome = e.recognize_polynomial(margin)?;
    let poly = outcome.into_poly()?;
    let report = BPolyReport {
        expected_degree: phi.u,
        monic: poly.is_monic(fd),
        degree: poly.deg_theta(),
        tail_checked_to: e.prec,
    };
    Ok((BPolyValue::Poly(poly), report))
}

/// exp_phi(L(1,phi)), recognized as an exact polynomial of A[t]; when
/// r <= q-1 the result is additionally checked to be 1.
pub fn exp_of_l(phi: &DrinfeldModule, prec: i64, margin: i64) -> Result<APoly> {
    let fd = &*phi.field;
    let l1 = l_value(phi, 1, prec);
    let e = phi.exp_apply(&l1, prec);
    let poly = e.recognize_polynomial(margin)?.into_poly()?;
    if (phi.r as i64) <= fd.q as i64 - 1 && poly != APoly::one(phi.s, fd) {
        return Err(Error::PreconditionViolated(format!(
            "exp_phi(L(1,phi)) must be 1 for r <= q-1, got {}",
            crate::grammar::apoly_to_string(&poly)
        )));
    }
    Ok(poly)
}

/// Remainder of an APoly modulo a monic scalar theta-polynomial.
pub fn apoly_rem_monic(a: &APoly, p: &FPoly, fd: &FieldDesc) -> APoly {
    let d = p.degree().expect("nonzero modulus");
    debug_assert!(p.is_monic(fd));
    let mut coeffs = a.coeffs.clone();
    while coeffs.len() > d {
        let top = coeffs.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = coeffs.len() - d;
        for (i, pc) in p.coeffs.iter().take(d).enumerate() {
            if fd.is_zero(pc) {
                continue;
            }
            let sub = top.mul_elem(&fd.neg(pc), fd);
            coeffs[shift + i] = coeffs[shift + i].add(&sub, fd);
        }
    }
    APoly::from_vec(coeffs, a.s)
}

/// Matrix of x -> theta x + alpha tau(x) on the basis 1, theta, ...,
/// theta^{d-1} of R/PR, with tau(theta^j) = theta^{jq} mod P.
pub fn phi_theta_matrix(phi: &DrinfeldModule, p: &FPoly) -> Vec<Vec<TPoly>> {
    let fd = &*phi.field;
    let d = p.degree().expect("prime modulus");
    let mut cols: Vec<APoly> = Vec::with_capacity(d);
    for j in 0..d {
        // theta * theta^j mod P
        let tpart = {
            let m = FPoly::monomial(fd.one(), j + 1, fd).divrem(p, fd).1;
            APoly::from_fpoly(&m, phi.s, fd)
        };
        // alpha * tau(theta^j) mod P
        let tau_tj = FPoly::monomial(fd.one(), j, fd).powmod(fd.q as u128, p, fd);
        let apart = apoly_rem_monic(
            &phi.alpha.mul(&APoly::from_fpoly(&tau_tj, phi.s, fd), fd),
            p,
            fd,
        );
        cols.push(tpart.add(&apart, fd));
    }
    (0..d)
        .map(|i| (0..d).map(|j| cols[j].coeff(i)).collect())
        .collect()
}

/// Local factor of phi at a prime P: the characteristic polynomial of the
/// phi_theta-action on R/PR, verified against P - rho_alpha(P).
pub fn local_factor(phi: &DrinfeldModule, p: &FPoly) -> Result<APoly> {
    let fd = &*phi.field;
    if !is_irreducible(p, fd) {
        return Err(Error::NotPrime);
    }
    let mat = phi_theta_matrix(phi, p);
    let cp = charpoly_fraction_free(&mat, phi.s, fd);
    let expect = APoly::from_fpoly(p, phi.s, fd)
        .sub(&APoly::constant(phi.rho(p)), fd);
    if cp != expect {
        return Err(Error::PreconditionViolated(
            "characteristic polynomial does not match P - rho(P)".into(),
        ));
    }
    Ok(cp)
}

/// Monic generator of the Fitting ideal of a finite F[theta]-module given by
/// its theta-action matrix: the characteristic polynomial (1 for the zero
/// module).
pub fn fitting_generator(mat: &[Vec<TPoly>], s: usize, fd: &FieldDesc) -> APoly {
    charpoly_fraction_free(mat, s, fd)
}

/// Carlitz zeta value zeta_C(n) = L(n, C) with s = 0.
pub fn zeta_c(field: &Arc<FieldDesc>, n: u32, prec: i64) -> TateElem {
    let phi = DrinfeldModule::carlitz(field, 0);
    l_value(&phi, n, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::{exp_c_apply, pi_tilde, CarlitzTables};
    use crate::grammar::parse_apoly;

    fn f3() -> Arc<FieldDesc> {
        FieldDesc::base(3, 1).unwrap()
    }

    fn module(src: &str, s: usize) -> DrinfeldModule {
        let fd = f3();
        DrinfeldModule::new(&fd, parse_apoly(src, &fd, s).unwrap()).unwrap()
    }

    #[test]
    fn zeta_one_exponentiates_to_one() {
        for &q in &[2u64, 3] {
            let fd = FieldDesc::base(q, 1).unwrap();
            let prec = 12;
            let z = zeta_c(&fd, 1, prec);
            assert_eq!(z.vmin(), Some(0));
            assert!(z.coeffs.get(&0).unwrap().is_one(&fd), "norm-one unit");
            let e = exp_c_apply(&z, prec);
            let diff = e.sub(&TateElem::one(&fd, 0)).unwrap();
            assert!(diff.is_zero_to(prec), "q={} got {}", q, e.describe());
        }
    }

    #[test]
    fn zeta_blocks_match_inverse_l() {
        // the degree-d block of zeta_C(1) is 1/l_d
        let fd = f3();
        let z = zeta_c(&fd, 1, 13);
        let tables = CarlitzTables::new(&fd, 2);
        let mut expect = TateElem::zero_to(&fd, 0, 0, 13);
        for i in 0..3usize {
            let li = TateElem::from_fpoly(&tables.l[i], &fd, 0).truncate(16).inv().unwrap();
            expect = expect.add(&li.truncate(13)).unwrap();
        }
        assert!(z.agrees_with(&expect, 13));
    }

    #[test]
    fn l_value_alpha_t_is_log_series() {
        // alpha = t1: L(1,phi) = sum_i t1^i / l_i = log_phi(1)
        let fd = f3();
        let phi = module("t1", 1);
        let prec = 13;
        let l = l_value(&phi, 1, prec);
        let tables = CarlitzTables::new(&fd, 2);
        let mut expect = TateElem::zero_to(&fd, 1, 0, prec);
        for i in 0..3usize {
            let t1i = {
                let t1 = TPoly::var(0, 1, &fd).unwrap();
                let mut p = TPoly::one(1, &fd);
                for _ in 0..i {
                    p = p.mul(&t1, &fd);
                }
                p
            };
            let li_inv =
                TateElem::from_fpoly(&tables.l[i], &fd, 1).truncate(16).inv().unwrap();
            expect = expect
                .add(&TateElem::from_tpoly(&t1i, &fd).mul(&li_inv).truncate(prec))
                .unwrap();
        }
        assert!(l.agrees_with(&expect, prec));
        // log_phi(1) route
        let log1 = phi.log_apply(&TateElem::one(&fd, 1).truncate(prec), prec).unwrap();
        assert!(l.agrees_with(&log1, prec));
    }

    #[test]
    fn euler_product_matches_direct_sum() {
        let _fd = f3();
        for (src, s) in [("1", 0), ("t1", 1), ("t1-X", 1)] {
            let phi = module(src, s);
            let prec = 8;
            let direct = l_value(&phi, 1, prec);
            let euler = euler_product(&phi, 1, 8, prec);
            assert!(
                direct.agrees_with(&euler, prec),
                "src={} direct={} euler={}",
                src,
                direct.describe(),
                euler.describe()
            );
        }
        // maxdeg=1, q=3, alpha=1, n=1: agreement mod theta^{-2}
        let phi = module("1", 0);
        let e1 = euler_product(&phi, 1, 1, 8);
        assert!(l_value(&phi, 1, 8).agrees_with(&e1, 2));
    }

    #[test]
    fn euler_factor_at_dividing_prime_is_one() {
        // alpha = (theta^2+1)-parameter over s=0: rho(P)=0 at P | alpha
        let fd = f3();
        let phi = module("X^2+1", 0);
        let p = crate::grammar::parse_fpoly("X^2+1", &fd).unwrap();
        assert!(phi.rho(&p).is_zero());
    }

    #[test]
    fn l_negative_examples() {
        let fd = f3();
        // alpha = t1, j = 0: L(0) = 1
        let phi = module("t1", 1);
        let l0 = l_negative(&phi, 0).unwrap();
        assert_eq!(l0, APoly::one(1, &fd));
        // s=0, alpha=1, j=0: 1
        let c = module("1", 0);
        assert_eq!(l_negative(&c, 0).unwrap(), APoly::one(0, &fd));
        // alpha = t1 - theta, j = 0: matches brute force over degrees 0..5
        let phi = module("t1-X", 1);
        let got = l_negative(&phi, 0).unwrap();
        let mut brute = APoly::zero(1);
        for d in 0..=5usize {
            for idx in 0..monic_count(&fd, d) {
                let a = monic_by_index(&fd, d, idx);
                brute = brute.add(&APoly::constant(phi.rho(&a)), &fd);
            }
        }
        assert_eq!(got, brute);
    }

    #[test]
    fn local_factor_examples() {
        let fd = f3();
        let phi = module("t1-X", 1);
        // P = theta: charpoly = theta - t1
        let lf = local_factor(&phi, &FPoly::theta(&fd)).unwrap();
        let t1 = TPoly::var(0, 1, &fd).unwrap();
        assert_eq!(lf, APoly::from_vec(vec![t1.neg(&fd), TPoly::one(1, &fd)], 1));
        // P = theta^2 + 1: theta^2 - t1^2
        let p = crate::grammar::parse_fpoly("X^2+1", &fd).unwrap();
        let lf = local_factor(&phi, &p).unwrap();
        let expect = parse_apoly("X^2-t1^2", &fd, 1).unwrap();
        assert_eq!(lf, expect);
        // alpha = 1: P - 1 for every prime of degree <= 2
        let c = module("1", 0);
        for d in 1..=2 {
            for p in enumerate_primes(&fd, d) {
                let lf = local_factor(&c, &p).unwrap();
                let expect =
                    APoly::from_fpoly(&p, 0, &fd).sub(&APoly::one(0, &fd), &fd);
                assert_eq!(lf, expect);
            }
        }
        // non-prime rejected
        assert!(matches!(
            local_factor(&c, &crate::grammar::parse_fpoly("X^2", &fd).unwrap()),
            Err(Error::NotPrime)
        ));
    }

    #[test]
    fn fitting_generator_examples() {
        let fd = f3();
        // zero module
        assert_eq!(fitting_generator(&[], 0, &fd), APoly::one(0, &fd));
        // plain theta-action on R/PR: companion matrix -> P
        let p = crate::grammar::parse_fpoly("X^2+1", &fd).unwrap();
        let comp = crate::apoly::companion_matrix(&p, 0, &fd);
        assert_eq!(fitting_generator(&comp, 0, &fd), APoly::from_fpoly(&p, 0, &fd));
    }

    #[test]
    fn exp_of_l_examples() {
        let fd = f3();
        // alpha = 1, s = 0: exp_C(zeta_C(1)) = 1
        let c = module("1", 0);
        assert_eq!(exp_of_l(&c, 12, 10).unwrap(), APoly::one(0, &fd));
        // alpha = t1 (r = 0): 1
        let t = module("t1", 1);
        assert_eq!(exp_of_l(&t, 12, 10).unwrap(), APoly::one(1, &fd));
        // alpha = (t1-theta)(t2-theta)(t3-theta) (r = q): 0
        let c3 = module("(t1-X)*(t2-X)*(t3-X)", 3);
        assert_eq!(exp_of_l(&c3, 9, 7).unwrap(), APoly::zero(3));
    }

    #[test]
    fn lemma_l_times_omega_is_pi_over_theta_minus_t() {
        // (theta - t1) L(1,phi) omega = pi_tilde for alpha = t1 - theta
        let fd = f3();
        let phi = module("t1-X", 1);
        let prec = 12;
        let l = l_value(&phi, 1, prec + 2);
        let om = phi.omega(prec + 2).unwrap();
        let factor = parse_apoly("X - t1", &fd, 1).unwrap();
        let lhs = TateElem::from_apoly(&factor, &fd).mul(&l).mul(&om);
        let pi = pi_tilde(&fd, 1, prec);
        assert!(
            lhs.agrees_with(&pi, prec),
            "lhs={} pi={}",
            lhs.describe(),
            pi.describe()
        );
    }

    #[test]
    fn b_poly_r_equals_q_is_one() {
        let fd = f3();
        let phi = module("(t1-X)*(t2-X)*(t3-X)", 3);
        let (val, report) = b_poly(&phi, 6).unwrap();
        assert_eq!(val, BPolyValue::Poly(APoly::one(3, &fd)));
        assert!(report.monic);
        // r = q: L(1,phi) = -pi/omega directly
        let prec = 8;
        let l = l_value(&phi, 1, prec);
        let om = phi.omega(prec + 2).unwrap();
        let pi = pi_tilde(&fd, 3, prec + 4);
        let rhs = pi.mul(&om.inv().unwrap()).neg();
        assert!(l.agrees_with(&rhs, prec - 1), "l={} rhs={}", l.describe(), rhs.describe());
    }

    #[test]
    fn b_poly_r_one_special_case() {
        let phi = module("t1-X", 1);
        let (val, _) = b_poly(&phi, 4).unwrap();
        match val {
            BPolyValue::RationalOneOver(den) => {
                let fd = f3();
                assert_eq!(den, parse_apoly("X-t1", &fd, 1).unwrap());
            }
            _ => panic!("expected the rational tag"),
        }
        // non-torsion parameter rejected
        let bad = module("(t1-X)*(t2-X)", 2);
        assert!(matches!(b_poly(&bad, 4), Err(Error::NotTorsionCase)));
    }
}
