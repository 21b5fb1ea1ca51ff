//! Dirichlet characters of the first kind, Gauss-Thakur sums, the evaluation
//! maps ev_chi and ev_N, Goss L-values L(n, chi), generalized
//! Bernoulli-Carlitz numbers, and the Herbrand-Ribet divisibility test.

use crate::apoly::APoly;
use crate::carlitz::{base_q_digits, carlitz_exp_formal, carlitz_factorial, pi_tilde};
use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use crate::grammar::fpoly_to_string;
use crate::lseries::{b_poly, weighted_l_sum, BPolyValue};
use crate::poly::{is_irreducible, least_root_in, FPoly};
use crate::ratfunc::RatFunc;
use crate::tate::TateElem;
use crate::tpoly::TPoly;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct CharFactor {
    pub prime: FPoly,
    pub degree: usize,
    /// Exponent N with 1 <= N <= q^d - 2.
    pub exponent: u64,
    /// Base-q digits of the exponent, least significant first.
    pub digits: Vec<u64>,
    /// Canonical root of the prime inside k_a.
    pub zeta: FFElem,
}

/// A (tame) Dirichlet character: a product of Teichmueller-character powers
/// at distinct primes. The trivial character has no factors.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    /// The base field F_q the primes live over.
    pub base: Arc<FieldDesc>,
    /// k_a = F_{q^lcm(deg P_i)}, where all the chosen roots live.
    pub field: Arc<FieldDesc>,
    pub factors: Vec<CharFactor>,
    /// Type: the total base-q digit sum of the exponents.
    pub type_s: usize,
}

impl DirichletCharacter {
    pub fn trivial(base: &Arc<FieldDesc>) -> Result<Self> {
        let field = FieldDesc::new(base.p, base.e, 1)?;
        Ok(DirichletCharacter { base: base.clone(), field, factors: Vec::new(), type_s: 0 })
    }

    pub fn new(base: &Arc<FieldDesc>, parts: Vec<(FPoly, u64)>) -> Result<Self> {
        let fd = &**base;
        let mut lcm = 1u64;
        for (p, n) in &parts {
            if !is_irreducible(p, fd) || !p.is_monic(fd) {
                return Err(Error::NotPrime);
            }
            let d = p.degree().unwrap() as u64;
            let cap = (fd.q as u64).pow(d as u32) - 2;
            if *n < 1 || *n > cap {
                return Err(Error::PreconditionViolated(format!(
                    "exponent must lie in 1..={}, got {}",
                    cap, n
                )));
            }
            lcm = lcm / gcd_u64(lcm, d) * d;
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if parts[i].0 == parts[j].0 {
                    return Err(Error::PreconditionViolated("primes must be distinct".into()));
                }
            }
        }
        let field = FieldDesc::new(base.p, base.e, lcm as u32)?;
        let mut factors = Vec::new();
        let mut type_s = 0usize;
        for (p, n) in parts {
            let digits = base_q_digits(n, fd.q);
            type_s += digits.iter().sum::<u64>() as usize;
            let zeta = least_root_in(&p, &field).expect("prime splits in k_a");
            factors.push(CharFactor {
                degree: p.degree().unwrap(),
                prime: p,
                exponent: n,
                digits,
                zeta,
            });
        }
        Ok(DirichletCharacter { base: base.clone(), field, factors, type_s })
    }

    pub fn conductor(&self) -> FPoly {
        let fd = &*self.base;
        let mut out = FPoly::one(fd);
        for f in &self.factors {
            out = out.mul(&f.prime, fd);
        }
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Evaluation points zeta_{P_i}^{q^j}, ordered by blocks (factor i,
    /// digit j ascending, repeated n_{i,j} times): the substitution targets
    /// of t_1..t_s.
    pub fn eval_points(&self) -> Vec<FFElem> {
        let kfd = &*self.field;
        let mut out = Vec::with_capacity(self.type_s);
        for f in &self.factors {
            for (j, &n) in f.digits.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                let z = kfd.frobenius(&f.zeta, j as u32);
                for _ in 0..n {
                    out.push(z.clone());
                }
            }
        }
        out
    }

    /// The parameter of C_s matching this character's variable blocks.
    pub fn c_s_module(&self) -> Result<DrinfeldModule> {
        DrinfeldModule::c_s(&self.base, self.type_s)
    }

    /// chi(sigma_b) = prod b(zeta_{P_i})^{N_i}, zero when a prime divides b.
    pub fn value_at(&self, b: &FPoly) -> FFElem {
        let kfd = &*self.field;
        let lifted_eval = |p: &FPoly, x: &FFElem| -> FFElem {
            crate::poly::lift_to_extension(p, kfd).eval(x, kfd)
        };
        let mut acc = kfd.one();
        for f in &self.factors {
            let v = lifted_eval(b, &f.zeta);
            if kfd.is_zero(&v) {
                return kfd.zero();
            }
            acc = kfd.mul(&acc, &kfd.pow_u64(&v, f.exponent));
        }
        acc
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// ev_chi: substitute t_{i,j,k} -> zeta_{P_i}^{q^j} into a type_s-variable
/// element over the base field, landing in k_a with no variables left.
pub fn ev_chi(chi: &DirichletCharacter, x: &TateElem) -> Result<TateElem> {
    let points = chi.eval_points();
    if x.s != points.len() {
        return Err(Error::ArityMismatch { expected: points.len(), got: x.s });
    }
    x.eval_vars(&points, &chi.field)
}

/// ev_chi on an exact polynomial.
pub fn ev_chi_apoly(chi: &DirichletCharacter, a: &APoly) -> Result<FPoly> {
    let points = chi.eval_points();
    if a.s != points.len() {
        return Err(Error::ArityMismatch { expected: points.len(), got: a.s });
    }
    let kfd = &*chi.field;
    let coeffs = a
        .coeffs
        .iter()
        .map(|c| {
            let lifted = c.map_coeffs(a.s, |x| kfd.from_scalar(x.coords[0]));
            lifted.eval(&points, kfd)
        })
        .collect();
    Ok(FPoly::from_vec(coeffs, kfd))
}

/// The Anderson-Thakur omega evaluated at a point of k_a:
/// omega(z) = lambda prod_{i>=0} (1 - z theta^{-q^i})^{-1}, with z held
/// fixed (evaluation happens after the t-variable is specialized, so the
/// product factors carry z itself, not its Frobenius orbit).
pub fn omega_at(
    point: &FFElem,
    base: &Arc<FieldDesc>,
    target: &Arc<FieldDesc>,
    prec: i64,
) -> TateElem {
    let om = omega_one_var(base, prec).expect("t - theta is uniformizable");
    om.eval_vars(std::slice::from_ref(point), target).expect("arity 1")
}

/// Gauss-Thakur sum g(chi) = prod_{i,j} (P_i'(zeta_i)^{-q^j} omega(zeta_i^{q^j}))^{n_{i,j}}.
pub fn gauss_sum(chi: &DirichletCharacter, prec: i64) -> TateElem {
    let kfd = &*chi.field;
    let mut acc = TateElem::one(&chi.field, 0).truncate(prec + 2);
    for f in &chi.factors {
        let deriv = crate::poly::lift_to_extension(&f.prime.derivative(&chi.base), kfd);
        let dz = deriv.eval(&f.zeta, kfd);
        let dz_inv = kfd.inv(&dz);
        for (j, &n) in f.digits.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let zj = kfd.frobenius(&f.zeta, j as u32);
            let cj = kfd.pow_u64(&dz_inv, (kfd.q as u64).pow(j as u32));
            let factor = omega_at(&zj, &chi.base, &chi.field, prec + 2).mul_elem(&cj);
            for _ in 0..n {
                acc = acc.mul(&factor);
            }
        }
    }
    acc.truncate(prec)
}

/// Goss-Dirichlet value L(n, chi) = sum over monic b coprime to the conductor
/// of chi(sigma_b) b^{-n}; terms at dividing primes vanish through the
/// character value itself.
pub fn l_chi(chi: &DirichletCharacter, n: u32, prec: i64) -> TateElem {
    let weight_deg: i64 = chi.factors.iter().map(|f| f.exponent as i64).sum();
    weighted_l_sum(&chi.base, &chi.field, 0, n, prec, weight_deg, |b| {
        let v = chi.value_at(b);
        TPoly::constant(v, 0, &chi.field)
    })
}

/// One-variable omega as a Tate element (grade 1).
fn omega_one_var(base: &Arc<FieldDesc>, prec: i64) -> Result<TateElem> {
    let fd = &**base;
    let t = TPoly::var(0, 1, fd)?;
    let alpha = APoly::from_vec(vec![t, TPoly::from_int(-1, 1, fd)], 1);
    DrinfeldModule::new(base, alpha)?.omega(prec)
}

/// b_d evaluated at a k_a point, as a theta-polynomial over k_a.
fn b_d_at_point(d: usize, pt: &FFElem, base: &FieldDesc, kfd: &FieldDesc) -> FPoly {
    let bd = b_d_poly(d, base);
    let mut out = FPoly::zero();
    for (j, c) in bd.coeffs.iter().enumerate() {
        let cv = c.map_coeffs(1, |x| kfd.from_scalar(x.coords[0]));
        let v = cv.eval(std::slice::from_ref(pt), kfd);
        if !kfd.is_zero(&v) {
            out = out.add(&FPoly::monomial(v, j, kfd), kfd);
        }
    }
    out
}

/// Classical Bernoulli-Carlitz number BC_i = Pi(i) [X^i] (X / exp_C(X)),
/// exact.
pub fn bc_classical(i: usize, fd: &FieldDesc) -> RatFunc {
    let (_, recip) = carlitz_exp_formal(i, fd);
    let pi_i = carlitz_factorial(i as u64, fd);
    recip[i].mul(&RatFunc::from_poly(pi_i, fd), fd)
}

#[derive(Clone, Debug)]
pub struct BcGeneralResult {
    /// Grade-zero series over k_a (zero when parity forces vanishing).
    pub series: TateElem,
    /// Exact rational reconstruction (num, den), denominator monic, verified
    /// by re-expansion.
    pub reconstructed: Option<(FPoly, FPoly)>,
    pub vanishes_by_parity: bool,
}

/// Generalized Bernoulli-Carlitz number
/// BC_{i, chi^{-1}} = Pi(i) L(i, chi) g(chi) / pi_tilde^i as a series over
/// k_a, with optional exact reconstruction. For i = 0 with type >= 1, and for
/// i not congruent to the type mod q-1, the value is zero (tagged, or an
/// error in strict mode).
pub fn bc_general(
    chi: &DirichletCharacter,
    i: u64,
    prec: i64,
    reconstruct: bool,
    strict_parity: bool,
) -> Result<BcGeneralResult> {
    let field = chi.field.clone();
    let q = field.q as i64;
    let s = chi.type_s as i64;
    if (i as i64 - s).rem_euclid(q - 1) != 0 {
        if strict_parity {
            return Err(Error::GradeResidue { i: i as i64, s });
        }
        return Ok(BcGeneralResult {
            series: TateElem::zero_to(&field, 0, 0, prec),
            reconstructed: Some((FPoly::zero(), FPoly::one(&field))),
            vanishes_by_parity: true,
        });
    }
    if i == 0 && s >= 1 {
        return Ok(BcGeneralResult {
            series: TateElem::zero_to(&field, 0, 0, prec),
            reconstructed: Some((FPoly::zero(), FPoly::one(&field))),
            vanishes_by_parity: true,
        });
    }
    if i == 0 {
        // trivial character at i = 0: BC_0 = 1
        return Ok(BcGeneralResult {
            series: TateElem::one(&field, 0).truncate(prec),
            reconstructed: Some((FPoly::one(&field), FPoly::one(&field))),
            vanishes_by_parity: false,
        });
    }
    let wp = prec + 2 * i as i64 + 6;
    let l = l_chi(chi, i as u32, wp);
    let g = gauss_sum(chi, wp);
    let pi = pi_tilde(&field, 0, wp + 2);
    let pi_pow_inv = pi.pow_u64(i).inv()?;
    let pi_fact = crate::poly::lift_to_extension(&carlitz_factorial(i, &chi.base), &field);
    let series = l
        .mul(&g)
        .mul(&pi_pow_inv)
        .mul(&TateElem::from_fpoly(&pi_fact, &field, 0))
        .truncate(prec);
    if series.grade != 0 && !series.is_zero_stored() {
        return Err(Error::GradeResidue { i: i as i64, s });
    }
    let reconstructed = if reconstruct {
        let chi2 = chi.clone();
        Some(rational_reconstruct(&series, |p| {
            Ok(bc_general(&chi2, i, p, false, false)?.series)
        })?)
    } else {
        None
    };
    Ok(BcGeneralResult { series, reconstructed, vanishes_by_parity: false })
}

/// Recover an exact rational function from a truncated Laurent series by
/// Pade-style elimination with doubling degree bounds, verified by
/// re-expansion; `refine` recomputes the series at higher precision when a
/// bound needs a wider certification window. Bounds start at 4 and cap at 64.
pub fn rational_reconstruct<F>(f0: &TateElem, refine: F) -> Result<(FPoly, FPoly)>
where
    F: Fn(i64) -> Result<TateElem>,
{
    let field = f0.field.clone();
    let fd = &*field;
    assert_eq!(f0.s, 0);
    if f0.is_zero_stored() {
        return Ok((FPoly::zero(), FPoly::one(fd)));
    }
    let mut f = f0.clone();
    let mut bound = 4i64;
    while bound <= 64 {
        let vmin = f.vmin().unwrap_or(0);
        let need = vmin.max(0) + 2 * bound + 8;
        if f.prec < need {
            f = refine(need + 2)?;
            if f.prec < need {
                return Err(Error::ReconstructionFailed);
            }
        }
        if let Some((num, den)) = try_reconstruct(&f, bound) {
            // verify by re-expansion across the full known window
            let dt = TateElem::from_fpoly(&den, &field, 0).truncate(f.prec + bound).inv()?;
            let expand = TateElem::from_fpoly(&num, &field, 0).mul(&dt);
            let upto = f.prec.min(expand.prec);
            if upto >= need && f.agrees_with(&expand, upto) {
                return Ok((num, den));
            }
        }
        bound *= 2;
    }
    Err(Error::ReconstructionFailed)
}

fn try_reconstruct(f: &TateElem, bound: i64) -> Option<(FPoly, FPoly)> {
    let fd = &*f.field;
    // unknown denominator sum_{k=0..bound} d_k theta^k; constraints: the
    // coefficient of theta^{-e} in den*f vanishes for e = 1 .. prec - bound - 1
    let ncols = bound as usize + 1;
    let emax = f.prec - bound - 1;
    if emax < 1 {
        return None;
    }
    let mut rows = Vec::new();
    for e in 1..emax {
        // coeff_e(den * f) = sum_k d_k * f_{e+k}
        let mut row = Vec::with_capacity(ncols);
        for k in 0..=bound {
            let c = f
                .coeffs
                .get(&(e + k))
                .map(|t| t.as_constant().cloned().unwrap_or_else(|| fd.zero()))
                .unwrap_or_else(|| fd.zero());
            row.push(c);
        }
        rows.push(row);
    }
    let den_coeffs = nullspace_vector(rows, ncols, fd)?;
    let den = FPoly::from_vec(den_coeffs, fd);
    if den.is_zero() {
        return None;
    }
    // numerator = polynomial part of den * f
    let dt = TateElem::from_fpoly(&den, &f.field, 0);
    let prod = dt.mul(f);
    let mut max_deg = 0usize;
    for &e in prod.coeffs.keys() {
        if e <= 0 {
            max_deg = max_deg.max((-e) as usize);
        }
    }
    let mut num_coeffs = vec![fd.zero(); max_deg + 1];
    for (&e, c) in &prod.coeffs {
        if e <= 0 {
            num_coeffs[(-e) as usize] = c.as_constant().cloned().unwrap_or_else(|| fd.zero());
        }
    }
    let num = FPoly::from_vec(num_coeffs, fd);
    // normalize: monic denominator
    let lead = den.leading().unwrap().clone();
    let li = fd.inv(&lead);
    Some((num.mul_scalar(&li, fd), den.mul_scalar(&li, fd)))
}

/// One nonzero kernel vector of the row system, if any.
fn nullspace_vector(mut rows: Vec<Vec<FFElem>>, ncols: usize, fd: &FieldDesc) -> Option<Vec<FFElem>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let mut piv = None;
        for r in rank..rows.len() {
            if !fd.is_zero(&rows[r][col]) {
                piv = Some(r);
                break;
            }
        }
        let Some(p) = piv else { continue };
        rows.swap(rank, p);
        let inv = fd.inv(&rows[rank][col]);
        for c in 0..ncols {
            rows[rank][c] = fd.mul(&rows[rank][c], &inv);
        }
        for r in 0..rows.len() {
            if r != rank && !fd.is_zero(&rows[r][col]) {
                let factor = rows[r][col].clone();
                for c in 0..ncols {
                    let sub = fd.mul(&factor, &rows[rank][c]);
                    rows[r][c] = fd.sub(&rows[r][c], &sub);
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    // free column -> kernel vector
    let free = (0..ncols).find(|&c| pivot_of_col[c].is_none())?;
    let mut v = vec![fd.zero(); ncols];
    v[free] = fd.one();
    for col in 0..ncols {
        if let Some(r) = pivot_of_col[col] {
            // v[col] = -rows[r][free]
            v[col] = fd.neg(&rows[r][free]);
        }
    }
    Some(v)
}

/// ev_N: substitute the last l_q(N) variables by theta-powers
/// (theta^{q^0} n_0 times, theta^{q^1} n_1 times, ...) in an exact
/// polynomial with s' = s + l_q(N) variables.
pub fn ev_n_apoly(a: &APoly, s: usize, n: u64, fd: &FieldDesc) -> APoly {
    let digits = base_q_digits(n, fd.q);
    let slots: Vec<i64> = {
        let mut v = Vec::new();
        for (j, &nj) in digits.iter().enumerate() {
            for _ in 0..nj {
                v.push((fd.q as i64).pow(j as u32));
            }
        }
        v
    };
    assert_eq!(a.s, s + slots.len(), "variable count must be s + l_q(N)");
    let mut out = APoly::zero(s);
    for (jtheta, tp) in a.coeffs.iter().enumerate() {
        for (key, coeff) in &tp.terms {
            let exps = crate::tpoly::unpack_exps(*key, a.s);
            let mut theta_extra = 0i64;
            for (slot, &e) in exps.iter().skip(s).enumerate() {
                theta_extra += slots[slot] * e as i64;
            }
            let kept: Vec<u16> = exps[..s].to_vec();
            let term = APoly::from_vec(
                {
                    let deg = jtheta + theta_extra as usize;
                    let mut cs = vec![TPoly::zero(s); deg + 1];
                    cs[deg] = TPoly::monomial(coeff.clone(), &kept, fd);
                    cs
                },
                s,
            );
            out = out.add(&term, fd);
        }
    }
    out
}

/// b_i(t) = (t - theta)(t - theta^q)...(t - theta^{q^{i-1}}), one variable.
pub fn b_d_poly(d: usize, fd: &FieldDesc) -> APoly {
    let t = TPoly::var(0, 1, fd).unwrap();
    let mut acc = APoly::one(1, fd);
    for i in 0..d {
        let qi = (fd.q as usize).pow(i as u32);
        // t - theta^{q^i}
        let mut cs = vec![TPoly::zero(1); qi + 1];
        cs[0] = t.clone();
        cs[qi] = TPoly::from_int(-1, 1, fd);
        acc = acc.mul(&APoly::from_vec(cs, 1), fd);
    }
    acc
}

#[derive(Clone, Debug)]
pub struct EvnIdentityReport {
    pub part: u8,
    pub checked_to: i64,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

/// Two-sided verification of the ev_N special-value identities.
///
/// Part 1 equates ev_N(B_{s'}) with
/// (-1)^{N + (s'-1)/(q-1)} pi^{N-1} Pi(N)^{-1} omega(t_1)...omega(t_s)
///   sum_b rho(b) (b')^N / b,
/// as s-variable series; part 2 (given d with q^d > N) equates
/// ev_{chi~}(ev_N(tau^d(B_{s'}))) with
/// (-1)^{N + (s'-1)/(q-1)} pi^{N-q^d} ev_{chi~}(omega-prod) L(q^d - N, chi~)
///   ev_{chi~}(b_d-prod) prod_i l_{d-1-i}^{n_i q^i}.
pub fn ev_n_bpoly(
    s: usize,
    n_exp: u64,
    chi_tilde: &DirichletCharacter,
    prec: i64,
    part2_d: Option<usize>,
) -> Result<Vec<EvnIdentityReport>> {
    let base = chi_tilde.base.clone();
    let fd = &*base;
    let q = fd.q as i64;
    let digits = base_q_digits(n_exp, fd.q);
    let ellq: u64 = digits.iter().sum();
    let s_prime = s + ellq as usize;
    if (s_prime as i64 - 1).rem_euclid(q - 1) != 0 || s_prime < 1 {
        return Err(Error::PreconditionViolated(format!(
            "s' = {} must be 1 mod (q-1) and >= 1",
            s_prime
        )));
    }
    if s == 0 && ellq == 1 && n_exp < 2 {
        return Err(Error::PreconditionViolated("need N >= 2 when s = 0 and l_q(N) = 1".into()));
    }
    if chi_tilde.type_s != s {
        return Err(Error::PreconditionViolated("chi~ type must equal s".into()));
    }
    let phi_sp = DrinfeldModule::c_s(&base, s_prime)?;
    let bval = b_poly(&phi_sp, prec.max(6))?.0;
    let sign_exp = (n_exp as i64 + (s_prime as i64 - 1) / (q - 1)) % 2;
    let mut reports = Vec::new();

    // ---- part 1: identity in T_s, before any character evaluation ----
    {
        let wp = prec + n_exp as i64 * 2 + 6;
        let lhs = match &bval {
            BPolyValue::Poly(p) => {
                TateElem::from_apoly(&ev_n_apoly(p, s, n_exp, fd), &base).truncate(wp)
            }
            BPolyValue::RationalOneOver(den) => {
                let dtate = TateElem::from_apoly(&ev_n_apoly(den, s, n_exp, fd), &base);
                dtate.truncate(wp + 2 * den.deg_theta().unwrap_or(0) as i64).inv()?
            }
        };
        // RHS series: sum_d sum_b rho(b) (b')^N / b with empirical
        // stabilization (two consecutive blocks below precision)
        let phi_s = DrinfeldModule::c_s(&base, s)?;
        let series = derivative_weighted_sum(&phi_s, n_exp, wp)?;
        let pi = pi_tilde(&base, s, wp + 2 + n_exp as i64);
        let pi_pow = pi.pow_u64(n_exp.saturating_sub(1));
        let pifact_inv = TateElem::from_fpoly(&carlitz_factorial(n_exp, fd), &base, s)
            .truncate(wp + 2 * carlitz_factorial(n_exp, fd).deg_or_zero() as i64)
            .inv()?;
        let mut omega_prod = TateElem::one(&base, s).truncate(wp + 2);
        let om1 = omega_one_var(&base, wp + 2)?;
        for i in 0..s {
            omega_prod = omega_prod.mul(&om1.with_vars_tate(s, &[i]));
        }
        let mut rhs = pi_pow.mul(&pifact_inv).mul(&omega_prod).mul(&series);
        if sign_exp == 1 {
            rhs = rhs.neg();
        }
        let upto = prec.min(lhs.prec).min(rhs.prec);
        let holds = lhs.agrees_with(&rhs, upto);
        reports.push(EvnIdentityReport {
            part: 1,
            checked_to: upto,
            holds,
            lhs: lhs.truncate(upto).describe(),
            rhs: rhs.truncate(upto).describe(),
        });
    }

    // ---- part 2 ----
    if let Some(d) = part2_d {
        let qd = (fd.q as u64).pow(d as u32);
        if qd <= n_exp {
            return Err(Error::PreconditionViolated("need q^d > N".into()));
        }
        let wp = prec + qd as i64 + 8;
        let kfd = chi_tilde.field.clone();
        let lhs = match &bval {
            BPolyValue::Poly(p) => {
                let evn = ev_n_apoly(&p.tau(d as u32, fd), s, n_exp, fd);
                let ev = ev_chi_apoly(chi_tilde, &evn)?;
                TateElem::from_fpoly(&ev, &kfd, 0).truncate(wp)
            }
            BPolyValue::RationalOneOver(den) => {
                let evn = ev_n_apoly(&den.tau(d as u32, fd), s, n_exp, fd);
                let ev = ev_chi_apoly(chi_tilde, &evn)?;
                TateElem::from_fpoly(&ev, &kfd, 0)
                    .truncate(wp + 2 * ev.deg_or_zero() as i64)
                    .inv()?
            }
        };
        // RHS
        let l_val = l_chi(chi_tilde, (qd - n_exp) as u32, wp);
        let pi = pi_tilde(&kfd, 0, wp + 2 + qd as i64);
        let pi_factor = pi.pow_u64(qd - n_exp).inv()?; // pi^{N - q^d}
        let tables = crate::carlitz::CarlitzTables::new(fd, d);
        let mut lprod = FPoly::one(fd);
        for (i, &ni) in digits.iter().enumerate() {
            if ni == 0 {
                continue;
            }
            let e = ni * (fd.q as u64).pow(i as u32);
            lprod = lprod.mul(&tables.l[d - 1 - i].pow(e, fd), fd);
        }
        let lprod = crate::poly::lift_to_extension(&lprod, &kfd);
        // ev_chi of the omega- and b_d-products over the s variables
        let mut om_ev = TateElem::one(&kfd, 0).truncate(wp + 2);
        let mut bd_ev = FPoly::one(&kfd);
        let points = chi_tilde.eval_points();
        for pt in &points {
            om_ev = om_ev.mul(&omega_at(pt, &chi_tilde.base, &kfd, wp + 2));
            bd_ev = bd_ev.mul(&b_d_at_point(d, pt, fd, &kfd), &kfd);
        }
        let mut rhs = l_val
            .mul(&pi_factor)
            .mul(&om_ev)
            .mul(&TateElem::from_fpoly(&bd_ev, &kfd, 0))
            .mul(&TateElem::from_fpoly(&lprod, &kfd, 0));
        if sign_exp == 1 {
            rhs = rhs.neg();
        }
        let upto = prec.min(lhs.prec).min(rhs.prec);
        let holds = lhs.agrees_with(&rhs, upto);
        reports.push(EvnIdentityReport {
            part: 2,
            checked_to: upto,
            holds,
            lhs: lhs.truncate(upto).describe(),
            rhs: rhs.truncate(upto).describe(),
        });
    }
    Ok(reports)
}

/// sum_{d} sum_{b in A_{+,d}} rho_alpha(b) (b')^N / b, with empirical
/// stabilization: stop once two consecutive degree blocks vanish below the
/// working precision (the sum converges by cancellation, not term decay).
fn derivative_weighted_sum(phi: &DrinfeldModule, n_exp: u64, prec: i64) -> Result<TateElem> {
    let base = phi.field.clone();
    let fd = &*base;
    let mut acc = TateElem::zero_to(&base, phi.s, 0, prec);
    let mut quiet = 0;
    let mut d = 0usize;
    let cap = (3 * prec + 20) as usize;
    while quiet < 2 {
        if d > cap {
            return Err(Error::NoStabilization(d as i64));
        }
        let total = crate::poly::monic_count(fd, d);
        let mut block = TateElem::zero_to(&base, phi.s, 0, prec);
        for idx in 0..total {
            let b = crate::poly::monic_by_index(&base, d, idx);
            let rho = phi.rho(&b);
            if rho.is_zero() {
                continue;
            }
            let deriv = b.derivative(fd);
            if deriv.is_zero() && n_exp > 0 {
                continue;
            }
            let dn = deriv.pow(n_exp, fd);
            let binv_pad = dn.degree().map_or(0, |x| x as i64);
            let binv = TateElem::from_fpoly(&b, &base, phi.s)
                .truncate(prec + binv_pad)
                .inv()?;
            let term = TateElem::from_fpoly(&dn, &base, phi.s)
                .mul(&binv)
                .mul_tpoly(&rho)
                .truncate(prec);
            block = block.add(&term)?;
        }
        if block.is_zero_stored() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        acc = acc.add(&block)?;
        d += 1;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct HrVerdict {
    pub integral: bool,
    pub divisible: bool,
    pub bc_display: String,
    /// Exact and series routes agreed (only when both ran).
    pub routes_agree: Option<bool>,
}

/// The Herbrand-Ribet style test: for a prime P of degree d and
/// chi = theta_P^N chi~, compute BC_{q^d - N, chi~^{-1}}, check
/// P-integrality, and decide divisibility by P; `divisible = true` detects a
/// nontrivial chi-isotypic class-module component.
pub fn herbrand_ribet(
    p: &FPoly,
    n_exp: u64,
    chi_tilde: &DirichletCharacter,
    prec: i64,
) -> Result<HrVerdict> {
    let base = chi_tilde.base.clone();
    let fd = &*base;
    let q = fd.q as i64;
    if !is_irreducible(p, fd) {
        return Err(Error::NotPrime);
    }
    let d = p.degree().unwrap();
    let qd = (fd.q as u64).pow(d as u32);
    if n_exp < 1 || n_exp > qd - 2 {
        return Err(Error::PreconditionViolated(format!(
            "N must lie in 1..={}, got {}",
            qd - 2,
            n_exp
        )));
    }
    for f in &chi_tilde.factors {
        if f.prime == *p {
            return Err(Error::PreconditionViolated("chi~ must be coprime to P".into()));
        }
    }
    let ellq: u64 = base_q_digits(n_exp, fd.q).iter().sum();
    let s_prime = ellq as i64 + chi_tilde.type_s as i64;
    if (s_prime - 1).rem_euclid(q - 1) != 0 {
        return Err(Error::PreconditionViolated(format!(
            "s' = {} must be 1 mod (q-1)",
            s_prime
        )));
    }
    if s_prime == 1 && chi_tilde.is_trivial() && n_exp < 2 {
        return Err(Error::PreconditionViolated("need N >= 2 when s' = 1".into()));
    }
    let m = qd - n_exp;
    let kfd = chi_tilde.field.clone();
    let p_ext = crate::poly::lift_to_extension(p, &kfd);
    let verdict_of = |num: &FPoly, den: &FPoly| -> Result<(bool, bool)> {
        let g = den.gcd(&p_ext, &kfd);
        let integral = g.degree() == Some(0);
        if !integral {
            return Err(Error::NotPIntegral);
        }
        let divisible = num.divrem(&p_ext, &kfd).1.is_zero() && !num.is_zero()
            || num.is_zero();
        Ok((integral, divisible))
    };
    if chi_tilde.is_trivial() {
        // exact route
        let bc = bc_classical(m as usize, fd);
        let num = crate::poly::lift_to_extension(&bc.num, &kfd);
        let den = crate::poly::lift_to_extension(&bc.den, &kfd);
        let (integral, divisible) = verdict_of(&num, &den)?;
        // series route
        let series = bc_general(chi_tilde, m, prec, true, false)?;
        let (rnum, rden) = series.reconstructed.clone().unwrap();
        let (ri, rd) = verdict_of(&rnum, &rden)?;
        let routes_agree = integral == ri
            && divisible == rd
            && rnum == num
            && rden == den;
        Ok(HrVerdict {
            integral,
            divisible,
            bc_display: format!(
                "({})/({})",
                fpoly_to_string(&bc.num, fd),
                fpoly_to_string(&bc.den, fd)
            ),
            routes_agree: Some(routes_agree),
        })
    } else {
        let series = bc_general(chi_tilde, m, prec, true, false)?;
        let (num, den) = series.reconstructed.clone().ok_or(Error::ReconstructionFailed)?;
        let (integral, divisible) = verdict_of(&num, &den)?;
        Ok(HrVerdict {
            integral,
            divisible,
            bc_display: format!(
                "({})/({})",
                fpoly_to_string(&num, &kfd),
                fpoly_to_string(&den, &kfd)
            ),
            routes_agree: None,
        })
    }
}

/// The published Fitting datum ev_chi(B_{C_s}) for a character of type
/// s = 1 mod (q-1), s >= q.
pub fn fitting_specialization(chi: &DirichletCharacter, margin: i64) -> Result<FPoly> {
    let phi = chi.c_s_module()?;
    let (val, _) = b_poly(&phi, margin)?;
    match val {
        BPolyValue::Poly(p) => ev_chi_apoly(chi, &p),
        BPolyValue::RationalOneOver(_) => {
            Err(Error::PreconditionViolated("type must be >= q".into()))
        }
    }
}

// collapse duplicated helper: keep the private name used above

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_fpoly;
    use crate::lseries::l_value;

    fn f3() -> Arc<FieldDesc> {
        FieldDesc::base(3, 1).unwrap()
    }

    #[test]
    fn trivial_and_theta_characters() {
        let fd = f3();
        let chi0 = DirichletCharacter::trivial(&fd).unwrap();
        assert_eq!(chi0.type_s, 0);
        assert!(gauss_sum(&chi0, 8).agrees_with(&TateElem::one(&chi0.field, 0), 8));
        // chi = theta_P with P = theta: zeta = 0, g = omega(0) = lambda
        let chi = DirichletCharacter::new(&fd, vec![(FPoly::theta(&fd), 1)]).unwrap();
        assert_eq!(chi.type_s, 1);
        let g = gauss_sum(&chi, 10);
        let lam = TateElem::lambda_pow(&chi.field, 0, 1);
        assert!(g.agrees_with(&lam, 10), "g = {}", g.describe());
        // ev_chi(t1) with P = theta + 1: zeta = -1 = 2
        let chi2 = DirichletCharacter::new(&fd, vec![(parse_fpoly("X+1", &fd).unwrap(), 1)]).unwrap();
        let t1 = TateElem::from_tpoly(&TPoly::var(0, 1, &fd).unwrap(), &fd);
        let ev = ev_chi(&chi2, &t1).unwrap();
        let two = TateElem::from_fpoly(&FPoly::from_ints(&[2], &chi2.field), &chi2.field, 0);
        assert_eq!(ev.coeffs, two.coeffs);
    }

    #[test]
    fn ev_chi_is_ring_homomorphism() {
        use rand::{Rng, SeedableRng};
        let fd = f3();
        let p = parse_fpoly("X^2+1", &fd).unwrap();
        let chi = DirichletCharacter::new(&fd, vec![(p, 4)]).unwrap(); // N=4=(1,1): type 2
        assert_eq!(chi.type_s, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let mut x = TateElem::zero_to(&fd, 2, 0, 6);
            let mut y = TateElem::zero_to(&fd, 2, 0, 6);
            for e in 0..4i64 {
                for target in [&mut x, &mut y] {
                    let c0 = rng.gen_range(0..3i64);
                    let c1 = rng.gen_range(0..2u16);
                    let c2 = rng.gen_range(0..2u16);
                    if c0 != 0 {
                        let m = TPoly::monomial(fd.from_int(c0), &[c1, c2], &fd);
                        if !m.is_zero() {
                            target.coeffs.insert(e, m);
                        }
                    }
                }
            }
            let exy = ev_chi(&chi, &x.mul(&y)).unwrap();
            let ex = ev_chi(&chi, &x).unwrap();
            let ey = ev_chi(&chi, &y).unwrap();
            assert!(exy.agrees_with(&ex.mul(&ey), exy.prec));
            let sxy = ev_chi(&chi, &x.add(&y).unwrap()).unwrap();
            assert!(sxy.agrees_with(&ex.add(&ey).unwrap(), sxy.prec));
        }
    }

    #[test]
    fn symmetric_evaluation_is_root_choice_independent() {
        // substituting the Galois-conjugate root orbit leaves symmetric
        // polynomials unchanged
        let fd = f3();
        let p = parse_fpoly("X^2+1", &fd).unwrap();
        let chi = DirichletCharacter::new(&fd, vec![(p, 4)]).unwrap(); // N=4=(1,1)
        let kfd = &chi.field;
        let zeta = chi.factors[0].zeta.clone();
        let pts_a = vec![zeta.clone(), kfd.frobenius(&zeta, 1)];
        // the other root choice: zeta^q, whose orbit is (zeta^q, zeta)
        let pts_b = vec![kfd.frobenius(&zeta, 1), zeta.clone()];
        // a symmetric polynomial: t1 t2 + t1 + t2
        let sym = crate::grammar::parse_apoly("t1*t2 + t1 + t2 + X", &fd, 2).unwrap();
        let eval = |pts: &[FFElem]| -> FPoly {
            let coeffs = sym
                .coeffs
                .iter()
                .map(|c| {
                    let lifted = c.map_coeffs(2, |x| kfd.from_scalar(x.coords[0]));
                    lifted.eval(pts, kfd)
                })
                .collect();
            FPoly::from_vec(coeffs, kfd)
        };
        assert_eq!(eval(&pts_a), eval(&pts_b));
    }

    #[test]
    fn gauss_sum_twist_identity() {
        // varphi(g(chi)) = prod (zeta^{q^j} - theta)^{n_j} g(chi)
        let fd = f3();
        let p = parse_fpoly("X^2+1", &fd).unwrap();
        for n in [1u64, 3, 4, 5] {
            let chi = DirichletCharacter::new(&fd, vec![(p.clone(), n)]).unwrap();
            let prec = 10;
            let g = gauss_sum(&chi, prec);
            let lhs = g.frobenius_twist_linear(1);
            let kfd = &chi.field;
            let mut mult = TateElem::one(kfd, 0);
            for f in &chi.factors {
                for (j, &nj) in f.digits.iter().enumerate() {
                    if nj == 0 {
                        continue;
                    }
                    let zj = kfd.frobenius(&f.zeta, j as u32);
                    // (zeta^{q^j} - theta)^{n_j}
                    let lin = TateElem::from_fpoly(
                        &FPoly::from_vec(vec![zj, kfd.neg(&kfd.one())], kfd),
                        kfd,
                        0,
                    );
                    for _ in 0..nj {
                        mult = mult.mul(&lin);
                    }
                }
            }
            let rhs = mult.mul(&g);
            let upto = lhs.prec.min(rhs.prec);
            assert!(
                lhs.agrees_with(&rhs, upto),
                "N={} lhs={} rhs={}",
                n,
                lhs.describe(),
                rhs.describe()
            );
        }
    }

    #[test]
    fn gauss_sum_factorwise_product() {
        let fd = f3();
        let p1 = FPoly::theta(&fd);
        let p2 = parse_fpoly("X+1", &fd).unwrap();
        let chi = DirichletCharacter::new(&fd, vec![(p1.clone(), 1), (p2.clone(), 1)]).unwrap();
        let g = gauss_sum(&chi, 10);
        let g1 = gauss_sum(&DirichletCharacter::new(&fd, vec![(p1, 1)]).unwrap(), 10);
        let g2 = gauss_sum(&DirichletCharacter::new(&fd, vec![(p2, 1)]).unwrap(), 10);
        // both single-prime sums live over k (lcm = 1), so direct product works
        let prod = g1.mul(&g2);
        let upto = g.prec.min(prod.prec);
        assert!(g.agrees_with(&prod, upto));
    }

    #[test]
    fn l_chi_two_routes() {
        // ev_chi(L(n, C_s)) = L(n, chi) term by term
        let fd = f3();
        let p = parse_fpoly("X+1", &fd).unwrap();
        let chi = DirichletCharacter::new(&fd, vec![(p, 1)]).unwrap();
        let prec = 10;
        for n in [1u32, 2] {
            let direct = l_chi(&chi, n, prec);
            let phi = chi.c_s_module().unwrap();
            let via_ev = ev_chi(&chi, &l_value(&phi, n, prec)).unwrap();
            assert!(
                direct.agrees_with(&via_ev, prec),
                "n={} direct={} ev={}",
                n,
                direct.describe(),
                via_ev.describe()
            );
        }
        // trivial character: L(1, 1) = zeta_C(1)
        let chi0 = DirichletCharacter::trivial(&fd).unwrap();
        let z = l_chi(&chi0, 1, prec);
        let zc = crate::lseries::zeta_c(&chi0.field, 1, prec);
        assert!(z.agrees_with(&zc, prec));
    }

    #[test]
    fn bc_classical_values() {
        let fd = f3();
        // BC_0 = 1
        assert_eq!(bc_classical(0, &fd), RatFunc::one(&fd));
        // BC_2 = -1/(theta^3 - theta)
        let d1 = parse_fpoly("X^3-X", &fd).unwrap();
        let expect = RatFunc::new(FPoly::from_ints(&[-1], &fd), d1.clone(), &fd);
        assert_eq!(bc_classical(2, &fd), expect);
        // the closed-form identity: BC_6 l_0^3 / Pi(6) = -1/(theta^9 - theta^3),
        // hence BC_6 = -1/(theta^3-theta)
        let bc6 = bc_classical(6, &fd);
        let pi6 = carlitz_factorial(6, &fd);
        let lhs = bc6.mul(&RatFunc::from_poly(FPoly::one(&fd), &fd), &fd)
            .div(&RatFunc::from_poly(pi6, &fd), &fd);
        let d9 = parse_fpoly("X^9-X^3", &fd).unwrap();
        let rhs = RatFunc::new(FPoly::from_ints(&[-1], &fd), d9, &fd);
        assert_eq!(lhs, rhs);
        assert_eq!(bc6, expect);
    }

    #[test]
    fn bc_two_routes_trivial_character() {
        for &q in &[2u64, 3] {
            let base = FieldDesc::base(q, 1).unwrap();
            let chi = DirichletCharacter::trivial(&base).unwrap();
            let imax = (q * q - 1) as usize;
            for i in 1..=imax {
                if (i as u64) % (q - 1).max(1) != 0 && q > 2 {
                    continue;
                }
                let exact = bc_classical(i, &base);
                let got = bc_general(&chi, i as u64, 10, true, false).unwrap();
                let (num, den) = got.reconstructed.unwrap();
                // both live over extensions of the same base; compare coords
                let exact_num = crate::poly::lift_to_extension(&exact.num, &chi.field);
                let exact_den = crate::poly::lift_to_extension(&exact.den, &chi.field);
                assert_eq!(num, exact_num, "q={} i={}", q, i);
                assert_eq!(den, exact_den, "q={} i={}", q, i);
            }
            // parity vanishing
            if q == 3 {
                let r = bc_general(&chi, 3, 10, false, false).unwrap();
                assert!(r.vanishes_by_parity);
                assert!(matches!(
                    bc_general(&chi, 3, 10, false, true),
                    Err(Error::GradeResidue { .. })
                ));
            }
        }
    }

    #[test]
    fn bc_zero_for_positive_type_at_zero() {
        let fd = f3();
        let p = parse_fpoly("X^2+1", &fd).unwrap();
        let chi = DirichletCharacter::new(&fd, vec![(p, 2)]).unwrap(); // type 2
        let r = bc_general(&chi, 0, 8, false, false).unwrap();
        assert!(r.vanishes_by_parity);
    }

    #[test]
    fn herbrand_ribet_scan_q3() {
        let fd = f3();
        let p = parse_fpoly("X^2+1", &fd).unwrap();
        let chi0 = DirichletCharacter::trivial(&fd).unwrap();
        // admissible N in 2..=7: l_3(N) odd -> N in {3, 5, 7}
        for n in [3u64, 5, 7] {
            let v = herbrand_ribet(&p, n, &chi0, 12).unwrap();
            assert!(v.integral, "N={}", n);
            assert_eq!(v.routes_agree, Some(true), "N={}", n);
            // H_{C_1} = 0: no divisibility anywhere in this family
            assert!(!v.divisible, "N={} bc={}", n, v.bc_display);
        }
        // inadmissible parity rejected
        assert!(herbrand_ribet(&p, 2, &chi0, 10).is_err());
    }

    #[test]
    fn ev_n_substitution() {
        let fd = f3();
        // a = t1 * t2 + theta over s' = 2, N = 1 (one slot, theta^{q^0}):
        // substitute t2 -> theta: theta t1 + theta
        let a = crate::grammar::parse_apoly("t1*t2 + X", &fd, 2).unwrap();
        let out = ev_n_apoly(&a, 1, 1, &fd);
        let expect = crate::grammar::parse_apoly("t1*X + X", &fd, 1).unwrap();
        assert_eq!(out, expect);
        // N = 3 = (0,1): slot is theta^q
        let out2 = ev_n_apoly(&a, 1, 3, &fd);
        let expect2 = crate::grammar::parse_apoly("t1*X^3 + X", &fd, 1).unwrap();
        assert_eq!(out2, expect2);
    }

    #[test]
    fn evn_identity_part1_small() {
        // q=3, s=1, N=2 (s'=3): ev_N(B_3) = ev_N(1) = 1 equals the series side
        let fd = f3();
        let chi = DirichletCharacter::new(&fd, vec![(FPoly::theta(&fd), 1)]).unwrap();
        let reports = ev_n_bpoly(1, 2, &chi, 8, None).unwrap();
        assert!(reports[0].holds, "lhs={} rhs={}", reports[0].lhs, reports[0].rhs);
    }

    #[test]
    fn evn_identity_part2_closed_form() {
        // q=3, s=0, N=q: part 2 reduces to the classical closed form
        let fd = f3();
        let chi0 = DirichletCharacter::trivial(&fd).unwrap();
        let reports = ev_n_bpoly(0, 3, &chi0, 8, Some(2)).unwrap();
        for r in &reports {
            assert!(r.holds, "part={} lhs={} rhs={}", r.part, r.lhs, r.rhs);
        }
    }

    #[test]
    fn fitting_specialization_type_q() {
        let fd = f3();
        // type 3 character: N = 5 = (2,1) over P = theta^2+1
        let p = parse_fpoly("X^2+1", &fd).unwrap();
        let chi = DirichletCharacter::new(&fd, vec![(p, 5)]).unwrap();
        assert_eq!(chi.type_s, 3);
        let f = fitting_specialization(&chi, 6).unwrap();
        // B_{C_3} = 1, so the specialization is 1
        assert_eq!(f, FPoly::one(&chi.field));
    }
}
