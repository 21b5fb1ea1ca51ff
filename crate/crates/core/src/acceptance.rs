//! The acceptance suite: one check per shipped guarantee, each pinning its
//! tolerance in code. Run through `cargo test --test acceptance` or the CLI
//! `verify` subcommand; both print one pass/fail line per criterion.

use crate::apoly::APoly;
use crate::carlitz::{carlitz_factorial, exp_c_apply, pi_tilde, CarlitzTables};
use crate::characters::{bc_classical, bc_general, herbrand_ribet, DirichletCharacter};
use crate::drinfeld::DrinfeldModule;
use crate::error::Result;
use crate::field::FieldDesc;
use crate::grammar::{parse_apoly, parse_fpoly};
use crate::logalg::{log_algebraic_poly, specialize, OpMonomial, OperatorSeries};
use crate::lseries::{
    b_poly, euler_product, l_value, local_factor, zeta_c, BPolyValue,
};
use crate::nuclear::{infinity_det, nucleus_floor, trace_formula_check};
use crate::poly::{enumerate_primes, FPoly};
use crate::ratfunc::RatFunc;
use crate::tate::TateElem;
use crate::tpoly::TPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub fn run_all() -> Vec<CriterionOutcome> {
    run_selected(&(1..=12).collect::<Vec<_>>())
}

pub fn run_selected(ids: &[usize]) -> Vec<CriterionOutcome> {
    // (id, name, runtime budget in seconds, check)
    let checks: Vec<(usize, &'static str, f64, fn() -> Result<String>)> = vec![
        (1, "carlitz formula exp_C(zeta_C(1)) = 1", 180.0, c01_carlitz_formula),
        (2, "B_q = 1 for q = 3", 300.0, c02_b_poly_q),
        (3, "B_{2q-1} for q = 3 (s = 5)", 600.0, c03_b_poly_2q_minus_1),
        (4, "(theta - t1) L(1,phi) omega = pi_tilde", 60.0, c04_l_omega_pi),
        (5, "Euler product vs direct sum", 300.0, c05_euler_vs_direct),
        (6, "local factors equal P - rho(P)", 120.0, c06_local_factors),
        (7, "log-algebraicity: S_4 and S_1", 300.0, c07_log_algebraicity),
        (8, "omega functional equation", 60.0, c08_omega_functional),
        (9, "Bernoulli-Carlitz values and routes", 120.0, c09_bernoulli_carlitz),
        (10, "Herbrand-Ribet scan at P = X^2+1", 120.0, c10_herbrand_ribet),
        (11, "trace formula mod Z^4", 120.0, c11_trace_formula),
        (12, "randomized property suites", 600.0, c12_property_suites),
    ];
    let mut out = Vec::new();
    for (id, name, budget, f) in checks {
        if !ids.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let (mut passed, mut detail) = match f() {
            Ok(d) => (true, d),
            Err(e) => (false, e.to_string()),
        };
        let seconds = t0.elapsed().as_secs_f64();
        if passed && seconds > budget {
            passed = false;
            detail = format!("over the {}s runtime budget ({:.1}s): {}", budget, seconds, detail);
        }
        out.push(CriterionOutcome { id, name, passed, detail, seconds });
    }
    out
}

fn fail(msg: impl Into<String>) -> crate::error::Error {
    crate::error::Error::PreconditionViolated(msg.into())
}

/// 1. exp_C(zeta_C(1)) = 1 exactly up to theta^{-12} for q in {2, 3, 5}.
fn c01_carlitz_formula() -> Result<String> {
    let prec = 12;
    for &q in &[2u64, 3, 5] {
        let fd = FieldDesc::base(q, 1)?;
        let z = zeta_c(&fd, 1, prec);
        let e = exp_c_apply(&z, prec);
        let diff = e.sub(&TateElem::one(&fd, 0))?;
        if !diff.is_zero_to(prec) {
            return Err(fail(format!("q={}: exp_C(zeta_C(1)) != 1: {}", q, e.describe())));
        }
    }
    Ok(format!("q in {{2,3,5}}, exact through theta^-{}", prec))
}

/// 2. q = 3: L(1,C_3) omega(t1) omega(t2) omega(t3) / pi_tilde = -1 with tail
/// below theta^{-8}.
fn c02_b_poly_q() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let margin = 9; // coefficients at theta^{-1}..theta^{-8} must vanish
    let phi = DrinfeldModule::c_s(&fd, 3)?;
    let aux = margin + 6;
    let omega_prod = one_var_omega_product(&fd, 3, aux)?;
    let pi = pi_tilde(&fd, 3, aux + 2);
    let l1 = l_value(&phi, 1, margin + 1);
    let e = omega_prod.mul(&pi.inv()?).mul(&l1);
    let target = TateElem::one(&fd, 3).neg();
    let diff = e.sub(&target)?;
    if !diff.is_zero_to(margin - 1) {
        return Err(fail(format!("product is {}", e.describe())));
    }
    // cross-check through the b_poly pipeline (omega_alpha product formula)
    let (val, report) = b_poly(&phi, 9)?;
    if val != BPolyValue::Poly(APoly::one(3, &fd)) || !report.monic {
        return Err(fail("b_poly route did not give 1"));
    }
    Ok("both routes give B_3 = 1, tail below theta^-8".into())
}

/// 3. q = 3, s = 5: B_5 = theta - e_3(t_1..t_5) coefficient-exactly, tail
/// below theta^{-6}.
fn c03_b_poly_2q_minus_1() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let phi = DrinfeldModule::c_s(&fd, 5)?;
    let (val, report) = b_poly(&phi, 7)?;
    let poly = match val {
        BPolyValue::Poly(p) => p,
        _ => return Err(fail("unexpected rational value")),
    };
    // theta - sum_{i1<i2<i3} t_{i1} t_{i2} t_{i3}
    let mut e3 = TPoly::zero(5);
    for i in 0..5usize {
        for j in i + 1..5 {
            for k in j + 1..5 {
                let mut exps = [0u16; 5];
                exps[i] = 1;
                exps[j] = 1;
                exps[k] = 1;
                e3 = e3.add(&TPoly::monomial(fd.one(), &exps, &fd), &fd);
            }
        }
    }
    let expect = APoly::from_vec(vec![e3.neg(&fd), TPoly::one(5, &fd)], 5);
    if poly != expect {
        return Err(fail(format!(
            "B_5 = {} (expected theta - e_3)",
            crate::grammar::apoly_to_string(&poly)
        )));
    }
    if !report.monic || report.degree != Some(1) {
        return Err(fail("shape check failed"));
    }
    // evaluation at t_1 = ... = t_5 = zeta gives (theta - zeta)^{(s-q)/(q-1)}
    for z in 0..3i64 {
        let zeta = fd.from_int(z);
        let pts = vec![zeta.clone(); 5];
        let val = {
            let coeffs: Vec<_> = poly
                .coeffs
                .iter()
                .map(|c| c.eval(&pts, &fd))
                .collect();
            FPoly::from_vec(coeffs, &fd)
        };
        let expect_eval = FPoly::from_vec(vec![fd.neg(&zeta), fd.one()], &fd);
        if val != expect_eval {
            return Err(fail(format!("B_5 at t_i = {} is not theta - {}", z, z)));
        }
    }
    // the published Fitting datum of a type-5 character: ev_chi(B_5)
    let chi = DirichletCharacter::new(
        &fd,
        vec![
            (FPoly::theta(&fd), 1),
            (parse_fpoly("X+1", &fd)?, 1),
            (parse_fpoly("X+2", &fd)?, 1),
            (parse_fpoly("X^2+1", &fd)?, 2),
        ],
    )?;
    if chi.type_s != 5 {
        return Err(fail("character type is not 5"));
    }
    let datum = crate::characters::ev_chi_apoly(&chi, &poly)?;
    let points = chi.eval_points();
    let kfd = &*chi.field;
    let mut e3_val = kfd.zero();
    for i in 0..5usize {
        for j in i + 1..5 {
            for k in j + 1..5 {
                let prod = kfd.mul(&kfd.mul(&points[i], &points[j]), &points[k]);
                e3_val = kfd.add(&e3_val, &prod);
            }
        }
    }
    let expect_datum = FPoly::from_vec(vec![kfd.neg(&e3_val), kfd.one()], kfd);
    if datum != expect_datum {
        return Err(fail("ev_chi(B_5) does not match the direct substitution"));
    }
    Ok("B_5 = theta - e_3(t_1..t_5); specializations at zeta and at a type-5 character verified"
        .into())
}

/// 4. (theta - t1) L(1,phi) omega_{t1-theta} = pi_tilde to theta^{-12}, q=3.
fn c04_l_omega_pi() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let prec = 12;
    let phi = DrinfeldModule::new(&fd, parse_apoly("t1-X", &fd, 1)?)?;
    let l = l_value(&phi, 1, prec + 1);
    let om = phi.omega(prec + 3)?;
    let factor = parse_apoly("X-t1", &fd, 1)?;
    let lhs = TateElem::from_apoly(&factor, &fd).mul(&l).mul(&om);
    let pi = pi_tilde(&fd, 1, prec);
    if !lhs.agrees_with(&pi, prec) {
        return Err(fail(format!("lhs={} pi={}", lhs.describe(), pi.describe())));
    }
    Ok(format!("identity holds through theta^-{}", prec))
}

/// 5. l_value and euler_product agree to theta^{-10} for
/// alpha in {1, t1, t1-theta, (t1-theta)(t2-theta)}, q=3.
fn c05_euler_vs_direct() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let prec = 10;
    for (src, s) in [("1", 0), ("t1", 1), ("t1-X", 1), ("(t1-X)*(t2-X)", 2)] {
        let phi = DrinfeldModule::new(&fd, parse_apoly(src, &fd, s)?)?;
        let direct = l_value(&phi, 1, prec);
        let euler = euler_product(&phi, 1, 10, prec);
        if !direct.agrees_with(&euler, prec) {
            return Err(fail(format!(
                "alpha={}: direct={} euler={}",
                src,
                direct.describe(),
                euler.describe()
            )));
        }
    }
    Ok("four parameters agree through theta^-10 (maxdeg 10)".into())
}

/// 6. charpoly of phi_theta on R/PR equals P - rho(P), primes of degree <= 4,
/// q in {2,3}, alpha in {1, t1, t1-theta, (t1-theta)(t2-theta)}.
fn c06_local_factors() -> Result<String> {
    let mut count = 0;
    for &q in &[2u64, 3] {
        let fd = FieldDesc::base(q, 1)?;
        for (src, s) in [("1", 0), ("t1", 1), ("t1-X", 1), ("(t1-X)*(t2-X)", 2)] {
            let phi = DrinfeldModule::new(&fd, parse_apoly(src, &fd, s)?)?;
            for d in 1..=4usize {
                for p in enumerate_primes(&fd, d) {
                    // local_factor verifies the charpoly internally
                    local_factor(&phi, &p)?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{} (prime, parameter) pairs verified", count))
}

/// 7. S_4 matches the displayed polynomial term for term; the one-variable
/// specialization is z Y^4 - z^3 Y^6; S_1 = Z X_1 through dmax 4; all
/// coefficients in A.
fn c07_log_algebraicity() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let (s4, _) = log_algebraic_poly(4, 4, &fd)?;
    s4.integrality_report()?;
    let one = RatFunc::one(&fd);
    let neg = one.neg(&fd);
    let mut expect = OperatorSeries::zero(4, 4);
    expect.terms.insert(OpMonomial::base(4), one.clone());
    for j in 1..=4u32 {
        let mut m = OpMonomial::z_only(1);
        for k in 1..=4u32 {
            m = m.with_symbol(k, if k == j { 1 } else { 0 }, 1);
        }
        expect.terms.insert(m, neg.clone());
    }
    if s4.terms != expect.terms {
        return Err(fail("S_4 does not match the table"));
    }
    let sp = specialize(&s4, &fd)?.collapse_y(&fd);
    let ok = sp.len() == 2
        && sp.get(&(4, 1)) == Some(&FPoly::one(&fd))
        && sp.get(&(6, 3)) == Some(&FPoly::one(&fd).neg(&fd));
    if !ok {
        return Err(fail("specialization is not z Y^4 - z^3 Y^6"));
    }
    let (s1, max_z) = log_algebraic_poly(1, 4, &fd)?;
    s1.integrality_report()?;
    let base1 = OpMonomial::z_only(0).with_symbol(1, 0, 1);
    if s1.terms.len() != 1 || s1.terms.get(&base1) != Some(&RatFunc::one(&fd)) || max_z != Some(0) {
        return Err(fail("S_1 != Z X_1 or higher blocks do not vanish"));
    }
    Ok("S_4 term-exact, specialization z Y^4 - z^3 Y^6, S_1 = Z X_1, all in A".into())
}

/// 8. tau(omega_alpha) = alpha omega_alpha to theta^{-12} for
/// alpha in {t1 - theta, (t1-theta)(t2-theta)(t3-theta)}.
fn c08_omega_functional() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let prec = 12;
    for (src, s) in [("t1-X", 1), ("(t1-X)*(t2-X)*(t3-X)", 3)] {
        let phi = DrinfeldModule::new(&fd, parse_apoly(src, &fd, s)?)?;
        let om = phi.omega(prec + phi.r as i64)?;
        let lhs = om.tau_apply(1);
        let rhs = TateElem::from_apoly(&phi.alpha, &fd).mul(&om);
        if !lhs.agrees_with(&rhs, prec) {
            return Err(fail(format!(
                "alpha={}: tau(omega)={} alpha*omega={}",
                src,
                lhs.describe(),
                rhs.describe()
            )));
        }
    }
    Ok(format!("functional equation holds through theta^-{}", prec))
}

/// 9. BC_0 = 1, BC_{q-1} = -1/(theta^q - theta); the q=3 identity
/// BC_6 l_0^3 / Pi(6) = -1/(theta^9 - theta^3) exactly, so
/// BC_6 = -1/(theta^3 - theta); two-route agreement to theta^{-10} for
/// i in {2, 4, 6}.
fn c09_bernoulli_carlitz() -> Result<String> {
    for &q in &[2u64, 3, 5] {
        let fd = FieldDesc::base(q, 1)?;
        if bc_classical(0, &fd) != RatFunc::one(&fd) {
            return Err(fail(format!("q={}: BC_0 != 1", q)));
        }
        let mut dq = vec![0i64; q as usize + 1];
        dq[q as usize] = 1;
        dq[1] = -1;
        let expect = RatFunc::new(FPoly::from_ints(&[-1], &fd), FPoly::from_ints(&dq, &fd), &fd);
        if bc_classical(q as usize - 1, &fd) != expect {
            return Err(fail(format!("q={}: BC_(q-1) wrong", q)));
        }
    }
    let fd = FieldDesc::base(3, 1)?;
    let bc6 = bc_classical(6, &fd);
    let tables = CarlitzTables::new(&fd, 1);
    let l0_cubed = RatFunc::from_poly(tables.l[0].pow(3, &fd), &fd);
    let lhs = bc6.mul(&l0_cubed, &fd).div(&RatFunc::from_poly(carlitz_factorial(6, &fd), &fd), &fd);
    let rhs = RatFunc::new(
        FPoly::from_ints(&[-1], &fd),
        parse_fpoly("X^9-X^3", &fd)?,
        &fd,
    );
    if lhs != rhs {
        return Err(fail("BC_6 l_0^3 / Pi(6) != -1/(theta^9 - theta^3)"));
    }
    let bc6_expect = RatFunc::new(FPoly::from_ints(&[-1], &fd), parse_fpoly("X^3-X", &fd)?, &fd);
    if bc6 != bc6_expect {
        return Err(fail("BC_6 != -1/(theta^3 - theta)"));
    }
    // two-route agreement at precision 10 for the trivial character
    let chi = DirichletCharacter::trivial(&fd)?;
    let prec = 10;
    for i in [2u64, 4, 6] {
        let series = bc_general(&chi, i, prec, false, false)?.series;
        let exact = bc_classical(i as usize, &fd);
        let den_t = TateElem::from_fpoly(&exact.den, &chi.field, 0)
            .truncate(prec + 2 * exact.den.deg_or_zero() as i64)
            .inv()?;
        let expansion = TateElem::from_fpoly(&exact.num, &chi.field, 0).mul(&den_t);
        if !series.agrees_with(&expansion, prec) {
            return Err(fail(format!(
                "i={}: series={} exact={}",
                i,
                series.describe(),
                expansion.describe()
            )));
        }
    }
    Ok("closed forms exact; two routes agree through theta^-10 for i in {2,4,6}".into())
}

/// 10. q=3, P = X^2+1: admissible N (digit sum odd, 2 <= N <= 7) are
/// {3, 5, 7}; BC_{9-N} is P-integral each time, N = 3 reduces to a unit mod
/// P, and the exact and series routes agree.
fn c10_herbrand_ribet() -> Result<String> {
    let fd = FieldDesc::base(3, 1)?;
    let p = parse_fpoly("X^2+1", &fd)?;
    let chi0 = DirichletCharacter::trivial(&fd)?;
    let mut admissible = Vec::new();
    for n in 2u64..=7 {
        let ell: u64 = crate::carlitz::base_q_digits(n, 3).iter().sum();
        if ell % 2 == 1 {
            admissible.push(n);
        }
    }
    if admissible != vec![3, 5, 7] {
        return Err(fail("admissible N enumeration changed"));
    }
    let mut details = Vec::new();
    for &n in &admissible {
        let v = herbrand_ribet(&p, n, &chi0, 12)?;
        if !v.integral {
            return Err(fail(format!("N={}: BC_{} not P-integral", n, 9 - n)));
        }
        if v.routes_agree != Some(true) {
            return Err(fail(format!("N={}: route verdicts differ", n)));
        }
        if n == 3 && v.divisible {
            return Err(fail("N=3: BC_6 must reduce to a unit mod P"));
        }
        details.push(format!("N={}: BC_{}={} divisible={}", n, 9 - n, v.bc_display, v.divisible));
    }
    Ok(details.join("; "))
}

/// 11. Trace formula: prod_{deg P < 4} det(1+F|_{R/P}) * det(1+F|_infty) = 1
/// mod Z^4 for q in {2,3}, alpha in {1, t1}; depth independence across three
/// nucleus depths.
fn c11_trace_formula() -> Result<String> {
    let nz = 4;
    for &q in &[2u64, 3] {
        let fd = FieldDesc::base(q, 1)?;
        for (src, s) in [("1", 0), ("t1", 1)] {
            let phi = DrinfeldModule::new(&fd, parse_apoly(src, &fd, s)?)?;
            let report = trace_formula_check(&phi, nz)?;
            if !report.holds {
                return Err(fail(format!("q={} alpha={}: trace formula fails", q, src)));
            }
            let floor = nucleus_floor(&phi, nz) as usize;
            let d0 = infinity_det(&phi, nz, floor)?;
            let d1 = infinity_det(&phi, nz, floor + 1)?;
            let d3 = infinity_det(&phi, nz, floor + 3)?;
            if d0 != d1 || d0 != d3 {
                return Err(fail(format!("q={} alpha={}: depth dependence", q, src)));
            }
        }
    }
    Ok("identity and depth independence hold mod Z^4 on the grid".into())
}

/// 12. Randomized property suites, >= 100 cases each, zero failures:
/// rho multiplicativity; Tate ring and precision laws; phi ring
/// homomorphism; exp/log inverse isometries; preimage norm law for alpha=t.
fn c12_property_suites() -> Result<String> {
    let mut notes = Vec::new();

    // (a) rho multiplicativity, 100 pairs over q in {2,3}, deg <= 4
    {
        let mut cases = 0;
        for &q in &[2u64, 3] {
            let fd = FieldDesc::base(q, 1)?;
            let phi = DrinfeldModule::new(&fd, parse_apoly("(t1-X)*(t2-X)", &fd, 2)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(101 + q);
            for _ in 0..50 {
                let mk = |rng: &mut ChaCha8Rng| {
                    let d = rng.gen_range(0..=4);
                    let mut cs: Vec<i64> = (0..d).map(|_| rng.gen_range(0..q as i64)).collect();
                    cs.push(1);
                    FPoly::from_ints(&cs, &fd)
                };
                let a = mk(&mut rng);
                let b = mk(&mut rng);
                let lhs = phi.rho(&a.mul(&b, &fd));
                let rhs = phi.rho(&a).mul(&phi.rho(&b), &fd);
                if lhs != rhs {
                    return Err(fail("rho multiplicativity failed"));
                }
                cases += 1;
            }
        }
        notes.push(format!("rho multiplicativity x{}", cases));
    }

    // (b) Tate ring laws and precision truncation coherence, 100 cases
    {
        let fd = FieldDesc::base(3, 1)?;
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let rand_series = |rng: &mut ChaCha8Rng, prec: i64| {
            let mut x = TateElem::zero_to(&fd, 1, 0, prec);
            for e in -1..prec.min(6) {
                let c0 = rng.gen_range(0..3i64);
                let e1 = rng.gen_range(0..3u16);
                if c0 != 0 {
                    x.coeffs.insert(e, TPoly::monomial(fd.from_int(c0), &[e1], &fd));
                }
            }
            x
        };
        for case in 0..100 {
            let x = rand_series(&mut rng, 8);
            let y = rand_series(&mut rng, 9);
            let z = rand_series(&mut rng, 10);
            let assoc_l = x.add(&y)?.add(&z)?;
            let assoc_r = x.add(&y.add(&z)?)?;
            if assoc_l != assoc_r {
                return Err(fail(format!("add associativity, case {}", case)));
            }
            let dist_l = x.mul(&y.add(&z)?);
            let dist_r = x.mul(&y).add(&x.mul(&z))?;
            let upto = dist_l.prec.min(dist_r.prec);
            if !dist_l.agrees_with(&dist_r, upto) {
                return Err(fail(format!("distributivity, case {}", case)));
            }
            let massoc_l = x.mul(&y).mul(&z);
            let massoc_r = x.mul(&y.mul(&z));
            let upto = massoc_l.prec.min(massoc_r.prec);
            if !massoc_l.agrees_with(&massoc_r, upto) {
                return Err(fail(format!("mul associativity, case {}", case)));
            }
            // ultrametric bound on the sum
            if let (Some(nx), Some(ny), Some(ns)) =
                (x.log_norm_num(), y.log_norm_num(), x.add(&y)?.log_norm_num())
            {
                if ns > nx.max(ny) {
                    return Err(fail("ultrametric inequality violated"));
                }
            }
            // recomputing at higher precision and truncating is bit-exact
            let prod_hi = x.mul(&y);
            let prod_lo = x.truncate(5).mul(&y.truncate(5));
            if prod_hi.truncate(prod_lo.prec) != prod_lo {
                return Err(fail("precision truncation coherence"));
            }
        }
        notes.push("tate ring/precision laws x100".into());
    }

    // (c) phi is a ring homomorphism, 100 pairs
    {
        let fd = FieldDesc::base(3, 1)?;
        let phi = DrinfeldModule::new(&fd, parse_apoly("(t1-X)*(t2-X)", &fd, 2)?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        for _ in 0..100 {
            let mk = |rng: &mut ChaCha8Rng| {
                let d = rng.gen_range(0..=3);
                let mut cs: Vec<i64> = (0..d).map(|_| rng.gen_range(0..3)).collect();
                cs.push(1);
                FPoly::from_ints(&cs, &fd)
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let ab = phi.phi_operator(&a.mul(&b, &fd))?;
            let pa = phi.phi_operator(&a)?;
            let pb = phi.phi_operator(&b)?;
            let mut composed = vec![APoly::zero(2); pa.len() + pb.len() - 1];
            for (i, ai) in pa.iter().enumerate() {
                for (j, bj) in pb.iter().enumerate() {
                    composed[i + j] = composed[i + j].add(&ai.mul(&bj.tau(i as u32, &fd), &fd), &fd);
                }
            }
            while composed.last().map_or(false, |c| c.is_zero()) {
                composed.pop();
            }
            if ab != composed {
                return Err(fail("phi_{ab} != phi_a phi_b"));
            }
            let apb = phi.phi_operator(&a.add(&b, &fd))?;
            let mut sum = vec![APoly::zero(2); pa.len().max(pb.len())];
            for (i, slot) in sum.iter_mut().enumerate() {
                let l = pa.get(i).cloned().unwrap_or_else(|| APoly::zero(2));
                let r = pb.get(i).cloned().unwrap_or_else(|| APoly::zero(2));
                *slot = l.add(&r, &fd);
            }
            while sum.last().map_or(false, |c| c.is_zero()) {
                sum.pop();
            }
            if apb != sum {
                return Err(fail("phi_{a+b} != phi_a + phi_b"));
            }
        }
        notes.push("phi ring homomorphism x100".into());
    }

    // (d) exp/log mutually inverse isometries on the disk, 100 cases
    {
        let fd = FieldDesc::base(3, 1)?;
        let phi = DrinfeldModule::new(&fd, parse_apoly("(t1-X)*(t2-X)", &fd, 2)?)?;
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let prec = 10;
        let mut done = 0;
        while done < 100 {
            let mut x = TateElem::zero_to(&fd, 2, 0, prec);
            for e in 0..5 {
                let c = rng.gen_range(0..3i64);
                let e1 = rng.gen_range(0..2u16);
                let e2 = rng.gen_range(0..2u16);
                if c != 0 {
                    x.coeffs.insert(e, TPoly::monomial(fd.from_int(c), &[e1, e2], &fd));
                }
            }
            if x.is_zero_stored() {
                continue;
            }
            let ex = phi.exp_apply(&x, prec);
            if ex.log_norm_num() != x.log_norm_num() {
                return Err(fail("exp is not isometric on the disk"));
            }
            let back = phi.log_apply(&ex, prec)?;
            if !back.agrees_with(&x, prec) {
                return Err(fail("log(exp(x)) != x"));
            }
            let lx = phi.log_apply(&x, prec)?;
            if lx.log_norm_num() != x.log_norm_num() {
                return Err(fail("log is not isometric on the disk"));
            }
            if !phi.exp_apply(&lx, prec).agrees_with(&x, prec) {
                return Err(fail("exp(log(x)) != x"));
            }
            done += 1;
        }
        notes.push("exp/log inverse isometries x100".into());
    }

    // (e) preimage norm law for alpha = t, 100 cases
    {
        let mut done = 0;
        for &q in &[2u64, 3] {
            let fd = FieldDesc::base(q, 1)?;
            let mut rng = ChaCha8Rng::seed_from_u64(505 + q);
            while done < (if q == 2 { 50 } else { 100 }) {
                // random nonzero y with valuation v in [-1, 3]
                let v = rng.gen_range(-1..=3i64);
                let mut y = TateElem::zero_to(&fd, 0, 0, 40);
                let lead = rng.gen_range(1..q as i64);
                y.coeffs.insert(v, TPoly::from_int(lead, 0, &fd));
                for e in v + 1..v + 4 {
                    let c = rng.gen_range(0..q as i64);
                    if c != 0 {
                        y.coeffs.insert(e, TPoly::from_int(c, 0, &fd));
                    }
                }
                let xs = DrinfeldModule::exp_preimage_alpha_t(&fd, &y, 4)?;
                // eps from |y| = q^{(q - eps)/(q-1)}: eps = q + v (q-1)
                let eps = q as i64 + v * (q as i64 - 1);
                for (n, x) in xs.iter().enumerate() {
                    let qn = (q as i64).pow(n as u32);
                    let expect = q as i64 - qn * eps;
                    if x.log_norm_num() != Some(expect) {
                        return Err(fail(format!(
                            "q={} v={} n={}: |x_n| law failed",
                            q, v, n
                        )));
                    }
                }
                done += 1;
            }
        }
        notes.push("exp-preimage norm law x100".into());
    }

    Ok(notes.join("; "))
}

/// omega(t_1) ... omega(t_s) built from the one-variable omega.
fn one_var_omega_product(fd: &Arc<FieldDesc>, s: usize, prec: i64) -> Result<TateElem> {
    let t = TPoly::var(0, 1, fd)?;
    let alpha = APoly::from_vec(vec![t, TPoly::from_int(-1, 1, fd)], 1);
    let om1 = DrinfeldModule::new(fd, alpha)?.omega(prec)?;
    let mut out = TateElem::one(fd, s).truncate(prec);
    for i in 0..s {
        out = out.mul(&om1.with_vars_tate(s, &[i]));
    }
    Ok(out)
}

