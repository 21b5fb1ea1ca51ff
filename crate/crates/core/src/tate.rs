//! Precision-tracked, lambda-graded truncated Laurent series in 1/theta with
//! k[t_1..t_s]-polynomial coefficients: the computational model of the Tate
//! algebra T_s(K_infty) and of the rank-one lattice lambda^g T_s(K_infty).
//!
//! Semantics of a value: lambda^grade * ( sum_e coeffs[e] theta^{-e} +
//! O(theta^{-prec}) ), where lambda = lambda_theta satisfies
//! lambda^{q-1} = -theta. Precision is an exponent bound, not a term count;
//! every operation propagates the worst-case bound stated in its contract, so
//! recomputing at higher precision and truncating reproduces lower-precision
//! results bit for bit.

use crate::apoly::APoly;
use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use crate::poly::FPoly;
use crate::tpoly::TPoly;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Sentinel precision for exact elements (embedded polynomials).
pub const PREC_EXACT: i64 = i64::MAX / 8;

#[inline]
fn prec_is_exact(p: i64) -> bool {
    p >= PREC_EXACT / 2
}

#[inline]
fn prec_add(p: i64, d: i64) -> i64 {
    if prec_is_exact(p) {
        PREC_EXACT
    } else {
        (p + d).min(PREC_EXACT)
    }
}

#[inline]
fn prec_scale(p: i64, f: i64) -> i64 {
    if prec_is_exact(p) {
        PREC_EXACT
    } else {
        (p * f).min(PREC_EXACT)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateElem {
    pub field: Arc<FieldDesc>,
    pub s: usize,
    /// Exponent of lambda_theta, in [0, q-2] (always 0 when q = 2).
    pub grade: u32,
    /// Coefficients are known for every exponent e < prec.
    pub prec: i64,
    /// e -> coefficient of theta^{-e}; no zero values, all keys < prec.
    pub coeffs: BTreeMap<i64, TPoly>,
}

impl TateElem {
    // ---- constructors ----

    pub fn zero_exact(field: &Arc<FieldDesc>, s: usize) -> Self {
        TateElem { field: field.clone(), s, grade: 0, prec: PREC_EXACT, coeffs: BTreeMap::new() }
    }
    /// O(theta^{-prec}) at a given grade: "zero to precision".
    pub fn zero_to(field: &Arc<FieldDesc>, s: usize, grade: u32, prec: i64) -> Self {
        TateElem { field: field.clone(), s, grade, prec, coeffs: BTreeMap::new() }
    }
    pub fn one(field: &Arc<FieldDesc>, s: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, TPoly::one(s, field));
        TateElem { field: field.clone(), s, grade: 0, prec: PREC_EXACT, coeffs }
    }
    /// theta^k (k may be negative), exact.
    pub fn theta_pow(field: &Arc<FieldDesc>, s: usize, k: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(-k, TPoly::one(s, field));
        TateElem { field: field.clone(), s, grade: 0, prec: PREC_EXACT, coeffs }
    }
    /// lambda_theta^k for k >= 0, normalized into grade in [0, q-2] with the
    /// wrap rule lambda^{q-1} = -theta.
    pub fn lambda_pow(field: &Arc<FieldDesc>, s: usize, k: u32) -> Self {
        let qm1 = (field.q - 1) as u32;
        let grade = k % qm1.max(1);
        let wraps = (k / qm1.max(1)) as i64;
        let mut c = TPoly::one(s, field);
        if wraps % 2 == 1 {
            c = c.neg(field);
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(-wraps, c);
        TateElem { field: field.clone(), s, grade: grade % qm1.max(1), prec: PREC_EXACT, coeffs }
    }
    pub fn from_tpoly(c: &TPoly, field: &Arc<FieldDesc>) -> Self {
        let mut out = TateElem::zero_exact(field, c.s);
        if !c.is_zero() {
            out.coeffs.insert(0, c.clone());
        }
        out
    }
    pub fn from_apoly(a: &APoly, field: &Arc<FieldDesc>) -> Self {
        let mut out = TateElem::zero_exact(field, a.s);
        for (j, c) in a.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs.insert(-(j as i64), c.clone());
            }
        }
        out
    }
    pub fn from_fpoly(f: &FPoly, field: &Arc<FieldDesc>, s: usize) -> Self {
        let mut out = TateElem::zero_exact(field, s);
        for (j, c) in f.coeffs.iter().enumerate() {
            if !field.is_zero(c) {
                out.coeffs.insert(-(j as i64), TPoly::constant(c.clone(), s, field));
            }
        }
        out
    }

    fn normalize(&mut self) {
        let prec = self.prec;
        self.coeffs.retain(|e, c| *e < prec && !c.is_zero());
    }

    // ---- inspectors ----

    pub fn vmin(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }
    fn vmin_or_prec(&self) -> i64 {
        self.vmin().unwrap_or(self.prec)
    }
    pub fn is_exact(&self) -> bool {
        prec_is_exact(self.prec)
    }
    pub fn is_zero_stored(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// No stored term with exponent below `upto` (and enough precision to say so).
    pub fn is_zero_to(&self, upto: i64) -> bool {
        self.prec >= upto && self.coeffs.keys().next().map_or(true, |&e| e >= upto)
    }
    /// (q-1) * log_q of the Gauss norm: grade - (q-1)*vmin. None for no stored part.
    pub fn log_norm_num(&self) -> Option<i64> {
        let v = self.vmin()?;
        Some(self.grade as i64 - (self.field.q as i64 - 1) * v)
    }
    /// -(q-1) * v_infinity, equal to log_norm_num; kept for readability at call sites.
    pub fn valuation_num(&self) -> Option<i64> {
        self.log_norm_num().map(|n| -n)
    }

    pub fn truncate(&self, prec: i64) -> TateElem {
        let mut out = self.clone();
        if prec < out.prec {
            out.prec = prec;
            out.normalize();
        }
        out
    }

    /// Structural agreement of all coefficients with e < upto; both operands
    /// must know their coefficients that far.
    pub fn agrees_with(&self, other: &TateElem, upto: i64) -> bool {
        if self.prec < upto || other.prec < upto {
            return false;
        }
        let a = self.truncate(upto);
        let b = other.truncate(upto);
        if a.coeffs.is_empty() && b.coeffs.is_empty() {
            return true;
        }
        a.grade == b.grade && a.coeffs == b.coeffs
    }

    fn check_compat(&self, other: &TateElem) {
        debug_assert!(self.field.same_field(&other.field), "field mismatch");
        debug_assert_eq!(self.s, other.s, "variable count mismatch");
    }

    // ---- ring operations ----

    pub fn add(&self, other: &TateElem) -> Result<TateElem> {
        self.check_compat(other);
        // exact zeros are grade-polymorphic
        if self.is_zero_stored() && self.is_exact() {
            return Ok(other.clone());
        }
        if other.is_zero_stored() && other.is_exact() {
            return Ok(self.clone());
        }
        if self.grade != other.grade && !(self.is_zero_stored() || other.is_zero_stored()) {
            return Err(Error::GradeMismatch(self.grade, other.grade));
        }
        let grade = if self.is_zero_stored() { other.grade } else { self.grade };
        if self.grade != other.grade && self.grade != grade && !self.is_zero_stored() {
            return Err(Error::GradeMismatch(self.grade, other.grade));
        }
        let fd = &*self.field;
        let mut out = TateElem {
            field: self.field.clone(),
            s: self.s,
            grade,
            prec: self.prec.min(other.prec),
            coeffs: self.coeffs.clone(),
        };
        for (e, c) in &other.coeffs {
            match out.coeffs.entry(*e) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let sum = o.get().add(c, fd);
                    if sum.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = sum;
                    }
                }
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn neg(&self) -> TateElem {
        let fd = &*self.field;
        TateElem {
            field: self.field.clone(),
            s: self.s,
            grade: self.grade,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg(fd))).collect(),
        }
    }
    pub fn sub(&self, other: &TateElem) -> Result<TateElem> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TateElem) -> TateElem {
        self.check_compat(other);
        let fd = &*self.field;
        let qm1 = (fd.q - 1) as u32;
        let graw = self.grade + other.grade;
        let (grade, wraps) = if qm1 == 0 { (0, 0) } else { (graw % qm1.max(1), (graw / qm1.max(1)) as i64) };
        // prec of the product before the wrap shift
        let prec = prec_add(self.prec, other.vmin_or_prec())
            .min(prec_add(other.prec, self.vmin_or_prec()));
        let prec = prec_add(prec, -wraps);
        let mut out = TateElem {
            field: self.field.clone(),
            s: self.s,
            grade,
            prec,
            coeffs: BTreeMap::new(),
        };
        if self.is_zero_stored() && self.is_exact() || other.is_zero_stored() && other.is_exact() {
            return TateElem::zero_exact(&self.field, self.s);
        }
        let negate = wraps % 2 == 1;
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb - wraps;
                if e >= prec {
                    continue;
                }
                let mut prod = ca.mul(cb, fd);
                if negate {
                    prod = prod.neg(fd);
                }
                if prod.is_zero() {
                    continue;
                }
                match out.coeffs.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let sum = o.get().add(&prod, fd);
                        if sum.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = sum;
                        }
                    }
                }
            }
        }
        out.normalize();
        out
    }

    pub fn mul_tpoly(&self, c: &TPoly) -> TateElem {
        let fd = &*self.field;
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .filter_map(|(e, x)| {
                let p = x.mul(c, fd);
                if p.is_zero() {
                    None
                } else {
                    Some((*e, p))
                }
            })
            .collect();
        out
    }
    pub fn mul_elem(&self, c: &FFElem) -> TateElem {
        let fd = &*self.field;
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .filter_map(|(e, x)| {
                let p = x.mul_elem(c, fd);
                if p.is_zero() {
                    None
                } else {
                    Some((*e, p))
                }
            })
            .collect();
        out
    }
    /// Multiply by theta^k: shifts exponents and the precision bound.
    pub fn mul_theta_pow(&self, k: i64) -> TateElem {
        let mut out = self.clone();
        out.prec = prec_add(self.prec, -k);
        out.coeffs = self.coeffs.iter().map(|(e, c)| (e - k, c.clone())).collect();
        out
    }

    pub fn pow_u64(&self, mut n: u64) -> TateElem {
        let mut acc = TateElem::one(&self.field, self.s);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Inverse of a unit: the leading stored coefficient must be a nonzero
    /// field scalar (no t-dependence). prec_out = prec - 2 vmin, grade
    /// negated with wrap compensation.
    pub fn inv(&self) -> Result<TateElem> {
        let fd = &*self.field;
        let v = self.vmin().ok_or(Error::NotAUnit)?;
        let lead = self.coeffs.get(&v).unwrap();
        let c = lead.as_constant().ok_or(Error::NotAUnit)?.clone();
        if fd.is_zero(&c) {
            return Err(Error::NotAUnit);
        }
        // f = c theta^{-v} (1 + w), v(w) >= 1 relative; w known mod theta^{-(prec - v)}
        let rel_prec = prec_add(self.prec, -v);
        let cinv = fd.inv(&c);
        // w as a grade-0 series with vmin >= 1
        let mut w = TateElem::zero_to(&self.field, self.s, 0, rel_prec);
        for (e, coeff) in &self.coeffs {
            if *e == v {
                continue;
            }
            w.coeffs.insert(e - v, coeff.mul_elem(&cinv, fd));
        }
        w.normalize();
        // geometric series (1+w)^{-1} = sum (-w)^k
        let mut acc = TateElem::one(&self.field, self.s).truncate(rel_prec);
        let mut term = TateElem::one(&self.field, self.s).truncate(rel_prec);
        let neg_w = w.neg();
        loop {
            term = term.mul(&neg_w).truncate(rel_prec);
            if term.is_zero_stored() {
                break;
            }
            acc = acc.add(&term)?;
        }
        // inv = c^{-1} theta^{v} * acc, grade wrap
        let mut out = acc.mul_elem(&cinv).mul_theta_pow(v);
        let qm1 = (fd.q - 1) as u32;
        if qm1 > 0 && self.grade > 0 {
            // lambda^{-g} = lambda^{q-1-g} * (-theta)^{-1}
            out = out.mul_theta_pow(-1).neg();
            out.grade = qm1 - self.grade;
        }
        Ok(out)
    }

    /// Frobenius twist tau^n: exponents e -> q^n e, coefficients c -> c^{q^n},
    /// grade handled by tau(lambda^g) = lambda^g (-theta)^{g (q^n-1)/(q-1)}.
    pub fn tau_apply(&self, n: u32) -> TateElem {
        self.twist_impl(n, true)
    }

    /// The coefficient-fixing twist (k_a-linear extension of tau): same
    /// exponent and grade transport, coefficients left untouched. Used for
    /// Gauss-sum functional equations over extension coefficient fields.
    pub fn frobenius_twist_linear(&self, n: u32) -> TateElem {
        self.twist_impl(n, false)
    }

    fn twist_impl(&self, n: u32, frob_coeffs: bool) -> TateElem {
        if n == 0 {
            return self.clone();
        }
        let fd = &*self.field;
        let qn = (fd.q as i64).pow(n);
        let shift = if fd.q > 1 {
            self.grade as i64 * ((qn - 1) / (fd.q as i64 - 1))
        } else {
            0
        };
        let negate = shift % 2 == 1;
        let mut out = TateElem {
            field: self.field.clone(),
            s: self.s,
            grade: self.grade,
            prec: prec_add(prec_scale(self.prec, qn), -shift),
            coeffs: BTreeMap::new(),
        };
        for (e, c) in &self.coeffs {
            let mut nc = if frob_coeffs { c.frobenius(n, fd) } else { c.clone() };
            if negate {
                nc = nc.neg(fd);
            }
            out.coeffs.insert(e * qn - shift, nc);
        }
        out.normalize();
        out
    }

    /// n-th root of a 1-unit (grade 0, constant term 1) by coefficient-wise
    /// Hensel lifting; requires gcd(n, p) = 1 so the lift is unique.
    pub fn root_of_one_unit(&self, n: u64) -> Result<TateElem> {
        let fd = &*self.field;
        if n as u64 % fd.p == 0 {
            return Err(Error::RootOrderDivisibleByP);
        }
        if self.grade != 0 {
            return Err(Error::NotOneUnit);
        }
        match self.vmin() {
            Some(0) => {}
            _ => return Err(Error::NotOneUnit),
        }
        if !self.coeffs.get(&0).unwrap().is_one(fd) {
            return Err(Error::NotOneUnit);
        }
        let prec = self.prec;
        if prec_is_exact(prec) {
            // an exact 1-unit polynomial may still have an irrational root;
            // callers always pass truncations, but handle it by capping at the
            // largest stored exponent + 1 (exact input of finite support)
            let cap = self.coeffs.keys().last().copied().unwrap_or(0) + 1;
            return self.truncate(cap.max(1)).root_of_one_unit(n);
        }
        let n_scalar = fd.from_int(n as i64);
        let n_inv = fd.inv(&n_scalar);
        let mut y = TateElem::one(&self.field, self.s).truncate(prec);
        for e in 1..prec {
            let yn = y.pow_u64(n).truncate(e + 1);
            let have = yn.coeffs.get(&e).cloned().unwrap_or_else(|| TPoly::zero(self.s));
            let want = self.coeffs.get(&e).cloned().unwrap_or_else(|| TPoly::zero(self.s));
            let delta = want.sub(&have, fd);
            if delta.is_zero() {
                continue;
            }
            let ye = delta.mul_elem(&n_inv, fd);
            y.coeffs.insert(e, ye);
        }
        Ok(y)
    }

    /// Split into the polynomial part (exponents e <= 0) and verify the tail
    /// 1 <= e < prec vanishes. Returns the first offending exponent otherwise.
    pub fn recognize_polynomial(&self, margin: i64) -> Result<RecognizeOutcome> {
        if self.grade != 0 && !self.is_zero_stored() {
            return Err(Error::PreconditionViolated("recognize_polynomial needs grade 0".into()));
        }
        if self.prec < margin {
            return Err(Error::InsufficientPrecision { have: self.prec, need: margin });
        }
        for (&e, _) in self.coeffs.range(1..) {
            return Ok(RecognizeOutcome::Tail { first_nonzero: e });
        }
        let mut max_deg = 0usize;
        for &e in self.coeffs.keys() {
            max_deg = max_deg.max((-e) as usize);
        }
        let mut coeffs = vec![TPoly::zero(self.s); max_deg + 1];
        for (&e, c) in &self.coeffs {
            coeffs[(-e) as usize] = c.clone();
        }
        Ok(RecognizeOutcome::Polynomial(APoly::from_vec(coeffs, self.s)))
    }

    /// Evaluate all t variables at field points in a (possibly larger) target
    /// field; the source coefficient field must be the base field.
    pub fn eval_vars(&self, points: &[FFElem], target: &Arc<FieldDesc>) -> Result<TateElem> {
        if points.len() != self.s {
            return Err(Error::ArityMismatch { expected: self.s, got: points.len() });
        }
        assert_eq!(self.field.m, 1, "eval_vars expects base-field coefficients");
        assert_eq!(self.field.q, target.q);
        let fd = &*self.field;
        let tfd = &**target;
        let mut out = TateElem {
            field: target.clone(),
            s: 0,
            grade: self.grade,
            prec: self.prec,
            coeffs: BTreeMap::new(),
        };
        for (e, c) in &self.coeffs {
            // lift each scalar coefficient, then evaluate
            let lifted = c.map_coeffs(self.s, |x| {
                debug_assert_eq!(x.coords.len(), 1);
                tfd.from_scalar(x.coords[0])
            });
            let _ = fd;
            let v = lifted.eval(points, tfd);
            if !tfd.is_zero(&v) {
                out.coeffs.insert(*e, TPoly::constant(v, 0, tfd));
            }
        }
        Ok(out)
    }

    /// Rename variables into a new variable count: variable i becomes map[i].
    pub fn with_vars_tate(&self, s_out: usize, map: &[usize]) -> TateElem {
        debug_assert_eq!(map.len(), self.s);
        TateElem {
            field: self.field.clone(),
            s: s_out,
            grade: self.grade,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.rename_vars(map, s_out))).collect(),
        }
    }

    /// Pretty form for logs and metadata.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (e, c) in self.coeffs.iter().take(8) {
            parts.push(format!("theta^{}*({})", -e, crate::grammar::tpoly_to_string(c)));
        }
        if self.coeffs.len() > 8 {
            parts.push("...".into());
        }
        let body = if parts.is_empty() { "0".into() } else { parts.join(" + ") };
        let o = if self.is_exact() { String::new() } else { format!(" + O(theta^-{})", self.prec) };
        if self.grade == 0 {
            format!("{}{}", body, o)
        } else {
            format!("lambda^{}*({}{})", self.grade, body, o)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecognizeOutcome {
    Polynomial(APoly),
    Tail { first_nonzero: i64 },
}

impl RecognizeOutcome {
    pub fn into_poly(self) -> Result<APoly> {
        match self {
            RecognizeOutcome::Polynomial(p) => Ok(p),
            RecognizeOutcome::Tail { first_nonzero } => Err(Error::TailNotVanishing(first_nonzero)),
        }
    }
}
