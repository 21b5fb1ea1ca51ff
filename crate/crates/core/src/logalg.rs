//! The non-commutative operator algebra behind log-algebraicity: formal
//! series sum_n c_n tau^n(Z) with coefficients in K[X_j, tau(X_j), ...],
//! the t_i multiplication table, the series L_r, and the special polynomials
//! S_r = exp_C(L_r) with their integrality check and one-variable
//! specialization.

use crate::apoly::APoly;
use crate::carlitz::{carlitz_coeffs, CarlitzTables};
use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::poly::{monic_by_index, monic_count, FPoly};
use crate::ratfunc::{sum_tree, RatFunc};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A monomial: one tau^z(Z) factor and a multiset of tau^m(X_j) symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpMonomial {
    pub z: u32,
    /// (variable index j in 1..=r, twist m) -> multiplicity.
    pub xs: BTreeMap<(u32, u32), u32>,
}

impl OpMonomial {
    pub fn z_only(z: u32) -> Self {
        OpMonomial { z, xs: BTreeMap::new() }
    }
    /// X_1 X_2 ... X_r Z.
    pub fn base(r: usize) -> Self {
        let mut xs = BTreeMap::new();
        for j in 1..=r as u32 {
            xs.insert((j, 0), 1);
        }
        OpMonomial { z: 0, xs }
    }
    pub fn with_symbol(mut self, j: u32, m: u32, mult: u32) -> Self {
        if mult > 0 {
            *self.xs.entry((j, m)).or_insert(0) += mult;
        }
        self
    }
    /// Shift every symbol twist by i (the X-part of tau^i).
    fn tau_shift(&self, i: u32) -> Self {
        OpMonomial {
            z: self.z + i,
            xs: self.xs.iter().map(|(&(j, m), &mu)| ((j, m + i), mu)).collect(),
        }
    }
    fn mul_xs(&self, other: &BTreeMap<(u32, u32), u32>) -> Self {
        let mut xs = self.xs.clone();
        for (&k, &mu) in other {
            *xs.entry(k).or_insert(0) += mu;
        }
        OpMonomial { z: self.z, xs }
    }
    pub fn to_string(&self) -> String {
        let mut parts = Vec::new();
        let zs = match self.z {
            0 => "Z".to_string(),
            1 => "tau(Z)".to_string(),
            m => format!("tau^{}(Z)", m),
        };
        parts.push(zs);
        for (&(j, m), &mu) in &self.xs {
            let sym = match m {
                0 => format!("X{}", j),
                1 => format!("tau(X{})", j),
                m => format!("tau^{}(X{})", m, j),
            };
            if mu == 1 {
                parts.push(sym);
            } else {
                parts.push(format!("{}^{}", sym, mu));
            }
        }
        parts.join("*")
    }
}

/// Truncated element of the operator algebra: terms with zIndex > nmax are
/// dropped and the drop is recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSeries {
    pub r: usize,
    pub nmax: u32,
    pub truncated: bool,
    pub terms: BTreeMap<OpMonomial, RatFunc>,
}

impl OperatorSeries {
    pub fn zero(r: usize, nmax: u32) -> Self {
        OperatorSeries { r, nmax, truncated: false, terms: BTreeMap::new() }
    }
    pub fn from_monomial(r: usize, nmax: u32, m: OpMonomial, c: RatFunc) -> Self {
        let mut s = Self::zero(r, nmax);
        s.insert_add(m, c, None);
        s
    }

    fn insert_add(&mut self, m: OpMonomial, c: RatFunc, fd: Option<&FieldDesc>) {
        if c.is_zero() {
            return;
        }
        if m.z > self.nmax {
            self.truncated = true;
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let fd = fd.expect("field context required for coefficient addition");
                let sum = o.get().add(&c, fd);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &OperatorSeries, fd: &FieldDesc) -> OperatorSeries {
        let mut out = self.clone();
        out.nmax = self.nmax.min(other.nmax);
        out.truncated |= other.truncated;
        out.terms.retain(|m, _| m.z <= out.nmax);
        for (m, c) in &other.terms {
            out.insert_add(m.clone(), c.clone(), Some(fd));
        }
        out
    }

    pub fn scale(&self, c: &RatFunc, fd: &FieldDesc) -> OperatorSeries {
        let mut out = OperatorSeries::zero(self.r, self.nmax);
        out.truncated = self.truncated;
        for (m, v) in &self.terms {
            let p = v.mul(c, fd);
            if !p.is_zero() {
                out.terms.insert(m.clone(), p);
            }
        }
        out
    }

    /// tau: coefficients theta -> theta^q, every symbol twist and the Z twist
    /// shifted by one.
    pub fn tau(&self, i: u32, fd: &FieldDesc) -> OperatorSeries {
        let mut out = OperatorSeries::zero(self.r, self.nmax);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            let nm = m.tau_shift(i);
            if nm.z > self.nmax {
                out.truncated = true;
                continue;
            }
            out.terms.insert(nm, c.tau(i, fd));
        }
        out
    }

    /// The algebra product: (sum f_i tau^i(Z)) (sum g_j tau^j(Z)) =
    /// sum_k (sum_{i+j=k} f_i tau^i(g_j)) tau^k(Z).
    pub fn mul(&self, other: &OperatorSeries, fd: &FieldDesc) -> OperatorSeries {
        let mut out = OperatorSeries::zero(self.r, self.nmax.min(other.nmax));
        out.truncated = self.truncated || other.truncated;
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let z = ma.z + mb.z;
                if z > out.nmax {
                    out.truncated = true;
                    continue;
                }
                // tau^{ma.z} applied to the g_j part (coefficient and X symbols)
                let shifted = OpMonomial {
                    z: 0,
                    xs: mb.xs.iter().map(|(&(j, m), &mu)| ((j, m + ma.z), mu)).collect(),
                };
                let mono = OpMonomial { z, xs: ma.mul_xs(&shifted.xs).xs };
                let coeff = ca.mul(&cb.tau(ma.z, fd), fd);
                out.insert_add(mono, coeff, Some(fd));
            }
        }
        out
    }

    /// Largest zIndex with a nonzero coefficient.
    pub fn max_z(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.z).max()
    }

    /// All coefficients are polynomials (denominator-free).
    pub fn integrality_report(&self) -> Result<()> {
        for (m, c) in &self.terms {
            if !c.is_polynomial() {
                return Err(Error::NonIntegralCoefficient(m.to_string()));
            }
        }
        Ok(())
    }
}

/// The t_i multiplication table: t_i replaces each tau^m(X_i) by
/// tau^m(C_{theta^j}(X_i)) (i <= r), and t_{r+1} shifts the Z twist; other
/// symbols are fixed. Extended multiplicatively over each monomial.
pub fn t_action(
    i: u32,
    j: u32,
    x: &OperatorSeries,
    fd: &FieldDesc,
) -> Result<OperatorSeries> {
    let r = x.r as u32;
    if j == 0 {
        return Ok(x.clone());
    }
    let mut out = OperatorSeries::zero(x.r, x.nmax);
    out.truncated = x.truncated;
    if i == r + 1 {
        for (m, c) in &x.terms {
            let nm = OpMonomial { z: m.z + j, xs: m.xs.clone() };
            if nm.z > x.nmax {
                out.truncated = true;
                continue;
            }
            out.insert_add(nm, c.clone(), Some(fd));
        }
        return Ok(out);
    }
    assert!(i >= 1 && i <= r, "t-index out of range");
    // theta^j action coefficients
    let theta_j = FPoly::monomial(fd.one(), j as usize, fd);
    let cj = carlitz_coeffs(&theta_j, fd)?;
    for (m, c) in &x.terms {
        // expand prod over the X_i symbols of (sum_k (theta^j)_k^{(m)} tau^{m+k}(X_i))^mult
        let mut expansion: Vec<(BTreeMap<(u32, u32), u32>, RatFunc)> =
            vec![(BTreeMap::new(), RatFunc::one(fd))];
        let mut rest: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (&(jj, mm), &mu) in &m.xs {
            if jj != i {
                *rest.entry((jj, mm)).or_insert(0) += mu;
                continue;
            }
            for _ in 0..mu {
                let mut next: Vec<(BTreeMap<(u32, u32), u32>, RatFunc)> = Vec::new();
                for (sym, coeff) in &expansion {
                    for (k, ck) in cj.iter().enumerate() {
                        if ck.is_zero() {
                            continue;
                        }
                        let ck_m = RatFunc::from_poly(ck.tau(mm, fd), fd);
                        let mut nsym = sym.clone();
                        *nsym.entry((i, mm + k as u32)).or_insert(0) += 1;
                        next.push((nsym, coeff.mul(&ck_m, fd)));
                    }
                }
                expansion = next;
            }
        }
        for (sym, coeff) in expansion {
            let mut xs = rest.clone();
            for (k, mu) in sym {
                *xs.entry(k).or_insert(0) += mu;
            }
            let mono = OpMonomial { z: m.z, xs };
            out.insert_add(mono, c.mul(&coeff, fd), Some(fd));
        }
    }
    Ok(out)
}

/// Action of a polynomial g in theta and t_1..t_{r+1} on the base monomial
/// X_1...X_r Z: each t_i^{k} acts through the multiplication table and theta
/// acts as the scalar coefficient.
pub fn act_on_base(g: &APoly, r: usize, nmax: u32, fd: &FieldDesc) -> Result<OperatorSeries> {
    assert_eq!(g.s, r + 1);
    let mut acc = OperatorSeries::zero(r, nmax);
    for (jtheta, tp) in g.coeffs.iter().enumerate() {
        for (key, coeff) in &tp.terms {
            let exps = crate::tpoly::unpack_exps(*key, g.s);
            let mut cur = OperatorSeries::from_monomial(
                r,
                nmax,
                OpMonomial::base(r),
                RatFunc::from_poly(
                    FPoly::monomial(coeff.clone(), jtheta, fd),
                    fd,
                ),
            );
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    cur = t_action(i as u32 + 1, e as u32, &cur, fd)?;
                }
            }
            acc = acc.add(&cur, fd);
        }
    }
    Ok(acc)
}

/// L_r = sum_{d=0}^{dmax} (sum_{a in A_{+,d}} C_a(X_1)...C_a(X_r) a^{-1}) tau^d(Z),
/// with exact rational coefficients.
pub fn build_script_l(r: usize, dmax: u32, fd: &Arc<FieldDesc>) -> Result<OperatorSeries> {
    let mut out = OperatorSeries::zero(r, dmax);
    for d in 0..=dmax {
        let total = monic_count(fd, d as usize) as u64;
        // Carlitz coefficient lists for every monic a of degree d
        let mut lists: Vec<Vec<FPoly>> = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let a = monic_by_index(fd, d as usize, idx as u128);
            lists.push(carlitz_coeffs(&a, fd)?);
        }
        let as_polys: Vec<FPoly> =
            (0..total).map(|i| monic_by_index(fd, d as usize, i as u128)).collect();
        // enumerate exponent tuples (m_1..m_r) in [0..d]^r
        let width = d as usize + 1;
        let tuples: u64 = (width as u64).pow(r as u32);
        let blocks: Vec<(OpMonomial, RatFunc)> = (0..tuples)
            .into_par_iter()
            .map(|t| {
                let mut ms = Vec::with_capacity(r);
                let mut tt = t;
                for _ in 0..r {
                    ms.push((tt % width as u64) as usize);
                    tt /= width as u64;
                }
                let mut items = Vec::with_capacity(total as usize);
                for (ai, list) in lists.iter().enumerate() {
                    let mut prod = FPoly::one(fd);
                    let mut zero = false;
                    for &m in &ms {
                        if list[m].is_zero() {
                            zero = true;
                            break;
                        }
                        prod = prod.mul(&list[m], fd);
                    }
                    if zero {
                        continue;
                    }
                    items.push(RatFunc::new(prod, as_polys[ai].clone(), fd));
                }
                let coeff = sum_tree(items, fd);
                let mut mono = OpMonomial::z_only(d);
                for (jm1, &m) in ms.iter().enumerate() {
                    mono = mono.with_symbol(jm1 as u32 + 1, m as u32, 1);
                }
                (mono, coeff)
            })
            .collect();
        for (m, c) in blocks {
            out.insert_add(m, c, Some(fd));
        }
    }
    Ok(out)
}

/// S_r = exp_C(L_r): apply the operator sum tau^i / D_i through the algebra
/// product, then assert every coefficient lands in A. Returns the series and
/// the largest surviving zIndex.
pub fn log_algebraic_poly(
    r: usize,
    dmax: u32,
    fd: &Arc<FieldDesc>,
) -> Result<(OperatorSeries, Option<u32>)> {
    let script_l = build_script_l(r, dmax, fd)?;
    let mut imax = 0usize;
    while (fd.q as u64).pow(imax as u32 + 1) <= dmax as u64 + 1 || imax as u32 <= dmax {
        imax += 1;
        if imax as u32 > dmax {
            break;
        }
    }
    let tables = CarlitzTables::new(fd, imax);
    // exp_C as the series sum_i D_i^{-1} tau^i(Z); the algebra product then
    // realizes exp_C(L_r)
    let mut exp_series = OperatorSeries::zero(r, dmax);
    for (i, di) in tables.d.iter().enumerate() {
        if i as u32 > dmax {
            break;
        }
        exp_series.insert_add(
            OpMonomial::z_only(i as u32),
            RatFunc::from_poly(FPoly::one(fd), fd).div(&RatFunc::from_poly(di.clone(), fd), fd),
            Some(fd),
        );
    }
    let s = exp_series.mul(&script_l, fd);
    s.integrality_report()?;
    let max_z = s.max_z();
    Ok((s, max_z))
}

/// Commutative image under psi: tau^m(X_j) -> Y_j^{q^m}, tau^m(Z) -> z^{q^m}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedPoly {
    pub r: usize,
    /// (Y-exponents, z-exponent) -> coefficient in A.
    pub terms: BTreeMap<(Vec<u64>, u64), FPoly>,
}

pub fn specialize(s: &OperatorSeries, fd: &FieldDesc) -> Result<SpecializedPoly> {
    s.integrality_report()?;
    let mut out = SpecializedPoly { r: s.r, terms: BTreeMap::new() };
    for (m, c) in &s.terms {
        let mut yexp = vec![0u64; s.r];
        for (&(j, tw), &mu) in &m.xs {
            yexp[(j - 1) as usize] += mu as u64 * (fd.q as u64).pow(tw);
        }
        let zexp = (fd.q as u64).pow(m.z);
        let poly = c.as_poly().unwrap().clone();
        let key = (yexp, zexp);
        match out.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(poly);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&poly, fd);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }
    Ok(out)
}

impl SpecializedPoly {
    /// Substitute all Y_j by a single Y (used against one-variable tables).
    pub fn collapse_y(&self, fd: &FieldDesc) -> BTreeMap<(u64, u64), FPoly> {
        let mut out: BTreeMap<(u64, u64), FPoly> = BTreeMap::new();
        for ((ys, z), c) in &self.terms {
            let ytot: u64 = ys.iter().sum();
            match out.entry((ytot, *z)) {
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
        out
    }
}
