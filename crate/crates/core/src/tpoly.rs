//! Sparse multivariate polynomials in t_1..t_s over F_{q^m}.
//!
//! Exponent vectors are packed into a u128 key (8 bits per variable, up to 16
//! variables), so key addition implements monomial multiplication as long as
//! every individual degree stays below 256; that bound is asserted.

use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use std::collections::BTreeMap;

pub const MAX_VARS: usize = 16;

#[inline]
pub fn pack_exps(exps: &[u16]) -> u128 {
    debug_assert!(exps.len() <= MAX_VARS);
    let mut key = 0u128;
    for (i, &e) in exps.iter().enumerate() {
        debug_assert!(e < 256, "variable degree overflow");
        key |= (e as u128) << (8 * i);
    }
    key
}

#[inline]
pub fn unpack_exps(key: u128, s: usize) -> Vec<u16> {
    (0..s).map(|i| ((key >> (8 * i)) & 0xff) as u16).collect()
}

#[inline]
fn key_add_checked(a: u128, b: u128, s: usize) -> u128 {
    let sum = a + b;
    // detect per-lane overflow
    for i in 0..s {
        let la = (a >> (8 * i)) & 0xff;
        let lb = (b >> (8 * i)) & 0xff;
        assert!(la + lb < 256, "variable degree overflow in TPoly multiplication");
    }
    sum
}

/// Sparse polynomial in s variables with field coefficients; no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPoly {
    pub s: usize,
    pub terms: BTreeMap<u128, FFElem>,
}

impl TPoly {
    pub fn zero(s: usize) -> Self {
        TPoly { s, terms: BTreeMap::new() }
    }
    pub fn constant(c: FFElem, s: usize, fd: &FieldDesc) -> Self {
        let mut t = TPoly::zero(s);
        if !fd.is_zero(&c) {
            t.terms.insert(0, c);
        }
        t
    }
    pub fn one(s: usize, fd: &FieldDesc) -> Self {
        Self::constant(fd.one(), s, fd)
    }
    pub fn from_int(n: i64, s: usize, fd: &FieldDesc) -> Self {
        Self::constant(fd.from_int(n), s, fd)
    }
    /// The variable t_{i+1} (0-based index i).
    pub fn var(i: usize, s: usize, fd: &FieldDesc) -> Result<Self> {
        if i >= s || s > MAX_VARS {
            return Err(Error::TooManyVariables(s));
        }
        let mut t = TPoly::zero(s);
        t.terms.insert(1u128 << (8 * i), fd.one());
        Ok(t)
    }
    pub fn monomial(c: FFElem, exps: &[u16], fd: &FieldDesc) -> Self {
        let s = exps.len();
        let mut t = TPoly::zero(s);
        if !fd.is_zero(&c) {
            t.terms.insert(pack_exps(exps), c);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    /// Nonzero constant (no t-dependence)?
    pub fn as_constant(&self) -> Option<&FFElem> {
        if self.terms.len() == 1 {
            self.terms.get(&0)
        } else {
            None
        }
    }
    pub fn is_one(&self, fd: &FieldDesc) -> bool {
        self.as_constant().map_or(false, |c| *c == fd.one())
    }

    fn insert_add(&mut self, key: u128, val: FFElem, fd: &FieldDesc) {
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if !fd.is_zero(&val) {
                    e.insert(val);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = fd.add(e.get(), &val);
                if fd.is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &TPoly, fd: &FieldDesc) -> TPoly {
        debug_assert_eq!(self.s, other.s);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert_add(*k, v.clone(), fd);
        }
        out
    }
    pub fn neg(&self, fd: &FieldDesc) -> TPoly {
        TPoly { s: self.s, terms: self.terms.iter().map(|(k, v)| (*k, fd.neg(v))).collect() }
    }
    pub fn sub(&self, other: &TPoly, fd: &FieldDesc) -> TPoly {
        self.add(&other.neg(fd), fd)
    }
    pub fn mul(&self, other: &TPoly, fd: &FieldDesc) -> TPoly {
        debug_assert_eq!(self.s, other.s);
        let mut out = TPoly::zero(self.s);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let prod = fd.mul(va, vb);
                if !fd.is_zero(&prod) {
                    out.insert_add(key_add_checked(*ka, *kb, self.s), prod, fd);
                }
            }
        }
        out
    }
    pub fn mul_elem(&self, c: &FFElem, fd: &FieldDesc) -> TPoly {
        if fd.is_zero(c) {
            return TPoly::zero(self.s);
        }
        let mut out = TPoly::zero(self.s);
        for (k, v) in &self.terms {
            let prod = fd.mul(v, c);
            if !fd.is_zero(&prod) {
                out.terms.insert(*k, prod);
            }
        }
        out
    }

    /// Frobenius twist on coefficients only (t variables are fixed by tau).
    pub fn frobenius(&self, n: u32, fd: &FieldDesc) -> TPoly {
        if fd.m == 1 {
            return self.clone();
        }
        TPoly { s: self.s, terms: self.terms.iter().map(|(k, v)| (*k, fd.frobenius(v, n))).collect() }
    }

    /// Substitute field values for all variables.
    pub fn eval(&self, points: &[FFElem], fd: &FieldDesc) -> FFElem {
        debug_assert_eq!(points.len(), self.s);
        let mut acc = fd.zero();
        for (k, v) in &self.terms {
            let mut term = v.clone();
            for (i, pt) in points.iter().enumerate() {
                let e = ((k >> (8 * i)) & 0xff) as u64;
                if e > 0 {
                    term = fd.mul(&term, &fd.pow_u64(pt, e));
                }
            }
            acc = fd.add(&acc, &term);
        }
        acc
    }

    /// Substitute the variables of this s-variable polynomial into a target
    /// variable count: `map[i] = Some(j)` renames t_{i+1} to t_{j+1},
    /// `map[i] = None` is not allowed here (use `eval`-style substitutions).
    pub fn rename_vars(&self, map: &[usize], s_out: usize) -> TPoly {
        let mut out = TPoly::zero(s_out);
        for (k, v) in &self.terms {
            let mut nk = 0u128;
            for (i, &j) in map.iter().enumerate() {
                let e = (k >> (8 * i)) & 0xff;
                nk |= e << (8 * j);
            }
            out.terms.insert(nk, v.clone());
        }
        out
    }

    /// Extend (or restrict, if the dropped variables are unused) the variable count.
    pub fn with_vars(&self, s_out: usize) -> TPoly {
        if s_out == self.s {
            return self.clone();
        }
        if s_out > self.s {
            return TPoly { s: s_out, terms: self.terms.clone() };
        }
        for k in self.terms.keys() {
            for i in s_out..self.s {
                assert_eq!((k >> (8 * i)) & 0xff, 0, "cannot drop a used variable");
            }
        }
        TPoly { s: s_out, terms: self.terms.clone() }
    }

    /// Map coefficients into another field through an embedding of the
    /// coefficient field (used by character evaluation).
    pub fn map_coeffs<F: Fn(&FFElem) -> FFElem>(&self, target_s: usize, f: F) -> TPoly {
        TPoly { s: target_s, terms: self.terms.iter().map(|(k, v)| (*k, f(v))).collect() }
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| (0..self.s).map(|i| ((k >> (8 * i)) & 0xff) as usize).sum())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;

    #[test]
    fn ring_ops() {
        let fd = FieldDesc::base(3, 1).unwrap();
        let t1 = TPoly::var(0, 2, &fd).unwrap();
        let t2 = TPoly::var(1, 2, &fd).unwrap();
        let one = TPoly::one(2, &fd);
        // (t1 + t2)(t1 - t2) = t1^2 - t2^2
        let a = t1.add(&t2, &fd);
        let b = t1.sub(&t2, &fd);
        let prod = a.mul(&b, &fd);
        let expect = t1.mul(&t1, &fd).sub(&t2.mul(&t2, &fd), &fd);
        assert_eq!(prod, expect);
        // x + (-x) = 0
        assert!(a.sub(&a, &fd).is_zero());
        assert!(one.mul(&a, &fd) == a);
    }

    #[test]
    fn eval_matches_expansion() {
        let fd = FieldDesc::base(3, 1).unwrap();
        let t1 = TPoly::var(0, 2, &fd).unwrap();
        let t2 = TPoly::var(1, 2, &fd).unwrap();
        let p = t1.mul(&t1, &fd).add(&t2.mul_elem(&fd.from_int(2), &fd), &fd);
        let v = p.eval(&[fd.from_int(2), fd.from_int(1)], &fd);
        // 2^2 + 2*1 = 4 + 2 = 6 = 0 mod 3
        assert!(fd.is_zero(&v));
    }
}
