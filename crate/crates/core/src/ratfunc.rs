//! Exact rational functions in theta over F_q, reduced to lowest terms with
//! monic denominators.

use crate::field::FieldDesc;
use crate::poly::FPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: FPoly,
    pub den: FPoly, // monic, coprime to num; 1 for polynomials
}

impl RatFunc {
    pub fn zero(fd: &FieldDesc) -> Self {
        RatFunc { num: FPoly::zero(), den: FPoly::one(fd) }
    }
    pub fn one(fd: &FieldDesc) -> Self {
        RatFunc { num: FPoly::one(fd), den: FPoly::one(fd) }
    }
    pub fn from_poly(p: FPoly, fd: &FieldDesc) -> Self {
        RatFunc { num: p, den: FPoly::one(fd) }
    }
    pub fn new(num: FPoly, den: FPoly, fd: &FieldDesc) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFunc { num, den };
        r.reduce(fd);
        r
    }
    fn reduce(&mut self, fd: &FieldDesc) {
        if self.num.is_zero() {
            self.den = FPoly::one(fd);
            return;
        }
        let g = self.num.gcd(&self.den, fd);
        if g.degree() != Some(0) {
            self.num = self.num.div_exact(&g, fd).unwrap();
            self.den = self.den.div_exact(&g, fd).unwrap();
        }
        let lead = self.den.leading().unwrap().clone();
        if lead != fd.one() {
            let li = fd.inv(&lead);
            self.den = self.den.mul_scalar(&li, fd);
            self.num = self.num.mul_scalar(&li, fd);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }
    /// The polynomial part when the denominator is 1.
    pub fn as_poly(&self) -> Option<&FPoly> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc, fd: &FieldDesc) -> RatFunc {
        let num = self.num.mul(&other.den, fd).add(&other.num.mul(&self.den, fd), fd);
        let den = self.den.mul(&other.den, fd);
        RatFunc::new(num, den, fd)
    }
    pub fn neg(&self, fd: &FieldDesc) -> RatFunc {
        RatFunc { num: self.num.neg(fd), den: self.den.clone() }
    }
    pub fn sub(&self, other: &RatFunc, fd: &FieldDesc) -> RatFunc {
        self.add(&other.neg(fd), fd)
    }
    pub fn mul(&self, other: &RatFunc, fd: &FieldDesc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num, fd), self.den.mul(&other.den, fd), fd)
    }
    pub fn inv(&self, fd: &FieldDesc) -> RatFunc {
        assert!(!self.is_zero(), "inverse of zero");
        RatFunc::new(self.den.clone(), self.num.clone(), fd)
    }
    pub fn div(&self, other: &RatFunc, fd: &FieldDesc) -> RatFunc {
        self.mul(&other.inv(fd), fd)
    }

    /// theta -> theta^{q^n} twist.
    pub fn tau(&self, n: u32, fd: &FieldDesc) -> RatFunc {
        RatFunc::new(self.num.tau(n, fd), self.den.tau(n, fd), fd)
    }

    /// Valuation at infinity: deg(den) - deg(num); None for zero.
    pub fn v_inf(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        let dd = self.den.degree().unwrap() as i64;
        Some(dd - dn)
    }
}

/// Sum a list of rationals by divide-and-conquer, reducing at every merge.
/// Flat folds let denominators grow to the product of all inputs; tree
/// merging keeps intermediate degrees near the final (collapsed) size.
pub fn sum_tree(mut items: Vec<RatFunc>, fd: &FieldDesc) -> RatFunc {
    if items.is_empty() {
        return RatFunc::zero(fd);
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len() / 2 + 1);
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.add(&b, fd)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;
    use crate::poly::enumerate_monic;

    #[test]
    fn degree_one_harmonic_sum_is_inverse_l1() {
        // sum over monic a of degree 1 of 1/a = 1/(theta - theta^q)
        for &q in &[2u64, 3, 5] {
            let fd = FieldDesc::base(q, 1).unwrap();
            let items: Vec<RatFunc> = enumerate_monic(&fd, 1)
                .map(|a| RatFunc::one(&fd).div(&RatFunc::from_poly(a, &fd), &fd))
                .collect();
            let sum = sum_tree(items, &fd);
            // l_1 = theta - theta^q
            let mut l1 = vec![0i64; q as usize + 1];
            l1[1] = 1;
            l1[q as usize] = -1;
            let l1 = FPoly::from_ints(&l1, &fd);
            let expect = RatFunc::one(&fd).div(&RatFunc::from_poly(l1, &fd), &fd);
            assert_eq!(sum, expect, "q={}", q);
        }
    }

    #[test]
    fn field_laws() {
        let fd = FieldDesc::base(3, 1).unwrap();
        let a = RatFunc::new(
            FPoly::from_ints(&[1, 2], &fd),
            FPoly::from_ints(&[0, 0, 1], &fd),
            &fd,
        );
        let b = RatFunc::new(FPoly::from_ints(&[2], &fd), FPoly::from_ints(&[1, 1], &fd), &fd);
        let s = a.add(&b, &fd);
        assert_eq!(s.sub(&b, &fd), a);
        let p = a.mul(&b, &fd);
        assert_eq!(p.div(&b, &fd), a);
        assert_eq!(a.mul(&a.inv(&fd), &fd), RatFunc::one(&fd));
    }
}
