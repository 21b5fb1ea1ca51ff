//! Dense univariate polynomials in theta over F_{q^m}, plus monic/prime
//! enumeration and root extraction in canonical splitting fields.

use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use std::sync::Arc;

/// Polynomial in theta, coefficients ascending (coeffs[i] is the theta^i term).
/// Canonical form: empty for zero, nonzero leading coefficient otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FPoly {
    pub coeffs: Vec<FFElem>,
}

impl FPoly {
    pub fn zero() -> Self {
        FPoly { coeffs: Vec::new() }
    }
    pub fn one(fd: &FieldDesc) -> Self {
        FPoly { coeffs: vec![fd.one()] }
    }
    pub fn constant(c: FFElem, fd: &FieldDesc) -> Self {
        if fd.is_zero(&c) {
            Self::zero()
        } else {
            FPoly { coeffs: vec![c] }
        }
    }
    pub fn theta(fd: &FieldDesc) -> Self {
        FPoly { coeffs: vec![fd.zero(), fd.one()] }
    }
    pub fn monomial(c: FFElem, deg: usize, fd: &FieldDesc) -> Self {
        if fd.is_zero(&c) {
            return Self::zero();
        }
        let mut coeffs = vec![fd.zero(); deg + 1];
        coeffs[deg] = c;
        FPoly { coeffs }
    }
    pub fn from_vec(mut coeffs: Vec<FFElem>, fd: &FieldDesc) -> Self {
        while coeffs.last().map_or(false, |c| fd.is_zero(c)) {
            coeffs.pop();
        }
        FPoly { coeffs }
    }
    pub fn from_ints(cs: &[i64], fd: &FieldDesc) -> Self {
        Self::from_vec(cs.iter().map(|&c| fd.from_int(c)).collect(), fd)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }
    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }
    pub fn leading(&self) -> Option<&FFElem> {
        self.coeffs.last()
    }
    pub fn is_monic(&self, fd: &FieldDesc) -> bool {
        self.leading().map_or(false, |c| *c == fd.one())
    }
    pub fn coeff(&self, i: usize, fd: &FieldDesc) -> FFElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| fd.zero())
    }

    pub fn add(&self, other: &FPoly, fd: &FieldDesc) -> FPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(fd.add(&self.coeff(i, fd), &other.coeff(i, fd)));
        }
        FPoly::from_vec(coeffs, fd)
    }
    pub fn neg(&self, fd: &FieldDesc) -> FPoly {
        FPoly { coeffs: self.coeffs.iter().map(|c| fd.neg(c)).collect() }
    }
    pub fn sub(&self, other: &FPoly, fd: &FieldDesc) -> FPoly {
        self.add(&other.neg(fd), fd)
    }
    pub fn mul(&self, other: &FPoly, fd: &FieldDesc) -> FPoly {
        if self.is_zero() || other.is_zero() {
            return FPoly::zero();
        }
        let mut coeffs = vec![fd.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if fd.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = fd.add(&coeffs[i + j], &fd.mul(a, b));
            }
        }
        FPoly::from_vec(coeffs, fd)
    }
    pub fn mul_scalar(&self, c: &FFElem, fd: &FieldDesc) -> FPoly {
        FPoly::from_vec(self.coeffs.iter().map(|a| fd.mul(a, c)).collect(), fd)
    }
    pub fn pow(&self, mut n: u64, fd: &FieldDesc) -> FPoly {
        let mut acc = FPoly::one(fd);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, fd);
            }
            base = base.mul(&base, fd);
            n >>= 1;
        }
        acc
    }

    /// Euclidean division; divisor must be nonzero.
    pub fn divrem(&self, div: &FPoly, fd: &FieldDesc) -> (FPoly, FPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree().unwrap();
        if self.degree().map_or(true, |d| d < dd) {
            return (FPoly::zero(), self.clone());
        }
        let lead_inv = fd.inv(div.leading().unwrap());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![fd.zero(); rem.len() - dd];
        while rem.len() > dd {
            let c = fd.mul(rem.last().unwrap(), &lead_inv);
            let shift = rem.len() - 1 - dd;
            if !fd.is_zero(&c) {
                quot[shift] = c.clone();
                for (j, b) in div.coeffs.iter().enumerate() {
                    rem[shift + j] = fd.sub(&rem[shift + j], &fd.mul(&c, b));
                }
            }
            rem.pop();
            while rem.last().map_or(false, |c| fd.is_zero(c)) && rem.len() > dd {
                rem.pop();
            }
        }
        (FPoly::from_vec(quot, fd), FPoly::from_vec(rem, fd))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, div: &FPoly, fd: &FieldDesc) -> Result<FPoly> {
        let (q, r) = self.divrem(div, fd);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    pub fn gcd(&self, other: &FPoly, fd: &FieldDesc) -> FPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b, fd);
            a = b;
            b = r;
        }
        // normalize monic
        if let Some(l) = a.leading() {
            if *l != fd.one() {
                let li = fd.inv(l);
                return a.mul_scalar(&li, fd);
            }
        }
        a
    }

    pub fn eval(&self, x: &FFElem, fd: &FieldDesc) -> FFElem {
        let mut acc = fd.zero();
        for c in self.coeffs.iter().rev() {
            acc = fd.add(&fd.mul(&acc, x), c);
        }
        acc
    }

    /// Formal derivative in theta.
    pub fn derivative(&self, fd: &FieldDesc) -> FPoly {
        if self.coeffs.len() <= 1 {
            return FPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut s = fd.zero();
            for _ in 0..(i as u64 % fd.p) {
                s = fd.add(&s, c);
            }
            coeffs.push(s);
        }
        FPoly::from_vec(coeffs, fd)
    }

    /// The twist theta -> theta^{q^n} (Frobenius on scalar coefficients,
    /// exponent dilation on theta).
    pub fn tau(&self, n: u32, fd: &FieldDesc) -> FPoly {
        if self.is_zero() {
            return FPoly::zero();
        }
        let stride = (fd.q as usize).pow(n);
        let mut coeffs = vec![fd.zero(); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !fd.is_zero(c) {
                coeffs[i * stride] = fd.frobenius(c, n);
            }
        }
        FPoly::from_vec(coeffs, fd)
    }

    pub fn powmod(&self, mut n: u128, modulus: &FPoly, fd: &FieldDesc) -> FPoly {
        let mut acc = FPoly::one(fd);
        let mut base = self.divrem(modulus, fd).1;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, fd).divrem(modulus, fd).1;
            }
            base = base.mul(&base, fd).divrem(modulus, fd).1;
            n >>= 1;
        }
        acc
    }
}

/// Monic polynomial of degree d with index i in [0, q^d): the base-q digits of
/// i read most-significant-first give the coefficient vector
/// (c_{d-1}, ..., c_0), so the stream is ordered lexicographically on
/// coefficient vectors read from the top degree down.
pub fn monic_by_index(fd: &FieldDesc, d: usize, i: u128) -> FPoly {
    debug_assert!(fd.m == 1, "enumeration runs over the base field");
    let mut coeffs = vec![fd.zero(); d + 1];
    coeffs[d] = fd.one();
    let mut rem = i;
    for j in 0..d {
        // digit for theta^{d-1-j} is the j-th most significant
        let place = (fd.q as u128).pow((d - 1 - j) as u32);
        let digit = (rem / place) as usize;
        rem %= place;
        coeffs[d - 1 - j] = fd.from_scalar(fd.scalars_lex()[digit]);
    }
    FPoly::from_vec(coeffs, fd)
}

/// All monic polynomials of degree d, in the deterministic order above.
pub fn enumerate_monic(fd: &Arc<FieldDesc>, d: usize) -> impl Iterator<Item = FPoly> + '_ {
    let total = (fd.q as u128).pow(d as u32);
    (0..total).map(move |i| monic_by_index(fd, d, i))
}

pub fn monic_count(fd: &FieldDesc, d: usize) -> u128 {
    (fd.q as u128).pow(d as u32)
}

/// Irreducibility of a monic polynomial by the gcd-with-theta^{q^i}-theta criterion.
pub fn is_irreducible(f: &FPoly, fd: &FieldDesc) -> bool {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if d == 1 {
        return true;
    }
    let theta = FPoly::theta(fd);
    // theta^{q^d} = theta mod f
    let mut x = theta.clone();
    for _ in 0..d {
        x = x.powmod(fd.q as u128, f, fd);
    }
    if x.sub(&theta, fd) != FPoly::zero() {
        return false;
    }
    // gcd(theta^{q^{d/l}} - theta, f) = 1 for every prime l | d
    for l in prime_divisors(d) {
        let mut y = theta.clone();
        for _ in 0..d / l {
            y = y.powmod(fd.q as u128, f, fd);
        }
        let g = f.gcd(&y.sub(&theta, fd), fd);
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

/// All monic irreducibles of degree d, in enumeration order.
pub fn enumerate_primes(fd: &Arc<FieldDesc>, d: usize) -> Vec<FPoly> {
    assert!(d >= 1);
    enumerate_monic(fd, d).filter(|f| is_irreducible(f, fd)).collect()
}

/// (1/d) * sum_{c | d} mu(c) q^{d/c}: the number of degree-d primes.
pub fn prime_count(q: u64, d: usize) -> u128 {
    let mut total: i128 = 0;
    for c in 1..=d {
        if d % c == 0 {
            total += mobius(c) as i128 * (q as i128).pow((d / c) as u32);
        }
    }
    (total / d as i128) as u128
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut l = 2;
    while l * l <= n {
        if n % l == 0 {
            out.push(l);
            while n % l == 0 {
                n /= l;
            }
        }
        l += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut count = 0;
    let mut l = 2;
    while l * l <= n {
        if n % l == 0 {
            n /= l;
            if n % l == 0 {
                return 0;
            }
            count += 1;
        }
        l += 1;
    }
    if n > 1 {
        count += 1;
    }
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Lift a base-field polynomial into an extension of the same base field.
pub fn lift_to_extension(f: &FPoly, ext: &FieldDesc) -> FPoly {
    let coeffs = f
        .coeffs
        .iter()
        .map(|c| {
            debug_assert_eq!(c.coords.len(), 1);
            ext.from_scalar(c.coords[0])
        })
        .collect();
    FPoly { coeffs }
}

/// Canonical root of a base-field prime P in a given extension containing one:
/// the coordinate-lexicographically least x with P(x) = 0.
pub fn least_root_in(p_poly: &FPoly, ext: &FieldDesc) -> Option<FFElem> {
    let lifted = lift_to_extension(p_poly, ext);
    ext.elements_lex().into_iter().find(|x| ext.is_zero(&lifted.eval(x, ext)))
}

/// splitting_root: the canonical root of an irreducible degree-d polynomial in
/// F_{q^d} built over the canonical degree-d modulus.
pub fn splitting_root(p_poly: &FPoly, fd: &Arc<FieldDesc>) -> Result<(Arc<FieldDesc>, FFElem)> {
    let d = p_poly.degree().ok_or(Error::NotIrreducible)?;
    if d == 0 || !is_irreducible(p_poly, fd) {
        return Err(Error::NotIrreducible);
    }
    let ext = FieldDesc::new(fd.p, fd.e, d as u32)?;
    let root = least_root_in(p_poly, &ext).expect("irreducible of degree d splits in F_{q^d}");
    Ok((ext, root))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<FieldDesc> {
        FieldDesc::base(3, 1).unwrap()
    }

    #[test]
    fn monic_enumeration_counts() {
        let fd = f3();
        assert_eq!(enumerate_monic(&fd, 0).count(), 1);
        let deg1: Vec<_> = enumerate_monic(&fd, 1).collect();
        assert_eq!(deg1.len(), 3);
        assert!(deg1.contains(&FPoly::from_ints(&[0, 1], &fd)));
        assert!(deg1.contains(&FPoly::from_ints(&[1, 1], &fd)));
        assert!(deg1.contains(&FPoly::from_ints(&[2, 1], &fd)));
        let f2 = FieldDesc::base(2, 1).unwrap();
        assert_eq!(enumerate_monic(&f2, 3).count(), 8);
        // no repeats
        let mut all: Vec<_> = enumerate_monic(&f2, 3).collect();
        all.dedup();
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn primes_small_degrees() {
        let fd = f3();
        let p1 = enumerate_primes(&fd, 1);
        assert_eq!(p1.len(), 3);
        let p2 = enumerate_primes(&fd, 2);
        assert_eq!(p2.len(), 3);
        assert!(p2.contains(&FPoly::from_ints(&[1, 0, 1], &fd))); // theta^2 + 1
        let f2 = FieldDesc::base(2, 1).unwrap();
        assert_eq!(enumerate_primes(&f2, 4).len(), 3);
    }

    #[test]
    fn prime_counts_match_formula() {
        for &q in &[2u64, 3] {
            let fd = FieldDesc::base(q, 1).unwrap();
            for d in 1..=6 {
                let brute = enumerate_primes(&fd, d).len() as u128;
                assert_eq!(brute, prime_count(q, d), "q={} d={}", q, d);
            }
        }
    }

    #[test]
    fn divrem_roundtrip() {
        let fd = f3();
        let a = FPoly::from_ints(&[1, 2, 0, 1, 2], &fd);
        let b = FPoly::from_ints(&[2, 1, 1], &fd);
        let (q, r) = a.divrem(&b, &fd);
        assert_eq!(q.mul(&b, &fd).add(&r, &fd), a);
        assert!(r.degree().map_or(true, |d| d < 2));
    }

    #[test]
    fn splitting_roots() {
        let fd = f3();
        // P = theta: root 0 in F_3
        let (f, r) = splitting_root(&FPoly::theta(&fd), &fd).unwrap();
        assert!(f.is_zero(&r));
        // P = theta + 1: root -1 = 2
        let (f, r) = splitting_root(&FPoly::from_ints(&[1, 1], &fd), &fd).unwrap();
        assert_eq!(r, f.from_int(2));
        // P = theta^2 + 1 over F_3: root zeta with zeta^2 = -1 in F_9
        let p = FPoly::from_ints(&[1, 0, 1], &fd);
        let (f9, z) = splitting_root(&p, &fd).unwrap();
        assert_eq!(f9.mul(&z, &z), f9.from_int(-1));
        // the d distinct roots are zeta^{q^j}
        let z3 = f9.frobenius(&z, 1);
        assert!(f9.is_zero(&lift_to_extension(&p, &f9).eval(&z3, &f9)));
        assert_ne!(z, z3);
        // not irreducible -> error
        assert!(splitting_root(&FPoly::from_ints(&[0, 0, 1], &fd), &fd).is_err());
    }

    #[test]
    fn tau_twist_is_substitution() {
        let fd = f3();
        let a = FPoly::from_ints(&[2, 1, 1], &fd); // theta^2 + theta + 2
        let t = a.tau(1, &fd);
        // theta^6 + theta^3 + 2
        let mut expect = vec![0i64; 7];
        expect[0] = 2;
        expect[3] = 1;
        expect[6] = 1;
        assert_eq!(t, FPoly::from_ints(&expect, &fd));
    }

    #[test]
    fn derivative_char_p() {
        let fd = f3();
        // d/dtheta (theta^3 + theta^2 + 1) = 2 theta  (3 theta^2 vanishes)
        let a = FPoly::from_ints(&[1, 0, 1, 1], &fd);
        assert_eq!(a.derivative(&fd), FPoly::from_ints(&[0, 2], &fd));
    }
}
