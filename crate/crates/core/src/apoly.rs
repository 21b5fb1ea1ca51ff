//! Polynomials in theta with coefficients in k[t_1..t_s], the resultant map
//! rho_alpha, and division-free (Berkowitz) characteristic polynomials.

use crate::error::{Error, Result};
use crate::field::{FFElem, FieldDesc};
use crate::poly::FPoly;
use crate::tpoly::TPoly;

/// Dense polynomial in theta over k[t_1..t_s]; coeffs[i] is the theta^i term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APoly {
    pub s: usize,
    pub coeffs: Vec<TPoly>,
}

impl APoly {
    pub fn zero(s: usize) -> Self {
        APoly { s, coeffs: Vec::new() }
    }
    pub fn one(s: usize, fd: &FieldDesc) -> Self {
        APoly { s, coeffs: vec![TPoly::one(s, fd)] }
    }
    pub fn theta(s: usize, fd: &FieldDesc) -> Self {
        APoly { s, coeffs: vec![TPoly::zero(s), TPoly::one(s, fd)] }
    }
    pub fn constant(c: TPoly) -> Self {
        let s = c.s;
        if c.is_zero() {
            APoly::zero(s)
        } else {
            APoly { s, coeffs: vec![c] }
        }
    }
    pub fn from_vec(mut coeffs: Vec<TPoly>, s: usize) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        APoly { s, coeffs }
    }
    pub fn from_fpoly(f: &FPoly, s: usize, fd: &FieldDesc) -> Self {
        APoly::from_vec(f.coeffs.iter().map(|c| TPoly::constant(c.clone(), s, fd)).collect(), s)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn deg_theta(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }
    pub fn leading(&self) -> Option<&TPoly> {
        self.coeffs.last()
    }
    pub fn coeff(&self, i: usize) -> TPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| TPoly::zero(self.s))
    }
    pub fn is_monic(&self, fd: &FieldDesc) -> bool {
        self.leading().map_or(false, |c| c.is_one(fd))
    }

    pub fn add(&self, other: &APoly, fd: &FieldDesc) -> APoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&other.coeff(i), fd));
        }
        APoly::from_vec(coeffs, self.s)
    }
    pub fn neg(&self, fd: &FieldDesc) -> APoly {
        APoly { s: self.s, coeffs: self.coeffs.iter().map(|c| c.neg(fd)).collect() }
    }
    pub fn sub(&self, other: &APoly, fd: &FieldDesc) -> APoly {
        self.add(&other.neg(fd), fd)
    }
    pub fn mul(&self, other: &APoly, fd: &FieldDesc) -> APoly {
        if self.is_zero() || other.is_zero() {
            return APoly::zero(self.s);
        }
        let mut coeffs = vec![TPoly::zero(self.s); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b, fd), fd);
            }
        }
        APoly::from_vec(coeffs, self.s)
    }
    pub fn mul_tpoly(&self, c: &TPoly, fd: &FieldDesc) -> APoly {
        APoly::from_vec(self.coeffs.iter().map(|a| a.mul(c, fd)).collect(), self.s)
    }
    pub fn pow(&self, mut n: u64, fd: &FieldDesc) -> APoly {
        let mut acc = APoly::one(self.s, fd);
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

    /// Evaluate at a k[t]-point theta = x.
    pub fn eval_theta(&self, x: &TPoly, fd: &FieldDesc) -> TPoly {
        let mut acc = TPoly::zero(self.s);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, fd).add(c, fd);
        }
        acc
    }

    /// The twist theta -> theta^{q^n}, Frobenius on scalar coefficients.
    pub fn tau(&self, n: u32, fd: &FieldDesc) -> APoly {
        if self.is_zero() {
            return APoly::zero(self.s);
        }
        let stride = (fd.q as usize).pow(n);
        let mut coeffs = vec![TPoly::zero(self.s); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[i * stride] = c.frobenius(n, fd);
            }
        }
        APoly::from_vec(coeffs, self.s)
    }

    /// Exact synthetic division by (theta - x) for a k[t]-point x; returns the
    /// quotient when the remainder vanishes.
    pub fn div_linear_exact(&self, x: &TPoly, fd: &FieldDesc) -> Option<APoly> {
        let d = self.deg_theta()?;
        if d == 0 {
            return None;
        }
        let mut quot = vec![TPoly::zero(self.s); d];
        let mut carry = self.coeffs[d].clone();
        for i in (0..d).rev() {
            quot[i] = carry.clone();
            carry = carry.mul(x, fd).add(&self.coeffs[i], fd);
        }
        if carry.is_zero() {
            Some(APoly::from_vec(quot, self.s))
        } else {
            None
        }
    }

    /// Restrict to zero variables (valid when no t appears), as an FPoly.
    pub fn to_fpoly(&self, fd: &FieldDesc) -> Option<FPoly> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c.is_zero() {
                coeffs.push(fd.zero());
            } else {
                coeffs.push(c.as_constant()?.clone());
            }
        }
        Some(FPoly::from_vec(coeffs, fd))
    }

    pub fn with_vars(&self, s_out: usize) -> APoly {
        APoly { s: s_out, coeffs: self.coeffs.iter().map(|c| c.with_vars(s_out)).collect() }
    }
}

// ---- generic commutative-ring contexts for division-free linear algebra ----

/// Commutative-ring operations abstracted over a context value, so the same
/// Berkowitz routine serves TPoly matrices and Z-truncated series matrices.
pub trait RingCtx {
    type El: Clone;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
}

pub struct TPolyRing<'a> {
    pub fd: &'a FieldDesc,
    pub s: usize,
}

impl<'a> RingCtx for TPolyRing<'a> {
    type El = TPoly;
    fn zero(&self) -> TPoly {
        TPoly::zero(self.s)
    }
    fn one(&self) -> TPoly {
        TPoly::one(self.s, self.fd)
    }
    fn add(&self, a: &TPoly, b: &TPoly) -> TPoly {
        a.add(b, self.fd)
    }
    fn neg(&self, a: &TPoly) -> TPoly {
        a.neg(self.fd)
    }
    fn mul(&self, a: &TPoly, b: &TPoly) -> TPoly {
        a.mul(b, self.fd)
    }
}

/// Samuelson-Berkowitz characteristic polynomial: division-free, returns the
/// coefficients of det(Z I - M) from the leading 1 down to the constant term.
pub fn berkowitz_charpoly<R: RingCtx>(ring: &R, mat: &[Vec<R::El>]) -> Vec<R::El> {
    let n = mat.len();
    let mut poly = vec![ring.one()];
    for k in 0..n {
        // generator column (1, -d, -R C, -R M C, -R M^2 C, ...), length k+2
        let d = &mat[k][k];
        let mut gen = Vec::with_capacity(k + 2);
        gen.push(ring.one());
        gen.push(ring.neg(d));
        if k > 0 {
            // v starts as C = mat[0..k][k]
            let mut v: Vec<R::El> = (0..k).map(|i| mat[i][k].clone()).collect();
            for _ in 0..k {
                // R . v
                let mut rv = ring.zero();
                for j in 0..k {
                    rv = ring.add(&rv, &ring.mul(&mat[k][j], &v[j]));
                }
                gen.push(ring.neg(&rv));
                if gen.len() == k + 2 {
                    break;
                }
                // v = M v
                let mut nv = Vec::with_capacity(k);
                for i in 0..k {
                    let mut acc = ring.zero();
                    for j in 0..k {
                        acc = ring.add(&acc, &ring.mul(&mat[i][j], &v[j]));
                    }
                    nv.push(acc);
                }
                v = nv;
            }
        }
        // new = gen (*) poly  (lower-triangular Toeplitz application)
        let mut next = Vec::with_capacity(k + 2);
        for i in 0..k + 2 {
            let mut acc = ring.zero();
            for (j, pj) in poly.iter().enumerate().take(i + 1) {
                let gi = i - j;
                if gi < gen.len() {
                    acc = ring.add(&acc, &ring.mul(&gen[gi], pj));
                }
            }
            next.push(acc);
        }
        poly = next;
    }
    poly
}

/// det(Z I - M) as a monic theta-polynomial (Z renamed theta).
pub fn charpoly_fraction_free(mat: &[Vec<TPoly>], s: usize, fd: &FieldDesc) -> APoly {
    let ring = TPolyRing { fd, s };
    let coeffs = berkowitz_charpoly(&ring, mat);
    // coeffs: leading first; APoly stores ascending
    let n = coeffs.len();
    let mut asc = Vec::with_capacity(n);
    for i in (0..n).rev() {
        asc.push(coeffs[i].clone());
    }
    APoly::from_vec(asc, s)
}

/// Determinant of a square TPoly matrix, division-free.
pub fn det_tpoly(mat: &[Vec<TPoly>], s: usize, fd: &FieldDesc) -> TPoly {
    let n = mat.len();
    if n == 0 {
        return TPoly::one(s, fd);
    }
    let cp = charpoly_fraction_free(mat, s, fd);
    // charpoly(0) = det(-M) = (-1)^n det(M)
    let c0 = cp.coeff(0);
    if n % 2 == 0 {
        c0
    } else {
        c0.neg(fd)
    }
}

/// Companion matrix of a monic FPoly, entries lifted to TPoly in s variables.
pub fn companion_matrix(a: &FPoly, s: usize, fd: &FieldDesc) -> Vec<Vec<TPoly>> {
    let d = a.degree().expect("companion of a nonzero polynomial");
    let mut mat = vec![vec![TPoly::zero(s); d]; d];
    for i in 1..d {
        mat[i][i - 1] = TPoly::one(s, fd);
    }
    for i in 0..d {
        mat[i][d - 1] = TPoly::constant(fd.neg(&a.coeff(i, fd)), s, fd);
    }
    mat
}

/// rho_alpha(a) = Res_theta(a, alpha) with the normalization
/// beta^{deg a} a(x_1)...a(x_r) for alpha = beta (x_1-theta)...(x_r-theta).
///
/// For monic a this equals det(alpha(C_a)); k-linearity in a handles the rest.
/// For alpha = (t_1-theta)...(t_s-theta) this yields a(t_1)...a(t_s).
pub fn resultant_theta(a: &FPoly, alpha: &APoly, fd: &FieldDesc) -> Result<TPoly> {
    if alpha.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let s = alpha.s;
    if a.is_zero() {
        return Ok(TPoly::zero(s));
    }
    let lead = a.leading().unwrap().clone();
    let monic = if lead == fd.one() { a.clone() } else { a.mul_scalar(&fd.inv(&lead), fd) };
    let d = monic.degree().unwrap();
    let r = alpha.deg_theta().unwrap();
    let base = if d == 0 {
        // empty product over the roots of a; beta^0 ... = 1 convention:
        // rho(a) for constant a = a^{r} by multiplicativity of resultants
        TPoly::one(s, fd)
    } else {
        let comp = companion_matrix(&monic, s, fd);
        // alpha evaluated at the companion matrix: powers of C_a are scalar
        // matrices over F_q, combined with the TPoly coefficients of alpha
        let mut pow: Vec<Vec<FFElem>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { fd.one() } else { fd.zero() }).collect())
            .collect();
        let comp_scalar: Vec<Vec<FFElem>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| comp[i][j].as_constant().cloned().unwrap_or_else(|| fd.zero()))
                    .collect()
            })
            .collect();
        let mut acc = vec![vec![TPoly::zero(s); d]; d];
        for j in 0..=r {
            let cj = alpha.coeff(j);
            if !cj.is_zero() {
                for row in 0..d {
                    for col in 0..d {
                        if !fd.is_zero(&pow[row][col]) {
                            let term = cj.mul_elem(&pow[row][col], fd);
                            acc[row][col] = acc[row][col].add(&term, fd);
                        }
                    }
                }
            }
            if j < r {
                // pow = pow * comp (scalar matrix product)
                let mut nxt = vec![vec![fd.zero(); d]; d];
                for row in 0..d {
                    for mid in 0..d {
                        if fd.is_zero(&pow[row][mid]) {
                            continue;
                        }
                        for col in 0..d {
                            let prod = fd.mul(&pow[row][mid], &comp_scalar[mid][col]);
                            nxt[row][col] = fd.add(&nxt[row][col], &prod);
                        }
                    }
                }
                pow = nxt;
            }
        }
        det_tpoly(&acc, s, fd)
    };
    if lead == fd.one() {
        Ok(base)
    } else {
        // rho(c * monic) = rho(c) rho(monic) with rho(c) = c^r for constants
        let cr = fd.pow_u64(&lead, r as u64);
        Ok(base.mul_elem(&cr, fd))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;
    use crate::poly::FPoly;
    use std::sync::Arc;

    fn f3() -> Arc<FieldDesc> {
        FieldDesc::base(3, 1).unwrap()
    }

    /// alpha = (t_1 - theta)...(t_s - theta)
    fn alpha_cs(s: usize, fd: &FieldDesc) -> APoly {
        let mut alpha = APoly::one(s, fd);
        for i in 0..s {
            let ti = TPoly::var(i, s, fd).unwrap();
            let factor =
                APoly::from_vec(vec![ti, TPoly::from_int(-1, s, fd)], s);
            alpha = alpha.mul(&factor, fd);
        }
        alpha
    }

    #[test]
    fn rho_for_cs_is_value_product() {
        let fd = f3();
        let alpha = alpha_cs(2, &fd);
        // b = theta: rho = t1 t2
        let rho = resultant_theta(&FPoly::theta(&fd), &alpha, &fd).unwrap();
        let t1 = TPoly::var(0, 2, &fd).unwrap();
        let t2 = TPoly::var(1, 2, &fd).unwrap();
        assert_eq!(rho, t1.mul(&t2, &fd));
        // b = 1: rho = 1
        let rho1 = resultant_theta(&FPoly::one(&fd), &alpha, &fd).unwrap();
        assert!(rho1.is_one(&fd));
    }

    #[test]
    fn rho_single_linear_factor_is_evaluation() {
        let fd = f3();
        // alpha = t1 - theta; b = theta^2 + 1 -> t1^2 + 1
        let t1 = TPoly::var(0, 1, &fd).unwrap();
        let alpha = APoly::from_vec(vec![t1.clone(), TPoly::from_int(-1, 1, &fd)], 1);
        let b = FPoly::from_ints(&[1, 0, 1], &fd);
        let rho = resultant_theta(&b, &alpha, &fd).unwrap();
        let expect = t1.mul(&t1, &fd).add(&TPoly::one(1, &fd), &fd);
        assert_eq!(rho, expect);
    }

    #[test]
    fn rho_multiplicative_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &q in &[2u64, 3] {
            let fd = FieldDesc::base(q, 1).unwrap();
            let alpha = alpha_cs(2, &fd);
            for _ in 0..25 {
                let da = rng.gen_range(0..=4);
                let db = rng.gen_range(0..=4);
                let mk = |rng: &mut rand_chacha::ChaCha8Rng, d: usize| {
                    let mut cs: Vec<i64> = (0..d).map(|_| rng.gen_range(0..q as i64)).collect();
                    cs.push(1);
                    FPoly::from_ints(&cs, &fd)
                };
                let a = mk(&mut rng, da);
                let b = mk(&mut rng, db);
                let lhs = resultant_theta(&a.mul(&b, &fd), &alpha, &fd).unwrap();
                let rhs = resultant_theta(&a, &alpha, &fd)
                    .unwrap()
                    .mul(&resultant_theta(&b, &alpha, &fd).unwrap(), &fd);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn rho_vanishes_iff_prime_divides_alpha() {
        let fd = f3();
        // alpha = theta^2 + 1 (an A-valued parameter, s = 0)
        let alpha = APoly::from_fpoly(&FPoly::from_ints(&[1, 0, 1], &fd), 0, &fd);
        for d in 1..=3 {
            for p in crate::poly::enumerate_primes(&fd, d) {
                let rho = resultant_theta(&p, &alpha, &fd).unwrap();
                let divides = alpha
                    .to_fpoly(&fd)
                    .unwrap()
                    .divrem(&p, &fd)
                    .1
                    .is_zero();
                assert_eq!(rho.is_zero(), divides, "prime {:?}", p);
            }
        }
    }

    #[test]
    fn charpoly_examples() {
        let fd = f3();
        // 1x1 [t1] -> theta - t1
        let t1 = TPoly::var(0, 1, &fd).unwrap();
        let cp = charpoly_fraction_free(&[vec![t1.clone()]], 1, &fd);
        assert_eq!(cp.coeff(1), TPoly::one(1, &fd));
        assert_eq!(cp.coeff(0), t1.neg(&fd));
        // 2x2 zero matrix -> theta^2
        let z = TPoly::zero(0);
        let cp = charpoly_fraction_free(
            &[vec![z.clone(), z.clone()], vec![z.clone(), z.clone()]],
            0,
            &fd,
        );
        assert_eq!(cp.deg_theta(), Some(2));
        assert!(cp.coeff(0).is_zero() && cp.coeff(1).is_zero());
        // companion matrix of theta^2 + 1 -> theta^2 + 1
        let p = FPoly::from_ints(&[1, 0, 1], &fd);
        let comp = companion_matrix(&p, 0, &fd);
        let cp = charpoly_fraction_free(&comp, 0, &fd);
        assert_eq!(cp, APoly::from_fpoly(&p, 0, &fd));
    }
}
