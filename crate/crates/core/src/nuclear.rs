//! Finite-level nuclear determinants: per-prime determinants of 1 + F on
//! R/PR, the determinant at infinity on the quotient K(t)_infty / R through a
//! finite nucleus, and the trace-formula identity mod Z^N.
//!
//! Here F = (1 - phi_theta Z)/(1 - theta Z) - 1 = sum_{n>=1} f_n Z^n with
//! f_n = -(alpha tau) theta^{n-1}.

use crate::apoly::{berkowitz_charpoly, APoly, RingCtx};
use crate::drinfeld::DrinfeldModule;
use crate::error::{Error, Result};
use crate::field::FieldDesc;
use crate::lseries::apoly_rem_monic;
use crate::poly::{enumerate_primes, is_irreducible, FPoly};
use crate::tpoly::TPoly;
use rayon::prelude::*;

/// Polynomial in Z truncated mod Z^{nz}, coefficients in k[t_1..t_s].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZPoly {
    pub s: usize,
    pub nz: usize,
    pub coeffs: Vec<TPoly>, // length nz
}

impl ZPoly {
    pub fn zero(s: usize, nz: usize) -> Self {
        ZPoly { s, nz, coeffs: vec![TPoly::zero(s); nz] }
    }
    pub fn one(s: usize, nz: usize, fd: &FieldDesc) -> Self {
        let mut z = Self::zero(s, nz);
        z.coeffs[0] = TPoly::one(s, fd);
        z
    }
    pub fn from_coeffs(mut coeffs: Vec<TPoly>, s: usize, nz: usize) -> Self {
        coeffs.resize(nz, TPoly::zero(s));
        coeffs.truncate(nz);
        ZPoly { s, nz, coeffs }
    }
    pub fn is_one(&self, fd: &FieldDesc) -> bool {
        self.coeffs[0].is_one(fd) && self.coeffs[1..].iter().all(|c| c.is_zero())
    }
    pub fn add(&self, other: &ZPoly, fd: &FieldDesc) -> ZPoly {
        debug_assert_eq!(self.nz, other.nz);
        ZPoly {
            s: self.s,
            nz: self.nz,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b, fd))
                .collect(),
        }
    }
    pub fn neg(&self, fd: &FieldDesc) -> ZPoly {
        ZPoly { s: self.s, nz: self.nz, coeffs: self.coeffs.iter().map(|c| c.neg(fd)).collect() }
    }
    pub fn mul(&self, other: &ZPoly, fd: &FieldDesc) -> ZPoly {
        let mut out = ZPoly::zero(self.s, self.nz);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= self.nz {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b, fd), fd);
            }
        }
        out
    }
    /// Inverse of a series with constant term 1.
    pub fn inv(&self, fd: &FieldDesc) -> ZPoly {
        assert!(self.coeffs[0].is_one(fd), "invert only 1-units in Z");
        let mut out = ZPoly::one(self.s, self.nz, fd);
        for n in 1..self.nz {
            let mut acc = TPoly::zero(self.s);
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[k].mul(&out.coeffs[n - k], fd), fd);
            }
            out.coeffs[n] = acc.neg(fd);
        }
        out
    }
    /// Substitute Z = theta^{-1}: a Tate element known mod theta^{-nz}
    /// (coefficients are norm <= 1 polynomials).
    pub fn eval_z_theta_inv(&self, field: &std::sync::Arc<FieldDesc>) -> crate::tate::TateElem {
        let mut out = crate::tate::TateElem::zero_to(field, self.s, 0, self.nz as i64);
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c is a t-polynomial: contributes at exponent n
            out.coeffs.insert(n as i64, c.clone());
        }
        out
    }
}

struct ZPolyRing<'a> {
    fd: &'a FieldDesc,
    s: usize,
    nz: usize,
}

impl<'a> RingCtx for ZPolyRing<'a> {
    type El = ZPoly;
    fn zero(&self) -> ZPoly {
        ZPoly::zero(self.s, self.nz)
    }
    fn one(&self) -> ZPoly {
        ZPoly::one(self.s, self.nz, self.fd)
    }
    fn add(&self, a: &ZPoly, b: &ZPoly) -> ZPoly {
        a.add(b, self.fd)
    }
    fn neg(&self, a: &ZPoly) -> ZPoly {
        a.neg(self.fd)
    }
    fn mul(&self, a: &ZPoly, b: &ZPoly) -> ZPoly {
        a.mul(b, self.fd)
    }
}

/// Division-free determinant of a matrix over k[t][Z]/Z^{nz}.
fn det_zpoly(mat: &[Vec<ZPoly>], s: usize, nz: usize, fd: &FieldDesc) -> ZPoly {
    let n = mat.len();
    if n == 0 {
        return ZPoly::one(s, nz, fd);
    }
    let ring = ZPolyRing { fd, s, nz };
    let cp = berkowitz_charpoly(&ring, mat);
    let c0 = cp.last().unwrap().clone();
    if n % 2 == 0 {
        c0
    } else {
        c0.neg(fd)
    }
}

/// The matrices of f_n = -(alpha tau) theta^{n-1} on R/PR for n = 1..nz-1,
/// then det(1 + sum M_n Z^n) mod Z^{nz}.
pub fn prime_det(phi: &DrinfeldModule, p: &FPoly, nz: usize) -> Result<ZPoly> {
    let fd = &*phi.field;
    if !is_irreducible(p, fd) {
        return Err(Error::NotPrime);
    }
    let d = p.degree().unwrap();
    let s = phi.s;
    // 1 + F entrywise
    let mut entries = vec![vec![ZPoly::zero(s, nz); d]; d];
    for (i, row) in entries.iter_mut().enumerate() {
        row[i].coeffs[0] = TPoly::one(s, fd);
    }
    for n in 1..nz {
        for j in 0..d {
            // f_n(theta^j) = -alpha * tau(theta^{n-1+j}) = -alpha theta^{q(n-1+j)} mod P
            let tw = FPoly::monomial(fd.one(), n - 1 + j, fd).powmod(fd.q as u128, p, fd);
            let col = apoly_rem_monic(
                &phi.alpha.mul(&APoly::from_fpoly(&tw, s, fd), fd).neg(fd),
                p,
                fd,
            );
            for (i, entry_row) in entries.iter_mut().enumerate() {
                let c = col.coeff(i);
                if !c.is_zero() {
                    entry_row[j].coeffs[n] = c;
                }
            }
        }
    }
    Ok(det_zpoly(&entries, s, nz, fd))
}

/// The provable nucleus floor: m^M is invariant and contracting for every
/// f_n = -(alpha tau) theta^{n-1}, n < nz, exactly when
/// (q-1) M >= r + q(n-1) + 1, on top of the u+2 and nz floors.
pub fn nucleus_floor(phi: &DrinfeldModule, nz: usize) -> i64 {
    let q = phi.field.q as i64;
    let r = phi.r as i64;
    let contraction = if nz >= 2 {
        (r + q * (nz as i64 - 2) + 1 + (q - 2)) / (q - 1)
    } else {
        1
    };
    (phi.u as i64 + 2).max(nz as i64).max(contraction)
}

/// Determinant of 1 + F on the quotient K(t)_infty / R, modeled on the
/// finite basis theta^{-1}, ..., theta^{-(M-1)} (the quotient by the nucleus
/// m^M); independent of M at or above the floor.
pub fn infinity_det(phi: &DrinfeldModule, nz: usize, m: usize) -> Result<ZPoly> {
    let fd = &*phi.field;
    let floor = nucleus_floor(phi, nz);
    if (m as i64) < floor {
        return Err(Error::QuotientTooShallow { m: m as i64, floor });
    }
    let s = phi.s;
    let dim = m - 1;
    let mut entries = vec![vec![ZPoly::zero(s, nz); dim]; dim];
    for (i, row) in entries.iter_mut().enumerate() {
        row[i].coeffs[0] = TPoly::one(s, fd);
    }
    let q = fd.q as i64;
    for n in 1..nz {
        for j in 1..=dim as i64 {
            // f_n(theta^{-j}) = -alpha * theta^{q(n-1-j)}
            let base_exp = q * (n as i64 - 1 - j);
            for (mm, c) in phi.alpha.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = base_exp + mm as i64; // theta^{e}
                // reduce mod R (drop e >= 0) and truncate below m^M
                if e >= 0 || e < -(dim as i64) {
                    continue;
                }
                let i = (-e) as usize; // target basis theta^{-i}
                let prev = entries[i - 1][(j - 1) as usize].coeffs[n].clone();
                entries[i - 1][(j - 1) as usize].coeffs[n] = prev.add(&c.neg(fd), fd);
            }
        }
    }
    Ok(det_zpoly(&entries, s, nz, fd))
}

#[derive(Clone, Debug)]
pub struct TraceFormulaReport {
    pub nz: usize,
    pub depth: usize,
    pub prime_side: ZPoly,
    pub infinity_inverse: ZPoly,
    pub product: ZPoly,
    pub holds: bool,
}

/// prod_{deg P < nz} det(1 + F|_{R/PR}) * det(1 + F|_{K(t)_infty/R}) = 1 mod
/// Z^{nz}: primes of degree >= nz contribute 1, so the product is finite.
pub fn trace_formula_check(phi: &DrinfeldModule, nz: usize) -> Result<TraceFormulaReport> {
    assert!(nz >= 1);
    let fd = &*phi.field;
    let mut prime_side = ZPoly::one(phi.s, nz, fd);
    for d in 1..nz {
        let primes = enumerate_primes(&phi.field, d);
        let dets: Vec<ZPoly> = primes
            .par_iter()
            .map(|p| prime_det(phi, p, nz))
            .collect::<Result<_>>()?;
        for det in dets {
            prime_side = prime_side.mul(&det, fd);
        }
    }
    let depth = nucleus_floor(phi, nz) as usize;
    let inf = infinity_det(phi, nz, depth)?;
    let product = prime_side.mul(&inf, fd);
    let holds = product.is_one(fd);
    Ok(TraceFormulaReport {
        nz,
        depth,
        prime_side,
        infinity_inverse: inf.inv(fd),
        product,
        holds,
    })
}

pub fn zpoly_to_strings(z: &ZPoly) -> Vec<String> {
    z.coeffs.iter().map(crate::grammar::tpoly_to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_apoly, parse_fpoly};
    use std::sync::Arc;

    fn module(q: u64, src: &str, s: usize) -> DrinfeldModule {
        let fd = FieldDesc::base(q, 1).unwrap();
        DrinfeldModule::new(&fd, parse_apoly(src, &fd, s).unwrap()).unwrap()
    }

    /// Test oracle: det(1+F|_{R/PR}) = rev(P - rho)(Z) / rev(P)(Z) where
    /// rev(f)(Z) = Z^d f(1/Z) for monic f of degree d, derived from the
    /// charpoly identity det(1 - AZ) = Z^d charpoly_A(1/Z).
    fn prime_det_oracle(phi: &DrinfeldModule, p: &FPoly, nz: usize) -> ZPoly {
        let fd = &*phi.field;
        let d = p.degree().unwrap();
        let rho = phi.rho(p);
        let rev = |f: &APoly| -> ZPoly {
            let mut coeffs = vec![TPoly::zero(phi.s); nz];
            for (j, c) in f.coeffs.iter().enumerate() {
                if d >= j && d - j < nz {
                    coeffs[d - j] = c.clone();
                }
            }
            ZPoly::from_coeffs(coeffs, phi.s, nz)
        };
        let num = rev(&APoly::from_fpoly(p, phi.s, fd).sub(&APoly::constant(rho), fd));
        let den = rev(&APoly::from_fpoly(p, phi.s, fd));
        num.mul(&den.inv(fd), fd)
    }

    #[test]
    fn prime_det_examples() {
        // s=0, alpha=1, P=theta: 1 - Z
        let phi = module(2, "1", 0);
        let fd = phi.field.clone();
        let det = prime_det(&phi, &FPoly::theta(&fd), 4).unwrap();
        let mut expect = ZPoly::one(0, 4, &fd);
        expect.coeffs[1] = TPoly::from_int(-1, 0, &fd);
        assert_eq!(det, expect);
        // at Z = theta^{-1}: (theta-1)/theta
        let at = det.eval_z_theta_inv(&fd);
        let ratio = crate::tate::TateElem::from_fpoly(
            &FPoly::from_ints(&[-1, 1], &fd),
            &fd,
            0,
        )
        .mul(&crate::tate::TateElem::theta_pow(&fd, 0, 1).inv().unwrap());
        assert!(at.agrees_with(&ratio, 4));
    }

    #[test]
    fn prime_det_matches_oracle() {
        for &q in &[2u64, 3] {
            for (src, s) in [("1", 0), ("t1", 1), ("t1-X", 1)] {
                let phi = module(q, src, s);
                let nz = 4;
                for d in 1..=3usize {
                    for p in enumerate_primes(&phi.field, d) {
                        let det = prime_det(&phi, &p, nz).unwrap();
                        let oracle = prime_det_oracle(&phi, &p, nz);
                        assert_eq!(det, oracle, "q={} src={} P={:?}", q, src, p);
                    }
                }
            }
        }
    }

    #[test]
    fn deep_primes_contribute_one() {
        let phi = module(2, "t1", 1);
        let fd = phi.field.clone();
        for p in enumerate_primes(&fd, 4) {
            let det = prime_det(&phi, &p, 4).unwrap();
            assert!(det.is_one(&fd), "P={:?}", p);
        }
    }

    #[test]
    fn infinity_det_trivial_and_shallow() {
        let phi = module(2, "1", 0);
        // nz = 1: everything is 1
        let d = infinity_det(&phi, 1, nucleus_floor(&phi, 1) as usize).unwrap();
        assert_eq!(d.coeffs.len(), 1);
        assert!(d.is_one(&phi.field));
        // below the floor: rejected
        let floor = nucleus_floor(&phi, 4);
        assert!(matches!(
            infinity_det(&phi, 4, (floor - 1) as usize),
            Err(Error::QuotientTooShallow { .. })
        ));
    }

    #[test]
    fn nucleus_independence() {
        for &q in &[2u64, 3] {
            for (src, s) in [("1", 0), ("t1", 1)] {
                let phi = module(q, src, s);
                let nz = 4;
                let floor = nucleus_floor(&phi, nz) as usize;
                let d0 = infinity_det(&phi, nz, floor).unwrap();
                let d1 = infinity_det(&phi, nz, floor + 1).unwrap();
                let d3 = infinity_det(&phi, nz, floor + 3).unwrap();
                assert_eq!(d0, d1, "q={} src={}", q, src);
                assert_eq!(d0, d3, "q={} src={}", q, src);
            }
        }
    }

    #[test]
    fn hand_computed_infinity_det_q2() {
        // q=2, alpha=1, nz=4: det = 1 + Z^2 + Z^3 (fixed points at
        // theta^{-2} for f_2 and theta^{-4} for f_3)
        let phi = module(2, "1", 0);
        let fd = phi.field.clone();
        let d = infinity_det(&phi, 4, nucleus_floor(&phi, 4) as usize).unwrap();
        let mut expect = ZPoly::one(0, 4, &fd);
        expect.coeffs[2] = TPoly::one(0, &fd);
        expect.coeffs[3] = TPoly::one(0, &fd);
        assert_eq!(d, expect);
    }

    #[test]
    fn trace_formula_small_grid() {
        for &q in &[2u64, 3] {
            for (src, s) in [("1", 0), ("t1", 1)] {
                let phi = module(q, src, s);
                for nz in [1usize, 3, 4] {
                    let report = trace_formula_check(&phi, nz).unwrap();
                    assert!(
                        report.holds,
                        "q={} src={} nz={} product={:?}",
                        q,
                        src,
                        nz,
                        zpoly_to_strings(&report.product)
                    );
                }
            }
        }
    }

    #[test]
    fn infinity_det_against_prime_product() {
        // s=0, alpha=1, nz=3: det_infty = (prod_{deg P < 3} det_P)^{-1}
        let phi = module(2, "1", 0);
        let fd: Arc<FieldDesc> = phi.field.clone();
        let nz = 3;
        let mut prod = ZPoly::one(0, nz, &fd);
        for d in 1..nz {
            for p in enumerate_primes(&fd, d) {
                prod = prod.mul(&prime_det(&phi, &p, nz).unwrap(), &fd);
            }
        }
        let inf = infinity_det(&phi, nz, nucleus_floor(&phi, nz) as usize).unwrap();
        assert_eq!(inf, prod.inv(&fd));
        let _ = parse_fpoly("X", &fd).unwrap();
    }
}
