//! Finite fields F_q (q = p^e) and their extensions F_{q^m}, with all
//! parameters chosen at runtime.
//!
//! The base field F_q is realized as F_p[y]/(g) for the canonical
//! (coordinate-lexicographically least) monic irreducible g of degree e, and
//! its elements are opaque scalar indices with precomputed add/mul tables.
//! The extension F_{q^m} is F_q[x]/(h) for the canonical monic irreducible h
//! of degree m; its elements are coordinate vectors over F_q.
//!
//! Canonical choices (moduli and roots) make every construction reproducible;
//! asymmetric quantities downstream carry these choices explicitly.

use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::sync::Arc;

/// Largest supported base-field size; the q x q arithmetic tables stay small.
pub const MAX_Q: u64 = 512;

/// Index of an element of F_q in `0..q`.
pub type Scalar = u16;

/// An element of F_{q^m}: coordinates over F_q, length m (constant term first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFElem {
    pub coords: SmallVec<[Scalar; 2]>,
}

impl FFElem {
    pub fn from_coords(coords: Vec<Scalar>) -> Self {
        FFElem { coords: coords.into() }
    }
}

/// Descriptor of F_{q^m} over F_q = F_p[y]/(g), with arithmetic tables.
#[derive(Debug)]
pub struct FieldDesc {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    pub m: u32,
    /// Monic irreducible of degree e over F_p defining F_q (constant first).
    pub fq_modulus: Vec<u64>,
    /// Monic irreducible of degree m over F_q defining F_{q^m} (constant first).
    pub modulus: Vec<Scalar>,
    add_t: Vec<Scalar>,
    mul_t: Vec<Scalar>,
    neg_t: Vec<Scalar>,
    inv_t: Vec<Scalar>,
    /// Lex key of each scalar: digits (d_0, d_1, ...) packed most-significant-first.
    lex_key: Vec<u32>,
    /// Scalars sorted by lex key (iteration order for canonical searches).
    lex_order: Vec<Scalar>,
    /// x^{m+j} mod modulus, j in 0..m-1, as coordinate rows.
    red_rows: Vec<Vec<Scalar>>,
    /// Images (x^i)^q for i in 0..m (Frobenius on the extension basis).
    frob_rows: Vec<FFElem>,
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- bootstrap arithmetic over F_p (digit vectors), used to build F_q ----

fn pp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pp_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce by the monic modulus
    let d = modulus.len() - 1;
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..d {
            let sub = (c * modulus[j]) % p;
            prod[i - d + j] = (prod[i - d + j] + p * p - sub) % p;
        }
    }
    prod.truncate(d);
    pp_trim(&mut prod);
    prod
}

fn pp_powmod(a: &[u64], mut n: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    while n > 0 {
        if n & 1 == 1 {
            acc = pp_mulmod(&acc, &base, modulus, p);
        }
        base = pp_mulmod(&base, &base, modulus, p);
        n >>= 1;
    }
    acc
}

fn pp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    pp_trim(&mut a);
    pp_trim(&mut b);
    while !b.is_empty() {
        // a mod b, with b made monic on the fly
        let lead = *b.last().unwrap();
        let lead_inv = pp_inv_scalar(lead, p);
        while a.len() >= b.len() && !a.is_empty() {
            let c = (*a.last().unwrap() * lead_inv) % p;
            let shift = a.len() - b.len();
            for (j, &bj) in b.iter().enumerate() {
                let sub = (c * bj) % p;
                a[shift + j] = (a[shift + j] + p * p - sub) % p;
            }
            pp_trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn pp_inv_scalar(a: u64, p: u64) -> u64 {
    // Fermat; p is small
    let mut acc = 1u64;
    let mut base = a % p;
    let mut n = p - 2;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        n >>= 1;
    }
    acc
}

/// Irreducibility of a monic polynomial over F_p by the x^{p^i} - x criterion.
fn pp_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    // x^{p^d} == x mod f
    let mut xp = x.clone();
    for _ in 0..d {
        xp = pp_powmod(&xp, p, f, p);
    }
    let mut diff = xp.clone();
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    pp_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // gcd(x^{p^{d/l}} - x, f) == 1 for prime divisors l of d
    let mut l = 2usize;
    let mut dd = d;
    let mut prime_divs = Vec::new();
    while l * l <= dd {
        if dd % l == 0 {
            prime_divs.push(l);
            while dd % l == 0 {
                dd /= l;
            }
        }
        l += 1;
    }
    if dd > 1 {
        prime_divs.push(dd);
    }
    for l in prime_divs {
        let k = d / l;
        let mut xq = x.clone();
        for _ in 0..k {
            xq = pp_powmod(&xq, p, f, p);
        }
        let mut diff = xq;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        pp_trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        let g = pp_gcd(&diff, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Canonical monic irreducible of degree d over F_p: least coefficient vector
/// (c_0, ..., c_{d-1}) in lexicographic order, c_0 compared first.
fn pp_canonical_irreducible(d: u32, p: u64) -> Vec<u64> {
    if d == 1 {
        return vec![0, 1]; // y
    }
    let d = d as usize;
    let total = (p as u128).pow(d as u32);
    let mut idx = 0u128;
    while idx < total {
        // decode idx most-significant-first into (c_0, ..., c_{d-1})
        let mut coeffs = vec![0u64; d + 1];
        coeffs[d] = 1;
        let mut rem = idx;
        for i in (0..d).rev() {
            // c_0 is the most significant digit of idx
            let place = (p as u128).pow(i as u32);
            let digit = (rem / place) as u64;
            rem %= place;
            coeffs[d - 1 - i] = digit;
        }
        if pp_irreducible(&coeffs, p) {
            return coeffs;
        }
        idx += 1;
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

impl FieldDesc {
    /// The base field F_q itself (m = 1).
    pub fn base(p: u64, e: u32) -> Result<Arc<FieldDesc>> {
        FieldDesc::new(p, e, 1)
    }

    /// F_q from q = p^e (p recovered by factoring q).
    pub fn base_from_q(q: u64) -> Result<Arc<FieldDesc>> {
        let (p, e) = split_prime_power(q)?;
        FieldDesc::base(p, e)
    }

    pub fn extension_from_q(q: u64, m: u32) -> Result<Arc<FieldDesc>> {
        let (p, e) = split_prime_power(q)?;
        FieldDesc::new(p, e, m)
    }

    /// F_{q^m} with canonical moduli at both levels.
    pub fn new(p: u64, e: u32, m: u32) -> Result<Arc<FieldDesc>> {
        if !is_prime_u64(p) {
            return Err(Error::NotAPrimeChar(p));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_Q).ok_or(Error::FieldTooLarge(MAX_Q))?;
        assert!(m >= 1);
        let fq_modulus = pp_canonical_irreducible(e, p);

        // scalar index <-> digit vector (little-endian in p)
        let digits = |i: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(e as usize);
            let mut i = i;
            for _ in 0..e {
                v.push(i % p);
                i /= p;
            }
            v
        };
        let undigits = |v: &[u64]| -> u64 {
            let mut acc = 0u64;
            for &d in v.iter().rev() {
                acc = acc * p + d;
            }
            acc
        };

        let qu = q as usize;
        let mut add_t = vec![0 as Scalar; qu * qu];
        let mut mul_t = vec![0 as Scalar; qu * qu];
        let mut neg_t = vec![0 as Scalar; qu];
        let mut inv_t = vec![0 as Scalar; qu];
        let mut lex_key = vec![0u32; qu];
        for a in 0..q {
            let da = digits(a);
            let mut key = 0u32;
            for &d in &da {
                key = key * (p as u32) + d as u32;
            }
            lex_key[a as usize] = key;
            let mut nn = vec![0u64; e as usize];
            for (i, &d) in da.iter().enumerate() {
                nn[i] = (p - d) % p;
            }
            neg_t[a as usize] = undigits(&nn) as Scalar;
            for b in 0..q {
                let db = digits(b);
                let mut s = vec![0u64; e as usize];
                for i in 0..e as usize {
                    s[i] = (da[i] + db[i]) % p;
                }
                add_t[(a * q + b) as usize] = undigits(&s) as Scalar;
                let mut prod = pp_mulmod(&da, &db, &fq_modulus, p);
                prod.resize(e as usize, 0);
                mul_t[(a * q + b) as usize] = undigits(&prod) as Scalar;
            }
        }
        for a in 1..q {
            // inverse by scanning the multiplication row (q is tiny)
            for b in 1..q {
                if mul_t[(a * q + b) as usize] == 1 {
                    inv_t[a as usize] = b as Scalar;
                    break;
                }
            }
        }
        let mut lex_order: Vec<Scalar> = (0..q as Scalar).collect();
        lex_order.sort_by_key(|&s| lex_key[s as usize]);

        let mut fd = FieldDesc {
            p,
            e,
            q,
            m,
            fq_modulus,
            modulus: Vec::new(),
            add_t,
            mul_t,
            neg_t,
            inv_t,
            lex_key,
            lex_order,
            red_rows: Vec::new(),
            frob_rows: Vec::new(),
        };

        // canonical modulus of degree m over F_q
        fd.modulus = fd.canonical_irreducible_fq(m);
        // reduction rows x^{m+j} mod modulus
        let m = m as usize;
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(m);
        // x^m = -(c_0 + c_1 x + ... + c_{m-1} x^{m-1})
        let mut cur: Vec<Scalar> = (0..m).map(|j| fd.s_neg(fd.modulus[j])).collect();
        rows.push(cur.clone());
        for _ in 1..m {
            // multiply by x
            let top = *cur.last().unwrap();
            let mut nxt = vec![0 as Scalar; m];
            for j in (1..m).rev() {
                nxt[j] = cur[j - 1];
            }
            for j in 0..m {
                nxt[j] = fd.s_add(nxt[j], fd.s_mul(top, rows[0][j]));
            }
            cur = nxt;
            rows.push(cur.clone());
        }
        fd.red_rows = rows;

        // Frobenius rows: (x^i)^q for i in 0..m
        let mut frob = Vec::with_capacity(m);
        for i in 0..m {
            let mut b = fd.zero();
            b.coords[i] = 1;
            frob.push(fd.pow_u64(&b, fd.q));
        }
        fd.frob_rows = frob;

        Ok(Arc::new(fd))
    }

    /// Monic irreducible of degree d over F_q, least coefficient vector
    /// (c_0, ..., c_{d-1}) under the scalar lex ordering, c_0 first.
    fn canonical_irreducible_fq(&self, d: u32) -> Vec<Scalar> {
        if d == 1 {
            return vec![0, 1]; // x
        }
        let d = d as usize;
        let total = (self.q as u128).pow(d as u32);
        let mut idx = 0u128;
        while idx < total {
            let mut coeffs = vec![0 as Scalar; d + 1];
            coeffs[d] = 1;
            let mut rem = idx;
            for i in (0..d).rev() {
                let place = (self.q as u128).pow(i as u32);
                let digit = (rem / place) as usize;
                rem %= place;
                coeffs[d - 1 - i] = self.lex_order[digit];
            }
            if self.fq_poly_irreducible(&coeffs) {
                return coeffs;
            }
            idx += 1;
        }
        unreachable!()
    }

    /// Irreducibility over F_q via the x^{q^i} criterion on scalar polys.
    fn fq_poly_irreducible(&self, f: &[Scalar]) -> bool {
        let d = f.len() - 1;
        let x = vec![0 as Scalar, 1];
        let powq = |a: &[Scalar]| -> Vec<Scalar> {
            let mut acc = vec![1 as Scalar];
            let mut base = a.to_vec();
            let mut n = self.q;
            while n > 0 {
                if n & 1 == 1 {
                    acc = self.sp_mulmod(&acc, &base, f);
                }
                base = self.sp_mulmod(&base, &base, f);
                n >>= 1;
            }
            acc
        };
        let mut xq = x.clone();
        for _ in 0..d {
            xq = powq(&xq);
        }
        let mut diff = xq;
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = self.s_add(diff[1], self.s_neg(1));
        sp_trim(&mut diff);
        if !diff.is_empty() {
            return false;
        }
        let mut prime_divs = Vec::new();
        let mut dd = d;
        let mut l = 2usize;
        while l * l <= dd {
            if dd % l == 0 {
                prime_divs.push(l);
                while dd % l == 0 {
                    dd /= l;
                }
            }
            l += 1;
        }
        if dd > 1 {
            prime_divs.push(dd);
        }
        for l in prime_divs {
            let mut xq = x.clone();
            for _ in 0..d / l {
                xq = powq(&xq);
            }
            let mut diff = xq;
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] = self.s_add(diff[1], self.s_neg(1));
            sp_trim(&mut diff);
            if diff.is_empty() {
                return false;
            }
            if self.sp_gcd(&diff, f).len() != 1 {
                return false;
            }
        }
        true
    }

    fn sp_mulmod(&self, a: &[Scalar], b: &[Scalar], f: &[Scalar]) -> Vec<Scalar> {
        let mut prod = vec![0 as Scalar; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = self.s_add(prod[i + j], self.s_mul(x, y));
            }
        }
        let d = f.len() - 1;
        for i in (d..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..d {
                prod[i - d + j] = self.s_add(prod[i - d + j], self.s_neg(self.s_mul(c, f[j])));
            }
        }
        prod.truncate(d);
        sp_trim(&mut prod);
        prod
    }

    fn sp_gcd(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        sp_trim(&mut a);
        sp_trim(&mut b);
        while !b.is_empty() {
            let lead_inv = self.s_inv(*b.last().unwrap());
            while a.len() >= b.len() && !a.is_empty() {
                let c = self.s_mul(*a.last().unwrap(), lead_inv);
                let shift = a.len() - b.len();
                for (j, &bj) in b.iter().enumerate() {
                    a[shift + j] = self.s_add(a[shift + j], self.s_neg(self.s_mul(c, bj)));
                }
                sp_trim(&mut a);
            }
            std::mem::swap(&mut a, &mut b);
        }
        a
    }

    // ---- scalar (F_q) operations ----

    #[inline]
    pub fn s_add(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add_t[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn s_mul(&self, a: Scalar, b: Scalar) -> Scalar {
        self.mul_t[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn s_neg(&self, a: Scalar) -> Scalar {
        self.neg_t[a as usize]
    }
    #[inline]
    pub fn s_inv(&self, a: Scalar) -> Scalar {
        debug_assert!(a != 0);
        self.inv_t[a as usize]
    }
    /// Integer literal reduced into the prime subfield.
    pub fn s_from_int(&self, n: i64) -> Scalar {
        let r = n.rem_euclid(self.p as i64) as u64;
        r as Scalar
    }
    pub fn scalar_lex_key(&self, a: Scalar) -> u32 {
        self.lex_key[a as usize]
    }
    /// All scalars in canonical (coordinate-lex) order.
    pub fn scalars_lex(&self) -> &[Scalar] {
        &self.lex_order
    }

    // ---- F_{q^m} element operations ----

    pub fn zero(&self) -> FFElem {
        FFElem { coords: smallvec::smallvec![0; self.m as usize] }
    }
    pub fn one(&self) -> FFElem {
        let mut x = self.zero();
        x.coords[0] = 1;
        x
    }
    pub fn from_scalar(&self, s: Scalar) -> FFElem {
        let mut x = self.zero();
        x.coords[0] = s;
        x
    }
    pub fn from_int(&self, n: i64) -> FFElem {
        self.from_scalar(self.s_from_int(n))
    }
    /// The canonical generator x of F_{q^m} = F_q[x]/(modulus); zero when m = 1
    /// (the degree-1 canonical modulus is x itself).
    pub fn gen(&self) -> FFElem {
        if self.m == 1 {
            return self.zero();
        }
        let mut x = self.zero();
        x.coords[1] = 1;
        x
    }
    pub fn is_zero(&self, a: &FFElem) -> bool {
        a.coords.iter().all(|&c| c == 0)
    }
    /// Nonzero only in the F_q component (used by unit criteria).
    pub fn is_scalar(&self, a: &FFElem) -> bool {
        a.coords.iter().skip(1).all(|&c| c == 0)
    }
    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let mut out = a.clone();
        for (o, &bc) in out.coords.iter_mut().zip(b.coords.iter()) {
            *o = self.s_add(*o, bc);
        }
        out
    }
    pub fn neg(&self, a: &FFElem) -> FFElem {
        let mut out = a.clone();
        for o in out.coords.iter_mut() {
            *o = self.s_neg(*o);
        }
        out
    }
    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.add(a, &self.neg(b))
    }
    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let m = self.m as usize;
        if m == 1 {
            return FFElem { coords: smallvec::smallvec![self.s_mul(a.coords[0], b.coords[0])] };
        }
        let mut prod = vec![0 as Scalar; 2 * m - 1];
        for i in 0..m {
            let x = a.coords[i];
            if x == 0 {
                continue;
            }
            for j in 0..m {
                prod[i + j] = self.s_add(prod[i + j], self.s_mul(x, b.coords[j]));
            }
        }
        let mut out = self.zero();
        for j in 0..m {
            out.coords[j] = prod[j];
        }
        for j in m..2 * m - 1 {
            let c = prod[j];
            if c == 0 {
                continue;
            }
            let row = &self.red_rows[j - m];
            for k in 0..m {
                out.coords[k] = self.s_add(out.coords[k], self.s_mul(c, row[k]));
            }
        }
        out
    }
    pub fn scalar_mul(&self, s: Scalar, a: &FFElem) -> FFElem {
        let mut out = a.clone();
        for o in out.coords.iter_mut() {
            *o = self.s_mul(s, *o);
        }
        out
    }
    pub fn pow_u64(&self, a: &FFElem, mut n: u64) -> FFElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
    /// Multiplicative inverse by extended Euclid over F_q[x].
    pub fn inv(&self, a: &FFElem) -> FFElem {
        assert!(!self.is_zero(a), "inverse of zero");
        if self.m == 1 {
            return FFElem { coords: smallvec::smallvec![self.s_inv(a.coords[0])] };
        }
        let mut r0: Vec<Scalar> = self.modulus.clone();
        let mut r1: Vec<Scalar> = a.coords.to_vec();
        sp_trim(&mut r1);
        let mut s0: Vec<Scalar> = vec![];
        let mut s1: Vec<Scalar> = vec![1];
        while !r1.is_empty() {
            // (quot, rem) = r0 / r1
            let mut rem = r0.clone();
            let mut quot = vec![0 as Scalar; rem.len().saturating_sub(r1.len()) + 1];
            let lead_inv = self.s_inv(*r1.last().unwrap());
            while rem.len() >= r1.len() && !rem.is_empty() {
                let c = self.s_mul(*rem.last().unwrap(), lead_inv);
                let shift = rem.len() - r1.len();
                quot[shift] = self.s_add(quot[shift], c);
                for (j, &bj) in r1.iter().enumerate() {
                    rem[shift + j] = self.s_add(rem[shift + j], self.s_neg(self.s_mul(c, bj)));
                }
                sp_trim(&mut rem);
            }
            // s_{k+1} = s_{k-1} - quot * s_k
            let mut qs = vec![0 as Scalar; quot.len() + s1.len()];
            for (i, &qi) in quot.iter().enumerate() {
                if qi == 0 {
                    continue;
                }
                for (j, &sj) in s1.iter().enumerate() {
                    qs[i + j] = self.s_add(qs[i + j], self.s_mul(qi, sj));
                }
            }
            let mut s2 = vec![0 as Scalar; s0.len().max(qs.len())];
            for (i, &c) in s0.iter().enumerate() {
                s2[i] = c;
            }
            for (i, &c) in qs.iter().enumerate() {
                s2[i] = self.s_add(s2[i], self.s_neg(c));
            }
            sp_trim(&mut s2);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 = gcd (a nonzero constant), inverse = s0 / r0
        debug_assert_eq!(r0.len(), 1);
        let c = self.s_inv(r0[0]);
        let mut out = self.zero();
        for (i, &si) in s0.iter().enumerate() {
            out.coords[i] = self.s_mul(c, si);
        }
        out
    }
    /// Frobenius x -> x^{q^n} via the precomputed basis images.
    pub fn frobenius(&self, a: &FFElem, n: u32) -> FFElem {
        if self.m == 1 {
            return a.clone();
        }
        let mut cur = a.clone();
        for _ in 0..(n % self.m) {
            let mut out = self.zero();
            for (i, &c) in cur.coords.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let row = &self.frob_rows[i];
                for k in 0..self.m as usize {
                    out.coords[k] = self.s_add(out.coords[k], self.s_mul(c, row.coords[k]));
                }
            }
            cur = out;
        }
        cur
    }

    /// Lexicographic key of an element (coordinate vector, c_0 compared first).
    pub fn elem_lex_key(&self, a: &FFElem) -> Vec<u32> {
        a.coords.iter().map(|&c| self.lex_key[c as usize]).collect()
    }

    /// All field elements in canonical lex order (desk-scale: q^m small).
    pub fn elements_lex(&self) -> Vec<FFElem> {
        let m = self.m as usize;
        let mut out = Vec::new();
        let total = (self.q as u128).pow(self.m);
        let mut idx = 0u128;
        while idx < total {
            let mut rem = idx;
            let mut coords = smallvec::smallvec![0 as Scalar; m];
            for i in (0..m).rev() {
                let place = (self.q as u128).pow(i as u32);
                let digit = (rem / place) as usize;
                rem %= place;
                coords[m - 1 - i] = self.lex_order[digit];
            }
            out.push(FFElem { coords });
            idx += 1;
        }
        out
    }

    /// Structural identity of field descriptors.
    pub fn same_field(&self, other: &FieldDesc) -> bool {
        self.p == other.p && self.e == other.e && self.m == other.m && self.modulus == other.modulus
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other)
    }
}
impl Eq for FieldDesc {}

fn sp_trim(v: &mut Vec<Scalar>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Split q into (p, e) with p prime; errors if q is not a prime power.
pub fn split_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotAPrimeChar(q));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0u32;
            let mut rest = q;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            if rest != 1 {
                return Err(Error::NotAPrimeChar(q));
            }
            return Ok((p, e));
        }
        p += 1;
    }
    Ok((q, 1))
}
