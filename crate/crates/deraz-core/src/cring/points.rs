//! Points of affine varieties with values in the base field or in a finite
//! extension F_{p^k} = F_p[t]/(m), plus the F_{p^k} arithmetic needed to
//! evaluate polynomials and matrices there.
//!
//! Extension values are coefficient vectors in the basis 1, t, …, t^{k−1};
//! matrix evaluation over an extension goes through k×k multiplication
//! blocks over F_p (restriction of scalars), so downstream rank machinery
//! never needs to know about extensions: ranks over F_{p^k} are the F_p
//! block ranks divided by k.

use super::poly::{Poly, PolyRing};
use crate::scalars::{Field, FieldElement, Matrix};
use crate::{Error, Result};

/// Trial division; fine for the supported modulus range (p < 2³¹).
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// F_{p^k} = F_p[t]/(t^k + c_{k−1}t^{k−1} + … + c₀); `min_poly` stores
/// c₀..c_{k−1} and is verified irreducible at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtFieldDef {
    pub p: u64,
    pub min_poly: Vec<u64>,
}

/// An element of F_{p^k}: coefficients of 1, t, …, t^{k−1}, reduced mod p.
pub type ExtElem = Vec<u64>;

// ---- dense F_p[t] helpers (coefficient vectors, lowest degree first) ----

fn fp_add(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn fp_sub(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

fn fp_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn fp_inv(a: u64, p: u64) -> u64 {
    // extended Euclid; a nonzero mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible");
    (t.rem_euclid(p as i128)) as u64
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = fp_add(out[i + j], fp_mul(x, y, p), p);
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a modulo the monic polynomial m (full coefficient list).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1; // m monic, degree dm
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = i + shift;
                r[idx] = fp_sub(r[idx], fp_mul(lead, mc, p), p);
            }
        }
        poly_trim(&mut r);
        if r.len() == dm + shift + 1 {
            // leading term failed to cancel (cannot happen for monic m)
            unreachable!("monic reduction must cancel the leading term");
        }
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        // make y monic for the remainder step
        let inv = fp_inv(*y.last().unwrap(), p);
        let ym: Vec<u64> = y.iter().map(|&c| fp_mul(c, inv, p)).collect();
        let r = poly_rem(&x, &ym, p);
        x = y;
        y = r;
    }
    x
}

impl ExtFieldDef {
    /// Build F_{p^k} from the lower coefficients of a monic minimal
    /// polynomial; rejects composite p, degree 0 and reducible m.
    pub fn new(p: u64, min_poly: Vec<u64>) -> Result<ExtFieldDef> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::InvalidInput(format!(
                "extension field characteristic must be a prime < 2^31, got {p}"
            )));
        }
        if min_poly.is_empty() {
            return Err(Error::InvalidInput("minimal polynomial must have degree ≥ 1".into()));
        }
        let def = ExtFieldDef { p, min_poly: min_poly.iter().map(|c| c % p).collect() };
        if !def.is_irreducible() {
            return Err(Error::InvalidInput(
                "minimal polynomial is reducible over F_p".into(),
            ));
        }
        Ok(def)
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len()
    }

    /// Full coefficient list c₀..c_{k−1},1 of the monic minimal polynomial.
    fn modulus(&self) -> Vec<u64> {
        let mut m = self.min_poly.clone();
        m.push(1);
        m
    }

    /// Rabin's criterion: m of degree k is irreducible over F_p iff
    /// t^{p^k} ≡ t (mod m) and gcd(t^{p^{k/q}} − t, m) = 1 for every
    /// prime q | k.
    fn is_irreducible(&self) -> bool {
        let k = self.degree();
        let p = self.p;
        let m = self.modulus();
        if k == 1 {
            return true;
        }
        // t^{p^j} mod m for j = 1..k by iterated Frobenius
        let t = vec![0, 1];
        let mut frob: Vec<Vec<u64>> = Vec::with_capacity(k + 1);
        frob.push(t.clone()); // j = 0
        for _ in 1..=k {
            let prev = frob.last().unwrap();
            frob.push(poly_powmod(prev, p, &m, p));
        }
        // t^{p^k} = t ?
        let mut diff_k = sub_polys(&frob[k], &t, p);
        poly_trim(&mut diff_k);
        if !diff_k.is_empty() {
            return false;
        }
        let mut q = 2;
        let mut rest = k;
        let mut prime_divisors = Vec::new();
        while q * q <= rest {
            if rest % q == 0 {
                prime_divisors.push(q);
                while rest % q == 0 {
                    rest /= q;
                }
            }
            q += 1;
        }
        if rest > 1 {
            prime_divisors.push(rest);
        }
        for q in prime_divisors {
            let j = k / q;
            let diff = sub_polys(&frob[j], &t, p);
            let g = poly_gcd(&m, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// Deterministic search for an irreducible monic polynomial of degree k:
    /// lower coefficients enumerated as base-p digits of a counter.
    pub fn find(p: u64, k: usize) -> Result<ExtFieldDef> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::InvalidInput(format!(
                "extension field characteristic must be a prime < 2^31, got {p}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be ≥ 1".into()));
        }
        let mut counter: u128 = 1; // skip t^k (c₀ = 0 is reducible for k ≥ 1)
        loop {
            let mut digits = Vec::with_capacity(k);
            let mut n = counter;
            for _ in 0..k {
                digits.push((n % p as u128) as u64);
                n /= p as u128;
            }
            if n > 0 {
                return Err(Error::InvalidInput(format!(
                    "no irreducible polynomial found for p={p}, k={k} (search space exhausted)"
                )));
            }
            let cand = ExtFieldDef { p, min_poly: digits };
            if cand.is_irreducible() {
                return Ok(cand);
            }
            counter += 1;
        }
    }

    pub fn zero(&self) -> ExtElem {
        vec![0; self.degree()]
    }

    pub fn one(&self) -> ExtElem {
        self.from_base(1)
    }

    pub fn from_base(&self, c: u64) -> ExtElem {
        let mut v = vec![0; self.degree()];
        v[0] = c % self.p;
        v
    }

    pub fn is_zero_elem(&self, a: &ExtElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(&x, &y)| fp_add(x, y, self.p)).collect()
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter().zip(b).map(|(&x, &y)| fp_sub(x, y, self.p)).collect()
    }

    pub fn neg(&self, a: &ExtElem) -> ExtElem {
        a.iter().map(|&x| fp_sub(0, x, self.p)).collect()
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let prod = poly_mul(a, b, self.p);
        let mut r = poly_rem(&prod, &self.modulus(), self.p);
        r.resize(self.degree(), 0);
        r
    }

    pub fn scalar_mul(&self, c: u64, a: &ExtElem) -> ExtElem {
        a.iter().map(|&x| fp_mul(c, x, self.p)).collect()
    }

    pub fn pow(&self, a: &ExtElem, mut n: u64) -> ExtElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Inverse via extended Euclid in F_p[t]; `None` for zero.
    pub fn inv(&self, a: &ExtElem) -> Option<ExtElem> {
        if self.is_zero_elem(a) {
            return None;
        }
        let p = self.p;
        let m = self.modulus();
        let (mut r0, mut r1): (Vec<u64>, Vec<u64>) = (m.clone(), a.clone());
        poly_trim(&mut r1);
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            // divide r0 by r1: quotient q, remainder r
            let (q, r) = poly_divmod(&r0, &r1, p);
            let qs1 = poly_mul(&q, &s1, p);
            let new_s = sub_polys(&s0, &qs1, p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = new_s;
        }
        // r0 = gcd (nonzero constant since m irreducible, a ≠ 0)
        debug_assert_eq!(r0.len(), 1);
        let c_inv = fp_inv(r0[0], p);
        let mut out: Vec<u64> = s0.iter().map(|&c| fp_mul(c, c_inv, p)).collect();
        out.resize(self.degree(), 0);
        Some(out)
    }

    /// The k×k multiplication-by-a matrix over F_p in the basis 1..t^{k−1};
    /// restriction of scalars for block-matrix evaluation.
    pub fn companion_block(&self, a: &ExtElem) -> Matrix {
        let k = self.degree();
        let fld = Field::Fp(self.p);
        Matrix::from_fn(fld, k, k, |i, j| {
            // column j = coefficients of a · t^j
            let mut tj = vec![0u64; j + 1];
            tj[j] = 1;
            let col = {
                let prod = poly_mul(a, &tj, self.p);
                let mut r = poly_rem(&prod, &self.modulus(), self.p);
                r.resize(k, 0);
                r
            };
            fld.from_i64(col[i] as i64)
        })
    }

    pub fn fmt_elem(&self, a: &ExtElem) -> String {
        let mut parts = Vec::new();
        for (i, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let s = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn sub_polys(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = fp_sub(x, y, p);
    }
    poly_trim(&mut out);
    out
}

/// Standard long division in F_p[t]; b nonzero.
fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut bb = b.to_vec();
    poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead_inv = fp_inv(*bb.last().unwrap(), p);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = fp_mul(*r.last().unwrap(), lead_inv, p);
        q[shift] = c;
        for (i, &bc) in bb.iter().enumerate() {
            r[i + shift] = fp_sub(r[i + shift], fp_mul(c, bc, p), p);
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    poly_trim(&mut q);
    (q, r)
}

/// a^n mod m in F_p[t] by square-and-multiply.
fn poly_powmod(a: &[u64], mut n: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = poly_rem(a, m, p);
    let mut acc = vec![1u64];
    while n > 0 {
        if n & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &base, p), m, p);
        }
        base = poly_rem(&poly_mul(&base, &base, p), m, p);
        n >>= 1;
    }
    acc
}

/// A point of Spec A with coordinates in the base field or in a finite
/// extension F_{p^k}. Relation-vanishing is checked when a point is bound
/// to a concrete algebra (see `PolyAlgebra::validate_point`).
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Base { field: Field, coords: Vec<FieldElement> },
    Ext { def: ExtFieldDef, coords: Vec<ExtElem> },
}

impl PointSpec {
    pub fn nvars(&self) -> usize {
        match self {
            PointSpec::Base { coords, .. } => coords.len(),
            PointSpec::Ext { coords, .. } => coords.len(),
        }
    }

    /// The characteristic-and-degree description used in reports.
    pub fn field_label(&self) -> String {
        match self {
            PointSpec::Base { field, .. } => format!("{field}"),
            PointSpec::Ext { def, coords: _ } => format!("F_{}^{}", def.p, def.degree()),
        }
    }

    pub fn coords_label(&self) -> String {
        match self {
            PointSpec::Base { coords, .. } => {
                let parts: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
                format!("({})", parts.join(", "))
            }
            PointSpec::Ext { def, coords } => {
                let parts: Vec<String> = coords.iter().map(|c| def.fmt_elem(c)).collect();
                format!("({})", parts.join(", "))
            }
        }
    }

    /// Characteristic of the residue field (0 for ℚ).
    pub fn characteristic(&self) -> u64 {
        match self {
            PointSpec::Base { field, .. } => field.characteristic(),
            PointSpec::Ext { def, .. } => def.p,
        }
    }
}

/// Evaluate a polynomial at base-field coordinates.
pub fn eval_poly_base(ring: &PolyRing, f: &Poly, coords: &[FieldElement]) -> Result<FieldElement> {
    if coords.len() != ring.nvars() {
        return Err(Error::PointMismatch(format!(
            "expected {} coordinates, got {}",
            ring.nvars(),
            coords.len()
        )));
    }
    for c in coords {
        if c.field() != ring.field {
            return Err(Error::PointMismatch(format!(
                "coordinate field {} does not match ring field {}",
                c.field(),
                ring.field
            )));
        }
    }
    let mut acc = ring.field.zero();
    for (m, c) in &f.terms {
        let mut term = c.clone();
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&coords[i]);
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Evaluate a polynomial over F_p at F_{p^k}-coordinates.
pub fn eval_poly_ext(
    ring: &PolyRing,
    f: &Poly,
    def: &ExtFieldDef,
    coords: &[ExtElem],
) -> Result<ExtElem> {
    if ring.field != Field::Fp(def.p) {
        return Err(Error::PointMismatch(format!(
            "extension of characteristic {} over ring of field {}",
            def.p, ring.field
        )));
    }
    if coords.len() != ring.nvars() {
        return Err(Error::PointMismatch(format!(
            "expected {} coordinates, got {}",
            ring.nvars(),
            coords.len()
        )));
    }
    let mut acc = def.zero();
    for (m, c) in &f.terms {
        let c_u64 = match c {
            FieldElement::Fp { v, .. } => *v,
            _ => unreachable!("field checked above"),
        };
        let mut term = def.from_base(c_u64);
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = def.mul(&term, &def.pow(&coords[i], e as u64));
            }
        }
        acc = def.add(&acc, &term);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cring::poly::MonomialOrder;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(5) && is_prime(2147483647));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(91));
    }

    #[test]
    fn f4_field_table() {
        // F₄ = F₂[t]/(t² + t + 1)
        let f4 = ExtFieldDef::new(2, vec![1, 1]).unwrap();
        let t = vec![0, 1];
        let t2 = f4.mul(&t, &t); // t² = t + 1
        assert_eq!(t2, vec![1, 1]);
        let t3 = f4.mul(&t2, &t); // t³ = 1
        assert_eq!(t3, vec![1, 0]);
        // every nonzero element has an inverse with a·a⁻¹ = 1
        for a in [vec![1, 0], vec![0, 1], vec![1, 1]] {
            let inv = f4.inv(&a).unwrap();
            assert_eq!(f4.mul(&a, &inv), f4.one());
        }
        assert!(f4.inv(&f4.zero()).is_none());
    }

    #[test]
    fn reducible_rejected() {
        // t² − 1 = (t−1)(t+1) over F₅
        assert!(ExtFieldDef::new(5, vec![4, 0]).is_err());
        // t² + 1 is irreducible over F₃ (−1 not a square mod 3)
        assert!(ExtFieldDef::new(3, vec![1, 0]).is_ok());
    }

    #[test]
    fn find_irreducible_various() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 2), (5, 3), (7, 4), (101, 2)] {
            let def = ExtFieldDef::find(p, k).unwrap();
            assert_eq!(def.degree(), k);
            assert!(def.is_irreducible());
            // multiplicative order sanity: random-ish element to the p^k−1 is 1
            let a = {
                let mut v = def.zero();
                v[0] = 1 % p;
                if k > 1 {
                    v[k - 1] = 1;
                }
                v
            };
            let order = (p as u64).pow(k as u32) - 1;
            assert_eq!(def.pow(&a, order), def.one());
        }
    }

    #[test]
    fn companion_blocks_multiply() {
        let f9 = ExtFieldDef::new(3, vec![1, 0]).unwrap(); // F₉ = F₃[t]/(t²+1)
        let a = vec![1, 2]; // 1 + 2t
        let b = vec![2, 1]; // 2 + t
        let ab = f9.mul(&a, &b);
        let ma = f9.companion_block(&a);
        let mb = f9.companion_block(&b);
        let mab = f9.companion_block(&ab);
        assert_eq!(ma.mul(&mb).unwrap(), mab);
        // block of 1 is the identity
        assert_eq!(f9.companion_block(&f9.one()), Matrix::identity(Field::Fp(3), 2));
    }

    #[test]
    fn polynomial_evaluation() {
        let r = PolyRing::new(
            Field::Fp(5),
            vec!["x".into(), "y".into()],
            MonomialOrder::DegRevLex,
        );
        let f = r.sub(&r.mul(&r.var(0), &r.var(0)), &r.var(1)); // x² − y
        let f5 = Field::Fp(5);
        let v = eval_poly_base(&r, &f, &[f5.from_i64(3), f5.from_i64(4)]).unwrap();
        assert_eq!(v, f5.from_i64(0)); // 9 − 4 = 5 ≡ 0
        // same check in F₂₅ at a base-field point
        let f25 = ExtFieldDef::find(5, 2).unwrap();
        let w = eval_poly_ext(&r, &f, &f25, &[f25.from_base(3), f25.from_base(4)]).unwrap();
        assert!(f25.is_zero_elem(&w));
        // genuinely extension-valued point: x = t with t² = −c₀ − c₁t
        let t = vec![0, 1];
        let t_sq = f25.mul(&t, &t);
        let w2 = eval_poly_ext(&r, &f, &f25, &[t.clone(), t_sq.clone()]).unwrap();
        assert!(f25.is_zero_elem(&w2));
        // wrong coordinate count
        assert!(eval_poly_base(&r, &f, &[f5.from_i64(1)]).is_err());
    }

    #[test]
    fn point_labels() {
        let f5 = Field::Fp(5);
        let pt = PointSpec::Base { field: f5, coords: vec![f5.from_i64(2), f5.from_i64(0)] };
        assert_eq!(pt.coords_label(), "(2, 0)");
        assert_eq!(pt.characteristic(), 5);
        let f4 = ExtFieldDef::new(2, vec![1, 1]).unwrap();
        let pe = PointSpec::Ext { def: f4.clone(), coords: vec![vec![1, 1]] };
        assert_eq!(pe.field_label(), "F_2^2");
        assert_eq!(pe.coords_label(), "(1 + t)");
    }
}
