//! Multivariate polynomials over an exact field, with lex / degrevlex
//! monomial orders and an optional ℤ-weighting of the variables (used by
//! the graded Čech machinery).
//!
//! A `Poly` stores its terms sorted strictly descending in the ring's
//! monomial order, so the leading term is `terms[0]` and all arithmetic
//! goes through the owning `PolyRing` for order context.

use crate::scalars::{Field, FieldElement};
use crate::{Error, Result};
use std::cmp::Ordering;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// other / self, assuming divisibility.
    pub fn quotient_into(&self, other: &Monomial) -> Monomial {
        Monomial(
            other
                .0
                .iter()
                .zip(self.0.iter())
                .map(|(b, a)| b - a)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    DegRevLex,
}

/// The free polynomial ring k[x₁..xₙ] with a fixed monomial order; the
/// "cover" of every finitely presented algebra in this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    pub field: Field,
    pub vars: Vec<String>,
    pub order: MonomialOrder,
    /// Optional ℤ-weights per variable; when present, graded pieces of
    /// quotient algebras are meaningful and relations must be homogeneous.
    pub weights: Option<Vec<i64>>,
}

impl PolyRing {
    pub fn new(field: Field, vars: Vec<String>, order: MonomialOrder) -> PolyRing {
        PolyRing { field, vars, order, weights: None }
    }

    pub fn with_weights(mut self, w: Vec<i64>) -> PolyRing {
        assert_eq!(w.len(), self.vars.len());
        self.weights = Some(w);
        self
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn cmp_mono(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.order {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::DegRevLex => {
                let (da, db) = (a.total_degree(), b.total_degree());
                if da != db {
                    return da.cmp(&db);
                }
                // equal degree: a > b iff the last nonzero entry of a−b is negative
                for i in (0..a.0.len()).rev() {
                    if a.0[i] != b.0[i] {
                        return b.0[i].cmp(&a.0[i]);
                    }
                }
                Ordering::Equal
            }
        }
    }

    pub fn weight_of_mono(&self, m: &Monomial) -> i64 {
        match &self.weights {
            None => 0,
            Some(w) => m.0.iter().zip(w).map(|(&e, &wi)| e as i64 * wi).sum(),
        }
    }

    pub fn zero(&self) -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: FieldElement) -> Poly {
        if c.is_zero() {
            self.zero()
        } else {
            Poly { terms: vec![(Monomial::one(self.nvars()), c)] }
        }
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly { terms: vec![(Monomial::var(self.nvars(), i), self.field.one())] }
    }

    pub fn monomial(&self, m: Monomial, c: FieldElement) -> Poly {
        if c.is_zero() {
            self.zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Normalize an unsorted term list into a `Poly`.
    pub fn from_terms(&self, terms: Vec<(Monomial, FieldElement)>) -> Poly {
        let mut terms: Vec<(Monomial, FieldElement)> =
            terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| self.cmp_mono(&b.0, &a.0));
        let mut out: Vec<(Monomial, FieldElement)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.add(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() || j < b.terms.len() {
            if j == b.terms.len() {
                out.push(a.terms[i].clone());
                i += 1;
            } else if i == a.terms.len() {
                out.push(b.terms[j].clone());
                j += 1;
            } else {
                match self.cmp_mono(&a.terms[i].0, &b.terms[j].0) {
                    Ordering::Greater => {
                        out.push(a.terms[i].clone());
                        i += 1;
                    }
                    Ordering::Less => {
                        out.push(b.terms[j].clone());
                        j += 1;
                    }
                    Ordering::Equal => {
                        let c = a.terms[i].1.add(&b.terms[j].1);
                        if !c.is_zero() {
                            out.push((a.terms[i].0.clone(), c));
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        Poly { terms: out }
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly { terms: a.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly, c: &FieldElement) -> Poly {
        if c.is_zero() {
            return self.zero();
        }
        Poly { terms: a.terms.iter().map(|(m, k)| (m.clone(), k.mul(c))).collect() }
    }

    /// a · c·m for a single term (monomial multiple); preserves sortedness.
    pub fn mul_term(&self, a: &Poly, m: &Monomial, c: &FieldElement) -> Poly {
        if c.is_zero() {
            return self.zero();
        }
        Poly { terms: a.terms.iter().map(|(am, ac)| (am.mul(m), ac.mul(c))).collect() }
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.terms.is_empty() || b.terms.is_empty() {
            return self.zero();
        }
        // accumulate via repeated merge; fine at desk scale
        let mut acc = self.zero();
        for (m, c) in &b.terms {
            acc = self.add(&acc, &self.mul_term(a, m, c));
        }
        acc
    }

    pub fn pow(&self, a: &Poly, n: u32) -> Poly {
        let mut out = self.one();
        for _ in 0..n {
            out = self.mul(&out, a);
        }
        out
    }

    /// Leading (monomial, coefficient) under the ring order.
    pub fn lt<'a>(&self, a: &'a Poly) -> Option<(&'a Monomial, &'a FieldElement)> {
        a.terms.first().map(|(m, c)| (m, c))
    }

    pub fn make_monic(&self, a: &Poly) -> Poly {
        match a.terms.first() {
            None => self.zero(),
            Some((_, c)) => {
                let inv = c.inv().expect("leading coefficient nonzero");
                self.scale(a, &inv)
            }
        }
    }

    /// Exact division a / b (panics in debug if not exact); used by the
    /// fraction-free Bareiss elimination where divisibility is guaranteed.
    pub fn exact_div(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        if b.terms.is_empty() {
            return Err(Error::InvalidInput("exact division by zero".into()));
        }
        let mut rem = a.clone();
        let mut q = self.zero();
        let (bm, bc) = (b.terms[0].0.clone(), b.terms[0].1.clone());
        let bc_inv = bc.inv().expect("nonzero");
        while let Some((rm, rc)) = rem.terms.first() {
            if !bm.divides(rm) {
                return Err(Error::InvalidInput("division not exact".into()));
            }
            let qm = bm.quotient_into(rm);
            let qc = rc.mul(&bc_inv);
            let t = self.monomial(qm.clone(), qc.clone());
            q = self.add(&q, &t);
            rem = self.sub(&rem, &self.mul_term(b, &qm, &qc));
        }
        Ok(q)
    }

    /// Weight of a weight-homogeneous polynomial; `Err` if inhomogeneous.
    /// Zero is homogeneous of every weight (reported as `None`).
    pub fn homogeneous_weight(&self, a: &Poly) -> Result<Option<i64>> {
        let mut w = None;
        for (m, _) in &a.terms {
            let wm = self.weight_of_mono(m);
            match w {
                None => w = Some(wm),
                Some(prev) if prev != wm => {
                    return Err(Error::InvalidInput(format!(
                        "inhomogeneous polynomial: weights {prev} and {wm}"
                    )))
                }
                _ => {}
            }
        }
        Ok(w)
    }

    pub fn fmt_poly(&self, a: &Poly) -> String {
        if a.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, c)) in a.terms.iter().enumerate() {
            let mono = self.fmt_mono(m);
            let coeff = format!("{c}");
            let (sign, mag) = match coeff.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", coeff),
            };
            if idx == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                let _ = write!(s, " {sign} ");
            }
            if mono.is_empty() {
                let _ = write!(s, "{mag}");
            } else if mag == "1" {
                let _ = write!(s, "{mono}");
            } else {
                let _ = write!(s, "{mag}*{mono}");
            }
        }
        s
    }

    fn fmt_mono(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 1 {
                parts.push(self.vars[i].clone());
            } else if e > 1 {
                parts.push(format!("{}^{}", self.vars[i], e));
            }
        }
        parts.join("*")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    /// Terms sorted strictly descending in the owning ring's order.
    pub terms: Vec<(Monomial, FieldElement)>,
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if this polynomial is a constant.
    pub fn as_constant(&self, field: Field) -> Option<FieldElement> {
        match self.terms.as_slice() {
            [] => Some(field.zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> PolyRing {
        PolyRing::new(Field::Q, vec!["x".into(), "y".into()], MonomialOrder::DegRevLex)
    }

    #[test]
    fn degrevlex_order_on_three_vars() {
        let r = PolyRing::new(
            Field::Q,
            vec!["x".into(), "y".into(), "z".into()],
            MonomialOrder::DegRevLex,
        );
        let m = |e: [u32; 3]| Monomial(Box::new(e));
        // x² > xy > y² > xz > yz > z²
        let expect = [
            m([2, 0, 0]),
            m([1, 1, 0]),
            m([0, 2, 0]),
            m([1, 0, 1]),
            m([0, 1, 1]),
            m([0, 0, 2]),
        ];
        for w in expect.windows(2) {
            assert_eq!(r.cmp_mono(&w[0], &w[1]), Ordering::Greater);
        }
    }

    #[test]
    fn lex_order() {
        let r = PolyRing::new(Field::Q, vec!["x".into(), "y".into()], MonomialOrder::Lex);
        let x = Monomial::var(2, 0);
        let y2 = Monomial(Box::new([0, 2]));
        assert_eq!(r.cmp_mono(&x, &y2), Ordering::Greater); // x > y²  under lex
    }

    #[test]
    fn arithmetic_and_normalization() {
        let r = ring2();
        let x = r.var(0);
        let y = r.var(1);
        let p = r.add(&r.mul(&x, &y), &r.mul(&y, &x)); // 2xy
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].1, Field::Q.from_i64(2));
        let q = r.sub(&p, &p);
        assert!(q.is_zero());
        let cube = r.pow(&r.add(&x, &y), 3);
        assert_eq!(cube.terms.len(), 4); // x³+3x²y+3xy²+y³
    }

    #[test]
    fn exact_division() {
        let r = ring2();
        let x = r.var(0);
        let y = r.var(1);
        let a = r.mul(&r.add(&x, &y), &r.sub(&x, &y)); // x² − y²
        let q = r.exact_div(&a, &r.add(&x, &y)).unwrap();
        assert_eq!(q, r.sub(&x, &y));
        assert!(r.exact_div(&x, &y).is_err());
    }

    #[test]
    fn weights() {
        let r = PolyRing::new(Field::Q, vec!["s".into(), "si".into()], MonomialOrder::DegRevLex)
            .with_weights(vec![-1, 1]);
        let s = r.var(0);
        let si = r.var(1);
        let rel = r.sub(&r.mul(&s, &si), &r.one()); // s·si − 1, weight 0
        assert_eq!(r.homogeneous_weight(&rel).unwrap(), Some(0));
        let bad = r.add(&s, &si);
        assert!(r.homogeneous_weight(&bad).is_err());
    }

    #[test]
    fn formatting() {
        let r = ring2();
        let x = r.var(0);
        let y = r.var(1);
        let p = r.sub(&r.mul(&x, &x), &r.scale(&y, &Field::Q.from_i64(2)));
        assert_eq!(r.fmt_poly(&p), "x^2 - 2*y");
        assert_eq!(r.fmt_poly(&r.zero()), "0");
    }
}
