//! Gröbner bases in free modules P^r (position-over-term order), used to
//! compute syzygies, membership lifts and Fitting ideals over finitely
//! presented quotient rings A = P/I.
//!
//! Everything over a quotient ring is reduced to the free cover P by the
//! elimination-block construction: to work with generators g₁..g_m ⊆ A^r,
//! take the vectors (gᵢ; eᵢ) ∈ P^{r+m} together with (h·eⱼ; 0) for every
//! relation h of I and every position j ≤ r. Under position-over-term
//! (components of the first block dominate), Gröbner-basis elements with
//! vanishing first block have second blocks generating the syzygy module,
//! and normal forms of (v; 0) decide membership and produce lifts.

use super::groebner::normal_form;
use super::poly::{Monomial, Poly, PolyRing};
use crate::scalars::FieldElement;
use crate::{Error, Result};

const MODULE_BASIS_CAP: usize = 16384;

/// An element of the free module P^r: one polynomial per component.
pub type MVec = Vec<Poly>;

fn mvec_is_zero(v: &MVec) -> bool {
    v.iter().all(|p| p.is_zero())
}

/// Leading module term (component, monomial) under position-over-term:
/// lower component wins, ties broken by the ring's monomial order.
fn mvec_lt<'a>(ring: &PolyRing, v: &'a MVec) -> Option<(usize, &'a Monomial, &'a FieldElement)> {
    v.iter()
        .enumerate()
        .filter_map(|(c, p)| p.terms.first().map(|(m, k)| (c, m, k)))
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| ring.cmp_mono(b.1, a.1)))
}

fn mvec_sub_scaled(ring: &PolyRing, v: &MVec, m: &Monomial, c: &FieldElement, w: &MVec) -> MVec {
    v.iter()
        .zip(w)
        .map(|(a, b)| ring.sub(a, &ring.mul_term(b, m, c)))
        .collect()
}

fn mvec_monic(ring: &PolyRing, v: &MVec) -> MVec {
    match mvec_lt(ring, v) {
        None => v.clone(),
        Some((_, _, c)) => {
            let inv = c.inv().unwrap();
            v.iter().map(|p| ring.scale(p, &inv)).collect()
        }
    }
}

/// Full normal form in the free module: reduce the leading module term by
/// the first basis element whose leading term divides it (same component,
/// dividing monomial); irreducible leading terms move to the remainder.
pub fn module_normal_form(ring: &PolyRing, v: &MVec, basis: &[MVec]) -> MVec {
    let r = v.len();
    let mut rem: MVec = vec![ring.zero(); r];
    let mut cur = v.clone();
    'outer: while let Some((comp, m, c)) = mvec_lt(ring, &cur).map(|(a, b, c)| (a, b.clone(), c.clone())) {
        for b in basis {
            if let Some((bc, bm, bk)) = mvec_lt(ring, b) {
                if bc == comp && bm.divides(&m) {
                    let q = bm.quotient_into(&m);
                    let f = c.mul(&bk.inv().unwrap());
                    cur = mvec_sub_scaled(ring, &cur, &q, &f, b);
                    continue 'outer;
                }
            }
        }
        rem[comp] = ring.add(&rem[comp], &ring.monomial(m.clone(), c.clone()));
        let lead = ring.monomial(m, c);
        cur[comp] = ring.sub(&cur[comp], &lead);
    }
    rem
}

/// Buchberger in P^r. S-pairs are formed only for equal leading components.
/// No pair-skipping criteria: downstream syzygy extraction by elimination
/// needs the full basis, and desk-scale inputs don't require the speedup.
pub fn module_buchberger(ring: &PolyRing, gens: &[MVec]) -> Result<Vec<MVec>> {
    let mut basis: Vec<MVec> = Vec::new();
    for g in gens {
        let g = module_normal_form(ring, g, &basis);
        if !mvec_is_zero(&g) {
            basis.push(g);
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some(&(i, j)) = pairs.first() {
        pairs.remove(0);
        let (Some(li), Some(lj)) = (mvec_lt(ring, &basis[i]), mvec_lt(ring, &basis[j])) else {
            continue;
        };
        if li.0 != lj.0 {
            continue;
        }
        let l = li.1.lcm(lj.1);
        let qi = li.1.quotient_into(&l);
        let qj = lj.1.quotient_into(&l);
        let ci = li.2.inv().unwrap();
        let cj = lj.2.inv().unwrap();
        let a: MVec = basis[i].iter().map(|p| ring.mul_term(p, &qi, &ci)).collect();
        let b: MVec = basis[j].iter().map(|p| ring.mul_term(p, &qj, &cj)).collect();
        let s: MVec = a.iter().zip(&b).map(|(x, y)| ring.sub(x, y)).collect();
        let rem = module_normal_form(ring, &s, &basis);
        if !mvec_is_zero(&rem) {
            basis.push(rem);
            if basis.len() > MODULE_BASIS_CAP {
                return Err(Error::CapExceeded(format!(
                    "module Gröbner basis exceeded {MODULE_BASIS_CAP} elements"
                )));
            }
            let t = basis.len() - 1;
            for i in 0..t {
                pairs.push((i, t));
            }
        }
    }
    // minimalize + tail-reduce for a deterministic basis: sort ascending by
    // leading module term, keep each element whose LT is not divisible by an
    // earlier kept LT (any divisor is strictly smaller in the term order, or
    // equal, so one pass over the sorted list suffices)
    let mut sorted: Vec<MVec> = basis.into_iter().filter(|v| !mvec_is_zero(v)).collect();
    sorted.sort_by(|a, b| {
        let (ca, ma, _) = mvec_lt(ring, a).unwrap();
        let (cb, mb, _) = mvec_lt(ring, b).unwrap();
        cb.cmp(&ca).then_with(|| ring.cmp_mono(ma, mb))
    });
    let mut minimal: Vec<MVec> = Vec::new();
    for v in &sorted {
        let (vc, vm, _) = mvec_lt(ring, v).unwrap();
        let dominated = minimal.iter().any(|w| {
            let (wc, wm, _) = mvec_lt(ring, w).unwrap();
            wc == vc && wm.divides(vm)
        });
        if !dominated {
            minimal.push(mvec_monic(ring, v));
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MVec> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, w)| w.clone())
            .collect();
        reduced.push(mvec_monic(ring, &module_normal_form(ring, &minimal[i], &others)));
    }
    Ok(reduced)
}

/// The elimination-block module for generators `gens` ⊆ A^r over the
/// quotient A = P/I: vectors (gᵢ; eᵢ) plus (h·eⱼ; 0) for h ∈ gb(I).
fn elimination_block(ring: &PolyRing, ideal_gb: &[Poly], gens: &[MVec], r: usize) -> Vec<MVec> {
    let m = gens.len();
    let width = r + m;
    let mut out = Vec::with_capacity(m + ideal_gb.len() * r);
    for (i, g) in gens.iter().enumerate() {
        debug_assert_eq!(g.len(), r);
        let mut v = vec![ring.zero(); width];
        v[..r].clone_from_slice(g);
        v[r + i] = ring.one();
        out.push(v);
    }
    for h in ideal_gb {
        for j in 0..r {
            let mut v = vec![ring.zero(); width];
            v[j] = h.clone();
            out.push(v);
        }
    }
    out
}

/// The submodule of A^r spanned by `gens` over A = P/(ideal_gb), carrying
/// the elimination Gröbner basis once so that syzygies and arbitrarily many
/// membership lifts share it.
pub struct QuotientModule<'a> {
    ring: &'a PolyRing,
    ideal_gb: &'a [Poly],
    r: usize,
    m: usize,
    gb: Vec<MVec>,
}

impl<'a> QuotientModule<'a> {
    pub fn new(
        ring: &'a PolyRing,
        ideal_gb: &'a [Poly],
        gens: &[MVec],
        r: usize,
    ) -> Result<Self> {
        let gb = module_buchberger(ring, &elimination_block(ring, ideal_gb, gens, r))?;
        Ok(QuotientModule { ring, ideal_gb, r, m: gens.len(), gb })
    }

    /// Generators of { a ∈ A^m : Σ aᵢ gᵢ = 0 in A^r }: the second blocks of
    /// basis elements whose first block vanishes.
    pub fn syzygies(&self) -> Vec<Vec<Poly>> {
        let mut syz = Vec::new();
        for v in &self.gb {
            if v[..self.r].iter().all(|p| p.is_zero()) {
                let a: Vec<Poly> = v[self.r..]
                    .iter()
                    .map(|p| normal_form(self.ring, p, self.ideal_gb))
                    .collect();
                if !a.iter().all(|p| p.is_zero()) {
                    syz.push(a);
                }
            }
        }
        syz
    }

    /// If `target` ∈ ⟨gens⟩ + I·A^r, coefficients aᵢ with
    /// target ≡ Σ aᵢ gᵢ (mod I); otherwise `None`.
    pub fn lift(&self, target: &MVec) -> Option<Vec<Poly>> {
        debug_assert_eq!(target.len(), self.r);
        let mut v = vec![self.ring.zero(); self.r + self.m];
        v[..self.r].clone_from_slice(target);
        let nf = module_normal_form(self.ring, &v, &self.gb);
        if nf[..self.r].iter().all(|p| p.is_zero()) {
            Some(
                nf[self.r..]
                    .iter()
                    .map(|p| normal_form(self.ring, &self.ring.neg(p), self.ideal_gb))
                    .collect(),
            )
        } else {
            None
        }
    }
}

/// Generators of the syzygy module { a ∈ A^m : Σ aᵢ gᵢ = 0 in A^r } over
/// A = P/(ideal_gb). Entries are returned in normal form mod the ideal.
pub fn syzygies_quotient(
    ring: &PolyRing,
    ideal_gb: &[Poly],
    gens: &[MVec],
    r: usize,
) -> Result<Vec<Vec<Poly>>> {
    Ok(QuotientModule::new(ring, ideal_gb, gens, r)?.syzygies())
}

/// If `target` ∈ ⟨gens⟩ + I·A^r, return coefficients aᵢ with
/// target ≡ Σ aᵢ gᵢ (mod I); otherwise `None`.
pub fn module_member_lift(
    ring: &PolyRing,
    ideal_gb: &[Poly],
    gens: &[MVec],
    r: usize,
    target: &MVec,
) -> Result<Option<Vec<Poly>>> {
    Ok(QuotientModule::new(ring, ideal_gb, gens, r)?.lift(target))
}

/// Multiplicative inverse of f in A = P/(ideal_gb), when it exists:
/// the rank-1 lift of [1] against the single generator [f].
pub fn invert_in_quotient(ring: &PolyRing, ideal_gb: &[Poly], f: &Poly) -> Result<Option<Poly>> {
    let lift = module_member_lift(ring, ideal_gb, &[vec![f.clone()]], 1, &vec![ring.one()])?;
    Ok(lift.map(|mut v| v.remove(0)))
}

/// Determinant over the free polynomial ring by fraction-free Bareiss
/// elimination (P is a domain; every interior division is exact).
pub fn det_bareiss(ring: &PolyRing, n: usize, mat: &[Poly]) -> Result<Poly> {
    assert_eq!(mat.len(), n * n);
    if n == 0 {
        return Ok(ring.one());
    }
    let mut m: Vec<Poly> = mat.to_vec();
    let at = |m: &Vec<Poly>, i: usize, j: usize| m[i * n + j].clone();
    let mut sign = false;
    let mut prev = ring.one();
    for k in 0..n - 1 {
        if at(&m, k, k).is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !at(&m, i, k).is_zero()) else {
                return Ok(ring.zero());
            };
            for j in 0..n {
                m.swap(k * n + j, swap * n + j);
            }
            sign = !sign;
        }
        let pivot = at(&m, k, k);
        for i in k + 1..n {
            for j in k + 1..n {
                let num = ring.sub(
                    &ring.mul(&pivot, &at(&m, i, j)),
                    &ring.mul(&at(&m, i, k), &at(&m, k, j)),
                );
                m[i * n + j] = ring.exact_div(&num, &prev)?;
            }
            m[i * n + k] = ring.zero();
        }
        prev = pivot;
    }
    let d = at(&m, n - 1, n - 1);
    Ok(if sign { ring.neg(&d) } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cring::groebner::buchberger;
    use crate::cring::poly::MonomialOrder;
    use crate::scalars::Field;

    fn ring(vars: &[&str]) -> PolyRing {
        PolyRing::new(
            Field::Q,
            vars.iter().map(|s| s.to_string()).collect(),
            MonomialOrder::DegRevLex,
        )
    }

    #[test]
    fn syzygy_of_nonzerodivisor_is_zero() {
        let r = ring(&["x"]);
        let gens = vec![vec![r.var(0)]]; // (x) in A = k[x]
        let syz = syzygies_quotient(&r, &[], &gens, 1).unwrap();
        assert!(syz.is_empty());
    }

    #[test]
    fn koszul_syzygy_of_regular_sequence() {
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let gens = vec![vec![x.clone()], vec![y.clone()]];
        let syz = syzygies_quotient(&r, &[], &gens, 1).unwrap();
        assert_eq!(syz.len(), 1);
        // the syzygy is (y, −x) up to sign/scale
        let s = &syz[0];
        let check = r.add(&r.mul(&s[0], &x), &r.mul(&s[1], &y));
        assert!(check.is_zero());
        assert!(!s[0].is_zero() && !s[1].is_zero());
    }

    #[test]
    fn equal_columns_syzygy() {
        let r = ring(&["x"]);
        let x = r.var(0);
        let gens = vec![vec![x.clone()], vec![x.clone()]];
        let syz = syzygies_quotient(&r, &[], &gens, 1).unwrap();
        // (1, −1) must lie in the span; verify by membership lift against syz
        let target = vec![r.one(), r.neg(&r.one())];
        // Σ aᵢ·syzᵢ = target solvable ⟺ target is a syzygy (it is)
        let lift = module_member_lift(&r, &[], &syz, 2, &target).unwrap();
        assert!(lift.is_some());
    }

    #[test]
    fn syzygies_over_quotient_ring() {
        // A = k[x]/(x²): syzygies of (x) are generated by (x)
        let r = ring(&["x"]);
        let x = r.var(0);
        let i_gb = buchberger(&r, &[r.mul(&x, &x)]).unwrap();
        let syz = syzygies_quotient(&r, &i_gb, &[vec![x.clone()]], 1).unwrap();
        assert_eq!(syz.len(), 1);
        assert_eq!(syz[0][0], x);
    }

    #[test]
    fn membership_lift_and_inverse() {
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        // y·x − x·y = 0: lift (xy) against gens {x, y}
        let target = vec![r.mul(&x, &y)];
        let lift = module_member_lift(&r, &[], &[vec![x.clone()], vec![y.clone()]], 1, &target)
            .unwrap()
            .unwrap();
        let rebuilt = r.add(&r.mul(&lift[0], &x), &r.mul(&lift[1], &y));
        assert_eq!(rebuilt, target[0]);
        // 1 is not in (x, y)
        assert!(
            module_member_lift(&r, &[], &[vec![x.clone()], vec![y.clone()]], 1, &vec![r.one()])
                .unwrap()
                .is_none()
        );
        // inverse of s in k[s,si]/(s·si−1) is si
        let l = ring(&["s", "si"]);
        let rel = l.sub(&l.mul(&l.var(0), &l.var(1)), &l.one());
        let gb = buchberger(&l, &[rel]).unwrap();
        let inv = invert_in_quotient(&l, &gb, &l.var(0)).unwrap().unwrap();
        assert_eq!(inv, l.var(1));
        // x has no inverse in k[x]
        let k = ring(&["x"]);
        assert!(invert_in_quotient(&k, &[], &k.var(0)).unwrap().is_none());
    }

    #[test]
    fn bareiss_determinants() {
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        // det [[x, y],[y, x]] = x² − y²
        let d = det_bareiss(&r, 2, &[x.clone(), y.clone(), y.clone(), x.clone()]).unwrap();
        assert_eq!(d, r.sub(&r.mul(&x, &x), &r.mul(&y, &y)));
        // singular matrix
        let d0 = det_bareiss(&r, 2, &[x.clone(), x.clone(), x.clone(), x.clone()]).unwrap();
        assert!(d0.is_zero());
        // zero-pivot path: [[0,1],[1,0]] → −1
        let d1 = det_bareiss(&r, 2, &[r.zero(), r.one(), r.one(), r.zero()]).unwrap();
        assert_eq!(d1, r.neg(&r.one()));
        // 3×3 with polynomial entries, cross-checked by cofactor expansion
        let entries = vec![
            x.clone(), y.clone(), r.one(),
            r.one(), x.clone(), y.clone(),
            y.clone(), r.one(), x.clone(),
        ];
        let d3 = det_bareiss(&r, 3, &entries).unwrap();
        let expect = {
            // x(x²−y) − y(x−y²) + (1−xy)
            let t1 = r.mul(&x, &r.sub(&r.mul(&x, &x), &y));
            let t2 = r.mul(&y, &r.sub(&x, &r.mul(&y, &y)));
            let t3 = r.sub(&r.one(), &r.mul(&x, &y));
            r.add(&r.sub(&t1, &t2), &t3)
        };
        assert_eq!(d3, expect);
    }

    #[test]
    fn bareiss_matches_brute_force_syzygy_check() {
        // graded sanity: over k[x,y], syzygies of {x², xy} are spanned by (y, −x)
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let gens = vec![vec![r.mul(&x, &x)], vec![r.mul(&x, &y)]];
        let syz = syzygies_quotient(&r, &[], &gens, 1).unwrap();
        for s in &syz {
            let combo = r.add(&r.mul(&s[0], &gens[0][0]), &r.mul(&s[1], &gens[1][0]));
            assert!(combo.is_zero());
        }
        // (y, −x) is in the span
        let lift = module_member_lift(&r, &[], &syz, 2, &vec![y.clone(), r.neg(&x)]).unwrap();
        assert!(lift.is_some());
    }
}
