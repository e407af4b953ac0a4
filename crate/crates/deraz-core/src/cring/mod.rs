//! Finitely presented commutative algebras A = k[x₁..xₙ]/I with a cached
//! reduced Gröbner basis, the computable stand-in for base rings: normal
//! forms, radical membership, module syzygies, Fitting ideals,
//! localizations and point evaluation all live here.

pub mod groebner;
pub mod modules;
pub mod parse;
pub mod points;
pub mod poly;

pub use groebner::{buchberger, is_unit_basis, normal_form, radical_membership};
pub use modules::{det_bareiss, invert_in_quotient, module_member_lift, syzygies_quotient};
pub use points::{eval_poly_base, eval_poly_ext, is_prime, ExtElem, ExtFieldDef, PointSpec};
pub use poly::{Monomial, MonomialOrder, Poly, PolyRing};

use crate::scalars::{Field, FieldElement};
use crate::{Error, Result};
use std::cmp::Ordering;

/// A = k[x₁..xₙ]/(relations), with the reduced Gröbner basis of the
/// relation ideal computed once at construction. Immutable afterwards;
/// all queries are thread-safe.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyAlgebra {
    pub ring: PolyRing,
    pub relations: Vec<Poly>,
    gb: Vec<Poly>,
}

/// Generators of a submodule of A^r (columns of a presentation matrix when
/// read as relations of a cokernel).
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodulePresentation {
    pub ambient_rank: usize,
    pub generators: Vec<Vec<Poly>>,
}

impl SubmodulePresentation {
    pub fn new(ambient_rank: usize, generators: Vec<Vec<Poly>>) -> Result<Self> {
        for g in &generators {
            if g.len() != ambient_rank {
                return Err(Error::ShapeError(format!(
                    "generator has length {}, ambient rank is {ambient_rank}",
                    g.len()
                )));
            }
        }
        Ok(SubmodulePresentation { ambient_rank, generators })
    }
}

/// A localization A → A[f⁻¹] presented as A[v]/(v·f − 1); `inverse_var`
/// is the index of v in the target ring, and source variables keep their
/// indices (the canonical map is the identity on variable names).
#[derive(Debug, Clone)]
pub struct Localization {
    pub algebra: PolyAlgebra,
    pub inverse_var: usize,
    pub inverted: Poly,
}

impl PolyAlgebra {
    pub fn new(ring: PolyRing, relations: Vec<Poly>) -> Result<PolyAlgebra> {
        if ring.weights.is_some() {
            for rel in &relations {
                ring.homogeneous_weight(rel).map_err(|_| {
                    Error::InvalidInput(format!(
                        "relation {} is not homogeneous for the ring's weights",
                        ring.fmt_poly(rel)
                    ))
                })?;
            }
        }
        let gb = buchberger(&ring, &relations)?;
        Ok(PolyAlgebra { ring, relations, gb })
    }

    /// The ground field viewed as an algebra with no variables.
    pub fn ground_field(field: Field) -> PolyAlgebra {
        let ring = PolyRing::new(field, Vec::new(), MonomialOrder::DegRevLex);
        PolyAlgebra { ring, relations: Vec::new(), gb: Vec::new() }
    }

    pub fn field(&self) -> Field {
        self.ring.field
    }

    /// The cached reduced Gröbner basis of the relation ideal.
    pub fn gb(&self) -> &[Poly] {
        &self.gb
    }

    pub fn is_zero_ring(&self) -> bool {
        is_unit_basis(&self.gb)
    }

    /// True when A is the ground field presented with no variables.
    pub fn is_ground_field(&self) -> bool {
        self.ring.nvars() == 0 && !self.is_zero_ring()
    }

    pub fn normal_form(&self, f: &Poly) -> Poly {
        normal_form(&self.ring, f, &self.gb)
    }

    pub fn is_zero(&self, f: &Poly) -> bool {
        self.normal_form(f).is_zero()
    }

    pub fn equal(&self, f: &Poly, g: &Poly) -> bool {
        self.is_zero(&self.ring.sub(f, g))
    }

    /// Parse an expression and reduce it to normal form.
    pub fn parse_element(&self, src: &str) -> Result<Poly> {
        Ok(self.normal_form(&parse::parse_poly(&self.ring, src)?))
    }

    /// True iff f vanishes on V(I) (Rabinowitsch trick).
    pub fn radical_membership(&self, f: &Poly) -> Result<bool> {
        radical_membership(&self.ring, f, &self.gb)
    }

    /// Generators of ker(A^m → A^r) for the map given by M's generators.
    pub fn module_syzygies(&self, m: &SubmodulePresentation) -> Result<SubmodulePresentation> {
        let gens: Vec<Vec<Poly>> = m
            .generators
            .iter()
            .map(|g| g.iter().map(|p| self.normal_form(p)).collect())
            .collect();
        let syz = syzygies_quotient(&self.ring, &self.gb, &gens, m.ambient_rank)?;
        SubmodulePresentation::new(m.generators.len(), syz)
    }

    /// Express `target` as an A-combination of M's generators, if possible.
    pub fn member_lift(
        &self,
        m: &SubmodulePresentation,
        target: &[Poly],
    ) -> Result<Option<Vec<Poly>>> {
        if target.len() != m.ambient_rank {
            return Err(Error::ShapeError(format!(
                "target has length {}, ambient rank is {}",
                target.len(),
                m.ambient_rank
            )));
        }
        module_member_lift(
            &self.ring,
            &self.gb,
            &m.generators,
            m.ambient_rank,
            &target.to_vec(),
        )
    }

    /// Multiplicative inverse of f in A, when f is a unit.
    pub fn invert(&self, f: &Poly) -> Result<Option<Poly>> {
        invert_in_quotient(&self.ring, &self.gb, f)
    }

    /// Does the ideal generated by `gens` together with the defining
    /// relations contain 1? Individual normal forms are not enough here
    /// (x generates the unit ideal of k[x,u]/(xu−1) without reducing to
    /// a constant), so a combined basis is computed — on an unweighted
    /// copy of the ring, since membership is blind to the grading.
    pub fn ideal_is_unit(&self, gens: &[Poly]) -> Result<bool> {
        if gens
            .iter()
            .any(|g| g.as_constant(self.field()).map_or(false, |c| !c.is_zero()))
        {
            return Ok(true);
        }
        if gens.iter().all(|g| self.normal_form(g).is_zero()) {
            return Ok(self.is_zero_ring());
        }
        let bare = PolyRing::new(self.ring.field, self.ring.vars.clone(), self.ring.order);
        let mut rels = self.gb.clone();
        rels.extend(gens.iter().cloned());
        Ok(PolyAlgebra::new(bare, rels)?.is_zero_ring())
    }

    /// 0-th Fitting ideal of coker(A^m → A^r) for the presentation matrix
    /// whose columns are M's generators: the ideal of r×r minors.
    /// V(fitting0) = supp(coker); fitting0 = (1) ⟺ coker = 0.
    pub fn fitting0(&self, m: &SubmodulePresentation) -> Result<Vec<Poly>> {
        let r = m.ambient_rank;
        // rows × cols matrix of normal-form representatives in the free cover
        let mut rows = r;
        let mut cols: Vec<Vec<Poly>> = m
            .generators
            .iter()
            .map(|g| g.iter().map(|p| self.normal_form(p)).collect())
            .collect();
        if rows == 0 {
            return Ok(vec![self.ring.one()]); // zero module
        }
        // minimize: cancel unit entries (nonzero constants) to shrink minors
        loop {
            let pivot = cols.iter().enumerate().find_map(|(j, col)| {
                col.iter().enumerate().find_map(|(i, entry)| {
                    entry
                        .as_constant(self.field())
                        .filter(|c| !c.is_zero())
                        .map(|c| (i, j, c))
                })
            });
            let Some((i, j, c)) = pivot else { break };
            let inv = c.inv().unwrap();
            let unit_col: Vec<Poly> = cols[j].iter().map(|p| self.ring.scale(p, &inv)).collect();
            let mut next: Vec<Vec<Poly>> = Vec::with_capacity(cols.len() - 1);
            for (j2, col2) in cols.iter().enumerate() {
                if j2 == j {
                    continue;
                }
                let factor = col2[i].clone();
                let mut reduced: Vec<Poly> = col2
                    .iter()
                    .zip(&unit_col)
                    .map(|(a, b)| self.normal_form(&self.ring.sub(a, &self.ring.mul(&factor, b))))
                    .collect();
                reduced.remove(i);
                next.push(reduced);
            }
            cols = next;
            rows -= 1;
            if rows == 0 {
                return Ok(vec![self.ring.one()]);
            }
        }
        if cols.len() < rows {
            return Ok(Vec::new()); // no r×r minors: zero ideal
        }
        // all rows×rows minors over the free cover, reduced mod I
        let mut minors: Vec<Poly> = Vec::new();
        let mut choice: Vec<usize> = (0..rows).collect();
        loop {
            let mut flat = Vec::with_capacity(rows * rows);
            for i in 0..rows {
                for &j in &choice {
                    flat.push(cols[j][i].clone());
                }
            }
            let det = det_bareiss(&self.ring, rows, &flat)?;
            let nf = self.normal_form(&det);
            if let Some(c) = nf.as_constant(self.field()) {
                if !c.is_zero() {
                    return Ok(vec![self.ring.one()]); // unit minor: unit ideal
                }
            }
            if !nf.is_zero() {
                let nf = self.ring.make_monic(&nf); // generators canonical up to units
                if !minors.contains(&nf) {
                    minors.push(nf);
                }
            }
            // next combination of column indices
            let mut k = rows;
            loop {
                if k == 0 {
                    minors.sort_by(|a, b| cmp_polys(&self.ring, a, b));
                    return Ok(minors);
                }
                k -= 1;
                if choice[k] + 1 <= cols.len() - (rows - k) {
                    choice[k] += 1;
                    for l in k + 1..rows {
                        choice[l] = choice[l - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// A[f⁻¹] = A[v]/(v·f − 1). The fresh variable is named `inv{n}` (or
    /// derived from f when f is a single variable); in a weighted ring it
    /// gets weight −wt(f), so weighted localizations need homogeneous f.
    pub fn localize(&self, f: &Poly) -> Result<Localization> {
        let f = self.normal_form(f);
        if f.is_zero() {
            return Err(Error::ZeroLocalization);
        }
        let fresh = {
            let single_var = (f.terms.len() == 1).then(|| {
                let m = &f.terms[0].0;
                let mut idx = None;
                let mut count = 0;
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        count += e;
                        idx = Some(i);
                    }
                }
                (count == 1).then(|| idx.unwrap())
            });
            let base = match single_var.flatten() {
                Some(i) => format!("{}_inv", self.ring.vars[i]),
                None => format!("inv{}", self.ring.nvars()),
            };
            let mut name = base;
            while self.ring.var_index(&name).is_some() {
                name.push('_');
            }
            name
        };
        let mut vars = self.ring.vars.clone();
        vars.push(fresh);
        let mut ring = PolyRing::new(self.field(), vars, self.ring.order);
        if let Some(w) = &self.ring.weights {
            let wf = self
                .ring
                .homogeneous_weight(&f)?
                .expect("nonzero checked above");
            let mut w = w.clone();
            w.push(-wf);
            ring = ring.with_weights(w);
        }
        let n = self.ring.nvars();
        let lift = |p: &Poly| -> Poly {
            let terms = p
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.to_vec();
                    e.push(0);
                    (Monomial(e.into_boxed_slice()), c.clone())
                })
                .collect();
            ring.from_terms(terms)
        };
        let mut relations: Vec<Poly> = self.relations.iter().map(&lift).collect();
        let f_lifted = lift(&f);
        let inv = ring.var(n);
        relations.push(ring.sub(&ring.mul(&inv, &f_lifted), &ring.one()));
        let algebra = PolyAlgebra::new(ring, relations)?;
        Ok(Localization { algebra, inverse_var: n, inverted: f })
    }

    /// Check that a point's coordinates live over the right field and that
    /// every relation vanishes there.
    pub fn validate_point(&self, pt: &PointSpec) -> Result<()> {
        match pt {
            PointSpec::Base { field, coords } => {
                if *field != self.field() {
                    return Err(Error::PointMismatch(format!(
                        "point over {field}, algebra over {}",
                        self.field()
                    )));
                }
                for rel in &self.relations {
                    let v = eval_poly_base(&self.ring, rel, coords)?;
                    if !v.is_zero() {
                        return Err(Error::PointMismatch(format!(
                            "relation {} = {} ≠ 0 at {}",
                            self.ring.fmt_poly(rel),
                            v,
                            pt.coords_label()
                        )));
                    }
                }
                Ok(())
            }
            PointSpec::Ext { def, coords } => {
                if self.field() != Field::Fp(def.p) {
                    return Err(Error::PointMismatch(format!(
                        "point over F_{}^{}, algebra over {}",
                        def.p,
                        def.degree(),
                        self.field()
                    )));
                }
                for rel in &self.relations {
                    let v = eval_poly_ext(&self.ring, rel, def, coords)?;
                    if !def.is_zero_elem(&v) {
                        return Err(Error::PointMismatch(format!(
                            "relation {} = {} ≠ 0 at {}",
                            self.ring.fmt_poly(rel),
                            def.fmt_elem(&v),
                            pt.coords_label()
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// All F_p-points of Spec A (or F_{p^k}-points when `ext` is given),
    /// by full coordinate enumeration. `cap` bounds the number of tuples
    /// tried (CapExceeded beyond).
    pub fn enumerate_points(&self, ext: Option<&ExtFieldDef>, cap: u64) -> Result<Vec<PointSpec>> {
        let p = match self.field() {
            Field::Fp(p) => p,
            Field::Q => {
                return Err(Error::Unsupported(
                    "point enumeration requires a finite base field".into(),
                ))
            }
        };
        if let Some(d) = ext {
            if d.p != p {
                return Err(Error::PointMismatch(format!(
                    "extension of F_{} over algebra of characteristic {p}",
                    d.p
                )));
            }
        }
        let n = self.ring.nvars();
        let q: u64 = match ext {
            None => p,
            Some(d) => p.checked_pow(d.degree() as u32).ok_or_else(|| {
                Error::CapExceeded("extension field too large to enumerate".into())
            })?,
        };
        let total = q.checked_pow(n as u32).filter(|&t| t <= cap).ok_or_else(|| {
            Error::CapExceeded(format!("point enumeration needs q^n = {q}^{n} > cap {cap} tuples"))
        })?;
        let mut out = Vec::new();
        for idx in 0..total {
            let mut rem = idx;
            match ext {
                None => {
                    let fld = Field::Fp(p);
                    let coords: Vec<FieldElement> = (0..n)
                        .map(|_| {
                            let c = fld.from_i64((rem % q) as i64);
                            rem /= q;
                            c
                        })
                        .collect();
                    let pt = PointSpec::Base { field: fld, coords };
                    if self.validate_point(&pt).is_ok() {
                        out.push(pt);
                    }
                }
                Some(d) => {
                    let k = d.degree();
                    let coords: Vec<ExtElem> = (0..n)
                        .map(|_| {
                            let mut digits = rem % q;
                            rem /= q;
                            let mut v = vec![0u64; k];
                            for slot in v.iter_mut() {
                                *slot = digits % p;
                                digits /= p;
                            }
                            v
                        })
                        .collect();
                    let pt = PointSpec::Ext { def: d.clone(), coords };
                    if self.validate_point(&pt).is_ok() {
                        out.push(pt);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Monomial basis of A over k when A is finite-dimensional: the
    /// staircase of monomials outside LT(I). `Ok(None)` when A is
    /// infinite-dimensional; `CapExceeded` past `cap` basis elements.
    pub fn monomial_basis(&self, cap: usize) -> Result<Option<Vec<Monomial>>> {
        if self.is_zero_ring() {
            return Ok(Some(Vec::new()));
        }
        let n = self.ring.nvars();
        if n == 0 {
            return Ok(Some(vec![Monomial::one(0)]));
        }
        let lts: Vec<&Monomial> = self.gb.iter().filter_map(|g| g.terms.first().map(|(m, _)| m)).collect();
        // finite dimension ⟺ every variable has a pure power in LT(I)
        let mut bounds = vec![None::<u32>; n];
        for lt in &lts {
            let nz: Vec<usize> = (0..n).filter(|&i| lt.0[i] > 0).collect();
            if nz.len() == 1 {
                let i = nz[0];
                let e = lt.0[i];
                bounds[i] = Some(bounds[i].map_or(e, |b: u32| b.min(e)));
            }
        }
        if bounds.iter().any(|b| b.is_none()) {
            return Ok(None);
        }
        let bounds: Vec<u32> = bounds.into_iter().map(|b| b.unwrap()).collect();
        let mut out = Vec::new();
        let mut exps = vec![0u32; n];
        'enumerate: loop {
            let m = Monomial(exps.clone().into_boxed_slice());
            if !lts.iter().any(|lt| lt.divides(&m)) {
                out.push(m);
                if out.len() > cap {
                    return Err(Error::CapExceeded(format!(
                        "monomial basis exceeds cap {cap}"
                    )));
                }
            }
            for i in 0..n {
                exps[i] += 1;
                if exps[i] < bounds[i] {
                    continue 'enumerate;
                }
                exps[i] = 0;
            }
            break;
        }
        out.sort_by(|a, b| self.ring.cmp_mono(a, b));
        Ok(Some(out))
    }

    /// dim_k A for finite-dimensional A.
    pub fn dimension(&self, cap: usize) -> Result<Option<usize>> {
        Ok(self.monomial_basis(cap)?.map(|b| b.len()))
    }
}

/// Deterministic total order on polynomials of one ring: term-by-term by
/// monomial order, then by coefficient display; used to sort generator
/// lists in reports.
pub fn cmp_polys(ring: &PolyRing, a: &Poly, b: &Poly) -> Ordering {
    let mut i = 0;
    loop {
        match (a.terms.get(i), b.terms.get(i)) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some((ma, ca)), Some((mb, cb))) => {
                let c = ring
                    .cmp_mono(ma, mb)
                    .then_with(|| format!("{ca}").cmp(&format!("{cb}")));
                if c != Ordering::Equal {
                    return c;
                }
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn algebra(vars: &[&str], rels: &[&str]) -> PolyAlgebra {
        let ring = PolyRing::new(
            Field::Q,
            vars.iter().map(|s| s.to_string()).collect(),
            MonomialOrder::DegRevLex,
        );
        let rels: Vec<Poly> = rels
            .iter()
            .map(|s| parse::parse_poly(&ring, s).unwrap())
            .collect();
        PolyAlgebra::new(ring, rels).unwrap()
    }

    #[test]
    fn normal_forms_and_zero_ring() {
        let a = algebra(&["x", "y"], &["x^2 - y"]);
        let f = a.parse_element("x^4").unwrap();
        assert_eq!(f, a.parse_element("y^2").unwrap());
        assert!(!a.is_zero_ring());
        let z = algebra(&["x", "y"], &["x*y - 1", "x^2"]);
        assert!(z.is_zero_ring());
        assert!(z.is_zero(&z.ring.one()));
    }

    #[test]
    fn syzygies_match_spec_examples() {
        let a = algebra(&["x", "y"], &[]);
        let x = a.ring.var(0);
        let y = a.ring.var(1);
        let m = SubmodulePresentation::new(1, vec![vec![x.clone()], vec![y.clone()]]).unwrap();
        let syz = a.module_syzygies(&m).unwrap();
        assert_eq!(syz.ambient_rank, 2);
        assert_eq!(syz.generators.len(), 1);
        let s = &syz.generators[0];
        assert!(a.is_zero(&a.ring.add(&a.ring.mul(&s[0], &x), &a.ring.mul(&s[1], &y))));
        // {x, x} has (1, −1) among its syzygies
        let m2 = SubmodulePresentation::new(1, vec![vec![x.clone()], vec![x.clone()]]).unwrap();
        let syz2 = a.module_syzygies(&m2).unwrap();
        let target = vec![a.ring.one(), a.ring.neg(&a.ring.one())];
        assert!(a.member_lift(&syz2, &target).unwrap().is_some());
    }

    #[test]
    fn fitting_ideals() {
        let a = algebra(&["x", "y"], &[]);
        let x = a.ring.var(0);
        let y = a.ring.var(1);
        // [f] 1×1 → (f)
        let m = SubmodulePresentation::new(1, vec![vec![x.clone()]]).unwrap();
        assert_eq!(a.fitting0(&m).unwrap(), vec![x.clone()]);
        // identity 2×2 → (1)
        let id = SubmodulePresentation::new(
            2,
            vec![
                vec![a.ring.one(), a.ring.zero()],
                vec![a.ring.zero(), a.ring.one()],
            ],
        )
        .unwrap();
        assert_eq!(a.fitting0(&id).unwrap(), vec![a.ring.one()]);
        // [[x, y]] : A² → A¹ → (x, y)
        let row = SubmodulePresentation::new(1, vec![vec![x.clone()], vec![y.clone()]]).unwrap();
        let f = a.fitting0(&row).unwrap();
        assert_eq!(f, vec![y.clone(), x.clone()]); // sorted ascending
        // no generators at rank 1 → zero ideal
        let none = SubmodulePresentation::new(1, vec![]).unwrap();
        assert!(a.fitting0(&none).unwrap().is_empty());
        // rank 0 → unit ideal (zero module)
        let zero = SubmodulePresentation::new(0, vec![]).unwrap();
        assert_eq!(a.fitting0(&zero).unwrap(), vec![a.ring.one()]);
    }

    #[test]
    fn fitting_minimization_cancels_units() {
        // columns (1, x) and (y, x·y): the first relation says g₁ = −x·g₂,
        // the second is y times the first, so coker ≅ A and fitt₀ = (0);
        // the unit pivot at (0,0) must cancel to reach the 1×1 zero matrix
        let a = algebra(&["x", "y"], &[]);
        let x = a.ring.var(0);
        let y = a.ring.var(1);
        let m = SubmodulePresentation::new(
            2,
            vec![
                vec![a.ring.one(), y.clone()],
                vec![x.clone(), a.ring.mul(&x, &y)],
            ],
        )
        .unwrap();
        assert!(a.fitting0(&m).unwrap().is_empty());
        // determinant route agrees: det [[1,x],[y,xy]] = xy − xy = 0
    }

    #[test]
    fn localization_examples() {
        // k[x] at 1 → still a 2-variable presentation, but isomorphic to k[x]
        let a = algebra(&["x"], &[]);
        let loc = a.localize(&a.ring.one()).unwrap();
        assert!(!loc.algebra.is_zero_ring());
        assert_eq!(loc.algebra.ring.nvars(), 2);
        // the inverse variable equals 1 there
        let v = loc.algebra.ring.var(loc.inverse_var);
        assert!(loc.algebra.equal(&v, &loc.algebra.ring.one()));
        // k[x] at x → Laurent ring, x becomes a unit
        let lx = a.localize(&a.ring.var(0)).unwrap();
        let x_there = lx.algebra.ring.var(0);
        assert!(lx.algebra.invert(&x_there).unwrap().is_some());
        assert!(!lx.algebra.is_zero_ring());
        // k[x]/(x²) at x → zero ring
        let nil = algebra(&["x"], &["x^2"]);
        let z = nil.localize(&nil.ring.var(0)).unwrap();
        assert!(z.algebra.is_zero_ring());
        // localizing at 0 is an error
        assert!(matches!(nil.localize(&nil.ring.zero()), Err(Error::ZeroLocalization)));
        // composition: (k[x] at x) at (x_inv) stays consistent
        let twice = lx.algebra.localize(&lx.algebra.ring.var(lx.inverse_var)).unwrap();
        assert!(!twice.algebra.is_zero_ring());
    }

    #[test]
    fn point_validation_and_enumeration() {
        let ring = PolyRing::new(
            Field::Fp(3),
            vec!["x".into(), "y".into()],
            MonomialOrder::DegRevLex,
        );
        let rel = parse::parse_poly(&ring, "x*y - 1").unwrap();
        let a = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let f3 = Field::Fp(3);
        let good = PointSpec::Base { field: f3, coords: vec![f3.from_i64(2), f3.from_i64(2)] };
        assert!(a.validate_point(&good).is_ok());
        let bad = PointSpec::Base { field: f3, coords: vec![f3.from_i64(0), f3.from_i64(1)] };
        assert!(matches!(a.validate_point(&bad), Err(Error::PointMismatch(_))));
        // x·y = 1 has exactly 2 solutions over F₃ (x ∈ {1,2})
        let pts = a.enumerate_points(None, 1000).unwrap();
        assert_eq!(pts.len(), 2);
        // and 3 over F₄ (x ∈ F₄*)… wrong characteristic is rejected
        let f4 = ExtFieldDef::new(2, vec![1, 1]).unwrap();
        assert!(a.enumerate_points(Some(&f4), 1000).is_err());
        // over F₉ there are 8 solutions
        let f9 = ExtFieldDef::new(3, vec![1, 0]).unwrap();
        let pts9 = a.enumerate_points(Some(&f9), 1000).unwrap();
        assert_eq!(pts9.len(), 8);
    }

    #[test]
    fn monomial_bases() {
        let a = algebra(&["x", "y"], &["x^2", "y^3", "x*y"]);
        let b = a.monomial_basis(100).unwrap().unwrap();
        // staircase: 1, x, y, y²
        assert_eq!(b.len(), 4);
        assert_eq!(a.dimension(100).unwrap(), Some(4));
        // infinite-dimensional
        let poly_ring = algebra(&["x", "y"], &["x*y"]);
        assert_eq!(poly_ring.monomial_basis(100).unwrap(), None);
        // the zero ring has an empty basis
        let z = algebra(&["x"], &["x", "x - 1"]);
        assert_eq!(z.dimension(10).unwrap(), Some(0));
        // ground field
        let k = PolyAlgebra::ground_field(Field::Q);
        assert_eq!(k.dimension(10).unwrap(), Some(1));
        assert!(k.is_ground_field());
    }

    #[test]
    fn weighted_relations_must_be_homogeneous() {
        let ring = PolyRing::new(
            Field::Q,
            vec!["s".into(), "si".into()],
            MonomialOrder::DegRevLex,
        )
        .with_weights(vec![-1, 1]);
        let good = parse::parse_poly(&ring, "s*si - 1").unwrap();
        assert!(PolyAlgebra::new(ring.clone(), vec![good.clone()]).is_ok());
        let bad = parse::parse_poly(&ring, "s - 1").unwrap();
        assert!(PolyAlgebra::new(ring, vec![bad]).is_err());
        // weighted localization picks up the negated weight
        let l = PolyAlgebra::new(
            PolyRing::new(Field::Q, vec!["t".into()], MonomialOrder::DegRevLex)
                .with_weights(vec![1]),
            vec![],
        )
        .unwrap();
        let loc = l.localize(&l.ring.var(0)).unwrap();
        assert_eq!(loc.algebra.ring.weights, Some(vec![1, -1]));
        assert_eq!(loc.algebra.ring.vars[1], "t_inv");
    }
}
