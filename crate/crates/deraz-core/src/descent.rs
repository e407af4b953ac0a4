//! Standard étale data, splitting algebras with their symmetric-group
//! action, and finite-flat pushforward of complexes along finite free
//! ring maps. Freeness claims are certified by normal-form counts, and
//! covering checks are point-sampled (the report says so).

use std::collections::BTreeMap;

use crate::complexes::{FreeComplex, PolyMat};
use crate::cring::{eval_poly_base, eval_poly_ext, Monomial, Poly, PolyRing, PointSpec};
use crate::{Error, PolyAlgebra, Result};

/// Splitting algebras have rank d!; past degree 4 that stops being a
/// desk-scale object.
pub const SPLITTING_DEGREE_CAP: usize = 4;

/// Reindex a polynomial into a bigger ring: `map[i]` is the index of the
/// source ring's i-th variable inside the target ring.
fn lift_poly(to: &PolyRing, map: &[usize], f: &Poly) -> Poly {
    let terms = f
        .terms
        .iter()
        .map(|(m, c)| {
            let mut e = vec![0u32; to.nvars()];
            for (i, &ei) in m.0.iter().enumerate() {
                e[map[i]] += ei;
            }
            (Monomial(e.into_boxed_slice()), c.clone())
        })
        .collect();
    to.from_terms(terms)
}

fn fresh_names(taken: &[String], stems: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(stems.len());
    for stem in stems {
        let mut name = stem.clone();
        while taken.contains(&name) || out.contains(&name) {
            name.push('_');
        }
        out.push(name);
    }
    out
}

/// A → C = A[X]/(p) → B = C[c⁻¹] with p monic: the local normal form of
/// an étale map. `coeffs` lists c₀..c_d of p = Σ cⱼXʲ; C is free of rank
/// d over A with basis 1, X, …, X^{d−1} because p is monic.
#[derive(Debug, Clone)]
pub struct StandardEtaleData {
    pub base: PolyAlgebra,
    pub coeffs: Vec<Poly>,
    pub degree: usize,
    pub quotient: PolyAlgebra,
    /// index of the adjoined variable inside `quotient`
    pub x_var: usize,
    /// the open element c ∈ C; B = C[c⁻¹]
    pub open_c: Poly,
}

impl StandardEtaleData {
    /// Builds C from the coefficient list; the open element defaults to 1
    /// (use `with_open` to localize further).
    pub fn new(base: PolyAlgebra, coeffs: Vec<Poly>) -> Result<StandardEtaleData> {
        if base.ring.weights.is_some() {
            return Err(Error::Unsupported("étale data over weighted rings".into()));
        }
        if coeffs.len() < 2 {
            return Err(Error::DegenerateInput("polynomial must have degree ≥ 1".into()));
        }
        let d = coeffs.len() - 1;
        let lead = base.normal_form(&coeffs[d]);
        if lead.as_constant(base.field()).map_or(true, |c| !c.is_one()) {
            return Err(Error::NotMonic(base.ring.fmt_poly(&coeffs[d])));
        }
        let n = base.ring.nvars();
        let xname = fresh_names(&base.ring.vars, &["X".to_string()]).pop().unwrap();
        let mut vars = base.ring.vars.clone();
        vars.push(xname);
        let ring = PolyRing::new(base.field(), vars, base.ring.order);
        let map: Vec<usize> = (0..n).collect();
        let x = ring.var(n);
        let mut p = ring.zero();
        for (j, cj) in coeffs.iter().enumerate() {
            p = ring.add(&p, &ring.mul(&lift_poly(&ring, &map, cj), &ring.pow(&x, j as u32)));
        }
        let mut relations: Vec<Poly> =
            base.relations.iter().map(|r| lift_poly(&ring, &map, r)).collect();
        relations.push(p);
        let quotient = PolyAlgebra::new(ring, relations)?;
        let open_c = quotient.ring.one();
        Ok(StandardEtaleData { base, coeffs, degree: d, quotient, x_var: n, open_c })
    }

    /// Sets the open element (an element of the quotient's ring).
    pub fn with_open(mut self, c: Poly) -> Result<StandardEtaleData> {
        let nf = self.quotient.normal_form(&c);
        if nf.is_zero() {
            return Err(Error::ZeroLocalization);
        }
        self.open_c = nf;
        Ok(self)
    }

    /// B = C[c⁻¹] as a finitely presented algebra.
    pub fn localization(&self) -> Result<PolyAlgebra> {
        Ok(self.quotient.localize(&self.open_c)?.algebra)
    }

    /// The finite free map A → C with basis 1, X, …, X^{d−1}.
    pub fn pushforward_data(&self) -> Result<FiniteFlatData> {
        let x = self.quotient.ring.var(self.x_var);
        let basis: Vec<Poly> =
            (0..self.degree).map(|j| self.quotient.ring.pow(&x, j as u32)).collect();
        FiniteFlatData::new(self.base.clone(), self.quotient.clone(), basis)
    }
}

/// C′ = A[x₁..x_d]/(eᵢ(x) − (−1)ⁱ c_{d−i}), the universal splitting of a
/// monic p over A, with its Σ_d action by permuting roots. Rank d! is
/// certified by counting Gröbner normal forms.
#[derive(Debug, Clone)]
pub struct SplittingAlgebra {
    pub base: PolyAlgebra,
    pub degree: usize,
    /// root variables first, base variables after them
    pub algebra: PolyAlgebra,
    pub rank: usize,
    /// the certified monomial basis over A, ascending
    pub basis: Vec<Monomial>,
    /// Σ_d in one-line notation, lexicographic order
    pub perms: Vec<Vec<usize>>,
    /// index of base variable i inside `algebra`'s ring
    pub base_var_map: Vec<usize>,
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in 0..d {
            if !cur.contains(&i) {
                cur.push(i);
                rec(d, cur, out);
                cur.pop();
            }
        }
    }
    rec(d, &mut cur, &mut out);
    out
}

fn elementary_symmetric(ring: &PolyRing, d: usize, i: usize) -> Poly {
    // sum over i-subsets of {0..d} of ∏ x_j
    let mut acc = ring.zero();
    let mut subset: Vec<usize> = (0..i).collect();
    if i == 0 {
        return ring.one();
    }
    loop {
        let mut prod = ring.one();
        for &j in &subset {
            prod = ring.mul(&prod, &ring.var(j));
        }
        acc = ring.add(&acc, &prod);
        // next i-subset of {0..d-1}
        let mut k = i;
        loop {
            if k == 0 {
                return acc;
            }
            k -= 1;
            if subset[k] + 1 <= d - (i - k) {
                subset[k] += 1;
                for l in k + 1..i {
                    subset[l] = subset[l - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Builds the splitting algebra of the monic p = Σ coeffs[j]·Xʲ over A
/// (coeffs has length d+1 with leading coefficient 1), certifying rank
/// d!, the factorization p(X) = ∏(X − xᵢ), and the Σ_d action.
pub fn splitting_algebra(base: &PolyAlgebra, coeffs: &[Poly]) -> Result<SplittingAlgebra> {
    if base.ring.weights.is_some() {
        return Err(Error::Unsupported("splitting algebras over weighted rings".into()));
    }
    if coeffs.len() < 2 {
        return Err(Error::DegenerateInput("polynomial must have degree ≥ 1".into()));
    }
    let d = coeffs.len() - 1;
    if d > SPLITTING_DEGREE_CAP {
        return Err(Error::CapExceeded(format!(
            "splitting degree {d} exceeds cap {SPLITTING_DEGREE_CAP} (rank d!)"
        )));
    }
    let lead = base.normal_form(&coeffs[d]);
    if lead.as_constant(base.field()).map_or(true, |c| !c.is_one()) {
        return Err(Error::NotMonic(base.ring.fmt_poly(&coeffs[d])));
    }
    let field = base.field();
    let n = base.ring.nvars();
    // root variables precede the base variables so that the certified
    // normal-form basis is read off from pure root-monomial leading terms
    let stems: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let xnames = fresh_names(&base.ring.vars, &stems);
    let mut vars = xnames;
    vars.extend(base.ring.vars.iter().cloned());
    let ring = PolyRing::new(field, vars, base.ring.order);
    let base_var_map: Vec<usize> = (0..n).map(|i| d + i).collect();
    let mut relations: Vec<Poly> =
        base.relations.iter().map(|r| lift_poly(&ring, &base_var_map, r)).collect();
    for i in 1..=d {
        let sign = field.from_i64(if i % 2 == 1 { -1 } else { 1 });
        let target = ring.scale(&lift_poly(&ring, &base_var_map, &coeffs[d - i]), &sign);
        relations.push(ring.sub(&elementary_symmetric(&ring, d, i), &target));
    }
    let algebra = PolyAlgebra::new(ring, relations)?;
    if algebra.is_zero_ring() {
        return Err(Error::DegenerateInput("splitting algebra collapsed to zero".into()));
    }

    // certify rank d! from the Gröbner basis: every leading term that
    // touches a root variable must be a pure root monomial (monic over A),
    // and the staircase under those terms must have exactly d! cells
    let mut pure_lts: Vec<Monomial> = Vec::new();
    for g in algebra.gb() {
        let (lt, _) = algebra.ring.lt(g).expect("GB elements are nonzero");
        let touches_root = lt.0[..d].iter().any(|&e| e > 0);
        if !touches_root {
            continue;
        }
        if lt.0[d..].iter().any(|&e| e > 0) {
            return Err(Error::Unsupported(
                "cannot certify splitting rank: mixed leading term in Gröbner basis".into(),
            ));
        }
        pure_lts.push(lt.clone());
    }
    let mut bounds = vec![0u32; d];
    for i in 0..d {
        let b = pure_lts
            .iter()
            .filter(|m| m.0[i] > 0 && m.0.iter().enumerate().all(|(j, &e)| j == i || e == 0))
            .map(|m| m.0[i])
            .min();
        match b {
            Some(b) => bounds[i] = b,
            None => {
                return Err(Error::Unsupported(format!(
                    "cannot certify splitting rank: no pure power of root {} in the staircase",
                    i + 1
                )))
            }
        }
    }
    let mut basis: Vec<Monomial> = Vec::new();
    let nv = algebra.ring.nvars();
    let mut exp = vec![0u32; d];
    'outer: loop {
        let mut e = vec![0u32; nv];
        e[..d].copy_from_slice(&exp);
        let m = Monomial(e.into_boxed_slice());
        if !pure_lts.iter().any(|lt| lt.divides(&m)) {
            basis.push(m);
        }
        // odometer over the box Π [0, bounds_i)
        for i in (0..d).rev() {
            exp[i] += 1;
            if exp[i] < bounds[i] {
                continue 'outer;
            }
            exp[i] = 0;
        }
        break;
    }
    let fact: usize = (1..=d).product();
    if basis.len() != fact {
        return Err(Error::Unsupported(format!(
            "normal-form count {} does not certify the expected rank {fact}",
            basis.len()
        )));
    }
    basis.sort_by(|a, b| algebra.ring.cmp_mono(a, b));

    // certify the factorization p(X) = ∏(X − xᵢ) coefficientwise, by
    // expanding the product from scratch in a ring with one extra variable
    let xname = fresh_names(&algebra.ring.vars, &["X".to_string()]).pop().unwrap();
    let mut bigvars = algebra.ring.vars.clone();
    bigvars.push(xname);
    let bigring = PolyRing::new(field, bigvars, algebra.ring.order);
    let bx = bigring.var(nv);
    let mut prod = bigring.one();
    for i in 0..d {
        prod = bigring.mul(&prod, &bigring.sub(&bx, &bigring.var(i)));
    }
    for j in 0..=d {
        // coefficient of X^j, read back in the splitting ring
        let terms: Vec<(Monomial, _)> = prod
            .terms
            .iter()
            .filter(|(m, _)| m.0[nv] == j as u32)
            .map(|(m, c)| (Monomial(m.0[..nv].to_vec().into_boxed_slice()), c.clone()))
            .collect();
        let cj = algebra.ring.from_terms(terms);
        let expected = lift_poly(&algebra.ring, &base_var_map, &coeffs[j]);
        if !algebra.is_zero(&algebra.ring.sub(&cj, &expected)) {
            return Err(Error::InvalidInput(format!(
                "factorization identity fails at coefficient {j}"
            )));
        }
    }

    let perms = permutations(d);
    let s = SplittingAlgebra { base: base.clone(), degree: d, algebra, rank: fact, basis, perms, base_var_map };
    // every σ must fix the defining relations (elementary symmetric
    // functions are symmetric) and compose like Σ_d
    for k in 0..s.perms.len() {
        for r in &s.algebra.relations {
            if !s.algebra.is_zero(&s.apply_sigma(k, r)) {
                return Err(Error::InvalidInput(format!(
                    "permutation {:?} is not an automorphism",
                    s.perms[k]
                )));
            }
        }
    }
    for a in 0..s.perms.len() {
        for b in 0..s.perms.len() {
            let compose: Vec<usize> = (0..d).map(|i| s.perms[a][s.perms[b][i]]).collect();
            for i in 0..d {
                let via = s.apply_sigma(a, &s.apply_sigma(b, &s.algebra.ring.var(i)));
                let direct = s.algebra.ring.var(compose[i]);
                if !s.algebra.equal(&via, &direct) {
                    return Err(Error::InvalidInput("Σ_d composition law fails".into()));
                }
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone)]
pub struct CoveringReport {
    pub covered: bool,
    pub failing_point: Option<PointSpec>,
    pub points_checked: usize,
    /// the check samples the supplied points; it is not an
    /// ideal-theoretic covering certificate
    pub point_sampled: bool,
}

impl SplittingAlgebra {
    /// σₖ applied to f: roots permuted, base variables fixed, reduced.
    pub fn apply_sigma(&self, k: usize, f: &Poly) -> Poly {
        let perm = &self.perms[k];
        let d = self.degree;
        let terms = f
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.to_vec();
                for i in 0..d {
                    e[perm[i]] = m.0[i];
                }
                (Monomial(e.into_boxed_slice()), c.clone())
            })
            .collect();
        self.algebra.normal_form(&self.algebra.ring.from_terms(terms))
    }

    /// The basis monomials as ring elements.
    pub fn basis_polys(&self) -> Vec<Poly> {
        self.basis
            .iter()
            .map(|m| self.algebra.ring.monomial(m.clone(), self.algebra.field().one()))
            .collect()
    }

    /// The finite free map A → C′ over the certified basis.
    pub fn pushforward_data(&self) -> Result<FiniteFlatData> {
        FiniteFlatData::new(self.base.clone(), self.algebra.clone(), self.basis_polys())
    }

    /// Do the opens σ(B′) = {σ(c) ≠ 0}, σ ∈ Σ_d, cover the supplied
    /// points? Point-sampled: answers only for the sample.
    pub fn sigma_orbit_covering_check(
        &self,
        c: &Poly,
        points: &[PointSpec],
    ) -> Result<CoveringReport> {
        let orbit: Vec<Poly> = (0..self.perms.len()).map(|k| self.apply_sigma(k, c)).collect();
        let mut checked = 0;
        for pt in points {
            self.algebra.validate_point(pt)?;
            checked += 1;
            let mut hit = false;
            for g in &orbit {
                let nonzero = match pt {
                    PointSpec::Base { coords, .. } => {
                        !eval_poly_base(&self.algebra.ring, g, coords)?.is_zero()
                    }
                    PointSpec::Ext { def, coords } => {
                        !def.is_zero_elem(&eval_poly_ext(&self.algebra.ring, g, def, coords)?)
                    }
                };
                if nonzero {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(CoveringReport {
                    covered: false,
                    failing_point: Some(pt.clone()),
                    points_checked: checked,
                    point_sampled: true,
                });
            }
        }
        Ok(CoveringReport { covered: true, failing_point: None, points_checked: checked, point_sampled: true })
    }
}

/// A finite free ring map A → B with a chosen A-basis of B. Expansion of
/// B-elements over the basis is by triangular elimination on the
/// extension-variable staircase; every basis element must lead with a
/// distinct extension monomial carrying a unit constant coefficient
/// (this certifies A-linear independence; spanning failures surface as
/// BasisError at expansion time).
#[derive(Debug, Clone)]
pub struct FiniteFlatData {
    pub source: PolyAlgebra,
    pub target: PolyAlgebra,
    pub basis: Vec<Poly>,
    /// target index of each source variable (matched by name)
    var_map: Vec<usize>,
    /// target variables not coming from the source
    is_ext: Vec<bool>,
    /// per basis element: leading extension monomial (in the target
    /// ring's order), its unit coefficient, and the full split form
    table: Vec<(Monomial, crate::scalars::FieldElement, BTreeMap<Monomial, Poly>)>,
}

impl FiniteFlatData {
    pub fn new(source: PolyAlgebra, target: PolyAlgebra, basis: Vec<Poly>) -> Result<FiniteFlatData> {
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                source.field(),
                target.field()
            )));
        }
        if source.ring.weights.is_some() || target.ring.weights.is_some() {
            return Err(Error::Unsupported("finite-flat pushforward over weighted rings".into()));
        }
        if basis.is_empty() {
            return Err(Error::BasisError("empty basis".into()));
        }
        let mut var_map = Vec::with_capacity(source.ring.nvars());
        for name in &source.ring.vars {
            match target.ring.var_index(name) {
                Some(i) => var_map.push(i),
                None => {
                    return Err(Error::RingMismatch(format!(
                        "source variable {name} does not appear in the target ring"
                    )))
                }
            }
        }
        let mut is_ext = vec![true; target.ring.nvars()];
        for &i in &var_map {
            is_ext[i] = false;
        }
        // the map must send the source relations to zero
        for r in &source.relations {
            let lifted = lift_poly(&target.ring, &var_map, r);
            if !target.is_zero(&lifted) {
                return Err(Error::RingMismatch(format!(
                    "source relation {} does not vanish in the target",
                    source.ring.fmt_poly(r)
                )));
            }
        }
        let mut data =
            FiniteFlatData { source, target, basis, var_map, is_ext, table: Vec::new() };
        for b in &data.basis {
            let nf = data.target.normal_form(b);
            if nf.is_zero() {
                return Err(Error::BasisError("basis element reduces to zero".into()));
            }
            let split = data.split(&nf);
            let mu = data.ring_max(&split).cloned().unwrap();
            let lead = split.get(&mu).cloned().unwrap();
            let unit = match lead.as_constant(data.source.field()) {
                Some(c) if !c.is_zero() => c,
                _ => {
                    return Err(Error::BasisError(
                        "basis element must lead with a unit constant coefficient".into(),
                    ))
                }
            };
            if data.table.iter().any(|(m, _, _)| *m == mu) {
                return Err(Error::BasisError(
                    "two basis elements lead with the same extension monomial".into(),
                ));
            }
            data.table.push((mu, unit, split));
        }
        // the basis must at least span its own products
        for i in 0..data.basis.len() {
            for j in 0..data.basis.len() {
                let prod = data.target.ring.mul(&data.basis[i], &data.basis[j]);
                data.expand(&prod)?;
            }
        }
        Ok(data)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Split a reduced target element into extension-monomial → source
    /// coefficient form.
    fn split(&self, nf: &Poly) -> BTreeMap<Monomial, Poly> {
        // keyed by the derived Ord on exponent vectors for fast lookup;
        // every order-sensitive choice goes through `ring_max`, which
        // honours the target ring's monomial order, so elimination
        // strictly descends in that order and terminates
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        let tn = self.target.ring.nvars();
        for (m, c) in &nf.terms {
            let mut ext = vec![0u32; tn];
            let mut src = vec![0u32; self.source.ring.nvars()];
            let mut ok = true;
            for v in 0..tn {
                if m.0[v] == 0 {
                    continue;
                }
                if self.is_ext[v] {
                    ext[v] = m.0[v];
                } else {
                    let si = self.var_map.iter().position(|&t| t == v);
                    match si {
                        Some(si) => src[si] = m.0[v],
                        None => ok = false,
                    }
                }
            }
            debug_assert!(ok);
            let key = Monomial(ext.into_boxed_slice());
            let term = self
                .source
                .ring
                .monomial(Monomial(src.into_boxed_slice()), c.clone());
            let entry = out.entry(key).or_insert_with(|| self.source.ring.zero());
            *entry = self.source.ring.add(entry, &term);
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn ring_max<'a>(&self, split: &'a BTreeMap<Monomial, Poly>) -> Option<&'a Monomial> {
        split.keys().max_by(|a, b| self.target.ring.cmp_mono(a, b))
    }

    /// Coordinates of f over the basis, as source-ring elements.
    pub fn expand(&self, f: &Poly) -> Result<Vec<Poly>> {
        let sring = &self.source.ring;
        let mut coords = vec![sring.zero(); self.basis.len()];
        let mut rem = self.split(&self.target.normal_form(f));
        while let Some(mu) = self.ring_max(&rem).cloned() {
            let idx = self
                .table
                .iter()
                .position(|(m, _, _)| *m == mu)
                .ok_or_else(|| {
                    Error::BasisError(format!(
                        "element is not an A-combination of the basis (stuck at {})",
                        self.target
                            .ring
                            .fmt_poly(&self.target.ring.monomial(mu.clone(), self.target.field().one()))
                    ))
                })?;
            let (_, unit, bvec) = &self.table[idx];
            let q = rem.get(&mu).cloned().unwrap_or_else(|| sring.zero());
            let c = sring.scale(&q, &unit.inv().expect("unit coefficient"));
            coords[idx] = sring.add(&coords[idx], &c);
            for (m, p) in bvec {
                let sub = sring.mul(&c, p);
                let entry = rem.entry(m.clone()).or_insert_with(|| sring.zero());
                *entry = sring.sub(entry, &sub);
                if entry.is_zero() {
                    rem.remove(m);
                }
            }
        }
        // reduce against the source relations
        Ok(coords.into_iter().map(|p| self.source.normal_form(&p)).collect())
    }

    /// The m×m matrix of multiplication by f on B, over the basis.
    pub fn regular_representation(&self, f: &Poly) -> Result<PolyMat> {
        let m = self.rank();
        let mut mat = PolyMat::zero(m, m);
        for (k, b) in self.basis.iter().enumerate() {
            let col = self.expand(&self.target.ring.mul(b, f))?;
            for (l, c) in col.into_iter().enumerate() {
                *mat.at_mut(l, k) = c;
            }
        }
        Ok(mat)
    }

    /// B^∨ = Hom_A(B, A): free of rank m over A, identified via the dual
    /// basis. p∘p^! sends an A-module to B^∨ ⊗_A −, so on the unit it is
    /// this module.
    pub fn dual_module(&self) -> FreeComplex {
        FreeComplex::free_module(self.source.clone(), self.rank())
    }

    /// Pushforward of a complex over B to a complex over A: ranks
    /// multiply by m, each differential entry becomes its regular
    /// representation block.
    pub fn pushforward(&self, e: &FreeComplex) -> Result<FreeComplex> {
        if e.base != self.target {
            return Err(Error::RingMismatch("complex is not over the target ring".into()));
        }
        if e.weights.is_some() {
            return Err(Error::Unsupported("pushforward of weighted complexes".into()));
        }
        let m = self.rank();
        if e.is_zero_complex() {
            return Ok(FreeComplex::zero_complex(self.source.clone()));
        }
        let ranks: Vec<usize> = e.ranks.iter().map(|r| r * m).collect();
        let mut diffs = Vec::with_capacity(e.diffs.len());
        for d in &e.diffs {
            let mut block = PolyMat::zero(d.rows * m, d.cols * m);
            for a in 0..d.rows {
                for b in 0..d.cols {
                    let entry = d.at(a, b);
                    if entry.is_zero() {
                        continue;
                    }
                    let rep = self.regular_representation(entry)?;
                    for l in 0..m {
                        for k in 0..m {
                            let v = rep.at(l, k);
                            if !v.is_zero() {
                                *block.at_mut(a * m + l, b * m + k) = v.clone();
                            }
                        }
                    }
                }
            }
            diffs.push(block);
        }
        let cap = e.cap.saturating_mul(m);
        FreeComplex::new_capped(self.source.clone(), e.lo, ranks, diffs, None, cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::azumaya::is_compact_generator;
    use crate::complexes::cone;
    use crate::cring::{MonomialOrder, PolyRing};
    use crate::scalars::Field;
    use crate::ChainMap;

    fn q() -> PolyAlgebra {
        PolyAlgebra::ground_field(Field::Q)
    }

    fn poly_ring(field: Field, names: &[&str]) -> PolyRing {
        PolyRing::new(field, names.iter().map(|s| s.to_string()).collect(), MonomialOrder::DegRevLex)
    }

    #[test]
    fn splitting_degree_one() {
        // p = X + a over ℚ[a]: single forced root x₁ = −a
        let a = PolyAlgebra::new(poly_ring(Field::Q, &["a"]), vec![]).unwrap();
        let coeffs = vec![a.ring.var(0), a.ring.one()];
        let s = splitting_algebra(&a, &coeffs).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.perms.len(), 1);
        let root = s.algebra.ring.var(0);
        let minus_a = s.algebra.ring.neg(&s.algebra.ring.var(1));
        assert!(s.algebra.equal(&root, &minus_a));
    }

    #[test]
    fn splitting_degree_two() {
        // p = X² + bX + c over ℚ[b,c]: rank 2, σ swaps the roots
        let a = PolyAlgebra::new(poly_ring(Field::Q, &["b", "c"]), vec![]).unwrap();
        let coeffs = vec![a.ring.var(1), a.ring.var(0), a.ring.one()];
        let s = splitting_algebra(&a, &coeffs).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(s.perms, vec![vec![0, 1], vec![1, 0]]);
        let x1 = s.algebra.ring.var(0);
        let x2 = s.algebra.ring.var(1);
        assert!(s.algebra.equal(&s.apply_sigma(1, &x1), &s.algebra.normal_form(&x2)));
        // x₁ + x₂ = −b and x₁x₂ = c hold
        let b = s.algebra.ring.var(2);
        let c = s.algebra.ring.var(3);
        let sum = s.algebra.ring.add(&x1, &x2);
        assert!(s.algebra.equal(&sum, &s.algebra.ring.neg(&b)));
        let prod = s.algebra.ring.mul(&x1, &x2);
        assert!(s.algebra.equal(&prod, &c));
    }

    #[test]
    fn splitting_degree_three_generic() {
        let a = PolyAlgebra::new(poly_ring(Field::Q, &["c0", "c1", "c2"]), vec![]).unwrap();
        let coeffs = vec![a.ring.var(0), a.ring.var(1), a.ring.var(2), a.ring.one()];
        let s = splitting_algebra(&a, &coeffs).unwrap();
        assert_eq!(s.rank, 6);
        assert_eq!(s.perms.len(), 6);
        assert_eq!(s.basis.len(), 6);
    }

    #[test]
    fn splitting_degree_four_concrete() {
        // X⁴ − 1 over F₅ splits with rank 24
        let f5 = PolyAlgebra::ground_field(Field::Fp(5));
        let m1 = f5.ring.constant(Field::Fp(5).from_i64(-1));
        let coeffs =
            vec![m1, f5.ring.zero(), f5.ring.zero(), f5.ring.zero(), f5.ring.one()];
        let s = splitting_algebra(&f5, &coeffs).unwrap();
        assert_eq!(s.rank, 24);
    }

    #[test]
    fn splitting_input_validation() {
        let a = q();
        // not monic
        let two = a.ring.constant(Field::Q.from_i64(2));
        let bad = vec![a.ring.one(), two];
        assert!(matches!(splitting_algebra(&a, &bad), Err(Error::NotMonic(_))));
        // degree too large
        let mut big = vec![a.ring.zero(); 6];
        big[5] = a.ring.one();
        assert!(matches!(splitting_algebra(&a, &big), Err(Error::CapExceeded(_))));
        // degree zero
        assert!(matches!(splitting_algebra(&a, &[a.ring.one()]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn sigma_orbit_covering() {
        // p = X² − 1 over F₅; the two F₅-points of C′ are (1,4) and (4,1)
        let f5 = PolyAlgebra::ground_field(Field::Fp(5));
        let m1 = f5.ring.constant(Field::Fp(5).from_i64(-1));
        let coeffs = vec![m1, f5.ring.zero(), f5.ring.one()];
        let s = splitting_algebra(&f5, &coeffs).unwrap();
        assert_eq!(s.rank, 2);
        let points = s.algebra.enumerate_points(None, 1000).unwrap();
        assert_eq!(points.len(), 2);
        // derivative-based open: c = p′(x₁) = 2x₁
        let two = s.algebra.ring.constant(Field::Fp(5).from_i64(2));
        let c = s.algebra.ring.mul(&two, &s.algebra.ring.var(0));
        let rep = s.sigma_orbit_covering_check(&c, &points).unwrap();
        assert!(rep.covered && rep.point_sampled);
        assert_eq!(rep.points_checked, 2);
        // the unit covers vacuously; zero covers nothing
        let rep = s.sigma_orbit_covering_check(&s.algebra.ring.one(), &points).unwrap();
        assert!(rep.covered);
        let rep = s.sigma_orbit_covering_check(&s.algebra.ring.zero(), &points).unwrap();
        assert!(!rep.covered);
        assert!(rep.failing_point.is_some());
        assert_eq!(rep.points_checked, 1);
    }

    #[test]
    fn standard_etale_shape() {
        let f5 = PolyAlgebra::ground_field(Field::Fp(5));
        let m1 = f5.ring.constant(Field::Fp(5).from_i64(-1));
        let coeffs = vec![m1, f5.ring.zero(), f5.ring.one()];
        let data = StandardEtaleData::new(f5, coeffs).unwrap();
        assert_eq!(data.degree, 2);
        // open = derivative 2X
        let two = data.quotient.ring.constant(Field::Fp(5).from_i64(2));
        let c = data.quotient.ring.mul(&two, &data.quotient.ring.var(data.x_var));
        let data = data.with_open(c).unwrap();
        let b = data.localization().unwrap();
        // B has points X = ±1 with 2X ≠ 0 there
        let pts = b.enumerate_points(None, 100).unwrap();
        assert_eq!(pts.len(), 2);
        let pf = data.pushforward_data().unwrap();
        assert_eq!(pf.rank(), 2);
        // not monic rejected
        let f5 = PolyAlgebra::ground_field(Field::Fp(5));
        let two = f5.ring.constant(Field::Fp(5).from_i64(2));
        assert!(matches!(
            StandardEtaleData::new(f5, vec![two.clone(), two]),
            Err(Error::NotMonic(_))
        ));
    }

    #[test]
    fn pushforward_split_algebra() {
        // B = A², presented as A[w]/(w² − w), basis {1, w}
        let a = q();
        let ring = poly_ring(Field::Q, &["w"]);
        let w = ring.var(0);
        let rel = ring.sub(&ring.mul(&w, &w), &w);
        let b = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let basis = vec![b.ring.one(), b.ring.var(0)];
        let data = FiniteFlatData::new(a, b.clone(), basis).unwrap();
        let unit = FreeComplex::unit(b);
        let pf = data.pushforward(&unit).unwrap();
        assert_eq!(pf.ranks, vec![2]);
        assert!(pf.diffs.is_empty());
        assert_eq!(data.dual_module().ranks, vec![2]);
    }

    #[test]
    fn pushforward_regular_representation() {
        // B = ℚ[x]/(x²−1) over ℚ, E = cone(×(x−1)): the pushforward
        // differential is the regular-representation matrix of x−1
        let a = q();
        let ring = poly_ring(Field::Q, &["x"]);
        let x = ring.var(0);
        let rel = ring.sub(&ring.mul(&x, &x), &ring.one());
        let b = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let x = b.ring.var(0);
        let basis = vec![b.ring.one(), x.clone()];
        let data = FiniteFlatData::new(a.clone(), b.clone(), basis).unwrap();
        let f = b.ring.sub(&x, &b.ring.one());
        let e = cone(&ChainMap::mul_by(&FreeComplex::unit(b), &f)).unwrap();
        let pf = data.pushforward(&e).unwrap();
        assert_eq!(pf.ranks, vec![2, 2]);
        let d = pf.diff(-1);
        let q1 = Field::Q.from_i64(1);
        let qm1 = Field::Q.from_i64(-1);
        assert_eq!(d.at(0, 0).as_constant(Field::Q), Some(qm1.clone()));
        assert_eq!(d.at(0, 1).as_constant(Field::Q), Some(q1.clone()));
        assert_eq!(d.at(1, 0).as_constant(Field::Q), Some(q1));
        assert_eq!(d.at(1, 1).as_constant(Field::Q), Some(qm1));
    }

    #[test]
    fn pushforward_preserves_generators() {
        // A = F₅[t], B = A[x]/(x²−1): E = cone(×(x−1)) ⊕ cone(×(x+1))
        // generates over B (support ideal (x²−1) = 0), and its pushforward
        // generates over A
        let a = PolyAlgebra::new(poly_ring(Field::Fp(5), &["t"]), vec![]).unwrap();
        let ring = poly_ring(Field::Fp(5), &["t", "x"]);
        let x = ring.var(1);
        let rel = ring.sub(&ring.mul(&x, &x), &ring.one());
        let b = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let x = b.ring.var(1);
        let basis = vec![b.ring.one(), x.clone()];
        let data = FiniteFlatData::new(a.clone(), b.clone(), basis).unwrap();
        let unit = FreeComplex::unit(b.clone());
        let e1 = cone(&ChainMap::mul_by(&unit, &b.ring.sub(&x, &b.ring.one()))).unwrap();
        let e2 = cone(&ChainMap::mul_by(&unit, &b.ring.add(&x, &b.ring.one()))).unwrap();
        let e = e1.direct_sum(&e2).unwrap();
        let (gen_b, _) = is_compact_generator(&e).unwrap();
        assert!(gen_b, "E generates over B");
        let pf = data.pushforward(&e).unwrap();
        assert_eq!(pf.ranks, vec![4, 4]);
        let (gen_a, _) = is_compact_generator(&pf).unwrap();
        assert!(gen_a, "pushforward generates over A");
        // a non-generator stays non-generating here: support V(t)
        let t = b.ring.var(0);
        let bad = cone(&ChainMap::mul_by(&unit, &t)).unwrap();
        let (g, _) = is_compact_generator(&bad).unwrap();
        assert!(!g);
        let (g, _) = is_compact_generator(&data.pushforward(&bad).unwrap()).unwrap();
        assert!(!g);
    }

    #[test]
    fn pushforward_fiber_dimensions_commute() {
        // evaluate(pushforward(E), t=c) has total homology dimension equal
        // to the sum over the two fiber points of B above t=c
        let a = PolyAlgebra::new(poly_ring(Field::Fp(5), &["t"]), vec![]).unwrap();
        let ring = poly_ring(Field::Fp(5), &["t", "x"]);
        let x = ring.var(1);
        let rel = ring.sub(&ring.mul(&x, &x), &ring.one());
        let b = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let x = b.ring.var(1);
        let t = b.ring.var(0);
        let basis = vec![b.ring.one(), x.clone()];
        let data = FiniteFlatData::new(a.clone(), b.clone(), basis).unwrap();
        let unit = FreeComplex::unit(b.clone());
        // E = cone(×(t·(x−1))): homology varies across the fibers
        let f = b.ring.mul(&t, &b.ring.sub(&x, &b.ring.one()));
        let e = cone(&ChainMap::mul_by(&unit, &f)).unwrap();
        let pf = data.pushforward(&e).unwrap();
        let f5 = Field::Fp(5);
        for tval in 0..5 {
            let apt = PointSpec::Base { field: f5, coords: vec![f5.from_i64(tval)] };
            let (pf_fiber, _) = pf.evaluate_at_point(&apt).unwrap();
            let pf_dim: usize = pf_fiber
                .homology()
                .unwrap()
                .degrees
                .iter()
                .map(|d| d.dimension.unwrap())
                .sum();
            let mut fiber_dim = 0usize;
            for xval in [1i64, 4] {
                let bpt = PointSpec::Base {
                    field: f5,
                    coords: vec![f5.from_i64(tval), f5.from_i64(xval)],
                };
                let (ef, _) = e.evaluate_at_point(&bpt).unwrap();
                fiber_dim += ef
                    .homology()
                    .unwrap()
                    .degrees
                    .iter()
                    .map(|d| d.dimension.unwrap())
                    .sum::<usize>();
            }
            assert_eq!(pf_dim, fiber_dim, "at t = {tval}");
        }
    }

    #[test]
    fn splitting_pushforward_roundtrip() {
        // the rank-2 splitting algebra of X² − 1 over F₅, pushed forward
        let f5 = PolyAlgebra::ground_field(Field::Fp(5));
        let m1 = f5.ring.constant(Field::Fp(5).from_i64(-1));
        let coeffs = vec![m1, f5.ring.zero(), f5.ring.one()];
        let s = splitting_algebra(&f5, &coeffs).unwrap();
        let data = s.pushforward_data().unwrap();
        assert_eq!(data.rank(), 2);
        let unit = FreeComplex::unit(s.algebra.clone());
        let pf = data.pushforward(&unit).unwrap();
        assert_eq!(pf.ranks, vec![2]);
        let (g, _) = is_compact_generator(&pf).unwrap();
        assert!(g);
    }

    #[test]
    fn bad_bases_rejected() {
        let a = q();
        let ring = poly_ring(Field::Q, &["x"]);
        let x = ring.var(0);
        let rel = ring.sub(&ring.mul(&x, &x), &ring.one());
        let b = PolyAlgebra::new(ring, vec![rel]).unwrap();
        // duplicate leading monomials
        let x = b.ring.var(0);
        let two_x = b.ring.scale(&x, &Field::Q.from_i64(2));
        assert!(matches!(
            FiniteFlatData::new(a.clone(), b.clone(), vec![x.clone(), two_x]),
            Err(Error::BasisError(_))
        ));
        // non-spanning basis: products stay inside, but expansion of the
        // differential entry fails at pushforward time
        let data = FiniteFlatData::new(a.clone(), b.clone(), vec![b.ring.one()]).unwrap();
        let f = b.ring.sub(&x, &b.ring.one());
        let e = cone(&ChainMap::mul_by(&FreeComplex::unit(b.clone()), &f)).unwrap();
        assert!(matches!(data.pushforward(&e), Err(Error::BasisError(_))));
        // source variable missing in the target
        let c = PolyAlgebra::new(poly_ring(Field::Q, &["y"]), vec![]).unwrap();
        assert!(matches!(
            FiniteFlatData::new(c, b.clone(), vec![b.ring.one()]),
            Err(Error::RingMismatch(_))
        ));
    }
}
