//! Bounded complexes of finite free A-modules: shift, cone, tensor,
//! internal Hom, Koszul complexes, homology presentations and
//! quasi-isomorphism verdicts.
//!
//! Conventions (fixed once, everything downstream depends on them):
//! cohomological indexing with d raising degree; cone(φ: C→D)^n =
//! C^{n+1} ⊕ D^n with d = [[−d_C, 0],[φ, d_D]]; Koszul signs
//! d(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy and δ(f) = d∘f − (−1)^{|f|} f∘d.

use crate::cring::modules::QuotientModule;
use crate::cring::{
    eval_poly_base, eval_poly_ext, ExtFieldDef, Poly, PointSpec, PolyAlgebra, PolyRing,
    SubmodulePresentation,
};
use crate::scalars::{Field, Matrix};
use crate::{Error, Result};
use rayon::prelude::*;

/// Default bound on the total rank of any single complex.
pub const DEFAULT_RANK_CAP: usize = 512;

/// A matrix of polynomials (row-major), the raw material of differentials
/// and chain maps. Shape 0×n and n×0 matrices are legal and common.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMat {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Poly>,
}

impl PolyMat {
    pub fn zero(rows: usize, cols: usize) -> PolyMat {
        PolyMat { rows, cols, entries: vec![Poly { terms: Vec::new() }; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> PolyMat {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMat { rows, cols, entries }
    }

    pub fn identity(ring: &PolyRing, n: usize) -> PolyMat {
        PolyMat::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    /// f · I_n.
    pub fn scalar(ring: &PolyRing, n: usize, f: &Poly) -> PolyMat {
        PolyMat::from_fn(n, n, |i, j| if i == j { f.clone() } else { ring.zero() })
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Poly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn map(&self, mut f: impl FnMut(&Poly) -> Poly) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| f(p)).collect(),
        }
    }

    pub fn transpose(&self) -> PolyMat {
        PolyMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, ring: &PolyRing, other: &PolyMat) -> PolyMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        PolyMat::from_fn(self.rows, self.cols, |i, j| ring.add(self.at(i, j), other.at(i, j)))
    }

    pub fn sub(&self, ring: &PolyRing, other: &PolyMat) -> PolyMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        PolyMat::from_fn(self.rows, self.cols, |i, j| ring.sub(self.at(i, j), other.at(i, j)))
    }

    pub fn neg(&self, ring: &PolyRing) -> PolyMat {
        self.map(|p| ring.neg(p))
    }

    pub fn mul(&self, ring: &PolyRing, other: &PolyMat) -> PolyMat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        PolyMat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = ring.zero();
            for k in 0..self.cols {
                acc = ring.add(&acc, &ring.mul(self.at(i, k), other.at(k, j)));
            }
            acc
        })
    }

    pub fn scale(&self, ring: &PolyRing, f: &Poly) -> PolyMat {
        self.map(|p| ring.mul(p, f))
    }

    /// Assemble from a grid of blocks; row heights/column widths are taken
    /// from the blocks and must be consistent.
    pub fn from_blocks(blocks: &[Vec<&PolyMat>]) -> PolyMat {
        let block_rows: Vec<usize> = blocks.iter().map(|r| r[0].rows).collect();
        let block_cols: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        for (bi, row) in blocks.iter().enumerate() {
            assert_eq!(row.len(), block_cols.len());
            for (bj, b) in row.iter().enumerate() {
                assert_eq!(b.rows, block_rows[bi], "block row height mismatch");
                assert_eq!(b.cols, block_cols[bj], "block col width mismatch");
            }
        }
        let rows: usize = block_rows.iter().sum();
        let cols: usize = block_cols.iter().sum();
        let mut out = PolyMat::zero(rows, cols);
        let mut roff = 0;
        for (bi, row) in blocks.iter().enumerate() {
            let mut coff = 0;
            for (bj, b) in row.iter().enumerate() {
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        *out.at_mut(roff + i, coff + j) = b.at(i, j).clone();
                    }
                }
                coff += block_cols[bj];
            }
            roff += block_rows[bi];
        }
        out
    }

    /// Entrywise evaluation at a base-field point.
    pub fn eval_base(&self, ring: &PolyRing, coords: &[crate::scalars::FieldElement]) -> Result<Matrix> {
        let field = ring.field;
        let mut out = Matrix::zero(field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(i, j) = eval_poly_base(ring, self.at(i, j), coords)?;
            }
        }
        Ok(out)
    }

    /// Entrywise evaluation at an F_{p^k}-point via k×k multiplication
    /// blocks over F_p; the result is (rows·k) × (cols·k).
    pub fn eval_ext(
        &self,
        ring: &PolyRing,
        def: &ExtFieldDef,
        coords: &[crate::cring::ExtElem],
    ) -> Result<Matrix> {
        let k = def.degree();
        let field = Field::Fp(def.p);
        let mut out = Matrix::zero(field, self.rows * k, self.cols * k);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = eval_poly_ext(ring, self.at(i, j), def, coords)?;
                let block = def.companion_block(&v);
                for a in 0..k {
                    for b in 0..k {
                        *out.at_mut(i * k + a, j * k + b) = block.at(a, b).clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Over a ground-field base every entry is a constant: extract the
    /// scalar matrix.
    pub fn to_scalar(&self, field: Field) -> Result<Matrix> {
        let mut out = Matrix::zero(field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(i, j) = self.at(i, j).as_constant(field).ok_or_else(|| {
                    Error::Unsupported("matrix entry is not a constant".into())
                })?;
            }
        }
        Ok(out)
    }
}

/// A bounded complex of finite free A-modules, cohomologically indexed:
/// slot i holds C^{lo+i} and `diffs[i]` is d: C^{lo+i} → C^{lo+i+1}
/// (shape ranks[i+1] × ranks[i], acting on column vectors).
///
/// `weights` optionally assigns an ambient-grading weight to every basis
/// element (used by the graded Čech machinery); when present, the base
/// ring must be weighted and all differential entries weight-homogeneous.
///
/// `cap` bounds the total rank; it is carried forward through operations
/// (max of the operands) and deliberately excluded from equality.
#[derive(Debug, Clone)]
pub struct FreeComplex {
    pub base: PolyAlgebra,
    pub lo: i64,
    pub ranks: Vec<usize>,
    pub diffs: Vec<PolyMat>,
    pub weights: Option<Vec<Vec<i64>>>,
    pub cap: usize,
}

impl PartialEq for FreeComplex {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.lo == other.lo
            && self.ranks == other.ranks
            && self.diffs == other.diffs
            && self.weights == other.weights
    }
}

impl FreeComplex {
    pub fn new(
        base: PolyAlgebra,
        lo: i64,
        ranks: Vec<usize>,
        diffs: Vec<PolyMat>,
        weights: Option<Vec<Vec<i64>>>,
    ) -> Result<FreeComplex> {
        FreeComplex::new_capped(base, lo, ranks, diffs, weights, DEFAULT_RANK_CAP)
    }

    pub fn new_capped(
        base: PolyAlgebra,
        lo: i64,
        ranks: Vec<usize>,
        diffs: Vec<PolyMat>,
        weights: Option<Vec<Vec<i64>>>,
        cap: usize,
    ) -> Result<FreeComplex> {
        if diffs.len() + 1 != ranks.len() && !(ranks.is_empty() && diffs.is_empty()) {
            return Err(Error::ShapeError(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                diffs.len()
            )));
        }
        let total: usize = ranks.iter().sum();
        if total > cap {
            return Err(Error::CapExceeded(format!(
                "complex total rank {total} exceeds cap {cap}"
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.rows != ranks[i + 1] || d.cols != ranks[i] {
                return Err(Error::ShapeError(format!(
                    "differential at degree {} has shape {}×{}, expected {}×{}",
                    lo + i as i64,
                    d.rows,
                    d.cols,
                    ranks[i + 1],
                    ranks[i]
                )));
            }
        }
        // canonicalize entries mod the relation ideal
        let diffs: Vec<PolyMat> = diffs.iter().map(|d| d.map(|p| base.normal_form(p))).collect();
        // d² = 0
        for w in 0..diffs.len().saturating_sub(1) {
            let comp = diffs[w + 1].mul(&base.ring, &diffs[w]);
            if !comp.map(|p| base.normal_form(p)).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "d∘d ≠ 0 between degrees {} and {}",
                    lo + w as i64,
                    lo + w as i64 + 2
                )));
            }
        }
        if let Some(w) = &weights {
            if base.ring.weights.is_none() {
                return Err(Error::InvalidInput(
                    "basis weights given, but the base ring is unweighted".into(),
                ));
            }
            if w.len() != ranks.len() {
                return Err(Error::ShapeError("one weight row per degree required".into()));
            }
            for (i, row) in w.iter().enumerate() {
                if row.len() != ranks[i] {
                    return Err(Error::ShapeError(format!(
                        "degree {} has {} weights for rank {}",
                        lo + i as i64,
                        row.len(),
                        ranks[i]
                    )));
                }
            }
            for (s, d) in diffs.iter().enumerate() {
                for i in 0..d.rows {
                    for j in 0..d.cols {
                        let expected = w[s + 1][i] - w[s][j];
                        match base.ring.homogeneous_weight(d.at(i, j))? {
                            None => {}
                            Some(got) if got == expected => {}
                            Some(got) => {
                                return Err(Error::InvalidInput(format!(
                                    "differential entry at degree {} ({},{}) has weight {got}, expected {expected}",
                                    lo + s as i64, i, j
                                )))
                            }
                        }
                    }
                }
            }
        }
        let mut c = FreeComplex { base, lo, ranks, diffs, weights, cap };
        c.trim();
        Ok(c)
    }

    /// Drop zero-rank slots at both ends so structurally equal complexes
    /// compare equal; the zero complex normalizes to `lo = 0, ranks = []`.
    fn trim(&mut self) {
        while self.ranks.first() == Some(&0) {
            self.ranks.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            if let Some(w) = &mut self.weights {
                w.remove(0);
            }
            self.lo += 1;
        }
        while self.ranks.last() == Some(&0) {
            self.ranks.pop();
            self.diffs.pop();
            if let Some(w) = &mut self.weights {
                w.pop();
            }
        }
        if self.ranks.is_empty() {
            self.lo = 0;
            self.diffs.clear();
            self.weights = None;
        }
    }

    /// The zero complex.
    pub fn zero_complex(base: PolyAlgebra) -> FreeComplex {
        FreeComplex { base, lo: 0, ranks: Vec::new(), diffs: Vec::new(), weights: None, cap: DEFAULT_RANK_CAP }
    }

    /// A itself, in degree 0.
    pub fn unit(base: PolyAlgebra) -> FreeComplex {
        FreeComplex {
            base,
            lo: 0,
            ranks: vec![1],
            diffs: Vec::new(),
            weights: None,
            cap: DEFAULT_RANK_CAP,
        }
    }

    /// A free module of the given rank, in degree 0.
    pub fn free_module(base: PolyAlgebra, rank: usize) -> FreeComplex {
        FreeComplex {
            base,
            lo: 0,
            ranks: vec![rank],
            diffs: Vec::new(),
            weights: None,
            cap: DEFAULT_RANK_CAP,
        }
    }

    pub fn is_zero_complex(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    fn idx(&self, n: i64) -> Option<usize> {
        if n < self.lo || self.ranks.is_empty() || n > self.hi() {
            None
        } else {
            Some((n - self.lo) as usize)
        }
    }

    pub fn rank(&self, n: i64) -> usize {
        self.idx(n).map(|i| self.ranks[i]).unwrap_or(0)
    }

    /// d: C^n → C^{n+1}, zero-shaped outside the stored range.
    pub fn diff(&self, n: i64) -> PolyMat {
        match self.idx(n) {
            Some(i) if i + 1 < self.ranks.len() => self.diffs[i].clone(),
            _ => PolyMat::zero(self.rank(n + 1), self.rank(n)),
        }
    }

    pub fn weight_row(&self, n: i64) -> Option<&[i64]> {
        match (&self.weights, self.idx(n)) {
            (Some(w), Some(i)) => Some(&w[i]),
            _ => None,
        }
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for (i, &r) in self.ranks.iter().enumerate() {
            let n = self.lo + i as i64;
            chi += if n.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) };
        }
        chi
    }

    /// C[n]^i = C^{i+n}, differential scaled by (−1)^n.
    pub fn shift(&self, n: i64) -> FreeComplex {
        let sign_flip = n.rem_euclid(2) == 1;
        let diffs = self
            .diffs
            .iter()
            .map(|d| if sign_flip { d.neg(&self.base.ring) } else { d.clone() })
            .collect();
        let mut c = FreeComplex {
            base: self.base.clone(),
            lo: self.lo - n,
            ranks: self.ranks.clone(),
            diffs,
            weights: self.weights.clone(),
            cap: self.cap,
        };
        c.trim();
        c
    }

    pub fn direct_sum(&self, other: &FreeComplex) -> Result<FreeComplex> {
        if self.base != other.base {
            return Err(Error::RingMismatch("direct sum over different base rings".into()));
        }
        if self.is_zero_complex() {
            return Ok(other.clone());
        }
        if other.is_zero_complex() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let ranks: Vec<usize> = (lo..=hi).map(|n| self.rank(n) + other.rank(n)).collect();
        let diffs: Vec<PolyMat> = (lo..hi)
            .map(|n| {
                let a = self.diff(n);
                let b = other.diff(n);
                let z1 = PolyMat::zero(a.rows, b.cols);
                let z2 = PolyMat::zero(b.rows, a.cols);
                PolyMat::from_blocks(&[vec![&a, &z1], vec![&z2, &b]])
            })
            .collect();
        let weights = match (&self.weights, &other.weights) {
            (Some(_), Some(_)) => Some(
                (lo..=hi)
                    .map(|n| {
                        let mut row: Vec<i64> =
                            self.weight_row(n).map(|r| r.to_vec()).unwrap_or_default();
                        row.extend(other.weight_row(n).map(|r| r.to_vec()).unwrap_or_default());
                        row
                    })
                    .collect(),
            ),
            _ => None,
        };
        FreeComplex::new_capped(
            self.base.clone(),
            lo,
            ranks,
            diffs,
            weights,
            self.cap.max(other.cap),
        )
    }

    /// Entrywise evaluation at a point: the derived fiber complex over the
    /// residue field, plus the extension degree k (dimensions over F_{p^k}
    /// are the reported F_p-dimensions divided by k).
    pub fn evaluate_at_point(&self, pt: &PointSpec) -> Result<(FreeComplex, usize)> {
        self.base.validate_point(pt)?;
        match pt {
            PointSpec::Base { field, coords } => {
                let ground = PolyAlgebra::ground_field(*field);
                let ranks = self.ranks.clone();
                let diffs: Vec<PolyMat> = self
                    .diffs
                    .iter()
                    .map(|d| {
                        let m = d.eval_base(&self.base.ring, coords)?;
                        Ok(PolyMat::from_fn(m.rows, m.cols, |i, j| {
                            ground.ring.constant(m.at(i, j).clone())
                        }))
                    })
                    .collect::<Result<_>>()?;
                let c = FreeComplex::new_capped(ground, self.lo, ranks, diffs, None, self.cap)?;
                Ok((c, 1))
            }
            PointSpec::Ext { def, coords } => {
                let k = def.degree();
                let ground = PolyAlgebra::ground_field(Field::Fp(def.p));
                let ranks: Vec<usize> = self.ranks.iter().map(|r| r * k).collect();
                let diffs: Vec<PolyMat> = self
                    .diffs
                    .iter()
                    .map(|d| {
                        let m = d.eval_ext(&self.base.ring, def, coords)?;
                        Ok(PolyMat::from_fn(m.rows, m.cols, |i, j| {
                            ground.ring.constant(m.at(i, j).clone())
                        }))
                    })
                    .collect::<Result<_>>()?;
                let c = FreeComplex::new_capped(ground, self.lo, ranks, diffs, None, self.cap * k)?;
                Ok((c, k))
            }
        }
    }

    /// Homology in every degree, as presentations over the base (with
    /// dimensions when the base is a ground field).
    pub fn homology(&self) -> Result<HomologyReport> {
        if self.is_zero_complex() {
            return Ok(HomologyReport { degrees: Vec::new() });
        }
        if self.base.is_ground_field() {
            return self.homology_over_field();
        }
        let degrees: Vec<i64> = (self.lo..=self.hi()).collect();
        let results: Vec<Result<DegreeHomology>> = degrees
            .par_iter()
            .map(|&n| self.homology_at_degree(n))
            .collect();
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            out.push(r?);
        }
        Ok(HomologyReport { degrees: out })
    }

    fn homology_over_field(&self) -> Result<HomologyReport> {
        let field = self.base.field();
        let scalar_rank = |n: i64| -> Result<usize> {
            let d = self.diff(n);
            if d.rows == 0 || d.cols == 0 {
                return Ok(0);
            }
            Ok(d.to_scalar(field)?.rank())
        };
        let mut out = Vec::new();
        for n in self.lo..=self.hi() {
            let r = self.rank(n);
            let dim = r - scalar_rank(n)? - scalar_rank(n - 1)?;
            let presentation = SubmodulePresentation::new(dim, Vec::new())?;
            let fitting = if dim == 0 { vec![self.base.ring.one()] } else { Vec::new() };
            out.push(DegreeHomology {
                degree: n,
                kernel_generators: dim,
                presentation,
                fitting,
                is_zero: dim == 0,
                dimension: Some(dim),
            });
        }
        Ok(HomologyReport { degrees: out })
    }

    fn homology_at_degree(&self, n: i64) -> Result<DegreeHomology> {
        let ring = &self.base.ring;
        let gb = self.base.gb();
        let r_n = self.rank(n);
        if r_n == 0 {
            return Ok(DegreeHomology {
                degree: n,
                kernel_generators: 0,
                presentation: SubmodulePresentation::new(0, Vec::new())?,
                fitting: vec![ring.one()],
                is_zero: true,
                dimension: None,
            });
        }
        let d_n = self.diff(n);
        let d_prev = self.diff(n - 1);
        // kernel of d_n: syzygies of its columns inside A^{rank(n+1)}
        let cols_dn: Vec<Vec<Poly>> = (0..d_n.cols)
            .map(|j| (0..d_n.rows).map(|i| d_n.at(i, j).clone()).collect())
            .collect();
        let eng_ker = QuotientModule::new(ring, gb, &cols_dn, d_n.rows)?;
        let z = eng_ker.syzygies();
        let t = z.len();
        if t == 0 {
            return Ok(DegreeHomology {
                degree: n,
                kernel_generators: 0,
                presentation: SubmodulePresentation::new(0, Vec::new())?,
                fitting: vec![ring.one()],
                is_zero: true,
                dimension: None,
            });
        }
        // relations: image generators lifted through z, plus syzygies of z
        let eng_z = QuotientModule::new(ring, gb, &z, r_n)?;
        let mut relations: Vec<Vec<Poly>> = Vec::new();
        for j in 0..d_prev.cols {
            let b: Vec<Poly> = (0..d_prev.rows).map(|i| d_prev.at(i, j).clone()).collect();
            let lift = eng_z.lift(&b).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "image generator at degree {n} does not lie in the kernel (d² ≠ 0?)"
                ))
            })?;
            relations.push(lift);
        }
        relations.extend(eng_z.syzygies());
        let presentation = SubmodulePresentation::new(t, relations)?;
        let fitting = self.base.fitting0(&presentation)?;
        // vanishing means the fitting ideal is the whole ring, which the
        // reduced minors alone need not show over a quotient
        let is_zero = self.base.ideal_is_unit(&fitting)?;
        Ok(DegreeHomology {
            degree: n,
            kernel_generators: t,
            presentation,
            fitting,
            is_zero,
            dimension: None,
        })
    }
}

/// A degreewise map of complexes commuting with the differentials;
/// `maps[i]` is φ: S^{lo+i} → T^{lo+i} where `lo` spans the union of the
/// two degree ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMap {
    pub source: FreeComplex,
    pub target: FreeComplex,
    pub lo: i64,
    pub maps: Vec<PolyMat>,
}

impl ChainMap {
    pub fn new(
        source: FreeComplex,
        target: FreeComplex,
        lo: i64,
        maps: Vec<PolyMat>,
    ) -> Result<ChainMap> {
        if source.base != target.base {
            return Err(Error::RingMismatch("chain map between different base rings".into()));
        }
        let span_lo = source.lo.min(target.lo);
        let span_hi = source.hi().max(target.hi());
        if !source.is_zero_complex() || !target.is_zero_complex() {
            if lo > span_lo || lo + (maps.len() as i64) <= span_hi {
                return Err(Error::ShapeError(format!(
                    "chain map must cover degrees {span_lo}..={span_hi}"
                )));
            }
        }
        for (i, m) in maps.iter().enumerate() {
            let n = lo + i as i64;
            if m.rows != target.rank(n) || m.cols != source.rank(n) {
                return Err(Error::ShapeError(format!(
                    "component at degree {n} has shape {}×{}, expected {}×{}",
                    m.rows,
                    m.cols,
                    target.rank(n),
                    source.rank(n)
                )));
            }
        }
        let base = source.base.clone();
        let maps: Vec<PolyMat> = maps.iter().map(|m| m.map(|p| base.normal_form(p))).collect();
        let cm = ChainMap { source, target, lo, maps };
        for n in span_lo - 1..=span_hi {
            let lhs = cm.target.diff(n).mul(&base.ring, &cm.component(n));
            let rhs = cm.component(n + 1).mul(&base.ring, &cm.source.diff(n));
            if !lhs.sub(&base.ring, &rhs).map(|p| base.normal_form(p)).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "chain map does not commute with differentials at degree {n}"
                )));
            }
        }
        Ok(cm)
    }

    pub fn from_fn(
        source: FreeComplex,
        target: FreeComplex,
        mut f: impl FnMut(i64) -> PolyMat,
    ) -> Result<ChainMap> {
        let lo = source.lo.min(target.lo);
        let hi = source.hi().max(target.hi());
        let maps: Vec<PolyMat> = (lo..=hi).map(|n| f(n)).collect();
        ChainMap::new(source, target, lo, maps)
    }

    pub fn component(&self, n: i64) -> PolyMat {
        let i = n - self.lo;
        if i < 0 || i >= self.maps.len() as i64 {
            PolyMat::zero(self.target.rank(n), self.source.rank(n))
        } else {
            self.maps[i as usize].clone()
        }
    }

    pub fn identity(c: &FreeComplex) -> ChainMap {
        let maps = (c.lo..=c.hi())
            .map(|n| PolyMat::identity(&c.base.ring, c.rank(n)))
            .collect();
        ChainMap { source: c.clone(), target: c.clone(), lo: c.lo, maps }
    }

    /// Multiplication by a ring element, as a chain self-map.
    pub fn mul_by(c: &FreeComplex, f: &Poly) -> ChainMap {
        let f = c.base.normal_form(f);
        let maps = (c.lo..=c.hi())
            .map(|n| PolyMat::scalar(&c.base.ring, c.rank(n), &f))
            .collect();
        ChainMap { source: c.clone(), target: c.clone(), lo: c.lo, maps }
    }

    pub fn zero_map(source: FreeComplex, target: FreeComplex) -> Result<ChainMap> {
        ChainMap::from_fn(source.clone(), target.clone(), |n| {
            PolyMat::zero(target.rank(n), source.rank(n))
        })
    }

    /// ψ ∘ self.
    pub fn compose(&self, psi: &ChainMap) -> Result<ChainMap> {
        if psi.source != self.target {
            return Err(Error::ShapeError("composition domain mismatch".into()));
        }
        ChainMap::from_fn(self.source.clone(), psi.target.clone(), |n| {
            psi.component(n).mul(&self.source.base.ring, &self.component(n))
        })
    }

    /// True iff cone(self) is acyclic; the report is the certificate.
    pub fn is_quasi_iso(&self) -> Result<(bool, HomologyReport)> {
        let k = cone(self)?;
        let h = k.homology()?;
        Ok((h.is_acyclic(), h))
    }
}

/// Mapping cone: K^n = S^{n+1} ⊕ T^n, d = [[−d_S, 0], [φ, d_T]].
pub fn cone(phi: &ChainMap) -> Result<FreeComplex> {
    let (k, _, _) = cone_with_triangle(phi)?;
    Ok(k)
}

/// Cone together with the canonical triangle maps ι: T → K and
/// π: K → S[1].
pub fn cone_with_triangle(phi: &ChainMap) -> Result<(FreeComplex, ChainMap, ChainMap)> {
    let s = &phi.source;
    let t = &phi.target;
    let base = s.base.clone();
    if s.is_zero_complex() && t.is_zero_complex() {
        let z = FreeComplex::zero_complex(base.clone());
        let i = ChainMap::zero_map(t.clone(), z.clone())?;
        let p = ChainMap::zero_map(z.clone(), s.shift(1))?;
        return Ok((z, i, p));
    }
    let lo = (s.lo - 1).min(t.lo);
    let hi = (s.hi() - 1).max(t.hi());
    let ranks: Vec<usize> = (lo..=hi).map(|n| s.rank(n + 1) + t.rank(n)).collect();
    let diffs: Vec<PolyMat> = (lo..hi)
        .map(|n| {
            let ds = s.diff(n + 1).neg(&base.ring);
            let dt = t.diff(n);
            let ph = phi.component(n + 1);
            let z = PolyMat::zero(ds.rows, dt.cols);
            PolyMat::from_blocks(&[vec![&ds, &z], vec![&ph, &dt]])
        })
        .collect();
    let weights = match (&s.weights, &t.weights) {
        (Some(_), Some(_)) => Some(
            (lo..=hi)
                .map(|n| {
                    let mut row: Vec<i64> =
                        s.weight_row(n + 1).map(|r| r.to_vec()).unwrap_or_default();
                    row.extend(t.weight_row(n).map(|r| r.to_vec()).unwrap_or_default());
                    row
                })
                .collect(),
        ),
        _ => None,
    };
    let k = FreeComplex::new_capped(base.clone(), lo, ranks, diffs, weights, s.cap.max(t.cap))?;
    let incl = ChainMap::from_fn(t.clone(), k.clone(), |n| {
        let rs = s.rank(n + 1);
        let rt = t.rank(n);
        PolyMat::from_fn(rs + rt, rt, |i, j| {
            if i >= rs && i - rs == j {
                base.ring.one()
            } else {
                base.ring.zero()
            }
        })
    })?;
    let s1 = s.shift(1);
    let proj = ChainMap::from_fn(k.clone(), s1, |n| {
        let rs = s.rank(n + 1);
        let rt = t.rank(n);
        PolyMat::from_fn(rs, rs + rt, |i, j| {
            if i == j {
                base.ring.one()
            } else {
                base.ring.zero()
            }
        })
    })?;
    Ok((k, incl, proj))
}

/// Block layout of (C ⊗ D)^n: blocks (i, n−i) with i ascending; within a
/// block, basis pairs (a, b) are ordered a·rank_D(n−i) + b.
#[derive(Debug, Clone)]
pub struct TensorLayout {
    pub c_lo: i64,
    pub c_ranks: Vec<usize>,
    pub d_lo: i64,
    pub d_ranks: Vec<usize>,
}

impl TensorLayout {
    pub fn c_rank(&self, i: i64) -> usize {
        let k = i - self.c_lo;
        if k < 0 || k >= self.c_ranks.len() as i64 {
            0
        } else {
            self.c_ranks[k as usize]
        }
    }

    pub fn d_rank(&self, j: i64) -> usize {
        let k = j - self.d_lo;
        if k < 0 || k >= self.d_ranks.len() as i64 {
            0
        } else {
            self.d_ranks[k as usize]
        }
    }

    pub fn c_hi(&self) -> i64 {
        self.c_lo + self.c_ranks.len() as i64 - 1
    }

    pub fn rank(&self, n: i64) -> usize {
        (self.c_lo..=self.c_hi())
            .map(|i| self.c_rank(i) * self.d_rank(n - i))
            .sum()
    }

    /// Start of block (i, n−i) inside degree n.
    pub fn offset(&self, n: i64, i: i64) -> usize {
        (self.c_lo..i).map(|k| self.c_rank(k) * self.d_rank(n - k)).sum()
    }

    /// Index of x_a ⊗ y_b with x_a ∈ C^i, y_b ∈ D^{n−i}.
    pub fn index(&self, n: i64, i: i64, a: usize, b: usize) -> usize {
        self.offset(n, i) + a * self.d_rank(n - i) + b
    }
}

/// Total complex of the bigraded tensor product, with Koszul signs:
/// d(x⊗y) = dx⊗y + (−1)^{|x|} x⊗dy.
pub fn tensor(c: &FreeComplex, d: &FreeComplex) -> Result<FreeComplex> {
    Ok(tensor_with_layout(c, d)?.0)
}

pub fn tensor_with_layout(c: &FreeComplex, d: &FreeComplex) -> Result<(FreeComplex, TensorLayout)> {
    if c.base != d.base {
        return Err(Error::RingMismatch("tensor over different base rings".into()));
    }
    let base = c.base.clone();
    let layout = TensorLayout {
        c_lo: c.lo,
        c_ranks: c.ranks.clone(),
        d_lo: d.lo,
        d_ranks: d.ranks.clone(),
    };
    if c.is_zero_complex() || d.is_zero_complex() {
        return Ok((FreeComplex::zero_complex(base), layout));
    }
    let lo = c.lo + d.lo;
    let hi = c.hi() + d.hi();
    let ranks: Vec<usize> = (lo..=hi).map(|n| layout.rank(n)).collect();
    let mut diffs = Vec::with_capacity((hi - lo).max(0) as usize);
    for n in lo..hi {
        let mut m = PolyMat::zero(layout.rank(n + 1), layout.rank(n));
        for i in c.lo..=c.hi() {
            let j = n - i;
            let rc = layout.c_rank(i);
            let rd = layout.d_rank(j);
            if rc == 0 || rd == 0 {
                continue;
            }
            let dc = c.diff(i);
            let dd = d.diff(j);
            let sign_d = i.rem_euclid(2) == 1;
            for a in 0..rc {
                for b in 0..rd {
                    let col = layout.index(n, i, a, b);
                    // dx ⊗ y lands in block (i+1, j)
                    for a2 in 0..layout.c_rank(i + 1) {
                        let e = dc.at(a2, a);
                        if !e.is_zero() {
                            let row = layout.index(n + 1, i + 1, a2, b);
                            *m.at_mut(row, col) =
                                base.ring.add(m.at(row, col), e);
                        }
                    }
                    // (−1)^i x ⊗ dy lands in block (i, j+1)
                    for b2 in 0..layout.d_rank(j + 1) {
                        let e = dd.at(b2, b);
                        if !e.is_zero() {
                            let row = layout.index(n + 1, i, a, b2);
                            let signed = if sign_d { base.ring.neg(e) } else { e.clone() };
                            *m.at_mut(row, col) = base.ring.add(m.at(row, col), &signed);
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    let weights = match (&c.weights, &d.weights) {
        (Some(_), Some(_)) => Some(
            (lo..=hi)
                .map(|n| {
                    let mut row = Vec::with_capacity(layout.rank(n));
                    for i in c.lo..=c.hi() {
                        let j = n - i;
                        let (rc, rd) = (layout.c_rank(i), layout.d_rank(j));
                        if rc == 0 || rd == 0 {
                            continue;
                        }
                        let wc = c.weight_row(i).unwrap();
                        let wd = d.weight_row(j).unwrap();
                        for a in 0..rc {
                            for b in 0..rd {
                                row.push(wc[a] + wd[b]);
                            }
                        }
                    }
                    row
                })
                .collect(),
        ),
        _ => None,
    };
    let k = FreeComplex::new_capped(base, lo, ranks, diffs, weights, c.cap.max(d.cap))?;
    Ok((k, layout))
}

/// Block layout of Hom(C, D)^n = ⊕_i Hom(C^i, D^{i+n}): blocks by i
/// ascending; within block i, the matrix unit E_{ab}: C^i_b → D^{i+n}_a
/// has index a·rank_C(i) + b.
#[derive(Debug, Clone)]
pub struct HomLayout {
    pub c_lo: i64,
    pub c_ranks: Vec<usize>,
    pub d_lo: i64,
    pub d_ranks: Vec<usize>,
}

impl HomLayout {
    pub fn c_rank(&self, i: i64) -> usize {
        let k = i - self.c_lo;
        if k < 0 || k >= self.c_ranks.len() as i64 {
            0
        } else {
            self.c_ranks[k as usize]
        }
    }

    pub fn d_rank(&self, j: i64) -> usize {
        let k = j - self.d_lo;
        if k < 0 || k >= self.d_ranks.len() as i64 {
            0
        } else {
            self.d_ranks[k as usize]
        }
    }

    pub fn c_hi(&self) -> i64 {
        self.c_lo + self.c_ranks.len() as i64 - 1
    }

    pub fn rank(&self, n: i64) -> usize {
        (self.c_lo..=self.c_hi())
            .map(|i| self.c_rank(i) * self.d_rank(i + n))
            .sum()
    }

    pub fn offset(&self, n: i64, i: i64) -> usize {
        (self.c_lo..i).map(|k| self.c_rank(k) * self.d_rank(k + n)).sum()
    }

    /// Index of E_{ab}: C^i_b → D^{i+n}_a.
    pub fn index(&self, n: i64, i: i64, a: usize, b: usize) -> usize {
        self.offset(n, i) + a * self.c_rank(i) + b
    }
}

/// Internal Hom: Hom^n = ⊕_i Hom(C^i, D^{i+n}), δ(f) = d∘f − (−1)^n f∘d.
pub fn hom_complex(c: &FreeComplex, d: &FreeComplex) -> Result<FreeComplex> {
    Ok(hom_complex_with_layout(c, d)?.0)
}

pub fn hom_complex_with_layout(
    c: &FreeComplex,
    d: &FreeComplex,
) -> Result<(FreeComplex, HomLayout)> {
    if c.base != d.base {
        return Err(Error::RingMismatch("hom over different base rings".into()));
    }
    let base = c.base.clone();
    let layout = HomLayout {
        c_lo: c.lo,
        c_ranks: c.ranks.clone(),
        d_lo: d.lo,
        d_ranks: d.ranks.clone(),
    };
    if c.is_zero_complex() || d.is_zero_complex() {
        return Ok((FreeComplex::zero_complex(base), layout));
    }
    let lo = d.lo - c.hi();
    let hi = d.hi() - c.lo;
    let ranks: Vec<usize> = (lo..=hi).map(|n| layout.rank(n)).collect();
    let mut diffs = Vec::with_capacity((hi - lo).max(0) as usize);
    for n in lo..hi {
        let mut m = PolyMat::zero(layout.rank(n + 1), layout.rank(n));
        let sign_f = n.rem_euclid(2) == 1; // −(−1)^n: subtract when n even, add when n odd
        for i in c.lo..=c.hi() {
            let rc = layout.c_rank(i);
            let rd = layout.d_rank(i + n);
            if rc == 0 || rd == 0 {
                continue;
            }
            let dd = d.diff(i + n);
            let dc_prev = c.diff(i - 1);
            for a in 0..rd {
                for b in 0..rc {
                    let col = layout.index(n, i, a, b);
                    // d_D ∘ f : block i of Hom^{n+1}
                    for a2 in 0..layout.d_rank(i + n + 1) {
                        let e = dd.at(a2, a);
                        if !e.is_zero() {
                            let row = layout.index(n + 1, i, a2, b);
                            *m.at_mut(row, col) = base.ring.add(m.at(row, col), e);
                        }
                    }
                    // −(−1)^n f ∘ d_C : block i−1 of Hom^{n+1}
                    for b2 in 0..layout.c_rank(i - 1) {
                        let e = dc_prev.at(b, b2);
                        if !e.is_zero() {
                            let row = layout.index(n + 1, i - 1, a, b2);
                            let signed = if sign_f { e.clone() } else { base.ring.neg(e) };
                            *m.at_mut(row, col) = base.ring.add(m.at(row, col), &signed);
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    let weights = match (&c.weights, &d.weights) {
        (Some(_), Some(_)) => Some(
            (lo..=hi)
                .map(|n| {
                    let mut row = Vec::with_capacity(layout.rank(n));
                    for i in c.lo..=c.hi() {
                        let (rc, rd) = (layout.c_rank(i), layout.d_rank(i + n));
                        if rc == 0 || rd == 0 {
                            continue;
                        }
                        let wc = c.weight_row(i).unwrap();
                        let wd = d.weight_row(i + n).unwrap();
                        for a in 0..rd {
                            for b in 0..rc {
                                row.push(wd[a] - wc[b]);
                            }
                        }
                    }
                    row
                })
                .collect(),
        ),
        _ => None,
    };
    let k = FreeComplex::new_capped(base, lo, ranks, diffs, weights, c.cap.max(d.cap))?;
    Ok((k, layout))
}

/// End(C) = Hom(C, C).
pub fn end_complex(c: &FreeComplex) -> Result<FreeComplex> {
    hom_complex(c, c)
}

/// Koszul complex K(A, f₁..fₙ) = cone(×f₁) ⊗ … ⊗ cone(×fₙ): total rank
/// 2ⁿ, supported on V(f₁..fₙ).
pub fn koszul(base: &PolyAlgebra, fs: &[Poly]) -> Result<FreeComplex> {
    if fs.is_empty() {
        return Err(Error::InvalidInput("koszul requires at least one element".into()));
    }
    let unit = FreeComplex::unit(base.clone());
    let mut acc: Option<FreeComplex> = None;
    for f in fs {
        let k_i = cone(&ChainMap::mul_by(&unit, f))?;
        acc = Some(match acc {
            None => k_i,
            Some(prev) => tensor(&prev, &k_i)?,
        });
    }
    Ok(acc.unwrap())
}

/// Homology presentation per degree. Over a ground field the presentation
/// degenerates to the dimension; over general bases only the zero-test
/// (fitting0 = (1)) and the presentation itself are exposed.
#[derive(Debug, Clone)]
pub struct HomologyReport {
    pub degrees: Vec<DegreeHomology>,
}

#[derive(Debug, Clone)]
pub struct DegreeHomology {
    pub degree: i64,
    /// Number of kernel generators = ambient rank of the presentation.
    pub kernel_generators: usize,
    /// Relations among the kernel generators (lifts of the image, then
    /// syzygies of the kernel generators).
    pub presentation: SubmodulePresentation,
    /// fitting0 of the presentation: the support ideal of H^degree.
    pub fitting: Vec<Poly>,
    pub is_zero: bool,
    /// dim_k H^degree when the base is a ground field.
    pub dimension: Option<usize>,
}

impl HomologyReport {
    pub fn is_acyclic(&self) -> bool {
        self.degrees.iter().all(|d| d.is_zero)
    }

    pub fn at(&self, degree: i64) -> Option<&DegreeHomology> {
        self.degrees.iter().find(|d| d.degree == degree)
    }

    /// Degrees with (possibly) nonzero homology.
    pub fn nonzero_degrees(&self) -> Vec<i64> {
        self.degrees.iter().filter(|d| !d.is_zero).map(|d| d.degree).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cring::parse::parse_poly;
    use crate::cring::MonomialOrder;
    use crate::scalars::FieldElement;

    fn kx() -> PolyAlgebra {
        let ring = PolyRing::new(Field::Q, vec!["x".into()], MonomialOrder::DegRevLex);
        PolyAlgebra::new(ring, vec![]).unwrap()
    }

    fn kxy() -> PolyAlgebra {
        let ring = PolyRing::new(Field::Q, vec!["x".into(), "y".into()], MonomialOrder::DegRevLex);
        PolyAlgebra::new(ring, vec![]).unwrap()
    }

    #[test]
    fn shift_round_trip_and_signs() {
        let a = kx();
        let x = a.ring.var(0);
        let k = koszul(&a, &[x.clone()]).unwrap();
        assert_eq!(k.lo, -1);
        assert_eq!(k.ranks, vec![1, 1]);
        let s = k.shift(1);
        assert_eq!(s.lo, -2);
        assert_eq!(s.hi(), -1);
        // d picks up the sign (−1)^1
        assert_eq!(*s.diff(-2).at(0, 0), a.ring.neg(&x));
        assert_eq!(s.shift(-1), k);
        assert_eq!(k.shift(0), k);
    }

    #[test]
    fn cone_examples() {
        let a = kx();
        let x = a.ring.var(0);
        let unit = FreeComplex::unit(a.clone());
        // cone(id) is acyclic — exercises the general (non-field) path
        let c = cone(&ChainMap::identity(&unit)).unwrap();
        assert!(c.homology().unwrap().is_acyclic());
        // cone(0 → C) = C
        let z = FreeComplex::zero_complex(a.clone());
        let c2 = cone(&ChainMap::zero_map(z, unit.clone()).unwrap()).unwrap();
        assert_eq!(c2, unit);
        // cone(×x) has H⁰ = A/(x), H⁻¹ = 0
        let kx_cone = cone(&ChainMap::mul_by(&unit, &x)).unwrap();
        let h = kx_cone.homology().unwrap();
        let h0 = h.at(0).unwrap();
        assert!(!h0.is_zero);
        assert_eq!(h0.fitting, vec![x.clone()]);
        assert!(h.at(-1).unwrap().is_zero);
    }

    #[test]
    fn cone_triangle_maps_commute() {
        let a = kx();
        let unit = FreeComplex::unit(a.clone());
        let phi = ChainMap::mul_by(&unit, &a.ring.var(0));
        let (k, incl, proj) = cone_with_triangle(&phi).unwrap();
        assert_eq!(incl.target, k);
        assert_eq!(proj.source, k);
        // composite T → K → S[1] is zero
        let comp = incl.compose(&proj).unwrap();
        assert!(comp.maps.iter().all(|m| m.is_zero()));
    }

    #[test]
    fn koszul_regular_sequence() {
        let a = kxy();
        let x = a.ring.var(0);
        let y = a.ring.var(1);
        let k = koszul(&a, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(k.lo, -2);
        assert_eq!(k.ranks, vec![1, 2, 1]);
        let h = k.homology().unwrap();
        assert!(h.at(-2).unwrap().is_zero);
        assert!(h.at(-1).unwrap().is_zero);
        let h0 = h.at(0).unwrap();
        assert!(!h0.is_zero);
        // H⁰ = A/(x,y): support ideal (x, y)
        assert_eq!(h0.fitting, vec![y.clone(), x.clone()]);
        // koszul = tensor of the cones, literally
        let k1 = koszul(&a, &[x.clone()]).unwrap();
        let k2 = koszul(&a, &[y.clone()]).unwrap();
        assert_eq!(tensor(&k1, &k2).unwrap(), k);
        // unit element: acyclic
        let ku = koszul(&a, &[a.ring.one()]).unwrap();
        assert!(ku.homology().unwrap().is_acyclic());
    }

    #[test]
    fn koszul_non_regular() {
        // K(x) ⊗ K(x) over k[x]: H⁻¹ ≅ A/(x) ≠ 0
        let a = kx();
        let x = a.ring.var(0);
        let k = koszul(&a, &[x.clone(), x.clone()]).unwrap();
        let h = k.homology().unwrap();
        assert!(h.at(-2).unwrap().is_zero);
        let h1 = h.at(-1).unwrap();
        assert!(!h1.is_zero);
        assert_eq!(h1.fitting, vec![x.clone()]);
        let h0 = h.at(0).unwrap();
        assert!(!h0.is_zero);
        assert_eq!(h0.fitting, vec![x]);
    }

    #[test]
    fn tensor_unit_and_euler() {
        let a = kxy();
        let unit = FreeComplex::unit(a.clone());
        let k = koszul(&a, &[a.ring.var(0), a.ring.var(1)]).unwrap();
        assert_eq!(tensor(&unit, &k).unwrap(), k);
        assert_eq!(tensor(&k, &unit).unwrap(), k);
        assert_eq!(k.euler_characteristic(), 1 - 2 + 1);
        assert_eq!(k.total_rank(), 4);
    }

    #[test]
    fn hom_examples() {
        let a = kx();
        let unit = FreeComplex::unit(a.clone());
        let k = koszul(&a, &[a.ring.var(0)]).unwrap();
        // Hom(A, C) ≅ C
        assert_eq!(hom_complex(&unit, &k).unwrap(), k);
        // Hom(A[n], A) ≅ A[−n]
        let shifted = unit.shift(2);
        assert_eq!(hom_complex(&shifted, &unit).unwrap(), unit.shift(-2));
        // End(A ⊕ A[1]) has ranks (1,2,1) in degrees −1..1
        let e = unit.direct_sum(&unit.shift(1)).unwrap();
        let end = end_complex(&e).unwrap();
        assert_eq!(end.lo, -1);
        assert_eq!(end.ranks, vec![1, 2, 1]);
        // its homology over k[x]: differentials are zero, all free
        let h = end.homology().unwrap();
        assert!(!h.at(0).unwrap().is_zero);
    }

    #[test]
    fn hom_differential_squares_even_with_interaction() {
        // C = K(x), D = K(x): End(K(x)) must be a valid complex (d²=0 is
        // checked at construction) and its degree-0 homology contains id
        let a = kx();
        let k = koszul(&a, &[a.ring.var(0)]).unwrap();
        let end = end_complex(&k).unwrap();
        assert_eq!(end.lo, -1);
        assert_eq!(end.ranks, vec![1, 2, 1]);
        let h = end.homology().unwrap();
        // End(K(x)) ≃ K(x) ⊗ K(x)^∨; H⁰ ≠ 0 (contains the identity class)
        assert!(!h.at(0).unwrap().is_zero);
    }

    #[test]
    fn quasi_iso_verdicts() {
        let a = kx();
        let x = a.ring.var(0);
        let unit = FreeComplex::unit(a.clone());
        let (yes, _) = ChainMap::identity(&unit).is_quasi_iso().unwrap();
        assert!(yes);
        let (no, cert) = ChainMap::mul_by(&unit, &x).is_quasi_iso().unwrap();
        assert!(!no);
        // certificate pins the failing degree(s) with the support ideal
        let bad: Vec<i64> = cert.nonzero_degrees();
        assert!(!bad.is_empty());
        // multiplication by a unit is a quasi-iso
        let two = a.ring.constant(Field::Q.from_i64(2));
        let (yes2, _) = ChainMap::mul_by(&unit, &two).is_quasi_iso().unwrap();
        assert!(yes2);
    }

    #[test]
    fn evaluation_at_points() {
        let a = kx();
        let x = a.ring.var(0);
        let k = koszul(&a, &[x]).unwrap();
        let q = Field::Q;
        // at x = 1 the fiber is acyclic
        let pt1 = PointSpec::Base { field: q, coords: vec![q.from_i64(1)] };
        let (f1, deg1) = k.evaluate_at_point(&pt1).unwrap();
        assert_eq!(deg1, 1);
        assert!(f1.homology().unwrap().is_acyclic());
        // at x = 0 it is not
        let pt0 = PointSpec::Base { field: q, coords: vec![q.from_i64(0)] };
        let (f0, _) = k.evaluate_at_point(&pt0).unwrap();
        let h = f0.homology().unwrap();
        assert_eq!(h.at(0).unwrap().dimension, Some(1));
        assert_eq!(h.at(-1).unwrap().dimension, Some(1));
    }

    #[test]
    fn evaluation_at_extension_points() {
        // K(x) over F₂[x] at the F₄-point x = t: acyclic fiber
        let ring = PolyRing::new(Field::Fp(2), vec!["x".into()], MonomialOrder::DegRevLex);
        let a = PolyAlgebra::new(ring, vec![]).unwrap();
        let k = koszul(&a, &[a.ring.var(0)]).unwrap();
        let f4 = ExtFieldDef::new(2, vec![1, 1]).unwrap();
        let pt = PointSpec::Ext { def: f4.clone(), coords: vec![vec![0, 1]] };
        let (fib, deg) = k.evaluate_at_point(&pt).unwrap();
        assert_eq!(deg, 2);
        assert_eq!(fib.ranks, vec![2, 2]); // ranks ×k over F₂
        assert!(fib.homology().unwrap().is_acyclic());
        // at x = 0 (in F₄) the fiber has F₂-dimension 2 = 1·k per degree
        let pt0 = PointSpec::Ext { def: f4, coords: vec![vec![0, 0]] };
        let (fib0, k2) = k.evaluate_at_point(&pt0).unwrap();
        let h = fib0.homology().unwrap();
        assert_eq!(h.at(0).unwrap().dimension, Some(2));
        assert_eq!(h.at(0).unwrap().dimension.unwrap() / k2, 1);
    }

    #[test]
    fn fiber_acyclicity_matches_fitting_route() {
        // K(x)⊗K(x) over F₃[x]: acyclic nowhere near x=0, fitting pins (x)
        let ring = PolyRing::new(Field::Fp(3), vec!["x".into()], MonomialOrder::DegRevLex);
        let a = PolyAlgebra::new(ring, vec![]).unwrap();
        let x = a.ring.var(0);
        let k = koszul(&a, &[x.clone(), x.clone()]).unwrap();
        let h = k.homology().unwrap();
        let f3 = Field::Fp(3);
        for v in 0..3 {
            let pt = PointSpec::Base { field: f3, coords: vec![f3.from_i64(v)] };
            let (fib, _) = k.evaluate_at_point(&pt).unwrap();
            let fiber_acyclic = fib.homology().unwrap().is_acyclic();
            // global: acyclic iff every degree's fitting contains 1 — here it doesn't
            assert!(!h.is_acyclic());
            // fitting-vanishing at the point ⟺ fiber non-acyclic
            let vanish = h.degrees.iter().filter(|d| !d.is_zero).any(|d| {
                d.fitting.iter().all(|g| {
                    eval_poly_base(&a.ring, g, &[f3.from_i64(v)]).unwrap().is_zero()
                })
            });
            assert_eq!(vanish, !fiber_acyclic, "x = {v}");
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        let a = kx();
        let x = a.ring.var(0);
        // d² ≠ 0
        let d0 = PolyMat::from_fn(1, 1, |_, _| x.clone());
        let bad = FreeComplex::new(
            a.clone(),
            0,
            vec![1, 1, 1],
            vec![d0.clone(), d0.clone()],
            None,
        );
        assert!(bad.is_err());
        // shape mismatch
        let bad2 = FreeComplex::new(a.clone(), 0, vec![1, 2], vec![d0.clone()], None);
        assert!(matches!(bad2, Err(Error::ShapeError(_))));
        // cap
        let too_big = FreeComplex::new_capped(a.clone(), 0, vec![10], vec![], None, 4);
        assert!(matches!(too_big, Err(Error::CapExceeded(_))));
        // chain map must commute: ×x on cone(×x) source vs a broken map
        let unit = FreeComplex::unit(a.clone());
        let k = cone(&ChainMap::mul_by(&unit, &x)).unwrap();
        let broken = ChainMap::new(
            k.clone(),
            k.clone(),
            k.lo,
            vec![
                PolyMat::identity(&a.ring, 1),
                PolyMat::from_fn(1, 1, |_, _| x.clone()),
            ],
        );
        assert!(broken.is_err());
    }

    #[test]
    fn homology_of_module_in_degree_zero() {
        let a = kx();
        let unit = FreeComplex::unit(a.clone());
        let h = unit.homology().unwrap();
        assert_eq!(h.degrees.len(), 1);
        let h0 = h.at(0).unwrap();
        assert!(!h0.is_zero);
        assert_eq!(h0.kernel_generators, 1);
        assert!(h0.fitting.is_empty()); // free module: support everywhere
    }

    #[test]
    fn quotient_base_homology() {
        // over A = ℚ[x]/(x²), cone(×x) has H⁰ = A/(x) and H⁻¹ = (x) ≠ 0
        let ring = PolyRing::new(Field::Q, vec!["x".into()], MonomialOrder::DegRevLex);
        let x = ring.var(0);
        let rel = ring.mul(&x, &x);
        let a = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let x = a.ring.var(0);
        let unit = FreeComplex::unit(a.clone());
        let k = cone(&ChainMap::mul_by(&unit, &x)).unwrap();
        let h = k.homology().unwrap();
        assert!(!h.at(0).unwrap().is_zero);
        assert!(!h.at(-1).unwrap().is_zero, "x is a zerodivisor in A");
    }

    #[test]
    fn parse_based_matrix_round_trip() {
        let a = kxy();
        let p = parse_poly(&a.ring, "x*y - 1").unwrap();
        let m = PolyMat::from_fn(1, 1, |_, _| p.clone());
        let q = Field::Q;
        let coords = vec![q.from_i64(2), q.from_i64(3)];
        let ev = m.eval_base(&a.ring, &coords).unwrap();
        assert_eq!(*ev.at(0, 0), q.from_i64(5));
        let consts = PolyMat::from_fn(2, 2, |i, j| {
            a.ring.constant(q.from_i64((i + j) as i64))
        });
        let sc = consts.to_scalar(q).unwrap();
        assert_eq!(*sc.at(1, 1), q.from_i64(2));
        let back: FieldElement = sc.at(0, 1).clone();
        assert_eq!(back, q.from_i64(1));
    }
}
