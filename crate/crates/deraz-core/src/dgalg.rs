//! Strict dg-algebras over A: a bounded free complex with a strictly
//! associative, strictly unital multiplication given by its full
//! structure-constant matrix. Opposites, tensor products, endomorphism
//! algebras, and the Azumaya structure map b⊗b′ ↦ (c ↦ ±b·c·b′).

use crate::complexes::{
    hom_complex_with_layout, tensor_with_layout, ChainMap, FreeComplex, HomLayout, PolyMat,
    TensorLayout,
};
use crate::cring::{Poly, PointSpec, PolyAlgebra};
use crate::{Error, Result};

/// Associativity is verified on all basis triples up to this many triples
/// (total_rank³); larger algebras carry `assoc_verified = false`.
pub const ASSOC_TRIPLE_CAP: usize = 600_000;

/// Total entry budget for the stored multiplication matrices.
pub const MULT_TABLE_CAP: usize = 4_000_000;

/// Multiplicativity of the structure map is checked on all basis pairs
/// when the source algebra has total rank at most this.
pub const STRUCT_MAP_CHECK_CAP: usize = 256;

/// A strict dg-algebra: complex, unit (coordinates in the degree-0
/// basis) and multiplication as a chain map from the tensor square.
/// The chain-map condition *is* the Leibniz rule.
#[derive(Debug, Clone)]
pub struct DGAlgebra {
    pub complex: FreeComplex,
    pub mult: ChainMap,
    pub unit: Vec<Poly>,
    pub layout: TensorLayout,
    /// Whether the basis-triple associativity check actually ran (it is
    /// skipped above ASSOC_TRIPLE_CAP; the derived constructors preserve
    /// associativity regardless).
    pub assoc_verified: bool,
}

impl PartialEq for DGAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.complex == other.complex
            && self.mult.maps == other.mult.maps
            && self.unit == other.unit
    }
}

/// Tensor square of a complex, with the rank cap relaxed to fit r².
fn tensor_square(c: &FreeComplex) -> Result<(FreeComplex, TensorLayout)> {
    let mut bumped = c.clone();
    let r = c.total_rank();
    bumped.cap = bumped.cap.max(r * r).max(1);
    tensor_with_layout(&bumped, &bumped)
}

impl DGAlgebra {
    /// `mult_mats[i]` is the multiplication (C⊗C)^{lo+i} → C^{lo+i} where
    /// `lo` is the low degree of the union of the tensor-square span and
    /// the complex span.
    pub fn new(complex: FreeComplex, mult_mats: Vec<PolyMat>, unit: Vec<Poly>) -> Result<DGAlgebra> {
        let (t2, layout) = tensor_square(&complex)?;
        let entries: usize = mult_mats.iter().map(|m| m.rows * m.cols).sum();
        if entries > MULT_TABLE_CAP {
            return Err(Error::CapExceeded(format!(
                "multiplication table has {entries} entries, cap {MULT_TABLE_CAP}"
            )));
        }
        let lo = t2.lo.min(complex.lo);
        let mult = ChainMap::new(t2, complex.clone(), lo, mult_mats)?;
        DGAlgebra::build(complex, mult, layout, unit)
    }

    fn build(
        complex: FreeComplex,
        mult: ChainMap,
        layout: TensorLayout,
        unit: Vec<Poly>,
    ) -> Result<DGAlgebra> {
        let base = complex.base.clone();
        if unit.len() != complex.rank(0) {
            return Err(Error::ShapeError(format!(
                "unit has {} coordinates, degree-0 rank is {}",
                unit.len(),
                complex.rank(0)
            )));
        }
        let unit: Vec<Poly> = unit.iter().map(|p| base.normal_form(p)).collect();
        // the unit must be a cycle
        let d0 = complex.diff(0);
        for i in 0..d0.rows {
            let mut acc = base.ring.zero();
            for j in 0..d0.cols {
                acc = base.ring.add(&acc, &base.ring.mul(d0.at(i, j), &unit[j]));
            }
            if !base.is_zero(&acc) {
                return Err(Error::InvalidInput("unit is not a cycle (d(1) ≠ 0)".into()));
            }
        }
        let alg = DGAlgebra { complex, mult, unit, layout, assoc_verified: false };
        alg.check_unit_axioms()?;
        let total = alg.complex.total_rank();
        let assoc_verified = if total.pow(3) <= ASSOC_TRIPLE_CAP {
            alg.check_associativity()?;
            true
        } else {
            false
        };
        Ok(DGAlgebra { assoc_verified, ..alg })
    }

    fn check_unit_axioms(&self) -> Result<()> {
        let base = &self.complex.base;
        for n in self.complex.lo..=self.complex.hi() {
            let r = self.complex.rank(n);
            for e in 0..r {
                let mut basis = vec![base.ring.zero(); r];
                basis[e] = base.ring.one();
                let left = self.product(0, &self.unit, n, &basis);
                let right = self.product(n, &basis, 0, &self.unit);
                if left != basis || right != basis {
                    return Err(Error::InvalidInput(format!(
                        "unit axiom fails on basis element {e} of degree {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<()> {
        let c = &self.complex;
        for i in c.lo..=c.hi() {
            for j in c.lo..=c.hi() {
                for k in c.lo..=c.hi() {
                    for a in 0..c.rank(i) {
                        for b in 0..c.rank(j) {
                            let ab = self.basis_product(i, a, j, b);
                            for e in 0..c.rank(k) {
                                let bc = self.basis_product(j, b, k, e);
                                let mut basis_c = vec![c.base.ring.zero(); c.rank(k)];
                                basis_c[e] = c.base.ring.one();
                                let lhs = self.product(i + j, &ab, k, &basis_c);
                                let mut basis_a = vec![c.base.ring.zero(); c.rank(i)];
                                basis_a[a] = c.base.ring.one();
                                let rhs = self.product(i, &basis_a, j + k, &bc);
                                if lhs != rhs {
                                    return Err(Error::InvalidInput(format!(
                                        "associativity fails on basis triple ({i},{a})·({j},{b})·({k},{e})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Coordinates of eₐ·e_b (a in degree p, b in degree q) in degree p+q.
    pub fn basis_product(&self, p: i64, a: usize, q: i64, b: usize) -> Vec<Poly> {
        let n = p + q;
        let m = self.mult.component(n);
        let col = self.layout.index(n, p, a, b);
        (0..m.rows).map(|r| m.at(r, col).clone()).collect()
    }

    /// Product of two coordinate vectors (x in degree p, y in degree q).
    pub fn product(&self, p: i64, x: &[Poly], q: i64, y: &[Poly]) -> Vec<Poly> {
        let base = &self.complex.base;
        let ring = &base.ring;
        let n = p + q;
        assert_eq!(x.len(), self.complex.rank(p), "x has the wrong length for degree {p}");
        assert_eq!(y.len(), self.complex.rank(q), "y has the wrong length for degree {q}");
        let m = self.mult.component(n);
        let mut out = vec![ring.zero(); self.complex.rank(n)];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let coef = ring.mul(xa, yb);
                let col = self.layout.index(n, p, a, b);
                for (r, slot) in out.iter_mut().enumerate() {
                    let e = m.at(r, col);
                    if !e.is_zero() {
                        *slot = ring.add(slot, &ring.mul(&coef, e));
                    }
                }
            }
        }
        out.iter().map(|p| base.normal_form(p)).collect()
    }

    /// Algebra concentrated in degree 0, from the table eᵢ·eⱼ = table(i,j).
    pub fn degree_zero(
        base: PolyAlgebra,
        rank: usize,
        table: impl Fn(usize, usize) -> Vec<Poly>,
        unit: Vec<Poly>,
    ) -> Result<DGAlgebra> {
        let complex = FreeComplex::free_module(base.clone(), rank);
        let mut m = PolyMat::zero(rank, rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                let prod = table(i, j);
                if prod.len() != rank {
                    return Err(Error::ShapeError(format!(
                        "table entry ({i},{j}) has {} coordinates, expected {rank}",
                        prod.len()
                    )));
                }
                for (r, v) in prod.iter().enumerate() {
                    *m.at_mut(r, i * rank + j) = v.clone();
                }
            }
        }
        DGAlgebra::new(complex, vec![m], unit)
    }

    /// The base ring itself.
    pub fn unit_algebra(base: PolyAlgebra) -> Result<DGAlgebra> {
        let one = base.ring.one();
        DGAlgebra::degree_zero(base.clone(), 1, |_, _| vec![one.clone()], vec![one.clone()])
    }

    /// Mₙ(A) on the matrix-unit basis E_{ab} (flat index a·n + b).
    pub fn matrix_algebra(base: PolyAlgebra, n: usize) -> Result<DGAlgebra> {
        let ring = base.ring.clone();
        let r = n * n;
        let table = move |p: usize, q: usize| {
            let (a, b) = (p / n, p % n);
            let (c, d) = (q / n, q % n);
            let mut out = vec![ring.zero(); r];
            if b == c {
                out[a * n + d] = ring.one();
            }
            out
        };
        let mut unit = vec![base.ring.zero(); r];
        for a in 0..n {
            unit[a * n + a] = base.ring.one();
        }
        DGAlgebra::degree_zero(base, r, table, unit)
    }

    /// Aⁿ with componentwise multiplication (eᵢ·eⱼ = δᵢⱼ eᵢ).
    pub fn product_algebra(base: PolyAlgebra, n: usize) -> Result<DGAlgebra> {
        let ring = base.ring.clone();
        let table = move |i: usize, j: usize| {
            let mut out = vec![ring.zero(); n];
            if i == j {
                out[i] = ring.one();
            }
            out
        };
        let unit = vec![base.ring.one(); n];
        DGAlgebra::degree_zero(base, n, table, unit)
    }

    /// Quaternion algebra (a, b): basis 1, i, j, k with i² = a, j² = b,
    /// ij = −ji = k.
    pub fn quaternion_algebra(base: PolyAlgebra, a: &Poly, b: &Poly) -> Result<DGAlgebra> {
        let ring = base.ring.clone();
        let (a, b) = (base.normal_form(a), base.normal_form(b));
        let ab = ring.mul(&a, &b);
        let one = ring.one();
        let cells: Vec<Vec<(usize, Poly)>> = vec![
            vec![(0, one.clone()), (1, one.clone()), (2, one.clone()), (3, one.clone())],
            vec![(1, one.clone()), (0, a.clone()), (3, one.clone()), (2, a.clone())],
            vec![(2, one.clone()), (3, ring.neg(&one)), (0, b.clone()), (1, ring.neg(&b))],
            vec![(3, one.clone()), (2, ring.neg(&a)), (1, b.clone()), (0, ring.neg(&ab))],
        ];
        let table = move |i: usize, j: usize| {
            let (idx, ref c) = cells[i][j];
            let mut v = vec![ring.zero(); 4];
            v[idx] = c.clone();
            v
        };
        let mut unit = vec![base.ring.zero(); 4];
        unit[0] = base.ring.one();
        DGAlgebra::degree_zero(base, 4, table, unit)
    }

    /// A[ε]/(ε²), basis 1, ε.
    pub fn dual_numbers(base: PolyAlgebra) -> Result<DGAlgebra> {
        let ring = base.ring.clone();
        let one = ring.one();
        let table = move |i: usize, j: usize| {
            let mut out = vec![ring.zero(); 2];
            if i + j < 2 {
                out[i + j] = one.clone();
            }
            out
        };
        let unit = vec![base.ring.one(), base.ring.zero()];
        DGAlgebra::degree_zero(base, 2, table, unit)
    }

    /// Same complex, multiplication b·ᵒᵖ b′ = (−1)^{|b||b′|} b′·b.
    pub fn opposite(&self) -> Result<DGAlgebra> {
        let ring = &self.complex.base.ring;
        let t2 = &self.mult.source;
        let mats: Vec<PolyMat> = (self.mult.lo..self.mult.lo + self.mult.maps.len() as i64)
            .map(|n| {
                let orig = self.mult.component(n);
                let mut m = PolyMat::zero(orig.rows, orig.cols);
                for i in self.complex.lo..=self.complex.hi() {
                    let j = n - i;
                    let (ri, rj) = (self.complex.rank(i), self.complex.rank(j));
                    if ri == 0 || rj == 0 {
                        continue;
                    }
                    let flip = (i * j).rem_euclid(2) == 1;
                    for a in 0..ri {
                        for b in 0..rj {
                            let dst = self.layout.index(n, i, a, b);
                            let src = self.layout.index(n, j, b, a);
                            for r in 0..orig.rows {
                                let e = orig.at(r, src);
                                if !e.is_zero() {
                                    *m.at_mut(r, dst) = if flip { ring.neg(e) } else { e.clone() };
                                }
                            }
                        }
                    }
                }
                m
            })
            .collect();
        let mult = ChainMap::new(t2.clone(), self.complex.clone(), self.mult.lo, mats)?;
        DGAlgebra::build(self.complex.clone(), mult, self.layout.clone(), self.unit.clone())
    }

    /// Base change to the residue field of a base-field point. (Extension
    /// points change the scalar field; evaluate the structure map instead.)
    pub fn evaluate_at_point(&self, pt: &PointSpec) -> Result<DGAlgebra> {
        let coords = match pt {
            PointSpec::Base { coords, .. } => coords,
            PointSpec::Ext { .. } => {
                return Err(Error::Unsupported(
                    "algebra base change at extension points; evaluate the structure map instead"
                        .into(),
                ))
            }
        };
        self.complex.base.validate_point(pt)?;
        let (fiber, _) = self.complex.evaluate_at_point(pt)?;
        let ground = fiber.base.clone();
        let ring = &self.complex.base.ring;
        let mats: Vec<PolyMat> = (self.mult.lo..self.mult.lo + self.mult.maps.len() as i64)
            .map(|n| {
                let m = self.mult.component(n).eval_base(ring, coords)?;
                Ok(PolyMat::from_fn(m.rows, m.cols, |i, j| ground.ring.constant(m.at(i, j).clone())))
            })
            .collect::<Result<_>>()?;
        let unit: Vec<Poly> = self
            .unit
            .iter()
            .map(|p| {
                crate::cring::eval_poly_base(ring, p, coords).map(|c| ground.ring.constant(c))
            })
            .collect::<Result<_>>()?;
        DGAlgebra::new(fiber, mats, unit)
    }
}

/// B ⊗ B′ with (b⊗b′)(c⊗c′) = (−1)^{|b′||c|} bc ⊗ b′c′.
pub fn tensor_dga(b: &DGAlgebra, bp: &DGAlgebra) -> Result<DGAlgebra> {
    if b.complex.base != bp.complex.base {
        return Err(Error::RingMismatch("tensor of algebras over different base rings".into()));
    }
    let base = b.complex.base.clone();
    let ring = &base.ring;
    let mut cb = b.complex.clone();
    let mut cp = bp.complex.clone();
    let prod_rank = cb.total_rank() * cp.total_rank();
    cb.cap = cb.cap.max(prod_rank).max(1);
    cp.cap = cp.cap.max(prod_rank).max(1);
    let (t, tl) = tensor_with_layout(&cb, &cp)?;
    let (tt2, tt2l) = tensor_square(&t)?;
    let entries: usize = (tt2.lo.min(t.lo)..=tt2.hi().max(t.hi()))
        .map(|n| t.rank(n) * tt2l.rank(n))
        .sum();
    if entries > MULT_TABLE_CAP {
        return Err(Error::CapExceeded(format!(
            "tensor multiplication table has {entries} entries, cap {MULT_TABLE_CAP}"
        )));
    }
    let lo = tt2.lo.min(t.lo);
    let hi = tt2.hi().max(t.hi());
    let mut mats = Vec::new();
    for n in lo..=hi {
        let mut m = PolyMat::zero(t.rank(n), tt2l.rank(n));
        for p in t.lo..=t.hi() {
            let q = n - p;
            if t.rank(p) == 0 || t.rank(q) == 0 {
                continue;
            }
            for i in cb.lo..=cb.hi() {
                let iw = p - i; // degree of the B′ factor in the left tensor leg
                if cb.rank(i) == 0 || cp.rank(iw) == 0 {
                    continue;
                }
                for j in cb.lo..=cb.hi() {
                    let jw = q - j;
                    if cb.rank(j) == 0 || cp.rank(jw) == 0 {
                        continue;
                    }
                    let flip = (iw * j).rem_euclid(2) == 1; // (−1)^{|b′||c|}
                    for a in 0..cb.rank(i) {
                        for ap in 0..cp.rank(iw) {
                            let u = tl.index(p, i, a, ap);
                            for c in 0..cb.rank(j) {
                                let w1 = b.basis_product(i, a, j, c);
                                for cp_idx in 0..cp.rank(jw) {
                                    let v = tl.index(q, j, c, cp_idx);
                                    let col = tt2l.index(n, p, u, v);
                                    let w2 = bp.basis_product(iw, ap, jw, cp_idx);
                                    for (r1, e1) in w1.iter().enumerate() {
                                        if e1.is_zero() {
                                            continue;
                                        }
                                        for (r2, e2) in w2.iter().enumerate() {
                                            if e2.is_zero() {
                                                continue;
                                            }
                                            let row = tl.index(n, i + j, r1, r2);
                                            let mut val = ring.mul(e1, e2);
                                            if flip {
                                                val = ring.neg(&val);
                                            }
                                            *m.at_mut(row, col) = ring.add(m.at(row, col), &val);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        mats.push(m);
    }
    let mult = ChainMap::new(tt2, t.clone(), lo, mats)?;
    let mut unit = vec![ring.zero(); t.rank(0)];
    for (a, ua) in b.unit.iter().enumerate() {
        if ua.is_zero() {
            continue;
        }
        for (c, uc) in bp.unit.iter().enumerate() {
            if uc.is_zero() {
                continue;
            }
            unit[tl.index(0, 0, a, c)] = ring.mul(ua, uc);
        }
    }
    DGAlgebra::build(t, mult, tt2l, unit)
}

/// End(E) = Hom(E, E) with composition product and identity unit.
pub fn end_dga(e: &FreeComplex) -> Result<DGAlgebra> {
    let base = e.base.clone();
    let ring = &base.ring;
    let mut bumped = e.clone();
    let r = e.total_rank();
    bumped.cap = bumped.cap.max(r * r).max(1);
    let (h, hl) = hom_complex_with_layout(&bumped, &bumped)?;
    let (t2, t2l) = tensor_square(&h)?;
    let entries: usize = (t2.lo.min(h.lo)..=t2.hi().max(h.hi()))
        .map(|n| h.rank(n) * t2l.rank(n))
        .sum();
    if entries > MULT_TABLE_CAP {
        return Err(Error::CapExceeded(format!(
            "endomorphism multiplication table has {entries} entries, cap {MULT_TABLE_CAP}"
        )));
    }
    let lo = t2.lo.min(h.lo);
    let hi = t2.hi().max(h.hi());
    let mut mats = Vec::new();
    for n in lo..=hi {
        let mut m = PolyMat::zero(h.rank(n), t2l.rank(n));
        for p in h.lo..=h.hi() {
            let q = n - p;
            if h.rank(p) == 0 || h.rank(q) == 0 {
                continue;
            }
            // f: E^i → E^{i+p} composed with g: E^j → E^{j+q}: need i = j+q
            for j in e.lo..=e.hi() {
                let i = j + q;
                let (rj, ri, rtop) = (e.rank(j), e.rank(i), e.rank(i + p));
                if rj == 0 || ri == 0 || rtop == 0 {
                    continue;
                }
                for a in 0..rtop {
                    for bmid in 0..ri {
                        let u = hl.index(p, i, a, bmid);
                        for d in 0..rj {
                            let v = hl.index(q, j, bmid, d);
                            let col = t2l.index(n, p, u, v);
                            let row = hl.index(n, j, a, d);
                            *m.at_mut(row, col) = ring.add(m.at(row, col), &ring.one());
                        }
                    }
                }
            }
        }
        mats.push(m);
    }
    let mult = ChainMap::new(t2, h.clone(), lo, mats)?;
    let mut unit = vec![ring.zero(); h.rank(0)];
    for i in e.lo..=e.hi() {
        for a in 0..e.rank(i) {
            unit[hl.index(0, i, a, a)] = ring.one();
        }
    }
    DGAlgebra::build(h, mult, t2l, unit)
}

/// The Azumaya structure map Φ: B ⊗ B^op → End(B), sending b⊗b′ to the
/// endomorphism c ↦ (−1)^{|b′||c|} b·c·b′. Returns the chain map
/// (B⊗B)-complex → Hom(B,B); multiplicativity against the tensor and
/// endomorphism products is checked on all basis pairs up to
/// STRUCT_MAP_CHECK_CAP.
pub fn azumaya_structure_map(b: &DGAlgebra) -> Result<ChainMap> {
    let base = b.complex.base.clone();
    let ring = &base.ring;
    let c = &b.complex;
    let (t2, t2l) = tensor_square(c)?;
    let mut bumped = c.clone();
    let r = c.total_rank();
    bumped.cap = bumped.cap.max(r * r).max(1);
    let (h, hl) = hom_complex_with_layout(&bumped, &bumped)?;
    let lo = t2.lo.min(h.lo);
    let hi = t2.hi().max(h.hi());
    let mut mats = Vec::new();
    for n in lo..=hi {
        let mut m = PolyMat::zero(h.rank(n), t2l.rank(n));
        for i in c.lo..=c.hi() {
            let iq = n - i;
            if c.rank(i) == 0 || c.rank(iq) == 0 {
                continue;
            }
            for a in 0..c.rank(i) {
                for bb in 0..c.rank(iq) {
                    let col = t2l.index(n, i, a, bb);
                    for j in c.lo..=c.hi() {
                        let rj = c.rank(j);
                        if rj == 0 || c.rank(n + j) == 0 {
                            continue;
                        }
                        let flip = (iq * j).rem_euclid(2) == 1; // (−1)^{|b′||c|}
                        for s in 0..rj {
                            let w1 = b.basis_product(i, a, j, s); // b·c
                            let w2 = b.product(i + j, &w1, iq, &{
                                let mut v = vec![ring.zero(); c.rank(iq)];
                                v[bb] = ring.one();
                                v
                            }); // (b·c)·b′
                            for (r2, e) in w2.iter().enumerate() {
                                if e.is_zero() {
                                    continue;
                                }
                                let row = hl.index(n, j, r2, s);
                                let val = if flip { ring.neg(e) } else { e.clone() };
                                *m.at_mut(row, col) = ring.add(m.at(row, col), &val);
                            }
                        }
                    }
                }
            }
        }
        mats.push(m);
    }
    let phi = ChainMap::new(t2, h.clone(), lo, mats)?;
    if t2l.rank(0) <= STRUCT_MAP_CHECK_CAP || phi.source.total_rank() <= STRUCT_MAP_CHECK_CAP {
        check_structure_map_multiplicative(b, &phi, &t2l, &h, &hl)?;
    }
    Ok(phi)
}

/// Φ(x·y) = Φ(x)∘Φ(y) for all basis pairs of B⊗B^op, plus Φ(1⊗1) = id.
fn check_structure_map_multiplicative(
    b: &DGAlgebra,
    phi: &ChainMap,
    t2l: &TensorLayout,
    h: &FreeComplex,
    hl: &HomLayout,
) -> Result<()> {
    let base = b.complex.base.clone();
    let ring = &base.ring;
    let c = &b.complex;
    let op = b.opposite()?;
    // Φ(1⊗1) = identity endomorphism
    let unit_vec = {
        let mut out = vec![ring.zero(); phi.source.rank(0)];
        for (a, ua) in b.unit.iter().enumerate() {
            for (bb, ub) in b.unit.iter().enumerate() {
                if !ua.is_zero() && !ub.is_zero() {
                    out[t2l.index(0, 0, a, bb)] = ring.mul(ua, ub);
                }
            }
        }
        out
    };
    let id_vec = {
        let mut out = vec![ring.zero(); h.rank(0)];
        for i in c.lo..=c.hi() {
            for a in 0..c.rank(i) {
                out[hl.index(0, i, a, a)] = ring.one();
            }
        }
        out
    };
    let apply = |n: i64, x: &[Poly]| -> Vec<Poly> {
        let m = phi.component(n);
        let mut out = vec![ring.zero(); m.rows];
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (r, slot) in out.iter_mut().enumerate() {
                let e = m.at(r, j);
                if !e.is_zero() {
                    *slot = ring.add(slot, &ring.mul(xj, e));
                }
            }
        }
        out.iter().map(|p| base.normal_form(p)).collect()
    };
    if apply(0, &unit_vec) != id_vec {
        return Err(Error::InvalidInput("structure map is not unital".into()));
    }
    // compose two endomorphism vectors (degrees n1, n2) in End(B)
    let compose = |n1: i64, f: &[Poly], n2: i64, g: &[Poly]| -> Vec<Poly> {
        let n = n1 + n2;
        let mut out = vec![ring.zero(); hl.rank(n)];
        for j in c.lo..=c.hi() {
            let i = j + n2;
            // g: E^j → E^{j+n2} = E^i, f: E^i → E^{i+n1}
            for a in 0..c.rank(i + n1) {
                for bmid in 0..c.rank(i) {
                    let fp = &f[hl.index(n1, i, a, bmid)];
                    if fp.is_zero() {
                        continue;
                    }
                    for d in 0..c.rank(j) {
                        let gp = &g[hl.index(n2, j, bmid, d)];
                        if gp.is_zero() {
                            continue;
                        }
                        let idx = hl.index(n, j, a, d);
                        out[idx] = ring.add(&out[idx], &ring.mul(fp, gp));
                    }
                }
            }
        }
        out.iter().map(|p| base.normal_form(p)).collect()
    };
    // product in B ⊗ B^op on basis pairs, as a coordinate vector
    let pair_product = |i: i64, a: usize, iq: i64, bb: usize,
                        j: i64, cc: usize, jq: i64, dd: usize|
     -> Vec<Poly> {
        let n = i + iq + j + jq;
        let mut out = vec![ring.zero(); t2l.rank(n)];
        let w1 = b.basis_product(i, a, j, cc);
        let w2 = op.basis_product(iq, bb, jq, dd);
        let flip = (iq * j).rem_euclid(2) == 1;
        for (r1, e1) in w1.iter().enumerate() {
            if e1.is_zero() {
                continue;
            }
            for (r2, e2) in w2.iter().enumerate() {
                if e2.is_zero() {
                    continue;
                }
                let mut val = ring.mul(e1, e2);
                if flip {
                    val = ring.neg(&val);
                }
                let idx = t2l.index(n, i + j, r1, r2);
                out[idx] = ring.add(&out[idx], &val);
            }
        }
        out
    };
    for i in c.lo..=c.hi() {
        for iq in c.lo..=c.hi() {
            for j in c.lo..=c.hi() {
                for jq in c.lo..=c.hi() {
                    for a in 0..c.rank(i) {
                        for bb in 0..c.rank(iq) {
                            let x = {
                                let mut v = vec![ring.zero(); t2l.rank(i + iq)];
                                v[t2l.index(i + iq, i, a, bb)] = ring.one();
                                v
                            };
                            let fx = apply(i + iq, &x);
                            for cc in 0..c.rank(j) {
                                for dd in 0..c.rank(jq) {
                                    let y = {
                                        let mut v = vec![ring.zero(); t2l.rank(j + jq)];
                                        v[t2l.index(j + jq, j, cc, dd)] = ring.one();
                                        v
                                    };
                                    let xy = pair_product(i, a, iq, bb, j, cc, jq, dd);
                                    let lhs = apply(i + iq + j + jq, &xy);
                                    let fy = apply(j + jq, &y);
                                    let rhs = compose(i + iq, &fx, j + jq, &fy);
                                    if lhs != rhs {
                                        return Err(Error::InvalidInput(format!(
                                            "structure map not multiplicative on pair ({i},{a};{iq},{bb})·({j},{cc};{jq},{dd})"
                                        )));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// A unital multiplicative chain map between dg-algebras.
#[derive(Debug, Clone)]
pub struct DGAlgebraMorphism {
    pub source: DGAlgebra,
    pub target: DGAlgebra,
    pub chain: ChainMap,
}

impl DGAlgebraMorphism {
    pub fn new(source: DGAlgebra, target: DGAlgebra, chain: ChainMap) -> Result<Self> {
        if chain.source != source.complex || chain.target != target.complex {
            return Err(Error::ShapeError("chain map endpoints do not match the algebras".into()));
        }
        let base = source.complex.base.clone();
        let ring = &base.ring;
        let apply = |n: i64, x: &[Poly]| -> Vec<Poly> {
            let m = chain.component(n);
            let mut out = vec![ring.zero(); m.rows];
            for (j, xj) in x.iter().enumerate() {
                if xj.is_zero() {
                    continue;
                }
                for (r, slot) in out.iter_mut().enumerate() {
                    let e = m.at(r, j);
                    if !e.is_zero() {
                        *slot = ring.add(slot, &ring.mul(xj, e));
                    }
                }
            }
            out.iter().map(|p| base.normal_form(p)).collect()
        };
        if apply(0, &source.unit) != target.unit.iter().map(|p| base.normal_form(p)).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("morphism does not preserve the unit".into()));
        }
        let c = &source.complex;
        for i in c.lo..=c.hi() {
            for j in c.lo..=c.hi() {
                for a in 0..c.rank(i) {
                    for bb in 0..c.rank(j) {
                        let xy = source.basis_product(i, a, j, bb);
                        let lhs = apply(i + j, &xy);
                        let mut ea = vec![ring.zero(); c.rank(i)];
                        ea[a] = ring.one();
                        let mut eb = vec![ring.zero(); c.rank(j)];
                        eb[bb] = ring.one();
                        let rhs = target.product(i, &apply(i, &ea), j, &apply(j, &eb));
                        if lhs != rhs {
                            return Err(Error::InvalidInput(format!(
                                "morphism not multiplicative on basis pair ({i},{a})·({j},{bb})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(DGAlgebraMorphism { source, target, chain })
    }
}

/// A right dg-module action M ⊗ B → M (the chain-map condition is the
/// Leibniz rule; unit and associativity verified on basis elements).
#[derive(Debug, Clone)]
pub struct RightDGAction {
    pub algebra: DGAlgebra,
    pub module: FreeComplex,
    pub action: ChainMap,
    pub layout: TensorLayout,
}

impl RightDGAction {
    pub fn new(algebra: DGAlgebra, module: FreeComplex, action_mats: Vec<PolyMat>) -> Result<Self> {
        if algebra.complex.base != module.base {
            return Err(Error::RingMismatch("module and algebra over different base rings".into()));
        }
        let base = module.base.clone();
        let ring = &base.ring;
        let mut m_bumped = module.clone();
        m_bumped.cap = m_bumped.cap.max(module.total_rank() * algebra.complex.total_rank()).max(1);
        let mut a_bumped = algebra.complex.clone();
        a_bumped.cap = m_bumped.cap;
        let (t, layout) = tensor_with_layout(&m_bumped, &a_bumped)?;
        let lo = t.lo.min(module.lo);
        let action = ChainMap::new(t, module.clone(), lo, action_mats)?;
        let act = RightDGAction { algebra, module, action, layout };
        // basis products m·b
        let apply = |p: i64, x: &[Poly], q: i64, y: &[Poly]| -> Vec<Poly> {
            let n = p + q;
            let m = act.action.component(n);
            let mut out = vec![ring.zero(); act.module.rank(n)];
            for (a, xa) in x.iter().enumerate() {
                if xa.is_zero() {
                    continue;
                }
                for (bb, yb) in y.iter().enumerate() {
                    if yb.is_zero() {
                        continue;
                    }
                    let coef = ring.mul(xa, yb);
                    let col = act.layout.index(n, p, a, bb);
                    for (r, slot) in out.iter_mut().enumerate() {
                        let e = m.at(r, col);
                        if !e.is_zero() {
                            *slot = ring.add(slot, &ring.mul(&coef, e));
                        }
                    }
                }
            }
            out.iter().map(|p| base.normal_form(p)).collect()
        };
        let md = &act.module;
        let al = &act.algebra;
        for p in md.lo..=md.hi() {
            for a in 0..md.rank(p) {
                let mut ea = vec![ring.zero(); md.rank(p)];
                ea[a] = ring.one();
                if apply(p, &ea, 0, &al.unit) != ea {
                    return Err(Error::InvalidInput(format!(
                        "action unit axiom fails on basis element {a} of degree {p}"
                    )));
                }
                for i in al.complex.lo..=al.complex.hi() {
                    for bb in 0..al.complex.rank(i) {
                        let mut eb = vec![ring.zero(); al.complex.rank(i)];
                        eb[bb] = ring.one();
                        let ma = apply(p, &ea, i, &eb);
                        for j in al.complex.lo..=al.complex.hi() {
                            for cc in 0..al.complex.rank(j) {
                                let mut ec = vec![ring.zero(); al.complex.rank(j)];
                                ec[cc] = ring.one();
                                let lhs = apply(p + i, &ma, j, &ec);
                                let bc = al.basis_product(i, bb, j, cc);
                                let rhs = apply(p, &ea, i + j, &bc);
                                if lhs != rhs {
                                    return Err(Error::InvalidInput(format!(
                                        "action associativity fails on (deg {p} elt {a})·({i},{bb})·({j},{cc})"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(act)
    }

    /// m·b for coordinate vectors (m in module degree p, b in algebra
    /// degree q).
    pub fn apply(&self, p: i64, x: &[Poly], q: i64, y: &[Poly]) -> Vec<Poly> {
        let base = &self.module.base;
        let ring = &base.ring;
        let n = p + q;
        let m = self.action.component(n);
        let mut out = vec![ring.zero(); self.module.rank(n)];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (bb, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let coef = ring.mul(xa, yb);
                let col = self.layout.index(n, p, a, bb);
                for (r, slot) in out.iter_mut().enumerate() {
                    let e = m.at(r, col);
                    if !e.is_zero() {
                        *slot = ring.add(slot, &ring.mul(&coef, e));
                    }
                }
            }
        }
        out.iter().map(|p| base.normal_form(p)).collect()
    }

    /// Right multiplication of B on itself.
    pub fn regular(algebra: &DGAlgebra) -> Result<Self> {
        let mats: Vec<PolyMat> = (algebra.mult.lo
            ..algebra.mult.lo + algebra.mult.maps.len() as i64)
            .map(|n| algebra.mult.component(n))
            .collect();
        RightDGAction::new(algebra.clone(), algebra.complex.clone(), mats)
    }
}

/// A chain map intertwining two right actions of the same algebra:
/// φ(m·b) = φ(m)·b on all basis pairs.
#[derive(Debug, Clone)]
pub struct DGBimoduleMap {
    pub chain: ChainMap,
    pub source_action: RightDGAction,
    pub target_action: RightDGAction,
}

impl DGBimoduleMap {
    pub fn new(
        chain: ChainMap,
        source_action: RightDGAction,
        target_action: RightDGAction,
    ) -> Result<Self> {
        if source_action.algebra != target_action.algebra {
            return Err(Error::RingMismatch("actions of different algebras".into()));
        }
        if chain.source != source_action.module || chain.target != target_action.module {
            return Err(Error::ShapeError("chain map endpoints do not match the modules".into()));
        }
        let base = chain.source.base.clone();
        let ring = &base.ring;
        let apply_chain = |n: i64, x: &[Poly]| -> Vec<Poly> {
            let m = chain.component(n);
            let mut out = vec![ring.zero(); m.rows];
            for (j, xj) in x.iter().enumerate() {
                if xj.is_zero() {
                    continue;
                }
                for (r, slot) in out.iter_mut().enumerate() {
                    let e = m.at(r, j);
                    if !e.is_zero() {
                        *slot = ring.add(slot, &ring.mul(xj, e));
                    }
                }
            }
            out.iter().map(|p| base.normal_form(p)).collect()
        };
        let md = &source_action.module;
        let al = &source_action.algebra.complex;
        for p in md.lo..=md.hi() {
            for a in 0..md.rank(p) {
                let mut ea = vec![ring.zero(); md.rank(p)];
                ea[a] = ring.one();
                for i in al.lo..=al.hi() {
                    for bb in 0..al.rank(i) {
                        let mut eb = vec![ring.zero(); al.rank(i)];
                        eb[bb] = ring.one();
                        let lhs = apply_chain(p + i, &source_action.apply(p, &ea, i, &eb));
                        let rhs = target_action.apply(p, &apply_chain(p, &ea), i, &eb);
                        if lhs != rhs {
                            return Err(Error::InvalidInput(format!(
                                "map does not intertwine the actions on (deg {p} elt {a})·({i},{bb})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(DGBimoduleMap { chain, source_action, target_action })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::cone;
    use crate::cring::MonomialOrder;
    use crate::cring::PolyRing;
    use crate::scalars::Field;

    fn q() -> PolyAlgebra {
        PolyAlgebra::ground_field(Field::Q)
    }

    fn qx() -> PolyAlgebra {
        let ring = PolyRing::new(Field::Q, vec!["x".into()], MonomialOrder::DegRevLex);
        PolyAlgebra::new(ring, vec![]).unwrap()
    }

    #[test]
    fn unit_algebra_and_structure_map() {
        let a = DGAlgebra::unit_algebra(q()).unwrap();
        assert!(a.assoc_verified);
        let phi = azumaya_structure_map(&a).unwrap();
        let (qi, _) = phi.is_quasi_iso().unwrap();
        assert!(qi);
    }

    #[test]
    fn matrix_algebra_is_azumaya_shaped() {
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        assert!(m2.assoc_verified);
        // E₀₁ · E₁₀ = E₀₀, E₁₀ · E₀₁ = E₁₁
        let p = m2.basis_product(0, 1, 0, 2);
        assert!(!p[0].is_zero() && p.iter().skip(1).all(|c| c.is_zero()));
        let phi = azumaya_structure_map(&m2).unwrap();
        let mat = phi.component(0).to_scalar(Field::Q).unwrap();
        assert_eq!(mat.rank(), 16);
        let (qi, _) = phi.is_quasi_iso().unwrap();
        assert!(qi);
    }

    #[test]
    fn commutative_algebras_fail_az2() {
        // k×k: image of the structure map is the multiplication action
        let kk = DGAlgebra::product_algebra(q(), 2).unwrap();
        let phi = azumaya_structure_map(&kk).unwrap();
        let mat = phi.component(0).to_scalar(Field::Q).unwrap();
        assert_eq!(mat.rank(), 2);
        let (qi, _) = phi.is_quasi_iso().unwrap();
        assert!(!qi);
        // dual numbers: rank 2 in 4-dimensional End
        let dn = DGAlgebra::dual_numbers(q()).unwrap();
        let phi2 = azumaya_structure_map(&dn).unwrap();
        assert_eq!(phi2.component(0).to_scalar(Field::Q).unwrap().rank(), 2);
        let (qi2, _) = phi2.is_quasi_iso().unwrap();
        assert!(!qi2);
    }

    #[test]
    fn tensor_of_split_algebras_stays_commutative() {
        let kk = DGAlgebra::product_algebra(q(), 2).unwrap();
        let t = tensor_dga(&kk, &kk).unwrap();
        assert_eq!(t.complex.ranks, vec![4]);
        assert!(t.assoc_verified);
        let phi = azumaya_structure_map(&t).unwrap();
        // commutative: image rank is 4, far below 16
        assert_eq!(phi.component(0).to_scalar(Field::Q).unwrap().rank(), 4);
    }

    #[test]
    fn quaternions_over_q() {
        let base = q();
        let minus1 = base.ring.constant(Field::Q.from_i64(-1));
        let h = DGAlgebra::quaternion_algebra(base, &minus1, &minus1).unwrap();
        assert!(h.assoc_verified);
        // i·j = k, j·i = −k
        let ij = h.basis_product(0, 1, 0, 2);
        let ji = h.basis_product(0, 2, 0, 1);
        assert_eq!(ij[3], h.complex.base.ring.one().clone());
        assert_eq!(ji[3], h.complex.base.ring.neg(&h.complex.base.ring.one()));
        let phi = azumaya_structure_map(&h).unwrap();
        assert_eq!(phi.component(0).to_scalar(Field::Q).unwrap().rank(), 16);
        let (qi, _) = phi.is_quasi_iso().unwrap();
        assert!(qi);
    }

    #[test]
    fn opposite_involution_and_commutative_fixed() {
        let kk = DGAlgebra::product_algebra(q(), 3).unwrap();
        assert_eq!(kk.opposite().unwrap(), kk);
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let op = m2.opposite().unwrap();
        assert_ne!(op, m2);
        assert_eq!(op.opposite().unwrap(), m2);
    }

    #[test]
    fn opposite_matrix_algebra_via_transpose() {
        // transpose: M₂ᵒᵖ → M₂ is an algebra isomorphism
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let op = m2.opposite().unwrap();
        let ring = &m2.complex.base.ring;
        // E_{ab} ↦ E_{ba}: flat index a·2+b ↦ b·2+a
        let perm = PolyMat::from_fn(4, 4, |i, j| {
            let (a, b) = (j / 2, j % 2);
            if i == b * 2 + a {
                ring.one()
            } else {
                ring.zero()
            }
        });
        let chain = ChainMap::new(op.complex.clone(), m2.complex.clone(), 0, vec![perm]).unwrap();
        let iso = DGAlgebraMorphism::new(op, m2, chain);
        assert!(iso.is_ok());
    }

    #[test]
    fn tensor_with_unit_is_identity() {
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let a = DGAlgebra::unit_algebra(q()).unwrap();
        let t = tensor_dga(&m2, &a).unwrap();
        assert_eq!(t, m2);
    }

    #[test]
    fn end_of_free_modules() {
        let base = q();
        // End(A) = A
        let e1 = end_dga(&FreeComplex::unit(base.clone())).unwrap();
        assert_eq!(e1, DGAlgebra::unit_algebra(base.clone()).unwrap());
        // End(A²) = M₂(A)
        let e2 = end_dga(&FreeComplex::free_module(base.clone(), 2)).unwrap();
        assert_eq!(e2, DGAlgebra::matrix_algebra(base.clone(), 2).unwrap());
    }

    #[test]
    fn graded_endomorphism_algebra() {
        // End(k ⊕ k[1]): ranks (1,2,1) in degrees −1..1
        let base = q();
        let unit = FreeComplex::unit(base.clone());
        let e = unit.direct_sum(&unit.shift(1)).unwrap();
        let dga = end_dga(&e).unwrap();
        assert_eq!(dga.complex.lo, -1);
        assert_eq!(dga.complex.ranks, vec![1, 2, 1]);
        assert!(dga.assoc_verified);
        // Euler characteristic of End is (Σ(−1)^i r_i)²
        assert_eq!(dga.complex.euler_characteristic(), (1i64 - 1).pow(2));
        let e2 = FreeComplex::free_module(base.clone(), 2)
            .direct_sum(&FreeComplex::unit(base.clone()).shift(1))
            .unwrap();
        let dga2 = end_dga(&e2).unwrap();
        assert_eq!(dga2.complex.euler_characteristic(), (2i64 - 1).pow(2));
        // the structure map of End*(V) is a quasi-isomorphism
        let phi = azumaya_structure_map(&dga).unwrap();
        let (qi, _) = phi.is_quasi_iso().unwrap();
        assert!(qi);
    }

    #[test]
    fn end_of_a_complex_with_differential() {
        // End(cone(×x)) over ℚ[x]: composition must satisfy Leibniz
        let a = qx();
        let x = a.ring.var(0);
        let k = cone(&ChainMap::mul_by(&FreeComplex::unit(a.clone()), &x)).unwrap();
        let dga = end_dga(&k).unwrap();
        assert_eq!(dga.complex.ranks, vec![1, 2, 1]);
        assert!(dga.assoc_verified);
        // id is a cycle in degree 0
        let d0 = dga.complex.diff(0);
        let mut idv = vec![a.ring.zero(); 2];
        idv[0] = a.ring.one();
        idv[1] = a.ring.one();
        for r in 0..d0.rows {
            let mut acc = a.ring.zero();
            for c in 0..2 {
                acc = a.ring.add(&acc, &a.ring.mul(d0.at(r, c), &idv[c]));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn structure_map_commutes_with_base_change() {
        // B = A[ε] with ε² = x over A = ℚ[x]
        let a = qx();
        let ring = a.ring.clone();
        let table = move |i: usize, j: usize| {
            let mut out = vec![ring.zero(); 2];
            match i + j {
                0 => out[0] = ring.one(),
                1 => out[1] = ring.one(),
                2 => out[0] = ring.var(0),
                _ => unreachable!(),
            }
            out
        };
        let unit = vec![a.ring.one(), a.ring.zero()];
        let b = DGAlgebra::degree_zero(a.clone(), 2, table, unit).unwrap();
        let phi = azumaya_structure_map(&b).unwrap();
        let fq = Field::Q;
        for v in [0i64, 2, 5] {
            let pt = PointSpec::Base { field: fq, coords: vec![fq.from_i64(v)] };
            // evaluate the global map at the point
            let evaluated = phi.component(0).eval_base(&a.ring, &[fq.from_i64(v)]).unwrap();
            // structure map of the fiber algebra
            let fiber = b.evaluate_at_point(&pt).unwrap();
            let phi_fiber = azumaya_structure_map(&fiber).unwrap();
            let direct = phi_fiber.component(0).to_scalar(fq).unwrap();
            assert_eq!(evaluated, direct, "x = {v}");
            // commutative fibers: the image is the multiplication action
            assert_eq!(direct.rank(), 2, "x = {v}");
        }
    }

    #[test]
    fn bad_tables_rejected() {
        let base = q();
        let ring = base.ring.clone();
        // non-associative: quaternion table with k·k sign flipped
        let one = ring.one();
        let table = move |i: usize, j: usize| {
            let elem = |idx: usize, c: Poly| {
                let mut v = vec![ring.zero(); 4];
                v[idx] = c;
                v
            };
            let m1 = ring.neg(&one);
            match (i, j) {
                (0, t) => elem(t, one.clone()),
                (s, 0) => elem(s, one.clone()),
                (1, 1) => elem(0, m1.clone()),
                (1, 2) => elem(3, one.clone()),
                (1, 3) => elem(2, m1.clone()),
                (2, 1) => elem(3, m1.clone()),
                (2, 2) => elem(0, m1.clone()),
                (2, 3) => elem(1, one.clone()),
                (3, 1) => elem(2, one.clone()),
                (3, 2) => elem(1, m1.clone()),
                (3, 3) => elem(0, one.clone()), // should be −(−1)(−1) = −1
                _ => unreachable!(),
            }
        };
        let mut unit = vec![base.ring.zero(); 4];
        unit[0] = base.ring.one();
        let bad = DGAlgebra::degree_zero(base.clone(), 4, table, unit);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
        // wrong unit
        let ring2 = base.ring.clone();
        let table2 = move |i: usize, j: usize| {
            let mut out = vec![ring2.zero(); 2];
            if i == j {
                out[i] = ring2.one();
            }
            out
        };
        let bad_unit = vec![base.ring.one(), base.ring.zero()];
        let bad2 = DGAlgebra::degree_zero(base, 2, table2, bad_unit);
        assert!(matches!(bad2, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn regular_action_and_bimodule_map() {
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let act = RightDGAction::regular(&m2).unwrap();
        // left multiplication by E₀₁ commutes with the right action
        let ring = &m2.complex.base.ring;
        let mut lmat = PolyMat::zero(4, 4);
        for cidx in 0..4usize {
            // E₀₁ · E_{cd}: nonzero iff c = 1, giving E₀d
            let (c, d) = (cidx / 2, cidx % 2);
            if c == 1 {
                *lmat.at_mut(d, cidx) = ring.one();
            }
        }
        let chain =
            ChainMap::new(m2.complex.clone(), m2.complex.clone(), 0, vec![lmat]).unwrap();
        let ok = DGBimoduleMap::new(chain, act.clone(), act.clone());
        assert!(ok.is_ok());
        // right multiplication by E₀₁ does NOT commute with the right action
        let mut rmat = PolyMat::zero(4, 4);
        for cidx in 0..4usize {
            let (c, d) = (cidx / 2, cidx % 2);
            if d == 0 {
                *rmat.at_mut(c * 2 + 1, cidx) = ring.one();
            }
        }
        let chain2 =
            ChainMap::new(m2.complex.clone(), m2.complex.clone(), 0, vec![rmat]).unwrap();
        let bad = DGBimoduleMap::new(chain2, act.clone(), act);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tensor_of_matrix_algebras() {
        // M₂ ⊗ M₂: rank 16, associative, structure constants consistent
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let t = tensor_dga(&m2, &m2).unwrap();
        assert_eq!(t.complex.ranks, vec![16]);
        assert!(t.assoc_verified);
        // its unit is E₀₀⊗E₀₀-style diagonal: product of units
        let u = &t.unit;
        let nonzero = u.iter().filter(|p| !p.is_zero()).count();
        assert_eq!(nonzero, 4);
    }
}
