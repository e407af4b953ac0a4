//! The verdict engine: compact-generator checks (Az-1), structure-map
//! quasi-isomorphism (Az-2), support ideals, smoothness semidecision,
//! Morita-witness verification and trivialization search over finite
//! fields. Every negative verdict carries a machine-checkable
//! certificate.

use crate::complexes::{hom_complex_with_layout, FreeComplex, HomologyReport, DegreeHomology, PolyMat};
use crate::cring::{cmp_polys, ExtFieldDef, Poly, PointSpec, SubmodulePresentation};
use crate::dgalg::{azumaya_structure_map, end_dga, DGAlgebra, DGAlgebraMorphism, RightDGAction};
use crate::scalars::{Field, FieldElement, Matrix, SparseMat};
use crate::{ChainMap, Error, PolyAlgebra, Result};

/// Cap on the number of generators of a support ideal (product of the
/// per-degree fitting ideals).
pub const SUPPORT_GEN_CAP: usize = 4096;

/// Witness-point search: extension degrees tried over F_p, and the cap on
/// enumerated points per field.
pub const POINT_SEARCH_EXT_DEGREE: usize = 3;
pub const POINT_SEARCH_CAP: u64 = 100_000;

/// Small rational coordinates tried for witness points over ℚ.
const Q_SEARCH_COORDS: [i64; 8] = [0, 1, -1, 2, -2, 3, -3, 5];
const Q_SEARCH_TUPLE_CAP: usize = 4096;

/// Default resolution depth for the smoothness semidecision.
pub const DEFAULT_DEPTH_BOUND: usize = 8;
/// Internal dimension cap for bimodule syzygies.
pub const SMOOTH_DIM_CAP: usize = 2048;

/// Defaults for the trivialization search.
pub const DEFAULT_TRIV_RANK_BOUND: usize = 4;
pub const DEFAULT_TRIV_STEP_BUDGET: u64 = 2_000_000;

/// How (Az-1) was decided.
#[derive(Debug, Clone)]
pub enum Az1Certificate {
    /// χ(E) ≠ 0: no fiber can be acyclic.
    EulerShortcut { chi: i64 },
    /// Every generator of the support ideal is nilpotent, so the support
    /// is all of Spec A. An empty list is the zero ideal.
    NilpotentSupport { generators: Vec<Poly> },
    /// E is acyclic: empty support.
    Acyclic,
    /// A verified point with acyclic fiber.
    FailingPoint { point: PointSpec },
    /// A non-nilpotent support generator (no explicit point found within
    /// the search budget; the verdict is still sound).
    NonNilpotent { generator: Poly },
}

/// How (Az-2) was decided: the homology of the cone of the structure
/// map, plus whether the degree-0-over-a-field streaming path was used.
#[derive(Debug, Clone)]
pub struct Az2Certificate {
    pub cone: HomologyReport,
    pub fast_path: bool,
}

#[derive(Debug, Clone)]
pub struct AzumayaVerdict {
    pub az1: bool,
    pub az1_certificate: Az1Certificate,
    pub az2: bool,
    pub az2_certificate: Az2Certificate,
    pub overall: bool,
}

/// Generators of J = Π_i fitting0(H^i(E)): V(J) = supp(E). The empty
/// list is the zero ideal (full support); `[1]` is the unit ideal
/// (empty support).
pub fn support_ideal(e: &FreeComplex) -> Result<Vec<Poly>> {
    let h = e.homology()?;
    support_from_report(&e.base, &h)
}

fn support_from_report(base: &PolyAlgebra, h: &HomologyReport) -> Result<Vec<Poly>> {
    let ring = &base.ring;
    let mut gens: Vec<Poly> = vec![ring.one()];
    for d in &h.degrees {
        if d.is_zero {
            continue; // factor (1)
        }
        if d.fitting.is_empty() {
            return Ok(Vec::new()); // factor (0): full support
        }
        let mut next: Vec<Poly> = Vec::new();
        for g in &gens {
            for f in &d.fitting {
                let p = base.normal_form(&ring.mul(g, f));
                if p.is_zero() {
                    continue;
                }
                let p = ring.make_monic(&p);
                if !next.contains(&p) {
                    next.push(p);
                }
                if next.len() > SUPPORT_GEN_CAP {
                    return Err(Error::CapExceeded(format!(
                        "support ideal exceeds {SUPPORT_GEN_CAP} generators"
                    )));
                }
            }
        }
        gens = next;
        if gens.is_empty() {
            // all products reduced to zero: the ideal is zero in A
            return Ok(Vec::new());
        }
    }
    if gens.iter().any(|g| g.as_constant(base.field()).map_or(false, |c| !c.is_zero())) {
        return Ok(vec![ring.one()]);
    }
    gens.sort_by(|a, b| cmp_polys(ring, a, b));
    Ok(gens)
}

/// Does E ⊗ k(p) ≠ 0 hold for every point p, i.e. is E a compact
/// generator of D(A)? Decided by the Euler-characteristic shortcut, then
/// nilpotence of the support ideal; failing verdicts search for an
/// explicit point with acyclic fiber.
pub fn is_compact_generator(e: &FreeComplex) -> Result<(bool, Az1Certificate)> {
    let chi = e.euler_characteristic();
    if chi != 0 {
        return Ok((true, Az1Certificate::EulerShortcut { chi }));
    }
    let h = e.homology()?;
    if h.is_acyclic() {
        return Ok((false, Az1Certificate::Acyclic));
    }
    let j = support_from_report(&e.base, &h)?;
    if j.is_empty() {
        return Ok((true, Az1Certificate::NilpotentSupport { generators: j }));
    }
    let mut bad = None;
    for g in &j {
        if !e.base.radical_membership(g)? {
            bad = Some(g.clone());
            break;
        }
    }
    let Some(bad) = bad else {
        return Ok((true, Az1Certificate::NilpotentSupport { generators: j }));
    };
    if let Some(point) = find_acyclic_fiber(e)? {
        return Ok((false, Az1Certificate::FailingPoint { point }));
    }
    Ok((false, Az1Certificate::NonNilpotent { generator: bad }))
}

/// Deterministic search for a point with acyclic fiber: F_p points, then
/// F_{p^k} up to degree 3; over ℚ, small integer coordinates.
fn find_acyclic_fiber(e: &FreeComplex) -> Result<Option<PointSpec>> {
    let base = &e.base;
    let fiber_acyclic = |pt: &PointSpec| -> Result<bool> {
        let (fiber, _) = e.evaluate_at_point(pt)?;
        Ok(fiber.homology()?.is_acyclic())
    };
    match base.field() {
        Field::Fp(p) => {
            for k in 1..=POINT_SEARCH_EXT_DEGREE {
                let def = if k == 1 { None } else { Some(ExtFieldDef::find(p, k)?) };
                let points = match base.enumerate_points(def.as_ref(), POINT_SEARCH_CAP) {
                    Ok(pts) => pts,
                    Err(Error::CapExceeded(_)) => continue,
                    Err(e) => return Err(e),
                };
                for pt in points {
                    if fiber_acyclic(&pt)? {
                        return Ok(Some(pt));
                    }
                }
            }
            Ok(None)
        }
        Field::Q => {
            let n = base.ring.nvars();
            if n == 0 {
                return Ok(None);
            }
            let m = Q_SEARCH_COORDS.len();
            let total = m.checked_pow(n as u32).unwrap_or(usize::MAX).min(Q_SEARCH_TUPLE_CAP);
            let field = Field::Q;
            for idx in 0..total {
                let mut rem = idx;
                let coords: Vec<FieldElement> = (0..n)
                    .map(|_| {
                        let c = field.from_i64(Q_SEARCH_COORDS[rem % m]);
                        rem /= m;
                        c
                    })
                    .collect();
                let pt = PointSpec::Base { field, coords };
                if base.validate_point(&pt).is_err() {
                    continue;
                }
                if fiber_acyclic(&pt)? {
                    return Ok(Some(pt));
                }
            }
            Ok(None)
        }
    }
}

/// Bounded complexes of finite free modules are perfect, hence proper.
pub fn is_proper(_b: &DGAlgebra) -> bool {
    true
}

/// The full (Az-1) ∧ (Az-2) verdict.
pub fn verify_azumaya(b: &DGAlgebra) -> Result<AzumayaVerdict> {
    let (az1, az1_certificate) = is_compact_generator(&b.complex)?;
    let (az2, az2_certificate) = verify_az2(b)?;
    Ok(AzumayaVerdict { az1, az1_certificate, az2, az2_certificate, overall: az1 && az2 })
}

fn verify_az2(b: &DGAlgebra) -> Result<(bool, Az2Certificate)> {
    let c = &b.complex;
    if c.base.is_ground_field() && c.lo == 0 && c.ranks.len() == 1 {
        return verify_az2_streaming(b);
    }
    let phi = azumaya_structure_map(b)?;
    let (qi, cone) = phi.is_quasi_iso()?;
    Ok((qi, Az2Certificate { cone, fast_path: false }))
}

/// Degree-0 over a field: the structure map is an r²×r² scalar matrix;
/// its rank decides (Az-2) without ever materializing a dense chain map.
/// Rows (one per basis pair b⊗b′, listing the endomorphism c ↦ b·c·b′)
/// stream into a sparse online-echelon rank computation.
fn verify_az2_streaming(b: &DGAlgebra) -> Result<(bool, Az2Certificate)> {
    let field = b.complex.base.field();
    let r = b.complex.ranks[0];
    let rr = r * r;
    let m = b.mult.component(0).to_scalar(field)?;
    // column supports of the multiplication table
    let mut support: Vec<Vec<(usize, FieldElement)>> = vec![Vec::new(); rr];
    for col in 0..rr {
        for row in 0..r {
            let v = m.at(row, col);
            if !v.is_zero() {
                support[col].push((row, v.clone()));
            }
        }
    }
    let mut sm = SparseMat::new(field, rr);
    let mut dense = vec![field.zero(); rr];
    for a in 0..r {
        for bb in 0..r {
            for x in dense.iter_mut() {
                *x = field.zero();
            }
            for s in 0..r {
                for (t, v1) in &support[a * r + s] {
                    for (u, v2) in &support[t * r + bb] {
                        let idx = u * r + s; // Hom-basis index of E_{u,s}
                        dense[idx] = dense[idx].add(&v1.mul(v2));
                    }
                }
            }
            let row: Vec<(usize, FieldElement)> = dense
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect();
            sm.push_row(row);
        }
    }
    let rank = sm.rank();
    let defect = rr - rank;
    let base = b.complex.base.clone();
    let mk = |degree: i64, dim: usize| -> Result<DegreeHomology> {
        Ok(DegreeHomology {
            degree,
            kernel_generators: dim,
            presentation: SubmodulePresentation::new(dim, Vec::new())?,
            fitting: if dim == 0 { vec![base.ring.one()] } else { Vec::new() },
            is_zero: dim == 0,
            dimension: Some(dim),
        })
    };
    // cone of Φ: ranks (rr, rr) in degrees (−1, 0); homology dims are the
    // kernel/cokernel dimensions
    let cone = HomologyReport { degrees: vec![mk(-1, defect)?, mk(0, defect)?] };
    Ok((defect == 0, Az2Certificate { cone, fast_path: true }))
}

/// Dense reference path for (Az-2), used by tests to pin the streaming
/// path against the chain-level definition.
#[cfg(test)]
pub(crate) fn verify_az2_dense(b: &DGAlgebra) -> Result<(bool, HomologyReport)> {
    let phi = azumaya_structure_map(b)?;
    phi.is_quasi_iso()
}

/// Smoothness semidecision: resolve B as a B⊗B^op-module step by step,
/// testing projectivity (a linear splitting problem) at each syzygy.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothVerdict {
    Smooth { resolution_length: usize },
    NotEstablished { depth_bound: usize },
}

/// Field linear-algebra model of a finite-dimensional module over the
/// enveloping algebra T = B ⊗ B^op: a dimension and one action matrix
/// per T-basis element.
struct TModule {
    dim: usize,
    act: Vec<Matrix>,
}

pub fn is_smooth(b: &DGAlgebra, depth_bound: usize) -> Result<SmoothVerdict> {
    let c = &b.complex;
    if !(c.base.is_ground_field() && c.lo == 0 && c.ranks.len() == 1) {
        return Err(Error::Unsupported(
            "smoothness check requires an algebra concentrated in degree 0 over a field".into(),
        ));
    }
    let field = c.base.field();
    let r = c.ranks[0];
    let n = r * r; // dim T
    let m = b.mult.component(0).to_scalar(field)?;
    // left-multiplication matrices of T-basis elements on T:
    // (e_i⊗e_j)·(e_a⊗e_b) = (e_i e_a) ⊗ (e_b e_j)
    let t_left: Vec<Matrix> = (0..n)
        .map(|ij| {
            let (i, j) = (ij / r, ij % r);
            Matrix::from_fn(field, n, n, |uv, ab| {
                let (u, v) = (uv / r, uv % r);
                let (a, bb) = (ab / r, ab % r);
                m.at(u, i * r + a).mul(m.at(v, bb * r + j))
            })
        })
        .collect();
    // B as a T-module: (e_i⊗e_j)·e_s = e_i e_s e_j
    let b_act: Vec<Matrix> = (0..n)
        .map(|ij| {
            let (i, j) = (ij / r, ij % r);
            Matrix::from_fn(field, r, r, |row, s| {
                let mut acc = field.zero();
                for t in 0..r {
                    acc = acc.add(&m.at(t, i * r + s).mul(m.at(row, t * r + j)));
                }
                acc
            })
        })
        .collect();
    // T-linearity of a splitting only needs to be enforced on an algebra
    // generating set of T: the elements e_k⊗1 and 1⊗e_k suffice, since
    // their products span every basis pair and the action matrices are
    // multiplicative.
    let unit_sc: Vec<FieldElement> = b
        .unit
        .iter()
        .map(|u| u.as_constant(field).ok_or_else(|| Error::InvalidInput("unit not constant".into())))
        .collect::<Result<_>>()?;
    let mut gen_combos: Vec<Vec<(usize, FieldElement)>> = Vec::new();
    for k in 0..r {
        gen_combos.push(
            (0..r)
                .filter(|&s| !unit_sc[s].is_zero())
                .map(|s| (k * r + s, unit_sc[s].clone()))
                .collect(),
        );
        gen_combos.push(
            (0..r)
                .filter(|&s| !unit_sc[s].is_zero())
                .map(|s| (s * r + k, unit_sc[s].clone()))
                .collect(),
        );
    }
    let mut module = TModule { dim: r, act: b_act };
    for depth in 0..=depth_bound {
        if module.dim == 0 {
            return Ok(SmoothVerdict::Smooth { resolution_length: depth.saturating_sub(1) });
        }
        let gens = minimal_generators(field, &module);
        if is_projective(field, &module, &gens, &t_left, n, &gen_combos)? {
            return Ok(SmoothVerdict::Smooth { resolution_length: depth });
        }
        module = syzygy_module(field, &module, &gens, &t_left, n)?;
        if module.dim > SMOOTH_DIM_CAP {
            return Err(Error::CapExceeded(format!(
                "bimodule syzygy dimension {} exceeds cap {SMOOTH_DIM_CAP}",
                module.dim
            )));
        }
    }
    Ok(SmoothVerdict::NotEstablished { depth_bound })
}

/// Greedy generating set: walk the standard basis, keeping vectors not in
/// the T-span of those already kept.
fn minimal_generators(field: Field, module: &TModule) -> Vec<Vec<FieldElement>> {
    let dim = module.dim;
    let mut gens: Vec<Vec<FieldElement>> = Vec::new();
    // echelon rows of the current T-span
    let mut span = Matrix::zero(field, 0, dim);
    let in_span = |span: &Matrix, v: &[FieldElement]| -> bool {
        if span.rows == 0 {
            return v.iter().all(|x| x.is_zero());
        }
        let vm = Matrix::from_fn(field, 1, dim, |_, j| v[j].clone());
        span.vstack(&vm).unwrap().rank() == span.rank()
    };
    for e in 0..dim {
        let mut v = vec![field.zero(); dim];
        v[e] = field.one();
        if in_span(&span, &v) {
            continue;
        }
        gens.push(v.clone());
        // close under the action
        let mut frontier = vec![v];
        while let Some(w) = frontier.pop() {
            if in_span(&span, &w) {
                continue;
            }
            let wm = Matrix::from_fn(field, 1, dim, |_, j| w[j].clone());
            span = span.vstack(&wm).unwrap();
            for a in &module.act {
                frontier.push(a.apply(&w).unwrap());
            }
        }
    }
    gens
}

/// Matrix of the cover π: T^g → M, columns indexed by (generator l,
/// T-basis t) at l·n + t.
fn cover_matrix(
    field: Field,
    module: &TModule,
    gens: &[Vec<FieldElement>],
    n: usize,
) -> Matrix {
    let g = gens.len();
    Matrix::from_fn(field, module.dim, g * n, |row, col| {
        let (l, t) = (col / n, col % n);
        let img = module.act[t].apply(&gens[l]).unwrap();
        img[row].clone()
    })
}

fn combo_sum(
    field: Field,
    rows: usize,
    cols: usize,
    mats: &[Matrix],
    combo: &[(usize, FieldElement)],
) -> Matrix {
    let mut acc = Matrix::zero(field, rows, cols);
    for (t, c) in combo {
        acc = acc.add(&mats[*t].scale(c)).unwrap();
    }
    acc
}

/// Is M projective over T? Equivalently: does the cover T^g → M admit a
/// T-linear section? That is a finite linear system over the field.
fn is_projective(
    field: Field,
    module: &TModule,
    gens: &[Vec<FieldElement>],
    t_left: &[Matrix],
    n: usize,
    gen_combos: &[Vec<(usize, FieldElement)>],
) -> Result<bool> {
    let mdim = module.dim;
    if mdim == 0 {
        return Ok(true);
    }
    let g = gens.len();
    let pdim = g * n;
    let pi = cover_matrix(field, module, gens, n);
    // unknowns: X (pdim × mdim), vectorized row-major
    let unknowns = pdim * mdim;
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    let mut rhs: Vec<FieldElement> = Vec::new();
    // π X = I
    for a in 0..mdim {
        for cidx in 0..mdim {
            let mut row = vec![field.zero(); unknowns];
            for k in 0..pdim {
                let coef = pi.at(a, k);
                if !coef.is_zero() {
                    row[k * mdim + cidx] = coef.clone();
                }
            }
            rows.push(row);
            rhs.push(if a == cidx { field.one() } else { field.zero() });
        }
    }
    // T-linearity: X·act_M(t) = L_t^{(g)}·X for generators t of T
    for combo in gen_combos {
        let am = combo_sum(field, mdim, mdim, &module.act, combo);
        let lt = combo_sum(field, n, n, t_left, combo);
        for ri in 0..pdim {
            let (l, uv) = (ri / n, ri % n);
            for cidx in 0..mdim {
                let mut row = vec![field.zero(); unknowns];
                for k in 0..mdim {
                    let coef = am.at(k, cidx);
                    if !coef.is_zero() {
                        row[ri * mdim + k] = row[ri * mdim + k].add(coef);
                    }
                }
                for ab in 0..n {
                    let coef = lt.at(uv, ab);
                    if !coef.is_zero() {
                        let k2 = (l * n + ab) * mdim + cidx;
                        row[k2] = row[k2].sub(coef);
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                    rhs.push(field.zero());
                }
            }
        }
    }
    let nrows = rows.len();
    let sys = Matrix::from_fn(field, nrows, unknowns, |i, j| rows[i][j].clone());
    Ok(sys.solve(&rhs)?.is_some())
}

/// Kernel of the cover T^g → M, as a T-module.
fn syzygy_module(
    field: Field,
    module: &TModule,
    gens: &[Vec<FieldElement>],
    t_left: &[Matrix],
    n: usize,
) -> Result<TModule> {
    let g = gens.len();
    let pdim = g * n;
    let pi = cover_matrix(field, module, gens, n);
    let k = pi.kernel_basis(); // pdim × dk
    let dk = k.cols;
    // action of T-basis element t on T^g: block diagonal t_left
    let act_free = |t: usize, m: &Matrix| -> Matrix {
        Matrix::from_fn(field, pdim, m.cols, |row, col| {
            let (l, uv) = (row / n, row % n);
            let mut acc = field.zero();
            for ab in 0..n {
                let coef = t_left[t].at(uv, ab);
                if !coef.is_zero() {
                    acc = acc.add(&coef.mul(m.at(l * n + ab, col)));
                }
            }
            acc
        })
    };
    let mut act = Vec::with_capacity(n);
    for t in 0..n {
        let w = act_free(t, &k);
        let x = k.solve_matrix(&w)?.ok_or_else(|| {
            Error::InvalidInput("syzygy space is not action-stable (internal error)".into())
        })?;
        act.push(x);
    }
    Ok(TModule { dim: dk, act })
}

/// A Morita witness: E with a verified right action of the target
/// algebra, and a comparison map from the source algebra into End(E)
/// whose image must land in the target-linear endomorphisms.
#[derive(Debug, Clone)]
pub struct MoritaWitness {
    pub source: DGAlgebra,
    pub action: RightDGAction,
    pub comparison: ChainMap,
}

#[derive(Debug, Clone)]
pub struct MoritaReport {
    /// E passes the fiber criterion as a complex over the base.
    pub generator: bool,
    pub generator_certificate: Az1Certificate,
    /// Coordinates of a nonzero non-nilpotent central element of the
    /// target acting as zero on E, when one exists (kills generation).
    pub central_annihilator: Option<Vec<FieldElement>>,
    /// Dimensions of the target-linear endomorphism complex per degree.
    pub equalizer_dims: Vec<(i64, usize)>,
    /// Whether the comparison lands in the equalizer and is a
    /// quasi-isomorphism onto it.
    pub comparison_ok: bool,
    pub cone_dims: Vec<(i64, usize)>,
    pub overall: bool,
}

impl MoritaWitness {
    /// Validates the witness invariants: the comparison is a unital,
    /// multiplicative chain map into End(E).
    pub fn new(source: DGAlgebra, action: RightDGAction, comparison: ChainMap) -> Result<Self> {
        if source.complex.base != action.module.base {
            return Err(Error::ActionError(
                "source algebra and module over different base rings".into(),
            ));
        }
        if comparison.source != source.complex {
            return Err(Error::ShapeError("comparison must start at the source algebra".into()));
        }
        let end = end_dga(&action.module)?;
        if comparison.target != end.complex {
            return Err(Error::ActionError(
                "comparison must land in the endomorphism complex of the module".into(),
            ));
        }
        DGAlgebraMorphism::new(source.clone(), end, comparison.clone())?;
        Ok(MoritaWitness { source, action, comparison })
    }
}

/// Verify a Morita witness over a ground field: E must pass the fiber
/// criterion (with the central-annihilator test against the target), and
/// the comparison must be a quasi-isomorphism onto the subcomplex of
/// target-linear endomorphisms.
pub fn verify_morita_witness(w: &MoritaWitness) -> Result<(bool, MoritaReport)> {
    let base = w.source.complex.base.clone();
    if !base.is_ground_field() {
        return Err(Error::Unsupported(
            "Morita witness verification requires a ground-field base".into(),
        ));
    }
    let field = base.field();
    let e = &w.action.module;
    let (gen_base, generator_certificate) = is_compact_generator(e)?;
    let central_annihilator = central_annihilator(field, &w.action)?;
    let generator = gen_base && central_annihilator.is_none();

    // target-linear endomorphisms: kernel of the intertwining constraints
    let mut bumped = e.clone();
    let r = e.total_rank();
    bumped.cap = bumped.cap.max(r * r).max(1);
    let (h, hl) = hom_complex_with_layout(&bumped, &bumped)?;
    let alg = &w.action.algebra.complex;
    // right-multiplication matrices: E^p → E^{p+i} for algebra basis (i, bb)
    let rmat = |p: i64, i: i64, bb: usize| -> Result<Matrix> {
        let mats = w.action.action.component(p + i).to_scalar(field)?;
        Ok(Matrix::from_fn(field, e.rank(p + i), e.rank(p), |row, a| {
            mats.at(row, w.action.layout.index(p + i, p, a, bb)).clone()
        }))
    };
    let mut kernels: Vec<Matrix> = Vec::new();
    let (h_lo, h_hi) = if h.is_zero_complex() { (0, -1) } else { (h.lo, h.hi()) };
    for n in h_lo..=h_hi {
        let dim = h.rank(n);
        let mut rows: Vec<Vec<FieldElement>> = Vec::new();
        for p in e.lo..=e.hi() {
            for i in alg.lo..=alg.hi() {
                if e.rank(p) == 0 || alg.rank(i) == 0 || e.rank(p + i) == 0 {
                    continue;
                }
                let sign_neg = (n * i).rem_euclid(2) == 1;
                for bb in 0..alg.rank(i) {
                    let r_low = rmat(p, i, bb)?; // E^p → E^{p+i}
                    let r_high = rmat(p + n, i, bb)?; // E^{p+n} → E^{p+n+i}
                    for a in 0..e.rank(p) {
                        for out_r in 0..e.rank(p + i + n) {
                            let mut row = vec![field.zero(); dim];
                            // f(e_a · e_bb): f-block p+i applied to r_low column a
                            for cidx in 0..e.rank(p + i) {
                                let coef = r_low.at(cidx, a);
                                if !coef.is_zero() {
                                    let k = hl.index(n, p + i, out_r, cidx);
                                    row[k] = row[k].add(coef);
                                }
                            }
                            // −(−1)^{n·i} f(e_a)·e_bb
                            for rr2 in 0..e.rank(p + n) {
                                let coef = r_high.at(out_r, rr2);
                                if !coef.is_zero() {
                                    let k = hl.index(n, p, rr2, a);
                                    let signed = if sign_neg { coef.clone() } else { coef.neg() };
                                    row[k] = row[k].add(&signed);
                                }
                            }
                            if row.iter().any(|x| !x.is_zero()) {
                                rows.push(row);
                            }
                        }
                    }
                }
            }
        }
        let c = Matrix::from_fn(field, rows.len(), dim, |i2, j| rows[i2][j].clone());
        kernels.push(if rows.is_empty() {
            Matrix::identity(field, dim)
        } else {
            c.kernel_basis()
        });
    }
    let equalizer_dims: Vec<(i64, usize)> =
        (h_lo..=h_hi).map(|n| (n, kernels[(n - h_lo) as usize].cols)).collect();

    // differential and comparison restricted to the equalizer
    let ground = PolyAlgebra::ground_field(field);
    let mut z_diffs: Vec<PolyMat> = Vec::new();
    let mut restricted_ok = true;
    for n in h_lo..h_hi {
        let k_n = &kernels[(n - h_lo) as usize];
        let k_n1 = &kernels[(n + 1 - h_lo) as usize];
        let d = h.diff(n).to_scalar(field)?;
        let dk = d.mul(k_n)?;
        let x = k_n1.solve_matrix(&dk)?.ok_or_else(|| {
            Error::InvalidInput("equalizer is not a subcomplex (internal error)".into())
        })?;
        z_diffs.push(PolyMat::from_fn(x.rows, x.cols, |i2, j| ground.ring.constant(x.at(i2, j).clone())));
    }
    let z_ranks: Vec<usize> = kernels.iter().map(|k| k.cols).collect();
    let z = FreeComplex::new_capped(ground.clone(), h_lo, z_ranks, z_diffs, None, usize::MAX)?;
    let mut phi_mats: Vec<PolyMat> = Vec::new();
    let src = &w.source.complex;
    let lo_all = src.lo.min(if z.is_zero_complex() { src.lo } else { z.lo });
    let hi_all = src.hi().max(if z.is_zero_complex() { src.hi() } else { z.hi() });
    for n in lo_all..=hi_all {
        let phi_n = w.comparison.component(n).to_scalar(field)?;
        let zr = z.rank(n);
        if (n < h_lo || n > h_hi) && !phi_n.is_zero() {
            restricted_ok = false;
        }
        if n < h_lo || n > h_hi {
            phi_mats.push(PolyMat::zero(zr, src.rank(n)));
            continue;
        }
        let k_n = &kernels[(n - h_lo) as usize];
        match k_n.solve_matrix(&phi_n)? {
            Some(y) => phi_mats.push(PolyMat::from_fn(y.rows, y.cols, |i2, j| {
                ground.ring.constant(y.at(i2, j).clone())
            })),
            None => {
                restricted_ok = false;
                phi_mats.push(PolyMat::zero(zr, src.rank(n)));
            }
        }
    }
    // the source complex, moved over the ground field label
    let src_ground = FreeComplex::new_capped(
        ground.clone(),
        src.lo,
        src.ranks.clone(),
        (0..src.diffs.len())
            .map(|i| {
                let d = src.diffs[i].to_scalar(field)?;
                Ok(PolyMat::from_fn(d.rows, d.cols, |i2, j| ground.ring.constant(d.at(i2, j).clone())))
            })
            .collect::<Result<_>>()?,
        None,
        usize::MAX,
    )?;
    let (comparison_ok, cone_dims) = if restricted_ok {
        let cm = ChainMap::new(src_ground, z, lo_all, phi_mats)?;
        let (qi, rep) = cm.is_quasi_iso()?;
        (qi, rep.degrees.iter().map(|d| (d.degree, d.dimension.unwrap_or(0))).collect())
    } else {
        (false, Vec::new())
    };
    let overall = generator && comparison_ok;
    Ok((
        overall,
        MoritaReport {
            generator,
            generator_certificate,
            central_annihilator,
            equalizer_dims,
            comparison_ok,
            cone_dims,
            overall,
        },
    ))
}

/// A nonzero non-nilpotent central element of the (degree-0) target
/// algebra acting as zero on E, if any: such an element is a block of
/// Spec(Z) on which E vanishes, so E cannot generate. Returns None for
/// graded targets (no test performed) and when the annihilator is nil.
fn central_annihilator(
    field: Field,
    action: &RightDGAction,
) -> Result<Option<Vec<FieldElement>>> {
    let alg = &action.algebra;
    let c = &alg.complex;
    if !(c.lo == 0 && c.ranks.len() == 1) {
        return Ok(None);
    }
    let r = c.ranks[0];
    let m = alg.mult.component(0).to_scalar(field)?;
    let e = &action.module;
    // constraints: z central, z acts as 0 on every degree of E
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for i in 0..r {
        // e_i·z − z·e_i = 0, coefficient of z_s: M[:, i·r+s] − M[:, s·r+i]
        for out in 0..r {
            let mut row = vec![field.zero(); r];
            for s in 0..r {
                row[s] = m.at(out, i * r + s).sub(m.at(out, s * r + i));
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    for p in e.lo..=e.hi() {
        if e.rank(p) == 0 {
            continue;
        }
        let act = action.action.component(p).to_scalar(field)?;
        for out in 0..e.rank(p) {
            for a in 0..e.rank(p) {
                let mut row = vec![field.zero(); r];
                for s in 0..r {
                    row[s] = act.at(out, action.layout.index(p, p, a, s)).clone();
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let sys = Matrix::from_fn(field, rows.len(), r, |i, j| rows[i][j].clone());
    let kernel = if rows.is_empty() { Matrix::identity(field, r) } else { sys.kernel_basis() };
    // left-multiplication matrix of an element, for the nilpotence test
    let lmat = |coords: &[FieldElement]| -> Matrix {
        Matrix::from_fn(field, r, r, |row, s| {
            let mut acc = field.zero();
            for (i, ci) in coords.iter().enumerate() {
                if !ci.is_zero() {
                    acc = acc.add(&ci.mul(m.at(row, i * r + s)));
                }
            }
            acc
        })
    };
    for j in 0..kernel.cols {
        let z = kernel.column(j);
        let mut pw = lmat(&z);
        for _ in 0..r {
            pw = pw.mul(&pw)?;
        }
        if !pw.is_zero() {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

/// Search for a trivializing module: a right B-module structure on kᵐ
/// (m ≤ rank_bound) whose verified Morita witness exhibits B as Morita
/// equivalent to the base field. Deterministic first-found order.
pub fn trivialization_search(
    b: &DGAlgebra,
    rank_bound: usize,
    step_budget: u64,
) -> Result<Option<MoritaWitness>> {
    let c = &b.complex;
    let base = c.base.clone();
    if !base.is_ground_field() {
        return Err(Error::Unsupported("trivialization search requires a field base".into()));
    }
    let p = match base.field() {
        Field::Fp(p) => p,
        Field::Q => {
            return Err(Error::Unsupported(
                "trivialization search enumerates over a finite field".into(),
            ))
        }
    };
    if !(c.lo == 0 && c.ranks.len() == 1) {
        return Err(Error::Unsupported(
            "trivialization search handles algebras concentrated in degree 0".into(),
        ));
    }
    let field = base.field();
    let r = c.ranks[0];
    let m = b.mult.component(0).to_scalar(field)?;
    let unit: Vec<FieldElement> = b
        .unit
        .iter()
        .map(|u| u.as_constant(field).ok_or_else(|| Error::InvalidInput("unit not constant".into())))
        .collect::<Result<_>>()?;
    let pivot = (0..r)
        .rev()
        .find(|&i| !unit[i].is_zero())
        .ok_or_else(|| Error::InvalidInput("unit is zero".into()))?;
    let free_idx: Vec<usize> = (0..r).filter(|&i| i != pivot).collect();
    let mut budget = step_budget;
    for mdim in 1..=rank_bound {
        let mut assigned: Vec<Option<Matrix>> = vec![None; r];
        if let Some(w) = search_actions(
            b, field, p, r, mdim, &m, &unit, pivot, &free_idx, 0, &mut assigned, &mut budget,
        )? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Check every product relation whose factors and support are assigned:
/// R_{e_i e_j} = R_j R_i (right actions compose contravariantly).
fn relations_hold(
    field: Field,
    r: usize,
    mdim: usize,
    m: &Matrix,
    assigned: &[Option<Matrix>],
) -> bool {
    for i in 0..r {
        let Some(ri) = &assigned[i] else { continue };
        for j in 0..r {
            let Some(rj) = &assigned[j] else { continue };
            // product e_i·e_j = Σ_k c_k e_k
            let mut rhs = Matrix::zero(field, mdim, mdim);
            let mut ok = true;
            for k in 0..r {
                let ck = m.at(k, i * r + j);
                if ck.is_zero() {
                    continue;
                }
                match &assigned[k] {
                    Some(rk) => rhs = rhs.add(&rk.scale(ck)).unwrap(),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue; // support not fully assigned yet
            }
            let lhs = rj.mul(ri).unwrap();
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn search_actions(
    b: &DGAlgebra,
    field: Field,
    p: u64,
    r: usize,
    mdim: usize,
    m: &Matrix,
    unit: &[FieldElement],
    pivot: usize,
    free_idx: &[usize],
    level: usize,
    assigned: &mut Vec<Option<Matrix>>,
    budget: &mut u64,
) -> Result<Option<MoritaWitness>> {
    if level == free_idx.len() {
        // derive the pivot matrix from Σ uᵢ Rᵢ = I
        let mut acc = Matrix::identity(field, mdim);
        for (i, u) in unit.iter().enumerate() {
            if i == pivot || u.is_zero() {
                continue;
            }
            acc = acc.sub(&assigned[i].as_ref().unwrap().scale(u)).unwrap();
        }
        let rp = acc.scale(&unit[pivot].inv().unwrap());
        assigned[pivot] = Some(rp);
        let ok = relations_hold(field, r, mdim, m, assigned);
        let result = if ok { try_build_witness(b, r, mdim, assigned)? } else { None };
        assigned[pivot] = None;
        return Ok(result);
    }
    let idx = free_idx[level];
    let cells = mdim * mdim;
    let total = (p as u128).pow(cells as u32);
    let mut counter: u128 = 0;
    while counter < total {
        if *budget == 0 {
            return Err(Error::CapExceeded("trivialization search step budget exhausted".into()));
        }
        *budget -= 1;
        let mut rem = counter;
        let cand = Matrix::from_fn(field, mdim, mdim, |_, _| {
            let v = (rem % p as u128) as i64;
            rem /= p as u128;
            field.from_i64(v)
        });
        assigned[idx] = Some(cand);
        if relations_hold(field, r, mdim, m, assigned) {
            if let Some(w) = search_actions(
                b, field, p, r, mdim, m, unit, pivot, free_idx, level + 1, assigned, budget,
            )? {
                assigned[idx] = None;
                return Ok(Some(w));
            }
        }
        assigned[idx] = None;
        counter += 1;
    }
    Ok(None)
}

/// Assemble and fully verify a candidate witness; returns None if the
/// verified Morita check fails.
fn try_build_witness(
    b: &DGAlgebra,
    r: usize,
    mdim: usize,
    assigned: &[Option<Matrix>],
) -> Result<Option<MoritaWitness>> {
    let base = b.complex.base.clone();
    let ring = &base.ring;
    let e = FreeComplex::free_module(base.clone(), mdim);
    // action matrix at degree 0: columns (module a, algebra s) ↦ R_s[·, a]
    let act = PolyMat::from_fn(mdim, mdim * r, |row, col| {
        let (a, s) = (col / r, col % r);
        ring.constant(assigned[s].as_ref().unwrap().at(row, a).clone())
    });
    let action = match RightDGAction::new(b.clone(), e.clone(), vec![act]) {
        Ok(a) => a,
        Err(_) => return Ok(None),
    };
    let source = DGAlgebra::unit_algebra(base.clone())?;
    // comparison: 1 ↦ id inside Hom(E,E)
    let mut cmp = PolyMat::zero(mdim * mdim, 1);
    for a in 0..mdim {
        *cmp.at_mut(a * mdim + a, 0) = ring.one();
    }
    let mut bumped = e.clone();
    bumped.cap = bumped.cap.max(mdim * mdim).max(1);
    let (h, _) = hom_complex_with_layout(&bumped, &bumped)?;
    let chain = match ChainMap::new(source.complex.clone(), h, 0, vec![cmp]) {
        Ok(c) => c,
        Err(_) => return Ok(None),
    };
    let witness = match MoritaWitness::new(source, action, chain) {
        Ok(w) => w,
        Err(_) => return Ok(None),
    };
    let (ok, _) = verify_morita_witness(&witness)?;
    Ok(if ok { Some(witness) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{cone, koszul};
    use crate::cring::{MonomialOrder, PolyRing};
    use crate::dgalg::tensor_dga;

    fn q() -> PolyAlgebra {
        PolyAlgebra::ground_field(Field::Q)
    }

    fn qx() -> PolyAlgebra {
        let ring = PolyRing::new(Field::Q, vec!["x".into()], MonomialOrder::DegRevLex);
        PolyAlgebra::new(ring, vec![]).unwrap()
    }

    fn fpx(p: u64) -> PolyAlgebra {
        let ring = PolyRing::new(Field::Fp(p), vec!["x".into()], MonomialOrder::DegRevLex);
        PolyAlgebra::new(ring, vec![]).unwrap()
    }

    #[test]
    fn support_ideal_examples() {
        let a = qx();
        let x = a.ring.var(0);
        // free module: zero ideal, full support
        assert!(support_ideal(&FreeComplex::unit(a.clone())).unwrap().is_empty());
        // cone(×x): J = (x)
        let k = cone(&ChainMap::mul_by(&FreeComplex::unit(a.clone()), &x)).unwrap();
        assert_eq!(support_ideal(&k).unwrap(), vec![x.clone()]);
        // acyclic: unit ideal
        let ac = cone(&ChainMap::identity(&FreeComplex::unit(a.clone()))).unwrap();
        assert_eq!(support_ideal(&ac).unwrap(), vec![a.ring.one()]);
    }

    #[test]
    fn generator_verdicts() {
        let a = qx();
        let x = a.ring.var(0);
        let unit = FreeComplex::unit(a.clone());
        let (yes, cert) = is_compact_generator(&unit).unwrap();
        assert!(yes);
        assert!(matches!(cert, Az1Certificate::EulerShortcut { chi: 1 }));
        // cone(×x) over ℚ[x]: fails with the witness point x = 1
        let k = cone(&ChainMap::mul_by(&unit, &x)).unwrap();
        let (no, cert) = is_compact_generator(&k).unwrap();
        assert!(!no);
        match cert {
            Az1Certificate::FailingPoint { point } => match point {
                PointSpec::Base { coords, .. } => {
                    assert_eq!(coords, vec![Field::Q.from_i64(1)]);
                }
                _ => panic!("expected base point"),
            },
            other => panic!("expected failing point, got {other:?}"),
        }
        // shift and direct-sum stability
        let (s1, _) = is_compact_generator(&unit.shift(3)).unwrap();
        assert!(s1);
        let sum = unit.direct_sum(&k).unwrap();
        let (s2, _) = is_compact_generator(&sum).unwrap();
        assert!(s2);
    }

    #[test]
    fn generator_verdict_over_finite_field() {
        let a = fpx(5);
        let x = a.ring.var(0);
        let unit = FreeComplex::unit(a.clone());
        let k = cone(&ChainMap::mul_by(&unit, &x)).unwrap();
        let (no, cert) = is_compact_generator(&k).unwrap();
        assert!(!no);
        match cert {
            Az1Certificate::FailingPoint { point } => {
                // deterministic search order: x = 1 is the first acyclic fiber
                match point {
                    PointSpec::Base { coords, .. } => {
                        assert_eq!(coords, vec![Field::Fp(5).from_i64(1)])
                    }
                    _ => panic!("expected base point"),
                }
            }
            other => panic!("expected failing point, got {other:?}"),
        }
        // x(x−1)(x−2)(x−3)(x−4) = x⁵ − x vanishes at every F₅ point but is
        // not nilpotent: the witness must come from an extension field
        let x5x = a.parse_element("x^5 - x").unwrap();
        let k2 = cone(&ChainMap::mul_by(&unit, &x5x)).unwrap();
        let (no2, cert2) = is_compact_generator(&k2).unwrap();
        assert!(!no2);
        match cert2 {
            Az1Certificate::FailingPoint { point } => match point {
                PointSpec::Ext { def, .. } => assert_eq!(def.degree(), 2),
                _ => panic!("expected extension point, got {point:?}"),
            },
            other => panic!("expected failing point, got {other:?}"),
        }
    }

    #[test]
    fn nilpotent_support_is_a_generator() {
        // over A = ℚ[x]/(x²): cone(×x) has support V(x) = Spec A (x nilpotent)
        let ring = PolyRing::new(Field::Q, vec!["x".into()], MonomialOrder::DegRevLex);
        let x = ring.var(0);
        let rel = ring.mul(&x, &x);
        let a = PolyAlgebra::new(ring, vec![rel]).unwrap();
        let x = a.ring.var(0);
        let k = cone(&ChainMap::mul_by(&FreeComplex::unit(a.clone()), &x)).unwrap();
        let (yes, cert) = is_compact_generator(&k).unwrap();
        assert!(yes, "χ = 0 but support is everything");
        assert!(matches!(cert, Az1Certificate::NilpotentSupport { .. }));
    }

    #[test]
    fn azumaya_verdicts_degree_zero() {
        // the base ring itself
        let a = DGAlgebra::unit_algebra(q()).unwrap();
        let v = verify_azumaya(&a).unwrap();
        assert!(v.overall && v.az1 && v.az2);
        // M₂(ℚ)
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let v = verify_azumaya(&m2).unwrap();
        assert!(v.overall);
        assert!(v.az2_certificate.fast_path);
        // ℚ×ℚ fails az2 with kernel/cokernel of dimension 2 each
        let kk = DGAlgebra::product_algebra(q(), 2).unwrap();
        let v = verify_azumaya(&kk).unwrap();
        assert!(v.az1 && !v.az2 && !v.overall);
        let dims: Vec<usize> =
            v.az2_certificate.cone.degrees.iter().map(|d| d.dimension.unwrap()).collect();
        assert_eq!(dims, vec![2, 2]);
        // dual numbers fail az2
        let dn = DGAlgebra::dual_numbers(q()).unwrap();
        assert!(!verify_azumaya(&dn).unwrap().az2);
        // quaternions over ℚ and over F₃ pass
        let m1 = q().ring.constant(Field::Q.from_i64(-1));
        let h = DGAlgebra::quaternion_algebra(q(), &m1, &m1).unwrap();
        assert!(verify_azumaya(&h).unwrap().overall);
        let f3 = PolyAlgebra::ground_field(Field::Fp(3));
        let m1 = f3.ring.constant(Field::Fp(3).from_i64(-1));
        let h3 = DGAlgebra::quaternion_algebra(f3, &m1, &m1).unwrap();
        assert!(verify_azumaya(&h3).unwrap().overall);
    }

    #[test]
    fn streaming_matches_dense_az2() {
        for alg in [
            DGAlgebra::matrix_algebra(q(), 2).unwrap(),
            DGAlgebra::product_algebra(q(), 2).unwrap(),
            DGAlgebra::dual_numbers(q()).unwrap(),
        ] {
            let (fast, cert) = verify_az2(&alg).unwrap();
            assert!(cert.fast_path);
            let (dense, rep) = verify_az2_dense(&alg).unwrap();
            assert_eq!(fast, dense);
            // homology dimensions agree degree by degree
            for d in &rep.degrees {
                let fd = cert.cone.at(d.degree).map(|x| x.dimension.unwrap()).unwrap_or(0);
                assert_eq!(fd, d.dimension.unwrap(), "degree {}", d.degree);
            }
        }
    }

    #[test]
    fn graded_endomorphism_algebra_is_azumaya() {
        let base = q();
        let unit = FreeComplex::unit(base.clone());
        let e = unit.direct_sum(&unit.shift(1)).unwrap();
        let dga = end_dga(&e).unwrap();
        let v = verify_azumaya(&dga).unwrap();
        assert!(v.overall);
        assert!(!v.az2_certificate.fast_path);
    }

    #[test]
    fn tensor_closure_on_matrix_algebras() {
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let t = tensor_dga(&m2, &m2).unwrap();
        let v = verify_azumaya(&t).unwrap();
        assert!(v.overall, "M₂⊗M₂ should pass");
        assert!(v.az2_certificate.fast_path);
    }

    #[test]
    fn smoothness_verdicts() {
        // separable algebras: length 0
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        assert_eq!(is_smooth(&m2, 8).unwrap(), SmoothVerdict::Smooth { resolution_length: 0 });
        let kk = DGAlgebra::product_algebra(q(), 2).unwrap();
        assert_eq!(is_smooth(&kk, 8).unwrap(), SmoothVerdict::Smooth { resolution_length: 0 });
        // dual numbers: periodic syzygies, never established
        let dn = DGAlgebra::dual_numbers(q()).unwrap();
        assert_eq!(is_smooth(&dn, 4).unwrap(), SmoothVerdict::NotEstablished { depth_bound: 4 });
        // graded input is unsupported
        let e = FreeComplex::unit(q()).direct_sum(&FreeComplex::unit(q()).shift(1)).unwrap();
        let graded = end_dga(&e).unwrap();
        assert!(matches!(is_smooth(&graded, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn identity_morita_witness() {
        let m2 = DGAlgebra::matrix_algebra(q(), 2).unwrap();
        let act = RightDGAction::regular(&m2).unwrap();
        // comparison: left multiplication B → End(B)
        let msc = m2.mult.component(0);
        let mut cmp = PolyMat::zero(16, 4);
        for u in 0..4 {
            // left mult by e_u: column u of the comparison lists the matrix
            // of c ↦ e_u·c in the Hom basis (row index out·4 + in)
            for cin in 0..4 {
                for out in 0..4 {
                    let v = msc.at(out, u * 4 + cin); // e_u · e_cin coefficient
                    if !v.is_zero() {
                        *cmp.at_mut(out * 4 + cin, u) = v.clone();
                    }
                }
            }
        }
        let mut bumped = m2.complex.clone();
        bumped.cap = bumped.cap.max(16);
        let (h, _) = hom_complex_with_layout(&bumped, &bumped).unwrap();
        let chain = ChainMap::new(m2.complex.clone(), h, 0, vec![cmp]).unwrap();
        let w = MoritaWitness::new(m2.clone(), act, chain).unwrap();
        let (ok, rep) = verify_morita_witness(&w).unwrap();
        assert!(ok, "{rep:?}");
        assert_eq!(rep.equalizer_dims, vec![(0, 4)]);
    }

    #[test]
    fn column_module_trivializes_m2() {
        // B = ℚ, B′ = M₂(ℚ), E = ℚ² with right matrix action
        let base = q();
        let m2 = DGAlgebra::matrix_algebra(base.clone(), 2).unwrap();
        let ring = &base.ring;
        let e = FreeComplex::free_module(base.clone(), 2);
        // right action of E_{ab}: row vector convention, R_{E_ab} = E_ba
        let act = PolyMat::from_fn(2, 8, |row, col| {
            let (m_idx, s) = (col / 4, col % 4);
            let (a, b) = (s / 2, s % 2);
            // (v·E_ab)_j = v_a δ_{jb}
            if row == b && m_idx == a {
                ring.one()
            } else {
                ring.zero()
            }
        });
        let action = RightDGAction::new(m2, e.clone(), vec![act]).unwrap();
        let source = DGAlgebra::unit_algebra(base.clone()).unwrap();
        let mut cmp = PolyMat::zero(4, 1);
        *cmp.at_mut(0, 0) = ring.one();
        *cmp.at_mut(3, 0) = ring.one();
        let mut bumped = e.clone();
        bumped.cap = bumped.cap.max(4);
        let (h, _) = hom_complex_with_layout(&bumped, &bumped).unwrap();
        let chain = ChainMap::new(source.complex.clone(), h, 0, vec![cmp]).unwrap();
        let w = MoritaWitness::new(source, action, chain).unwrap();
        let (ok, rep) = verify_morita_witness(&w).unwrap();
        assert!(ok, "{rep:?}");
        // End_{M₂}(ℚ²) = ℚ
        assert_eq!(rep.equalizer_dims, vec![(0, 1)]);
    }

    #[test]
    fn non_generator_detected_by_central_idempotent() {
        // B = ℚ, B′ = ℚ×ℚ, E = first factor
        let base = q();
        let kk = DGAlgebra::product_algebra(base.clone(), 2).unwrap();
        let ring = &base.ring;
        let e = FreeComplex::free_module(base.clone(), 1);
        // e₀ acts as 1, e₁ acts as 0
        let act = PolyMat::from_fn(1, 2, |_, col| if col == 0 { ring.one() } else { ring.zero() });
        let action = RightDGAction::new(kk, e.clone(), vec![act]).unwrap();
        let source = DGAlgebra::unit_algebra(base.clone()).unwrap();
        let mut cmp = PolyMat::zero(1, 1);
        *cmp.at_mut(0, 0) = ring.one();
        let (h, _) = hom_complex_with_layout(&e, &e).unwrap();
        let chain = ChainMap::new(source.complex.clone(), h, 0, vec![cmp]).unwrap();
        let w = MoritaWitness::new(source, action, chain).unwrap();
        let (ok, rep) = verify_morita_witness(&w).unwrap();
        assert!(!ok);
        assert!(!rep.generator);
        // witness: the second idempotent annihilates E
        let z = rep.central_annihilator.unwrap();
        assert_eq!(z, vec![Field::Q.from_i64(0), Field::Q.from_i64(1)]);
        // but the comparison itself is fine: End(E) = ℚ
        assert!(rep.comparison_ok);
    }

    #[test]
    fn trivialization_of_m2_over_f2() {
        let f2 = PolyAlgebra::ground_field(Field::Fp(2));
        let m2 = DGAlgebra::matrix_algebra(f2, 2).unwrap();
        let w = trivialization_search(&m2, 2, 500_000).unwrap();
        let w = w.expect("M₂(F₂) must split");
        assert_eq!(w.action.module.ranks, vec![2]);
        let (ok, rep) = verify_morita_witness(&w).unwrap();
        assert!(ok);
        assert_eq!(rep.equalizer_dims, vec![(0, 1)]);
    }

    #[test]
    fn no_trivialization_for_split_product() {
        let f2 = PolyAlgebra::ground_field(Field::Fp(2));
        let kk = DGAlgebra::product_algebra(f2, 2).unwrap();
        let w = trivialization_search(&kk, 2, 500_000).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn koszul_support_interaction() {
        // two-variable Koszul complex: support = V(x, y), not nilpotent
        let ring = PolyRing::new(Field::Fp(3), vec!["x".into(), "y".into()], MonomialOrder::DegRevLex);
        let a = PolyAlgebra::new(ring, vec![]).unwrap();
        let k = koszul(&a, &[a.ring.var(0), a.ring.var(1)]).unwrap();
        let (no, cert) = is_compact_generator(&k).unwrap();
        assert!(!no, "χ = 0 and support is a proper subvariety");
        assert!(matches!(cert, Az1Certificate::FailingPoint { .. }));
    }
}
