//! Interpret parsed job blocks as deraz-core objects.
//!
//! The workspace resolves names lazily, memoizes everything it builds,
//! and reports cycles and type mismatches as input errors. All
//! polynomial entries are parsed against the ring they will live in, so
//! core-level shape checks fire with useful context.

use std::collections::{BTreeMap, BTreeSet};

use deraz_core::cring::parse::parse_poly;
use deraz_core::cring::{ExtFieldDef, MonomialOrder, Poly, PolyAlgebra, PolyRing, PointSpec};
use deraz_core::dgalg::DGAlgebra;
use deraz_core::complexes::{tensor, FreeComplex, PolyMat, DEFAULT_RANK_CAP};
use deraz_core::glue::{GluedScheme, Overlap, DEFAULT_CECH_WINDOW};
use deraz_core::azumaya::{DEFAULT_DEPTH_BOUND, DEFAULT_TRIV_RANK_BOUND, DEFAULT_TRIV_STEP_BUDGET};
use deraz_core::scalars::{Field, FieldElement};
use deraz_core::Error as CoreError;

use crate::job::{Block, Pos};

/// A build- or run-time problem with the exit code it maps to: 3 for
/// malformed input, 2 when a computation refused to finish within its
/// configured caps or hit an unsupported shape.
#[derive(Debug)]
pub struct BuildError {
    pub msg: String,
    pub code: i32,
}

impl std::fmt::Display for BuildError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.msg)
    }
}

pub type BResult<T> = std::result::Result<T, BuildError>;

pub fn berr<T>(msg: impl Into<String>) -> BResult<T> {
    Err(BuildError { msg: msg.into(), code: 3 })
}

/// Exit code a core error deserves: caps, windows, failed lift searches
/// and unsupported shapes are "not established" (2); everything else is
/// an input problem (3).
pub fn core_code(e: &CoreError) -> i32 {
    match e {
        CoreError::CapExceeded(_)
        | CoreError::WindowError(_)
        | CoreError::LiftNotFound(_)
        | CoreError::Unsupported(_) => 2,
        _ => 3,
    }
}

fn at(pos: Pos, msg: impl std::fmt::Display) -> BuildError {
    BuildError { msg: format!("at {pos}: {msg}"), code: 3 }
}

fn atc(pos: Pos, e: CoreError) -> BuildError {
    BuildError { code: core_code(&e), msg: format!("at {pos}: {e}") }
}

impl From<crate::job::ParseError> for BuildError {
    fn from(e: crate::job::ParseError) -> Self {
        BuildError { msg: e.to_string(), code: 3 }
    }
}

impl From<CoreError> for BuildError {
    fn from(e: CoreError) -> Self {
        BuildError { code: core_code(&e), msg: e.to_string() }
    }
}

/// Caps and bounds threaded from the command line into tasks.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub rank_cap: usize,
    pub window: i64,
    pub depth_bound: usize,
    pub rank_bound: usize,
    pub step_budget: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            rank_cap: DEFAULT_RANK_CAP,
            window: DEFAULT_CECH_WINDOW,
            depth_bound: DEFAULT_DEPTH_BOUND,
            rank_bound: DEFAULT_TRIV_RANK_BOUND,
            step_budget: DEFAULT_TRIV_STEP_BUDGET,
        }
    }
}

pub struct Workspace<'a> {
    pub caps: Caps,
    blocks: BTreeMap<String, &'a Block>,
    algebras: BTreeMap<String, PolyAlgebra>,
    schemes: BTreeMap<String, GluedScheme>,
    /// complex name -> (complex, scheme-patch context if any)
    complexes: BTreeMap<String, (FreeComplex, Option<(String, usize)>)>,
    dgalgebras: BTreeMap<String, DGAlgebra>,
    building: BTreeSet<String>,
}

impl<'a> Workspace<'a> {
    pub fn new(objects: &'a [Block], caps: Caps) -> BResult<Workspace<'a>> {
        let mut blocks = BTreeMap::new();
        for b in objects {
            let name = b.name.clone().unwrap_or_default();
            blocks.insert(name, b);
        }
        Ok(Workspace {
            caps,
            blocks,
            algebras: BTreeMap::new(),
            schemes: BTreeMap::new(),
            complexes: BTreeMap::new(),
            dgalgebras: BTreeMap::new(),
            building: BTreeSet::new(),
        })
    }

    fn lookup(&self, name: &str, kind: &str) -> BResult<&'a Block> {
        match self.blocks.get(name) {
            Some(b) if b.kind == kind => Ok(b),
            Some(b) => berr(format!("`{name}` is a {} but is used as a {kind}", b.kind)),
            None => berr(format!("no {kind} named `{name}` in this job file")),
        }
    }

    pub fn block(&self, name: &str) -> BResult<&'a Block> {
        match self.blocks.get(name) {
            Some(b) => Ok(b),
            None => berr(format!("no object named `{name}` in this job file")),
        }
    }

    fn enter(&mut self, name: &str) -> BResult<()> {
        if !self.building.insert(name.to_string()) {
            return berr(format!("object `{name}` refers to itself (directly or through a cycle)"));
        }
        Ok(())
    }

    fn leave(&mut self, name: &str) {
        self.building.remove(name);
    }

    // ---- algebras ----

    pub fn algebra(&mut self, name: &str) -> BResult<PolyAlgebra> {
        if let Some(a) = self.algebras.get(name) {
            return Ok(a.clone());
        }
        let b = self.lookup(name, "algebra")?;
        self.enter(name)?;
        let a = build_algebra(b);
        self.leave(name);
        let a = a?;
        self.algebras.insert(name.to_string(), a.clone());
        Ok(a)
    }

    // ---- schemes ----

    pub fn scheme(&mut self, name: &str) -> BResult<GluedScheme> {
        if let Some(x) = self.schemes.get(name) {
            return Ok(x.clone());
        }
        let b = self.lookup(name, "scheme")?;
        self.enter(name)?;
        let x = self.build_scheme(b);
        self.leave(name);
        let x = x?;
        self.schemes.insert(name.to_string(), x.clone());
        Ok(x)
    }

    fn build_scheme(&mut self, b: &'a Block) -> BResult<GluedScheme> {
        let mut names = Vec::new();
        let mut patches = Vec::new();
        for pb in b.subblocks("patch") {
            let pname = match &pb.name {
                Some(n) => n.clone(),
                None => return Err(at(pb.pos, "patch block needs a name")),
            };
            let alg = match pb.str_entry("algebra")? {
                Some(aname) => self.algebra(&aname)?,
                None => build_algebra(pb).map_err(|e| at(pb.pos, e))?,
            };
            names.push(pname);
            patches.push(alg);
        }
        if patches.is_empty() {
            return Err(at(b.pos, "scheme has no patch blocks"));
        }
        // First pass: the inverted element of every overlap, parsed in
        // the source patch ring. Needed to build the localized rings the
        // images are parsed in.
        let mut fs: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        let mut ov_blocks: Vec<(usize, usize, &Block)> = Vec::new();
        for ob in b.subblocks("overlap") {
            if ob.args.len() != 2 {
                return Err(at(ob.pos, "overlap needs two patch arguments: `overlap (U, V) { ... }`"));
            }
            let i = match names.iter().position(|n| *n == ob.args[0]) {
                Some(i) => i,
                None => return Err(at(ob.pos, format!("unknown patch `{}`", ob.args[0]))),
            };
            let j = match names.iter().position(|n| *n == ob.args[1]) {
                Some(j) => j,
                None => return Err(at(ob.pos, format!("unknown patch `{}`", ob.args[1]))),
            };
            let fsrc = ob.req_str("f")?;
            let f = parse_poly(&patches[i].ring, &fsrc)
                .map_err(|e| at(ob.pos, format!("overlap element `{fsrc}`: {e}")))?;
            fs.insert((i, j), f);
            ov_blocks.push((i, j, ob));
        }
        // Second pass: images of patch i's variables inside loc(j, i) =
        // patch j with f_{ji} inverted.
        let mut overlaps = BTreeMap::new();
        for (i, j, ob) in ov_blocks {
            let f_ji = match fs.get(&(j, i)) {
                Some(f) => f.clone(),
                None => {
                    return Err(at(
                        ob.pos,
                        format!("overlap ({}, {}) has no partner overlap ({}, {})", names[i], names[j], names[j], names[i]),
                    ))
                }
            };
            let loc = patches[j]
                .localize(&f_ji)
                .map_err(|e| at(ob.pos, format!("cannot localize patch {}: {e}", names[j])))?;
            let me = ob.req("map")?;
            let map = me.value.as_map(me.pos, "map")?;
            let mut images = Vec::new();
            for (vi, vname) in patches[i].ring.vars.iter().enumerate() {
                let expr = match map.iter().find(|(k, _)| k == vname) {
                    Some((_, e)) => e,
                    None => {
                        return Err(at(
                            me.pos,
                            format!("overlap map is missing the image of `{vname}` (variable {vi} of patch {})", names[i]),
                        ))
                    }
                };
                let rewritten = rewrite_inverses(expr, &loc.algebra.ring)
                    .map_err(|m| at(me.pos, format!("image of `{vname}`: {m}")))?;
                let img = parse_poly(&loc.algebra.ring, &rewritten)
                    .map_err(|e| at(me.pos, format!("image of `{vname}` (`{expr}`): {e}")))?;
                images.push(img);
            }
            for (k, _) in map {
                if !patches[i].ring.vars.iter().any(|v| v == k) {
                    return Err(at(me.pos, format!("overlap map sends unknown variable `{k}`")));
                }
            }
            overlaps.insert((i, j), Overlap { f: fs[&(i, j)].clone(), images });
        }
        GluedScheme::new(names, patches, overlaps).map_err(|e| atc(b.pos, e))
    }

    // ---- complexes ----

    pub fn complex(&mut self, name: &str) -> BResult<FreeComplex> {
        Ok(self.complex_with_context(name)?.0)
    }

    /// Also returns the (scheme, patch index) the complex was declared
    /// on, when it was declared via `scheme`/`patch` entries.
    pub fn complex_with_context(&mut self, name: &str) -> BResult<(FreeComplex, Option<(String, usize)>)> {
        if let Some(c) = self.complexes.get(name) {
            return Ok(c.clone());
        }
        let b = self.lookup(name, "complex")?;
        self.enter(name)?;
        let c = self.build_complex(b);
        self.leave(name);
        let c = c?;
        self.complexes.insert(name.to_string(), c.clone());
        Ok(c)
    }

    fn complex_base(&mut self, b: &'a Block) -> BResult<(PolyAlgebra, Option<(String, usize)>)> {
        match (b.str_entry("algebra")?, b.str_entry("scheme")?) {
            (Some(a), None) => Ok((self.algebra(&a)?, None)),
            (None, Some(xname)) => {
                let pname = b.req_str("patch")?;
                let x = self.scheme(&xname)?;
                match x.patch_index(&pname) {
                    Some(i) => Ok((x.patches[i].clone(), Some((xname, i)))),
                    None => Err(at(b.pos, format!("scheme `{xname}` has no patch `{pname}`"))),
                }
            }
            (Some(_), Some(_)) => Err(at(b.pos, "give either `algebra` or `scheme`+`patch`, not both")),
            (None, None) => Err(at(b.pos, "complex needs an `algebra` or a `scheme`+`patch` base")),
        }
    }

    fn build_complex(&mut self, b: &'a Block) -> BResult<(FreeComplex, Option<(String, usize)>)> {
        let (base, ctx) = self.complex_base(b)?;
        let de = b.req("degrees")?;
        let degs = de.value.as_int_list(de.pos, "degrees")?;
        if degs.len() != 2 || degs[0] > degs[1] {
            return Err(at(de.pos, "`degrees` must be `[lo, hi]` with lo <= hi"));
        }
        let (lo, hi) = (degs[0], degs[1]);
        let re = b.req("ranks")?;
        let ranks_i = re.value.as_int_list(re.pos, "ranks")?;
        if ranks_i.len() as i64 != hi - lo + 1 {
            return Err(at(re.pos, format!("`ranks` must list {} ranks for degrees {lo}..={hi}", hi - lo + 1)));
        }
        if ranks_i.iter().any(|&r| r < 0) {
            return Err(at(re.pos, "ranks must be non-negative"));
        }
        let ranks: Vec<usize> = ranks_i.iter().map(|&r| r as usize).collect();
        let mut diffs: Vec<PolyMat> = Vec::new();
        for k in 0..ranks.len().saturating_sub(1) {
            let n = lo + k as i64;
            diffs.push(PolyMat::zero(ranks[k + 1], ranks[k]));
            let _ = n;
        }
        for (n, e) in b.indexed("d") {
            if n < lo || n >= hi {
                return Err(at(e.pos, format!("`d[{n}]` is outside the differential range {lo}..{}", hi - 1)));
            }
            let k = (n - lo) as usize;
            let rows = e.value.as_mat(e.pos, "d")?;
            diffs[k] = parse_mat(&base.ring, &rows, ranks[k + 1], ranks[k])
                .map_err(|m| at(e.pos, format!("d[{n}]: {m}")))?;
        }
        let mut weights: Option<Vec<Vec<i64>>> = None;
        let windexed = b.indexed("weights");
        if !windexed.is_empty() {
            let mut w: Vec<Vec<i64>> = ranks.iter().map(|&r| vec![0; r]).collect();
            for (n, e) in windexed {
                if n < lo || n > hi {
                    return Err(at(e.pos, format!("`weights[{n}]` is outside the degree span {lo}..={hi}")));
                }
                let row = e.value.as_int_list(e.pos, "weights")?;
                let k = (n - lo) as usize;
                if row.len() != ranks[k] {
                    return Err(at(e.pos, format!("weights[{n}] must list {} weights", ranks[k])));
                }
                w[k] = row;
            }
            weights = Some(w);
        }
        let c = FreeComplex::new_capped(base, lo, ranks, diffs, weights, self.caps.rank_cap)
            .map_err(|e| atc(b.pos, e))?;
        Ok((c, ctx))
    }

    // ---- dg-algebras ----

    pub fn dgalgebra(&mut self, name: &str) -> BResult<DGAlgebra> {
        if let Some(d) = self.dgalgebras.get(name) {
            return Ok(d.clone());
        }
        let b = self.lookup(name, "dgalgebra")?;
        self.enter(name)?;
        let d = self.build_dgalgebra(b);
        self.leave(name);
        let d = d?;
        self.dgalgebras.insert(name.to_string(), d.clone());
        Ok(d)
    }

    fn builtin_base(&mut self, b: &'a Block) -> BResult<PolyAlgebra> {
        match b.str_entry("algebra")? {
            Some(a) => self.algebra(&a),
            None => {
                // a bare field is enough for most builtins
                let field = match b.str_entry("field")? {
                    Some(f) => parse_field(&f).map_err(|m| at(b.pos, m))?,
                    None => return Err(at(b.pos, "builtin dgalgebra needs `algebra` or `field`")),
                };
                let ring = PolyRing::new(field, Vec::new(), MonomialOrder::DegRevLex);
                PolyAlgebra::new(ring, Vec::new()).map_err(|e| atc(b.pos, e))
            }
        }
    }

    fn build_dgalgebra(&mut self, b: &'a Block) -> BResult<DGAlgebra> {
        if let Some(builtin) = b.str_entry("builtin")? {
            return self.build_builtin_dga(b, &builtin);
        }
        // explicit presentation: complex + mult matrices + unit
        let cname = b.req_str("complex")?;
        let c = self.complex(&cname)?;
        let t2 = tensor(&c, &c).map_err(|e| atc(b.pos, e))?;
        let span_lo = t2.lo.min(c.lo);
        let span_hi = t2.hi().max(c.hi());
        let mut mats: Vec<PolyMat> = (span_lo..=span_hi)
            .map(|n| PolyMat::zero(c.rank(n), t2.rank(n)))
            .collect();
        for (n, e) in b.indexed("mult") {
            if n < span_lo || n > span_hi {
                return Err(at(e.pos, format!("`mult[{n}]` is outside the span {span_lo}..={span_hi}")));
            }
            let rows = e.value.as_mat(e.pos, "mult")?;
            mats[(n - span_lo) as usize] = parse_mat(&c.base.ring, &rows, c.rank(n), t2.rank(n))
                .map_err(|m| at(e.pos, format!("mult[{n}]: {m}")))?;
        }
        let ue = b.req("unit")?;
        let unit_strs = ue.value.as_str_list(ue.pos, "unit")?;
        if unit_strs.len() != c.rank(0) {
            return Err(at(ue.pos, format!("`unit` must list {} coordinates (rank in degree 0)", c.rank(0))));
        }
        let unit: Vec<Poly> = unit_strs
            .iter()
            .map(|s| parse_poly(&c.base.ring, s))
            .collect::<Result<_, _>>()
            .map_err(|e| at(ue.pos, format!("unit: {e}")))?;
        DGAlgebra::new(c, mats, unit).map_err(|e| atc(b.pos, e))
    }

    fn build_builtin_dga(&mut self, b: &'a Block, builtin: &str) -> BResult<DGAlgebra> {
        let wrap = |r: deraz_core::Result<DGAlgebra>| r.map_err(|e| atc(b.pos, e));
        match builtin {
            "unit" => {
                let base = self.builtin_base(b)?;
                wrap(DGAlgebra::unit_algebra(base))
            }
            "matrix" => {
                let base = self.builtin_base(b)?;
                let n = b
                    .int_entry("n")?
                    .ok_or_else(|| at(b.pos, "builtin `matrix` needs `n = <size>`"))?;
                if n < 1 {
                    return Err(at(b.pos, "matrix size must be at least 1"));
                }
                wrap(DGAlgebra::matrix_algebra(base, n as usize))
            }
            "product" => {
                let base = self.builtin_base(b)?;
                let n = b
                    .int_entry("n")?
                    .ok_or_else(|| at(b.pos, "builtin `product` needs `n = <copies>`"))?;
                if n < 1 {
                    return Err(at(b.pos, "product needs at least one factor"));
                }
                wrap(DGAlgebra::product_algebra(base, n as usize))
            }
            "quaternion" => {
                let base = self.builtin_base(b)?;
                let a_s = b.req_str("a")?;
                let b_s = b.req_str("b")?;
                let a = parse_poly(&base.ring, &a_s).map_err(|e| at(b.pos, format!("a: {e}")))?;
                let bb = parse_poly(&base.ring, &b_s).map_err(|e| at(b.pos, format!("b: {e}")))?;
                wrap(DGAlgebra::quaternion_algebra(base, &a, &bb))
            }
            "dual-numbers" => {
                let base = self.builtin_base(b)?;
                wrap(DGAlgebra::dual_numbers(base))
            }
            "zero" => {
                let base = self.builtin_base(b)?;
                let z = FreeComplex::zero_complex(base);
                wrap(DGAlgebra::new(z, Vec::new(), Vec::new()))
            }
            "end" => {
                let cname = b.req_str("complex")?;
                let c = self.complex(&cname)?;
                wrap(deraz_core::dgalg::end_dga(&c))
            }
            "tensor" => {
                let fe = b.req("factors")?;
                let names = fe.value.as_str_list(fe.pos, "factors")?;
                if names.len() != 2 {
                    return Err(at(fe.pos, "builtin `tensor` needs exactly two `factors`"));
                }
                let l = self.dgalgebra(&names[0])?;
                let r = self.dgalgebra(&names[1])?;
                wrap(deraz_core::dgalg::tensor_dga(&l, &r))
            }
            "opposite" => {
                let of = b.req_str("of")?;
                let d = self.dgalgebra(&of)?;
                wrap(d.opposite())
            }
            other => Err(at(
                b.pos,
                format!(
                    "unknown builtin `{other}` (expected unit, matrix, product, quaternion, dual-numbers, zero, end, tensor, opposite)"
                ),
            )),
        }
    }
}

// ---- free helpers ----

pub fn parse_field(s: &str) -> Result<Field, String> {
    let t = s.trim();
    if t == "Q" {
        return Ok(Field::Q);
    }
    if let Some(rest) = t.strip_prefix("Fp(").and_then(|r| r.strip_suffix(')')) {
        if let Ok(p) = rest.trim().parse::<u64>() {
            return field_fp(p);
        }
    }
    if let Some(rest) = t.strip_prefix('F') {
        if let Ok(p) = rest.parse::<u64>() {
            return field_fp(p);
        }
    }
    Err(format!("unknown field `{s}` (use \"Q\", \"F5\", or \"Fp(5)\")"))
}

fn field_fp(p: u64) -> Result<Field, String> {
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
        return Err(format!("{p} is not prime"));
    }
    Ok(Field::Fp(p))
}

pub fn build_algebra(b: &Block) -> BResult<PolyAlgebra> {
    let field = parse_field(&b.req_str("field")?).map_err(|m| at(b.pos, m))?;
    let vars: Vec<String> = match b.entry("vars") {
        Some(e) => e.value.as_str_list(e.pos, "vars")?,
        None => Vec::new(),
    };
    let order = match b.str_entry("order")? {
        None => MonomialOrder::DegRevLex,
        Some(o) => match o.as_str() {
            "degrevlex" => MonomialOrder::DegRevLex,
            "lex" => MonomialOrder::Lex,
            other => return Err(at(b.pos, format!("unknown order `{other}` (degrevlex or lex)"))),
        },
    };
    let ring = match b.entry("weights") {
        None => PolyRing::new(field, vars, order),
        Some(e) => {
            let w = e.value.as_int_list(e.pos, "weights")?;
            if w.len() != vars.len() {
                return Err(at(e.pos, format!("`weights` must list {} weights", vars.len())));
            }
            PolyRing::new(field, vars, order).with_weights(w)
        }
    };
    let rels: Vec<Poly> = match b.entry("relations") {
        None => Vec::new(),
        Some(e) => {
            let strs = e.value.as_str_list(e.pos, "relations")?;
            strs.iter()
                .map(|s| parse_poly(&ring, s))
                .collect::<Result<_, _>>()
                .map_err(|er| at(e.pos, format!("relations: {er}")))?
        }
    };
    PolyAlgebra::new(ring, rels).map_err(|e| atc(b.pos, e))
}

pub fn parse_mat(ring: &PolyRing, rows: &[Vec<String>], want_rows: usize, want_cols: usize) -> Result<PolyMat, String> {
    if rows.len() != want_rows {
        return Err(format!("matrix has {} rows, expected {want_rows}", rows.len()));
    }
    let mut m = PolyMat::zero(want_rows, want_cols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != want_cols {
            return Err(format!("row {r} has {} entries, expected {want_cols}", row.len()));
        }
        for (c, s) in row.iter().enumerate() {
            let p = parse_poly(ring, s).map_err(|e| format!("entry ({r}, {c}) `{s}`: {e}"))?;
            *m.at_mut(r, c) = p;
        }
    }
    Ok(m)
}

/// Rewrite `1/v` to the localized ring's inverse variable. Any other
/// `/`-by-nonconstant is rejected with a hint; `/3` (a constant) is left
/// for the polynomial parser.
pub fn rewrite_inverses(expr: &str, ring: &PolyRing) -> Result<String, String> {
    let bytes = expr.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'/' {
            // what follows the slash?
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                j += 1;
            }
            let start = j;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let tail = &expr[start..j];
            if tail.is_empty() || tail.as_bytes()[0].is_ascii_digit() {
                // numeric division — the poly parser handles it
                out.push(b'/');
                i += 1;
                continue;
            }
            // who is being divided? must be a literal `1`
            let head_len = {
                let mut k = out.len();
                while k > 0 && (out[k - 1] as char).is_ascii_whitespace() {
                    k -= 1;
                }
                k
            };
            let literal_one = head_len > 0
                && out[head_len - 1] == b'1'
                && (head_len < 2 || !(out[head_len - 2].is_ascii_alphanumeric() || out[head_len - 2] == b'_'));
            if !literal_one {
                return Err(format!(
                    "cannot divide by `{tail}` — only `1/{tail}` is allowed, and only for the inverted element; write other fractions via the inverse variable `{tail}_inv`"
                ));
            }
            let inv = format!("{tail}_inv");
            if ring.var_index(&inv).is_none() {
                return Err(format!(
                    "`1/{tail}` is not available here: the overlap ring has no `{inv}` variable (only the overlap element is invertible)"
                ));
            }
            // drop the trailing `1` and emit the inverse variable
            out.truncate(head_len - 1);
            out.extend_from_slice(inv.as_bytes());
            i = j;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| "overlap map is not valid UTF-8 after rewriting".to_string())
}

/// Parse a point block body (`field`/`point`, or `ext-p`/`ext-minpoly`/`point`).
pub fn parse_point(b: &Block, nvars: usize) -> BResult<PointSpec> {
    if let Some(pe) = b.int_entry("ext-p")? {
        let mpe = b.req("ext-minpoly")?;
        let mp = mpe.value.as_int_list(mpe.pos, "ext-minpoly")?;
        if pe < 2 {
            return Err(at(b.pos, "ext-p must be a prime"));
        }
        let p = pe as u64;
        if mp.iter().any(|&c| c < 0) {
            return Err(at(mpe.pos, "ext-minpoly coefficients must be non-negative residues"));
        }
        // c0..c_{k-1} of a monic degree-k polynomial; irreducibility is checked
        let def = ExtFieldDef::new(p, mp.iter().map(|&c| c as u64).collect())
            .map_err(|e| atc(mpe.pos, e))?;
        let ce = b.req("point")?;
        let coords_i = ce.value.as_int_list_list(ce.pos, "point")?;
        if coords_i.len() != nvars {
            return Err(at(ce.pos, format!("point must have {nvars} coordinates")));
        }
        let coords: Vec<Vec<u64>> = coords_i
            .iter()
            .map(|c| c.iter().map(|&x| x.rem_euclid(pe) as u64).collect())
            .collect();
        return Ok(PointSpec::Ext { def, coords });
    }
    let field = parse_field(&b.req_str("field")?).map_err(|m| at(b.pos, m))?;
    let ce = b.req("point")?;
    let strs = ce.value.as_str_list(ce.pos, "point")?;
    if strs.len() != nvars {
        return Err(at(ce.pos, format!("point must have {nvars} coordinates")));
    }
    let coords: Vec<FieldElement> = strs
        .iter()
        .map(|s| FieldElement::parse(field, s))
        .collect::<Result<_, _>>()
        .map_err(|e| at(ce.pos, e))?;
    Ok(PointSpec::Base { field, coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::job::parse;

    fn ws_and_run<'a>(objects: &'a [Block]) -> Workspace<'a> {
        Workspace::new(objects, Caps::default()).unwrap()
    }

    #[test]
    fn builds_an_algebra_with_relations_and_weights() {
        let f = parse(
            r#"algebra A { field = "F5"; vars = ["x", "y"]; weights = [1, -1]; relations = ["x*y - 1"]; }
               task support { complex = "E"; }"#,
        )
        .unwrap();
        let mut ws = ws_and_run(&f.objects);
        let a = ws.algebra("A").unwrap();
        assert_eq!(a.field(), Field::Fp(5));
        assert_eq!(a.ring.weights.as_deref(), Some(&[1i64, -1][..]));
        assert_eq!(a.gb().len(), 1);
    }

    #[test]
    fn builds_complexes_with_differentials() {
        let f = parse(
            r#"algebra A { field = "Q"; vars = ["x"]; }
               complex E { algebra = "A"; degrees = [0, 1]; ranks = [1, 1]; d[0] = [["x"]]; }
               task support { complex = "E"; }"#,
        )
        .unwrap();
        let mut ws = ws_and_run(&f.objects);
        let e = ws.complex("E").unwrap();
        assert_eq!(e.lo, 0);
        assert_eq!(e.ranks, vec![1, 1]);
        assert!(!e.diff(0).at(0, 0).is_zero());
    }

    #[test]
    fn builds_builtin_dgalgebras() {
        let f = parse(
            r#"dgalgebra M2 { builtin = "matrix"; field = "Q"; n = 2; }
               dgalgebra H { builtin = "quaternion"; field = "F7"; a = "-1"; b = "-1"; }
               dgalgebra T { builtin = "tensor"; factors = ["M2", "M2"]; }
               dgalgebra Z { builtin = "zero"; field = "Q"; }
               task check-azumaya { object = "M2"; }"#,
        )
        .unwrap();
        let mut ws = ws_and_run(&f.objects);
        assert_eq!(ws.dgalgebra("M2").unwrap().complex.ranks, vec![4]);
        assert_eq!(ws.dgalgebra("H").unwrap().complex.ranks, vec![4]);
        assert_eq!(ws.dgalgebra("T").unwrap().complex.ranks, vec![16]);
        assert!(ws.dgalgebra("Z").unwrap().complex.is_zero_complex());
    }

    #[test]
    fn builds_a_two_patch_scheme_with_inverse_rewrite() {
        let f = parse(
            r#"algebra AU { field = "Q"; vars = ["t"]; weights = [1]; }
               algebra AV { field = "Q"; vars = ["s"]; weights = [-1]; }
               scheme P1 {
                 patch U { algebra = "AU"; }
                 patch V { algebra = "AV"; }
                 overlap (U, V) { f = "t"; map = { t -> "1/s"; }; }
                 overlap (V, U) { f = "s"; map = { s -> "1/t"; }; }
               }
               task cech { scheme = "P1"; }"#,
        )
        .unwrap();
        let mut ws = ws_and_run(&f.objects);
        let x = ws.scheme("P1").unwrap();
        assert_eq!(x.n_patches(), 2);
        assert_eq!(x.names, vec!["U", "V"]);
    }

    #[test]
    fn rejects_bad_inverse_uses() {
        let ring = PolyRing::new(Field::Q, vec!["s".into(), "s_inv".into()], MonomialOrder::DegRevLex);
        assert_eq!(rewrite_inverses("1/s", &ring).unwrap(), "s_inv");
        assert_eq!(rewrite_inverses("1/s + s^2", &ring).unwrap(), "s_inv + s^2");
        assert!(rewrite_inverses("t/s", &ring).is_err());
        assert!(rewrite_inverses("1/t", &ring).is_err());
        assert_eq!(rewrite_inverses("3/2*s", &ring).unwrap(), "3/2*s");
    }

    #[test]
    fn detects_reference_cycles() {
        let f = parse(
            r#"dgalgebra A { builtin = "opposite"; of = "B"; }
               dgalgebra B { builtin = "opposite"; of = "A"; }
               task check-azumaya { object = "A"; }"#,
        )
        .unwrap();
        let mut ws = ws_and_run(&f.objects);
        let e = ws.dgalgebra("A").unwrap_err();
        assert!(e.msg.contains("cycle"), "{}", e.msg);
    }

    #[test]
    fn parses_points_in_both_flavors() {
        let f = parse(
            r#"witness W { kind = "acyclic-fiber"; field = "F5"; point = ["2", "3"]; }
               witness W2 { kind = "acyclic-fiber"; ext-p = 3; ext-minpoly = [1, 0]; point = [[1, 2]]; }
               task verify-certificate { witness = "W"; }"#,
        )
        .unwrap();
        let p = parse_point(&f.objects[0], 2).unwrap();
        assert_eq!(p.nvars(), 2);
        let p2 = parse_point(&f.objects[1], 1).unwrap();
        assert_eq!(p2.field_label(), "F_3^2");
    }
}
