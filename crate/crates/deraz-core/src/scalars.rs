//! Exact field arithmetic (ℚ and F_p) and dense linear algebra.
//!
//! Everything downstream reduces quasi-isomorphism and generation verdicts
//! to exact rank/kernel computations done here. There is deliberately no
//! floating point: a verdict is either proved or not produced.

use crate::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// The base field: ℚ or a prime field F_p with p < 2³¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Q,
    Fp(u64),
}

impl Field {
    pub fn zero(&self) -> FieldElement {
        match self {
            Field::Q => FieldElement::Q(BigRational::zero()),
            Field::Fp(p) => FieldElement::Fp { p: *p, v: 0 },
        }
    }

    pub fn one(&self) -> FieldElement {
        match self {
            Field::Q => FieldElement::Q(BigRational::one()),
            Field::Fp(p) => FieldElement::Fp { p: *p, v: 1 },
        }
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match self {
            Field::Q => FieldElement::Q(BigRational::from(BigInt::from(n))),
            Field::Fp(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                FieldElement::Fp { p: *p, v: m }
            }
        }
    }

    /// Characteristic (0 for ℚ).
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Q => 0,
            Field::Fp(p) => *p,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "Fp({p})"),
        }
    }
}

/// An exact scalar. ℚ values are kept in lowest terms with positive
/// denominator (num-rational maintains that); F_p residues live in [0, p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Q(BigRational),
    Fp { p: u64, v: u64 },
}

fn fp_inv(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    Some(s0.rem_euclid(p as i128) as u64)
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Q(_) => Field::Q,
            FieldElement::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Q(r) => r.is_zero(),
            FieldElement::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Q(r) => r.is_one(),
            FieldElement::Fp { v, .. } => *v == 1,
        }
    }

    fn check_same(&self, other: &FieldElement) {
        debug_assert_eq!(
            self.field(),
            other.field(),
            "mixed-field scalar arithmetic"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check_same(other);
        match (self, other) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a + b),
            (FieldElement::Fp { p, v: a }, FieldElement::Fp { v: b, .. }) => {
                FieldElement::Fp { p: *p, v: (a + b) % p }
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.check_same(other);
        match (self, other) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a - b),
            (FieldElement::Fp { p, v: a }, FieldElement::Fp { v: b, .. }) => {
                FieldElement::Fp { p: *p, v: (a + p - b) % p }
            }
            _ => unreachable!(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check_same(other);
        match (self, other) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a * b),
            (FieldElement::Fp { p, v: a }, FieldElement::Fp { v: b, .. }) => {
                // p < 2³¹ so the product fits in u64
                FieldElement::Fp { p: *p, v: a * b % p }
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> FieldElement {
        match self {
            FieldElement::Q(a) => FieldElement::Q(-a),
            FieldElement::Fp { p, v } => FieldElement::Fp { p: *p, v: (p - v) % p },
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<FieldElement> {
        match self {
            FieldElement::Q(a) => {
                if a.is_zero() {
                    None
                } else {
                    Some(FieldElement::Q(a.recip()))
                }
            }
            FieldElement::Fp { p, v } => fp_inv(*v, *p).map(|v| FieldElement::Fp { p: *p, v }),
        }
    }

    pub fn div(&self, other: &FieldElement) -> Option<FieldElement> {
        other.inv().map(|i| self.mul(&i))
    }

    /// Parse from an integer-or-fraction literal such as `-3` or `2/5`.
    pub fn parse(field: Field, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: BigInt = num_s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad scalar literal `{s}`")))?;
        let den: BigInt = match den_s {
            Some(d) => d
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad scalar literal `{s}`")))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
        }
        match field {
            Field::Q => Ok(FieldElement::Q(BigRational::new(num, den))),
            Field::Fp(p) => {
                let pb = BigInt::from(p);
                let red = |x: &BigInt| -> u64 {
                    let m = x % &pb;
                    let m = if m.is_negative() { m + &pb } else { m };
                    m.try_into().unwrap()
                };
                let n = red(&num);
                let d = red(&den);
                let di = fp_inv(d, p)
                    .ok_or_else(|| Error::InvalidInput(format!("`{s}` divides by 0 mod {p}")))?;
                Ok(FieldElement::Fp { p, v: n * di % p })
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Q(r) => write!(f, "{r}"),
            FieldElement::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Dense row-major matrix over a single field. The field tag is stored
/// explicitly so that 0×n shapes keep their field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeError(format!(
                "{}×{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        for e in &entries {
            if e.field() != field {
                return Err(Error::FieldMismatch(format!(
                    "entry over {} in a matrix over {}",
                    e.field(),
                    field
                )));
            }
        }
        Ok(Matrix { field, rows, cols, entries })
    }

    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, entries }
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut FieldElement {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("matrix product".into()));
        }
        if self.cols != other.rows {
            return Err(Error::ShapeError(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j).add(&a.mul(b));
                    *out.at_mut(i, j) = cur;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeError("matrix sum shape".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix::new(self.field, self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.mul(c)).collect(),
        }
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeError("hstack row mismatch".into()));
        }
        Ok(Matrix::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        }))
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::ShapeError("vstack col mismatch".into()));
        }
        Ok(Matrix::from_fn(self.field, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j).clone()
            } else {
                other.at(i - self.rows, j).clone()
            }
        }))
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn apply(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::ShapeError("matrix-vector shape".into()));
        }
        let mut out = vec![self.field.zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if !a.is_zero() && !v[j].is_zero() {
                    out[i] = out[i].add(&a.mul(&v[j]));
                }
            }
        }
        Ok(out)
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    /// First-nonzero pivoting keeps the result deterministic.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    let a = self.at(r, j).clone();
                    let b = self.at(pr, j).clone();
                    *self.at_mut(r, j) = b;
                    *self.at_mut(pr, j) = a;
                }
            }
            let inv = self.at(r, c).inv().expect("pivot nonzero");
            for j in c..self.cols {
                let v = self.at(r, j).mul(&inv);
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let v = self.at(i, j).sub(&f.mul(self.at(r, j)));
                        *self.at_mut(i, j) = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Row rank.
    pub fn rank(&self) -> usize {
        let mut w = self.clone();
        w.rref().len()
    }

    /// Columns spanning ker(self); shape cols × (cols − rank).
    pub fn kernel_basis(&self) -> Matrix {
        let mut w = self.clone();
        let pivots = w.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zero(self.field, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            *out.at_mut(fc, k) = self.field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                *out.at_mut(pc, k) = w.at(r, fc).neg();
            }
        }
        out
    }

    /// One solution of self·x = b, if consistent (free variables set to 0).
    pub fn solve(&self, b: &[FieldElement]) -> Result<Option<Vec<FieldElement>>> {
        if b.len() != self.rows {
            return Err(Error::ShapeError(format!(
                "solve: {} rows vs {} rhs entries",
                self.rows,
                b.len()
            )));
        }
        let bm = Matrix::new(self.field, self.rows, 1, b.to_vec())?;
        Ok(self.solve_matrix(&bm)?.map(|m| m.entries))
    }

    /// Solve self·X = B columnwise; `None` when any column is inconsistent.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(Error::ShapeError("solve_matrix shape".into()));
        }
        let mut aug = self.hstack(b)?;
        let pivots = aug.rref();
        // any pivot in the rhs block means inconsistency
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zero(self.field, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                *x.at_mut(pc, j) = aug.at(r, self.cols + j).clone();
            }
        }
        Ok(Some(x))
    }
}

/// Sparse rows for large, very sparse rank problems (structure maps of
/// tensor dg-algebras get big while staying near-permutation sparse).
/// Online echelon: rows are inserted in order and reduced against the
/// pivot rows seen so far, keyed by leading column.
#[derive(Debug, Clone)]
pub struct SparseMat {
    pub cols: usize,
    pub field: Field,
    rows: Vec<Vec<(usize, FieldElement)>>,
}

impl SparseMat {
    pub fn new(field: Field, cols: usize) -> SparseMat {
        SparseMat { cols, field, rows: Vec::new() }
    }

    pub fn from_dense(m: &Matrix) -> SparseMat {
        let mut s = SparseMat::new(m.field, m.cols);
        for i in 0..m.rows {
            let row: Vec<(usize, FieldElement)> = (0..m.cols)
                .filter(|&j| !m.at(i, j).is_zero())
                .map(|j| (j, m.at(i, j).clone()))
                .collect();
            s.push_row(row);
        }
        s
    }

    pub fn push_row(&mut self, row: Vec<(usize, FieldElement)>) {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(row.iter().all(|(j, v)| *j < self.cols && !v.is_zero()));
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// row ← row − c·other (sparse merge).
    fn row_sub_scaled(
        row: &[(usize, FieldElement)],
        c: &FieldElement,
        other: &[(usize, FieldElement)],
    ) -> Vec<(usize, FieldElement)> {
        let mut out = Vec::with_capacity(row.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < row.len() || j < other.len() {
            if j == other.len() || (i < row.len() && row[i].0 < other[j].0) {
                out.push(row[i].clone());
                i += 1;
            } else if i == row.len() || other[j].0 < row[i].0 {
                let v = c.mul(&other[j].1).neg();
                if !v.is_zero() {
                    out.push((other[j].0, v));
                }
                j += 1;
            } else {
                let v = row[i].1.sub(&c.mul(&other[j].1));
                if !v.is_zero() {
                    out.push((row[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut pivots: BTreeMap<usize, Vec<(usize, FieldElement)>> = BTreeMap::new();
        for row in &self.rows {
            let mut r = row.clone();
            loop {
                let Some(&(lead, ref lv)) = r.first() else { break };
                match pivots.get(&lead) {
                    Some(p) => {
                        let c = lv.clone(); // pivot rows are normalized to leading 1
                        r = Self::row_sub_scaled(&r, &c, p);
                    }
                    None => {
                        let inv = lv.inv().expect("nonzero leading entry");
                        let norm: Vec<_> = r.iter().map(|(j, v)| (*j, v.mul(&inv))).collect();
                        pivots.insert(lead, norm);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}
