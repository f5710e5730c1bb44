use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance used when an operator is asserted Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Sparse complex square matrix in compressed-row form.
///
/// Entries within a row are sorted by column and unique. The `hermitian`
/// flag is only ever set after the matrix has been checked against its
/// adjoint to [`HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

/// Coordinate-list accumulator for [`Operator`].
///
/// Duplicate coordinates are summed in insertion order when the builder is
/// finished, so assembly is reproducible bit for bit.
#[derive(Clone, Debug)]
pub struct OperatorBuilder {
    dim: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl OperatorBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            triplets: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        Self {
            dim,
            triplets: Vec::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) -> &mut Self {
        self.triplets.push((row, col, value));
        self
    }

    pub fn finish(mut self) -> Result<Operator> {
        let dim = self.dim;
        if let Some(&(r, c, _)) = self.triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::IndexOutOfRange(format!(
                "entry ({r}, {c}) in operator of dimension {dim}"
            )));
        }
        // stable: equal coordinates keep insertion order
        self.triplets.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(self.triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(self.triplets.len());
        let mut rows = Vec::with_capacity(self.triplets.len());
        for (r, c, v) in self.triplets {
            match (rows.last(), cols.last()) {
                (Some(&lr), Some(&lc)) if lr == r && lc == c => {
                    *vals.last_mut().unwrap() += v;
                }
                _ => {
                    rows.push(r);
                    cols.push(c);
                    vals.push(v);
                }
            }
        }
        // drop entries that cancelled exactly
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Operator {
            dim,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
            hermitian: false,
        })
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    /// Real diagonal matrix; flagged Hermitian.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut b = OperatorBuilder::with_capacity(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            b.push(i, i, C64::new(v, 0.0));
        }
        let mut op = b.finish().expect("diagonal indices are in range");
        op.hermitian = true;
        op
    }

    /// Build from a dense matrix, skipping exact zeros.
    pub fn from_dense(a: &Array2<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let mut b = OperatorBuilder::new(a.nrows());
        for ((r, c), &v) in a.indexed_iter() {
            if v != ZERO {
                b.push(r, c, v);
            }
        }
        b.finish()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// True when every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// Iterate over stored entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim)
            .flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k])))
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        if row >= self.dim {
            return ZERO;
        }
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.cols[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => ZERO,
        }
    }

    /// Diagonal entries as a dense vector.
    pub fn diag(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `out = A x`
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        assert_eq!(x.len(), self.dim, "operand length");
        assert_eq!(out.len(), self.dim, "output length");
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// `<x|A|x>`
    pub fn expectation(&self, x: &[C64]) -> C64 {
        assert_eq!(x.len(), self.dim, "operand length");
        let mut acc = ZERO;
        for r in 0..self.dim {
            let mut row = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.vals[k] * x[self.cols[k]];
            }
            acc += x[r].conj() * row;
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        let mut b = OperatorBuilder::with_capacity(self.dim, self.nnz());
        for (r, c, v) in self.entries() {
            b.push(c, r, v.conj());
        }
        let mut op = b.finish().expect("transposed indices stay in range");
        op.hermitian = self.hermitian;
        op
    }

    pub fn scale(&self, factor: C64) -> Self {
        if factor == ZERO {
            return Self::zeros(self.dim);
        }
        let mut op = self.clone();
        for v in &mut op.vals {
            *v *= factor;
        }
        op.hermitian = self.hermitian && factor.im == 0.0;
        op
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, other: &Self, factor: C64) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut b = OperatorBuilder::with_capacity(self.dim, self.nnz() + other.nnz());
        for (r, c, v) in self.entries() {
            b.push(r, c, v);
        }
        for (r, c, v) in other.entries() {
            b.push(r, c, factor * v);
        }
        let mut op = b.finish()?;
        op.hermitian = self.hermitian && other.hermitian && factor.im == 0.0;
        Ok(op)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, ONE)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -ONE)
    }

    /// Sparse matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut b = OperatorBuilder::new(self.dim);
        let mut row_acc: BTreeMap<usize, C64> = BTreeMap::new();
        for r in 0..self.dim {
            row_acc.clear();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.vals[k];
                let mid = self.cols[k];
                for kk in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    *row_acc.entry(other.cols[kk]).or_insert(ZERO) += a * other.vals[kk];
                }
            }
            for (&c, &v) in &row_acc {
                b.push(r, c, v);
            }
        }
        b.finish()
    }

    /// `[self, other] = self*other - other*self`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// Kronecker product `self ⊗ other`; the left factor is the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut b = OperatorBuilder::with_capacity(dim, self.nnz() * other.nnz());
        for (ra, ca, va) in self.entries() {
            for (rb, cb, vb) in other.entries() {
                b.push(ra * other.dim + rb, ca * other.dim + cb, va * vb);
            }
        }
        let mut op = b.finish().expect("kron indices are in range");
        op.hermitian = self.hermitian && other.hermitian;
        op
    }

    /// Largest entry modulus; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A - B|` over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `max |A - A†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for (r, c, v) in self.entries() {
            defect = defect.max((v - self.get(c, r).conj()).norm());
        }
        defect
    }

    /// Verify Hermiticity to [`HERMITIAN_TOL`] and set the flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            return Ok(());
        }
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            Err(Error::NotHermitian { defect })
        } else {
            Ok(())
        }
    }

    /// Connected components of the coupling graph (an edge per nonzero
    /// off-diagonal entry). Each block is sorted; blocks are ordered by
    /// their smallest index.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut parent: Vec<usize> = (0..self.dim).collect();
        for (r, c, _) in self.entries() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut slot = vec![usize::MAX; self.dim];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.dim {
            let root = find(&mut parent, i);
            if slot[root] == usize::MAX {
                slot[root] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[root]].push(i);
        }
        blocks
    }

    /// Submatrix on the sorted index set `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Result<Operator> {
        let mut local = vec![usize::MAX; self.dim];
        for (k, &i) in indices.iter().enumerate() {
            if i >= self.dim {
                return Err(Error::IndexOutOfRange(format!("index {i} >= dim {}", self.dim)));
            }
            local[i] = k;
        }
        let mut b = OperatorBuilder::new(indices.len());
        for &i in indices {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = local[self.cols[k]];
                if j != usize::MAX {
                    b.push(local[i], j, self.vals[k]);
                }
            }
        }
        let mut op = b.finish()?;
        op.hermitian = self.hermitian;
        Ok(op)
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut a = Array2::from_elem((self.dim, self.dim), ZERO);
        for (r, c, v) in self.entries() {
            a[(r, c)] = v;
        }
        a
    }

    /// Dense real part; callers should check [`Operator::is_real`] first.
    pub fn to_dense_real(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.entries() {
            a[(r, c)] = v.re;
        }
        a
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}
