use crate::error::{Error, Result};

/// Feature matrices with at most this many columns are stored densely.
pub const DENSE_MAX_COLS: usize = 64;

/// Compressed-row sparse matrix with 0-based column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists. Columns inside a row must
    /// be strictly increasing.
    pub fn from_rows(cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for (r, row) in rows.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &(c, v) in row {
                if c >= cols {
                    return Err(Error::Dataset(format!("row {r}: column {c} out of range (n = {cols})")));
                }
                if prev.is_some_and(|p| p >= c) {
                    return Err(Error::Dataset(format!("row {r}: columns not strictly increasing")));
                }
                if !v.is_finite() {
                    return Err(Error::Dataset(format!("row {r}: non-finite value at column {c}")));
                }
                prev = Some(c);
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Ok(Self { rows: rows.len(), cols, indptr, indices, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                data[r * self.cols + c] = v;
            }
        }
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dataset("non-finite feature value".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMatrix {
    Sparse(CsrMatrix),
    Dense(DenseMatrix),
}

impl FeatureMatrix {
    /// Sparse storage, or dense when `cols <= DENSE_MAX_COLS`.
    pub fn from_rows(cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let csr = CsrMatrix::from_rows(cols, rows)?;
        Ok(if cols <= DENSE_MAX_COLS { Self::Dense(csr.to_dense()) } else { Self::Sparse(csr) })
    }

    pub fn rows(&self) -> usize {
        match self {
            Self::Sparse(m) => m.rows(),
            Self::Dense(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Self::Sparse(m) => m.cols(),
            Self::Dense(m) => m.cols(),
        }
    }

    /// `out = A x`
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols());
        debug_assert_eq!(out.len(), self.rows());
        match self {
            Self::Sparse(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = m.row(r).map(|(c, v)| v * x[c]).sum();
                }
            }
            Self::Dense(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = m.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// `out = Aᵀ y`
    pub fn matvec_t(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows());
        debug_assert_eq!(out.len(), self.cols());
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            Self::Sparse(m) => {
                for (r, &yr) in y.iter().enumerate() {
                    for (c, v) in m.row(r) {
                        out[c] += v * yr;
                    }
                }
            }
            Self::Dense(m) => {
                for (r, &yr) in y.iter().enumerate() {
                    for (o, a) in out.iter_mut().zip(m.row(r)) {
                        *o += a * yr;
                    }
                }
            }
        }
    }
}

/// Binary classification data: features `A ∈ R^{M×n}` and labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: FeatureMatrix,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(features: FeatureMatrix, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::DimensionMismatch { expected: features.rows(), got: labels.len() });
        }
        if labels.is_empty() {
            return Err(Error::Dataset("dataset has no samples".into()));
        }
        if let Some(y) = labels.iter().find(|y| **y != 1.0 && **y != -1.0) {
            return Err(Error::Dataset(format!("label {y} is not -1 or +1")));
        }
        Ok(Self { features, labels })
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Sample count `M`.
    pub fn samples(&self) -> usize {
        self.labels.len()
    }

    /// Feature count `n`.
    pub fn dim(&self) -> usize {
        self.features.cols()
    }
}
