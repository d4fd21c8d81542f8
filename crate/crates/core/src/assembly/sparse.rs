use crate::{Error, Result};

/// Uncompressed sparse matrix as `(ii, jj, ss)` lists. Duplicates are
/// summed by [`SparseTriples::compress`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTriples {
    pub nrows: usize,
    pub ncols: usize,
    pub ii: Vec<usize>,
    pub jj: Vec<usize>,
    pub ss: Vec<f64>,
}

impl SparseTriples {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            ii: Vec::new(),
            jj: Vec::new(),
            ss: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            ii: Vec::with_capacity(cap),
            jj: Vec::with_capacity(cap),
            ss: Vec::with_capacity(cap),
        }
    }

    pub fn len(&self) -> usize {
        self.ss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ss.is_empty()
    }

    pub fn push(&mut self, i: usize, j: usize, s: f64) {
        self.ii.push(i);
        self.jj.push(j);
        self.ss.push(s);
    }

    /// Appends `other` shifted by `(row_off, col_off)`.
    pub fn append_offset(&mut self, other: &SparseTriples, row_off: usize, col_off: usize) {
        self.ii.extend(other.ii.iter().map(|i| i + row_off));
        self.jj.extend(other.jj.iter().map(|j| j + col_off));
        self.ss.extend_from_slice(&other.ss);
    }

    pub fn compress(&self) -> Result<CsrMatrix> {
        compress(self)
    }
}

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

/// Sums duplicates and sorts by `(row, col)`. Duplicates are added in
/// their order of appearance, so the result is deterministic.
pub fn compress(t: &SparseTriples) -> Result<CsrMatrix> {
    if t.ii.len() != t.ss.len() || t.jj.len() != t.ss.len() {
        return Err(Error::Length {
            expected: t.ss.len(),
            got: t.ii.len().min(t.jj.len()),
        });
    }
    for (&i, &j) in t.ii.iter().zip(&t.jj) {
        if i >= t.nrows || j >= t.ncols {
            return Err(Error::IndexOutOfRange {
                row: i,
                col: j,
                nrows: t.nrows,
                ncols: t.ncols,
            });
        }
    }
    // counting sort by row, then stable sort by column within each row
    let mut counts = vec![0usize; t.nrows + 1];
    for &i in &t.ii {
        counts[i + 1] += 1;
    }
    for r in 0..t.nrows {
        counts[r + 1] += counts[r];
    }
    let mut next = counts.clone();
    let mut order = vec![0usize; t.len()];
    for (k, &i) in t.ii.iter().enumerate() {
        order[next[i]] = k;
        next[i] += 1;
    }
    let mut indptr = Vec::with_capacity(t.nrows + 1);
    let mut indices = Vec::new();
    let mut data = Vec::new();
    indptr.push(0);
    for r in 0..t.nrows {
        let row = &mut order[counts[r]..counts[r + 1]];
        row.sort_by_key(|&k| t.jj[k]);
        for &k in row.iter() {
            let j = t.jj[k];
            if indices.len() > indptr[r] && *indices.last().unwrap() == j {
                *data.last_mut().unwrap() += t.ss[k];
            } else {
                indices.push(j);
                data.push(t.ss[k]);
            }
        }
        indptr.push(indices.len());
    }
    Ok(CsrMatrix {
        nrows: t.nrows,
        ncols: t.ncols,
        indptr,
        indices,
        data,
    })
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.data[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.data[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_triples(&self) -> SparseTriples {
        let mut t = SparseTriples::with_capacity(self.nrows, self.ncols, self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(i, j, v);
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::Length {
                expected: self.ncols,
                got: x.len(),
            });
        }
        Ok((0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = SparseTriples::with_capacity(self.ncols, self.nrows, self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(j, i, v);
            }
        }
        compress(&t).expect("transpose indices are in range")
    }

    pub fn scale(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + other`; the sparsity pattern is the union.
    pub fn add(&self, other: &CsrMatrix) -> Result<CsrMatrix> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::Shape {
                expected: format!("{}x{}", self.nrows, self.ncols),
                got: format!("{}x{}", other.nrows, other.ncols),
            });
        }
        let mut t = self.to_triples();
        t.append_offset(&other.to_triples(), 0, 0);
        compress(&t)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut t = SparseTriples::new(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if col_pos[j] != usize::MAX {
                    t.push(r, col_pos[j], v);
                }
            }
        }
        compress(&t).expect("selected indices are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_sum() {
        let mut t = SparseTriples::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        let a = t.compress().unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 1), 0.0);
    }

    #[test]
    fn out_of_range() {
        let mut t = SparseTriples::new(2, 2);
        t.push(2, 0, 1.0);
        assert!(matches!(t.compress(), Err(Error::IndexOutOfRange { row: 2, .. })));
    }

    #[test]
    fn rows_are_sorted_and_ops_work() {
        let mut t = SparseTriples::new(3, 3);
        for (i, j, v) in [(2, 1, 4.0), (0, 2, 1.0), (0, 0, 2.0), (2, 0, -1.0), (1, 1, 3.0), (0, 2, 1.0)] {
            t.push(i, j, v);
        }
        let a = t.compress().unwrap();
        assert_eq!(a.indptr(), &[0, 2, 3, 5]);
        assert_eq!(a.indices(), &[0, 2, 1, 0, 1]);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![4.0, 3.0, 3.0]);
        let at = a.transpose();
        assert_eq!(at.get(1, 2), 4.0);
        assert_eq!(at.transpose(), a);
        let s = a.add(&a.scale(-1.0)).unwrap();
        assert_eq!(s.frobenius_norm(), 0.0);
        assert_eq!(a.to_dense()[0], vec![2.0, 0.0, 2.0]);
        let sub = a.select(&[2, 0], &[0, 1]);
        assert_eq!(sub.to_dense(), vec![vec![-1.0, 4.0], vec![2.0, 0.0]]);
    }
}
