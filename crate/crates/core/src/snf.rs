//! Integer Smith normal form with overflow detection.

use crate::error::{Error, Result};

/// Refuses dense elimination above this many entries.
pub const DENSE_ENTRY_LIMIT: usize = 16_000_000;

/// Sparse integer matrix stored by columns. No explicit zeros, no
/// duplicate positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMat {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMat {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseIntMat {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = SparseIntMat::new(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.add(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j]
            .binary_search_by_key(&i, |e| e.0)
            .map_or(0, |k| self.columns[j][k].1)
    }

    /// Adds `v` to entry `(i, j)`, dropping it if the sum is zero.
    pub fn add(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of bounds");
        if v == 0 {
            return;
        }
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => {
                col[k].1 += v;
                if col[k].1 == 0 {
                    col.remove(k);
                }
            }
            Err(k) => col.insert(k, (i, v)),
        }
    }

    /// Appends a column given as `(row, value)` pairs (duplicates summed).
    pub fn push_column(&mut self, entries: &[(usize, i64)]) {
        self.columns.push(Vec::new());
        self.cols += 1;
        let j = self.cols - 1;
        for &(i, v) in entries {
            self.add(i, j, v);
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i128>> {
        let mut out = vec![vec![0i128; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] = v as i128;
            }
        }
        out
    }
}

/// Nonzero diagonal of the Smith form, `d1 | d2 | ...`, all positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<u128>,
    pub rank: usize,
}

impl SmithForm {
    /// Invariant factors of the cokernel's torsion (entries above 1).
    pub fn torsion_factors(&self) -> Vec<u128> {
        self.diagonal.iter().copied().filter(|&d| d > 1).collect()
    }
}

/// `U · A · V = D` with `U`, `V` unimodular.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub diagonal: Vec<u128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

pub fn smith_normal_form(m: &SparseIntMat) -> Result<SmithForm> {
    if m.rows.saturating_mul(m.cols) > DENSE_ENTRY_LIMIT {
        return Err(Error::Resource(format!(
            "{}x{} matrix exceeds the dense elimination limit",
            m.rows, m.cols
        )));
    }
    let diagonal = eliminate(m.to_dense(), m.rows, m.cols, false)?.diagonal;
    Ok(SmithForm {
        rank: diagonal.len(),
        diagonal,
    })
}

/// Smith form with both transforms, for small dense matrices.
pub fn smith_with_transforms(a: &[Vec<i128>]) -> Result<SmithDecomposition> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows.saturating_mul(cols) > DENSE_ENTRY_LIMIT {
        return Err(Error::Resource("matrix exceeds the dense elimination limit".into()));
    }
    eliminate(a.to_vec(), rows, cols, true)
}

fn ck(v: Option<i128>) -> Result<i128> {
    v.ok_or(Error::Overflow)
}

struct State {
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    track: bool,
}

impl State {
    // row_i -= f * row_j
    fn row_axpy(&mut self, i: usize, j: usize, f: i128) -> Result<()> {
        if f == 0 {
            return Ok(());
        }
        for m in [&mut self.a].into_iter().chain(self.track.then_some(&mut self.u)) {
            let (src, dst) = if i < j {
                let (lo, hi) = m.split_at_mut(j);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[j], &mut hi[0])
            };
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                if s != 0 {
                    *d = ck(d.checked_sub(ck(f.checked_mul(s))?))?;
                }
            }
        }
        Ok(())
    }

    // col_i -= f * col_j
    fn col_axpy(&mut self, i: usize, j: usize, f: i128) -> Result<()> {
        if f == 0 {
            return Ok(());
        }
        for row in &mut self.a {
            if row[j] != 0 {
                row[i] = ck(row[i].checked_sub(ck(f.checked_mul(row[j]))?))?;
            }
        }
        if self.track {
            for row in &mut self.v {
                if row[j] != 0 {
                    row[i] = ck(row[i].checked_sub(ck(f.checked_mul(row[j]))?))?;
                }
            }
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if self.track {
            for row in &mut self.v {
                row.swap(i, j);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -*x;
        }
        if self.track {
            for x in &mut self.u[i] {
                *x = -*x;
            }
        }
    }
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn eliminate(a: Vec<Vec<i128>>, rows: usize, cols: usize, track: bool) -> Result<SmithDecomposition> {
    let mut st = State {
        a,
        u: if track { identity(rows) } else { Vec::new() },
        v: if track { identity(cols) } else { Vec::new() },
        track,
    };
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        // least absolute value, then least row, then least column
        let mut best: Option<(i128, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = st.a[i][j];
                if x != 0 {
                    let key = (x.checked_abs().ok_or(Error::Overflow)?, i, j);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if st.a[i][t] != 0 {
                    let q = st.a[i][t].div_euclid(st.a[t][t]);
                    st.row_axpy(i, t, q)?;
                    if st.a[i][t] != 0 {
                        st.swap_rows(t, i);
                        changed = true;
                    }
                }
            }
            for j in t + 1..cols {
                if st.a[t][j] != 0 {
                    let q = st.a[t][j].div_euclid(st.a[t][t]);
                    st.col_axpy(j, t, q)?;
                    if st.a[t][j] != 0 {
                        st.swap_cols(t, j);
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // divisibility of the remaining block
            let p = st.a[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| st.a[i][j] % p != 0));
            match bad {
                Some(i) => st.row_axpy(t, i, -1)?,
                None => break,
            }
        }
        if st.a[t][t] < 0 {
            st.negate_row(t);
        }
        diagonal.push(st.a[t][t] as u128);
    }
    Ok(SmithDecomposition {
        diagonal,
        u: st.u,
        v: st.v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..n)
                    .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn examples() {
        let f = smith_normal_form(&SparseIntMat::from_dense(&[vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!((f.diagonal.clone(), f.rank), (vec![1, 6], 2));
        assert_eq!(f.torsion_factors(), vec![6]);

        let f = smith_normal_form(&SparseIntMat::new(3, 4)).unwrap();
        assert_eq!((f.diagonal.len(), f.rank), (0, 0));

        let f = smith_normal_form(&SparseIntMat::from_dense(&[vec![2, 4], vec![4, 8]])).unwrap();
        assert_eq!((f.diagonal, f.rank), (vec![2], 1));
    }

    #[test]
    fn transforms_reproduce_diagonal() {
        let a: Vec<Vec<i128>> = vec![vec![6, 4, 2], vec![-3, 9, 12], vec![0, 5, 7], vec![1, 1, 1]];
        let d = smith_with_transforms(&a).unwrap();
        let prod = mul(&mul(&d.u, &a), &d.v);
        for (i, row) in prod.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let expect = if i == j && i < d.diagonal.len() { d.diagonal[i] as i128 } else { 0 };
                assert_eq!(x, expect);
            }
        }
        for w in d.diagonal.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX;
        let m = SparseIntMat::from_dense(&[vec![big, big - 1], vec![big - 2, big]]);
        // determinants of this size stay inside i128; squares of them do not
        let _ = smith_normal_form(&m);
        let huge = vec![vec![i128::MAX, 3], vec![5, i128::MAX - 1]];
        assert_eq!(smith_with_transforms(&huge).unwrap_err(), Error::Overflow);
    }

    #[test]
    fn sparse_accessors() {
        let mut m = SparseIntMat::new(2, 2);
        m.add(0, 1, 3);
        m.add(0, 1, -3);
        assert_eq!(m.nnz(), 0);
        m.push_column(&[(1, 2), (1, 2)]);
        assert_eq!(m.get(1, 2), 4);
        assert_eq!(m.cols(), 3);
    }
}
