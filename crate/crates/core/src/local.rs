//! Column-space elimination over `Z/p^k`.
//!
//! Columns are streamed twice. The first pass collects pivots with unit
//! entries into a reduced row echelon form; modulo those the quotient is
//! `(Z/p^k)^d` on the remaining rows. The second pass reduces every column
//! against the final unit pivots and feeds the (now `p`-divisible) residues
//! into a small echelon accumulator over the `d` remaining rows, whose local
//! Smith form gives the cokernel.

use crate::error::{Error, Result};

/// Arithmetic in `Z/p^k`. The modulus must stay below 2^32 so products fit
/// in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

impl PrimePower {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p < 2 || k == 0 {
            return Err(Error::Precondition("modulus p^k needs p ≥ 2 and k ≥ 1".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q < (1 << 32))
            .ok_or_else(|| Error::Resource(format!("modulus {p}^{k} exceeds 2^32")))?;
        Ok(PrimePower { p, k, q })
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    /// p-adic valuation of a nonzero residue.
    pub fn val(&self, mut x: u64) -> u32 {
        debug_assert!(x != 0 && x < self.q);
        let mut j = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            j += 1;
        }
        j
    }

    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.p)
    }

    pub fn inv(&self, x: u64) -> u64 {
        inv_mod(x, self.q)
    }

    pub fn pow_p(&self, j: u32) -> u64 {
        self.p.pow(j)
    }
}

/// Inverse of `x` modulo `q`; `x` must be coprime to `q`.
pub fn inv_mod(x: u64, q: u64) -> u64 {
    let (mut r0, mut r1) = (q as i64, (x % q) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let f = r0 / r1;
        (r0, r1) = (r1, r0 - f * r1);
        (t0, t1) = (t1, t0 - f * t1);
    }
    debug_assert!(r0 == 1 || q == 1, "{x} is not a unit mod {q}");
    t0.rem_euclid(q as i64) as u64
}

#[inline]
fn axpy(dst: &mut [u64], src: &[u64], f: u64, q: u64) {
    // dst -= f * src
    let g = q - f;
    for (d, &s) in dst.iter_mut().zip(src) {
        if s != 0 {
            *d = (*d + g * s) % q;
        }
    }
}

const NO_PIVOT: u32 = u32::MAX;

/// Streaming eliminator; see the module docs for the two-pass protocol.
#[derive(Debug, Clone)]
pub struct LocalEliminator {
    ring: PrimePower,
    dim: usize,
    pivot_of_row: Vec<u32>,
    pivot_rows: Vec<usize>,
    pivots: Vec<Vec<u64>>,
    residual: Option<Residual>,
    buf: Vec<u64>,
}

#[derive(Debug, Clone)]
struct Residual {
    free_rows: Vec<usize>,
    echelon: Vec<Option<Vec<u64>>>,
}

impl LocalEliminator {
    pub fn new(ring: PrimePower, dim: usize) -> Self {
        LocalEliminator {
            ring,
            dim,
            pivot_of_row: vec![NO_PIVOT; dim],
            pivot_rows: Vec::new(),
            pivots: Vec::new(),
            residual: None,
            buf: vec![0; dim],
        }
    }

    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    pub fn unit_rank(&self) -> usize {
        self.pivots.len()
    }

    fn scatter(&mut self, col: &[(usize, i64)]) {
        self.buf.iter_mut().for_each(|x| *x = 0);
        let q = self.ring.q;
        for &(i, v) in col {
            self.buf[i] = (self.buf[i] + self.ring.reduce(v)) % q;
        }
    }

    /// Reduces `buf` against the unit pivots; `support` lists every row
    /// that may be nonzero on a pivot row.
    fn reduce_buf(&mut self, support: impl Iterator<Item = usize>) {
        let q = self.ring.q;
        for r in support {
            let pi = self.pivot_of_row[r];
            if pi == NO_PIVOT {
                continue;
            }
            let f = self.buf[r];
            if f != 0 {
                axpy(&mut self.buf, &self.pivots[pi as usize], f, q);
            }
        }
    }

    /// First pass: adds the column to the unit-pivot span if it has a unit
    /// entry modulo the current pivots.
    pub fn absorb_unit(&mut self, col: &[(usize, i64)]) {
        debug_assert!(self.residual.is_none(), "first pass already closed");
        self.scatter(col);
        self.reduce_buf(col.iter().map(|t| t.0));
        let Some(r) = (0..self.dim).find(|&i| self.buf[i] != 0 && self.ring.is_unit(self.buf[i])) else {
            return;
        };
        let q = self.ring.q;
        let inv = self.ring.inv(self.buf[r]);
        let mut v = std::mem::take(&mut self.buf);
        v.iter_mut().for_each(|x| *x = *x * inv % q);
        for b in &mut self.pivots {
            let f = b[r];
            if f != 0 {
                axpy(b, &v, f, q);
            }
        }
        self.buf = vec![0; self.dim];
        self.pivot_of_row[r] = self.pivots.len() as u32;
        self.pivot_rows.push(r);
        self.pivots.push(v);
    }

    /// Closes the first pass.
    pub fn begin_residuals(&mut self) {
        let mut free_rows = Vec::new();
        for r in 0..self.dim {
            if self.pivot_of_row[r] == NO_PIVOT {
                free_rows.push(r);
            }
        }
        self.residual = Some(Residual {
            echelon: vec![None; free_rows.len()],
            free_rows,
        });
    }

    /// Image of a column in `(Z/p^k)^d` modulo the unit pivots.
    fn project(&mut self, col: &[(usize, i64)]) -> Vec<u64> {
        self.scatter(col);
        self.reduce_buf(col.iter().map(|t| t.0));
        let res = self.residual.as_ref().expect("second pass not started");
        res.free_rows.iter().map(|&r| self.buf[r]).collect()
    }

    /// Second pass: every column must be streamed again, in any order.
    pub fn absorb_residual(&mut self, col: &[(usize, i64)]) -> Result<()> {
        let v = self.project(col);
        if v.iter().all(|&x| x == 0) {
            return Ok(());
        }
        if v.iter().any(|&x| x != 0 && self.ring.is_unit(x)) {
            return Err(Error::Internal(
                "column was not streamed during the first pass".into(),
            ));
        }
        let ring = self.ring;
        let res = self.residual.as_mut().expect("second pass not started");
        echelon_insert(&ring, &mut res.echelon, v);
        Ok(())
    }

    /// Local Smith form of the accumulated residues.
    pub fn finish(self) -> LocalQuotient {
        let ring = self.ring;
        let res = self.residual.expect("second pass not started");
        let d = res.free_rows.len();
        let cols: Vec<Vec<u64>> = res.echelon.into_iter().flatten().collect();
        // row-major d x t
        let t = cols.len();
        let mut a = vec![vec![0u64; t]; d];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..d {
                a[i][j] = c[i];
            }
        }
        let mut perm: Vec<Vec<u64>> = (0..d)
            .map(|i| {
                let mut row = vec![0u64; d];
                row[i] = 1;
                row
            })
            .collect();
        let q = ring.q;
        let mut diag = Vec::new();
        for s in 0..t.min(d) {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(s) {
                for (j, &x) in row.iter().enumerate().skip(s) {
                    if x != 0 {
                        let key = (ring.val(x), i, j);
                        if best.is_none_or(|b| key < b) {
                            best = Some(key);
                        }
                    }
                }
            }
            let Some((j0, bi, bj)) = best else { break };
            a.swap(s, bi);
            perm.swap(s, bi);
            for row in &mut a {
                row.swap(s, bj);
            }
            // scale column s so the pivot is exactly p^j0
            let pj = ring.pow_p(j0);
            let u = ring.inv(a[s][s] / pj);
            for row in &mut a {
                row[s] = row[s] * u % q;
            }
            for i in s + 1..d {
                let x = a[i][s];
                if x != 0 {
                    let f = x / pj;
                    let (top, bottom) = a.split_at_mut(i);
                    axpy(&mut bottom[0], &top[s], f, q);
                    let (ptop, pbottom) = perm.split_at_mut(i);
                    axpy(&mut pbottom[0], &ptop[s], f, q);
                }
            }
            for j in s + 1..t {
                a[s][j] = 0;
            }
            diag.push(j0);
        }
        let free = d - diag.len();
        let mut torsion = Vec::new();
        for (s, &j) in diag.iter().enumerate() {
            if j > 0 {
                torsion.push((j, perm[s].clone()));
            }
        }
        LocalQuotient {
            ring,
            pivot_of_row: self.pivot_of_row,
            pivots: self.pivots,
            free_rows: res.free_rows,
            free_rank: free,
            length: diag.iter().map(|&j| j as u64).sum::<u64>() + free as u64 * ring.k as u64,
            torsion,
        }
    }
}

fn echelon_insert(ring: &PrimePower, echelon: &mut [Option<Vec<u64>>], mut v: Vec<u64>) {
    let q = ring.q;
    let d = v.len();
    let mut i = 0;
    loop {
        while i < d && v[i] == 0 {
            i += 1;
        }
        if i == d {
            return;
        }
        let j = ring.val(v[i]);
        let pj = ring.pow_p(j);
        match &mut echelon[i] {
            None => {
                let u = ring.inv(v[i] / pj);
                v.iter_mut().for_each(|x| *x = *x * u % q);
                echelon[i] = Some(v);
                return;
            }
            Some(b) => {
                let jb = ring.val(b[i]);
                if j >= jb {
                    let f = v[i] / ring.pow_p(jb);
                    axpy(&mut v, b, f, q);
                } else {
                    let u = ring.inv(v[i] / pj);
                    v.iter_mut().for_each(|x| *x = *x * u % q);
                    std::mem::swap(b, &mut v);
                    let f = v[i] / pj;
                    axpy(&mut v, b, f, q);
                }
            }
        }
    }
}

/// Cokernel of the streamed columns: `⊕ Z/p^{e_i}` plus `free_rank` copies
/// of `Z/p^k`, with coordinates for evaluating vectors.
#[derive(Debug, Clone)]
pub struct LocalQuotient {
    ring: PrimePower,
    pivot_of_row: Vec<u32>,
    pivots: Vec<Vec<u64>>,
    free_rows: Vec<usize>,
    free_rank: usize,
    length: u64,
    torsion: Vec<(u32, Vec<u64>)>,
}

impl LocalQuotient {
    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    /// Summands `Z/p^k` of the cokernel (rank of the integral lift's free part).
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// `log_p` of the cokernel's order.
    pub fn length(&self) -> u64 {
        self.length
    }

    /// Exponents `e_i` with `0 < e_i < k`, ascending.
    pub fn torsion_exponents(&self) -> Vec<u32> {
        self.torsion.iter().map(|t| t.0).collect()
    }

    /// Coordinates of a vector in the torsion summands (`i`-th reduced mod
    /// `p^{e_i}`).
    pub fn evaluate(&self, col: &[(usize, i64)]) -> Vec<u64> {
        let q = self.ring.q;
        let mut buf = vec![0u64; self.pivot_of_row.len()];
        for &(i, v) in col {
            buf[i] = (buf[i] + self.ring.reduce(v)) % q;
        }
        for &(r, _) in col {
            let pi = self.pivot_of_row[r];
            if pi != NO_PIVOT && buf[r] != 0 {
                let f = buf[r];
                axpy(&mut buf, &self.pivots[pi as usize], f, q);
            }
        }
        let v: Vec<u64> = self.free_rows.iter().map(|&r| buf[r]).collect();
        self.torsion
            .iter()
            .map(|(e, row)| {
                let dot = row
                    .iter()
                    .zip(&v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * b % q) % q);
                dot % self.ring.pow_p(*e)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(ring: PrimePower, dim: usize, cols: &[Vec<(usize, i64)>]) -> LocalQuotient {
        let mut e = LocalEliminator::new(ring, dim);
        for c in cols {
            e.absorb_unit(c);
        }
        e.begin_residuals();
        for c in cols {
            e.absorb_residual(c).unwrap();
        }
        e.finish()
    }

    #[test]
    fn inverse_mod_prime_power() {
        let r = PrimePower::new(3, 4).unwrap();
        for x in (1..81).filter(|x| x % 3 != 0) {
            assert_eq!(x * r.inv(x) % 81, 1);
        }
        assert!(PrimePower::new(2, 40).is_err());
    }

    #[test]
    fn diagonal_cokernel() {
        // Z^3 / <2 e0, 4 e1> localized at 2 with k = 6
        let ring = PrimePower::new(2, 6).unwrap();
        let lq = run(ring, 3, &[vec![(0, 2)], vec![(1, 4)], vec![(0, 6), (1, 4)]]);
        assert_eq!(lq.torsion_exponents(), vec![1, 2]);
        assert_eq!(lq.free_rank(), 1);
        assert_eq!(lq.length(), 1 + 2 + 6);
        assert_eq!(lq.evaluate(&[(0, 2)]), vec![0, 0]);
        assert_ne!(lq.evaluate(&[(1, 1)]), vec![0, 0]);
    }

    #[test]
    fn unit_pivots_eliminate() {
        // rows 0,1 tied together by a unit column; 3·(e0) kills the rest mod 3
        let ring = PrimePower::new(3, 2).unwrap();
        let lq = run(ring, 2, &[vec![(0, 1), (1, -1)], vec![(1, 3)]]);
        assert_eq!(lq.torsion_exponents(), vec![1]);
        assert_eq!(lq.free_rank(), 0);
        assert_eq!(lq.evaluate(&[(0, 1)]), lq.evaluate(&[(1, 1)]));
        assert_eq!(lq.evaluate(&[(0, 3)]), vec![0]);
    }

    #[test]
    fn swap_in_echelon() {
        let ring = PrimePower::new(2, 5).unwrap();
        let lq = run(ring, 2, &[vec![(0, 8), (1, 2)], vec![(0, 4)], vec![(1, 4)]]);
        // lattice spanned by (8,2),(4,0),(0,4): index 2*4 = 8 → Z/2 + Z/4
        assert_eq!(lq.torsion_exponents(), vec![1, 2]);
    }
}
