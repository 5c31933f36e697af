//! Basis inverse in product form over an identity (all-logical) start basis.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Dense scratch vector that remembers which entries it touched.
#[derive(Debug, Clone)]
pub(crate) struct Work {
    pub val: Vec<f64>,
    pub idx: Vec<usize>,
    mark: Vec<bool>,
}

impl Work {
    pub fn new(len: usize) -> Self {
        Work {
            val: vec![0.0; len],
            idx: Vec::new(),
            mark: vec![false; len],
        }
    }

    pub fn clear(&mut self) {
        for &i in &self.idx {
            self.val[i] = 0.0;
            self.mark[i] = false;
        }
        self.idx.clear();
    }

    #[inline]
    pub fn add(&mut self, i: usize, x: f64) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.idx.push(i);
        }
        self.val[i] += x;
    }

    #[inline]
    pub fn set(&mut self, i: usize, x: f64) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.idx.push(i);
        }
        self.val[i] = x;
    }

    /// Zeroes tiny entries and forgets them.
    pub fn drop_small(&mut self, tol: f64) {
        let Work { val, idx, mark } = self;
        idx.retain(|&i| {
            if val[i].abs() <= tol {
                val[i] = 0.0;
                mark[i] = false;
                false
            } else {
                true
            }
        });
    }
}

const NONE: usize = usize::MAX;

/// Product-form inverse. The etas of a fresh factorization pivot on
/// distinct rows, so solves with them only visit etas that can change the
/// vector; etas appended by later basis changes are applied in full.
#[derive(Debug, Clone, Default)]
pub(crate) struct Factor {
    rows: Vec<usize>,
    pivots: Vec<f64>,
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
    /// Etas below this index come from the last fresh factorization.
    base: usize,
    sealed: bool,
    /// Base eta pivoting on each row.
    eta_of_row: Vec<usize>,
    /// Base etas whose off-pivot pattern contains each row.
    by_row_start: Vec<usize>,
    by_row: Vec<usize>,
    stamp: Vec<u32>,
    generation: u32,
    heap: BinaryHeap<Reverse<usize>>,
    heap_max: BinaryHeap<usize>,
}

impl Factor {
    pub fn new(m: usize) -> Self {
        Factor {
            start: vec![0],
            sealed: true,
            eta_of_row: vec![NONE; m],
            by_row_start: vec![0; m + 1],
            ..Default::default()
        }
    }

    /// Starts a fresh factorization.
    pub fn clear(&mut self) {
        self.eta_of_row.iter_mut().for_each(|r| *r = NONE);
        self.rows.clear();
        self.pivots.clear();
        self.start.clear();
        self.start.push(0);
        self.idx.clear();
        self.val.clear();
        self.base = 0;
        self.sealed = false;
        self.by_row.clear();
        self.by_row_start.iter_mut().for_each(|s| *s = 0);
    }

    /// Ends the fresh factorization; later etas are basis updates.
    pub fn seal(&mut self) {
        self.base = self.rows.len();
        self.sealed = true;
        let m = self.eta_of_row.len();
        let counts = &mut self.by_row_start;
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in &self.idx {
            counts[i + 1] += 1;
        }
        for i in 0..m {
            counts[i + 1] += counts[i];
        }
        self.by_row.resize(self.idx.len(), 0);
        let mut fill = counts[..m].to_vec();
        for k in 0..self.base {
            for t in self.start[k]..self.start[k + 1] {
                let i = self.idx[t];
                self.by_row[fill[i]] = k;
                fill[i] += 1;
            }
        }
        self.stamp = vec![0; self.base];
        self.generation = 0;
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    /// Records the basis change that pivots `column` (already transformed by
    /// the current inverse) into position `row`.
    pub fn push(&mut self, row: usize, column: &Work) {
        let pivot = column.val[row];
        debug_assert!(pivot != 0.0);
        for &i in &column.idx {
            let a = column.val[i];
            if i != row && a != 0.0 {
                self.idx.push(i);
                self.val.push(a);
            }
        }
        if !self.sealed {
            debug_assert_eq!(self.eta_of_row[row], NONE);
            self.eta_of_row[row] = self.rows.len();
        }
        self.rows.push(row);
        self.pivots.push(pivot);
        self.start.push(self.idx.len());
    }

    fn next_generation(&mut self) -> u32 {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        if self.stamp.len() < self.base_len() {
            self.stamp.resize(self.base_len(), 0);
        }
        self.generation
    }

    fn base_len(&self) -> usize {
        if self.sealed {
            self.base
        } else {
            self.rows.len()
        }
    }

    fn apply_eta(&self, k: usize, v: &mut Work) -> bool {
        let r = self.rows[k];
        let xr = v.val[r];
        if xr == 0.0 {
            return false;
        }
        let xr = xr / self.pivots[k];
        v.val[r] = xr;
        for t in self.start[k]..self.start[k + 1] {
            v.add(self.idx[t], -self.val[t] * xr);
        }
        true
    }

    /// `v <- B^-1 v`
    pub fn ftran(&mut self, v: &mut Work) {
        let base = self.base_len();
        let gen = self.next_generation();
        let mut heap = std::mem::take(&mut self.heap);
        heap.clear();
        for &i in &v.idx {
            let k = self.eta_of_row[i];
            if k < base && self.stamp[k] != gen {
                self.stamp[k] = gen;
                heap.push(Reverse(k));
            }
        }
        while let Some(Reverse(k)) = heap.pop() {
            if !self.apply_eta(k, v) {
                continue;
            }
            for t in self.start[k]..self.start[k + 1] {
                let i = self.idx[t];
                let k2 = self.eta_of_row[i];
                if k2 != NONE && k2 > k && k2 < base && self.stamp[k2] != gen {
                    self.stamp[k2] = gen;
                    heap.push(Reverse(k2));
                }
            }
        }
        self.heap = heap;
        for k in base..self.rows.len() {
            self.apply_eta(k, v);
        }
    }

    /// `v <- B^-T v`
    pub fn btran(&mut self, v: &mut Work) {
        debug_assert!(self.sealed);
        for k in (self.base..self.rows.len()).rev() {
            self.btran_eta(k, v);
        }
        let base = self.base_len();
        let gen = self.next_generation();
        let mut heap = std::mem::take(&mut self.heap_max);
        heap.clear();
        let trigger = |this: &mut Self, heap: &mut BinaryHeap<usize>, i: usize, below: usize| {
            let k = this.eta_of_row[i];
            if k < below && this.stamp[k] != gen {
                this.stamp[k] = gen;
                heap.push(k);
            }
            for t in this.by_row_start[i]..this.by_row_start[i + 1] {
                let k = this.by_row[t];
                if k < below && this.stamp[k] != gen {
                    this.stamp[k] = gen;
                    heap.push(k);
                }
            }
        };
        for t in 0..v.idx.len() {
            let i = v.idx[t];
            if v.val[i] != 0.0 {
                trigger(self, &mut heap, i, base);
            }
        }
        while let Some(k) = heap.pop() {
            let r = self.rows[k];
            let was_zero = v.val[r] == 0.0;
            self.btran_eta(k, v);
            if was_zero && v.val[r] != 0.0 {
                trigger(self, &mut heap, r, k);
            }
        }
        self.heap_max = heap;
    }

    fn btran_eta(&self, k: usize, v: &mut Work) {
        let r = self.rows[k];
        let mut s = v.val[r];
        for t in self.start[k]..self.start[k + 1] {
            s -= self.val[t] * v.val[self.idx[t]];
        }
        if s != 0.0 || v.val[r] != 0.0 {
            v.set(r, s / self.pivots[k]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ftran_and_btran_invert_a_two_step_basis() {
        // B = [[2, 1], [0, 4]] built by pivoting col (2,0) into row 0,
        // then col (1,4) into row 1.
        let mut f = Factor::new(2);
        let mut c = Work::new(2);
        c.set(0, 2.0);
        f.ftran(&mut c);
        f.push(0, &c);
        let mut c = Work::new(2);
        c.set(0, 1.0);
        c.set(1, 4.0);
        f.ftran(&mut c);
        f.push(1, &c);

        let mut v = Work::new(2);
        v.set(0, 3.0);
        v.set(1, 8.0);
        f.ftran(&mut v);
        // B x = (3, 8): x1 = 2, x0 = (3 - 2)/2 = 0.5
        assert!((v.val[0] - 0.5).abs() < 1e-12);
        assert!((v.val[1] - 2.0).abs() < 1e-12);

        let mut w = Work::new(2);
        w.set(0, 2.0);
        w.set(1, 5.0);
        f.btran(&mut w);
        // B^T y = (2, 5): y0 = 1, y1 = (5 - 1)/4 = 1
        assert!((w.val[0] - 1.0).abs() < 1e-12);
        assert!((w.val[1] - 1.0).abs() < 1e-12);
    }

    /// Columns of a sparse random basis: pivot `k` sits in row `k`, with a
    /// few off-diagonal entries in both triangles.
    fn random_basis(m: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        (0..m)
            .map(|k| {
                let mut c = vec![0.0; m];
                c[k] = 2.0 + next();
                for _ in 0..2 {
                    let i = (next() * m as f64) as usize % m;
                    if i != k {
                        c[i] = next() - 0.5;
                    }
                }
                c
            })
            .collect()
    }

    fn work_from(v: &[f64]) -> Work {
        let mut w = Work::new(v.len());
        for (i, &x) in v.iter().enumerate() {
            if x != 0.0 {
                w.set(i, x);
            }
        }
        w
    }

    #[test]
    fn sparse_solves_agree_with_the_basis_after_updates() {
        let m = 12;
        for seed in 0..20 {
            let mut cols = random_basis(m, seed);
            let mut f = Factor::new(m);
            f.clear();
            for (k, c) in cols.iter().enumerate() {
                let mut w = work_from(c);
                f.ftran(&mut w);
                f.push(k, &w);
            }
            f.seal();
            // Two basis changes appended as update etas.
            for (row, extra) in [(3, 7.0), (8, -5.0)] {
                let mut c = vec![0.0; m];
                c[row] = extra;
                c[(row + 1) % m] = 1.0;
                let mut w = work_from(&c);
                f.ftran(&mut w);
                f.push(row, &w);
                cols[row] = c;
            }
            for t in 0..m {
                // B x = e_t: sum over positions k of cols[k] * x[k].
                let mut x = Work::new(m);
                x.set(t, 1.0);
                f.ftran(&mut x);
                for i in 0..m {
                    let bx: f64 = (0..m).map(|k| cols[k][i] * x.val[k]).sum();
                    let want = if i == t { 1.0 } else { 0.0 };
                    assert!((bx - want).abs() < 1e-9, "seed {seed} ftran e_{t} row {i}");
                }
                // B^T y = e_t: column k dotted with y is 1 at k = t.
                let mut y = Work::new(m);
                y.set(t, 1.0);
                f.btran(&mut y);
                for (k, c) in cols.iter().enumerate() {
                    let cy: f64 = (0..m).map(|i| c[i] * y.val[i]).sum();
                    let want = if k == t { 1.0 } else { 0.0 };
                    assert!((cy - want).abs() < 1e-9, "seed {seed} btran e_{t} col {k}");
                }
            }
        }
    }
}
