//! Exact linear algebra: Gaussian elimination over small finite fields and
//! kernels of linear maps over the chain rings `Z/p^k`.

use crate::field::{Fe, FiniteField};

/// Incrementally maintained reduced row-echelon basis of a row space.
///
/// Rows are inserted one at a time; each insertion reduces the new row
/// against the stored pivots and, if it survives, back-substitutes so the
/// basis stays fully reduced. The result depends only on the insertion order.
#[derive(Clone, Debug)]
pub struct Echelon<'f> {
    field: &'f FiniteField,
    ncols: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
    pivot_of_col: Vec<Option<usize>>,
}

impl<'f> Echelon<'f> {
    pub fn new(field: &'f FiniteField, ncols: usize) -> Echelon<'f> {
        Echelon { field, ncols, rows: Vec::new(), pivots: Vec::new(), pivot_of_col: vec![None; ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    /// Pivot columns in insertion order.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn axpy(&self, dst: &mut [Fe], c: Fe, src: &[Fe]) {
        let f = self.field;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = f.sub(*d, f.mul(c, s));
            }
        }
    }

    /// Reduces `row` against the stored pivots in place.
    pub fn reduce(&self, row: &mut [Fe]) {
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = row[p];
            if c != 0 {
                self.axpy(row, c, r);
            }
        }
    }

    /// Whether `row` lies in the row space.
    pub fn contains(&self, row: &[Fe]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(|&x| x == 0)
    }

    /// Inserts a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, mut row: Vec<Fe>) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        self.reduce(&mut row);
        let Some(p) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let s = f.inv(row[p]);
        for x in row.iter_mut() {
            *x = f.mul(*x, s);
        }
        for i in 0..self.rows.len() {
            let c = self.rows[i][p];
            if c != 0 {
                let mut r = std::mem::take(&mut self.rows[i]);
                self.axpy(&mut r, c, &row);
                self.rows[i] = r;
            }
        }
        self.pivot_of_col[p] = Some(self.rows.len());
        self.pivots.push(p);
        self.rows.push(row);
        true
    }

    /// Basis of `{x : R x = 0}` where `R` is the inserted row space, one
    /// vector per free column in increasing column order.
    pub fn nullspace(&self) -> Vec<Vec<Fe>> {
        let f = self.field;
        (0..self.ncols)
            .filter(|&c| self.pivot_of_col[c].is_none())
            .map(|free| {
                let mut v = vec![0; self.ncols];
                v[free] = 1;
                for (r, &p) in self.rows.iter().zip(&self.pivots) {
                    if r[free] != 0 {
                        v[p] = f.neg(r[free]);
                    }
                }
                v
            })
            .collect()
    }
}

/// A linear equation system over a finite field, stored as augmented rows
/// `[a_1 … a_N | c]` meaning `Σ a_i z_i + c = 0`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub nvars: usize,
    pub rows: Vec<(Vec<Fe>, Fe)>,
}

/// Solution set of a [`LinearSystem`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// One particular solution, or `None` if the system is inconsistent.
    pub particular: Option<Vec<Fe>>,
    /// Basis of the homogeneous solution space.
    pub basis: Vec<Vec<Fe>>,
}

impl Solution {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl LinearSystem {
    pub fn new(nvars: usize) -> LinearSystem {
        LinearSystem { nvars, rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<Fe>, constant: Fe) {
        assert_eq!(coeffs.len(), self.nvars);
        self.rows.push((coeffs, constant));
    }

    /// Gaussian elimination with pivots taken from the lowest equation and
    /// the lowest unknown id.
    pub fn solve(&self, field: &FiniteField) -> Solution {
        let mut hom = Echelon::new(field, self.nvars);
        let mut aug = Echelon::new(field, self.nvars + 1);
        for (coeffs, c) in &self.rows {
            hom.insert(coeffs.clone());
            let mut row = coeffs.clone();
            row.push(*c);
            aug.insert(row);
        }
        let basis = hom.nullspace();
        let particular = if aug.rank() > hom.rank() {
            None
        } else {
            // Σ a z = −c: read z off the reduced augmented rows with free vars 0.
            let mut z = vec![0; self.nvars];
            for (r, &p) in aug.rows().iter().zip(aug.pivots()) {
                z[p] = field.neg(r[self.nvars]);
            }
            Some(z)
        };
        Solution { particular, basis }
    }
}

/// Rank of a list of row vectors.
pub fn rank(field: &FiniteField, rows: &[Vec<Fe>], ncols: usize) -> usize {
    let mut e = Echelon::new(field, ncols);
    for r in rows {
        e.insert(r.clone());
    }
    e.rank()
}

/// Whether every vector of `sub` lies in the span of `space`.
pub fn span_contains(field: &FiniteField, space: &[Vec<Fe>], sub: &[Vec<Fe>], ncols: usize) -> bool {
    let mut e = Echelon::new(field, ncols);
    for r in space {
        e.insert(r.clone());
    }
    sub.iter().all(|v| e.contains(v))
}

/// Kernel of an integer matrix viewed over `Z/p^k`, as generators with
/// additive orders. Every kernel element is uniquely `Σ c_i g_i` with
/// `0 ≤ c_i < order_i`.
#[derive(Clone, Debug)]
pub struct ChainKernel {
    pub modulus: u64,
    pub generators: Vec<(Vec<u64>, u64)>,
}

impl ChainKernel {
    /// Number of kernel elements.
    pub fn size(&self) -> u128 {
        self.generators.iter().map(|(_, o)| *o as u128).product()
    }

    /// Expands the coefficient tuple `coeffs` into a kernel element.
    pub fn combine(&self, coeffs: &[u64]) -> Vec<u64> {
        let n = self.generators.first().map_or(0, |(g, _)| g.len());
        let mut v = vec![0u64; n];
        for ((g, _), &c) in self.generators.iter().zip(coeffs) {
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(g) {
                    *x = (*x + c * y) % self.modulus;
                }
            }
        }
        v
    }
}

/// Computes `{x ∈ (Z/p^k)^N : A x = 0}` by Smith reduction with unit-scaled
/// pivots of minimal `p`-adic valuation. `rows` hold residues in `0..p^k`.
pub fn chain_kernel(rows: &[Vec<u64>], ncols: usize, p: u64, k: u32) -> ChainKernel {
    let m = p.pow(k);
    let val = |x: u64| -> u32 {
        if x == 0 {
            return k;
        }
        let (mut v, mut y) = (0, x);
        while y % p == 0 {
            y /= p;
            v += 1;
        }
        v
    };
    let inv_unit = |x: u64| -> u64 { (1..m).find(|&y| x * y % m == 1).expect("unit") };
    let sub_mul = |a: u64, c: u64, b: u64| -> u64 { (a + m - (c * b) % m) % m };

    // Row reduction first: it preserves the kernel and shrinks the system to
    // at most `ncols` rows.
    let mut a: Vec<Vec<u64>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut t = 0;
    for c in 0..ncols {
        if t == a.len() {
            break;
        }
        let best = (t..a.len()).filter(|&i| a[i][c] != 0).min_by_key(|&i| (val(a[i][c]), i));
        let Some(b) = best else { continue };
        a.swap(t, b);
        let e = val(a[t][c]);
        let u = inv_unit(a[t][c] / p.pow(e));
        for x in a[t].iter_mut() {
            *x = *x * u % m;
        }
        for i in t + 1..a.len() {
            if a[i][c] != 0 {
                let q = a[i][c] / p.pow(e);
                let (head, tail) = a.split_at_mut(i);
                for (x, &y) in tail[0].iter_mut().zip(&head[t]) {
                    *x = sub_mul(*x, q, y);
                }
            }
        }
        t += 1;
    }
    a.truncate(t);

    // Full Smith reduction of the small matrix, tracking column operations.
    let nr = a.len();
    let mut v: Vec<Vec<u64>> = (0..ncols).map(|i| (0..ncols).map(|j| (i == j) as u64).collect()).collect();
    let mut exps = Vec::new();
    for s in 0..nr.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in s..nr {
            for j in s..ncols {
                if a[i][j] != 0 {
                    let cand = (val(a[i][j]), i, j);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        let Some((e, bi, bj)) = best else { break };
        a.swap(s, bi);
        for r in a.iter_mut() {
            r.swap(s, bj);
        }
        for r in v.iter_mut() {
            r.swap(s, bj);
        }
        let u = inv_unit(a[s][s] / p.pow(e));
        for x in a[s].iter_mut() {
            *x = *x * u % m;
        }
        let pe = p.pow(e);
        let pivot_row = a[s].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != s && row[s] != 0 {
                let q = row[s] / pe;
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = sub_mul(*x, q, y);
                }
            }
        }
        for j in s + 1..ncols {
            if a[s][j] != 0 {
                let q = a[s][j] / pe;
                for r in a.iter_mut() {
                    let y = r[s];
                    r[j] = sub_mul(r[j], q, y);
                }
                for r in v.iter_mut() {
                    let y = r[s];
                    r[j] = sub_mul(r[j], q, y);
                }
            }
        }
        exps.push(e);
    }

    let mut generators = Vec::new();
    for j in 0..ncols {
        let col: Vec<u64> = v.iter().map(|r| r[j]).collect();
        match exps.get(j) {
            Some(&0) => {}
            Some(&e) => {
                let scale = p.pow(k - e);
                generators.push((col.iter().map(|&x| x * scale % m).collect(), p.pow(e)));
            }
            None => generators.push((col, m)),
        }
    }
    ChainKernel { modulus: m, generators }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_zero_solution() {
        let f = FiniteField::f2();
        let mut s = LinearSystem::new(2);
        s.push(vec![1, 1], 0);
        s.push(vec![0, 1], 0);
        let sol = s.solve(&f);
        assert_eq!(sol.dim(), 0);
        assert_eq!(sol.particular, Some(vec![0, 0]));
    }

    #[test]
    fn empty_system_is_free() {
        let f = FiniteField::f2();
        assert_eq!(LinearSystem::new(3).solve(&f).dim(), 3);
    }

    #[test]
    fn inconsistent_system() {
        let f = FiniteField::f2();
        let mut s = LinearSystem::new(1);
        s.push(vec![0], 1);
        assert!(s.solve(&f).particular.is_none());
    }

    #[test]
    fn nullspace_vectors_solve() {
        let f = FiniteField::f4();
        let rows = vec![vec![1, 2, 3, 0], vec![0, 1, 1, 1]];
        let mut e = Echelon::new(&f, 4);
        for r in &rows {
            e.insert(r.clone());
        }
        for v in e.nullspace() {
            for r in &rows {
                let dot = r.iter().zip(&v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                assert_eq!(dot, 0);
            }
        }
        assert_eq!(e.nullspace().len(), 2);
    }

    #[test]
    fn chain_kernel_counts_torsion() {
        // 2x = 0 over Z/4 has the two solutions {0, 2}.
        let k = chain_kernel(&[vec![2]], 1, 2, 2);
        assert_eq!(k.size(), 2);
        // x + y = 0 over Z/4: four solutions.
        let k = chain_kernel(&[vec![1, 1]], 2, 2, 2);
        assert_eq!(k.size(), 4);
        for c in 0..4 {
            let v = k.combine(&[c]);
            assert_eq!((v[0] + v[1]) % 4, 0);
        }
    }

    #[test]
    fn chain_kernel_matches_brute_force() {
        let rows = vec![vec![2, 1, 3], vec![0, 2, 2], vec![2, 3, 1]];
        let brute = (0..64u64)
            .filter(|&i| {
                let x = [i % 4, i / 4 % 4, i / 16];
                rows.iter().all(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum::<u64>() % 4 == 0)
            })
            .count();
        let k = chain_kernel(&rows, 3, 2, 2);
        assert_eq!(k.size() as usize, brute);
        let mut seen = std::collections::HashSet::new();
        let orders: Vec<u64> = k.generators.iter().map(|g| g.1).collect();
        let total: u64 = orders.iter().product();
        for idx in 0..total {
            let mut rem = idx;
            let coeffs: Vec<u64> = orders.iter().map(|&o| { let c = rem % o; rem /= o; c }).collect();
            let v = k.combine(&coeffs);
            assert!(rows.iter().all(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum::<u64>() % 4 == 0));
            seen.insert(v);
        }
        assert_eq!(seen.len(), brute);
    }
}
