//! Dense square matrices over a [`Ring`].

use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::rings::{Elem, Ring, RingKind};

/// An `n × n` matrix over a ring, stored row-major. Column `j` holds the
/// image of the `j`-th basis vector.
#[derive(Clone, PartialEq, Eq)]
pub struct RingMatrix {
    ring: Ring,
    n: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RingMatrix over {} ({}×{})", self.ring, self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.ring.format(self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RingMatrix {
    pub fn zero(ring: &Ring, n: usize) -> RingMatrix {
        RingMatrix { ring: ring.clone(), n, data: vec![ring.zero(); n * n] }
    }

    pub fn identity(ring: &Ring, n: usize) -> RingMatrix {
        let mut m = RingMatrix::zero(ring, n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn from_fn(ring: &Ring, n: usize, mut f: impl FnMut(usize, usize) -> Elem) -> RingMatrix {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        RingMatrix { ring: ring.clone(), n, data }
    }

    /// Builds a matrix from integer entries mapped through `Z → R`.
    pub fn from_i64_rows(ring: &Ring, rows: &[Vec<i64>]) -> RingMatrix {
        let n = rows.len();
        RingMatrix::from_fn(ring, n, |i, j| ring.from_i64(rows[i][j]))
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(ring: &Ring, diag: &[Elem]) -> RingMatrix {
        let n = diag.len();
        let mut m = RingMatrix::zero(ring, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = d.clone();
        }
        m
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn check_same(&self, other: &RingMatrix) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        assert_eq!(self.ring, other.ring, "ring mismatch");
    }

    pub fn add(&self, other: &RingMatrix) -> RingMatrix {
        self.check_same(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.add(a, b)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    pub fn sub(&self, other: &RingMatrix) -> RingMatrix {
        self.check_same(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.sub(a, b)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    pub fn scale(&self, c: &Elem) -> RingMatrix {
        let data = self.data.iter().map(|a| self.ring.mul(c, a)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    /// Matrix product; zero entries of the left factor are skipped.
    pub fn mul(&self, other: &RingMatrix) -> RingMatrix {
        self.check_same(other);
        let (n, r) = (self.n, &self.ring);
        let zero = r.zero();
        let mut data = vec![zero.clone(); n * n];
        let rhs_rows: Vec<Vec<(usize, &Elem)>> = (0..n)
            .map(|k| other.row(k).iter().enumerate().filter(|(_, b)| **b != zero).collect())
            .collect();
        for i in 0..n {
            let out = &mut data[i * n..(i + 1) * n];
            for (k, a) in self.row(i).iter().enumerate() {
                if *a == zero {
                    continue;
                }
                for &(j, b) in &rhs_rows[k] {
                    out[j] = r.add(&out[j], &r.mul(a, b));
                }
            }
        }
        RingMatrix { ring: r.clone(), n, data }
    }

    /// Product of a sequence of matrices (identity for an empty sequence).
    pub fn product<'a>(ring: &Ring, n: usize, factors: impl IntoIterator<Item = &'a RingMatrix>) -> RingMatrix {
        factors.into_iter().fold(RingMatrix::identity(ring, n), |acc, m| acc.mul(m))
    }

    pub fn pow(&self, mut e: u64) -> RingMatrix {
        let mut base = self.clone();
        let mut acc = RingMatrix::identity(&self.ring, self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> RingMatrix {
        RingMatrix::from_fn(&self.ring, self.n, |i, j| self.get(j, i).clone())
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| {
            let e = self.get(i, j);
            if i == j { self.ring.is_one(e) } else { self.ring.is_zero(e) }
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.ring.is_zero(e))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.ring.is_zero(self.get(i, j))))
    }

    /// Positions of nonzero entries.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.n * self.n)
            .filter(|&k| !self.ring.is_zero(&self.data[k]))
            .map(|k| (k / self.n, k % self.n))
            .collect()
    }

    /// `self · other − other · self`.
    pub fn commutator_bracket(&self, other: &RingMatrix) -> RingMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn commutes_with(&self, other: &RingMatrix) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// The submatrix on the given index list (in that order).
    pub fn restrict(&self, idx: &[usize]) -> RingMatrix {
        RingMatrix::from_fn(&self.ring, idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// Whether the span of the basis vectors in `idx` is invariant.
    pub fn preserves(&self, idx: &[usize]) -> bool {
        let inside: std::collections::HashSet<usize> = idx.iter().copied().collect();
        idx.iter().all(|&j| (0..self.n).all(|i| inside.contains(&i) || self.ring.is_zero(self.get(i, j))))
    }

    /// Applies a ring map entrywise.
    pub fn map(&self, target: &Ring, f: impl Fn(&Elem) -> Elem) -> RingMatrix {
        RingMatrix { ring: target.clone(), n: self.n, data: self.data.iter().map(f).collect() }
    }

    /// Reduces an integer matrix into any ring.
    pub fn reduce_integers(&self, target: &Ring) -> RingMatrix {
        self.map(target, |e| match e {
            Elem::Int(v) => target.from_bigint(v),
            other => panic!("expected an integer entry, found {other:?}"),
        })
    }

    /// Entrywise image in the residue field.
    pub fn residue(&self) -> Result<RingMatrix> {
        let k = self.ring.residue_field()?;
        let data = self.data.iter().map(|e| self.ring.residue_map(e)).collect::<Result<_>>()?;
        Ok(RingMatrix { ring: k, n: self.n, data })
    }

    /// Encodes the entries of a matrix over a finite field.
    pub fn encode(&self, field: &FiniteField) -> Vec<Vec<Fe>> {
        (0..self.n).map(|i| self.row(i).iter().map(|e| field.encode(e)).collect()).collect()
    }

    /// Builds a matrix over a finite field from encoded rows.
    pub fn decode(field: &FiniteField, rows: &[Vec<Fe>]) -> RingMatrix {
        let n = rows.len();
        RingMatrix::from_fn(field.ring(), n, |i, j| field.to_elem(rows[i][j]))
    }

    /// Inverse over a local ring (unit pivots) or over `Z` (Euclidean pivots).
    pub fn inverse(&self) -> Result<RingMatrix> {
        let (n, r) = (self.n, &self.ring);
        let singular = || Error::Singular(r.spec());
        let mut a: Vec<Vec<Elem>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut b: Vec<Vec<Elem>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { r.one() } else { r.zero() }).collect())
            .collect();
        let euclidean = matches!(r.kind(), RingKind::Integers);
        for c in 0..n {
            if euclidean {
                euclid_column(r, &mut a, &mut b, c);
            }
            let p = (c..n).find(|&i| r.is_unit(&a[i][c])).ok_or_else(singular)?;
            a.swap(c, p);
            b.swap(c, p);
            let inv = r.invert(&a[c][c])?;
            for x in a[c].iter_mut().chain(b[c].iter_mut()) {
                *x = r.mul(&inv, x);
            }
            for i in 0..n {
                if i != c && !r.is_zero(&a[i][c]) {
                    let f = a[i][c].clone();
                    for j in 0..n {
                        let t = r.mul(&f, &a[c][j]);
                        a[i][j] = r.sub(&a[i][j], &t);
                        let t = r.mul(&f, &b[c][j]);
                        b[i][j] = r.sub(&b[i][j], &t);
                    }
                }
            }
        }
        Ok(RingMatrix { ring: r.clone(), n, data: b.into_iter().flatten().collect() })
    }

    /// Determinant. Uses elimination with unit pivots when possible and falls
    /// back to the division-free Berkowitz algorithm otherwise.
    pub fn det(&self) -> Elem {
        self.det_by_unit_pivots().unwrap_or_else(|| self.det_berkowitz())
    }

    fn det_by_unit_pivots(&self) -> Option<Elem> {
        let (n, r) = (self.n, &self.ring);
        let mut a: Vec<Vec<Elem>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = r.one();
        for c in 0..n {
            let p = match (c..n).find(|&i| r.is_unit(&a[i][c])) {
                Some(p) => p,
                None => {
                    // A lone non-unit entry needs no division.
                    let nz: Vec<usize> = (c..n).filter(|&i| !r.is_zero(&a[i][c])).collect();
                    match nz.as_slice() {
                        [] => return Some(r.zero()),
                        [p] => *p,
                        _ => return None,
                    }
                }
            };
            if p != c {
                a.swap(c, p);
                det = r.neg(&det);
            }
            det = r.mul(&det, &a[c][c]);
            if !r.is_unit(&a[c][c]) {
                continue;
            }
            let inv = r.invert(&a[c][c]).ok()?;
            for i in c + 1..n {
                if !r.is_zero(&a[i][c]) {
                    let f = r.mul(&a[i][c], &inv);
                    for j in c..n {
                        let t = r.mul(&f, &a[c][j]);
                        a[i][j] = r.sub(&a[i][j], &t);
                    }
                }
            }
        }
        Some(det)
    }

    fn det_berkowitz(&self) -> Elem {
        let (n, r) = (self.n, &self.ring);
        if n == 0 {
            return r.one();
        }
        // Characteristic polynomial coefficients via Berkowitz; det = (−1)^n c_n.
        let mut poly = vec![r.one(), r.neg(self.get(0, 0))];
        for k in 1..n {
            // Leading principal submatrix of size k+1: A = [[M, C], [R, a]].
            let a_kk = self.get(k, k).clone();
            let row: Vec<Elem> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let col: Vec<Elem> = (0..k).map(|i| self.get(i, k).clone()).collect();
            // Toeplitz column: 1, −a, −R C, −R M C, −R M² C, …
            let mut t = vec![r.one(), r.neg(&a_kk)];
            let mut v = col.clone();
            for _ in 0..k {
                let rc = row.iter().zip(&v).fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)));
                t.push(r.neg(&rc));
                v = (0..k)
                    .map(|i| (0..k).fold(r.zero(), |acc, j| r.add(&acc, &r.mul(self.get(i, j), &v[j]))))
                    .collect();
            }
            let mut next = vec![r.zero(); k + 2];
            for (i, ti) in t.iter().enumerate().take(k + 2) {
                for (j, pj) in poly.iter().enumerate() {
                    if i + j < k + 2 {
                        next[i + j] = r.add(&next[i + j], &r.mul(ti, pj));
                    }
                }
            }
            poly = next;
        }
        let c = poly[n].clone();
        if n % 2 == 0 { c } else { r.neg(&c) }
    }

    /// JSON form `{"ring": spec, "n": n, "entries": [[…]…]}`.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Vec<Value>> =
            (0..self.n).map(|i| self.row(i).iter().map(|e| self.ring.to_json(e)).collect()).collect();
        json!({"ring": self.ring.spec(), "n": self.n, "entries": entries})
    }

    /// Parses the JSON form produced by [`RingMatrix::to_json`].
    pub fn from_json(v: &Value) -> Result<RingMatrix> {
        let bad = |m: &str| Error::Fixture(format!("matrix JSON: {m}"));
        let ring = Ring::parse(v.get("ring").and_then(Value::as_str).ok_or_else(|| bad("missing ring"))?)?;
        let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))?;
        let n = rows.len();
        if let Some(declared) = v.get("n").and_then(Value::as_u64) {
            if declared as usize != n {
                return Err(bad("n does not match entries"));
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_array().ok_or_else(|| bad("row is not an array"))?;
            if row.len() != n {
                return Err(bad("matrix is not square"));
            }
            for e in row {
                data.push(ring.from_json(e)?);
            }
        }
        Ok(RingMatrix { ring, n, data })
    }
}

/// Reduces column `c` (rows `c..`) of an integer matrix to a single nonzero
/// entry by Euclidean row operations, mirrored on `b`.
fn euclid_column(r: &Ring, a: &mut [Vec<Elem>], b: &mut [Vec<Elem>], c: usize) {
    let n = a.len();
    let abs = |e: &Elem| match e {
        Elem::Int(v) => v.magnitude().clone(),
        _ => unreachable!(),
    };
    loop {
        let nz: Vec<usize> = (c..n).filter(|&i| !r.is_zero(&a[i][c])).collect();
        if nz.len() <= 1 {
            return;
        }
        let p = *nz.iter().min_by_key(|&&i| abs(&a[i][c])).expect("nonempty");
        for &i in &nz {
            if i == p {
                continue;
            }
            let (Elem::Int(x), Elem::Int(y)) = (&a[i][c], &a[p][c]) else { unreachable!() };
            let q = Elem::Int(num_integer::Integer::div_floor(x, y));
            for j in 0..n {
                let t = r.mul(&q, &a[p][j]);
                a[i][j] = r.sub(&a[i][j], &t);
                let t = r.mul(&q, &b[p][j]);
                b[i][j] = r.sub(&b[i][j], &t);
            }
        }
    }
}

/// Integer entry helper for building integer matrices.
pub fn int(v: i64) -> Elem {
    Elem::Int(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    #[test]
    fn inverse_over_local_and_integers() {
        let z4 = ring("Z/4");
        let m = RingMatrix::from_i64_rows(&z4, &[vec![1, 2], vec![3, 3]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let z = ring("Z");
        let u = RingMatrix::from_i64_rows(&z, &[vec![2, 3], vec![3, 5]]);
        assert!(u.mul(&u.inverse().unwrap()).is_identity());
        let s = RingMatrix::from_i64_rows(&z4, &[vec![2, 0], vec![0, 1]]);
        assert!(s.inverse().is_err());
    }

    #[test]
    fn determinants_agree() {
        let z8 = ring("Z/8");
        let m = RingMatrix::from_i64_rows(&z8, &[vec![1, 1, 0], vec![4, 3, 6], vec![1, 3, 2]]);
        assert_eq!(m.det_berkowitz(), m.det_by_unit_pivots().unwrap());
        assert_eq!(m.det(), Elem::Mod(2));
        let m = RingMatrix::from_i64_rows(&z8, &[vec![2, 1, 0], vec![4, 2, 6], vec![1, 3, 2]]);
        assert_eq!(m.det(), Elem::Mod(2));
        let d = RingMatrix::from_i64_rows(&z8, &[vec![2, 0], vec![0, 2]]);
        assert_eq!(d.det(), Elem::Mod(4));
        let z = ring("Z");
        let m = RingMatrix::from_i64_rows(&z, &[vec![2, 1, 5], vec![4, 2, 6], vec![1, 3, 2]]);
        assert_eq!(m.det_berkowitz(), int(20));
    }

    #[test]
    fn json_round_trip() {
        let w = ring("omega(Z/4)");
        let xi = w.xi().unwrap();
        let m = RingMatrix::diagonal(&w, &[w.one(), xi.clone(), w.mul(&xi, &xi)]);
        assert_eq!(RingMatrix::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn restriction_and_invariance() {
        let z = ring("Z");
        let m = RingMatrix::from_i64_rows(&z, &[vec![1, 2, 0], vec![0, 1, 0], vec![5, 0, 1]]);
        assert!(m.preserves(&[0, 1, 2]));
        assert!(!m.preserves(&[0, 1]));
        assert!(m.preserves(&[2]) && m.preserves(&[1, 0, 2]));
        assert_eq!(m.restrict(&[1, 0]), RingMatrix::from_i64_rows(&z, &[vec![1, 0], vec![2, 1]]));
    }
}
