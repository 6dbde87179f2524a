//! Table-driven arithmetic for the small finite fields used by elimination.
//!
//! Residue fields in this toolkit are tiny (`F_2`, `F_4`, occasionally `F_p`),
//! so every element is encoded as a `u8` index and all operations are table
//! look-ups. Index 0 is always zero and index 1 is always one.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rings::{Elem, Ring};

/// Encoded element of a [`FiniteField`].
pub type Fe = u8;

/// A finite field with precomputed operation tables.
#[derive(Clone, Debug)]
pub struct FiniteField {
    ring: Ring,
    elems: Vec<Elem>,
    index: HashMap<Elem, Fe>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
}

impl FiniteField {
    /// Builds the tables for a ring that is a finite field with at most 256 elements.
    pub fn new(ring: &Ring) -> Result<FiniteField> {
        let not_field = || Error::NotAField(ring.spec());
        if !ring.is_field() {
            return Err(not_field());
        }
        let elems = ring.elements().ok_or_else(not_field)?;
        if elems.len() > 256 {
            return Err(not_field());
        }
        assert!(ring.is_zero(&elems[0]) && ring.is_one(&elems[1]), "canonical element order");
        let index: HashMap<Elem, Fe> =
            elems.iter().enumerate().map(|(i, e)| (e.clone(), i as Fe)).collect();
        let q = elems.len();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for (i, a) in elems.iter().enumerate() {
            neg[i] = index[&ring.neg(a)];
            if i != 0 {
                inv[i] = index[&ring.invert(a).expect("nonzero field element is a unit")];
            }
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = index[&ring.add(a, b)];
                mul[i * q + j] = index[&ring.mul(a, b)];
            }
        }
        Ok(FiniteField { ring: ring.clone(), elems, index, add, mul, neg, inv })
    }

    /// The field with two elements.
    pub fn f2() -> FiniteField {
        FiniteField::new(&Ring::int_mod(2).expect("Z/2")).expect("F_2 is a field")
    }

    /// The field with four elements, realized as `omega(Z/2)`.
    pub fn f4() -> FiniteField {
        FiniteField::new(&Ring::omega(Ring::int_mod(2).expect("Z/2"))).expect("F_4 is a field")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn characteristic(&self) -> usize {
        let mut x: Fe = 1;
        let mut c = 1;
        while x != 0 {
            x = self.add(x, 1);
            c += 1;
        }
        c
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    /// Inverse of a nonzero element.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn to_elem(&self, a: Fe) -> Elem {
        self.elems[a as usize].clone()
    }

    /// Encodes an element of the field's ring.
    pub fn encode(&self, e: &Elem) -> Fe {
        *self.index.get(e).unwrap_or_else(|| panic!("{e:?} is not in {}", self.ring))
    }

    /// Encodes an integer through `Z → F`.
    pub fn from_i64(&self, n: i64) -> Fe {
        self.encode(&self.ring.from_i64(n))
    }

    /// All encoded elements `0..q`.
    pub fn all(&self) -> impl Iterator<Item = Fe> {
        (0..self.elems.len()).map(|i| i as Fe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_tables() {
        let f = FiniteField::f4();
        assert_eq!(f.order(), 4);
        assert_eq!(f.characteristic(), 2);
        for a in f.all().skip(1) {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.add(a, a), 0);
        }
        let xi = f.encode(&f.ring().xi().unwrap());
        assert_eq!(f.mul(xi, f.mul(xi, xi)), 1);
        assert_eq!(f.add(f.add(f.mul(xi, xi), xi), 1), 0);
    }

    #[test]
    fn rejects_non_fields() {
        assert!(FiniteField::new(&Ring::parse("Z/4").unwrap()).is_err());
        assert!(FiniteField::new(&Ring::parse("dual(Z/2)").unwrap()).is_err());
        assert_eq!(FiniteField::new(&Ring::parse("Z/5").unwrap()).unwrap().characteristic(), 5);
    }
}
