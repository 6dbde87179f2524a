//! Commutative rings with 1 and exact arithmetic on their elements.
//!
//! A [`Ring`] is a cheap, immutable, reference-counted handle describing one
//! of the concrete rings the toolkit works over:
//!
//! * `Z` — the integers,
//! * `Z/n` — integers modulo `n` (canonical representatives `0..n`),
//! * `Zodd` — rationals with odd denominator (the integers localized at 2),
//! * `dual(B)` — dual numbers `a + bε` with `ε² = 0`,
//! * `omega(B)` — `a + bξ` with `ξ² = −ξ − 1`,
//! * `residue(B)` — the residue field of a local ring `B`.
//!
//! Elements ([`Elem`]) are plain values; every operation goes through the ring
//! handle, which keeps matrices of elements compact.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// A ring element. The owning ring is carried separately by the caller.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    /// An element of `Z`.
    Int(BigInt),
    /// A canonical residue in `0..n` of `Z/n`.
    Mod(u64),
    /// A fraction in lowest terms with positive odd denominator.
    Frac(BigRational),
    /// `a + bε` in dual numbers or `a + bξ` in an ω-extension.
    Pair(Box<[Elem; 2]>),
}

impl Elem {
    fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Pair(Box::new([a, b]))
    }

    fn parts(&self) -> (&Elem, &Elem) {
        match self {
            Elem::Pair(p) => (&p[0], &p[1]),
            other => panic!("expected a pair element, found {other:?}"),
        }
    }
}

/// The kinds of rings the toolkit supports.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    Integers,
    IntMod(u64),
    OddLocalizedRationals,
    DualNumbers(Ring),
    OmegaExtension(Ring),
    /// The residue field of `of`; arithmetic happens in the concrete `field`.
    ResidueField { of: Ring, field: Ring },
}

/// Immutable handle to a commutative ring with 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring(Arc<RingKind>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({self})")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Integers => write!(f, "Z"),
            RingKind::IntMod(n) => write!(f, "Z/{n}"),
            RingKind::OddLocalizedRationals => write!(f, "Zodd"),
            RingKind::DualNumbers(b) => write!(f, "dual({b})"),
            RingKind::OmegaExtension(b) => write!(f, "omega({b})"),
            RingKind::ResidueField { of, .. } => write!(f, "residue({of})"),
        }
    }
}

impl std::str::FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ring> {
        Ring::parse(s)
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

fn prime_power_base(n: u64) -> Option<u64> {
    let p = smallest_prime_factor(n);
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p)
}

fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(n as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i128) as u64)
}

impl Ring {
    fn new(kind: RingKind) -> Ring {
        Ring(Arc::new(kind))
    }

    /// The integers.
    pub fn integers() -> Ring {
        Ring::new(RingKind::Integers)
    }

    /// `Z/n`; `n` must be at least 2.
    pub fn int_mod(n: u64) -> Result<Ring> {
        if n < 2 {
            return Err(Error::MalformedSpec(format!("Z/{n}")));
        }
        Ok(Ring::new(RingKind::IntMod(n)))
    }

    /// The integers localized at the prime 2.
    pub fn odd_localized() -> Ring {
        Ring::new(RingKind::OddLocalizedRationals)
    }

    /// Dual numbers over `base`.
    pub fn dual(base: Ring) -> Ring {
        Ring::new(RingKind::DualNumbers(base))
    }

    /// The extension of `base` by a primitive cube root of unity ξ.
    pub fn omega(base: Ring) -> Ring {
        Ring::new(RingKind::OmegaExtension(base))
    }

    /// The residue field of a local ring.
    pub fn residue(of: Ring) -> Result<Ring> {
        let field = of.concrete_residue_field()?;
        Ok(Ring::new(RingKind::ResidueField { of, field }))
    }

    /// Parses the ring-specification grammar
    /// `Z | Z/<n> | Zodd | dual(<spec>) | omega(<spec>) | residue(<spec>)`.
    pub fn parse(spec: &str) -> Result<Ring> {
        let s = spec.trim();
        let malformed = || Error::MalformedSpec(spec.to_string());
        let inner = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix)
                .map(str::trim_start)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
        };
        if s == "Z" {
            Ok(Ring::integers())
        } else if s == "Zodd" {
            Ok(Ring::odd_localized())
        } else if let Some(n) = s.strip_prefix("Z/") {
            let n: u64 = n.trim().parse().map_err(|_| malformed())?;
            Ring::int_mod(n).map_err(|_| malformed())
        } else if let Some(b) = inner("dual") {
            Ok(Ring::dual(Ring::parse(b)?))
        } else if let Some(b) = inner("omega") {
            Ok(Ring::omega(Ring::parse(b)?))
        } else if let Some(b) = inner("residue") {
            Ring::residue(Ring::parse(b)?)
        } else {
            Err(malformed())
        }
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    /// Canonical specification string; round-trips through [`Ring::parse`].
    pub fn spec(&self) -> String {
        self.to_string()
    }

    /// Base ring of a pair-valued ring (dual numbers or ω-extension).
    pub fn base(&self) -> Option<&Ring> {
        match self.kind() {
            RingKind::DualNumbers(b) | RingKind::OmegaExtension(b) => Some(b),
            _ => None,
        }
    }

    /// The ring in which arithmetic actually happens (unwraps residue fields).
    fn arith(&self) -> &Ring {
        match self.kind() {
            RingKind::ResidueField { field, .. } => field.arith(),
            _ => self,
        }
    }

    // ----- constants -------------------------------------------------------

    pub fn zero(&self) -> Elem {
        self.from_i64(0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        match self.arith().kind() {
            RingKind::IntMod(m) => Elem::Mod((n as i128).rem_euclid(*m as i128) as u64),
            RingKind::DualNumbers(b) | RingKind::OmegaExtension(b) => {
                Elem::pair(b.from_i64(n), b.from_i64(0))
            }
            _ => self.from_bigint(&BigInt::from(n)),
        }
    }

    /// The image of an integer under the unique ring map `Z → R`.
    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self.arith().kind() {
            RingKind::Integers => Elem::Int(n.clone()),
            RingKind::IntMod(m) => {
                Elem::Mod(n.mod_floor(&BigInt::from(*m)).to_u64().expect("residue fits"))
            }
            RingKind::OddLocalizedRationals => Elem::Frac(BigRational::from_integer(n.clone())),
            RingKind::DualNumbers(b) | RingKind::OmegaExtension(b) => {
                Elem::pair(b.from_bigint(n), b.zero())
            }
            RingKind::ResidueField { .. } => unreachable!("arith() unwraps residue fields"),
        }
    }

    /// The element ξ of an ω-extension.
    pub fn xi(&self) -> Result<Elem> {
        match self.arith().kind() {
            RingKind::OmegaExtension(b) => Ok(Elem::pair(b.zero(), b.one())),
            _ => Err(Error::MalformedElement { ring: self.spec(), value: "ξ".into() }),
        }
    }

    /// The element ε of a ring of dual numbers.
    pub fn epsilon(&self) -> Result<Elem> {
        match self.arith().kind() {
            RingKind::DualNumbers(b) => Ok(Elem::pair(b.zero(), b.one())),
            _ => Err(Error::MalformedElement { ring: self.spec(), value: "ε".into() }),
        }
    }

    /// Builds `a + b·(ε or ξ)` in a pair-valued ring.
    pub fn make_pair(&self, a: Elem, b: Elem) -> Elem {
        assert!(self.arith().base().is_some(), "{self} has no pair elements");
        Elem::pair(a, b)
    }

    /// Splits a pair element into its two coordinates.
    pub fn split_pair<'a>(&self, x: &'a Elem) -> (&'a Elem, &'a Elem) {
        x.parts()
    }

    // ----- arithmetic ------------------------------------------------------

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Int(v) => v.is_zero(),
            Elem::Mod(v) => *v == 0,
            Elem::Frac(v) => v.is_zero(),
            Elem::Pair(p) => {
                let b = self.arith().base().expect("pair element in a pair ring");
                b.is_zero(&p[0]) && b.is_zero(&p[1])
            }
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.arith().kind(), a, b) {
            (RingKind::IntMod(n), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 + *y as u128) % *n as u128) as u64)
            }
            (_, Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
            (_, Elem::Frac(x), Elem::Frac(y)) => Elem::Frac(x + y),
            (k, Elem::Pair(x), Elem::Pair(y)) => {
                let base = pair_base(k);
                Elem::pair(base.add(&x[0], &y[0]), base.add(&x[1], &y[1]))
            }
            _ => mismatch(self, a, b),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self.arith().kind(), a) {
            (RingKind::IntMod(n), Elem::Mod(x)) => Elem::Mod(if *x == 0 { 0 } else { n - x }),
            (_, Elem::Int(x)) => Elem::Int(-x),
            (_, Elem::Frac(x)) => Elem::Frac(-x),
            (k, Elem::Pair(x)) => {
                let base = pair_base(k);
                Elem::pair(base.neg(&x[0]), base.neg(&x[1]))
            }
            _ => mismatch(self, a, a),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self.arith().kind(), a, b) {
            (RingKind::IntMod(n), Elem::Mod(x), Elem::Mod(y)) => {
                Elem::Mod(((*x as u128 * *y as u128) % *n as u128) as u64)
            }
            (_, Elem::Int(x), Elem::Int(y)) => Elem::Int(x * y),
            (_, Elem::Frac(x), Elem::Frac(y)) => Elem::Frac(x * y),
            (RingKind::DualNumbers(base), Elem::Pair(x), Elem::Pair(y)) => {
                let re = base.mul(&x[0], &y[0]);
                let eps = base.add(&base.mul(&x[0], &y[1]), &base.mul(&x[1], &y[0]));
                Elem::pair(re, eps)
            }
            (RingKind::OmegaExtension(base), Elem::Pair(x), Elem::Pair(y)) => {
                // (a + bξ)(c + dξ) = ac − bd + (ad + bc − bd)ξ using ξ² = −ξ − 1.
                let ac = base.mul(&x[0], &y[0]);
                let bd = base.mul(&x[1], &y[1]);
                let cross = base.add(&base.mul(&x[0], &y[1]), &base.mul(&x[1], &y[0]));
                Elem::pair(base.sub(&ac, &bd), base.sub(&cross, &bd))
            }
            _ => mismatch(self, a, b),
        }
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents for units.
    pub fn pow_signed(&self, a: &Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.invert(a)?, e.unsigned_abs()))
        }
    }

    /// The norm `a² − ab + b²` of `a + bξ` in an ω-extension.
    fn omega_norm(base: &Ring, x: &Elem, y: &Elem) -> Elem {
        let a2 = base.mul(x, x);
        let ab = base.mul(x, y);
        let b2 = base.mul(y, y);
        base.add(&base.sub(&a2, &ab), &b2)
    }

    /// Exact unit test.
    pub fn is_unit(&self, a: &Elem) -> bool {
        match (self.arith().kind(), a) {
            (RingKind::Integers, Elem::Int(x)) => x.abs().is_one(),
            (RingKind::IntMod(n), Elem::Mod(x)) => x.gcd(n) == 1,
            (RingKind::OddLocalizedRationals, Elem::Frac(x)) => x.numer().is_odd(),
            (RingKind::DualNumbers(base), Elem::Pair(x)) => base.is_unit(&x[0]),
            (RingKind::OmegaExtension(base), Elem::Pair(x)) => {
                base.is_unit(&Ring::omega_norm(base, &x[0], &x[1]))
            }
            _ => mismatch(self, a, a),
        }
    }

    /// Multiplicative inverse; signals `NonUnit` when none exists.
    pub fn invert(&self, a: &Elem) -> Result<Elem> {
        let non_unit = || Error::NonUnit { ring: self.spec(), value: self.format(a) };
        if !self.is_unit(a) {
            return Err(non_unit());
        }
        Ok(match (self.arith().kind(), a) {
            (RingKind::Integers, Elem::Int(x)) => Elem::Int(x.clone()),
            (RingKind::IntMod(n), Elem::Mod(x)) => Elem::Mod(mod_inverse(*x, *n).ok_or_else(non_unit)?),
            (RingKind::OddLocalizedRationals, Elem::Frac(x)) => Elem::Frac(x.recip()),
            (RingKind::DualNumbers(base), Elem::Pair(x)) => {
                let inv = base.invert(&x[0])?;
                let eps = base.neg(&base.mul(&x[1], &base.mul(&inv, &inv)));
                Elem::pair(inv, eps)
            }
            (RingKind::OmegaExtension(base), Elem::Pair(x)) => {
                // (a + bξ)⁻¹ = (a + bξ²)/N = (a − b − bξ)/N.
                let n_inv = base.invert(&Ring::omega_norm(base, &x[0], &x[1]))?;
                let re = base.mul(&base.sub(&x[0], &x[1]), &n_inv);
                let im = base.neg(&base.mul(&x[1], &n_inv));
                Elem::pair(re, im)
            }
            _ => mismatch(self, a, a),
        })
    }

    // ----- locality --------------------------------------------------------

    /// The concrete ring realizing `R/J` for a local ring `R`.
    fn concrete_residue_field(&self) -> Result<Ring> {
        let not_local = || Error::NotLocal(self.spec());
        match self.kind() {
            RingKind::Integers => Err(not_local()),
            RingKind::IntMod(n) => {
                let p = prime_power_base(*n).ok_or_else(not_local)?;
                Ring::int_mod(p)
            }
            RingKind::OddLocalizedRationals => Ring::int_mod(2),
            RingKind::DualNumbers(b) => b.concrete_residue_field(),
            RingKind::OmegaExtension(b) => {
                let k = b.concrete_residue_field()?;
                match k.cube_roots_of_unity() {
                    CubeRoots::Double => Ok(k),
                    CubeRoots::None => Ok(Ring::omega(k)),
                    CubeRoots::Split => Err(not_local()),
                }
            }
            RingKind::ResidueField { field, .. } => Ok(field.clone()),
        }
    }

    /// How `x² + x + 1` factors over a finite field.
    fn cube_roots_of_unity(&self) -> CubeRoots {
        match self.arith().kind() {
            RingKind::IntMod(p) => match p % 3 {
                0 => CubeRoots::Double,
                1 => CubeRoots::Split,
                _ => CubeRoots::None,
            },
            // An ω-extension field already contains ξ; its characteristic is not 3
            // (otherwise it would not be a field).
            RingKind::OmegaExtension(_) => CubeRoots::Split,
            _ => unreachable!("residue fields are Z/p or ω-extensions of Z/p"),
        }
    }

    /// Whether the ring is local.
    pub fn is_local(&self) -> bool {
        self.concrete_residue_field().is_ok()
    }

    /// Whether the ring is a field (local with zero radical).
    pub fn is_field(&self) -> bool {
        match self.kind() {
            RingKind::IntMod(n) => smallest_prime_factor(*n) == *n,
            RingKind::OmegaExtension(b) => {
                b.is_field() && matches!(b.cube_roots_of_unity(), CubeRoots::None)
            }
            RingKind::ResidueField { .. } => true,
            _ => false,
        }
    }

    /// Local ring in which 2 lies in the radical.
    pub fn is_local_without_half(&self) -> bool {
        self.in_radical(&self.from_i64(2)).unwrap_or(false)
    }

    /// The residue field `R/J` of a local ring.
    pub fn residue_field(&self) -> Result<Ring> {
        match self.kind() {
            RingKind::ResidueField { .. } => Ok(self.clone()),
            _ => Ring::residue(self.clone()),
        }
    }

    /// The projection `R → R/J`; its kernel is exactly the radical.
    pub fn residue_map(&self, a: &Elem) -> Result<Elem> {
        let not_local = || Error::NotLocal(self.spec());
        match (self.kind(), a) {
            (RingKind::Integers, _) => Err(not_local()),
            (RingKind::IntMod(n), Elem::Mod(x)) => {
                let p = prime_power_base(*n).ok_or_else(not_local)?;
                Ok(Elem::Mod(x % p))
            }
            (RingKind::OddLocalizedRationals, Elem::Frac(x)) => {
                Ok(Elem::Mod(if x.numer().is_odd() { 1 } else { 0 }))
            }
            (RingKind::DualNumbers(b), Elem::Pair(x)) => b.residue_map(&x[0]),
            (RingKind::OmegaExtension(b), Elem::Pair(x)) => {
                let k = b.concrete_residue_field()?;
                let (re, im) = (b.residue_map(&x[0])?, b.residue_map(&x[1])?);
                match k.cube_roots_of_unity() {
                    // ξ ↦ 1 when x² + x + 1 = (x − 1)².
                    CubeRoots::Double => Ok(k.add(&re, &im)),
                    CubeRoots::None => Ok(Elem::pair(re, im)),
                    CubeRoots::Split => Err(not_local()),
                }
            }
            (RingKind::ResidueField { .. }, x) => Ok(x.clone()),
            _ => Err(Error::MalformedElement { ring: self.spec(), value: format!("{a:?}") }),
        }
    }

    /// Membership in the Jacobson radical of a local ring.
    pub fn in_radical(&self, a: &Elem) -> Result<bool> {
        let r = self.residue_map(a)?;
        Ok(self.concrete_residue_field()?.is_zero(&r))
    }

    // ----- enumeration and sampling ---------------------------------------

    /// All elements of a finite ring, in a fixed order; `None` for infinite rings.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match self.arith().kind() {
            RingKind::IntMod(n) if *n <= 1 << 20 => Some((0..*n).map(Elem::Mod).collect()),
            RingKind::DualNumbers(b) | RingKind::OmegaExtension(b) => {
                let els = b.elements()?;
                Some(
                    els.iter()
                        .flat_map(|y| els.iter().map(move |x| Elem::pair(x.clone(), y.clone())))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// A pseudo-random element; infinite rings draw from a small window.
    pub fn random_elem<G: Rng + ?Sized>(&self, rng: &mut G) -> Elem {
        match self.arith().kind() {
            RingKind::Integers => Elem::Int(BigInt::from(rng.gen_range(-20i64..=20))),
            RingKind::IntMod(n) => Elem::Mod(rng.gen_range(0..*n)),
            RingKind::OddLocalizedRationals => {
                let num = BigInt::from(rng.gen_range(-40i64..=40));
                let den = BigInt::from(2 * rng.gen_range(0i64..8) + 1);
                Elem::Frac(BigRational::new(num, den))
            }
            RingKind::DualNumbers(b) | RingKind::OmegaExtension(b) => {
                Elem::pair(b.random_elem(rng), b.random_elem(rng))
            }
            RingKind::ResidueField { .. } => unreachable!(),
        }
    }

    /// A pseudo-random unit.
    pub fn random_unit<G: Rng + ?Sized>(&self, rng: &mut G) -> Elem {
        loop {
            let x = self.random_elem(rng);
            if self.is_unit(&x) {
                return x;
            }
        }
    }

    // ----- serialization ---------------------------------------------------

    /// Human-readable rendering of an element.
    pub fn format(&self, a: &Elem) -> String {
        match a {
            Elem::Int(x) => x.to_string(),
            Elem::Mod(x) => x.to_string(),
            Elem::Frac(x) => x.to_string(),
            Elem::Pair(p) => {
                let (k, b) = match self.arith().kind() {
                    RingKind::DualNumbers(b) => ("ε", b),
                    RingKind::OmegaExtension(b) => ("ξ", b),
                    _ => return format!("{a:?}"),
                };
                let wrap = |s: String| if s.contains(['+', 'ε', 'ξ']) { format!("({s})") } else { s };
                match (b.is_zero(&p[0]), b.is_zero(&p[1])) {
                    (_, true) => b.format(&p[0]),
                    (true, false) => format!("{}{k}", wrap(b.format(&p[1]))),
                    (false, false) => format!("{}+{}{k}", wrap(b.format(&p[0])), wrap(b.format(&p[1]))),
                }
            }
        }
    }

    /// JSON form: integer, `{"num":…,"den":…}` or `{"a":…,"b":…}`.
    pub fn to_json(&self, a: &Elem) -> Value {
        match a {
            Elem::Int(x) => x.to_i64().map(Value::from).unwrap_or_else(|| Value::String(x.to_string())),
            Elem::Mod(x) => Value::from(*x),
            Elem::Frac(x) if x.is_integer() => self.to_json(&Elem::Int(x.to_integer())),
            Elem::Frac(x) => json!({"num": x.numer().to_string(), "den": x.denom().to_string()}),
            Elem::Pair(p) => {
                let b = self.arith().base().expect("pair ring");
                json!({"a": b.to_json(&p[0]), "b": b.to_json(&p[1])})
            }
        }
    }

    /// Parses the JSON element form produced by [`Ring::to_json`].
    pub fn from_json(&self, v: &Value) -> Result<Elem> {
        let bad = || Error::MalformedElement { ring: self.spec(), value: v.to_string() };
        let int_of = |v: &Value| -> Result<BigInt> {
            match v {
                Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
                Value::String(s) => s.trim().parse().map_err(|_| bad()),
                _ => Err(bad()),
            }
        };
        match v {
            Value::Number(_) => Ok(self.from_bigint(&int_of(v)?)),
            Value::String(s) => self.parse_elem(s),
            Value::Object(m) if m.contains_key("num") => {
                let num = int_of(m.get("num").ok_or_else(bad)?)?;
                let den = int_of(m.get("den").ok_or_else(bad)?)?;
                self.from_fraction(&num, &den)
            }
            Value::Object(m) if m.contains_key("a") => {
                let base = self.arith().base().ok_or_else(bad)?;
                let a = base.from_json(m.get("a").ok_or_else(bad)?)?;
                let b = match m.get("b") {
                    Some(b) => base.from_json(b)?,
                    None => base.zero(),
                };
                Ok(Elem::pair(a, b))
            }
            _ => Err(bad()),
        }
    }

    /// The image of `num/den`, provided `den` maps to a unit.
    pub fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<Elem> {
        if den.is_zero() {
            return Err(Error::MalformedElement { ring: self.spec(), value: format!("{num}/{den}") });
        }
        if let RingKind::OddLocalizedRationals = self.arith().kind() {
            let q = BigRational::new(num.clone(), den.clone());
            return if q.denom().is_odd() {
                Ok(Elem::Frac(q))
            } else {
                Err(Error::NonUnit { ring: self.spec(), value: den.to_string() })
            };
        }
        let d = self.invert(&self.from_bigint(den))?;
        Ok(self.mul(&self.from_bigint(num), &d))
    }

    /// Parses `n`, `p/q`, the displayed form `a+bε` / `a+bξ` (coefficients
    /// parenthesized when compound), or a JSON element.
    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        let t = s.trim();
        let bad = || Error::MalformedElement { ring: self.spec(), value: s.to_string() };
        if let RingKind::DualNumbers(base) | RingKind::OmegaExtension(base) = self.kind() {
            let symbol = if matches!(self.kind(), RingKind::DualNumbers(_)) { 'ε' } else { 'ξ' };
            if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                if balanced(inner) {
                    return self.parse_elem(inner);
                }
            }
            if let Some(terms) = split_top_level_sum(t).filter(|terms| terms.iter().any(|x| x.ends_with(symbol))) {
                let mut a = base.zero();
                let mut b = base.zero();
                for term in terms {
                    match term.strip_suffix(symbol) {
                        Some("") => b = base.add(&b, &base.one()),
                        Some(coeff) => b = base.add(&b, &base.parse_elem(coeff).map_err(|_| bad())?),
                        None => a = base.add(&a, &base.parse_elem(term).map_err(|_| bad())?),
                    }
                }
                return Ok(self.make_pair(a, b));
            }
        }
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(self.from_bigint(&n));
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return self.from_fraction(&p, &q);
        }
        let v: Value = serde_json::from_str(t).map_err(|_| bad())?;
        self.from_json(&v)
    }
}

/// Whether every parenthesis in `s` is matched.
fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

/// Splits `s` at `+` signs outside parentheses; `None` when unbalanced.
fn split_top_level_sum(s: &str) -> Option<Vec<&str>> {
    let mut terms = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                terms.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    terms.push(s[start..].trim());
    (depth == 0).then_some(terms)
}

enum CubeRoots {
    None,
    Double,
    Split,
}

fn pair_base(kind: &RingKind) -> &Ring {
    match kind {
        RingKind::DualNumbers(b) | RingKind::OmegaExtension(b) => b,
        _ => panic!("pair element outside a pair ring"),
    }
}

fn mismatch(ring: &Ring, a: &Elem, b: &Elem) -> ! {
    panic!("elements {a:?}, {b:?} do not belong to {ring}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    #[test]
    fn spec_round_trip() {
        for s in ["Z", "Z/4", "Zodd", "dual(residue(Z/2))", "omega(Z/4)", "residue(omega(Z/8))"] {
            assert_eq!(r(s).spec(), s);
        }
        assert!(Ring::parse("Q").is_err());
        assert!(Ring::parse("Z/1").is_err());
        assert!(Ring::parse("dual(Z/4").is_err());
    }

    #[test]
    fn z4_radical_and_residue() {
        let z4 = r("Z/4");
        assert!(z4.is_local_without_half());
        let rad: Vec<u64> = (0..4).filter(|&x| z4.in_radical(&Elem::Mod(x)).unwrap()).collect();
        assert_eq!(rad, vec![0, 2]);
        let k = r("residue(Z/4)");
        assert_eq!(k.elements().unwrap().len(), 2);
        assert_eq!(z4.residue_map(&Elem::Mod(3)).unwrap(), Elem::Mod(1));
        assert_eq!(z4.invert(&Elem::Mod(3)).unwrap(), Elem::Mod(3));
        assert!(matches!(z4.invert(&Elem::Mod(2)), Err(Error::NonUnit { .. })));
    }

    #[test]
    fn dual_over_f2() {
        let d = r("dual(residue(Z/2))");
        assert!(d.is_local_without_half());
        let eps = d.epsilon().unwrap();
        assert!(d.in_radical(&eps).unwrap());
        assert!(d.is_unit(&d.from_i64(3)));
        let one_eps = d.add(&d.one(), &eps);
        assert_eq!(d.residue_map(&one_eps).unwrap(), Elem::Mod(1));
    }

    #[test]
    fn zodd_units_and_residue() {
        let z = r("Zodd");
        let three_fifths = z.parse_elem("3/5").unwrap();
        assert!(z.is_unit(&three_fifths));
        assert!(!z.is_unit(&z.from_i64(2)));
        assert_eq!(z.residue_map(&z.parse_elem("7/3").unwrap()).unwrap(), Elem::Mod(1));
        assert!(z.parse_elem("1/2").is_err());
    }

    #[test]
    fn omega_xi_identities() {
        let w = r("omega(Z/4)");
        let xi = w.xi().unwrap();
        let xi2 = w.mul(&xi, &xi);
        assert_eq!(xi2, w.make_pair(Elem::Mod(3), Elem::Mod(3)));
        assert!(w.is_one(&w.mul(&xi, &xi2)));
        assert_eq!(w.invert(&xi).unwrap(), xi2);
        let f4 = r("residue(omega(Z/4))");
        assert!(f4.is_field());
        assert_eq!(f4.elements().unwrap().len(), 4);
    }

    #[test]
    fn non_local_rings() {
        assert!(!r("Z/6").is_local());
        assert!(matches!(r("Z").in_radical(&Elem::Int(2.into())), Err(Error::NotLocal(_))));
        assert!(Ring::parse("residue(Z/6)").is_err());
        // x² + x + 1 splits over F_7, so omega(Z/7) is not local.
        assert!(!r("omega(Z/7)").is_local());
        // Characteristic 3: double root, residue field stays F_3.
        assert_eq!(r("omega(Z/9)").residue_field().unwrap().elements().unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip() {
        for s in ["Z", "Z/8", "Zodd", "dual(Z/4)", "omega(Zodd)"] {
            let ring = r(s);
            let mut rng = rand::thread_rng();
            for _ in 0..20 {
                let x = ring.random_elem(&mut rng);
                assert_eq!(ring.from_json(&ring.to_json(&x)).unwrap(), x);
            }
        }
    }
}
