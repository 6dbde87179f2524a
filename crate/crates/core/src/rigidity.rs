//! Linearized rigidity checks for perturbed Weyl-group images.
//!
//! The unknown images `w_k + W_k` of Weyl elements are written with
//! perturbations `W_k` whose entries lie in the radical. Expanding every
//! matrix condition and dropping all products of two perturbations yields a
//! linear system over the residue field. Its solution space is compared with
//! the *gauge space* `{([C, w_1], [C, w_2]) : C commutes with all knowns}` of
//! infinitesimal basis changes that fix the known matrices: rigidity holds
//! when every solution is a gauge perturbation.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::chevalley::Adjoint;
use crate::error::{Error, Result};
use crate::field::{Fe, FiniteField};
use crate::linalg::{chain_kernel, rank, span_contains, Echelon, LinearSystem, Solution};
use crate::matrix::RingMatrix;
use crate::rings::{Elem, Ring};
use crate::rootsys::{e_combo, RootSystem};

/// An affine expression `c + Σ a_v z_v` over a finite field.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffineExpr {
    pub constant: Fe,
    /// Nonzero coefficients by unknown id.
    pub terms: BTreeMap<usize, Fe>,
}

/// A matrix of affine expressions, truncated at degree one in the unknowns.
///
/// Stored densely: a constant `n × n` part and, per entry, a coefficient
/// vector over all `nvars` unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicMatrix {
    n: usize,
    nvars: usize,
    constant: Vec<Fe>,
    linear: Vec<Fe>,
}

impl SymbolicMatrix {
    /// A known matrix (no unknown part).
    pub fn known(n: usize, nvars: usize, rows: &[Vec<Fe>]) -> SymbolicMatrix {
        let mut constant = vec![0; n * n];
        for (i, r) in rows.iter().enumerate() {
            constant[i * n..(i + 1) * n].copy_from_slice(r);
        }
        SymbolicMatrix { n, nvars, constant, linear: vec![0; n * n * nvars] }
    }

    /// `base + Z` where `Z_{ij}` is the unknown `offset + i n + j`.
    pub fn perturbed(n: usize, nvars: usize, base: &[Vec<Fe>], offset: usize) -> SymbolicMatrix {
        let mut m = SymbolicMatrix::known(n, nvars, base);
        for e in 0..n * n {
            m.linear[e * nvars + offset + e] = 1;
        }
        m
    }

    pub fn identity(n: usize, nvars: usize) -> SymbolicMatrix {
        let rows: Vec<Vec<Fe>> = (0..n).map(|i| (0..n).map(|j| (i == j) as Fe).collect()).collect();
        SymbolicMatrix::known(n, nvars, &rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// The constant (base-point) part.
    pub fn constant_rows(&self) -> Vec<Vec<Fe>> {
        self.constant.chunks(self.n).map(<[Fe]>::to_vec).collect()
    }

    /// Linear coefficients of entry `(i, j)`.
    pub fn linear_row(&self, i: usize, j: usize) -> &[Fe] {
        let e = i * self.n + j;
        &self.linear[e * self.nvars..(e + 1) * self.nvars]
    }

    /// Entry `(i, j)` as an affine expression.
    pub fn entry(&self, i: usize, j: usize) -> AffineExpr {
        let terms = self.linear_row(i, j).iter().enumerate().filter(|(_, &c)| c != 0).map(|(v, &c)| (v, c)).collect();
        AffineExpr { constant: self.constant[i * self.n + j], terms }
    }

    fn check_shape(&self, other: &SymbolicMatrix) -> Result<()> {
        if self.n != other.n || self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} ({} unknowns) vs {}×{} ({} unknowns)",
                self.n, self.n, self.nvars, other.n, other.n, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, f: &FiniteField, other: &SymbolicMatrix) -> Result<SymbolicMatrix> {
        self.check_shape(other)?;
        let zip = |a: &[Fe], b: &[Fe]| -> Vec<Fe> { a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect() };
        Ok(SymbolicMatrix {
            n: self.n,
            nvars: self.nvars,
            constant: zip(&self.constant, &other.constant),
            linear: zip(&self.linear, &other.linear),
        })
    }

    pub fn neg(&self, f: &FiniteField) -> SymbolicMatrix {
        SymbolicMatrix {
            n: self.n,
            nvars: self.nvars,
            constant: self.constant.iter().map(|&x| f.neg(x)).collect(),
            linear: self.linear.iter().map(|&x| f.neg(x)).collect(),
        }
    }

    pub fn sub(&self, f: &FiniteField, other: &SymbolicMatrix) -> Result<SymbolicMatrix> {
        self.add(f, &other.neg(f))
    }

    /// Product truncated at degree one: `(A₀+A₁)(B₀+B₁) ≈ A₀B₀ + A₀B₁ + A₁B₀`.
    pub fn mul(&self, f: &FiniteField, other: &SymbolicMatrix) -> Result<SymbolicMatrix> {
        self.check_shape(other)?;
        let (n, nv) = (self.n, self.nvars);
        let mut constant = vec![0; n * n];
        let mut linear = vec![0; n * n * nv];
        for i in 0..n {
            for k in 0..n {
                let a0 = self.constant[i * n + k];
                let a1 = &self.linear[(i * n + k) * nv..(i * n + k + 1) * nv];
                let a1_nonzero = a1.iter().any(|&x| x != 0);
                for j in 0..n {
                    let b0 = other.constant[k * n + j];
                    let out = &mut linear[(i * n + j) * nv..(i * n + j + 1) * nv];
                    if a0 != 0 {
                        constant[i * n + j] = f.add(constant[i * n + j], f.mul(a0, b0));
                        let b1 = &other.linear[(k * n + j) * nv..(k * n + j + 1) * nv];
                        for (o, &b) in out.iter_mut().zip(b1) {
                            if b != 0 {
                                *o = f.add(*o, f.mul(a0, b));
                            }
                        }
                    }
                    if b0 != 0 && a1_nonzero {
                        for (o, &a) in out.iter_mut().zip(a1) {
                            if a != 0 {
                                *o = f.add(*o, f.mul(a, b0));
                            }
                        }
                    }
                }
            }
        }
        Ok(SymbolicMatrix { n, nvars: nv, constant, linear })
    }

    /// Truncated inverse `(A₀+A₁)⁻¹ ≈ A₀⁻¹ − A₀⁻¹A₁A₀⁻¹`.
    pub fn inverse(&self, f: &FiniteField) -> Result<SymbolicMatrix> {
        let base = RingMatrix::decode(f, &self.constant_rows());
        let inv = base.inverse().map_err(|_| Error::Singular("base matrix of an inverted factor".into()))?;
        let inv_sym = SymbolicMatrix::known(self.n, self.nvars, &inv.encode(f));
        let lin = SymbolicMatrix { constant: vec![0; self.n * self.n], ..self.clone() };
        let correction = inv_sym.mul(f, &lin)?.mul(f, &inv_sym)?;
        inv_sym.sub(f, &correction)
    }

    pub fn pow(&self, f: &FiniteField, e: i64) -> Result<SymbolicMatrix> {
        let base = if e < 0 { self.inverse(f)? } else { self.clone() };
        let mut acc = SymbolicMatrix::identity(self.n, self.nvars);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(f, &base)?;
        }
        Ok(acc)
    }

    /// Substitutes numeric values for the unknowns: returns the constant part
    /// plus `Σ z_v · (coefficient matrix of v)`.
    pub fn evaluate_linear(&self, f: &FiniteField, values: &[Fe]) -> Vec<Vec<Fe>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.linear_row(i, j)
                            .iter()
                            .zip(values)
                            .fold(0, |acc, (&c, &z)| f.add(acc, f.mul(c, z)))
                    })
                    .collect()
            })
            .collect()
    }
}

/// One factor of a condition word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// A named matrix (known, slot or definition), raised to a power.
    Name(String, i64),
    /// A parenthesized word raised to a power.
    Group(Vec<Factor>, i64),
}

/// A statement of the condition language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    /// `name := word`
    Define(String, Vec<Factor>),
    /// `word = word`
    Equal(Vec<Factor>, Vec<Factor>),
}

/// Parses one statement. Words are juxtaposed factors `name`, `name^k`,
/// `(word)^k` with integer `k` (possibly negative); `E` is the identity.
pub fn parse_statement(text: &str) -> Result<Statement> {
    let bad = |m: &str| Error::MalformedCondition(format!("{text:?}: {m}"));
    if let Some((lhs, rhs)) = text.split_once(":=") {
        let name = lhs.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(bad("definition needs a plain name"));
        }
        return Ok(Statement::Define(name.to_string(), parse_word(rhs).map_err(|e| bad(&e))?));
    }
    let (lhs, rhs) = text.split_once('=').ok_or_else(|| bad("expected `=` or `:=`"))?;
    Ok(Statement::Equal(parse_word(lhs).map_err(|e| bad(&e))?, parse_word(rhs).map_err(|e| bad(&e))?))
}

fn parse_word(text: &str) -> std::result::Result<Vec<Factor>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let word = parse_factors(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(format!("unexpected {:?}", chars[pos]));
    }
    if word.is_empty() {
        return Err("empty word".into());
    }
    Ok(word)
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_factors(c: &[char], pos: &mut usize) -> std::result::Result<Vec<Factor>, String> {
    let mut out = Vec::new();
    loop {
        skip_ws(c, pos);
        if *pos >= c.len() || c[*pos] == ')' {
            return Ok(out);
        }
        if c[*pos] == '(' {
            *pos += 1;
            let inner = parse_factors(c, pos)?;
            if *pos >= c.len() || c[*pos] != ')' {
                return Err("unbalanced parenthesis".into());
            }
            *pos += 1;
            if inner.is_empty() {
                return Err("empty group".into());
            }
            out.push(Factor::Group(inner, parse_exponent(c, pos)?));
        } else if c[*pos].is_alphanumeric() || c[*pos] == '_' {
            let start = *pos;
            while *pos < c.len() && (c[*pos].is_alphanumeric() || c[*pos] == '_') {
                *pos += 1;
            }
            let name: String = c[start..*pos].iter().collect();
            out.push(Factor::Name(name, parse_exponent(c, pos)?));
        } else {
            return Err(format!("unexpected {:?}", c[*pos]));
        }
    }
}

fn parse_exponent(c: &[char], pos: &mut usize) -> std::result::Result<i64, String> {
    if *pos < c.len() && c[*pos] == '^' {
        *pos += 1;
        let start = *pos;
        if *pos < c.len() && c[*pos] == '-' {
            *pos += 1;
        }
        while *pos < c.len() && c[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let s: String = c[start..*pos].iter().collect();
        s.parse().map_err(|_| format!("bad exponent {s:?}"))
    } else {
        Ok(1)
    }
}

/// Evaluation context: named symbolic matrices over a field.
pub struct Context<'f> {
    field: &'f FiniteField,
    n: usize,
    nvars: usize,
    names: HashMap<String, SymbolicMatrix>,
}

impl<'f> Context<'f> {
    pub fn new(field: &'f FiniteField, n: usize, nvars: usize) -> Context<'f> {
        let mut names = HashMap::new();
        names.insert("E".to_string(), SymbolicMatrix::identity(n, nvars));
        Context { field, n, nvars, names }
    }

    pub fn insert(&mut self, name: &str, m: SymbolicMatrix) -> Result<()> {
        if m.n() != self.n || m.nvars() != self.nvars {
            return Err(Error::DimensionMismatch(format!("matrix {name:?} has the wrong shape")));
        }
        self.names.insert(name.to_string(), m);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&SymbolicMatrix> {
        self.names.get(name)
    }

    /// Evaluates a word with truncated arithmetic.
    pub fn eval(&self, word: &[Factor]) -> Result<SymbolicMatrix> {
        let f = self.field;
        let mut acc = SymbolicMatrix::identity(self.n, self.nvars);
        for factor in word {
            let m = match factor {
                Factor::Name(name, e) => self
                    .names
                    .get(name)
                    .ok_or_else(|| Error::MalformedCondition(format!("unknown matrix {name:?}")))?
                    .pow(f, *e)?,
                Factor::Group(inner, e) => self.eval(inner)?.pow(f, *e)?,
            };
            acc = acc.mul(f, &m)?;
        }
        Ok(acc)
    }

    /// Applies a statement: definitions extend the context, equations return
    /// the difference `lhs − rhs`.
    pub fn apply(&mut self, st: &Statement) -> Result<Option<SymbolicMatrix>> {
        match st {
            Statement::Define(name, word) => {
                let m = self.eval(word)?;
                self.names.insert(name.clone(), m);
                Ok(None)
            }
            Statement::Equal(l, r) => Ok(Some(self.eval(l)?.sub(self.field, &self.eval(r)?)?)),
        }
    }
}

/// Appends one equation per matrix position of `difference` (whose constant
/// part must vanish: the condition must hold at the base point).
pub fn linearize_into(system: &mut LinearSystem, difference: &SymbolicMatrix, label: &str) -> Result<()> {
    let n = difference.n();
    if difference.constant.iter().any(|&x| x != 0) {
        return Err(Error::MalformedCondition(format!("{label}: condition fails at the base point")));
    }
    for i in 0..n {
        for j in 0..n {
            let row = difference.linear_row(i, j);
            if row.iter().any(|&x| x != 0) {
                system.push(row.to_vec(), 0);
            }
        }
    }
    Ok(())
}

/// Linearizes a list of statements against a context whose slots are already
/// registered.
pub fn linearize(ctx: &mut Context<'_>, statements: &[String]) -> Result<LinearSystem> {
    let mut system = LinearSystem::new(ctx.nvars);
    for text in statements {
        let st = parse_statement(text)?;
        if let Some(diff) = ctx.apply(&st)? {
            linearize_into(&mut system, &diff, text)?;
        }
    }
    Ok(system)
}

/// Solves a linear system over `field`.
pub fn solve(field: &FiniteField, system: &LinearSystem) -> Solution {
    system.solve(field)
}

/// Basis (as flattened row-major vectors) of `{C : C K = K C ∀ K}`.
pub fn commutant_basis(field: &FiniteField, n: usize, knowns: &[Vec<Vec<Fe>>]) -> Vec<Vec<Fe>> {
    let mut ech = Echelon::new(field, n * n);
    for k in knowns {
        for i in 0..n {
            for j in 0..n {
                let mut eq = vec![0; n * n];
                for c in 0..n {
                    if k[c][j] != 0 {
                        eq[i * n + c] = field.add(eq[i * n + c], k[c][j]);
                    }
                    if k[i][c] != 0 {
                        eq[c * n + j] = field.sub(eq[c * n + j], k[i][c]);
                    }
                }
                if eq.iter().any(|&x| x != 0) {
                    ech.insert(eq);
                }
            }
        }
    }
    ech.nullspace()
}

fn commutator(field: &FiniteField, n: usize, c: &[Fe], t: &[Vec<Fe>]) -> Vec<Fe> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0;
            for k in 0..n {
                acc = field.add(acc, field.mul(c[i * n + k], t[k][j]));
                acc = field.sub(acc, field.mul(t[i][k], c[k * n + j]));
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// Basis of the gauge space: tuples `([C, t_1], …, [C, t_q])` flattened, for
/// `C` in the commutant of `knowns`.
pub fn gauge_space(field: &FiniteField, n: usize, knowns: &[Vec<Vec<Fe>>], targets: &[Vec<Vec<Fe>>]) -> Vec<Vec<Fe>> {
    let ncols = n * n * targets.len();
    let mut ech = Echelon::new(field, ncols);
    let commutant = if knowns.is_empty() {
        (0..n * n).map(|e| (0..n * n).map(|k| (k == e) as Fe).collect()).collect()
    } else {
        commutant_basis(field, n, knowns)
    };
    for c in commutant {
        let tuple: Vec<Fe> = targets.iter().flat_map(|t| commutator(field, n, &c, t)).collect();
        ech.insert(tuple);
    }
    ech.rows().to_vec()
}

/// A transcribed rigidity setup: a basis part, known matrices, perturbed
/// slots, definitions and conditions.
#[derive(Clone, Debug)]
pub struct RigiditySetup {
    pub name: String,
    pub system: String,
    /// Basis part (labels in `system`).
    pub basis: Vec<String>,
    /// Known matrices by name, over `Z`, restricted to the basis part.
    pub knowns: Vec<(String, RingMatrix)>,
    /// Names of the knowns fixed by admissible basis changes.
    pub gauge_knowns: Vec<String>,
    /// Perturbed slots `name → base matrix` over `Z`.
    pub slots: Vec<(String, RingMatrix)>,
    /// Definitions and conditions, in order.
    pub statements: Vec<String>,
}

/// Outcome of a rigidity check.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub setup: String,
    pub field: String,
    pub n: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub solution_dim: usize,
    pub gauge_dim: usize,
    /// Whether every solution lies in the gauge space.
    pub contained: bool,
    /// Whether every gauge tuple solves the linearized system.
    pub gauge_solves: bool,
    /// For setups on a whole Lie algebra: solution dimension and containment
    /// after adding the condition that every slot preserves the Lie bracket.
    pub bracket_solution_dim: Option<usize>,
    pub bracket_contained: Option<bool>,
}

const DERIVED: [&str; 4] = ["x1 := w1^3 Q1", "x12 := w2 x1 w2^3", "x2 := w1 x12 w1^3", "w3 := w13 w1 w13"];

fn basis_indices(rs: &RootSystem, labels: &[String]) -> Result<Vec<usize>> {
    let map: HashMap<String, usize> = (0..rs.dim()).map(|b| (rs.basis_label(b), b)).collect();
    labels
        .iter()
        .map(|l| map.get(l).copied().ok_or_else(|| Error::Fixture(format!("unknown basis label {l}"))))
        .collect()
}

fn root_labels(rs: &RootSystem, pairs: &[(usize, usize)]) -> Vec<String> {
    let dim = rs.ambient_dim();
    pairs
        .iter()
        .flat_map(|&(a, b)| {
            let r = rs.expect_root(&e_combo(dim, &[(1, a), (-1, b)]));
            [rs.basis_label(r), rs.basis_label(rs.negate(r))]
        })
        .collect()
}

/// The named setups: `fourth`, `third`, `second`, `first-a3`.
pub fn setup(name: &str) -> Result<RigiditySetup> {
    let (system, pairs): (&str, Vec<(usize, usize)>) = match name {
        "fourth" => ("A5", vec![(5, 6)]),
        "third" => ("A7", vec![(5, 7), (5, 8), (6, 7), (6, 8)]),
        "second" => ("A5", (5..=6).flat_map(|b| (1..=4).map(move |a| (a, b))).collect()),
        "first-a3" => ("A3", vec![]),
        other => return Err(Error::UnknownFixture(format!("rigidity setup {other:?}"))),
    };
    let adj = Adjoint::parse(system)?;
    let rs = adj.system();
    let basis = if pairs.is_empty() { (0..rs.dim()).map(|b| rs.basis_label(b)).collect() } else { root_labels(rs, &pairs) };
    let idx = basis_indices(rs, &basis)?;
    let z = Ring::integers();
    let one = z.one();
    let seq = rs.orthogonal_sequence();
    let restrict = |m: RingMatrix, what: &str| -> Result<RingMatrix> {
        if !m.preserves(&idx) {
            return Err(Error::Fixture(format!("{name}: {what} does not preserve the basis part")));
        }
        Ok(m.restrict(&idx))
    };
    let w1 = restrict(adj.w_elem(&z, rs.simple(1), &one)?, "w1")?;
    let w2 = restrict(adj.w_elem(&z, rs.simple(2), &one)?, "w2")?;
    let q1 = restrict(adj.q_elem(&z, rs.simple(1))?, "Q1")?;
    let mut knowns = vec![("Q1".to_string(), q1)];
    let mut statements: Vec<String> = DERIVED[..3].iter().map(|s| s.to_string()).collect();
    let gauge_knowns: Vec<String> = match name {
        "fourth" | "third" => {
            statements.push("(w1 w2)^3 = E".into());
            statements.push("x1 x2 x12 = x2 x1".into());
            vec!["Q1".into()]
        }
        _ => {
            let w13 = restrict(adj.wij_elem(&z, &seq, 0, 1)?, "w13")?;
            knowns.push(("w13".into(), w13.clone()));
            let q3 = w13.mul(&knowns[0].1).mul(&w13);
            knowns.push(("Q3".into(), q3));
            statements.push(DERIVED[3].into());
            statements.push("w1 Q3 = Q3 w1".into());
            let mut gk: Vec<String> = vec!["Q1".into(), "Q3".into(), "w13".into()];
            if name == "second" {
                let qi = restrict(adj.q_elem(&z, rs.simple(5))?, "Qi")?;
                knowns.push(("Qi".into(), qi));
                statements.push("w1 Qi = Qi w1".into());
                statements.push("w2 Qi = Qi w2".into());
                gk.push("Qi".into());
            }
            statements.extend(
                ["(w1 w2)^3 = E", "w3 w1 = w1 w3", "w2 w1 w3 w2 = w13", "x1 x12 = x12 x1", "x1 x2 x12 = x2 x1"]
                    .iter()
                    .map(|s| s.to_string()),
            );
            gk
        }
    };
    Ok(RigiditySetup {
        name: name.to_string(),
        system: system.to_string(),
        basis,
        knowns,
        gauge_knowns,
        slots: vec![("w1".into(), w1), ("w2".into(), w2)],
        statements,
    })
}

/// Names of all shipped rigidity setups.
pub const SETUPS: [&str; 4] = ["fourth", "third", "second", "first-a3"];

fn to_field(f: &FiniteField, m: &RingMatrix) -> Vec<Vec<Fe>> {
    m.reduce_integers(f.ring()).encode(f)
}

impl RigiditySetup {
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// Builds the evaluation context over `field` with the slots perturbed.
    pub fn context<'f>(&self, field: &'f FiniteField) -> Result<Context<'f>> {
        let n = self.n();
        let nvars = n * n * self.slots.len();
        let mut ctx = Context::new(field, n, nvars);
        for (name, m) in &self.knowns {
            ctx.insert(name, SymbolicMatrix::known(n, nvars, &to_field(field, m)))?;
        }
        for (k, (name, m)) in self.slots.iter().enumerate() {
            ctx.insert(name, SymbolicMatrix::perturbed(n, nvars, &to_field(field, m), k * n * n))?;
        }
        Ok(ctx)
    }

    /// Checks that every condition holds exactly at the base point over `Z`.
    pub fn holds_over_integers(&self) -> Result<bool> {
        let z = Ring::integers();
        let slots: Vec<RingMatrix> = self.slots.iter().map(|(_, m)| m.clone()).collect();
        Ok(self.differences(&z, &slots)?.iter().all(RingMatrix::is_zero))
    }

    /// Evaluates every condition exactly over `ring` (knowns reduced from
    /// `Z`, slots given explicitly) and returns the differences `lhs − rhs`.
    pub fn differences(&self, ring: &Ring, slots: &[RingMatrix]) -> Result<Vec<RingMatrix>> {
        let n = self.n();
        if slots.len() != self.slots.len() {
            return Err(Error::DimensionMismatch(format!("{} slot values for {} slots", slots.len(), self.slots.len())));
        }
        let mut env: HashMap<String, RingMatrix> = HashMap::new();
        env.insert("E".into(), RingMatrix::identity(ring, n));
        for (name, m) in &self.knowns {
            env.insert(name.clone(), m.reduce_integers(ring));
        }
        for ((name, _), m) in self.slots.iter().zip(slots) {
            env.insert(name.clone(), m.clone());
        }
        fn eval(env: &HashMap<String, RingMatrix>, ring: &Ring, word: &[Factor], n: usize) -> Result<RingMatrix> {
            let mut acc = RingMatrix::identity(ring, n);
            for f in word {
                let (m, e) = match f {
                    Factor::Name(name, e) => (
                        env.get(name).cloned().ok_or_else(|| Error::MalformedCondition(format!("unknown matrix {name:?}")))?,
                        *e,
                    ),
                    Factor::Group(inner, e) => (eval(env, ring, inner, n)?, *e),
                };
                let base = if e < 0 { m.inverse()? } else { m };
                acc = acc.mul(&base.pow(e.unsigned_abs()));
            }
            Ok(acc)
        }
        let mut out = Vec::new();
        for text in &self.statements {
            match parse_statement(text)? {
                Statement::Define(name, word) => {
                    let m = eval(&env, ring, &word, n)?;
                    env.insert(name, m);
                }
                Statement::Equal(l, r) => out.push(eval(&env, ring, &l, n)?.sub(&eval(&env, ring, &r, n)?)),
            }
        }
        Ok(out)
    }

    /// Symbolic differences `lhs − rhs` of every condition over `field`.
    pub fn linearized_differences(&self, field: &FiniteField) -> Result<Vec<SymbolicMatrix>> {
        let mut ctx = self.context(field)?;
        let mut out = Vec::new();
        for text in &self.statements {
            if let Some(d) = ctx.apply(&parse_statement(text)?)? {
                out.push(d);
            }
        }
        Ok(out)
    }

    /// Linearizes, solves, and compares with the gauge space.
    pub fn check(&self, field: &FiniteField) -> Result<RigidityReport> {
        let n = self.n();
        let mut ctx = self.context(field)?;
        let system = linearize(&mut ctx, &self.statements)?;
        let sol = solve(field, &system);
        let targets: Vec<Vec<Vec<Fe>>> = self.slots.iter().map(|(_, m)| to_field(field, m)).collect();
        let bracket_system = if self.basis.len() == Adjoint::parse(&self.system)?.dim() {
            let adj = Adjoint::parse(&self.system)?;
            let mut augmented = system.clone();
            for (k, base) in targets.iter().enumerate() {
                for row in bracket_conditions(field, &adj, base, k * n * n, system.nvars) {
                    augmented.push(row, 0);
                }
            }
            Some(solve(field, &augmented))
        } else {
            None
        };
        let knowns: Vec<Vec<Vec<Fe>>> = self
            .gauge_knowns
            .iter()
            .map(|g| {
                self.knowns
                    .iter()
                    .find(|(k, _)| k == g)
                    .map(|(_, m)| to_field(field, m))
                    .ok_or_else(|| Error::Fixture(format!("unknown gauge known {g}")))
            })
            .collect::<Result<_>>()?;
        let gauge = gauge_space(field, n, &knowns, &targets);
        let nvars = system.nvars;
        let contained = span_contains(field, &gauge, &sol.basis, nvars);
        let gauge_solves = gauge.iter().all(|g| {
            system.rows.iter().all(|(row, _)| row.iter().zip(g).fold(0, |acc, (&a, &z)| field.add(acc, field.mul(a, z))) == 0)
        });
        Ok(RigidityReport {
            setup: self.name.clone(),
            field: field.ring().spec(),
            n,
            unknowns: nvars,
            equations: rank(field, &system.rows.iter().map(|(r, _)| r.clone()).collect::<Vec<_>>(), nvars),
            solution_dim: sol.dim(),
            gauge_dim: gauge.len(),
            contained,
            gauge_solves,
            bracket_solution_dim: bracket_system.as_ref().map(Solution::dim),
            bracket_contained: bracket_system.map(|b| span_contains(field, &gauge, &b.basis, nvars)),
        })
    }
}

/// Linearized conditions that `base + Z` preserves the Lie bracket of the
/// full adjoint algebra, where `Z_{ij}` is unknown `offset + i n + j`:
/// `Z[a, b] = [Z a, base b] + [base a, Z b]` for all basis pairs `a, b`
/// (using that `base` itself preserves the bracket).
pub fn bracket_conditions(field: &FiniteField, adj: &Adjoint, base: &[Vec<Fe>], offset: usize, nvars: usize) -> Vec<Vec<Fe>> {
    let n = adj.dim();
    let table: Vec<Vec<Vec<Fe>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut v = vec![0; n];
                    for (r, c) in adj.bracket_basis(a, b) {
                        v[r] = field.add(v[r], field.from_i64(c));
                    }
                    v
                })
                .collect()
        })
        .collect();
    // images[s][q] = [v_s, base v_q]
    let images: Vec<Vec<Vec<Fe>>> = (0..n)
        .map(|s| {
            (0..n)
                .map(|q| {
                    let mut v = vec![0; n];
                    for (t, row) in base.iter().enumerate() {
                        if row[q] != 0 {
                            for (r, &c) in table[s][t].iter().enumerate() {
                                v[r] = field.add(v[r], field.mul(c, row[q]));
                            }
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for p in 0..n {
        for q in 0..n {
            let mut eqs = vec![vec![0 as Fe; nvars]; n];
            for (s, &c) in table[p][q].iter().enumerate() {
                if c != 0 {
                    for (r, eq) in eqs.iter_mut().enumerate() {
                        eq[offset + r * n + s] = field.add(eq[offset + r * n + s], c);
                    }
                }
            }
            for s in 0..n {
                // [v_s, base v_q] and [base v_p, v_s] = −[v_s, base v_p]
                for (r, eq) in eqs.iter_mut().enumerate() {
                    let a = images[s][q][r];
                    let b = images[s][p][r];
                    eq[offset + s * n + p] = field.sub(eq[offset + s * n + p], a);
                    eq[offset + s * n + q] = field.add(eq[offset + s * n + q], b);
                }
            }
            rows.extend(eqs.into_iter().filter(|e| e.iter().any(|&x| x != 0)));
        }
    }
    rows
}

/// Runs a named setup over `F_2` (`"F2"`) or `F_4` (`"F4"`).
pub fn rigidity_check(name: &str, field: &str) -> Result<RigidityReport> {
    let f = match field {
        "F2" => FiniteField::f2(),
        "F4" => FiniteField::f4(),
        other => return Err(Error::MalformedSpec(format!("unknown field {other:?} (expected F2 or F4)"))),
    };
    setup(name)?.check(&f)
}

/// One surviving matrix of the centralizer enumeration.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Survivor {
    /// Entry at row `x[e1-e5]`, column `x[e2-e5]` (the printed `x_{1,3}`).
    pub x13: String,
    /// Entry at row `x[-e2+e5]`, column `x[-e1+e5]` (the printed `x_{4,2}`).
    pub x42: String,
    /// `Some(s)` when the survivor equals `x_{α_1}(s)` on the block.
    pub root_element: Option<String>,
}

/// Result of the centralizer enumeration on the second-type block.
#[derive(Clone, Debug, Serialize)]
pub struct CentralizerReport {
    pub ring: String,
    pub n: usize,
    /// Orders of the kernel generators (the family is their direct sum).
    pub generator_orders: Vec<u64>,
    pub family_size: u128,
    pub invertible: usize,
    /// Invertible family members satisfying the forcing condition.
    pub survivors: Vec<Survivor>,
    /// Whether the survivors are exactly `{x_{α_1}(s) : s ∈ R}`.
    pub collapses_to_root_elements: bool,
    /// Whether the identity lies in the family.
    pub contains_identity: bool,
    /// The conjugation used for the image of `x_{α₁+α₂}(t)`.
    pub conjugation: String,
}

/// The second-type block of `A_5`: `±(e_a − e_5), ±(e_a − e_6)`, `a ≤ 4`.
pub fn second_type_block(rs: &RootSystem) -> Result<Vec<usize>> {
    if rs.name() != "A5" {
        return Err(Error::NotSecondType(rs.name()));
    }
    let pairs: Vec<(usize, usize)> = (5..=6).flat_map(|b| (1..=4).map(move |a| (a, b))).collect();
    basis_indices(rs, &root_labels(rs, &pairs))
}

/// Known matrices on the `A_5` second-type block over a finite ring.
pub struct SecondTypeBlock {
    labels: Vec<String>,
    /// `w_{α_3}, x_{α_1}(1), x_{α_3}(1), x_{α_5}(1), Q_{α_5}, Q_{α_3},
    /// x_{α_1+α_2}(1), x_{−α_2}(1)`: the matrices `X_t` commutes with.
    knowns: Vec<RingMatrix>,
    x2: RingMatrix,
    conj_left: RingMatrix,
    conj_right: RingMatrix,
    conjugation: &'static str,
    /// `x_{α_1}(s)` restricted to the block, for every `s` in the ring.
    root_elements: Vec<(Elem, RingMatrix)>,
}

impl SecondTypeBlock {
    pub fn new(ring: &Ring) -> Result<SecondTypeBlock> {
        let adj = Adjoint::parse("A5")?;
        let rs = adj.system();
        let idx = second_type_block(rs)?;
        let one = ring.one();
        let s = |i: usize| rs.simple(i);
        let a12 = rs.root_sum(s(1), s(2)).expect("α1+α2 is a root");
        let restrict = |m: RingMatrix| -> Result<RingMatrix> {
            if !m.preserves(&idx) {
                return Err(Error::Assertion("known matrix does not preserve the second-type block".into()));
            }
            Ok(m.restrict(&idx))
        };
        let knowns = vec![
            restrict(adj.w_elem(ring, s(3), &one)?)?,
            restrict(adj.x_elem(ring, s(1), &one)?)?,
            restrict(adj.x_elem(ring, s(3), &one)?)?,
            restrict(adj.x_elem(ring, s(5), &one)?)?,
            restrict(adj.q_elem(ring, s(5))?)?,
            restrict(adj.q_elem(ring, s(3))?)?,
            restrict(adj.x_elem(ring, a12, &one)?)?,
            restrict(adj.x_elem(ring, rs.negate(s(2)), &one)?)?,
        ];
        let w2 = restrict(adj.w_elem(ring, s(2), &one)?)?;
        let w2_inv = w2.inverse()?;
        let x2 = restrict(adj.x_elem(ring, s(2), &one)?)?;
        let root_elements: Vec<(Elem, RingMatrix)> = ring
            .elements()
            .ok_or_else(|| Error::MalformedSpec(format!("{ring} is not finite")))?
            .into_iter()
            .map(|t| Ok((t.clone(), restrict(adj.x_elem(ring, s(1), &t)?)?)))
            .collect::<Result<_>>()?;
        let mut block = SecondTypeBlock {
            labels: idx.iter().map(|&b| rs.basis_label(b)).collect(),
            knowns,
            x2,
            conj_left: w2.clone(),
            conj_right: w2_inv.clone(),
            conjugation: "w2 X w2^-1",
            root_elements,
        };
        // `w₂ X w₂⁻¹` is the image of `x_{α₁+α₂}(±t)`; the forcing condition is
        // taken with whichever conjugation direction gives `+t` in the basis in
        // use, i.e. the one under which `x_{α₁}(1)` itself satisfies it.
        let x1 = block.root_element(&ring.one()).clone();
        if !block.forcing_residual(&x1).is_zero() {
            block.conj_left = w2_inv;
            block.conj_right = w2;
            block.conjugation = "w2^-1 X w2";
            if !block.forcing_residual(&x1).is_zero() {
                return Err(Error::Assertion("forcing condition fails for x_{α1}(1) in both directions".into()));
            }
        }
        Ok(block)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn knowns(&self) -> &[RingMatrix] {
        &self.knowns
    }

    /// `x_{α_1}(s)` on the block.
    pub fn root_element(&self, s: &Elem) -> &RingMatrix {
        &self.root_elements.iter().find(|(t, _)| t == s).expect("element of the ring").1
    }

    /// `X' x_{α_2}(1) X − X x_{α_2}(1)` with `X'` the conjugate of `X` by `w_{α_2}`.
    pub fn forcing_residual(&self, x: &RingMatrix) -> RingMatrix {
        let xp = self.conj_left.mul(x).mul(&self.conj_right);
        xp.mul(&self.x2).mul(x).sub(&x.mul(&self.x2))
    }

    /// Integer rows of the linear system `X K − K X = 0` over `Z/m`.
    fn commutation_rows(&self, modulus: u64) -> Vec<Vec<u64>> {
        let n = self.n();
        let residue = |e: &Elem| -> u64 {
            match e {
                Elem::Mod(v) => *v % modulus,
                _ => unreachable!("Z/p^k elements"),
            }
        };
        let mut rows = Vec::new();
        for kn in &self.knowns {
            for i in 0..n {
                for j in 0..n {
                    let mut eq = vec![0u64; n * n];
                    for c in 0..n {
                        eq[i * n + c] = (eq[i * n + c] + residue(kn.get(c, j))) % modulus;
                        eq[c * n + j] = (eq[c * n + j] + modulus - residue(kn.get(i, c))) % modulus;
                    }
                    if eq.iter().any(|&x| x != 0) {
                        rows.push(eq);
                    }
                }
            }
        }
        rows
    }
}

/// Enumerates the matrices on the second-type block commuting with the
/// [`SecondTypeBlock`] knowns over `Z/p^k`, and keeps the invertible ones
/// satisfying the forcing condition `X' x_{α_2}(1) X = X x_{α_2}(1)`.
pub fn unipotent_centralizer(ring: &Ring, block: &str) -> Result<CentralizerReport> {
    if block != "second" {
        return Err(Error::NotSecondType(block.to_string()));
    }
    let (p, k) = prime_power(ring)?;
    let ctx = SecondTypeBlock::new(ring)?;
    let n = ctx.n();
    let modulus = p.pow(k);
    let rows = ctx.commutation_rows(modulus);
    let kernel = chain_kernel(&rows, n * n, p, k);
    let orders: Vec<u64> = kernel.generators.iter().map(|(_, o)| *o).collect();
    let family_size = kernel.size();
    if family_size > 1 << 24 {
        return Err(Error::Assertion(format!("centralizer family too large to enumerate ({family_size})")));
    }
    let position = |row: &str, col: &str| -> (usize, usize) {
        let at = |l: &str| ctx.labels.iter().position(|x| x == l).expect("block label");
        (at(row), at(col))
    };
    let p13 = position("x[e1-e5]", "x[e2-e5]");
    let p42 = position("x[-e2+e5]", "x[-e1+e5]");
    let results: Vec<(bool, Option<Survivor>)> = (0..family_size as u64)
        .into_par_iter()
        .map(|mut code| {
            let coeffs: Vec<u64> = orders
                .iter()
                .map(|&o| {
                    let c = code % o;
                    code /= o;
                    c
                })
                .collect();
            let v = kernel.combine(&coeffs);
            let x = RingMatrix::from_fn(ring, n, |i, j| ring.from_i64(v[i * n + j] as i64));
            if !ring.is_unit(&x.det()) {
                return (false, None);
            }
            if !ctx.forcing_residual(&x).is_zero() {
                return (true, None);
            }
            let root_element = ctx.root_elements.iter().find(|(_, m)| *m == x).map(|(t, _)| ring.format(t));
            let survivor = Survivor {
                x13: ring.format(x.get(p13.0, p13.1)),
                x42: ring.format(x.get(p42.0, p42.1)),
                root_element,
            };
            (true, Some(survivor))
        })
        .collect();
    let invertible = results.iter().filter(|r| r.0).count();
    let mut survivors: Vec<Survivor> = results.into_iter().filter_map(|r| r.1).collect();
    survivors.sort_by(|a, b| (&a.x13, &a.x42).cmp(&(&b.x13, &b.x42)));
    let root_hits = survivors.iter().filter(|s| s.root_element.is_some()).count();
    let identity: Vec<u64> = (0..n * n).map(|e| (e / n == e % n) as u64).collect();
    let contains_identity =
        rows.iter().all(|eq| eq.iter().zip(&identity).map(|(a, b)| a * b).sum::<u64>() % modulus == 0);
    Ok(CentralizerReport {
        ring: ring.spec(),
        n,
        generator_orders: orders,
        family_size,
        invertible,
        collapses_to_root_elements: root_hits == survivors.len() && root_hits == ctx.root_elements.len(),
        survivors,
        contains_identity,
        conjugation: ctx.conjugation.to_string(),
    })
}

fn prime_power(ring: &Ring) -> Result<(u64, u32)> {
    let crate::rings::RingKind::IntMod(m) = ring.kind() else {
        return Err(Error::MalformedSpec(format!("{ring} is not Z/p^k")));
    };
    let m = *m;
    let p = (2..=m).find(|d| m % d == 0).expect("m ≥ 2");
    let (mut k, mut r) = (0, m);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r != 1 {
        return Err(Error::NotLocal(ring.spec()));
    }
    Ok((p, k))
}

/// Result of the matrix-unit extraction.
#[derive(Clone, Debug)]
pub struct MatrixUnit {
    pub matrix: RingMatrix,
    pub row: usize,
    pub col: usize,
    pub scalar: Elem,
}

/// Computes `((x_{α_1}(1) − 1)(x_{α_2}(1) − 1))²` in `A_3` and checks that it
/// has a single nonzero entry, at row `x_{α_1+α_2}`, column `x_{−α_1−α_2}`.
pub fn matrix_unit_extract(ring: &Ring) -> Result<MatrixUnit> {
    let adj = Adjoint::parse("A3")?;
    let rs = adj.system();
    let one = ring.one();
    let id = RingMatrix::identity(ring, adj.dim());
    let a = adj.x_elem(ring, rs.simple(1), &one)?.sub(&id);
    let b = adj.x_elem(ring, rs.simple(2), &one)?.sub(&id);
    let ab = a.mul(&b);
    let m = ab.mul(&ab);
    let support = m.support();
    let target = rs.root_sum(rs.simple(1), rs.simple(2)).expect("α1+α2");
    match support.as_slice() {
        [(i, j)] if *i == target && *j == rs.negate(target) => {
            let scalar = m.get(*i, *j).clone();
            Ok(MatrixUnit { row: *i, col: *j, scalar, matrix: m })
        }
        _ => Err(Error::Assertion(format!("expected a single entry at the α1+α2 lines, found support {support:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_statements() {
        assert_eq!(
            parse_statement("x1 := w1^3 Q1").unwrap(),
            Statement::Define("x1".into(), vec![Factor::Name("w1".into(), 3), Factor::Name("Q1".into(), 1)])
        );
        assert!(matches!(parse_statement("(w1 w2)^-1 = E").unwrap(), Statement::Equal(..)));
        assert!(parse_statement("w1 (w2 = E").is_err());
        assert!(parse_statement("w1 w2").is_err());
    }

    #[test]
    fn order_three_word_linearizes_to_sum() {
        // (E+W1)(E+W2) of order three with identity bases: 3W1 + 3W2 = 0.
        let f = FiniteField::f2();
        let n = 2;
        let nvars = 2 * n * n;
        let id: Vec<Vec<Fe>> = vec![vec![1, 0], vec![0, 1]];
        let mut ctx = Context::new(&f, n, nvars);
        ctx.insert("w1", SymbolicMatrix::perturbed(n, nvars, &id, 0)).unwrap();
        ctx.insert("w2", SymbolicMatrix::perturbed(n, nvars, &id, n * n)).unwrap();
        let sys = linearize(&mut ctx, &["(w1 w2)^3 = E".into()]).unwrap();
        assert_eq!(sys.rows.len(), 4);
        for (k, (row, _)) in sys.rows.iter().enumerate() {
            assert_eq!(row[k], 1);
            assert_eq!(row[n * n + k], 1);
        }
        let sol = solve(&f, &sys);
        assert_eq!(sol.dim(), 4);
    }

    #[test]
    fn trivial_systems() {
        let f = FiniteField::f2();
        let mut sys = LinearSystem::new(2);
        sys.push(vec![1, 1], 0);
        sys.push(vec![0, 1], 0);
        assert_eq!(solve(&f, &sys).dim(), 0);
        assert_eq!(solve(&f, &LinearSystem::new(3)).dim(), 3);
        // Slot = 0 forces every entry to vanish.
        let n = 2;
        let zero: Vec<Vec<Fe>> = vec![vec![0, 0], vec![0, 0]];
        let mut ctx = Context::new(&f, n, n * n);
        ctx.insert("W", SymbolicMatrix::perturbed(n, n * n, &zero, 0)).unwrap();
        ctx.insert("Z", SymbolicMatrix::known(n, n * n, &zero)).unwrap();
        assert_eq!(solve(&f, &linearize(&mut ctx, &["W = Z".into()]).unwrap()).dim(), 0);
        // W K − K W with K = E is vacuous.
        let sys = linearize(&mut ctx, &["W E = E W".into()]).unwrap();
        assert!(sys.rows.is_empty());
    }

    #[test]
    fn gauge_space_extremes() {
        let f = FiniteField::f2();
        let n = 2;
        let t: Vec<Vec<Fe>> = vec![vec![0, 1], vec![1, 1]];
        let all: Vec<Vec<Fe>> = vec![vec![1, 0], vec![0, 0]];
        let other: Vec<Vec<Fe>> = vec![vec![0, 1], vec![0, 0]];
        assert!(gauge_space(&f, n, &[all, other], &[t.clone()]).is_empty());
        assert_eq!(gauge_space(&f, n, &[], &[t]).len(), 2);
    }

    #[test]
    fn setups_hold_at_base_point() {
        for name in SETUPS {
            let s = setup(name).unwrap();
            assert!(s.holds_over_integers().unwrap(), "{name}");
        }
    }

    #[test]
    fn identity_blocks_are_rigid() {
        for name in ["fourth", "third"] {
            let r = rigidity_check(name, "F2").unwrap();
            assert_eq!(r.solution_dim, 0, "{name}");
            assert!(r.contained);
        }
    }

    #[test]
    fn transcribed_lists_leave_non_gauge_directions() {
        let second = rigidity_check("second", "F2").unwrap();
        assert_eq!((second.solution_dim, second.gauge_dim, second.contained), (16, 12, false));
        assert!(second.gauge_solves);
        let first = rigidity_check("first-a3", "F2").unwrap();
        assert_eq!((first.solution_dim, first.gauge_dim, first.contained), (16, 14, false));
        assert!(first.gauge_solves);
        assert_eq!(first.bracket_contained, Some(true));
    }

    #[test]
    fn bracket_conditions_vanish_on_derivations() {
        // Z = [ad x, base]-type perturbations: Z = ad(u)·base is a derivation
        // composed with an automorphism, so it must satisfy the conditions.
        let f = FiniteField::f2();
        let adj = Adjoint::parse("A3").unwrap();
        let n = adj.dim();
        let base = adj.w_elem(&Ring::integers(), adj.system().simple(1), &Ring::integers().one()).unwrap();
        let base = to_field(&f, &base);
        let ad = to_field(&f, &adj.ad_matrix(4));
        let z: Vec<Fe> = (0..n * n)
            .map(|e| (0..n).fold(0, |acc, k| f.add(acc, f.mul(ad[e / n][k], base[k][e % n]))))
            .collect();
        for row in bracket_conditions(&f, &adj, &base, 0, n * n) {
            assert_eq!(row.iter().zip(&z).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))), 0);
        }
    }

    #[test]
    fn forcing_leaves_two_independent_halves() {
        let z4 = Ring::parse("Z/4").unwrap();
        let report = unipotent_centralizer(&z4, "second").unwrap();
        assert_eq!(report.family_size, 4096);
        assert!(report.contains_identity);
        assert_eq!(report.survivors.len(), 16);
        assert_eq!(report.survivors.iter().filter(|s| s.root_element.is_some()).count(), 4);
        assert!(!report.collapses_to_root_elements);
        assert!(matches!(unipotent_centralizer(&z4, "first"), Err(Error::NotSecondType(_))));
    }

    #[test]
    fn forcing_diagonal_entries_are_idempotent_equations() {
        let z4 = Ring::parse("Z/4").unwrap();
        let block = SecondTypeBlock::new(&z4).unwrap();
        let n = block.n();
        for a in 0..4i64 {
            for b in 0..4i64 {
                let x = RingMatrix::from_fn(&z4, n, |i, j| {
                    if i != j {
                        z4.zero()
                    } else if i % 2 == 0 {
                        z4.from_i64(a)
                    } else {
                        z4.from_i64(b)
                    }
                });
                let r = block.forcing_residual(&x);
                assert_eq!(*r.get(0, 0), z4.from_i64(a * (a - 1)));
                assert_eq!(*r.get(1, 1), z4.from_i64(b * (b - 1)));
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(50))]

        #[test]
        fn linearization_matches_dual_number_evaluation(seed in proptest::prelude::any::<u64>(), which in 0usize..4) {
            use rand::{Rng, SeedableRng};
            let setup = setup(SETUPS[which]).unwrap();
            let f = FiniteField::f2();
            let dual = Ring::dual(f.ring().clone());
            let eps = dual.epsilon().unwrap();
            let n = setup.n();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<Fe> = (0..n * n * setup.slots.len()).map(|_| rng.gen_range(0..2)).collect();
            let slots: Vec<RingMatrix> = setup
                .slots
                .iter()
                .enumerate()
                .map(|(k, (_, base))| {
                    let base = base.reduce_integers(&dual);
                    RingMatrix::from_fn(&dual, n, |i, j| {
                        let z = if values[k * n * n + i * n + j] == 1 { eps.clone() } else { dual.zero() };
                        dual.add(base.get(i, j), &z)
                    })
                })
                .collect();
            let exact = setup.differences(&dual, &slots).unwrap();
            let linear = setup.linearized_differences(&f).unwrap();
            proptest::prop_assert_eq!(exact.len(), linear.len());
            for (d, l) in exact.iter().zip(&linear) {
                let predicted = l.evaluate_linear(&f, &values);
                for i in 0..n {
                    for j in 0..n {
                        let (c, e) = dual.split_pair(d.get(i, j));
                        proptest::prop_assert!(f.ring().is_zero(c));
                        proptest::prop_assert_eq!(f.encode(e), predicted[i][j]);
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_unit_has_single_entry() {
        let z = Ring::integers();
        let mu = matrix_unit_extract(&z).unwrap();
        assert_eq!(mu.matrix.support().len(), 1);
        let z4 = Ring::parse("Z/4").unwrap();
        let mu4 = matrix_unit_extract(&z4).unwrap();
        assert_eq!((mu4.row, mu4.col), (mu.row, mu.col));
        assert_eq!(mu4.scalar, z4.from_bigint(match &mu.scalar {
            Elem::Int(v) => v,
            _ => unreachable!(),
        }));
    }
}
