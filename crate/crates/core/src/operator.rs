//! Operators in L(l_p^n, l_p^m) for p in {1, inf}.
//!
//! For p = 1 the operator norm is the largest column l1 norm, so
//!
//! ```text
//! ||A + lambda B|| = max_j ||A e_j + lambda B e_j||_1 <= ||A|| + ||B||
//! ```
//!
//! with equality iff some column `j` is norming for both `A` and `B` and the
//! two columns satisfy the vector triangle equality at `lambda`. That is the
//! operative form of "there is x in M_A ∩ M_B with Ax ∥ Bx": a non-extreme
//! norming vector only mixes columns, and each column bound is saturated only
//! at a maximal column. Parallelism and TEA are therefore decided exactly by
//! looking at shared norming columns.
//!
//! For p = inf everything is reduced to p = 1 through the conjugate
//! transpose, which is an isometry L(l_inf^n, l_inf^m) -> L(l_1^m, l_1^n).
//! Since `(A + lambda B)^* = A^* + conj(lambda) B^*`, phases are conjugated on
//! the way back and column witnesses become row witnesses.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{Magnitude, Scalar, ScalarConfig};
use crate::vector::{self, PNorm, PhaseSet, Vector};

/// Default cap on the number of operators `enumerate_extreme_contractions` may produce.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 100_000;

/// An `m x n` matrix acting `l_p^n -> l_p^m`; column `j` is `A e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<S> {
    m: usize,
    n: usize,
    p: PNorm,
    /// Column-major.
    data: Vec<S>,
    config: ScalarConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Parallel,
    Tea,
}

/// Replayable certificate for a positive parallel/TEA verdict: `index` is a
/// column for p = 1 and a row for p = inf.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelWitness<S> {
    pub index: usize,
    pub phase: S,
    pub kind: WitnessKind,
    pub p: PNorm,
}

/// Result of [`OperatorMatrix::feasible_phases`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPhases<S> {
    pub phases: PhaseSet<S>,
    /// One witness per shared norming column (row for p = inf) with a
    /// nonempty phase set, in index order.
    pub witnesses: Vec<ParallelWitness<S>>,
    /// Indices norming for both operators.
    pub shared_norming: Vec<usize>,
}

/// A boolean verdict plus, when positive, its witness.
#[derive(Debug, Clone, PartialEq)]
pub struct PairVerdict<S> {
    pub holds: bool,
    pub witness: Option<ParallelWitness<S>>,
    pub reason: String,
}

impl<S: Scalar> OperatorMatrix<S> {
    /// Builds from column-major data.
    pub fn from_col_major(
        m: usize,
        n: usize,
        p: PNorm,
        data: Vec<S>,
        config: ScalarConfig,
    ) -> Result<Self> {
        config.check_for::<S>()?;
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!("operator shape {m}x{n}")));
        }
        if data.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {m}x{n} operator",
                data.len()
            )));
        }
        Ok(OperatorMatrix { m, n, p, data, config })
    }

    pub fn from_rows(rows: Vec<Vec<S>>, p: PNorm, config: ScalarConfig) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(m * n);
        for j in 0..n {
            for row in &rows {
                data.push(row[j].clone());
            }
        }
        Self::from_col_major(m, n, p, data, config)
    }

    pub fn from_i64_rows(rows: &[&[i64]], p: PNorm, config: ScalarConfig) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
            p,
            config,
        )
    }

    pub fn zeros(m: usize, n: usize, p: PNorm, config: ScalarConfig) -> Result<Self> {
        Self::from_col_major(m, n, p, vec![S::zero(); m * n], config)
    }

    /// `E_ij` (0-based): maps `e_j` to the `i`-th basis vector and the other
    /// basis vectors to zero.
    pub fn basis(i: usize, j: usize, m: usize, n: usize, p: PNorm, config: ScalarConfig) -> Result<Self> {
        if i >= m || j >= n {
            return Err(Error::IndexOutOfRange(format!(
                "E_({i},{j}) in a {m}x{n} operator space"
            )));
        }
        let mut e = Self::zeros(m, n, p, config)?;
        e.data[j * m + i] = S::one();
        Ok(e)
    }

    /// Rebuilds an operator from its column-major vectorization.
    pub fn from_vec(m: usize, n: usize, p: PNorm, config: ScalarConfig, v: Vec<S>) -> Result<Self> {
        Self::from_col_major(m, n, p, v, config)
    }

    pub fn rows(&self) -> usize {
        self.m
    }
    pub fn cols(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> PNorm {
        self.p
    }
    pub fn config(&self) -> &ScalarConfig {
        &self.config
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[j * self.m + i]
    }

    pub fn column(&self, j: usize) -> &[S] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        (0..self.n).map(|j| self.get(i, j).clone()).collect()
    }

    /// Column-major vectorization (columns of the matrix stacked in order).
    pub fn vec(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn with_p(mut self, p: PNorm) -> Self {
        self.p = p;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "operators of shape {}x{} and {}x{}",
                self.m, self.n, other.m, other.n
            )));
        }
        if self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "operators on l_{} and l_{}",
                self.p, other.p
            )));
        }
        if self.config != other.config {
            return Err(Error::ConfigMismatch("operators carry different configurations".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, alpha: &S) -> Self {
        self.map_entries(|x| alpha.clone() * x.clone())
    }

    fn map_entries(&self, f: impl Fn(&S) -> S) -> Self {
        OperatorMatrix {
            data: self.data.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: &S, other: &Self, beta: &S) -> Result<Self> {
        self.same_space(other)?;
        Ok(OperatorMatrix {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha.clone() * a.clone() + beta.clone() * b.clone())
                .collect(),
            ..self.clone()
        })
    }

    /// Dense matrix product `self * other` (shapes must chain).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.m {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.m, self.n, other.m, other.n
            )));
        }
        let mut data = Vec::with_capacity(self.m * other.n);
        for j in 0..other.n {
            for i in 0..self.m {
                let mut acc = S::zero();
                for k in 0..self.n {
                    acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
                }
                data.push(acc);
            }
        }
        Self::from_col_major(self.m, other.n, self.p, data, self.config)
    }

    pub fn apply_vec(&self, x: &Vector<S>) -> Result<Vector<S>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}x{} operator",
                x.len(),
                self.m,
                self.n
            )));
        }
        let out = (0..self.m)
            .map(|i| {
                x.entries()
                    .iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (j, xj)| acc + self.get(i, j).clone() * xj.clone())
            })
            .collect();
        Vector::new(out, self.config)
    }

    /// `n x m` conjugate transpose with p swapped `1 <-> inf`.
    pub fn conj_transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.m * self.n);
        // Column i of the adjoint is the conjugated row i.
        for i in 0..self.m {
            for j in 0..self.n {
                data.push(self.get(i, j).conj());
            }
        }
        OperatorMatrix {
            m: self.n,
            n: self.m,
            p: self.p.dual(),
            data,
            config: self.config,
        }
    }

    fn column_norms(&self) -> Vec<S::Mag> {
        (0..self.n).map(|j| vector::norm(self.column(j), PNorm::One)).collect()
    }

    /// Operator norm: max column l1 norm (p = 1) or max row l1 norm (p = inf).
    pub fn norm(&self) -> S::Mag {
        match self.p {
            PNorm::One => self
                .column_norms()
                .into_iter()
                .fold(S::Mag::zero_mag(), S::Mag::max_of),
            PNorm::Inf => (0..self.m)
                .map(|i| vector::norm(&self.row(i), PNorm::One))
                .fold(S::Mag::zero_mag(), S::Mag::max_of),
        }
    }

    /// Columns `j` with `||A e_j||_1 = ||A||` (float: `>= (1 - norm_tol) ||A||`).
    /// Only defined for p = 1.
    pub fn norming_extreme_columns(&self) -> Result<Vec<usize>> {
        if self.p != PNorm::One {
            return Err(Error::Unsupported(
                "norming columns are defined for p = 1; use the conjugate transpose".into(),
            ));
        }
        if self.is_zero() {
            return Err(Error::ZeroOperator);
        }
        Ok(self.norming_columns_unchecked())
    }

    fn norming_columns_unchecked(&self) -> Vec<usize> {
        let norms = self.column_norms();
        let max = norms.iter().cloned().fold(S::Mag::zero_mag(), S::Mag::max_of);
        norms
            .iter()
            .enumerate()
            .filter(|(_, c)| c.attains(&max, self.config.norm_tol))
            .map(|(j, _)| j)
            .collect()
    }

    /// Per-column phase sets for p = 1 (or for the adjoints when p = inf),
    /// indexed like the shared norming columns.
    fn column_phase_sets(a: &Self, b: &Self) -> (Vec<usize>, Vec<PhaseSet<S>>, bool) {
        let cfg = &a.config;
        match (a.is_zero(), b.is_zero()) {
            (true, true) => (vec![0], vec![PhaseSet::All], true),
            (true, false) | (false, true) => {
                let nz = if a.is_zero() { b } else { a };
                let cols = nz.norming_columns_unchecked();
                let sets = vec![PhaseSet::All; cols.len()];
                (cols, sets, true)
            }
            (false, false) => {
                let ja = a.norming_columns_unchecked();
                let jb = b.norming_columns_unchecked();
                let shared: Vec<usize> = ja.into_iter().filter(|j| jb.contains(j)).collect();
                let sets = shared
                    .iter()
                    .map(|&j| vector::feasible_phases(a.column(j), b.column(j), PNorm::One, cfg))
                    .collect();
                (shared, sets, false)
            }
        }
    }

    /// The exact set of unimodular `lambda` with `||A + lambda B|| = ||A|| + ||B||`,
    /// with one witness per contributing column (row for p = inf).
    pub fn feasible_phases(&self, other: &Self) -> Result<OperatorPhases<S>> {
        self.same_space(other)?;
        let cfg = self.config;
        let (shared, mut sets, any_zero) = match self.p {
            PNorm::One => Self::column_phase_sets(self, other),
            PNorm::Inf => {
                let (a, b) = (self.conj_transpose(), other.conj_transpose());
                let (shared, sets, z) = Self::column_phase_sets(&a, &b);
                let sets = sets.into_iter().map(|s| s.map(&cfg, S::conj)).collect();
                (shared, sets, z)
            }
        };
        let witnesses = shared
            .iter()
            .zip(&sets)
            .filter_map(|(&j, set)| {
                set.representative().map(|phase| ParallelWitness {
                    index: j,
                    phase,
                    kind: WitnessKind::Parallel,
                    p: self.p,
                })
            })
            .collect();
        let phases = if any_zero {
            PhaseSet::All
        } else {
            sets.drain(..)
                .fold(PhaseSet::Empty, |acc, s| acc.union(s, &cfg))
        };
        Ok(OperatorPhases { phases, witnesses, shared_norming: shared })
    }

    fn no_witness_reason(&self, ph: &OperatorPhases<S>, tea: bool) -> String {
        let axis = match self.p {
            PNorm::One => "column",
            PNorm::Inf => "row",
        };
        if ph.shared_norming.is_empty() {
            format!("no shared norming {axis}")
        } else if tea {
            format!("no shared norming {axis} attains the triangle equality at phase 1")
        } else {
            format!("phase demands conflict on every shared norming {axis}")
        }
    }

    pub fn parallel(&self, other: &Self) -> Result<PairVerdict<S>> {
        let ph = self.feasible_phases(other)?;
        let witness = ph.witnesses.first().cloned();
        Ok(match witness {
            Some(w) => PairVerdict {
                holds: true,
                witness: Some(w),
                reason: "shared norming index attains the triangle equality".into(),
            },
            None => PairVerdict {
                holds: false,
                witness: None,
                reason: self.no_witness_reason(&ph, false),
            },
        })
    }

    pub fn tea(&self, other: &Self) -> Result<PairVerdict<S>> {
        let cfg = self.config;
        let ph = self.feasible_phases(other)?;
        // Witnesses carry the representative phase; re-test each column for 1.
        let (shared, sets, _) = match self.p {
            PNorm::One => Self::column_phase_sets(self, other),
            PNorm::Inf => {
                let (a, b) = (self.conj_transpose(), other.conj_transpose());
                Self::column_phase_sets(&a, &b)
            }
        };
        let hit = shared
            .iter()
            .zip(&sets)
            .find(|(_, s)| s.contains_one(&cfg))
            .map(|(&j, _)| ParallelWitness {
                index: j,
                phase: S::one(),
                kind: WitnessKind::Tea,
                p: self.p,
            });
        Ok(match hit {
            Some(w) => PairVerdict {
                holds: true,
                witness: Some(w),
                reason: "shared norming index attains the triangle equality at phase 1".into(),
            },
            None => PairVerdict {
                holds: false,
                witness: None,
                reason: self.no_witness_reason(&ph, true),
            },
        })
    }

    pub fn is_parallel(&self, other: &Self) -> Result<bool> {
        Ok(!self.feasible_phases(other)?.phases.is_empty())
    }

    pub fn is_tea(&self, other: &Self) -> Result<bool> {
        Ok(self.tea(other)?.holds)
    }

    /// Extreme point of the unit ball of the operator space: every column is a
    /// unimodular multiple of a basis vector (p = 1; rows for p = inf).
    pub fn is_extreme_contraction(&self) -> bool {
        match self.p {
            PNorm::One => (0..self.n)
                .all(|j| vector::is_extreme(self.column(j), PNorm::One, &self.config)),
            PNorm::Inf => self.conj_transpose().is_extreme_contraction(),
        }
    }

    /// Smooth point of the operator space: a unique norming column whose
    /// entries are all nonzero (p = 1; adjoint for p = inf).
    pub fn is_smooth(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroOperator);
        }
        match self.p {
            PNorm::One => {
                let cols = self.norming_columns_unchecked();
                if cols.len() != 1 {
                    return Ok(false);
                }
                let col = self.column(cols[0]);
                let n = vector::norm(col, PNorm::One);
                Ok(col
                    .iter()
                    .all(|c| !c.modulus().negligible(&n, self.config.norm_tol)))
            }
            PNorm::Inf => self.conj_transpose().is_smooth(),
        }
    }

    /// Checks the witness reproduces `||A e_j + lambda B e_j||_1 = ||A|| + ||B||`
    /// (rows for p = inf).
    pub fn replay_witness(&self, other: &Self, w: &ParallelWitness<S>) -> Result<bool> {
        self.same_space(other)?;
        let (xa, xb) = match self.p {
            PNorm::One => {
                if w.index >= self.n {
                    return Ok(false);
                }
                (self.column(w.index).to_vec(), other.column(w.index).to_vec())
            }
            PNorm::Inf => {
                if w.index >= self.m {
                    return Ok(false);
                }
                (self.row(w.index), other.row(w.index))
            }
        };
        let sum: Vec<S> = xa
            .iter()
            .zip(&xb)
            .map(|(a, b)| a.clone() + w.phase.clone() * b.clone())
            .collect();
        let lhs = vector::norm(&sum, PNorm::One);
        let rhs = self.norm() + other.norm();
        Ok(lhs.approx_eq(&rhs, self.config.norm_tol))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.m)
            .map(|i| Value::Array((0..self.n).map(|j| self.get(i, j).to_json()).collect()))
            .collect();
        json!({
            "m": self.m,
            "n": self.n,
            "p": self.p,
            "field": S::FIELD,
            "mode": S::MODE,
            "data": rows,
        })
    }
}

impl<S: Scalar> ParallelWitness<S> {
    pub fn to_json(&self) -> Value {
        let axis = match self.p {
            PNorm::One => "column",
            PNorm::Inf => "row",
        };
        json!({
            (axis): self.index,
            "phase": self.phase.phase_json(),
            "kind": match self.kind { WitnessKind::Parallel => "parallel", WitnessKind::Tea => "tea" },
        })
    }
}

impl<S: Scalar> OperatorPhases<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "phases": self.phases.to_json(),
            "witnesses": self.witnesses.iter().map(ParallelWitness::to_json).collect::<Vec<_>>(),
            "shared_norming": self.shared_norming,
        })
    }
}

impl<S: Scalar> PairVerdict<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "witness": self.witness.as_ref().map(ParallelWitness::to_json),
            "reason": self.reason,
        })
    }
}

/// Number of extreme contractions of L(l_1^n, l_1^m) over the reals: `(2m)^n`.
pub fn extreme_contraction_count(m: usize, n: usize) -> Option<usize> {
    (2 * m).checked_pow(n.try_into().ok()?)
}

/// All real extreme contractions in a deterministic order.
///
/// For p = 1 each column is one of `+e_1, -e_1, +e_2, -e_2, ...`; operators are
/// listed lexicographically with column 0 most significant. For p = inf the
/// same is done for rows (the adjoint enumeration), giving `(2n)^m` operators.
pub fn enumerate_extreme_contractions<S: Scalar>(
    m: usize,
    n: usize,
    p: PNorm,
    config: ScalarConfig,
    budget: usize,
) -> Result<Vec<OperatorMatrix<S>>> {
    config.check_for::<S>()?;
    if S::FIELD != crate::scalar::Field::Real {
        return Err(Error::Unsupported(
            "extreme contractions are only enumerable over the real field".into(),
        ));
    }
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("operator shape {m}x{n}")));
    }
    if p == PNorm::Inf {
        return Ok(enumerate_extreme_contractions::<S>(n, m, PNorm::One, config, budget)?
            .iter()
            .map(OperatorMatrix::conj_transpose)
            .collect());
    }
    signed_basis_contractions(m, n, config, budget)
}

/// Operators whose columns are signed standard basis vectors (p = 1). These
/// are extreme contractions over either field.
pub(crate) fn signed_basis_contractions<S: Scalar>(
    m: usize,
    n: usize,
    config: ScalarConfig,
    budget: usize,
) -> Result<Vec<OperatorMatrix<S>>> {
    let count = extreme_contraction_count(m, n)
        .filter(|&c| c <= budget)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "(2*{m})^{n} extreme contractions exceed the budget of {budget}"
            ))
        })?;
    let choices = 2 * m;
    let mut out = Vec::with_capacity(count);
    for code in 0..count {
        let mut data = vec![S::zero(); m * n];
        let mut rest = code;
        for j in (0..n).rev() {
            let c = rest % choices;
            rest /= choices;
            let (row, neg) = (c / 2, c % 2 == 1);
            data[j * m + row] = if neg { -S::one() } else { S::one() };
        }
        out.push(OperatorMatrix::from_col_major(m, n, PNorm::One, data, config)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, Rational};

    type Q = Rational;

    fn q(rows: &[&[i64]]) -> OperatorMatrix<Q> {
        OperatorMatrix::from_i64_rows(rows, PNorm::One, ScalarConfig::exact()).unwrap()
    }

    fn e(i: usize, j: usize) -> OperatorMatrix<Q> {
        OperatorMatrix::basis(i, j, 2, 2, PNorm::One, ScalarConfig::exact()).unwrap()
    }

    fn half() -> Q {
        Q::new(1.into(), 2.into())
    }

    #[test]
    fn norms() {
        assert_eq!(q(&[&[1, 0], &[0, 1]]).norm(), Q::from_i64(1));
        let a = q(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.norm(), Q::from_i64(6));
        assert_eq!(a.clone().with_p(PNorm::Inf).norm(), Q::from_i64(7));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(e(i, j).norm(), Q::from_i64(1));
                assert_eq!(e(i, j).with_p(PNorm::Inf).norm(), Q::from_i64(1));
            }
        }
    }

    /// Oracle: maximise ||Ax|| over the signed vertices of the l1 ball.
    #[test]
    fn norm_matches_vertex_maximum() {
        let a = q(&[&[1, 2], &[3, 4]]);
        let mut best = Q::from_i64(0);
        for j in 0..2 {
            for s in [1i64, -1] {
                let mut x = vec![Q::from_i64(0); 2];
                x[j] = Q::from_i64(s);
                let ax = a.apply_vec(&Vector::new(x, ScalarConfig::exact()).unwrap()).unwrap();
                best = Magnitude::max_of(best, ax.norm(PNorm::One));
            }
        }
        assert_eq!(best, Q::from_i64(6));
    }

    #[test]
    fn norming_columns() {
        assert_eq!(q(&[&[1, 0], &[0, 1]]).norming_extreme_columns().unwrap(), vec![0, 1]);
        assert_eq!(q(&[&[1, 2], &[3, 4]]).norming_extreme_columns().unwrap(), vec![1]);
        let tie = OperatorMatrix::from_rows(
            vec![vec![half(), Q::from_i64(1)], vec![half(), Q::from_i64(0)]],
            PNorm::One,
            ScalarConfig::exact(),
        )
        .unwrap();
        assert_eq!(tie.norming_extreme_columns().unwrap(), vec![0, 1]);
        assert_eq!(q(&[&[0, 0]]).norming_extreme_columns(), Err(Error::ZeroOperator));
        assert!(matches!(
            q(&[&[1]]).with_p(PNorm::Inf).norming_extreme_columns(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn e11_e21_all_phases() {
        let ph = e(0, 0).feasible_phases(&e(1, 0)).unwrap();
        assert_eq!(ph.phases, PhaseSet::All);
        assert!(e(0, 0).is_parallel(&e(1, 0)).unwrap());
        assert!(e(0, 0).is_tea(&e(1, 0)).unwrap());
    }

    #[test]
    fn e11_e12_empty() {
        let v = e(0, 0).parallel(&e(0, 1)).unwrap();
        assert!(!v.holds);
        assert_eq!(v.reason, "no shared norming column");
        assert!(!e(0, 0).is_tea(&e(0, 1)).unwrap());
    }

    #[test]
    fn forced_minus_one() {
        let a = OperatorMatrix::from_rows(
            vec![vec![Q::from_i64(1), Q::from_i64(0)], vec![Q::from_i64(0), half()]],
            PNorm::One,
            ScalarConfig::exact(),
        )
        .unwrap();
        let b = OperatorMatrix::from_rows(
            vec![vec![Q::from_i64(-1), Q::from_i64(0)], vec![Q::from_i64(0), half()]],
            PNorm::One,
            ScalarConfig::exact(),
        )
        .unwrap();
        let ph = a.feasible_phases(&b).unwrap();
        assert_eq!(ph.phases, PhaseSet::Finite(vec![Q::from_i64(-1)]));
        let par = a.parallel(&b).unwrap();
        assert!(par.holds);
        let w = par.witness.unwrap();
        assert_eq!((w.index, w.phase.clone()), (0, Q::from_i64(-1)));
        assert!(a.replay_witness(&b, &w).unwrap());
        assert!(!a.is_tea(&b).unwrap());
        // Column formula by hand: ||A - B|| = 2 = ||A|| + ||B||; ||A + B|| = 1.
        assert_eq!(a.combine(&Q::from_i64(1), &b, &Q::from_i64(-1)).unwrap().norm(), Q::from_i64(2));
        assert_eq!(a.combine(&Q::from_i64(1), &b, &Q::from_i64(1)).unwrap().norm(), Q::from_i64(1));
    }

    #[test]
    fn zero_operator_is_parallel_to_everything() {
        let z = q(&[&[0, 0], &[0, 0]]);
        let a = q(&[&[1, 2], &[3, 4]]);
        let v = z.tea(&a).unwrap();
        assert!(v.holds);
        assert!(z.replay_witness(&a, &v.witness.unwrap()).unwrap());
        assert_eq!(a.feasible_phases(&z).unwrap().phases, PhaseSet::All);
    }

    #[test]
    fn shape_and_p_mismatches() {
        let a = q(&[&[1, 2], &[3, 4]]);
        assert!(matches!(a.is_parallel(&q(&[&[1, 2]])), Err(Error::DimensionMismatch(_))));
        let b = a.clone().with_p(PNorm::Inf);
        assert!(matches!(a.is_parallel(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn extreme_contractions() {
        assert!(q(&[&[1, 0], &[0, -1]]).is_extreme_contraction());
        let h = OperatorMatrix::from_rows(
            vec![vec![half(), Q::from_i64(1)], vec![half(), Q::from_i64(0)]],
            PNorm::One,
            ScalarConfig::exact(),
        )
        .unwrap();
        assert!(!h.is_extreme_contraction());
        // Rows are signed basis vectors, columns are not.
        let r = q(&[&[1, 0], &[1, 0]]);
        assert!(!r.is_extreme_contraction());
        assert!(r.clone().with_p(PNorm::Inf).is_extreme_contraction());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let cfg = ScalarConfig::exact();
        let all = enumerate_extreme_contractions::<Q>(2, 2, PNorm::One, cfg, 1000).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all.iter().all(OperatorMatrix::is_extreme_contraction));
        assert_eq!(all[0], q(&[&[1, 1], &[0, 0]]));
        assert_eq!(all[1], q(&[&[1, -1], &[0, 0]]));
        for (k, a) in all.iter().enumerate() {
            assert!(!all[k + 1..].contains(a));
        }
        assert_eq!(
            enumerate_extreme_contractions::<Q>(2, 1, PNorm::One, cfg, 1000).unwrap().len(),
            4
        );
        let inf = enumerate_extreme_contractions::<Q>(2, 3, PNorm::Inf, cfg, 1000).unwrap();
        assert_eq!(inf.len(), 36);
        assert!(inf.iter().all(|a| a.p() == PNorm::Inf && a.is_extreme_contraction()));
        assert!(matches!(
            enumerate_extreme_contractions::<Q>(3, 3, PNorm::One, cfg, 100),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(enumerate_extreme_contractions::<Complex64>(
            2,
            2,
            PNorm::One,
            ScalarConfig::complex_float(),
            100
        )
        .is_err());
    }

    #[test]
    fn smooth_operators() {
        let cfg = ScalarConfig::real_float();
        let a = OperatorMatrix::<f64>::from_rows(vec![vec![0.9, 0.3], vec![0.1, 0.3]], PNorm::One, cfg)
            .unwrap();
        assert!(a.is_smooth().unwrap());
        assert!(!q(&[&[1, 0], &[0, 1]]).is_smooth().unwrap());
        assert!(!OperatorMatrix::<f64>::from_rows(vec![vec![1.0, 0.3], vec![0.0, 0.3]], PNorm::One, cfg)
            .unwrap()
            .is_smooth()
            .unwrap());
        assert_eq!(q(&[&[0, 0]]).is_smooth(), Err(Error::ZeroOperator));
    }

    #[test]
    fn conj_transpose_examples() {
        let a = q(&[&[1, 2], &[3, 4]]).with_p(PNorm::Inf);
        let t = a.conj_transpose();
        assert_eq!(t, q(&[&[1, 3], &[2, 4]]));
        assert_eq!(t.p(), PNorm::One);
        assert_eq!(a.norm(), Q::from_i64(7));
        assert_eq!(t.norm(), Q::from_i64(7));
        assert_eq!(t.conj_transpose(), a);
        let c = OperatorMatrix::from_rows(
            vec![vec![Complex64::new(0.0, 1.0)]],
            PNorm::One,
            ScalarConfig::complex_float(),
        )
        .unwrap();
        assert_eq!(*c.conj_transpose().get(0, 0), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn basis_operators() {
        let cfg = ScalarConfig::exact();
        let e12 = OperatorMatrix::<Q>::basis(0, 1, 2, 2, PNorm::One, cfg).unwrap();
        let e2 = Vector::basis(1, 2, cfg).unwrap();
        let e1 = Vector::basis(0, 2, cfg).unwrap();
        assert_eq!(e12.apply_vec(&e2).unwrap(), Vector::basis(0, 2, cfg).unwrap());
        assert!(e12.apply_vec(&e1).unwrap().is_zero());
        assert!(matches!(
            OperatorMatrix::<Q>::basis(2, 0, 2, 2, PNorm::One, cfg),
            Err(Error::IndexOutOfRange(_))
        ));
        // Vectorizations of all E_ij form the standard basis of F^{mn}.
        let (m, n) = (2, 3);
        let mut stack = Vec::new();
        for j in 0..n {
            for i in 0..m {
                stack.extend_from_slice(
                    OperatorMatrix::<Q>::basis(i, j, m, n, PNorm::One, cfg).unwrap().vec(),
                );
            }
        }
        assert_eq!(Q::matrix_rank(&stack, m * n, m * n, 0.0), m * n);
        for k in 0..m * n {
            assert_eq!(stack[k * m * n + k], Q::from_i64(1));
        }
    }

    #[test]
    fn linf_witness_is_a_row() {
        // Row 1 is norming for both and aligned.
        let a = q(&[&[1, 0], &[2, 1]]).with_p(PNorm::Inf);
        let b = q(&[&[0, 1], &[1, 1]]).with_p(PNorm::Inf);
        let v = a.tea(&b).unwrap();
        assert!(v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.index, 1);
        assert!(a.replay_witness(&b, &w).unwrap());
    }
}
