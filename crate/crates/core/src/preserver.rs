//! Linear maps on the operator space L(l_p^n, l_p^m).
//!
//! A [`PreserverMap`] is stored as an `(mn) x (mn)` matrix acting on
//! column-major vectorizations: `vec(A)` stacks the columns of `A` in order,
//! so `E_ij` (0-based) is basis vector `j * m + i`.
//!
//! Preservation and isometry verdicts are sample-level: a violation is a
//! replayable counterexample, a pass only says that no violation was found
//! within the recorded budget and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generate::{self, derive_seed};
use crate::operator::{self, OperatorMatrix};
use crate::scalar::{Magnitude, Scalar, ScalarConfig, DEFAULT_RANK_TOL};
use crate::vector::PNorm;

/// Trials per shard when sampling is split across workers. Fixed so that
/// results do not depend on the thread count.
const SHARD_TRIALS: usize = 250;
/// Largest extreme-contraction set used in batteries and isometry checks.
pub const EXTREME_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct PreserverMap<S> {
    m: usize,
    n: usize,
    p: PNorm,
    config: ScalarConfig,
    /// Row-major `(mn) x (mn)`.
    matrix: Vec<S>,
}

impl<S: Scalar> PreserverMap<S> {
    pub fn new(m: usize, n: usize, p: PNorm, config: ScalarConfig, matrix: Vec<S>) -> Result<Self> {
        config.check_for::<S>()?;
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!("operator shape {m}x{n}")));
        }
        let d = m * n;
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "super-operator needs {d}x{d} entries, got {}",
                matrix.len()
            )));
        }
        Ok(PreserverMap { m, n, p, config, matrix })
    }

    pub fn from_rows(m: usize, n: usize, p: PNorm, config: ScalarConfig, rows: Vec<Vec<S>>) -> Result<Self> {
        let d = m * n;
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "super-operator for {m}x{n} operators must be {d}x{d}"
            )));
        }
        Self::new(m, n, p, config, rows.into_iter().flatten().collect())
    }

    /// The map whose action on each basis operator `E_ij` is `f(E_ij)`.
    pub fn from_fn(
        m: usize,
        n: usize,
        p: PNorm,
        config: ScalarConfig,
        f: impl Fn(&OperatorMatrix<S>) -> Result<OperatorMatrix<S>>,
    ) -> Result<Self> {
        let d = m * n;
        let mut matrix = vec![S::zero(); d * d];
        for j in 0..n {
            for i in 0..m {
                let col = j * m + i;
                let image = f(&OperatorMatrix::basis(i, j, m, n, p, config)?)?;
                if image.rows() != m || image.cols() != n {
                    return Err(Error::DimensionMismatch("map changes the operator shape".into()));
                }
                for (row, v) in image.vec().iter().enumerate() {
                    matrix[row * d + col] = v.clone();
                }
            }
        }
        Self::new(m, n, p, config, matrix)
    }

    pub fn identity(m: usize, n: usize, p: PNorm, config: ScalarConfig) -> Result<Self> {
        Self::scalar(m, n, p, config, S::one())
    }

    pub fn scalar(m: usize, n: usize, p: PNorm, config: ScalarConfig, c: S) -> Result<Self> {
        let d = m * n;
        let mut matrix = vec![S::zero(); d * d];
        for k in 0..d {
            matrix[k * d + k] = c.clone();
        }
        Self::new(m, n, p, config, matrix)
    }

    pub fn zero(m: usize, n: usize, p: PNorm, config: ScalarConfig) -> Result<Self> {
        let d = m * n;
        Self::new(m, n, p, config, vec![S::zero(); d * d])
    }

    /// `X -> phi(X) B0` with `phi(X) = sum_k phi_k vec(X)_k`.
    pub fn rank_one(b0: &OperatorMatrix<S>, phi: &[S]) -> Result<Self> {
        let d = b0.rows() * b0.cols();
        if phi.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "functional of length {} on a {d}-dimensional space",
                phi.len()
            )));
        }
        let matrix = b0
            .vec()
            .iter()
            .flat_map(|b| phi.iter().map(move |f| b.clone() * f.clone()))
            .collect();
        Self::new(b0.rows(), b0.cols(), b0.p(), *b0.config(), matrix)
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
    pub fn dim(&self) -> usize {
        self.m * self.n
    }
    pub fn matrix(&self) -> &[S] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> &S {
        &self.matrix[row * self.dim() + col]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(Scalar::is_zero)
    }

    fn check_operator(&self, a: &OperatorMatrix<S>) -> Result<()> {
        if a.rows() != self.m || a.cols() != self.n || a.p() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "map on {}x{} l_{} operators applied to a {}x{} l_{} operator",
                self.m,
                self.n,
                self.p,
                a.rows(),
                a.cols(),
                a.p()
            )));
        }
        if *a.config() != self.config {
            return Err(Error::ConfigMismatch("operator and map configurations differ".into()));
        }
        Ok(())
    }

    /// `devec(matrix * vec(A))`.
    pub fn apply(&self, a: &OperatorMatrix<S>) -> Result<OperatorMatrix<S>> {
        self.check_operator(a)?;
        let d = self.dim();
        let x = a.vec();
        let out = self
            .matrix
            .chunks(d)
            .map(|row| S::dot(row, x))
            .collect();
        OperatorMatrix::from_vec(self.m, self.n, self.p, self.config, out)
    }

    pub fn rank(&self) -> usize {
        self.rank_with_tol(DEFAULT_RANK_TOL)
    }

    /// Exact in rational mode; in float mode, singular values above
    /// `rank_tol` times the largest.
    pub fn rank_with_tol(&self, rank_tol: f64) -> usize {
        S::matrix_rank(&self.matrix, self.dim(), self.dim(), rank_tol)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.dim()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.n != other.n || self.p != other.p {
            return Err(Error::DimensionMismatch("maps act on different spaces".into()));
        }
        if self.config != other.config {
            return Err(Error::ConfigMismatch("maps carry different configurations".into()));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.dim();
        let mut matrix = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = S::zero();
                for k in 0..d {
                    acc = acc + self.entry(r, k).clone() * other.entry(k, c).clone();
                }
                matrix.push(acc);
            }
        }
        Self::new(self.m, self.n, self.p, self.config, matrix)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: &S, other: &Self, beta: &S) -> Result<Self> {
        self.check_same(other)?;
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| alpha.clone() * a.clone() + beta.clone() * b.clone())
            .collect();
        Self::new(self.m, self.n, self.p, self.config, matrix)
    }

    /// The adjoint-conjugated map `A -> (T(A^*))^*` on `n x m` operators with
    /// the dual exponent. Preservation properties transfer both ways.
    pub fn dual(&self) -> Result<Self> {
        PreserverMap::from_fn(self.n, self.m, self.p.dual(), self.config, |a| {
            Ok(self.apply(&a.conj_transpose())?.conj_transpose())
        })
    }

    /// For a rank-one map `X -> phi(X) B0`, a functional proportional to `phi`.
    pub fn row_functional(&self) -> Option<Vec<S>> {
        if self.rank() != 1 {
            return None;
        }
        self.matrix
            .chunks(self.dim())
            .find(|row| row.iter().any(|v| !v.is_zero()))
            .map(<[S]>::to_vec)
    }

    pub fn to_json(&self) -> Value {
        let d = self.dim();
        let rows: Vec<Value> = self
            .matrix
            .chunks(d)
            .map(|r| Value::Array(r.iter().map(Scalar::to_json).collect()))
            .collect();
        json!({
            "m": self.m,
            "n": self.n,
            "p": self.p,
            "field": S::FIELD,
            "mode": S::MODE,
            "vec": "col-major",
            "matrix": rows,
        })
    }
}

/// Square operator with exactly one nonzero entry per row and column, each
/// of modulus one (over the reals: a signed permutation matrix).
pub fn is_unimodular_permutation<S: Scalar>(u: &OperatorMatrix<S>) -> bool {
    let k = u.rows();
    if u.cols() != k {
        return false;
    }
    let cfg = u.config();
    let unit_rows = (0..k).all(|i| {
        let row = u.row(i);
        row.iter().filter(|v| !v.is_zero()).count() == 1
            && row.iter().filter(|v| !v.is_zero()).all(|v| v.is_unimodular(cfg))
    });
    let unit_cols = (0..k).all(|j| u.column(j).iter().filter(|v| !v.is_zero()).count() == 1);
    unit_rows && unit_cols
}

/// A uniformly random permutation matrix with random unimodular entries.
pub fn random_unimodular_permutation<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    p: PNorm,
    config: ScalarConfig,
) -> Result<OperatorMatrix<S>> {
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut data = vec![S::zero(); k * k];
    for (j, &i) in perm.iter().enumerate() {
        data[j * k + i] = S::random_unit(rng);
    }
    OperatorMatrix::from_col_major(k, k, p, data, config)
}

/// `A -> scale * U A V` for unimodular permutations `U` (`m x m`) and `V`
/// (`n x n`). Such `U`, `V` are isometries of both l1 and l-infinity, so the
/// map multiplies every operator norm by `|scale|` for either exponent.
pub fn make_isometry<S: Scalar>(
    u: &OperatorMatrix<S>,
    v: &OperatorMatrix<S>,
    scale: S,
) -> Result<PreserverMap<S>> {
    if !is_unimodular_permutation(u) {
        return Err(Error::NotUnimodularPermutation("U".into()));
    }
    if !is_unimodular_permutation(v) {
        return Err(Error::NotUnimodularPermutation("V".into()));
    }
    if scale.is_zero() {
        return Err(Error::InvalidConfig("isometry scale must be nonzero".into()));
    }
    if u.config() != v.config() || u.p() != v.p() {
        return Err(Error::ConfigMismatch("U and V differ in configuration or p".into()));
    }
    let (m, n) = (u.rows(), v.rows());
    PreserverMap::from_fn(m, n, u.p(), *u.config(), |a| {
        let ua = u.clone().with_p(a.p()).matmul(a)?;
        Ok(ua.matmul(&v.clone().with_p(a.p()))?.scaled(&scale))
    })
}

/// A failed preservation or isometry check, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<S> {
    pub a: OperatorMatrix<S>,
    pub b: Option<OperatorMatrix<S>>,
    pub image_a: OperatorMatrix<S>,
    pub image_b: Option<OperatorMatrix<S>>,
    pub explanation: String,
}

impl<S: Scalar> Counterexample<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a.to_json(),
            "b": self.b.as_ref().map(OperatorMatrix::to_json),
            "image_a": self.image_a.to_json(),
            "image_b": self.image_b.as_ref().map(OperatorMatrix::to_json),
            "explanation": self.explanation,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleVerdict<S> {
    /// No violation among `battery` structured pairs and `trials` random pairs.
    PassedSample { trials: usize, battery: usize, seed: u64 },
    Violated(Box<Counterexample<S>>),
}

impl<S: Scalar> SampleVerdict<S> {
    pub fn passed(&self) -> bool {
        matches!(self, SampleVerdict::PassedSample { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample<S>> {
        match self {
            SampleVerdict::Violated(c) => Some(c),
            SampleVerdict::PassedSample { .. } => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SampleVerdict::PassedSample { trials, battery, seed } => json!({
                "verdict": "passed-sample",
                "trials": trials,
                "battery": battery,
                "seed": seed,
            }),
            SampleVerdict::Violated(c) => json!({
                "verdict": "violated",
                "witness": c.to_json(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsometryVerdict<S: Scalar> {
    /// `||T(A)|| = constant * ||A||` held on every sampled operator and, when
    /// enumerable, on every extreme contraction.
    Certified { constant: S::Mag, samples: usize, extremes_checked: usize, seed: u64 },
    Violated { constant: S::Mag, witness: Box<Counterexample<S>> },
}

impl<S: Scalar> IsometryVerdict<S> {
    pub fn certified(&self) -> bool {
        matches!(self, IsometryVerdict::Certified { .. })
    }

    pub fn constant(&self) -> &S::Mag {
        match self {
            IsometryVerdict::Certified { constant, .. } | IsometryVerdict::Violated { constant, .. } => constant,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            IsometryVerdict::Certified { constant, samples, extremes_checked, seed } => json!({
                "verdict": "certified-sample",
                "constant": constant.mag_json(),
                "samples": samples,
                "extremes_checked": extremes_checked,
                "seed": seed,
            }),
            IsometryVerdict::Violated { constant, witness } => json!({
                "verdict": "violated",
                "constant": constant.mag_json(),
                "witness": witness.to_json(),
            }),
        }
    }
}

type Pair<S> = (OperatorMatrix<S>, OperatorMatrix<S>);

/// Builds pairs in the p = 1 shape of `t` and maps them to `t`'s space.
struct Battery<S> {
    m1: usize,
    n1: usize,
    config: ScalarConfig,
    dualize: bool,
    _s: std::marker::PhantomData<S>,
}

impl<S: Scalar> Battery<S> {
    fn for_map(t: &PreserverMap<S>) -> Self {
        let (m1, n1, dualize) = match t.p {
            PNorm::One => (t.m, t.n, false),
            PNorm::Inf => (t.n, t.m, true),
        };
        Battery { m1, n1, config: t.config, dualize, _s: std::marker::PhantomData }
    }

    fn e(&self, i: usize, j: usize) -> OperatorMatrix<S> {
        OperatorMatrix::basis(i, j, self.m1, self.n1, PNorm::One, self.config).expect("index in range")
    }

    fn finish(&self, pairs: Vec<Pair<S>>) -> Vec<Pair<S>> {
        if self.dualize {
            pairs
                .into_iter()
                .map(|(a, b)| (a.conj_transpose(), b.conj_transpose()))
                .collect()
        } else {
            pairs
        }
    }

    fn extremes(&self) -> Vec<OperatorMatrix<S>> {
        operator::signed_basis_contractions(self.m1, self.n1, self.config, EXTREME_BUDGET / 4)
            .unwrap_or_default()
    }

    fn add(x: &OperatorMatrix<S>, y: &OperatorMatrix<S>, beta: S) -> OperatorMatrix<S> {
        x.combine(&S::one(), y, &beta).expect("same space")
    }

    /// Pairs that are TEA by construction.
    fn tea_pairs(&self) -> Vec<Pair<S>> {
        let (m, n) = (self.m1, self.n1);
        let mut out = Vec::new();
        // Basis operators sharing a column; (E_ij, E_ij + s E_rj).
        for j in 0..n {
            for i in 0..m {
                for r in 0..m {
                    if r != i {
                        out.push((self.e(i, j), self.e(r, j)));
                        for s in [S::one(), -S::one()] {
                            out.push((self.e(i, j), Self::add(&self.e(i, j), &self.e(r, j), s)));
                        }
                    }
                }
            }
        }
        // (E_ij + Z, -E_ij + Z) with Z supported on another column k.
        for j in 0..n {
            for i in 0..m {
                for k in (0..n).filter(|&k| k != j) {
                    for r in 0..m {
                        let mut zs = vec![self.e(r, k)];
                        for r2 in (r + 1)..m {
                            for s in [S::one(), -S::one()] {
                                zs.push(Self::add(&self.e(r, k), &self.e(r2, k), s));
                            }
                        }
                        for z in zs {
                            out.push((
                                Self::add(&z, &self.e(i, j), S::one()),
                                Self::add(&z, &self.e(i, j), -S::one()),
                            ));
                        }
                    }
                }
            }
        }
        // Extreme contraction S and E_ij with S e_j = +e_i.
        for s_op in self.extremes() {
            for j in 0..n {
                for i in 0..m {
                    if *s_op.get(i, j) == S::one() {
                        out.push((s_op.clone(), self.e(i, j)));
                    }
                }
            }
        }
        out
    }

    /// Pairs that are parallel by construction.
    fn parallel_pairs(&self) -> Vec<Pair<S>> {
        let (m, n) = (self.m1, self.n1);
        let mut out = self.tea_pairs();
        // Every extreme contraction is parallel to every operator.
        let extremes = self.extremes();
        for (k, s_op) in extremes.iter().enumerate() {
            for j in 0..n {
                for i in 0..m {
                    out.push((s_op.clone(), self.e(i, j)));
                }
            }
            if let Some(next) = extremes.get(k + 1) {
                out.push((s_op.clone(), next.clone()));
            }
        }
        out
    }

    /// For a rank-one map with functional `phi`, a TEA pair whose images
    /// `phi(X) B0`, `phi(Y) B0` fail the triangle equality:
    /// `X = Z + E_ij`, `Y = Z - E_ij` with `(i, j)` maximising `|phi|` and
    /// `Z` on another column with `|phi(Z)| < |phi_ij|`.
    fn rank_one_targets(&self, phi_native: &[S]) -> Vec<Pair<S>> {
        let (m, n) = (self.m1, self.n1);
        if n < 2 {
            return Vec::new();
        }
        // phi in the p = 1 coordinates: phi1(X) = phi(X^*) conjugated, i.e.
        // coefficient of X_ij is conj(phi_native at the transposed slot).
        let phi: Vec<S> = if self.dualize {
            let (mt, _nt) = (n, m);
            let mut v = vec![S::zero(); m * n];
            for j in 0..n {
                for i in 0..m {
                    // X (m x n) <-> X^* (n x m) entry (j, i), vec index i * mt + j.
                    v[j * m + i] = phi_native[i * mt + j].conj();
                }
            }
            v
        } else {
            phi_native.to_vec()
        };
        let at = |i: usize, j: usize| &phi[j * m + i];
        let Some((bi, bj)) = (0..n)
            .flat_map(|j| (0..m).map(move |i| (i, j)))
            .max_by(|&(i, j), &(r, k)| {
                at(i, j).modulus().partial_cmp(&at(r, k).modulus()).expect("ordered")
            })
        else {
            return Vec::new();
        };
        let top = at(bi, bj).modulus();
        let mut out = Vec::new();
        for k in (0..n).filter(|&k| k != bj) {
            let z = if let Some(r) = (0..m).find(|&r| at(r, k).modulus() < top) {
                self.e(r, k)
            } else if m >= 2 {
                // All of column k has modulus |phi_ij|: cancel two entries.
                let mu = -(at(0, k).clone() * at(1, k).conj()).scale(&(S::Mag::from_ratio(1, 1) / (top.clone() * top.clone())));
                Self::add(&self.e(0, k), &self.e(1, k), mu)
            } else {
                continue;
            };
            out.push((
                Self::add(&z, &self.e(bi, bj), S::one()),
                Self::add(&z, &self.e(bi, bj), -S::one()),
            ));
        }
        out
    }
}

fn first_violation<S: Scalar>(
    t: &PreserverMap<S>,
    pairs: &[Pair<S>],
    image_ok: impl Fn(&OperatorMatrix<S>, &OperatorMatrix<S>) -> Result<bool> + Sync,
    label: &str,
) -> Result<Option<Counterexample<S>>> {
    pairs
        .par_iter()
        .map(|(a, b)| check_pair(t, a, b, &image_ok, label))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
        .unwrap_or(Ok(None))
}

fn check_pair<S: Scalar>(
    t: &PreserverMap<S>,
    a: &OperatorMatrix<S>,
    b: &OperatorMatrix<S>,
    image_ok: &impl Fn(&OperatorMatrix<S>, &OperatorMatrix<S>) -> Result<bool>,
    label: &str,
) -> Result<Option<Counterexample<S>>> {
    let ta = t.apply(a)?;
    let tb = t.apply(b)?;
    if image_ok(&ta, &tb)? {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        a: a.clone(),
        b: Some(b.clone()),
        image_a: ta,
        image_b: Some(tb),
        explanation: format!("A, B form a {label} pair but T(A), T(B) do not"),
    }))
}

/// Runs `trials` random checks in fixed-size shards with derived seeds and
/// returns the first violation in shard order.
fn sample_shards<S: Scalar>(
    trials: usize,
    seed: u64,
    check: impl Fn(&mut ChaCha8Rng) -> Result<Option<Counterexample<S>>> + Sync,
) -> Result<Option<Counterexample<S>>> {
    let shards = trials.div_ceil(SHARD_TRIALS);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, s as u64));
            let count = SHARD_TRIALS.min(trials - s * SHARD_TRIALS);
            for _ in 0..count {
                if let Some(c) = check(&mut rng)? {
                    return Ok(Some(c));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
        .unwrap_or(Ok(None))
}

/// Sample-level check that `T` maps parallel pairs to parallel pairs.
pub fn preserves_parallel<S: Scalar>(t: &PreserverMap<S>, trials: usize, seed: u64) -> Result<SampleVerdict<S>> {
    let battery = Battery::for_map(t);
    let pairs = battery.finish(battery.parallel_pairs());
    let para = |x: &OperatorMatrix<S>, y: &OperatorMatrix<S>| x.is_parallel(y);
    if let Some(c) = first_violation(t, &pairs, para, "parallel")? {
        return Ok(SampleVerdict::Violated(Box::new(c)));
    }
    let found = sample_shards(trials, seed, |rng| {
        let (a, b) = generate::gen_parallel_pair(rng, t.m, t.n, t.p, t.config)?;
        check_pair(t, &a, &b, &para, "parallel")
    })?;
    Ok(match found {
        Some(c) => SampleVerdict::Violated(Box::new(c)),
        None => SampleVerdict::PassedSample { trials, battery: pairs.len(), seed },
    })
}

/// Sample-level check that `T` maps TEA pairs to TEA pairs. Rank-one maps
/// are additionally probed with pairs targeted at their functional.
pub fn preserves_tea<S: Scalar>(t: &PreserverMap<S>, trials: usize, seed: u64) -> Result<SampleVerdict<S>> {
    let battery = Battery::for_map(t);
    let mut raw = Vec::new();
    if let Some(phi) = t.row_functional() {
        raw.extend(battery.rank_one_targets(&phi));
    }
    raw.extend(battery.tea_pairs());
    let pairs = battery.finish(raw);
    let tea = |x: &OperatorMatrix<S>, y: &OperatorMatrix<S>| x.is_tea(y);
    if let Some(c) = first_violation(t, &pairs, tea, "TEA")? {
        return Ok(SampleVerdict::Violated(Box::new(c)));
    }
    let found = sample_shards(trials, seed, |rng| {
        let (a, b) = generate::gen_tea_pair(rng, t.m, t.n, t.p, t.config)?;
        check_pair(t, &a, &b, &tea, "TEA")
    })?;
    Ok(match found {
        Some(c) => SampleVerdict::Violated(Box::new(c)),
        None => SampleVerdict::PassedSample { trials, battery: pairs.len(), seed },
    })
}

/// Sample-level check that `||T(A)|| = c ||A||` with `c = ||T(E_11)||`.
///
/// Over the reals (and when small enough) every extreme contraction `S` is
/// checked too, including that `T(S) / ||T(S)||` is again an extreme
/// contraction.
pub fn is_scalar_isometry<S: Scalar>(t: &PreserverMap<S>, samples: usize, seed: u64) -> Result<IsometryVerdict<S>> {
    if t.is_zero() {
        return Err(Error::ZeroMap);
    }
    let cfg = t.config;
    let e11 = OperatorMatrix::basis(0, 0, t.m, t.n, t.p, cfg)?;
    let t_e11 = t.apply(&e11)?;
    let c = t_e11.norm();
    let violated = |a: OperatorMatrix<S>, image: OperatorMatrix<S>, explanation: String| {
        Ok(IsometryVerdict::Violated {
            constant: c.clone(),
            witness: Box::new(Counterexample { a, b: None, image_a: image, image_b: None, explanation }),
        })
    };
    if c.is_zero_mag() {
        return violated(e11, t_e11, "T(E_11) = 0 although T is nonzero".into());
    }

    let check = |a: &OperatorMatrix<S>| -> Result<Option<Counterexample<S>>> {
        let ta = t.apply(a)?;
        let expected = c.clone() * a.norm();
        let got = ta.norm();
        if got.approx_eq(&expected, cfg.norm_tol) {
            return Ok(None);
        }
        Ok(Some(Counterexample {
            a: a.clone(),
            b: None,
            image_a: ta,
            image_b: None,
            explanation: format!(
                "||T(A)|| = {} but c ||A|| = {}",
                got.to_f64(),
                expected.to_f64()
            ),
        }))
    };

    let mut extremes_checked = 0;
    if S::FIELD == crate::scalar::Field::Real {
        if let Ok(extremes) = operator::enumerate_extreme_contractions::<S>(t.m, t.n, t.p, cfg, EXTREME_BUDGET) {
            let inv_c = S::from_mag(&(S::Mag::from_ratio(1, 1) / c.clone()));
            let bad = extremes
                .par_iter()
                .map(|s_op| -> Result<Option<Counterexample<S>>> {
                    if let Some(cx) = check(s_op)? {
                        return Ok(Some(cx));
                    }
                    let ts = t.apply(s_op)?;
                    if !ts.scaled(&inv_c).is_extreme_contraction() {
                        return Ok(Some(Counterexample {
                            a: s_op.clone(),
                            b: None,
                            image_a: ts,
                            image_b: None,
                            explanation: "T(S) / ||T(S)|| is not an extreme contraction".into(),
                        }));
                    }
                    Ok(None)
                })
                .find_map_first(|r| match r {
                    Ok(None) => None,
                    other => Some(other),
                })
                .unwrap_or(Ok(None))?;
            if let Some(cx) = bad {
                return Ok(IsometryVerdict::Violated { constant: c, witness: Box::new(cx) });
            }
            extremes_checked = extremes.len();
        }
    }

    let found = sample_shards(samples, seed, |rng| {
        let a = generate::random_operator::<S, _>(rng, t.m, t.n, t.p, cfg)?;
        check(&a)
    })?;
    Ok(match found {
        Some(cx) => IsometryVerdict::Violated { constant: c, witness: Box::new(cx) },
        None => IsometryVerdict::Certified { constant: c, samples, extremes_checked, seed },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyBudget {
    /// Random pairs per preservation check (in addition to the battery).
    pub trials: usize,
    /// Random operators for the isometry check.
    pub isometry_samples: usize,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        ClassifyBudget { trials: 10_000, isometry_samples: 1_000 }
    }
}

/// `(is_zero, rank, invertible, parallel passed, TEA passed, isometry certified, consistent)`.
pub type VerdictKey = (bool, usize, bool, bool, bool, Option<bool>, bool);

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRecord<S: Scalar> {
    pub is_zero: bool,
    pub rank: usize,
    pub invertible: bool,
    pub preserves_parallel: SampleVerdict<S>,
    pub preserves_tea: SampleVerdict<S>,
    /// `None` for the zero map.
    pub scalar_isometry: Option<IsometryVerdict<S>>,
    pub theorem_consistent: bool,
    pub witness: Option<Counterexample<S>>,
    pub seed: u64,
    pub budget: ClassifyBudget,
}

impl<S: Scalar> ClassificationRecord<S> {
    /// The four equivalent properties, in order: preserves TEA; preserves
    /// parallel with rank > 1; preserves parallel and invertible; scalar
    /// multiple of an isometry.
    pub fn properties(&self) -> [bool; 4] {
        let par = self.preserves_parallel.passed();
        [
            self.preserves_tea.passed(),
            par && self.rank > 1,
            par && self.invertible,
            self.scalar_isometry.as_ref().is_some_and(IsometryVerdict::certified),
        ]
    }

    /// Rank-one parallel preserver that fails TEA preservation.
    pub fn is_rank_one_exception(&self) -> bool {
        !self.is_zero && self.rank == 1 && self.preserves_parallel.passed() && !self.preserves_tea.passed()
    }

    /// Compact verdict tuple used for determinism comparisons.
    pub fn verdict_key(&self) -> VerdictKey {
        (
            self.is_zero,
            self.rank,
            self.invertible,
            self.preserves_parallel.passed(),
            self.preserves_tea.passed(),
            self.scalar_isometry.as_ref().map(IsometryVerdict::certified),
            self.theorem_consistent,
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "is_zero": self.is_zero,
            "rank": self.rank,
            "invertible": self.invertible,
            "preserves_parallel": self.preserves_parallel.to_json(),
            "preserves_tea": self.preserves_tea.to_json(),
            "scalar_isometry": self.scalar_isometry.as_ref().map(IsometryVerdict::to_json),
            "rank_one_exception": self.is_rank_one_exception(),
            "theorem_consistent": self.theorem_consistent,
            "witness": self.witness.as_ref().map(Counterexample::to_json),
            "seed": self.seed,
            "budget": self.budget,
        })
    }
}

/// Rank, invertibility, both preservation verdicts and the isometry verdict,
/// plus whether they agree with the four-way equivalence for nonzero maps.
pub fn classify<S: Scalar>(t: &PreserverMap<S>, budget: ClassifyBudget, seed: u64) -> Result<ClassificationRecord<S>> {
    let is_zero = t.is_zero();
    let rank = t.rank();
    let invertible = rank == t.dim();
    let preserves_parallel = preserves_parallel(t, budget.trials, derive_seed(seed, 1))?;
    let preserves_tea = preserves_tea(t, budget.trials, derive_seed(seed, 2))?;
    let scalar_isometry = if is_zero {
        None
    } else {
        Some(is_scalar_isometry(t, budget.isometry_samples, derive_seed(seed, 3))?)
    };
    let mut record = ClassificationRecord {
        is_zero,
        rank,
        invertible,
        preserves_parallel,
        preserves_tea,
        scalar_isometry,
        theorem_consistent: true,
        witness: None,
        seed,
        budget,
    };
    if !is_zero {
        let props = record.properties();
        record.theorem_consistent = props.iter().all(|&x| x == props[0]);
    }
    record.witness = record
        .preserves_tea
        .counterexample()
        .or(record.preserves_parallel.counterexample())
        .or(match &record.scalar_isometry {
            Some(IsometryVerdict::Violated { witness, .. }) => Some(witness.as_ref()),
            _ => None,
        })
        .cloned();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, Rational};

    type Q = Rational;

    fn cfg() -> ScalarConfig {
        ScalarConfig::exact()
    }

    fn op(rows: &[&[i64]]) -> OperatorMatrix<Q> {
        OperatorMatrix::from_i64_rows(rows, PNorm::One, cfg()).unwrap()
    }

    fn signed_swap() -> OperatorMatrix<Q> {
        op(&[&[0, -1], &[1, 0]])
    }

    #[test]
    fn identity_and_scalar_maps() {
        let a = op(&[&[1, 2], &[3, 4]]);
        let id = PreserverMap::identity(2, 2, PNorm::One, cfg()).unwrap();
        assert_eq!(id.apply(&a).unwrap(), a);
        let three = PreserverMap::scalar(2, 2, PNorm::One, cfg(), Q::from_i64(3)).unwrap();
        let e11 = OperatorMatrix::basis(0, 0, 2, 2, PNorm::One, cfg()).unwrap();
        assert_eq!(three.apply(&e11).unwrap(), e11.scaled(&Q::from_i64(3)));
    }

    #[test]
    fn apply_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let u = random_unimodular_permutation::<Q, _>(&mut rng, 2, PNorm::One, cfg()).unwrap();
            let v = random_unimodular_permutation::<Q, _>(&mut rng, 3, PNorm::One, cfg()).unwrap();
            let t = make_isometry(&u, &v, Q::from_i64(1)).unwrap();
            let a = generate::random_operator::<Q, _>(&mut rng, 2, 3, PNorm::One, cfg()).unwrap();
            assert_eq!(t.apply(&a).unwrap(), u.matmul(&a).unwrap().matmul(&v).unwrap());
        }
    }

    #[test]
    fn apply_rejects_wrong_shape() {
        let id = PreserverMap::<Q>::identity(2, 2, PNorm::One, cfg()).unwrap();
        assert!(matches!(id.apply(&op(&[&[1, 2]])), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ranks() {
        assert_eq!(PreserverMap::<Q>::zero(2, 2, PNorm::One, cfg()).unwrap().rank(), 0);
        let b0 = op(&[&[1, -2], &[0, 3]]);
        let phi: Vec<Q> = [2, 0, -1, 5].iter().map(|&v| Q::from_i64(v)).collect();
        let r1 = PreserverMap::rank_one(&b0, &phi).unwrap();
        assert_eq!(r1.rank(), 1);
        // phi(E_11) = 2 so T(E_11) = 2 B0.
        let e11 = OperatorMatrix::basis(0, 0, 2, 2, PNorm::One, cfg()).unwrap();
        assert_eq!(r1.apply(&e11).unwrap(), b0.scaled(&Q::from_i64(2)));
        // Invertible U, V: A -> U A V has full rank and its inverse is explicit.
        let u = signed_swap();
        let v = op(&[&[1, 0], &[0, -1]]);
        let t = make_isometry(&u, &v, Q::from_i64(1)).unwrap();
        assert_eq!(t.rank(), 4);
        assert!(t.is_invertible());
        let u_inv = op(&[&[0, 1], &[-1, 0]]);
        let t_inv = make_isometry(&u_inv, &v, Q::from_i64(1)).unwrap();
        assert_eq!(t.compose(&t_inv).unwrap(), PreserverMap::identity(2, 2, PNorm::One, cfg()).unwrap());
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let c = ScalarConfig::real_float();
        let b0 = OperatorMatrix::<f64>::from_rows(vec![vec![0.3, -1.0], vec![2.0, 0.5]], PNorm::One, c).unwrap();
        let r1 = PreserverMap::rank_one(&b0, &[1.0, 0.5, -0.25, 2.0]).unwrap();
        assert_eq!(r1.rank(), 1);
        let id = PreserverMap::<f64>::identity(2, 2, PNorm::One, c).unwrap();
        assert_eq!(id.rank(), 4);
        let ci = ScalarConfig::complex_float();
        let idc = PreserverMap::<Complex64>::identity(2, 3, PNorm::One, ci).unwrap();
        assert!(idc.is_invertible());
    }

    #[test]
    fn make_isometry_validation() {
        let bad = op(&[&[1, 1], &[0, 1]]);
        assert!(matches!(
            make_isometry(&bad, &signed_swap(), Q::from_i64(1)),
            Err(Error::NotUnimodularPermutation(_))
        ));
        let half = OperatorMatrix::from_rows(
            vec![vec![Q::new(1.into(), 2.into()), Q::from_i64(0)], vec![Q::from_i64(0), Q::from_i64(1)]],
            PNorm::One,
            cfg(),
        )
        .unwrap();
        assert!(make_isometry(&signed_swap(), &half, Q::from_i64(1)).is_err());
        assert!(make_isometry(&signed_swap(), &signed_swap(), Q::from_i64(0)).is_err());
    }

    #[test]
    fn scaled_isometry_multiplies_norms() {
        let u = op(&[&[0, 1], &[-1, 0]]);
        let id = op(&[&[1, 0], &[0, 1]]);
        let t = make_isometry(&u, &id, Q::from_i64(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let a = generate::random_operator::<Q, _>(&mut rng, 2, 2, PNorm::One, cfg()).unwrap();
            assert_eq!(t.apply(&a).unwrap().norm(), a.norm() * Q::from_i64(2));
        }
        let v = is_scalar_isometry(&t, 200, 1).unwrap();
        assert!(v.certified());
        assert_eq!(*v.constant(), Q::from_i64(2));
    }

    #[test]
    fn composition_of_isometries_is_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mk = |rng: &mut ChaCha8Rng| {
            let u = random_unimodular_permutation::<Q, _>(rng, 3, PNorm::One, cfg()).unwrap();
            let v = random_unimodular_permutation::<Q, _>(rng, 2, PNorm::One, cfg()).unwrap();
            make_isometry(&u, &v, Q::from_i64(-3)).unwrap()
        };
        let t = mk(&mut rng).compose(&mk(&mut rng)).unwrap();
        let v = is_scalar_isometry(&t, 200, 2).unwrap();
        assert!(v.certified());
        assert_eq!(*v.constant(), Q::from_i64(9));
    }

    #[test]
    fn diagonal_rescaling_is_not_an_isometry() {
        let mut t = PreserverMap::<Q>::identity(2, 2, PNorm::One, cfg()).unwrap();
        t.matrix[0] = Q::from_i64(2);
        let v = is_scalar_isometry(&t, 100, 3).unwrap();
        assert!(!v.certified());
        assert_eq!(*v.constant(), Q::from_i64(2));
        assert_eq!(is_scalar_isometry(&PreserverMap::<Q>::zero(2, 2, PNorm::One, cfg()).unwrap(), 10, 0), Err(Error::ZeroMap));
    }

    #[test]
    fn identity_preserves_everything() {
        let id = PreserverMap::<Q>::identity(2, 2, PNorm::One, cfg()).unwrap();
        assert!(preserves_parallel(&id, 300, 1).unwrap().passed());
        assert!(preserves_tea(&id, 300, 1).unwrap().passed());
        let idi = PreserverMap::<Q>::identity(2, 3, PNorm::Inf, cfg()).unwrap();
        assert!(preserves_parallel(&idi, 300, 1).unwrap().passed());
        assert!(preserves_tea(&idi, 300, 1).unwrap().passed());
    }

    #[test]
    fn rank_one_map_fails_tea_but_keeps_parallel() {
        let b0 = op(&[&[1, 0], &[2, -1]]);
        for phi in [[1, 1, 1, 1], [3, -1, 0, 2], [0, 0, 0, 5]] {
            let phi: Vec<Q> = phi.iter().map(|&v| Q::from_i64(v)).collect();
            let t = PreserverMap::rank_one(&b0, &phi).unwrap();
            assert!(preserves_parallel(&t, 200, 4).unwrap().passed());
            let v = preserves_tea(&t, 0, 4).unwrap();
            let cx = v.counterexample().expect("targeted battery finds a violation");
            assert!(cx.a.is_tea(cx.b.as_ref().unwrap()).unwrap());
            assert!(!cx.image_a.is_tea(cx.image_b.as_ref().unwrap()).unwrap());
        }
    }

    #[test]
    fn complex_rank_one_equal_moduli_is_targeted() {
        let c = ScalarConfig::complex_float();
        let b0 = OperatorMatrix::<Complex64>::from_rows(
            vec![vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], vec![Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.0)]],
            PNorm::One,
            c,
        )
        .unwrap();
        // Every |phi_k| equal: needs the cancelling Z.
        let phi: Vec<Complex64> = (0..4).map(|k| Complex64::from_polar(1.0, 0.7 * k as f64)).collect();
        let t = PreserverMap::rank_one(&b0, &phi).unwrap();
        assert!(!preserves_tea(&t, 0, 0).unwrap().passed());
        let ti = PreserverMap::rank_one(&b0.clone().with_p(PNorm::Inf), &phi).unwrap();
        assert!(!preserves_tea(&ti, 0, 0).unwrap().passed());
    }

    #[test]
    fn classify_examples() {
        let b = ClassifyBudget { trials: 500, isometry_samples: 200 };
        let zero = PreserverMap::<Q>::zero(2, 2, PNorm::One, cfg()).unwrap();
        let r = classify(&zero, b, 1).unwrap();
        assert!(r.is_zero && r.theorem_consistent && r.scalar_isometry.is_none());

        let iso = make_isometry(&signed_swap(), &op(&[&[1, 0], &[0, 1]]), Q::from_i64(1)).unwrap();
        let r = classify(&iso, b, 1).unwrap();
        assert_eq!(r.properties(), [true; 4]);
        assert!(r.theorem_consistent && r.witness.is_none());

        let b0 = op(&[&[1, 0], &[0, 1]]);
        let phi: Vec<Q> = [1, 2, 3, 4].iter().map(|&v| Q::from_i64(v)).collect();
        let r = classify(&PreserverMap::rank_one(&b0, &phi).unwrap(), b, 1).unwrap();
        assert!(r.preserves_parallel.passed());
        assert!(!r.preserves_tea.passed());
        assert!(r.is_rank_one_exception());
        assert!(r.theorem_consistent);
    }

    #[test]
    fn dual_map_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = 6;
        let matrix = (0..d * d).map(|_| Q::random_entry(&mut rng)).collect();
        let t = PreserverMap::new(2, 3, PNorm::Inf, cfg(), matrix).unwrap();
        let td = t.dual().unwrap();
        assert_eq!((td.rows(), td.cols(), td.p()), (3, 2, PNorm::One));
        assert_eq!(td.dual().unwrap(), t);
        let a = generate::random_operator::<Q, _>(&mut rng, 3, 2, PNorm::One, cfg()).unwrap();
        assert_eq!(td.apply(&a).unwrap(), t.apply(&a.conj_transpose()).unwrap().conj_transpose());
    }

    #[test]
    fn linearity_of_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let matrix = (0..36).map(|_| Q::random_entry(&mut rng)).collect();
        let t = PreserverMap::new(3, 2, PNorm::One, cfg(), matrix).unwrap();
        for _ in 0..100 {
            let a = generate::random_operator::<Q, _>(&mut rng, 3, 2, PNorm::One, cfg()).unwrap();
            let b = generate::random_operator::<Q, _>(&mut rng, 3, 2, PNorm::One, cfg()).unwrap();
            let (x, y) = (Q::random_entry(&mut rng), Q::random_entry(&mut rng));
            let lhs = t.apply(&a.combine(&x, &b, &y).unwrap()).unwrap();
            let rhs = t.apply(&a).unwrap().combine(&x, &t.apply(&b).unwrap(), &y).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
