//! Vectors in F^n under the l1 and l-infinity norms, and the exact
//! parallel / triangle-equality tests between them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Field, Magnitude, Scalar, ScalarConfig};

/// Which norm: `One` is l1 (or its induced operator norm), `Inf` is l-infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PNorm {
    One,
    Inf,
}

impl PNorm {
    /// The dual exponent: 1 <-> infinity.
    pub fn dual(self) -> PNorm {
        match self {
            PNorm::One => PNorm::Inf,
            PNorm::Inf => PNorm::One,
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::One => f.write_str("1"),
            PNorm::Inf => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for PNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(PNorm::One),
            "inf" | "infinity" | "∞" => Ok(PNorm::Inf),
            other => Err(Error::Parse(format!("p must be 1 or \"inf\", got {other:?}"))),
        }
    }
}

impl Serialize for PNorm {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            PNorm::One => s.serialize_u8(1),
            PNorm::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Number(n) if n.as_u64() == Some(1) => Ok(PNorm::One),
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!(
                "p must be 1 or \"inf\", got {other}"
            ))),
        }
    }
}

/// The set of unimodular `lambda` with `||x + lambda y|| = ||x|| + ||y||`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSet<S> {
    Empty,
    All,
    /// Deduplicated, sorted by angle (real field: -1 before +1).
    Finite(Vec<S>),
}

impl<S: Scalar> PhaseSet<S> {
    /// Builds a `Finite` set (or `Empty`) from raw phases, deduplicating and sorting.
    pub fn from_phases(mut phases: Vec<S>, cfg: &ScalarConfig) -> Self {
        if phases.is_empty() {
            return PhaseSet::Empty;
        }
        phases.sort_by(|a, b| phase_order(a, b));
        let mut out: Vec<S> = Vec::with_capacity(phases.len());
        for ph in phases {
            if !out.iter().any(|q| q.same_unit(&ph, cfg)) {
                out.push(ph);
            }
        }
        PhaseSet::Finite(out)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PhaseSet::Empty)
    }

    pub fn contains(&self, phase: &S, cfg: &ScalarConfig) -> bool {
        match self {
            PhaseSet::Empty => false,
            PhaseSet::All => true,
            PhaseSet::Finite(ps) => ps.iter().any(|p| p.same_unit(phase, cfg)),
        }
    }

    pub fn contains_one(&self, cfg: &ScalarConfig) -> bool {
        self.contains(&S::one(), cfg)
    }

    /// Union of two phase sets.
    pub fn union(self, other: PhaseSet<S>, cfg: &ScalarConfig) -> PhaseSet<S> {
        match (self, other) {
            (PhaseSet::All, _) | (_, PhaseSet::All) => PhaseSet::All,
            (PhaseSet::Empty, x) | (x, PhaseSet::Empty) => x,
            (PhaseSet::Finite(mut a), PhaseSet::Finite(b)) => {
                a.extend(b);
                PhaseSet::from_phases(a, cfg)
            }
        }
    }

    /// Applies `f` to every listed phase (e.g. a rotation or conjugation).
    pub fn map(self, cfg: &ScalarConfig, f: impl Fn(&S) -> S) -> PhaseSet<S> {
        match self {
            PhaseSet::Finite(ps) => PhaseSet::from_phases(ps.iter().map(f).collect(), cfg),
            other => other,
        }
    }

    /// Deterministic representative: the phase of smallest angle in `[0, 2pi)`;
    /// `1` for `All`.
    pub fn representative(&self) -> Option<S> {
        match self {
            PhaseSet::Empty => None,
            PhaseSet::All => Some(S::one()),
            PhaseSet::Finite(ps) => ps
                .iter()
                .min_by(|a, b| a.unit_angle().total_cmp(&b.unit_angle()))
                .cloned(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            PhaseSet::Empty => json!({"kind": "empty"}),
            PhaseSet::All => json!({"kind": "all"}),
            PhaseSet::Finite(ps) => json!({
                "kind": "finite",
                "phases": ps.iter().map(|p| p.phase_json()).collect::<Vec<_>>(),
            }),
        }
    }
}

fn phase_order<S: Scalar>(a: &S, b: &S) -> Ordering {
    let (za, zb) = (a.to_complex(), b.to_complex());
    match S::FIELD {
        Field::Real => za.re.total_cmp(&zb.re),
        Field::Complex => za.arg().total_cmp(&zb.arg()),
    }
}

/// A vector in F^n together with its scalar configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S> {
    entries: Vec<S>,
    config: ScalarConfig,
}

impl<S: Scalar> Vector<S> {
    pub fn new(entries: Vec<S>, config: ScalarConfig) -> Result<Self> {
        config.check_for::<S>()?;
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("vectors need at least one entry".into()));
        }
        Ok(Vector { entries, config })
    }

    pub fn from_i64s(values: &[i64], config: ScalarConfig) -> Result<Self> {
        Self::new(values.iter().map(|&v| S::from_i64(v)).collect(), config)
    }

    /// The `k`-th standard basis vector of F^n (0-based `k`).
    pub fn basis(k: usize, n: usize, config: ScalarConfig) -> Result<Self> {
        if k >= n {
            return Err(Error::IndexOutOfRange(format!("basis index {k} for dimension {n}")));
        }
        let mut entries = vec![S::zero(); n];
        entries[k] = S::one();
        Self::new(entries, config)
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn config(&self) -> &ScalarConfig {
        &self.config
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn scaled(&self, alpha: &S) -> Self {
        Vector {
            entries: self.entries.iter().map(|x| alpha.clone() * x.clone()).collect(),
            config: self.config,
        }
    }

    pub fn norm(&self, p: PNorm) -> S::Mag {
        norm(&self.entries, p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": S::FIELD,
            "mode": S::MODE,
            "data": self.entries.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    fn check_compatible(&self, other: &Vector<S>) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        if self.config != other.config {
            return Err(Error::ConfigMismatch("vectors carry different configurations".into()));
        }
        Ok(())
    }

    /// Exactly the unimodular `lambda` with `||x + lambda y||_p = ||x||_p + ||y||_p`.
    pub fn feasible_phases(&self, other: &Vector<S>, p: PNorm) -> Result<PhaseSet<S>> {
        self.check_compatible(other)?;
        Ok(feasible_phases(&self.entries, &other.entries, p, &self.config))
    }

    pub fn is_parallel(&self, other: &Vector<S>, p: PNorm) -> Result<bool> {
        Ok(!self.feasible_phases(other, p)?.is_empty())
    }

    pub fn is_tea(&self, other: &Vector<S>, p: PNorm) -> Result<bool> {
        Ok(self.feasible_phases(other, p)?.contains_one(&self.config))
    }

    /// Extreme point of the closed unit ball of l_p^n.
    pub fn is_extreme(&self, p: PNorm) -> bool {
        is_extreme(&self.entries, p, &self.config)
    }

    /// Smoothness: a unique norming functional.
    pub fn is_smooth(&self, p: PNorm) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let cfg = &self.config;
        Ok(match p {
            PNorm::One => {
                let n = self.norm(PNorm::One);
                self.entries
                    .iter()
                    .all(|x| !x.modulus().negligible(&n, cfg.norm_tol))
            }
            PNorm::Inf => {
                let n = self.norm(PNorm::Inf);
                self.entries
                    .iter()
                    .filter(|x| x.modulus().attains(&n, cfg.norm_tol))
                    .count()
                    == 1
            }
        })
    }
}

pub(crate) fn norm<S: Scalar>(x: &[S], p: PNorm) -> S::Mag {
    let moduli = x.iter().map(Scalar::modulus);
    match p {
        PNorm::One => moduli.fold(S::Mag::zero_mag(), |a, b| a + b),
        PNorm::Inf => moduli.fold(S::Mag::zero_mag(), S::Mag::max_of),
    }
}

/// The unit scalar `lambda` that aligns `lambda * y_k` with `x_k`.
fn aligning_phase<S: Scalar>(xk: &S, yk: &S) -> Option<S> {
    Some(xk.phase()? * yk.phase()?.conj())
}

pub(crate) fn feasible_phases<S: Scalar>(
    x: &[S],
    y: &[S],
    p: PNorm,
    cfg: &ScalarConfig,
) -> PhaseSet<S> {
    debug_assert_eq!(x.len(), y.len());
    if x.iter().all(Scalar::is_zero) || y.iter().all(Scalar::is_zero) {
        return PhaseSet::All;
    }
    let nx = norm(x, p);
    let ny = norm(y, p);
    match p {
        PNorm::One => {
            // Every coordinate of the common support forces the same phase.
            let mut demand: Option<S> = None;
            for (xk, yk) in x.iter().zip(y) {
                if xk.modulus().negligible(&nx, cfg.norm_tol)
                    || yk.modulus().negligible(&ny, cfg.norm_tol)
                {
                    continue;
                }
                let Some(ph) = aligning_phase(xk, yk) else { continue };
                match &demand {
                    None => demand = Some(ph),
                    Some(d) if d.same_unit(&ph, cfg) => {}
                    Some(_) => return PhaseSet::Empty,
                }
            }
            match demand {
                None => PhaseSet::All,
                Some(d) => PhaseSet::Finite(vec![d]),
            }
        }
        PNorm::Inf => {
            let phases = x
                .iter()
                .zip(y)
                .filter(|(xk, yk)| {
                    xk.modulus().attains(&nx, cfg.norm_tol) && yk.modulus().attains(&ny, cfg.norm_tol)
                })
                .filter_map(|(xk, yk)| aligning_phase(xk, yk))
                .collect();
            PhaseSet::from_phases(phases, cfg)
        }
    }
}

pub(crate) fn is_extreme<S: Scalar>(x: &[S], p: PNorm, cfg: &ScalarConfig) -> bool {
    match p {
        PNorm::One => {
            let mut unit_seen = false;
            for v in x {
                if v.is_unimodular(cfg) && !unit_seen {
                    unit_seen = true;
                } else if !v.modulus().negligible(&S::Mag::from_ratio(1, 1), cfg.norm_tol) {
                    return false;
                }
            }
            unit_seen
        }
        PNorm::Inf => x.iter().all(|v| v.is_unimodular(cfg)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, Rational};

    fn ex(values: &[i64]) -> Vector<Rational> {
        Vector::from_i64s(values, ScalarConfig::exact()).unwrap()
    }

    fn cx(values: &[(f64, f64)]) -> Vector<Complex64> {
        Vector::new(
            values.iter().map(|&(r, i)| Complex64::new(r, i)).collect(),
            ScalarConfig::complex_float(),
        )
        .unwrap()
    }

    #[test]
    fn norms() {
        assert_eq!(ex(&[0, 0, 0]).norm(PNorm::One), Rational::from_i64(0));
        assert_eq!(ex(&[0, 0]).norm(PNorm::Inf), Rational::from_i64(0));
        assert_eq!(ex(&[1, -2, 3]).norm(PNorm::One), Rational::from_i64(6));
        assert_eq!(ex(&[1, -2, 3]).norm(PNorm::Inf), Rational::from_i64(3));
        assert_eq!(cx(&[(3.0, 4.0), (0.0, 0.0)]).norm(PNorm::One), 5.0);
    }

    #[test]
    fn tea_example_from_the_rank_one_map() {
        let x = ex(&[0, 1]);
        let y = ex(&[1, 1]);
        assert_eq!(
            x.feasible_phases(&y, PNorm::One).unwrap(),
            PhaseSet::Finite(vec![Rational::from_i64(1)])
        );
        assert!(x.is_tea(&y, PNorm::One).unwrap());
    }

    #[test]
    fn disjoint_supports_give_all() {
        assert_eq!(
            ex(&[1, 0]).feasible_phases(&ex(&[0, 1]), PNorm::One).unwrap(),
            PhaseSet::All
        );
    }

    #[test]
    fn complex_forced_phase() {
        let x = cx(&[(1.0, 0.0), (0.0, 1.0)]);
        let y = cx(&[(0.0, 1.0), (-1.0, 0.0)]);
        let ph = x.feasible_phases(&y, PNorm::One).unwrap();
        let PhaseSet::Finite(list) = &ph else { panic!("{ph:?}") };
        assert_eq!(list.len(), 1);
        assert!((list[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(x.is_parallel(&y, PNorm::One).unwrap());
        assert!(!x.is_tea(&y, PNorm::One).unwrap());
        // ||x + (-i) y||_1 = ||(2, 2i)||_1 = 4
        let s: Vec<_> = x
            .entries()
            .iter()
            .zip(y.entries())
            .map(|(a, b)| a + Complex64::new(0.0, -1.0) * b)
            .collect();
        assert!((norm(&s, PNorm::One) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_is_parallel_and_tea_to_everything() {
        let x = ex(&[3, -1]);
        let z = ex(&[0, 0]);
        assert_eq!(x.feasible_phases(&z, PNorm::One).unwrap(), PhaseSet::All);
        assert!(x.is_parallel(&z, PNorm::Inf).unwrap());
        assert!(z.is_tea(&x, PNorm::One).unwrap());
    }

    #[test]
    fn conflicting_demands() {
        let x = ex(&[1, 1]);
        let y = ex(&[1, -1]);
        assert!(!x.is_parallel(&y, PNorm::One).unwrap());
        // By hand: ||x + y||_1 = ||x - y||_1 = 2 < 4.
        assert_eq!(ex(&[2, 0]).norm(PNorm::One), Rational::from_i64(2));
    }

    #[test]
    fn linf_union_of_aligning_phases() {
        let x = ex(&[1, -1, 0]);
        let y = ex(&[2, 2, 1]);
        assert_eq!(
            x.feasible_phases(&y, PNorm::Inf).unwrap(),
            PhaseSet::Finite(vec![Rational::from_i64(-1), Rational::from_i64(1)])
        );
        let y2 = ex(&[0, 0, 1]);
        assert_eq!(x.feasible_phases(&y2, PNorm::Inf).unwrap(), PhaseSet::Empty);
    }

    #[test]
    fn mismatches_are_errors() {
        assert!(matches!(
            ex(&[1, 2]).feasible_phases(&ex(&[1]), PNorm::One),
            Err(Error::DimensionMismatch(_))
        ));
        let f = Vector::<f64>::new(vec![1.0], ScalarConfig::real_float()).unwrap();
        let g = Vector::<f64>::new(
            vec![1.0],
            ScalarConfig::new(Field::Real, crate::scalar::Mode::Float, 1e-6, 1e-6).unwrap(),
        )
        .unwrap();
        assert!(matches!(f.feasible_phases(&g, PNorm::One), Err(Error::ConfigMismatch(_))));
        assert!(Vector::<f64>::new(vec![1.0], ScalarConfig::exact()).is_err());
        assert!(Vector::<Rational>::new(vec![], ScalarConfig::exact()).is_err());
    }

    #[test]
    fn extreme_points() {
        assert!(Vector::<Rational>::basis(1, 3, ScalarConfig::exact()).unwrap().is_extreme(PNorm::One));
        let half = Vector::new(
            vec![Rational::new(1.into(), 2.into()); 2],
            ScalarConfig::exact(),
        )
        .unwrap();
        assert!(!half.is_extreme(PNorm::One));
        assert!(ex(&[1, -1, 1]).is_extreme(PNorm::Inf));
        assert!(!ex(&[1, 0, 1]).is_extreme(PNorm::Inf));
        assert!(!ex(&[0, 0]).is_extreme(PNorm::One));
        assert!(!ex(&[1, -1]).is_extreme(PNorm::One));
        assert!(cx(&[(0.0, 0.0), (0.6, 0.8)]).is_extreme(PNorm::One));
    }

    #[test]
    fn smooth_points() {
        assert!(ex(&[1, 2]).is_smooth(PNorm::One).unwrap());
        assert!(!ex(&[1, 0]).is_smooth(PNorm::One).unwrap());
        assert!(ex(&[2, 1, 1]).is_smooth(PNorm::Inf).unwrap());
        assert!(!ex(&[1, 1, 0]).is_smooth(PNorm::Inf).unwrap());
        assert_eq!(ex(&[0, 0]).is_smooth(PNorm::One), Err(Error::ZeroVector));
    }

    /// Independent oracle for smoothness in l-infinity^3: enumerate the
    /// extreme points of the dual ball (signed basis vectors of l1^3) and
    /// count those that norm `x`. Smooth iff exactly one does.
    #[test]
    fn linf_smoothness_matches_dual_enumeration() {
        let samples: &[&[i64]] = &[&[2, 1, 1], &[1, 1, 0], &[0, -3, 3], &[-2, 0, 1], &[1, 1, 1]];
        for s in samples {
            let x = ex(s);
            let nx = x.norm(PNorm::Inf);
            let mut norming = 0;
            for k in 0..3 {
                for sign in [1i64, -1] {
                    if Rational::from_i64(sign * s[k]) == nx {
                        norming += 1;
                    }
                }
            }
            assert_eq!(x.is_smooth(PNorm::Inf).unwrap(), norming == 1, "{s:?}");
        }
    }

    #[test]
    fn phase_set_ordering_and_dedup() {
        let cfg = ScalarConfig::complex_float();
        let i = Complex64::new(0.0, 1.0);
        let set = PhaseSet::from_phases(
            vec![Complex64::new(-1.0, 0.0), i, Complex64::new(1.0, 0.0), i * (1.0 + 1e-13)],
            &cfg,
        );
        let PhaseSet::Finite(ps) = &set else { panic!() };
        assert_eq!(ps.len(), 3);
        assert!(ps[0].arg() < ps[1].arg() && ps[1].arg() < ps[2].arg());
        assert_eq!(set.representative().unwrap(), Complex64::new(1.0, 0.0));
    }
}
