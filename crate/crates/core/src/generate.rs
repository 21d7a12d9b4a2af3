//! Random operators and constructive parallel / TEA pair generators.
//!
//! Pairs are built around a shared norming column `j` drawn uniformly, so
//! every column index shows up as a witness. Column `j` of `B` is either
//! supported off the support of `A e_j` (disjoint) or phase-aligned with it
//! coordinate by coordinate; all other columns are rescaled strictly below
//! the norming column.

use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::scalar::{Magnitude, Scalar, ScalarConfig};
use crate::vector::{self, PNorm};

const MAX_ATTEMPTS: usize = 64;

/// Random seed derivation for independent sub-streams (splitmix64 finaliser).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_column<S: Scalar, R: Rng + ?Sized>(rng: &mut R, m: usize, zero_prob: f64) -> Vec<S> {
    (0..m)
        .map(|_| {
            if rng.gen_bool(zero_prob) {
                S::zero()
            } else {
                S::random_entry(rng)
            }
        })
        .collect()
}

fn nonzero_column<S: Scalar, R: Rng + ?Sized>(rng: &mut R, m: usize, zero_prob: f64) -> Vec<S> {
    let mut col = random_column::<S, R>(rng, m, zero_prob);
    if col.iter().all(Scalar::is_zero) {
        let k = rng.gen_range(0..m);
        col[k] = S::random_unit(rng);
    }
    col
}

/// A random operator; roughly a fifth of the entries are zero.
pub fn random_operator<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    p: PNorm,
    config: ScalarConfig,
) -> Result<OperatorMatrix<S>> {
    let data = (0..n).flat_map(|_| random_column::<S, R>(rng, m, 0.2)).collect();
    OperatorMatrix::from_col_major(m, n, p, data, config)
}

/// Rescales `col` so its l1 norm is a random fraction in `(0, 0.95]` of `bound`.
fn shrink_below<S: Scalar, R: Rng + ?Sized>(rng: &mut R, col: Vec<S>, bound: &S::Mag) -> Vec<S> {
    let norm = vector::norm(&col, PNorm::One);
    if norm.is_zero_mag() {
        return col;
    }
    let t = S::random_positive(rng) * S::Mag::from_ratio(19, 20);
    let factor = t * bound.clone() / norm;
    col.iter().map(|x| x.scale(&factor)).collect()
}

/// Builds an l1 column pair `(a, b)` with `a + phase * b` attaining the
/// triangle equality.
fn aligned_columns<S: Scalar, R: Rng + ?Sized>(rng: &mut R, m: usize, phase: &S) -> (Vec<S>, Vec<S>) {
    let a = nonzero_column::<S, R>(rng, m, 0.3);
    let off_support: Vec<usize> = (0..m).filter(|&k| a[k].is_zero()).collect();
    let disjoint = !off_support.is_empty() && rng.gen_bool(0.25);
    let mut b = vec![S::zero(); m];
    for k in 0..m {
        if a[k].is_zero() {
            if rng.gen_bool(0.5) {
                b[k] = S::random_entry(rng);
            }
        } else if !disjoint && rng.gen_bool(0.75) {
            b[k] = aligned_entry(rng, &a[k], phase);
        }
    }
    if b.iter().all(Scalar::is_zero) {
        if disjoint {
            let k = off_support[rng.gen_range(0..off_support.len())];
            b[k] = S::random_unit(rng);
        } else {
            let support: Vec<usize> = (0..m).filter(|&k| !a[k].is_zero()).collect();
            let k = support[rng.gen_range(0..support.len())];
            b[k] = aligned_entry(rng, &a[k], phase);
        }
    }
    (a, b)
}

/// `conj(phase) * phase(a_k) * r` with `r > 0`, so `phase * b_k` points along `a_k`.
fn aligned_entry<S: Scalar, R: Rng + ?Sized>(rng: &mut R, ak: &S, phase: &S) -> S {
    let unit = ak.phase().expect("aligned entry needs a nonzero coordinate");
    let r = S::random_positive(rng) * S::Mag::from_ratio(2, 1);
    (phase.conj() * unit).scale(&r)
}

fn aligned_pair_l1<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    config: ScalarConfig,
    phase: &S,
) -> Result<(OperatorMatrix<S>, OperatorMatrix<S>)> {
    let j = rng.gen_range(0..n);
    let (col_a, col_b) = aligned_columns::<S, R>(rng, m, phase);
    let norm_a = vector::norm(&col_a, PNorm::One);
    let norm_b = vector::norm(&col_b, PNorm::One);
    let mut da = Vec::with_capacity(m * n);
    let mut db = Vec::with_capacity(m * n);
    for k in 0..n {
        if k == j {
            da.extend_from_slice(&col_a);
            db.extend_from_slice(&col_b);
        } else {
            let ca = random_column::<S, R>(rng, m, 0.25);
            let cb = random_column::<S, R>(rng, m, 0.25);
            da.extend(shrink_below(rng, ca, &norm_a));
            db.extend(shrink_below(rng, cb, &norm_b));
        }
    }
    Ok((
        OperatorMatrix::from_col_major(m, n, PNorm::One, da, config)?,
        OperatorMatrix::from_col_major(m, n, PNorm::One, db, config)?,
    ))
}

fn aligned_pair<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    p: PNorm,
    config: ScalarConfig,
    tea: bool,
) -> Result<(OperatorMatrix<S>, OperatorMatrix<S>)> {
    config.check_for::<S>()?;
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("operator shape {m}x{n}")));
    }
    for _ in 0..MAX_ATTEMPTS {
        let phase = if tea { S::one() } else { S::random_unit(rng) };
        let (a, b) = match p {
            PNorm::One => aligned_pair_l1(rng, m, n, config, &phase)?,
            PNorm::Inf => {
                let (a, b) = aligned_pair_l1(rng, n, m, config, &phase)?;
                (a.conj_transpose(), b.conj_transpose())
            }
        };
        let ok = if tea { a.is_tea(&b)? } else { a.is_parallel(&b)? };
        if ok {
            return Ok((a, b));
        }
    }
    Err(Error::BudgetExceeded(
        "pair generator failed to produce a verified pair".into(),
    ))
}

/// A random pair `(A, B)` with `A ∥ B`, verified by the exact check.
pub fn gen_parallel_pair<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    p: PNorm,
    config: ScalarConfig,
) -> Result<(OperatorMatrix<S>, OperatorMatrix<S>)> {
    aligned_pair(rng, m, n, p, config, false)
}

/// A random TEA pair (alignment phase fixed to 1), verified by the exact check.
pub fn gen_tea_pair<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    p: PNorm,
    config: ScalarConfig,
) -> Result<(OperatorMatrix<S>, OperatorMatrix<S>)> {
    aligned_pair(rng, m, n, p, config, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_generators<S: Scalar>(config: ScalarConfig) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, n) in &[(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
            for p in [PNorm::One, PNorm::Inf] {
                for _ in 0..50 {
                    let (a, b) = gen_parallel_pair::<S, _>(&mut rng, m, n, p, config).unwrap();
                    let v = a.parallel(&b).unwrap();
                    assert!(v.holds);
                    assert!(a.replay_witness(&b, &v.witness.unwrap()).unwrap());
                    let (a, b) = gen_tea_pair::<S, _>(&mut rng, m, n, p, config).unwrap();
                    assert!(a.is_tea(&b).unwrap());
                }
            }
        }
    }

    #[test]
    fn generated_pairs_are_sound_exact() {
        check_generators::<Rational>(ScalarConfig::exact());
    }

    #[test]
    fn generated_pairs_are_sound_float() {
        check_generators::<f64>(ScalarConfig::real_float());
        check_generators::<Complex64>(ScalarConfig::complex_float());
    }

    #[test]
    fn every_column_occurs_as_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 2];
        for _ in 0..10_000 {
            let (a, b) =
                gen_parallel_pair::<Rational, _>(&mut rng, 2, 2, PNorm::One, ScalarConfig::exact()).unwrap();
            let w = a.parallel(&b).unwrap().witness.unwrap();
            seen[w.index] += 1;
        }
        assert!(seen.iter().all(|&c| c > 3000), "{seen:?}");
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 9), derive_seed(5, 9));
    }
}
