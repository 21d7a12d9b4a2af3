//! Rank computations: fraction-free elimination for exact rationals and a
//! singular-value cutoff for floats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Exact rank of a row-major rational matrix.
///
/// Each row is first scaled by the lcm of its denominators, then reduced by
/// Bareiss' fraction-free elimination; every division is exact, so no
/// intermediate fractions appear.
pub fn rational_rank(data: &[Rational], rows: usize, cols: usize) -> usize {
    assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
    let mut a: Vec<Vec<BigInt>> = data.chunks(cols.max(1)).take(rows).map(integer_row).collect();
    bareiss_rank(&mut a, cols)
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    row.iter()
        .map(|r| r.numer() * (&lcm / r.denom()))
        .collect()
}

/// Rank of an integer matrix by fraction-free elimination. `a` is destroyed.
pub fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        // Smallest nonzero pivot keeps the intermediate minors short.
        let pivot = (rank..rows)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].magnitude().clone());
        let Some(p) = pivot else { continue };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for j in (col + 1)..cols {
                let v = &pivot_row[col] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = top[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Number of singular values above `rank_tol` times the largest one.
pub fn rank_from_singular_values(sv: &[f64], rank_tol: f64) -> usize {
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(rows: &[&[i64]]) -> (Vec<Rational>, usize, usize) {
        let r = rows.len();
        let c = rows[0].len();
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| Rational::from_i64(v)))
            .collect();
        (data, r, c)
    }

    /// Independent oracle: rank = size of the largest nonzero minor, by
    /// cofactor-expansion determinants over all square submatrices.
    fn rank_by_minors(data: &[Rational], rows: usize, cols: usize) -> usize {
        fn det(m: &[Vec<Rational>]) -> Rational {
            if m.len() == 1 {
                return m[0][0].clone();
            }
            let mut acc = <Rational as Zero>::zero();
            for (j, v) in m[0].iter().enumerate() {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = v * det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=rows.min(cols)).rev() {
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let m: Vec<Vec<Rational>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| data[r * cols + c].clone()).collect())
                        .collect();
                    if !Zero::is_zero(&det(&m)) {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn small_cases() {
        let (d, r, c) = ints(&[&[0, 0], &[0, 0]]);
        assert_eq!(rational_rank(&d, r, c), 0);
        let (d, r, c) = ints(&[&[-3, 1], &[0, 0]]);
        assert_eq!(rational_rank(&d, r, c), 1);
        let (d, r, c) = ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rational_rank(&d, r, c), 2);
        let (d, r, c) = ints(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0], &[0, 2, 5]]);
        assert_eq!(rational_rank(&d, r, c), 2);
    }

    #[test]
    fn fractional_entries() {
        let d = vec![q(1, 2), q(1, 3), q(3, 2), q(1, 1)];
        assert_eq!(rational_rank(&d, 2, 2), 1);
        let d = vec![q(1, 2), q(1, 3), q(3, 2), q(2, 1)];
        assert_eq!(rational_rank(&d, 2, 2), 2);
    }

    #[test]
    fn agrees_with_minor_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            // Sparse small entries produce plenty of rank deficiency.
            let data: Vec<Rational> = (0..rows * cols)
                .map(|_| {
                    if rng.gen_bool(0.4) {
                        <Rational as Zero>::zero()
                    } else {
                        q(rng.gen_range(-2..=2), rng.gen_range(1..=2))
                    }
                })
                .collect();
            assert_eq!(
                rational_rank(&data, rows, cols),
                rank_by_minors(&data, rows, cols),
                "{data:?} {rows}x{cols}"
            );
        }
    }

    #[test]
    fn singular_value_cutoff() {
        assert_eq!(rank_from_singular_values(&[0.0, 0.0], 1e-9), 0);
        assert_eq!(rank_from_singular_values(&[2.0, 1e-12], 1e-9), 1);
        assert_eq!(rank_from_singular_values(&[2.0, 1e-3], 1e-9), 2);
    }
}
