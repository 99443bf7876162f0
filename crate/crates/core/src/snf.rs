//! Smith normal form over the integers, exact arithmetic.
//!
//! Matrices here are tiny (generator x relator exponent matrices), so a
//! straightforward pivot-and-eliminate routine on `BigInt` entries is plenty.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Elementary divisors (nonzero diagonal of the Smith form, ascending, each
/// dividing the next) of an integer matrix given as rows.
pub fn elementary_divisors(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    debug_assert!(m.iter().all(|r| r.len() == cols));

    let mut divisors = Vec::new();
    let mut k = 0usize;
    while k < rows && k < cols {
        let Some((pi, pj)) = smallest_nonzero(&m, k) else {
            break;
        };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }

        loop {
            // Clear column k with row operations.
            let mut dirty = false;
            for i in k + 1..rows {
                if !m[i][k].is_zero() {
                    let q = &m[i][k] / &m[k][k];
                    if !q.is_zero() {
                        for j in k..cols {
                            let sub = &q * &m[k][j];
                            m[i][j] -= sub;
                        }
                    }
                    if !m[i][k].is_zero() {
                        // Remainder became the new, strictly smaller pivot.
                        m.swap(k, i);
                        dirty = true;
                    }
                }
            }
            // Clear row k with column operations.
            for j in k + 1..cols {
                if !m[k][j].is_zero() {
                    let q = &m[k][j] / &m[k][k];
                    if !q.is_zero() {
                        for row in m.iter_mut() {
                            let sub = &q * &row[k];
                            row[j] -= sub;
                        }
                    }
                    if !m[k][j].is_zero() {
                        for row in m.iter_mut() {
                            row.swap(k, j);
                        }
                        dirty = true;
                    }
                }
            }
            if !dirty && column_clear(&m, k) && row_clear(&m, k) {
                break;
            }
        }

        // Divisibility: fold in any entry the pivot does not divide.
        if let Some((i, _)) = non_divisible_entry(&m, k) {
            for col in k..cols {
                let add = m[i][col].clone();
                m[k][col] += add;
            }
            continue; // re-run elimination at the same k
        }

        if m[k][k].is_negative() {
            for j in k..cols {
                m[k][j] = -m[k][j].clone();
            }
        }
        divisors.push(m[k][k].clone());
        k += 1;
    }
    divisors
}

fn smallest_nonzero(m: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..m.len() {
        for j in k..m[i].len() {
            if !m[i][j].is_zero() {
                match best {
                    Some((bi, bj)) if m[bi][bj].abs() <= m[i][j].abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
    }
    best
}

fn column_clear(m: &[Vec<BigInt>], k: usize) -> bool {
    (k + 1..m.len()).all(|i| m[i][k].is_zero())
}

fn row_clear(m: &[Vec<BigInt>], k: usize) -> bool {
    (k + 1..m[k].len()).all(|j| m[k][j].is_zero())
}

fn non_divisible_entry(m: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    for i in k + 1..m.len() {
        for j in k + 1..m[i].len() {
            if !(&m[i][j] % &m[k][k]).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}
