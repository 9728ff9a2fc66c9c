//! Exact Shapley values for coalition games over a publication's byline.
//!
//! The computation enumerates all 2^n coalitions, so it is gated by an
//! explicit player limit; callers that need larger games must sample, which
//! is out of scope here.

use super::ScoreError;

/// Largest factorial needed; 12! is still exactly representable in an f64.
const FACTORIAL_LIMIT: usize = 13;

fn factorials(n: usize) -> Vec<f64> {
    debug_assert!(n < FACTORIAL_LIMIT);
    let mut f = vec![1.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// Shapley values from a pre-tabulated characteristic function, where
/// `table[mask]` is the value of the coalition whose members are the set
/// bits of `mask`.
pub(crate) fn shapley_from_table(table: &[f64], n: usize) -> Vec<f64> {
    let fact = factorials(n);
    let full = 1usize << n;
    debug_assert_eq!(table.len(), full);
    let mut phi = vec![0.0; n];
    for mask in 0..full {
        let size = mask.count_ones() as usize;
        if size == n {
            // The grand coalition has no player left to join it.
            continue;
        }
        // Weight of coalition `mask` as the predecessor set of a joining
        // player: |S|! (n - |S| - 1)! / n!
        let weight = fact[size] * fact[n - size - 1] / fact[n];
        for (i, value) in phi.iter_mut().enumerate() {
            let bit = 1usize << i;
            if mask & bit == 0 {
                *value += weight * (table[mask | bit] - table[mask]);
            }
        }
    }
    phi
}

/// Computes the Shapley value of every player in an `n`-player game.
///
/// `value` receives the coalition as a sorted slice of 0-based player
/// indices and must be defined on every subset, with `value(&[]) == 0`.
/// Games larger than `n_max` players are refused rather than approximated.
pub fn shapley_values<F>(n: usize, n_max: usize, value: F) -> Result<Vec<f64>, ScoreError>
where
    F: Fn(&[usize]) -> f64,
{
    if n == 0 {
        return Ok(Vec::new());
    }
    let limit = n_max.min(FACTORIAL_LIMIT - 1);
    if n > limit {
        return Err(ScoreError::TooManyUnits {
            name: "shapley".into(),
            limit,
            got: n,
        });
    }
    let full = 1usize << n;
    let mut table = Vec::with_capacity(full);
    let mut members = Vec::with_capacity(n);
    for mask in 0..full {
        members.clear();
        members.extend((0..n).filter(|i| mask & (1 << i) != 0));
        let v = value(&members);
        if !v.is_finite() {
            return Err(ScoreError::Game(format!(
                "value of coalition {members:?} is not finite"
            )));
        }
        table.push(v);
    }
    if table[0] != 0.0 {
        return Err(ScoreError::Game(
            "the empty coalition must have value 0".into(),
        ));
    }
    Ok(shapley_from_table(&table, n))
}
