use num::Zero;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Primitivity {
    pub primitive: bool,
    /// Smallest `R` with `P^R` entrywise positive.
    pub exponent: Option<usize>,
}

fn pattern<T: Zero>(m: &[Vec<T>]) -> Vec<Vec<bool>> {
    m.iter().map(|r| r.iter().map(|v| !v.is_zero()).collect()).collect()
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Boolean powers up to the Wielandt bound `(n-1)² + 1`. Negative entries are
/// treated as nonzero; callers pass nonnegative matrices.
pub fn primitivity<T: Zero>(m: &[Vec<T>]) -> Primitivity {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    if n == 0 {
        return Primitivity {
            primitive: false,
            exponent: None,
        };
    }
    let base = pattern(m);
    let mut power = base.clone();
    let bound = (n - 1) * (n - 1) + 1;
    for r in 1..=bound {
        if power.iter().all(|row| row.iter().all(|&v| v)) {
            return Primitivity {
                primitive: true,
                exponent: Some(r),
            };
        }
        power = bool_mul(&power, &base);
    }
    Primitivity {
        primitive: false,
        exponent: None,
    }
}

/// Every state reaches every other along positive entries.
pub fn irreducible<T: Zero>(m: &[Vec<T>]) -> bool {
    let adj = pattern(m);
    let n = adj.len();
    (0..n).all(|s| reach(&adj, s).iter().all(|&r| r))
}

pub(crate) fn reach(adj: &[Vec<bool>], start: usize) -> Vec<bool> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}
