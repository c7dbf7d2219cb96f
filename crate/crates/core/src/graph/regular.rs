use rand::seq::SliceRandom;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng;

const MAX_ATTEMPTS: usize = 10_000;

/// Uniform-ish simple connected r-regular graph from the configuration model.
/// Samples with loops, parallel edges or several components are rejected and
/// the generator stream continues, so the result depends only on
/// `(r, n, seed)`.
pub fn random_regular(r: usize, n: usize, seed: u64) -> Result<Graph> {
    if r >= n {
        return Err(Error::Parameter(format!("degree {r} must be below n = {n}")));
    }
    if (r * n) % 2 == 1 {
        return Err(Error::Parameter(format!("r * n = {} is odd", r * n)));
    }
    let mut rng = rng::seeded(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(r)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut g = Graph::new(n);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !g.add_edge(u, v)? {
                continue 'attempt;
            }
        }
        if n == 0 || g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation {
        attempts: MAX_ATTEMPTS,
        msg: format!("no simple connected {r}-regular graph on {n} vertices found"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_small_cases() {
        assert_eq!(random_regular(2, 3, 5).unwrap(), Graph::complete(3));
        assert_eq!(random_regular(3, 4, 9).unwrap(), Graph::complete(4));
    }

    #[test]
    fn cubic_ten() {
        let g = random_regular(3, 10, 7).unwrap();
        assert!(g.is_regular(3));
        assert!(g.is_connected());
        assert_eq!(g, random_regular(3, 10, 7).unwrap());
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(random_regular(3, 5, 0), Err(Error::Parameter(_))));
        assert!(matches!(random_regular(4, 4, 0), Err(Error::Parameter(_))));
    }
}
