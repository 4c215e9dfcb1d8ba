//! Seeded random instances: states, POMs, channels and distributions.

use crate::channel::CqChannel;
use crate::error::Result;
use crate::linalg::{self, c, CMatrix};
use crate::quantum::{DensityOperator, FiniteDistribution, Pom};
use crate::rng::StreamRng;

/// Standard complex Gaussian entry (Box–Muller).
fn gaussian(rng: &mut StreamRng) -> num_complex::Complex64 {
    let u1 = 1.0 - rng.uniform();
    let u2 = rng.uniform();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    c(r * t.cos(), r * t.sin())
}

fn ginibre(rng: &mut StreamRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `G G^H / tr(G G^H)` for a `dim × rank` Gaussian `G`.
pub fn random_density(rng: &mut StreamRng, dim: usize, rank: usize) -> DensityOperator {
    let g = ginibre(rng, dim, rank.max(1));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityOperator::from_matrix_unchecked(linalg::hermitize(&(m / c(tr, 0.0))))
}

/// Random pure state.
pub fn random_pure(rng: &mut StreamRng, dim: usize) -> DensityOperator {
    random_density(rng, dim, 1)
}

/// `E_i = S^{-1/2} A_i S^{-1/2}` with `A_i = G_i G_i^H` and `S = Σ A_i`.
pub fn random_pom(rng: &mut StreamRng, dim: usize, outcomes: usize) -> Result<Pom> {
    let parts: Vec<CMatrix> = (0..outcomes.max(1))
        .map(|_| {
            let g = ginibre(rng, dim, dim);
            &g * g.adjoint()
        })
        .collect();
    let mut sum = linalg::zeros(dim);
    for p in &parts {
        sum += p;
    }
    let root = linalg::pseudo_inverse_sqrt(&sum, 1e-14);
    let effects = parts
        .iter()
        .map(|a| linalg::hermitize(&(&root * a * &root)))
        .collect();
    Pom::new(effects)
}

/// Random distribution on `len` points; with `allow_zeros`, each point is
/// independently zeroed with probability 1/4 (at least one point keeps mass).
pub fn random_distribution(rng: &mut StreamRng, len: usize, allow_zeros: bool) -> FiniteDistribution {
    let mut w: Vec<f64> = (0..len).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    if allow_zeros {
        for x in w.iter_mut() {
            if rng.uniform() < 0.25 {
                *x = 0.0;
            }
        }
        if w.iter().all(|&x| x == 0.0) {
            let k = rng.below(len as u64) as usize;
            w[k] = 1.0;
        }
    }
    let total: f64 = w.iter().sum();
    FiniteDistribution::from_masses_unchecked(w.into_iter().map(|x| x / total).collect())
}

/// Random cq-channel with full-rank or pure signals.
pub fn random_channel(rng: &mut StreamRng, alphabet_size: usize, dim: usize) -> Result<CqChannel> {
    let signals = (0..alphabet_size)
        .map(|_| {
            let rank = 1 + rng.below(dim as u64) as usize;
            random_density(rng, dim, rank)
        })
        .collect();
    CqChannel::new(signals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::validate_density;

    #[test]
    fn random_objects_validate() {
        let mut rng = StreamRng::new(1, 0);
        for dim in 1..5 {
            let rho = random_density(&mut rng, dim, dim);
            validate_density(rho.matrix().clone()).unwrap();
            let pom = random_pom(&mut rng, dim, 3).unwrap();
            assert_eq!(pom.len(), 3);
            let d = random_distribution(&mut rng, 5, true);
            assert!((d.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
