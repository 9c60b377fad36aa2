//! Seeded random fixtures: Haar pure states, induced-measure mixed states,
//! Haar unitaries, and random operators in [0, 1]. All randomness flows
//! through explicit seeds (ChaCha8), so fixtures are reproducible.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{hermitize, CMat, CVec};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vec(rng: &mut impl Rng, len: usize) -> CVec {
    CVec::from_iterator(
        len,
        (0..len).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    )
}

/// Haar-distributed pure state on the given subsystem layout.
pub fn haar_pure(dims: Vec<usize>, rng: &mut impl Rng) -> Result<PureState> {
    let total: usize = dims.iter().product();
    let mut v = gaussian_vec(rng, total);
    let n = v.norm();
    v /= C64::new(n, 0.0);
    PureState::new(dims, v)
}

/// Mixed state of the requested rank via partial trace of a larger Haar
/// pure state (the induced measure).
pub fn induced_mixed(dims: Vec<usize>, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if rank == 0 || rank > total {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={total}"
        )));
    }
    let psi = haar_pure(vec![total, rank], rng)?;
    let rho = psi.reduced_left()?;
    DensityMatrix::new(dims, rho.matrix().clone())
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the standard
/// phase correction.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        let corr = phase.conj();
        for i in 0..dim {
            q[(i, k)] *= corr;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    hermitize(&g)
}

/// Random operator with spectrum uniform in [0, 1] and Haar eigenbasis.
pub fn random_effect(dim: usize, rng: &mut impl Rng) -> CMat {
    let u = haar_unitary(dim, rng);
    let mut m = CMat::zeros(dim, dim);
    for k in 0..dim {
        let v = rng.gen::<f64>();
        let col = u.column(k);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += col[i] * col[j].conj() * C64::new(v, 0.0);
            }
        }
    }
    m
}

/// Either a Haar pure state (as a density matrix) or an induced-measure
/// mixed state; deterministic for a fixed seed.
pub fn random_state(
    pure: bool,
    dims: Vec<usize>,
    rank: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    let mut rng = rng_from_seed(seed);
    if pure {
        Ok(haar_pure(dims, &mut rng)?.to_density())
    } else {
        induced_mixed(dims, rank, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fixed_seed_reproduces() {
        let a = random_state(true, vec![2, 2], 1, 7).unwrap();
        let b = random_state(true, vec![2, 2], 1, 7).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn rank_one_mixed_is_pure() {
        let rho = random_state(false, vec![2], 1, 3).unwrap();
        let spectrum = rho.spectrum();
        assert_abs_diff_eq!(spectrum[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(spectrum[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(5);
        let u = haar_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMat::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn induced_measure_mean_purity_matches_formula() {
        // E[Tr ρ²] = (d + n) / (dn + 1) for the measure induced by tracing
        // an n-dimensional reference off a Haar pure state.
        let (d, n, samples) = (3usize, 3usize, 1500usize);
        let expected = (d + n) as f64 / ((d * n) as f64 + 1.0);
        let mut rng = rng_from_seed(11);
        let mut mean = 0.0;
        for _ in 0..samples {
            let rho = induced_mixed(vec![d], n, &mut rng).unwrap();
            let purity: f64 = rho.spectrum().iter().map(|p| p * p).sum();
            mean += purity;
        }
        mean /= samples as f64;
        assert_abs_diff_eq!(mean, expected, epsilon = 0.02);
    }

    #[test]
    fn invalid_rank_rejected() {
        let mut rng = rng_from_seed(1);
        assert!(induced_mixed(vec![2], 0, &mut rng).is_err());
        assert!(induced_mixed(vec![2], 5, &mut rng).is_err());
    }
}
