//! Quantum-classical extended states, the ensemble-level smoothed
//! zero-coherent information, finite-n information-spectrum diagnostics,
//! and the entropic entanglement of assistance.
//!
//! The spectral inf-divergence rate is an asymptotic quantity; here it is
//! probed at block lengths n ≤ n_max through the full diagnostic curve
//! γ ↦ Tr[{Δ_n(γ) ≥ 0} Δ_n(γ)], Δ_n(γ) = ρ^{⊗n} − 2^{nγ} σ^{⊗n}, with a
//! tolerance proxy for the liminf. Callers get the whole curve so they can
//! vary the proxy.

use crate::decomposition::{decomposition_search, PureEnsemble, SearchOptions};
use crate::distillation::ensemble_lower_value;
use crate::entropy::von_neumann_entropy;
use crate::linalg::{kron, positive_part_trace, CMat};
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// Default ceiling on the total tensor-power dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Block-diagonal quantum-classical state Σ_i p_i σ^i_AB ⊗ |i⟩⟨i|_Z.
#[derive(Debug, Clone)]
pub struct QCState {
    members: Vec<(f64, DensityMatrix)>,
}

impl QCState {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty quantum-classical state".into()));
        }
        let dims = members[0].1.dims().to_vec();
        let mut total = 0.0;
        for (p, block) in &members {
            if *p <= 0.0 {
                return Err(Error::InvalidArgument(
                    "classical weights must be positive".into(),
                ));
            }
            if block.dims() != dims {
                return Err(Error::InvalidArgument(
                    "blocks live on different spaces".into(),
                ));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidTrace {
                got: total,
                expected: "classical weights summing to one",
            });
        }
        Ok(QCState { members })
    }

    /// Flag each ensemble member with an orthogonal classical register state.
    pub fn from_ensemble(ensemble: &PureEnsemble) -> Result<Self> {
        let members = ensemble
            .members()
            .iter()
            .map(|(p, phi)| (*p, phi.to_density()))
            .collect();
        QCState::new(members)
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn classical_dim(&self) -> usize {
        self.members.len()
    }

    /// The explicit block-diagonal matrix on AB ⊗ Z, register last.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let z = self.classical_dim();
        let d = self.members[0].1.total_dim();
        let mut mat = CMat::zeros(d * z, d * z);
        for (i, (p, block)) in self.members.iter().enumerate() {
            for a in 0..d {
                for b in 0..d {
                    mat[(a * z + i, b * z + i)] =
                        block.matrix()[(a, b)] * num_complex::Complex64::new(*p, 0.0);
                }
            }
        }
        let mut dims = self.members[0].1.dims().to_vec();
        dims.push(z);
        DensityMatrix::new(dims, mat)
    }
}

/// Smoothed zero-coherent information of the flagged extension of a pure
/// ensemble: the ensemble-lower budget-allocation value before flooring, at
/// per-ensemble budget ε/2.
pub fn qc_smoothed_i0(ensemble: &PureEnsemble, eps: f64) -> Result<f64> {
    ensemble_lower_value(ensemble, eps)
}

/// Tr of the positive part of Δ_n(γ) = ρ^{⊗n} − 2^{nγ} σ^{⊗n}.
pub fn divergence_diagnostic(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    gamma: f64,
) -> Result<f64> {
    divergence_diagnostic_with_cap(rho, sigma, n, gamma, DEFAULT_DIMENSION_CAP)
}

pub fn divergence_diagnostic_with_cap(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    gamma: f64,
    dimension_cap: usize,
) -> Result<f64> {
    let (rho_n, sigma_n) = tensor_powers(rho, sigma, n, dimension_cap)?;
    diagnostic_from_powers(&rho_n, &sigma_n, n, gamma)
}

fn diagnostic_from_powers(rho_n: &CMat, sigma_n: &CMat, n: usize, gamma: f64) -> Result<f64> {
    let scale = 2f64.powf(n as f64 * gamma);
    let delta = rho_n - sigma_n * num_complex::Complex64::new(scale, 0.0);
    positive_part_trace(&delta)
}

fn tensor_powers(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    dimension_cap: usize,
) -> Result<(CMat, CMat)> {
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.total_dim(),
            got: sigma.total_dim(),
        });
    }
    let d = rho.total_dim();
    let total = d.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > dimension_cap {
        return Err(Error::InvalidArgument(format!(
            "tensor power dimension {total} exceeds the cap {dimension_cap}"
        )));
    }
    let mut rho_n = rho.matrix().clone();
    let mut sigma_n = sigma.matrix().clone();
    for _ in 1..n {
        rho_n = kron(&rho_n, rho.matrix());
        sigma_n = kron(&sigma_n, sigma.matrix());
    }
    Ok((rho_n, sigma_n))
}

/// Evenly spaced γ grid over [start, stop].
#[derive(Debug, Clone, Copy)]
pub struct GammaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for GammaGrid {
    fn default() -> Self {
        GammaGrid {
            start: -6.0,
            stop: 2.0,
            step: 0.01,
        }
    }
}

impl GammaGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.step <= 0.0 || self.stop < self.start {
            return Err(Error::InvalidArgument("degenerate gamma grid".into()));
        }
        let count = ((self.stop - self.start) / self.step).floor() as usize + 1;
        Ok((0..count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

/// Per-n diagnostic curves and the extracted rate estimates.
#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    pub n_values: Vec<usize>,
    /// One (γ, value) curve per n, in grid order.
    pub gamma_curve: Vec<Vec<(f64, f64)>>,
    /// Largest grid γ whose diagnostic stays ≥ 1 − tol, per n.
    pub rate_estimate: Vec<f64>,
    pub tol: f64,
}

/// Finite-n proxy for the spectral inf-divergence rate: for each n ≤ n_max,
/// the largest grid γ with Tr[{Δ_n(γ) ≥ 0} Δ_n(γ)] ≥ 1 − tol.
pub fn inf_divergence_rate_estimate(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n_max: usize,
    tol: f64,
    grid: &GammaGrid,
) -> Result<SpectrumEstimate> {
    inf_divergence_rate_estimate_with_cap(rho, sigma, n_max, tol, grid, DEFAULT_DIMENSION_CAP)
}

pub fn inf_divergence_rate_estimate_with_cap(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n_max: usize,
    tol: f64,
    grid: &GammaGrid,
    dimension_cap: usize,
) -> Result<SpectrumEstimate> {
    let gammas = grid.points()?;
    if gammas.is_empty() {
        return Err(Error::InvalidArgument("empty gamma grid".into()));
    }
    let mut n_values = Vec::new();
    let mut curves = Vec::new();
    let mut rates = Vec::new();
    for n in 1..=n_max.max(1) {
        let (rho_n, sigma_n) = tensor_powers(rho, sigma, n, dimension_cap)?;
        let mut curve = Vec::with_capacity(gammas.len());
        let mut rate = f64::NEG_INFINITY;
        for &gamma in &gammas {
            let value = diagnostic_from_powers(&rho_n, &sigma_n, n, gamma)?;
            if value >= 1.0 - tol {
                rate = rate.max(gamma);
            }
            curve.push((gamma, value));
        }
        n_values.push(n);
        curves.push(curve);
        rates.push(rate);
    }
    Ok(SpectrumEstimate {
        n_values,
        gamma_curve: curves,
        rate_estimate: rates,
        tol,
    })
}

/// Entanglement of assistance in its entropic form: a certified lower bound
/// on max over decompositions of Σ p_i S(ρ_A^i), with the witness ensemble.
pub fn entropic_eoa(
    rho_ab: &DensityMatrix,
    opts: &SearchOptions,
) -> Result<(f64, PureEnsemble)> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "entanglement of assistance expects a bipartite state".into(),
        ));
    }
    let objective = |ensemble: &PureEnsemble| -> f64 {
        average_entanglement_entropy(ensemble).unwrap_or(f64::NEG_INFINITY)
    };
    let outcome = decomposition_search(rho_ab, &objective, opts)?;
    Ok((outcome.value, outcome.ensemble))
}

/// Σ p_i S(ρ_A^{φ_i}) for a pure ensemble.
pub fn average_entanglement_entropy(ensemble: &PureEnsemble) -> Result<f64> {
    let mut total = 0.0;
    for (p, member) in ensemble.members() {
        let spectrum = member.schmidt_spectrum()?;
        let mut s = 0.0;
        for q in spectrum {
            if q > 0.0 {
                s -= q * q.log2();
            }
        }
        total += p * s;
    }
    Ok(total)
}

/// The asymptotic-assistance reference ceiling min{S(ρ_A), S(ρ_B)}; a cited
/// external result used only as a sanity ceiling.
pub fn asymptotic_reference(rho_ab: &DensityMatrix) -> Result<f64> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "reference ceiling expects a bipartite state".into(),
        ));
    }
    let s_a = von_neumann_entropy(&rho_ab.partial_trace(0)?).bits();
    let s_b = von_neumann_entropy(&rho_ab.partial_trace(1)?).bits();
    Ok(s_a.min(s_b))
}
