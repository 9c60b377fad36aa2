//! Closed-form distance measures and entropic functionals: fidelity, trace
//! distance, von Neumann / relative / Rényi entropies, min-entropy, and the
//! coherent and zero-coherent information.
//!
//! All logarithms are base 2. Quantities that can genuinely diverge (support
//! violations under relative entropies) come back as a flagged
//! [`EntropyValue`] instead of an error, because the smoothing machinery
//! deliberately probes near-violations.

use num_complex::Complex64 as C64;

use crate::linalg::{
    sqrt_psd, trace_norm_hermitian, HermitianEigenSystem, CMat, DEFAULT_RANK_TOL,
};
use crate::states::{trace_out_matrix, DensityMatrix, PureState};
use crate::{Error, Result};

/// A base-2 entropic value that may be +∞ when a support condition fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue {
    bits: f64,
    finite: bool,
}

impl EntropyValue {
    pub fn finite(bits: f64) -> Self {
        EntropyValue { bits, finite: true }
    }

    pub fn infinite() -> Self {
        EntropyValue {
            bits: f64::INFINITY,
            finite: false,
        }
    }

    /// The value in bits; +∞ when the support condition failed.
    pub fn bits(&self) -> f64 {
        if self.finite {
            self.bits
        } else {
            f64::INFINITY
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite
    }
}

/// Uhlmann fidelity Tr √(√ρ σ √ρ). Symmetric; 1 iff the (normalized) inputs
/// coincide; for subnormalized inputs the range is [0, √(Tr ρ · Tr σ)].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.total_dim(),
            got: sigma.total_dim(),
        });
    }
    let sr = sqrt_psd(rho.matrix())?;
    let inner = &sr * sigma.matrix() * &sr;
    let es = HermitianEigenSystem::new(&inner)?;
    Ok(es.values.iter().map(|&v| v.max(0.0).sqrt()).sum())
}

/// |⟨φ|ψ⟩|, valid for subnormalized vectors as well.
pub fn fidelity_pure_pure(phi: &PureState, psi: &PureState) -> Result<f64> {
    Ok(phi.inner(psi)?.norm())
}

/// √⟨φ̂|ρ|φ̂⟩ for the normalized direction φ̂ of a pure state.
pub fn fidelity_pure_mixed(phi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if phi.total_dim() != rho.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.total_dim(),
            got: phi.total_dim(),
        });
    }
    let v = phi.amplitudes();
    let mut overlap = C64::new(0.0, 0.0);
    for i in 0..v.len() {
        for j in 0..v.len() {
            overlap += v[i].conj() * rho.matrix()[(i, j)] * v[j];
        }
    }
    Ok(overlap.re.max(0.0).sqrt() / phi.norm())
}

/// ‖ρ − σ‖₁ = Tr |ρ − σ|.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.total_dim(),
            got: sigma.total_dim(),
        });
    }
    trace_norm_hermitian(&(rho.matrix() - sigma.matrix()))
}

/// S(ρ) = −Tr ρ log ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> EntropyValue {
    let mut s = 0.0;
    for p in rho.spectrum() {
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    EntropyValue::finite(s)
}

/// S(ρ‖σ) = Tr ρ (log ρ − log σ); +∞ when supp ρ ⊄ supp σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.total_dim(),
            got: sigma.total_dim(),
        });
    }
    let mut tr_rho_log_rho = 0.0;
    for p in rho.spectrum() {
        if p > 0.0 {
            tr_rho_log_rho += p * p.log2();
        }
    }
    let es = HermitianEigenSystem::new(sigma.matrix())?;
    let mut tr_rho_log_sigma = 0.0;
    let mut kernel_weight = 0.0;
    for k in 0..es.dim() {
        let mu = es.values[k];
        let w = es.vectors.column(k);
        let mut overlap = C64::new(0.0, 0.0);
        for i in 0..es.dim() {
            for j in 0..es.dim() {
                overlap += w[i].conj() * rho.matrix()[(i, j)] * w[j];
            }
        }
        let weight = overlap.re.max(0.0);
        if mu > DEFAULT_RANK_TOL {
            tr_rho_log_sigma += weight * mu.log2();
        } else {
            kernel_weight += weight;
        }
    }
    if kernel_weight > 1e-9 {
        return Ok(EntropyValue::infinite());
    }
    Ok(EntropyValue::finite(tr_rho_log_rho - tr_rho_log_sigma))
}

/// Relative Rényi entropy of order α ∈ (0, 1):
/// S_α(ρ‖σ) = log₂ Tr(ρ^α σ^{1−α}) / (α − 1).
pub fn renyi_relative_entropy(
    alpha: f64,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<EntropyValue> {
    if alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::InvalidArgument(
            "Rényi order must lie strictly inside (0, 1)".into(),
        ));
    }
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.total_dim(),
            got: sigma.total_dim(),
        });
    }
    let ra = crate::linalg::pow_psd(rho.matrix(), alpha)?;
    let sb = crate::linalg::pow_psd(sigma.matrix(), 1.0 - alpha)?;
    let t = crate::linalg::trace(&(&ra * &sb)).re;
    if t <= 1e-300 {
        return Ok(EntropyValue::infinite());
    }
    Ok(EntropyValue::finite(t.log2() / (alpha - 1.0)))
}

/// The projected order-zero quantity S₀^P(ρ‖σ) = −log Tr[√P Π_ρ √P σ].
/// With P = 1 this is S₀(ρ‖σ) = −log Tr(Π_ρ σ).
pub fn projected_zero_relative_entropy(
    p_op: &CMat,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<EntropyValue> {
    projected_zero_relative_entropy_with_rank_tol(p_op, rho, sigma, DEFAULT_RANK_TOL)
}

pub fn projected_zero_relative_entropy_with_rank_tol(
    p_op: &CMat,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    rank_tol: f64,
) -> Result<EntropyValue> {
    if rho.total_dim() != p_op.nrows() || sigma.total_dim() != p_op.nrows() {
        return Err(Error::DimensionMismatch {
            expected: p_op.nrows(),
            got: rho.total_dim(),
        });
    }
    let sqrt_p = sqrt_effect(p_op)?;
    let projector = rho.support_projector(rank_tol);
    let pinched = &sqrt_p * &projector * &sqrt_p;
    let t = crate::linalg::trace(&(&pinched * sigma.matrix())).re;
    if t <= 1e-300 {
        return Ok(EntropyValue::infinite());
    }
    Ok(EntropyValue::finite(-t.log2()))
}

/// √P for an effect operator, validating 0 ≤ P ≤ 1 within tolerance and
/// clamping its spectrum into [0, 1].
pub fn sqrt_effect(p_op: &CMat) -> Result<CMat> {
    let es = HermitianEigenSystem::new(p_op)?;
    let tol = 1e-8;
    if es.min_eigenvalue() < -tol || es.max_eigenvalue() > 1.0 + tol {
        return Err(Error::InvalidArgument(format!(
            "effect eigenvalues [{:.3e}, {:.3e}] escape [0, 1]",
            es.min_eigenvalue(),
            es.max_eigenvalue()
        )));
    }
    Ok(es.map_eigenvalues(|v| v.clamp(0.0, 1.0).sqrt()))
}

/// S_min(ρ) = −log λ_max(ρ).
pub fn min_entropy(rho: &DensityMatrix) -> EntropyValue {
    min_entropy_of_spectrum(&rho.spectrum())
}

pub fn min_entropy_of_spectrum(spectrum: &[f64]) -> EntropyValue {
    let lmax = spectrum.iter().cloned().fold(0.0f64, f64::max);
    if lmax <= 0.0 {
        return EntropyValue::infinite();
    }
    EntropyValue::finite(-lmax.log2())
}

/// I^{A→B}(ρ_AB) = S(ρ_B) − S(ρ_AB) on a two-subsystem state.
pub fn coherent_information(rho_ab: &DensityMatrix) -> Result<EntropyValue> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "coherent information needs exactly two subsystems".into(),
        ));
    }
    let rho_b = rho_ab.partial_trace(1)?;
    let s_b = von_neumann_entropy(&rho_b).bits();
    let s_ab = von_neumann_entropy(rho_ab).bits();
    Ok(EntropyValue::finite(s_b - s_ab))
}

/// Zero-coherent information I₀^{A→B}(ρ_AB) in closed form.
///
/// The minimization over σ_B of −log Tr[Π_ρ (1 ⊗ σ_B)] is attained on the
/// top eigenprojector of Tr_A Π_ρ, so the value is −log λ_max(Tr_A Π_ρ).
pub fn zero_coherent_information(rho_ab: &DensityMatrix) -> Result<EntropyValue> {
    zero_coherent_information_with_rank_tol(rho_ab, DEFAULT_RANK_TOL)
}

pub fn zero_coherent_information_with_rank_tol(
    rho_ab: &DensityMatrix,
    rank_tol: f64,
) -> Result<EntropyValue> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "zero-coherent information needs exactly two subsystems".into(),
        ));
    }
    let projector = rho_ab.support_projector(rank_tol);
    let (reduced, _) = trace_out_matrix(&projector, rho_ab.dims(), 0)?;
    let es = HermitianEigenSystem::new(&reduced)?;
    let lmax = es.max_eigenvalue();
    if lmax <= 0.0 {
        return Ok(EntropyValue::infinite());
    }
    Ok(EntropyValue::finite(-lmax.log2()))
}

/// −log λ_max of Tr_A[√P Π_ρ √P]: the inner minimum over σ_B of the
/// operator-smoothed zero-coherent information at a fixed test operator P.
pub fn projected_i0_value(rho_ab: &DensityMatrix, p_op: &CMat) -> Result<EntropyValue> {
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "projected value needs exactly two subsystems".into(),
        ));
    }
    let sqrt_p = sqrt_effect(p_op)?;
    let projector = rho_ab.support_projector(DEFAULT_RANK_TOL);
    let pinched = &sqrt_p * &projector * &sqrt_p;
    let (reduced, _) = trace_out_matrix(&pinched, rho_ab.dims(), 0)?;
    let es = HermitianEigenSystem::new(&reduced)?;
    let lmax = es.max_eigenvalue();
    if lmax <= 0.0 {
        return Ok(EntropyValue::infinite());
    }
    Ok(EntropyValue::finite(-lmax.log2()))
}
