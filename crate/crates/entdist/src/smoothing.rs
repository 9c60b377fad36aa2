//! ε-ball machinery and smoothed entropic quantities.
//!
//! The smoothed min-entropy is computed exactly: a pinching in the state's
//! eigenbasis can only move a ball member closer to the state and can only
//! shrink its largest eigenvalue, so the optimum over the fidelity ball is
//! attained by a state diagonal in that eigenbasis. That reduces the problem
//! to a capped classical overlap maximization (`max_fidelity_under_cap`,
//! solved in closed form) wrapped in a bisection on the cap level.
//!
//! The two ball conventions differ on purpose and are carried by
//! [`SmoothingBudget`] so tests cannot confuse them: the state ball demands
//! F² ≥ 1 − ε², the operator ball demands Tr[Pρ] ≥ 1 − ε.

use num_complex::Complex64 as C64;

use crate::entropy::{
    fidelity, min_entropy, zero_coherent_information, EntropyValue,
};
use crate::linalg::{trace, CMat, DEFAULT_RANK_TOL};
use crate::states::{trace_out_matrix, DensityMatrix, PureState};
use crate::{Error, Result};

/// Which ε-ball a smoothed quantity ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallKind {
    /// Normalized states σ with F²(ρ, σ) ≥ 1 − ε².
    StateFidelityBall,
    /// Operators 0 ≤ P ≤ 1 with Tr[Pρ] ≥ 1 − ε.
    OperatorBall,
}

/// An ε together with the ball convention it budgets.
#[derive(Debug, Clone, Copy)]
pub struct SmoothingBudget {
    pub eps: f64,
    pub ball_kind: BallKind,
}

impl SmoothingBudget {
    pub fn state_ball(eps: f64) -> Result<Self> {
        Self::new(eps, BallKind::StateFidelityBall)
    }

    pub fn operator_ball(eps: f64) -> Result<Self> {
        Self::new(eps, BallKind::OperatorBall)
    }

    pub fn new(eps: f64, ball_kind: BallKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!(
                "smoothing parameter {eps} outside [0, 1]"
            )));
        }
        Ok(SmoothingBudget { eps, ball_kind })
    }

    /// Ball membership of a normalized state (state-fidelity convention).
    pub fn contains_state(
        &self,
        center: &DensityMatrix,
        candidate: &DensityMatrix,
        slack: f64,
    ) -> Result<bool> {
        let f = fidelity(center, candidate)?;
        Ok((candidate.trace() - 1.0).abs() <= 1e-6
            && f * f >= 1.0 - self.eps * self.eps - slack)
    }

    /// Ball membership of an effect operator (operator convention).
    pub fn contains_operator(
        &self,
        center: &DensityMatrix,
        p_op: &CMat,
        slack: f64,
    ) -> Result<bool> {
        crate::entropy::sqrt_effect(p_op)?;
        let overlap = trace(&(p_op * center.matrix())).re;
        Ok(overlap >= 1.0 - self.eps - slack)
    }
}

/// How a reported smoothed value relates to the underlying optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Exact,
    LowerBound,
    UpperBound,
}

/// The object achieving (or certifying) a smoothed value.
#[derive(Debug, Clone)]
pub enum SmoothingWitness {
    State(DensityMatrix),
    Operator(CMat),
}

/// A smoothed entropic value with its bound status and optional witness.
#[derive(Debug, Clone)]
pub struct SmoothedValue {
    pub value: EntropyValue,
    pub kind: BoundKind,
    pub witness: Option<SmoothingWitness>,
}

/// Result of the capped overlap maximization.
#[derive(Debug, Clone)]
pub struct CapFidelity {
    /// max Σ √(p_i q_i) over the capped simplex.
    pub fidelity: f64,
    /// A maximizing q of length `dim` (entries for `p` first, then the
    /// off-support filler coordinates).
    pub witness: Vec<f64>,
}

/// Maximize Σ_i √(p_i q_i) over probability vectors q on `dim` coordinates
/// with every entry capped at `cap`.
///
/// The maximizer has the capped-proportional form q_i = min(c·p_i, cap) on
/// the support of p, with any mass the cap forces off the support spread
/// over zero-support coordinates. Infeasible when cap·dim < 1.
pub fn max_fidelity_under_cap(p: &[f64], cap: f64, dim: usize) -> Result<CapFidelity> {
    if p.is_empty() || dim < p.len() {
        return Err(Error::InvalidArgument(
            "ambient dimension smaller than the spectrum".into(),
        ));
    }
    if cap <= 0.0 {
        return Err(Error::InvalidArgument("cap must be positive".into()));
    }
    if cap * (dim as f64) < 1.0 - 1e-12 {
        return Err(Error::Infeasible(format!(
            "cap {cap} on {dim} coordinates cannot carry unit mass"
        )));
    }
    let cap = cap.min(1.0);
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidTrace {
            got: total,
            expected: "probabilities summing to one",
        });
    }

    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted: Vec<f64> = order.iter().map(|&i| p[i]).collect();
    let support = sorted.iter().filter(|&&x| x > 0.0).count();

    let mut q_sorted = vec![0.0; p.len()];
    let mut fid = 0.0;
    let mut filler = 0.0;
    if cap * support as f64 <= 1.0 {
        // every support coordinate saturates; surplus goes off-support
        for (k, &pk) in sorted.iter().enumerate().take(support) {
            q_sorted[k] = cap;
            fid += (pk * cap).sqrt();
        }
        filler = 1.0 - cap * support as f64;
    } else {
        // water-filling: top k coordinates capped, the rest proportional
        let mut tail: Vec<f64> = vec![0.0; support + 1];
        for k in (0..support).rev() {
            tail[k] = tail[k + 1] + sorted[k];
        }
        for k in 0..support {
            let budget = 1.0 - cap * k as f64;
            if budget < 0.0 {
                break;
            }
            let c = budget / tail[k];
            let upper_ok = k == 0 || c * sorted[k - 1] >= cap - 1e-12;
            let lower_ok = c * sorted[k] <= cap + 1e-12;
            if upper_ok && lower_ok {
                for (j, &pj) in sorted.iter().enumerate().take(support) {
                    q_sorted[j] = if j < k { cap } else { c * pj };
                    fid += (pj * q_sorted[j]).sqrt();
                }
                break;
            }
        }
    }

    let mut witness = vec![0.0; dim];
    for (k, &orig) in order.iter().enumerate() {
        witness[orig] = q_sorted[k];
    }
    if filler > 1e-15 {
        let zero_coords: Vec<usize> = (0..dim)
            .filter(|&i| i >= p.len() || p[i] <= 0.0)
            .collect();
        let share = filler / zero_coords.len() as f64;
        for i in zero_coords {
            witness[i] += share;
        }
    }
    Ok(CapFidelity {
        fidelity: fid,
        witness,
    })
}

/// Smallest cap t such that the capped overlap reaches the fidelity target,
/// bisected to 1e-12 with a 1e-10 feasibility tolerance on the fidelity.
/// Returns (t, witness q at t).
pub fn smallest_feasible_cap(
    p: &[f64],
    dim: usize,
    fidelity_target: f64,
) -> Result<(f64, Vec<f64>)> {
    const FEASIBILITY_TOL: f64 = 1e-10;
    let lmax = p.iter().cloned().fold(0.0f64, f64::max);
    if fidelity_target <= 0.0 {
        let sol = max_fidelity_under_cap(p, 1.0 / dim as f64, dim)?;
        return Ok((1.0 / dim as f64, sol.witness));
    }
    let floor_cap = 1.0 / dim as f64;
    let at_floor = max_fidelity_under_cap(p, floor_cap, dim)?;
    if at_floor.fidelity >= fidelity_target - FEASIBILITY_TOL {
        return Ok((floor_cap, at_floor.witness));
    }
    let mut lo = floor_cap;
    let mut hi = lmax.max(floor_cap);
    let mut witness = p.to_vec();
    witness.resize(dim, 0.0);
    for _ in 0..80 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let sol = max_fidelity_under_cap(p, mid, dim)?;
        if sol.fidelity >= fidelity_target - FEASIBILITY_TOL {
            hi = mid;
            witness = sol.witness;
        } else {
            lo = mid;
        }
    }
    Ok((hi, witness))
}

/// Smoothed min-entropy S_min^ε(ρ): the largest min-entropy over the
/// fidelity ε-ball, with the maximizing state as witness. Exact.
pub fn smooth_min_entropy(rho: &DensityMatrix, eps: f64) -> Result<SmoothedValue> {
    let budget = SmoothingBudget::state_ball(eps)?;
    if rho.is_subnormalized() {
        return Err(Error::InvalidArgument(
            "smoothed min-entropy is defined for normalized states".into(),
        ));
    }
    let es = rho.eigensystem();
    // rank-threshold the spectrum: noise-level eigendirections must not
    // sell fidelity credit to the cap solver
    let p: Vec<f64> = es
        .values
        .iter()
        .map(|&v| if v > 1e-12 { v } else { 0.0 })
        .collect();
    let d = rho.total_dim();

    if budget.eps == 0.0 {
        return Ok(SmoothedValue {
            value: min_entropy(rho),
            kind: BoundKind::Exact,
            witness: Some(SmoothingWitness::State(rho.clone())),
        });
    }

    let target = (1.0 - budget.eps * budget.eps).max(0.0).sqrt();
    let (t_star, q) = smallest_feasible_cap(&p, d, target)?;
    let witness_mat = {
        let mut m = CMat::zeros(d, d);
        for (k, &qk) in q.iter().enumerate() {
            if qk == 0.0 {
                continue;
            }
            let col = es.vectors.column(k);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += col[i] * col[j].conj() * C64::new(qk, 0.0);
                }
            }
        }
        m
    };
    let witness = DensityMatrix::new(rho.dims().to_vec(), witness_mat)?;
    Ok(SmoothedValue {
        value: EntropyValue::finite(-t_star.log2()),
        kind: BoundKind::Exact,
        witness: Some(SmoothingWitness::State(witness)),
    })
}

/// The exact pure-state value shared by the smoothed zero-coherent
/// quantities: the best −log max q over spectra reachable by pure
/// perturbations, i.e. the cap solver on the Schmidt spectrum with ambient
/// dimension min(d_A, d_B).
fn pure_smoothed_value(phi: &PureState, eps: f64) -> Result<(f64, Vec<f64>)> {
    let p = phi.schmidt_spectrum()?;
    let ambient = phi.dims()[0].min(phi.dims()[1]);
    if eps == 0.0 {
        let lmax = p.iter().cloned().fold(0.0f64, f64::max);
        let mut q = p.clone();
        q.resize(ambient, 0.0);
        return Ok((-lmax.log2(), q));
    }
    let target = (1.0 - eps * eps).max(0.0).sqrt();
    let (t_star, q) = smallest_feasible_cap(&p, ambient, target)?;
    Ok((-t_star.log2(), q))
}

fn pure_from_density(rho: &DensityMatrix) -> Result<PureState> {
    let es = rho.eigensystem();
    let top = es.vectors.column(0).into_owned();
    PureState::new(rho.dims().to_vec(), top)
}

/// State-smoothed zero-coherent information I₀,ε^{A→B}.
///
/// Exact for pure inputs (the optimum over the ball is attained on pure
/// members, reachable through capped Schmidt spectra); a certified lower
/// bound with witness for mixed inputs.
pub fn state_smoothed_i0(rho_ab: &DensityMatrix, eps: f64) -> Result<SmoothedValue> {
    let budget = SmoothingBudget::state_ball(eps)?;
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "smoothed zero-coherent information needs two subsystems".into(),
        ));
    }
    let es = rho_ab.eigensystem();
    let rank = es.rank(DEFAULT_RANK_TOL);

    if rank <= 1 {
        let phi = pure_from_density(rho_ab)?;
        let (value, q) = pure_smoothed_value(&phi, budget.eps)?;
        let schmidt = phi.schmidt()?;
        let witness = pure_witness_from_schmidt(&schmidt, &q, phi.dims())?;
        return Ok(SmoothedValue {
            value: EntropyValue::finite(value),
            kind: BoundKind::Exact,
            witness: Some(SmoothingWitness::State(witness.to_density())),
        });
    }

    // mixed input: certified lower bound from a deterministic candidate pool
    let mut best: Option<(f64, DensityMatrix)> = None;
    let mut consider = |candidate: DensityMatrix| -> Result<()> {
        if !budget.contains_state(rho_ab, &candidate, 1e-10)? {
            return Ok(());
        }
        let v = zero_coherent_information(&candidate)?.bits();
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, candidate));
        }
        Ok(())
    };

    consider(rho_ab.clone())?;
    // eigenvector candidates, feasible when their weight is large enough
    for k in 0..rank {
        let col = es.vectors.column(k).into_owned();
        if let Ok(phi) = PureState::new(rho_ab.dims().to_vec(), col) {
            consider(phi.to_density())?;
        }
    }
    // renormalized spectral compressions √P ρ √P / Tr[Pρ]
    for k in 1..rank {
        let mut m = CMat::zeros(rho_ab.total_dim(), rho_ab.total_dim());
        for i in 0..k {
            let col = es.vectors.column(i);
            for a in 0..rho_ab.total_dim() {
                for b in 0..rho_ab.total_dim() {
                    m[(a, b)] += col[a] * col[b].conj();
                }
            }
        }
        let compressed = &m * rho_ab.matrix() * &m;
        let tr = trace(&compressed).re;
        if tr <= 1e-12 {
            continue;
        }
        let renorm = compressed / C64::new(tr, 0.0);
        if let Ok(state) = DensityMatrix::new(rho_ab.dims().to_vec(), renorm) {
            consider(state)?;
        }
    }

    let (value, witness) = best.expect("the state itself is always a ball member");
    Ok(SmoothedValue {
        value: EntropyValue::finite(value),
        kind: BoundKind::LowerBound,
        witness: Some(SmoothingWitness::State(witness)),
    })
}

/// Build a pure ball member with the prescribed reduced spectrum, reusing
/// the original state's Schmidt bases so the overlap is the capped one.
pub fn pure_witness_from_schmidt(
    schmidt: &crate::states::SchmidtDecomposition,
    q: &[f64],
    dims: &[usize],
) -> Result<PureState> {
    // q may spread over more directions than the Schmidt rank of the
    // original state; extend the bases to hold the extra coefficients.
    let s = dims[0].min(dims[1]);
    let coeffs: Vec<f64> = q.iter().take(s).map(|&x| x.max(0.0).sqrt()).collect();
    let left = complete_basis(&schmidt.left, dims[0], s);
    let right = complete_basis(&schmidt.right, dims[1], s);
    PureState::from_schmidt_bases(&coeffs, &left, &right, [dims[0], dims[1]])
}

/// Extend a partial orthonormal family to `count` vectors by Gram-Schmidt
/// over the computational basis.
fn complete_basis(vs: &[crate::linalg::CVec], dim: usize, count: usize) -> Vec<crate::linalg::CVec> {
    let mut basis: Vec<crate::linalg::CVec> = vs.to_vec();
    let mut k = 0usize;
    while basis.len() < count && k < dim {
        let mut v = crate::linalg::CVec::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v / C64::new(n, 0.0));
        }
        k += 1;
    }
    basis
}

/// Options for the restricted operator search behind the operator-smoothed
/// lower bound.
#[derive(Debug, Clone, Copy)]
pub struct OpSmoothingOptions {
    pub restarts: usize,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for OpSmoothingOptions {
    fn default() -> Self {
        OpSmoothingOptions {
            restarts: 200,
            sweeps: 3,
            seed: 0,
        }
    }
}

/// Operator-smoothed zero-coherent information Ĩ₀,ε^{A→B}.
///
/// Lower: the best value over test operators diagonal in ρ's eigenbasis
/// (spectral projectors plus coordinate-descent-refined coefficient
/// vectors). Upper: for pure states, the smoothed-min-entropy expression at
/// budget 2√ε minus log(1 − ε); for mixed states at ε > 0 no upper bound is
/// computed.
pub fn op_smoothed_i0(
    rho_ab: &DensityMatrix,
    eps: f64,
    opts: &OpSmoothingOptions,
) -> Result<(SmoothedValue, Option<SmoothedValue>)> {
    let budget = SmoothingBudget::operator_ball(eps)?;
    if rho_ab.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "smoothed zero-coherent information needs two subsystems".into(),
        ));
    }
    let d = rho_ab.total_dim();
    let es = rho_ab.eigensystem();
    let rank = es.rank(DEFAULT_RANK_TOL).max(1);
    let lambdas: Vec<f64> = es.values.iter().take(rank).map(|&v| v.max(0.0)).collect();
    let is_pure = rank == 1;

    if budget.eps == 0.0 {
        let exact = zero_coherent_information(rho_ab)?;
        let lower = SmoothedValue {
            value: exact,
            kind: BoundKind::Exact,
            witness: Some(SmoothingWitness::Operator(CMat::identity(d, d))),
        };
        let upper = SmoothedValue {
            value: exact,
            kind: BoundKind::Exact,
            witness: None,
        };
        return Ok((lower, Some(upper)));
    }

    // Tr_A of each eigenprojector, the building blocks of the objective
    let db = rho_ab.dims()[1];
    let reduced: Vec<CMat> = (0..rank)
        .map(|k| {
            let col = es.vectors.column(k);
            let mut proj = CMat::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    proj[(a, b)] = col[a] * col[b].conj();
                }
            }
            let (r, _) = trace_out_matrix(&proj, rho_ab.dims(), 0).expect("valid dims");
            r
        })
        .collect();

    let objective = |c: &[f64]| -> f64 {
        let mut acc = CMat::zeros(db, db);
        for (k, &ck) in c.iter().enumerate() {
            if ck > 0.0 {
                acc += &reduced[k] * C64::new(ck, 0.0);
            }
        }
        let es = crate::linalg::HermitianEigenSystem::new(&acc).expect("square");
        let lmax = es.max_eigenvalue();
        if lmax <= 0.0 {
            f64::NEG_INFINITY
        } else {
            -lmax.log2()
        }
    };
    let feasible_floor = |c: &[f64], i: usize| -> f64 {
        // smallest admissible c_i keeping Σ c λ ≥ 1 − ε
        let others: f64 = c
            .iter()
            .zip(&lambdas)
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (&cj, &lj))| cj * lj)
            .sum();
        if lambdas[i] <= 1e-15 {
            0.0
        } else {
            ((1.0 - budget.eps - others) / lambdas[i]).clamp(0.0, 1.0)
        }
    };

    let mut best_c: Option<Vec<f64>> = None;
    let mut best_v = f64::NEG_INFINITY;
    let mut consider = |c: Vec<f64>, v: f64| {
        if v > best_v {
            best_v = v;
            best_c = Some(c);
        }
    };

    // spectral projector candidates: keep the top k eigendirections
    let mut partial = 0.0;
    for (k, lambda) in lambdas.iter().enumerate() {
        partial += lambda;
        if partial >= 1.0 - budget.eps - 1e-12 {
            let mut c = vec![0.0; rank];
            for ck in c.iter_mut().take(k + 1) {
                *ck = 1.0;
            }
            let v = objective(&c);
            consider(c, v);
        }
    }
    // the identity is always admissible
    {
        let c = vec![1.0; rank];
        let v = objective(&c);
        consider(c, v);
    }

    // random restarts with cyclic coordinate descent
    let mut rng = crate::random::rng_from_seed(opts.seed);
    use rand::Rng;
    for _ in 0..opts.restarts {
        let mut c: Vec<f64> = (0..rank).map(|_| rng.gen::<f64>()).collect();
        let weight: f64 = c.iter().zip(&lambdas).map(|(&ck, &lk)| ck * lk).sum();
        if weight < 1.0 - budget.eps {
            // push toward the identity until admissible
            let slack: f64 = c
                .iter()
                .zip(&lambdas)
                .map(|(&ck, &lk)| (1.0 - ck) * lk)
                .sum();
            if slack <= 1e-15 {
                continue;
            }
            let theta = ((1.0 - budget.eps - weight) / slack).clamp(0.0, 1.0);
            for ck in c.iter_mut() {
                *ck += theta * (1.0 - *ck);
            }
        }
        for _ in 0..opts.sweeps {
            for i in 0..rank {
                let lo = feasible_floor(&c, i);
                let eval = |x: f64| {
                    let mut trial = c.clone();
                    trial[i] = x;
                    objective(&trial)
                };
                c[i] = golden_max(lo, 1.0, 1e-6, eval);
            }
        }
        let v = objective(&c);
        consider(c, v);
    }

    let (lower_value, lower_witness) = match best_c {
        Some(c) => {
            let mut p_op = CMat::zeros(d, d);
            for (k, &ck) in c.iter().enumerate() {
                let col = es.vectors.column(k);
                for a in 0..d {
                    for b in 0..d {
                        p_op[(a, b)] += col[a] * col[b].conj() * C64::new(ck, 0.0);
                    }
                }
            }
            (best_v, Some(SmoothingWitness::Operator(p_op)))
        }
        None => (zero_coherent_information(rho_ab)?.bits(), None),
    };
    let lower = SmoothedValue {
        value: EntropyValue::finite(lower_value),
        kind: BoundKind::LowerBound,
        witness: lower_witness,
    };

    let upper = if is_pure {
        let phi = pure_from_density(rho_ab)?;
        let wide = (2.0 * budget.eps.sqrt()).min(1.0);
        let (smin, _) = pure_smoothed_value(&phi, wide)?;
        Some(SmoothedValue {
            value: EntropyValue::finite(smin - (1.0 - budget.eps).log2()),
            kind: BoundKind::UpperBound,
            witness: None,
        })
    } else {
        None
    };

    Ok((lower, upper))
}

/// Golden-section maximization of a unimodal function on [lo, hi].
pub fn golden_max(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [lo, mid, hi];
    let mut best = candidates[0];
    let mut best_val = f(candidates[0]);
    for &x in &candidates[1..] {
        let v = f(x);
        if v > best_val {
            best_val = v;
            best = x;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::fidelity_pure_pure;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cap_at_lambda_max_returns_the_spectrum() {
        let p = [0.7, 0.3];
        let sol = max_fidelity_under_cap(&p, 0.7, 2).unwrap();
        assert_abs_diff_eq!(sol.fidelity, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.witness[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.witness[1], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn cap_spills_off_support() {
        let p = [1.0, 0.0];
        let sol = max_fidelity_under_cap(&p, 0.5, 2).unwrap();
        assert_abs_diff_eq!(sol.fidelity, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(sol.witness[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.witness[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cap_waterfills_on_support() {
        let p = [0.7, 0.3];
        let sol = max_fidelity_under_cap(&p, 0.5, 2).unwrap();
        assert_abs_diff_eq!(sol.fidelity, 0.35f64.sqrt() + 0.15f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(sol.witness[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.witness[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn cap_below_uniform_is_infeasible() {
        assert!(matches!(
            max_fidelity_under_cap(&[1.0, 0.0], 0.4, 2),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn smooth_min_entropy_of_maximally_mixed_saturates() {
        let rho = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        for eps in [0.0, 0.1, 0.5, 1.0] {
            let s = smooth_min_entropy(&rho, eps).unwrap();
            assert_abs_diff_eq!(s.value.bits(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn smooth_min_entropy_pure_state_example() {
        let rho = DensityMatrix::from_diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let s = smooth_min_entropy(&rho, 0.1).unwrap();
        assert_abs_diff_eq!(s.value.bits(), -(0.99f64.log2()), epsilon = 1e-9);
        match s.witness {
            Some(SmoothingWitness::State(w)) => {
                let spectrum = w.spectrum();
                assert_abs_diff_eq!(spectrum[0], 0.99, epsilon = 1e-9);
                assert_abs_diff_eq!(spectrum[1], 0.01, epsilon = 1e-9);
            }
            _ => panic!("missing witness"),
        }
    }

    #[test]
    fn smooth_min_entropy_monotone_and_bounded() {
        let rho = DensityMatrix::from_diagonal(vec![3], &[0.6, 0.3, 0.1]).unwrap();
        let mut last = -1.0;
        for k in 0..=10 {
            let eps = k as f64 / 10.0;
            let s = smooth_min_entropy(&rho, eps).unwrap().value.bits();
            assert!(s >= last - 1e-9);
            assert!(s <= (3.0f64).log2() + 1e-9);
            last = s;
        }
        let zero = smooth_min_entropy(&rho, 0.0).unwrap().value.bits();
        assert_abs_diff_eq!(zero, min_entropy(&rho).bits(), epsilon = 1e-12);
        assert!(smooth_min_entropy(&rho, 1.5).is_err());
    }

    #[test]
    fn smooth_min_entropy_witness_is_ball_member() {
        let rho = DensityMatrix::from_diagonal(vec![2], &[0.7, 0.3]).unwrap();
        let eps = 0.2;
        let s = smooth_min_entropy(&rho, eps).unwrap();
        let budget = SmoothingBudget::state_ball(eps).unwrap();
        match s.witness {
            Some(SmoothingWitness::State(w)) => {
                assert!(budget.contains_state(&rho, &w, 1e-9).unwrap());
                assert_abs_diff_eq!(
                    min_entropy(&w).bits(),
                    s.value.bits(),
                    epsilon = 1e-8
                );
            }
            _ => panic!("missing witness"),
        }
    }

    #[test]
    fn state_smoothed_on_mes_gives_log_m() {
        for m in 2..=4 {
            let psi = PureState::maximally_entangled(m, 4).unwrap().to_density();
            let s = state_smoothed_i0(&psi, 0.0).unwrap();
            assert_eq!(s.kind, BoundKind::Exact);
            assert_abs_diff_eq!(s.value.bits(), (m as f64).log2(), epsilon = 1e-9);
        }
    }

    #[test]
    fn state_smoothed_pure_reduces_to_smoothed_min_entropy() {
        let phi = PureState::from_schmidt_coefficients(&[0.6f64.sqrt(), 0.4f64.sqrt()], [2, 2])
            .unwrap();
        let s = state_smoothed_i0(&phi.to_density(), 0.1).unwrap();
        let marginal = DensityMatrix::from_diagonal(vec![2], &[0.6, 0.4]).unwrap();
        let expected = smooth_min_entropy(&marginal, 0.1).unwrap().value.bits();
        assert_abs_diff_eq!(s.value.bits(), expected, epsilon = 1e-9);
        // witness is a pure ball member reproducing the value
        match s.witness {
            Some(SmoothingWitness::State(w)) => {
                let f = fidelity_pure_pure(
                    &pure_from_density(&w).unwrap(),
                    &phi,
                )
                .unwrap();
                assert!(f * f >= 1.0 - 0.1 * 0.1 - 1e-9);
                assert_abs_diff_eq!(
                    zero_coherent_information(&w).unwrap().bits(),
                    s.value.bits(),
                    epsilon = 1e-8
                );
            }
            _ => panic!("missing witness"),
        }
    }

    #[test]
    fn state_smoothed_mixed_is_a_lower_bound_with_member_witness() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let s = state_smoothed_i0(&rho, 0.1).unwrap();
        assert_eq!(s.kind, BoundKind::LowerBound);
        assert!(s.value.bits() >= -1.0 - 1e-9);
        let budget = SmoothingBudget::state_ball(0.1).unwrap();
        match s.witness {
            Some(SmoothingWitness::State(w)) => {
                assert!(budget.contains_state(&rho, &w, 1e-9).unwrap());
            }
            _ => panic!("missing witness"),
        }
    }

    #[test]
    fn op_smoothed_collapses_at_zero_eps() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let (lower, upper) = op_smoothed_i0(&rho, 0.0, &OpSmoothingOptions::default()).unwrap();
        let i0 = zero_coherent_information(&rho).unwrap().bits();
        assert_abs_diff_eq!(lower.value.bits(), i0, epsilon = 1e-9);
        assert_abs_diff_eq!(upper.unwrap().value.bits(), i0, epsilon = 1e-9);
    }

    #[test]
    fn op_smoothed_pure_bounds_are_ordered() {
        let opts = OpSmoothingOptions {
            restarts: 24,
            ..OpSmoothingOptions::default()
        };
        let mut rng = crate::random::rng_from_seed(3);
        for _ in 0..5 {
            let phi = crate::random::haar_pure(vec![2, 2], &mut rng).unwrap();
            let rho = phi.to_density();
            let i0 = zero_coherent_information(&rho).unwrap().bits();
            let (lower, upper) = op_smoothed_i0(&rho, 0.04, &opts).unwrap();
            let upper = upper.expect("pure input has an upper bound");
            assert!(lower.value.bits() >= i0 - 1e-9);
            assert!(lower.value.bits() <= upper.value.bits() + 1e-9);
        }
    }

    #[test]
    fn op_smoothed_pure_upper_formula() {
        let phi = PureState::from_schmidt_coefficients(&[0.6f64.sqrt(), 0.4f64.sqrt()], [2, 2])
            .unwrap();
        let (_, upper) =
            op_smoothed_i0(&phi.to_density(), 0.04, &OpSmoothingOptions::default()).unwrap();
        let marginal = DensityMatrix::from_diagonal(vec![2], &[0.6, 0.4]).unwrap();
        let expected =
            smooth_min_entropy(&marginal, 0.4).unwrap().value.bits() - (0.96f64).log2();
        assert_abs_diff_eq!(upper.unwrap().value.bits(), expected, epsilon = 1e-9);
    }

    #[test]
    fn smoothed_i0_lower_bounds_are_monotone_in_eps() {
        let opts = OpSmoothingOptions {
            restarts: 16,
            ..OpSmoothingOptions::default()
        };
        let pure =
            PureState::from_schmidt_coefficients(&[0.7f64.sqrt(), 0.3f64.sqrt()], [2, 2])
                .unwrap()
                .to_density();
        let mixed = DensityMatrix::from_diagonal(vec![2, 2], &[0.4, 0.3, 0.2, 0.1]).unwrap();
        for rho in [pure, mixed] {
            let mut last_state = f64::NEG_INFINITY;
            let mut last_op = f64::NEG_INFINITY;
            for eps in [0.0, 0.02, 0.08, 0.18, 0.4] {
                let s = state_smoothed_i0(&rho, eps).unwrap().value.bits();
                assert!(s >= last_state - 1e-9, "state-smoothed dipped at eps={eps}");
                last_state = s;
                let (lower, _) = op_smoothed_i0(&rho, eps, &opts).unwrap();
                let v = lower.value.bits();
                assert!(v >= last_op - 1e-9, "operator-smoothed dipped at eps={eps}");
                last_op = v;
            }
        }
    }

    #[test]
    fn op_smoothed_witness_is_admissible() {
        let rho = DensityMatrix::from_diagonal(vec![2, 2], &[0.4, 0.3, 0.2, 0.1]).unwrap();
        let eps = 0.15;
        let opts = OpSmoothingOptions {
            restarts: 24,
            ..OpSmoothingOptions::default()
        };
        let (lower, _) = op_smoothed_i0(&rho, eps, &opts).unwrap();
        let budget = SmoothingBudget::operator_ball(eps).unwrap();
        match lower.witness {
            Some(SmoothingWitness::Operator(p)) => {
                assert!(budget.contains_operator(&rho, &p, 1e-9).unwrap());
                let reproduced = crate::entropy::projected_i0_value(&rho, &p).unwrap().bits();
                assert_abs_diff_eq!(reproduced, lower.value.bits(), epsilon = 1e-8);
            }
            _ => panic!("missing witness"),
        }
    }
}
