//! Independent brute-force verifiers for the smoothing and ensemble
//! solvers, plus the randomized inequality test harness.
//!
//! The smoothing oracle optimizes over the simplex *grid* at resolution
//! 1/N. Two engines compute the same grid optimum: exhaustive composition
//! enumeration (used while the point count stays small) and an exact greedy
//! integer allocator (separable concave objective over a capped simplex, so
//! unit-by-unit greedy is provably optimal). The engines are cross-checked
//! against each other in the tests; neither shares code with the solver
//! path it verifies.

use rand::Rng;

use crate::decomposition::PureEnsemble;
use crate::entropy::{
    fidelity, fidelity_pure_pure, projected_i0_value, trace_distance, von_neumann_entropy,
    zero_coherent_information,
};
use crate::linalg::{trace_norm_hermitian, CMat};
use crate::smoothing::{op_smoothed_i0, smooth_min_entropy, state_smoothed_i0, OpSmoothingOptions};
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub grid_resolution: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// Exhaustive enumeration is limited to this many dimensions.
    pub dimension_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid_resolution: 1e-3,
            sample_count: 10_000,
            seed: 0,
            dimension_cap: 6,
        }
    }
}

fn units(cfg: &OracleConfig) -> usize {
    (1.0 / cfg.grid_resolution).ceil() as usize
}

/// Grid-search value of the smoothed min-entropy: the best −log₂ max(q)
/// over simplex grid points q with (Σ√(p_i q_i))² ≥ 1 − ε². The ambient
/// dimension is `p.len()`; pad with zeros to allow off-support mass.
pub fn oracle_smooth_min_entropy(p: &[f64], eps: f64, cfg: &OracleConfig) -> Result<f64> {
    let d = p.len();
    if d == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    if d > cfg.dimension_cap {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} above the oracle cap {}",
            cfg.dimension_cap
        )));
    }
    let n = units(cfg);
    let target = (1.0 - eps * eps).max(0.0).sqrt();
    let best_cap = match smallest_feasible_grid_cap(p, n, target) {
        Some(c) => c,
        None => {
            // no grid point reaches the target; σ = ρ itself is the only
            // certified member, giving the unsmoothed value
            let lmax = p.iter().cloned().fold(0.0f64, f64::max);
            return Ok(-lmax.log2());
        }
    };
    Ok(-((best_cap as f64 / n as f64).log2()))
}

/// Smallest integer cap C (in grid units) admitting a feasible grid point,
/// via binary search over C with the exact greedy allocator.
fn smallest_feasible_grid_cap(p: &[f64], n: usize, target: f64) -> Option<usize> {
    let d = p.len();
    let feasible = |cap: usize| greedy_grid_fidelity(p, n, cap) >= target - 1e-12;
    let mut lo = n.div_ceil(d);
    let mut hi = n;
    if !feasible(hi) {
        return None;
    }
    if feasible(lo) {
        return Some(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Exact maximum of Σ √(p_i m_i / N) over integer allocations Σ m_i = N,
/// m_i ≤ cap: the objective is separable and concave, so assigning units
/// one at a time to the best marginal gain is optimal.
fn greedy_grid_fidelity(p: &[f64], n: usize, cap: usize) -> f64 {
    let d = p.len();
    if cap * d < n {
        return f64::NEG_INFINITY;
    }
    let mut m = vec![0usize; d];
    for _ in 0..n {
        let mut best_i = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for i in 0..d {
            if m[i] >= cap {
                continue;
            }
            let gain = p[i].sqrt() * (((m[i] + 1) as f64).sqrt() - (m[i] as f64).sqrt());
            if gain > best_gain + 1e-18 {
                best_gain = gain;
                best_i = i;
            }
        }
        m[best_i] += 1;
    }
    let nf = n as f64;
    p.iter()
        .zip(&m)
        .map(|(&pi, &mi)| (pi * mi as f64 / nf).sqrt())
        .sum()
}

/// Exhaustive composition enumeration of the same grid optimum, with
/// pigeonhole and Cauchy–Schwarz pruning. Exposed for cross-checking the
/// greedy engine on small instances.
pub fn enumerate_smooth_min_entropy(p: &[f64], eps: f64, n: usize) -> Result<f64> {
    let d = p.len();
    if d == 0 {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let target = (1.0 - eps * eps).max(0.0).sqrt();
    let mut tail_p = vec![0.0; d + 1];
    for i in (0..d).rev() {
        tail_p[i] = tail_p[i + 1] + p[i];
    }
    let mut best_cap = usize::MAX;
    let mut assignment = vec![0usize; d];
    enumerate_rec(
        p,
        &tail_p,
        n,
        target,
        0,
        n,
        0.0,
        0,
        &mut assignment,
        &mut best_cap,
    );
    if best_cap == usize::MAX {
        let lmax = p.iter().cloned().fold(0.0f64, f64::max);
        return Ok(-lmax.log2());
    }
    Ok(-((best_cap as f64 / n as f64).log2()))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    p: &[f64],
    tail_p: &[f64],
    n: usize,
    target: f64,
    coord: usize,
    remaining: usize,
    fid: f64,
    current_max: usize,
    assignment: &mut Vec<usize>,
    best_cap: &mut usize,
) {
    let d = p.len();
    let nf = n as f64;
    // pigeonhole: the eventual max cannot drop below this
    let forced = remaining.div_ceil((d - coord).max(1));
    if current_max.max(forced) >= *best_cap {
        return;
    }
    // optimistic fidelity via Cauchy–Schwarz on the unassigned block
    let optimistic = fid + (tail_p[coord] * remaining as f64 / nf).sqrt();
    if optimistic < target - 1e-12 {
        return;
    }
    if coord == d - 1 {
        let q = remaining;
        let total_fid = fid + (p[coord] * q as f64 / nf).sqrt();
        let mx = current_max.max(q);
        if total_fid >= target - 1e-12 && mx < *best_cap {
            *best_cap = mx;
        }
        return;
    }
    let upper = remaining.min(best_cap.saturating_sub(1));
    for q in (0..=upper).rev() {
        assignment[coord] = q;
        enumerate_rec(
            p,
            tail_p,
            n,
            target,
            coord + 1,
            remaining - q,
            fid + (p[coord] * q as f64 / nf).sqrt(),
            current_max.max(q),
            assignment,
            best_cap,
        );
    }
}

/// Falsification probe for the commuting-optimality reduction: sample
/// non-commuting ball members σ' = U e^{iθG} D(q) e^{−iθG} U† (U = ρ's
/// eigenbasis) and report the best −log₂ max(q) found among members of the
/// fidelity ball. Compare against the solver value externally.
pub fn oracle_noncommuting_probe(
    rho: &DensityMatrix,
    eps: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    let es = rho.eigensystem();
    let d = rho.total_dim();
    let p: Vec<f64> = es.values.iter().map(|&v| v.max(0.0)).collect();
    let mut rng = crate::random::rng_from_seed(cfg.seed);
    let mut best = f64::NEG_INFINITY;
    for sample in 0..cfg.sample_count {
        // candidate spectrum: perturbation of ρ's own, or fresh random
        let mut q: Vec<f64> = if sample % 2 == 0 {
            p.iter()
                .map(|&x| (x + 0.3 * (rng.gen::<f64>() - 0.5)).max(0.0))
                .collect()
        } else {
            (0..d).map(|_| rng.gen::<f64>()).collect()
        };
        let total: f64 = q.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for x in q.iter_mut() {
            *x /= total;
        }
        let theta = rng.gen::<f64>() * 0.3;
        let g = crate::random::random_hermitian(d, &mut rng);
        let rot = crate::linalg::unitary_exp(&g, theta)?;
        let mut diag = CMat::zeros(d, d);
        for (i, &qi) in q.iter().enumerate() {
            diag[(i, i)] = num_complex::Complex64::new(qi, 0.0);
        }
        let in_eigenbasis = &rot * &diag * rot.adjoint();
        let candidate_mat = &es.vectors * &in_eigenbasis * es.vectors.adjoint();
        let candidate = match DensityMatrix::with_options(
            rho.dims().to_vec(),
            candidate_mat,
            1e-7,
            false,
        ) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let f = fidelity(rho, &candidate)?;
        if f * f < 1.0 - eps * eps {
            continue;
        }
        let value = crate::entropy::min_entropy(&candidate).bits();
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// Which perturbation set the ensemble oracle searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleOracleMode {
    /// Normalized members, budget ε' = ε/2 (the lower-bound set).
    Normalized,
    /// Subnormalized members on a scalar grid, budget ε'' = √(2√ε).
    Subnormalized,
}

/// Grid search over per-member infidelity allocations and capped spectra:
/// the best min-over-members smoothed min-entropy within the average
/// fidelity budget. Returns the unfloored grid optimum.
pub fn oracle_ensemble_lower(
    ensemble: &PureEnsemble,
    eps: f64,
    mode: EnsembleOracleMode,
    cfg: &OracleConfig,
) -> Result<f64> {
    let budget = match mode {
        EnsembleOracleMode::Normalized => eps / 2.0,
        EnsembleOracleMode::Subnormalized => (2.0 * eps.sqrt()).sqrt(),
    };
    let n = units(cfg);
    let members: Vec<(f64, Vec<f64>)> = ensemble
        .members()
        .iter()
        .map(|(w, phi)| Ok((*w, phi.schmidt_spectrum()?)))
        .collect::<Result<_>>()?;
    for (_, spectrum) in &members {
        if spectrum.len() > cfg.dimension_cap {
            return Err(Error::InvalidArgument(
                "member dimension above the oracle cap".into(),
            ));
        }
    }

    // per-member allocation grids: member i may spend up to budget / w_i
    let steps = 250usize;
    let delta_grids: Vec<Vec<f64>> = members
        .iter()
        .map(|(w, _)| {
            let cap = (budget / w).min(1.0);
            (0..=steps).map(|k| cap * k as f64 / steps as f64).collect()
        })
        .collect();
    let member_value = |spectrum: &[f64], delta: f64| -> f64 {
        let target = 1.0 - delta;
        match mode {
            EnsembleOracleMode::Normalized => {
                match smallest_feasible_grid_cap(spectrum, n, target) {
                    Some(c) => -((c as f64 / n as f64).log2()),
                    None => {
                        let lmax = spectrum.iter().cloned().fold(0.0f64, f64::max);
                        -lmax.log2()
                    }
                }
            }
            EnsembleOracleMode::Subnormalized => {
                let mut best = f64::NEG_INFINITY;
                for ci in 1..=100 {
                    let c = ci as f64 / 100.0;
                    let needed = target / c.sqrt();
                    if needed > 1.0 {
                        continue;
                    }
                    if let Some(cap) = smallest_feasible_grid_cap(spectrum, n, needed) {
                        let value = -((c * cap as f64 / n as f64).log2());
                        best = best.max(value);
                    }
                }
                if target <= 0.0 {
                    best = best.max(f64::INFINITY);
                }
                best
            }
        }
    };

    let curves: Vec<Vec<f64>> = members
        .iter()
        .zip(&delta_grids)
        .map(|((_, spectrum), grid)| {
            grid.iter()
                .map(|&delta| member_value(spectrum, delta))
                .collect()
        })
        .collect();

    // enumerate weighted allocations over the grids
    let weights: Vec<f64> = members.iter().map(|(w, _)| *w).collect();
    let mut best = f64::NEG_INFINITY;
    let mut chosen = vec![0usize; members.len()];
    allocate_rec(
        &weights,
        &delta_grids,
        &curves,
        budget,
        0,
        0.0,
        &mut chosen,
        &mut best,
    );
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn allocate_rec(
    weights: &[f64],
    delta_grids: &[Vec<f64>],
    curves: &[Vec<f64>],
    budget: f64,
    member: usize,
    spent: f64,
    chosen: &mut Vec<usize>,
    best: &mut f64,
) {
    if member == weights.len() {
        let value = chosen
            .iter()
            .enumerate()
            .map(|(i, &k)| curves[i][k])
            .fold(f64::INFINITY, f64::min);
        if value > *best {
            *best = value;
        }
        return;
    }
    for (k, &delta) in delta_grids[member].iter().enumerate() {
        let cost = weights[member] * delta;
        if spent + cost > budget + 1e-12 {
            break;
        }
        chosen[member] = k;
        allocate_rec(
            weights,
            delta_grids,
            curves,
            budget,
            member + 1,
            spent + cost,
            chosen,
            best,
        );
    }
}

/// One inequality family's outcome over the random fixtures.
#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub trials: usize,
    /// Worst amount by which the inequality was broken; ≤ 0 means it held
    /// everywhere (reported as 0).
    pub max_violation: f64,
    pub min_slack: f64,
    pub mean_slack: f64,
}

/// The randomized-inequality harness report.
#[derive(Debug, Clone)]
pub struct LemmaSuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaSuiteReport {
    pub fn violations_above(&self, threshold: f64) -> usize {
        self.checks
            .iter()
            .filter(|c| c.max_violation > threshold)
            .count()
    }
}

struct SlackTracker {
    name: &'static str,
    trials: usize,
    max_violation: f64,
    min_slack: f64,
    sum_slack: f64,
}

impl SlackTracker {
    fn new(name: &'static str) -> Self {
        SlackTracker {
            name,
            trials: 0,
            max_violation: 0.0,
            min_slack: f64::INFINITY,
            sum_slack: 0.0,
        }
    }

    /// Record one instance of `lhs ≤ rhs` as slack = rhs − lhs.
    fn record(&mut self, slack: f64) {
        self.trials += 1;
        self.max_violation = self.max_violation.max(-slack);
        self.min_slack = self.min_slack.min(slack);
        self.sum_slack += slack;
    }

    fn finish(self) -> LemmaCheck {
        let mean = if self.trials > 0 {
            self.sum_slack / self.trials as f64
        } else {
            0.0
        };
        LemmaCheck {
            name: self.name,
            trials: self.trials,
            max_violation: self.max_violation.max(0.0),
            min_slack: if self.trials > 0 { self.min_slack } else { 0.0 },
            mean_slack: mean,
        }
    }
}

/// Run the lemma inequalities on seeded random fixtures. Violations are
/// report entries, never panics.
pub fn verify_lemma_suite(trials: usize, seed: u64, cfg: &OracleConfig) -> Result<LemmaSuiteReport> {
    let mut rng = crate::random::rng_from_seed(seed);
    let mut gentle = SlackTracker::new("gentle_measurement");
    let mut pure_overlap = SlackTracker::new("pure_overlap_after_effect");
    let mut renormalized = SlackTracker::new("renormalized_compression");
    let mut fvg_lower = SlackTracker::new("fvg_lower");
    let mut fvg_upper = SlackTracker::new("fvg_upper");
    let mut feasible_point = SlackTracker::new("projected_value_dominates_target");
    let mut chain_consistency = SlackTracker::new("pure_state_smoothing_consistency");
    let mut chain_order = SlackTracker::new("op_smoothed_lower_below_upper");
    let mut locc_monotone = SlackTracker::new("lo_popescu_monotonicity");

    let op_opts = OpSmoothingOptions {
        restarts: 8,
        sweeps: 2,
        seed,
    };
    let eps_cycle = [0.0, 0.01, 0.04, 0.1];
    let dim_cycle: Vec<(usize, usize)> = [(2, 2), (2, 3), (3, 2), (3, 3)]
        .into_iter()
        .filter(|&(da, db)| da <= cfg.dimension_cap && db <= cfg.dimension_cap)
        .collect();

    for trial in 0..trials {
        let eps = eps_cycle[trial % eps_cycle.len()];
        let (da, db) = dim_cycle[trial % dim_cycle.len()];
        let d = da * db;

        // Gentle measurement: Tr(ρΛ) ≥ 1 − δ ⇒ ‖ρ − √Λρ√Λ‖₁ ≤ 2√δ,
        // subnormalized ρ included.
        {
            let normalized = crate::random::induced_mixed(vec![d], 1 + trial % d, &mut rng)?;
            let rho = if trial % 3 == 2 {
                let scale = 0.5 + 0.5 * rng.gen::<f64>();
                DensityMatrix::new_subnormalized(
                    vec![d],
                    normalized.matrix() * num_complex::Complex64::new(scale, 0.0),
                )?
            } else {
                normalized
            };
            let strength = rng.gen::<f64>();
            let effect_raw = crate::random::random_effect(d, &mut rng);
            let effect = CMat::identity(d, d) * num_complex::Complex64::new(1.0 - strength, 0.0)
                + effect_raw * num_complex::Complex64::new(strength, 0.0);
            let sqrt_effect = crate::entropy::sqrt_effect(&effect)?;
            let overlap = crate::linalg::trace(&(&effect * rho.matrix())).re;
            let delta = (1.0 - overlap).max(0.0);
            let pinched = &sqrt_effect * rho.matrix() * &sqrt_effect;
            let dist = trace_norm_hermitian(&(rho.matrix() - &pinched))?;
            gentle.record(2.0 * delta.sqrt() - dist);
        }

        // Pure-state overlap after an effect: Tr(Pφ) ≥ 1 − ε ⇒ F ≥ 1 − √ε.
        {
            let phi = crate::random::haar_pure(vec![d], &mut rng)?;
            let effect = crate::random::random_effect(d, &mut rng);
            let sqrt_p = crate::entropy::sqrt_effect(&effect)?;
            let phid = phi.to_density();
            let overlap = crate::linalg::trace(&(&effect * phid.matrix())).re;
            let eps_actual = (1.0 - overlap).max(0.0);
            let mut projected = crate::linalg::CVec::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    projected[i] += sqrt_p[(i, j)] * phi.amplitudes()[j];
                }
            }
            if projected.norm() > 1e-8 {
                let projected_state = PureState::new(vec![d], projected)?;
                let f = fidelity_pure_pure(&projected_state, &phi)?;
                pure_overlap.record(f - (1.0 - eps_actual.sqrt()));
            }
        }

        // Renormalized compression: ω = √Pρ√P / Tr[Pρ] stays 2√ε-close.
        {
            let rho = crate::random::induced_mixed(vec![d], d, &mut rng)?;
            let effect = crate::random::random_effect(d, &mut rng);
            let sqrt_p = crate::entropy::sqrt_effect(&effect)?;
            let overlap = crate::linalg::trace(&(&effect * rho.matrix())).re;
            if overlap > 1e-9 {
                let eps_actual = (1.0 - overlap).max(0.0);
                let omega_mat = (&sqrt_p * rho.matrix() * &sqrt_p)
                    / num_complex::Complex64::new(overlap, 0.0);
                let omega = DensityMatrix::with_options(vec![d], omega_mat, 1e-7, false)?;
                let f = fidelity(&omega, &rho)?;
                renormalized.record(f - (1.0 - 2.0 * eps_actual.sqrt()));
            }
        }

        // Fuchs–van de Graaf sandwich.
        {
            let rho = crate::random::induced_mixed(vec![d], d, &mut rng)?;
            let sigma = crate::random::induced_mixed(vec![d], 1 + trial % d, &mut rng)?;
            let f = fidelity(&rho, &sigma)?;
            let half_t = 0.5 * trace_distance(&rho, &sigma)?;
            fvg_lower.record(half_t - (1.0 - f));
            fvg_upper.record((1.0 - f * f).max(0.0).sqrt() - half_t);
        }

        // Projected value at a near-support pure state dominates its
        // zero-coherent information (the feasible-point step of the
        // operator-smoothing bound).
        {
            let psi = crate::random::haar_pure(vec![da, db], &mut rng)?;
            let eta = 0.5 * rng.gen::<f64>();
            let noise = crate::random::induced_mixed(vec![da, db], d, &mut rng)?;
            let mixed_mat = psi.to_density().matrix()
                * num_complex::Complex64::new(1.0 - eta, 0.0)
                + noise.matrix() * num_complex::Complex64::new(eta, 0.0);
            let rho = DensityMatrix::new(vec![da, db], mixed_mat)?;
            let p_op = psi.to_density().matrix().clone();
            let value = projected_i0_value(&rho, &p_op)?.bits();
            let target = zero_coherent_information(&psi.to_density())?.bits();
            feasible_point.record(value - target);
        }

        // Pure-state smoothing chain.
        {
            let phi = crate::random::haar_pure(vec![da, db], &mut rng)?;
            let rho = phi.to_density();
            let smoothed = state_smoothed_i0(&rho, eps)?.value.bits();
            if da == db {
                let marginal = phi.reduced_left()?;
                let direct = smooth_min_entropy(&marginal, eps)?.value.bits();
                chain_consistency.record(1e-9 - (smoothed - direct).abs());
            }
            let (lower, upper) = op_smoothed_i0(&rho, eps, &op_opts)?;
            if let Some(upper) = upper {
                chain_order.record(upper.value.bits() - lower.value.bits());
            }
        }

        // Lo-Popescu monotonicity spot check on 2x2 states.
        if trial % 4 == 0 {
            let phi = crate::random::haar_pure(vec![2, 2], &mut rng)?;
            let omega = random_lo_popescu_output(&phi, &mut rng)?;
            let eps_spot = 0.01;
            let (out_lower, _) = op_smoothed_i0(&omega, eps_spot, &op_opts)?;
            let wide = 2.0 * eps_spot.sqrt();
            let (in_upper_smin, _) =
                pure_smoothed_reference(&phi, (2.0 * wide.sqrt()).min(1.0))?;
            let rhs = in_upper_smin - (1.0 - wide).log2();
            locc_monotone.record(rhs - out_lower.value.bits());
        }
    }

    Ok(LemmaSuiteReport {
        seed,
        trials,
        checks: vec![
            gentle.finish(),
            pure_overlap.finish(),
            renormalized.finish(),
            fvg_lower.finish(),
            fvg_upper.finish(),
            feasible_point.finish(),
            chain_consistency.finish(),
            chain_order.finish(),
            locc_monotone.finish(),
        ],
    })
}

/// The pure-state smoothed value used on the input side of the LOCC check.
fn pure_smoothed_reference(phi: &PureState, eps: f64) -> Result<(f64, ())> {
    let spectrum = phi.schmidt_spectrum()?;
    let ambient = phi.dims()[0].min(phi.dims()[1]);
    if eps == 0.0 {
        let lmax = spectrum.iter().cloned().fold(0.0f64, f64::max);
        return Ok((-lmax.log2(), ()));
    }
    let target = (1.0 - eps * eps).max(0.0).sqrt();
    let (t, _) = crate::smoothing::smallest_feasible_cap(&spectrum, ambient, target)?;
    Ok((-t.log2(), ()))
}

/// Apply a random one-way LOCC map of the form Σ_k (U_k ⊗ E_k) · (U_k ⊗ E_k)†
/// with Σ E_k† E_k = 1 to a pure state.
fn random_lo_popescu_output(
    phi: &PureState,
    rng: &mut impl Rng,
) -> Result<DensityMatrix> {
    let da = phi.dims()[0];
    let db = phi.dims()[1];
    let kraus_count = 2;
    // isometry V: H_B → H_B ⊗ H_K gives E_k = (1 ⊗ ⟨k|) V
    let big = crate::random::haar_unitary(db * kraus_count, rng);
    let mut kraus = Vec::with_capacity(kraus_count);
    for k in 0..kraus_count {
        let mut e = CMat::zeros(db, db);
        for row in 0..db {
            for col in 0..db {
                e[(row, col)] = big[(row * kraus_count + k, col)];
            }
        }
        kraus.push(e);
    }
    let d = da * db;
    let phid = phi.to_density();
    let mut out = CMat::zeros(d, d);
    for e in &kraus {
        let u = crate::random::haar_unitary(da, rng);
        let op = crate::linalg::kron(&u, e);
        out += &op * phid.matrix() * op.adjoint();
    }
    DensityMatrix::with_options(vec![da, db], out, 1e-7, false)
}

/// Sanity helper used by the CLI and tests: the probe value never beats the
/// exact solver by more than the stated tolerance.
pub fn noncommuting_gap(rho: &DensityMatrix, eps: f64, cfg: &OracleConfig) -> Result<f64> {
    let solver = smooth_min_entropy(rho, eps)?.value.bits();
    let probe = oracle_noncommuting_probe(rho, eps, cfg)?;
    Ok(probe - solver)
}

/// Average fidelity between matched members of two ensembles.
pub fn ensemble_average_fidelity(a: &PureEnsemble, b: &PureEnsemble) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut total = 0.0;
    for ((w, sa), (_, sb)) in a.members().iter().zip(b.members()) {
        total += w * fidelity_pure_pure(sa, sb)?;
    }
    Ok(total)
}

/// Diagnostic bundle for a state: the closed-form quantities the `measure`
/// command reports.
#[derive(Debug, Clone)]
pub struct StateDiagnostics {
    pub entropy: f64,
    pub min_entropy: f64,
    pub coherent_information: Option<f64>,
    pub zero_coherent_information: Option<f64>,
}

pub fn state_diagnostics(rho: &DensityMatrix) -> Result<StateDiagnostics> {
    let bipartite = rho.dims().len() == 2;
    Ok(StateDiagnostics {
        entropy: von_neumann_entropy(rho).bits(),
        min_entropy: crate::entropy::min_entropy(rho).bits(),
        coherent_information: if bipartite {
            Some(crate::entropy::coherent_information(rho)?.bits())
        } else {
            None
        },
        zero_coherent_information: if bipartite {
            Some(zero_coherent_information(rho)?.bits())
        } else {
            None
        },
    })
}

/// Whether an ensemble averages back to the given state, used when
/// validating witness files.
pub fn witness_matches_average(
    ensemble: &PureEnsemble,
    state: &DensityMatrix,
    tol: f64,
) -> Result<bool> {
    let avg = ensemble.average_state()?;
    Ok((avg.matrix() - state.matrix()).norm() <= tol)
}
