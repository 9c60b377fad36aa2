//! Pure-state ensemble decompositions of a density matrix and the seeded
//! search over them.
//!
//! Every size-m pure decomposition of ρ = Σ_k λ_k |v_k⟩⟨v_k| corresponds to
//! an m×r isometry W via |φ̃_i⟩ = Σ_k W_{ik} √λ_k |v_k⟩. The search walks
//! that space with deterministic structured seeds (the eigen-ensemble,
//! pairwise Hadamard mixings, discrete Fourier mixings) followed by random
//! restarts, refining each start by coordinate descent over Givens
//! rotations. Results reduce in start order, so a fixed seed reproduces the
//! outcome exactly.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::linalg::{CMat, CVec, DEFAULT_RANK_TOL};
use crate::smoothing::golden_max;
use crate::states::{DensityMatrix, PureState};
use crate::{Error, Result};

/// Weighted list of bipartite pure states averaging to a density matrix.
#[derive(Debug, Clone)]
pub struct PureEnsemble {
    members: Vec<(f64, PureState)>,
}

impl PureEnsemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        let dims = members[0].1.dims().to_vec();
        let mut total = 0.0;
        for (w, state) in &members {
            if *w <= 0.0 {
                return Err(Error::InvalidArgument(
                    "ensemble weights must be positive".into(),
                ));
            }
            if state.dims() != dims {
                return Err(Error::InvalidArgument(
                    "ensemble members live on different spaces".into(),
                ));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidTrace {
                got: total,
                expected: "ensemble weights summing to one",
            });
        }
        Ok(PureEnsemble { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.members[0].1.dims()
    }

    /// Σ p_i |φ_i⟩⟨φ_i| (members are rescaled by their norms, so
    /// subnormalized witnesses average to a subnormalized operator).
    pub fn average_state(&self) -> Result<DensityMatrix> {
        let d = self.members[0].1.total_dim();
        let mut mat = CMat::zeros(d, d);
        for (w, state) in &self.members {
            let v = state.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    mat[(i, j)] += v[i] * v[j].conj() * C64::new(*w, 0.0);
                }
            }
        }
        let trace = crate::linalg::trace(&mat).re;
        let subnormalized = trace < 1.0 - 1e-9;
        DensityMatrix::with_options(self.dims().to_vec(), mat, 1e-7, subnormalized)
    }

    /// Product ensemble on doubled systems, members regrouped to
    /// (A₁A₂) ⊗ (B₁B₂).
    pub fn tensor_product(&self, other: &PureEnsemble) -> Result<PureEnsemble> {
        let mut members = Vec::with_capacity(self.len() * other.len());
        for (w1, s1) in &self.members {
            for (w2, s2) in &other.members {
                members.push((w1 * w2, s1.tensor_bipartite(s2)?));
            }
        }
        PureEnsemble::new(members)
    }
}

/// The ensemble induced by an m×r isometry acting on the eigendecomposition.
/// Members with negligible weight are dropped.
pub fn ensemble_from_isometry(rho: &DensityMatrix, isometry: &CMat) -> Result<PureEnsemble> {
    let es = rho.eigensystem();
    let rank = es.rank(DEFAULT_RANK_TOL).max(1);
    if isometry.ncols() != rank || isometry.nrows() < rank {
        return Err(Error::DimensionMismatch {
            expected: rank,
            got: isometry.ncols(),
        });
    }
    let d = rho.total_dim();
    let mut members = Vec::new();
    for i in 0..isometry.nrows() {
        let mut amps = CVec::zeros(d);
        for k in 0..rank {
            let w = isometry[(i, k)] * C64::new(es.values[k].max(0.0).sqrt(), 0.0);
            if w.norm() == 0.0 {
                continue;
            }
            let col = es.vectors.column(k);
            for a in 0..d {
                amps[a] += w * col[a];
            }
        }
        let weight = amps.norm_squared();
        if weight < 1e-12 {
            continue;
        }
        let normalized = &amps / C64::new(weight.sqrt(), 0.0);
        members.push((weight, PureState::new(rho.dims().to_vec(), normalized)?));
    }
    PureEnsemble::new(members)
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Number of decomposition starts, structured seeds included.
    pub budget: usize,
    pub seed: u64,
    /// Output multiplicities m range over rank ..= factor·rank.
    pub multiplicity_factor: usize,
    /// Coordinate-descent sweeps during the cheap pass.
    pub coarse_sweeps: usize,
    /// How many leading candidates get the high-precision polish.
    pub polish_top: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 200,
            seed: 0,
            multiplicity_factor: 2,
            coarse_sweeps: 2,
            polish_top: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub value: f64,
    pub ensemble: PureEnsemble,
    pub isometry: CMat,
}

/// Maximize an ensemble functional over pure-state decompositions of ρ.
///
/// The returned value is a certified lower bound on the supremum: the
/// witness ensemble reproduces it exactly.
pub fn decomposition_search(
    rho: &DensityMatrix,
    objective: &dyn Fn(&PureEnsemble) -> f64,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("search budget must be positive".into()));
    }
    if rho.dims().len() != 2 {
        return Err(Error::InvalidArgument(
            "decomposition search expects a bipartite state".into(),
        ));
    }
    let es = rho.eigensystem();
    let rank = es.rank(DEFAULT_RANK_TOL).max(1);
    let m_max = (rank * opts.multiplicity_factor.max(1)).max(rank);

    let mut starts: Vec<CMat> = Vec::new();
    starts.push(CMat::identity(rank, rank));
    for matching in pair_matchings(rank, 60) {
        starts.push(hadamard_matching_isometry(rank, &matching));
    }
    for m in rank..=m_max {
        starts.push(fourier_isometry(m, rank));
    }
    let mut rng = crate::random::rng_from_seed(opts.seed);
    while starts.len() < opts.budget {
        let m = rank + (rng.gen::<usize>() % (m_max - rank + 1));
        let u = crate::random::haar_unitary(m, &mut rng);
        starts.push(u.columns(0, rank).into_owned());
    }
    starts.truncate(opts.budget);

    let evaluate = |w: &CMat| -> Result<(f64, PureEnsemble)> {
        let ensemble = ensemble_from_isometry(rho, w)?;
        let v = objective(&ensemble);
        Ok((v, ensemble))
    };

    let mut coarse: Vec<(f64, CMat)> = Vec::with_capacity(starts.len());
    for mut w in starts {
        refine(&mut w, &|m| {
            evaluate(m).map(|(v, _)| v).unwrap_or(f64::NEG_INFINITY)
        }, opts.coarse_sweeps, 1e-3);
        let v = evaluate(&w).map(|(v, _)| v).unwrap_or(f64::NEG_INFINITY);
        coarse.push((v, w));
    }
    coarse.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut best: Option<(f64, CMat, PureEnsemble)> = None;
    for (_, mut w) in coarse.into_iter().take(opts.polish_top.max(1)) {
        refine(&mut w, &|m| {
            evaluate(m).map(|(v, _)| v).unwrap_or(f64::NEG_INFINITY)
        }, 6, 1e-8);
        if let Ok((v, ensemble)) = evaluate(&w) {
            if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                best = Some((v, w, ensemble));
            }
        }
    }
    let (value, isometry, ensemble) = best.expect("at least one start evaluates");
    Ok(SearchOutcome {
        value,
        ensemble,
        isometry,
    })
}

/// Cyclic coordinate descent over Givens angles and phases on the rows.
fn refine(w: &mut CMat, objective: &dyn Fn(&CMat) -> f64, sweeps: usize, tol: f64) {
    let m = w.nrows();
    if m < 2 {
        return;
    }
    let mut current = objective(w);
    for _ in 0..sweeps {
        let before = current;
        for i in 0..m {
            for j in (i + 1)..m {
                // rotation angle
                let theta = golden_max(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, tol, |t| {
                    let trial = apply_givens(w, i, j, t, 0.0);
                    objective(&trial)
                });
                let rotated = apply_givens(w, i, j, theta, 0.0);
                let v = objective(&rotated);
                if v > current {
                    *w = rotated;
                    current = v;
                }
                // relative phase
                let phi = golden_max(-std::f64::consts::PI, std::f64::consts::PI, tol, |p| {
                    let trial = apply_givens(w, i, j, 0.0, p);
                    objective(&trial)
                });
                let phased = apply_givens(w, i, j, 0.0, phi);
                let v = objective(&phased);
                if v > current {
                    *w = phased;
                    current = v;
                }
            }
        }
        if current - before <= 1e-13 {
            break;
        }
    }
}

/// Left-multiply rows i and j by [[cos θ, e^{iφ} sin θ], [−e^{−iφ} sin θ, cos θ]]
/// (φ also twists row j's phase when θ = 0).
fn apply_givens(w: &CMat, i: usize, j: usize, theta: f64, phi: f64) -> CMat {
    let mut out = w.clone();
    let (c, s) = (theta.cos(), theta.sin());
    let ph = C64::from_polar(1.0, phi);
    for k in 0..w.ncols() {
        let a = w[(i, k)];
        let b = w[(j, k)];
        out[(i, k)] = a * C64::new(c, 0.0) + b * ph * C64::new(s, 0.0);
        out[(j, k)] = -a * ph.conj() * C64::new(s, 0.0) + b * C64::new(c, 0.0);
    }
    if theta == 0.0 {
        for k in 0..w.ncols() {
            out[(j, k)] = w[(j, k)] * ph;
            out[(i, k)] = w[(i, k)];
        }
    }
    out
}

/// All perfect matchings (pairings) of 0..n, up to `cap` of them; odd n
/// leaves one element unpaired.
fn pair_matchings(n: usize, cap: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    let mut current = Vec::new();
    gen_matchings(&mut items, &mut current, &mut out, cap);
    out
}

fn gen_matchings(
    items: &mut [usize],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
    cap: usize,
) {
    if out.len() >= cap {
        return;
    }
    if items.len() < 2 {
        if !current.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    let first = items[0];
    for idx in 1..items.len() {
        let partner = items[idx];
        let mut rest: Vec<usize> = items
            .iter()
            .copied()
            .filter(|&x| x != first && x != partner)
            .collect();
        current.push((first, partner));
        gen_matchings(&mut rest, current, out, cap);
        current.pop();
        if out.len() >= cap {
            return;
        }
    }
}

fn hadamard_matching_isometry(rank: usize, matching: &[(usize, usize)]) -> CMat {
    let mut w = CMat::identity(rank, rank);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for &(a, b) in matching {
        for k in 0..rank {
            let x = w[(a, k)];
            let y = w[(b, k)];
            w[(a, k)] = (x + y) * C64::new(h, 0.0);
            w[(b, k)] = (x - y) * C64::new(h, 0.0);
        }
    }
    w
}

fn fourier_isometry(m: usize, rank: usize) -> CMat {
    let norm = 1.0 / (m as f64).sqrt();
    CMat::from_fn(m, rank, |j, k| {
        C64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ensemble_validation() {
        let bell = PureState::bell();
        assert!(PureEnsemble::new(vec![]).is_err());
        assert!(PureEnsemble::new(vec![(0.7, bell.clone()), (0.7, bell.clone())]).is_err());
        let ok = PureEnsemble::new(vec![(0.5, bell.clone()), (0.5, bell)]).unwrap();
        assert_eq!(ok.len(), 2);
    }

    #[test]
    fn isometry_ensembles_average_back_to_rho() {
        let rho = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        for matching in pair_matchings(2, 10) {
            let w = hadamard_matching_isometry(2, &matching);
            let ensemble = ensemble_from_isometry(&rho, &w).unwrap();
            let avg = ensemble.average_state().unwrap();
            assert!((avg.matrix() - rho.matrix()).norm() < 1e-10);
        }
        let w = fourier_isometry(4, 2);
        let ensemble = ensemble_from_isometry(&rho, &w).unwrap();
        let avg = ensemble.average_state().unwrap();
        assert!((avg.matrix() - rho.matrix()).norm() < 1e-10);
    }

    #[test]
    fn hadamard_matching_on_classical_mixture_yields_bells() {
        let rho = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let w = hadamard_matching_isometry(2, &[(0, 1)]);
        let ensemble = ensemble_from_isometry(&rho, &w).unwrap();
        for (weight, member) in ensemble.members() {
            assert_abs_diff_eq!(*weight, 0.5, epsilon = 1e-12);
            let spectrum = member.schmidt_spectrum().unwrap();
            assert_abs_diff_eq!(spectrum[0], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn matchings_of_four_elements() {
        let ms = pair_matchings(4, 100);
        assert_eq!(ms.len(), 3);
    }

    #[test]
    fn search_recovers_entangled_decomposition_of_classical_mixture() {
        let rho = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let objective = |ensemble: &PureEnsemble| -> f64 {
            ensemble
                .members()
                .iter()
                .map(|(_, s)| {
                    let spec = s.schmidt_spectrum().unwrap();
                    -spec.iter().cloned().fold(0.0f64, f64::max).log2()
                })
                .fold(f64::INFINITY, f64::min)
        };
        let opts = SearchOptions {
            budget: 12,
            ..SearchOptions::default()
        };
        let outcome = decomposition_search(&rho, &objective, &opts).unwrap();
        assert!(outcome.value >= 1.0 - 1e-9);
        assert!(decomposition_search(
            &rho,
            &objective,
            &SearchOptions {
                budget: 0,
                ..SearchOptions::default()
            }
        )
        .is_err());
    }

    #[test]
    fn tensor_product_ensembles() {
        let bell_ens = PureEnsemble::new(vec![(1.0, PureState::bell())]).unwrap();
        let prod = bell_ens.tensor_product(&bell_ens).unwrap();
        assert_eq!(prod.len(), 1);
        assert_eq!(prod.dims(), &[4, 4]);
    }
}
