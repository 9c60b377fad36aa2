//! Property tests for the structural invariants: partial traces, Schmidt
//! symmetry, the fidelity / trace-distance sandwich, majorization ranks,
//! and monotonicity of the smoothed quantities.

use entdist::entropy::{fidelity, trace_distance};
use entdist::linalg::CVec;
use entdist::smoothing::smooth_min_entropy;
use entdist::states::{distill_rank_from_spectrum, majorized_by_uniform, DensityMatrix, PureState};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn pure_state_strategy(da: usize, db: usize) -> impl Strategy<Value = PureState> {
    proptest::collection::vec(-1.0f64..1.0, 2 * da * db).prop_filter_map(
        "nonzero amplitude vector",
        move |raw| {
            let amps = CVec::from_iterator(
                da * db,
                raw.chunks(2).map(|c| C64::new(c[0], c[1])),
            );
            let norm = amps.norm();
            if norm < 1e-3 {
                return None;
            }
            PureState::new(vec![da, db], amps / C64::new(norm, 0.0)).ok()
        },
    )
}

fn spectrum_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1e-6f64..1.0, d).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.iter().map(|x| x / total).collect()
    })
}

fn mixed_state_strategy(d: usize) -> impl Strategy<Value = DensityMatrix> {
    (spectrum_strategy(d), any::<u64>()).prop_map(move |(spectrum, seed)| {
        let mut rng = entdist::random::rng_from_seed(seed);
        let u = entdist::random::haar_unitary(d, &mut rng);
        let mut mat = entdist::linalg::CMat::zeros(d, d);
        for (k, &p) in spectrum.iter().enumerate() {
            let col = u.column(k);
            for i in 0..d {
                for j in 0..d {
                    mat[(i, j)] += col[i] * col[j].conj() * C64::new(p, 0.0);
                }
            }
        }
        DensityMatrix::new(vec![d], mat).expect("unitary conjugation preserves validity")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace_and_positivity(phi in pure_state_strategy(2, 3)) {
        let rho = phi.to_density();
        for keep in 0..2 {
            let reduced = rho.partial_trace(keep).unwrap();
            prop_assert!((reduced.trace() - rho.trace()).abs() < 1e-9);
            let min_eig = reduced.spectrum().into_iter().fold(f64::INFINITY, f64::min);
            prop_assert!(min_eig > -1e-9);
        }
    }

    #[test]
    fn schmidt_spectra_of_both_marginals_coincide(phi in pure_state_strategy(2, 3)) {
        let left = phi.reduced_left().unwrap().spectrum();
        let right = phi.reduced_right().unwrap().spectrum();
        for k in 0..left.len().min(right.len()) {
            prop_assert!((left[k] - right[k]).abs() < 1e-9);
        }
        for &extra in &right[left.len()..] {
            prop_assert!(extra.abs() < 1e-9);
        }
    }

    #[test]
    fn support_projector_is_idempotent(rho in mixed_state_strategy(3)) {
        let p = rho.support_projector(1e-10);
        prop_assert!(((&p * &p) - &p).norm() < 1e-8);
        prop_assert!(((&p * rho.matrix() * &p) - rho.matrix()).norm() < 1e-8);
    }

    #[test]
    fn distill_rank_brackets_lambda_max(spectrum in spectrum_strategy(4)) {
        let m = distill_rank_from_spectrum(&spectrum).unwrap();
        let lmax = spectrum.iter().cloned().fold(0.0f64, f64::max);
        prop_assert!(lmax <= 1.0 / m as f64 + 1e-9);
        prop_assert!(lmax > 1.0 / (m + 1) as f64 - 1e-9);
        prop_assert!(majorized_by_uniform(&spectrum, m));
    }

    #[test]
    fn fuchs_van_de_graaf_sandwich(
        rho in mixed_state_strategy(2),
        sigma in mixed_state_strategy(2),
    ) {
        let f = fidelity(&rho, &sigma).unwrap();
        let half_t = 0.5 * trace_distance(&rho, &sigma).unwrap();
        prop_assert!(1.0 - f <= half_t + 1e-9);
        prop_assert!(half_t <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn smoothed_min_entropy_is_monotone_in_eps(spectrum in spectrum_strategy(3)) {
        let rho = DensityMatrix::from_diagonal(vec![3], &spectrum).unwrap();
        let mut last = f64::NEG_INFINITY;
        for eps in [0.0, 0.05, 0.1, 0.2, 0.5] {
            let v = smooth_min_entropy(&rho, eps).unwrap().value.bits();
            prop_assert!(v >= last - 1e-9);
            prop_assert!(v <= 3f64.log2() + 1e-9);
            last = v;
        }
    }
}

#[test]
fn ensemble_bounds_are_monotone_in_eps() {
    let mut rng = entdist::random::rng_from_seed(31);
    for _ in 0..5 {
        let members = vec![
            (0.5, entdist::random::haar_pure(vec![2, 2], &mut rng).unwrap()),
            (0.5, entdist::random::haar_pure(vec![2, 2], &mut rng).unwrap()),
        ];
        let ensemble = entdist::decomposition::PureEnsemble::new(members).unwrap();
        let mut last = f64::NEG_INFINITY;
        for eps in [0.0, 0.02, 0.08, 0.18] {
            let v = entdist::distillation::ensemble_lower_value(&ensemble, eps).unwrap();
            assert!(v >= last - 1e-9);
            last = v;
        }
    }
}
