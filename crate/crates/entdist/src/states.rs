//! State carriers and structural operations: density matrices with declared
//! subsystem dimensions, bipartite pure states with Schmidt data, partial
//! traces, purification, support projectors, and the majorization rank.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::linalg::{
    czero, hermiticity_defect, hermitize, kron, trace, HermitianEigenSystem, CMat, CVec,
    DEFAULT_RANK_TOL, DEFAULT_TOL,
};
use crate::{Error, Result};

/// Complex Hermitian PSD matrix with declared subsystem dimensions.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMat,
    trace_tol: f64,
    subnormalized: bool,
}

impl DensityMatrix {
    /// A normalized state: Hermitian within tolerance, eigenvalues ≥ −tol,
    /// trace within tolerance of 1.
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        Self::with_options(dims, mat, DEFAULT_TOL, false)
    }

    /// A subnormalized positive operator with trace in (0, 1 + tol].
    pub fn new_subnormalized(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        Self::with_options(dims, mat, DEFAULT_TOL, true)
    }

    pub fn with_options(
        dims: Vec<usize>,
        mat: CMat,
        trace_tol: f64,
        subnormalized: bool,
    ) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "subsystem dimensions must be positive".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare(mat.nrows(), mat.ncols()));
        }
        if mat.nrows() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: mat.nrows(),
            });
        }
        let defect = hermiticity_defect(&mat);
        if defect > trace_tol {
            return Err(Error::NotHermitian(defect));
        }
        let mat = hermitize(&mat);
        let tr = trace(&mat);
        if tr.im.abs() > trace_tol {
            return Err(Error::InvalidTrace {
                got: tr.im,
                expected: "real trace",
            });
        }
        if subnormalized {
            if tr.re <= 0.0 || tr.re > 1.0 + trace_tol {
                return Err(Error::InvalidTrace {
                    got: tr.re,
                    expected: "trace in (0, 1]",
                });
            }
        } else if (tr.re - 1.0).abs() > trace_tol {
            return Err(Error::InvalidTrace {
                got: tr.re,
                expected: "unit trace",
            });
        }
        let es = HermitianEigenSystem::new(&mat)?;
        if es.min_eigenvalue() < -trace_tol {
            return Err(Error::NotPsd(es.min_eigenvalue()));
        }
        Ok(DensityMatrix {
            dims,
            mat,
            trace_tol,
            subnormalized,
        })
    }

    pub fn from_diagonal(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        let mat = CMat::from_diagonal(&CVec::from_iterator(
            probs.len(),
            probs.iter().map(|&p| C64::new(p, 0.0)),
        ));
        Self::new(dims, mat)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mat = CMat::identity(total, total) / C64::new(total as f64, 0.0);
        Self::new(dims, mat)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn trace_tol(&self) -> f64 {
        self.trace_tol
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    pub fn eigensystem(&self) -> HermitianEigenSystem {
        HermitianEigenSystem::new(&self.mat).expect("validated matrix is square")
    }

    /// Eigenvalues clamped to [0, ∞), descending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eigensystem()
            .values
            .iter()
            .map(|&v| v.max(0.0))
            .collect()
    }

    /// Reinterpret adjacent subsystems as one: `[0..split)` versus `[split..)`.
    pub fn bipartition(&self, split: usize) -> Result<DensityMatrix> {
        if split == 0 || split >= self.dims.len() {
            return Err(Error::BadSubsystem {
                index: split,
                count: self.dims.len(),
            });
        }
        let da: usize = self.dims[..split].iter().product();
        let db: usize = self.dims[split..].iter().product();
        Ok(DensityMatrix {
            dims: vec![da, db],
            mat: self.mat.clone(),
            trace_tol: self.trace_tol,
            subnormalized: self.subnormalized,
        })
    }

    /// Trace out one subsystem, keeping the others in order.
    pub fn trace_out(&self, sys: usize) -> Result<DensityMatrix> {
        let (mat, dims) = trace_out_matrix(&self.mat, &self.dims, sys)?;
        Ok(DensityMatrix {
            dims,
            mat,
            trace_tol: self.trace_tol,
            subnormalized: self.subnormalized,
        })
    }

    /// Keep one subsystem, tracing out all the others.
    pub fn partial_trace(&self, keep: usize) -> Result<DensityMatrix> {
        if keep >= self.dims.len() {
            return Err(Error::BadSubsystem {
                index: keep,
                count: self.dims.len(),
            });
        }
        let mut state = self.clone();
        let mut keep = keep;
        while state.dims.len() > 1 {
            let victim = if keep == 0 { 1 } else { 0 };
            state = state.trace_out(victim)?;
            if victim < keep {
                keep -= 1;
            }
        }
        Ok(state)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            mat: kron(&self.mat, &other.mat),
            trace_tol: self.trace_tol.max(other.trace_tol),
            subnormalized: self.subnormalized || other.subnormalized,
        }
    }

    /// Projector onto the support: eigendirections above `rank_tol`.
    pub fn support_projector(&self, rank_tol: f64) -> CMat {
        self.eigensystem().support_projector(rank_tol)
    }

    pub fn rank(&self, rank_tol: f64) -> usize {
        self.eigensystem().rank(rank_tol)
    }

    /// Purification on system ⊗ reference, reference dimension = numerical rank.
    pub fn purify(&self) -> Result<PureState> {
        if self.subnormalized {
            return Err(Error::InvalidArgument(
                "purification requires a normalized state".into(),
            ));
        }
        let es = self.eigensystem();
        let rank = es.rank(DEFAULT_RANK_TOL).max(1);
        let d = self.total_dim();
        let mut amps = CVec::zeros(d * rank);
        for k in 0..rank {
            let weight = es.values[k].max(0.0).sqrt();
            let col = es.vectors.column(k);
            for i in 0..d {
                amps[i * rank + k] = col[i] * C64::new(weight, 0.0);
            }
        }
        let mut dims = self.dims.clone();
        dims.push(rank);
        PureState::new(dims, amps)
    }
}

/// Unit (or subnormalized) complex vector over a multipartite space.
#[derive(Debug, Clone)]
pub struct PureState {
    dims: Vec<usize>,
    amps: CVec,
    norm: f64,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: CVec) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "subsystem dimensions must be positive".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if norm <= DEFAULT_RANK_TOL {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        if norm > 1.0 + DEFAULT_TOL {
            return Err(Error::InvalidTrace {
                got: norm * norm,
                expected: "squared norm in (0, 1]",
            });
        }
        Ok(PureState { dims, amps, norm })
    }

    /// |i⟩|j⟩…: a computational basis product state.
    pub fn basis_state(dims: Vec<usize>, indices: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if indices.len() != dims.len() || indices.iter().zip(&dims).any(|(&i, &d)| i >= d) {
            return Err(Error::InvalidArgument("basis index out of range".into()));
        }
        let mut flat = 0usize;
        for (k, &i) in indices.iter().enumerate() {
            flat = flat * dims[k] + i;
        }
        let mut amps = CVec::zeros(total);
        amps[flat] = C64::new(1.0, 0.0);
        PureState::new(dims, amps)
    }

    /// Maximally entangled state of rank `m` on d ⊗ d: Σ_{i<m} |ii⟩ / √m.
    pub fn maximally_entangled(m: usize, d: usize) -> Result<Self> {
        if m == 0 || m > d {
            return Err(Error::InvalidArgument(
                "entanglement rank must lie in 1..=d".into(),
            ));
        }
        let mut amps = CVec::zeros(d * d);
        let w = C64::new(1.0 / (m as f64).sqrt(), 0.0);
        for i in 0..m {
            amps[i * d + i] = w;
        }
        PureState::new(vec![d, d], amps)
    }

    pub fn bell() -> Self {
        Self::maximally_entangled(2, 2).expect("valid")
    }

    /// Σ_k coeff_k |k⟩|k⟩ in computational bases; coefficients need not be
    /// normalized beyond Σ coeff² ≤ 1.
    pub fn from_schmidt_coefficients(coeffs: &[f64], dims: [usize; 2]) -> Result<Self> {
        let s = coeffs.len();
        if s > dims[0].min(dims[1]) {
            return Err(Error::InvalidArgument(
                "more Schmidt coefficients than the smaller dimension".into(),
            ));
        }
        let mut amps = CVec::zeros(dims[0] * dims[1]);
        for (k, &c) in coeffs.iter().enumerate() {
            amps[k * dims[1] + k] = C64::new(c, 0.0);
        }
        PureState::new(vec![dims[0], dims[1]], amps)
    }

    /// Σ_k coeff_k |a_k⟩|b_k⟩ for explicit orthonormal bases.
    pub fn from_schmidt_bases(
        coeffs: &[f64],
        left: &[CVec],
        right: &[CVec],
        dims: [usize; 2],
    ) -> Result<Self> {
        if coeffs.len() > left.len() || coeffs.len() > right.len() {
            return Err(Error::InvalidArgument(
                "fewer basis vectors than coefficients".into(),
            ));
        }
        let mut amps = CVec::zeros(dims[0] * dims[1]);
        for (k, &c) in coeffs.iter().enumerate() {
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    amps[i * dims[1] + j] += C64::new(c, 0.0) * left[k][i] * right[k][j];
                }
            }
        }
        PureState::new(vec![dims[0], dims[1]], amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    /// Regroup subsystems `[0..split)` against `[split..)` into a bipartite state.
    pub fn bipartition(&self, split: usize) -> Result<PureState> {
        if split == 0 || split >= self.dims.len() {
            return Err(Error::BadSubsystem {
                index: split,
                count: self.dims.len(),
            });
        }
        let da: usize = self.dims[..split].iter().product();
        let db: usize = self.dims[split..].iter().product();
        Ok(PureState {
            dims: vec![da, db],
            amps: self.amps.clone(),
            norm: self.norm,
        })
    }

    /// The projector |φ⟩⟨φ| as a density matrix (subnormalized when ‖φ‖ < 1).
    pub fn to_density(&self) -> DensityMatrix {
        let n = self.amps.len();
        let mut mat = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        let subnormalized = self.norm < 1.0 - DEFAULT_TOL;
        DensityMatrix {
            dims: self.dims.clone(),
            mat,
            trace_tol: DEFAULT_TOL,
            subnormalized,
        }
    }

    /// Reduced operator of the first tensor factor (bipartite states only).
    pub fn reduced_left(&self) -> Result<DensityMatrix> {
        let m = self.as_matrix()?;
        let mat = &m * m.adjoint();
        self.reduced_from(mat, self.dims[0])
    }

    /// Reduced operator of the second tensor factor (bipartite states only).
    pub fn reduced_right(&self) -> Result<DensityMatrix> {
        let m = self.as_matrix()?;
        let mat = (m.adjoint() * &m).transpose();
        self.reduced_from(mat, self.dims[1])
    }

    fn reduced_from(&self, mat: CMat, dim: usize) -> Result<DensityMatrix> {
        let subnormalized = self.norm < 1.0 - DEFAULT_TOL;
        Ok(DensityMatrix {
            dims: vec![dim],
            mat: hermitize(&mat),
            trace_tol: DEFAULT_TOL,
            subnormalized,
        })
    }

    /// Amplitudes reshaped to a d_A × d_B matrix (bipartite states only).
    pub fn as_matrix(&self) -> Result<CMat> {
        if !self.is_bipartite() {
            return Err(Error::InvalidArgument(
                "operation requires a bipartite state".into(),
            ));
        }
        let (da, db) = (self.dims[0], self.dims[1]);
        Ok(DMatrix::from_fn(da, db, |i, j| self.amps[i * db + j]))
    }

    /// Schmidt decomposition across the bipartite cut.
    pub fn schmidt(&self) -> Result<SchmidtDecomposition> {
        let m = self.as_matrix()?;
        SchmidtDecomposition::from_amplitude_matrix(&m)
    }

    /// Squared Schmidt coefficients normalized to sum to one. Entries at
    /// numerical-noise level are clamped to exact zero so downstream
    /// solvers see the true support.
    pub fn schmidt_spectrum(&self) -> Result<Vec<f64>> {
        let schmidt = self.schmidt()?;
        let total: f64 = schmidt.coefficients.iter().map(|c| c * c).sum();
        Ok(schmidt
            .coefficients
            .iter()
            .map(|c| {
                let q = c * c / total;
                if q > 1e-13 {
                    q
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                got: other.amps.len(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// Tensor two bipartite states, regrouping to (A₁A₂) ⊗ (B₁B₂).
    pub fn tensor_bipartite(&self, other: &PureState) -> Result<PureState> {
        if !self.is_bipartite() || !other.is_bipartite() {
            return Err(Error::InvalidArgument(
                "tensor_bipartite requires bipartite factors".into(),
            ));
        }
        let (a1, b1) = (self.dims[0], self.dims[1]);
        let (a2, b2) = (other.dims[0], other.dims[1]);
        let (da, db) = (a1 * a2, b1 * b2);
        let mut amps = CVec::zeros(da * db);
        for i1 in 0..a1 {
            for j1 in 0..b1 {
                let x = self.amps[i1 * b1 + j1];
                if x == czero() {
                    continue;
                }
                for i2 in 0..a2 {
                    for j2 in 0..b2 {
                        let y = other.amps[i2 * b2 + j2];
                        let row = i1 * a2 + i2;
                        let col = j1 * b2 + j2;
                        amps[row * db + col] += x * y;
                    }
                }
            }
        }
        PureState::new(vec![da, db], amps)
    }
}

/// Schmidt data: nonnegative coefficients sorted descending with matched
/// orthonormal bases, `Σ coefficients² = norm²`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<CVec>,
    pub right: Vec<CVec>,
}

impl SchmidtDecomposition {
    fn from_amplitude_matrix(m: &CMat) -> Result<Self> {
        let svd = m.clone().svd(true, true);
        let u = svd
            .u
            .ok_or_else(|| Error::InvalidArgument("SVD did not return U".into()))?;
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::InvalidArgument("SVD did not return V".into()))?;
        let s = svd.singular_values;
        let count = s.len();
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));

        let mut coefficients = Vec::with_capacity(count);
        let mut left = Vec::with_capacity(count);
        let mut right = Vec::with_capacity(count);
        for &k in &order {
            coefficients.push(s[k].max(0.0));
            let mut l: CVec = u.column(k).into_owned();
            let mut r: CVec = v_t.row(k).transpose();
            let phase = dominant_phase(&l);
            let correction = phase.conj();
            for x in l.iter_mut() {
                *x *= correction;
            }
            for x in r.iter_mut() {
                *x *= phase;
            }
            left.push(l);
            right.push(r);
        }

        // canonical order inside degenerate coefficient clusters
        let tie_tol = 1e-12;
        let mut start = 0;
        while start < count {
            let mut end = start + 1;
            while end < count && (coefficients[start] - coefficients[end]).abs() <= tie_tol {
                end += 1;
            }
            if end - start > 1 {
                let mut cluster: Vec<(CVec, CVec)> = (start..end)
                    .map(|k| (left[k].clone(), right[k].clone()))
                    .collect();
                cluster.sort_by(|a, b| crate::linalg::lex_cmp(&a.0, &b.0));
                for (offset, (l, r)) in cluster.into_iter().enumerate() {
                    left[start + offset] = l;
                    right[start + offset] = r;
                }
            }
            start = end;
        }

        Ok(SchmidtDecomposition {
            coefficients,
            left,
            right,
        })
    }

    /// Coefficient count above threshold.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }
}

fn dominant_phase(v: &CVec) -> C64 {
    for i in 0..v.len() {
        let a = v[i].norm();
        if a > 1e-10 {
            return v[i] / C64::new(a, 0.0);
        }
    }
    C64::new(1.0, 0.0)
}

/// Partial trace of a raw operator over one subsystem of the declared layout.
/// Works for any operator, not just states (e.g. support projectors).
pub fn trace_out_matrix(mat: &CMat, dims: &[usize], sys: usize) -> Result<(CMat, Vec<usize>)> {
    if dims.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two subsystems to take a partial trace".into(),
        ));
    }
    if sys >= dims.len() {
        return Err(Error::BadSubsystem {
            index: sys,
            count: dims.len(),
        });
    }
    let d_sys = dims[sys];
    let stride: usize = dims[sys + 1..].iter().product();
    let outer: usize = dims[..sys].iter().product();
    let reduced_dim = outer * stride;
    if mat.nrows() != reduced_dim * d_sys || mat.ncols() != mat.nrows() {
        return Err(Error::DimensionMismatch {
            expected: reduced_dim * d_sys,
            got: mat.nrows(),
        });
    }
    let mut out = CMat::zeros(reduced_dim, reduced_dim);
    for oa in 0..outer {
        for ia in 0..stride {
            let a = oa * stride + ia;
            for ob in 0..outer {
                for ib in 0..stride {
                    let b = ob * stride + ib;
                    let mut acc = czero();
                    for x in 0..d_sys {
                        let full_a = (oa * d_sys + x) * stride + ia;
                        let full_b = (ob * d_sys + x) * stride + ib;
                        acc += mat[(full_a, full_b)];
                    }
                    out[(a, b)] = acc;
                }
            }
        }
    }
    let mut reduced_dims = dims.to_vec();
    reduced_dims.remove(sys);
    Ok((out, reduced_dims))
}

/// ⌊1 / max λ⌋ with a floating-point-robust integer certificate:
/// the returned M satisfies M·λ_max ≤ 1 < (M+1)·λ_max up to 1e-9 slack.
pub fn distill_rank_from_spectrum(spectrum: &[f64]) -> Result<u64> {
    if spectrum.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    if spectrum.iter().any(|&p| p < -DEFAULT_TOL) {
        return Err(Error::InvalidArgument("negative probability".into()));
    }
    let total: f64 = spectrum.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidTrace {
            got: total,
            expected: "probabilities summing to one",
        });
    }
    let lmax = spectrum.iter().cloned().fold(0.0f64, f64::max);
    if lmax <= 0.0 {
        return Err(Error::InvalidArgument("all-zero spectrum".into()));
    }
    let mut m = (1.0 / lmax).floor().max(1.0) as u64;
    while ((m + 1) as f64) * lmax <= 1.0 + 1e-9 {
        m += 1;
    }
    while m > 1 && (m as f64) * lmax > 1.0 + 1e-9 {
        m -= 1;
    }
    Ok(m)
}

/// Sorted-partial-sum dominance against the uniform distribution on `m` points.
pub fn majorized_by_uniform(spectrum: &[f64], m: u64) -> bool {
    let mut sorted = spectrum.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut partial = 0.0;
    for (k, p) in sorted.iter().enumerate() {
        partial += p;
        let target = (k + 1) as f64 / m as f64;
        if partial > target.min(1.0) + 1e-9 {
            return false;
        }
    }
    true
}
