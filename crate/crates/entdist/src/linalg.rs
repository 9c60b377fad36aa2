//! Dense complex Hermitian linear algebra underneath every other module.
//!
//! The one nontrivial policy here is determinism: eigensystems are
//! canonicalized (descending eigenvalues, fixed eigenvector phases,
//! lexicographic order inside degenerate clusters) so that repeated runs
//! and downstream searches reproduce bit-identical results.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default tolerance for Hermiticity / trace checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default threshold separating numerical rank from noise.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

/// Largest |(M - M†)_ij| over all entries.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(d.norm());
        }
    }
    worst
}

/// (M + M†)/2. Applied before every eigendecomposition.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn trace(m: &CMat) -> C64 {
    let mut t = czero();
    for i in 0..m.nrows() {
        t += m[(i, i)];
    }
    t
}

pub fn trace_re(m: &CMat) -> f64 {
    trace(m).re
}

/// Kronecker product, subsystem 0 most significant.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix with a canonical ordering.
///
/// Eigenvalues are sorted descending. Each eigenvector's first component of
/// modulus above `phase_tol` is rotated to the positive real axis, and ties
/// in the eigenvalues (within `tie_tol`) are broken by lexicographic
/// comparison of the phased eigenvectors, most-positive first.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub values: Vec<f64>,
    /// Column k is the eigenvector for `values[k]`.
    pub vectors: CMat,
}

impl HermitianEigenSystem {
    pub fn new(m: &CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        let h = hermitize(m);
        let (raw_values, raw_vectors) = eigen_with_retry(&h)?;
        let n = raw_values.len();
        let mut order: Vec<usize> = (0..n).collect();
        // indices by descending eigenvalue; canonical tie order fixed below
        order.sort_by(|&a, &b| raw_values[b].total_cmp(&raw_values[a]));

        let mut values = Vec::with_capacity(n);
        let mut vectors = CMat::zeros(n, n);
        for (k, &idx) in order.iter().enumerate() {
            values.push(raw_values[idx]);
            let mut col: CVec = raw_vectors.column(idx).into_owned();
            fix_phase(&mut col);
            vectors.set_column(k, &col);
        }

        let tie_tol = 1e-12 * (1.0 + values.first().map(|v| v.abs()).unwrap_or(0.0));
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (values[start] - values[end]).abs() <= tie_tol {
                end += 1;
            }
            if end - start > 1 {
                let mut cluster: Vec<CVec> =
                    (start..end).map(|k| vectors.column(k).into_owned()).collect();
                cluster.sort_by(lex_cmp);
                for (offset, col) in cluster.iter().enumerate() {
                    vectors.set_column(start + offset, col);
                }
            }
            start = end;
        }

        Ok(HermitianEigenSystem { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `rank_tol`.
    pub fn rank(&self, rank_tol: f64) -> usize {
        self.values.iter().filter(|&&v| v > rank_tol).count()
    }

    /// V f(Λ) V† for a scalar function applied to the eigenvalues.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for k in 0..n {
            let fv = f(self.values[k]);
            if fv == 0.0 {
                continue;
            }
            let col = self.vectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += col[i] * col[j].conj() * C64::new(fv, 0.0);
                }
            }
        }
        out
    }

    /// Projector onto eigendirections with eigenvalue above `rank_tol`.
    pub fn support_projector(&self, rank_tol: f64) -> CMat {
        self.map_eigenvalues(|v| if v > rank_tol { 1.0 } else { 0.0 })
    }

    pub fn reconstruction_error(&self, original: &CMat) -> f64 {
        let rebuilt = self.map_eigenvalues(|v| v);
        (&rebuilt - hermitize(original)).norm()
    }
}

/// The underlying QL iteration occasionally fails to converge on highly
/// degenerate inputs and emits NaNs. Conjugating by a fixed unitary leaves
/// the spectrum untouched but breaks the pattern that trips it, so retry in
/// a few deterministically rotated bases before giving up.
fn eigen_with_retry(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let es = h.clone().symmetric_eigen();
    if es.eigenvalues.iter().all(|v| v.is_finite()) {
        return Ok((es.eigenvalues.iter().copied().collect(), es.eigenvectors));
    }
    let n = h.nrows();
    for seed in [0xE16u64, 0x5EED, 0xBA5E] {
        let mut rng = crate::random::rng_from_seed(seed);
        let u = crate::random::haar_unitary(n, &mut rng);
        let rotated = hermitize(&(u.adjoint() * h * &u));
        let es = rotated.symmetric_eigen();
        if es.eigenvalues.iter().all(|v| v.is_finite()) {
            return Ok((
                es.eigenvalues.iter().copied().collect(),
                &u * es.eigenvectors,
            ));
        }
    }
    Err(Error::InvalidArgument(
        "eigendecomposition failed to converge".into(),
    ))
}

fn fix_phase(v: &mut CVec) {
    for i in 0..v.len() {
        let a = v[i].norm();
        if a > 1e-10 {
            let phase = v[i] / C64::new(a, 0.0);
            let correction = phase.conj();
            for j in 0..v.len() {
                v[j] *= correction;
            }
            return;
        }
    }
}

/// Lexicographic comparison of complex vectors by (re, im) pairs, larger
/// components first. Used to order degenerate eigen/Schmidt clusters.
pub fn lex_cmp(a: &CVec, b: &CVec) -> std::cmp::Ordering {
    for i in 0..a.len() {
        for (x, y) in [(a[i].re, b[i].re), (a[i].im, b[i].im)] {
            if (x - y).abs() > 1e-12 {
                // larger component first
                return y.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Equal);
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// √M for Hermitian PSD `M`, small negative eigenvalues clamped to zero.
pub fn sqrt_psd(m: &CMat) -> Result<CMat> {
    let es = HermitianEigenSystem::new(m)?;
    Ok(es.map_eigenvalues(|v| if v > 0.0 { v.sqrt() } else { 0.0 }))
}

/// M^a for Hermitian PSD `M` and exponent `a` in (0, 1]; kernel maps to kernel.
pub fn pow_psd(m: &CMat, a: f64) -> Result<CMat> {
    let es = HermitianEigenSystem::new(m)?;
    Ok(es.map_eigenvalues(|v| if v > 0.0 { v.powf(a) } else { 0.0 }))
}

/// exp(i θ G) for Hermitian `G`.
pub fn unitary_exp(g: &CMat, theta: f64) -> Result<CMat> {
    let es = HermitianEigenSystem::new(g)?;
    let n = es.dim();
    let mut out = CMat::zeros(n, n);
    for k in 0..n {
        let phase = C64::from_polar(1.0, theta * es.values[k]);
        let col = es.vectors.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * phase;
            }
        }
    }
    Ok(out)
}

/// Trace norm ‖M‖₁ of a Hermitian matrix: sum of |eigenvalues|.
pub fn trace_norm_hermitian(m: &CMat) -> Result<f64> {
    let defect = hermiticity_defect(m);
    if defect > 1e-7 {
        return Err(Error::NotHermitian(defect));
    }
    let es = HermitianEigenSystem::new(m)?;
    Ok(es.values.iter().map(|v| v.abs()).sum())
}

/// Trace of the positive part of a Hermitian matrix: Σ_{λ>0} λ.
pub fn positive_part_trace(m: &CMat) -> Result<f64> {
    let es = HermitianEigenSystem::new(m)?;
    Ok(es.values.iter().filter(|&&v| v > 0.0).sum())
}
