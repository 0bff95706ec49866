//! Finite frames in `C^d`.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second, `⟨u, v⟩ = Σ u_k conj(v_k)`, so the analysis operator is
//! `(Tf)_i = ⟨f, f_i⟩` and the frame operator is `S = T*T = Σ f_i f_i*`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix, LinalgError};
use crate::random::{random_unit_vector, trial_rng};

/// Slack allowed when sampled frame sums are compared with claimed bounds.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("a frame system needs at least one vector")]
    Empty,
    #[error("vector {index} has length {got}, expected {dim}")]
    WrongLength { index: usize, dim: usize, got: usize },
    #[error("vector {index} has a non-finite entry")]
    NonFinite { index: usize },
    #[error("the system is not a frame (lower bound {lower:e}, upper bound {upper:e})")]
    NotAFrame { lower: f64, upper: f64 },
    #[error("invalid bounds: lower {lower} exceeds upper {upper}")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An ordered, finite family of vectors in `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct FrameSystem {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    dim: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<FrameRepr> for FrameSystem {
    type Error = FrameError;

    fn try_from(repr: FrameRepr) -> Result<Self, FrameError> {
        let vectors = repr
            .vectors
            .into_iter()
            .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        FrameSystem::new(repr.dim, vectors)
    }
}

impl From<FrameSystem> for FrameRepr {
    fn from(f: FrameSystem) -> Self {
        FrameRepr {
            dim: f.dim,
            vectors: f
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl FrameSystem {
    pub fn new(dim: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self, FrameError> {
        if vectors.is_empty() {
            return Err(FrameError::Empty);
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(FrameError::WrongLength {
                    index,
                    dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(FrameError::NonFinite { index });
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Real-valued convenience constructor.
    pub fn from_real(dim: usize, vectors: &[&[f64]]) -> Result<Self, FrameError> {
        Self::new(
            dim,
            vectors
                .iter()
                .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// The standard orthonormal basis of `C^dim`.
    pub fn standard_basis(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut e = vec![Complex64::new(0.0, 0.0); dim];
                e[i] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        Self { dim, vectors }
    }

    /// Columns of a matrix as a family of vectors.
    pub fn from_columns(m: &ComplexMatrix) -> Result<Self, FrameError> {
        Self::new(m.rows(), (0..m.cols()).map(|c| m.column(c)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// `{L f_i}`; the result lives in `C^{L.rows}`.
    pub fn map(&self, l: &ComplexMatrix) -> Result<Self, FrameError> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| l.apply(v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(l.rows(), vectors)
    }

    /// `{f_i + g_i}` for two families of equal length and dimension.
    pub fn pointwise_sum(&self, other: &Self) -> Result<Self, FrameError> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch {
                left: (self.len(), self.dim),
                right: (other.len(), other.dim),
            }
            .into());
        }
        let vectors = self
            .vectors
            .iter()
            .zip(&other.vectors)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Self::new(self.dim, vectors)
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            dim: self.dim,
            vectors: order.iter().map(|&i| self.vectors[i].clone()).collect(),
        }
    }
}

/// Frame operator plus optimal bounds and the derived predicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameDiagnostics {
    pub frame_operator: ComplexMatrix,
    #[serde(rename = "A")]
    pub lower_bound: f64,
    #[serde(rename = "B")]
    pub upper_bound: f64,
    pub is_frame: bool,
    pub is_riesz_basis: bool,
    pub residuals: BTreeMap<String, f64>,
}

/// `m × d` matrix whose i-th row is `f_i*`, so `(Tf)_i = ⟨f, f_i⟩`.
pub fn analysis_matrix(f: &FrameSystem) -> ComplexMatrix {
    let rows: Vec<Vec<Complex64>> = f
        .vectors
        .iter()
        .map(|v| v.iter().map(|z| z.conj()).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

/// `d × m` synthesis matrix `T*` whose columns are the frame vectors.
pub fn synthesis_matrix(f: &FrameSystem) -> ComplexMatrix {
    ComplexMatrix::from_columns(&f.vectors)
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// `S = Σ f_i f_i*`.
///
/// The outer products are accumulated in a canonical order of the vectors,
/// so the result (and everything derived from it) is bit-identical under any
/// permutation of the family.
pub fn frame_operator(f: &FrameSystem) -> ComplexMatrix {
    let mut order: Vec<&Vec<Complex64>> = f.vectors.iter().collect();
    order.sort_by(|a, b| lexicographic(a, b));
    let d = f.dim;
    let mut s = ComplexMatrix::zeros(d, d);
    for v in order {
        for r in 0..d {
            for c in 0..d {
                s[(r, c)] += v[r] * v[c].conj();
            }
        }
    }
    s
}

/// Optimal frame bounds as the extreme eigenvalues of `S`.
///
/// A family is declared a frame when `λ_min > tol · λ_max`; a Riesz basis is
/// a frame with exactly `dim` vectors.
pub fn optimal_bounds(f: &FrameSystem, tol: f64) -> Result<FrameDiagnostics, FrameError> {
    let s = frame_operator(f);
    let eigenvalues = linalg::hermitian_eigenvalues(&s)?;
    let upper = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let lower = eigenvalues.last().copied().unwrap_or(0.0).clamp(0.0, upper);
    let is_frame = upper > 0.0 && lower > tol * upper;
    let trace: f64 = s.trace().re;
    let norms: f64 = f.vectors.iter().map(|v| linalg::norm_sq(v)).sum();
    let mut residuals = BTreeMap::new();
    residuals.insert(
        "trace_identity".to_string(),
        (trace - norms).abs() / norms.max(f64::MIN_POSITIVE),
    );
    Ok(FrameDiagnostics {
        frame_operator: s,
        lower_bound: lower,
        upper_bound: upper,
        is_frame,
        is_riesz_basis: is_frame && f.len() == f.dim,
        residuals,
    })
}

/// `{S⁻¹ f_i}`.
pub fn canonical_dual(f: &FrameSystem, tol: f64) -> Result<FrameSystem, FrameError> {
    let diag = optimal_bounds(f, tol)?;
    if !diag.is_frame {
        return Err(FrameError::NotAFrame {
            lower: diag.lower_bound,
            upper: diag.upper_bound,
        });
    }
    let s_inv = linalg::hermitian_power_with_tol(&diag.frame_operator, -1.0, tol)?;
    f.map(&s_inv)
}

/// `Σ ⟨x, g_i⟩ f_i` for paired families.
pub fn reconstruct(x: &[Complex64], analysis: &FrameSystem, synthesis: &FrameSystem) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); synthesis.dim];
    for (g, f) in analysis.vectors.iter().zip(&synthesis.vectors) {
        let coeff = linalg::inner(x, g);
        for (o, fk) in out.iter_mut().zip(f) {
            *o += coeff * fk;
        }
    }
    out
}

/// `Σ |⟨x, f_i⟩|²`.
pub fn frame_sum(f: &FrameSystem, x: &[Complex64]) -> f64 {
    f.vectors.iter().map(|v| linalg::inner(x, v).norm_sqr()).sum()
}

/// Outcome of probing the frame inequality on unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameInequalityReport {
    pub lower: f64,
    pub upper: f64,
    pub probes: usize,
    pub min_sum: f64,
    pub max_sum: f64,
    pub passed: bool,
    /// Unit vector with the worst violation, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_vector")]
    pub witness: Option<Vec<Complex64>>,
}

fn serialize_vector<S: serde::Serializer>(
    v: &Option<Vec<Complex64>>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    let pairs: Option<Vec<[f64; 2]>> = v.as_ref().map(|v| v.iter().map(|z| [z.re, z.im]).collect());
    pairs.serialize(serializer)
}

/// Checks `A‖x‖² ≤ Σ|⟨x, f_i⟩|² ≤ B‖x‖²` on unit vectors.
///
/// The standard basis and the extreme eigenvectors of `S` are probed first,
/// followed by `trials` random unit vectors from the seeded stream, so a
/// violated bound is found deterministically whenever one exists.
pub fn check_frame_inequality(
    f: &FrameSystem,
    lower: f64,
    upper: f64,
    trials: usize,
    seed: u64,
) -> Result<FrameInequalityReport, FrameError> {
    if lower > upper {
        return Err(FrameError::InvalidBounds { lower, upper });
    }
    let d = f.dim;
    let mut probes: Vec<Vec<Complex64>> = FrameSystem::standard_basis(d).vectors;
    let spec = linalg::spectral_decompose_hermitian(&frame_operator(f))?;
    probes.push(spec.eigenvectors.column(d - 1));
    probes.push(spec.eigenvectors.column(0));
    let mut rng = trial_rng(seed, 0);
    probes.extend((0..trials).map(|_| random_unit_vector(&mut rng, d)));

    let lo = lower * (1.0 - BOUND_SLACK);
    let hi = upper * (1.0 + BOUND_SLACK);
    let mut min_sum = f64::INFINITY;
    let mut max_sum = f64::NEG_INFINITY;
    let mut worst: Option<(f64, usize)> = None;
    for (k, x) in probes.iter().enumerate() {
        let sum = frame_sum(f, x) / linalg::norm_sq(x);
        min_sum = min_sum.min(sum);
        max_sum = max_sum.max(sum);
        let violation = (lo - sum).max(sum - hi);
        if violation > 0.0 && worst.is_none_or(|(v, _)| violation > v) {
            worst = Some((violation, k));
        }
    }
    Ok(FrameInequalityReport {
        lower,
        upper,
        probes: probes.len(),
        min_sum,
        max_sum,
        passed: worst.is_none(),
        witness: worst.map(|(_, k)| probes[k].clone()),
    })
}
