//! Operator images of frames and Riesz bases.
//!
//! Each operation builds the transformed family directly from its vectors,
//! computes its frame operator and optimal bounds from scratch, and compares
//! them with the values predicted from the original frame and the operator
//! (for example `LSL*`, `A‖L†‖⁻²`, `B‖L‖²`). Every comparison is recorded as a
//! named check; the report passes only when all checks do.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::frames::{self, FrameDiagnostics, FrameError, FrameSystem, BOUND_SLACK};
use crate::linalg::{self, ComplexMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("input family is not a frame")]
    NotAFrame,
    #[error("input family is not a Riesz basis")]
    NotRieszBasis,
    #[error("operator is not idempotent (‖P² − P‖_F = {defect:e})")]
    NotIdempotent { defect: f64 },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, TransformError>;

/// Named numerical thresholds, all relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Singular/eigenvalue cut-off for rank, surjectivity and frame tests.
    pub rank: f64,
    /// Frame operator vs. prediction, relative Frobenius.
    pub operator: f64,
    /// Slack on bound envelopes.
    pub bound: f64,
    /// Recovered frame operator, relative Frobenius.
    pub recover: f64,
    /// Analysis-matrix identities.
    pub analysis: f64,
    /// Distance from −1 that counts as hitting it in a spectrum.
    pub spectrum: f64,
    /// Idempotency and explicit-inverse identities.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: linalg::DEFAULT_RANK_TOL,
            operator: 1e-10,
            bound: BOUND_SLACK,
            recover: 1e-9,
            analysis: 1e-10,
            spectrum: 1e-9,
            identity: 1e-10,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 7] = [
        "rank", "operator", "bound", "recover", "analysis", "spectrum", "identity",
    ];

    /// Overrides one tolerance by name; returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "rank" => &mut self.rank,
            "operator" => &mut self.operator,
            "bound" => &mut self.bound,
            "recover" => &mut self.recover,
            "analysis" => &mut self.analysis,
            "spectrum" => &mut self.spectrum,
            "identity" => &mut self.identity,
            _ => return false,
        };
        *slot = value;
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Predicted frame operator and bound envelope of a transformed family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub operator: ComplexMatrix,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformReport {
    pub claim: String,
    #[serde(skip)]
    pub transformed: FrameSystem,
    pub predicted: Prediction,
    pub actual: FrameDiagnostics,
    pub residuals: BTreeMap<String, f64>,
    /// Named pass/fail checks; the verdict is their conjunction.
    pub checks: BTreeMap<String, bool>,
    /// Informational facts that do not affect the verdict.
    pub flags: BTreeMap<String, bool>,
    pub verdict: Verdict,
}

impl TransformReport {
    fn new(
        claim: &str,
        transformed: FrameSystem,
        predicted: Prediction,
        actual: FrameDiagnostics,
        ledger: Ledger,
    ) -> Self {
        let verdict = Verdict::from_bool(ledger.checks.values().all(|&ok| ok));
        Self {
            claim: claim.to_string(),
            transformed,
            predicted,
            actual,
            residuals: ledger.residuals,
            checks: ledger.checks,
            flags: ledger.flags,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.get(name).copied()
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.get(name).copied()
    }
}

#[derive(Default)]
struct Ledger {
    residuals: BTreeMap<String, f64>,
    checks: BTreeMap<String, bool>,
    flags: BTreeMap<String, bool>,
}

impl Ledger {
    fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.insert(name.into(), ok);
    }

    fn flag(&mut self, name: impl Into<String>, value: bool) {
        self.flags.insert(name.into(), value);
    }
}

/// `‖actual − predicted‖_F / ‖actual‖_F`, or the absolute difference when
/// `actual` vanishes.
pub fn relative_difference(actual: &ComplexMatrix, predicted: &ComplexMatrix) -> f64 {
    let diff = actual.sub(predicted).map_or(f64::INFINITY, |d| d.frobenius_norm());
    let scale = actual.frobenius_norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn require_frame(f: &FrameSystem, tol: &Tolerances) -> Result<FrameDiagnostics> {
    let diag = frames::optimal_bounds(f, tol.rank)?;
    if diag.is_frame {
        Ok(diag)
    } else {
        Err(TransformError::NotAFrame)
    }
}

fn require_riesz(f: &FrameSystem, tol: &Tolerances) -> Result<FrameDiagnostics> {
    let diag = frames::optimal_bounds(f, tol.rank)?;
    if diag.is_riesz_basis {
        Ok(diag)
    } else {
        Err(TransformError::NotRieszBasis)
    }
}

fn require_square(l: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if l.shape() != (dim, dim) {
        return Err(TransformError::DimensionMismatch(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            l.rows(),
            l.cols()
        )));
    }
    Ok(())
}

/// `(M S M*, A‖M†‖⁻², B‖M‖²)`; the lower prediction is 0 when `M` is not
/// surjective, where no positive bound exists.
fn image_prediction(
    m: &ComplexMatrix,
    base: &FrameDiagnostics,
    tol: &Tolerances,
) -> Result<(Prediction, bool)> {
    let s = m.matmul(&base.frame_operator)?.matmul(&m.adjoint())?;
    let svd = linalg::svd(m)?;
    let surjective = m.rows() <= m.cols() && svd.rank(tol.rank) == m.rows();
    let norm = svd.largest();
    let lower = if surjective {
        // ‖M†‖ = 1/σ_rows for a surjective M.
        let pinv_norm = 1.0 / svd.singular_values[m.rows() - 1];
        base.lower_bound / (pinv_norm * pinv_norm)
    } else {
        0.0
    };
    Ok((
        Prediction {
            operator: s,
            lower,
            upper: base.upper_bound * norm * norm,
        },
        surjective,
    ))
}

/// Shared checks for "the image of a frame under M is a frame iff M is
/// surjective, with frame operator MSM* and bounds A‖M†‖⁻², B‖M‖²".
fn image_checks(
    prefix: &str,
    m: &ComplexMatrix,
    base: &FrameDiagnostics,
    image: &FrameDiagnostics,
    tol: &Tolerances,
    ledger: &mut Ledger,
) -> Result<(Prediction, bool)> {
    let (predicted, surjective) = image_prediction(m, base, tol)?;
    let op_residual = relative_difference(&image.frame_operator, &predicted.operator);
    ledger.residual(format!("{prefix}operator"), op_residual);
    ledger.flag(format!("{prefix}surjective"), surjective);
    ledger.flag(format!("{prefix}image_is_frame"), image.is_frame);
    ledger.check(format!("{prefix}frame_iff_surjective"), image.is_frame == surjective);
    ledger.check(format!("{prefix}operator_matches_prediction"), op_residual <= tol.operator);
    ledger.check(
        format!("{prefix}lower_bound_envelope"),
        image.lower_bound >= predicted.lower * (1.0 - tol.bound),
    );
    ledger.check(
        format!("{prefix}upper_bound_envelope"),
        image.upper_bound <= predicted.upper * (1.0 + tol.bound),
    );
    Ok((predicted, surjective))
}

/// `{L f_i}` is a frame iff `L` is surjective; its frame operator is `LSL*`
/// and its bounds lie in `[A‖L†‖⁻², B‖L‖²]`. `L` may be rectangular with
/// `L.cols == dim(F)`.
pub fn transform_by_operator(f: &FrameSystem, l: &ComplexMatrix, tol: &Tolerances) -> Result<TransformReport> {
    if l.cols() != f.dim() {
        return Err(TransformError::DimensionMismatch(format!(
            "operator has {} columns, frame dimension is {}",
            l.cols(),
            f.dim()
        )));
    }
    let base = require_frame(f, tol)?;
    let transformed = f.map(l)?;
    let actual = frames::optimal_bounds(&transformed, tol.rank)?;
    let mut ledger = Ledger::default();
    let (predicted, _) = image_checks("", l, &base, &actual, tol, &mut ledger)?;
    Ok(TransformReport::new("transform-law", transformed, predicted, actual, ledger))
}

/// `{L f_i}` and `{L* f_i}` are both frames iff `L` is invertible, with frame
/// operators `LSL*` and `L*SL`.
pub fn two_sided_check(f: &FrameSystem, l: &ComplexMatrix, tol: &Tolerances) -> Result<TransformReport> {
    require_square(l, f.dim(), "operator")?;
    let base = require_frame(f, tol)?;
    let l_adj = l.adjoint();
    let forward = f.map(l)?;
    let backward = f.map(&l_adj)?;
    let actual = frames::optimal_bounds(&forward, tol.rank)?;
    let actual_adj = frames::optimal_bounds(&backward, tol.rank)?;

    let mut ledger = Ledger::default();
    let (predicted, _) = image_prediction(l, &base, tol)?;
    let (predicted_adj, _) = image_prediction(&l_adj, &base, tol)?;
    let r = relative_difference(&actual.frame_operator, &predicted.operator);
    let r_adj = relative_difference(&actual_adj.frame_operator, &predicted_adj.operator);
    let invertible = linalg::is_invertible(l, tol.rank)?;
    ledger.residual("operator", r);
    ledger.residual("adjoint_operator", r_adj);
    ledger.flag("image_is_frame", actual.is_frame);
    ledger.flag("adjoint_image_is_frame", actual_adj.is_frame);
    ledger.flag("invertible", invertible);
    ledger.check(
        "both_frames_iff_invertible",
        (actual.is_frame && actual_adj.is_frame) == invertible,
    );
    ledger.check("operator_matches_prediction", r <= tol.operator);
    ledger.check("adjoint_operator_matches_prediction", r_adj <= tol.operator);
    Ok(TransformReport::new("two-sided", forward, predicted, actual, ledger))
}

/// `{f_i + L f_i}` is a frame iff `I + L` is surjective, with frame operator
/// `(I+L) S (I+L)*` and bounds `[A‖(I+L)†‖⁻², B‖I+L‖²]`.
pub fn sum_with_operator(f: &FrameSystem, l: &ComplexMatrix, tol: &Tolerances) -> Result<TransformReport> {
    require_square(l, f.dim(), "operator")?;
    let base = require_frame(f, tol)?;
    let transformed = f.pointwise_sum(&f.map(l)?)?;
    let actual = frames::optimal_bounds(&transformed, tol.rank)?;
    let m = ComplexMatrix::identity(f.dim()).add(l)?;
    let mut ledger = Ledger::default();
    let (predicted, _) = image_checks("", &m, &base, &actual, tol, &mut ledger)?;
    Ok(TransformReport::new("sum-operator", transformed, predicted, actual, ledger))
}

/// `{f_i + a P f_i}` for an idempotent `P`.
///
/// For `a ≠ −1` the explicit inverse `(I + aP)(I − a/(a+1) P) = I` is
/// verified and the family must be a frame. For the excluded scalar `a = −1`
/// the report records `excluded_scalar` and only checks that frame status
/// agrees with surjectivity of `I − P`.
pub fn projection_sum(
    f: &FrameSystem,
    p: &ComplexMatrix,
    a: Complex64,
    tol: &Tolerances,
) -> Result<TransformReport> {
    let d = f.dim();
    require_square(p, d, "projection")?;
    let defect = p.matmul(p)?.sub(p)?.frobenius_norm();
    if defect > tol.identity * p.frobenius_norm().powi(2).max(1.0) {
        return Err(TransformError::NotIdempotent { defect });
    }
    let base = require_frame(f, tol)?;
    let transformed = f.pointwise_sum(&f.map(&p.scale(a))?)?;
    let actual = frames::optimal_bounds(&transformed, tol.rank)?;
    let identity = ComplexMatrix::identity(d);
    let m = identity.add(&p.scale(a))?;

    let mut ledger = Ledger::default();
    ledger.residual("idempotent_defect", defect);
    let excluded = a == Complex64::new(-1.0, 0.0);
    ledger.flag("excluded_scalar", excluded);
    let (predicted, _) = image_checks("", &m, &base, &actual, tol, &mut ledger)?;
    if !excluded {
        let inverse = identity.sub(&p.scale(a / (a + 1.0)))?;
        let residual = m.matmul(&inverse)?.sub(&identity)?.frobenius_norm();
        ledger.residual("inverse_identity", residual);
        ledger.check("inverse_identity", residual <= tol.identity * d as f64);
        ledger.check("image_is_frame", actual.is_frame);
    }
    Ok(TransformReport::new("projection-sum", transformed, predicted, actual, ledger))
}

/// If `{L f_i}` and `{L* f_i}` are frames then `L` is invertible and `F` is a
/// frame with operator `L⁻¹ S_L (L*)⁻¹`, where `S_L` is the frame operator of
/// `{L f_i}`. `F` itself is not assumed to be a frame.
pub fn recover_from_transforms(f: &FrameSystem, l: &ComplexMatrix, tol: &Tolerances) -> Result<TransformReport> {
    require_square(l, f.dim(), "operator")?;
    let forward = frames::optimal_bounds(&f.map(l)?, tol.rank)?;
    let backward = frames::optimal_bounds(&f.map(&l.adjoint())?, tol.rank)?;
    if !forward.is_frame {
        return Err(TransformError::HypothesisFailed("{L f_i} is not a frame".into()));
    }
    if !backward.is_frame {
        return Err(TransformError::HypothesisFailed("{L* f_i} is not a frame".into()));
    }
    let l_inv = linalg::inverse(l, tol.rank)
        .map_err(|_| TransformError::HypothesisFailed("L is numerically singular".into()))?;
    let predicted_op = l_inv.matmul(&forward.frame_operator)?.matmul(&l_inv.adjoint())?;
    let l_norm = linalg::operator_norm(l)?;
    let l_inv_norm = linalg::operator_norm(&l_inv)?;
    let predicted = Prediction {
        operator: predicted_op,
        lower: forward.lower_bound / (l_norm * l_norm),
        upper: forward.upper_bound * l_inv_norm * l_inv_norm,
    };
    let actual = frames::optimal_bounds(f, tol.rank)?;

    let mut ledger = Ledger::default();
    let r = relative_difference(&actual.frame_operator, &predicted.operator);
    ledger.residual("operator", r);
    ledger.check("input_is_frame", actual.is_frame);
    ledger.check("operator_matches_prediction", r <= tol.recover);
    ledger.check("lower_bound_envelope", actual.lower_bound >= predicted.lower * (1.0 - tol.bound));
    ledger.check("upper_bound_envelope", actual.upper_bound <= predicted.upper * (1.0 + tol.bound));
    Ok(TransformReport::new("recover", f.clone(), predicted, actual, ledger))
}

/// Checks for one Riesz image `{M f_i}` given the base analysis matrix.
fn riesz_image_checks(
    prefix: &str,
    m: &ComplexMatrix,
    image: &FrameSystem,
    base: &FrameDiagnostics,
    t: &ComplexMatrix,
    tol: &Tolerances,
    ledger: &mut Ledger,
) -> Result<(Prediction, FrameDiagnostics)> {
    let actual = frames::optimal_bounds(image, tol.rank)?;
    let t_image = frames::analysis_matrix(image);
    let predicted_t = t.matmul(&m.adjoint())?;
    let scale = (t.frobenius_norm() * m.frobenius_norm()).max(1.0);
    let analysis_residual = t_image.sub(&predicted_t)?.frobenius_norm() / scale;
    let invertible = linalg::is_invertible(m, tol.rank)?;
    ledger.residual(format!("{prefix}analysis_identity"), analysis_residual);
    ledger.flag(format!("{prefix}invertible"), invertible);
    ledger.flag(format!("{prefix}image_is_riesz_basis"), actual.is_riesz_basis);
    ledger.check(format!("{prefix}analysis_identity"), analysis_residual <= tol.analysis);
    ledger.check(format!("{prefix}riesz_iff_invertible"), actual.is_riesz_basis == invertible);

    let norm = linalg::operator_norm(m)?;
    let mut predicted = Prediction {
        operator: m.matmul(&base.frame_operator)?.matmul(&m.adjoint())?,
        lower: 0.0,
        upper: base.upper_bound * norm * norm,
    };
    if invertible {
        let inv_norm = linalg::operator_norm(&linalg::inverse(m, tol.rank)?)?;
        predicted.lower = base.lower_bound / (inv_norm * inv_norm);
        ledger.check(
            format!("{prefix}lower_bound_envelope"),
            actual.lower_bound >= predicted.lower * (1.0 - tol.bound),
        );
        ledger.check(
            format!("{prefix}upper_bound_envelope"),
            actual.upper_bound <= predicted.upper * (1.0 + tol.bound),
        );
    }
    Ok((predicted, actual))
}

/// `{L f_i}` is a Riesz basis iff `L` is invertible, its analysis matrix is
/// `T L*`, and its bounds lie in `[A‖L⁻¹‖⁻², B‖L‖²]`. The same is checked for
/// `{f_i + L f_i}` and `I + L` under the `i_plus_l.` prefix.
pub fn riesz_transform_check(f: &FrameSystem, l: &ComplexMatrix, tol: &Tolerances) -> Result<TransformReport> {
    require_square(l, f.dim(), "operator")?;
    let base = require_riesz(f, tol)?;
    let t = frames::analysis_matrix(f);
    let mut ledger = Ledger::default();

    let image = f.map(l)?;
    let (predicted, actual) = riesz_image_checks("", l, &image, &base, &t, tol, &mut ledger)?;

    let m = ComplexMatrix::identity(f.dim()).add(l)?;
    let shifted = f.pointwise_sum(&image)?;
    riesz_image_checks("i_plus_l.", &m, &shifted, &base, &t, tol, &mut ledger)?;
    Ok(TransformReport::new("riesz", image, predicted, actual, ledger))
}

/// `{S^a f_i + S^b g_i}` with `g_i = S⁻¹ f_i` the (unique) dual of a Riesz
/// basis. Records whether −1 lies in the spectrum of `S^{b−a−1}` and, when it
/// does not, requires the result to be a Riesz basis.
pub fn power_sum(f: &FrameSystem, a: f64, b: f64, tol: &Tolerances) -> Result<TransformReport> {
    let base = require_riesz(f, tol)?;
    let s = &base.frame_operator;
    let s_a = linalg::hermitian_power_with_tol(s, a, tol.rank)?;
    let s_b = linalg::hermitian_power_with_tol(s, b, tol.rank)?;
    let dual = frames::canonical_dual(f, tol.rank)?;
    let transformed = f.map(&s_a)?.pointwise_sum(&dual.map(&s_b)?)?;
    let actual = frames::optimal_bounds(&transformed, tol.rank)?;

    let mut ledger = Ledger::default();
    let gap = linalg::hermitian_power_with_tol(s, b - a - 1.0, tol.rank)?;
    let spectrum = linalg::hermitian_eigenvalues(&gap)?;
    let distance = spectrum
        .iter()
        .map(|&l| (l + 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let hits_minus_one = distance <= tol.spectrum;
    ledger.residual("spectrum_distance_to_minus_one", distance);
    ledger.flag("minus_one_in_spectrum", hits_minus_one);
    ledger.flag("spectrum_positive", spectrum.iter().all(|&l| l > 0.0));

    // S^a f_i + S^b S⁻¹ f_i = (S^a + S^{b−1}) f_i.
    let m = s_a.add(&linalg::hermitian_power_with_tol(s, b - 1.0, tol.rank)?)?;
    let (predicted, _) = image_prediction(&m, &base, tol)?;
    let r = relative_difference(&actual.frame_operator, &predicted.operator);
    ledger.residual("operator", r);
    ledger.check("operator_matches_prediction", r <= tol.operator);
    if !hits_minus_one {
        ledger.check("riesz_basis", actual.is_riesz_basis);
        ledger.check(
            "lower_bound_envelope",
            actual.lower_bound >= predicted.lower * (1.0 - tol.bound),
        );
        ledger.check(
            "upper_bound_envelope",
            actual.upper_bound <= predicted.upper * (1.0 + tol.bound),
        );
    }
    Ok(TransformReport::new("power-sum", transformed, predicted, actual, ledger))
}

/// `{L₁ f_i + L₂ g_i}` has analysis matrix `T₁L₁* + T₂L₂*`. With as many
/// vectors as dimensions it is a Riesz basis iff that map is invertible;
/// with more vectors the report records frame status next to surjectivity of
/// the combined map (which fails, so a frame here witnesses the refuted
/// converse) and checks frame status against injectivity instead.
pub fn two_frame_sum(
    f: &FrameSystem,
    g: &FrameSystem,
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<TransformReport> {
    if f.dim() != g.dim() || f.len() != g.len() {
        return Err(TransformError::DimensionMismatch(format!(
            "families have shapes {}x{} and {}x{}",
            f.len(),
            f.dim(),
            g.len(),
            g.dim()
        )));
    }
    require_square(l1, f.dim(), "L1")?;
    require_square(l2, f.dim(), "L2")?;
    let transformed = f.map(l1)?.pointwise_sum(&g.map(l2)?)?;
    let actual = frames::optimal_bounds(&transformed, tol.rank)?;

    let t1 = frames::analysis_matrix(f);
    let t2 = frames::analysis_matrix(g);
    let combined = t1.matmul(&l1.adjoint())?.add(&t2.matmul(&l2.adjoint())?)?;
    let scale = (t1.frobenius_norm() * l1.frobenius_norm() + t2.frobenius_norm() * l2.frobenius_norm()).max(1.0);
    let t = frames::analysis_matrix(&transformed);
    let analysis_residual = t.sub(&combined)?.frobenius_norm() / scale;

    let mut ledger = Ledger::default();
    ledger.residual("analysis_identity", analysis_residual);
    ledger.check("analysis_identity", analysis_residual <= tol.analysis);
    let combined_svd = linalg::svd(&combined)?;
    let surjective = linalg::is_surjective(&combined, tol.rank)?;
    let injective = linalg::is_injective(&combined, tol.rank)?;
    ledger.flag("combined_map_surjective", surjective);
    ledger.flag("combined_map_injective", injective);
    ledger.flag("image_is_frame", actual.is_frame);
    ledger.flag("image_is_riesz_basis", actual.is_riesz_basis);
    if f.len() == f.dim() {
        ledger.check("riesz_iff_invertible", actual.is_riesz_basis == (surjective && injective));
    } else {
        ledger.flag("refuted_converse_witnessed", actual.is_frame && !surjective);
        ledger.check("frame_iff_injective", actual.is_frame == injective);
    }

    // The frame operator of the sum is C*C for the combined analysis map C.
    let sigma_min = if injective {
        combined_svd.singular_values[f.dim() - 1]
    } else {
        0.0
    };
    let predicted = Prediction {
        operator: combined.adjoint().matmul(&combined)?,
        lower: sigma_min * sigma_min,
        upper: combined_svd.largest().powi(2),
    };
    let r = relative_difference(&actual.frame_operator, &predicted.operator);
    ledger.residual("operator", r);
    ledger.check("operator_matches_prediction", r <= tol.operator);
    Ok(TransformReport::new("two-frame", transformed, predicted, actual, ledger))
}

/// `(n−1) × n` matrix sending `e_1 ↦ 0` and `e_k ↦ e_{k−1}`: the finite
/// truncation of the backward shift.
pub fn truncated_shift(n: usize) -> ComplexMatrix {
    assert!(n >= 2);
    let mut m = ComplexMatrix::zeros(n - 1, n);
    for k in 1..n {
        m[(k - 1, k)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// A frame image under a map that is surjective but not invertible: the
/// truncated shift `C^n → C^{n−1}` applied to the standard basis of `C^n`.
pub fn refuted_converse_probe(n: usize, tol: &Tolerances) -> Result<TransformReport> {
    let l = truncated_shift(n);
    let mut report = transform_by_operator(&FrameSystem::standard_basis(n), &l, tol)?;
    let invertible = linalg::is_invertible(&l, tol.rank)?;
    report.claim = "refuted-converse".to_string();
    report.flags.insert("invertible".into(), invertible);
    report.checks.insert("image_is_frame".into(), report.actual.is_frame);
    report.checks.insert("map_not_invertible".into(), !invertible);
    report.verdict = Verdict::from_bool(report.checks.values().all(|&ok| ok));
    Ok(report)
}
