//! Gabor systems on the cyclic group `Z_N` as finite frames.
//!
//! `(T_a v)_t = v_{t−a mod N}` and `(E_b v)_t = e^{2πibt/N} v_t`, so
//! `E_b T_a = e^{2πiab/N} T_a E_b`. A lattice `(a, b)` with `a | N` and `b | N`
//! gives the `(N/a)·(N/b)` vectors `E_{mb} T_{na} g`.
//!
//! On `C^N` the operator `I + c E_y T_x` is singular only for special `c`, so
//! perturbed windows are an experiment here: the report lists bounds and the
//! conditioning of each `I + d T_x E_y`, without asserting a collapse.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, frac, integer, rational, unit_phase, Rational};
use crate::frames::{optimal_bounds, FrameError, FrameSystem};
use crate::linalg::{self, ComplexMatrix, LinalgError, DEFAULT_RANK_TOL};

/// `I + d T_x E_y` is flagged when its smallest singular value is at most this.
pub const NEAR_SINGULAR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaborDiscreteError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, GaborDiscreteError>;

/// Modulus, lattice steps and window of a Gabor system on `Z_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct GaborSystemSpec {
    modulus: usize,
    a: usize,
    b: usize,
    window: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(rename = "N")]
    modulus: usize,
    a: usize,
    b: usize,
    window: Vec<[f64; 2]>,
}

impl TryFrom<SpecRepr> for GaborSystemSpec {
    type Error = GaborDiscreteError;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let window = r.window.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        GaborSystemSpec::new(r.modulus, r.a, r.b, window)
    }
}

impl From<GaborSystemSpec> for SpecRepr {
    fn from(s: GaborSystemSpec) -> Self {
        SpecRepr {
            modulus: s.modulus,
            a: s.a,
            b: s.b,
            window: s.window.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl GaborSystemSpec {
    pub fn new(modulus: usize, a: usize, b: usize, window: Vec<Complex64>) -> Result<Self> {
        let bad = |msg: String| Err(GaborDiscreteError::InvalidLattice(msg));
        if modulus == 0 {
            return bad("N must be positive".into());
        }
        if a == 0 || !modulus.is_multiple_of(a) {
            return bad(format!("time step {a} does not divide N = {modulus}"));
        }
        if b == 0 || !modulus.is_multiple_of(b) {
            return bad(format!("frequency step {b} does not divide N = {modulus}"));
        }
        if window.len() != modulus {
            return bad(format!("window has length {}, expected {modulus}", window.len()));
        }
        if window.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return bad("window has a non-finite entry".into());
        }
        if window.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            return bad("window is zero".into());
        }
        Ok(Self { modulus, a, b, window })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn window(&self) -> &[Complex64] {
        &self.window
    }

    pub fn with_window(&self, window: Vec<Complex64>) -> Result<Self> {
        Self::new(self.modulus, self.a, self.b, window)
    }

    /// Number of lattice points `(N/a)·(N/b)`.
    pub fn lattice_size(&self) -> usize {
        (self.modulus / self.a) * (self.modulus / self.b)
    }
}

fn residue(v: i64, modulus: usize) -> usize {
    v.rem_euclid(modulus as i64) as usize
}

/// `e^{2πi·k/N}`, exact at quarter turns.
fn root_of_unity(k: i64, modulus: usize) -> Complex64 {
    unit_phase(&rational(k, modulus as i64))
}

pub fn translate(v: &[Complex64], shift: i64) -> Vec<Complex64> {
    let n = v.len();
    (0..n).map(|t| v[residue(t as i64 - shift, n)]).collect()
}

pub fn modulate(v: &[Complex64], freq: i64) -> Vec<Complex64> {
    let n = v.len();
    v.iter()
        .enumerate()
        .map(|(t, z)| z * root_of_unity(freq * t as i64, n))
        .collect()
}

/// Permutation matrix of `T_a`.
pub fn translation_matrix(modulus: usize, shift: i64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(modulus, modulus);
    for t in 0..modulus {
        m[(t, residue(t as i64 - shift, modulus))] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Diagonal matrix of `E_b`.
pub fn modulation_matrix(modulus: usize, freq: i64) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..modulus)
        .map(|t| root_of_unity(freq * t as i64, modulus))
        .collect();
    ComplexMatrix::from_diag(&diag)
}

/// `{E_{mb} T_{na} g}` with `n` in the outer loop and `m` in the inner one.
pub fn build_gabor_system(spec: &GaborSystemSpec) -> Result<FrameSystem> {
    let n_count = spec.modulus / spec.a;
    let m_count = spec.modulus / spec.b;
    let mut vectors = Vec::with_capacity(n_count * m_count);
    for n in 0..n_count {
        let shifted = translate(&spec.window, (n * spec.a) as i64);
        for m in 0..m_count {
            vectors.push(modulate(&shifted, (m * spec.b) as i64));
        }
    }
    Ok(FrameSystem::new(spec.modulus, vectors)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsSummary {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub is_frame: bool,
}

pub fn system_bounds(spec: &GaborSystemSpec) -> Result<BoundsSummary> {
    let diag = optimal_bounds(&build_gabor_system(spec)?, DEFAULT_RANK_TOL)?;
    Ok(BoundsSummary {
        lower: diag.lower_bound,
        upper: diag.upper_bound,
        is_frame: diag.is_frame,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePointReport {
    pub m: usize,
    pub n: usize,
    /// Phase of `d` in turns, as `"p/q"`.
    pub d_phase: String,
    pub min_singular: f64,
    pub max_singular: f64,
    pub near_singular: bool,
    /// `‖E_{mb}T_{na}(g + cE_yT_x g) − (I + dT_xE_y)E_{mb}T_{na} g‖`.
    pub factorization_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbReport {
    #[serde(rename = "N")]
    pub modulus: usize,
    pub a: usize,
    pub b: usize,
    pub x: usize,
    pub y: usize,
    pub c_phase: String,
    pub unperturbed: BoundsSummary,
    pub perturbed: BoundsSummary,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
    /// `‖T_x E_y − e^{−2πixy/N} E_y T_x‖_F`.
    pub commutation_residual: f64,
    pub near_singular_count: usize,
    pub max_factorization_residual: f64,
    pub lattice: Vec<LatticePointReport>,
}

fn vec_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Turns of `d = c · e^{2πi(xy + mbx − nay)/N}`, the scalar with
/// `E_{mb}T_{na} c E_y T_x = d T_x E_y E_{mb}T_{na}`.
pub fn lattice_phase(c_phase: &Rational, modulus: usize, x: usize, y: usize, mb: usize, na: usize) -> Rational {
    let (x, y, mb, na) = (x as i64, y as i64, mb as i64, na as i64);
    c_phase + rational(x * y + mb * x - na * y, modulus as i64)
}

/// Builds the system with window `g + c E_y T_x g` and reports its bounds
/// next to the unperturbed ones, plus the conditioning of `I + d T_x E_y` at
/// every lattice point.
pub fn perturb_window(
    spec: &GaborSystemSpec,
    x: i64,
    y: i64,
    c_phase: &Rational,
) -> Result<(FrameSystem, PerturbReport)> {
    let modulus = spec.modulus;
    let (x, y) = (residue(x, modulus), residue(y, modulus));
    let c = unit_phase(c_phase);
    let g = &spec.window;
    let shifted = modulate(&translate(g, x as i64), y as i64);
    let window: Vec<Complex64> = g.iter().zip(&shifted).map(|(u, v)| u + c * v).collect();
    let perturbed_spec = spec.with_window(window.clone())?;
    let system = build_gabor_system(&perturbed_spec)?;

    let unperturbed = system_bounds(spec)?;
    let perturbed = system_bounds(&perturbed_spec)?;

    let tx = translation_matrix(modulus, x as i64);
    let ey = modulation_matrix(modulus, y as i64);
    let txey = tx.mul(&ey);
    let eytx = ey.mul(&tx);
    let commutation_residual = txey
        .sub(&eytx.scale(root_of_unity(-((x * y) as i64), modulus)))?
        .frobenius_norm();

    let identity = ComplexMatrix::identity(modulus);
    let mut spectra: BTreeMap<Rational, (f64, f64)> = BTreeMap::new();
    let mut lattice = Vec::with_capacity(spec.lattice_size());
    for n in 0..modulus / spec.a {
        let na = n * spec.a;
        for m in 0..modulus / spec.b {
            let mb = m * spec.b;
            let turns = frac(&lattice_phase(c_phase, modulus, x, y, mb, na));
            let d = unit_phase(&turns);
            let (min_singular, max_singular) = match spectra.get(&turns) {
                Some(&v) => v,
                None => {
                    let op = identity.add(&txey.scale(d))?;
                    let s = linalg::svd(&op)?;
                    let v = (s.singular_values.last().copied().unwrap_or(0.0), s.largest());
                    spectra.insert(turns.clone(), v);
                    v
                }
            };
            let lhs = modulate(&translate(&window, na as i64), mb as i64);
            let h = modulate(&translate(g, na as i64), mb as i64);
            let dh = translate(&modulate(&h, y as i64), x as i64);
            let rhs: Vec<Complex64> = h.iter().zip(&dh).map(|(u, v)| u + d * v).collect();
            lattice.push(LatticePointReport {
                m,
                n,
                d_phase: format_rational(&turns),
                min_singular,
                max_singular,
                near_singular: min_singular <= NEAR_SINGULAR,
                factorization_residual: vec_distance(&lhs, &rhs),
            });
        }
    }
    let ratio = |p: f64, u: f64| if u > 0.0 { p / u } else { f64::NAN };
    let report = PerturbReport {
        modulus,
        a: spec.a,
        b: spec.b,
        x,
        y,
        c_phase: format_rational(c_phase),
        lower_ratio: ratio(perturbed.lower, unperturbed.lower),
        upper_ratio: ratio(perturbed.upper, unperturbed.upper),
        unperturbed,
        perturbed,
        commutation_residual,
        near_singular_count: lattice.iter().filter(|p| p.near_singular).count(),
        max_factorization_residual: lattice.iter().map(|p| p.factorization_residual).fold(0.0, f64::max),
        lattice,
    };
    Ok((system, report))
}

/// `‖T_a E_b − e^{−2πiab/N} E_b T_a‖_F`.
pub fn commutation_defect(modulus: usize, a: i64, b: i64) -> f64 {
    let t = translation_matrix(modulus, a);
    let e = modulation_matrix(modulus, b);
    let phase = unit_phase(&-(integer(a) * integer(b) / integer(modulus as i64)));
    t.mul(&e)
        .sub(&e.mul(&t).scale(phase))
        .expect("square matrices of equal size")
        .frobenius_norm()
}
