//! Suite runners. Every trial draws from its own seeded stream and trials
//! run in parallel; results are collected in trial order, so a report depends
//! only on its configuration.

use std::fs;
use std::path::{Path, PathBuf};

use framekit::exact::{format_rational, integer, rational, Rational};
use framekit::frames::{optimal_bounds, FrameSystem};
use framekit::gabor_continuous::{
    collapse_report, random_lattice_shift, random_piecewise, verify_commutation, verify_factorization,
    GaborError, PiecewiseExp,
};
use framekit::gabor_discrete::{
    build_gabor_system, modulation_matrix, perturb_window, system_bounds, translation_matrix, GaborSystemSpec,
};
use framekit::linalg::{self, ComplexMatrix};
use framekit::random::{
    gaussian_vector, random_frame, random_invertible, random_matrix, random_rank_deficient, random_riesz_basis,
    random_surjective, trial_rng, TrialRng,
};
use framekit::sparse_seq::{verify_shift_counterexample, verify_tlstar_obstruction, ExactReport};
use framekit::transforms::{self, Tolerances, TransformError, TransformReport};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::catalogue::{self, InputKind, SuiteInfo};
use crate::report::{CheckRecord, Report};
use crate::CliError;

/// Modulus of the generated discrete Gabor systems.
pub const GABOR_MODULUS: usize = 12;
/// Relative tolerance on the tight bound `N‖g‖²`.
pub const GABOR_TIGHT_TOL: f64 = 1e-9;
/// Largest support index of random sequences in the shift suite.
pub const SHIFT_MAX_INDEX: u64 = 1000;
/// Largest support index of random sequences in the obstruction suite.
pub const TLSTAR_MAX_INDEX: u64 = 500;
/// `(x, y, c_phase)` triples with integer `xy` for the witness suite.
pub const WITNESS_CASES: [(i64, i64, i64, i64, i64, i64); 3] = [(1, 1, 1, 1, 0, 1), (1, 2, 2, 1, 1, 7), (2, 1, 1, 1, 1, 3)];
/// Contrast parameters with `xy ∉ ℤ`.
pub const CONTRAST_CASE: (i64, i64, i64, i64) = (1, 1, 1, 2);
/// Random inputs per commutation check.
pub const COMMUTATION_SAMPLES: usize = 50;
/// The scalars used against each random idempotent.
pub const PROJECTION_SCALARS: [Complex64; 5] = [
    Complex64::new(-0.5, 0.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(2.0, 0.0),
    Complex64::new(10.0, 0.0),
    Complex64::new(0.0, 1.0),
];

/// Configuration of one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub trials: Option<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub input: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(suite: &str, seed: u64) -> Self {
        Self {
            suite: suite.to_string(),
            trials: None,
            seed,
            tolerances: Tolerances::default(),
            input: None,
        }
    }
}

enum Input {
    Frame(FrameSystem),
    Piecewise(PiecewiseExp),
    Gabor(GaborSystemSpec),
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_frame(path: &Path) -> Result<FrameSystem, CliError> {
    read_json(path)
}

fn load_input(info: &SuiteInfo, path: &Path, tol: &Tolerances) -> Result<Input, CliError> {
    match info.input {
        InputKind::None => Err(CliError::Input(format!("suite {} takes no --input", info.name))),
        InputKind::Frame | InputKind::RieszBasis => {
            let f = load_frame(path)?;
            let diag = optimal_bounds(&f, tol.rank).map_err(|e| CliError::Input(e.to_string()))?;
            if !diag.is_frame {
                return Err(CliError::Input(format!("{} is not a frame", path.display())));
            }
            if info.input == InputKind::RieszBasis && !diag.is_riesz_basis {
                return Err(CliError::Input(format!("{} is not a Riesz basis", path.display())));
            }
            Ok(Input::Frame(f))
        }
        InputKind::Piecewise => Ok(Input::Piecewise(read_json(path)?)),
        InputKind::GaborSpec => Ok(Input::Gabor(read_json(path)?)),
    }
}

/// Stream for the second family of trials in a suite.
const SECOND_FAMILY: u64 = 1 << 32;

struct Ctx<'a> {
    info: &'static SuiteInfo,
    seed: u64,
    tol: &'a Tolerances,
    input: Option<&'a Input>,
}

impl Ctx<'_> {
    fn rng(&self, stream: u64) -> TrialRng {
        trial_rng(self.seed, stream)
    }

    fn frame_or_random(&self, rng: &mut TrialRng, riesz: bool) -> FrameSystem {
        match self.input {
            Some(Input::Frame(f)) => f.clone(),
            _ => {
                let d = rng.random_range(2..=8);
                if riesz {
                    random_riesz_basis(rng, d)
                } else {
                    let m = rng.random_range(d..=2 * d);
                    random_frame(rng, d, m)
                }
            }
        }
    }

    fn record(&self, trial: Option<usize>, claim: &str, r: Result<TransformReport, TransformError>) -> CheckRecord {
        match r {
            Ok(r) => CheckRecord::from_transform(self.info.anchor, trial, &r),
            Err(e) => CheckRecord::failed_with(claim, self.info.anchor, trial, e),
        }
    }
}

fn par_trials<F>(trials: usize, f: F) -> Vec<CheckRecord>
where
    F: Fn(usize) -> Vec<CheckRecord> + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(f)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn transform_law(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let d = f.dim();
        let k = rng.random_range(1..=d);
        let l = random_surjective(&mut rng, k, d);
        let surjective = ctx.record(Some(t), "transform-law", transforms::transform_by_operator(&f, &l, ctx.tol));

        let mut rng = ctx.rng(SECOND_FAMILY | t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let l = random_rank_deficient(&mut rng, f.dim());
        let deficient = match transforms::transform_by_operator(&f, &l, ctx.tol) {
            Ok(r) => {
                let mut rec = CheckRecord::from_transform(ctx.info.anchor, Some(t), &r);
                rec.claim = "non-surjective".into();
                rec.condition("image_not_frame", !r.actual.is_frame).finish()
            }
            Err(e) => CheckRecord::failed_with("non-surjective", ctx.info.anchor, Some(t), e),
        };
        vec![surjective, deficient]
    })
}

fn two_sided(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    let mut out = par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let l = random_invertible(&mut rng, f.dim());
        let inv = ctx.record(Some(t), "two-sided", transforms::two_sided_check(&f, &l, ctx.tol));
        let mut rng = ctx.rng(SECOND_FAMILY | t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let l = random_rank_deficient(&mut rng, f.dim());
        let def = ctx.record(Some(t), "two-sided", transforms::two_sided_check(&f, &l, ctx.tol));
        vec![inv, def]
    });
    out.push(ctx.record(None, "refuted-converse", transforms::refuted_converse_probe(3, ctx.tol)));
    out
}

fn sum_operator(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let d = f.dim();
        let l = if t % 2 == 0 {
            random_matrix(&mut rng, d, d)
        } else {
            // I + L = M is rank deficient.
            random_rank_deficient(&mut rng, d)
                .sub(&ComplexMatrix::identity(d))
                .expect("square matrices of equal size")
        };
        vec![ctx.record(Some(t), "sum-operator", transforms::sum_with_operator(&f, &l, ctx.tol))]
    })
}

fn projection_sum(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let d = f.dim();
        let rank = rng.random_range(0..=d);
        let p = framekit::random::random_idempotent(&mut rng, d, rank);
        PROJECTION_SCALARS
            .iter()
            .map(|&a| {
                let rec = ctx.record(Some(t), "projection-sum", transforms::projection_sum(&f, &p, a, ctx.tol));
                rec.residual("a", vec![a.re, a.im]).residual("rank", rank)
            })
            .collect()
    })
}

fn recover(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let l = random_invertible(&mut rng, f.dim());
        let ok = ctx.record(Some(t), "recover", transforms::recover_from_transforms(&f, &l, ctx.tol));

        let mut rng = ctx.rng(SECOND_FAMILY | t as u64);
        let f = ctx.frame_or_random(&mut rng, false);
        let l = random_rank_deficient(&mut rng, f.dim());
        let rejected = matches!(
            transforms::recover_from_transforms(&f, &l, ctx.tol),
            Err(TransformError::HypothesisFailed(_))
        );
        let hyp = CheckRecord::new("recover-hypothesis", ctx.info.anchor, Some(t))
            .condition("singular_map_rejected", rejected)
            .finish();
        vec![ok, hyp]
    })
}

fn riesz(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, true);
        let d = f.dim();
        let l = if t % 2 == 0 {
            random_invertible(&mut rng, d)
        } else {
            random_rank_deficient(&mut rng, d)
        };
        vec![ctx.record(Some(t), "riesz", transforms::riesz_transform_check(&f, &l, ctx.tol))]
    })
}

fn power_sum(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let f = ctx.frame_or_random(&mut rng, true);
        let a = rng.random_range(-2.0..=2.0);
        let b = rng.random_range(-2.0..=2.0);
        let rec = match transforms::power_sum(&f, a, b, ctx.tol) {
            Ok(r) => {
                let hit = r.flag("minus_one_in_spectrum").unwrap_or(true);
                CheckRecord::from_transform(ctx.info.anchor, Some(t), &r)
                    .condition("spectrum_avoids_minus_one", !hit)
                    .finish()
            }
            Err(e) => CheckRecord::failed_with("power-sum", ctx.info.anchor, Some(t), e),
        };
        vec![rec.residual("a", a).residual("b", b)]
    })
}

fn two_frame(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let d = rng.random_range(2..=6);
        let f = random_riesz_basis(&mut rng, d);
        let l1 = random_invertible(&mut rng, d);
        let (g, l2) = match t % 3 {
            0 => (random_riesz_basis(&mut rng, d), random_invertible(&mut rng, d)),
            1 => (random_riesz_basis(&mut rng, d), random_rank_deficient(&mut rng, d)),
            // G = F and L₁ + L₂ singular, so the combined map is singular.
            _ => (
                f.clone(),
                random_rank_deficient(&mut rng, d)
                    .sub(&l1)
                    .expect("square matrices of equal size"),
            ),
        };
        let square = ctx.record(Some(t), "two-frame", transforms::two_frame_sum(&f, &g, &l1, &l2, ctx.tol));

        let mut rng = ctx.rng(SECOND_FAMILY | t as u64);
        let d = rng.random_range(2..=6);
        let m = rng.random_range(d + 1..=2 * d);
        let f = random_frame(&mut rng, d, m);
        let g = random_frame(&mut rng, d, m);
        let l1 = random_invertible(&mut rng, d);
        let l2 = random_invertible(&mut rng, d);
        let wide = ctx.record(Some(t), "two-frame", transforms::two_frame_sum(&f, &g, &l1, &l2, ctx.tol));
        vec![square, wide]
    })
}

fn exact_records(ctx: &Ctx, r: &ExactReport) -> Vec<CheckRecord> {
    r.checks
        .iter()
        .map(|c| {
            CheckRecord::new(&format!("{}.{}", r.claim, c.name), ctx.info.anchor, None)
                .residual("max_residual", c.max_residual.clone())
                .residual("trials", c.trials)
                .residual("failures", c.failures)
                .condition("exact", c.passed)
                .finish()
        })
        .collect()
}

fn shift(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    match verify_shift_counterexample(SHIFT_MAX_INDEX, trials, ctx.seed) {
        Ok(r) => exact_records(ctx, &r),
        Err(e) => vec![CheckRecord::failed_with("shift", ctx.info.anchor, None, e)],
    }
}

fn tlstar(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    match verify_tlstar_obstruction(trials, ctx.seed, TLSTAR_MAX_INDEX) {
        Ok(r) => exact_records(ctx, &r),
        Err(e) => vec![CheckRecord::failed_with("tlstar", ctx.info.anchor, None, e)],
    }
}

fn commutation_record(ctx: &Ctx, x: &Rational, y: &Rational, stream: u64) -> CheckRecord {
    let mut rng = ctx.rng(stream);
    let r = verify_commutation(x, y, COMMUTATION_SAMPLES, &mut rng);
    CheckRecord::new("commutation", ctx.info.anchor, None)
        .residual("x", r.x)
        .residual("y", r.y)
        .residual("phase_turns", r.phase_turns)
        .residual("phase", r.phase.to_vec())
        .residual("failures", r.failures)
        .condition("exact", r.passed)
        .finish()
}

fn collapse_record(claim: &str, anchor: &str, r: &framekit::gabor_continuous::CollapseReport) -> CheckRecord {
    let mut rec = CheckRecord::new(claim, anchor, None)
        .residual("x", r.x.clone())
        .residual("y", r.y.clone())
        .residual("c_phase", r.c_phase.clone())
        .residual(
            "max_numerator_relative_error",
            r.rows.iter().map(|row| row.numerator_relative_error).fold(0.0, f64::max),
        )
        .residual("numerators", r.rows.iter().map(|row| row.numerator).collect::<Vec<_>>())
        .residual("ratios", r.rows.iter().map(|row| row.ratio).collect::<Vec<_>>());
    rec.conditions = r.checks.clone();
    rec.finish()
}

fn witness(ctx: &Ctx, n_max: usize) -> Vec<CheckRecord> {
    let n_max = n_max.min(u32::MAX as usize) as u32;
    let mut out: Vec<CheckRecord> = WITNESS_CASES
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &(xn, xd, yn, yd, cn, cd))| {
            let (x, y, c) = (rational(xn, xd), rational(yn, yd), rational(cn, cd));
            let collapse = match collapse_report(n_max, &x, &y, &c) {
                Ok(r) => collapse_record("witness-collapse", ctx.info.anchor, &r),
                Err(e) => CheckRecord::failed_with("witness-collapse", ctx.info.anchor, None, e),
            };
            [collapse, commutation_record(ctx, &x, &y, i as u64)]
        })
        .collect();
    let (xn, xd, yn, yd) = CONTRAST_CASE;
    let (x, y) = (rational(xn, xd), rational(yn, yd));
    out.push(match collapse_report(n_max, &x, &y, &integer(0)) {
        Err(GaborError::HypothesisFailed { contrast, .. }) => {
            collapse_record("witness-contrast", ctx.info.anchor, &contrast)
        }
        Ok(_) => CheckRecord::failed_with("witness-contrast", ctx.info.anchor, None, "xy unexpectedly integral"),
        Err(e) => CheckRecord::failed_with("witness-contrast", ctx.info.anchor, None, e),
    });
    out.push(commutation_record(ctx, &x, &y, WITNESS_CASES.len() as u64));
    out
}

fn factorization(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let p = random_lattice_shift(&mut rng);
        let g = match ctx.input {
            Some(Input::Piecewise(g)) => g.clone(),
            _ => random_piecewise(&mut rng, 3),
        };
        let rec = match verify_factorization(&p, &g) {
            Ok(r) => CheckRecord::new("factorization", ctx.info.anchor, Some(t))
                .residual("m", r.m)
                .residual("n", r.n)
                .residual("a", format_rational(&p.a))
                .residual("b", format_rational(&p.b))
                .residual("x", format_rational(&p.x))
                .residual("y", format_rational(&p.y))
                .residual("c_phase", format_rational(&p.c_phase))
                .residual("d_phase", r.d_phase)
                .residual("d", r.d.to_vec())
                .residual("residual_norm_sq", r.residual_norm_sq)
                .condition("exact_match", r.exact_match)
                .condition("d_is_unit", (r.d_modulus - 1.0).abs() <= 1e-12)
                .finish(),
            Err(e) => CheckRecord::failed_with("factorization", ctx.info.anchor, Some(t), e),
        };
        vec![rec]
    })
}

/// Frame operator assembled from the explicit translation and modulation
/// matrices rather than from the generated vectors.
fn assembled_operator(spec: &GaborSystemSpec) -> ComplexMatrix {
    let n = spec.modulus();
    let mut s = ComplexMatrix::zeros(n, n);
    for na in (0..n).step_by(spec.a()) {
        let t = translation_matrix(n, na as i64);
        for mb in (0..n).step_by(spec.b()) {
            let v = modulation_matrix(n, mb as i64)
                .matmul(&t)
                .and_then(|op| op.apply(spec.window()))
                .expect("square matrices of matching size");
            for r in 0..n {
                for c in 0..n {
                    s[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
    }
    s
}

fn lattice_record(ctx: &Ctx, spec: &GaborSystemSpec, trial: Option<usize>) -> CheckRecord {
    let run = || -> Result<CheckRecord, String> {
        let bounds = system_bounds(spec).map_err(|e| e.to_string())?;
        let eig = linalg::hermitian_eigenvalues(&assembled_operator(spec)).map_err(|e| e.to_string())?;
        let (brute_max, brute_min) = (eig[0], eig[eig.len() - 1].max(0.0));
        let scale = bounds.upper.max(f64::MIN_POSITIVE);
        let agree = (bounds.upper - brute_max).abs().max((bounds.lower - brute_min).abs()) / scale;
        let mut rec = CheckRecord::new("gabor-lattice", ctx.info.anchor, trial)
            .residual("N", spec.modulus())
            .residual("a", spec.a())
            .residual("b", spec.b())
            .residual("A", bounds.lower)
            .residual("B", bounds.upper)
            .residual("assembled_agreement", agree)
            .condition("bounds_match_assembled", agree <= GABOR_TIGHT_TOL)
            .flag("is_frame", bounds.is_frame);
        if spec.a() == 1 && spec.b() == 1 {
            let target = spec.modulus() as f64 * linalg::norm_sq(spec.window());
            let err = (bounds.lower - target).abs().max((bounds.upper - target).abs()) / target;
            rec = rec
                .residual("tight_bound", target)
                .residual("tightness", err)
                .condition("tight_with_bound_n_norm_sq", err <= GABOR_TIGHT_TOL);
        }
        Ok(rec.finish())
    };
    run().unwrap_or_else(|e| CheckRecord::failed_with("gabor-lattice", ctx.info.anchor, trial, e))
}

fn perturbation_record(ctx: &Ctx, spec: &GaborSystemSpec, rng: &mut TrialRng, trial: Option<usize>) -> CheckRecord {
    let n = spec.modulus() as i64;
    let x = rng.random_range(0..n);
    let y = rng.random_range(0..n);
    let c = rational(rng.random_range(0..12), 12);
    match perturb_window(spec, x, y, &c) {
        Ok((_, r)) => {
            let scale = linalg::norm_sq(spec.window()).sqrt().max(1.0);
            CheckRecord::new("gabor-perturbation", ctx.info.anchor, trial)
                .residual("x", r.x)
                .residual("y", r.y)
                .residual("c_phase", r.c_phase)
                .residual("unperturbed_A", r.unperturbed.lower)
                .residual("unperturbed_B", r.unperturbed.upper)
                .residual("perturbed_A", r.perturbed.lower)
                .residual("perturbed_B", r.perturbed.upper)
                .residual("lower_ratio", r.lower_ratio)
                .residual("upper_ratio", r.upper_ratio)
                .residual("near_singular_count", r.near_singular_count)
                .residual("commutation_residual", r.commutation_residual)
                .residual("max_factorization_residual", r.max_factorization_residual)
                .condition("shift_commutation", r.commutation_residual <= 1e-12)
                .condition("factorization", r.max_factorization_residual <= 1e-10 * scale)
                .flag("perturbed_is_frame", r.perturbed.is_frame)
                .finish()
        }
        Err(e) => CheckRecord::failed_with("gabor-perturbation", ctx.info.anchor, trial, e),
    }
}

fn gabor_lattice(ctx: &Ctx, trials: usize) -> Vec<CheckRecord> {
    if let Some(Input::Gabor(spec)) = ctx.input {
        let mut rng = ctx.rng(0);
        return vec![lattice_record(ctx, spec, None), perturbation_record(ctx, spec, &mut rng, None)];
    }
    par_trials(trials, |t| {
        let mut rng = ctx.rng(t as u64);
        let window = gaussian_vector(&mut rng, GABOR_MODULUS);
        let spec = GaborSystemSpec::new(GABOR_MODULUS, 1, 1, window).expect("valid full lattice");
        debug_assert_eq!(build_gabor_system(&spec).map(|f| f.len()).ok(), Some(GABOR_MODULUS * GABOR_MODULUS));
        vec![
            lattice_record(ctx, &spec, Some(t)),
            perturbation_record(ctx, &spec, &mut rng, Some(t)),
        ]
    })
}

/// Runs the configured suite and assembles its report.
pub fn run(config: &SuiteConfig) -> Result<Report, CliError> {
    let info = catalogue::find(&config.suite).ok_or_else(|| CliError::UnknownSuite(config.suite.clone()))?;
    let trials = config.trials.unwrap_or(info.default_trials);
    if trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    let input = config
        .input
        .as_deref()
        .map(|p| load_input(info, p, &config.tolerances))
        .transpose()?;
    let ctx = Ctx {
        info,
        seed: config.seed,
        tol: &config.tolerances,
        input: input.as_ref(),
    };
    let checks = match info.name {
        "transform-law" => transform_law(&ctx, trials),
        "two-sided" => two_sided(&ctx, trials),
        "sum-operator" => sum_operator(&ctx, trials),
        "projection-sum" => projection_sum(&ctx, trials),
        "recover" => recover(&ctx, trials),
        "riesz" => riesz(&ctx, trials),
        "power-sum" => power_sum(&ctx, trials),
        "two-frame" => two_frame(&ctx, trials),
        "shift" => shift(&ctx, trials),
        "tlstar" => tlstar(&ctx, trials),
        "witness" => witness(&ctx, trials),
        "factorization" => factorization(&ctx, trials),
        "gabor-lattice" => gabor_lattice(&ctx, trials),
        other => return Err(CliError::UnknownSuite(other.to_string())),
    };
    Ok(Report::new(
        info.name,
        info.anchor,
        config.seed,
        trials,
        config.tolerances,
        config.input.as_ref().map(|p| p.display().to_string()),
        checks,
    ))
}
