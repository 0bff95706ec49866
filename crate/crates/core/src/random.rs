//! Seeded random generators for vectors, operators and frames.
//!
//! Every trial gets its own ChaCha stream derived from `(seed, trial)`, so a
//! batch of trials produces the same values regardless of how it is scheduled.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::frames::FrameSystem;
use crate::linalg::ComplexMatrix;

pub type TrialRng = ChaCha8Rng;

/// Independent generator for trial `trial` under master seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian (independent N(0, 1/2) real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

/// Uniformly distributed point on the unit sphere of `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite gaussian entries")
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_matrix(rng, dim, dim).hermitian_part()
}

/// Haar-like unitary from modified Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    loop {
        let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut v = gaussian_vector(rng, dim);
            for _ in 0..2 {
                for q in &columns {
                    let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, qk) in v.iter_mut().zip(q) {
                        *x -= proj * qk;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                break;
            }
            columns.push(v.into_iter().map(|z| z / norm).collect());
        }
        if columns.len() == dim {
            return ComplexMatrix::from_columns(&columns);
        }
    }
}

fn uniform_singular_values<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(0.5..=2.0)).collect()
}

/// `U · diag(σ) · V*` with `σ ∈ [1/2, 2]` and the listed number of exact
/// zeros appended, so `‖L‖ ≤ 2` and the smallest nonzero singular value is
/// at least 1/2.
fn with_spectrum<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, rank: usize) -> ComplexMatrix {
    let u = random_unitary(rng, rows);
    let v = random_unitary(rng, cols);
    let sigma = uniform_singular_values(rng, rank);
    let mut core = ComplexMatrix::zeros(rows, cols);
    for (i, s) in sigma.into_iter().enumerate() {
        core[(i, i)] = Complex64::new(s, 0.0);
    }
    u.mul(&core).mul(&v.adjoint())
}

/// Surjective `rows × cols` map (`rows ≤ cols`) with singular values in `[1/2, 2]`.
pub fn random_surjective<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows <= cols, "a surjective map needs rows <= cols");
    with_spectrum(rng, rows, cols, rows)
}

pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    with_spectrum(rng, dim, dim, dim)
}

/// Square map of rank strictly below `dim` (possibly zero).
pub fn random_rank_deficient<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let rank = rng.random_range(0..dim);
    with_spectrum(rng, dim, dim, rank)
}

/// Idempotent `X · diag(1,…,1,0,…,0) · X⁻¹` of the given rank; `X` is a
/// well-conditioned invertible map, so `P` is oblique in general.
pub fn random_idempotent<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    assert!(rank <= dim);
    let u = random_unitary(rng, dim);
    let v = random_unitary(rng, dim);
    let sigma = uniform_singular_values(rng, dim);
    let x = u.mul(&ComplexMatrix::from_real_diag(&sigma)).mul(&v.adjoint());
    let inv_sigma: Vec<f64> = sigma.iter().map(|s| 1.0 / s).collect();
    let x_inv = v.mul(&ComplexMatrix::from_real_diag(&inv_sigma)).mul(&u.adjoint());
    let mask: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    x.mul(&ComplexMatrix::from_real_diag(&mask)).mul(&x_inv)
}

/// Frame of `count ≥ dim` vectors: the first `dim` vectors are the columns of
/// an invertible map, the rest Gaussian, so the family always spans.
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> FrameSystem {
    assert!(count >= dim && dim >= 1);
    let basis = random_invertible(rng, dim);
    let mut vectors: Vec<Vec<Complex64>> = (0..dim).map(|c| basis.column(c)).collect();
    vectors.extend((dim..count).map(|_| gaussian_vector(rng, dim)));
    FrameSystem::new(dim, vectors).expect("finite vectors")
}

/// Riesz basis of `C^dim`: the image of the standard basis under a random
/// invertible map.
pub fn random_riesz_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> FrameSystem {
    random_frame(rng, dim, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_surjective, rank, svd, DEFAULT_RANK_TOL};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = trial_rng(42, 3).random();
        let b: f64 = trial_rng(42, 3).random();
        let c: f64 = trial_rng(42, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = trial_rng(1, 0);
        let u = random_unitary(&mut rng, 6);
        let defect = u.adjoint().mul(&u).sub(&ComplexMatrix::identity(6)).unwrap().frobenius_norm();
        assert!(defect < 1e-13);
    }

    #[test]
    fn sampled_operators_have_requested_rank() {
        for trial in 0..20 {
            let mut rng = trial_rng(2, trial);
            let l = random_surjective(&mut rng, 3, 5);
            assert!(is_surjective(&l, DEFAULT_RANK_TOL).unwrap());
            let s = svd(&l).unwrap();
            assert!(s.singular_values[0] <= 2.0 + 1e-12);
            assert!(s.singular_values[2] >= 0.5 - 1e-12);

            let d = random_rank_deficient(&mut rng, 4);
            assert!(rank(&d, DEFAULT_RANK_TOL).unwrap() < 4);

            let r = rng.random_range(0..=4);
            let p = random_idempotent(&mut rng, 4, r);
            let defect = p.mul(&p).sub(&p).unwrap().frobenius_norm();
            assert!(defect < 1e-12 * p.frobenius_norm().max(1.0).powi(2));
            assert_eq!(rank(&p, 1e-8).unwrap(), r);
        }
    }
}
