//! Finitely supported sequences on `{1, 2, 3, …}` with exact Gaussian-rational
//! coefficients, and the forward/backward shift.
//!
//! `Down` is the backward shift `L e_n = e_{n−1}`, `L e_1 = 0`; `Up` is its
//! adjoint `L* e_n = e_{n+1}`. Identities of the form "Σ_n |⟨h, L e_n⟩|² = ‖h‖²"
//! are checked on the dense subspace of finitely supported sequences, where
//! every sum is finite and every value exact. Both sides of each identity are
//! continuous in `h`, so agreement on that subspace carries over to `ℓ²`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, ExactComplex, Rational};
use crate::random::trial_rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SparseSeqError {
    #[error("sequence indices start at 1, got {0}")]
    ZeroIndex(u64),
    #[error("zero denominator at index {0}")]
    ZeroDenominator(u64),
    #[error("coefficient at index {0} does not fit the integer range of the JSON encoding")]
    Overflow(u64),
    #[error("max_index must be at least 2, got {0}")]
    MaxIndexTooSmall(u64),
}

/// Finitely supported sequence; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Deserialize)]
#[serde(try_from = "SeqRepr")]
pub struct SparseSeq {
    entries: BTreeMap<u64, ExactComplex>,
}

fn exact_zero() -> ExactComplex {
    Complex::new(Rational::zero(), Rational::zero())
}

fn is_zero(z: &ExactComplex) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

impl SparseSeq {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit vector `δ_n = e_n`.
    pub fn delta(n: u64) -> Self {
        assert!(n >= 1, "sequence indices start at 1");
        let mut s = Self::zero();
        s.entries.insert(n, Complex::new(Rational::from_integer(1.into()), Rational::zero()));
        s
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (u64, ExactComplex)>,
    ) -> Result<Self, SparseSeqError> {
        let mut s = Self::zero();
        for (n, z) in entries {
            if n == 0 {
                return Err(SparseSeqError::ZeroIndex(n));
            }
            s.add_at(n, z);
        }
        Ok(s)
    }

    fn add_at(&mut self, n: u64, z: ExactComplex) {
        if is_zero(&z) {
            return;
        }
        let slot = self.entries.entry(n).or_insert_with(exact_zero);
        *slot = &*slot + z;
        if is_zero(slot) {
            self.entries.remove(&n);
        }
    }

    pub fn get(&self, n: u64) -> ExactComplex {
        self.entries.get(&n).cloned().unwrap_or_else(exact_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &ExactComplex)> {
        self.entries.iter().map(|(&n, z)| (n, z))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Largest index carrying a nonzero coefficient.
    pub fn max_index(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨self, other⟩ = Σ self_n conj(other_n)`.
    pub fn inner(&self, other: &Self) -> ExactComplex {
        let (small, large, swap) = if self.entries.len() <= other.entries.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = exact_zero();
        for (n, a) in &small.entries {
            if let Some(b) = large.entries.get(n) {
                acc = if swap { acc + b * a.conj() } else { acc + a * b.conj() };
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> Rational {
        self.entries.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&n, z) in &other.entries {
            out.add_at(n, z.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Complex::new(Rational::from_integer((-1).into()), Rational::zero())))
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        let mut out = Self::zero();
        for (&n, z) in &self.entries {
            out.add_at(n, z * c);
        }
        out
    }

    /// Restriction to index 1, i.e. `⟨h, δ₁⟩ δ₁`.
    pub fn head_projection(&self) -> Self {
        let mut out = Self::zero();
        out.add_at(1, self.get(1));
        out
    }
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    entries: Vec<(u64, [i64; 4])>,
}

impl TryFrom<SeqRepr> for SparseSeq {
    type Error = SparseSeqError;

    fn try_from(repr: SeqRepr) -> Result<Self, SparseSeqError> {
        let mut entries = Vec::with_capacity(repr.entries.len());
        for (n, [rn, rd, inum, id]) in repr.entries {
            if rd == 0 || id == 0 {
                return Err(SparseSeqError::ZeroDenominator(n));
            }
            let re = BigRational::new(BigInt::from(rn), BigInt::from(rd));
            let im = BigRational::new(BigInt::from(inum), BigInt::from(id));
            entries.push((n, Complex::new(re, im)));
        }
        SparseSeq::from_entries(entries)
    }
}

impl SparseSeq {
    /// JSON-ready entries `[index, [re_num, re_den, im_num, im_den]]`.
    fn to_repr(&self) -> Result<SeqRepr, SparseSeqError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (&n, z) in &self.entries {
            let parts = [z.re.numer(), z.re.denom(), z.im.numer(), z.im.denom()];
            let mut out = [0i64; 4];
            for (o, p) in out.iter_mut().zip(parts) {
                *o = p.to_i64().ok_or(SparseSeqError::Overflow(n))?;
            }
            entries.push((n, out));
        }
        Ok(SeqRepr { entries })
    }
}

impl Serialize for SparseSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_repr()
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftOp {
    /// `L e_n = e_{n−1}`, `L e_1 = 0`.
    Down,
    /// `L* e_n = e_{n+1}`.
    Up,
}

impl ShiftOp {
    pub fn adjoint(self) -> Self {
        match self {
            ShiftOp::Down => ShiftOp::Up,
            ShiftOp::Up => ShiftOp::Down,
        }
    }
}

pub fn apply_shift(op: ShiftOp, h: &SparseSeq) -> SparseSeq {
    let entries = h.entries.iter().filter_map(|(&n, z)| match op {
        ShiftOp::Down => (n > 1).then(|| (n - 1, z.clone())),
        ShiftOp::Up => Some((n + 1, z.clone())),
    });
    SparseSeq {
        entries: entries.collect(),
    }
}

/// Random sequence with up to `max_entries` nonzero coefficients on indices
/// `1..=max_index`; coefficients have numerators in `[-20, 20]` and
/// denominators in `[1, 12]`.
pub fn random_sparse<R: Rng + ?Sized>(rng: &mut R, max_index: u64, max_entries: usize) -> SparseSeq {
    let count = rng.random_range(1..=max_entries.max(1));
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let n = rng.random_range(1..=max_index);
        let re = BigRational::new(rng.random_range(-20i64..=20).into(), rng.random_range(1i64..=12).into());
        let im = BigRational::new(rng.random_range(-20i64..=20).into(), rng.random_range(1i64..=12).into());
        entries.push((n, Complex::new(re, im)));
    }
    SparseSeq::from_entries(entries).expect("indices are positive")
}

/// One exact identity checked over many inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactCheck {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest exact residual seen, as `"p/q"`.
    pub max_residual: String,
    pub passed: bool,
}

struct CheckAccumulator {
    name: &'static str,
    trials: usize,
    failures: usize,
    max_residual: Rational,
}

impl CheckAccumulator {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            failures: 0,
            max_residual: Rational::zero(),
        }
    }

    /// Records a residual that must be exactly zero.
    fn record_zero(&mut self, residual: Rational) {
        self.record(residual.is_zero(), residual);
    }

    fn record(&mut self, ok: bool, residual: Rational) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
        }
        let residual = num_traits::Signed::abs(&residual);
        if residual > self.max_residual {
            self.max_residual = residual;
        }
    }

    fn finish(self) -> ExactCheck {
        ExactCheck {
            name: self.name.to_string(),
            trials: self.trials,
            failures: self.failures,
            max_residual: format_rational(&self.max_residual),
            passed: self.failures == 0 && self.trials > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    pub claim: String,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<ExactCheck>,
    pub passed: bool,
}

impl ExactReport {
    fn new(claim: &str, trials: usize, seed: u64, checks: Vec<ExactCheck>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            claim: claim.to_string(),
            trials,
            seed,
            checks,
            passed,
        }
    }

    pub fn check(&self, name: &str) -> Option<&ExactCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `Σ_n |⟨h, v_n⟩|²` over `n = 1..=upto`, with `v_n` produced by `family`.
fn enumerate_frame_sum(h: &SparseSeq, upto: u64, family: impl Fn(u64) -> SparseSeq) -> Rational {
    (1..=upto).map(|n| h.inner(&family(n)).norm_sqr()).sum()
}

/// Entries per random sequence in the counterexample checks.
const RANDOM_SUPPORT: usize = 24;

/// The backward shift `L` satisfies `LL* = I`, `{L e_n}` is a tight frame with
/// bound 1, yet `{L* e_n}` has no lower frame bound and `L` is not invertible.
///
/// Checks, all with exact arithmetic:
/// - `ll_star_identity`: `L L* h = h`;
/// - `tight_frame_identity`: `Σ_n |⟨h, L e_n⟩|² = ‖h‖²`, summing over every
///   `n` that can contribute;
/// - `adjoint_family_lower_bound_fails`: `Σ_n |⟨δ₁, L* e_n⟩|² = 0 < ‖δ₁‖²`;
/// - `kernel_and_cokernel`: `⟨L e₁, h⟩ = 0` and `(L* h)₁ = 0`, so `e₁ ∈ ker L`
///   and `δ₁ ⟂ range L*`: `L` is not injective and `L*` not surjective.
pub fn verify_shift_counterexample(
    max_index: u64,
    trials: usize,
    seed: u64,
) -> Result<ExactReport, SparseSeqError> {
    if max_index < 2 {
        return Err(SparseSeqError::MaxIndexTooSmall(max_index));
    }
    let down = |n: u64| apply_shift(ShiftOp::Down, &SparseSeq::delta(n));
    let up = |n: u64| apply_shift(ShiftOp::Up, &SparseSeq::delta(n));
    let le1 = down(1);

    let mut ll_star = CheckAccumulator::new("ll_star_identity");
    let mut tight = CheckAccumulator::new("tight_frame_identity");
    let mut kernel = CheckAccumulator::new("kernel_and_cokernel");
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let h = random_sparse(&mut rng, max_index, RANDOM_SUPPORT);

        let back = apply_shift(ShiftOp::Down, &apply_shift(ShiftOp::Up, &h));
        ll_star.record_zero(back.sub(&h).norm_sq());

        // ⟨h, L e_n⟩ can be nonzero only for n − 1 in the support of h.
        let upto = h.max_index().unwrap_or(0) + 1;
        let lhs = enumerate_frame_sum(&h, upto, down);
        tight.record_zero(lhs - h.norm_sq());

        let up_h = apply_shift(ShiftOp::Up, &h);
        kernel.record_zero(le1.inner(&h).norm_sqr() + up_h.get(1).norm_sqr());
    }

    let mut lower = CheckAccumulator::new("adjoint_family_lower_bound_fails");
    let delta1 = SparseSeq::delta(1);
    let sum = enumerate_frame_sum(&delta1, max_index, up);
    let norm = delta1.norm_sq();
    lower.record(sum.is_zero() && norm > Rational::zero(), sum);

    Ok(ExactReport::new(
        "shift",
        trials,
        seed,
        vec![ll_star.finish(), tight.finish(), lower.finish(), kernel.finish()],
    ))
}

/// With `T` the analysis operator of `{e_n}` and `L` the backward shift,
/// `(TL*h)_n = ⟨L* h, e_n⟩ = ⟨h, L e_n⟩`. The first coordinate is always 0, so
/// `δ₁` is outside the range of `TL*` (and of `2TL*`), although `{2 L e_n}` is
/// a tight frame with bound 4.
pub fn verify_tlstar_obstruction(trials: usize, seed: u64, max_index: u64) -> Result<ExactReport, SparseSeqError> {
    if max_index < 2 {
        return Err(SparseSeqError::MaxIndexTooSmall(max_index));
    }
    let two = Complex::new(Rational::from_integer(2.into()), Rational::zero());
    let le1 = apply_shift(ShiftOp::Down, &SparseSeq::delta(1));

    let mut first = CheckAccumulator::new("first_coordinate_vanishes");
    let mut routes = CheckAccumulator::new("coordinate_routes_agree");
    let mut tight = CheckAccumulator::new("scaled_tight_frame_identity");
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let h = random_sparse(&mut rng, max_index, RANDOM_SUPPORT);
        let tl_star_h = apply_shift(ShiftOp::Up, &h);

        first.record_zero(tl_star_h.get(1).norm_sqr() + h.inner(&le1).norm_sqr());

        let upto = h.max_index().unwrap_or(0) + 1;
        let mut mismatch = Rational::zero();
        for n in 1..=upto + 1 {
            let via_adjoint = h.inner(&apply_shift(ShiftOp::Down, &SparseSeq::delta(n)));
            mismatch += (tl_star_h.get(n) - via_adjoint).norm_sqr();
        }
        routes.record_zero(mismatch);

        let lhs = enumerate_frame_sum(&h, upto, |n| {
            apply_shift(ShiftOp::Down, &SparseSeq::delta(n)).scale(&two)
        });
        tight.record_zero(lhs - h.norm_sq() * Rational::from_integer(4.into()));
    }
    Ok(ExactReport::new(
        "tlstar",
        trials,
        seed,
        vec![first.finish(), routes.finish(), tight.finish()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use proptest::prelude::*;

    fn c(re: Rational, im: Rational) -> ExactComplex {
        Complex::new(re, im)
    }

    #[test]
    fn shift_examples() {
        assert!(apply_shift(ShiftOp::Down, &SparseSeq::delta(1)).is_zero());
        assert_eq!(apply_shift(ShiftOp::Down, &SparseSeq::delta(5)), SparseSeq::delta(4));
        let d1 = SparseSeq::delta(1);
        assert!(apply_shift(ShiftOp::Up, &apply_shift(ShiftOp::Down, &d1)).is_zero());
        assert_eq!(apply_shift(ShiftOp::Down, &apply_shift(ShiftOp::Up, &d1)), d1);
    }

    #[test]
    fn ll_star_on_delta_three() {
        let h = SparseSeq::delta(3);
        let back = apply_shift(ShiftOp::Down, &apply_shift(ShiftOp::Up, &h));
        assert_eq!(back, h);
    }

    #[test]
    fn delta_one_sees_nothing_of_the_adjoint_family() {
        let h = SparseSeq::delta(1);
        let sum: Rational = (1..=50)
            .map(|n| h.inner(&apply_shift(ShiftOp::Up, &SparseSeq::delta(n))).norm_sqr())
            .sum();
        assert!(sum.is_zero());
        assert!(apply_shift(ShiftOp::Down, &h).norm_sq().is_zero());
    }

    #[test]
    fn tlstar_coordinates_for_small_deltas() {
        let le = |n| apply_shift(ShiftOp::Down, &SparseSeq::delta(n));
        let d1 = SparseSeq::delta(1);
        assert!(d1.inner(&le(1)).norm_sqr().is_zero());
        let d2 = SparseSeq::delta(2);
        assert!(d2.inner(&le(1)).norm_sqr().is_zero());
        assert!(d2.inner(&le(2)).norm_sqr().is_zero());
        // ... and the third coordinate of TL*δ₂ is 1.
        assert_eq!(d2.inner(&le(3)), c(rational(1, 1), rational(0, 1)));
    }

    #[test]
    fn counterexample_reports_pass() {
        let r = verify_shift_counterexample(1000, 60, 7).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert!(r.checks.iter().all(|c| c.max_residual == "0/1"));
        let r = verify_tlstar_obstruction(60, 8, 500).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(verify_shift_counterexample(1, 1, 0), Err(SparseSeqError::MaxIndexTooSmall(1)));
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let z = c(rational(0, 1), rational(0, 1));
        let s = SparseSeq::from_entries([(3, z)]).unwrap();
        assert!(s.is_zero());
        let one = c(rational(1, 2), rational(0, 1));
        let s = SparseSeq::from_entries([(2, one.clone()), (2, -one)]).unwrap();
        assert_eq!(s.support_len(), 0);
        assert_eq!(
            SparseSeq::from_entries([(0, c(rational(1, 1), rational(0, 1)))]),
            Err(SparseSeqError::ZeroIndex(0))
        );
    }

    #[test]
    fn json_encoding() {
        let s = SparseSeq::from_entries([
            (1, c(rational(1, 2), rational(-3, 4))),
            (7, c(rational(2, 1), rational(0, 1))),
        ])
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"entries":[[1,[1,2,-3,4]],[7,[2,1,0,1]]]}"#);
        let back: SparseSeq = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SparseSeq>(r#"{"entries":[[0,[1,1,0,1]]]}"#).is_err());
        assert!(serde_json::from_str::<SparseSeq>(r#"{"entries":[[1,[1,0,0,1]]]}"#).is_err());
    }

    fn arb_seq() -> impl Strategy<Value = SparseSeq> {
        prop::collection::vec((1u64..40, -9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6), 0..12).prop_map(|v| {
            SparseSeq::from_entries(
                v.into_iter()
                    .map(|(n, a, b, x, y)| (n, c(rational(a, b), rational(x, y)))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn down_after_up_is_identity(h in arb_seq()) {
            prop_assert_eq!(apply_shift(ShiftOp::Down, &apply_shift(ShiftOp::Up, &h)), h);
        }

        #[test]
        fn up_after_down_drops_the_head(h in arb_seq()) {
            let round = apply_shift(ShiftOp::Up, &apply_shift(ShiftOp::Down, &h));
            prop_assert_eq!(round, h.sub(&h.head_projection()));
        }

        #[test]
        fn shifts_are_adjoint(h in arb_seq(), g in arb_seq()) {
            prop_assert_eq!(
                apply_shift(ShiftOp::Up, &h).inner(&g),
                h.inner(&apply_shift(ShiftOp::Down, &g))
            );
        }

        #[test]
        fn norm_bookkeeping(h in arb_seq()) {
            prop_assert_eq!(apply_shift(ShiftOp::Up, &h).norm_sq(), h.norm_sq());
            prop_assert_eq!(
                apply_shift(ShiftOp::Down, &h).norm_sq(),
                h.norm_sq() - h.get(1).norm_sqr()
            );
        }
    }
}
