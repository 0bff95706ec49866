//! The named verification suites.

use serde::Serialize;

/// What `--input` supplies to a suite, if anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    None,
    Frame,
    RieszBasis,
    Piecewise,
    GaborSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub default_trials: usize,
    pub input: InputKind,
}

pub const SUITES: [SuiteInfo; 13] = [
    SuiteInfo {
        name: "transform-law",
        anchor: "{Lf_i} is a frame iff L is surjective; frame operator LSL*, bounds A‖L†‖⁻² and B‖L‖²",
        default_trials: 500,
        input: InputKind::Frame,
    },
    SuiteInfo {
        name: "two-sided",
        anchor: "{Lf_i} and {L*f_i} are both frames iff L is invertible; surjective non-invertible maps still give frames",
        default_trials: 100,
        input: InputKind::Frame,
    },
    SuiteInfo {
        name: "sum-operator",
        anchor: "{f_i + Lf_i} is a frame iff I + L is surjective",
        default_trials: 100,
        input: InputKind::Frame,
    },
    SuiteInfo {
        name: "projection-sum",
        anchor: "(I + aP)(I − a/(a+1)P) = I for idempotent P and a ≠ −1, so {f_i + aPf_i} is a frame",
        default_trials: 100,
        input: InputKind::Frame,
    },
    SuiteInfo {
        name: "recover",
        anchor: "if {Lf_i} and {L*f_i} are frames then F is a frame with operator L⁻¹S_L(L*)⁻¹",
        default_trials: 100,
        input: InputKind::Frame,
    },
    SuiteInfo {
        name: "riesz",
        anchor: "the image of a Riesz basis has analysis operator TL* and is a Riesz basis iff L (or I + L) is invertible",
        default_trials: 100,
        input: InputKind::RieszBasis,
    },
    SuiteInfo {
        name: "power-sum",
        anchor: "{S^a f_i + S^b g_i} with the canonical dual g is a Riesz basis when −1 is not in the spectrum of S^{b−a−1}",
        default_trials: 100,
        input: InputKind::RieszBasis,
    },
    SuiteInfo {
        name: "two-frame",
        anchor: "{L₁f_i + L₂g_i} has analysis operator T₁L₁* + T₂L₂* and is a Riesz basis iff that map is invertible",
        default_trials: 100,
        input: InputKind::None,
    },
    SuiteInfo {
        name: "shift",
        anchor: "the backward shift has LL* = I and {Le_n} is a tight frame, yet {L*e_n} is not a frame and L is not invertible",
        default_trials: 1000,
        input: InputKind::None,
    },
    SuiteInfo {
        name: "tlstar",
        anchor: "δ₁ is never in the range of TL*, although {2Le_n} is a tight frame",
        default_trials: 100,
        input: InputKind::None,
    },
    SuiteInfo {
        name: "witness",
        anchor: "‖(I + cE_yT_x)f_n‖² = 2x while ‖f_n‖² = nx when xy is an integer, so I + cE_yT_x has no lower bound",
        default_trials: 64,
        input: InputKind::None,
    },
    SuiteInfo {
        name: "factorization",
        anchor: "E_{mb}T_{na}(g + cE_yT_xg) = (I + dT_xE_y)(E_{mb}T_{na}g) with |d| = 1",
        default_trials: 50,
        input: InputKind::Piecewise,
    },
    SuiteInfo {
        name: "gabor-lattice",
        anchor: "the full lattice Gabor system on Z_N is a tight frame with bound N‖g‖²",
        default_trials: 20,
        input: InputKind::GaborSpec,
    },
];

pub fn find(name: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name)
}
