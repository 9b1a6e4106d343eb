//! Input-state factories and the remote transfer of discord.
//!
//! Alice holds a discordant pair `(a, b)`, Bob an ancilla pair `(c, d)`.
//! Claire mixes `b` and `c` on a 50:50 beam splitter, measures the amplitude
//! quadrature of `f = (b − c)/√2` and the phase quadrature of
//! `e = (b + c)/√2`, and Bob displaces `d` by `√2 g` times each photocurrent.
//! The output is the pair `(a, d')`.
//!
//! Lossless outputs have closed forms. Detector losses on `a`, `e`, `f` and `d'`
//! are handled by the linear-network engine, which is also checked against the
//! closed forms when every efficiency is 1.

use std::f64::consts::SQRT_2;

use crate::error::{invalid, Result};
use crate::gaussian::{
    apply_map, beam_splitter_map, extract_two_mode, feedforward_map, loss_channel, Measured,
    MultimodeGaussianState, Quadrature, TwoModeCovariance,
};

const MODE_A: usize = 0;
const MODE_B: usize = 1;
const MODE_C: usize = 2;
const MODE_D: usize = 3;

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {x}")))
    }
}

fn unit_interval(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ancilla {
    /// Symmetric discordant pair with discording noise `v_b`; `v_b = 0` is a
    /// pair of coherent states.
    Discordant { v_b: f64 },
    /// Two-mode squeezed vacuum with squeeze parameter `r`.
    Epr { r: f64 },
}

/// Detection efficiencies on `a`, `e`, `f` and `d'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiencies {
    pub eta_a: f64,
    pub eta_e: f64,
    pub eta_f: f64,
    pub eta_d: f64,
}

impl Efficiencies {
    pub const PERFECT: Efficiencies = Efficiencies::uniform(1.0);

    pub const fn uniform(eta: f64) -> Self {
        Self {
            eta_a: eta,
            eta_e: eta,
            eta_f: eta,
            eta_d: eta,
        }
    }

    pub fn is_perfect(&self) -> bool {
        *self == Self::PERFECT
    }

    fn validate(&self) -> Result<()> {
        unit_interval("eta_a", self.eta_a)?;
        unit_interval("eta_e", self.eta_e)?;
        unit_interval("eta_f", self.eta_f)?;
        unit_interval("eta_d", self.eta_d)
    }
}

impl Default for Efficiencies {
    fn default() -> Self {
        Self::PERFECT
    }
}

/// Complete parameter record of one protocol run. The gain is common to both
/// quadrature channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferScenario {
    pub v_a: f64,
    pub ancilla: Ancilla,
    pub gain: f64,
    pub efficiencies: Efficiencies,
}

impl TransferScenario {
    pub fn lossless(v_a: f64, ancilla: Ancilla, gain: f64) -> Self {
        Self {
            v_a,
            ancilla,
            gain,
            efficiencies: Efficiencies::PERFECT,
        }
    }

    pub fn with_gain(self, gain: f64) -> Self {
        Self { gain, ..self }
    }

    pub fn with_efficiencies(self, efficiencies: Efficiencies) -> Self {
        Self {
            efficiencies,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("v_a", self.v_a)?;
        match self.ancilla {
            Ancilla::Discordant { v_b } => non_negative("v_b", v_b)?,
            Ancilla::Epr { r } => non_negative("r", r)?,
        }
        if !self.gain.is_finite() {
            return Err(invalid(format!("gain must be finite, got {}", self.gain)));
        }
        self.efficiencies.validate()
    }
}

/// Coherent states displaced by a common classical signal of variance `v`,
/// correlated in `X` and anti-correlated in `Y`:
/// `A = B = (1+v)𝟙`, `C = diag(v, −v)`.
pub fn make_symmetric_discordant(v: f64) -> Result<TwoModeCovariance> {
    non_negative("discording noise", v)?;
    Ok(TwoModeCovariance::diagonal(
        (1.0 + v, 1.0 + v),
        (1.0 + v, 1.0 + v),
        (v, -v),
    ))
}

/// Discordant state whose second mode receives the signal attenuated by `t`:
/// `B = (1 + t²v)𝟙`, `C = diag(tv, −tv)`.
pub fn make_asymmetric_discordant(v: f64, t: f64) -> Result<TwoModeCovariance> {
    non_negative("discording noise", v)?;
    unit_interval("attenuation t", t)?;
    let vb = 1.0 + t * t * v;
    Ok(TwoModeCovariance::diagonal(
        (1.0 + v, 1.0 + v),
        (vb, vb),
        (t * v, -t * v),
    ))
}

/// Two-mode squeezed vacuum, `V_E = cosh 2r` and correlations
/// `±√(V_E² − 1) = ±sinh 2r`.
pub fn make_epr(r: f64) -> Result<TwoModeCovariance> {
    non_negative("squeeze parameter r", r)?;
    let (ve, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    Ok(TwoModeCovariance::diagonal((ve, ve), (ve, ve), (s, -s)))
}

/// Beam-splitter loss `t1` on mode A and `t2` on mode B.
pub fn attenuate_both_modes(
    sigma: &TwoModeCovariance,
    t1: f64,
    t2: f64,
) -> Result<TwoModeCovariance> {
    unit_interval("t1", t1)?;
    unit_interval("t2", t2)?;
    let id = nalgebra::Matrix2::identity();
    TwoModeCovariance::from_blocks(
        sigma.a() * t1 + id * (1.0 - t1),
        sigma.b() * t2 + id * (1.0 - t2),
        sigma.c() * (t1 * t2).sqrt(),
    )
}

fn output_with_bob_variance(v_a: f64, g: f64, v_d: f64) -> TwoModeCovariance {
    TwoModeCovariance::diagonal((1.0 + v_a, 1.0 + v_a), (v_d, v_d), (g * v_a, -g * v_a))
}

/// Lossless output with a discordant ancilla:
/// `V_d' = 1 + 2g² + g²V_A + (1 − g)²V_B`.
pub fn transfer_with_discordant_closed_form(
    v_a: f64,
    v_b: f64,
    g: f64,
) -> Result<TwoModeCovariance> {
    TransferScenario::lossless(v_a, Ancilla::Discordant { v_b }, g).validate()?;
    let v_d = 1.0 + 2.0 * g * g + g * g * v_a + (1.0 - g).powi(2) * v_b;
    Ok(output_with_bob_variance(v_a, g, v_d))
}

/// Lossless output with an EPR ancilla:
/// `V_Ed' = (g² + 1)V_E − 2g√(V_E² − 1) + g²(1 + V_A)`.
pub fn transfer_with_epr_closed_form(v_a: f64, r: f64, g: f64) -> Result<TwoModeCovariance> {
    TransferScenario::lossless(v_a, Ancilla::Epr { r }, g).validate()?;
    let (ve, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let v_d = (g * g + 1.0) * ve - 2.0 * g * s + g * g * (1.0 + v_a);
    Ok(output_with_bob_variance(v_a, g, v_d))
}

/// Closed-form output; only defined for perfect detection.
pub fn transfer_closed_form(scenario: &TransferScenario) -> Result<TwoModeCovariance> {
    if !scenario.efficiencies.is_perfect() {
        return Err(invalid(
            "no closed form with detection loss; use transfer_via_engine",
        ));
    }
    match scenario.ancilla {
        Ancilla::Discordant { v_b } => {
            transfer_with_discordant_closed_form(scenario.v_a, v_b, scenario.gain)
        }
        Ancilla::Epr { r } => transfer_with_epr_closed_form(scenario.v_a, r, scenario.gain),
    }
}

pub fn ancilla_state(ancilla: Ancilla) -> Result<TwoModeCovariance> {
    match ancilla {
        Ancilla::Discordant { v_b } => make_symmetric_discordant(v_b),
        Ancilla::Epr { r } => make_epr(r),
    }
}

/// Output `(a, d')` simulated on the four-mode state `(a, b, c, d)`.
pub fn transfer_via_engine(scenario: &TransferScenario) -> Result<TwoModeCovariance> {
    scenario.validate()?;
    let eff = scenario.efficiencies;
    let alice = MultimodeGaussianState::from_two_mode(&make_symmetric_discordant(scenario.v_a)?);
    let bob = MultimodeGaussianState::from_two_mode(&ancilla_state(scenario.ancilla)?);
    let mut state = alice.direct_sum(&bob);

    state = loss_channel(&state, MODE_A, eff.eta_a)?;
    // Mode b becomes e = (b + c)/√2, mode c becomes (c − b)/√2 = −f.
    state = apply_map(&state, &beam_splitter_map(0.5, MODE_B, MODE_C, 4)?)?;
    state = loss_channel(&state, MODE_B, eff.eta_e)?;
    state = loss_channel(&state, MODE_C, eff.eta_f)?;

    // i₁ = X_f = −X_(mode c), i₂ = Y_e = Y_(mode b); d' = d + √2 g (i₁ + i i₂).
    let photocurrents = [
        Measured::new(MODE_C, Quadrature::X, -1.0),
        Measured::new(MODE_B, Quadrature::Y, 1.0),
    ];
    let ff = feedforward_map(&photocurrents, MODE_D, SQRT_2 * scenario.gain, 4)?;
    state = apply_map(&state, &ff)?;
    state = loss_channel(&state, MODE_D, eff.eta_d)?;

    extract_two_mode(&state, MODE_A, MODE_D)
}

/// Closed form when detection is perfect, engine otherwise.
pub fn transfer(scenario: &TransferScenario) -> Result<TwoModeCovariance> {
    if scenario.efficiencies.is_perfect() {
        transfer_closed_form(scenario)
    } else {
        transfer_via_engine(scenario)
    }
}
