//! Gaussian quantum discord of two-mode states, with the measurement on mode B.
//!
//! Everything is expressed through the four local-symplectic invariants
//! `I₁ = det A`, `I₂ = det B`, `I₃ = det C`, `I₄ = det σ`. Entropies are in bits.

use std::fmt;

use crate::error::{domain, Result};
use crate::gaussian::{TwoModeCovariance, PHYSICAL_TOL};

/// Relative tolerance used when clamping square-root arguments that should be
/// non-negative but may come out slightly negative from rounding.
const SQRT_CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    /// `Δ = I₁ + I₂ + 2 I₃`
    pub delta: f64,
    discriminant: f64,
}

impl SymplecticInvariants {
    /// From raw invariant values; the discriminant is taken as `Δ² − 4 I₄`.
    pub fn from_values(i1: f64, i2: f64, i3: f64, i4: f64) -> Self {
        let delta = i1 + i2 + 2.0 * i3;
        Self {
            i1,
            i2,
            i3,
            i4,
            delta,
            discriminant: delta * delta - 4.0 * i4,
        }
    }

    /// `Δ² − 4 I₄`. When built from a covariance this is evaluated in a form
    /// that stays accurate near degenerate spectra.
    pub fn discriminant(&self) -> f64 {
        self.discriminant
    }
}

pub fn symplectic_invariants(sigma: &TwoModeCovariance) -> SymplecticInvariants {
    let (i1, i2, i3, i4) = sigma.block_determinants();
    SymplecticInvariants {
        i1,
        i2,
        i3,
        i4,
        delta: i1 + i2 + 2.0 * i3,
        discriminant: sigma.spectral_discriminant(),
    }
}

/// Clamps a nominally non-negative value to zero if it is negative only within
/// rounding of `scale`.
fn clamp_nonneg(x: f64, scale: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -SQRT_CLAMP_TOL * scale.abs().max(1.0) {
        Ok(0.0)
    } else {
        Err(domain(format!("{what} is negative ({x:e})")))
    }
}

/// `(ν₋, ν₊)` with `ν± = √((Δ ± √(Δ² − 4 I₄)) / 2)`.
pub fn symplectic_eigenvalues(inv: &SymplecticInvariants) -> Result<(f64, f64)> {
    let disc = clamp_nonneg(
        inv.discriminant,
        inv.delta * inv.delta,
        "symplectic discriminant Δ² − 4 det σ",
    )?;
    let root = disc.sqrt();
    let lower = (inv.delta - root) / 2.0;
    if !(lower >= 0.0) {
        return Err(domain(format!(
            "no real symplectic spectrum (Δ = {}, det σ = {})",
            inv.delta, inv.i4
        )));
    }
    Ok((lower.sqrt(), ((inv.delta + root) / 2.0).sqrt()))
}

/// Which closed form of the conditional determinant applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    A,
    B,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::A => "a",
            Branch::B => "b",
        })
    }
}

/// True when `(I₄ − I₁I₂)² ≤ I₃²(I₂ + 1)(I₁ + I₄)`. Ties go to branch A.
pub fn uses_branch_a(inv: &SymplecticInvariants) -> bool {
    let lhs = (inv.i4 - inv.i1 * inv.i2).powi(2);
    let rhs = inv.i3 * inv.i3 * (inv.i2 + 1.0) * (inv.i1 + inv.i4);
    lhs <= rhs
}

/// Minimal conditional determinant `E^min` over Gaussian measurements on mode B.
pub fn e_min(inv: &SymplecticInvariants) -> Result<(f64, Branch)> {
    let SymplecticInvariants { i1, i2, i3, i4, .. } = *inv;
    let i3_sq = i3 * i3;
    if uses_branch_a(inv) {
        if i2 <= 1.0 + 1e-12 {
            return Err(domain(format!(
                "E_min branch a is degenerate for det B = {i2} (mode B is vacuum)"
            )));
        }
        let cross = (i2 - 1.0) * (i4 - i1);
        let inner = clamp_nonneg(i3_sq + cross, i3_sq + cross.abs(), "E_min branch a radicand")?;
        let value = (2.0 * i3_sq + cross + 2.0 * i3.abs() * inner.sqrt()) / (i2 - 1.0).powi(2);
        Ok((value, Branch::A))
    } else {
        if i2 <= 0.0 {
            return Err(domain(format!("E_min branch b needs det B > 0, got {i2}")));
        }
        let p = i1 * i2;
        let radicand = i3_sq * i3_sq + (i4 - p).powi(2) - 2.0 * i3_sq * (i4 + p);
        let scale = i3_sq * i3_sq + (i4 - p).powi(2) + 2.0 * i3_sq * (i4 + p).abs();
        let inner = clamp_nonneg(radicand, scale, "E_min branch b radicand")?;
        Ok(((p - i3_sq + i4 - inner.sqrt()) / (2.0 * i2), Branch::B))
    }
}

/// Entropy of a single-mode thermal state with symplectic eigenvalue `x`:
/// `f(x) = ((x+1)/2) log₂((x+1)/2) − ((x−1)/2) log₂((x−1)/2)`, `f(1) = 0`.
pub fn entropy_f(x: f64) -> Result<f64> {
    if !(x >= 1.0 - PHYSICAL_TOL) {
        return Err(domain(format!("entropy argument {x} is below 1")));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    let (p, m) = ((x + 1.0) / 2.0, (x - 1.0) / 2.0);
    Ok(p * p.log2() - m * m.log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordBreakdown {
    /// `D = f(√I₂) − f(ν₋) − f(ν₊) + f(√E^min)`
    pub discord: f64,
    /// `I = S(ρ_A) + S(ρ_B) − S(ρ_AB)`
    pub mutual_information: f64,
    /// One-way classical correlation `J = I − D`.
    pub classical_correlation: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub e_min: f64,
    pub branch: Branch,
    pub invariants: SymplecticInvariants,
}

/// Gaussian discord of `sigma` with the measurement performed on mode B.
///
/// Product states (`C = 0`) short-circuit to `E^min = I₁` and zero discord;
/// the closed form is 0/0 there when mode B is pure.
pub fn gaussian_discord(sigma: &TwoModeCovariance) -> Result<DiscordBreakdown> {
    let invariants = symplectic_invariants(sigma);
    if sigma.is_product() {
        return product_breakdown(invariants);
    }
    let (nu_minus, nu_plus) = symplectic_eigenvalues(&invariants)?;
    if nu_minus < 1.0 - PHYSICAL_TOL {
        return Err(domain(format!(
            "unphysical covariance: nu_minus = {nu_minus} < 1"
        )));
    }
    let (e, branch) = e_min(&invariants)?;
    let joint = entropy_f(nu_minus)? + entropy_f(nu_plus)?;
    let s_a = entropy_f(invariants.i1.sqrt())?;
    let s_b = entropy_f(invariants.i2.sqrt())?;
    let discord = s_b - joint + entropy_f(e.sqrt())?;
    let mutual_information = s_a + s_b - joint;
    Ok(DiscordBreakdown {
        discord,
        mutual_information,
        classical_correlation: mutual_information - discord,
        nu_minus,
        nu_plus,
        e_min: e,
        branch,
        invariants,
    })
}

/// `C = 0`: the spectrum is `(√I₁, √I₂)` and every correlation vanishes exactly.
fn product_breakdown(invariants: SymplecticInvariants) -> Result<DiscordBreakdown> {
    let (a, b) = (invariants.i1.sqrt(), invariants.i2.sqrt());
    let (nu_minus, nu_plus) = (a.min(b), a.max(b));
    if nu_minus < 1.0 - PHYSICAL_TOL {
        return Err(domain(format!(
            "unphysical covariance: nu_minus = {nu_minus} < 1"
        )));
    }
    Ok(DiscordBreakdown {
        discord: 0.0,
        mutual_information: 0.0,
        classical_correlation: 0.0,
        nu_minus,
        nu_plus,
        e_min: invariants.i1,
        branch: Branch::A,
        invariants,
    })
}

/// Minimum symplectic eigenvalue of the partially transposed state. Values
/// below 1 certify entanglement; at least 1 means PPT, hence separable for
/// two-mode Gaussian states.
pub fn ppt_min_eigenvalue(sigma: &TwoModeCovariance) -> Result<f64> {
    let inv = symplectic_invariants(&sigma.partial_transpose());
    Ok(symplectic_eigenvalues(&inv)?.0)
}
