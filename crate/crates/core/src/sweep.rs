//! Parameter sweeps over the state factories and the transfer protocol.
//!
//! A sweep evaluates one [`Model`] on a 1-D or 2-D grid. Rows come out in
//! lexicographic order of the swept parameters (first axis outermost) and are
//! evaluated concurrently; the table is assembled in order afterwards.

use std::fmt;
use std::str::FromStr;

use crate::discord::{gaussian_discord, ppt_min_eigenvalue};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::gaussian::TwoModeCovariance;
use crate::optimize::{optimal_gain, SearchOptions};
use crate::protocol::{
    attenuate_both_modes, make_asymmetric_discordant, make_symmetric_discordant, transfer, Ancilla,
    Efficiencies, TransferScenario,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    VA,
    VB,
    R,
    G,
    T,
    T1,
    T2,
    Eta,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::VA,
        Param::VB,
        Param::R,
        Param::G,
        Param::T,
        Param::T1,
        Param::T2,
        Param::Eta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::VA => "v_a",
            Param::VB => "v_b",
            Param::R => "r",
            Param::G => "g",
            Param::T => "t",
            Param::T1 => "t1",
            Param::T2 => "t2",
            Param::Eta => "eta",
        }
    }

    fn index(self) -> usize {
        Param::ALL.iter().position(|&p| p == self).unwrap()
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "va" => "v_a",
            "vb" => "v_b",
            other => other,
        }
        .to_string();
        Param::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| invalid(format!("unknown parameter '{s}'")))
    }
}

/// Value of every parameter; each model reads the ones it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet([f64; 8]);

impl Default for ParamSet {
    fn default() -> Self {
        // v_a, v_b, r, g, t, t1, t2, eta
        ParamSet([50.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    }
}

impl ParamSet {
    pub fn get(&self, p: Param) -> f64 {
        self.0[p.index()]
    }

    pub fn set(&mut self, p: Param, v: f64) {
        self.0[p.index()] = v;
    }

    pub fn with(mut self, p: Param, v: f64) -> Self {
        self.set(p, v);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaKind {
    Discordant,
    Epr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Symmetric discordant state with noise `v_a`.
    Symmetric,
    /// Asymmetric discordant state `(v_a, t)`.
    Asymmetric,
    /// Symmetric state `v_a` with beam-splitter attenuation `t1`, `t2`.
    Attenuated,
    /// Protocol output `(a, d')`; `v_b` or `r` selects the ancilla strength and
    /// `eta` is applied to all four detected modes.
    Transfer(AncillaKind),
}

impl Model {
    pub fn params(self) -> &'static [Param] {
        match self {
            Model::Symmetric => &[Param::VA],
            Model::Asymmetric => &[Param::VA, Param::T],
            Model::Attenuated => &[Param::VA, Param::T1, Param::T2],
            Model::Transfer(AncillaKind::Discordant) => &[Param::VA, Param::VB, Param::G, Param::Eta],
            Model::Transfer(AncillaKind::Epr) => &[Param::VA, Param::R, Param::G, Param::Eta],
        }
    }

    pub fn scenario(self, p: &ParamSet) -> Option<TransferScenario> {
        let ancilla = match self {
            Model::Transfer(AncillaKind::Discordant) => Ancilla::Discordant { v_b: p.get(Param::VB) },
            Model::Transfer(AncillaKind::Epr) => Ancilla::Epr { r: p.get(Param::R) },
            _ => return None,
        };
        Some(
            TransferScenario::lossless(p.get(Param::VA), ancilla, p.get(Param::G))
                .with_efficiencies(Efficiencies::uniform(p.get(Param::Eta))),
        )
    }

    pub fn state(self, p: &ParamSet) -> Result<TwoModeCovariance> {
        match self {
            Model::Symmetric => make_symmetric_discordant(p.get(Param::VA)),
            Model::Asymmetric => make_asymmetric_discordant(p.get(Param::VA), p.get(Param::T)),
            Model::Attenuated => attenuate_both_modes(
                &make_symmetric_discordant(p.get(Param::VA))?,
                p.get(Param::T1),
                p.get(Param::T2),
            ),
            Model::Transfer(_) => transfer(&self.scenario(p).expect("transfer model")),
        }
    }

    /// True when the model's inputs are separable, so its outputs must be too.
    pub fn separable_inputs(self) -> bool {
        !matches!(self, Model::Transfer(AncillaKind::Epr))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Discord,
    MutualInformation,
    ClassicalCorrelation,
    NuMinus,
    PptWitness,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::Discord,
        Output::MutualInformation,
        Output::ClassicalCorrelation,
        Output::NuMinus,
        Output::PptWitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Discord => "discord",
            Output::MutualInformation => "mutual_information",
            Output::ClassicalCorrelation => "classical_correlation",
            Output::NuMinus => "nu_minus",
            Output::PptWitness => "ppt_witness",
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Output::ALL
            .into_iter()
            .find(|o| o.name() == key)
            .ok_or_else(|| invalid(format!("unknown output '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

impl Axis {
    pub fn new(param: Param, lo: f64, hi: f64, n_points: usize) -> Self {
        Self {
            param,
            lo,
            hi,
            n_points,
        }
    }

    /// Grid points; the last one is exactly `hi`.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `name=lo:hi:n`, e.g. `va=0:100:401`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("axis '{s}' is not of the form name=lo:hi:n"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(Axis::new(name.parse()?, lo, hi, n))
    }
}

/// Complete description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: Model,
    /// Values of the parameters that are not swept.
    pub base: ParamSet,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Output>,
    /// Re-optimize the gain over this range at every grid point; the `g`
    /// column then reports the optimum.
    pub optimize_gain: Option<(f64, f64)>,
}

impl SweepSpec {
    pub fn new(model: Model, base: ParamSet, axes: Vec<Axis>) -> Self {
        Self {
            model,
            base,
            axes,
            outputs: Output::ALL.to_vec(),
            optimize_gain: None,
        }
    }

    pub fn with_optimized_gain(mut self, range: (f64, f64)) -> Self {
        self.optimize_gain = Some(range);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(invalid("a sweep needs one or two swept parameters"));
        }
        for (k, ax) in self.axes.iter().enumerate() {
            if !self.model.params().contains(&ax.param) {
                return Err(invalid(format!(
                    "parameter {} does not apply to {:?}",
                    ax.param, self.model
                )));
            }
            if ax.n_points < 2 {
                return Err(invalid(format!("axis {} needs at least 2 points", ax.param)));
            }
            if !ax.lo.is_finite() || !ax.hi.is_finite() {
                return Err(invalid(format!("axis {} has a non-finite range", ax.param)));
            }
            if self.axes[..k].iter().any(|o| o.param == ax.param) {
                return Err(invalid(format!("parameter {} swept twice", ax.param)));
            }
        }
        if self.outputs.is_empty() {
            return Err(invalid("a sweep needs at least one output column"));
        }
        if self.optimize_gain.is_some() {
            if !matches!(self.model, Model::Transfer(_)) {
                return Err(invalid("gain optimization only applies to transfer sweeps"));
            }
            if self.axes.iter().any(|a| a.param == Param::G) {
                return Err(invalid("cannot both sweep and optimize the gain"));
            }
        }
        Ok(())
    }

    /// Swept parameters first (axis order), then the model's fixed parameters,
    /// then the outputs.
    pub fn columns(&self) -> Vec<String> {
        self.param_columns()
            .iter()
            .map(|p| p.name().to_string())
            .chain(self.outputs.iter().map(|o| o.name().to_string()))
            .collect()
    }

    pub fn param_columns(&self) -> Vec<Param> {
        let swept: Vec<Param> = self.axes.iter().map(|a| a.param).collect();
        swept
            .iter()
            .copied()
            .chain(self.model.params().iter().copied().filter(|p| !swept.contains(p)))
            .collect()
    }

    /// Parameter sets for every row, in output order.
    pub fn grid(&self) -> Vec<ParamSet> {
        let mut rows = vec![self.base];
        for ax in &self.axes {
            let pts = ax.points();
            rows = rows
                .iter()
                .flat_map(|row| pts.iter().map(move |&v| row.with(ax.param, v)))
                .collect();
        }
        rows
    }
}

/// All quantities reported for one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub params: ParamSet,
    pub state: TwoModeCovariance,
    pub discord: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub nu_minus: f64,
    pub ppt_witness: f64,
}

impl PointResult {
    pub fn output(&self, o: Output) -> f64 {
        match o {
            Output::Discord => self.discord,
            Output::MutualInformation => self.mutual_information,
            Output::ClassicalCorrelation => self.classical_correlation,
            Output::NuMinus => self.nu_minus,
            Output::PptWitness => self.ppt_witness,
        }
    }
}

pub fn evaluate_point(model: Model, params: &ParamSet) -> Result<PointResult> {
    let state = model.state(params)?;
    let d = gaussian_discord(&state)?;
    Ok(PointResult {
        params: *params,
        state,
        discord: d.discord,
        mutual_information: d.mutual_information,
        classical_correlation: d.classical_correlation,
        nu_minus: d.nu_minus,
        ppt_witness: ppt_min_eigenvalue(&state)?,
    })
}

fn evaluate_row(spec: &SweepSpec, params: &ParamSet) -> Result<PointResult> {
    match (spec.optimize_gain, spec.model.scenario(params)) {
        (Some(range), Some(template)) => {
            let opts = SearchOptions {
                execution: Execution::Sequential,
                ..SearchOptions::default()
            };
            let best = optimal_gain(&template, range, &opts)?;
            evaluate_point(spec.model, &params.with(Param::G, best.location[0]))
        }
        _ => evaluate_point(spec.model, params),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Evaluates every grid point; returns the points in row order.
pub fn run_points(spec: &SweepSpec, execution: Execution) -> Result<Vec<PointResult>> {
    spec.validate()?;
    let grid = spec.grid();
    execution
        .map(&grid, |p| evaluate_row(spec, p))
        .into_iter()
        .collect()
}

pub fn run_sweep(spec: &SweepSpec, execution: Execution) -> Result<SweepTable> {
    let points = run_points(spec, execution)?;
    let params = spec.param_columns();
    let rows = points
        .iter()
        .map(|pt| {
            params
                .iter()
                .map(|&p| pt.params.get(p))
                .chain(spec.outputs.iter().map(|&o| pt.output(o)))
                .collect()
        })
        .collect();
    Ok(SweepTable {
        columns: spec.columns(),
        rows,
    })
}

/// `x` with 12 significant digits, in the shortest of fixed or scientific
/// notation (like C's `%.12g`).
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
