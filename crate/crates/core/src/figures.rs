//! Sweep definitions that regenerate each published figure, one sweep per
//! curve or surface, with the caption parameters baked in.
//!
//! Where a caption leaves a choice open: the lossy curves of figure 2 apply
//! `eta = 0.9` to all four detected modes and re-optimize the gain at every
//! abscissa, and the `V_B = 20` optimal-gain curve of figure 2(a) uses the gain
//! that is optimal at `V_A = 50` (0.877, quoted as 0.88).

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::optimize::{optimal_gain, SearchOptions, GAIN_RANGE, SQUEEZE_RANGE};
use crate::protocol::{Ancilla, TransferScenario};
use crate::sweep::{AncillaKind, Axis, Model, Param, ParamSet, SweepSpec};

pub const CURVE_POINTS: usize = 401;
pub const SURFACE_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
    Fig6,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig6 => "fig6",
        }
    }

    pub fn valid_names() -> String {
        Figure::ALL.map(Figure::name).join(", ")
    }

    /// The figure's curves (or surfaces), each with its file stem.
    pub fn curves(self) -> Result<Vec<Curve>> {
        let base = ParamSet::default();
        let va_axis = vec![Axis::new(Param::VA, 0.0, 100.0, CURVE_POINTS)];
        let g_axis = vec![Axis::new(Param::G, GAIN_RANGE.0, GAIN_RANGE.1, CURVE_POINTS)];
        let disc = Model::Transfer(AncillaKind::Discordant);
        let epr = Model::Transfer(AncillaKind::Epr);
        let initial = Curve::new(self, "initial", SweepSpec::new(Model::Symmetric, base, va_axis.clone()));

        Ok(match self {
            Figure::Fig2a => {
                let g_blue = optimal_gain(
                    &TransferScenario::lossless(50.0, Ancilla::Discordant { v_b: 20.0 }, 1.0),
                    GAIN_RANGE,
                    &SearchOptions::default(),
                )?
                .location[0];
                let out = |vb: f64, g: f64| SweepSpec::new(disc, base.with(Param::VB, vb).with(Param::G, g), va_axis.clone());
                vec![
                    initial,
                    Curve::new(self, "red_vb20_g1", out(20.0, 1.0)),
                    Curve::new(self, "blue_vb20_gopt_va50", out(20.0, g_blue)),
                    Curve::new(self, "green_vb0_g0.26", out(0.0, 0.26)),
                    Curve::new(
                        self,
                        "purple_vb0_eta0.9_gopt",
                        SweepSpec::new(disc, base.with(Param::VB, 0.0).with(Param::Eta, 0.9), va_axis.clone())
                            .with_optimized_gain(GAIN_RANGE),
                    ),
                ]
            }
            Figure::Fig2b => {
                let out = |r: f64, g: f64| SweepSpec::new(epr, base.with(Param::R, r).with(Param::G, g), va_axis.clone());
                vec![
                    initial,
                    Curve::new(self, "red_r0.46_g1", out(0.46, 1.0)),
                    Curve::new(self, "blue_r1.15_g1", out(1.15, 1.0)),
                    Curve::new(self, "green_r0.33_g0.32", out(0.33, 0.32)),
                    Curve::new(
                        self,
                        "purple_r0.33_eta0.9_gopt",
                        SweepSpec::new(epr, base.with(Param::R, 0.33).with(Param::Eta, 0.9), va_axis.clone())
                            .with_optimized_gain(GAIN_RANGE),
                    ),
                ]
            }
            Figure::Fig3a => vec![Curve::new(
                self,
                "surface_va50",
                SweepSpec::new(
                    disc,
                    base,
                    vec![
                        Axis::new(Param::VB, 0.0, 100.0, SURFACE_POINTS),
                        Axis::new(Param::G, GAIN_RANGE.0, GAIN_RANGE.1, SURFACE_POINTS),
                    ],
                ),
            )],
            Figure::Fig3b => vec![Curve::new(
                self,
                "surface_va50",
                SweepSpec::new(
                    epr,
                    base,
                    vec![
                        Axis::new(Param::R, SQUEEZE_RANGE.0, SQUEEZE_RANGE.1, SURFACE_POINTS),
                        Axis::new(Param::G, GAIN_RANGE.0, GAIN_RANGE.1, SURFACE_POINTS),
                    ],
                ),
            )],
            Figure::Fig4a => [0.0, 20.0, 50.0]
                .into_iter()
                .zip(["black", "red", "blue"])
                .map(|(vb, colour)| {
                    Curve::new(
                        self,
                        &format!("{colour}_vb{vb}"),
                        SweepSpec::new(disc, base.with(Param::VB, vb), g_axis.clone()),
                    )
                })
                .collect(),
            Figure::Fig4b => [0.0, 0.33, 1.15]
                .into_iter()
                .zip(["black", "red", "blue"])
                .map(|(r, colour)| {
                    Curve::new(
                        self,
                        &format!("{colour}_r{r}"),
                        SweepSpec::new(epr, base.with(Param::R, r), g_axis.clone()),
                    )
                })
                .collect(),
            Figure::Fig5a => vec![
                Curve::new(self, "black_t1", SweepSpec::new(Model::Asymmetric, base.with(Param::T, 1.0), va_axis.clone())),
                Curve::new(self, "red_t0.5", SweepSpec::new(Model::Asymmetric, base.with(Param::T, 0.5), va_axis.clone())),
            ],
            Figure::Fig5b => [(1.0, "black"), (50.0, "red")]
                .into_iter()
                .map(|(v, colour)| {
                    Curve::new(
                        self,
                        &format!("{colour}_v{v}"),
                        SweepSpec::new(
                            Model::Asymmetric,
                            base.with(Param::VA, v),
                            vec![Axis::new(Param::T, 0.0, 1.0, CURVE_POINTS)],
                        ),
                    )
                })
                .collect(),
            Figure::Fig6 => vec![Curve::new(
                self,
                "surface_v50",
                SweepSpec::new(
                    Model::Attenuated,
                    base,
                    vec![
                        Axis::new(Param::T1, 0.0, 1.0, SURFACE_POINTS),
                        Axis::new(Param::T2, 0.0, 1.0, SURFACE_POINTS),
                    ],
                ),
            )],
        })
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| invalid(format!("unknown figure '{s}'; valid names: {}", Figure::valid_names())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// File stem, e.g. `fig2a_green_vb0_g0.26`.
    pub stem: String,
    pub spec: SweepSpec,
}

impl Curve {
    fn new(fig: Figure, label: &str, spec: SweepSpec) -> Self {
        Self {
            stem: format!("{}_{label}", fig.name()),
            spec,
        }
    }
}
