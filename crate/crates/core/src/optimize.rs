//! Deterministic maximizers for cheap, smooth objectives of one or two
//! parameters: a coarse grid scan (evaluated in parallel) brackets the best
//! point, then golden-section refinement takes over.

use crate::discord::gaussian_discord;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::protocol::{make_asymmetric_discordant, transfer, Ancilla, Efficiencies, TransferScenario};

pub const GAIN_RANGE: (f64, f64) = (0.0, 1.5);
pub const SQUEEZE_RANGE: (f64, f64) = (0.0, 2.0);
pub const ANCILLA_NOISE_RANGE: (f64, f64) = (0.0, 100.0);
pub const ATTENUATION_RANGE: (f64, f64) = (0.0, 1.0);
pub const DEFAULT_TOL: f64 = 1e-5;

pub const MIN_GRID_1D: usize = 201;
pub const MIN_GRID_2D: usize = 101;

/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub location: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Points per axis of the coarse scan; raised to the minimum if smaller.
    pub grid_points: usize,
    pub tol: f64,
    /// Cap on alternating coordinate sweeps in two dimensions.
    pub max_sweeps: usize,
    pub execution: Execution,
}

impl SearchOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_points: MIN_GRID_1D,
            tol: DEFAULT_TOL,
            max_sweeps: 1000,
            execution: Execution::default(),
        }
    }
}

fn evaluation_error(at: Vec<f64>, reason: impl Into<String>) -> Error {
    Error::Evaluation {
        at,
        reason: reason.into(),
    }
}

fn checked(at: &[f64], r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(evaluation_error(at.to_vec(), format!("non-finite value {v}"))),
        Err(Error::Evaluation { at, reason }) => Err(Error::Evaluation { at, reason }),
        Err(e) => Err(evaluation_error(at.to_vec(), e.to_string())),
    }
}

fn check_interval(name: &str, lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(invalid(format!("{name}: need finite lo < hi, got [{lo}, {hi}]")))
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Best point found by golden-section search on `[a, b]`, together with the
/// number of evaluations. Stops once the bracket is narrower than `tol`.
fn golden_section<F>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64, usize, bool)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evals = 2;
    let mut best = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    while b - a >= tol && evals < 500 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
        evals += 1;
    }
    Ok((best.0, best.1, evals, b - a < tol))
}

pub fn maximize_scalar<F>(objective: F, lo: f64, hi: f64, tol: f64) -> Result<Optimum>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    maximize_scalar_with(objective, lo, hi, &SearchOptions::with_tol(tol))
}

pub fn maximize_scalar_with<F>(objective: F, lo: f64, hi: f64, opts: &SearchOptions) -> Result<Optimum>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    check_interval("maximize_scalar", lo, hi)?;
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let eval = |x: f64| checked(&[x], objective(x));
    let xs = grid(lo, hi, opts.grid_points.max(MIN_GRID_1D));
    let values = opts
        .execution
        .map(&xs, |&x| eval(x))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let k = argmax(&values);
    let (a, b) = (xs[k.saturating_sub(1)], xs[(k + 1).min(xs.len() - 1)]);
    let (x, v, n, converged) = golden_section(&eval, a, b, opts.tol)?;
    let (location, value) = if v > values[k] { (x, v) } else { (xs[k], values[k]) };
    Ok(Optimum {
        location: vec![location],
        value,
        evaluations: xs.len() + n,
        converged,
    })
}

pub fn maximize_2d<F>(objective: F, x_range: (f64, f64), y_range: (f64, f64), tol: f64) -> Result<Optimum>
where
    F: Fn(f64, f64) -> Result<f64> + Sync + Send,
{
    maximize_2d_with(
        objective,
        x_range,
        y_range,
        &SearchOptions {
            grid_points: MIN_GRID_2D,
            ..SearchOptions::with_tol(tol)
        },
    )
}

/// Coarse 2-D scan followed by alternating golden-section line searches, each
/// confined to one coarse cell on either side of the current point. Only
/// improving moves are accepted; the search stops once a full sweep moves both
/// coordinates by less than `tol`.
pub fn maximize_2d_with<F>(
    objective: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    opts: &SearchOptions,
) -> Result<Optimum>
where
    F: Fn(f64, f64) -> Result<f64> + Sync + Send,
{
    check_interval("maximize_2d x", x_range.0, x_range.1)?;
    check_interval("maximize_2d y", y_range.0, y_range.1)?;
    if !(opts.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let eval = |x: f64, y: f64| checked(&[x, y], objective(x, y));
    let n = opts.grid_points.max(MIN_GRID_2D);
    let xs = grid(x_range.0, x_range.1, n);
    let ys = grid(y_range.0, y_range.1, n);
    let values = opts
        .execution
        .map_range(n * n, |k| eval(xs[k / n], ys[k % n]))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let k = argmax(&values);
    let (mut x, mut y, mut best) = (xs[k / n], ys[k % n], values[k]);
    let (hx, hy) = (xs[1] - xs[0], ys[1] - ys[0]);
    let line_tol = opts.tol * 0.1;
    let mut evaluations = n * n;
    let mut converged = false;

    for _ in 0..opts.max_sweeps {
        let (x0, y0) = (x, y);
        let (a, b) = ((x - hx).max(x_range.0), (x + hx).min(x_range.1));
        let (nx, v, e, _) = golden_section(&|t| eval(t, y), a, b, line_tol)?;
        evaluations += e;
        if v > best {
            x = nx;
            best = v;
        }
        let (a, b) = ((y - hy).max(y_range.0), (y + hy).min(y_range.1));
        let (ny, v, e, _) = golden_section(&|t| eval(x, t), a, b, line_tol)?;
        evaluations += e;
        if v > best {
            y = ny;
            best = v;
        }
        if (x - x0).abs() < opts.tol && (y - y0).abs() < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(Optimum {
        location: vec![x, y],
        value: best,
        evaluations,
        converged,
    })
}

fn scenario_discord(s: &TransferScenario) -> Result<f64> {
    Ok(gaussian_discord(&transfer(s)?)?.discord)
}

/// Best common gain for an otherwise fixed scenario.
pub fn optimal_gain(
    template: &TransferScenario,
    g_range: (f64, f64),
    opts: &SearchOptions,
) -> Result<Optimum> {
    template.validate()?;
    maximize_scalar_with(
        |g| scenario_discord(&template.with_gain(g)),
        g_range.0,
        g_range.1,
        opts,
    )
}

/// Joint optimum over `(g, r)` with an EPR ancilla; location is `[g, r]`.
pub fn optimal_gain_and_squeezing(
    v_a: f64,
    efficiencies: Efficiencies,
    g_range: (f64, f64),
    r_range: (f64, f64),
    opts: &SearchOptions,
) -> Result<Optimum> {
    let template = TransferScenario::lossless(v_a, Ancilla::Epr { r: 0.0 }, 0.0)
        .with_efficiencies(efficiencies);
    template.validate()?;
    maximize_2d_with(
        |g, r| {
            scenario_discord(&TransferScenario {
                ancilla: Ancilla::Epr { r },
                gain: g,
                ..template
            })
        },
        g_range,
        r_range,
        opts,
    )
}

/// Joint optimum over `(g, V_B)` with a discordant ancilla; location is
/// `[g, v_b]`.
pub fn optimal_gain_and_ancilla_noise(
    v_a: f64,
    efficiencies: Efficiencies,
    g_range: (f64, f64),
    vb_range: (f64, f64),
    opts: &SearchOptions,
) -> Result<Optimum> {
    let template = TransferScenario::lossless(v_a, Ancilla::Discordant { v_b: 0.0 }, 0.0)
        .with_efficiencies(efficiencies);
    template.validate()?;
    maximize_2d_with(
        |g, v_b| {
            scenario_discord(&TransferScenario {
                ancilla: Ancilla::Discordant { v_b },
                gain: g,
                ..template
            })
        },
        g_range,
        vb_range,
        opts,
    )
}

/// Attenuation `t` of the discording signal on mode B that maximizes the
/// discord of the asymmetric discordant state.
pub fn optimal_attenuation(v: f64, t_range: (f64, f64)) -> Result<Optimum> {
    optimal_attenuation_with(v, t_range, &SearchOptions::default())
}

pub fn optimal_attenuation_with(v: f64, t_range: (f64, f64), opts: &SearchOptions) -> Result<Optimum> {
    make_asymmetric_discordant(v, 1.0)?;
    maximize_scalar_with(
        |t| Ok(gaussian_discord(&make_asymmetric_discordant(v, t)?)?.discord),
        t_range.0,
        t_range.1,
        opts,
    )
}
