//! Covariance-matrix representation of multimode Gaussian states and the
//! linear quadrature maps used to simulate the transfer protocol.
//!
//! Conventions used throughout the crate:
//!
//! * quadrature ordering `(X1, Y1, X2, Y2, ...)`;
//! * shot-noise units, a vacuum quadrature has variance 1;
//! * means are not tracked, only second moments.

use nalgebra::{Complex, DMatrix, Matrix2, Matrix4, SymmetricEigen};

use crate::discord;
use crate::error::{domain, invalid, Result};

/// Tolerance below 1 that a symplectic eigenvalue may reach before a state
/// counts as unphysical.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Relative tolerance for symmetry checks on user supplied covariances.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    Y,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::Y => 1,
        }
    }
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, x| m.max(x.abs()))
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(invalid("covariance contains non-finite entries"));
    }
    let scale = max_abs(m.iter().copied()).max(1.0);
    let asym = asymmetry(m);
    if asym > SYMMETRY_TOL * scale {
        return Err(invalid(format!(
            "covariance is not symmetric (max |m_ij - m_ji| = {asym:e})"
        )));
    }
    Ok(())
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn det2(m: &Matrix2<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Two-mode covariance `σ = [[A, C], [Cᵀ, B]]`, mode A first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    sigma: Matrix4<f64>,
}

impl TwoModeCovariance {
    /// Assembles `σ` from its blocks. `A` and `B` must be symmetric.
    pub fn from_blocks(a: Matrix2<f64>, b: Matrix2<f64>, c: Matrix2<f64>) -> Result<Self> {
        let mut sigma = Matrix4::zeros();
        sigma.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        sigma.fixed_view_mut::<2, 2>(2, 2).copy_from(&b);
        sigma.fixed_view_mut::<2, 2>(0, 2).copy_from(&c);
        sigma.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
        Self::from_matrix(sigma)
    }

    /// Standard-form state with diagonal blocks
    /// `A = diag(a)`, `B = diag(b)`, `C = diag(c)`.
    pub fn diagonal(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Self {
        let mut sigma = Matrix4::zeros();
        sigma[(0, 0)] = a.0;
        sigma[(1, 1)] = a.1;
        sigma[(2, 2)] = b.0;
        sigma[(3, 3)] = b.1;
        sigma[(0, 2)] = c.0;
        sigma[(2, 0)] = c.0;
        sigma[(1, 3)] = c.1;
        sigma[(3, 1)] = c.1;
        Self { sigma }
    }

    pub fn from_matrix(sigma: Matrix4<f64>) -> Result<Self> {
        check_symmetric(&DMatrix::from_iterator(4, 4, sigma.iter().copied()))?;
        Ok(Self { sigma })
    }

    /// Row-major entries, as read from a covariance file.
    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::from_matrix(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    /// Two uncorrelated vacua.
    pub fn identity() -> Self {
        Self {
            sigma: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.sigma
    }

    pub fn a(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn b(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn c(&self) -> Matrix2<f64> {
        self.sigma.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Exchanges the roles of the two modes. Discord is asymmetric, so this is
    /// how a caller measures mode A instead of mode B.
    pub fn swapped(&self) -> Self {
        let p = Matrix4::new(
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0,
        );
        Self {
            sigma: p * self.sigma * p,
        }
    }

    /// Partial transposition with respect to mode B (`Y_B → −Y_B`).
    pub fn partial_transpose(&self) -> Self {
        let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
        Self {
            sigma: p * self.sigma * p,
        }
    }

    /// True when the cross block vanishes identically.
    pub fn is_product(&self) -> bool {
        self.c().iter().all(|&x| x == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs((self.sigma - other.sigma).iter().copied())
    }

    /// `det A`, `det B`, `det C`, `det σ`.
    pub(crate) fn block_determinants(&self) -> (f64, f64, f64, f64) {
        let (a, b, c) = (self.a(), self.b(), self.c());
        (det2(&a), det2(&b), det2(&c), det4(&self.sigma))
    }

    /// `Δ² − 4 det σ`, evaluated through the local-symplectic invariant
    /// `(I₁ − I₂)² + 4 det(I₁ C + A adj(C)ᵀ B) / I₁`. The naive difference loses
    /// all significant digits near degenerate spectra (symmetric discordant
    /// states, pure states); this form vanishes there up to second-order
    /// rounding.
    pub(crate) fn spectral_discriminant(&self) -> f64 {
        let (a, b, c) = (self.a(), self.b(), self.c());
        let (i1, i2, i3, i4) = self.block_determinants();
        if i1 <= 0.0 {
            let delta = i1 + i2 + 2.0 * i3;
            return delta * delta - 4.0 * i4;
        }
        let adj_c_t = Matrix2::new(c[(1, 1)], -c[(1, 0)], -c[(0, 1)], c[(0, 0)]);
        let k = c * i1 + a * adj_c_t * b;
        (i1 - i2).powi(2) + 4.0 * det2(&k) / i1
    }
}

/// Laplace expansion along the first two rows; exact for small-integer
/// entries, which keeps the degenerate families exact.
fn det4(m: &Matrix4<f64>) -> f64 {
    let minor_top = |i: usize, j: usize| m[(0, i)] * m[(1, j)] - m[(0, j)] * m[(1, i)];
    let minor_bot = |i: usize, j: usize| m[(2, i)] * m[(3, j)] - m[(2, j)] * m[(3, i)];
    minor_top(0, 1) * minor_bot(2, 3) - minor_top(0, 2) * minor_bot(1, 3)
        + minor_top(0, 3) * minor_bot(1, 2)
        + minor_top(1, 2) * minor_bot(0, 3)
        - minor_top(1, 3) * minor_bot(0, 2)
        + minor_top(2, 3) * minor_bot(0, 1)
}

/// Covariance of an n-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeGaussianState {
    cov: DMatrix<f64>,
}

impl MultimodeGaussianState {
    /// Validates shape, symmetry and physicality.
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || cov.nrows() == 0 || cov.nrows() % 2 != 0 {
            return Err(invalid(format!(
                "covariance must be 2n x 2n with n >= 1, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        check_symmetric(&cov)?;
        let nu = min_of(&symplectic_spectrum(&cov)?);
        if nu < 1.0 - PHYSICAL_TOL {
            return Err(domain(format!(
                "unphysical covariance: minimum symplectic eigenvalue {nu} < 1"
            )));
        }
        Ok(Self { cov })
    }

    pub fn from_two_mode(sigma: &TwoModeCovariance) -> Self {
        Self {
            cov: DMatrix::from_iterator(4, 4, sigma.matrix().iter().copied()),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Block-diagonal combination `self ⊕ other`; the modes of `other` follow.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(n + m, n + m);
        cov.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        cov.view_mut((n, n), (m, m)).copy_from(&other.cov);
        Self { cov }
    }

    /// Reduced state on `modes`, in the given order.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(invalid("reduce needs at least one mode"));
        }
        let n = self.n_modes();
        for (k, &m) in modes.iter().enumerate() {
            if m >= n {
                return Err(invalid(format!("mode {m} out of range for {n}-mode state")));
            }
            if modes[..k].contains(&m) {
                return Err(invalid(format!("mode {m} listed twice")));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(Self { cov })
    }

    /// All n symplectic eigenvalues in ascending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_spectrum(&self.cov)
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        Ok(min_of(&self.symplectic_eigenvalues()?))
    }

    pub fn is_physical(&self) -> bool {
        self.min_symplectic_eigenvalue()
            .map(|nu| nu >= 1.0 - PHYSICAL_TOL)
            .unwrap_or(false)
    }
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Standard symplectic form `Ω = ⊕ [[0, 1], [−1, 0]]` on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues as the moduli of the eigenvalues of `iΩσ`.
///
/// `iΩσ` is similar to the Hermitian matrix `i σ^{1/2} Ω σ^{1/2}`, which is
/// diagonalized instead; its eigenvalues come in pairs `±ν_k`. This route is
/// independent of the two-mode closed form and works for any number of modes.
/// Fails when `σ` is not positive definite.
pub fn symplectic_spectrum(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n2 = cov.nrows();
    if n2 == 0 || n2 % 2 != 0 || cov.ncols() != n2 {
        return Err(invalid("covariance must be a 2n x 2n matrix"));
    }
    let eig = SymmetricEigen::new(cov.clone());
    if let Some(&lmin) = eig.eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if lmin.is_nan() || lmin <= 0.0 {
            return Err(domain(format!(
                "covariance is not positive definite (smallest eigenvalue {lmin:e})"
            )));
        }
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let anti = &root * symplectic_form(n2 / 2) * &root;
    let herm = anti.map(|x| Complex::new(0.0, x));
    let mut moduli: Vec<f64> = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .collect();
    moduli.sort_by(f64::total_cmp);
    Ok(moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Real linear map on stacked quadratures, `2m × 2n` for n input and m output
/// modes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureLinearMap {
    matrix: DMatrix<f64>,
}

impl QuadratureLinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() % 2 != 0 || matrix.ncols() % 2 != 0 {
            return Err(invalid(format!(
                "quadrature map must be 2m x 2n, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn input_modes(&self) -> usize {
        self.matrix.ncols() / 2
    }

    pub fn output_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// The map that applies `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if next.input_modes() != self.output_modes() {
            return Err(invalid(format!(
                "cannot compose: {} output modes feed a map expecting {}",
                self.output_modes(),
                next.input_modes()
            )));
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
        })
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.matrix.is_square() && {
            let n = self.matrix.nrows();
            let d = self.matrix.transpose() * &self.matrix - DMatrix::identity(n, n);
            max_abs(d.iter().copied()) <= tol
        }
    }

    /// `Mᵀ Ω M = Ω`.
    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.matrix.is_square() && {
            let omega = symplectic_form(self.input_modes());
            let d = self.matrix.transpose() * &omega * &self.matrix - omega;
            max_abs(d.iter().copied()) <= tol
        }
    }
}

pub fn vacuum_state(n_modes: usize) -> Result<MultimodeGaussianState> {
    if n_modes == 0 {
        return Err(invalid("vacuum_state needs at least one mode"));
    }
    Ok(MultimodeGaussianState {
        cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
    })
}

/// Beam splitter with intensity transmission `t` between `mode_i` and `mode_j`:
///
/// ```text
/// X_i' = √t X_i + √(1−t) X_j
/// X_j' = √t X_j − √(1−t) X_i
/// ```
///
/// and identically for `Y`. Orthogonal and symplectic.
pub fn beam_splitter_map(
    t: f64,
    mode_i: usize,
    mode_j: usize,
    n_modes: usize,
) -> Result<QuadratureLinearMap> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!("beam splitter transmission {t} outside [0, 1]")));
    }
    if mode_i == mode_j {
        return Err(invalid("beam splitter needs two distinct modes"));
    }
    if mode_i >= n_modes || mode_j >= n_modes {
        return Err(invalid(format!(
            "beam splitter modes ({mode_i}, {mode_j}) out of range for {n_modes} modes"
        )));
    }
    let (ct, st) = (t.sqrt(), (1.0 - t).sqrt());
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for q in 0..2 {
        let (i, j) = (2 * mode_i + q, 2 * mode_j + q);
        m[(i, i)] = ct;
        m[(i, j)] = st;
        m[(j, j)] = ct;
        m[(j, i)] = -st;
    }
    QuadratureLinearMap::new(m)
}

/// Congruence `σ' = M σ Mᵀ`. The output is symmetrized exactly; physicality
/// is only guaranteed for physical channels (symplectic maps, loss,
/// feedforward) and is not re-checked here.
pub fn apply_map(
    state: &MultimodeGaussianState,
    map: &QuadratureLinearMap,
) -> Result<MultimodeGaussianState> {
    if map.input_modes() != state.n_modes() {
        return Err(invalid(format!(
            "map expects {} input modes, state has {}",
            map.input_modes(),
            state.n_modes()
        )));
    }
    let mut cov = &map.matrix * &state.cov * map.matrix.transpose();
    symmetrize(&mut cov);
    Ok(MultimodeGaussianState { cov })
}

/// Pure loss of transmission `eta` on `mode`: the mode is mixed with a fresh
/// vacuum on a beam splitter and the vacuum port is discarded. The resulting
/// covariance update is `v → η v + (1 − η)` on the mode's own entries and a
/// `√η` scaling of its correlations.
pub fn loss_channel(
    state: &MultimodeGaussianState,
    mode: usize,
    eta: f64,
) -> Result<MultimodeGaussianState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("loss transmission {eta} outside [0, 1]")));
    }
    let n = state.n_modes();
    if mode >= n {
        return Err(invalid(format!("mode {mode} out of range for {n}-mode state")));
    }
    let widened = state.direct_sum(&vacuum_state(1)?);
    let mixed = apply_map(&widened, &beam_splitter_map(eta, mode, n, n + 1)?)?;
    let keep: Vec<usize> = (0..n).collect();
    mixed.reduce(&keep)
}

/// One homodyne photocurrent feeding the displacement of a target mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub mode: usize,
    pub quadrature: Quadrature,
    /// Usually ±1.
    pub sign: f64,
}

impl Measured {
    pub fn new(mode: usize, quadrature: Quadrature, sign: f64) -> Self {
        Self {
            mode,
            quadrature,
            sign,
        }
    }
}

/// Displacement of `target_mode` by measured photocurrents:
///
/// ```text
/// X_target' = X_target + gain · Σ sign_k X_k   (terms with quadrature X)
/// Y_target' = Y_target + gain · Σ sign_k Y_k   (terms with quadrature Y)
/// ```
///
/// The conjugate quadrature of each measured mode picks up the matching
/// back-action (`Y_k' = Y_k − gain·sign_k·Y_target` for an X term, and
/// `X_k' = X_k − gain·sign_k·X_target` for a Y term), which makes the map
/// symplectic. A homodyne measurement destroys the conjugate quadrature, so
/// the back-action never reaches the unmeasured modes: the reduced state of
/// every other mode is exactly that of measure-and-displace. A mode may be
/// measured in one quadrature only.
pub fn feedforward_map(
    measured: &[Measured],
    target_mode: usize,
    gain: f64,
    n_modes: usize,
) -> Result<QuadratureLinearMap> {
    if !gain.is_finite() {
        return Err(invalid("feedforward gain must be finite"));
    }
    if target_mode >= n_modes {
        return Err(invalid(format!(
            "target mode {target_mode} out of range for {n_modes} modes"
        )));
    }
    for m in measured {
        if m.mode >= n_modes {
            return Err(invalid(format!(
                "measured mode {} out of range for {n_modes} modes",
                m.mode
            )));
        }
        if m.mode == target_mode {
            return Err(invalid(format!(
                "target mode {target_mode} cannot also be measured"
            )));
        }
        if !m.sign.is_finite() {
            return Err(invalid("feedforward sign must be finite"));
        }
        if measured
            .iter()
            .any(|o| o.mode == m.mode && o.quadrature != m.quadrature)
        {
            return Err(invalid(format!(
                "mode {} measured in both quadratures",
                m.mode
            )));
        }
    }

    let dim = 2 * n_modes;
    let (tx, ty) = (2 * target_mode, 2 * target_mode + 1);
    let mut x_stage = DMatrix::<f64>::identity(dim, dim);
    let mut y_stage = DMatrix::<f64>::identity(dim, dim);
    for m in measured {
        let w = gain * m.sign;
        let (kx, ky) = (2 * m.mode, 2 * m.mode + 1);
        match m.quadrature {
            Quadrature::X => {
                x_stage[(tx, kx)] += w;
                x_stage[(ky, ty)] -= w;
            }
            Quadrature::Y => {
                y_stage[(ty, ky)] += w;
                y_stage[(kx, tx)] -= w;
            }
        }
    }
    QuadratureLinearMap::new(y_stage * x_stage)
}

/// Reduced covariance of `(mode_i, mode_j)` in `(X_i, Y_i, X_j, Y_j)` order.
pub fn extract_two_mode(
    state: &MultimodeGaussianState,
    mode_i: usize,
    mode_j: usize,
) -> Result<TwoModeCovariance> {
    if mode_i == mode_j {
        return Err(invalid("extract_two_mode needs two distinct modes"));
    }
    let reduced = state.reduce(&[mode_i, mode_j])?;
    Ok(TwoModeCovariance {
        sigma: Matrix4::from_iterator(reduced.cov.iter().copied()),
    })
}

/// `ν₋` from the two-mode closed form.
pub fn min_symplectic_eigenvalue(sigma: &TwoModeCovariance) -> Result<f64> {
    let inv = discord::symplectic_invariants(sigma);
    Ok(discord::symplectic_eigenvalues(&inv)?.0)
}

/// Quadrature index of `(mode, q)` in the stacked vector.
pub fn quadrature_index(mode: usize, q: Quadrature) -> usize {
    2 * mode + q.offset()
}
