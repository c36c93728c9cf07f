//! The forward problem: from Neumann boundary data to the interior matter
//! wave and its Dirichlet trace.
//!
//! Boundary data is a finitely supported set of modal amplitudes — Fourier
//! coefficients `g_n` on the circle, or coefficients `g_{nm}` against the
//! un-normalised real spherical basis `P_n^{|m|}(cos θ) e^{imφ}` on the
//! sphere. For each mode the radial problem is a 3×3 linear system (core
//! amplitude `u`, shell amplitudes `v` and `w` of the growing and decaying
//! solutions) whose closed-form solution runs through the shell reflection
//! coefficient `ρ` of [`crate::nd_map`]:
//!
//! * interface: `w = -ρ v`, and `u` follows from value continuity,
//! * outer Neumann condition: `v = g / (B'_I(1) - ρ B'_K(1))`,
//!
//! where `B_Z` is the dimension's radial profile (`Z_ν(r)` in 2-D,
//! `r^{-1/2} Z_ν(r)` in 3-D). The Dirichlet trace never needs the interior:
//! it is multiplication by the ND symbol, mode by mode, and the test suite
//! holds the two routes (series evaluation at the boundary vs. symbol
//! multiplication) to each other.
//!
//! Coefficients are stored raw, so configurations extreme enough that `u`,
//! `v`, or `w` leaves the `f64` range are reported as overflow errors
//! rather than silently returning saturated values; the ND symbols of such
//! configurations remain available through [`crate::nd_map`], which works
//! in ratios throughout.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nd_map::{Dimension, ShellConfig, SymbolEngine};
use crate::quadrature::gauss_legendre;
use crate::special_fn::{assoc_legendre, bessel_pair, Scaling};

/// Modal basis of a boundary function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryBasis {
    /// `e^{inφ}`, `n ∈ ℤ` (2-D).
    Fourier,
    /// Un-normalised `P_n^{|m|}(cos θ) e^{imφ}`, `|m| ≤ n` (3-D).
    SphericalHarmonic,
}

impl BoundaryBasis {
    fn for_dimension(dimension: Dimension) -> Self {
        match dimension {
            Dimension::Two => BoundaryBasis::Fourier,
            Dimension::Three => BoundaryBasis::SphericalHarmonic,
        }
    }
}

/// Index of one angular mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeIndex {
    /// Fourier index `n ∈ ℤ`.
    Fourier(i32),
    /// Spherical indices `(n, m)` with `|m| ≤ n`.
    Spherical { n: u32, m: i32 },
}

impl ModeIndex {
    /// The degree whose ND symbol this mode carries (`|n|` in 2-D, `n` in
    /// 3-D; the symbol is independent of `m`).
    pub fn degree(&self) -> u32 {
        match self {
            ModeIndex::Fourier(n) => n.unsigned_abs(),
            ModeIndex::Spherical { n, .. } => *n,
        }
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeIndex::Fourier(n) => write!(f, "n = {n}"),
            ModeIndex::Spherical { n, m } => write!(f, "(n, m) = ({n}, {m})"),
        }
    }
}

/// Finitely supported boundary data in the dimension's modal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    /// Spatial dimension the data lives in.
    pub dimension: Dimension,
    /// Basis the coefficients refer to (determined by the dimension).
    pub basis: BoundaryBasis,
    /// Modal amplitudes; absent modes are zero.
    pub modes: BTreeMap<ModeIndex, Complex64>,
}

impl BoundaryData {
    /// Empty data in the given dimension.
    pub fn new(dimension: Dimension) -> Self {
        BoundaryData {
            dimension,
            basis: BoundaryBasis::for_dimension(dimension),
            modes: BTreeMap::new(),
        }
    }

    /// Insert a Fourier amplitude (2-D only).
    pub fn insert_fourier(&mut self, n: i32, amplitude: Complex64) -> Result<()> {
        if self.dimension != Dimension::Two {
            return Err(Error::Domain(
                "BoundaryData: Fourier modes require dimension 2".into(),
            ));
        }
        self.modes.insert(ModeIndex::Fourier(n), amplitude);
        Ok(())
    }

    /// Insert a spherical amplitude (3-D only, `|m| ≤ n`).
    pub fn insert_spherical(&mut self, n: u32, m: i32, amplitude: Complex64) -> Result<()> {
        if self.dimension != Dimension::Three {
            return Err(Error::Domain(
                "BoundaryData: spherical modes require dimension 3".into(),
            ));
        }
        if m.unsigned_abs() > n {
            return Err(Error::Domain(format!(
                "BoundaryData: |m| ≤ n violated by (n, m) = ({n}, {m})"
            )));
        }
        self.modes.insert(ModeIndex::Spherical { n, m }, amplitude);
        Ok(())
    }

    /// Largest mode degree present (0 for empty data).
    pub fn max_degree(&self) -> u32 {
        self.modes.keys().map(ModeIndex::degree).max().unwrap_or(0)
    }

    /// Whether the coefficients are conjugate-symmetric, i.e. represent a
    /// real-valued boundary function: `c_{-n} = conj(c_n)` in 2-D and
    /// `c_{n,-m} = conj(c_{n,m})` in 3-D (the Legendre factor is shared by
    /// `±m`, so only the `e^{imφ}` factor needs pairing).
    pub fn is_real_valued(&self) -> bool {
        const TOL: f64 = 1e-14;
        self.modes.iter().all(|(&idx, &c)| {
            let partner = match idx {
                ModeIndex::Fourier(n) => ModeIndex::Fourier(-n),
                ModeIndex::Spherical { n, m } => ModeIndex::Spherical { n, m: -m },
            };
            let p = self.modes.get(&partner).copied().unwrap_or_default();
            (p - c.conj()).norm() <= TOL * c.norm().max(1.0)
        })
    }

    /// Serialize to the interchange JSON schema, e.g.
    /// `{"dimension":2,"basis":"fourier","modes":[{"n":1,"re":1.0,"im":0.0}]}`
    /// (3-D modes carry `"n"` and `"m"`).
    pub fn to_json(&self) -> String {
        let modes = self
            .modes
            .iter()
            .map(|(&idx, &c)| match idx {
                ModeIndex::Fourier(n) => ModeJson {
                    n: n as i64,
                    m: None,
                    re: c.re,
                    im: c.im,
                },
                ModeIndex::Spherical { n, m } => ModeJson {
                    n: n as i64,
                    m: Some(m as i64),
                    re: c.re,
                    im: c.im,
                },
            })
            .collect();
        let doc = BoundaryDataJson {
            dimension: self.dimension.count(),
            basis: match self.basis {
                BoundaryBasis::Fourier => "fourier".into(),
                BoundaryBasis::SphericalHarmonic => "spherical_harmonic".into(),
            },
            modes,
        };
        serde_json::to_string(&doc).expect("boundary data serializes")
    }

    /// Parse the interchange JSON schema, validating mode indices.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BoundaryDataJson = serde_json::from_str(text)?;
        let dimension = match doc.dimension {
            2 => Dimension::Two,
            3 => Dimension::Three,
            d => {
                return Err(Error::InvalidJson(format!(
                    "boundary data: dimension must be 2 or 3, got {d}"
                )))
            }
        };
        let basis = match doc.basis.as_str() {
            "fourier" => BoundaryBasis::Fourier,
            "spherical_harmonic" => BoundaryBasis::SphericalHarmonic,
            other => {
                return Err(Error::InvalidJson(format!(
                    "boundary data: unknown basis {other:?}"
                )))
            }
        };
        if basis != BoundaryBasis::for_dimension(dimension) {
            return Err(Error::InvalidJson(format!(
                "boundary data: basis {:?} does not match dimension {}",
                doc.basis, doc.dimension
            )));
        }
        let mut data = BoundaryData::new(dimension);
        for mode in &doc.modes {
            if !mode.re.is_finite() || !mode.im.is_finite() {
                return Err(Error::InvalidJson(format!(
                    "boundary data: non-finite amplitude at n = {}",
                    mode.n
                )));
            }
            let amplitude = Complex64::new(mode.re, mode.im);
            let idx = match dimension {
                Dimension::Two => {
                    if mode.m.is_some() {
                        return Err(Error::InvalidJson(
                            "boundary data: 2-D modes must not carry m".into(),
                        ));
                    }
                    let n = i32::try_from(mode.n).map_err(|_| {
                        Error::InvalidJson(format!("boundary data: mode index {} out of range", mode.n))
                    })?;
                    ModeIndex::Fourier(n)
                }
                Dimension::Three => {
                    let n = u32::try_from(mode.n).map_err(|_| {
                        Error::InvalidJson(format!(
                            "boundary data: 3-D degree must be non-negative, got {}",
                            mode.n
                        ))
                    })?;
                    let m = mode.m.ok_or_else(|| {
                        Error::InvalidJson("boundary data: 3-D modes must carry m".into())
                    })?;
                    let m = i32::try_from(m).map_err(|_| {
                        Error::InvalidJson(format!("boundary data: order {m} out of range"))
                    })?;
                    if m.unsigned_abs() > n {
                        return Err(Error::InvalidJson(format!(
                            "boundary data: |m| ≤ n violated by (n, m) = ({n}, {m})"
                        )));
                    }
                    ModeIndex::Spherical { n, m }
                }
            };
            if data.modes.insert(idx, amplitude).is_some() {
                return Err(Error::InvalidJson(format!(
                    "boundary data: duplicate mode {idx}"
                )));
            }
        }
        Ok(data)
    }
}

#[derive(Serialize, Deserialize)]
struct BoundaryDataJson {
    dimension: u32,
    basis: String,
    modes: Vec<ModeJson>,
}

#[derive(Serialize, Deserialize)]
struct ModeJson {
    n: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    re: f64,
    im: f64,
}

/// Radial amplitudes of one mode: core coefficient and the two shell
/// coefficients (regular `I` branch and decaying `K` branch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    /// Amplitude of the core solution `B_I(r/√σ1)`.
    pub u: Complex64,
    /// Amplitude of the shell solution `B_I(r)`.
    pub v: Complex64,
    /// Amplitude of the shell solution `B_K(r)`.
    pub w: Complex64,
}

/// Interior series coefficients of a solved forward problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveCoefficients {
    /// Configuration the coefficients were solved for.
    pub config: ShellConfig,
    /// Per-mode amplitudes; modes absent from the data are zero and omitted.
    pub modes: BTreeMap<ModeIndex, ModeCoefficients>,
}

/// One sample point: `(r, φ)` on the disk or `(r, θ, φ)` in the ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    /// Disk point, `r ∈ (0, 1]`, `φ ∈ [0, 2π)`.
    Disk { r: f64, phi: f64 },
    /// Ball point, `r ∈ (0, 1]`, `θ ∈ (0, π)`, `φ ∈ [0, 2π)`.
    Ball { r: f64, theta: f64, phi: f64 },
}

/// A list of sample points, all in the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    /// Dimension every point lives in.
    pub dimension: Dimension,
    /// The points.
    pub points: Vec<GridPoint>,
}

impl EvaluationGrid {
    /// Grid of disk points `(r, φ)`.
    pub fn disk(points: &[(f64, f64)]) -> Result<Self> {
        let points = points
            .iter()
            .map(|&(r, phi)| {
                check_radius(r)?;
                check_angle(phi, "φ", 2.0 * std::f64::consts::PI)?;
                Ok(GridPoint::Disk { r, phi })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvaluationGrid {
            dimension: Dimension::Two,
            points,
        })
    }

    /// Grid of ball points `(r, θ, φ)`.
    pub fn ball(points: &[(f64, f64, f64)]) -> Result<Self> {
        let points = points
            .iter()
            .map(|&(r, theta, phi)| {
                check_radius(r)?;
                if !(theta > 0.0 && theta < std::f64::consts::PI) {
                    return Err(Error::Domain(format!(
                        "EvaluationGrid: θ must lie in (0, π), got {theta}"
                    )));
                }
                check_angle(phi, "φ", 2.0 * std::f64::consts::PI)?;
                Ok(GridPoint::Ball { r, theta, phi })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvaluationGrid {
            dimension: Dimension::Three,
            points,
        })
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!(
            "EvaluationGrid: r must lie in (0, 1], got {r}"
        )));
    }
    Ok(())
}

fn check_angle(value: f64, name: &str, upper: f64) -> Result<()> {
    if !(value >= 0.0 && value < upper) {
        return Err(Error::Domain(format!(
            "EvaluationGrid: {name} must lie in [0, {upper:.5}), got {value}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Solving the per-mode linear systems
// ---------------------------------------------------------------------------

/// Radial profile value and derivative of a shell solution at `x`:
/// `(Z_ν(x), Z'_ν(x))` in 2-D, `(x^{-1/2} Z_ν, (x^{-1/2} Z_ν)')` in 3-D.
fn profile(dimension: Dimension, value: f64, deriv: f64, x: f64) -> (f64, f64) {
    match dimension {
        Dimension::Two => (value, deriv),
        Dimension::Three => {
            let s = x.sqrt().recip();
            (s * value, s * (deriv - value / (2.0 * x)))
        }
    }
}

/// Solve the per-mode transmission systems for all modes present in `g`.
///
/// Each mode's system — interface value continuity, weighted flux
/// continuity `σ1 ∂ψ⁻ = ∂ψ⁺`, and the outer Neumann condition — is solved
/// in closed form through the shell reflection coefficient: `w = -ρ v`,
/// `v = g / (B'_I(1) - ρ B'_K(1))`, and `u` from value continuity.
pub fn solve_coefficients(config: &ShellConfig, g: &BoundaryData) -> Result<WaveCoefficients> {
    if basis_dimension_mismatch(config, g) {
        return Err(Error::Domain(format!(
            "solve_coefficients: boundary data is {}-dimensional but the configuration is {}-dimensional",
            g.dimension, config.dimension
        )));
    }
    let engine = SymbolEngine::new(config, g.max_degree())?;
    let beta = 1.0 / config.sigma1.sqrt();
    let dim = config.dimension;

    let mut modes = BTreeMap::new();
    for (&idx, &amplitude) in &g.modes {
        let degree = idx.degree();
        let ord = dim.order(degree);
        let rho = engine.rho(degree)?.value;

        let outer = bessel_pair(ord, 1.0, Scaling::Unscaled)?;
        let shell = bessel_pair(ord, config.r1, Scaling::Unscaled)?;
        let core = bessel_pair(ord, beta * config.r1, Scaling::Unscaled)?;

        let (_, bi_d_one) = profile(dim, outer.i_val, outer.i_deriv, 1.0);
        let (_, bk_d_one) = profile(dim, outer.k_val, outer.k_deriv, 1.0);
        let denom = bi_d_one - rho * bk_d_one;
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return Err(Error::Degenerate(format!(
                "solve_coefficients: Neumann-resonant outer condition at mode {idx} \
                 (ρ B'_K(1) − B'_I(1) vanished numerically)"
            )));
        }

        let v = amplitude / denom;
        let w = -rho * v;
        // Value continuity: u B_c(r1) = v B_I(r1) + w B_K(r1); the 3-D
        // r^{-1/2} profile factor is common to all three and cancels.
        let u = (v * shell.i_val + w * shell.k_val) / core.i_val;
        for (label, c) in [("u", u), ("v", v), ("w", w)] {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Overflow(format!(
                    "solve_coefficients: coefficient {label} left the f64 range at mode {idx}; \
                     the configuration is representable only through nd_map symbols"
                )));
            }
        }
        modes.insert(idx, ModeCoefficients { u, v, w });
    }
    Ok(WaveCoefficients {
        config: *config,
        modes,
    })
}

fn basis_dimension_mismatch(config: &ShellConfig, g: &BoundaryData) -> bool {
    g.dimension != config.dimension || g.basis != BoundaryBasis::for_dimension(config.dimension)
}

// ---------------------------------------------------------------------------
// Series evaluation
// ---------------------------------------------------------------------------

/// `Γ(n + 3/2)`, needed by the 3-D small-radius limit.
fn gamma_n_plus_three_halves(n: u32) -> f64 {
    let mut g = 0.5 * std::f64::consts::PI.sqrt();
    for k in 1..=n {
        g *= k as f64 + 0.5;
    }
    g
}

/// Core radial factor at radius `r`, including the 3-D profile weight.
///
/// Below `r = 1e-8` the 3-D product `r^{-1/2} I_ν(βr)` is evaluated by its
/// series limit `r^n (β/2)^{n+1/2} / Γ(n + 3/2)` instead of forming the
/// near-0/0 quotient directly.
fn core_radial(dim: Dimension, degree: u32, beta: f64, r: f64, deriv: bool) -> Result<f64> {
    if dim == Dimension::Three && r < 1e-8 {
        let n = degree as f64;
        let scale = (0.5 * beta).powf(n + 0.5) / gamma_n_plus_three_halves(degree);
        return Ok(if deriv {
            if degree == 0 {
                0.0
            } else {
                n * r.powf(n - 1.0) * scale
            }
        } else {
            r.powf(n) * scale
        });
    }
    let pair = bessel_pair(dim.order(degree), beta * r, Scaling::Unscaled)?;
    let (val, der) = profile(dim, pair.i_val, beta * pair.i_deriv, r);
    // `profile` differentiates in r, so the chain-rule factor β is applied
    // to the Bessel derivative before the 3-D weight is attached.
    Ok(if deriv { der } else { val })
}

/// Shell radial factor `v B_I(r) + w B_K(r)` (or its radial derivative).
fn shell_radial(
    dim: Dimension,
    degree: u32,
    mc: &ModeCoefficients,
    r: f64,
    deriv: bool,
) -> Result<Complex64> {
    let pair = bessel_pair(dim.order(degree), r, Scaling::Unscaled)?;
    let (bi, bi_d) = profile(dim, pair.i_val, pair.i_deriv, r);
    let (bk, bk_d) = profile(dim, pair.k_val, pair.k_deriv, r);
    Ok(if deriv {
        mc.v * bi_d + mc.w * bk_d
    } else {
        mc.v * bi + mc.w * bk
    })
}

fn angular_factor(idx: ModeIndex, point: GridPoint) -> Result<Complex64> {
    match (idx, point) {
        (ModeIndex::Fourier(n), GridPoint::Disk { phi, .. }) => {
            Ok(Complex64::from_polar(1.0, n as f64 * phi))
        }
        (ModeIndex::Spherical { n, m }, GridPoint::Ball { theta, phi, .. }) => {
            let p = assoc_legendre(n, m, theta.cos())?;
            Ok(p * Complex64::from_polar(1.0, m as f64 * phi))
        }
        _ => Err(Error::Domain(
            "evaluate_wave: grid dimension does not match the coefficients".into(),
        )),
    }
}

fn evaluate_series(
    coeffs: &WaveCoefficients,
    grid: &EvaluationGrid,
    deriv: bool,
) -> Result<Vec<Complex64>> {
    if grid.dimension != coeffs.config.dimension {
        return Err(Error::Domain(format!(
            "evaluate_wave: grid is {}-dimensional but the coefficients are {}-dimensional",
            grid.dimension, coeffs.config.dimension
        )));
    }
    let dim = coeffs.config.dimension;
    let beta = 1.0 / coeffs.config.sigma1.sqrt();
    let r1 = coeffs.config.r1;
    let mut out = Vec::with_capacity(grid.points.len());
    for &point in &grid.points {
        let r = match point {
            GridPoint::Disk { r, .. } | GridPoint::Ball { r, .. } => r,
        };
        let mut acc = Complex64::default();
        for (&idx, mc) in &coeffs.modes {
            let degree = idx.degree();
            let radial = if r < r1 {
                mc.u * core_radial(dim, degree, beta, r, deriv)?
            } else {
                shell_radial(dim, degree, mc, r, deriv)?
            };
            acc += radial * angular_factor(idx, point)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Evaluate the matter wave at each grid point.
///
/// Points with `r < r1` use the core series, points with `r ≥ r1` the shell
/// series; at `r = r1` the two agree by the interface conditions (to the
/// accuracy the coefficients were solved to).
pub fn evaluate_wave(coeffs: &WaveCoefficients, grid: &EvaluationGrid) -> Result<Vec<Complex64>> {
    evaluate_series(coeffs, grid, false)
}

/// Radial derivative `∂ψ/∂r` at each grid point, from term-wise analytic
/// differentiation of the active radial branch.
pub fn evaluate_wave_radial_derivative(
    coeffs: &WaveCoefficients,
    grid: &EvaluationGrid,
) -> Result<Vec<Complex64>> {
    evaluate_series(coeffs, grid, true)
}

/// Dirichlet trace of the solution with Neumann data `g`: multiplication by
/// the ND symbol, mode by mode. Never touches the interior coefficients.
pub fn dirichlet_trace(config: &ShellConfig, g: &BoundaryData) -> Result<BoundaryData> {
    if basis_dimension_mismatch(config, g) {
        return Err(Error::Domain(format!(
            "dirichlet_trace: boundary data is {}-dimensional but the configuration is {}-dimensional",
            g.dimension, config.dimension
        )));
    }
    let engine = SymbolEngine::new(config, g.max_degree())?;
    let mut out = BoundaryData::new(config.dimension);
    for (&idx, &amplitude) in &g.modes {
        let lambda = engine.symbol(idx.degree())?;
        out.modes.insert(idx, amplitude * lambda);
    }
    Ok(out)
}

/// Render wave samples as CSV: `r,phi,re,im` rows on the disk,
/// `r,phi,theta,re,im` in the ball, floats at 17 significant digits.
pub fn wave_samples_csv(grid: &EvaluationGrid, values: &[Complex64]) -> Result<String> {
    if grid.points.len() != values.len() {
        return Err(Error::Domain(format!(
            "wave_samples_csv: {} points but {} values",
            grid.points.len(),
            values.len()
        )));
    }
    use crate::nd_map::fmt_f64 as ff;
    let mut out = String::new();
    match grid.dimension {
        Dimension::Two => out.push_str("r,phi,re,im\n"),
        Dimension::Three => out.push_str("r,phi,theta,re,im\n"),
    }
    for (&point, value) in grid.points.iter().zip(values) {
        match point {
            GridPoint::Disk { r, phi } => {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    ff(r),
                    ff(phi),
                    ff(value.re),
                    ff(value.im)
                ));
            }
            GridPoint::Ball { r, theta, phi } => {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    ff(r),
                    ff(phi),
                    ff(theta),
                    ff(value.re),
                    ff(value.im)
                ));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Projection of sampled boundary functions onto the modal bases
// ---------------------------------------------------------------------------

/// Squared norm of a basis element under the boundary inner product:
/// `2π` for `e^{inφ}` on the circle, and
/// `2π · 2/(2n+1) · (n+|m|)!/(n−|m|)!` for `P_n^{|m|}(cos θ) e^{imφ}` on
/// the sphere. Projections divide by this weight, so coefficients stay in
/// the un-normalised basis convention used throughout.
pub fn inner_product_weight(idx: ModeIndex) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    match idx {
        ModeIndex::Fourier(_) => two_pi,
        ModeIndex::Spherical { n, m } => {
            let mut ratio = 1.0;
            let (n, m_abs) = (n as i64, m.unsigned_abs() as i64);
            for k in (n - m_abs + 1)..=(n + m_abs) {
                ratio *= k as f64;
            }
            two_pi * 2.0 / (2.0 * n as f64 + 1.0) * ratio
        }
    }
}

/// Project a function on the circle onto Fourier modes `|n| ≤ n_max`.
///
/// Uniform trapezoidal sampling: exact (to rounding) for trigonometric
/// polynomials of degree ≤ `n_max` because the sample count exceeds the
/// bandwidth of every product `f(φ) e^{-inφ}`.
pub fn project_disk_boundary<F>(f: F, n_max: u32) -> BoundaryData
where
    F: Fn(f64) -> Complex64,
{
    let count = (4 * (n_max as usize + 1)).max(8);
    let samples: Vec<Complex64> = (0..count)
        .map(|j| f(2.0 * std::f64::consts::PI * j as f64 / count as f64))
        .collect();
    let mut data = BoundaryData::new(Dimension::Two);
    for n in -(n_max as i32)..=(n_max as i32) {
        let mut acc = Complex64::default();
        for (j, &s) in samples.iter().enumerate() {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            acc += s * Complex64::from_polar(1.0, -(n as f64) * phi);
        }
        data.modes
            .insert(ModeIndex::Fourier(n), acc / count as f64);
    }
    data
}

/// Project a function on the sphere onto modes `n ≤ n_max`, `|m| ≤ n`.
///
/// Gauss–Legendre in `μ = cos θ` (exact for the polynomial Legendre
/// factors) crossed with uniform trapezoid in `φ`.
pub fn project_ball_boundary<F>(f: F, n_max: u32) -> BoundaryData
where
    F: Fn(f64, f64) -> Complex64,
{
    let n_mu = n_max as usize + 2;
    let (nodes, weights) = gauss_legendre(n_mu);
    let n_phi = (4 * (n_max as usize + 1)).max(8);
    // Sample once on the tensor grid.
    let samples: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&mu| {
            let theta = mu.acos();
            (0..n_phi)
                .map(|j| f(theta, 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64))
                .collect()
        })
        .collect();
    let mut data = BoundaryData::new(Dimension::Three);
    for n in 0..=n_max {
        for m in -(n as i32)..=(n as i32) {
            let mut acc = Complex64::default();
            for (i, &mu) in nodes.iter().enumerate() {
                let p = assoc_legendre(n, m, mu).expect("Legendre on Gauss nodes is in range");
                let mut ring = Complex64::default();
                for (j, &s) in samples[i].iter().enumerate() {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                    ring += s * Complex64::from_polar(1.0, -(m as f64) * phi);
                }
                acc += weights[i] * p * ring * (2.0 * std::f64::consts::PI / n_phi as f64);
            }
            let idx = ModeIndex::Spherical { n, m };
            data.modes.insert(idx, acc / inner_product_weight(idx));
        }
    }
    data
}

/// Evaluate boundary data as a function on the circle (2-D data only).
pub fn synthesize_disk_boundary(data: &BoundaryData, phi: f64) -> Complex64 {
    data.modes
        .iter()
        .map(|(&idx, &c)| match idx {
            ModeIndex::Fourier(n) => c * Complex64::from_polar(1.0, n as f64 * phi),
            ModeIndex::Spherical { .. } => Complex64::default(),
        })
        .sum()
}

/// Evaluate boundary data as a function on the sphere (3-D data only).
pub fn synthesize_ball_boundary(data: &BoundaryData, theta: f64, phi: f64) -> Complex64 {
    data.modes
        .iter()
        .map(|(&idx, &c)| match idx {
            ModeIndex::Spherical { n, m } => {
                let p = assoc_legendre(n, m, theta.cos()).unwrap_or(0.0);
                c * p * Complex64::from_polar(1.0, m as f64 * phi)
            }
            ModeIndex::Fourier(_) => Complex64::default(),
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::Order;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(dim: Dimension, r1: f64, sigma1: f64) -> ShellConfig {
        ShellConfig::new(dim, r1, sigma1).unwrap()
    }

    fn one(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Residuals of the three per-mode transmission equations, relative to
    /// the largest participating term.
    fn system_residual(config: &ShellConfig, idx: ModeIndex, mc: &ModeCoefficients, g: Complex64) -> f64 {
        let dim = config.dimension;
        let degree = idx.degree();
        let ord = dim.order(degree);
        let beta = 1.0 / config.sigma1.sqrt();
        let r1 = config.r1;
        let core = bessel_pair(ord, beta * r1, Scaling::Unscaled).unwrap();
        let shell = bessel_pair(ord, r1, Scaling::Unscaled).unwrap();
        let outer = bessel_pair(ord, 1.0, Scaling::Unscaled).unwrap();

        let (bc, bc_d) = profile(dim, core.i_val, beta * core.i_deriv, r1);
        let (bi, bi_d) = profile(dim, shell.i_val, shell.i_deriv, r1);
        let (bk, bk_d) = profile(dim, shell.k_val, shell.k_deriv, r1);
        let (_, bi_d1) = profile(dim, outer.i_val, outer.i_deriv, 1.0);
        let (_, bk_d1) = profile(dim, outer.k_val, outer.k_deriv, 1.0);

        let eq1 = mc.u * bc - (mc.v * bi + mc.w * bk);
        let s1 = (mc.u * bc).norm().max((mc.v * bi).norm()).max((mc.w * bk).norm());
        let eq2 = config.sigma1 * mc.u * bc_d - (mc.v * bi_d + mc.w * bk_d);
        let s2 = (config.sigma1 * mc.u * bc_d)
            .norm()
            .max((mc.v * bi_d).norm())
            .max((mc.w * bk_d).norm());
        let eq3 = mc.v * bi_d1 + mc.w * bk_d1 - g;
        let s3 = (mc.v * bi_d1).norm().max((mc.w * bk_d1).norm()).max(g.norm());

        (eq1.norm() / s1.max(1e-300))
            .max(eq2.norm() / s2.max(1e-300))
            .max(eq3.norm() / s3.max(1e-300))
    }

    #[test]
    fn homogeneous_disk_mode_one_is_transparent() {
        // σ1 = 1: ρ = 0 exactly, so w = 0 and u = v = 1/I'_1(1).
        let config = cfg(Dimension::Two, 0.37, 1.0);
        let mut g = BoundaryData::new(Dimension::Two);
        g.insert_fourier(1, one(1.0)).unwrap();
        let coeffs = solve_coefficients(&config, &g).unwrap();
        let mc = coeffs.modes[&ModeIndex::Fourier(1)];
        let outer = bessel_pair(Order::Integer(1), 1.0, Scaling::Unscaled).unwrap();
        let expect = 1.0 / outer.i_deriv;
        assert_eq!(mc.w, Complex64::default());
        assert!((mc.v.re - expect).abs() < 1e-14 && mc.v.im == 0.0);
        assert!((mc.u - mc.v).norm() < 1e-14 * expect.abs());
    }

    #[test]
    fn system_residuals_on_spec_examples() {
        let config = cfg(Dimension::Two, 0.5, 2.0);
        let mut g = BoundaryData::new(Dimension::Two);
        g.insert_fourier(0, one(1.0)).unwrap();
        let coeffs = solve_coefficients(&config, &g).unwrap();
        let res = system_residual(
            &config,
            ModeIndex::Fourier(0),
            &coeffs.modes[&ModeIndex::Fourier(0)],
            one(1.0),
        );
        assert!(res <= 1e-12, "2-D residual {res}");

        let config3 = cfg(Dimension::Three, 0.4, 0.25);
        let mut g3 = BoundaryData::new(Dimension::Three);
        g3.insert_spherical(1, 0, one(1.0)).unwrap();
        let coeffs3 = solve_coefficients(&config3, &g3).unwrap();
        let res3 = system_residual(
            &config3,
            ModeIndex::Spherical { n: 1, m: 0 },
            &coeffs3.modes[&ModeIndex::Spherical { n: 1, m: 0 }],
            one(1.0),
        );
        assert!(res3 <= 1e-12, "3-D residual {res3}");
    }

    #[test]
    fn system_residuals_on_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for _ in 0..50 {
            let dim = if rng.gen_bool(0.5) {
                Dimension::Two
            } else {
                Dimension::Three
            };
            let config = cfg(dim, rng.gen_range(0.1..0.9), 10f64.powf(rng.gen_range(-1.0..1.0)));
            let mut g = BoundaryData::new(dim);
            let amp = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let idx = match dim {
                Dimension::Two => {
                    let n = rng.gen_range(-8..=8);
                    g.insert_fourier(n, amp).unwrap();
                    ModeIndex::Fourier(n)
                }
                Dimension::Three => {
                    let n = rng.gen_range(0..=8u32);
                    let m = rng.gen_range(-(n as i32)..=n as i32);
                    g.insert_spherical(n, m, amp).unwrap();
                    ModeIndex::Spherical { n, m }
                }
            };
            let coeffs = solve_coefficients(&config, &g).unwrap();
            let res = system_residual(&config, idx, &coeffs.modes[&idx], amp);
            assert!(res <= 1e-10, "residual {res} at {config:?}, {idx}");
        }
    }

    #[test]
    fn reference_trace_value_at_boundary() {
        // σ1 = 1, g_1 = 1: ψ(1, 0) = I_1(1)/I'_1(1).
        let config = cfg(Dimension::Two, 0.5, 1.0);
        let mut g = BoundaryData::new(Dimension::Two);
        g.insert_fourier(1, one(1.0)).unwrap();
        let coeffs = solve_coefficients(&config, &g).unwrap();
        let grid = EvaluationGrid::disk(&[(1.0, 0.0)]).unwrap();
        let psi = evaluate_wave(&coeffs, &grid).unwrap()[0];
        let outer = bessel_pair(Order::Integer(1), 1.0, Scaling::Unscaled).unwrap();
        assert!((psi.re - outer.i_val / outer.i_deriv).abs() < 1e-13);
        assert!(psi.im.abs() < 1e-15);
    }

    #[test]
    fn interface_continuity_and_flux_jump() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for dim in [Dimension::Two, Dimension::Three] {
            let config = cfg(dim, rng.gen_range(0.2..0.8), 10f64.powf(rng.gen_range(-0.7..0.7)));
            let beta = 1.0 / config.sigma1.sqrt();
            let mut g = BoundaryData::new(dim);
            match dim {
                Dimension::Two => {
                    for n in [-3, 0, 2, 5] {
                        g.insert_fourier(n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
                    }
                }
                Dimension::Three => {
                    for (n, m) in [(0, 0), (1, -1), (2, 1), (4, 3)] {
                        g.insert_spherical(n, m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
                    }
                }
            }
            let coeffs = solve_coefficients(&config, &g).unwrap();
            for _ in 0..100 {
                let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                let theta = rng.gen_range(0.3..2.8);
                let point = match dim {
                    Dimension::Two => GridPoint::Disk { r: config.r1, phi },
                    Dimension::Three => GridPoint::Ball { r: config.r1, theta, phi },
                };
                // Evaluate both radial branches at exactly r = r1.
                let mut inner = Complex64::default();
                let mut outer = Complex64::default();
                let mut inner_flux = Complex64::default();
                let mut outer_flux = Complex64::default();
                for (&idx, mc) in &coeffs.modes {
                    let ang = angular_factor(idx, point).unwrap();
                    let d = idx.degree();
                    inner += mc.u * core_radial(dim, d, beta, config.r1, false).unwrap() * ang;
                    inner_flux += mc.u * core_radial(dim, d, beta, config.r1, true).unwrap() * ang;
                    outer += shell_radial(dim, d, mc, config.r1, false).unwrap() * ang;
                    outer_flux += shell_radial(dim, d, mc, config.r1, true).unwrap() * ang;
                }
                let scale = inner.norm().max(outer.norm()).max(1e-30);
                assert!(
                    (inner - outer).norm() <= 1e-10 * scale,
                    "value jump at interface ({dim}-D)"
                );
                let flux_scale = inner_flux.norm().max(outer_flux.norm()).max(1e-30);
                assert!(
                    (config.sigma1 * inner_flux - outer_flux).norm() <= 1e-9 * flux_scale,
                    "flux jump at interface ({dim}-D)"
                );
            }
        }
    }

    #[test]
    fn trace_is_symbol_multiplication_and_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let config = cfg(Dimension::Two, 0.55, 3.2);
        let mut g = BoundaryData::new(Dimension::Two);
        for n in -6..=6 {
            g.insert_fourier(n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        }
        let trace = dirichlet_trace(&config, &g).unwrap();
        // Route 2: evaluate the interior series at r = 1 and project back.
        let coeffs = solve_coefficients(&config, &g).unwrap();
        let projected = project_disk_boundary(
            |phi| {
                let grid = EvaluationGrid::disk(&[(1.0, phi)]).unwrap();
                evaluate_wave(&coeffs, &grid).unwrap()[0]
            },
            6,
        );
        for (&idx, &c) in &trace.modes {
            let p = projected.modes.get(&idx).copied().unwrap_or_default();
            assert!(
                (c - p).norm() <= 1e-10 * c.norm().max(1.0),
                "trace/series mismatch at {idx}: {c} vs {p}"
            );
        }
    }

    #[test]
    fn trace_in_ball_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        let config = cfg(Dimension::Three, 0.45, 0.6);
        let mut g = BoundaryData::new(Dimension::Three);
        for (n, m) in [(0, 0), (1, 0), (1, 1), (2, -2), (3, 1)] {
            g.insert_spherical(n, m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        }
        let trace = dirichlet_trace(&config, &g).unwrap();
        let coeffs = solve_coefficients(&config, &g).unwrap();
        let projected = project_ball_boundary(
            |theta, phi| {
                let grid = EvaluationGrid::ball(&[(1.0, theta, phi)]).unwrap();
                evaluate_wave(&coeffs, &grid).unwrap()[0]
            },
            3,
        );
        for (&idx, &c) in &trace.modes {
            let p = projected.modes.get(&idx).copied().unwrap_or_default();
            assert!(
                (c - p).norm() <= 1e-10 * c.norm().max(1.0),
                "trace/series mismatch at {idx}: {c} vs {p}"
            );
        }
    }

    #[test]
    fn reference_trace_uses_reference_symbols() {
        let config = cfg(Dimension::Three, 0.3, 1.0);
        let mut g = BoundaryData::new(Dimension::Three);
        g.insert_spherical(2, 1, one(0.7)).unwrap();
        let trace = dirichlet_trace(&config, &g).unwrap();
        let lambda = crate::nd_map::reference_symbol(Dimension::Three, 2).unwrap();
        let got = trace.modes[&ModeIndex::Spherical { n: 2, m: 1 }];
        assert!((got.re - 0.7 * lambda).abs() <= 1e-13 * lambda);
    }

    #[test]
    fn negative_mode_shares_the_symbol() {
        let config = cfg(Dimension::Two, 0.6, 5.0);
        let mut g = BoundaryData::new(Dimension::Two);
        g.insert_fourier(3, one(1.0)).unwrap();
        g.insert_fourier(-3, one(1.0)).unwrap();
        let trace = dirichlet_trace(&config, &g).unwrap();
        assert_eq!(
            trace.modes[&ModeIndex::Fourier(3)],
            trace.modes[&ModeIndex::Fourier(-3)]
        );
    }

    #[test]
    fn trace_is_linear() {
        let config = cfg(Dimension::Two, 0.42, 1.7);
        let mut g1 = BoundaryData::new(Dimension::Two);
        let mut g2 = BoundaryData::new(Dimension::Two);
        for n in -4..=4 {
            g1.insert_fourier(n, Complex64::new(0.3 * n as f64, 0.1)).unwrap();
            g2.insert_fourier(n, Complex64::new(-0.2, 0.05 * n as f64)).unwrap();
        }
        let (a, b) = (Complex64::new(1.3, -0.4), Complex64::new(-0.7, 2.1));
        let mut combined = BoundaryData::new(Dimension::Two);
        for n in -4..=4 {
            let idx = ModeIndex::Fourier(n);
            combined
                .modes
                .insert(idx, a * g1.modes[&idx] + b * g2.modes[&idx]);
        }
        let t1 = dirichlet_trace(&config, &g1).unwrap();
        let t2 = dirichlet_trace(&config, &g2).unwrap();
        let tc = dirichlet_trace(&config, &combined).unwrap();
        for n in -4..=4 {
            let idx = ModeIndex::Fourier(n);
            let lin = a * t1.modes[&idx] + b * t2.modes[&idx];
            assert!((tc.modes[&idx] - lin).norm() <= 1e-12 * lin.norm().max(1.0));
        }
    }

    #[test]
    fn real_data_produces_real_wave() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let config = cfg(Dimension::Two, 0.5, 2.5);
        let mut g = BoundaryData::new(Dimension::Two);
        g.insert_fourier(0, one(0.8)).unwrap();
        for n in 1..=5 {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            g.insert_fourier(n, c).unwrap();
            g.insert_fourier(-n, c.conj()).unwrap();
        }
        assert!(g.is_real_valued());
        let coeffs = solve_coefficients(&config, &g).unwrap();
        let points: Vec<(f64, f64)> = (0..40)
            .map(|i| (0.025 + 0.975 * (i as f64 / 39.0), rng.gen_range(0.0..6.28)))
            .collect();
        let grid = EvaluationGrid::disk(&points).unwrap();
        for psi in evaluate_wave(&coeffs, &grid).unwrap() {
            assert!(
                psi.im.abs() <= 1e-12 * psi.re.abs().max(1.0),
                "imaginary residue {psi}"
            );
        }
    }

    #[test]
    fn small_radius_limit_matches_direct_evaluation() {
        // The 3-D analytic limit must splice continuously onto the direct
        // product at the 1e-8 threshold.
        for degree in [0u32, 1, 2] {
            for &beta in &[0.5, 1.0, 2.0] {
                let direct = core_radial(Dimension::Three, degree, beta, 1.001e-8, false).unwrap();
                let limit = core_radial(Dimension::Three, degree, beta, 0.999e-8, false).unwrap();
                // Compare after removing the r^n scaling between the points.
                let scale = (1.001e-8f64 / 0.999e-8).powi(degree as i32);
                let rel = (direct / scale - limit).abs() / limit.abs();
                assert!(rel < 1e-9, "splice mismatch: degree {degree}, β {beta}: {rel}");
            }
        }
        // n = 0 at essentially zero radius: u (β/2)^{1/2}/Γ(3/2).
        let v = core_radial(Dimension::Three, 0, 2.0, 1e-14, false).unwrap();
        let want = 1.0f64 / gamma_n_plus_three_halves(0);
        assert!((v - want).abs() < 1e-12 * want);
    }

    #[test]
    fn json_round_trip_and_spec_schema() {
        let text = r#"{"dimension":2,"basis":"fourier","modes":[{"n":1,"re":1.0,"im":0.0}]}"#;
        let data = BoundaryData::from_json(text).unwrap();
        assert_eq!(data.dimension, Dimension::Two);
        assert_eq!(data.modes[&ModeIndex::Fourier(1)], one(1.0));
        assert_eq!(BoundaryData::from_json(&data.to_json()).unwrap(), data);

        let text3 = r#"{"dimension":3,"basis":"spherical_harmonic","modes":[{"n":2,"m":-1,"re":0.5,"im":-0.25}]}"#;
        let data3 = BoundaryData::from_json(text3).unwrap();
        assert_eq!(
            data3.modes[&ModeIndex::Spherical { n: 2, m: -1 }],
            Complex64::new(0.5, -0.25)
        );
        assert_eq!(BoundaryData::from_json(&data3.to_json()).unwrap(), data3);
    }

    #[test]
    fn json_rejects_malformed_documents() {
        for bad in [
            r#"{"dimension":4,"basis":"fourier","modes":[]}"#,
            r#"{"dimension":2,"basis":"spherical_harmonic","modes":[]}"#,
            r#"{"dimension":3,"basis":"spherical_harmonic","modes":[{"n":1,"m":2,"re":1.0,"im":0.0}]}"#,
            r#"{"dimension":3,"basis":"spherical_harmonic","modes":[{"n":1,"re":1.0,"im":0.0}]}"#,
            r#"{"dimension":2,"basis":"fourier","modes":[{"n":1,"m":0,"re":1.0,"im":0.0}]}"#,
            r#"{"dimension":2,"basis":"fourier","modes":[{"n":1,"re":1.0,"im":0.0},{"n":1,"re":2.0,"im":0.0}]}"#,
            r#"not json"#,
        ] {
            assert!(BoundaryData::from_json(bad).is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn projection_round_trips_synthesized_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
        let mut g = BoundaryData::new(Dimension::Two);
        for n in -5..=5 {
            g.insert_fourier(n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        }
        let projected = project_disk_boundary(|phi| synthesize_disk_boundary(&g, phi), 5);
        for (&idx, &c) in &g.modes {
            let p = projected.modes[&idx];
            assert!((c - p).norm() <= 1e-12, "2-D projection error at {idx}");
        }

        let mut g3 = BoundaryData::new(Dimension::Three);
        for (n, m) in [(0, 0), (1, -1), (2, 0), (3, 2), (4, -4)] {
            g3.insert_spherical(n, m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
        }
        let projected3 =
            project_ball_boundary(|theta, phi| synthesize_ball_boundary(&g3, theta, phi), 4);
        for (&idx, &c) in &g3.modes {
            let p = projected3.modes[&idx];
            assert!((c - p).norm() <= 1e-12, "3-D projection error at {idx}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(EvaluationGrid::disk(&[(0.0, 0.0)]).is_err());
        assert!(EvaluationGrid::disk(&[(1.1, 0.0)]).is_err());
        assert!(EvaluationGrid::disk(&[(0.5, -0.1)]).is_err());
        assert!(EvaluationGrid::ball(&[(0.5, 0.0, 0.0)]).is_err());
        assert!(EvaluationGrid::ball(&[(0.5, 3.2, 0.0)]).is_err());
        assert!(EvaluationGrid::disk(&[(0.5, 0.3)]).is_ok());
        assert!(EvaluationGrid::ball(&[(0.5, 1.0, 0.3)]).is_ok());
    }

    #[test]
    fn wave_csv_headers() {
        let grid = EvaluationGrid::disk(&[(0.5, 0.0)]).unwrap();
        let csv = wave_samples_csv(&grid, &[one(1.5)]).unwrap();
        assert!(csv.starts_with("r,phi,re,im\n"));
        let grid3 = EvaluationGrid::ball(&[(0.5, 1.0, 0.0)]).unwrap();
        let csv3 = wave_samples_csv(&grid3, &[one(1.5)]).unwrap();
        assert!(csv3.starts_with("r,phi,theta,re,im\n"));
        assert_eq!(csv3.lines().nth(1).unwrap().split(',').count(), 5);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let config = cfg(Dimension::Two, 0.5, 2.0);
        let g3 = BoundaryData::new(Dimension::Three);
        assert!(solve_coefficients(&config, &g3).is_err());
        assert!(dirichlet_trace(&config, &g3).is_err());
    }
}
