//! Recovery of the core coefficient from one boundary measurement, and
//! construction of configurations a single mode cannot tell apart.
//!
//! A measurement is a (Neumann, Dirichlet) pair of boundary data for the same
//! experiment. Every excited mode `n` yields an estimate `λ_n = d_n / g_n` of
//! the corresponding multiplier symbol. The symbol is a Möbius function of
//! the core's flux-to-trace quotient (the *target* `t`), with coefficients
//! that depend only on the known geometry `(dimension, r1)` — never on the
//! unknown coefficient — so the target can be extracted from `λ_n` in closed
//! form. The target in turn is a strictly increasing function
//!
//! ```text
//! G(η) = n η² / r1 + η · (I_{ν+1}/I_ν)(r1 / η),      η = √σ1,
//! ```
//!
//! of the square root of the core coefficient (the form above absorbs the
//! 3-D profile shift *exactly*: `ν/x = (n + 1/2) η / r1` contributes
//! `(n + 1/2) η²/r1`, and the profile's `−η²/(2 r1)` cancels the half
//! algebraically, leaving two positive increasing terms and no subtractive
//! cancellation). One bracketed root search therefore recovers `σ1 = η²`
//! from a single mode; additional excited modes serve as cross-validation.
//!
//! Error policy for extraction: a mode whose amplitude is numerically zero,
//! or whose Möbius denominator cancels below `1e-12` of its ingredient
//! scale, carries no coefficient information at working precision and is
//! reported as ill-posed. A target `t ≤ 0`, or a symbol estimate with a
//! non-negligible imaginary part, cannot come from any admissible
//! configuration and is reported as an inconsistent measurement. A positive
//! target beyond the attainable range of `G` over the search interval
//! surfaces as a no-root error from the recovery search.
//!
//! Non-uniqueness: configurations `A = (r1, σ1)` and `B = (r2, σ2)` share
//! the symbol at mode `n` exactly when a 2×2 interface determinant vanishes
//! — each configuration pins the shell solution's `(I, K)` amplitude ratio
//! through its interface conditions, and equal symbols force the two linear
//! constraints to be dependent:
//!
//! ```text
//! det [ t1·I(r1) − I'(r1)   t1·K(r1) − K'(r1) ]
//!     [ t2·I(r2) − I'(r2)   t2·K(r2) − K'(r2) ]  =  0,
//! ```
//!
//! where `t_i` are the (3-D: profile-adjusted) interface targets. The
//! reported determinant is scaled by the product of the row norms, so it is
//! dimensionless and `≤ 1` in magnitude. Scanning it in `σ2` and bisecting
//! each sign change constructs indistinguishable pairs; every returned pair
//! is re-verified against the full symbol computation on both sides.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{dirichlet_trace, BoundaryData, ModeIndex};
use crate::nd_map::{self, Dimension, ShellConfig};
use crate::special_fn::{bessel_pair, bessel_ratio_i, Scaling};

/// Smallest Neumann amplitude considered "excited".
const AMPLITUDE_FLOOR: f64 = 1e-12;

/// Relative threshold under which the Möbius inversion's denominator is
/// treated as cancelled (the mode is then ill-posed).
const ILL_POSED_REL: f64 = 1e-12;

/// Conditioning level (denominator over ingredient scale) above which a
/// mode's estimate is accurate enough to take part in strict
/// cross-validation. Below it the estimate is still reported, but its
/// expected rounding error can exceed the consistency tolerance, so it must
/// not be allowed to veto the measurement.
const WELL_CONDITIONED: f64 = 1e-9;

/// Relative imaginary part above which a symbol estimate cannot be real.
const IMAG_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// One boundary experiment: the applied Neumann data and the recorded
/// Dirichlet trace, in the same dimension and modal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Applied flux data `g`.
    pub neumann: BoundaryData,
    /// Recorded trace data `Λ g`.
    pub dirichlet: BoundaryData,
}

impl Measurement {
    /// Validate and build a measurement. The two data sets must share the
    /// dimension (hence the basis), and at least one mode must be excited
    /// above the amplitude floor with a finite recorded coefficient.
    pub fn new(neumann: BoundaryData, dirichlet: BoundaryData) -> Result<Self> {
        if neumann.dimension != dirichlet.dimension {
            return Err(Error::Domain(format!(
                "Measurement: Neumann data is {}-dimensional but Dirichlet data is {}-dimensional",
                neumann.dimension.count(),
                dirichlet.dimension.count()
            )));
        }
        let meas = Measurement {
            neumann,
            dirichlet,
        };
        if meas.usable_modes().is_empty() {
            return Err(Error::Domain(format!(
                "Measurement: no mode is excited above |g| = {AMPLITUDE_FLOOR:e}"
            )));
        }
        Ok(meas)
    }

    /// The spatial dimension of the experiment.
    pub fn dimension(&self) -> Dimension {
        self.neumann.dimension
    }

    /// Synthesize the exact measurement a configuration would produce for
    /// the given Neumann data.
    pub fn synthesize(config: &ShellConfig, g: &BoundaryData) -> Result<Self> {
        let dirichlet = dirichlet_trace(config, g)?;
        Measurement::new(g.clone(), dirichlet)
    }

    /// A copy with each Dirichlet coefficient perturbed multiplicatively by
    /// zero-mean Gaussian noise: `d ← d · (1 + level · ξ)`, with `ξ`
    /// standard normal. Deterministic for a fixed seed. The Neumann side is
    /// the *applied* data and stays exact.
    pub fn with_noise(&self, level: f64, seed: u64) -> Result<Measurement> {
        if !level.is_finite() || level < 0.0 {
            return Err(Error::Domain(format!(
                "with_noise: noise level must be finite and non-negative, got {level}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dirichlet = self.dirichlet.clone();
        for value in dirichlet.modes.values_mut() {
            *value *= 1.0 + level * standard_normal(&mut rng);
        }
        Measurement::new(self.neumann.clone(), dirichlet)
    }

    /// Modes excited above the amplitude floor whose recorded coefficient
    /// (zero if absent) is finite.
    pub fn usable_modes(&self) -> Vec<ModeIndex> {
        self.neumann
            .modes
            .iter()
            .filter(|(idx, g)| {
                let d = self.dirichlet.modes.get(idx).copied().unwrap_or_default();
                g.norm() > AMPLITUDE_FLOOR && d.re.is_finite() && d.im.is_finite()
            })
            .map(|(&idx, _)| idx)
            .collect()
    }

    /// Modal symbol estimate `λ = d / g` for one mode. The symbols of an
    /// admissible configuration are real and positive; a violation beyond
    /// rounding is reported as an inconsistency.
    fn symbol_estimate(&self, mode: ModeIndex) -> Result<f64> {
        let g = self.neumann.modes.get(&mode).copied().unwrap_or_default();
        if g.norm() <= AMPLITUDE_FLOOR {
            return Err(Error::IllPosedMode(format!(
                "mode {mode} is not excited: |g| = {:e} ≤ {AMPLITUDE_FLOOR:e}",
                g.norm()
            )));
        }
        let d = self.dirichlet.modes.get(&mode).copied().unwrap_or_default();
        let lambda = d / g;
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::InconsistentMeasurement(format!(
                "mode {mode}: symbol estimate d/g is not finite"
            )));
        }
        if lambda.im.abs() > IMAG_TOL * (lambda.norm() + 1.0) {
            return Err(Error::InconsistentMeasurement(format!(
                "mode {mode}: symbol estimate {} + {}i has a non-negligible imaginary \
                 part; multiplier symbols are real",
                lambda.re, lambda.im
            )));
        }
        if lambda.re <= 0.0 {
            return Err(Error::InconsistentMeasurement(format!(
                "mode {mode}: symbol estimate {} is not positive; multiplier symbols \
                 of admissible configurations are positive",
                lambda.re
            )));
        }
        Ok(lambda.re)
    }

    /// Serialize as `{"neumann": <boundary data>, "dirichlet": <boundary data>}`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"neumann\":{},\"dirichlet\":{}}}",
            self.neumann.to_json(),
            self.dirichlet.to_json()
        )
    }

    /// Parse and validate the [`to_json`](Self::to_json) schema.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct MeasurementJson {
            neumann: serde_json::Value,
            dirichlet: serde_json::Value,
        }
        let raw: MeasurementJson = serde_json::from_str(text)?;
        let neumann = BoundaryData::from_json(&raw.neumann.to_string())?;
        let dirichlet = BoundaryData::from_json(&raw.dirichlet.to_string())?;
        Measurement::new(neumann, dirichlet)
    }
}

/// Standard normal deviate via the Box–Muller transform.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let mut u1: f64 = rng.gen();
    while u1 <= 0.0 {
        u1 = rng.gen();
    }
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

// ---------------------------------------------------------------------------
// Recovery
// ---------------------------------------------------------------------------

/// Tuning knobs for [`recover_sigma`].
#[derive(Debug, Clone, Copy)]
pub struct RecoveryOptions {
    /// Check that all well-conditioned modes agree before answering.
    pub cross_validate: bool,
    /// Largest tolerated relative spread of per-mode estimates.
    pub consistency_tol: f64,
    /// Lower end of the `η = √σ1` search interval.
    pub eta_min: f64,
    /// Upper end of the `η = √σ1` search interval.
    pub eta_max: f64,
    /// Number of logarithmically spaced pre-scan points used to bracket the
    /// root before bisection.
    pub prescan_points: usize,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            cross_validate: true,
            consistency_tol: 1e-4,
            eta_min: 1e-6,
            eta_max: 1e6,
            prescan_points: 64,
        }
    }
}

/// One mode's independent coefficient estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerModeEstimate {
    /// The mode the estimate came from.
    pub mode: ModeIndex,
    /// Its recovered coefficient.
    pub sigma1: f64,
}

/// Outcome of a coefficient recovery.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Recovered core coefficient.
    pub sigma1: f64,
    /// The mode the answer was taken from (largest usable amplitude).
    pub mode_used: ModeIndex,
    /// Final root bracket, in `σ1` units.
    pub bracket: (f64, f64),
    /// `|G(η*) − t|` at the accepted root.
    pub residual: f64,
    /// Independent estimates from every mode that could be inverted.
    pub per_mode_estimates: Vec<PerModeEstimate>,
}

#[derive(Serialize)]
struct ModeRefJson {
    n: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
}

fn mode_ref(mode: ModeIndex) -> ModeRefJson {
    match mode {
        ModeIndex::Fourier(n) => ModeRefJson {
            n: n as i64,
            m: None,
        },
        ModeIndex::Spherical { n, m } => ModeRefJson {
            n: n as i64,
            m: Some(m as i64),
        },
    }
}

impl RecoveryResult {
    /// Serialize as
    /// `{"sigma1":…,"mode_used":…,"residual":…,"bracket":[…,…],"per_mode":[…]}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct PerModeJson {
            n: i64,
            #[serde(skip_serializing_if = "Option::is_none")]
            m: Option<i64>,
            sigma1: f64,
        }
        #[derive(Serialize)]
        struct RecoveryJson {
            sigma1: f64,
            mode_used: ModeRefJson,
            residual: f64,
            bracket: [f64; 2],
            per_mode: Vec<PerModeJson>,
        }
        let report = RecoveryJson {
            sigma1: self.sigma1,
            mode_used: mode_ref(self.mode_used),
            residual: self.residual,
            bracket: [self.bracket.0, self.bracket.1],
            per_mode: self
                .per_mode_estimates
                .iter()
                .map(|e| {
                    let r = mode_ref(e.mode);
                    PerModeJson {
                        n: r.n,
                        m: r.m,
                        sigma1: e.sigma1,
                    }
                })
                .collect(),
        };
        serde_json::to_string(&report).expect("recovery report serialization cannot fail")
    }
}

/// The recovery map `G(η) = n η²/r1 + η (I_{ν+1}/I_ν)(r1/η)`, strictly
/// increasing in `η > 0`, whose value at `η = √σ1` is the mode's target.
///
/// Both terms are positive and increasing, and the 3-D profile shift is
/// absorbed algebraically (see the module docs), so the evaluation is free
/// of subtractive cancellation over the whole search interval.
///
/// Strict monotonicity of this map is what makes one-measurement recovery
/// well defined, so it is exported for external certification (the CLI's
/// `verify` monotonicity suite re-checks it on a dense grid).
pub fn recovery_map(
    dimension: Dimension,
    degree: u32,
    r1: f64,
    eta: f64,
) -> Result<f64> {
    let order = dimension.order(degree);
    let x = r1 / eta;
    let ratio = bessel_ratio_i(order, x)?;
    Ok(degree as f64 * eta * eta / r1 + eta * ratio)
}

/// Interface target of a configuration, adjusted (3-D) so that the
/// indistinguishability determinant is expressed in plain Bessel values:
/// `t° = G(√σ) − c(r)` with `c` the profile's log-derivative shift.
fn star_target(dimension: Dimension, r: f64, sigma: f64, degree: u32) -> Result<f64> {
    let g = recovery_map(dimension, degree, r, sigma.sqrt())?;
    Ok(g - dimension.profile_shift(r))
}

/// Extract the recovery target of one mode from a measurement, given the
/// known interface radius.
///
/// The symbol is `λ = (A − qB) / (Li1·A − q·Lk1·B)` with `A = Lk(r1) − t`,
/// `B = Li(r1) − t`; solving for `t` gives
///
/// ```text
/// t = (Li(r1)·Q − Lk(r1)·P) / (Q − P),   P = λ·Li1 − 1,   Q = q·(λ·Lk1 − 1),
/// ```
///
/// whose coefficients depend only on `(dimension, r1)`. When `Q − P`
/// cancels below [`ILL_POSED_REL`] of the ingredient scale — which happens
/// exactly when the contrast ratio `q` has decayed to rounding level and the
/// symbol no longer responds to the coefficient — the mode is ill-posed.
pub fn target_from_measurement(
    meas: &Measurement,
    r1: f64,
    mode: ModeIndex,
) -> Result<f64> {
    target_with_conditioning(meas, r1, mode).map(|(t, _)| t)
}

/// [`target_from_measurement`] plus the inversion's conditioning number
/// `|Q − P| / scale ∈ (0, ∞)`; the expected relative error of the target is
/// roughly machine epsilon divided by this number.
fn target_with_conditioning(
    meas: &Measurement,
    r1: f64,
    mode: ModeIndex,
) -> Result<(f64, f64)> {
    check_mode_dimension(meas.dimension(), mode)?;
    let lambda = meas.symbol_estimate(mode)?;
    let degree = mode.degree();
    // The ingredients depend on (dimension, r1) only; σ1 = 1 is a dummy.
    let geometry = ShellConfig::new(meas.dimension(), r1, 1.0)?;
    let engine = nd_map::SymbolEngine::new(&geometry, nd_map::engine_cap(degree))?;
    let (li_r1, lk_r1, li1, lk1, q) = engine.inversion_ingredients(degree);

    let p = lambda * li1 - 1.0;
    let qq = q * (lambda * lk1 - 1.0);
    let den = qq - p;
    let scale = (lambda * li1)
        .abs()
        .max((q * lambda * lk1).abs())
        .max(1.0);
    if !den.is_finite() || den.abs() < ILL_POSED_REL * scale {
        return Err(Error::IllPosedMode(format!(
            "mode {mode}: the symbol does not respond to the core coefficient at \
             working precision (inversion denominator {den:e} below {ILL_POSED_REL:e} \
             of scale {scale:e}); use a lower mode"
        )));
    }
    let t = (li_r1 * qq - lk_r1 * p) / den;
    if !t.is_finite() {
        return Err(Error::Degenerate(format!(
            "mode {mode}: target inversion produced a non-finite value"
        )));
    }
    if t <= 0.0 {
        return Err(Error::InconsistentMeasurement(format!(
            "mode {mode}: extracted target {t:e} is not positive, so the data cannot \
             come from any core-shell configuration"
        )));
    }
    Ok((t, den.abs() / scale))
}

fn check_mode_dimension(dimension: Dimension, mode: ModeIndex) -> Result<()> {
    let ok = match mode {
        ModeIndex::Fourier(_) => dimension == Dimension::Two,
        ModeIndex::Spherical { .. } => dimension == Dimension::Three,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "mode {mode} does not belong to the {}-dimensional basis",
            dimension.count()
        )))
    }
}

/// Solve `G(η) = t` on `[eta_min, eta_max]`: logarithmic pre-scan to
/// bracket, bisection to relative width `1e-14`, then a regula-falsi polish.
/// Returns `(σ1, σ1 bracket, |G(η*) − t|)`.
fn solve_recovery_target(
    dimension: Dimension,
    degree: u32,
    r1: f64,
    t: f64,
    options: &RecoveryOptions,
) -> Result<(f64, (f64, f64), f64)> {
    let n_scan = options.prescan_points.max(8);
    let (eta_min, eta_max) = (options.eta_min, options.eta_max);
    if !(eta_min.is_finite() && eta_max.is_finite()) || eta_min <= 0.0 || eta_min >= eta_max {
        return Err(Error::Domain(format!(
            "recover_sigma: invalid search interval [{eta_min}, {eta_max}]"
        )));
    }

    let g_at = |eta: f64| -> Result<f64> { Ok(recovery_map(dimension, degree, r1, eta)? - t) };
    let step = (eta_max / eta_min).powf(1.0 / (n_scan as f64 - 1.0));

    let mut lo = eta_min;
    let mut g_lo = g_at(lo)?;
    if g_lo > 0.0 {
        return Err(Error::NoRoot(format!(
            "recovery target {t:e} lies below the attainable range at mode degree \
             {degree}: G({eta_min:e}) = {:e} already exceeds it",
            g_lo + t
        )));
    }
    let mut bracket = None;
    for i in 1..n_scan {
        let hi = if i == n_scan - 1 {
            eta_max
        } else {
            eta_min * step.powi(i as i32)
        };
        let g_hi = g_at(hi)?;
        if g_lo == 0.0 {
            bracket = Some((lo, lo, 0.0, 0.0));
            break;
        }
        if g_lo < 0.0 && g_hi >= 0.0 {
            bracket = Some((lo, hi, g_lo, g_hi));
            break;
        }
        lo = hi;
        g_lo = g_hi;
    }
    let (mut lo, mut hi, mut g_lo, mut g_hi) = bracket.ok_or_else(|| {
        Error::NoRoot(format!(
            "recovery target {t:e} lies above the attainable range at mode degree \
             {degree} for σ1 ∈ [{:e}, {:e}]; the mode's map is bounded",
            eta_min * eta_min,
            eta_max * eta_max
        ))
    })?;

    // Bisection in the logarithm: the bracket ratio shrinks by √ each step.
    let mut guard = 0;
    while hi - lo > 1e-14 * hi && guard < 300 {
        guard += 1;
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g_at(mid)?;
        if g_mid == 0.0 {
            lo = mid;
            hi = mid;
            g_lo = 0.0;
            g_hi = 0.0;
            break;
        } else if g_mid < 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }

    // Regula-falsi polish inside the final bracket, keeping the best point.
    let (mut eta_star, mut res_best) = if g_lo.abs() <= g_hi.abs() {
        (lo, g_lo.abs())
    } else {
        (hi, g_hi.abs())
    };
    if g_hi != g_lo {
        let reg = lo - g_lo * (hi - lo) / (g_hi - g_lo);
        if reg.is_finite() && reg >= lo && reg <= hi {
            let g_reg = g_at(reg)?;
            if g_reg.abs() < res_best {
                eta_star = reg;
                res_best = g_reg.abs();
            }
        }
    }

    Ok((
        eta_star * eta_star,
        (lo * lo, hi * hi),
        res_best,
    ))
}

/// Recover the core coefficient from one measurement, given the interface
/// radius.
///
/// Every usable mode is inverted independently; the answer is taken from
/// the well-conditioned mode with the largest Neumann amplitude, and (by
/// default) all well-conditioned modes must agree to within
/// [`RecoveryOptions::consistency_tol`] relative, or the measurement is
/// rejected as inconsistent. Ill-posed modes (no coefficient information at
/// working precision) are skipped; they can never veto a recovery.
pub fn recover_sigma(
    meas: &Measurement,
    r1: f64,
    options: &RecoveryOptions,
) -> Result<RecoveryResult> {
    if !r1.is_finite() || r1 <= 0.0 || r1 >= 1.0 {
        return Err(Error::Domain(format!(
            "recover_sigma: interface radius must lie strictly inside (0, 1), got {r1}"
        )));
    }
    let usable = meas.usable_modes();
    if usable.is_empty() {
        return Err(Error::IllPosedMode(
            "recover_sigma: no usable mode in the measurement".into(),
        ));
    }

    struct ModeSolve {
        mode: ModeIndex,
        amplitude: f64,
        conditioning: f64,
        sigma: f64,
        bracket: (f64, f64),
        residual: f64,
    }

    let mut solves: Vec<ModeSolve> = Vec::new();
    let mut first_failure: Option<Error> = None;
    for mode in usable {
        let (t, conditioning) = match target_with_conditioning(meas, r1, mode) {
            Ok(pair) => pair,
            Err(Error::IllPosedMode(_)) => continue,
            Err(other) => return Err(other),
        };
        match solve_recovery_target(meas.dimension(), mode.degree(), r1, t, options) {
            Ok((sigma, bracket, residual)) => solves.push(ModeSolve {
                mode,
                amplitude: meas
                    .neumann
                    .modes
                    .get(&mode)
                    .map(|g| g.norm())
                    .unwrap_or(0.0),
                conditioning,
                sigma,
                bracket,
                residual,
            }),
            Err(err) => {
                if first_failure.is_none() {
                    first_failure = Some(err);
                }
            }
        }
    }

    if solves.is_empty() {
        return Err(first_failure.unwrap_or_else(|| {
            Error::IllPosedMode(
                "recover_sigma: every excited mode is ill-posed at working precision; \
                 excite a lower mode"
                    .into(),
            )
        }));
    }

    // Selection and cross-validation pool: well-conditioned solves if any.
    let well: Vec<usize> = (0..solves.len())
        .filter(|&i| solves[i].conditioning >= WELL_CONDITIONED)
        .collect();
    let pool: Vec<usize> = if well.is_empty() {
        (0..solves.len()).collect()
    } else {
        well
    };
    // Largest amplitude wins; ties go to the earliest (lowest) mode.
    let mut best = pool[0];
    for &i in &pool[1..] {
        if solves[i].amplitude > solves[best].amplitude {
            best = i;
        }
    }
    let answer = &solves[best];

    if options.cross_validate && pool.len() > 1 {
        let reference = answer.sigma;
        for &i in &pool {
            let deviation = (solves[i].sigma - reference).abs() / reference.max(f64::MIN_POSITIVE);
            if deviation > options.consistency_tol {
                return Err(Error::InconsistentMeasurement(format!(
                    "modes {} and {} disagree about the coefficient: {:.6e} vs {:.6e} \
                     (relative spread {:.3e} > {:.3e}); the data cannot come from a \
                     single piecewise-constant configuration",
                    answer.mode,
                    solves[i].mode,
                    reference,
                    solves[i].sigma,
                    deviation,
                    options.consistency_tol
                )));
            }
        }
    }

    Ok(RecoveryResult {
        sigma1: answer.sigma,
        mode_used: answer.mode,
        bracket: answer.bracket,
        residual: answer.residual,
        per_mode_estimates: solves
            .iter()
            .map(|s| PerModeEstimate {
                mode: s.mode,
                sigma1: s.sigma,
            })
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// Non-uniqueness
// ---------------------------------------------------------------------------

/// Tuning knobs for [`find_nonuniq_pairs`].
#[derive(Debug, Clone, Copy)]
pub struct NonuniqOptions {
    /// Lower end of the `σ2` search interval.
    pub sigma2_min: f64,
    /// Upper end of the `σ2` search interval.
    pub sigma2_max: f64,
    /// Number of logarithmically spaced scan points.
    pub scan_points: usize,
}

impl Default for NonuniqOptions {
    fn default() -> Self {
        NonuniqOptions {
            sigma2_min: 1e-6,
            sigma2_max: 1e6,
            scan_points: 200,
        }
    }
}

/// Two configurations whose ND maps agree exactly on one mode, together
/// with the certificates of that agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct NonuniqPair {
    /// The given configuration.
    pub config_a: ShellConfig,
    /// The constructed partner (same dimension, radius `r2`).
    pub config_b: ShellConfig,
    /// The mode the two maps agree on.
    pub mode_n: u32,
    /// Row-norm-scaled interface determinant at the root, `≤ 1e-10`.
    pub det_residual: f64,
    /// `|λ_n(A) − λ_n(B)|` recomputed through the full symbol path.
    pub symbol_gap: f64,
}

impl NonuniqPair {
    /// Symbol gap `|λ_{n'}(A) − λ_{n'}(B)|` at a *different* mode:
    /// generically nonzero, which is the diagnostic showing the pair is
    /// indistinguishable at `mode_n` only.
    pub fn cross_mode_gap(&self, other_mode: u32) -> Result<f64> {
        let a = nd_map::nd_symbol(&self.config_a, other_mode)?;
        let b = nd_map::nd_symbol(&self.config_b, other_mode)?;
        Ok((a - b).abs())
    }

    /// Serialize as
    /// `{"a":{"r1":…,"sigma1":…},"b":{"r1":…,"sigma1":…},"n":…,"det_residual":…,"symbol_gap":…,"dimension":…}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ConfigJson {
            r1: f64,
            sigma1: f64,
        }
        #[derive(Serialize)]
        struct PairJson {
            a: ConfigJson,
            b: ConfigJson,
            n: u32,
            det_residual: f64,
            symbol_gap: f64,
            dimension: u32,
        }
        let report = PairJson {
            a: ConfigJson {
                r1: self.config_a.r1,
                sigma1: self.config_a.sigma1,
            },
            b: ConfigJson {
                r1: self.config_b.r1,
                sigma1: self.config_b.sigma1,
            },
            n: self.mode_n,
            det_residual: self.det_residual,
            symbol_gap: self.symbol_gap,
            dimension: self.config_a.dimension.count(),
        };
        serde_json::to_string(&report).expect("pair report serialization cannot fail")
    }
}

/// Row-norm-scaled interface determinant deciding whether `(r1, σ1)` and
/// `(r2, σ2)` share the ND symbol at mode `n` (zero exactly at
/// indistinguishable pairs; dimensionless and `|·| ≤ 1`).
pub fn nonuniq_determinant(
    config_a: &ShellConfig,
    r2: f64,
    sigma2: f64,
    mode_n: u32,
) -> Result<f64> {
    // Validates r2/sigma2 and pins the dimension.
    let config_b = ShellConfig::new(config_a.dimension, r2, sigma2)?;
    let (row_a, row_b) = (
        determinant_row(config_a, mode_n)?,
        determinant_row(&config_b, mode_n)?,
    );
    let det = row_a.0 * row_b.1 - row_a.1 * row_b.0;
    let scale = row_a.0.hypot(row_a.1) * row_b.0.hypot(row_b.1);
    if !scale.is_finite() || scale < 1e-300 {
        return Err(Error::Degenerate(format!(
            "nonuniq_determinant: row norms degenerate at mode {mode_n}"
        )));
    }
    Ok(det / scale)
}

/// One configuration's interface row `(t·I(r) − I'(r), t·K(r) − K'(r))` at
/// its own radius, with the exponential scaling of the Bessel evaluation
/// compensated exactly (`r < 1`, so the factors `e^{±r}` are harmless).
fn determinant_row(config: &ShellConfig, mode_n: u32) -> Result<(f64, f64)> {
    let order = config.dimension.order(mode_n);
    let t = star_target(config.dimension, config.r1, config.sigma1, mode_n)?;
    let pair = bessel_pair(order, config.r1, Scaling::ExpScaled)?;
    let a = (t * pair.i_val - pair.i_deriv) * config.r1.exp();
    let b = (t * pair.k_val - pair.k_deriv) * (-config.r1).exp();
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Overflow(format!(
            "nonuniq_determinant: interface row not representable at mode {mode_n}, \
             r = {}, σ = {}",
            config.r1, config.sigma1
        )));
    }
    Ok((a, b))
}

/// Construct every indistinguishable partner `(r2, σ2)` of `config_a` at
/// mode `n` with the given radius, by scanning the scaled determinant over
/// `σ2` and bisecting each sign change. Roots are returned sorted by `σ2`;
/// each is verified both through the determinant residual and through the
/// full symbol computation on both configurations. If the determinant never
/// changes sign, the search reports an honest no-root error.
pub fn find_nonuniq_pairs(
    config_a: &ShellConfig,
    r2: f64,
    mode_n: u32,
    options: &NonuniqOptions,
) -> Result<Vec<NonuniqPair>> {
    let (s_min, s_max) = (options.sigma2_min, options.sigma2_max);
    if !(s_min.is_finite() && s_max.is_finite()) || s_min <= 0.0 || s_min >= s_max {
        return Err(Error::Domain(format!(
            "find_nonuniq_pairs: invalid σ2 interval [{s_min}, {s_max}]"
        )));
    }
    let n_scan = options.scan_points.max(16);
    let det_at = |s2: f64| nonuniq_determinant(config_a, r2, s2, mode_n);
    let step = (s_max / s_min).powf(1.0 / (n_scan as f64 - 1.0));

    // Collect every bracket (or exact zero) along the scan.
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut exact: Vec<f64> = Vec::new();
    let mut prev_s = s_min;
    let mut prev_d = det_at(prev_s)?;
    if prev_d == 0.0 {
        exact.push(prev_s);
    }
    for i in 1..n_scan {
        let s = if i == n_scan - 1 {
            s_max
        } else {
            s_min * step.powi(i as i32)
        };
        let d = det_at(s)?;
        if d == 0.0 {
            exact.push(s);
        } else if prev_d != 0.0 && (prev_d < 0.0) != (d < 0.0) {
            brackets.push((prev_s, s));
        }
        prev_s = s;
        prev_d = d;
    }
    if brackets.is_empty() && exact.is_empty() {
        return Err(Error::NoRoot(format!(
            "the interface determinant of (r1, σ1) = ({}, {}) against r2 = {r2} at \
             mode {mode_n} never changes sign over σ2 ∈ [{s_min:e}, {s_max:e}]; no \
             indistinguishable partner exists there",
            config_a.r1, config_a.sigma1
        )));
    }

    let mut roots: Vec<f64> = exact;
    for (mut lo, mut hi) in brackets {
        let mut d_lo = det_at(lo)?;
        let mut d_hi = det_at(hi)?;
        let mut guard = 0;
        while hi - lo > 1e-14 * hi && guard < 300 {
            guard += 1;
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            let d_mid = det_at(mid)?;
            if d_mid == 0.0 {
                lo = mid;
                hi = mid;
                d_lo = 0.0;
                d_hi = 0.0;
                break;
            } else if (d_mid < 0.0) == (d_lo < 0.0) {
                lo = mid;
                d_lo = d_mid;
            } else {
                hi = mid;
                d_hi = d_mid;
            }
        }
        // Regula-falsi polish, keeping the best point of the bracket.
        let (mut root, mut best) = if d_lo.abs() <= d_hi.abs() {
            (lo, d_lo.abs())
        } else {
            (hi, d_hi.abs())
        };
        if d_hi != d_lo {
            let reg = lo - d_lo * (hi - lo) / (d_hi - d_lo);
            if reg.is_finite() && reg >= lo && reg <= hi {
                let d_reg = det_at(reg)?;
                if d_reg.abs() < best {
                    root = reg;
                    best = d_reg.abs();
                }
            }
        }
        let _ = best;
        roots.push(root);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));

    let mut pairs = Vec::with_capacity(roots.len());
    for sigma2 in roots {
        let config_b = ShellConfig::new(config_a.dimension, r2, sigma2)?;
        let det_residual = det_at(sigma2)?.abs();
        let symbol_gap = (nd_map::nd_symbol(config_a, mode_n)?
            - nd_map::nd_symbol(&config_b, mode_n)?)
        .abs();
        if det_residual > 1e-10 || symbol_gap > 1e-10 {
            return Err(Error::Degenerate(format!(
                "find_nonuniq_pairs: root at σ2 = {sigma2:e} failed verification \
                 (determinant residual {det_residual:e}, symbol gap {symbol_gap:e}, \
                 both must be ≤ 1e-10)"
            )));
        }
        pairs.push(NonuniqPair {
            config_a: *config_a,
            config_b,
            mode_n,
            det_residual,
            symbol_gap,
        });
    }
    Ok(pairs)
}

// ---------------------------------------------------------------------------
// Potential report
// ---------------------------------------------------------------------------

/// The piecewise-constant potential pair every admissible `(σ1, Ẽ)`
/// determines: after normalising the equation by the diffusion coefficient,
/// the effective potential is `Ẽ + 1/σ1` in the core and `Ẽ + 1` in the
/// shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialReport {
    /// The core coefficient the report was built from.
    pub sigma1: f64,
    /// Effective core potential `Ẽ + 1/σ1`.
    pub u_tilde_core: f64,
    /// Effective shell potential `Ẽ + 1`.
    pub u_tilde_shell: f64,
}

impl PotentialReport {
    /// Serialize as `{"sigma1":…,"u_tilde_core":…,"u_tilde_shell":…}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ReportJson {
            sigma1: f64,
            u_tilde_core: f64,
            u_tilde_shell: f64,
        }
        serde_json::to_string(&ReportJson {
            sigma1: self.sigma1,
            u_tilde_core: self.u_tilde_core,
            u_tilde_shell: self.u_tilde_shell,
        })
        .expect("potential report serialization cannot fail")
    }
}

/// Map a recovered coefficient and spectral shift to the equivalent
/// effective potentials.
pub fn potential_report(sigma1: f64, e_tilde: f64) -> Result<PotentialReport> {
    if !sigma1.is_finite() || sigma1 <= 0.0 {
        return Err(Error::Domain(format!(
            "potential_report: coefficient must be positive, got {sigma1}"
        )));
    }
    if !e_tilde.is_finite() {
        return Err(Error::Domain(format!(
            "potential_report: spectral shift must be finite, got {e_tilde}"
        )));
    }
    Ok(PotentialReport {
        sigma1,
        u_tilde_core: e_tilde + 1.0 / sigma1,
        u_tilde_shell: e_tilde + 1.0,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_products::cross_products;
    use crate::special_fn::Order;
    use num_complex::Complex64;
    use rand::Rng;

    fn fourier_probe(amplitudes: &[(i32, f64)]) -> BoundaryData {
        let mut g = BoundaryData::new(Dimension::Two);
        for &(n, a) in amplitudes {
            g.insert_fourier(n, Complex64::new(a, 0.0)).unwrap();
        }
        g
    }

    fn spherical_probe(amplitudes: &[(u32, i32, f64)]) -> BoundaryData {
        let mut g = BoundaryData::new(Dimension::Three);
        for &(n, m, a) in amplitudes {
            g.insert_spherical(n, m, Complex64::new(a, 0.0)).unwrap();
        }
        g
    }

    fn synth(dim: Dimension, r1: f64, sigma1: f64, g: &BoundaryData) -> Measurement {
        let config = ShellConfig::new(dim, r1, sigma1).unwrap();
        Measurement::synthesize(&config, g).unwrap()
    }

    // -- recovery map -------------------------------------------------------

    #[test]
    fn recovery_map_matches_engine_target() {
        // G(√σ1) must reproduce the engine's flux-to-trace target, which is
        // assembled through a different association of the same quantities.
        for &(dim, r1, sigma) in &[
            (Dimension::Two, 0.5, 2.0),
            (Dimension::Two, 0.3, 0.2),
            (Dimension::Three, 0.5, 2.0),
            (Dimension::Three, 0.7, 17.0),
        ] {
            let config = ShellConfig::new(dim, r1, sigma).unwrap();
            let engine = nd_map::SymbolEngine::new(&config, 8).unwrap();
            for n in 0..=8u32 {
                let g = recovery_map(dim, n, r1, sigma.sqrt()).unwrap();
                let t = engine.target(n);
                assert!(
                    (g - t).abs() <= 1e-12 * t.abs().max(1.0),
                    "target mismatch at dim {dim}, n = {n}: {g} vs {t}"
                );
            }
        }
    }

    #[test]
    fn verbatim_recovery_map_is_strictly_increasing() {
        // The classical form F(η) = η² I'_ν(r/η)/I_ν(r/η) on a 200-point
        // logarithmic grid over [1e-3, 1e3], for integer and half-integer
        // orders up to 10.5 and three radii.
        let f = |order: Order, r: f64, eta: f64| -> f64 {
            let x = r / eta;
            let li = order.nu() / x + bessel_ratio_i(order, x).unwrap();
            eta * eta * li
        };
        for k in 0..=10u32 {
            for order in [Order::Integer(k), Order::HalfInteger(k)] {
                for &r in &[0.1, 0.5, 0.9] {
                    let mut prev = f64::NEG_INFINITY;
                    for i in 0..200 {
                        let eta = 1e-3 * (1e6f64).powf(i as f64 / 199.0);
                        let val = f(order, r, eta);
                        assert!(
                            val > prev,
                            "F not strictly increasing at order {:?}, r = {r}, η = {eta}",
                            order
                        );
                        prev = val;
                    }
                }
            }
        }
    }

    #[test]
    fn physical_recovery_map_is_increasing_with_bounded_low_mode_range() {
        // G itself is strictly increasing, and the n = 0 map is bounded:
        // sup r/2 in 2-D, sup r/3 in 3-D (the no-information limit σ → ∞).
        for &(dim, cap_factor) in &[(Dimension::Two, 2.0), (Dimension::Three, 3.0)] {
            for &r in &[0.1, 0.5, 0.9] {
                for n in 0..=4u32 {
                    let mut prev = f64::NEG_INFINITY;
                    for i in 0..200 {
                        let eta = 1e-3 * (1e6f64).powf(i as f64 / 199.0);
                        let val = recovery_map(dim, n, r, eta).unwrap();
                        assert!(val > prev, "G not increasing at {dim}, n = {n}, r = {r}");
                        prev = val;
                    }
                }
                let sup = r / cap_factor;
                let near_sup = recovery_map(dim, 0, r, 1e6).unwrap();
                assert!(near_sup < sup, "n = 0 map exceeded its supremum");
                assert!(
                    (sup - near_sup) / sup < 1e-2,
                    "n = 0 map should approach {sup} ({dim}, r = {r}), got {near_sup}"
                );
            }
        }
    }

    // -- target extraction --------------------------------------------------

    #[test]
    fn homogeneous_target_is_bessel_log_derivative() {
        // σ1 = 1 collapses the target to İ_ν/I_ν(r1) (2-D) and its
        // profile-shifted version (3-D).
        let r1 = 0.4;
        let meas = synth(Dimension::Two, r1, 1.0, &fourier_probe(&[(1, 1.0)]));
        let t = target_from_measurement(&meas, r1, ModeIndex::Fourier(1)).unwrap();
        let li = 1.0 / r1 + bessel_ratio_i(Order::Integer(1), r1).unwrap();
        assert!((t - li).abs() <= 1e-12 * li, "2-D: {t} vs {li}");

        let r1 = 0.3;
        let meas = synth(Dimension::Three, r1, 1.0, &spherical_probe(&[(2, 1, 1.0)]));
        let t = target_from_measurement(&meas, r1, ModeIndex::Spherical { n: 2, m: 1 }).unwrap();
        let li = 2.5 / r1 + bessel_ratio_i(Order::HalfInteger(2), r1).unwrap();
        let expected = li - 1.0 / (2.0 * r1);
        assert!(
            (t - expected).abs() <= 1e-12 * expected.abs(),
            "3-D: {t} vs {expected}"
        );
    }

    #[test]
    fn contrast_target_matches_scaled_log_derivative() {
        // (2-D, r1 = 0.5, σ1 = 2, mode 1): the target must equal
        // √2 İ_1(0.5/√2)/I_1(0.5/√2) — the flux-weighted logarithmic
        // derivative of the core solution at the interface.
        let (r1, sigma) = (0.5, 2.0);
        let meas = synth(Dimension::Two, r1, sigma, &fourier_probe(&[(1, 1.0)]));
        let t = target_from_measurement(&meas, r1, ModeIndex::Fourier(1)).unwrap();
        let x = r1 / sigma.sqrt();
        let expected = sigma.sqrt() * (1.0 / x + bessel_ratio_i(Order::Integer(1), x).unwrap());
        assert!(
            (t - expected).abs() <= 1e-10 * expected,
            "target {t} vs closed form {expected}"
        );
    }

    #[test]
    fn target_inversion_is_identity_on_symbols() {
        // Extracting the target from a synthesized measurement must undo the
        // symbol map: t(λ(σ1)) = target(σ1) to 1e-10 across random configs.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for trial in 0..200 {
            let dim = if rng.gen::<bool>() {
                Dimension::Two
            } else {
                Dimension::Three
            };
            let r1 = rng.gen_range(0.1..0.9);
            let sigma = 10f64.powf(rng.gen_range(-1.5..1.5));
            let n = rng.gen_range(0..6u32);
            let config = ShellConfig::new(dim, r1, sigma).unwrap();
            let (g, mode) = match dim {
                Dimension::Two => (
                    fourier_probe(&[(n as i32, 1.0)]),
                    ModeIndex::Fourier(n as i32),
                ),
                Dimension::Three => (
                    spherical_probe(&[(n, 0, 1.0)]),
                    ModeIndex::Spherical { n, m: 0 },
                ),
            };
            let meas = Measurement::synthesize(&config, &g).unwrap();
            let (t, conditioning) = target_with_conditioning(&meas, r1, mode).unwrap();
            let engine = nd_map::SymbolEngine::new(&config, n).unwrap();
            let expected = engine.target(n);
            // The inversion amplifies symbol rounding by 1/conditioning; the
            // strict 1e-10 identity applies on well-conditioned modes, while
            // marginal ones (contrast ratio near the rounding floor) are
            // held to the amplified error model instead.
            let tol_rel = 1e-10f64.max(5e-15 / conditioning);
            assert!(
                (t - expected).abs() <= tol_rel * expected.abs().max(1.0),
                "trial {trial}: target {t} vs {expected} (dim {dim}, r1 {r1}, σ {sigma}, \
                 n {n}, conditioning {conditioning:e})"
            );
            if conditioning >= 1e-5 {
                assert!(
                    (t - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                    "trial {trial}: well-conditioned identity violated"
                );
            }
        }
    }

    #[test]
    fn unexcited_mode_is_ill_posed() {
        let mut g = fourier_probe(&[(1, 1.0)]);
        g.insert_fourier(0, Complex64::new(0.0, 0.0)).unwrap();
        let meas = synth(Dimension::Two, 0.5, 2.0, &g);
        let err = target_from_measurement(&meas, 0.5, ModeIndex::Fourier(0)).unwrap_err();
        assert!(matches!(err, Error::IllPosedMode(_)), "got {err:?}");
    }

    #[test]
    fn information_free_high_mode_is_ill_posed() {
        // At high mode degree the contrast ratio q ~ r1^{2ν} underflows the
        // symbol's sensitivity below rounding: honest ill-posed report.
        let meas = synth(Dimension::Two, 0.3, 2.0, &fourier_probe(&[(40, 1.0)]));
        let err = target_from_measurement(&meas, 0.3, ModeIndex::Fourier(40)).unwrap_err();
        assert!(matches!(err, Error::IllPosedMode(_)), "got {err:?}");
    }

    #[test]
    fn complex_symbol_estimate_is_inconsistent() {
        let g = fourier_probe(&[(1, 1.0)]);
        let config = ShellConfig::new(Dimension::Two, 0.5, 2.0).unwrap();
        let mut dirichlet = dirichlet_trace(&config, &g).unwrap();
        let idx = ModeIndex::Fourier(1);
        let d = dirichlet.modes[&idx];
        dirichlet
            .modes
            .insert(idx, d + Complex64::new(0.0, 0.5 * d.norm()));
        let meas = Measurement::new(g, dirichlet).unwrap();
        let err = target_from_measurement(&meas, 0.5, idx).unwrap_err();
        assert!(matches!(err, Error::InconsistentMeasurement(_)), "got {err:?}");
    }

    #[test]
    fn mode_dimension_mismatch_is_domain_error() {
        let meas = synth(Dimension::Two, 0.5, 2.0, &fourier_probe(&[(1, 1.0)]));
        let err =
            target_from_measurement(&meas, 0.5, ModeIndex::Spherical { n: 1, m: 0 }).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "got {err:?}");
    }

    // -- recovery -----------------------------------------------------------

    #[test]
    fn recovers_contrast_two_in_two_dimensions() {
        let meas = synth(Dimension::Two, 0.5, 2.0, &fourier_probe(&[(1, 1.0)]));
        let result = recover_sigma(&meas, 0.5, &RecoveryOptions::default()).unwrap();
        assert!(
            (result.sigma1 - 2.0).abs() <= 1e-8,
            "recovered {} instead of 2",
            result.sigma1
        );
        assert_eq!(result.mode_used, ModeIndex::Fourier(1));
        assert!(result.residual <= 1e-12 * result.sigma1.max(1.0));
        assert!(result.bracket.0 <= result.sigma1 && result.sigma1 <= result.bracket.1);
    }

    #[test]
    fn recovers_low_contrast_in_three_dimensions() {
        let meas = synth(
            Dimension::Three,
            0.3,
            0.25,
            &spherical_probe(&[(2, 1, 1.0)]),
        );
        let result = recover_sigma(&meas, 0.3, &RecoveryOptions::default()).unwrap();
        assert!(
            (result.sigma1 - 0.25).abs() <= 1e-8,
            "recovered {} instead of 0.25",
            result.sigma1
        );
    }

    #[test]
    fn homogeneous_recovery_is_exact_to_1e10() {
        for &(dim, r1) in &[(Dimension::Two, 0.5), (Dimension::Three, 0.6)] {
            let g = match dim {
                Dimension::Two => fourier_probe(&[(1, 1.0)]),
                Dimension::Three => spherical_probe(&[(1, 0, 1.0)]),
            };
            let meas = synth(dim, r1, 1.0, &g);
            let result = recover_sigma(&meas, r1, &RecoveryOptions::default()).unwrap();
            assert!(
                (result.sigma1 - 1.0).abs() <= 1e-10,
                "{dim}: recovered {} instead of exactly 1",
                result.sigma1
            );
        }
    }

    #[test]
    fn recovery_round_trip_on_parameter_grid() {
        // Subset of the full acceptance grid; the complete sweep runs in the
        // acceptance suite.
        for &dim in &[Dimension::Two, Dimension::Three] {
            for &r1 in &[0.2, 0.5, 0.8] {
                for &sigma in &[0.1, 0.5, 1.0, 2.0, 10.0] {
                    let g = match dim {
                        Dimension::Two => fourier_probe(&[(1, 1.0)]),
                        Dimension::Three => spherical_probe(&[(1, 0, 1.0)]),
                    };
                    let meas = synth(dim, r1, sigma, &g);
                    let result = recover_sigma(&meas, r1, &RecoveryOptions::default()).unwrap();
                    assert!(
                        (result.sigma1 - sigma).abs() <= 1e-8 * sigma.max(1.0),
                        "{dim}, r1 = {r1}, σ1 = {sigma}: recovered {}",
                        result.sigma1
                    );
                }
            }
        }
    }

    #[test]
    fn multi_mode_estimates_agree_on_clean_data() {
        let meas = synth(
            Dimension::Two,
            0.55,
            3.7,
            &fourier_probe(&[(0, 0.5), (1, 1.0), (2, 0.7), (3, 0.4)]),
        );
        let result = recover_sigma(&meas, 0.55, &RecoveryOptions::default()).unwrap();
        assert_eq!(result.per_mode_estimates.len(), 4);
        for e in &result.per_mode_estimates {
            assert!(
                (e.sigma1 - result.sigma1).abs() <= 1e-6 * result.sigma1,
                "per-mode estimate at {} drifted: {} vs {}",
                e.mode,
                e.sigma1,
                result.sigma1
            );
        }
        // Largest amplitude wins the mode selection.
        assert_eq!(result.mode_used, ModeIndex::Fourier(1));
    }

    #[test]
    fn corrupted_mode_is_flagged_inconsistent() {
        let g = fourier_probe(&[(1, 1.0), (2, 1.0)]);
        let config = ShellConfig::new(Dimension::Two, 0.5, 2.0).unwrap();
        let mut dirichlet = dirichlet_trace(&config, &g).unwrap();
        let idx = ModeIndex::Fourier(2);
        let d = dirichlet.modes[&idx];
        dirichlet.modes.insert(idx, d * 1.01);
        let meas = Measurement::new(g, dirichlet).unwrap();
        let err = recover_sigma(&meas, 0.5, &RecoveryOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InconsistentMeasurement(_)), "got {err:?}");
    }

    #[test]
    fn cross_validation_can_be_disabled() {
        let g = fourier_probe(&[(1, 1.0), (2, 1.0)]);
        let config = ShellConfig::new(Dimension::Two, 0.5, 2.0).unwrap();
        let mut dirichlet = dirichlet_trace(&config, &g).unwrap();
        let idx = ModeIndex::Fourier(2);
        let d = dirichlet.modes[&idx];
        dirichlet.modes.insert(idx, d * 1.01);
        let meas = Measurement::new(g, dirichlet).unwrap();
        let options = RecoveryOptions {
            cross_validate: false,
            ..RecoveryOptions::default()
        };
        let result = recover_sigma(&meas, 0.5, &options).unwrap();
        // mode 1 is untouched, and both modes have amplitude 1; selection is
        // deterministic (first maximum in mode order).
        assert!((result.sigma1 - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn out_of_range_target_reports_no_root() {
        // An n = 0 measurement in 2-D has target range (0, r1/2); a
        // fabricated Dirichlet coefficient pushing the target beyond the
        // supremum must surface as a no-root error, not a made-up answer.
        let r1 = 0.5;
        let g = fourier_probe(&[(0, 1.0)]);
        let config = ShellConfig::new(Dimension::Two, r1, 1.0).unwrap();
        let clean = dirichlet_trace(&config, &g).unwrap();
        let idx = ModeIndex::Fourier(0);
        // The symbol λ_0 decreases as the target grows; shrink it far below
        // any attainable value to push the extracted target above r1/2.
        let mut dirichlet = clean.clone();
        let d = dirichlet.modes[&idx];
        dirichlet.modes.insert(idx, d * 0.5);
        let meas = Measurement::new(g, dirichlet).unwrap();
        let err = recover_sigma(&meas, r1, &RecoveryOptions::default()).unwrap_err();
        assert!(
            matches!(err, Error::NoRoot(_) | Error::InconsistentMeasurement(_)),
            "got {err:?}"
        );
    }

    #[test]
    fn noisy_measurement_recovers_approximately_and_deterministically() {
        let meas = synth(Dimension::Two, 0.5, 2.0, &fourier_probe(&[(1, 1.0)]));
        let noisy_a = meas.with_noise(1e-8, 7).unwrap();
        let noisy_b = meas.with_noise(1e-8, 7).unwrap();
        assert_eq!(noisy_a, noisy_b, "same seed must give the same data");
        let other = meas.with_noise(1e-8, 8).unwrap();
        assert_ne!(noisy_a, other, "different seeds must differ");

        let options = RecoveryOptions {
            cross_validate: false,
            ..RecoveryOptions::default()
        };
        let result = recover_sigma(&noisy_a, 0.5, &options).unwrap();
        assert!(
            (result.sigma1 - 2.0).abs() <= 1e-4,
            "noisy recovery drifted: {}",
            result.sigma1
        );
    }

    #[test]
    fn recovery_result_json_shape() {
        let meas = synth(Dimension::Two, 0.5, 2.0, &fourier_probe(&[(1, 1.0)]));
        let result = recover_sigma(&meas, 0.5, &RecoveryOptions::default()).unwrap();
        let json = result.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(value["sigma1"].is_f64());
        assert_eq!(value["mode_used"]["n"], 1);
        assert!(value["residual"].is_f64());
        assert_eq!(value["bracket"].as_array().unwrap().len(), 2);
        assert_eq!(value["per_mode"].as_array().unwrap().len(), 1);
        assert!((value["per_mode"][0]["sigma1"].as_f64().unwrap() - 2.0).abs() <= 1e-8);
    }

    // -- measurement plumbing ------------------------------------------------

    #[test]
    fn measurement_json_round_trip() {
        let meas = synth(Dimension::Three, 0.4, 3.0, &spherical_probe(&[(1, 0, 1.0)]));
        let json = meas.to_json();
        let back = Measurement::from_json(&json).unwrap();
        assert_eq!(meas, back);
        assert!(Measurement::from_json("{\"neumann\":{}}").is_err());
        assert!(Measurement::from_json("not json").is_err());
    }

    #[test]
    fn measurement_requires_matching_dimensions() {
        let g2 = fourier_probe(&[(1, 1.0)]);
        let g3 = spherical_probe(&[(1, 0, 1.0)]);
        let err = Measurement::new(g2, g3).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn measurement_requires_an_excited_mode() {
        let mut g = BoundaryData::new(Dimension::Two);
        g.insert_fourier(1, Complex64::new(1e-14, 0.0)).unwrap();
        let d = BoundaryData::new(Dimension::Two);
        let err = Measurement::new(g, d).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    // -- non-uniqueness ------------------------------------------------------

    #[test]
    fn determinant_vanishes_for_identical_configurations() {
        for &(dim, r1, sigma) in &[
            (Dimension::Two, 0.5, 2.0),
            (Dimension::Three, 0.4, 0.7),
        ] {
            let config = ShellConfig::new(dim, r1, sigma).unwrap();
            for n in 0..=3u32 {
                let det = nonuniq_determinant(&config, r1, sigma, n).unwrap();
                assert_eq!(det, 0.0, "identical rows must cancel exactly ({dim}, n = {n})");
            }
        }
    }

    #[test]
    fn determinant_vanishes_for_two_homogeneous_configurations() {
        // σ1 = σ2 = 1 with different radii: both reduce to the homogeneous
        // problem, so the interface rows are proportional.
        for &dim in &[Dimension::Two, Dimension::Three] {
            let config = ShellConfig::new(dim, 0.35, 1.0).unwrap();
            for n in 0..=3u32 {
                let det = nonuniq_determinant(&config, 0.75, 1.0, n).unwrap();
                assert!(
                    det.abs() <= 1e-12,
                    "homogeneous pair determinant too large: {det} ({dim}, n = {n})"
                );
            }
        }
    }

    #[test]
    fn determinant_matches_cross_product_expansion() {
        // Dual route: the row form must agree with the expansion
        // t1 t2 D − t1 D01 − t2 D10 + D11 assembled from the cross-product
        // module, after applying the same row-norm scale.
        for &(dim, r1, sigma1, r2, sigma2, n) in &[
            (Dimension::Two, 0.5, 2.0, 0.7, 3.0, 1u32),
            (Dimension::Two, 0.3, 0.4, 0.6, 5.0, 0),
            (Dimension::Three, 0.4, 3.0, 0.8, 0.2, 2),
        ] {
            let config = ShellConfig::new(dim, r1, sigma1).unwrap();
            let det = nonuniq_determinant(&config, r2, sigma2, n).unwrap();

            let order = dim.order(n);
            let t1 = star_target(dim, r1, sigma1, n).unwrap();
            let t2 = star_target(dim, r2, sigma2, n).unwrap();
            let cp = cross_products(order, r1, r2).unwrap();
            let expansion = t1 * t2 * cp.d - t1 * cp.d01 - t2 * cp.d10 + cp.d11;
            let row_a = determinant_row(&config, n).unwrap();
            let config_b = ShellConfig::new(dim, r2, sigma2).unwrap();
            let row_b = determinant_row(&config_b, n).unwrap();
            let scale = row_a.0.hypot(row_a.1) * row_b.0.hypot(row_b.1);
            let expected = expansion / scale;
            assert!(
                (det - expected).abs() <= 1e-11 * det.abs().max(1e-3),
                "dual determinant routes disagree: {det} vs {expected}"
            );
        }
    }

    #[test]
    fn determinant_changes_sign_across_the_partner() {
        let config = ShellConfig::new(Dimension::Two, 0.5, 2.0).unwrap();
        let lo = nonuniq_determinant(&config, 0.7, 1e-3, 1).unwrap();
        let hi = nonuniq_determinant(&config, 0.7, 1e3, 1).unwrap();
        assert!(
            lo * hi < 0.0,
            "expected a sign change over the σ2 scan, got {lo} and {hi}"
        );
    }

    #[test]
    fn finds_two_dimensional_pair_with_certificates() {
        let config = ShellConfig::new(Dimension::Two, 0.5, 2.0).unwrap();
        let pairs = find_nonuniq_pairs(&config, 0.7, 1, &NonuniqOptions::default()).unwrap();
        assert!(!pairs.is_empty());
        for pair in &pairs {
            assert_eq!(pair.config_b.r1, 0.7);
            assert!(pair.det_residual <= 1e-10);
            assert!(pair.symbol_gap <= 1e-10);
            // The constructed partner must be a genuinely different
            // configuration, indistinguishable at this mode only.
            let cross = pair.cross_mode_gap(2).unwrap();
            assert!(
                cross > 1e-8,
                "symbols also agree at mode 2 (gap {cross:e}); pair is not a \
                 single-mode counterexample"
            );
        }
        // Roots come back sorted.
        for w in pairs.windows(2) {
            assert!(w[0].config_b.sigma1 <= w[1].config_b.sigma1);
        }
    }

    #[test]
    fn finds_three_dimensional_pair_with_certificates() {
        let config = ShellConfig::new(Dimension::Three, 0.4, 3.0).unwrap();
        let pairs = find_nonuniq_pairs(&config, 0.6, 0, &NonuniqOptions::default()).unwrap();
        assert!(!pairs.is_empty());
        for pair in &pairs {
            assert!(pair.det_residual <= 1e-10);
            assert!(pair.symbol_gap <= 1e-10);
            assert!(pair.cross_mode_gap(1).unwrap() > 1e-8);
        }
    }

    #[test]
    fn homogeneous_partner_root_is_one() {
        // A homogeneous configuration's partner at any radius is again
        // homogeneous: the σ2 root must sit at 1.
        let config = ShellConfig::new(Dimension::Two, 0.5, 1.0).unwrap();
        let pairs = find_nonuniq_pairs(&config, 0.7, 1, &NonuniqOptions::default()).unwrap();
        assert!(
            pairs
                .iter()
                .any(|p| (p.config_b.sigma1 - 1.0).abs() <= 1e-6),
            "expected a root at σ2 = 1, got {:?}",
            pairs.iter().map(|p| p.config_b.sigma1).collect::<Vec<_>>()
        );
    }

    #[test]
    fn nonuniq_pair_json_shape() {
        let config = ShellConfig::new(Dimension::Two, 0.5, 2.0).unwrap();
        let pairs = find_nonuniq_pairs(&config, 0.7, 1, &NonuniqOptions::default()).unwrap();
        let json = pairs[0].to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["a"]["r1"], 0.5);
        assert_eq!(value["a"]["sigma1"], 2.0);
        assert_eq!(value["b"]["r1"], 0.7);
        assert!(value["b"]["sigma1"].is_f64());
        assert_eq!(value["n"], 1);
        assert!(value["det_residual"].is_f64());
        assert!(value["symbol_gap"].is_f64());
        assert_eq!(value["dimension"], 2);
    }

    // -- potential report ----------------------------------------------------

    #[test]
    fn potential_report_examples() {
        let r = potential_report(1.0, 0.0).unwrap();
        assert_eq!((r.u_tilde_core, r.u_tilde_shell), (1.0, 1.0));
        let r = potential_report(2.0, 0.0).unwrap();
        assert_eq!((r.u_tilde_core, r.u_tilde_shell), (0.5, 1.0));
        let r = potential_report(0.25, 3.0).unwrap();
        assert_eq!((r.u_tilde_core, r.u_tilde_shell), (7.0, 4.0));
        assert!(matches!(
            potential_report(0.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            potential_report(-1.0, 1.0),
            Err(Error::Domain(_))
        ));
        let json = potential_report(0.25, 3.0).unwrap().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["u_tilde_core"], 7.0);
        assert_eq!(value["u_tilde_shell"], 4.0);
    }
}
