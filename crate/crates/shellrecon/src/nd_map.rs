//! The Neumann-to-Dirichlet (ND) map of a concentric core-shell medium as a
//! spectral multiplier, together with operator norms and parameter sweeps.
//!
//! # Setting
//!
//! The domain is the unit disk (2-D) or unit ball (3-D) with a concentric
//! core of radius `r1`. The field satisfies `Δψ = Ũ ψ` with the reduced
//! potential `Ũ = Ẽ + 1/σ1` in the core and `Ẽ + 1` in the shell, at the
//! distinguished energy `Ẽ = -1` where the shell equation becomes the
//! modified Bessel equation. Across the interface the trace and the weighted
//! flux `σ1 ∂ψ/∂r` are continuous, and the ND map sends the outer Neumann
//! trace to the outer Dirichlet trace.
//!
//! Separating variables turns the ND map into multiplication by a real
//! symbol `λ_n` on each angular mode. With `ν = n` (2-D) or `ν = n + 1/2`
//! (3-D), the radial profiles are `I_ν(r/√σ1)` in the core and a combination
//! of `I_ν(r)` and `K_ν(r)` in the shell (each carrying an extra `r^{-1/2}`
//! factor in 3-D). All symbol formulas reduce to logarithmic derivatives of
//! those profiles, cross-products, and the weighted core flux coefficient.
//!
//! # Numerical strategy
//!
//! The production path normalises the cross-product expression for `λ_n` by
//! `I_ν(1) K_ν(r1)`, leaving only three ingredients per mode:
//!
//! * logarithmic derivatives `I'_ν/I_ν` and `K'_ν/K_ν` at `1`, `r1`, and
//!   `r1/√σ1`, each `O(ν)`-sized and built from ratio ladders,
//! * the contrast ratio `q_ν = [I_ν(r1) K_ν(1)] / [I_ν(1) K_ν(r1)]`,
//!   telescoped across orders from consecutive-order ratios; it decays like
//!   `r1^{2ν}` and a numerical underflow to zero simply lands the symbol on
//!   its reference limit,
//! * the core flux coefficient expressed through `I'_ν/I_ν(r1/√σ1)`.
//!
//! Nothing in this path can overflow at high order, which is what lets the
//! operator-norm truncation run to hundreds of modes. The textbook two-step
//! formula (shell reflection coefficient `ρ`, then the symbol as a Möbius
//! expression in `ρ`) is kept as an independently computed route: the two
//! must agree to eleven digits, and the test suite holds them to it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[cfg(test)]
use crate::special_fn::{bessel_pair, Scaling};
use crate::special_fn::{
    bessel_ratio_i, i_ladder_scaled, i_ratio_ladder, k_ladder_scaled, k_ratio_ladder, Order,
};

/// Spatial dimension of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    /// Unit disk, Fourier modes, integer Bessel orders.
    Two,
    /// Unit ball, spherical-harmonic modes, half-integer Bessel orders.
    Three,
}

impl Dimension {
    /// The Bessel order attached to angular mode `n`.
    pub fn order(self, n: u32) -> Order {
        match self {
            Dimension::Two => Order::Integer(n),
            Dimension::Three => Order::HalfInteger(n),
        }
    }

    /// Numeric dimension (2 or 3).
    pub fn count(self) -> u32 {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    /// Logarithmic-derivative shift of the radial profile at radius `x`:
    /// zero in 2-D, `-1/(2x)` in 3-D (from the `r^{-1/2}` profile factor).
    pub(crate) fn profile_shift(self, x: f64) -> f64 {
        match self {
            Dimension::Two => 0.0,
            Dimension::Three => -0.5 / x,
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.count())
    }
}

/// Geometry and coefficient of one core-shell configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellConfig {
    /// Spatial dimension.
    pub dimension: Dimension,
    /// Core radius, strictly between 0 and 1.
    pub r1: f64,
    /// Core coefficient `σ1 > 0`; the shell coefficient is identically 1.
    pub sigma1: f64,
}

impl ShellConfig {
    /// Validate and build a configuration.
    pub fn new(dimension: Dimension, r1: f64, sigma1: f64) -> Result<Self> {
        if !r1.is_finite() || r1 <= 0.0 || r1 >= 1.0 {
            return Err(Error::Domain(format!(
                "ShellConfig: core radius must lie strictly inside (0, 1), got {r1}"
            )));
        }
        if !sigma1.is_finite() || sigma1 <= 0.0 {
            return Err(Error::Domain(format!(
                "ShellConfig: core coefficient must be positive, got {sigma1}"
            )));
        }
        Ok(ShellConfig {
            dimension,
            r1,
            sigma1,
        })
    }
}

/// Shell reflection coefficient `ρ` of one mode: the ratio of the outgoing
/// (`K`) to regular (`I`) shell amplitudes forced by the interface matching.
#[derive(Debug, Clone, Copy)]
pub struct RhoValue {
    /// The coefficient itself; zero exactly when `σ1 = 1`.
    pub value: f64,
}

/// Per-mode multiplier symbols of one configuration's ND map.
#[derive(Debug, Clone)]
pub struct NdSymbolTable {
    /// Spatial dimension the table was built for.
    pub dimension: Dimension,
    /// Largest mode index included.
    pub n_max: u32,
    /// `symbols[n] = λ_n` for `n = 0..=n_max`. In 2-D the symbol of a
    /// negative mode equals that of `|n|`; in 3-D the symbol is shared by
    /// all `m` with `|m| <= n`.
    pub symbols: Vec<f64>,
}

impl NdSymbolTable {
    /// Render as CSV with an `n,lambda` header and full
    /// (17 significant digit) float precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lambda\n");
        for (n, lambda) in self.symbols.iter().enumerate() {
            out.push_str(&format!("{},{}\n", n, fmt_f64(*lambda)));
        }
        out
    }
}

/// An operator whose norm can be measured: a shell configuration's ND map or
/// the homogeneous reference map.
#[derive(Debug, Clone, Copy)]
pub enum OperatorSpec {
    /// ND map of a core-shell configuration.
    Shell(ShellConfig),
    /// ND map of the homogeneous disk/ball (`σ1 = 1` limit).
    Reference(Dimension),
}

impl OperatorSpec {
    fn dimension(&self) -> Dimension {
        match self {
            OperatorSpec::Shell(c) => c.dimension,
            OperatorSpec::Reference(d) => *d,
        }
    }
}

/// Result of an operator-norm computation.
#[derive(Debug, Clone, Copy)]
pub struct NormResult {
    /// The certified supremum of the weighted symbol sequence.
    pub norm: f64,
    /// Mode index attaining the supremum.
    pub argmax_mode: u32,
    /// Mode cap the certification finally used (after any extensions).
    pub n_max_used: u32,
}

/// Sweep axis for [`norm_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Vary `σ1`, keeping `r1` fixed; difference norms vanish at `σ1 = 1`.
    Sigma1ToOne,
    /// Vary `r1`, keeping `σ1` fixed; difference norms vanish as `r1 → 0`.
    R1ToZero,
}

/// One row of a norm sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    /// The swept parameter value (`σ1` or `r1`).
    pub parameter: f64,
    /// Difference norm `‖R_config − R_reference‖` at that parameter.
    pub norm: f64,
    /// Mode attaining the sup.
    pub argmax_mode: u32,
}

/// Result of [`norm_sweep`]: rows in sweep order plus a monotonicity flag.
#[derive(Debug, Clone)]
pub struct SweepTable {
    /// Rows in the order the points were given.
    pub rows: Vec<SweepRow>,
    /// Whether the norm column is strictly decreasing down the table
    /// (ties at zero allowed once the norm has hit exactly zero).
    pub monotone_decreasing: bool,
}

impl SweepTable {
    /// Render as CSV with a `parameter,norm,argmax_mode` header and full
    /// (17 significant digit) float precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,norm,argmax_mode\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(row.parameter),
                fmt_f64(row.norm),
                row.argmax_mode
            ));
        }
        out
    }
}

/// Format a float with 17 significant digits (lossless round-trip).
///
/// Every text format emitted by this crate and its tools uses this helper so
/// that repeated runs produce byte-identical output on every platform.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// The mode-ladder engine
// ---------------------------------------------------------------------------

/// Precomputed per-order data for one configuration, supporting symbol
/// evaluation at every mode `0..=n_max` in one pass.
///
/// Everything is stored as logarithmic derivatives and order-telescoped
/// ratios, so no entry grows beyond `O(ν)` and the engine is usable far past
/// the point where raw Bessel values leave the `f64` range.
pub(crate) struct SymbolEngine {
    config: ShellConfig,
    n_max: u32,
    /// `I'_ν/I_ν` at the scaled core argument `r1/√σ1`, per order.
    li_core: Vec<f64>,
    /// `I'_ν/I_ν` at `r1`.
    li_r1: Vec<f64>,
    /// `K'_ν/K_ν` at `r1`.
    lk_r1: Vec<f64>,
    /// `I'_ν/I_ν` at 1.
    li_one: Vec<f64>,
    /// `K'_ν/K_ν` at 1.
    lk_one: Vec<f64>,
    /// Contrast ratio `q_ν = [I_ν(r1) K_ν(1)] / [I_ν(1) K_ν(r1)]`; underflow
    /// clamps to zero, which lands symbols exactly on the reference limit.
    q: Vec<f64>,
    /// `I_ν(r1) / K_ν(r1)`, same underflow convention; used by `rho`.
    i_over_k_r1: Vec<f64>,
}

impl SymbolEngine {
    pub(crate) fn new(config: &ShellConfig, n_max: u32) -> Result<Self> {
        let half = config.dimension == Dimension::Three;
        let top = n_max as usize;
        let beta = 1.0 / config.sigma1.sqrt();
        let core_arg = config.r1 * beta;
        let r1 = config.r1;

        let ri_core = i_ratio_ladder(half, top, core_arg)?;
        let ri_r1 = i_ratio_ladder(half, top, r1)?;
        let ri_one = i_ratio_ladder(half, top, 1.0)?;
        let rk_r1 = k_ratio_ladder(half, top, r1)?;
        let rk_one = k_ratio_ladder(half, top, 1.0)?;

        let nu = |k: usize| k as f64 + if half { 0.5 } else { 0.0 };

        let li_core: Vec<f64> = (0..=top).map(|k| nu(k) / core_arg + ri_core[k]).collect();
        let li_r1: Vec<f64> = (0..=top).map(|k| nu(k) / r1 + ri_r1[k]).collect();
        let li_one: Vec<f64> = (0..=top).map(|k| nu(k) + ri_one[k]).collect();
        let lk_r1: Vec<f64> = (0..=top).map(|k| nu(k) / r1 - rk_r1[k]).collect();
        let lk_one: Vec<f64> = (0..=top).map(|k| nu(k) - rk_one[k]).collect();

        // Seed the telescoped ratios at the lowest order from scaled values,
        // then extend with consecutive-order ratios. All factors positive.
        let i_low = i_ladder_scaled(half, 0, r1)?[0];
        let i_low_one = i_ladder_scaled(half, 0, 1.0)?[0];
        let k_low = k_ladder_scaled(half, 0, r1)?[0];
        let k_low_one = k_ladder_scaled(half, 0, 1.0)?[0];

        let mut q = Vec::with_capacity(top + 1);
        // q_0 = [I(r1)/I(1)] [K(1)/K(r1)]
        //     = e^{2(r1-1)} [Ī(r1) K̄(1)] / [Ī(1) K̄(r1)].
        q.push((2.0 * (r1 - 1.0)).exp() * (i_low * k_low_one) / (i_low_one * k_low));
        let mut i_over_k = Vec::with_capacity(top + 1);
        // I(r1)/K(r1) = e^{2 r1} Ī(r1)/K̄(r1).
        i_over_k.push((2.0 * r1).exp() * i_low / k_low);
        for k in 0..top {
            let q_next = q[k] * (ri_r1[k] / ri_one[k]) * (rk_one[k] / rk_r1[k]);
            q.push(if q_next.is_finite() { q_next } else { 0.0 });
            let iok_next = i_over_k[k] * ri_r1[k] / rk_r1[k];
            i_over_k.push(if iok_next.is_finite() { iok_next } else { 0.0 });
        }

        Ok(SymbolEngine {
            config: *config,
            n_max,
            li_core,
            li_r1,
            lk_r1,
            li_one,
            lk_one,
            q,
            i_over_k_r1: i_over_k,
        })
    }

    /// Weighted core flux coefficient divided by the core trace: the
    /// "target" `t = σ1 B'_c(r1) / B_c(r1)` that recovery ultimately inverts.
    pub(crate) fn target(&self, n: u32) -> f64 {
        let k = n as usize;
        let cfg = &self.config;
        cfg.sigma1.sqrt() * self.li_core[k] + cfg.sigma1 * cfg.dimension.profile_shift(cfg.r1)
    }

    /// The shifted logarithmic derivatives and contrast ratio the symbol is
    /// assembled from, for mode `n`: `(Li(r1), Lk(r1), Li(1), Lk(1), q)`
    /// with `Li/Lk` the profile log-derivatives of the `I`/`K` shell
    /// solutions. The inverse module reuses these to invert the symbol map
    /// in closed form.
    pub(crate) fn inversion_ingredients(&self, n: u32) -> (f64, f64, f64, f64, f64) {
        let k = n as usize;
        let cfg = &self.config;
        let cr = cfg.dimension.profile_shift(cfg.r1);
        let c1 = cfg.dimension.profile_shift(1.0);
        (
            self.li_r1[k] + cr,
            self.lk_r1[k] + cr,
            self.li_one[k] + c1,
            self.lk_one[k] + c1,
            self.q[k],
        )
    }

    /// ND symbol `λ_n`.
    pub(crate) fn symbol(&self, n: u32) -> Result<f64> {
        let k = n as usize;
        assert!(n <= self.n_max, "mode {n} beyond engine cap {}", self.n_max);
        let cfg = &self.config;
        let cr = cfg.dimension.profile_shift(cfg.r1);
        let c1 = cfg.dimension.profile_shift(1.0);
        let tau = self.target(n);

        // Normalised cross-product form. With A and B the distances of the
        // shell log-derivatives to the target, the q-terms vanish exactly
        // when σ1 = 1 (B = 0 in floating point), which is what makes the
        // reference collapse exact rather than approximate.
        let a = (self.lk_r1[k] + cr) - tau;
        let b = (self.li_r1[k] + cr) - tau;
        let li1 = self.li_one[k] + c1;
        let lk1 = self.lk_one[k] + c1;
        // When the interface mismatch b or the contrast ratio q vanishes,
        // the quotient is exactly 1/li1; taking that branch explicitly (a)
        // avoids the rounding of a/(li1·a) and (b) makes the σ1 = 1 symbol
        // bit-identical to the reference engine's, so difference norms of
        // physically equal operators come out exactly zero.
        if b == 0.0 || self.q[k] == 0.0 {
            return Ok(1.0 / li1);
        }
        let numer = a - self.q[k] * b;
        let denom = li1 * a - self.q[k] * lk1 * b;
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return Err(Error::Degenerate(format!(
                "nd_symbol: denominator degenerate at mode {n} (r1 = {}, sigma1 = {})",
                cfg.r1, cfg.sigma1
            )));
        }
        let lambda = numer / denom;
        if !lambda.is_finite() {
            return Err(Error::Degenerate(format!(
                "nd_symbol: non-finite symbol at mode {n}"
            )));
        }
        Ok(lambda)
    }

    /// Shell reflection coefficient `ρ_n`.
    pub(crate) fn rho(&self, n: u32) -> Result<RhoValue> {
        let k = n as usize;
        let cfg = &self.config;
        let cr = cfg.dimension.profile_shift(cfg.r1);
        let tau = self.target(n);
        let lb_i = self.li_r1[k] + cr;
        let lb_k = self.lk_r1[k] + cr;
        // ρ = [I(r1)/K(r1)] (τ − LbI) / (τ − LbK); the denominator is a sum
        // of strictly positive terms (τ > 0, LbK < 0 for every mode).
        let denom = tau - lb_k;
        if denom.abs() < 1e-300 || !denom.is_finite() {
            return Err(Error::Degenerate(format!(
                "rho: denominator underflow at mode {n}"
            )));
        }
        Ok(RhoValue {
            value: self.i_over_k_r1[k] * (tau - lb_i) / denom,
        })
    }
}

/// Homogeneous-reference symbols computed through the *same* ratio-ladder
/// machinery as [`SymbolEngine`], so that a shell engine at `σ1 = 1`
/// (whose symbol short-circuits to `1/li1` from an identical ladder)
/// produces bit-identical values and difference norms vanish exactly.
struct ReferenceEngine {
    dimension: Dimension,
    n_max: u32,
    li_one: Vec<f64>,
}

impl ReferenceEngine {
    fn new(dimension: Dimension, n_max: u32) -> Result<Self> {
        let half = dimension == Dimension::Three;
        let top = n_max as usize;
        let ri_one = i_ratio_ladder(half, top, 1.0)?;
        let nu = |k: usize| k as f64 + if half { 0.5 } else { 0.0 };
        let li_one = (0..=top).map(|k| nu(k) + ri_one[k]).collect();
        Ok(ReferenceEngine {
            dimension,
            n_max,
            li_one,
        })
    }

    fn symbol(&self, n: u32) -> f64 {
        1.0 / (self.li_one[n as usize] + self.dimension.profile_shift(1.0))
    }
}

/// Mode-cap policy shared by the shell and reference engines inside norm
/// loops: caching an identical cap on both sides keeps their ladders (and
/// hence their `σ1 = 1` symbols) bitwise in sync.
pub(crate) fn engine_cap(n: u32) -> u32 {
    n.max(64).next_power_of_two()
}

/// Cache of one engine, letting norm loops scan modes without rebuilding
/// the ladders at every call.
enum EngineCache {
    Empty,
    Shell(SymbolEngine),
    Reference(ReferenceEngine),
}

impl EngineCache {
    fn new() -> Self {
        EngineCache::Empty
    }

    fn symbol(&mut self, op: &OperatorSpec, n: u32) -> Result<f64> {
        match op {
            OperatorSpec::Shell(config) => {
                let rebuild = match self {
                    EngineCache::Shell(e) => e.config != *config || e.n_max < n,
                    _ => true,
                };
                if rebuild {
                    *self = EngineCache::Shell(SymbolEngine::new(config, engine_cap(n))?);
                }
                match self {
                    EngineCache::Shell(e) => e.symbol(n),
                    _ => unreachable!(),
                }
            }
            OperatorSpec::Reference(dimension) => {
                let rebuild = match self {
                    EngineCache::Reference(e) => e.dimension != *dimension || e.n_max < n,
                    _ => true,
                };
                if rebuild {
                    *self = EngineCache::Reference(ReferenceEngine::new(
                        *dimension,
                        engine_cap(n),
                    )?);
                }
                match self {
                    EngineCache::Reference(e) => Ok(e.symbol(n)),
                    _ => unreachable!(),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Shell reflection coefficient `ρ` for one mode (zero exactly at `σ1 = 1`).
pub fn rho(config: &ShellConfig, mode_n: u32) -> Result<RhoValue> {
    SymbolEngine::new(config, mode_n)?.rho(mode_n)
}

/// ND multiplier symbol `λ_n` for one mode.
pub fn nd_symbol(config: &ShellConfig, mode_n: u32) -> Result<f64> {
    SymbolEngine::new(config, mode_n)?.symbol(mode_n)
}

/// ND symbol of the homogeneous reference disk/ball:
/// `B_I(1)/B'_I(1)` for the dimension's radial profile.
pub fn reference_symbol(dimension: Dimension, mode_n: u32) -> Result<f64> {
    let nu = dimension.order(mode_n).nu();
    let ratio = bessel_ratio_i(dimension.order(mode_n), 1.0)?;
    Ok(1.0 / (nu + ratio + dimension.profile_shift(1.0)))
}

/// Symbol table for modes `0..=n_max`.
pub fn symbol_table(config: &ShellConfig, n_max: u32) -> Result<NdSymbolTable> {
    let engine = SymbolEngine::new(config, n_max)?;
    let mut symbols = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        symbols.push(engine.symbol(n)?);
    }
    Ok(NdSymbolTable {
        dimension: config.dimension,
        n_max,
        symbols,
    })
}

/// Sobolev weight `w_n = (1 + n²)^{1/2}` of the `H^{1/2} ← H^{-1/2}`
/// operator-norm quotient. The 3-D symbol is independent of the azimuthal
/// index, whose weight contribution is maximised at `|m| = n`, so the same
/// per-`n` weight applies in both dimensions.
pub fn sobolev_weight(n: u32) -> f64 {
    (1.0 + (n as f64) * (n as f64)).sqrt()
}

/// Tail certificate: over the last `window` entries, the distance of the
/// weighted sequence to its known limit must be non-increasing — or already
/// down at the rounding floor of the sequence as a whole. Without the floor,
/// a difference of two nearly equal symbols (a few units in the last place)
/// would flicker non-monotonically long after the true tail has decayed.
fn tail_certified(seq: &[f64], limit: f64, window: usize) -> bool {
    if seq.len() < window + 1 {
        return false;
    }
    let global = seq
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max((v - limit).abs()));
    let floor = 1e-12 * global + 1e-14;
    let tail = &seq[seq.len() - window - 1..];
    tail.windows(2).all(|w| {
        let (d0, d1) = ((w[0] - limit).abs(), (w[1] - limit).abs());
        d1 <= d0 + floor || d1 <= floor
    })
}

/// Weighted-sup norm machinery shared by `operator_norm` and
/// `operator_diff_norm`. `limit` is the known large-`n` limit of the
/// weighted sequence: 1 for a single ND map, 0 for a difference.
fn weighted_sup(
    symbol_at: &mut dyn FnMut(u32) -> Result<f64>,
    n_max: u32,
    limit: f64,
) -> Result<NormResult> {
    const TAIL_WINDOW: usize = 10;
    const HARD_CAP: u32 = 512;
    let mut cap = n_max.max(TAIL_WINDOW as u32 + 2);
    loop {
        let mut seq = Vec::with_capacity(cap as usize + 1);
        for n in 0..=cap {
            seq.push(sobolev_weight(n) * symbol_at(n)?);
        }
        if tail_certified(&seq, limit, TAIL_WINDOW) {
            let (argmax, &max) = seq
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .expect("non-empty symbol sequence");
            return Ok(NormResult {
                norm: max.abs().max(limit),
                argmax_mode: argmax as u32,
                n_max_used: cap,
            });
        }
        if cap >= HARD_CAP {
            return Err(Error::Truncation(format!(
                "operator norm tail not decreasing by mode {cap}; \
                 the weighted sequence has not entered its asymptotic regime"
            )));
        }
        cap = (cap * 2).min(HARD_CAP);
    }
}

/// Operator norm `‖R‖ = sup_n w_n |λ_n|` of a single ND map.
///
/// The weighted sequence tends to 1 as `n → ∞`, so the certified result is
/// never below 1; truncation is certified by the tail monotonically
/// approaching that limit, with automatic extension of the mode cap
/// (doubling, hard cap 512) when certification fails at `n_max`.
pub fn operator_norm(op: &OperatorSpec, n_max: u32) -> Result<NormResult> {
    let mut cache = EngineCache::new();
    let op = *op;
    weighted_sup(&mut |n| cache.symbol(&op, n), n_max, 1.0)
}

/// Difference norm `‖R_A − R_B‖ = sup_n w_n |λ_n^A − λ_n^B|`.
///
/// Exact for multiplier operators in a shared basis. The weighted difference
/// sequence tends to 0; certification and extension as in [`operator_norm`].
pub fn operator_diff_norm(a: &OperatorSpec, b: &OperatorSpec, n_max: u32) -> Result<NormResult> {
    if a.dimension() != b.dimension() {
        return Err(Error::Domain(
            "operator_diff_norm: operands live in different dimensions".into(),
        ));
    }
    let mut cache_a = EngineCache::new();
    let mut cache_b = EngineCache::new();
    let (a, b) = (*a, *b);
    weighted_sup(
        &mut |n| Ok(cache_a.symbol(&a, n)? - cache_b.symbol(&b, n)?),
        n_max,
        0.0,
    )
}

/// Sweep the difference norm `‖R_{σ1,r1} − R‖` along one parameter axis.
///
/// `template` supplies the fixed parameters; `points` supplies the swept
/// ones (`σ1` values for [`SweepAxis::Sigma1ToOne`], `r1` values for
/// [`SweepAxis::R1ToZero`]).
pub fn norm_sweep(
    template: &ShellConfig,
    axis: SweepAxis,
    points: &[f64],
    n_max: u32,
) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(points.len());
    for &p in points {
        let config = match axis {
            SweepAxis::Sigma1ToOne => ShellConfig::new(template.dimension, template.r1, p)?,
            SweepAxis::R1ToZero => ShellConfig::new(template.dimension, p, template.sigma1)?,
        };
        let result = operator_diff_norm(
            &OperatorSpec::Shell(config),
            &OperatorSpec::Reference(template.dimension),
            n_max,
        )?;
        rows.push(SweepRow {
            parameter: p,
            norm: result.norm,
            argmax_mode: result.argmax_mode,
        });
    }
    let monotone_decreasing = rows
        .windows(2)
        .all(|w| w[1].norm < w[0].norm || (w[0].norm == 0.0 && w[1].norm == 0.0));
    Ok(SweepTable {
        rows,
        monotone_decreasing,
    })
}

// ---------------------------------------------------------------------------
// Secondary (diagnostic) routes used by the test suite
// ---------------------------------------------------------------------------

/// Direct evaluation of `ρ` from unscaled Bessel pairs — the textbook
/// quotient with no order-telescoping. Only valid where nothing overflows;
/// used to cross-check the production route.
#[cfg(test)]
pub(crate) fn rho_direct(config: &ShellConfig, mode_n: u32) -> Result<f64> {
    let ord = config.dimension.order(mode_n);
    let beta = 1.0 / config.sigma1.sqrt();
    let core_arg = config.r1 * beta;
    let shift = config.dimension.profile_shift(config.r1);

    let core = bessel_pair(ord, core_arg, Scaling::Unscaled)?;
    let shell = bessel_pair(ord, config.r1, Scaling::Unscaled)?;

    // Weighted flux coefficient of the core profile and the profile
    // derivatives of the shell solutions (the 3-D r^{-1/2} factor common to
    // all three profiles at r1 has been cancelled).
    let s = config.sigma1 * (beta * core.i_deriv + shift * core.i_val);
    let bi_d = shell.i_deriv + shift * shell.i_val;
    let bk_d = shell.k_deriv + shift * shell.k_val;

    let numer = s * shell.i_val - core.i_val * bi_d;
    let denom = s * shell.k_val - core.i_val * bk_d;
    if denom.abs() < 1e-300 {
        return Err(Error::Degenerate(format!(
            "rho_direct: denominator underflow at mode {mode_n}"
        )));
    }
    Ok(numer / denom)
}

/// Symbol via the reflection-coefficient route
/// `λ = (ρ B_K(1) − B_I(1)) / (ρ B'_K(1) − B'_I(1))`.
#[cfg(test)]
pub(crate) fn nd_symbol_via_rho(config: &ShellConfig, mode_n: u32) -> Result<f64> {
    let rho = rho_direct(config, mode_n)?;
    let ord = config.dimension.order(mode_n);
    let shift = config.dimension.profile_shift(1.0);
    let outer = bessel_pair(ord, 1.0, Scaling::Unscaled)?;
    let bi = outer.i_val;
    let bk = outer.k_val;
    let bi_d = outer.i_deriv + shift * outer.i_val;
    let bk_d = outer.k_deriv + shift * outer.k_val;
    let denom = rho * bk_d - bi_d;
    if denom.abs() < 1e-300 {
        return Err(Error::Degenerate(format!(
            "nd_symbol_via_rho: Neumann-resonant denominator at mode {mode_n}"
        )));
    }
    Ok((rho * bk - bi) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const DUAL_TOL: f64 = 1e-11;
    const COLLAPSE_TOL: f64 = 1e-13;

    fn cfg(dim: Dimension, r1: f64, sigma1: f64) -> ShellConfig {
        ShellConfig::new(dim, r1, sigma1).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ShellConfig::new(Dimension::Two, 0.0, 1.0).is_err());
        assert!(ShellConfig::new(Dimension::Two, 1.0, 1.0).is_err());
        assert!(ShellConfig::new(Dimension::Two, 0.5, 0.0).is_err());
        assert!(ShellConfig::new(Dimension::Two, 0.5, -2.0).is_err());
        assert!(ShellConfig::new(Dimension::Three, 0.5, 2.0).is_ok());
    }

    #[test]
    fn rho_vanishes_at_unit_coefficient() {
        for dim in [Dimension::Two, Dimension::Three] {
            for &r1 in &[0.1, 0.5, 0.93] {
                for n in [0u32, 1, 3, 17] {
                    let v = rho(&cfg(dim, r1, 1.0), n).unwrap();
                    assert_eq!(v.value, 0.0, "rho at dim {dim}, r1 {r1}, n {n}");
                }
            }
        }
    }

    #[test]
    fn rho_dual_formula_examples() {
        // Production (telescoped) route vs textbook quotient.
        let a = rho(&cfg(Dimension::Two, 0.5, 2.0), 0).unwrap().value;
        let b = rho_direct(&cfg(Dimension::Two, 0.5, 2.0), 0).unwrap();
        assert!((a - b).abs() <= DUAL_TOL * b.abs());

        let a3 = rho(&cfg(Dimension::Three, 0.3, 0.5), 1).unwrap().value;
        let b3 = rho_direct(&cfg(Dimension::Three, 0.3, 0.5), 1).unwrap();
        assert!((a3 - b3).abs() <= DUAL_TOL * b3.abs());
    }

    #[test]
    fn symbol_dual_formula_on_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for trial in 0..500 {
            let dim = if rng.gen_bool(0.5) {
                Dimension::Two
            } else {
                Dimension::Three
            };
            let r1 = rng.gen_range(0.05..0.95);
            let sigma1 = 10f64.powf(rng.gen_range(-1.5..1.5));
            let n = rng.gen_range(0..24u32);
            let config = cfg(dim, r1, sigma1);
            let fast = nd_symbol(&config, n).unwrap();
            let slow = nd_symbol_via_rho(&config, n).unwrap();
            assert!(
                (fast - slow).abs() <= DUAL_TOL * slow.abs(),
                "trial {trial}: dim {dim} r1 {r1} sigma1 {sigma1} n {n}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn unit_coefficient_collapses_to_reference() {
        for dim in [Dimension::Two, Dimension::Three] {
            for &r1 in &[0.17, 0.5, 0.84] {
                let config = cfg(dim, r1, 1.0);
                let engine = SymbolEngine::new(&config, 100).unwrap();
                for n in 0..=100u32 {
                    let lambda = engine.symbol(n).unwrap();
                    let reference = reference_symbol(dim, n).unwrap();
                    assert!(
                        (lambda - reference).abs() <= COLLAPSE_TOL * reference.abs(),
                        "collapse at dim {dim}, r1 {r1}, n {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn trivial_symbol_at_unit_coefficient_mode_one() {
        // σ1 = 1 makes the shell transparent: λ_1 = I_1(1)/I'_1(1).
        let lambda = nd_symbol(&cfg(Dimension::Two, 0.5, 1.0), 1).unwrap();
        let i1 = 0.565_159_103_992_485;
        let i1p = 0.700_906_773_759_523_3;
        assert!((lambda - i1 / i1p).abs() < 1e-13);
    }

    #[test]
    fn reference_symbol_closed_forms() {
        // 2-D, n = 0: I_0(1)/I_1(1).
        let r2 = reference_symbol(Dimension::Two, 0).unwrap();
        assert!((r2 - 1.266_065_877_752_008_3 / 0.565_159_103_992_485).abs() < 1e-13);
        // 3-D, n = 0: profile quotient sinh(1)/(cosh(1) - sinh(1)).
        let r3 = reference_symbol(Dimension::Three, 0).unwrap();
        let want = 1f64.sinh() / (1f64.cosh() - 1f64.sinh());
        assert!((r3 - want).abs() < 1e-13, "{r3} vs {want}");
        // 2-D, n = 40: within 5% of 1/40.
        let r40 = reference_symbol(Dimension::Two, 40).unwrap();
        assert!((r40 - 1.0 / 40.0).abs() < 0.05 / 40.0);
    }

    #[test]
    fn reference_symbol_positive_and_decreasing() {
        for dim in [Dimension::Two, Dimension::Three] {
            let mut prev = f64::INFINITY;
            for n in 0..=80 {
                let v = reference_symbol(dim, n).unwrap();
                assert!(v > 0.0);
                assert!(v < prev, "reference symbol not decreasing at n = {n}");
                prev = v;
            }
        }
    }

    #[test]
    fn weighted_single_operator_sequence_tends_to_one() {
        // The tail certificate relies on w_n λ_n → 1 for a single map.
        for dim in [Dimension::Two, Dimension::Three] {
            let config = cfg(dim, 0.5, 3.0);
            let engine = SymbolEngine::new(&config, 256).unwrap();
            let at = |n: u32| sobolev_weight(n) * engine.symbol(n).unwrap();
            assert!((at(256) - 1.0).abs() < 1e-2);
            assert!((at(256) - 1.0).abs() < (at(64) - 1.0).abs());
        }
    }

    #[test]
    fn core_target_monotone_in_sigma() {
        // Verbatim invariant: σ1 ↦ σ1 I'_ν(r1/√σ1)/I_ν(r1/√σ1) strictly
        // increasing (and the engine's physical target likewise).
        for dim in [Dimension::Two, Dimension::Three] {
            for n in [0u32, 1, 2, 5] {
                for &r1 in &[0.2, 0.5, 0.8] {
                    let mut prev_f = -f64::INFINITY;
                    let mut prev_t = -f64::INFINITY;
                    let mut sigma = 0.1;
                    while sigma <= 10.0 + 1e-9 {
                        let config = cfg(dim, r1, sigma);
                        let engine = SymbolEngine::new(&config, n).unwrap();
                        let f_verbatim = sigma * engine.li_core[n as usize];
                        let target = engine.target(n);
                        assert!(f_verbatim > prev_f, "F not increasing at σ1 = {sigma}");
                        assert!(target > prev_t, "target not increasing at σ1 = {sigma}");
                        prev_f = f_verbatim;
                        prev_t = target;
                        sigma += 0.3;
                    }
                }
            }
        }
    }

    #[test]
    fn diff_norm_zero_at_unit_coefficient() {
        for dim in [Dimension::Two, Dimension::Three] {
            let result = operator_diff_norm(
                &OperatorSpec::Shell(cfg(dim, 0.4, 1.0)),
                &OperatorSpec::Reference(dim),
                64,
            )
            .unwrap();
            assert_eq!(result.norm, 0.0);
        }
    }

    #[test]
    fn diff_norm_decreases_as_sigma_approaches_one() {
        let sigmas = [1.5, 1.25, 1.125, 1.0625];
        let mut prev = f64::INFINITY;
        for &s in &sigmas {
            let r = operator_diff_norm(
                &OperatorSpec::Shell(cfg(Dimension::Two, 0.5, s)),
                &OperatorSpec::Reference(Dimension::Two),
                64,
            )
            .unwrap();
            assert!(r.norm < prev, "norm not decreasing at sigma1 = {s}");
            prev = r.norm;
        }
    }

    #[test]
    fn diff_norm_decreases_as_core_shrinks() {
        let radii = [0.4, 0.2, 0.1, 0.05];
        let mut prev = f64::INFINITY;
        for &r1 in &radii {
            let r = operator_diff_norm(
                &OperatorSpec::Shell(cfg(Dimension::Two, r1, 4.0)),
                &OperatorSpec::Reference(Dimension::Two),
                64,
            )
            .unwrap();
            assert!(r.norm < prev, "norm not decreasing at r1 = {r1}");
            prev = r.norm;
        }
    }

    #[test]
    fn tail_decay_of_weighted_difference() {
        // The weighted difference to the reference decays geometrically
        // (like r1^{2n}) until it hits the rounding floor of the symbols
        // themselves. Demand strict decrease over the whole resolvable
        // range and that the range is substantial.
        for dim in [Dimension::Two, Dimension::Three] {
            let config = cfg(dim, 0.6, 2.5);
            let engine = SymbolEngine::new(&config, 64).unwrap();
            let diffs: Vec<f64> = (0..=64u32)
                .map(|n| {
                    sobolev_weight(n)
                        * (engine.symbol(n).unwrap() - reference_symbol(dim, n).unwrap()).abs()
                })
                .collect();
            let peak = diffs.iter().cloned().fold(0.0_f64, f64::max);
            let argmax = diffs.iter().position(|&d| d == peak).unwrap();
            let floor = 1e-11 * peak;
            let mut strict_steps = 0;
            for n in argmax..64 {
                if diffs[n + 1] <= floor {
                    break;
                }
                assert!(
                    diffs[n + 1] < diffs[n],
                    "weighted difference tail not decreasing at n = {} (dim {dim})",
                    n + 1
                );
                strict_steps += 1;
            }
            assert!(
                strict_steps >= 10,
                "resolvable decay range too short (dim {dim}): {strict_steps} steps"
            );
        }
    }

    #[test]
    fn norm_sweep_single_unit_point_is_exactly_zero() {
        let table = norm_sweep(
            &cfg(Dimension::Two, 0.5, 2.0),
            SweepAxis::Sigma1ToOne,
            &[1.0],
            64,
        )
        .unwrap();
        assert_eq!(table.rows[0].norm, 0.0);
    }

    #[test]
    fn norm_sweep_decays_from_both_sides() {
        let above = norm_sweep(
            &cfg(Dimension::Two, 0.5, 2.0),
            SweepAxis::Sigma1ToOne,
            &[2.0, 1.5, 1.25, 1.125],
            64,
        )
        .unwrap();
        assert!(above.monotone_decreasing);
        let below = norm_sweep(
            &cfg(Dimension::Two, 0.5, 2.0),
            SweepAxis::Sigma1ToOne,
            &[0.5, 0.75, 0.875, 0.9375],
            64,
        )
        .unwrap();
        assert!(below.monotone_decreasing);
        let radial = norm_sweep(
            &cfg(Dimension::Three, 0.5, 3.0),
            SweepAxis::R1ToZero,
            &[0.4, 0.2, 0.1, 0.05],
            64,
        )
        .unwrap();
        assert!(radial.monotone_decreasing);
    }

    #[test]
    fn sweep_csv_shape() {
        let table = norm_sweep(
            &cfg(Dimension::Two, 0.5, 2.0),
            SweepAxis::Sigma1ToOne,
            &[2.0, 1.5],
            64,
        )
        .unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("parameter,norm,argmax_mode"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("2.0000000000000000e0,"));
        assert_eq!(first.split(',').count(), 3);
    }

    #[test]
    fn symbol_table_csv_shape() {
        let table = symbol_table(&cfg(Dimension::Two, 0.5, 2.0), 2).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,lambda"));
        for (n, line) in lines.enumerate() {
            let (head, value) = line.split_once(',').unwrap();
            assert_eq!(head, n.to_string());
            assert_eq!(value.parse::<f64>().unwrap(), table.symbols[n]);
        }
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn symbols_stay_finite_at_high_order() {
        // Far beyond where raw Bessel values overflow: the engine's ratio
        // arithmetic must keep producing finite symbols near the reference.
        for dim in [Dimension::Two, Dimension::Three] {
            let config = cfg(dim, 0.35, 7.0);
            let lambda = nd_symbol(&config, 512).unwrap();
            let reference = reference_symbol(dim, 512).unwrap();
            assert!(lambda.is_finite());
            assert!((lambda - reference).abs() < 1e-3 * reference.abs());
        }
    }

    #[test]
    fn symbol_table_matches_per_mode_calls() {
        let config = cfg(Dimension::Three, 0.45, 0.3);
        let table = symbol_table(&config, 32).unwrap();
        assert_eq!(table.symbols.len(), 33);
        for (n, &lambda) in table.symbols.iter().enumerate() {
            assert!(lambda.is_finite());
            let single = nd_symbol(&config, n as u32).unwrap();
            assert_eq!(lambda, single, "table/per-mode mismatch at n = {n}");
        }
    }

    #[test]
    fn extreme_sigma_sweep_endpoints_stay_finite() {
        for &sigma in &[1e-6, 1e6] {
            let config = cfg(Dimension::Two, 0.5, sigma);
            let lambda = nd_symbol(&config, 3).unwrap();
            assert!(lambda.is_finite() && lambda > 0.0);
        }
    }
}
