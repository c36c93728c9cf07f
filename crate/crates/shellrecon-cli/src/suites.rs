//! Numerical verification suites behind the `verify` subcommand.
//!
//! Each suite re-derives a mathematical guarantee of the library on an
//! explicit grid and reports the worst observed value against its limit:
//!
//! * `cross-products` — the five cross-product identities on random
//!   order/argument triples;
//! * `wronskian` — the scaled Wronskian defect and analytic-versus-central
//!   derivative agreement;
//! * `monotonicity` — the Bessel-ratio lower bound and strict growth of the
//!   recovery map, the property that makes one-measurement recovery well
//!   defined;
//! * `oracle` — agreement between the finite-difference oracle and the
//!   Bessel-series symbols, plus the oracle's convergence order.
//!
//! Work items are evaluated in parallel across threads (capped by the
//! `SHELLRECON_THREADS` environment variable), but every grid is generated
//! and reported in canonical order, so output is deterministic.

use crate::args::SuiteName;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shellrecon::cross_products::check_identities;
use shellrecon::inverse::recovery_map;
use shellrecon::nd_map::nd_symbol;
use shellrecon::oracle::{convergence_study, solve_radial_bvp, RadialProblem};
use shellrecon::special_fn::{bessel_i, bessel_k, bessel_pair, bessel_ratio_i, Order, Scaling};
use shellrecon::{Dimension, ShellConfig};

/// Grid depth of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    /// Reduced grids; finishes in seconds.
    Quick,
    /// The full grids.
    Full,
}

/// One pass/fail line of a suite: a check family with its worst observed
/// value and the bound that value must satisfy.
#[derive(Debug, Clone)]
pub struct CheckGroup {
    /// Name of the check family.
    pub label: &'static str,
    /// Number of individual checks evaluated.
    pub checks: u64,
    /// Worst observed value (largest residual, or smallest margin).
    pub worst: f64,
    /// Human-readable bound, e.g. `<= 1e-11` or `> 0`.
    pub bound: &'static str,
    /// Whether `worst` satisfies the bound.
    pub passed: bool,
}

/// Everything one suite produced.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    /// Suite name as printed in the table.
    pub name: &'static str,
    /// Check families, in canonical order.
    pub groups: Vec<CheckGroup>,
    /// Unexpected evaluation errors; any entry fails the suite.
    pub errors: Vec<String>,
}

impl SuiteOutcome {
    /// A suite passes when every group passed and nothing errored.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.groups.iter().all(|g| g.passed)
    }
}

/// Parallelism cap: `SHELLRECON_THREADS` when set to a positive integer,
/// otherwise the machine's available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("SHELLRECON_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Map `f` over `items` on up to [`thread_cap`] threads, returning results
/// in item order regardless of scheduling.
pub fn parallel_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let n = items.len();
    let cap = thread_cap().clamp(1, n.max(1));
    if cap <= 1 || n <= 1 {
        return items.iter().map(|t| f(t)).collect();
    }
    let chunk = (n + cap - 1) / cap;
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|slice| scope.spawn(move || slice.iter().map(f).collect::<Vec<U>>()))
            .collect();
        // Chunks are consecutive and handles are joined in spawn order, so
        // the concatenation restores the original item order.
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("verification worker panicked"))
            .collect()
    })
}

/// Run one suite at the given depth. `seed` feeds the randomized suites.
pub fn run_suite(name: SuiteName, depth: Depth, seed: u64) -> SuiteOutcome {
    match name {
        SuiteName::CrossProducts => suite_cross_products(depth, seed),
        SuiteName::Wronskian => suite_wronskian(depth),
        SuiteName::Monotonicity => suite_monotonicity(depth),
        SuiteName::Oracle => suite_oracle(depth),
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

/// Log-spaced grid of `count` points from `lo` to `hi` inclusive.
fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

// ---------------------------------------------------------------------------
// cross-products
// ---------------------------------------------------------------------------

const IDENTITY_LIMIT: f64 = 1e-11;

fn suite_cross_products(depth: Depth, seed: u64) -> SuiteOutcome {
    let per_class = match depth {
        Depth::Quick => 100usize,
        Depth::Full => 1000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items: Vec<(Order, f64, f64, f64)> = Vec::with_capacity(2 * per_class);
    for half in [false, true] {
        for _ in 0..per_class {
            let k = rng.gen_range(0..=20u32);
            let order = if half {
                Order::HalfInteger(k)
            } else {
                Order::Integer(k)
            };
            let x = log_uniform(&mut rng, 1e-2, 2e2);
            let y = log_uniform(&mut rng, 1e-2, 2e2);
            let z = log_uniform(&mut rng, 1e-2, 2e2);
            items.push((order, x, y, z));
        }
    }

    let results = parallel_map(&items, |&(order, x, y, z)| {
        check_identities(order, x, y, z)
            .map(|report| report.max_residual())
            .map_err(|e| format!("identities at nu = {}, ({x}, {y}, {z}): {e}", order.nu()))
    });

    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for result in results {
        match result {
            Ok(residual) => worst = worst.max(residual),
            Err(e) => errors.push(e),
        }
    }
    SuiteOutcome {
        name: "cross-products",
        groups: vec![CheckGroup {
            label: "identity-residual",
            checks: (items.len() * 5) as u64,
            worst,
            bound: "<= 1e-11",
            passed: worst <= IDENTITY_LIMIT,
        }],
        errors,
    }
}

// ---------------------------------------------------------------------------
// wronskian
// ---------------------------------------------------------------------------

const WRONSKIAN_LIMIT: f64 = 1e-12;
const DERIVATIVE_LIMIT: f64 = 1e-6;

fn wronskian_orders() -> Vec<Order> {
    vec![
        Order::Integer(0),
        Order::Integer(1),
        Order::Integer(2),
        Order::Integer(5),
        Order::Integer(10),
        Order::Integer(20),
        Order::HalfInteger(0),
        Order::HalfInteger(5),
        Order::HalfInteger(10),
        Order::HalfInteger(20),
    ]
}

fn suite_wronskian(depth: Depth) -> SuiteOutcome {
    let grid_points = match depth {
        Depth::Quick => 400usize,
        Depth::Full => 4000,
    };
    let orders = wronskian_orders();
    let xs = log_grid(1e-3, 50.0, grid_points);

    // Scaled Wronskian defect |x (I K' - I' K) + 1|; the exponential factors
    // of the scaled pair cancel exactly in the products.
    let mut wr_items: Vec<(Order, f64)> = Vec::with_capacity(orders.len() * xs.len());
    for &order in &orders {
        for &x in &xs {
            wr_items.push((order, x));
        }
    }
    let wr_results = parallel_map(&wr_items, |&(order, x)| {
        bessel_pair(order, x, Scaling::ExpScaled)
            .map(|p| (x * (p.i_val * p.k_deriv - p.i_deriv * p.k_val) + 1.0).abs())
            .map_err(|e| format!("wronskian at nu = {}, x = {x}: {e}", order.nu()))
    });

    // Analytic derivatives against central differences. The step scales
    // with the local variation length x/max(1, nu), and the residual with
    // the natural derivative scale max(|f'|, |f|/x), which keeps both the
    // truncation and the cancellation error of the difference quotient far
    // below the limit over the whole grid.
    let deriv_xs = [1e-3, 1e-2, 0.1, 1.0, 5.0, 20.0, 50.0];
    let mut dv_items: Vec<(Order, f64, bool)> = Vec::new();
    for &order in &orders {
        for &x in &deriv_xs {
            dv_items.push((order, x, false));
            dv_items.push((order, x, true));
        }
    }
    let dv_results = parallel_map(&dv_items, |&(order, x, second_kind)| {
        let h = 1e-5 * x / order.nu().max(1.0);
        let eval = |x: f64| {
            if second_kind {
                bessel_k(order, x)
            } else {
                bessel_i(order, x)
            }
        };
        let run = || -> shellrecon::Result<f64> {
            let pair = bessel_pair(order, x, Scaling::Unscaled)?;
            let (value, analytic) = if second_kind {
                (pair.k_val, pair.k_deriv)
            } else {
                (pair.i_val, pair.i_deriv)
            };
            let central = (eval(x + h)? - eval(x - h)?) / (2.0 * h);
            let scale = analytic.abs().max(value.abs() / x);
            Ok((analytic - central).abs() / scale)
        };
        run().map_err(|e| {
            let name = if second_kind { "K" } else { "I" };
            format!("derivative of {name} at nu = {}, x = {x}: {e}", order.nu())
        })
    });

    let mut worst_wr = 0.0f64;
    let mut worst_dv = 0.0f64;
    let mut errors = Vec::new();
    for r in wr_results {
        match r {
            Ok(v) => worst_wr = worst_wr.max(v),
            Err(e) => errors.push(e),
        }
    }
    for r in dv_results {
        match r {
            Ok(v) => worst_dv = worst_dv.max(v),
            Err(e) => errors.push(e),
        }
    }
    SuiteOutcome {
        name: "wronskian",
        groups: vec![
            CheckGroup {
                label: "scaled-wronskian",
                checks: wr_items.len() as u64,
                worst: worst_wr,
                bound: "<= 1e-12",
                passed: worst_wr <= WRONSKIAN_LIMIT,
            },
            CheckGroup {
                label: "derivative-vs-central",
                checks: dv_items.len() as u64,
                worst: worst_dv,
                bound: "<= 1e-6",
                passed: worst_dv <= DERIVATIVE_LIMIT,
            },
        ],
        errors,
    }
}

// ---------------------------------------------------------------------------
// monotonicity
// ---------------------------------------------------------------------------

fn suite_monotonicity(depth: Depth) -> SuiteOutcome {
    let mut errors = Vec::new();

    // Ratio lower bound I_{nu+1}/I_nu > x / (lambda + sqrt(lambda^2 + x^2))
    // with lambda = nu + 1 + (alpha - 1)/2, on its stated grid. The grid is
    // fixed; quick and full runs are identical here.
    let xs = [0.01, 0.1, 1.0, 5.0, 20.0];
    let alphas = [1.0, 2.0, 3.0];
    let mut lb_items: Vec<(Order, f64, f64)> = Vec::new();
    for k in 0..=20u32 {
        for order in [Order::Integer(k), Order::HalfInteger(k)] {
            for &x in &xs {
                for &alpha in &alphas {
                    lb_items.push((order, x, alpha));
                }
            }
        }
    }
    let lb_results = parallel_map(&lb_items, |&(order, x, alpha)| {
        let lambda = order.nu() + 1.0 + 0.5 * (alpha - 1.0);
        bessel_ratio_i(order, x)
            .map(|ratio| ratio - x / (lambda + lambda.hypot(x)))
            .map_err(|e| format!("ratio at nu = {}, x = {x}: {e}", order.nu()))
    });
    let mut lb_worst = f64::INFINITY;
    for r in lb_results {
        match r {
            Ok(margin) => lb_worst = lb_worst.min(margin),
            Err(e) => errors.push(e),
        }
    }

    // Strict growth of the recovery map G on a 200-point log grid of
    // eta in [1e-3, 1e3], per (dimension, degree, interface radius).
    let degrees: Vec<u32> = match depth {
        Depth::Quick => vec![0, 1, 4, 10],
        Depth::Full => (0..=10).collect(),
    };
    let radii = [0.1, 0.5, 0.9];
    let etas = log_grid(1e-3, 1e3, 200);
    let mut chains: Vec<(Dimension, u32, f64)> = Vec::new();
    for dim in [Dimension::Two, Dimension::Three] {
        for &n in &degrees {
            for &r in &radii {
                chains.push((dim, n, r));
            }
        }
    }
    let chain_results = parallel_map(&chains, |&(dim, n, r)| -> Result<f64, String> {
        let mut min_increment = f64::INFINITY;
        let mut prev = f64::NEG_INFINITY;
        for &eta in &etas {
            let val = recovery_map(dim, n, r, eta)
                .map_err(|e| format!("recovery map at {dim}, n = {n}, r = {r}: {e}"))?;
            if prev > f64::NEG_INFINITY {
                min_increment = min_increment.min(val - prev);
            }
            prev = val;
        }
        Ok(min_increment)
    });
    let mut mono_worst = f64::INFINITY;
    for r in chain_results {
        match r {
            Ok(inc) => mono_worst = mono_worst.min(inc),
            Err(e) => errors.push(e),
        }
    }

    SuiteOutcome {
        name: "monotonicity",
        groups: vec![
            CheckGroup {
                label: "ratio-lower-bound",
                checks: lb_items.len() as u64,
                worst: lb_worst,
                bound: "> 0",
                passed: lb_worst > 0.0,
            },
            CheckGroup {
                label: "recovery-map-increasing",
                checks: (chains.len() * (etas.len() - 1)) as u64,
                worst: mono_worst,
                bound: "> 0",
                passed: mono_worst > 0.0,
            },
        ],
        errors,
    }
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

const ORACLE_AGREEMENT_LIMIT: f64 = 1e-5;
const ORACLE_GRID_POINTS: u32 = 4000;
const ORDER_DEVIATION_LIMIT: f64 = 0.2;

fn suite_oracle(depth: Depth) -> SuiteOutcome {
    let mut errors = Vec::new();

    let (radii, sigmas, degrees): (Vec<f64>, Vec<f64>, Vec<u32>) = match depth {
        Depth::Quick => (vec![0.4], vec![0.25, 4.0], vec![0, 1, 5]),
        Depth::Full => (
            vec![0.2, 0.4, 0.6, 0.8],
            vec![0.25, 1.0, 4.0],
            (0..=8).collect(),
        ),
    };
    let mut items: Vec<(Dimension, f64, f64, u32)> = Vec::new();
    for dim in [Dimension::Two, Dimension::Three] {
        for &r1 in &radii {
            for &sigma in &sigmas {
                for &n in &degrees {
                    items.push((dim, r1, sigma, n));
                }
            }
        }
    }
    let results = parallel_map(&items, |&(dim, r1, sigma, n)| -> Result<f64, String> {
        let context = |e: &dyn std::fmt::Display| {
            format!("oracle at {dim}, r1 = {r1}, sigma1 = {sigma}, n = {n}: {e}")
        };
        let config = ShellConfig::new(dim, r1, sigma).map_err(|e| context(&e))?;
        let problem =
            RadialProblem::new(config, n, ORACLE_GRID_POINTS).map_err(|e| context(&e))?;
        let solution = solve_radial_bvp(&problem).map_err(|e| context(&e))?;
        // The oracle solves the problem with the interface snapped onto its
        // grid, so the series symbol is evaluated at the snapped radius.
        let snapped =
            ShellConfig::new(dim, problem.snapped_r1, sigma).map_err(|e| context(&e))?;
        let reference = nd_symbol(&snapped, n).map_err(|e| context(&e))?;
        Ok((solution.symbol_estimate - reference).abs())
    });
    let mut agree_worst = 0.0f64;
    for r in results {
        match r {
            Ok(diff) => agree_worst = agree_worst.max(diff),
            Err(e) => errors.push(e),
        }
    }

    // Convergence order under grid doubling, on configurations whose error
    // curve is safely inside the asymptotic second-order regime.
    let order_cases: Vec<(Dimension, f64, f64, u32)> = match depth {
        Depth::Quick => vec![(Dimension::Two, 0.5, 2.0, 0)],
        Depth::Full => vec![
            (Dimension::Two, 0.5, 2.0, 0),
            (Dimension::Three, 0.3, 0.5, 2),
            (Dimension::Two, 0.5, 1.0, 1),
            (Dimension::Two, 0.4, 4.0, 3),
        ],
    };
    let order_results = parallel_map(&order_cases, |&(dim, r1, sigma, n)| {
        let run = || -> shellrecon::Result<f64> {
            let config = ShellConfig::new(dim, r1, sigma)?;
            let table = convergence_study(&config, n, &[1000, 2000, 4000])?;
            let last = table
                .rows
                .last()
                .and_then(|row| row.observed_order)
                .expect("study with three grids reports an order");
            Ok((last - 2.0).abs())
        };
        run().map_err(|e| format!("convergence at {dim}, r1 = {r1}, sigma1 = {sigma}, n = {n}: {e}"))
    });
    let mut order_worst = 0.0f64;
    for r in order_results {
        match r {
            Ok(dev) => order_worst = order_worst.max(dev),
            Err(e) => errors.push(e),
        }
    }

    SuiteOutcome {
        name: "oracle",
        groups: vec![
            CheckGroup {
                label: "fd-vs-series",
                checks: items.len() as u64,
                worst: agree_worst,
                bound: "<= 1e-5",
                passed: agree_worst <= ORACLE_AGREEMENT_LIMIT,
            },
            CheckGroup {
                label: "convergence-order",
                checks: order_cases.len() as u64,
                worst: order_worst,
                bound: "<= 0.2",
                passed: order_worst <= ORDER_DEVIATION_LIMIT,
            },
        ],
        errors,
    }
}
