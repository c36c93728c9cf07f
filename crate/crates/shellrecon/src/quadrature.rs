//! Gauss-Legendre quadrature nodes and weights.
//!
//! Used by the spherical-harmonic projections in the forward module: the
//! polar integrals there have polynomial integrands (products of associated
//! Legendre functions with the `(1 - mu^2)^{|m|}` factor folded in), so an
//! `n`-point rule is exact once `n` exceeds the polynomial degree budget.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
/// iteration from the Chebyshev-like initial guess; weights follow from the
/// derivative at each root. Accurate to a few ulps for any practical `n`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre: need at least one node");
    let mut nodes = vec![0.0_f64; n];
    let mut weights = vec![0.0_f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_{n-1} by the three-term recurrence.
            let mut p0 = 1.0_f64;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p;
            }
            let (pn, pn_minus) = (p1, p0);
            dp = n as f64 * (x * pn - pn_minus) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
