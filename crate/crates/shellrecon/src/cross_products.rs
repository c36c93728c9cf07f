//! Cross-products of modified Bessel functions.
//!
//! The combination `D(x, y) = I_nu(x) K_nu(y) - K_nu(x) I_nu(y)` and its
//! argument derivatives are the currency of every spectral formula in this
//! crate: the Neumann-to-Dirichlet symbols, the Möbius inversion used for
//! recovery, and the indistinguishability determinant are all built from
//! them. Computing `D` naively at large order or argument loses everything
//! to overflow, so the assembly here works from exponentially scaled values
//! and attaches the factor `e^{±(x-y)}`, which is harmless whenever the two
//! arguments are within a few hundred of each other.
//!
//! The five classical algebraic identities these quantities satisfy (two
//! Wronskian normalisations and three Plücker-style three-point relations)
//! double as the module's test oracle: [`check_identities`] evaluates all of
//! them at arbitrary triples and reports relative residuals.

use crate::error::{Error, Result};
use crate::special_fn::{bessel_pair, BesselPair, Order, Scaling};

/// `D(x,y)` and its first-order argument derivatives at one order.
///
/// Subscripts count derivatives in each slot: `d10 = ∂D/∂x`, `d01 = ∂D/∂y`,
/// `d11 = ∂²D/∂x∂y`.
#[derive(Debug, Clone, Copy)]
pub struct CrossProductValues {
    /// Order of the underlying Bessel functions.
    pub order: Order,
    /// First argument.
    pub x: f64,
    /// Second argument.
    pub y: f64,
    /// `I(x) K(y) - K(x) I(y)`.
    pub d: f64,
    /// `I'(x) K(y) - K'(x) I(y)`.
    pub d10: f64,
    /// `I(x) K'(y) - K(x) I'(y)`.
    pub d01: f64,
    /// `I'(x) K'(y) - K'(x) I'(y)`.
    pub d11: f64,
}

/// Assemble the four cross-products from two scaled pairs.
pub(crate) fn cross_products_from_pairs(px: &BesselPair, py: &BesselPair) -> Result<CrossProductValues> {
    debug_assert_eq!(px.scaling, Scaling::ExpScaled);
    debug_assert_eq!(py.scaling, Scaling::ExpScaled);
    let (x, y) = (px.x, py.x);
    // D = e^{x-y} [e^{-x} I(x)][e^{y} K(y)] - e^{y-x} [e^{x} K(x)][e^{-y} I(y)].
    let e_xy = (x - y).exp();
    let e_yx = (y - x).exp();
    if !e_xy.is_finite() || !e_yx.is_finite() {
        return Err(Error::Overflow(format!(
            "cross_products: arguments too far apart (x = {x}, y = {y}) for \
             the scaled assembly"
        )));
    }
    let d = e_xy * (px.i_val * py.k_val) - e_yx * (px.k_val * py.i_val);
    let d10 = e_xy * (px.i_deriv * py.k_val) - e_yx * (px.k_deriv * py.i_val);
    let d01 = e_xy * (px.i_val * py.k_deriv) - e_yx * (px.k_val * py.i_deriv);
    let d11 = e_xy * (px.i_deriv * py.k_deriv) - e_yx * (px.k_deriv * py.i_deriv);
    if !d.is_finite() || !d10.is_finite() || !d01.is_finite() || !d11.is_finite() {
        return Err(Error::Overflow(format!(
            "cross_products: product exceeds the f64 range at nu = {}, x = {x}, y = {y}",
            px.order
        )));
    }
    Ok(CrossProductValues {
        order: px.order,
        x,
        y,
        d,
        d10,
        d01,
        d11,
    })
}

/// Evaluate `D`, `D_{1,0}`, `D_{0,1}`, `D_{1,1}` at `(x, y)`.
pub fn cross_products(order: Order, x: f64, y: f64) -> Result<CrossProductValues> {
    let px = bessel_pair(order, x, Scaling::ExpScaled)?;
    let py = bessel_pair(order, y, Scaling::ExpScaled)?;
    cross_products_from_pairs(&px, &py)
}

/// Relative residuals of the five cross-product identities at one triple.
///
/// Residuals are normalised by the largest term participating in each
/// identity, so a report value of `1e-14` means fourteen digits of
/// agreement regardless of the absolute scale of the products involved.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// `x D_{1,0}(x,x) = 1`.
    pub wronskian: f64,
    /// `D_{0,1}(x,y) = -D_{1,0}(y,x)`.
    pub transpose: f64,
    /// `D(x,y) D_{1,0}(x,z) - D(x,z) D_{1,0}(x,y) = D(z,y)/x`.
    pub three_point_d: f64,
    /// `D(x,y) D_{1,1}(x,z) - D_{0,1}(x,z) D_{1,0}(x,y) = D_{1,0}(z,y)/x`.
    pub three_point_d10: f64,
    /// `D_{1,1}(x,y) D_{0,1}(x,z) - D_{0,1}(x,y) D_{1,1}(x,z) = -D_{1,1}(z,y)/x`.
    pub three_point_d11: f64,
    /// `D(x,y) = -D(y,x)` and `D_{1,1}(x,y) = -D_{1,1}(y,x)`.
    pub antisymmetry: f64,
}

impl IdentityReport {
    /// Largest of the five identity residuals (antisymmetry excluded, which
    /// has its own, tighter, certificate).
    pub fn max_residual(&self) -> f64 {
        self.wronskian
            .max(self.transpose)
            .max(self.three_point_d)
            .max(self.three_point_d10)
            .max(self.three_point_d11)
    }
}

fn rel_residual(lhs: f64, rhs: f64, scale_terms: &[f64]) -> f64 {
    let scale = scale_terms
        .iter()
        .fold(f64::MIN_POSITIVE, |acc, t| acc.max(t.abs()));
    (lhs - rhs).abs() / scale
}

/// Check all five identities (and antisymmetry) at the triple `(x, y, z)`.
pub fn check_identities(order: Order, x: f64, y: f64, z: f64) -> Result<IdentityReport> {
    let px = bessel_pair(order, x, Scaling::ExpScaled)?;
    let py = bessel_pair(order, y, Scaling::ExpScaled)?;
    let pz = bessel_pair(order, z, Scaling::ExpScaled)?;

    let dxx = cross_products_from_pairs(&px, &px)?;
    let dxy = cross_products_from_pairs(&px, &py)?;
    let dxz = cross_products_from_pairs(&px, &pz)?;
    let dzy = cross_products_from_pairs(&pz, &py)?;
    let dyx = cross_products_from_pairs(&py, &px)?;

    let wronskian = (x * dxx.d10 - 1.0).abs();

    let transpose = rel_residual(dxy.d01, -dyx.d10, &[dxy.d01, dyx.d10]);

    let lhs3 = dxy.d * dxz.d10 - dxz.d * dxy.d10;
    let rhs3 = dzy.d / x;
    let three_point_d = rel_residual(lhs3, rhs3, &[dxy.d * dxz.d10, dxz.d * dxy.d10, rhs3]);

    let lhs4 = dxy.d * dxz.d11 - dxz.d01 * dxy.d10;
    let rhs4 = dzy.d10 / x;
    let three_point_d10 = rel_residual(lhs4, rhs4, &[dxy.d * dxz.d11, dxz.d01 * dxy.d10, rhs4]);

    let lhs5 = dxy.d11 * dxz.d01 - dxy.d01 * dxz.d11;
    let rhs5 = -dzy.d11 / x;
    let three_point_d11 = rel_residual(lhs5, rhs5, &[dxy.d11 * dxz.d01, dxy.d01 * dxz.d11, rhs5]);

    let anti_d = rel_residual(dxy.d, -dyx.d, &[dxy.d, dyx.d]);
    let anti_d11 = rel_residual(dxy.d11, -dyx.d11, &[dxy.d11, dyx.d11]);
    let antisymmetry = anti_d.max(anti_d11);

    Ok(IdentityReport {
        wronskian,
        transpose,
        three_point_d,
        three_point_d10,
        three_point_d11,
        antisymmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY_TOL: f64 = 1e-11;
    const ANTISYM_TOL: f64 = 1e-13;

    #[test]
    fn definition_matches_direct_products_at_moderate_arguments() {
        // Where nothing overflows, the scaled assembly must agree with the
        // textbook definition evaluated from unscaled values.
        for &(ord, x, y) in &[
            (Order::Integer(0), 1.0, 0.5),
            (Order::Integer(3), 0.8, 1.7),
            (Order::HalfInteger(2), 2.0, 0.3),
        ] {
            let v = cross_products(ord, x, y).unwrap();
            let px = bessel_pair(ord, x, Scaling::Unscaled).unwrap();
            let py = bessel_pair(ord, y, Scaling::Unscaled).unwrap();
            let d = px.i_val * py.k_val - px.k_val * py.i_val;
            let d11 = px.i_deriv * py.k_deriv - px.k_deriv * py.i_deriv;
            assert!((v.d - d).abs() <= 1e-12 * d.abs().max(1e-300));
            assert!((v.d11 - d11).abs() <= 1e-12 * d11.abs().max(1e-300));
        }
    }

    #[test]
    fn same_point_values_vanish_or_hit_wronskian() {
        for &ord in &[Order::Integer(0), Order::Integer(11), Order::HalfInteger(4)] {
            for &x in &[0.05, 0.7, 4.0, 29.0] {
                let v = cross_products(ord, x, x).unwrap();
                // D(x,x) = 0 and D11(x,x) = 0 exactly (identical products
                // cancel); D10(x,x) = 1/x, D01(x,x) = -1/x.
                assert_eq!(v.d, 0.0);
                assert_eq!(v.d11, 0.0);
                assert!((x * v.d10 - 1.0).abs() < 1e-12);
                assert!((x * v.d01 + 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identities_on_a_fixed_grid() {
        let triples = [
            (0.3, 0.9, 0.5),
            (1.0, 2.0, 0.25),
            (5.0, 0.1, 2.0),
            (10.0, 12.0, 11.0),
            (0.02, 0.05, 0.04),
        ];
        for n in [0u32, 1, 2, 7, 20] {
            for &ord in &[Order::Integer(n), Order::HalfInteger(n)] {
                for &(x, y, z) in &triples {
                    let report = check_identities(ord, x, y, z).unwrap();
                    assert!(
                        report.max_residual() < IDENTITY_TOL,
                        "identities at nu = {ord}, triple ({x}, {y}, {z}): {report:?}"
                    );
                    assert!(report.antisymmetry < ANTISYM_TOL);
                }
            }
        }
    }

    #[test]
    fn identities_hold_at_large_arguments_via_scaling() {
        // x, y, z well beyond where unscaled I/K overflow in products.
        let report = check_identities(Order::Integer(2), 300.0, 310.0, 305.0).unwrap();
        assert!(report.max_residual() < IDENTITY_TOL);
    }

    #[test]
    fn far_separated_arguments_error_instead_of_overflowing() {
        let err = cross_products(Order::Integer(0), 1.0, 1000.0).unwrap_err();
        assert!(matches!(err, Error::Overflow(_)));
    }
}
