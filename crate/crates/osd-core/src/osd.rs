use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::algebraic::{AlgebraicReal, FieldCtx, FieldElement, IntPoly, RatPoly};
use crate::error::OsdError;
use crate::spectral::SpectralReport;

/// Orbit separation dimension of a system, either an exact value or bounds,
/// together with the discrepancy Lyapunov data.
#[derive(Debug, Clone, Serialize)]
pub struct OsdResult {
    pub pure_point: bool,
    pub exact: bool,
    pub value: Option<f64>,
    pub bounds: Option<(f64, f64)>,
    pub lyapunov_max: f64,
    pub lyapunov_min_lower_bound: f64,
    pub clamped: bool,
}

impl OsdResult {
    /// Best single number for display: the exact value or the upper bound.
    pub fn headline(&self) -> Option<f64> {
        self.value.or(self.bounds.map(|(_, hi)| hi))
    }
}

/// Window-boundary dimension data for the model-set description.
#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub d_int: u32,
    pub isotropic: bool,
    pub applicable: bool,
    pub boundary_dim: Option<f64>,
    pub lower_bound: f64,
    pub naive_upper_bound: f64,
}

/// Discrepancy Lyapunov exponents: the exact maximum and a lower bound for
/// the minimum (coincidence-bound node types are excluded upstream).
pub fn lyapunov(
    lambda: &AlgebraicReal,
    lambda_dc: Option<&AlgebraicReal>,
    min_recurrent_lambda: Option<&AlgebraicReal>,
    d: u32,
) -> (f64, f64) {
    let dlog = f64::from(d) * lambda.ln();
    let max = lambda_dc.map_or(f64::NEG_INFINITY, AlgebraicReal::ln) - dlog;
    let min_lb = min_recurrent_lambda.map_or(f64::NEG_INFINITY, AlgebraicReal::ln) - dlog;
    (max, min_lb)
}

fn formula(dlog: f64, rate: &AlgebraicReal) -> f64 {
    if rate.cmp_rational(&BigRational::one()) == Ordering::Equal {
        return 1.0;
    }
    dlog / (dlog - rate.ln())
}

/// OSD from the spectral report: exact under the uniformity (or primitivity)
/// condition, otherwise two-sided bounds; infinite without pure-point
/// spectrum; clamped to 1 for nilpotent discrepancy graphs.
pub fn osd(lambda: &AlgebraicReal, d: u32, spectral: &SpectralReport, pure_point: bool) -> OsdResult {
    let min_recurrent = spectral.min_recurrent_lambda();
    let (ly_max, ly_min_lb) = lyapunov(
        lambda,
        spectral.lambda_dc.as_ref(),
        min_recurrent.as_ref(),
        d,
    );
    if !pure_point {
        return OsdResult {
            pure_point: false,
            exact: false,
            value: None,
            bounds: None,
            lyapunov_max: ly_max,
            lyapunov_min_lower_bound: ly_min_lb,
            clamped: false,
        };
    }
    let dlog = f64::from(d) * lambda.ln();
    match &spectral.lambda_dc {
        None => OsdResult {
            pure_point: true,
            exact: true,
            value: Some(1.0),
            bounds: Some((1.0, 1.0)),
            lyapunov_max: ly_max,
            lyapunov_min_lower_bound: ly_min_lb,
            clamped: true,
        },
        Some(lambda_dc) => {
            let hi = formula(dlog, lambda_dc);
            if spectral.uniform || spectral.dc_primitive {
                OsdResult {
                    pure_point: true,
                    exact: true,
                    value: Some(hi),
                    bounds: Some((hi, hi)),
                    lyapunov_max: ly_max,
                    lyapunov_min_lower_bound: ly_min_lb,
                    clamped: false,
                }
            } else {
                let (lo, clamped) = match &min_recurrent {
                    Some(r) => {
                        let raw = formula(dlog, r);
                        if raw < 1.0 {
                            (1.0, true)
                        } else {
                            (raw, false)
                        }
                    }
                    None => (1.0, true),
                };
                OsdResult {
                    pure_point: true,
                    exact: false,
                    value: None,
                    bounds: Some((lo, hi)),
                    lyapunov_max: ly_max,
                    lyapunov_min_lower_bound: ly_min_lb,
                    clamped,
                }
            }
        }
    }
}

/// Window-boundary dimensions for d = 1 rules. The internal dimension comes
/// from the degree and real-root count of λ's minimal polynomial; the
/// boundary formula applies only for unit λ with isotropic internal
/// contraction. The lower bound and the naive upper bound are reported
/// regardless.
pub fn window_report(
    lambda: &AlgebraicReal,
    lambda_dc: Option<&AlgebraicReal>,
    d: u32,
    min_poly_lambda: &IntPoly,
    unit: bool,
) -> WindowReport {
    let (d_int, isotropic, classified) = if d != 1 {
        (0, false, false)
    } else {
        match min_poly_lambda.degree() {
            Some(2) => (1, true, true),
            Some(3) => {
                let real = crate::algebraic::real_roots(min_poly_lambda)
                    .map(|r| r.len())
                    .unwrap_or(0);
                if real == 1 {
                    (2, true, true)
                } else {
                    (2, false, false)
                }
            }
            _ => (0, false, false),
        }
    };
    // For unit λ > 1 of degree 2, and degree 3 with a complex conjugate
    // pair, the remaining conjugates are automatically inside the unit
    // circle, so λ is a PV unit exactly when the unit flag holds.
    let applicable = classified && unit;
    let log_dc = lambda_dc.map_or(0.0, |l| l.ln().max(0.0));
    let dlog = f64::from(d) * lambda.ln();
    let lower_bound = f64::from(d_int) * log_dc / dlog;
    let naive_upper_bound = match d_int {
        1 => log_dc / lambda.ln(),
        2 => 2.0 * log_dc / lambda.ln(),
        _ => 0.0,
    };
    let boundary_dim = if applicable {
        Some(f64::from(d_int) / f64::from(d) * log_dc / lambda.ln())
    } else {
        None
    };
    WindowReport {
        d_int,
        isotropic,
        applicable,
        boundary_dim,
        lower_bound,
        naive_upper_bound,
    }
}

/// Product-system OSD: the sum of the factor values. Factors carrying only
/// bounds, or an infinite OSD, cannot be combined.
pub fn product_osd(results: &[OsdResult]) -> Result<OsdResult, OsdError> {
    let mut value = 0.0;
    let mut ly_max = f64::NEG_INFINITY;
    let mut ly_min_lb = f64::INFINITY;
    let mut clamped = false;
    for r in results {
        let v = match (r.pure_point, r.exact, r.value) {
            (true, true, Some(v)) => v,
            _ => return Err(OsdError::NonExactFactor),
        };
        value += v;
        ly_max = ly_max.max(r.lyapunov_max);
        ly_min_lb = ly_min_lb.min(r.lyapunov_min_lower_bound);
        clamped |= r.clamped;
    }
    Ok(OsdResult {
        pure_point: true,
        exact: true,
        value: Some(value),
        bounds: Some((value, value)),
        lyapunov_max: ly_max,
        lyapunov_min_lower_bound: ly_min_lb,
        clamped,
    })
}

fn eval_at_element(p: &IntPoly, x: &FieldElement) -> FieldElement {
    let ctx = x.ctx();
    let mut acc = ctx.zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x);
        acc = acc.add(&ctx.element(RatPoly::new(vec![BigRational::from_integer(c.clone())])));
    }
    acc
}

/// Exact three-way comparison of `lambda_dc` against `lambda^d`.
///
/// Termination: if the two numbers differ, interval refinement separates
/// them; if they are equal, λ^d is a root of λ_dc's defining polynomial
/// inside its isolating interval, which the field-arithmetic certificate
/// detects.
fn cmp_power(lambda_dc: &AlgebraicReal, lambda: &AlgebraicReal, d: u32) -> Ordering {
    if d == 1 {
        return lambda_dc.cmp_exact(lambda);
    }
    let ctx = FieldCtx::new(lambda.poly().clone(), lambda.clone());
    let mut power = ctx.one();
    for _ in 0..d {
        power = power.mul(&ctx.generator());
    }
    if eval_at_element(lambda_dc.poly(), &power).is_zero() {
        // λ^d is a root of the defining polynomial; it equals λ_dc iff it
        // lies in λ_dc's isolating interval.
        let above_lo = power
            .sub(&ctx.element(RatPoly::new(vec![lambda_dc.lo().clone()])))
            .sign();
        let below_hi = ctx
            .element(RatPoly::new(vec![lambda_dc.hi().clone()]))
            .sub(&power)
            .sign();
        if above_lo > 0 && below_hi > 0 {
            return Ordering::Equal;
        }
    }
    let mut a = lambda.clone();
    let mut b = lambda_dc.clone();
    loop {
        let (plo, phi) = (pow_rat(a.lo(), d), pow_rat(a.hi(), d));
        if b.hi() <= &plo {
            return Ordering::Less;
        }
        if b.lo() >= &phi {
            return Ordering::Greater;
        }
        a.refine_bits(16);
        b.refine_bits(16);
    }
}

fn pow_rat(q: &BigRational, d: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..d {
        acc *= q;
    }
    acc
}

/// Formula-level OSD from externally supplied spectra: λ and λ_dc are the
/// largest real roots of the two polynomials, with the whole quotient taken
/// as exact.
pub fn osd_from_data(
    lambda_poly: &IntPoly,
    lambda_dc_poly: &IntPoly,
    d: u32,
) -> Result<OsdResult, OsdError> {
    let lambda = AlgebraicReal::largest_real_root(lambda_poly)?;
    if lambda.cmp_rational(&BigRational::one()) != Ordering::Greater {
        return Err(OsdError::InvalidSpectrum(
            "inflation factor root must exceed 1".into(),
        ));
    }
    let lambda_dc = AlgebraicReal::largest_real_root(lambda_dc_poly)?;
    if lambda_dc.cmp_rational(&BigRational::one()) == Ordering::Less {
        return Err(OsdError::InvalidSpectrum(
            "discrepancy root must be at least 1".into(),
        ));
    }
    if cmp_power(&lambda_dc, &lambda, d) != Ordering::Less {
        return Err(OsdError::InvalidSpectrum(
            "discrepancy rate must stay below the volume scaling".into(),
        ));
    }
    let dlog = f64::from(d) * lambda.ln();
    let value = formula(dlog, &lambda_dc);
    let ly = lambda_dc.ln() - dlog;
    Ok(OsdResult {
        pure_point: true,
        exact: true,
        value: Some(value),
        bounds: Some((value, value)),
        lyapunov_max: ly,
        lyapunov_min_lower_bound: ly,
        clamped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectral_report;
    use num_bigint::BigInt;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn root(coeffs: &[i64]) -> AlgebraicReal {
        AlgebraicReal::largest_real_root(&IntPoly::from_i64(coeffs)).unwrap()
    }

    #[test]
    fn fibonacci_osd_is_exactly_one() {
        let phi = root(&[-1, -1, 1]);
        let rep = spectral_report(&mat(&[&[1]]));
        let r = osd(&phi, 1, &rep, true);
        assert!(r.exact);
        assert_eq!(r.value, Some(1.0));
        assert!((r.lyapunov_max + 0.4812118250596035).abs() < 1e-12);
        assert!(!r.clamped);
    }

    #[test]
    fn reshuffled_fibonacci_osd() {
        let lam = root(&[1, -3, 1]);
        let rep = spectral_report(&mat(&[&[2, 1], &[1, 0]]));
        let r = osd(&lam, 1, &rep, true);
        assert!(r.exact);
        assert!((r.value.unwrap() - 11.874434310257763).abs() < 1e-9);
        assert!((r.lyapunov_max + 0.0810500630996639).abs() < 1e-9);
    }

    #[test]
    fn non_pure_point_is_infinite() {
        let two = AlgebraicReal::from_integer(2);
        let rep = spectral_report(&mat(&[&[2]]));
        let r = osd(&two, 1, &rep, false);
        assert!(!r.pure_point);
        assert_eq!(r.value, None);
        assert_eq!(r.bounds, None);
        assert!((r.lyapunov_max - 0.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_graph_clamps_to_one() {
        let phi = root(&[-1, -1, 1]);
        let rep = spectral_report(&mat(&[&[0, 1], &[0, 0]]));
        let r = osd(&phi, 1, &rep, true);
        assert!(r.exact);
        assert_eq!(r.value, Some(1.0));
        assert!(r.clamped);
        assert_eq!(r.lyapunov_max, f64::NEG_INFINITY);
    }

    #[test]
    fn disconnected_components_give_bounds() {
        let lam = root(&[-1, -4, 1]); // > 4, keeps both rates contracting
        let rep = spectral_report(&mat(&[&[2, 0], &[0, 3]]));
        assert!(!rep.uniform);
        let r = osd(&lam, 1, &rep, true);
        assert!(!r.exact);
        let (lo, hi) = r.bounds.unwrap();
        let dlog = lam.ln();
        assert!((hi - dlog / (dlog - 3f64.ln())).abs() < 1e-12);
        assert!((lo - dlog / (dlog - 2f64.ln())).abs() < 1e-12);
        assert!(lo < hi);
    }

    #[test]
    fn window_fibonacci() {
        let phi = root(&[-1, -1, 1]);
        let one = AlgebraicReal::from_integer(1);
        let w = window_report(&phi, Some(&one), 1, &IntPoly::from_i64(&[-1, -1, 1]), true);
        assert_eq!(w.d_int, 1);
        assert!(w.isotropic && w.applicable);
        assert_eq!(w.boundary_dim, Some(0.0));
        assert_eq!(w.lower_bound, 0.0);
    }

    #[test]
    fn window_reshuffled_fibonacci() {
        let lam = root(&[1, -3, 1]);
        let ldc = root(&[-1, -2, 1]);
        let w = window_report(&lam, Some(&ldc), 1, &IntPoly::from_i64(&[1, -3, 1]), true);
        assert_eq!(w.d_int, 1);
        assert!(w.applicable);
        assert!((w.boundary_dim.unwrap() - 0.9157854619536573).abs() < 1e-9);
        assert!((w.lower_bound - w.boundary_dim.unwrap()).abs() < 1e-12);
        assert!((w.naive_upper_bound - w.boundary_dim.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn window_tribonacci_complex_pair() {
        let lam = root(&[-1, -1, -1, 1]);
        let ldc = root(&[-1, -2, 0, 0, 1]);
        let w = window_report(&lam, Some(&ldc), 1, &IntPoly::from_i64(&[-1, -1, -1, 1]), true);
        assert_eq!(w.d_int, 2);
        assert!(w.isotropic && w.applicable);
        let dim = w.boundary_dim.unwrap();
        assert!((dim - 1.0933641642823066).abs() < 1e-9);
        // Dimension identity against the OSD closed form.
        let osd_val = lam.ln() / (lam.ln() - ldc.ln());
        assert!((osd_val - 2.0 / (2.0 - dim)).abs() < 1e-9);
    }

    #[test]
    fn window_three_real_conjugates_not_applicable() {
        let lam = root(&[1, -1, -2, 1]);
        let ldc = root(&[1, -2, -1, 1]);
        let w = window_report(&lam, Some(&ldc), 1, &IntPoly::from_i64(&[1, -1, -2, 1]), true);
        assert_eq!(w.d_int, 2);
        assert!(!w.isotropic);
        assert!(!w.applicable);
        assert_eq!(w.boundary_dim, None);
        assert!((w.lower_bound - 1.4547236228535025).abs() < 1e-9);
    }

    #[test]
    fn window_plastic() {
        let lam = root(&[-1, -1, 0, 1]);
        let ldc = root(&[-1, 0, 0, 1, -2, 0, 0, 0, 0, 1, -1, 0, -1, 1]);
        let w = window_report(&lam, Some(&ldc), 1, &IntPoly::from_i64(&[-1, -1, 0, 1]), true);
        assert!(w.applicable);
        assert!((w.boundary_dim.unwrap() - 1.9464346032652786).abs() < 1e-9);
    }

    #[test]
    fn product_sums_exact_factors() {
        let a = osd_from_data(
            &IntPoly::from_i64(&[1, -3, 1]),
            &IntPoly::from_i64(&[-1, -2, 1]),
            1,
        )
        .unwrap();
        let one = OsdResult {
            pure_point: true,
            exact: true,
            value: Some(1.0),
            bounds: Some((1.0, 1.0)),
            lyapunov_max: -0.4812,
            lyapunov_min_lower_bound: -0.4812,
            clamped: false,
        };
        let p = product_osd(&[one.clone(), a]).unwrap();
        assert!((p.value.unwrap() - 12.874434310257763).abs() < 1e-9);
        let inexact = OsdResult {
            bounds: Some((1.0, 2.0)),
            exact: false,
            value: None,
            ..one
        };
        assert!(matches!(
            product_osd(&[inexact]),
            Err(OsdError::NonExactFactor)
        ));
    }

    #[test]
    fn formula_level_corpus_values() {
        let phi = IntPoly::from_i64(&[-1, -1, 1]);
        let castle = osd_from_data(&phi, &IntPoly::from_i64(&[-3, 5, -4, 1]), 2).unwrap();
        assert!((castle.value.unwrap() - 16.040358544094657).abs() < 1e-6);
        let cross = osd_from_data(
            &phi,
            &IntPoly::from_i64(&[-1, 0, 0, -2, -4, 1, 1, -1, -2, 1]),
            2,
        )
        .unwrap();
        assert!((cross.value.unwrap() - 8.305263).abs() < 1e-5);
        let island = osd_from_data(
            &phi,
            &IntPoly::from_i64(&[-4, 1, 2, -1, -2, 1]),
            2,
        )
        .unwrap();
        assert!((island.value.unwrap() - 4.558814).abs() < 1e-5);
        let hat = osd_from_data(&phi, &IntPoly::from_i64(&[1, -4, 1]), 4).unwrap();
        assert!((hat.value.unwrap() - 3.1664432538979885).abs() < 1e-9);
    }

    #[test]
    fn invalid_spectrum_cases() {
        // Rational equality at d = 2: 4 = 2².
        assert!(matches!(
            osd_from_data(&IntPoly::from_i64(&[-2, 1]), &IntPoly::from_i64(&[-4, 1]), 2),
            Err(OsdError::InvalidSpectrum(_))
        ));
        // Algebraic equality: φ² is the largest root of x²−3x+1.
        assert!(matches!(
            osd_from_data(
                &IntPoly::from_i64(&[-1, -1, 1]),
                &IntPoly::from_i64(&[1, -3, 1]),
                2
            ),
            Err(OsdError::InvalidSpectrum(_))
        ));
        // Strictly above.
        assert!(matches!(
            osd_from_data(&IntPoly::from_i64(&[-2, 1]), &IntPoly::from_i64(&[-5, 1]), 2),
            Err(OsdError::InvalidSpectrum(_))
        ));
        // Strictly below passes.
        let ok = osd_from_data(&IntPoly::from_i64(&[-2, 1]), &IntPoly::from_i64(&[-3, 1]), 2)
            .unwrap();
        assert!((ok.value.unwrap() - 2.0 * 2f64.ln() / (2.0 * 2f64.ln() - 3f64.ln())).abs() < 1e-12);
    }
}
