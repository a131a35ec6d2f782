//! Elementary analytic functions on field elements, and derivatives taken
//! as standard parts of infinitesimal difference quotients.
//!
//! `f(st + h)` is computed as the Taylor polynomial of `f` at the standard
//! part `st`, Horner-evaluated in the infinitesimal increment `h` and
//! truncated at the working order, so the error is `O(e^N)` by
//! construction.

use crate::error::{Error, Result};
use crate::expr::{Env, Expr, Value};
use crate::field::{Classification, Laurent, MAX_VALUATION};

/// Names accepted by [`apply_analytic`].
pub const CATALOG: &[&str] = &["sin", "cos", "exp", "log", "sqrt", "asin"];

/// Open-interior domain check for the standard part of a field argument.
/// Boundary points are excluded because an infinitesimal increment exits a
/// closed boundary.
pub fn in_domain(name: &str, st: f64) -> Result<()> {
    let ok = match name {
        "sin" | "cos" | "exp" => true,
        "log" | "sqrt" => st > 0.0,
        "asin" => -1.0 < st && st < 1.0,
        _ => return Err(Error::UnknownFunction(name.to_string())),
    };
    if ok {
        Ok(())
    } else {
        let domain = match name {
            "log" | "sqrt" => "(0, inf)",
            _ => "(-1, 1)",
        };
        Err(Error::DomainViolation {
            func: name.to_string(),
            value: st,
            domain: domain.to_string(),
        })
    }
}

/// Taylor coefficients `f^(k)(center)/k!` for `k = 0..count`.
pub fn taylor_coeffs(name: &str, center: f64, count: usize) -> Result<Vec<f64>> {
    in_domain(name, center)?;
    let a = center;
    let mut c = vec![0.0; count];
    if count == 0 {
        return Ok(c);
    }
    match name {
        "exp" => {
            c[0] = a.exp();
            for k in 1..count {
                c[k] = c[k - 1] / k as f64;
            }
        }
        "sin" | "cos" => {
            // Derivatives cycle with period 4.
            let (s, co) = a.sin_cos();
            let cycle = if name == "sin" {
                [s, co, -s, -co]
            } else {
                [co, -s, -co, s]
            };
            let mut kfac = 1.0;
            for k in 0..count {
                if k > 0 {
                    kfac *= k as f64;
                }
                c[k] = cycle[k % 4] / kfac;
            }
        }
        "log" => {
            c[0] = a.ln();
            if count > 1 {
                c[1] = 1.0 / a;
                for k in 2..count {
                    c[k] = -c[k - 1] * (k as f64 - 1.0) / (k as f64 * a);
                }
            }
        }
        "sqrt" => {
            c[0] = a.sqrt();
            for k in 1..count {
                c[k] = c[k - 1] * (1.5 - k as f64) / (k as f64 * a);
            }
        }
        "asin" => {
            c[0] = a.asin();
            if count > 1 {
                c[1] = 1.0 / (1.0 - a * a).sqrt();
            }
            // From (1 - x^2) y'' = x y' at x = a + h:
            // c[k+2] = (a (k+1)(2k+1) c[k+1] + k^2 c[k]) / ((1-a^2)(k+2)(k+1)).
            for k in 0..count.saturating_sub(2) {
                let kf = k as f64;
                c[k + 2] = (a * (kf + 1.0) * (2.0 * kf + 1.0) * c[k + 1] + kf * kf * c[k])
                    / ((1.0 - a * a) * (kf + 2.0) * (kf + 1.0));
            }
        }
        _ => return Err(Error::UnknownFunction(name.to_string())),
    }
    Ok(c)
}

/// One Taylor coefficient `f^(k)(center)/k!`.
pub fn taylor_coefficient(name: &str, center: f64, k: usize) -> Result<f64> {
    Ok(taylor_coeffs(name, center, k + 1)?[k])
}

/// Horner evaluation of a coefficient polynomial in an infinitesimal (or
/// zero) increment. Terms whose valuation cannot be tracked are dropped;
/// they are below the truncation window in every case.
fn horner(coeffs: &[f64], h: &Laurent) -> Result<Laurent> {
    let order = h.order();
    if h.is_zero() {
        return Laurent::from_real(coeffs[0], order);
    }
    debug_assert!(h.valuation() >= 1);
    let cap = (MAX_VALUATION / h.valuation()) as usize;
    let top = coeffs.len().min(cap + 1);
    let mut acc = Laurent::from_real(coeffs[top - 1], order)?;
    for k in (0..top - 1).rev() {
        acc = acc.mul(h)?.add(&Laurent::from_real(coeffs[k], order)?)?;
    }
    Ok(acc)
}

/// Applies a catalog function to a finite field element by Taylor
/// composition at the standard part.
pub fn apply_analytic(name: &str, a: &Laurent) -> Result<Laurent> {
    if a.classify() == Classification::Infinite {
        return Err(Error::NoStandardPart);
    }
    let (st, h) = a.decompose()?;
    let coeffs = taylor_coeffs(name, st, a.order())?;
    horner(&coeffs, &h)
}

/// Integer power by repeated squaring; valid for any nonzero element (and
/// for zero with a non-negative exponent).
pub fn pow_int(a: &Laurent, p: i64) -> Result<Laurent> {
    let order = a.order();
    if p == 0 {
        return Laurent::one(order);
    }
    if a.is_zero() {
        return if p > 0 {
            Ok(Laurent::zero(order))
        } else {
            Err(Error::DivisionByZero)
        };
    }
    let mut base = if p > 0 { a.clone() } else { a.inverse()? };
    let mut exp = p.unsigned_abs();
    let mut acc = Laurent::one(order)?;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.mul(&base)?;
        }
        exp >>= 1;
        if exp > 0 {
            base = base.mul(&base)?;
        }
    }
    Ok(acc)
}

/// General real power: integer exponents use repeated multiplication,
/// non-integer exponents require a positive standard part and use the
/// binomial series.
pub fn pow_value(a: &Laurent, p: f64) -> Result<Laurent> {
    if !p.is_finite() {
        return Err(Error::NonFiniteInput(p));
    }
    if p.fract() == 0.0 && p.abs() <= 2_f64.powi(53) {
        return pow_int(a, p as i64);
    }
    if a.classify() == Classification::Infinite {
        return Err(Error::NoStandardPart);
    }
    let (st, h) = a.decompose()?;
    if st <= 0.0 {
        return Err(Error::DomainViolation {
            func: "pow".into(),
            value: st,
            domain: "standard part > 0 for non-integer exponents".into(),
        });
    }
    // Binomial series: c_k = st^p * C(p, k) / st^k.
    let n = a.order();
    let mut coeffs = vec![0.0; n];
    coeffs[0] = st.powf(p);
    for k in 1..n {
        coeffs[k] = coeffs[k - 1] * (p - k as f64 + 1.0) / (k as f64 * st);
    }
    horner(&coeffs, &h)
}

fn eval_at_field(f: &Expr, var: &str, x: Laurent) -> Result<Laurent> {
    let mut env = Env::new();
    let order = x.order();
    env.insert(var.to_string(), Value::Field(x));
    match f.eval(&env)? {
        Value::Field(v) => Ok(v),
        Value::Real(r) => Laurent::from_real(r, order),
    }
}

/// First derivative of `f` at `x0`: the standard part of
/// `(f(x0 + e) - f(x0)) / e`.
pub fn derivative(f: &Expr, var: &str, x0: f64, order: usize) -> Result<f64> {
    let eps = Laurent::epsilon(order)?;
    let x = Laurent::from_real(x0, order)?.add(&eps)?;
    let fx = eval_at_field(f, var, x)?;
    let f0 = eval_at_field(f, var, Laurent::from_real(x0, order)?)?;
    let quotient = fx.sub(&f0)?.div(&eps)?;
    if quotient.classify() == Classification::Infinite {
        return Err(Error::InfiniteQuotient(x0));
    }
    quotient.standard_part()
}

/// `k`-th derivative of `f` at `x0`: `k!` times the coefficient of `e^k`
/// in `f(x0 + e)`.
pub fn nth_derivative(f: &Expr, var: &str, x0: f64, k: usize, order: usize) -> Result<f64> {
    if k >= order {
        return Err(Error::BeyondWorkingOrder(k, order));
    }
    let eps = Laurent::epsilon(order)?;
    let x = Laurent::from_real(x0, order)?.add(&eps)?;
    let fx = eval_at_field(f, var, x)?;
    if fx.classify() == Classification::Infinite {
        return Err(Error::InfiniteQuotient(x0));
    }
    let mut kfac = 1.0;
    for i in 2..=k {
        kfac *= i as f64;
    }
    Ok(kfac * fx.coeff_at(k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_ORDER;
    use approx::assert_relative_eq;

    fn eps() -> Laurent {
        Laurent::epsilon(DEFAULT_ORDER).unwrap()
    }

    #[test]
    fn exp_of_epsilon_matches_taylor_oracle() {
        let r = apply_analytic("exp", &eps()).unwrap();
        assert_eq!(r.valuation(), 0);
        // Oracle: coefficients of exp at 0 are 1/k!.
        let mut kfac = 1.0;
        for k in 0..DEFAULT_ORDER {
            if k > 0 {
                kfac *= k as f64;
            }
            assert_relative_eq!(r.coeffs()[k], 1.0 / kfac, max_relative = 1e-12);
        }
    }

    #[test]
    fn sin_of_epsilon_matches_taylor_oracle() {
        let r = apply_analytic("sin", &eps()).unwrap();
        assert_eq!(r.valuation(), 1);
        assert_relative_eq!(r.coeff_at(1), 1.0);
        assert_eq!(r.coeff_at(2), 0.0);
        assert_relative_eq!(r.coeff_at(3), -1.0 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(r.coeff_at(5), 1.0 / 120.0, max_relative = 1e-12);
    }

    #[test]
    fn log_rejects_infinitesimal_argument() {
        assert!(matches!(
            apply_analytic("log", &eps()),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn infinite_arguments_have_no_standard_part() {
        let inf = eps().inverse().unwrap();
        assert!(matches!(
            apply_analytic("sin", &inf),
            Err(Error::NoStandardPart)
        ));
    }

    #[test]
    fn purely_real_input_reduces_to_ordinary_evaluation() {
        let x = Laurent::from_real(0.7, DEFAULT_ORDER).unwrap();
        let r = apply_analytic("sin", &x).unwrap();
        assert_eq!(r.standard_part().unwrap(), 0.7_f64.sin());
        assert!(r.decompose().unwrap().1.is_zero());
    }

    #[test]
    fn derivative_of_log_is_reciprocal() {
        let f = Expr::parse("log(x)").unwrap();
        let d = derivative(&f, "x", 2.0, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(d, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn derivative_of_cube_is_prime_ratio() {
        let f = Expr::parse("x^3").unwrap();
        let d = derivative(&f, "x", 2.0, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(d, 12.0, max_relative = 1e-12);
    }

    #[test]
    fn derivative_of_sin_at_zero() {
        let f = Expr::parse("sin(x)").unwrap();
        let d = derivative(&f, "x", 0.0, DEFAULT_ORDER).unwrap();
        assert_relative_eq!(d, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn nth_derivative_extracts_taylor_coefficients() {
        let f = Expr::parse("sin(x)").unwrap();
        assert_relative_eq!(
            nth_derivative(&f, "x", 0.0, 3, DEFAULT_ORDER).unwrap(),
            -1.0,
            max_relative = 1e-12
        );
        let f = Expr::parse("x^2").unwrap();
        assert_relative_eq!(
            nth_derivative(&f, "x", 5.0, 2, DEFAULT_ORDER).unwrap(),
            2.0,
            max_relative = 1e-12
        );
        let f = Expr::parse("exp(x)").unwrap();
        assert_relative_eq!(
            nth_derivative(&f, "x", 0.0, 5, DEFAULT_ORDER).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!(matches!(
            nth_derivative(&f, "x", 0.0, DEFAULT_ORDER, DEFAULT_ORDER),
            Err(Error::BeyondWorkingOrder(..))
        ));
    }

    #[test]
    fn infinite_values_are_not_differentiable() {
        // 1/x at the origin blows up at working order.
        let f = Expr::parse("1/x").unwrap();
        assert!(matches!(
            nth_derivative(&f, "x", 0.0, 1, DEFAULT_ORDER),
            Err(Error::InfiniteQuotient(_))
        ));
        // The plain quotient path propagates the evaluation failure at x0.
        assert!(matches!(
            derivative(&f, "x", 0.0, DEFAULT_ORDER),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn asin_series_matches_known_coefficients() {
        // asin(x) = x + x^3/6 + 3 x^5/40 + 15 x^7/336 + ...
        let c = taylor_coeffs("asin", 0.0, 8).unwrap();
        assert_relative_eq!(c[1], 1.0);
        assert_relative_eq!(c[3], 1.0 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(c[5], 3.0 / 40.0, max_relative = 1e-12);
        assert_relative_eq!(c[7], 15.0 / 336.0, max_relative = 1e-12);
        assert_eq!(c[0], 0.0);
        assert_eq!(c[2], 0.0);
    }

    #[test]
    fn single_coefficient_rule_agrees_with_the_batch() {
        for name in CATALOG {
            let center = if matches!(*name, "log" | "sqrt") {
                2.0
            } else {
                0.5
            };
            let batch = taylor_coeffs(name, center, 6).unwrap();
            for (k, expected) in batch.iter().enumerate() {
                assert_eq!(taylor_coefficient(name, center, k).unwrap(), *expected);
            }
        }
        assert!(taylor_coefficient("tan", 0.0, 1).is_err());
    }

    #[test]
    fn pow_handles_integer_and_fractional_exponents() {
        let x = Laurent::from_real(2.0, DEFAULT_ORDER)
            .unwrap()
            .add(&eps())
            .unwrap();
        let sq = pow_value(&x, 2.0).unwrap();
        assert_relative_eq!(sq.standard_part().unwrap(), 4.0);
        assert_relative_eq!(sq.coeff_at(1), 4.0);
        assert_relative_eq!(sq.coeff_at(2), 1.0);

        let neg = pow_value(&x, -1.0).unwrap();
        assert_relative_eq!(neg.standard_part().unwrap(), 0.5);
        assert_relative_eq!(neg.coeff_at(1), -0.25, max_relative = 1e-12);

        let half = pow_value(&x, 0.5).unwrap();
        let direct = apply_analytic("sqrt", &x).unwrap();
        for k in 0..DEFAULT_ORDER {
            assert_relative_eq!(
                half.coeffs()[k],
                direct.coeffs()[k],
                max_relative = 1e-10,
                epsilon = 1e-14
            );
        }

        let pure = eps();
        assert!(pow_value(&pure, 0.5).is_err());
        assert!(pow_value(&pure, 3.0).is_ok());
    }

    #[test]
    fn deep_infinitesimal_increment_truncates_cleanly() {
        // Powers of e^40 beyond the first are unrepresentable; they must be
        // dropped by truncation, not raised as a valuation overflow.
        let h = eps().shift_valuation(39).unwrap();
        let r = apply_analytic("exp", &h).unwrap();
        assert_eq!(r, Laurent::one(DEFAULT_ORDER).unwrap());
        let r = apply_analytic("sin", &h).unwrap();
        assert_eq!(r, h);
    }
}
