//! Identity and reference-value checks for the special functions.

use std::f64::consts::{E, LN_2, PI};

use ssbc_core::specfun::{
    default_expsum, exp_integral_e1, gamma, gauss_2f1_ratio, regularized_upper_gamma,
    scaled_exp_integral_e1, tricomi_u, upper_incomplete_gamma, MAX_CONSTRUCTION_ERROR,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, got: Result<f64, ssbc_core::Error>, want: f64, tolerance: f64) -> Outcome {
    let name = name.into();
    match got {
        Ok(got) => {
            let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
            Outcome {
                name,
                passed: rel <= tolerance,
                detail: format!("got {got:.17e}, want {want:.17e}, rel error {rel:.2e} (tol {tolerance:.0e})"),
            }
        }
        Err(e) => Outcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Runs the battery.
pub fn run() -> Vec<Outcome> {
    let mut out = Vec::new();
    for (x, want) in [
        (0.5, 0.559_773_594_776_160_81),
        (1.0, 0.219_383_934_395_520_27),
        (5.0, 0.001_148_295_591_275_325_6),
        (10.0, 4.156_968_929_685_324e-6),
    ] {
        out.push(check(format!("E1({x})"), exp_integral_e1(x), want, 1e-13));
    }
    for x in [0.5, 5.0, 50.0] {
        let direct = exp_integral_e1(x).map(|e| e * x.exp());
        out.push(check(format!("exp(x) E1(x) at x = {x}"), scaled_exp_integral_e1(x), direct.unwrap_or(f64::NAN), 1e-12));
        out.push(check(format!("Gamma(0, {x}) = E1({x})"), upper_incomplete_gamma(0.0, x), exp_integral_e1(x).unwrap_or(f64::NAN), 1e-13));
    }
    // √π erfc(√x)
    for (x, want) in [(0.3, 0.777_359_311_249_808_04), (2.0, 0.080_647_117_960_317_69), (9.0, 3.915_438_647_355_951e-5)] {
        out.push(check(format!("Gamma(1/2, {x}) = sqrt(pi) erfc(sqrt({x}))"), upper_incomplete_gamma(0.5, x), want, 1e-12));
    }
    for (a, x, want) in [(-0.5, 1.0, 0.178_147_711_781_560_69), (-1.5, 0.7, 0.333_334_344_096_611_86), (-0.5, 3.0, 0.006_776_136_001_770_212_3)] {
        out.push(check(format!("Gamma({a}, {x})"), upper_incomplete_gamma(a, x), want, 1e-12));
    }
    for (a, x) in [(-1.5, 0.7), (-0.5, 3.0), (0.25, 2.0)] {
        // Γ(a+1, x) = a Γ(a, x) + x^a e^{−x}
        let b = a + 1.0;
        let lhs = if b > 0.0 {
            regularized_upper_gamma(b, x).map(|q| q * gamma(b))
        } else {
            upper_incomplete_gamma(b, x)
        };
        let rhs = upper_incomplete_gamma(a, x).map(|g| a * g + x.powf(a) * (-x).exp());
        out.push(check(format!("Gamma recurrence at a = {a}, x = {x}"), lhs, rhs.unwrap_or(f64::NAN), 1e-12));
    }
    for x in [0.1, 0.3, 0.7] {
        out.push(check(format!("Gamma reflection at {x}"), Ok(gamma(x) * gamma(1.0 - x)), PI / (PI * x).sin(), 1e-13));
    }
    out.push(check("2F1(1,1;2;-1) = ln 2", gauss_2f1_ratio(1.0, -1.0), LN_2, 1e-12));
    out.push(check("2F1(3,1;4;-5)", gauss_2f1_ratio(3.0, -5.0), 0.223_002_227_261_473_32, 1e-12));
    out.push(check("U(1,1,1) = e E1(1)", tricomi_u(1.0, 1.0, 1.0), E * 0.219_383_934_395_520_27, 1e-10));
    for x in [1e-3f64, 0.1, 1.0, 10.0, 300.0] {
        // ½ ln(1 + 2/x) < eˣE₁(x) < ln(1 + 1/x)
        let (lo, hi) = (0.5 * (2.0 / x).ln_1p(), (1.0 / x).ln_1p());
        let name = format!("E1 sandwich bounds at {x}");
        out.push(match scaled_exp_integral_e1(x) {
            Ok(g) => Outcome {
                name,
                passed: lo < g && g < hi,
                detail: format!("{lo:.6e} < {g:.6e} < {hi:.6e}"),
            },
            Err(e) => Outcome {
                name,
                passed: false,
                detail: e.to_string(),
            },
        });
    }
    let sum = default_expsum();
    out.push(Outcome {
        name: format!("{}-term exponential sum validation error", sum.len()),
        passed: sum.validation_error() <= MAX_CONSTRUCTION_ERROR,
        detail: format!("{:.2e} (limit {MAX_CONSTRUCTION_ERROR:.0e})", sum.validation_error()),
    });
    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn battery_passes() {
        for o in super::run() {
            assert!(o.passed, "{o:?}");
        }
    }
}
