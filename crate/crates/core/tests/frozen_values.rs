//! Reference values from 30-digit evaluations of the defining integrals,
//! plus an in-test second route for the CDF through the conditional form
//! `1 − F(γ) = E_{g₁}[1/((1 + γλ₀/(Ωλ₂g₁))(1 + γλ₃/(Ωλ₂)))]`.

use ssbc_core::analytic::*;
use ssbc_core::quadrature::integrate_semi_infinite;
use ssbc_core::specfun::default_expsum;
use ssbc_core::{BinaryModulation, SystemParams};

fn params(l0: f64, l1: f64, l2: f64, l3: f64, omega: f64) -> SystemParams {
    SystemParams::new(l0, l1, l2, l3, omega).unwrap()
}

fn conditional_ccdf(p: &SystemParams, gamma: f64) -> f64 {
    let k = gamma / (p.omega() * p.lambda2());
    let outer = 1.0 / (1.0 + k * p.lambda3());
    let l1 = p.lambda1();
    integrate_semi_infinite(
        |x| (-x / l1).exp() / l1 / (1.0 + k * p.lambda0() / x),
        0.0,
        1e-14,
    )
    .value
        * outer
}

#[test]
fn cdf_unit_parameters() {
    let p = params(1.0, 1.0, 1.0, 1.0, 1.0);
    let reference = 0.798_173_681_161_597_04;
    assert!((snr_cdf_exact(&p, 1.0).unwrap() - reference).abs() < 1e-14);
    assert!((1.0 - conditional_ccdf(&p, 1.0) - reference).abs() < 1e-10);
}

#[test]
fn cdf_second_route_over_grid() {
    for p in [params(1.0, 4.0, 3.0, 1.0, 10.0), params(0.1, 4.0, 3.0, 1.0, 0.1), params(1.0, 2.0, 3.0, 1.0, 1.0)] {
        for g in [1e-3, 0.05, 0.7, 4.0, 60.0, 900.0] {
            let a = snr_ccdf_exact(&p, g).unwrap();
            let b = conditional_ccdf(&p, g);
            assert!((a - b).abs() < 1e-10 * (1.0 + a), "{p} γ = {g}: {a} vs {b}");
        }
    }
}

#[test]
fn outage_probability_fig2_point() {
    let p = params(1.0, 4.0, 3.0, 1.0, 10.0);
    let reference = 0.066_563_660_506_836_91;
    assert!((outage_probability(&p, 1.0).unwrap() - reference).abs() < 1e-14);
}

#[test]
fn outage_capacity_fig3_point() {
    let p = params(1.0, 2.0, 3.0, 1.0, 10.0);
    let reference = 3.175_576_046_702_792_1;
    assert!((outage_capacity(&p, 0.4).unwrap() - reference).abs() < 1e-9);
}

#[test]
fn ergodic_fig4_point() {
    let p = params(1.0, 4.0, 3.0, 1.0, 10.0);
    let reference = 4.083_194_191_695_677_2;
    assert!((ergodic_capacity_quadrature(&p).unwrap() - reference).abs() < 1e-8);
    assert!((ergodic_capacity_approx(&p, default_expsum()).unwrap() - reference).abs() < 5e-3);
}

#[test]
fn effective_fig6_point() {
    let p = params(1.0, 2.0, 3.0, 1.0, 1.0);
    let reference = 0.841_906_140_590_086_12;
    assert!((effective_capacity_quadrature(&p, 2.0).unwrap() - reference).abs() < 1e-8);
    assert!((effective_capacity_approx(&p, 2.0, default_expsum()).unwrap() - reference).abs() < 1e-2);
}

#[test]
fn bpsk_ber_fig7_point() {
    let p = params(0.1, 4.0, 3.0, 1.0, 10.0);
    let reference = 0.009_242_469_948_484_361_4;
    let b = average_ber_approx(&p, BinaryModulation::BPSK.into(), default_expsum()).unwrap();
    assert!((b / reference - 1.0).abs() < 1e-3, "{b}");
}

#[test]
fn mgf_fig4_point() {
    let p = params(1.0, 4.0, 3.0, 1.0, 10.0);
    let reference = 0.061_744_068_967_039_071;
    let m = snr_mgf_approx(&p, 1.0, default_expsum()).unwrap();
    assert!((m / reference - 1.0).abs() < 1e-3, "{m}");
}

#[test]
fn qpsk_ser_fig7_point() {
    let p = params(0.1, 4.0, 3.0, 1.0, 10.0);
    let reference = 0.031_512_149_072_303_037;
    let s = mpsk_ser(&p, 4, default_expsum()).unwrap();
    assert!((s / reference - 1.0).abs() < 1e-3, "{s}");
}
