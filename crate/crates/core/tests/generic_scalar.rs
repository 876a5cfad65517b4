//! The whole pipeline instantiates at `f32` as well as `f64`; single
//! precision only has to be self-consistent at loose tolerances.

use qrelax::dynamics::entropy_production_exact;
use qrelax::hilbert::InverseTemperature;
use qrelax::liouvillian::{System, ThermalScenario};
use qrelax::spectral::decompose;
use qrelax::thermo::{dynamical_activity, phi_inverse};

#[test]
fn qubit_pipeline_at_f32() {
    let beta = |x: f32| InverseTemperature::new(x).unwrap();
    let sc = ThermalScenario::new(
        System::<f32>::qubit(1.0).unwrap(),
        0.1,
        1.0,
        beta(3.0f32.ln()),
        beta(2.0f32.ln()),
    )
    .unwrap();
    let lop = sc.liouvillian().unwrap();
    let s = decompose(&lop).unwrap();
    assert!((s.gap() - 0.3).abs() < 1e-5);

    let sigma0 = entropy_production_exact(&lop, &sc.initial_state().unwrap(), s.stationary_state())
        .unwrap();
    assert!((sigma0 - 0.0101366).abs() < 1e-4);

    let (l1, l2) = sc.jump_ops().unwrap();
    let a = dynamical_activity(&[l1, l2], &sc.target_state().unwrap()).unwrap();
    assert!((a - 2.0 / 15.0).abs() < 1e-5);

    let x = phi_inverse(1.0f32).unwrap();
    assert!((x * x.tanh() - 1.0).abs() < 1e-5);
}
