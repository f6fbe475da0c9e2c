use vbq_core::diagnostics::voigt_theta_energy;
use vbq_core::io::{make_initial_data, InitialData};
use vbq_core::spectral::{make_grid, VoigtParams};
use vbq_core::timestepper::{integrate, StepControl};
use vbq_core::{FlowState, FlowStateF32, ParamsF32};

fn data() -> InitialData {
    InitialData::RandomBandlimited { kmax: 4, decay: 5.0, seed: 1 }
}

#[test]
fn single_precision_tracks_double() {
    let g64 = make_grid::<f64>(32).unwrap();
    let g32 = make_grid::<f32>(32).unwrap();
    let s64: FlowState = make_initial_data(&data(), &g64).unwrap();
    let s32: FlowStateF32 = make_initial_data(&data(), &g32).unwrap();
    let p64 = VoigtParams::classical(1.0).unwrap();
    let p32: ParamsF32 = VoigtParams::classical(1.0).unwrap();

    let e64 = integrate(s64, &StepControl::fixed(0.01, 0.5), &p64, |_| Ok(())).unwrap();
    let e32 = integrate(s32.clone(), &StepControl::fixed(0.01f32, 0.5), &p32, |_| Ok(())).unwrap();

    let worst = e64
        .omega
        .coeffs()
        .iter()
        .zip(e32.omega.coeffs())
        .map(|(a, b)| (a.re - b.re as f64).hypot(a.im - b.im as f64))
        .fold(0.0, f64::max);
    assert!(worst < 1e-5, "f32 departs from f64 by {worst}");

    let q0 = voigt_theta_energy(&s32.theta, &p32);
    let q1 = voigt_theta_energy(&e32.theta, &p32);
    assert!(((q1 - q0) / q0).abs() < 1e-5);
}
