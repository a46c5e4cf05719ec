//! State corpus shared by the integration targets.

#![allow(dead_code)]

use cqed_core::dynamics::{evolve, DampingModel};
use cqed_core::fock::{cat_state, coherent_state, fock_state, mix_pure, DensityOperator, HilbertSpec, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Ten reference states: vacuum, Fock 1–3, coherent α ∈ {1, 2}, even and
/// odd cats at α = 2, their 50/50 mixture, and the even cat after 0.1/κ.
pub fn corpus() -> Vec<(&'static str, DensityOperator)> {
    let spec = HilbertSpec::for_amplitude(2.0);
    let fock = |n| fock_state(spec, n).unwrap().to_density();
    let even = cat_state(spec, c(2.0, 0.0), 0.0).unwrap();
    let odd = cat_state(spec, c(2.0, 0.0), std::f64::consts::PI).unwrap();
    let plus = coherent_state(spec, c(2.0, 0.0)).unwrap();
    let minus = coherent_state(spec, c(-2.0, 0.0)).unwrap();
    let model = DampingModel::zero_temperature(1.0).unwrap();
    vec![
        ("vacuum", fock(0)),
        ("fock-1", fock(1)),
        ("fock-2", fock(2)),
        ("fock-3", fock(3)),
        ("coherent-1", coherent_state(spec, c(1.0, 0.0)).unwrap().to_density()),
        ("coherent-2", plus.to_density()),
        ("cat-even", even.to_density()),
        ("cat-odd", odd.to_density()),
        ("mixture", mix_pure(&[(0.5, plus), (0.5, minus)]).unwrap()),
        ("cat-damped", evolve(&even.to_density(), &model, 0.1).unwrap()),
    ]
}
