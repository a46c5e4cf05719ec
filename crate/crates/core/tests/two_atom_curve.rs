//! Shape of the two-atom correlation signal P(e₂|e₁) against delay.

mod common;

use common::c;
use cqed_core::dynamics::{decoherence_time, DampingModel};
use cqed_core::protocol::{prepare_cat, probe_field, two_atom_conditional, CavityInteraction, Level, ProtocolConfig};

fn curve(times: &[f64]) -> Vec<f64> {
    let model = DampingModel::zero_temperature(1.0).unwrap();
    let config = ProtocolConfig::default();
    times
        .iter()
        .map(|&t| two_atom_conditional(c(5f64.sqrt(), 0.0), t, &model, &config).unwrap().p_e2_given_e1.unwrap())
        .collect()
}

#[test]
fn starts_correlated_and_decays_monotonically() {
    let times: Vec<f64> = (0..=80).map(|k| 0.1 * k as f64).collect();
    let p = curve(&times);
    assert!(p[0] > 1.0 - 1e-4, "P(0) = {}", p[0]);
    for w in p.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "not monotone: {} then {}", w[0], w[1]);
    }
    assert!(p[80] < 0.02, "P(8/kappa) = {}", p[80]);
}

#[test]
fn plateau_near_three_decoherence_times() {
    let model = DampingModel::zero_temperature(1.0).unwrap();
    let t_dec = decoherence_time(&model, 5.0).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| t_dec * (2.5 + 0.1 * k as f64)).collect();
    let p = curve(&times);
    let worst = p.iter().map(|x| (x - 0.5).abs()).fold(0.0, f64::max);
    assert!(worst < 0.02, "max |P - 1/2| over [2.5, 3.5] t_dec = {worst:.4}, values {p:.4?}");
}

#[test]
fn first_atom_is_prepare_cat() {
    let model = DampingModel::zero_temperature(1.0).unwrap();
    let config = ProtocolConfig::default();
    let alpha = c(5f64.sqrt(), 0.0);
    let table = two_atom_conditional(alpha, 0.0, &model, &config).unwrap();
    let prep = prepare_cat(alpha, &config).unwrap();
    assert_eq!(table.p_e1, prep.probability(Level::Excited));
    assert_eq!(table.p_g1, prep.probability(Level::Ground));
    for (level, conditional) in [(Level::Excited, table.p_e2_given_e1), (Level::Ground, table.p_e2_given_g1)] {
        let det = probe_field(&prep.field(level).unwrap(), CavityInteraction::Dispersive, &config).unwrap();
        assert!((det.p_e() - conditional.unwrap()).abs() < 1e-12);
    }
    assert!((table.p_e2 + table.p_g2 - 1.0).abs() < 1e-10);
}
