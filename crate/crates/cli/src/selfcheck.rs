//! Fast invariant suite run by `cqed selfcheck`.

use std::f64::consts::PI;

use cqed_core::direct::{direct_point_exact, direct_point_sampled};
use cqed_core::dynamics::{
    decoherence_time, evolve, fitted_coherence_time, separation_measure, DampingModel,
};
use cqed_core::fock::{cat_state, coherent_state, fock_state, mix, mix_pure, DensityOperator, HilbertSpec, C64};
use cqed_core::protocol::{two_atom_conditional, ProtocolConfig};
use cqed_core::tomo::{inverse_radon, sample_homodyne, uniform_angles, Binning, SinogramSet};
use cqed_core::wigner::{
    moyal_averages, pauli_counterexample, wigner_map, wigner_point, wigner_position, Monomial, PhaseSpaceGrid,
};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    /// The measured quantity compared against `limit`.
    pub value: f64,
    pub limit: f64,
    pub note: String,
}

fn below(name: &'static str, value: f64, limit: f64, note: impl Into<String>) -> Check {
    Check { name, pass: value < limit, value, limit, note: note.into() }
}

fn above(name: &'static str, value: f64, limit: f64, note: impl Into<String>) -> Check {
    Check { name, pass: value > limit, value, limit, note: note.into() }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn corpus() -> cqed_core::Result<Vec<(&'static str, DensityOperator)>> {
    let spec = HilbertSpec::for_amplitude(2.0);
    let fock = |n| fock_state(spec, n).map(|s| s.to_density());
    let even = cat_state(spec, c(2.0, 0.0), 0.0)?;
    let plus = coherent_state(spec, c(2.0, 0.0))?;
    let minus = coherent_state(spec, c(-2.0, 0.0))?;
    let model = DampingModel::zero_temperature(1.0)?;
    Ok(vec![
        ("vacuum", fock(0)?),
        ("fock-1", fock(1)?),
        ("fock-2", fock(2)?),
        ("fock-3", fock(3)?),
        ("coherent-1", coherent_state(spec, c(1.0, 0.0))?.to_density()),
        ("coherent-2", plus.to_density()),
        ("cat-even", even.to_density()),
        ("cat-odd", cat_state(spec, c(2.0, 0.0), PI)?.to_density()),
        ("mixture", mix_pure(&[(0.5, plus), (0.5, minus)])?),
        ("cat-damped", evolve(&even.to_density(), &model, 0.1)?),
    ])
}

fn max_over<T>(items: &[T], f: impl Fn(&T) -> cqed_core::Result<f64>) -> cqed_core::Result<f64> {
    items.iter().try_fold(0.0f64, |m, x| Ok(m.max(f(x)?)))
}

pub fn run() -> cqed_core::Result<Vec<Check>> {
    let corpus = corpus()?;
    let config = ProtocolConfig::default();
    let model = DampingModel::zero_temperature(1.0)?;
    let mut checks = Vec::new();

    let validity = max_over(&corpus, |(_, r)| {
        Ok((r.trace().re - 1.0).abs().max(r.hermiticity_error()).max(-r.min_eigenvalue()))
    })?;
    checks.push(below("state-validity", validity, 1e-10, "trace, hermiticity and positivity of the corpus"));

    let points = [c(0.0, 0.0), c(0.7, -0.3), c(-1.2, 0.9), c(2.1, 0.4), c(-0.4, -2.2)];
    let cross = max_over(&corpus, |(_, r)| {
        max_over(&points, |a| {
            let (q, p) = (a.re * 2f64.sqrt(), a.im * 2f64.sqrt());
            Ok((wigner_point(r, *a)? - wigner_position(r, q, p)?).abs())
        })
    })?;
    checks.push(below("cross-construction", cross, 1e-6, "displaced parity vs position-space formula"));

    let grid = PhaseSpaceGrid::square(4.0, 21)?;
    let bound = max_over(&corpus, |(_, r)| Ok(wigner_map(r, &grid)?.max_abs()))?;
    checks.push(below("bound", bound, 2.0 + 1e-8, "max |W| over corpus maps"));

    let (a, b) = (&corpus[6].1, &corpus[2].1);
    let mixed = mix(&[(0.3, a.clone()), (0.7, b.clone())])?;
    let linear = max_over(&points, |p| {
        Ok((wigner_point(&mixed, *p)? - 0.3 * wigner_point(a, *p)? - 0.7 * wigner_point(b, *p)?).abs())
    })?;
    checks.push(below("linearity", linear, 1e-10, "W of a mixture is the weighted sum"));

    let fine = PhaseSpaceGrid::default_for_amplitude(2.0)?;
    let norm = (wigner_map(&corpus[6].1, &fine)?.normalization() - 1.0).abs();
    checks.push(below("normalization", norm, 1e-3, "Riemann sum for the even cat on the default grid"));

    let identity = max_over(&corpus, |(_, r)| {
        max_over(&points, |a| Ok((direct_point_exact(r, *a, &config)?.estimate - wigner_point(r, -*a)?).abs()))
    })?;
    checks.push(below("direct-identity", identity, 1e-8, "2(Pg - Pe)(alpha) = W(-alpha)"));

    let mut monomials = vec![Monomial::new(0, 0)];
    monomials.extend(Monomial::up_to(3));
    let moyal = max_over(&corpus, |(_, r)| {
        Ok(moyal_averages(r, &monomials)?.iter().fold(0.0f64, |m, x| m.max(x.discrepancy)))
    })?;
    checks.push(below("moyal", moyal, 1e-6, "symmetric monomials of degree <= 3"));

    let cat = &corpus[6].1;
    let split = evolve(&evolve(cat, &model, 0.05)?, &model, 0.1)?;
    let whole = evolve(cat, &model, 0.15)?;
    let semigroup = (split.matrix() - whole.matrix()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    checks.push(below("semigroup", semigroup, 1e-7, "evolve(evolve(rho, t1), t2) = evolve(rho, t1 + t2)"));

    let law = max_over(&[2.0f64, 5.0, 10.0], |n| {
        let fitted = fitted_coherence_time(c(n.sqrt(), 0.0), 0.0, &model)?;
        Ok((fitted / decoherence_time(&model, *n)? - 1.0).abs())
    })?;
    checks.push(below("decoherence-law", law, 0.05, "fitted coherence time vs t_diss/(2|alpha|^2)"));

    let alpha = c(5f64.sqrt(), 0.0);
    let curve: Vec<f64> = (0..=16)
        .map(|k| Ok(two_atom_conditional(alpha, 0.5 * k as f64, &model, &config)?.p_e2_given_e1.unwrap_or(f64::NAN)))
        .collect::<cqed_core::Result<_>>()?;
    checks.push(above("two-atom-start", curve[0], 1.0 - 1e-4, "P(e2|e1) at zero delay"));
    let rise = curve.windows(2).fold(f64::NEG_INFINITY, |m, w| m.max(w[1] - w[0]));
    checks.push(below("two-atom-monotone", rise, 1e-12, "largest increase of P(e2|e1) between delays"));
    checks.push(below("two-atom-tail", curve[16], 0.02, "P(e2|e1) at delay 8/kappa"));

    let pair = pauli_counterexample(HilbertSpec::new(3)?)?.evidence;
    checks.push(below("pauli-marginals", pair.marginal_deviation, 1e-8, "theta in {0, pi/2}"));
    checks.push(above("pauli-wigner", pair.wigner_deviation, 0.1, "Wigner sup-difference of the pair"));

    let q = Binning::default().centers();
    let one = fock_state(HilbertSpec::new(8)?, 1)?.to_density();
    let rec = inverse_radon(&SinogramSet::exact(&one, &uniform_angles(36), &q)?, &PhaseSpaceGrid::square(4.0, 81)?)?;
    checks.push(below("tomography-dip", rec.value(40, 40), -1.7, "noise-free 36-angle W(0,0) of one photon"));

    let binning = Binning::default();
    let h1 = sample_homodyne(&one, 0.3, 2000, 5, &binning)?;
    let h2 = sample_homodyne(&one, 0.3, 2000, 5, &binning)?;
    let same = if h1.counts == h2.counts { 0.0 } else { 1.0 };
    checks.push(below("seeded-determinism", same, 0.5, "identical seeds give identical histograms"));

    let damped = &corpus[9].1;
    let s1 = direct_point_sampled(damped, c(0.0, 0.0), 4000, 0.25, 9, &config)?;
    let s2 = direct_point_sampled(damped, c(0.0, 0.0), 4000, 0.25, 9, &config)?;
    let exact = direct_point_exact(damped, c(0.0, 0.0), &config)?.estimate;
    checks.push(below("direct-seeded", (s1.estimate - s2.estimate).abs(), 1e-300, "repeatable sampled estimate"));
    checks.push(below(
        "direct-efficiency",
        (s1.estimate - exact).abs() / s1.stderr.max(1e-12),
        4.0,
        "efficiency 0.25 estimate within 4 stderr of exact",
    ));

    let sep = separation_measure(1e-2, 1e-3, 300.0)?;
    checks.push(Check {
        name: "separation",
        pass: (1e39..=1e41).contains(&sep),
        value: sep,
        limit: 1e41,
        note: "(d/lambda_dB)^2 for 1 cm, 1 g, 300 K lies in [1e39, 1e41]".into(),
    });
    Ok(checks)
}
