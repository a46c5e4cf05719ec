use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use cqed_core::direct::{monitor_origin, pacing_warning, sample_from_exact, variant_check, SamplingPlan};
use cqed_core::dynamics::{decoherence_time, DampingModel};
use cqed_core::fock::{cat_state, coherent_state, mix_pure, DensityOperator, HilbertSpec};
use cqed_core::protocol::{prepare_cat, probe_after_delay, two_atom_conditional, Level};
use cqed_core::tomo::{reconstruct_from_samples, TomographyPlan};
use cqed_core::wigner::{
    marginal_on, pauli_counterexample, photon_number_distribution, reference_points, wigner_map, MapKind,
    PhaseSpaceGrid, WignerMap,
};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::output::{float, opt_float, OutputDir};
use crate::RunError;

pub fn prepare_cat_run(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    if cfg.dim.is_some() {
        out.warn("prepare-cat sizes its own Fock space from alpha; the dim override is ignored".into());
    }
    let prep = prepare_cat(cfg.alpha, &cfg.protocol)?;
    let branch = |level| match prep.field(level) {
        Ok(rho) => Ok(Some(rho)),
        Err(cqed_core::Error::DegenerateBranch { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let after_e = branch(Level::Excited)?;
    let after_g = branch(Level::Ground)?;
    let pops = |rho: &Option<DensityOperator>| rho.as_ref().map(photon_number_distribution);
    let (pe, pg) = (pops(&after_e), pops(&after_g));
    let rows: Vec<Vec<String>> = (0..prep.spec.dim())
        .map(|n| {
            vec![
                n.to_string(),
                opt_float(pe.as_ref().map(|p| p[n])),
                opt_float(pg.as_ref().map(|p| p[n])),
            ]
        })
        .collect();
    out.csv("populations.csv", &["n", "p_n_given_e", "p_n_given_g"], &rows)?;

    let fidelity = |rho: &Option<DensityOperator>, psi: f64| -> cqed_core::Result<Option<f64>> {
        match rho {
            Some(r) => Ok(Some(r.fidelity_to_pure(&cat_state(prep.spec, cfg.alpha, psi)?))),
            None => Ok(None),
        }
    };
    let summary = json!({
        "alpha": [cfg.alpha.re, cfg.alpha.im],
        "dim": prep.spec.dim(),
        "p_e": prep.probability(Level::Excited),
        "p_g": prep.probability(Level::Ground),
        "fidelity_e_to_odd_cat": fidelity(&after_e, std::f64::consts::PI)?,
        "fidelity_g_to_even_cat": fidelity(&after_g, 0.0)?,
    });
    out.json("summary.json", &summary)?;
    Ok(())
}

pub fn decoherence_scan(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    if cfg.dim.is_some() {
        out.warn("decoherence-scan sizes its own Fock space from alpha; the dim override is ignored".into());
    }
    let model = cfg.model()?;
    let t_dec = decoherence_time(&model, cfg.alpha.norm_sqr())?;
    let spec = HilbertSpec::for_amplitude(cfg.alpha.norm());
    let mixture =
        mix_pure(&[(0.5, coherent_state(spec, cfg.alpha)?), (0.5, coherent_state(spec, -cfg.alpha)?)])?;
    let mut rows = Vec::new();
    for t in cfg.scan.times() {
        let table = two_atom_conditional(cfg.alpha, t, &model, &cfg.protocol)?;
        let (mix_e, _) = probe_after_delay(&mixture, t, &model, &cfg.protocol)?;
        rows.push(vec![
            float(t),
            float(t / t_dec),
            float(table.p_e1),
            float(table.p_g1),
            opt_float(table.p_e2_given_e1),
            opt_float(table.p_e2_given_g1),
            float(table.p_e2),
            float(mix_e),
        ]);
    }
    out.csv(
        "decoherence_scan.csv",
        &["t", "t_over_t_dec", "p_e1", "p_g1", "p_e2_given_e1", "p_e2_given_g1", "p_e2", "p_e2_mixture"],
        &rows,
    )?;
    out.json(
        "decoherence_scan.json",
        &json!({
            "alpha": [cfg.alpha.re, cfg.alpha.im],
            "kappa": cfg.kappa,
            "n_thermal": cfg.n_thermal,
            "t_dissipation": model.dissipation_time(),
            "t_dec": t_dec,
            "mixture_input": "50/50 mixture of |alpha> and |-alpha>, probed by a single atom after the same delay",
        }),
    )?;
    Ok(())
}

fn state_details(cfg: &ExperimentConfig, rho: &DensityOperator) -> serde_json::Value {
    json!({
        "state": cfg.state,
        "alpha": [cfg.alpha.re, cfg.alpha.im],
        "dim": rho.dim(),
        "purity": rho.purity(),
        "mean_photon_number": rho.mean_photon_number(),
    })
}

pub fn wigner_map_run(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let rho = cfg.density()?;
    let map = wigner_map(&rho, &cfg.grid()?)?;
    out.wigner("wigner", &map, state_details(cfg, &rho))?;
    Ok(())
}

pub fn tomography(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let rho = cfg.density()?;
    let t = &cfg.tomography;
    // Without an explicit grid, shrink the default one until its corners
    // stay inside the reach of the outermost histogram bins.
    let grid = match cfg.grid {
        Some(g) => g,
        None => {
            let centers = t.binning.centers();
            let reach = centers[0].abs().min(centers[centers.len() - 1].abs());
            let default = cfg.grid()?;
            let half = default.q1_max.min(0.999 * reach / std::f64::consts::SQRT_2);
            PhaseSpaceGrid::square_with_step(half, default.step1())?
        }
    };
    let plan = TomographyPlan {
        angles: t.angles,
        n_per_angle: t.n_per_angle,
        seed: cfg.seed,
        grid,
        binning: t.binning,
        fringe_region: t.fringe_region,
    };
    let rec = reconstruct_from_samples(&rho, &plan)?;
    let s = &rec.sinogram;
    let mut rows = Vec::with_capacity(s.angles().len() * s.q().len());
    for (theta, densities) in s.angles().iter().zip(s.densities()) {
        for (q, d) in s.q().iter().zip(densities) {
            rows.push(vec![float(*theta), float(*q), float(*d)]);
        }
    }
    let sha = out.csv("sinogram.csv", &["theta", "q", "density"], &rows)?;
    out.json(
        "sinogram.json",
        &json!({
            "data": "sinogram.csv",
            "angles": s.angles().len(),
            "bins": s.q().len(),
            "binning": t.binning,
            "n_per_angle": t.n_per_angle,
            "seed": cfg.seed,
            "seed_derivation": "angle k draws from ChaCha8 stream k of the seed",
            "sha256": sha,
        }),
    )?;
    out.wigner("reconstruction", &rec.map, state_details(cfg, &rho))?;
    out.json("report.json", &rec.report)?;
    if !rec.report.checks.within_bound {
        out.warn(format!("reconstructed map exceeds |W| <= 2: max {}", rec.report.checks.max_abs));
    }
    Ok(())
}

fn warn_pacing(cfg: &ExperimentConfig, rho: &DensityOperator, model: &DampingModel, out: &mut OutputDir) {
    let Some(interval) = cfg.direct.shot_interval else { return };
    let n = rho.mean_photon_number();
    if let Ok(t_dec) = decoherence_time(model, n) {
        if let Some(msg) = pacing_warning(interval, cfg.direct.efficiency, t_dec) {
            out.warn(msg);
        }
    }
}

pub fn direct_map(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let rho = cfg.density()?;
    let model = cfg.model()?;
    warn_pacing(cfg, &rho, &model, out);
    let grid: PhaseSpaceGrid = cfg.grid()?;
    let mut values = Vec::with_capacity(grid.len());
    let mut rows = Vec::with_capacity(grid.len());
    for i in 0..grid.n1 {
        for j in 0..grid.n2 {
            let k = (i * grid.n2 + j) as u64;
            let injected = -grid.alpha(i, j);
            let exact = variant_check(&rho, cfg.direct.variant, injected, &cfg.protocol)?;
            let record = match cfg.direct.n_shots {
                Some(n) => sample_from_exact(&exact, n, cfg.direct.efficiency, cfg.seed, k)?,
                None => exact,
            };
            values.push(record.estimate);
            rows.push(vec![
                float(grid.q1(i)),
                float(grid.q2(j)),
                float(injected.re),
                float(injected.im),
                float(exact.p_e),
                float(exact.p_g),
                record.n_shots.to_string(),
                record.n_detected.to_string(),
                float(record.estimate),
                float(record.stderr),
                float(exact.estimate),
            ]);
        }
    }
    out.csv(
        "records.csv",
        &[
            "q1", "q2", "alpha_re", "alpha_im", "p_e", "p_g", "n_shots", "n_detected", "estimate", "stderr", "exact",
        ],
        &rows,
    )?;
    let map = WignerMap::from_values(grid, MapKind::MeasuredDirect, values)?;
    let mut details = state_details(cfg, &rho);
    details["variant"] = json!(cfg.direct.variant);
    details["estimator"] = json!(if cfg.direct.n_shots.is_some() { "sampled" } else { "exact" });
    details["injection"] = json!("grid point beta is read out by injecting -beta");
    if cfg.direct.n_shots.is_some() {
        details["seed_derivation"] = json!("grid point k (q1 outer, q2 inner) draws from ChaCha8 stream k of the seed");
    }
    out.wigner("direct_map", &map, details)?;
    Ok(())
}

pub fn direct_monitor(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let rho = cfg.density()?;
    let model = cfg.model()?;
    warn_pacing(cfg, &rho, &model, out);
    let plan = cfg
        .direct
        .n_shots
        .map(|n| SamplingPlan { n_shots: n, efficiency: cfg.direct.efficiency, seed: cfg.seed });
    let points = monitor_origin(&rho, &model, &cfg.scan.times(), &cfg.protocol, plan.as_ref())?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                float(p.t),
                float(p.exact.estimate),
                opt_float(p.sampled.map(|s| s.estimate)),
                opt_float(p.sampled.map(|s| s.stderr)),
            ]
        })
        .collect();
    out.csv("monitor.csv", &["t", "W0_exact", "W0_sampled", "stderr"], &rows)?;
    Ok(())
}

pub fn pauli_demo(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<(), RunError> {
    let grid = match cfg.grid {
        Some(g) => g,
        None => PhaseSpaceGrid::square(4.0, 81)?,
    };
    let pair = pauli_counterexample(HilbertSpec::new(cfg.dim.unwrap_or(3))?)?;
    let report = cqed_core::tomo::pauli_incompleteness_demo(&grid)?;
    let (a, b) = (pair.state_a.to_density(), pair.state_b.to_density());
    let q = reference_points();
    let mut columns = Vec::new();
    for theta in [0.0, FRAC_PI_2, FRAC_PI_4] {
        columns.push(marginal_on(&a, theta, &q)?);
        columns.push(marginal_on(&b, theta, &q)?);
    }
    let rows: Vec<Vec<String>> = q
        .iter()
        .enumerate()
        .map(|(k, x)| std::iter::once(float(*x)).chain(columns.iter().map(|c| float(c[k]))).collect())
        .collect();
    out.csv("marginals.csv", &["q", "a_0", "b_0", "a_pi_2", "b_pi_2", "a_pi_4", "b_pi_4"], &rows)?;
    out.json(
        "pauli.json",
        &json!({
            "state_a": "(|0> + i|2>)/sqrt(2)",
            "state_b": "(|0> - i|2>)/sqrt(2)",
            "evidence": pair.evidence,
            "tomography": report,
        }),
    )?;
    Ok(())
}
