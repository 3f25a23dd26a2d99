use num_complex::Complex64;
use serde_json::json;

use normcell::acf::{ou_limit_curve, phase_acf_analytic, time_acf_closed_form, time_acf_numeric};
use normcell::dynamics::momentum_series_from_modes;
use normcell::ensemble::{ensemble_acf, khintchine_identity_check, normal_cell_fraction, variance_scaling, Assembly};
use normcell::sampling::{energy_shell_modes, maxwell_boltzmann_modes, member_rng, ShellSpec};
use normcell::spectral::{
    build_spectrum, coupling_matrix, dense_eigenvalues, dense_propagator, mode_transform, propagator_matrix,
    Direction, PropagatorKind,
};
use normcell::{Normalization, SamplerKind, TauGrid};

use crate::config::{Experiment, RunConfig};
use crate::output::{Cell, Table};
use crate::CliError;

const PROPAGATOR_TOLERANCE: f64 = 1e-10;
const ROUND_TRIP_TOLERANCE: f64 = 1e-12;
const EIGENVALUE_TOLERANCE: f64 = 1e-8;

pub fn run(config: &RunConfig) -> Result<Table, CliError> {
    match config.experiment {
        Experiment::Spectrum => spectrum(config),
        Experiment::AcfTime => acf_time(config),
        Experiment::AcfPhase => acf_phase(config),
        Experiment::Limit => limit(config),
        Experiment::Ensemble => ensemble(config),
        Experiment::NormalCell => normal_cell(config),
        Experiment::VarianceScaling => scaling(config),
        Experiment::OracleCheck => oracle_check(config),
    }
}

fn assembly(config: &RunConfig) -> Result<Assembly, CliError> {
    let shell = ShellSpec::new(config.energy).map_err(CliError::from_core)?;
    Assembly::with_shell(config.assembly.clone(), shell).map_err(CliError::from_core)
}

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn spectrum(config: &RunConfig) -> Result<Table, CliError> {
    let s = build_spectrum(&config.assembly).map_err(CliError::from_core)?;
    let n = s.half_size() as i64;
    Ok(Table {
        columns: vec!["k", "omega"],
        rows: s
            .frequencies()
            .iter()
            .enumerate()
            .map(|(i, &w)| vec![Cell::Int(i as i64 - n), num(w)])
            .collect(),
        report: Some(json!({ "max_frequency": s.max_frequency() })),
    })
}

fn acf_time(config: &RunConfig) -> Result<Table, CliError> {
    let a = assembly(config)?;
    let grid = config.grid()?;
    let mut rng = member_rng(config.assembly.rng_seed, 0);
    let modes = match SamplerKind::from(config.sampler) {
        SamplerKind::Shell => energy_shell_modes(&a.spectrum, &a.shell, &mut rng),
        SamplerKind::MaxwellBoltzmann => maxwell_boltzmann_modes(&a.spectrum, config.assembly.temperature, &mut rng),
    }
    .map_err(CliError::from_core)?;
    let series = momentum_series_from_modes(&modes, &a.spectrum).map_err(CliError::from_core)?;
    let fastest = series.max_frequency();
    let bound = if fastest > 0.0 {
        (std::f64::consts::PI / (4.0 * fastest)).min(grid.step() / 2.0)
    } else {
        grid.step() / 2.0
    };
    let step = config.time_step.unwrap_or(bound);
    if step > bound {
        return Err(CliError::Config(format!("time_step {step} exceeds the admissible bound {bound}")));
    }
    let closed = time_acf_closed_form(&series, grid);
    let unit = closed.unit_at_zero();
    let numeric = time_acf_numeric(&series, grid, config.horizon, step).map_err(CliError::from_core)?;
    let gap = numeric.max_abs_diff(&closed).map_err(CliError::from_core)?;
    Ok(Table {
        columns: vec!["tau", "closed_form", "unit", "numeric"],
        rows: (0..grid.count())
            .map(|i| vec![num(grid.point(i)), num(closed.values[i]), num(unit.values[i]), num(numeric.values[i])])
            .collect(),
        report: Some(json!({
            "time_step": step,
            "horizon": config.horizon,
            "terms": series.len(),
            "max_numeric_error": gap,
        })),
    })
}

fn acf_phase(config: &RunConfig) -> Result<Table, CliError> {
    let s = build_spectrum(&config.assembly).map_err(CliError::from_core)?;
    let grid = config.grid()?;
    let raw = phase_acf_analytic(&s, config.assembly.temperature, grid).map_err(CliError::from_core)?;
    let unit = raw.unit_at_zero();
    let lim = ou_limit_curve(grid, Normalization::UnitAtZero);
    let gap = unit.max_abs_diff(&lim).map_err(CliError::from_core)?;
    Ok(Table {
        columns: vec!["tau", "raw", "unit", "limit"],
        rows: (0..grid.count())
            .map(|i| vec![num(grid.point(i)), num(raw.values[i]), num(unit.values[i]), num(lim.values[i])])
            .collect(),
        report: Some(json!({ "max_limit_gap": gap })),
    })
}

fn limit(config: &RunConfig) -> Result<Table, CliError> {
    let grid = config.grid()?;
    let raw = ou_limit_curve(grid, Normalization::Raw);
    let unit = ou_limit_curve(grid, Normalization::UnitAtZero);
    Ok(Table {
        columns: vec!["tau", "raw", "unit"],
        rows: (0..grid.count())
            .map(|i| vec![num(grid.point(i)), num(raw.values[i]), num(unit.values[i])])
            .collect(),
        report: None,
    })
}

fn ensemble(config: &RunConfig) -> Result<Table, CliError> {
    let a = assembly(config)?;
    let grid = config.grid()?;
    let stats = ensemble_acf(&a, config.sampler.into(), config.samples, grid, config.assembly.rng_seed)
        .map_err(CliError::from_core)?;
    let analytic = phase_acf_analytic(&a.spectrum, config.assembly.temperature, grid).map_err(CliError::from_core)?;
    let z = khintchine_identity_check(&stats, &analytic).map_err(CliError::from_core)?;
    let max_z = z.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(Table {
        columns: vec!["tau", "mean", "variance", "std_error", "analytic", "z"],
        rows: (0..grid.count())
            .map(|i| {
                vec![
                    num(grid.point(i)),
                    num(stats.mean[i]),
                    num(stats.variance[i]),
                    num(stats.std_error(i)),
                    num(analytic.values[i]),
                    num(z[i]),
                ]
            })
            .collect(),
        report: Some(json!({ "assembly": stats.assembly, "sample_count": stats.sample_count, "max_abs_z": max_z })),
    })
}

fn normal_cell(config: &RunConfig) -> Result<Table, CliError> {
    let a = assembly(config)?;
    let report = normal_cell_fraction(
        &a,
        config.epsilon,
        config.window,
        config.mesh_width,
        config.samples,
        config.assembly.rng_seed,
    )
    .map_err(CliError::from_core)?;
    let mesh = TauGrid::covering(config.window, config.mesh_width).map_err(CliError::from_core)?;
    let target = phase_acf_analytic(&a.spectrum, config.assembly.temperature, mesh)
        .map_err(CliError::from_core)?
        .unit_at_zero();
    let lim = ou_limit_curve(mesh, Normalization::UnitAtZero);
    let rows = (0..mesh.count())
        .map(|i| {
            vec![
                num(mesh.point(i)),
                num(target.values[i]),
                num(lim.values[i]),
                Cell::Int(report.per_tau_deviations[i] as i64),
                Cell::Int(report.per_tau_limit_deviations[i] as i64),
            ]
        })
        .collect();
    let mut summary = serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(map) = summary.as_object_mut() {
        map.remove("per_tau_deviations");
        map.remove("per_tau_limit_deviations");
    }
    Ok(Table {
        columns: vec!["tau", "target", "limit", "deviations", "limit_deviations"],
        rows,
        report: Some(summary),
    })
}

fn scaling(config: &RunConfig) -> Result<Table, CliError> {
    let fit = variance_scaling(
        &config.assembly,
        &config.half_sizes,
        config.tau,
        config.samples,
        config.assembly.rng_seed,
    )
    .map_err(CliError::from_core)?;
    Ok(Table {
        columns: vec!["half_size", "size", "variance", "scaled_variance"],
        rows: fit
            .half_sizes
            .iter()
            .zip(&fit.variances)
            .map(|(&n, &v)| {
                let size = 2 * n + 1;
                vec![Cell::Int(n as i64), Cell::Int(size as i64), num(v), num(v * size as f64)]
            })
            .collect(),
        report: Some(json!({
            "tau": fit.tau,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "reference_constant": fit.reference_constant(),
        })),
    })
}

fn oracle_check(config: &RunConfig) -> Result<Table, CliError> {
    let s = build_spectrum(&config.assembly).map_err(CliError::from_core)?;
    let a = coupling_matrix(&s).map_err(CliError::from_core)?;

    let mut propagator = 0.0f64;
    for kind in [PropagatorKind::Cos, PropagatorKind::OmegaSin] {
        for t in [0.1, 1.0, 10.0] {
            let fast = propagator_matrix(&s, kind, t).map_err(CliError::from_core)?;
            let dense = dense_propagator(&a, kind, t).map_err(CliError::from_core)?;
            propagator = propagator.max((fast - dense).amax());
        }
    }

    let mut expected: Vec<f64> = s.frequencies().iter().map(|w| w * w).collect();
    expected.sort_by(f64::total_cmp);
    let scale = expected.last().copied().unwrap_or(1.0).max(1.0);
    let eigen = dense_eigenvalues(&a)
        .iter()
        .zip(&expected)
        .map(|(g, w)| (g - w).abs() / scale)
        .fold(0.0f64, f64::max);

    let mut rng = member_rng(config.assembly.rng_seed, 0);
    let v: Vec<Complex64> = (0..s.len())
        .map(|_| {
            use rand::Rng;
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .collect();
    let back = mode_transform(&mode_transform(&v, Direction::Forward).map_err(CliError::from_core)?, Direction::Inverse)
        .map_err(CliError::from_core)?;
    let round_trip = v.iter().zip(&back).map(|(x, y)| (x - y).norm()).fold(0.0f64, f64::max);

    let checks = [
        ("max_propagator_error", propagator, PROPAGATOR_TOLERANCE),
        ("max_relative_eigenvalue_error", eigen, EIGENVALUE_TOLERANCE),
        ("max_round_trip_error", round_trip, ROUND_TRIP_TOLERANCE),
    ];
    let pass = checks.iter().all(|(_, v, t)| v < t);
    Ok(Table {
        columns: vec!["check", "value", "threshold", "pass"],
        rows: checks
            .iter()
            .map(|(name, v, t)| vec![Cell::Text(name.to_string()), num(*v), num(*t), Cell::Bool(v < t)])
            .collect(),
        report: Some(json!({
            "max_propagator_error": propagator,
            "max_relative_eigenvalue_error": eigen,
            "max_round_trip_error": round_trip,
            "pass": pass,
        })),
    })
}
