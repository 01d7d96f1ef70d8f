//! One runner per experiment kind.

use std::fmt::Write as _;
use std::time::Instant;

use qfi_core::circuit::{global_sensing_spec, symmetric_projector, symmetric_trace_h2, FloquetCircuit};
use qfi_core::concentration::default_delta_grid;
use qfi_core::metrology::spectral_form_factors;
use qfi_core::weingarten::{
    k_analytics, partitions, predict_qfi, qfi_t1_exact, sym_predictions, weingarten_moment, weingarten_table,
    AsymptoticPrediction, Permutation,
};
use qfi_core::{
    fit_scaling, fluctuation_stats, lipschitz_bound, make_state, qfi_trajectory, qfi_upper_bound, random_state,
    run_ensemble, sample_cue, tail_bound, ChainGeometry, EnsembleConfig, EnsembleResult, FitModel, LocalSensingSpec,
    ModelKind, ProtocolKind, SensingSpec, StateVector,
};

use crate::config::{
    Concentration, CueEquivalence, Experiment, ExperimentConfig, RmmState, RmmTime, RqcSites, RqcTime, Sff,
    SymmetricCheck, T1Exact, TimeCheck, WeingartenDump,
};
use crate::report::{default_plot, BoundCheck, ConcentrationRecord, RunReport, Series, Timings, Verdict};
use crate::CliError;

/// Validates, runs and returns the report; nothing is written to disk.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let start = Instant::now();
    let mut ctx = Context::new(config);
    match &config.experiment {
        Experiment::RmmTime(c) => rmm_time(&mut ctx, c)?,
        Experiment::RqcSites(c) => rqc_sites(&mut ctx, c)?,
        Experiment::RqcTime(c) => rqc_time(&mut ctx, c)?,
        Experiment::Sff(c) => sff(&mut ctx, c)?,
        Experiment::T1Exact(c) => t1_exact(&mut ctx, c)?,
        Experiment::WeingartenDump(c) => weingarten_dump(&mut ctx, c)?,
        Experiment::Concentration(c) => concentration(&mut ctx, c)?,
        Experiment::CueEquivalence(c) => cue_equivalence(&mut ctx, c)?,
        Experiment::SymmetricCheck(c) => symmetric_check(&mut ctx, c)?,
    }
    Ok(ctx.finish(start.elapsed().as_secs_f64()))
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    series: Vec<Series>,
    verdicts: Vec<Verdict>,
    bound: Option<BoundCheck>,
    concentration: Vec<ConcentrationRecord>,
    notes: Vec<String>,
    extra_files: Vec<(String, String)>,
    samples_csv: String,
    axes: (&'static str, &'static str),
}

impl<'a> Context<'a> {
    fn new(config: &'a ExperimentConfig) -> Self {
        Self {
            config,
            series: Vec::new(),
            verdicts: Vec::new(),
            bound: None,
            concentration: Vec::new(),
            notes: Vec::new(),
            extra_files: Vec::new(),
            samples_csv: String::new(),
            axes: ("t", "QFI"),
        }
    }

    fn ensemble(&self, estimator: &str, prefix: u64, parameters: serde_json::Value) -> EnsembleConfig {
        EnsembleConfig::new(estimator, self.config.samples, self.config.seed)
            .with_prefix(vec![prefix])
            .with_parameters(parameters)
            .with_threads(self.config.threads)
    }

    fn record_samples(&mut self, label: &str, result: &EnsembleResult, columns: &[String]) {
        if self.samples_csv.is_empty() {
            self.samples_csv.push_str("ensemble,sample,seed_path,column,value\n");
        }
        for (i, row) in result.samples.iter().enumerate() {
            let path = result.config.seed_path(i);
            for (name, v) in columns.iter().zip(row) {
                writeln!(self.samples_csv, "{label},{i},{path},{name},{v:e}").unwrap();
            }
        }
    }

    fn bound_check(&mut self) -> &mut BoundCheck {
        self.bound.get_or_insert_with(BoundCheck::default)
    }

    /// Tail fractions of `values` against `min(1, 2 exp(-D δ^2 / 4 lip^2))`.
    fn record_concentration(&mut self, series: &str, x: f64, values: &[f64], dim_scale: f64, lip: f64, points: usize) -> Result<(), CliError> {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let grid = default_delta_grid(mean, points);
        let stats = fluctuation_stats(values, &grid)?;
        let violations = stats.bound_violations(dim_scale, lip).len();
        let first_informative_delta = grid.iter().copied().find(|&d| tail_bound(dim_scale, d, lip) < 1.0);
        self.concentration.push(ConcentrationRecord {
            series: series.into(),
            x,
            dim_scale,
            lipschitz: lip,
            relative_std: stats.relative_std(),
            violations,
            first_informative_delta,
        });
        Ok(())
    }

    fn finish(mut self, seconds: f64) -> RunReport {
        if let Some(b) = self.bound {
            self.verdicts.push(Verdict::at_most(
                "hard-bound",
                b.violations as f64,
                0.0,
                format!("{} realizations checked against t^2 Δ^2 + {:e}, max ratio {:.4}", b.checked, BoundCheck::SLACK, b.max_ratio),
            ));
        }
        if !self.concentration.is_empty() {
            let total: usize = self.concentration.iter().map(|c| c.violations).sum();
            let vacuous = self.concentration.iter().filter(|c| c.first_informative_delta.is_none()).count();
            self.verdicts.push(Verdict::at_most(
                "concentration-tail",
                total as f64,
                0.0,
                format!(
                    "grid points where the empirical tail exceeds the clamped bound; bound vacuous on the whole grid for {vacuous} of {} ensembles",
                    self.concentration.len()
                ),
            ));
        }
        let plot = (!self.series.is_empty()).then(|| default_plot(self.config, &self.series, self.axes.0, self.axes.1));
        RunReport {
            config: self.config.clone(),
            series: self.series,
            verdicts: self.verdicts,
            bound_check: self.bound,
            concentration: self.concentration,
            substitutions: self.config.substitutions.clone(),
            notes: self.notes,
            timings: Timings { compute_seconds: seconds },
            extra_files: self.extra_files,
            samples_csv: self.samples_csv,
            plot,
        }
    }
}

fn protocol_fit_model(p: ProtocolKind) -> FitModel {
    match p {
        ProtocolKind::Control => FitModel::LinearThroughOrigin,
        ProtocolKind::StatePrep => FitModel::QuadraticThroughOrigin,
    }
}

fn time_power(p: ProtocolKind, t: f64) -> f64 {
    match p {
        ProtocolKind::Control => t,
        ProtocolKind::StatePrep => t * t,
    }
}

fn rmm_time(ctx: &mut Context, c: &RmmTime) -> Result<(), CliError> {
    let h = c.hamiltonian.build(c.dim)?;
    let spec = SensingSpec::new(h, c.theta)?;
    let n = c.dim;
    let cfg = ctx.ensemble("rmm-time", 0, serde_json::to_value(c).unwrap());
    let protocols = c.protocols.clone();
    let state = c.initial_state;
    let result = run_ensemble(&cfg, |_, path| {
        let u = sample_cue(n, &path.child(0))?;
        let psi0 = match state {
            RmmState::Basis => StateVector::basis(n, 0)?,
            RmmState::Random => random_state(n, &path.child(1))?,
        };
        let mut row = Vec::with_capacity(protocols.len() * c.t_max);
        for &p in &protocols {
            row.extend_from_slice(&qfi_trajectory(p, &u, &spec, c.t_max, &psi0)?[1..]);
        }
        Ok(row)
    })?;
    let columns: Vec<String> = c
        .protocols
        .iter()
        .flat_map(|p| (1..=c.t_max).map(move |t| format!("{}_t{t}", p.label())))
        .collect();
    ctx.record_samples("rmm-time", &result, &columns);
    let delta = spec.spectral_width();
    for (k, &p) in c.protocols.iter().enumerate() {
        let pred = AsymptoticPrediction::rmm(p, spec.trace_sq(), n);
        let x: Vec<f64> = (1..=c.t_max).map(|t| t as f64).collect();
        let summary = &result.summary[k * c.t_max..(k + 1) * c.t_max];
        let mean: Vec<f64> = summary.iter().map(|s| s.mean).collect();
        for t in 1..=c.t_max {
            let col = result.column(k * c.t_max + t - 1);
            for &f in &col {
                ctx.bound_check().record(f, qfi_upper_bound(t, delta));
            }
            let lip = lipschitz_bound(p, ModelKind::Rmm, t, delta, 1).value;
            ctx.record_concentration(p.label(), t as f64, &col, n as f64, lip, 20)?;
        }
        let fit = fit_scaling(&x, &mean, protocol_fit_model(p))?;
        let expected = predict_qfi(&pred, 1.0);
        ctx.verdicts.push(Verdict::within(
            format!("fit-{}", p.label()),
            fit.coefficients[0],
            expected,
            c.fit_tolerance * expected,
            format!("through-origin coefficient against 4 Tr H0^2 / N, relative tolerance {}", c.fit_tolerance),
        ));
        ctx.series.push(Series {
            label: p.label().into(),
            prediction: x.iter().map(|&t| predict_qfi(&pred, t)).collect(),
            x,
            mean,
            stderr: summary.iter().map(|s| s.stderr).collect(),
            fit: Some(fit),
        });
    }
    Ok(())
}

struct Chain {
    geom: ChainGeometry,
    local: LocalSensingSpec,
    spec: SensingSpec,
}

fn chain(sites: usize, q: usize, h: &crate::config::HamiltonianSpec, theta: f64) -> Result<Chain, CliError> {
    let geom = ChainGeometry::new(sites, q)?;
    let local = LocalSensingSpec::new(h.build(q)?, theta)?;
    let spec = global_sensing_spec(&geom, &local)?;
    Ok(Chain { geom, local, spec })
}

fn rqc_sites(ctx: &mut Context, c: &RqcSites) -> Result<(), CliError> {
    ctx.axes = ("L", "QFI");
    let mut per_protocol: Vec<Vec<(f64, f64)>> = vec![Vec::new(); c.protocols.len()];
    let local = LocalSensingSpec::new(c.hamiltonian.build(c.local_dim)?, c.theta)?;
    let (trh2, width) = (local.trace_sq(), local.spectral_width());
    for (li, &l) in c.sites.iter().enumerate() {
        let ch = chain(l, c.local_dim, &c.hamiltonian, c.theta)?;
        let schedule = c.schedule.resolve(l);
        let psi0 = make_state(&c.initial_state.kind(), &ch.geom)?;
        let cfg = ctx.ensemble("rqc-sites", li as u64, serde_json::json!({"sites": l, "local_dim": c.local_dim, "t": c.t}));
        let result = run_ensemble(&cfg, |_, path| {
            let circuit = FloquetCircuit::sample(ch.geom, &schedule, &path.child(0))?;
            c.protocols
                .iter()
                .map(|&p| Ok(qfi_trajectory(p, &circuit, &ch.spec, c.t, &psi0)?[c.t]))
                .collect()
        })?;
        let columns: Vec<String> = c.protocols.iter().map(|p| p.label().to_string()).collect();
        ctx.record_samples(&format!("L{l}"), &result, &columns);
        for (k, &p) in c.protocols.iter().enumerate() {
            let col = result.column(k);
            for &f in &col {
                ctx.bound_check().record(f, qfi_upper_bound(c.t, ch.spec.spectral_width()));
            }
            let lip = lipschitz_bound(p, ModelKind::Rqc, c.t, width, l).value;
            ctx.record_concentration(p.label(), l as f64, &col, c.local_dim as f64, lip, 20)?;
            per_protocol[k].push((result.summary[k].mean, result.summary[k].stderr));
        }
    }
    let x: Vec<f64> = c.sites.iter().map(|&l| l as f64).collect();
    for (k, &p) in c.protocols.iter().enumerate() {
        let mean: Vec<f64> = per_protocol[k].iter().map(|m| m.0).collect();
        let fit = fit_scaling(&x, &mean, FitModel::LinearThroughOrigin)?;
        let slope = 4.0 * trh2 * time_power(p, c.t as f64) / c.local_dim as f64;
        ctx.verdicts.push(Verdict::within(
            format!("slope-{}", p.label()),
            fit.coefficients[0],
            slope,
            c.slope_tolerance * slope,
            format!("slope in L against 4 Tr h0^2 t^k / q, relative tolerance {}", c.slope_tolerance),
        ));
        ctx.series.push(Series {
            label: p.label().into(),
            prediction: c
                .sites
                .iter()
                .map(|&l| predict_qfi(&AsymptoticPrediction::rqc(p, trh2, c.local_dim, l), c.t as f64))
                .collect(),
            x: x.clone(),
            mean,
            stderr: per_protocol[k].iter().map(|m| m.1).collect(),
            fit: Some(fit),
        });
    }
    Ok(())
}

fn rqc_time(ctx: &mut Context, c: &RqcTime) -> Result<(), CliError> {
    let ch = chain(c.sites, c.local_dim, &c.hamiltonian, c.theta)?;
    let schedule = c.schedule.resolve(c.sites);
    let psi0 = make_state(&c.initial_state.kind(), &ch.geom)?;
    let cfg = ctx.ensemble("rqc-time", 0, serde_json::to_value(c).unwrap());
    let result = run_ensemble(&cfg, |_, path| {
        let circuit = FloquetCircuit::sample(ch.geom, &schedule, &path.child(0))?;
        let mut row = Vec::with_capacity(c.protocols.len() * c.t_max);
        for &p in &c.protocols {
            row.extend_from_slice(&qfi_trajectory(p, &circuit, &ch.spec, c.t_max, &psi0)?[1..]);
        }
        Ok(row)
    })?;
    let columns: Vec<String> = c
        .protocols
        .iter()
        .flat_map(|p| (1..=c.t_max).map(move |t| format!("{}_t{t}", p.label())))
        .collect();
    ctx.record_samples("rqc-time", &result, &columns);
    let trh2 = ch.local.trace_sq();
    for (k, &p) in c.protocols.iter().enumerate() {
        let pred = AsymptoticPrediction::rqc(p, trh2, c.local_dim, c.sites);
        let x: Vec<f64> = (1..=c.t_max).map(|t| t as f64).collect();
        let summary = &result.summary[k * c.t_max..(k + 1) * c.t_max];
        let mean: Vec<f64> = summary.iter().map(|s| s.mean).collect();
        let stderr: Vec<f64> = summary.iter().map(|s| s.stderr).collect();
        for t in 1..=c.t_max {
            let col = result.column(k * c.t_max + t - 1);
            for &f in &col {
                ctx.bound_check().record(f, qfi_upper_bound(t, ch.spec.spectral_width()));
            }
            let lip = lipschitz_bound(p, ModelKind::Rqc, t, ch.local.spectral_width(), c.sites).value;
            ctx.record_concentration(p.label(), t as f64, &col, c.local_dim as f64, lip, 20)?;
        }
        let fit = fit_scaling(&x, &mean, protocol_fit_model(p))?;
        let peak = mean.iter().copied().fold(0.0, f64::max);
        match c.check {
            TimeCheck::Fits => ctx.verdicts.push(Verdict::at_most(
                format!("fit-residual-{}", p.label()),
                fit.residual_rms / peak,
                c.tolerance,
                "residual RMS of the through-origin fit relative to the curve maximum",
            )),
            TimeCheck::Envelope if p == ProtocolKind::Control => {
                // between the linear law and its quadratic continuation
                let per_step = predict_qfi(&pred, 1.0);
                let worst = x
                    .iter()
                    .zip(&mean)
                    .zip(&stderr)
                    .map(|((&t, &m), &se)| {
                        let lower = per_step * t * (1.0 - c.tolerance) - 3.0 * se;
                        let upper = per_step * t * t * (1.0 + c.tolerance) + 3.0 * se;
                        if m < lower {
                            (lower - m) / lower
                        } else if m > upper {
                            (m - upper) / upper
                        } else {
                            0.0
                        }
                    })
                    .fold(0.0, f64::max);
                ctx.verdicts.push(Verdict::at_most(
                    "envelope-ctr",
                    worst,
                    0.0,
                    format!(
                        "mean within [(1 - {tol}) c t - 3 SE, (1 + {tol}) c t^2 + 3 SE], c = 4 L Tr h0^2 / q",
                        tol = c.tolerance
                    ),
                ));
            }
            TimeCheck::Envelope => {}
        }
        ctx.series.push(Series {
            label: p.label().into(),
            prediction: x.iter().map(|&t| predict_qfi(&pred, t)).collect(),
            x,
            mean,
            stderr,
            fit: Some(fit),
        });
    }
    Ok(())
}

fn sff(ctx: &mut Context, c: &Sff) -> Result<(), CliError> {
    ctx.axes = ("t", "spectral form factor");
    let spec = SensingSpec::new(c.hamiltonian.build(c.dim)?, c.theta)?;
    let n = c.dim;
    let cfg = ctx.ensemble("sff", 0, serde_json::to_value(c).unwrap());
    let result = run_ensemble(&cfg, |_, path| {
        let u = sample_cue(n, &path.child(0))?;
        Ok(spectral_form_factors(c.protocol, &u, &spec, &c.t_values)?)
    })?;
    let columns: Vec<String> = c.t_values.iter().map(|t| format!("t{t}")).collect();
    ctx.record_samples("sff", &result, &columns);
    let prediction: Vec<f64> = c
        .t_values
        .iter()
        .map(|&t| match c.protocol {
            ProtocolKind::Control => t.min(n) as f64,
            ProtocolKind::StatePrep => {
                let tr: qfi_core::C64 = spec.phases().iter().map(|p| p.powi(t as i32)).sum();
                k_analytics(t, tr.norm_sqr(), n).1
            }
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, s) in result.summary.iter().enumerate() {
        let allowed = (c.se_multiple * s.stderr).max(c.relative_tolerance * prediction[i].abs());
        worst = worst.max((s.mean - prediction[i]).abs() / allowed);
    }
    ctx.verdicts.push(Verdict::at_most(
        format!("sff-{}", c.protocol.label()),
        worst,
        1.0,
        format!(
            "largest |mean - prediction| / max({} SE, {} relative)",
            c.se_multiple, c.relative_tolerance
        ),
    ));
    ctx.series.push(Series {
        label: format!("K_{}", c.protocol.label()),
        x: c.t_values.iter().map(|&t| t as f64).collect(),
        mean: result.summary.iter().map(|s| s.mean).collect(),
        stderr: result.summary.iter().map(|s| s.stderr).collect(),
        prediction,
        fit: None,
    });
    Ok(())
}

fn t1_exact(ctx: &mut Context, c: &T1Exact) -> Result<(), CliError> {
    let spec = SensingSpec::new(c.hamiltonian.build(c.dim)?, c.theta)?;
    let n = c.dim;
    let exact = qfi_t1_exact(n, spec.trace(), spec.trace_sq())?;
    let cfg = ctx.ensemble("t1-exact", 0, serde_json::to_value(c).unwrap());
    let psi0 = StateVector::basis(n, 0)?;
    let result = run_ensemble(&cfg, |_, path| {
        let u = sample_cue(n, &path.child(0))?;
        Ok(vec![qfi_trajectory(ProtocolKind::Control, &u, &spec, 1, &psi0)?[1]])
    })?;
    ctx.record_samples("t1-exact", &result, &["ctr_t1".to_string()]);
    let col = result.column(0);
    for &f in &col {
        ctx.bound_check().record(f, qfi_upper_bound(1, spec.spectral_width()));
    }
    let lip = lipschitz_bound(ProtocolKind::Control, ModelKind::Rmm, 1, spec.spectral_width(), 1).value;
    ctx.record_concentration("ctr", 1.0, &col, n as f64, lip, 20)?;
    let s = result.summary[0];
    ctx.verdicts.push(Verdict::within(
        "t1-exact",
        s.mean,
        exact,
        c.se_multiple * s.stderr,
        format!("Monte Carlo mean within {} SE of the exact one-step average", c.se_multiple),
    ));
    ctx.series.push(Series {
        label: "ctr".into(),
        x: vec![1.0],
        mean: vec![s.mean],
        stderr: vec![s.stderr],
        prediction: vec![exact],
        fit: None,
    });
    Ok(())
}

fn weingarten_dump(ctx: &mut Context, c: &WeingartenDump) -> Result<(), CliError> {
    ctx.axes = ("cycle type index", "Wg");
    let table = weingarten_table(c.t, c.dim)?;
    let json = serde_json::to_string_pretty(&table.to_json()).expect("table serializes");
    ctx.extra_files.push(("weingarten.json".into(), json + "\n"));
    if ctx.config.samples == 0 {
        return Ok(());
    }
    if c.t > c.dim {
        ctx.notes.push(format!("moment check skipped: the estimator needs t <= N (t = {}, N = {})", c.t, c.dim));
        return Ok(());
    }
    let classes = partitions(c.t);
    let reps: Vec<Permutation> = classes.iter().map(Permutation::representative).collect();
    let cfg = ctx.ensemble("weingarten-moments", 0, serde_json::to_value(c).unwrap());
    let n = c.dim;
    let result = run_ensemble(&cfg, |_, path| {
        let u = sample_cue(n, &path.child(0))?;
        reps.iter().map(|p| Ok(weingarten_moment(&u, p)?.re)).collect()
    })?;
    let columns: Vec<String> = classes.iter().map(|ct| format!("wg{ct}").replace(',', "_")).collect();
    ctx.record_samples("weingarten", &result, &columns);
    let exact: Vec<f64> = classes.iter().map(|ct| table.value(ct).expect("class in table")).collect();
    let worst = result
        .summary
        .iter()
        .zip(&exact)
        .map(|(s, e)| (s.mean - e).abs() / (c.se_multiple * s.stderr))
        .fold(0.0, f64::max);
    ctx.verdicts.push(Verdict::at_most(
        "weingarten-moments",
        worst,
        1.0,
        format!("largest |moment - Wg| / ({} SE) over the {} cycle types", c.se_multiple, classes.len()),
    ));
    ctx.notes.push(format!(
        "x indexes cycle types in order {}",
        classes.iter().map(|ct| ct.to_string()).collect::<Vec<_>>().join(" ")
    ));
    ctx.series.push(Series {
        label: format!("Wg_t{}_N{}", c.t, c.dim),
        x: (1..=classes.len()).map(|i| i as f64).collect(),
        mean: result.summary.iter().map(|s| s.mean).collect(),
        stderr: result.summary.iter().map(|s| s.stderr).collect(),
        prediction: exact,
        fit: None,
    });
    Ok(())
}

fn concentration(ctx: &mut Context, c: &Concentration) -> Result<(), CliError> {
    ctx.axes = ("N", "QFI");
    let mut dims = c.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let (mut mean, mut stderr, mut prediction, mut rel) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, &n) in dims.iter().enumerate() {
        let spec = SensingSpec::traceless_default(n, c.theta)?;
        let psi0 = StateVector::basis(n, 0)?;
        let cfg = ctx.ensemble("concentration", i as u64, serde_json::json!({"dim": n, "t": c.t}));
        let result = run_ensemble(&cfg, |_, path| {
            let u = sample_cue(n, &path.child(0))?;
            Ok(vec![qfi_trajectory(c.protocol, &u, &spec, c.t, &psi0)?[c.t]])
        })?;
        ctx.record_samples(&format!("N{n}"), &result, &[format!("{}_t{}", c.protocol.label(), c.t)]);
        let col = result.column(0);
        for &f in &col {
            ctx.bound_check().record(f, qfi_upper_bound(c.t, spec.spectral_width()));
        }
        let lip = lipschitz_bound(c.protocol, ModelKind::Rmm, c.t, spec.spectral_width(), 1).value;
        let grid = default_delta_grid(result.summary[0].mean, c.delta_points);
        let stats = fluctuation_stats(&col, &grid)?;
        ctx.extra_files.push((format!("tails-N{n}.csv"), stats.tail_csv(n as f64, lip)));
        ctx.record_concentration(c.protocol.label(), n as f64, &col, n as f64, lip, c.delta_points)?;
        rel.push(stats.relative_std());
        mean.push(stats.mean);
        stderr.push(stats.stderr);
        prediction.push(predict_qfi(&AsymptoticPrediction::rmm(c.protocol, spec.trace_sq(), n), c.t as f64));
    }
    let decreasing = rel.windows(2).all(|w| w[1] < w[0]);
    ctx.verdicts.push(Verdict::flag(
        "relative-std-decreasing",
        decreasing,
        format!(
            "std/mean by N: {}",
            dims.iter().zip(&rel).map(|(n, r)| format!("{n}: {r:.4}")).collect::<Vec<_>>().join(", ")
        ),
    ));
    ctx.series.push(Series {
        label: c.protocol.label().into(),
        x: dims.iter().map(|&n| n as f64).collect(),
        mean,
        stderr,
        prediction,
        fit: None,
    });
    Ok(())
}

fn cue_equivalence(ctx: &mut Context, c: &CueEquivalence) -> Result<(), CliError> {
    ctx.axes = ("q", "QFI");
    let mut qs = c.local_dims.clone();
    qs.sort_unstable();
    qs.dedup();
    let (mut mean, mut stderr, mut prediction, mut gaps) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let hspec = crate::config::HamiltonianSpec::TracelessDefault;
    for (i, &q) in qs.iter().enumerate() {
        let ch = chain(c.sites, q, &hspec, c.theta)?;
        let schedule = qfi_core::LayerSchedule::Brickwork;
        let psi0 = make_state(&c.initial_state.kind(), &ch.geom)?;
        let cfg = ctx.ensemble("cue-equivalence", i as u64, serde_json::json!({"sites": c.sites, "local_dim": q, "t": c.t}));
        let result = run_ensemble(&cfg, |_, path| {
            let circuit = FloquetCircuit::sample(ch.geom, &schedule, &path.child(0))?;
            Ok(vec![qfi_trajectory(ProtocolKind::Control, &circuit, &ch.spec, c.t, &psi0)?[c.t]])
        })?;
        ctx.record_samples(&format!("q{q}"), &result, &[format!("ctr_t{}", c.t)]);
        let col = result.column(0);
        for &f in &col {
            ctx.bound_check().record(f, qfi_upper_bound(c.t, ch.spec.spectral_width()));
        }
        let lip = lipschitz_bound(ProtocolKind::Control, ModelKind::Rqc, c.t, ch.local.spectral_width(), c.sites).value;
        ctx.record_concentration("ctr", q as f64, &col, q as f64, lip, 20)?;
        // the global model with the same N = q^L and Tr H0^2
        let pred = predict_qfi(
            &AsymptoticPrediction::rmm(ProtocolKind::Control, ch.spec.trace_sq(), ch.geom.dim()),
            c.t as f64,
        );
        let s = result.summary[0];
        gaps.push((s.mean - pred).abs() / pred);
        mean.push(s.mean);
        stderr.push(s.stderr);
        prediction.push(pred);
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    ctx.verdicts.push(Verdict::flag(
        "gap-decreasing",
        monotone,
        format!(
            "relative gap to the global-model prediction by q: {}",
            qs.iter().zip(&gaps).map(|(q, g)| format!("{q}: {g:.4}")).collect::<Vec<_>>().join(", ")
        ),
    ));
    ctx.series.push(Series { label: "ctr".into(), x: qs.iter().map(|&q| q as f64).collect(), mean, stderr, prediction, fit: None });
    Ok(())
}

fn symmetric_check(ctx: &mut Context, c: &SymmetricCheck) -> Result<(), CliError> {
    ctx.axes = ("L", "Tr_S H0^2");
    let mut worst: f64 = 0.0;
    let mut dims_ok = true;
    for &q in &c.local_dims {
        let local = LocalSensingSpec::traceless_default(q, 1.0)?;
        let (mut mean, mut prediction) = (Vec::new(), Vec::new());
        for &l in &c.sites {
            let geom = ChainGeometry::new(l, q)?;
            let (_, dim) = symmetric_projector(&geom)?;
            let (expect_dim, expect_tr) = sym_predictions(l, q, local.trace_sq())?;
            dims_ok &= dim as u128 == expect_dim;
            let tr = symmetric_trace_h2(&geom, &local)?;
            worst = worst.max((tr - expect_tr).abs());
            mean.push(tr);
            prediction.push(expect_tr);
        }
        ctx.series.push(Series {
            label: format!("q{q}"),
            x: c.sites.iter().map(|&l| l as f64).collect(),
            stderr: vec![0.0; mean.len()],
            mean,
            prediction,
            fit: None,
        });
    }
    ctx.verdicts.push(Verdict::flag("symmetric-dimension", dims_ok, "projector rank equals C(L + q - 1, L)"));
    ctx.verdicts.push(Verdict::at_most(
        "symmetric-trace",
        worst,
        c.tolerance,
        "largest |Tr_S(H0^2) - L (L + q) Tr h0^2 dim_S / (q (q + 1))|",
    ));
    Ok(())
}
