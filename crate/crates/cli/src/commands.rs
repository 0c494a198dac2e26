use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use polyterm::exact::format_rational;
use polyterm::hjm::{
    drift_residual, max_degree_feasible, replicate_min_from_power, replicate_power_from_calls, spot_variance_check,
    ForwardVarianceSpec,
};
use polyterm::io::{csv_string, load_model, model_digest, Provenance, TOOL_VERSION};
use polyterm::model::{
    check_rate_constraints, check_vol_constraints, ConstraintReport, ModelSpec, RateModelSpec, Theta, VolModelSpec,
};
use polyterm::sim::{implied_vol, mc_bond_price, mc_call_price, simulate_factor, simulate_joint, SimConfig};
use polyterm::stationary::stationary_density;
use polyterm::{build_information_matrix, TermStructure, VolEngine};

use crate::error::{CliError, CliResult};
use crate::{Command, GridArgs, ImpliedVolArgs, ModelArgs, SimArgs, VerifyArgs};

/// Residual tolerance of the forward-variance checks.
const HJM_TOL: f64 = 1e-5;

pub fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Validate(a) => validate(a),
        Command::Solve(a) => solve(a),
        Command::Price(a) => price(a),
        Command::Yield(a) => yield_curve(a),
        Command::Simulate(a) => simulate(a),
        Command::Stationary(a) => stationary(a),
        Command::PowerPrice(a) => power_price(a),
        Command::ImpliedVol(a) => implied_vol_surface(a),
        Command::VerifyHjm(a) => verify_hjm(a),
    }
}

/// Files of one command, written only after the whole computation succeeded.
struct Output {
    command: &'static str,
    digest: String,
    seed: Option<u64>,
    files: Vec<(String, String)>,
    parameters: Map<String, Value>,
}

impl Output {
    fn new(command: &'static str, spec: &ModelSpec, seed: Option<u64>) -> Self {
        Self { command, digest: model_digest(spec), seed, files: Vec::new(), parameters: Map::new() }
    }

    fn param(&mut self, key: &str, value: Value) {
        self.parameters.insert(key.to_string(), value);
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) {
        let prov = Provenance { command: self.command.to_string(), seed: self.seed, model_digest: self.digest.clone() };
        self.files.push((name.to_string(), csv_string(&prov, header, rows)));
    }

    fn json(&mut self, name: &str, value: &Value) {
        let text = serde_json::to_string_pretty(value).expect("JSON serialises") + "\n";
        self.files.push((name.to_string(), text));
    }

    /// Write every file plus `manifest.json`; without `--out` only JSON reports go to stdout.
    fn finish(mut self, out: Option<&Path>) -> CliResult<()> {
        let Some(dir) = out else {
            for (name, text) in &self.files {
                if name.ends_with(".json") {
                    print!("{text}");
                }
            }
            return Ok(());
        };
        let names: Vec<Value> = self.files.iter().map(|(n, _)| json!(n)).collect();
        let manifest = json!({
            "tool": "polyterm",
            "version": TOOL_VERSION,
            "command": self.command,
            "model_digest": format!("sha256:{}", self.digest),
            "seed": self.seed,
            "parameters": Value::Object(std::mem::take(&mut self.parameters)),
            "files": names,
        });
        self.json("manifest.json", &manifest);
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        for (name, text) in &self.files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        }
        Ok(())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::runtime("io", format!("{}: {e}", path.display()))
}

fn load(args: &ModelArgs) -> CliResult<ModelSpec> {
    Ok(load_model(&args.model)?)
}

fn rate(spec: &ModelSpec, command: &str) -> CliResult<RateModelSpec> {
    match spec {
        ModelSpec::Rate(s) => Ok(s.clone()),
        ModelSpec::Vol(_) => Err(CliError::runtime("model-kind", format!("{command} needs a rate model"))),
    }
}

fn vol(spec: &ModelSpec, command: &str) -> CliResult<VolModelSpec> {
    match spec {
        ModelSpec::Vol(s) => Ok(s.clone()),
        ModelSpec::Rate(_) => Err(CliError::runtime("model-kind", format!("{command} needs a vol model"))),
    }
}

fn start(spec: &ModelSpec, z0: Option<f64>) -> f64 {
    let domain = match spec {
        ModelSpec::Rate(s) => s.domain(),
        ModelSpec::Vol(s) => s.domain(),
    };
    z0.unwrap_or_else(|| domain.midpoint())
}

fn thetas(spec: &VolModelSpec, list: &[f64]) -> CliResult<Vec<Theta>> {
    if list.is_empty() {
        return Ok(spec.thetas().collect());
    }
    Ok(list.iter().map(|&t| spec.theta_from_f64(t)).collect::<polyterm::Result<_>>()?)
}

fn check_grid(ttms: &[f64]) -> CliResult<()> {
    if ttms.is_empty() || ttms.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::runtime("config", "maturities must be finite and non-negative"));
    }
    Ok(())
}

fn report_json(report: &ConstraintReport) -> Value {
    let residuals: Map<String, Value> =
        report.residuals.iter().map(|(name, r)| (name.clone(), json!(format_rational(r)))).collect();
    let mut v = json!({"satisfied": report.satisfied, "residuals": residuals});
    if let Some(per_theta) = &report.per_theta {
        let bad: Vec<Value> = per_theta
            .iter()
            .filter(|t| t.residuals.iter().any(|r| format_rational(r) != "0"))
            .map(|t| {
                json!({
                    "theta": t.theta.to_string(),
                    "n_theta": t.n_theta,
                    "residuals": t.residuals.iter().map(format_rational).collect::<Vec<_>>(),
                })
            })
            .collect();
        v["theta_violations"] = json!(bad);
    }
    v
}

fn validate(args: &ModelArgs) -> CliResult<()> {
    let spec = load(args)?;
    let mut out = Output::new("validate", &spec, None);
    let (report, mut value) = match &spec {
        ModelSpec::Rate(s) => {
            let report = check_rate_constraints(s);
            let mut v = json!({"kind": "rate", "n": s.n(), "warnings": s.warnings()});
            if report.satisfied {
                let m = build_information_matrix(s)?;
                let rows: Vec<Vec<String>> =
                    m.rows().iter().map(|row| row.iter().map(format_rational).collect()).collect();
                v["information_matrix"] = json!(rows);
            }
            (report, v)
        }
        ModelSpec::Vol(s) => {
            let report = check_vol_constraints(s);
            (report, json!({"kind": "vol", "N": s.grid_size(), "nmap": s.nmap()}))
        }
    };
    value["constraints"] = report_json(&report);
    out.json("validate.json", &value);
    if args.out.is_some() {
        print!("{}", serde_json::to_string_pretty(&value).expect("JSON serialises") + "\n");
    }
    out.finish(args.out.as_deref())?;
    if !report.satisfied {
        return Err(CliError::validation("constraint", format!("constraint violations: {}", report.summary())));
    }
    Ok(())
}

fn grid_params(out: &mut Output, args: &GridArgs, z0: f64) {
    out.param("ttm_grid", json!(args.ttm_grid));
    out.param("z0", json!(z0));
}

fn solve(args: &GridArgs) -> CliResult<()> {
    check_grid(&args.ttm_grid)?;
    let spec = load(&args.model)?;
    let mut out = Output::new("solve", &spec, None);
    out.param("ttm_grid", json!(args.ttm_grid));
    match &spec {
        ModelSpec::Rate(s) => {
            let ts = TermStructure::new(s.clone())?;
            let rows = ts.coefficient_table(&args.ttm_grid)?;
            let names: Vec<String> = (0..=s.n()).map(|i| format!("g{i}")).collect();
            let mut header = vec!["ttm"];
            header.extend(names.iter().map(String::as_str));
            out.csv("coefficients.csv", &header, &rows);
        }
        ModelSpec::Vol(s) => {
            let thetas = thetas(s, &args.theta_list)?;
            let engine = VolEngine::new(s.clone())?;
            let mut rows = Vec::new();
            for &theta in &thetas {
                for &t in &args.ttm_grid {
                    for (i, k) in engine.solve_k(theta, t)?.iter().enumerate() {
                        rows.push(vec![theta.value(), t, i as f64, *k]);
                    }
                }
            }
            out.param("thetas", json!(thetas.iter().map(Theta::value).collect::<Vec<_>>()));
            out.csv("coefficients.csv", &["theta", "ttm", "i", "k"], &rows);
        }
    }
    out.finish(args.model.out.as_deref())
}

fn price(args: &GridArgs) -> CliResult<()> {
    let spec = load(&args.model)?;
    if let ModelSpec::Vol(_) = spec {
        return power_price(args);
    }
    check_grid(&args.ttm_grid)?;
    let z0 = start(&spec, args.z0);
    let ts = TermStructure::new(rate(&spec, "price")?)?;
    let rows =
        args.ttm_grid.iter().map(|&t| Ok(vec![t, ts.bond_price(t, z0)?])).collect::<polyterm::Result<Vec<_>>>()?;
    let mut out = Output::new("price", &spec, None);
    grid_params(&mut out, args, z0);
    out.csv("prices.csv", &["ttm", "price"], &rows);
    out.finish(args.model.out.as_deref())
}

fn yield_curve(args: &GridArgs) -> CliResult<()> {
    check_grid(&args.ttm_grid)?;
    let spec = load(&args.model)?;
    let z0 = start(&spec, args.z0);
    let ts = TermStructure::new(rate(&spec, "yield")?)?;
    let rows: Vec<Vec<f64>> = ts.yield_table(&args.ttm_grid, z0)?.iter().map(|r| r.to_vec()).collect();
    let mut out = Output::new("yield", &spec, None);
    grid_params(&mut out, args, z0);
    out.param("spot_rate", json!(ts.spec().spot_rate(z0)?));
    out.csv("yield.csv", &["ttm", "price", "yield"], &rows);
    out.finish(args.model.out.as_deref())
}

fn sim_config(paths: usize, dt: f64, horizon: f64, seed: u64, record: Option<f64>) -> CliResult<SimConfig> {
    let cfg = SimConfig::new(paths, dt, horizon, seed)?;
    Ok(match record {
        Some(interval) => cfg.recording_interval(interval)?,
        None => cfg,
    })
}

fn simulate(args: &SimArgs) -> CliResult<()> {
    let spec = load(&args.model)?;
    let z0 = start(&spec, args.z0);
    let cfg = sim_config(args.paths, args.dt, args.horizon, args.seed, args.record_every)?;
    let paths = match &spec {
        ModelSpec::Rate(_) => simulate_factor(&spec, &cfg, z0)?,
        ModelSpec::Vol(s) => simulate_joint(s, &cfg, z0, args.s0)?,
    };
    let mut out = Output::new("simulate", &spec, Some(args.seed));
    out.param("config", serde_json::to_value(&cfg).expect("config serialises"));
    out.param("z0", json!(z0));
    let last = paths.times().len() - 1;
    let mut summary = json!({
        "domain_violations": paths.domain_violations(),
        "violation_rate": paths.violation_rate(),
        "final_mean_z": polyterm::sim::Estimate::from_samples(paths.z_at(last)),
    });
    let mut rows = Vec::with_capacity(paths.times().len() * paths.n_paths());
    let (header, second): (&[&str], Box<dyn Fn(usize) -> polyterm::Result<Vec<f64>>>) = match &spec {
        ModelSpec::Rate(s) => {
            let est = mc_bond_price(&paths, s, args.horizon)?;
            summary["mc_bond_price"] = json!(est);
            if let Ok(ts) = TermStructure::new(s.clone()) {
                summary["analytic_bond_price"] = json!(ts.bond_price(args.horizon, z0)?);
            }
            (&["t", "path", "z", "int_r"], Box::new(|k| paths.int_r_at(k).map(<[f64]>::to_vec)))
        }
        ModelSpec::Vol(_) => {
            out.param("s0", json!(args.s0));
            summary["final_mean_s"] = json!(polyterm::sim::Estimate::from_samples(paths.s_at(last)?));
            (&["t", "path", "z", "s"], Box::new(|k| paths.s_at(k).map(<[f64]>::to_vec)))
        }
    };
    for (k, &t) in paths.times().iter().enumerate() {
        let extra = second(k)?;
        for (p, (&z, &x)) in paths.z_at(k).iter().zip(&extra).enumerate() {
            rows.push(vec![t, p as f64, z, x]);
        }
    }
    out.csv("paths.csv", header, &rows);
    out.json("summary.json", &summary);
    out.finish(args.model.out.as_deref())
}

fn stationary(args: &ModelArgs) -> CliResult<()> {
    let spec = load(args)?;
    let s = rate(&spec, "stationary")?;
    let support = (s.domain().lo_f64(), s.domain().hi_f64());
    let density = stationary_density(&s, support)?;
    let rows: Vec<Vec<f64>> = density.table().iter().map(|r| r.to_vec()).collect();
    let mut out = Output::new("stationary", &spec, None);
    out.csv("density.csv", &["y", "pdf", "cdf"], &rows);
    out.json(
        "summary.json",
        &json!({
            "support": [support.0, support.1],
            "mode": density.mode(),
            "scale": density.scale(),
            "norm_const": density.norm_const(),
            "total_mass": density.total_mass()?,
        }),
    );
    out.finish(args.out.as_deref())
}

fn power_price(args: &GridArgs) -> CliResult<()> {
    check_grid(&args.ttm_grid)?;
    let spec = load(&args.model)?;
    let s = vol(&spec, "power-price")?;
    let z0 = start(&spec, args.z0);
    let thetas = thetas(&s, &args.theta_list)?;
    let engine = VolEngine::new(s)?;
    let rows: Vec<Vec<f64>> =
        engine.surface(&thetas, &args.ttm_grid, args.s0, z0)?.iter().map(|r| r.to_vec()).collect();
    let mut out = Output::new("power-price", &spec, None);
    grid_params(&mut out, args, z0);
    out.param("s0", json!(args.s0));
    out.csv("power_prices.csv", &["theta", "ttm", "price", "forward_variance_0"], &rows);
    out.finish(args.model.out.as_deref())
}

fn implied_vol_surface(args: &ImpliedVolArgs) -> CliResult<()> {
    check_grid(&args.ttm_grid)?;
    let spec = load(&args.model)?;
    let s = vol(&spec, "implied-vol")?;
    let z0 = start(&spec, args.z0);
    let horizon = args.ttm_grid.iter().cloned().fold(0.0, f64::max);
    let cfg = sim_config(args.paths, args.dt, horizon, args.seed, None)?;
    let paths = simulate_joint(&s, &cfg, z0, args.s0)?;
    let mut rows = Vec::new();
    for &t in args.ttm_grid.iter().filter(|&&t| t > 0.0) {
        for &m in &args.moneyness {
            let strike = m * args.s0;
            let call = mc_call_price(&paths, strike, t)?;
            // prices outside the no-arbitrage band have no implied volatility
            let iv = implied_vol(call.estimate, args.s0, strike, t).unwrap_or(f64::NAN);
            rows.push(vec![t, strike, call.estimate, call.std_error, iv]);
        }
    }
    let mut out = Output::new("implied-vol", &spec, Some(args.seed));
    out.param("config", serde_json::to_value(&cfg).expect("config serialises"));
    out.param("z0", json!(z0));
    out.param("s0", json!(args.s0));
    out.csv("implied_vol.csv", &["ttm", "strike", "call", "std_error", "implied_vol"], &rows);
    out.finish(args.model.out.as_deref())
}

fn interior(lo: f64, hi: f64, u: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + (hi - lo) * (0.02 + 0.96 * u),
        (true, false) => lo + 0.02 + u,
        (false, true) => hi - 0.02 - u,
        (false, false) => 2.0 * u - 1.0,
    }
}

fn verify_hjm(args: &VerifyArgs) -> CliResult<()> {
    if !(args.horizon > 0.0) || args.samples == 0 {
        return Err(CliError::runtime("config", "need a positive horizon and at least one sample"));
    }
    let spec = load(&args.model)?;
    let s = vol(&spec, "verify-hjm")?;
    let (lo, hi) = (s.domain().lo_f64(), s.domain().hi_f64());
    let big_n = s.grid_size();
    let engine = Arc::new(VolEngine::new(s.clone())?);
    let fv = ForwardVarianceSpec::from_engine(engine);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let samples: Vec<(f64, f64, f64)> = (0..args.samples)
        .map(|_| {
            let x = args.horizon * (0.02 + 0.98 * rng.random::<f64>());
            let theta = rng.random_range(1..big_n) as f64 / big_n as f64;
            (x, theta, interior(lo, hi, rng.random::<f64>()))
        })
        .collect();
    let spot: Vec<(f64, f64)> = samples.iter().map(|&(_, t, z)| (t, z)).collect();
    let drift = drift_residual(&fv, &samples)?;
    let spot = spot_variance_check(&fv, &spot)?;

    let deg_b2 = s.b2().degree().unwrap_or(0);
    let degree: Vec<Value> =
        (1..=5).map(|n| json!({"n": n, "deg_b2": deg_b2, "feasible": max_degree_feasible(n, deg_b2)})).collect();
    let mut power = Vec::new();
    let mut min = Vec::new();
    for sv in [0.5, 1.0, 2.0] {
        for theta in [0.25, 0.5, 0.75] {
            let v = replicate_power_from_calls(sv, theta)?;
            power.push(json!({"s": sv, "theta": theta, "value": v, "error": v - sv.powf(theta)}));
            let strike = 1.0;
            let m = replicate_min_from_power(sv, strike, theta, 1e4)?;
            min.push(json!({"s": sv, "K": strike, "theta": theta, "value": m, "error": m - sv.min(strike)}));
        }
    }
    let report = json!({
        "tolerance": HJM_TOL,
        "drift": drift,
        "spot_variance": spot,
        "degree_feasibility": degree,
        "power_from_calls": power,
        "min_from_power": min,
    });
    let mut out = Output::new("verify-hjm", &spec, Some(args.seed));
    out.param("samples", json!(args.samples));
    out.param("horizon", json!(args.horizon));
    out.json("hjm.json", &report);
    out.finish(args.model.out.as_deref())?;
    if drift.max > HJM_TOL || spot.max > HJM_TOL || drift.max.is_nan() || spot.max.is_nan() {
        return Err(CliError::validation(
            "hjm",
            format!("forward-variance residuals exceed {HJM_TOL:e}: drift {:e}, spot {:e}", drift.max, spot.max),
        ));
    }
    Ok(())
}
