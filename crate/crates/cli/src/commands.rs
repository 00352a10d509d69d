//! Subcommand implementations. Data goes to CSV files (and, for the
//! curve commands, standard output); progress and timing go to standard
//! error only, so data files are reproducible byte for byte.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use grover_noise::{
    amplitude_closed_form, average_exponent, build_breakeven_table, cell_seed,
    extrapolate_to_zero_step, fit_linear, fit_power_law, fit_shifted_power, initial_state,
    iterated_params, m_max, noisy_step, sigma_max_runs, summarize, BreakevenTable,
    ExponentAverage, ExtrapolationFit, LadderConfig, LinearFit, NoiseSpec, PowerLawFit,
    ProblemSize, RandomStream, SigmaMaxStat, WeightedPoint,
};

use crate::config::{ExperimentConfig, Threads};
use crate::output::{
    opt_real, real, CsvSink, CURVE_HEADER, EXTRAPOLATION_HEADER, FIG1_HEADER, FITS_HEADER,
    RUNS_HEADER, SUMMARY_HEADER, TABLE1_HEADER,
};
use crate::UsageError;

/// Runs `f` on a rayon pool of the configured size.
pub fn with_pool<T: Send>(threads: Threads, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Threads::Fixed(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building worker pool")?;
    Ok(pool.install(f))
}

fn problem_size(n: u32) -> Result<ProblemSize> {
    ProblemSize::new(n).map_err(|e| UsageError(e.to_string()).into())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output dir {}", dir.display()))
}

/// One row of an amplitude curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub m: u64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub is_m_max: bool,
}

fn write_curve<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut sink = CsvSink::new(out, CURVE_HEADER)?;
    for r in rows {
        sink.row([
            r.m.to_string(),
            real(r.a),
            real(r.b),
            real(r.p),
            u8::from(r.is_m_max).to_string(),
        ])?;
    }
    Ok(())
}

fn emit_curve(rows: &[CurveRow], file: &str, out_dir: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    write_curve(rows, &mut *stdout)?;
    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        let path = dir.join(file);
        write_curve(rows, fs::File::create(&path).with_context(|| path.display().to_string())?)?;
    }
    Ok(())
}

/// Noiseless closed-form curve for `m = 0..=steps` (default `m_max`).
pub fn exact_curve(n: u32, steps: Option<u64>) -> Result<Vec<CurveRow>> {
    let size = problem_size(n)?;
    let peak = m_max(size);
    Ok((0..=steps.unwrap_or(peak))
        .map(|m| {
            let amp = amplitude_closed_form(size, m);
            CurveRow {
                m,
                a: amp.a,
                b: amp.b,
                p: amp.probability(),
                is_m_max: m == peak,
            }
        })
        .collect())
}

pub fn cmd_exact(n: u32, steps: Option<u64>, out_dir: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let rows = exact_curve(n, steps)?;
    emit_curve(&rows, "exact.csv", out_dir, stdout)
}

/// One seeded noisy trajectory for `m = 0..=steps` (default `2·m_max`).
pub fn noisy_curve(
    n: u32,
    sigma: f64,
    seed: u64,
    steps: Option<u64>,
    cfg: &ExperimentConfig,
) -> Result<Vec<CurveRow>> {
    let size = problem_size(n)?;
    let spec = NoiseSpec::new(sigma, cfg.convention).map_err(|e| UsageError(e.to_string()))?;
    let peak = m_max(size);
    let mut rng = RandomStream::new(seed);
    let mut state = initial_state(size);
    let mut rows = Vec::new();
    for m in 0..=steps.unwrap_or(2 * peak) {
        if m > 0 {
            state = noisy_step(state, size, &spec, &mut rng)?;
        }
        rows.push(CurveRow {
            m,
            a: state.a,
            b: state.b,
            p: state.probability(),
            is_m_max: m == peak,
        });
    }
    Ok(rows)
}

pub fn cmd_trajectory(
    n: u32,
    sigma: f64,
    steps: Option<u64>,
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let rows = noisy_curve(n, sigma, cfg.master_seed, steps, cfg)?;
    emit_curve(&rows, "trajectory.csv", out_dir, stdout)
}

fn ladder_for(cfg: &ExperimentConfig, d_sigma: f64, p_cut: f64, seed: u64) -> Result<LadderConfig> {
    Ok(LadderConfig::new(d_sigma, p_cut, cfg.runs, seed)
        .map_err(|e| UsageError(e.to_string()))?
        .with_convention(cfg.convention)
        .with_ceiling(cfg.sigma_ceiling))
}

struct CellWriter {
    runs: CsvSink<fs::File>,
    summary: CsvSink<fs::File>,
    progress: bool,
}

impl CellWriter {
    fn create(dir: &Path, progress: bool) -> Result<Self> {
        ensure_dir(dir)?;
        Ok(Self {
            runs: CsvSink::create(&dir.join("runs.csv"), RUNS_HEADER)?,
            summary: CsvSink::create(&dir.join("summary.csv"), SUMMARY_HEADER)?,
            progress,
        })
    }

    /// Runs one ladder cell and appends its records.
    fn cell(&mut self, size: ProblemSize, ladder: &LadderConfig) -> Result<SigmaMaxStat> {
        let started = Instant::now();
        let outcomes = sigma_max_runs(size, ladder)?;
        let n = size.n().to_string();
        let p_cut = real(ladder.p_cut);
        let d_sigma = real(ladder.d_sigma);
        for o in &outcomes {
            self.runs.row([
                n.clone(),
                p_cut.clone(),
                d_sigma.clone(),
                o.run_index.to_string(),
                o.seed.to_string(),
                real(o.result.sigma_max),
                real(o.result.p_at_break),
            ])?;
        }
        let values: Vec<f64> = outcomes.iter().map(|o| o.result.sigma_max).collect();
        let stat = summarize(&values, ladder.d_sigma);
        self.summary.row([
            n,
            p_cut,
            d_sigma,
            real(stat.mean),
            opt_real(stat.stderr),
            stat.runs.to_string(),
        ])?;
        if !self.progress {
            return Ok(stat);
        }
        eprintln!(
            "[cell] n={} p_cut={} d_sigma={:e}: sigma_max={:.6e} stderr={} ({:.2?})",
            size.n(),
            ladder.p_cut,
            ladder.d_sigma,
            stat.mean,
            stat.stderr.map(|s| format!("{s:.2e}")).unwrap_or_else(|| "n/a".into()),
            started.elapsed()
        );
        Ok(stat)
    }
}

pub fn cmd_sigma_max(
    cfg: &ExperimentConfig,
    n: u32,
    p_cut: f64,
    d_sigma: f64,
    stdout: &mut dyn Write,
) -> Result<SigmaMaxStat> {
    let size = problem_size(n)?;
    let ladder = ladder_for(cfg, d_sigma, p_cut, cfg.master_seed)?;
    let mut writer = CellWriter::create(&cfg.output_dir, cfg.progress)?;
    let stat = writer.cell(size, &ladder)?;
    writeln!(
        stdout,
        "n={n} N={} p_cut={p_cut} d_sigma={d_sigma} runs={}: sigma_max = {} ± {}",
        size.len(),
        stat.runs,
        real(stat.mean),
        stat.stderr.map(real).unwrap_or_else(|| "undefined".into())
    )?;
    Ok(stat)
}

/// Extrapolated `σ_max` for one `(n, p_cut)` slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceExtrapolation {
    pub n: u32,
    pub p_cut: f64,
    pub fit: ExtrapolationFit,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub stats: Vec<(u32, f64, SigmaMaxStat)>,
    pub extrapolations: Vec<SliceExtrapolation>,
    pub power_fits: Vec<(f64, PowerLawFit)>,
    pub linear_fits: Vec<(u32, LinearFit)>,
    pub exponent: Option<ExponentAverage>,
    /// Human-readable descriptions of every failed cell or fit.
    pub failures: Vec<String>,
}

fn slice_p(p: f64) -> String {
    format!("p_cut={}", real(p))
}

/// Full `(n, p_cut, dσ)` grid, extrapolations and fits.
pub fn cmd_sweep(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<SweepOutcome> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    let mut cells = CellWriter::create(dir, cfg.progress)?;
    let mut outcome = SweepOutcome::default();

    for &n in &cfg.n_list {
        let size = problem_size(n)?;
        for (pi, &p_cut) in cfg.p_cut_list.iter().enumerate() {
            let mut slice = Vec::new();
            for (di, &d_sigma) in cfg.d_sigma_list.iter().enumerate() {
                let ladder = ladder_for(cfg, d_sigma, p_cut, cell_seed(cfg.master_seed, n, pi, di))?;
                match cells.cell(size, &ladder) {
                    Ok(stat) => {
                        slice.push(stat);
                        outcome.stats.push((n, p_cut, stat));
                    }
                    Err(e) => {
                        let msg = format!("cell n={n} p_cut={p_cut} d_sigma={d_sigma}: {e:#}");
                        if cfg.progress {
                            eprintln!("[fail] {msg}");
                        }
                        outcome.failures.push(msg);
                    }
                }
            }
            match extrapolate_to_zero_step(&slice) {
                Ok(fit) => outcome.extrapolations.push(SliceExtrapolation { n, p_cut, fit }),
                Err(e) => outcome
                    .failures
                    .push(format!("extrapolation n={n} p_cut={p_cut}: {e}")),
            }
        }
    }

    let mut extrap = CsvSink::create(&dir.join("extrapolation.csv"), EXTRAPOLATION_HEADER)?;
    let mut fits = CsvSink::create(&dir.join("fits.csv"), FITS_HEADER)?;
    for e in &outcome.extrapolations {
        let f = &e.fit;
        extrap.row([
            e.n.to_string(),
            real(e.p_cut),
            real(f.zeta),
            real(f.zeta_err),
            real(f.xi),
            real(f.xi_err),
            real(f.alpha_exp),
            real(f.alpha_err),
        ])?;
        fits.row([
            "shifted-power".to_string(),
            format!("n={}/{}", e.n, slice_p(e.p_cut)),
            real(f.zeta),
            real(f.zeta_err),
            real(f.xi),
            real(f.xi_err),
            real(f.alpha_exp),
            real(f.alpha_err),
        ])?;
    }

    let point = |e: &SliceExtrapolation, x: f64| {
        let err = if e.fit.zeta_err.is_finite() { e.fit.zeta_err } else { 0.0 };
        WeightedPoint::new(x, e.fit.zeta, err)
    };

    for &p_cut in &cfg.p_cut_list {
        let points: Vec<_> = outcome
            .extrapolations
            .iter()
            .filter(|e| e.p_cut == p_cut)
            .map(|e| point(e, ProblemSize::new(e.n).map(|s| s.len_f64()).unwrap_or(f64::NAN)))
            .collect();
        match fit_power_law(&points) {
            Ok(fit) => {
                fits.row([
                    "power".to_string(),
                    slice_p(p_cut),
                    real(fit.coeff),
                    real(fit.coeff_err),
                    real(fit.exponent),
                    real(fit.exponent_err),
                    String::new(),
                    String::new(),
                ])?;
                outcome.power_fits.push((p_cut, fit));
            }
            Err(e) => outcome.failures.push(format!("power fit {}: {e}", slice_p(p_cut))),
        }
    }

    for &n in &cfg.n_list {
        let points: Vec<_> = outcome
            .extrapolations
            .iter()
            .filter(|e| e.n == n)
            .map(|e| point(e, e.p_cut))
            .collect();
        match fit_linear(&points) {
            Ok(fit) => {
                fits.row([
                    "linear".to_string(),
                    format!("n={n}"),
                    real(fit.gamma),
                    real(fit.gamma_err),
                    real(fit.delta),
                    real(fit.delta_err),
                    String::new(),
                    String::new(),
                ])?;
                outcome.linear_fits.push((n, fit));
            }
            Err(e) => outcome.failures.push(format!("linear fit n={n}: {e}")),
        }
    }

    let power: Vec<PowerLawFit> = outcome.power_fits.iter().map(|(_, f)| *f).collect();
    match average_exponent(&power) {
        Ok(avg) => {
            fits.row([
                "exponent-average".to_string(),
                "all".to_string(),
                real(avg.mean),
                real(avg.err),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?;
            outcome.exponent = Some(avg);
        }
        Err(e) => outcome.failures.push(format!("exponent average: {e}")),
    }

    let report = sweep_report(cfg, &outcome);
    fs::write(dir.join("report.txt"), &report)?;
    stdout.write_all(report.as_bytes())?;

    if outcome.stats.is_empty() {
        bail!(outcome
            .failures
            .first()
            .cloned()
            .unwrap_or_else(|| "no cell succeeded".into()));
    }
    Ok(outcome)
}

fn sweep_report(cfg: &ExperimentConfig, o: &SweepOutcome) -> String {
    let mut s = String::new();
    let mut line = |l: String| {
        s.push_str(&l);
        s.push('\n');
    };
    line(format!(
        "sweep: n={:?} p_cut={:?} d_sigma={:?} runs={} seed={} convention={}",
        cfg.n_list, cfg.p_cut_list, cfg.d_sigma_list, cfg.runs, cfg.master_seed, cfg.convention
    ));
    line(String::new());
    line("extrapolated sigma_max = zeta + xi * d_sigma^alpha".into());
    for e in &o.extrapolations {
        line(format!(
            "  n={:2} p_cut={:<4} zeta={:.4e} ± {:.1e}  xi={:.4e}  alpha={:.3} ± {:.3}",
            e.n, e.p_cut, e.fit.zeta, e.fit.zeta_err, e.fit.xi, e.fit.alpha_exp, e.fit.alpha_err
        ));
    }
    line(String::new());
    line("sigma_max(N) = coeff * N^phi".into());
    for (p, f) in &o.power_fits {
        line(format!(
            "  p_cut={:<4} coeff={:.4} ± {:.4}  phi={:.4} ± {:.4}",
            p, f.coeff, f.coeff_err, f.exponent, f.exponent_err
        ));
    }
    line(String::new());
    line("sigma_max(P_cut) = gamma - delta * P_cut".into());
    for (n, f) in &o.linear_fits {
        line(format!(
            "  n={:2} gamma={:.4e} ± {:.1e}  delta={:.4e} ± {:.1e}",
            n, f.gamma, f.gamma_err, f.delta, f.delta_err
        ));
    }
    line(String::new());
    match o.exponent {
        Some(a) => line(format!("averaged phi = {:.4} ± {:.4}", a.mean, a.err)),
        None => line("averaged phi = n/a".into()),
    }
    if !o.failures.is_empty() {
        line(String::new());
        line(format!("{} failure(s):", o.failures.len()));
        for f in &o.failures {
            line(format!("  {f}"));
        }
    }
    s
}

#[derive(Debug, Clone)]
pub struct Table1Outcome {
    pub table: BreakevenTable,
}

/// Break-even table at `p_cut = min_p_cut(N)` with its power-law fit.
pub fn cmd_table1(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<Table1Outcome> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    let sizes = cfg
        .n_list
        .iter()
        .map(|&n| problem_size(n))
        .collect::<Result<Vec<_>>>()?;
    let template = ladder_for(cfg, cfg.d_sigma_list[0], 0.5, cfg.master_seed)?;
    let started = Instant::now();
    let table = build_breakeven_table(&sizes, &template, &cfg.d_sigma_list);
    if cfg.progress {
        eprintln!("[table1] {} rows in {:.2?}", table.rows.len(), started.elapsed());
    }

    let mut summary = CsvSink::create(&dir.join("summary.csv"), SUMMARY_HEADER)?;
    let mut rows = CsvSink::create(&dir.join("table1.csv"), TABLE1_HEADER)?;
    let mut fig = CsvSink::create(&dir.join("fig1.csv"), FIG1_HEADER)?;
    let mut fits = CsvSink::create(&dir.join("fits.csv"), FITS_HEADER)?;

    writeln!(stdout, "{:>6} {:>8} {:>9} {:>5} {:>5} {:>7} {:>12} {:>10}", "n", "N", "p_cut", "I_N", "m_max", "steps", "sigma_max", "err")?;
    for (size, row) in &table.rows {
        let params = iterated_params(*size);
        match row {
            Ok(row) => {
                for s in &row.stats {
                    summary.row([
                        size.n().to_string(),
                        real(row.p_cut),
                        real(s.d_sigma),
                        real(s.mean),
                        opt_real(s.stderr),
                        s.runs.to_string(),
                    ])?;
                }
                rows.row([
                    size.n().to_string(),
                    size.len().to_string(),
                    real(row.p_cut),
                    real(row.sigma_max()),
                    real(row.sigma_err()),
                ])?;
                if row.sigma_max() > 0.0 {
                    fig.row([real(size.len_f64().log10()), real(row.sigma_max().log10())])?;
                }
                writeln!(
                    stdout,
                    "{:>6} {:>8} {:>9.4} {:>5} {:>5} {:>7} {:>12.4e} {:>10.2e}",
                    size.n(),
                    size.len(),
                    row.p_cut,
                    params.repetitions,
                    m_max(*size),
                    params.total_steps,
                    row.sigma_max(),
                    row.sigma_err()
                )?;
            }
            Err(e) => writeln!(stdout, "{:>6} {:>8} failed: {e}", size.n(), size.len())?,
        }
    }
    match &table.fit {
        Ok(fit) => {
            fits.row([
                "power".to_string(),
                "table1".to_string(),
                real(fit.coeff),
                real(fit.coeff_err),
                real(fit.exponent),
                real(fit.exponent_err),
                String::new(),
                String::new(),
            ])?;
            writeln!(
                stdout,
                "sigma_max = ({:.4} ± {:.4}) N^({:.4} ± {:.4})",
                fit.coeff, fit.coeff_err, fit.exponent, fit.exponent_err
            )?;
        }
        Err(e) => writeln!(stdout, "power-law fit failed: {e}")?,
    }
    if table.successful().next().is_none() {
        bail!("no break-even row succeeded");
    }
    Ok(Table1Outcome { table })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    Power,
    Linear,
    ShiftedPower,
}

impl FromStr for FitModel {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "power" => Ok(FitModel::Power),
            "linear" => Ok(FitModel::Linear),
            "shifted-power" => Ok(FitModel::ShiftedPower),
            _ => Err(UsageError(format!(
                "unknown model '{s}' (expected power|linear|shifted-power)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct FitRequest {
    pub input: PathBuf,
    pub n: Option<u32>,
    pub p_cut: Option<f64>,
    pub x_col: Option<String>,
    pub y_col: Option<String>,
    pub err_col: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitResult {
    Power(PowerLawFit),
    Linear(LinearFit),
    ShiftedPower(ExtrapolationFit),
}

enum Abscissa {
    Column(usize),
    /// `N = 2^n` from an exponent column.
    PowerOfTwo(usize),
}

/// Reads points from one of the known CSV schemas (or explicit columns)
/// and fits `model`.
pub fn load_points(req: &FitRequest, model: FitModel) -> Result<Vec<WeightedPoint>> {
    let mut reader = csv::Reader::from_path(&req.input)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", req.input.display())))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| UsageError(format!("column '{name}' not found in {}", req.input.display())))
    };

    // (abscissa, ordinate, error, columns that identify a slice)
    let (x, y, err, slice_cols): (Abscissa, usize, Option<usize>, Vec<&str>) =
        if let (Some(xc), Some(yc)) = (&req.x_col, &req.y_col) {
            (Abscissa::Column(need(xc)?), need(yc)?, req.err_col.as_deref().map(need).transpose()?, vec![])
        } else if col("x").is_some() && col("y").is_some() {
            (Abscissa::Column(need("x")?), need("y")?, col("y_err"), vec![])
        } else if col("mean_sigma_max").is_some() && col("d_sigma").is_some() {
            (Abscissa::Column(need("d_sigma")?), need("mean_sigma_max")?, col("stderr"), vec!["n", "p_cut"])
        } else if col("zeta").is_some() && col("n").is_some() && col("p_cut").is_some() {
            match model {
                FitModel::Linear => (Abscissa::Column(need("p_cut")?), need("zeta")?, col("zeta_err"), vec!["n"]),
                _ => (Abscissa::PowerOfTwo(need("n")?), need("zeta")?, col("zeta_err"), vec!["p_cut"]),
            }
        } else if col("sigma_max").is_some() && col("N").is_some() {
            (Abscissa::Column(need("N")?), need("sigma_max")?, col("sigma_err"), vec![])
        } else {
            bail!(UsageError(format!(
                "{} does not match a known schema (x,y[,y_err] | summary | extrapolation | table1)",
                req.input.display()
            )));
        };

    let n_col = col("n");
    let p_col = col("p_cut");
    let parse = |field: &str, what: &str| -> Result<f64> {
        field
            .trim()
            .parse::<f64>()
            .map_err(|_| UsageError(format!("invalid {what} value '{field}'")).into())
    };

    let mut points = Vec::new();
    let mut slices = BTreeSet::new();
    for record in reader.records() {
        let record = record?;
        if let (Some(want), Some(c)) = (req.n, n_col) {
            if parse(&record[c], "n")? != f64::from(want) {
                continue;
            }
        }
        if let (Some(want), Some(c)) = (req.p_cut, p_col) {
            if (parse(&record[c], "p_cut")? - want).abs() > 1e-12 {
                continue;
            }
        }
        let key: Vec<String> = slice_cols
            .iter()
            .filter_map(|name| col(name).map(|c| format!("{name}={}", &record[c])))
            .collect();
        slices.insert(key.join("/"));
        let xv = match x {
            Abscissa::Column(c) => parse(&record[c], "x")?,
            Abscissa::PowerOfTwo(c) => parse(&record[c], "n")?.exp2(),
        };
        let yv = parse(&record[y], "y")?;
        let ev = match err.map(|c| record[c].trim().to_string()) {
            Some(s) if !s.is_empty() => parse(&s, "y_err")?,
            _ => 0.0,
        };
        points.push(WeightedPoint::new(xv, yv, ev));
    }
    if slices.len() > 1 {
        bail!(UsageError(format!(
            "input mixes {} slices ({}); select one with --n / --p-cut",
            slices.len(),
            slices.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    if points.is_empty() {
        bail!(UsageError("no data rows selected".into()));
    }
    Ok(points)
}

pub fn cmd_fit(req: &FitRequest, model: FitModel, stdout: &mut dyn Write) -> Result<FitResult> {
    let points = load_points(req, model)?;
    writeln!(stdout, "model: {model:?} ({} points)", points.len())?;
    let result = match model {
        FitModel::Power => {
            let f = fit_power_law(&points)?;
            writeln!(stdout, "coeff    = {} ± {}", real(f.coeff), real(f.coeff_err))?;
            writeln!(stdout, "exponent = {} ± {}", real(f.exponent), real(f.exponent_err))?;
            FitResult::Power(f)
        }
        FitModel::Linear => {
            let f = fit_linear(&points)?;
            writeln!(stdout, "gamma = {} ± {}", real(f.gamma), real(f.gamma_err))?;
            writeln!(stdout, "delta = {} ± {}", real(f.delta), real(f.delta_err))?;
            FitResult::Linear(f)
        }
        FitModel::ShiftedPower => {
            let f = fit_shifted_power(&points)?;
            writeln!(stdout, "zeta  = {} ± {}", real(f.zeta), real(f.zeta_err))?;
            writeln!(stdout, "xi    = {} ± {}", real(f.xi), real(f.xi_err))?;
            writeln!(stdout, "alpha = {} ± {}", real(f.alpha_exp), real(f.alpha_err))?;
            FitResult::ShiftedPower(f)
        }
    };
    Ok(result)
}
