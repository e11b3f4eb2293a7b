//! Experiment dispatch and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qdnls::dynamics::{energy, mass, picard_solve, step_evolve};
use qdnls::lab::{
    bilinear_ratio, fit_delta, loglog_slope, random_field, strichartz_ratio, trial_rng, trilinear_j,
    BilinearCase, TrilinearMode, TrilinearOptions,
};
use qdnls::norms::{hs_norm, vp_variation_exhaustive, vp_variation_with, ys_norm};
use qdnls::resonance::{classify, scan_min_ratio};
use qdnls::snapshot::write_snapshot;
use qdnls::table::Cell;
use qdnls::{
    CoefficientTriple, Complex64, DyadicIndex, Error, FieldTriple, FrequencyLattice, PicardOptions, PicardReport,
    Result, ResultTable, StepOptions, Trajectory,
};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::plot::{emit_plot_data, Transform};

/// Process exit status for a finished run.
pub fn exit_code(result: &Result<RunOutput>) -> i32 {
    match result {
        Ok(_) => 0,
        Err(Error::NonConvergence { .. }) => 3,
        Err(Error::BlowUp { .. }) => 4,
        Err(Error::CostGuard(_)) => 5,
        Err(Error::Io(_)) => 1,
        Err(_) => 2,
    }
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

struct Sink<'a> {
    dir: &'a Path,
    cfg: &'a ExperimentConfig,
    out: RunOutput,
}

impl Sink<'_> {
    fn table(&mut self, name: &str, mut table: ResultTable) -> Result<ResultTable> {
        table.provenance.config_hash = self.cfg.hash().to_string();
        table.provenance.seed = self.cfg.seed;
        let path = self.dir.join(format!("{name}.csv"));
        fs::write(&path, table.to_csv())?;
        self.out.files.push(path);
        Ok(table)
    }

    fn series(&mut self, name: &str, table: &ResultTable, x: &str, y: &str) -> Result<()> {
        let s = emit_plot_data(table, x, y, Transform::LogLog)?;
        for w in &s.warnings {
            self.out.notes.push(format!("warning: {w}"));
        }
        let path = self.dir.join(format!("{name}.series"));
        fs::write(&path, s.to_text())?;
        self.out.files.push(path);
        Ok(())
    }

    fn snapshots(&mut self, prefix: &str, state: &FieldTriple) -> Result<()> {
        for (tag, f) in ["u", "v", "w"].into_iter().zip(state.fields()) {
            let path = self.dir.join(format!("{prefix}_{tag}.qdsnap"));
            write_snapshot(f, fs::File::create(&path)?)?;
            self.out.files.push(path);
        }
        Ok(())
    }
}

/// Run one experiment, writing its tables, series, snapshots and a manifest
/// into `dir`. The manifest is written on failure too.
pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutput> {
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(Error::InvalidParameter(format!("config is for {k}, not {kind}")));
        }
    }
    fs::create_dir_all(dir)?;
    let mut sink = Sink { dir, cfg, out: RunOutput::default() };
    let result = match kind {
        ExperimentKind::Simulate => simulate(&mut sink),
        ExperimentKind::Picard => picard(&mut sink),
        ExperimentKind::ResonanceScan => resonance_scan(&mut sink),
        ExperimentKind::Strichartz => strichartz(&mut sink),
        ExperimentKind::Bilinear => bilinear(&mut sink),
        ExperimentKind::Trilinear => trilinear(&mut sink),
        ExperimentKind::VnormSelftest => vnorm_selftest(&mut sink),
    };
    let status = match &result {
        Ok(()) => "ok".to_string(),
        Err(e) => format!("error: {e}"),
    };
    let mut out = sink.out;
    write_manifest(dir, kind, cfg, &status, &out)?;
    out.files.push(dir.join("manifest.txt"));
    result.map(|()| out)
}

fn write_manifest(dir: &Path, kind: ExperimentKind, cfg: &ExperimentConfig, status: &str, out: &RunOutput) -> Result<()> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let files: Vec<String> = out
        .files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let mut text = format!(
        "qdnls {}\nexperiment = {kind}\nseed = {}\nconfig_sha256 = {}\nstatus = {status}\nunix_time = {stamp}\nfiles = {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.hash(),
        files.join(" "),
    );
    for n in &out.notes {
        text.push_str(&format!("note = {n}\n"));
    }
    text.push_str("[config]\n");
    text.push_str(&cfg.echo());
    fs::write(dir.join("manifest.txt"), text)?;
    Ok(())
}

fn coefficients(cfg: &ExperimentConfig) -> Result<CoefficientTriple> {
    classify(cfg.alpha.clone(), cfg.beta.clone(), cfg.gamma.clone())
}

fn initial_data(cfg: &ExperimentConfig) -> Result<FieldTriple> {
    let lat = FrequencyLattice::new(cfg.dim, cfg.cutoff, cfg.scale)?;
    let amplitude: f64 = cfg.get("amplitude", 1e-2)?;
    let radius: i64 = cfg.get("data_radius", 3)?;
    if !(amplitude >= 0.0) {
        return Err(Error::InvalidParameter("amplitude must be nonnegative".into()));
    }
    let mut rng = trial_rng(cfg.seed, 0);
    let mut field = || random_field(&lat, cfg.dim, radius, 1.0, amplitude, &mut rng);
    FieldTriple::new(field()?, field()?, field()?)
}

fn simulate(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let coeffs = coefficients(cfg)?;
    let data = initial_data(cfg)?;
    let t_final = cfg.t_final.unwrap_or(1.0);
    let opts = StepOptions::new(cfg.dt).with_stride(cfg.get("stride", 1)?);
    let traj = step_evolve(&data, &coeffs, t_final, &opts)?;
    let mut table = ResultTable::new(
        ["experiment", "step", "t", "mass", "energy", "mass_drift", "energy_drift"],
        cfg.seed,
    );
    let m0 = mass(&data);
    let e0 = energy(&data, &coeffs)?;
    let drift = |x: f64, x0: f64| if x0 != 0.0 { ((x - x0) / x0).abs() } else { (x - x0).abs() };
    for k in 0..traj.len() {
        let st = traj.at(k);
        let (m, e) = (mass(&st), energy(&st, &coeffs)?);
        table.push(vec![
            "simulate".into(),
            k.into(),
            Cell::Float(k as f64 * traj.dt()),
            Cell::Float(m),
            Cell::Float(e),
            Cell::Float(drift(m, m0)),
            Cell::Float(drift(e, e0)),
        ])?;
    }
    sink.table("conservation", table)?;
    if cfg.get("snapshots", true)? {
        sink.snapshots("initial", &data)?;
        sink.snapshots("final", &traj.last())?;
    }
    Ok(())
}

fn picard_table(report: &PicardReport, seed: u64) -> Result<ResultTable> {
    let mut table = ResultTable::new(["experiment", "iteration", "difference", "ratio", "final_residual"], seed);
    for (i, d) in report.differences.iter().enumerate() {
        let ratio = if i == 0 { f64::NAN } else { report.ratios[i - 1] };
        table.push(vec![
            "picard".into(),
            (i + 1).into(),
            Cell::Float(*d),
            Cell::Float(ratio),
            Cell::Float(report.final_residual),
        ])?;
    }
    Ok(table)
}

fn picard(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let coeffs = coefficients(cfg)?;
    let data = initial_data(cfg)?;
    let t_final = cfg.t_final.unwrap_or(1.0);
    let mut opts = PicardOptions::new(cfg.tol, cfg.get("max_iter", 30)?);
    if let Some(steps) = cfg.opt("steps")? {
        opts = opts.with_steps(steps);
    }
    match picard_solve(&data, &coeffs, t_final, &opts) {
        Ok((sol, report)) => {
            sink.table("picard", picard_table(&report, cfg.seed)?)?;
            if cfg.get("snapshots", true)? {
                sink.snapshots("final", &sol.last())?;
            }
            Ok(())
        }
        Err(Error::NonConvergence { reason, report }) => {
            sink.table("picard", picard_table(&report, cfg.seed)?)?;
            sink.out.notes.push(format!("non-convergence: {reason}"));
            Err(Error::NonConvergence { reason, report })
        }
        Err(e) => Err(e),
    }
}

fn witness_text(w: &[Vec<i64>; 3]) -> String {
    let parts: Vec<String> = w
        .iter()
        .map(|x| format!("({})", x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("({})", parts.join(","))
}

fn resonance_scan(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let coeffs = coefficients(cfg)?;
    let ks = cfg.list::<usize>("K")?.unwrap_or_else(|| vec![cfg.cutoff]);
    let sig = [cfg.alpha.clone(), cfg.beta.clone(), cfg.gamma.clone()];
    let mut table = ResultTable::new(
        [
            "sigma1", "sigma2", "sigma3", "K", "d", "min_ratio_num", "min_ratio_den", "witness", "hh_nonresonant",
            "hl_nonresonant", "triples_scanned",
        ],
        cfg.seed,
    );
    for k in ks {
        let scan = scan_min_ratio(&sig, k, cfg.dim)?;
        table.push(vec![
            coeffs.alpha.to_string().into(),
            coeffs.beta.to_string().into(),
            coeffs.gamma.to_string().into(),
            k.into(),
            cfg.dim.into(),
            scan.min_ratio.numer().to_string().into(),
            scan.min_ratio.denom().to_string().into(),
            witness_text(&scan.witness).into(),
            coeffs.hh_nonresonant.to_string().into(),
            coeffs.hl_nonresonant.to_string().into(),
            scan.triples_scanned.into(),
        ])?;
    }
    sink.table("resonance-scan", table)?;
    Ok(())
}

fn dyadics(cfg: &ExperimentConfig, key: &str, default: &[u64]) -> Result<Vec<DyadicIndex>> {
    cfg.list::<u64>(key)?
        .unwrap_or_else(|| default.to_vec())
        .into_iter()
        .map(DyadicIndex::new)
        .collect()
}

/// One (x, final running sup) row per block of consecutive rows sharing `key`.
fn sup_summary(table: &ResultTable, key: &str, seed: u64) -> Result<ResultTable> {
    let xs = table.numeric_column(key)?;
    let sups = table.numeric_column("running_sup")?;
    let mut out = ResultTable::new([key, "sup"], seed);
    for i in 0..xs.len() {
        if i + 1 == xs.len() || xs[i + 1] != xs[i] {
            out.push(vec![Cell::Float(xs[i]), Cell::Float(sups[i])])?;
        }
    }
    Ok(out)
}

fn concat(tables: Vec<ResultTable>) -> Result<ResultTable> {
    let mut it = tables.into_iter();
    let mut first = it.next().ok_or_else(|| Error::InvalidParameter("empty sweep".into()))?;
    for t in it {
        first.extend(t)?;
    }
    Ok(first)
}

fn strichartz(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let ns = dyadics(cfg, "N", &[4, 8, 16])?;
    let p: f64 = cfg.get("p", 4.0)?;
    let sigma = cfg.rational("sigma", &cfg.alpha)?;
    let tables = ns
        .iter()
        .map(|&n| strichartz_ratio(n, p, &sigma, cfg.dim, cfg.trials, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let table = sink.table("strichartz", concat(tables)?)?;
    let summary = sup_summary(&table, "N", cfg.seed)?;
    sink.series("strichartz", &summary, "N", "sup")?;
    if summary.len() >= 2 {
        let slope = loglog_slope(&summary.numeric_column("N")?, &summary.numeric_column("sup")?)?;
        sink.out.notes.push(format!("loglog_slope = {slope}"));
    }
    Ok(())
}

fn bilinear(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let hs = dyadics(cfg, "H", &[16, 32, 64])?;
    let l = DyadicIndex::new(cfg.get("L", 4)?)?;
    let case: BilinearCase = cfg.get("case", BilinearCase::HHL)?;
    let s1 = cfg.rational("sigma1", &cfg.alpha)?;
    let s2 = cfg.rational("sigma2", &cfg.beta)?;
    let tables = hs
        .iter()
        .map(|&h| bilinear_ratio(h, l, case, &s1, &s2, cfg.dim, cfg.trials, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let table = sink.table("bilinear", concat(tables)?)?;
    let summary = sup_summary(&table, "H", cfg.seed)?;
    sink.series("bilinear", &summary, "H", "sup")?;
    if summary.len() >= 2 {
        let delta = fit_delta(&summary.numeric_column("H")?, l.as_f64(), &summary.numeric_column("sup")?)?;
        sink.out.notes.push(format!("fitted_delta = {delta}"));
    }
    Ok(())
}

fn trilinear(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let lists = [
        dyadics(cfg, "N1", &[8])?,
        dyadics(cfg, "N2", &[8])?,
        dyadics(cfg, "N3", &[2])?,
    ];
    let len = lists[0].len();
    if lists.iter().any(|l| l.len() != len) {
        return Err(Error::InvalidParameter("N1, N2, N3 lists must have equal length".into()));
    }
    let coeffs = coefficients(cfg)?;
    let mode: TrilinearMode = cfg.get("mode", TrilinearMode::Nonresonant)?;
    let t = cfg.t_final.unwrap_or_else(|| coeffs.period());
    let mut tables = Vec::new();
    for i in 0..len {
        let opts = TrilinearOptions {
            n: [lists[0][i], lists[1][i], lists[2][i]],
            sigmas: [cfg.alpha.clone(), cfg.beta.clone(), cfg.gamma.clone()],
            dim: cfg.dim,
            t,
            c_split: cfg.opt("c_split")?,
            trials: cfg.trials,
            seed: cfg.seed,
            mode,
            time_samples: cfg.opt("time_samples")?,
        };
        let report = trilinear_j(&opts)?;
        sink.out.notes.push(format!(
            "N = ({}, {}, {}): M = {}, C_split = {}, min |h| = {}, time samples = {}, triples = {}",
            opts.n[0].value(),
            opts.n[1].value(),
            opts.n[2].value(),
            report.m.value(),
            report.c_split,
            report.h_min,
            report.time_samples,
            report.triples
        ));
        tables.push(report.table);
    }
    sink.table("trilinear", concat(tables)?)?;
    Ok(())
}

fn vnorm_selftest(sink: &mut Sink) -> Result<()> {
    let cfg = sink.cfg;
    let paths: usize = cfg.get("paths", 1000)?;
    let max_len: usize = cfg.get("max_len", 12)?;
    let p: f64 = cfg.get("p", 2.0)?;
    if !(1..=16).contains(&max_len) {
        return Err(Error::InvalidParameter("max_len must lie in 1..=16".into()));
    }
    let mut table = ResultTable::new(["experiment", "trial", "n", "dp", "reference", "difference"], cfg.seed);
    for trial in 0..paths as u64 {
        let mut rng = trial_rng(cfg.seed, trial);
        let n = 1 + (qdnls::lab::complex_gaussian(&mut rng).norm_sqr() * 1e6) as usize % max_len;
        let path: Vec<Complex64> = (0..n).map(|_| qdnls::lab::complex_gaussian(&mut rng)).collect();
        let dist = |i: usize, j: usize| (path[i] - path[j]).norm();
        let dp = vp_variation_with(n, p, dist)?;
        let brute = vp_variation_exhaustive(n, p, dist);
        table.push(vec![
            "v-variation".into(),
            trial.into(),
            n.into(),
            Cell::Float(dp),
            Cell::Float(brute),
            Cell::Float((dp - brute).abs()),
        ])?;
    }
    let lat = FrequencyLattice::new(cfg.dim, cfg.cutoff.min(4), cfg.scale)?;
    let sigma = qdnls::resonance::to_f64(&cfg.alpha);
    for trial in 0..4u64 {
        let mut rng = trial_rng(cfg.seed, paths as u64 + trial);
        let datum = random_field(&lat, 1, 2, 0.0, 1.0, &mut rng)?;
        let samples = 12;
        let traj = Trajectory::free(&datum, sigma, 0.05, samples)?;
        let y0 = ys_norm(&traj, sigma, 0.0);
        let l2 = hs_norm(&datum, 0.0);
        table.push(vec![
            "y0-free".into(),
            trial.into(),
            samples.into(),
            Cell::Float(y0),
            Cell::Float(l2),
            Cell::Float((y0 - l2).abs()),
        ])?;
    }
    sink.table("vnorm-selftest", table)?;
    Ok(())
}
