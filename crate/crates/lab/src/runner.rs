//! Subcommand execution: config in, CSV files out.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use convergence_core::dynamics::{self, State};
use convergence_core::hypothesis::{self, HypothesisOptions, HypothesisReport};
use convergence_core::sequence::convolve_prefixes_capped;
use convergence_core::spectral::{self, FourierProfile};
use convergence_core::sweepout::{self, INF_THRESHOLD, SUP_THRESHOLD};
use convergence_core::{Error, LatticeMeasure, SequenceSpec};

use crate::config::{ConfigError, ExperimentConfig};
use crate::format::{self, num, CsvTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Convolve,
    Spectrum,
    Check,
    Simulate,
    Sweepout,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Convolve => "convolve",
            Task::Spectrum => "spectrum",
            Task::Check => "check",
            Task::Simulate => "simulate",
            Task::Sweepout => "sweepout",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid input: {0}")]
    Input(Error),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(Error),
    #[error("numerical check failed: {0}")]
    Numerical(Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot start thread pool: {0}")]
    Pool(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::SupportCap { .. } => RunError::ResourceCap(e),
            Error::NonConvergence { .. } => RunError::Numerical(e),
            e => RunError::Input(e),
        }
    }
}

impl RunError {
    /// 0 success, 1 I/O, 2 config or input, 3 resource cap, 4 failed
    /// internal check.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Input(_) => 2,
            RunError::ResourceCap(_) => 3,
            RunError::Numerical(_) | RunError::CheckFailed(_) => 4,
            RunError::Io { .. } | RunError::Pool(_) => 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir` and a
/// rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, RunError> {
    let path = dir.join(name);
    let io = |source| RunError::Io {
        path: path.clone(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    spec: SequenceSpec,
    out: &'a Path,
    task: Task,
    outcome: Outcome,
}

impl Ctx<'_> {
    fn table(&self, columns: &[&str]) -> CsvTable {
        let mut t = CsvTable::new(columns);
        t.meta("convergence-lab", self.task.name())
            .meta("sequence", self.spec.label())
            .meta("horizon", self.cfg.run.horizon);
        t
    }

    fn emit(&mut self, name: &str, table: &mut CsvTable) -> Result<(), RunError> {
        table.echo(&self.cfg.echo);
        let path = write_atomic(self.out, name, &table.to_bytes())?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn emit_text(&mut self, name: &str, text: &str) -> Result<(), RunError> {
        let path = write_atomic(self.out, name, text.as_bytes())?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn prefixes(&self) -> Result<Vec<LatticeMeasure>, RunError> {
        let r = &self.cfg.run;
        Ok(convolve_prefixes_capped(
            &self.spec,
            r.horizon,
            r.prune_eps,
            r.support_cap,
        )?)
    }
}

/// Runs `task`, optionally inside a dedicated pool of `threads` workers.
pub fn run(
    task: Task,
    cfg: &ExperimentConfig,
    out: &Path,
    threads: Option<usize>,
) -> Result<Outcome, RunError> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Pool(e.to_string()))?
            .install(|| run_inner(task, cfg, out)),
        None => run_inner(task, cfg, out),
    }
}

fn run_inner(task: Task, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    let mut ctx = Ctx {
        cfg,
        spec: cfg.sequence.build(),
        out,
        task,
        outcome: Outcome::default(),
    };
    let checked = match task {
        Task::Convolve => convolve(&mut ctx),
        Task::Spectrum => spectrum(&mut ctx),
        Task::Check => check(&mut ctx),
        Task::Simulate => simulate(&mut ctx),
        Task::Sweepout => sweepout(&mut ctx),
    }?;
    match checked {
        Some(failure) => Err(RunError::CheckFailed(failure)),
        None => Ok(ctx.outcome),
    }
}

/// `Some(reason)` signals a failed internal check after all files were
/// written.
type Checked = Result<Option<String>, RunError>;

fn convolve(ctx: &mut Ctx) -> Checked {
    let mus = ctx.prefixes()?;
    let mut weights = ctx.table(&["n", "k", "weight"]);
    weights.meta("prune_eps", num(ctx.cfg.run.prune_eps));
    let mut moments = ctx.table(&[
        "n",
        "min_index",
        "max_index",
        "mass",
        "mass_defect",
        "E",
        "m1",
        "m2",
        "shift_tv",
    ]);
    for (i, mu) in mus.iter().enumerate() {
        let n = (i + 1).to_string();
        for (k, w) in mu.atoms() {
            weights.row(vec![n.clone(), k.to_string(), num(w)]);
        }
        moments.row(vec![
            n,
            mu.min_index().to_string(),
            mu.max_index().to_string(),
            num(mu.mass()),
            num(mu.mass_defect()),
            num(mu.expectation()),
            num(mu.first_moment()),
            num(mu.second_moment()),
            num(mu.tv_shift_distance()),
        ]);
    }
    ctx.emit("convolve.csv", &mut weights)?;
    ctx.emit("moments.csv", &mut moments)?;
    let last = mus.last().expect("horizon >= 1");
    ctx.emit_text("mu_final.txt", &format::write_measure(last))?;
    ctx.outcome.summary.push(format!(
        "mu_{}: support [{}, {}], mass defect {:e}",
        mus.len(),
        last.min_index(),
        last.max_index(),
        last.mass_defect()
    ));
    Ok(None)
}

fn profile_table(ctx: &Ctx, p: &FourierProfile) -> CsvTable {
    let mut t = ctx.table(&["t", "re", "im", "abs", "abs_d1", "abs_d2"]);
    t.meta("grid_size", p.len())
        .meta("lipschitz_bound", num(p.lipschitz_bound))
        .meta("curvature_bound", num(p.curvature_bound));
    for j in 0..p.len() {
        t.row(vec![
            num(p.grid[j]),
            num(p.values[j].re),
            num(p.values[j].im),
            num(p.values[j].norm()),
            num(p.d1[j].norm()),
            num(p.d2[j].norm()),
        ]);
    }
    t
}

fn spectrum(ctx: &mut Ctx) -> Checked {
    let grid = ctx.cfg.run.grid_size;
    let nu = ctx.spec.measure(1)?;
    let cert = spectral::decay_certificate(&nu, grid)?;
    let mut t = profile_table(ctx, &spectral::fourier_eval(&nu, grid)?);
    t.meta("measure", "nu_1")
        .meta("decay_constant", num(cert.constant))
        .meta("origin_radius", num(cert.origin_radius));
    ctx.emit("spectrum_nu1.csv", &mut t)?;
    ctx.outcome
        .summary
        .push(format!("nu_1: certified decay constant {}", cert.constant));

    let mus = ctx.prefixes()?;
    let mut wanted = ctx.cfg.run.spectrum_n.clone();
    wanted.sort_unstable();
    wanted.dedup();
    for n in wanted {
        let p = spectral::fourier_eval(&mus[n - 1], grid)?;
        let (t_max, v_max) = p.max_off_zero();
        let mut t = profile_table(ctx, &p);
        t.meta("measure", format!("mu_{n}")).meta(
            "max_off_zero",
            format!("{} at t = {}", num(v_max), num(t_max)),
        );
        ctx.emit(&format!("spectrum_mu{n}.csv"), &mut t)?;
    }
    Ok(None)
}

fn options(ctx: &Ctx) -> HypothesisOptions {
    let r = &ctx.cfg.run;
    HypothesisOptions {
        grid_size: r.grid_size,
        prune_eps: r.prune_eps,
        support_cap: r.support_cap,
        trend_limit: r.trend_limit,
        bounded_trend_limit: r.bounded_trend_limit,
        tail_delta: r.tail_delta,
        d2_integrals: r.d2_integrals,
        ..HypothesisOptions::default()
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

fn check(ctx: &mut Ctx) -> Checked {
    let opts = options(ctx);
    let n_max = ctx.cfg.run.horizon;
    let report: HypothesisReport = hypothesis::check_all(&ctx.spec, n_max, &opts)?;
    let mut t = ctx.table(&[
        "n",
        "E",
        "m1",
        "m2",
        "phi_over_n",
        "decay_C",
        "rho",
        "d2_integral",
        "shift_tv",
        "sup_beyond",
        "strictly_aperiodic",
    ]);
    t.meta("grid_size", opts.grid_size)
        .meta("tail_delta", num(opts.tail_delta))
        .meta("trend_limit", num(opts.trend_limit))
        .meta("bounded_trend_limit", num(opts.bounded_trend_limit));
    for r in &report.rows {
        t.row(vec![
            r.n.to_string(),
            num(r.expectation),
            num(r.first_moment),
            num(r.second_moment),
            num(r.phi_over_n),
            num(r.decay_constant),
            num(r.rho),
            opt_num(r.d2_integral),
            num(r.shift_tv),
            num(r.sup_beyond),
            r.strictly_aperiodic.to_string(),
        ]);
    }
    ctx.emit("hypothesis.csv", &mut t)?;

    if let Some(s) = &report.sweepout {
        let mut t = ctx.table(&["n", "a_n", "x_n", "defect_sum", "drift", "product"]);
        for i in 0..s.horizon {
            t.row(vec![
                (i + 1).to_string(),
                num(s.weights[i]),
                s.atoms[i].to_string(),
                num(s.defect_sums[i]),
                s.drift[i].to_string(),
                num(s.products[i]),
            ]);
        }
        ctx.emit("sweepout_conditions.csv", &mut t)?;
    }

    let mut summary = report.summary_lines();
    let mut failure = None;
    if report.theorem_pos_holds() {
        let m = hypothesis::majorant_chain_check(&ctx.spec, n_max, &opts)?;
        let ok = m.holds(1e-6);
        summary.push(format!(
            "second-derivative majorant: {} (worst ratio {} at n = {}, t = {}, C = {})",
            if ok { "pass" } else { "FAIL" },
            m.worst_ratio,
            m.worst_n,
            m.worst_t,
            m.decay_constant
        ));
        if !ok {
            failure = Some(format!(
                "|mu_n''| exceeds its majorant by ratio {} at n = {}",
                m.worst_ratio, m.worst_n
            ));
        }
    }
    let mut text = summary.join("\n");
    text.push('\n');
    ctx.emit_text("summary.txt", &text)?;
    ctx.outcome.summary.extend(summary);
    Ok(failure)
}

fn simulate(ctx: &mut Ctx) -> Checked {
    let sys = ctx.cfg.system;
    let f = ctx.cfg.function.build(&sys);
    let mus = ctx.prefixes()?;
    let w = dynamics::weak11_table_of(&sys, &mus, &f, &ctx.cfg.run.lambdas)?;
    let mut t = ctx.table(&["lambda", "level_measure", "constant"]);
    t.meta("system", format!("{sys:?}"))
        .meta("norm_l1", num(w.norm_l1))
        .meta("max_mf", num(w.max_mf));
    for r in &w.rows {
        t.row(vec![num(r.lambda), num(r.level_measure), num(r.constant)]);
    }
    ctx.emit("weak11.csv", &mut t)?;

    let x: State = sys.state(ctx.cfg.run.state);
    let tr = dynamics::convergence_trace_of(&sys, &mus, &f, x, ctx.cfg.run.window)?;
    let mut t = ctx.table(&["n", "value"]);
    t.meta("system", format!("{sys:?}"))
        .meta("state", format!("{x:?}"))
        .meta("window_start", tr.window_start)
        .meta("oscillation", num(tr.oscillation));
    for (i, v) in tr.values.iter().enumerate() {
        t.row(vec![(i + 1).to_string(), num(*v)]);
    }
    ctx.emit("trace.csv", &mut t)?;
    ctx.outcome.summary.push(format!(
        "weak-(1,1) constant {} over {} levels; oscillation on [{}, {}] = {}",
        w.constant(),
        w.rows.len(),
        tr.window_start,
        mus.len(),
        tr.oscillation
    ));
    Ok(None)
}

fn scan_points(ctx: &Ctx) -> Vec<f64> {
    let s = &ctx.cfg.scan;
    let mut pts = sweepout::low_denominator_points(s.max_denominator);
    if s.uniform_points > 0 {
        pts.extend(spectral::uniform_grid(s.uniform_points));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn sweepout(ctx: &mut Ctx) -> Checked {
    let cfg = ctx.cfg;
    let mus = ctx.prefixes()?;
    // Everything that can fail runs before the first file is written.
    let rows = sweepout::dissipativity_of(&mus, cfg.run.radius);
    let points = scan_points(ctx);
    let scan = sweepout::fourier_floor_scan(&ctx.spec, &points, cfg.run.horizon)?;
    let sys = cfg.system;
    let sim = sweepout::sweepout_simulation_of(&sys, &mus, cfg.run.b_measure)?;

    let mut t = ctx.table(&["n", "near_mass"]);
    t.meta("K", cfg.run.radius)
        .meta("prune_eps", num(cfg.run.prune_eps));
    for r in &rows {
        t.row(vec![r.n.to_string(), num(r.near_mass)]);
    }
    ctx.emit("dissipativity.csv", &mut t)?;

    let mut t = ctx.table(&["t", "floor", "product", "contract_ok"]);
    t.meta(
        "points",
        format!(
            "p/q with q <= {} plus {} uniform points",
            cfg.scan.max_denominator, cfg.scan.uniform_points
        ),
    )
    .meta(
        "window",
        format!("[{}, {}]", scan.window_start, scan.horizon),
    )
    .meta("vacuous", scan.vacuous);
    for r in &scan.rows {
        t.row(vec![
            num(r.t),
            num(r.floor),
            num(r.product),
            r.contract_ok.to_string(),
        ]);
    }
    ctx.emit("floor_scan.csv", &mut t)?;

    let mut t = ctx.table(&["n", "sup_fraction", "inf_fraction"]);
    t.meta("system", format!("{sys:?}"))
        .meta("b_measure", num(sim.b_measure))
        .meta("sup_threshold", num(SUP_THRESHOLD))
        .meta("inf_threshold", num(INF_THRESHOLD))
        .meta("global_max", num(sim.global_max()));
    for i in 0..sim.horizon {
        t.row(vec![
            (i + 1).to_string(),
            num(sim.sup_trace[i]),
            num(sim.inf_trace[i]),
        ]);
    }
    ctx.emit("simulation.csv", &mut t)?;

    let last = rows.last().expect("horizon >= 1");
    ctx.outcome.summary.extend([
        format!(
            "dissipativity: max_|k|<={} mu_{}(k) = {}",
            cfg.run.radius, last.n, last.near_mass
        ),
        format!(
            "floor scan: {} points, product bound {}, contract {}",
            scan.rows.len(),
            scan.product,
            if scan.contract_holds() {
                "holds"
            } else {
                "VIOLATED"
            }
        ),
        format!(
            "simulation: running max >= {} on {} of states, running min <= {} on {}",
            SUP_THRESHOLD,
            sim.sup_fraction(),
            INF_THRESHOLD,
            sim.inf_fraction()
        ),
    ]);
    if !scan.vacuous && !scan.contract_holds() {
        let bad = scan
            .rows
            .iter()
            .find(|r| !r.contract_ok)
            .expect("a failing row");
        return Ok(Some(format!(
            "Fourier floor {} below product bound {} at t = {}",
            bad.floor, bad.product, bad.t
        )));
    }
    Ok(None)
}
