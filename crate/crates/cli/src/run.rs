//! Stream replay: one oracle per mode, one CSV row per answered command.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use dyndist::complexity::{default_params, headline_table, Mode as Balance, OmegaTable};
use dyndist::ff_poly::rng_from_seed;
use dyndist::metrics::{closeness_all, diameter_15, diameter_1eps, eccentricities_35, radius_15, DistanceSource, MetricSnapshot};
use dyndist::oracle::{dijkstra_apsp, metrics_from, ExactMetrics};
use dyndist::shorthop::{pow_cap, ShortHopOracle, ShortHopParams};
use dyndist::{ApspOracle, DistMatrix, DynGraph, ExactDiameter, FieldConfig, OracleParams, SsspOracle, UndirectedOracle};
use sha2::{Digest, Sha256};

use crate::parse::{parse_graph, parse_stream, Command, Symbols};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Apsp,
    ApspExplicit,
    Sssp,
    Undirected,
    Diameter15,
    DiameterEps,
    Radius,
    Ecc,
    Closeness,
    ExactDiam,
    Complexity,
}

/// Replays an update stream against a dynamic distance oracle.
#[derive(Clone, Debug, Parser)]
#[command(name = "dyndist", version, about)]
pub struct Config {
    /// Graph file: `n m directed|undirected`, then `u v w` lines.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Command stream (U, Q, S, D, R, E, C, X).
    #[arg(long)]
    pub stream: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Apsp)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Hop exponent; defaults to the balanced value for the mode.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Field modulus; defaults to 2^61 − 1.
    #[arg(long)]
    pub prime: Option<u64>,
    /// Recompute exact answers per command and append ratio columns.
    #[arg(long)]
    pub oracle_check: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// Worker threads for the engine's internal parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Config {
    pub fn new(mode: Mode) -> Self {
        Config {
            graph: None,
            stream: None,
            mode,
            epsilon: 0.5,
            s: None,
            mu: None,
            nu: None,
            seed: 1,
            prime: None,
            oracle_check: false,
            csv_out: None,
            threads: None,
        }
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub cmd_id: usize,
    pub command: String,
    pub wall_ms: f64,
    pub op_count: u64,
    pub digest: String,
    pub check: Option<Check>,
}

/// Ratio summary of one checked answer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Check {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub violations: usize,
}

impl Check {
    fn new() -> Self {
        Check { min_ratio: f64::INFINITY, max_ratio: f64::NEG_INFINITY, violations: 0 }
    }

    fn ratio(&mut self, est: f64, truth: f64) {
        if truth.is_finite() && truth > 0.0 && est.is_finite() {
            let r = est / truth;
            self.min_ratio = self.min_ratio.min(r);
            self.max_ratio = self.max_ratio.max(r);
        }
    }

    fn fail_unless(&mut self, ok: bool) {
        if !ok {
            self.violations += 1;
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub rows: Vec<Row>,
    /// Extra lines printed by the complexity mode.
    pub table: Vec<String>,
    pub violations: usize,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            1
        } else {
            0
        }
    }
}

/// SHA-256 over the little-endian bit patterns of the answer values.
pub fn digest(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

const SLACK: f64 = 1e-9;

enum Engine {
    Apsp(ApspOracle),
    Sssp(SsspOracle),
    Undirected(UndirectedOracle),
    Short(ShortHopOracle),
    Exact(ExactDiameter),
}

impl Engine {
    fn ops(&self) -> u64 {
        match self {
            Engine::Apsp(o) => o.ops(),
            Engine::Sssp(o) => o.ops(),
            Engine::Undirected(o) => o.ops(),
            Engine::Short(o) => o.ops(),
            Engine::Exact(o) => o.ops(),
        }
    }

    fn update(&mut self, u: usize, v: usize, w: f64) -> Result<(), CliError> {
        match self {
            Engine::Apsp(o) => o.update(u, v, w)?,
            Engine::Sssp(o) => {
                o.update(u, v, w)?;
            }
            Engine::Undirected(o) => o.update(u, v, w)?,
            Engine::Short(o) => o.update(u, v, w)?,
            Engine::Exact(o) => o.update(u, v, w)?,
        }
        Ok(())
    }

    fn source(&mut self) -> Option<&mut dyn DistanceSource> {
        match self {
            Engine::Apsp(o) => Some(o),
            Engine::Undirected(o) => Some(o),
            Engine::Short(o) => Some(o),
            _ => None,
        }
    }

    /// Approximation the answers of Q and S carry, and the value bound.
    fn accuracy(&mut self) -> (f64, f64) {
        match self {
            Engine::Sssp(o) => (o.eps(), f64::INFINITY),
            Engine::Exact(_) => (0.0, f64::INFINITY),
            other => {
                let s = other.source().expect("distance source");
                (s.eps(), s.bound())
            }
        }
    }
}

fn params(cfg: &Config, kind: Balance) -> OracleParams {
    let d = default_params(kind);
    OracleParams::new(cfg.s.unwrap_or(d.s), cfg.mu.unwrap_or(d.mu), cfg.nu.unwrap_or(d.nu), cfg.epsilon)
}

fn balance_kind(mode: Mode) -> Balance {
    match mode {
        Mode::Apsp => Balance::ApspQuery,
        Mode::ApspExplicit => Balance::ApspExplicit,
        Mode::Sssp => Balance::Sssp,
        Mode::Undirected | Mode::Ecc | Mode::Closeness => Balance::Undirected,
        Mode::Diameter15 | Mode::DiameterEps | Mode::Radius => Balance::Diameter,
        Mode::ExactDiam | Mode::Complexity => Balance::ExactDiameter,
    }
}

fn build_engine(cfg: &Config, f: &FieldConfig, g: &DynGraph) -> Result<Engine, CliError> {
    let p = params(cfg, balance_kind(cfg.mode));
    let seed = cfg.seed;
    Ok(match cfg.mode {
        Mode::Apsp | Mode::ApspExplicit => Engine::Apsp(ApspOracle::new(f, g, &p, seed)?),
        Mode::Sssp => Engine::Sssp(SsspOracle::new(f, g, 0, &p, seed)?),
        Mode::Undirected | Mode::Ecc | Mode::Closeness => Engine::Undirected(UndirectedOracle::new(f, g, &p, seed)?),
        Mode::Diameter15 | Mode::DiameterEps | Mode::Radius => {
            let n = g.n();
            let w = g.w_cap().ceil().max(1.0) as usize;
            // radius needs twice the range; half the accuracy budget stays with the metric
            let reach = if cfg.mode == Mode::Radius { 2 } else { 1 };
            let sp = ShortHopParams {
                bound: w * reach * pow_cap(n, p.s),
                eps: cfg.epsilon / 2.0,
                mu_cap: pow_cap(n, p.mu),
                nu_cap: pow_cap(n, p.nu),
            };
            Engine::Short(ShortHopOracle::new(f, g, &sp, rng_from_seed(seed))?)
        }
        Mode::ExactDiam => Engine::Exact(ExactDiameter::new(f, g, p.s, p.mu, rng_from_seed(seed))?),
        Mode::Complexity => unreachable!("complexity mode has no engine"),
    })
}

fn supported(mode: Mode, cmd: &Command) -> bool {
    let metric_source = !matches!(mode, Mode::Sssp | Mode::ExactDiam);
    match cmd {
        Command::Update { .. } => true,
        Command::Query { .. } => metric_source,
        Command::Source(_) => mode != Mode::ExactDiam,
        Command::Diameter | Command::Radius | Command::Eccentricities | Command::Closeness => metric_source,
        Command::ExactDiameter => mode == Mode::ExactDiam,
    }
}

fn flat(m: &DistMatrix) -> Vec<f64> {
    m.data().to_vec()
}

fn check_pairs(est: &DistMatrix, truth: &DistMatrix, eps: f64, bound: f64) -> Check {
    let mut c = Check::new();
    for (&e, &t) in est.data().iter().zip(truth.data()) {
        c.ratio(e, t);
        let never_under = e >= t * (1.0 - SLACK);
        let in_scope = t <= bound;
        let upper = !in_scope || (t.is_infinite() && e.is_infinite()) || e <= t * (1.0 + eps) * (1.0 + SLACK);
        c.fail_unless(never_under && upper);
    }
    c
}

struct Truth {
    d: DistMatrix,
    m: ExactMetrics,
}

fn truth(g: &DynGraph) -> Truth {
    let d = dijkstra_apsp(g).0;
    let m = metrics_from(&d);
    Truth { d, m }
}

/// Runs the configured mode; errors map to exit code 2.
pub fn run(cfg: &Config) -> Result<Report, CliError> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(CliError::Config(format!("epsilon {} must lie in (0, 1]", cfg.epsilon)));
    }
    let body = || -> Result<Report, CliError> {
        if cfg.mode == Mode::Complexity {
            return Ok(complexity_report());
        }
        replay(cfg)
    };
    match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}

fn complexity_report() -> Report {
    let mut rep = Report::default();
    rep.table.push("name,target,value,s,mu,nu,within".into());
    for h in headline_table(OmegaTable::embedded()) {
        let ok = h.within(0.005);
        if !ok {
            rep.violations += 1;
        }
        rep.table.push(format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{}",
            h.name, h.target, h.value, h.point.s, h.point.mu, h.point.nu, ok
        ));
    }
    rep
}

fn read(path: &Option<PathBuf>, what: &str) -> Result<(String, String), CliError> {
    let path = path.as_ref().ok_or_else(|| CliError::Config(format!("--{what} is required for this mode")))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((path.display().to_string(), text))
}

fn replay(cfg: &Config) -> Result<Report, CliError> {
    let (gpath, gtext) = read(&cfg.graph, "graph")?;
    let mut syms = Symbols::default();
    let spec = parse_graph(&gpath, &gtext, &mut syms)?;
    let cmds = match &cfg.stream {
        Some(_) => {
            let (spath, stext) = read(&cfg.stream, "stream")?;
            parse_stream(&spath, &stext, &mut syms)?
        }
        None => Vec::new(),
    };
    if let Some((i, c)) = cmds.iter().enumerate().find(|(_, c)| !supported(cfg.mode, c)) {
        return Err(CliError::Config(format!("command {} (`{}`) is not available in {:?} mode", i + 1, c.tag(), cfg.mode)));
    }
    let mut graph = spec.build(&cmds)?;
    let f = match cfg.prime {
        Some(p) => FieldConfig::new(p)?,
        None => FieldConfig::mersenne61(),
    };
    let mut engine = build_engine(cfg, &f, &graph)?;
    let eps = cfg.epsilon;
    let n = graph.n();
    let all: Vec<usize> = (0..n).collect();
    let mut rep = Report::default();
    for (id, cmd) in cmds.iter().enumerate() {
        let start = Instant::now();
        let ops0 = engine.ops();
        let mut rng = rng_from_seed(cfg.seed ^ (id as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        // answer values plus an optional check closure input
        let answer: Option<(Vec<f64>, Option<Check>)> = match cmd {
            Command::Update { u, v, w } => {
                graph.set_weight(*u, *v, *w)?;
                engine.update(*u, *v, *w)?;
                match &mut engine {
                    Engine::Apsp(o) if cfg.mode == Mode::ApspExplicit => {
                        let full = o.query(&all, &all)?;
                        let chk = cfg.oracle_check.then(|| check_pairs(&full, &truth(&graph).d, o.eps(), f64::INFINITY));
                        Some((flat(&full), chk))
                    }
                    Engine::Sssp(o) => {
                        let row = DistMatrix::from_vec(1, n, o.row().to_vec())?;
                        let chk = cfg.oracle_check.then(|| check_pairs(&row, &truth(&graph).d.select(&[o.source()], &all), o.eps(), f64::INFINITY));
                        Some((flat(&row), chk))
                    }
                    _ => None,
                }
            }
            Command::Query { rows, cols } => {
                let (acc, bound) = engine.accuracy();
                let est = engine.source().expect("checked above").query(rows, cols)?;
                let chk = cfg.oracle_check.then(|| check_pairs(&est, &truth(&graph).d.select(rows, cols), acc, bound));
                Some((flat(&est), chk))
            }
            Command::Source(s) => {
                let (acc, bound) = engine.accuracy();
                let est = match &mut engine {
                    Engine::Sssp(o) => DistMatrix::from_vec(1, n, o.set_source(*s)?.to_vec())?,
                    other => other.source().expect("checked above").query(&[*s], &all)?,
                };
                let chk = cfg.oracle_check.then(|| check_pairs(&est, &truth(&graph).d.select(&[*s], &all), acc, bound));
                Some((flat(&est), chk))
            }
            Command::ExactDiameter => {
                let Engine::Exact(o) = &mut engine else { unreachable!("checked above") };
                let d = o.diameter(&mut rng)?;
                let chk = cfg.oracle_check.then(|| {
                    let mut c = Check::new();
                    let t = truth(&graph).m.diameter;
                    c.ratio(d, t);
                    c.fail_unless(d == t);
                    c
                });
                Some((vec![d], chk))
            }
            metric => {
                let src = engine.source().expect("checked above");
                let mut snap = MetricSnapshot::new(src);
                let vals = match metric {
                    Command::Diameter if cfg.mode == Mode::DiameterEps => vec![diameter_1eps(&mut snap, eps, &mut rng)?],
                    Command::Diameter => vec![diameter_15(&mut snap, eps, &mut rng)?.value],
                    Command::Radius => vec![radius_15(&mut snap, eps, &mut rng)?.value],
                    Command::Eccentricities => eccentricities_35(&mut snap, eps, &mut rng)?,
                    _ => closeness_all(&mut snap, eps, &mut rng)?,
                };
                let chk = cfg.oracle_check.then(|| check_metric(cfg.mode, metric, &vals, &truth(&graph).m, eps));
                Some((vals, chk))
            }
        };
        let Some((vals, check)) = answer else { continue };
        if let Some(c) = &check {
            rep.violations += c.violations;
        }
        rep.rows.push(Row {
            cmd_id: id + 1,
            command: cmd.tag().to_string(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            op_count: engine.ops() - ops0,
            digest: digest(&vals),
            check,
        });
    }
    Ok(rep)
}

fn check_metric(mode: Mode, cmd: &Command, vals: &[f64], t: &ExactMetrics, eps: f64) -> Check {
    let mut c = Check::new();
    let (lo_ok, hi_ok) = (|v: f64, lo: f64| v >= lo - SLACK * lo.abs().max(1.0), |v: f64, hi: f64| v <= hi + SLACK * hi.abs().max(1.0));
    match cmd {
        Command::Diameter => {
            let (v, d) = (vals[0], t.diameter);
            c.ratio(v, d);
            if d.is_infinite() {
                c.fail_unless(v.is_infinite());
            } else if mode == Mode::DiameterEps {
                c.fail_unless(lo_ok(v, d) && hi_ok(v, (1.0 + eps) * d));
            } else {
                c.fail_unless(lo_ok(v, (2.0 / 3.0 - eps) * d - 1.0 / 3.0) && hi_ok(v, (1.0 + eps) * d));
            }
        }
        Command::Radius => {
            let (v, r) = (vals[0], t.radius);
            c.ratio(v, r);
            if r.is_infinite() {
                c.fail_unless(v.is_infinite());
            } else {
                c.fail_unless(lo_ok(v, r / (1.0 + eps)) && hi_ok(v, ((1.5 + eps) * r + 2.0 / 3.0) * (1.0 + eps)));
            }
        }
        Command::Eccentricities => {
            for (&v, &e) in vals.iter().zip(&t.ecc) {
                c.ratio(v, e);
                if e.is_infinite() {
                    c.fail_unless(v.is_infinite());
                } else {
                    c.fail_unless(lo_ok(v, (3.0 - 6.0 * eps) / 5.0 * e - 4.0 / 7.0) && hi_ok(v, (1.0 + 2.0 * eps) * e));
                }
            }
        }
        _ => {
            for (&v, &x) in vals.iter().zip(&t.closeness) {
                c.ratio(v, x);
                c.fail_unless(lo_ok(v, (1.0 - eps) * x) && hi_ok(v, (1.0 + eps) * x));
            }
        }
    }
    c
}

/// Header plus rows; ratio columns only when checking.
pub fn write_csv<W: Write>(out: W, rep: &Report, checking: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut head = vec!["cmd_id", "command", "wall_ms", "op_count", "digest"];
    if checking {
        head.extend(["min_ratio", "max_ratio", "violations"]);
    }
    w.write_record(&head)?;
    for r in &rep.rows {
        let mut rec = vec![r.cmd_id.to_string(), r.command.clone(), format!("{:.3}", r.wall_ms), r.op_count.to_string(), r.digest.clone()];
        if checking {
            let c = r.check.unwrap_or(Check::new());
            let fmt = |x: f64| if x.is_finite() { format!("{x:.6}") } else { String::new() };
            rec.extend([fmt(c.min_ratio), fmt(c.max_ratio), c.violations.to_string()]);
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses arguments, runs, writes output; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match Config::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = run(&cfg).and_then(|rep| {
        let sink: Box<dyn Write> = match &cfg.csv_out {
            Some(p) => Box::new(std::fs::File::create(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?),
            None => Box::new(std::io::stdout().lock()),
        };
        if cfg.mode == Mode::Complexity {
            let mut sink = sink;
            for line in &rep.table {
                writeln!(sink, "{line}")?;
            }
        } else {
            write_csv(sink, &rep, cfg.oracle_check)?;
        }
        Ok(rep.exit_code())
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
