use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use kdv_edge::config::Config;
use kdv_edge::edge::{edge_table, verify_window, EdgeSolver};
use kdv_edge::harness::{self, Figure1Options};
use kdv_edge::kdvsim::{self, SimConfig};
use kdv_edge::painleve2::{self, build_hm};
use kdv_edge::profile::{by_name, Profile};
use kdv_edge::{Expansion, Table};

/// Leading-edge asymptotics for small-dispersion KdV.
///
/// Every numeric option can also come from a `key = value` config file;
/// command-line flags win over the file.
#[derive(Parser)]
#[command(name = "kdv-edge", version)]
struct Cli {
    /// Config file (`key = value` lines, `#` comments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Extra `key=value` override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Initial data profile.
    #[arg(long, global = true)]
    profile: Option<String>,

    /// Output file (output directory for `figure1`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leading-edge states u, v, x⁻, c at the given times.
    Edge(EdgeArgs),
    /// Hastings–McLeod table s, q, q', p, b.
    Hm(HmArgs),
    /// Expansion terms across the edge window.
    Expand(ExpandArgs),
    /// KdV snapshots from the pseudospectral solver.
    Simulate(SimulateArgs),
    /// Expansion against simulation for several ε, with the rate fit.
    Compare(CompareArgs),
    /// Margins of the admissibility inequalities at x⁻.
    Verify(VerifyArgs),
    /// The ε = 0.01, t = 0.4 snapshot with the edge overlay.
    Figure1(FigureArgs),
}

#[derive(Args)]
struct EdgeArgs {
    /// Comma-separated times.
    #[arg(long)]
    t: Option<String>,
}

#[derive(Args)]
struct HmArgs {
    #[arg(long, allow_hyphen_values = true)]
    s_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s_max: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Window in X = (x - x⁻)/ε^{2/3}, as `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Domain half-width.
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    /// Time step; automatic when absent.
    #[arg(long)]
    dt: Option<f64>,
    /// Comma-separated snapshot times; the last is the end time.
    #[arg(long)]
    t: Option<String>,
    /// Disable 2/3-rule dealiasing.
    #[arg(long)]
    no_dealias: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    t: Option<f64>,
    /// Comma-separated, strictly decreasing.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    t: Option<String>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Overlay half-width in X.
    #[arg(long)]
    window: Option<f64>,
}

fn put<T: ToString>(cfg: &mut Config, key: &str, value: &Option<T>) -> Result<()> {
    if let Some(v) = value {
        cfg.set(key, &v.to_string())?;
    }
    Ok(())
}

fn pair(cfg: &Config, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
    match cfg.f64_list(key)? {
        None => Ok(default),
        Some(v) if v.len() == 2 => Ok((v[0], v[1])),
        Some(v) => Err(kdv_edge::Error::InvalidConfig(format!("`{key}` needs two values, got {}", v.len())).into()),
    }
}

fn list(cfg: &Config, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    Ok(cfg.f64_list(key)?.unwrap_or_else(|| default.to_vec()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn required(cfg: &Config, key: &str) -> Result<f64> {
    cfg.f64(key)?.ok_or_else(|| kdv_edge::Error::InvalidConfig(format!("missing `{key}`")).into())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => Config::new(),
    };
    put(&mut cfg, "profile", &cli.profile)?;
    let allowed: &[&str] = match &cli.command {
        Command::Edge(a) => {
            put(&mut cfg, "t", &a.t)?;
            &["profile", "t"]
        }
        Command::Hm(a) => {
            put(&mut cfg, "s_min", &a.s_min)?;
            put(&mut cfg, "s_max", &a.s_max)?;
            put(&mut cfg, "nodes", &a.nodes)?;
            &["profile", "s_min", "s_max", "nodes"]
        }
        Command::Expand(a) => {
            put(&mut cfg, "t", &a.t)?;
            put(&mut cfg, "eps", &a.eps)?;
            put(&mut cfg, "window", &a.window)?;
            put(&mut cfg, "points", &a.points)?;
            &["profile", "t", "eps", "window", "points"]
        }
        Command::Simulate(a) => {
            put(&mut cfg, "eps", &a.eps)?;
            put(&mut cfg, "n", &a.n)?;
            put(&mut cfg, "half_width", &a.half_width)?;
            put(&mut cfg, "dt", &a.dt)?;
            put(&mut cfg, "t", &a.t)?;
            if a.no_dealias {
                cfg.set("dealias", "false")?;
            }
            &["profile", "eps", "n", "half_width", "dt", "t", "dealias"]
        }
        Command::Compare(a) => {
            put(&mut cfg, "t", &a.t)?;
            put(&mut cfg, "eps", &a.eps)?;
            put(&mut cfg, "window", &a.window)?;
            &["profile", "t", "eps", "window"]
        }
        Command::Verify(a) => {
            put(&mut cfg, "t", &a.t)?;
            &["profile", "t"]
        }
        Command::Figure1(a) => {
            put(&mut cfg, "eps", &a.eps)?;
            put(&mut cfg, "t", &a.t)?;
            put(&mut cfg, "n", &a.n)?;
            put(&mut cfg, "window", &a.window)?;
            &["profile", "eps", "t", "n", "window"]
        }
    };
    for pair in &cli.overrides {
        cfg.set_pair(pair)?;
    }
    cfg.check_keys(allowed)?;

    let name = cfg.str("profile").unwrap_or("sech2");
    let profile: Box<dyn Profile> =
        by_name(name).ok_or_else(|| kdv_edge::Error::InvalidConfig(format!("unknown profile `{name}`")))?;
    let p = profile.as_ref();

    match &cli.command {
        Command::Edge(_) => {
            let solver = EdgeSolver::new(p)?;
            let times = list(&cfg, "t", &[0.3, 0.4])?;
            let mut table = edge_table(&solver.solve_many(&times)?);
            let cat = solver.catastrophe();
            table
                .meta("profile", p.name())
                .meta("t_c", cat.t_c)
                .meta("u_c", cat.u_c)
                .meta("x_c", cat.x_c)
                .meta("T", solver.t_max());
            emit(&cli.out, &table.render())
        }
        Command::Hm(_) => {
            let hm = build_hm(
                cfg.f64_or("s_min", painleve2::DEFAULT_S_MIN)?,
                cfg.f64_or("s_max", painleve2::DEFAULT_S_MAX)?,
                cfg.usize_or("nodes", painleve2::DEFAULT_NODES)?,
                painleve2::DEFAULT_TOL,
            )?;
            emit(&cli.out, &hm.to_table().render())
        }
        Command::Expand(_) => {
            let t = cfg.f64_or("t", harness::DEFAULT_T)?;
            let eps = required(&cfg, "eps")?;
            let w = kdv_edge::expansion::DEFAULT_WINDOW;
            let (lo, hi) = pair(&cfg, "window", (-w, w))?;
            let points = cfg.usize_or("points", 401)?;
            let e = EdgeSolver::new(p)?.solve(t)?;
            let hm = painleve2::build_default()?;
            let ex = Expansion::new(p, &e, &hm, eps)?;
            let mut table = ex.table(&ex.grid(lo, hi, points)?);
            table.meta("eps", eps).meta("t", t).meta("x_minus", e.x_minus).meta("u", e.u).meta("v", e.v).meta("c", e.c);
            emit(&cli.out, &table.render())
        }
        Command::Simulate(_) => {
            let times = list(&cfg, "t", &[0.4])?;
            let t_end = times.iter().cloned().fold(f64::NAN, f64::max);
            let sim = SimConfig {
                half_width: cfg.f64_or("half_width", kdvsim::DEFAULT_HALF_WIDTH)?,
                dt: cfg.f64("dt")?,
                dealias: cfg.bool("dealias")?.unwrap_or(true),
                ..SimConfig::new(required(&cfg, "eps")?, cfg.usize_or("n", 8192)?, t_end)
            };
            let fields = kdvsim::simulate(p, &sim, &times)?;
            emit(&cli.out, &kdvsim::snapshots_text(&fields))
        }
        Command::Compare(_) => {
            let t = cfg.f64_or("t", harness::DEFAULT_T)?;
            let eps = list(&cfg, "eps", &harness::DEFAULT_EPS)?;
            let window = pair(&cfg, "window", harness::DEFAULT_WINDOW_X)?;
            let e = EdgeSolver::new(p)?.solve(t)?;
            let hm = painleve2::build_default()?;
            let mut table = harness::compare(p, &e, &hm, &eps, window)?.table();
            table.meta("x_minus", e.x_minus);
            emit(&cli.out, &table.render())
        }
        Command::Verify(_) => {
            let solver = EdgeSolver::new(p)?;
            let t_c = solver.catastrophe().t_c;
            let times = list(&cfg, "t", &[t_c + 0.02, 0.3, 0.4])?;
            let mut table = Table::new(&[
                "t",
                "phi_prime",
                "im_phi_plus",
                "tau_direct",
                "tau_closed",
                "max_term",
                "form_discrepancy",
                "holds",
            ]);
            for e in solver.solve_many(&times)? {
                let r = verify_window(p, &e)?;
                table.push(vec![
                    r.t,
                    r.phi_prime,
                    r.im_phi_plus,
                    r.tau_direct,
                    r.tau_closed,
                    r.max_term,
                    r.form_discrepancy,
                    if r.all_positive() { 1.0 } else { 0.0 },
                ]);
            }
            table.meta("profile", p.name()).meta("T", solver.t_max());
            emit(&cli.out, &table.render())
        }
        Command::Figure1(_) => {
            let d = Figure1Options::default();
            let opts = Figure1Options {
                eps: cfg.f64_or("eps", d.eps)?,
                t: cfg.f64_or("t", d.t)?,
                n: cfg.usize_or("n", d.n)?,
                window: cfg.f64_or("window", d.window)?,
            };
            let hm = painleve2::build_default()?;
            let fig = harness::figure1(p, &hm, &opts)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("figure1"));
            fig.write(&dir)?;
            std::io::stdout().lock().write_all(fig.summary.table().render().as_bytes())?;
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<kdv_edge::Error>()) {
        Some(e) if e.is_validation() => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
