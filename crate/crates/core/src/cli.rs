//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::atlas::{render_markdown, reproduce_table};
use crate::error::{Error, Result};
use crate::geometry::{bloch_of_density, RootOptions, RootProfile};
use crate::io::{fmt17, pure_to_json, read_state, to_json_string};
use crate::measures::PolynomialMeasure;
use crate::oracle::{brute_force_roof, OracleOptions};
use crate::quantum::{spectral_decompose_rank2, DensityMatrix};
use crate::roof::ghzw::{
    ghzw_axis_origin, ghzw_convexity_breakpoint, ghzw_scan, GhzwEnvelope, DEFAULT_GRID,
};
use crate::roof::{iso_curves, roof_with, DispatchOptions, MethodChoice, RoofResult};

#[derive(Debug, Parser)]
#[command(
    name = "polyent",
    version,
    about = "Convex roofs of polynomial entanglement measures on rank-2 states"
)]
pub struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel stages (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Chordal radius for merging roots.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub root_tol: f64,
    /// Relative size below which a leading coefficient counts as zero.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub lead_tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Measure: concurrence, tangle or sqrt-tangle.
    #[arg(long)]
    pub measure: String,
    /// State file (JSON).
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of the measure on the Bloch sphere of a rank-2 state.
    Roots(StateArgs),
    /// Measure of a pure state.
    Entangle(StateArgs),
    /// Convex roof of a rank-1 or rank-2 state.
    Roof {
        #[command(flatten)]
        state: StateArgs,
        /// auto, one-root, two-root, ray, ghzw or oracle.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Include the optimal decomposition.
        #[arg(long)]
        witness: bool,
    },
    /// Brute-force minimization over decompositions.
    Oracle {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(2..=8))]
        ensemble_size: u32,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Root counts of the four-qubit family marginals against the reference table.
    Classify {
        /// Random draws per cell.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// Markdown table with a difference section.
        #[arg(long, conflicts_with = "json")]
        markdown: bool,
    },
    /// Tangle on the GHZ–W mixing axis.
    Ghzw {
        /// Mixing probabilities `from:to:count`.
        #[arg(long)]
        scan: Option<String>,
        /// Rows as CSV.
        #[arg(long)]
        csv: bool,
        /// Grid size of the lower hull.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Level curves of the pure-state measure as CSV `curve,x,y,z`.
    IsoCurves {
        #[command(flatten)]
        state: StateArgs,
        /// Level in measure units.
        #[arg(long)]
        level: f64,
        /// Meridians scanned.
        #[arg(long, default_value_t = 180)]
        count: usize,
    },
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Rank { .. } => 3,
        Error::Structure { .. } => 4,
        Error::Range(_) | Error::Degenerate => 5,
        _ => 2,
    }
}

/// Machine-readable error object.
pub fn error_json(e: &Error) -> String {
    to_json_string(
        &json!({"error": {"kind": e.kind(), "message": e.to_string(), "exit_code": exit_code(e)}}),
    )
}

/// Runs a parsed command and returns what goes to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    let roots = RootOptions {
        root_tol: cli.root_tol,
        lead_tol: cli.lead_tol,
        ..RootOptions::default()
    };
    if !(roots.root_tol > 0.0 && roots.lead_tol > 0.0) {
        return Err(Error::Domain("tolerances must be positive".into()));
    }
    match &cli.command {
        Command::Roots(a) => cmd_roots(cli, a, &roots),
        Command::Entangle(a) => cmd_entangle(cli, a),
        Command::Roof {
            state,
            method,
            witness,
        } => cmd_roof(cli, state, method, *witness, &roots),
        Command::Oracle {
            state,
            ensemble_size,
            restarts,
        } => cmd_oracle(cli, state, *ensemble_size as usize, *restarts),
        Command::Classify { samples, markdown } => {
            let report = reproduce_table(*samples, cli.seed, &roots)?;
            if cli.json && !markdown {
                Ok(to_json_string(&report))
            } else {
                Ok(render_markdown(&report))
            }
        }
        Command::Ghzw { scan, csv, grid } => cmd_ghzw(cli, scan.as_deref(), *csv, *grid),
        Command::IsoCurves {
            state,
            level,
            count,
        } => cmd_iso(cli, state, *level, *count, &roots),
    }
}

fn load(a: &StateArgs) -> Result<(PolynomialMeasure, crate::io::StateInput)> {
    let m = PolynomialMeasure::by_name(&a.measure)?;
    let s = read_state(&a.state)?;
    if s.n_qubits() != m.arity().trailing_zeros() as usize {
        return Err(Error::Dimension {
            expected: m.arity(),
            got: 1 << s.n_qubits(),
        });
    }
    Ok((m, s))
}

fn profile_of(
    m: &PolynomialMeasure,
    rho: &DensityMatrix,
    roots: &RootOptions,
) -> Result<RootProfile> {
    let basis = spectral_decompose_rank2(rho)?;
    RootProfile::compute(m, &basis, roots)
}

fn cmd_roots(cli: &Cli, a: &StateArgs, opts: &RootOptions) -> Result<String> {
    let (m, s) = load(a)?;
    let rho = s.to_density();
    let profile = profile_of(&m, &rho, opts)?;
    let basis = spectral_decompose_rank2(&rho)?;
    let rho_bloch = bloch_of_density(&basis, &rho)?;
    if cli.json {
        let roots: Vec<Value> = profile
            .roots
            .iter()
            .map(|r| {
                let b = r.bloch();
                json!({"omega": r.omega, "multiplicity": r.multiplicity, "bloch": [b.x, b.y, b.z]})
            })
            .collect();
        return Ok(to_json_string(&json!({
            "structure": profile.structure.as_str(),
            "N": profile.normalization,
            "roots": roots,
            "rho_bloch": [rho_bloch.x, rho_bloch.y, rho_bloch.z],
        })));
    }
    let mut out = String::new();
    writeln!(out, "structure  {}", profile.structure.as_str()).unwrap();
    writeln!(out, "N          {}", fmt17(profile.normalization)).unwrap();
    writeln!(out, "rho        {}", rho_bloch).unwrap();
    for r in &profile.roots {
        writeln!(
            out,
            "root       {}  x{}  {}",
            r.omega,
            r.multiplicity,
            r.bloch()
        )
        .unwrap();
    }
    Ok(out)
}

fn cmd_entangle(cli: &Cli, a: &StateArgs) -> Result<String> {
    let (m, s) = load(a)?;
    let psi = s.to_pure()?;
    let value = m.eval(&psi)?;
    let p = m.invariant(psi.amplitudes())?;
    if cli.json {
        return Ok(to_json_string(&json!({
            "measure": m.name(),
            "value": value,
            "invariant": [p.re, p.im],
        })));
    }
    Ok(format!("{} {}\n", m.name(), fmt17(value)))
}

fn roof_json(r: &RoofResult, with_witness: bool) -> Value {
    let mut v = json!({
        "method": r.method.as_str(),
        "value": r.value,
        "exact": r.exact,
        "geometry": r.geometry,
    });
    if let Some(note) = &r.note {
        v["note"] = json!(note);
    }
    if with_witness {
        if let Some(w) = &r.witness {
            v["witness"] = w
                .iter()
                .map(|(weight, psi)| json!({"weight": weight, "state": pure_to_json(psi)}))
                .collect();
        }
    }
    v
}

fn oracle_options(cli: &Cli) -> OracleOptions {
    OracleOptions {
        seed: cli.seed,
        ..OracleOptions::default()
    }
}

fn cmd_roof(
    cli: &Cli,
    a: &StateArgs,
    method: &str,
    witness: bool,
    roots: &RootOptions,
) -> Result<String> {
    let (m, s) = load(a)?;
    let choice: MethodChoice = method.parse()?;
    let opts = DispatchOptions {
        roots: *roots,
        oracle: oracle_options(cli),
        ..DispatchOptions::default()
    };
    let r = roof_with(&m, &s.to_density(), choice, &opts)?;
    if cli.json {
        return Ok(to_json_string(&roof_json(&r, witness)));
    }
    let mut out = String::new();
    writeln!(out, "method  {}", r.method.as_str()).unwrap();
    writeln!(out, "value   {}", fmt17(r.value)).unwrap();
    writeln!(out, "exact   {}", r.exact).unwrap();
    for (name, v) in [
        ("h", r.geometry.h),
        ("R", r.geometry.r),
        ("s", r.geometry.s),
        ("h_c", r.geometry.h_c),
    ] {
        if let Some(v) = v {
            writeln!(out, "{name:<7} {}", fmt17(v)).unwrap();
        }
    }
    if let Some(note) = &r.note {
        writeln!(out, "note    {note}").unwrap();
    }
    if witness {
        for (w, psi) in r.witness.iter().flatten() {
            let amps: Vec<String> = psi.amplitudes().iter().map(|z| format!("{z:.6}")).collect();
            writeln!(out, "witness {:.6}  [{}]", w, amps.join(", ")).unwrap();
        }
    }
    Ok(out)
}

fn cmd_oracle(cli: &Cli, a: &StateArgs, ensemble_size: usize, restarts: usize) -> Result<String> {
    let (m, s) = load(a)?;
    let opts = OracleOptions {
        ensemble_size,
        restarts,
        ..oracle_options(cli)
    };
    let r = brute_force_roof(&m, &s.to_density(), &opts)?;
    if cli.json {
        return Ok(to_json_string(&json!({
            "value": r.value,
            "ensemble": r.ensemble,
            "evaluations": r.evaluations,
            "best_restart": r.best_restart,
            "seed": cli.seed,
        })));
    }
    Ok(format!(
        "value        {}\nevaluations  {}\nbest restart {}\n",
        fmt17(r.value),
        r.evaluations,
        r.best_restart
    ))
}

/// Parses `from:to:count`.
fn parse_scan(s: &str) -> Result<(f64, f64, usize)> {
    let bad = || Error::Parse(format!("scan `{s}` is not from:to:count"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let from: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let to: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok((from, to, count))
}

fn cmd_ghzw(cli: &Cli, scan: Option<&str>, csv: bool, grid: usize) -> Result<String> {
    let origin = ghzw_axis_origin();
    let affine = format!("x = 2p - 1 + x_O with x_O = {}", fmt17(origin));
    let Some(scan) = scan else {
        let env = GhzwEnvelope::new(grid)?;
        let breakpoint = ghzw_convexity_breakpoint();
        if cli.json {
            return Ok(to_json_string(&json!({
                "axis_origin": origin,
                "normalization": env.normalization(),
                "convexity_breakpoint": breakpoint,
                "hull_departure": env.departure(),
                "x_max": env.x_max(),
                "affine_map": affine,
            })));
        }
        return Ok(format!(
            "axis origin           {}\nnormalization         {}\nconvexity breakpoint  {}\nhull departure        {}\nx max                 {}\n{affine}\n",
            fmt17(origin),
            fmt17(env.normalization()),
            fmt17(breakpoint),
            fmt17(env.departure()),
            fmt17(env.x_max()),
        ));
    };
    let (from, to, count) = parse_scan(scan)?;
    let rows = ghzw_scan(from, to, count, grid)?;
    if cli.json && !csv {
        return Ok(to_json_string(&json!({"affine_map": affine, "rows": rows})));
    }
    let mut out = String::new();
    writeln!(out, "# {affine}").unwrap();
    writeln!(out, "p,x,flat_f,tangle_envelope").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt17(r.p),
            fmt17(r.x),
            fmt17(r.flat_f),
            fmt17(r.tangle_envelope)
        )
        .unwrap();
    }
    Ok(out)
}

fn cmd_iso(
    cli: &Cli,
    a: &StateArgs,
    level: f64,
    count: usize,
    roots: &RootOptions,
) -> Result<String> {
    let (m, s) = load(a)?;
    let profile = profile_of(&m, &s.to_density(), roots)?;
    let curves = iso_curves(&profile, &m, level, count);
    if cli.json {
        return Ok(to_json_string(&curves));
    }
    let mut out = String::from("curve,x,y,z\n");
    for c in &curves {
        for p in &c.points {
            writeln!(
                out,
                "{},{},{},{}",
                c.index,
                fmt17(p.x),
                fmt17(p.y),
                fmt17(p.z)
            )
            .unwrap();
        }
    }
    Ok(out)
}
