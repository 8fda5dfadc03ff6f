use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use wirenoise::langevin::{equipartition_covariance, oracle_force, simulate_correlator, SimConfig};
use wirenoise::{
    to_reduced, to_reduced_with_reference, Error, PhysicalParams, QuadratureConfig, ReducedParams,
    ResistanceModel, UnitScale, BOLTZMANN, HBAR,
};
use wirenoise_cli::eval::{evaluate, EvalOptions, Quantity};
use wirenoise_cli::sweep::{Scale, SweepSpec, SweepVariable};
use wirenoise_repro::criteria;
use wirenoise_repro::fig1::{self, Fig1Config};

#[derive(Parser)]
#[command(
    name = "wirenoise",
    version,
    about = "Thermal interaction of Johnson-noise wires"
)]
struct Cli {
    /// Worker threads for sweeps and oracle replicas (default: available parallelism).
    #[arg(long, global = true, env = "WIRENOISE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate quantities at one parameter point and print a JSON record.
    Point(PointArgs),
    /// Free energy and entropies along omega_R = c t^p as CSV.
    Fig1(Fig1Args),
    /// Sweep one parameter and write CSV rows in grid order.
    Sweep(SweepArgs),
    /// Simulate the classical Langevin circuit and print a JSON estimate.
    Oracle(OracleArgs),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct ReducedArgs {
    /// Coupling M/L.
    #[arg(long)]
    m: Option<f64>,
    /// Resistance frequency R/L in reference units.
    #[arg(long = "omega-r")]
    omega_r: Option<f64>,
    /// LC frequency in reference units; omit for purely inductive wires.
    #[arg(long = "omega-c")]
    omega_c: Option<f64>,
    /// Temperature k_B T / (hbar omega_ref).
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args, Clone)]
struct EvalArgs {
    /// Quantities to compute (comma separated).
    #[arg(long = "quantity", value_delimiter = ',', default_value = "H")]
    quantities: Vec<Quantity>,
    /// Use omega_r(t) = coefficient * t^exponent when differentiating in t.
    #[arg(long = "rm-coefficient")]
    rm_coefficient: Option<f64>,
    #[arg(long = "rm-exponent", default_value_t = 2.0)]
    rm_exponent: f64,
    /// d(m^2)/da along the displacement, needed for the force.
    #[arg(long = "dm2-da")]
    dm2_da: Option<f64>,
    #[arg(long = "rel-tol", default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long = "abs-tol", default_value_t = 1e-14)]
    abs_tol: f64,
}

impl EvalArgs {
    fn options(&self) -> EvalOptions {
        EvalOptions {
            resistance_model: match self.rm_coefficient {
                Some(coefficient) => ResistanceModel::PowerLaw {
                    coefficient,
                    exponent: self.rm_exponent,
                },
                None => ResistanceModel::Fixed,
            },
            quadrature: QuadratureConfig {
                rel_tol: self.rel_tol,
                abs_tol: self.abs_tol,
                ..Default::default()
            },
            dm2_da: self.dm2_da,
        }
    }
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    reduced: ReducedArgs,
    #[command(flatten)]
    eval: EvalArgs,
    /// Read SI inputs (--inductance, --mutual, --resistance, --capacitance, --temperature).
    #[arg(long)]
    si: bool,
    #[arg(long)]
    inductance: Option<f64>,
    #[arg(long)]
    mutual: Option<f64>,
    #[arg(long)]
    resistance: Option<f64>,
    #[arg(long)]
    capacitance: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
}

#[derive(Args)]
struct Fig1Args {
    #[arg(long, default_value_t = 0.8)]
    m: f64,
    /// omega_R(t) = coefficient * t^exponent, in units of omega_C.
    #[arg(long, default_value_t = 5.0)]
    coefficient: f64,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    #[arg(long = "t-min", default_value_t = 0.005)]
    t_min: f64,
    #[arg(long = "t-max", default_value_t = 2.0)]
    t_max: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    /// Append F_int_err, S_int_err, S_total_err columns.
    #[arg(long = "with-errors")]
    with_errors: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    variable: SweepVariable,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long)]
    points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    scale: Scale,
    #[command(flatten)]
    reduced: ReducedArgs,
    #[command(flatten)]
    eval: EvalArgs,
    /// Skip rows before this index (resume an interrupted sweep).
    #[arg(long = "start-row", default_value_t = 0)]
    start_row: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Self-inductance (H).
    #[arg(long = "l")]
    inductance: f64,
    /// Mutual inductance (H).
    #[arg(long = "m", alias = "m-henry", allow_negative_numbers = true)]
    mutual: f64,
    /// Resistance (ohm).
    #[arg(long = "r")]
    resistance: f64,
    /// Thermal energy k_B T (J).
    #[arg(long)]
    kt: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Recorded steps per replica (accepts 2e6).
    #[arg(long)]
    steps: Option<f64>,
    /// Time step (default 0.002 (L - |M|)/R).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "burn-in")]
    burn_in: Option<f64>,
    #[arg(long, default_value_t = 4)]
    replicas: u32,
    /// grad M (H/m) as x,y,z; adds the force <i1 i2> grad M.
    #[arg(long = "grad-m", value_delimiter = ',', allow_negative_numbers = true)]
    grad_m: Option<Vec<f64>>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run only criteria whose key or title contains this text.
    #[arg(long)]
    filter: Option<String>,
    /// Divide every tolerance by this factor.
    #[arg(long, default_value_t = 1.0)]
    tighten: f64,
}

/// Exit status for a library error: bad input is a usage error, the rest numerical.
fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Domain { .. }
        | Error::CouplingBound { .. }
        | Error::NoReferenceFrequency
        | Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn reduced_from(a: &ReducedArgs) -> Result<ReducedParams, String> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("--{name} is required"));
    ReducedParams::new(
        need(a.m, "m")?,
        need(a.omega_r, "omega-r")?,
        a.omega_c,
        need(a.t, "t")?,
    )
    .map_err(|e| e.to_string())
}

fn write_stdout(s: &str) -> ExitCode {
    let mut out = io::stdout().lock();
    if out
        .write_all(s.as_bytes())
        .and_then(|_| out.flush())
        .is_err()
    {
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn cmd_point(a: &PointArgs) -> ExitCode {
    let (p, scale): (ReducedParams, Option<UnitScale>) = if a.si {
        let need =
            |v: Option<f64>, name: &str| v.ok_or_else(|| format!("--{name} is required with --si"));
        let phys = match (|| -> Result<PhysicalParams, String> {
            Ok(PhysicalParams {
                inductance: need(a.inductance, "inductance")?,
                mutual: need(a.mutual, "mutual")?,
                resistance: need(a.resistance, "resistance")?,
                capacitance: a.capacitance,
                temperature: need(a.temperature, "temperature")?,
            })
        })() {
            Ok(p) => p,
            Err(msg) => return usage(&msg),
        };
        let reduced = match to_reduced(&phys) {
            Err(Error::NoReferenceFrequency) if phys.temperature > 0.0 => {
                to_reduced_with_reference(&phys, BOLTZMANN * phys.temperature / HBAR)
            }
            r => r,
        };
        match reduced {
            Ok((p, s)) => (p, Some(s)),
            Err(e) => return fail(&e),
        }
    } else {
        match reduced_from(&a.reduced) {
            Ok(p) => (p, None),
            Err(msg) => return usage(&msg),
        }
    };
    let values = match evaluate(&p, &a.eval.quantities, &a.eval.options()) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let mut results = Map::new();
    for (q, r) in a.eval.quantities.iter().zip(&values) {
        let mut entry = json!({ "value": r.value, "error": r.abs_error_estimate });
        if let Some(s) = scale {
            // energies in J, entropies in J/K, force in N per unit of the supplied dm2_da
            let si = match q {
                Quantity::H => None,
                Quantity::FInt | Quantity::FSelf | Quantity::Force => Some(HBAR * s.omega_ref),
                Quantity::SInt | Quantity::STotal => Some(BOLTZMANN),
            };
            if let Some(f) = si {
                entry["si_value"] = json!(r.value * f);
                entry["si_error"] = json!(r.abs_error_estimate * f);
            }
        }
        results.insert(q.column().to_string(), entry);
    }
    let mut record = json!({
        "inputs": { "m": p.m(), "omega_r": p.omega_r(), "omega_c": p.omega_c(), "t": p.t() },
        "results": Value::Object(results),
    });
    if let Some(s) = scale {
        record["unit_scale"] = json!(s);
    }
    write_stdout(&format!("{record}\n"))
}

fn cmd_fig1(a: &Fig1Args) -> ExitCode {
    let cfg = Fig1Config {
        m: a.m,
        coefficient: a.coefficient,
        exponent: a.exponent,
        t_min: a.t_min,
        t_max: a.t_max,
        points: a.points,
        ..Default::default()
    };
    if let Err(e) = cfg.validate() {
        return fail(&e);
    }
    let rows = match cfg.rows() {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut s = String::new();
    s.push_str(if a.with_errors {
        fig1::HEADER_WITH_ERRORS
    } else {
        fig1::HEADER
    });
    s.push('\n');
    for r in &rows {
        s.push_str(&fig1::csv_line(r, a.with_errors));
        s.push('\n');
    }
    write_stdout(&s)
}

fn cmd_sweep(a: &SweepArgs) -> ExitCode {
    // the swept parameter needs no fixed value
    let mut fixed = a.reduced.clone();
    let probe = match a.variable {
        SweepVariable::M => &mut fixed.m,
        SweepVariable::OmegaR => &mut fixed.omega_r,
        SweepVariable::T => &mut fixed.t,
    };
    probe.get_or_insert(match a.variable {
        SweepVariable::M => 0.0,
        _ => a.from.max(0.0),
    });
    let base = match reduced_from(&fixed) {
        Ok(p) => p,
        Err(msg) => return usage(&msg),
    };
    let spec = SweepSpec {
        variable: a.variable,
        from: a.from,
        to: a.to,
        points: a.points,
        scale: a.scale,
        base,
        quantities: a.eval.quantities.clone(),
        options: a.eval.options(),
    };
    let rows = match spec.run(a.start_row) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header: Vec<String> = spec.header().split(',').map(str::to_string).collect();
    w.write_record(&header).expect("in-memory write");
    for r in &rows {
        w.write_record(r.csv_fields(&spec.quantities))
            .expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    let code = write_stdout(&String::from_utf8(bytes).expect("utf-8 csv"));
    let failed = rows.iter().filter(|r| r.values.is_err()).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} points failed (see the error column)",
            rows.len()
        );
    }
    if !rows.is_empty() && failed == rows.len() {
        return ExitCode::from(3);
    }
    code
}

fn cmd_oracle(a: &OracleArgs) -> ExitCode {
    let mut cfg = SimConfig::with_defaults(
        a.inductance,
        a.mutual,
        a.resistance,
        a.kt,
        1e5,
        a.replicas,
        a.seed,
    );
    if let Some(dt) = a.dt {
        let tau = a.inductance / a.resistance;
        cfg.dt = dt;
        cfg.burn_in = (20.0 * tau / dt).ceil() as u64;
        cfg.n_steps = (1e5 * tau / a.replicas.max(1) as f64 / dt).ceil() as u64;
    }
    if let Some(n) = a.steps {
        if !(n.is_finite() && n >= 1.0) {
            return usage("--steps must be a positive number");
        }
        cfg.n_steps = n as u64;
    }
    if let Some(b) = a.burn_in {
        cfg.burn_in = b as u64;
    }
    if a.grad_m.as_ref().is_some_and(|g| g.len() != 3) {
        return usage("--grad-m takes three comma-separated components");
    }
    let exact = equipartition_covariance(a.inductance, a.mutual, a.kt).ok();
    let mut record = match &a.grad_m {
        Some(g) => match oracle_force(&cfg, [g[0], g[1], g[2]]) {
            Ok(f) => json!({ "estimate": f.estimate, "force": f.force, "force_stderr": f.stderr }),
            Err(e) => return fail(&e),
        },
        None => match simulate_correlator(&cfg) {
            Ok(est) => json!({ "estimate": est }),
            Err(e) => return fail(&e),
        },
    };
    record["config"] = json!(cfg);
    record["seed"] = json!(cfg.seed);
    record["equipartition"] = json!(exact);
    write_stdout(&format!("{record}\n"))
}

fn cmd_validate(a: &ValidateArgs) -> ExitCode {
    if !(a.tighten.is_finite() && a.tighten > 0.0) {
        return usage("--tighten must be > 0");
    }
    let mut reports = Vec::new();
    for c in criteria::all() {
        if a.filter.as_deref().is_none_or(|f| c.matches(f)) {
            let r = c.run(a.tighten);
            eprintln!("{}", r.summary_line());
            reports.push(r);
        }
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let report = json!({
        "passed": all_passed,
        "tighten": a.tighten,
        "criteria": reports,
    });
    let code = write_stdout(&format!(
        "{}\n",
        serde_json::to_string_pretty(&report).expect("report")
    ));
    if code != ExitCode::SUCCESS {
        return code;
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            return usage("--workers must be >= 1");
        }
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: worker pool already initialised");
        }
    }
    match &cli.command {
        Command::Point(a) => cmd_point(a),
        Command::Fig1(a) => cmd_fig1(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Validate(a) => cmd_validate(a),
    }
}
