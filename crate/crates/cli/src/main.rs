//! `lctk`: derive and analyze transfer functions from the command line.
//!
//! Exit status is 0 on success, 1 when the computation itself fails or a
//! check does not pass, and 2 when the command line is unusable (including
//! parameters that need a value and have none).

mod format;

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use lctk_core::algebra::json::tf_to_json;
use lctk_core::algebra::{parse_param_poly, parse_tf, rational, AlgebraError, Binding};
use lctk_core::circuits::{
    classify_active_compensator, netlist_tf, parse_netlist, realize_compensator, realize_controller, CircuitError,
    CompensatorKind, ComponentValues, ControllerKind, Netlist, Realization,
};
use lctk_core::exec::Execution;
use lctk_core::laplace::{laplace_numeric, laplace_symbolic, InitPolicy, LaplaceError, TimeExpr};
use lctk_core::lti::{oracle_check_tf, transfer_function, LtiError, OdeSystem, OracleConfig};
use lctk_core::margins::{bode_sweep, margin_report, MarginError, MarginReport, SweepRange};
use lctk_core::ufss::{ufss_pitch_tf, UfssParams};
use lctk_core::TransferFunction;

use format::{complex6, sig6};

#[derive(Parser)]
#[command(
    name = "lctk",
    version,
    about = "Transfer-function derivation and frequency-domain analysis"
)]
struct Cli {
    /// Output format; each command has its own default (text unless noted).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Parameter value, e.g. `--bind K1=0.5`. Repeatable.
    #[arg(long = "bind", global = true, value_name = "NAME=VALUE")]
    bind: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Laplace transform of a time signal, e.g. `(modcos 2 (exp -1))`.
    Laplace {
        expr: String,
        /// Also evaluate the transform integral by quadrature at this `s`,
        /// e.g. `1` or `1+2j`.
        #[arg(long, value_name = "S", allow_hyphen_values = true)]
        check: Option<String>,
        /// Absolute quadrature tolerance for `--check`.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Use the signal's own initial values in derivative rules instead
        /// of zero.
        #[arg(long)]
        signal_init: bool,
    },
    /// Build a transfer function.
    #[command(subcommand)]
    Tf(TfCommand),
    /// Frequency response over a log-spaced sweep (default format: csv).
    Bode {
        tf: String,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Gain and phase margins of the loop `G H` (default format: json).
    Margins {
        g: String,
        /// Feedback path; defaults to 1.
        #[arg(long)]
        h: Option<String>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Check a transfer function against a simulation of an ODE
    /// (default format: json). Exits 1 when any sample disagrees.
    Verify {
        /// `{"alpha": [...], "beta": [...]}` inline, a file path, or `-`.
        ode: String,
        #[arg(long)]
        tf: String,
        /// Largest relative error accepted.
        #[arg(long, default_value_t = 1e-2)]
        threshold: f64,
        /// Sample points; defaults to 1, 2 and 1+j.
        #[arg(long = "s", value_name = "S", allow_hyphen_values = true)]
        samples: Vec<String>,
        /// Simulation step in seconds.
        #[arg(long, default_value_t = 2e-3)]
        dt: f64,
    },
    /// Built-in case studies.
    #[command(subcommand)]
    Case(CaseCommand),
    /// Circuit realizations as netlists.
    #[command(subcommand)]
    Realize(RealizeCommand),
}

#[derive(Subcommand)]
enum TfCommand {
    /// From ODE coefficients `{"alpha": [...], "beta": [...]}` (inline, a
    /// file path, or `-`).
    FromOde { ode: String },
    /// From a netlist file (or `-`) by nodal analysis.
    FromNetlist {
        file: String,
        /// Print the nodal equations and elimination steps.
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Subcommand)]
enum CaseCommand {
    /// Submersible pitch control; gains are numbers or parameter names.
    Ufss {
        #[arg(long, allow_hyphen_values = true)]
        k1: String,
        #[arg(long, allow_hyphen_values = true)]
        k2: String,
        /// Also report margins of the open loop and of the unity-feedback
        /// closed loop.
        #[arg(long)]
        margins: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Subcommand)]
enum RealizeCommand {
    /// P, I, D, PI, PD or PID; values as `R1=1000 C2=1e-6`, others stay
    /// symbolic.
    Controller { kind: String, values: Vec<String> },
    /// lag, lead or laglead.
    Compensator {
        kind: String,
        values: Vec<String>,
        #[arg(long, default_value = "active")]
        realization: String,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1e-3)]
    wmin: f64,
    #[arg(long, default_value_t = 1e3)]
    wmax: f64,
    /// Points per decade [default: 200, or LCTK_SWEEP_PPD].
    #[arg(long, env = "LCTK_SWEEP_PPD")]
    ppd: Option<usize>,
    /// Evaluate on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl SweepArgs {
    fn range(&self) -> Result<SweepRange, Failure> {
        Ok(SweepRange::new(
            self.wmin,
            self.wmax,
            self.ppd.unwrap_or(SweepRange::default().ppd),
        )?)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

macro_rules! domain_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Domain(e.to_string())
            }
        }
    )*};
}

domain_errors!(LaplaceError, LtiError, CircuitError, MarginError);

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::UnboundParameter(name) => unbound(&[name]),
            e => Failure::Domain(e.to_string()),
        }
    }
}

fn unbound(names: &[String]) -> Failure {
    Failure::Usage(format!(
        "unbound parameter(s): {}; pass --bind NAME=VALUE for each",
        names.join(", ")
    ))
}

/// Binding from `--bind` flags; values are read as exact decimals.
fn binding(pairs: &[String]) -> Result<Binding, Failure> {
    let mut b = Binding::exact();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--bind expects NAME=VALUE, got `{pair}`")))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Failure::Usage(format!("bad parameter name `{name}`")));
        }
        let v =
            rational::parse(value.trim()).map_err(|_| Failure::Usage(format!("bad value for {name}: `{value}`")))?;
        b.set_exact(name, v);
    }
    Ok(b)
}

fn require_bound(tf: &TransferFunction, b: &Binding) -> Result<(), Failure> {
    let missing = b.missing(&tf.variables());
    if missing.is_empty() {
        Ok(())
    } else {
        Err(unbound(&missing))
    }
}

fn parse_complex(s: &str) -> Result<Complex64, Failure> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .parse::<Complex64>()
        .map_err(|_| Failure::Usage(format!("`{s}` is not a complex number (try 1, -2.5 or 1+2j)")))
}

/// Inline text, a path to a file, or `-` for standard input.
fn read_source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || !Path::new(arg).exists() {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("reading {arg}: {e}")))
}

fn read_file(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        return read_source(arg);
    }
    fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("reading {arg}: {e}")))
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn tf_value(tf: &TransferFunction) -> Value {
    json!({"text": tf.to_string(), "tf": tf_to_json(tf)})
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn pass(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let b = binding(&cli.bind)?;
    let fmt = cli.format;
    match cli.command {
        Command::Laplace {
            expr,
            check,
            tol,
            signal_init,
        } => laplace(&expr, check.as_deref(), tol, signal_init, fmt.unwrap_or(Format::Text)),
        Command::Tf(TfCommand::FromOde { ode }) => {
            let sys = OdeSystem::from_json_str(&read_source(&ode)?)?;
            let tf = transfer_function(&sys);
            Ok(Output::pass(match fmt.unwrap_or(Format::Text) {
                Format::Json => pretty(&tf_value(&tf)),
                _ => tf.to_string(),
            }))
        }
        Command::Tf(TfCommand::FromNetlist { file, trace }) => {
            let net = parse_netlist(&read_file(&file)?)?;
            let (tf, tr) = netlist_tf(&net)?;
            Ok(Output::pass(match fmt.unwrap_or(Format::Text) {
                Format::Json => {
                    let mut v = tf_value(&tf);
                    if trace {
                        v["trace"] = json!(tr.to_string().lines().collect::<Vec<_>>());
                    }
                    pretty(&v)
                }
                _ if trace => format!("{tf}\n\n{}", tr.to_string().trim_end()),
                _ => tf.to_string(),
            }))
        }
        Command::Bode { tf, sweep } => {
            let tf = parse_tf(&tf)?;
            require_bound(&tf, &b)?;
            let s = bode_sweep(&tf, &b, &sweep.range()?, sweep.exec())?;
            Ok(Output::pass(match fmt.unwrap_or(Format::Csv) {
                Format::Csv => s.to_csv().trim_end().to_string(),
                Format::Json => pretty(&json!({
                    "points": s.points.iter().map(|p| json!({
                        "w": p.w, "re": p.value.re, "im": p.value.im,
                        "mag_db": json_f64(p.mag_db), "phase_deg": p.phase_deg,
                    })).collect::<Vec<_>>(),
                    "dropped": s.dropped,
                })),
                Format::Text => {
                    let mut out = String::from("w mag_db phase_deg");
                    for p in &s.points {
                        out.push_str(&format!("\n{} {} {}", sig6(p.w), sig6(p.mag_db), sig6(p.phase_deg)));
                    }
                    out
                }
            }))
        }
        Command::Margins { g, h, sweep } => {
            let g = parse_tf(&g)?;
            let h = match h {
                Some(h) => parse_tf(&h)?,
                None => TransferFunction::one(),
            };
            require_bound(&g, &b)?;
            require_bound(&h, &b)?;
            let r = margin_report(&g, &h, &b, &sweep.range()?, sweep.exec())?;
            Ok(Output::pass(match fmt.unwrap_or(Format::Json) {
                Format::Text => margins_text(&r),
                _ => pretty(&serde_json::to_value(&r).expect("report serializes")),
            }))
        }
        Command::Verify {
            ode,
            tf,
            threshold,
            samples,
            dt,
        } => {
            let sys = OdeSystem::from_json_str(&read_source(&ode)?)?;
            let tf = parse_tf(&tf)?;
            require_bound(&tf, &b)?;
            require_bound(&transfer_function(&sys), &b)?;
            let points = if samples.is_empty() {
                vec![
                    Complex64::new(1.0, 0.0),
                    Complex64::new(2.0, 0.0),
                    Complex64::new(1.0, 1.0),
                ]
            } else {
                samples.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?
            };
            let config = OracleConfig {
                dt,
                tolerance: threshold,
                ..OracleConfig::default()
            };
            let r = oracle_check_tf(&sys, &tf, &b, &points, &config)?;
            let text = match fmt.unwrap_or(Format::Json) {
                Format::Text => {
                    let mut out = String::new();
                    for p in &r.samples {
                        out.push_str(&format!(
                            "s = {}: expected {}, measured {}, relative error {}\n",
                            complex6(Complex64::new(p.s[0], p.s[1])),
                            complex6(Complex64::new(p.expected[0], p.expected[1])),
                            complex6(Complex64::new(p.measured[0], p.measured[1])),
                            sig6(p.rel_error)
                        ));
                    }
                    out.push_str(if r.passed { "PASS" } else { "FAIL" });
                    out
                }
                _ => pretty(&serde_json::to_value(&r).expect("report serializes")),
            };
            Ok(Output { text, ok: r.passed })
        }
        Command::Case(CaseCommand::Ufss { k1, k2, margins, sweep }) => {
            let p = UfssParams {
                k1: parse_param_poly(&k1)?,
                k2: parse_param_poly(&k2)?,
            };
            let tf = ufss_pitch_tf(&p);
            let fmt = fmt.unwrap_or(Format::Text);
            if !margins {
                return Ok(Output::pass(match fmt {
                    Format::Json => pretty(&tf_value(&tf)),
                    _ => tf.to_string(),
                }));
            }
            require_bound(&tf, &b)?;
            let one = TransferFunction::one();
            let closed = tf.feedback(&one)?;
            let range = sweep.range()?;
            let open_r = margin_report(&tf, &one, &b, &range, sweep.exec())?;
            let closed_r = margin_report(&closed, &one, &b, &range, sweep.exec())?;
            Ok(Output::pass(match fmt {
                Format::Json => pretty(&json!({
                    "tf": tf_value(&tf),
                    "open_loop": open_r,
                    "closed_loop": {"tf": tf_value(&closed), "margins": closed_r},
                })),
                _ => format!(
                    "{tf}\n\nopen loop:\n{}\n\nclosed loop {closed}:\n{}",
                    margins_text(&open_r),
                    margins_text(&closed_r)
                ),
            }))
        }
        Command::Realize(cmd) => realize(cmd, fmt.unwrap_or(Format::Text)),
    }
}

fn laplace(expr: &str, check: Option<&str>, tol: f64, signal_init: bool, fmt: Format) -> Result<Output, Failure> {
    let f: TimeExpr = expr.parse()?;
    let policy = if signal_init {
        InitPolicy::from_signal(&f)
    } else {
        InitPolicy::Zero
    };
    let r = laplace_symbolic(&f, &policy)?;
    let mut ok = true;
    let mut checked = None;
    if let Some(s) = check {
        let s = parse_complex(s)?;
        let symbolic = r.tf.eval(&Binding::default(), s)?;
        let numeric = laplace_numeric(&f, s, tol)?;
        let diff = (symbolic - numeric).norm();
        ok = diff <= 1e-4 * (1.0 + symbolic.norm());
        checked = Some((s, symbolic, numeric, diff));
    }
    let text = match fmt {
        Format::Json => {
            let mut v = tf_value(&r.tf);
            v["roc"] = json_f64(r.roc);
            if let Some((s, sym, num, diff)) = checked {
                v["check"] = json!({
                    "s": [s.re, s.im],
                    "symbolic": [sym.re, sym.im],
                    "numeric": [num.re, num.im],
                    "abs_diff": diff,
                    "passed": ok,
                });
            }
            pretty(&v)
        }
        _ => {
            let mut out = format!("{}  ROC: Re s > {}", r.tf, sig6(r.roc));
            if let Some((s, sym, num, diff)) = checked {
                out.push_str(&format!(
                    "\nat s = {}: symbolic {}, quadrature {}, |diff| {}",
                    complex6(s),
                    complex6(sym),
                    complex6(num),
                    sig6(diff)
                ));
            }
            out
        }
    };
    Ok(Output { text, ok })
}

fn margins_text(r: &MarginReport) -> String {
    let opt = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| "none".into());
    let list = |v: &[f64]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter().map(|w| sig6(*w)).collect::<Vec<_>>().join(", ")
        }
    };
    format!(
        "gain crossovers (rad/s): {}\nphase crossovers (rad/s): {}\nphase margin (deg): {} at {}\ngain margin (dB, 20 log10 |GH| at w_pc): {} at {}\ngain margin (dB, conventional): {}\nclosed loop: {}",
        list(&r.gain_crossovers),
        list(&r.phase_crossovers),
        opt(r.pm_deg),
        opt(r.wgc),
        opt(r.gm_db_signed),
        opt(r.wpc),
        opt(r.gm_db_conventional),
        r.stable_closed_loop.map(|v| v.to_string()).unwrap_or_else(|| "n/a (delayed loop)".into()),
    )
}

fn component_values(pairs: &[String]) -> Result<ComponentValues, Failure> {
    let mut v = ComponentValues::default();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected NAME=VALUE, got `{pair}`")))?;
        let value = parse_param_poly(value)?;
        v.set(name, value).map_err(Failure::Usage)?;
    }
    Ok(v)
}

fn realize(cmd: RealizeCommand, fmt: Format) -> Result<Output, Failure> {
    let (net, note): (Netlist, Option<String>) = match cmd {
        RealizeCommand::Controller { kind, values } => {
            let kind: ControllerKind = kind.parse().map_err(Failure::Usage)?;
            (realize_controller(kind, &component_values(&values)?)?, None)
        }
        RealizeCommand::Compensator {
            kind,
            values,
            realization,
        } => {
            let kind: CompensatorKind = kind.parse().map_err(Failure::Usage)?;
            let realization: Realization = realization.parse().map_err(Failure::Usage)?;
            let v = component_values(&values)?;
            let net = realize_compensator(kind, realization, &v)?;
            let note = match (
                realization,
                v.r1.as_constant(),
                v.c1.as_constant(),
                v.r2.as_constant(),
                v.c2.as_constant(),
            ) {
                (Realization::Active, Some(r1), Some(c1), Some(r2), Some(c2)) => {
                    Some(classify_active_compensator(&r1, &c1, &r2, &c2)?.to_string())
                }
                _ => None,
            };
            (net, note)
        }
    };
    let text = match fmt {
        Format::Json => {
            let (tf, _) = netlist_tf(&net)?;
            let mut v = json!({"netlist": net.to_string(), "tf": tf_value(&tf)});
            if let Some(class) = &note {
                v["class"] = json!(class);
            }
            pretty(&v)
        }
        _ => {
            let mut out = String::new();
            if let Some(class) = &note {
                out.push_str(&format!("# acts as a {class} compensator\n"));
            }
            out.push_str(net.to_string().trim_end());
            out
        }
    };
    Ok(Output::pass(text))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(io::stdout().lock(), "{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `lctk --help` for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
