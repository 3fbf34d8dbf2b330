use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commtower::actions::{act_r, act_s, conjugate, exp_act_r, exp_act_s};
use commtower::corpus::{random_orbit, OrbitParams};
use commtower::json::{self as cj, Element};
use commtower::kp::{check_lp, check_sign_theorem, lp_tower_of};
use commtower::loopspace::check_lemma_b;
use commtower::normalize::normalize_with_gl;
use commtower::report::Report;
use commtower::rng::SeededRng;
use commtower::tower::{commutativity_failure, coordinate_seed, flatness_failure, j_series, verify_master, Tower};
use commtower::Error;

#[derive(Parser)]
#[command(name = "commtower", version, about = "Towers of matrix potentials of the commutativity equation")]
struct Cli {
    /// Print the report as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seed tower.
    Seed(SeedArgs),
    /// Check a tower.
    Verify(VerifyArgs),
    /// Apply a group or Lie algebra element to a tower.
    Act(ActArgs),
    /// Bring a tower to canonical form.
    Normalize(NormalizeArgs),
    /// Tower of a matrix series A(z) and the sign theorem.
    Kp(KpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedKind {
    Diag,
    RandomOrbit,
}

#[derive(Args)]
struct SeedArgs {
    #[arg(long, value_enum, default_value = "diag")]
    kind: SeedKind,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Number of variables; defaults to m.
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long, default_value_t = 4)]
    deg: usize,
    #[arg(long, default_value_t = 3)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    /// Output file; stdout when absent. A provenance sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    tower: PathBuf,
    #[arg(long)]
    master: bool,
    #[arg(long)]
    commutativity: bool,
    #[arg(long)]
    flat: bool,
    #[arg(long)]
    loopspace: bool,
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct ActArgs {
    #[arg(long)]
    tower: PathBuf,
    #[arg(long)]
    element: PathBuf,
    /// Apply the time-one flow instead of the infinitesimal action.
    #[arg(long)]
    exp: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    tower: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagonalizing matrix to use instead of searching for one.
    #[arg(long)]
    gl: Option<PathBuf>,
}

#[derive(Args)]
struct KpArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Truncation degree in t; defaults to window + 1.
    #[arg(long)]
    deg: Option<usize>,
    /// Check the sign theorem for r_l z^l with this l.
    #[arg(long)]
    check_sign: Option<usize>,
    /// Constant matrix r_l; drawn from --rng when absent.
    #[arg(long)]
    r: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    /// Write the tower of A(z) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

struct Outcome {
    report: Report,
    extra: Value,
    summary: Vec<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit_tower(t: &Tower, out: Option<&Path>) -> Result<(), Failure> {
    let text = cj::to_string(&cj::tower_to_json(t));
    match out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".provenance.json");
    PathBuf::from(name)
}

fn load_tower(path: &Path) -> Result<Tower, Failure> {
    Ok(cj::parse_tower(&read(path)?)?)
}

fn seed(args: &SeedArgs) -> CmdResult {
    let vars = args.vars.unwrap_or(args.m);
    if args.m == 0 {
        return Err(Failure::Usage("--m must be positive".into()));
    }
    let (tower, provenance) = match args.kind {
        SeedKind::Diag => {
            let t = coordinate_seed(args.m, vars, args.deg, args.window)?;
            (t, json!({"kind": "diag"}))
        }
        SeedKind::RandomOrbit => {
            let params = OrbitParams::new(args.m, vars, args.deg, args.window);
            let sample = random_orbit(&mut SeededRng::new(args.rng), &params)?;
            let factors = json!({
                "r": cj::element_to_json(&Element::GPlus(sample.r.clone())),
                "s": cj::element_to_json(&Element::GMinus(sample.s.clone())),
                "p": cj::element_to_json(&Element::GL(sample.p.clone())),
                "order": "seed, then exp(r), then exp(s), then conjugation by p",
            });
            (sample.tower, json!({"kind": "random-orbit", "rng": args.rng, "factors": factors}))
        }
    };
    emit_tower(&tower, args.out.as_deref())?;
    if let Some(out) = &args.out {
        let mut p = provenance;
        p["params"] = json!({"m": args.m, "vars": vars, "deg": args.deg, "window": args.window});
        write(&sidecar(out), &cj::to_string(&p))?;
    }
    let mut report = Report::new();
    report.pass("seed written");
    Ok(Outcome {
        report,
        extra: json!({}),
        summary: vec![],
    })
}

fn verify(args: &VerifyArgs) -> CmdResult {
    let t = load_tower(&args.tower)?;
    let none = !(args.master || args.commutativity || args.flat || args.loopspace);
    let all = args.all || none;
    let mut report = Report::new();
    let m00 = t.get(0, 0);
    if all || args.master {
        report.extend(verify_master(&t));
    }
    if all || args.commutativity {
        report.record("commutativity", commutativity_failure(m00));
    }
    if all || args.flat {
        report.record("flat J", flatness_failure(&j_series(&t), m00));
    }
    if all || args.loopspace {
        report.extend(check_lemma_b(&t));
    }
    Ok(Outcome {
        report,
        extra: json!({}),
        summary: vec![],
    })
}

fn act(args: &ActArgs) -> CmdResult {
    let t = load_tower(&args.tower)?;
    let e = cj::parse_element(&read(&args.element)?, t.dim())?;
    let out = match (&e, args.exp) {
        (Element::GPlus(r), false) => act_r(&t, r)?,
        (Element::GPlus(r), true) => exp_act_r(&t, r)?,
        (Element::GMinus(s), false) => act_s(&t, s)?,
        (Element::GMinus(s), true) => exp_act_s(&t, s)?,
        (Element::GL(p), _) => conjugate(&t, p)?,
    };
    emit_tower(&out, args.out.as_deref())?;
    let mut report = Report::new();
    if args.exp || matches!(e, Element::GL(_)) {
        report.extend(verify_master(&out));
    } else {
        report.extend(verify_master(&t.restrict(out.window())?.with_tangent(&out)));
    }
    Ok(Outcome {
        report,
        extra: json!({"window": out.window()}),
        summary: vec![],
    })
}

fn normalize(args: &NormalizeArgs) -> CmdResult {
    let t = load_tower(&args.tower)?;
    let gl = match &args.gl {
        Some(p) => match cj::parse_element(&read(p)?, t.dim())? {
            Element::GL(g) => Some(g),
            _ => return Err(Failure::Usage("--gl expects a gl element".into())),
        },
        None => None,
    };
    let result = normalize_with_gl(&t, gl.as_ref())?;
    let recovered = result.recovered_canonical_form();
    if let Some(out) = &args.out {
        write(out, &cj::to_string(&cj::normalization_to_json(&result)))?;
    }
    let mut report = Report::new();
    for step in &result.log {
        for c in &step.report.checks {
            let mut c = c.clone();
            c.name = format!("{}: {}", step.name, c.name);
            report.checks.push(c);
        }
    }
    Ok(Outcome {
        report,
        extra: json!({"recovered_canonical_form": recovered}),
        summary: vec![format!("recovered canonical form: {recovered}")],
    })
}

fn kp(args: &KpArgs) -> CmdResult {
    let a = cj::parse_a(&read(&args.a)?)?;
    let deg = args.deg.unwrap_or(args.window + 1);
    let mut report = check_lp(&a, deg, args.window)?;
    if let Some(out) = &args.out {
        emit_tower(&lp_tower_of(&a, deg, args.window)?, Some(out))?;
    }
    if let Some(l) = args.check_sign {
        let r = match &args.r {
            Some(p) => cj::const_matrix_from_json(&cj::from_str(&read(p)?)?)?,
            None => SeededRng::new(args.rng).const_matrix(a.dim(), 3, 2),
        };
        if r.dim() != a.dim() {
            return Err(Failure::Usage("r_l and A(z) differ in size".into()));
        }
        report.extend(check_sign_theorem(&a, l, &r, deg, args.window)?);
    }
    Ok(Outcome {
        report,
        extra: json!({}),
        summary: vec![],
    })
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Seed(a) => seed(a),
        Command::Verify(a) => verify(a),
        Command::Act(a) => act(a),
        Command::Normalize(a) => normalize(a),
        Command::Kp(a) => kp(a),
    };
    let quiet_stdout = match &cli.command {
        Command::Seed(a) => a.out.is_none(),
        Command::Act(a) => a.out.is_none(),
        _ => false,
    };
    match result {
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(outcome) => {
            let passed = outcome.report.passed();
            let elapsed = start.elapsed().as_secs_f64();
            if cli.json && !quiet_stdout {
                let mut v = json!({
                    "command": command_echo(),
                    "passed": passed,
                    "checks": outcome.report.checks,
                    "elapsed_seconds": elapsed,
                });
                if let (Value::Object(dst), Value::Object(src)) = (&mut v, outcome.extra) {
                    dst.extend(src);
                }
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                let mut text = String::new();
                for line in &outcome.summary {
                    text.push_str(line);
                    text.push('\n');
                }
                text.push_str(&outcome.report.to_string());
                if quiet_stdout {
                    eprint!("{text}");
                } else {
                    print!("{text}");
                }
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
