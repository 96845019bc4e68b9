use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use wittpolar::cowitt::{
    cw_F, cw_V, cw_add_with, cw_multiple, cw_validate, CoWittElement, CoWittJson, StabilizeOptions,
};
use wittpolar::etale::decompose;
use wittpolar::exact::Rational;
use wittpolar::fgl;
use wittpolar::ppolar::{AlgebraJson, PPolarAlgebra, PPolarJson};
use wittpolar::verify::{self, VerifyOptions, FORMAT};
use wittpolar::wittmod::WittVector;
use wittpolar::wittuniv::{cost_warning, universal_polys, CacheFile, WittKind};

#[derive(Parser)]
#[command(name = "wittpolar", version, about = "Witt vectors of p-polar rings")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Universal Witt polynomials of one operation.
    WittPoly {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kind: String,
    },
    /// Evaluate a Witt vector expression over a p-polar algebra.
    WittEval { input: PathBuf },
    /// Co-Witt operations.
    Cw { input: PathBuf },
    /// Decompose a p-polar algebra over a splitting field.
    Split { input: PathBuf },
    /// p-typical formal group law from logarithm coefficients.
    Fgl {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        precision: usize,
        /// Comma-separated rationals l_0, l_1, ... (coefficients of x^{p^i}).
        #[arg(long)]
        log_coeffs: String,
    },
    /// Polarize a commutative algebra.
    Polarize { input: PathBuf },
    /// Run the invariant suites.
    Verify {
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

enum Failure {
    Usage(String),
    Io(String),
    Parse(String),
    Core(wittpolar::Error),
    Unverified(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_internal() => 2,
            Failure::Unverified(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> String {
        match self {
            Failure::Usage(_) => "usage".into(),
            Failure::Io(_) => "io".into(),
            Failure::Parse(_) => "parse".into(),
            Failure::Unverified(_) => "verification".into(),
            Failure::Core(e) => {
                let d = format!("{e:?}");
                d.split(|c: char| !c.is_alphanumeric())
                    .next()
                    .unwrap_or("")
                    .to_string()
            }
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Parse(m) | Failure::Unverified(m) => {
                m.clone()
            }
            Failure::Core(e) => e.to_string(),
        }
    }
}

impl From<wittpolar::Error> for Failure {
    fn from(e: wittpolar::Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// A p-polar algebra given directly, or a commutative algebra to polarize.
#[derive(Deserialize)]
#[serde(untagged)]
enum AlgebraInput {
    Polar(PPolarJson),
    Comm(AlgebraJson),
}

impl AlgebraInput {
    fn build(&self) -> Outcome<PPolarAlgebra> {
        Ok(match self {
            AlgebraInput::Polar(j) => PPolarAlgebra::from_json(j)?,
            AlgebraInput::Comm(j) => PPolarAlgebra::polarize(&j.build()?)?,
        })
    }
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum Expr {
    Lit {
        coords: Vec<Vec<Vec<u32>>>,
    },
    Add {
        args: Vec<Expr>,
    },
    Sub {
        args: [Box<Expr>; 2],
    },
    Neg {
        arg: Box<Expr>,
    },
    Mul {
        args: Vec<Expr>,
    },
    Multiple {
        k: i64,
        arg: Box<Expr>,
    },
    /// Scalar action of a Witt vector over the base field.
    Scalar {
        scalar: Vec<Vec<u32>>,
        arg: Box<Expr>,
    },
    Frob {
        arg: Box<Expr>,
    },
    Ver {
        arg: Box<Expr>,
    },
    Truncate {
        n: usize,
        arg: Box<Expr>,
    },
}

#[derive(Deserialize)]
struct EvalInput {
    algebra: AlgebraInput,
    expr: Expr,
}

fn eval(a: &Arc<PPolarAlgebra>, e: &Expr) -> Outcome<WittVector> {
    let fold = |args: &[Expr]| args.iter().map(|x| eval(a, x)).collect::<Outcome<Vec<_>>>();
    Ok(match e {
        Expr::Lit { coords } => WittVector::from_coord_json(a.clone(), coords)?,
        Expr::Add { args } => {
            let xs = fold(args)?;
            let (first, rest) = xs
                .split_first()
                .ok_or_else(|| Failure::Parse("add needs at least one argument".into()))?;
            rest.iter().try_fold(first.clone(), |acc, x| acc.add(x))?
        }
        Expr::Sub { args } => eval(a, &args[0])?.sub(&eval(a, &args[1])?)?,
        Expr::Neg { arg } => eval(a, arg)?.neg(),
        Expr::Mul { args } => {
            let xs = fold(args)?;
            WittVector::product(&xs.iter().collect::<Vec<_>>())?
        }
        Expr::Multiple { k, arg } => eval(a, arg)?.multiple(*k)?,
        Expr::Scalar { scalar, arg } => {
            let f = a.field();
            let s = scalar
                .iter()
                .map(|c| f.from_coords(c))
                .collect::<Result<Vec<_>, _>>()?;
            eval(a, arg)?.scalar_mul(&WittVector::scalar(f, &s)?)?
        }
        Expr::Frob { arg } => eval(a, arg)?.frobenius()?,
        Expr::Ver { arg } => eval(a, arg)?.verschiebung(),
        Expr::Truncate { n, arg } => eval(a, arg)?.truncate(*n)?,
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum CwOp {
    Add,
    #[serde(rename = "F")]
    F,
    #[serde(rename = "V")]
    V,
    Multiple,
    Validate,
}

#[derive(Deserialize)]
struct CwInput {
    algebra: AlgebraInput,
    op: CwOp,
    args: Vec<CoWittJson>,
    #[serde(default)]
    k: u32,
    #[serde(default)]
    repeats: Option<usize>,
    #[serde(default)]
    cap: Option<usize>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Outcome<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn witt_poly(p: u32, n: usize, kind: &str) -> Outcome<Value> {
    let kind = WittKind::from_str(kind)?;
    if let Some(w) = cost_warning(p, n) {
        eprintln!("{w}");
    }
    let polys = universal_polys(p, n, kind)?;
    let mut v = to_value(&CacheFile::new(p, n, kind, &polys));
    v["text"] = polys
        .iter()
        .map(|u| Value::String(u.poly.to_string()))
        .collect();
    Ok(v)
}

fn witt_eval(input: &Path) -> Outcome<Value> {
    let j: EvalInput = read_json(input)?;
    let a = Arc::new(j.algebra.build()?);
    let x = eval(&a, &j.expr)?;
    Ok(json!({ "result": to_value(&x.to_json()) }))
}

fn cw(input: &Path) -> Outcome<Value> {
    let j: CwInput = read_json(input)?;
    let a = Arc::new(j.algebra.build()?);
    let xs = j
        .args
        .iter()
        .map(|x| CoWittElement::from_json(a.clone(), x))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = if matches!(j.op, CwOp::Add) { 2 } else { 1 };
    if xs.len() != arity {
        return Err(Failure::Parse(format!(
            "expected {arity} argument(s), got {}",
            xs.len()
        )));
    }
    let opts = StabilizeOptions {
        repeats: j.repeats,
        cap: j.cap,
        start: 0,
    };
    let result = match j.op {
        CwOp::Validate => return Ok(json!({ "valid": cw_validate(&xs[0]) })),
        CwOp::Add => cw_add_with(&xs[0], &xs[1], opts)?,
        CwOp::F => cw_F(&xs[0]),
        CwOp::V => cw_V(&xs[0]),
        CwOp::Multiple => cw_multiple(&xs[0], j.k)?,
    };
    Ok(json!({ "result": to_value(&result.to_json()) }))
}

fn split(input: &Path) -> Outcome<Value> {
    let j: AlgebraInput = read_json(input)?;
    let d = decompose(&j.build()?)?;
    Ok(json!({ "decomposition": to_value(&d.to_json()) }))
}

fn fgl_report(p: u32, precision: usize, coeffs: &str) -> Outcome<Value> {
    let coeffs = coeffs
        .split(',')
        .map(|s| {
            Rational::from_str(s.trim()).map_err(|_| Failure::Parse(format!("bad rational {s:?}")))
        })
        .collect::<Outcome<Vec<_>>>()?;
    Ok(to_value(&fgl::report(p, precision, coeffs)?))
}

fn polarize(input: &Path) -> Outcome<Value> {
    let j: AlgebraJson = read_json(input)?;
    let a = PPolarAlgebra::polarize(&j.build()?)?;
    Ok(json!({ "algebra": to_value(&a.to_json()), "mu_zero": a.is_trivial() }))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let out = cli.out.as_deref();
    let mut v = match &cli.command {
        Command::WittPoly { p, n, kind } => witt_poly(*p, *n, kind)?,
        Command::WittEval { input } => witt_eval(input)?,
        Command::Cw { input } => cw(input)?,
        Command::Split { input } => split(input)?,
        Command::Fgl {
            p,
            precision,
            log_coeffs,
        } => fgl_report(*p, *precision, log_coeffs)?,
        Command::Polarize { input } => polarize(input)?,
        Command::Verify {
            suites,
            p,
            seed,
            format,
        } => {
            let report = verify::run(suites, VerifyOptions { seed: *seed, p: *p })?;
            let text = match format {
                Format::Table => report.table(),
                Format::Json => pretty(to_value(&report)),
            };
            emit(out, &text)?;
            if !report.pass {
                return Err(Failure::Unverified("some checks failed".into()));
            }
            return Ok(());
        }
    };
    v["format"] = Value::String(FORMAT.into());
    emit(out, &pretty(v))
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn fail(f: &Failure) -> ExitCode {
    let diag = json!({
        "format": FORMAT,
        "error": { "kind": f.kind(), "message": f.message() },
    });
    eprintln!("{}", serde_json::to_string(&diag).expect("serializable"));
    ExitCode::from(f.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Failure::Usage(e.render().to_string())),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f),
    }
}
