//! Command line front end.  One subcommand per capability; results go to
//! stdout, progress to stderr.  Exit codes: 0 success, 1 failed check or
//! internal cross-check, 2 bad arguments, 3 compute budget exceeded.

mod verify;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tideal::bounds::{
    coprime_lower_bound, derived_dim_polynomial, fit_pk, latyshev_lower_bound, omega_upper_bound,
    zeta_circulant_rank, zeta_invertible,
};
use tideal::combinatorics::Partition;
use tideal::decomposition::{decompose_w, dim_w, nilpotency_probe, Decomposition, DimMethod};
use tideal::glk::{multiplicity_upper_bounds, young_rule};
use tideal::stability::{coefficient_polynomial, stabilization_report};
use tideal::words::Word;
use tideal::Error;

#[derive(Parser)]
#[command(
    name = "tideal",
    version,
    about = "Exact decompositions, dimensions, and bounds for the multilinear \
             components of the T-ideal generated by x^n",
    after_help = "Exit codes: 0 success, 1 failed check, 2 bad arguments, \
                  3 compute budget exceeded (partial output flagged)."
)]
struct RunConfig {
    /// Worker threads for internal parallelism (default: all cores).
    #[arg(long, global = true, env = "TIDEAL_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Rank of the spanning matrix.
    Direct,
    /// Sum over the decomposition.
    Multiplicities,
    /// Both, cross-checked.
    Both,
}

impl From<MethodArg> for DimMethod {
    fn from(m: MethodArg) -> DimMethod {
        match m {
            MethodArg::Direct => DimMethod::Direct,
            MethodArg::Multiplicities => DimMethod::ViaMultiplicities,
            MethodArg::Both => DimMethod::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose W_{n,m} into irreducible S_m-modules.
    Decompose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Also compute the rows the length bound already forces to zero.
        #[arg(long)]
        no_prune: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Dimension of W_{n,m}.
    Dim {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Nilpotency degree probe: least m with dim W_{n,m} = m!.
    Dprobe {
        #[arg(long)]
        n: usize,
        /// Stop searching above this degree (default n^2).
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Closed-form dimension bounds, derived dimension polynomials, and
    /// diagonal polynomial fits.
    Bounds(BoundsArgs),
    /// Per-shape upper bounds for the multiplicities in W_{n,n+K}, from the
    /// polynomial-representation side.
    Upper {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Number of matrix variables (default 2K+2).
        #[arg(long)]
        vars: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decompositions along the diagonal m = n + K, the derived relation
    /// between levels, and the observed stabilization onset.
    Stabilize {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Multiply an irreducible character by a one-row one (Pieri step).
    YoungRule {
        /// Row length to multiply by.
        #[arg(long)]
        l: usize,
        /// Shape, e.g. "3,1" or "(3,1)".
        #[arg(long)]
        shape: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Invertibility of e + g + ... + g^k in the rational group algebra of
    /// the cyclic group of the given order.
    Zeta {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        k: usize,
        /// Cross-check against the exact circulant rank.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Coefficient of the shifted word in the symmetrized block product, as
    /// a polynomial in the shift s.
    Coeffpoly {
        /// Block monomial, repeatable, e.g. --monomial y2 --monomial "y1^2".
        #[arg(long = "monomial", required = true)]
        monomials: Vec<String>,
        /// Reference word whose central run absorbs the shift.
        #[arg(long)]
        u: String,
        /// Largest shift sampled; the last two samples are held out.
        #[arg(long, default_value_t = 6)]
        s_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a property-check suite: fast (small-degree smoke set, < 1 min)
    /// or full (extended corpus, ~10 min).
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 0xD1CE)]
        seed: u64,
    },
}

#[derive(Args)]
struct BoundsArgs {
    /// Left index of W_{n,m} (use with --m).
    #[arg(long)]
    n: Option<usize>,
    /// Total degree of W_{n,m} (use with --n).
    #[arg(long)]
    m: Option<usize>,
    /// Also compute the dimension and check it sits between the bounds.
    #[arg(long)]
    with_dim: bool,
    /// Fit the dimension polynomial of the diagonal m = n + K from computed
    /// dimensions (use with --from/--to).
    #[arg(long)]
    fit_k: Option<usize>,
    /// First diagonal level to sample.
    #[arg(long)]
    from: Option<usize>,
    /// Last diagonal level to sample.
    #[arg(long)]
    to: Option<usize>,
    /// Dimension polynomial of the family grown from this shape's first row.
    #[arg(long)]
    derived_dim: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

enum CliError {
    Args(String),
    Check(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Some(w) = config.workers {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .expect("worker pool initialized before first use");
    }
    match run(config.command) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Args(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `tideal --help` for usage");
            ExitCode::from(2)
        }
        Err(CliError::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Lib(e)) => {
            let code = match e {
                Error::CapExceeded { .. } | Error::BudgetExceeded(_) => {
                    eprintln!("partial: {e}");
                    3
                }
                Error::MethodDisagreement(_) | Error::InvariantViolated(_) => {
                    eprintln!("cross-check failed: {e}");
                    1
                }
                _ => {
                    eprintln!("error: {e}");
                    2
                }
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> CliResult<u8> {
    match command {
        Command::Decompose {
            n,
            m,
            no_prune,
            format,
        } => cmd_decompose(n, m, !no_prune, format),
        Command::Dim {
            n,
            m,
            method,
            format,
        } => cmd_dim(n, m, method, format),
        Command::Dprobe { n, m_max, format } => cmd_dprobe(n, m_max, format),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Upper { k, n, vars, format } => cmd_upper(k, n, vars, format),
        Command::Stabilize {
            k,
            n_min,
            n_max,
            format,
        } => cmd_stabilize(k, n_min, n_max, format),
        Command::YoungRule { l, shape, format } => cmd_young_rule(l, &shape, format),
        Command::Zeta {
            order,
            k,
            oracle,
            format,
        } => cmd_zeta(order, k, oracle, format),
        Command::Coeffpoly {
            monomials,
            u,
            s_max,
            format,
        } => cmd_coeffpoly(&monomials, &u, s_max, format),
        Command::Verify { suite, seed } => Ok(verify::run(suite, seed)),
    }
}

fn print_decomposition(d: &Decomposition) {
    println!("{d}");
    println!("dim = {}", d.dim());
}

fn cmd_decompose(n: usize, m: usize, prune: bool, format: Format) -> CliResult<u8> {
    if n > m {
        return Err(CliError::Args(format!("need n <= m, got n = {n}, m = {m}")));
    }
    eprintln!("decomposing W({n},{m}) with prune = {prune} ...");
    let start = Instant::now();
    let d = decompose_w(n, m, prune)?;
    eprintln!("done in {:.2?}", start.elapsed());
    match format {
        Format::Text => print_decomposition(&d),
        Format::Json => {
            let out = json!({
                "n": n,
                "m": m,
                "prune": prune,
                "decomposition": d,
                "dim": d.dim().to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn cmd_dim(n: usize, m: usize, method: MethodArg, format: Format) -> CliResult<u8> {
    if n > m {
        return Err(CliError::Args(format!("need n <= m, got n = {n}, m = {m}")));
    }
    let start = Instant::now();
    let dim = dim_w(n, m, method.into())?;
    eprintln!("computed in {:.2?}", start.elapsed());
    let method_name = match method {
        MethodArg::Direct => "direct",
        MethodArg::Multiplicities => "multiplicities",
        MethodArg::Both => "both",
    };
    match format {
        Format::Text => println!("dim W({n},{m}) = {dim}"),
        Format::Json => {
            let out = json!({"n": n, "m": m, "method": method_name, "dim": dim});
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn cmd_dprobe(n: usize, m_max: Option<usize>, format: Format) -> CliResult<u8> {
    if n == 0 {
        return Err(CliError::Args("need n >= 1".into()));
    }
    let searched_to = m_max.unwrap_or(n * n);
    let found = nilpotency_probe(n, m_max)?;
    match format {
        Format::Text => match found {
            Some(d) => println!("d({n}) = {d}"),
            None => println!("d({n}) > {searched_to} (searched up to m = {searched_to})"),
        },
        Format::Json => {
            let out = json!({"n": n, "searched_up_to": searched_to, "degree": found});
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn cmd_bounds(args: BoundsArgs) -> CliResult<u8> {
    let pair_mode = args.n.is_some() || args.m.is_some() || args.with_dim;
    let fit_mode = args.fit_k.is_some() || args.from.is_some() || args.to.is_some();
    let derived_mode = args.derived_dim.is_some();
    match (pair_mode, fit_mode, derived_mode) {
        (true, false, false) => {
            let (n, m) = match (args.n, args.m) {
                (Some(n), Some(m)) => (n, m),
                _ => return Err(CliError::Args("bounds needs both --n and --m".into())),
            };
            bounds_pair(n, m, args.with_dim, args.format)
        }
        (false, true, false) => {
            let (k, from, to) = match (args.fit_k, args.from, args.to) {
                (Some(k), Some(a), Some(b)) => (k, a, b),
                _ => {
                    return Err(CliError::Args(
                        "polynomial fit needs --fit-k, --from and --to".into(),
                    ))
                }
            };
            bounds_fit(k, from, to, args.format)
        }
        (false, false, true) => {
            let shape = args.derived_dim.expect("checked");
            bounds_derived_dim(&shape, args.format)
        }
        _ => Err(CliError::Args(
            "choose one mode: --n/--m, --fit-k/--from/--to, or --derived-dim".into(),
        )),
    }
}

fn bounds_pair(n: usize, m: usize, with_dim: bool, format: Format) -> CliResult<u8> {
    if n == 0 || n > m {
        return Err(CliError::Args(format!(
            "need 1 <= n <= m, got n = {n}, m = {m}"
        )));
    }
    let omega = omega_upper_bound(n, m);
    let latyshev = latyshev_lower_bound(n, m);
    let coprime = coprime_lower_bound(n, m);
    let dim = if with_dim {
        Some(dim_w(n, m, DimMethod::ViaMultiplicities)?)
    } else {
        None
    };
    let sandwich_ok = dim.map(|d| {
        let d = num_bigint::BigUint::from(d);
        latyshev <= d && d <= omega && coprime.as_ref().map_or(true, |c| *c <= d)
    });
    match format {
        Format::Text => {
            println!("omega upper bound    = {omega}");
            println!("latyshev lower bound = {latyshev}");
            match &coprime {
                Some(c) => println!("coprime lower bound  = {c}"),
                None => println!("coprime lower bound  = not applicable (gcd(n,m) > 1)"),
            }
            if let Some(d) = dim {
                println!("dim                  = {d}");
                println!(
                    "sandwich             = {}",
                    if sandwich_ok == Some(true) { "ok" } else { "VIOLATED" }
                );
            }
        }
        Format::Json => {
            let out = json!({
                "n": n,
                "m": m,
                "omega_upper": omega.to_string(),
                "latyshev_lower": latyshev.to_string(),
                "coprime_lower": coprime.as_ref().map(|c| c.to_string()),
                "dim": dim,
                "sandwich_ok": sandwich_ok,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    if sandwich_ok == Some(false) {
        return Err(CliError::Check(format!(
            "dimension escapes its bounds at ({n},{m})"
        )));
    }
    Ok(0)
}

fn bounds_fit(k: usize, from: usize, to: usize, format: Format) -> CliResult<u8> {
    if from == 0 || from > to {
        return Err(CliError::Args(format!(
            "need 1 <= from <= to, got {from}..{to}"
        )));
    }
    let mut samples = BTreeMap::new();
    for n in from..=to {
        eprintln!("computing dim W({n},{}) ...", n + k);
        samples.insert(n, dim_w(n, n + k, DimMethod::ViaMultiplicities)?);
    }
    eprintln!("fitting the diagonal polynomial from level {from} ...");
    let fit = fit_pk(k, &samples)?;
    match format {
        Format::Text => {
            println!("p(n) = {}", fit.polynomial);
            println!(
                "coefficients (lowest degree first): [{}]",
                fit.polynomial
                    .coefficients()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            for c in &fit.checks {
                println!(
                    "n = {}: dim = {}, fit = {}{}",
                    c.n,
                    c.expected,
                    c.predicted,
                    if c.matched { "" } else { "  MISMATCH" }
                );
            }
            println!(
                "validated = {}",
                if fit.validated {
                    "yes".to_string()
                } else {
                    "no (sampled range not stabilized)".to_string()
                }
            );
        }
        Format::Json => {
            let out = json!({"from": from, "to": to, "fit": fit});
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn bounds_derived_dim(shape: &str, format: Format) -> CliResult<u8> {
    let lambda = Partition::from_str(shape).map_err(|e| CliError::Args(e.to_string()))?;
    if lambda.is_empty() {
        return Err(CliError::Args("--derived-dim needs a nonempty shape".into()));
    }
    let q = derived_dim_polynomial(&lambda);
    match format {
        Format::Text => {
            println!("q(d) = {q}");
            println!(
                "coefficients (lowest degree first): [{}]",
                q.coefficients()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        Format::Json => {
            let out = json!({"shape": lambda, "polynomial": q});
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn cmd_upper(k: usize, n: usize, vars: Option<usize>, format: Format) -> CliResult<u8> {
    let bounds = multiplicity_upper_bounds(k, n, vars)?;
    match format {
        Format::Text => {
            println!("{bounds}");
            println!("dimension bound = {}", bounds.dim());
        }
        Format::Json => {
            let out = json!({
                "k": k,
                "n": n,
                "vars": vars.unwrap_or(2 * k + 2),
                "bounds": bounds,
                "dimension_bound": bounds.dim().to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn cmd_stabilize(k: usize, n_min: usize, n_max: usize, format: Format) -> CliResult<u8> {
    eprintln!("decomposing the diagonal m = n + {k} for n = {n_min}..{n_max} ...");
    let start = Instant::now();
    let report = stabilization_report(k, n_min, n_max)?;
    eprintln!("done in {:.2?}", start.elapsed());
    match format {
        Format::Text => {
            for (n, d) in &report.decompositions {
                println!("n = {n}: {d}   (dim {})", d.dim());
            }
            match report.n_obs {
                Some(n) => println!("stabilization observed from n = {n}"),
                None => println!("no stabilization observed in this range"),
            }
            if !report.complete {
                println!("range truncated by compute budget");
            }
            for seq in &report.sequences {
                println!(
                    "family {}: multiplicities {:?}, first decrease: {}",
                    seq.family,
                    seq.multiplicities,
                    seq.first_decrease
                        .map_or("none".to_string(), |n| n.to_string())
                );
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("valid json")
            );
        }
    }
    Ok(0)
}

fn cmd_young_rule(l: usize, shape: &str, format: Format) -> CliResult<u8> {
    let lambda = Partition::from_str(shape).map_err(|e| CliError::Args(e.to_string()))?;
    let product = young_rule(l, &lambda);
    match format {
        Format::Text => println!("{product}"),
        Format::Json => {
            let out = json!({"l": l, "shape": lambda, "product": product});
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cmd_zeta(order: usize, k: usize, oracle: bool, format: Format) -> CliResult<u8> {
    let invertible = zeta_invertible(order, k)?;
    let g = gcd(k as u64 + 1, order as u64);
    let rank = if oracle {
        Some(zeta_circulant_rank(order, k)?)
    } else {
        None
    };
    match format {
        Format::Text => {
            if invertible {
                println!("invertible (gcd({},{})=1)", k + 1, order);
            } else {
                println!("not invertible (gcd({},{})={g})", k + 1, order);
            }
            if let Some(r) = rank {
                println!(
                    "circulant rank = {r} of {order} ({})",
                    if (r == order) == invertible {
                        "agrees"
                    } else {
                        "DISAGREES"
                    }
                );
            }
        }
        Format::Json => {
            let out = json!({
                "order": order,
                "k": k,
                "invertible": invertible,
                "gcd": g,
                "circulant_rank": rank,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    if let Some(r) = rank {
        if (r == order) != invertible {
            return Err(CliError::Check(format!(
                "criterion and circulant rank disagree at order {order}, k = {k}"
            )));
        }
    }
    Ok(0)
}

fn cmd_coeffpoly(monomials: &[String], u: &str, s_max: usize, format: Format) -> CliResult<u8> {
    let blocks: Vec<Word> = monomials
        .iter()
        .map(|s| Word::from_str(s))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Args(e.to_string()))?;
    let word = Word::from_str(u).map_err(|e| CliError::Args(e.to_string()))?;
    let fit = coefficient_polynomial(&blocks, &word, s_max)?;
    match format {
        Format::Text => {
            println!("{fit}");
            println!(
                "samples: {}",
                fit.samples()
                    .iter()
                    .map(|(s, v)| format!("c({s}) = {v}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        Format::Json => {
            let out = json!({
                "monomials": monomials,
                "u": u,
                "s_max": s_max,
                "coefficients": fit
                    .coefficients()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>(),
                "samples": fit
                    .samples()
                    .iter()
                    .map(|(s, v)| json!([s, v.to_string()]))
                    .collect::<Vec<_>>(),
                "residual": fit.residual(),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("valid json"));
        }
    }
    Ok(0)
}
