//! `plq`: command-line front end for exact piecewise-linear maps of the half-line.

mod decimal;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::{One, Zero};

use plq_core::asymptotics::{coset_equivalent_capped, quotient_compose_capped};
use plq_core::plcore::{compose_capped, DEFAULT_COMMENSURABILITY_CAP};
use plq_core::rational::{parse_rational, show};
use plq_core::suites::{run_suite, Suite};
use plq_core::textio::{parse, serialize};
use plq_core::witnesses::{
    center_witness_with, torsion_witness, Construction, SampleConfig, Sampler, TailKind,
};
use plq_core::{bilip_constant, in_h, invert, power, s_invariant, Error, ExactRational, PlMap};

const SUITE_HELP: &str = "\
Suites:
  bilip      bounded slopes make a map bi-Lipschitz with constant K
  subgroup   H = {f : f(x)/x -> 1} is closed under composition and inverse, and proper (x -> kx is outside H for k > 1)
  normal     g^-1 f g stays in H for f in H: H is normal in G
  torsion    no power f^r (r <= 8) of a class outside H lies in H: G/H is torsion-free
  center     every non-identity class has a non-commuting partner: G/H has trivial center
  algebra    associativity and inverse laws in G, associativity of the quotient product in G/H
  roundtrip  parse(serialize(f)) = f and serialization is byte-stable
  all        every suite above, in this order";

const EXIT_HELP: &str = "\
Exit status: 0 success or true verdict, 1 false verdict (inh, coset-eq, check),
2 parse or validation error, 3 domain error, 4 usage error.
Environment: PLQ_COMMENSURABILITY_CAP overrides the largest exponent tried when
matching geometric scales (default 16).";

#[derive(Parser)]
#[command(name = "plq", version, about = "Exact algebra of PL homeomorphisms of [0, inf) modulo H", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MapArg {
    /// Input map (.plm)
    #[arg(short = 'f', long = "file", value_name = "F.plm")]
    f: PathBuf,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when omitted
    #[arg(short = 'o', long = "out", value_name = "OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print f(x) exactly
    Eval {
        #[command(flatten)]
        map: MapArg,
        #[arg(short = 'x', value_name = "RATIONAL", allow_hyphen_values = true)]
        x: String,
    },
    /// Write f∘g
    Compose {
        #[command(flatten)]
        map: MapArg,
        #[arg(short = 'g', value_name = "G.plm")]
        g: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Write f⁻¹
    Invert {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        out: Output,
    },
    /// Write f^r
    Pow {
        #[command(flatten)]
        map: MapArg,
        #[arg(short = 'r', value_name = "N")]
        r: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Write a representative of [f][g] in G/H
    Qcompose {
        #[command(flatten)]
        map: MapArg,
        #[arg(short = 'g', value_name = "G.plm")]
        g: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Print the asymptotic ratio set S_f
    Sinv {
        #[command(flatten)]
        map: MapArg,
    },
    /// Exit 0 if f lies in H, 1 if not; prints S_f
    Inh {
        #[command(flatten)]
        map: MapArg,
    },
    /// Exit 0 if f and g lie in the same coset of H, 1 if not; prints the certificate
    CosetEq {
        #[command(flatten)]
        map: MapArg,
        #[arg(short = 'g', value_name = "G.plm")]
        g: PathBuf,
    },
    /// Print the bi-Lipschitz constant K
    Bilip {
        #[command(flatten)]
        map: MapArg,
    },
    /// Build proof witnesses
    #[command(subcommand)]
    Witness(Witness),
    /// Write a seeded random map
    Sample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// affine, linear, geometric or mixed
        #[arg(long, default_value = "mixed")]
        tail: TailKind,
        #[command(flatten)]
        out: Output,
    },
    /// Run property suites
    #[command(after_help = SUITE_HELP)]
    Check {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: SuiteChoice,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Also print wall time per suite
        #[arg(long)]
        timings: bool,
    },
    /// Write a CSV of x, f(x), f(x)/x
    Plot {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, value_name = "RATIONAL", default_value = "0")]
        xmin: String,
        #[arg(long, value_name = "RATIONAL")]
        xmax: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Digits after the decimal point
        #[arg(long, default_value_t = 6)]
        digits: u32,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum Witness {
    /// Write a partner g with [f][g] != [g][f]; prints anchors and gaps
    Center {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        out: Output,
        #[arg(long, default_value_t = plq_core::witnesses::DEFAULT_ANCHORS)]
        anchors: usize,
    },
    /// Print S of f^r and a sequence along which f^r(x)/x stays away from 1
    Torsion {
        #[command(flatten)]
        map: MapArg,
        #[arg(short = 'r', value_name = "N")]
        r: u32,
    },
}

#[derive(Clone)]
enum SuiteChoice {
    All,
    One(Suite),
}

fn parse_suite(s: &str) -> Result<SuiteChoice, String> {
    if s == "all" {
        Ok(SuiteChoice::All)
    } else {
        s.parse().map(SuiteChoice::One)
    }
}

enum Failure {
    Usage(String),
    Input(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Domain(_) => 3,
            Failure::Usage(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_map(path: &Path) -> Result<PlMap, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))
}

fn rational(text: &str) -> Result<ExactRational, Failure> {
    parse_rational(text).map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cap() -> Result<u32, Failure> {
    match std::env::var("PLQ_COMMENSURABILITY_CAP") {
        Err(_) => Ok(DEFAULT_COMMENSURABILITY_CAP),
        Ok(v) => match v.trim().parse::<u32>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Usage(format!(
                "PLQ_COMMENSURABILITY_CAP must be a positive integer, found `{v}`"
            ))),
        },
    }
}

fn join(values: &[ExactRational]) -> String {
    values.iter().map(show).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval { map, x } => {
            let f = read_map(&map.f)?;
            println!("{}", show(&f.eval(&rational(&x)?)?));
            Ok(0)
        }
        Command::Compose { map, g, out } => {
            let (f, g) = (read_map(&map.f)?, read_map(&g)?);
            emit(&out, &serialize(&compose_capped(&f, &g, cap()?)?))?;
            Ok(0)
        }
        Command::Invert { map, out } => {
            emit(&out, &serialize(&invert(&read_map(&map.f)?)))?;
            Ok(0)
        }
        Command::Pow { map, r, out } => {
            emit(&out, &serialize(&power(&read_map(&map.f)?, r)?))?;
            Ok(0)
        }
        Command::Qcompose { map, g, out } => {
            let (f, g) = (read_map(&map.f)?, read_map(&g)?);
            emit(&out, &serialize(&quotient_compose_capped(&f, &g, cap()?)?))?;
            Ok(0)
        }
        Command::Sinv { map } => {
            println!("{}", s_invariant(&read_map(&map.f)?));
            Ok(0)
        }
        Command::Inh { map } => {
            let f = read_map(&map.f)?;
            println!("{}", s_invariant(&f));
            Ok(if in_h(&f) { 0 } else { 1 })
        }
        Command::CosetEq { map, g } => {
            let (f, g) = (read_map(&map.f)?, read_map(&g)?);
            let decision = coset_equivalent_capped(&f, &g, cap()?)?;
            println!("{decision}");
            Ok(if decision.equivalent() { 0 } else { 1 })
        }
        Command::Bilip { map } => {
            println!("{}", show(&bilip_constant(&read_map(&map.f)?)));
            Ok(0)
        }
        Command::Witness(Witness::Center { map, out, anchors }) => {
            let f = read_map(&map.f)?;
            let bundle = center_witness_with(&f, anchors)?;
            let mut report = String::new();
            let construction = match &bundle.construction {
                Construction::Anchored { slope } => format!("anchored, tail slope {}", show(slope)),
                Construction::Scaling { factor } => format!("scaling by {}", show(factor)),
            };
            let _ = writeln!(
                report,
                "target: {}",
                if bundle.inverted { "inverse of f" } else { "f" }
            );
            let _ = writeln!(report, "construction: {construction}");
            let _ = writeln!(report, "anchors: {}", join(&bundle.anchors));
            let _ = writeln!(report, "gaps: {}", join(&bundle.gaps));
            let _ = writeln!(report, "verdict: {}", bundle.verdict);
            let partner = serialize(&bundle.conjugator);
            match &out.out {
                Some(_) => {
                    print!("{report}");
                    emit(&out, &partner)?;
                }
                None => {
                    eprint!("{report}");
                    print!("{partner}");
                }
            }
            Ok(0)
        }
        Command::Witness(Witness::Torsion { map, r }) => {
            if r == 0 {
                return Err(Failure::Usage("-r must be at least 1".into()));
            }
            let w = torsion_witness(&read_map(&map.f)?, r)?;
            println!("power: {}", w.power);
            println!("invariant: {}", w.invariant);
            println!("outside H: {}", w.outside_h);
            println!(
                "f^r(x_k)/x_k -> {} along x_k = {} * {}^k",
                show(&w.limit),
                show(&w.start),
                show(&w.ratio)
            );
            Ok(0)
        }
        Command::Sample { seed, tail, out } => {
            let mut sampler = Sampler::new(SampleConfig::with_seed(seed).with_tail(tail))?;
            emit(&out, &serialize(&sampler.next_map()?))?;
            Ok(0)
        }
        Command::Check {
            suite,
            seed,
            samples,
            timings,
        } => {
            let suites = match suite {
                SuiteChoice::All => Suite::ALL.to_vec(),
                SuiteChoice::One(s) => vec![s],
            };
            let mut total = 0;
            for suite in suites {
                let report = run_suite(suite, seed, samples);
                if timings {
                    println!("{report}  {:.3?}", report.wall_time);
                } else {
                    println!("{report}");
                }
                for failure in &report.failures {
                    println!(
                        "  sample {} (seed {}): {}",
                        failure.sample, failure.seed, failure.invariant
                    );
                    for line in failure.counterexample.lines() {
                        println!("    {line}");
                    }
                }
                total += report.failures.len();
            }
            println!("total failures {total}");
            Ok(if total == 0 { 0 } else { 1 })
        }
        Command::Plot {
            map,
            xmin,
            xmax,
            points,
            digits,
            out,
        } => {
            let f = read_map(&map.f)?;
            let (lo, hi) = (rational(&xmin)?, rational(&xmax)?);
            if lo < ExactRational::zero() || hi < lo || points == 0 {
                return Err(Failure::Usage(
                    "need 0 <= xmin <= xmax and --points >= 1".into(),
                ));
            }
            let mut csv = String::from("x,f_of_x,ratio\n");
            let first_slope = f
                .slopes()
                .next()
                .cloned()
                .unwrap_or_else(ExactRational::one);
            for i in 0..points {
                let x = if points == 1 {
                    lo.clone()
                } else {
                    &lo + (&hi - &lo) * ExactRational::new(i.into(), (points - 1).into())
                };
                let fx = f.eval(&x)?;
                let ratio = if x.is_zero() {
                    first_slope.clone()
                } else {
                    &fx / &x
                };
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    decimal::render(&x, digits),
                    decimal::render(&fx, digits),
                    decimal::render(&ratio, digits)
                );
            }
            emit(&out, &csv)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("plq: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
