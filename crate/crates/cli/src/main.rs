mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use critorbit::orbit::RationalParam;
use critorbit::Error;

#[derive(Parser, Debug)]
#[command(name = "critorbit", version, about = "Critical orbits of x^d + c: periods, Gleason polynomials, lifting, construction")]
struct Cli {
    /// Seed for the randomized primality rounds above 2^64.
    #[arg(long, global = true, default_value_t = critorbit::arith::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add a `meta` block (version, timestamp, elapsed) beside the payload.
    #[arg(long, global = true)]
    meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Dn {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub n: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Period type (m,n) of the critical orbit (or of --r) in Z/p^t.
    Orbit {
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        c: RationalParam,
        #[arg(long)]
        p: BigUint,
        #[arg(long, default_value_t = 1)]
        t: u32,
        /// Starting point instead of the critical point.
        #[arg(long, allow_hyphen_values = true)]
        r: Option<BigInt>,
    },
    /// v_p(f^n(0)), by doubling the working precision.
    Valuation {
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        c: RationalParam,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: BigUint,
        /// Largest precision tried.
        #[arg(long, default_value_t = critorbit::orbit::DEFAULT_VALUATION_CAP)]
        cap: u32,
    },
    /// Whether p is a primitive prime divisor of f^n(0).
    Primitive {
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        c: RationalParam,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: BigUint,
    },
    /// Gleason polynomial G_{d,n}(c).
    Gleason {
        #[command(flatten)]
        dn: Dn,
    },
    /// Discriminant of G_{d,n}, exactly or mod --p.
    Disc {
        #[command(flatten)]
        dn: Dn,
        #[arg(long)]
        p: Option<u64>,
        /// Factor the exact discriminant.
        #[arg(long)]
        factor: bool,
    },
    /// Roots of G_{d,n} (or of f^n(0) with --iterate) over F_p.
    Roots {
        #[command(flatten)]
        dn: Dn,
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        iterate: bool,
    },
    /// Hensel-lift c0 to the p-adic root of f^n(0), mod p^precision.
    Lift {
        #[command(flatten)]
        dn: Dn,
        #[arg(long)]
        p: BigUint,
        #[arg(long, allow_hyphen_values = true)]
        c0: BigInt,
        #[arg(long)]
        precision: u32,
    },
    /// Parameter with p^r exactly dividing f^n(0).
    Adjust {
        #[command(flatten)]
        dn: Dn,
        #[arg(long)]
        p: BigUint,
        #[arg(long, allow_hyphen_values = true)]
        c0: BigInt,
        #[arg(long)]
        r: u32,
        /// Lift precision (default r + 2).
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Build c from a divisibility spec (JSON file, or - for stdin).
    Construct {
        #[arg(long)]
        spec: String,
        /// Ceiling for automatic prime selection.
        #[arg(long, default_value_t = critorbit::constructor::DEFAULT_PRIME_CEILING)]
        limit: u64,
    },
    /// Check a parameter against every constraint of a spec.
    Verify {
        /// Overrides the degree in the spec.
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c: BigInt,
        #[arg(long)]
        spec: String,
    },
    /// Period types of every c in F_p.
    Pcf {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: BigUint,
    },
    /// Condition (*) for --n, or (**) without it.
    Condition {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: BigUint,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Lifts of the F_p PCF parameters with periodic critical point.
    Correspond {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: BigUint,
        #[arg(long, default_value_t = 4)]
        precision: u32,
    },
    /// Fixed-point proportion, 1/D! bound, and an empirical scan to --limit.
    Density {
        #[command(flatten)]
        dn: Dn,
        #[arg(long)]
        limit: Option<u64>,
        /// Emit p,has_root rows instead of JSON (needs --limit).
        #[arg(long)]
        csv: bool,
    },
    /// Primitive prime divisors of a_n against the upper bound.
    Bound {
        #[command(flatten)]
        dn: Dn,
        #[arg(long, allow_hyphen_values = true)]
        c: RationalParam,
        /// Pollard-rho iteration budget.
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Upper bound on the number of primitive prime divisors of a_n.
    Rho {
        #[command(flatten)]
        dn: Dn,
        #[arg(long, allow_hyphen_values = true)]
        c: RationalParam,
    },
    /// Per-iterate witnesses for maximal iterated Galois layers.
    Certify {
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        c: BigInt,
        /// Number of iterates (ignored with --primes).
        #[arg(long)]
        m: Option<u64>,
        /// Comma-separated primes, the i-th claimed for iterate i.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<BigUint>,
        /// Number of primes tried per iterate by the scan.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
}

/// Outcome of a subcommand.
pub enum Status {
    Ok,
    VerificationFailed,
}

pub enum Output {
    Json(Status, Value),
    Text(String),
}

fn error_status(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Inconsistency(_) => ("verification-failed", 1),
        Error::SizeGuard { .. } | Error::NonConvergence { .. } | Error::NoPrimeFound { .. } => {
            ("exhausted", 3)
        }
        _ => ("invalid-input", 2),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid-input",
        Error::InfiniteValuation => "infinite-valuation",
        Error::ZeroIterate { .. } => "zero-iterate",
        Error::SizeGuard { .. } => "size-guard",
        Error::NotPrimitive { .. } => "not-primitive",
        Error::HenselHypothesis { .. } => "hensel-hypothesis",
        Error::NonConvergence { .. } => "non-convergence",
        Error::DiscObstruction { .. } => "disc-obstruction",
        Error::NotAdmissible { .. } => "not-admissible",
        Error::NoPrimeFound { .. } => "no-prime-found",
        Error::Inconsistency(_) => "inconsistency",
    }
}

fn emit(status: &str, payload: Value, meta: Option<Value>) {
    let mut doc = json!({ "status": status, "payload": payload });
    if let Some(m) = meta {
        doc["meta"] = m;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let _ = serde_json::to_writer_pretty(&mut out, &doc);
    let _ = writeln!(out);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    critorbit::arith::set_primality_seed(cli.seed);
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("warning: could not size thread pool: {e}");
        }
    }
    let started = Instant::now();
    let result = commands::run(cli.command);
    let meta = cli.meta.then(|| {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "unix_time": now,
            "elapsed_ms": started.elapsed().as_millis() as u64,
            "seed": cli.seed.to_string(),
        })
    });
    match result {
        Ok(Output::Text(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Ok(Output::Json(Status::Ok, payload)) => {
            emit("ok", payload, meta);
            ExitCode::SUCCESS
        }
        Ok(Output::Json(Status::VerificationFailed, payload)) => {
            emit("verification-failed", payload, meta);
            ExitCode::from(1)
        }
        Err(e) => {
            let (status, code) = error_status(&e);
            eprintln!("error: {e}");
            emit(status, json!({ "error": error_kind(&e), "message": e.to_string() }), meta);
            ExitCode::from(code)
        }
    }
}
