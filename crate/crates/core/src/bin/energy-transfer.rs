use std::fmt::Write as _;
use std::io::Read as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use energy_transfer::identities::{self, SiladicVariant, SECONDARY_CLASSES};
use energy_transfer::partition::{self, DifferenceMatrix};
use energy_transfer::transfer::{self, CrossingStrategy, Prediction, TransferOptions};
use energy_transfer::verify;
use energy_transfer::{
    BoundSpec, ColoredPartition, Error, Execution, Flavor, MinimalEnergy, Relation,
};

#[derive(Parser, Debug)]
#[command(name = "energy-transfer", version, about = "Enumerate, map and verify colored partitions defined by a 0/1 minimal-energy matrix")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Tsv)]
    format: Format,
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the partitions with a given color word, energy and bound.
    Enumerate(EnumerateArgs),
    /// Apply Φ (O-side to E-side) or Ψ (E-side to O-side).
    Map(MapArgs),
    /// Run a verification suite; exits 1 if any check fails.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug)]
struct EnergyArg {
    /// Energy matrix JSON file, or `builtin:D` / `builtin:twister`.
    #[arg(long, default_value = "builtin:D")]
    energy: String,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    energy: EnergyArg,
    /// O, E or E-dual.
    #[arg(long, default_value = "O")]
    side: String,
    /// Comma-separated state labels.
    #[arg(long)]
    word: String,
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
    /// One of 0+, 1+, 0-, 1-.
    #[arg(long)]
    bound: String,
    #[arg(long)]
    count_only: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Direction {
    Phi,
    Psi,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Rightmost,
    Random,
}

#[derive(Args, Debug)]
struct MapArgs {
    direction: Direction,
    #[command(flatten)]
    energy: EnergyArg,
    /// Partition JSON file, `-` for stdin.
    #[arg(long, conflicts_with = "partition")]
    input: Option<String>,
    /// Partition in text shorthand, e.g. `11:bbar,5*b.a`.
    #[arg(long, allow_hyphen_values = true)]
    partition: Option<String>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one JSON line per crossing.
    #[arg(long)]
    trace: bool,
    /// Print the closed-form prediction and check it against the run.
    #[arg(long)]
    predict: bool,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Compare the difference matrix with an expected matrix file.
    Diffmatrix {
        #[command(flatten)]
        energy: EnergyArg,
        #[arg(long)]
        expect: String,
        #[arg(long, default_value = "E")]
        side: String,
    },
    /// Count both sides of the mod-16 partition theorems.
    Siladic {
        #[arg(long, default_value = "distinct-odd")]
        variant: String,
        #[arg(long, default_value_t = 40)]
        n_max: i64,
    },
    /// Count both sides and check Φ/Ψ over a range of energies.
    Bijection {
        #[command(flatten)]
        energy: EnergyArg,
        #[arg(long)]
        word: String,
        /// Inclusive range `lo..hi`.
        #[arg(long, allow_hyphen_values = true)]
        n_range: String,
        #[arg(long)]
        bound: String,
        #[arg(long, default_value = "E")]
        side: String,
    },
    /// Compare enumeration series with the product formula.
    Series {
        #[command(flatten)]
        energy: EnergyArg,
        #[arg(long, default_value_t = 10)]
        q_order: i64,
        #[arg(long)]
        x_order: Option<u32>,
        #[arg(long, default_value_t = 1)]
        rho: i64,
    },
    /// Refined overpartition counts, product and specializations.
    Overpartition {
        #[arg(long, default_value_t = 12)]
        n_max: i64,
        /// Order for the two specializations; 0 skips them.
        #[arg(long, default_value_t = 40)]
        q_order: i64,
    },
    /// Randomized structural suites.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

enum Failure {
    Input(String),
    Unsupported(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unbounded | Error::Unsupported(_) | Error::NonConvergent(_) => {
                Failure::Unsupported(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn load_energy(arg: &EnergyArg) -> Result<MinimalEnergy, Failure> {
    match arg.energy.as_str() {
        "builtin:D" => Ok(MinimalEnergy::overpartition()),
        "builtin:twister" => Ok(MinimalEnergy::twister()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))?;
            Ok(MinimalEnergy::from_json(&text)?)
        }
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Failure> {
    Ok(s.parse()?)
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<i64>, Failure> {
    let bad = || Failure::Input(format!("expected `lo..hi`, got `{s}`"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    Ok(lo.trim().parse().map_err(|_| bad())?..=hi.trim().parse().map_err(|_| bad())?)
}

fn relation_of(side: &str) -> Result<Relation, Failure> {
    match parse::<Flavor>(side)? {
        Flavor::E(r) => Ok(r),
        Flavor::O => Err(Failure::Input("expected an E-side flavor".into())),
    }
}

fn emit_partition(out: &mut String, format: Format, e: &MinimalEnergy, p: &ColoredPartition) {
    match format {
        Format::Tsv => writeln!(out, "{}", p.format(e.states())).unwrap(),
        Format::Json => writeln!(out, "{}", p.to_json(e.states())).unwrap(),
    }
}

fn cmd_enumerate(a: &EnumerateArgs, format: Format, exec: Execution, out: &mut String) -> Outcome {
    let e = load_energy(&a.energy)?;
    let flavor: Flavor = parse(&a.side)?;
    let bound: BoundSpec = parse(&a.bound)?;
    let word = e.states().parse_word(&a.word)?;
    let ps = partition::enumerate_with(&e, flavor, &word, a.n, bound, exec)?;
    if a.count_only {
        writeln!(out, "{}", ps.len()).unwrap();
    } else {
        for p in &ps {
            emit_partition(out, format, &e, p);
        }
    }
    Ok(true)
}

fn read_partition(a: &MapArgs, e: &MinimalEnergy, flavor: Flavor) -> Result<ColoredPartition, Failure> {
    if let Some(text) = &a.partition {
        return Ok(ColoredPartition::parse(text, flavor, e.states())?);
    }
    let json = match a.input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|err| Failure::Input(err.to_string()))?;
            s
        }
        Some(path) => std::fs::read_to_string(path)
            .map_err(|err| Failure::Input(format!("cannot read {path}: {err}")))?,
    };
    let p = ColoredPartition::from_json(&json, e.states())?;
    if p.flavor != flavor {
        return Err(Failure::Input(format!("expected a {} partition", flavor.tag())));
    }
    Ok(p)
}

fn emit_prediction(out: &mut String, name: &str, p: &Prediction) {
    let cols: Vec<String> = p.cols.iter().map(|i| i.to_string()).collect();
    writeln!(out, "{name}\t{}", cols.join("\t")).unwrap();
    for (j, row) in p.rows.iter().zip(&p.table) {
        let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{j}\t{}", vals.join("\t")).unwrap();
    }
    writeln!(out, "predicted_crossings={}", p.crossing_count()).unwrap();
}

fn cmd_map(a: &MapArgs, format: Format, out: &mut String) -> Outcome {
    let e = load_energy(&a.energy)?;
    let strategy = match a.strategy {
        StrategyArg::Leftmost => CrossingStrategy::Leftmost,
        StrategyArg::Rightmost => CrossingStrategy::Rightmost,
        StrategyArg::Random => CrossingStrategy::Random(a.seed),
    };
    let opts = TransferOptions {
        strategy,
        trace: a.trace,
        ..Default::default()
    };
    let (result, prediction) = match a.direction {
        Direction::Phi => {
            let lam = read_partition(a, &e, Flavor::O)?;
            let r = transfer::phi_with(&e, &lam, opts)?;
            let p = a.predict.then(|| transfer::predict_phi(&e, &lam)).transpose()?;
            (r, p.map(|p| ("phi", p)))
        }
        Direction::Psi => {
            let nu = read_partition(a, &e, Flavor::E_STANDARD)?;
            let r = transfer::psi_with(&e, &nu, opts)?;
            let p = a.predict.then(|| transfer::predict_psi(&e, &nu)).transpose()?;
            (r, p.map(|p| ("psi", p)))
        }
    };
    if let Some(trace) = &result.trace {
        let st = e.states();
        for ev in &trace.events {
            let line = serde_json::json!({
                "event": "cross",
                "position": ev.position,
                "before": [ev.before.0.to_json(st), ev.before.1.to_json(st)],
                "after": [ev.after.0.to_json(st), ev.after.1.to_json(st)],
                "origins": [ev.origins.0, ev.origins.1],
            });
            writeln!(out, "{line}").unwrap();
        }
    }
    emit_partition(out, format, &e, &result.partition);
    writeln!(out, "crossings={}", result.crossing_count()).unwrap();
    let mut ok = true;
    if let Some((name, p)) = prediction {
        emit_prediction(out, name, &p);
        if p.crossings != result.sorted_crossings() || p.sigma != result.sigma {
            eprintln!(
                "prediction disagrees with the run: predicted {:?}, realized {:?}",
                p.crossings,
                result.sorted_crossings()
            );
            ok = false;
        }
    }
    Ok(ok)
}

fn cmd_diffmatrix(e: &MinimalEnergy, expect: &str, side: &str, out: &mut String) -> Outcome {
    let text = std::fs::read_to_string(expect)
        .map_err(|err| Failure::Input(format!("cannot read {expect}: {err}")))?;
    let (labels, matrix) = DifferenceMatrix::from_json(&text)?;
    let m = partition::difference_matrix(e, relation_of(side)?);
    if labels != m.labels || matrix.len() != m.entries.len() {
        return Err(Failure::Input(format!(
            "expected matrix has labels {labels:?}, computed {:?}",
            m.labels
        )));
    }
    let mut mismatches = 0;
    for (r, (got, want)) in m.entries.iter().zip(&matrix).enumerate() {
        if got.len() != want.len() {
            return Err(Failure::Input(format!("row {} has the wrong length", labels[r])));
        }
        for (c, (g, w)) in got.iter().zip(want).enumerate() {
            if g != w {
                mismatches += 1;
                writeln!(out, "{}\t{}\t{g}\t{w}", labels[r], labels[c]).unwrap();
            }
        }
    }
    let total = m.entries.len() * m.entries.len();
    writeln!(out, "entries\t{total}\tmismatches\t{mismatches}").unwrap();
    let mut ok = mismatches == 0;
    if *e == MinimalEnergy::overpartition() {
        let n = e.len();
        let parity_ok = (0..n).all(|u| {
            (0..n).all(|l| m.parity[n + u * n + l] == Some(SECONDARY_CLASSES[u][l].odd as i64))
        });
        writeln!(out, "parity\t{}", if parity_ok { "equal" } else { "differ" }).unwrap();
        ok &= parity_ok;
    }
    Ok(ok)
}

fn cmd_verify(v: &VerifyCommand, out: &mut String) -> Outcome {
    match v {
        VerifyCommand::Diffmatrix { energy, expect, side } => {
            cmd_diffmatrix(&load_energy(energy)?, expect, side, out)
        }
        VerifyCommand::Siladic { variant, n_max } => {
            let variant: SiladicVariant = parse(variant)?;
            if *n_max < 1 {
                return Err(Failure::Input("--n-max must be at least 1".into()));
            }
            let r = identities::check_siladic(variant, *n_max);
            out.push_str(&r.to_tsv());
            Ok(r.all_equal())
        }
        VerifyCommand::Bijection {
            energy,
            word,
            n_range,
            bound,
            side,
        } => {
            let e = load_energy(energy)?;
            let word = e.states().parse_word(word)?;
            let bound: BoundSpec = parse(bound)?;
            let r = verify::check_bijection(&e, &word, parse_range(n_range)?, bound, relation_of(side)?, true)?;
            out.push_str(&r.to_tsv());
            for f in &r.failures {
                eprintln!("counterexample: {f}");
            }
            Ok(r.passed())
        }
        VerifyCommand::Series {
            energy,
            q_order,
            x_order,
            rho,
        } => {
            let e = load_energy(energy)?;
            let bound = BoundSpec::Plus(*rho);
            let o = identities::series_from_enumeration(&e, Flavor::O, bound, *q_order, *x_order)?;
            let es = identities::series_from_enumeration(&e, Flavor::E_STANDARD, bound, *q_order, *x_order)?;
            let prod = identities::euler_product(&e, *rho, *q_order, *x_order)?;
            let by_degree = |s: &energy_transfer::TruncatedSeries, n: i64| {
                s.terms()
                    .filter(|(m, _)| m.q == n)
                    .map(|(m, c)| (*m, c.clone()))
                    .collect::<Vec<_>>()
            };
            let mut ok = true;
            for n in 0..=*q_order {
                let (a, b, p) = (by_degree(&o, n), by_degree(&es, n), by_degree(&prod, n));
                let total = |v: &[(energy_transfer::series::Monomial, num_bigint::BigInt)]| {
                    v.iter().map(|(_, c)| c.clone()).sum::<num_bigint::BigInt>()
                };
                let equal = a == b && a == p;
                ok &= equal;
                let tag = if equal { "equal" } else { "differ" };
                writeln!(out, "{n}\t{}\t{}\t{tag}", total(&a), total(&p)).unwrap();
            }
            Ok(ok)
        }
        VerifyCommand::Overpartition { n_max, q_order } => {
            let r = identities::check_overpartition_corollary(*n_max)?;
            out.push_str(&r.to_tsv());
            let tag = |b: bool| if b { "equal" } else { "differ" };
            writeln!(out, "series\t{}", tag(r.series_equal)).unwrap();
            let mut ok = r.passed();
            if *q_order > 0 {
                let (d, o) = identities::check_specializations(*q_order)?;
                writeln!(out, "distinct-odd\t{}", tag(d)).unwrap();
                writeln!(out, "odd\t{}", tag(o)).unwrap();
                ok &= d && o;
            }
            Ok(ok)
        }
        VerifyCommand::Selfcheck { seed, cases } => {
            let r = verify::selfcheck(*seed, *cases);
            for (name, n) in &r.suites {
                let failed = r.failures.iter().any(|f| f.starts_with(&format!("{name}:")));
                writeln!(out, "{name}\t{n}\t{}", if failed { "fail" } else { "pass" }).unwrap();
            }
            for f in &r.failures {
                eprintln!("counterexample: {f}");
            }
            Ok(r.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let mut out = String::new();
    let result = match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, cli.format, exec, &mut out),
        Command::Map(a) => cmd_map(a, cli.format, &mut out),
        Command::Verify(v) => cmd_verify(v, &mut out),
    };
    print!("{out}");
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Unsupported(msg)) => {
            eprintln!("unsupported: {msg}");
            ExitCode::from(3)
        }
    }
}
