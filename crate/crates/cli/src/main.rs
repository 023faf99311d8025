use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use exchkit_core::dfpe::{
    dfpe_extendible, extendibility_frontier, DfpeDistribution, DfpeOrder,
};
use exchkit_core::markov::{
    self, me_extendible, me_infinite_necessary, me_mixed_moments, MatrixKind, MeDistribution,
};
use exchkit_core::polytope::MembershipCertificate;
use exchkit_core::rational::Rational;

use exchkit::format::{read_input, write_output, ParsedInput};
use exchkit::volume::{self, VolumeEstimate};

#[derive(Parser)]
#[command(
    name = "exchkit",
    version,
    about = "Exact extendibility analysis of partially and Markov exchangeable binary sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a distribution file between parameterizations.
    Transform {
        /// Input file, or "-" for stdin.
        input: String,
        /// Target representation: weights | moments | covariances (dfpe),
        /// weights | gamma (me).
        #[arg(long)]
        to: String,
        /// Output file, or "-" for stdout.
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Decide r-extendibility, optionally searching for the exact frontier.
    Extend {
        input: String,
        /// Target order: "r1,r2,..." for dfpe, a single length for me.
        /// Repeatable.
        #[arg(long = "r")]
        targets: Vec<String>,
        /// Search for the maximal extendible orders instead.
        #[arg(long)]
        frontier: bool,
        /// Search bound for --frontier, same syntax as --r.
        #[arg(long = "max-r")]
        max_r: Option<String>,
        /// Emit a JSON report instead of human text.
        #[arg(long)]
        json: bool,
    },
    /// Estimate extendible-volume ratios over a grid, as CSV.
    Volume {
        #[arg(long)]
        kind: String,
        /// Source: length or "a..b" range for me; "n1,n2,..." order for dfpe.
        #[arg(long)]
        n: String,
        /// Targets: length or "a..b" range for me; ";"-separated orders for dfpe.
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (EXCHKIT_WORKERS overrides; default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Margin below which the float LP optimum counts as zero.
        #[arg(long, default_value_t = volume::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// List the transition-count matrices of length-n sequences from 0.
    Enumerate {
        #[arg(long)]
        n: u32,
        /// Include Whittle class sizes and their total.
        #[arg(long)]
        counts: bool,
    },
    /// Report the necessary conditions for infinite extendibility.
    CheckInfinite { input: String },
}

#[derive(Debug)]
enum CliError {
    /// Exit code 2: bad input or arguments.
    Validation(String),
    /// Exit code 3: a frontier search hit its bound unresolved.
    BoundTooSmall(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::BoundTooSmall(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::BoundTooSmall(m) => m,
        }
    }
}

fn validation(e: impl ToString) -> CliError {
    CliError::Validation(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Transform { input, to, output } => cmd_transform(&input, &to, &output),
        Command::Extend {
            input,
            targets,
            frontier,
            max_r,
            json,
        } => cmd_extend(&input, &targets, frontier, max_r.as_deref(), json),
        Command::Volume {
            kind,
            n,
            r,
            samples,
            seed,
            workers,
            epsilon,
            output,
        } => cmd_volume(&kind, &n, &r, samples, seed, workers, epsilon, &output),
        Command::Enumerate { n, counts } => cmd_enumerate(n, counts),
        Command::CheckInfinite { input } => cmd_check_infinite(&input),
    }
}

fn cmd_transform(input: &str, to: &str, output: &str) -> Result<(), CliError> {
    let parsed = read_input(input).map_err(validation)?;
    let result = match (parsed, to) {
        (ParsedInput::DfpeWeights(d), "weights") => ParsedInput::DfpeWeights(d),
        (ParsedInput::DfpeWeights(d), "moments") => ParsedInput::DfpeMoments(d.moments()),
        (ParsedInput::DfpeWeights(d), "covariances") => {
            ParsedInput::DfpeCovariances(d.moments().to_covariances())
        }
        (ParsedInput::DfpeMoments(m), "weights") => {
            ParsedInput::DfpeWeights(m.to_weights().map_err(validation)?)
        }
        (ParsedInput::DfpeMoments(m), "moments") => ParsedInput::DfpeMoments(m),
        (ParsedInput::DfpeMoments(m), "covariances") => {
            ParsedInput::DfpeCovariances(m.to_covariances())
        }
        (ParsedInput::DfpeCovariances(c), "weights") => {
            ParsedInput::DfpeWeights(c.to_moments().to_weights().map_err(validation)?)
        }
        (ParsedInput::DfpeCovariances(c), "moments") => ParsedInput::DfpeMoments(c.to_moments()),
        (ParsedInput::DfpeCovariances(c), "covariances") => ParsedInput::DfpeCovariances(c),
        (ParsedInput::MeWeights(d), "weights") => ParsedInput::MeWeights(d),
        (ParsedInput::MeWeights(d), "gamma") => ParsedInput::MeGamma(d.gamma()),
        (ParsedInput::MeGamma(g), "gamma") => ParsedInput::MeGamma(g),
        (ParsedInput::MeGamma(g), "weights") => {
            ParsedInput::MeWeights(g.to_weights().map_err(validation)?)
        }
        (_, other) => {
            return Err(CliError::Validation(format!(
                "cannot transform this input to {other:?}"
            )))
        }
    };
    write_output(output, &result).map_err(validation)
}

fn format_dfpe_order(o: &DfpeOrder) -> String {
    let parts: Vec<String> = o.groups().iter().map(|g| g.to_string()).collect();
    format!("({})", parts.join(","))
}

fn parse_dfpe_target(s: &str) -> Result<DfpeOrder, CliError> {
    let parts: Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse()).collect();
    let parts = parts.map_err(|_| CliError::Validation(format!("bad order {s:?}")))?;
    DfpeOrder::new(parts).map_err(validation)
}

fn certificate_json(cert: &MembershipCertificate) -> serde_json::Value {
    match cert {
        MembershipCertificate::Inside => serde_json::Value::Null,
        MembershipCertificate::Outside { z, z0 } => serde_json::json!({
            "z": z.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "z0": z0.to_string(),
        }),
    }
}

fn print_verdict(polytope: &str, cert: &MembershipCertificate) {
    match cert {
        MembershipCertificate::Inside => println!("Inside {polytope}"),
        MembershipCertificate::Outside { z, z0 } => {
            let zs: Vec<String> = z.iter().map(|x| x.to_string()).collect();
            println!(
                "Outside {polytope}: separating hyperplane z = [{}], z0 = {}",
                zs.join(", "),
                z0
            );
        }
    }
}

fn cmd_extend(
    input: &str,
    targets: &[String],
    frontier: bool,
    max_r: Option<&str>,
    json: bool,
) -> Result<(), CliError> {
    let parsed = read_input(input).map_err(validation)?;
    let mut report = serde_json::json!({ "verdicts": [] });

    match parsed {
        ParsedInput::DfpeWeights(_) | ParsedInput::DfpeMoments(_) | ParsedInput::DfpeCovariances(_) => {
            let d = as_dfpe_distribution(parsed)?;
            let n_str = format_dfpe_order(d.order());
            for t in targets {
                let r = parse_dfpe_target(t)?;
                let cert = dfpe_extendible(&d, &r).map_err(validation)?;
                let polytope = format!("Lambda^{n_str}_{}", format_dfpe_order(&r));
                if !json {
                    print_verdict(&polytope, &cert);
                }
                report["verdicts"].as_array_mut().unwrap().push(serde_json::json!({
                    "r": r.groups(),
                    "polytope": polytope,
                    "inside": cert.is_inside(),
                    "certificate": certificate_json(&cert),
                }));
            }
            if frontier {
                let bound = parse_dfpe_target(max_r.ok_or_else(|| {
                    CliError::Validation("--frontier needs --max-r".into())
                })?)?;
                let fr = extendibility_frontier(&d, &bound).map_err(validation)?;
                report["frontier"] = serde_json::json!({
                    "confirmed": fr.confirmed.iter().map(|o| o.groups().to_vec()).collect::<Vec<_>>(),
                    "unresolved": fr.unresolved.iter().map(|o| o.groups().to_vec()).collect::<Vec<_>>(),
                });
                if json {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                }
                for o in &fr.confirmed {
                    if !json {
                        println!("exactly {}-extendible", format_dfpe_order(o));
                    }
                }
                if fr.bound_too_small() {
                    let list: Vec<String> =
                        fr.unresolved.iter().map(format_dfpe_order).collect();
                    return Err(CliError::BoundTooSmall(format!(
                        "BoundTooSmall: still extendible at the search bound near {}",
                        list.join(", ")
                    )));
                }
                return Ok(());
            }
        }
        ParsedInput::MeWeights(_) | ParsedInput::MeGamma(_) => {
            let d = as_me_distribution(parsed)?;
            let n = d.len();
            for t in targets {
                let r: u32 = t
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Validation(format!("bad length {t:?}")))?;
                let cert = me_extendible(&d, r).map_err(validation)?;
                let polytope = format!("Gamma^({n})_{r}");
                if !json {
                    print_verdict(&polytope, &cert);
                }
                report["verdicts"].as_array_mut().unwrap().push(serde_json::json!({
                    "r": r,
                    "polytope": polytope,
                    "inside": cert.is_inside(),
                    "certificate": certificate_json(&cert),
                }));
            }
            if frontier {
                let bound: u32 = max_r
                    .ok_or_else(|| CliError::Validation("--frontier needs --max-r".into()))?
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Validation("bad --max-r".into()))?;
                let mut last_inside = n;
                let mut unresolved = true;
                for r in (n + 1)..=bound {
                    if me_extendible(&d, r).map_err(validation)?.is_inside() {
                        last_inside = r;
                    } else {
                        unresolved = false;
                        break;
                    }
                }
                report["frontier"] = serde_json::json!({
                    "confirmed": if unresolved { Vec::new() } else { vec![last_inside] },
                    "unresolved": if unresolved { vec![last_inside.max(bound)] } else { Vec::new() },
                });
                if json {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                }
                if unresolved {
                    return Err(CliError::BoundTooSmall(format!(
                        "BoundTooSmall: still extendible at the search bound {bound}"
                    )));
                }
                if !json {
                    println!("exactly {last_inside}-extendible");
                }
                return Ok(());
            }
        }
        ParsedInput::MeMixed(_) => {
            return Err(CliError::Validation(
                "extend needs a distribution, not me-mixed data".into(),
            ))
        }
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    Ok(())
}

fn as_dfpe_distribution(parsed: ParsedInput) -> Result<DfpeDistribution, CliError> {
    match parsed {
        ParsedInput::DfpeWeights(d) => Ok(d),
        ParsedInput::DfpeMoments(m) => m.to_weights().map_err(validation),
        ParsedInput::DfpeCovariances(c) => c.to_moments().to_weights().map_err(validation),
        _ => Err(CliError::Validation("expected a dfpe input".into())),
    }
}

fn as_me_distribution(parsed: ParsedInput) -> Result<MeDistribution, CliError> {
    match parsed {
        ParsedInput::MeWeights(d) => Ok(d),
        ParsedInput::MeGamma(g) => g.to_weights().map_err(validation),
        _ => Err(CliError::Validation("expected an me input".into())),
    }
}

/// "4" -> 4..=4, "5..10" -> 5..=10 (inclusive).
fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Validation(format!("bad range {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a, b))
    } else {
        let v = s.trim().parse().map_err(|_| bad())?;
        Ok((v, v))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_volume(
    kind: &str,
    n: &str,
    r: &str,
    samples: u64,
    seed: u64,
    workers: Option<usize>,
    epsilon: f64,
    output: &str,
) -> Result<(), CliError> {
    if samples < 1 {
        return Err(CliError::Validation("--samples must be >= 1".into()));
    }
    let workers = match std::env::var("EXCHKIT_WORKERS") {
        Ok(v) => v
            .parse()
            .ok()
            .filter(|&w| w >= 1)
            .ok_or_else(|| CliError::Validation("bad EXCHKIT_WORKERS".into()))?,
        Err(_) => workers.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |p| p.get())
        }),
    };

    let mut csv = String::from("n,r,ratio,std_error,samples,seed\n");
    let mut push_row = |n_label: &str, r_label: &str, est: &VolumeEstimate| {
        writeln!(
            csv,
            "{},{},{:.6},{:.6},{},{}",
            n_label, r_label, est.ratio, est.std_error, est.samples, est.seed
        )
        .unwrap();
    };

    match kind {
        "me" => {
            let (n_lo, n_hi) = parse_range(n)?;
            let (r_lo, r_hi) = parse_range(r)?;
            if n_lo < 2 {
                return Err(CliError::Validation("me lengths start at 2".into()));
            }
            for nn in n_lo..=n_hi {
                for rr in r_lo.max(nn)..=r_hi {
                    let est = volume::volume_ratio_me(nn, rr, samples, seed, workers, epsilon)
                        .map_err(validation)?;
                    push_row(&nn.to_string(), &rr.to_string(), &est);
                }
            }
        }
        "dfpe" => {
            let order = parse_dfpe_target(n)?;
            for target in r.split(';') {
                let rr = parse_dfpe_target(target)?;
                let est =
                    volume::volume_ratio_dfpe(&order, &rr, samples, seed, workers, epsilon)
                        .map_err(validation)?;
                // 'x'-separated labels keep the CSV free of quoting
                let n_label: Vec<String> =
                    order.groups().iter().map(|g| g.to_string()).collect();
                let r_label: Vec<String> =
                    rr.groups().iter().map(|g| g.to_string()).collect();
                push_row(&n_label.join("x"), &r_label.join("x"), &est);
            }
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown kind {other:?} (expected me or dfpe)"
            )))
        }
    }

    if output == "-" {
        std::io::stdout().write_all(csv.as_bytes()).map_err(validation)
    } else {
        fs::write(output, csv).map_err(validation)
    }
}

fn cmd_enumerate(n: u32, counts: bool) -> Result<(), CliError> {
    if n < 1 {
        return Err(CliError::Validation("--n must be >= 1".into()));
    }
    let (first, second) = markov::enumerate_phi(n);
    let mut total = num_bigint::BigInt::from(0);
    for m in first.iter().chain(&second) {
        let kind = match m.kind() {
            MatrixKind::First => 1,
            MatrixKind::Second => 2,
        };
        let c = m.counts();
        let mut line = format!(
            "[[{},{}],[{},{}]]  kind={}  end={}",
            c[0][0], c[0][1], c[1][0], c[1][1], kind, m.ending_state()
        );
        if counts {
            let w = markov::whittle_count(m);
            write!(line, "  count={w}").unwrap();
            total += w;
        }
        println!("{line}");
    }
    let size = first.len() + second.len();
    println!("total {size} = 1 + C({n},2)");
    if counts {
        println!("counts sum to 2^{} = {total}", n - 1);
    }
    Ok(())
}

fn format_cov_matrix(m: &[Vec<Rational>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn det2(m: &[Vec<Rational>]) -> Option<Rational> {
    if m.len() == 2 {
        Some(&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0])
    } else {
        None
    }
}

fn cmd_check_infinite(input: &str) -> Result<(), CliError> {
    let parsed = read_input(input).map_err(validation)?;
    println!("necessary conditions only: passing proves nothing about infinite extendibility");
    match parsed {
        ParsedInput::DfpeWeights(_) | ParsedInput::DfpeMoments(_) | ParsedInput::DfpeCovariances(_) => {
            let cov = match parsed {
                ParsedInput::DfpeCovariances(c) => c,
                ParsedInput::DfpeWeights(d) => d.moments().to_covariances(),
                ParsedInput::DfpeMoments(m) => m.to_covariances(),
                _ => unreachable!(),
            };
            report_conditions(
                &cov.check_infinite_necessary().even_cov_violations
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>(),
                cov.check_infinite_necessary().psd,
                &cov.check_infinite_necessary().cov_matrix,
            );
        }
        ParsedInput::MeMixed(mix) => {
            let moments = me_mixed_moments(&mix).map_err(validation)?;
            let rep = me_infinite_necessary(&moments);
            report_conditions(
                &rep.even_violations
                    .iter()
                    .map(|(a, b)| format!("({a},{b})"))
                    .collect::<Vec<_>>(),
                rep.psd,
                &rep.cov_matrix,
            );
        }
        ParsedInput::MeWeights(_) | ParsedInput::MeGamma(_) => {
            return Err(CliError::Validation(
                "the me check needs kind \"me-mixed\" with both start-state blocks".into(),
            ))
        }
    }
    Ok(())
}

fn report_conditions(even_violations: &[String], psd: bool, cov_matrix: &[Vec<Rational>]) {
    if even_violations.is_empty() {
        println!("even covariances: PASS");
    } else {
        println!("even covariances: FAIL at {}", even_violations.join(", "));
    }
    let det = det2(cov_matrix);
    if psd {
        println!("PSD: PASS");
    } else if let Some(det) = det {
        println!("PSD: FAIL (det = {det})");
    } else {
        println!("PSD: FAIL");
    }
    println!("covariance matrix: {}", format_cov_matrix(cov_matrix));
    if !psd {
        println!("verdict: not infinitely extendible");
    }
}
