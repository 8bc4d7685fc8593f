use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use scissors_core::global::{pbar_cross_check, pbar_order, primes_between, GlobalFieldDesc};
use scissors_core::groups::{compute_group, GroupName, GroupReport};
use scissors_core::ring::RingHandle;
use scissors_core::scissors::RPElem;
use scissors_core::tree::{
    act, amalgam_decompose, ball, ball_size, canonical_vertex, distance, epsilon, standard_decomposition,
    Lattice, Mat2, Side, VertexKey,
};
use scissors_core::valuation::{parse_expr, ValuationContext};
use scissors_core::verify::{self, Check, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "scissors", version, about = "Refined scissors congruence groups, specialization and the SL2 tree")]
struct Cli {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a presented group, e.g. P, B, RP1, RB, GW, I, H3, RP~.
    Group {
        which: String,
        #[arg(long)]
        ring: String,
    },
    /// Run a verification suite against a ring.
    Verify {
        suite: String,
        #[arg(long)]
        ring: String,
    },
    /// Specialize an element of RP(Q) at p.
    Specialize {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        expr: String,
    },
    /// Tree of lattice classes.
    Tree {
        #[command(subcommand)]
        sub: TreeCommand,
    },
    /// Decompose a matrix of SL2(Z[1/p]) as an amalgam word.
    Amalgam {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        matrix: String,
    },
    /// Orders of P-bar(F_p) for F = Q.
    PbarTable {
        #[arg(long, default_value_t = 11)]
        p_min: u64,
        #[arg(long, default_value_t = 97)]
        p_max: u64,
        /// Also recompute each row from the presentation.
        #[arg(long)]
        check: bool,
    },
    /// Run every applicable suite on every ring of size at most max-q.
    VerifyAll {
        #[arg(long, default_value_t = 13)]
        max_q: u64,
    },
    /// Run the ten acceptance criteria.
    Acceptance,
}

#[derive(Subcommand)]
enum TreeCommand {
    /// Ball around a vertex.
    Ball {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        radius: u32,
        /// Center given by a basis matrix `a,b;c,d` (default the standard lattice).
        #[arg(long)]
        center: Option<String>,
        #[arg(long)]
        dot: bool,
    },
    /// Canonical key, parity and standard decomposition of a matrix.
    Vertex {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        matrix: String,
    },
    /// Distance between the classes of two basis matrices.
    Distance {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<String> for Failure {
    fn from(s: String) -> Failure {
        Failure::Usage(s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn ring(desc: &str) -> Result<RingHandle, String> {
    RingHandle::parse(desc).map_err(|e| format!("ring '{desc}': {e}"))
}

fn prime(p: u64) -> Result<u64, String> {
    if scissors_core::ring::is_prime(p) {
        Ok(p)
    } else {
        Err(format!("p = {p} is not prime"))
    }
}

fn matrix(s: &str) -> Result<Mat2, String> {
    Mat2::parse(s).map_err(|e| e.to_string())
}

fn json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serializable")
}

fn table(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => {
            let mut s = header.join(",") + "\n";
            for r in rows {
                let cells: Vec<String> =
                    r.iter().map(|c| if c.contains(',') { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() }).collect();
                s += &(cells.join(",") + "\n");
            }
            s
        }
        _ => {
            let mut s = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
            for r in rows {
                s += &format!("| {} |\n", r.join(" | "));
            }
            s
        }
    }
}

fn emit_checks(format: Format, checks: &[Check]) -> Result<(), Failure> {
    match format {
        Format::Json => println!("{}", json(&checks)),
        f => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| vec![c.name.clone(), if c.passed { "PASS" } else { "FAIL" }.into(), c.detail.clone()])
                .collect();
            print!("{}", table(f, &["check", "result", "detail"], &rows));
        }
    }
    if verify::all_passed(checks) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Group { which, ring: desc } => {
            let which: GroupName = which.parse()?;
            let r = ring(desc)?;
            let g = compute_group(which, &r)?;
            let rep = GroupReport::new(&r, which, &g)?;
            match cli.format {
                Format::Json => println!("{}", json(&rep)),
                f => {
                    let row = vec![
                        rep.ring.clone(),
                        rep.group.clone(),
                        rep.structure.clone(),
                        format!("{:?}", rep.odd_part),
                    ];
                    print!("{}", table(f, &["ring", "group", "structure", "odd part"], &[row]));
                }
            }
            Ok(())
        }
        Command::Verify { suite, ring: desc } => {
            let checks = verify::run_suite(suite, desc, cli.seed)?;
            emit_checks(cli.format, &checks)
        }
        Command::Specialize { p, expr } => specialize(cli.format, *p, expr),
        Command::Tree { sub } => tree(cli.format, sub),
        Command::Amalgam { p, matrix: m } => amalgam(cli.format, *p, m),
        Command::PbarTable { p_min, p_max, check } => pbar_table(cli.format, *p_min, *p_max, *check),
        Command::VerifyAll { max_q } => {
            let jobs: Vec<(String, &str)> = verify::verify_all_rings(*max_q)
                .into_iter()
                .flat_map(|d| {
                    let r = RingHandle::parse(&d).expect("generated descriptor");
                    verify::suites_for(&r).into_iter().map(move |s| (d.clone(), s))
                })
                .collect();
            let results: Vec<Vec<Check>> = jobs
                .par_iter()
                .map(|(d, s)| verify::run_suite(s, d, cli.seed).unwrap_or_else(|e| vec![Check::new(format!("{s} {d}"), false, e)]))
                .collect();
            emit_checks(cli.format, &results.concat())
        }
        Command::Acceptance => {
            let checks: Vec<Check> = verify::acceptance(cli.seed)
                .into_iter()
                .enumerate()
                .map(|(i, mut c)| {
                    c.name = format!("criterion {}: {}", i + 1, c.name);
                    c
                })
                .collect();
            emit_checks(cli.format, &checks)
        }
    }
}

fn format_rp(r: &RingHandle, x: &RPElem) -> String {
    let sq = r.square_classes();
    let terms: Vec<String> = x
        .terms()
        .map(|((g, a), n)| {
            let class = if *g == 0 { String::new() } else { format!("<{}>", r.format(sq.rep(*g))) };
            format!("{n}*{class}[{}]", r.format(*a))
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[derive(Serialize)]
struct SpecializeReport {
    p: u64,
    expr: String,
    rho0: String,
    rho_pi: String,
    rho0_coords: Vec<String>,
    rho_pi_coords: Vec<String>,
    target: String,
    rho0_zero: bool,
    rho_pi_zero: bool,
}

fn specialize(format: Format, p: u64, expr: &str) -> Result<(), Failure> {
    let x = parse_expr(expr).map_err(|e| format!("expression '{expr}': {e}"))?;
    let v = ValuationContext::new(prime(p)?).map_err(|e| e.to_string())?;
    let s = v.s_v(&x).map_err(|e| format!("expression '{expr}': {e}"))?;
    let r = v.residue().ring().clone();
    let strs = |c: Vec<num_bigint::BigInt>| c.iter().map(|d| d.to_string()).collect::<Vec<_>>();
    let rep = SpecializeReport {
        p,
        expr: expr.to_string(),
        rho0: format_rp(&r, &s.rho0),
        rho_pi: format_rp(&r, &s.rho_pi),
        rho0_coords: strs(v.rp_coords(&s.rho0)),
        rho_pi_coords: strs(v.rp_coords(&s.rho_pi)),
        target: v.rp_tilde().structure(),
        rho0_zero: v.rp_is_zero(&s.rho0),
        rho_pi_zero: v.rp_is_zero(&s.rho_pi),
    };
    match format {
        Format::Json => println!("{}", json(&rep)),
        f => {
            let rows = vec![
                vec!["rho_0 (delta_0)".into(), rep.rho0.clone(), format!("{:?}", rep.rho0_coords), rep.rho0_zero.to_string()],
                vec!["rho_pi (delta_pi)".into(), rep.rho_pi.clone(), format!("{:?}", rep.rho_pi_coords), rep.rho_pi_zero.to_string()],
            ];
            println!("S_v({expr}) at p = {p}, target RP~(F_{p}) = {}", rep.target);
            print!("{}", table(f, &["component", "element", "coordinates", "zero"], &rows));
        }
    }
    Ok(())
}

fn tree(format: Format, sub: &TreeCommand) -> Result<(), Failure> {
    match sub {
        TreeCommand::Ball { p, radius, center, dot } => {
            let p = prime(*p)?;
            let c = match center {
                Some(m) => canonical_vertex(&Lattice { basis: matrix(m)? }, p).map_err(|e| e.to_string())?,
                None => VertexKey::lambda0(),
            };
            let b = ball(&c, *radius, p);
            if *dot {
                print!("{}", b.to_dot());
                return Ok(());
            }
            let want = ball_size(p, *radius);
            let checks = vec![
                Check::new("vertices", b.vertices.len() as u64 == want, format!("{} (expected {want})", b.vertices.len())),
                Check::new("edges", b.edges.len() + 1 == b.vertices.len(), b.edges.len().to_string()),
                Check::new("cycles", b.cycles() == 0, b.cycles().to_string()),
            ];
            emit_checks(format, &checks)
        }
        TreeCommand::Vertex { p, matrix: m } => {
            let p = prime(*p)?;
            let g = matrix(m)?;
            let key = canonical_vertex(&Lattice { basis: g.clone() }, p).map_err(|e| e.to_string())?;
            let eps = epsilon(&g, p).map_err(|e| e.to_string())?;
            let d = standard_decomposition(&g, p).map_err(|e| e.to_string())?;
            let l0 = VertexKey::lambda0();
            let image = act(&g, &l0, p).map_err(|e| e.to_string())?;
            let rows = vec![
                vec!["key".into(), key.to_string()],
                vec!["epsilon".into(), eps.to_string()],
                vec!["g.L0".into(), image.to_string()],
                vec!["d(L0, g.L0)".into(), distance(&l0, &image, p).to_string()],
                vec!["s".into(), d.s.to_string()],
                vec!["R".into(), d.r.to_string()],
                vec!["u".into(), d.u.to_string()],
                vec!["product check".into(), (d.product(p) == g).to_string()],
            ];
            if format == Format::Json {
                let obj: serde_json::Map<String, serde_json::Value> =
                    rows.into_iter().map(|r| (r[0].clone(), serde_json::Value::String(r[1].clone()))).collect();
                println!("{}", json(&obj));
            } else {
                print!("{}", table(format, &["field", "value"], &rows));
            }
            Ok(())
        }
        TreeCommand::Distance { p, from, to } => {
            let p = prime(*p)?;
            let a = canonical_vertex(&Lattice { basis: matrix(from)? }, p).map_err(|e| e.to_string())?;
            let b = canonical_vertex(&Lattice { basis: matrix(to)? }, p).map_err(|e| e.to_string())?;
            println!("{}", distance(&a, &b, p));
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct AmalgamReport {
    p: u64,
    matrix: String,
    factors: Vec<(String, String)>,
    length: usize,
    distance: u64,
    product_ok: bool,
    alternating: bool,
    members_ok: bool,
}

fn amalgam(format: Format, p: u64, m: &str) -> Result<(), Failure> {
    let p = prime(p)?;
    let g = matrix(m)?;
    let w = amalgam_decompose(&g, p).map_err(|e| format!("matrix '{m}': {e}"))?;
    let l0 = VertexKey::lambda0();
    let rep = AmalgamReport {
        p,
        matrix: g.to_string(),
        factors: w
            .factors
            .iter()
            .map(|(f, s)| (if *s == Side::G0 { "G0" } else { "G1" }.to_string(), f.to_string()))
            .collect(),
        length: w.len(),
        distance: distance(&l0, &act(&g, &l0, p).expect("nonsingular"), p),
        product_ok: w.product() == g,
        alternating: w.alternates(),
        members_ok: w.members_ok(p),
    };
    let ok = rep.product_ok && rep.alternating && rep.members_ok;
    match format {
        Format::Json => println!("{}", json(&rep)),
        f => {
            let rows: Vec<Vec<String>> =
                rep.factors.iter().enumerate().map(|(i, (s, x))| vec![(i + 1).to_string(), s.clone(), x.clone()]).collect();
            print!("{}", table(f, &["#", "side", "factor"], &rows));
            println!(
                "length {} (d(L0, g.L0) = {}), product check {}",
                rep.length,
                rep.distance,
                if ok { "OK" } else { "FAILED" }
            );
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

#[derive(Serialize)]
struct PbarRow {
    #[serde(flatten)]
    report: scissors_core::global::PBarReport,
    computed: Option<bool>,
}

fn pbar_table(format: Format, p_min: u64, p_max: u64, check: bool) -> Result<(), Failure> {
    let primes = primes_between(p_min.max(11), p_max);
    if primes.is_empty() {
        return Err(Failure::Usage(format!("no primes p >= 11 in [{p_min}, {p_max}]")));
    }
    let q = GlobalFieldDesc::rationals();
    let rows: Vec<PbarRow> = primes
        .par_iter()
        .map(|&p| PbarRow {
            report: pbar_order(&q, p).expect("prime >= 11"),
            computed: check.then(|| pbar_cross_check(p).map(|c| c.ok).unwrap_or(false)),
        })
        .collect();
    let ok = rows.iter().all(|r| r.report.consistent() && r.computed != Some(false));
    match format {
        Format::Json => println!("{}", json(&rows)),
        f => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let b = &r.report;
                    vec![
                        b.p.to_string(),
                        b.p_plus_one_odd.to_string(),
                        b.killed.to_string(),
                        b.pbar_odd_order.to_string(),
                        if b.three_divides { "3 | p+1" } else { "3 ∤ p+1" }.to_string(),
                        r.computed.map_or("-".into(), |c| c.to_string()),
                    ]
                })
                .collect();
            print!("{}", table(f, &["p", "(p+1)'", "killed", "pbar odd order", "branch", "computed"], &cells));
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
