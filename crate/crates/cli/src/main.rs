//! `steiner`: construct, verify, plan and count Steiner quadruple systems.
//!
//! Exit codes: 0 success, 1 invalid object, 2 usage, 3 unreachable order,
//! 4 search timeout. Diagnostics go to standard error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use steiner_core::bbd::bbd_block_count;
use steiner_core::census::{count_bbd, count_quasigroups3, count_sqs, Order};
use steiner_core::io::{self, FileKind};
use steiner_core::planner::{execute, execute_holes, plan, ExecOptions, PlannerOptions};
use steiner_core::search::DEFAULT_SEARCH_BUDGET;
use steiner_core::sqs::PartCounts;
use steiner_core::verify::{verify_bbd, verify_design_with, verify_mds, CoverageOptions, CoverageReport};
use steiner_core::{model::binomial, sqs_block_count, Design, Error, Kind};

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNREACHABLE: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser)]
#[command(name = "steiner", version, about = "Steiner quadruple systems: construct, verify, plan, count")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignKind {
    Sqs,
    S46,
}

impl From<DesignKind> for Kind {
    fn from(k: DesignKind) -> Kind {
        match k {
            DesignKind::Sqs => Kind::Sqs,
            DesignKind::S46 => Kind::S46,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Object {
    Sqs,
    Quasigroup3,
    Bbd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a design by the cheapest derivation plan and write it to a file.
    Construct {
        kind: DesignKind,
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Assemble 8n+2 without its four hole systems; also writes `<out>.holes`.
        #[arg(long)]
        holes: bool,
        /// Design files usable as plan leaves.
        #[arg(long)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Step budget per search run.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
    /// Check a design, bipartite design, MDS code, Latin square or 1-factorization file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Print the derivation plan for an order.
    Plan {
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value = "sqs")]
        kind: DesignKind,
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Exhaustive labeled count at a tiny order.
    Count {
        #[arg(long)]
        object: Object,
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Compare block counts in a file with their closed forms.
    Stats { file: PathBuf },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unreachable { .. } => EXIT_UNREACHABLE,
            Error::SearchTimeout { .. } => EXIT_TIMEOUT,
            Error::Inadmissible { .. } | Error::BadParams(_) | Error::Io(_) | Error::PreconditionFailure(_) => {
                EXIT_USAGE
            }
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Construct {
            kind,
            order,
            seed,
            holes,
            input,
            out,
            threads,
            budget,
        } => construct(kind.into(), order, seed, holes, &input, &out, threads, budget),
        Cmd::Verify { file, threads } => verify(&file, threads),
        Cmd::Plan { order, kind, input } => plan_cmd(order, kind.into(), &input),
        Cmd::Count { object, order, threads } => count(object, order, threads),
        Cmd::Stats { file } => stats(&file),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.msg.is_empty() {
                eprintln!("error: {}", f.msg);
            }
            ExitCode::from(f.code)
        }
    }
}

fn planner_options(inputs: &[PathBuf]) -> Result<PlannerOptions, Failure> {
    let mut files = BTreeMap::new();
    for p in inputs {
        let d = io::load_design(p)?;
        files.insert((d.kind(), d.v()), p.clone());
    }
    Ok(PlannerOptions {
        search_cap: None,
        files,
    })
}

#[allow(clippy::too_many_arguments)]
fn construct(
    kind: Kind,
    order: u32,
    seed: u64,
    holes: bool,
    inputs: &[PathBuf],
    out: &Path,
    threads: usize,
    budget: u64,
) -> CmdResult {
    let eo = ExecOptions {
        search_budget: budget,
        coverage: CoverageOptions::with_threads(threads),
    };
    if holes {
        if kind != Kind::Sqs {
            return Err(Failure {
                code: EXIT_USAGE,
                msg: "--holes applies to sqs only".into(),
            });
        }
        let t3 = execute_holes(order, seed, &eo)?;
        io::save_design(out, &t3.design)?;
        let sidecar = PathBuf::from(format!("{}.holes", out.display()));
        io::write_string(&sidecar, &io::write_holes(&t3.holes))?;
        println!(
            "partial v={} blocks={} holes={} -> {}",
            t3.design.v(),
            t3.design.len(),
            t3.holes.len(),
            out.display()
        );
        return Ok(());
    }
    let opts = planner_options(inputs)?;
    let p = plan(order, kind, &opts)?;
    let d = execute(&p, seed, &eo)?;
    let r = verify_design_with(&d, &eo.coverage)?;
    if !r.is_exact() {
        return Err(Failure {
            code: EXIT_INVALID,
            msg: format!("constructed design fails: {}", fail_line(&r)),
        });
    }
    io::save_design(out, &d)?;
    println!("{} v={} blocks={} -> {}", d.kind(), d.v(), d.len(), out.display());
    Ok(())
}

fn fmt_triples(ts: &[[u32; 3]]) -> String {
    let parts: Vec<String> = ts.iter().map(|[a, b, c]| format!("{{{a},{b},{c}}}")).collect();
    parts.join(";")
}

fn fail_line(r: &CoverageReport) -> String {
    let mut w = r.multi_witnesses.clone();
    w.extend(&r.uncovered_witnesses);
    w.truncate(steiner_core::verify::WITNESS_LIMIT);
    format!("coverage(uncovered={},multi={}) witnesses={}", r.uncovered, r.multi, fmt_triples(&w))
}

fn report(ok: bool, ok_line: String, fail: String) -> CmdResult {
    if ok {
        println!("OK {ok_line}");
        Ok(())
    } else {
        println!("FAIL {fail}");
        Err(Failure {
            code: EXIT_INVALID,
            msg: String::new(),
        })
    }
}

fn malformed(reason: &str, e: Error) -> CmdResult {
    let w = match &e {
        Error::MalformedBlock { block, .. } => format!("{block:?}"),
        Error::Parse { line, .. } => format!("line:{line}"),
        _ => String::new(),
    };
    println!("FAIL {reason} witnesses={w}");
    Err(Failure {
        code: EXIT_INVALID,
        msg: e.to_string(),
    })
}

fn verify(path: &Path, threads: usize) -> CmdResult {
    let text = io::read_to_string(path)?;
    let fk = match io::detect(&text) {
        Ok(k) => k,
        Err(e) => return malformed("unknown-format", e),
    };
    match fk {
        FileKind::Design => {
            let d = match io::read_design(&text) {
                Ok(d) => d,
                Err(e) => return malformed("malformed", e),
            };
            let r = verify_design_with(&d, &CoverageOptions::with_threads(threads))?;
            let ok = match d.kind() {
                Kind::Partial => r.is_packing(),
                _ => r.is_exact(),
            };
            report(ok, format!("{} v={} blocks={}", d.kind(), d.v(), d.len()), fail_line(&r))
        }
        FileKind::Bbd => {
            let b = match io::read_bbd(&text) {
                Ok(b) => b,
                Err(e) => return malformed("malformed", e),
            };
            let c = verify_bbd(&b)?;
            report(c.valid, format!("bbd v={} blocks={}", 2 * b.m(), b.len()), fail_line(&c.report))
        }
        FileKind::Mds => {
            let c = match io::read_mds(&text) {
                Ok(c) => c,
                Err(e) => return malformed("malformed", e),
            };
            let chk = verify_mds(&c)?;
            let w = chk
                .witness
                .as_ref()
                .map(steiner_core::mds::describe_witness)
                .unwrap_or_default();
            report(
                chk.valid,
                format!("mds d={} q={} dist={} words={}", c.d(), c.q(), c.dist(), c.len()),
                format!("not-mds witnesses={w}"),
            )
        }
        FileKind::Latin => match io::read_latin(&text) {
            Ok(l) => report(true, format!("latin q={}", l.order()), String::new()),
            Err(e) => malformed("not-latin", e),
        },
        FileKind::OneFact => match io::read_onefact(&text) {
            Ok(f) => report(true, format!("onefact m={} factors={}", f.order(), f.factors().len()), String::new()),
            Err(e) => malformed("not-one-factorization", e),
        },
        FileKind::Holes => match io::read_holes(&text) {
            Ok(h) => report(true, format!("holes count={}", h.len()), String::new()),
            Err(e) => malformed("malformed", e),
        },
    }
}

fn plan_cmd(order: u32, kind: Kind, inputs: &[PathBuf]) -> CmdResult {
    let opts = planner_options(inputs)?;
    match plan(order, kind, &opts) {
        Ok(p) => {
            print!("{p}");
            if p.is_search_rooted() {
                let missing = steiner_core::planner::missing_rules(order, kind);
                return Err(Failure {
                    code: EXIT_UNREACHABLE,
                    msg: format!(
                        "{kind}({order}) is not produced by any construction rule (search only); missing rules: {}",
                        if missing.is_empty() { "none".to_string() } else { missing.join(", ") }
                    ),
                });
            }
            let s = p.root.search_orders();
            if !s.is_empty() {
                let list: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                println!("search-only leaves: {}", list.join(", "));
            }
            Ok(())
        }
        Err(Error::Unreachable { v, missing }) => {
            println!("unreachable {kind}({v})");
            for m in &missing {
                println!("missing rule: {m}");
            }
            Err(Failure {
                code: EXIT_UNREACHABLE,
                msg: format!("{kind}({v}) unreachable; missing rules: {}", missing.join(", ")),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn count(object: Object, order: u32, threads: usize) -> CmdResult {
    let f = |o: Order| match object {
        Object::Sqs => count_sqs(order, o, threads),
        Object::Quasigroup3 => count_quasigroups3(order, o, threads),
        Object::Bbd => count_bbd(order, o, threads),
    };
    let (a, b) = (f(Order::Forward)?, f(Order::Reverse)?);
    let name = match object {
        Object::Sqs => "sqs",
        Object::Quasigroup3 => "quasigroup3",
        Object::Bbd => "bbd",
    };
    if a != b {
        return Err(Failure {
            code: EXIT_INVALID,
            msg: format!("orderings disagree: {a} vs {b}"),
        });
    }
    println!("{name} order={order} count={a}");
    Ok(())
}

fn line(label: &str, found: u64, expected: u64) -> bool {
    let ok = found == expected;
    println!("{label}: {found} (formula {expected}) {}", if ok { "match" } else { "MISMATCH" });
    ok
}

fn design_stats(d: &Design) -> bool {
    let v = d.v() as u64;
    println!("kind={} v={}", d.kind(), v);
    let incidences: u64 = d.blocks().iter().map(|b| binomial(b.len() as u64, 3)).sum();
    match d.kind() {
        Kind::Sqs => {
            let blocks = line("blocks", d.len() as u64, sqs_block_count(v).unwrap_or(0));
            line("triple incidences", incidences, binomial(v, 3)) && blocks
        }
        Kind::S46 => line("triple incidences", incidences, binomial(v, 3)),
        Kind::Partial => {
            println!("blocks: {}", d.len());
            println!("triple incidences: {incidences} of {}", binomial(v, 3));
            if v >= 18 && v % 8 == 2 {
                let n = (v - 2) / 8;
                let e = PartCounts::expected(n, false);
                println!(
                    "8n+2 holes layout n={n}: R1={} R2={} R3={} (R4={} in complete mode)",
                    e.r1,
                    e.r2,
                    e.r3,
                    PartCounts::expected(n, true).r4
                );
                line("blocks", d.len() as u64, e.total())
            } else {
                true
            }
        }
    }
}

fn stats(path: &Path) -> CmdResult {
    let text = io::read_to_string(path)?;
    let ok = match io::detect(&text)? {
        FileKind::Design => design_stats(&io::read_design(&text)?),
        FileKind::Bbd => {
            let b = io::read_bbd(&text)?;
            println!("kind=bbd m={}", b.m());
            line("blocks", b.len() as u64, bbd_block_count(b.m() as u64))
        }
        FileKind::Mds => {
            let c = io::read_mds(&text)?;
            println!("kind=mds d={} q={} dist={}", c.d(), c.q(), c.dist());
            let k = (c.d() + 1 - c.dist()) as u32;
            line("words", c.len() as u64, (c.q() as u64).pow(k))
        }
        _ => {
            return Err(Failure {
                code: EXIT_USAGE,
                msg: "stats supports design, bbd and mds files".into(),
            })
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_INVALID,
            msg: "counts differ from their formulas".into(),
        })
    }
}
