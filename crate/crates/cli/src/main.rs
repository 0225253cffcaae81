use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fairalloc::instances::{
    alloc_to_json, gen_lemma4, gen_lemma5, gen_lemma6, gen_lemma7, gen_lemma8, gen_random,
    instance_to_json, lemma8_tie_break, load, load_alloc, GeneratorParams, SpecKind,
    ValuationClass,
};
use fairalloc::solvers::ItemOrder;
use fairalloc::suites::{self, run_suite, Suite, SuiteReport};
use fairalloc::{
    audit, classify, ef1_alpha, local_search_nsw, nsw, round_robin, solve_leximin,
    solve_max_nsw, value, Allocation, AuditReport, Bundle, ClassifyLimits, Error, Exec,
    ExtRational, Instance, Rational, SolveOptions, TieBreak, ValuationProfile, Witness,
};

/// Fair allocation of indivisible items under independence-system constraints.
#[derive(Parser)]
#[command(name = "fairalloc", version)]
struct Cli {
    /// Run every enumeration on the current thread.
    #[arg(long, global = true)]
    sequential: bool,

    /// Largest (n+1)^m the exhaustive routines may enumerate.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// uniform, partition, truncation or explicit.
        #[arg(long, default_value = "partition")]
        spec: SpecKind,
        /// additive, identical, binary, identical_binary, two_valued:A or lexicographic.
        #[arg(long, default_value = "additive")]
        vals: ValuationClass,
        #[arg(long, default_value = "0")]
        lo: Rational,
        #[arg(long, default_value = "10")]
        hi: Rational,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute an allocation.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Objective::Nsw)]
        objective: Objective,
        /// by-index, lemma8, or per-agent orders such as "g5 g6 g1 g2 g3 g4;by-index".
        #[arg(long, default_value = "by-index")]
        tie_break: String,
        /// Local-search round limit.
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        /// Allocation output file; the allocation goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit an allocation: EF1 ratio, EF, Pareto optimality.
    Audit {
        instance: PathBuf,
        allocation: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Classify the constraint: heredity, matroid, extendibility.
    Classify {
        instance: PathBuf,
        /// Largest extendibility reported exactly.
        #[arg(long, default_value_t = 8)]
        p_bound: usize,
    },
    /// Rebuild a worst-case construction and check its exact ratio.
    Reproduce {
        #[arg(value_parser = ["4", "5", "6", "7", "8"])]
        lemma: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "1/10")]
        delta: Rational,
        #[arg(long, default_value_t = 2)]
        eta: usize,
        /// Also write the instance and allocation to this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a seeded property suite and tabulate the ratios.
    Report {
        /// theorem1..theorem6 or lemmas.
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Nsw,
    Leximin,
    Rr,
    /// Local search from the Round-Robin allocation.
    Local,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Markdown,
}

enum Outcome {
    Ok,
    /// A reproduction or suite check failed; exit code 3.
    Fail,
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_tie_break(instance: &Instance, spec: &str) -> Result<TieBreak, Error> {
    match spec {
        "by-index" => Ok(TieBreak::ByIndex),
        "lemma8" => {
            let m = instance.items();
            if instance.agents() != 2 || !m.is_multiple_of(3) || m < 6 {
                return Err(Error::Domain(
                    "the lemma8 tie-break needs two agents and 3η items".into(),
                ));
            }
            Ok(lemma8_tie_break(m / 3))
        }
        custom => {
            let orders = custom
                .split(';')
                .map(|part| match part.trim() {
                    "by-index" => Ok(ItemOrder::ByIndex),
                    list => list
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(|l| {
                            instance
                                .item(l)
                                .ok_or_else(|| Error::Domain(format!("unknown item {l:?} in tie-break")))
                        })
                        .collect::<Result<Vec<_>, _>>()
                        .map(ItemOrder::Permutation),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TieBreak::PerAgent(orders))
        }
    }
}

fn summary(instance: &Instance, alloc: &Allocation) -> Result<String, Error> {
    Ok(match instance.profile() {
        ValuationProfile::Additive(vals) => {
            let utils = vals
                .iter()
                .zip(&alloc.bundles)
                .map(|(v, b)| value(v, *b).map(|u| u.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            format!("NSW {} utilities ({})", nsw(instance.profile(), alloc, None)?, utils.join(", "))
        }
        ValuationProfile::Lexicographic(_) => {
            let bundles: Vec<_> = alloc.bundles.iter().map(|b| instance.show(*b)).collect();
            format!("bundles {}", bundles.join(" "))
        }
    })
}

fn cmd_solve(
    opts: &SolveOptions,
    path: &Path,
    objective: Objective,
    tie_break: &str,
    rounds: usize,
    out: Option<&Path>,
) -> Result<Outcome, Error> {
    let instance = load(path)?;
    let alloc = match objective {
        Objective::Nsw => solve_max_nsw(&instance, opts)?.0,
        Objective::Leximin => solve_leximin(&instance, opts)?,
        Objective::Rr => round_robin(&instance, &parse_tie_break(&instance, tie_break)?)?,
        Objective::Local => {
            let start = round_robin(&instance, &parse_tie_break(&instance, tie_break)?)?;
            local_search_nsw(&instance, start, rounds)?
        }
    };
    let text = pretty(&alloc_to_json(&instance, &alloc));
    let line = summary(&instance, &alloc)?;
    match out {
        Some(p) => {
            fs::write(p, text)?;
            println!("{line}");
        }
        None => {
            print!("{text}");
            eprintln!("{line}");
        }
    }
    Ok(Outcome::Ok)
}

fn report_json(instance: &Instance, r: &AuditReport) -> Value {
    json!({
        "alpha_ef1": r.alpha_ef1.as_ref().map(ToString::to_string),
        "alpha_decimal": r.alpha_ef1.as_ref().map(ExtRational::to_decimal),
        "is_ef": r.is_ef,
        "is_ef1": r.is_ef1,
        "is_po": r.is_po,
        "po_dominator": r.po_dominator.as_ref().map(|d| alloc_to_json(instance, d)),
        "worst_pair": r.worst_pair.map(|(i, j)| vec![i + 1, j + 1]),
        "nsw": r.nsw_value.as_ref().map(ToString::to_string),
        "complete": r.complete,
    })
}

fn cmd_audit(opts: &SolveOptions, inst_path: &Path, alloc_path: &Path, format: Format) -> Result<Outcome, Error> {
    let instance = load(inst_path)?;
    let alloc = load_alloc(&instance, alloc_path)?;
    let r = audit(&instance, &alloc, opts)?;
    let na = || "n/a".to_string();
    let alpha = r.alpha_ef1.as_ref().map_or_else(na, ToString::to_string);
    let decimal = r.alpha_ef1.as_ref().map_or_else(na, ExtRational::to_decimal);
    let pair = r.worst_pair.map_or_else(na, |(i, j)| format!("{}>{}", i + 1, j + 1));
    let nsw_text = r.nsw_value.as_ref().map_or_else(na, ToString::to_string);
    match format {
        Format::Json => print!("{}", pretty(&report_json(&instance, &r))),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            let to_err = |e: csv::Error| Error::Io(io::Error::other(e));
            w.write_record(["alpha", "alpha_decimal", "is_ef", "is_ef1", "is_po", "worst_pair", "nsw", "complete"])
                .map_err(to_err)?;
            w.write_record([
                alpha,
                decimal,
                r.is_ef.to_string(),
                r.is_ef1.to_string(),
                r.is_po.to_string(),
                pair,
                nsw_text,
                r.complete.to_string(),
            ])
            .map_err(to_err)?;
            w.flush()?;
        }
        Format::Table => {
            println!("alpha       {alpha} (~{decimal})");
            println!("worst pair  {pair}");
            println!("ef          {}", r.is_ef);
            println!("ef1         {}", r.is_ef1);
            println!("po          {}", r.is_po);
            if let Some(d) = &r.po_dominator {
                let bundles: Vec<_> = d.bundles.iter().map(|b| instance.show(*b)).collect();
                println!("dominated   by {}", bundles.join(" "));
            }
            println!("nsw         {nsw_text}");
            println!("complete    {}", r.complete);
        }
    }
    Ok(Outcome::Ok)
}

fn show_witness(instance: &Instance, w: &Witness) -> String {
    let s = |b: &Bundle| instance.show(*b);
    match w {
        Witness::Heredity { set, item } => {
            format!("heredity: {} is listed but {} without {} is not", s(set), s(set), instance.label(*item))
        }
        Witness::Augmentation { smaller, larger } => {
            format!("augmentation: no item of {} extends {}", s(larger), s(smaller))
        }
        Witness::Extension { c, d, h, required } => format!(
            "extension: C={} D={} H={} needs {required} removals",
            s(c),
            s(d),
            s(h)
        ),
    }
}

fn cmd_classify(exec: Exec, path: &Path, p_bound: usize) -> Result<Outcome, Error> {
    let instance = load(path)?;
    let r = classify(instance.system(), p_bound, &ClassifyLimits { exec, ..ClassifyLimits::default() })?;
    println!("hereditary: {}", r.is_hereditary);
    println!("matroid: {}", r.is_matroid);
    println!("p-extendible: {}", r.min_extendibility);
    println!("strongly p-extendible: {}", r.min_strong_extendibility);
    println!("family size: {}", r.family_size);
    if let Some(w) = &r.violation_witness {
        println!("witness: {}", show_witness(&instance, w));
    }
    Ok(Outcome::Ok)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_reproduce(
    opts: &SolveOptions,
    lemma: &str,
    k: usize,
    delta: &Rational,
    eta: usize,
    out_dir: Option<&Path>,
) -> Result<Outcome, Error> {
    let (instance, alloc, golden_alpha, golden_nsw, note) = match lemma {
        "4" => {
            let inst = gen_lemma4(k, delta)?;
            let a = solve_max_nsw(&inst, opts)?.0;
            (inst, a, suites::lemma4_alpha(k, delta), None, " (> 1/2, -> 1/2 as k grows)")
        }
        "5" => {
            let inst = gen_lemma5()?;
            let a = solve_max_nsw(&inst, opts)?.0;
            (inst, a, Rational::new(2, 5), Some(Rational::from(12)), "")
        }
        "6" => {
            let inst = gen_lemma6()?;
            let a = solve_max_nsw(&inst, opts)?.0;
            let r = classify(inst.system(), 3, &ClassifyLimits { exec: opts.exec, ..ClassifyLimits::default() })?;
            println!("strongly p-extendible: {}", r.min_strong_extendibility);
            (inst, a, Rational::new(2, 3), Some(Rational::from(8)), "")
        }
        "7" => {
            let inst = gen_lemma7(delta)?;
            let a = solve_max_nsw(&inst, opts)?.0;
            (inst, a, suites::lemma7_alpha(delta), None, " (-> 1/4 as delta -> 0)")
        }
        _ => {
            let (inst, tb) = gen_lemma8(eta)?;
            let a = round_robin(&inst, &tb)?;
            (inst, a, suites::lemma8_alpha(eta), None, "")
        }
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("lemma{lemma}.json")), pretty(&instance_to_json(&instance)))?;
        fs::write(dir.join(format!("lemma{lemma}.alloc.json")), pretty(&alloc_to_json(&instance, &alloc)))?;
    }
    let bundles: Vec<_> = alloc.bundles.iter().map(|b| instance.show(*b)).collect();
    println!("allocation: {}", bundles.join(" "));
    let mut ok = true;
    let value_nsw = nsw(instance.profile(), &alloc, None)?;
    match golden_nsw {
        Some(g) => {
            let hit = value_nsw == g;
            ok &= hit;
            println!("nsw={value_nsw} {}", verdict(hit));
        }
        None => println!("nsw={value_nsw}"),
    }
    let alpha = ef1_alpha(&instance, &alloc)?.alpha;
    let hit = alpha == golden_alpha;
    ok &= hit;
    println!("alpha={alpha} {}{note}", verdict(hit));
    if !hit {
        println!("expected alpha={golden_alpha}");
    }
    Ok(if ok { Outcome::Ok } else { Outcome::Fail })
}

fn alpha_parts(alpha: Option<&ExtRational>, ef1: bool) -> (String, String) {
    match alpha {
        Some(ExtRational::Finite(r)) => (r.numer().to_string(), r.denom().to_string()),
        Some(ExtRational::Infinite) => ("1".into(), "0".into()),
        None => ((ef1 as u8).to_string(), "1".into()),
    }
}

fn cmd_report(exec: Exec, suite: Suite, count: usize, seed: u64, format: ReportFormat) -> Result<Outcome, Error> {
    let report = run_suite(suite, count, seed, exec)?;
    let header = [
        "seed", "n", "m", "spec_kind", "valuation_class", "alpha_num", "alpha_den", "po",
        "bound_num", "bound_den", "pass",
    ];
    let records: Vec<[String; 11]> = report
        .rows
        .iter()
        .map(|r| {
            let (an, ad) = alpha_parts(r.alpha.as_ref(), r.ef1);
            [
                r.seed.to_string(),
                r.n.to_string(),
                r.m.to_string(),
                r.spec_kind.clone(),
                r.valuation_class.clone(),
                an,
                ad,
                r.po.to_string(),
                r.bound.numer().to_string(),
                r.bound.denom().to_string(),
                r.pass.to_string(),
            ]
        })
        .collect();
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            let to_err = |e: csv::Error| Error::Io(io::Error::other(e));
            w.write_record(header).map_err(to_err)?;
            for r in &records {
                w.write_record(r).map_err(to_err)?;
            }
            w.flush()?;
        }
        ReportFormat::Markdown => {
            println!("| {} |", header.join(" | "));
            println!("|{}", "---|".repeat(header.len()));
            for r in &records {
                println!("| {} |", r.join(" | "));
            }
        }
    }
    eprintln!("{}", report_summary(&report));
    Ok(if report.violations() == 0 { Outcome::Ok } else { Outcome::Fail })
}

fn report_summary(report: &SuiteReport) -> String {
    let shown = |a: Option<ExtRational>| a.map_or_else(|| "n/a".to_string(), |a| a.to_string());
    let bound = report.min_bound().map_or_else(|| "n/a".to_string(), |b| b.to_string());
    format!(
        "{}: {} instances, violations: {}, min alpha {} (bound >= {bound}), median alpha {}",
        report.suite,
        report.rows.len(),
        report.violations(),
        shown(report.min_alpha()),
        shown(report.median_alpha()),
    )
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let opts = SolveOptions { budget: cli.budget, exec };
    match cli.command {
        Command::Gen { seed, n, m, spec, vals, lo, hi, out } => {
            let params = GeneratorParams { seed, n, m, spec_kind: spec, valuation_class: vals, value_range: (lo, hi) };
            let inst = gen_random(&params)?;
            write_or_print(out.as_deref(), &pretty(&instance_to_json(&inst)))?;
            Ok(Outcome::Ok)
        }
        Command::Solve { instance, objective, tie_break, rounds, out } => {
            cmd_solve(&opts, &instance, objective, &tie_break, rounds, out.as_deref())
        }
        Command::Audit { instance, allocation, format } => cmd_audit(&opts, &instance, &allocation, format),
        Command::Classify { instance, p_bound } => cmd_classify(exec, &instance, p_bound),
        Command::Reproduce { lemma, k, delta, eta, out_dir } => {
            cmd_reproduce(&opts, &lemma, k, &delta, eta, out_dir.as_deref())
        }
        Command::Report { suite, count, seed, format } => cmd_report(exec, suite, count, seed, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Resource(_)) {
                eprintln!("hint: raise --budget or use `solve --objective local` for large instances");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
