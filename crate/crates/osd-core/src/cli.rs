//! Command-line surface: analyze, product, corpus, graph, oracle.
//!
//! Exit codes: 0 success, 1 parse/input error, 2 not primitive, 3 closure
//! cap exceeded, 4 non-exact product factor, 5 corpus comparison failure,
//! 6 insufficient oracle data.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::corpus::{self, CorpusError};
use crate::error::{OracleError, PairError, RuleError};
use crate::oracle::{estimate_decay, iterate_pair_density};
use crate::osd::product_osd;
use crate::pairs::{build_closure, default_seeds, discrepancy_graph, SplitCtx};
use crate::parse::parse_rule;
use crate::report::{
    analyze_with_osd, sig12, AnalysisReport, AnalyzeError, AnalyzeOptions, OsdBounds, OsdJson,
    OsdValue,
};
use crate::rule::{pf_data, SubstitutionRule};
use crate::spectral::spectral_report;

#[derive(Parser)]
#[command(
    name = "osd",
    version,
    about = "Pure-point spectrum and orbit separation dimension for substitution rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one rule end to end.
    Analyze(AnalyzeArgs),
    /// Combine two or more rules as a product system.
    Product(ProductArgs),
    /// Run the bundled corpus and compare against stored values.
    Corpus(CorpusArgs),
    /// Emit the balanced-pair closure as a DOT digraph.
    Graph(GraphArgs),
    /// Estimate the discrepancy decay rate empirically.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Length of the legal factors used to build transposition seeds.
    #[arg(long, default_value_t = 2)]
    seed_factor_length: usize,
    /// Abort once the pair closure holds this many nodes.
    #[arg(long, default_value_t = 100_000)]
    max_pairs: usize,
    /// Working precision for numeric certification.
    #[arg(long, default_value_t = 128)]
    precision_bits: u32,
}

impl CommonOpts {
    fn to_options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            seed_factor_length: self.seed_factor_length,
            cap: self.max_pairs,
            precision_bits: self.precision_bits,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Rule file in the `letter -> image` DSL.
    rulefile: PathBuf,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct ProductArgs {
    /// Rule files for the product factors (at least two).
    #[arg(num_args = 2.., required = true)]
    rulefiles: Vec<PathBuf>,
    /// Emit the combined report as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct CorpusArgs {
    /// Run a single entry instead of the whole corpus.
    #[arg(long, value_name = "NAME")]
    only: Option<String>,
    /// Emit the comparison table as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct GraphArgs {
    /// Rule file in the `letter -> image` DSL.
    rulefile: PathBuf,
    /// Write the DOT digraph to this path (stdout if omitted).
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct OracleArgs {
    /// Rule file in the `letter -> image` DSL.
    rulefile: PathBuf,
    /// Number of substitution steps to iterate.
    #[arg(long, default_value_t = 25)]
    iterations: u32,
    /// Steps discarded before fitting the decay slope.
    #[arg(long, default_value_t = 5)]
    burn_in: u32,
    /// Write the trajectory to this CSV path.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Emit the estimate as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    common: CommonOpts,
}

pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Product(args) => cmd_product(&args),
        Command::Corpus(args) => cmd_corpus(&args),
        Command::Graph(args) => cmd_graph(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}

fn rule_code(e: &RuleError) -> i32 {
    match e {
        RuleError::NotPrimitive => 2,
        _ => 1,
    }
}

fn pair_code(e: &PairError) -> i32 {
    match e {
        PairError::CapExceeded(_) => 3,
        _ => 1,
    }
}

fn analyze_code(e: &AnalyzeError) -> i32 {
    match e {
        AnalyzeError::Rule(e) => rule_code(e),
        AnalyzeError::Pair(e) => pair_code(e),
    }
}

fn corpus_code(e: &CorpusError) -> i32 {
    match e {
        CorpusError::UnknownEntry(_) => 1,
        CorpusError::Rule(e) => rule_code(e),
        CorpusError::Pair(e) => pair_code(e),
        CorpusError::Osd(_) => 1,
    }
}

/// Prints an error in the requested format and returns its exit code.
fn fail(json: bool, code: i32, message: &str) -> i32 {
    if json {
        let doc = json!({ "error": { "code": code, "message": message } });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        eprintln!("error: {message}");
    }
    code
}

fn load_rule(path: &PathBuf) -> Result<SubstitutionRule, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_rule(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn osd_value_text(v: &OsdValue) -> String {
    match v {
        OsdValue::Finite(x) => format!("{x}"),
        OsdValue::Marker(m) => (*m).to_string(),
        OsdValue::Absent(_) => "bounds only".to_string(),
    }
}

fn bounds_text(b: &OsdBounds) -> String {
    match b {
        OsdBounds::Finite([lo, hi]) => format!("[{lo}, {hi}]"),
        OsdBounds::Marker(m) => (*m).to_string(),
    }
}

fn render_report(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<26}{v}");
    };
    kv("rule", r.rule.text.replace('\n', "   "));
    kv(
        "inflation matrix",
        serde_json::to_string(&r.inflation_matrix).unwrap(),
    );
    kv("char poly", r.char_poly.clone());
    kv(
        "lambda",
        format!("{}   (min poly {})", r.lambda.decimal, r.lambda.min_poly),
    );
    kv(
        "primitive / pisot / unit",
        format!("{} / {} / {}", r.primitive, r.pisot, r.unit),
    );
    let lengths = r
        .rule
        .letters
        .iter()
        .zip(&r.lengths)
        .map(|(name, l)| format!("{name} = {}", l.decimal))
        .collect::<Vec<_>>()
        .join("   ");
    kv("tile lengths", lengths);
    kv("pure point", r.pure_point.to_string());
    kv("closure nodes", r.pair_graph_size.to_string());
    kv("dc char poly", r.discrepancy_char_poly.clone());
    match &r.lambda_dc {
        Some(v) => kv(
            "lambda_dc",
            format!("{}   (char poly {})", v.decimal, v.min_poly),
        ),
        None => kv("lambda_dc", "none".to_string()),
    }
    kv(
        "uniform / dc primitive",
        format!("{} / {}", r.uniform, r.dc_primitive),
    );
    let exactness = if r.osd.exact { "exact" } else { "bounds" };
    kv(
        "osd",
        format!(
            "{} ({exactness}, bounds {})",
            osd_value_text(&r.osd.value),
            bounds_text(&r.osd.bounds)
        ),
    );
    kv("lyapunov max", format!("{}", r.osd.lyapunov_max));
    kv(
        "lyapunov min (lb)",
        format!("{}", r.osd.lyapunov_min_lower_bound),
    );
    kv(
        "window",
        format!(
            "d_int = {}, isotropic = {}, applicable = {}",
            r.window.d_int, r.window.isotropic, r.window.applicable
        ),
    );
    kv(
        "boundary dim",
        r.window
            .boundary_dim
            .map_or_else(|| "not applicable".to_string(), |v| format!("{v}")),
    );
    kv(
        "boundary bounds",
        format!(
            "lower {} / naive upper {}",
            r.window.lower_bound, r.window.naive_upper_bound
        ),
    );
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn cmd_analyze(args: &AnalyzeArgs) -> i32 {
    let rule = match load_rule(&args.rulefile) {
        Ok(rule) => rule,
        Err(msg) => return fail(args.json, 1, &msg),
    };
    match crate::report::analyze_rule(&rule, &args.common.to_options()) {
        Ok(report) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", render_report(&report));
            }
            0
        }
        Err(e) => fail(args.json, analyze_code(&e), &e.to_string()),
    }
}

fn cmd_product(args: &ProductArgs) -> i32 {
    let opts = args.common.to_options();
    let mut reports = Vec::new();
    let mut results = Vec::new();
    for path in &args.rulefiles {
        let rule = match load_rule(path) {
            Ok(rule) => rule,
            Err(msg) => return fail(args.json, 1, &msg),
        };
        match analyze_with_osd(&rule, &opts) {
            Ok((report, result)) => {
                reports.push(report);
                results.push(result);
            }
            Err(e) => {
                let msg = format!("{}: {e}", path.display());
                return fail(args.json, analyze_code(&e), &msg);
            }
        }
    }
    let combined = match product_osd(&results) {
        Ok(combined) => combined,
        Err(e) => return fail(args.json, 4, &e.to_string()),
    };
    let combined_json = OsdJson::from_result(&combined);
    if args.json {
        let doc = json!({ "factors": reports, "product": combined_json });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        for (path, report) in args.rulefiles.iter().zip(&reports) {
            println!("factor: {}", path.display());
            print!("{}", render_report(report));
            println!();
        }
        println!(
            "{:<26}{}",
            "product osd",
            osd_value_text(&combined_json.value)
        );
        println!("{:<26}{}", "product lyapunov max", combined_json.lyapunov_max);
    }
    0
}

fn cmd_corpus(args: &CorpusArgs) -> i32 {
    let opts = args.common.to_options();
    let all = corpus::entries();
    let selected: Vec<_> = match &args.only {
        Some(name) => {
            let found: Vec<_> = all.iter().filter(|e| e.name == name.as_str()).collect();
            if found.is_empty() {
                return fail(args.json, 1, &format!("no corpus entry named `{name}`"));
            }
            found
        }
        None => all.iter().collect(),
    };
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for entry in selected {
        match entry.run(&opts) {
            Ok(entry_rows) => rows.extend(entry_rows),
            Err(e) => return fail(args.json, corpus_code(&e), &e.to_string()),
        }
        if let Some(note) = entry.note {
            notes.push((entry.name, note));
        }
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if args.json {
        let doc = json!({
            "rows": rows,
            "notes": notes
                .iter()
                .map(|(entry, note)| json!({ "entry": entry, "note": note }))
                .collect::<Vec<_>>(),
            "failed": failed,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        println!(
            "{:<22} {:<18} {:<26} {:<46} {:<10} result",
            "entry", "check", "computed", "expected", "source"
        );
        for row in &rows {
            println!(
                "{:<22} {:<18} {:<26} {:<46} {:<10} {}",
                row.entry,
                row.check,
                row.computed,
                row.expected,
                row.provenance,
                if row.pass { "PASS" } else { "FAIL" }
            );
        }
        for (entry, note) in &notes {
            println!("note ({entry}): {note}");
        }
        println!("{} rows, {failed} failed", rows.len());
    }
    if failed > 0 {
        5
    } else {
        0
    }
}

fn cmd_graph(args: &GraphArgs) -> i32 {
    let rule = match load_rule(&args.rulefile) {
        Ok(rule) => rule,
        Err(msg) => return fail(false, 1, &msg),
    };
    let opts = args.common.to_options();
    let data = match pf_data(&rule, opts.precision_bits) {
        Ok(data) => data,
        Err(e) => return fail(false, rule_code(&e), &e.to_string()),
    };
    let ctx = SplitCtx::new(&data.lengths);
    let seeds = match default_seeds(&rule, &ctx, opts.seed_factor_length) {
        Ok(seeds) => seeds,
        Err(e) => return fail(false, pair_code(&e), &e.to_string()),
    };
    let graph = match build_closure(&seeds, &rule, &ctx, opts.cap) {
        Ok(graph) => graph,
        Err(e) => return fail(false, pair_code(&e), &e.to_string()),
    };
    let mut dot = String::new();
    dot.push_str("digraph balanced_pairs {\n  rankdir=LR;\n");
    for (i, node) in graph.nodes.iter().enumerate() {
        let shape = if graph.coincidence[i] { "box" } else { "ellipse" };
        let _ = writeln!(dot, "  n{i} [label=\"{}\", shape={shape}];", node.label(&rule));
    }
    let mut edge_count = 0usize;
    for (parent, children) in graph.edges.iter().enumerate() {
        for (child, mult) in children {
            let _ = writeln!(dot, "  n{parent} -> n{child} [label=\"{mult}\"];");
            edge_count += 1;
        }
    }
    dot.push_str("}\n");
    match &args.dot {
        Some(path) => {
            if let Err(e) = fs::write(path, &dot) {
                return fail(false, 1, &format!("{}: {e}", path.display()));
            }
            println!(
                "wrote {} nodes, {edge_count} edges to {}",
                graph.len(),
                path.display()
            );
        }
        None => print!("{dot}"),
    }
    0
}

fn cmd_oracle(args: &OracleArgs) -> i32 {
    let rule = match load_rule(&args.rulefile) {
        Ok(rule) => rule,
        Err(msg) => return fail(args.json, 1, &msg),
    };
    let opts = args.common.to_options();
    let data = match pf_data(&rule, opts.precision_bits) {
        Ok(data) => data,
        Err(e) => return fail(args.json, rule_code(&e), &e.to_string()),
    };
    let ctx = SplitCtx::new(&data.lengths);
    let seeds = match default_seeds(&rule, &ctx, opts.seed_factor_length) {
        Ok(seeds) => seeds,
        Err(e) => return fail(args.json, pair_code(&e), &e.to_string()),
    };
    let Some(seed) = seeds.first() else {
        let message = "no discrepancy seeds at this factor length; density is identically zero";
        if args.json {
            let doc = json!({ "seed": null, "message": message });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        } else {
            println!("{message}");
        }
        return 0;
    };
    let trajectory_data =
        match iterate_pair_density(seed, &rule, &data, args.iterations, opts.cap) {
            Ok(out) => out,
            Err(OracleError::Pair(e)) => return fail(args.json, pair_code(&e), &e.to_string()),
            Err(e) => return fail(args.json, 6, &e.to_string()),
        };
    if let Some(path) = &args.csv {
        let mut csv = String::from("n,total_length,discrepancy_length,density\n");
        for step in &trajectory_data.trajectory.steps {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                step.n,
                sig12(step.total_length),
                sig12(step.discrepancy_length),
                sig12(step.density)
            );
        }
        if let Err(e) = fs::write(path, &csv) {
            return fail(args.json, 1, &format!("{}: {e}", path.display()));
        }
    }
    let (m_dc, _) = discrepancy_graph(&trajectory_data.graph);
    let exact_log = spectral_report(&m_dc)
        .lambda_dc
        .as_ref()
        .map(|l| sig12(l.ln()));
    let warn_not_pure_point = !crate::pairs::pure_point_verdict(&trajectory_data.graph);
    let estimate = match estimate_decay(&trajectory_data.trajectory, args.burn_in) {
        Ok(est) => est,
        Err(e) => return fail(args.json, 6, &e.to_string()),
    };
    if args.json {
        let doc = json!({
            "seed": seed.label(&rule),
            "estimate": estimate,
            "exact_log_lambda_dc": exact_log,
            "trajectory": trajectory_data.trajectory,
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        if warn_not_pure_point {
            println!(
                "warning: some pair never reaches a coincidence; the density need not vanish"
            );
        }
        println!("{:<26}{}", "seed", seed.label(&rule));
        println!(
            "{:<26}{}   (slope {}, r^2 {})",
            "estimated log lambda_dc",
            sig12(estimate.estimated_log_lambda_dc),
            sig12(estimate.slope),
            sig12(estimate.r_squared)
        );
        match exact_log {
            Some(v) => println!("{:<26}{v}", "exact log lambda_dc"),
            None => println!("{:<26}none (no recurrent discrepancy)", "exact log lambda_dc"),
        }
    }
    0
}
