use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coxdiag::coxeter::{
    build_system, format_word, is_trivial_word, parse_word, reduce_first_generator, reduced_words, rex_graph,
    rex_path, CoxeterSystem, Family, LengthTable,
};
use coxdiag::generate::corpus;
use coxdiag::io::{render, stats, Layout, RenderFormat, RenderSpec};
use coxdiag::map::{parse, serialize, Diagram};
use coxdiag::reduce::{reduce_with, FailureKind, ReduceFailure, ReduceOptions, Reduction, Strategy};
use coxdiag::rules::{
    commuting_template, compile_path, derive_zam_template, template_certificate, write_template_dir, RuleSet,
};
use coxdiag::trace::{expand_macros, parse_trace, serialize_trace, verify_trace, Verdict};

const OK: u8 = 0;
const INVALID: u8 = 1;
const STUCK: u8 = 2;
const BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "coxdiag", version, about = "Rewrite planar diagrams of Coxeter groups")]
struct Cli {
    /// Directory of rule templates; overrides built-ins of the same name.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on primitive steps per reduction.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Worker threads for batch commands; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check diagram files against the axioms.
    Validate { files: Vec<PathBuf> },
    /// Reduce closed diagrams to the empty diagram.
    Reduce {
        files: Vec<PathBuf>,
        #[arg(long, default_value = "auto")]
        strategy: String,
        /// Trace output for a single input file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Trace output directory for several inputs, one `<stem>.trace` each.
        #[arg(long, conflicts_with = "trace")]
        trace_dir: Option<PathBuf>,
    },
    /// Write a corpus of random closed diagrams.
    Generate {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Target vertex count.
        #[arg(long, default_value_t = 20)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check traces against their initial diagrams, given as `diagram trace` pairs.
    Verify {
        #[arg(num_args = 2.., value_names = ["DIAGRAM", "TRACE"])]
        pairs: Vec<PathBuf>,
        /// Also flatten macros and check the primitive trace.
        #[arg(long)]
        expand: bool,
    },
    /// Draw a diagram as SVG or Graphviz dot.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Svg)]
        format: FormatArg,
        #[arg(long, value_enum, default_value_t = LayoutArg::Tutte)]
        layout: LayoutArg,
        #[arg(long)]
        no_arrows: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertex, edge, face and angle counts.
    Stats { file: PathBuf },
    /// Word problem utilities.
    Word {
        #[command(subcommand)]
        cmd: WordCmd,
    },
    /// Derive ZAM templates and write them as rule files.
    DeriveZam {
        /// Largest m of the `A1 x I_m` commuting templates.
        #[arg(long, default_value_t = 6)]
        max_m: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum WordCmd {
    /// Whether a word is trivial, with the length of its element.
    Check {
        #[command(flatten)]
        group: GroupArg,
        word: String,
    },
    /// All reduced words of the element of a word.
    Reduced {
        #[command(flatten)]
        group: GroupArg,
        word: String,
    },
    /// Rewrite so the first generator occurs at most once (type A).
    First {
        #[command(flatten)]
        group: GroupArg,
        word: String,
    },
    /// Size and connectivity of the graph of reduced words of an element.
    Rex {
        #[command(flatten)]
        group: GroupArg,
        word: String,
    },
    /// The patch of a shortest braid-move path between two reduced words.
    Compile {
        #[command(flatten)]
        group: GroupArg,
        from: String,
        to: String,
    },
}

#[derive(Args)]
struct GroupArg {
    /// Family and parameter, e.g. `A 4`, `I 5`, `BI 3`.
    #[arg(long, num_args = 2, value_names = ["FAMILY", "N"], required = true)]
    group: Vec<String>,
}

impl GroupArg {
    fn system(&self) -> Result<Arc<CoxeterSystem>, String> {
        let family = match self.group[0].as_str() {
            "A" | "a" => Family::A,
            "I" | "i" => Family::I,
            "BI" | "bi" | "BraidI" => Family::BraidI,
            f => return Err(format!("unknown family `{f}`")),
        };
        let n: usize = self.group[1].parse().map_err(|_| format!("bad parameter `{}`", self.group[1]))?;
        build_system(family, n).map(Arc::new).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Dot,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Tutte,
    Force,
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<String> for Fail {
    fn from(s: String) -> Self {
        Fail(INVALID, s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("coxdiag: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Fail> {
    match &cli.cmd {
        Cmd::Validate { files } => validate(files),
        Cmd::Reduce { files, strategy, trace, trace_dir } => {
            reduce(cli, files, strategy, trace.as_deref(), trace_dir.as_deref())
        }
        Cmd::Generate { group, count, size, out } => generate(cli, group, *count, *size, out),
        Cmd::Verify { pairs, expand } => verify(cli, pairs, *expand),
        Cmd::Render { file, format, layout, no_arrows, out } => {
            let d = load(file)?;
            let mut spec = RenderSpec::for_diagram(&d);
            spec.format = match format {
                FormatArg::Dot => RenderFormat::Dot,
                FormatArg::Svg => RenderFormat::Svg,
            };
            spec.layout = match layout {
                LayoutArg::Tutte => Layout::Tutte,
                LayoutArg::Force => Layout::Force,
            };
            spec.arrowheads = !no_arrows;
            let text = render(&d, &spec);
            match out {
                Some(p) => write_atomic(p, &text)?,
                None => print!("{text}"),
            }
            Ok(OK)
        }
        Cmd::Stats { file } => {
            print!("{}", stats(&load(file)?));
            Ok(OK)
        }
        Cmd::Word { cmd } => word(cmd),
        Cmd::DeriveZam { max_m, out } => derive_zam(*max_m, out),
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(INVALID, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Diagram, Fail> {
    parse(&read(path)?).map_err(|e| Fail(INVALID, format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, text: &str) -> Result<(), Fail> {
    let err = |e: std::io::Error| Fail(INVALID, format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Fail(INVALID, format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(err)?;
    f.write_all(text.as_bytes()).map_err(err)?;
    f.sync_all().map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

/// Built-in templates of the system, overridden by `--rules`.
fn rules_for(cli: &Cli, sys: &Arc<CoxeterSystem>) -> Result<RuleSet, Fail> {
    let mut rs = RuleSet::builtin(sys);
    if let Some(dir) = &cli.rules {
        let loaded = RuleSet::load_dir(dir, sys).map_err(|e| Fail(INVALID, e.to_string()))?;
        for t in loaded.templates() {
            rs.insert(t.clone());
        }
    }
    Ok(rs)
}

/// One rule set per distinct system.
fn rules_by_system(cli: &Cli, ds: &[Diagram]) -> Result<HashMap<String, RuleSet>, Fail> {
    let mut out = HashMap::new();
    for d in ds {
        let h = d.sys.header();
        if !out.contains_key(&h) {
            out.insert(h, rules_for(cli, &d.sys)?);
        }
    }
    Ok(out)
}

/// Maps `f` over `items` on a pool of `jobs` threads.
fn par_map<T: Sync, R: Send>(jobs: Option<usize>, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build();
        match pool {
            Ok(p) => p.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        items.iter().map(f).collect()
    }
}

fn validate(files: &[PathBuf]) -> Result<u8, Fail> {
    let mut code = OK;
    for f in files {
        match load(f) {
            Ok(d) => {
                let vs = d.validate();
                if vs.is_empty() {
                    println!("{}: valid", f.display());
                } else {
                    code = INVALID;
                    for v in vs {
                        println!("{}: {}: {}", f.display(), v.kind, v.detail);
                    }
                }
            }
            Err(Fail(_, msg)) => {
                code = INVALID;
                println!("{msg}");
            }
        }
    }
    Ok(code)
}

fn failure_code(k: FailureKind) -> u8 {
    match k {
        FailureKind::Invalid | FailureKind::Unsupported => INVALID,
        FailureKind::Stuck => STUCK,
        FailureKind::Budget => BUDGET,
    }
}

/// Invalid input outranks a stuck engine, which outranks a spent budget.
fn worst(a: u8, b: u8) -> u8 {
    let rank = |c| match c {
        INVALID => 3,
        STUCK => 2,
        BUDGET => 1,
        _ => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn reduce(
    cli: &Cli,
    files: &[PathBuf],
    strategy: &str,
    trace: Option<&Path>,
    trace_dir: Option<&Path>,
) -> Result<u8, Fail> {
    if trace.is_some() && files.len() != 1 {
        return Err(Fail(INVALID, "--trace needs exactly one input; use --trace-dir".into()));
    }
    let strategy = match strategy {
        "auto" => None,
        s => Some(s.parse::<Strategy>()?),
    };
    let opts = ReduceOptions { strategy, budget: cli.budget };
    let ds = files.iter().map(|f| load(f)).collect::<Result<Vec<_>, _>>()?;
    let rules = rules_by_system(cli, &ds)?;
    let results: Vec<Result<Reduction, ReduceFailure>> =
        par_map(cli.jobs, &ds, |d| reduce_with(d, &rules[&d.sys.header()], &opts));
    if let Some(dir) = trace_dir {
        fs::create_dir_all(dir).map_err(|e| Fail(INVALID, format!("{}: {e}", dir.display())))?;
    }
    let mut code = OK;
    for (f, r) in files.iter().zip(&results) {
        let t = match r {
            Ok(red) => {
                println!(
                    "{}: reduced by {} in {} steps ({} primitive)",
                    f.display(),
                    red.strategy,
                    red.trace.entries.len(),
                    red.trace.primitive_count()
                );
                &red.trace
            }
            Err(e) => {
                code = worst(code, failure_code(e.kind));
                println!("{}: {e} after {} steps", f.display(), e.partial.entries.len());
                &e.partial
            }
        };
        let out = match (trace, trace_dir) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(dir)) => {
                let stem = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Some(dir.join(format!("{stem}.trace")))
            }
            _ => None,
        };
        if let Some(p) = out {
            write_atomic(&p, &serialize_trace(t))?;
        }
    }
    Ok(code)
}

fn generate(cli: &Cli, group: &GroupArg, count: usize, size: usize, out: &Path) -> Result<u8, Fail> {
    let sys = group.system()?;
    let rules = rules_for(cli, &sys)?;
    let ds = match cli.jobs {
        #[cfg(feature = "parallel")]
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Fail(INVALID, e.to_string()))?
            .install(|| corpus(&sys, count, size, cli.seed, &rules)),
        _ => corpus(&sys, count, size, cli.seed, &rules),
    };
    fs::create_dir_all(out).map_err(|e| Fail(INVALID, format!("{}: {e}", out.display())))?;
    let width = count.saturating_sub(1).to_string().len().max(3);
    for (i, d) in ds.iter().enumerate() {
        write_atomic(&out.join(format!("{i:0width$}.diag")), &serialize(d))?;
    }
    println!("wrote {} diagrams to {}", ds.len(), out.display());
    Ok(OK)
}

fn verify(cli: &Cli, pairs: &[PathBuf], expand: bool) -> Result<u8, Fail> {
    if pairs.len() % 2 != 0 {
        return Err(Fail(INVALID, "expected `diagram trace` pairs".into()));
    }
    let mut items = Vec::new();
    for p in pairs.chunks(2) {
        let d = load(&p[0])?;
        let t = parse_trace(&read(&p[1])?).map_err(|e| Fail(INVALID, format!("{}: {e}", p[1].display())))?;
        items.push((d, t));
    }
    let ds: Vec<Diagram> = items.iter().map(|(d, _)| d.clone()).collect();
    let rules = rules_by_system(cli, &ds)?;
    let verdicts: Vec<Verdict> = par_map(cli.jobs, &items, |(d, t)| {
        let rs = &rules[&d.sys.header()];
        let v = verify_trace(d, t, rs);
        if !v.ok || !expand {
            return v;
        }
        match expand_macros(t) {
            Ok(flat) => verify_trace(d, &flat, rs),
            Err(e) => Verdict { ok: false, failing_step: None, reason: e.to_string() },
        }
    });
    let mut code = OK;
    for (p, v) in pairs.chunks(2).zip(&verdicts) {
        println!("{}: {v}", p[1].display());
        if !v.ok {
            code = INVALID;
        }
    }
    Ok(code)
}

fn word(cmd: &WordCmd) -> Result<u8, Fail> {
    let (group, text) = match cmd {
        WordCmd::Check { group, word }
        | WordCmd::Reduced { group, word }
        | WordCmd::First { group, word }
        | WordCmd::Rex { group, word } => (group, word),
        WordCmd::Compile { group, from, .. } => (group, from),
    };
    let sys = group.system()?;
    let w = parse_word(text)?;
    let cox = |e: coxdiag::coxeter::CoxeterError| Fail(INVALID, e.to_string());
    match cmd {
        WordCmd::Check { .. } => {
            let table = LengthTable::new(&sys).map_err(cox)?;
            let trivial = is_trivial_word(&sys, &w).map_err(cox)?;
            println!("{} length {}", if trivial { "trivial" } else { "nontrivial" }, table.length(&table.element(&w)));
        }
        WordCmd::Reduced { .. } => {
            let table = LengthTable::new(&sys).map_err(cox)?;
            let x = table.element(&w);
            for r in reduced_words(&sys, &x, table.length(&x)).map_err(cox)? {
                println!("{}", format_word(&r));
            }
        }
        WordCmd::First { .. } => println!("{}", format_word(&reduce_first_generator(&sys, &w).map_err(cox)?)),
        WordCmd::Rex { .. } => {
            let table = LengthTable::new(&sys).map_err(cox)?;
            let g = rex_graph(&sys, &table.element(&w)).map_err(cox)?;
            println!("{} words, connected: {}", g.nodes.len(), g.is_connected());
        }
        WordCmd::Compile { to, .. } => {
            let target = parse_word(to)?;
            let path = rex_path(&sys, &w, |x| x == target.as_slice())
                .ok_or_else(|| Fail(INVALID, "words are not reduced words of one element".into()))?;
            let d = compile_path(&sys, &w, &path).map_err(|e| Fail(INVALID, e.to_string()))?;
            print!("{}", serialize(&d));
        }
    }
    Ok(OK)
}

/// The A3 template with its certificate, and the commuting templates.
fn derive_zam(max_m: usize, out: &Path) -> Result<u8, Fail> {
    let rule = |e: coxdiag::rules::RuleError| Fail(INVALID, e.to_string());
    let a3 = Arc::new(build_system(Family::A, 3).map_err(|e| Fail(INVALID, e.to_string()))?);
    let cycle = derive_zam_template(&a3).map_err(rule)?;
    let mut templates = vec![cycle.template(&a3, 1).map_err(rule)?];
    for m in 2..=max_m {
        templates.push(commuting_template(m).map_err(rule)?);
    }
    write_template_dir(out, &templates).map_err(|e| Fail(INVALID, format!("{}: {e}", out.display())))?;
    let mut rs = RuleSet::empty();
    rs.insert(templates[0].clone());
    let cert = template_certificate(&rs, &templates[0].name).map_err(rule)?;
    let name = &templates[0].name;
    write_atomic(&out.join(format!("{name}.relation")), &serialize(&cert.glued))?;
    write_atomic(&out.join(format!("{name}.cert")), &serialize_trace(&cert.trace))?;
    println!(
        "{name}: cycle of {} words, sides of {} and {} vertices",
        cycle.len(),
        templates[0].sides[0].vertex_count(),
        templates[0].sides[1].vertex_count()
    );
    for t in &templates[1..] {
        println!("{}: sides of {} vertices", t.name, t.sides[0].vertex_count());
    }
    Ok(OK)
}
