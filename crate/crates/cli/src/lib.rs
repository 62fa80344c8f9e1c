//! The `pplab` command line: argument parsing and report rendering. Every
//! subcommand goes through [`run`], so tests can drive it without a process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pplab_core::action::{prim_action, GroupAction};
use pplab_core::catalog::{resolve_action, resolve_group, write_action_file};
use pplab_core::condition::{parse_condition, ConditionKind, FiniteOperation, MinorCondition};
use pplab_core::criterion::{action_criterion, fs_spectrum};
use pplab_core::forge::pipeline;
use pplab_core::hom::find_homomorphism;
use pplab_core::polymorphism::find_polymorphism;
use pplab_core::reduce::{reduce_to_simple, Verdict};
use pplab_core::structure::{connected_components, resolve_structure, structure_of_action, Labels};
use pplab_core::subgroups::{is_simple, maximal_subgroups};
use pplab_core::{Budget, Error};

/// Exit code, report text and any files written.
#[derive(Debug)]
pub struct CommandResult {
    /// 0 success, 1 a negative mathematical answer, 2 budget or usage error.
    pub code: i32,
    pub report: String,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "pplab", version, about = "Group actions, polymorphisms and minor conditions")]
struct Cli {
    /// Cap for every enumeration and search (default: built-in caps)
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Groups from the catalog or group files
    #[command(subcommand)]
    Group(GroupCmd),
    /// Relational structures (built-in names or JSON files)
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Minor conditions and polymorphisms
    #[command(subcommand)]
    Cond(CondCmd),
    /// Explicit operation constructions
    #[command(subcommand)]
    Forge(ForgeCmd),
    /// Reduce an action to a fixed point or a simple group
    Reduce {
        /// Action file or `<group>[:natural|:regular|:prim]`
        #[arg(long)]
        action: String,
    },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Order, simplicity and maximal subgroup classes
    Info { spec: String },
    /// The action on all primitive quotients, as a structure
    Prim(PrimArgs),
}

#[derive(Args, Debug)]
struct PrimArgs {
    spec: String,
    /// Write the generator structure as DOT
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the generator structure as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the action in the group file format
    #[arg(long)]
    action: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum StructureCmd {
    /// Connected components
    Components { file: String },
    /// Search for a homomorphism from the first structure to the second
    Hom { a: String, b: String },
}

#[derive(Subcommand, Debug)]
enum CondCmd {
    /// Does the structure have polymorphisms satisfying the condition?
    Check {
        #[arg(long)]
        structure: String,
        /// maltsev, majority, cyclic:p, fs:n, ts:n, gmin:n, gp:n:k, symgp:n,
        /// compat:n or action:<spec>
        #[arg(long)]
        cond: String,
    },
    /// Does S(G on X) satisfy the condition of the action H on Y?
    Criterion {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Arities n for which S(G on prim(G)) has no fully symmetric n-ary polymorphism
    FsSpectrum {
        spec: String,
        #[arg(long, default_value_t = 25)]
        upto: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ForgeCmd {
    /// Build and check every operation from a majority and a Maltsev operation
    Pipeline {
        #[arg(long, default_value_t = 2)]
        domain: usize,
        #[arg(long, default_value_t = 5)]
        max: usize,
        /// Also write the report to this file
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

struct Output {
    code: i32,
    text: String,
    artifacts: Vec<PathBuf>,
}

impl Output {
    fn new() -> Self {
        Output {
            code: 0,
            text: String::new(),
            artifacts: Vec::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn write_file(&mut self, path: &PathBuf, contents: &str) -> Result<(), Error> {
        std::fs::write(path, contents)?;
        self.artifacts.push(path.clone());
        Ok(())
    }
}

/// Parse `argv` (program name first) and run the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandResult {
                code,
                report: e.render().to_string(),
                artifacts: Vec::new(),
            };
        }
    };
    let budget = cli.budget.map(Budget::with_enumeration_cap).unwrap_or_default();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(&cli.command, &budget)),
        Err(e) => Err(Error::Precondition(format!("thread pool: {e}"))),
    };
    match result {
        Ok(out) => CommandResult {
            code: out.code,
            report: out.text,
            artifacts: out.artifacts,
        },
        Err(e) => CommandResult {
            code: 2,
            report: format!("error: {e}\n"),
            artifacts: Vec::new(),
        },
    }
}

fn dispatch(cmd: &Command, budget: &Budget) -> Result<Output, Error> {
    match cmd {
        Command::Group(GroupCmd::Info { spec }) => group_info(spec, budget),
        Command::Group(GroupCmd::Prim(args)) => group_prim(args, budget),
        Command::Structure(StructureCmd::Components { file }) => components(file),
        Command::Structure(StructureCmd::Hom { a, b }) => hom(a, b, budget),
        Command::Cond(CondCmd::Check { structure, cond }) => cond_check(structure, cond, budget),
        Command::Cond(CondCmd::Criterion { g, h }) => criterion(g, h, budget),
        Command::Cond(CondCmd::FsSpectrum { spec, upto }) => spectrum(spec, *upto, budget),
        Command::Forge(ForgeCmd::Pipeline { domain, max, report }) => forge(*domain, *max, report.as_ref(), budget),
        Command::Reduce { action } => reduce(action, budget),
    }
}

fn group_info(spec: &str, budget: &Budget) -> Result<Output, Error> {
    let g = resolve_group(spec)?;
    let mut out = Output::new();
    out.line(g.describe());
    out.line(format!("order: {}", g.order()));
    if g.order() < 2 {
        out.line("trivial group");
        return Ok(out);
    }
    out.line(format!("simple: {}", is_simple(&g, budget)?));
    out.line(format!("abelian: {}", g.is_abelian()));
    let classes = maximal_subgroups(&g, budget)?;
    out.line(format!("maximal subgroup classes: {}", classes.len()));
    for (i, c) in classes.iter().enumerate() {
        out.line(format!(
            "  M{}: order {}, index {}, {} conjugates",
            i + 1,
            c.order,
            c.index_in(&g),
            c.class_size
        ));
    }
    Ok(out)
}

fn group_prim(args: &PrimArgs, budget: &Budget) -> Result<Output, Error> {
    let g = resolve_group(&args.spec)?;
    let classes = maximal_subgroups(&g, budget)?;
    let prim = prim_action(&g, budget)?;
    let s = structure_of_action(&prim, Labels::Generators);
    let comps = connected_components(&s);
    let mut out = Output::new();
    out.line(g.describe());
    let orders: Vec<String> = classes.iter().map(|c| c.order.to_string()).collect();
    out.line(format!("maximal subgroup classes: {} (orders {})", classes.len(), orders.join(", ")));
    out.line(format!("points: {}", prim.points()));
    let sizes: Vec<String> = comps.iter().map(|c| c.len().to_string()).collect();
    out.line(format!("components: {} (sizes {})", comps.len(), sizes.join(", ")));
    for (i, c) in comps.iter().enumerate() {
        let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
        out.line(format!("  component {}: {}", i + 1, pts.join(" ")));
    }
    if let Some(p) = &args.json {
        out.write_file(p, &s.to_json())?;
    }
    if let Some(p) = &args.dot {
        out.write_file(p, &s.to_dot()?)?;
    }
    if let Some(p) = &args.action {
        out.write_file(p, &write_action_file(&prim))?;
    }
    Ok(out)
}

fn components(file: &str) -> Result<Output, Error> {
    let s = resolve_structure(file)?;
    let comps = connected_components(&s);
    let mut out = Output::new();
    out.line(format!("points: {}", s.domain));
    let sizes: Vec<String> = comps.iter().map(|c| c.len().to_string()).collect();
    out.line(format!("components: {} (sizes {})", comps.len(), sizes.join(", ")));
    for (i, c) in comps.iter().enumerate() {
        let pts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
        out.line(format!("  component {}: {}", i + 1, pts.join(" ")));
    }
    Ok(out)
}

fn hom(a: &str, b: &str, budget: &Budget) -> Result<Output, Error> {
    let sa = resolve_structure(a)?;
    let sb = resolve_structure(b)?;
    let mut out = Output::new();
    match find_homomorphism(&sa, &sb, budget)? {
        Some(map) => {
            let m: Vec<String> = map.iter().map(|x| x.to_string()).collect();
            out.line(format!("homomorphism: {}", m.join(" ")));
        }
        None => {
            out.code = 1;
            out.line("no homomorphism");
        }
    }
    Ok(out)
}

fn kind_name(kind: &ConditionKind) -> String {
    match kind {
        ConditionKind::Maltsev => "quasi Maltsev".into(),
        ConditionKind::Majority => "quasi majority".into(),
        other => other.to_string(),
    }
}

fn render_table(op: &FiniteOperation) -> String {
    op.table().iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")
}

fn cond_check(structure: &str, cond: &str, budget: &Budget) -> Result<Output, Error> {
    let s = resolve_structure(structure)?;
    let c: MinorCondition = parse_condition(cond, |spec| resolve_action(spec, budget))?;
    let mut out = Output::new();
    match find_polymorphism(&s, &c, budget)? {
        Some(ops) => {
            out.line(format!("{} polymorphism found", kind_name(&c.kind)));
            for (name, op) in &ops {
                if op.table().len() <= 4096 {
                    out.line(format!("  {name}/{}: {}", op.arity(), render_table(op)));
                } else {
                    out.line(format!("  {name}/{}: table of {} entries", op.arity(), op.table().len()));
                }
            }
        }
        None => {
            out.code = 1;
            out.line(format!("no {} polymorphism", kind_name(&c.kind)));
        }
    }
    Ok(out)
}

fn describe_action(a: &GroupAction) -> String {
    format!(
        "{} (order {}) on {} points",
        a.group().name().unwrap_or("group"),
        a.group().order(),
        a.points()
    )
}

fn criterion(g: &str, h: &str, budget: &Budget) -> Result<Output, Error> {
    let gact = resolve_action(g, budget)?;
    let hact = resolve_action(h, budget)?;
    let mut out = Output::new();
    out.line(format!("G: {}", describe_action(&gact)));
    out.line(format!("H: {}", describe_action(&hact)));
    if action_criterion(&gact, &hact, budget)? {
        out.line("satisfied: every map has a stabilizer with a fixed point");
    } else {
        out.code = 1;
        out.line("not satisfied: some map has a fixed-point-free stabilizer");
    }
    Ok(out)
}

fn spectrum(spec: &str, upto: usize, budget: &Budget) -> Result<Output, Error> {
    let g = resolve_group(spec)?;
    let s = fs_spectrum(&g, upto, budget)?;
    let mut out = Output::new();
    let sizes: Vec<String> = s.component_sizes.iter().map(|k| k.to_string()).collect();
    out.line(format!("component sizes: {}", sizes.join(", ")));
    let failing: Vec<String> = s.failing.iter().map(|k| k.to_string()).collect();
    out.line(format!("failing arities up to {}: {}", s.upto, failing.join(", ")));
    out.line(format!("smallest failing arity: {}", s.smallest_failing));
    match s.conductor {
        Some(c) => out.line(format!("fails for every arity >= {c}")),
        None => out.line("no conductor (component sizes share a factor)"),
    }
    out.line(format!("smallest index of a maximal subgroup: {}", s.smallest_index));
    out.line(format!("largest index of a maximal subgroup: {}", s.largest_index));
    out.line(format!("failing set: {}", s.describe()));
    Ok(out)
}

fn forge(domain: usize, max: usize, report: Option<&PathBuf>, budget: &Budget) -> Result<Output, Error> {
    if domain != 2 {
        return Err(Error::Precondition("only --domain 2 is supported".into()));
    }
    let r = pipeline(&FiniteOperation::majority3(), &FiniteOperation::xor3(), max, budget)?;
    let mut out = Output::new();
    out.text.push_str(&r.to_string());
    if r.failures() > 0 {
        out.code = 1;
    }
    if let Some(p) = report {
        let text = out.text.clone();
        out.write_file(p, &text)?;
    }
    Ok(out)
}

fn reduce(action: &str, budget: &Budget) -> Result<Output, Error> {
    let a = resolve_action(action, budget)?;
    let r = reduce_to_simple(&a, budget)?;
    let mut out = Output::new();
    for (i, s) in r.steps.iter().enumerate() {
        out.line(format!("{}. {s}", i + 1));
    }
    match &r.verdict {
        Verdict::FixedPoint(x) => out.line(format!("verdict: fixed point {x}")),
        Verdict::Simple(act) => {
            out.line(format!("verdict: simple group of order {}", act.group().order()));
            let _ = write!(out.text, "{}", write_action_file(act));
        }
    }
    Ok(out)
}
