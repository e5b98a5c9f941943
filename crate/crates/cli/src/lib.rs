//! Command-line driver for the `locsim` library.

pub mod descriptor;
pub mod dot;

use std::fmt;
use std::fmt::Write;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use locsim::freeness::{ball_sequence, pingpong_witness, reduced_word_check, verify_pingpong, WordCheck};
use locsim::group::{closure, finite_analyze, ClosureResult, GroupElement, OrderResult};
use locsim::poset::{
    act, admissible_group, common_refinement, enumerate_partitions, is_member, isotropy_membership, refines, Isotropy,
    Membership, PartitionChain, PosetVertex, DEFAULT_BLOCK_CAP, DEFAULT_ENUMERATION_BUDGET,
};
use locsim::simstruct::{
    dual_contraction, parse_similarity, separating_census, Census, SimStructure, DEFAULT_DEPTH_BOUND,
};
use locsim::ultrametric::{Partition, Point};
use locsim::Error;

pub use descriptor::GroupDescriptor;

/// A structured diagnostic: a stable code, where the problem was found,
/// and a human-readable message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: String,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    fn new(code: impl Into<String>, location: impl Into<String>, message: impl Into<String>) -> Diagnostic {
        Diagnostic { code: code.into(), location: location.into(), message: message.into() }
    }

    fn from_error(e: &Error, location: &str) -> Diagnostic {
        let location = match e {
            Error::Syntax { line, .. } if *line > 0 => format!("{location}:{line}"),
            _ => location.to_string(),
        };
        Diagnostic::new(error_code(e), location, e.to_string())
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}] at {}: {}", self.code, self.location, self.message)
    }
}

/// The variant name of a library error.
pub fn error_code(e: &Error) -> String {
    format!("{e:?}").chars().take_while(char::is_ascii_alphanumeric).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl CommandResult {
    fn ok(stdout: String) -> CommandResult {
        CommandResult { exit_code: 0, stdout, diagnostics: Vec::new() }
    }

    /// A negative answer: the output is still printed, exit code 1.
    fn negative(stdout: String, d: Diagnostic) -> CommandResult {
        CommandResult { exit_code: 1, stdout, diagnostics: vec![d] }
    }

    fn failed(d: Diagnostic) -> CommandResult {
        CommandResult { exit_code: 1, stdout: String::new(), diagnostics: vec![d] }
    }
}

#[derive(Parser, Debug)]
#[command(name = "locsim", version, about = "Local similarity groups of ultrametric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GroupArg {
    /// Preset (`vd<d>`, `vd<d>-full`, `mirror`) or descriptor file.
    #[arg(long)]
    group: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Product of elements; the last one acts first.
    Mul {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long = "elem", required = true)]
        elems: Vec<String>,
    },
    /// Inverse of an element.
    Inv {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        elem: String,
    },
    /// Order of an element, up to a bound.
    Order {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        elem: String,
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Image of an eventually constant point.
    Eval {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        elem: String,
        /// `001(1)` for the word 0011…, or a leaf address.
        #[arg(long)]
        point: String,
    },
    /// Class of a similarity line and whether the structure contains it.
    Classify {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        sim: String,
    },
    /// A dually contracting pair of balls, if one exists.
    DualContraction {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = DEFAULT_DEPTH_BOUND)]
        depth: usize,
    },
    /// Verify the ping-pong pair and print each check.
    Pingpong {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        dot: bool,
        /// Also check reduced words up to this many syllables.
        #[arg(long)]
        words: Option<usize>,
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Nested sequences of disjoint balls reachable from the root.
    BallSeq {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Separating similarities up to a depth.
    Census {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = DEFAULT_DEPTH_BOUND)]
        depth: usize,
    },
    /// Generated subgroup, up to a size budget.
    Closure {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long = "elem", required = true)]
        elems: Vec<String>,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        /// Print every element of a finite closure.
        #[arg(long)]
        list: bool,
    },
    /// Order and block decomposition of a group on a finite space.
    FiniteAnalyze {
        #[command(flatten)]
        group: GroupArg,
    },
    /// Partition poset queries.
    #[command(subcommand)]
    Poset(PosetCommand),
    /// Ball hierarchy as Graphviz DOT or indented text.
    ExportDot {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum PosetCommand {
    /// Whether a partition lies in `P_n`.
    Member {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH_BOUND)]
        depth_budget: usize,
    },
    /// Whether `q` refines `p`.
    Refines {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// A common refinement of two members of `P_n`.
    Meet {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH_BOUND)]
        depth_budget: usize,
    },
    /// Image of a partition under an element.
    Act {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        elem: String,
        #[arg(long)]
        partition: String,
    },
    /// Whether an element stabilizes every vertex of a chain.
    Isotropy {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        elem: String,
        /// Chain vertices, coarsest first.
        #[arg(long = "vertex", required = true)]
        vertices: Vec<String>,
    },
    /// Block permutations compatible with a chain of partitions.
    Admissible {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long = "vertex", required = true)]
        vertices: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_BLOCK_CAP)]
        cap: usize,
    },
    /// Ball partitions of bounded depth, optionally only members of `P_n`.
    Enumerate {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Dot,
    Text,
}

/// Runs one command line, `argv[0]` being the program name.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult::ok(text),
                _ => CommandResult {
                    exit_code: 2,
                    stdout: String::new(),
                    diagnostics: vec![Diagnostic::new("Usage", "argv", text.trim_end())],
                },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(d) => CommandResult::failed(d),
    }
}

type Outcome = std::result::Result<CommandResult, Diagnostic>;

trait At<T> {
    fn at(self, location: &str) -> std::result::Result<T, Diagnostic>;
}

impl<T> At<T> for locsim::Result<T> {
    fn at(self, location: &str) -> std::result::Result<T, Diagnostic> {
        self.map_err(|e| Diagnostic::from_error(&e, location))
    }
}

fn load_group(arg: &GroupArg) -> std::result::Result<Arc<SimStructure>, Diagnostic> {
    let location = format!("--group {}", arg.group);
    GroupDescriptor::load(&arg.group).and_then(|d| d.build()).at(&location)
}

/// Parses an element in the canonical text format against a descriptor.
pub fn parse_element(descriptor: &GroupDescriptor, text: &str) -> locsim::Result<GroupElement> {
    GroupElement::parse(&descriptor.build()?, text)
}

/// `@id`, `@a1`, `@a2`, or a file holding an element.
fn load_element(s: &Arc<SimStructure>, arg: &str) -> std::result::Result<GroupElement, Diagnostic> {
    match arg {
        "@id" => Ok(GroupElement::identity(s)),
        "@a1" | "@a2" => {
            let w = pingpong_witness(s).at(arg)?;
            Ok(if arg == "@a1" { w.a1 } else { w.a2 })
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Diagnostic::new("Io", path, format!("cannot read element: {e}")))?;
            GroupElement::parse(s, &text).at(path)
        }
    }
}

fn load_partition(s: &SimStructure, arg: &str, flag: &str) -> std::result::Result<Partition, Diagnostic> {
    Partition::parse(s.space(), arg).at(&format!("{flag} {arg}"))
}

fn lines(text: impl fmt::Display) -> String {
    let mut out = text.to_string().trim_end().to_string();
    out.push('\n');
    out
}

fn vertex_text(v: &PosetVertex) -> String {
    let mut out = format!("partition {}\n", v.partition);
    for (i, w) in &v.marked {
        writeln!(out, "marked {}", v.partition.blocks()[*i]).unwrap();
        for e in w.entries() {
            writeln!(out, "  {e}").unwrap();
        }
    }
    out
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Mul { group, elems } => {
            let s = load_group(&group)?;
            let mut acc = GroupElement::identity(&s);
            for e in &elems {
                acc = acc.compose(&load_element(&s, e)?).at(e)?;
            }
            Ok(CommandResult::ok(lines(acc)))
        }
        Command::Inv { group, elem } => {
            let s = load_group(&group)?;
            Ok(CommandResult::ok(lines(load_element(&s, &elem)?.inverse())))
        }
        Command::Order { group, elem, bound } => {
            let s = load_group(&group)?;
            match load_element(&s, &elem)?.order(bound) {
                OrderResult::Finite(n) => Ok(CommandResult::ok(format!("{n}\n"))),
                OrderResult::ExceedsBound(b) => Ok(CommandResult::negative(
                    format!("exceeds {b}\n"),
                    Diagnostic::new("OrderExceedsBound", elem, format!("no power up to {b} is the identity")),
                )),
            }
        }
        Command::Eval { group, elem, point } => {
            let s = load_group(&group)?;
            let g = load_element(&s, &elem)?;
            let x: Point = point.parse().at(&format!("--point {point}"))?;
            Ok(CommandResult::ok(format!("{}\n", g.evaluate(&x).at(&format!("--point {point}"))?)))
        }
        Command::Classify { group, sim } => {
            let s = load_group(&group)?;
            let g = parse_similarity(s.space(), &sim, 1).at("--sim")?;
            Ok(CommandResult::ok(format!("class {}\nmember {}\n", g.classify(), s.contains(&g))))
        }
        Command::DualContraction { group, depth } => {
            let s = load_group(&group)?;
            match dual_contraction(&s, depth) {
                Some(w) => Ok(CommandResult::ok(format!(
                    "B1 {}\nB2 {}\ngamma1 {}\ngamma2 {}\n",
                    w.b1.quoted(),
                    w.b2.quoted(),
                    w.g1,
                    w.g2
                ))),
                None => Ok(CommandResult::negative(
                    "none\n".into(),
                    Diagnostic::new(
                        "NotDuallyContracting",
                        format!("--group {}", group.group),
                        format!("no witness within depth {depth}"),
                    ),
                )),
            }
        }
        Command::Pingpong { group, dot, words, bound } => {
            let s = load_group(&group)?;
            let loc = format!("--group {}", group.group);
            let w = pingpong_witness(&s).at(&loc)?;
            if dot {
                return Ok(CommandResult::ok(dot::pingpong_dot(&w)));
            }
            let t = verify_pingpong(&w, bound).at(&loc)?;
            let mut out = String::new();
            for (name, ok) in &t.checks {
                writeln!(out, "CHECK {name}: {}", if *ok { "PASS" } else { "FAIL" }).unwrap();
            }
            let mut holds = t.conclusion;
            if let Some(n) = words {
                let ok = matches!(reduced_word_check(&w, n).at(&loc)?, WordCheck::Pass { .. });
                writeln!(out, "CHECK reduced-words<={n}: {}", if ok { "PASS" } else { "FAIL" }).unwrap();
                holds &= ok;
            }
            if holds {
                out.push_str("CONCLUSION <a1,a2> = Z3 * Z2\n");
                Ok(CommandResult::ok(out))
            } else {
                out.push_str("CONCLUSION not established\n");
                Ok(CommandResult::negative(out, Diagnostic::new("PingPongFailed", loc, "some check failed")))
            }
        }
        Command::BallSeq { group, levels } => {
            let s = load_group(&group)?;
            let seq = ball_sequence(&s, levels).at(&format!("--group {}", group.group))?;
            Ok(CommandResult::ok(seq.to_string()))
        }
        Command::Census { group, depth } => {
            let s = load_group(&group)?;
            match separating_census(&s, depth) {
                Census::Finite(n) => Ok(CommandResult::ok(format!("finite {n}\n"))),
                Census::Infinite { source, separating } => {
                    let mut out = format!("infinite\nsource {source}\n");
                    for g in separating {
                        writeln!(out, "separating {g}").unwrap();
                    }
                    Ok(CommandResult::ok(out))
                }
                Census::ExhaustedBound(b) => Ok(CommandResult::negative(
                    format!("unknown depth {b}\n"),
                    Diagnostic::new(
                        "CensusExhausted",
                        format!("--depth {depth}"),
                        "no contracting or separating similarity found",
                    ),
                )),
            }
        }
        Command::Closure { group, elems, budget, list } => {
            let s = load_group(&group)?;
            let gens = elems.iter().map(|e| load_element(&s, e)).collect::<std::result::Result<Vec<_>, _>>()?;
            match closure(&s, &gens, budget).at("--elem")? {
                ClosureResult::Finite(all) => {
                    let mut out = format!("finite {}\n", all.len());
                    if list {
                        for g in &all {
                            out.push_str(&lines(g));
                        }
                    }
                    Ok(CommandResult::ok(out))
                }
                ClosureResult::SizeBudgetExceeded(b) => Ok(CommandResult::negative(
                    format!("exceeds {b}\n"),
                    Diagnostic::new(
                        "ClosureBudgetExceeded",
                        format!("--budget {budget}"),
                        format!("more than {b} elements"),
                    ),
                )),
            }
        }
        Command::FiniteAnalyze { group } => {
            let s = load_group(&group)?;
            let loc = format!("--group {}", group.group);
            let r = finite_analyze(&s).at(&loc)?;
            let out = lines(&r);
            if r.product_matches() && r.conditions_agree() {
                Ok(CommandResult::ok(out))
            } else {
                Ok(CommandResult::negative(
                    out,
                    Diagnostic::new("ProductMismatch", loc, "enumeration disagrees with the class sizes"),
                ))
            }
        }
        Command::Poset(p) => dispatch_poset(p),
        Command::ExportDot { group, depth, format } => {
            let s = load_group(&group)?;
            Ok(CommandResult::ok(match format {
                Format::Dot => dot::hierarchy_dot(s.space(), depth),
                Format::Text => dot::hierarchy_text(s.space(), depth),
            }))
        }
    }
}

fn dispatch_poset(command: PosetCommand) -> Outcome {
    match command {
        PosetCommand::Member { group, partition, n, depth_budget } => {
            let s = load_group(&group)?;
            let p = load_partition(&s, &partition, "--partition")?;
            match is_member(&s, &p, n, depth_budget) {
                Membership::Member(v) => Ok(CommandResult::ok(format!("member\n{}", vertex_text(&v)))),
                Membership::NotMember(v) => Ok(CommandResult::negative(
                    format!("not-member\n{}", vertex_text(&v)),
                    Diagnostic::new(
                        "NotMember",
                        format!("--partition {partition}"),
                        format!("{} of {n} required blocks marked", v.marked_count()),
                    ),
                )),
            }
        }
        PosetCommand::Refines { group, p, q } => {
            let s = load_group(&group)?;
            let pp = load_partition(&s, &p, "--p")?;
            let qq = load_partition(&s, &q, "--q")?;
            if refines(s.space(), &pp, &qq) {
                Ok(CommandResult::ok("true\n".into()))
            } else {
                Ok(CommandResult::negative(
                    "false\n".into(),
                    Diagnostic::from_error(&Error::NotRefinement, &format!("--q {q}")),
                ))
            }
        }
        PosetCommand::Meet { group, p, q, n, depth_budget } => {
            let s = load_group(&group)?;
            let pp = load_partition(&s, &p, "--p")?;
            let qq = load_partition(&s, &q, "--q")?;
            let v = common_refinement(&s, &pp, &qq, n, depth_budget).at("--p/--q")?;
            Ok(CommandResult::ok(vertex_text(&v)))
        }
        PosetCommand::Act { group, elem, partition } => {
            let s = load_group(&group)?;
            let g = load_element(&s, &elem)?;
            let p = load_partition(&s, &partition, "--partition")?;
            Ok(CommandResult::ok(format!("{}\n", act(&g, &p).at(&elem)?)))
        }
        PosetCommand::Isotropy { group, elem, vertices } => {
            let s = load_group(&group)?;
            let g = load_element(&s, &elem)?;
            let chain = load_chain(&s, &vertices)?;
            match isotropy_membership(&g, &chain).at(&elem)? {
                Isotropy::InIsotropy(pi) => Ok(CommandResult::ok(format!("in-isotropy {}\n", pi.image_string()))),
                Isotropy::NotIn => Ok(CommandResult::negative(
                    "not-in\n".into(),
                    Diagnostic::new("NotInIsotropy", elem, "the element does not stabilize the chain"),
                )),
            }
        }
        PosetCommand::Admissible { group, vertices, cap } => {
            let s = load_group(&group)?;
            let chain = load_chain(&s, &vertices)?;
            let a = admissible_group(&chain, cap).at("--vertex")?;
            let mut out = format!("order {}\n", a.order());
            for pi in &a.elements {
                writeln!(out, "{}", pi.image_string()).unwrap();
            }
            Ok(CommandResult::ok(out))
        }
        PosetCommand::Enumerate { group, depth, n, dot } => {
            let s = load_group(&group)?;
            let mut parts =
                enumerate_partitions(s.space(), depth, DEFAULT_ENUMERATION_BUDGET).at(&format!("--depth {depth}"))?;
            if let Some(n) = n {
                parts.retain(|p| is_member(&s, p, n, DEFAULT_DEPTH_BOUND).is_member());
            }
            if dot {
                return Ok(CommandResult::ok(dot::hasse_dot(s.space(), &parts)));
            }
            let mut out = format!("count {}\n", parts.len());
            for p in &parts {
                writeln!(out, "{p}").unwrap();
            }
            Ok(CommandResult::ok(out))
        }
    }
}

fn load_chain(s: &SimStructure, vertices: &[String]) -> std::result::Result<PartitionChain, Diagnostic> {
    let parts =
        vertices.iter().map(|v| load_partition(s, v, "--vertex")).collect::<std::result::Result<Vec<_>, _>>()?;
    PartitionChain::new(s.space(), parts).at("--vertex")
}
