//! Command-line front end.
//!
//! Exit codes: 0 decided true or success, 1 decided false, 2 usage or
//! configuration error, 3 runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::abstract_lattice::{AbstractFd, GeneratorSet, DEFAULT_MATERIALIZE_CAP};
use crate::cnf::Cnf;
use crate::context::{validate_context, ContextSpec, SchemaContext, Severity};
use crate::decision::{decide, reduce_3sat, ClassicalFd, Problem, SearchOptions, Verdict, Witness};
use crate::dot::{abstract_lattice_dot, finite_lattice_dot};
use crate::oracle::brute_decide;
use crate::realities::{
    check_fd_under_reality, count_realities, count_strong_realities, enumerate_realities,
    enumerate_strong_realities, Reality, RealityFile,
};
use crate::relation::Relation;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "comparability",
    version,
    about = "Lattice-valued comparability, abstract functional dependencies and certain/possible FDs"
)]
pub struct Cli {
    /// Schema context (JSON)
    #[arg(long, global = true, value_name = "FILE")]
    context: Option<PathBuf>,
    /// Relation (CSV with a header row)
    #[arg(long, global = true, value_name = "FILE")]
    relation: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Sequential search with a fixed exploration order
    #[arg(long, global = true)]
    deterministic: bool,
    /// Cross-check decisions against exhaustive enumeration
    #[arg(long, global = true, hide = true)]
    oracle: bool,
    /// Upper bound on materialized or enumerated elements
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_MATERIALIZE_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct FdArgs {
    /// Left-hand side, e.g. `B,C`
    #[arg(long, allow_hyphen_values = true)]
    lhs: String,
    /// Right-hand side attribute
    #[arg(long)]
    rhs: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the context (and the relation, if given) for errors and warnings
    Validate,
    /// List the generators of the abstract lattice
    Generators,
    /// Closure of an abstract tuple, e.g. `--tuple gb,d,i`
    Closure {
        #[arg(long)]
        tuple: String,
    },
    /// Check an abstract FD between two abstract tuples
    Afd {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Check a classical FD under a reality (classical equality by default)
    Fd {
        #[command(flatten)]
        fd: FdArgs,
        /// Reality file: {"thresholds": {...}} or {"coprimes": {...}}
        #[arg(long, value_name = "FILE")]
        reality: Option<PathBuf>,
    },
    /// Does the FD hold under every reality?
    Certain(FdArgs),
    /// Does the FD hold under some reality?
    Possible(FdArgs),
    /// Does the FD hold under every strong reality?
    StronglyCertain(FdArgs),
    /// Does the FD hold under some strong reality?
    StronglyPossible(FdArgs),
    /// Materialize the abstract lattice, or show one attribute's truth lattice
    Lattice {
        /// Write a Graphviz drawing here
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Show this attribute's truth lattice instead
        #[arg(long)]
        attribute: Option<String>,
    },
    /// List or count realities
    Realities {
        #[arg(long, conflicts_with = "count")]
        list: bool,
        #[arg(long)]
        count: bool,
        /// Only strong realities
        #[arg(long)]
        strong: bool,
    },
    /// Build a strong-possible instance from a 3CNF formula
    #[command(name = "reduce-3sat")]
    Reduce3sat {
        /// DIMACS file
        #[arg(long, value_name = "FILE")]
        cnf: PathBuf,
        /// Output directory for context.json, relation.csv and fd.json
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Runtime(String),
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// What a command produced: an exit code plus a JSON document and its text
/// rendering.
struct Output {
    code: i32,
    json: Json,
    text: String,
}

impl Output {
    fn ok(json: Json, text: String) -> Self {
        Output { code: EXIT_TRUE, json, text }
    }

    fn decided(answer: bool, json: Json, text: String) -> Self {
        Output {
            code: if answer { EXIT_TRUE } else { EXIT_FALSE },
            json,
            text,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
                return EXIT_TRUE;
            }
            let _ = write!(err, "{rendered}");
            return EXIT_CONFIG;
        }
    };
    let format = cli.format;
    match execute(&cli) {
        Ok(o) => {
            let _ = match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&o.json).unwrap()),
                Format::Text => write!(out, "{}", o.text),
            };
            o.code
        }
        Err(e) => {
            let (kind, message, code) = match e {
                CliError::Config(m) => ("config", m, EXIT_CONFIG),
                CliError::Runtime(m) => ("runtime", m, EXIT_RUNTIME),
            };
            let _ = match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    json!({ "error": { "kind": kind, "message": message } })
                ),
                Format::Text => writeln!(err, "error: {message}"),
            };
            code
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl Cli {
    fn context_spec(&self) -> Result<ContextSpec, CliError> {
        let path = self
            .context
            .as_ref()
            .ok_or_else(|| config("--context is required for this command"))?;
        ContextSpec::from_json(&read(path)?).map_err(config)
    }

    fn schema(&self) -> Result<Arc<SchemaContext>, CliError> {
        SchemaContext::from_spec(&self.context_spec()?)
            .map(Arc::new)
            .map_err(config)
    }

    fn relation(&self, schema: Arc<SchemaContext>) -> Result<Relation, CliError> {
        let path = self
            .relation
            .as_ref()
            .ok_or_else(|| config("--relation is required for this command"))?;
        let file = fs::File::open(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Relation::load_csv(schema, file).map_err(config)
    }

    fn generators(&self) -> Result<GeneratorSet, CliError> {
        let relation = self.relation(self.schema()?)?;
        let gens = if self.deterministic {
            GeneratorSet::from_relation_sequential(&relation)
        } else {
            GeneratorSet::from_relation(&relation)
        };
        gens.map_err(config)
    }

    fn search_options(&self) -> SearchOptions {
        if self.deterministic {
            SearchOptions::deterministic()
        } else {
            SearchOptions::default()
        }
    }
}

fn plain(schema: &SchemaContext, x: &crate::abstract_lattice::AbstractTuple) -> String {
    schema.element_names(x).join(",")
}

fn names_line(names: &std::collections::BTreeMap<String, String>) -> String {
    names
        .iter()
        .map(|(a, e)| format!("{a}={e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate => validate(cli),
        Command::Generators => {
            let gens = cli.generators()?;
            let s = gens.schema();
            let list: Vec<String> = gens.generators().iter().map(|m| plain(s, m)).collect();
            let text = list.iter().map(|l| format!("{l}\n")).collect();
            Ok(Output::ok(json!({ "count": list.len(), "generators": list }), text))
        }
        Command::Closure { tuple } => {
            let gens = cli.generators()?;
            let s = gens.schema();
            let x = s.parse_tuple(tuple).map_err(config)?;
            let c = plain(s, &gens.closure(&x));
            Ok(Output::ok(
                json!({ "tuple": plain(s, &x), "closure": c }),
                format!("{c}\n"),
            ))
        }
        Command::Afd { lhs, rhs } => {
            let gens = cli.generators()?;
            let s = gens.schema();
            let fd = AbstractFd::new(
                s.parse_tuple(lhs).map_err(config)?,
                s.parse_tuple(rhs).map_err(config)?,
            );
            let closure = plain(s, &gens.closure(&fd.lhs));
            let holds = gens.check_abstract_fd(&fd);
            Ok(Output::decided(
                holds,
                json!({
                    "lhs": plain(s, &fd.lhs),
                    "rhs": plain(s, &fd.rhs),
                    "closure": closure,
                    "holds": holds,
                }),
                format!("{holds}\nclosure of lhs: {closure}\n"),
            ))
        }
        Command::Fd { fd, reality } => {
            let gens = cli.generators()?;
            let s = gens.schema();
            let f = ClassicalFd::parse(s, &fd.lhs, &fd.rhs).map_err(config)?;
            let g = match reality {
                Some(path) => RealityFile::parse(&read(path)?)
                    .and_then(|r| r.to_reality(s))
                    .map_err(config)?,
                None => Reality::equality(s),
            };
            let holds = check_fd_under_reality(&gens, &g, f.lhs, f.rhs);
            let names = g.to_names(s);
            Ok(Output::decided(
                holds,
                json!({ "fd": f.format(s), "reality": { "thresholds": names }, "holds": holds }),
                format!("{holds}\nreality: {}\n", names_line(&names)),
            ))
        }
        Command::Certain(fd) => decision(cli, Problem::Certain, fd),
        Command::Possible(fd) => decision(cli, Problem::Possible, fd),
        Command::StronglyCertain(fd) => decision(cli, Problem::StronglyCertain, fd),
        Command::StronglyPossible(fd) => decision(cli, Problem::StronglyPossible, fd),
        Command::Lattice { dot, attribute } => lattice(cli, dot.as_deref(), attribute.as_deref()),
        Command::Realities { list, count, strong } => realities(cli, *list, *count, *strong),
        Command::Reduce3sat { cnf, out } => {
            let formula = Cnf::parse_dimacs(&read(cnf)?).map_err(config)?;
            let r = reduce_3sat(&formula).map_err(config)?;
            r.write(out).map_err(runtime)?;
            let s = r.schema();
            let fd = r.fd.format(s);
            Ok(Output::ok(
                json!({
                    "out": out.display().to_string(),
                    "attributes": s.len(),
                    "tuples": r.relation.len(),
                    "fd": fd,
                }),
                format!(
                    "wrote {} ({} attributes, {} tuples)\nfd: {fd}\n",
                    out.display(),
                    s.len(),
                    r.relation.len()
                ),
            ))
        }
    }
}

fn validate(cli: &Cli) -> Result<Output, CliError> {
    let spec = cli.context_spec()?;
    let report = validate_context(&spec);
    let mut text = String::new();
    for issue in &report.issues {
        let level = match issue.severity {
            Severity::Fatal => "fatal",
            Severity::Warning => "warning",
        };
        text.push_str(&format!("{level}: {issue}\n"));
    }
    let mut json = json!({ "valid": report.is_valid(), "issues": report.issues });
    if !report.is_valid() {
        text.push_str("invalid\n");
        return Ok(Output {
            code: EXIT_CONFIG,
            json,
            text,
        });
    }
    if cli.relation.is_some() {
        // comparing every pair surfaces reflexivity violations in the data
        let gens = cli.generators()?;
        json["generators"] = json!(gens.len());
        text.push_str(&format!("{} generators\n", gens.len()));
    }
    text.push_str("valid\n");
    Ok(Output::ok(json, text))
}

fn decision(cli: &Cli, problem: Problem, fd: &FdArgs) -> Result<Output, CliError> {
    let gens = cli.generators()?;
    let s = gens.schema();
    let f = ClassicalFd::parse(s, &fd.lhs, &fd.rhs).map_err(config)?;
    let v: Verdict = decide(problem, &gens, &f, cli.search_options()).map_err(runtime)?;
    let mut json = v.to_json(s);
    json["fd"] = json!(f.format(s));
    let mut text = format!("{problem} {}: {}\n", f.format(s), v.answer);
    match &v.witness {
        Some(Witness::Reality(g)) => {
            text.push_str(&format!("witness thresholds: {}\n", names_line(&g.to_names(s))))
        }
        Some(Witness::Strong(g)) => {
            text.push_str(&format!("witness coprimes: {}\n", names_line(&g.to_names(s))))
        }
        None => {}
    }
    if let Some(m) = &v.counterexample {
        text.push_str(&format!("counterexample: {}\n", plain(s, m)));
    }
    if cli.oracle {
        let expected = brute_decide(problem, &gens, &f, cli.cap as u128).map_err(runtime)?;
        if expected != v.answer {
            return Err(CliError::Runtime(format!(
                "decision procedure answered {} but enumeration gives {expected}",
                v.answer
            )));
        }
        json["oracle"] = json!(expected);
        text.push_str("oracle: agrees\n");
    }
    Ok(Output::decided(v.answer, json, text))
}

fn lattice(cli: &Cli, dot: Option<&Path>, attribute: Option<&str>) -> Result<Output, CliError> {
    let (drawing, json, text) = match attribute {
        Some(name) => {
            let s = cli.schema()?;
            let l = s.lattice(s.attribute_index(name).map_err(config)?);
            let covers: Vec<(&str, &str)> =
                l.covers().iter().map(|&(a, b)| (l.name(a), l.name(b))).collect();
            let coprimes: Vec<&str> = l.coprimes().map(|c| l.name(c)).collect();
            let text = format!(
                "elements: {}\ncovers: {}\ncoprimes: {}\n",
                l.names().join(","),
                covers.iter().map(|(a, b)| format!("{a}<{b}")).collect::<Vec<_>>().join(" "),
                coprimes.join(",")
            );
            let json = json!({
                "attribute": name,
                "elements": l.names(),
                "covers": covers,
                "coprimes": coprimes,
            });
            (finite_lattice_dot(name, l), json, text)
        }
        None => {
            let gens = cli.generators()?;
            let s = gens.schema();
            let al = gens.materialize(cli.cap).map_err(runtime)?;
            let elements: Vec<String> = al.elements().iter().map(|x| plain(s, x)).collect();
            let covers = al.covers();
            let text = format!(
                "{} elements, {} covers\n{}",
                elements.len(),
                covers.len(),
                elements.iter().map(|e| format!("{e}\n")).collect::<String>()
            );
            let json = json!({ "elements": elements, "covers": covers });
            (abstract_lattice_dot(&al), json, text)
        }
    };
    let mut json = json;
    let mut text = text;
    if let Some(path) = dot {
        fs::write(path, drawing).map_err(runtime)?;
        json["dot"] = json!(path.display().to_string());
        text.push_str(&format!("wrote {}\n", path.display()));
    }
    Ok(Output::ok(json, text))
}

fn realities(cli: &Cli, list: bool, count: bool, strong: bool) -> Result<Output, CliError> {
    let s = cli.schema()?;
    let n = if strong {
        count_strong_realities(&s)
    } else {
        count_realities(&s)
    };
    if count || !list {
        return Ok(Output::ok(
            json!({ "strong": strong, "count": n.to_string().parse::<Json>().unwrap() }),
            format!("{n}\n"),
        ));
    }
    if n > cli.cap as u128 {
        return Err(CliError::Runtime(format!(
            "{n} realities exceed the cap of {}",
            cli.cap
        )));
    }
    let items: Vec<_> = if strong {
        enumerate_strong_realities(&s).map(|g| g.to_names(&s)).collect()
    } else {
        enumerate_realities(&s).map(|g| g.to_names(&s)).collect()
    };
    let text = items.iter().map(|m| format!("{}\n", names_line(m))).collect();
    let key = if strong { "coprimes" } else { "thresholds" };
    let json = json!({
        "strong": strong,
        "count": items.len(),
        "realities": items.iter().map(|m| json!({ key: m })).collect::<Vec<_>>(),
    });
    Ok(Output::ok(json, text))
}
