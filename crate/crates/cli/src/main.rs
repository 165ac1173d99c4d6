use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use sheafkit::functors::{check_adjunction, pullback, pushforward, sheafify};
use sheafkit::gluing::{check_cocycle, glue};
use sheafkit::io::{self, canonical_json, to_value};
use sheafkit::presheaf::{
    check_simple_equivalence, extend_from_basis, limit_of_sheaves, Presheaf, SheafReport, Witness,
    DEFAULT_MAX_COVERINGS,
};
use sheafkit::stalks::{stalk, support};
use sheafkit::topology::FiniteSpace;
use sheafkit::values::DEFAULT_MAX_HOMS;
use sheafkit::Error;

#[derive(Parser)]
#[command(name = "sheafkit", version, about = "Sheaves on finite topological spaces")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on the coverings enumerated per open.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COVERINGS)]
    max_coverings: usize,
    /// Cap on enumerated morphisms.
    #[arg(long, global = true, env = "SHEAFKIT_MAX_HOMS", default_value_t = DEFAULT_MAX_HOMS)]
    max_homs: usize,
    /// Add the elapsed time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Parse any sheafkit file and check its structural invariants.
    Validate { file: PathBuf },
    /// Check the sheaf axioms over every antichain covering.
    CheckSheaf { presheaf: PathBuf },
    /// Check the sheaf condition of a basis presheaf over basis coverings.
    CheckF0 { basis_presheaf: PathBuf },
    /// Extend a basis presheaf to every open.
    ExtendBasis {
        basis_presheaf: PathBuf,
        /// Write the constructed presheaf here.
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Stalk at a point with its canonical maps.
    Stalk {
        presheaf: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Support of a presheaf of groups.
    Support { presheaf: PathBuf },
    /// Direct image along a continuous map.
    Pushforward {
        map: PathBuf,
        presheaf: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Inverse image along a continuous map, with its unit.
    Pullback {
        map: PathBuf,
        presheaf: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Associated sheaf, with its unit.
    Sheafify {
        presheaf: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Enumerate both sides of the inverse/direct image adjunction.
    AdjunctionTest {
        map: PathBuf,
        /// Presheaf on the target of the map.
        g: PathBuf,
        /// Sheaf on the source of the map.
        f: PathBuf,
    },
    /// Glue a gluing datum.
    Glue {
        gluing: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Limit of a diagram of sheaves.
    Limit {
        diagram: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Compare constancy, the sheaf property and local simplicity.
    SimpleCheck { presheaf: PathBuf },
}

impl Command {
    fn verb(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::CheckSheaf { .. } => "check-sheaf",
            Command::CheckF0 { .. } => "check-f0",
            Command::ExtendBasis { .. } => "extend-basis",
            Command::Stalk { .. } => "stalk",
            Command::Support { .. } => "support",
            Command::Pushforward { .. } => "pushforward",
            Command::Pullback { .. } => "pullback",
            Command::Sheafify { .. } => "sheafify",
            Command::AdjunctionTest { .. } => "adjunction-test",
            Command::Glue { .. } => "glue",
            Command::Limit { .. } => "limit",
            Command::SimpleCheck { .. } => "simple-check",
        }
    }
}

struct Outcome {
    verdict: bool,
    body: Map<String, Value>,
    result: Option<(Option<PathBuf>, Value)>,
}

impl Outcome {
    fn new(verdict: bool) -> Self {
        Outcome { verdict, body: Map::new(), result: None }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body.insert(key.into(), value);
        self
    }

    fn producing(mut self, path: &Option<PathBuf>, doc: Value) -> Self {
        self.result = Some((path.clone(), doc));
        self
    }
}

fn keys(space: &FiniteSpace, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&u| space.open_key(u)).collect()
}

fn sheaf_report(space: &FiniteSpace, section: impl Fn(usize, usize) -> String, report: &SheafReport) -> Value {
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|f| {
            let witness = match &f.witness {
                Witness::Sections(a, b) => json!({ "sections": [section(f.open, *a), section(f.open, *b)] }),
                Witness::Family(fam) => {
                    let labels: Vec<String> = fam.iter().zip(&f.parts).map(|(&e, &p)| section(p, e)).collect();
                    json!({ "family": labels })
                }
                Witness::SectionCount(n) => json!({ "section_count": n }),
            };
            json!({
                "open": space.open_key(f.open),
                "covering": keys(space, &f.parts),
                "kind": format!("{:?}", f.kind),
                "witness": witness,
            })
        })
        .collect();
    json!({ "verdict": report.verdict, "failures": failures })
}

fn section_sizes(p: &Presheaf) -> Value {
    let space = p.space();
    Value::Object((0..space.open_count()).map(|u| (space.open_key(u), json!(p.sections(u).len()))).collect())
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn validate(file: &Path) -> Result<Outcome, Error> {
    let value = read_json(file)?;
    let schema = value
        .get("schema")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse(format!("{}: no `schema` field", file.display())))?
        .to_owned();
    let out = match schema.as_str() {
        io::SPACE_SCHEMA => {
            let s = io::read_space(file)?;
            Outcome::new(true).with("points", json!(s.len())).with("opens", json!(s.open_count()))
        }
        io::PRESHEAF_SCHEMA => {
            let p = io::read_presheaf(file)?;
            let space = p.space();
            let violations: Vec<String> = p
                .functoriality_violations()
                .iter()
                .map(|v| match v {
                    sheafkit::presheaf::FunctorialityViolation::Identity { open } => {
                        format!("identity over {}", space.open_key(*open))
                    }
                    sheafkit::presheaf::FunctorialityViolation::Composite { small, middle, big } => format!(
                        "composite {} ⊆ {} ⊆ {}",
                        space.open_key(*small),
                        space.open_key(*middle),
                        space.open_key(*big)
                    ),
                })
                .collect();
            Outcome::new(violations.is_empty())
                .with("category", json!(p.category().to_string()))
                .with("sections", section_sizes(&p))
                .with("violations", json!(violations))
        }
        io::BASIS_PRESHEAF_SCHEMA => {
            let bp = io::read_basis_presheaf(file)?;
            Outcome::new(bp.is_valid()).with("basis", json!(keys(bp.basis().space(), bp.basis().members())))
        }
        io::MAP_SCHEMA => {
            let m = io::read_map(file)?;
            Outcome::new(true).with("continuous", json!(m.is_continuous()))
        }
        io::GLUING_SCHEMA => {
            let d = io::read_gluing(file)?;
            let report = check_cocycle(&d);
            Outcome::new(report.verdict).with("cocycle", cocycle_report(&report))
        }
        io::DIAGRAM_SCHEMA => {
            let d = io::read_diagram(file)?;
            Outcome::new(true).with("nodes", json!(d.poset().labels()))
        }
        other => return Err(Error::Parse(format!("cannot validate files of schema `{other}`"))),
    };
    Ok(out.with("schema", json!(schema)))
}

fn cocycle_report(report: &sheafkit::gluing::CocycleReport) -> Value {
    let failures: Vec<Value> =
        report.failures.iter().map(|f| json!({ "parts": f.parts, "open": f.open })).collect();
    json!({ "verdict": report.verdict, "failures": failures })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    Ok(match &cli.command {
        Command::Validate { file } => validate(file)?,
        Command::CheckSheaf { presheaf } => {
            let p = io::read_presheaf(presheaf)?;
            let report = p.check_sheaf_capped(cli.max_coverings)?;
            let label = |u: usize, e: usize| p.sections(u).label(e).to_owned();
            Outcome::new(report.verdict).with("report", sheaf_report(p.space(), label, &report))
        }
        Command::CheckF0 { basis_presheaf } => {
            let bp = io::read_basis_presheaf(basis_presheaf)?;
            let report = bp.check_f0();
            let label = |u: usize, e: usize| bp.sections(u).label(e).to_owned();
            Outcome::new(report.verdict).with("report", sheaf_report(bp.basis().space(), label, &report))
        }
        Command::ExtendBasis { basis_presheaf, result } => {
            let bp = io::read_basis_presheaf(basis_presheaf)?;
            let ext = extend_from_basis(&bp)?;
            let basis = bp.basis();
            let can_bijective = basis.members().iter().all(|&u| ext.can(u).is_some_and(|c| c.is_bijective()));
            let sheaf = ext.presheaf.is_sheaf();
            Outcome::new(can_bijective && sheaf)
                .with("can_bijective", json!(can_bijective))
                .with("sheaf", json!(sheaf))
                .with("sections", section_sizes(&ext.presheaf))
                .producing(result, to_value(&io::presheaf_to_doc(&ext.presheaf, true)))
        }
        Command::Stalk { presheaf, point } => {
            let p = io::read_presheaf(presheaf)?;
            let space = p.space();
            let s = stalk(&p, space.point(point)?)?;
            let canonical: Map<String, Value> = s
                .neighborhoods
                .iter()
                .zip(&s.canonical)
                .map(|(&u, m)| (space.open_key(u), json!(m.label_pairs().into_iter().collect::<std::collections::BTreeMap<_, _>>())))
                .collect();
            Outcome::new(true)
                .with("point", json!(point))
                .with("stalk", to_value(&io::object_to_doc(&s.object)))
                .with("canonical", Value::Object(canonical))
        }
        Command::Support { presheaf } => {
            let p = io::read_presheaf(presheaf)?;
            let space = p.space();
            let supp = support(&p)?;
            let closure = space.closure(supp);
            Outcome::new(true)
                .with("support", json!(space.set_labels(supp)))
                .with("closure", json!(space.set_labels(closure)))
                .with("closed", json!(supp == closure))
        }
        Command::Pushforward { map, presheaf, result } => {
            let m = io::read_map(map)?;
            let f = io::read_presheaf(presheaf)?;
            if **f.space() != **m.source() {
                return Err(Error::CrossReference("presheaf does not live on the source of the map".into()));
            }
            let pushed = pushforward(&m, &f)?;
            Outcome::new(true)
                .with("sections", section_sizes(&pushed))
                .producing(result, to_value(&io::presheaf_to_doc(&pushed, true)))
        }
        Command::Pullback { map, presheaf, result } => {
            let m = io::read_map(map)?;
            let g = io::read_presheaf(presheaf)?;
            if **g.space() != **m.target() {
                return Err(Error::CrossReference("presheaf does not live on the target of the map".into()));
            }
            let inv = pullback(&m, &g)?;
            Outcome::new(true)
                .with("sections", section_sizes(&inv.sheaf))
                .with("unit", to_value(&io::components_to_doc(&inv.unit)))
                .producing(result, to_value(&io::presheaf_to_doc(&inv.sheaf, true)))
        }
        Command::Sheafify { presheaf, result } => {
            let g = io::read_presheaf(presheaf)?;
            let inv = sheafify(&g)?;
            Outcome::new(true)
                .with("sections", section_sizes(&inv.sheaf))
                .with("unit", to_value(&io::components_to_doc(&inv.unit)))
                .with("unit_is_iso", json!(inv.unit.is_iso()))
                .producing(result, to_value(&io::presheaf_to_doc(&inv.sheaf, true)))
        }
        Command::AdjunctionTest { map, g, f } => {
            let m = io::read_map(map)?;
            let g = io::read_presheaf(g)?;
            let f = io::read_presheaf(f)?;
            if **g.space() != **m.target() || **f.space() != **m.source() {
                return Err(Error::CrossReference("presheaves do not live on the ends of the map".into()));
            }
            let w = check_adjunction(&m, &g, &f, cli.max_homs)?;
            Outcome::new(w.is_bijection())
                .with("sheaf_side", json!(w.sheaf_side.len()))
                .with("presheaf_side", json!(w.presheaf_side.len()))
                .with("forward", json!(w.forward))
                .with("backward", json!(w.backward))
        }
        Command::Glue { gluing, result } => {
            let d = io::read_gluing(gluing)?;
            let report = check_cocycle(&d);
            if !report.verdict {
                return Ok(Outcome::new(false).with("cocycle", cocycle_report(&report)));
            }
            let g = glue(&d)?;
            let isos: Map<String, Value> = d
                .labels()
                .iter()
                .zip(&g.isos)
                .map(|(l, eta)| (l.clone(), to_value(&io::components_to_doc(eta))))
                .collect();
            let whole = g.sheaf.space().whole();
            Outcome::new(true)
                .with("cocycle", cocycle_report(&report))
                .with("global_sections", json!(g.sheaf.sections(whole).len()))
                .with("sections", section_sizes(&g.sheaf))
                .with("isos", Value::Object(isos))
                .producing(result, to_value(&io::presheaf_to_doc(&g.sheaf, true)))
        }
        Command::Limit { diagram, result } => {
            let d = io::read_diagram(diagram)?;
            let l = limit_of_sheaves(&d)?;
            let projections: Map<String, Value> = d
                .poset()
                .labels()
                .iter()
                .zip(&l.projections)
                .map(|(label, p)| (label.clone(), to_value(&io::components_to_doc(p))))
                .collect();
            let sheaf = l.presheaf.is_sheaf();
            Outcome::new(sheaf)
                .with("sheaf", json!(sheaf))
                .with("sections", section_sizes(&l.presheaf))
                .with("projections", Value::Object(projections))
                .producing(result, to_value(&io::presheaf_to_doc(&l.presheaf, true)))
        }
        Command::SimpleCheck { presheaf } => {
            let p = io::read_presheaf(presheaf)?;
            let r = check_simple_equivalence(&p)?;
            Outcome::new(r.holds())
                .with("constant", json!(r.constant))
                .with("empty_terminal", json!(r.empty_terminal))
                .with("sheaf", json!(r.sheaf))
                .with("sheafification_iso", json!(r.sheafification_iso))
                .with("locally_simple", json!(r.locally_simple))
                .with("constant_implies_sheaf", json!(r.constant_implies_sheaf))
                .with("locally_simple_implies_constant", json!(r.locally_simple_implies_constant))
        }
    })
}

fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_owned()
}

fn render_text(value: &Value, prefix: &str, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(v, &key, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                render_text(v, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{prefix}: [{}]\n", parts.join(", ")));
        }
        other => out.push_str(&format!("{prefix}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit(cli: &Cli, report: &Value) -> std::io::Result<()> {
    let text = match cli.format {
        Format::Json => canonical_json(report),
        Format::Text => {
            let mut s = String::new();
            render_text(report, "", &mut s);
            s
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let verb = cli.command.verb();
    let (mut report, code) = match run(&cli) {
        Ok(outcome) => {
            let mut body = outcome.body;
            if let Some((path, doc)) = outcome.result {
                match path {
                    Some(path) => {
                        if let Err(e) = fs::write(&path, canonical_json(&doc)) {
                            eprintln!("sheafkit: cannot write {}: {e}", path.display());
                            return ExitCode::from(2);
                        }
                        body.insert("result_file".into(), json!(path.display().to_string()));
                    }
                    None => {
                        body.insert("result".into(), doc);
                    }
                }
            }
            body.insert("verdict".into(), json!(outcome.verdict));
            (body, if outcome.verdict { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("sheafkit: {e}");
            let mut body = Map::new();
            body.insert("error".into(), json!({ "kind": error_kind(&e), "message": e.to_string() }));
            (body, 2)
        }
    };
    report.insert("verb".into(), json!(verb));
    if cli.timing {
        report.insert("elapsed_ms".into(), json!(start.elapsed().as_millis() as u64));
    }
    if let Err(e) = emit(&cli, &Value::Object(report)) {
        eprintln!("sheafkit: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
