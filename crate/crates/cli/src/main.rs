//! `morsecat`: critical points, flow categories, Floer homology and
//! realization checks from JSON inputs. Every run prints a JSON report.
//!
//! Exit codes: 0 success, 1 input error, 2 validation failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use morsecat::bank::{example, ExampleError, NAMES};
use morsecat::coeff::{bigint_json, euler_characteristic, graded_homology, CoeffError, CoefficientRing, IntegerMatrix};
use morsecat::corners::{strata_report, CornerError};
use morsecat::flowcat::{
    category_from_json, category_to_json, check_orientation_coherence, floer_complex, validate_morse_smale,
    FloerOptions, FlowCategory, FlowError, OrientationData,
};
use morsecat::jcat::{check_realization, parse_components, realize, ChainComplexData, JError};
use morsecat::morse::{
    build_flow_category, find_critical_points, trajectories_csv, trajectories_svg, Convention, MorseError,
    NumericalConfig, TrigPolynomial,
};

#[derive(Parser, Debug)]
#[command(name = "morsecat", version, about = "Flow categories and Floer homology of torus Morse functions")]
struct Cli {
    /// Numerical configuration (JSON, camelCase keys; missing keys use defaults).
    #[arg(long, global = true, env = "MORSECAT_CONFIG")]
    config: Option<PathBuf>,
    /// Overrides the configured orientation convention.
    #[arg(long, global = true, value_enum)]
    convention: Option<ConventionArg>,
    /// Overrides the configured Newton grid resolution.
    #[arg(long, global = true)]
    grid_resolution: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Standard,
    Reversed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical points of a function file, with the Euler check.
    Crit { function: PathBuf },
    /// Floer homology of a category file or a function file.
    Homology {
        input: PathBuf,
        /// z, q, zmod:M or laurent:D:W
        #[arg(long, default_value = "z")]
        ring: CoefficientRing,
        /// Object whose index is grading zero.
        #[arg(long)]
        base: Option<String>,
    },
    /// Runs the Morse-Smale and orientation validators on a category file.
    Validate { category: PathBuf },
    /// Chain strata of the compactified moduli space between two objects.
    Strata { category: PathBuf, a: String, b: String },
    /// Realizes a chain complex file and checks the result.
    Realize {
        complex: PathBuf,
        #[arg(long, default_value = "z")]
        ring: CoefficientRing,
    },
    /// Writes canonical category and function files for named examples.
    Examples {
        /// circle, torus, klein, rp2 or torus-perturbed:SEED; all handcrafted ones by default.
        #[arg(long = "name")]
        names: Vec<String>,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Rigid flow lines of a function file, optionally plotted.
    Orbits {
        function: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

enum Failure {
    Input(anyhow::Error),
    Invalid(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invalid(_) => 2,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Failure::Input(_) => "input-error",
            Failure::Invalid(_) => "validation-failure",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(e) => format!("{e:#}"),
            Failure::Invalid(m) => m.clone(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<CoeffError> for Failure {
    fn from(e: CoeffError) -> Self {
        match e {
            CoeffError::CompositeNonzero => Failure::Invalid(e.to_string()),
            e => Failure::Input(e.into()),
        }
    }
}

impl From<JError> for Failure {
    fn from(e: JError) -> Self {
        match e {
            JError::BoundaryCompositeNonzero { .. } | JError::TotalDifferentialSquareNonzero { .. } => {
                Failure::Invalid(e.to_string())
            }
            JError::Coeff(c) => c.into(),
            e => Failure::Input(e.into()),
        }
    }
}

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::IncoherentOrientation(_) | FlowError::NegativeRelativeIndex { .. } => {
                Failure::Invalid(e.to_string())
            }
            FlowError::Complex(j) => j.into(),
            FlowError::Coeff(c) => c.into(),
            e => Failure::Input(e.into()),
        }
    }
}

impl From<MorseError> for Failure {
    fn from(e: MorseError) -> Self {
        match e {
            MorseError::Json(_) | MorseError::InvalidFunction(_) | MorseError::InvalidConfig(_) => {
                Failure::Input(e.into())
            }
            MorseError::Flow(f) => f.into(),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<CornerError> for Failure {
    fn from(e: CornerError) -> Self {
        Failure::Input(e.into())
    }
}

impl From<ExampleError> for Failure {
    fn from(e: ExampleError) -> Self {
        match e {
            ExampleError::UnknownName(_) => Failure::Input(e.into()),
            ExampleError::Morse(m) => m.into(),
            ExampleError::Flow(f) => f.into(),
        }
    }
}

struct Outcome {
    results: Value,
    /// Set when the run completed but a validator rejected the input.
    rejected: Option<String>,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Self { results, rejected: None }
    }
}

#[derive(Default)]
struct Run {
    inputs: Vec<Value>,
    warnings: Vec<String>,
}

impl Run {
    fn read(&mut self, path: &Path) -> anyhow::Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(json!({
            "path": path.display().to_string(),
            "sha256": sha256(&bytes),
        }));
        Ok(bytes)
    }

    fn read_json(&mut self, path: &Path) -> anyhow::Result<Value> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
    }

    fn config(&mut self, cli: &Cli) -> Result<NumericalConfig, Failure> {
        let mut cfg = match &cli.config {
            Some(path) => {
                let v = self.read_json(path)?;
                NumericalConfig::from_json(&v)?
            }
            None => NumericalConfig::default(),
        };
        if let Some(c) = cli.convention {
            cfg.convention = match c {
                ConventionArg::Standard => Convention::Standard,
                ConventionArg::Reversed => Convention::Reversed,
            };
        }
        if let Some(g) = cli.grid_resolution {
            cfg.grid_resolution = g;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn function(&mut self, path: &Path) -> Result<TrigPolynomial, Failure> {
        let v = self.read_json(path)?;
        Ok(TrigPolynomial::from_json(&v)?)
    }

    fn category(&mut self, path: &Path) -> Result<(FlowCategory, OrientationData), Failure> {
        let v = self.read_json(path)?;
        Ok(category_from_json(&v)?)
    }
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn crit(run: &mut Run, cli: &Cli, path: &Path) -> Result<Outcome, Failure> {
    let f = run.function(path)?;
    let cfg = run.config(cli)?;
    let points = find_critical_points(&f, &cfg)?;
    let rows: Vec<Value> = points
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "position": c.position,
                "value": c.value,
                "index": c.index,
                "minAbsEigenvalue": c.min_abs_eigenvalue(),
            })
        })
        .collect();
    let mut counts = vec![0usize; f.dim() + 1];
    for c in &points {
        counts[c.index] += 1;
    }
    let sum = euler_characteristic(counts.iter().copied());
    Ok(Outcome::ok(json!({
        "dim": f.dim(),
        "criticalPoints": rows,
        "euler": { "countsByIndex": counts, "sum": sum, "passed": sum == 0 },
    })))
}

fn validators(cat: &FlowCategory, or: &OrientationData) -> (Value, Option<String>) {
    let ms = validate_morse_smale(cat);
    let co = check_orientation_coherence(cat, or);
    let failed: Vec<&str> = ms.failed_checks().into_iter().chain(co.failed_checks()).collect();
    let rejected = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")));
    (json!({ "morseSmale": ms, "orientation": co }), rejected)
}

fn homology_cmd(
    run: &mut Run,
    cli: &Cli,
    path: &Path,
    ring: &CoefficientRing,
    base: Option<&str>,
) -> Result<Outcome, Failure> {
    ring.validate()?;
    let v = run.read_json(path)?;
    let (cat, or, source) = if v.get("terms").is_some() {
        let f = TrigPolynomial::from_json(&v)?;
        let cfg = run.config(cli)?;
        let out = build_flow_category(&f, &cfg)?;
        run.warnings.extend(out.warnings);
        (out.category, out.orientation, "function")
    } else {
        let (c, o) = category_from_json(&v)?;
        (c, o, "category")
    };
    let (checks, rejected) = validators(&cat, &or);
    if rejected.is_some() {
        return Ok(Outcome {
            results: json!({ "source": source, "validation": checks }),
            rejected,
        });
    }
    let fc = floer_complex(&cat, &or, FloerOptions { base_object: base, strict: false })?;
    let groups = fc.homology(ring)?;
    let homology: Vec<Value> = groups
        .iter()
        .map(|(grading, g)| json!({ "grading": grading, "group": g, "text": g.describe(ring) }))
        .collect();
    let complex = &fc.complex;
    let boundaries: Vec<Value> = complex
        .boundaries()
        .iter()
        .enumerate()
        .map(|(k, d)| {
            json!({
                "from": fc.grading(k + 1),
                "to": fc.grading(k),
                "matrix": bigint_json::matrix_to_value(d),
            })
        })
        .collect();
    let mut results = json!({
        "source": source,
        "ring": ring.to_string(),
        "baseObject": fc.base_object,
        "bases": complex.bases(),
        "boundaries": boundaries,
        "homology": homology,
    });
    if ring.generator_degree().is_some() {
        let ranks = complex.ranks();
        let mut window = Vec::new();
        for k in 0..ranks.len() {
            let d_out = match k {
                0 => IntegerMatrix::zeros(0, ranks[0]),
                _ => complex.boundaries()[k - 1].clone(),
            };
            let d_in = match complex.boundary(k + 1) {
                Some(d) => d.clone(),
                None => IntegerMatrix::zeros(ranks[k], 0),
            };
            for (degree, g) in graded_homology(&d_in, &d_out, ring, fc.grading(k))? {
                window.push(json!({ "chainGrading": fc.grading(k), "totalDegree": degree, "group": g }));
            }
        }
        results["gradedWindow"] = Value::Array(window);
    }
    Ok(Outcome::ok(results))
}

fn validate_cmd(run: &mut Run, path: &Path) -> Result<Outcome, Failure> {
    let (cat, or) = run.category(path)?;
    let (checks, rejected) = validators(&cat, &or);
    Ok(Outcome {
        results: json!({ "passed": rejected.is_none(), "validation": checks }),
        rejected,
    })
}

fn strata_cmd(run: &mut Run, path: &Path, a: &str, b: &str) -> Result<Outcome, Failure> {
    let (cat, _) = run.category(path)?;
    let report = strata_report(&cat, a, b)?;
    Ok(Outcome::ok(json!(report)))
}

fn realize_cmd(run: &mut Run, path: &Path, ring: &CoefficientRing) -> Result<Outcome, Failure> {
    let v = run.read_json(path)?;
    let complex = ChainComplexData::from_json(&v)?;
    let higher = parse_components(v.get("higher"), &complex.ranks())?;
    let x = realize(&complex, ring, Some(&higher))?;
    let report = check_realization(&x, &complex);
    let rejected = (!report.passed()).then(|| format!("failed checks: {}", report.failed_checks().join(", ")));
    let homology = complex.homology(ring)?;
    let total = x.total_homology()?;
    Ok(Outcome {
        results: json!({
            "realization": x.to_json(),
            "check": report,
            "hasHigherComponents": x.has_higher_components(),
            "homology": homology,
            "totalHomology": total,
        }),
        rejected,
    })
}

fn file_stem(name: &str) -> String {
    name.replace(':', "-")
}

fn examples_cmd(cli: &Cli, run: &mut Run, names: &[String], dir: &Path) -> Result<Outcome, Failure> {
    let names: Vec<String> = if names.is_empty() {
        NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        names.to_vec()
    };
    let cfg = run.config(cli)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for name in &names {
        let ex = example(name, &cfg)?;
        let stem = file_stem(name);
        let mut files = vec![(format!("{stem}.category.json"), pretty(&category_to_json(&ex.category, Some(&ex.orientation))))];
        if let Some(f) = &ex.function {
            files.push((format!("{stem}.function.json"), pretty(&f.to_json())));
        }
        for (file, contents) in files {
            write_file(&dir.join(&file), &contents)?;
            written.push(json!({ "example": name, "file": file, "sha256": sha256(contents.as_bytes()) }));
        }
    }
    Ok(Outcome::ok(json!({ "dir": dir.display().to_string(), "files": written })))
}

fn orbits_cmd(
    run: &mut Run,
    cli: &Cli,
    path: &Path,
    svg: Option<&Path>,
    csv: Option<&Path>,
) -> Result<Outcome, Failure> {
    let f = run.function(path)?;
    let cfg = run.config(cli)?;
    let out = build_flow_category(&f, &cfg)?;
    run.warnings.extend(out.warnings.iter().cloned());
    let mut artifacts = Vec::new();
    if let Some(p) = svg {
        match trajectories_svg(&out.critical, &out.flows) {
            Some(s) => {
                write_file(p, &s)?;
                artifacts.push(json!({ "file": p.display().to_string(), "sha256": sha256(s.as_bytes()) }));
            }
            None => run.warnings.push(format!("SVG output needs a 2-torus; {} not written", p.display())),
        }
    }
    if let Some(p) = csv {
        let s = trajectories_csv(&out.flows);
        write_file(p, &s)?;
        artifacts.push(json!({ "file": p.display().to_string(), "sha256": sha256(s.as_bytes()) }));
    }
    Ok(Outcome::ok(json!({
        "criticalPoints": out.critical,
        "flows": out.flows,
        "artifacts": artifacts,
    })))
}

fn dispatch(cli: &Cli, run: &mut Run) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Crit { function } => crit(run, cli, function),
        Command::Homology { input, ring, base } => homology_cmd(run, cli, input, ring, base.as_deref()),
        Command::Validate { category } => validate_cmd(run, category),
        Command::Strata { category, a, b } => strata_cmd(run, category, a, b),
        Command::Realize { complex, ring } => realize_cmd(run, complex, ring),
        Command::Examples { names, dir } => examples_cmd(cli, run, names, dir),
        Command::Orbits { function, svg, csv } => orbits_cmd(run, cli, function, svg.as_deref(), csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut run = Run::default();
    let outcome = dispatch(&cli, &mut run);
    let (code, status, results, error) = match outcome {
        Ok(Outcome { results, rejected: None }) => (0, "ok", results, None),
        Ok(Outcome { results, rejected: Some(msg) }) => (2, "validation-failure", results, Some(msg)),
        Err(e) => (e.code(), e.status(), Value::Null, Some(e.message())),
    };
    if let Some(msg) = &error {
        eprintln!("morsecat: {msg}");
    }
    let report = json!({
        "command": std::env::args().skip(1).collect::<Vec<_>>(),
        "inputs": run.inputs,
        "results": results,
        "warnings": run.warnings,
        "status": status,
        "exitCode": code,
        "error": error,
    });
    let text = pretty(&report);
    match &cli.output {
        Some(p) => {
            if let Err(e) = write_file(p, &text) {
                eprintln!("morsecat: {e:#}");
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
