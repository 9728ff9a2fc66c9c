//! `bibcount`: score publication corpora with counting methods, classify
//! score functions empirically, lint the method catalog, run the national
//! funding pipelines, generate synthetic corpora, and compare methods
//! across aggregation levels.
//!
//! Data goes to stdout (or `--output`); diagnostics go to stderr. Exit
//! codes: 0 success, 1 input error, 2 method error, 64 usage error. All
//! commands are deterministic given their inputs, flags, and seed; the
//! default seed is 42, overridable with the `BIBCOUNT_SEED` environment
//! variable, which in turn yields to an explicit `--seed`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bibcount::aggregate::{object_scores, AggregateError, CountingMethod};
use bibcount::classify::{classify, ClassifyError, ClassifyOptions};
use bibcount::corpus::{
    generate_corpus, parse_jsonl, publications_to_jsonl, AttributionMap, CorpusSpec, EntityLevel,
    Publication, TeamSize,
};
use bibcount::harness::{comparison_csv, run_comparison, HarnessError};
use bibcount::npi::{bfi_table, npi_table, read_points_csv, NpiError, NpiParams, RootMode};
use bibcount::registry::{self, RegistryError, RegistryFilter};

const DEFAULT_SEED: u64 = 42;
const SEED_ENV: &str = "BIBCOUNT_SEED";

#[derive(Parser)]
#[command(
    name = "bibcount",
    version,
    about = "Bibliometric counting methods: scoring, classification, and comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a corpus with a counting method and emit an object,score CSV
    Score(ScoreArgs),
    /// Empirically classify a score function and print its report
    Classify(ClassifyArgs),
    /// Print the validity flags of cataloged methods, cross-checked
    /// against the implementations
    Lint(LintArgs),
    /// Inspect the method catalog
    #[command(subcommand)]
    Registry(RegistryCommand),
    /// Run the publication-indicator pipelines over a corpus
    Npi(NpiArgs),
    /// Generate a synthetic corpus as JSON lines
    Simulate(SimulateArgs),
    /// Compare methods pairwise across aggregation levels
    Compare(CompareArgs),
}

#[derive(Args)]
struct ScoreArgs {
    /// Method name from the registry
    #[arg(long)]
    method: String,
    /// Corpus file in JSON lines format ("-" for stdin)
    #[arg(long)]
    input: String,
    /// Level of the basic units of analysis
    #[arg(long, default_value = "author")]
    basic_unit: String,
    /// Level of the objects of study
    #[arg(long, default_value = "institution")]
    object: String,
    /// Union of countries, as id=member+member (repeatable)
    #[arg(long)]
    union: Vec<String>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Method name from the registry
    #[arg(long)]
    method: String,
    /// Number of trial publications per property test
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Seed for trial generation (default 42, or BIBCOUNT_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Output format: text or json
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct LintArgs {
    /// Lint a single method instead of the whole catalog
    #[arg(long)]
    method: Option<String>,
}

#[derive(Subcommand)]
enum RegistryCommand {
    /// List catalog entries as CSV
    List(RegistryListArgs),
    /// Show one entry in full
    Show(RegistryShowArgs),
}

#[derive(Args)]
struct RegistryListArgs {
    /// Keep only implemented or stub entries
    #[arg(long)]
    status: Option<String>,
    /// Keep only entries with this published claim
    #[arg(long)]
    claim: Option<String>,
    /// Keep only entries introduced with this argument group (group1..group4)
    #[arg(long)]
    group: Option<String>,
    /// Keep only methods used in four or more evaluations (yes/no)
    #[arg(long)]
    frequent: Option<String>,
    /// Keep only reviewed methods (yes) or the classics (no)
    #[arg(long)]
    reviewed: Option<String>,
}

#[derive(Args)]
struct RegistryShowArgs {
    #[arg(long)]
    method: String,
}

#[derive(Args)]
struct NpiArgs {
    /// Corpus file in JSON lines format ("-" for stdin)
    #[arg(long)]
    input: String,
    /// Report a single institution instead of the full table
    #[arg(long)]
    institution: Option<String>,
    /// Root exponent k (2 = square root)
    #[arg(long, default_value_t = 2)]
    root: u32,
    /// International bonus multiplier
    #[arg(long, default_value_t = 1.3)]
    bonus: f64,
    /// Points granted when a publication has no entry in the points table
    #[arg(long, default_value_t = 1.0)]
    default_points: f64,
    /// CSV file with publication_id,points rows
    #[arg(long)]
    points: Option<PathBuf>,
    /// Home country for the international bonus (default: modal country)
    #[arg(long)]
    home: Option<String>,
    /// Contribution mode: rooted-sum or per-share-rooted
    #[arg(long, default_value = "rooted-sum")]
    mode: String,
    /// Run the floor-based variant instead of the rooted indicator
    #[arg(long)]
    bfi: bool,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of publications
    #[arg(long)]
    pubs: usize,
    #[arg(long, default_value_t = 100)]
    authors: usize,
    #[arg(long, default_value_t = 10)]
    institutions: usize,
    #[arg(long, default_value_t = 5)]
    countries: usize,
    /// Mean byline size (shifted-Poisson draw)
    #[arg(long, conflicts_with = "team_fixed", default_value_t = 3.0)]
    team_mean: f64,
    /// Fixed byline size for every publication
    #[arg(long)]
    team_fixed: Option<usize>,
    /// Probability an author is drawn outside the first author's institution
    #[arg(long, default_value_t = 0.25)]
    cross_rate: f64,
    /// Skew of the country weights (0 = uniform)
    #[arg(long, default_value_t = 0.0)]
    skew: f64,
    #[arg(long, default_value_t = 2000)]
    year_from: i32,
    #[arg(long, default_value_t = 2020)]
    year_to: i32,
    /// Attach synthetic per-author attributes
    #[arg(long)]
    attributes: bool,
    /// Prefix for generated identifiers
    #[arg(long, default_value = "")]
    prefix: String,
    /// Seed (default 42, or BIBCOUNT_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON lines here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Corpus file in JSON lines format ("-" for stdin)
    #[arg(long)]
    input: String,
    /// Comma-separated method names
    #[arg(long)]
    methods: String,
    /// Comma-separated object levels
    #[arg(long, default_value = "institution,country")]
    levels: String,
    /// Size of the top-score overlap window
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    /// Directory for per-pair plot-data CSVs (object,score_a,score_b)
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Write the summary CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Command failures, split by exit code.
enum CliError {
    /// Unreadable or invalid input data, paths, or flag values: exit 1.
    Input(String),
    /// Unknown, stub, or failing methods: exit 2.
    Method(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 1,
            Self::Method(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Input(m) | Self::Method(m) => f.write_str(m),
        }
    }
}

fn input(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn method(e: impl fmt::Display) -> CliError {
    CliError::Method(e.to_string())
}

/// Scoring failures blame the method; setup failures blame the input.
fn aggregate_error(e: AggregateError) -> CliError {
    match e {
        AggregateError::Score(inner) => method(inner),
        other => input(other),
    }
}

fn harness_error(e: HarnessError) -> CliError {
    match e {
        HarnessError::Registry(inner) => registry_error(inner),
        HarnessError::Aggregate(inner) => aggregate_error(inner),
        other => input(other),
    }
}

fn registry_error(e: RegistryError) -> CliError {
    match e {
        RegistryError::Filter(_) => input(e),
        _ => method(e),
    }
}

fn classify_error(e: ClassifyError) -> CliError {
    match e {
        ClassifyError::Config(_) => input(e),
        other => method(other),
    }
}

fn main() -> ExitCode {
    // Restore the default SIGPIPE disposition so that piping output into a
    // tool that stops reading early (`bibcount registry list | head`) ends
    // the process quietly instead of panicking on a closed stdout.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let zero = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if zero {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(64)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Score(args) => cmd_score(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Lint(args) => cmd_lint(args),
        Command::Registry(command) => cmd_registry(command),
        Command::Npi(args) => cmd_npi(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| {
            input(format!(
                "{SEED_ENV} must be an unsigned integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn read_corpus(path: &str) -> Result<Vec<Publication>, CliError> {
    let text = if path == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|e| input(format!("reading stdin: {e}")))?;
        buffer
    } else {
        fs::read_to_string(path).map_err(|e| input(format!("reading {path}: {e}")))?
    };
    parse_jsonl(&text).map_err(input)
}

fn parse_level(name: &str) -> Result<EntityLevel, CliError> {
    EntityLevel::parse(name).ok_or_else(|| {
        input(format!(
            "unknown level {name:?}; use author, institution, country, or union"
        ))
    })
}

fn parse_unions(specs: &[String]) -> Result<BTreeMap<String, BTreeSet<String>>, CliError> {
    let mut unions = BTreeMap::new();
    for spec in specs {
        let (id, members) = spec
            .split_once('=')
            .ok_or_else(|| input(format!("union must be id=member+member, got {spec:?}")))?;
        let members: BTreeSet<String> = members
            .split('+')
            .filter(|m| !m.is_empty())
            .map(str::to_string)
            .collect();
        if id.is_empty() || members.len() < 2 {
            return Err(input(format!(
                "union {spec:?} needs a name and at least two members"
            )));
        }
        unions.insert(id.to_string(), members);
    }
    Ok(unions)
}

fn emit(output: Option<&Path>, data: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, data).map_err(|e| input(format!("writing {}: {e}", path.display())))
        }
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_score(args: ScoreArgs) -> Result<(), CliError> {
    let basic = parse_level(&args.basic_unit)?;
    let object = parse_level(&args.object)?;
    let publications = read_corpus(&args.input)?;
    let unions = parse_unions(&args.union)?;
    let function = registry::build(&args.method).map_err(registry_error)?;
    let counting_method = CountingMethod::new(function, basic, object).map_err(aggregate_error)?;
    let attribution =
        AttributionMap::derive(&publications, basic, object, unions).map_err(input)?;
    let table =
        object_scores(&counting_method, &publications, &attribution).map_err(aggregate_error)?;
    emit(args.output.as_deref(), &table.to_csv())
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let function = registry::build(&args.method).map_err(registry_error)?;
    let options = ClassifyOptions {
        trials: args.trials,
        seed,
        ..ClassifyOptions::default()
    };
    let report = classify(&function, &options).map_err(classify_error)?;
    match args.format.as_str() {
        "text" => {
            print!("{report}");
            Ok(())
        }
        "json" => {
            let witnesses: Vec<serde_json::Value> = report
                .witnesses
                .iter()
                .map(|w| {
                    serde_json::json!({
                        "property": w.property.to_string(),
                        "summary": w.summary(),
                        "publications": publications_to_jsonl(&w.publications),
                    })
                })
                .collect();
            let value = serde_json::json!({
                "method": report.method,
                "label": report.label.to_string(),
                "properties": {
                    "defined_for_all_objects": report.properties.defined_for_all_objects,
                    "fixed_crediting_scheme": report.properties.fixed_crediting_scheme,
                    "additive": report.properties.additive,
                    "rank": report.properties.rank.to_string(),
                    "fractionalized": report.properties.fractionalized,
                },
                "trials": report.trials,
                "seed": report.seed,
                "uneven_sharing": report.uneven_sharing,
                "witnesses": witnesses,
                "notes": report.notes,
            });
            println!("{value:#}");
            Ok(())
        }
        other => Err(input(format!("unknown format {other:?}; use text or json"))),
    }
}

fn cmd_lint(args: LintArgs) -> Result<(), CliError> {
    let entries: Vec<&bibcount::registry::MethodMetadata> = match &args.method {
        Some(name) => vec![registry::get(name).map_err(registry_error)?],
        None => registry::all().iter().collect(),
    };
    let mut out = String::from(
        "name,status,claim,compare_to_others,principles,quantitative_models,surveys,\
         compare_groups,time_specific_evidence,fixed_credits,parameters_selected,\
         external_elements,conditional_equations\n",
    );
    let yn = |b: bool| if b { "Y" } else { "N" };
    for meta in entries {
        let adequacy = registry::adequacy_profile(meta);
        let sensitivity = registry::lint_sensitivity(meta).map_err(registry_error)?;
        let homogeneity = registry::lint_homogeneity(meta).map_err(registry_error)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            meta.name,
            meta.status,
            meta.framework1_claim,
            yn(adequacy.compare_to_others),
            yn(adequacy.principles),
            yn(adequacy.quantitative_models),
            yn(adequacy.surveys),
            yn(adequacy.compare_groups),
            yn(sensitivity.time_specific_evidence),
            sensitivity.fixed_credits,
            yn(homogeneity.parameters_selected),
            yn(homogeneity.external_elements),
            yn(homogeneity.conditional_equations),
        ));
    }
    print!("{out}");
    Ok(())
}

fn cmd_registry(command: RegistryCommand) -> Result<(), CliError> {
    match command {
        RegistryCommand::List(args) => {
            let mut specs = Vec::new();
            if let Some(v) = &args.status {
                specs.push(format!("status={v}"));
            }
            if let Some(v) = &args.claim {
                specs.push(format!("claim={v}"));
            }
            if let Some(v) = &args.group {
                specs.push(format!("group={v}"));
            }
            if let Some(v) = &args.frequent {
                specs.push(format!("frequent={v}"));
            }
            if let Some(v) = &args.reviewed {
                specs.push(format!("reviewed={v}"));
            }
            let filter =
                RegistryFilter::parse(specs.iter().map(String::as_str)).map_err(registry_error)?;
            let mut out = String::from("name,year,status,claim,group,frequent_evaluation_use\n");
            for meta in registry::list(&filter) {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    meta.name,
                    meta.introduced.map(|y| y.to_string()).unwrap_or_default(),
                    meta.status,
                    meta.framework1_claim,
                    meta.framework2_group
                        .as_ref()
                        .map(|g| g.to_string())
                        .unwrap_or_default(),
                    if meta.frequent_evaluation_use {
                        "yes"
                    } else {
                        "no"
                    },
                ));
            }
            print!("{out}");
            Ok(())
        }
        RegistryCommand::Show(args) => {
            let meta = registry::get(&args.method).map_err(registry_error)?;
            println!("name: {}", meta.name);
            match meta.introduced {
                Some(year) => println!("introduced: {year}"),
                None => println!("introduced: classic (before the reviewed period)"),
            }
            println!("status: {}", meta.status);
            println!("claim: {}", meta.framework1_claim);
            if let Some(group) = &meta.framework2_group {
                println!("argument group: {group}");
            }
            println!(
                "frequent evaluation use: {}",
                if meta.frequent_evaluation_use {
                    "yes"
                } else {
                    "no"
                }
            );
            let a = meta.adequacy;
            println!(
                "adequacy: compare-to-others {} / principles {} / quantitative-models {} / \
                 surveys {} / compare-groups {}",
                a.compare_to_others,
                a.principles,
                a.quantitative_models,
                a.surveys,
                a.compare_groups
            );
            println!(
                "sensitivity: time-specific-evidence {} / fixed-credits {}",
                meta.sensitivity.time_specific_evidence, meta.sensitivity.fixed_credits
            );
            let h = meta.homogeneity;
            println!(
                "homogeneity: parameters-selected {} / external-elements {} / \
                 conditional-equations {}",
                h.parameters_selected, h.external_elements, h.conditional_equations
            );
            Ok(())
        }
    }
}

fn npi_error(e: NpiError) -> CliError {
    input(e)
}

fn cmd_npi(args: NpiArgs) -> Result<(), CliError> {
    let publications = read_corpus(&args.input)?;
    let mut out = String::from("institution,score\n");
    if args.bfi {
        let table = bfi_table(&publications);
        match &args.institution {
            Some(name) => {
                let score = table.get(name).copied().unwrap_or(0.0);
                out.push_str(&format!("{name},{score}\n"));
            }
            None => {
                for (institution, score) in &table {
                    out.push_str(&format!("{institution},{score}\n"));
                }
            }
        }
        return emit(args.output.as_deref(), &out);
    }

    let mode = match args.mode.as_str() {
        "rooted-sum" => RootMode::RootedSum,
        "per-share-rooted" => RootMode::PerShareRooted,
        other => {
            return Err(input(format!(
                "unknown mode {other:?}; use rooted-sum or per-share-rooted"
            )))
        }
    };
    let points = match &args.points {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| input(format!("reading {}: {e}", path.display())))?;
            read_points_csv(file).map_err(npi_error)?
        }
        None => BTreeMap::new(),
    };
    let params = NpiParams {
        root_exponent: args.root,
        international_bonus: args.bonus,
        default_points: args.default_points,
        points,
        home_country: args.home.clone(),
        mode,
    };
    match &args.institution {
        Some(name) => {
            let score =
                bibcount::npi::npi_score(&publications, name, &params).map_err(npi_error)?;
            for warning in &score.warnings {
                eprintln!("warning: {warning}");
            }
            out.push_str(&format!("{name},{}\n", score.value));
        }
        None => {
            for (institution, score) in npi_table(&publications, &params).map_err(npi_error)? {
                out.push_str(&format!("{institution},{score}\n"));
            }
        }
    }
    emit(args.output.as_deref(), &out)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed)?;
    let team_size = match args.team_fixed {
        Some(size) => TeamSize::Fixed(size),
        None => TeamSize::MeanShifted {
            mean: args.team_mean,
        },
    };
    let spec = CorpusSpec {
        publications: args.pubs,
        authors: args.authors,
        institutions: args.institutions,
        countries: args.countries,
        team_size,
        cross_institution_rate: args.cross_rate,
        country_skew: args.skew,
        year_range: (args.year_from, args.year_to),
        synthesize_attributes: args.attributes,
        id_prefix: args.prefix.clone(),
    };
    let publications = generate_corpus(&spec, seed).map_err(input)?;
    emit(
        args.output.as_deref(),
        &publications_to_jsonl(&publications),
    )
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let publications = read_corpus(&args.input)?;
    let methods: Vec<&str> = args
        .methods
        .split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .collect();
    let mut levels = Vec::new();
    for name in args
        .levels
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
    {
        levels.push(parse_level(name)?);
    }
    let reports =
        run_comparison(&methods, &publications, &levels, args.top_k).map_err(harness_error)?;
    if let Some(dir) = &args.plot_data {
        fs::create_dir_all(dir).map_err(|e| input(format!("creating {}: {e}", dir.display())))?;
        for report in &reports {
            let name = format!(
                "{}-vs-{}-{}.csv",
                report.method_a, report.method_b, report.level
            );
            fs::write(dir.join(&name), report.pairs_csv())
                .map_err(|e| input(format!("writing {name}: {e}")))?;
        }
    }
    for report in &reports {
        eprintln!("{report}");
    }
    emit(args.output.as_deref(), &comparison_csv(&reports))
}
