use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use remanlca_core::buyback::{parse_schemes, scheme_emissions, scheme_saving, simulate_fleet, SchemeSpec};
use remanlca_core::categories::{category_breakdown, compare_systems, CategoryMap};
use remanlca_core::engine::system_emissions;
use remanlca_core::factors::FactorStore;
use remanlca_core::fixtures;
use remanlca_core::model::{ProductSystem, SystemDocument};
use remanlca_core::report::{
    breakdown_report, category_report, comparison_report, fleet_report, input_hash, quality_report, scenario_report,
    scheme_report, stage_report, sweep_report, validation_report, Format, ReportDocument,
};
use remanlca_core::scenario::{
    parse_scenarios, run_scenario, run_scenarios, sweep_univariate, Baseline, Location, LocationProfiles,
    RejectionMode, ScenarioParams, SweepParam, SweepSettings, SweepValue,
};
use remanlca_core::validate::{validate_factor_coverage, validate_system, Severity, ValidationReport};

use crate::error::CliError;
use crate::{GlobalArgs, OutputFormat};

const BUILTIN_VIRGIN: &str = "virgin";
const BUILTIN_REMAN: &str = "remanufactured";

/// Raw text of one input plus a label for reports.
struct Source {
    label: String,
    text: String,
}

impl Source {
    fn builtin(label: &str, text: &str) -> Self {
        Self {
            label: format!("builtin:{label}"),
            text: text.to_string(),
        }
    }

    fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(Self {
            label: path.display().to_string(),
            text,
        })
    }

    fn path_or_builtin(path: Option<&Path>, label: &str, text: &str) -> Result<Self, CliError> {
        match path {
            Some(p) => Self::read(p),
            None => Ok(Self::builtin(label, text)),
        }
    }

    /// `virgin` and `remanufactured` name the built-in inventories unless a
    /// file of that name exists.
    fn system(arg: &str) -> Result<Self, CliError> {
        let path = Path::new(arg);
        if !path.exists() {
            match arg {
                BUILTIN_VIRGIN => return Ok(Self::builtin(arg, fixtures::VIRGIN_JSON)),
                BUILTIN_REMAN => return Ok(Self::builtin(arg, fixtures::REMANUFACTURED_JSON)),
                _ => {}
            }
        }
        Self::read(path)
    }
}

/// Sources that contributed to a report, hashed into its metadata.
#[derive(Default)]
struct Provenance {
    labels: Vec<String>,
    texts: Vec<String>,
}

impl Provenance {
    fn add(&mut self, s: &Source) {
        self.labels.push(s.label.clone());
        self.texts.push(s.text.clone());
    }

    fn stamp(&self, doc: ReportDocument) -> ReportDocument {
        doc.meta("inputs", self.labels.join(" "))
            .meta("input_sha256", input_hash(&self.texts))
            .meta("generator", concat!("remanlca ", env!("CARGO_PKG_VERSION")))
    }
}

fn load_store(global: &GlobalArgs, prov: &mut Provenance) -> Result<FactorStore, CliError> {
    let src = Source::path_or_builtin(global.factors.as_deref(), "factors", fixtures::FACTORS_JSON)?;
    prov.add(&src);
    Ok(FactorStore::from_json(&src.text)?)
}

/// Parses, validates and builds a system; validation errors abort with exit 1.
fn load_system(src: &Source, prov: &mut Provenance) -> Result<ProductSystem, CliError> {
    prov.add(src);
    let doc = SystemDocument::from_json(&src.text).map_err(|e| CliError::Input(format!("{}: {e}", src.label)))?;
    let rubric = fixtures::rubric();
    let report = validate_system(&doc, &rubric);
    if !report.is_valid() {
        let first = report
            .findings
            .iter()
            .find(|f| f.severity == Severity::Error)
            .map(ToString::to_string)
            .unwrap_or_default();
        return Err(CliError::Validation(format!(
            "{}: {} error(s), first: {first}",
            src.label,
            report.error_count()
        )));
    }
    Ok(doc.into_system(&rubric)?)
}

fn load_categories(path: Option<&Path>, prov: &mut Provenance) -> Result<CategoryMap, CliError> {
    let src = Source::path_or_builtin(path, "categories", fixtures::CATEGORIES_JSON)?;
    prov.add(&src);
    Ok(CategoryMap::from_json(&src.text)?)
}

fn load_locations(path: Option<&Path>, prov: &mut Provenance) -> Result<LocationProfiles, CliError> {
    let src = Source::path_or_builtin(path, "locations", fixtures::LOCATIONS_JSON)?;
    prov.add(&src);
    Ok(LocationProfiles::from_json(&src.text)?)
}

fn load_scenarios(path: Option<&Path>, prov: &mut Provenance) -> Result<Vec<ScenarioParams>, CliError> {
    let src = Source::path_or_builtin(path, "scenarios", fixtures::SCENARIOS_JSON)?;
    prov.add(&src);
    Ok(parse_scenarios(&src.text)?)
}

fn emit(global: &GlobalArgs, doc: &ReportDocument) -> Result<(), CliError> {
    write_text(global, &render(global, doc)?)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Product system documents; defaults to both built-in inventories.
    pub paths: Vec<PathBuf>,
}

pub fn validate(global: &GlobalArgs, args: &ValidateArgs) -> Result<(), CliError> {
    let mut prov = Provenance::default();
    let store = load_store(global, &mut prov)?;
    let sources = if args.paths.is_empty() {
        vec![
            Source::builtin(BUILTIN_VIRGIN, fixtures::VIRGIN_JSON),
            Source::builtin(BUILTIN_REMAN, fixtures::REMANUFACTURED_JSON),
        ]
    } else {
        args.paths.iter().map(|p| Source::read(p)).collect::<Result<_, _>>()?
    };
    let rubric = fixtures::rubric();
    let mut all = ValidationReport::default();
    for src in &sources {
        prov.add(src);
        let doc = SystemDocument::from_json(&src.text).map_err(|e| CliError::Input(format!("{}: {e}", src.label)))?;
        let mut report = validate_system(&doc, &rubric);
        if report.is_valid() {
            let sys = doc.into_system(&rubric)?;
            report.extend(validate_factor_coverage(&sys, &store));
        }
        for f in &mut report.findings {
            f.subject = format!("{}: {}", src.label, f.subject);
        }
        all.extend(report);
    }
    let subject = sources.iter().map(|s| s.label.as_str()).collect::<Vec<_>>().join(" ");
    emit(global, &prov.stamp(validation_report(&subject, &all)))?;
    if all.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{} error(s)", all.error_count())))
    }
}

// ---------------------------------------------------------------------------
// compute / compare
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum View {
    Flow,
    Stage,
    Category,
    Quality,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Product system JSON, or `virgin` / `remanufactured` for the built-ins.
    #[arg(default_value = BUILTIN_VIRGIN)]
    pub system: String,
    #[arg(long, value_enum, default_value_t = View::Flow)]
    pub view: View,
    /// Category map JSON for `--view category`.
    #[arg(long)]
    pub categories: Option<PathBuf>,
}

pub fn compute(global: &GlobalArgs, args: &ComputeArgs) -> Result<(), CliError> {
    let mut prov = Provenance::default();
    let store = load_store(global, &mut prov)?;
    let sys = load_system(&Source::system(&args.system)?, &mut prov)?;
    let doc = match args.view {
        View::Quality => quality_report(&sys),
        view => {
            let bd = system_emissions(&sys, &store)?;
            match view {
                View::Flow => breakdown_report(&bd),
                View::Stage => stage_report(&bd),
                _ => {
                    let map = load_categories(args.categories.as_deref(), &mut prov)?;
                    category_report(&category_breakdown(&bd, &map)?)
                }
            }
        }
    };
    emit(global, &prov.stamp(doc))
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(default_value = BUILTIN_VIRGIN)]
    pub baseline: String,
    #[arg(default_value = BUILTIN_REMAN)]
    pub alternative: String,
    #[arg(long)]
    pub categories: Option<PathBuf>,
}

pub fn compare(global: &GlobalArgs, args: &CompareArgs) -> Result<(), CliError> {
    let mut prov = Provenance::default();
    let store = load_store(global, &mut prov)?;
    let a = load_system(&Source::system(&args.baseline)?, &mut prov)?;
    let b = load_system(&Source::system(&args.alternative)?, &mut prov)?;
    let map = load_categories(args.categories.as_deref(), &mut prov)?;
    let ta = category_breakdown(&system_emissions(&a, &store)?, &map)?;
    let tb = category_breakdown(&system_emissions(&b, &store)?, &map)?;
    emit(global, &prov.stamp(comparison_report(&compare_systems(&ta, &tb))))
}

// ---------------------------------------------------------------------------
// sweep / scenario
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Virgin inventory used for burdened metrics.
    #[arg(long, default_value = BUILTIN_VIRGIN)]
    pub virgin: String,
    /// Remanufactured inventory the transformations start from.
    #[arg(long, default_value = BUILTIN_REMAN)]
    pub reman: String,
    #[arg(long)]
    pub locations: Option<PathBuf>,
}

struct LoadedBaseline {
    store: FactorStore,
    reman: ProductSystem,
    locations: LocationProfiles,
    virgin_emission: f64,
}

impl LoadedBaseline {
    fn load(global: &GlobalArgs, args: &BaselineArgs, prov: &mut Provenance) -> Result<Self, CliError> {
        let store = load_store(global, prov)?;
        let virgin = load_system(&Source::system(&args.virgin)?, prov)?;
        let reman = load_system(&Source::system(&args.reman)?, prov)?;
        let locations = load_locations(args.locations.as_deref(), prov)?;
        let virgin_emission = system_emissions(&virgin, &store)?.total;
        Ok(Self {
            store,
            reman,
            locations,
            virgin_emission,
        })
    }

    fn base(&self) -> Baseline<'_> {
        Baseline {
            virgin_emission: self.virgin_emission,
            reman: &self.reman,
            store: &self.store,
            locations: &self.locations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Amortized,
    PerSuccess,
}

impl From<ModeArg> for RejectionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Amortized => RejectionMode::Amortized,
            ModeArg::PerSuccess => RejectionMode::PerSuccess,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// L (location), R (rejection rate) or N (turns).
    pub param: String,
    /// Comma-separated grid; defaults to DE,UK,USA / 0 to 0.7 in 0.05 steps / 1..5.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    /// Turns used for per-life columns of L and R sweeps.
    #[arg(long, default_value_t = 1)]
    pub turns: u32,
    /// Rejection accounting for R sweeps.
    #[arg(long, value_enum, default_value_t = ModeArg::PerSuccess)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

fn parse_grid(param: SweepParam, values: &[String]) -> Result<Vec<SweepValue>, CliError> {
    if values.is_empty() {
        return Ok(match param {
            SweepParam::Location => Location::ALL.iter().copied().map(SweepValue::Location).collect(),
            SweepParam::RejectionRate => (0..=14).map(|i| SweepValue::Rate(f64::from(i) * 0.05)).collect(),
            SweepParam::Turns => (1..=5).map(SweepValue::Turns).collect(),
        });
    }
    values
        .iter()
        .map(|v| {
            let bad = |what: &str| CliError::Input(format!("`{v}` is not a valid {what}"));
            Ok(match param {
                SweepParam::Location => SweepValue::Location(v.parse().map_err(|_| bad("location"))?),
                SweepParam::RejectionRate => SweepValue::Rate(v.trim().parse().map_err(|_| bad("rejection rate"))?),
                SweepParam::Turns => SweepValue::Turns(v.trim().parse().map_err(|_| bad("number of turns"))?),
            })
        })
        .collect()
}

pub fn sweep(global: &GlobalArgs, args: &SweepArgs) -> Result<(), CliError> {
    let param: SweepParam = args.param.parse()?;
    let grid = parse_grid(param, &args.values)?;
    let mut prov = Provenance::default();
    let loaded = LoadedBaseline::load(global, &args.baseline, &mut prov)?;
    let settings = SweepSettings {
        turns: args.turns,
        mode: args.mode.into(),
    };
    let points = sweep_univariate(param, &grid, &loaded.base(), settings)?;
    let mut doc = sweep_report(param, &points);
    if param != SweepParam::Turns {
        doc.push_meta("turns", settings.turns);
    }
    if param == SweepParam::RejectionRate {
        doc.push_meta("rejection_mode", settings.mode);
    }
    emit(global, &prov.stamp(doc))
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario list JSON; defaults to Good / Average / Bad.
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

pub fn scenario(global: &GlobalArgs, args: &ScenarioArgs) -> Result<(), CliError> {
    let mut prov = Provenance::default();
    let named = load_scenarios(args.scenarios.as_deref(), &mut prov)?;
    let loaded = LoadedBaseline::load(global, &args.baseline, &mut prov)?;
    let outcomes = run_scenarios(&named, &loaded.base())?;
    emit(global, &prov.stamp(scenario_report(&outcomes)))
}

// ---------------------------------------------------------------------------
// buyback
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct BuybackArgs {
    /// Scheme JSON (one object or `{"schemes": [...]}`). Without it, one
    /// scheme per named scenario is built from the baseline emissions.
    #[arg(long)]
    pub schemes: Option<PathBuf>,
    #[arg(long)]
    pub scenarios: Option<PathBuf>,
    /// Uses per scheme when building schemes from scenarios.
    #[arg(long, default_value_t = 1000)]
    pub uses: u64,
    /// Take each scheme's remanufactured emission from its own scenario
    /// instead of the baseline inventory.
    #[arg(long)]
    pub scenario_emissions: bool,
    /// Also run the Monte Carlo fleet check for each scheme.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub replications: u32,
    #[command(flatten)]
    pub baseline: BaselineArgs,
}

fn schemes_from_scenarios(
    global: &GlobalArgs,
    args: &BuybackArgs,
    prov: &mut Provenance,
) -> Result<Vec<SchemeSpec>, CliError> {
    let named = load_scenarios(args.scenarios.as_deref(), prov)?;
    let loaded = LoadedBaseline::load(global, &args.baseline, prov)?;
    let baseline_reman = system_emissions(&loaded.reman, &loaded.store)?.total;
    named
        .iter()
        .map(|s| {
            let e_reman = if args.scenario_emissions {
                run_scenario(s, &loaded.base())?.e_reman
            } else {
                baseline_reman
            };
            Ok(
                SchemeSpec::new(args.uses, s.turns, s.rejection_rate, loaded.virgin_emission, e_reman)?
                    .named(s.name.clone()),
            )
        })
        .collect()
}

pub fn buyback(global: &GlobalArgs, args: &BuybackArgs) -> Result<(), CliError> {
    let mut prov = Provenance::default();
    let specs = match &args.schemes {
        Some(path) => {
            let src = Source::read(path)?;
            prov.add(&src);
            parse_schemes(&src.text)?
        }
        None => schemes_from_scenarios(global, args, &mut prov)?,
    };
    let results = specs.iter().map(scheme_emissions).collect::<Result<Vec<_>, _>>()?;
    let savings: Vec<Option<f64>> = specs.iter().map(|s| scheme_saving(s).ok()).collect();
    let rows: Vec<_> = specs
        .iter()
        .zip(&results)
        .zip(&savings)
        .map(|((s, r), v)| (s, r, *v))
        .collect();
    let mut doc = prov.stamp(scheme_report(&rows));
    doc.push_meta(
        "e_reman_source",
        if args.schemes.is_some() {
            "scheme file"
        } else if args.scenario_emissions {
            "per scenario"
        } else {
            "baseline inventory"
        },
    );
    if !args.simulate {
        return emit(global, &doc);
    }
    let mut text = render(global, &doc)?;
    for (i, (spec, res)) in specs.iter().zip(&results).enumerate() {
        let fleet = simulate_fleet(spec, res.injection, args.seed, args.replications)?;
        let name = spec.name.clone().unwrap_or_else(|| format!("scheme-{}", i + 1));
        text.push('\n');
        text.push_str(&render(global, &fleet_report(&name, &fleet))?);
    }
    write_text(global, &text)
}

fn render(global: &GlobalArgs, doc: &ReportDocument) -> Result<String, CliError> {
    let format = match global.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Md => Format::Markdown,
    };
    Ok(doc.render(format)?)
}

fn write_text(global: &GlobalArgs, text: &str) -> Result<(), CliError> {
    match &global.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
