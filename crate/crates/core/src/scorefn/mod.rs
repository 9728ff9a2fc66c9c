//! Score functions: the credit-per-basic-unit rules of counting methods.
//!
//! A counting method is a choice of basic unit of analysis, object of study,
//! and score function. This module supplies the score functions — how much
//! credit each basic-unit instance of a single publication receives — as
//! values implementing [`ScoreFunction`], plus free `credit_*` helpers for
//! one-off use at the author level. Rolling credits up to objects of study
//! lives in [`crate::aggregate`]; nothing here mutates shared state, so every
//! operation is safe to call from any number of threads.
//!
//! Implemented families:
//!
//! - the classic five: complete, complete-fractionalized, straight, whole,
//!   whole-fractionalized;
//! - rank-weighted schemes: harmonic, proportional, and the geometric family
//!   (pure geometric, Howard et al., Zou & Peterson differ only in ratio and
//!   normalization);
//! - attribute-weighted schemes: seniority bonus (Boxenbaum et al.),
//!   principal-investigator split (Steinbrüchel), indicator and declared
//!   contribution weights;
//! - an equal-contribution floor, indicator-to-union visibility ratios, and
//!   exact Shapley values of byline coalition games.

mod shapley;

pub use shapley::shapley_values;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::corpus::{
    AttributionMap, CorpusError, Publication, UnitInstance, ATTR_CONTRIBUTION, ATTR_INDICATOR,
    ATTR_PI, ATTR_SENIOR,
};

/// Failure modes of score-function evaluation.
#[derive(Debug, Error)]
pub enum ScoreError {
    /// The unit slice was empty.
    #[error("{name}: publication {publication} has no basic units")]
    NoUnits { name: String, publication: String },
    /// The function enumerates exponentially many cases and refuses large bylines.
    #[error("{name}: {got} basic units exceed the limit of {limit}; sampling approximations are out of scope")]
    TooManyUnits {
        name: String,
        limit: usize,
        got: usize,
    },
    /// A constructor or call received a parameter outside its documented range.
    #[error("{name}: invalid parameter: {message}")]
    Parameter { name: String, message: String },
    /// Every unit weighed in at zero, so no credit can be assigned.
    #[error("{name}: publication {publication} has no creditable unit")]
    NoCreditableUnit { name: String, publication: String },
    /// A unit lacks an attribute the function requires.
    #[error(
        "{name}: unit {unit} of publication {publication} lacks required attribute {attribute:?}"
    )]
    MissingAttribute {
        name: String,
        publication: String,
        unit: String,
        attribute: String,
    },
    /// An attribute is present but unusable (wrong kind, negative, non-finite).
    #[error("{name}: attribute {attribute:?} on unit {unit} of publication {publication} is unusable: {message}")]
    BadAttribute {
        name: String,
        publication: String,
        unit: String,
        attribute: String,
        message: String,
    },
    /// The function groups units by object but no assignment was provided.
    #[error("{name}: an object assignment is required but none was provided")]
    MissingAttribution { name: String },
    /// The object assignment does not line up with the unit slice.
    #[error("{name}: object assignment covers {got} units, expected {expected}")]
    AttributionLength {
        name: String,
        expected: usize,
        got: usize,
    },
    /// The coalition value function violates its contract.
    #[error("invalid coalition value function: {0}")]
    Game(String),
    /// Deriving units or objects from the corpus failed.
    #[error(transparent)]
    Attribution(#[from] CorpusError),
}

/// Static description of a score function: identity, pinned and tunable
/// parameters, and what it needs from the data.
///
/// `requires_attribution` marks functions that group basic units by object of
/// study (the whole family); `requires_attributes` lists per-author attribute
/// keys read from [`UnitInstance::attributes`]; `piecewise` marks credit rules
/// defined by cases rather than a single expression; `max_units` caps the
/// byline size, if the function has a combinatorial core.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFunctionSpec {
    pub name: String,
    /// Named scalar parameters with their effective values.
    pub parameters: BTreeMap<String, f64>,
    /// Subset of `parameters` the caller chose rather than the method fixing.
    pub selectable_parameters: BTreeSet<String>,
    pub requires_attribution: bool,
    pub requires_attributes: BTreeSet<String>,
    pub piecewise: bool,
    pub max_units: Option<usize>,
}

impl ScoreFunctionSpec {
    fn named(name: &str) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            selectable_parameters: BTreeSet::new(),
            requires_attribution: false,
            requires_attributes: BTreeSet::new(),
            piecewise: false,
            max_units: None,
        }
    }
}

/// One basic-unit instance together with the credit it received.
#[derive(Debug, Clone, PartialEq)]
pub struct CreditEntry {
    pub unit: UnitInstance,
    pub credit: f64,
}

/// The per-unit credits of a single publication, in unit order.
#[derive(Debug, Clone, PartialEq)]
pub struct CreditVector {
    publication: String,
    entries: Vec<CreditEntry>,
}

impl CreditVector {
    fn new(publication: &str, units: &[UnitInstance], credits: Vec<f64>) -> Self {
        debug_assert_eq!(units.len(), credits.len());
        Self {
            publication: publication.into(),
            entries: units
                .iter()
                .cloned()
                .zip(credits)
                .map(|(unit, credit)| CreditEntry { unit, credit })
                .collect(),
        }
    }

    pub fn publication(&self) -> &str {
        &self.publication
    }

    pub fn entries(&self) -> &[CreditEntry] {
        &self.entries
    }

    /// The bare credits, in unit order.
    pub fn credits(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.credit).collect()
    }

    /// Sum of all credits of the publication.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.credit).sum()
    }
}

/// A score function: assigns a finite non-negative credit to every basic-unit
/// instance of one publication.
///
/// `units` is the publication's unit list (byline order at the author level,
/// address order above it). `objects` is the parallel object-of-study
/// assignment, required exactly when [`ScoreFunctionSpec::requires_attribution`]
/// is set and ignored otherwise. Implementations are pure functions of their
/// arguments.
pub trait ScoreFunction: Send + Sync {
    fn spec(&self) -> &ScoreFunctionSpec;

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError>;

    /// Convenience wrapper producing a [`CreditVector`] for the publication's
    /// units at the attribution map's basic level.
    fn credit_publication(
        &self,
        publication: &Publication,
        attribution: &AttributionMap,
    ) -> Result<CreditVector, ScoreError> {
        let units = publication.units_at(attribution.basic_level());
        let objects = attribution.assign(publication)?;
        let credits = self.credit_units(publication.id(), &units, Some(&objects))?;
        Ok(CreditVector::new(publication.id(), &units, credits))
    }
}

fn guard_units(
    spec: &ScoreFunctionSpec,
    publication: &str,
    units: &[UnitInstance],
) -> Result<(), ScoreError> {
    if units.is_empty() {
        return Err(ScoreError::NoUnits {
            name: spec.name.clone(),
            publication: publication.into(),
        });
    }
    if let Some(limit) = spec.max_units {
        if units.len() > limit {
            return Err(ScoreError::TooManyUnits {
                name: spec.name.clone(),
                limit,
                got: units.len(),
            });
        }
    }
    Ok(())
}

fn unit_label(unit: &UnitInstance) -> String {
    match &unit.author {
        Some(a) => a.clone(),
        None => format!("{}/{}", unit.institution, unit.country),
    }
}

fn flag_attribute(
    spec: &ScoreFunctionSpec,
    publication: &str,
    unit: &UnitInstance,
    key: &str,
) -> Result<bool, ScoreError> {
    let value = unit
        .attributes
        .get(key)
        .ok_or_else(|| ScoreError::MissingAttribute {
            name: spec.name.clone(),
            publication: publication.into(),
            unit: unit_label(unit),
            attribute: key.into(),
        })?;
    value.as_flag().ok_or_else(|| ScoreError::BadAttribute {
        name: spec.name.clone(),
        publication: publication.into(),
        unit: unit_label(unit),
        attribute: key.into(),
        message: "expected a boolean flag".into(),
    })
}

fn number_attribute(
    spec: &ScoreFunctionSpec,
    publication: &str,
    unit: &UnitInstance,
    key: &str,
) -> Result<f64, ScoreError> {
    let value = unit
        .attributes
        .get(key)
        .ok_or_else(|| ScoreError::MissingAttribute {
            name: spec.name.clone(),
            publication: publication.into(),
            unit: unit_label(unit),
            attribute: key.into(),
        })?;
    let number = value.as_number().ok_or_else(|| ScoreError::BadAttribute {
        name: spec.name.clone(),
        publication: publication.into(),
        unit: unit_label(unit),
        attribute: key.into(),
        message: "expected a number".into(),
    })?;
    if !number.is_finite() || number < 0.0 {
        return Err(ScoreError::BadAttribute {
            name: spec.name.clone(),
            publication: publication.into(),
            unit: unit_label(unit),
            attribute: key.into(),
            message: format!("must be finite and non-negative, got {number}"),
        });
    }
    Ok(number)
}

/// Normalizes non-negative weights to sum 1; all-zero weights are an error.
fn normalize_weights(
    spec: &ScoreFunctionSpec,
    publication: &str,
    weights: Vec<f64>,
) -> Result<Vec<f64>, ScoreError> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(ScoreError::NoCreditableUnit {
            name: spec.name.clone(),
            publication: publication.into(),
        });
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Groups the parallel object assignment: object → number of units.
fn object_group_sizes<'a>(
    spec: &ScoreFunctionSpec,
    units: &[UnitInstance],
    objects: Option<&'a [String]>,
) -> Result<(&'a [String], BTreeMap<&'a str, usize>), ScoreError> {
    let objects = objects.ok_or_else(|| ScoreError::MissingAttribution {
        name: spec.name.clone(),
    })?;
    if objects.len() != units.len() {
        return Err(ScoreError::AttributionLength {
            name: spec.name.clone(),
            expected: units.len(),
            got: objects.len(),
        });
    }
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for o in objects {
        *sizes.entry(o.as_str()).or_insert(0) += 1;
    }
    Ok((objects, sizes))
}

/// Complete counting: every basic unit is credited 1.
#[derive(Debug, Clone)]
pub struct Complete {
    spec: ScoreFunctionSpec,
}

impl Complete {
    pub fn new() -> Self {
        Self {
            spec: ScoreFunctionSpec::named("complete"),
        }
    }
}

impl Default for Complete {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for Complete {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        Ok(vec![1.0; units.len()])
    }
}

/// Complete-fractionalized counting: every basic unit is credited 1/n.
#[derive(Debug, Clone)]
pub struct CompleteFractionalized {
    spec: ScoreFunctionSpec,
}

impl CompleteFractionalized {
    pub fn new() -> Self {
        Self {
            spec: ScoreFunctionSpec::named("complete-fractionalized"),
        }
    }
}

impl Default for CompleteFractionalized {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for CompleteFractionalized {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        Ok(vec![1.0 / units.len() as f64; units.len()])
    }
}

/// Straight counting: the unit ranked first is credited 1, all others 0.
#[derive(Debug, Clone)]
pub struct Straight {
    spec: ScoreFunctionSpec,
}

impl Straight {
    pub fn new() -> Self {
        let mut spec = ScoreFunctionSpec::named("straight");
        spec.piecewise = true;
        Self { spec }
    }
}

impl Default for Straight {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for Straight {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let first = units
            .iter()
            .enumerate()
            .min_by_key(|(_, u)| u.rank)
            .map(|(i, _)| i)
            .expect("non-empty units");
        Ok((0..units.len())
            .map(|i| if i == first { 1.0 } else { 0.0 })
            .collect())
    }
}

/// Whole counting: the units of each distinct object of study share 1 credit,
/// so every object collects exactly 1 per publication it appears in.
#[derive(Debug, Clone)]
pub struct Whole {
    spec: ScoreFunctionSpec,
}

impl Whole {
    pub fn new() -> Self {
        let mut spec = ScoreFunctionSpec::named("whole");
        spec.requires_attribution = true;
        Self { spec }
    }
}

impl Default for Whole {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for Whole {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let (objects, sizes) = object_group_sizes(&self.spec, units, objects)?;
        Ok(objects
            .iter()
            .map(|o| 1.0 / sizes[o.as_str()] as f64)
            .collect())
    }
}

/// Whole-fractionalized counting: with m distinct objects of study, the units
/// of each object share 1/m, so the publication total is exactly 1.
#[derive(Debug, Clone)]
pub struct WholeFractionalized {
    spec: ScoreFunctionSpec,
}

impl WholeFractionalized {
    pub fn new() -> Self {
        let mut spec = ScoreFunctionSpec::named("whole-fractionalized");
        spec.requires_attribution = true;
        Self { spec }
    }

    /// Renames the function; several published methods use this credit rule.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.spec.name = name.into();
        self
    }
}

impl Default for WholeFractionalized {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for WholeFractionalized {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let (objects, sizes) = object_group_sizes(&self.spec, units, objects)?;
        let m = sizes.len() as f64;
        Ok(objects
            .iter()
            .map(|o| 1.0 / (m * sizes[o.as_str()] as f64))
            .collect())
    }
}

/// Harmonic counting: rank i receives (1/i) / (1 + 1/2 + … + 1/n).
#[derive(Debug, Clone)]
pub struct Harmonic {
    spec: ScoreFunctionSpec,
}

impl Harmonic {
    pub fn new() -> Self {
        Self {
            spec: ScoreFunctionSpec::named("harmonic"),
        }
    }
}

impl Default for Harmonic {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for Harmonic {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let h: f64 = (1..=units.len()).map(|j| 1.0 / j as f64).sum();
        Ok(units.iter().map(|u| 1.0 / (u.rank as f64 * h)).collect())
    }
}

/// Proportional (arithmetic) counting: rank i receives (n+1−i) / (n(n+1)/2).
#[derive(Debug, Clone)]
pub struct Proportional {
    spec: ScoreFunctionSpec,
}

impl Proportional {
    pub fn new() -> Self {
        Self {
            spec: ScoreFunctionSpec::named("proportional"),
        }
    }
}

impl Default for Proportional {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for Proportional {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let n = units.len() as f64;
        let denom = n * (n + 1.0) / 2.0;
        Ok(units
            .iter()
            .map(|u| (n + 1.0 - u.rank as f64) / denom)
            .collect())
    }
}

/// Geometric counting: each rank receives `ratio` times the credit of the
/// rank before it. Normalized variants rescale to a publication total of 1;
/// unnormalized variants give rank 1 a credit of exactly 1.
#[derive(Debug, Clone)]
pub struct Geometric {
    spec: ScoreFunctionSpec,
    ratio: f64,
    normalize: bool,
}

impl Geometric {
    /// A general geometric scheme with a caller-selected ratio.
    pub fn new(ratio: f64, normalize: bool) -> Result<Self, ScoreError> {
        if !(ratio.is_finite() && 0.0 < ratio && ratio < 1.0) {
            return Err(ScoreError::Parameter {
                name: "geometric".into(),
                message: format!("ratio must lie strictly between 0 and 1, got {ratio}"),
            });
        }
        let mut spec = ScoreFunctionSpec::named("geometric");
        spec.parameters.insert("ratio".into(), ratio);
        spec.parameters
            .insert("normalized".into(), if normalize { 1.0 } else { 0.0 });
        spec.selectable_parameters.insert("ratio".into());
        Ok(Self {
            spec,
            ratio,
            normalize,
        })
    }

    fn preset(name: &str, ratio: f64, normalize: bool) -> Self {
        let mut g = Self::new(ratio, normalize).expect("preset ratio is valid");
        g.spec.name = name.into();
        g.spec.selectable_parameters.clear();
        g
    }

    /// Pure geometric counting: halving ratio, normalized.
    pub fn pure() -> Self {
        Self::preset("pure-geometric", 0.5, true)
    }

    /// Howard et al.: credit drops by one third per rank, normalized.
    pub fn howard() -> Self {
        Self::preset("howard", 2.0 / 3.0, true)
    }

    /// Zou & Peterson: halving ratio, first rank pinned at credit 1.
    pub fn zou_peterson() -> Self {
        Self::preset("zou-peterson", 0.5, false)
    }
}

impl ScoreFunction for Geometric {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let weights: Vec<f64> = units
            .iter()
            .map(|u| self.ratio.powi(u.rank as i32 - 1))
            .collect();
        if self.normalize {
            let total: f64 = (1..=units.len())
                .map(|i| self.ratio.powi(i as i32 - 1))
                .sum();
            Ok(weights.into_iter().map(|w| w / total).collect())
        } else {
            Ok(weights)
        }
    }
}

/// Weight rules for [`WeightedFractional`].
#[derive(Debug, Clone, Copy, PartialEq)]
enum WeightRule {
    /// Units flagged senior weigh `multiplier`, all others 1.
    Senior { multiplier: f64 },
    /// Units flagged as principal investigators weigh 1, all others 0.
    PrincipalInvestigators,
    /// Each unit weighs its indicator value (h-index, fitness, and the like).
    Indicator,
    /// Each unit weighs its declared contribution share.
    Contribution,
}

/// Weighted-fractional counting: credit(i) = w(i) / Σw, with weights read
/// from per-author attributes.
#[derive(Debug, Clone)]
pub struct WeightedFractional {
    spec: ScoreFunctionSpec,
    rule: WeightRule,
}

impl WeightedFractional {
    /// Boxenbaum et al.: senior authors receive twice the credit of
    /// non-senior authors.
    pub fn boxenbaum() -> Self {
        let mut spec = ScoreFunctionSpec::named("boxenbaum");
        spec.parameters.insert("senior-multiplier".into(), 2.0);
        spec.requires_attributes.insert(ATTR_SENIOR.into());
        spec.piecewise = true;
        Self {
            spec,
            rule: WeightRule::Senior { multiplier: 2.0 },
        }
    }

    /// Steinbrüchel: the credit is divided equally between the principal
    /// investigators; everyone else receives 0.
    pub fn principal_investigators() -> Self {
        let mut spec = ScoreFunctionSpec::named("steinbruechel");
        spec.requires_attributes.insert(ATTR_PI.into());
        Self {
            spec,
            rule: WeightRule::PrincipalInvestigators,
        }
    }

    /// Weights proportional to each author's indicator value.
    pub fn indicator() -> Self {
        let mut spec = ScoreFunctionSpec::named("indicator-weights");
        spec.requires_attributes.insert(ATTR_INDICATOR.into());
        Self {
            spec,
            rule: WeightRule::Indicator,
        }
    }

    /// Weights proportional to each author's declared contribution share.
    pub fn contribution() -> Self {
        let mut spec = ScoreFunctionSpec::named("contribution-weights");
        spec.requires_attributes.insert(ATTR_CONTRIBUTION.into());
        Self {
            spec,
            rule: WeightRule::Contribution,
        }
    }

    /// Renames the function; several published methods share a weight rule.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.spec.name = name.into();
        self
    }
}

impl ScoreFunction for WeightedFractional {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let mut weights = Vec::with_capacity(units.len());
        for u in units {
            let w = match self.rule {
                WeightRule::Senior { multiplier } => {
                    if flag_attribute(&self.spec, publication_id, u, ATTR_SENIOR)? {
                        multiplier
                    } else {
                        1.0
                    }
                }
                WeightRule::PrincipalInvestigators => {
                    f64::from(flag_attribute(&self.spec, publication_id, u, ATTR_PI)?)
                }
                WeightRule::Indicator => {
                    number_attribute(&self.spec, publication_id, u, ATTR_INDICATOR)?
                }
                WeightRule::Contribution => {
                    number_attribute(&self.spec, publication_id, u, ATTR_CONTRIBUTION)?
                }
            };
            weights.push(w);
        }
        normalize_weights(&self.spec, publication_id, weights)
    }
}

/// Equal-contribution counting with a floor: every unit receives
/// max(1/n, floor), so small bylines match complete-fractionalized counting
/// and large bylines push the publication total above 1.
#[derive(Debug, Clone)]
pub struct EqualContribution {
    spec: ScoreFunctionSpec,
    floor: f64,
}

impl EqualContribution {
    pub const DEFAULT_FLOOR: f64 = 0.05;

    pub fn new(floor: f64) -> Result<Self, ScoreError> {
        if !(floor.is_finite() && 0.0 < floor && floor <= 1.0) {
            return Err(ScoreError::Parameter {
                name: "equal-contribution".into(),
                message: format!("floor must lie in (0, 1], got {floor}"),
            });
        }
        let mut spec = ScoreFunctionSpec::named("equal-contribution");
        spec.parameters.insert("floor".into(), floor);
        spec.piecewise = true;
        Ok(Self { spec, floor })
    }
}

impl Default for EqualContribution {
    fn default() -> Self {
        Self::new(Self::DEFAULT_FLOOR).expect("default floor is valid")
    }
}

impl ScoreFunction for EqualContribution {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let share = (1.0 / units.len() as f64).max(self.floor);
        Ok(vec![share; units.len()])
    }
}

/// Visibility-ratio counting: each unit receives its indicator value divided
/// by the indicator of the union of all units, read as the largest individual
/// indicator on the byline. Publication totals routinely exceed 1.
#[derive(Debug, Clone)]
pub struct VisibilityRatio {
    spec: ScoreFunctionSpec,
}

impl VisibilityRatio {
    pub fn new() -> Self {
        let mut spec = ScoreFunctionSpec::named("visibility-second-approach");
        spec.requires_attributes.insert(ATTR_INDICATOR.into());
        Self { spec }
    }
}

impl Default for VisibilityRatio {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for VisibilityRatio {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let mut indicators = Vec::with_capacity(units.len());
        for u in units {
            indicators.push(number_attribute(
                &self.spec,
                publication_id,
                u,
                ATTR_INDICATOR,
            )?);
        }
        let union = indicators.iter().cloned().fold(0.0f64, f64::max);
        if union <= 0.0 {
            return Err(ScoreError::NoCreditableUnit {
                name: self.spec.name.clone(),
                publication: publication_id.into(),
            });
        }
        Ok(indicators.into_iter().map(|i| i / union).collect())
    }
}

/// Shapley-value counting on an indicator coalition game.
///
/// The byline plays the game v(S) = (Σ_{i∈S} w_i / W)², where w_i is author
/// i's indicator value and W the byline total; each author is credited their
/// Shapley value. The grand coalition is worth 1, so by efficiency the
/// publication total is exactly 1. Exact enumeration caps the byline size.
#[derive(Debug, Clone)]
pub struct ShapleyIndicator {
    spec: ScoreFunctionSpec,
}

impl ShapleyIndicator {
    pub const MAX_UNITS: usize = 12;

    pub fn new() -> Self {
        let mut spec = ScoreFunctionSpec::named("shapley-value-approach");
        spec.parameters.insert("game-exponent".into(), 2.0);
        spec.requires_attributes.insert(ATTR_INDICATOR.into());
        spec.max_units = Some(Self::MAX_UNITS);
        Self { spec }
    }
}

impl Default for ShapleyIndicator {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for ShapleyIndicator {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        _objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        guard_units(&self.spec, publication_id, units)?;
        let mut weights = Vec::with_capacity(units.len());
        for u in units {
            weights.push(number_attribute(
                &self.spec,
                publication_id,
                u,
                ATTR_INDICATOR,
            )?);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(ScoreError::NoCreditableUnit {
                name: self.spec.name.clone(),
                publication: publication_id.into(),
            });
        }
        shapley_values(units.len(), Self::MAX_UNITS, |coalition| {
            let share: f64 = coalition.iter().map(|&i| weights[i]).sum::<f64>() / total;
            share * share
        })
    }
}

fn author_units(publication: &Publication) -> Vec<UnitInstance> {
    publication.units_at(crate::corpus::EntityLevel::Author)
}

/// Complete counting over the publication's byline.
pub fn credit_complete(publication: &Publication) -> CreditVector {
    let units = author_units(publication);
    let credits = Complete::new()
        .credit_units(publication.id(), &units, None)
        .expect("complete counting cannot fail on a valid publication");
    CreditVector::new(publication.id(), &units, credits)
}

/// Complete-fractionalized counting over the publication's byline.
pub fn credit_complete_fractionalized(publication: &Publication) -> CreditVector {
    let units = author_units(publication);
    let credits = CompleteFractionalized::new()
        .credit_units(publication.id(), &units, None)
        .expect("complete-fractionalized counting cannot fail on a valid publication");
    CreditVector::new(publication.id(), &units, credits)
}

/// Straight counting over the publication's byline.
pub fn credit_straight(publication: &Publication) -> CreditVector {
    let units = author_units(publication);
    let credits = Straight::new()
        .credit_units(publication.id(), &units, None)
        .expect("straight counting cannot fail on a valid publication");
    CreditVector::new(publication.id(), &units, credits)
}

/// Whole counting at the attribution map's levels.
pub fn credit_whole(
    publication: &Publication,
    attribution: &AttributionMap,
) -> Result<CreditVector, ScoreError> {
    Whole::new().credit_publication(publication, attribution)
}

/// Whole-fractionalized counting at the attribution map's levels.
pub fn credit_whole_fractionalized(
    publication: &Publication,
    attribution: &AttributionMap,
) -> Result<CreditVector, ScoreError> {
    WholeFractionalized::new().credit_publication(publication, attribution)
}

/// Harmonic counting over the publication's byline.
pub fn credit_harmonic(publication: &Publication) -> CreditVector {
    let units = author_units(publication);
    let credits = Harmonic::new()
        .credit_units(publication.id(), &units, None)
        .expect("harmonic counting cannot fail on a valid publication");
    CreditVector::new(publication.id(), &units, credits)
}

/// Proportional counting over the publication's byline.
pub fn credit_proportional(publication: &Publication) -> CreditVector {
    let units = author_units(publication);
    let credits = Proportional::new()
        .credit_units(publication.id(), &units, None)
        .expect("proportional counting cannot fail on a valid publication");
    CreditVector::new(publication.id(), &units, credits)
}

/// Geometric counting over the publication's byline.
pub fn credit_geometric(
    publication: &Publication,
    ratio: f64,
    normalize: bool,
) -> Result<CreditVector, ScoreError> {
    let units = author_units(publication);
    let credits = Geometric::new(ratio, normalize)?.credit_units(publication.id(), &units, None)?;
    Ok(CreditVector::new(publication.id(), &units, credits))
}

/// Weighted-fractional counting with caller-supplied per-author weights.
pub fn credit_weighted_fractional(
    publication: &Publication,
    weights: &[f64],
) -> Result<CreditVector, ScoreError> {
    let spec = ScoreFunctionSpec::named("weighted-fractional");
    let units = author_units(publication);
    if weights.len() != units.len() {
        return Err(ScoreError::Parameter {
            name: spec.name.clone(),
            message: format!(
                "{} weights supplied for {} authors",
                weights.len(),
                units.len()
            ),
        });
    }
    for w in weights {
        if !w.is_finite() || *w < 0.0 {
            return Err(ScoreError::Parameter {
                name: spec.name.clone(),
                message: format!("weights must be finite and non-negative, got {w}"),
            });
        }
    }
    let credits = normalize_weights(&spec, publication.id(), weights.to_vec())?;
    Ok(CreditVector::new(publication.id(), &units, credits))
}

/// Equal-contribution counting with the given credit floor.
pub fn credit_equal_contribution(
    publication: &Publication,
    floor: f64,
) -> Result<CreditVector, ScoreError> {
    let units = author_units(publication);
    let credits = EqualContribution::new(floor)?.credit_units(publication.id(), &units, None)?;
    Ok(CreditVector::new(publication.id(), &units, credits))
}

/// Visibility-ratio counting with caller-supplied indicators and union value.
pub fn credit_visibility_ratio(
    publication: &Publication,
    indicators: &[f64],
    union_indicator: f64,
) -> Result<CreditVector, ScoreError> {
    let name = "visibility-ratio";
    let units = author_units(publication);
    if indicators.len() != units.len() {
        return Err(ScoreError::Parameter {
            name: name.into(),
            message: format!(
                "{} indicators supplied for {} authors",
                indicators.len(),
                units.len()
            ),
        });
    }
    if !(union_indicator.is_finite() && union_indicator > 0.0) {
        return Err(ScoreError::Parameter {
            name: name.into(),
            message: format!("union indicator must be positive, got {union_indicator}"),
        });
    }
    for i in indicators {
        if !i.is_finite() || *i < 0.0 {
            return Err(ScoreError::Parameter {
                name: name.into(),
                message: format!("indicators must be finite and non-negative, got {i}"),
            });
        }
    }
    let credits = indicators.iter().map(|i| i / union_indicator).collect();
    Ok(CreditVector::new(publication.id(), &units, credits))
}

/// Shapley-value counting for an arbitrary coalition game over the byline.
///
/// `value` receives coalitions as sorted slices of 0-based byline positions.
pub fn credit_shapley<F>(
    publication: &Publication,
    value: F,
    n_max: usize,
) -> Result<CreditVector, ScoreError>
where
    F: Fn(&[usize]) -> f64,
{
    let units = author_units(publication);
    let credits = shapley_values(units.len(), n_max, value)?;
    Ok(CreditVector::new(publication.id(), &units, credits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Affiliation, AttrValue, AttributeMap, Authorship, EntityLevel};
    use std::collections::BTreeMap;

    fn plain_pub(n: usize) -> Publication {
        let authorships = (1..=n)
            .map(|i| {
                Authorship::new(
                    format!("a{i}"),
                    i as u32,
                    vec![Affiliation::new(format!("inst{i}"), "dk")],
                )
            })
            .collect();
        Publication::new("p1", 2020, authorships).unwrap()
    }

    fn attr_pub(attrs: &[(&str, AttrValue)]) -> Publication {
        let authorships = attrs
            .iter()
            .enumerate()
            .map(|(i, (key, value))| {
                let mut map = AttributeMap::new();
                map.insert((*key).into(), *value);
                Authorship::new(
                    format!("a{}", i + 1),
                    i as u32 + 1,
                    vec![Affiliation::new(format!("inst{}", i + 1), "dk")],
                )
                .with_attributes(map)
            })
            .collect();
        Publication::new("p1", 2020, authorships).unwrap()
    }

    fn assert_close(actual: &[f64], expected: &[f64]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!(
                (a - e).abs() < 1e-9,
                "got {actual:?}, expected {expected:?}"
            );
        }
    }

    #[test]
    fn complete_credits_every_unit_one() {
        assert_close(&credit_complete(&plain_pub(3)).credits(), &[1.0, 1.0, 1.0]);
        assert_close(&credit_complete(&plain_pub(1)).credits(), &[1.0]);
        assert!((credit_complete(&plain_pub(10)).total() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn complete_fractionalized_credits_one_over_n() {
        let third = 1.0 / 3.0;
        assert_close(
            &credit_complete_fractionalized(&plain_pub(3)).credits(),
            &[third; 3],
        );
        assert_close(
            &credit_complete_fractionalized(&plain_pub(4)).credits(),
            &[0.25; 4],
        );
        assert_close(
            &credit_complete_fractionalized(&plain_pub(1)).credits(),
            &[1.0],
        );
    }

    #[test]
    fn straight_credits_only_the_first_rank() {
        assert_close(&credit_straight(&plain_pub(3)).credits(), &[1.0, 0.0, 0.0]);
        assert_close(&credit_straight(&plain_pub(1)).credits(), &[1.0]);
    }

    #[test]
    fn straight_follows_the_rank_not_the_input_order() {
        // Byline with explicit ranks: c is ranked first.
        let p = Publication::new(
            "p1",
            2020,
            vec![
                Authorship::new("a", 2, vec![Affiliation::new("x", "dk")]),
                Authorship::new("b", 3, vec![Affiliation::new("x", "dk")]),
                Authorship::new("c", 1, vec![Affiliation::new("x", "dk")]),
            ],
        )
        .unwrap();
        let v = credit_straight(&p);
        let winner = v
            .entries()
            .iter()
            .find(|e| e.credit == 1.0)
            .and_then(|e| e.unit.author.clone())
            .unwrap();
        assert_eq!(winner, "c");
    }

    #[test]
    fn whole_gives_each_object_one_credit() {
        // Three authors: a1, a2 at institution y; a3 at institution z.
        let p = Publication::new(
            "p1",
            2020,
            vec![
                Authorship::new("a1", 1, vec![Affiliation::new("y", "dk")]),
                Authorship::new("a2", 2, vec![Affiliation::new("y", "dk")]),
                Authorship::new("a3", 3, vec![Affiliation::new("z", "dk")]),
            ],
        )
        .unwrap();
        let attr = AttributionMap::derive(
            std::slice::from_ref(&p),
            EntityLevel::Author,
            EntityLevel::Institution,
            BTreeMap::new(),
        )
        .unwrap();
        let v = credit_whole(&p, &attr).unwrap();
        assert_close(&v.credits(), &[0.5, 0.5, 1.0]);
        assert!((v.total() - 2.0).abs() < 1e-12, "one credit per object");
    }

    #[test]
    fn whole_fractionalized_shares_one_over_m_per_object() {
        let p = Publication::new(
            "p1",
            2020,
            vec![
                Authorship::new("a1", 1, vec![Affiliation::new("y", "dk")]),
                Authorship::new("a2", 2, vec![Affiliation::new("y", "dk")]),
                Authorship::new("a3", 3, vec![Affiliation::new("z", "dk")]),
            ],
        )
        .unwrap();
        let attr = AttributionMap::derive(
            std::slice::from_ref(&p),
            EntityLevel::Author,
            EntityLevel::Institution,
            BTreeMap::new(),
        )
        .unwrap();
        let v = credit_whole_fractionalized(&p, &attr).unwrap();
        assert_close(&v.credits(), &[0.25, 0.25, 0.5]);
        assert!((v.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn whole_family_requires_an_object_assignment() {
        let units = plain_pub(2).units_at(EntityLevel::Author);
        let err = Whole::new().credit_units("p1", &units, None).unwrap_err();
        assert!(matches!(err, ScoreError::MissingAttribution { .. }));
        let err = WholeFractionalized::new()
            .credit_units("p1", &units, Some(&["y".into()]))
            .unwrap_err();
        assert!(matches!(
            err,
            ScoreError::AttributionLength {
                expected: 2,
                got: 1,
                ..
            }
        ));
    }

    #[test]
    fn harmonic_matches_the_closed_form() {
        assert_close(
            &credit_harmonic(&plain_pub(3)).credits(),
            &[6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0],
        );
        assert_close(&credit_harmonic(&plain_pub(1)).credits(), &[1.0]);
        // credit(i) / credit(1) = 1/i at any byline size.
        let credits = credit_harmonic(&plain_pub(50)).credits();
        for (i, c) in credits.iter().enumerate() {
            assert!((c / credits[0] - 1.0 / (i as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn proportional_matches_the_closed_form() {
        assert_close(
            &credit_proportional(&plain_pub(3)).credits(),
            &[0.5, 1.0 / 3.0, 1.0 / 6.0],
        );
        assert_close(
            &credit_proportional(&plain_pub(2)).credits(),
            &[2.0 / 3.0, 1.0 / 3.0],
        );
        assert_close(&credit_proportional(&plain_pub(1)).credits(), &[1.0]);
    }

    #[test]
    fn geometric_presets_match_hand_sums() {
        let p = plain_pub(3);
        assert_close(
            &credit_geometric(&p, 0.5, false).unwrap().credits(),
            &[1.0, 0.5, 0.25],
        );
        assert_close(
            &credit_geometric(&p, 0.5, true).unwrap().credits(),
            &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
        );
        assert_close(
            &credit_geometric(&p, 2.0 / 3.0, true).unwrap().credits(),
            &[9.0 / 19.0, 6.0 / 19.0, 4.0 / 19.0],
        );
        let units = p.units_at(EntityLevel::Author);
        assert_close(
            &Geometric::howard()
                .credit_units(p.id(), &units, None)
                .unwrap(),
            &[9.0 / 19.0, 6.0 / 19.0, 4.0 / 19.0],
        );
        assert_close(
            &Geometric::zou_peterson()
                .credit_units(p.id(), &units, None)
                .unwrap(),
            &[1.0, 0.5, 0.25],
        );
    }

    #[test]
    fn geometric_ratio_is_validated() {
        for ratio in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                Geometric::new(ratio, true),
                Err(ScoreError::Parameter { .. })
            ));
        }
    }

    #[test]
    fn normalized_geometric_first_credit_approaches_one_minus_ratio() {
        let credits = credit_geometric(&plain_pub(50), 0.5, true)
            .unwrap()
            .credits();
        assert!((credits[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn boxenbaum_doubles_the_senior_author() {
        let p = attr_pub(&[
            ("senior", AttrValue::Flag(true)),
            ("senior", AttrValue::Flag(false)),
            ("senior", AttrValue::Flag(false)),
        ]);
        let units = p.units_at(EntityLevel::Author);
        let credits = WeightedFractional::boxenbaum()
            .credit_units(p.id(), &units, None)
            .unwrap();
        assert_close(&credits, &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn steinbruechel_splits_between_principal_investigators() {
        let p = attr_pub(&[
            ("pi", AttrValue::Flag(true)),
            ("pi", AttrValue::Flag(true)),
            ("pi", AttrValue::Flag(false)),
        ]);
        let units = p.units_at(EntityLevel::Author);
        let f = WeightedFractional::principal_investigators();
        assert_close(
            &f.credit_units(p.id(), &units, None).unwrap(),
            &[0.5, 0.5, 0.0],
        );

        let nobody = attr_pub(&[
            ("pi", AttrValue::Flag(false)),
            ("pi", AttrValue::Flag(false)),
        ]);
        let units = nobody.units_at(EntityLevel::Author);
        assert!(matches!(
            f.credit_units(nobody.id(), &units, None),
            Err(ScoreError::NoCreditableUnit { .. })
        ));
    }

    #[test]
    fn missing_required_attributes_are_reported() {
        let p = plain_pub(2);
        let units = p.units_at(EntityLevel::Author);
        let err = WeightedFractional::boxenbaum()
            .credit_units(p.id(), &units, None)
            .unwrap_err();
        match err {
            ScoreError::MissingAttribute {
                attribute, unit, ..
            } => {
                assert_eq!(attribute, "senior");
                assert_eq!(unit, "a1");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn uniform_weights_reduce_to_complete_fractionalized() {
        let p = plain_pub(4);
        let v = credit_weighted_fractional(&p, &[3.0, 3.0, 3.0, 3.0]).unwrap();
        assert_close(&v.credits(), &credit_complete_fractionalized(&p).credits());
    }

    #[test]
    fn contribution_weights_follow_declared_shares() {
        let p = attr_pub(&[
            ("contribution", AttrValue::Number(0.7)),
            ("contribution", AttrValue::Number(0.2)),
            ("contribution", AttrValue::Number(0.1)),
        ]);
        let units = p.units_at(EntityLevel::Author);
        let credits = WeightedFractional::contribution()
            .credit_units(p.id(), &units, None)
            .unwrap();
        assert_close(&credits, &[0.7, 0.2, 0.1]);
    }

    #[test]
    fn equal_contribution_applies_the_floor() {
        // 1/30 < 0.05, so the floor binds and the total exceeds 1.
        let v = credit_equal_contribution(&plain_pub(30), 0.05).unwrap();
        assert_close(&v.credits(), &[0.05; 30]);
        assert!((v.total() - 1.5).abs() < 1e-9);
        // At n = 20 the floor exactly equals 1/n.
        let v = credit_equal_contribution(&plain_pub(20), 0.05).unwrap();
        assert_close(
            &v.credits(),
            &credit_complete_fractionalized(&plain_pub(20)).credits(),
        );
        // At n = 10 the floor is slack.
        let v = credit_equal_contribution(&plain_pub(10), 0.05).unwrap();
        assert_close(&v.credits(), &[0.1; 10]);
        assert!(matches!(
            credit_equal_contribution(&plain_pub(2), 0.0),
            Err(ScoreError::Parameter { .. })
        ));
    }

    #[test]
    fn visibility_ratio_divides_by_the_union() {
        let p = attr_pub(&[
            ("indicator", AttrValue::Number(10.0)),
            ("indicator", AttrValue::Number(5.0)),
        ]);
        let units = p.units_at(EntityLevel::Author);
        let v = VisibilityRatio::new()
            .credit_units(p.id(), &units, None)
            .unwrap();
        assert_close(&v, &[1.0, 0.5]);
        assert!(
            (v.iter().sum::<f64>() - 1.5).abs() < 1e-12,
            "totals may exceed 1"
        );

        let via_free = credit_visibility_ratio(&p, &[10.0, 5.0], 10.0).unwrap();
        assert_close(&via_free.credits(), &[1.0, 0.5]);
        assert!(matches!(
            credit_visibility_ratio(&p, &[10.0, 5.0], 0.0),
            Err(ScoreError::Parameter { .. })
        ));
    }

    #[test]
    fn visibility_ratio_with_all_zero_indicators_fails() {
        let p = attr_pub(&[
            ("indicator", AttrValue::Number(0.0)),
            ("indicator", AttrValue::Number(0.0)),
        ]);
        let units = p.units_at(EntityLevel::Author);
        assert!(matches!(
            VisibilityRatio::new().credit_units(p.id(), &units, None),
            Err(ScoreError::NoCreditableUnit { .. })
        ));
    }

    #[test]
    fn shapley_veto_game_matches_hand_derivation() {
        let v = credit_shapley(
            &plain_pub(2),
            |s| if s.contains(&0) { 1.0 } else { 0.0 },
            12,
        )
        .unwrap();
        assert_close(&v.credits(), &[1.0, 0.0]);
    }

    #[test]
    fn shapley_indicator_is_efficient_and_monotone() {
        let p = attr_pub(&[
            ("indicator", AttrValue::Number(30.0)),
            ("indicator", AttrValue::Number(20.0)),
            ("indicator", AttrValue::Number(10.0)),
        ]);
        let units = p.units_at(EntityLevel::Author);
        let credits = ShapleyIndicator::new()
            .credit_units(p.id(), &units, None)
            .unwrap();
        assert!(
            (credits.iter().sum::<f64>() - 1.0).abs() < 1e-9,
            "efficiency"
        );
        assert!(credits[0] > credits[1] && credits[1] > credits[2]);
    }

    #[test]
    fn shapley_indicator_refuses_large_bylines() {
        let attrs: Vec<(&str, AttrValue)> = (0..13)
            .map(|_| ("indicator", AttrValue::Number(1.0)))
            .collect();
        let p = attr_pub(&attrs);
        let units = p.units_at(EntityLevel::Author);
        assert!(matches!(
            ShapleyIndicator::new().credit_units(p.id(), &units, None),
            Err(ScoreError::TooManyUnits { got: 13, .. })
        ));
    }

    #[test]
    fn specs_expose_the_table_relevant_structure() {
        assert!(WeightedFractional::boxenbaum().spec().piecewise);
        assert!(
            !WeightedFractional::principal_investigators()
                .spec()
                .piecewise
        );
        assert!(EqualContribution::default().spec().piecewise);
        assert!(Straight::new().spec().piecewise);
        assert!(Whole::new().spec().requires_attribution);
        assert!(!Geometric::howard()
            .spec()
            .selectable_parameters
            .contains("ratio"));
        assert!(Geometric::new(0.4, true)
            .unwrap()
            .spec()
            .selectable_parameters
            .contains("ratio"));
        assert!(VisibilityRatio::new()
            .spec()
            .requires_attributes
            .contains("indicator"));
        assert_eq!(ShapleyIndicator::new().spec().max_units, Some(12));
    }
}
