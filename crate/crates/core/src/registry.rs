//! The method catalog: 36 counting methods (4 classics plus 32 reviewed),
//! each carrying its published classification claim, the argument group it
//! was introduced with, and ten validity flags, together with the lint
//! operations that check those flags.
//!
//! The flag table ships verbatim as an embedded CSV data file; the lint
//! operations read the declarations and, for implemented methods,
//! cross-check them against the bound score function's own structure
//! (selectable parameters, attribute requirements, piecewise credit rules)
//! rather than inferring flags from scratch. Methods without an
//! implementation are first-class stub entries: listable and lintable, but
//! building one raises [`RegistryError::NotImplemented`].

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::classify::RankVerdict;
use crate::npi::NpiInstitutional;
use crate::scorefn::{
    Complete, CompleteFractionalized, EqualContribution, Geometric, Harmonic, Proportional,
    ScoreFunction, ShapleyIndicator, Straight, VisibilityRatio, WeightedFractional, Whole,
    WholeFractionalized,
};

/// Failure modes of registry lookups and lints.
#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown method: {name}")]
    UnknownMethod { name: String },
    #[error("stub method: {name} is cataloged but carries no score function")]
    NotImplemented { name: String },
    #[error("invalid registry filter: {0}")]
    Filter(String),
    #[error("registry inconsistency for {name}: {message}")]
    Inconsistent { name: String, message: String },
}

/// Whether a cataloged method has a bound score function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodStatus {
    Implemented,
    Stub,
}

impl fmt::Display for MethodStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Implemented => "implemented",
            Self::Stub => "stub",
        })
    }
}

/// The published classification claim of a method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Framework1Claim {
    RankDependentFractionalized,
    RankDependentNonFractionalized,
    RankIndependentFractionalized,
    RankIndependentNonFractionalized,
    /// The method cannot be expressed as a fixed crediting scheme, so the
    /// rank question does not apply.
    NonConforming,
}

impl Framework1Claim {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rank-dependent fractionalized" => Self::RankDependentFractionalized,
            "rank-dependent non-fractionalized" => Self::RankDependentNonFractionalized,
            "rank-independent fractionalized" => Self::RankIndependentFractionalized,
            "rank-independent non-fractionalized" => Self::RankIndependentNonFractionalized,
            "non-conforming" => Self::NonConforming,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::RankDependentFractionalized => "rank-dependent fractionalized",
            Self::RankDependentNonFractionalized => "rank-dependent non-fractionalized",
            Self::RankIndependentFractionalized => "rank-independent fractionalized",
            Self::RankIndependentNonFractionalized => "rank-independent non-fractionalized",
            Self::NonConforming => "non-conforming",
        }
    }

    /// Whether the claim treats credits as fractionalized; `None` for
    /// non-conforming methods, where the category does not decide it.
    pub fn fractionalized(&self) -> Option<bool> {
        match self {
            Self::RankDependentFractionalized | Self::RankIndependentFractionalized => Some(true),
            Self::RankDependentNonFractionalized | Self::RankIndependentNonFractionalized => {
                Some(false)
            }
            Self::NonConforming => None,
        }
    }

    /// Maps an empirical classification onto the claim categories. Uneven
    /// sharing counts as rank dependence here: weighted schemes credit
    /// equal-ranked authors unequally, which the published categories
    /// group with the rank-dependent methods.
    pub fn from_observation(rank: RankVerdict, uneven_sharing: bool, fractionalized: bool) -> Self {
        match rank {
            RankVerdict::NotApplicable => Self::NonConforming,
            _ => {
                let rankish = rank == RankVerdict::Dependent || uneven_sharing;
                match (rankish, fractionalized) {
                    (true, true) => Self::RankDependentFractionalized,
                    (true, false) => Self::RankDependentNonFractionalized,
                    (false, true) => Self::RankIndependentFractionalized,
                    (false, false) => Self::RankIndependentNonFractionalized,
                }
            }
        }
    }
}

impl fmt::Display for Framework1Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The argument subtype a Group-1 method was introduced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group1Argument {
    Participation,
    Production,
    Contribution,
    Output,
    AuthorRole,
    Productivity,
}

impl Group1Argument {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "participation" => Self::Participation,
            "production" => Self::Production,
            "contribution" => Self::Contribution,
            "output" => Self::Output,
            "author-role" => Self::AuthorRole,
            "productivity" => Self::Productivity,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Participation => "participation",
            Self::Production => "production",
            Self::Contribution => "contribution",
            Self::Output => "output",
            Self::AuthorRole => "author-role",
            Self::Productivity => "productivity",
        }
    }
}

/// The argument subtype a Group-2 method was introduced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group2Argument {
    Additivity,
    BalancedScoresAcrossDisciplines,
}

impl Group2Argument {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "additivity" => Self::Additivity,
            "balanced-scores-across-disciplines" => Self::BalancedScoresAcrossDisciplines,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Additivity => "additivity",
            Self::BalancedScoresAcrossDisciplines => "balanced-scores-across-disciplines",
        }
    }
}

/// Which kind of argument a method was introduced with: properties of the
/// crediting itself (1), properties of the resulting scores (2), pragmatic
/// arguments (3), or agreement with outside perceptions (4).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Framework2Group {
    Group1(Group1Argument),
    Group2(Group2Argument),
    Group3(String),
    Group4(String),
}

impl Framework2Group {
    pub fn parse(s: &str) -> Option<Self> {
        let (group, subtype) = s.split_once(':')?;
        Some(match group {
            "group1" => Self::Group1(Group1Argument::parse(subtype)?),
            "group2" => Self::Group2(Group2Argument::parse(subtype)?),
            "group3" if !subtype.is_empty() => Self::Group3(subtype.to_string()),
            "group4" if !subtype.is_empty() => Self::Group4(subtype.to_string()),
            _ => return None,
        })
    }

    pub fn number(&self) -> u8 {
        match self {
            Self::Group1(_) => 1,
            Self::Group2(_) => 2,
            Self::Group3(_) => 3,
            Self::Group4(_) => 4,
        }
    }
}

impl fmt::Display for Framework2Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Group1(a) => write!(f, "group1:{}", a.as_str()),
            Self::Group2(a) => write!(f, "group2:{}", a.as_str()),
            Self::Group3(s) => write!(f, "group3:{s}"),
            Self::Group4(s) => write!(f, "group4:{s}"),
        }
    }
}

/// A yes/no/not-applicable validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Yes,
    No,
    NotApplicable,
}

impl Flag {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "Y" => Self::Yes,
            "N" => Self::No,
            "NA" => Self::NotApplicable,
            _ => return None,
        })
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Yes => "Y",
            Self::No => "N",
            Self::NotApplicable => "NA",
        })
    }
}

/// The five adequacy columns: which methods the introducing work used to
/// argue the new counting method measures what it intends to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdequacyFlags {
    pub compare_to_others: bool,
    pub principles: bool,
    pub quantitative_models: bool,
    pub surveys: bool,
    pub compare_groups: bool,
}

/// The two sensitivity columns: elements that tie the method to the
/// evidence of its time or pin fixed credits on selected authors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensitivityFlags {
    pub time_specific_evidence: bool,
    /// Only meaningful for fractionalized methods; `NotApplicable` otherwise.
    pub fixed_credits: Flag,
}

/// The three homogeneity columns: elements that split basic units or
/// publications into differently treated groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomogeneityFlags {
    pub parameters_selected: bool,
    pub external_elements: bool,
    pub conditional_equations: bool,
}

/// One catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodMetadata {
    pub name: String,
    /// Year the method entered the literature; `None` for the four classics
    /// that predate the reviewed period.
    pub introduced: Option<i32>,
    pub status: MethodStatus,
    pub framework1_claim: Framework1Claim,
    /// Argument group; `None` for the classics, which were not introduced
    /// with a recorded argument.
    pub framework2_group: Option<Framework2Group>,
    pub adequacy: AdequacyFlags,
    pub sensitivity: SensitivityFlags,
    pub homogeneity: HomogeneityFlags,
    /// Marks the three methods used in four or more research evaluations.
    pub frequent_evaluation_use: bool,
}

impl MethodMetadata {
    /// True when the entry belongs to the reviewed period (1981–2018).
    pub fn reviewed(&self) -> bool {
        self.introduced.is_some()
    }
}

const REGISTRY_CSV: &str = include_str!("../data/registry.csv");

/// Methods used in four or more research evaluations.
const FREQUENT_EVALUATION_USE: [&str; 3] = ["harmonic", "howard", "sequence-determines-credit"];

fn parse_bool_flag(name: &str, column: &str, value: &str) -> bool {
    match Flag::parse(value) {
        Some(Flag::Yes) => true,
        Some(Flag::No) => false,
        _ => panic!("registry data: {name}: column {column} must be Y or N, got {value:?}"),
    }
}

fn load() -> Vec<MethodMetadata> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(REGISTRY_CSV.as_bytes());
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.expect("registry data: readable CSV");
        let field = |i: usize| record.get(i).expect("registry data: 15 columns").trim();
        let name = field(0).to_string();
        let introduced = match field(1) {
            "" => None,
            y => Some(
                y.parse::<i32>()
                    .unwrap_or_else(|_| panic!("registry data: {name}: bad year {y:?}")),
            ),
        };
        let status = match field(2) {
            "implemented" => MethodStatus::Implemented,
            "stub" => MethodStatus::Stub,
            other => panic!("registry data: {name}: bad status {other:?}"),
        };
        let framework1_claim = Framework1Claim::parse(field(3))
            .unwrap_or_else(|| panic!("registry data: {name}: bad claim {:?}", field(3)));
        let framework2_group = match field(4) {
            "" => None,
            g => Some(
                Framework2Group::parse(g)
                    .unwrap_or_else(|| panic!("registry data: {name}: bad group {g:?}")),
            ),
        };
        let adequacy = AdequacyFlags {
            compare_to_others: parse_bool_flag(&name, "compare_to_others", field(5)),
            principles: parse_bool_flag(&name, "principles", field(6)),
            quantitative_models: parse_bool_flag(&name, "quantitative_models", field(7)),
            surveys: parse_bool_flag(&name, "surveys", field(8)),
            compare_groups: parse_bool_flag(&name, "compare_groups", field(9)),
        };
        let sensitivity = SensitivityFlags {
            time_specific_evidence: parse_bool_flag(&name, "time_specific_evidence", field(10)),
            fixed_credits: Flag::parse(field(11)).unwrap_or_else(|| {
                panic!("registry data: {name}: bad fixed_credits {:?}", field(11))
            }),
        };
        let homogeneity = HomogeneityFlags {
            parameters_selected: parse_bool_flag(&name, "parameters_selected", field(12)),
            external_elements: parse_bool_flag(&name, "external_elements", field(13)),
            conditional_equations: parse_bool_flag(&name, "conditional_equations", field(14)),
        };
        let frequent_evaluation_use = FREQUENT_EVALUATION_USE.contains(&name.as_str());
        entries.push(MethodMetadata {
            name,
            introduced,
            status,
            framework1_claim,
            framework2_group,
            adequacy,
            sensitivity,
            homogeneity,
            frequent_evaluation_use,
        });
    }
    entries
}

/// All 36 catalog entries in chronological order.
pub fn all() -> &'static [MethodMetadata] {
    static ENTRIES: OnceLock<Vec<MethodMetadata>> = OnceLock::new();
    ENTRIES.get_or_init(load)
}

/// Looks up one entry by name.
pub fn get(name: &str) -> Result<&'static MethodMetadata, RegistryError> {
    all()
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| RegistryError::UnknownMethod {
            name: name.to_string(),
        })
}

/// Builds the score function bound to an implemented entry.
pub fn build(name: &str) -> Result<Arc<dyn ScoreFunction>, RegistryError> {
    let meta = get(name)?;
    bind(&meta.name).ok_or_else(|| RegistryError::NotImplemented {
        name: meta.name.clone(),
    })
}

fn bind(name: &str) -> Option<Arc<dyn ScoreFunction>> {
    Some(match name {
        "complete" => Arc::new(Complete::new()),
        "complete-fractionalized" => Arc::new(CompleteFractionalized::new()),
        "straight" => Arc::new(Straight::new()),
        "whole" => Arc::new(Whole::new()),
        "harmonic" => Arc::new(Harmonic::new()),
        "proportional" => Arc::new(Proportional::new()),
        "howard" => Arc::new(Geometric::howard()),
        "boxenbaum" => Arc::new(WeightedFractional::boxenbaum()),
        "on-line-fractionation" => {
            Arc::new(WholeFractionalized::new().with_name("on-line-fractionation"))
        }
        "pure-geometric" => Arc::new(Geometric::pure()),
        "equal-contribution" => Arc::new(EqualContribution::default()),
        "pareto-weights" => Arc::new(WeightedFractional::indicator().with_name("pareto-weights")),
        "shapley-value-approach" => Arc::new(ShapleyIndicator::new()),
        "visibility-first-approach" => {
            Arc::new(WeightedFractional::indicator().with_name("visibility-first-approach"))
        }
        "visibility-second-approach" => Arc::new(VisibilityRatio::new()),
        "shen-barabasi" => Arc::new(WeightedFractional::contribution().with_name("shen-barabasi")),
        "npi-institutional" => Arc::new(NpiInstitutional::new()),
        "zou-peterson" => Arc::new(Geometric::zou_peterson()),
        "relative-intellectual-contribution" => Arc::new(
            WeightedFractional::contribution().with_name("relative-intellectual-contribution"),
        ),
        "steinbruechel" => Arc::new(WeightedFractional::principal_investigators()),
        _ => return None,
    })
}

/// Predicates for [`list`]; every field is optional and they conjoin.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegistryFilter {
    pub status: Option<MethodStatus>,
    pub claim: Option<Framework1Claim>,
    pub group: Option<u8>,
    pub frequent_evaluation_use: Option<bool>,
    pub reviewed: Option<bool>,
}

impl RegistryFilter {
    /// Parses `key=value` predicates. Keys: `status`, `claim`, `group`,
    /// `frequent`, `reviewed`.
    pub fn parse<'a>(specs: impl IntoIterator<Item = &'a str>) -> Result<Self, RegistryError> {
        let mut filter = Self::default();
        for spec in specs {
            let (key, value) = spec.split_once('=').ok_or_else(|| {
                RegistryError::Filter(format!("expected key=value, got {spec:?}"))
            })?;
            match key {
                "status" => {
                    filter.status = Some(match value {
                        "implemented" => MethodStatus::Implemented,
                        "stub" => MethodStatus::Stub,
                        _ => {
                            return Err(RegistryError::Filter(format!(
                                "status must be implemented or stub, got {value:?}"
                            )))
                        }
                    })
                }
                "claim" => {
                    filter.claim =
                        Some(Framework1Claim::parse(value).ok_or_else(|| {
                            RegistryError::Filter(format!("unknown claim {value:?}"))
                        })?)
                }
                "group" => {
                    let number = value
                        .strip_prefix("group")
                        .unwrap_or(value)
                        .parse::<u8>()
                        .ok()
                        .filter(|n| (1..=4).contains(n))
                        .ok_or_else(|| {
                            RegistryError::Filter(format!(
                                "group must be group1..group4, got {value:?}"
                            ))
                        })?;
                    filter.group = Some(number);
                }
                "frequent" => {
                    filter.frequent_evaluation_use = Some(parse_yes_no(key, value)?);
                }
                "reviewed" => {
                    filter.reviewed = Some(parse_yes_no(key, value)?);
                }
                _ => return Err(RegistryError::Filter(format!("unknown filter key {key:?}"))),
            }
        }
        Ok(filter)
    }

    fn matches(&self, meta: &MethodMetadata) -> bool {
        self.status.is_none_or(|s| meta.status == s)
            && self.claim.is_none_or(|c| meta.framework1_claim == c)
            && self.group.is_none_or(|g| {
                meta.framework2_group
                    .as_ref()
                    .is_some_and(|x| x.number() == g)
            })
            && self
                .frequent_evaluation_use
                .is_none_or(|f| meta.frequent_evaluation_use == f)
            && self.reviewed.is_none_or(|r| meta.reviewed() == r)
    }
}

fn parse_yes_no(key: &str, value: &str) -> Result<bool, RegistryError> {
    match value {
        "yes" | "true" => Ok(true),
        "no" | "false" => Ok(false),
        _ => Err(RegistryError::Filter(format!(
            "{key} must be yes or no, got {value:?}"
        ))),
    }
}

/// Lists entries matching the filter, in catalog order.
pub fn list(filter: &RegistryFilter) -> Vec<&'static MethodMetadata> {
    all().iter().filter(|m| filter.matches(m)).collect()
}

/// The five adequacy columns of an entry.
pub fn adequacy_profile(meta: &MethodMetadata) -> AdequacyFlags {
    meta.adequacy
}

/// The two sensitivity columns, with the not-applicable rule enforced:
/// fixed credits are a property of fractionalized crediting only.
pub fn lint_sensitivity(meta: &MethodMetadata) -> Result<SensitivityFlags, RegistryError> {
    let na = meta.sensitivity.fixed_credits == Flag::NotApplicable;
    match meta.framework1_claim.fractionalized() {
        Some(true) if na => Err(RegistryError::Inconsistent {
            name: meta.name.clone(),
            message: "fixed_credits marked not-applicable on a fractionalized method".into(),
        }),
        Some(false) if !na => Err(RegistryError::Inconsistent {
            name: meta.name.clone(),
            message: "fixed_credits declared on a non-fractionalized method".into(),
        }),
        _ => Ok(meta.sensitivity),
    }
}

/// The three homogeneity columns. For implemented methods the declarations
/// are cross-checked against the bound score function: selectable
/// parameters, required attributes, and piecewise credit rules must match
/// the declared flags.
pub fn lint_homogeneity(meta: &MethodMetadata) -> Result<HomogeneityFlags, RegistryError> {
    if let Some(f) = bind(&meta.name) {
        let spec = f.spec();
        let checks = [
            (
                "parameters_selected",
                meta.homogeneity.parameters_selected,
                !spec.selectable_parameters.is_empty(),
            ),
            (
                "external_elements",
                meta.homogeneity.external_elements,
                !spec.requires_attributes.is_empty(),
            ),
            (
                "conditional_equations",
                meta.homogeneity.conditional_equations,
                spec.piecewise,
            ),
        ];
        for (column, declared, implemented) in checks {
            if declared != implemented {
                return Err(RegistryError::Inconsistent {
                    name: meta.name.clone(),
                    message: format!(
                        "{column} declared {} but the implementation says {}",
                        if declared { "Y" } else { "N" },
                        if implemented { "Y" } else { "N" }
                    ),
                });
            }
        }
    }
    Ok(meta.homogeneity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_thirty_six_entries() {
        assert_eq!(all().len(), 36);
        let reviewed: Vec<_> = all().iter().filter(|m| m.reviewed()).collect();
        assert_eq!(reviewed.len(), 32);
        for m in &reviewed {
            let year = m.introduced.unwrap();
            assert!((1981..=2018).contains(&year), "{}: {}", m.name, year);
            assert!(m.framework2_group.is_some(), "{}", m.name);
        }
        for m in all().iter().filter(|m| !m.reviewed()) {
            assert!(m.framework2_group.is_none(), "{}", m.name);
        }
    }

    #[test]
    fn claim_counts_match_the_review() {
        let count = |claim: Framework1Claim| {
            all()
                .iter()
                .filter(|m| m.reviewed() && m.framework1_claim == claim)
                .count()
        };
        assert_eq!(count(Framework1Claim::RankDependentFractionalized), 21);
        assert_eq!(count(Framework1Claim::RankDependentNonFractionalized), 6);
        assert_eq!(count(Framework1Claim::RankIndependentNonFractionalized), 3);
        assert_eq!(count(Framework1Claim::RankIndependentFractionalized), 0);
        assert_eq!(count(Framework1Claim::NonConforming), 2);
    }

    #[test]
    fn twenty_eight_reviewed_methods_argue_from_group_one() {
        let filter = RegistryFilter::parse(["group=group1", "reviewed=yes"]).unwrap();
        assert_eq!(list(&filter).len(), 28);
    }

    #[test]
    fn exactly_three_methods_see_frequent_evaluation_use() {
        let frequent: Vec<_> = all()
            .iter()
            .filter(|m| m.frequent_evaluation_use)
            .map(|m| m.name.as_str())
            .collect();
        assert_eq!(
            frequent,
            ["harmonic", "howard", "sequence-determines-credit"]
        );
    }

    #[test]
    fn implemented_entries_build_and_stubs_do_not() {
        let mut implemented = 0;
        for meta in all() {
            match meta.status {
                MethodStatus::Implemented => {
                    implemented += 1;
                    let f = build(&meta.name).unwrap();
                    assert_eq!(f.spec().name, meta.name);
                }
                MethodStatus::Stub => {
                    assert!(matches!(
                        build(&meta.name),
                        Err(RegistryError::NotImplemented { .. })
                    ));
                }
            }
        }
        assert_eq!(implemented, 20);
    }

    #[test]
    fn unknown_method_is_reported() {
        assert!(matches!(
            build("nonsense"),
            Err(RegistryError::UnknownMethod { .. })
        ));
        assert!(matches!(
            get("nonsense"),
            Err(RegistryError::UnknownMethod { .. })
        ));
    }

    #[test]
    fn sensitivity_lint_holds_registry_wide() {
        for meta in all() {
            let flags = lint_sensitivity(meta).unwrap_or_else(|e| panic!("{e}"));
            if let Some(fractionalized) = meta.framework1_claim.fractionalized() {
                assert_eq!(
                    flags.fixed_credits == Flag::NotApplicable,
                    !fractionalized,
                    "{}",
                    meta.name
                );
            }
        }
    }

    #[test]
    fn sensitivity_lint_rejects_misdeclared_fixed_credits() {
        let mut meta = get("complete-fractionalized").unwrap().clone();
        meta.sensitivity.fixed_credits = Flag::NotApplicable;
        assert!(matches!(
            lint_sensitivity(&meta),
            Err(RegistryError::Inconsistent { .. })
        ));
        let mut meta = get("equal-contribution").unwrap().clone();
        meta.sensitivity.fixed_credits = Flag::Yes;
        assert!(matches!(
            lint_sensitivity(&meta),
            Err(RegistryError::Inconsistent { .. })
        ));
    }

    #[test]
    fn homogeneity_lint_cross_checks_all_implemented_methods() {
        for meta in all() {
            lint_homogeneity(meta).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn homogeneity_lint_rejects_a_wrong_declaration() {
        let mut meta = get("boxenbaum").unwrap().clone();
        meta.homogeneity.external_elements = false;
        assert!(matches!(
            lint_homogeneity(&meta),
            Err(RegistryError::Inconsistent { .. })
        ));
    }

    #[test]
    fn adequacy_profiles_match_known_rows() {
        let harmonic = adequacy_profile(get("harmonic").unwrap());
        assert!(harmonic.principles);
        assert!(
            !(harmonic.compare_to_others
                || harmonic.quantitative_models
                || harmonic.surveys
                || harmonic.compare_groups)
        );

        let npi = adequacy_profile(get("npi-institutional").unwrap());
        assert!(npi.compare_to_others && npi.quantitative_models && npi.compare_groups);
        assert!(!npi.principles && !npi.surveys);

        let howard = adequacy_profile(get("howard").unwrap());
        assert!(howard.compare_to_others && howard.compare_groups);
        assert!(!howard.principles && !howard.quantitative_models && !howard.surveys);
    }

    #[test]
    fn filters_narrow_the_catalog() {
        let implemented = RegistryFilter::parse(["status=implemented"]).unwrap();
        assert_eq!(list(&implemented).len(), 20);

        let claim =
            RegistryFilter::parse(["claim=rank-dependent fractionalized", "reviewed=yes"]).unwrap();
        assert_eq!(list(&claim).len(), 21);

        let frequent = RegistryFilter::parse(["frequent=yes"]).unwrap();
        assert_eq!(list(&frequent).len(), 3);

        assert!(matches!(
            RegistryFilter::parse(["flavor=sweet"]),
            Err(RegistryError::Filter(_))
        ));
        assert!(matches!(
            RegistryFilter::parse(["status"]),
            Err(RegistryError::Filter(_))
        ));
    }

    #[test]
    fn observation_mapping_covers_all_categories() {
        use Framework1Claim::*;
        use RankVerdict::*;
        assert_eq!(
            Framework1Claim::from_observation(Dependent, false, true),
            RankDependentFractionalized
        );
        assert_eq!(
            Framework1Claim::from_observation(Independent, true, false),
            RankDependentNonFractionalized
        );
        assert_eq!(
            Framework1Claim::from_observation(Independent, false, true),
            RankIndependentFractionalized
        );
        assert_eq!(
            Framework1Claim::from_observation(Independent, false, false),
            RankIndependentNonFractionalized
        );
        assert_eq!(
            Framework1Claim::from_observation(NotApplicable, true, true),
            NonConforming
        );
    }

    #[test]
    fn groups_render_and_parse_round_trip() {
        for meta in all() {
            if let Some(group) = &meta.framework2_group {
                let text = group.to_string();
                assert_eq!(
                    Framework2Group::parse(&text).as_ref(),
                    Some(group),
                    "{text}"
                );
            }
        }
        assert!(Framework2Group::parse("group5:whatever").is_none());
        assert!(Framework2Group::parse("group1:sorcery").is_none());
    }
}
