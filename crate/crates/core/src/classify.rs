//! Empirical classification of score functions.
//!
//! Score functions arrive as opaque code, so their mathematical properties
//! are decided behaviorally: seeded trial publications probe each of the five
//! properties of the classification decision tree — defined for all objects,
//! fixed crediting scheme, additivity, rank dependence, and
//! fractionalization — and the resulting property vector is mapped to one of
//! the five classic labels or left unclassified.
//!
//! Negative verdicts are sound: every "no" carries a concrete witness
//! publication (or corpus) that reproduces the violation standalone, see
//! [`verify_witness`]. Positive verdicts are statistical, bounded by the
//! trial count, which the report records along with the seed.
//!
//! Functions whose credits never leave 1 split equally between equal ranks
//! can still share credit unevenly through attribute weights; the report
//! tracks that as `uneven_sharing` so callers can compare observed behavior
//! with published claims that treat weighted schemes like rank-dependent
//! ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aggregate::{object_scores, rescore_at_level, AggregateError, CountingMethod};
use crate::corpus::{
    sub_seed, Affiliation, AttrValue, AttributeMap, Authorship, CorpusError, EntityLevel,
    Publication, ATTR_CONTRIBUTION, ATTR_INDICATOR, ATTR_PI, ATTR_SENIOR,
};
use crate::scorefn::{ScoreError, ScoreFunction};

/// Numerical tolerance of all property checks.
pub const TOLERANCE: f64 = 1e-9;

/// Failure modes of classification.
#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("invalid classification setup: {0}")]
    Config(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Rank verdict: does byline order influence the credits?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankVerdict {
    Independent,
    Dependent,
    /// Assigned when the crediting scheme is not fixed, so the question
    /// cannot be posed independently of the objects of study.
    NotApplicable,
}

impl fmt::Display for RankVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Independent => "independent",
            Self::Dependent => "dependent",
            Self::NotApplicable => "not applicable",
        })
    }
}

/// The five empirically tested properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropertyVector {
    pub defined_for_all_objects: bool,
    pub fixed_crediting_scheme: bool,
    pub additive: bool,
    pub rank: RankVerdict,
    pub fractionalized: bool,
}

/// The classic labels of the classification decision tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicLabel {
    Complete,
    CompleteFractionalized,
    Straight,
    Whole,
    WholeFractionalized,
    Unclassified,
}

impl fmt::Display for ClassicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Complete => "Complete",
            Self::CompleteFractionalized => "Complete-fractionalized",
            Self::Straight => "Straight",
            Self::Whole => "Whole",
            Self::WholeFractionalized => "Whole-fractionalized",
            Self::Unclassified => "Unclassified",
        })
    }
}

/// Which property a witness refutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    DefinedForAllObjects,
    FixedCreditingScheme,
    Additive,
    Rank,
    Fractionalized,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DefinedForAllObjects => "defined for all objects",
            Self::FixedCreditingScheme => "fixed crediting scheme",
            Self::Additive => "additive",
            Self::Rank => "rank",
            Self::Fractionalized => "fractionalized",
        })
    }
}

/// The violation a witness reproduces.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessDetail {
    /// Publication total differs from 1.
    Fractionalized { total: f64 },
    /// Permuting the byline moved one author's credit.
    Rank {
        author: String,
        before: f64,
        after: f64,
    },
    /// Per-unit credits change when objects switch from institutions to countries.
    FixedScheme {
        unit: usize,
        with_institutions: f64,
        with_countries: f64,
    },
    /// Direct object scores differ from rescoring through the lower level.
    Additive {
        object: String,
        direct: f64,
        rescored: f64,
    },
    /// Merging a union moved the score of an object outside it.
    DefinedForAll {
        union_members: BTreeSet<String>,
        object: String,
        before: f64,
        after: f64,
    },
}

/// A counterexample: the publications plus the measured violation.
///
/// For [`WitnessDetail::Rank`] the two publications are the original and the
/// permuted byline; for [`WitnessDetail::Additive`] they form the trial
/// corpus; otherwise a single publication suffices.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub property: Property,
    pub publications: Vec<Publication>,
    pub detail: WitnessDetail,
}

impl Witness {
    /// One-line human description of the violation.
    pub fn summary(&self) -> String {
        let id = self
            .publications
            .first()
            .map(Publication::id)
            .unwrap_or("?");
        match &self.detail {
            WitnessDetail::Fractionalized { total } => {
                format!("publication {id} has credit total {total}, not 1")
            }
            WitnessDetail::Rank { author, before, after } => format!(
                "permuting the byline of {id} moves {author} from {before} to {after}"
            ),
            WitnessDetail::FixedScheme { unit, with_institutions, with_countries } => format!(
                "unit {unit} of {id} is credited {with_institutions} with institution objects but {with_countries} with country objects"
            ),
            WitnessDetail::Additive { object, direct, rescored } => format!(
                "object {object} scores {direct} directly but {rescored} through the lower level"
            ),
            WitnessDetail::DefinedForAll { union_members, object, before, after } => format!(
                "merging {union_members:?} moves non-member {object} from {before} to {after}"
            ),
        }
    }
}

/// Outcome of a yes/no property test.
#[derive(Debug, Clone, PartialEq)]
pub enum TestOutcome {
    Holds,
    Violated(Witness),
}

impl TestOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Self::Holds => None,
            Self::Violated(w) => Some(w),
        }
    }
}

/// Outcome of the rank test.
#[derive(Debug, Clone, PartialEq)]
pub enum RankOutcome {
    Independent,
    Dependent(Witness),
}

/// Classification configuration.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 42,
            tolerance: TOLERANCE,
        }
    }
}

/// The full classification result.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// Name of the classified score function.
    pub method: String,
    pub properties: PropertyVector,
    pub label: ClassicLabel,
    pub trials: usize,
    pub seed: u64,
    /// Some publication credited units of equal rank unequally (weighted
    /// schemes do this without being rank-dependent under permutation).
    pub uneven_sharing: bool,
    /// One witness per negative or dependent verdict.
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method: {}", self.method)?;
        writeln!(f, "label: {}", self.label)?;
        writeln!(f, "properties:")?;
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        writeln!(
            f,
            "  defined for all objects: {}",
            yes_no(self.properties.defined_for_all_objects)
        )?;
        writeln!(
            f,
            "  based on a fixed crediting scheme: {}",
            yes_no(self.properties.fixed_crediting_scheme)
        )?;
        writeln!(f, "  additive: {}", yes_no(self.properties.additive))?;
        writeln!(f, "  rank: {}", self.properties.rank)?;
        writeln!(
            f,
            "  fractionalized: {}",
            yes_no(self.properties.fractionalized)
        )?;
        writeln!(f, "trials: {} (seed {})", self.trials, self.seed)?;
        writeln!(
            f,
            "uneven sharing observed: {}",
            yes_no(self.uneven_sharing)
        )?;
        if !self.witnesses.is_empty() {
            writeln!(f, "witnesses:")?;
            for w in &self.witnesses {
                writeln!(f, "  - {}: {}", w.property, w.summary())?;
            }
        }
        if !self.notes.is_empty() {
            writeln!(f, "notes:")?;
            for n in &self.notes {
                writeln!(f, "  - {n}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Trial generation
//
// Trials draw from a fixed pool of 10 institutions spread over 5 countries
// (institution i{j} sits in country c{j mod 5}), which guarantees a
// one-to-one institution-to-country relation in every trial corpus. The
// byline walks the pool with a per-trial stride: stride 1 spreads authors
// over distinct countries (union material), stride 5 puts two institutions
// in one country (the fixed-scheme and additivity probes), stride 3 mixes.
// Byline sizes cycle through 1..=50 (capped by the function's unit limit) so
// size-sensitive behavior like credit floors is always exercised.
// ---------------------------------------------------------------------------

const INSTITUTION_POOL: usize = 10;
const COUNTRY_POOL: usize = 5;
const STRIDES: [usize; 4] = [1, 5, 1, 3];

const TAG_FRACTIONALIZED: u64 = 1;
const TAG_RANK: u64 = 2;
const TAG_FIXED: u64 = 3;
const TAG_ADDITIVE: u64 = 4;
const TAG_DEFINED: u64 = 5;
const TAG_PATTERN: u64 = 6;

fn trial_rng(seed: u64, tag: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, (tag << 32) ^ trial as u64))
}

fn pool_affiliation(index: usize) -> Affiliation {
    let j = index % INSTITUTION_POOL;
    Affiliation::new(format!("i{j}"), format!("c{}", j % COUNTRY_POOL))
}

fn size_window(f: &Arc<dyn ScoreFunction>) -> usize {
    f.spec().max_units.unwrap_or(50).clamp(1, 50)
}

/// One synthetic publication. Attributes are always attached so that
/// attribute-reading functions stay total: the rank-1 author is always a
/// principal investigator and indicators are at least 1.
fn trial_publication(rng: &mut ChaCha8Rng, id: String, n: usize, stride: usize) -> Publication {
    let start = rng.random_range(0..INSTITUTION_POOL);
    let draws: Vec<f64> = (0..n)
        .map(|_| 1e-3 - (1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = draws.iter().sum();
    let authorships = (0..n)
        .map(|k| {
            let mut attrs = AttributeMap::new();
            attrs.insert(
                ATTR_SENIOR.into(),
                AttrValue::Flag(rng.random::<f64>() < 0.3),
            );
            attrs.insert(
                ATTR_PI.into(),
                AttrValue::Flag(k == 0 || rng.random::<f64>() < 0.35),
            );
            let u = rng.random::<f64>();
            attrs.insert(
                ATTR_INDICATOR.into(),
                AttrValue::Number(1.0 + (99.0 * u * u).floor()),
            );
            attrs.insert(
                ATTR_CONTRIBUTION.into(),
                AttrValue::Number(draws[k] / total),
            );
            Authorship::new(
                format!("author{k}"),
                k as u32 + 1,
                vec![pool_affiliation(start + k * stride)],
            )
            .with_attributes(attrs)
        })
        .collect();
    Publication::new(id, 2020, authorships).expect("trial publications are valid")
}

fn single_trial(seed: u64, tag: u64, trial: usize, window: usize) -> Publication {
    let mut rng = trial_rng(seed, tag, trial);
    let n = trial % window + 1;
    trial_publication(
        &mut rng,
        format!("t{trial}"),
        n,
        STRIDES[trial % STRIDES.len()],
    )
}

/// A small corpus for the additivity probe; publication 1 always has at
/// least two authors and stride 5, planting two same-country institutions.
fn trial_corpus(seed: u64, trial: usize, window: usize) -> Vec<Publication> {
    let mut rng = trial_rng(seed, TAG_ADDITIVE, trial);
    let strides = [1, 5, 3];
    (0..3)
        .map(|j| {
            let n = match j {
                1 => 2 + (trial % window.saturating_sub(1).max(1)),
                _ => 1 + (trial + 3 * j) % window,
            }
            .min(window.clamp(2, 50));
            trial_publication(&mut rng, format!("t{trial}-{j}"), n.max(1), strides[j])
        })
        .collect()
}

/// Units, their objects of study, and their credits, in byline order.
type ScoredUnits = (Vec<crate::corpus::UnitInstance>, Vec<String>, Vec<f64>);

/// Author-level credits with the unit's own entity at `object_level` as its
/// object of study (optionally rerouted through `substitute`).
fn unit_credits(
    f: &Arc<dyn ScoreFunction>,
    publication: &Publication,
    object_level: EntityLevel,
    substitute: Option<&BTreeMap<String, String>>,
) -> Result<ScoredUnits, ClassifyError> {
    let units = publication.units_at(EntityLevel::Author);
    let objects: Vec<String> = units
        .iter()
        .map(|u| {
            let raw = u
                .entity_at(object_level)
                .expect("author units carry identities");
            match substitute.and_then(|s| s.get(raw)) {
                Some(union) => union.clone(),
                None => raw.to_string(),
            }
        })
        .collect();
    let credits = f.credit_units(publication.id(), &units, Some(&objects))?;
    Ok((units, objects, credits))
}

fn group_totals(objects: &[String], credits: &[f64]) -> BTreeMap<String, f64> {
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for (o, c) in objects.iter().zip(credits) {
        *totals.entry(o.clone()).or_insert(0.0) += c;
    }
    totals
}

// ---------------------------------------------------------------------------
// The five property tests
// ---------------------------------------------------------------------------

fn fractionalized_impl(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<TestOutcome, ClassifyError> {
    let window = size_window(f);
    for trial in 0..trials {
        let p = single_trial(seed, TAG_FRACTIONALIZED, trial, window);
        let (_, _, credits) = unit_credits(f, &p, EntityLevel::Institution, None)?;
        let total: f64 = credits.iter().sum();
        if (total - 1.0).abs() > tolerance {
            return Ok(TestOutcome::Violated(Witness {
                property: Property::Fractionalized,
                publications: vec![p],
                detail: WitnessDetail::Fractionalized { total },
            }));
        }
    }
    Ok(TestOutcome::Holds)
}

/// Tests whether the basic units always share a total credit of 1.
pub fn test_fractionalized(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
) -> Result<TestOutcome, ClassifyError> {
    require_trials(trials)?;
    fractionalized_impl(f, trials, seed, TOLERANCE)
}

fn permuted_byline(publication: &Publication, rng: &mut ChaCha8Rng) -> Publication {
    let n = publication.byline_size();
    let mut ranks: Vec<u32> = (1..=n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        ranks.swap(i, j);
    }
    if ranks.iter().enumerate().all(|(i, &r)| r == i as u32 + 1) {
        ranks.swap(0, 1);
    }
    let authorships = publication
        .authorships()
        .iter()
        .zip(&ranks)
        .map(|(a, &rank)| {
            Authorship::new(a.author.clone(), rank, a.affiliations.clone())
                .with_attributes(a.attributes.clone())
        })
        .collect();
    Publication::new(publication.id(), publication.year(), authorships)
        .expect("a permutation of a valid byline is valid")
}

fn rank_impl(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<RankOutcome, ClassifyError> {
    let window = size_window(f);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, TAG_RANK, trial);
        let n = trial % window + 1;
        if n < 2 {
            continue;
        }
        let p = trial_publication(
            &mut rng,
            format!("t{trial}"),
            n,
            STRIDES[trial % STRIDES.len()],
        );
        let permuted = permuted_byline(&p, &mut rng);
        let (units, _, before) = unit_credits(f, &p, EntityLevel::Institution, None)?;
        let (permuted_units, _, after) =
            unit_credits(f, &permuted, EntityLevel::Institution, None)?;
        let before: BTreeMap<&str, f64> = units
            .iter()
            .map(|u| u.author.as_deref().expect("author units"))
            .zip(before)
            .collect();
        for (unit, credit) in permuted_units.iter().zip(after) {
            let author = unit.author.as_deref().expect("author units");
            let earlier = before[author];
            if (credit - earlier).abs() > tolerance {
                return Ok(RankOutcome::Dependent(Witness {
                    property: Property::Rank,
                    publications: vec![p, permuted],
                    detail: WitnessDetail::Rank {
                        author: author.to_string(),
                        before: earlier,
                        after: credit,
                    },
                }));
            }
        }
    }
    Ok(RankOutcome::Independent)
}

/// Tests whether any byline permutation changes any author's credit.
pub fn test_rank(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
) -> Result<RankOutcome, ClassifyError> {
    require_trials(trials)?;
    rank_impl(f, trials, seed, TOLERANCE)
}

fn fixed_scheme_impl(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<TestOutcome, ClassifyError> {
    let window = size_window(f);
    for trial in 0..trials {
        let p = single_trial(seed, TAG_FIXED, trial, window);
        let (_, _, with_institutions) = unit_credits(f, &p, EntityLevel::Institution, None)?;
        let (_, _, with_countries) = unit_credits(f, &p, EntityLevel::Country, None)?;
        for (unit, (a, b)) in with_institutions.iter().zip(&with_countries).enumerate() {
            if (a - b).abs() > tolerance {
                return Ok(TestOutcome::Violated(Witness {
                    property: Property::FixedCreditingScheme,
                    publications: vec![p],
                    detail: WitnessDetail::FixedScheme {
                        unit,
                        with_institutions: *a,
                        with_countries: *b,
                    },
                }));
            }
        }
    }
    Ok(TestOutcome::Holds)
}

/// Tests whether per-unit credits survive switching the objects of study
/// between institutions and countries.
pub fn test_fixed_scheme(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
) -> Result<TestOutcome, ClassifyError> {
    require_trials(trials)?;
    fixed_scheme_impl(f, trials, seed, TOLERANCE)
}

fn additive_impl(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<TestOutcome, ClassifyError> {
    let window = size_window(f);
    let method = CountingMethod::new(Arc::clone(f), EntityLevel::Country, EntityLevel::Country)?;
    for trial in 0..trials {
        let corpus = trial_corpus(seed, trial, window);
        let attr = crate::corpus::AttributionMap::derive(
            &corpus,
            EntityLevel::Country,
            EntityLevel::Country,
            BTreeMap::new(),
        )?;
        let direct = object_scores(&method, &corpus, &attr)?;
        let rescored = rescore_at_level(&method, &corpus, EntityLevel::Institution)?;
        let mut objects: BTreeSet<String> = BTreeSet::new();
        objects.extend(direct.sorted_rows().into_iter().map(|r| r.object));
        objects.extend(rescored.sorted_rows().into_iter().map(|r| r.object));
        for object in objects {
            let d = direct.score_of(&object).unwrap_or(0.0);
            let r = rescored.score_of(&object).unwrap_or(0.0);
            if (d - r).abs() > tolerance {
                return Ok(TestOutcome::Violated(Witness {
                    property: Property::Additive,
                    publications: corpus,
                    detail: WitnessDetail::Additive {
                        object,
                        direct: d,
                        rescored: r,
                    },
                }));
            }
        }
    }
    Ok(TestOutcome::Holds)
}

/// Tests whether object scores survive rescoring through a lower level.
pub fn test_additive(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
) -> Result<TestOutcome, ClassifyError> {
    require_trials(trials)?;
    additive_impl(f, trials, seed, TOLERANCE)
}

fn defined_for_all_impl(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<TestOutcome, ClassifyError> {
    let window = size_window(f);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, TAG_DEFINED, trial);
        let n = trial % window + 1;
        let p = trial_publication(
            &mut rng,
            format!("t{trial}"),
            n,
            STRIDES[trial % STRIDES.len()],
        );
        let countries: Vec<String> = p.countries().into_iter().map(|c| c.to_string()).collect();
        if countries.len() < 3 {
            continue;
        }
        // Merge two of the publication's countries, keeping at least one out.
        let mut members: BTreeSet<String> = BTreeSet::new();
        let first = rng.random_range(0..countries.len());
        members.insert(countries[first].clone());
        let second = loop {
            let c = rng.random_range(0..countries.len());
            if c != first {
                break c;
            }
        };
        members.insert(countries[second].clone());
        let substitute: BTreeMap<String, String> = members
            .iter()
            .map(|m| (m.clone(), format!("u{trial}")))
            .collect();

        let (_, objects_before, before) = unit_credits(f, &p, EntityLevel::Country, None)?;
        let (_, objects_after, after) =
            unit_credits(f, &p, EntityLevel::Country, Some(&substitute))?;
        let totals_before = group_totals(&objects_before, &before);
        let totals_after = group_totals(&objects_after, &after);
        for (object, score) in &totals_before {
            if members.contains(object) {
                continue;
            }
            let later = totals_after.get(object).copied().unwrap_or(0.0);
            if (score - later).abs() > tolerance {
                return Ok(TestOutcome::Violated(Witness {
                    property: Property::DefinedForAllObjects,
                    publications: vec![p],
                    detail: WitnessDetail::DefinedForAll {
                        union_members: members,
                        object: object.clone(),
                        before: *score,
                        after: later,
                    },
                }));
            }
        }
    }
    Ok(TestOutcome::Holds)
}

/// Tests whether merging objects into a union leaves every non-member's
/// score unchanged.
pub fn test_defined_for_all(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
) -> Result<TestOutcome, ClassifyError> {
    require_trials(trials)?;
    defined_for_all_impl(f, trials, seed, TOLERANCE)
}

fn require_trials(trials: usize) -> Result<(), ClassifyError> {
    if trials == 0 {
        return Err(ClassifyError::Config(
            "at least one trial is required".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Label patterns and the classifier
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct PatternScan {
    complete: bool,
    complete_fractionalized: bool,
    straight: bool,
    whole: bool,
    whole_fractionalized: bool,
    uneven_sharing: bool,
}

fn pattern_scan(
    f: &Arc<dyn ScoreFunction>,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<PatternScan, ClassifyError> {
    let window = size_window(f);
    let mut scan = PatternScan {
        complete: true,
        complete_fractionalized: true,
        straight: true,
        whole: true,
        whole_fractionalized: true,
        uneven_sharing: false,
    };
    for trial in 0..trials {
        let p = single_trial(seed, TAG_PATTERN, trial, window);
        let (units, objects, credits) = unit_credits(f, &p, EntityLevel::Institution, None)?;
        let n = units.len() as f64;
        let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
        for o in &objects {
            *sizes.entry(o.as_str()).or_insert(0) += 1;
        }
        let m = sizes.len() as f64;
        for ((unit, object), credit) in units.iter().zip(&objects).zip(&credits) {
            let s = sizes[object.as_str()] as f64;
            scan.complete &= (credit - 1.0).abs() <= tolerance;
            scan.complete_fractionalized &= (credit - 1.0 / n).abs() <= tolerance;
            let expected_straight = if unit.rank == 1 { 1.0 } else { 0.0 };
            scan.straight &= (credit - expected_straight).abs() <= tolerance;
            scan.whole &= (credit - 1.0 / s).abs() <= tolerance;
            scan.whole_fractionalized &= (credit - 1.0 / (m * s)).abs() <= tolerance;
        }
        let max = credits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = credits.iter().cloned().fold(f64::INFINITY, f64::min);
        if max - min > tolerance {
            scan.uneven_sharing = true;
        }
    }
    Ok(scan)
}

fn label_for(properties: &PropertyVector, scan: &PatternScan) -> ClassicLabel {
    use RankVerdict::*;
    let v = (
        properties.defined_for_all_objects,
        properties.fixed_crediting_scheme,
        properties.additive,
        properties.rank,
        properties.fractionalized,
    );
    match v {
        (true, true, true, Independent, false) if scan.complete => ClassicLabel::Complete,
        (true, true, true, Independent, true) if scan.complete_fractionalized => {
            ClassicLabel::CompleteFractionalized
        }
        (true, true, true, Dependent, true) if scan.straight => ClassicLabel::Straight,
        (true, false, false, NotApplicable, false) if scan.whole => ClassicLabel::Whole,
        (false, false, false, NotApplicable, true) if scan.whole_fractionalized => {
            ClassicLabel::WholeFractionalized
        }
        _ => ClassicLabel::Unclassified,
    }
}

/// Runs the five property tests in decision-tree order, assigns the label,
/// and returns the full report. Deterministic for a fixed seed.
pub fn classify(
    f: &Arc<dyn ScoreFunction>,
    options: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    require_trials(options.trials)?;
    let ClassifyOptions {
        trials,
        seed,
        tolerance,
    } = *options;
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();

    let defined = defined_for_all_impl(f, trials, seed, tolerance)?;
    if let TestOutcome::Violated(w) = &defined {
        witnesses.push(w.clone());
    }
    let fixed = fixed_scheme_impl(f, trials, seed, tolerance)?;
    if let TestOutcome::Violated(w) = &fixed {
        witnesses.push(w.clone());
    }
    let additive = additive_impl(f, trials, seed, tolerance)?;
    if let TestOutcome::Violated(w) = &additive {
        witnesses.push(w.clone());
    }
    let rank = if fixed.holds() {
        match rank_impl(f, trials, seed, tolerance)? {
            RankOutcome::Independent => RankVerdict::Independent,
            RankOutcome::Dependent(w) => {
                witnesses.push(w);
                RankVerdict::Dependent
            }
        }
    } else {
        notes.push("rank verdict not applicable: the crediting scheme is not fixed".to_string());
        RankVerdict::NotApplicable
    };
    let fractionalized = fractionalized_impl(f, trials, seed, tolerance)?;
    if let TestOutcome::Violated(w) = &fractionalized {
        witnesses.push(w.clone());
    }

    let properties = PropertyVector {
        defined_for_all_objects: defined.holds(),
        fixed_crediting_scheme: fixed.holds(),
        additive: additive.holds(),
        rank,
        fractionalized: fractionalized.holds(),
    };
    debug_assert_eq!(
        properties.rank == RankVerdict::NotApplicable,
        !properties.fixed_crediting_scheme
    );

    let scan = pattern_scan(f, trials, seed, tolerance)?;
    if properties.rank == RankVerdict::Independent && scan.uneven_sharing {
        notes.push(
            "credits are rank-independent under permutation but shared unevenly \
             through unit attributes"
                .to_string(),
        );
    }
    if properties.rank == RankVerdict::Independent {
        notes.push(
            "rank-independence is reported as observed over the trial budget, \
             not assumed"
                .to_string(),
        );
    }

    Ok(ClassificationReport {
        method: f.spec().name.clone(),
        properties,
        label: label_for(&properties, &scan),
        trials,
        seed,
        uneven_sharing: scan.uneven_sharing,
        witnesses,
        notes,
    })
}

/// Re-evaluates a witness standalone: true when the recorded violation still
/// reproduces with the same score function.
pub fn verify_witness(
    f: &Arc<dyn ScoreFunction>,
    witness: &Witness,
) -> Result<bool, ClassifyError> {
    match &witness.detail {
        WitnessDetail::Fractionalized { total } => {
            let p = &witness.publications[0];
            let (_, _, credits) = unit_credits(f, p, EntityLevel::Institution, None)?;
            let now: f64 = credits.iter().sum();
            Ok((now - 1.0).abs() > TOLERANCE && (now - total).abs() <= TOLERANCE)
        }
        WitnessDetail::Rank {
            author,
            before,
            after,
        } => {
            let original = &witness.publications[0];
            let permuted = &witness.publications[1];
            let credit_of = |p: &Publication| -> Result<f64, ClassifyError> {
                let (units, _, credits) = unit_credits(f, p, EntityLevel::Institution, None)?;
                Ok(units
                    .iter()
                    .zip(credits)
                    .find(|(u, _)| u.author.as_deref() == Some(author))
                    .map(|(_, c)| c)
                    .unwrap_or(f64::NAN))
            };
            let b = credit_of(original)?;
            let a = credit_of(permuted)?;
            Ok((b - a).abs() > TOLERANCE
                && (b - before).abs() <= TOLERANCE
                && (a - after).abs() <= TOLERANCE)
        }
        WitnessDetail::FixedScheme {
            unit,
            with_institutions,
            with_countries,
        } => {
            let p = &witness.publications[0];
            let (_, _, inst) = unit_credits(f, p, EntityLevel::Institution, None)?;
            let (_, _, country) = unit_credits(f, p, EntityLevel::Country, None)?;
            let (a, b) = (inst[*unit], country[*unit]);
            Ok((a - b).abs() > TOLERANCE
                && (a - with_institutions).abs() <= TOLERANCE
                && (b - with_countries).abs() <= TOLERANCE)
        }
        WitnessDetail::Additive {
            object,
            direct,
            rescored,
        } => {
            let method =
                CountingMethod::new(Arc::clone(f), EntityLevel::Country, EntityLevel::Country)?;
            let attr = crate::corpus::AttributionMap::derive(
                &witness.publications,
                EntityLevel::Country,
                EntityLevel::Country,
                BTreeMap::new(),
            )?;
            let d = object_scores(&method, &witness.publications, &attr)?
                .score_of(object)
                .unwrap_or(0.0);
            let r = rescore_at_level(&method, &witness.publications, EntityLevel::Institution)?
                .score_of(object)
                .unwrap_or(0.0);
            Ok((d - r).abs() > TOLERANCE
                && (d - direct).abs() <= TOLERANCE
                && (r - rescored).abs() <= TOLERANCE)
        }
        WitnessDetail::DefinedForAll {
            union_members,
            object,
            before,
            after,
        } => {
            let p = &witness.publications[0];
            let substitute: BTreeMap<String, String> = union_members
                .iter()
                .map(|m| (m.clone(), "union".to_string()))
                .collect();
            let (_, objects_before, credits_before) =
                unit_credits(f, p, EntityLevel::Country, None)?;
            let (_, objects_after, credits_after) =
                unit_credits(f, p, EntityLevel::Country, Some(&substitute))?;
            let b = group_totals(&objects_before, &credits_before)
                .get(object)
                .copied()
                .unwrap_or(0.0);
            let a = group_totals(&objects_after, &credits_after)
                .get(object)
                .copied()
                .unwrap_or(0.0);
            Ok((b - a).abs() > TOLERANCE
                && (b - before).abs() <= TOLERANCE
                && (a - after).abs() <= TOLERANCE)
        }
    }
}
