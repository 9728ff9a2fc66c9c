//! Counting methods and object-of-study score tables.
//!
//! A counting method is the full triplet: basic unit of analysis, object of
//! study, and score function. This module assembles the triplet, collects
//! per-unit credits into per-object scores over a corpus, merges objects into
//! unions, and rescores a method through a lower aggregation level — the
//! machinery behind the defined-for-all-objects and additivity probes in
//! [`crate::classify`].
//!
//! Scoring is a pure fold over publications. Per-object totals are reduced
//! with pairwise summation so results are bitwise-stable regardless of how
//! callers might batch the publications.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::corpus::{AttributionMap, CorpusError, EntityLevel, Publication, UnitInstance};
use crate::scorefn::{ScoreError, ScoreFunction, ScoreFunctionSpec};

/// Failure modes of score collection and rescoring.
#[derive(Debug, Error)]
pub enum AggregateError {
    /// The object level must not sit below the basic level.
    #[error("invalid counting method: object level {object} sits below basic level {basic}")]
    InvalidLevels {
        basic: EntityLevel,
        object: EntityLevel,
    },
    /// The attribution map was derived for different levels than the method's.
    #[error(
        "attribution covers {got_basic}->{got_object}, method needs {want_basic}->{want_object}"
    )]
    LevelMismatch {
        want_basic: EntityLevel,
        want_object: EntityLevel,
        got_basic: EntityLevel,
        got_object: EntityLevel,
    },
    /// Rescoring must go through a level at or below the method's basic level.
    #[error("rescore level {lower} is above the method's basic level {basic}")]
    RescoreLevel {
        lower: EntityLevel,
        basic: EntityLevel,
    },
    /// Rescoring found an entity that maps to more than one parent object, so
    /// there is no one-to-one relation between the levels.
    #[error("no one-to-one relation: {entity} maps to both {first} and {second}")]
    NotOneToOne {
        entity: String,
        first: String,
        second: String,
    },
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Sums with pairwise reduction for bitwise-stable, low-error totals.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// The counting-method triplet: score function plus the two levels.
#[derive(Clone)]
pub struct CountingMethod {
    score_function: Arc<dyn ScoreFunction>,
    basic_level: EntityLevel,
    object_level: EntityLevel,
}

impl CountingMethod {
    pub fn new(
        score_function: Arc<dyn ScoreFunction>,
        basic_level: EntityLevel,
        object_level: EntityLevel,
    ) -> Result<Self, AggregateError> {
        if object_level < basic_level {
            return Err(AggregateError::InvalidLevels {
                basic: basic_level,
                object: object_level,
            });
        }
        Ok(Self {
            score_function,
            basic_level,
            object_level,
        })
    }

    pub fn score_function(&self) -> &Arc<dyn ScoreFunction> {
        &self.score_function
    }

    /// The score function's static description.
    pub fn spec(&self) -> &ScoreFunctionSpec {
        self.score_function.spec()
    }

    pub fn basic_level(&self) -> EntityLevel {
        self.basic_level
    }

    pub fn object_level(&self) -> EntityLevel {
        self.object_level
    }
}

impl fmt::Debug for CountingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountingMethod")
            .field("score_function", &self.spec().name)
            .field("basic_level", &self.basic_level)
            .field("object_level", &self.object_level)
            .finish()
    }
}

/// One object's collected score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub object: String,
    pub score: f64,
    /// Number of publications that contributed nonzero credit.
    pub publications: usize,
}

/// Per-object totals of one counting method over one corpus.
///
/// Objects that never collect nonzero credit are omitted, keeping tables
/// sparse on large corpora.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    method: CountingMethod,
    rows: BTreeMap<String, (f64, usize)>,
}

impl ScoreTable {
    pub fn method(&self) -> &CountingMethod {
        &self.method
    }

    pub fn score_of(&self, object: &str) -> Option<f64> {
        self.rows.get(object).map(|(s, _)| *s)
    }

    pub fn publications_of(&self, object: &str) -> Option<usize> {
        self.rows.get(object).map(|(_, p)| *p)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Grand total over all objects.
    pub fn total(&self) -> f64 {
        let scores: Vec<f64> = self.rows.values().map(|(s, _)| *s).collect();
        pairwise_sum(&scores)
    }

    /// Rows sorted by descending score, ties broken by object identifier.
    pub fn sorted_rows(&self) -> Vec<ScoreRow> {
        let mut rows: Vec<ScoreRow> = self
            .rows
            .iter()
            .map(|(object, (score, publications))| ScoreRow {
                object: object.clone(),
                score: *score,
                publications: *publications,
            })
            .collect();
        rows.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("scores are finite")
                .then_with(|| a.object.cmp(&b.object))
        });
        rows
    }

    /// Renders `object,score,publications` CSV in [`Self::sorted_rows`] order.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["object", "score", "publications"])
            .expect("in-memory write");
        for row in self.sorted_rows() {
            w.write_record([
                row.object.as_str(),
                &row.score.to_string(),
                &row.publications.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// Shared scoring fold. For every publication: derive units at `basic_level`,
/// score them with `scoring_objects` as the object assignment, then collect
/// each unit's credit under `collect_object`.
fn accumulate<FA, FC>(
    method: &CountingMethod,
    pubs: &[Publication],
    basic_level: EntityLevel,
    mut scoring_objects: FA,
    mut collect_object: FC,
) -> Result<ScoreTable, AggregateError>
where
    FA: FnMut(&Publication, &[UnitInstance]) -> Result<Vec<String>, AggregateError>,
    FC: FnMut(&UnitInstance, &str) -> Result<String, AggregateError>,
{
    let mut buffers: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in pubs {
        let units = p.units_at(basic_level);
        let objects = scoring_objects(p, &units)?;
        let credits = method
            .score_function()
            .credit_units(p.id(), &units, Some(&objects))?;
        let mut seen_this_pub: BTreeSet<String> = BTreeSet::new();
        for ((unit, object), credit) in units.iter().zip(&objects).zip(credits) {
            if credit > 0.0 {
                let target = collect_object(unit, object)?;
                buffers.entry(target.clone()).or_default().push(credit);
                seen_this_pub.insert(target);
            }
        }
        for object in seen_this_pub {
            *counts.entry(object).or_insert(0) += 1;
        }
    }
    let rows = buffers
        .into_iter()
        .map(|(object, credits)| {
            let count = counts[&object];
            (object.clone(), (pairwise_sum(&credits), count))
        })
        .collect();
    Ok(ScoreTable {
        method: method.clone(),
        rows,
    })
}

/// Collects per-object scores of `method` over the corpus.
///
/// The attribution map must have been derived at the method's levels; every
/// object of study collects the credits of the basic units assigned to it.
pub fn object_scores(
    method: &CountingMethod,
    pubs: &[Publication],
    attr: &AttributionMap,
) -> Result<ScoreTable, AggregateError> {
    if attr.basic_level() != method.basic_level() || attr.object_level() != method.object_level() {
        return Err(AggregateError::LevelMismatch {
            want_basic: method.basic_level(),
            want_object: method.object_level(),
            got_basic: attr.basic_level(),
            got_object: attr.object_level(),
        });
    }
    accumulate(
        method,
        pubs,
        method.basic_level(),
        |p, _| Ok(attr.assign(p)?),
        |_, object| Ok(object.to_string()),
    )
}

/// Returns a new attribution map with `members` merged into the union
/// `union_id`; all other objects are untouched.
pub fn merge_objects(
    attr: &AttributionMap,
    union_id: &str,
    members: &BTreeSet<String>,
) -> Result<AttributionMap, AggregateError> {
    Ok(attr.with_extra_union(union_id, members)?)
}

/// Rescores the method with basic units taken at `lower_basic` and the
/// resulting per-entity scores rolled up to the method's object level.
///
/// This is the additivity probe: for an additive method the table equals
/// [`object_scores`] at the method's own levels. The roll-up requires a
/// one-to-one relation — every lower-level entity must resolve to exactly one
/// object across the whole corpus.
pub fn rescore_at_level(
    method: &CountingMethod,
    pubs: &[Publication],
    lower_basic: EntityLevel,
) -> Result<ScoreTable, AggregateError> {
    if lower_basic > method.basic_level() {
        return Err(AggregateError::RescoreLevel {
            lower: lower_basic,
            basic: method.basic_level(),
        });
    }
    // The roll-up map entity -> object, with the one-to-one check. Authors
    // with several distinct institutions on one byline have no unique parent
    // even before looking across publications.
    let mut parents: BTreeMap<String, String> = BTreeMap::new();
    for p in pubs {
        if lower_basic == EntityLevel::Author && method.object_level() > EntityLevel::Author {
            for a in p.authorships() {
                let distinct: BTreeSet<&str> = a
                    .affiliations
                    .iter()
                    .map(|f| f.institution.as_str())
                    .collect();
                if distinct.len() > 1 {
                    let mut it = distinct.into_iter();
                    return Err(AggregateError::NotOneToOne {
                        entity: a.author.clone(),
                        first: it.next().expect("two elements").into(),
                        second: it.next().expect("two elements").into(),
                    });
                }
            }
        }
        for unit in p.units_at(lower_basic) {
            let entity = unit.entity_at(lower_basic)?.to_string();
            let parent = unit.entity_at(method.object_level())?.to_string();
            match parents.get(&entity) {
                None => {
                    parents.insert(entity, parent);
                }
                Some(existing) if *existing == parent => {}
                Some(existing) => {
                    return Err(AggregateError::NotOneToOne {
                        entity,
                        first: existing.clone(),
                        second: parent,
                    });
                }
            }
        }
    }
    accumulate(
        method,
        pubs,
        lower_basic,
        |_, units| {
            units
                .iter()
                .map(|u| Ok(u.entity_at(lower_basic)?.to_string()))
                .collect::<Result<Vec<_>, AggregateError>>()
        },
        |unit, _| Ok(parents[unit.entity_at(lower_basic)?].clone()),
    )
}
