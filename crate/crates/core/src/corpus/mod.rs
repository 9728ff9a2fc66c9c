//! Publications, bylines, addresses, and attribution between aggregation levels.
//!
//! The data model keeps the full byline structure: every authorship carries its
//! rank, at least one affiliation, and optional per-author attributes (seniority
//! and principal-investigator flags, indicator values, contribution weights).
//! Basic-unit instances are derived from that structure on demand:
//!
//! - at the author level, one unit per authorship, in rank order;
//! - above the author level, one unit per *address* — the publication's unique
//!   (institution, country) pairs in order of first appearance. Several
//!   addresses may share a country, and rank means position in the address
//!   list, so rank-weighted score functions stay meaningful at every level.

mod generate;
mod parse;

pub(crate) use generate::sub_seed;
pub use generate::{generate_corpus, CorpusSpec, TeamSize};
pub use parse::{parse_jsonl, publications_to_jsonl, read_publications, write_publications};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Attribute key for the seniority flag (boolean).
pub const ATTR_SENIOR: &str = "senior";
/// Attribute key for the principal-investigator flag (boolean).
pub const ATTR_PI: &str = "pi";
/// Attribute key for a per-author indicator value (non-negative number).
pub const ATTR_INDICATOR: &str = "indicator";
/// Attribute key for a per-author contribution weight (non-negative number).
pub const ATTR_CONTRIBUTION: &str = "contribution";

/// Errors from corpus construction, parsing, attribution, and synthesis.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("publication {id}: empty byline")]
    EmptyByline { id: String },
    #[error("publication {id}: author ranks must be a contiguous permutation of 1..{n}")]
    RankSequence { id: String, n: usize },
    #[error("publication {id}: mixed explicit and implicit author ranks")]
    MixedRanks { id: String },
    #[error("publication {id}: author {author} has no affiliation")]
    MissingAffiliation { id: String, author: String },
    #[error("publication {id}: {field} must be a finite, non-negative number")]
    BadNumber { id: String, field: String },
    #[error("duplicate publication id {id}")]
    DuplicateId { id: String },
    #[error("publication {id}: empty {field}")]
    EmptyField { id: String, field: String },
    #[error("unit above the author level has no author identity")]
    NoAuthorIdentity,
    #[error("object level {object} must not aggregate below basic level {basic}")]
    LevelOrder {
        basic: EntityLevel,
        object: EntityLevel,
    },
    #[error("union {union_id}: {message}")]
    Union { union_id: String, message: String },
    #[error("corpus config: {0}")]
    Config(String),
}

/// One address: an institution together with its country.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affiliation {
    pub institution: String,
    pub country: String,
}

impl Affiliation {
    pub fn new(institution: impl Into<String>, country: impl Into<String>) -> Self {
        Self {
            institution: institution.into(),
            country: country.into(),
        }
    }
}

/// A per-author attribute value: a flag or a finite non-negative number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttrValue {
    Flag(bool),
    Number(f64),
}

impl AttrValue {
    pub fn as_flag(&self) -> Option<bool> {
        match self {
            AttrValue::Flag(b) => Some(*b),
            AttrValue::Number(_) => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttrValue::Number(x) => Some(*x),
            AttrValue::Flag(_) => None,
        }
    }
}

/// Named per-author scalars; ordered map so iteration is deterministic.
pub type AttributeMap = BTreeMap<String, AttrValue>;

/// One byline entry: an author with rank, affiliations, and attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Authorship {
    pub author: String,
    /// 1-based byline position.
    pub rank: u32,
    /// At least one address; the first is the primary affiliation.
    pub affiliations: Vec<Affiliation>,
    pub attributes: AttributeMap,
}

impl Authorship {
    pub fn new(author: impl Into<String>, rank: u32, affiliations: Vec<Affiliation>) -> Self {
        Self {
            author: author.into(),
            rank,
            affiliations,
            attributes: AttributeMap::new(),
        }
    }

    pub fn with_attributes(mut self, attributes: AttributeMap) -> Self {
        self.attributes = attributes;
        self
    }

    /// The primary (first-listed) affiliation.
    pub fn primary_affiliation(&self) -> &Affiliation {
        &self.affiliations[0]
    }
}

/// A publication with a validated byline.
#[derive(Debug, Clone, PartialEq)]
pub struct Publication {
    id: String,
    year: i32,
    /// Sorted by rank; ranks are a contiguous 1..n permutation.
    authorships: Vec<Authorship>,
    citations: Option<u64>,
    level_points: Option<f64>,
}

impl Publication {
    /// Builds a publication, validating byline invariants: non-empty byline,
    /// contiguous ranks 1..n, at least one affiliation per author, finite
    /// non-negative numeric attributes.
    pub fn new(
        id: impl Into<String>,
        year: i32,
        mut authorships: Vec<Authorship>,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        if id.is_empty() {
            return Err(CorpusError::EmptyField {
                id: "<blank>".into(),
                field: "id".into(),
            });
        }
        if authorships.is_empty() {
            return Err(CorpusError::EmptyByline { id });
        }
        let n = authorships.len();
        let mut seen = vec![false; n];
        for a in &authorships {
            if a.author.is_empty() {
                return Err(CorpusError::EmptyField {
                    id,
                    field: "author name".into(),
                });
            }
            let r = a.rank as usize;
            if r < 1 || r > n || seen[r - 1] {
                return Err(CorpusError::RankSequence { id, n });
            }
            seen[r - 1] = true;
            if a.affiliations.is_empty() {
                return Err(CorpusError::MissingAffiliation {
                    id,
                    author: a.author.clone(),
                });
            }
            for aff in &a.affiliations {
                if aff.institution.is_empty() {
                    return Err(CorpusError::EmptyField {
                        id,
                        field: "institution".into(),
                    });
                }
                if aff.country.is_empty() {
                    return Err(CorpusError::EmptyField {
                        id,
                        field: "country".into(),
                    });
                }
            }
            for (key, value) in &a.attributes {
                if let AttrValue::Number(x) = value {
                    if !x.is_finite() || *x < 0.0 {
                        return Err(CorpusError::BadNumber {
                            id,
                            field: format!("{key} for author {}", a.author),
                        });
                    }
                }
            }
        }
        authorships.sort_by_key(|a| a.rank);
        Ok(Self {
            id,
            year,
            authorships,
            citations: None,
            level_points: None,
        })
    }

    pub fn with_citations(mut self, citations: Option<u64>) -> Self {
        self.citations = citations;
        self
    }

    /// Attaches per-publication level points (used by point systems); must be
    /// finite and positive.
    pub fn with_level_points(mut self, points: Option<f64>) -> Result<Self, CorpusError> {
        if let Some(p) = points {
            if !p.is_finite() || p <= 0.0 {
                return Err(CorpusError::BadNumber {
                    id: self.id.clone(),
                    field: "level_points".into(),
                });
            }
        }
        self.level_points = points;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// Byline in rank order.
    pub fn authorships(&self) -> &[Authorship] {
        &self.authorships
    }

    pub fn byline_size(&self) -> usize {
        self.authorships.len()
    }

    pub fn citations(&self) -> Option<u64> {
        self.citations
    }

    pub fn level_points(&self) -> Option<f64> {
        self.level_points
    }

    /// Unique addresses in order of first appearance, scanning the byline in
    /// rank order and each author's affiliation list in turn.
    pub fn addresses(&self) -> Vec<&Affiliation> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in &self.authorships {
            for aff in &a.affiliations {
                if seen.insert((aff.institution.as_str(), aff.country.as_str())) {
                    out.push(aff);
                }
            }
        }
        out
    }

    /// All countries appearing in the affiliation section.
    pub fn countries(&self) -> BTreeSet<&str> {
        self.authorships
            .iter()
            .flat_map(|a| a.affiliations.iter().map(|aff| aff.country.as_str()))
            .collect()
    }

    /// True when any address lies outside the designated home country.
    pub fn has_foreign_affiliation(&self, home_country: &str) -> bool {
        self.authorships
            .iter()
            .any(|a| a.affiliations.iter().any(|aff| aff.country != home_country))
    }

    /// Basic-unit instances of this publication at the given level.
    ///
    /// Author level: one unit per authorship in rank order, carrying the
    /// author's attributes and primary affiliation. Higher levels: one unit
    /// per unique address (rank = position in the address list); an address
    /// inherits the attribute map of the first authorship that introduced it.
    pub fn units_at(&self, level: EntityLevel) -> Vec<UnitInstance> {
        match level {
            EntityLevel::Author => self
                .authorships
                .iter()
                .map(|a| UnitInstance {
                    rank: a.rank,
                    author: Some(a.author.clone()),
                    institution: a.primary_affiliation().institution.clone(),
                    country: a.primary_affiliation().country.clone(),
                    attributes: a.attributes.clone(),
                })
                .collect(),
            EntityLevel::Institution | EntityLevel::Country | EntityLevel::Union => {
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for a in &self.authorships {
                    for aff in &a.affiliations {
                        if seen.insert((aff.institution.clone(), aff.country.clone())) {
                            out.push(UnitInstance {
                                rank: out.len() as u32 + 1,
                                author: None,
                                institution: aff.institution.clone(),
                                country: aff.country.clone(),
                                attributes: a.attributes.clone(),
                            });
                        }
                    }
                }
                out
            }
        }
    }
}

/// Aggregation levels, ordered from micro to supra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityLevel {
    Author,
    Institution,
    Country,
    Union,
}

impl EntityLevel {
    pub const ALL: [EntityLevel; 4] = [
        EntityLevel::Author,
        EntityLevel::Institution,
        EntityLevel::Country,
        EntityLevel::Union,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "author" => Some(EntityLevel::Author),
            "institution" => Some(EntityLevel::Institution),
            "country" => Some(EntityLevel::Country),
            "union" => Some(EntityLevel::Union),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EntityLevel::Author => "author",
            EntityLevel::Institution => "institution",
            EntityLevel::Country => "country",
            EntityLevel::Union => "union",
        }
    }
}

impl fmt::Display for EntityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One basic-unit instance of a publication at some level.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitInstance {
    /// 1-based position in the unit list (byline rank or address position).
    pub rank: u32,
    /// Author identity; `None` above the author level.
    pub author: Option<String>,
    pub institution: String,
    pub country: String,
    pub attributes: AttributeMap,
}

impl UnitInstance {
    /// The unit's entity identifier at the given level. Union-level identity
    /// is the country; attribution maps translate members to their union.
    pub fn entity_at(&self, level: EntityLevel) -> Result<&str, CorpusError> {
        match level {
            EntityLevel::Author => self.author.as_deref().ok_or(CorpusError::NoAuthorIdentity),
            EntityLevel::Institution => Ok(&self.institution),
            EntityLevel::Country | EntityLevel::Union => Ok(&self.country),
        }
    }
}

/// Maps every basic-unit instance of a corpus to exactly one object of study.
///
/// Derived from a corpus for a (basic level, object level) pair, optionally
/// with unions that merge several objects into one (for example three
/// constituent countries scored as one union). Unions substitute at the
/// object level: a unit whose raw object identifier belongs to a union is
/// assigned the union's identifier instead.
#[derive(Debug, Clone)]
pub struct AttributionMap {
    basic_level: EntityLevel,
    object_level: EntityLevel,
    unions: BTreeMap<String, BTreeSet<String>>,
    member_to_union: BTreeMap<String, String>,
    objects: BTreeSet<String>,
}

impl AttributionMap {
    /// Derives the attribution for `pubs` with the given levels and unions.
    ///
    /// Errors when the object level sits below the basic level, or when the
    /// unions overlap / have empty member sets / name members that never occur
    /// as objects of the corpus.
    pub fn derive(
        pubs: &[Publication],
        basic_level: EntityLevel,
        object_level: EntityLevel,
        unions: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self, CorpusError> {
        if object_level < basic_level {
            return Err(CorpusError::LevelOrder {
                basic: basic_level,
                object: object_level,
            });
        }
        let mut raw_objects = BTreeSet::new();
        for p in pubs {
            for unit in p.units_at(basic_level) {
                raw_objects.insert(unit.entity_at(object_level)?.to_string());
            }
        }
        let mut member_to_union = BTreeMap::new();
        for (union_id, members) in &unions {
            if members.is_empty() {
                return Err(CorpusError::Union {
                    union_id: union_id.clone(),
                    message: "empty member set".into(),
                });
            }
            if raw_objects.contains(union_id) {
                return Err(CorpusError::Union {
                    union_id: union_id.clone(),
                    message: "union identifier collides with an existing object".into(),
                });
            }
            for m in members {
                if !raw_objects.contains(m) {
                    return Err(CorpusError::Union {
                        union_id: union_id.clone(),
                        message: format!("member {m} is not an object of this corpus"),
                    });
                }
                if let Some(prev) = member_to_union.insert(m.clone(), union_id.clone()) {
                    return Err(CorpusError::Union {
                        union_id: union_id.clone(),
                        message: format!("member {m} already belongs to union {prev}"),
                    });
                }
            }
        }
        let objects = raw_objects
            .iter()
            .map(|o| member_to_union.get(o).unwrap_or(o).clone())
            .collect();
        Ok(Self {
            basic_level,
            object_level,
            unions,
            member_to_union,
            objects,
        })
    }

    pub fn basic_level(&self) -> EntityLevel {
        self.basic_level
    }

    pub fn object_level(&self) -> EntityLevel {
        self.object_level
    }

    /// Objects reachable from the corpus the map was derived from, after
    /// union substitution.
    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn unions(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.unions
    }

    /// The object assigned to one basic-unit instance.
    pub fn object_of(&self, unit: &UnitInstance) -> Result<String, CorpusError> {
        let raw = unit.entity_at(self.object_level)?;
        Ok(self
            .member_to_union
            .get(raw)
            .cloned()
            .unwrap_or_else(|| raw.to_string()))
    }

    /// Object assignments for every basic unit of one publication, parallel to
    /// `publication.units_at(self.basic_level())`.
    pub fn assign(&self, publication: &Publication) -> Result<Vec<String>, CorpusError> {
        publication
            .units_at(self.basic_level)
            .iter()
            .map(|u| self.object_of(u))
            .collect()
    }

    pub(crate) fn with_extra_union(
        &self,
        union_id: &str,
        members: &BTreeSet<String>,
    ) -> Result<Self, CorpusError> {
        if members.is_empty() {
            return Err(CorpusError::Union {
                union_id: union_id.to_string(),
                message: "empty member set".into(),
            });
        }
        if self.objects.contains(union_id) || self.unions.contains_key(union_id) {
            return Err(CorpusError::Union {
                union_id: union_id.to_string(),
                message: "union identifier collides with an existing object".into(),
            });
        }
        let mut member_to_union = self.member_to_union.clone();
        let mut objects = self.objects.clone();
        for m in members {
            if let Some(owner) = self.member_to_union.get(m) {
                return Err(CorpusError::Union {
                    union_id: union_id.to_string(),
                    message: format!("member {m} already belongs to union {owner}"),
                });
            }
            if !self.objects.contains(m) {
                return Err(CorpusError::Union {
                    union_id: union_id.to_string(),
                    message: format!("member {m} is not an object of this corpus"),
                });
            }
            member_to_union.insert(m.clone(), union_id.to_string());
            objects.remove(m);
        }
        objects.insert(union_id.to_string());
        let mut unions = self.unions.clone();
        unions.insert(union_id.to_string(), members.clone());
        Ok(Self {
            basic_level: self.basic_level,
            object_level: self.object_level,
            unions,
            member_to_union,
            objects,
        })
    }
}

/// The most frequent address country across the corpus (ties broken
/// lexicographically); `None` for an empty corpus.
pub fn modal_country(pubs: &[Publication]) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in pubs {
        for a in p.authorships() {
            for aff in &a.affiliations {
                *counts.entry(aff.country.as_str()).or_insert(0) += 1;
            }
        }
    }
    counts
        .into_iter()
        .max_by(|(ca, na), (cb, nb)| na.cmp(nb).then(cb.cmp(ca)))
        .map(|(c, _)| c.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> Publication {
        // Three authors: A and B share institution Y, C sits at Z, same country.
        Publication::new(
            "p1",
            2016,
            vec![
                Authorship::new("A", 1, vec![Affiliation::new("Y", "dk")]),
                Authorship::new("B", 2, vec![Affiliation::new("Y", "dk")]),
                Authorship::new("C", 3, vec![Affiliation::new("Z", "dk")]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn byline_invariants_enforced() {
        let err = Publication::new("p", 2020, vec![]).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyByline { .. }));

        let err = Publication::new(
            "p",
            2020,
            vec![
                Authorship::new("A", 1, vec![Affiliation::new("X", "se")]),
                Authorship::new("B", 3, vec![Affiliation::new("X", "se")]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::RankSequence { .. }));

        let err = Publication::new("p", 2020, vec![Authorship::new("A", 1, vec![])]).unwrap_err();
        assert!(matches!(err, CorpusError::MissingAffiliation { .. }));
    }

    #[test]
    fn byline_sorted_by_rank() {
        let p = Publication::new(
            "p",
            2020,
            vec![
                Authorship::new("B", 2, vec![Affiliation::new("X", "se")]),
                Authorship::new("A", 1, vec![Affiliation::new("Y", "se")]),
            ],
        )
        .unwrap();
        let names: Vec<_> = p.authorships().iter().map(|a| a.author.as_str()).collect();
        assert_eq!(names, ["A", "B"]);
    }

    #[test]
    fn units_at_author_level_follow_rank_order() {
        let p = worked_example();
        let units = p.units_at(EntityLevel::Author);
        assert_eq!(units.len(), 3);
        assert_eq!(units[0].author.as_deref(), Some("A"));
        assert_eq!(units[0].institution, "Y");
        assert_eq!(units[2].rank, 3);
    }

    #[test]
    fn units_above_author_level_are_unique_addresses() {
        let p = worked_example();
        let units = p.units_at(EntityLevel::Institution);
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].institution, "Y");
        assert_eq!(units[1].institution, "Z");
        assert_eq!(units[1].rank, 2);
        assert!(units[0].author.is_none());

        // Same address list at country granularity: both units say dk.
        let units = p.units_at(EntityLevel::Country);
        assert_eq!(units.len(), 2);
        assert!(units.iter().all(|u| u.country == "dk"));
    }

    #[test]
    fn address_units_inherit_first_author_attributes() {
        let mut attrs = AttributeMap::new();
        attrs.insert(ATTR_SENIOR.into(), AttrValue::Flag(true));
        let p = Publication::new(
            "p",
            2020,
            vec![
                Authorship::new("A", 1, vec![Affiliation::new("Y", "dk")]).with_attributes(attrs),
                Authorship::new("B", 2, vec![Affiliation::new("Y", "dk")]),
            ],
        )
        .unwrap();
        let units = p.units_at(EntityLevel::Institution);
        assert_eq!(units.len(), 1);
        assert_eq!(
            units[0]
                .attributes
                .get(ATTR_SENIOR)
                .and_then(|v| v.as_flag()),
            Some(true)
        );
    }

    #[test]
    fn foreign_affiliation_relative_to_home() {
        let p = worked_example();
        assert!(!p.has_foreign_affiliation("dk"));
        assert!(p.has_foreign_affiliation("se"));
    }

    #[test]
    fn attribution_assigns_each_unit_one_object() {
        let p = worked_example();
        let attr = AttributionMap::derive(
            std::slice::from_ref(&p),
            EntityLevel::Author,
            EntityLevel::Institution,
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(attr.assign(&p).unwrap(), ["Y", "Y", "Z"]);
        assert_eq!(attr.objects().len(), 2);
    }

    #[test]
    fn attribution_rejects_inverted_levels() {
        let p = worked_example();
        let err = AttributionMap::derive(
            std::slice::from_ref(&p),
            EntityLevel::Country,
            EntityLevel::Institution,
            BTreeMap::new(),
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::LevelOrder { .. }));
    }

    #[test]
    fn unions_substitute_members() {
        let p = Publication::new(
            "p",
            2020,
            vec![
                Authorship::new("A", 1, vec![Affiliation::new("X", "england")]),
                Authorship::new("B", 2, vec![Affiliation::new("Y", "france")]),
            ],
        )
        .unwrap();
        let mut unions = BTreeMap::new();
        unions.insert("uk".to_string(), BTreeSet::from(["england".to_string()]));
        let attr = AttributionMap::derive(
            std::slice::from_ref(&p),
            EntityLevel::Country,
            EntityLevel::Country,
            unions,
        )
        .unwrap();
        assert_eq!(attr.assign(&p).unwrap(), ["uk", "france"]);
        assert!(attr.objects().contains("uk"));
        assert!(!attr.objects().contains("england"));
    }

    #[test]
    fn union_validation() {
        let p = worked_example();
        let mut unions = BTreeMap::new();
        unions.insert("u".to_string(), BTreeSet::from(["nowhere".to_string()]));
        let err = AttributionMap::derive(
            std::slice::from_ref(&p),
            EntityLevel::Country,
            EntityLevel::Country,
            unions,
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::Union { .. }));
    }

    #[test]
    fn modal_country_breaks_ties_lexicographically() {
        let p1 = Publication::new(
            "p1",
            2020,
            vec![Authorship::new("A", 1, vec![Affiliation::new("X", "se")])],
        )
        .unwrap();
        let p2 = Publication::new(
            "p2",
            2020,
            vec![Authorship::new("B", 1, vec![Affiliation::new("Y", "dk")])],
        )
        .unwrap();
        assert_eq!(modal_country(&[p1, p2]).as_deref(), Some("dk"));
        assert_eq!(modal_country(&[]), None);
    }

    #[test]
    fn level_ordering_is_micro_to_supra() {
        assert!(EntityLevel::Author < EntityLevel::Institution);
        assert!(EntityLevel::Institution < EntityLevel::Country);
        assert!(EntityLevel::Country < EntityLevel::Union);
        assert_eq!(EntityLevel::parse("country"), Some(EntityLevel::Country));
        assert_eq!(EntityLevel::parse("continent"), None);
    }
}
