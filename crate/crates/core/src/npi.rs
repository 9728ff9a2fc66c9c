//! National funding-model pipelines: the Norwegian Publication Indicator,
//! the Danish BFI floor variant, and modified fractional counting.
//!
//! The Norwegian pipeline works per publication: count author shares (unique
//! author–institution pairs), take the institution's fraction of them, apply
//! a root to dampen fractionalization, multiply by the publication's
//! level/type points, and add 30% when the publication has an affiliation
//! outside the home country. All operations are pure; per-institution totals
//! use pairwise summation.

use std::collections::BTreeMap;
use std::io::Read;

use thiserror::Error;

use crate::aggregate::pairwise_sum;
use crate::corpus::{modal_country, Publication, UnitInstance};
use crate::scorefn::{ScoreError, ScoreFunction, ScoreFunctionSpec};

/// Failure modes of the funding pipelines.
#[derive(Debug, Error)]
pub enum NpiError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("points file record {record}: {message}")]
    Points { record: usize, message: String },
}

/// One author share: a unique author–institution combination on a byline.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AuthorShare {
    pub author: String,
    pub institution: String,
}

/// The publication's author shares in first-appearance order.
///
/// An author affiliated with two institutions yields two shares; listing the
/// same institution twice (say, under two countries) yields one.
pub fn author_shares(publication: &Publication) -> Vec<AuthorShare> {
    let mut shares = Vec::new();
    for a in publication.authorships() {
        for aff in &a.affiliations {
            let share = AuthorShare {
                author: a.author.clone(),
                institution: aff.institution.clone(),
            };
            if !shares.contains(&share) {
                shares.push(share);
            }
        }
    }
    shares
}

/// How the root is applied across an institution's shares of one publication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootMode {
    /// Root of the institution's total fraction (the published procedure).
    #[default]
    RootedSum,
    /// Sum of the roots of the individual shares — a comparison mode that
    /// demonstrates the pipeline's non-additivity.
    PerShareRooted,
}

/// Parameters of the Norwegian pipeline.
#[derive(Debug, Clone)]
pub struct NpiParams {
    /// k in fraction^(1/k); 2 is the published square root, 1 disables damping.
    pub root_exponent: u32,
    /// Multiplier for publications with an affiliation outside the home country.
    pub international_bonus: f64,
    /// Points used when neither the table nor the publication carries any.
    pub default_points: f64,
    /// Per-publication level/type points, keyed by publication id.
    pub points: BTreeMap<String, f64>,
    /// Home country; when absent, the corpus's most frequent address country.
    pub home_country: Option<String>,
    pub mode: RootMode,
}

impl Default for NpiParams {
    fn default() -> Self {
        Self {
            root_exponent: 2,
            international_bonus: 1.3,
            default_points: 1.0,
            points: BTreeMap::new(),
            home_country: None,
            mode: RootMode::RootedSum,
        }
    }
}

impl NpiParams {
    fn validate(&self) -> Result<(), NpiError> {
        if self.root_exponent < 1 {
            return Err(NpiError::Parameter(
                "root exponent must be at least 1".into(),
            ));
        }
        if !(self.international_bonus.is_finite() && self.international_bonus > 0.0) {
            return Err(NpiError::Parameter(format!(
                "international bonus must be positive, got {}",
                self.international_bonus
            )));
        }
        if !(self.default_points.is_finite() && self.default_points > 0.0) {
            return Err(NpiError::Parameter(format!(
                "default points must be positive, got {}",
                self.default_points
            )));
        }
        Ok(())
    }

    /// Points for one publication: configured table, then the publication's
    /// own level points, then the default.
    fn points_for(&self, publication: &Publication) -> f64 {
        self.points
            .get(publication.id())
            .copied()
            .or(publication.level_points())
            .unwrap_or(self.default_points)
    }
}

/// A pipeline score together with non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct NpiScore {
    pub value: f64,
    pub warnings: Vec<String>,
}

fn share_counts(publication: &Publication) -> (usize, BTreeMap<String, usize>) {
    let shares = author_shares(publication);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for s in &shares {
        *counts.entry(s.institution.clone()).or_insert(0) += 1;
    }
    (shares.len(), counts)
}

fn contribution(
    params: &NpiParams,
    publication: &Publication,
    home: Option<&str>,
    institution_shares: usize,
    total_shares: usize,
) -> f64 {
    let root = 1.0 / params.root_exponent as f64;
    let rooted = match params.mode {
        RootMode::RootedSum => (institution_shares as f64 / total_shares as f64).powf(root),
        RootMode::PerShareRooted => {
            institution_shares as f64 * (1.0 / total_shares as f64).powf(root)
        }
    };
    let bonus = match home {
        Some(home) if publication.has_foreign_affiliation(home) => params.international_bonus,
        _ => 1.0,
    };
    rooted * params.points_for(publication) * bonus
}

/// The institution's Norwegian Publication Indicator score over the corpus.
///
/// An institution that never appears scores 0 with a warning, not an error.
pub fn npi_score(
    pubs: &[Publication],
    institution: &str,
    params: &NpiParams,
) -> Result<NpiScore, NpiError> {
    params.validate()?;
    let home = params.home_country.clone().or_else(|| modal_country(pubs));
    let mut contributions = Vec::new();
    let mut seen = false;
    for p in pubs {
        let (total, counts) = share_counts(p);
        if let Some(&mine) = counts.get(institution) {
            seen = true;
            contributions.push(contribution(params, p, home.as_deref(), mine, total));
        }
    }
    let mut warnings = Vec::new();
    if !seen {
        warnings.push(format!(
            "institution {institution} does not appear in any publication"
        ));
    }
    Ok(NpiScore {
        value: pairwise_sum(&contributions),
        warnings,
    })
}

/// Norwegian Publication Indicator scores for every institution in the corpus.
pub fn npi_table(
    pubs: &[Publication],
    params: &NpiParams,
) -> Result<BTreeMap<String, f64>, NpiError> {
    params.validate()?;
    let home = params.home_country.clone().or_else(|| modal_country(pubs));
    let mut buffers: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for p in pubs {
        let (total, counts) = share_counts(p);
        for (institution, mine) in counts {
            buffers.entry(institution).or_default().push(contribution(
                params,
                p,
                home.as_deref(),
                mine,
                total,
            ));
        }
    }
    Ok(buffers
        .into_iter()
        .map(|(i, c)| (i, pairwise_sum(&c)))
        .collect())
}

/// The institution's modified-fractional credit from one publication:
/// (its fraction of the author shares)^(1/k).
pub fn modified_fractional(
    publication: &Publication,
    institution: &str,
    k: u32,
) -> Result<f64, NpiError> {
    if k < 1 {
        return Err(NpiError::Parameter(
            "root exponent must be at least 1".into(),
        ));
    }
    let (total, counts) = share_counts(publication);
    let mine = counts.get(institution).copied().unwrap_or(0);
    Ok((mine as f64 / total as f64).powf(1.0 / k as f64))
}

/// The Danish floor applied to an institution's per-publication credit.
pub const BFI_FLOOR: f64 = 0.10;

/// The institution's BFI-style score: per publication, the sum of its
/// authors' complete-fractionalized credits (by primary affiliation), raised
/// to at least 0.10 whenever the institution participates at all.
pub fn bfi_score(pubs: &[Publication], institution: &str) -> f64 {
    let contributions: Vec<f64> = pubs
        .iter()
        .filter_map(|p| {
            let n = p.byline_size() as f64;
            let authors = p
                .authorships()
                .iter()
                .filter(|a| a.primary_affiliation().institution == institution)
                .count();
            (authors > 0).then(|| (authors as f64 / n).max(BFI_FLOOR))
        })
        .collect();
    pairwise_sum(&contributions)
}

/// BFI-style scores for every institution in the corpus.
pub fn bfi_table(pubs: &[Publication]) -> BTreeMap<String, f64> {
    let mut buffers: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for p in pubs {
        let n = p.byline_size() as f64;
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for a in p.authorships() {
            *counts
                .entry(a.primary_affiliation().institution.as_str())
                .or_insert(0) += 1;
        }
        for (institution, authors) in counts {
            buffers
                .entry(institution.to_string())
                .or_default()
                .push((authors as f64 / n).max(BFI_FLOOR));
        }
    }
    buffers
        .into_iter()
        .map(|(i, c)| (i, pairwise_sum(&c)))
        .collect()
}

/// Reads a `publication_id,points` CSV (with header). Publications missing
/// from the table fall back to their own level points or the default.
pub fn read_points_csv<R: Read>(reader: R) -> Result<BTreeMap<String, f64>, NpiError> {
    let mut table = BTreeMap::new();
    let mut csv = csv::Reader::from_reader(reader);
    for (i, row) in csv.records().enumerate() {
        let record = i + 2; // 1-based, counting the header
        let row = row.map_err(|e| NpiError::Points {
            record,
            message: e.to_string(),
        })?;
        if row.len() != 2 {
            return Err(NpiError::Points {
                record,
                message: format!("expected 2 fields, got {}", row.len()),
            });
        }
        let id = row[0].trim().to_string();
        if id.is_empty() {
            return Err(NpiError::Points {
                record,
                message: "empty publication id".into(),
            });
        }
        let points: f64 = row[1].trim().parse().map_err(|_| NpiError::Points {
            record,
            message: format!("points value {:?} is not a number", &row[1]),
        })?;
        if !(points.is_finite() && points > 0.0) {
            return Err(NpiError::Points {
                record,
                message: format!("points must be positive, got {points}"),
            });
        }
        if table.insert(id.clone(), points).is_some() {
            return Err(NpiError::Points {
                record,
                message: format!("duplicate publication id {id}"),
            });
        }
    }
    Ok(table)
}

/// The Norwegian pipeline's core as a score function, for classification:
/// the basic units of each object of study share the rooted fraction
/// √(group size / byline size) equally.
///
/// Publication totals exceed 1 whenever more than one object participates,
/// and depend on the object grouping, so the function is neither
/// fractionalized nor a fixed scheme.
#[derive(Debug, Clone)]
pub struct NpiInstitutional {
    spec: ScoreFunctionSpec,
}

impl NpiInstitutional {
    pub fn new() -> Self {
        let mut spec = ScoreFunctionSpec {
            name: "npi-institutional".into(),
            parameters: BTreeMap::new(),
            selectable_parameters: Default::default(),
            requires_attribution: true,
            requires_attributes: Default::default(),
            piecewise: false,
            max_units: None,
        };
        spec.parameters.insert("root-exponent".into(), 2.0);
        Self { spec }
    }
}

impl Default for NpiInstitutional {
    fn default() -> Self {
        Self::new()
    }
}

impl ScoreFunction for NpiInstitutional {
    fn spec(&self) -> &ScoreFunctionSpec {
        &self.spec
    }

    fn credit_units(
        &self,
        publication_id: &str,
        units: &[UnitInstance],
        objects: Option<&[String]>,
    ) -> Result<Vec<f64>, ScoreError> {
        if units.is_empty() {
            return Err(ScoreError::NoUnits {
                name: self.spec.name.clone(),
                publication: publication_id.into(),
            });
        }
        let objects = objects.ok_or_else(|| ScoreError::MissingAttribution {
            name: self.spec.name.clone(),
        })?;
        if objects.len() != units.len() {
            return Err(ScoreError::AttributionLength {
                name: self.spec.name.clone(),
                expected: units.len(),
                got: objects.len(),
            });
        }
        let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
        for o in objects {
            *sizes.entry(o.as_str()).or_insert(0) += 1;
        }
        let n = units.len() as f64;
        Ok(objects
            .iter()
            .map(|o| {
                let s = sizes[o.as_str()] as f64;
                (s / n).sqrt() / s
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{object_scores, CountingMethod};
    use crate::corpus::{
        generate_corpus, Affiliation, AttributionMap, Authorship, CorpusSpec, EntityLevel,
    };
    use crate::scorefn::CompleteFractionalized;
    use std::sync::Arc;

    /// Authors a, b at institution y; author c at institution z; all Danish.
    fn worked_example() -> Publication {
        Publication::new(
            "p1",
            2020,
            vec![
                Authorship::new("a", 1, vec![Affiliation::new("y", "dk")]),
                Authorship::new("b", 2, vec![Affiliation::new("y", "dk")]),
                Authorship::new("c", 3, vec![Affiliation::new("z", "dk")]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn author_shares_are_unique_author_institution_pairs() {
        let p = Publication::new(
            "p1",
            2020,
            vec![
                // One author, one institution listed under two countries: one share.
                Authorship::new(
                    "a",
                    1,
                    vec![Affiliation::new("y", "dk"), Affiliation::new("y", "se")],
                ),
                // Two institutions: two shares.
                Authorship::new(
                    "b",
                    2,
                    vec![Affiliation::new("y", "dk"), Affiliation::new("z", "dk")],
                ),
            ],
        )
        .unwrap();
        let shares = author_shares(&p);
        assert_eq!(shares.len(), 3);
        assert_eq!(
            shares[0],
            AuthorShare {
                author: "a".into(),
                institution: "y".into()
            }
        );
        assert_eq!(
            shares[1],
            AuthorShare {
                author: "b".into(),
                institution: "y".into()
            }
        );
        assert_eq!(
            shares[2],
            AuthorShare {
                author: "b".into(),
                institution: "z".into()
            }
        );
    }

    #[test]
    fn npi_matches_the_worked_example() {
        let pubs = [worked_example()];
        let params = NpiParams::default();
        let y = npi_score(&pubs, "y", &params).unwrap();
        let z = npi_score(&pubs, "z", &params).unwrap();
        assert!((y.value - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((z.value - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // Against the published rounded values.
        assert!((y.value - 0.82).abs() < 5e-3);
        assert!((z.value - 0.58).abs() < 5e-3);
        assert!(y.warnings.is_empty());
    }

    #[test]
    fn per_share_rooted_mode_demonstrates_non_additivity() {
        let pubs = [worked_example()];
        let params = NpiParams {
            mode: RootMode::PerShareRooted,
            ..Default::default()
        };
        let y = npi_score(&pubs, "y", &params).unwrap();
        assert!((y.value - 2.0 * (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((y.value - 1.15).abs() < 5e-3);
        // Rooted sum differs from sum of roots whenever an institution holds
        // two or more shares.
        let rooted_sum = npi_score(&pubs, "y", &NpiParams::default()).unwrap();
        assert!((y.value - rooted_sum.value).abs() > 0.3);
    }

    #[test]
    fn foreign_affiliation_earns_the_bonus() {
        // Sole institution y; one author lists it under a foreign country.
        let p = Publication::new(
            "p1",
            2020,
            vec![
                Authorship::new("a", 1, vec![Affiliation::new("y", "dk")]),
                Authorship::new("b", 2, vec![Affiliation::new("y", "us")]),
            ],
        )
        .unwrap();
        let params = NpiParams {
            home_country: Some("dk".into()),
            points: [("p1".to_string(), 3.0)].into_iter().collect(),
            ..Default::default()
        };
        let score = npi_score(&[p], "y", &params).unwrap();
        assert!(
            (score.value - 3.9).abs() < 1e-12,
            "1 × 3 points × 1.3 = 3.9"
        );
    }

    #[test]
    fn points_resolution_prefers_table_then_publication_then_default() {
        let with_level = worked_example().with_level_points(Some(5.0)).unwrap();
        let base = NpiParams {
            home_country: Some("dk".into()),
            ..Default::default()
        };
        let sqrt23 = (2.0f64 / 3.0).sqrt();

        // Publication-level points apply when the table has no entry.
        let s = npi_score(std::slice::from_ref(&with_level), "y", &base).unwrap();
        assert!((s.value - 5.0 * sqrt23).abs() < 1e-12);

        // A table entry beats the publication's own points.
        let table = NpiParams {
            points: [("p1".to_string(), 2.0)].into_iter().collect(),
            ..base.clone()
        };
        let s = npi_score(std::slice::from_ref(&with_level), "y", &table).unwrap();
        assert!((s.value - 2.0 * sqrt23).abs() < 1e-12);

        // Neither: the default applies.
        let s = npi_score(&[worked_example()], "y", &base).unwrap();
        assert!((s.value - sqrt23).abs() < 1e-12);
    }

    #[test]
    fn absent_institution_scores_zero_with_a_warning() {
        let s = npi_score(&[worked_example()], "nowhere", &NpiParams::default()).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("nowhere"));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let params = NpiParams {
            root_exponent: 0,
            ..Default::default()
        };
        assert!(matches!(
            npi_score(&[], "y", &params),
            Err(NpiError::Parameter(_))
        ));
        let params = NpiParams {
            international_bonus: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            npi_table(&[], &params),
            Err(NpiError::Parameter(_))
        ));
    }

    #[test]
    fn root_exponent_one_reduces_to_fractionalized_counting() {
        let spec = CorpusSpec {
            publications: 60,
            ..Default::default()
        };
        let pubs = generate_corpus(&spec, 21).unwrap();
        let params = NpiParams {
            root_exponent: 1,
            international_bonus: 1.0,
            ..Default::default()
        };
        let npi = npi_table(&pubs, &params).unwrap();
        let attr = AttributionMap::derive(
            &pubs,
            EntityLevel::Author,
            EntityLevel::Institution,
            Default::default(),
        )
        .unwrap();
        let m = CountingMethod::new(
            Arc::new(CompleteFractionalized::new()),
            EntityLevel::Author,
            EntityLevel::Institution,
        )
        .unwrap();
        let cf = object_scores(&m, &pubs, &attr).unwrap();
        assert_eq!(npi.len(), cf.len());
        for (institution, score) in &npi {
            assert!(
                (score - cf.score_of(institution).unwrap()).abs() < 1e-9,
                "{institution}: {score} vs {:?}",
                cf.score_of(institution)
            );
        }
    }

    #[test]
    fn modified_fractional_matches_hand_roots() {
        let p = worked_example();
        assert!((modified_fractional(&p, "z", 2).unwrap() - 0.5774).abs() < 5e-4);
        assert!((modified_fractional(&p, "z", 3).unwrap() - 0.693_361_274).abs() < 1e-9);
        assert!((modified_fractional(&p, "z", 1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // Fraction 1 stays 1 under any root.
        let solo = Publication::new(
            "p2",
            2020,
            vec![Authorship::new("a", 1, vec![Affiliation::new("y", "dk")])],
        )
        .unwrap();
        assert!((modified_fractional(&solo, "y", 7).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            modified_fractional(&p, "z", 0),
            Err(NpiError::Parameter(_))
        ));
    }

    #[test]
    fn bfi_floors_small_credits_at_a_tenth() {
        // 1 author of 20 → raw 0.05 → floored to 0.10.
        let p = Publication::new(
            "p1",
            2020,
            (1..=20)
                .map(|i| {
                    let inst = if i == 1 { "y" } else { "z" };
                    Authorship::new(
                        format!("a{i}"),
                        i as u32,
                        vec![Affiliation::new(inst, "dk")],
                    )
                })
                .collect(),
        )
        .unwrap();
        assert!((bfi_score(&[p], "y") - 0.10).abs() < 1e-12);
        // 2 authors of 3 → 2/3, unchanged by the floor.
        assert!((bfi_score(&[worked_example()], "y") - 2.0 / 3.0).abs() < 1e-12);
        // Single-institution publication → 1.0.
        let solo = Publication::new(
            "p2",
            2020,
            vec![Authorship::new("a", 1, vec![Affiliation::new("y", "dk")])],
        )
        .unwrap();
        assert!((bfi_score(&[solo], "y") - 1.0).abs() < 1e-12);
        // Never participating → 0 (and no floor).
        assert_eq!(bfi_score(&[worked_example()], "nowhere"), 0.0);
    }

    #[test]
    fn bfi_table_covers_all_primary_institutions() {
        let pubs = [worked_example()];
        let table = bfi_table(&pubs);
        assert_eq!(table.len(), 2);
        assert!((table["y"] - 2.0 / 3.0).abs() < 1e-12);
        assert!((table["z"] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn points_csv_round_trips_and_validates() {
        let table = read_points_csv("publication_id,points\np1,3\np2,0.5\n".as_bytes()).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table["p1"], 3.0);
        assert_eq!(table["p2"], 0.5);

        let err = read_points_csv("publication_id,points\np1,many\n".as_bytes()).unwrap_err();
        assert!(matches!(err, NpiError::Points { record: 2, .. }));
        let err = read_points_csv("publication_id,points\np1,1\np1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, NpiError::Points { record: 3, .. }));
        let err = read_points_csv("publication_id,points\np1,-1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, NpiError::Points { record: 2, .. }));
    }

    #[test]
    fn institutional_score_function_roots_group_fractions() {
        use crate::scorefn::ScoreFunction;
        let p = worked_example();
        let units = p.units_at(EntityLevel::Author);
        let objects: Vec<String> = vec!["y".into(), "y".into(), "z".into()];
        let f = NpiInstitutional::new();
        let credits = f.credit_units(p.id(), &units, Some(&objects)).unwrap();
        let sqrt23 = (2.0f64 / 3.0).sqrt();
        let sqrt13 = (1.0f64 / 3.0).sqrt();
        assert!((credits[0] - sqrt23 / 2.0).abs() < 1e-12);
        assert!((credits[1] - sqrt23 / 2.0).abs() < 1e-12);
        assert!((credits[2] - sqrt13).abs() < 1e-12);
        // Group totals are the rooted fractions; the publication total
        // exceeds 1 whenever several objects participate.
        let total: f64 = credits.iter().sum();
        assert!((total - (sqrt23 + sqrt13)).abs() < 1e-12);
        assert!(total > 1.0);
        assert!(f.credit_units(p.id(), &units, None).is_err());
    }
}
