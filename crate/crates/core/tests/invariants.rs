//! Property tests for the invariants the library promises: credit
//! conservation, rank monotonicity, whole-family group totals, additive
//! rescoring, serialization round-trips, and the bounds of the statistical
//! toolbox.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bibcount::aggregate::{object_scores, rescore_at_level, CountingMethod};
use bibcount::corpus::{
    generate_corpus, parse_jsonl, publications_to_jsonl, Affiliation, AttrValue, AttributeMap,
    AttributionMap, Authorship, CorpusSpec, EntityLevel, Publication, TeamSize, ATTR_CONTRIBUTION,
    ATTR_INDICATOR, ATTR_PI, ATTR_SENIOR,
};
use bibcount::harness::{gini, spearman};
use bibcount::npi::{npi_table, NpiParams};
use bibcount::registry;
use bibcount::scorefn::{shapley_values, ScoreFunction};

/// Implemented methods whose claim is fractionalized: author credits must
/// always total 1.
const FRACTIONALIZED: [&str; 13] = [
    "complete-fractionalized",
    "straight",
    "harmonic",
    "proportional",
    "howard",
    "boxenbaum",
    "pure-geometric",
    "pareto-weights",
    "shapley-value-approach",
    "visibility-first-approach",
    "shen-barabasi",
    "relative-intellectual-contribution",
    "steinbruechel",
];

/// A random publication with `n` authors and a full attribute set.
fn synthetic_pub(seed: u64, id: &str, n: usize) -> Publication {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let authorships = (0..n)
        .map(|j| {
            let inst = rng.random_range(0..7usize);
            let mut attrs = AttributeMap::new();
            attrs.insert(ATTR_CONTRIBUTION.into(), AttrValue::Number(raw[j] / total));
            attrs.insert(
                ATTR_INDICATOR.into(),
                AttrValue::Number(1.0 + (rng.random::<f64>() * 9.0).floor()),
            );
            attrs.insert(
                ATTR_SENIOR.into(),
                AttrValue::Flag(rng.random::<f64>() < 0.3),
            );
            attrs.insert(
                ATTR_PI.into(),
                AttrValue::Flag(j == 0 || rng.random::<f64>() < 0.35),
            );
            Authorship::new(
                format!("{id}-a{j}"),
                (j + 1) as u32,
                vec![Affiliation::new(
                    format!("i{inst}"),
                    format!("c{}", inst % 4),
                )],
            )
            .with_attributes(attrs)
        })
        .collect();
    Publication::new(id, 2015, authorships).expect("valid publication")
}

/// Author-level credits with institution-level object identities attached.
fn author_credits(f: &Arc<dyn ScoreFunction>, p: &Publication) -> Vec<f64> {
    let units = p.units_at(EntityLevel::Author);
    let objects: Vec<String> = units
        .iter()
        .map(|u| {
            u.entity_at(EntityLevel::Institution)
                .expect("institution")
                .to_string()
        })
        .collect();
    f.credit_units(p.id(), &units, Some(&objects))
        .expect("scorable")
}

fn small_corpus(seed: u64, publications: usize) -> Vec<Publication> {
    let spec = CorpusSpec {
        publications,
        authors: 30,
        institutions: 6,
        countries: 3,
        team_size: TeamSize::MeanShifted { mean: 3.0 },
        cross_institution_rate: 0.4,
        country_skew: 0.5,
        year_range: (2010, 2018),
        synthesize_attributes: true,
        id_prefix: String::new(),
    };
    generate_corpus(&spec, seed).expect("corpus")
}

proptest! {
    #[test]
    fn fractionalized_methods_conserve_credit(seed in any::<u64>(), n in 1usize..=50) {
        for name in FRACTIONALIZED {
            let f = registry::build(name).unwrap();
            let cap = f.spec().max_units.unwrap_or(50).min(50);
            let p = synthetic_pub(seed, &format!("{name}-p"), n.min(cap));
            let total: f64 = author_credits(&f, &p).iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9, "{name} totals {total}");
        }
    }

    #[test]
    fn straight_gives_all_credit_to_the_first_author(seed in any::<u64>(), n in 1usize..=50) {
        let f = registry::build("straight").unwrap();
        let p = synthetic_pub(seed, "s-p", n);
        let credits = author_credits(&f, &p);
        prop_assert!((credits[0] - 1.0).abs() <= 1e-12);
        for c in &credits[1..] {
            prop_assert_eq!(*c, 0.0);
        }
    }

    #[test]
    fn whole_family_group_totals(seed in any::<u64>(), n in 1usize..=50) {
        let p = synthetic_pub(seed, "w-p", n);
        let units = p.units_at(EntityLevel::Author);
        let objects: Vec<String> = units
            .iter()
            .map(|u| u.entity_at(EntityLevel::Institution).unwrap().to_string())
            .collect();
        let distinct: BTreeSet<&String> = objects.iter().collect();
        let m = distinct.len() as f64;

        for (name, expected) in [("whole", 1.0), ("on-line-fractionation", 1.0 / m)] {
            let f = registry::build(name).unwrap();
            let credits = f.credit_units(p.id(), &units, Some(&objects)).unwrap();
            let mut totals: BTreeMap<&String, f64> = BTreeMap::new();
            for (object, credit) in objects.iter().zip(&credits) {
                *totals.entry(object).or_insert(0.0) += credit;
            }
            for (object, total) in totals {
                prop_assert!(
                    (total - expected).abs() <= 1e-9,
                    "{name}: {object} totals {total}, expected {expected}"
                );
            }
        }
    }

    #[test]
    fn equal_contribution_floors_small_shares(seed in any::<u64>(), n in 1usize..=50) {
        let f = registry::build("equal-contribution").unwrap();
        let p = synthetic_pub(seed, "e-p", n);
        let expected = (1.0 / n as f64).max(0.05);
        for c in author_credits(&f, &p) {
            prop_assert!((c - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn geometric_credits_decrease_with_rank(seed in any::<u64>(), n in 2usize..=50) {
        let f = registry::build("howard").unwrap();
        let p = synthetic_pub(seed, "g-p", n);
        let credits = author_credits(&f, &p);
        for pair in credits.windows(2) {
            prop_assert!(pair[0] > pair[1], "credits must strictly decrease: {pair:?}");
        }
        let total: f64 = credits.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn shapley_efficiency_on_weighted_games(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
        let value = |coalition: &[usize]| -> f64 {
            let s: f64 = coalition.iter().map(|&i| w[i]).sum();
            s * s
        };
        let phi = shapley_values(n, 6, value).unwrap();
        let grand: f64 = w.iter().sum::<f64>().powi(2);
        let total: f64 = phi.iter().sum();
        prop_assert!((total - grand).abs() <= 1e-9);
    }

    #[test]
    fn gini_bounds_and_scale_invariance(
        scores in prop::collection::vec(0.0f64..100.0, 2..40),
        scale in 0.5f64..10.0,
    ) {
        prop_assume!(scores.iter().sum::<f64>() > 0.0);
        let g = gini(&scores).unwrap();
        prop_assert!((0.0..1.0).contains(&g), "gini {g} out of range");
        let scaled: Vec<f64> = scores.iter().map(|s| s * scale).collect();
        let gs = gini(&scaled).unwrap();
        prop_assert!((g - gs).abs() <= 1e-9, "gini must ignore scale: {g} vs {gs}");
    }

    #[test]
    fn spearman_bounds_and_self_agreement(
        values in prop::collection::vec(0.0f64..100.0, 3..30),
    ) {
        prop_assume!(values.windows(2).any(|w| w[0] != w[1]));
        let rho = spearman(&values, &values).unwrap();
        prop_assert!((rho - 1.0).abs() <= 1e-9);
        let reversed: Vec<f64> = values.iter().rev().copied().collect();
        let anti = spearman(&values, &reversed).unwrap();
        prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&anti));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn additive_method_rescoring_matches_direct_scores(seed in any::<u64>()) {
        let pubs = small_corpus(seed, 12);
        let method = CountingMethod::new(
            registry::build("complete-fractionalized").unwrap(),
            EntityLevel::Country,
            EntityLevel::Country,
        )
        .unwrap();
        let attr = AttributionMap::derive(
            &pubs,
            EntityLevel::Country,
            EntityLevel::Country,
            BTreeMap::new(),
        )
        .unwrap();
        let direct = object_scores(&method, &pubs, &attr).unwrap();
        // Country-level basic units are distinct addresses, so rescoring
        // through the institution level must not move any additive score.
        let rescored = rescore_at_level(&method, &pubs, EntityLevel::Institution).unwrap();
        for row in direct.sorted_rows() {
            let other = rescored.score_of(&row.object).unwrap();
            prop_assert!(
                (row.score - other).abs() <= 1e-9,
                "{}: direct {} vs rescored {other}", row.object, row.score
            );
        }
    }

    #[test]
    fn jsonl_round_trip_preserves_publications(seed in any::<u64>()) {
        let pubs = small_corpus(seed, 20);
        let text = publications_to_jsonl(&pubs);
        let parsed = parse_jsonl(&text).unwrap();
        prop_assert_eq!(pubs, parsed);
    }

    #[test]
    fn linear_publication_mass_equals_publication_count(seed in any::<u64>()) {
        let pubs = small_corpus(seed, 15);
        let linear = NpiParams {
            root_exponent: 1,
            international_bonus: 1.0,
            ..NpiParams::default()
        };
        let table = npi_table(&pubs, &linear).unwrap();
        let mass: f64 = table.values().sum();
        prop_assert!(
            (mass - pubs.len() as f64).abs() <= 1e-6,
            "linear mass {mass} for {} publications",
            pubs.len()
        );

        // The rooted variant can only add mass: roots of fractions in (0, 1]
        // are at least the fractions themselves.
        let rooted = NpiParams { international_bonus: 1.0, ..NpiParams::default() };
        let rooted_mass: f64 = npi_table(&pubs, &rooted).unwrap().values().sum();
        prop_assert!(rooted_mass >= mass - 1e-9);
    }

    #[test]
    fn fractionalized_score_tables_total_the_corpus_size(seed in any::<u64>()) {
        let pubs = small_corpus(seed, 15);
        let method = CountingMethod::new(
            registry::build("complete-fractionalized").unwrap(),
            EntityLevel::Author,
            EntityLevel::Institution,
        )
        .unwrap();
        let attr = AttributionMap::derive(
            &pubs,
            EntityLevel::Author,
            EntityLevel::Institution,
            BTreeMap::new(),
        )
        .unwrap();
        let table = object_scores(&method, &pubs, &attr).unwrap();
        for row in table.sorted_rows() {
            prop_assert!(row.score >= 0.0);
        }
        prop_assert!((table.total() - pubs.len() as f64).abs() <= 1e-9);
    }
}
