//! Seeded synthetic corpora with controllable collaboration structure.
//!
//! Generation is deterministic for a given (spec, seed) pair and derives one
//! sub-seed per publication, so publications can be produced independently in
//! any order without changing the corpus.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    Affiliation, AttrValue, AttributeMap, Authorship, CorpusError, Publication, ATTR_CONTRIBUTION,
    ATTR_INDICATOR, ATTR_PI, ATTR_SENIOR,
};

/// Authors-per-publication distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeamSize {
    /// Every publication has exactly this many authors.
    Fixed(usize),
    /// 1 + Poisson(mean - 1); the sampled mean equals `mean` exactly.
    MeanShifted { mean: f64 },
}

/// Configuration for [`generate_corpus`].
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub publications: usize,
    /// Size of the author pool; each author has one home institution.
    pub authors: usize,
    pub institutions: usize,
    pub countries: usize,
    pub team_size: TeamSize,
    /// Probability that a co-author is drawn from the whole pool instead of
    /// the first author's institution.
    pub cross_institution_rate: f64,
    /// Skew of the institution-to-country allocation: 0 spreads institutions
    /// evenly; larger values concentrate them in low-index countries
    /// (country c receives weight proportional to 1/(c+1)^skew).
    pub country_skew: f64,
    pub year_range: (i32, i32),
    /// Attach synthesized author attributes (senior/pi flags, indicator,
    /// contribution weights summing to 1 per publication).
    pub synthesize_attributes: bool,
    /// Prefix for publication, author, institution, and country identifiers;
    /// lets experiments compose disjoint corpora.
    pub id_prefix: String,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            publications: 100,
            authors: 100,
            institutions: 10,
            countries: 5,
            team_size: TeamSize::MeanShifted { mean: 3.0 },
            cross_institution_rate: 0.25,
            country_skew: 0.0,
            year_range: (2000, 2020),
            synthesize_attributes: false,
            id_prefix: String::new(),
        }
    }
}

impl CorpusSpec {
    fn validate(&self) -> Result<(), CorpusError> {
        if self.authors == 0 || self.institutions == 0 || self.countries == 0 {
            return Err(CorpusError::Config(
                "author, institution, and country pools must be non-empty".into(),
            ));
        }
        match self.team_size {
            TeamSize::Fixed(0) => {
                return Err(CorpusError::Config("team size must be at least 1".into()))
            }
            TeamSize::Fixed(m) if m > self.authors => {
                return Err(CorpusError::Config(format!(
                    "team size {m} exceeds the {n}-author pool",
                    n = self.authors
                )))
            }
            TeamSize::MeanShifted { mean } if !(mean.is_finite() && mean >= 1.0) => {
                return Err(CorpusError::Config(
                    "mean team size must be at least 1".into(),
                ))
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.cross_institution_rate) {
            return Err(CorpusError::Config(
                "cross-institution rate must lie in [0, 1]".into(),
            ));
        }
        if !self.country_skew.is_finite() || self.country_skew < 0.0 {
            return Err(CorpusError::Config(
                "country skew must be finite and >= 0".into(),
            ));
        }
        if self.year_range.0 > self.year_range.1 {
            return Err(CorpusError::Config("year range is inverted".into()));
        }
        Ok(())
    }
}

/// Derives an independent stream seed (splitmix64 over seed and stream index).
pub(crate) fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn poisson(rng: &mut ChaCha8Rng, lambda: f64) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let cutoff = (-lambda).exp();
    let mut k = 0usize;
    let mut p = 1.0f64;
    loop {
        p *= rng.random::<f64>();
        if p <= cutoff {
            return k;
        }
        k += 1;
    }
}

fn pad_width(count: usize) -> usize {
    count.saturating_sub(1).to_string().len().max(3)
}

/// Builds a deterministic corpus from the given shape parameters and seed.
///
/// Every institution belongs to exactly one country, so rescoring through the
/// institution level always finds a one-to-one relation; every author carries
/// a single affiliation (their home institution).
pub fn generate_corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<Publication>, CorpusError> {
    spec.validate()?;

    let inst_width = pad_width(spec.institutions);
    let country_width = pad_width(spec.countries);
    let author_width = pad_width(spec.authors);
    let pub_width = pad_width(spec.publications.max(1));
    let prefix = &spec.id_prefix;

    // Institution -> country through the inverse CDF of the skewed weights.
    let weights: Vec<f64> = (0..spec.countries)
        .map(|c| 1.0 / ((c + 1) as f64).powf(spec.country_skew))
        .collect();
    let total_weight: f64 = weights.iter().sum();
    let country_of_institution: Vec<usize> = (0..spec.institutions)
        .map(|i| {
            let target = (i as f64 + 0.5) / spec.institutions as f64 * total_weight;
            let mut acc = 0.0;
            for (c, w) in weights.iter().enumerate() {
                acc += w;
                if target <= acc {
                    return c;
                }
            }
            spec.countries - 1
        })
        .collect();

    let institution_name = |i: usize| {
        format!(
            "{prefix}inst{e:0inst_width$}",
            e = i,
            inst_width = inst_width
        )
    };
    let country_name = |c: usize| {
        format!(
            "{prefix}country{e:0country_width$}",
            e = c,
            country_width = country_width
        )
    };
    let author_name = |a: usize| {
        format!(
            "{prefix}author{e:0author_width$}",
            e = a,
            author_width = author_width
        )
    };
    let home_institution = |a: usize| a % spec.institutions;

    // Author indices grouped by home institution, for within-team sampling.
    let mut institution_pool: Vec<Vec<usize>> = vec![Vec::new(); spec.institutions];
    for a in 0..spec.authors {
        institution_pool[home_institution(a)].push(a);
    }

    let mut pubs = Vec::with_capacity(spec.publications);
    for index in 0..spec.publications {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, index as u64));
        let m = match spec.team_size {
            TeamSize::Fixed(m) => m,
            TeamSize::MeanShifted { mean } => 1 + poisson(&mut rng, mean - 1.0),
        }
        .min(spec.authors);

        let first = rng.random_range(0..spec.authors);
        let mut team = vec![first];
        let home_pool = &institution_pool[home_institution(first)];
        let mut attempts = 0;
        while team.len() < m {
            let candidate = if rng.random::<f64>() < spec.cross_institution_rate {
                rng.random_range(0..spec.authors)
            } else {
                home_pool[rng.random_range(0..home_pool.len())]
            };
            if !team.contains(&candidate) {
                team.push(candidate);
            } else {
                attempts += 1;
                if attempts > 20 * m {
                    // Deterministic fill once rejection stalls (tiny pools).
                    for a in 0..spec.authors {
                        if team.len() == m {
                            break;
                        }
                        if !team.contains(&a) {
                            team.push(a);
                        }
                    }
                }
            }
        }

        let contribution_draws: Vec<f64> =
            (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let contribution_total: f64 = contribution_draws.iter().sum();

        let mut authorships = Vec::with_capacity(m);
        let mut any_pi = false;
        for (pos, &a) in team.iter().enumerate() {
            let inst = home_institution(a);
            let mut attributes = AttributeMap::new();
            if spec.synthesize_attributes {
                let senior = rng.random::<f64>() < 0.3;
                let pi = rng.random::<f64>() < 0.25;
                any_pi |= pi;
                let u = rng.random::<f64>();
                attributes.insert(ATTR_SENIOR.into(), AttrValue::Flag(senior));
                attributes.insert(ATTR_PI.into(), AttrValue::Flag(pi));
                attributes.insert(
                    ATTR_INDICATOR.into(),
                    AttrValue::Number(1.0 + (99.0 * u * u).floor()),
                );
                attributes.insert(
                    ATTR_CONTRIBUTION.into(),
                    AttrValue::Number(contribution_draws[pos] / contribution_total),
                );
            }
            authorships.push(
                Authorship::new(
                    author_name(a),
                    pos as u32 + 1,
                    vec![Affiliation::new(
                        institution_name(inst),
                        country_name(country_of_institution[inst]),
                    )],
                )
                .with_attributes(attributes),
            );
        }
        if spec.synthesize_attributes && !any_pi {
            authorships[0]
                .attributes
                .insert(ATTR_PI.into(), AttrValue::Flag(true));
        }

        let year = rng.random_range(spec.year_range.0..=spec.year_range.1);
        let citations = (-(1.0 - rng.random::<f64>()).ln() / 0.5).floor() as u64;
        pubs.push(
            Publication::new(
                format!("{prefix}p{index:0pub_width$}", pub_width = pub_width),
                year,
                authorships,
            )?
            .with_citations(Some(citations)),
        );
    }
    Ok(pubs)
}
