//! JSON-Lines publication I/O.
//!
//! One publication per line:
//!
//! ```json
//! {"id": "p1", "year": 2016,
//!  "authors": [{"name": "A", "rank": 1, "senior": true, "pi": true,
//!               "indicator": 12.0, "contribution": 0.5,
//!               "affiliations": [{"institution": "Y", "country": "dk"}]}],
//!  "citations": 3, "level_points": 1.0}
//! ```
//!
//! Unknown fields are ignored. Ranks are either given for every author (any
//! contiguous permutation of 1..n) or omitted everywhere (byline order).

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::{
    Affiliation, AttrValue, AttributeMap, Authorship, CorpusError, Publication, ATTR_CONTRIBUTION,
    ATTR_INDICATOR, ATTR_PI, ATTR_SENIOR,
};

#[derive(Debug, Serialize, Deserialize)]
struct RawAffiliation {
    institution: String,
    country: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawAuthor {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    senior: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pi: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    indicator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    contribution: Option<f64>,
    affiliations: Vec<RawAffiliation>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawPublication {
    id: String,
    year: i32,
    authors: Vec<RawAuthor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    citations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level_points: Option<f64>,
}

fn publication_from_raw(raw: RawPublication, line: usize) -> Result<Publication, CorpusError> {
    let n = raw.authors.len();
    let explicit = raw.authors.iter().filter(|a| a.rank.is_some()).count();
    if explicit != 0 && explicit != n {
        return Err(CorpusError::MixedRanks { id: raw.id });
    }
    let mut authorships = Vec::with_capacity(n);
    for (i, a) in raw.authors.into_iter().enumerate() {
        let rank = a.rank.unwrap_or(i as u32 + 1);
        let mut attributes = AttributeMap::new();
        if let Some(s) = a.senior {
            attributes.insert(ATTR_SENIOR.into(), AttrValue::Flag(s));
        }
        if let Some(p) = a.pi {
            attributes.insert(ATTR_PI.into(), AttrValue::Flag(p));
        }
        if let Some(x) = a.indicator {
            attributes.insert(ATTR_INDICATOR.into(), AttrValue::Number(x));
        }
        if let Some(x) = a.contribution {
            attributes.insert(ATTR_CONTRIBUTION.into(), AttrValue::Number(x));
        }
        authorships.push(
            Authorship::new(
                a.name,
                rank,
                a.affiliations
                    .into_iter()
                    .map(|aff| Affiliation::new(aff.institution, aff.country))
                    .collect(),
            )
            .with_attributes(attributes),
        );
    }
    Publication::new(raw.id, raw.year, authorships)
        .and_then(|p| {
            p.with_citations(raw.citations)
                .with_level_points(raw.level_points)
        })
        .map_err(|e| match e {
            // Keep the line number visible for anything a byline check rejects.
            CorpusError::Parse { .. } => e,
            other => CorpusError::Parse {
                line,
                message: other.to_string(),
            },
        })
}

fn raw_from_publication(p: &Publication) -> RawPublication {
    RawPublication {
        id: p.id().to_string(),
        year: p.year(),
        authors: p
            .authorships()
            .iter()
            .map(|a| RawAuthor {
                name: a.author.clone(),
                rank: Some(a.rank),
                senior: a.attributes.get(ATTR_SENIOR).and_then(AttrValue::as_flag),
                pi: a.attributes.get(ATTR_PI).and_then(AttrValue::as_flag),
                indicator: a
                    .attributes
                    .get(ATTR_INDICATOR)
                    .and_then(AttrValue::as_number),
                contribution: a
                    .attributes
                    .get(ATTR_CONTRIBUTION)
                    .and_then(AttrValue::as_number),
                affiliations: a
                    .affiliations
                    .iter()
                    .map(|aff| RawAffiliation {
                        institution: aff.institution.clone(),
                        country: aff.country.clone(),
                    })
                    .collect(),
            })
            .collect(),
        citations: p.citations(),
        level_points: p.level_points(),
    }
}

/// Reads JSON-Lines publications from a reader. Blank lines are skipped;
/// malformed lines and duplicate ids are reported with their line number.
pub fn read_publications<R: Read>(reader: R) -> Result<Vec<Publication>, CorpusError> {
    let mut pubs = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let text = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if text.trim().is_empty() {
            continue;
        }
        let raw: RawPublication = serde_json::from_str(&text).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId { id: raw.id });
        }
        pubs.push(publication_from_raw(raw, line_no)?);
    }
    Ok(pubs)
}

/// Parses JSON-Lines publications from a string.
pub fn parse_jsonl(text: &str) -> Result<Vec<Publication>, CorpusError> {
    read_publications(text.as_bytes())
}

/// Writes publications as JSON-Lines (ranks always explicit).
pub fn write_publications<W: Write>(
    mut writer: W,
    pubs: &[Publication],
) -> Result<(), CorpusError> {
    for p in pubs {
        let raw = raw_from_publication(p);
        let line = serde_json::to_string(&raw).map_err(|e| CorpusError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(writer, "{line}").map_err(|e| CorpusError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
    }
    Ok(())
}

/// Serializes publications to a JSON-Lines string.
pub fn publications_to_jsonl(pubs: &[Publication]) -> String {
    let mut buf = Vec::new();
    write_publications(&mut buf, pubs).expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = concat!(
        r#"{"id":"p1","year":2016,"authors":["#,
        r#"{"name":"A","affiliations":[{"institution":"Y","country":"dk"}]},"#,
        r#"{"name":"B","affiliations":[{"institution":"Y","country":"dk"}]},"#,
        r#"{"name":"C","affiliations":[{"institution":"Z","country":"dk"}]}]}"#,
    );

    #[test]
    fn parses_implicit_ranks_in_byline_order() {
        let pubs = parse_jsonl(WORKED).unwrap();
        assert_eq!(pubs.len(), 1);
        let ranks: Vec<_> = pubs[0].authorships().iter().map(|a| a.rank).collect();
        assert_eq!(ranks, [1, 2, 3]);
    }

    #[test]
    fn explicit_ranks_may_permute_the_byline() {
        let text = r#"{"id":"p","year":2020,"authors":[
            {"name":"B","rank":2,"affiliations":[{"institution":"X","country":"se"}]},
            {"name":"A","rank":1,"affiliations":[{"institution":"X","country":"se"}]}]}"#
            .replace('\n', "");
        let pubs = parse_jsonl(&text).unwrap();
        assert_eq!(pubs[0].authorships()[0].author, "A");
    }

    #[test]
    fn mixed_ranks_are_rejected() {
        let text = r#"{"id":"p","year":2020,"authors":[
            {"name":"A","rank":1,"affiliations":[{"institution":"X","country":"se"}]},
            {"name":"B","affiliations":[{"institution":"X","country":"se"}]}]}"#
            .replace('\n', "");
        assert!(matches!(
            parse_jsonl(&text),
            Err(CorpusError::MixedRanks { .. })
        ));
    }

    #[test]
    fn gapped_ranks_are_rejected_with_line_number() {
        let text = concat!(
            r#"{"id":"p0","year":2020,"authors":[{"name":"A","affiliations":[{"institution":"X","country":"se"}]}]}"#,
            "\n",
            r#"{"id":"p","year":2020,"authors":[{"name":"A","rank":1,"affiliations":[{"institution":"X","country":"se"}]},{"name":"B","rank":3,"affiliations":[{"institution":"X","country":"se"}]}]}"#,
        );
        match parse_jsonl(text) {
            Err(CorpusError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("contiguous"), "{message}");
            }
            other => panic!("expected a line-tagged parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = "\n{not json}";
        match parse_jsonl(text) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let two = format!("{WORKED}\n{WORKED}");
        assert!(matches!(
            parse_jsonl(&two),
            Err(CorpusError::DuplicateId { .. })
        ));
    }

    #[test]
    fn unknown_fields_are_ignored() {
        let text = r#"{"id":"p","year":2020,"doi":"10.1/x","authors":[{"name":"A","orcid":"0","affiliations":[{"institution":"X","country":"se","city":"lund"}]}]}"#;
        assert_eq!(parse_jsonl(text).unwrap().len(), 1);
    }

    #[test]
    fn attributes_round_trip() {
        let text = r#"{"id":"p","year":2020,"authors":[{"name":"A","senior":true,"pi":false,"indicator":12,"contribution":0.25,"affiliations":[{"institution":"X","country":"se"}]}],"citations":7,"level_points":3.0}"#;
        let pubs = parse_jsonl(text).unwrap();
        let again = parse_jsonl(&publications_to_jsonl(&pubs)).unwrap();
        assert_eq!(pubs, again);
        assert_eq!(again[0].citations(), Some(7));
        assert_eq!(again[0].level_points(), Some(3.0));
    }

    #[test]
    fn negative_indicator_is_rejected() {
        let text = r#"{"id":"p","year":2020,"authors":[{"name":"A","indicator":-1,"affiliations":[{"institution":"X","country":"se"}]}]}"#;
        assert!(parse_jsonl(text).is_err());
    }

    #[test]
    fn empty_byline_is_rejected() {
        let text = r#"{"id":"p","year":2020,"authors":[]}"#;
        match parse_jsonl(text) {
            Err(CorpusError::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("empty byline"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
