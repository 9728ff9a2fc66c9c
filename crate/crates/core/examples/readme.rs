// The README walkthrough: parse one publication, score it at the
// institution level, and classify the straight score function.

use std::collections::BTreeMap;

use bibcount::aggregate::{object_scores, CountingMethod};
use bibcount::classify::{classify, ClassifyOptions};
use bibcount::corpus::{parse_jsonl, AttributionMap, EntityLevel};
use bibcount::registry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let line = concat!(
        r#"{"id": "p1", "year": 2016, "authors": ["#,
        r#"{"name": "A", "affiliations": [{"institution": "Y", "country": "dk"}]}, "#,
        r#"{"name": "B", "affiliations": [{"institution": "Z", "country": "dk"}]}]}"#,
    );
    let pubs = parse_jsonl(line)?;

    let method = CountingMethod::new(
        registry::build("complete-fractionalized")?,
        EntityLevel::Author,
        EntityLevel::Institution,
    )?;
    let attr = AttributionMap::derive(
        &pubs,
        EntityLevel::Author,
        EntityLevel::Institution,
        BTreeMap::new(),
    )?;
    let table = object_scores(&method, &pubs, &attr)?;
    assert_eq!(table.score_of("Y"), Some(0.5));

    let report = classify(&registry::build("straight")?, &ClassifyOptions::default())?;
    println!("{report}");
    Ok(())
}
