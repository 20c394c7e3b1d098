//! Corpus filters. Both are pure partitions of their input: every record
//! comes back out exactly once, unmodified, in input order.

use std::collections::HashMap;

use super::{PaperRecord, YearMonth};

/// Drop whole (venue, retraction year-month) clusters larger than
/// `cluster_threshold` — mass-retraction events such as a conference
/// pulling its entire proceedings. Records without a retraction date never
/// cluster and are always kept.
pub fn filter_bulk_retractions(
    records: &[PaperRecord],
    cluster_threshold: usize,
) -> (Vec<PaperRecord>, Vec<PaperRecord>) {
    let mut cluster_sizes: HashMap<(&str, YearMonth), usize> = HashMap::new();
    for r in records {
        if let Some(rd) = r.retraction_date {
            *cluster_sizes.entry((r.venue.as_str(), rd)).or_insert(0) += 1;
        }
    }
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for r in records {
        let bulk = r
            .retraction_date
            .map(|rd| cluster_sizes[&(r.venue.as_str(), rd)] > cluster_threshold)
            .unwrap_or(false);
        if bulk {
            removed.push(r.clone());
        } else {
            kept.push(r.clone());
        }
    }
    (kept, removed)
}

/// Retain records retracted in `first_year..=last_year`; unretracted
/// records are excluded by definition.
pub fn filter_retraction_window(
    records: &[PaperRecord],
    first_year: i32,
    last_year: i32,
) -> Vec<PaperRecord> {
    assert!(
        first_year <= last_year,
        "retraction window [{first_year}, {last_year}] is inverted"
    );
    records
        .iter()
        .filter(|r| {
            r.retraction_date
                .map(|rd| (first_year..=last_year).contains(&rd.year))
                .unwrap_or(false)
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn record(id: &str, venue: &str, retraction: Option<(i32, u8)>) -> PaperRecord {
        PaperRecord {
            paper_id: id.into(),
            doi: None,
            title: format!("title {id}"),
            pub_year: 1980,
            venue: venue.into(),
            discipline: "d".into(),
            retraction_date: retraction.map(|(y, m)| YearMonth::new(y, m).unwrap()),
            retraction_reason: None,
            n_authors: None,
            journal_rank: None,
            subject_area: None,
            citations_by_year: BTreeMap::new(),
        }
    }

    #[test]
    fn oversize_cluster_removed_in_full() {
        let mut records: Vec<PaperRecord> = (0..1200)
            .map(|i| record(&format!("bulk{i}"), "MegaConf", Some((2010, 3))))
            .collect();
        records.push(record("solo", "Journal X", Some((2010, 3))));
        let (kept, removed) = filter_bulk_retractions(&records, 50);
        assert_eq!(removed.len(), 1200);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].paper_id, "solo");
    }

    #[test]
    fn threshold_is_strictly_exceeded() {
        // 51 in one cluster, 49 in another: only the 51-cluster goes.
        let mut records = Vec::new();
        for i in 0..51 {
            records.push(record(&format!("a{i}"), "VenueA", Some((2001, 5))));
        }
        for i in 0..49 {
            records.push(record(&format!("b{i}"), "VenueB", Some((2001, 5))));
        }
        let (kept, removed) = filter_bulk_retractions(&records, 50);
        assert_eq!(removed.len(), 51);
        assert!(removed.iter().all(|r| r.venue == "VenueA"));
        assert_eq!(kept.len(), 49);
    }

    #[test]
    fn same_venue_different_months_are_separate_clusters() {
        let mut records = Vec::new();
        for i in 0..30 {
            records.push(record(&format!("m1-{i}"), "V", Some((2001, 1))));
            records.push(record(&format!("m2-{i}"), "V", Some((2001, 2))));
        }
        let (kept, removed) = filter_bulk_retractions(&records, 30);
        assert!(removed.is_empty());
        assert_eq!(kept.len(), 60);
    }

    #[test]
    fn filters_partition_and_preserve_order() {
        let records = vec![
            record("a", "V1", Some((2000, 1))),
            record("b", "V2", None),
            record("c", "V1", Some((2000, 1))),
            record("d", "V3", Some((2005, 7))),
        ];
        let (kept, removed) = filter_bulk_retractions(&records, 1);
        let mut reunited = kept.clone();
        reunited.extend(removed.clone());
        reunited.sort_by(|x, y| x.paper_id.cmp(&y.paper_id));
        let mut original = records.clone();
        original.sort_by(|x, y| x.paper_id.cmp(&y.paper_id));
        assert_eq!(reunited, original);
        assert_eq!(
            kept.iter().map(|r| r.paper_id.as_str()).collect::<Vec<_>>(),
            ["b", "d"]
        );
        assert_eq!(
            removed.iter().map(|r| r.paper_id.as_str()).collect::<Vec<_>>(),
            ["a", "c"]
        );
    }

    #[test]
    fn no_retraction_date_is_never_bulk() {
        let records = vec![record("x", "V", None), record("y", "V", None)];
        let (kept, removed) = filter_bulk_retractions(&records, 0);
        assert_eq!(kept.len(), 2);
        assert!(removed.is_empty());
    }

    #[test]
    fn window_bounds_are_inclusive_and_require_retraction() {
        let records = vec![
            record("early", "V", Some((1989, 12))),
            record("first", "V", Some((1990, 1))),
            record("last", "V", Some((2015, 12))),
            record("late", "V", Some((2016, 1))),
            record("never", "V", None),
        ];
        let kept = filter_retraction_window(&records, 1990, 2015);
        let ids: Vec<&str> = kept.iter().map(|r| r.paper_id.as_str()).collect();
        assert_eq!(ids, ["first", "last"]);
    }

    #[test]
    #[should_panic(expected = "inverted")]
    fn inverted_window_panics() {
        let _ = filter_retraction_window(&[], 2000, 1990);
    }
}
