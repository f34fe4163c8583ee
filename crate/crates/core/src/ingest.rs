//! Venue metadata and transition logs: parsing, zip resolution, the
//! sparse-zip filter and aggregation of venue-level movements to zip level.
//!
//! All readers accept leading or interleaved `#` comment lines, which is
//! where the CLI stores run metadata.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Category, Period, YearMonth};

pub const VENUE_HEADER: [&str; 5] = ["venue_id", "name", "lat", "lon", "category"];
pub const TRANSITION_HEADER: [&str; 5] = [
    "start_venue",
    "end_venue",
    "year_month",
    "period",
    "checkins",
];
pub const ZIPMAP_HEADER: [&str; 2] = ["venue_id", "zip"];
pub const ZIP_TRANSITION_HEADER: [&str; 5] =
    ["start_zip", "end_zip", "year_month", "period", "checkins"];
pub const ZIP_COUNT_HEADER: [&str; 2] = ["zip", "venues"];

/// Zips with fewer venues than this are dropped by default.
pub const DEFAULT_MIN_VENUES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct VenueRecord {
    pub venue_id: String,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub category: Category,
    pub zip: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionRecord {
    pub start_venue: String,
    pub end_venue: String,
    pub year_month: YearMonth,
    pub period: Period,
    pub checkins: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZipTransition {
    pub start_zip: String,
    pub end_zip: String,
    pub year_month: YearMonth,
    pub period: Period,
    pub checkins: u64,
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::None)
        .from_reader(reader)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let line = rdr.position().line().max(1);
    let header = rdr.headers()?.clone();
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(Error::parse(
            line,
            "<header>",
            format!(
                "expected `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

/// Iterates the data rows of a header-first CSV stream, handing each row and
/// its 1-based line number to `f`.
fn for_each_row<R, F>(reader: R, header: &[&str], mut f: F) -> Result<()>
where
    R: Read,
    F: FnMut(u64, &csv::StringRecord) -> Result<()>,
{
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, header)?;
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::parse(
                line,
                "<row>",
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        f(line, &record)?;
    }
    Ok(())
}

fn field<'a>(record: &'a csv::StringRecord, idx: usize, line: u64, name: &str) -> Result<&'a str> {
    let value = &record[idx];
    if value.is_empty() {
        return Err(Error::parse(line, name, "empty value"));
    }
    Ok(value)
}

fn parse_coord(value: &str, line: u64, name: &str, limit: f64) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, name, format!("not a decimal number: {value:?}")))?;
    if !v.is_finite() || v.abs() > limit {
        return Err(Error::parse(
            line,
            name,
            format!("{v} outside [-{limit}, {limit}]"),
        ));
    }
    Ok(v)
}

pub fn parse_venues<R: Read>(reader: R) -> Result<Vec<VenueRecord>> {
    let mut venues = Vec::new();
    let mut seen = BTreeSet::new();
    for_each_row(reader, &VENUE_HEADER, |line, rec| {
        let venue_id = field(rec, 0, line, "venue_id")?.to_string();
        let category = rec[4].parse::<Category>().map_err(|e| match e {
            Error::UnknownCategory { label, valid } => Error::parse(
                line,
                "category",
                format!("unknown top-level category {label:?}; valid labels are: {valid}"),
            ),
            other => other,
        })?;
        if !seen.insert(venue_id.clone()) {
            return Err(Error::parse(
                line,
                "venue_id",
                format!("duplicate venue_id {venue_id:?}"),
            ));
        }
        venues.push(VenueRecord {
            venue_id,
            name: rec[1].to_string(),
            lat: parse_coord(&rec[2], line, "lat", 90.0)?,
            lon: parse_coord(&rec[3], line, "lon", 180.0)?,
            category,
            zip: None,
        });
        Ok(())
    })?;
    Ok(venues)
}

pub fn write_venues<W: Write>(writer: W, venues: &[VenueRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(VENUE_HEADER)?;
    for v in venues {
        w.write_record([
            v.venue_id.as_str(),
            v.name.as_str(),
            &v.lat.to_string(),
            &v.lon.to_string(),
            v.category.label(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_checkins(value: &str, line: u64, name: &str) -> Result<u64> {
    let c: u64 = value
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, name, format!("not a positive integer: {value:?}")))?;
    if c == 0 {
        return Err(Error::parse(line, name, "checkins must be >= 1"));
    }
    Ok(c)
}

fn parse_year_month(value: &str, line: u64) -> Result<YearMonth> {
    value
        .parse()
        .map_err(|e: Error| Error::parse(line, "year_month", e.to_string()))
}

fn parse_period(value: &str, line: u64) -> Result<Period> {
    value
        .parse()
        .map_err(|e: Error| Error::parse(line, "period", e.to_string()))
}

pub fn parse_transitions<R: Read>(reader: R) -> Result<Vec<TransitionRecord>> {
    let mut out = Vec::new();
    for_each_row(reader, &TRANSITION_HEADER, |line, rec| {
        out.push(TransitionRecord {
            start_venue: field(rec, 0, line, "start_venue")?.to_string(),
            end_venue: field(rec, 1, line, "end_venue")?.to_string(),
            year_month: parse_year_month(&rec[2], line)?,
            period: parse_period(&rec[3], line)?,
            checkins: parse_checkins(&rec[4], line, "checkins")?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_transitions<W: Write>(writer: W, transitions: &[TransitionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRANSITION_HEADER)?;
    for t in transitions {
        w.write_record([
            t.start_venue.as_str(),
            t.end_venue.as_str(),
            &t.year_month.to_string(),
            t.period.as_str(),
            &t.checkins.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_zip_transitions<R: Read>(reader: R) -> Result<Vec<ZipTransition>> {
    let mut out = Vec::new();
    for_each_row(reader, &ZIP_TRANSITION_HEADER, |line, rec| {
        out.push(ZipTransition {
            start_zip: field(rec, 0, line, "start_zip")?.to_string(),
            end_zip: field(rec, 1, line, "end_zip")?.to_string(),
            year_month: parse_year_month(&rec[2], line)?,
            period: parse_period(&rec[3], line)?,
            checkins: parse_checkins(&rec[4], line, "checkins")?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_zip_transitions<W: Write>(writer: W, transitions: &[ZipTransition]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ZIP_TRANSITION_HEADER)?;
    for t in transitions {
        w.write_record([
            t.start_zip.as_str(),
            t.end_zip.as_str(),
            &t.year_month.to_string(),
            t.period.as_str(),
            &t.checkins.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Kept zips with their venue counts (`zip,venues`).
pub fn parse_zip_counts<R: Read>(reader: R) -> Result<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for_each_row(reader, &ZIP_COUNT_HEADER, |line, rec| {
        let zip = field(rec, 0, line, "zip")?.to_string();
        let count = rec[1]
            .parse()
            .map_err(|_| Error::parse(line, "venues", format!("not an integer: {:?}", &rec[1])))?;
        if out.insert(zip.clone(), count).is_some() {
            return Err(Error::parse(line, "zip", format!("duplicate zip {zip:?}")));
        }
        Ok(())
    })?;
    Ok(out)
}

pub fn write_zip_counts<W: Write>(writer: W, counts: &BTreeMap<String, usize>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ZIP_COUNT_HEADER)?;
    for (zip, n) in counts {
        w.write_record([zip.as_str(), &n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Resolves a venue to its zip code. The offline [`ZipMap`] is the only
/// implementation shipped; a geocoding client can slot in behind this trait.
pub trait ZipResolver {
    fn resolve(&self, venue: &VenueRecord) -> Option<String>;
}

/// Offline venue_id -> zip table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ZipMap(pub BTreeMap<String, String>);

impl ZipMap {
    pub fn parse<R: Read>(reader: R) -> Result<ZipMap> {
        let mut map = BTreeMap::new();
        for_each_row(reader, &ZIPMAP_HEADER, |line, rec| {
            let id = field(rec, 0, line, "venue_id")?.to_string();
            let zip = field(rec, 1, line, "zip")?.to_string();
            if map.insert(id.clone(), zip).is_some() {
                return Err(Error::parse(
                    line,
                    "venue_id",
                    format!("duplicate venue_id {id:?}"),
                ));
            }
            Ok(())
        })?;
        Ok(ZipMap(map))
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(ZIPMAP_HEADER)?;
        for (id, zip) in &self.0 {
            w.write_record([id, zip])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl ZipResolver for ZipMap {
    fn resolve(&self, venue: &VenueRecord) -> Option<String> {
        self.0.get(&venue.venue_id).cloned()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnresolvedPolicy {
    /// Drop venues without a zip and log a warning.
    #[default]
    Drop,
    /// Fail if any venue cannot be resolved.
    Strict,
}

#[derive(Debug, Clone, Default)]
pub struct Resolution {
    /// Venues with `zip` set, in input order.
    pub venues: Vec<VenueRecord>,
    /// Ids of venues the resolver could not place.
    pub unresolved: Vec<String>,
}

pub fn resolve_zips<Z: ZipResolver + ?Sized>(
    venues: &[VenueRecord],
    resolver: &Z,
    policy: UnresolvedPolicy,
) -> Result<Resolution> {
    let mut res = Resolution::default();
    for v in venues {
        match resolver.resolve(v) {
            Some(zip) => res.venues.push(VenueRecord {
                zip: Some(zip),
                ..v.clone()
            }),
            None => res.unresolved.push(v.venue_id.clone()),
        }
    }
    if !res.unresolved.is_empty() {
        if policy == UnresolvedPolicy::Strict {
            return Err(Error::UnresolvedVenues(res.unresolved));
        }
        warn!(
            "dropping {} venue(s) without a zip code",
            res.unresolved.len()
        );
    }
    Ok(res)
}

/// Number of venues per zip over resolved venues.
pub fn zip_venue_counts(venues: &[VenueRecord]) -> Result<BTreeMap<String, usize>> {
    let mut counts = BTreeMap::new();
    for v in venues {
        let zip = v.zip.as_ref().ok_or_else(|| {
            Error::Parameter(format!(
                "venue {:?} has not been resolved to a zip",
                v.venue_id
            ))
        })?;
        *counts.entry(zip.clone()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Zips hosting at least `min_venues` venues.
pub fn filter_sparse_zips(venues: &[VenueRecord], min_venues: usize) -> Result<BTreeSet<String>> {
    if min_venues < 1 {
        return Err(Error::Parameter("min_venues must be >= 1".into()));
    }
    Ok(zip_venue_counts(venues)?
        .into_iter()
        .filter(|&(_, n)| n >= min_venues)
        .map(|(zip, _)| zip)
        .collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateOptions {
    /// Discard intra-zip movements (start zip == end zip).
    pub drop_self_loops: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Aggregation {
    /// Sorted by (start_zip, end_zip, year_month, period).
    pub transitions: Vec<ZipTransition>,
    pub dropped_transitions: u64,
    pub dropped_checkins: u64,
}

/// Sums venue-level transitions into zip-level ones. Transitions touching an
/// unresolved venue, a filtered-out zip, or (optionally) staying within one
/// zip are dropped and counted.
pub fn aggregate_to_zip(
    transitions: &[TransitionRecord],
    resolution: &Resolution,
    kept: &BTreeSet<String>,
    opts: AggregateOptions,
) -> Result<Aggregation> {
    let zip_of: HashMap<&str, &str> = resolution
        .venues
        .iter()
        .filter_map(|v| v.zip.as_deref().map(|z| (v.venue_id.as_str(), z)))
        .collect();
    let unresolved: BTreeSet<&str> = resolution.unresolved.iter().map(String::as_str).collect();
    let lookup = |id: &str| -> Result<Option<&str>> {
        match zip_of.get(id) {
            Some(z) => Ok(Some(*z)),
            None if unresolved.contains(id) => Ok(None),
            None => Err(Error::UnknownVenue(id.to_string())),
        }
    };

    let mut sums: BTreeMap<(&str, &str, YearMonth, Period), u64> = BTreeMap::new();
    let mut agg = Aggregation::default();
    for t in transitions {
        let start = lookup(&t.start_venue)?;
        let end = lookup(&t.end_venue)?;
        let keep = match (start, end) {
            (Some(s), Some(e)) => {
                kept.contains(s) && kept.contains(e) && !(opts.drop_self_loops && s == e)
            }
            _ => false,
        };
        if keep {
            let key = (start.unwrap(), end.unwrap(), t.year_month, t.period);
            *sums.entry(key).or_insert(0) += t.checkins;
        } else {
            agg.dropped_transitions += 1;
            agg.dropped_checkins += t.checkins;
        }
    }
    agg.transitions = sums
        .into_iter()
        .map(|((s, e, ym, p), checkins)| ZipTransition {
            start_zip: s.to_string(),
            end_zip: e.to_string(),
            year_month: ym,
            period: p,
            checkins,
        })
        .collect();
    Ok(agg)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub venues_read: u64,
    pub venues_unresolved: u64,
    pub zips_total: u64,
    pub zips_kept: u64,
    pub transitions_read: u64,
    pub checkins_total: u64,
    pub checkins_dropped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub min_venues: usize,
    pub policy: UnresolvedPolicy,
    pub aggregate: AggregateOptions,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            min_venues: DEFAULT_MIN_VENUES,
            policy: UnresolvedPolicy::Drop,
            aggregate: AggregateOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub resolution: Resolution,
    /// Venue counts of the kept zips only.
    pub kept_counts: BTreeMap<String, usize>,
    pub aggregation: Aggregation,
    pub report: IngestReport,
}

impl IngestOutput {
    pub fn kept(&self) -> BTreeSet<String> {
        self.kept_counts.keys().cloned().collect()
    }

    /// Resolved venues located in kept zips.
    pub fn kept_venues(&self) -> Vec<VenueRecord> {
        self.resolution
            .venues
            .iter()
            .filter(|v| {
                v.zip
                    .as_ref()
                    .is_some_and(|z| self.kept_counts.contains_key(z))
            })
            .cloned()
            .collect()
    }
}

/// Resolve, filter and aggregate in one pass, producing the ingest report.
pub fn ingest<Z: ZipResolver + ?Sized>(
    venues: &[VenueRecord],
    transitions: &[TransitionRecord],
    resolver: &Z,
    opts: IngestOptions,
) -> Result<IngestOutput> {
    let resolution = resolve_zips(venues, resolver, opts.policy)?;
    let counts = zip_venue_counts(&resolution.venues)?;
    let kept = filter_sparse_zips(&resolution.venues, opts.min_venues)?;
    let aggregation = aggregate_to_zip(transitions, &resolution, &kept, opts.aggregate)?;
    let report = IngestReport {
        venues_read: venues.len() as u64,
        venues_unresolved: resolution.unresolved.len() as u64,
        zips_total: counts.len() as u64,
        zips_kept: kept.len() as u64,
        transitions_read: transitions.len() as u64,
        checkins_total: transitions.iter().map(|t| t.checkins).sum(),
        checkins_dropped: aggregation.dropped_checkins,
    };
    let kept_counts = counts
        .into_iter()
        .filter(|(z, _)| kept.contains(z))
        .collect();
    Ok(IngestOutput {
        resolution,
        kept_counts,
        aggregation,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const VENUES: &str = "venue_id,name,lat,lon,category\n\
        v1,Joe's,40.71,-74.00,Food\n\
        v2,\"Bar, The\",40.72,-74.01,Nightlife Spot\n";

    fn venue(id: &str, zip: &str, category: Category) -> VenueRecord {
        VenueRecord {
            venue_id: id.into(),
            name: id.into(),
            lat: 0.0,
            lon: 0.0,
            category,
            zip: Some(zip.into()),
        }
    }

    fn transition(s: &str, e: &str, checkins: u64) -> TransitionRecord {
        TransitionRecord {
            start_venue: s.into(),
            end_venue: e.into(),
            year_month: YearMonth::new(2018, 1).unwrap(),
            period: Period::Morning,
            checkins,
        }
    }

    #[test]
    fn parses_venue_rows() {
        let venues = parse_venues(VENUES.as_bytes()).unwrap();
        assert_eq!(venues.len(), 2);
        assert_eq!(venues[0].venue_id, "v1");
        assert_eq!(venues[0].name, "Joe's");
        assert_eq!(venues[0].category, Category::Food);
        assert_eq!(venues[0].lon, -74.0);
        assert_eq!(venues[1].name, "Bar, The");
    }

    #[test]
    fn unknown_category_is_rejected_with_line() {
        let src = "venue_id,name,lat,lon,category\nv1,x,1,2,Food\nv2,y,1,2,Pizza\n";
        let err = parse_venues(src.as_bytes()).unwrap_err();
        match &err {
            Error::Parse {
                line,
                field,
                message,
            } => {
                assert_eq!(*line, 3);
                assert_eq!(field, "category");
                assert!(message.contains("unknown top-level category"));
                assert!(message.contains("Shop & Service"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_only_is_empty() {
        let venues = parse_venues("venue_id,name,lat,lon,category\n".as_bytes()).unwrap();
        assert!(venues.is_empty());
    }

    #[test]
    fn malformed_rows_name_line_and_field() {
        let src = "venue_id,name,lat,lon,category\nv1,x,abc,2,Food\n";
        assert!(matches!(
            parse_venues(src.as_bytes()),
            Err(Error::Parse { line: 2, ref field, .. }) if field == "lat"
        ));
        let src = "venue_id,name,lat,lon,category\nv1,x,95,2,Food\n";
        assert!(matches!(
            parse_venues(src.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        let src = "venue_id,name,lat,lon\nv1,x,95,2\n";
        assert!(matches!(
            parse_venues(src.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let src = "start_venue,end_venue,year_month,period,checkins\na,b,2018-01,morning,0\n";
        assert!(matches!(
            parse_transitions(src.as_bytes()),
            Err(Error::Parse { line: 2, ref field, .. }) if field == "checkins"
        ));
        let src = "start_venue,end_venue,year_month,period,checkins\na,b,2018-01,Morning,1\n";
        assert!(matches!(
            parse_transitions(src.as_bytes()),
            Err(Error::Parse { line: 2, ref field, .. }) if field == "period"
        ));
    }

    #[test]
    fn duplicate_venue_ids_are_rejected() {
        let src = "venue_id,name,lat,lon,category\nv1,x,1,2,Food\nv1,y,1,2,Food\n";
        assert!(matches!(
            parse_venues(src.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn comment_lines_are_skipped() {
        let src = format!("# meta\n{VENUES}");
        assert_eq!(parse_venues(src.as_bytes()).unwrap().len(), 2);
    }

    #[test]
    fn resolve_policies() {
        let venues = parse_venues(VENUES.as_bytes()).unwrap();
        let map = ZipMap([("v1".to_string(), "10002".to_string())].into());
        let res = resolve_zips(&venues, &map, UnresolvedPolicy::Drop).unwrap();
        assert_eq!(res.venues.len(), 1);
        assert_eq!(res.venues[0].zip.as_deref(), Some("10002"));
        assert_eq!(res.unresolved, vec!["v2".to_string()]);

        match resolve_zips(&venues, &map, UnresolvedPolicy::Strict) {
            Err(Error::UnresolvedVenues(ids)) => assert_eq!(ids, vec!["v2".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Brute-force count of venues per zip, independent of `zip_venue_counts`.
    fn brute_force_kept(venues: &[VenueRecord], min: usize) -> BTreeSet<String> {
        let zips: BTreeSet<String> = venues.iter().map(|v| v.zip.clone().unwrap()).collect();
        zips.into_iter()
            .filter(|z| venues.iter().filter(|v| v.zip.as_ref() == Some(z)).count() >= min)
            .collect()
    }

    #[test]
    fn sparse_zip_threshold() {
        let mut venues = Vec::new();
        for (zip, n) in [("A", 12), ("B", 9), ("C", 10)] {
            for i in 0..n {
                venues.push(venue(&format!("{zip}{i}"), zip, Category::Food));
            }
        }
        let kept = filter_sparse_zips(&venues, 10).unwrap();
        assert_eq!(kept, brute_force_kept(&venues, 10));
        assert_eq!(kept, ["A", "C"].iter().map(|s| s.to_string()).collect());
        assert_eq!(filter_sparse_zips(&venues, 1).unwrap().len(), 3);
        assert!(filter_sparse_zips(&venues, 0).is_err());
    }

    #[test]
    fn aggregation_sums_by_zip_key() {
        let venues = vec![
            venue("v1", "A", Category::Food),
            venue("v2", "B", Category::Food),
            venue("v3", "A", Category::Food),
            venue("v4", "B", Category::Food),
            venue("v5", "C", Category::Food),
        ];
        let res = Resolution {
            venues,
            unresolved: vec!["v9".into()],
        };
        let kept: BTreeSet<String> = ["A".to_string(), "B".to_string()].into();
        let ts = vec![
            transition("v1", "v2", 3),
            transition("v3", "v4", 2),
            transition("v1", "v5", 4),
            transition("v9", "v1", 1),
        ];
        let agg = aggregate_to_zip(&ts, &res, &kept, AggregateOptions::default()).unwrap();
        assert_eq!(agg.transitions.len(), 1);
        assert_eq!(agg.transitions[0].start_zip, "A");
        assert_eq!(agg.transitions[0].end_zip, "B");
        assert_eq!(agg.transitions[0].checkins, 5);
        assert_eq!(agg.dropped_checkins, 5);
        assert_eq!(agg.dropped_transitions, 2);

        let empty = aggregate_to_zip(&[], &res, &kept, AggregateOptions::default()).unwrap();
        assert!(empty.transitions.is_empty());

        let err = aggregate_to_zip(
            &[transition("v1", "nope", 1)],
            &res,
            &kept,
            Default::default(),
        );
        assert!(matches!(err, Err(Error::UnknownVenue(id)) if id == "nope"));
    }

    #[test]
    fn self_loops_kept_unless_dropped() {
        let res = Resolution {
            venues: vec![
                venue("v1", "A", Category::Food),
                venue("v2", "A", Category::Food),
            ],
            unresolved: vec![],
        };
        let kept: BTreeSet<String> = ["A".to_string()].into();
        let ts = vec![transition("v1", "v2", 4)];
        let agg = aggregate_to_zip(&ts, &res, &kept, AggregateOptions::default()).unwrap();
        assert_eq!(agg.transitions[0].checkins, 4);
        let agg = aggregate_to_zip(
            &ts,
            &res,
            &kept,
            AggregateOptions {
                drop_self_loops: true,
            },
        )
        .unwrap();
        assert!(agg.transitions.is_empty());
        assert_eq!(agg.dropped_checkins, 4);
    }
}
