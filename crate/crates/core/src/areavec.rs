//! Category profiles of an area: the share of its venues in each top-level
//! category, or the share of its check-in mass.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{TransitionRecord, VenueRecord};
use crate::types::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    Venue,
    Checkin,
}

/// Which endpoint(s) of a transition receive its check-ins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribution {
    #[default]
    Both,
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryVector {
    pub zip: String,
    /// Indexed by [`Category::index`].
    pub values: [f64; Category::COUNT],
    pub kind: VectorKind,
}

impl CategoryVector {
    fn from_mass(zip: &str, mass: [f64; Category::COUNT], kind: VectorKind) -> Option<Self> {
        let total: f64 = mass.iter().sum();
        (total > 0.0).then(|| CategoryVector {
            zip: zip.to_string(),
            values: mass.map(|m| m / total),
            kind,
        })
    }

    pub fn get(&self, category: Category) -> f64 {
        self.values[category.index()]
    }
}

fn in_zip<'a>(venues: &'a [VenueRecord], zip: &'a str) -> impl Iterator<Item = &'a VenueRecord> {
    venues.iter().filter(move |v| v.zip.as_deref() == Some(zip))
}

pub fn venue_category_vector(venues: &[VenueRecord], zip: &str) -> Result<CategoryVector> {
    let mut mass = [0.0; Category::COUNT];
    for v in in_zip(venues, zip) {
        mass[v.category.index()] += 1.0;
    }
    CategoryVector::from_mass(zip, mass, VectorKind::Venue)
        .ok_or_else(|| Error::EmptyArea(zip.to_string()))
}

/// Check-ins attributed to each venue id.
pub fn venue_checkins(
    transitions: &[TransitionRecord],
    attribution: Attribution,
) -> HashMap<&str, u64> {
    let mut out: HashMap<&str, u64> = HashMap::new();
    for t in transitions {
        if matches!(attribution, Attribution::Both | Attribution::Start) {
            *out.entry(t.start_venue.as_str()).or_insert(0) += t.checkins;
        }
        if matches!(attribution, Attribution::Both | Attribution::End) {
            *out.entry(t.end_venue.as_str()).or_insert(0) += t.checkins;
        }
    }
    out
}

/// Check-in vector of `zip` from precomputed per-venue counts
/// (see [`venue_checkins`]).
pub fn checkin_vector_from(
    venues: &[VenueRecord],
    per_venue: &HashMap<&str, u64>,
    zip: &str,
) -> Result<CategoryVector> {
    let mut mass = [0.0; Category::COUNT];
    for v in in_zip(venues, zip) {
        mass[v.category.index()] += per_venue.get(v.venue_id.as_str()).copied().unwrap_or(0) as f64;
    }
    CategoryVector::from_mass(zip, mass, VectorKind::Checkin)
        .ok_or_else(|| Error::NoCheckinMass(zip.to_string()))
}

pub fn checkin_category_vector(
    venues: &[VenueRecord],
    transitions: &[TransitionRecord],
    zip: &str,
    attribution: Attribution,
) -> Result<CategoryVector> {
    checkin_vector_from(venues, &venue_checkins(transitions, attribution), zip)
}

/// One vector per kept zip, in lexicographic zip order.
pub fn category_matrix(
    venues: &[VenueRecord],
    transitions: &[TransitionRecord],
    kept: &BTreeSet<String>,
    kind: VectorKind,
    attribution: Attribution,
) -> Result<Vec<CategoryVector>> {
    if kept.is_empty() {
        return Err(Error::Empty("kept zip set".into()));
    }
    match kind {
        VectorKind::Venue => kept
            .iter()
            .map(|z| venue_category_vector(venues, z))
            .collect(),
        VectorKind::Checkin => {
            let per_venue = venue_checkins(transitions, attribution);
            kept.iter()
                .map(|z| checkin_vector_from(venues, &per_venue, z))
                .collect()
        }
    }
}

pub fn write_category_matrix<W: Write>(writer: W, vectors: &[CategoryVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header = std::iter::once("zip").chain(Category::ALL.iter().map(|c| c.label()));
    w.write_record(header)?;
    for v in vectors {
        let row = std::iter::once(v.zip.clone()).chain(v.values.iter().map(|x| x.to_string()));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_category_matrix<R: Read>(reader: R, kind: VectorKind) -> Result<Vec<CategoryVector>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("zip")
        .chain(Category::ALL.iter().map(|c| c.label()))
        .collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(
            1,
            "<header>",
            format!("expected `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != expected.len() {
            return Err(Error::parse(
                line,
                "<row>",
                format!("expected {} fields", expected.len()),
            ));
        }
        let mut values = [0.0; Category::COUNT];
        for (k, slot) in values.iter_mut().enumerate() {
            let raw = &rec[k + 1];
            *slot = raw
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| Error::parse(line, expected[k + 1], format!("bad share {raw:?}")))?;
        }
        out.push(CategoryVector {
            zip: rec[0].to_string(),
            values,
            kind,
        });
    }
    Ok(out)
}
