//! Synthetic cities with planted community structure, used in place of real
//! check-in data for end-to-end verification.
//!
//! Zips are split into contiguous communities. Movements stay inside the
//! source zip's community with probability `intra_community_prob`; venue
//! categories follow a per-community profile blended with the uniform
//! distribution by `category_coupling`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Gamma, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{write_transitions, write_venues, TransitionRecord, VenueRecord, ZipMap};
use crate::types::{Category, Period, YearMonth};

pub const VENUES_FILE: &str = "venues.csv";
pub const TRANSITIONS_FILE: &str = "transitions.csv";
pub const ZIPMAP_FILE: &str = "zipmap.csv";
pub const COMMUNITIES_FILE: &str = "communities.csv";

/// Dirichlet concentration of the per-community category profiles.
const PROFILE_CONCENTRATION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_zips: usize,
    pub n_communities: usize,
    /// Inclusive range of venues per zip.
    pub venues_per_zip: (usize, usize),
    pub intra_community_prob: f64,
    pub category_coupling: f64,
    /// Mean of the geometric check-in count distribution (support >= 1).
    pub checkin_mean: f64,
    pub periods_active: Vec<Period>,
    /// Raw transitions drawn per active period, before duplicate merging.
    pub transitions_per_period: usize,
    /// Months spanned, starting at `start_month`.
    pub months: u32,
    pub start_month: YearMonth,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_zips: 40,
            n_communities: 4,
            venues_per_zip: (10, 20),
            intra_community_prob: 0.9,
            category_coupling: 0.5,
            checkin_mean: 1.6,
            periods_active: Period::ALL.to_vec(),
            transitions_per_period: 3000,
            months: 12,
            start_month: YearMonth {
                year: 2018,
                month: 1,
            },
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let (lo, hi) = self.venues_per_zip;
        let checks = [
            (self.n_zips >= 1, "n_zips must be >= 1"),
            (self.n_zips <= 89_999, "n_zips must be <= 89999"),
            (
                self.n_communities >= 1 && self.n_communities <= self.n_zips,
                "n_communities must lie in [1, n_zips]",
            ),
            (
                lo >= 1 && lo <= hi,
                "venues_per_zip must be a non-empty range with minimum >= 1",
            ),
            (
                unit(self.intra_community_prob),
                "intra_community_prob must lie in [0, 1]",
            ),
            (
                unit(self.category_coupling),
                "category_coupling must lie in [0, 1]",
            ),
            (
                self.checkin_mean.is_finite() && self.checkin_mean >= 1.0,
                "checkin_mean must be >= 1",
            ),
            (
                !self.periods_active.is_empty(),
                "periods_active must not be empty",
            ),
            (self.months >= 1, "months must be >= 1"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Parameter(msg.to_string())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCity {
    pub venues: Vec<VenueRecord>,
    pub transitions: Vec<TransitionRecord>,
    pub zipmap: ZipMap,
    pub communities: BTreeMap<String, usize>,
}

pub fn zip_name(index: usize) -> String {
    format!("{}", 10_001 + index)
}

pub fn generate_city(cfg: &SynthConfig) -> Result<SynthCity> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_zips;
    let community_of: Vec<usize> = (0..n).map(|i| i * cfg.n_communities / n).collect();
    let members: Vec<Vec<usize>> = (0..cfg.n_communities)
        .map(|c| (0..n).filter(|&i| community_of[i] == c).collect())
        .collect();

    let gamma = Gamma::new(PROFILE_CONCENTRATION, 1.0).expect("valid gamma");
    let profiles: Vec<[f64; Category::COUNT]> = (0..cfg.n_communities)
        .map(|_| {
            let draws: [f64; Category::COUNT] =
                std::array::from_fn(|_| gamma.sample(&mut rng) + 1e-12);
            let total: f64 = draws.iter().sum();
            draws.map(|x| x / total)
        })
        .collect();
    let uniform = 1.0 / Category::COUNT as f64;
    let category_dists: Vec<WeightedIndex<f64>> = profiles
        .iter()
        .map(|p| {
            let mix =
                p.map(|x| cfg.category_coupling * x + (1.0 - cfg.category_coupling) * uniform);
            WeightedIndex::new(mix).expect("mixture has positive mass")
        })
        .collect();

    let side = (n as f64).sqrt().ceil() as usize;
    let mut venues = Vec::new();
    let mut zip_venues: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut zipmap = BTreeMap::new();
    for z in 0..n {
        let zip = zip_name(z);
        let count = rng.random_range(cfg.venues_per_zip.0..=cfg.venues_per_zip.1);
        let (row, col) = (z / side, z % side);
        for j in 0..count {
            let id = format!("v{zip}-{j:03}");
            let category = Category::ALL[category_dists[community_of[z]].sample(&mut rng)];
            zip_venues[z].push(venues.len());
            zipmap.insert(id.clone(), zip.clone());
            venues.push(VenueRecord {
                venue_id: id,
                name: format!("{} {zip}-{j}", category.label()),
                lat: 40.0 + row as f64 * 0.01 + j as f64 * 1e-5,
                lon: -74.0 + col as f64 * 0.01,
                category,
                zip: None,
            });
        }
    }

    let geometric = Geometric::new(1.0 / cfg.checkin_mean)
        .map_err(|e| Error::Parameter(format!("checkin_mean: {e}")))?;
    let mut merged: BTreeMap<(usize, usize, YearMonth, Period), u64> = BTreeMap::new();
    for &period in &cfg.periods_active {
        for _ in 0..cfg.transitions_per_period {
            let src = rng.random_range(0..n);
            let own = &members[community_of[src]];
            let stay = rng.random_bool(cfg.intra_community_prob) || own.len() == n;
            let dst = if stay {
                own[rng.random_range(0..own.len())]
            } else {
                // uniform over zips outside the source community
                let mut k = rng.random_range(0..n - own.len());
                if k >= own[0] {
                    k += own.len();
                }
                k
            };
            let sv = zip_venues[src][rng.random_range(0..zip_venues[src].len())];
            let dv = zip_venues[dst][rng.random_range(0..zip_venues[dst].len())];
            let ym = cfg.start_month.plus_months(rng.random_range(0..cfg.months));
            let checkins = geometric.sample(&mut rng) + 1;
            *merged.entry((sv, dv, ym, period)).or_insert(0) += checkins;
        }
    }
    let transitions = merged
        .into_iter()
        .map(|((s, e, ym, period), checkins)| TransitionRecord {
            start_venue: venues[s].venue_id.clone(),
            end_venue: venues[e].venue_id.clone(),
            year_month: ym,
            period,
            checkins,
        })
        .collect();

    Ok(SynthCity {
        venues,
        transitions,
        zipmap: ZipMap(zipmap),
        communities: (0..n).map(|z| (zip_name(z), community_of[z])).collect(),
    })
}

pub fn write_communities<W: Write>(writer: W, communities: &BTreeMap<String, usize>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["zip", "community_id"])?;
    for (zip, c) in communities {
        w.write_record([zip.as_str(), &c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_communities<R: Read>(reader: R) -> Result<BTreeMap<String, usize>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let c = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(line, "community_id", "expected an integer"))?;
        out.insert(rec[0].to_string(), c);
    }
    Ok(out)
}

/// Writes the four city files into `dir`, with `preamble` (e.g. `#` metadata
/// lines) at the top of each.
pub fn write_city(dir: &Path, city: &SynthCity, preamble: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let open = |name: &str| -> Result<BufWriter<File>> {
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        w.write_all(preamble.as_bytes())?;
        Ok(w)
    };
    write_venues(open(VENUES_FILE)?, &city.venues)?;
    write_transitions(open(TRANSITIONS_FILE)?, &city.transitions)?;
    city.zipmap.write(open(ZIPMAP_FILE)?)?;
    write_communities(open(COMMUNITIES_FILE)?, &city.communities)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ingest, IngestOptions};

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_zips: 12,
            n_communities: 3,
            transitions_per_period: 400,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn full_intra_probability_stays_in_community() {
        let cfg = SynthConfig {
            intra_community_prob: 1.0,
            ..small(1)
        };
        let city = generate_city(&cfg).unwrap();
        for t in &city.transitions {
            let s = &city.zipmap.0[&t.start_venue];
            let e = &city.zipmap.0[&t.end_venue];
            assert_eq!(city.communities[s], city.communities[e]);
        }
    }

    #[test]
    fn zero_intra_probability_always_leaves() {
        let cfg = SynthConfig {
            intra_community_prob: 0.0,
            ..small(2)
        };
        let city = generate_city(&cfg).unwrap();
        for t in &city.transitions {
            let s = &city.zipmap.0[&t.start_venue];
            let e = &city.zipmap.0[&t.end_venue];
            assert_ne!(city.communities[s], city.communities[e]);
        }
    }

    #[test]
    fn deterministic_and_parses_cleanly() {
        let a = generate_city(&small(5)).unwrap();
        let b = generate_city(&small(5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_city(&small(6)).unwrap());

        let out = ingest(
            &a.venues,
            &a.transitions,
            &a.zipmap,
            IngestOptions {
                min_venues: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.report.venues_unresolved, 0);
        assert_eq!(out.report.checkins_dropped, 0);
    }

    #[test]
    fn rejects_infeasible_configs() {
        let bad = [
            SynthConfig {
                venues_per_zip: (0, 0),
                ..small(0)
            },
            SynthConfig {
                n_communities: 20,
                ..small(0)
            },
            SynthConfig {
                category_coupling: 1.5,
                ..small(0)
            },
            SynthConfig {
                checkin_mean: 0.5,
                ..small(0)
            },
            SynthConfig {
                periods_active: vec![],
                ..small(0)
            },
        ];
        for cfg in bad {
            assert!(generate_city(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn checkin_counts_have_requested_mean() {
        let cfg = SynthConfig {
            transitions_per_period: 20_000,
            n_zips: 200,
            checkin_mean: 2.0,
            ..small(9)
        };
        let city = generate_city(&cfg).unwrap();
        let total: u64 = city.transitions.iter().map(|t| t.checkins).sum();
        let raw = (cfg.transitions_per_period * cfg.periods_active.len()) as f64;
        assert!((total as f64 / raw - 2.0).abs() < 0.05);
    }
}
