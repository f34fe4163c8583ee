use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use areasim_core::areavec::{
    category_matrix, checkin_vector_from, read_category_matrix, venue_checkins,
    write_category_matrix, CategoryVector, VectorKind,
};
use areasim_core::embed::{embed_network, load_embedding, save_embedding, EmbedReport};
use areasim_core::flownet::{
    build_network, network_stats, write_network, FlowNetwork, NetworkStats,
};
use areasim_core::ingest::{
    self, parse_transitions, parse_venues, parse_zip_counts, parse_zip_transitions,
    write_zip_counts, write_zip_transitions, ZipMap, ZipTransition,
};
use areasim_core::simanalysis::{
    compare as compare_reps, cross_period_correlation, write_cross_period, write_similarity_matrix,
    ComparisonReport,
};
use areasim_core::synth::{generate_city, write_city};
use areasim_core::{Embedding, Error, Period, SimilarityMatrix};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Meta, RunConfig, Settings};
use crate::CliError;

pub const ZIP_TRANSITIONS_FILE: &str = "zip_transitions.csv";
pub const ZIPS_FILE: &str = "zips.csv";
pub const CATEGORY_VENUE_FILE: &str = "category_venue.csv";
pub const CATEGORY_CHECKIN_FILE: &str = "category_checkin.csv";
pub const INGEST_REPORT_FILE: &str = "ingest_report.json";

pub fn embedding_file(period: Period) -> String {
    format!("embedding_{period}.txt")
}

fn require(path: Option<&PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    let path = path.ok_or_else(|| CliError::Usage(format!("--{flag} <path> is required")))?;
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "input not found: {}",
            path.display()
        )));
    }
    Ok(path.clone())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

/// Creates `path` and writes the metadata comment line first.
fn create_with_meta(path: &Path, meta: &Meta) -> Result<BufWriter<File>, CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
    w.write_all(meta.comment().as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    Ok(w)
}

fn write_text<F>(path: &Path, meta: &Meta, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> areasim_core::Result<()>,
{
    let mut w = create_with_meta(path, meta)?;
    f(&mut w).map_err(|e| CliError::core(path.display().to_string(), e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct WithMeta<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: T,
}

fn write_json<T: Serialize>(path: &Path, meta: &Meta, body: T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&WithMeta { meta, body }).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn core_err(context: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::core(context.display().to_string(), e)
}

pub fn ingest(s: &Settings, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let venues_path = require(s.venues.as_ref(), "venues")?;
    let transitions_path = require(s.transitions.as_ref(), "transitions")?;
    let zipmap_path = require(s.zipmap.as_ref(), "zipmap")?;

    let venues = parse_venues(open(&venues_path)?).map_err(core_err(&venues_path))?;
    let transitions =
        parse_transitions(open(&transitions_path)?).map_err(core_err(&transitions_path))?;
    let zipmap = ZipMap::parse(open(&zipmap_path)?).map_err(core_err(&zipmap_path))?;

    let result = ingest::ingest(&venues, &transitions, &zipmap, cfg.ingest)
        .map_err(|e| CliError::core("ingest", e))?;
    let kept = result.kept();
    if kept.is_empty() {
        return Err(CliError::core(
            "ingest",
            Error::Empty("no zip meets the venue threshold".into()),
        ));
    }
    let kept_venues = result.kept_venues();
    let z = category_matrix(
        &kept_venues,
        &transitions,
        &kept,
        VectorKind::Venue,
        cfg.attribution,
    )
    .map_err(|e| CliError::core("venue category vectors", e))?;
    let per_venue = venue_checkins(&transitions, cfg.attribution);
    let mut zc = Vec::new();
    for zip in &kept {
        match checkin_vector_from(&kept_venues, &per_venue, zip) {
            Ok(v) => zc.push(v),
            Err(Error::NoCheckinMass(zip)) => {
                warn!("zip {zip} has no check-in mass; omitted from {CATEGORY_CHECKIN_FILE}")
            }
            Err(e) => return Err(CliError::core("checkin category vectors", e)),
        }
    }

    let meta = Meta::new(cfg);
    write_text(&out.join(ZIP_TRANSITIONS_FILE), &meta, |w| {
        write_zip_transitions(w, &result.aggregation.transitions)
    })?;
    write_text(&out.join(ZIPS_FILE), &meta, |w| {
        write_zip_counts(w, &result.kept_counts)
    })?;
    write_text(&out.join(CATEGORY_VENUE_FILE), &meta, |w| {
        write_category_matrix(w, &z)
    })?;
    write_text(&out.join(CATEGORY_CHECKIN_FILE), &meta, |w| {
        write_category_matrix(w, &zc)
    })?;
    write_json(&out.join(INGEST_REPORT_FILE), &meta, &result.report)?;
    info!(
        "kept {}/{} zips, {} zip transitions, {} of {} check-ins dropped",
        result.report.zips_kept,
        result.report.zips_total,
        result.aggregation.transitions.len(),
        result.report.checkins_dropped,
        result.report.checkins_total
    );
    Ok(())
}

fn load_ingested(
    s: &Settings,
) -> Result<(PathBuf, Vec<ZipTransition>, BTreeSet<String>), CliError> {
    let dir = require(s.input.as_ref(), "input")?;
    let zt_path = require(Some(&dir.join(ZIP_TRANSITIONS_FILE)), "input")?;
    let zips_path = require(Some(&dir.join(ZIPS_FILE)), "input")?;
    let zts = parse_zip_transitions(open(&zt_path)?).map_err(core_err(&zt_path))?;
    let kept = parse_zip_counts(open(&zips_path)?)
        .map_err(core_err(&zips_path))?
        .into_keys()
        .collect();
    Ok((dir, zts, kept))
}

fn networks(
    cfg: &RunConfig,
    zts: &[ZipTransition],
    kept: &BTreeSet<String>,
) -> Result<Vec<FlowNetwork>, CliError> {
    cfg.periods
        .iter()
        .map(|&p| {
            build_network(zts, p, kept, cfg.network)
                .map_err(|e| CliError::core(format!("{p} network"), e))
        })
        .collect()
}

pub fn build_net(s: &Settings, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (_, zts, kept) = load_ingested(s)?;
    let meta = Meta::new(cfg);
    let mut stats: BTreeMap<Period, NetworkStats> = BTreeMap::new();
    for net in networks(cfg, &zts, &kept)? {
        let path = out.join(format!("network_{}.tsv", net.period()));
        write_text(&path, &meta, |w| write_network(w, &net))?;
        stats.insert(net.period(), network_stats(&net));
    }
    write_json(
        &out.join("network_stats.json"),
        &meta,
        serde_json::json!({ "networks": stats }),
    )
}

#[derive(Serialize)]
struct EmbedRunReport {
    periods: BTreeMap<Period, PeriodEmbedReport>,
    skipped: Vec<Period>,
}

#[derive(Serialize)]
struct PeriodEmbedReport {
    seed: u64,
    #[serde(flatten)]
    report: EmbedReport,
}

pub fn embed(s: &Settings, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (_, zts, kept) = load_ingested(s)?;
    let nets = networks(cfg, &zts, &kept)?;
    let run_one = |net: &FlowNetwork| {
        let seed = cfg.period_seed(net.period());
        let walk = areasim_core::WalkConfig { seed, ..cfg.walk };
        let train = areasim_core::TrainConfig { seed, ..cfg.train };
        (
            net.period(),
            seed,
            embed_network(net, &walk, &train, cfg.embed),
        )
    };
    let results: Vec<_> = if cfg.deterministic {
        nets.iter().map(run_one).collect()
    } else {
        nets.par_iter().map(run_one).collect()
    };

    let meta = Meta::new(cfg);
    let mut report = EmbedRunReport {
        periods: BTreeMap::new(),
        skipped: Vec::new(),
    };
    for (period, seed, result) in results {
        match result {
            Ok((emb, r)) => {
                if !r.isolated.is_empty() {
                    warn!(
                        "{period}: {} zip(s) never visited, given zero vectors",
                        r.isolated.len()
                    );
                }
                write_text(&out.join(embedding_file(period)), &meta, |w| {
                    save_embedding(w, &emb)
                })?;
                report
                    .periods
                    .insert(period, PeriodEmbedReport { seed, report: r });
            }
            Err(Error::NoWalkableNodes(p)) => {
                warn!("{p}: no walkable nodes, period skipped");
                report.skipped.push(p);
            }
            Err(e) => return Err(CliError::core(format!("{period} embedding"), e)),
        }
    }
    write_json(&out.join("embed_report.json"), &meta, &report)
}

fn load_period_embeddings(
    dir: &Path,
    cfg: &RunConfig,
    require_all: bool,
) -> Result<BTreeMap<Period, Embedding>, CliError> {
    let mut out = BTreeMap::new();
    for &p in &cfg.periods {
        let path = dir.join(embedding_file(p));
        if !path.exists() {
            if require_all {
                return Err(CliError::Usage(format!(
                    "no embedding for period {p}: {} not found",
                    path.display()
                )));
            }
            warn!("no embedding for period {p}; skipped");
            continue;
        }
        out.insert(p, load_embedding(open(&path)?).map_err(core_err(&path))?);
    }
    Ok(out)
}

fn write_two_column(
    path: &Path,
    meta: &Meta,
    header: [&str; 2],
    rows: impl Iterator<Item = (String, String)>,
) -> Result<(), CliError> {
    write_text(path, meta, |w| {
        writeln!(w, "{},{}", header[0], header[1])?;
        for (a, b) in rows {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    })
}

/// Writes `<json_name>.json`, `jaccard_<stem>.csv` and `jaccard_by_k_<stem>.csv`.
fn write_comparison(
    out: &Path,
    json_name: &str,
    stem: &str,
    meta: &Meta,
    extra: serde_json::Value,
    report: &ComparisonReport,
) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Body<'a> {
        #[serde(flatten)]
        extra: serde_json::Value,
        #[serde(flatten)]
        report: &'a ComparisonReport,
    }
    write_json(
        &out.join(format!("{json_name}.json")),
        meta,
        Body { extra, report },
    )?;
    write_two_column(
        &out.join(format!("jaccard_{stem}.csv")),
        meta,
        ["zip", "jaccard"],
        report
            .per_node_jaccard
            .iter()
            .map(|(z, j)| (z.clone(), j.to_string())),
    )?;
    write_two_column(
        &out.join(format!("jaccard_by_k_{stem}.csv")),
        meta,
        ["k", "mean_jaccard"],
        report
            .jaccard_by_k
            .iter()
            .map(|km| (km.k.to_string(), km.mean.to_string())),
    )
}

fn read_categories(
    dir: &Path,
    name: &str,
    kind: VectorKind,
) -> Result<Vec<CategoryVector>, CliError> {
    let path = require(Some(&dir.join(name)), "input")?;
    read_category_matrix(open(&path)?, kind).map_err(core_err(&path))
}

pub fn compare(s: &Settings, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let input = require(s.input.as_ref(), "input")?;
    let emb_dir = require(s.embeddings.as_ref().or(s.input.as_ref()), "embeddings")?;
    let z = read_categories(&input, CATEGORY_VENUE_FILE, VectorKind::Venue)?;
    let zc = read_categories(&input, CATEGORY_CHECKIN_FILE, VectorKind::Checkin)?;
    let sim_z = SimilarityMatrix::from_category_vectors(&z)
        .map_err(|e| CliError::core("category similarity", e))?;
    let sim_zc = SimilarityMatrix::from_category_vectors(&zc)
        .map_err(|e| CliError::core("checkin similarity", e))?;
    let meta = Meta::new(cfg);
    write_text(&out.join("similarity_category.csv"), &meta, |w| {
        write_similarity_matrix(w, &sim_z)
    })?;

    let cat_vs_checkin = compare_reps(&sim_z, &sim_zc, cfg.k, cfg.k_max, cfg.measure)
        .map_err(|e| CliError::core("category vs checkin", e))?;
    write_comparison(
        out,
        "category_vs_checkin",
        "category_vs_checkin",
        &meta,
        serde_json::json!({}),
        &cat_vs_checkin,
    )?;

    let embeddings = load_period_embeddings(&emb_dir, cfg, cfg.explicit_periods)?;
    if embeddings.is_empty() {
        return Err(CliError::Usage(format!(
            "no embedding files found in {}",
            emb_dir.display()
        )));
    }
    let mut summary = vec![(
        "period".to_string(),
        "rho,p_value,n_pairs,mean_jaccard".to_string(),
    )];
    for (period, emb) in &embeddings {
        let sim_v = SimilarityMatrix::from_embedding(emb)
            .map_err(|e| CliError::core(format!("{period} similarity"), e))?;
        write_text(&out.join(format!("similarity_{period}.csv")), &meta, |w| {
            write_similarity_matrix(w, &sim_v)
        })?;
        let rep = compare_reps(&sim_v, &sim_z, cfg.k, cfg.k_max, cfg.measure)
            .map_err(|e| CliError::core(format!("{period} comparison"), e))?;
        info!(
            "{period}: rho = {:.3}, mean Jaccard@{} = {:.3}",
            rep.rho, cfg.k, rep.mean_jaccard
        );
        summary.push((
            period.to_string(),
            format!(
                "{},{:e},{},{}",
                rep.rho, rep.p_value, rep.n_pairs, rep.mean_jaccard
            ),
        ));
        write_comparison(
            out,
            &format!("compare_{period}"),
            period.as_str(),
            &meta,
            serde_json::json!({ "period": period }),
            &rep,
        )?;
    }
    write_text(&out.join("compare_summary.csv"), &meta, |w| {
        for (a, b) in &summary {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    })
}

pub fn cross_period(s: &Settings, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let dir = require(s.embeddings.as_ref().or(s.input.as_ref()), "embeddings")?;
    if cfg.periods.len() < 2 {
        return Err(CliError::Usage(
            "cross-period needs at least 2 periods".into(),
        ));
    }
    let embeddings = load_period_embeddings(&dir, cfg, true)?;
    let m = cross_period_correlation(&embeddings, cfg.measure)
        .map_err(|e| CliError::core("cross-period", e))?;
    write_text(&out.join("cross_period.csv"), &Meta::new(cfg), |w| {
        write_cross_period(w, &m)
    })
}

pub fn synth(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let city = generate_city(&cfg.synth).map_err(|e| CliError::core("synth", e))?;
    write_city(out, &city, &Meta::new(cfg).comment())
        .map_err(|e| CliError::core(out.display().to_string(), e))?;
    info!(
        "wrote {} venues, {} transitions to {}",
        city.venues.len(),
        city.transitions.len(),
        out.display()
    );
    Ok(())
}
