//! Run settings: command-line flags layered over an optional TOML file of
//! `key = value` pairs. A flag given on the command line always wins over
//! the file; anything missing from both falls back to the built-in default.

use std::fs;
use std::path::{Path, PathBuf};

use areasim_core::areavec::Attribution;
use areasim_core::embed::{EmbedOptions, TrainConfig, WalkBudget, WalkConfig};
use areasim_core::flownet::NetworkOptions;
use areasim_core::ingest::{AggregateOptions, IngestOptions, UnresolvedPolicy, DEFAULT_MIN_VENUES};
use areasim_core::simanalysis::PairMeasure;
use areasim_core::{Period, SynthConfig};
use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Every tunable, as accepted both on the command line and in the config
/// file (file keys use underscores: `walk_length = 40`).
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Master seed; per-period seeds are derived from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Period name, comma-separated list, or `all`.
    #[arg(long, global = true)]
    pub period: Option<String>,
    /// Neighbors per zip for the overlap analysis.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Largest k of the overlap sweep.
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    /// Embed periods one after another; needed for byte-identical reruns.
    #[arg(long, global = true)]
    #[serde(default)]
    pub deterministic: bool,
    /// City label recorded in output metadata.
    #[arg(long, global = true)]
    pub city: Option<String>,

    /// Venue metadata CSV.
    #[arg(long, global = true)]
    pub venues: Option<PathBuf>,
    /// Venue-level transition CSV.
    #[arg(long, global = true)]
    pub transitions: Option<PathBuf>,
    /// venue_id -> zip CSV.
    #[arg(long, global = true)]
    pub zipmap: Option<PathBuf>,
    /// Directory written by `ingest`.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Directory holding embedding files.
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,

    #[arg(long, global = true)]
    pub min_venues: Option<usize>,
    /// Fail on venues missing from the zip map instead of dropping them.
    #[arg(long, global = true)]
    #[serde(default)]
    pub strict: bool,
    /// Discard movements that start and end in the same zip.
    #[arg(long, global = true)]
    #[serde(default)]
    pub drop_self_loops: bool,
    /// Check-in attribution: both, start or end.
    #[arg(long, global = true)]
    pub attribute: Option<String>,
    /// Only zips active in a period become nodes of its network.
    #[arg(long, global = true)]
    #[serde(default)]
    pub restrict_active: bool,

    /// Return parameter.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// In-out parameter.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Total walk budget, round-robin over start nodes.
    #[arg(long, global = true, conflicts_with = "walks_per_node")]
    pub walks_total: Option<usize>,
    /// Walks per start node (instead of a total budget).
    #[arg(long, global = true)]
    pub walks_per_node: Option<usize>,
    #[arg(long, global = true)]
    pub walk_length: Option<usize>,
    /// Embedding dimensionality.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub window: Option<usize>,
    #[arg(long, global = true)]
    pub negatives: Option<usize>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    /// Initial learning rate.
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    /// Walk over the undirected view of each network.
    #[arg(long, global = true)]
    #[serde(default)]
    pub symmetrize: bool,
    /// Correlate distances instead of similarities.
    #[arg(long, global = true)]
    #[serde(default)]
    pub on_distance: bool,

    #[arg(long, global = true)]
    pub n_zips: Option<usize>,
    #[arg(long, global = true)]
    pub communities: Option<usize>,
    #[arg(long, global = true)]
    pub venues_min: Option<usize>,
    #[arg(long, global = true)]
    pub venues_max: Option<usize>,
    /// Probability that a synthetic movement stays in its community.
    #[arg(long, global = true)]
    pub intra: Option<f64>,
    /// Coupling between communities and venue categories.
    #[arg(long, global = true)]
    pub coupling: Option<f64>,
    #[arg(long, global = true)]
    pub checkin_mean: Option<f64>,
    /// Raw synthetic transitions per period.
    #[arg(long, global = true)]
    pub transitions_per_period: Option<usize>,
    #[arg(long, global = true)]
    pub months: Option<u32>,
}

macro_rules! layer {
    ($cli:ident, $file:ident, $($opt:ident),* ; $($flag:ident),*) => {
        Settings {
            $($opt: $cli.$opt.or($file.$opt),)*
            $($flag: $cli.$flag || $file.$flag,)*
        }
    };
}

impl Settings {
    pub fn load_file(path: &Path) -> Result<Settings, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }

    /// `self` (command line) over `file`.
    pub fn over(self, file: Settings) -> Settings {
        let cli = self;
        layer!(cli, file,
            seed, out, period, k, k_max, city, venues, transitions, zipmap, input, embeddings,
            min_venues, attribute, p, q, walks_total, walks_per_node, walk_length, dim, window,
            negatives, epochs, lr, n_zips, communities, venues_min, venues_max, intra, coupling,
            checkin_mean, transitions_per_period, months;
            deterministic, strict, drop_self_loops, restrict_active, symmetrize, on_distance)
    }
}

/// Fully resolved analysis parameters. Paths are kept out of this struct so
/// the config hash depends only on what changes results.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub city: String,
    pub seed: u64,
    pub periods: Vec<Period>,
    pub explicit_periods: bool,
    pub k: usize,
    pub k_max: usize,
    pub deterministic: bool,
    pub ingest: IngestOptions,
    pub attribution: Attribution,
    pub network: NetworkOptions,
    pub walk: WalkConfig,
    pub train: TrainConfig,
    pub embed: EmbedOptions,
    pub measure: PairMeasure,
    pub synth: SynthConfig,
}

fn parse_periods(spec: &str) -> Result<Vec<Period>, CliError> {
    if spec == "all" {
        return Ok(Period::ALL.to_vec());
    }
    let mut periods: Vec<Period> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e: areasim_core::Error| CliError::Usage(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    periods.sort();
    periods.dedup();
    Ok(periods)
}

impl RunConfig {
    pub fn resolve(s: &Settings) -> Result<RunConfig, CliError> {
        let seed = s.seed.unwrap_or(0);
        let periods = parse_periods(s.period.as_deref().unwrap_or("all"))?;
        let attribution = match s.attribute.as_deref().unwrap_or("both") {
            "both" => Attribution::Both,
            "start" => Attribution::Start,
            "end" => Attribution::End,
            other => {
                return Err(CliError::Usage(format!(
                    "--attribute must be both|start|end, got {other:?}"
                )))
            }
        };
        let budget = match (s.walks_total, s.walks_per_node) {
            (_, Some(r)) => WalkBudget::PerNode(r),
            (Some(n), None) => WalkBudget::Total(n),
            (None, None) => WalkConfig::default().budget,
        };
        let wd = WalkConfig::default();
        let walk = WalkConfig {
            p: s.p.unwrap_or(wd.p),
            q: s.q.unwrap_or(wd.q),
            budget,
            walk_length: s.walk_length.unwrap_or(wd.walk_length),
            seed,
        };
        let td = TrainConfig::default();
        let train = TrainConfig {
            dim: s.dim.unwrap_or(td.dim),
            window: s.window.unwrap_or(td.window),
            negatives: s.negatives.unwrap_or(td.negatives),
            epochs: s.epochs.unwrap_or(td.epochs),
            lr_initial: s.lr.unwrap_or(td.lr_initial),
            lr_min: td.lr_min.min(s.lr.unwrap_or(td.lr_initial)),
            seed,
        };
        walk.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        train
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let sd = SynthConfig::default();
        let synth = SynthConfig {
            n_zips: s.n_zips.unwrap_or(sd.n_zips),
            n_communities: s.communities.unwrap_or(sd.n_communities),
            venues_per_zip: (
                s.venues_min.unwrap_or(sd.venues_per_zip.0),
                s.venues_max.unwrap_or(sd.venues_per_zip.1),
            ),
            intra_community_prob: s.intra.unwrap_or(sd.intra_community_prob),
            category_coupling: s.coupling.unwrap_or(sd.category_coupling),
            checkin_mean: s.checkin_mean.unwrap_or(sd.checkin_mean),
            periods_active: periods.clone(),
            transitions_per_period: s
                .transitions_per_period
                .unwrap_or(sd.transitions_per_period),
            months: s.months.unwrap_or(sd.months),
            start_month: sd.start_month,
            seed,
        };

        let k = s.k.unwrap_or(5);
        if k < 1 {
            return Err(CliError::Usage("--k must be >= 1".into()));
        }
        Ok(RunConfig {
            city: s.city.clone().unwrap_or_else(|| "city".into()),
            seed,
            explicit_periods: s.period.as_deref().is_some_and(|p| p != "all"),
            periods,
            k,
            k_max: s.k_max.unwrap_or(20).max(k),
            deterministic: s.deterministic,
            ingest: IngestOptions {
                min_venues: s.min_venues.unwrap_or(DEFAULT_MIN_VENUES),
                policy: if s.strict {
                    UnresolvedPolicy::Strict
                } else {
                    UnresolvedPolicy::Drop
                },
                aggregate: AggregateOptions {
                    drop_self_loops: s.drop_self_loops,
                },
            },
            attribution,
            network: NetworkOptions {
                restrict_to_active: s.restrict_active,
            },
            walk,
            train,
            embed: EmbedOptions {
                symmetrize: s.symmetrize,
            },
            measure: if s.on_distance {
                PairMeasure::Distance
            } else {
                PairMeasure::Similarity
            },
            synth,
        })
    }

    /// First 16 hex digits of the SHA-256 of the resolved parameters.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }

    /// Seed used for one period's walks and training.
    pub fn period_seed(&self, period: Period) -> u64 {
        self.seed ^ period.index() as u64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool_version: &'static str,
    pub city: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Meta {
    pub fn new(cfg: &RunConfig) -> Meta {
        Meta {
            tool_version: env!("CARGO_PKG_VERSION"),
            city: cfg.city.clone(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
        }
    }

    /// `#` comment line for text outputs.
    pub fn comment(&self) -> String {
        format!(
            "# areasim {} city={} seed={} config={}\n",
            self.tool_version, self.city, self.seed, self.config_hash
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_overrides_file() {
        let file: Settings =
            toml::from_str("seed = 3\nk = 7\np = 0.5\nsymmetrize = true\n").unwrap();
        let cli = Settings {
            seed: Some(9),
            ..Default::default()
        };
        let merged = cli.over(file);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.k, Some(7));
        assert!(merged.symmetrize);
        let cfg = RunConfig::resolve(&merged).unwrap();
        assert_eq!(cfg.walk.p, 0.5);
        assert_eq!(cfg.walk.q, 2.0);
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        assert!(toml::from_str::<Settings>("walkz = 3\n").is_err());
    }

    #[test]
    fn defaults_follow_the_published_setup() {
        let cfg = RunConfig::resolve(&Settings::default()).unwrap();
        assert_eq!((cfg.walk.p, cfg.walk.q), (1.0, 2.0));
        assert_eq!(cfg.walk.budget, WalkBudget::Total(1000));
        assert_eq!(cfg.train.dim, 10);
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.ingest.min_venues, 10);
        assert_eq!(cfg.periods, Period::ALL.to_vec());
    }

    #[test]
    fn period_lists() {
        assert_eq!(
            parse_periods("night,morning").unwrap(),
            vec![Period::Morning, Period::Night]
        );
        assert!(parse_periods("dawn").is_err());
    }

    #[test]
    fn hash_tracks_parameters() {
        let a = RunConfig::resolve(&Settings::default()).unwrap();
        let b = RunConfig::resolve(&Settings {
            q: Some(0.5),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(
            a.hash(),
            RunConfig::resolve(&Settings::default()).unwrap().hash()
        );
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
