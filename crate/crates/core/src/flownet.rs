//! Directed, checkin-weighted zip-to-zip flow network for one period.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ZipTransition;
use crate::types::Period;

/// Nodes are kept in lexicographic order; node indices follow that order, so
/// iterating edges by index is also lexicographic by zip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    period: Period,
    nodes: Vec<String>,
    /// Out-edges per node, sorted by target index. Weights are >= 1.
    out: Vec<Vec<(usize, u64)>>,
    in_degree: Vec<usize>,
}

impl FlowNetwork {
    /// Builds a network from explicit edges. Parallel edges are summed.
    pub fn from_edges<N, E>(period: Period, nodes: N, edges: E) -> Result<FlowNetwork>
    where
        N: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String, u64)>,
    {
        let nodes: Vec<String> = nodes
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, z)| (z.as_str(), i))
            .collect();
        let mut acc: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (s, e, w) in edges {
            if w == 0 {
                return Err(Error::Parameter(format!("edge {s}->{e} has zero weight")));
            }
            let si = *index
                .get(s.as_str())
                .ok_or_else(|| Error::UnknownZip(s.clone()))?;
            let ei = *index
                .get(e.as_str())
                .ok_or_else(|| Error::UnknownZip(e.clone()))?;
            *acc.entry((si, ei)).or_insert(0) += w;
        }
        let mut out = vec![Vec::new(); nodes.len()];
        let mut in_degree = vec![0; nodes.len()];
        for ((s, e), w) in acc {
            out[s].push((e, w));
            in_degree[e] += 1;
        }
        Ok(FlowNetwork {
            period,
            nodes,
            out,
            in_degree,
        })
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, zip: &str) -> Option<usize> {
        self.nodes.binary_search_by(|z| z.as_str().cmp(zip)).ok()
    }

    pub fn out_neighbors(&self, node: usize) -> &[(usize, u64)] {
        &self.out[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out[node].len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.weight(from, to).is_some()
    }

    pub fn weight(&self, from: usize, to: usize) -> Option<u64> {
        let row = &self.out[from];
        row.binary_search_by_key(&to, |&(t, _)| t)
            .ok()
            .map(|i| row[i].1)
    }

    /// No incoming and no outgoing edge.
    pub fn is_isolated(&self, node: usize) -> bool {
        self.out[node].is_empty() && self.in_degree[node] == 0
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().map(move |&(e, w)| (s, e, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Undirected view: w'(i,j) = w(i,j) + w(j,i), self-loops unchanged.
    pub fn symmetrized(&self) -> FlowNetwork {
        let names = &self.nodes;
        let edges = self.edges().flat_map(|(s, e, w)| {
            let fwd = (names[s].clone(), names[e].clone(), w);
            let back = (s != e).then(|| (names[e].clone(), names[s].clone(), w));
            std::iter::once(fwd).chain(back)
        });
        FlowNetwork::from_edges(self.period, names.iter().cloned(), edges)
            .expect("endpoints come from the same node set")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkOptions {
    /// Only include zips that appear in a transition of this period, rather
    /// than the whole kept set.
    pub restrict_to_active: bool,
}

/// Builds the period's network, pooling all months.
pub fn build_network(
    zip_transitions: &[ZipTransition],
    period: Period,
    kept: &BTreeSet<String>,
    opts: NetworkOptions,
) -> Result<FlowNetwork> {
    let in_period: Vec<&ZipTransition> = zip_transitions
        .iter()
        .filter(|t| t.period == period)
        .collect();
    for t in &in_period {
        for zip in [&t.start_zip, &t.end_zip] {
            if !kept.contains(zip) {
                return Err(Error::UnknownZip(zip.clone()));
            }
        }
    }
    let nodes: BTreeSet<String> = if opts.restrict_to_active {
        in_period
            .iter()
            .flat_map(|t| [t.start_zip.clone(), t.end_zip.clone()])
            .collect()
    } else {
        kept.clone()
    };
    FlowNetwork::from_edges(
        period,
        nodes,
        in_period
            .iter()
            .map(|t| (t.start_zip.clone(), t.end_zip.clone(), t.checkins)),
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub total_weight: u64,
    pub isolated_node_count: usize,
}

pub fn network_stats(net: &FlowNetwork) -> NetworkStats {
    NetworkStats {
        node_count: net.node_count(),
        edge_count: net.edge_count(),
        total_weight: net.total_weight(),
        isolated_node_count: (0..net.node_count())
            .filter(|&i| net.is_isolated(i))
            .count(),
    }
}

/// Writes the edge-list format: a `# nodes: <n> period: <p>` line, one
/// `start<TAB>end<TAB>weight` line per edge, then `zip<TAB>-<TAB>0` for
/// each isolated node.
pub fn write_network<W: Write>(mut w: W, net: &FlowNetwork) -> Result<()> {
    writeln!(w, "# nodes: {} period: {}", net.node_count(), net.period())?;
    for (s, e, weight) in net.edges() {
        writeln!(w, "{}\t{}\t{}", net.nodes[s], net.nodes[e], weight)?;
    }
    for (i, zip) in net.nodes.iter().enumerate() {
        if net.is_isolated(i) {
            writeln!(w, "{zip}\t-\t0")?;
        }
    }
    Ok(())
}

pub fn read_network<R: BufRead>(r: R) -> Result<FlowNetwork> {
    let mut header: Option<(usize, Period)> = None;
    let mut nodes = BTreeSet::new();
    let mut edges = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if let Some(rest) = line.strip_prefix("# nodes:") {
            let (n, p) = rest
                .split_once("period:")
                .ok_or_else(|| Error::parse(line_no, "<header>", "missing `period:`"))?;
            let n = n
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, "nodes", format!("bad node count {n:?}")))?;
            let p = p
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(line_no, "period", e.to_string()))?;
            header = Some((n, p));
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            return Err(Error::parse(
                line_no,
                "<header>",
                "edge line before `# nodes:` header",
            ));
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(
                line_no,
                "<row>",
                format!("expected 3 tab-separated fields, found {}", cols.len()),
            ));
        }
        if cols[1] == "-" {
            if cols[2] != "0" {
                return Err(Error::parse(
                    line_no,
                    "weight",
                    "isolated-node line must have weight 0",
                ));
            }
            nodes.insert(cols[0].to_string());
            continue;
        }
        let weight: u64 = cols[2].parse().map_err(|_| {
            Error::parse(line_no, "weight", format!("not an integer: {:?}", cols[2]))
        })?;
        if weight == 0 {
            return Err(Error::parse(line_no, "weight", "edge weight must be >= 1"));
        }
        nodes.insert(cols[0].to_string());
        nodes.insert(cols[1].to_string());
        edges.push((cols[0].to_string(), cols[1].to_string(), weight));
    }
    let (n, period) =
        header.ok_or_else(|| Error::parse(1, "<header>", "missing `# nodes:` header"))?;
    if nodes.len() != n {
        return Err(Error::parse(
            0,
            "nodes",
            format!("header declares {n} nodes but {} were listed", nodes.len()),
        ));
    }
    FlowNetwork::from_edges(period, nodes, edges)
}
