//! Pairwise area similarity `σ_ij = exp(-‖x_i - x_j‖)` and comparisons of two
//! similarity structures: Pearson correlation over area pairs, and top-k
//! neighbor overlap (Jaccard).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::areavec::CategoryVector;
use crate::embed::{euclidean, Embedding};
use crate::error::{Error, Result};
use crate::types::Period;

pub fn similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::Parameter("non-finite vector component".into()));
    }
    // exp underflows to 0 past distance ~745; keep σ strictly positive
    Ok((-euclidean(a, b)).exp().max(f64::MIN_POSITIVE))
}

/// Symmetric matrix of σ over an ordered node list, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    nodes: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nodes.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.nodes.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn index_of(&self, zip: &str) -> Option<usize> {
        self.nodes.iter().position(|z| z == zip)
    }

    /// Builds a matrix from explicit values, checking the σ invariants.
    pub fn from_values(nodes: Vec<String>, values: Vec<f64>) -> Result<SimilarityMatrix> {
        let n = nodes.len();
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        let m = SimilarityMatrix { nodes, values };
        m.check_invariants()?;
        Ok(m)
    }

    /// Unit diagonal, symmetry and range (0, 1].
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.get(i, i) != 1.0 {
                return Err(Error::Parameter(format!(
                    "σ[{i},{i}] = {} != 1",
                    self.get(i, i)
                )));
            }
            for j in 0..n {
                let s = self.get(i, j);
                if !(s > 0.0 && s <= 1.0) {
                    return Err(Error::Parameter(format!("σ[{i},{j}] = {s} outside (0, 1]")));
                }
                if s != self.get(j, i) {
                    return Err(Error::Parameter(format!("σ is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    /// Sub-matrix over `nodes`, in that order. Every name must be present.
    pub fn restrict(&self, nodes: &[String]) -> Result<SimilarityMatrix> {
        let idx: Vec<usize> = nodes
            .iter()
            .map(|z| self.index_of(z).ok_or_else(|| Error::UnknownZip(z.clone())))
            .collect::<Result<_>>()?;
        let values = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Ok(SimilarityMatrix {
            nodes: nodes.to_vec(),
            values,
        })
    }

    /// Strictly-upper-triangle entries (i < j), row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    pub fn from_embedding(emb: &Embedding) -> Result<SimilarityMatrix> {
        similarity_matrix(emb.nodes(), emb.vectors())
    }

    pub fn from_category_vectors(vectors: &[CategoryVector]) -> Result<SimilarityMatrix> {
        let nodes: Vec<String> = vectors.iter().map(|v| v.zip.clone()).collect();
        let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.values.to_vec()).collect();
        similarity_matrix(&nodes, &rows)
    }
}

/// σ for every pair of rows of `vectors`, labelled by `nodes`.
pub fn similarity_matrix(nodes: &[String], vectors: &[Vec<f64>]) -> Result<SimilarityMatrix> {
    if nodes.is_empty() {
        return Err(Error::Empty("representation has no nodes".into()));
    }
    if nodes.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            found: vectors.len(),
        });
    }
    let n = nodes.len();
    let mut values = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let s = similarity(&vectors[i], &vectors[j])?;
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    Ok(SimilarityMatrix {
        nodes: nodes.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Lexicographic intersection of both node sets.
    pub nodes: Vec<String>,
    /// Zips present in only one of the inputs.
    pub excluded: Vec<String>,
}

impl Alignment {
    pub fn warnings(&self) -> usize {
        self.excluded.len()
    }
}

pub fn align_nodes(a: &SimilarityMatrix, b: &SimilarityMatrix) -> Result<Alignment> {
    let sa: BTreeSet<&String> = a.nodes.iter().collect();
    let sb: BTreeSet<&String> = b.nodes.iter().collect();
    let nodes: Vec<String> = sa.intersection(&sb).map(|z| (*z).clone()).collect();
    let excluded: Vec<String> = sa.symmetric_difference(&sb).map(|z| (*z).clone()).collect();
    if nodes.is_empty() {
        return Err(Error::Alignment(
            "the two representations share no zips".into(),
        ));
    }
    if !excluded.is_empty() {
        warn!(
            "excluding {} zip(s) present in only one representation: {}",
            excluded.len(),
            excluded.join(", ")
        );
    }
    Ok(Alignment { nodes, excluded })
}

/// What pairwise quantity the correlation is computed on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMeasure {
    /// σ values.
    #[default]
    Similarity,
    /// Euclidean distances, i.e. -ln σ.
    Distance,
}

/// Sample Pearson correlation, two-pass, fixed summation order.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Degenerate("fewer than two pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonResult {
    pub rho: f64,
    /// `None` when |rho| = 1 and the statistic is unbounded.
    pub t_stat: Option<f64>,
    /// Two-sided, Student-t with n_pairs - 2 degrees of freedom.
    pub p_value: f64,
    pub n_pairs: usize,
}

/// t statistic and two-sided p-value of a correlation over `n` pairs.
pub fn correlation_significance(rho: f64, n: usize) -> (Option<f64>, f64) {
    let dof = n as f64 - 2.0;
    if rho.abs() >= 1.0 {
        return (None, 0.0);
    }
    let t = rho * (dof / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, dof).expect("dof > 0");
    let p = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    (Some(t), p)
}

pub fn pearson_compare(
    a: &SimilarityMatrix,
    b: &SimilarityMatrix,
    measure: PairMeasure,
) -> Result<PearsonResult> {
    let align = align_nodes(a, b)?;
    if align.nodes.len() < 3 {
        return Err(Error::Alignment(format!(
            "need at least 3 common zips, found {}",
            align.nodes.len()
        )));
    }
    let to_measure = |m: &SimilarityMatrix| -> Result<Vec<f64>> {
        let tri = m.restrict(&align.nodes)?.upper_triangle();
        Ok(match measure {
            PairMeasure::Similarity => tri,
            PairMeasure::Distance => tri.into_iter().map(|s| -s.ln()).collect(),
        })
    };
    let (x, y) = (to_measure(a)?, to_measure(b)?);
    let rho = pearson(&x, &y)?;
    let (t_stat, p_value) = correlation_significance(rho, x.len());
    Ok(PearsonResult {
        rho,
        t_stat,
        p_value,
        n_pairs: x.len(),
    })
}

/// Indices of the `k` nodes most similar to `i`, most similar first. Ties go
/// to the lexicographically smaller zip.
pub fn top_k_neighbors(s: &SimilarityMatrix, i: usize, k: usize) -> Result<Vec<usize>> {
    let n = s.len();
    if i >= n {
        return Err(Error::Parameter(format!("node index {i} out of range")));
    }
    if k >= n {
        return Err(Error::Parameter(format!(
            "k = {k} must be smaller than the node count {n}"
        )));
    }
    let row = s.row(i);
    let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    others.sort_by(|&x, &y| {
        row[y]
            .total_cmp(&row[x])
            .then_with(|| s.nodes[x].cmp(&s.nodes[y]))
    });
    others.truncate(k);
    Ok(others)
}

pub fn top_k_neighbor_set(s: &SimilarityMatrix, zip: &str, k: usize) -> Result<BTreeSet<String>> {
    let i = s
        .index_of(zip)
        .ok_or_else(|| Error::UnknownZip(zip.to_string()))?;
    Ok(top_k_neighbors(s, i, k)?
        .into_iter()
        .map(|j| s.nodes[j].clone())
        .collect())
}

/// |A ∩ B| / |A ∪ B|, and 1 when both are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMean {
    pub k: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub k: usize,
    pub per_node: BTreeMap<String, f64>,
    pub mean: f64,
    /// Mean Jaccard for k = 1..=k_max.
    pub by_k: Vec<KMean>,
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn per_node_jaccard(a: &SimilarityMatrix, b: &SimilarityMatrix, k: usize) -> Result<Vec<f64>> {
    (0..a.len())
        .map(|i| {
            let na: BTreeSet<&String> = top_k_neighbors(a, i, k)?
                .into_iter()
                .map(|j| &a.nodes[j])
                .collect();
            let nb: BTreeSet<&String> = top_k_neighbors(b, i, k)?
                .into_iter()
                .map(|j| &b.nodes[j])
                .collect();
            Ok(jaccard(&na, &nb))
        })
        .collect()
}

/// Per-node Jaccard of top-k neighbor sets under `a` and `b`, their mean,
/// and the mean for every k in 1..=k_max (clamped to node count - 1).
pub fn neighbor_overlap_report(
    a: &SimilarityMatrix,
    b: &SimilarityMatrix,
    k: usize,
    k_max: usize,
) -> Result<OverlapReport> {
    let align = align_nodes(a, b)?;
    let (a, b) = (a.restrict(&align.nodes)?, b.restrict(&align.nodes)?);
    let values = per_node_jaccard(&a, &b, k)?;
    let mean = mean_of(values.iter().copied());
    let k_max = k_max.min(a.len().saturating_sub(1));
    let by_k = (1..=k_max)
        .map(|kk| {
            let v = per_node_jaccard(&a, &b, kk)?;
            Ok(KMean {
                k: kk,
                mean: mean_of(v.into_iter()),
            })
        })
        .collect::<Result<_>>()?;
    Ok(OverlapReport {
        k,
        per_node: align.nodes.into_iter().zip(values).collect(),
        mean,
        by_k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rho: f64,
    pub t_stat: Option<f64>,
    pub p_value: f64,
    pub n_pairs: usize,
    pub k: usize,
    pub mean_jaccard: f64,
    pub per_node_jaccard: BTreeMap<String, f64>,
    pub jaccard_by_k: Vec<KMean>,
}

/// Pearson and neighbor-overlap comparison of two representations.
pub fn compare(
    a: &SimilarityMatrix,
    b: &SimilarityMatrix,
    k: usize,
    k_max: usize,
    measure: PairMeasure,
) -> Result<ComparisonReport> {
    let pearson = pearson_compare(a, b, measure)?;
    let overlap = neighbor_overlap_report(a, b, k, k_max)?;
    Ok(ComparisonReport {
        rho: pearson.rho,
        t_stat: pearson.t_stat,
        p_value: pearson.p_value,
        n_pairs: pearson.n_pairs,
        k,
        mean_jaccard: overlap.mean,
        per_node_jaccard: overlap.per_node,
        jaccard_by_k: overlap.by_k,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossPeriodMatrix {
    pub periods: Vec<Period>,
    /// rho[i][j] between periods[i] and periods[j].
    pub rho: Vec<Vec<f64>>,
}

/// Correlation of the similarity structures of every pair of periods.
pub fn cross_period_correlation(
    embeddings: &BTreeMap<Period, Embedding>,
    measure: PairMeasure,
) -> Result<CrossPeriodMatrix> {
    if embeddings.len() < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 periods, found {}",
            embeddings.len()
        )));
    }
    let periods: Vec<Period> = embeddings.keys().copied().collect();
    let mats: Vec<SimilarityMatrix> = embeddings
        .values()
        .map(SimilarityMatrix::from_embedding)
        .collect::<Result<_>>()?;
    let n = periods.len();
    let mut rho = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let r = pearson_compare(&mats[i], &mats[j], measure)?.rho;
            rho[i][j] = r;
            rho[j][i] = r;
        }
    }
    Ok(CrossPeriodMatrix { periods, rho })
}

pub fn write_cross_period<W: Write>(writer: W, m: &CrossPeriodMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(std::iter::once("period").chain(m.periods.iter().map(|p| p.as_str())))?;
    for (p, row) in m.periods.iter().zip(&m.rho) {
        w.write_record(
            std::iter::once(p.to_string()).chain(row.iter().map(|r| format!("{r:.16e}"))),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Full square CSV: a header row of zips after an empty corner cell, then one
/// labelled row per zip, 17 significant digits.
pub fn write_similarity_matrix<W: Write>(writer: W, m: &SimilarityMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(std::iter::once("").chain(m.nodes.iter().map(String::as_str)))?;
    for (i, zip) in m.nodes.iter().enumerate() {
        w.write_record(
            std::iter::once(zip.clone()).chain(m.row(i).iter().map(|s| format!("{s:.16e}"))),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_similarity_matrix<R: Read>(reader: R) -> Result<SimilarityMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::parse(1, "<header>", "empty file"))??;
    let header_line = header.position().map_or(1, |p| p.line());
    if header.is_empty() || !header[0].is_empty() {
        return Err(Error::parse(
            header_line,
            "<header>",
            "first cell must be empty",
        ));
    }
    let nodes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = nodes.len();
    let mut values = Vec::with_capacity(n * n);
    let mut last_line = header_line;
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(last_line + 1, |p| p.line());
        last_line = line;
        if i >= n {
            return Err(Error::parse(line, "<row>", format!("more than {n} rows")));
        }
        if rec.len() != n + 1 {
            return Err(Error::parse(
                line,
                "<row>",
                format!("expected {} fields, found {}", n + 1, rec.len()),
            ));
        }
        if rec[0] != nodes[i] {
            return Err(Error::parse(
                line,
                "zip",
                format!("row label {:?} != column label {:?}", &rec[0], nodes[i]),
            ));
        }
        for (j, raw) in rec.iter().skip(1).enumerate() {
            let v: f64 = raw.parse().map_err(|_| {
                Error::parse(line, nodes[j].clone(), format!("not a number: {raw:?}"))
            })?;
            values.push(v);
        }
    }
    if values.len() != n * n {
        return Err(Error::parse(
            last_line,
            "<row>",
            format!("expected {n} rows, found {}", values.len() / n.max(1)),
        ));
    }
    SimilarityMatrix::from_values(nodes, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("z{i:02}")).collect()
    }

    #[test]
    fn similarity_closed_form() {
        assert_eq!(similarity(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        let s = similarity(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((s - 6.737946999085467e-3).abs() < 1e-15);
        let far = similarity(&[0.0], &[1e6]).unwrap();
        assert!(far > 0.0 && far < 1e-300);
        assert!(matches!(
            similarity(&[0.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_node_matrix() {
        let m = similarity_matrix(&names(1), &[vec![0.3, 0.1]]).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert!(similarity_matrix(&[], &[]).is_err());
    }

    #[test]
    fn alignment_cases() {
        let a = similarity_matrix(&names(3), &[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let al = align_nodes(&a, &a).unwrap();
        assert_eq!(al.nodes, names(3));
        assert_eq!(al.warnings(), 0);

        let b = similarity_matrix(&names(2), &[vec![0.0], vec![1.0]]).unwrap();
        let al = align_nodes(&a, &b).unwrap();
        assert_eq!(al.nodes, names(2));
        assert_eq!(al.excluded, vec!["z02".to_string()]);

        let c = similarity_matrix(&["q".to_string()], &[vec![0.0]]).unwrap();
        assert!(matches!(align_nodes(&a, &c), Err(Error::Alignment(_))));
    }

    #[test]
    fn self_correlation_is_one() {
        let vecs: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![i as f64 * 0.3, (i * i) as f64 * 0.1])
            .collect();
        let a = similarity_matrix(&names(6), &vecs).unwrap();
        let r = pearson_compare(&a, &a, PairMeasure::Similarity).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
        assert_eq!(r.n_pairs, 15);
        assert!(r.p_value < 1e-50);
    }

    #[test]
    fn degenerate_similarity_rejected() {
        let a = similarity_matrix(&names(3), &[vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        let b = similarity_matrix(&names(3), &[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        assert!(matches!(
            pearson_compare(&a, &b, PairMeasure::Similarity),
            Err(Error::Degenerate(_))
        ));
        let two = similarity_matrix(&names(2), &[vec![0.0], vec![1.0]]).unwrap();
        assert!(pearson_compare(&two, &two, PairMeasure::Similarity).is_err());
    }

    #[test]
    fn significance_matches_tabulated_t() {
        // t = 2.0 with 10 dof has two-sided p = 0.07338803477074
        let n = 12;
        let rho = 2.0 / (10.0f64 + 4.0).sqrt();
        let (t, p) = correlation_significance(rho, n);
        assert!((t.unwrap() - 2.0).abs() < 1e-12);
        assert!((p - 0.073388034770740).abs() < 1e-9, "{p}");
    }

    #[test]
    fn top_k_basic_and_ties() {
        let m = SimilarityMatrix::from_values(
            names(3),
            vec![1.0, 0.2, 0.7, 0.2, 1.0, 0.5, 0.7, 0.5, 1.0],
        )
        .unwrap();
        assert_eq!(top_k_neighbors(&m, 0, 1).unwrap(), vec![2]);
        assert!(top_k_neighbors(&m, 0, 3).is_err());

        let flat = similarity_matrix(&names(5), &vec![vec![1.0]; 5]).unwrap();
        assert_eq!(top_k_neighbors(&flat, 3, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn jaccard_examples() {
        let set = |s: &str| s.chars().collect::<BTreeSet<char>>();
        assert_eq!(jaccard(&set("abc"), &set("abc")), 1.0);
        assert_eq!(jaccard(&set("ab"), &set("cd")), 0.0);
        assert_eq!(jaccard(&set("abcde"), &set("abcfg")), 3.0 / 7.0);
        assert_eq!(jaccard::<char>(&BTreeSet::new(), &BTreeSet::new()), 1.0);
    }

    #[test]
    fn overlap_of_identical_matrices() {
        let vecs: Vec<Vec<f64>> = (0..7)
            .map(|i| vec![(i as f64).sin(), (i as f64).cos()])
            .collect();
        let a = similarity_matrix(&names(7), &vecs).unwrap();
        let rep = neighbor_overlap_report(&a, &a, 3, 10).unwrap();
        assert_eq!(rep.mean, 1.0);
        assert!(rep.per_node.values().all(|&j| j == 1.0));
        assert_eq!(
            rep.by_k.iter().map(|km| km.k).collect::<Vec<_>>(),
            (1..=6).collect::<Vec<_>>()
        );
    }

    #[test]
    fn cross_period_needs_two() {
        let emb = Embedding::new(names(3), vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let one: BTreeMap<Period, Embedding> = [(Period::Night, emb.clone())].into();
        assert!(cross_period_correlation(&one, PairMeasure::Similarity).is_err());
        let two: BTreeMap<Period, Embedding> =
            [(Period::Night, emb.clone()), (Period::Morning, emb)].into();
        let m = cross_period_correlation(&two, PairMeasure::Similarity).unwrap();
        assert_eq!(m.periods, vec![Period::Morning, Period::Night]);
        assert!((m.rho[0][1] - 1.0).abs() < 1e-12);
        assert_eq!(m.rho[0][1], m.rho[1][0]);
        assert_eq!(m.rho[0][0], 1.0);
    }

    #[test]
    fn matrix_file_round_trip_and_errors() {
        let vecs: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64 / 3.0, 0.1]).collect();
        let m = similarity_matrix(&names(4), &vecs).unwrap();
        let mut buf = Vec::new();
        write_similarity_matrix(&mut buf, &m).unwrap();
        assert_eq!(read_similarity_matrix(buf.as_slice()).unwrap(), m);

        let bad = ",a,b\na,1,x\nb,0.5,1\n";
        assert!(matches!(
            read_similarity_matrix(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
