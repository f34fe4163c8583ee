use std::io::{BufRead, Write};

use super::Embedding;
use crate::error::{Error, Result};

/// Writes `<node_count> <dim>` then one `<zip> <v_1> ... <v_d>` row per node
/// with 17 significant digits, which round-trips every f64 exactly.
pub fn save_embedding<W: Write>(mut w: W, emb: &Embedding) -> Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (zip, v) in emb.iter() {
        if zip.is_empty() || zip.chars().any(char::is_whitespace) {
            return Err(Error::Parameter(format!(
                "zip {zip:?} cannot be written to an embedding file"
            )));
        }
        write!(w, "{zip}")?;
        for x in v {
            write!(w, " {x:.16e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads the format produced by [`save_embedding`]. Lines starting with `#`
/// are ignored.
pub fn load_embedding<R: BufRead>(r: R) -> Result<Embedding> {
    let mut header: Option<(usize, usize)> = None;
    let mut nodes = Vec::new();
    let mut vectors = Vec::new();
    let mut last_line = 0;
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx as u64 + 1;
        last_line = line_no;
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let Some((n, d)) = header else {
            let mut num = |name: &str| -> Result<usize> {
                let tok = cols
                    .next()
                    .ok_or_else(|| Error::parse(line_no, name, "missing value"))?;
                tok.parse()
                    .map_err(|_| Error::parse(line_no, name, format!("not an integer: {tok:?}")))
            };
            let n = num("node_count")?;
            let d = num("dim")?;
            if cols.next().is_some() {
                return Err(Error::parse(
                    line_no,
                    "<header>",
                    "expected `<node_count> <dim>`",
                ));
            }
            if d == 0 {
                return Err(Error::parse(line_no, "dim", "dimension must be >= 1"));
            }
            header = Some((n, d));
            continue;
        };
        if nodes.len() == n {
            return Err(Error::parse(
                line_no,
                "<row>",
                format!("more than the {n} declared rows"),
            ));
        }
        let zip = cols
            .next()
            .expect("non-empty line has a first token")
            .to_string();
        let v: Vec<f64> = cols
            .enumerate()
            .map(|(k, tok)| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        Error::parse(
                            line_no,
                            format!("v_{}", k + 1),
                            format!("bad value {tok:?}"),
                        )
                    })
            })
            .collect::<Result<_>>()?;
        if v.len() != d {
            return Err(Error::parse(
                line_no,
                "<row>",
                format!("expected {d} components, found {}", v.len()),
            ));
        }
        nodes.push(zip);
        vectors.push(v);
    }
    let (n, _) =
        header.ok_or_else(|| Error::parse(1, "<header>", "missing `<node_count> <dim>` line"))?;
    if nodes.len() != n {
        return Err(Error::parse(
            last_line,
            "<row>",
            format!("header declares {n} nodes but {} rows follow", nodes.len()),
        ));
    }
    Embedding::new(nodes, vectors)
}
