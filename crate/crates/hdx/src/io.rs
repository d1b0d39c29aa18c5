//! File formats.
//!
//! Complex, text: a header line `dim n`, an optional line
//! `partite s_0 ... s_{V-1}` of side labels, then one facet per line as
//! `w v_0 ... v_n` with the weight optional (default 1). Lines starting with
//! `#` are comments.
//!
//! Complex, JSON: `{"dim": n, "facets": [{"w": 1.0, "verts": [...]}, ...],
//! "partition": [...]?}`.
//!
//! Embedding, text: one line per vertex, `v x_0 ... x_{n-1}`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::WeightedComplex;
use crate::error::{HdxError, Result};
use crate::overlap::Embedding;
use crate::simplex::VertexId;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetJson {
    #[serde(default = "one")]
    pub w: f64,
    pub verts: Vec<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dim: usize,
    pub facets: Vec<FacetJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub partition: Option<Vec<usize>>,
}

fn build(dim: usize, facets: Vec<(f64, Vec<usize>)>, partition: Option<Vec<usize>>) -> Result<WeightedComplex> {
    for (_, f) in &facets {
        if f.len() != dim + 1 {
            return Err(HdxError::Parse(format!(
                "facet {f:?} does not match dim {dim}"
            )));
        }
    }
    // Re-index sparse vertex ids densely, order preserving.
    let mut ids: Vec<usize> = facets.iter().flat_map(|(_, f)| f.iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    let rename: BTreeMap<usize, VertexId> =
        ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let verts: Vec<Vec<VertexId>> = facets
        .iter()
        .map(|(_, f)| f.iter().map(|v| rename[v]).collect())
        .collect();
    let homogeneous = facets.iter().all(|(w, _)| *w == 1.0);
    let weights: Option<Vec<f64>> = if homogeneous {
        None
    } else {
        Some(facets.iter().map(|(w, _)| *w).collect())
    };
    let x = WeightedComplex::from_facets(verts, weights)?;
    match partition {
        Some(p) => {
            if p.len() < ids.len() || ids.last().copied().unwrap_or(0) >= p.len() {
                return Err(HdxError::Parse(
                    "partition labels do not cover the vertex ids".into(),
                ));
            }
            let labels: Vec<usize> = ids.iter().map(|&old| p[old]).collect();
            x.with_partition(labels)
        }
        None => Ok(x),
    }
}

/// Parses the text complex format.
pub fn parse_complex_text<R: Read>(reader: R) -> Result<WeightedComplex> {
    let reader = BufReader::new(reader);
    let mut dim: Option<usize> = None;
    let mut partition: Option<Vec<usize>> = None;
    let mut facets: Vec<(f64, Vec<usize>)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().expect("nonempty line");
        match head {
            "dim" => {
                let d = tokens
                    .next()
                    .ok_or_else(|| HdxError::Parse(format!("line {}: dim needs a value", lineno + 1)))?;
                dim = Some(d.parse().map_err(|_| {
                    HdxError::Parse(format!("line {}: bad dimension {d:?}", lineno + 1))
                })?);
            }
            "partite" => {
                let labels: std::result::Result<Vec<usize>, _> =
                    tokens.map(|t| t.parse()).collect();
                partition = Some(labels.map_err(|_| {
                    HdxError::Parse(format!("line {}: bad side labels", lineno + 1))
                })?);
            }
            _ => {
                let d = dim.ok_or_else(|| {
                    HdxError::Parse("facet line before the dim header".into())
                })?;
                let mut nums: Vec<&str> = vec![head];
                nums.extend(tokens);
                let (w, verts) = if nums.len() == d + 2 {
                    let w: f64 = nums[0].parse().map_err(|_| {
                        HdxError::Parse(format!("line {}: bad weight {:?}", lineno + 1, nums[0]))
                    })?;
                    (w, &nums[1..])
                } else if nums.len() == d + 1 {
                    (1.0, &nums[..])
                } else {
                    return Err(HdxError::Parse(format!(
                        "line {}: expected {} or {} fields, got {}",
                        lineno + 1,
                        d + 1,
                        d + 2,
                        nums.len()
                    )));
                };
                let verts: std::result::Result<Vec<usize>, _> =
                    verts.iter().map(|t| t.parse()).collect();
                let verts = verts.map_err(|_| {
                    HdxError::Parse(format!("line {}: bad vertex id", lineno + 1))
                })?;
                facets.push((w, verts));
            }
        }
    }
    let dim = dim.ok_or_else(|| HdxError::Parse("missing dim header".into()))?;
    build(dim, facets, partition)
}

/// Parses the JSON mirror of the complex format.
pub fn parse_complex_json<R: Read>(reader: R) -> Result<WeightedComplex> {
    let parsed: ComplexJson = serde_json::from_reader(reader)?;
    build(
        parsed.dim,
        parsed.facets.into_iter().map(|f| (f.w, f.verts)).collect(),
        parsed.partition,
    )
}

/// Reads a complex from a path, dispatching on the `.json` extension.
pub fn read_complex_any(path: impl AsRef<Path>) -> Result<WeightedComplex> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_complex_json(file)
    } else {
        parse_complex_text(file)
    }
}

/// Serializes a complex to the JSON mirror.
pub fn complex_to_json(x: &WeightedComplex) -> ComplexJson {
    ComplexJson {
        dim: x.dim(),
        facets: x
            .facets()
            .iter()
            .map(|f| FacetJson {
                w: x.weight(f),
                verts: f.vertices().to_vec(),
            })
            .collect(),
        partition: x.partition().map(|p| p.to_vec()),
    }
}

/// Writes the text complex format.
pub fn write_complex_text<W: std::io::Write>(x: &WeightedComplex, w: &mut W) -> Result<()> {
    writeln!(w, "dim {}", x.dim())?;
    if let Some(p) = x.partition() {
        let labels: Vec<String> = p.iter().map(|l| l.to_string()).collect();
        writeln!(w, "partite {}", labels.join(" "))?;
    }
    for f in x.facets() {
        let verts: Vec<String> = f.vertices().iter().map(|v| v.to_string()).collect();
        writeln!(w, "{} {}", x.weight(f), verts.join(" "))?;
    }
    Ok(())
}

/// Parses an embedding file: one line per vertex, `v x_0 ... x_{n-1}`.
pub fn parse_embedding<R: Read>(reader: R, num_vertices: usize) -> Result<Embedding> {
    let reader = BufReader::new(reader);
    let mut coords: Vec<Option<Vec<f64>>> = vec![None; num_vertices];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let v: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| HdxError::Parse(format!("line {}: bad vertex id", lineno + 1)))?;
        if v >= num_vertices {
            return Err(HdxError::Parse(format!(
                "line {}: vertex {v} out of range",
                lineno + 1
            )));
        }
        let point: std::result::Result<Vec<f64>, _> = tokens.map(|t| t.parse()).collect();
        coords[v] = Some(point.map_err(|_| {
            HdxError::Parse(format!("line {}: bad coordinate", lineno + 1))
        })?);
    }
    let coords: Option<Vec<Vec<f64>>> = coords.into_iter().collect();
    let coords =
        coords.ok_or_else(|| HdxError::Parse("embedding misses some vertices".into()))?;
    Embedding::new(coords)
}
