//! Dataset parsing and the JSON staircode document.
//!
//! Datasets come as a points CSV (`id,f[,c1..cd]`), optionally with a
//! separate distance CSV, or as JSON `{points: [{id, f, coords?}], dist?}`.
//! Distance tables may be strictly lower-triangular (`n - 1` rows), lower
//! triangular with a zero diagonal (`n` rows) or a full symmetric matrix.

use serde::{Deserialize, Serialize};

use crate::betti::GradedBetti;
use crate::error::{Error, Result};
use crate::space::AugmentedMetricSpace;
use crate::staircase::{Bar, Extended, Line, Staircase, Step};
use crate::staircode::{ConquerorSpan, DecoratedStaircase, Mode, Staircode};
use crate::treegram::Treegram;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| parse_err(format!("{what}: not a number: {field:?}")))?;
    if v.is_nan() {
        return Err(parse_err(format!("{what}: NaN is not allowed")));
    }
    Ok(v)
}

/// Points parsed from a CSV file: ids, filter values and optional coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTable {
    pub ids: Vec<String>,
    pub f: Vec<f64>,
    pub coords: Option<Vec<Vec<f64>>>,
}

pub fn parse_points_csv(text: &str) -> Result<PointTable> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if header.len() < 2 || &header[0] != "id" || &header[1] != "f" {
        return Err(parse_err("points CSV header must start with `id,f`"));
    }
    let dim = header.len() - 2;
    let mut table = PointTable { ids: Vec::new(), f: Vec::new(), coords: (dim > 0).then(Vec::new) };
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let row = line + 2;
        table.ids.push(record[0].to_string());
        table.f.push(parse_f64(&record[1], &format!("row {row}, f"))?);
        if let Some(coords) = table.coords.as_mut() {
            let c = (2..record.len())
                .map(|k| parse_f64(&record[k], &format!("row {row}, coordinate {}", k - 1)))
                .collect::<Result<Vec<_>>>()?;
            coords.push(c);
        }
    }
    Ok(table)
}

/// Parse a distance table in any accepted layout into strict lower rows.
pub fn parse_distance_csv(text: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let row = record
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| parse_f64(s, &format!("distance row {}", k + 1)))
            .collect::<Result<Vec<_>>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    normalize_rows(rows, n)
}

fn normalize_rows(rows: Vec<Vec<f64>>, n: usize) -> Result<Vec<Vec<f64>>> {
    let lens: Vec<usize> = rows.iter().map(Vec::len).collect();
    if lens.iter().enumerate().all(|(k, &l)| l == k + 1) && rows.len() + 1 == n {
        return Ok(rows);
    }
    if lens.iter().enumerate().all(|(k, &l)| l == k + 1) && rows.len() == n {
        if rows.iter().enumerate().any(|(k, r)| r[k] != 0.0) {
            return Err(parse_err("diagonal of the distance table must be zero"));
        }
        return Ok(rows.into_iter().skip(1).enumerate().map(|(k, r)| r[..=k].to_vec()).collect());
    }
    if rows.len() == n && lens.iter().all(|&l| l == n) {
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(parse_err("diagonal of the distance matrix must be zero"));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(parse_err(format!("distance matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        return Ok((1..n).map(|i| rows[i][..i].to_vec()).collect());
    }
    Err(parse_err(format!("distance table does not fit {n} points")))
}

/// Build a space from a point table and an optional distance table.
pub fn assemble(points: PointTable, dist: Option<Vec<Vec<f64>>>) -> Result<AugmentedMetricSpace> {
    match (dist, points.coords) {
        (Some(rows), coords) => {
            let space = AugmentedMetricSpace::from_lower_triangular(points.ids, points.f, rows)?;
            match coords {
                Some(c) => space.with_coords(c),
                None => Ok(space),
            }
        }
        (None, Some(c)) => AugmentedMetricSpace::from_coords(points.ids, points.f, c),
        (None, None) => Err(parse_err("dataset has neither coordinates nor distances")),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonPoint {
    id: String,
    f: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDataset {
    points: Vec<JsonPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<Vec<Vec<f64>>>,
}

pub fn parse_dataset_json(text: &str) -> Result<AugmentedMetricSpace> {
    let doc: JsonDataset = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let n = doc.points.len();
    let with_coords = doc.points.iter().filter(|p| p.coords.is_some()).count();
    if with_coords != 0 && with_coords != n {
        return Err(parse_err("either every point or no point has coordinates"));
    }
    let mut table = PointTable { ids: Vec::new(), f: Vec::new(), coords: (with_coords == n && n > 0).then(Vec::new) };
    for p in doc.points {
        table.ids.push(p.id);
        table.f.push(p.f);
        if let (Some(all), Some(c)) = (table.coords.as_mut(), p.coords) {
            all.push(c);
        }
    }
    let dist = doc.dist.map(|rows| normalize_rows(rows, n)).transpose()?;
    assemble(table, dist)
}

/// JSON form of a dataset; parses back to an identical space.
pub fn dataset_to_json(space: &AugmentedMetricSpace) -> String {
    let coords = space.coords();
    let doc = JsonDataset {
        points: (0..space.len())
            .map(|i| JsonPoint { id: space.id(i).to_string(), f: space.f(i), coords: coords.map(|c| c[i].clone()) })
            .collect(),
        dist: Some(space.lower_rows()),
    };
    serde_json::to_string_pretty(&doc).expect("dataset serialises")
}

/// Serialisable `+∞`-aware number: a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonExtended {
    Finite(f64),
    Text(InfTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

impl From<Extended> for JsonExtended {
    fn from(v: Extended) -> Self {
        match v {
            Extended::Finite(x) => JsonExtended::Finite(x),
            Extended::Infinite => JsonExtended::Text(InfTag::Inf),
        }
    }
}

impl From<JsonExtended> for Extended {
    fn from(v: JsonExtended) -> Self {
        match v {
            JsonExtended::Finite(x) => Extended::Finite(x),
            JsonExtended::Text(_) => Extended::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonStep {
    pub sigma: f64,
    pub u: JsonExtended,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonConqueror {
    pub sigma_from: f64,
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonStaircase {
    pub id: String,
    pub birth_sigma: f64,
    pub steps: Vec<JsonStep>,
    pub conqueror: Vec<JsonConqueror>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonBetti {
    pub b0: Vec<[f64; 2]>,
    pub b1: Vec<[f64; 2]>,
    pub b2: Vec<[f64; 2]>,
}

impl From<&GradedBetti> for JsonBetti {
    fn from(b: &GradedBetti) -> Self {
        let list = |d: usize| b.support(d).into_iter().map(|(s, e)| [s, e]).collect();
        JsonBetti { b0: list(0), b1: list(1), b2: list(2) }
    }
}

impl From<&JsonBetti> for GradedBetti {
    fn from(b: &JsonBetti) -> Self {
        let list = |v: &[[f64; 2]]| v.iter().map(|g| (g[0], g[1])).collect();
        GradedBetti::from_support([list(&b.b0), list(&b.b1), list(&b.b2)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonMeta {
    pub n: usize,
    pub mode: Mode,
    pub tie_breaks: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument {
    pub order: Vec<String>,
    pub staircases: Vec<JsonStaircase>,
    pub betti: JsonBetti,
    pub meta: JsonMeta,
}

/// A staircode together with its Betti numbers, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircodeDocument {
    pub staircode: Staircode,
    pub betti: GradedBetti,
}

impl StaircodeDocument {
    pub fn to_json_value(&self) -> JsonDocument {
        let code = &self.staircode;
        let staircases = code
            .entries
            .iter()
            .enumerate()
            .map(|(x, e)| JsonStaircase {
                id: code.ids[x].clone(),
                birth_sigma: e.staircase.birth_sigma(),
                steps: e.staircase.steps().iter().map(|s| JsonStep { sigma: s.sigma, u: s.u.into() }).collect(),
                conqueror: e
                    .conquerors
                    .iter()
                    .map(|c| JsonConqueror { sigma_from: c.sigma_from, id: code.ids[c.conqueror].clone() })
                    .collect(),
            })
            .collect();
        JsonDocument {
            order: code.order.iter().map(|&x| code.ids[x].clone()).collect(),
            staircases,
            betti: (&self.betti).into(),
            meta: JsonMeta { n: code.len(), mode: code.mode, tie_breaks: code.tie_breaks },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("document serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonDocument = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        Self::from_json_value(doc)
    }

    pub fn from_json_value(doc: JsonDocument) -> Result<Self> {
        let ids: Vec<String> = doc.staircases.iter().map(|s| s.id.clone()).collect();
        let index = |id: &str| -> Result<usize> {
            ids.iter().position(|x| x == id).ok_or_else(|| parse_err(format!("unknown point id {id:?}")))
        };
        let mut seen = std::collections::HashSet::new();
        if !ids.iter().all(|id| seen.insert(id.as_str())) {
            return Err(parse_err("staircase ids must be unique"));
        }
        if doc.meta.n != ids.len() || doc.order.len() != ids.len() {
            return Err(parse_err("order, staircases and meta.n disagree in size"));
        }
        let order = doc.order.iter().map(|id| index(id)).collect::<Result<Vec<_>>>()?;
        let mut used = vec![false; ids.len()];
        for &x in &order {
            if std::mem::replace(&mut used[x], true) {
                return Err(parse_err("order repeats a point"));
            }
        }
        let mut entries = Vec::with_capacity(ids.len());
        for (x, s) in doc.staircases.iter().enumerate() {
            let steps: Vec<Step> = s.steps.iter().map(|st| Step { sigma: st.sigma, u: st.u.into() }).collect();
            if steps.first().map(|st| st.sigma) != Some(s.birth_sigma) {
                return Err(parse_err(format!("staircase {} must start at its birth", s.id)));
            }
            let staircase = Staircase::new(x, steps).map_err(|e| parse_err(format!("staircase {}: {e}", s.id)))?;
            let conquerors = s
                .conqueror
                .iter()
                .map(|c| Ok(ConquerorSpan { sigma_from: c.sigma_from, conqueror: index(&c.id)? }))
                .collect::<Result<Vec<_>>>()?;
            if conquerors.windows(2).any(|w| w[1].sigma_from <= w[0].sigma_from) {
                return Err(parse_err(format!("conqueror spans of {} must be increasing", s.id)));
            }
            entries.push(DecoratedStaircase { staircase, conquerors });
        }
        let staircode = Staircode {
            ids,
            order,
            entries,
            ranked: None,
            mode: doc.meta.mode,
            tie_breaks: doc.meta.tie_breaks,
        };
        Ok(StaircodeDocument { staircode, betti: (&doc.betti).into() })
    }
}

/// Parse an explicit point order: ids separated by newlines or commas, or a
/// JSON array of ids.
pub fn parse_order(text: &str, space: &AugmentedMetricSpace) -> Result<Vec<usize>> {
    let names: Vec<String> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?
    } else {
        text.split([',', '\n']).map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
    };
    let order = names
        .iter()
        .map(|id| {
            space
                .ids()
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| parse_err(format!("order names unknown point {id:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    space.validate_order(&order)?;
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonBar {
    pub id: String,
    pub birth_t: f64,
    pub death_t: JsonExtended,
    pub birth: [f64; 2],
    pub death: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonBarcode {
    pub line: String,
    pub slope: f64,
    pub bars: Vec<JsonBar>,
}

pub fn barcode_json(code: &Staircode, line: &Line, bars: &[Bar]) -> JsonBarcode {
    JsonBarcode {
        line: line.spec_string(),
        slope: line.slope(),
        bars: bars
            .iter()
            .map(|b| {
                let p = b.birth_point(line);
                JsonBar {
                    id: code.ids[b.owner].clone(),
                    birth_t: b.birth,
                    death_t: b.death.into(),
                    birth: [p.0, p.1],
                    death: b.death_point(line).map(|q| [q.0, q.1]),
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonLeaf {
    pub id: String,
    pub birth_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonMerge {
    pub t: f64,
    pub conquered: String,
    pub into: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonTreegram {
    pub line: String,
    pub leaves: Vec<JsonLeaf>,
    pub merges: Vec<JsonMerge>,
}

pub fn treegram_json(code: &Staircode, line: &Line, t: &Treegram) -> JsonTreegram {
    JsonTreegram {
        line: line.spec_string(),
        leaves: t.leaves.iter().map(|l| JsonLeaf { id: code.ids[l.point].clone(), birth_t: l.birth }).collect(),
        merges: t
            .merges
            .iter()
            .map(|m| JsonMerge { t: m.height, conquered: code.ids[m.a].clone(), into: code.ids[m.b].clone() })
            .collect(),
    }
}
