use std::fs;
use std::path::Path;

use drawstring_core::profile::{
    BoundaryFunction, BoundaryValues, DrawstringProfile, GeometryConstants, LogLogRadius, ProfileParams,
    RadialPoint,
};
use drawstring_core::verifier::{Location, VerificationReport};
use drawstring_core::pulled::{Edge, PulledSpace};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, Result};

/// Decimal text with 17 significant digits; `inf`, `-inf` and `nan` for
/// non-finite values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes a comma-separated table with a header row and LF line endings.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// A JSON number, written as a string when it is not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonNum(pub f64);

impl Serialize for JsonNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&num(self.0))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsDoc {
    pub error_coeffs: [f64; 5],
    pub ambient_curvature_bound: f64,
    pub tube_radius: f64,
    pub estimate_radius: f64,
    pub sigma_area: f64,
}

/// On-disk form of a [`DrawstringProfile`].
///
/// `r2` may be `0` when the core radius underflows; `r2_loglog` is exact.
/// `v0_value` is the constant value, or the minimum for periodic data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub n: u32,
    pub eps: f64,
    pub r1: f64,
    pub r2: f64,
    pub r2_loglog: f64,
    pub c1: f64,
    pub c2: f64,
    pub consts: ConstantsDoc,
    pub v0_kind: String,
    pub v0_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0_period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0_samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0_c2_norm_sq: Option<f64>,
}

impl ProfileDoc {
    pub fn from_profile(p: &DrawstringProfile) -> Self {
        let c = p.consts();
        let params = p.params();
        let v0 = p.v0();
        let (kind, period, samples, norm) = match v0.values() {
            BoundaryValues::Constant(_) => ("constant", None, None, None),
            BoundaryValues::Periodic { period, samples } => {
                ("periodic", Some(*period), Some(samples.clone()), Some(v0.c2_norm_sq))
            }
        };
        ProfileDoc {
            n: c.dim,
            eps: p.eps(),
            r1: params.outer_radius,
            r2: params.core_radius.radius(),
            r2_loglog: params.core_radius.loglog(),
            c1: params.h_amplitude,
            c2: params.w_slope,
            consts: ConstantsDoc {
                error_coeffs: c.error_coeffs,
                ambient_curvature_bound: c.ambient_curvature_bound,
                tube_radius: c.tube_radius,
                estimate_radius: c.estimate_radius,
                sigma_area: c.sigma_area,
            },
            v0_kind: kind.into(),
            v0_value: v0.constant_value().unwrap_or_else(|| v0.min_value()),
            v0_period: period,
            v0_samples: samples,
            v0_c2_norm_sq: norm,
        }
    }

    pub fn to_profile(&self) -> Result<DrawstringProfile> {
        let consts = GeometryConstants {
            dim: self.n,
            error_coeffs: self.consts.error_coeffs,
            ambient_curvature_bound: self.consts.ambient_curvature_bound,
            tube_radius: self.consts.tube_radius,
            estimate_radius: self.consts.estimate_radius,
            sigma_area: self.consts.sigma_area,
        };
        let v0 = match self.v0_kind.as_str() {
            "constant" => BoundaryFunction::constant(self.v0_value)?,
            "periodic" => match (&self.v0_period, &self.v0_samples, &self.v0_c2_norm_sq) {
                (Some(period), Some(samples), Some(norm)) => {
                    BoundaryFunction::periodic(*period, samples.clone(), *norm)?
                }
                _ => {
                    return Err(CliError::Config(
                        "periodic v0 needs v0_period, v0_samples and v0_c2_norm_sq".into(),
                    ))
                }
            },
            other => return Err(CliError::Config(format!("unknown v0_kind {other:?}"))),
        };
        let params = ProfileParams {
            outer_radius: self.r1,
            core_radius: LogLogRadius::from_loglog(self.r2_loglog)?,
            h_amplitude: self.c1,
            w_slope: self.c2,
        };
        Ok(DrawstringProfile::from_params(consts, v0, self.eps, params)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Ordered name/value pairs written as a JSON object.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamMap(pub Vec<(String, f64)>);

impl Serialize for ParamMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, &JsonNum(*v))?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocationDoc {
    Radius { r: JsonNum },
    LogLog { loglog: JsonNum },
    Member {
        index: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        r: Option<JsonNum>,
        #[serde(skip_serializing_if = "Option::is_none")]
        loglog: Option<JsonNum>,
    },
    Pair { a: usize, b: usize },
    Index { index: usize },
    Global,
}

impl From<Location> for LocationDoc {
    fn from(l: Location) -> Self {
        match l {
            Location::Radius(r) => LocationDoc::Radius { r: JsonNum(r) },
            Location::LogLog(t) => LocationDoc::LogLog { loglog: JsonNum(t) },
            Location::Member { index, point } => match point {
                RadialPoint::Radius(r) => LocationDoc::Member {
                    index,
                    r: Some(JsonNum(r)),
                    loglog: None,
                },
                RadialPoint::LogLog(t) => LocationDoc::Member {
                    index,
                    r: None,
                    loglog: Some(JsonNum(t)),
                },
            },
            Location::Pair(a, b) => LocationDoc::Pair { a, b },
            Location::Index(index) => LocationDoc::Index { index },
            Location::Global => LocationDoc::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationDoc {
    pub location: LocationDoc,
    pub margin: JsonNum,
}

/// On-disk form of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDoc {
    pub check_id: String,
    pub params: ParamMap,
    pub grid_spec: String,
    pub n_points: usize,
    pub worst_margin: JsonNum,
    pub worst_location: Option<LocationDoc>,
    pub tolerance: JsonNum,
    pub strict: bool,
    pub violations: Vec<ViolationDoc>,
    pub violation_count: usize,
    pub passed: bool,
}

impl From<&VerificationReport> for ReportDoc {
    fn from(r: &VerificationReport) -> Self {
        ReportDoc {
            check_id: r.check_id.clone(),
            params: ParamMap(r.params.clone()),
            grid_spec: r.grid_spec.clone(),
            n_points: r.n_points,
            worst_margin: JsonNum(r.worst_margin),
            worst_location: r.worst_location.map(LocationDoc::from),
            tolerance: JsonNum(r.tolerance),
            strict: r.strict,
            violations: r
                .violations
                .iter()
                .map(|v| ViolationDoc {
                    location: v.location.into(),
                    margin: JsonNum(v.margin),
                })
                .collect(),
            violation_count: r.violation_count,
            passed: r.passed,
        }
    }
}

/// Writes a graph as `nodes.csv` (`id,x,y,t,pulled`) and `edges.csv`
/// (`a,b,length`).
pub fn write_space(space: &PulledSpace, nodes: &Path, edges: &Path) -> Result<()> {
    let node_rows = space.coords().iter().enumerate().map(|(i, p)| {
        vec![
            i.to_string(),
            num(p[0]),
            num(p[1]),
            num(p[2]),
            space.in_pulled(i).to_string(),
        ]
    });
    write_csv(nodes, &["id", "x", "y", "t", "pulled"], node_rows)?;
    let edge_rows = space
        .edges()
        .iter()
        .map(|e| vec![e.a.to_string(), e.b.to_string(), num(e.length)]);
    write_csv(edges, &["a", "b", "length"], edge_rows)
}

#[derive(Debug, Deserialize)]
struct EdgeRow {
    a: usize,
    b: usize,
    length: f64,
}

#[derive(Debug, Deserialize)]
struct NodeRow {
    id: usize,
    x: f64,
    y: f64,
    t: f64,
    pulled: bool,
}

/// Reads a graph written by [`write_space`].
pub fn read_space(nodes: &Path, edges: &Path) -> Result<PulledSpace> {
    let mut coords = Vec::new();
    let mut k = Vec::new();
    for row in csv::Reader::from_path(nodes)?.deserialize() {
        let row: NodeRow = row?;
        if row.id != coords.len() {
            return Err(CliError::Config(format!("node ids must be 0, 1, 2, ...; found {}", row.id)));
        }
        if row.pulled {
            k.push(row.id);
        }
        coords.push([row.x, row.y, row.t]);
    }
    let mut list = Vec::new();
    for row in csv::Reader::from_path(edges)?.deserialize() {
        let row: EdgeRow = row?;
        list.push(Edge {
            a: row.a,
            b: row.b,
            length: row.length,
        });
    }
    Ok(PulledSpace::from_parts(coords, &list, &k)?)
}
