//! Serialized views of core results and the files written per run.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chainrec_core::explosion_scan::{Evidence, ExplosionEvent, RecurrenceProfile};
use chainrec_core::homoclinic::{predict_explosion, HomoclinicRecord, Interval};
use chainrec_core::map_model::PeriodicOrbit;
use serde::{Deserialize, Serialize};

use crate::raster::{Raster, RasterRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub period: usize,
    pub points: Vec<f64>,
    pub multiplier: f64,
    pub classification: String,
}

impl From<&PeriodicOrbit> for OrbitJson {
    fn from(o: &PeriodicOrbit) -> Self {
        OrbitJson {
            period: o.period(),
            points: o.points.clone(),
            multiplier: o.multiplier,
            classification: o.classification.name().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub family_id: String,
    pub lambda: f64,
    pub x0: f64,
    pub period: usize,
    pub multiplier: f64,
    pub w: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub approach_branch: String,
    pub local_side: String,
    pub crossing: bool,
    pub exclusive_branch: bool,
    pub in_left: bool,
    pub in_right: bool,
    pub derivative_sign: i8,
    pub branch_relation: String,
    pub left_branch: Option<[f64; 2]>,
    pub right_branch: Option<[f64; 2]>,
    pub landing_error: f64,
    pub verdict: String,
}

fn iv(i: Option<Interval>) -> Option<[f64; 2]> {
    i.map(|i| [i.lo, i.hi])
}

impl From<&HomoclinicRecord> for RecordJson {
    fn from(r: &HomoclinicRecord) -> Self {
        RecordJson {
            family_id: r.family_id.clone(),
            lambda: r.lambda,
            x0: r.x0,
            period: r.period,
            multiplier: r.multiplier,
            w: r.w,
            l: r.l,
            approach_branch: r.approach_branch.name().into(),
            local_side: r.local_side.name().into(),
            crossing: r.crossing,
            exclusive_branch: r.exclusive_branch,
            in_left: r.in_left,
            in_right: r.in_right,
            derivative_sign: r.derivative_sign(),
            branch_relation: r.branches.relation.name().into(),
            left_branch: iv(r.branches.left),
            right_branch: iv(r.branches.right),
            landing_error: r.landing_error,
            verdict: predict_explosion(r).name().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceJson {
    None,
    Orbit { lambda: f64, orbit: OrbitJson },
    Record { record: RecordJson },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventJson {
    pub x: f64,
    pub lambda0: f64,
    pub lambda_box: f64,
    pub lambda_est: f64,
    pub bracket: [f64; 2],
    pub side: String,
    pub delta: f64,
    pub cause: String,
    pub verdict: Option<String>,
    pub evidence: EvidenceJson,
    pub resolution_limited: bool,
    pub search_window: [f64; 2],
    pub n_boxes: usize,
    /// Attribution failure, if any; the event is then unclassified.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl EventJson {
    pub fn new(e: &ExplosionEvent, error: Option<String>) -> Self {
        EventJson {
            x: e.x,
            lambda0: e.lambda0,
            lambda_box: e.lambda_box,
            lambda_est: e.lambda_est,
            bracket: [e.bracket.0, e.bracket.1],
            side: e.side.name().into(),
            delta: e.delta,
            cause: e.cause.name().into(),
            verdict: e.verdict.map(|v| v.name().into()),
            evidence: match &e.evidence {
                Evidence::None => EvidenceJson::None,
                Evidence::Orbit { lambda, orbit } => EvidenceJson::Orbit {
                    lambda: *lambda,
                    orbit: orbit.into(),
                },
                Evidence::Record(r) => EvidenceJson::Record { record: r.into() },
            },
            resolution_limited: e.resolution_limited,
            search_window: [e.search_window.0, e.search_window.1],
            n_boxes: e.n_boxes,
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub lambda: f64,
    pub measure: f64,
    pub components: usize,
    pub recurrent_boxes: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl From<&RecurrenceProfile> for ProfileSummary {
    fn from(p: &RecurrenceProfile) -> Self {
        ProfileSummary {
            lambda: p.lambda,
            measure: p.measure,
            components: p.components,
            recurrent_boxes: p.covering.as_ref().map_or(0, |c| c.count()),
            error: p.error.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub command: String,
    pub family_id: String,
    pub n_boxes: usize,
    pub final_boxes: usize,
    pub eps_factor: f64,
    pub refine_levels: usize,
    pub profiles: Vec<ProfileSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub events: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unclassified: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

/// Raster of every profile that produced a covering.
pub fn raster_of(profiles: &[RecurrenceProfile], domain: (f64, f64), n_boxes: usize) -> Raster {
    Raster {
        n_boxes: n_boxes as u32,
        a: domain.0,
        b: domain.1,
        rows: profiles
            .iter()
            .filter_map(|p| p.covering.as_ref().map(|c| RasterRow::from_covering(p.lambda, c)))
            .collect(),
    }
}

/// `lambda,box,x_lo,x_hi,component`, one row per recurrent box.
pub fn write_covering_csv<W: Write>(w: &mut W, profiles: &[RecurrenceProfile]) -> io::Result<()> {
    writeln!(w, "lambda,box,x_lo,x_hi,component")?;
    for p in profiles {
        let Some(c) = &p.covering else { continue };
        for i in c.recurrent_indices() {
            let (lo, hi) = c.partition.bounds(i);
            writeln!(w, "{},{},{},{},{}", p.lambda, i, lo, hi, c.component[i])?;
        }
    }
    Ok(())
}

/// `lambda,box_lo,box_hi`, one row per recurrent box of the raster.
pub fn write_plotdata_csv<W: Write>(w: &mut W, raster: &Raster) -> io::Result<u64> {
    writeln!(w, "lambda,box_lo,box_hi")?;
    let mut n = 0;
    for row in &raster.rows {
        for i in row.boxes() {
            let (lo, hi) = raster.box_bounds(i);
            writeln!(w, "{},{},{}", row.lambda, lo, hi)?;
            n += 1;
        }
    }
    Ok(n)
}

pub fn write_jsonl<W: Write, T: Serialize>(w: &mut W, items: &[T]) -> io::Result<()> {
    for it in items {
        serde_json::to_writer(&mut *w, it)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

pub fn create<F>(path: &Path, body: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>,
{
    let mut w = BufWriter::new(fs::File::create(path)?);
    body(&mut w)?;
    w.flush()
}
