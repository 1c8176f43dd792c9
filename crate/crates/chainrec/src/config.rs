//! Run configuration: flat TOML sections `family`, `grid`, `resolution`,
//! `tolerances` and `output`.
//!
//! Defaults (every key may be omitted except `family.kind`):
//!
//! | key                       | default                  |
//! |---------------------------|--------------------------|
//! | `resolution.n_boxes`      | 4096                     |
//! | `resolution.eps_factor`   | 1.0 (ε = eps_factor · h) |
//! | `resolution.refine_levels`| 0                        |
//! | `tolerances.tol_orbit`    | 1e-9                     |
//! | `tolerances.tol_hyp`      | 1e-4                     |
//! | `tolerances.tol_land`     | 1e-9                     |
//! | `tolerances.tol_sn`       | 1e-3                     |
//! | `tolerances.delta_boxes`  | 8                        |
//! | `tolerances.period_max`   | 8                        |
//! | `tolerances.iterate_cap`  | 32                       |
//! | `tolerances.branch_depth` | 64                       |
//! | `tolerances.transient`    | 10000                    |
//! | `tolerances.bracket`      | 1e-8                     |
//! | `output.dir`              | `out`                    |
//! | `output.workers`          | 1                        |

use std::path::{Path, PathBuf};

use chainrec_core::corpus;
use chainrec_core::explosion_scan::{Resolution, ScanConfig};
use chainrec_core::map_model::{FamilyKind, MapFamily};
use chainrec_core::Tolerances;
use serde::Deserialize;

use crate::error::ConfigError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: RawFamily,
    grid: Option<RawGrid>,
    resolution: Option<RawResolution>,
    tolerances: Option<RawTolerances>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    id: Option<String>,
    tag: Option<String>,
    window: Option<[f64; 2]>,
    domain: Option<[f64; 2]>,
    coefficients: Option<Vec<Vec<f64>>>,
    a: Option<[f64; 4]>,
    b: Option<[f64; 4]>,
    check_invariance: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    lo: Option<f64>,
    hi: Option<f64>,
    count: Option<usize>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResolution {
    n_boxes: Option<u64>,
    eps_factor: Option<f64>,
    refine_levels: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    tol_orbit: Option<f64>,
    tol_hyp: Option<f64>,
    tol_land: Option<f64>,
    tol_sn: Option<f64>,
    delta_boxes: Option<usize>,
    period_max: Option<usize>,
    iterate_cap: Option<usize>,
    branch_depth: Option<usize>,
    transient: Option<usize>,
    bracket: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    workers: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: MapFamily,
    pub grid: Vec<f64>,
    pub resolution: Resolution,
    pub tol: Tolerances,
    pub scan: ScanConfig,
    pub out_dir: PathBuf,
    pub workers: usize,
}

/// 1-based line of `key` inside `[section]`, scanning the raw text.
fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = "";
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim();
            continue;
        }
        if current == section {
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: &str, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError {
            key: Some(format!("{section}.{key}")),
            line: line_of(self.text, section, key),
            message: msg.into(),
        }
    }

    fn positive(&self, key: &str, v: Option<f64>, default: f64) -> Result<f64, ConfigError> {
        let v = v.unwrap_or(default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.err("tolerances", key, format!("{key} must be > 0")))
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        key: None,
        line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
        message: e.message().trim().to_string(),
    })?;
    let cx = Ctx { text };
    let family = build_family(&cx, &raw.family)?;

    let r = raw.resolution.unwrap_or_default();
    let n_boxes = r.n_boxes.unwrap_or(1 << 12);
    if n_boxes < 2 || !n_boxes.is_power_of_two() {
        return Err(cx.err("resolution", "n_boxes", "n_boxes must be a power of two"));
    }
    if n_boxes > 1 << 24 {
        return Err(cx.err("resolution", "n_boxes", "n_boxes must not exceed 2^24"));
    }
    let eps_factor = r.eps_factor.unwrap_or(1.0);
    if !(eps_factor >= 1.0 && eps_factor.is_finite()) {
        return Err(cx.err("resolution", "eps_factor", "eps_factor must be >= 1"));
    }
    let resolution = Resolution {
        n_boxes: n_boxes as usize,
        eps_factor,
        refine_levels: r.refine_levels.unwrap_or(0),
    };

    let t = raw.tolerances.unwrap_or_default();
    let d = Tolerances::default();
    let tol = Tolerances {
        tol_orbit: cx.positive("tol_orbit", t.tol_orbit, d.tol_orbit)?,
        tol_hyp: cx.positive("tol_hyp", t.tol_hyp, d.tol_hyp)?,
        tol_land: cx.positive("tol_land", t.tol_land, d.tol_land)?,
        tol_sn: cx.positive("tol_sn", t.tol_sn, d.tol_sn)?,
        iterate_cap: t.iterate_cap.unwrap_or(d.iterate_cap),
        branch_depth: t.branch_depth.unwrap_or(d.branch_depth),
        transient: t.transient.unwrap_or(d.transient),
        ..d
    };
    for (key, v) in [
        ("iterate_cap", tol.iterate_cap),
        ("branch_depth", tol.branch_depth),
        ("delta_boxes", t.delta_boxes.unwrap_or(1)),
        ("period_max", t.period_max.unwrap_or(1)),
    ] {
        if v == 0 {
            return Err(cx.err("tolerances", key, format!("{key} must be >= 1")));
        }
    }
    let period_max = t.period_max.unwrap_or(8);
    if period_max > chainrec_core::map_model::PERIOD_CAP {
        return Err(cx.err(
            "tolerances",
            "period_max",
            format!("period_max must be <= {}", chainrec_core::map_model::PERIOD_CAP),
        ));
    }
    let scan = ScanConfig {
        delta_boxes: t.delta_boxes.unwrap_or(8),
        period_max,
        tol,
        bracket: cx.positive("bracket", t.bracket, 1e-8)?,
        ..ScanConfig::default()
    };

    let grid = build_grid(&cx, raw.grid.unwrap_or_default(), family.window)?;

    let o = raw.output.unwrap_or_default();
    let workers = o.workers.unwrap_or(1);
    if workers == 0 {
        return Err(cx.err("output", "workers", "workers must be >= 1"));
    }
    Ok(RunConfig {
        family,
        grid,
        resolution,
        tol,
        scan,
        out_dir: PathBuf::from(o.dir.unwrap_or_else(|| "out".into())),
        workers,
    })
}

fn build_grid(cx: &Ctx<'_>, g: RawGrid, window: (f64, f64)) -> Result<Vec<f64>, ConfigError> {
    let values = match (g.values, g.lo, g.hi, g.count) {
        (Some(v), None, None, None) => {
            if v.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(cx.err("grid", "values", "values must be strictly increasing"));
            }
            v
        }
        (None, Some(lo), Some(hi), Some(count)) => {
            if count == 0 {
                return Err(cx.err("grid", "count", "count must be >= 1"));
            }
            if !(lo <= hi) || (count > 1 && lo == hi) {
                return Err(cx.err("grid", "hi", "hi must exceed lo"));
            }
            if count == 1 {
                vec![lo]
            } else {
                (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
            }
        }
        (None, None, None, None) => Vec::new(),
        (Some(_), ..) => return Err(cx.err("grid", "values", "give either values or lo/hi/count")),
        _ => return Err(cx.err("grid", "lo", "lo, hi and count must be given together")),
    };
    if let Some(&bad) = values.iter().find(|&&l| l < window.0 || l > window.1 || !l.is_finite()) {
        let key = if cx.text.contains("values") { "values" } else { "lo" };
        return Err(cx.err(
            "grid",
            key,
            format!("lambda {bad} outside the family window [{}, {}]", window.0, window.1),
        ));
    }
    Ok(values)
}

fn build_family(cx: &Ctx<'_>, f: &RawFamily) -> Result<MapFamily, ConfigError> {
    let need_window = || f.window.map(|w| (w[0], w[1])).ok_or_else(|| cx.err("family", "window", "window is required"));
    let need_domain = || f.domain.map(|d| (d[0], d[1])).ok_or_else(|| cx.err("family", "domain", "domain is required"));
    let checked = f.check_invariance.unwrap_or(true);
    let built = match f.kind.as_str() {
        "logistic" => MapFamily::logistic(need_window()?),
        "quadratic" if checked => MapFamily::quadratic(need_domain()?, need_window()?),
        "quadratic" => MapFamily::quadratic_extended(need_domain()?, need_window()?),
        "cubic" => {
            let a = f.a.ok_or_else(|| cx.err("family", "a", "a is required"))?;
            let b = f.b.ok_or_else(|| cx.err("family", "b", "b is required"))?;
            if checked {
                MapFamily::cubic(a, b, need_domain()?, need_window()?)
            } else {
                let coef = (0..4).map(|i| vec![a[i], b[i]]).collect();
                MapFamily::from_table_unchecked("cubic", FamilyKind::Cubic, coef, need_domain()?, need_window()?)
            }
        }
        "table" => {
            let coef = f
                .coefficients
                .clone()
                .ok_or_else(|| cx.err("family", "coefficients", "coefficients are required"))?;
            let id = f.id.as_deref().unwrap_or("table");
            if checked {
                MapFamily::from_table(id, FamilyKind::Table, coef, need_domain()?, need_window()?)
            } else {
                MapFamily::from_table_unchecked(id, FamilyKind::Table, coef, need_domain()?, need_window()?)
            }
        }
        "corpus" => {
            let tag = f.tag.as_deref().ok_or_else(|| cx.err("family", "tag", "tag is required"))?;
            let entries = corpus::entries().map_err(|e| cx.err("family", "tag", e.to_string()))?;
            let e = entries
                .into_iter()
                .find(|e| e.tag == tag)
                .ok_or_else(|| cx.err("family", "tag", format!("unknown corpus tag {tag}")))?;
            Ok(e.family)
        }
        other => {
            return Err(cx.err(
                "family",
                "kind",
                format!("unknown family kind `{other}` (logistic, quadratic, cubic, table, corpus)"),
            ))
        }
    };
    let fam = built.map_err(|e| cx.err("family", "kind", e.to_string()))?;
    Ok(match &f.id {
        Some(id) => fam.with_id(id),
        None => fam,
    })
}
