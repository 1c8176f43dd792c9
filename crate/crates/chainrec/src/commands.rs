//! The four subcommands. Each writes its files under the output directory
//! and returns what it wrote so callers (and tests) can inspect it.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chainrec_core::explosion_scan::RecurrenceProfile;
use chainrec_core::homoclinic::{find_tangencies_with, find_tangency_parameters, record_at, HomoclinicRecord};
use chainrec_core::map_model::MapFamily;

use crate::config::RunConfig;
use crate::error::{CliError, ConfigError};
use crate::output::{self, EventJson, ProfileSummary, RecordJson, Summary};
use crate::pipeline::{par_detect, par_sweep, pool};
use crate::raster::Raster;

pub const COVERING_CSV: &str = "covering.csv";
pub const RASTER: &str = "recurrence.chxr";
pub const SUMMARY: &str = "summary.json";
pub const EVENTS: &str = "events.json";
pub const RECORDS: &str = "records.jsonl";
pub const PLOTDATA: &str = "plotdata.csv";

fn summary(cmd: &str, cfg: &RunConfig, profiles: &[RecurrenceProfile]) -> Summary {
    Summary {
        command: cmd.into(),
        family_id: cfg.family.family_id.clone(),
        n_boxes: cfg.resolution.n_boxes,
        final_boxes: cfg.resolution.final_boxes(),
        eps_factor: cfg.resolution.eps_factor,
        refine_levels: cfg.resolution.refine_levels,
        profiles: profiles.iter().map(ProfileSummary::from).collect(),
        events: None,
        unclassified: None,
        errors: Vec::new(),
    }
}

fn sweep(cfg: &RunConfig) -> Result<(rayon::ThreadPool, Vec<RecurrenceProfile>), CliError> {
    fs::create_dir_all(&cfg.out_dir)?;
    let pool = pool(cfg.workers)?;
    let t = Instant::now();
    let profiles = par_sweep(&pool, &cfg.family, &cfg.grid, &cfg.resolution);
    log::info!("swept {} parameters in {:.2?}", profiles.len(), t.elapsed());
    Ok((pool, profiles))
}

fn write_raster(cfg: &RunConfig, profiles: &[RecurrenceProfile]) -> Result<Raster, CliError> {
    let raster = output::raster_of(profiles, cfg.family.domain, cfg.resolution.final_boxes());
    output::create(&cfg.out_dir.join(RASTER), |w| raster.write_to(w))?;
    Ok(raster)
}

/// Covering CSV, raster and summary for every grid value.
pub fn cmd_chain(cfg: &RunConfig) -> Result<Summary, CliError> {
    let (_, profiles) = sweep(cfg)?;
    output::create(&cfg.out_dir.join(COVERING_CSV), |w| output::write_covering_csv(w, &profiles))?;
    write_raster(cfg, &profiles)?;
    let s = summary("chain", cfg, &profiles);
    output::write_json(&cfg.out_dir.join(SUMMARY), &s)?;
    Ok(s)
}

pub struct ScanOutput {
    pub summary: Summary,
    pub events: Vec<EventJson>,
}

impl ScanOutput {
    pub fn unclassified(&self) -> usize {
        self.summary.unclassified.unwrap_or(0)
    }
}

/// Sweep, detect and classify; events sorted by `(λ₀, x)`.
pub fn cmd_scan(cfg: &RunConfig) -> Result<ScanOutput, CliError> {
    let (pool, profiles) = sweep(cfg)?;
    write_raster(cfg, &profiles)?;
    let t = Instant::now();
    let det = par_detect(&pool, &profiles, &cfg.family, &cfg.scan, &cfg.resolution)?;
    log::info!("detected {} events in {:.2?}", det.events.len(), t.elapsed());
    let events: Vec<EventJson> = det.events.iter().map(|(e, err)| EventJson::new(e, err.clone())).collect();
    output::write_json(&cfg.out_dir.join(EVENTS), &events)?;
    let mut s = summary("scan", cfg, &profiles);
    s.events = Some(events.len());
    s.unclassified = Some(det.unclassified());
    s.errors = det.errors;
    output::write_json(&cfg.out_dir.join(SUMMARY), &s)?;
    Ok(ScanOutput { summary: s, events })
}

/// Homoclinic records at `lambda`. With `polish = Some(r)` the parameter is
/// first moved to the nearest critical landing in `[λ − r, λ + r]`.
pub fn cmd_tangency(cfg: &RunConfig, lambda: f64, polish: Option<f64>) -> Result<Vec<RecordJson>, CliError> {
    let fam = &cfg.family;
    if !(lambda >= fam.window.0 && lambda <= fam.window.1) {
        return Err(ConfigError {
            key: Some("--lambda".into()),
            line: None,
            message: format!("lambda {lambda} outside the family window [{}, {}]", fam.window.0, fam.window.1),
        }
        .into());
    }
    let records = match polish {
        Some(r) if r > 0.0 => polished(fam, lambda, r, cfg)?,
        _ => {
            let rep = find_tangencies_with(fam, lambda, cfg.scan.period_max, &cfg.tol)?;
            for d in &rep.diagnostics {
                log::warn!("{d}");
            }
            rep.records
        }
    };
    let out: Vec<RecordJson> = records.iter().map(RecordJson::from).collect();
    fs::create_dir_all(&cfg.out_dir)?;
    output::create(&cfg.out_dir.join(RECORDS), |w| output::write_jsonl(w, &out))?;
    Ok(out)
}

fn polished(fam: &MapFamily, lambda: f64, r: f64, cfg: &RunConfig) -> Result<Vec<HomoclinicRecord>, CliError> {
    let lo = (lambda - r).max(fam.window.0);
    let hi = (lambda + r).min(fam.window.1);
    let mut params = find_tangency_parameters(
        fam,
        lo,
        hi,
        cfg.scan.period_max,
        &cfg.tol,
        cfg.scan.tangency_samples,
        cfg.scan.tangency_candidates,
    )?;
    params.sort_by(|u, v| (u.lambda - lambda).abs().partial_cmp(&(v.lambda - lambda).abs()).unwrap());
    for p in params {
        match record_at(fam, p.lambda, p.critical_index, p.k, p.period, &cfg.tol) {
            Ok(rec) => return Ok(vec![rec]),
            Err(e) => log::debug!("landing at {} rejected: {e}", p.lambda),
        }
    }
    Ok(Vec::new())
}

/// Expands a raster into `lambda,box_lo,box_hi` rows. Writes to
/// `out/plotdata.csv` when `out` is given, else to stdout.
pub fn cmd_plotdata(raster: &Path, out: Option<&Path>) -> Result<(Option<PathBuf>, u64), CliError> {
    let bytes = fs::read(raster)?;
    let r = Raster::from_bytes(&bytes)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(PLOTDATA);
            let mut n = 0;
            output::create(&path, |w| {
                n = output::write_plotdata_csv(w, &r)?;
                Ok(())
            })?;
            Ok((Some(path), n))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match output::write_plotdata_csv(&mut lock, &r) {
                Ok(n) => Ok((None, n)),
                // reader went away (`| head`); nothing left to report
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok((None, 0)),
                Err(e) => Err(e.into()),
            }
        }
    }
}
