//! Sweep and detection on a worker pool. Work items are fanned out with
//! order-preserving collects, so output never depends on scheduling.

use std::io;

use chainrec_core::explosion_scan::{
    attribute_group, group_onsets, localize_candidate, merge_events, profile, scan_candidates, Cause, ExplosionEvent,
    RecurrenceProfile, Resolution, ScanConfig,
};
use chainrec_core::map_model::MapFamily;
use rayon::prelude::*;

pub fn pool(workers: usize) -> io::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(io::Error::other)
}

pub fn par_sweep(pool: &rayon::ThreadPool, family: &MapFamily, grid: &[f64], res: &Resolution) -> Vec<RecurrenceProfile> {
    pool.install(|| grid.par_iter().map(|&l| profile(family, l, res)).collect())
}

/// An event and the message of a failed attribution, if any.
pub type Attributed = (ExplosionEvent, Option<String>);

#[derive(Debug, Default)]
pub struct Detection {
    pub events: Vec<Attributed>,
    /// Candidates whose localization failed.
    pub errors: Vec<String>,
}

impl Detection {
    pub fn unclassified(&self) -> usize {
        self.events.iter().filter(|(e, _)| e.cause == Cause::Unclassified).count()
    }
}

/// Same stages as the serial detector. A failed attribution keeps the event
/// as unclassified with the error attached.
pub fn par_detect(
    pool: &rayon::ThreadPool,
    profiles: &[RecurrenceProfile],
    family: &MapFamily,
    cfg: &ScanConfig,
    res: &Resolution,
) -> chainrec_core::Result<Detection> {
    let cands = scan_candidates(profiles, cfg)?;
    pool.install(|| {
        let localized: Vec<_> = cands
            .par_iter()
            .map(|c| localize_candidate(family, res, c, cfg).map_err(|e| format!("candidate box {} near lambda {}: {e}", c.box_index, c.lambda_rec)))
            .collect();
        let mut det = Detection::default();
        let mut raw = Vec::new();
        for r in localized {
            match r {
                Ok(Some(ev)) => raw.push(ev),
                Ok(None) => {}
                Err(e) => det.errors.push(e),
            }
        }
        let groups = group_onsets(raw, cfg);
        let attributed: Vec<Option<Attributed>> = groups
            .into_par_iter()
            .map(|g| {
                let first = g[0].clone();
                match attribute_group(g, family, cfg, res) {
                    Ok(kept) => kept.map(|e| (e, None)),
                    Err(e) => Some((first, Some(e.to_string()))),
                }
            })
            .collect();
        let (ok, failed): (Vec<_>, Vec<_>) = attributed.into_iter().flatten().partition(|(_, err)| err.is_none());
        let merged = merge_events(ok.into_iter().map(|(e, _)| e).collect());
        det.events = merged.into_iter().map(|e| (e, None)).chain(failed).collect();
        det.events.sort_by(|(u, _), (v, _)| {
            u.lambda0
                .partial_cmp(&v.lambda0)
                .unwrap()
                .then(u.x.partial_cmp(&v.x).unwrap())
        });
        Ok(det)
    })
}
