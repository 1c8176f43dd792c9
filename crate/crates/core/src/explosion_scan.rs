//! Parameter sweeps, explosion detection and cause attribution, barricades
//! and a coarse ω-limit classifier.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::chain_graph::{build_graph_slice, chain_recurrent_set, refine_slice, BoxPartition, ChainSetApprox};
use crate::homoclinic::{
    build_backward_orbit, find_tangency_parameters, predict_explosion, record_at, HomoclinicRecord, Side, Verdict,
};
use crate::map_model::{find_saddle_node_parameter_with, orbits_of_period, MapFamily, PeriodicOrbit};
use crate::num::abs;
use crate::{Error, Result, Tolerances};

/// Box count, fattening and refinement depth used for one covering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub n_boxes: usize,
    /// `ε_num = eps_factor · h`, at least one.
    pub eps_factor: f64,
    pub refine_levels: usize,
}

impl Resolution {
    pub fn new(n_boxes: usize) -> Self {
        Resolution {
            n_boxes,
            eps_factor: 1.0,
            refine_levels: 0,
        }
    }

    /// Final box count after refinement.
    pub fn final_boxes(&self) -> usize {
        self.n_boxes << self.refine_levels
    }

    pub fn doubled(&self) -> Self {
        Resolution {
            n_boxes: self.n_boxes * 2,
            ..*self
        }
    }

    pub fn covering(&self, family: &MapFamily, lambda: f64) -> Result<ChainSetApprox> {
        if self.eps_factor < 1.0 {
            return Err(Error::InvalidArgument("eps_factor must be >= 1".into()));
        }
        let s = family.slice(lambda)?;
        let p = BoxPartition::for_family(family, self.n_boxes)?;
        let g = build_graph_slice(&s, p, self.eps_factor * p.h(), None)?;
        let mut c = chain_recurrent_set(&g);
        for _ in 0..self.refine_levels {
            c = refine_slice(&s, &c)?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceProfile {
    pub lambda: f64,
    pub covering: Option<ChainSetApprox>,
    pub measure: f64,
    pub components: usize,
    pub error: Option<String>,
}

pub fn profile(family: &MapFamily, lambda: f64, res: &Resolution) -> RecurrenceProfile {
    match res.covering(family, lambda) {
        Ok(c) => RecurrenceProfile {
            lambda,
            measure: c.measure(),
            components: c.n_components,
            covering: Some(c),
            error: None,
        },
        Err(e) => RecurrenceProfile {
            lambda,
            covering: None,
            measure: 0.0,
            components: 0,
            error: Some(e.to_string()),
        },
    }
}

/// One profile per grid value, in grid order.
pub fn sweep(family: &MapFamily, lambda_grid: &[f64], res: &Resolution) -> Vec<RecurrenceProfile> {
    lambda_grid.iter().map(|&l| profile(family, l, res)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cause {
    SaddleNode,
    TangencyCrossing,
    Unclassified,
}

impl Cause {
    pub fn name(self) -> &'static str {
        match self {
            Cause::SaddleNode => "saddle_node",
            Cause::TangencyCrossing => "tangency_crossing",
            Cause::Unclassified => "unclassified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    None,
    /// Orbit at the saddle-node parameter.
    Orbit { lambda: f64, orbit: PeriodicOrbit },
    Record(HomoclinicRecord),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplosionEvent {
    pub x: f64,
    /// Explosion parameter: the cause parameter once classified, else the
    /// box-level onset.
    pub lambda0: f64,
    /// Box-level onset: recurrent end of the final bisection bracket.
    pub lambda_box: f64,
    /// Explosion parameter extrapolated from the onsets at this and double
    /// resolution; causes are ranked by distance to it.
    pub lambda_est: f64,
    pub bracket: (f64, f64),
    /// Parameter side on which `B_δ(x)` is free of recurrence.
    pub side: Side,
    pub delta: f64,
    pub cause: Cause,
    pub evidence: Evidence,
    pub verdict: Option<Verdict>,
    pub resolution_limited: bool,
    /// Parameter window searched for a cause.
    pub search_window: (f64, f64),
    /// Box count the event was localized at.
    pub n_boxes: usize,
}

/// Knobs for detection and cause attribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Neighbourhood radius in boxes of the working resolution.
    pub delta_boxes: usize,
    pub period_max: usize,
    pub tol: Tolerances,
    /// Target width of the λ bracket.
    pub bracket: f64,
    /// Half-width of the cause search window; `None` uses the sweep step.
    pub cause_window: Option<f64>,
    /// λ samples for the tangency landing search.
    pub tangency_samples: usize,
    /// Landings examined per event.
    pub tangency_candidates: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            delta_boxes: 8,
            period_max: 8,
            tol: Tolerances::default(),
            bracket: 1e-8,
            cause_window: None,
            tangency_samples: 33,
            tangency_candidates: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NState {
    Void,
    Recurrent,
    Mixed,
}

fn prefix(c: &ChainSetApprox) -> Vec<u32> {
    let mut p = Vec::with_capacity(c.recurrent.len() + 1);
    p.push(0);
    let mut acc = 0;
    for &r in &c.recurrent {
        acc += r as u32;
        p.push(acc);
    }
    p
}

fn void_around(pre: &[u32], j: usize, d: usize) -> bool {
    let n = pre.len() - 1;
    let lo = j.saturating_sub(d);
    let hi = (j + d).min(n - 1);
    pre[hi + 1] - pre[lo] == 0
}

fn state(c: &ChainSetApprox, j: usize, d: usize) -> NState {
    if c.recurrent[j] {
        NState::Recurrent
    } else if void_around(&prefix(c), j, d) {
        NState::Void
    } else {
        NState::Mixed
    }
}

/// Distance in boxes to the nearest recurrent box.
fn void_radius(c: &ChainSetApprox) -> Vec<usize> {
    let n = c.recurrent.len();
    let mut d = vec![usize::MAX; n];
    let mut last: Option<usize> = None;
    for i in 0..n {
        if c.recurrent[i] {
            last = Some(i);
        }
        if let Some(l) = last {
            d[i] = i - l;
        }
    }
    last = None;
    for i in (0..n).rev() {
        if c.recurrent[i] {
            last = Some(i);
        }
        if let Some(l) = last {
            d[i] = d[i].min(l - i);
        }
    }
    d
}

/// A box recurrent at one grid value whose δ-neighbourhood is free of
/// recurrence at the adjacent one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub box_index: usize,
    pub lambda_void: f64,
    pub lambda_rec: f64,
    pub side: Side,
    pub step: f64,
}

fn candidates(lo: &RecurrenceProfile, hi: &RecurrenceProfile, d: usize) -> Vec<Candidate> {
    let (Some(cl), Some(ch)) = (&lo.covering, &hi.covering) else {
        return Vec::new();
    };
    if cl.recurrent.len() != ch.recurrent.len() {
        return Vec::new();
    }
    let step = hi.lambda - lo.lambda;
    let mut out = Vec::new();
    for (void_c, rec_c, side, lv, lr) in [
        (cl, ch, Side::Below, lo.lambda, hi.lambda),
        (ch, cl, Side::Above, hi.lambda, lo.lambda),
    ] {
        let pre = prefix(void_c);
        let rad = void_radius(void_c);
        let hits: Vec<usize> = (0..rec_c.recurrent.len())
            .filter(|&j| rec_c.recurrent[j] && void_around(&pre, j, d))
            .collect();
        // clusters of hits closer than 2δ share one representative
        let mut i = 0;
        while i < hits.len() {
            let mut best = hits[i];
            let mut k = i + 1;
            while k < hits.len() && hits[k] - hits[k - 1] <= 2 * d {
                if rad[hits[k]] > rad[best] {
                    best = hits[k];
                }
                k += 1;
            }
            out.push(Candidate {
                box_index: best,
                lambda_void: lv,
                lambda_rec: lr,
                side,
                step,
            });
            i = k;
        }
    }
    out
}

enum Localized {
    Event { lambda_void: f64, lambda_rec: f64, limited: bool },
    Gradual,
    /// The grid bracket does not hold at this resolution.
    Unbracketed,
}

fn localize(family: &MapFamily, res: &Resolution, cand: &Candidate, cfg: &ScanConfig) -> Result<Localized> {
    let d = cfg.delta_boxes;
    let j = cand.box_index;
    let (mut lv, mut lr) = (cand.lambda_void, cand.lambda_rec);
    if state(&res.covering(family, lr)?, j, d) != NState::Recurrent || state(&res.covering(family, lv)?, j, d) != NState::Void {
        return Ok(Localized::Unbracketed);
    }
    while abs(lr - lv) > cfg.bracket {
        let mid = 0.5 * (lv + lr);
        if mid == lv || mid == lr {
            break;
        }
        match state(&res.covering(family, mid)?, j, d) {
            NState::Recurrent => lr = mid,
            NState::Void => lv = mid,
            NState::Mixed => return Ok(Localized::Gradual),
        }
    }
    // the void certificate must hold across the whole void side of the bracket
    let mut limited = false;
    for t in [0.25, 0.5, 0.75, 1.0] {
        let l = lv + (cand.lambda_void - lv) * t;
        if state(&res.covering(family, l)?, j, d) != NState::Void {
            limited = true;
            break;
        }
    }
    Ok(Localized::Event {
        lambda_void: lv,
        lambda_rec: lr,
        limited,
    })
}

/// Scans adjacent profiles for boxes recurrent on one side whose
/// δ-neighbourhood is recurrence-free on the other, localizes each by
/// bisection in λ and attributes a cause.
pub fn detect_explosions(
    profiles: &[RecurrenceProfile],
    family: &MapFamily,
    cfg: &ScanConfig,
    res: &Resolution,
) -> Result<Vec<ExplosionEvent>> {
    let mut raw = Vec::new();
    for cand in scan_candidates(profiles, cfg)? {
        raw.extend(localize_candidate(family, res, &cand, cfg)?);
    }
    let mut out = Vec::new();
    for g in group_onsets(raw, cfg) {
        out.extend(attribute_group(g, family, cfg, res)?);
    }
    Ok(merge_events(out))
}

/// Candidates from every adjacent pair of profiles, in grid order.
pub fn scan_candidates(profiles: &[RecurrenceProfile], cfg: &ScanConfig) -> Result<Vec<Candidate>> {
    if profiles.len() < 3 {
        return Err(Error::NeedProfiles);
    }
    Ok(profiles
        .windows(2)
        .flat_map(|pair| candidates(&pair[0], &pair[1], cfg.delta_boxes))
        .collect())
}

/// Groups events by onset, in first-seen order; candidates of one
/// bifurcation localize to the same box-level parameter.
pub fn group_onsets(raw: Vec<ExplosionEvent>, cfg: &ScanConfig) -> Vec<Vec<ExplosionEvent>> {
    let mut groups: Vec<Vec<ExplosionEvent>> = Vec::new();
    for ev in raw {
        match groups
            .iter_mut()
            .find(|g| g[0].side == ev.side && abs(g[0].lambda_box - ev.lambda_box) <= 10.0 * cfg.bracket)
        {
            Some(g) => g.push(ev),
            None => groups.push(alloc::vec![ev]),
        }
    }
    groups
}

/// Cause attribution followed by the one-level-deeper certificate; `None`
/// if the event does not survive refinement.
pub fn attribute(ev: ExplosionEvent, family: &MapFamily, cfg: &ScanConfig, res: &Resolution) -> Result<Option<ExplosionEvent>> {
    let ev = classify_cause(ev, family, cfg, res)?;
    if ev.cause == Cause::Unclassified {
        return relocalize_deeper(ev, family, cfg, res);
    }
    Ok(reverifies(family, res, &ev)?.then_some(ev))
}

/// Refinement check for an event without a cause parameter: the same
/// localization must succeed one level deeper, where the onset has moved
/// toward the void-free side within the search window. The event is
/// reported at the refined onset; `None` if it does not localize there.
fn relocalize_deeper(ev: ExplosionEvent, family: &MapFamily, cfg: &ScanConfig, res: &Resolution) -> Result<Option<ExplosionEvent>> {
    let r = res_for(&ev, res).doubled();
    let p = BoxPartition::for_family(family, r.final_boxes())?;
    let j = p.box_of(ev.x);
    let d = 2 * cfg.delta_boxes;
    let (void_end, dir, reach) = match ev.side {
        Side::Below => (ev.bracket.0, 1.0, ev.search_window.1 - ev.lambda_box),
        Side::Above => (ev.bracket.1, -1.0, ev.lambda_box - ev.search_window.0),
    };
    let reach = reach.max(cfg.bracket);
    let mut rec = None;
    for k in 0..=6 {
        let t = ev.lambda_box + dir * reach * (1u32 << k) as f64 / 64.0;
        if t < family.window.0 || t > family.window.1 {
            break;
        }
        if state(&r.covering(family, t)?, j, d) == NState::Recurrent {
            rec = Some(t);
            break;
        }
    }
    let Some(t) = rec else { return Ok(None) };
    let cand = Candidate {
        box_index: j,
        lambda_void: void_end,
        lambda_rec: t,
        side: ev.side,
        step: t - void_end,
    };
    let deeper = ScanConfig {
        delta_boxes: d,
        ..*cfg
    };
    match localize(family, &r, &cand, &deeper)? {
        Localized::Event {
            lambda_void,
            lambda_rec,
            limited,
        } => Ok(Some(ExplosionEvent {
            x: p.center(j),
            lambda0: lambda_rec,
            lambda_box: lambda_rec,
            bracket: (lambda_void.min(lambda_rec), lambda_void.max(lambda_rec)),
            resolution_limited: ev.resolution_limited || limited,
            n_boxes: r.final_boxes(),
            ..ev
        })),
        Localized::Gradual | Localized::Unbracketed => Ok(None),
    }
}

/// The first member of an onset group that survives [`attribute`].
pub fn attribute_group(
    group: Vec<ExplosionEvent>,
    family: &MapFamily,
    cfg: &ScanConfig,
    res: &Resolution,
) -> Result<Option<ExplosionEvent>> {
    for ev in group {
        if let Some(e) = attribute(ev, family, cfg, res)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// Drops repeated attributions of one cause and sorts by `(λ₀, x)`.
pub fn merge_events(events: Vec<ExplosionEvent>) -> Vec<ExplosionEvent> {
    let mut out: Vec<ExplosionEvent> = Vec::new();
    for ev in events {
        if out.iter().any(|e| {
            e.cause == ev.cause && e.cause != Cause::Unclassified && e.side == ev.side && abs(e.lambda0 - ev.lambda0) <= 1e-7
        }) {
            continue;
        }
        out.push(ev);
    }
    out.sort_by(|u, v| {
        u.lambda0
            .partial_cmp(&v.lambda0)
            .unwrap()
            .then(u.x.partial_cmp(&v.x).unwrap())
    });
    out
}

/// Bisects in λ down to `cfg.bracket`; retried once at double resolution
/// when the void side does not hold across the bracket.
pub fn localize_candidate(
    family: &MapFamily,
    res: &Resolution,
    cand: &Candidate,
    cfg: &ScanConfig,
) -> Result<Option<ExplosionEvent>> {
    let (r, c, lambda_void, lambda_rec, limited) = match localize(family, res, cand, cfg)? {
        Localized::Gradual | Localized::Unbracketed => return Ok(None),
        Localized::Event {
            lambda_void,
            lambda_rec,
            limited: false,
        } => (*res, *cand, lambda_void, lambda_rec, false),
        Localized::Event {
            lambda_void, lambda_rec, ..
        } => {
            // retry once at double resolution, same point
            let r2 = res.doubled();
            let c2 = Candidate {
                box_index: cand.box_index * 2,
                ..*cand
            };
            match localize(family, &r2, &c2, cfg)? {
                Localized::Gradual => return Ok(None),
                Localized::Event {
                    lambda_void,
                    lambda_rec,
                    limited,
                } => (r2, c2, lambda_void, lambda_rec, limited),
                // the finer covering moves the onset out of the grid bracket
                Localized::Unbracketed => (*res, *cand, lambda_void, lambda_rec, true),
            }
        }
    };
    let p = BoxPartition::for_family(family, r.final_boxes())?;
    let x = p.center(c.box_index);
    let (lambda_est, search_window) = match cfg.cause_window {
        Some(w) => (lambda_rec, (lambda_rec - w, lambda_rec + w)),
        None => cause_window(family, &r, x, lambda_rec, cand, cfg)?,
    };
    Ok(Some(ExplosionEvent {
        x,
        lambda0: lambda_rec,
        lambda_box: lambda_rec,
        lambda_est,
        bracket: (lambda_void.min(lambda_rec), lambda_void.max(lambda_rec)),
        side: cand.side,
        delta: cfg.delta_boxes as f64 * p.h(),
        cause: Cause::Unclassified,
        evidence: Evidence::None,
        verdict: None,
        resolution_limited: limited,
        search_window,
        n_boxes: r.final_boxes(),
    }))
}

/// Box coverings are outer approximations, so the box-level onset sits on
/// the void side of the explosion parameter and moves toward it as the
/// boxes shrink. The onset at double resolution gives the shift `d`; with a
/// lag linear in ε the parameter is near `onset₂ + d`. The window runs from
/// `|d|` behind the onset to `2|d|` past the estimate. Falls back to two
/// sweep steps either side when no refined onset is found.
fn cause_window(
    family: &MapFamily,
    res: &Resolution,
    x: f64,
    lambda_rec: f64,
    cand: &Candidate,
    cfg: &ScanConfig,
) -> Result<(f64, (f64, f64))> {
    let step = abs(cand.step);
    let fallback = (lambda_rec, (lambda_rec - 2.0 * step, lambda_rec + 2.0 * step));
    let Some(fine) = refined_onset(family, res, x, lambda_rec, cand, cfg)? else {
        return Ok(fallback);
    };
    let d = fine - lambda_rec;
    let est = fine + d;
    let pad = abs(d) + 4.0 * cfg.bracket;
    let (a, b) = (lambda_rec - d.signum() * pad, est + 2.0 * d + d.signum() * 4.0 * cfg.bracket);
    Ok((est, (a.min(b), a.max(b))))
}

/// First parameter, moving from `lambda_rec` away from the void side, at
/// which `B_δ(x)` meets the double-resolution covering.
fn refined_onset(
    family: &MapFamily,
    res: &Resolution,
    x: f64,
    lambda_rec: f64,
    cand: &Candidate,
    cfg: &ScanConfig,
) -> Result<Option<f64>> {
    let r2 = res.doubled();
    let d2 = 2 * cfg.delta_boxes;
    let hit = |l: f64| -> Result<bool> {
        let c = r2.covering(family, l)?;
        Ok(!void_around(&prefix(&c), c.partition.box_of(x), d2))
    };
    if hit(lambda_rec)? {
        return Ok(Some(lambda_rec));
    }
    let dir = if cand.lambda_rec > cand.lambda_void { 1.0 } else { -1.0 };
    let step = abs(cand.step);
    let (w0, w1) = family.window;
    let mut near = lambda_rec;
    let mut far = None;
    for k in 0..10 {
        let t = lambda_rec + dir * step * (1u32 << k) as f64 / 8.0;
        if t < w0 || t > w1 {
            break;
        }
        if hit(t)? {
            far = Some(t);
            break;
        }
        near = t;
    }
    let Some(mut far) = far else { return Ok(None) };
    while abs(far - near) > cfg.bracket.max(1e-4 * abs(far - lambda_rec)) {
        let mid = 0.5 * (near + far);
        if hit(mid)? {
            far = mid;
        } else {
            near = mid;
        }
    }
    Ok(Some(far))
}

/// The event certificate one refinement level deeper: the box of `x` is
/// recurrent at `λ₀` and `B_δ(x)` stays recurrence-free at the void end of
/// the bracket.
pub fn reverifies(family: &MapFamily, res: &Resolution, ev: &ExplosionEvent) -> Result<bool> {
    let mut r = res_for(ev, res);
    r.refine_levels += 1;
    let c = r.covering(family, ev.lambda0)?;
    if !c.recurrent[c.partition.box_of(ev.x)] {
        return Ok(false);
    }
    let void_end = match ev.side {
        Side::Below => ev.bracket.0,
        Side::Above => ev.bracket.1,
    };
    let c = r.covering(family, void_end)?;
    let j = c.partition.box_of(ev.x);
    let d = libm::ceil(ev.delta / c.partition.h()) as usize;
    Ok(void_around(&prefix(&c), j, d))
}

fn clip_window(family: &MapFamily, w: (f64, f64)) -> (f64, f64) {
    (w.0.max(family.window.0), w.1.min(family.window.1))
}

/// Whether some box of `pts` lies in the component of the event box, in the
/// covering at `lambda` or at the event's box-level onset.
fn same_component(family: &MapFamily, res: &Resolution, ev: &ExplosionEvent, lambda: f64, pts: &[f64]) -> Result<bool> {
    for l in [lambda, ev.lambda_box] {
        let c = res_for(ev, res).covering(family, l)?;
        let e = c.partition.box_of(ev.x);
        if !c.recurrent[e] {
            continue;
        }
        let id = c.component[e];
        if pts.iter().any(|&p| {
            let j = c.partition.box_of(p);
            c.recurrent[j] && c.component[j] == id
        }) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn res_for(ev: &ExplosionEvent, res: &Resolution) -> Resolution {
    let mut r = *res;
    while r.final_boxes() < ev.n_boxes {
        r = r.doubled();
    }
    r
}

/// Saddle-node evidence and λ-polished tangencies, nearest to the estimated
/// onset first. A tangency counts only if its record predicts an explosion
/// and it shares the event's chain component.
pub fn classify_cause(mut ev: ExplosionEvent, family: &MapFamily, cfg: &ScanConfig, res: &Resolution) -> Result<ExplosionEvent> {
    let (lo, hi) = clip_window(family, ev.search_window);
    let sn = saddle_node_evidence(family, lo, hi, &ev, cfg, res)?;
    let sn_dist = sn.as_ref().map_or(f64::INFINITY, |(l, _)| abs(l - ev.lambda_est));
    let mut params = find_tangency_parameters(
        family,
        lo,
        hi,
        cfg.period_max,
        &cfg.tol,
        cfg.tangency_samples,
        cfg.tangency_candidates,
    )?;
    params.sort_by(|u, v| {
        abs(u.lambda - ev.lambda_est)
            .partial_cmp(&abs(v.lambda - ev.lambda_est))
            .unwrap()
    });
    for tp in params {
        if abs(tp.lambda - ev.lambda_est) >= sn_dist {
            break;
        }
        let Ok(rec) = record_at(family, tp.lambda, tp.critical_index, tp.k, tp.period, &cfg.tol) else {
            continue;
        };
        let v = predict_explosion(&rec);
        if !v.is_explosive() {
            continue;
        }
        if same_component(family, res, &ev, tp.lambda, &[rec.w, rec.x0])? {
            ev.cause = Cause::TangencyCrossing;
            ev.lambda0 = tp.lambda;
            ev.verdict = Some(v);
            ev.evidence = Evidence::Record(rec);
            return Ok(ev);
        }
    }
    match sn {
        Some((l, orbit)) => {
            ev.cause = Cause::SaddleNode;
            ev.lambda0 = l;
            ev.evidence = Evidence::Orbit { lambda: l, orbit };
        }
        None => ev.cause = Cause::Unclassified,
    }
    Ok(ev)
}

fn saddle_node_evidence(
    family: &MapFamily,
    lo: f64,
    hi: f64,
    ev: &ExplosionEvent,
    cfg: &ScanConfig,
    res: &Resolution,
) -> Result<Option<(f64, PeriodicOrbit)>> {
    let tol = &cfg.tol;
    let width = family.domain.1 - family.domain.0;
    let s_lo = family.slice(lo)?;
    let s_hi = family.slice(hi)?;
    let mut found: Vec<(f64, PeriodicOrbit)> = Vec::new();
    for n in 1..=cfg.period_max {
        if orbits_of_period(&s_lo, n, tol).len() == orbits_of_period(&s_hi, n, tol).len() {
            continue;
        }
        let Ok(l) = find_saddle_node_parameter_with(family, n, lo, hi, tol) else {
            continue;
        };
        let s = family.slice(l)?;
        let mut orbits = orbits_of_period(&s, n, tol);
        orbits.sort_by(|u, v| abs(u.multiplier - 1.0).partial_cmp(&abs(v.multiplier - 1.0)).unwrap());
        let Some(o) = orbits.into_iter().next() else { continue };
        if abs(o.multiplier - 1.0) > tol.tol_sn {
            continue;
        }
        // a period-doubled orbit is born on top of its parent orbit
        let parent = (1..n).filter(|d| n % d == 0).any(|d| {
            orbits_of_period(&s, d, tol)
                .iter()
                .any(|q| q.points.iter().any(|p| o.points.iter().any(|x| abs(x - p) < 1e-3 * width)))
        });
        if parent {
            continue;
        }
        if same_component(family, res, ev, l, &o.points)? {
            found.push((l, o));
        }
    }
    found.sort_by(|u, v| abs(u.0 - ev.lambda_est).partial_cmp(&abs(v.0 - ev.lambda_est)).unwrap());
    Ok(found.into_iter().next())
}

/// Recurrence certificate of a single point around `lambda0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCertificate {
    pub x: f64,
    pub recurrent_at: bool,
    /// `B_δ(x)` recurrence-free at every sampled parameter below `lambda0`.
    pub void_below: bool,
    pub void_above: bool,
}

impl PointCertificate {
    pub fn explosion_side(&self) -> Option<Side> {
        if !self.recurrent_at {
            return None;
        }
        if self.void_below {
            Some(Side::Below)
        } else if self.void_above {
            Some(Side::Above)
        } else {
            None
        }
    }
}

/// Samples `lambda0 ± o` for each offset inside the family window.
pub fn point_certificate(
    family: &MapFamily,
    lambda0: f64,
    x: f64,
    offsets: &[f64],
    res: &Resolution,
    delta_boxes: usize,
) -> Result<PointCertificate> {
    let c0 = res.covering(family, lambda0)?;
    let j = c0.partition.box_of(x);
    let recurrent_at = c0.recurrent[j];
    let side_void = |sign: f64| -> Result<bool> {
        let mut any = false;
        for &o in offsets {
            let l = lambda0 + sign * o;
            if l < family.window.0 || l > family.window.1 {
                continue;
            }
            any = true;
            let c = res.covering(family, l)?;
            if !void_around(&prefix(&c), j, delta_boxes) {
                return Ok(false);
            }
        }
        Ok(any)
    };
    let void_below = side_void(-1.0)?;
    let void_above = side_void(1.0)?;
    Ok(PointCertificate {
        x,
        recurrent_at,
        void_below,
        void_above,
    })
}

/// Empirical counterpart of the prediction: explosion at `w`, else at some
/// point of the backward orbit past `w` (at least `2δ` from `x0`), else none.
pub fn empirical_verdict(
    family: &MapFamily,
    record: &HomoclinicRecord,
    offsets: &[f64],
    res: &Resolution,
    delta_boxes: usize,
    extra_preimages: usize,
) -> Result<(Verdict, Vec<PointCertificate>)> {
    let mut certs = Vec::new();
    let cw = point_certificate(family, record.lambda, record.w, offsets, res, delta_boxes)?;
    let at_w = cw.explosion_side().is_some();
    certs.push(cw);
    if at_w {
        return Ok((Verdict::ExplosionAtW, certs));
    }
    let h = (family.domain.1 - family.domain.0) / res.final_boxes() as f64;
    let z = build_backward_orbit(family, record.lambda, record, record.l + extra_preimages)?;
    for &p in z.iter().skip(record.l + 1) {
        if abs(p - record.x0) <= 2.0 * delta_boxes as f64 * h {
            continue;
        }
        let c = point_certificate(family, record.lambda, p, offsets, res, delta_boxes)?;
        let hit = c.explosion_side().is_some();
        certs.push(c);
        if hit {
            return Ok((Verdict::ExplosionAtPreimagesOnly, certs));
        }
    }
    Ok((Verdict::NoExplosionAtW, certs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaClass {
    Periodic(usize),
    IntervalCycle,
    CantorLike,
}

impl OmegaClass {
    pub fn name(self) -> &'static str {
        match self {
            OmegaClass::Periodic(_) => "periodic",
            OmegaClass::IntervalCycle => "interval_cycle",
            OmegaClass::CantorLike => "cantor_like",
        }
    }
}

const OMEGA_TAIL: usize = 1 << 17;
const OMEGA_FINE: usize = 1 << 12;
const OMEGA_COARSE: usize = 1 << 8;

/// Coarse classification of `ω(z)` from the box occupancy of a long tail.
pub fn classify_omega(family: &MapFamily, lambda: f64, z: f64, period_max: usize, tol: &Tolerances) -> Result<OmegaClass> {
    let s = family.slice(lambda)?;
    let (a, b) = s.domain;
    let slack = 1e-9 * (b - a);
    let mut x = z;
    for _ in 0..tol.transient {
        x = s.f(x);
        if !(x >= a - slack && x <= b + slack) {
            return Err(Error::EscapedDomain);
        }
    }
    for p in 1..=period_max.max(1) {
        if abs(s.iterate(x, p) - x) <= 1e-8 * (b - a) {
            let y = s.iterate(x, 1000);
            if abs(s.iterate(y, p) - y) <= 1e-8 * (b - a) {
                return Ok(OmegaClass::Periodic(p));
            }
        }
    }
    let fine = BoxPartition::new(a, b, OMEGA_FINE)?;
    let coarse = BoxPartition::new(a, b, OMEGA_COARSE)?;
    let mut occ_f = vec![false; OMEGA_FINE];
    let mut occ_c = vec![false; OMEGA_COARSE];
    for _ in 0..OMEGA_TAIL {
        x = s.f(x);
        if !(x >= a - slack && x <= b + slack) {
            return Err(Error::EscapedDomain);
        }
        occ_f[fine.box_of(x)] = true;
        occ_c[coarse.box_of(x)] = true;
    }
    let ratio = OMEGA_FINE / OMEGA_COARSE;
    let (mut hit, mut total) = (0usize, 0usize);
    for (start, len) in crate::chain_graph::runs_of(&occ_c) {
        let lo = start as usize * ratio;
        let hi = (start + len) as usize * ratio;
        // hull of the occupied fine boxes inside this coarse piece
        let first = (lo..hi).find(|&i| occ_f[i]).unwrap_or(lo);
        let last = (lo..hi).rev().find(|&i| occ_f[i]).unwrap_or(lo);
        total += last + 1 - first;
        hit += (first..=last).filter(|&i| occ_f[i]).count();
    }
    if total > 0 && hit as f64 >= 0.9 * total as f64 {
        Ok(OmegaClass::IntervalCycle)
    } else {
        Ok(OmegaClass::CantorLike)
    }
}

/// One ε level of a barricade comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelComparison {
    pub eps: f64,
    pub s_boxes: usize,
    pub z_boxes: usize,
    /// Boxes of the `Z` covering outside the (one-box fattened) `S` covering.
    pub extra: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Barricade {
    pub y: f64,
    pub z: f64,
    pub orbit: PeriodicOrbit,
    pub levels: Vec<LevelComparison>,
    pub non_hyperbolic: bool,
    /// `(c, k)` with `f^k(c)` on the orbit.
    pub critical_preimage: Option<(f64, usize)>,
}

impl Barricade {
    pub fn certified(&self) -> bool {
        self.non_hyperbolic || self.critical_preimage.is_some()
    }
}

const LIMIT_BOXES: usize = 1 << 10;
const LIMIT_TAIL: usize = 4096;

/// Box covering of `ω(B_ε(x))`, taken as the tail of the exact interval
/// images `f^n(B_ε(x))`. Errors if a second tail window leaves the (one-box
/// fattened) first one.
fn limit_covering(s: &crate::map_model::Slice, x: f64, eps: f64, transient: usize) -> Result<Vec<bool>> {
    let (a, b) = s.domain;
    let p = BoxPartition::new(a, b, LIMIT_BOXES)?;
    let mut first = vec![false; LIMIT_BOXES];
    let mut second = vec![false; LIMIT_BOXES];
    let mut iv = ((x - eps).max(a), (x + eps).min(b));
    let step = |iv: (f64, f64)| {
        let (lo, hi) = s.image(iv.0, iv.1);
        (lo.max(a), hi.min(b))
    };
    for _ in 0..transient {
        iv = step(iv);
    }
    for cover in [&mut first, &mut second] {
        for _ in 0..LIMIT_TAIL {
            iv = step(iv);
            let (i0, i1) = p.range_meeting(iv.0, iv.1);
            cover[i0..=i1].iter_mut().for_each(|v| *v = true);
        }
    }
    let fat = fatten(&first);
    if second.iter().zip(&fat).any(|(&s2, &f)| s2 && !f) {
        return Err(Error::NotStabilized);
    }
    Ok(first.iter().zip(&second).map(|(u, v)| *u || *v).collect())
}

fn fatten(bits: &[bool]) -> Vec<bool> {
    let n = bits.len();
    (0..n)
        .map(|i| bits[i] || (i > 0 && bits[i - 1]) || (i + 1 < n && bits[i + 1]))
        .collect()
}

/// Periodic points `y` in the limit covering of `B_ε(z)` whose own limit
/// covering leaves it at every level of the decreasing ε ladder.
pub fn find_barricades(
    family: &MapFamily,
    lambda: f64,
    z: f64,
    eps_levels: &[f64],
    period_max: usize,
    tol: &Tolerances,
) -> Result<Vec<Barricade>> {
    if eps_levels.len() < 2 || eps_levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("need >= 2 decreasing eps levels".into()));
    }
    let s = family.slice(lambda)?;
    let (a, b) = s.domain;
    let p = BoxPartition::new(a, b, LIMIT_BOXES)?;
    let mut orbits = Vec::new();
    for n in 1..=period_max {
        orbits.extend(orbits_of_period(&s, n, tol));
    }
    let s_cov: Vec<Vec<bool>> = eps_levels
        .iter()
        .map(|&e| limit_covering(&s, z, e, tol.transient))
        .collect::<Result<_>>()?;
    let last = s_cov.last().unwrap();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for o in &orbits {
        for &y in &o.points {
            // a fold orbit is found twice; report each location once
            if !last[p.box_of(y)] || !seen.insert(p.box_of(y)) {
                continue;
            }
            let mut levels = Vec::new();
            let mut blocking = true;
            for (e, sc) in eps_levels.iter().zip(&s_cov) {
                let zc = limit_covering(&s, y, *e, tol.transient)?;
                let fat = fatten(sc);
                let extra = zc.iter().zip(&fat).filter(|(&zz, &f)| zz && !f).count();
                levels.push(LevelComparison {
                    eps: *e,
                    s_boxes: sc.iter().filter(|&&v| v).count(),
                    z_boxes: zc.iter().filter(|&&v| v).count(),
                    extra,
                });
                blocking &= extra > 0;
            }
            if blocking {
                out.push(Barricade {
                    y,
                    z,
                    orbit: o.clone(),
                    levels,
                    non_hyperbolic: !o.classification.is_hyperbolic(),
                    critical_preimage: critical_preimage(&s, o, tol),
                });
            }
        }
    }
    Ok(out)
}

/// A critical point whose forward orbit meets the orbit within `1e-6` of
/// the domain width, within the iterate cap.
pub fn critical_preimage(s: &crate::map_model::Slice, o: &PeriodicOrbit, tol: &Tolerances) -> Option<(f64, usize)> {
    let width = s.domain.1 - s.domain.0;
    for c in s.critical_points() {
        let mut x = c.x_c;
        for k in 1..=tol.iterate_cap {
            x = s.f(x);
            if o.points.iter().any(|p| abs(x - p) <= 1e-6 * width) {
                return Some((c.x_c, k));
            }
        }
    }
    None
}

/// Class label for an orbit at a parameter, for reporting.
pub fn describe_orbit(o: &PeriodicOrbit) -> String {
    format!("period {} multiplier {:.6} ({})", o.period(), o.multiplier, o.classification.name())
}
