//! Homoclinic tangencies through critical points: unstable branches of
//! repelling periodic points, the crossing rule and explosion predictions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::map_model::{orbits_of_period, MapFamily, OrbitClass, PeriodicOrbit, Slice, PERIOD_CAP};
use crate::num::{abs, bisect};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Left => "left",
            Branch::Right => "right",
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Left => Branch::Right,
            Branch::Right => Branch::Left,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Left => -1.0,
            Branch::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Above => "above",
            Side::Below => "below",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRelation {
    Disjoint,
    LeftInsideRight,
    RightInsideLeft,
    Equal,
    /// Each branch reaches past the other on one side.
    Overlapping,
}

impl BranchRelation {
    pub fn name(self) -> &'static str {
        match self {
            BranchRelation::Disjoint => "disjoint",
            BranchRelation::LeftInsideRight => "left_inside_right",
            BranchRelation::RightInsideLeft => "right_inside_left",
            BranchRelation::Equal => "equal",
            BranchRelation::Overlapping => "overlapping",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ExplosionAtW,
    NoExplosionAtW,
    ExplosionAtPreimagesOnly,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ExplosionAtW => "explosion_at_w",
            Verdict::NoExplosionAtW => "no_explosion_at_w",
            Verdict::ExplosionAtPreimagesOnly => "explosion_at_preimages_only",
        }
    }

    pub fn is_explosive(self) -> bool {
        self != Verdict::NoExplosionAtW
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnstableBranches {
    pub x0: f64,
    pub period: usize,
    /// Sign of `(f^m)'(x0)`.
    pub derivative_sign: i8,
    /// Multiplier of the map the branches were computed for: `f^m`, or
    /// `f^{2m}` when the derivative is negative.
    pub multiplier: f64,
    /// Iterate count of that map.
    pub steps: usize,
    /// Radius of the one-sided linearization zone.
    pub delta0: f64,
    pub left: Option<Interval>,
    pub right: Option<Interval>,
    pub relation: BranchRelation,
}

impl UnstableBranches {
    pub fn branch(&self, b: Branch) -> Option<Interval> {
        match b {
            Branch::Left => self.left,
            Branch::Right => self.right,
        }
    }

    pub fn contains(&self, b: Branch, x: f64) -> bool {
        self.branch(b).is_some_and(|u| u.contains(x, MEMBER_TOL))
    }
}

const MEMBER_TOL: f64 = 1e-12;

fn relation(l: Option<Interval>, r: Option<Interval>, tol: f64) -> BranchRelation {
    match (l, r) {
        (Some(l), Some(r)) => {
            let l_in_r = l.lo >= r.lo - tol && l.hi <= r.hi + tol;
            let r_in_l = r.lo >= l.lo - tol && r.hi <= l.hi + tol;
            match (l_in_r, r_in_l) {
                (true, true) => BranchRelation::Equal,
                (true, false) => BranchRelation::LeftInsideRight,
                (false, true) => BranchRelation::RightInsideLeft,
                (false, false) => {
                    // sharing only x0 counts as disjoint
                    if l.hi <= r.lo + tol {
                        BranchRelation::Disjoint
                    } else {
                        BranchRelation::Overlapping
                    }
                }
            }
        }
        _ => BranchRelation::Disjoint,
    }
}

/// Image of an interval under `steps` applications of `f`, clamped to the
/// domain.
fn image_n(s: &Slice, mut iv: Interval, steps: usize) -> Interval {
    let (a, b) = s.domain;
    for _ in 0..steps {
        let (lo, hi) = s.image(iv.lo, iv.hi);
        iv = Interval::new(lo.max(a), hi.min(b));
    }
    iv
}

/// Largest radius (halving from a quarter of the domain) on which `G`
/// expands away from `x0` on both sides by at least `1 + ρ`, ρ = (|μ|−1)/2,
/// while preserving orientation.
fn linearization_zone(s: &Slice, x0: f64, steps: usize, mu: f64) -> Option<f64> {
    let (a, b) = s.domain;
    let rho = (abs(mu) - 1.0) * 0.5;
    if rho <= 0.0 {
        return None;
    }
    let mut d = 0.25 * (b - a);
    for _ in 0..80 {
        let ok = [-1.0, 1.0].iter().all(|&side| {
            (1..=32).all(|i| {
                let x = x0 + side * d * i as f64 / 32.0;
                if x < a || x > b {
                    return true;
                }
                let (gx, gd) = s.iterate_d(x, steps);
                let out = (gx - x0) * side;
                gd > 0.0 && out >= (1.0 + rho) * abs(x - x0)
            })
        });
        if ok {
            return Some(d);
        }
        d *= 0.5;
    }
    None
}

/// Unstable branches of the repelling point `points[0]` of `orbit`.
pub fn compute_branches(family: &MapFamily, lambda: f64, orbit: &PeriodicOrbit, depth: usize) -> Result<UnstableBranches> {
    let tol = Tolerances {
        branch_depth: depth,
        ..Tolerances::default()
    };
    let s = family.slice(lambda)?;
    if orbit.classification != OrbitClass::Repelling {
        return Err(Error::NotRepelling);
    }
    branches_at(&s, orbit.points[0], orbit.period(), &tol)
}

pub(crate) fn branches_at(s: &Slice, x0: f64, m: usize, tol: &Tolerances) -> Result<UnstableBranches> {
    let (_, dm) = s.iterate_d(x0, m);
    if abs(dm) <= 1.0 + tol.tol_hyp {
        return Err(Error::NotRepelling);
    }
    let derivative_sign: i8 = if dm > 0.0 { 1 } else { -1 };
    // negative derivative: the two sides swap under f^m, use f^{2m}
    let steps = if dm > 0.0 { m } else { 2 * m };
    let (_, mu) = s.iterate_d(x0, steps);
    let delta0 = linearization_zone(s, x0, steps, mu).ok_or(Error::NotRepelling)?;
    let (a, b) = s.domain;
    let seed = |side: Branch| -> Option<Interval> {
        let end = x0 + side.sign() * delta0;
        let (lo, hi) = if side == Branch::Left { (end.max(a), x0) } else { (x0, end.min(b)) };
        if hi - lo <= 1e-15 * (b - a) {
            None
        } else {
            Some(Interval::new(lo, hi))
        }
    };
    let grow = |j: Option<Interval>| -> (Option<Interval>, bool) {
        let Some(mut j) = j else { return (None, true) };
        let mut prev = j;
        // G(x0) = x0 up to rounding; pin that endpoint so the drift is not
        // amplified by the expansion on the other side
        let snap = 1e-10 * (b - a);
        for _ in 0..=tol.branch_depth {
            prev = j;
            j = j.hull(&image_n(s, j, steps));
            if abs(j.lo - x0) <= snap {
                j.lo = j.lo.max(x0);
            }
            if abs(j.hi - x0) <= snap {
                j.hi = j.hi.min(x0);
            }
        }
        let stable = abs(j.lo - prev.lo) <= tol.branch_stab && abs(j.hi - prev.hi) <= tol.branch_stab;
        (Some(j), stable)
    };
    let (left, ls) = grow(seed(Branch::Left));
    let (right, rs) = grow(seed(Branch::Right));
    if !(ls && rs) {
        return Err(Error::BranchNotStabilized { left, right });
    }
    Ok(UnstableBranches {
        x0,
        period: m,
        derivative_sign,
        multiplier: mu,
        steps,
        delta0,
        left,
        right,
        relation: relation(left, right, 1e-9),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomoclinicRecord {
    pub family_id: String,
    pub lambda: f64,
    pub x0: f64,
    pub period: usize,
    /// Multiplier of `f^m` at `x0`.
    pub multiplier: f64,
    pub w: f64,
    /// `f^L(w) = x0`, `L` a multiple of the period.
    pub l: usize,
    pub approach_branch: Branch,
    pub local_side: Side,
    pub crossing: bool,
    pub exclusive_branch: bool,
    pub in_left: bool,
    pub in_right: bool,
    pub landing_error: f64,
    pub branches: UnstableBranches,
}

impl HomoclinicRecord {
    pub fn derivative_sign(&self) -> i8 {
        self.branches.derivative_sign
    }
}

/// The crossing rule: the image of a neighbourhood of `w` lands on the side
/// of `x0` opposite to the approach branch.
pub fn crossing_rule(approach: Branch, side: Side) -> bool {
    matches!((approach, side), (Branch::Left, Side::Above) | (Branch::Right, Side::Below))
}

/// Side of `x0` on which `f^L` sends a small neighbourhood of `w`, decided
/// by probes `w ± h` relative to `f^L(w)`.
pub fn local_side(s: &Slice, w: f64, l: usize) -> Result<Side> {
    let (a, b) = s.domain;
    let width = b - a;
    let base = s.iterate(w, l);
    for scale in [1e-6, 1e-5, 1e-4, 1e-3] {
        let h = scale * width;
        let probes: Vec<f64> = [w - h, w + h]
            .iter()
            .filter(|&&x| x >= a && x <= b)
            .map(|&x| s.iterate(x, l) - base)
            .collect();
        if probes.iter().any(|v| abs(*v) <= 1e-13 * width) {
            continue;
        }
        if probes.iter().all(|&v| v > 0.0) {
            return Ok(Side::Above);
        }
        if probes.iter().all(|&v| v < 0.0) {
            return Ok(Side::Below);
        }
        return Err(Error::DegenerateTangency);
    }
    Err(Error::DegenerateTangency)
}

#[derive(Debug, Clone, Default)]
pub struct TangencyReport {
    pub records: Vec<HomoclinicRecord>,
    pub diagnostics: Vec<String>,
}

pub(crate) fn all_orbits(s: &Slice, period_max: usize, tol: &Tolerances) -> Result<Vec<PeriodicOrbit>> {
    if period_max == 0 || period_max > PERIOD_CAP {
        return Err(Error::InvalidArgument(format!("period_max must be in 1..={PERIOD_CAP}")));
    }
    let mut v = Vec::new();
    for n in 1..=period_max {
        v.extend(orbits_of_period(s, n, tol));
    }
    Ok(v)
}

/// Critical orbits landing on periodic points within `iterate_cap` steps.
pub fn find_tangencies(family: &MapFamily, lambda: f64, period_max: usize, iterate_cap: usize) -> Result<TangencyReport> {
    let tol = Tolerances {
        iterate_cap,
        ..Tolerances::default()
    };
    find_tangencies_with(family, lambda, period_max, &tol)
}

pub fn find_tangencies_with(family: &MapFamily, lambda: f64, period_max: usize, tol: &Tolerances) -> Result<TangencyReport> {
    let s = family.slice(lambda)?;
    let orbits = all_orbits(&s, period_max, tol)?;
    let mut rep = TangencyReport::default();
    let (a, b) = s.domain;
    let slack = 1e-9 * (b - a);
    for c in s.critical_points() {
        let w = c.x_c;
        let mut x = w;
        'steps: for k in 1..=tol.iterate_cap {
            x = s.f(x);
            if x < a - slack || x > b + slack {
                rep.diagnostics.push(format!("orbit of critical point {w} escapes the domain"));
                break;
            }
            for o in &orbits {
                for (j, &p) in o.points.iter().enumerate() {
                    if abs(x - p) > tol.tol_land {
                        continue;
                    }
                    if o.classification != OrbitClass::Repelling {
                        rep.diagnostics.push(format!(
                            "tangency to non-repelling orbit: critical point {w} lands on {} period-{} orbit at step {k}",
                            o.classification.name(),
                            o.period()
                        ));
                        break 'steps;
                    }
                    match complete_record(family, &s, w, k, o, j, tol) {
                        Ok(r) => rep.records.push(r),
                        Err(e) => rep.diagnostics.push(format!("critical point {w}, step {k}: {e}")),
                    }
                    break 'steps;
                }
            }
        }
    }
    Ok(rep)
}

/// Record for the landing `f^k(c) = p` of critical point `critical_index`
/// on a repelling orbit of least period `period` at parameter `lambda`.
pub fn record_at(
    family: &MapFamily,
    lambda: f64,
    critical_index: usize,
    k: usize,
    period: usize,
    tol: &Tolerances,
) -> Result<HomoclinicRecord> {
    let s = family.slice(lambda)?;
    let w = s
        .critical_points()
        .get(critical_index)
        .ok_or_else(|| Error::InvalidArgument("critical point index out of range".into()))?
        .x_c;
    let x = s.iterate(w, k);
    let orbits = orbits_of_period(&s, period, tol);
    let mut best: Option<(f64, usize, usize)> = None;
    for (oi, o) in orbits.iter().enumerate() {
        for (j, &p) in o.points.iter().enumerate() {
            let d = abs(x - p);
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, oi, j));
            }
        }
    }
    let (d, oi, j) = best.ok_or(Error::NoHomoclinicOrbit)?;
    if d > tol.tol_land {
        return Err(Error::NoHomoclinicOrbit);
    }
    if orbits[oi].classification != OrbitClass::Repelling {
        return Err(Error::NotRepelling);
    }
    complete_record(family, &s, w, k, &orbits[oi], j, tol)
}

fn polish_periodic(s: &Slice, x: f64, m: usize) -> f64 {
    let mut x = x;
    for _ in 0..8 {
        let (y, d) = s.iterate_d(x, m);
        if abs(d - 1.0) < 1e-12 {
            break;
        }
        let step = (y - x) / (d - 1.0);
        x -= step;
        if abs(step) < 1e-16 {
            break;
        }
    }
    x
}

fn complete_record(
    family: &MapFamily,
    s: &Slice,
    w: f64,
    k: usize,
    orbit: &PeriodicOrbit,
    j: usize,
    tol: &Tolerances,
) -> Result<HomoclinicRecord> {
    let m = orbit.period();
    let l = k.div_ceil(m) * m;
    let x0 = polish_periodic(s, orbit.points[(j + l - k) % m], m);
    let landing_error = abs(s.iterate(w, l) - x0);
    if landing_error > tol.tol_land {
        return Err(Error::InvalidArgument(format!(
            "landing error {landing_error:e} exceeds tol_land after period normalization"
        )));
    }
    let (_, multiplier) = s.iterate_d(x0, m);
    let branches = branches_at(s, x0, m, tol)?;
    let side = local_side(s, w, l)?;
    let in_left = branches.contains(Branch::Left, w);
    let in_right = branches.contains(Branch::Right, w);
    let mut order: Vec<Branch> = Vec::new();
    for b in [Branch::Left, Branch::Right] {
        if branches.contains(b, w) {
            if crossing_rule(b, side) {
                order.insert(0, b);
            } else {
                order.push(b);
            }
        }
    }
    let mut rec = HomoclinicRecord {
        family_id: family.family_id.clone(),
        lambda: s.lambda,
        x0,
        period: m,
        multiplier,
        w,
        l,
        approach_branch: Branch::Right,
        local_side: side,
        crossing: false,
        exclusive_branch: in_left != in_right,
        in_left,
        in_right,
        landing_error,
        branches,
    };
    for b in order {
        if backward_orbit_via(s, &rec, b, rec.l + 8 * rec.branches.steps, tol.fanout).is_some() {
            rec.approach_branch = b;
            rec.crossing = crossing_rule(b, side);
            return Ok(rec);
        }
    }
    Err(Error::NoHomoclinicOrbit)
}

/// Backward orbit `z_0 = x0, …, z_{-L} = w, …` of length `k_max + 1`,
/// through the record's approach branch, or the other one if that fails.
pub fn build_backward_orbit(family: &MapFamily, lambda: f64, record: &HomoclinicRecord, k_max: usize) -> Result<Vec<f64>> {
    let s = family.slice(lambda)?;
    let fanout = Tolerances::default().fanout;
    for b in [record.approach_branch, record.approach_branch.other()] {
        if let Some(z) = backward_orbit_via(&s, record, b, k_max, fanout) {
            return Ok(z);
        }
    }
    Err(Error::NoHomoclinicOrbit)
}

/// Backward orbit through branch `b`. Past `w` preimages are searched
/// breadth-first, at most `fanout` per level, keeping points of the branch
/// interval nearest `x0`, until one enters the one-sided linearization zone;
/// from there the inverse branch adjacent to `x0` is iterated.
pub fn backward_orbit_via(s: &Slice, rec: &HomoclinicRecord, b: Branch, k_max: usize, fanout: usize) -> Option<Vec<f64>> {
    let br = &rec.branches;
    let u = br.branch(b)?;
    let steps = br.steps;
    let x0 = rec.x0;
    let mut z = Vec::with_capacity(k_max + 1);
    let mut fw = Vec::with_capacity(rec.l);
    let mut x = rec.w;
    for _ in 0..rec.l {
        fw.push(x);
        x = s.f(x);
    }
    z.push(x0);
    for j in 1..=rec.l {
        z.push(fw[rec.l - j]);
    }
    if z.len() > k_max {
        z.truncate(k_max + 1);
        return Some(z);
    }
    let in_zone = |y: f64| {
        let d = (y - x0) * b.sign();
        d > 0.0 && d <= br.delta0
    };
    // beam search in f-steps, constraints checked every `steps`
    let mut levels: Vec<Vec<(f64, usize)>> = vec![vec![(rec.w, 0)]];
    let mut hit: Option<(usize, usize)> = if in_zone(rec.w) { Some((0, 0)) } else { None };
    let max_levels = 64 * steps;
    let mut depth = 0;
    while hit.is_none() && depth < max_levels {
        depth += 1;
        let aligned = depth % steps == 0;
        let mut next: Vec<(f64, usize)> = Vec::new();
        for (pi, &(t, _)) in levels[depth - 1].iter().enumerate() {
            for y in s.preimages(t) {
                if aligned && !u.contains(y, MEMBER_TOL) {
                    continue;
                }
                next.push((y, pi));
            }
        }
        if next.is_empty() {
            return None;
        }
        if aligned {
            let key = |y: f64| {
                let d = (y - x0) * b.sign();
                if d > 0.0 {
                    d
                } else {
                    10.0 + abs(d)
                }
            };
            next.sort_by(|p, q| key(p.0).partial_cmp(&key(q.0)).unwrap());
            next.truncate(fanout.max(1));
            if let Some(i) = next.iter().position(|p| in_zone(p.0)) {
                hit = Some((depth, i));
            }
        } else {
            next.truncate(fanout.max(1) * 8);
        }
        levels.push(next);
    }
    let (d, mut i) = hit?;
    let mut ext = Vec::with_capacity(d);
    for lev in (1..=d).rev() {
        let (y, p) = levels[lev][i];
        ext.push(y);
        i = p;
    }
    ext.reverse();
    z.extend(ext);
    // local inverse of f^steps adjacent to x0 on side b
    let (a, bd) = s.domain;
    let far = (x0 + b.sign() * br.delta0).clamp(a, bd);
    while z.len() <= k_max {
        let t = *z.last().unwrap();
        let y = bisect(|v| s.iterate(v, steps) - t, x0.min(far), x0.max(far), 200);
        let mut seg = Vec::with_capacity(steps);
        let mut v = y;
        for _ in 0..steps {
            seg.push(v);
            v = s.f(v);
        }
        for &p in seg.iter().skip(1).rev() {
            z.push(p);
        }
        z.push(y);
    }
    z.truncate(k_max + 1);
    Some(z)
}

/// Decision procedure for a certified record.
pub fn predict_explosion(record: &HomoclinicRecord) -> Verdict {
    if record.derivative_sign() < 0 {
        return Verdict::NoExplosionAtW;
    }
    if record.in_left && record.in_right {
        return Verdict::ExplosionAtPreimagesOnly;
    }
    if record.exclusive_branch && record.crossing {
        return Verdict::ExplosionAtW;
    }
    Verdict::NoExplosionAtW
}

/// A parameter at which `f^k(c)` meets a repelling periodic point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyParameter {
    pub lambda: f64,
    pub critical_index: usize,
    pub k: usize,
    pub period: usize,
}

/// Landings `f^k(c, λ) = p(λ)` for `λ ∈ [lo, hi]`, with each repelling point
/// found at the bracket midpoint continued in `λ` by Newton. Brackets are
/// ranked by `(k + period, distance to the midpoint)` and the first `limit`
/// are polished.
pub fn find_tangency_parameters(
    family: &MapFamily,
    lo: f64,
    hi: f64,
    period_max: usize,
    tol: &Tolerances,
    samples: usize,
    limit: usize,
) -> Result<Vec<TangencyParameter>> {
    let mid = 0.5 * (lo + hi);
    let s_mid = family.slice(mid)?;
    let n_crit = s_mid.critical_points().len();
    let seeds: Vec<(f64, usize)> = all_orbits(&s_mid, period_max, tol)?
        .into_iter()
        .filter(|o| o.classification == OrbitClass::Repelling)
        .flat_map(|o| {
            let m = o.period();
            o.points.into_iter().map(move |p| (p, m))
        })
        .collect();
    let samples = samples.max(3);
    let lams: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let continue_point = |s: &Slice, guess: f64, m: usize| -> Option<f64> {
        let mut x = guess;
        for _ in 0..30 {
            let (y, d) = s.iterate_d(x, m);
            if abs(d - 1.0) < 1e-9 {
                return None;
            }
            let step = (y - x) / (d - 1.0);
            x -= step;
            if abs(step) < 1e-15 {
                break;
            }
        }
        let (y, d) = s.iterate_d(x, m);
        (abs(y - x) <= 1e-11 && abs(d) > 1.0).then_some(x)
    };
    // track[p][i]: continued point at sample i
    let slices: Vec<Slice> = lams.iter().map(|&l| family.slice(l)).collect::<Result<_>>()?;
    let mid_idx = samples / 2;
    let mut tracks: Vec<(usize, Vec<Option<f64>>)> = Vec::with_capacity(seeds.len());
    for &(p, m) in &seeds {
        let mut tr = vec![None; samples];
        let mut g = p;
        for i in (0..=mid_idx).rev() {
            match continue_point(&slices[i], g, m) {
                Some(x) => {
                    tr[i] = Some(x);
                    g = x;
                }
                None => break,
            }
        }
        g = p;
        for i in mid_idx + 1..samples {
            match continue_point(&slices[i], g, m) {
                Some(x) => {
                    tr[i] = Some(x);
                    g = x;
                }
                None => break,
            }
        }
        tracks.push((m, tr));
    }
    // (ci, k, m, sample index, p0, p1)
    let mut brackets: Vec<(usize, usize, usize, usize, f64, f64)> = Vec::new();
    for ci in 0..n_crit {
        let fk: Vec<Option<Vec<f64>>> = slices
            .iter()
            .map(|s| {
                let c = s.critical_points().get(ci)?.x_c;
                let mut v = Vec::with_capacity(tol.iterate_cap);
                let mut x = c;
                for _ in 0..tol.iterate_cap {
                    x = s.f(x);
                    v.push(x);
                }
                Some(v)
            })
            .collect();
        for (m, tr) in &tracks {
            for i in 0..samples - 1 {
                let (Some(p0), Some(p1), Some(f0), Some(f1)) = (tr[i], tr[i + 1], &fk[i], &fk[i + 1]) else {
                    continue;
                };
                for k in 1..=tol.iterate_cap {
                    let (h0, h1) = (f0[k - 1] - p0, f1[k - 1] - p1);
                    if h0 * h1 >= 0.0 && h0 != 0.0 {
                        continue;
                    }
                    brackets.push((ci, k, *m, i, p0, p1));
                }
            }
        }
    }
    let centre = |i: usize| abs(0.5 * (lams[i] + lams[i + 1]) - mid);
    brackets.sort_by(|u, v| (u.1 + u.2).cmp(&(v.1 + v.2)).then(centre(u.3).partial_cmp(&centre(v.3)).unwrap()));
    let mut out: Vec<TangencyParameter> = Vec::new();
    for (ci, k, m, i, p0, p1) in brackets {
        if out.len() >= limit {
            break;
        }
        if let Some(l) = polish_landing(family, ci, k, m, lams[i], lams[i + 1], p0, p1) {
            if !out.iter().any(|t| t.critical_index == ci && t.k == k && abs(t.lambda - l) < 1e-12) {
                out.push(TangencyParameter {
                    lambda: l,
                    critical_index: ci,
                    k,
                    period: m,
                });
            }
        }
    }
    out.sort_by(|u, v| {
        (u.k + u.period)
            .cmp(&(v.k + v.period))
            .then(abs(u.lambda - mid).partial_cmp(&abs(v.lambda - mid)).unwrap())
    });
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn polish_landing(family: &MapFamily, ci: usize, k: usize, m: usize, l0: f64, l1: f64, p0: f64, p1: f64) -> Option<f64> {
    let h = |l: f64| -> Option<f64> {
        let s = family.slice(l).ok()?;
        let c = s.critical_points().get(ci)?.x_c;
        let t = (l - l0) / (l1 - l0);
        let mut x = p0 + t * (p1 - p0);
        for _ in 0..30 {
            let (y, d) = s.iterate_d(x, m);
            let step = (y - x) / (d - 1.0);
            x -= step;
            if abs(step) < 1e-15 {
                break;
            }
        }
        Some(s.iterate(c, k) - x)
    };
    let (mut a, mut b) = (l0, l1);
    let mut ha = h(a)?;
    if ha == 0.0 {
        return Some(a);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let hm = h(mid)?;
        if hm == 0.0 {
            return Some(mid);
        }
        if (hm < 0.0) == (ha < 0.0) {
            a = mid;
            ha = hm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}
