//! Polynomial one-parameter interval map families, critical points and
//! periodic orbits.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::num::{abs, bisect, golden, safe_newton};
use crate::{Error, Result, Tolerances};

/// Scan grid for critical points.
pub const CRIT_GRID: usize = 4096;
/// Minimum scan grid for periodic orbits.
pub const ORBIT_GRID: usize = 1 << 14;
const ORBIT_GRID_MAX: usize = 1 << 20;
pub const PERIOD_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Logistic,
    Quadratic,
    Cubic,
    Table,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Logistic => "logistic",
            FamilyKind::Quadratic => "quadratic",
            FamilyKind::Cubic => "cubic",
            FamilyKind::Table => "table",
        }
    }
}

/// `f(x, λ) = Σ coef[i][j] x^i λ^j` on a fixed domain and parameter window.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    pub family_id: String,
    pub kind: FamilyKind,
    coef: Vec<Vec<f64>>,
    pub domain: (f64, f64),
    pub window: (f64, f64),
    invariant: bool,
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn deriv(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()
}

impl MapFamily {
    /// Builds a family from a coefficient table and checks that the domain is
    /// mapped into itself for every parameter in the window.
    pub fn from_table(
        family_id: &str,
        kind: FamilyKind,
        coef: Vec<Vec<f64>>,
        domain: (f64, f64),
        window: (f64, f64),
    ) -> Result<Self> {
        let fam = Self::from_table_unchecked(family_id, kind, coef, domain, window)?;
        fam.check_invariance()?;
        Ok(MapFamily {
            invariant: true,
            ..fam
        })
    }

    /// Same as [`MapFamily::from_table`] without the invariance check. Used
    /// for families analysed only through root finding (e.g. `x² + λ` on a
    /// fixed interval across its saddle-node).
    pub fn from_table_unchecked(
        family_id: &str,
        kind: FamilyKind,
        coef: Vec<Vec<f64>>,
        domain: (f64, f64),
        window: (f64, f64),
    ) -> Result<Self> {
        if coef.is_empty() || coef.iter().all(|row| row.is_empty()) {
            return Err(Error::Construction("empty coefficient table".into()));
        }
        if coef.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Construction("non-finite coefficient".into()));
        }
        if !(domain.0 < domain.1) || !domain.0.is_finite() || !domain.1.is_finite() {
            return Err(Error::Construction(format!(
                "domain [{}, {}] is not a proper interval",
                domain.0, domain.1
            )));
        }
        if !(window.0 <= window.1) || !window.0.is_finite() || !window.1.is_finite() {
            return Err(Error::Construction(format!(
                "parameter window [{}, {}] is empty",
                window.0, window.1
            )));
        }
        let fam = MapFamily {
            family_id: family_id.into(),
            kind,
            coef,
            domain,
            window,
            invariant: false,
        };
        fam.check_derivative()?;
        Ok(fam)
    }

    /// `λ x (1 − x)` on [0, 1].
    pub fn logistic(window: (f64, f64)) -> Result<Self> {
        if window.0 < 0.0 || window.1 > 4.0 {
            return Err(Error::Construction(
                "logistic window must lie in [0, 4]".into(),
            ));
        }
        Self::from_table(
            "logistic",
            FamilyKind::Logistic,
            vec![vec![], vec![0.0, 1.0], vec![0.0, -1.0]],
            (0.0, 1.0),
            window,
        )
    }

    /// `x² + λ` on a caller-chosen domain, invariance checked.
    pub fn quadratic(domain: (f64, f64), window: (f64, f64)) -> Result<Self> {
        Self::from_table("quadratic", FamilyKind::Quadratic, quadratic_table(), domain, window)
    }

    /// `x² + λ` on a fixed domain with no invariance requirement.
    pub fn quadratic_extended(domain: (f64, f64), window: (f64, f64)) -> Result<Self> {
        Self::from_table_unchecked(
            "quadratic",
            FamilyKind::Quadratic,
            quadratic_table(),
            domain,
            window,
        )
    }

    /// `Σ (a[i] + b[i] λ) x^i` for i = 0..3.
    pub fn cubic(a: [f64; 4], b: [f64; 4], domain: (f64, f64), window: (f64, f64)) -> Result<Self> {
        let coef = (0..4).map(|i| vec![a[i], b[i]]).collect();
        Self::from_table("cubic", FamilyKind::Cubic, coef, domain, window)
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coef
    }

    pub fn is_invariant_checked(&self) -> bool {
        self.invariant
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.family_id = id.into();
        self
    }

    fn x_coeffs(&self, lambda: f64) -> Vec<f64> {
        self.coef.iter().map(|row| horner(row, lambda)).collect()
    }

    pub fn eval(&self, x: f64, lambda: f64) -> f64 {
        horner(&self.x_coeffs(lambda), x)
    }

    pub fn d1(&self, x: f64, lambda: f64) -> f64 {
        horner(&deriv(&self.x_coeffs(lambda)), x)
    }

    pub fn d2(&self, x: f64, lambda: f64) -> f64 {
        horner(&deriv(&deriv(&self.x_coeffs(lambda))), x)
    }

    pub fn dlambda(&self, x: f64, lambda: f64) -> f64 {
        let p: Vec<f64> = self.coef.iter().map(|row| horner(&deriv(row), lambda)).collect();
        horner(&p, x)
    }

    /// Freezes the parameter. Critical points are located here once.
    pub fn slice(&self, lambda: f64) -> Result<Slice> {
        Slice::new(self.x_coeffs(lambda), lambda, self.domain)
    }

    fn check_derivative(&self) -> Result<()> {
        let (a, b) = self.domain;
        let (lo, hi) = self.window;
        let hx = 1e-6 * (b - a);
        let hl = 1e-6 * (1.0 + abs(hi - lo));
        for k in 0..64 {
            let x = a + hx + (b - a - 2.0 * hx) * golden(k);
            let l = lo + (hi - lo) * golden(k + 1000);
            let checks = [
                (self.d1(x, l), (self.eval(x + hx, l) - self.eval(x - hx, l)) / (2.0 * hx)),
                (self.d2(x, l), (self.d1(x + hx, l) - self.d1(x - hx, l)) / (2.0 * hx)),
                (
                    self.dlambda(x, l),
                    (self.eval(x, l + hl) - self.eval(x, l - hl)) / (2.0 * hl),
                ),
            ];
            for (an, fd) in checks {
                if abs(an - fd) > 1e-6 * (1.0 + abs(an)) {
                    return Err(Error::Construction(format!(
                        "derivative self-check failed at x={x}, lambda={l}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_invariance(&self) -> Result<()> {
        let (a, b) = self.domain;
        let (lo, hi) = self.window;
        let slack = 1e-12 * (1.0 + abs(a) + abs(b));
        let samples = if lo == hi { 1 } else { 257 };
        for k in 0..samples {
            let l = if samples == 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (samples - 1) as f64
            };
            let (m, big) = match self.slice(l) {
                Ok(s) => s.image(a, b),
                // constant slice, e.g. λ = 0
                Err(Error::FlatInterval) => {
                    let v = self.eval(a, l);
                    (v, v)
                }
                Err(e) => return Err(e),
            };
            if m < a - slack || big > b + slack {
                return Err(Error::Construction(format!(
                    "domain [{a}, {b}] is not invariant at lambda={l}: image [{m}, {big}]"
                )));
            }
        }
        Ok(())
    }
}

fn quadratic_table() -> Vec<Vec<f64>> {
    vec![vec![0.0, 1.0], vec![], vec![1.0]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub x_c: f64,
    /// Multiplicity of the zero of `d1`.
    pub order: u32,
}

/// The map at a fixed parameter value.
#[derive(Debug, Clone)]
pub struct Slice {
    pub lambda: f64,
    pub domain: (f64, f64),
    p: Vec<f64>,
    dp: Vec<f64>,
    ddp: Vec<f64>,
    crit: Vec<CriticalPoint>,
}

impl Slice {
    fn new(p: Vec<f64>, lambda: f64, domain: (f64, f64)) -> Result<Self> {
        let dp = deriv(&p);
        let ddp = deriv(&dp);
        let mut s = Slice {
            lambda,
            domain,
            p,
            dp,
            ddp,
            crit: Vec::new(),
        };
        s.crit = s.locate_critical_points()?;
        Ok(s)
    }

    #[inline]
    pub fn f(&self, x: f64) -> f64 {
        horner(&self.p, x)
    }

    #[inline]
    pub fn d1(&self, x: f64) -> f64 {
        horner(&self.dp, x)
    }

    #[inline]
    pub fn d2(&self, x: f64) -> f64 {
        horner(&self.ddp, x)
    }

    pub fn iterate(&self, mut x: f64, n: usize) -> f64 {
        for _ in 0..n {
            x = self.f(x);
        }
        x
    }

    /// `f^n(x)` together with `(f^n)'(x)`.
    pub fn iterate_d(&self, mut x: f64, n: usize) -> (f64, f64) {
        let mut d = 1.0;
        for _ in 0..n {
            d *= self.d1(x);
            x = self.f(x);
        }
        (x, d)
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.crit
    }

    /// Exact image of `[lo, hi]`: `f` is monotone between critical points.
    pub fn image(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (fa, fb) = (self.f(lo), self.f(hi));
        let (mut m, mut big) = if fa < fb { (fa, fb) } else { (fb, fa) };
        for c in &self.crit {
            if c.x_c > lo && c.x_c < hi {
                let v = self.f(c.x_c);
                m = m.min(v);
                big = big.max(v);
            }
        }
        (m, big)
    }

    /// Lap boundaries: domain endpoints and interior critical points.
    pub fn laps(&self) -> Vec<f64> {
        let (a, b) = self.domain;
        let mut v = vec![a];
        v.extend(self.crit.iter().map(|c| c.x_c).filter(|&x| x > a && x < b));
        v.push(b);
        v
    }

    /// All `y` in the domain with `f(y) = t`, one per lap at most.
    pub fn preimages(&self, t: f64) -> Vec<f64> {
        let laps = self.laps();
        let mut out = Vec::new();
        for w in laps.windows(2) {
            let (l, r) = (w[0], w[1]);
            let (gl, gr) = (self.f(l) - t, self.f(r) - t);
            if gl == 0.0 {
                push_unique(&mut out, l);
            }
            if gr == 0.0 {
                push_unique(&mut out, r);
            }
            if gl * gr < 0.0 {
                let y = safe_newton(|x| (self.f(x) - t, self.d1(x)), l, r, 64);
                push_unique(&mut out, y);
            }
        }
        out
    }

    fn locate_critical_points(&self) -> Result<Vec<CriticalPoint>> {
        if self.dp.iter().all(|&c| c == 0.0) {
            return Err(Error::FlatInterval);
        }
        let (a, b) = self.domain;
        let n = CRIT_GRID;
        let h = (b - a) / n as f64;
        let mut roots: Vec<f64> = Vec::new();
        let mut x0 = a;
        let mut g0 = self.d1(a);
        let mut s0 = self.d2(a);
        if g0 == 0.0 {
            roots.push(a);
        }
        for k in 1..=n {
            let x1 = if k == n { b } else { a + h * k as f64 };
            let g1 = self.d1(x1);
            let s1 = self.d2(x1);
            if g1 == 0.0 {
                roots.push(x1);
            } else if g0 * g1 < 0.0 {
                roots.push(safe_newton(|x| (self.d1(x), self.d2(x)), x0, x1, 64));
            } else if s0 * s1 < 0.0 {
                // even-order zero of d1: |d1| has a minimum touching zero
                let xs = bisect(|x| self.d2(x), x0, x1, 200);
                if abs(self.d1(xs)) <= 1e-12 {
                    roots.push(xs);
                }
            }
            x0 = x1;
            g0 = g1;
            s0 = s1;
        }
        roots.sort_by(|u, v| u.partial_cmp(v).unwrap());
        let mut out: Vec<CriticalPoint> = Vec::new();
        for r in roots {
            if out.last().is_some_and(|c| abs(c.x_c - r) <= 1e-9 * (b - a)) {
                continue;
            }
            out.push(CriticalPoint {
                x_c: r,
                order: self.zero_order(r),
            });
        }
        Ok(out)
    }

    fn zero_order(&self, x: f64) -> u32 {
        let mut q = self.ddp.clone();
        let mut order = 1;
        while !q.is_empty() {
            let scale = q.iter().map(|c| abs(*c)).fold(0.0, f64::max).max(1.0);
            if abs(horner(&q, x)) > 1e-8 * scale {
                return order;
            }
            order += 1;
            q = deriv(&q);
        }
        order
    }
}

fn push_unique(v: &mut Vec<f64>, x: f64) {
    if !v.iter().any(|&y| abs(y - x) <= 1e-14 * (1.0 + abs(x))) {
        v.push(x);
    }
}

pub fn find_critical_points(family: &MapFamily, lambda: f64) -> Result<Vec<CriticalPoint>> {
    Ok(family.slice(lambda)?.crit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    Attracting,
    Repelling,
    SaddleNode,
    PeriodDoubling,
}

impl OrbitClass {
    pub fn name(self) -> &'static str {
        match self {
            OrbitClass::Attracting => "attracting",
            OrbitClass::Repelling => "repelling",
            OrbitClass::SaddleNode => "non_hyperbolic_saddle_node",
            OrbitClass::PeriodDoubling => "non_hyperbolic_period_doubling",
        }
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, OrbitClass::Attracting | OrbitClass::Repelling)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    /// Orbit points in iteration order, starting from the smallest.
    pub points: Vec<f64>,
    pub multiplier: f64,
    pub classification: OrbitClass,
}

impl PeriodicOrbit {
    pub fn period(&self) -> usize {
        self.points.len()
    }
}

pub fn classify_multiplier(mu: f64, tol_hyp: f64) -> OrbitClass {
    if abs(mu) < 1.0 - tol_hyp {
        OrbitClass::Attracting
    } else if abs(mu) > 1.0 + tol_hyp {
        OrbitClass::Repelling
    } else if mu > 0.0 {
        OrbitClass::SaddleNode
    } else {
        OrbitClass::PeriodDoubling
    }
}

pub fn find_periodic_orbits(family: &MapFamily, lambda: f64, period_max: usize) -> Result<Vec<PeriodicOrbit>> {
    find_periodic_orbits_with(family, lambda, period_max, &Tolerances::default())
}

pub fn find_periodic_orbits_with(
    family: &MapFamily,
    lambda: f64,
    period_max: usize,
    tol: &Tolerances,
) -> Result<Vec<PeriodicOrbit>> {
    if period_max == 0 || period_max > PERIOD_CAP {
        return Err(Error::InvalidArgument(format!(
            "period_max must be in 1..={PERIOD_CAP}"
        )));
    }
    let s = family.slice(lambda)?;
    let mut out = Vec::new();
    for n in 1..=period_max {
        out.extend(orbits_of_period(&s, n, tol));
    }
    Ok(out)
}

fn grid_for(n: usize) -> usize {
    (1usize << (n + 4).min(20)).clamp(ORBIT_GRID, ORBIT_GRID_MAX)
}

/// Periodic orbits of least period `n`.
pub fn orbits_of_period(s: &Slice, n: usize, tol: &Tolerances) -> Vec<PeriodicOrbit> {
    let roots = roots_of_iterate(s, n, tol);
    let (a, b) = s.domain;
    let width = b - a;
    let mut orbits: Vec<PeriodicOrbit> = Vec::new();
    'roots: for r in roots {
        let r = r.clamp(a, b);
        let mut pts = Vec::with_capacity(n);
        let mut x = r;
        let mut mu = 1.0;
        for _ in 0..n {
            pts.push(x);
            mu *= s.d1(x);
            x = s.f(x);
        }
        let resid_tol = residual_tol(tol.tol_orbit, mu, width);
        if abs(x - r) > resid_tol {
            continue;
        }
        for d in 1..n {
            if n % d == 0 && abs(pts[d] - r) <= resid_tol.max(tol.tol_orbit * width) {
                continue 'roots;
            }
        }
        let start = pts
            .iter()
            .enumerate()
            .min_by(|u, v| u.1.partial_cmp(v.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        pts.rotate_left(start);
        let lead = pts[0];
        if orbits.iter().any(|o| abs(o.points[0] - lead) <= 1e-9 * width) {
            continue;
        }
        orbits.push(PeriodicOrbit {
            points: pts,
            multiplier: mu,
            classification: classify_multiplier(mu, tol.tol_hyp),
        });
    }
    orbits.sort_by(|u, v| u.points[0].partial_cmp(&v.points[0]).unwrap());
    orbits
}

/// Residual accepted for an orbit: `tol_orbit`, widened by the rounding
/// amplification `|μ|·ε_mach` of strongly expanding high-period orbits.
pub(crate) fn residual_tol(tol_orbit: f64, mu: f64, width: f64) -> f64 {
    (tol_orbit * width.max(1.0)).max(1e-14 * abs(mu) * width)
}

/// Roots of `f^n(x) − x`: sign changes per grid cell, plus a check at each
/// interior extremum for a pair of roots or a tangential root.
fn roots_of_iterate(s: &Slice, n: usize, tol: &Tolerances) -> Vec<f64> {
    let (a, b) = s.domain;
    let cells = grid_for(n);
    let h = (b - a) / cells as f64;
    let gd = |x: f64| {
        let (y, d) = s.iterate_d(x, n);
        (y - x, d - 1.0)
    };
    let mut roots = Vec::new();
    let (mut x0, (mut g0, mut d0)) = (a, gd(a));
    if g0 == 0.0 {
        roots.push(a);
    }
    let steps = tol.newton_steps;
    for k in 1..=cells {
        let x1 = if k == cells { b } else { a + h * k as f64 };
        let (g1, d1) = gd(x1);
        if g1 == 0.0 {
            roots.push(x1);
        }
        if d0 * d1 < 0.0 {
            let xs = bisect(|x| gd(x).1, x0, x1, 100);
            let (gs, _) = gd(xs);
            let mut crossed = false;
            if gs == 0.0 {
                roots.push(xs);
                crossed = true;
            }
            for (l, gl, r, gr) in [(x0, g0, xs, gs), (xs, gs, x1, g1)] {
                if gl * gr < 0.0 {
                    roots.push(safe_newton(gd, l, r, steps));
                    crossed = true;
                }
            }
            if !crossed && g0 != 0.0 && g1 != 0.0 && abs(gs) <= tol.tol_orbit {
                roots.push(xs);
            }
        } else if g0 * g1 < 0.0 {
            roots.push(safe_newton(gd, x0, x1, steps));
        }
        x0 = x1;
        g0 = g1;
        d0 = d1;
    }
    roots
}

/// Parameter at which the number of least-period-`period` orbits changes
/// inside `[lambda_lo, lambda_hi]`, to a bracket of 1e-10.
pub fn find_saddle_node_parameter(family: &MapFamily, period: usize, lambda_lo: f64, lambda_hi: f64) -> Result<f64> {
    find_saddle_node_parameter_with(family, period, lambda_lo, lambda_hi, &Tolerances::default())
}

pub fn find_saddle_node_parameter_with(
    family: &MapFamily,
    period: usize,
    lambda_lo: f64,
    lambda_hi: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if period == 0 || period > PERIOD_CAP {
        return Err(Error::InvalidArgument(format!("period must be in 1..={PERIOD_CAP}")));
    }
    let count = |l: f64| -> Result<usize> { Ok(orbits_of_period(&family.slice(l)?, period, tol).len()) };
    let (mut lo, mut hi) = if lambda_lo <= lambda_hi {
        (lambda_lo, lambda_hi)
    } else {
        (lambda_hi, lambda_lo)
    };
    let c_lo = count(lo)?;
    if c_lo == count(hi)? {
        return Err(Error::NoBirthBracketed);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Counting registers a tangential root once |f^n − x| ≤ tol_orbit at the
    // extremum, slightly before the fold. Polish on the extremum value.
    let born = if c_lo < count(hi)? { hi } else { lo };
    Ok(polish_fold(family, period, lo, hi, born, tol).unwrap_or(0.5 * (lo + hi)))
}

/// Value of `f^n(x) − x` at the extremum of `f^n − id` nearest `x`.
fn fold_value(s: &Slice, n: usize, mut x: f64) -> Option<(f64, f64)> {
    let (a, b) = s.domain;
    let hx = 1e-7 * (b - a);
    for _ in 0..40 {
        let g1 = s.iterate_d(x, n).1 - 1.0;
        let g2 = (s.iterate_d(x + hx, n).1 - s.iterate_d(x - hx, n).1) / (2.0 * hx);
        if g2 == 0.0 {
            return None;
        }
        let step = g1 / g2;
        x -= step;
        if !(x >= a && x <= b) {
            return None;
        }
        if abs(step) < 1e-15 * (b - a) {
            break;
        }
    }
    Some((s.iterate(x, n) - x, x))
}

fn polish_fold(family: &MapFamily, n: usize, lo: f64, hi: f64, born: f64, tol: &Tolerances) -> Option<f64> {
    let s = family.slice(born).ok()?;
    let seed = orbits_of_period(&s, n, tol)
        .into_iter()
        .min_by(|u, v| abs(u.multiplier - 1.0).partial_cmp(&abs(v.multiplier - 1.0)).unwrap())?;
    let width = family.domain.1 - family.domain.0;
    let mut x = seed.points[0];
    let pad = 1e-6 * (1.0 + abs(hi - lo));
    let (mut a, mut b) = (lo.min(hi) - pad, lo.max(hi) + pad);
    let (ea, xa) = fold_value(&family.slice(a).ok()?, n, x)?;
    let (eb, _) = fold_value(&family.slice(b).ok()?, n, x)?;
    if ea * eb > 0.0 || abs(xa - x) > 1e-3 * width {
        return None;
    }
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let (em, xm) = fold_value(&family.slice(m).ok()?, n, x)?;
        x = xm;
        if (em < 0.0) == (ea < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic() -> MapFamily {
        MapFamily::logistic((0.0, 4.0)).unwrap()
    }

    #[test]
    fn logistic_critical_point() {
        for l in [3.0, 3.5, 4.0] {
            let c = find_critical_points(&logistic(), l).unwrap();
            assert_eq!(c.len(), 1);
            assert!(abs(c[0].x_c - 0.5) < 1e-12);
            assert_eq!(c[0].order, 1);
        }
    }

    #[test]
    fn cubic_critical_points() {
        let f = MapFamily::from_table_unchecked(
            "cubic",
            FamilyKind::Cubic,
            vec![vec![], vec![-1.5], vec![], vec![1.0]],
            (-2.0, 2.0),
            (0.0, 0.0),
        )
        .unwrap();
        let c = find_critical_points(&f, 0.0).unwrap();
        let r = libm::sqrt(0.5);
        assert_eq!(c.len(), 2);
        assert!(abs(c[0].x_c + r) < 1e-12 && abs(c[1].x_c - r) < 1e-12);
    }

    #[test]
    fn cubic_is_not_invariant_on_its_scan_domain() {
        let r = MapFamily::cubic([0.0, -1.5, 0.0, 1.0], [0.0; 4], (-2.0, 2.0), (0.0, 0.0));
        assert!(matches!(r, Err(Error::Construction(_))));
    }

    #[test]
    fn double_zero_of_derivative_has_order_two() {
        // f = x^3 / 2 + 1/2 on [-1, 1]: d1 = 1.5 x^2 touches zero at 0
        let f = MapFamily::from_table(
            "flat-cubic",
            FamilyKind::Table,
            vec![vec![0.5], vec![], vec![], vec![0.5]],
            (-1.0, 1.0),
            (0.0, 0.0),
        )
        .unwrap();
        let c = find_critical_points(&f, 0.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].order, 2);
    }

    #[test]
    fn constant_map_is_flat() {
        let f = MapFamily::from_table_unchecked("const", FamilyKind::Table, vec![vec![0.5]], (0.0, 1.0), (0.0, 1.0))
            .unwrap();
        assert_eq!(f.slice(0.3).unwrap_err(), Error::FlatInterval);
    }

    #[test]
    fn logistic_window_beyond_four_rejected() {
        let r = MapFamily::from_table(
            "logistic",
            FamilyKind::Logistic,
            vec![vec![], vec![0.0, 1.0], vec![0.0, -1.0]],
            (0.0, 1.0),
            (3.0, 4.1),
        );
        assert!(matches!(r, Err(Error::Construction(_))));
    }

    #[test]
    fn fixed_points_at_two() {
        let o = find_periodic_orbits(&logistic(), 2.0, 1).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].points, vec![0.0]);
        assert!(abs(o[0].multiplier - 2.0) < 1e-12);
        assert_eq!(o[0].classification, OrbitClass::Repelling);
        assert!(abs(o[1].points[0] - 0.5) < 1e-12);
        assert!(abs(o[1].multiplier) < 1e-9);
        assert_eq!(o[1].classification, OrbitClass::Attracting);
    }

    #[test]
    fn two_cycle_matches_direct_iteration() {
        let fam = logistic();
        let s = fam.slice(3.2).unwrap();
        let x = s.iterate(0.3, 10_000);
        let mut cyc = [x, s.f(x)];
        cyc.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let o = find_periodic_orbits(&fam, 3.2, 2).unwrap();
        let two: Vec<_> = o.iter().filter(|o| o.period() == 2).collect();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].classification, OrbitClass::Attracting);
        assert!(abs(two[0].points[0] - cyc[0]) < 1e-9);
        assert!(abs(two[0].points[1] - cyc[1]) < 1e-9);
    }

    #[test]
    fn saddle_node_three() {
        let fam = logistic();
        let l = 1.0 + libm::sqrt(8.0);
        let o = find_periodic_orbits(&fam, l, 3).unwrap();
        let three: Vec<_> = o.iter().filter(|o| o.period() == 3).collect();
        assert!(!three.is_empty());
        assert!(three.iter().any(|o| abs(o.multiplier - 1.0) < 1e-6));
    }

    #[test]
    fn saddle_node_parameter_period_three() {
        let l = find_saddle_node_parameter(&logistic(), 3, 3.8, 3.86).unwrap();
        assert!(abs(l - (1.0 + libm::sqrt(8.0))) < 1e-9, "{l}");
        assert_eq!(
            find_saddle_node_parameter(&logistic(), 3, 3.9, 4.0),
            Err(Error::NoBirthBracketed)
        );
    }

    #[test]
    fn saddle_node_parameter_quadratic_fixed_point() {
        let q = MapFamily::quadratic_extended((-2.0, 2.0), (-1.0, 1.0)).unwrap();
        let l = find_saddle_node_parameter(&q, 1, -1.0, 1.0).unwrap();
        assert!(abs(l - 0.25) < 1e-9, "{l}");
    }

    #[test]
    fn preimages_of_logistic() {
        let s = logistic().slice(4.0).unwrap();
        let mut p = s.preimages(0.5);
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let r = libm::sqrt(0.5);
        assert_eq!(p.len(), 2);
        assert!(abs(p[0] - (1.0 - r) / 2.0) < 1e-14);
        assert!(abs(p[1] - (1.0 + r) / 2.0) < 1e-14);
    }

    #[test]
    fn period_cap_enforced() {
        assert!(find_periodic_orbits(&logistic(), 3.5, 25).is_err());
    }
}
