//! Curated families with a known critical landing, used by the
//! prediction/empirics equivalence checks and the CLI examples.

use alloc::vec;
use alloc::vec::Vec;

use crate::homoclinic::{record_at, Branch, HomoclinicRecord, Side, Verdict};
use crate::map_model::{FamilyKind, MapFamily};
use crate::num::abs;
use crate::{Error, Result, Tolerances};

/// Geometry a corpus entry was chosen to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Crossing,
    NonCrossing,
    BranchIntersection,
    NegativeDerivative,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Crossing => "crossing",
            Role::NonCrossing => "non_crossing",
            Role::BranchIntersection => "branch_intersection",
            Role::NegativeDerivative => "negative_derivative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub tag: &'static str,
    pub role: Role,
    pub family: MapFamily,
    pub lambda0: f64,
    /// Critical point whose orbit lands.
    pub w: f64,
    pub k: usize,
    pub period: usize,
    pub approach: Option<Branch>,
    pub side: Option<Side>,
    pub crossing: Option<bool>,
    pub verdict: Verdict,
    /// Parameter offsets probed on each side of `lambda0`.
    pub offsets: Vec<f64>,
    pub n_boxes: usize,
}

impl CorpusEntry {
    pub fn critical_index(&self) -> Result<usize> {
        let s = self.family.slice(self.lambda0)?;
        let width = self.family.domain.1 - self.family.domain.0;
        s.critical_points()
            .iter()
            .position(|c| abs(c.x_c - self.w) <= 1e-6 * width)
            .ok_or_else(|| Error::InvalidArgument("corpus critical point not found".into()))
    }

    pub fn record(&self, tol: &Tolerances) -> Result<HomoclinicRecord> {
        record_at(&self.family, self.lambda0, self.critical_index()?, self.k, self.period, tol)
    }
}

/// Parameter of the quartic crossing family: the interior critical value
/// maps onto the small fixed point.
pub const CF_LAMBDA0: f64 = 27.608_932_668_471_105_7;
const CF_ROOT: f64 = 0.85;
/// Logistic parameter where `f³(1/2)` is the interior fixed point.
pub const BAND_MERGE_LAMBDA: f64 = 3.678_573_510_428_322;
/// Logistic parameter where `f⁴(1/2)` lands on the repelling period-3 orbit.
pub const CRISIS_LAMBDA: f64 = 3.856_800_652_477_764_8;

/// `λ x² (x − 0.85)²` on [0, 1].
pub fn quartic_crossing(window: (f64, f64)) -> Result<MapFamily> {
    let r = CF_ROOT;
    MapFamily::from_table(
        "quartic_crossing",
        FamilyKind::Table,
        vec![vec![], vec![], vec![0.0, r * r], vec![0.0, -2.0 * r], vec![0.0, 1.0]],
        (0.0, 1.0),
        window,
    )
}

/// `1 − λ (1 − x)² (0.15 − x)²` on [0, 1], the mirror image of
/// [`quartic_crossing`] under `x ↦ 1 − x`.
pub fn quartic_crossing_mirror(window: (f64, f64)) -> Result<MapFamily> {
    let s = 1.0 - CF_ROOT;
    // (1 − x)(s − x) = s − (1 + s) x + x²
    let (a, b, c) = (s, -(1.0 + s), 1.0);
    let q = [a * a, 2.0 * a * b, b * b + 2.0 * a * c, 2.0 * b * c, c * c];
    let mut coef: Vec<Vec<f64>> = q.iter().map(|&v| vec![0.0, -v]).collect();
    coef[0][0] = 1.0;
    MapFamily::from_table("quartic_crossing_mirror", FamilyKind::Table, coef, (0.0, 1.0), window)
}

/// `a (x − x³)` on [−1, 1].
pub fn odd_cubic(window: (f64, f64)) -> Result<MapFamily> {
    MapFamily::cubic([0.0; 4], [0.0, 1.0, 0.0, -1.0], (-1.0, 1.0), window).map(|f| f.with_id("odd_cubic"))
}

/// The full curated corpus.
pub fn entries() -> Result<Vec<CorpusEntry>> {
    let cf_window = (27.0, 28.5);
    let cf_offsets = vec![0.05, 0.08, 0.12];
    let a_max = 1.5 * libm::sqrt(3.0);
    let c_plus = 1.0 / libm::sqrt(3.0);
    let fine = vec![1e-3, 3e-3, 1e-2];
    Ok(vec![
        CorpusEntry {
            tag: "CF-1",
            role: Role::Crossing,
            family: quartic_crossing(cf_window)?,
            lambda0: CF_LAMBDA0,
            w: 0.5 * CF_ROOT,
            k: 2,
            period: 1,
            approach: Some(Branch::Right),
            side: Some(Side::Below),
            crossing: Some(true),
            verdict: Verdict::ExplosionAtW,
            offsets: cf_offsets.clone(),
            n_boxes: 1 << 12,
        },
        CorpusEntry {
            tag: "CF-2",
            role: Role::Crossing,
            family: quartic_crossing_mirror(cf_window)?,
            lambda0: CF_LAMBDA0,
            w: 1.0 - 0.5 * CF_ROOT,
            k: 2,
            period: 1,
            approach: Some(Branch::Left),
            side: Some(Side::Above),
            crossing: Some(true),
            verdict: Verdict::ExplosionAtW,
            offsets: cf_offsets,
            n_boxes: 1 << 12,
        },
        CorpusEntry {
            tag: "NC-1",
            role: Role::NonCrossing,
            family: MapFamily::logistic((3.9, 4.0))?,
            lambda0: 4.0,
            w: 0.5,
            k: 2,
            period: 1,
            approach: Some(Branch::Right),
            side: Some(Side::Above),
            crossing: Some(false),
            verdict: Verdict::NoExplosionAtW,
            offsets: fine.clone(),
            n_boxes: 1 << 12,
        },
        CorpusEntry {
            tag: "NC-2",
            role: Role::NonCrossing,
            family: odd_cubic((2.5, a_max))?,
            lambda0: a_max,
            w: c_plus,
            k: 2,
            period: 1,
            approach: Some(Branch::Right),
            side: Some(Side::Above),
            crossing: Some(false),
            verdict: Verdict::NoExplosionAtW,
            offsets: fine.clone(),
            n_boxes: 1 << 12,
        },
        CorpusEntry {
            tag: "NC-3",
            role: Role::NonCrossing,
            family: MapFamily::quadratic_extended((-2.0, 2.0), (-2.0, -1.9))?,
            lambda0: -2.0,
            w: 0.0,
            k: 2,
            period: 1,
            approach: Some(Branch::Left),
            side: Some(Side::Below),
            crossing: Some(false),
            verdict: Verdict::NoExplosionAtW,
            offsets: fine.clone(),
            n_boxes: 1 << 12,
        },
        CorpusEntry {
            tag: "ND",
            role: Role::NegativeDerivative,
            family: MapFamily::logistic((3.6, 3.75))?,
            lambda0: BAND_MERGE_LAMBDA,
            w: 0.5,
            k: 3,
            period: 1,
            approach: None,
            side: None,
            crossing: None,
            verdict: Verdict::NoExplosionAtW,
            offsets: fine,
            n_boxes: 1 << 12,
        },
        CorpusEntry {
            tag: "BI",
            role: Role::BranchIntersection,
            family: MapFamily::logistic((3.83, 3.9))?,
            lambda0: CRISIS_LAMBDA,
            w: 0.5,
            k: 4,
            period: 3,
            approach: Some(Branch::Right),
            side: Some(Side::Below),
            crossing: Some(true),
            verdict: Verdict::ExplosionAtPreimagesOnly,
            offsets: vec![8e-3, 1e-2, 1.5e-2],
            n_boxes: 1 << 12,
        },
    ])
}

/// Logistic family on the window containing the birth of the period-3 orbit.
pub fn period_three_window() -> Result<MapFamily> {
    MapFamily::logistic((3.8, 3.86))
}
