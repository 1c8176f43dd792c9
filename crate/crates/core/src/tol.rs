/// Numerical tolerances and caps shared by all analyses.
///
/// | knob | default |
/// |---|---|
/// | `tol_orbit` | 1e-9 |
/// | `tol_hyp` | 1e-4 |
/// | `tol_land` | 1e-9 |
/// | `tol_sn` | 1e-3 |
/// | `branch_depth` | 64 |
/// | `branch_stab` | 1e-9 |
/// | `newton_steps` | 64 |
/// | `transient` | 10 000 |
/// | `iterate_cap` | 32 |
/// | `fanout` | 4 |
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residual accepted for `f^n(x) = x`.
    pub tol_orbit: f64,
    /// Hyperbolicity band around multiplier magnitude one.
    pub tol_hyp: f64,
    /// Landing distance of a critical orbit on a periodic point.
    pub tol_land: f64,
    /// Multiplier band around +1 accepted as saddle-node evidence.
    pub tol_sn: f64,
    pub branch_depth: usize,
    pub branch_stab: f64,
    pub newton_steps: usize,
    pub transient: usize,
    /// Forward iterates of a critical point searched for landings.
    pub iterate_cap: usize,
    /// Preimage fan-out when searching backward orbits.
    pub fanout: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_orbit: 1e-9,
            tol_hyp: 1e-4,
            tol_land: 1e-9,
            tol_sn: 1e-3,
            branch_depth: 64,
            branch_stab: 1e-9,
            newton_steps: 64,
            transient: 10_000,
            iterate_cap: 32,
            fanout: 4,
        }
    }
}
