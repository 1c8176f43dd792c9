//! Small root-finding helpers.

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Bisection for a sign change of `g` on `[a, b]`; returns the midpoint of
/// the final bracket.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut g: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let mut ga = g(a);
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Newton iteration kept inside the bracket `[a, b]`, falling back to
/// bisection whenever a step leaves it. `gd` returns value and derivative.
pub(crate) fn safe_newton<F: FnMut(f64) -> (f64, f64)>(
    mut gd: F,
    mut a: f64,
    mut b: f64,
    steps: usize,
) -> f64 {
    let (ga, _) = gd(a);
    let (gb, _) = gd(b);
    if ga == 0.0 {
        return a;
    }
    if gb == 0.0 {
        return b;
    }
    let a_neg = ga < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..steps {
        let (g, d) = gd(x);
        if g == 0.0 {
            return x;
        }
        if (g < 0.0) == a_neg {
            a = x;
        } else {
            b = x;
        }
        let mut next = if d != 0.0 { x - g / d } else { f64::NAN };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if abs(next - x) <= 1e-15 * (1.0 + abs(x)) || b - a <= 1e-15 * (1.0 + abs(x)) {
            return next;
        }
        x = next;
    }
    // Newton stalled: finish by bisection on what is left of the bracket.
    bisect(|t| gd(t).0, a, b, 200)
}

/// Golden-ratio sequence in [0, 1), used for deterministic probe points.
pub(crate) fn golden(k: usize) -> f64 {
    const PHI: f64 = 0.618_033_988_749_894_8;
    let v = 0.5 + PHI * k as f64;
    v - libm::floor(v)
}
