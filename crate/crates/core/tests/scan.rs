use chainrec_core::corpus::{quartic_crossing, CF_LAMBDA0, CRISIS_LAMBDA};
use chainrec_core::explosion_scan::*;
use chainrec_core::homoclinic::{Side, Verdict};
use chainrec_core::map_model::{find_saddle_node_parameter, MapFamily};
use chainrec_core::{Error, Tolerances};

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn scan(f: &MapFamily, lo: f64, hi: f64, n: usize) -> Vec<ExplosionEvent> {
    let res = Resolution::new(1 << 12);
    let p = sweep(f, &grid(lo, hi, n), &res);
    detect_explosions(&p, f, &ScanConfig::default(), &res).unwrap()
}

#[test]
fn period_three_birth_is_a_saddle_node_event() {
    let f = MapFamily::logistic((3.8, 3.86)).unwrap();
    let ev = scan(&f, 3.8, 3.86, 60);
    // the birth, and the interior crisis closing the window
    assert_eq!(ev.len(), 2, "{ev:?}");
    let e = &ev[0];
    assert_eq!(e.cause, Cause::SaddleNode);
    let sn = find_saddle_node_parameter(&f, 3, 3.8, 3.86).unwrap();
    assert!((e.lambda0 - sn).abs() <= 1e-6);
    assert!((e.lambda0 - (1.0 + 8f64.sqrt())).abs() <= 1e-5);
    // the gaps open on the parameter side where the 3-cycle exists
    assert_eq!(e.side, Side::Above);
    assert!(e.bracket.1 - e.bracket.0 <= 1e-8);
    match &e.evidence {
        Evidence::Orbit { orbit, .. } => {
            assert_eq!(orbit.period(), 3);
            assert!((orbit.multiplier - 1.0).abs() <= 1e-4);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn period_three_window_ends_in_a_crisis() {
    let f = MapFamily::logistic((3.8, 3.86)).unwrap();
    let ev = scan(&f, 3.8, 3.86, 60);
    let e = &ev[1];
    assert_eq!(e.cause, Cause::TangencyCrossing);
    assert!((e.lambda0 - CRISIS_LAMBDA).abs() <= 1e-9, "{}", e.lambda0);
    // the bands are separated below the crisis
    assert_eq!(e.side, Side::Below);
    assert_eq!(e.verdict, Some(Verdict::ExplosionAtPreimagesOnly));
    match &e.evidence {
        Evidence::Record(r) => {
            assert_eq!(r.period, 3);
            assert_eq!(r.w, 0.5);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn event_certificate_holds() {
    let f = MapFamily::logistic((3.8, 3.86)).unwrap();
    for e in scan(&f, 3.8, 3.86, 60) {
        let res = Resolution::new(e.n_boxes);
        assert!(reverifies(&f, &res, &e).unwrap());
        let c = res.covering(&f, e.lambda_box).unwrap();
        assert!(c.contains_point(e.x));
        let d = (e.delta / c.partition.h()).round() as usize;
        let j = c.partition.box_of(e.x);
        let (void_end, dir) = match e.side {
            Side::Above => (e.bracket.1, 1.0),
            Side::Below => (e.bracket.0, -1.0),
        };
        for t in [0.1, 0.5, 1.0] {
            let l = void_end + dir * t * 1e-3;
            let c = res.covering(&f, l).unwrap();
            assert!((j - d..=j + d).all(|i| !c.recurrent[i]), "{l}");
        }
    }
}

#[test]
fn hyperbolic_window_is_quiet() {
    let f = MapFamily::logistic((2.0, 2.5)).unwrap();
    assert!(scan(&f, 2.0, 2.5, 50).is_empty());
}

#[test]
fn quartic_crossing_event() {
    let f = quartic_crossing((27.0, 28.5)).unwrap();
    let ev = scan(&f, 27.4, 27.8, 40);
    assert_eq!(ev.len(), 1, "{ev:?}");
    let e = &ev[0];
    assert_eq!(e.cause, Cause::TangencyCrossing);
    assert!((e.lambda0 - CF_LAMBDA0).abs() <= 1e-9);
    assert_eq!(e.side, Side::Below);
    assert_eq!(e.verdict, Some(Verdict::ExplosionAtW));
    match &e.evidence {
        Evidence::Record(r) => {
            assert!(r.crossing);
            assert!((r.w - 0.425).abs() < 1e-9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn saddle_node_orbit_blocks_its_basin() {
    let f = MapFamily::logistic((3.8, 3.86)).unwrap();
    let l = find_saddle_node_parameter(&f, 3, 3.8, 3.86).unwrap();
    let h = 1.0 / 1024.0;
    let b = find_barricades(&f, l, 0.5, &[4.0 * h, 2.0 * h, h], 6, &Tolerances::default()).unwrap();
    assert_eq!(b.len(), 3, "{b:?}");
    for x in &b {
        assert_eq!(x.orbit.period(), 3);
        assert!(x.non_hyperbolic && x.certified());
        assert!(x.levels.iter().all(|v| v.extra > 0));
    }
}

#[test]
fn barricade_levels_must_decrease() {
    let f = MapFamily::logistic((3.0, 4.0)).unwrap();
    assert!(find_barricades(&f, 3.2, 0.3, &[1e-3], 4, &Tolerances::default()).is_err());
    assert!(find_barricades(&f, 3.2, 0.3, &[1e-3, 2e-3], 4, &Tolerances::default()).is_err());
}

/// Superstable parameters `f^{2^k}(1/2) = 1/2` by Newton in λ, then
/// geometric extrapolation of the cascade.
fn feigenbaum_point() -> f64 {
    let g = |l: f64, k: u32| {
        let mut x = 0.5;
        for _ in 0..1usize << k {
            x = l * x * (1.0 - x);
        }
        x - 0.5
    };
    let mut s = vec![2.0, 1.0 + 5f64.sqrt()];
    let mut delta = 4.7;
    for k in 2..=12u32 {
        let n = s.len();
        let mut l = s[n - 1] + (s[n - 1] - s[n - 2]) / delta;
        for _ in 0..50 {
            let h = 1e-11;
            let d = (g(l + h, k) - g(l - h, k)) / (2.0 * h);
            let step = g(l, k) / d;
            l -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        s.push(l);
        let n = s.len();
        delta = (s[n - 2] - s[n - 3]) / (s[n - 1] - s[n - 2]);
    }
    let n = s.len();
    s[n - 1] + (s[n - 1] - s[n - 2]) / (delta - 1.0)
}

#[test]
fn omega_classes() {
    let f = MapFamily::logistic((2.5, 4.0)).unwrap();
    let t = Tolerances::default();
    assert_eq!(classify_omega(&f, 3.2, 0.3, 8, &t).unwrap(), OmegaClass::Periodic(2));
    assert_eq!(classify_omega(&f, 4.0, 0.3, 8, &t).unwrap(), OmegaClass::IntervalCycle);
    let l = feigenbaum_point();
    assert!((l - 3.569_945_671_869_544).abs() < 1e-9, "{l}");
    assert_eq!(classify_omega(&f, l, 0.5, 64, &t).unwrap(), OmegaClass::CantorLike);
}

#[test]
fn omega_escape_is_an_error() {
    let f = MapFamily::quadratic_extended((-2.0, 2.0), (-2.5, -2.0)).unwrap();
    assert_eq!(classify_omega(&f, -2.2, 0.0, 8, &Tolerances::default()), Err(Error::EscapedDomain));
}
