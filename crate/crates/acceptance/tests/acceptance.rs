//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use chainrec::commands::{cmd_chain, cmd_scan, cmd_tangency, COVERING_CSV};
use chainrec::config::{self, RunConfig};
use chainrec::output::EvidenceJson;
use chainrec_core::chain_graph::{build_graph, chain_recurrent_set, epsilon_chain_exists, refine, BoxPartition, TransitionGraph};
use chainrec_core::corpus::{self, quartic_crossing, Role};
use chainrec_core::explosion_scan::{empirical_verdict, find_barricades, Resolution};
use chainrec_core::homoclinic::predict_explosion;
use chainrec_core::map_model::MapFamily;
use chainrec_core::Tolerances;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Every run pins its knobs explicitly.
fn pinned(family: &str, grid: &str, n_boxes: usize, refine_levels: usize, out: &Path) -> RunConfig {
    let text = format!(
        "{family}\n{grid}\n[resolution]\nn_boxes = {n_boxes}\neps_factor = 1.0\nrefine_levels = {refine_levels}\n\
         [tolerances]\ntol_orbit = 1e-9\ntol_hyp = 1e-4\ntol_land = 1e-9\ntol_sn = 1e-3\ndelta_boxes = 8\nperiod_max = 8\n\
         iterate_cap = 32\n[output]\ndir = \"{}\"\nworkers = 1\n",
        out.display()
    );
    config::parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn logistic_section(lo: f64, hi: f64) -> String {
    format!("[family]\nkind = \"logistic\"\nwindow = [{lo:?}, {hi:?}]")
}

/// Saddle-node parameter of the period-3 orbit: bisection on whether
/// `f³(x) − x` has more than two sign changes on a fine grid.
fn period_three_birth() -> f64 {
    let roots = |l: f64| {
        let g = |x: f64| {
            let mut y = x;
            for _ in 0..3 {
                y = l * y * (1.0 - y);
            }
            y - x
        };
        let n = 200_000;
        let mut c = 0;
        let mut prev = g(1e-7);
        for i in 1..=n {
            let v = g(i as f64 / n as f64 * (1.0 - 2e-7) + 1e-7);
            if (v > 0.0) != (prev > 0.0) {
                c += 1;
            }
            prev = v;
        }
        c
    };
    let (mut lo, mut hi) = (3.8, 3.86);
    while hi - lo > 1e-9 {
        let m = 0.5 * (lo + hi);
        if roots(m) > 2 {
            hi = m;
        } else {
            lo = m;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1(tmp: &Path) -> Outcome {
    let cfg = pinned(
        &logistic_section(3.8, 3.86),
        "[grid]\nlo = 3.8\nhi = 3.86\ncount = 61",
        1 << 12,
        0,
        &tmp.join("c1"),
    );
    let t = Instant::now();
    let out = cmd_scan(&cfg).expect("scan");
    let secs = t.elapsed().as_secs_f64();
    let exact = 1.0 + 8f64.sqrt();
    let oracle = period_three_birth();
    let mut d = String::new();
    let sn: Vec<_> = out.events.iter().filter(|e| e.cause == "saddle_node").collect();
    let mut ok = out.events.len() == 1 && sn.len() == 1;
    write!(d, "{} event(s)", out.events.len()).unwrap();
    for e in &out.events {
        write!(d, " [{} side {} lambda0 {:.10}]", e.cause, e.side, e.lambda0).unwrap();
    }
    if let Some(e) = sn.first() {
        let mu = match &e.evidence {
            EvidenceJson::Orbit { orbit, .. } if orbit.period == 3 => Some(orbit.multiplier),
            _ => None,
        };
        ok &= e.side == "below"
            && (e.lambda0 - exact).abs() <= 1e-5
            && (e.lambda0 - oracle).abs() <= 1e-5
            && mu.is_some_and(|m| (m - 1.0).abs() <= 1e-3);
        write!(
            d,
            "; saddle-node: side {} (required below), |lambda0 - (1+sqrt8)| {:.1e}, |lambda0 - root-count oracle| {:.1e}, period-3 multiplier {:?}",
            e.side,
            (e.lambda0 - exact).abs(),
            (e.lambda0 - oracle).abs(),
            mu
        )
        .unwrap();
    }
    ok &= secs <= 60.0;
    write!(d, ", {secs:.1} s").unwrap();
    check(ok, d)
}

fn criterion_2(tmp: &Path) -> Outcome {
    let cfg = pinned(&logistic_section(3.0, 4.0), "[grid]\nvalues = [4.0]", 1 << 12, 0, &tmp.join("c2a"));
    cmd_chain(&cfg).expect("chain");
    // coverage read back from the covering CSV
    let csv = std::fs::read_to_string(tmp.join("c2a").join(COVERING_CSV)).unwrap();
    let covered: f64 = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
            f[3] - f[2]
        })
        .sum();

    let l: f64 = 3.2;
    let cfg = pinned(&logistic_section(3.0, 4.0), "[grid]\nvalues = [3.2]", 1 << 12, 2, &tmp.join("c2b"));
    let s = cmd_chain(&cfg).expect("chain");
    let h = 1.0 / (1u64 << 14) as f64;
    let measure = s.profiles[0].measure;
    // recurrent set at this parameter: 0, the fixed point and the 2-cycle
    let disc = ((l + 1.0) * (l - 3.0)).sqrt();
    let pts = [0.0, 1.0 - 1.0 / l, (l + 1.0 - disc) / (2.0 * l), (l + 1.0 + disc) / (2.0 * l)];
    let csv = std::fs::read_to_string(tmp.join("c2b").join(COVERING_CSV)).unwrap();
    let far = csv
        .lines()
        .skip(1)
        .filter(|line| {
            let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            let mid = 0.5 * (f[2] + f[3]);
            pts.iter().all(|p| (mid - p).abs() > 16.0 * h)
        })
        .count();
    check(
        covered >= 0.99 && measure <= 16.0 * h * 4.0 && far == 0,
        format!(
            "lambda=4 coverage {covered:.6}; lambda=3.2 after two refinements measure {measure:.3e} <= {:.3e}, {far} boxes away from the four orbit points",
            64.0 * h
        ),
    )
}

fn criterion_3(tmp: &Path) -> Outcome {
    let cfg = pinned(&logistic_section(3.0, 4.0), "", 1 << 12, 0, &tmp.join("c3"));
    let recs = cmd_tangency(&cfg, 4.0, None).expect("tangency");
    let f = |x: f64| 4.0 * x * (1.0 - x);
    let landing = f(f(0.5)).abs();
    let ok = recs.len() == 1
        && recs[0].w == 0.5
        && recs[0].l == 2
        && recs[0].x0 == 0.0
        && recs[0].multiplier == 4.0
        && landing <= 1e-12;
    check(
        ok,
        match recs.first() {
            Some(r) => format!(
                "{} record(s): w {} L {} x0 {} multiplier {}, |f^2(w)| = {landing:e}",
                recs.len(),
                r.w,
                r.l,
                r.x0,
                r.multiplier
            ),
            None => "no record".into(),
        },
    )
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let entries = corpus::entries().unwrap();
    let count = |r: Role| entries.iter().filter(|e| e.role == r).count();
    let mut ok = entries.len() >= 6
        && count(Role::Crossing) >= 2
        && count(Role::NonCrossing) >= 2
        && count(Role::BranchIntersection) >= 1
        && count(Role::NegativeDerivative) >= 1;
    let mut d = String::new();
    for e in &entries {
        let rec = e.record(&tol).expect("corpus record");
        let predicted = predict_explosion(&rec);
        let (empirical, _) = empirical_verdict(&e.family, &rec, &e.offsets, &Resolution::new(e.n_boxes), 8, 4).expect("empirics");
        ok &= predicted == empirical && predicted == e.verdict;
        write!(d, "{} {}/{}; ", e.tag, predicted.name(), empirical.name()).unwrap();
    }
    check(ok, format!("{} entries agree: {}", entries.len(), d.trim_end_matches("; ")))
}

/// Scans of every corpus window plus the logistic sweep; returns the
/// explosion parameters found, for the barricade check.
fn criterion_5(tmp: &Path) -> (Outcome, Vec<(MapFamily, f64, f64)>) {
    let mut runs: Vec<(String, RunConfig)> = Vec::new();
    runs.push((
        "logistic [3.5, 4]".into(),
        pinned(&logistic_section(3.5, 4.0), "[grid]\nlo = 3.5\nhi = 4.0\ncount = 501", 1 << 12, 0, &tmp.join("c5")),
    ));
    for (i, e) in corpus::entries().unwrap().into_iter().enumerate() {
        let (lo, hi) = e.family.window;
        // step 1e-3, at most 300 intervals
        let count = (((hi - lo) / 1e-3).round() as usize).clamp(60, 300) + 1;
        let mut cfg = pinned(
            &format!("[family]\nkind = \"corpus\"\ntag = \"{}\"", e.tag),
            &format!("[grid]\nlo = {lo:?}\nhi = {hi:?}\ncount = {count}"),
            e.n_boxes,
            0,
            &tmp.join(format!("c5_{i}")),
        );
        cfg.family = e.family.clone();
        runs.push((e.tag.to_string(), cfg));
    }
    let mut ok = true;
    let mut d = String::new();
    let mut found = Vec::new();
    for (name, cfg) in &runs {
        let out = cmd_scan(cfg).expect("scan");
        ok &= out.unclassified() == 0;
        write!(d, "{name}: {} events/{} unclassified; ", out.events.len(), out.unclassified()).unwrap();
        for e in &out.events {
            found.push((cfg.family.clone(), e.lambda0, e.x));
        }
    }
    (check(ok, d.trim_end_matches("; ").to_string()), found)
}

/// Transitive closure by Warshall on bit rows.
fn closure(g: &TransitionGraph) -> Vec<Vec<u64>> {
    let n = g.n_boxes();
    let words = n.div_ceil(64);
    let mut r = vec![vec![0u64; words]; n];
    for (i, row) in r.iter_mut().enumerate() {
        for j in g.successors(i) {
            row[j / 64] |= 1 << (j % 64);
        }
    }
    for k in 0..n {
        let rk = r[k].clone();
        for row in r.iter_mut() {
            if row[k / 64] >> (k % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&rk) {
                    *a |= b;
                }
            }
        }
    }
    r
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let quartic = quartic_crossing((27.0, 28.5)).unwrap();
    let logistic = MapFamily::logistic((2.5, 4.0)).unwrap();
    let mut graphs = 0;
    let mut mismatches = 0;
    let mut queries = 0;
    for (fam, l) in [
        (&logistic, 3.2),
        (&logistic, 3.5),
        (&logistic, 3.83),
        (&logistic, 4.0),
        (&quartic, corpus::CF_LAMBDA0),
    ] {
        for n in [1 << 8, 1 << 10] {
            let p = BoxPartition::for_family(fam, n).unwrap();
            let g = build_graph(fam, l, p, p.h()).unwrap();
            let r = closure(&g);
            for _ in 0..100 {
                let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
                let brute = r[i][j / 64] >> (j % 64) & 1 == 1;
                mismatches += (brute != epsilon_chain_exists(&g, i, j)) as usize;
                queries += 1;
            }
            graphs += 1;
        }
    }
    check(mismatches == 0, format!("{graphs} graphs, {queries} queries, {mismatches} mismatches"))
}

fn criterion_7() -> Outcome {
    let mut runs = 0;
    let mut bad = Vec::new();
    for e in corpus::entries().unwrap() {
        let mut lams = vec![e.lambda0];
        for &o in &e.offsets {
            lams.extend([e.lambda0 - o, e.lambda0 + o]);
        }
        for l in lams.into_iter().filter(|l| *l >= e.family.window.0 && *l <= e.family.window.1) {
            let p = BoxPartition::for_family(&e.family, e.n_boxes).unwrap();
            let g = build_graph(&e.family, l, p, p.h()).unwrap();
            let c = chain_recurrent_set(&g);
            let fine = refine(&e.family, l, &c).unwrap();
            let gf = build_graph(&e.family, l, fine.partition, fine.eps).unwrap();
            let holds = c.forward_invariant(&g)
                && fine.forward_invariant(&gf)
                && fine.recurrent_indices().all(|i| c.recurrent[i / 2])
                && fine.within_fattened(&c)
                && fine.measure() <= c.measure() + 1e-12;
            if !holds {
                bad.push(format!("{} at {l}", e.tag));
            }
            runs += 1;
        }
    }
    check(bad.is_empty(), format!("{runs} corpus coverings, violations: {bad:?}"))
}

fn criterion_8(found: &[(MapFamily, f64, f64)]) -> Outcome {
    let tol = Tolerances::default();
    let eps = [1e-2, 3e-3, 1e-3];
    let mut sites: Vec<(MapFamily, f64, f64)> = Vec::new();
    for e in corpus::entries().unwrap() {
        if e.verdict.is_explosive() {
            sites.push((e.family.clone(), e.lambda0, e.w));
        }
    }
    sites.extend(found.iter().cloned());
    let mut total = 0;
    let mut uncertified = 0;
    let mut errors = Vec::new();
    for (fam, l, z) in &sites {
        match find_barricades(fam, *l, *z, &eps, 8, &tol) {
            Ok(bs) => {
                total += bs.len();
                uncertified += bs.iter().filter(|b| !b.certified()).count();
            }
            Err(e) => errors.push(format!("{} at {l}: {e}", fam.family_id)),
        }
    }
    check(
        uncertified == 0 && errors.is_empty(),
        format!(
            "{} explosion parameters, {total} barricades, {uncertified} uncertified, errors {errors:?}",
            sites.len()
        ),
    )
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "period-3 explosion", criterion_1(tmp.path())));
    results.push((2, "full-map and hyperbolic recurrence", criterion_2(tmp.path())));
    results.push((3, "tangency certificate at lambda=4", criterion_3(tmp.path())));
    results.push((4, "crossing equivalence on the corpus", criterion_4()));
    let (c5, found) = criterion_5(tmp.path());
    results.push((5, "no unclassified events", c5));
    results.push((6, "chain query vs transitive closure", criterion_6()));
    results.push((7, "covering invariants on corpus runs", criterion_7()));
    results.push((8, "barricades certified", criterion_8(&found)));
    let mut failed = 0;
    for (n, name, o) in &results {
        println!("criterion {n} [{}] {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.ok as usize;
    }
    println!("acceptance: {} passed, {failed} failed ({:.1} s)", results.len() - failed, t.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
