//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tailpc_core::detector::scanned_ranks;
use tailpc_core::spectra::{correlation_of, CorrelationMatrix};
use tailpc_core::synth::{DividendSchedule, Plant, PlantCoupling};
use tailpc_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.pass = false;
    }
    o.detail = format!("{} ({:.2}s, limit {}s)", o.detail, took.as_secs_f64(), limit.as_secs());
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("returns pipeline fidelity", returns_fidelity),
        ("eigensolver correctness", eigensolver),
        ("sign semantics", sign_semantics),
        ("planted structure recovery", planted_recovery),
        ("group split by sign pattern", group_split),
        ("four-member group", four_member_group),
        ("rolling-window breakdown", rolling_breakdown),
        ("determinism", determinism),
        ("invariance suite", invariance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {}: {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn market(spec: &SynthSpec) -> (SynthMarket, ReturnPanel, EigenDecomposition) {
    let m = generate(spec).unwrap();
    let rp = compute_returns(&m.panel).unwrap();
    let ed = eigendecompose(&correlation(&rp).unwrap()).unwrap();
    (m, rp, ed)
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let sxx: f64 = x.iter().map(|u| (u - mx) * (u - mx)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    sxy / (sxx * syy).sqrt()
}

/// The `k` pairs with the largest absolute sample correlation.
fn top_pairs(rp: &ReturnPanel, k: usize) -> Vec<(usize, usize)> {
    let mut all = Vec::new();
    for a in 0..rp.n_tickers() {
        for b in (a + 1)..rp.n_tickers() {
            all.push((pearson(rp.series(a), rp.series(b)).abs(), a, b));
        }
    }
    all.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut out: Vec<(usize, usize)> = all[..k].iter().map(|&(_, a, b)| (a, b)).collect();
    out.sort();
    out
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let x = (rng.next_u32() as usize) % n;
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

// 1 -----------------------------------------------------------------------

fn returns_fidelity() -> Outcome {
    timed(Duration::from_secs(1), || {
        let d = |day| NaiveDate::from_ymd_opt(2024, 3, day).unwrap();
        let panel = PricePanel::from_observations([(d(4), "X", 100.0), (d(5), "X", 102.0), (d(6), "X", 99.0), (d(7), "X", 101.0)])
            .unwrap()
            .with_dividends([DividendEvent { date: d(5), ticker: "X".into(), amount: 2.0 }])
            .unwrap();
        let pnew = adjust_prices(&panel, "X").unwrap();
        let rp = compute_returns(&panel).unwrap();
        let want_p = [100.0, 104.0, 99.0 * 104.0 / 102.0, 101.0 * 104.0 / 102.0];
        let want_r = [0.04, 99.0 / 102.0 - 1.0, 2.0 / 99.0];
        let worst = pnew
            .iter()
            .zip(&want_p)
            .chain(rp.series(0).iter().zip(&want_r))
            .map(|(g, w)| rel_err(*g, *w))
            .fold(0.0, f64::max);
        let dates_ok = rp.dates() == [d(4), d(5), d(6)];
        outcome(worst <= 1e-12 && dates_ok && pnew.len() == 4, format!("max relative error {worst:.1e}"))
    })
}

// 2 -----------------------------------------------------------------------

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Correlation of `t` draws of `p` series sharing a random common factor.
fn random_correlation(rng: &mut ChaCha8Rng, p: usize, t: usize) -> CorrelationMatrix {
    let strength = (rng.next_u32() % 1000) as f64 / 500.0;
    let common: Vec<f64> = (0..t).map(|_| normal(rng)).collect();
    let series: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            let load = normal(rng);
            common.iter().map(|c| strength * load * c + normal(rng)).collect()
        })
        .collect();
    let refs: Vec<&[f64]> = series.iter().map(Vec::as_slice).collect();
    let names: Vec<String> = (0..p).map(|i| format!("X{i}")).collect();
    correlation_of(&names, &refs).unwrap()
}

/// Coefficients of `det(xI - A)`, highest power first, by Faddeev-LeVerrier.
fn char_poly(a: &[f64], n: usize) -> Vec<f64> {
    let mul = |x: &[f64], y: &[f64]| {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[i * n + j] += x[i * n + k] * y[k * n + j];
                }
            }
        }
        out
    };
    let mut c = vec![1.0];
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        let mut next = mul(a, &m);
        for i in 0..n {
            next[i * n + i] += c[k - 1];
        }
        m = next;
        let am = mul(a, &m);
        let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
        c.push(-trace / k as f64);
    }
    c
}

fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &k| acc * x + k)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len() - 1;
    c[..n].iter().enumerate().map(|(i, &k)| k * (n - i) as f64).collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots in `[lo, hi]` of a polynomial whose roots are all real, found
/// by bisection between consecutive critical points.
fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    if c.len() == 2 {
        return vec![-c[1] / c[0]];
    }
    let mut knots = vec![lo];
    knots.extend(real_roots(&derivative(c), lo, hi));
    knots.push(hi);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 {
            roots.push(a);
        } else if (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(c, a, b));
        } else if fa.abs() < 1e-12 {
            // double root at a critical point
            roots.push(a);
        }
    }
    roots.truncate(c.len() - 1);
    roots
}

fn eigen_invariants(cm: &CorrelationMatrix) -> Result<(), String> {
    let p = cm.dim();
    let ed = eigendecompose(cm).map_err(|e| e.to_string())?;
    let norm = cm.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    for k in 1..=p {
        let v = ed.loadings(k);
        let lam = ed.eigenvalue(k);
        let res: f64 = (0..p)
            .map(|i| {
                let cv: f64 = (0..p).map(|j| cm.get(i, j) * v[j]).sum();
                (cv - lam * v[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if res > 1e-9 * norm {
            return Err(format!("residual {res:.1e} on rank {k} of p={p}"));
        }
        for l in k..=p {
            let d: f64 = v.iter().zip(ed.loadings(l)).map(|(a, b)| a * b).sum();
            let want = if k == l { 1.0 } else { 0.0 };
            if (d - want).abs() > 1e-9 {
                return Err(format!("orthonormality {d:.1e} at ({k},{l}) of p={p}"));
            }
        }
    }
    let trace: f64 = ed.eigenvalues().iter().sum();
    if rel_err(trace, p as f64) > 1e-10 {
        return Err(format!("trace {trace} for p={p}"));
    }
    if ed.eigenvalues().windows(2).any(|w| w[0] < w[1]) {
        return Err("eigenvalues not descending".into());
    }
    Ok(())
}

fn eigensolver() -> Outcome {
    timed(Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for case in 0..200 {
            let p = 3 + (rng.next_u32() as usize) % 38;
            // every tenth panel is shorter than its width and so singular
            let t = if case % 10 == 0 { p / 2 + 2 } else { p + 10 + (rng.next_u32() as usize) % 400 };
            let cm = random_correlation(&mut rng, p, t);
            if let Err(e) = eigen_invariants(&cm) {
                return outcome(false, format!("case {case}: {e}"));
            }
        }
        let mut worst = 0.0_f64;
        for case in 0..100 {
            let t = 6 + (rng.next_u32() as usize) % 100;
            let cm = random_correlation(&mut rng, 4, t);
            let mut want = real_roots(&char_poly(cm.values(), 4), -1.0, 5.0);
            want.sort_by(|a, b| b.total_cmp(a));
            if want.len() != 4 {
                return outcome(false, format!("oracle found {} roots in 4x4 case {case}", want.len()));
            }
            let ed = eigendecompose(&cm).unwrap();
            for (g, w) in ed.eigenvalues().iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
        }
        outcome(
            worst <= 1e-8,
            format!("200 matrices within tolerance; 100 4x4 cases, max deviation from oracle {worst:.1e}"),
        )
    })
}

// 3 -----------------------------------------------------------------------

fn sign_semantics() -> Outcome {
    let cfg = DetectorConfig::default();
    let mut hits = [0; 2];
    for (slot, target) in [0.98, -0.98].into_iter().enumerate() {
        for seed in 0..100u64 {
            let a = (seed % 20) as usize;
            let b = (a + 1 + (seed as usize * 7) % 19) % 20;
            let spec = SynthSpec { seed, n_stocks: 20, n_days: 1001, planted: vec![Plant::pair(a, b, target)], ..Default::default() };
            let (_, _, ed) = market(&spec);
            let groups = detect(&ed, &cfg).unwrap();
            let pair = [a.min(b), a.max(b)];
            let Some(g) = groups.iter().find(|g| g.member_indices == pair) else { continue };
            let want = if target > 0.0 { -1 } else { 1 };
            let products: Vec<i8> = (0..g.detecting_pcs.len())
                .filter(|&k| g.sign_pattern[0][k] != 0 && g.sign_pattern[1][k] != 0)
                .map(|k| g.sign_pattern[0][k] * g.sign_pattern[1][k])
                .collect();
            if !products.is_empty() && products.iter().all(|&s| s == want) {
                hits[slot] += 1;
            }
        }
    }
    outcome(hits == [100, 100], format!("+0.98 opposite signs {}/100, -0.98 equal signs {}/100", hits[0], hits[1]))
}

// 4 -----------------------------------------------------------------------

fn max_background_correlation(m: &SynthMarket, spec: &SynthSpec) -> f64 {
    let k = &m.answer;
    let var = |i: usize| (k.betas[i] * spec.market_vol).powi(2) + k.idio_vols[i].powi(2);
    let same_plant = |i: usize, j: usize| spec.planted.iter().any(|pl| pl.members.contains(&i) && pl.members.contains(&j));
    let mut worst = 0.0_f64;
    for i in 0..spec.n_stocks {
        for j in (i + 1)..spec.n_stocks {
            if !same_plant(i, j) {
                let cov = k.betas[i] * k.betas[j] * spec.market_vol * spec.market_vol;
                worst = worst.max((cov / (var(i) * var(j)).sqrt()).abs());
            }
        }
    }
    worst
}

fn planted_recovery() -> Outcome {
    timed(Duration::from_secs(120), || {
        let cfg = DetectorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut exact, mut disagree) = (0, 0);
        let mut background = 0.0_f64;
        for seed in 0..100u64 {
            let idx = distinct(&mut rng, 50, 6);
            let planted: Vec<Plant> = idx.chunks(2).map(|c| Plant::pair(c[0], c[1], 0.97)).collect();
            let spec = SynthSpec { seed, n_stocks: 50, n_days: 1001, planted, ..Default::default() };
            let (m, rp, ed) = market(&spec);
            background = background.max(max_background_correlation(&m, &spec));
            let groups = detect(&ed, &cfg).unwrap();
            let mut got: Vec<(usize, usize)> = groups
                .iter()
                .filter(|g| g.member_indices.len() == 2)
                .map(|g| (g.member_indices[0], g.member_indices[1]))
                .collect();
            got.sort();
            let mut want: Vec<(usize, usize)> = idx.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
            want.sort();
            if groups.len() == 3 && got == want {
                exact += 1;
                if top_pairs(&rp, 3) != got {
                    disagree += 1;
                }
            }
        }
        outcome(
            exact >= 95 && disagree == 0 && background <= 0.6,
            format!("exact recovery {exact}/100, oracle disagreements {disagree}, max background correlation {background:.3}"),
        )
    })
}

// 5 -----------------------------------------------------------------------

fn group_split() -> Outcome {
    let cfg = DetectorConfig::default();
    let four = [2usize, 9, 14, 21];
    let (mut co, mut ok) = (0, 0);
    for seed in 0..100u64 {
        let spec = SynthSpec {
            seed,
            n_stocks: 30,
            n_days: 1001,
            planted: vec![
                Plant::pair(2, 9, 0.97),
                Plant { coupling: Some(PlantCoupling { plant: 0, strength: 0.7 }), ..Plant::pair(14, 21, 0.97) },
            ],
            ..Default::default()
        };
        let (_, _, ed) = market(&spec);
        let shared = scanned_ranks(&ed, &cfg)
            .unwrap()
            .into_iter()
            .filter(|&r| {
                let s = significant_loadings(&ed, r, &cfg);
                four.iter().all(|i| s.iter().any(|(j, _)| j == i))
            })
            .count();
        if shared < 2 {
            continue;
        }
        co += 1;
        let groups = detect(&ed, &cfg).unwrap();
        let split = groups.len() == 2
            && groups.iter().any(|g| g.member_indices == [2, 9])
            && groups.iter().any(|g| g.member_indices == [14, 21]);
        if split && groups.iter().all(|g| g.implied_signs.iter().all(|s| s.sign == 1)) {
            ok += 1;
        }
    }
    outcome(ok >= 90, format!("all four co-significant on >= 2 trailing PCs in {co}/100; correct split in {ok}/100"))
}

// 6 -----------------------------------------------------------------------

fn four_member_group() -> Outcome {
    let cfg = DetectorConfig::default();
    let four = [5usize, 12, 19, 33];
    let mut ok = 0;
    let mut tight = 0;
    for seed in 0..100u64 {
        let spec = SynthSpec {
            seed,
            n_stocks: 40,
            n_days: 1001,
            planted: vec![Plant { members: four.to_vec(), target_corr: 0.98, start_day: None, end_day: None, coupling: None }],
            ..Default::default()
        };
        let (_, rp, ed) = market(&spec);
        let mutual = four.iter().enumerate().all(|(x, &a)| four[x + 1..].iter().all(|&b| pearson(rp.series(a), rp.series(b)) >= 0.95));
        if mutual {
            tight += 1;
        }
        let groups = detect(&ed, &cfg).unwrap();
        if mutual && groups.len() == 1 && groups[0].member_indices == four && groups[0].detecting_pcs.len() >= 2 {
            ok += 1;
        }
    }
    outcome(ok >= 90, format!("mutual sample correlation >= 0.95 in {tight}/100; single multi-PC group in {ok}/100"))
}

// 7 -----------------------------------------------------------------------

fn rolling_breakdown() -> Outcome {
    let cfg = DetectorConfig::default();
    let (window, step, switch) = (250, 50, 500);
    let mut ok = 0;
    let mut missed = Vec::new();
    for seed in 0..50u64 {
        let a = (seed % 20) as usize;
        let b = (a + 5 + (seed as usize * 3) % 10) % 20;
        let spec = SynthSpec {
            seed,
            n_stocks: 20,
            n_days: 1001,
            planted: vec![Plant { end_day: Some(switch), ..Plant::pair(a, b, 0.98) }],
            ..Default::default()
        };
        let rp = compute_returns(&generate(&spec).unwrap().panel).unwrap();
        let (ta, tb) = (synth::ticker_name(a), synth::ticker_name(b));
        let windows = rolling_detect(&rp, window, step, &cfg).unwrap();
        let found = |w: &WindowDetection| w.groups.iter().any(|g| g.contains(&ta) && g.contains(&tb));
        let first = windows.iter().filter(|w| w.start_index + window <= switch).all(found);
        let second = windows.iter().filter(|w| w.start_index >= switch).any(found);
        if first && !second {
            ok += 1;
        } else {
            missed.push(seed);
        }
    }
    outcome(ok >= 45, format!("{ok}/50 seeds (need 45, 90%); failing seeds {missed:?}"))
}

// 8 -----------------------------------------------------------------------

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Every output file except the manifest, which records wall-clock times.
fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name != "manifest.json" {
            out.insert(name, std::fs::read(&path).unwrap());
        }
    }
    out
}

fn run_cli(name: &str, out: &Path, extra: &[&str]) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let dir = fixture(name);
    let status = Command::new(env!("CARGO_BIN_EXE_tailpc"))
        .arg("analyze")
        .arg("--prices")
        .arg(dir.join("prices.csv"))
        .arg("--dividends")
        .arg(dir.join("dividends.csv"))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{name}: exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    Ok(outputs(out))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut compared = 0;
    for name in ["pair", "mixed", "regime"] {
        let base = tmp.path().join(name);
        let runs = [
            ("first", vec![]),
            ("second", vec![]),
            ("rolling-1", vec!["--window", "100", "--step", "50", "--threads", "1"]),
            ("rolling-4", vec!["--window", "100", "--step", "50", "--threads", "4"]),
        ];
        let mut got = Vec::new();
        for (label, extra) in &runs {
            match run_cli(name, &base.join(label), extra) {
                Ok(files) => got.push(files),
                Err(e) => return outcome(false, e),
            }
        }
        let svgs = got[0].keys().filter(|k| k.ends_with(".svg")).count();
        if !got[0].contains_key("detection.json") || svgs == 0 || !got[2].contains_key("rolling.json") {
            return outcome(false, format!("{name}: expected detection.json, rolling.json and SVG outputs"));
        }
        for (a, b) in [(0, 1), (2, 3)] {
            if got[a] != got[b] {
                let diff: Vec<&String> = got[a].keys().filter(|k| got[a].get(*k) != got[b].get(*k)).collect();
                return outcome(false, format!("{name}: {} and {} differ in {diff:?}", runs[a].0, runs[b].0));
            }
        }
        // the full-sample artifacts do not depend on the rolling pass
        for (k, v) in &got[0] {
            if got[2].get(k) != Some(v) {
                return outcome(false, format!("{name}: {k} changes when a window is requested"));
            }
        }
        compared += got[0].len() + got[2].len();
    }
    outcome(true, format!("three fixtures, {compared} files byte-identical across repeat runs and 1 vs 4 threads"))
}

// 9 -----------------------------------------------------------------------

/// Detection output keyed by ticker so that it can be compared across
/// orderings: members, detecting components, eigenvalues and per-ticker signs.
fn canonical(groups: &[RelationshipGroup]) -> Vec<(Vec<String>, Vec<usize>, Vec<f64>, Vec<Vec<i8>>, Vec<i8>)> {
    let mut out: Vec<_> = groups
        .iter()
        .map(|g| {
            let mut order: Vec<usize> = (0..g.members.len()).collect();
            order.sort_by(|&a, &b| g.members[a].cmp(&g.members[b]));
            let members: Vec<String> = order.iter().map(|&m| g.members[m].clone()).collect();
            let signs: Vec<Vec<i8>> = order.iter().map(|&m| g.sign_pattern[m].clone()).collect();
            let mut pair_signs: Vec<(String, String, i8)> = g
                .implied_signs
                .iter()
                .map(|s| if s.a < s.b { (s.a.clone(), s.b.clone(), s.sign) } else { (s.b.clone(), s.a.clone(), s.sign) })
                .collect();
            pair_signs.sort();
            (members, g.detecting_pcs.clone(), g.eigenvalues.clone(), signs, pair_signs.into_iter().map(|s| s.2).collect())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn same_detection(a: &[RelationshipGroup], b: &[RelationshipGroup]) -> bool {
    let (x, y) = (canonical(a), canonical(b));
    x.len() == y.len()
        && x.iter().zip(&y).all(|(g, h)| {
            g.0 == h.0
                && g.1 == h.1
                && g.3 == h.3
                && g.4 == h.4
                && g.2.iter().zip(&h.2).all(|(u, v)| (u - v).abs() <= 1e-10)
        })
}

fn detect_panel(panel: &PricePanel) -> Vec<RelationshipGroup> {
    let rp = compute_returns(panel).unwrap();
    detect(&eigendecompose(&correlation(&rp).unwrap()).unwrap(), &DetectorConfig::default()).unwrap()
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut with_groups = 0;
    for case in 0..50u64 {
        let p = 8 + (rng.next_u32() as usize) % 25;
        let n_pairs = (rng.next_u32() as usize) % 3;
        let idx = distinct(&mut rng, p, 2 * n_pairs);
        let planted = idx
            .chunks(2)
            .map(|c| Plant::pair(c[0], c[1], if rng.next_u32() % 2 == 0 { 0.97 } else { -0.97 }))
            .collect();
        let spec = SynthSpec {
            seed: 1000 + case,
            n_stocks: p,
            n_days: 300 + (rng.next_u32() as usize) % 700,
            planted,
            dividend_schedule: Some(DividendSchedule { every_days: 60, yield_fraction: 0.01 }),
            ..Default::default()
        };
        let panel = generate(&spec).unwrap().panel;
        let base = detect_panel(&panel);
        if !base.is_empty() {
            with_groups += 1;
        }

        let mut order: Vec<usize> = (0..p).collect();
        for i in (1..p).rev() {
            order.swap(i, (rng.next_u32() as usize) % (i + 1));
        }
        if !same_detection(&base, &detect_panel(&panel.select(&order))) {
            return outcome(false, format!("case {case}: permutation {order:?} changed the detection"));
        }

        let scales: Vec<f64> = (0..p).map(|_| 0.01 * 10f64.powf(4.0 * (rng.next_u32() as f64 / u32::MAX as f64))).collect();
        let obs = panel.observations().into_iter().map(|(d, t, c)| {
            let i = panel.ticker_index(t).unwrap();
            (d, t.to_string(), c * scales[i])
        });
        let events = panel.dividend_events().into_iter().map(|mut e| {
            e.amount *= scales[panel.ticker_index(&e.ticker).unwrap()];
            e
        });
        let scaled = PricePanel::from_observations(obs).unwrap().with_dividends(events).unwrap();
        if !same_detection(&base, &detect_panel(&scaled)) {
            return outcome(false, format!("case {case}: rescaling changed the detection"));
        }
    }
    outcome(true, format!("50 panels ({with_groups} with groups) unchanged under permutation and positive rescaling"))
}
