//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::LN_2;
use std::process::{Command, ExitCode};
use std::time::Instant;

use convexproj::cli::default_ping_pong_pair;
use convexproj::domains::{builtin, builtin_ids, ConvexDomain};
use convexproj::dynamics::{north_south_check, ping_pong};
use convexproj::hilbert::{hilbert_distance, min_set_simplex_residual, min_translation};
use convexproj::projlin::{
    eigen_analysis, power_limit, proximal_data, ProjEndo, ProjMap, ProjPoint,
};
use convexproj::rankcheck::{rank_report, RankConfig, RankVerdict};
use convexproj::GeomError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn boost(rapidity: f64) -> ProjMap {
    let (c, s) = (rapidity.cosh(), rapidity.sinh());
    ProjMap::from_rows(&[vec![c, 0.0, s], vec![0.0, 1.0, 0.0], vec![s, 0.0, c]]).unwrap()
}

/// Uniform point of the open ball of radius `r`, by rejection.
fn ball<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
        if v.iter().map(|t| t * t).sum::<f64>() < r * r {
            return v;
        }
    }
}

/// Hyperbolic distance in the Klein model.
fn klein(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum();
    let ny: f64 = y.iter().map(|a| a * a).sum();
    ((1.0 - dot) / ((1.0 - nx) * (1.0 - ny)).sqrt())
        .max(1.0)
        .acosh()
}

fn c1_klein() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for dim in [2, 3] {
        let d = ConvexDomain::ellipsoid(dim).unwrap();
        for _ in 0..1000 {
            let x = ball(&mut rng, dim, 0.95);
            let y = ball(&mut rng, dim, 0.95);
            let h = hilbert_distance(&d, &d.embed_chart(&x).unwrap(), &d.embed_chart(&y).unwrap())
                .unwrap();
            worst = worst.max((h - klein(&x, &y)).abs());
        }
        // Distance from the centre along an axis is artanh of the radius.
        let r = 0.7;
        let mut y = vec![0.0; dim];
        y[0] = r;
        let h = hilbert_distance(&d, &d.center(), &d.embed_chart(&y).unwrap()).unwrap();
        worst = worst.max((h - r.atanh()).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-8 && secs < 5.0,
        format!("max error {worst:.2e}, {secs:.2} s"),
    )
}

fn c2_translation() -> Outcome {
    let simplex = builtin("simplex2").unwrap();
    let disk = builtin("disk").unwrap();
    let cases = [
        (simplex, ProjMap::diagonal(&[4.0, 2.0, 1.0]).unwrap(), LN_2),
        (disk, boost(1.0), 1.0),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (d, g, want) in cases {
        let t = min_translation(&d, &g, 10_000, 2).unwrap();
        ok &= (t.oracle_value - want).abs() <= 1e-4;
        ok &= t.oracle_value >= t.formula_value - 1e-6;
        ok &= (t.formula_value - want).abs() <= 1e-12;
        notes.push(format!(
            "{}: oracle {:.8} vs {:.8}",
            d.name(),
            t.oracle_value,
            want
        ));
    }
    check(ok, notes.join("; "))
}

fn c3_min_set() -> Outcome {
    let cases = [
        (
            builtin("simplex2").unwrap(),
            ProjMap::diagonal(&[4.0, 2.0, 1.0]).unwrap(),
        ),
        (
            builtin("simplex2").unwrap(),
            ProjMap::diagonal(&[3.0, 1.0, 0.5]).unwrap(),
        ),
        (
            builtin("simplex3").unwrap(),
            ProjMap::diagonal(&[8.0, 4.0, 2.0, 1.0]).unwrap(),
        ),
        (
            builtin("simplex3").unwrap(),
            ProjMap::diagonal(&[5.0, 1.0, 1.0, 0.2]).unwrap(),
        ),
    ];
    let worst = cases
        .iter()
        .map(|(d, g)| min_set_simplex_residual(d, g, 1000, 3).unwrap())
        .fold(0.0, f64::max);
    check(worst <= 1e-6, format!("max |H(x, gx) - tau| = {worst:.2e}"))
}

fn c4_power_rate() -> Outcome {
    let g = ProjMap::diagonal(&[4.0, 2.0, 1.0]).unwrap();
    let limit = ProjEndo::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0; 3], vec![0.0; 3]]).unwrap();
    let (ns, logs): (Vec<f64>, Vec<f64>) = (5..=30)
        .map(|n| {
            let e = ProjEndo::from_map(&g.pow(n)).distance(&limit);
            (n as f64, e.ln())
        })
        .unzip();
    let mean_n = ns.iter().sum::<f64>() / ns.len() as f64;
    let mean_l = logs.iter().sum::<f64>() / logs.len() as f64;
    let slope = ns
        .iter()
        .zip(&logs)
        .map(|(n, l)| (n - mean_n) * (l - mean_l))
        .sum::<f64>()
        / ns.iter().map(|n| (n - mean_n).powi(2)).sum::<f64>();
    let ratio = slope.exp();
    let lim = power_limit(&g, 64, 1e-12).unwrap();
    let err = lim.distance(&limit);
    check(
        (0.45..=0.55).contains(&ratio) && err <= 1e-9 && lim.rank() == 1,
        format!("fitted ratio {ratio:.4}, limit error {err:.2e}"),
    )
}

fn c5_ping_pong() -> Outcome {
    let (phi, psi) = default_ping_pong_pair();
    let r = ping_pong(&phi, &psi, 40).unwrap();
    let err = r
        .steps
        .last()
        .and_then(|s| s.attracting_error)
        .unwrap_or(f64::INFINITY);
    let from = r.proximal_from;
    check(
        from.is_some_and(|n| n <= 10) && err <= 1e-6,
        format!("proximal from n = {from:?}, |l+(g_40) - l+(phi)| = {err:.2e}"),
    )
}

fn c6_north_south() -> Outcome {
    let disk = builtin("disk").unwrap();
    let r = north_south_check(&disk, &boost(1.0), 0.2, 0.2, 20, 1000, 4).unwrap();
    let simplex = builtin("simplex2").unwrap();
    let g = ProjMap::diagonal(&[4.0, 2.0, 1.0]).unwrap();
    let rejected = matches!(
        north_south_check(&simplex, &g, 0.2, 0.2, 20, 1000, 4),
        Err(GeomError::HypothesisViolated(_))
    );
    check(
        r.n.is_some_and(|n| n <= 20) && rejected,
        format!("disk N = {:?}, simplex rejected: {rejected}", r.n),
    )
}

fn c7_rank_verdicts() -> Outcome {
    let start = Instant::now();
    let cfg = RankConfig {
        pairs: 500,
        samples: 200,
        cap: 3,
        seed: 5,
    };
    let mut ok = true;
    let mut notes = Vec::new();
    for (id, want) in [
        ("ball3", RankVerdict::RankOneEvidence),
        ("psd3", RankVerdict::HigherRankEvidence),
        ("simplex2", RankVerdict::HigherRankEvidence),
    ] {
        let r = rank_report(&builtin(id).unwrap(), &cfg).unwrap();
        ok &= r.verdict == want && r.coherence.violations == 0;
        notes.push(format!(
            "{id}: {:?}, {} violations",
            r.verdict, r.coherence.violations
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    check(ok, format!("{}; {secs:.2} s", notes.join("; ")))
}

fn c8_extreme_attractors() -> Outcome {
    let (mut total, mut extreme) = (0, 0);
    for id in builtin_ids() {
        let d = builtin(id).unwrap();
        for g in d.automorphisms() {
            if !eigen_analysis(g).unwrap().is_proximal {
                continue;
            }
            let lp = proximal_data(g).unwrap().attracting_line;
            total += 1;
            extreme += d.is_extreme(&lp).unwrap_or(false) as usize;
        }
    }
    check(
        total > 0 && extreme == total,
        format!("{extreme}/{total} attracting lines extreme"),
    )
}

fn c9_metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut asym, mut triangle, mut invariance): (usize, f64, f64) = (0, 0.0, 0.0);
    for id in builtin_ids() {
        let d = builtin(id).unwrap();
        let pts: Vec<[ProjPoint; 3]> = (0..1000)
            .map(|_| std::array::from_fn(|_| d.sample_interior(&mut rng)))
            .collect();
        for [x, y, z] in &pts {
            let h = |a, b| hilbert_distance(&d, a, b).unwrap();
            let (xy, yx, yz, xz) = (h(x, y), h(y, x), h(y, z), h(x, z));
            asym += (xy != yx) as usize;
            triangle = triangle.max(xz - xy - yz);
        }
        for g in d.automorphisms() {
            for [x, y, _] in pts.iter().take(200) {
                let gx = g.apply(x).unwrap();
                let gy = g.apply(y).unwrap();
                let r = (hilbert_distance(&d, &gx, &gy).unwrap()
                    - hilbert_distance(&d, x, y).unwrap())
                .abs();
                invariance = invariance.max(r);
            }
        }
    }
    check(
        asym == 0 && triangle <= 1e-8 && invariance <= 1e-8,
        format!("asymmetric pairs {asym}, triangle excess {triangle:.2e}, invariance residual {invariance:.2e}"),
    )
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_convexproj"))
            .args([
                "rankreport",
                "--domain",
                "psd3",
                "--pairs",
                "200",
                "--seed",
                "7",
                "--out",
            ])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let a = run("a.json")?;
    let b = run("b.json")?;
    check(a == b, format!("{} bytes, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 Hilbert/Klein agreement", c1_klein),
        ("2 translation length formula", c2_translation),
        ("3 min set on simplices", c3_min_set),
        ("4 power-limit rate", c4_power_rate),
        ("5 ping-pong", c5_ping_pong),
        ("6 north-south", c6_north_south),
        ("7 rank verdicts", c7_rank_verdicts),
        ("8 attracting lines are extreme", c8_extreme_attractors),
        ("9 metric axioms", c9_metric_axioms),
        ("10 determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
