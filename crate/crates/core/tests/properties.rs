use approx::assert_relative_eq;
use convexproj::domains::{builtin, builtin_ids, ConvexDomain};
use convexproj::dynamics::north_south_check;
use convexproj::hilbert::hilbert_distance;
use convexproj::projlin::{cross_ratio, proximal_data, ProjEndo, ProjMap, ProjPoint};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn chart_point(d: &ConvexDomain, c: &[f64]) -> ProjPoint {
    d.embed_chart(c).unwrap()
}

fn disk_coords() -> impl Strategy<Value = Vec<f64>> {
    (0.0..0.97f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| vec![r * t.cos(), r * t.sin()])
}

fn square_coords() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.98..0.98f64, 2)
}

fn boost(rapidity: f64) -> ProjMap {
    let (c, s) = (rapidity.cosh(), rapidity.sinh());
    ProjMap::from_rows(&[vec![c, 0.0, s], vec![0.0, 1.0, 0.0], vec![s, 0.0, c]]).unwrap()
}

fn rotation(angle: f64) -> ProjMap {
    let (c, s) = (angle.cos(), angle.sin());
    ProjMap::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
}

fn klein(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum();
    let ny: f64 = y.iter().map(|a| a * a).sum();
    ((1.0 - dot) / ((1.0 - nx) * (1.0 - ny)).sqrt())
        .max(1.0)
        .acosh()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cross_ratio_is_projectively_invariant(
        base in prop::collection::vec(-1.0..1.0f64, 3),
        dir in prop::collection::vec(-1.0..1.0f64, 3),
        ts in prop::collection::btree_set(-40i32..40, 4),
        entries in prop::collection::vec(-1.0..1.0f64, 9),
    ) {
        let b = DVector::from_vec(base);
        let v = DVector::from_vec(dir);
        prop_assume!(b.norm() > 0.1 && v.norm() > 0.1 && b.normalize().cross(&v.normalize()).norm() > 0.1);
        let ts: Vec<f64> = ts.into_iter().map(|t| t as f64 / 10.0).collect();
        let pts: Vec<ProjPoint> = ts.iter().map(|t| ProjPoint::new(&b + &v * *t).unwrap()).collect();
        let m = DMatrix::from_row_slice(3, 3, &entries) + DMatrix::identity(3, 3) * 2.0;
        prop_assume!(m.determinant().abs() > 0.1);
        let g = ProjMap::new(m).unwrap();
        let gp: Vec<ProjPoint> = pts.iter().map(|p| g.apply(p).unwrap()).collect();
        let before = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let after = cross_ratio(&gp[0], &gp[1], &gp[2], &gp[3]).unwrap();
        let (a, x, y, bb) = (ts[0], ts[1], ts[2], ts[3]);
        let oracle = ((bb - x) * (y - a)) / ((bb - y) * (x - a));
        assert_relative_eq!(before, after, max_relative = 1e-8);
        assert_relative_eq!(before, oracle, max_relative = 1e-8);
    }

    #[test]
    fn hilbert_metric_axioms_on_the_disk(x in disk_coords(), y in disk_coords(), z in disk_coords()) {
        let d = builtin("disk").unwrap();
        let (px, py, pz) = (chart_point(&d, &x), chart_point(&d, &y), chart_point(&d, &z));
        let h = |a, b| hilbert_distance(&d, a, b).unwrap();
        prop_assert!(h(&px, &py) >= 0.0);
        prop_assert_eq!(h(&px, &px), 0.0);
        prop_assert_eq!(h(&px, &py), h(&py, &px));
        prop_assert!(h(&px, &pz) <= h(&px, &py) + h(&py, &pz) + 1e-8);
    }

    #[test]
    fn disk_distance_matches_klein_model(x in disk_coords(), y in disk_coords()) {
        let d = builtin("disk").unwrap();
        let h = hilbert_distance(&d, &chart_point(&d, &x), &chart_point(&d, &y)).unwrap();
        prop_assert!((h - klein(&x, &y)).abs() <= 1e-8);
    }

    #[test]
    fn automorphisms_preserve_distance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for id in builtin_ids() {
            let d = builtin(id).unwrap();
            let x = d.sample_interior(&mut rng);
            let y = d.sample_interior(&mut rng);
            let h = hilbert_distance(&d, &x, &y).unwrap();
            for g in d.automorphisms() {
                let gh = hilbert_distance(&d, &g.apply(&x).unwrap(), &g.apply(&y).unwrap()).unwrap();
                prop_assert!((gh - h).abs() <= 1e-8 * (1.0 + h), "{id}: {gh} vs {h}");
            }
        }
    }

    #[test]
    fn smaller_domains_have_larger_distances(x in square_coords(), y in square_coords()) {
        // The square [-1,1]² sits inside the disk of radius √2.
        let square = builtin("square").unwrap();
        let disk = builtin("disk").unwrap();
        let s = std::f64::consts::SQRT_2;
        let hs = hilbert_distance(&square, &chart_point(&square, &x), &chart_point(&square, &y)).unwrap();
        let scaled = |c: &[f64]| chart_point(&disk, &[c[0] / s, c[1] / s]);
        let hd = hilbert_distance(&disk, &scaled(&x), &scaled(&y)).unwrap();
        prop_assert!(hd <= hs + 1e-10);
    }

    #[test]
    fn simplex_distance_is_a_log_ratio_norm(
        x in prop::collection::vec(0.01..1.0f64, 3),
        y in prop::collection::vec(0.01..1.0f64, 3),
    ) {
        let d = builtin("simplex2").unwrap();
        let h = hilbert_distance(&d, &ProjPoint::from_slice(&x).unwrap(), &ProjPoint::from_slice(&y).unwrap()).unwrap();
        let logs: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (b / a).ln()).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = logs.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((h - 0.5 * (max - min)).abs() <= 1e-9 * (1.0 + h));
        // Compared with the Euclidean norm of the centred log vector the
        // distance stays within a fixed factor.
        let mean = logs.iter().sum::<f64>() / 3.0;
        let eucl = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>().sqrt();
        if eucl > 1e-6 {
            let ratio = h / eucl;
            prop_assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn same_face_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for id in ["square", "psd3", "simplex3", "cone_disk"] {
            let d = builtin(id).unwrap();
            let x = d.sample_boundary(&mut rng);
            let y = if seed % 2 == 0 { d.sample_boundary(&mut rng) } else { x.clone() };
            prop_assert_eq!(d.same_face(&x, &y).unwrap(), d.same_face(&y, &x).unwrap());
            prop_assert!(d.same_face(&x, &x).unwrap());
        }
    }

    #[test]
    fn simplicial_distance_is_a_pseudo_metric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for id in ["square", "simplex2", "simplex3"] {
            let d = builtin(id).unwrap();
            let p: Vec<ProjPoint> = (0..3).map(|_| d.sample_boundary(&mut rng)).collect();
            let s = |a: &ProjPoint, b: &ProjPoint| d.simplicial_distance(a, b, 6).unwrap().finite().unwrap();
            prop_assert_eq!(s(&p[0], &p[0]), 0);
            prop_assert_eq!(s(&p[0], &p[1]), s(&p[1], &p[0]));
            prop_assert!(s(&p[0], &p[2]) <= s(&p[0], &p[1]) + s(&p[1], &p[2]));
        }
    }

    #[test]
    fn endomorphism_composition_is_associative(
        a in prop::collection::vec(-1.0..1.0f64, 9),
        b in prop::collection::vec(-1.0..1.0f64, 9),
        c in prop::collection::vec(-1.0..1.0f64, 9),
    ) {
        let m = |v: &[f64]| ProjEndo::new(DMatrix::from_row_slice(3, 3, v)).unwrap();
        let (a, b, c) = (m(&a), m(&b), m(&c));
        if let (Ok(ab_c), Ok(a_bc)) = (
            a.compose(&b).and_then(|ab| ab.compose(&c)),
            b.compose(&c).and_then(|bc| a.compose(&bc)),
        ) {
            prop_assert!(ab_c.distance(&a_bc) <= 1e-9);
        }
    }

    #[test]
    fn north_south_inclusions_persist(rapidity in 0.5..2.0f64, angle in 0.0..std::f64::consts::TAU, seed in any::<u64>()) {
        let d = builtin("disk").unwrap();
        let g = boost(rapidity).conjugate_by(&rotation(angle));
        let r = north_south_check(&d, &g, 0.2, 0.2, 20, 200, seed).unwrap();
        let n = r.n.expect("boosts have north-south dynamics");
        prop_assert!(r.holds[n - 1..].iter().all(|&h| h));
    }

    #[test]
    fn attracting_lines_are_extreme(entries in prop::collection::btree_set(1u32..50, 3), rapidity in 0.1..3.0f64, angle in 0.0..6.3f64) {
        let diag: Vec<f64> = entries.iter().map(|&e| e as f64).collect();
        let simplex = builtin("simplex2").unwrap();
        let g = ProjMap::diagonal(&diag).unwrap();
        let lp = proximal_data(&g).unwrap().attracting_line;
        prop_assert!(simplex.is_extreme(&lp).unwrap());
        let disk = builtin("disk").unwrap();
        let h = boost(rapidity).conjugate_by(&rotation(angle));
        let lp = proximal_data(&h).unwrap().attracting_line;
        prop_assert!(disk.is_extreme(&lp).unwrap());
    }
}
