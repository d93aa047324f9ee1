use hardycone::geometry::{
    chart_metric, fermi_inverse, fermi_map, sphere_distance, tube_distance_projection, tube_projection_point,
    FermiChart, Orientation, TubeSpec,
};
use proptest::prelude::*;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Point of the half ball `{y¹ ≥ 0, |y| < radius}` from raw coordinates.
fn chart_point(raw: &[f64], radius: f64, frac: f64) -> Vec<f64> {
    let mut y: Vec<f64> = raw.to_vec();
    y[0] = y[0].abs();
    let m = norm(&y);
    if m == 0.0 {
        return vec![0.0; y.len()];
    }
    y.iter().map(|v| v / m * frac * radius).collect()
}

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Inside), Just(Orientation::Outside)]
}

fn raw_point() -> impl Strategy<Value = Vec<f64>> {
    (3usize..=6).prop_flat_map(|n| prop::collection::vec(-1.0f64..1.0, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn chart_round_trip(raw in raw_point(), o in orientation(), frac in 0.0f64..0.99) {
        let chart = FermiChart::new(raw.len(), o, 0.5).unwrap();
        let y = chart_point(&raw, chart.radius, frac);
        let x = fermi_map(&chart, &y).unwrap();
        let back = fermi_inverse(&chart, &x).unwrap();
        for (a, b) in y.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12, "{y:?} -> {back:?}");
        }
    }

    #[test]
    fn normal_coordinate_is_distance(raw in raw_point(), o in orientation(), frac in 0.0f64..0.99) {
        let chart = FermiChart::new(raw.len(), o, 0.5).unwrap();
        let y = chart_point(&raw, chart.radius, frac);
        let x = fermi_map(&chart, &y).unwrap();
        let c = chart.center();
        let to_center = norm(&x.iter().zip(&c).map(|(a, b)| a - b).collect::<Vec<_>>());
        let expected = match o {
            Orientation::Inside => 1.0 - to_center,
            Orientation::Outside => to_center - 1.0,
        };
        prop_assert!((expected - y[0]).abs() <= 1e-12);
        prop_assert!((sphere_distance(&chart, &x).unwrap() - y[0]).abs() <= 1e-12);
    }

    #[test]
    fn metric_is_near_identity(raw in raw_point(), o in orientation(), frac in 0.01f64..1.0) {
        let chart = FermiChart::new(raw.len(), o, 0.5).unwrap();
        let y = chart_point(&raw, 0.1, frac);
        let g = chart_metric(&chart, &y, 1e-6);
        let r = norm(&y);
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v - d).abs() <= 3.0 * r + 1e-8, "g[{i}][{j}] = {v} at |y| = {r}");
            }
        }
    }

    #[test]
    fn euclidean_norm_matches_chart_norm(raw in raw_point(), o in orientation(), frac in 0.0f64..1.0) {
        let chart = FermiChart::new(raw.len(), o, 0.5).unwrap();
        let y = chart_point(&raw, 0.2, frac);
        let x = fermi_map(&chart, &y).unwrap();
        let r = norm(&y);
        prop_assert!((norm(&x) - r).abs() <= r * r + 1e-15);
    }

    #[test]
    fn tube_projection_identity(
        n in 4usize..=6,
        phi in -3.1f64..3.1,
        raw in prop::collection::vec(-1.0f64..1.0, 5),
        frac in 0.25f64..0.9,
    ) {
        let tube = TubeSpec::circle(n, 1.0, 0.4).unwrap();
        let mut off = raw[..n - 1].to_vec();
        let m = norm(&off).max(1e-9);
        off.iter_mut().for_each(|v| *v *= frac * tube.beta / m);
        let x = tube.point(phi, &off);
        let (delta, _) = tube_distance_projection(&tube, &x).unwrap();
        let sigma = tube_projection_point(&tube, &x).unwrap();
        let dist = |i: usize, t: f64| {
            let mut p = x.clone();
            p[i] += t;
            tube_distance_projection(&tube, &p).unwrap().0
        };
        // fourth-order central stencil, Richardson-extrapolated to sixth order
        let stencil = |i: usize, h: f64| {
            (8.0 * (dist(i, h) - dist(i, -h)) - (dist(i, 2.0 * h) - dist(i, -2.0 * h))) / (12.0 * h)
        };
        for i in 0..n {
            let h = 1e-3;
            let grad = (16.0 * stencil(i, 0.5 * h) - stencil(i, h)) / 15.0;
            let err = sigma[i] + delta * grad - x[i];
            prop_assert!(err.abs() <= 1e-12, "coord {i}: {err}");
        }
        prop_assert!((delta - norm(&off)).abs() <= 1e-12);
    }
}
