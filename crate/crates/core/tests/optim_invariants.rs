use agghb_core::linalg::{dist, norm};
use agghb_core::optim::{momentum_expansion, Optimizer};
use agghb_core::{AggConfig, AggregatedHeavyBall, AveragingState, GradientDescent, HeavyBall};
use proptest::prelude::*;

fn diag_grad(d: &[f64], x: &[f64]) -> Vec<f64> {
    d.iter().zip(x).map(|(a, b)| a * b).collect()
}

fn setup() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..6).prop_flat_map(|n| (prop::collection::vec(0.1f64..4.0, n), prop::collection::vec(-3.0f64..3.0, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_buffer_matches_heavy_ball((d, x0) in setup(), beta in 0.0f64..0.99, a in 0.01f64..1.0) {
        let gamma = a / 4.0;
        let mut hb = HeavyBall::new(beta, gamma, x0.clone()).unwrap();
        let mut agg = AggregatedHeavyBall::new(AggConfig::heavy_ball(beta, gamma).unwrap(), x0).unwrap();
        for _ in 0..200 {
            hb.step(&diag_grad(&d, hb.x())).unwrap();
            agg.step(&diag_grad(&d, agg.x())).unwrap();
            prop_assert!(dist(hb.x(), agg.x()) <= 1e-12 * norm(hb.x()).max(1e-300));
            prop_assert_eq!(hb.buffer(), agg.buffers()[0].as_slice());
        }
    }

    #[test]
    fn zero_momentum_is_gradient_descent(
        (d, x0) in setup(),
        gammas in prop::collection::vec(0.01f64..0.2, 1..5),
    ) {
        let m = gammas.len();
        let mut agg = AggregatedHeavyBall::new(AggConfig::new(vec![0.0; m], gammas.clone()).unwrap(), x0.clone()).unwrap();
        let alpha = gammas.iter().sum::<f64>() / m as f64;
        let mut gd = GradientDescent::new(alpha, x0).unwrap();
        for _ in 0..100 {
            agg.step(&diag_grad(&d, agg.x())).unwrap();
            gd.step(&diag_grad(&d, gd.x())).unwrap();
            prop_assert!(dist(gd.x(), agg.x()) <= 1e-12 * (1.0 + norm(gd.x())));
        }
    }

    #[test]
    fn virtual_iterates_follow_gradient_steps(
        (d, x0) in setup(),
        betas in prop::collection::vec(0.0f64..0.995, 1..6),
        gamma in 0.001f64..0.05,
    ) {
        let m = betas.len() as f64;
        let eta = betas.iter().map(|b| gamma / (1.0 - b)).sum::<f64>() / m;
        let mut s = AggregatedHeavyBall::new(AggConfig::uniform(betas, gamma).unwrap(), x0.clone()).unwrap();
        prop_assert_eq!(s.virtual_iterate(), x0);
        for _ in 0..300 {
            let g = diag_grad(&d, s.x());
            let before = s.virtual_iterate();
            s.step(&g).unwrap();
            let after = s.virtual_iterate();
            let residual: Vec<f64> = after.iter().zip(&before).zip(&g).map(|((a, b), gi)| a - b + eta * gi).collect();
            prop_assert!(norm(&residual) <= 1e-10 * (1.0 + norm(&before)));
        }
    }

    #[test]
    fn buffers_expand_gradient_history(
        (d, x0) in setup(),
        betas in prop::collection::vec(0.0f64..0.99, 1..5),
        gamma in 0.001f64..0.1,
    ) {
        let mut s = AggregatedHeavyBall::new(AggConfig::uniform(betas.clone(), gamma).unwrap(), x0).unwrap();
        let mut history = Vec::new();
        for _ in 0..60 {
            let g = diag_grad(&d, s.x());
            history.push(g.clone());
            s.step(&g).unwrap();
        }
        for (buf, &beta) in s.buffers().iter().zip(&betas) {
            let expected = momentum_expansion(&history, beta).unwrap();
            prop_assert!(dist(buf, &expected) <= 1e-12 * (1.0 + norm(&expected)));
        }
    }

    #[test]
    fn buffer_order_does_not_matter(
        (d, x0) in setup(),
        pairs in prop::collection::vec((0.0f64..0.99, 0.001f64..0.05), 2..5),
    ) {
        let (b, g): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        let (br, gr): (Vec<f64>, Vec<f64>) = pairs.iter().rev().cloned().unzip();
        let mut s = AggregatedHeavyBall::new(AggConfig::new(b, g).unwrap(), x0.clone()).unwrap();
        let mut r = AggregatedHeavyBall::new(AggConfig::new(br, gr).unwrap(), x0).unwrap();
        for _ in 0..100 {
            s.step(&diag_grad(&d, s.x())).unwrap();
            r.step(&diag_grad(&d, r.x())).unwrap();
        }
        prop_assert!(dist(s.x(), r.x()) <= 1e-10 * (1.0 + norm(s.x())));
    }
}

#[test]
fn averaging_matches_direct_weighted_sum() {
    let rho: f64 = 1.01;
    let k_max = 10_000;
    let xs: Vec<[f64; 2]> = (0..=k_max).map(|k| [(k as f64 * 0.37).sin(), 1.0 / (1.0 + k as f64)]).collect();
    let mut avg = AveragingState::new(rho).unwrap();
    for x in &xs {
        avg.update(x).unwrap();
    }
    // w_k = ρ^k, computed directly
    let mut num = [0.0; 2];
    let mut den = 0.0;
    for (k, x) in xs.iter().enumerate() {
        let w = rho.powi(k as i32);
        num[0] += w * x[0];
        num[1] += w * x[1];
        den += w;
    }
    let direct = [num[0] / den, num[1] / den];
    let got = avg.average().unwrap();
    for i in 0..2 {
        assert!((got[i] - direct[i]).abs() <= 1e-10 * direct[i].abs().max(1e-12), "{got:?} vs {direct:?}");
    }
    let expected_ratio = (1.0 - rho.powi(-(k_max as i32 + 1))) / (1.0 - 1.0 / rho);
    assert!((avg.weight_sum() - expected_ratio).abs() <= 1e-10 * expected_ratio);
}

#[test]
fn uniform_averaging_is_arithmetic_mean() {
    let mut avg = AveragingState::new(1.0).unwrap();
    for k in 1..=1000 {
        avg.update(&[k as f64]).unwrap();
    }
    assert!((avg.average().unwrap()[0] - 500.5).abs() < 1e-9);
}
