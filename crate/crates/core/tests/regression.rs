mod oracles;

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mtsem_core::regression::plsr_fit;

fn random_problem(rng: &mut ChaCha8Rng, n: usize, d: usize, q: usize) -> (Array2<f64>, Array2<f64>) {
    let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0));
    let b = Array2::from_shape_fn((d, q), |_| rng.random_range(-2.0..2.0));
    let noise = Array2::from_shape_fn((n, q), |_| rng.random_range(-0.2..0.2));
    let y = x.dot(&b) + noise;
    (x, y)
}

fn rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

#[test]
fn full_rank_matches_ols_on_many_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let d = rng.random_range(1..8);
        let n = d + rng.random_range(2..40);
        let q = rng.random_range(1..5);
        let (x, y) = random_problem(&mut rng, n, d, q);
        let m = plsr_fit(x.view(), y.view(), d).unwrap();
        let ols = oracles::ols_fit(&rows(&x), &rows(&y));
        let batch = m.predict_batch(x.view()).unwrap();
        for (i, row) in x.rows().into_iter().enumerate() {
            let want = ols(&row.to_vec());
            for k in 0..q {
                assert!((batch[[i, k]] - want[k]).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn batch_and_single_prediction_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (x, y) = random_problem(&mut rng, 30, 10, 4);
    let m = plsr_fit(x.view(), y.view(), 4).unwrap();
    let batch = m.predict_batch(x.view()).unwrap();
    for (i, row) in x.rows().into_iter().enumerate() {
        let single = m.predict(&row.to_vec()).unwrap();
        for k in 0..4 {
            assert!((single[k] - batch[[i, k]]).abs() < 1e-12);
        }
    }
}

#[test]
fn coefficients_derive_from_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (x, y) = random_problem(&mut rng, 25, 40, 6);
    let m = plsr_fit(x.view(), y.view(), 8).unwrap();
    // B Pᵀ W = W Qᵀ ... check B = W (PᵀW)⁻¹ Qᵀ via  B' (PᵀW) = ... : (PᵀW) is
    // upper triangular with unit diagonal in NIPALS.
    // PᵀW is unit upper triangular in NIPALS
    let ptw = m.x_loadings().t().dot(&m.x_weights());
    for i in 0..ptw.nrows() {
        assert!((ptw[[i, i]] - 1.0).abs() < 1e-10);
        for j in 0..i {
            assert!(ptw[[i, j]].abs() < 1e-10, "PᵀW not upper triangular");
        }
    }
    // B = W (PᵀW)⁻¹ Qᵀ  ⇒  PᵀB = Qᵀ
    let ptb = m.x_loadings().t().dot(&m.coefficients());
    let q = m.y_loadings();
    for i in 0..ptb.nrows() {
        for j in 0..ptb.ncols() {
            assert!((ptb[[i, j]] - q[[j, i]]).abs() < 1e-9);
        }
    }
}

fn problem() -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
    (any::<u64>(), 3usize..30, 1usize..12, 1usize..5).prop_flat_map(|(seed, n, d, q)| {
        let max_a = (n - 1).min(d);
        (Just(seed), Just(n), Just(d), Just(q), 1..=max_a)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scores_orthogonal_and_residual_monotone((seed, n, d, q, a) in problem()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = random_problem(&mut rng, n, d, q);
        let m = plsr_fit(x.view(), y.view(), a).unwrap();
        let t = m.x_scores();
        for i in 0..t.ncols() {
            for j in 0..i {
                let (ti, tj) = (t.column(i), t.column(j));
                let bound = 1e-8 * ti.dot(&ti).sqrt() * tj.dot(&tj).sqrt();
                prop_assert!(ti.dot(&tj).abs() <= bound);
            }
        }
        for w in m.x_residual_norms().windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn prediction_is_affine((seed, n, d, q, a) in problem()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = random_problem(&mut rng, n, d, q);
        let m = plsr_fit(x.view(), y.view(), a).unwrap();
        let xm: Array1<f64> = m.x_mean().to_owned();
        let da = Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0));
        let db = Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0));
        let pab = m.predict((&xm + &da + &db).as_slice().unwrap()).unwrap();
        let pa = m.predict((&xm + &da).as_slice().unwrap()).unwrap();
        let pb = m.predict((&xm + &db).as_slice().unwrap()).unwrap();
        for k in 0..q {
            prop_assert!((pab[k] - (pa[k] + pb[k] - m.y_mean()[k])).abs() < 1e-9);
        }
    }
}
