//! Brute-force reference implementations used by the integration and
//! acceptance tests. Deliberately naive and independent of the library code
//! paths they check.
#![allow(dead_code)]

use mtsem_core::corpus::{Dataset, Quantifier};

/// Rank of each element: 1 + (# strictly smaller) + (# equal − 1) / 2.
pub fn explicit_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let less = v.iter().filter(|&&y| y < x).count() as f64;
            let equal = v.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Textbook two-pass Pearson; `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma: f64 = a.iter().sum::<f64>() / n;
    let mb: f64 = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        None
    } else {
        Some(cov / va.sqrt() / vb.sqrt())
    }
}

pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    pearson(&explicit_ranks(a), &explicit_ranks(b))
}

/// Masked Spearman straight from the dataset records.
pub fn masked_spearman(d: &Dataset, concept: &str, pred: &[f64]) -> Option<f64> {
    let mut p = Vec::new();
    let mut g = Vec::new();
    for (fi, f) in d.features().iter().enumerate() {
        if let Some(r) = d.record(concept, f) {
            // exact rational mean, rounded once
            let sum: u64 = r.annotations.iter().map(|q| hundredths(*q)).sum();
            p.push(pred[fi]);
            g.push(sum as f64 / (100 * r.annotations.len() as u64) as f64);
        }
    }
    if p.len() < 2 {
        None
    } else {
        spearman(&p, &g)
    }
}

pub fn scalar(q: Quantifier) -> f64 {
    match q {
        Quantifier::No => 0.0,
        Quantifier::Few => 0.05,
        Quantifier::Some => 0.35,
        Quantifier::Most => 0.95,
        Quantifier::All => 1.0,
    }
}

/// Scalar in hundredths, for exact rational arithmetic.
pub fn hundredths(q: Quantifier) -> u64 {
    match q {
        Quantifier::No => 0,
        Quantifier::Few => 5,
        Quantifier::Some => 35,
        Quantifier::Most => 95,
        Quantifier::All => 100,
    }
}

/// Mode of per-concept means, with means kept as exact fractions
/// `sum_hundredths / count`. Returns `None` for uncovered features.
pub fn mode_of_means(d: &Dataset, train: &[String], feature: &str) -> Option<(u64, u64)> {
    let means: Vec<(u64, u64)> = train
        .iter()
        .filter_map(|c| d.record(c, feature))
        .map(|r| {
            (
                r.annotations.iter().map(|q| hundredths(*q)).sum(),
                r.annotations.len() as u64,
            )
        })
        .collect();
    let same = |a: (u64, u64), b: (u64, u64)| a.0 * b.1 == b.0 * a.1;
    let larger = |a: (u64, u64), b: (u64, u64)| a.0 * b.1 > b.0 * a.1;
    let mut best: Option<((u64, u64), usize)> = None;
    for &m in &means {
        let count = means.iter().filter(|&&o| same(m, o)).count();
        best = match best {
            None => Some((m, count)),
            Some((bm, bc)) if count > bc || (count == bc && larger(m, bm)) => Some((m, count)),
            keep => keep,
        };
    }
    best.map(|(m, _)| m)
}

/// Most frequent single annotation over training concepts, ties to the larger
/// scalar.
pub fn mode_of_annotations(d: &Dataset, train: &[String], feature: &str) -> Option<Quantifier> {
    let pooled: Vec<Quantifier> = train
        .iter()
        .filter_map(|c| d.record(c, feature))
        .flat_map(|r| r.annotations.iter().copied())
        .collect();
    let mut best: Option<(Quantifier, usize)> = None;
    for q in [
        Quantifier::All,
        Quantifier::Most,
        Quantifier::Some,
        Quantifier::Few,
        Quantifier::No,
    ] {
        let count = pooled.iter().filter(|&&p| p == q).count();
        if count > 0 && best.is_none_or(|(_, bc)| count > bc) {
            best = Some((q, count));
        }
    }
    best.map(|(q, _)| q)
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    dot / (nu * nv)
}

/// Index of the first candidate with maximal cosine to `query`.
pub fn cosine_argmax(query: &[f64], candidates: &[&[f64]]) -> usize {
    let mut best = 0;
    for i in 1..candidates.len() {
        if cosine(query, candidates[i]) > cosine(query, candidates[best]) {
            best = i;
        }
    }
    best
}

/// Ordinary least squares with an intercept, via the normal equations and a
/// Cholesky factorisation. `x` is n × d, `y` is n × q, both row-major.
/// Returns a predictor closure over new rows.
pub fn ols_fit(x: &[Vec<f64>], y: &[Vec<f64>]) -> impl Fn(&[f64]) -> Vec<f64> {
    let d = x[0].len() + 1;
    let q = y[0].len();
    let aug: Vec<Vec<f64>> = x
        .iter()
        .map(|row| std::iter::once(1.0).chain(row.iter().copied()).collect())
        .collect();
    // A = XᵀX, R = XᵀY
    let mut a = vec![vec![0.0; d]; d];
    let mut r = vec![vec![0.0; q]; d];
    for (row, yrow) in aug.iter().zip(y) {
        for i in 0..d {
            for j in 0..d {
                a[i][j] += row[i] * row[j];
            }
            for k in 0..q {
                r[i][k] += row[i] * yrow[k];
            }
        }
    }
    // Cholesky: A = L Lᵀ
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][i] = (a[i][i] - s).sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut beta = vec![vec![0.0; q]; d];
    for k in 0..q {
        let mut z = vec![0.0; d];
        for i in 0..d {
            let s: f64 = (0..i).map(|j| l[i][j] * z[j]).sum();
            z[i] = (r[i][k] - s) / l[i][i];
        }
        for i in (0..d).rev() {
            let s: f64 = (i + 1..d).map(|j| l[j][i] * beta[j][k]).sum();
            beta[i][k] = (z[i] - s) / l[i][i];
        }
    }
    move |row: &[f64]| {
        (0..q)
            .map(|k| beta[0][k] + row.iter().zip(&beta[1..]).map(|(x, b)| x * b[k]).sum::<f64>())
            .collect()
    }
}

/// Positions after `k` Gauss-Seidel sweeps for two linked points starting at
/// `u` (visited first) and `v`, with α = β = 1: the closed form of
/// `a ← (b + u)/2; b ← (a + v)/2`.
pub fn two_node_closed_form(u: f64, v: f64, k: u32) -> (f64, f64) {
    let a_star = (2.0 * u + v) / 3.0;
    let b_star = (u + 2.0 * v) / 3.0;
    let decay = 4f64.powi(-(k as i32));
    if k == 0 {
        return (u, v);
    }
    (
        a_star + 2.0 * (v - u) / 3.0 * decay,
        b_star + (v - u) / 3.0 * decay,
    )
}
