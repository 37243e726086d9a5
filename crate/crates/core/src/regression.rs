//! Partial least squares regression (PLS2) fitted with NIPALS.
//!
//! Columns of X and Y are centred but not scaled. Each component runs the
//! NIPALS inner loop until the X-weight vector moves by less than
//! [`WEIGHT_TOLERANCE`] (at most [`MAX_INNER_ITERATIONS`] passes), then both
//! blocks are deflated by the new X-score. Each weight vector is sign-fixed so
//! that its largest-magnitude entry is positive.
//!
//! Coefficients are `B = W (PᵀW)⁻¹ Qᵀ`, so a prediction is
//! `ŷ = ȳ + (x − x̄) B`.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

pub const WEIGHT_TOLERANCE: f64 = 1e-10;
pub const MAX_INNER_ITERATIONS: usize = 500;
/// Fitting stops early once the deflated X falls below this fraction of the
/// centred X (Frobenius norm).
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_COMPONENTS: usize = 50;

/// `min(50, n_train − 1, dim)`, floored at 1.
pub fn default_components(n_train: usize, dim: usize) -> usize {
    DEFAULT_MAX_COMPONENTS
        .min(n_train.saturating_sub(1))
        .min(dim)
        .max(1)
}

#[derive(Debug, Clone)]
pub struct PlsrModel {
    requested_components: usize,
    x_mean: Array1<f64>,
    y_mean: Array1<f64>,
    x_weights: Array2<f64>,
    x_loadings: Array2<f64>,
    y_loadings: Array2<f64>,
    x_scores: Array2<f64>,
    coefficients: Array2<f64>,
    x_residual_norms: Vec<f64>,
    inner_iterations: Vec<usize>,
}

impl PlsrModel {
    /// Number of components actually extracted. Can be smaller than requested
    /// when X is exhausted early.
    pub fn n_components(&self) -> usize {
        self.x_weights.ncols()
    }

    pub fn requested_components(&self) -> usize {
        self.requested_components
    }

    pub fn x_mean(&self) -> ArrayView1<'_, f64> {
        self.x_mean.view()
    }

    pub fn y_mean(&self) -> ArrayView1<'_, f64> {
        self.y_mean.view()
    }

    /// W, d × A.
    pub fn x_weights(&self) -> ArrayView2<'_, f64> {
        self.x_weights.view()
    }

    /// P, d × A.
    pub fn x_loadings(&self) -> ArrayView2<'_, f64> {
        self.x_loadings.view()
    }

    /// Q, q × A.
    pub fn y_loadings(&self) -> ArrayView2<'_, f64> {
        self.y_loadings.view()
    }

    /// Training X-scores T, n × A.
    pub fn x_scores(&self) -> ArrayView2<'_, f64> {
        self.x_scores.view()
    }

    /// B, d × q.
    pub fn coefficients(&self) -> ArrayView2<'_, f64> {
        self.coefficients.view()
    }

    /// Frobenius norm of the centred X followed by the norm after each
    /// deflation step.
    pub fn x_residual_norms(&self) -> &[f64] {
        &self.x_residual_norms
    }

    pub fn inner_iterations(&self) -> &[usize] {
        &self.inner_iterations
    }

    pub fn input_dim(&self) -> usize {
        self.x_mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.y_mean.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::InvalidArgument(format!(
                "input has {} components, model expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        let centred = ArrayView1::from(x).to_owned() - &self.x_mean;
        Ok((centred.dot(&self.coefficients) + &self.y_mean).to_vec())
    }

    /// Row-wise prediction.
    pub fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::InvalidArgument(format!(
                "input has {} columns, model expects {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        Ok((&x - &self.x_mean).dot(&self.coefficients) + &self.y_mean)
    }

    /// Debug dump: one `# name rows cols` section per matrix, rows
    /// space-separated. Not a stable format.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# n_components {}", self.n_components())?;
        let x_mean = self.x_mean.view().insert_axis(Axis(0));
        let y_mean = self.y_mean.view().insert_axis(Axis(0));
        for (name, m) in [
            ("x_mean", x_mean),
            ("y_mean", y_mean),
            ("x_weights", self.x_weights.view()),
            ("x_loadings", self.x_loadings.view()),
            ("y_loadings", self.y_loadings.view()),
            ("coefficients", self.coefficients.view()),
        ] {
            writeln!(w, "# {name} {} {}", m.nrows(), m.ncols())?;
            for row in m.rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }
}

fn norm(v: ArrayView1<'_, f64>) -> f64 {
    v.dot(&v).sqrt()
}

fn frobenius(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn largest_column(m: &Array2<f64>) -> Array1<f64> {
    let mut best = 0;
    let mut best_ss = f64::NEG_INFINITY;
    for (j, col) in m.columns().into_iter().enumerate() {
        let ss = col.dot(&col);
        if ss > best_ss {
            best_ss = ss;
            best = j;
        }
    }
    m.column(best).to_owned()
}

/// NIPALS inner loop for one component. With `use_y == false` the loop
/// reduces to power iteration on XᵀX (used once Y is exhausted).
fn component_weight(x: &Array2<f64>, y: &Array2<f64>, use_y: bool) -> Option<(Array1<f64>, usize)> {
    let mut u = if use_y { largest_column(y) } else { largest_column(x) };
    let mut w: Array1<f64> = Array1::zeros(x.ncols());
    let x_scale = frobenius(x);
    for iter in 1..=MAX_INNER_ITERATIONS {
        let mut w_new = x.t().dot(&u);
        let wn = norm(w_new.view());
        if wn <= 1e-14 * x_scale * norm(u.view()) || wn == 0.0 {
            return None;
        }
        w_new /= wn;
        let t = x.dot(&w_new);
        if use_y {
            let tt = t.dot(&t);
            let c = y.t().dot(&t) / tt;
            let cc = c.dot(&c);
            if cc == 0.0 {
                return Some((w_new, iter));
            }
            u = y.dot(&c) / cc;
        } else {
            u = t;
        }
        let delta = norm((&w_new - &w).view());
        w = w_new;
        if delta < WEIGHT_TOLERANCE {
            return Some((w, iter));
        }
    }
    Some((w, MAX_INNER_ITERATIONS))
}

/// Solves `a · z = b` by Gaussian elimination with partial pivoting.
fn solve(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut b = b.clone();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[[i, k]].abs().total_cmp(&a[[j, k]].abs()))
            .expect("non-empty range");
        if a[[pivot, k]].abs() < 1e-300 {
            return Err(Error::DegenerateInput("singular PᵀW".into()));
        }
        if pivot != k {
            for j in 0..n {
                a.swap([k, j], [pivot, j]);
            }
            for j in 0..b.ncols() {
                b.swap([k, j], [pivot, j]);
            }
        }
        for i in k + 1..n {
            let f = a[[i, k]] / a[[k, k]];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[[i, j]] -= f * a[[k, j]];
            }
            for j in 0..b.ncols() {
                b[[i, j]] -= f * b[[k, j]];
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..b.ncols() {
            let mut s = b[[k, j]];
            for i in k + 1..n {
                s -= a[[k, i]] * b[[i, j]];
            }
            b[[k, j]] = s / a[[k, k]];
        }
    }
    Ok(b)
}

/// Fits a PLS2 model with `n_components` latent components.
///
/// Rows of `x` and `y` are paired observations. Requires at least two rows
/// and `1 <= n_components <= min(n − 1, d)`.
pub fn plsr_fit(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, n_components: usize) -> Result<PlsrModel> {
    let (n, d) = x.dim();
    let q = y.ncols();
    if y.nrows() != n {
        return Err(Error::InvalidArgument(format!(
            "X has {n} rows but Y has {}",
            y.nrows()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 rows, got {n}")));
    }
    if d == 0 || q == 0 {
        return Err(Error::InvalidArgument("X and Y need at least one column".into()));
    }
    let max_components = (n - 1).min(d);
    if n_components == 0 || n_components > max_components {
        return Err(Error::InvalidArgument(format!(
            "n_components must be in 1..={max_components}, got {n_components}"
        )));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value in X or Y".into()));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateInput("X is all zero".into()));
    }

    let x_mean = x.mean_axis(Axis(0)).expect("n >= 2");
    let y_mean = y.mean_axis(Axis(0)).expect("n >= 2");
    let mut xr = &x - &x_mean;
    let mut yr = &y - &y_mean;

    let x0 = frobenius(&xr);
    if x0 == 0.0 {
        return Err(Error::DegenerateInput("X has no variance".into()));
    }
    let y0 = frobenius(&yr);

    let mut weights = Vec::new();
    let mut x_loads = Vec::new();
    let mut y_loads = Vec::new();
    let mut scores = Vec::new();
    let mut residuals = vec![x0];
    let mut inner_iterations = Vec::new();

    for _ in 0..n_components {
        if frobenius(&xr) <= RESIDUAL_TOLERANCE * x0 {
            break;
        }
        let use_y = y0 > 0.0 && frobenius(&yr) > RESIDUAL_TOLERANCE * y0;
        let found = if use_y {
            component_weight(&xr, &yr, true).or_else(|| component_weight(&xr, &yr, false))
        } else {
            component_weight(&xr, &yr, false)
        };
        let Some((mut w, iters)) = found else { break };

        let pivot = w
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bv), (i, &v)| {
                if v.abs() > bv.abs() {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .1;
        if pivot < 0.0 {
            w.mapv_inplace(|v| -v);
        }

        let t = xr.dot(&w);
        let tt = t.dot(&t);
        if tt == 0.0 {
            break;
        }
        let p = xr.t().dot(&t) / tt;
        let c = yr.t().dot(&t) / tt;

        let tcol = t.view().insert_axis(Axis(1));
        xr -= &tcol.dot(&p.view().insert_axis(Axis(0)));
        yr -= &tcol.dot(&c.view().insert_axis(Axis(0)));

        residuals.push(frobenius(&xr));
        inner_iterations.push(iters);
        weights.push(w);
        x_loads.push(p);
        y_loads.push(c);
        scores.push(t);
    }

    if weights.is_empty() {
        return Err(Error::DegenerateInput("no component could be extracted".into()));
    }

    let stack = |cols: &[Array1<f64>], rows: usize| {
        let mut m = Array2::zeros((rows, cols.len()));
        for (j, c) in cols.iter().enumerate() {
            m.column_mut(j).assign(c);
        }
        m
    };
    let x_weights = stack(&weights, d);
    let x_loadings = stack(&x_loads, d);
    let y_loadings = stack(&y_loads, q);
    let x_scores = stack(&scores, n);

    let ptw = x_loadings.t().dot(&x_weights);
    let z = solve(&ptw, &y_loadings.t().to_owned())?;
    let coefficients = x_weights.dot(&z);

    Ok(PlsrModel {
        requested_components: n_components,
        x_mean,
        y_mean,
        x_weights,
        x_loadings,
        y_loadings,
        x_scores,
        coefficients,
        x_residual_norms: residuals,
        inner_iterations,
    })
}
