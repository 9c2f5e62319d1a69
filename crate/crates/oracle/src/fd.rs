//! Second-order finite differences on a line.

use std::f64::consts::PI;

/// Solve `-g'' + shift g = f` on `(0, pi)` with `g(0) = g(pi) = 0` using the
/// standard three-point stencil on `m` interior points. Returns
/// `(nodes, values)` including the two boundary points.
pub fn dirichlet_line(m: usize, shift: f64, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (m + 1) as f64;
    let x: Vec<f64> = (0..m + 2).map(|i| h * i as f64).collect();
    let diag = 2.0 / (h * h) + shift;
    let off = -1.0 / (h * h);
    let mut rhs: Vec<f64> = (1..=m).map(|i| f(x[i])).collect();
    // Thomas algorithm
    let mut c = vec![0.0; m];
    let mut b = diag;
    c[0] = off / b;
    rhs[0] /= b;
    for i in 1..m {
        b = diag - off * c[i - 1];
        c[i] = off / b;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / b;
    }
    for i in (0..m - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    let mut g = vec![0.0];
    g.extend(rhs);
    g.push(0.0);
    (x, g)
}

/// Trapezoidal `int_0^pi g^2`.
pub fn l2_sq_line(x: &[f64], g: &[f64]) -> f64 {
    x.windows(2)
        .zip(g.windows(2))
        .map(|(xs, gs)| 0.5 * (xs[1] - xs[0]) * (gs[0] * gs[0] + gs[1] * gs[1]))
        .sum()
}
