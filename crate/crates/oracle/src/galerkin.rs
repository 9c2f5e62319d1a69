//! Quadrature-assembled Galerkin matrices and dense operator matrices.

use nalgebra::{DMatrix, DVector};

use crate::basis::{Deriv, Parity, RealBasis};
use crate::quad;

/// Tensor quadrature: periodic rule in `x1`, Gauss–Legendre in `x2`.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn new(q1: usize, q2: usize) -> Self {
        let (x1, w1) = quad::periodic(q1);
        let (x2, w2) = quad::gauss_legendre(q2, 0.0, std::f64::consts::PI);
        let mut points = Vec::with_capacity(q1 * q2);
        let mut weights = Vec::with_capacity(q1 * q2);
        for (a, wa) in x1.iter().zip(&w1) {
            for (b, wb) in x2.iter().zip(&w2) {
                points.push((*a, *b));
                weights.push(wa * wb);
            }
        }
        QuadGrid { points, weights }
    }

    /// A rule comfortably exact for cubic products of fields on `n1 x n2`.
    pub fn for_grid(n1: usize, n2: usize) -> Self {
        QuadGrid::new(3 * n1 + 4, 4 * n2 + 40)
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&(a, b), w)| w * f(a, b))
            .sum()
    }
}

/// `G[i, j] = int (d_a phi_i)(d_b psi_j)`.
pub fn gram(a: &RealBasis, da: Deriv, b: &RealBasis, db: Deriv, q: &QuadGrid) -> DMatrix<f64> {
    let ta = a.tabulate(&q.points, da);
    let tb = b.tabulate(&q.points, db);
    let w = DVector::from_column_slice(&q.weights);
    let mut twb = tb;
    for (mut row, wi) in twb.row_iter_mut().zip(w.iter()) {
        row *= *wi;
    }
    ta.transpose() * twb
}

pub fn mass(b: &RealBasis, q: &QuadGrid) -> DMatrix<f64> {
    gram(b, Deriv::None, b, Deriv::None, q)
}

/// Weak negative Laplacian `int grad phi_i . grad phi_j`.
pub fn stiffness(b: &RealBasis, q: &QuadGrid) -> DMatrix<f64> {
    gram(b, Deriv::D1, b, Deriv::D1, q) + gram(b, Deriv::D2, b, Deriv::D2, q)
}

/// `int phi_i f`.
pub fn load(b: &RealBasis, q: &QuadGrid, f: impl Fn(f64, f64) -> f64) -> DVector<f64> {
    let t = b.tabulate(&q.points, Deriv::None);
    let fv = DVector::from_iterator(
        q.points.len(),
        q.points.iter().zip(&q.weights).map(|(&(x1, x2), w)| w * f(x1, x2)),
    );
    t.transpose() * fv
}

/// L2 projection of a function onto the span of `b`.
pub fn project(b: &RealBasis, q: &QuadGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let m = mass(b, q);
    let rhs = load(b, q, f);
    m.lu().solve(&rhs).expect("mass matrix is nonsingular").as_slice().to_vec()
}

/// Values at the collocation nodes as a function of real-form coefficients.
pub fn eval_matrix(b: &RealBasis) -> DMatrix<f64> {
    b.tabulate(&b.nodes(), Deriv::None)
}

/// Coefficients of the interpolant as a function of nodal values.
pub fn interpolation_matrix(b: &RealBasis) -> DMatrix<f64> {
    eval_matrix(b).try_inverse().expect("collocation matrix is nonsingular")
}

/// Derivative operator obtained by sampling the analytic derivative of every
/// `from` basis function at the nodes and interpolating in the `to` basis.
pub fn derivative_matrix(from: &RealBasis, to: &RealBasis, d: Deriv) -> DMatrix<f64> {
    let sampled = from.tabulate(&from.nodes(), d);
    interpolation_matrix(to) * sampled
}

/// Galerkin inverse of the Neumann Laplacian on the cosine basis; the mean
/// mode is mapped to zero.
pub fn neumann_inverse(b: &RealBasis, q: &QuadGrid) -> DMatrix<f64> {
    assert_eq!(b.parity, Parity::Cos);
    let mut k = stiffness(b, q);
    let mut m = mass(b, q);
    // basis function 0 is the constant; pin its coefficient to zero
    for j in 0..b.len() {
        k[(0, j)] = 0.0;
        k[(j, 0)] = 0.0;
        m[(0, j)] = 0.0;
    }
    k[(0, 0)] = 1.0;
    k.lu().solve(&m).expect("pinned stiffness is nonsingular")
}

/// Galerkin inverse of the Dirichlet Laplacian on the sine basis, raised to
/// `power`.
pub fn dirichlet_inverse(b: &RealBasis, q: &QuadGrid, power: u32) -> DMatrix<f64> {
    assert_eq!(b.parity, Parity::Sin);
    let k = stiffness(b, q);
    let m = mass(b, q);
    let once = k.lu().solve(&m).expect("stiffness is nonsingular");
    let mut out = DMatrix::identity(b.len(), b.len());
    for _ in 0..power {
        out = &once * out;
    }
    out
}

/// L2 projection from one basis onto another.
pub fn projection(from: &RealBasis, to: &RealBasis, q: &QuadGrid) -> DMatrix<f64> {
    let c = gram(to, Deriv::None, from, Deriv::None, q);
    mass(to, q).lu().solve(&c).expect("mass matrix is nonsingular")
}
