//! Legendre basis on the reference element `[-1, 1]`.
//!
//! The modal basis is `L_0, ..., L_p` with `L_k(1) = 1`. The integer
//! matrices `N` and `M` encode `∫ L_l L_k' ds` and the expansion
//! `L_k' = Σ_l M_{k,l} L_l`.

use crate::scalar::{parity, Real};

/// Polynomial degree of the modal space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisOrder(pub usize);

impl BasisOrder {
    pub fn p(self) -> usize {
        self.0
    }

    /// Number of modes, `p + 1`.
    pub fn n_modes(self) -> usize {
        self.0 + 1
    }

    /// Volume quadrature size used by the scheme: `p+1` points for `p <= 2`,
    /// `p+2` from `p = 3` on.
    pub fn volume_points(self) -> usize {
        if self.0 <= 2 {
            self.0 + 1
        } else {
            self.0 + 2
        }
    }
}

/// `L_k(s)` by the three-term recurrence.
pub fn eval_legendre<T: Real>(k: usize, s: T) -> T {
    let mut prev = T::one();
    if k == 0 {
        return prev;
    }
    let mut cur = s;
    for n in 1..k {
        let nf = T::int(n as i64);
        let next = (T::int(2 * n as i64 + 1) * s * cur - nf * prev) / (nf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_k'(s)` by `L_k' = L_{k-2}' + (2k-1) L_{k-1}`.
pub fn eval_legendre_deriv<T: Real>(k: usize, s: T) -> T {
    if k == 0 {
        return T::zero();
    }
    let (mut d_prev, mut d_cur) = (T::zero(), T::one());
    if k == 1 {
        return d_cur;
    }
    // Keep L_{n-1} alongside the derivative pair.
    let (mut l_prev, mut l_cur) = (T::one(), s);
    for n in 2..=k {
        let d_next = d_prev + T::int(2 * n as i64 - 1) * l_cur;
        let nf = T::int(n as i64 - 1);
        let l_next = (T::int(2 * n as i64 - 1) * s * l_cur - nf * l_prev) / (nf + T::one());
        d_prev = d_cur;
        d_cur = d_next;
        l_prev = l_cur;
        l_cur = l_next;
    }
    d_cur
}

/// Values `L_0(s), ..., L_p(s)`.
pub fn legendre_values<T: Real>(p: usize, s: T) -> Vec<T> {
    (0..=p).map(|k| eval_legendre(k, s)).collect()
}

/// Derivatives `L_0'(s), ..., L_p'(s)`.
pub fn legendre_derivs<T: Real>(p: usize, s: T) -> Vec<T> {
    (0..=p).map(|k| eval_legendre_deriv(k, s)).collect()
}

/// Integer coupling matrices, row index `k`, column index `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMatrices {
    pub n: Vec<Vec<i64>>,
    pub m: Vec<Vec<i64>>,
}

impl CouplingMatrices {
    pub fn size(&self) -> usize {
        self.n.len()
    }

    pub fn n_at<T: Real>(&self, k: usize, l: usize) -> T {
        T::int(self.n[k][l])
    }

    pub fn m_at<T: Real>(&self, k: usize, l: usize) -> T {
        T::int(self.m[k][l])
    }
}

/// `N_{k,l} = 1-(-1)^{k+l}` and `M_{k,l} = (2l+1)(1-(-1)^{k+l})/2` for `k > l`.
pub fn coupling_matrices(p: BasisOrder) -> CouplingMatrices {
    let size = p.n_modes();
    let mut n = vec![vec![0i64; size]; size];
    let mut m = vec![vec![0i64; size]; size];
    for k in 0..size {
        for l in 0..k {
            if (k + l) % 2 == 1 {
                n[k][l] = 2;
                m[k][l] = 2 * l as i64 + 1;
            }
        }
    }
    CouplingMatrices { n, m }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_{-1}^{1} g(s) ds` approximated by the rule.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut g: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * g(s))
            .sum()
    }

    /// Rule mapped onto `[a, b]` (weights scaled by the Jacobian).
    pub fn mapped(&self, a: T, b: T) -> QuadratureRule<T> {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&s| mid + half * s).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
        }
    }
}

/// `n`-point Gauss-Legendre rule. Nodes are Newton-refined roots of `L_n`
/// started from Chebyshev guesses; the arithmetic runs in `f64`.
pub fn gauss_rule<T: Real>(n: usize) -> QuadratureRule<T> {
    assert!(n >= 1, "gauss_rule needs at least one point");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let dx = eval_legendre(n, x) / eval_legendre_deriv(n, x);
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let d = eval_legendre_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes: nodes.into_iter().map(T::lit).collect(),
        weights: weights.into_iter().map(T::lit).collect(),
    }
}

/// Face values of a modal cell state: `(Σ U^l, Σ (-1)^l U^l)`, i.e. the
/// value at the right face `s = 1` and at the left face `s = -1`.
pub fn traces<T: Real>(coeffs: &[T]) -> (T, T) {
    let right_face = coeffs.iter().copied().sum();
    let left_face = coeffs
        .iter()
        .enumerate()
        .map(|(l, &u)| parity::<T>(l) * u)
        .sum();
    (right_face, left_face)
}

/// `u_h(s) = Σ_l U^l L_l(s)`.
pub fn eval_modal<T: Real>(coeffs: &[T], s: T) -> T {
    coeffs
        .iter()
        .enumerate()
        .map(|(l, &u)| u * eval_legendre(l, s))
        .sum()
}
