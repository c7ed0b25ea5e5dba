//! Spectral vanishing viscosity: mode-selective damping of the highest
//! Legendre modes, switched per cell by an inflow-jump smoothness test.

use crate::flux::ConvexFlux;
use crate::legendre::{coupling_matrices, eval_modal, traces, BasisOrder};
use crate::scalar::Real;
use crate::scheme::{BoundaryData, ModalSolution};

/// SVV parameters. `None` fields take the defaults `ε = h/(p+1)` and
/// `m_smooth = p - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvvConfig<T> {
    pub epsilon: Option<T>,
    pub m_smooth: Option<usize>,
    pub m_shock: usize,
    pub detector_threshold: T,
    /// Time-step cap `Δt <= viscous_cfl / ρ`, `ρ` bounding the stiffness
    /// of the viscous term. `None` disables the cap.
    pub viscous_cfl: Option<T>,
}

impl<T: Real> Default for SvvConfig<T> {
    fn default() -> Self {
        SvvConfig {
            epsilon: None,
            m_smooth: None,
            m_shock: 1,
            detector_threshold: T::one(),
            viscous_cfl: Some(T::one()),
        }
    }
}

impl<T: Real> SvvConfig<T> {
    pub fn epsilon_for(&self, h: T, p: BasisOrder) -> T {
        self.epsilon
            .unwrap_or_else(|| h / T::int(p.n_modes() as i64))
    }

    pub fn m_smooth_for(&self, p: BasisOrder) -> usize {
        self.m_smooth.unwrap_or(p.p().saturating_sub(1))
    }

    /// For `p >= 2`: `1 <= m_shock <= m_smooth < p`. For `p = 1` only the
    /// smooth choice `m = 0` produces a term.
    pub fn validate(&self, p: BasisOrder) -> crate::Result<()> {
        let bad = |msg: String| Err(crate::Error::Domain(msg));
        let smooth = self.m_smooth_for(p);
        if p.p() == 0 {
            return bad("SVV needs p >= 1".into());
        }
        let ordered =
            smooth < p.p() && (p.p() == 1 || (1 <= self.m_shock && self.m_shock <= smooth));
        if !ordered {
            return bad(format!(
                "SVV mode thresholds m_shock = {}, m_smooth = {smooth} invalid for p = {}",
                self.m_shock,
                p.p()
            ));
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= T::zero()) {
                return bad(format!("SVV epsilon {eps} must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Modal coefficients of `∂_x u_h`: `D^l = (2/h) Σ_{n>l} M_{n,l} U^n`,
/// `l = 0..p-1`.
pub fn derivative_coeffs<T: Real>(cell: &[T], h: T) -> Vec<T> {
    let p = cell.len().saturating_sub(1);
    let m = coupling_matrices(BasisOrder(p));
    let scale = T::lit(2.0) / h;
    (0..p)
        .map(|l| {
            let s: T = (l + 1..=p).map(|n| m.m_at::<T>(n, l) * cell[n]).sum();
            scale * s
        })
        .collect()
}

/// Mode weight `Q^l = exp(-((l-p)/(m-p))²)` for `l >= m`, else 0.
pub fn mode_weight<T: Real>(l: usize, m: usize, p: usize) -> T {
    if l < m || m >= p {
        return T::zero();
    }
    let r = (T::int(l as i64) - T::int(p as i64)) / (T::int(m as i64) - T::int(p as i64));
    (-(r * r)).exp()
}

/// Contribution `-ε Σ_{l=m}^{p-1} N_{k,l} Q^l D^l` to `R^k` for one cell.
pub fn svv_term<T: Real>(cell: &[T], config: &SvvConfig<T>, m: usize, h: T) -> Vec<T> {
    let p = BasisOrder(cell.len() - 1);
    let eps = config.epsilon_for(h, p);
    let mut out = vec![T::zero(); p.n_modes()];
    if eps == T::zero() || p.p() == 0 {
        return out;
    }
    let d = derivative_coeffs(cell, h);
    let n = coupling_matrices(p);
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (l, &dl) in d.iter().enumerate().skip(m) {
            acc += n.n_at::<T>(k, l) * mode_weight::<T>(l, m, p.p()) * dl;
        }
        *o = -eps * acc;
    }
    out
}

/// Row-sum bound on the rate matrix `U ↦ (2k+1)/h · svv_term(U)` of one
/// cell, maximized over the two choices of `m`.
pub fn stiffness_bound<T: Real>(p: BasisOrder, config: &SvvConfig<T>, h: T) -> T {
    let eps = config.epsilon_for(h, p);
    let n = coupling_matrices(p);
    let mm = coupling_matrices(p);
    let two_over_h = T::lit(2.0) / h;
    let mut bound = T::zero();
    for m in [config.m_shock, config.m_smooth_for(p)] {
        for k in 0..=p.p() {
            let mut row = T::zero();
            for col in 0..=p.p() {
                let mut a = T::zero();
                for l in m..p.p() {
                    a += n.n_at::<T>(k, l) * mode_weight::<T>(l, m, p.p()) * mm.m_at::<T>(col, l);
                }
                row += a.abs();
            }
            bound = bound.max(T::int(2 * k as i64 + 1) / h * eps * two_over_h * row);
        }
    }
    bound
}

/// `max |u_h|` over `2p + 3` equispaced points of the cell, faces included.
fn cell_sup_norm<T: Real>(cell: &[T]) -> T {
    let n = 2 * cell.len() + 1;
    (0..n)
        .map(|i| {
            let s = -T::one() + T::lit(2.0) * T::int(i as i64) / T::int(n as i64 - 1);
            eval_modal(cell, s).abs()
        })
        .fold(T::zero(), T::max)
}

/// Inflow-face jump indicator
/// `|u_h⁺ - u_h⁻| / (h^{(p+1)/2} ‖u_h‖_∞)` at the face selected by the sign
/// of `f'` at the cell mean (left face when `f' >= 0`).
pub fn jump_indicator<T: Real, F: ConvexFlux<T>>(
    sol: &ModalSolution<T>,
    j: usize,
    flux: &F,
    bc: &BoundaryData<T>,
    h: T,
) -> T {
    let cell = sol.cell(j);
    let (own_right, own_left) = traces(cell);
    let jump = if flux.f_prime(cell[0]) >= T::zero() {
        let outer = if j == 0 {
            bc.left_state
        } else {
            sol.cell_traces(j - 1).0
        };
        own_left - outer
    } else {
        let outer = if j + 1 == sol.n_cells {
            bc.right_state
        } else {
            sol.cell_traces(j + 1).1
        };
        own_right - outer
    };
    let scale = h.powf(T::int(sol.p.n_modes() as i64) / T::lit(2.0))
        * cell_sup_norm(cell).max(T::lit(1e-14));
    jump.abs() / scale
}

/// True when the jump indicator of cell `j` exceeds `threshold`.
pub fn detect_irregular<T: Real, F: ConvexFlux<T>>(
    sol: &ModalSolution<T>,
    j: usize,
    flux: &F,
    bc: &BoundaryData<T>,
    h: T,
    threshold: T,
) -> bool {
    jump_indicator(sol, j, flux, bc, h) > threshold
}

/// Cell-wise choice of `m_j`.
pub fn select_m<T: Real, F: ConvexFlux<T>>(
    sol: &ModalSolution<T>,
    j: usize,
    config: &SvvConfig<T>,
    flux: &F,
    bc: &BoundaryData<T>,
    h: T,
) -> usize {
    if detect_irregular(sol, j, flux, bc, h, config.detector_threshold) {
        config.m_shock
    } else {
        config.m_smooth_for(sol.p)
    }
}
