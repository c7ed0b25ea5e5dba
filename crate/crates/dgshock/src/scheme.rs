//! Mesh, modal state, DG residuals, explicit time integrators and the
//! steady-state driver.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flux::{AlphaRule, Burgers, ConvexFlux, NumericalFlux, NumericalFluxKind};
use crate::legendre::{
    eval_legendre, eval_modal, gauss_rule, legendre_derivs, legendre_values, traces, BasisOrder,
    QuadratureRule,
};
use crate::scalar::{parity, Real};
use crate::svv::{self, SvvConfig};

/// Uniform 1D mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh1D<T> {
    pub x_min: T,
    pub x_max: T,
    pub n_cells: usize,
    pub h: T,
}

impl<T: Real> Mesh1D<T> {
    pub fn new(x_min: T, x_max: T, n_cells: usize) -> Result<Self> {
        if n_cells == 0 || !(x_max > x_min) {
            return Err(Error::Domain(format!(
                "invalid mesh [{x_min}, {x_max}] with {n_cells} cells"
            )));
        }
        Ok(Mesh1D {
            x_min,
            x_max,
            n_cells,
            h: (x_max - x_min) / T::int(n_cells as i64),
        })
    }

    /// `n_cells` cells on `[0, 1]`.
    pub fn unit(n_cells: usize) -> Result<Self> {
        Self::new(T::zero(), T::one(), n_cells)
    }

    pub fn cell_center(&self, j: usize) -> T {
        self.x_min + (T::int(j as i64) + T::lit(0.5)) * self.h
    }

    pub fn cell_bounds(&self, j: usize) -> (T, T) {
        let left = self.x_min + T::int(j as i64) * self.h;
        (left, left + self.h)
    }

    /// Cell containing `x` and the reference coordinate of `x` in it.
    /// A point on an interior face belongs to the cell on its right.
    pub fn locate(&self, x: T) -> Option<(usize, T)> {
        if x < self.x_min || x > self.x_max {
            return None;
        }
        let r = ((x - self.x_min) / self.h).to_f64()?;
        let j = (r.floor() as usize).min(self.n_cells - 1);
        let s = T::lit(2.0) * (x - self.cell_center(j)) / self.h;
        Some((j, s))
    }
}

/// Piecewise-polynomial state in the modal Legendre basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSolution<T> {
    pub p: BasisOrder,
    pub n_cells: usize,
    /// Cell-major storage, `coeffs[j * (p + 1) + l] = U_j^l`.
    pub coeffs: Vec<T>,
}

impl<T: Real> ModalSolution<T> {
    pub fn zeros(p: BasisOrder, n_cells: usize) -> Self {
        ModalSolution {
            p,
            n_cells,
            coeffs: vec![T::zero(); n_cells * p.n_modes()],
        }
    }

    /// `u_h ≡ c`.
    pub fn uniform(p: BasisOrder, n_cells: usize, c: T) -> Self {
        let mut sol = Self::zeros(p, n_cells);
        for j in 0..n_cells {
            sol.cell_mut(j)[0] = c;
        }
        sol
    }

    pub fn from_cells(p: BasisOrder, cells: &[Vec<T>]) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(cells.len() * p.n_modes());
        for (j, c) in cells.iter().enumerate() {
            if c.len() != p.n_modes() {
                return Err(Error::Domain(format!(
                    "cell {j} has {} coefficients, expected {}",
                    c.len(),
                    p.n_modes()
                )));
            }
            coeffs.extend_from_slice(c);
        }
        Ok(ModalSolution {
            p,
            n_cells: cells.len(),
            coeffs,
        })
    }

    #[inline]
    pub fn cell(&self, j: usize) -> &[T] {
        let m = self.p.n_modes();
        &self.coeffs[j * m..(j + 1) * m]
    }

    #[inline]
    pub fn cell_mut(&mut self, j: usize) -> &mut [T] {
        let m = self.p.n_modes();
        &mut self.coeffs[j * m..(j + 1) * m]
    }

    pub fn mean(&self, j: usize) -> T {
        self.cell(j)[0]
    }

    /// `u_h` in cell `j` at reference coordinate `s`.
    pub fn eval(&self, j: usize, s: T) -> T {
        eval_modal(self.cell(j), s)
    }

    /// `(value at right face, value at left face)` of cell `j`.
    pub fn cell_traces(&self, j: usize) -> (T, T) {
        traces(self.cell(j))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// `points` equispaced samples per cell including both faces:
    /// `(x, u_h(x))` with the cell's own one-sided values at faces.
    pub fn sample(&self, mesh: &Mesh1D<T>, points: usize) -> Vec<(usize, T, T)> {
        let mut out = Vec::with_capacity(self.n_cells * points);
        for j in 0..self.n_cells {
            for i in 0..points {
                let s = if points == 1 {
                    T::zero()
                } else {
                    -T::one() + T::lit(2.0) * T::int(i as i64) / T::int(points as i64 - 1)
                };
                let x = mesh.cell_center(j) + s * mesh.h / T::lit(2.0);
                out.push((j, x, self.eval(j, s)));
            }
        }
        out
    }
}

/// Outer states used as ghost traces at the two boundary faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData<T> {
    pub left_state: T,
    pub right_state: T,
}

impl<T: Real> BoundaryData<T> {
    pub fn new(left_state: T, right_state: T) -> Self {
        BoundaryData {
            left_state,
            right_state,
        }
    }
}

/// Explicit integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RkOrder {
    Euler,
    /// Heun (SSP-RK2).
    Ssp2,
    /// Shu-Osher SSP-RK3.
    Ssp3,
}

impl RkOrder {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            1 => Ok(RkOrder::Euler),
            2 => Ok(RkOrder::Ssp2),
            3 => Ok(RkOrder::Ssp3),
            _ => Err(Error::Domain(format!(
                "RK order must be 1, 2 or 3, got {order}"
            ))),
        }
    }

    pub fn order(self) -> usize {
        match self {
            RkOrder::Euler => 1,
            RkOrder::Ssp2 => 2,
            RkOrder::Ssp3 => 3,
        }
    }
}

impl fmt::Display for RkOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.order())
    }
}

impl FromStr for RkOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Domain(format!("invalid RK order '{s}'")))?;
        Self::from_order(order)
    }
}

/// One step of `du/dt = rate(u)` in place. `scratch` is resized as needed.
pub fn rk_step<T: Real, R: FnMut(&[T], &mut [T])>(
    order: RkOrder,
    u: &mut [T],
    dt: T,
    scratch: &mut Vec<Vec<T>>,
    mut rate: R,
) {
    let n = u.len();
    scratch.resize_with(3, Vec::new);
    for buf in scratch.iter_mut() {
        buf.resize(n, T::zero());
    }
    let (k, rest) = scratch.split_at_mut(1);
    let k = &mut k[0];
    let (stage, base) = rest.split_at_mut(1);
    let (stage, base) = (&mut stage[0], &mut base[0]);

    match order {
        RkOrder::Euler => {
            rate(u, k);
            for i in 0..n {
                u[i] += dt * k[i];
            }
        }
        RkOrder::Ssp2 => {
            base.copy_from_slice(u);
            rate(u, k);
            for i in 0..n {
                stage[i] = u[i] + dt * k[i];
            }
            rate(stage, k);
            let half = T::lit(0.5);
            for i in 0..n {
                u[i] = half * base[i] + half * (stage[i] + dt * k[i]);
            }
        }
        RkOrder::Ssp3 => {
            base.copy_from_slice(u);
            rate(u, k);
            for i in 0..n {
                stage[i] = u[i] + dt * k[i];
            }
            rate(stage, k);
            let (q3, q1) = (T::lit(0.75), T::lit(0.25));
            for i in 0..n {
                stage[i] = q3 * base[i] + q1 * (stage[i] + dt * k[i]);
            }
            rate(stage, k);
            let (t1, t2) = (T::one() / T::lit(3.0), T::lit(2.0) / T::lit(3.0));
            for i in 0..n {
                u[i] = t1 * base[i] + t2 * (stage[i] + dt * k[i]);
            }
        }
    }
}

/// Full residual array and its monitoring norm `max |R_j^k| / h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual<T> {
    pub values: Vec<T>,
    pub norm: T,
}

/// DG space discretization: flux pair, boundary data, mesh and the volume
/// quadrature tables.
#[derive(Debug, Clone)]
pub struct DgScheme<T: Real, F: ConvexFlux<T>> {
    pub flux: F,
    pub numerical_flux: NumericalFlux<T>,
    pub bc: BoundaryData<T>,
    pub mesh: Mesh1D<T>,
    pub p: BasisOrder,
    pub svv: Option<SvvConfig<T>>,
    quad: QuadratureRule<T>,
    /// `L_k(s_q)`, indexed `[q][k]`.
    phi: Vec<Vec<T>>,
    /// `L_k'(s_q)`, indexed `[q][k]`.
    dphi: Vec<Vec<T>>,
}

impl<T: Real, F: ConvexFlux<T>> DgScheme<T, F> {
    pub fn new(
        flux: F,
        numerical_flux: NumericalFlux<T>,
        bc: BoundaryData<T>,
        mesh: Mesh1D<T>,
        p: BasisOrder,
    ) -> Self {
        let quad = gauss_rule::<T>(p.volume_points());
        let phi = quad
            .nodes
            .iter()
            .map(|&s| legendre_values(p.p(), s))
            .collect();
        let dphi = quad
            .nodes
            .iter()
            .map(|&s| legendre_derivs(p.p(), s))
            .collect();
        DgScheme {
            flux,
            numerical_flux,
            bc,
            mesh,
            p,
            svv: None,
            quad,
            phi,
            dphi,
        }
    }

    pub fn with_svv(mut self, svv: Option<SvvConfig<T>>) -> Self {
        self.svv = svv;
        self
    }

    pub fn quadrature(&self) -> &QuadratureRule<T> {
        &self.quad
    }

    /// `(L_k(s_q), L_k'(s_q))` tables, indexed `[q][k]`.
    pub fn basis_tables(&self) -> (&[Vec<T>], &[Vec<T>]) {
        (&self.phi, &self.dphi)
    }

    /// Traces `(u⁻, u⁺)` at face `i` (between cells `i-1` and `i`), with
    /// the boundary states as outer values.
    pub fn face_states(&self, sol: &ModalSolution<T>, i: usize) -> (T, T) {
        let n = sol.n_cells;
        let minus = if i == 0 {
            self.bc.left_state
        } else {
            sol.cell_traces(i - 1).0
        };
        let plus = if i == n {
            self.bc.right_state
        } else {
            sol.cell_traces(i).1
        };
        (minus, plus)
    }

    /// Numerical flux at every face, `n_cells + 1` values.
    pub fn face_fluxes(&self, sol: &ModalSolution<T>) -> Vec<T> {
        (0..=sol.n_cells)
            .map(|i| {
                let (a, b) = self.face_states(sol, i);
                self.numerical_flux.eval(&self.flux, a, b)
            })
            .collect()
    }

    /// `∫ f(u_h) L_k' ds` for every `k`, by the volume rule.
    pub fn volume_term(&self, cell: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for (q, &w) in self.quad.weights.iter().enumerate() {
            let u: T = cell.iter().zip(&self.phi[q]).map(|(&c, &l)| c * l).sum();
            let fw = w * self.flux.f(u);
            for (o, &d) in out.iter_mut().zip(&self.dphi[q]) {
                *o += fw * d;
            }
        }
    }

    fn check_shape(&self, sol: &ModalSolution<T>) {
        assert_eq!(sol.p, self.p, "state degree does not match the scheme");
        assert_eq!(
            sol.n_cells, self.mesh.n_cells,
            "state size does not match the mesh"
        );
    }

    /// `R_j^k` for a single cell, SVV term included when configured.
    pub fn cell_residual(&self, j: usize, sol: &ModalSolution<T>) -> Vec<T> {
        self.check_shape(sol);
        let mut out = vec![T::zero(); self.p.n_modes()];
        self.volume_term(sol.cell(j), &mut out);
        let (a, b) = self.face_states(sol, j);
        let h_left = self.numerical_flux.eval(&self.flux, a, b);
        let (a, b) = self.face_states(sol, j + 1);
        let h_right = self.numerical_flux.eval(&self.flux, a, b);
        for (k, r) in out.iter_mut().enumerate() {
            *r += parity::<T>(k) * h_left - h_right;
        }
        if let Some(cfg) = &self.svv {
            let m = svv::select_m(sol, j, cfg, &self.flux, &self.bc, self.mesh.h);
            let extra = svv::svv_term(sol.cell(j), cfg, m, self.mesh.h);
            for (r, e) in out.iter_mut().zip(extra) {
                *r += e;
            }
        }
        out
    }

    /// All residuals, cell-major like the state.
    pub fn residual_into(&self, sol: &ModalSolution<T>, out: &mut [T]) {
        self.check_shape(sol);
        let m = self.p.n_modes();
        let faces = self.face_fluxes(sol);
        for j in 0..sol.n_cells {
            let r = &mut out[j * m..(j + 1) * m];
            self.volume_term(sol.cell(j), r);
            for (k, rk) in r.iter_mut().enumerate() {
                *rk += parity::<T>(k) * faces[j] - faces[j + 1];
            }
        }
        if let Some(cfg) = &self.svv {
            for j in 0..sol.n_cells {
                let mj = svv::select_m(sol, j, cfg, &self.flux, &self.bc, self.mesh.h);
                let extra = svv::svv_term(sol.cell(j), cfg, mj, self.mesh.h);
                for (r, e) in out[j * m..(j + 1) * m].iter_mut().zip(extra) {
                    *r += e;
                }
            }
        }
    }

    pub fn residual_all(&self, sol: &ModalSolution<T>) -> Residual<T> {
        let mut values = vec![T::zero(); sol.coeffs.len()];
        self.residual_into(sol, &mut values);
        let norm = residual_norm(&values, self.mesh.h);
        Residual { values, norm }
    }

    /// Semi-discrete right-hand side `dU_j^k/dt = (2k+1)/h · R_j^k`.
    pub fn rate_into(&self, sol: &ModalSolution<T>, out: &mut [T]) {
        self.residual_into(sol, out);
        let m = self.p.n_modes();
        let inv_h = T::one() / self.mesh.h;
        for (i, o) in out.iter_mut().enumerate() {
            *o *= T::int(2 * (i % m) as i64 + 1) * inv_h;
        }
    }

    /// `Δt = cfl_scale/(2p+1) · h / max |f'(u_h)|` over all volume
    /// quadrature points, capped by the viscous limit when SVV is active.
    pub fn compute_dt(&self, sol: &ModalSolution<T>, cfl_scale: T) -> T {
        let mut speed = T::zero();
        for j in 0..sol.n_cells {
            let cell = sol.cell(j);
            for phi in &self.phi {
                let u: T = cell.iter().zip(phi).map(|(&c, &l)| c * l).sum();
                speed = speed.max(self.flux.f_prime(u).abs());
            }
        }
        let cfl = cfl_scale / T::int(2 * self.p.p() as i64 + 1);
        let dt = cfl * self.mesh.h / speed.max(T::lit(1e-14));
        match &self.svv {
            Some(cfg) if cfg.viscous_cfl.is_some() && self.p.p() > 0 => {
                let rho = svv::stiffness_bound(self.p, cfg, self.mesh.h);
                let sigma = cfg.viscous_cfl.unwrap_or_else(T::one);
                if rho > T::zero() {
                    dt.min(sigma / rho)
                } else {
                    dt
                }
            }
            _ => dt,
        }
    }

    pub fn step(&self, order: RkOrder, sol: &ModalSolution<T>, dt: T) -> ModalSolution<T> {
        let mut out = sol.clone();
        let mut scratch = Vec::new();
        self.step_in_place(order, &mut out, dt, &mut scratch);
        out
    }

    pub fn step_in_place(
        &self,
        order: RkOrder,
        sol: &mut ModalSolution<T>,
        dt: T,
        scratch: &mut Vec<Vec<T>>,
    ) {
        let (p, n) = (sol.p, sol.n_cells);
        let mut view = ModalSolution::zeros(p, n);
        rk_step(order, &mut sol.coeffs, dt, scratch, |u, out| {
            view.coeffs.copy_from_slice(u);
            self.rate_into(&view, out);
        });
    }

    pub fn euler_step(&self, sol: &ModalSolution<T>, dt: T) -> ModalSolution<T> {
        self.step(RkOrder::Euler, sol, dt)
    }

    pub fn ssp_rk2_step(&self, sol: &ModalSolution<T>, dt: T) -> ModalSolution<T> {
        self.step(RkOrder::Ssp2, sol, dt)
    }

    pub fn ssp_rk3_step(&self, sol: &ModalSolution<T>, dt: T) -> ModalSolution<T> {
        self.step(RkOrder::Ssp3, sol, dt)
    }
}

/// `max |R| / h`.
/// A non-finite entry makes the norm infinite.
pub fn residual_norm<T: Real>(values: &[T], h: T) -> T {
    values.iter().fold(T::zero(), |m, r| {
        if r.is_finite() {
            m.max(r.abs())
        } else {
            T::infinity()
        }
    }) / h
}

/// L2 projection of `u0` onto the modal space. Each cell integral is split
/// at any point of `kinks` falling strictly inside the cell, and every
/// piece uses a `p+2` point Gauss rule.
pub fn project_initial<T: Real, U: Fn(T) -> T>(
    u0: U,
    kinks: &[T],
    mesh: &Mesh1D<T>,
    p: BasisOrder,
) -> ModalSolution<T> {
    let rule = gauss_rule::<T>(p.p() + 2);
    let mut sol = ModalSolution::zeros(p, mesh.n_cells);
    let half_h = mesh.h / T::lit(2.0);
    for j in 0..mesh.n_cells {
        let (xl, xr) = mesh.cell_bounds(j);
        let xc = mesh.cell_center(j);
        let mut cuts: Vec<T> = vec![-T::one()];
        let mut inner: Vec<T> = kinks
            .iter()
            .copied()
            .filter(|&x| x > xl && x < xr)
            .map(|x| (x - xc) / half_h)
            .collect();
        inner.sort_by(|a, b| a.partial_cmp(b).expect("finite kink"));
        cuts.extend(inner);
        cuts.push(T::one());
        let cell = sol.cell_mut(j);
        for w in cuts.windows(2) {
            let piece = rule.mapped(w[0], w[1]);
            for (&s, &wt) in piece.nodes.iter().zip(&piece.weights) {
                let u = u0(xc + s * half_h);
                for (l, c) in cell.iter_mut().enumerate() {
                    *c += wt * u * eval_legendre(l, s);
                }
            }
        }
        for (l, c) in cell.iter_mut().enumerate() {
            *c *= T::int(2 * l as i64 + 1) / T::lit(2.0);
        }
    }
    sol
}

/// Two-piece linear initial data on `[0, 1]` with `u0(0) = 1`,
/// `u0(1) = -1`, kink at `x = 1/2` and mean-driven shock location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersInitial<T> {
    pub ubar: T,
}

impl<T: Real> BurgersInitial<T> {
    pub fn eval(&self, x: T) -> T {
        let (one, two) = (T::one(), T::lit(2.0));
        if x < T::lit(0.5) {
            one - two * (one - self.ubar) * x
        } else {
            two * self.ubar + one - two * (self.ubar + one) * x
        }
    }

    pub fn kink(&self) -> T {
        T::lit(0.5)
    }

    /// Predicted steady shock location `x_c = 1/2 + ū/4`.
    pub fn shock_location(&self) -> T {
        T::lit(0.5) + self.ubar / T::lit(4.0)
    }
}

/// Initial data for mean value `ubar`, with the predicted shock location.
pub fn burgers_initial<T: Real>(ubar: T) -> Result<(BurgersInitial<T>, T)> {
    if !(ubar > -T::lit(2.0) && ubar < T::lit(2.0)) {
        return Err(Error::Domain(format!("ubar = {ubar} outside (-2, 2)")));
    }
    let init = BurgersInitial { ubar };
    Ok((init, init.shock_location()))
}

/// Shock cell and relative position `s_c` predicted for `ubar` on `mesh`.
/// When `x_c` falls on an interior face the cell to its right is returned
/// with `s_c = -1`.
pub fn shock_position<T: Real>(ubar: T, mesh: &Mesh1D<T>) -> Result<(usize, T)> {
    let (_, x_c) = burgers_initial(ubar)?;
    mesh.locate(x_c)
        .ok_or_else(|| Error::Domain(format!("shock location {x_c} outside the mesh")))
}

/// `ubar` that places the shock at relative position `s_c` in cell `j`.
pub fn ubar_for_position<T: Real>(j: usize, s_c: T, mesh: &Mesh1D<T>) -> T {
    let x_c = mesh.cell_center(j) + s_c * mesh.h / T::lit(2.0);
    T::lit(4.0) * (x_c - T::lit(0.5))
}

/// Configuration of the Burgers steady-state experiments on `[0, 1]`
/// with boundary states `u(0) = 1`, `u(1) = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub p: BasisOrder,
    pub n_cells: usize,
    pub flux_kind: NumericalFluxKind,
    pub alpha: AlphaRule<T>,
    pub ubar: T,
    pub rk: RkOrder,
    pub max_steps: usize,
    pub tol: T,
    pub cfl_scale: T,
    pub svv: Option<SvvConfig<T>>,
}

impl<T: Real> RunConfig<T> {
    /// Defaults: RK3, `tol = 1e-12`, 200 000 steps, unit CFL scale, no SVV.
    pub fn new(p: usize, n_cells: usize, flux_kind: NumericalFluxKind, ubar: T) -> Self {
        RunConfig {
            p: BasisOrder(p),
            n_cells,
            flux_kind,
            alpha: AlphaRule::Local,
            ubar,
            rk: RkOrder::Ssp3,
            max_steps: 200_000,
            tol: T::lit(1e-12),
            cfl_scale: T::one(),
            svv: None,
        }
    }

    pub fn mesh(&self) -> Result<Mesh1D<T>> {
        Mesh1D::unit(self.n_cells)
    }

    pub fn scheme(&self) -> Result<DgScheme<T, Burgers>> {
        let mesh = self.mesh()?;
        let nf = NumericalFlux::new(self.flux_kind).with_alpha(self.alpha);
        Ok(DgScheme::new(
            Burgers,
            nf,
            BoundaryData::new(T::one(), -T::one()),
            mesh,
            self.p,
        )
        .with_svv(self.svv))
    }

    pub fn initial_state(&self) -> Result<ModalSolution<T>> {
        let (init, _) = burgers_initial(self.ubar)?;
        let mesh = self.mesh()?;
        Ok(project_initial(
            |x| init.eval(x),
            &[init.kink()],
            &mesh,
            self.p,
        ))
    }
}

/// Outcome of a steady-state march.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport<T> {
    pub steps: usize,
    /// Residual norm of the state entering each step.
    pub residual_history: Vec<T>,
    pub converged: bool,
    /// Residual norm of the returned state.
    pub final_residual: T,
    pub solution: ModalSolution<T>,
}

/// March `initial` with `scheme` until the residual norm drops below `tol`
/// or `max_steps` steps have been taken.
pub fn march_to_steady<T: Real, F: ConvexFlux<T>>(
    scheme: &DgScheme<T, F>,
    initial: ModalSolution<T>,
    rk: RkOrder,
    cfl_scale: T,
    max_steps: usize,
    tol: T,
) -> RunReport<T> {
    let mut sol = initial;
    let mut history = Vec::new();
    let mut scratch = Vec::new();
    let mut res = vec![T::zero(); sol.coeffs.len()];
    let h = scheme.mesh.h;
    loop {
        scheme.residual_into(&sol, &mut res);
        let norm = residual_norm(&res, h);
        if norm < tol {
            return RunReport {
                steps: history.len(),
                residual_history: history,
                converged: true,
                final_residual: norm,
                solution: sol,
            };
        }
        if history.len() >= max_steps || !norm.is_finite() {
            return RunReport {
                steps: history.len(),
                residual_history: history,
                converged: false,
                final_residual: norm,
                solution: sol,
            };
        }
        history.push(norm);
        let dt = scheme.compute_dt(&sol, cfl_scale);
        scheme.step_in_place(rk, &mut sol, dt, &mut scratch);
    }
}

/// Burgers experiment from the projected two-piece initial data.
pub fn run_to_steady<T: Real>(config: &RunConfig<T>) -> Result<RunReport<T>> {
    if config.p.p() == 0 && config.svv.is_some() {
        return Err(Error::Domain("SVV needs p >= 1".into()));
    }
    if !(config.cfl_scale > T::zero()) {
        return Err(Error::Domain("cfl_scale must be positive".into()));
    }
    let scheme = config.scheme()?;
    let initial = config.initial_state()?;
    Ok(march_to_steady(
        &scheme,
        initial,
        config.rk,
        config.cfl_scale,
        config.max_steps,
        config.tol,
    ))
}
