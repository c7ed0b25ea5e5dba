//! Stationary shock-cell solutions for Burgers with `p <= 3`.
//!
//! Coefficients are normalized by the shock strength: with
//! `(u_L, u_R) = (a, -a)` the shock-cell state is `U^l = a · u_l`, and
//! `u_0 = s_c` is the relative shock position.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::legendre::{eval_modal, BasisOrder};
use crate::scalar::Real;
use crate::scheme::ModalSolution;

/// Closed-form branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    P0,
    P1,
    P2Left,
    P2Mid,
    P2Right,
    P3D1,
    P3D2,
    P3D3,
    /// `s_c = ±1`: the shock sits on a face and the cell is uniform.
    Interface,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Branch::P0 => "P0",
            Branch::P1 => "P1",
            Branch::P2Left => "P2Left",
            Branch::P2Mid => "P2Mid",
            Branch::P2Right => "P2Right",
            Branch::P3D1 => "P3D1",
            Branch::P3D2 => "P3D2",
            Branch::P3D3 => "P3D3",
            Branch::Interface => "Interface",
        };
        f.write_str(name)
    }
}

/// Shock-cell state of a stationary discrete shock.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockProfile<T> {
    pub p: BasisOrder,
    pub s_c: T,
    /// Normalized coefficients `u_0, ..., u_p`.
    pub u_coeffs: Vec<T>,
    pub branch: Branch,
    pub u_l: T,
    pub u_r: T,
}

impl<T: Real> ShockProfile<T> {
    /// Modal coefficients of the shock cell, `U^l = u_L · u_l`.
    pub fn cell_coeffs(&self) -> Vec<T> {
        self.u_coeffs.iter().map(|&u| self.u_l * u).collect()
    }

    /// Same profile for the shock pair `(a, -a)`.
    pub fn scaled(&self, a: T) -> Self {
        ShockProfile {
            u_l: a,
            u_r: -a,
            ..self.clone()
        }
    }
}

/// Mean of the shock cell, `((1+s)u_L + (1-s)u_R)/2`.
pub fn mean_dof<T: Real>(s_c: T, u_l: T, u_r: T) -> T {
    ((T::one() + s_c) * u_l + (T::one() - s_c) * u_r) / T::lit(2.0)
}

/// Branch boundaries (excluded points) for degree `p`.
pub fn excluded_points(p: usize) -> Vec<f64> {
    let mut pts = vec![-1.0, 1.0];
    match p {
        2 => pts.extend([-2.0 / 3.0, 2.0 / 3.0]),
        3 => {
            let r = (6.0f64 / 17.0).sqrt();
            pts.extend([-1.0 / 6.0, 1.0 / 6.0, -r, r]);
        }
        _ => {}
    }
    pts
}

/// Open intervals of validity of each branch.
pub fn branch_intervals(p: usize) -> Vec<(Branch, f64, f64)> {
    let r = (6.0f64 / 17.0).sqrt();
    match p {
        0 => vec![(Branch::P0, -1.0, 1.0)],
        1 => vec![(Branch::P1, -1.0, 1.0)],
        2 => vec![
            (Branch::P2Left, -1.0, -2.0 / 3.0),
            (Branch::P2Mid, -2.0 / 3.0, 2.0 / 3.0),
            (Branch::P2Right, 2.0 / 3.0, 1.0),
        ],
        3 => vec![
            (Branch::P3D3, -1.0, -r),
            (Branch::P3D2, -r, -1.0 / 6.0),
            (Branch::P3D1, -1.0 / 6.0, 1.0 / 6.0),
            (Branch::P3D3, 1.0 / 6.0, r),
            (Branch::P3D3, r, 1.0),
        ],
        _ => vec![],
    }
}

fn check_domain(p: usize, s: f64) -> Result<()> {
    if p > 3 {
        return Err(Error::Unsupported(format!(
            "closed-form profile for p = {p}"
        )));
    }
    if !(s.abs() <= 1.0 + 1e-9) {
        return Err(Error::Domain(format!("s_c = {s} outside [-1, 1]")));
    }
    if let Some(&b) = excluded_points(p).iter().find(|&&b| (s - b).abs() <= 1e-9) {
        return Err(Error::BranchBoundary {
            p,
            s_c: s,
            boundary: b,
        });
    }
    Ok(())
}

/// Discriminants of the `p = 3` cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P3Discriminants<T> {
    pub delta1: Complex<T>,
    pub delta2: Complex<T>,
    pub delta3: Complex<T>,
    pub delta2_bar: Complex<T>,
    pub delta3_bar: Complex<T>,
    /// Positive root of `Δ1²`, where `Δ1` turns real.
    pub s1: T,
}

/// `Δ1 = (7776s⁶ - 10008s⁴ + 3359s² - 56)^{1/2}` (principal complex root),
/// `Δ2 = 3√3 Δ1 - 419s³ + 279s`, `Δ3 = 7Δ2`, `Δ̄2 = -Δ2`, `Δ̄3 = -7Δ2`.
pub fn p3_discriminants<T: Real>(s: T) -> P3Discriminants<T> {
    let c = |x: f64| T::lit(x);
    let s2 = s * s;
    let d1sq = c(7776.0) * s2 * s2 * s2 - c(10008.0) * s2 * s2 + c(3359.0) * s2 - c(56.0);
    let delta1 = Complex::new(d1sq, T::zero()).sqrt();
    let poly = -c(419.0) * s2 * s + c(279.0) * s;
    let delta2 = delta1 * c(3.0).sqrt() * c(3.0) + poly;
    P3Discriminants {
        delta1,
        delta2,
        delta3: delta2 * c(7.0),
        delta2_bar: -delta2,
        delta3_bar: -delta2 * c(7.0),
        s1: p3_s1(),
    }
}

/// Smallest positive root of `7776s⁶ - 10008s⁴ + 3359s² - 56`, in closed form.
pub fn p3_s1<T: Real>() -> T {
    let a = 1373963.0 - 6687.0 * 15603f64.sqrt();
    let inner = 278.0 - (2f64.cbrt() * 8411.0 + a.cbrt() * a.cbrt()) / (a.cbrt() / 2f64.cbrt());
    T::lit(inner.sqrt() / (18.0 * 2f64.sqrt()))
}

fn realify<T: Real>(z: Complex<T>, what: &'static str) -> Result<T> {
    let tol = T::lit(1e-9) * T::one().max(z.re.abs());
    if z.im.abs() > tol {
        return Err(Error::ImaginaryResidue {
            what,
            residue: z.im.as_f64(),
        });
    }
    Ok(z.re)
}

/// `u_1` and `u_3` from `u_2` by elimination in the `p = 3` system.
fn p3_complete<T: Real>(s: T, u2: T) -> (T, T) {
    let c = |x: f64| T::lit(x);
    let u1sq = c(3.0) * u2 / (c(5.0) * (u2 + c(3.0) * s))
        * (u2 * u2 / c(35.0) + c(3.0) * s * u2 + c(2.0) * (T::one() - s * s));
    let u1 = -u1sq.max(T::zero()).sqrt();
    let u3 = -c(7.0) * u1 * (c(5.0) * s + c(2.0) * u2) / (c(9.0) * u2);
    (u1, u3)
}

fn p3_coeffs<T: Real>(s: T, branch: Branch) -> Result<Vec<T>> {
    let c = |x: f64| T::lit(x);
    if branch == Branch::P3D1 {
        let u1 = -(c(21.0) / c(2.0)).sqrt() / c(5.0) * (c(5.0) - c(54.0) * s * s).sqrt();
        return Ok(vec![s, u1, -c(7.0) * s, -u1]);
    }
    let d = p3_discriminants(s);
    let a = Complex::new(c(17.0) * s * s - c(6.0), T::zero());
    let seven_s = Complex::new(c(7.0) * s, T::zero());
    let u2 = if branch == Branch::P3D3 {
        let r = d.delta3.cbrt();
        (-seven_s - r + a * c(7.0) / r) / c(12.0)
    } else {
        let r = d.delta3_bar.cbrt();
        (-seven_s + r - a * c(7.0) / r) / c(12.0)
    };
    let mut u2 = realify(u2, "p = 3 cubic root")?;
    // Newton polish on 4u³ + 7s u² + (14s² - 7/2)u + 7s(1 - s²).
    for _ in 0..3 {
        let g = ((c(4.0) * u2 + c(7.0) * s) * u2 + c(14.0) * s * s - c(3.5)) * u2
            + c(7.0) * s * (T::one() - s * s);
        let dg = (c(12.0) * u2 + c(14.0) * s) * u2 + c(14.0) * s * s - c(3.5);
        if dg != T::zero() {
            u2 -= g / dg;
        }
    }
    let (u1, u3) = p3_complete(s, u2);
    Ok(vec![s, u1, u2, u3])
}

/// Branch containing `s_c` for degree `p` (no boundary check).
pub fn branch_of(p: usize, s: f64) -> Branch {
    match p {
        0 => Branch::P0,
        1 => Branch::P1,
        2 if s < -2.0 / 3.0 => Branch::P2Left,
        2 if s > 2.0 / 3.0 => Branch::P2Right,
        2 => Branch::P2Mid,
        _ => {
            if s.abs() < 1.0 / 6.0 {
                Branch::P3D1
            } else if s < -1.0 / 6.0 && s > -(6.0f64 / 17.0).sqrt() {
                Branch::P3D2
            } else {
                Branch::P3D3
            }
        }
    }
}

/// Closed-form shock-cell profile for Burgers with `(u_L, u_R) = (1, -1)`.
pub fn profile<T: Real>(p: usize, s_c: T) -> Result<ShockProfile<T>> {
    let sf = s_c.as_f64();
    check_domain(p, sf)?;
    let c = |x: f64| T::lit(x);
    let one = T::one();
    let branch = branch_of(p, sf);
    let u = match branch {
        Branch::P0 => vec![s_c],
        Branch::P1 => vec![s_c, -(c(3.0) * (one - s_c * s_c)).sqrt()],
        Branch::P2Left => vec![s_c, T::zero(), (c(5.0) * (one - s_c * s_c)).sqrt()],
        Branch::P2Mid => vec![
            s_c,
            -(c(3.0) * (one - c(2.25) * s_c * s_c)).sqrt(),
            -c(2.5) * s_c,
        ],
        Branch::P2Right => vec![s_c, T::zero(), -(c(5.0) * (one - s_c * s_c)).sqrt()],
        _ => p3_coeffs(s_c, branch)?,
    };
    Ok(ShockProfile {
        p: BasisOrder(p),
        s_c,
        u_coeffs: u,
        branch,
        u_l: one,
        u_r: -one,
    })
}

/// Limit profile with the shock on the right (`side > 0`, `s_c = 1`) or
/// left (`s_c = -1`) face: the cell is uniform, `u = (±1, 0, ..., 0)`.
pub fn interface_limit<T: Real>(p: usize, side: i32) -> ShockProfile<T> {
    let s = if side >= 0 { T::one() } else { -T::one() };
    let mut u = vec![T::zero(); p + 1];
    u[0] = s;
    ShockProfile {
        p: BasisOrder(p),
        s_c: s,
        u_coeffs: u,
        branch: Branch::Interface,
        u_l: T::one(),
        u_r: -T::one(),
    }
}

/// Strict trace conditions `Σ(-1)^l u_l > -1` (left face) and
/// `Σ u_l < 1` (right face), with their margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCheck<T> {
    pub left_ok: bool,
    pub right_ok: bool,
    /// `Σ(-1)^l u_l + 1`.
    pub left_margin: T,
    /// `1 - Σ u_l`.
    pub right_margin: T,
}

impl<T: Real> TraceCheck<T> {
    pub fn ok(&self) -> bool {
        self.left_ok && self.right_ok
    }
}

/// Trace conditions for normalized coefficients `u_0..u_p`.
pub fn trace_conditions<T: Real>(u: &[T]) -> TraceCheck<T> {
    trace_conditions_for(u, T::one(), -T::one())
}

/// Trace conditions `u(-1) > u_R`, `u(1) < u_L` for unnormalized cell
/// coefficients.
pub fn trace_conditions_for<T: Real>(coeffs: &[T], u_l: T, u_r: T) -> TraceCheck<T> {
    let (right, left) = crate::legendre::traces(coeffs);
    let left_margin = left - u_r;
    let right_margin = u_l - right;
    TraceCheck {
        left_ok: left_margin > T::zero(),
        right_ok: right_margin > T::zero(),
        left_margin,
        right_margin,
    }
}

pub fn check_trace_conditions<T: Real>(prof: &ShockProfile<T>) -> TraceCheck<T> {
    trace_conditions(&prof.u_coeffs)
}

/// Sign changes of `u_h` over `samples` equispaced points of `[-1, 1]`;
/// exact zeros are skipped.
pub fn sign_changes<T: Real>(coeffs: &[T], samples: usize) -> usize {
    let n = samples.max(2);
    let mut last: Option<bool> = None;
    let mut count = 0;
    for i in 0..n {
        let s = -T::one() + T::lit(2.0) * T::int(i as i64) / T::int(n as i64 - 1);
        let v = eval_modal(coeffs, s);
        if v == T::zero() {
            continue;
        }
        let pos = v > T::zero();
        if let Some(prev) = last {
            if prev != pos {
                count += 1;
            }
        }
        last = Some(pos);
    }
    count
}

/// Number of sign changes of `f'(u_h) = u_h` across the shock cell.
pub fn entropy_sign_changes<T: Real>(prof: &ShockProfile<T>, samples: usize) -> usize {
    sign_changes(&prof.cell_coeffs(), samples.max(32))
}

/// Composite steady state: `u_L` left of `shock_cell`, the profile in it,
/// `u_R` to its right.
pub fn composite_solution<T: Real>(
    prof: &ShockProfile<T>,
    n_cells: usize,
    shock_cell: usize,
) -> ModalSolution<T> {
    let mut sol = ModalSolution::zeros(prof.p, n_cells);
    for j in 0..n_cells {
        let cell = sol.cell_mut(j);
        if j < shock_cell {
            cell[0] = prof.u_l;
        } else if j > shock_cell {
            cell[0] = prof.u_r;
        } else {
            cell.copy_from_slice(&prof.cell_coeffs());
        }
    }
    sol
}
