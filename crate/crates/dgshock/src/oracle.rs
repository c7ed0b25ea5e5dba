//! Multistart Newton solver for the steady shock-cell equations.
//!
//! Unknowns are `U^1..U^p` of the shock cell; `U^0` is fixed by the shock
//! position and the face fluxes are frozen to the upwind values `f(u_L)`
//! and `f(u_R)`.

use crate::error::{Error, Result};
use crate::flux::{Burgers, ConvexFlux};
use crate::legendre::BasisOrder;
use crate::legendre::{eval_modal, gauss_rule, legendre_derivs, legendre_values, QuadratureRule};
use crate::profile::{
    branch_of, mean_dof, profile, trace_conditions_for, ShockProfile, TraceCheck,
};
use crate::scalar::{parity, Real};

/// One real root of the shock-cell system.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRoot<T> {
    /// Cell coefficients `U^0..U^p`.
    pub coeffs: Vec<T>,
    /// `max_k |R^k|` at the root.
    pub residual: T,
    pub trace: TraceCheck<T>,
}

impl<T: Real> OracleRoot<T> {
    pub fn passes_trace(&self) -> bool {
        self.trace.ok()
    }
}

/// All real roots found for one `(p, s_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub p: usize,
    pub s_c: T,
    pub u_l: T,
    pub u_r: T,
    pub roots: Vec<OracleRoot<T>>,
}

impl<T: Real> OracleResult<T> {
    /// Roots satisfying the strict trace conditions.
    pub fn trace_admissible(&self) -> Vec<&OracleRoot<T>> {
        self.roots.iter().filter(|r| r.passes_trace()).collect()
    }

    /// The unique trace-admissible root; when several pass, the unique one
    /// among them with `U^1 < 0`.
    pub fn accepted(&self) -> Option<&OracleRoot<T>> {
        let adm = self.trace_admissible();
        if adm.len() == 1 {
            return Some(adm[0]);
        }
        let neg: Vec<_> = adm
            .into_iter()
            .filter(|r| r.coeffs[1] < T::zero())
            .collect();
        if neg.len() == 1 {
            Some(neg[0])
        } else {
            None
        }
    }

    /// Accepted root as a normalized profile (Burgers pairs `(a, -a)`).
    pub fn accepted_profile(&self) -> Option<ShockProfile<T>> {
        let root = self.accepted()?;
        Some(ShockProfile {
            p: BasisOrder(self.p),
            s_c: self.s_c,
            u_coeffs: root.coeffs.iter().map(|&c| c / self.u_l).collect(),
            branch: branch_of(self.p, self.s_c.as_f64()),
            u_l: self.u_l,
            u_r: self.u_r,
        })
    }
}

struct System<'a, T: Real, F: ConvexFlux<T>> {
    flux: &'a F,
    p: usize,
    u0: T,
    f_l: T,
    f_r: T,
    quad: QuadratureRule<T>,
    phi: Vec<Vec<T>>,
    dphi: Vec<Vec<T>>,
}

impl<'a, T: Real, F: ConvexFlux<T>> System<'a, T, F> {
    fn new(flux: &'a F, p: usize, u0: T, u_l: T, u_r: T) -> Self {
        // Exact for Burgers with a margin; independent of the scheme's rule.
        let quad = gauss_rule::<T>(2 * p + 2);
        let phi = quad.nodes.iter().map(|&s| legendre_values(p, s)).collect();
        let dphi = quad.nodes.iter().map(|&s| legendre_derivs(p, s)).collect();
        System {
            flux,
            p,
            u0,
            f_l: flux.f(u_l),
            f_r: flux.f(u_r),
            quad,
            phi,
            dphi,
        }
    }

    fn full(&self, x: &[T]) -> Vec<T> {
        let mut c = Vec::with_capacity(self.p + 1);
        c.push(self.u0);
        c.extend_from_slice(x);
        c
    }

    /// Residuals `R^k`, `k = 1..p`, and the Jacobian `∂R^k/∂U^l`.
    fn eval(&self, x: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
        let p = self.p;
        let c = self.full(x);
        let mut r = vec![T::zero(); p];
        let mut jac = vec![vec![T::zero(); p]; p];
        for (q, (&w, phi)) in self.quad.weights.iter().zip(&self.phi).enumerate() {
            let u: T = c.iter().zip(phi).map(|(&a, &b)| a * b).sum();
            let fu = self.flux.f(u);
            let dfu = self.flux.f_prime(u);
            for k in 1..=p {
                let dk = self.dphi[q][k];
                r[k - 1] += w * fu * dk;
                for l in 1..=p {
                    jac[k - 1][l - 1] += w * dfu * phi[l] * dk;
                }
            }
        }
        for k in 1..=p {
            r[k - 1] += -self.f_r + parity::<T>(k) * self.f_l;
        }
        (r, jac)
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Dense solve with partial pivoting; `None` if singular.
pub(crate) fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, &x| m.max(x.abs()));
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let m = a[i][col] / a[col][col];
            for j in col..n {
                let v = a[col][j];
                a[i][j] -= m * v;
            }
            let v = b[col];
            b[i] -= m * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

const MAX_ITER: usize = 200;
const DEDUP_TOL: f64 = 1e-7;

fn damped_newton<T: Real, F: ConvexFlux<T>>(
    sys: &System<'_, T, F>,
    start: Vec<T>,
    tol: T,
) -> Option<Vec<T>> {
    let mut x = start;
    let (mut r, mut jac) = sys.eval(&x);
    let mut norm = max_abs(&r);
    for _ in 0..MAX_ITER {
        if !norm.is_finite() {
            return None;
        }
        let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        let dx = solve_dense(jac.clone(), rhs)?;
        if norm <= tol {
            // One extra full step to polish the root.
            let polished: Vec<T> = x.iter().zip(&dx).map(|(&a, &d)| a + d).collect();
            let (rp, _) = sys.eval(&polished);
            return Some(if max_abs(&rp) <= norm { polished } else { x });
        }
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<T> = x.iter().zip(&dx).map(|(&a, &d)| a + t * d).collect();
            let (rt, jt) = sys.eval(&trial);
            let nt = max_abs(&rt);
            if nt < norm {
                x = trial;
                r = rt;
                jac = jt;
                norm = nt;
                accepted = true;
                break;
            }
            t /= T::lit(2.0);
        }
        if !accepted {
            return if norm <= tol * T::lit(100.0) {
                Some(x)
            } else {
                None
            };
        }
    }
    None
}

/// Oracle for Burgers with `(u_L, u_R) = (1, -1)`.
pub fn newton_oracle<T: Real>(p: usize, s_c: T) -> Result<OracleResult<T>> {
    newton_oracle_general(&Burgers, p, s_c, T::one(), -T::one())
}

/// Oracle for a general convex flux and shock pair.
pub fn newton_oracle_general<T: Real, F: ConvexFlux<T>>(
    flux: &F,
    p: usize,
    s_c: T,
    u_l: T,
    u_r: T,
) -> Result<OracleResult<T>> {
    if !(1..=3).contains(&p) {
        return Err(Error::Unsupported(format!("oracle for p = {p}")));
    }
    if !(s_c.abs() < T::one()) {
        return Err(Error::Domain(format!("s_c = {s_c} outside (-1, 1)")));
    }
    let u0 = mean_dof(s_c, u_l, u_r);
    let sys = System::new(flux, p, u0, u_l, u_r);
    let amp = (u_l - u_r).abs() / T::lit(2.0);
    let fscale = T::one().max(sys.f_l.abs()).max(sys.f_r.abs());
    let tol = T::epsilon() * T::lit(512.0) * fscale;

    let mut found: Vec<Vec<T>> = Vec::new();
    let n_starts = 5usize.pow(p as u32);
    for idx in 0..n_starts {
        let mut start = Vec::with_capacity(p);
        let mut rem = idx;
        for l in 1..=p {
            let bound = T::int(2 * l as i64 + 1).sqrt() * amp;
            let i = rem % 5;
            rem /= 5;
            start.push(-bound + bound * T::int(i as i64) / T::lit(2.0));
        }
        let Some(x) = damped_newton(&sys, start, tol) else {
            continue;
        };
        let dup = found.iter().any(|y| {
            y.iter()
                .zip(&x)
                .all(|(&a, &b)| (a - b).abs() <= T::lit(DEDUP_TOL) * amp.max(T::one()))
        });
        if !dup {
            found.push(x);
        }
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.partial_cmp(y).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let roots = found
        .into_iter()
        .map(|x| {
            let (r, _) = sys.eval(&x);
            let coeffs = sys.full(&x);
            OracleRoot {
                residual: max_abs(&r),
                trace: trace_conditions_for(&coeffs, u_l, u_r),
                coeffs,
            }
        })
        .collect();
    Ok(OracleResult {
        p,
        s_c,
        u_l,
        u_r,
        roots,
    })
}

/// Largest componentwise gap between the accepted oracle root and the
/// closed form; `None` if the oracle has no unique accepted root.
pub fn oracle_gap(p: usize, s_c: f64) -> Result<Option<f64>> {
    let closed = profile(p, s_c)?;
    let res = newton_oracle(p, s_c)?;
    Ok(res.accepted().map(|r| {
        r.coeffs
            .iter()
            .zip(&closed.u_coeffs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }))
}

/// Sign changes of `u_h` for a root, sampled at `samples` points.
pub fn root_sign_changes<T: Real>(root: &OracleRoot<T>, samples: usize) -> usize {
    let n = samples.max(2);
    let mut last = None;
    let mut count = 0;
    for i in 0..n {
        let s = -T::one() + T::lit(2.0) * T::int(i as i64) / T::int(n as i64 - 1);
        let v = eval_modal(&root.coeffs, s);
        if v == T::zero() {
            continue;
        }
        let pos = v > T::zero();
        if last.is_some_and(|prev| prev != pos) {
            count += 1;
        }
        last = Some(pos);
    }
    count
}
