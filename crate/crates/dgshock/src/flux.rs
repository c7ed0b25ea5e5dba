//! Convex physical fluxes and the Godunov, local Lax-Friedrichs and
//! Engquist-Osher numerical fluxes with their partial derivatives.

use std::fmt::{self, Debug};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Strictly convex, coercive physical flux.
pub trait ConvexFlux<T: Real>: Debug + Send + Sync {
    fn f(&self, u: T) -> T;
    fn f_prime(&self, u: T) -> T;
    /// Second derivative; needed by the exact LLF partials.
    fn f_second(&self, u: T) -> T;
    /// Sonic state `û` with `f'(û) = 0`.
    fn sonic(&self) -> T;
    fn admissible_interval(&self) -> (T, T) {
        (T::neg_infinity(), T::infinity())
    }
}

impl<T: Real, F: ConvexFlux<T> + ?Sized> ConvexFlux<T> for &F {
    fn f(&self, u: T) -> T {
        (**self).f(u)
    }
    fn f_prime(&self, u: T) -> T {
        (**self).f_prime(u)
    }
    fn f_second(&self, u: T) -> T {
        (**self).f_second(u)
    }
    fn sonic(&self) -> T {
        (**self).sonic()
    }
    fn admissible_interval(&self) -> (T, T) {
        (**self).admissible_interval()
    }
}

/// Inviscid Burgers flux `f(u) = u²/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Burgers;

pub fn burgers() -> Burgers {
    Burgers
}

impl<T: Real> ConvexFlux<T> for Burgers {
    #[inline]
    fn f(&self, u: T) -> T {
        u * u / T::lit(2.0)
    }
    #[inline]
    fn f_prime(&self, u: T) -> T {
        u
    }
    #[inline]
    fn f_second(&self, _u: T) -> T {
        T::one()
    }
    fn sonic(&self) -> T {
        T::zero()
    }
}

/// Spot-checks the flux contract: `f'` strictly increasing on a sample of
/// the admissible interval (clipped to `[-window, window]`) and `f'(û) = 0`.
pub fn check_convex_flux<T: Real, F: ConvexFlux<T>>(flux: &F, window: T, samples: usize) -> bool {
    let (lo, hi) = flux.admissible_interval();
    let lo = lo.max(-window);
    let hi = hi.min(window);
    if !(lo < hi) || samples < 2 {
        return false;
    }
    let step = (hi - lo) / T::int(samples as i64 - 1);
    let mut prev = flux.f_prime(lo);
    for i in 1..samples {
        let d = flux.f_prime(lo + step * T::int(i as i64));
        if !(d > prev) {
            return false;
        }
        prev = d;
    }
    flux.f_prime(flux.sonic()).abs() <= T::lit(1e-12)
}

/// Stationary admissible shock: Rankine-Hugoniot plus Lax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockPair<T> {
    pub u_l: T,
    pub u_r: T,
    pub f_inf: T,
}

impl<T: Real> ShockPair<T> {
    pub fn new<F: ConvexFlux<T>>(flux: &F, u_l: T, u_r: T) -> Result<Self> {
        let (fl, fr) = (flux.f(u_l), flux.f(u_r));
        let scale = T::one().max(fl.abs());
        if (fl - fr).abs() > T::lit(1e-12) * scale {
            return Err(Error::Domain(format!(
                "Rankine-Hugoniot violated: f({u_l}) = {fl}, f({u_r}) = {fr}"
            )));
        }
        if !(flux.f_prime(u_l) > T::zero() && T::zero() > flux.f_prime(u_r)) {
            return Err(Error::Domain(format!(
                "Lax condition violated for ({u_l}, {u_r})"
            )));
        }
        Ok(ShockPair {
            u_l,
            u_r,
            f_inf: fl,
        })
    }

    /// `(1, -1)` for Burgers.
    pub fn burgers_unit() -> Self {
        ShockPair {
            u_l: T::one(),
            u_r: -T::one(),
            f_inf: T::lit(0.5),
        }
    }

    /// `(a, -a)` for Burgers.
    pub fn burgers_symmetric(a: T) -> Result<Self> {
        ShockPair::new(&Burgers, a, -a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NumericalFluxKind {
    Godunov,
    LocalLaxFriedrichs,
    EngquistOsher,
}

impl NumericalFluxKind {
    pub const ALL: [NumericalFluxKind; 3] = [
        NumericalFluxKind::Godunov,
        NumericalFluxKind::LocalLaxFriedrichs,
        NumericalFluxKind::EngquistOsher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NumericalFluxKind::Godunov => "godunov",
            NumericalFluxKind::LocalLaxFriedrichs => "llf",
            NumericalFluxKind::EngquistOsher => "osher",
        }
    }
}

impl fmt::Display for NumericalFluxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NumericalFluxKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "godunov" => Ok(NumericalFluxKind::Godunov),
            "llf" | "lax-friedrichs" | "rusanov" => Ok(NumericalFluxKind::LocalLaxFriedrichs),
            "osher" | "engquist-osher" | "eo" => Ok(NumericalFluxKind::EngquistOsher),
            other => Err(Error::Domain(format!("unknown numerical flux '{other}'"))),
        }
    }
}

/// Dissipation coefficient of the LLF flux.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AlphaRule<T> {
    /// `α = max(|f'(u⁻)|, |f'(u⁺)|)` per interface.
    #[default]
    Local,
    /// Constant `α`.
    Fixed(T),
}

/// Which one-sided derivative to report at a Godunov kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KinkBranch {
    /// `(f'(u⁻), 0)`: the flux is upwinded from the left.
    #[default]
    LeftUpwind,
    /// `(0, f'(u⁺))`.
    RightUpwind,
}

/// One-sided partial derivatives of `ĥ(u⁻, u⁺)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPartials<T> {
    pub d_minus: T,
    pub d_plus: T,
    /// Set when `(u⁻, u⁺)` lies on a non-differentiable locus.
    pub kink: bool,
}

/// Numerical flux configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalFlux<T> {
    pub kind: NumericalFluxKind,
    pub alpha: AlphaRule<T>,
    pub kink_branch: KinkBranch,
}

impl<T: Real> NumericalFlux<T> {
    pub fn new(kind: NumericalFluxKind) -> Self {
        NumericalFlux {
            kind,
            alpha: AlphaRule::Local,
            kink_branch: KinkBranch::LeftUpwind,
        }
    }

    pub fn with_alpha(mut self, alpha: AlphaRule<T>) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_kink_branch(mut self, branch: KinkBranch) -> Self {
        self.kink_branch = branch;
        self
    }

    #[inline]
    pub fn eval<F: ConvexFlux<T>>(&self, flux: &F, a: T, b: T) -> T {
        match self.kind {
            NumericalFluxKind::Godunov => godunov(a, b, flux),
            NumericalFluxKind::LocalLaxFriedrichs => match self.alpha {
                AlphaRule::Local => llf(a, b, flux),
                AlphaRule::Fixed(alpha) => llf_with_alpha(a, b, alpha, flux),
            },
            NumericalFluxKind::EngquistOsher => engquist_osher(a, b, flux),
        }
    }

    pub fn partials<F: ConvexFlux<T>>(&self, flux: &F, a: T, b: T) -> FluxPartials<T> {
        match self.kind {
            NumericalFluxKind::Godunov => godunov_partials(a, b, flux, self.kink_branch),
            NumericalFluxKind::LocalLaxFriedrichs => match self.alpha {
                AlphaRule::Local => llf_partials(a, b, flux),
                AlphaRule::Fixed(alpha) => {
                    let two = T::lit(2.0);
                    FluxPartials {
                        d_minus: (flux.f_prime(a) + alpha) / two,
                        d_plus: (flux.f_prime(b) - alpha) / two,
                        kink: false,
                    }
                }
            },
            NumericalFluxKind::EngquistOsher => FluxPartials {
                d_minus: flux.f_prime(a).max(T::zero()),
                d_plus: flux.f_prime(b).min(T::zero()),
                kink: false,
            },
        }
    }
}

/// Godunov flux for a convex flux: `min f` on `[a, b]` if `a <= b`, else
/// `max(f(a), f(b))`.
pub fn godunov<T: Real, F: ConvexFlux<T>>(a: T, b: T, flux: &F) -> T {
    if a <= b {
        flux.f(flux.sonic().max(a).min(b))
    } else {
        flux.f(a).max(flux.f(b))
    }
}

/// LLF flux with `α = max(|f'(a)|, |f'(b)|)`.
pub fn llf<T: Real, F: ConvexFlux<T>>(a: T, b: T, flux: &F) -> T {
    let alpha = flux.f_prime(a).abs().max(flux.f_prime(b).abs());
    llf_with_alpha(a, b, alpha, flux)
}

/// LLF flux with a prescribed `α`.
pub fn llf_with_alpha<T: Real, F: ConvexFlux<T>>(a: T, b: T, alpha: T, flux: &F) -> T {
    let two = T::lit(2.0);
    (flux.f(a) + flux.f(b)) / two + alpha / two * (a - b)
}

/// Engquist-Osher flux in split form `f(max(a, û)) + f(min(b, û)) - f(û)`.
pub fn engquist_osher<T: Real, F: ConvexFlux<T>>(a: T, b: T, flux: &F) -> T {
    let s = flux.sonic();
    flux.f(a.max(s)) + flux.f(b.min(s)) - flux.f(s)
}

/// Partial derivatives for `kind` with the default conventions
/// (local LLF `α`, left-upwind branch at Godunov kinks).
pub fn flux_partials<T: Real, F: ConvexFlux<T>>(
    kind: NumericalFluxKind,
    a: T,
    b: T,
    flux: &F,
) -> FluxPartials<T> {
    NumericalFlux::new(kind).partials(flux, a, b)
}

fn godunov_partials<T: Real, F: ConvexFlux<T>>(
    a: T,
    b: T,
    flux: &F,
    branch: KinkBranch,
) -> FluxPartials<T> {
    let zero = T::zero();
    let s = flux.sonic();
    let (d_minus, d_plus, kink) = if a <= b {
        if s < a {
            (flux.f_prime(a), zero, false)
        } else if s > b {
            (zero, flux.f_prime(b), false)
        } else {
            (zero, zero, false)
        }
    } else {
        let (fa, fb) = (flux.f(a), flux.f(b));
        if fa > fb {
            (flux.f_prime(a), zero, false)
        } else if fa < fb {
            (zero, flux.f_prime(b), false)
        } else {
            match branch {
                KinkBranch::LeftUpwind => (flux.f_prime(a), zero, true),
                KinkBranch::RightUpwind => (zero, flux.f_prime(b), true),
            }
        }
    };
    FluxPartials {
        d_minus,
        d_plus,
        kink,
    }
}

/// Exact partials of the local-`α` LLF flux, including the variation of
/// `α` with the state that owns the maximum.
fn llf_partials<T: Real, F: ConvexFlux<T>>(a: T, b: T, flux: &F) -> FluxPartials<T> {
    let two = T::lit(2.0);
    let (da, db) = (flux.f_prime(a), flux.f_prime(b));
    let alpha = da.abs().max(db.abs());
    let jump = (a - b) / two;
    let sgn = |x: T| if x < T::zero() { -T::one() } else { T::one() };
    let (mut d_minus, mut d_plus) = ((da + alpha) / two, (db - alpha) / two);
    let kink = a != b && da.abs() == db.abs();
    if da.abs() >= db.abs() {
        d_minus += jump * sgn(da) * flux.f_second(a);
    } else {
        d_plus += jump * sgn(db) * flux.f_second(b);
    }
    FluxPartials {
        d_minus,
        d_plus,
        kink,
    }
}
