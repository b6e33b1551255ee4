//! The Hamiltonian profile `K(q)` across the Dehn-twist annulus and the
//! action functions of torus orbits.
//!
//! On the twist region `U = [q₋, q₊]` the profile is `K = -q(f + r̃) + c₀`,
//! which leaves no closed orbits there since `r̃` is irrational. On the two
//! adjacent collars `K_q` is continued linearly up to zero, so `K_qq > 0`
//! and every slope `K_q = -n/m` with `0 < n < σm` has exactly one root: on
//! the right collar when `n/m < σ + r̃`, otherwise on the left collar, where
//! the orbit class reads `n - σm` in the local chart.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::LocalModelParams;

pub trait KProfile<T: Real> {
    fn k(&self, q: T) -> T;
    fn k_q(&self, q: T) -> T;
    fn k_qq(&self, q: T) -> T;
    fn domain(&self) -> (T, T);
}

/// Monotone twist profile `f: [q₋, q₊] → [0, σ]` with `f' ≥ 0` and `f' = 0`
/// at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FProfile {
    /// `σ(3s² - 2s³)` in the normalized coordinate `s ∈ [0, 1]`.
    #[default]
    Smoothstep,
}

impl FProfile {
    /// `(f, df/ds, d²f/ds²)` at `s`.
    pub fn eval<T: Real>(self, s: T, sigma: T) -> (T, T, T) {
        match self {
            FProfile::Smoothstep => {
                let (two, three, six) = (T::lit(2.0), T::lit(3.0), T::lit(6.0));
                let f = sigma * (three * s * s - two * s * s * s);
                let df = sigma * six * s * (T::one() - s);
                let ddf = sigma * (six - T::lit(12.0) * s);
                (f, df, ddf)
            }
        }
    }
}

/// Where the twist region and its collars sit in the `q` coordinate:
/// `outer_minus < minus < plus < outer_plus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistGeometry<T> {
    pub outer_minus: T,
    pub minus: T,
    pub plus: T,
    pub outer_plus: T,
}

/// The piecewise profile over `[q'₋, q'₊]`.
#[derive(Clone, Debug)]
pub struct TwistProfile<T> {
    sigma: T,
    sigma_int: u64,
    r_tilde: T,
    c0: T,
    f: FProfile,
    g: TwistGeometry<T>,
    k_minus: T,
    k_plus: T,
}

/// Location and action of the torus carrying the orbits `e_{n/m}`, `h_{n/m}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitTorus<T> {
    /// Class along the twisted circle in the chart containing the torus.
    pub n_chart: i64,
    pub q_o: T,
    pub region: (T, T),
    pub action: T,
}

impl<T: Real> TwistProfile<T> {
    pub fn new(params: &LocalModelParams<T>) -> Result<Self> {
        params.validate()?;
        let sigma = T::from_u64(params.sigma).expect("σ fits the float type");
        let g = params.twist;
        let mut p = Self {
            sigma,
            sigma_int: params.sigma,
            r_tilde: params.r_tilde,
            c0: params.c0,
            f: params.f_profile,
            g,
            k_minus: T::zero(),
            k_plus: T::zero(),
        };
        p.k_minus = p.k_twist(g.minus);
        p.k_plus = p.k_twist(g.plus);
        Ok(p)
    }

    pub fn geometry(&self) -> TwistGeometry<T> {
        self.g
    }

    fn s_twist(&self, q: T) -> (T, T) {
        let len = self.g.plus - self.g.minus;
        ((q - self.g.minus) / len, len)
    }

    fn k_twist(&self, q: T) -> T {
        let (s, _) = self.s_twist(q);
        let (f, _, _) = self.f.eval(s, self.sigma);
        -q * (f + self.r_tilde) + self.c0
    }

    /// Left collar `[q'₋, q₋]` (slopes in `(0, -r̃)`) and right collar
    /// `[q₊, q'₊]` (slopes in `(-σ - r̃, 0)`).
    pub fn collars(&self) -> ((T, T), (T, T)) {
        ((self.g.outer_minus, self.g.minus), (self.g.plus, self.g.outer_plus))
    }

    /// Finds the torus of the `(n, m)` orbit pair.
    pub fn orbit_torus(&self, n: u64, m: u64) -> Result<OrbitTorus<T>> {
        if m == 0 {
            return Err(Error::ZeroWinding);
        }
        let bound = self.sigma_int * m;
        if n == 0 || n >= bound {
            return Err(Error::NumeratorOutOfRange { n, m, bound });
        }
        let mf = T::from_u64(m).expect("winding fits");
        let ratio = T::from_u64(n).expect("numerator fits") / mf;
        let (left, right) = self.collars();
        let (n_chart, region) = if ratio < self.sigma + self.r_tilde {
            (n as i64, right)
        } else {
            (n as i64 - bound as i64, left)
        };
        let nf = T::from_i64(n_chart).expect("numerator fits");
        let q_o = solve_slope(self, -nf / mf, region)?;
        Ok(OrbitTorus {
            n_chart,
            q_o,
            region,
            action: nf * q_o + mf * self.k(q_o),
        })
    }
}

impl<T: Real> KProfile<T> for TwistProfile<T> {
    fn k(&self, q: T) -> T {
        let g = &self.g;
        let half = T::lit(0.5);
        if q < g.minus {
            let w = g.minus - g.outer_minus;
            let s = (q - g.outer_minus) / w;
            self.k_minus + self.r_tilde * w * (T::one() - s * s) * half
        } else if q <= g.plus {
            self.k_twist(q)
        } else {
            let w = g.outer_plus - g.plus;
            let s = (q - g.plus) / w;
            self.k_plus - (self.sigma + self.r_tilde) * w * (s - s * s * half)
        }
    }

    fn k_q(&self, q: T) -> T {
        let g = &self.g;
        if q < g.minus {
            let s = (q - g.outer_minus) / (g.minus - g.outer_minus);
            -self.r_tilde * s
        } else if q <= g.plus {
            let (s, len) = self.s_twist(q);
            let (f, df, _) = self.f.eval(s, self.sigma);
            -f - q * df / len - self.r_tilde
        } else {
            let s = (q - g.plus) / (g.outer_plus - g.plus);
            -(self.sigma + self.r_tilde) * (T::one() - s)
        }
    }

    fn k_qq(&self, q: T) -> T {
        let g = &self.g;
        if q < g.minus {
            -self.r_tilde / (g.minus - g.outer_minus)
        } else if q <= g.plus {
            let (s, len) = self.s_twist(q);
            let (_, df, ddf) = self.f.eval(s, self.sigma);
            -T::lit(2.0) * df / len - q * ddf / (len * len)
        } else {
            (self.sigma + self.r_tilde) / (g.outer_plus - g.plus)
        }
    }

    fn domain(&self) -> (T, T) {
        (self.g.outer_minus, self.g.outer_plus)
    }
}

/// `K(q) = c₀ - q²/2`, a convex-action test profile with `K_q = -q`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticProfile<T> {
    pub c0: T,
    pub domain: (T, T),
}

impl<T: Real> KProfile<T> for QuadraticProfile<T> {
    fn k(&self, q: T) -> T {
        self.c0 - q * q * T::lit(0.5)
    }

    fn k_q(&self, q: T) -> T {
        -q
    }

    fn k_qq(&self, _q: T) -> T {
        -T::one()
    }

    fn domain(&self) -> (T, T) {
        self.domain
    }
}

/// Bisection for `K_q(q) = slope` on `[lo, hi]`; needs a sign change.
pub fn solve_slope<T: Real, P: KProfile<T> + ?Sized>(profile: &P, slope: T, (lo, hi): (T, T)) -> Result<T> {
    let g = |q: T| profile.k_q(q) - slope;
    let no_root = || Error::NoSlopeRoot {
        slope: slope.to_f64().unwrap_or(f64::NAN),
        lo: lo.to_f64().unwrap_or(f64::NAN),
        hi: hi.to_f64().unwrap_or(f64::NAN),
    };
    let (mut a, mut b) = (lo, hi);
    let (mut ga, gb) = (g(a), g(b));
    if ga.is_zero() {
        return Ok(a);
    }
    if gb.is_zero() {
        return Ok(b);
    }
    if (ga > T::zero()) == (gb > T::zero()) {
        return Err(no_root());
    }
    for _ in 0..256 {
        let mid = a + (b - a) * T::lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm.is_zero() {
            return Ok(mid);
        }
        if (gm > T::zero()) == (ga > T::zero()) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(a + (b - a) * T::lit(0.5))
}

/// Sampled action `A(q) = nq + mK(q)` of a torus orbit family.
#[derive(Clone, Debug)]
pub struct ActionProfile<T> {
    pub q: Vec<T>,
    pub action: Vec<T>,
    pub q_o: T,
    /// `A` does not decrease moving away from `q_o` on either side, up to the
    /// comparison tolerance.
    pub monotone: bool,
    /// Most negative step found by the monotonicity scan (zero if none).
    pub worst_step: T,
}

pub const MONOTONE_TOL: f64 = 1e-9;

pub fn action_profile<T: Real, P: KProfile<T> + ?Sized>(
    n: i64,
    m: u64,
    profile: &P,
    grid: &[T],
) -> Result<ActionProfile<T>> {
    if m == 0 {
        return Err(Error::ZeroWinding);
    }
    let (Some(&lo), Some(&hi)) = (grid.first(), grid.last()) else {
        return Err(Error::InvalidParams("empty q grid".into()));
    };
    let (dlo, dhi) = profile.domain();
    if lo < dlo || hi > dhi {
        return Err(Error::InvalidParams("q grid leaves the profile domain".into()));
    }
    let nf = T::from_i64(n).expect("numerator fits");
    let mf = T::from_u64(m).expect("winding fits");
    let q_o = solve_slope(profile, -nf / mf, (lo, hi))?;
    let action: Vec<T> = grid.iter().map(|&q| nf * q + mf * profile.k(q)).collect();

    let tol = T::lit(MONOTONE_TOL);
    let mut worst = T::zero();
    for (w, a) in grid.windows(2).zip(action.windows(2)) {
        // moving right: A must rise past q_o and fall before it
        let step = if w[0] >= q_o {
            a[1] - a[0]
        } else if w[1] <= q_o {
            a[0] - a[1]
        } else {
            continue;
        };
        worst = worst.min(step);
    }
    Ok(ActionProfile {
        q: grid.to_vec(),
        action,
        q_o,
        monotone: worst > -tol,
        worst_step: worst,
    })
}

/// Evenly spaced grid with `points` samples on `[lo, hi]`.
pub fn linspace<T: Real>(lo: T, hi: T, points: usize) -> Vec<T> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let d = T::from_usize(points - 1).expect("grid size fits");
            (0..points)
                .map(|i| lo + (hi - lo) * T::from_usize(i).expect("grid index fits") / d)
                .collect()
        }
    }
}

/// Action profile of the `(n, m)` orbit family on its own collar.
pub fn orbit_action_profile<T: Real>(
    n: u64,
    m: u64,
    params: &LocalModelParams<T>,
    points: usize,
) -> Result<(OrbitTorus<T>, ActionProfile<T>)> {
    let profile = params.twist_profile()?;
    let torus = profile.orbit_torus(n, m)?;
    let grid = linspace(torus.region.0, torus.region.1, points);
    let ap = action_profile(torus.n_chart, m, &profile, &grid)?;
    Ok((torus, ap))
}
