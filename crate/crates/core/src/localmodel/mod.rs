//! Holomorphic 0-surgery model in C² and the twist-region action profile.
//!
//! `N = {-|z₁|² + |z₂|² = -1, |z₂| < ε}` is a solid torus around the binding
//! `γ = N ∩ {r₁ = 1}`; the rescaled form `e^{-h}λ` has Reeb field
//! `-∂θ₁ + c∂θ₂`. The Liouville-type flow `Y^t(z₁, z₂) = (e^{-t}z₁, e^{ct}z₂)`
//! preserves `ρ = r₁^c r₂` and both angles.

mod profile;

use num_complex::Complex;

use crate::error::{Error, Result};
pub use crate::scalar::Real;

pub use profile::{
    action_profile, linspace, orbit_action_profile, solve_slope, ActionProfile, FProfile, KProfile, OrbitTorus,
    QuadraticProfile, TwistGeometry, TwistProfile, MONOTONE_TOL,
};

/// Point of C².
pub type C2<T> = [Complex<T>; 2];

/// Row-major 2×2 real matrix.
pub type Mat2<T> = [[T; 2]; 2];

/// Tolerance for membership in `N` and for `det Λ = 1`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalModelParams<T> {
    /// Rotation constant of the perturbed Reeb field; irrational in principle.
    pub c: T,
    /// Tube radius bound for `N`.
    pub epsilon: T,
    pub sigma: u64,
    pub c0: T,
    /// Small negative irrational shift in `K = -q(f + r̃) + c₀`.
    pub r_tilde: T,
    /// `K(x_h)`, the value at the hyperbolic critical point; sets the action of `h^m`.
    pub k_at_core: T,
    pub twist: TwistGeometry<T>,
    pub f_profile: FProfile,
}

impl<T: Real> LocalModelParams<T> {
    /// `c = √2 - 1`, `ε = 1/2`, `c₀ = 10`, `r̃ = -1/√50`, `K(x_h) = c₀`.
    pub fn standard(sigma: u64) -> Self {
        let c0 = T::lit(10.0);
        Self {
            c: T::SQRT_2() - T::one(),
            epsilon: T::lit(0.5),
            sigma,
            c0,
            r_tilde: -T::one() / T::lit(50.0).sqrt(),
            k_at_core: c0,
            twist: TwistGeometry {
                outer_minus: T::lit(0.001),
                minus: T::lit(0.002),
                plus: T::lit(0.004),
                outer_plus: T::lit(0.006),
            },
            f_profile: FProfile::Smoothstep,
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if self.sigma == 0 {
            return Err(Error::ZeroSigma);
        }
        if !(self.c > T::zero()) {
            return bad("c must be positive");
        }
        if !(self.epsilon > T::zero()) {
            return bad("ε must be positive");
        }
        if !(self.c0 > T::zero()) {
            return bad("c₀ must be positive");
        }
        if !(self.r_tilde < T::zero() && self.r_tilde > -T::lit(0.2)) {
            return bad("r̃ must lie in (-0.2, 0)");
        }
        let g = &self.twist;
        if !(g.outer_minus < g.minus && g.minus < g.plus && g.plus < g.outer_plus) {
            return bad("twist geometry must satisfy q'₋ < q₋ < q₊ < q'₊");
        }
        Ok(())
    }

    pub fn twist_profile(&self) -> Result<TwistProfile<T>> {
        TwistProfile::new(self)
    }
}

/// `h(r₂) = ln(1 + (1 + c) r₂²)`, the conformal factor exponent of `λ' = e^{-h}λ`.
pub fn conformal_exponent<T: Real>(r2: T, c: T) -> Result<T> {
    if r2 < T::zero() {
        return Err(Error::NegativeRadius(r2.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((T::one() + (T::one() + c) * r2 * r2).ln())
}

pub fn flow_y<T: Real>(t: T, z: C2<T>, c: T) -> C2<T> {
    [z[0] * (-t).exp(), z[1] * (c * t).exp()]
}

/// `ρ = |z₁|^c |z₂|`.
pub fn rho<T: Real>(z: &C2<T>, c: T) -> T {
    z[0].norm().powf(c) * z[1].norm()
}

/// `F(z) = -|z₁|² + |z₂|²`.
pub fn defining_function<T: Real>(z: &C2<T>) -> T {
    z[1].norm_sqr() - z[0].norm_sqr()
}

/// Reeb vector in polar coordinates `(r₁, r₂, θ₁, θ₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarVector<T> {
    pub dr1: T,
    pub dr2: T,
    pub dtheta1: T,
    pub dtheta2: T,
}

pub fn check_on_n<T: Real>(z: &C2<T>, epsilon: T) -> Result<()> {
    let residual = (defining_function(z) + T::one()).abs();
    let r2 = z[1].norm();
    if residual > T::lit(MEMBERSHIP_TOL) || r2 >= epsilon {
        return Err(Error::NotOnN {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            r2: r2.to_f64().unwrap_or(f64::NAN),
            epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

pub fn reeb_field<T: Real>(z: &C2<T>, params: &LocalModelParams<T>) -> Result<PolarVector<T>> {
    check_on_n(z, params.epsilon)?;
    Ok(PolarVector {
        dr1: T::zero(),
        dr2: T::zero(),
        dtheta1: -T::one(),
        dtheta2: params.c,
    })
}

/// Time-`t` flow of the Reeb field `-∂θ₁ + c∂θ₂`.
pub fn reeb_flow<T: Real>(t: T, z: C2<T>, c: T) -> C2<T> {
    [
        z[0] * Complex::from_polar(T::one(), -t),
        z[1] * Complex::from_polar(T::one(), c * t),
    ]
}

fn rotation<T: Real>(angle: T) -> Mat2<T> {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

/// Linearized return map of `γ^m` on `ζ|_γ = span(∂x₂, ∂y₂)`: rotation by `4mcπ`.
pub fn return_map<T: Real>(m: u64, c: T) -> Result<Mat2<T>> {
    if m == 0 {
        return Err(Error::ZeroWinding);
    }
    let mf = T::from_u64(m).expect("winding fits");
    Ok(rotation(T::lit(4.0) * mf * c * T::PI()))
}

pub const RETURN_MAP_STEP: f64 = 1e-4;

/// Same map, by RK4 integration of `v' = DR v`, `DR = [[0, -2c], [2c, 0]]`,
/// over the period `2mπ`, with step close to `step`.
pub fn return_map_integrated<T: Real>(m: u64, c: T, step: T) -> Result<Mat2<T>> {
    if m == 0 {
        return Err(Error::ZeroWinding);
    }
    let period = T::lit(2.0) * T::from_u64(m).expect("winding fits") * T::PI();
    let steps = (period / step).ceil().to_usize().unwrap_or(1).max(1);
    let h = period / T::from_usize(steps).expect("step count fits");
    let w = T::lit(2.0) * c;
    let field = |v: [T; 2]| [-w * v[1], w * v[0]];
    let mut cols = [[T::one(), T::zero()], [T::zero(), T::one()]];
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    for v in cols.iter_mut() {
        for _ in 0..steps {
            let k1 = field(*v);
            let k2 = field([v[0] + half * h * k1[0], v[1] + half * h * k1[1]]);
            let k3 = field([v[0] + half * h * k2[0], v[1] + half * h * k2[1]]);
            let k4 = field([v[0] + h * k3[0], v[1] + h * k3[1]]);
            for i in 0..2 {
                v[i] = v[i] + h * sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
            }
        }
    }
    // cols[j] is the image of the j-th basis vector
    Ok([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnClass {
    Elliptic,
    PositiveHyperbolic,
    NegativeHyperbolic,
    Degenerate,
}

impl ReturnClass {
    pub fn name(self) -> &'static str {
        match self {
            ReturnClass::Elliptic => "elliptic",
            ReturnClass::PositiveHyperbolic => "positive-hyperbolic",
            ReturnClass::NegativeHyperbolic => "negative-hyperbolic",
            ReturnClass::Degenerate => "degenerate",
        }
    }
}

pub fn det2<T: Real>(a: &Mat2<T>) -> T {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Eigenvalue type of a symplectic 2×2 matrix, read off the trace.
pub fn classify_return_map<T: Real>(a: &Mat2<T>) -> Result<ReturnClass> {
    let tol = T::lit(MEMBERSHIP_TOL);
    let det = det2(a);
    if (det - T::one()).abs() > tol {
        return Err(Error::NotSymplectic(det.to_f64().unwrap_or(f64::NAN)));
    }
    let tr = a[0][0] + a[1][1];
    let two = T::lit(2.0);
    Ok(if (tr - two).abs() <= tol {
        ReturnClass::Degenerate
    } else if tr > two {
        ReturnClass::PositiveHyperbolic
    } else if tr <= -two {
        ReturnClass::NegativeHyperbolic
    } else {
        ReturnClass::Elliptic
    })
}

/// `det(Λ - Id)`; positive exactly for elliptic and negative-hyperbolic maps.
pub fn det_minus_identity<T: Real>(a: &Mat2<T>) -> T {
    det2(&[[a[0][0] - T::one(), a[0][1]], [a[1][0], a[1][1] - T::one()]])
}

/// Vanishing orders of a punctured holomorphic map `(f₁, f₂)` at the puncture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaurentExponents {
    pub n1: i64,
    pub n2: i64,
}

/// How a punctured holomorphic map looks from one side of the surgery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticView {
    /// Converges to the `k`-fold orbit at the positive end.
    PositiveEnd(u64),
    /// Converges to the `k`-fold orbit at the negative end.
    NegativeEnd(u64),
    /// Extends over the puncture, meeting the axis cylinder with this multiplicity.
    Extends { multiplicity: u64 },
}

impl std::fmt::Display for AsymptoticView {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AsymptoticView::PositiveEnd(k) => write!(f, "positive end, multiplicity {k}"),
            AsymptoticView::NegativeEnd(k) => write!(f, "negative end, multiplicity {k}"),
            AsymptoticView::Extends { multiplicity } => {
                write!(f, "extends, intersection multiplicity {multiplicity}")
            }
        }
    }
}

/// Views from `N` and from the surgered `N̂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaurentViews {
    pub n_view: AsymptoticView,
    pub n_hat_view: AsymptoticView,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn laurent_classify<T: Real>(exp: LaurentExponents, c: T) -> Result<LaurentViews> {
    let n1 = T::from_i64(exp.n1).expect("exponent fits");
    let n2 = T::from_i64(exp.n2).expect("exponent fits");
    let weight = c * n1 + n2;
    if !(weight > T::zero()) {
        return Err(Error::InvalidLaurent(weight.to_f64().unwrap_or(f64::NAN)));
    }
    let k = |x: i64| x.unsigned_abs();
    let n_view = match exp.n1 {
        x if x > 0 => AsymptoticView::PositiveEnd(k(x)),
        0 => AsymptoticView::Extends {
            multiplicity: k(exp.n2),
        },
        x => AsymptoticView::NegativeEnd(k(x)),
    };
    // roles of the two factors swap on the surgered side
    let n_hat_view = match exp.n2 {
        x if x > 0 => AsymptoticView::NegativeEnd(k(x)),
        0 => AsymptoticView::Extends {
            multiplicity: k(exp.n1),
        },
        x => AsymptoticView::PositiveEnd(k(x)),
    };
    Ok(LaurentViews { n_view, n_hat_view })
}

/// `Φ(p, r, θ) = (√(1 + r²) e^{-ip}, r e^{iθ})`, the binding tube `B × D²_ε → N`.
pub fn embed_phi<T: Real>(p: T, r: T, theta: T, epsilon: T) -> Result<C2<T>> {
    if r < T::zero() {
        return Err(Error::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    if r >= epsilon {
        return Err(Error::OutsideTube {
            r: r.to_f64().unwrap_or(f64::NAN),
            epsilon: epsilon.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok([
        Complex::from_polar((T::one() + r * r).sqrt(), -p),
        Complex::from_polar(r, theta),
    ])
}
