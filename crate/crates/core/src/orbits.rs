//! Reeb orbit generators of the contact complex of a σ-Dehn-twist open book.
//!
//! Torus orbits come in elliptic/hyperbolic pairs `e_{n/m}`, `h_{n/m}` with
//! `0 < n < σm`, where `m` is the winding around the binding and `n` the
//! class along the twisted circle. The core orbit `h` of the hyperbolic
//! critical point contributes `h^m`, and the binding contributes `B^m`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::localmodel::LocalModelParams;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitKind {
    EllipticT,
    HyperbolicT,
    CoreH,
    Binding,
}

impl OrbitKind {
    pub fn name(self) -> &'static str {
        match self {
            OrbitKind::EllipticT => "elliptic_t",
            OrbitKind::HyperbolicT => "hyperbolic_t",
            OrbitKind::CoreH => "core_h",
            OrbitKind::Binding => "binding",
        }
    }

    pub fn is_torus(self) -> bool {
        matches!(self, OrbitKind::EllipticT | OrbitKind::HyperbolicT)
    }
}

/// A Reeb orbit. `n` is zero for the core and binding kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Orbit {
    kind: OrbitKind,
    n: u64,
    m: u64,
}

impl Orbit {
    pub fn elliptic(n: u64, m: u64) -> Self {
        Self {
            kind: OrbitKind::EllipticT,
            n,
            m,
        }
    }

    pub fn hyperbolic(n: u64, m: u64) -> Self {
        Self {
            kind: OrbitKind::HyperbolicT,
            n,
            m,
        }
    }

    pub fn core(m: u64) -> Self {
        Self {
            kind: OrbitKind::CoreH,
            n: 0,
            m,
        }
    }

    pub fn binding(m: u64) -> Self {
        Self {
            kind: OrbitKind::Binding,
            n: 0,
            m,
        }
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn winding(&self) -> u64 {
        self.m
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self.kind, OrbitKind::EllipticT | OrbitKind::Binding)
    }

    /// Checks the orbit is a generator for twist count `sigma`.
    pub fn validate(&self, sigma: u64) -> Result<()> {
        if sigma == 0 {
            return Err(Error::ZeroSigma);
        }
        if self.m == 0 {
            return Err(Error::ZeroWinding);
        }
        let bound = sigma * self.m;
        let ok = if self.kind.is_torus() {
            self.n > 0 && self.n < bound
        } else {
            self.n == 0
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NumeratorOutOfRange {
                n: self.n,
                m: self.m,
                bound,
            })
        }
    }
}

impl Ord for Orbit {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.m, self.kind, self.n).cmp(&(other.m, other.kind, other.n))
    }
}

impl PartialOrd for Orbit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OrbitKind::EllipticT => write!(f, "e_{{{}/{}}}", self.n, self.m),
            OrbitKind::HyperbolicT => write!(f, "h_{{{}/{}}}", self.n, self.m),
            OrbitKind::CoreH => write!(f, "h^{}", self.m),
            OrbitKind::Binding => write!(f, "B^{}", self.m),
        }
    }
}

/// Parses the display form (`e_{1/2}`, `h_{3/4}`, `h^2`, `B^1`); braces are optional.
impl FromStr for Orbit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseOrbit(s.to_string());
        let t = s.trim();
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
        if let Some(rest) = t.strip_prefix("h^") {
            return Ok(Orbit::core(num(rest)?));
        }
        if let Some(rest) = t.strip_prefix("B^") {
            return Ok(Orbit::binding(num(rest)?));
        }
        let (kind, rest) = if let Some(r) = t.strip_prefix("e_") {
            (OrbitKind::EllipticT, r)
        } else if let Some(r) = t.strip_prefix("h_") {
            (OrbitKind::HyperbolicT, r)
        } else {
            return Err(bad());
        };
        let rest = rest.trim_start_matches('{').trim_end_matches('}');
        let (n, m) = rest.split_once('/').ok_or_else(bad)?;
        Ok(Orbit {
            kind,
            n: num(n)?,
            m: num(m)?,
        })
    }
}

/// First homology class as (torsion mod σ, free part).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitClass {
    pub torsion: u64,
    pub free: i64,
}

impl OrbitClass {
    pub const TRIVIAL: OrbitClass = OrbitClass { torsion: 0, free: 0 };

    pub fn is_trivial(&self) -> bool {
        *self == Self::TRIVIAL
    }
}

/// All generators with winding at most `max_winding`, in canonical order.
pub fn enumerate(sigma: u64, max_winding: u64, include_binding: bool) -> Result<Vec<Orbit>> {
    if sigma == 0 {
        return Err(Error::ZeroSigma);
    }
    if max_winding == 0 {
        return Err(Error::ZeroWinding);
    }
    let mut out = Vec::new();
    for m in 1..=max_winding {
        out.extend((1..sigma * m).map(|n| Orbit::elliptic(n, m)));
        out.extend((1..sigma * m).map(|n| Orbit::hyperbolic(n, m)));
        out.push(Orbit::core(m));
        if include_binding {
            out.push(Orbit::binding(m));
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    Ok(out)
}

/// Brings a torus orbit's numerator into range using `n ~ n + σm`.
///
/// A hyperbolic orbit landing on `0` (equivalently `σm`) is the core orbit
/// `h^m`. `kind` may be `CoreH`, which is treated as hyperbolic.
pub fn normalize_index(kind: OrbitKind, n: i64, m: u64, sigma: u64) -> Result<Orbit> {
    if sigma == 0 {
        return Err(Error::ZeroSigma);
    }
    if m == 0 {
        return Err(Error::ZeroWinding);
    }
    let period = (sigma * m) as i64;
    let r = n.rem_euclid(period) as u64;
    match kind {
        OrbitKind::EllipticT if r == 0 => Err(Error::EllipticOnCore { n, m }),
        OrbitKind::EllipticT => Ok(Orbit::elliptic(r, m)),
        OrbitKind::HyperbolicT | OrbitKind::CoreH if r == 0 => Ok(Orbit::core(m)),
        OrbitKind::HyperbolicT | OrbitKind::CoreH => Ok(Orbit::hyperbolic(r, m)),
        OrbitKind::Binding => Err(Error::NotTorusOrCore(Orbit::binding(m))),
    }
}

pub fn homology_class(o: &Orbit, sigma: u64) -> OrbitClass {
    if o.kind.is_torus() {
        OrbitClass {
            torsion: o.n % sigma,
            free: 0,
        }
    } else {
        OrbitClass::TRIVIAL
    }
}

pub fn is_contractible(o: &Orbit, sigma: u64) -> bool {
    match o.kind {
        OrbitKind::EllipticT | OrbitKind::HyperbolicT => o.n.is_multiple_of(sigma),
        OrbitKind::CoreH => true,
        OrbitKind::Binding => sigma == 1,
    }
}

/// Reduced Conley–Zehnder index, where it is defined.
///
/// Defined for `h^m` and for the homologically trivial torus orbits; the
/// binding's index depends on the rotation constant and is left undefined.
pub fn mu_bar(o: &Orbit, sigma: u64) -> Option<i64> {
    let m = o.m as i64;
    match o.kind {
        OrbitKind::CoreH => Some(2 * m - 1),
        OrbitKind::EllipticT if o.n.is_multiple_of(sigma) => Some(2 * m - 2),
        OrbitKind::HyperbolicT if o.n.is_multiple_of(sigma) => Some(2 * m - 1),
        _ => None,
    }
}

/// Z/2 index: 0 for elliptic (even), 1 for hyperbolic (odd).
pub fn parity(o: &Orbit) -> u8 {
    if o.is_elliptic() {
        0
    } else {
        1
    }
}

/// Eigenvalue type of the linearized return map of an orbit of this system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnType {
    /// Unit-circle eigenvalues, no real ones.
    Elliptic,
    /// Real eigenvalues, both positive.
    PositiveHyperbolic,
    /// Real eigenvalues, both negative.
    NegativeHyperbolic,
}

pub fn return_type(o: &Orbit) -> ReturnType {
    // the perturbed Morse–Bott tori and the core saddle have positive
    // eigenvalues; e_{n/m} has a small negative rotation and the binding
    // rotates by an irrational angle
    if o.is_elliptic() {
        ReturnType::Elliptic
    } else {
        ReturnType::PositiveHyperbolic
    }
}

/// Covering multiplicity of the orbit over its underlying simple orbit.
pub fn multiplicity(o: &Orbit) -> u64 {
    if o.kind.is_torus() {
        num_integer::gcd(o.n, o.m)
    } else {
        o.m
    }
}

/// Bad orbits are even covers of negative hyperbolic simple orbits.
pub fn is_good(o: &Orbit) -> bool {
    !(return_type(o) == ReturnType::NegativeHyperbolic && multiplicity(o).is_multiple_of(2))
}

/// Action of an orbit, computed on the synthetic `K` profile of `params`.
pub fn action<T: Real>(o: &Orbit, params: &LocalModelParams<T>) -> Result<T> {
    let m = T::from_u64(o.m).expect("winding fits the float type");
    match o.kind {
        OrbitKind::Binding => Ok(T::lit(2.0) * m * T::PI()),
        OrbitKind::CoreH => Ok(m * params.k_at_core),
        OrbitKind::EllipticT | OrbitKind::HyperbolicT => Ok(params.twist_profile()?.orbit_torus(o.n, o.m)?.action),
    }
}

/// `action(upper) - action(lower)`; negative values rule out a cylinder.
pub fn energy<T: Real>(lower: &Orbit, upper: &Orbit, params: &LocalModelParams<T>) -> Result<T> {
    Ok(action(upper, params)? - action(lower, params)?)
}
