//! The boundary operator of the contact complex.
//!
//! Only elliptic torus orbits have nonzero boundary. For `m ≥ 2`,
//!
//! ```text
//! ∂e_{n/m} = c₋ · n/κ(n, m-1) · h_{n/(m-1)}                (0 < n ≤ σ(m-1))
//!          + c₊ · (σm - n)/κ(n-σ, m-1) · h_{(n-σ)/(m-1)}     (σ ≤ n < σm)
//! ```
//!
//! with targets normalized, so `h_{0/(m-1)}` and `h_{σ(m-1)/(m-1)}` are both
//! the core orbit `h^{m-1}`. Each term is the signed count of one family of
//! rigid cylinders; `κ(n, m) = gcd(n, m)` is the multiplicity of `e_{n/m}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactq::{kappa, SparseMat};
use crate::orbits::{self, homology_class, normalize_index, Orbit, OrbitKind};
use crate::scalar::ExactField;

/// Finite formal linear combination of orbits.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain<T> {
    terms: BTreeMap<Orbit, T>,
}

impl<T: ExactField> Default for Chain<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: ExactField> Chain<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn single(o: Orbit, coeff: T) -> Self {
        let mut c = Self::zero();
        c.add_term(o, coeff);
        c
    }

    pub fn add_term(&mut self, o: Orbit, coeff: T) {
        let sum = match self.terms.remove(&o) {
            Some(old) => old + coeff,
            None => coeff,
        };
        if !sum.is_zero() {
            self.terms.insert(o, sum);
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (o, c) in &other.terms {
            self.add_term(*o, c.clone());
        }
    }

    pub fn scaled(&self, k: &T) -> Self {
        let mut out = Self::zero();
        if k.is_zero() {
            return out;
        }
        for (o, c) in &self.terms {
            out.terms.insert(*o, c.clone() * k.clone());
        }
        out
    }

    pub fn coefficient(&self, o: &Orbit) -> T {
        self.terms.get(o).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical orbit order.
    pub fn iter(&self) -> impl Iterator<Item = (&Orbit, &T)> {
        self.terms.iter()
    }
}

impl<T: ExactField> FromIterator<(Orbit, T)> for Chain<T> {
    fn from_iter<I: IntoIterator<Item = (Orbit, T)>>(iter: I) -> Self {
        let mut c = Self::zero();
        for (o, k) in iter {
            c.add_term(o, k);
        }
        c
    }
}

impl<T: ExactField> fmt::Display for Chain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (o, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{o}")?;
        }
        Ok(())
    }
}

/// The two orientation signs; their product is always -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignConvention {
    c_minus: i8,
    c_plus: i8,
}

impl SignConvention {
    /// `c₋ = +1`, `c₊ = -1`.
    pub const STANDARD: SignConvention = SignConvention { c_minus: 1, c_plus: -1 };
    pub const FLIPPED: SignConvention = SignConvention { c_minus: -1, c_plus: 1 };

    pub fn new(c_minus: i8, c_plus: i8) -> Result<Self> {
        if c_minus.abs() != 1 || c_plus.abs() != 1 || c_minus * c_plus != -1 {
            return Err(Error::InvalidSigns { c_minus, c_plus });
        }
        Ok(Self { c_minus, c_plus })
    }

    pub fn from_c_minus(c_minus: i8) -> Result<Self> {
        Self::new(c_minus, -c_minus)
    }

    pub fn c_minus(&self) -> i8 {
        self.c_minus
    }

    pub fn c_plus(&self) -> i8 {
        self.c_plus
    }
}

impl Default for SignConvention {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// `r + 2(wind(upper) - wind(lower))`, with `r ∈ {-1, 0, 1}` from the parities.
pub fn relative_dimension(lower: &Orbit, upper: &Orbit) -> Result<i64> {
    for o in [lower, upper] {
        if o.kind() == OrbitKind::Binding {
            return Err(Error::NotTorusOrCore(*o));
        }
    }
    let r = match (lower.is_elliptic(), upper.is_elliptic()) {
        (true, false) => 1,
        (false, true) => -1,
        _ => 0,
    };
    Ok(r + 2 * (upper.winding() as i64 - lower.winding() as i64))
}

/// The five families of rigid cylinders `(lower, upper)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `(e_{n/m}, h_{n/m})`, `0 < n < σm`; the two cylinders cancel.
    SameTorus,
    /// `(h_{n/(m-1)}, e_{n/m})`, `0 < n < σ(m-1)`.
    Down,
    /// `(h^{m-1}, e_{σ(m-1)/m})`.
    DownToCore,
    /// `(h_{(n-σ)/(m-1)}, e_{n/m})`, `σ < n < σm`.
    DownShifted,
    /// `(h^{m-1}, e_{σ/m})`.
    DownShiftedToCore,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::SameTorus => 1,
            Family::Down => 2,
            Family::DownToCore => 3,
            Family::DownShifted => 4,
            Family::DownShiftedToCore => 5,
        }
    }

    /// Whether the family's cylinders carry the sign `c₋` (else `c₊`).
    fn uses_c_minus(self) -> bool {
        matches!(self, Family::Down | Family::DownToCore)
    }
}

/// A rigid pair, with the lower orbit's numerator as written before
/// normalization (`n' = n` or `n - σ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuliPair {
    pub family: Family,
    pub lower: Orbit,
    pub upper: Orbit,
    pub n_prime: u64,
}

/// All rigid cylinder pairs with upper winding at most `max_winding`.
pub fn allowed_pairs(sigma: u64, max_winding: u64) -> Result<Vec<ModuliPair>> {
    if sigma == 0 {
        return Err(Error::ZeroSigma);
    }
    let mut out = Vec::new();
    for m in 1..=max_winding {
        for n in 1..sigma * m {
            out.push(ModuliPair {
                family: Family::SameTorus,
                lower: Orbit::elliptic(n, m),
                upper: Orbit::hyperbolic(n, m),
                n_prime: n,
            });
        }
        if m < 2 {
            continue;
        }
        let h = |n_prime: u64| normalize_index(OrbitKind::HyperbolicT, n_prime as i64, m - 1, sigma);
        for n in 1..sigma * (m - 1) {
            out.push(ModuliPair {
                family: Family::Down,
                lower: h(n)?,
                upper: Orbit::elliptic(n, m),
                n_prime: n,
            });
        }
        let top = sigma * (m - 1);
        out.push(ModuliPair {
            family: Family::DownToCore,
            lower: Orbit::core(m - 1),
            upper: Orbit::elliptic(top, m),
            n_prime: top,
        });
        for n in sigma + 1..sigma * m {
            out.push(ModuliPair {
                family: Family::DownShifted,
                lower: h(n - sigma)?,
                upper: Orbit::elliptic(n, m),
                n_prime: n - sigma,
            });
        }
        out.push(ModuliPair {
            family: Family::DownShiftedToCore,
            lower: Orbit::core(m - 1),
            upper: Orbit::elliptic(sigma, m),
            n_prime: 0,
        });
    }
    Ok(out)
}

/// `|n'm - n(m-1)| / (κ(n', m-1) κ(n, m))`, the number of rigid cylinders
/// from `e_{n/m}` down to `h_{n'/(m-1)}`.
pub fn moduli_count_raw<T: ExactField>(n_prime: u64, n: u64, m: u64) -> Result<T> {
    if m < 2 {
        return Err(Error::ZeroWinding);
    }
    let num = (n_prime as i128 * m as i128 - n as i128 * (m as i128 - 1)).unsigned_abs();
    let den = kappa(n_prime, m - 1)? * kappa(n, m)?;
    Ok(T::from_int(num as i64) / T::from_int(den as i64))
}

/// Cylinder count for a pair of families 2–5.
///
/// A lower core orbit `h^{m-1}` is read as `h_{n'/(m-1)}` with `n' = n - σ`
/// (that is `0`) when `n = σ`, and with `n' = n` when `n = σ(m-1)`; for
/// `m = 2` both readings coincide and give the same count.
pub fn moduli_count<T: ExactField>(lower: &Orbit, upper: &Orbit, sigma: u64) -> Result<T> {
    let not_pair = || Error::NotAModuliPair {
        lower: *lower,
        upper: *upper,
    };
    lower.validate(sigma).map_err(|_| not_pair())?;
    upper.validate(sigma).map_err(|_| not_pair())?;
    if upper.kind() != OrbitKind::EllipticT || upper.winding() < 2 || lower.winding() + 1 != upper.winding() {
        return Err(not_pair());
    }
    let (n, m) = (upper.n(), upper.winding());
    let n_prime = match lower.kind() {
        OrbitKind::HyperbolicT if lower.n() == n && n < sigma * (m - 1) => n,
        OrbitKind::HyperbolicT if n > sigma && lower.n() == n - sigma => n - sigma,
        OrbitKind::CoreH if n == sigma => 0,
        OrbitKind::CoreH if n == sigma * (m - 1) => n,
        _ => return Err(not_pair()),
    };
    let count: T = moduli_count_raw(n_prime, n, m)?;
    debug_assert_eq!(count.parts().1, "1", "cylinder counts are integers");
    Ok(count)
}

/// One summand of `∂e_{n/m}` before targets are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTerm<T> {
    pub family: Family,
    /// Numerator of the target as written, `n` or `n - σ`.
    pub n_prime: u64,
    pub target: Orbit,
    pub coefficient: T,
}

/// The summands of `∂o`; empty for hyperbolic, core, binding and `e_{n/1}`.
pub fn boundary_terms<T: ExactField>(o: &Orbit, sigma: u64, signs: SignConvention) -> Result<Vec<BoundaryTerm<T>>> {
    o.validate(sigma)?;
    let (n, m) = (o.n(), o.winding());
    if o.kind() != OrbitKind::EllipticT || m < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(2);
    if n <= sigma * (m - 1) {
        let family = if n < sigma * (m - 1) {
            Family::Down
        } else {
            Family::DownToCore
        };
        let coefficient =
            T::from_int(signs.c_minus as i64) * T::from_int(n as i64) / T::from_int(kappa(n, m - 1)? as i64);
        out.push(BoundaryTerm {
            family,
            n_prime: n,
            target: normalize_index(OrbitKind::HyperbolicT, n as i64, m - 1, sigma)?,
            coefficient,
        });
    }
    if n >= sigma {
        let family = if n > sigma {
            Family::DownShifted
        } else {
            Family::DownShiftedToCore
        };
        let shifted = n - sigma;
        let coefficient = T::from_int(signs.c_plus as i64) * T::from_int((sigma * m - n) as i64)
            / T::from_int(kappa(shifted, m - 1)? as i64);
        out.push(BoundaryTerm {
            family,
            n_prime: shifted,
            target: normalize_index(OrbitKind::HyperbolicT, shifted as i64, m - 1, sigma)?,
            coefficient,
        });
    }
    Ok(out)
}

pub fn boundary<T: ExactField>(o: &Orbit, sigma: u64, signs: SignConvention) -> Result<Chain<T>> {
    Ok(boundary_terms::<T>(o, sigma, signs)?
        .into_iter()
        .map(|t| (t.target, t.coefficient))
        .collect())
}

/// `∂` extended linearly to chains.
pub fn boundary_of_chain<T: ExactField>(c: &Chain<T>, sigma: u64, signs: SignConvention) -> Result<Chain<T>> {
    let mut out = Chain::zero();
    for (o, k) in c.iter() {
        out.add(&boundary::<T>(o, sigma, signs)?.scaled(k));
    }
    Ok(out)
}

/// Matrix of `∂` on all generators of winding at most `max_winding`.
/// Entry `(row γ', col γ)` is the coefficient of `γ'` in `∂γ`.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix<T> {
    sigma: u64,
    max_winding: u64,
    signs: SignConvention,
    generators: Vec<Orbit>,
    index: HashMap<Orbit, usize>,
    matrix: SparseMat<T>,
}

impl<T: ExactField> BoundaryMatrix<T> {
    pub fn build(sigma: u64, max_winding: u64, signs: SignConvention) -> Result<Self> {
        let generators = orbits::enumerate(sigma, max_winding, false)?;
        let index: HashMap<Orbit, usize> = generators.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        let mut matrix = SparseMat::zeros(generators.len(), generators.len());
        for (col, o) in generators.iter().enumerate() {
            for (target, k) in boundary::<T>(o, sigma, signs)?.iter() {
                matrix.set(index[target], col, k.clone())?;
            }
        }
        Ok(Self {
            sigma,
            max_winding,
            signs,
            generators,
            index,
            matrix,
        })
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn max_winding(&self) -> u64 {
        self.max_winding
    }

    pub fn signs(&self) -> SignConvention {
        self.signs
    }

    pub fn generators(&self) -> &[Orbit] {
        &self.generators
    }

    pub fn index_of(&self, o: &Orbit) -> Option<usize> {
        self.index.get(o).copied()
    }

    pub fn matrix(&self) -> &SparseMat<T> {
        &self.matrix
    }

    pub fn entry(&self, target: &Orbit, source: &Orbit) -> T {
        match (self.index_of(target), self.index_of(source)) {
            (Some(r), Some(c)) => self.matrix.get(r, c).cloned().unwrap_or_else(T::zero),
            _ => T::zero(),
        }
    }

    /// Column of `source` as a chain.
    pub fn column(&self, source: &Orbit) -> Chain<T> {
        let Some(c) = self.index_of(source) else {
            return Chain::zero();
        };
        self.matrix
            .iter()
            .filter(|&(_, col, _)| col == c)
            .map(|(r, _, v)| (self.generators[r], v.clone()))
            .collect()
    }

    /// Adds `delta` to one entry. Used to exercise the failure paths of the checks.
    pub fn perturb_entry(&mut self, target: &Orbit, source: &Orbit, delta: T) -> Result<()> {
        let missing = |o: &Orbit| Error::NumeratorOutOfRange {
            n: o.n(),
            m: o.winding(),
            bound: self.sigma * o.winding(),
        };
        let r = self.index_of(target).ok_or_else(|| missing(target))?;
        let c = self.index_of(source).ok_or_else(|| missing(source))?;
        self.matrix.add_to(r, c, delta)
    }

    /// Coordinates of a chain in generator order; orbits outside the truncation are dropped.
    pub fn to_vector(&self, c: &Chain<T>) -> Vec<T> {
        let mut v = vec![T::zero(); self.generators.len()];
        for (o, k) in c.iter() {
            if let Some(i) = self.index_of(o) {
                v[i] = k.clone();
            }
        }
        v
    }

    pub fn to_chain(&self, v: &[T]) -> Chain<T> {
        v.iter()
            .zip(&self.generators)
            .filter(|(k, _)| !k.is_zero())
            .map(|(k, o)| (*o, k.clone()))
            .collect()
    }

    pub fn apply(&self, c: &Chain<T>) -> Result<Chain<T>> {
        Ok(self.to_chain(&self.matrix.mul_vec(&self.to_vector(c))?))
    }

    /// First nonzero entry of `∂∘∂`, as (target, source, value).
    pub fn d_squared_violation(&self) -> Result<Option<(Orbit, Orbit, T)>> {
        let sq = self.matrix.mul(&self.matrix)?;
        let first = sq
            .iter()
            .next()
            .map(|(r, c, v)| (self.generators[r], self.generators[c], v.clone()));
        Ok(first)
    }

    /// Nonzero entries that change the homology class or do not lower the
    /// winding by exactly one.
    pub fn structure_violation(&self) -> Option<(Orbit, Orbit)> {
        self.matrix.iter().find_map(|(r, c, _)| {
            let (t, s) = (self.generators[r], self.generators[c]);
            let same_class = homology_class(&t, self.sigma) == homology_class(&s, self.sigma);
            (!same_class || t.winding() + 1 != s.winding()).then_some((t, s))
        })
    }
}

pub fn verify_d_squared<T: ExactField>(sigma: u64, max_winding: u64, signs: SignConvention) -> Result<bool> {
    Ok(BoundaryMatrix::<T>::build(sigma, max_winding, signs)?
        .d_squared_violation()?
        .is_none())
}

/// A boundary coefficient that disagrees with the cylinder counts.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMismatch<T> {
    pub lower: Orbit,
    pub upper: Orbit,
    pub found: T,
    pub expected: T,
}

impl<T: ExactField> fmt::Display for CoefficientMismatch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<∂{}, {}> = {}, cylinder counts give {}",
            self.upper, self.lower, self.found, self.expected
        )
    }
}

/// Compares every matrix entry with the signed sum `Σ c± · κ_γ · #M` over
/// the rigid families joining the pair, and checks each family's term has
/// absolute value `κ_γ · #M` (multiplicity-one curves).
pub fn coefficient_mismatch<T: ExactField>(bm: &BoundaryMatrix<T>) -> Result<Option<CoefficientMismatch<T>>> {
    let sigma = bm.sigma;
    let mut expected: BTreeMap<(Orbit, Orbit), T> = BTreeMap::new();
    for pair in allowed_pairs(sigma, bm.max_winding)? {
        if pair.family == Family::SameTorus {
            continue;
        }
        let (n, m) = (pair.upper.n(), pair.upper.winding());
        let count: T = moduli_count_raw(pair.n_prime, n, m)?;
        let sign = if pair.family.uses_c_minus() {
            bm.signs.c_minus
        } else {
            bm.signs.c_plus
        };
        let k_gamma = T::from_int(kappa(n, m)? as i64);
        let value = T::from_int(sign as i64) * k_gamma.clone() * count.clone();

        // the family's own term in ∂e_{n/m}
        let term = boundary_terms::<T>(&pair.upper, sigma, bm.signs)?
            .into_iter()
            .find(|t| t.family == pair.family && t.target == pair.lower);
        match term {
            Some(t) if t.coefficient.abs() == k_gamma.clone() * count.clone() => {}
            other => {
                return Ok(Some(CoefficientMismatch {
                    lower: pair.lower,
                    upper: pair.upper,
                    found: other.map_or_else(T::zero, |t| t.coefficient),
                    expected: value,
                }))
            }
        }
        let slot = expected.entry((pair.lower, pair.upper)).or_insert_with(T::zero);
        *slot = slot.clone() + value;
    }
    // every stored entry must be accounted for, and vice versa
    let mut seen = std::collections::BTreeSet::new();
    for (r, c, v) in bm.matrix.iter() {
        let key = (bm.generators[r], bm.generators[c]);
        let want = expected.get(&key).cloned().unwrap_or_else(T::zero);
        if *v != want {
            return Ok(Some(CoefficientMismatch {
                lower: key.0,
                upper: key.1,
                found: v.clone(),
                expected: want,
            }));
        }
        seen.insert(key);
    }
    for (key, want) in expected {
        if !want.is_zero() && !seen.contains(&key) {
            return Ok(Some(CoefficientMismatch {
                lower: key.0,
                upper: key.1,
                found: T::zero(),
                expected: want,
            }));
        }
    }
    Ok(None)
}

pub fn coefficient_consistency<T: ExactField>(sigma: u64, max_winding: u64, signs: SignConvention) -> Result<bool> {
    let bm = BoundaryMatrix::<T>::build(sigma, max_winding, signs)?;
    Ok(coefficient_mismatch(&bm)?.is_none())
}
