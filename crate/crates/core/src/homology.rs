//! Homology of the truncated complex and the closed-form cycles `E_{i,m}`.
//!
//! Generators of winding `≤ M` span a subcomplex, but hyperbolic orbits of
//! winding `M` are only killed by elliptic orbits of winding `M + 1`. Blocks
//! are therefore reported for winding `≤ M - 1` only.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::differential::{BoundaryMatrix, Chain, SignConvention};
use crate::error::{Error, Result};
use crate::exactq::{kappa, rank_and_kernel, rank_of, rref, solve_in_span, SpanBasis};
use crate::orbits::{homology_class, mu_bar, parity, Orbit, OrbitClass};
use crate::scalar::ExactField;

/// The elliptic cycle `E_{i,m}`, `i ∈ Z_σ`, `(i, m) ≠ (0, 1)`.
pub fn closed_form_e<T: ExactField>(i: u64, m: u64, sigma: u64) -> Result<Chain<T>> {
    let undefined = || Error::UndefinedClosedForm { i, m, sigma };
    if sigma == 0 {
        return Err(Error::ZeroSigma);
    }
    if m == 0 {
        return Err(Error::ZeroWinding);
    }
    if i >= sigma || (i == 0 && m < 2) {
        return Err(undefined());
    }
    let q = |x: u64| T::from_int(x as i64);
    let mut out = Chain::zero();
    if i == 0 {
        out.add_term(Orbit::elliptic(sigma, m), T::one());
        let mut coeff = T::one();
        for k in 2..m {
            let j = k - 1;
            coeff = coeff * q(j) / q(m - j - 1);
            out.add_term(Orbit::elliptic(k * sigma, m), coeff.clone());
        }
    } else if m == 1 {
        out.add_term(Orbit::elliptic(i, 1), T::one());
    } else {
        out.add_term(Orbit::elliptic(sigma - i, m), T::one());
        let mut coeff = T::one();
        for k in 2..=m {
            let j = k - 1;
            coeff = coeff * q(j * sigma - i) / q((m - j - 1) * sigma + i);
            out.add_term(Orbit::elliptic(k * sigma - i, m), coeff.clone());
        }
    }
    Ok(out)
}

/// `∏_{k=1}^{m} k·κ((k-1)σ, m) / ((m+1-k)·κ(kσ, m))`, the factor relating
/// `[h_{0/m}]` to `[h_{mσ/m}]` along the chain of relations in winding `m`.
pub fn telescoping_product<T: ExactField>(m: u64, sigma: u64) -> Result<T> {
    let mut p = T::one();
    for k in 1..=m {
        let num = k * kappa((k - 1) * sigma, m)?;
        let den = (m + 1 - k) * kappa(k * sigma, m)?;
        p = p * T::from_int(num as i64) / T::from_int(den as i64);
    }
    Ok(p)
}

/// Index of a homology block: `μ̄` in the trivial class, otherwise winding and parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKey {
    Grading(i64),
    WindingParity { winding: u64, parity: u8 },
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKey::Grading(g) => write!(f, "mu={g}"),
            BlockKey::WindingParity { winding, parity } => write!(f, "m={winding},p={parity}"),
        }
    }
}

/// `2m - 2 + parity`; agrees with `μ̄` wherever `μ̄` is defined, and `∂`
/// lowers it by one.
fn degree(o: &Orbit) -> i64 {
    2 * o.winding() as i64 - 2 + parity(o) as i64
}

fn block_key(o: &Orbit, sigma: u64) -> BlockKey {
    match mu_bar(o, sigma) {
        Some(g) if homology_class(o, sigma).is_trivial() => BlockKey::Grading(g),
        _ => BlockKey::WindingParity {
            winding: o.winding(),
            parity: parity(o),
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomologyBlock<T> {
    pub class: OrbitClass,
    pub key: BlockKey,
    pub winding: u64,
    pub parity: u8,
    pub generators: Vec<Orbit>,
    pub kernel_rank: usize,
    pub image_rank: usize,
    pub homology_rank: usize,
    /// Cycles whose classes form a basis of the block's homology.
    pub representatives: Vec<Chain<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomologyReport<T> {
    pub sigma: u64,
    pub max_winding: u64,
    pub signs: SignConvention,
    /// Largest winding reported.
    pub safe_window: u64,
    pub blocks: Vec<HomologyBlock<T>>,
}

impl<T: ExactField> HomologyReport<T> {
    pub fn block(&self, class: OrbitClass, key: BlockKey) -> Option<&HomologyBlock<T>> {
        self.blocks.iter().find(|b| b.class == class && b.key == key)
    }

    pub fn rank(&self, class: OrbitClass, key: BlockKey) -> usize {
        self.block(class, key).map_or(0, |b| b.homology_rank)
    }

    /// Rank table keyed by (class, key), zero blocks included.
    pub fn rank_table(&self) -> BTreeMap<(OrbitClass, BlockKey), usize> {
        self.blocks
            .iter()
            .map(|b| ((b.class, b.key), b.homology_rank))
            .collect()
    }
}

/// Generators of winding `≤ M` grouped by class and degree.
fn graded_pieces<T: ExactField>(bm: &BoundaryMatrix<T>) -> BTreeMap<(OrbitClass, i64), Vec<usize>> {
    let mut pieces: BTreeMap<(OrbitClass, i64), Vec<usize>> = BTreeMap::new();
    for (i, o) in bm.generators().iter().enumerate() {
        pieces
            .entry((homology_class(o, bm.sigma()), degree(o)))
            .or_default()
            .push(i);
    }
    pieces
}

fn column_vectors<T: ExactField>(bm: &BoundaryMatrix<T>, cols: &[usize], rows: &[usize]) -> Vec<Vec<T>> {
    let sub = bm
        .matrix()
        .submatrix(rows, cols)
        .expect("indices from the generator list");
    let dense = sub.to_dense();
    (0..cols.len())
        .map(|j| dense.iter().map(|r| r[j].clone()).collect())
        .collect()
}

fn compute_block<T: ExactField>(
    bm: &BoundaryMatrix<T>,
    pieces: &BTreeMap<(OrbitClass, i64), Vec<usize>>,
    class: OrbitClass,
    deg: i64,
) -> HomologyBlock<T> {
    let sigma = bm.sigma();
    let cols = &pieces[&(class, deg)];
    let gens: Vec<Orbit> = cols.iter().map(|&i| bm.generators()[i]).collect();

    // kernel of ∂ restricted to this piece, against every row it touches
    let all_rows: Vec<usize> = (0..bm.generators().len()).collect();
    let restricted = bm.matrix().submatrix(&all_rows, cols).expect("valid indices");
    let rk = rank_and_kernel(&restricted);
    let kernel = rref(&rk.kernel);

    // image of the piece one degree up, in this piece's coordinates
    let image: Vec<Vec<T>> = match pieces.get(&(class, deg + 1)) {
        Some(up) => column_vectors(bm, up, cols),
        None => Vec::new(),
    };
    let mut span = SpanBasis::new(cols.len());
    for v in &image {
        span.insert(v);
    }
    let image_rank = span.rank();
    let mut representatives = Vec::new();
    for v in &kernel {
        if span.insert(v) {
            representatives.push(
                v.iter()
                    .zip(&gens)
                    .filter(|(k, _)| !k.is_zero())
                    .map(|(k, o)| (*o, k.clone()))
                    .collect(),
            );
        }
    }
    let kernel_rank = kernel.len();
    let homology_rank = kernel_rank.checked_sub(image_rank).expect("image lies in the kernel");
    debug_assert_eq!(homology_rank, representatives.len());
    let first = gens[0];
    HomologyBlock {
        class,
        key: block_key(&first, sigma),
        winding: first.winding(),
        parity: parity(&first),
        generators: gens,
        kernel_rank,
        image_rank,
        homology_rank,
        representatives,
    }
}

/// Homology of an already built boundary matrix.
pub fn homology_of<T: ExactField>(bm: &BoundaryMatrix<T>) -> Result<HomologyReport<T>> {
    let m_max = bm.max_winding();
    if m_max < 2 {
        return Err(Error::WindowTooSmall { got: m_max, need: 2 });
    }
    let safe = m_max - 1;
    let pieces = graded_pieces(bm);
    let keys: Vec<(OrbitClass, i64)> = pieces
        .keys()
        .copied()
        .filter(|&(_, deg)| (deg as u64 + 2) / 2 <= safe)
        .collect();
    let blocks: Vec<HomologyBlock<T>> = keys
        .par_iter()
        .map(|&(class, deg)| compute_block(bm, &pieces, class, deg))
        .collect();
    Ok(HomologyReport {
        sigma: bm.sigma(),
        max_winding: m_max,
        signs: bm.signs(),
        safe_window: safe,
        blocks,
    })
}

pub fn homology_report<T: ExactField>(
    sigma: u64,
    max_winding: u64,
    signs: SignConvention,
) -> Result<HomologyReport<T>> {
    if max_winding < 2 {
        return Err(Error::WindowTooSmall {
            got: max_winding,
            need: 2,
        });
    }
    homology_of(&BoundaryMatrix::<T>::build(sigma, max_winding, signs)?)
}

/// Predicted rank of a block: `[h^m]` at `μ̄ = 2m-1`, `[E_{0,m}]` at
/// `μ̄ = 2m-2` (`m ≥ 2`), and `[E_{i,m}]` in every even block of a nontrivial
/// class.
pub fn predicted_rank(class: OrbitClass, key: BlockKey) -> usize {
    match key {
        BlockKey::Grading(g) if class.is_trivial() => usize::from(g >= 1),
        BlockKey::WindingParity { winding, parity } if !class.is_trivial() => usize::from(winding >= 1 && parity == 0),
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDiff {
    pub class: OrbitClass,
    pub key: BlockKey,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremCheck {
    pub pass: bool,
    pub blocks_checked: usize,
    pub diffs: Vec<BlockDiff>,
}

/// Compares a report with the predicted generator table inside its window.
pub fn compare_with_prediction<T: ExactField>(report: &HomologyReport<T>) -> TheoremCheck {
    let sigma = report.sigma;
    let mut diffs = Vec::new();
    let table = report.rank_table();
    for (&(class, key), &found) in &table {
        let expected = predicted_rank(class, key);
        if expected != found {
            diffs.push(BlockDiff {
                class,
                key,
                expected,
                found,
            });
        }
    }
    // predicted blocks that are missing from the report altogether
    for m in 1..=report.safe_window {
        let mut want = vec![(OrbitClass::TRIVIAL, BlockKey::Grading(2 * m as i64 - 1))];
        if m >= 2 {
            want.push((OrbitClass::TRIVIAL, BlockKey::Grading(2 * m as i64 - 2)));
        }
        for i in 1..sigma {
            want.push((
                OrbitClass { torsion: i, free: 0 },
                BlockKey::WindingParity { winding: m, parity: 0 },
            ));
        }
        for (class, key) in want {
            if !table.contains_key(&(class, key)) {
                diffs.push(BlockDiff {
                    class,
                    key,
                    expected: 1,
                    found: 0,
                });
            }
        }
    }
    TheoremCheck {
        pass: diffs.is_empty(),
        blocks_checked: table.len(),
        diffs,
    }
}

pub fn verify_theorem<T: ExactField>(sigma: u64, max_winding: u64, signs: SignConvention) -> Result<TheoremCheck> {
    if max_winding < 3 {
        return Err(Error::WindowTooSmall {
            got: max_winding,
            need: 3,
        });
    }
    Ok(compare_with_prediction(&homology_report::<T>(
        sigma,
        max_winding,
        signs,
    )?))
}

/// First `(i, m)` with `∂E_{i,m} ≠ 0`, over `m ≤ max_winding`.
pub fn failing_cycle<T: ExactField>(bm: &BoundaryMatrix<T>) -> Result<Option<(u64, u64, Chain<T>)>> {
    let sigma = bm.sigma();
    for m in 1..=bm.max_winding() {
        for i in 0..sigma {
            if i == 0 && m == 1 {
                continue;
            }
            let e = closed_form_e::<T>(i, m, sigma)?;
            let d = bm.apply(&e)?;
            if !d.is_zero() {
                return Ok(Some((i, m, d)));
            }
        }
    }
    Ok(None)
}

pub fn verify_cycles<T: ExactField>(sigma: u64, max_winding: u64, signs: SignConvention) -> Result<bool> {
    Ok(failing_cycle(&BoundaryMatrix::<T>::build(sigma, max_winding, signs)?)?.is_none())
}

/// Outcome of comparing the elliptic kernel of one (class, winding) block
/// with the span of the closed-form cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBlockCheck {
    pub torsion: u64,
    pub winding: u64,
    pub kernel_rank: usize,
    pub closed_form_rank: usize,
    pub closed_forms_in_kernel: bool,
    pub kernel_in_span: bool,
}

impl KernelBlockCheck {
    pub fn ok(&self) -> bool {
        self.kernel_rank == self.closed_form_rank && self.closed_forms_in_kernel && self.kernel_in_span
    }
}

/// Elliptic kernel versus `span{E_{j,m}}`, block by block for windings `≤ M - 1`.
///
/// `E_{j,1}` lies in class `j` and `E_{j,m}`, `m ≥ 2`, in class `-j`; each
/// block is compared with the closed forms of its own class.
pub fn elliptic_kernel_checks<T: ExactField>(bm: &BoundaryMatrix<T>) -> Result<Vec<KernelBlockCheck>> {
    let sigma = bm.sigma();
    let all_rows: Vec<usize> = (0..bm.generators().len()).collect();
    let mut out = Vec::new();
    for m in 1..bm.max_winding() {
        for i in 0..sigma {
            let cols: Vec<usize> = bm
                .generators()
                .iter()
                .enumerate()
                .filter(|(_, o)| {
                    o.kind() == crate::orbits::OrbitKind::EllipticT && o.winding() == m && o.n() % sigma == i
                })
                .map(|(k, _)| k)
                .collect();
            let kernel = if cols.is_empty() {
                Vec::new()
            } else {
                rank_and_kernel(&bm.matrix().submatrix(&all_rows, &cols)?).kernel
            };
            let mut forms: Vec<Vec<T>> = Vec::new();
            for j in 0..sigma {
                if j == 0 && m == 1 {
                    continue;
                }
                let e = closed_form_e::<T>(j, m, sigma)?;
                let in_class = e.iter().all(|(o, _)| o.n() % sigma == i);
                if in_class {
                    let full = bm.to_vector(&e);
                    forms.push(cols.iter().map(|&c| full[c].clone()).collect());
                }
            }
            let in_kernel = forms.iter().all(|f| {
                let mut full = vec![T::zero(); bm.generators().len()];
                for (&c, x) in cols.iter().zip(f) {
                    full[c] = x.clone();
                }
                bm.matrix()
                    .mul_vec(&full)
                    .map(|y| y.iter().all(|x| x.is_zero()))
                    .unwrap_or(false)
            });
            let in_span = kernel.iter().all(|v| solve_in_span(&forms, v).is_some());
            out.push(KernelBlockCheck {
                torsion: i,
                winding: m,
                kernel_rank: kernel.len(),
                closed_form_rank: rank_of(&forms),
                closed_forms_in_kernel: in_kernel,
                kernel_in_span: in_span,
            });
        }
    }
    Ok(out)
}

pub fn elliptic_kernel_matches_closed_forms<T: ExactField>(
    sigma: u64,
    max_winding: u64,
    signs: SignConvention,
) -> Result<bool> {
    let bm = BoundaryMatrix::<T>::build(sigma, max_winding, signs)?;
    Ok(elliptic_kernel_checks(&bm)?.iter().all(KernelBlockCheck::ok))
}

/// The scalar `λ` with `[a] = λ[b]` in homology, if `a - λb` is a boundary.
/// Both chains must be cycles of the same block.
pub fn homology_ratio<T: ExactField>(bm: &BoundaryMatrix<T>, a: &Chain<T>, b: &Chain<T>) -> Result<Option<T>> {
    let Some((first, _)) = a.iter().next() else {
        return Ok(Some(T::zero()));
    };
    let class = homology_class(first, bm.sigma());
    let deg = degree(first);
    let pieces = graded_pieces(bm);
    let Some(cols) = pieces.get(&(class, deg)) else {
        return Ok(None);
    };
    let restrict = |c: &Chain<T>| {
        let full = bm.to_vector(c);
        cols.iter().map(|&i| full[i].clone()).collect::<Vec<T>>()
    };
    let mut vectors = vec![restrict(b)];
    if let Some(up) = pieces.get(&(class, deg + 1)) {
        vectors.extend(column_vectors(bm, up, cols));
    }
    Ok(solve_in_span(&vectors, &restrict(a)).map(|x| x[0].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn q(n: i64, d: i64) -> Rat {
        Rat::from_frac(n, d)
    }

    const S: SignConvention = SignConvention::STANDARD;

    #[test]
    fn closed_form_examples() {
        for sigma in 1..4 {
            let e: Chain<Rat> = closed_form_e(0, 2, sigma).unwrap();
            assert_eq!(e, Chain::single(Orbit::elliptic(sigma, 2), q(1, 1)));
        }
        let e: Chain<Rat> = closed_form_e(0, 4, 1).unwrap();
        let want: Chain<Rat> = [
            (Orbit::elliptic(1, 4), q(1, 1)),
            (Orbit::elliptic(2, 4), q(1, 2)),
            (Orbit::elliptic(3, 4), q(1, 1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(e, want);
        let e: Chain<Rat> = closed_form_e(1, 2, 3).unwrap();
        let want: Chain<Rat> = [(Orbit::elliptic(2, 2), q(1, 1)), (Orbit::elliptic(5, 2), q(2, 1))]
            .into_iter()
            .collect();
        assert_eq!(e, want);
        assert!(closed_form_e::<Rat>(0, 1, 2).is_err());
        assert!(closed_form_e::<Rat>(3, 2, 3).is_err());
    }

    #[test]
    fn cycles_small() {
        assert!(verify_cycles::<Rat>(1, 6, S).unwrap());
        assert!(verify_cycles::<Rat>(3, 4, SignConvention::FLIPPED).unwrap());
    }

    #[test]
    fn kernel_blocks() {
        let bm = BoundaryMatrix::<Rat>::build(2, 4, S).unwrap();
        let checks = elliptic_kernel_checks(&bm).unwrap();
        let b = checks.iter().find(|c| c.torsion == 1 && c.winding == 3).unwrap();
        assert_eq!(b.kernel_rank, 1);
        assert!(b.ok());
        assert!(checks.iter().all(KernelBlockCheck::ok));

        let bm = BoundaryMatrix::<Rat>::build(1, 3, S).unwrap();
        let checks = elliptic_kernel_checks(&bm).unwrap();
        let b = checks.iter().find(|c| c.torsion == 0 && c.winding == 2).unwrap();
        assert_eq!((b.kernel_rank, b.closed_form_rank), (1, 1));

        assert!(elliptic_kernel_matches_closed_forms::<Rat>(1, 1, S).unwrap());
        assert!(elliptic_kernel_matches_closed_forms::<Rat>(3, 4, S).unwrap());
        assert!(elliptic_kernel_matches_closed_forms::<Rat>(5, 4, SignConvention::FLIPPED).unwrap());
    }

    #[test]
    fn report_sigma_two() {
        let r = homology_report::<Rat>(2, 4, S).unwrap();
        for m in 1..=3 {
            let key = BlockKey::WindingParity { winding: m, parity: 0 };
            assert_eq!(r.rank(OrbitClass { torsion: 1, free: 0 }, key), 1);
        }
        assert!(r.blocks.iter().all(|b| b.winding <= 3));
        assert!(compare_with_prediction(&r).pass);
    }

    #[test]
    fn report_sigma_one_gradings() {
        let r = homology_report::<Rat>(1, 5, S).unwrap();
        for g in 1..=7 {
            assert_eq!(r.rank(OrbitClass::TRIVIAL, BlockKey::Grading(g)), 1, "grading {g}");
        }
        assert_eq!(r.rank(OrbitClass::TRIVIAL, BlockKey::Grading(0)), 0);
        let h3 = r.block(OrbitClass::TRIVIAL, BlockKey::Grading(5)).unwrap();
        assert_eq!(h3.representatives.len(), 1);
    }

    #[test]
    fn theorem_window_precondition() {
        assert!(matches!(
            verify_theorem::<Rat>(2, 2, S),
            Err(Error::WindowTooSmall { .. })
        ));
        assert!(verify_theorem::<Rat>(3, 3, S).unwrap().pass);
    }

    #[test]
    fn telescoping_small() {
        for m in 1..8 {
            for sigma in 1..4 {
                assert_eq!(telescoping_product::<Rat>(m, sigma).unwrap(), q(1, 1));
            }
        }
    }

    #[test]
    fn hyperbolic_relation_matches_ratio_formula() {
        // [h_{(k-1)σ/m}] = k κ((k-1)σ,m) / ((m+1-k) κ(kσ,m)) · [h_{kσ/m}]
        let sigma = 2;
        let bm = BoundaryMatrix::<Rat>::build(sigma, 6, S).unwrap();
        let h = |k: u64, m: u64| {
            let o = if k == 0 || k == m {
                Orbit::core(m)
            } else {
                Orbit::hyperbolic(k * sigma, m)
            };
            Chain::single(o, q(1, 1))
        };
        for m in 1..=4u64 {
            for k in 1..=m {
                let lam = homology_ratio(&bm, &h(k - 1, m), &h(k, m)).unwrap().unwrap();
                let num = (k * kappa((k - 1) * sigma, m).unwrap()) as i64;
                let den = ((m + 1 - k) * kappa(k * sigma, m).unwrap()) as i64;
                assert_eq!(lam, q(num, den), "m={m} k={k}");
            }
        }
    }
}
