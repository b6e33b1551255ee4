//! Homology against a brute-force dense computation, and the closed-form
//! cycles against an independent evaluation.

use num_traits::{One, Zero};
use proptest::prelude::*;
use twisthc::homology::{
    closed_form_e, elliptic_kernel_checks, homology_of, homology_ratio, homology_report, telescoping_product,
    verify_theorem, BlockKey,
};
use twisthc::orbits::OrbitKind;
use twisthc::{kappa, BoundaryMatrixQ, Chain, ChainQ, ExactField, Orbit, OrbitClass, Rat, SignConvention};

const S: SignConvention = SignConvention::STANDARD;

fn q(n: i64, d: i64) -> Rat {
    Rat::from_frac(n, d)
}

fn dense_rank(mut a: Vec<Vec<Rat>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x = &*x - &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Total homology of the subcomplex spanned by generators of winding `≤ M - 1`
/// that survive (cycles of winding `≤ M - 1` modulo all boundaries).
fn brute_force_total(sigma: u64, m_max: u64) -> usize {
    let bm = BoundaryMatrixQ::build(sigma, m_max, S).unwrap();
    let dense = bm.matrix().to_dense();
    let gens = bm.generators();
    let low: Vec<usize> = (0..gens.len()).filter(|&i| gens[i].winding() < m_max).collect();
    // dim ker restricted to low generators
    let ker = low.len()
        - dense_rank(
            dense
                .iter()
                .map(|row| low.iter().map(|&j| row[j].clone()).collect())
                .collect(),
        );
    // boundaries land in windings ≤ M - 1 automatically
    let im = dense_rank(dense.clone());
    ker - im
}

fn predicted_total(sigma: u64, m_max: u64) -> usize {
    let w = (m_max - 1) as usize;
    w + (w - 1) + (sigma as usize - 1) * w
}

#[test]
fn total_rank_matches_brute_force() {
    for sigma in 1..=4 {
        for m_max in 2..=6 {
            let total: usize = homology_report::<Rat>(sigma, m_max, S)
                .unwrap()
                .blocks
                .iter()
                .map(|b| b.homology_rank)
                .sum();
            let brute = brute_force_total(sigma, m_max);
            assert_eq!(total, brute, "sigma={sigma} M={m_max}");
            assert_eq!(total, predicted_total(sigma, m_max), "sigma={sigma} M={m_max}");
        }
    }
}

/// `E_{i,m}` evaluated term by term from the product formula.
fn oracle_e(i: u64, m: u64, sigma: u64) -> ChainQ {
    let mut c = Chain::zero();
    if i == 0 {
        for k in 1..m {
            let p: Rat = (1..k).map(|j| q(j as i64, (m - j - 1) as i64)).product();
            c.add_term(Orbit::elliptic(k * sigma, m), p);
        }
    } else if m == 1 {
        c.add_term(Orbit::elliptic(i, 1), Rat::one());
    } else {
        for k in 1..=m {
            let p: Rat = (1..k)
                .map(|j| q((j * sigma - i) as i64, ((m - j - 1) * sigma + i) as i64))
                .product();
            c.add_term(Orbit::elliptic(k * sigma - i, m), p);
        }
    }
    c
}

#[test]
fn closed_forms_match_product_formula() {
    for sigma in 1..=6 {
        for m in 1..=12 {
            for i in 0..sigma {
                if i == 0 && m == 1 {
                    continue;
                }
                assert_eq!(
                    closed_form_e::<Rat>(i, m, sigma).unwrap(),
                    oracle_e(i, m, sigma),
                    "E_{i},{m} sigma={sigma}"
                );
            }
        }
    }
}

#[test]
fn worked_closed_forms() {
    let e: ChainQ = closed_form_e(0, 4, 1).unwrap();
    let want: ChainQ = [
        (Orbit::elliptic(1, 4), q(1, 1)),
        (Orbit::elliptic(2, 4), q(1, 2)),
        (Orbit::elliptic(3, 4), q(1, 1)),
    ]
    .into_iter()
    .collect();
    assert_eq!(e, want);
    let e: ChainQ = closed_form_e(1, 2, 3).unwrap();
    let want: ChainQ = [(Orbit::elliptic(2, 2), q(1, 1)), (Orbit::elliptic(5, 2), q(2, 1))]
        .into_iter()
        .collect();
    assert_eq!(e, want);
}

#[test]
fn worked_homology_tables() {
    let r = homology_report::<Rat>(1, 5, S).unwrap();
    let ranks: Vec<usize> = (1..=7)
        .map(|g| r.rank(OrbitClass::TRIVIAL, BlockKey::Grading(g)))
        .collect();
    assert_eq!(ranks, vec![1; 7]);

    let r = homology_report::<Rat>(3, 3, S).unwrap();
    for t in 1..3 {
        for m in 1..=2 {
            let key = BlockKey::WindingParity { winding: m, parity: 0 };
            assert_eq!(r.rank(OrbitClass { torsion: t, free: 0 }, key), 1);
        }
    }
    assert!(verify_theorem::<Rat>(1, 30, S).unwrap().pass);
    assert!(verify_theorem::<Rat>(5, 20, S).unwrap().pass);
}

#[test]
fn hyperbolics_are_cycles_and_ellipticals_meet_no_boundary() {
    for sigma in 1..=4 {
        let bm = BoundaryMatrixQ::build(sigma, 8, S).unwrap();
        for (j, o) in bm.generators().iter().enumerate() {
            if !o.is_elliptic() {
                assert!(bm.matrix().iter().all(|(_, c, _)| c != j), "{o} has a boundary");
            }
        }
        // image of ∂ lies in the hyperbolic span
        for (r, _, _) in bm.matrix().iter() {
            assert!(!bm.generators()[r].is_elliptic());
        }
    }
}

#[test]
fn representatives_are_cycles_of_their_block() {
    for sigma in 1..=3 {
        let bm = BoundaryMatrixQ::build(sigma, 7, S).unwrap();
        let r = homology_of(&bm).unwrap();
        for b in &r.blocks {
            for rep in &b.representatives {
                assert!(bm.apply(rep).unwrap().is_zero());
                assert!(rep.iter().all(|(o, _)| b.generators.contains(o)));
            }
        }
    }
}

#[test]
fn kernel_blocks_use_closed_forms_of_their_class() {
    let bm = BoundaryMatrixQ::build(4, 6, S).unwrap();
    let checks = elliptic_kernel_checks(&bm).unwrap();
    assert!(checks.iter().all(|c| c.ok()));
    assert_eq!(checks.len(), 4 * 5);
    for c in &checks {
        let want = usize::from(!(c.torsion == 0 && c.winding == 1));
        assert_eq!((c.kernel_rank, c.closed_form_rank), (want, want));
    }
}

#[test]
fn hyperbolic_classes_scale_to_the_core() {
    for sigma in 1..=3 {
        let bm = BoundaryMatrixQ::build(sigma, 6, S).unwrap();
        for m in 1..=4u64 {
            let h = |k: u64| {
                let o = if k == 0 || k == m {
                    Orbit::core(m)
                } else {
                    Orbit::hyperbolic(k * sigma, m)
                };
                Chain::single(o, Rat::one())
            };
            let mut product = Rat::one();
            for k in 1..=m {
                let lam = homology_ratio(&bm, &h(k - 1), &h(k)).unwrap().expect("homologous");
                let num = (k * kappa((k - 1) * sigma, m).unwrap()) as i64;
                let den = ((m + 1 - k) * kappa(k * sigma, m).unwrap()) as i64;
                assert_eq!(lam, q(num, den));
                product *= lam;
            }
            assert_eq!(product, Rat::one());
        }
    }
}

#[test]
fn hyperbolics_off_the_trivial_class_are_boundaries() {
    let bm = BoundaryMatrixQ::build(3, 6, S).unwrap();
    let zero = Chain::zero();
    for o in bm.generators() {
        if o.kind() == OrbitKind::HyperbolicT && o.n() % 3 != 0 && o.winding() < 6 {
            let lam = homology_ratio(&bm, &Chain::single(*o, Rat::one()), &zero).unwrap();
            assert!(lam.is_some(), "{o} is not a boundary");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ranks_do_not_depend_on_signs(sigma in 1u64..6, m_max in 2u64..10) {
        let a = homology_report::<Rat>(sigma, m_max, SignConvention::STANDARD).unwrap();
        let b = homology_report::<Rat>(sigma, m_max, SignConvention::FLIPPED).unwrap();
        prop_assert_eq!(a.rank_table(), b.rank_table());
    }

    #[test]
    fn nothing_at_nonpositive_grading(sigma in 1u64..6, m_max in 2u64..10) {
        let r = homology_report::<Rat>(sigma, m_max, S).unwrap();
        for b in &r.blocks {
            if let BlockKey::Grading(g) = b.key {
                prop_assert!(g >= 1 || b.homology_rank == 0);
            }
        }
    }

    #[test]
    fn telescoping_is_one(m in 1u64..60, sigma in 1u64..12) {
        prop_assert_eq!(telescoping_product::<Rat>(m, sigma).unwrap(), Rat::one());
    }
}
