//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisthc::differential::{coefficient_mismatch, BoundaryMatrix, SignConvention};
use twisthc::homology::{
    compare_with_prediction, elliptic_kernel_checks, failing_cycle, homology_report, telescoping_product,
};
use twisthc::localmodel::{
    classify_return_map, flow_y, laurent_classify, orbit_action_profile, return_map, return_map_integrated, rho,
    AsymptoticView, LaurentExponents, ReturnClass, RETURN_MAP_STEP,
};
use twisthc::orbits::{energy, enumerate, mu_bar, parity};
use twisthc::{LocalModelParams64, Rat};

const SIGNS: [SignConvention; 2] = [SignConvention::STANDARD, SignConvention::FLIPPED];

// tolerances and limits
const D2_SIGMAS: [u64; 5] = [1, 2, 3, 5, 8];
const D2_WINDOW: u64 = 40;
const D2_BUDGET: Duration = Duration::from_secs(30);
const TABLE_SIGMAS: [u64; 4] = [1, 2, 3, 5];
const TABLE_WINDOW: u64 = 30;
const CYCLE_WINDOW: u64 = 30;
const CYCLE_MAX_SIGMA: u64 = 5;
const COUNT_WINDOW: u64 = 30;
const TELESCOPE_WINDOW: u64 = 40;
const TELESCOPE_MAX_SIGMA: u64 = 8;
const FLOW_SAMPLES: usize = 1000;
const FLOW_REL_TOL: f64 = 1e-12;
const RETURN_MAP_TOL: f64 = 1e-8;
const RETURN_MAP_MAX_M: u64 = 10;
const ELLIPTIC_MAX_M: u64 = 100;
const LOCAL_BUDGET: Duration = Duration::from_secs(10);
const ACTION_GRID: usize = 10_000;
const ACTION_MAX_M: u64 = 5;
const ENERGY_TOL: f64 = -1e-9;
const ENERGY_WINDOW: u64 = 30;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type LaurentRow = ((i64, i64), Option<(AsymptoticView, AsymptoticView)>);

fn d_squared() -> Outcome {
    let start = Instant::now();
    for sigma in D2_SIGMAS {
        for signs in SIGNS {
            let bm = BoundaryMatrix::<Rat>::build(sigma, D2_WINDOW, signs).map_err(|e| e.to_string())?;
            if let Some((t, s, v)) = bm.d_squared_violation().map_err(|e| e.to_string())? {
                return Err(format!("sigma={sigma} signs={signs:?}: <d^2 {s}, {t}> = {v}"));
            }
        }
    }
    let took = start.elapsed();
    if took > D2_BUDGET {
        return Err(format!("exact, but took {took:.2?} > {D2_BUDGET:?}"));
    }
    Ok(format!("sigma in {D2_SIGMAS:?}, M={D2_WINDOW}, both sign conventions"))
}

fn homology_table() -> Outcome {
    let mut blocks = 0;
    for sigma in TABLE_SIGMAS {
        let ranks: Vec<_> = SIGNS
            .iter()
            .map(|&s| homology_report::<Rat>(sigma, TABLE_WINDOW, s).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        for r in &ranks {
            let check = compare_with_prediction(r);
            if !check.pass {
                return Err(format!("sigma={sigma}: {:?}", check.diffs[0]));
            }
            blocks += check.blocks_checked;
        }
        if ranks[0].rank_table() != ranks[1].rank_table() {
            return Err(format!("sigma={sigma}: rank tables differ between sign conventions"));
        }
    }
    Ok(format!(
        "sigma in {TABLE_SIGMAS:?}, M={TABLE_WINDOW}, {blocks} blocks match"
    ))
}

fn closed_form_cycles() -> Outcome {
    let mut blocks = 0;
    for sigma in 1..=CYCLE_MAX_SIGMA {
        let bm =
            BoundaryMatrix::<Rat>::build(sigma, CYCLE_WINDOW, SignConvention::STANDARD).map_err(|e| e.to_string())?;
        if let Some((i, m, d)) = failing_cycle(&bm).map_err(|e| e.to_string())? {
            return Err(format!("sigma={sigma}: dE_{{{i},{m}}} = {d}"));
        }
        // kernel blocks need winding m+1 present
        let wide = BoundaryMatrix::<Rat>::build(sigma, CYCLE_WINDOW + 1, SignConvention::STANDARD)
            .map_err(|e| e.to_string())?;
        for c in elliptic_kernel_checks(&wide).map_err(|e| e.to_string())? {
            if !c.ok() {
                return Err(format!("sigma={sigma}: {c:?}"));
            }
            blocks += 1;
        }
    }
    Ok(format!(
        "m <= {CYCLE_WINDOW}, sigma <= {CYCLE_MAX_SIGMA}, {blocks} kernel blocks equal span(E)"
    ))
}

fn coefficient_counts() -> Outcome {
    for sigma in D2_SIGMAS {
        for signs in SIGNS {
            let bm = BoundaryMatrix::<Rat>::build(sigma, COUNT_WINDOW, signs).map_err(|e| e.to_string())?;
            if let Some(bad) = coefficient_mismatch(&bm).map_err(|e| e.to_string())? {
                return Err(format!("sigma={sigma}: {bad}"));
            }
        }
    }
    Ok(format!("sigma in {D2_SIGMAS:?}, m <= {COUNT_WINDOW}"))
}

fn grading() -> Outcome {
    let mut graded = 0;
    for sigma in D2_SIGMAS {
        let gens = enumerate(sigma, D2_WINDOW, true).map_err(|e| e.to_string())?;
        let mut min = i64::MAX;
        for o in &gens {
            if let Some(g) = mu_bar(o, sigma) {
                graded += 1;
                min = min.min(g);
                if g.rem_euclid(2) as u8 != parity(o) {
                    return Err(format!("sigma={sigma}: {o} has mu={g}, parity {}", parity(o)));
                }
            }
        }
        if min != 1 {
            return Err(format!("sigma={sigma}: minimum mu = {min}"));
        }
    }
    Ok(format!("{graded} graded generators, min mu = 1"))
}

fn telescoping() -> Outcome {
    let one = Rat::from_integer(1.into());
    for sigma in 1..=TELESCOPE_MAX_SIGMA {
        for m in 1..=TELESCOPE_WINDOW {
            let p = telescoping_product::<Rat>(m, sigma).map_err(|e| e.to_string())?;
            if p != one {
                return Err(format!("sigma={sigma}, m={m}: product {p}"));
            }
        }
    }
    Ok(format!("m <= {TELESCOPE_WINDOW}, sigma <= {TELESCOPE_MAX_SIGMA}"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

fn local_model() -> Outcome {
    let start = Instant::now();
    let c = SQRT_2 - 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..FLOW_SAMPLES {
        let t = rng.gen_range(-10.0..10.0);
        let z = [
            Complex::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0)),
            Complex::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0)),
        ];
        let w = flow_y(t, z, c);
        let errs = [
            rel(rho(&w, c), rho(&z, c)),
            angle_gap(w[0].arg(), z[0].arg()),
            angle_gap(w[1].arg(), z[1].arg()),
        ];
        if errs.iter().any(|&e| e > FLOW_REL_TOL) {
            return Err(format!("flow t={t}: errors {errs:?}"));
        }
    }
    for m in 1..=RETURN_MAP_MAX_M {
        let a = return_map(m, c).map_err(|e| e.to_string())?;
        let b = return_map_integrated(m, c, RETURN_MAP_STEP).map_err(|e| e.to_string())?;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if (a[i][j] - b[i][j]).abs() > RETURN_MAP_TOL {
                return Err(format!("return map m={m} entry ({i},{j}): {} vs {}", a[i][j], b[i][j]));
            }
        }
    }
    for m in 1..=ELLIPTIC_MAX_M {
        let class = classify_return_map(&return_map(m, c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if class != ReturnClass::Elliptic {
            return Err(format!("gamma^{m} is {}", class.name()));
        }
    }
    laurent_table()?;
    let took = start.elapsed();
    if took > LOCAL_BUDGET {
        return Err(format!("correct, but took {took:.2?} > {LOCAL_BUDGET:?}"));
    }
    Ok(format!(
        "{FLOW_SAMPLES} flows, m <= {RETURN_MAP_MAX_M} integrated, m <= {ELLIPTIC_MAX_M} elliptic, 3x3 table"
    ))
}

fn laurent_table() -> Result<(), String> {
    use AsymptoticView::*;
    let c = 1.0;
    // (n1, n2) -> (N view, N-hat view); None where c n1 + n2 <= 0
    let table: [LaurentRow; 9] = [
        ((3, 2), Some((PositiveEnd(3), NegativeEnd(2)))),
        ((3, 0), Some((PositiveEnd(3), Extends { multiplicity: 3 }))),
        ((3, -1), Some((PositiveEnd(3), PositiveEnd(1)))),
        ((0, 2), Some((Extends { multiplicity: 2 }, NegativeEnd(2)))),
        ((0, 0), None),
        ((0, -1), None),
        ((-1, 2), Some((NegativeEnd(1), NegativeEnd(2)))),
        ((-1, 0), None),
        ((-1, -1), None),
    ];
    for ((n1, n2), want) in table {
        let got = laurent_classify(LaurentExponents { n1, n2 }, c)
            .ok()
            .map(|v| (v.n_view, v.n_hat_view));
        if got != want {
            return Err(format!("laurent ({n1},{n2}): got {got:?}, want {want:?}"));
        }
    }
    // the disc correspondence: intersection multiplicity on one side is the end multiplicity on the other
    for n2 in 1..=6 {
        let v = laurent_classify(LaurentExponents { n1: 0, n2 }, c).map_err(|e| e.to_string())?;
        match (v.n_view, v.n_hat_view) {
            (Extends { multiplicity }, NegativeEnd(k)) if multiplicity == k => {}
            other => return Err(format!("pairing (0,{n2}): {other:?}")),
        }
    }
    Ok(())
}

fn action_estimate() -> Outcome {
    let mut families = 0;
    let mut worst = f64::INFINITY;
    for sigma in D2_SIGMAS {
        let params = LocalModelParams64::standard(sigma);
        for m in 1..=ACTION_MAX_M {
            for n in 1..sigma * m {
                let (_, ap) = orbit_action_profile(n, m, &params, ACTION_GRID).map_err(|e| e.to_string())?;
                if !ap.monotone {
                    return Err(format!("sigma={sigma} (n,m)=({n},{m}): step {}", ap.worst_step));
                }
                families += 1;
            }
        }
        let bm =
            BoundaryMatrix::<Rat>::build(sigma, ENERGY_WINDOW, SignConvention::STANDARD).map_err(|e| e.to_string())?;
        for (r, col, _) in bm.matrix().iter() {
            let (lower, upper) = (bm.generators()[r], bm.generators()[col]);
            let e = energy(&lower, &upper, &params).map_err(|e| e.to_string())?;
            worst = worst.min(e);
            if e < ENERGY_TOL {
                return Err(format!("sigma={sigma}: energy({lower}, {upper}) = {e}"));
            }
        }
    }
    Ok(format!(
        "{families} families monotone on {ACTION_GRID} points, min energy {worst:.3e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("d^2 = 0", d_squared),
        ("homology table", homology_table),
        ("closed-form cycles and elliptic kernel", closed_form_cycles),
        ("coefficient/count consistency", coefficient_counts),
        ("grading sanity", grading),
        ("telescoping product", telescoping),
        ("local model", local_model),
        ("action estimate", action_estimate),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{took:.2?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{took:.2?}]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
