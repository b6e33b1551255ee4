//! Report-producing commands behind the `twisthc` binary.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde_json::{json, Map, Value};
use twisthc::differential::{coefficient_mismatch, BoundaryMatrix};
use twisthc::homology::{
    compare_with_prediction, elliptic_kernel_checks, failing_cycle, homology_of, telescoping_product, BlockKey,
    HomologyBlock,
};
use twisthc::localmodel::{
    classify_return_map, det_minus_identity, flow_y, laurent_classify, orbit_action_profile, return_map,
    return_map_integrated, rho, AsymptoticView, LaurentExponents, RETURN_MAP_STEP,
};
use twisthc::orbits::{action, enumerate, homology_class, mu_bar, parity};
use twisthc::{ChainQ, ExactField, LocalModelParams64, Orbit, OrbitClass, Rat, SignConvention};

#[derive(Parser, Debug)]
#[command(name = "twisthc", version, about = "Contact homology of σ-Dehn-twist open books")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the generators with their classes, gradings and actions.
    Generators {
        #[command(flatten)]
        complex: ComplexArgs,
        #[command(flatten)]
        local: LocalArgs,
    },
    /// Compute homology block by block and compare with the predicted table.
    Homology {
        #[command(flatten)]
        complex: ComplexArgs,
    },
    /// Run the invariant suite on one σ.
    Verify {
        #[command(flatten)]
        complex: ComplexArgs,
        /// Add 1 to the entry `<∂SOURCE, TARGET>` before checking, as `TARGET:SOURCE`.
        #[arg(long, hide = true, value_parser = parse_corruption)]
        corrupt: Option<(Orbit, Orbit)>,
    },
    /// Local model near the binding.
    Local {
        #[command(subcommand)]
        command: LocalCommand,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ComplexArgs {
    /// Number of Dehn twists.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub sigma: u64,
    /// Largest winding number around the binding.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_winding: u64,
    /// Sign c₋ of the downward cylinders; c₊ = -c₋.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true, value_parser = parse_sign)]
    pub c_minus: i8,
    /// Also list the binding iterates B^m.
    #[arg(long)]
    pub include_binding: bool,
}

impl ComplexArgs {
    pub fn signs(&self) -> SignConvention {
        SignConvention::from_c_minus(self.c_minus).expect("validated by the parser")
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct LocalArgs {
    /// Rotation constant of the perturbed Reeb field.
    #[arg(long)]
    pub c: Option<f64>,
    /// Tube radius bound.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_tilde: Option<f64>,
    /// Value of K at the hyperbolic point.
    #[arg(long)]
    pub k_core: Option<f64>,
}

impl LocalArgs {
    pub fn params(&self, sigma: u64) -> Result<LocalModelParams64> {
        let mut p = LocalModelParams64::standard(sigma);
        if let Some(c) = self.c {
            p.c = c;
        }
        if let Some(e) = self.epsilon {
            p.epsilon = e;
        }
        if let Some(c0) = self.c0 {
            p.c0 = c0;
            p.k_at_core = c0;
        }
        if let Some(r) = self.r_tilde {
            p.r_tilde = r;
        }
        if let Some(k) = self.k_core {
            p.k_at_core = k;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Subcommand, Debug)]
pub enum LocalCommand {
    /// Flow `Y^t` applied to one point, with the preserved quantities.
    Flow {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// First coordinate as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z1: Complex<f64>,
        /// Second coordinate as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z2: Complex<f64>,
        #[command(flatten)]
        local: LocalArgs,
    },
    /// Linearized return maps of the iterates of the binding orbit.
    ReturnMap {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        m_max: u64,
        /// Also integrate the linearized flow and report the largest deviation.
        #[arg(long)]
        integrate: bool,
        #[command(flatten)]
        local: LocalArgs,
    },
    /// Asymptotics of a punctured disc with vanishing orders (n1, n2), seen from both sides.
    Laurent {
        #[arg(long, allow_hyphen_values = true)]
        n1: i64,
        #[arg(long, allow_hyphen_values = true)]
        n2: i64,
        #[command(flatten)]
        local: LocalArgs,
    },
    /// Action profiles of the torus families on the default K profile.
    Action {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        sigma: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        m_max: u64,
        /// Grid size per family.
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
        points: u64,
        #[command(flatten)]
        local: LocalArgs,
    },
}

fn parse_sign(s: &str) -> Result<i8, String> {
    match s.trim() {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("c₋ must be +1 or -1, got {other}")),
    }
}

fn parse_complex(s: &str) -> Result<Complex<f64>, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}"));
    Ok(Complex::new(p(re)?, p(im)?))
}

fn parse_corruption(s: &str) -> Result<(Orbit, Orbit), String> {
    let (t, src) = s.split_once(':').ok_or("expected TARGET:SOURCE")?;
    let o = |x: &str| x.parse::<Orbit>().map_err(|e| e.to_string());
    Ok((o(t)?, o(src)?))
}

/// A finished command: canonical JSON plus its CSV and text renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub text: String,
    /// False when a check run by the command failed.
    pub ok: bool,
    /// First failure, serialized for the error stream.
    pub failure: Option<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => canonical_json(&self.json),
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }
}

/// Pretty-printed with sorted keys and a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// `"p/q"`, always with a denominator.
pub fn rational(x: &Rat) -> Value {
    let (n, d) = x.parts();
    Value::String(format!("{n}/{d}"))
}

/// Rounded to 12 significant digits.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(r)
}

fn real_text(x: f64) -> String {
    match real(x) {
        Value::Number(n) => n.to_string(),
        _ => "nan".into(),
    }
}

fn signs_json(s: SignConvention) -> Value {
    json!({ "c_minus": s.c_minus(), "c_plus": s.c_plus() })
}

fn class_json(c: OrbitClass) -> Value {
    json!({ "torsion": c.torsion, "free": c.free })
}

fn chain_json(c: &ChainQ) -> Value {
    Value::Array(
        c.iter()
            .map(|(o, k)| json!({ "orbit": o.to_string(), "coefficient": rational(k) }))
            .collect(),
    )
}

fn chain_text(c: &ChainQ) -> String {
    c.iter()
        .map(|(o, k)| format!("{} {o}", k))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_table(header: &[&str], rows: &[Value]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = header.iter().map(|h| csv_cell(&r[*h])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Generators { complex, local } => generators(complex, local),
        Command::Homology { complex } => homology(complex),
        Command::Verify { complex, corrupt } => verify(complex, *corrupt),
        Command::Local { command } => match command {
            LocalCommand::Flow { t, z1, z2, local } => local_flow(*t, [*z1, *z2], local),
            LocalCommand::ReturnMap {
                m_max,
                integrate,
                local,
            } => local_return_map(*m_max, *integrate, local),
            LocalCommand::Laurent { n1, n2, local } => local_laurent(*n1, *n2, local),
            LocalCommand::Action {
                sigma,
                m_max,
                points,
                local,
            } => local_action(*sigma, *m_max, *points as usize, local),
        },
    }
}

pub fn generators(args: &ComplexArgs, local: &LocalArgs) -> Result<Report> {
    let sigma = args.sigma;
    let params = local.params(sigma)?;
    let gens = enumerate(sigma, args.max_winding, args.include_binding)?;
    let mut rows = Vec::with_capacity(gens.len());
    let mut text = format!(
        "{} generators, sigma={sigma}, winding <= {}\n",
        gens.len(),
        args.max_winding
    );
    for o in &gens {
        let class = homology_class(o, sigma);
        let mu = mu_bar(o, sigma);
        let a = action(o, &params).with_context(|| format!("action of {o}"))?;
        rows.push(json!({
            "orbit": o.to_string(),
            "kind": o.kind().name(),
            "n": o.n(),
            "m": o.winding(),
            "class_torsion": class.torsion,
            "class_free": class.free,
            "parity": parity(o),
            "mu_bar": mu,
            "action": real(a),
        }));
        let mu = mu.map_or_else(|| "-".to_string(), |g| g.to_string());
        let _ = writeln!(
            text,
            "{:<10} class=({},{}) parity={} mu={:<4} action={}",
            o.to_string(),
            class.torsion,
            class.free,
            parity(o),
            mu,
            real_text(a)
        );
    }
    let csv = csv_table(
        &[
            "orbit",
            "kind",
            "n",
            "m",
            "class_torsion",
            "class_free",
            "parity",
            "mu_bar",
            "action",
        ],
        &rows,
    );
    let json = json!({
        "command": "generators",
        "sigma": sigma,
        "max_winding": args.max_winding,
        "include_binding": args.include_binding,
        "generators": rows,
    });
    Ok(Report {
        json,
        csv,
        text,
        ok: true,
        failure: None,
    })
}

fn key_parts(key: BlockKey) -> (i64, u8, Value) {
    match key {
        BlockKey::Grading(g) => (g, g.rem_euclid(2) as u8, json!({ "grading": g })),
        BlockKey::WindingParity { winding, parity } => {
            (winding as i64, parity, json!({ "winding": winding, "parity": parity }))
        }
    }
}

fn block_json(b: &HomologyBlock<Rat>) -> Value {
    let (_, _, key) = key_parts(b.key);
    json!({
        "class": class_json(b.class),
        "key": key,
        "generators": b.generators.len(),
        "kernel": b.kernel_rank,
        "image": b.image_rank,
        "homology": b.homology_rank,
        "representatives": b.representatives.iter().map(chain_json).collect::<Vec<_>>(),
    })
}

pub fn homology(args: &ComplexArgs) -> Result<Report> {
    if args.max_winding < 3 {
        bail!("homology needs --max-winding >= 3, got {}", args.max_winding);
    }
    let bm = BoundaryMatrix::<Rat>::build(args.sigma, args.max_winding, args.signs())?;
    let report = homology_of(&bm)?;
    let check = compare_with_prediction(&report);

    let mut text = format!(
        "sigma={} M={} window: winding <= {} signs=({:+},{:+})\n",
        report.sigma,
        report.max_winding,
        report.safe_window,
        args.signs().c_minus(),
        args.signs().c_plus()
    );
    let mut csv = String::from("class_torsion,grading_or_winding,parity,kernel,image,homology\n");
    for b in &report.blocks {
        let (gw, p, _) = key_parts(b.key);
        let _ = writeln!(
            csv,
            "{},{gw},{p},{},{},{}",
            b.class.torsion, b.kernel_rank, b.image_rank, b.homology_rank
        );
        if b.homology_rank > 0 {
            let reps: Vec<String> = b.representatives.iter().map(chain_text).collect();
            let _ = writeln!(
                text,
                "class {} {:<12} rank {}  [{}]",
                b.class.torsion,
                b.key.to_string(),
                b.homology_rank,
                reps.join("; ")
            );
        }
    }
    let diffs: Vec<Value> = check
        .diffs
        .iter()
        .map(|d| {
            let (_, _, key) = key_parts(d.key);
            json!({ "class": class_json(d.class), "key": key, "expected": d.expected, "found": d.found })
        })
        .collect();
    let verdict = if check.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        text,
        "{verdict}: {} blocks against the predicted table",
        check.blocks_checked
    );
    let failure = check.diffs.first().map(|d| {
        format!(
            "class {} {}: expected rank {}, found {}",
            d.class.torsion, d.key, d.expected, d.found
        )
    });
    let json = json!({
        "command": "homology",
        "sigma": report.sigma,
        "max_winding": report.max_winding,
        "safe_window": report.safe_window,
        "signs": signs_json(report.signs),
        "blocks": report.blocks.iter().map(block_json).collect::<Vec<_>>(),
        "verdict": { "pass": check.pass, "blocks_checked": check.blocks_checked, "diffs": diffs },
    });
    Ok(Report {
        json,
        csv,
        text,
        ok: check.pass,
        failure,
    })
}

struct CheckLine {
    name: &'static str,
    pass: bool,
    detail: String,
    counterexample: Value,
}

impl CheckLine {
    fn passed(name: &'static str, detail: String) -> Self {
        Self {
            name,
            pass: true,
            detail,
            counterexample: Value::Null,
        }
    }

    fn failed(name: &'static str, detail: String, counterexample: Value) -> Self {
        Self {
            name,
            pass: false,
            detail,
            counterexample,
        }
    }
}

fn matrices(args: &ComplexArgs, corrupt: Option<(Orbit, Orbit)>) -> Result<Vec<BoundaryMatrix<Rat>>> {
    [SignConvention::STANDARD, SignConvention::FLIPPED]
        .into_iter()
        .map(|s| {
            let mut bm = BoundaryMatrix::<Rat>::build(args.sigma, args.max_winding, s)?;
            if let Some((t, src)) = corrupt {
                bm.perturb_entry(&t, &src, Rat::from_int(1))
                    .with_context(|| format!("cannot corrupt <∂{src}, {t}>"))?;
            }
            Ok(bm)
        })
        .collect()
}

fn sign_label(s: SignConvention) -> String {
    format!("({:+},{:+})", s.c_minus(), s.c_plus())
}

fn verify_checks(args: &ComplexArgs, corrupt: Option<(Orbit, Orbit)>) -> Result<Vec<CheckLine>> {
    let sigma = args.sigma;
    let mats = matrices(args, corrupt)?;
    let mut out = Vec::new();

    let mut line = CheckLine::passed("d_squared", "both sign conventions".into());
    for bm in &mats {
        if let Some((t, s, v)) = bm.d_squared_violation()? {
            line = CheckLine::failed(
                "d_squared",
                format!("<∂∂{s}, {t}> = {v} with signs {}", sign_label(bm.signs())),
                json!({ "source": s.to_string(), "target": t.to_string(), "value": rational(&v) }),
            );
            break;
        }
    }
    out.push(line);

    let mut line = CheckLine::passed("coefficients", "every entry equals its signed cylinder count".into());
    for bm in &mats {
        if let Some(bad) = coefficient_mismatch(bm)? {
            line = CheckLine::failed(
                "coefficients",
                bad.to_string(),
                json!({
                    "upper": bad.upper.to_string(),
                    "lower": bad.lower.to_string(),
                    "found": rational(&bad.found),
                    "expected": rational(&bad.expected),
                }),
            );
            break;
        }
    }
    out.push(line);

    let mut line = CheckLine::passed("cycles", "∂E_{i,m} = 0".into());
    for bm in &mats {
        if let Some((i, m, d)) = failing_cycle(bm)? {
            line = CheckLine::failed(
                "cycles",
                format!("∂E_{{{i},{m}}} = {d}"),
                json!({ "i": i, "m": m, "boundary": chain_json(&d) }),
            );
            break;
        }
    }
    out.push(line);

    let mut line = CheckLine::passed("elliptic_kernel", "kernel = span of closed forms".into());
    'outer: for bm in &mats {
        for c in elliptic_kernel_checks(bm)? {
            if !c.ok() {
                line = CheckLine::failed(
                    "elliptic_kernel",
                    format!("class {} winding {}: {c:?}", c.torsion, c.winding),
                    json!({
                        "torsion": c.torsion,
                        "winding": c.winding,
                        "kernel_rank": c.kernel_rank,
                        "closed_form_rank": c.closed_form_rank,
                    }),
                );
                break 'outer;
            }
        }
    }
    out.push(line);

    let mut line = CheckLine::passed("grading", "min mu = 1, mu = parity mod 2".into());
    let gens = enumerate(sigma, args.max_winding, true)?;
    let graded: Vec<(Orbit, i64)> = gens.iter().filter_map(|o| mu_bar(o, sigma).map(|g| (*o, g))).collect();
    if let Some((o, g)) = graded
        .iter()
        .find(|(o, g)| *g < 1 || g.rem_euclid(2) as u8 != parity(o))
    {
        line = CheckLine::failed(
            "grading",
            format!("{o}: mu={g}, parity={}", parity(o)),
            json!({ "orbit": o.to_string(), "mu_bar": g }),
        );
    }
    out.push(line);

    let mut line = CheckLine::passed("telescoping", "product = 1".into());
    for m in 1..=args.max_winding {
        let p = telescoping_product::<Rat>(m, sigma)?;
        if p != Rat::from_int(1) {
            line = CheckLine::failed(
                "telescoping",
                format!("m={m}: {p}"),
                json!({ "m": m, "product": rational(&p) }),
            );
            break;
        }
    }
    out.push(line);

    if args.max_winding >= 3 {
        let reports = mats.iter().map(homology_of).collect::<twisthc::Result<Vec<_>>>()?;
        let mut line = CheckLine::passed("homology", "predicted table".into());
        for r in &reports {
            let check = compare_with_prediction(r);
            if let Some(d) = check.diffs.first() {
                line = CheckLine::failed(
                    "homology",
                    format!(
                        "class {} {}: expected {}, found {}",
                        d.class.torsion, d.key, d.expected, d.found
                    ),
                    json!({ "class_torsion": d.class.torsion, "key": d.key.to_string(), "expected": d.expected, "found": d.found }),
                );
                break;
            }
        }
        out.push(line);
        let same = reports[0].rank_table() == reports[1].rank_table();
        out.push(if same {
            CheckLine::passed("sign_independence", "identical rank tables".into())
        } else {
            CheckLine::failed("sign_independence", "rank tables differ".into(), Value::Null)
        });
    }
    Ok(out)
}

pub fn verify(args: &ComplexArgs, corrupt: Option<(Orbit, Orbit)>) -> Result<Report> {
    let checks = verify_checks(args, corrupt)?;
    let ok = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    let mut rows = Vec::new();
    for c in &checks {
        let _ = writeln!(
            text,
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        rows.push(json!({ "check": c.name, "pass": c.pass, "detail": c.detail, "counterexample": c.counterexample }));
    }
    let failure = checks.iter().find(|c| !c.pass).map(|c| {
        format!(
            "{} failed: {} {}",
            c.name,
            c.detail,
            serde_json::to_string(&c.counterexample).unwrap_or_default()
        )
    });
    let csv = csv_table(&["check", "pass", "detail"], &rows);
    let json = json!({
        "command": "verify",
        "sigma": args.sigma,
        "max_winding": args.max_winding,
        "pass": ok,
        "checks": rows,
    });
    Ok(Report {
        json,
        csv,
        text,
        ok,
        failure,
    })
}

fn complex_json(z: Complex<f64>) -> Value {
    json!([real(z.re), real(z.im)])
}

pub fn local_flow(t: f64, z: [Complex<f64>; 2], local: &LocalArgs) -> Result<Report> {
    let c = local.params(1)?.c;
    let w = flow_y(t, z, c);
    let (r0, r1) = (rho(&z, c), rho(&w, c));
    let rel = if r0 == 0.0 {
        (r1 - r0).abs()
    } else {
        ((r1 - r0) / r0).abs()
    };
    let row = json!({
        "t": real(t),
        "c": real(c),
        "z": [complex_json(z[0]), complex_json(z[1])],
        "image": [complex_json(w[0]), complex_json(w[1])],
        "rho_before": real(r0),
        "rho_after": real(r1),
        "rho_rel_error": real(rel),
    });
    let text = format!(
        "Y^{t}({}, {}) = ({}, {})\nrho {} -> {} (relative change {})\n",
        z[0],
        z[1],
        w[0],
        w[1],
        real_text(r0),
        real_text(r1),
        real_text(rel)
    );
    let mut csv = String::from("t,z1_re,z1_im,z2_re,z2_im,w1_re,w1_im,w2_re,w2_im,rho_before,rho_after\n");
    let cells: Vec<String> = [
        t, z[0].re, z[0].im, z[1].re, z[1].im, w[0].re, w[0].im, w[1].re, w[1].im, r0, r1,
    ]
    .iter()
    .map(|&x| real_text(x))
    .collect();
    csv.push_str(&cells.join(","));
    csv.push('\n');
    let mut json = Map::new();
    json.insert("command".into(), json!("local flow"));
    json.insert("flow".into(), row);
    Ok(Report {
        json: Value::Object(json),
        csv,
        text,
        ok: true,
        failure: None,
    })
}

pub fn local_return_map(m_max: u64, integrate: bool, local: &LocalArgs) -> Result<Report> {
    let c = local.params(1)?.c;
    let mut rows = Vec::new();
    let mut text = format!("return maps of gamma^m, c = {}\n", real_text(c));
    for m in 1..=m_max {
        let a = return_map(m, c)?;
        let class = classify_return_map(&a)?;
        let deviation = if integrate {
            let b = return_map_integrated(m, c, RETURN_MAP_STEP)?;
            let d = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| (a[i][j] - b[i][j]).abs())
                .fold(0.0, f64::max);
            real(d)
        } else {
            Value::Null
        };
        let angle = (4.0 * m as f64 * c * std::f64::consts::PI).rem_euclid(std::f64::consts::TAU);
        rows.push(json!({
            "m": m,
            "angle": real(angle),
            "a11": real(a[0][0]), "a12": real(a[0][1]), "a21": real(a[1][0]), "a22": real(a[1][1]),
            "trace": real(a[0][0] + a[1][1]),
            "det_minus_id": real(det_minus_identity(&a)),
            "class": class.name(),
            "integration_deviation": deviation,
        }));
        let _ = write!(
            text,
            "m={m:<4} trace={:<16} {}",
            real_text(a[0][0] + a[1][1]),
            class.name()
        );
        if let Some(d) = deviation.as_f64() {
            let _ = write!(text, "   rk4 deviation {}", real_text(d));
        }
        text.push('\n');
    }
    let csv = csv_table(
        &[
            "m",
            "angle",
            "a11",
            "a12",
            "a21",
            "a22",
            "trace",
            "det_minus_id",
            "class",
            "integration_deviation",
        ],
        &rows,
    );
    let json = json!({ "command": "local return-map", "c": real(c), "rows": rows });
    Ok(Report {
        json,
        csv,
        text,
        ok: true,
        failure: None,
    })
}

fn view_json(v: AsymptoticView) -> Value {
    match v {
        AsymptoticView::PositiveEnd(k) => json!({ "kind": "positive_end", "multiplicity": k }),
        AsymptoticView::NegativeEnd(k) => json!({ "kind": "negative_end", "multiplicity": k }),
        AsymptoticView::Extends { multiplicity } => json!({ "kind": "extends", "multiplicity": multiplicity }),
    }
}

pub fn local_laurent(n1: i64, n2: i64, local: &LocalArgs) -> Result<Report> {
    let c = local.params(1)?.c;
    let views = laurent_classify(LaurentExponents { n1, n2 }, c)
        .with_context(|| format!("(n1, n2) = ({n1}, {n2}) with c = {c}"))?;
    let row = json!({
        "n1": n1,
        "n2": n2,
        "n_view": view_json(views.n_view),
        "n_hat_view": view_json(views.n_hat_view),
    });
    let text = format!(
        "(n1, n2) = ({n1}, {n2})\n  N view: {}\n  N-hat view: {}\n",
        views.n_view, views.n_hat_view
    );
    let csv = format!(
        "n1,n2,n_view,n_view_multiplicity,n_hat_view,n_hat_view_multiplicity\n{n1},{n2},{},{},{},{}\n",
        row["n_view"]["kind"].as_str().unwrap_or_default(),
        row["n_view"]["multiplicity"],
        row["n_hat_view"]["kind"].as_str().unwrap_or_default(),
        row["n_hat_view"]["multiplicity"],
    );
    let json = json!({ "command": "local laurent", "c": real(c), "views": row });
    Ok(Report {
        json,
        csv,
        text,
        ok: true,
        failure: None,
    })
}

pub fn local_action(sigma: u64, m_max: u64, points: usize, local: &LocalArgs) -> Result<Report> {
    let params = local.params(sigma)?;
    let mut rows = Vec::new();
    let mut text = format!("action profiles, sigma={sigma}, {points} grid points per family\n");
    let mut ok = true;
    let mut failure = None;
    for m in 1..=m_max {
        for n in 1..sigma * m {
            let (torus, ap) = orbit_action_profile(n, m, &params, points)?;
            if !ap.monotone && failure.is_none() {
                failure = Some(format!("(n,m)=({n},{m}): action not monotone, step {}", ap.worst_step));
            }
            ok &= ap.monotone;
            rows.push(json!({
                "n": n,
                "m": m,
                "n_chart": torus.n_chart,
                "q_o": real(torus.q_o),
                "action": real(torus.action),
                "monotone": ap.monotone,
                "worst_step": real(ap.worst_step),
            }));
            let _ = writeln!(
                text,
                "(n,m)=({n},{m}) q_o={} A={} {}",
                real_text(torus.q_o),
                real_text(torus.action),
                if ap.monotone { "monotone" } else { "NOT monotone" }
            );
        }
    }
    let _ = writeln!(text, "{}", if ok { "PASS" } else { "FAIL" });
    let csv = csv_table(&["n", "m", "n_chart", "q_o", "action", "monotone", "worst_step"], &rows);
    let json = json!({ "command": "local action", "sigma": sigma, "points": points, "pass": ok, "rows": rows });
    Ok(Report {
        json,
        csv,
        text,
        ok,
        failure,
    })
}
