//! One function per subcommand, each producing a JSON report.

use std::time::Instant;

use carpet_core::chamanara::{baker, canonicalize, check_semiconjugacy, Direction};
use carpet_core::entropy::{
    bernoulli_report, factor_chain, identity_estimate, realize_entropy, shift_estimate, toral_estimate, toral_report,
    EntropyReport,
};
use carpet_core::hyperlocal::{
    excursion_stats, sample_excursions, verify_half_bound, ExcursionStats, HypLinear, RegionSpec, Variant,
};
use carpet_core::invlim::{ball, falsify, zip, Atlas};
use carpet_core::plot::{self, PlotData, PlotKind};
use carpet_core::quotient::{branch_catalog, canonicalize_q, induced_apply};
use carpet_core::rational::{fmt_q, parse_pair, parse_q, to_f64, Q};
use carpet_core::symbolic::enumerate_eventually_periodic;
use carpet_core::toral::periodic_points;
use carpet_core::{verify, CnPoint, Error, ProbabilityVector, Result, ToralAuto, TorusPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::Outcome;
use crate::{
    BlowArg, ChamanaraArgs, Cli, Command, EntropyArgs, HyperlocalArgs, InvlimArgs, PlotArgs, PlotKindArg, QuotientArgs,
    SystemArg, ToralArgs, VariantArg, VerifyArgs,
};

/// Orbit length cap for JSON dumps.
const MAX_STEPS: u64 = 100_000;

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Chamanara(a) => chamanara(a),
        Command::Quotient(a) => quotient(a),
        Command::Toral(a) => toral(a),
        Command::Hyperlocal(a) => hyperlocal(a),
        Command::Entropy(a) => entropy(a),
        Command::Invlim(a) => invlim(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Plot(a) => plot_cmd(a),
    }
}

fn ok(report: Value) -> Outcome {
    Outcome {
        passed: true,
        report,
        svg: None,
    }
}

fn check_steps(steps: i64) -> Result<()> {
    if steps.unsigned_abs() > MAX_STEPS {
        return Err(Error::ResourceCap(format!("at most {MAX_STEPS} steps")));
    }
    Ok(())
}

fn cn_json(z: &CnPoint) -> Value {
    json!({ "x": fmt_q(&z.x), "y": fmt_q(&z.y), "kind": z.kind, "class": z.to_string() })
}

fn pv_json(p: &ProbabilityVector) -> Value {
    json!(p.entries().iter().map(fmt_q).collect::<Vec<_>>())
}

fn baker_orbit(n: u32, start: &str, steps: i64) -> Result<Vec<CnPoint>> {
    check_steps(steps)?;
    let (x, y) = parse_pair(start)?;
    let mut z = canonicalize(n, &x, &y)?;
    let dir = if steps >= 0 {
        Direction::Forward
    } else {
        Direction::Inverse
    };
    let mut out = vec![z.clone()];
    for _ in 0..steps.unsigned_abs() {
        z = baker(&z, dir);
        out.push(z.clone());
    }
    Ok(out)
}

fn chamanara(a: &ChamanaraArgs) -> Result<Outcome> {
    let mut report = json!({ "base": a.base });
    let mut passed = true;
    let mut svg = None;
    if let Some(start) = &a.orbit {
        let orbit = baker_orbit(a.base, start, a.steps)?;
        let pts: Vec<(f64, f64)> = orbit.iter().map(|z| z.to_f64()).collect();
        svg = Some(plot::orbit_svg(&pts, &format!("baker orbit n={}", a.base)));
        report["orbit"] = json!(orbit.iter().map(cn_json).collect::<Vec<_>>());
    }
    if a.check_semiconj {
        if a.base < 2 {
            return Err(Error::BadBase(a.base));
        }
        if a.period_max == 0 || a.period_max > 9 {
            return Err(Error::Invalid("--period-max must lie in 1..=9".into()));
        }
        let seqs = enumerate_eventually_periodic(a.base, a.period_max);
        let fails: Vec<String> = seqs
            .par_iter()
            .filter(|s| !check_semiconjugacy(s).holds)
            .map(|s| serde_json::to_string(s).unwrap_or_default())
            .collect();
        passed = fails.is_empty();
        report["semiconjugacy"] = json!({
            "max_digits": a.period_max,
            "cases": seqs.len(),
            "failures": fails.len(),
            "witnesses": fails.iter().take(5).collect::<Vec<_>>(),
        });
    }
    if a.orbit.is_none() && !a.check_semiconj {
        svg = Some(plot::identification_svg(a.base, 4)?);
    }
    Ok(Outcome { passed, report, svg })
}

fn quotient(a: &QuotientArgs) -> Result<Outcome> {
    let mut report = json!({ "base": a.base });
    if let Some(start) = &a.orbit {
        check_steps(a.steps)?;
        let (x, y) = parse_pair(start)?;
        let mut p = canonicalize_q(&canonicalize(a.base, &x, &y)?);
        let dir = if a.steps >= 0 {
            Direction::Forward
        } else {
            Direction::Inverse
        };
        let mut orbit = vec![p.clone()];
        for _ in 0..a.steps.unsigned_abs() {
            p = induced_apply(&p, dir)?;
            orbit.push(p.clone());
        }
        report["orbit"] = json!(orbit
            .iter()
            .map(|p| json!({ "rep": cn_json(&p.rep), "branch": p.branch }))
            .collect::<Vec<_>>());
    }
    if let Some(depth) = a.branch_depth {
        let cat = branch_catalog(a.base, depth)?;
        report["branch_catalog"] = json!(cat
            .iter()
            .map(|e| json!({ "label": e.label, "x": fmt_q(&e.x), "y": fmt_q(&e.y), "class": e.point.to_string() }))
            .collect::<Vec<_>>());
    }
    let svg = Some(plot::quotient_svg(a.base, a.branch_depth.unwrap_or(4).clamp(1, 12))?);
    Ok(Outcome {
        passed: true,
        report,
        svg,
    })
}

fn toral(a: &ToralArgs) -> Result<Outcome> {
    let m = ToralAuto::parse(&a.matrix)?;
    let mut report = json!({
        "matrix": m.m,
        "trace": m.trace(),
        "det": m.det(),
        "leading_eigenvalue": m.leading_eigenvalue().to_string(),
        "entropy": m.entropy(),
    });
    let mut svg = None;
    if let Some(start) = &a.orbit {
        check_steps(a.steps)?;
        let (x, y) = parse_pair(start)?;
        let mut z = TorusPoint::new(x, y);
        let step = if a.steps >= 0 {
            carpet_core::toral::Step::Forward
        } else {
            carpet_core::toral::Step::Inverse
        };
        let mut orbit = vec![z.clone()];
        for _ in 0..a.steps.unsigned_abs() {
            z = m.apply(&z, step);
            orbit.push(z.clone());
        }
        let pts: Vec<(f64, f64)> = orbit.iter().map(|z| z.to_f64()).collect();
        svg = Some(plot::orbit_svg(&pts, "toral orbit"));
        report["orbit"] = json!(orbit.iter().map(|z| z.to_string()).collect::<Vec<_>>());
    }
    if let Some(qd) = a.periodic {
        let orbits = periodic_points(&m, qd)?;
        report["periodic"] = json!({
            "denominator": qd,
            "orbits": orbits
                .iter()
                .map(|o| json!({
                    "period": o.period,
                    "meets_branch_set": o.meets_branch_set(),
                    "points": o.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                }))
                .collect::<Vec<_>>(),
        });
    }
    Ok(Outcome {
        passed: true,
        report,
        svg,
    })
}

fn stats_json(st: &ExcursionStats) -> Value {
    json!({
        "n": st.n,
        "k": st.k,
        "star_visits": st.star_visits,
        "ratio": fmt_q(&st.ratio),
        "m": st.m,
        "trace": st.trace,
        "witness": st.witness,
    })
}

fn pair_str(p: &(Q, Q)) -> String {
    format!("({}, {})", fmt_q(&p.0), fmt_q(&p.1))
}

fn hyperlocal(a: &HyperlocalArgs) -> Result<Outcome> {
    let lambda = parse_q(&a.lambda)?;
    let eps = parse_q(&a.eps)?;
    let l = HypLinear::new(lambda.clone())?;
    let spec = RegionSpec::new(lambda.clone(), eps.clone())?;
    let variant = match a.variant {
        VariantArg::D1 => Variant::D1,
        VariantArg::D3 => Variant::D3,
    };
    let path_of = |z: &(Q, Q), len: usize| -> Vec<(f64, f64)> {
        let mut p = z.clone();
        let mut out = vec![(to_f64(&p.0), to_f64(&p.1))];
        for _ in 0..len {
            p = l.apply(&p);
            out.push((to_f64(&p.0), to_f64(&p.1)));
        }
        out
    };
    let (lf, ef) = (to_f64(&lambda), to_f64(&eps));
    if let Some(pt) = &a.point {
        let z = parse_pair(pt)?;
        let st = excursion_stats(&l, &spec, &z, a.horizon, variant)?;
        let svg = plot::regions_svg(lf, ef, &path_of(&z, st.n + st.k + 1))?;
        let passed = st.witness.holds() && st.ratio <= Q::new(1.into(), 2.into());
        return Ok(Outcome {
            passed,
            report: json!({ "point": pair_str(&z), "excursion": stats_json(&st) }),
            svg: Some(svg),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let samples = sample_excursions(&l, &spec, a.samples, &mut rng, variant);
    let rep = verify_half_bound(&l, &spec, &samples, a.horizon, variant);
    let path = samples
        .first()
        .and_then(|z| {
            excursion_stats(&l, &spec, z, a.horizon, variant)
                .ok()
                .map(|st| path_of(z, st.n + st.k + 1))
        })
        .unwrap_or_default();
    Ok(Outcome {
        passed: rep.passed,
        report: json!({
            "lambda": a.lambda,
            "eps": a.eps,
            "seed": a.seed,
            "horizon": a.horizon,
            "half_bound": rep.to_json(),
        }),
        svg: Some(plot::regions_svg(lf, ef, &path)?),
    })
}

fn entropy_json(r: &EntropyReport) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

fn entropy(a: &EntropyArgs) -> Result<Outcome> {
    if let Some(h) = a.realize {
        let r = realize_entropy(h, a.tol)?;
        let passed = r.error <= a.tol;
        return Ok(Outcome {
            passed,
            report: json!({
                "target": r.target,
                "N": r.n,
                "P": pv_json(&r.p),
                "achieved": r.achieved,
                "error": r.error,
                "bisection_steps": r.bisection_steps,
            }),
            svg: None,
        });
    }
    if a.window == 0 || a.window > 16 {
        return Err(Error::Invalid("--window must lie in 1..=16".into()));
    }
    let windows: Vec<usize> = (1..=a.window).collect();
    let system = a.system.unwrap_or(SystemArg::Bernoulli);
    let k = a.k.unwrap_or(match system {
        SystemArg::Toral | SystemArg::Identity => 3,
        _ => 4,
    });
    let eps = 0.5f64.powi(k as i32);
    let report = match system {
        SystemArg::Bernoulli => {
            let p = ProbabilityVector::parse(&a.p)?;
            let mut v = entropy_json(&bernoulli_report(&p));
            v["p"] = pv_json(&p);
            v
        }
        SystemArg::Toral => {
            let m = ToralAuto::parse(&a.matrix)?;
            let est = toral_estimate(&m, 64, &windows, eps)?;
            json!({ "closed_form": entropy_json(&toral_report(&m)), "estimate": entropy_json(&est) })
        }
        SystemArg::Shift => entropy_json(&shift_estimate(2, &windows, k)?),
        SystemArg::Identity => entropy_json(&identity_estimate(64, &windows, eps)?),
        SystemArg::FactorChain => {
            let chain = factor_chain(2, 12, &windows, k)?;
            json!(chain.iter().map(entropy_json).collect::<Vec<_>>())
        }
    };
    Ok(ok(report))
}

fn invlim(a: &InvlimArgs) -> Result<Outcome> {
    let BlowArg::Fixed = a.blow;
    let atlas = Atlas::default_cat_depth(a.depth.max(1))?;
    let mut passed = true;
    let mut report = json!({
        "depth": atlas.depth(),
        "matrix": atlas.matrix.m,
        "eps": fmt_q(&atlas.eps),
        "stages": atlas
            .stages
            .iter()
            .map(|s| json!({
                "points": s.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "radius": s.radius,
                "inner": s.inner,
            }))
            .collect::<Vec<_>>(),
        "ball_threshold_m": ball::threshold(&atlas),
    });
    if a.zip {
        let model = zip::ZipModel::default();
        let checks = zip::dyadic_schedule(&model, 10)
            .into_iter()
            .map(|d| zip::zip_maps(&model, d, 4096))
            .collect::<Result<Vec<_>>>()?;
        passed &= checks.windows(2).all(|w| w[1].certified_sup <= w[0].certified_sup);
        report["zip"] = serde_json::to_value(&checks).unwrap_or(Value::Null);
    }
    if a.ball {
        let mut out = Vec::new();
        for sign in [1, -1] {
            let r = ball::ball_projection_search(&atlas, sign, a.samples, a.seed, 20)?;
            passed &= r.passed();
            out.push(serde_json::to_value(&r).unwrap_or(Value::Null));
        }
        report["ball"] = json!(out);
    }
    if a.app_falsify {
        let r = falsify::app_falsify(&atlas, a.delta1, a.delta2, a.n, a.resolution, a.budget)?;
        passed &= r.passed();
        report["app_falsify"] = serde_json::to_value(&r).unwrap_or(Value::Null);
    }
    if a.spec_falsify {
        let r = falsify::spec_falsify(&atlas, a.delta2, a.n, a.resolution, a.budget)?;
        passed &= r.passed();
        report["spec_falsify"] = serde_json::to_value(&r).unwrap_or(Value::Null);
    }
    Ok(Outcome {
        passed,
        report,
        svg: Some(plot::circle_svg(&atlas)),
    })
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome> {
    let ids: Vec<u32> = if a.all || a.criteria.is_empty() {
        verify::CRITERIA.to_vec()
    } else {
        a.criteria.clone()
    };
    let start = Instant::now();
    let mut last = start.elapsed();
    // timings go to stderr so the JSON report stays reproducible
    let rep = verify::run(&ids, a.seed, |c| {
        let now = start.elapsed();
        eprintln!(
            "criterion {:>2} {:<28} {} {:.1}s",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            (now - last).as_secs_f64()
        );
        last = now;
    })?;
    Ok(Outcome {
        passed: rep.passed,
        report: serde_json::to_value(&rep).unwrap_or(Value::Null),
        svg: None,
    })
}

fn plot_cmd(a: &PlotArgs) -> Result<Outcome> {
    let kind = match a.kind {
        PlotKindArg::Regions => PlotKind::Regions,
        PlotKindArg::Identification => PlotKind::Identification,
        PlotKindArg::Quotient => PlotKind::Quotient,
        PlotKindArg::Orbit => PlotKind::Orbit,
        PlotKindArg::Circle => PlotKind::Circle,
    };
    let points = match &a.orbit {
        Some(start) => baker_orbit(a.base, start, a.steps)?
            .iter()
            .map(|z| z.to_f64())
            .collect(),
        None => Vec::new(),
    };
    let data = PlotData {
        base: a.base,
        depth: a.depth,
        lambda: a.lambda,
        eps: a.eps,
        points,
        title: format!("baker orbit n={}", a.base),
    };
    let svg = plot::plot(kind, &data)?;
    Ok(Outcome {
        passed: true,
        report: json!({ "kind": kind, "bytes": svg.len() }),
        svg: Some(svg),
    })
}
