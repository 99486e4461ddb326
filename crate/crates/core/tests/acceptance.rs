//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{
    quadrature_mahler_1v, random_int_matrix, random_int_poly, random_rational_class, rel_err, same_bits, slopes,
};
use l2alex::degree::{asymptote, convexity_check, geometric_grid, lipschitz_degree_check};
use l2alex::torsion::{
    fibered_torsion, figure_eight_entropy, glue, graph_torsion, section9, symmetry_check, torsion_degree,
    torsion_from_presentation, Section9Scenario, TorsionFunction, V3,
};
use l2alex::twist::twist_poly;
use l2alex::{det_function, mahler_1v, mahler_mv, CohomClass, LaurentMatrix, LaurentPoly, TorsionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 2-D trapezoid rule with 4096^2 nodes for `M(1 + z_1 + z_2)`, run once.
const TRAPEZOID_1_Z1_Z2: f64 = 1.3813564897763053;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn p1(coeffs: &[i64]) -> LaurentPoly {
    LaurentPoly::from_int_terms(1, coeffs.iter().enumerate().map(|(k, &c)| (vec![k as i64], c))).unwrap()
}

fn golden_quadratic() -> LaurentPoly {
    p1(&[1, -3, 1])
}

fn mahler_engine() -> Outcome {
    let quad = mahler_1v(&golden_quadratic()).map_err(|e| e.to_string())?;
    let golden = (3.0 + 5f64.sqrt()) / 2.0;
    let lehmer_coeffs = [1i64, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];
    let lehmer = mahler_1v(&p1(&lehmer_coeffs)).map_err(|e| e.to_string())?;
    let lehmer_f: Vec<f64> = lehmer_coeffs.iter().map(|&c| c as f64).collect();
    let lehmer_oracle = quadrature_mahler_1v(&lehmer_f, 1e-9);
    let plane = LaurentPoly::from_int_terms(2, [(vec![0, 0], 1), (vec![1, 0], 1), (vec![0, 1], 1)]).unwrap();
    let m2 = mahler_mv(&plane, 1e-8).map_err(|e| e.to_string())?;
    let ok = (quad - golden).abs() < 1e-10
        && (lehmer - 1.176280818).abs() < 1e-8
        && (lehmer - lehmer_oracle).abs() < 1e-8
        && (m2 - 1.3813564445).abs() < 1e-6
        && (m2 - TRAPEZOID_1_Z1_Z2).abs() < 1e-6;
    check(
        ok,
        format!("quadratic {quad:.12}, Lehmer {lehmer:.12} (quadrature {lehmer_oracle:.12}), 1+z1+z2 {m2:.10}"),
    )
}

fn jensen_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0002);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let deg = rng.gen_range(1..=8);
        let mut coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
        if coeffs[deg] == 0 {
            coeffs[deg] = 1;
        }
        let jensen = mahler_1v(&p1(&coeffs)).map_err(|e| e.to_string())?;
        let f: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
        worst = worst.max(rel_err(jensen, quadrature_mahler_1v(&f, 1e-10)));
    }
    check(worst < 1e-6, format!("30 polynomials, worst relative disagreement {worst:.2e}"))
}

/// Integer matrices up to 3x3 in one or two variables with rational classes.
fn matrix_corpus() -> Vec<(LaurentMatrix, CohomClass)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0003);
    let mut out = Vec::new();
    while out.len() < 20 {
        let size = rng.gen_range(1..=3);
        let nvars = rng.gen_range(1..=2);
        let a = random_int_matrix(&mut rng, size, nvars, 3, 2, 3);
        if a.determinant().is_zero() {
            continue;
        }
        let den = rng.gen_range(1..=3);
        out.push((a, random_rational_class(&mut rng, nvars, 3, den)));
    }
    out
}

fn convexity_suite(corpus: &[(LaurentMatrix, CohomClass)]) -> Outcome {
    let grid = geometric_grid(1e-3, 1e3, 41).unwrap();
    let mut failures = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    for (a, class) in corpus {
        let v = det_function(a, class).map_err(|e| e.to_string())?;
        let report = convexity_check(&v, &grid, 1e-6).map_err(|e| e.to_string())?;
        let logs = v.log_eval_grid(&grid, 1e-10).map_err(|e| e.to_string())?;
        let (lo, hi) = v.slope_window().unwrap();
        for s in slopes(&grid, &logs) {
            worst_excess = worst_excess.max((lo - s).max(s - hi));
        }
        if !report.passed() {
            failures += 1;
        }
    }
    check(
        failures == 0 && worst_excess <= 1e-6,
        format!("{failures} of 20 failed; slopes exceed the width-R window by at most {worst_excess:.2e}"),
    )
}

fn chief_part_asymptotics(corpus: &[(LaurentMatrix, CohomClass)]) -> Outcome {
    let mut worst = 0.0f64;
    let mut min_c = f64::INFINITY;
    for (a, class) in corpus {
        let v = det_function(a, class).map_err(|e| e.to_string())?;
        let rep = asymptote(&v, 1e-10).map_err(|e| e.to_string())?;
        let (cp, cm) = (rep.c_plus.unwrap(), rep.c_minus.unwrap());
        min_c = min_c.min(cp).min(cm);
        let hi = v.eval(1e6, 1e-10).map_err(|e| e.to_string())? / (cp * 1e6f64.powf(rep.d_plus)) - 1.0;
        let lo = v.eval(1e-6, 1e-10).map_err(|e| e.to_string())? / (cm * 1e-6f64.powf(rep.d_minus)) - 1.0;
        worst = worst.max(hi.abs()).max(lo.abs());
    }
    check(
        worst < 1e-3 && min_c >= 1.0 - 1e-9,
        format!("worst relative gap {worst:.2e}, smallest leading coefficient {min_c:.6}"),
    )
}

fn lipschitz_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0005);
    let mut checked = 0;
    let mut worst_ratio = 0.0f64;
    while checked < 10 {
        let size = rng.gen_range(1..=2);
        let nvars = rng.gen_range(1..=2);
        let a = random_int_matrix(&mut rng, size, nvars, 3, 2, 3);
        if a.determinant().is_zero() {
            continue;
        }
        let base = random_rational_class(&mut rng, nvars, 3, 2);
        let xi = random_rational_class(&mut rng, nvars, 3, 3);
        let report = lipschitz_degree_check(&a, &base, &xi, 6, 1e-10).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!("violations {:?} on {a:?}", report.violations));
        }
        worst_ratio = worst_ratio.max(report.max_ratio);
        checked += 1;
    }
    check(true, format!("10 triples, largest |deg_i - deg_j| / 2R(A, (l_i - l_j) xi) = {worst_ratio:.4}"))
}

fn section9_table() -> Outcome {
    let upper = (6.0 * V3 / (6.0 * PI)).exp();
    let rows = [
        ([0.0, 0.0, 0.0], 0.0, Some(1.381366)),
        ([1.0, -1.0, 0.0], 2.0, Some(1.113700)),
        ([1.0, 1.0, -2.0], 4.0, None),
    ];
    let mut notes = Vec::new();
    for (phi, norm, leading) in rows {
        let res = section9(phi).map_err(|e| e.to_string())?;
        let deg = torsion_degree(&Section9Scenario::new(phi).unwrap().torsion(), 1e-10).map_err(|e| e.to_string())?;
        let leading_ok = match leading {
            Some(l) => (res.leading - l).abs() < 1e-5,
            None => res.leading == 1.0,
        };
        let ok = res.norm == norm
            && (deg.deg_b - norm).abs() < 1e-9
            && leading_ok
            && res.leading >= 1.0
            && res.leading <= upper;
        if !ok {
            return Err(format!("{phi:?}: norm {} deg {} leading {}", res.norm, deg.deg_b, res.leading));
        }
        notes.push(format!("{phi:?} -> {} / {:.6}", res.norm, res.leading));
    }
    Ok(notes.join(", "))
}

fn symmetry_and_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0007);
    for _ in 0..20 {
        let p = random_int_poly(&mut rng, 2, 6, 3, 9);
        let sigma: Vec<f64> = (0..2).map(|_| 6.0 * rng.gen_range(-2i64..=2) as f64).collect();
        let class = CohomClass::new(sigma).unwrap();
        for c in [2.0, -1.0, 1.0 / 3.0] {
            // Dyadic data: every factor and every power of t is an exact double.
            let t = if c == 1.0 / 3.0 { 8.0 } else { 64.0 };
            let left = twist_poly(&p, &class.scaled(c).unwrap(), t).map_err(|e| e.to_string())?;
            let right = twist_poly(&p, &class, f64::powf(t, c)).map_err(|e| e.to_string())?;
            if !same_bits(&left, &right) {
                return Err(format!("c = {c}: {left} vs {right}"));
            }
        }
    }
    let a = LaurentMatrix::from_rows(1, vec![vec![golden_quadratic()]]).unwrap();
    let class = CohomClass::new(vec![1.0]).unwrap();
    let tau = torsion_from_presentation(&TorsionSpec::new(a.clone(), class.clone())).map_err(|e| e.to_string())?;
    let neg =
        torsion_from_presentation(&TorsionSpec::new(a, class.scaled(-1.0).unwrap())).map_err(|e| e.to_string())?;
    let grid = geometric_grid(1e-2, 1e2, 21).unwrap();
    let rep = symmetry_check(&tau, &neg, &grid, 1e-10).map_err(|e| e.to_string())?;
    check(
        rep.max_residual < 1e-9 && rep.r.is_finite(),
        format!("scaling byte-identical for c in {{2, -1, 1/3}}; symmetry r = {:.6}, residual {:.2e}", rep.r, rep.max_residual),
    )
}

fn closed_forms() -> Outcome {
    let h = figure_eight_entropy();
    let values = [0.3, 3.0, 1.0].map(|t| fibered_torsion(h, 1.0, t).map(|v| v.value()));
    let fibered_ok = matches!(values, [Ok(Some(a)), Ok(Some(b)), Ok(None)] if a == 1.0 && b == 3.0);
    let grid = [0.1, 0.25, 0.5, 1.0, 1.25, 1.5, 2.0, 2.5, 4.0, 10.0];
    let graph_ok = grid.iter().all(|&t| {
        let m = f64::max(1.0, t);
        graph_torsion(3.0, t).ok() == Some(m * m * m)
    });
    let pieces: Vec<TorsionFunction> = [1.0, 2.0, 0.5]
        .iter()
        .map(|&x| TorsionFunction::Fibered {
            entropy: x * h,
            norm: x,
            volume: Some(2.0 * V3),
        })
        .collect();
    let separate = pieces
        .iter()
        .map(|p| torsion_degree(p, 1e-10).map(|r| r.deg_b))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?;
    let glued = torsion_degree(&glue(pieces).map_err(|e| e.to_string())?, 1e-10).map_err(|e| e.to_string())?;
    let additive = (glued.deg_b - separate.iter().sum::<f64>()).abs() < 1e-12;
    check(
        fibered_ok && graph_ok && additive,
        format!("fibered {values:?}, graph exact {graph_ok}, glued degree {} = {separate:?}", glued.deg_b),
    )
}

fn main() {
    let corpus = matrix_corpus();
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("Mahler engine reference values", Duration::from_secs(5), Box::new(mahler_engine)),
        ("Jensen agrees with quadrature", Duration::from_secs(10), Box::new(jensen_vs_quadrature)),
        ("multiplicative convexity and slope window", Duration::from_secs(60), Box::new(|| convexity_suite(&corpus))),
        ("chief-part asymptotics", Duration::from_secs(60), Box::new(|| chief_part_asymptotics(&corpus))),
        ("Lipschitz degree bound", Duration::from_secs(30), Box::new(lipschitz_bound)),
        ("three-piece graph manifold table", Duration::from_secs(1), Box::new(section9_table)),
        ("symmetry and scaling", Duration::from_secs(5), Box::new(symmetry_and_scaling)),
        ("fibered and graph closed forms", Duration::from_secs(1), Box::new(closed_forms)),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {}: {name} [{:.2}s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
