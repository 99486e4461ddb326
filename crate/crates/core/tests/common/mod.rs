//! Independent oracles and random data shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use l2alex::{CohomClass, LaurentMatrix, LaurentPoly};
use num_complex::Complex64;
use rand::Rng;

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const G_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 7/15-point Gauss-Kronrod panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G_WEIGHTS[3];
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Bisects until each panel's error is below `density` times its width.
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, density: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= density * (b - a) || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, density, depth - 1) + adaptive(f, m, b, density, depth - 1)
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]` to absolute `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // Start from several panels so narrow features are not missed.
    let n = 32;
    let w = (b - a) / n as f64;
    let density = tol / (b - a);
    // Near a root on the circle the integrand is rounding noise; the depth cap
    // keeps that region from being refined without end.
    (0..n)
        .map(|k| adaptive(f, a + k as f64 * w, a + (k + 1) as f64 * w, density, 30))
        .sum()
}

/// `M(q)` of a one-variable polynomial by direct quadrature of `log|q(e^{i theta})|`.
pub fn quadrature_mahler_1v(coeffs: &[f64], tol: f64) -> f64 {
    // Below this the evaluated |q| is rounding noise.
    let floor = 1e-15 * coeffs.iter().map(|c| c.abs()).sum::<f64>();
    let f = |theta: f64| {
        let z = Complex64::from_polar(1.0, theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc.norm().max(floor).ln()
    };
    (integrate(&f, 0.0, 2.0 * PI, tol * 2.0 * PI) / (2.0 * PI)).exp()
}

/// Determinant of a small complex matrix by the Leibniz expansion.
pub fn leibniz_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Complex64::new(0.0, 0.0);
    permutations(&mut perm, 0, &mut |p| {
        let mut sign = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        let prod = (0..n).fold(Complex64::new(sign, 0.0), |acc, i| acc * m[i][p[i]]);
        total += prod;
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// The matrix with every entry evaluated at `point`.
pub fn evaluate_matrix(a: &LaurentMatrix, point: &[Complex64]) -> Vec<Vec<Complex64>> {
    a.rows()
        .iter()
        .map(|row| row.iter().map(|p| p.eval(point).unwrap()).collect())
        .collect()
}

pub fn random_int_poly<R: Rng>(rng: &mut R, nvars: usize, max_terms: usize, exp_range: i64, coeff_range: i64) -> LaurentPoly {
    let n = rng.gen_range(0..=max_terms);
    LaurentPoly::from_int_terms(
        nvars,
        (0..n).map(|_| {
            let e: Vec<i64> = (0..nvars).map(|_| rng.gen_range(-exp_range..=exp_range)).collect();
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-coeff_range..=coeff_range);
            }
            (e, c)
        }),
    )
    .unwrap()
}

pub fn random_int_matrix<R: Rng>(rng: &mut R, size: usize, nvars: usize, max_terms: usize, exp_range: i64, coeff_range: i64) -> LaurentMatrix {
    let rows = (0..size)
        .map(|_| {
            (0..size)
                .map(|_| random_int_poly(rng, nvars, max_terms, exp_range, coeff_range))
                .collect()
        })
        .collect();
    LaurentMatrix::from_rows(nvars, rows).unwrap()
}

/// Class whose entries are `k / den` with `|k| <= max_num`, not all zero.
pub fn random_rational_class<R: Rng>(rng: &mut R, nvars: usize, max_num: i64, den: i64) -> CohomClass {
    loop {
        let sigma: Vec<f64> = (0..nvars)
            .map(|_| rng.gen_range(-max_num..=max_num) as f64 / den as f64)
            .collect();
        if sigma.iter().any(|&x| x != 0.0) {
            return CohomClass::new(sigma).unwrap();
        }
    }
}

/// Two-point log-log slopes of `log_values` over `grid`.
pub fn slopes(grid: &[f64], log_values: &[f64]) -> Vec<f64> {
    grid.windows(2)
        .zip(log_values.windows(2))
        .map(|(t, v)| (v[1] - v[0]) / (t[1].ln() - t[0].ln()))
        .collect()
}

/// Bitwise identity of the term lists of two polynomials.
pub fn same_bits(p: &LaurentPoly, q: &LaurentPoly) -> bool {
    let a = p.to_serialized();
    let b = q.to_serialized();
    a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            x.exp == y.exp && x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
        })
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
