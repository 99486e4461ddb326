//! Mahler measures of Laurent polynomials.
//!
//! One variable: Jensen's formula on the roots, `M(q) = |D| prod max(1, |b_i|)`.
//! Several variables: the variable of largest degree span is integrated
//! exactly by Jensen on each slice; the remaining torus coordinates are
//! integrated with adaptively bisected Gauss–Legendre panels.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intpoly;
use crate::laurent::{ExponentVector, LaurentPoly};

/// Default relative tolerance for multivariable measures.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Initial panel count per integrated coordinate.
pub const INITIAL_PANELS: usize = 16;

const GL_ORDER: usize = 10;
const MAX_DEPTH: u32 = 48;
const SLICE_ZERO_REL: f64 = 1e-13;
const SLICE_TRIM_REL: f64 = 1e-14;

/// Factorization `q(z) = D z^n prod (z - b_i)` of a one-variable Laurent polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RootData {
    pub leading: Complex64,
    pub power: i64,
    pub roots: Vec<Complex64>,
}

impl RootData {
    /// Coefficients of `D z^n prod (z - b_i)` as a polynomial.
    pub fn reconstruct(&self) -> LaurentPoly {
        let mut coeffs = vec![self.leading];
        for &b in &self.roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * b;
            }
            coeffs = next;
        }
        LaurentPoly::univariate(self.power, &coeffs)
    }

    /// `M(q(c z)) = |D| c^n prod max(c, |b_i|)`, as a direct product.
    pub fn measure_scaled(&self, c: f64) -> f64 {
        self.leading.norm()
            * c.powi(self.power as i32)
            * self.roots.iter().map(|b| c.max(b.norm())).product::<f64>()
    }

    /// `M(q)`.
    pub fn measure(&self) -> f64 {
        self.measure_scaled(1.0)
    }

    /// `log M(q)`.
    pub fn log_measure(&self) -> f64 {
        self.log_scaled(0.0)
    }

    /// `log M(q(c z)) = log|D| + n log c + sum max(log c, log|b_i|)` given `log c`.
    pub fn log_scaled(&self, log_c: f64) -> f64 {
        self.leading.norm().ln()
            + self.power as f64 * log_c
            + self
                .roots
                .iter()
                .map(|b| log_c.max(b.norm().ln()))
                .sum::<f64>()
    }
}

fn univariate_coeffs(q: &LaurentPoly) -> Result<(i64, Vec<Complex64>)> {
    if q.nvars() != 1 {
        return Err(Error::NotUnivariate(q.nvars()));
    }
    let (lo, hi) = q.degree_range(0).ok_or(Error::ZeroPolynomial)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (e, &c) in q.terms() {
        coeffs[(e[0] - lo) as usize] = c;
    }
    Ok((lo, coeffs))
}

/// Strips the monomial factor and finds every root of the residual polynomial.
pub fn roots(q: &LaurentPoly) -> Result<RootData> {
    let (lo, coeffs) = univariate_coeffs(q)?;
    let found = if q.is_integral() {
        integer_roots(&coeffs).unwrap_or_else(|| poly_roots(&coeffs))
    } else {
        poly_roots(&coeffs)
    };
    Ok(RootData {
        leading: *coeffs.last().expect("nonzero"),
        power: lo,
        roots: found,
    })
}

/// Roots of an integer polynomial, computed factor by factor of its exact
/// square-free decomposition so that repeated roots stay exact multiples.
fn integer_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let ints = coeffs
        .iter()
        .map(|c| (c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < 1e30).then_some(c.re as i128))
        .collect::<Option<Vec<i128>>>()?;
    let parts = intpoly::squarefree(&ints)?;
    let mut out = Vec::with_capacity(coeffs.len() - 1);
    for (g, mult) in parts {
        let g: Vec<Complex64> = g.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect();
        let r = poly_roots(&g);
        for _ in 0..mult {
            out.extend_from_slice(&r);
        }
    }
    (out.len() == coeffs.len() - 1).then_some(out)
}

/// Roots of `sum coeffs[k] z^k`; requires nonzero constant and leading coefficients.
pub(crate) fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    match deg {
        0 => vec![],
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => {
            let (c, b, a) = (coeffs[0], coeffs[1], coeffs[2]);
            let disc = (b * b - a * c * 4.0).sqrt();
            // Pick the sign that avoids cancellation; the second root comes from Vieta.
            let s = if (b.conj() * disc).re >= 0.0 { b + disc } else { b - disc };
            let q = -s / 2.0;
            vec![q / a, c / q]
        }
        _ => {
            let mut found = companion_roots(coeffs);
            for z in &mut found {
                *z = newton_polish(coeffs, *z);
            }
            found
        }
    }
}

/// Eigenvalues of the companion matrix after the substitution `z = s y`
/// that equalizes the constant and leading coefficients.
fn companion_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let scale = (coeffs[0].norm() / coeffs[deg].norm()).powf(1.0 / deg as f64);
    let lead = coeffs[deg] * scale.powi(deg as i32);
    let monic: Vec<Complex64> = (0..deg)
        .map(|k| coeffs[k] * scale.powi(k as i32) / lead)
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for k in 1..deg {
        m[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..deg {
        m[(k, deg - 1)] = -monic[k];
    }
    match Schur::try_new(m, f64::EPSILON, 100 * deg) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..deg).map(|k| t[(k, k)] * scale).collect()
        }
        None => {
            log::debug!("Schur iteration did not converge at degree {deg}; using Aberth");
            let mut scaled: Vec<Complex64> = monic.clone();
            scaled.push(Complex64::new(1.0, 0.0));
            aberth(&scaled).into_iter().map(|y| y * scale).collect()
        }
    }
}

/// Aberth-Ehrlich simultaneous iteration for a monic polynomial whose roots
/// lie near the unit circle.
fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.25) / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 4.0 * f64::EPSILON {
            break;
        }
    }
    z
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let (p, dp) = horner(coeffs, z);
    if dp.norm() == 0.0 || !p.is_finite() {
        return z;
    }
    let cand = z - p / dp;
    let (pc, _) = horner(coeffs, cand);
    if pc.is_finite() && pc.norm() < p.norm() {
        cand
    } else {
        z
    }
}

/// Mahler measure of a one-variable polynomial; `0` for the zero polynomial.
pub fn mahler_1v(q: &LaurentPoly) -> Result<f64> {
    if q.nvars() != 1 {
        return Err(Error::NotUnivariate(q.nvars()));
    }
    if q.is_zero() {
        return Ok(0.0);
    }
    Ok(roots(q)?.measure())
}

/// `M(p(c z)) = |D| c^n prod max(c, |b_i|)`.
pub fn scaled_mahler_1v(p: &LaurentPoly, c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveParameter(c));
    }
    let data = roots(p)?;
    let direct = data.measure_scaled(c);
    if direct.is_finite() && direct > 0.0 {
        Ok(direct)
    } else {
        Ok(data.log_scaled(c.ln()).exp())
    }
}

/// One monomial piece `coeff * t^exponent` on `(t_lo, t_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialPiece {
    pub t_lo: f64,
    pub t_hi: f64,
    pub coeff: f64,
    pub exponent: f64,
}

/// Exact piecewise-monomial form of `t -> M(p(t^sigma z))`.
///
/// Breakpoints sit at `|b_i|^{1/sigma}`. A zero `sigma` yields the single
/// constant piece `M(p)`.
pub fn monomial_profile(p: &LaurentPoly, sigma: f64) -> Result<Vec<MonomialPiece>> {
    let data = roots(p)?;
    profile_from_roots(&data, sigma)
}

pub(crate) fn profile_from_roots(data: &RootData, sigma: f64) -> Result<Vec<MonomialPiece>> {
    if !sigma.is_finite() {
        return Err(Error::InvalidArgument("sigma must be finite".into()));
    }
    let lead = data.leading.norm();
    if sigma == 0.0 {
        return Ok(vec![MonomialPiece {
            t_lo: 0.0,
            t_hi: f64::INFINITY,
            coeff: data.measure(),
            exponent: 0.0,
        }]);
    }
    // Each root contributes t^sigma on one side of its breakpoint and |b| on the other.
    let mut breaks: Vec<(f64, f64)> = data
        .roots
        .iter()
        .map(|b| {
            let m = b.norm();
            ((m.ln() / sigma).exp(), m)
        })
        .collect();
    breaks.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Roots not yet crossed contribute |b| when sigma > 0; crossed ones when sigma < 0.
    let mut pieces = Vec::new();
    let mut lo = 0.0;
    let mut i = 0;
    loop {
        let hi = if i < breaks.len() { breaks[i].0 } else { f64::INFINITY };
        if hi > lo || i == breaks.len() {
            let (const_side, power_count) = if sigma > 0.0 {
                (&breaks[i..], i)
            } else {
                (&breaks[..i], breaks.len() - i)
            };
            pieces.push(MonomialPiece {
                t_lo: lo,
                t_hi: hi,
                coeff: lead * const_side.iter().map(|&(_, m)| m).product::<f64>(),
                exponent: sigma * (data.power + power_count as i64) as f64,
            });
            lo = hi;
        }
        if i == breaks.len() {
            break;
        }
        // Cross every root sharing this breakpoint.
        let here = breaks[i].0;
        while i < breaks.len() && breaks[i].0 == here {
            i += 1;
        }
    }
    Ok(pieces)
}

/// Evaluates a piecewise-monomial profile.
pub fn eval_profile(pieces: &[MonomialPiece], t: f64) -> f64 {
    let piece = pieces
        .iter()
        .find(|pc| t <= pc.t_hi)
        .unwrap_or_else(|| pieces.last().expect("nonempty profile"));
    piece.coeff * t.powf(piece.exponent)
}

/// A polynomial supported on a line: `p = z^base * f(z^direction)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineReduction {
    pub base: ExponentVector,
    pub direction: ExponentVector,
    /// One-variable polynomial `f`.
    pub profile_poly: LaurentPoly,
}

/// Detects a support of rank at most one, where the measure is exactly a
/// one-variable measure. Returns `None` for the zero polynomial or for genuinely
/// higher-rank supports.
pub fn line_reduction(p: &LaurentPoly) -> Option<LineReduction> {
    let mut it = p.terms();
    let (base, _) = it.next()?;
    let base = base.clone();
    let l = p.nvars();
    let diffs: Vec<(ExponentVector, Complex64)> = p
        .terms()
        .map(|(e, &c)| (e.checked_sub(&base), c))
        .collect();
    let first = diffs.iter().find(|(d, _)| !d.is_zero());
    let direction = match first {
        None => ExponentVector::unit(l.max(1), 0),
        Some((d, _)) => {
            let g = d.as_slice().iter().fold(0i64, |acc, &x| gcd(acc, x));
            ExponentVector::new(d.as_slice().iter().map(|x| x / g).collect())
        }
    };
    if l == 0 {
        let c = p.coeff(&base);
        return Some(LineReduction {
            base,
            direction: ExponentVector::new(vec![]),
            profile_poly: LaurentPoly::constant(1, c),
        });
    }
    let pivot = direction.as_slice().iter().position(|&x| x != 0)?;
    let mut terms = Vec::with_capacity(diffs.len());
    for (d, c) in diffs {
        let k = d[pivot] / direction[pivot];
        let consistent = d
            .as_slice()
            .iter()
            .zip(direction.as_slice())
            .all(|(&x, &u)| x == k * u);
        if !consistent {
            return None;
        }
        terms.push((ExponentVector::new(vec![k]), c));
    }
    let f = LaurentPoly::from_terms(1, terms).ok()?;
    let f = if p.is_integral() { f } else { f.uncertified() };
    Some(LineReduction {
        base,
        direction,
        profile_poly: f,
    })
}

/// Splits an integer polynomial in two variables as `g_1(z_1) g_2(z_2) h`
/// by pulling out the exact polynomial content with respect to each variable.
/// Such factors make whole slices vanish on part of the torus, so they are
/// measured on their own. Returns just `p` when nothing splits off.
pub fn split_content(p: &LaurentPoly) -> Vec<LaurentPoly> {
    if !p.is_integral() || p.nvars() != 2 || p.is_zero() {
        return vec![p.clone()];
    }
    let mut factors = Vec::new();
    let mut rest = p.clone();
    for k in 0..2 {
        if let Some((g, h)) = content_in(&rest, k) {
            factors.push(g);
            rest = h;
        }
    }
    factors.push(rest);
    factors
}

/// `p = g(z_k) h` with `g` the primitive gcd of the coefficients of `p` viewed
/// as a polynomial in the other variable; `None` if `g` is constant.
fn content_in(p: &LaurentPoly, k: usize) -> Option<(LaurentPoly, LaurentPoly)> {
    let j = 1 - k;
    let (lo, _) = p.degree_range(k)?;
    let mut rows: std::collections::BTreeMap<i64, Vec<i128>> = std::collections::BTreeMap::new();
    for (e, c) in p.terms() {
        let row = rows.entry(e[j]).or_default();
        let at = (e[k] - lo) as usize;
        if row.len() <= at {
            row.resize(at + 1, 0);
        }
        row[at] = c.re as i128;
    }
    let g = rows
        .values()
        .try_fold(vec![0i128], |g, row| intpoly::gcd(&g, row))?;
    if intpoly::degree(&g) == 0 {
        return None;
    }
    let mut h_terms = Vec::new();
    for (&ej, row) in &rows {
        for (at, c) in intpoly::exact_quotient(row, &g)?.into_iter().enumerate() {
            if c != 0 {
                let mut e = vec![0i64; 2];
                e[j] = ej;
                e[k] = lo + at as i64;
                h_terms.push((e, i64::try_from(c).ok()?));
            }
        }
    }
    let g_terms = g.iter().enumerate().filter(|(_, &c)| c != 0).map(|(at, &c)| {
        let mut e = vec![0i64; 2];
        e[k] = at as i64;
        Some((e, i64::try_from(c).ok()?))
    });
    let g = LaurentPoly::from_int_terms(2, g_terms.collect::<Option<Vec<_>>>()?).ok()?;
    let h = LaurentPoly::from_int_terms(2, h_terms).ok()?;
    Some((g, h))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Quadrature controls for [`mahler_mv_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MahlerOptions {
    /// Target accuracy on `log M`, i.e. relative accuracy on `M`.
    pub tol: f64,
    /// Maximum number of panel bisections per integrated coordinate and initial panel.
    pub max_panels: usize,
}

impl Default for MahlerOptions {
    fn default() -> Self {
        MahlerOptions {
            tol: DEFAULT_TOL,
            max_panels: 20_000,
        }
    }
}

impl MahlerOptions {
    pub fn with_tol(tol: f64) -> Self {
        MahlerOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MahlerEstimate {
    pub measure: f64,
    pub log_measure: f64,
    /// Error estimate on `log M` (0 when computed exactly).
    pub achieved_tol: f64,
}

/// Multivariable Mahler measure at the given relative tolerance.
pub fn mahler_mv(p: &LaurentPoly, tol: f64) -> Result<f64> {
    Ok(mahler_mv_with(p, &MahlerOptions::with_tol(tol))?.measure)
}

pub fn mahler_mv_with(p: &LaurentPoly, opts: &MahlerOptions) -> Result<MahlerEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if p.is_zero() {
        return Ok(MahlerEstimate {
            measure: 0.0,
            log_measure: f64::NEG_INFINITY,
            achieved_tol: 0.0,
        });
    }
    if let Some(red) = line_reduction(p) {
        let data = roots(&red.profile_poly)?;
        return Ok(MahlerEstimate {
            measure: data.measure(),
            log_measure: data.log_measure(),
            achieved_tol: 0.0,
        });
    }
    let factors = split_content(p);
    if factors.len() > 1 {
        let mut out = MahlerEstimate {
            measure: 1.0,
            log_measure: 0.0,
            achieved_tol: 0.0,
        };
        for f in &factors {
            let est = mahler_mv_with(f, opts)?;
            out.measure *= est.measure;
            out.log_measure += est.log_measure;
            out.achieved_tol += est.achieved_tol;
        }
        return Ok(out);
    }
    let table = SliceTable::new(p);
    let (value, err, exhausted) = table.integrate(opts)?;
    if exhausted || err > opts.tol {
        return Err(Error::QuadratureBudget {
            estimate: value.exp(),
            achieved: err,
        });
    }
    Ok(MahlerEstimate {
        measure: value.exp(),
        log_measure: value,
        achieved_tol: err,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

/// Terms of `p` grouped by the exponent of the innermost (Jensen) variable.
struct SliceTable {
    nvars: usize,
    outer: Vec<usize>,
    rows: Vec<Vec<(Vec<i64>, Complex64)>>,
    zero_cutoff: f64,
}

impl SliceTable {
    fn new(p: &LaurentPoly) -> Self {
        let nvars = p.nvars();
        let inner = (0..nvars)
            .max_by_key(|&j| {
                let (lo, hi) = p.degree_range(j).expect("nonzero");
                // Ties resolve to the lowest index.
                (hi - lo, std::cmp::Reverse(j))
            })
            .expect("at least one variable");
        let outer: Vec<usize> = (0..nvars).filter(|&j| j != inner).collect();
        let (low, high) = p.degree_range(inner).expect("nonzero");
        let mut rows = vec![Vec::new(); (high - low + 1) as usize];
        for (e, &c) in p.terms() {
            let oe = outer.iter().map(|&j| e[j]).collect();
            rows[(e[inner] - low) as usize].push((oe, c));
        }
        SliceTable {
            nvars,
            outer,
            rows,
            zero_cutoff: SLICE_ZERO_REL * p.max_coeff_norm(),
        }
    }

    /// `log M` of the one-variable slice at the given outer angles.
    fn log_slice(&self, thetas: &[f64]) -> Result<f64> {
        let mut coeffs: Vec<Complex64> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(oe, c)| {
                        let phase: f64 = oe.iter().zip(thetas).map(|(&k, th)| k as f64 * th).sum();
                        c * Complex64::from_polar(1.0, phase)
                    })
                    .sum()
            })
            .collect();
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale <= self.zero_cutoff {
            return Err(Error::DegenerateSlice);
        }
        let cutoff = SLICE_TRIM_REL * scale;
        while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        let start = coeffs.iter().position(|c| c.norm() > cutoff).expect("nonzero");
        let coeffs = &coeffs[start..];
        let lead = coeffs.last().expect("nonzero").norm();
        Ok(lead.ln()
            + poly_roots(coeffs)
                .iter()
                .map(|b| b.norm().ln().max(0.0))
                .sum::<f64>())
    }

    /// Mean of `log|p|` over the torus, with its error estimate and a flag for budget exhaustion.
    fn integrate(&self, opts: &MahlerOptions) -> Result<(f64, f64, bool)> {
        debug_assert_eq!(self.outer.len() + 1, self.nvars);
        let mut thetas = Vec::with_capacity(self.outer.len());
        self.integrate_level(0, &mut thetas, opts.tol, opts, true)
    }

    /// Mean over the coordinates from `level` on, at fixed earlier angles.
    fn integrate_level(
        &self,
        level: usize,
        thetas: &mut Vec<f64>,
        tol: f64,
        opts: &MahlerOptions,
        parallel: bool,
    ) -> Result<(f64, f64, bool)> {
        if level == self.outer.len() {
            return Ok((self.log_slice(thetas)?, 0.0, false));
        }
        let width = 2.0 * PI / INITIAL_PANELS as f64;
        // Inner levels get a tighter share so their noise does not stall the outer bisection.
        let inner_tol = tol * 0.05;
        let panel = |k: usize| -> Result<(f64, f64, bool)> {
            let mut th = thetas.clone();
            let a = k as f64 * width;
            let f = |x: f64, th: &mut Vec<f64>| -> Result<(f64, f64, bool)> {
                th.push(x);
                let r = self.integrate_level(level + 1, th, inner_tol, opts, false);
                th.pop();
                r
            };
            let mut budget = opts.max_panels;
            let whole = gl_panel(&f, a, a + width, &mut th)?;
            refine(&f, a, a + width, whole, tol * width, 0, &mut budget, &mut th)
        };
        let parts: Vec<Result<(f64, f64, bool)>> = if parallel {
            (0..INITIAL_PANELS).into_par_iter().map(panel).collect()
        } else {
            (0..INITIAL_PANELS).map(panel).collect()
        };
        // Fixed summation order keeps results bit-stable.
        let mut sum = 0.0;
        let mut err = 0.0;
        let mut exhausted = false;
        for part in parts {
            let (v, e, x) = part?;
            sum += v;
            err += e;
            exhausted |= x;
        }
        Ok((sum / (2.0 * PI), err / (2.0 * PI), exhausted))
    }
}

type LevelResult = Result<(f64, f64, bool)>;

/// Gauss–Legendre estimate on `[a, b]`: integral value, propagated inner error,
/// inner exhaustion flag.
fn gl_panel<F>(f: &F, a: f64, b: f64, th: &mut Vec<f64>) -> Result<(f64, f64, bool)>
where
    F: Fn(f64, &mut Vec<f64>) -> LevelResult,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut exhausted = false;
    for &(x, w) in gauss_legendre() {
        let (v, e, ex) = f(mid + half * x, th)?;
        sum += w * v;
        err += w * e;
        exhausted |= ex;
    }
    Ok((half * sum, half * err, exhausted))
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64, bool),
    tol: f64,
    depth: u32,
    budget: &mut usize,
    th: &mut Vec<f64>,
) -> Result<(f64, f64, bool)>
where
    F: Fn(f64, &mut Vec<f64>) -> LevelResult,
{
    let mid = 0.5 * (a + b);
    let left = gl_panel(f, a, mid, th)?;
    let right = gl_panel(f, mid, b, th)?;
    let fine = left.0 + right.0;
    let diff = (fine - whole.0).abs();
    let inner_err = left.1 + right.1;
    let inner_exhausted = left.2 || right.2;
    if diff <= tol {
        return Ok((fine, diff + inner_err, inner_exhausted));
    }
    if depth >= MAX_DEPTH || *budget == 0 {
        // Near a zero on the torus the halved local tolerance drops below
        // rounding; the accumulated estimate is then checked against the
        // global tolerance by the caller.
        return Ok((fine, diff + inner_err, inner_exhausted));
    }
    *budget -= 1;
    let l = refine(f, a, mid, left, 0.5 * tol, depth + 1, budget, th)?;
    let r = refine(f, mid, b, right, 0.5 * tol, depth + 1, budget, th)?;
    Ok((l.0 + r.0, l.1 + r.1, l.2 || r.2))
}
