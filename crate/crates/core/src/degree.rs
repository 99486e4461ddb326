//! Determinant functions `V(t) = M(p_A(t~_1 z_1, ..., t~_l z_l))^{1/index}` and
//! their growth: convexity checks, exponent-bound slopes, chief-part asymptotes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::{ExponentVector, LaurentMatrix, LaurentPoly};
use crate::mahler::{self, MahlerOptions, RootData};
use crate::twist::CohomClass;

/// Weights closer than this are treated as a tie in chief-part extraction.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Anchor points `(near, far)` of the numeric-fit fallback at each end.
pub const FIT_ANCHORS_PLUS: (f64, f64) = (1e4, 1e6);
pub const FIT_ANCHORS_MINUS: (f64, f64) = (1e-4, 1e-6);

/// Exact evaluation data for a factor supported on a line.
#[derive(Clone, Debug)]
struct LineProfile {
    base: ExponentVector,
    direction: ExponentVector,
    roots: RootData,
}

/// One factor of the determinant polynomial, evaluated on its own.
#[derive(Clone, Debug)]
enum Factor {
    Line(LineProfile),
    General(LaurentPoly),
}

impl Factor {
    fn new(p: LaurentPoly) -> Self {
        let line = mahler::line_reduction(&p).and_then(|red| {
            if red.direction.is_empty() {
                return None;
            }
            Some(LineProfile {
                base: red.base,
                direction: red.direction,
                roots: mahler::roots(&red.profile_poly).ok()?,
            })
        });
        match line {
            Some(line) => Factor::Line(line),
            None => Factor::General(p),
        }
    }

    /// `log M` of the twisted factor at `t`.
    fn log_eval(&self, sigma: &[f64], log_t: f64, tol: f64) -> Result<f64> {
        match self {
            Factor::Line(line) => Ok(line.base.pair(sigma) * log_t
                + line.roots.log_scaled(line.direction.pair(sigma) * log_t)),
            Factor::General(p) => {
                // Pre-scale so the largest twisted weight maps to t^0.
                let shift = p
                    .terms()
                    .map(|(e, _)| e.pair(sigma) * log_t)
                    .fold(f64::NEG_INFINITY, f64::max);
                let twisted = p.map_coefficients(|e, c| c * (e.pair(sigma) * log_t - shift).exp());
                let est = mahler::mahler_mv_with(&twisted, &MahlerOptions::with_tol(tol))?;
                Ok(est.log_measure + shift)
            }
        }
    }
}

/// The function `t -> det^r(kappa(phi, gamma, t)(A))` for a free abelian target.
#[derive(Clone, Debug)]
pub struct DetFunction {
    det_poly: LaurentPoly,
    class: CohomClass,
    index_divisor: u32,
    size: usize,
    support: Vec<ExponentVector>,
    factors: Vec<Factor>,
}

/// Builds `V` from a presentation matrix and a class, caching `p_A = det A`.
pub fn det_function(a: &LaurentMatrix, class: &CohomClass) -> Result<DetFunction> {
    if a.nvars() != class.nvars() {
        return Err(Error::VariableMismatch {
            left: a.nvars(),
            right: class.nvars(),
        });
    }
    let mut support: Vec<ExponentVector> = a
        .entries()
        .flat_map(|p| p.terms().map(|(e, _)| e.clone()))
        .collect();
    support.sort();
    support.dedup();
    Ok(DetFunction::assemble(a.determinant(), class.clone(), 1, a.size(), support))
}

impl DetFunction {
    /// `V` for the 1x1 matrix `[[p]]`.
    pub fn from_poly(p: &LaurentPoly, class: &CohomClass) -> Result<Self> {
        let a = LaurentMatrix::from_rows(p.nvars(), vec![vec![p.clone()]])?;
        det_function(&a, class)
    }

    fn assemble(
        det_poly: LaurentPoly,
        class: CohomClass,
        index_divisor: u32,
        size: usize,
        support: Vec<ExponentVector>,
    ) -> Self {
        let factors = if det_poly.is_zero() {
            Vec::new()
        } else {
            mahler::split_content(&det_poly).into_iter().map(Factor::new).collect()
        };
        DetFunction {
            det_poly,
            class,
            index_divisor,
            size,
            support,
            factors,
        }
    }

    /// Same matrix, different class.
    pub fn with_class(&self, class: &CohomClass) -> Result<Self> {
        if class.nvars() != self.class.nvars() {
            return Err(Error::VariableMismatch {
                left: self.class.nvars(),
                right: class.nvars(),
            });
        }
        let mut out = self.clone();
        out.class = class.clone();
        Ok(out)
    }

    pub(crate) fn with_index_divisor(&self, index_divisor: u32) -> Self {
        let mut out = self.clone();
        out.index_divisor = index_divisor;
        out
    }

    pub fn det_poly(&self) -> &LaurentPoly {
        &self.det_poly
    }

    pub fn class(&self) -> &CohomClass {
        &self.class
    }

    pub fn index_divisor(&self) -> u32 {
        self.index_divisor
    }

    pub fn is_zero(&self) -> bool {
        self.det_poly.is_zero()
    }

    /// `R(A, sigma)` of the underlying matrix; `None` for the zero matrix.
    pub fn exponent_bound(&self) -> Option<f64> {
        self.exponent_bound_for(self.class.sigma())
    }

    pub(crate) fn exponent_bound_for(&self, sigma: &[f64]) -> Option<f64> {
        self.window_for(sigma).map(|(lo, hi)| hi - lo)
    }

    /// `(p min <sigma, v>, p max <sigma, v>)` over the support of the matrix.
    /// Every log-log slope of `V^index` lies in this range.
    pub fn slope_window(&self) -> Option<(f64, f64)> {
        self.window_for(self.class.sigma())
    }

    fn window_for(&self, sigma: &[f64]) -> Option<(f64, f64)> {
        let (lo, hi) = self
            .support
            .iter()
            .map(|e| e.pair(sigma))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w), hi.max(w)));
        let p = self.size as f64;
        (lo <= hi).then(|| (p * lo, p * hi))
    }

    /// `log V(t)`; `-inf` for the constantly zero function.
    pub fn log_eval(&self, t: f64, tol: f64) -> Result<f64> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositiveParameter(t));
        }
        if self.det_poly.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        let sigma = self.class.sigma();
        let log_t = t.ln();
        // A share of the tolerance per factor keeps the total within `tol`.
        let share = tol / self.factors.len() as f64;
        let mut log_v = 0.0;
        for f in &self.factors {
            log_v += f.log_eval(sigma, log_t, share)?;
        }
        Ok(log_v / self.index_divisor as f64)
    }

    pub fn eval(&self, t: f64, tol: f64) -> Result<f64> {
        Ok(self.log_eval(t, tol)?.exp())
    }

    /// `log V` on a grid, evaluated in parallel and returned in grid order.
    pub fn log_eval_grid(&self, grid: &[f64], tol: f64) -> Result<Vec<f64>> {
        grid.par_iter().map(|&t| self.log_eval(t, tol)).collect()
    }
}

/// Evaluates `V(t)`.
pub fn eval(v: &DetFunction, t: f64, tol: f64) -> Result<f64> {
    v.eval(t, tol)
}

/// `n` points from `lo` to `hi` in geometric progression.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "geometric grid needs 0 < lo < hi and n >= 2 (got {lo}:{hi}:{n})"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (a + (b - a) * k as f64 / last).exp(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityViolation {
    pub t_lo: f64,
    pub t_mid: f64,
    pub t_hi: f64,
    /// Amount by which `log V(t_mid)` exceeds the chord.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeViolation {
    pub t0: f64,
    pub t1: f64,
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConvexityReport {
    pub zero_function: bool,
    pub violations: Vec<ConvexityViolation>,
    pub slope_violations: Vec<SlopeViolation>,
    pub max_abs_slope: f64,
    /// `R(A, sigma)`, the width of the slope window.
    pub slope_bound: Option<f64>,
    /// Allowed range `[p min <sigma, v>, p max <sigma, v>]` of two-point slopes.
    pub slope_window: Option<(f64, f64)>,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.slope_violations.is_empty()
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidArgument("convexity grid needs at least 3 points".into()));
    }
    if grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Convexity of sampled `log f` against `log t`, plus an optional slope window.
///
/// Each adjacent triple must lie below its chord up to `tol`; on a geometric
/// grid this is the midpoint test at `t_mid = sqrt(t_lo t_hi)`.
pub fn convexity_check_samples(
    grid: &[f64],
    log_values: &[f64],
    tol: f64,
    slope_window: Option<(f64, f64)>,
) -> Result<ConvexityReport> {
    check_grid(grid)?;
    if grid.len() != log_values.len() {
        return Err(Error::Dimension("grid and sample counts differ".into()));
    }
    let xs: Vec<f64> = grid.iter().map(|t| t.ln()).collect();
    let mut report = ConvexityReport {
        slope_bound: slope_window.map(|(lo, hi)| hi - lo),
        slope_window,
        ..Default::default()
    };
    for k in 1..grid.len() - 1 {
        let (x0, x1, x2) = (xs[k - 1], xs[k], xs[k + 1]);
        let (y0, y1, y2) = (log_values[k - 1], log_values[k], log_values[k + 1]);
        let chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
        if y1 > chord + tol {
            report.violations.push(ConvexityViolation {
                t_lo: grid[k - 1],
                t_mid: grid[k],
                t_hi: grid[k + 1],
                excess: y1 - chord,
            });
        }
    }
    for k in 0..grid.len() - 1 {
        let slope = (log_values[k + 1] - log_values[k]) / (xs[k + 1] - xs[k]);
        report.max_abs_slope = report.max_abs_slope.max(slope.abs());
        if let Some((lo, hi)) = slope_window {
            if slope < lo - tol || slope > hi + tol {
                report.slope_violations.push(SlopeViolation {
                    t0: grid[k],
                    t1: grid[k + 1],
                    slope,
                });
            }
        }
    }
    Ok(report)
}

/// Multiplicative convexity of `V` on a grid. Slopes must stay within
/// `[p min <sigma, v>, p max <sigma, v>]` over the support of `A`, a window of
/// width `R(A, sigma)`.
pub fn convexity_check(v: &DetFunction, grid: &[f64], tol: f64) -> Result<ConvexityReport> {
    check_grid(grid)?;
    if v.is_zero() {
        return Ok(ConvexityReport {
            zero_function: true,
            ..Default::default()
        });
    }
    let values = v.log_eval_grid(grid, (tol * 1e-2).min(mahler::DEFAULT_TOL))?;
    let idx = v.index_divisor() as f64;
    let window = v.slope_window().map(|(lo, hi)| (lo / idx, hi / idx));
    convexity_check_samples(grid, &values, tol, window)
}

/// Which end of `R_+` an asymptote describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    PlusInfinity,
    ZeroPlus,
}

/// The extremal fiber of the weight map `v -> Phi v`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiefPart {
    pub w: Vec<i64>,
    /// `<r, w>`, the exponent of `t` contributed by this fiber.
    pub weight: f64,
    pub q: LaurentPoly,
}

/// Groups the monomials of `p` by `w = Phi v` and returns the group with the
/// largest (`+inf`) or smallest (`0+`) value of `<r, w>`.
pub fn chief_part(p: &LaurentPoly, class: &CohomClass, end: End) -> Result<ChiefPart> {
    let d = class.decomposition().ok_or(Error::MissingDecomposition)?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.nvars() != class.nvars() {
        return Err(Error::VariableMismatch {
            left: p.nvars(),
            right: class.nvars(),
        });
    }
    let mut groups: BTreeMap<Vec<i64>, Vec<(ExponentVector, Complex64)>> = BTreeMap::new();
    for (e, &c) in p.terms() {
        groups.entry(d.weight(e.as_slice())).or_default().push((e.clone(), c));
    }
    let mut ranked: Vec<(f64, Vec<i64>)> = groups.keys().map(|w| (d.pair(w), w.clone())).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (best, runner_up) = match end {
        End::PlusInfinity => (ranked.len() - 1, ranked.len().checked_sub(2)),
        End::ZeroPlus => (0, (ranked.len() > 1).then_some(1)),
    };
    if let Some(j) = runner_up {
        if (ranked[best].0 - ranked[j].0).abs() < TIE_TOLERANCE {
            return Err(Error::WeightTie {
                first: ranked[best].0,
                second: ranked[j].0,
            });
        }
    }
    let (weight, w) = ranked.swap_remove(best);
    let terms = groups.remove(&w).expect("group exists");
    let q = LaurentPoly::from_terms(p.nvars(), terms)?;
    let q = if p.is_integral() { q } else { q.uncertified() };
    Ok(ChiefPart { w, weight, q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoteMethod {
    ExactChiefPart,
    NumericFit,
    ClosedForm,
}

impl AsymptoteMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            AsymptoteMethod::ExactChiefPart => "exact-chief-part",
            AsymptoteMethod::NumericFit => "numeric-fit",
            AsymptoteMethod::ClosedForm => "closed-form",
        }
    }
}

impl fmt::Display for AsymptoteMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn root_of(x: f64, idx: f64) -> f64 {
    if idx == 1.0 {
        x
    } else {
        x.powf(1.0 / idx)
    }
}

/// Monomial asymptotes `V ~ C_± t^{d_±}` at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoteReport {
    pub d_plus: f64,
    pub d_minus: f64,
    pub deg_b: f64,
    pub c_plus: Option<f64>,
    pub c_minus: Option<f64>,
    pub method: AsymptoteMethod,
}

impl AsymptoteReport {
    pub fn new(
        d_plus: f64,
        d_minus: f64,
        c_plus: Option<f64>,
        c_minus: Option<f64>,
        method: AsymptoteMethod,
    ) -> Self {
        AsymptoteReport {
            d_plus,
            d_minus,
            deg_b: d_plus - d_minus,
            c_plus,
            c_minus,
            method,
        }
    }
}

/// Asymptote exponents and coefficients of `V`.
///
/// With a decomposition the exponents are `<r, w_top>` and `<r, w_bot>` and the
/// coefficients are Mahler measures of the chief parts. Without one, log-log
/// slopes between the fixed anchor points stand in.
pub fn asymptote(v: &DetFunction, tol: f64) -> Result<AsymptoteReport> {
    if v.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let idx = v.index_divisor() as f64;
    if v.class().decomposition().is_some() {
        let top = chief_part(v.det_poly(), v.class(), End::PlusInfinity)?;
        let bot = chief_part(v.det_poly(), v.class(), End::ZeroPlus)?;
        let c_top = root_of(mahler::mahler_mv(&top.q, tol)?, idx);
        let c_bot = root_of(mahler::mahler_mv(&bot.q, tol)?, idx);
        return Ok(AsymptoteReport::new(
            top.weight / idx,
            bot.weight / idx,
            Some(c_top),
            Some(c_bot),
            AsymptoteMethod::ExactChiefPart,
        ));
    }
    let fit = |(near, far): (f64, f64)| -> Result<(f64, Option<f64>)> {
        let (y0, y1) = (v.log_eval(near, tol)?, v.log_eval(far, tol)?);
        let slope = (y1 - y0) / (far.ln() - near.ln());
        let log_c = y1 - slope * far.ln();
        Ok((slope, log_c.is_finite().then(|| log_c.exp())))
    };
    let (d_plus, c_plus) = fit(FIT_ANCHORS_PLUS)?;
    let (d_minus, c_minus) = fit(FIT_ANCHORS_MINUS)?;
    Ok(AsymptoteReport::new(
        d_plus,
        d_minus,
        c_plus,
        c_minus,
        AsymptoteMethod::NumericFit,
    ))
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LipschitzReport {
    /// The determinant vanishes identically; nothing was checked.
    pub degenerate: bool,
    pub lambdas: Vec<f64>,
    pub degrees: Vec<f64>,
    /// `R(A, xi)`; pairwise bounds are `2 |lambda_i - lambda_j| R(A, xi)`.
    pub exponent_bound_xi: f64,
    /// Largest observed `|deg_i - deg_j| / bound_ij` over pairs with a positive bound.
    pub max_ratio: f64,
    pub violations: Vec<(usize, usize)>,
}

impl LipschitzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `sigma_lambda = base + lambda xi` for `lambda = k / steps` and checks
/// `|deg^b(V_i) - deg^b(V_j)| <= 2 R(A, (lambda_i - lambda_j) xi)` pairwise.
pub fn lipschitz_degree_check(
    a: &LaurentMatrix,
    base: &CohomClass,
    xi: &CohomClass,
    steps: usize,
    tol: f64,
) -> Result<LipschitzReport> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    if base.nvars() != xi.nvars() || a.nvars() != base.nvars() {
        return Err(Error::VariableMismatch {
            left: a.nvars(),
            right: xi.nvars(),
        });
    }
    let v = det_function(a, base)?;
    if v.is_zero() {
        return Ok(LipschitzReport {
            degenerate: true,
            ..Default::default()
        });
    }
    let r_xi = v.exponent_bound_for(xi.sigma()).expect("nonzero matrix");
    let lambdas: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    let degrees = lambdas
        .iter()
        .map(|&lam| {
            let class = base.affine(lam, xi)?;
            Ok(asymptote(&v.with_class(&class)?, tol)?.deg_b)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut report = LipschitzReport {
        degenerate: false,
        lambdas,
        degrees,
        exponent_bound_xi: r_xi,
        ..Default::default()
    };
    for i in 0..report.degrees.len() {
        for j in i + 1..report.degrees.len() {
            let diff = (report.degrees[i] - report.degrees[j]).abs();
            let bound = 2.0 * (report.lambdas[i] - report.lambdas[j]).abs() * r_xi;
            if diff > bound + 1e-9 {
                report.violations.push((i, j));
            }
            if bound > 0.0 {
                report.max_ratio = report.max_ratio.max(diff / bound);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(1, terms.iter().map(|&(e, c)| (vec![e], c))).unwrap()
    }

    fn sigma1() -> CohomClass {
        CohomClass::new(vec![1.0]).unwrap()
    }

    fn golden() -> (f64, f64) {
        let big = (3.0 + 5f64.sqrt()) / 2.0;
        (big, 1.0 / big)
    }

    #[test]
    fn one_minus_z_is_max_one_t() {
        let v = DetFunction::from_poly(&p1(&[(0, 1), (1, -1)]), &sigma1()).unwrap();
        for t in [0.01f64, 0.5, 1.0, 2.0, 5.0, 1e6] {
            let expect = t.max(1.0);
            assert!((v.eval(t, 1e-10).unwrap() / expect - 1.0).abs() < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn identity_is_constant_one() {
        let v = det_function(&LaurentMatrix::identity(3, 2), &CohomClass::new(vec![1.0, -2.0]).unwrap())
            .unwrap();
        for t in [1e-3, 1.0, 7.0] {
            assert_eq!(v.eval(t, 1e-8).unwrap(), 1.0);
        }
    }

    #[test]
    fn golden_quadratic_closed_form() {
        let v = DetFunction::from_poly(&p1(&[(2, 1), (1, -3), (0, 1)]), &sigma1()).unwrap();
        let (big, small) = golden();
        for t in [0.1f64, 0.38, 1.0, 2.0, 3.0, 100.0] {
            let expect = t.max(big) * t.max(small);
            assert!((v.eval(t, 1e-10).unwrap() / expect - 1.0).abs() < 1e-12);
        }
        assert!((v.eval(1.0, 1e-10).unwrap() - big).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_bad_t() {
        let v = DetFunction::from_poly(&p1(&[(1, 1)]), &sigma1()).unwrap();
        assert!(v.eval(0.0, 1e-8).is_err());
    }

    #[test]
    fn zero_determinant_is_zero_function() {
        let a = p1(&[(1, 1), (0, -1)]);
        let m = LaurentMatrix::from_rows(1, vec![vec![a.clone(), a.clone()], vec![a.clone(), a]]).unwrap();
        let v = det_function(&m, &sigma1()).unwrap();
        assert!(v.is_zero());
        assert_eq!(v.eval(2.0, 1e-8).unwrap(), 0.0);
        let grid = geometric_grid(0.1, 10.0, 5).unwrap();
        let report = convexity_check(&v, &grid, 1e-6).unwrap();
        assert!(report.zero_function && report.passed());
        assert_eq!(asymptote(&v, 1e-8), Err(Error::ZeroFunction));
    }

    #[test]
    fn convexity_of_max_one_t() {
        let v = DetFunction::from_poly(&p1(&[(0, 1), (1, -1)]), &sigma1()).unwrap();
        let grid = geometric_grid(2f64.powi(-10), 2f64.powi(10), 21).unwrap();
        let report = convexity_check(&v, &grid, 1e-9).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.max_abs_slope <= 1.0 + 1e-12);
    }

    #[test]
    fn concave_samples_are_flagged() {
        let grid = geometric_grid(2f64.powi(-10), 2f64.powi(10), 21).unwrap();
        let ys: Vec<f64> = grid.iter().map(|t: &f64| -(t.max(1.0).ln())).collect();
        let report = convexity_check_samples(&grid, &ys, 1e-9, None).unwrap();
        assert!(!report.passed());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].t_mid, 1.0);
    }

    #[test]
    fn grid_validation() {
        assert!(convexity_check_samples(&[1.0, 2.0], &[0.0, 0.0], 1e-9, None).is_err());
        assert!(convexity_check_samples(&[1.0, 3.0, 2.0], &[0.0; 3], 1e-9, None).is_err());
        assert!(geometric_grid(1.0, 1.0, 4).is_err());
        let g = geometric_grid(1e-3, 1e3, 41).unwrap();
        assert_eq!((g[0], g[40]), (1e-3, 1e3));
        assert!((g[20] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chief_parts_single_variable() {
        let p = p1(&[(2, 1), (1, -3), (0, 1)]);
        let top = chief_part(&p, &sigma1(), End::PlusInfinity).unwrap();
        assert_eq!(top.w, vec![2]);
        assert_eq!(top.q, p1(&[(2, 1)]));
        let bot = chief_part(&p, &sigma1(), End::ZeroPlus).unwrap();
        assert_eq!(bot.w, vec![0]);
        assert_eq!(bot.q, LaurentPoly::one(1));
    }

    #[test]
    fn chief_parts_irrational_weights() {
        let p = LaurentPoly::from_int_terms(2, [(vec![1, 1], 2), (vec![1, 0], 1), (vec![0, 0], 3)]).unwrap();
        let c = CohomClass::from_decomposition(vec![1.0, 2f64.sqrt()], vec![vec![1, 0], vec![0, 1]], 2)
            .unwrap();
        let top = chief_part(&p, &c, End::PlusInfinity).unwrap();
        assert_eq!(top.w, vec![1, 1]);
        assert_eq!(top.q, LaurentPoly::from_int_terms(2, [(vec![1, 1], 2)]).unwrap());
        assert!((top.weight - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn chief_part_collapsed_fiber() {
        // Phi = [[1, 0]] ignores z2, so z1 - z1 z2 + z1 z2^2 is a single fiber.
        let p = LaurentPoly::from_int_terms(2, [(vec![1, 0], 1), (vec![1, 1], -1), (vec![1, 2], 1)]).unwrap();
        let c = CohomClass::from_decomposition(vec![1.0], vec![vec![1, 0]], 2).unwrap();
        let top = chief_part(&p, &c, End::PlusInfinity).unwrap();
        assert_eq!(top.w, vec![1]);
        assert_eq!(top.q, p);
    }

    #[test]
    fn chief_part_ties_are_errors() {
        let p = LaurentPoly::from_int_terms(2, [(vec![1, 0], 1), (vec![0, 1], 1)]).unwrap();
        let c = CohomClass::from_decomposition(vec![1.0, 1.0], vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        assert!(matches!(
            chief_part(&p, &c, End::PlusInfinity),
            Err(Error::WeightTie { .. })
        ));
        let bare = CohomClass::without_decomposition(vec![1.0, 1.0]).unwrap();
        assert_eq!(chief_part(&p, &bare, End::PlusInfinity), Err(Error::MissingDecomposition));
    }

    #[test]
    fn asymptote_examples() {
        let v = DetFunction::from_poly(&p1(&[(2, 1), (1, -3), (0, 1)]), &sigma1()).unwrap();
        let r = asymptote(&v, 1e-8).unwrap();
        assert_eq!((r.d_plus, r.d_minus, r.deg_b), (2.0, 0.0, 2.0));
        assert_eq!((r.c_plus, r.c_minus), (Some(1.0), Some(1.0)));
        assert_eq!(r.method, AsymptoteMethod::ExactChiefPart);

        let v = DetFunction::from_poly(&p1(&[(0, 1), (1, -1)]), &sigma1()).unwrap();
        let r = asymptote(&v, 1e-8).unwrap();
        assert_eq!((r.d_plus, r.d_minus, r.deg_b), (1.0, 0.0, 1.0));
        assert_eq!((r.c_plus, r.c_minus), (Some(1.0), Some(1.0)));

        let v = DetFunction::from_poly(&p1(&[(0, 5)]), &sigma1()).unwrap();
        let r = asymptote(&v, 1e-8).unwrap();
        assert_eq!((r.d_plus, r.d_minus), (0.0, 0.0));
        assert_eq!((r.c_plus, r.c_minus), (Some(5.0), Some(5.0)));
    }

    #[test]
    fn numeric_fit_without_decomposition() {
        let c = CohomClass::without_decomposition(vec![1.0]).unwrap();
        let v = DetFunction::from_poly(&p1(&[(2, 1), (1, -3), (0, 1)]), &c).unwrap();
        let r = asymptote(&v, 1e-8).unwrap();
        assert_eq!(r.method, AsymptoteMethod::NumericFit);
        assert!((r.d_plus - 2.0).abs() < 1e-6 && r.d_minus.abs() < 1e-6);
        assert!((r.c_plus.unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn lipschitz_examples() {
        let a = LaurentMatrix::from_rows(1, vec![vec![p1(&[(0, 1), (1, -1)])]]).unwrap();
        let report = lipschitz_degree_check(&a, &sigma1(), &sigma1(), 2, 1e-8).unwrap();
        assert_eq!(report.degrees, vec![1.0, 1.5, 2.0]);
        assert_eq!(report.exponent_bound_xi, 1.0);
        assert!(report.passed());
        assert!((report.max_ratio - 0.5).abs() < 1e-12);

        let zero = CohomClass::new(vec![0.0]).unwrap();
        let report = lipschitz_degree_check(&a, &sigma1(), &zero, 4, 1e-8).unwrap();
        assert!(report.degrees.iter().all(|&d| d == 1.0));
        assert_eq!(report.max_ratio, 0.0);
        assert!(report.passed());
    }

    #[test]
    fn lipschitz_degenerate_determinant() {
        let m = LaurentMatrix::from_rows(1, vec![vec![LaurentPoly::zero(1)]]).unwrap();
        let report = lipschitz_degree_check(&m, &sigma1(), &sigma1(), 3, 1e-8).unwrap();
        assert!(report.degenerate);
    }
}
