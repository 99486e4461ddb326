//! L^2-Alexander torsion functions of 3-manifolds assembled from presentation
//! data or from the closed forms available for fibered and graph-manifold
//! classes, plus the three figure-eight gluing example.
//!
//! Torsion functions are only defined up to a factor `t^r`; every value
//! returned here is the representative produced by the given data.

use std::f64::consts::PI;

use crate::degree::{self, AsymptoteMethod, AsymptoteReport, DetFunction};
use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::twist::{self, CohomClass};

/// Volume of the regular ideal hyperbolic tetrahedron.
pub const V3: f64 = 1.0149416064096536;

/// Entropy of the figure-eight monodromy, `log((3 + sqrt 5) / 2)`.
pub fn figure_eight_entropy() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

/// Leading coefficient `exp(Vol / 6 pi)` carried by the value at `t = 1`.
pub fn volume_coefficient(volume: f64) -> f64 {
    (volume / (6.0 * PI)).exp()
}

/// Presentation data `tau = det^r(kappa(A)) * prod_i max(t^{a_i}, t^{b_i})^{-1}`,
/// where `(a_i, b_i) = (phi(u_i), phi(v_i))`.
#[derive(Clone, Debug)]
pub struct TorsionSpec {
    pub matrix: LaurentMatrix,
    pub class: CohomClass,
    pub pairs: Vec<(f64, f64)>,
    pub index_divisor: u32,
    pub label: String,
}

impl TorsionSpec {
    pub fn new(matrix: LaurentMatrix, class: CohomClass) -> Self {
        TorsionSpec {
            matrix,
            class,
            pairs: Vec::new(),
            index_divisor: 1,
            label: String::new(),
        }
    }

    pub fn with_pairs(mut self, pairs: Vec<(f64, f64)>) -> Self {
        self.pairs = pairs;
        self
    }
}

/// A value of a torsion function, which may be left open by the closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorsionValue {
    Value(f64),
    Unspecified,
}

impl TorsionValue {
    pub fn value(self) -> Option<f64> {
        match self {
            TorsionValue::Value(v) => Some(v),
            TorsionValue::Unspecified => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum TorsionFunction {
    Presentation {
        numerator: DetFunction,
        pairs: Vec<(f64, f64)>,
        label: String,
    },
    /// Fibered class with monodromy entropy `entropy` and Thurston norm `norm`.
    /// A zero `norm` stands for the zero class, whose torsion is the constant
    /// `exp(Vol / 6 pi)`.
    Fibered {
        entropy: f64,
        norm: f64,
        volume: Option<f64>,
    },
    /// Class on a manifold of zero simplicial volume.
    Graph { norm: f64 },
    Product(Vec<TorsionFunction>),
}

/// Assembles `tau` from presentation data. The index divisor rescales the
/// determinant factor only; the pair factors are already determinants of
/// group elements.
pub fn torsion_from_presentation(spec: &TorsionSpec) -> Result<TorsionFunction> {
    if spec.pairs.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(Error::InvalidArgument("pair values must be finite".into()));
    }
    let v = degree::det_function(&spec.matrix, &spec.class)?;
    let numerator = twist::index_rescale(&v, spec.index_divisor)?;
    if numerator.is_zero() {
        log::warn!("torsion {:?} has a vanishing determinant; assigning the value 0", spec.label);
    }
    Ok(TorsionFunction::Presentation {
        numerator,
        pairs: spec.pairs.clone(),
        label: spec.label.clone(),
    })
}

/// Closed form on fibered classes: `1` below `e^{-h}`, `t^x` above `e^h`,
/// unspecified in between.
pub fn fibered_torsion(h: f64, x: f64, t: f64) -> Result<TorsionValue> {
    if !(h >= 0.0 && x >= 0.0) {
        return Err(Error::InvalidArgument(format!("need h >= 0 and x >= 0, got h = {h}, x = {x}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveParameter(t));
    }
    Ok(if t < (-h).exp() {
        TorsionValue::Value(1.0)
    } else if t > h.exp() {
        TorsionValue::Value(t.powf(x))
    } else {
        TorsionValue::Unspecified
    })
}

/// Closed form for zero simplicial volume: `max(1, t)^x`.
pub fn graph_torsion(x: f64, t: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("norm must be nonnegative, got {x}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveParameter(t));
    }
    Ok(t.max(1.0).powf(x))
}

/// Torsion of a manifold glued from pieces along tori: the pointwise product.
pub fn glue(pieces: Vec<TorsionFunction>) -> Result<TorsionFunction> {
    if pieces.is_empty() {
        return Err(Error::InvalidArgument("glue needs at least one piece".into()));
    }
    let mut flat = Vec::with_capacity(pieces.len());
    for p in pieces {
        match p {
            TorsionFunction::Product(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    Ok(if flat.len() == 1 {
        flat.pop().expect("one piece")
    } else {
        TorsionFunction::Product(flat)
    })
}

impl TorsionFunction {
    /// Whether the underlying determinant vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            TorsionFunction::Presentation { numerator, .. } => numerator.is_zero(),
            TorsionFunction::Product(ps) => ps.iter().any(TorsionFunction::is_zero),
            _ => false,
        }
    }

    pub fn eval(&self, t: f64, tol: f64) -> Result<TorsionValue> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositiveParameter(t));
        }
        match self {
            TorsionFunction::Presentation { numerator, pairs, .. } => {
                let log_v = numerator.log_eval(t, tol)?;
                let log_pairs: f64 = pairs.iter().map(|&(a, b)| a.max(b) * t.ln().max(0.0) + a.min(b) * t.ln().min(0.0)).sum();
                Ok(TorsionValue::Value((log_v - log_pairs).exp()))
            }
            TorsionFunction::Fibered { entropy, norm, volume } => {
                if *norm == 0.0 {
                    return Ok(match volume {
                        Some(vol) => TorsionValue::Value(volume_coefficient(*vol)),
                        None => TorsionValue::Unspecified,
                    });
                }
                if t == 1.0 {
                    if let Some(vol) = volume {
                        return Ok(TorsionValue::Value(volume_coefficient(*vol)));
                    }
                }
                fibered_torsion(*entropy, *norm, t)
            }
            TorsionFunction::Graph { norm } => Ok(TorsionValue::Value(graph_torsion(*norm, t)?)),
            TorsionFunction::Product(ps) => {
                let mut acc = 1.0;
                for p in ps {
                    match p.eval(t, tol)? {
                        TorsionValue::Value(v) => acc *= v,
                        TorsionValue::Unspecified => return Ok(TorsionValue::Unspecified),
                    }
                }
                Ok(TorsionValue::Value(acc))
            }
        }
    }

    /// `log tau(t)`, failing where the value is unspecified.
    pub fn log_eval(&self, t: f64, tol: f64) -> Result<f64> {
        match self.eval(t, tol)? {
            TorsionValue::Value(v) => Ok(v.ln()),
            TorsionValue::Unspecified => Err(Error::Unspecified(t)),
        }
    }

    /// Value of the symmetric representative `tau(t) / t^{(d_+ + d_-)/2}`.
    pub fn eval_normalized(&self, t: f64, tol: f64) -> Result<TorsionValue> {
        let report = torsion_degree(self, tol)?;
        let shift = 0.5 * (report.d_plus + report.d_minus);
        Ok(match self.eval(t, tol)? {
            TorsionValue::Value(v) => TorsionValue::Value(v * t.powf(-shift)),
            TorsionValue::Unspecified => TorsionValue::Unspecified,
        })
    }

    /// Sum of `|a_i - b_i|` over the pair factors, recursively.
    pub fn pair_degree(&self) -> f64 {
        match self {
            TorsionFunction::Presentation { pairs, .. } => pairs.iter().map(|(a, b)| (a - b).abs()).sum(),
            TorsionFunction::Product(ps) => ps.iter().map(TorsionFunction::pair_degree).sum(),
            _ => 0.0,
        }
    }
}

fn combine_methods(a: AsymptoteMethod, b: AsymptoteMethod) -> AsymptoteMethod {
    use AsymptoteMethod::*;
    match (a, b) {
        (NumericFit, _) | (_, NumericFit) => NumericFit,
        (ExactChiefPart, _) | (_, ExactChiefPart) => ExactChiefPart,
        _ => ClosedForm,
    }
}

/// Asymptote exponents and leading coefficients of a torsion function.
pub fn torsion_degree(tau: &TorsionFunction, tol: f64) -> Result<AsymptoteReport> {
    if tau.is_zero() {
        return Err(Error::ZeroFunction);
    }
    match tau {
        TorsionFunction::Presentation { numerator, pairs, .. } => {
            let mut r = degree::asymptote(numerator, tol)?;
            for &(a, b) in pairs {
                r.d_plus -= a.max(b);
                r.d_minus -= a.min(b);
            }
            Ok(AsymptoteReport::new(r.d_plus, r.d_minus, r.c_plus, r.c_minus, r.method))
        }
        TorsionFunction::Fibered { norm, volume, .. } => {
            let c = if *norm == 0.0 {
                volume.map(volume_coefficient)
            } else {
                Some(1.0)
            };
            Ok(AsymptoteReport::new(*norm, 0.0, c, c, AsymptoteMethod::ClosedForm))
        }
        TorsionFunction::Graph { norm } => Ok(AsymptoteReport::new(
            *norm,
            0.0,
            Some(1.0),
            Some(1.0),
            AsymptoteMethod::ClosedForm,
        )),
        TorsionFunction::Product(ps) => {
            let mut acc = AsymptoteReport::new(0.0, 0.0, Some(1.0), Some(1.0), AsymptoteMethod::ClosedForm);
            for p in ps {
                let r = torsion_degree(p, tol)?;
                acc = AsymptoteReport::new(
                    acc.d_plus + r.d_plus,
                    acc.d_minus + r.d_minus,
                    acc.c_plus.zip(r.c_plus).map(|(a, b)| a * b),
                    acc.c_minus.zip(r.c_minus).map(|(a, b)| a * b),
                    combine_methods(acc.method, r.method),
                );
            }
            Ok(acc)
        }
    }
}

/// Result of comparing two torsion functions modulo a factor `t^r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Fitted exponent `r` in `log tau - log tau_other = r log t + b`.
    pub r: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

/// Least-squares fit of `log tau(t) - log tau_other(t)` against `log t`.
pub fn symmetry_check(
    tau: &TorsionFunction,
    tau_other: &TorsionFunction,
    grid: &[f64],
    tol: f64,
) -> Result<SymmetryReport> {
    if tau.is_zero() || tau_other.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if grid.len() < 2 {
        return Err(Error::InvalidArgument("symmetry check needs at least 2 grid points".into()));
    }
    let xs: Vec<f64> = grid.iter().map(|t| t.ln()).collect();
    let ys = grid
        .iter()
        .map(|&t| Ok(tau.log_eval(t, tol)? - tau_other.log_eval(t, tol)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(affine_fit(&xs, &ys))
}

fn affine_fit(xs: &[f64], ys: &[f64]) -> SymmetryReport {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let r = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - r * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - r * x - intercept).abs())
        .fold(0.0, f64::max);
    SymmetryReport {
        r,
        intercept,
        max_residual,
    }
}

/// Class `(phi_0, phi_1, phi_2)` on the three figure-eight pieces, with `sum = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section9Scenario {
    pub phi: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section9Result {
    pub norm: f64,
    pub delta: u32,
    pub leading: f64,
    /// `exp(Vol / 6 pi)` with `Vol = 6 v_3`.
    pub vol_check: f64,
}

/// Coordinates within this distance of zero count as zero.
pub const ZERO_COORDINATE_TOL: f64 = 1e-12;

impl Section9Scenario {
    pub fn new(phi: [f64; 3]) -> Result<Self> {
        if phi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("phi must be finite".into()));
        }
        let sum: f64 = phi.iter().sum();
        let scale = phi.iter().map(|x| x.abs()).fold(1.0, f64::max);
        if sum.abs() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "phi_0 + phi_1 + phi_2 must vanish, got {sum}"
            )));
        }
        Ok(Section9Scenario { phi })
    }

    /// Total simplicial volume `6 v_3` of the three pieces.
    pub fn volume(&self) -> f64 {
        6.0 * V3
    }

    fn is_zero_coordinate(x: f64) -> bool {
        x.abs() <= ZERO_COORDINATE_TOL
    }

    pub fn result(&self) -> Section9Result {
        let norm = self.phi.iter().map(|x| x.abs()).sum();
        for &x in &self.phi {
            if x != 0.0 && Self::is_zero_coordinate(x) {
                log::warn!("treating coordinate {x:e} as zero");
            }
        }
        let delta = self.phi.iter().filter(|&&x| Self::is_zero_coordinate(x)).count() as u32;
        Section9Result {
            norm,
            delta,
            leading: (delta as f64 * V3 / (3.0 * PI)).exp(),
            vol_check: volume_coefficient(self.volume()),
        }
    }

    /// Glued torsion of the three fibered pieces.
    pub fn torsion(&self) -> TorsionFunction {
        let h = figure_eight_entropy();
        let pieces = self
            .phi
            .iter()
            .map(|&x| {
                let a = if Self::is_zero_coordinate(x) { 0.0 } else { x.abs() };
                TorsionFunction::Fibered {
                    entropy: a * h,
                    norm: a,
                    volume: Some(2.0 * V3),
                }
            })
            .collect();
        glue(pieces).expect("three pieces")
    }
}

/// Norm, zero count, leading coefficient and volume check for a class.
pub fn section9(phi: [f64; 3]) -> Result<Section9Result> {
    Ok(Section9Scenario::new(phi)?.result())
}

/// Vertices of the unit ball of the Thurston norm in the plane `sum = 0`.
pub const HEXAGON_VERTICES: [[f64; 3]; 6] = [
    [0.5, -0.5, 0.0],
    [0.5, 0.0, -0.5],
    [0.0, 0.5, -0.5],
    [-0.5, 0.5, 0.0],
    [-0.5, 0.0, 0.5],
    [0.0, -0.5, 0.5],
];

/// Membership of `phi` in the convex hull of [`HEXAGON_VERTICES`].
pub fn in_hexagon(phi: [f64; 3]) -> bool {
    // Coordinates in the plane: e1 = (1, -1, 0)/sqrt2, e2 = (1, 1, -2)/sqrt6.
    let project = |p: [f64; 3]| {
        (
            (p[0] - p[1]) / 2f64.sqrt(),
            (p[0] + p[1] - 2.0 * p[2]) / 6f64.sqrt(),
        )
    };
    let mut pts: Vec<(f64, f64)> = HEXAGON_VERTICES.iter().map(|&v| project(v)).collect();
    pts.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
    let (x, y) = project(phi);
    (0..pts.len()).all(|i| {
        let (ax, ay) = pts[i];
        let (bx, by) = pts[(i + 1) % pts.len()];
        (bx - ax) * (y - ay) - (by - ay) * (x - ax) >= -1e-12
    })
}

/// `true` iff `norm(phi) <= 1` agrees with hexagon membership.
pub fn hexagon_norm_check(phi: [f64; 3]) -> Result<bool> {
    let result = section9(phi)?;
    Ok((result.norm <= 1.0 + 1e-12) == in_hexagon(phi))
}
