//! Real cohomology classes on a free abelian target and the twist
//! `z^v -> t^{<sigma, v>} z^v`.

use serde::{Deserialize, Serialize};

use crate::degree::DetFunction;
use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPoly};

/// Largest denominator accepted when recovering a rational class from floats.
pub const MAX_RATIONAL_DENOMINATOR: i64 = 1_000_000;

/// Integral decomposition `sigma = sum_i r_i * phi_i` with `r_i > 0` and
/// integral rows `phi_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    r: Vec<f64>,
    phi: Vec<Vec<i64>>,
}

impl Decomposition {
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Rows `phi_i(z_1), ..., phi_i(z_l)`.
    pub fn phi(&self) -> &[Vec<i64>] {
        &self.phi
    }

    pub fn rank(&self) -> usize {
        self.r.len()
    }

    /// The integer weight `Phi v`.
    pub fn weight(&self, v: &[i64]) -> Vec<i64> {
        self.phi
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<r, w>` for an integer weight.
    pub fn pair(&self, w: &[i64]) -> f64 {
        self.r.iter().zip(w).map(|(r, &k)| r * k as f64).sum()
    }
}

/// A real covector `sigma` on the generators `z_1..z_l`, optionally with an
/// integral decomposition enabling exact asymptotics.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomClass {
    sigma: Vec<f64>,
    decomposition: Option<Decomposition>,
}

/// Wire form `{"sigma": [...], "r": [...]?, "phi": [[...]]?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerializedClass {
    pub sigma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<i64>>>,
}

impl CohomClass {
    /// Class from a bare covector. When every entry is rational with a
    /// denominator of at most 10^6, a rank-one decomposition
    /// `sigma = (g / L) * (L sigma / g)` is attached automatically.
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidClass("sigma has non-finite entries".into()));
        }
        let decomposition = rational_decomposition(&sigma);
        Ok(CohomClass {
            sigma,
            decomposition,
        })
    }

    /// Class with no decomposition, even when `sigma` is rational.
    pub fn without_decomposition(sigma: Vec<f64>) -> Result<Self> {
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidClass("sigma has non-finite entries".into()));
        }
        Ok(CohomClass {
            sigma,
            decomposition: None,
        })
    }

    /// Class defined by a decomposition; `sigma_j = sum_i r_i Phi_ij`.
    ///
    /// The caller asserts that the entries of `r` are linearly independent
    /// over the rationals; this cannot be checked numerically.
    pub fn from_decomposition(r: Vec<f64>, phi: Vec<Vec<i64>>, nvars: usize) -> Result<Self> {
        if r.len() != phi.len() {
            return Err(Error::Dimension(format!(
                "r has {} entries but phi has {} rows",
                r.len(),
                phi.len()
            )));
        }
        if let Some(row) = phi.iter().find(|row| row.len() != nvars) {
            return Err(Error::Dimension(format!(
                "phi row has {} entries, expected {nvars}",
                row.len()
            )));
        }
        if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidClass("r entries must be positive".into()));
        }
        let sigma = (0..nvars)
            .map(|j| r.iter().zip(&phi).map(|(ri, row)| ri * row[j] as f64).sum())
            .collect();
        Ok(CohomClass {
            sigma,
            decomposition: Some(Decomposition { r, phi }),
        })
    }

    /// Class with an explicit sigma and decomposition that must agree to 1e-12 relative.
    pub fn with_decomposition(sigma: Vec<f64>, r: Vec<f64>, phi: Vec<Vec<i64>>) -> Result<Self> {
        let built = Self::from_decomposition(r, phi, sigma.len())?;
        for (a, b) in sigma.iter().zip(&built.sigma) {
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidClass(format!(
                    "sigma entry {a} disagrees with decomposition value {b}"
                )));
            }
        }
        Ok(CohomClass {
            sigma,
            decomposition: built.decomposition,
        })
    }

    pub fn from_serialized(s: &SerializedClass) -> Result<Self> {
        match (&s.r, &s.phi) {
            (None, None) => Self::new(s.sigma.clone()),
            (Some(r), Some(phi)) => Self::with_decomposition(s.sigma.clone(), r.clone(), phi.clone()),
            _ => Err(Error::InvalidClass("\"r\" and \"phi\" must be given together".into())),
        }
    }

    pub fn to_serialized(&self) -> SerializedClass {
        SerializedClass {
            sigma: self.sigma.clone(),
            r: self.decomposition.as_ref().map(|d| d.r.clone()),
            phi: self.decomposition.as_ref().map(|d| d.phi.clone()),
        }
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn nvars(&self) -> usize {
        self.sigma.len()
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        self.decomposition.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.sigma.iter().all(|&s| s == 0.0)
    }

    /// The class `c * sigma`. The decomposition follows along: `r` scales by
    /// `|c|` and `Phi` flips sign when `c < 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let sigma: Vec<f64> = self.sigma.iter().map(|s| c * s).collect();
        if c == 0.0 {
            return Self::new(sigma);
        }
        let decomposition = self.decomposition.as_ref().map(|d| Decomposition {
            r: d.r.iter().map(|r| r * c.abs()).collect(),
            phi: if c < 0.0 {
                d.phi.iter().map(|row| row.iter().map(|x| -x).collect()).collect()
            } else {
                d.phi.clone()
            },
        });
        Ok(CohomClass {
            sigma,
            decomposition,
        })
    }

    /// `self + lambda * other`, re-deriving a rational decomposition if possible.
    pub fn affine(&self, lambda: f64, other: &Self) -> Result<Self> {
        if self.nvars() != other.nvars() {
            return Err(Error::VariableMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        Self::new(
            self.sigma
                .iter()
                .zip(&other.sigma)
                .map(|(a, b)| a + lambda * b)
                .collect(),
        )
    }
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only when it matches `x` to 1e-12 relative.
pub fn rational_approx(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1 as i64, k1 as i64));
        }
        let frac = rem - a as f64;
        if frac == 0.0 {
            break;
        }
        rem = 1.0 / frac;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn rational_decomposition(sigma: &[f64]) -> Option<Decomposition> {
    let fracs: Vec<(i64, i64)> = sigma
        .iter()
        .map(|&s| rational_approx(s, MAX_RATIONAL_DENOMINATOR))
        .collect::<Option<_>>()?;
    let mut lcm: i64 = 1;
    for &(_, q) in &fracs {
        lcm = lcm.checked_mul(q / gcd(lcm, q))?;
    }
    let ints: Vec<i64> = fracs
        .iter()
        .map(|&(p, q)| p.checked_mul(lcm / q))
        .collect::<Option<_>>()?;
    let g = ints.iter().fold(0, |acc, &x| gcd(acc, x));
    if g == 0 {
        return Some(Decomposition {
            r: vec![],
            phi: vec![],
        });
    }
    Some(Decomposition {
        r: vec![g as f64 / lcm as f64],
        phi: vec![ints.iter().map(|x| x / g).collect()],
    })
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter(t))
    }
}

/// `t^x`, always computed from the base `max(t, 1/t)` so that the factors at
/// `t` and `1/t` are the same power with negated exponent.
pub fn twist_factor(t: f64, x: f64) -> f64 {
    if t >= 1.0 {
        t.powf(x)
    } else {
        (1.0 / t).powf(-x)
    }
}

/// Twist `a z^v -> a t^{<sigma, v>} z^v`. Exponents are kept; the integer
/// certificate survives only at `t = 1`.
pub fn twist_poly(p: &LaurentPoly, class: &CohomClass, t: f64) -> Result<LaurentPoly> {
    check_t(t)?;
    if p.nvars() != class.nvars() {
        return Err(Error::VariableMismatch {
            left: p.nvars(),
            right: class.nvars(),
        });
    }
    if t == 1.0 {
        return Ok(p.clone());
    }
    let sigma = class.sigma();
    Ok(p.map_coefficients(|e, c| c * twist_factor(t, e.pair(sigma))))
}

/// Multivariable twist `a z^v -> a prod_i t_i^{(Phi v)_i} z^v`.
pub fn twist_poly_multi(p: &LaurentPoly, class: &CohomClass, tvec: &[f64]) -> Result<LaurentPoly> {
    let d = class.decomposition().ok_or(Error::MissingDecomposition)?;
    if tvec.len() != d.rank() {
        return Err(Error::Dimension(format!(
            "expected {} twist parameters, got {}",
            d.rank(),
            tvec.len()
        )));
    }
    if p.nvars() != class.nvars() {
        return Err(Error::VariableMismatch {
            left: p.nvars(),
            right: class.nvars(),
        });
    }
    for &t in tvec {
        check_t(t)?;
    }
    if tvec.iter().all(|&t| t == 1.0) {
        return Ok(p.clone());
    }
    Ok(p.map_coefficients(|e, c| {
        let w = d.weight(e.as_slice());
        let factor: f64 = tvec.iter().zip(&w).map(|(&t, &k)| twist_factor(t, k as f64)).product();
        c * factor
    }))
}

/// Effective per-variable parameters `t~_j = prod_i t_i^{phi_i(z_j)}`.
pub fn effective_parameters(class: &CohomClass, tvec: &[f64]) -> Result<Vec<f64>> {
    let d = class.decomposition().ok_or(Error::MissingDecomposition)?;
    if tvec.len() != d.rank() {
        return Err(Error::Dimension(format!(
            "expected {} twist parameters, got {}",
            d.rank(),
            tvec.len()
        )));
    }
    Ok((0..class.nvars())
        .map(|j| {
            d.phi()
                .iter()
                .zip(tvec)
                .map(|(row, t)| t.powi(row[j] as i32))
                .product()
        })
        .collect())
}

/// `R(A, sigma) = p * (max - min)` of `<sigma, v>` over the monomial support of `A`.
pub fn exponent_bound(a: &LaurentMatrix, class: &CohomClass) -> Result<f64> {
    if a.nvars() != class.nvars() {
        return Err(Error::VariableMismatch {
            left: a.nvars(),
            right: class.nvars(),
        });
    }
    let weights = a
        .entries()
        .flat_map(|p| p.terms().map(|(e, _)| e.pair(class.sigma())));
    let (lo, hi) = weights.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
        (lo.min(w), hi.max(w))
    });
    if lo > hi {
        return Err(Error::ZeroMatrix);
    }
    Ok(a.size() as f64 * (hi - lo))
}

/// Passes to a finite-index free abelian subgroup: `V(t) = V~(t)^{1/index}`.
pub fn index_rescale(v: &DetFunction, index: u32) -> Result<DetFunction> {
    if index == 0 {
        return Err(Error::InvalidArgument("index must be at least 1".into()));
    }
    Ok(v.with_index_divisor(v.index_divisor() * index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn p1(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_int_terms(1, terms.iter().map(|&(e, c)| (vec![e], c))).unwrap()
    }

    #[test]
    fn single_monomial_twist() {
        let p = p1(&[(2, 1)]);
        let c = CohomClass::new(vec![1.0]).unwrap();
        let q = twist_poly(&p, &c, 10.0).unwrap();
        assert_eq!(q.coeff(&vec![2].into()), Complex64::new(100.0, 0.0));
        assert!(!q.is_integral());
    }

    #[test]
    fn twist_at_one_is_identity() {
        let p = p1(&[(2, 1), (0, -3), (-1, 2)]);
        let c = CohomClass::new(vec![0.7]).unwrap();
        let q = twist_poly(&p, &c, 1.0).unwrap();
        assert_eq!(q, p);
        assert!(q.is_integral());
    }

    #[test]
    fn twist_rejects_nonpositive_t() {
        let c = CohomClass::new(vec![1.0]).unwrap();
        for t in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                twist_poly(&LaurentPoly::one(1), &c, t),
                Err(Error::NonPositiveParameter(_))
            ));
        }
    }

    #[test]
    fn multi_twist_direct_product() {
        let p = LaurentPoly::from_int_terms(2, [(vec![1, 1], 1)]).unwrap();
        let c = CohomClass::from_decomposition(vec![1.0, 2f64.sqrt()], vec![vec![1, 0], vec![0, 1]], 2)
            .unwrap();
        let q = twist_poly_multi(&p, &c, &[2.0, 3.0]).unwrap();
        assert_eq!(q.coeff(&vec![1, 1].into()), Complex64::new(6.0, 0.0));
        assert_eq!(twist_poly_multi(&p, &c, &[1.0, 1.0]).unwrap(), p);
    }

    #[test]
    fn multi_twist_needs_decomposition() {
        let c = CohomClass::without_decomposition(vec![1.0]).unwrap();
        assert_eq!(
            twist_poly_multi(&LaurentPoly::one(1), &c, &[2.0]),
            Err(Error::MissingDecomposition)
        );
        let c = CohomClass::new(vec![1.0]).unwrap();
        assert!(matches!(
            twist_poly_multi(&LaurentPoly::one(1), &c, &[2.0, 3.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn effective_parameters_match_definition() {
        let c = CohomClass::from_decomposition(vec![1.0, 0.5], vec![vec![1, -1], vec![2, 0]], 2).unwrap();
        let tt = effective_parameters(&c, &[3.0, 5.0]).unwrap();
        assert_eq!(tt, vec![3.0 * 25.0, 1.0 / 3.0]);
    }

    #[test]
    fn rational_classes_decompose() {
        let c = CohomClass::new(vec![0.5, -1.5, 2.0]).unwrap();
        let d = c.decomposition().unwrap();
        assert_eq!(d.r(), &[0.5]);
        assert_eq!(d.phi(), &[vec![1, -3, 4]]);

        let c = CohomClass::new(vec![4.0, 6.0]).unwrap();
        let d = c.decomposition().unwrap();
        assert_eq!(d.r(), &[2.0]);
        assert_eq!(d.phi(), &[vec![2, 3]]);

        let zero = CohomClass::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(zero.decomposition().unwrap().rank(), 0);

        assert!(CohomClass::new(vec![2f64.sqrt()]).unwrap().decomposition().is_none());
        assert_eq!(rational_approx(1.0 / 3.0, 1_000_000), Some((1, 3)));
        assert_eq!(rational_approx(-0.142857142857142857, 1_000_000), Some((-1, 7)));
    }

    #[test]
    fn decomposition_must_match_sigma() {
        assert!(CohomClass::with_decomposition(vec![1.0], vec![0.5], vec![vec![2]]).is_ok());
        assert!(CohomClass::with_decomposition(vec![1.0], vec![0.5], vec![vec![3]]).is_err());
        assert!(CohomClass::from_decomposition(vec![-1.0], vec![vec![1]], 1).is_err());
        assert!(CohomClass::from_decomposition(vec![1.0], vec![vec![1, 2]], 1).is_err());
    }

    #[test]
    fn exponent_bound_examples() {
        let a = LaurentMatrix::from_rows(1, vec![vec![p1(&[(0, 1), (1, -1)])]]).unwrap();
        let c = CohomClass::new(vec![1.0]).unwrap();
        assert_eq!(exponent_bound(&a, &c).unwrap(), 1.0);

        let k = LaurentMatrix::from_rows(
            1,
            vec![vec![p1(&[(0, 2)]), p1(&[(0, -1)])], vec![p1(&[(0, 5)]), LaurentPoly::zero(1)]],
        )
        .unwrap();
        assert_eq!(exponent_bound(&k, &c).unwrap(), 0.0);

        let zero = LaurentMatrix::from_rows(1, vec![vec![LaurentPoly::zero(1)]]).unwrap();
        assert_eq!(exponent_bound(&zero, &c), Err(Error::ZeroMatrix));
    }

    #[test]
    fn scaled_class_keeps_decomposition_consistent() {
        let c = CohomClass::from_decomposition(vec![1.0, 2f64.sqrt()], vec![vec![1, 0], vec![1, 1]], 2)
            .unwrap();
        let neg = c.scaled(-2.0).unwrap();
        let rebuilt = CohomClass::from_decomposition(
            neg.decomposition().unwrap().r().to_vec(),
            neg.decomposition().unwrap().phi().to_vec(),
            2,
        )
        .unwrap();
        for (a, b) in neg.sigma().iter().zip(rebuilt.sigma()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn class_roundtrip() {
        let c = CohomClass::from_decomposition(vec![1.0, 2f64.sqrt()], vec![vec![1, 0], vec![0, 1]], 2)
            .unwrap();
        let back = CohomClass::from_serialized(&c.to_serialized()).unwrap();
        assert_eq!(back, c);
    }
}
