//! Sparse multivariate Laurent polynomials over the complex numbers and
//! square matrices over them.
//!
//! Coefficients are `Complex64`. A polynomial whose coefficients are all real
//! integers below 2^53 in magnitude carries an *integer certificate*; ring
//! operations on certified inputs are carried out in `i128` and stay exact.
//! Terms are kept in a `BTreeMap`, so iteration is lexicographic in the
//! exponent vector and equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest magnitude (exclusive) for which an integer coefficient is exact in an `f64`.
pub const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// Float-path coefficients below this fraction of the largest coefficient are dropped.
pub const FLOAT_PRUNE_REL: f64 = 1e-15;

/// Exponents of `z_1 ... z_l` in a monomial; an element of the free abelian group `Z^l`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn zeros(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    /// The `j`-th unit vector in `Z^nvars`.
    pub fn unit(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        ExponentVector(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `<sigma, v>` for a real covector.
    pub fn pair(&self, sigma: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(sigma)
            .map(|(&e, &s)| e as f64 * s)
            .sum()
    }

    pub fn checked_add(&self, other: &Self) -> ExponentVector {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &Self) -> ExponentVector {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ExponentVector {
    type Output = ExponentVector;
    fn neg(self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|e| -e).collect())
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

fn is_exact_integer(c: Complex64) -> bool {
    c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < EXACT_INT_LIMIT
}

/// Element of `C[z_1^{±1}, ..., z_l^{±1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<ExponentVector, Complex64>,
    integral: bool,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
            integral: true,
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Complex64::new(1.0, 0.0))
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self::monomial(ExponentVector::zeros(nvars), c)
    }

    pub fn monomial(exp: ExponentVector, c: Complex64) -> Self {
        let nvars = exp.len();
        Self::from_terms(nvars, [(exp, c)]).expect("monomial has matching variable count")
    }

    /// The variable `z_j` in `nvars` variables.
    pub fn var(nvars: usize, j: usize) -> Self {
        Self::monomial(ExponentVector::unit(nvars, j), Complex64::new(1.0, 0.0))
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    ///
    /// The integer certificate is set when every resulting coefficient is an
    /// exactly representable real integer.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Complex64)>,
    {
        let mut map: BTreeMap<ExponentVector, Complex64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::VariableMismatch {
                    left: nvars,
                    right: e.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite coefficient {c}")));
            }
            *map.entry(e).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        let integral = map.values().all(|&c| is_exact_integer(c));
        Ok(LaurentPoly {
            nvars,
            terms: map,
            integral,
        })
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, i64)>,
    {
        Self::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(e, c)| (ExponentVector(e), Complex64::new(c as f64, 0.0))),
        )
    }

    /// One-variable polynomial `sum_k coeffs[k] z^(low + k)`.
    pub fn univariate(low: i64, coeffs: &[Complex64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (ExponentVector(vec![low + k as i64]), c));
        Self::from_terms(1, terms).expect("univariate terms have one variable")
    }

    /// Wraps a term map without arithmetic pruning. Only exact zeros are dropped,
    /// and the certificate is whatever the caller asserts (and the values permit).
    pub(crate) fn from_raw(
        nvars: usize,
        mut terms: BTreeMap<ExponentVector, Complex64>,
        integral: bool,
    ) -> Self {
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        let integral = integral && terms.values().all(|&c| is_exact_integer(c));
        LaurentPoly {
            nvars,
            terms,
            integral,
        }
    }

    /// Finishes an arithmetic result: exact zero removal on the integer path,
    /// relative dust removal on the float path.
    fn finish(nvars: usize, mut terms: BTreeMap<ExponentVector, Complex64>, integral: bool) -> Self {
        if integral {
            return Self::from_raw(nvars, terms, true);
        }
        let scale = terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cutoff = FLOAT_PRUNE_REL * scale;
        terms.retain(|_, c| c.norm() > cutoff);
        LaurentPoly {
            nvars,
            terms,
            integral: false,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// Drops the integer certificate, e.g. after a lossy transformation.
    pub fn uncertified(mut self) -> Self {
        self.integral = false;
        self
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExponentVector) -> Complex64 {
        self.terms
            .get(exp)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExponentVector, &Complex64)> {
        self.terms.iter().next_back()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Whether the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_zero())
    }

    /// `(min, max)` exponent of `z_j` over the support, `None` for the zero polynomial.
    pub fn degree_range(&self, j: usize) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|e| e[j]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    pub fn map_coefficients<F>(&self, mut f: F) -> LaurentPoly
    where
        F: FnMut(&ExponentVector, Complex64) -> Complex64,
    {
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), f(e, c))).collect();
        Self::from_raw(self.nvars, terms, false)
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(self.combine(other, 1))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(self.combine(other, -1))
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        if self.integral && other.integral {
            let mut acc: BTreeMap<ExponentVector, i128> = BTreeMap::new();
            for (e, c) in &self.terms {
                *acc.entry(e.clone()).or_insert(0) += c.re as i128;
            }
            for (e, c) in &other.terms {
                *acc.entry(e.clone()).or_insert(0) += sign as i128 * c.re as i128;
            }
            return Self::from_int_acc(self.nvars, acc);
        }
        let mut terms = self.terms.clone();
        let s = sign as f64;
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert(Complex64::new(0.0, 0.0)) += c * s;
        }
        Self::finish(self.nvars, terms, false)
    }

    fn from_int_acc(nvars: usize, acc: BTreeMap<ExponentVector, i128>) -> Self {
        let mut exact = true;
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(e, c)| {
                if (c.unsigned_abs() as f64) >= EXACT_INT_LIMIT {
                    exact = false;
                }
                (e, Complex64::new(c as f64, 0.0))
            })
            .collect();
        if exact {
            Self::from_raw(nvars, terms, true)
        } else {
            Self::finish(nvars, terms, false)
        }
    }

    /// Product in the Laurent polynomial ring.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        if self.integral && other.integral {
            let mut acc: BTreeMap<ExponentVector, i128> = BTreeMap::new();
            for (ea, ca) in &self.terms {
                for (eb, cb) in &other.terms {
                    *acc.entry(ea.checked_add(eb)).or_insert(0) += ca.re as i128 * cb.re as i128;
                }
            }
            return Ok(Self::from_int_acc(self.nvars, acc));
        }
        let mut terms: BTreeMap<ExponentVector, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *terms
                    .entry(ea.checked_add(eb))
                    .or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        Ok(Self::finish(self.nvars, terms, false))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if self.integral && is_exact_integer(c) {
            let k = c.re as i128;
            let acc = self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a.re as i128 * k))
                .collect();
            return Self::from_int_acc(self.nvars, acc);
        }
        let terms = self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect();
        Self::finish(self.nvars, terms, false)
    }

    /// The involution `sum a_v z^v -> sum conj(a_v) z^{-v}`.
    pub fn involution(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (-e, c.conj())).collect();
        LaurentPoly {
            nvars: self.nvars,
            terms,
            integral: self.integral,
        }
    }

    /// Multiplies by the monomial `z^shift`.
    pub fn shift(&self, shift: &ExponentVector) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (e.checked_add(shift), c))
            .collect();
        LaurentPoly {
            nvars: self.nvars,
            terms,
            integral: self.integral,
        }
    }

    /// Evaluates at a point of `(C^*)^l`.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: point.len(),
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for (z, &k) in point.iter().zip(e.as_slice()) {
                m *= z.powi(k as i32);
            }
            sum += m;
        }
        Ok(sum)
    }

    /// Exact quotient `self / divisor`, or `None` when the division does not
    /// terminate with a zero remainder.
    ///
    /// Repeatedly cancels the lexicographically leading term. Candidate
    /// quotient exponents are confined to the box cut out by the per-variable
    /// degree ranges, which keeps the loop finite on the Laurent ring.
    pub fn exact_div(&self, divisor: &Self) -> Result<Option<Self>> {
        self.check_vars(divisor)?;
        let Some((lead_exp, &lead_c)) = divisor.leading_term() else {
            return Err(Error::ZeroPolynomial);
        };
        if self.is_zero() {
            return Ok(Some(Self::zero(self.nvars)));
        }
        let mut bounds = Vec::with_capacity(self.nvars);
        for j in 0..self.nvars {
            let (alo, ahi) = self.degree_range(j).expect("nonzero");
            let (blo, bhi) = divisor.degree_range(j).expect("nonzero");
            if alo - blo > ahi - bhi {
                return Ok(None);
            }
            bounds.push((alo - blo, ahi - bhi));
        }
        let integral = self.integral && divisor.integral;
        let cutoff = 1e-12 * self.max_coeff_norm().max(divisor.max_coeff_norm());
        let mut rem = self.terms.clone();
        let mut quotient: BTreeMap<ExponentVector, Complex64> = BTreeMap::new();
        loop {
            if !integral {
                rem.retain(|_, c| c.norm() > cutoff);
            }
            let Some((rexp, &rc)) = rem.iter().next_back() else {
                break;
            };
            let qexp = rexp.checked_sub(lead_exp);
            let in_box = qexp
                .as_slice()
                .iter()
                .zip(&bounds)
                .all(|(&e, &(lo, hi))| lo <= e && e <= hi);
            if !in_box {
                return Ok(None);
            }
            let qc = if integral {
                let (n, d) = (rc.re as i128, lead_c.re as i128);
                if n % d != 0 {
                    return Ok(None);
                }
                Complex64::new((n / d) as f64, 0.0)
            } else {
                rc / lead_c
            };
            for (be, bc) in &divisor.terms {
                let e = qexp.checked_add(be);
                let entry = rem.entry(e).or_insert(Complex64::new(0.0, 0.0));
                if integral {
                    *entry = Complex64::new((entry.re as i128 - qc.re as i128 * bc.re as i128) as f64, 0.0);
                } else {
                    *entry -= qc * bc;
                }
            }
            let lead_key = qexp.checked_add(lead_exp);
            rem.remove(&lead_key);
            rem.retain(|_, c| *c != Complex64::new(0.0, 0.0));
            quotient.insert(qexp, qc);
        }
        Ok(Some(Self::finish(self.nvars, quotient, integral)))
    }

    /// Canonical term list, lexicographic in the exponent vector.
    pub fn to_serialized(&self) -> Vec<SerializedTerm> {
        self.terms
            .iter()
            .map(|(e, c)| SerializedTerm {
                exp: e.as_slice().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn from_serialized(nvars: usize, terms: &[SerializedTerm]) -> Result<Self> {
        Self::from_terms(
            nvars,
            terms
                .iter()
                .map(|t| (ExponentVector(t.exp.clone()), Complex64::new(t.re, t.im))),
        )
    }
}

/// One term of the canonical serialization: `{"exp": [...], "re": .., "im": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerializedTerm {
    pub exp: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (j, &k) in e.as_slice().iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{}", j + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("variable count mismatch in +")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("variable count mismatch in -")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("variable count mismatch in *")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Square matrix over `C[z_1^{±1}, ..., z_l^{±1}]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    size: usize,
    nvars: usize,
    entries: Vec<LaurentPoly>,
}

/// Matrices up to this size use cofactor expansion; larger ones use
/// fraction-free elimination.
const COFACTOR_MAX: usize = 4;

impl LaurentMatrix {
    pub fn from_rows(nvars: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            for p in row {
                if p.nvars() != nvars {
                    return Err(Error::VariableMismatch {
                        left: nvars,
                        right: p.nvars(),
                    });
                }
                entries.push(p);
            }
        }
        Ok(LaurentMatrix {
            size,
            nvars,
            entries,
        })
    }

    pub fn identity(size: usize, nvars: usize) -> Self {
        let entries = (0..size * size)
            .map(|k| {
                if k / size == k % size {
                    LaurentPoly::one(nvars)
                } else {
                    LaurentPoly::zero(nvars)
                }
            })
            .collect();
        LaurentMatrix {
            size,
            nvars,
            entries,
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(nvars: usize, diag: Vec<LaurentPoly>) -> Result<Self> {
        let n = diag.len();
        let rows = diag
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                (0..n)
                    .map(|j| if i == j { d.clone() } else { LaurentPoly::zero(nvars) })
                    .collect()
            })
            .collect();
        Self::from_rows(nvars, rows)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &LaurentPoly> + '_ {
        self.entries.iter()
    }

    pub fn rows(&self) -> Vec<Vec<LaurentPoly>> {
        self.entries.chunks(self.size.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_integral)
    }

    /// Conjugate transpose with the entrywise involution: `(A*)_{ij} = (a_{ji})*`.
    pub fn adjoint(&self) -> Self {
        let n = self.size;
        let entries = (0..n * n)
            .map(|k| self.get(k % n, k / n).involution())
            .collect();
        LaurentMatrix {
            size: n,
            nvars: self.nvars,
            entries,
        }
    }

    pub fn map_entries<F>(&self, f: F) -> Self
    where
        F: FnMut(&LaurentPoly) -> LaurentPoly,
    {
        LaurentMatrix {
            size: self.size,
            nvars: self.nvars,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        if self.size != other.size {
            return Err(Error::Dimension(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.size, other.size
            )));
        }
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentPoly::zero(self.nvars);
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(LaurentMatrix {
            size: n,
            nvars: self.nvars,
            entries,
        })
    }

    /// Determinant over the Laurent polynomial ring.
    pub fn determinant(&self) -> LaurentPoly {
        match self.size {
            0 => LaurentPoly::one(self.nvars),
            n if n <= COFACTOR_MAX => {
                let cols: Vec<usize> = (0..n).collect();
                self.cofactor(0, &cols)
            }
            _ => self.bareiss(),
        }
    }

    /// Laplace expansion of the minor on rows `row..` and the given columns.
    fn cofactor(&self, row: usize, cols: &[usize]) -> LaurentPoly {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = LaurentPoly::zero(self.nvars);
        for (k, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = self.cofactor(row + 1, &rest);
            if minor.is_zero() {
                continue;
            }
            let term = a * &minor;
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// Fraction-free (Bareiss) elimination with exact polynomial division.
    fn bareiss(&self) -> LaurentPoly {
        let n = self.size;
        let mut m = self.rows();
        let mut prev = LaurentPoly::one(self.nvars);
        let mut negate = false;
        for k in 0..n - 1 {
            // Sparsest nonzero pivot limits intermediate swell.
            let pivot = (k..n)
                .filter(|&i| !m[i][k].is_zero())
                .min_by_key(|&i| m[i][k].num_terms());
            let Some(p) = pivot else {
                return LaurentPoly::zero(self.nvars);
            };
            if p != k {
                m.swap(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = num
                        .exact_div(&prev)
                        .expect("same variable count")
                        .unwrap_or_else(|| {
                            log::warn!("inexact Bareiss division; result may carry rounding error");
                            LaurentPoly::zero(self.nvars)
                        });
                }
                m[i][k] = LaurentPoly::zero(self.nvars);
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        if negate {
            -&det
        } else {
            det
        }
    }

    pub fn to_serialized(&self) -> Vec<Vec<Vec<SerializedTerm>>> {
        self.rows()
            .iter()
            .map(|r| r.iter().map(LaurentPoly::to_serialized).collect())
            .collect()
    }

    pub fn from_serialized(nvars: usize, rows: &[Vec<Vec<SerializedTerm>>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| LaurentPoly::from_serialized(nvars, t))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(nvars, rows)
    }
}
