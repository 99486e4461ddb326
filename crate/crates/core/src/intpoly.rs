//! Exact dense integer polynomials, used to split repeated roots off before
//! any floating-point root finding. Coefficients are stored in ascending
//! order; every operation is checked and reports overflow as `None`.

type Poly = Vec<i128>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && *p.last().expect("nonempty") == 0 {
        p.pop();
    }
    if p.is_empty() {
        p.push(0);
    }
    p
}

fn is_zero(p: &[i128]) -> bool {
    p.iter().all(|&c| c == 0)
}

pub(crate) fn degree(p: &[i128]) -> usize {
    p.len() - 1
}

fn lead(p: &[i128]) -> i128 {
    *p.last().expect("nonempty")
}

fn gcd_int(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Divides out the content and makes the leading coefficient positive.
fn primitive(p: Poly) -> Poly {
    let g = p.iter().fold(0, |g, &c| gcd_int(g, c));
    if g == 0 {
        return p;
    }
    let s = if lead(&p) < 0 { -g } else { g };
    p.into_iter().map(|c| c / s).collect()
}

fn derivative(p: &[i128]) -> Option<Poly> {
    if p.len() == 1 {
        return Some(vec![0]);
    }
    let d = p[1..]
        .iter()
        .enumerate()
        .map(|(k, &c)| c.checked_mul(k as i128 + 1))
        .collect::<Option<Poly>>()?;
    Some(trim(d))
}

fn sub(a: &[i128], b: &[i128]) -> Option<Poly> {
    let n = a.len().max(b.len());
    let d = (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0).checked_sub(b.get(k).copied().unwrap_or(0)))
        .collect::<Option<Poly>>()?;
    Some(trim(d))
}

/// Remainder of `a` by `b` up to a nonzero integer factor, kept primitive.
fn pseudo_rem(a: &[i128], b: &[i128]) -> Option<Poly> {
    let mut r = a.to_vec();
    let lb = lead(b);
    while !is_zero(&r) && degree(&r) >= degree(b) {
        let lr = lead(&r);
        let shift = degree(&r) - degree(b);
        let mut next = r.iter().map(|&c| c.checked_mul(lb)).collect::<Option<Poly>>()?;
        for (k, &c) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].checked_sub(lr.checked_mul(c)?)?;
        }
        r = primitive(trim(next));
    }
    Some(r)
}

/// Primitive greatest common divisor with positive leading coefficient.
pub(crate) fn gcd(a: &[i128], b: &[i128]) -> Option<Poly> {
    let (mut a, mut b) = (primitive(a.to_vec()), primitive(b.to_vec()));
    if degree(&a) < degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !is_zero(&b) {
        let r = pseudo_rem(&a, &b)?;
        a = b;
        b = r;
    }
    Some(primitive(a))
}

/// Exact quotient `a / b` over the integers; `None` if it does not exist.
pub(crate) fn exact_quotient(a: &[i128], b: &[i128]) -> Option<Poly> {
    if degree(a) < degree(b) {
        return if is_zero(a) { Some(vec![0]) } else { None };
    }
    let mut r = a.to_vec();
    let mut q = vec![0i128; degree(a) - degree(b) + 1];
    let lb = lead(b);
    for shift in (0..q.len()).rev() {
        let top = r[shift + degree(b)];
        if top % lb != 0 {
            return None;
        }
        let c = top / lb;
        q[shift] = c;
        for (k, &bc) in b.iter().enumerate() {
            r[k + shift] = r[k + shift].checked_sub(c.checked_mul(bc)?)?;
        }
    }
    if !is_zero(&r) {
        return None;
    }
    Some(trim(q))
}

/// Yun's square-free decomposition: `f = c * prod_i g_i^i` with pairwise
/// coprime square-free `g_i`. Only factors of positive degree are returned.
pub(crate) fn squarefree(f: &[i128]) -> Option<Vec<(Poly, usize)>> {
    let f = trim(f.to_vec());
    if degree(&f) == 0 {
        return Some(vec![]);
    }
    let df = derivative(&f)?;
    let a = gcd(&f, &df)?;
    if degree(&a) == 0 {
        return Some(vec![(primitive(f), 1)]);
    }
    let mut b = exact_quotient(&f, &a)?;
    let c = exact_quotient(&df, &a)?;
    let mut d = sub(&c, &derivative(&b)?)?;
    let mut out = Vec::new();
    let mut i = 1;
    while degree(&b) > 0 {
        let g = gcd(&b, &d)?;
        b = exact_quotient(&b, &g)?;
        let c = exact_quotient(&d, &g)?;
        d = sub(&c, &derivative(&b)?)?;
        if degree(&g) > 0 {
            out.push((g, i));
        }
        i += 1;
    }
    Some(out)
}
