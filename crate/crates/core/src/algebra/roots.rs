//! Numeric root extraction (Aberth–Ehrlich iteration with Newton polish).
//!
//! This is the only place where exact polynomials are turned into floating
//! point values, for reporting and for the genus-one numeric validation.

use num_complex::Complex64;

use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// Bound on the normalized residual `|p(r)| / Σ|a_i||r|^i` of every returned root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-8;

const MAX_ITERS: usize = 800;

/// All complex roots of `p` with multiplicity, sorted by real part then
/// imaginary part.
pub fn roots_numeric(p: &UniPoly) -> Result<Vec<Complex64>> {
    match p.degree() {
        None | Some(0) => {
            return Err(Error::Contract(
                "roots_numeric needs a polynomial of degree >= 1".into(),
            ))
        }
        _ => {}
    }
    // Exact zero roots first, then make monic in exact arithmetic before
    // converting so huge coefficients stay representable.
    let (zeros, rest) = p.strip_x_power();
    let coeffs: Vec<Complex64> = rest
        .monic()
        .to_f64_coeffs()
        .into_iter()
        .map(|c| Complex64::new(c, 0.0))
        .collect();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let mut found = roots_of_complex(&coeffs)?;
    for r in &mut found {
        if r.im.abs() <= 1e-14 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    roots.extend(found);
    sort_roots(&mut roots);
    Ok(roots)
}

pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Roots of `Σ coeffs[i] x^i` (lowest degree first). Leading zeros are
/// dropped; a constant polynomial has no roots.
pub fn roots_of_complex(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let lead = *c.last().unwrap();
    for z in &mut c {
        *z /= lead;
    }
    let n = c.len() - 1;
    let mut zeros = 0;
    while zeros < n && c[zeros].norm() == 0.0 {
        zeros += 1;
    }
    let c: Vec<Complex64> = c[zeros..].to_vec();
    let n = c.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-c[0]);
        return Ok(out);
    }

    // Initial guesses on a circle inside the Fujiwara bound.
    let radius = (0..n)
        .map(|i| {
            let a = c[i].norm();
            let e = (n - i) as f64;
            if i == 0 {
                (a / 2.0).powf(1.0 / e)
            } else {
                a.powf(1.0 / e)
            }
        })
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, ang)
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (pv, dv) = horner_with_derivative(&c, z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        s += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let w = if denom.norm() > 0.0 && denom.is_finite() {
                ratio / denom
            } else {
                ratio
            };
            if !w.is_finite() {
                continue;
            }
            z[k] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }

    // Newton polish, accepted only when it lowers the residual.
    for r in &mut z {
        for _ in 0..3 {
            let (pv, dv) = horner_with_derivative(&c, *r);
            if dv.norm() == 0.0 {
                break;
            }
            let cand = *r - pv / dv;
            if cand.is_finite() && horner(&c, cand).norm() < pv.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }

    for r in &z {
        let res = normalized_residual(&c, *r);
        if !(res < ROOT_RESIDUAL_TOL) {
            return Err(Error::Numeric(format!(
                "root iteration did not converge (converged={converged}, residual {res:e} at {r})"
            )));
        }
    }
    out.extend(z);
    Ok(out)
}

fn horner(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

fn horner_with_derivative(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        d = d * x + p;
        p = p * x + a;
    }
    (p, d)
}

/// `|p(r)| / Σ|a_i||r|^i`, the backward-error style residual.
pub fn normalized_residual(c: &[Complex64], r: Complex64) -> f64 {
    let scale: f64 = c
        .iter()
        .rev()
        .fold(0.0, |acc, a| acc * r.norm() + a.norm());
    if scale == 0.0 {
        return 0.0;
    }
    horner(c, r).norm() / scale
}

/// Normalized residual of a root of an exact polynomial.
pub fn residual(p: &UniPoly, r: Complex64) -> f64 {
    let c: Vec<Complex64> = p
        .to_f64_coeffs()
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    normalized_residual(&c, r)
}
