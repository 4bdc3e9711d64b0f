//! Sylvester resultants in `y` of bivariate polynomials.

use super::bilaurent::BiLaurent;
use super::matrix::PolyMatrix;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// `Res_y(p, q)` as a polynomial in `x`.
///
/// Convention: `res(p, q) = lead(p)^{deg q} · ∏ q(roots of p)`, which is the
/// determinant of the Sylvester matrix with the `deg q` shifted rows of `p`
/// (highest coefficient first) on top.
pub fn resultant_y(p: &BiLaurent, q: &BiLaurent) -> Result<UniPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Contract("resultant of a zero polynomial".into()));
    }
    let pc = p.as_poly_in_y()?;
    let qc = q.as_poly_in_y()?;
    Ok(sylvester_det(&pc, &qc))
}

/// Sylvester determinant from coefficient lists (lowest degree first,
/// highest entry nonzero).
pub fn sylvester_det(p: &[UniPoly], q: &[UniPoly]) -> UniPoly {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let sm = PolyMatrix::from_fn(size, |r, c| {
        if r < n {
            // p row shifted by r
            c.checked_sub(r)
                .filter(|&k| k <= m)
                .map(|k| p[m - k].clone())
                .unwrap_or_else(UniPoly::zero)
        } else {
            let r = r - n;
            c.checked_sub(r)
                .filter(|&k| k <= n)
                .map(|k| q[n - k].clone())
                .unwrap_or_else(UniPoly::zero)
        }
    });
    sm.det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn y_minus(p: UniPoly) -> BiLaurent {
        BiLaurent::y() - BiLaurent::from_x_poly(&p)
    }

    #[test]
    fn linear_factors_give_difference_of_roots() {
        let a = UniPoly::from_ints(&[1, 2]);
        let b = UniPoly::from_ints(&[0, 0, 3]);
        // res(y - a, y - b) = (y - b)|_{y=a} = a - b
        let r = resultant_y(&y_minus(a.clone()), &y_minus(b.clone())).unwrap();
        assert_eq!(r, &a - &b);
    }

    #[test]
    fn constant_second_argument() {
        let p = BiLaurent::y().pow(3) + BiLaurent::x();
        let c = BiLaurent::constant(int(5));
        assert_eq!(resultant_y(&p, &c).unwrap(), UniPoly::from_ints(&[125]));
    }

    #[test]
    fn laurent_input_is_a_contract_violation() {
        let p = BiLaurent::y_inv();
        assert!(matches!(
            resultant_y(&p, &BiLaurent::y()),
            Err(Error::Contract(_))
        ));
    }
}
