//! First rows of `U_k = R_{t+k-1} ⋯ R_t`, the arrow-sequence evaluation
//! map, and the identities used to expand `det H_t`.
//!
//! All values are computed on a concrete rational state. The ring shift
//! `σ: V_n ↦ V_{n+1}, I_n ↦ I_{n+1}` becomes an offset added to every site
//! index, cyclic modulo `N`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{Rational, UniPoly};
use crate::error::{Error, Result};
use crate::lax::{build_r, Bands};
use crate::toda::TodaState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Arrow {
    /// `↙`
    Sw,
    /// `↘`
    Se,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ArrowSeq(pub Vec<Arrow>);

impl ArrowSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, a: Arrow) -> usize {
        self.0.iter().filter(|&&b| b == a).count()
    }

    /// All `2^len` sequences, in binary order with `Sw = 0`.
    pub fn all(len: usize) -> Vec<ArrowSeq> {
        (0..1usize << len)
            .map(|bits| {
                ArrowSeq(
                    (0..len)
                        .map(|i| if bits >> (len - 1 - i) & 1 == 1 { Arrow::Se } else { Arrow::Sw })
                        .collect(),
                )
            })
            .collect()
    }
}

impl std::fmt::Display for ArrowSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for a in &self.0 {
            f.write_str(match a {
                Arrow::Sw => "↙",
                Arrow::Se => "↘",
            })?;
        }
        f.write_str("}")
    }
}

/// `{a_1, …, a_r}` with the shift `σ^shift` applied:
/// appending `↙` to a prefix of length `r` multiplies by `I_1^{t+r}`,
/// appending `↘` applies `σ` to the prefix value.
pub fn arrow_eval_shifted(s: &TodaState, seq: &ArrowSeq, shift: isize) -> Result<Rational> {
    if seq.len() > s.layers() {
        return Err(Error::Contract(format!(
            "arrow sequence of length {} exceeds M = {}",
            seq.len(),
            s.layers()
        )));
    }
    Ok(eval_rec(s, &seq.0, shift))
}

fn eval_rec(s: &TodaState, seq: &[Arrow], shift: isize) -> Rational {
    match seq.split_last() {
        None => Rational::one(),
        Some((Arrow::Sw, prefix)) => s.i_at(prefix.len(), shift) * eval_rec(s, prefix, shift),
        Some((Arrow::Se, prefix)) => eval_rec(s, prefix, shift + 1),
    }
}

pub fn arrow_eval(s: &TodaState, seq: &ArrowSeq) -> Result<Rational> {
    arrow_eval_shifted(s, seq, 0)
}

/// `u^{(k)}` under every shift: `table[shift][j - 1] = σ^shift(u_j^{(k)})`
/// for `j = 1..=k+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct URow {
    pub k: usize,
    table: Vec<Vec<Rational>>,
}

impl URow {
    /// `u_j^{(k)}`, 1-based; zero outside `1..=k+1`.
    pub fn get(&self, j: usize) -> Rational {
        self.shifted(j, 0)
    }

    /// `σ^shift(u_j^{(k)})`.
    pub fn shifted(&self, j: usize, shift: isize) -> Rational {
        let n = self.table.len() as isize;
        let row = &self.table[shift.rem_euclid(n) as usize];
        if j == 0 || j > row.len() {
            Rational::zero()
        } else {
            row[j - 1].clone()
        }
    }

    pub fn entries(&self) -> &[Rational] {
        &self.table[0]
    }
}

/// `u^{(k)}` by `u_j^{(k+1)} = σ(u_{j-1}^{(k)}) + I_1^{t+k} u_j^{(k)}` from
/// `u^{(0)} = (1, 0, …)`.
pub fn u_row(s: &TodaState, k: usize) -> Result<URow> {
    if k > s.layers() {
        return Err(Error::Contract(format!("k = {k} exceeds M = {}", s.layers())));
    }
    let n = s.period();
    let mut table: Vec<Vec<Rational>> = vec![vec![Rational::one()]; n];
    for level in 0..k {
        table = (0..n)
            .map(|sh| {
                let next_sh = (sh + 1) % n;
                let i = s.i_at(level, sh as isize);
                (1..=level + 2)
                    .map(|j| {
                        let from_shift = if j >= 2 { table[next_sh][j - 2].clone() } else { Rational::zero() };
                        let own = table[sh].get(j - 1).map(|u| i * u).unwrap_or_else(Rational::zero);
                        from_shift + own
                    })
                    .collect()
            })
            .collect();
    }
    Ok(URow { k, table })
}

/// First row of the explicit product `R_{t+k-1} ⋯ R_t`, read as
/// `u_j = [y^l] (U_k)_{1, j'}` with `j - 1 = lN + (j' - 1)`.
pub fn u_row_from_product(s: &TodaState, k: usize) -> Result<Vec<Rational>> {
    if k == 0 || k > s.layers() {
        return Err(Error::Contract(format!("need 1 <= k <= M, got {k}")));
    }
    let n = s.period();
    let mut acc = build_r(s, 0)?;
    for layer in 1..k {
        acc = &build_r(s, layer)? * &acc;
    }
    Ok((0..=k)
        .map(|j| acc.get(0, j % n).coeff(0, (j / n) as i32))
        .collect())
}

/// `Σ {a}` over sequences of length `k` with `j - 1` arrows `↘`.
pub fn arrow_sum(s: &TodaState, k: usize, j: usize) -> Result<Rational> {
    let mut total = Rational::zero();
    for seq in ArrowSeq::all(k) {
        if seq.count(Arrow::Se) + 1 == j {
            total += arrow_eval(s, &seq)?;
        }
    }
    Ok(total)
}

/// `{↙, a_2, …, a_k} = I_{l+1}^t {↘, a_2, …, a_k}` with `l` the number of
/// `↘` among `a_2 … a_k`.
pub fn lemma_a1_check(s: &TodaState, tail: &ArrowSeq) -> Result<bool> {
    let mut sw = vec![Arrow::Sw];
    sw.extend(&tail.0);
    let mut se = vec![Arrow::Se];
    se.extend(&tail.0);
    let l = tail.count(Arrow::Se) as isize;
    Ok(arrow_eval(s, &ArrowSeq(sw))? == s.i_at(0, l) * arrow_eval(s, &ArrowSeq(se))?)
}

/// `I_1^t ⋯ I_j^t`.
fn i_prefix(s: &TodaState, j: usize) -> Rational {
    (0..j).fold(Rational::one(), |acc, n| acc * s.i_at(0, n as isize))
}

fn sign(j: usize) -> Rational {
    if j % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `u_1^{(M)} + Σ_{j=1}^M (-1)^j u_{j+1}^{(M)} I_1^t ⋯ I_j^t = 0`.
pub fn lemma_a2_check(s: &TodaState) -> Result<bool> {
    let m = s.layers();
    let u = u_row(s, m)?;
    let mut total = u.get(1);
    for j in 1..=m {
        total += sign(j) * u.get(j + 1) * i_prefix(s, j);
    }
    Ok(total.is_zero())
}

/// `Σ_{j=1}^M (-1)^j σ(u_j^{(M)}) I_1^t ⋯ I_j^t = (-1)^M I_1^t ⋯ I_{M+1}^t`.
pub fn lemma_a3_check(s: &TodaState) -> Result<bool> {
    let m = s.layers();
    let u = u_row(s, m)?;
    let mut total = Rational::zero();
    for j in 1..=m {
        total += sign(j) * u.shifted(j, 1) * i_prefix(s, j);
    }
    Ok(total == sign(m) * i_prefix(s, m + 1))
}

/// Second row of `X`: `β_1 = V_1^t u_1^{(M)}` and
/// `α_{j+1}^{(j)} = σ(u_j^{(M)}) + V_1^t u_{j+1}^{(M)}` for `j = 1..=M`.
pub fn second_row_check(s: &TodaState) -> Result<bool> {
    let bands = Bands::of_state(s)?;
    second_row_check_with(s, &bands)
}

pub fn second_row_check_with(s: &TodaState, bands: &Bands) -> Result<bool> {
    let m = s.layers();
    let u = u_row(s, m)?;
    let v1 = s.v_at(0);
    if *bands.beta(1) != v1 * u.get(1) {
        return Ok(false);
    }
    Ok((1..=m).all(|j| *bands.alpha(j, j as isize + 1) == u.shifted(j, 1) + v1 * u.get(j + 1)))
}

/// `det H_t` by expansion along its last row, written in the band
/// coefficients:
/// `(-1)^M { -β_1 - x I_1 - Σ_j (-1)^j α_{j+1}^{(j)} I_1⋯I_j + (-1)^M I_1⋯I_{M+1} }`.
pub fn det_h_expansion(s: &TodaState, bands: &Bands) -> UniPoly {
    let m = s.layers();
    let mut c = -bands.beta(1).clone() + sign(m) * i_prefix(s, m + 1);
    for j in 1..=m {
        c -= sign(j) * bands.alpha(j, j as isize + 1) * i_prefix(s, j);
    }
    let p = UniPoly::new(vec![c, -s.i_at(0, 0).clone()]);
    p.scale(&sign(m))
}

/// Named values of `u^{(1)}, u^{(2)}, u^{(3)}` as drawn in the triangle of
/// first rows.
pub fn figure_rows(s: &TodaState) -> Vec<Vec<Rational>> {
    let i = |layer: usize, site: usize| s.i_at(layer, site as isize - 1).clone();
    let one = Rational::one();
    vec![
        vec![i(0, 1), one.clone()],
        vec![i(0, 1) * i(1, 1), i(0, 2) + i(1, 1), one.clone()],
        vec![
            i(0, 1) * i(1, 1) * i(2, 1),
            i(0, 2) * i(1, 2) + i(0, 2) * i(2, 1) + i(1, 1) * i(2, 1),
            i(0, 3) + i(1, 2) + i(2, 1),
            one,
        ],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::det_h_check;
    use crate::random::{random_state, rng_from_seed};

    fn sample(n: usize, m: usize, seed: u64) -> TodaState {
        random_state(n, m, &mut rng_from_seed(seed)).unwrap()
    }

    fn seq(s: &str) -> ArrowSeq {
        ArrowSeq(
            s.chars()
                .map(|c| if c == 'w' { Arrow::Sw } else { Arrow::Se })
                .collect(),
        )
    }

    #[test]
    fn small_sequences() {
        let s = sample(4, 3, 1);
        assert_eq!(arrow_eval(&s, &ArrowSeq::default()).unwrap(), Rational::one());
        assert_eq!(arrow_eval(&s, &seq("w")).unwrap(), *s.i_at(0, 0));
        assert_eq!(arrow_eval(&s, &seq("ww")).unwrap(), s.i_at(0, 0) * s.i_at(1, 0));
        assert_eq!(arrow_eval(&s, &seq("we")).unwrap(), *s.i_at(0, 1));
        assert_eq!(arrow_eval(&s, &seq("ew")).unwrap(), *s.i_at(1, 0));
        assert!(arrow_eval(&s, &seq("wwww")).is_err());
    }

    #[test]
    fn rows_match_triangle_and_product() {
        let s = sample(5, 3, 2);
        for (k, want) in figure_rows(&s).iter().enumerate() {
            let u = u_row(&s, k + 1).unwrap();
            assert_eq!(u.entries(), &want[..]);
            assert_eq!(u_row_from_product(&s, k + 1).unwrap(), *want);
        }
    }

    #[test]
    fn product_row_wraps_when_k_reaches_n() {
        let s = sample(2, 4, 3);
        for k in 1..=4 {
            let u = u_row(&s, k).unwrap();
            assert_eq!(u_row_from_product(&s, k).unwrap(), u.entries(), "k={k}");
        }
    }

    #[test]
    fn arrow_sums_reproduce_rows() {
        let s = sample(7, 6, 4);
        for k in 1..=6 {
            let u = u_row(&s, k).unwrap();
            for j in 1..=k + 1 {
                assert_eq!(arrow_sum(&s, k, j).unwrap(), u.get(j), "k={k} j={j}");
            }
        }
    }

    #[test]
    fn lemmas_hold() {
        for (n, m, seed) in [(2, 1, 5), (4, 2, 6), (5, 3, 7), (3, 5, 8)] {
            let s = sample(n, m, seed);
            for k in 1..=m {
                for tail in ArrowSeq::all(k - 1) {
                    assert!(lemma_a1_check(&s, &tail).unwrap());
                }
            }
            assert!(lemma_a2_check(&s).unwrap(), "({n},{m})");
            assert!(lemma_a3_check(&s).unwrap(), "({n},{m})");
        }
    }

    #[test]
    fn second_row_and_expansion() {
        for (n, m, seed) in [(3, 1, 9), (4, 2, 10), (5, 3, 11)] {
            let s = sample(n, m, seed);
            let b = Bands::of_state(&s).unwrap();
            assert!(second_row_check_with(&s, &b).unwrap(), "({n},{m})");
            let rep = det_h_check(&s).unwrap();
            assert_eq!(det_h_expansion(&s, &b), rep.det);
        }
    }
}
