//! Phase space and exact time evolution of the generalized periodic discrete
//! Toda lattice.
//!
//! A state holds `V_n^t` and the `M` layers `I_n^t, …, I_n^{t+M-1}` for
//! `n = 1..N` (stored 0-based). One step produces `V^{t+1}` and the new
//! layer `I^{t+M}` from
//!
//! ```text
//! I_n^{t+M} = I_n^t + V_n^t - V_{n-1}^{t+1}
//! V_n^{t+1} = I_{n+1}^t V_n^t / I_n^{t+M}
//! ```
//!
//! with cyclic indices.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TodaState {
    period: usize,
    layers: usize,
    t: i64,
    v: Vec<Rational>,
    i: Vec<Vec<Rational>>,
}

/// Which of the two product inequalities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductInequality {
    /// `∏V < ∏I^t`
    FirstLayer,
    /// `∏V < ∏I^{t+M-1}`
    LastLayer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonPositive { what: String, index: usize },
    Product {
        inequality: ProductInequality,
        prod_v: Rational,
        prod_i: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive { what, index } => {
                write!(f, "{what}[{index}] is not strictly positive")
            }
            Violation::Product {
                inequality,
                prod_v,
                prod_i,
            } => {
                let layer = match inequality {
                    ProductInequality::FirstLayer => "I^t",
                    ProductInequality::LastLayer => "I^{t+M-1}",
                };
                write!(f, "prod V = {prod_v} is not < prod {layer} = {prod_i}")
            }
        }
    }
}

/// `(∏V, ∏I^t, …, ∏I^{t+M-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservedProducts {
    pub prod_v: Rational,
    pub prod_i: Vec<Rational>,
}

impl ConservedProducts {
    /// The full collection as a sorted list, for multiset comparison.
    pub fn sorted_multiset(&self) -> Vec<Rational> {
        let mut all = self.prod_i.clone();
        all.push(self.prod_v.clone());
        all.sort();
        all
    }
}

fn product(xs: &[Rational]) -> Rational {
    xs.iter().fold(Rational::one(), |acc, x| acc * x)
}

impl TodaState {
    /// Builds a state from `V` and the `I` layers (oldest first). Only the
    /// shape is checked here; see [`TodaState::validate`].
    pub fn new(v: Vec<Rational>, i: Vec<Vec<Rational>>, t: i64) -> Result<Self> {
        let period = v.len();
        let layers = i.len();
        if period == 0 {
            return Err(Error::Malformed("N must be at least 1".into()));
        }
        if layers == 0 {
            return Err(Error::Malformed("M must be at least 1".into()));
        }
        if let Some((k, row)) = i.iter().enumerate().find(|(_, r)| r.len() != period) {
            return Err(Error::Malformed(format!(
                "I layer {k} has {} entries, expected N = {period}",
                row.len()
            )));
        }
        Ok(Self {
            period,
            layers,
            t,
            v,
            i,
        })
    }

    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_ints(v: &[i64], i: &[&[i64]]) -> Result<Self> {
        let conv = |xs: &[i64]| xs.iter().map(|&x| crate::algebra::rational::int(x)).collect();
        Self::new(conv(v), i.iter().map(|row| conv(row)).collect(), 0)
    }

    /// Period `N`.
    pub fn period(&self) -> usize {
        self.period
    }

    /// Number of `I` layers `M`.
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn time(&self) -> i64 {
        self.t
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    /// `V_n` with cyclic 0-based index.
    pub fn v_at(&self, n: isize) -> &Rational {
        &self.v[n.rem_euclid(self.period as isize) as usize]
    }

    /// All layers, `I^t` first.
    pub fn i_layers(&self) -> &[Vec<Rational>] {
        &self.i
    }

    /// `I_n^{t+layer}` with cyclic 0-based site index.
    pub fn i_at(&self, layer: usize, n: isize) -> &Rational {
        &self.i[layer][n.rem_euclid(self.period as isize) as usize]
    }

    pub fn with_time(mut self, t: i64) -> Self {
        self.t = t;
        self
    }

    /// Replaces `V_n` (0-based); used to build perturbed or hand-tuned data.
    pub fn with_v(mut self, n: usize, value: Rational) -> Self {
        self.v[n] = value;
        self
    }

    pub fn validate(&self) -> Result<(), Violation> {
        if let Some(k) = self.v.iter().position(|x| !x.is_positive()) {
            return Err(Violation::NonPositive {
                what: "V".into(),
                index: k,
            });
        }
        for (l, row) in self.i.iter().enumerate() {
            if let Some(k) = row.iter().position(|x| !x.is_positive()) {
                return Err(Violation::NonPositive {
                    what: format!("I[layer {l}]"),
                    index: k,
                });
            }
        }
        let prod_v = product(&self.v);
        let first = product(&self.i[0]);
        if prod_v >= first {
            return Err(Violation::Product {
                inequality: ProductInequality::FirstLayer,
                prod_v,
                prod_i: first,
            });
        }
        let last = product(&self.i[self.layers - 1]);
        if prod_v >= last {
            return Err(Violation::Product {
                inequality: ProductInequality::LastLayer,
                prod_v,
                prod_i: last,
            });
        }
        Ok(())
    }

    pub fn conserved_products(&self) -> ConservedProducts {
        ConservedProducts {
            prod_v: product(&self.v),
            prod_i: self.i.iter().map(|row| product(row)).collect(),
        }
    }

    /// One exact time step.
    ///
    /// Writing `x_n = I_n^{t+M}`, the two update rules collapse to the cyclic
    /// Riccati recurrence `x_n = I_n + V_n - I_n V_{n-1} / x_{n-1}`, which the
    /// substitution `x_n = V_n σ_{n+1} / σ_n` linearizes to
    /// `V_n σ_{n+1} = (I_n + V_n) σ_n - I_n σ_{n-1}`. Periodicity of `x`
    /// means `(σ_{n-1}, σ_n)` is an eigenvector of the one-period transfer
    /// matrix. Its eigenvalues are `1` (the constant solution, giving
    /// `∏x = ∏V`) and `∏I/∏V`, whose eigenvector gives `∏x = ∏I^t`; the
    /// latter is the branch that conserves `∏I`.
    pub fn evolve(&self) -> Result<TodaState> {
        self.validate().map_err(Error::InvalidState)?;
        let n = self.period;
        let i0 = &self.i[0];
        let v = &self.v;

        // Transfer matrix A_k maps (σ_{k-1}, σ_k) -> (σ_k, σ_{k+1}).
        let mut mono = [
            [Rational::one(), Rational::zero()],
            [Rational::zero(), Rational::one()],
        ];
        for k in 0..n {
            let a = [
                [Rational::zero(), Rational::one()],
                [-(&i0[k] / &v[k]), (&i0[k] + &v[k]) / &v[k]],
            ];
            mono = mat2_mul(&a, &mono);
        }
        let lambda = product(i0) / product(v);
        // Eigenvector of `mono` for `lambda`.
        let (s_prev, s0) = {
            let c1 = (mono[0][1].clone(), &lambda - &mono[0][0]);
            let c2 = (&lambda - &mono[1][1], mono[1][0].clone());
            if !(c1.0.is_zero() && c1.1.is_zero()) {
                c1
            } else if !(c2.0.is_zero() && c2.1.is_zero()) {
                c2
            } else {
                // mono = λE: every vector is an eigenvector; take the one that
                // is not the constant solution.
                (Rational::zero(), Rational::one())
            }
        };

        let mut sigma = Vec::with_capacity(n + 2);
        sigma.push(s_prev);
        sigma.push(s0);
        for k in 0..n {
            let next = ((&i0[k] + &v[k]) * &sigma[k + 1] - &i0[k] * &sigma[k]) / &v[k];
            sigma.push(next);
        }
        // sigma[k + 1] holds σ_k for k = -1..=N.
        if let Some(k) = sigma[1..].iter().position(Zero::is_zero) {
            return Err(Error::DegenerateEvolution(format!(
                "auxiliary solution vanishes at site {k}"
            )));
        }
        if &sigma[n + 1] != &(&lambda * &sigma[1]) || &sigma[n] != &(&lambda * &sigma[0]) {
            return Err(Error::DegenerateEvolution(
                "auxiliary solution is not quasi-periodic".into(),
            ));
        }

        let new_layer: Vec<Rational> = (0..n)
            .map(|k| &v[k] * &sigma[k + 2] / &sigma[k + 1])
            .collect();
        if new_layer.iter().any(Zero::is_zero) {
            return Err(Error::DegenerateEvolution("new I layer has a zero".into()));
        }
        let new_v: Vec<Rational> = (0..n)
            .map(|k| &i0[(k + 1) % n] * &sigma[k + 1] / &sigma[k + 2])
            .collect();

        let mut layers: Vec<Vec<Rational>> = self.i[1..].to_vec();
        layers.push(new_layer);
        Ok(TodaState {
            period: n,
            layers: self.layers,
            t: self.t + 1,
            v: new_v,
            i: layers,
        })
    }

    /// States `t, t+1, …, t+steps`.
    pub fn trajectory(&self, steps: usize) -> Result<Vec<TodaState>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.clone());
        for _ in 0..steps {
            let next = out.last().unwrap().evolve()?;
            out.push(next);
        }
        Ok(out)
    }

    /// Whether `next` satisfies both update rules exactly relative to `self`.
    pub fn closure_holds(&self, next: &TodaState) -> bool {
        let n = self.period as isize;
        if next.period != self.period || next.layers != self.layers {
            return false;
        }
        let new_layer = &next.i[self.layers - 1];
        (0..n).all(|k| {
            let ku = k as usize;
            let rule1 = &new_layer[ku] == &(self.i_at(0, k) + self.v_at(k) - next.v_at(k - 1));
            let rule2 = &next.v[ku] * &new_layer[ku] == self.i_at(0, k + 1) * self.v_at(k);
            rule1 && rule2
        }) && (1..self.layers).all(|l| next.i[l - 1] == self.i[l])
    }

    /// Cyclic relabeling of every site: `shift = +1` gives the state whose
    /// `V_n` is the old `V_{n+1}` (the ring shift `V_n ↦ V_{n+1}`),
    /// `shift = -1` the inverse.
    pub fn shifted(&self, shift: isize) -> TodaState {
        let n = self.period as isize;
        let rot = |xs: &[Rational]| -> Vec<Rational> {
            (0..n)
                .map(|k| xs[(k + shift).rem_euclid(n) as usize].clone())
                .collect()
        };
        TodaState {
            period: self.period,
            layers: self.layers,
            t: self.t,
            v: rot(&self.v),
            i: self.i.iter().map(|row| rot(row)).collect(),
        }
    }
}

fn mat2_mul(a: &[[Rational; 2]; 2], b: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

impl fmt::Debug for TodaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_row = |r: &[Rational]| r.iter().map(format_rational).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "TodaState {{ N: {}, M: {}, t: {}, V: [{}], I: [",
            self.period,
            self.layers,
            self.t,
            fmt_row(&self.v)
        )?;
        for row in &self.i {
            write!(f, "[{}]", fmt_row(row))?;
        }
        write!(f, "] }}")
    }
}

/// Wire form: rationals as `"p/q"` strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub t: i64,
    #[serde(rename = "V")]
    pub v: Vec<String>,
    #[serde(rename = "I")]
    pub i: Vec<Vec<String>>,
}

impl From<&TodaState> for StateJson {
    fn from(s: &TodaState) -> Self {
        StateJson {
            n: s.period,
            m: s.layers,
            t: s.t,
            v: s.v.iter().map(format_rational).collect(),
            i: s
                .i
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
        }
    }
}

impl TryFrom<StateJson> for TodaState {
    type Error = Error;
    fn try_from(j: StateJson) -> Result<Self> {
        let parse_all = |xs: &[String]| -> Result<Vec<Rational>> {
            xs.iter().map(|s| parse_rational(s)).collect()
        };
        let v = parse_all(&j.v)?;
        let i = j.i.iter().map(|row| parse_all(row)).collect::<Result<Vec<_>>>()?;
        if v.len() != j.n {
            return Err(Error::Malformed(format!(
                "N = {} but V has {} entries",
                j.n,
                v.len()
            )));
        }
        if i.len() != j.m {
            return Err(Error::Malformed(format!(
                "M = {} but I has {} layers",
                j.m,
                i.len()
            )));
        }
        TodaState::new(v, i, j.t)
    }
}

impl Serialize for TodaState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TodaState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StateJson::deserialize(d)?;
        TodaState::try_from(j).map_err(serde::de::Error::custom)
    }
}
