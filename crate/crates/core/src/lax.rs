//! Lax matrices, the spectral polynomial, and the structural identities
//! attached to them.
//!
//! Site indices in public accessors named after the lattice (`alpha`,
//! `beta`, Bloch components) are 1-based and cyclic, matching the usual
//! notation for `α_j^{(p)}`, `β_j` and `v_n`; matrix indices are 0-based.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::rational::{format_rational, int, Rational};
use crate::algebra::{BiLaurent, LaurentMatrix, PolyMatrix, UniPoly};
use crate::error::{Error, Result};
use crate::toda::TodaState;

/// `L_t(y)`: unit diagonal, `V_n` on the subdiagonal, `V_N / y` in the
/// top-right corner (added to the diagonal when `N = 1`).
pub fn build_l(s: &TodaState) -> LaurentMatrix {
    let n = s.period();
    let mut l = LaurentMatrix::identity(n);
    for k in 1..n {
        l.set(k, k - 1, BiLaurent::constant(s.v()[k - 1].clone()));
    }
    let corner = l.get(0, n - 1) + &BiLaurent::monomial(s.v()[n - 1].clone(), 0, -1);
    l.set(0, n - 1, corner);
    l
}

/// `R_{t+k}(y)`: `I^{t+k}` on the diagonal, unit superdiagonal, `y` in the
/// bottom-left corner.
pub fn build_r(s: &TodaState, layer: usize) -> Result<LaurentMatrix> {
    if layer >= s.layers() {
        return Err(Error::Contract(format!(
            "layer {layer} out of range for M = {}",
            s.layers()
        )));
    }
    let n = s.period();
    let row = &s.i_layers()[layer];
    let mut r = LaurentMatrix::from_fn(n, n, |i, j| {
        if i == j {
            BiLaurent::constant(row[i].clone())
        } else if j == i + 1 {
            BiLaurent::one()
        } else {
            BiLaurent::zero()
        }
    });
    let corner = r.get(n - 1, 0) + &BiLaurent::y();
    r.set(n - 1, 0, corner);
    Ok(r)
}

/// `X_t(y) = L_t R_{t+M-1} ⋯ R_{t+1} R_t`, built strictly as that product.
pub fn build_x(s: &TodaState) -> LaurentMatrix {
    let mut acc = build_r(s, 0).expect("layer 0 exists");
    for k in 1..s.layers() {
        acc = &build_r(s, k).expect("layer in range") * &acc;
    }
    &build_l(s) * &acc
}

/// `Φ̃(x, y) = det(X(y) - x E)`.
pub fn char_poly(x: &LaurentMatrix) -> Result<BiLaurent> {
    x.sub_x_identity()?.det()
}

/// Spectral polynomial together with its coefficient structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralData {
    /// `Φ̃(x, y)`, with `y`-degrees in `-1..=M`.
    pub phi_tilde: BiLaurent,
    /// `Φ = y Φ̃`, a polynomial in `y` of degree `M + 1`.
    pub phi: BiLaurent,
    /// `A_0 … A_{M+1}` with `Φ̃ = Σ_j A_j(x) y^{M-j}`.
    pub a: Vec<UniPoly>,
    pub period: usize,
    pub layers: usize,
    /// `gcd(N, M)`.
    pub m: usize,
    pub n1: usize,
    pub m1: usize,
    pub genus: usize,
}

impl SpectralData {
    pub fn from_phi_tilde(phi_tilde: BiLaurent, period: usize, layers: usize) -> Result<Self> {
        if let (Some(lo), Some(hi)) = (phi_tilde.y_min(), phi_tilde.y_max()) {
            if lo < -1 || hi > layers as i32 {
                return Err(Error::Contract(format!(
                    "characteristic polynomial has y-degrees {lo}..{hi}, expected within -1..{layers}"
                )));
            }
        }
        let a = (0..=layers + 1)
            .map(|j| phi_tilde.y_coeff(layers as i32 - j as i32))
            .collect();
        let m = period.gcd(&layers);
        Ok(Self {
            phi: phi_tilde.shift_y(1),
            phi_tilde,
            a,
            period,
            layers,
            m,
            n1: period / m,
            m1: layers / m,
            genus: genus(period, layers),
        })
    }

    /// Spectral data of the state's `X(y)`.
    pub fn of_state(s: &TodaState) -> Result<Self> {
        Self::from_phi_tilde(char_poly(&build_x(s))?, s.period(), s.layers())
    }

    pub fn report(&self) -> SpectralReport {
        SpectralReport {
            a: self.a.iter().map(UniPoly::to_strings).collect(),
            degrees: self.a.iter().map(|p| p.degree().map(|d| d as i64).unwrap_or(-1)).collect(),
            genus: self.genus,
            m: self.m,
        }
    }
}

/// Wire form of [`SpectralData`]: `A_j` coefficient lists (lowest degree
/// first, `"p/q"` strings) and their degrees (`-1` for a zero polynomial).
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    pub degrees: Vec<i64>,
    pub genus: usize,
    pub m: usize,
}

/// `g = ((N-1)(M+1) - gcd(N,M) + 1) / 2`.
pub fn genus(period: usize, layers: usize) -> usize {
    let m = period.gcd(&layers);
    let twice = (period - 1) * (layers + 1) + 1 - m;
    debug_assert!(twice % 2 == 0, "genus numerator must be even");
    twice / 2
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeEntry {
    pub j: usize,
    /// Degree of `A_j`, `None` for the zero polynomial.
    pub degree: Option<usize>,
    /// `jN/M` as a string `"p/q"` (and `0/1` for `j = M+1`).
    pub bound: String,
    pub leading: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub entries: Vec<DegreeEntry>,
    pub violations: Vec<String>,
}

impl DegreeProfile {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Degrees `k_j` of the `A_j` against the bound `k_j <= jN/M` (equality
/// exactly when `jN/M` is an integer, `k_{M+1} = 0`) and the leading
/// coefficients of `A_{rM_1}` against `(-1)^{M(N-M)+r} C(m, r) x^{rN_1}`.
pub fn degree_profile(sd: &SpectralData) -> DegreeProfile {
    let (n, mm) = (sd.period, sd.layers);
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    for (j, a) in sd.a.iter().enumerate() {
        let deg = a.degree();
        let (bound_num, bound_den) = if j == mm + 1 { (0, 1) } else { (j * n, mm) };
        let bound = Rational::new((bound_num as i64).into(), (bound_den as i64).into());
        entries.push(DegreeEntry {
            j,
            degree: deg,
            bound: format_rational(&bound),
            leading: format_rational(&a.lead()),
        });
        let Some(d) = deg else {
            violations.push(format!("A_{j} is identically zero"));
            continue;
        };
        if bound.is_integer() {
            let want = bound.to_integer();
            if int(d as i64).to_integer() != want {
                violations.push(format!("deg A_{j} = {d}, expected exactly {want}"));
            }
        } else if d as i64 * bound_den as i64 >= bound_num as i64 {
            violations.push(format!("deg A_{j} = {d}, expected < {}", format_rational(&bound)));
        }
    }
    let sign_base = mm * (n.max(mm) - n.min(mm));
    for r in 0..=sd.m {
        let j = r * sd.m1;
        let expected_deg = r * sd.n1;
        // M(N-M) may be negative when M > N; only its parity matters.
        let negative = (sign_base + r) % 2 == 1;
        let c = binomial(sd.m, r);
        let want = int(if negative { -c } else { c });
        let got = sd.a[j].coeff(expected_deg);
        if got != want || sd.a[j].degree() != Some(expected_deg) {
            violations.push(format!(
                "A_{j}: expected leading term {} x^{expected_deg}, got {} x^{}",
                format_rational(&want),
                format_rational(&sd.a[j].lead()),
                sd.a[j].degree().map_or("-inf".to_string(), |d| d.to_string())
            ));
        }
    }
    DegreeProfile {
        entries,
        violations,
    }
}

/// `det X(y)` from the conserved products:
/// `y^{-1} (y - s ∏V) ∏_k (∏I^{t+k} - s y)` with `s = (-1)^N`. For even `N`
/// this is `y^{-1}(y - ∏V)(∏I^t - y)⋯(∏I^{t+M-1} - y)`.
pub fn det_x_from_products(s: &TodaState) -> BiLaurent {
    let cp = s.conserved_products();
    let sign = if s.period() % 2 == 0 { int(1) } else { int(-1) };
    let y = BiLaurent::y();
    let mut acc = (&y - &BiLaurent::constant(&sign * &cp.prod_v)).shift_y(-1);
    for p in &cp.prod_i {
        acc = acc * (BiLaurent::constant(p.clone()) - y.scale(&sign));
    }
    acc
}

/// `L_{t+1} R_{t+M} = R_t L_t` for the pair `(s, s.evolve())`.
pub fn lax_pair_holds(s: &TodaState, next: &TodaState) -> Result<bool> {
    let lhs = &build_l(next) * &build_r(next, next.layers() - 1)?;
    let rhs = &build_r(s, 0)? * &build_l(s);
    Ok(lhs == rhs)
}

/// `X_{t+1} R_t = R_t X_t`.
pub fn lax_equation_holds(s: &TodaState, next: &TodaState) -> Result<bool> {
    let r = build_r(s, 0)?;
    Ok(&build_x(next) * &r == &r * &build_x(s))
}

/// Band coefficients of the periodic operator behind a banded `X(y)`:
/// `α_j^{(p)}` (`p = 1..M`) and `β_j`, read off by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bands {
    period: usize,
    layers: usize,
    /// `diag[k + 1][n]` = entry of the infinite operator at
    /// `(n, n + k)` for `k = -1..=M` (0-based row `n`).
    diag: Vec<Vec<Rational>>,
}

impl Bands {
    /// Extracts the bands and checks the template: every term of `X(y)`
    /// lies on one of the diagonals `-1..=M` of the infinite operator, is
    /// free of `x`, and the outermost diagonal is identically `1`.
    pub fn from_matrix(x: &LaurentMatrix, layers: usize) -> Result<Self> {
        let n = x.rows();
        if layers >= n {
            return Err(Error::RequiresMLessThanN {
                period: n,
                layers,
            });
        }
        let mut diag = vec![vec![Rational::zero(); n]; layers + 2];
        for i in 0..n {
            for j in 0..n {
                for (a, l, c) in x.get(i, j).terms() {
                    let k = j as i64 + l as i64 * n as i64 - i as i64;
                    if a != 0 || k < -1 || k > layers as i64 {
                        return Err(Error::Contract(format!(
                            "entry ({i},{j}) term x^{a} y^{l} lies off the band template"
                        )));
                    }
                    diag[(k + 1) as usize][i] = c.clone();
                }
            }
        }
        if let Some(i) = diag[layers + 1].iter().position(|c| !c.is_one()) {
            return Err(Error::Contract(format!(
                "outer band entry at row {i} is not 1"
            )));
        }
        Ok(Self {
            period: n,
            layers,
            diag,
        })
    }

    pub fn of_state(s: &TodaState) -> Result<Self> {
        Self::from_matrix(&build_x(s), s.layers())
    }

    /// Entry `(n, n + k)` of the infinite periodic operator, 0-based row.
    pub fn band(&self, row: isize, k: isize) -> &Rational {
        let r = row.rem_euclid(self.period as isize) as usize;
        &self.diag[(k + 1) as usize][r]
    }

    /// `α_j^{(p)}`, 1-based cyclic `j`, `1 <= p <= M`.
    pub fn alpha(&self, p: usize, j: isize) -> &Rational {
        // α_j^{(p)} sits at row j - p + 1 (1-based), column j.
        self.band(j - p as isize, p as isize - 1)
    }

    /// `β_j`, 1-based cyclic `j`: the entry at `(j + 1, j)`.
    pub fn beta(&self, j: isize) -> &Rational {
        self.band(j, -1)
    }

    /// Overwrites `β_j` (1-based cyclic); used to inject faults.
    pub fn set_beta(&mut self, j: isize, value: Rational) {
        let r = j.rem_euclid(self.period as isize) as usize;
        self.diag[0][r] = value;
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Rebuilds `X(y)` from the bands.
    pub fn to_matrix(&self) -> LaurentMatrix {
        let n = self.period as i64;
        let mut x = LaurentMatrix::zeros(self.period, self.period);
        for i in 0..n {
            for k in -1..=self.layers as i64 {
                let c = self.band(i as isize, k as isize);
                if c.is_zero() {
                    continue;
                }
                let col = i + k;
                let j = col.rem_euclid(n) as usize;
                let l = col.div_euclid(n) as i32;
                let e = x.get(i as usize, j) + &BiLaurent::monomial(c.clone(), 0, l);
                x.set(i as usize, j, e);
            }
        }
        x
    }
}

/// The `M + 1` solutions `ṽ^{(j)}` of the band recurrence
/// `Σ_{k=-1}^{M} X̃_{n,n+k} v_{n+k} = x v_n`, with `x` symbolic, started from
/// the identity window on components `1..=M+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlochBasis {
    /// `vectors[j - 1][idx - 1] = v^{(j)}_{idx}`.
    vectors: Vec<Vec<UniPoly>>,
}

impl BlochBasis {
    pub fn vector(&self, j: usize) -> &[UniPoly] {
        &self.vectors[j - 1]
    }

    /// `v^{(j)}_{idx}`, both 1-based.
    pub fn component(&self, j: usize, idx: usize) -> &UniPoly {
        &self.vectors[j - 1][idx - 1]
    }

    pub fn len(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }
}

/// Generates components `1..=len` of each `ṽ^{(j)}` by solving the band
/// recurrence for its last term, whose coefficient is `1`.
pub fn bloch_basis(bands: &Bands, len: usize) -> BlochBasis {
    let m = bands.layers();
    let len = len.max(m + 1);
    let x = UniPoly::x();
    let vectors = (1..=m + 1)
        .map(|j| {
            let mut v: Vec<UniPoly> = (1..=m + 1)
                .map(|i| if i == j { UniPoly::one() } else { UniPoly::zero() })
                .collect();
            for idx in m + 2..=len {
                // Recurrence at 1-based index n = idx - M, 0-based row n - 1.
                let n = idx - m;
                let mut next = &x * &v[n - 1];
                for k in -1..m as isize {
                    let c = bands.band(n as isize - 1, k);
                    if !c.is_zero() {
                        let pos = (n as isize + k - 1) as usize;
                        next = &next - &v[pos].scale(c);
                    }
                }
                v.push(next);
            }
            v
        })
        .collect();
    BlochBasis { vectors }
}

/// Whether every produced component satisfies the band recurrence exactly.
pub fn bloch_recurrence_holds(bands: &Bands, basis: &BlochBasis) -> bool {
    let m = bands.layers() as isize;
    let x = UniPoly::x();
    (1..=basis.count()).all(|j| {
        let v = basis.vector(j);
        (2..=(v.len() as isize - m)).all(|n| {
            let mut lhs = UniPoly::zero();
            for k in -1..=m {
                let c = bands.band(n - 1, k);
                lhs = &lhs + &v[(n + k - 1) as usize].scale(c);
            }
            lhs == &x * &v[(n - 1) as usize]
        })
    })
}

/// One-period transfer matrix of the band recurrence on windows
/// `(v_n, …, v_{n+M})`, mapping the window at `n = 1` to the one at
/// `n = N + 1`. Bloch solutions with multiplier `y` are its eigenvectors.
pub fn bloch_monodromy(bands: &Bands) -> PolyMatrix {
    let m = bands.layers();
    let w = m + 1;
    let x = UniPoly::x();
    let mut mono = PolyMatrix::from_fn(w, |i, j| if i == j { UniPoly::one() } else { UniPoly::zero() });
    for n in 1..=bands.period() {
        // Window at n -> window at n + 1 using the recurrence at index n + 1.
        let step = PolyMatrix::from_fn(w, |i, j| {
            if i + 1 < w {
                if j == i + 1 {
                    UniPoly::one()
                } else {
                    UniPoly::zero()
                }
            } else {
                // v_{n+M+1} = x v_{n+1} - Σ_{k=-1}^{M-1} X̃_{n+1,n+1+k} v_{n+1+k}
                // with window slot j holding v_{n+j}.
                let k = j as isize - 1;
                let c = bands.band(n as isize, k);
                let mut e = UniPoly::constant(-c.clone());
                if j == 1 {
                    e = &e + &x;
                }
                e
            }
        });
        mono = poly_matmul(&step, &mono);
    }
    mono
}

fn poly_matmul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.dim();
    PolyMatrix::from_fn(n, |i, j| {
        (0..n).fold(UniPoly::zero(), |acc, k| &acc + &(a.get(i, k) * b.get(k, j)))
    })
}

/// `det(y E - T(x))` for the transfer matrix `T`, as a polynomial in `x, y`.
pub fn monodromy_char_poly(mono: &PolyMatrix) -> Result<BiLaurent> {
    let n = mono.dim();
    let m = LaurentMatrix::from_fn(n, n, |i, j| {
        let t = BiLaurent::from_x_poly(mono.get(i, j));
        if i == j {
            &BiLaurent::y() - &t
        } else {
            -t
        }
    });
    m.det()
}

/// `H_t`: `I_1^t … I_M^t` on the diagonal with a unit superdiagonal, and the
/// last row `v^{(1)}_{M+2}, …, v^{(M)}_{M+2}, I_{M+1}^t + v^{(M+1)}_{M+2}`.
pub fn build_h(s: &TodaState, basis: &BlochBasis) -> Result<PolyMatrix> {
    let m = s.layers();
    if m >= s.period() {
        return Err(Error::RequiresMLessThanN {
            period: s.period(),
            layers: m,
        });
    }
    if basis.len() < m + 2 {
        return Err(Error::Contract("Bloch basis must reach component M+2".into()));
    }
    Ok(PolyMatrix::from_fn(m + 1, |i, j| {
        if i < m {
            if j == i {
                UniPoly::constant(s.i_at(0, i as isize).clone())
            } else if j == i + 1 {
                UniPoly::one()
            } else {
                UniPoly::zero()
            }
        } else {
            let v = basis.component(j + 1, m + 2).clone();
            if j == m {
                &v + &UniPoly::constant(s.i_at(0, m as isize).clone())
            } else {
                v
            }
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetHReport {
    pub det: UniPoly,
    pub expected: UniPoly,
}

impl DetHReport {
    pub fn holds(&self) -> bool {
        self.det == self.expected
    }
}

/// `det H_t` computed symbolically in `x`, against `(-1)^{M+1} I_1^t x`.
pub fn det_h_check(s: &TodaState) -> Result<DetHReport> {
    det_h_check_with(s, &Bands::of_state(s)?)
}

pub fn det_h_check_with(s: &TodaState, bands: &Bands) -> Result<DetHReport> {
    let m = s.layers();
    let basis = bloch_basis(bands, m + 2);
    let det = build_h(s, &basis)?.det();
    let sign = if (m + 1) % 2 == 0 { int(1) } else { int(-1) };
    let expected = UniPoly::monomial(sign * s.i_at(0, 0), 1);
    Ok(DetHReport { det, expected })
}
