//! Transposed and shifted operators, minors of `X(y) - xE`, the resultants
//! `R(x)`, `S(x)`, and the divisor polynomial `Υ(x)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::roots::{roots_numeric, roots_of_complex};
use crate::algebra::{gcd_monic, resultant_y, BiLaurent, LaurentMatrix, UniPoly};
use crate::error::{Error, Result};
use crate::lax::{build_x, char_poly, Bands, SpectralData};
use crate::toda::TodaState;

/// Which operator a divisor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Variant {
    X,
    XStar,
    SigmaInvX,
    SigmaInvXStar,
    SigmaX,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::X,
        Variant::XStar,
        Variant::SigmaInvX,
        Variant::SigmaInvXStar,
        Variant::SigmaX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::X => "X",
            Variant::XStar => "X*",
            Variant::SigmaInvX => "sigma^-1 X",
            Variant::SigmaInvXStar => "(sigma^-1 X)*",
            Variant::SigmaX => "sigma X",
        }
    }
}

/// `A^⋆ = J Aᵀ J` with `J` the antidiagonal permutation:
/// `(A^⋆)_{i,j} = A_{n-1-j, n-1-i}`.
pub fn star(a: &LaurentMatrix) -> LaurentMatrix {
    let n = a.rows();
    LaurentMatrix::from_fn(n, n, |i, j| a.get(n - 1 - j, n - 1 - i).clone())
}

/// `X^⋆` of the state's operator.
pub fn transpose_star(s: &TodaState) -> LaurentMatrix {
    star(&build_x(s))
}

/// Cyclic relabeling of the lattice: `direction = -1` is `σ^{-1}`, whose
/// operator acts on `(y^{-1} v_N, v_1, …, v_{N-1})`.
pub fn sigma_shift(s: &TodaState, direction: isize) -> TodaState {
    s.shifted(direction)
}

pub fn operator(s: &TodaState, variant: Variant) -> LaurentMatrix {
    match variant {
        Variant::X => build_x(s),
        Variant::XStar => transpose_star(s),
        Variant::SigmaInvX => build_x(&sigma_shift(s, -1)),
        Variant::SigmaInvXStar => transpose_star(&sigma_shift(s, -1)),
        Variant::SigmaX => build_x(&sigma_shift(s, 1)),
    }
}

/// The corner minors `Δ_{1,1}, Δ_{1,N}, Δ_{N,1}, Δ_{N,N}` of `X(y) - xE`.
#[derive(Debug, Clone)]
pub struct CornerMinors {
    pub d11: BiLaurent,
    pub d1n: BiLaurent,
    pub dn1: BiLaurent,
    pub dnn: BiLaurent,
}

impl CornerMinors {
    pub fn of(op: &LaurentMatrix) -> Result<Self> {
        let a = op.sub_x_identity()?;
        let n = a.rows() - 1;
        Ok(Self {
            d11: a.minor_signed(0, 0)?,
            d1n: a.minor_signed(0, n)?,
            dn1: a.minor_signed(n, 0)?,
            dnn: a.minor_signed(n, n)?,
        })
    }
}

/// `Res_y(Φ, y^k Δ)` with `k` the smallest power clearing `y`-denominators,
/// with any factor `x^j` removed.
pub fn minor_resultant(phi: &BiLaurent, delta: &BiLaurent) -> Result<UniPoly> {
    if delta.is_zero() {
        return Err(Error::NonGeneric("minor vanishes identically".into()));
    }
    let (cleared, _) = delta.clear_y();
    let r = resultant_y(phi, &cleared)?;
    if r.is_zero() {
        return Err(Error::NonGeneric("Φ and the minor share a component".into()));
    }
    Ok(r.strip_x_power().1)
}

/// `R(x) = Res_y(Φ, Δ_{N,N})` and `S(x) = Res_y(Φ, Δ_{1,N})` of an operator,
/// after `y`-clearing and `x`-power stripping. `deg R` must equal `2g`.
pub fn compute_r_s(op: &LaurentMatrix, phi: &BiLaurent, genus: usize) -> Result<(UniPoly, UniPoly)> {
    let minors = CornerMinors::of(op)?;
    let r = minor_resultant(phi, &minors.dnn)?;
    let s = minor_resultant(phi, &minors.d1n)?;
    if r.degree() != Some(2 * genus) {
        return Err(Error::NonGeneric(format!(
            "deg R = {:?}, expected 2g = {}",
            r.degree(),
            2 * genus
        )));
    }
    Ok((r, s))
}

/// `R`, `S` of the state's own `X`.
pub fn compute_r_s_of_state(s: &TodaState) -> Result<(UniPoly, UniPoly)> {
    let sd = SpectralData::of_state(s)?;
    compute_r_s(&build_x(s), &sd.phi, sd.genus)
}

/// Monic degree-`g` polynomial whose roots are the `x`-coordinates of the
/// finite divisor of an operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorPoly {
    #[serde(skip)]
    pub upsilon: UniPoly,
    pub t: i64,
    pub variant: Variant,
}

impl DivisorPoly {
    pub fn degree(&self) -> usize {
        self.upsilon.degree().unwrap_or(0)
    }

    /// `a_1` in `Υ = x^g - a_1 x^{g-1} + ⋯`, the sum of the roots.
    pub fn a1(&self) -> Option<num_rational::BigRational> {
        let g = self.degree();
        (g >= 1).then(|| -self.upsilon.coeff(g - 1))
    }
}

/// `gcd(R, S)` for a given operator; must have degree `g`.
pub fn upsilon_of(op: &LaurentMatrix, phi: &BiLaurent, genus: usize) -> Result<UniPoly> {
    let (r, s) = compute_r_s(op, phi, genus)?;
    let u = gcd_monic(&r, &s)?;
    if u.degree() != Some(genus) {
        return Err(Error::NonGeneric(format!(
            "deg gcd(R, S) = {:?}, expected g = {genus}",
            u.degree()
        )));
    }
    Ok(u)
}

pub fn upsilon(s: &TodaState, variant: Variant) -> Result<DivisorPoly> {
    let sd = SpectralData::of_state(s)?;
    Ok(DivisorPoly {
        upsilon: upsilon_of(&operator(s, variant), &sd.phi, sd.genus)?,
        t: s.time(),
        variant,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorCheck {
    pub name: String,
    pub holds: bool,
    /// Monic left side and right side, coefficient strings, on mismatch.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<(Vec<String>, Vec<String>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    pub checks: Vec<FactorCheck>,
    /// `Δ_{1,1}Δ_{N,N} - Δ_{1,N}Δ_{N,1}` equals `Φ̃` times the central
    /// minor and is divisible by `Φ`.
    pub jacobi: bool,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.jacobi && self.checks.iter().all(|c| c.holds)
    }
}

fn factor_check(name: &str, lhs: &UniPoly, rhs: &UniPoly) -> FactorCheck {
    let (l, r) = (lhs.monic(), rhs.monic());
    let holds = l == r;
    FactorCheck {
        name: name.to_string(),
        holds,
        detail: (!holds).then(|| (l.to_strings(), r.to_strings())),
    }
}

/// The four minor-resultant factorizations, each `Υ` computed from its own
/// operator, plus the Jacobi identity on the curve.
///
/// `σ^{-1}X` is the operator on `(y^{-1}v_N, v_1, …, v_{N-1})`. With that
/// convention `Δ_{N,N}` and `Δ_{1,N}` split as `Υ_X Υ_{(σ^{-1}X)^⋆}` and
/// `Υ_X Υ_{X^⋆}`, while `Δ_{1,1}` and `Δ_{N,1}` carry `Υ_{σX}`: `Δ_{1,1}` of
/// `X` is `Δ_{N,N}` of `σX`.
pub fn zeros_factorization_check(s: &TodaState) -> Result<FactorizationReport> {
    let sd = SpectralData::of_state(s)?;
    let x = build_x(s);
    let ups = |v: Variant| upsilon_of(&operator(s, v), &sd.phi, sd.genus);
    let u_x = ups(Variant::X)?;
    let u_xs = ups(Variant::XStar)?;
    let u_sxs = ups(Variant::SigmaInvXStar)?;
    let u_fx = ups(Variant::SigmaX)?;
    let minors = CornerMinors::of(&x)?;
    let res = |d: &BiLaurent| minor_resultant(&sd.phi, d);
    let checks = vec![
        factor_check("Delta_11", &res(&minors.d11)?, &(&u_fx * &u_xs)),
        factor_check("Delta_1N", &res(&minors.d1n)?, &(&u_x * &u_xs)),
        factor_check("Delta_N1", &res(&minors.dn1)?, &(&u_fx * &u_sxs)),
        factor_check("Delta_NN", &res(&minors.dnn)?, &(&u_x * &u_sxs)),
    ];
    Ok(FactorizationReport {
        checks,
        jacobi: jacobi_holds(&x, &sd)?,
    })
}

/// Desnanot–Jacobi for `X(y) - xE` and exact divisibility of the
/// `y`-cleared left side by `Φ`.
pub fn jacobi_holds(x: &LaurentMatrix, sd: &SpectralData) -> Result<bool> {
    let n = x.rows();
    if n < 2 {
        return Ok(true);
    }
    let m = CornerMinors::of(x)?;
    let lhs = &(&m.d11 * &m.dnn) - &(&m.d1n * &m.dn1);
    let a = x.sub_x_identity()?;
    let inner: Vec<usize> = (1..n - 1).collect();
    let central = a.select(&inner, &inner).det()?;
    if lhs != &sd.phi_tilde * &central {
        return Ok(false);
    }
    let (cleared, _) = lhs.shift_y(1).clear_y();
    let (_, rem) = cleared.div_rem_y(&sd.phi)?;
    Ok(rem.is_zero())
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorStep {
    pub t: i64,
    pub upsilon: Vec<String>,
    pub roots: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorTrajectory {
    pub g: usize,
    pub steps: Vec<DivisorStep>,
}

/// `Υ_t` for `t = 0..=steps`.
pub fn track_divisor(s: &TodaState, steps: usize) -> Result<Vec<DivisorPoly>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = s.clone();
    for k in 0..=steps {
        let d = upsilon(&cur, Variant::X).map_err(|e| match e {
            Error::NonGeneric(msg) => Error::NonGeneric(format!("t = {}: {msg}", cur.time())),
            other => other,
        })?;
        out.push(d);
        if k < steps {
            cur = cur.evolve()?;
        }
    }
    Ok(out)
}

pub fn trajectory_report(divisors: &[DivisorPoly], genus: usize) -> Result<DivisorTrajectory> {
    let steps = divisors
        .iter()
        .map(|d| {
            let roots = if d.degree() == 0 {
                Vec::new()
            } else {
                roots_numeric(&d.upsilon)?.iter().map(|z| [z.re, z.im]).collect()
            };
            Ok(DivisorStep {
                t: d.t,
                upsilon: d.upsilon.to_strings(),
                roots,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DivisorTrajectory { g: genus, steps })
}

/// `|p(x, y)|` divided by `Σ |c| |x|^a |y|^b`.
pub fn relative_value(p: &BiLaurent, x: Complex64, y: Complex64) -> f64 {
    let scale: f64 = p
        .terms()
        .map(|(a, b, c)| {
            crate::algebra::rational::to_f64(c).abs() * x.norm().powi(a as i32) * y.norm().powi(b)
        })
        .sum();
    if scale == 0.0 {
        0.0
    } else {
        p.eval_complex(x, y).norm() / scale
    }
}

/// Numeric `y`-roots of `Φ(x0, ·)`.
pub fn y_roots(phi: &BiLaurent, x0: Complex64) -> Result<Vec<Complex64>> {
    let (coeffs, lo) = phi.y_coeffs_at_complex(x0);
    let mut roots = roots_of_complex(&coeffs)?;
    if lo > 0 {
        roots.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(lo as usize));
    }
    Ok(roots)
}

pub const COMMON_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct CommonZeroReport {
    pub points: usize,
    /// Largest relative value of any `Δ_{N,k}` at the sampled points.
    pub max_relative: f64,
}

impl CommonZeroReport {
    pub fn holds(&self) -> bool {
        self.max_relative < COMMON_ZERO_TOL
    }
}

/// At each common zero of `Δ_{N,1}` and `Δ_{N,N}` on the curve, every
/// `Δ_{N,k}` vanishes.
pub fn common_zeros_check(s: &TodaState) -> Result<CommonZeroReport> {
    let sd = SpectralData::of_state(s)?;
    let x = build_x(s);
    let n = x.rows();
    let a = x.sub_x_identity()?;
    let row: Vec<BiLaurent> = (0..n)
        .map(|k| a.minor_signed(n - 1, k))
        .collect::<Result<_>>()?;
    let common = gcd_monic(
        &minor_resultant(&sd.phi, &row[0])?,
        &minor_resultant(&sd.phi, &row[n - 1])?,
    )?;
    if common.degree().unwrap_or(0) == 0 {
        return Ok(CommonZeroReport {
            points: 0,
            max_relative: 0.0,
        });
    }
    let mut worst = 0.0f64;
    let xs = roots_numeric(&common)?;
    for &x0 in &xs {
        let y0 = y_roots(&sd.phi, x0)?
            .into_iter()
            .map(|y| (relative_value(&row[0], x0, y) + relative_value(&row[n - 1], x0, y), y))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, y)| y)
            .ok_or_else(|| Error::Numeric("no y-root over a common zero".into()))?;
        for d in &row {
            worst = worst.max(relative_value(d, x0, y0));
        }
    }
    Ok(CommonZeroReport {
        points: xs.len(),
        max_relative: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Smoothness {
    /// `g = 0` curves are rational and reported without probing.
    Trivial,
    LikelySmooth,
    SingularWitness { x: [f64; 2], y: [f64; 2] },
}

pub const SINGULAR_TOL: f64 = 1e-8;

/// Screens the affine part of `Φ = 0` for singular points: candidate `x`
/// are the roots of `gcd(Res_y(Φ, Φ_y), Res_y(Φ, Φ_x))`, and a witness is a
/// `y` over one of them where `Φ`, `Φ_x`, `Φ_y` all vanish numerically.
pub fn smoothness_probe(phi: &BiLaurent, genus: usize) -> Result<Smoothness> {
    if genus == 0 {
        return Ok(Smoothness::Trivial);
    }
    let (phi, _) = phi.clear_y();
    let py = phi.derivative_y();
    let px = phi.derivative_x();
    if py.is_zero() || px.is_zero() {
        return Err(Error::Contract("Φ must depend on both x and y".into()));
    }
    let r1 = resultant_y(&phi, &py)?;
    let r2 = resultant_y(&phi, &px)?;
    if r1.is_zero() || r2.is_zero() {
        return Err(Error::SingularCurve("Φ shares a component with a partial derivative".into()));
    }
    let g = gcd_monic(&r1, &r2)?;
    if g.degree().unwrap_or(0) == 0 {
        return Ok(Smoothness::LikelySmooth);
    }
    for x0 in roots_numeric(&g)? {
        for y0 in y_roots(&phi, x0)? {
            let worst = [&phi, &px, &py]
                .iter()
                .map(|p| relative_value(p, x0, y0))
                .fold(0.0, f64::max);
            if worst < SINGULAR_TOL {
                return Ok(Smoothness::SingularWitness {
                    x: [x0.re, x0.im],
                    y: [y0.re, y0.im],
                });
            }
        }
    }
    Ok(Smoothness::LikelySmooth)
}

/// `Φ̃` of each operator variant agrees with that of `X`.
pub fn variants_isospectral(s: &TodaState) -> Result<bool> {
    let base = char_poly(&build_x(s))?;
    for v in Variant::ALL {
        if char_poly(&operator(s, v))? != base {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy)]
enum Cell {
    A(usize, isize),
    B(isize),
    One,
    BOverY(isize),
    Y,
    AY(usize, isize),
}

fn display(bands: &Bands, cells: &[[Cell; 4]; 4]) -> LaurentMatrix {
    use Cell::*;
    LaurentMatrix::from_fn(4, 4, |i, j| match cells[i][j] {
        A(p, k) => BiLaurent::constant(bands.alpha(p, k).clone()),
        B(k) => BiLaurent::constant(bands.beta(k).clone()),
        One => BiLaurent::one(),
        BOverY(k) => BiLaurent::monomial(bands.beta(k).clone(), 0, -1),
        Y => BiLaurent::y(),
        AY(p, k) => BiLaurent::monomial(bands.alpha(p, k).clone(), 0, 1),
    })
}

/// The four `N = 4, M = 2` displays (`X`, `X^⋆`, `σ^{-1}X`, `(σ^{-1}X)^⋆`)
/// written in the parameters of `X`, and the relabeling that turns `X`
/// into `(σ^{-1}X)^⋆`.
#[derive(Debug, Clone, Serialize)]
pub struct DisplayReport {
    pub x: bool,
    pub x_star: bool,
    pub sigma_inv_x: bool,
    pub sigma_inv_x_star: bool,
    pub correspondence: bool,
}

impl DisplayReport {
    pub fn holds(&self) -> bool {
        self.x && self.x_star && self.sigma_inv_x && self.sigma_inv_x_star && self.correspondence
    }
}

pub fn four_two_display_check(s: &TodaState) -> Result<DisplayReport> {
    use Cell::*;
    if (s.period(), s.layers()) != (4, 2) {
        return Err(Error::Unsupported("display check needs N = 4, M = 2".into()));
    }
    let x = build_x(s);
    let b = Bands::from_matrix(&x, 2)?;
    let x_cells = [
        [A(1, 1), A(2, 2), One, BOverY(4)],
        [B(1), A(1, 2), A(2, 3), One],
        [Y, B(2), A(1, 3), A(2, 4)],
        [AY(2, 1), Y, B(3), A(1, 4)],
    ];
    let star_cells = [
        [A(1, 4), A(2, 4), One, BOverY(4)],
        [B(3), A(1, 3), A(2, 3), One],
        [Y, B(2), A(1, 2), A(2, 2)],
        [AY(2, 1), Y, B(1), A(1, 1)],
    ];
    let sigma_cells = [
        [A(1, 4), A(2, 1), One, BOverY(3)],
        [B(4), A(1, 1), A(2, 2), One],
        [Y, B(1), A(1, 2), A(2, 3)],
        [AY(2, 4), Y, B(2), A(1, 3)],
    ];
    let sigma_star_cells = [
        [A(1, 3), A(2, 3), One, BOverY(3)],
        [B(2), A(1, 2), A(2, 2), One],
        [Y, B(1), A(1, 1), A(2, 1)],
        [AY(2, 4), Y, B(4), A(1, 4)],
    ];
    let sx = operator(s, Variant::SigmaInvX);
    let sxs = star(&sx);
    let b2 = Bands::from_matrix(&sxs, 2)?;
    let correspondence = (1..=4isize).all(|i| {
        b2.alpha(1, i) == b.alpha(1, 4 - i)
            && b2.alpha(2, i) == b.alpha(2, 1 - i)
            && b2.beta(i) == b.beta(3 - i)
    });
    Ok(DisplayReport {
        x: display(&b, &x_cells) == x,
        x_star: display(&b, &star_cells) == star(&x),
        sigma_inv_x: display(&b, &sigma_cells) == sx,
        sigma_inv_x_star: display(&b, &sigma_star_cells) == sxs,
        correspondence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::random::{random_state, rng_from_seed, with_generic_retry};

    fn sample(n: usize, m: usize, seed: u64) -> TodaState {
        random_state(n, m, &mut rng_from_seed(seed)).unwrap()
    }

    #[test]
    fn star_is_an_involution_preserving_phi() {
        let s = sample(4, 2, 2);
        let x = build_x(&s);
        assert_eq!(star(&star(&x)), x);
        assert!(variants_isospectral(&s).unwrap());
    }

    #[test]
    fn shifted_operator_is_the_conjugate() {
        for (n, m) in [(2, 1), (4, 2), (5, 3), (3, 4)] {
            let s = sample(n, m, 8);
            let conj = build_x(&s).conjugate_by_cyclic_shift().unwrap();
            assert_eq!(build_x(&sigma_shift(&s, -1)), conj, "({n},{m})");
            let mut back = s.clone();
            for _ in 0..n {
                back = sigma_shift(&back, 1);
            }
            assert_eq!(back, s);
        }
    }

    #[test]
    fn single_site_has_trivial_divisor() {
        let s = sample(1, 2, 3);
        let d = upsilon(&s, Variant::X).unwrap();
        assert_eq!(d.upsilon, UniPoly::one());
        assert_eq!(smoothness_probe(&SpectralData::of_state(&s).unwrap().phi, 0).unwrap(), Smoothness::Trivial);
    }

    #[test]
    fn two_site_degrees() {
        let mut rng = rng_from_seed(5);
        let (_, (r, s)) = with_generic_retry(2, 1, &mut rng, compute_r_s_of_state).unwrap();
        assert_eq!(r.degree(), Some(2));
        assert_eq!(s.degree(), Some(2));
        let mut rng = rng_from_seed(6);
        let (_, (r, _)) = with_generic_retry(3, 1, &mut rng, compute_r_s_of_state).unwrap();
        assert_eq!(r.degree(), Some(4));
    }

    #[test]
    fn factorizations_hold() {
        for (n, m) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let mut rng = rng_from_seed(100 + n as u64);
            let (_, rep) = with_generic_retry(n, m, &mut rng, zeros_factorization_check).unwrap();
            assert!(rep.holds(), "({n},{m}): {rep:?}");
        }
    }

    #[test]
    fn r_roots_are_common_zeros() {
        let mut rng = rng_from_seed(12);
        let (s, (r, _)) = with_generic_retry(3, 1, &mut rng, compute_r_s_of_state).unwrap();
        let sd = SpectralData::of_state(&s).unwrap();
        let dnn = CornerMinors::of(&build_x(&s)).unwrap().dnn;
        for x0 in roots_numeric(&r).unwrap() {
            let best = y_roots(&sd.phi, x0)
                .unwrap()
                .into_iter()
                .map(|y| relative_value(&dnn, x0, y))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-7, "{best}");
        }
    }

    #[test]
    fn common_zeros_of_last_row() {
        let mut rng = rng_from_seed(31);
        let (_, rep) = with_generic_retry(4, 2, &mut rng, common_zeros_check).unwrap();
        assert!(rep.points > 0);
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn node_is_detected() {
        // y^2 - x^2 (x + 1)
        let phi = BiLaurent::monomial(int(1), 0, 2)
            - BiLaurent::monomial(int(1), 3, 0)
            - BiLaurent::monomial(int(1), 2, 0);
        match smoothness_probe(&phi, 1).unwrap() {
            Smoothness::SingularWitness { x, y } => {
                assert!(x[0].abs() < 1e-6 && y[0].abs() < 1e-6);
            }
            other => panic!("expected witness, got {other:?}"),
        }
        let s = sample(3, 1, 4);
        let sd = SpectralData::of_state(&s).unwrap();
        assert_eq!(smoothness_probe(&sd.phi, sd.genus).unwrap(), Smoothness::LikelySmooth);
    }

    #[test]
    fn divisor_moves_while_degree_stays() {
        let mut rng = rng_from_seed(77);
        let (_, traj) = with_generic_retry(2, 1, &mut rng, |s| track_divisor(s, 10)).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.iter().all(|d| d.degree() == 1 && d.upsilon.lead() == int(1)));
        assert!(traj.windows(2).any(|w| w[0].upsilon != w[1].upsilon));
    }

    #[test]
    fn four_two_displays_match() {
        for seed in 0..5 {
            let rep = four_two_display_check(&sample(4, 2, seed)).unwrap();
            assert!(rep.holds(), "{rep:?}");
        }
    }

    #[test]
    fn shifted_factor_is_sigma_not_its_inverse() {
        let mut rng = rng_from_seed(104);
        let (s, _) = with_generic_retry(4, 2, &mut rng, zeros_factorization_check).unwrap();
        let sd = SpectralData::of_state(&s).unwrap();
        let d11 = CornerMinors::of(&build_x(&s)).unwrap().d11;
        let u = |v| upsilon(&s, v).unwrap().upsilon;
        let lhs = minor_resultant(&sd.phi, &d11).unwrap().monic();
        assert_eq!(lhs, (&u(Variant::SigmaX) * &u(Variant::XStar)).monic());
        assert_ne!(lhs, (&u(Variant::SigmaInvX) * &u(Variant::XStar)).monic());
    }
}
