//! Named verification checks, grouped into suites.
//!
//! Every check draws its own states from `derive_seed(seed, name)`, so the
//! report does not depend on scheduling. Results are sorted by name.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::newton_interior;
use crate::algebra::rational::{to_f64, Rational};
use crate::arrow::{
    arrow_sum, det_h_expansion, figure_rows, lemma_a1_check, lemma_a2_check, lemma_a3_check,
    second_row_check_with, u_row, u_row_from_product, ArrowSeq,
};
use crate::divisor::{
    common_zeros_check, compute_r_s_of_state, four_two_display_check, jacobi_holds,
    smoothness_probe, upsilon, variants_isospectral, zeros_factorization_check, Smoothness,
    Variant,
};
use crate::error::{Error, Result};
use crate::lax::{
    bloch_monodromy, build_x, char_poly, degree_profile, det_h_check_with, det_x_from_products,
    lax_equation_holds, lax_pair_holds, monodromy_char_poly, Bands, SpectralData,
};
use crate::random::{derive_seed, rng_from_seed, with_generic_retry};
use crate::theta::{refinement_delta, theta_check};
use crate::toda::TodaState;

pub const CORPUS: [(usize, usize); 6] = [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3), (5, 2)];
pub const EVOLUTION_STEPS: usize = 10;
pub const ORACLE_TOL: f64 = 1e-10;
pub const DEFAULT_THETA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spectral,
    Determinant,
    Appendix,
    Divisor,
    Theta,
    Oracle,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = [
        "spectral",
        "determinant",
        "appendix",
        "divisor",
        "theta",
        "oracle",
        "all",
    ];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Self::NAMES[i])
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectral" => Suite::Spectral,
            "determinant" => Suite::Determinant,
            "appendix" => Suite::Appendix,
            "divisor" => Suite::Divisor,
            "theta" => Suite::Theta,
            "oracle" => Suite::Oracle,
            "all" => Suite::All,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Deliberate corruption of the band data fed to band-level checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Adds 1 to `β_j` (1-based cyclic).
    CorruptBeta(isize),
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub theta_tol: f64,
    /// Divides every per-shape sample count (at least one state is kept).
    pub thin: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: 0,
            fault: None,
            theta_tol: DEFAULT_THETA_TOL,
            thin: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub suite: Suite,
    pub pass: bool,
    /// Advisory checks are reported but never fail the run.
    pub advisory: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<TodaState>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Env<'a> {
    opts: &'a VerifyOptions,
}

impl Env<'_> {
    fn bands(&self, s: &TodaState) -> Result<Bands> {
        let mut b = Bands::of_state(s)?;
        if let Some(Fault::CorruptBeta(j)) = self.opts.fault {
            let v = b.beta(j) + Rational::from_integer(1.into());
            b.set_beta(j, v);
        }
        Ok(b)
    }
}

/// `None` when the case passes, otherwise a description of the failure.
type Case = fn(&TodaState, &Env) -> Result<Option<String>>;

struct CheckDef {
    name: &'static str,
    suite: Suite,
    advisory: bool,
    shapes: &'static [(usize, usize)],
    per_shape: usize,
    case: Case,
}

fn fail_if(ok: bool, msg: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(msg)
}

fn isospectrality(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let phi = char_poly(&build_x(s))?;
    for (t, st) in s.trajectory(EVOLUTION_STEPS)?.iter().enumerate().skip(1) {
        if char_poly(&build_x(st))? != phi {
            return Ok(Some(format!("spectral polynomial changed at t = {t}")));
        }
    }
    Ok(None)
}

fn lax_pair(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let traj = s.trajectory(3)?;
    for (t, w) in traj.windows(2).enumerate() {
        if !lax_pair_holds(&w[0], &w[1])? || !lax_equation_holds(&w[0], &w[1])? {
            return Ok(Some(format!("Lax relation fails at t = {t}")));
        }
    }
    Ok(None)
}

fn conservation(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let c0 = s.conserved_products();
    for (t, st) in s.trajectory(EVOLUTION_STEPS)?.iter().enumerate().skip(1) {
        let c = st.conserved_products();
        if c.prod_v != c0.prod_v || c.sorted_multiset() != c0.sorted_multiset() {
            return Ok(Some(format!("conserved products changed at t = {t}")));
        }
    }
    Ok(None)
}

fn det_x_factorization(s: &TodaState, _: &Env) -> Result<Option<String>> {
    Ok(fail_if(build_x(s).det()? == det_x_from_products(s), || {
        "det X differs from the product form".into()
    }))
}

fn degree_profile_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let prof = degree_profile(&SpectralData::of_state(s)?);
    Ok(fail_if(prof.holds(), || format!("{:?}", prof.violations)))
}

fn genus_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let sd = SpectralData::of_state(s)?;
    let interior = newton_interior(&sd.phi);
    Ok(fail_if(interior == sd.genus, || {
        format!("genus formula {} but {interior} interior points", sd.genus)
    }))
}

fn bloch_case(s: &TodaState, env: &Env) -> Result<Option<String>> {
    let b = env.bands(s)?;
    let sd = SpectralData::of_state(s)?;
    let lhs = monodromy_char_poly(&bloch_monodromy(&b))?;
    let want = sd.phi.scale(&(Rational::from_integer(1.into()) / sd.a[0].lead()));
    Ok(fail_if(lhs == want, || {
        "transfer matrix characteristic polynomial differs from the curve".into()
    }))
}

fn det_h_case(s: &TodaState, env: &Env) -> Result<Option<String>> {
    let rep = det_h_check_with(s, &env.bands(s)?)?;
    Ok(fail_if(rep.holds(), || {
        format!("det H = {}, expected {}", rep.det, rep.expected)
    }))
}

fn lemma_a1_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    for k in 1..=s.layers() {
        for tail in ArrowSeq::all(k - 1) {
            if !lemma_a1_check(s, &tail)? {
                return Ok(Some(format!("fails for tail {tail}")));
            }
        }
    }
    Ok(None)
}

fn lemma_a2_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    Ok(fail_if(lemma_a2_check(s)?, || "identity sum is nonzero".into()))
}

fn lemma_a3_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    Ok(fail_if(lemma_a3_check(s)?, || "identity sum differs".into()))
}

fn figure_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    for (k, want) in figure_rows(s).iter().enumerate() {
        let u = u_row(s, k + 1)?;
        if u.entries() != &want[..] || u_row_from_product(s, k + 1)? != *want {
            return Ok(Some(format!("row u^({}) differs", k + 1)));
        }
    }
    Ok(None)
}

fn arrow_sum_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    for k in 1..=6.min(s.layers()) {
        let u = u_row(s, k)?;
        for j in 1..=k + 1 {
            if arrow_sum(s, k, j)? != u.get(j) {
                return Ok(Some(format!("arrow sum differs at k = {k}, j = {j}")));
            }
        }
    }
    Ok(None)
}

fn second_row_case(s: &TodaState, env: &Env) -> Result<Option<String>> {
    Ok(fail_if(second_row_check_with(s, &env.bands(s)?)?, || {
        "second-row band identities fail".into()
    }))
}

fn det_h_expansion_case(s: &TodaState, env: &Env) -> Result<Option<String>> {
    let b = env.bands(s)?;
    let rep = det_h_check_with(s, &Bands::of_state(s)?)?;
    let exp = det_h_expansion(s, &b);
    Ok(fail_if(exp == rep.expected, || {
        format!("expansion gives {exp}, expected {}", rep.expected)
    }))
}

fn divisor_degrees(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let g = crate::lax::genus(s.period(), s.layers());
    let (r, _) = compute_r_s_of_state(s)?;
    let u = upsilon(s, Variant::X)?;
    let dr = r.degree().unwrap_or(0);
    Ok(fail_if(dr == 2 * g && u.degree() == g, || {
        format!("deg R = {dr}, deg Υ = {}, g = {g}", u.degree())
    }))
}

fn factorization_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let rep = zeros_factorization_check(s)?;
    let bad: Vec<_> = rep
        .checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("{}: {:?}", c.name, c.detail))
        .collect();
    Ok(fail_if(rep.holds(), || bad.join("; ")))
}

fn jacobi_case(s: &TodaState, env: &Env) -> Result<Option<String>> {
    let x = env.bands(s)?.to_matrix();
    let sd = SpectralData::of_state(s)?;
    Ok(fail_if(jacobi_holds(&x, &sd)?, || {
        "corner-minor identity is not divisible by the curve".into()
    }))
}

fn common_zeros_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let rep = common_zeros_check(s)?;
    Ok(fail_if(rep.holds(), || {
        format!("largest relative minor value {:e}", rep.max_relative)
    }))
}

fn variants_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    Ok(fail_if(variants_isospectral(s)?, || {
        "transposed or shifted operators change the curve".into()
    }))
}

fn display_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let rep = four_two_display_check(s)?;
    Ok(fail_if(rep.holds(), || format!("{rep:?}")))
}

fn smoothness_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let sd = SpectralData::of_state(s)?;
    Ok(match smoothness_probe(&sd.phi, sd.genus)? {
        Smoothness::SingularWitness { x, y } => Some(format!("singular point near x = {x:?}, y = {y:?}")),
        _ => None,
    })
}

fn theta_case(s: &TodaState, env: &Env) -> Result<Option<String>> {
    let rep = theta_check(s, EVOLUTION_STEPS, env.opts.theta_tol)?;
    Ok(fail_if(rep.pass, || {
        format!(
            "max |err| {:e}, skipped {}, principal {:?}",
            rep.max_abs_err,
            rep.skipped.len(),
            rep.principal
        )
    }))
}

fn theta_refinement_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let d = refinement_delta(s, EVOLUTION_STEPS)?;
    Ok(fail_if(d < 1e-9, || format!("refinement changes results by {d:e}")))
}

/// Double-precision evolution by cyclic fixed-point iteration of
/// `x_n = I_n + V_n - I_n V_{n-1} / x_{n-1}` (`x_n = I_n^{t+M}`), then
/// `V_n^{t+1} = I_{n+1} V_n / x_n`.
pub fn float_evolve(v: &[f64], i0: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = v.len();
    let mut x: Vec<f64> = (0..n).map(|k| i0[k] + v[k]).collect();
    for _ in 0..100_000 {
        let mut delta = 0.0f64;
        for k in 0..n {
            let prev = x[(k + n - 1) % n];
            let nx = i0[k] + v[k] - i0[k] * v[(k + n - 1) % n] / prev;
            delta = delta.max(((nx - x[k]) / nx).abs());
            x[k] = nx;
        }
        if delta < 1e-16 {
            let new_v = (0..n).map(|k| i0[(k + 1) % n] * v[k] / x[k]).collect();
            return Some((x, new_v));
        }
    }
    None
}

fn oracle_case(s: &TodaState, _: &Env) -> Result<Option<String>> {
    let next = s.evolve()?;
    let v: Vec<f64> = s.v().iter().map(to_f64).collect();
    let i0: Vec<f64> = s.i_layers()[0].iter().map(to_f64).collect();
    let Some((x, nv)) = float_evolve(&v, &i0) else {
        return Ok(Some("fixed-point iteration did not converge".into()));
    };
    let exact_x = next.i_layers().last().expect("at least one layer");
    let mut worst = 0.0f64;
    for k in 0..s.period() {
        let (ex, ev) = (to_f64(&exact_x[k]), to_f64(&next.v()[k]));
        worst = worst.max(((x[k] - ex) / ex).abs()).max(((nv[k] - ev) / ev).abs());
    }
    Ok(fail_if(worst < ORACLE_TOL, || format!("relative deviation {worst:e}")))
}

const DET_H_SHAPES: &[(usize, usize)] = &[(3, 1), (4, 2), (5, 3)];
const APPENDIX_SHAPES: &[(usize, usize)] = &[(3, 1), (4, 2), (5, 3), (4, 3)];
const FIGURE_SHAPES: &[(usize, usize)] = &[(4, 3), (5, 3), (7, 6)];
const THETA_SHAPES: &[(usize, usize)] = &[(2, 1)];

fn registry() -> Vec<CheckDef> {
    let def = |name, suite, shapes, per_shape, case| CheckDef {
        name,
        suite,
        advisory: false,
        shapes,
        per_shape,
        case,
    };
    vec![
        def("spectral.isospectrality", Suite::Spectral, &CORPUS[..], 20, isospectrality as Case),
        def("spectral.lax_pair", Suite::Spectral, &CORPUS[..], 5, lax_pair),
        def("spectral.conservation", Suite::Spectral, &CORPUS[..], 20, conservation),
        def("spectral.det_x_factorization", Suite::Spectral, &CORPUS[..], 20, det_x_factorization),
        def("spectral.degree_profile", Suite::Spectral, &CORPUS[..], 20, degree_profile_case),
        def("spectral.genus", Suite::Spectral, &CORPUS[..], 20, genus_case),
        def("spectral.bloch_monodromy", Suite::Spectral, &CORPUS[..], 5, bloch_case),
        def("determinant.det_h", Suite::Determinant, DET_H_SHAPES, 50, det_h_case),
        def("appendix.lemma_a1", Suite::Appendix, APPENDIX_SHAPES, 25, lemma_a1_case),
        def("appendix.lemma_a2", Suite::Appendix, APPENDIX_SHAPES, 25, lemma_a2_case),
        def("appendix.lemma_a3", Suite::Appendix, APPENDIX_SHAPES, 25, lemma_a3_case),
        def("appendix.figure_rows", Suite::Appendix, FIGURE_SHAPES, 34, figure_case),
        def("appendix.arrow_sum", Suite::Appendix, &[(7, 6)], 100, arrow_sum_case),
        def("appendix.second_row", Suite::Appendix, APPENDIX_SHAPES, 25, second_row_case),
        def("appendix.det_h_expansion", Suite::Appendix, APPENDIX_SHAPES, 25, det_h_expansion_case),
        def("divisor.degrees", Suite::Divisor, &CORPUS[..], 9, divisor_degrees),
        def("divisor.factorization", Suite::Divisor, &CORPUS[..], 9, factorization_case),
        def("divisor.jacobi", Suite::Divisor, &CORPUS[..], 9, jacobi_case),
        def("divisor.common_zeros", Suite::Divisor, &CORPUS[..], 3, common_zeros_case),
        def("divisor.variants_isospectral", Suite::Divisor, &CORPUS[..], 3, variants_case),
        def("divisor.example_four_two", Suite::Divisor, &[(4, 2)], 3, display_case),
        CheckDef {
            advisory: true,
            ..def("divisor.smoothness", Suite::Divisor, &CORPUS[..], 3, smoothness_case)
        },
        def("theta.formula", Suite::Theta, THETA_SHAPES, 5, theta_case),
        def("theta.refinement", Suite::Theta, THETA_SHAPES, 2, theta_refinement_case),
        def("oracle.evolution", Suite::Oracle, &CORPUS[..], 17, oracle_case),
    ]
}

pub fn check_names(suite: Suite) -> Vec<&'static str> {
    let mut v: Vec<_> = registry()
        .into_iter()
        .filter(|d| suite.includes(d.suite))
        .map(|d| d.name)
        .collect();
    v.sort_unstable();
    v
}

fn run_check(def: &CheckDef, opts: &VerifyOptions) -> CheckResult {
    let env = Env { opts };
    let mut rng = rng_from_seed(derive_seed(opts.seed, def.name));
    let per_shape = (def.per_shape / opts.thin.max(1)).max(1);
    let mut result = CheckResult {
        name: def.name.to_string(),
        suite: def.suite,
        pass: true,
        advisory: def.advisory,
        cases: 0,
        detail: None,
        counterexample: None,
    };
    for &(n, m) in def.shapes {
        for _ in 0..per_shape {
            match with_generic_retry(n, m, &mut rng, |s| (def.case)(s, &env)) {
                Ok((_, None)) => result.cases += 1,
                Ok((s, Some(why))) => {
                    result.cases += 1;
                    result.pass = false;
                    result.detail = Some(format!("(N, M) = ({n}, {m}): {why}"));
                    result.counterexample = Some(s);
                    return result;
                }
                Err(e) => {
                    result.pass = false;
                    result.detail = Some(format!("(N, M) = ({n}, {m}): {e}"));
                    return result;
                }
            }
        }
    }
    result
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let defs: Vec<CheckDef> = registry()
        .into_iter()
        .filter(|d| opts.suite.includes(d.suite))
        .collect();
    let mut checks: Vec<CheckResult> = defs.par_iter().map(|d| run_check(d, opts)).collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let pass = checks.iter().all(|c| c.pass || c.advisory);
    VerifyReport {
        suite: opts.suite,
        seed: opts.seed,
        fault: opts.fault,
        pass,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn appendix_suite_only_runs_appendix_checks() {
        let names = check_names(Suite::Appendix);
        assert!(!names.is_empty());
        assert!(names.iter().all(|n| n.starts_with("appendix.")));
    }

    #[test]
    fn float_oracle_on_a_fixed_state() {
        let s = TodaState::from_ints(&[1, 2, 1], &[&[3, 4, 5]]).unwrap();
        let next = s.evolve().unwrap();
        let (x, v) = float_evolve(&[1.0, 2.0, 1.0], &[3.0, 4.0, 5.0]).unwrap();
        for k in 0..3 {
            assert!((x[k] - to_f64(&next.i_layers()[0][k])).abs() < 1e-12);
            assert!((v[k] - to_f64(&next.v()[k])).abs() < 1e-12);
        }
    }

    #[test]
    fn corrupted_beta_is_caught() {
        let opts = VerifyOptions {
            suite: Suite::Appendix,
            fault: Some(Fault::CorruptBeta(1)),
            thin: 25,
            ..Default::default()
        };
        let rep = run_verify(&opts);
        assert!(!rep.pass);
        let c = rep.check("appendix.second_row").unwrap();
        assert!(!c.pass && c.counterexample.is_some());
        assert!(rep.check("appendix.lemma_a2").unwrap().pass);
    }
}
