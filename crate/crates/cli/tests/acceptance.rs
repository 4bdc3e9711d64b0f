//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pdtoda_core::algebra::rational::{int, to_f64};
use pdtoda_core::algebra::{newton_interior, BiLaurent, Rational, UniPoly};
use pdtoda_core::arrow::{
    arrow_sum, figure_rows, lemma_a1_check, lemma_a2_check, lemma_a3_check, second_row_check,
    u_row, ArrowSeq,
};
use pdtoda_core::divisor::{compute_r_s_of_state, jacobi_holds, upsilon, zeros_factorization_check, Variant};
use pdtoda_core::lax::{build_x, char_poly, det_h_check, SpectralData};
use pdtoda_core::random::{derive_seed, rng_from_seed, with_generic_retry};
use pdtoda_core::theta::theta_check;
use pdtoda_core::{Result, TodaState};

const CORPUS: [(usize, usize); 6] = [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3), (5, 2)];
const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    note: String,
}

fn outcome(pass: bool, note: impl Into<String>) -> Outcome {
    Outcome { pass, note: note.into() }
}

/// `count` states of shape `(n, m)` on which `f` succeeds, redrawing only on
/// non-generic failures. Returns the first failure message, if any.
fn sweep(
    label: &str,
    shapes: &[(usize, usize)],
    count: usize,
    mut f: impl FnMut(&TodaState) -> Result<Option<String>>,
) -> (usize, Option<String>) {
    let mut done = 0;
    for &(n, m) in shapes {
        let mut rng = rng_from_seed(derive_seed(SEED, &format!("{label}/{n},{m}")));
        for _ in 0..count {
            match with_generic_retry(n, m, &mut rng, &mut f) {
                Ok((_, None)) => done += 1,
                Ok((s, Some(why))) => return (done, Some(format!("({n},{m}) {why}: {s:?}"))),
                Err(e) => return (done, Some(format!("({n},{m}) {e}"))),
            }
        }
    }
    (done, None)
}

fn finish(label: &str, done: usize, err: Option<String>, elapsed: Duration, limit: Duration) -> Outcome {
    match err {
        Some(e) => outcome(false, e),
        None if elapsed > limit => outcome(false, format!("{done} cases but took {elapsed:.1?} (limit {limit:?})")),
        None => outcome(true, format!("{done} {label} in {elapsed:.1?}")),
    }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let (done, err) = sweep("iso", &CORPUS, 20, |s| {
        let phi = char_poly(&build_x(s))?;
        for st in s.trajectory(10)? {
            if char_poly(&build_x(&st))? != phi {
                return Ok(Some(format!("changed at t = {}", st.time())));
            }
        }
        Ok(None)
    });
    finish("states x 10 steps", done, err, t.elapsed(), Duration::from_secs(60))
}

fn product(xs: &[Rational]) -> Rational {
    xs.iter().fold(int(1), |a, x| a * x)
}

/// `y^{-1} (y - s ∏V) ∏_k (∏I^{t+k} - s y)`, `s = (-1)^N`.
fn det_x_expected(s: &TodaState) -> BiLaurent {
    let sign = if s.period() % 2 == 0 { int(1) } else { int(-1) };
    let y = BiLaurent::y();
    let mut acc = &y - &BiLaurent::constant(&sign * product(s.v()));
    for layer in s.i_layers() {
        acc = &acc * &(&BiLaurent::constant(product(layer)) - &y.scale(&sign));
    }
    acc.shift_y(-1)
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let (done, err) = sweep("iso", &CORPUS, 20, |s| {
        let layers = |st: &TodaState| {
            let mut v: Vec<Rational> = st.i_layers().iter().map(|l| product(l)).collect();
            v.sort();
            v
        };
        let (pv, pi) = (product(s.v()), layers(s));
        for st in s.trajectory(10)? {
            if product(st.v()) != pv || layers(&st) != pi {
                return Ok(Some(format!("products changed at t = {}", st.time())));
            }
            if build_x(&st).det()? != det_x_expected(&st) {
                return Ok(Some("det X factorization".into()));
            }
        }
        Ok(None)
    });
    finish("states conserved", done, err, t.elapsed(), Duration::from_secs(120))
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let (done, err) = sweep("degree", &CORPUS, 20, |s| {
        let (n, m) = (s.period(), s.layers());
        let sd = SpectralData::of_state(s)?;
        for (j, a) in sd.a.iter().enumerate().take(m + 1) {
            let k = a.degree().unwrap_or(0) * m;
            let ok = if (j * n) % m == 0 { k == j * n } else { k < j * n };
            if !ok {
                return Ok(Some(format!("deg A_{j} = {:?}", a.degree())));
            }
        }
        let g = gcd(n, m);
        let (n1, m1) = (n / g, m / g);
        for r in 0..=g {
            let sign = if (m * n.abs_diff(m) + r) % 2 == 0 { 1 } else { -1 };
            let a = &sd.a[r * m1];
            if a.degree() != Some(r * n1) || a.lead() != int(sign * binomial(g, r)) {
                return Ok(Some(format!("leading term of A_{}", r * m1)));
            }
        }
        Ok(None)
    });
    finish("profiles", done, err, t.elapsed(), Duration::from_secs(120))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let (done, err) = sweep("genus", &CORPUS, 5, |s| {
        let (n, m) = (s.period(), s.layers());
        let g = ((n - 1) * (m + 1) - gcd(n, m) + 1) / 2;
        let sd = SpectralData::of_state(s)?;
        let interior = newton_interior(&sd.phi);
        Ok((interior != g || sd.genus != g).then(|| format!("formula {g}, interior {interior}")))
    });
    let four_two = pdtoda_core::lax::genus(4, 2) == 4;
    finish("curves", done, err.or((!four_two).then(|| "(4,2) genus".into())), t.elapsed(), Duration::from_secs(120))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let (done, err) = sweep("deth", &[(3, 1), (4, 2), (5, 3)], 50, |s| {
        let m = s.layers();
        let sign = if (m + 1) % 2 == 0 { 1 } else { -1 };
        let want = UniPoly::new(vec![int(0), int(sign) * s.i_at(0, 0)]);
        let rep = det_h_check(s)?;
        Ok((rep.det != want).then(|| format!("det H = {:?}", rep.det.to_strings())))
    });
    finish("determinants", done, err, t.elapsed(), Duration::from_secs(120))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let (lemmas, err) = sweep("appendix", &[(3, 1), (4, 2), (5, 3), (4, 3)], 25, |s| {
        for k in 1..=s.layers() {
            for tail in ArrowSeq::all(k - 1) {
                if !lemma_a1_check(s, &tail)? {
                    return Ok(Some(format!("first lemma, tail {tail}")));
                }
            }
        }
        if !lemma_a2_check(s)? || !lemma_a3_check(s)? {
            return Ok(Some("second or third lemma".into()));
        }
        Ok((!second_row_check(s)?).then(|| "second row".into()))
    });
    if err.is_some() {
        return outcome(false, err.unwrap());
    }
    let (rows, err) = sweep("arrows", &[(7, 6)], 100, |s| {
        // Triangle of first rows, written out by hand for k = 1, 2.
        let i = |l: usize, n: isize| s.i_at(l, n).clone();
        let tri = figure_rows(s);
        if tri[0] != vec![i(0, 0), int(1)] || tri[1] != vec![i(0, 0) * i(1, 0), i(0, 1) + i(1, 0), int(1)] {
            return Ok(Some("triangle rows".into()));
        }
        for (k, want) in tri.iter().enumerate() {
            if u_row(s, k + 1)?.entries() != &want[..] {
                return Ok(Some(format!("row {}", k + 1)));
            }
        }
        for k in 1..=6 {
            let u = u_row(s, k)?;
            for j in 1..=k + 1 {
                if arrow_sum(s, k, j)? != u.get(j) {
                    return Ok(Some(format!("arrow sum k = {k}, j = {j}")));
                }
            }
        }
        Ok(None)
    });
    finish(
        &format!("states (+{lemmas} lemma states)"),
        rows,
        err,
        t.elapsed(),
        Duration::from_secs(300),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let (done, err) = sweep("divisor", &CORPUS, 9, |s| {
        let sd = SpectralData::of_state(s)?;
        let (r, _) = compute_r_s_of_state(s)?;
        if r.degree() != Some(2 * sd.genus) {
            return Ok(Some(format!("deg R = {:?}, g = {}", r.degree(), sd.genus)));
        }
        let u = upsilon(s, Variant::X)?;
        if u.degree() != sd.genus || u.upsilon.lead() != int(1) {
            return Ok(Some("Υ not monic of degree g".into()));
        }
        let rep = zeros_factorization_check(s)?;
        if !rep.holds() {
            return Ok(Some(format!("{:?}", rep.checks)));
        }
        Ok((!jacobi_holds(&build_x(s), &sd)?).then(|| "Jacobi remainder".into()))
    });
    finish("states", done, err, t.elapsed(), Duration::from_secs(300))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let (done, err) = sweep("theta", &[(2, 1)], 5, |s| {
        let rep = theta_check(s, 10, 1e-6)?;
        worst = worst.max(rep.max_abs_err);
        let shifted = rep.rows.iter().filter(|r| r.n == 1 && r.t >= 1).count();
        let p = &rep.principal;
        if shifted < 10 || rep.rows.iter().filter(|r| r.n == 0 && r.t >= 1).count() < 10 {
            return Ok(Some(format!("only {} rows evaluated", rep.rows.len())));
        }
        if p.n_k > 1e-8 || p.divisor_x > 1e-8 {
            return Ok(Some(format!("principal divisors {p:?}")));
        }
        Ok((!rep.pass).then(|| format!("max |err| {:e}", rep.max_abs_err)))
    });
    let mut o = finish("curves", done, err, t.elapsed(), Duration::from_secs(300));
    o.note = format!("{}, max |err| {worst:.1e}", o.note);
    o
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let (done, err) = sweep("oracle", &CORPUS, 17, |s| {
        let n = s.period();
        let v: Vec<f64> = s.v().iter().map(to_f64).collect();
        let i: Vec<f64> = s.i_layers()[0].iter().map(to_f64).collect();
        let mut x: Vec<f64> = (0..n).map(|k| i[k] + v[k]).collect();
        for _ in 0..100_000 {
            let old = x.clone();
            for k in 0..n {
                let p = (k + n - 1) % n;
                x[k] = i[k] + v[k] - i[k] * v[p] / x[p];
            }
            if old == x {
                break;
            }
        }
        let next = s.evolve()?;
        let layer = next.i_layers().last().unwrap();
        for k in 0..n {
            let nv = i[(k + 1) % n] * v[k] / x[k];
            let e = ((x[k] - to_f64(&layer[k])) / x[k]).abs().max(((nv - to_f64(&next.v()[k])) / nv).abs());
            worst = worst.max(e);
        }
        Ok((worst >= 1e-10).then(|| format!("relative deviation {worst:e}")))
    });
    let mut o = finish("states", done, err, t.elapsed(), Duration::from_secs(60));
    o.note = format!("{}, max rel {worst:.1e}", o.note);
    o
}

fn criterion_10() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_pdtoda"))
            .args(["verify", "--suite", "all", "--seed", "42"])
            .output()
            .expect("binary runs")
    };
    let t = Instant::now();
    let (a, b) = std::thread::scope(|sc| {
        let h = sc.spawn(run);
        let b = run();
        (h.join().unwrap(), b)
    });
    if !a.status.success() {
        return outcome(false, format!("verify exited {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout)));
    }
    outcome(
        a.stdout == b.stdout,
        format!("two runs, {} bytes each, in {:.1?}", a.stdout.len(), t.elapsed()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("isospectrality", criterion_1),
        ("conservation and det X", criterion_2),
        ("degree profile", criterion_3),
        ("genus", criterion_4),
        ("det H", criterion_5),
        ("appendix identities", criterion_6),
        ("divisor structure", criterion_7),
        ("theta reproduction", criterion_8),
        ("evolution oracle", criterion_9),
        ("determinism", criterion_10),
    ];
    let results: Vec<Outcome> = std::thread::scope(|sc| {
        let hs: Vec<_> = criteria.iter().map(|(_, f)| sc.spawn(*f)).collect();
        hs.into_iter().map(|h| h.join().unwrap_or_else(|_| outcome(false, "panicked"))).collect()
    });
    let mut all = true;
    for (k, ((name, _), o)) in criteria.iter().zip(&results).enumerate() {
        all &= o.pass;
        println!(
            "criterion {:>2} {:<24} {}  {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.note
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
