use proptest::prelude::*;

use pdtoda_core::algebra::matrix::det_rational;
use pdtoda_core::algebra::rational::{format_rational, parse_rational, rat, to_f64};
use pdtoda_core::algebra::resultant::resultant_y;
use pdtoda_core::algebra::{gcd_monic, BiLaurent, LaurentMatrix, Rational, UniPoly};
use pdtoda_core::lax::{build_x, char_poly};
use pdtoda_core::random::{random_state, rng_from_seed};
use pdtoda_core::TodaState;

const SHAPES: [(usize, usize); 6] = [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3), (5, 2)];

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..10, 1i64..6).prop_map(|(p, q)| rat(p, q))
}

fn poly(max_deg: usize) -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(small_rat(), 1..=max_deg + 1).prop_map(UniPoly::new)
}

/// Polynomial in `y` of exact degree `d` with coefficients in `Q[x]`.
fn poly_in_y(d: usize) -> impl Strategy<Value = BiLaurent> {
    prop::collection::vec(poly(2), d + 1).prop_map(move |mut cs| {
        if cs[d].is_zero() {
            cs[d] = UniPoly::one();
        }
        BiLaurent::from_poly_in_y(&cs, 0)
    })
}

fn laurent_entry() -> impl Strategy<Value = BiLaurent> {
    prop::collection::vec((small_rat(), 0u32..2, -1i32..2), 0..3).prop_map(|ts| {
        ts.into_iter()
            .fold(BiLaurent::zero(), |acc, (c, a, b)| acc + BiLaurent::monomial(c, a, b))
    })
}

fn laurent_matrix(n: usize) -> impl Strategy<Value = LaurentMatrix> {
    prop::collection::vec(laurent_entry(), n * n)
        .prop_map(move |es| LaurentMatrix::from_fn(n, n, |i, j| es[i * n + j].clone()))
}

fn state() -> impl Strategy<Value = TodaState> {
    (0..SHAPES.len(), any::<u64>()).prop_map(|(k, seed)| {
        let (n, m) = SHAPES[k];
        random_state(n, m, &mut rng_from_seed(seed)).unwrap()
    })
}

/// One step by iterating `x_n = I_n + V_n - I_n V_{n-1} / x_{n-1}` around the
/// ring until it settles; returns the new layer and the new `V`.
fn fixed_point_step(v: &[f64], i: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = v.len();
    let mut x: Vec<f64> = (0..n).map(|k| i[k] + v[k]).collect();
    for _ in 0..200_000 {
        let before = x.clone();
        for k in 0..n {
            x[k] = i[k] + v[k] - i[k] * v[(k + n - 1) % n] / x[(k + n - 1) % n];
        }
        if x.iter().zip(&before).all(|(a, b)| a == b) {
            break;
        }
    }
    let nv = (0..n).map(|k| i[(k + 1) % n] * v[k] / x[k]).collect();
    (x, nv)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_text_round_trips(r in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn det_is_multiplicative(a in laurent_matrix(3), b in laurent_matrix(3)) {
        let ab = a.try_mul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn resultant_is_antisymmetric(
        (dp, dq, p, q) in (1usize..4, 1usize..4)
            .prop_flat_map(|(dp, dq)| (Just(dp), Just(dq), poly_in_y(dp), poly_in_y(dq)))
    ) {
        let pq = resultant_y(&p, &q).unwrap();
        let qp = resultant_y(&q, &p).unwrap();
        let sign = if (dp * dq) % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        prop_assert_eq!(pq, qp.scale(&sign));
    }

    #[test]
    fn shared_factor_kills_the_resultant(a in poly(2), p in poly_in_y(1), q in poly_in_y(2)) {
        let f = BiLaurent::y() - BiLaurent::from_x_poly(&a);
        let r = resultant_y(&(&f * &p), &(&f * &q)).unwrap();
        prop_assert!(r.is_zero());
    }

    #[test]
    fn gcd_divides_and_is_maximal(f in poly(2), p in poly(3), q in poly(3)) {
        prop_assume!(!f.is_zero() && !p.is_zero() && !q.is_zero());
        let (fp, fq) = (&f * &p, &f * &q);
        let g = gcd_monic(&fp, &fq).unwrap();
        prop_assert!(g.divides(&fp) && g.divides(&fq));
        prop_assert!(f.divides(&g));
        prop_assert!(g.is_zero() || g.lead() == rat(1, 1));
    }

    #[test]
    fn desnanot_jacobi(entries in prop::collection::vec(small_rat(), 16)) {
        let a: Vec<Vec<Rational>> = entries.chunks(4).map(|r| r.to_vec()).collect();
        let sub = |rows: &[usize], cols: &[usize]| -> Rational {
            let m: Vec<Vec<Rational>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect())
                .collect();
            det_rational(&m)
        };
        let lhs = det_rational(&a) * sub(&[1, 2], &[1, 2]);
        let rhs = sub(&[1, 2, 3], &[1, 2, 3]) * sub(&[0, 1, 2], &[0, 1, 2])
            - sub(&[1, 2, 3], &[0, 1, 2]) * sub(&[0, 1, 2], &[1, 2, 3]);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evolution_matches_fixed_point_iteration(s in state()) {
        let next = s.evolve().unwrap();
        prop_assert!(s.closure_holds(&next));
        let v: Vec<f64> = s.v().iter().map(to_f64).collect();
        let i: Vec<f64> = s.i_layers()[0].iter().map(to_f64).collect();
        let (x, nv) = fixed_point_step(&v, &i);
        let layer = next.i_layers().last().unwrap();
        for k in 0..s.period() {
            prop_assert!(rel(x[k], to_f64(&layer[k])) < 1e-10);
            prop_assert!(rel(nv[k], to_f64(&next.v()[k])) < 1e-10);
        }
    }

    #[test]
    fn spectral_polynomial_is_invariant(s in state()) {
        let phi = char_poly(&build_x(&s)).unwrap();
        for st in s.trajectory(3).unwrap() {
            prop_assert_eq!(&char_poly(&build_x(&st)).unwrap(), &phi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evolution_keeps_states_valid(s in state()) {
        let traj = s.trajectory(5).unwrap();
        let c0 = s.conserved_products();
        for st in &traj {
            prop_assert!(st.validate().is_ok());
            prop_assert!(st.v().iter().all(|x| *x > rat(0, 1)));
            prop_assert_eq!(st.conserved_products().sorted_multiset(), c0.sorted_multiset());
        }
    }
}
