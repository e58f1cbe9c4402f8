//! Property checks shared by the property tests and the acceptance suite.
//! Each runs a deterministic proptest runner for the requested number of cases.
#![allow(dead_code)]

use std::cmp::Ordering;

use niucert::certify::{apply_v, certify_undistorted, lattice_bound, operator_norm_log, WitnessFunction};
use niucert::fields::absval::AbsoluteValue;
use niucert::fields::logvalue::LogValue;
use niucert::gallery;
use niucert::groups::{bfs_ball, bfs_ball_with, exponent_vectors, Schedule};
use niucert::theta::build_theta;
use niucert::{Ball, Field, FieldDescriptor, FieldElement, Group, Matrix, Rational};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn nonneg(x: &LogValue, max_prec: u64, what: &str) -> Result<(), TestCaseError> {
    match x.sign(max_prec) {
        Some(Ordering::Less) => Err(TestCaseError::fail(format!("{what}: negative"))),
        None => Err(TestCaseError::fail(format!("{what}: sign undecided at {max_prec} bits"))),
        _ => Ok(()),
    }
}

fn group(name: &str) -> Group {
    gallery::make(name).expect("gallery entry").group
}

fn pick(ball: &Ball, i: usize) -> &Matrix {
    ball.element(i % ball.len()).expect("in range").0
}

fn witness(group: &Group, basis: &str) -> WitnessFunction {
    let words: Vec<_> = basis.split(',').map(|w| group.parse_word(w).unwrap()).collect();
    certify_undistorted(group, &words, 64).expect("certificate").witness_function()
}

/// `f(gh) <= f(g) + f(h)` for certificate witness functions on ball pairs.
pub fn subadditivity(cases: u32) -> Result<(), String> {
    let fixtures: Vec<(Ball, WitnessFunction)> = [("bs12", "t", 5), ("sol_fib", "t", 4), ("diag_23", "a,b", 6), ("z2_block", "a,b", 6)]
        .iter()
        .map(|&(name, basis, r)| {
            let g = group(name);
            let f = witness(&g, basis);
            (bfs_ball(&g, r, usize::MAX), f)
        })
        .chain(std::iter::once({
            let g = group("heisenberg");
            (bfs_ball(&g, 4, usize::MAX), WitnessFunction::new(vec![AbsoluteValue::archimedean()], 64))
        }))
        .collect();
    run(cases, (0..fixtures.len(), any::<usize>(), any::<usize>()), |(k, i, j)| {
        let (ball, f) = &fixtures[k];
        let (g, h) = (pick(ball, i), pick(ball, j));
        let fg = f.value(g).unwrap();
        let fh = f.value(h).unwrap();
        let fgh = f.value(&g.mul(h)).unwrap();
        nonneg(&fg.add(&fh).sub(&fgh), f.max_precision(), &format!("f(g)+f(h)-f(gh) for {g} and {h}"))
    })
}

/// `log |lambda| <= log ||g||` for every diagonal entry of triangular elements.
pub fn eigenvalue_bound(cases: u32) -> Result<(), String> {
    let hall = group("hall_wreath");
    let desc = hall.descriptor().clone();
    let hall_avs = vec![
        AbsoluteValue::poly_adic(&desc.parse_element("t").unwrap()).unwrap(),
        AbsoluteValue::poly_adic(&desc.parse_element("t + 1").unwrap()).unwrap(),
        AbsoluteValue::degree(desc.clone()).unwrap(),
    ];
    let q_avs = vec![AbsoluteValue::p_adic(2).unwrap(), AbsoluteValue::p_adic(3).unwrap(), AbsoluteValue::archimedean()];
    let fixtures: Vec<(Ball, Vec<AbsoluteValue>)> = vec![
        (bfs_ball(&group("bs12"), 5, usize::MAX), q_avs.clone()),
        (bfs_ball(&group("heisenberg"), 3, usize::MAX), q_avs),
        (bfs_ball(&hall, 4, usize::MAX), hall_avs),
    ];
    run(cases, (0..fixtures.len(), any::<usize>(), 0..3usize, any::<bool>()), |(k, i, a, invert)| {
        let (ball, avs) = &fixtures[k];
        let g = pick(ball, i);
        let g = if invert { g.inverse().unwrap() } else { g.clone() };
        prop_assert!(g.is_upper_triangular(), "{g} is not triangular");
        let av = &avs[a];
        let norm = operator_norm_log(&g, av).unwrap();
        for l in 0..g.dim() {
            let lam = av.log_abs(g.get(l, l)).unwrap();
            nonneg(&norm.sub(&lam), 512, &format!("{av}: log||g|| - log|g_{l}{l}| for {g}"))?;
        }
        Ok(())
    })
}

fn rational_text(n: i64, d: i64) -> String {
    format!("({n})/({d})")
}

/// Valuations are additive on products and satisfy `v(x+y) >= min(v(x), v(y))`.
pub fn valuations(cases: u32) -> Result<(), String> {
    let q = FieldDescriptor::Rationals;
    let qt: FieldDescriptor = "Q(t)".parse().unwrap();
    let q5 = FieldDescriptor::real_quadratic(5).unwrap();
    let gf3t: FieldDescriptor = "GF(3)(t)".parse().unwrap();
    let families: Vec<(FieldDescriptor, Vec<AbsoluteValue>)> = vec![
        (q.clone(), [2, 3, 5, 7].iter().map(|&p| AbsoluteValue::p_adic(p).unwrap()).collect()),
        (
            qt.clone(),
            vec![
                AbsoluteValue::poly_adic(&qt.parse_element("t").unwrap()).unwrap(),
                AbsoluteValue::poly_adic(&qt.parse_element("t - 1").unwrap()).unwrap(),
                AbsoluteValue::poly_adic(&qt.parse_element("t^2 + 1").unwrap()).unwrap(),
                AbsoluteValue::degree(qt.clone()).unwrap(),
            ],
        ),
        (
            q5.clone(),
            vec![
                AbsoluteValue::quadratic_p_adic(5, 11, false).unwrap(),
                AbsoluteValue::quadratic_p_adic(5, 11, true).unwrap(),
                AbsoluteValue::quadratic_p_adic(5, 19, false).unwrap(),
            ],
        ),
        (
            gf3t.clone(),
            vec![
                AbsoluteValue::poly_adic(&gf3t.parse_element("t").unwrap()).unwrap(),
                AbsoluteValue::poly_adic(&gf3t.parse_element("t + 1").unwrap()).unwrap(),
                AbsoluteValue::degree(gf3t.clone()).unwrap(),
            ],
        ),
    ];
    let coeffs = || prop::collection::vec(-6i64..=6, 4);
    run(cases, (0..families.len(), 0..4usize, coeffs(), coeffs()), |(k, a, c1, c2)| {
        let (desc, avs) = &families[k];
        let av = &avs[a % avs.len()];
        let element = |c: &[i64]| -> Option<FieldElement> {
            let text = match desc {
                FieldDescriptor::Rationals => rational_text(c[0] * 36 + c[1] * 6 + c[2], c[3] * 7 + 50),
                FieldDescriptor::RealQuadratic(_) => format!("(({}) + ({}) * sqrt(5)) / ({})", c[0] * 11 + c[1], c[2], c[3] + 20),
                _ => format!("(({}) + ({})*t + ({})*t^2) / (t + ({}))", c[0], c[1], c[2], c[3] + 20),
            };
            desc.parse_element(&text).ok().filter(|x| !x.vanishes())
        };
        let (Some(x), Some(y)) = (element(&c1), element(&c2)) else { return Ok(()) };
        let v = |z: &FieldElement| av.valuation(z).unwrap().expect("discrete");
        prop_assert_eq!(v(&x.mul(&y)), v(&x) + v(&y), "{} at {} and {}", av, x, y);
        let s = x.add(&y);
        if !s.vanishes() {
            prop_assert!(v(&s) >= v(&x).min(v(&y)), "{} at {} + {}", av, x, y);
        }
        Ok(())
    })
}

fn small_matrix() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-3i64..=3).prop_filter("invertible", |m| m[0] * m[3] - m[1] * m[2] != 0)
}

/// Sequential and parallel frontier expansion give identical balls.
pub fn bfs_determinism(cases: u32) -> Result<(), String> {
    let q = FieldDescriptor::Rationals;
    run(cases, (small_matrix(), small_matrix(), 0u32..=3), |(m1, m2, r)| {
        let mk = |m: [i64; 4]| Matrix::from_ints(&q, &[&[m[0], m[1]], &[m[2], m[3]]]);
        let g = Group::new(vec![("a".into(), mk(m1)), ("b".into(), mk(m2))]).unwrap();
        let s = bfs_ball_with(&g, r, 50_000, Schedule::Sequential);
        let p = bfs_ball_with(&g, r, 50_000, Schedule::Parallel);
        prop_assert_eq!(s.len(), p.len());
        prop_assert_eq!(s.completed_radius(), p.completed_radius());
        for ((x, lx), (y, ly)) in s.iter().zip(p.iter()) {
            prop_assert_eq!(x, y);
            prop_assert_eq!(lx, ly);
            prop_assert_eq!(s.word(x), p.word(y));
        }
        Ok(())
    })
}

/// `theta(gh) = theta(g) theta(h)` on ball pairs, and `theta(a)` matches
/// `mu_j^{d_j}` on the central generators' powers.
pub fn theta_multiplicativity(cases: u32) -> Result<(), String> {
    let q = FieldDescriptor::Rationals;
    let u = Matrix::from_ints(&q, &[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]]);
    let v = Matrix::from_ints(&q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 5]]);
    let blocks = Group::new(vec![("u".into(), u.clone()), ("v".into(), v)]).unwrap();
    let z2 = group("z2_block");
    let heis = group("heisenberg");
    let fixtures = [(bfs_ball(&blocks, 5, usize::MAX), build_theta(blocks.generators(), &[u]).unwrap()),
        (bfs_ball(&z2, 5, usize::MAX), build_theta(z2.generators(), &[z2.generator("a").unwrap().clone()]).unwrap()),
        (bfs_ball(&heis, 4, usize::MAX), build_theta(heis.generators(), &[heis.generator("z").unwrap().clone()]).unwrap())];
    run(cases, (0..fixtures.len(), any::<usize>(), any::<usize>(), -6i64..=6), |(k, i, j, n)| {
        let (ball, theta) = &fixtures[k];
        let (g, h) = (pick(ball, i), pick(ball, j));
        let tg = theta.eval(g).unwrap();
        let th = theta.eval(h).unwrap();
        let product: Vec<FieldElement> = tg.iter().zip(&th).map(|(a, b)| a.mul(b)).collect();
        prop_assert_eq!(theta.eval(&g.mul(h)).unwrap(), product);
        let a = theta.central_generators()[0].pow_signed(n).unwrap();
        prop_assert_eq!(theta.eval(&a).unwrap(), theta.predicted(&[n]).unwrap());
        Ok(())
    })
}

fn log_entry() -> impl Strategy<Value = (i64, i64, i64)> {
    (-3i64..=3, -3i64..=3, -2i64..=2)
}

fn entry_value((a, b, c): (i64, i64, i64)) -> LogValue {
    let int = |k: i64| Rational::from_integer(k.into());
    LogValue::ln_prime(2).scale(&int(a)).add(&LogValue::ln_prime(3).scale(&int(b))).add(&LogValue::ln_prime(5).scale(&int(c)))
}

/// Fixed-point scale for the quick check: endpoints are rounded outward to
/// multiples of `2^-FIXED_BITS`.
const FIXED_BITS: u64 = 64;

fn fixed(q: &Rational) -> i128 {
    let scaled = q * Rational::from_integer(2.into()).pow(FIXED_BITS as i32);
    i128::try_from(scaled.ceil().to_integer()).expect("fits in i128")
}

/// `max_i |(Vn)_i| >= c ||n||_1` for the constant `c` returned by `lattice_bound`.
/// A fixed-point interval pass settles almost every `n`; the rest are
/// compared exactly.
pub fn check_lattice_bound(v: &[Vec<LogValue>], vectors: &[Vec<i64>]) -> Result<usize, String> {
    let Ok(bound) = lattice_bound(v, 64) else { return Ok(0) };
    let enclosed: Vec<Vec<(i128, i128)>> = v
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let e = x.enclose(FIXED_BITS).round_outward(FIXED_BITS);
                    (fixed(e.lo()), fixed(e.hi()))
                })
                .collect()
        })
        .collect();
    let max_l1 = vectors.iter().map(|n| n.iter().map(|x| x.abs()).sum::<i64>()).max().unwrap_or(0);
    let thresholds: Vec<i128> = (0..=max_l1).map(|l1| fixed(&(bound.c.clone() * Rational::from_integer(l1.into())))).collect();
    let mut checked = 0;
    for n in vectors {
        let l1: i64 = n.iter().map(|x| x.abs()).sum();
        let quick = enclosed.iter().any(|row| {
            let (lo, hi) = row.iter().zip(n).fold((0i128, 0i128), |(lo, hi), (&(a, b), &k)| {
                let k = k as i128;
                if k >= 0 {
                    (lo + k * a, hi + k * b)
                } else {
                    (lo + k * b, hi + k * a)
                }
            });
            let abs_lo = if lo > 0 { lo } else if hi < 0 { -hi } else { 0 };
            abs_lo >= thresholds[l1 as usize]
        });
        if !quick {
            let exact = apply_v(v, n);
            let c_n = LogValue::constant(bound.c.clone() * Rational::from_integer(l1.into()));
            let holds = exact.iter().any(|y| {
                let abs = if y.sign(1024) == Some(Ordering::Less) { y.neg() } else { y.clone() };
                matches!(abs.sub(&c_n).sign(1024), Some(Ordering::Greater | Ordering::Equal))
            });
            if !holds {
                return Err(format!("||Vn||_inf < c ||n||_1 for n = {n:?}, c = {}", bound.c));
            }
        }
        checked += 1;
    }
    Ok(checked)
}

/// Random `V` with entries in the span of `1, ln 2, ln 3, ln 5`: exhaustive
/// over `||n||_1 <= 20` for one or two columns, a sample for three.
pub fn lattice_soundness(cases: u32) -> Result<(), String> {
    let all1 = exponent_vectors(1, 20);
    let all2 = exponent_vectors(2, 20);
    let all3 = exponent_vectors(3, 20);
    let strategy = (1usize..=3, 0usize..=1).prop_flat_map(|(m, extra)| {
        (
            prop::collection::vec(prop::collection::vec(log_entry(), m), m + extra),
            prop::collection::vec(any::<prop::sample::Index>(), 48),
        )
    });
    run(cases, strategy, |(rows, picks)| {
        let v: Vec<Vec<LogValue>> = rows.iter().map(|r| r.iter().map(|&e| entry_value(e)).collect()).collect();
        let vectors: Vec<Vec<i64>> = match v[0].len() {
            1 => all1.clone(),
            2 => all2.clone(),
            _ => picks.iter().map(|i| i.get(&all3).clone()).collect(),
        };
        check_lattice_bound(&v, &vectors).map(|_| ()).map_err(TestCaseError::fail)
    })
}
