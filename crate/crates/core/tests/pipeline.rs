use std::collections::HashMap;
use std::hash::Hash;

use niucert::certify::{certify_undistorted, verify_certificate, Certificate, VerifyOptions};
use niucert::gallery;
use niucert::groups::{bfs_ball, GroupDefinition};
use niucert::theta::{build_theta, kernel_audit, splitting_audit, KernelVerdict};
use niucert::{Group, Rational};

fn group(name: &str) -> Group {
    gallery::make(name).unwrap().group
}

/// Sphere sizes of a Cayley graph by breadth-first search over an
/// independent model of the group.
fn model_spheres<T: Clone + Eq + Hash>(identity: T, letters: &[&dyn Fn(&T) -> T], radius: u32) -> Vec<usize> {
    let mut seen: HashMap<T, u32> = HashMap::from([(identity.clone(), 0)]);
    let mut frontier = vec![identity];
    let mut sizes = vec![1];
    for r in 1..=radius {
        let mut next = Vec::new();
        for x in &frontier {
            for step in letters {
                let y = step(x);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), r);
                    next.push(y);
                }
            }
        }
        sizes.push(next.len());
        frontier = next;
    }
    sizes
}

#[test]
fn bs12_spheres_match_affine_model() {
    // x -> 2^k x + b with b kept in units of 2^-16
    type Affine = (i32, i64);
    let unit = 1i64 << 16;
    let shift = move |k: i32| if k >= 0 { unit << k } else { unit >> (-k) };
    let a = move |&(k, b): &Affine| (k, b + shift(k));
    let a_inv = move |&(k, b): &Affine| (k, b - shift(k));
    let t = |&(k, b): &Affine| (k + 1, b);
    let t_inv = |&(k, b): &Affine| (k - 1, b);
    let expected = model_spheres((0, 0), &[&a, &a_inv, &t, &t_inv], 9);
    let ball = bfs_ball(&group("bs12"), 9, usize::MAX);
    assert_eq!(ball.sphere_sizes(), expected);
}

#[test]
fn heisenberg_spheres_match_integer_model() {
    // [[1, a, c], [0, 1, b], [0, 0, 1]] as (a, b, c)
    type H = (i64, i64, i64);
    let mul = |&(a, b, c): &H, &(x, y, z): &H| (a + x, b + y, c + z + a * y);
    let gens: [H; 6] = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)];
    let steps: Vec<Box<dyn Fn(&H) -> H>> = gens.iter().map(|g| Box::new(move |h: &H| mul(h, g)) as Box<dyn Fn(&H) -> H>).collect();
    let refs: Vec<&dyn Fn(&H) -> H> = steps.iter().map(|s| s.as_ref()).collect();
    let expected = model_spheres((0, 0, 0), &refs, 6);
    let ball = bfs_ball(&group("heisenberg"), 6, usize::MAX);
    assert_eq!(ball.sphere_sizes(), expected);
}

#[test]
fn certificate_constants_match_float_oracles() {
    // 1 / (1/ln 2 + 1/ln 3), computed independently in f64
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    let oracle = 1.0 / (1.0 / l2 + 1.0 / l3);
    let g = group("diag_23");
    let basis: Vec<_> = ["a", "b"].iter().map(|w| g.parse_word(w).unwrap()).collect();
    let cert = certify_undistorted(&g, &basis, 64).unwrap();
    let c = niucert::fields::logvalue::approx(&cert.c);
    assert!(c <= oracle + 1e-15 && oracle - c < 1e-12, "{c} vs {oracle}");

    let sol = group("sol_fib");
    let cert = certify_undistorted(&sol, &[sol.parse_word("t").unwrap()], 64).unwrap();
    let two_log_phi = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let enclosure = cert.c_exact.as_ref().unwrap().enclose(64);
    assert!(enclosure.lo().clone() <= float(two_log_phi + 1e-12) && float(two_log_phi - 1e-12) <= enclosure.hi().clone());
}

fn float(x: f64) -> Rational {
    Rational::from_float(x).unwrap()
}

#[test]
fn certificate_survives_json() {
    let g = group("bs12");
    let cert = certify_undistorted(&g, &[g.parse_word("t").unwrap()], 64).unwrap();
    let text = serde_json::to_string(&cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    let ball = bfs_ball(&back.rebuild_group().unwrap(), 6, usize::MAX);
    let report = verify_certificate(&back, &ball, &VerifyOptions { range: 12, pairs: 200, seed: 7 }).unwrap();
    assert!(report.valid && report.conclusive);
}

#[test]
fn group_definitions_round_trip() {
    for entry in gallery::all() {
        let def = entry.group.definition();
        let back: GroupDefinition = serde_json::from_str(&serde_json::to_string(&def).unwrap()).unwrap();
        assert_eq!(back.build().unwrap().generators(), entry.group.generators(), "{}", entry.name);
    }
}

#[test]
fn theta_audits_across_the_gallery() {
    let lamp = group("lamplighter:3");
    let a = lamp.generator("a").unwrap().clone();
    // a is not central in the lamplighter group itself
    assert!(build_theta(lamp.generators(), std::slice::from_ref(&a)).is_err());
    let theta = build_theta(std::slice::from_ref(&a), std::slice::from_ref(&a)).unwrap();
    let audit = kernel_audit(&theta, &[a], 9, 27).unwrap();
    assert_eq!(audit.verdict, KernelVerdict::TorsionAsTested);
    assert!(audit.scope.contains("test set"));

    let z2 = group("z2_block");
    let ball = bfs_ball(&z2, 4, usize::MAX);
    let b = z2.generator("b").unwrap().clone();
    let w = splitting_audit(&z2, &[b], &ball, 6, 64).unwrap();
    assert_eq!((w.factored, w.outside, w.kernel_size), (ball.len(), 0, 9));
    let json = serde_json::to_value(&w).unwrap();
    assert!(json["scope"].as_str().unwrap().starts_with("witnessed"));
}
