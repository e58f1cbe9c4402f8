//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use niucert::certify::{certify_undistorted, verify_certificate, FailureStage, VerifyOptions, WitnessFunction};
use niucert::fields::absval::AbsoluteValue;
use niucert::fields::logvalue::LogValue;
use niucert::gallery::{self, GalleryEntry};
use niucert::groups::{
    audit_unipotents, bfs_ball, distortion_profile, exponent_vectors, subgroup_element, AuditVerdict, OrderReport,
    WordLength,
};
use niucert::theta::splitting_audit;
use niucert::{Error, FieldDescriptor, Matrix, Rational};

type Outcome = Result<String, String>;

fn entry(name: &str) -> GalleryEntry {
    gallery::make(name).expect("gallery entry")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn identities() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for (name, range) in [("bs12", 30), ("heisenberg", 50), ("sol_fib", 30)] {
        total += gallery::verify_identities(&entry(name), range).map_err(err)?.checked;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{total} exact identities in {:.2}s", elapsed.as_secs_f64()))
}

fn classification() -> Outcome {
    let expectations: [(&str, Option<u64>, AuditVerdict); 7] = [
        ("hall_wreath", None, AuditVerdict::ViolationWitnessed),
        ("bs12", None, AuditVerdict::ViolationWitnessed),
        ("heisenberg", None, AuditVerdict::ViolationWitnessed),
        ("sol_fib", None, AuditVerdict::ViolationWitnessed),
        ("lamplighter:2", Some(2), AuditVerdict::NoViolationInBall),
        ("lamplighter:3", Some(3), AuditVerdict::NoViolationInBall),
        ("diag_23", None, AuditVerdict::VacuouslyConsistent),
    ];
    let radius = 4;
    for (name, p, verdict) in expectations {
        let g = entry(name).group;
        let audit = audit_unipotents(&g, &bfs_ball(&g, radius, usize::MAX), 64);
        ensure(audit.verdict == verdict, || format!("{name}: {:?}", audit.verdict))?;
        match p {
            Some(p) => ensure(audit.witnesses.iter().all(|w| w.order == OrderReport::Finite(p)), || {
                format!("{name}: unipotent orders other than {p}")
            })?,
            None if verdict == AuditVerdict::ViolationWitnessed => {
                ensure(audit.infinite_order_witness().is_some(), || format!("{name}: no infinite-order witness"))?
            }
            None => {}
        }
        let status = Command::new(env!("CARGO_BIN_EXE_niucert"))
            .args(["classify", "--gallery", name, "-r", &radius.to_string()])
            .output()
            .map_err(err)?
            .status
            .code();
        ensure(status == Some(0), || format!("{name}: exit code {status:?}"))?;
    }
    Ok(format!("7 gallery groups at radius {radius}, exit codes 0"))
}

fn certificates() -> Outcome {
    let q = FieldDescriptor::Rationals;
    let ln2 = LogValue::ln_prime(2);

    let bs = entry("bs12").group;
    let cert = certify_undistorted(&bs, &[bs.parse_word("t").unwrap()], 64).map_err(err)?;
    ensure(cert.c_exact.as_ref() == Some(&ln2) && cert.big_c_exact.as_ref() == Some(&ln2), || {
        format!("bs12: c = {:?}, C = {:?}", cert.c_exact, cert.big_c_exact)
    })?;
    ensure(cert.ratio == Rational::from_integer(1.into()), || format!("bs12: c/C >= {}", cert.ratio))?;
    let ball = bfs_ball(&bs, 8, usize::MAX);
    let report = verify_certificate(&cert, &ball, &VerifyOptions::default()).map_err(err)?;
    let violations: usize = report.checks.iter().map(|c| c.violated).sum();
    ensure(report.ball_complete && report.valid && report.conclusive && violations == 0, || {
        format!("bs12 verification: valid {} conclusive {} violations {violations}", report.valid, report.conclusive)
    })?;

    let d23 = entry("diag_23").group;
    let basis: Vec<_> = ["a", "b"].iter().map(|w| d23.parse_word(w).unwrap()).collect();
    let cert23 = certify_undistorted(&d23, &basis, 64).map_err(err)?;
    let f = WitnessFunction::new(vec![AbsoluteValue::p_adic(2).unwrap(), AbsoluteValue::p_adic(3).unwrap()], 64);
    let gens = [Matrix::from_ints(&q, &[&[2]]), Matrix::from_ints(&q, &[&[3]])];
    let mut checked = 0;
    for n in exponent_vectors(2, 20) {
        let m = subgroup_element(&gens, &n).map_err(err)?;
        let int = |k: i64| Rational::from_integer(k.abs().into());
        let expected = ln2.scale(&int(n[0])).add(&LogValue::ln_prime(3).scale(&int(n[1])));
        for value in [f.value(&m).map_err(err)?, cert23.witness_function().value(&m).map_err(err)?] {
            ensure(value == expected, || format!("f(a({n:?})) = {value:?}"))?;
            let slack = value.sub(&ln2.scale(&int(n[0].abs() + n[1].abs()))).enclose(64);
            ensure(slack.lo() >= &Rational::from_integer(0.into()), || format!("f(a({n:?})) < ||n||_1 log 2 at 64 bits"))?;
            let lower = value.sub(&LogValue::constant(cert23.c.clone() * int(n[0].abs() + n[1].abs()))).enclose(64);
            ensure(lower.lo() >= &Rational::from_integer(0.into()), || format!("f(a({n:?})) < c ||n||_1 at 64 bits"))?;
        }
        checked += 1;
    }

    let sol = entry("sol_fib").group;
    let sol_t = certify_undistorted(&sol, &[sol.parse_word("t").unwrap()], 64).map_err(err)?;
    let phi = sol.descriptor().parse_element("(1 + sqrt(5))/2").unwrap();
    let two_log_phi = AbsoluteValue::embedding(5, true).unwrap().log_abs(&phi).unwrap().scale(&Rational::from_integer(2.into()));
    ensure(sol_t.c_exact.as_ref() == Some(&two_log_phi), || format!("sol <t>: c = {:?}", sol_t.c_exact))?;
    ensure(two_log_phi.enclose(64).lo() > &Rational::from_integer(0.into()) && sol_t.c > Rational::from_integer(0.into()), || {
        "sol <t>: c not interval-positive".into()
    })?;

    let basis: Vec<_> = ["a", "b"].iter().map(|w| sol.parse_word(w).unwrap()).collect();
    let failure = certify_undistorted(&sol, &basis, 64).err().ok_or("sol <a,b> was certified")?;
    ensure(
        failure.stage == FailureStage::SelectAbsoluteValues && failure.reason.contains("all diagonal entries are 1"),
        || format!("sol <a,b>: {failure}"),
    )?;
    Ok(format!(
        "bs12 <t> c = C = log 2 verified on {} elements; <2,3> checked on {checked} vectors; sol <t> c = 2 log phi; sol <a,b> refused",
        ball.len()
    ))
}

/// Minimal lengths of `a^n` over freely reduced words of length <= `radius`
/// in BS(1,2), evaluated as affine maps `x -> 2^k x + b` with `b` stored in
/// units of `2^-radius`.
fn bs12_oracle(radius: u32, max_n: i64) -> HashMap<i64, u32> {
    let mut best = HashMap::new();
    let unit = 1i64 << radius;
    // letters: 0 = a, 1 = a^-1, 2 = t, 3 = t^-1
    fn dfs(k: i32, b: i64, last: Option<u8>, len: u32, radius: u32, unit: i64, max_n: i64, best: &mut HashMap<i64, u32>) {
        if k == 0 && b % unit == 0 && (b / unit).abs() <= max_n {
            let e = best.entry(b / unit).or_insert(len);
            *e = (*e).min(len);
        }
        if len == radius {
            return;
        }
        for letter in 0u8..4 {
            if last == Some(letter ^ 1) {
                continue;
            }
            let shift = |k: i32| if k >= 0 { unit << k } else { unit >> (-k) };
            let (k2, b2) = match letter {
                0 => (k, b + shift(k)),
                1 => (k, b - shift(k)),
                2 => (k + 1, b),
                _ => (k - 1, b),
            };
            dfs(k2, b2, Some(letter), len + 1, radius, unit, max_n, best);
        }
    }
    dfs(0, 0, None, 0, radius, unit, max_n, &mut best);
    best
}

fn profiles() -> Outcome {
    let bs = entry("bs12");
    let a = bs.group.generator("a").unwrap().clone();
    let ball = bfs_ball(&bs.group, 11, usize::MAX);
    ensure(ball.is_complete(), || "bs12 ball truncated".into())?;
    let ids = gallery::profile_identities(&bs, &["a"], 30).map_err(err)?;
    let profile = distortion_profile(&bs.group, &[("a".into(), a.clone())], 32, &ball, &ids).map_err(err)?;
    for k in 1..=30i64 {
        let row = profile.row(&[1 << k]).ok_or_else(|| format!("no row for a^(2^{k})"))?;
        let upper = row.best_upper().ok_or_else(|| format!("no bound for a^(2^{k})"))?;
        ensure(upper as i64 <= 2 * k + 1, || format!("l(a^(2^{k})) <= {upper} > {}", 2 * k + 1))?;
    }
    let oracle = bs12_oracle(11, 32);
    ensure(oracle.len() > 32, || format!("oracle reached only {} powers", oracle.len()))?;
    for n in -32i64..=32 {
        let bfs = ball.length(&a.pow_signed(n).unwrap());
        let ok = match (bfs, oracle.get(&n)) {
            (WordLength::Exact(l), Some(&o)) => l == o,
            (WordLength::GreaterThan(11), None) => true,
            _ => false,
        };
        ensure(ok, || format!("a^{n}: bfs {bfs:?}, oracle {:?}", oracle.get(&n)))?;
    }

    let h = entry("heisenberg");
    let z = h.group.generator("z").unwrap().clone();
    let hball = bfs_ball(&h.group, 6, usize::MAX);
    let ids = gallery::profile_identities(&h, &["z"], 12).map_err(err)?;
    let hp = distortion_profile(&h.group, &[("z".into(), z)], 1, &hball, &ids).map_err(err)?;
    for n in 1..=12i64 {
        let row = hp.row(&[n * n]).ok_or_else(|| format!("no row for z^{}", n * n))?;
        let upper = row.best_upper().unwrap_or(u32::MAX);
        ensure(upper as i64 <= 4 * n, || format!("l(z^{}) <= {upper} > {}", n * n, 4 * n))?;
    }

    let z2 = entry("z2_block").group;
    let zball = bfs_ball(&z2, 10, usize::MAX);
    let basis: Vec<(String, Matrix)> = z2.labels().iter().cloned().zip(z2.generators().iter().cloned()).collect();
    let zp = distortion_profile(&z2, &basis, 10, &zball, &[]).map_err(err)?;
    for row in &zp.rows {
        ensure(row.exact == Some(row.l1 as u32), || format!("Z^2 at {:?}: {:?}", row.exponents, row.status()))?;
    }
    Ok(format!(
        "bs12 a^n for |n| <= 32 match the word oracle ({} within radius 11), a^(2^k) <= 2k+1 for k <= 30; heisenberg z^(n^2) <= 4n for n <= 12; Z^2 exact on {} vectors",
        oracle.len(),
        zp.rows.len()
    ))
}

fn properties() -> Outcome {
    let cases = 1000;
    let suites: [(&str, fn(u32) -> Result<(), String>); 6] = [
        ("subadditivity", common::subadditivity),
        ("eigenvalue bound", common::eigenvalue_bound),
        ("valuations", common::valuations),
        ("bfs determinism", common::bfs_determinism),
        ("theta multiplicativity", common::theta_multiplicativity),
        ("lattice soundness", common::lattice_soundness),
    ];
    for (name, run) in suites {
        run(cases).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("6 suites x {cases} cases"))
}

fn splitting() -> Outcome {
    let z2 = entry("z2_block").group;
    let ball = bfs_ball(&z2, 6, usize::MAX);
    let a = z2.generator("a").unwrap().clone();
    let w = splitting_audit(&z2, &[a], &ball, 10, 64).map_err(err)?;
    ensure(ball.is_complete() && w.complete && w.factored == ball.len() && w.outside == 0, || {
        format!("z2_block: factored {} of {}, outside {}, undecided {}", w.factored, ball.len(), w.outside, w.undecided)
    })?;
    let h = entry("heisenberg").group;
    let z = h.generator("z").unwrap().clone();
    match splitting_audit(&h, &[z], &bfs_ball(&h, 3, usize::MAX), 4, 64) {
        Err(Error::InjectivityFailure(_)) => {}
        other => return Err(format!("heisenberg <z>: {:?}", other.map(|w| w.scope))),
    }
    Ok(format!("z2_block: {} of {} elements factor as k a; heisenberg <z>: injectivity failure", w.factored, ball.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("identity suite", identities),
        ("classification suite", classification),
        ("certificate suite", certificates),
        ("distortion profiles", profiles),
        ("property suites", properties),
        ("splitting audit", splitting),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
