use std::error::Error as StdError;
use std::fs;
use std::path::Path;

use niucert::certify::{certify_undistorted, verify_certificate, Certificate, VerifyOptions};
use niucert::gallery::{self, ExpectedAudit, GalleryEntry};
use niucert::groups::{audit_unipotents, bfs_ball, distortion_profile, AuditVerdict, GroupDefinition, OrderReport};
use niucert::matrices::VirtualUnipotence;
use niucert::theta::{build_theta, kernel_audit, splitting_audit, KernelVerdict};
use niucert::{Ball, Error, Group, Matrix, Word};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{BallArgs, Output, Source};

type CmdResult = Result<Status, Box<dyn StdError>>;

/// Process exit status; `1` is reserved for errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Conclusive = 0,
    Rejected = 1,
    Inconclusive = 2,
}

/// Witnesses listed in a classification report.
const MAX_WITNESSES: usize = 32;

fn load(source: &Source) -> Result<(Group, Option<GalleryEntry>, String), Box<dyn StdError>> {
    match (&source.gallery, &source.input) {
        (Some(name), _) => {
            let entry = gallery::make(name)?;
            Ok((entry.group.clone(), Some(entry), name.clone()))
        }
        (None, Some(path)) => {
            let def: GroupDefinition = serde_json::from_str(&fs::read_to_string(path)?)?;
            Ok((def.build()?, None, path.display().to_string()))
        }
        (None, None) => Err("one of --gallery or --input is required".into()),
    }
}

fn emit<T: Serialize>(value: &T, out: &Output) -> Result<(), Box<dyn StdError>> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    write_text(&text, out)
}

fn write_text(text: &str, out: &Output) -> Result<(), Box<dyn StdError>> {
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn reject_csv(out: &Output, command: &str) -> Result<(), Box<dyn StdError>> {
    if out.csv {
        return Err(format!("{command} has no CSV output").into());
    }
    Ok(())
}

fn parse_words(group: &Group, list: &str) -> Result<Vec<(String, Word)>, Box<dyn StdError>> {
    let words: Vec<(String, Word)> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Ok((s.to_string(), group.parse_word(s)?)))
        .collect::<Result<_, Error>>()?;
    if words.is_empty() {
        return Err("empty subgroup basis".into());
    }
    Ok(words)
}

fn ball_for(group: &Group, args: &BallArgs) -> Ball {
    bfs_ball(group, args.radius, args.budget)
}

fn ball_json(ball: &Ball) -> Value {
    json!({
        "requested_radius": ball.requested_radius(),
        "completed_radius": ball.completed_radius(),
        "size": ball.len(),
        "complete": ball.is_complete(),
        "closed": ball.is_closed(),
    })
}

fn unipotence(v: VirtualUnipotence) -> String {
    match v {
        VirtualUnipotence::Power(k) => format!("power {k} is unipotent"),
        VirtualUnipotence::NoneUpTo(k) => format!("no unipotent power up to {k}"),
        VirtualUnipotence::Never => "never unipotent".into(),
    }
}

fn audit_matches(expected: ExpectedAudit, verdict: AuditVerdict, orders: &[OrderReport]) -> bool {
    match expected {
        ExpectedAudit::Violation => verdict == AuditVerdict::ViolationWitnessed,
        ExpectedAudit::NoUnipotents => verdict == AuditVerdict::VacuouslyConsistent,
        ExpectedAudit::OrderP(p) => {
            verdict == AuditVerdict::NoViolationInBall && orders.iter().all(|o| *o == OrderReport::Finite(p))
        }
    }
}

fn classification(group: &Group, entry: Option<&GalleryEntry>, ball: &Ball, order_bound: u64) -> Result<(Value, Status), Box<dyn StdError>> {
    let audit = audit_unipotents(group, ball, order_bound);
    let generators = group
        .labels()
        .iter()
        .zip(group.generators())
        .map(|(l, g)| Ok(json!({ "label": l, "virtually_unipotent": unipotence(g.virtually_unipotent(order_bound)?) })))
        .collect::<Result<Vec<Value>, Error>>()?;
    let orders: Vec<OrderReport> = audit.witnesses.iter().map(|w| w.order).collect();
    let matches = entry.map(|e| audit_matches(e.expected.audit, audit.verdict, &orders));
    let scope = if audit.verdict == AuditVerdict::ViolationWitnessed {
        "witnessed: an exact unipotent element of infinite order".to_string()
    } else if let Some(reason) = &audit.structural_reason {
        format!("whole group: {reason}")
    } else {
        format!("ball only: no violation within radius {}", ball.completed_radius())
    };
    let status = if audit.is_conclusive() && matches != Some(false) { Status::Conclusive } else { Status::Inconclusive };
    let report = json!({
        "verdict": audit.verdict,
        "conclusive": audit.is_conclusive(),
        "structural_reason": audit.structural_reason,
        "witness_count": audit.witnesses.len(),
        "witnesses": audit.witnesses.iter().take(MAX_WITNESSES).collect::<Vec<_>>(),
        "generators": generators,
        "order_bound": order_bound,
        "expected": entry.map(|e| &e.expected),
        "matches_expected": matches,
        "ball": ball_json(ball),
        "scope": scope,
    });
    Ok((report, status))
}

pub fn classify(source: &Source, ball_args: &BallArgs, order_bound: u64, out: &Output) -> CmdResult {
    reject_csv(out, "classify")?;
    let (group, entry, name) = load(source)?;
    let ball = ball_for(&group, ball_args);
    let (mut report, status) = classification(&group, entry.as_ref(), &ball, order_bound)?;
    report["command"] = json!("classify");
    report["group"] = json!(name);
    report["field"] = json!(group.descriptor().to_string());
    emit(&report, out)?;
    Ok(status)
}

pub fn distortion(source: &Source, ball_args: &BallArgs, subgroup: &str, range: u64, out: &Output) -> CmdResult {
    let (group, entry, name) = load(source)?;
    let words = parse_words(&group, subgroup)?;
    let basis: Vec<(String, Matrix)> =
        words.iter().map(|(s, w)| Ok((s.clone(), group.evaluate_word(w)?))).collect::<Result<_, Error>>()?;
    let labels: Vec<&str> = words.iter().map(|(s, _)| s.as_str()).collect();
    let identities = match &entry {
        Some(e) => gallery::profile_identities(e, &labels, range)?,
        None => Vec::new(),
    };
    let ball = ball_for(&group, ball_args);
    let profile = distortion_profile(&group, &basis, range, &ball, &identities)?;
    let max_ratio = profile.max_ratio().map(|(r, row)| json!({ "ratio": r, "exponents": row.exponents }));
    let scope = format!(
        "exact lengths inside the radius-{} ball; beyond it only verified identity-word upper bounds",
        ball.completed_radius()
    );
    if out.json {
        emit(
            &json!({
                "command": "distortion",
                "group": name,
                "profile": profile,
                "max_ratio": max_ratio,
                "ball": ball_json(&ball),
                "scope": scope,
            }),
            out,
        )?;
    } else {
        write_text(&profile.to_csv()?, out)?;
        if let Some(m) = max_ratio {
            eprintln!("max ||n||_1 / l_S observed: {} at {}; {scope}", m["ratio"], m["exponents"]);
        }
    }
    Ok(Status::Conclusive)
}

pub fn certify(source: &Source, subgroup: &str, precision: u64, out: &Output) -> CmdResult {
    reject_csv(out, "certify")?;
    let (group, _, name) = load(source)?;
    let words: Vec<Word> = parse_words(&group, subgroup)?.into_iter().map(|(_, w)| w).collect();
    match certify_undistorted(&group, &words, precision) {
        Ok(cert) => {
            emit(&cert, out)?;
            Ok(Status::Conclusive)
        }
        Err(failure) => {
            emit(
                &json!({
                    "command": "certify",
                    "group": name,
                    "subgroup": subgroup,
                    "precision": precision,
                    "failure": failure,
                    "scope": "no certificate; failure to certify is not a proof of distortion",
                }),
                out,
            )?;
            Ok(Status::Inconclusive)
        }
    }
}

pub fn verify(
    path: &Path,
    gallery_name: Option<&str>,
    ball_args: &BallArgs,
    range: u64,
    pairs: usize,
    seed: u64,
    out: &Output,
) -> CmdResult {
    reject_csv(out, "verify")?;
    let cert: Certificate = serde_json::from_str(&fs::read_to_string(path)?)?;
    let group = cert.rebuild_group()?;
    if let Some(name) = gallery_name {
        if gallery::make(name)?.group.definition() != cert.group {
            return Err(format!("the certificate's group is not the gallery entry {name}").into());
        }
    }
    let ball = ball_for(&group, ball_args);
    let report = verify_certificate(&cert, &ball, &VerifyOptions { range, pairs, seed })?;
    let status = match (report.valid, report.conclusive) {
        (false, _) => Status::Rejected,
        (true, true) => Status::Conclusive,
        (true, false) => Status::Inconclusive,
    };
    let scope = match status {
        Status::Conclusive => format!("every check holds on the complete radius-{} ball", ball.completed_radius()),
        Status::Rejected => "a check is violated: the certificate is invalid".to_string(),
        Status::Inconclusive => "no violation found, but some checks were undecided or the ball is truncated".to_string(),
    };
    emit(&json!({ "command": "verify", "report": report, "scope": scope }), out)?;
    Ok(status)
}

pub fn split(
    source: &Source,
    ball_args: &BallArgs,
    central: &str,
    range: u64,
    precision: u64,
    order_bound: u64,
    out: &Output,
) -> CmdResult {
    reject_csv(out, "split")?;
    let (group, _, name) = load(source)?;
    let mats: Vec<Matrix> = parse_words(&group, central)?
        .iter()
        .map(|(_, w)| group.evaluate_word(w))
        .collect::<Result<_, Error>>()?;
    let theta = build_theta(group.generators(), &mats)?;
    let kernel = kernel_audit(&theta, &mats, range, order_bound)?;
    let ball = ball_for(&group, ball_args);
    let mut report = json!({
        "command": "split",
        "group": name,
        "central": central,
        "precision": precision,
        "theta": theta.summary(),
        "kernel_audit": kernel,
        "ball": ball_json(&ball),
    });
    let status = match splitting_audit(&group, &mats, &ball, range, precision) {
        Ok(w) => {
            let status = if w.complete && ball.is_complete() { Status::Conclusive } else { Status::Inconclusive };
            report["verdict"] = json!(if w.complete { "split-witnessed" } else { "inconclusive" });
            report["scope"] = json!(w.scope);
            report["witness"] = serde_json::to_value(&w)?;
            status
        }
        Err(Error::InjectivityFailure(reason)) => {
            let exact = kernel.verdict == KernelVerdict::NotNiu;
            report["verdict"] = json!("injectivity-failure");
            report["reason"] = json!(reason);
            report["scope"] = json!(if exact {
                "witnessed: an infinite-order element of A has trivial theta"
            } else {
                "theta could not be certified injective on A"
            });
            if exact {
                Status::Conclusive
            } else {
                Status::Inconclusive
            }
        }
        Err(Error::FactorizationFailure(counterexample)) => {
            report["verdict"] = json!("factorization-failure");
            report["counterexample"] = json!(counterexample);
            report["scope"] = json!("witnessed: a ball element with no valid factorization");
            Status::Rejected
        }
        Err(e) => return Err(e.into()),
    };
    emit(&report, out)?;
    Ok(status)
}

pub fn gallery_list(out: &Output) -> CmdResult {
    let entries: Vec<Value> = gallery::all()
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "description": e.description,
                "field": e.group.descriptor().to_string(),
                "generators": e.group.labels(),
                "expected": e.expected,
                "identities": e.identities.iter().map(|f| f.statement()).collect::<Vec<_>>(),
            })
        })
        .collect();
    if out.json {
        emit(&json!({ "command": "gallery list", "names": gallery::NAMES, "entries": entries }), out)?;
    } else {
        let text: String = gallery::all().iter().map(|e| format!("{:<16} {}\n", e.name, e.description)).collect();
        write_text(&text, out)?;
    }
    Ok(Status::Conclusive)
}

pub fn gallery_run(name: &str, ball_args: &BallArgs, range: u64, order_bound: u64, out: &Output) -> CmdResult {
    reject_csv(out, "gallery run")?;
    let entry = gallery::make(name)?;
    let identities = gallery::verify_identities(&entry, range)?;
    let ball = ball_for(&entry.group, ball_args);
    let (mut report, status) = classification(&entry.group, Some(&entry), &ball, order_bound)?;
    report["command"] = json!("gallery run");
    report["group"] = json!(name);
    report["identities"] = serde_json::to_value(identities)?;
    emit(&report, out)?;
    Ok(status)
}

pub fn gallery_export(name: &str, out: &Output) -> CmdResult {
    reject_csv(out, "gallery export")?;
    emit(&gallery::make(name)?.group.definition(), out)?;
    Ok(Status::Conclusive)
}
