//! Built-in example groups with their expected classification and exact
//! identity checks.

use serde::Serialize;

use crate::arith::{is_prime, totient};
use crate::error::{Error, Result};
use crate::fields::rational::cyclotomic;
use crate::fields::{FieldDescriptor, FieldElement};
use crate::groups::{Group, Word};
use crate::scalar::Field;
use crate::Matrix;

/// What the unipotent audit should find.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedAudit {
    /// A unipotent element of infinite order.
    Violation,
    /// Unipotent elements exist and all have order `p`.
    OrderP(u64),
    /// The identity is the only unipotent element.
    NoUnipotents,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expected {
    pub niu: bool,
    pub vuf: bool,
    pub audit: ExpectedAudit,
    /// Subgroup bases (comma-separated words) known to be distorted.
    pub distorted: Vec<String>,
    /// Subgroup bases known to be undistorted.
    pub undistorted: Vec<String>,
}

/// A parameterised family of exact matrix identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityFamily {
    /// `t^k a t^-k = a^(2^k)`.
    DoublingConjugation,
    /// `z^(n^2) = x^-n y^-n x^n y^n`.
    SquareCommutator,
    /// `t^n a t^-n = a^s(2n+1) b^s(2n)` with `s_1 = s_2 = 1`.
    FibonacciConjugation,
    /// `t a t^-1 = a^2 b` and `t b t^-1 = a b`.
    SolAction,
    /// `a` commutes with `t^k a t^-k`.
    CommutingConjugates,
    /// `a^p = 1`.
    TorsionLamp(u64),
    /// `r^n = 1` and no smaller positive power of `r` is `1`.
    RotationOrder(u64),
    /// `s` commutes with its conjugates `r^k s r^-k`.
    CrystalTranslations,
}

impl IdentityFamily {
    pub fn statement(&self) -> String {
        match self {
            IdentityFamily::DoublingConjugation => "t^k a t^-k = a^(2^k)".into(),
            IdentityFamily::SquareCommutator => "z^(n^2) = x^-n y^-n x^n y^n".into(),
            IdentityFamily::FibonacciConjugation => "t^n a t^-n = a^s(2n+1) b^s(2n), s_1 = s_2 = 1".into(),
            IdentityFamily::SolAction => "t a t^-1 = a^2 b, t b t^-1 = a b".into(),
            IdentityFamily::CommutingConjugates => "a t^k a t^-k = t^k a t^-k a".into(),
            IdentityFamily::TorsionLamp(p) => format!("a^{p} = 1"),
            IdentityFamily::RotationOrder(n) => format!("r has order exactly {n}"),
            IdentityFamily::CrystalTranslations => "s commutes with r^k s r^-k".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: String,
    pub description: String,
    pub group: Group,
    pub expected: Expected,
    pub identities: Vec<IdentityFamily>,
}

/// Names accepted by [`make`]; `<p>` and `<n>` are parameters.
pub const NAMES: &[&str] =
    &["hall_wreath", "lamplighter:<p>", "bs12", "heisenberg", "sol_fib", "diag_23", "rot_order:<n>", "z2_block", "euclid_p4"];

/// Largest `n` accepted by `rot_order:<n>`.
const MAX_ROTATION_ORDER: u64 = 60;

fn ints(desc: &FieldDescriptor, rows: &[&[i64]]) -> Matrix {
    Matrix::from_ints(desc, rows)
}

fn expected(niu: bool, vuf: bool, audit: ExpectedAudit, distorted: &[&str], undistorted: &[&str]) -> Expected {
    let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
    Expected { niu, vuf, audit, distorted: own(distorted), undistorted: own(undistorted) }
}

fn wreath(desc: &FieldDescriptor) -> Result<Group> {
    let t = desc.variable().ok_or_else(|| Error::InvalidParameter(format!("{desc} has no variable")))?;
    let (zero, one) = (FieldElement::zero_in(desc), FieldElement::one_in(desc));
    Group::new(vec![
        ("a".into(), ints(desc, &[&[1, 1], &[0, 1]])),
        ("t".into(), Matrix::from_rows(vec![vec![t, zero.clone()], vec![zero, one]])?),
    ])
}

fn parse_param(name: &str, param: Option<&str>) -> Result<u64> {
    param
        .ok_or_else(|| Error::InvalidParameter(format!("{name} needs a parameter, e.g. {name}:3")))?
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad parameter for {name}")))
}

/// Companion matrix of the `n`-th cyclotomic polynomial, of order exactly `n`.
fn rotation(n: u64) -> Matrix {
    let phi = cyclotomic(n);
    let d = totient(n) as usize;
    let q = FieldDescriptor::Rationals;
    Matrix::from_fn(d, &q, |i, j| {
        if j == d - 1 {
            FieldElement::Rational(-phi.coeff(i))
        } else if i == j + 1 {
            FieldElement::one_in(&q)
        } else {
            FieldElement::zero_in(&q)
        }
    })
}

/// Builds a gallery entry such as `bs12` or `lamplighter:3`.
pub fn make(spec: &str) -> Result<GalleryEntry> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let q = FieldDescriptor::Rationals;
    let entry = |description: &str, group: Group, expected: Expected, identities: Vec<IdentityFamily>| GalleryEntry {
        name: spec.to_string(),
        description: description.to_string(),
        group,
        expected,
        identities,
    };
    use ExpectedAudit::*;
    use IdentityFamily::*;
    match (name, param) {
        ("hall_wreath", None) => Ok(entry(
            "Z wr Z in GL(2, Q(t)): diag(t, 1) and a unipotent shear",
            wreath(&"Q(t)".parse()?)?,
            expected(false, false, Violation, &[], &["t"]),
            vec![CommutingConjugates],
        )),
        ("lamplighter", p) => {
            let p = parse_param(name, p)?;
            if !is_prime(p) {
                return Err(Error::InvalidParameter(format!("lamplighter needs a prime, got {p}")));
            }
            Ok(entry(
                &format!("C_{p} wr Z in GL(2, GF({p})(t))"),
                wreath(&FieldDescriptor::function_field(crate::fields::BaseDescriptor::Prime(p), "t")?)?,
                expected(true, false, OrderP(p), &[], &["t"]),
                vec![TorsionLamp(p), CommutingConjugates],
            ))
        }
        ("bs12", None) => Ok(entry(
            "BS(1,2) = <a, t | t a t^-1 = a^2> in GL(2, Q)",
            Group::new(vec![
                ("a".into(), ints(&q, &[&[1, 1], &[0, 1]])),
                ("t".into(), ints(&q, &[&[2, 0], &[0, 1]])),
            ])?,
            expected(false, false, Violation, &["a"], &["t"]),
            vec![DoublingConjugation],
        )),
        ("heisenberg", None) => Ok(entry(
            "integral Heisenberg group in GL(3, Q)",
            Group::new(vec![
                ("x".into(), ints(&q, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]])),
                ("y".into(), ints(&q, &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])),
                ("z".into(), ints(&q, &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]])),
            ])?,
            expected(false, false, Violation, &["z"], &["x"]),
            vec![SquareCommutator],
        )),
        ("sol_fib", None) => {
            let d = FieldDescriptor::real_quadratic(5)?;
            let m = |rows: [[&str; 2]; 2]| {
                Matrix::parse(&d, rows.map(|r| r.map(String::from).to_vec()).as_ref())
            };
            Ok(entry(
                "Z^2 x| Z with the golden gluing in GL(2, Q(sqrt(5)))",
                Group::new(vec![
                    ("a".into(), m([["1", "1"], ["0", "1"]])?),
                    ("b".into(), m([["1", "(-1 + sqrt(5))/2"], ["0", "1"]])?),
                    ("t".into(), m([["(3 + sqrt(5))/2", "0"], ["0", "1"]])?),
                ])?,
                expected(false, false, Violation, &["a,b"], &["t", "a"]),
                vec![SolAction, FibonacciConjugation],
            ))
        }
        ("diag_23", None) => Ok(entry(
            "<2, 3> in GL(1, Q)",
            Group::new(vec![("a".into(), ints(&q, &[&[2]])), ("b".into(), ints(&q, &[&[3]]))])?,
            expected(true, true, NoUnipotents, &[], &["a,b", "a", "b"]),
            vec![],
        )),
        ("rot_order", n) => {
            let n = parse_param(name, n)?;
            if n == 0 || n > MAX_ROTATION_ORDER {
                return Err(Error::InvalidParameter(format!("rot_order needs 1 <= n <= {MAX_ROTATION_ORDER}")));
            }
            Ok(entry(
                &format!("cyclic group of order {n} generated by a companion matrix"),
                Group::new(vec![("r".into(), rotation(n))])?,
                expected(true, true, NoUnipotents, &[], &[]),
                vec![RotationOrder(n)],
            ))
        }
        ("z2_block", None) => {
            let one = Group::new(vec![("a".into(), ints(&q, &[&[2]]))])?;
            let two = Group::new(vec![("b".into(), ints(&q, &[&[3]]))])?;
            Ok(entry(
                "Z x Z as the block-diagonal product of <2> and <3>",
                one.direct_product(&two)?,
                expected(true, true, NoUnipotents, &[], &["a", "b", "a,b"]),
                vec![],
            ))
        }
        ("euclid_p4", None) => Ok(entry(
            "wallpaper group p4 as affine maps in GL(3, Q)",
            Group::new(vec![
                ("r".into(), ints(&q, &[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]])),
                ("s".into(), ints(&q, &[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]])),
            ])?,
            expected(false, false, Violation, &[], &["s"]),
            vec![CrystalTranslations],
        )),
        _ => Err(Error::UnknownGallery(spec.to_string())),
    }
}

/// One entry per family, with default parameters.
pub fn all() -> Vec<GalleryEntry> {
    ["hall_wreath", "lamplighter:2", "lamplighter:3", "bs12", "heisenberg", "sol_fib", "diag_23", "rot_order:6", "z2_block", "euclid_p4"]
        .iter()
        .map(|n| make(n).expect("built-in entries are valid"))
        .collect()
}

/// Fibonacci numbers with `s_0 = 0`, `s_1 = s_2 = 1`.
pub fn fibonacci(n: u64) -> i64 {
    let (mut a, mut b) = (0i64, 1i64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn word(group: &Group, text: &str) -> Result<Word> {
    group.parse_word(text)
}

/// The subgroup element `a_1^n_1 ... a_m^n_m` of a basis given by labels.
fn basis_power(group: &Group, labels: &[&str], exps: &[i64]) -> Result<Matrix> {
    let mut acc = group.identity();
    for (l, &n) in labels.iter().zip(exps) {
        acc = acc.mul(&group.generator(l)?.pow_signed(n).ok_or(Error::NotInvertible)?);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub family: String,
    pub parameter: u64,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub entry: String,
    pub range: u64,
    pub families: Vec<String>,
    pub checked: usize,
}

fn check(group: &Group, family: IdentityFamily, k: u64, lhs: &Word, rhs: &Matrix) -> Result<IdentityCheck> {
    if group.evaluate_word(lhs)? != *rhs {
        return Err(Error::IdentityFailure(format!("{} fails at parameter {k}: {}", family.statement(), group.format_word(lhs))));
    }
    Ok(IdentityCheck { family: family.statement(), parameter: k, word: group.format_word(lhs) })
}

/// Checks one family for the parameter `k`.
pub fn check_identity(group: &Group, family: IdentityFamily, k: u64) -> Result<IdentityCheck> {
    let ki = k as i64;
    let id = group.identity();
    match family {
        IdentityFamily::DoublingConjugation => {
            let rhs = basis_power(group, &["a"], &[1i64 << k])?;
            check(group, family, k, &word(group, &format!("t^{ki} a t^-{ki}"))?, &rhs)
        }
        IdentityFamily::SquareCommutator => {
            let rhs = basis_power(group, &["z"], &[ki * ki])?;
            check(group, family, k, &word(group, &format!("x^-{ki} y^-{ki} x^{ki} y^{ki}"))?, &rhs)
        }
        IdentityFamily::FibonacciConjugation => {
            let rhs = basis_power(group, &["a", "b"], &[fibonacci(2 * k + 1), fibonacci(2 * k)])?;
            check(group, family, k, &word(group, &format!("t^{ki} a t^-{ki}"))?, &rhs)
        }
        IdentityFamily::SolAction => {
            check(group, family, 1, &word(group, "t a t^-1")?, &basis_power(group, &["a", "b"], &[2, 1])?)?;
            check(group, family, 1, &word(group, "t b t^-1")?, &basis_power(group, &["a", "b"], &[1, 1])?)
        }
        IdentityFamily::CommutingConjugates => {
            check(group, family, k, &word(group, &format!("a t^{ki} a t^-{ki} a^-1 t^{ki} a^-1 t^-{ki}"))?, &id)
        }
        IdentityFamily::TorsionLamp(p) => check(group, family, p, &word(group, &format!("a^{p}"))?, &id),
        IdentityFamily::RotationOrder(n) => {
            let r = group.generator("r")?;
            if (1..n).any(|j| r.pow(j).is_identity()) {
                return Err(Error::IdentityFailure(format!("r has order smaller than {n}")));
            }
            check(group, family, n, &word(group, &format!("r^{n}"))?, &id)
        }
        IdentityFamily::CrystalTranslations => {
            check(group, family, k, &word(group, &format!("s r^{ki} s r^-{ki} s^-1 r^{ki} s^-1 r^-{ki}"))?, &id)
        }
    }
}

/// Checks every identity family of the entry for parameters `1..=range`
/// (`SolAction`, `TorsionLamp` and `RotationOrder` have a single case).
/// Any failure is a hard error.
pub fn verify_identities(entry: &GalleryEntry, range: u64) -> Result<IdentityReport> {
    if range < 1 {
        return Err(Error::InvalidParameter("identity range must be at least 1".into()));
    }
    let mut checked = 0;
    for &family in &entry.identities {
        let params: Vec<u64> = match family {
            IdentityFamily::SolAction | IdentityFamily::TorsionLamp(_) | IdentityFamily::RotationOrder(_) => vec![1],
            IdentityFamily::DoublingConjugation => (1..=range.min(62)).collect(),
            _ => (1..=range).collect(),
        };
        for k in params {
            check_identity(&entry.group, family, k)?;
            checked += 1;
        }
    }
    Ok(IdentityReport {
        entry: entry.name.clone(),
        range,
        families: entry.identities.iter().map(IdentityFamily::statement).collect(),
        checked,
    })
}

/// Identity words giving upper bounds on word lengths in a subgroup, as
/// `(exponent vector, word)` pairs for the distortion profile of `basis`.
pub fn profile_identities(entry: &GalleryEntry, basis: &[&str], range: u64) -> Result<Vec<(Vec<i64>, Word)>> {
    let g = &entry.group;
    let mut out = Vec::new();
    for &family in &entry.identities {
        match (family, basis) {
            (IdentityFamily::DoublingConjugation, ["a"]) => {
                for k in 1..=range.min(62) {
                    out.push((vec![1i64 << k], word(g, &format!("t^{k} a t^-{k}"))?));
                }
            }
            (IdentityFamily::SquareCommutator, ["z"]) => {
                for n in 1..=range as i64 {
                    out.push((vec![n * n], word(g, &format!("x^-{n} y^-{n} x^{n} y^{n}"))?));
                }
            }
            (IdentityFamily::FibonacciConjugation, ["a", "b"]) => {
                for n in 1..=range {
                    out.push((vec![fibonacci(2 * n + 1), fibonacci(2 * n)], word(g, &format!("t^{n} a t^-{n}"))?));
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_convention() {
        assert_eq!((fibonacci(1), fibonacci(2), fibonacci(6), fibonacci(7)), (1, 1, 8, 13));
    }

    #[test]
    fn printed_matrices() {
        let bs = make("bs12").unwrap();
        let q = FieldDescriptor::Rationals;
        assert_eq!(bs.group.generator("t").unwrap(), &ints(&q, &[&[2, 0], &[0, 1]]));
        let sol = make("sol_fib").unwrap();
        let d = FieldDescriptor::real_quadratic(5).unwrap();
        let phi = d.parse_element("(1 + sqrt(5))/2").unwrap();
        let one = FieldElement::one_in(&d);
        assert_eq!(sol.group.generator("b").unwrap().get(0, 1), &phi.sub(&one));
        assert_eq!(sol.group.generator("t").unwrap().get(0, 0), &phi.add(&one));
    }

    #[test]
    fn identities_small_range() {
        for e in all() {
            verify_identities(&e, 5).unwrap();
        }
        let sol = make("sol_fib").unwrap();
        let c = check_identity(&sol.group, IdentityFamily::FibonacciConjugation, 3).unwrap();
        assert_eq!(c.word, "t^3 a t^-3");
    }

    #[test]
    fn rotations_have_exact_order() {
        for n in [1, 2, 3, 4, 5, 6, 8, 12] {
            let e = make(&format!("rot_order:{n}")).unwrap();
            verify_identities(&e, 1).unwrap();
        }
        assert!(make("rot_order:0").is_err());
        assert!(make("lamplighter:4").is_err());
        assert!(matches!(make("nope"), Err(Error::UnknownGallery(_))));
    }
}
