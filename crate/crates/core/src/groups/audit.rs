//! Unipotent audits of Cayley balls.

use rayon::prelude::*;
use serde::Serialize;

use crate::matrices::{SquareMatrix, UnipotentOrder};
use crate::poly::squarefree_part;
use crate::scalar::Field;

use super::{CayleyBall, MatrixGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "order", content = "value", rename_all = "kebab-case")]
pub enum OrderReport {
    Finite(u64),
    /// Exact: a unipotent element other than `I` in characteristic zero.
    Infinite,
    /// The order is a power of `p` exceeding the bound.
    AboveBound(u64),
}

#[derive(Clone, Debug, Serialize)]
pub struct UnipotentWitness<S: Field> {
    #[serde(skip)]
    pub matrix: SquareMatrix<S>,
    pub entries: String,
    pub word: String,
    pub length: u32,
    pub order: OrderReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditVerdict {
    /// A unipotent element of infinite order was found.
    ViolationWitnessed,
    /// Nontrivial unipotents were found, all of finite order.
    NoViolationInBall,
    /// The identity is the only unipotent element in the ball.
    VacuouslyConsistent,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnipotentAudit<S: Field> {
    pub radius: u32,
    pub ball_size: usize,
    pub ball_closed: bool,
    /// Nontrivial unipotent elements, in breadth-first order.
    pub witnesses: Vec<UnipotentWitness<S>>,
    pub verdict: AuditVerdict,
    /// A reason every unipotent of the whole group has finite order, when
    /// one is known independently of the ball.
    pub structural_reason: Option<String>,
}

impl<S: Field> UnipotentAudit<S> {
    /// True when the verdict holds for the whole group, not just the ball.
    pub fn is_conclusive(&self) -> bool {
        self.verdict == AuditVerdict::ViolationWitnessed || self.structural_reason.is_some()
    }

    pub fn infinite_order_witness(&self) -> Option<&UnipotentWitness<S>> {
        self.witnesses.iter().find(|w| w.order == OrderReport::Infinite)
    }
}

fn semisimple<S: Field>(m: &SquareMatrix<S>) -> bool {
    m.eval_poly(&squarefree_part(&m.char_poly())).is_zero()
}

fn structural_reason<S: Field>(group: &MatrixGroup<S>, ball: &CayleyBall<S>) -> Option<String> {
    let p = S::characteristic(group.ctx());
    if p > 0 {
        return Some(format!("characteristic {p}: every unipotent element has order a power of {p}"));
    }
    if ball.is_closed() {
        return Some(format!("the ball exhausts the group ({} elements)", ball.len()));
    }
    let gens = group.generators();
    let commuting = gens.iter().enumerate().all(|(i, g)| gens[i + 1..].iter().all(|h| g.commutes_with(h)));
    if commuting && gens.iter().all(semisimple) {
        return Some("commuting semisimple generators: every element is semisimple, so only I is unipotent".into());
    }
    None
}

/// Finds every unipotent element of the ball and its order. Orders in
/// characteristic `p` are computed exactly up to `order_bound`.
pub fn audit_unipotents<S: Field>(group: &MatrixGroup<S>, ball: &CayleyBall<S>, order_bound: u64) -> UnipotentAudit<S> {
    let hits: Vec<(usize, OrderReport)> = (0..ball.len())
        .into_par_iter()
        .filter_map(|i| {
            let (m, _) = ball.element(i).expect("in range");
            if m.is_identity() || !m.is_unipotent() {
                return None;
            }
            let order = match m.unipotent_order() {
                UnipotentOrder::Infinite => OrderReport::Infinite,
                UnipotentOrder::Finite(k) if k > order_bound => OrderReport::AboveBound(order_bound),
                UnipotentOrder::Finite(k) => OrderReport::Finite(k),
            };
            Some((i, order))
        })
        .collect();
    let witnesses: Vec<UnipotentWitness<S>> = hits
        .into_iter()
        .map(|(i, order)| {
            let (m, length) = ball.element(i).expect("in range");
            let word = ball.word(m).expect("ball element");
            UnipotentWitness { matrix: m.clone(), entries: m.to_string(), word: group.format_word(&word), length, order }
        })
        .collect();
    let verdict = if witnesses.iter().any(|w| w.order == OrderReport::Infinite) {
        AuditVerdict::ViolationWitnessed
    } else if witnesses.is_empty() {
        AuditVerdict::VacuouslyConsistent
    } else {
        AuditVerdict::NoViolationInBall
    };
    UnipotentAudit {
        radius: ball.completed_radius(),
        ball_size: ball.len(),
        ball_closed: ball.is_closed(),
        witnesses,
        verdict,
        structural_reason: structural_reason(group, ball),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDescriptor;
    use crate::groups::{bfs_ball, Group};
    use crate::Matrix;

    #[test]
    fn baumslag_solitar_violation() {
        let q = FieldDescriptor::Rationals;
        let g = Group::new(vec![
            ("a".into(), Matrix::from_ints(&q, &[&[1, 1], &[0, 1]])),
            ("t".into(), Matrix::from_ints(&q, &[&[2, 0], &[0, 1]])),
        ])
        .unwrap();
        let audit = audit_unipotents(&g, &bfs_ball(&g, 3, usize::MAX), 64);
        assert_eq!(audit.verdict, AuditVerdict::ViolationWitnessed);
        assert_eq!(audit.witnesses[0].word, "a");
        assert!(audit.is_conclusive());
    }

    #[test]
    fn diagonal_group_is_vacuous() {
        let q = FieldDescriptor::Rationals;
        let g = Group::new(vec![
            ("a".into(), Matrix::from_ints(&q, &[&[2]])),
            ("b".into(), Matrix::from_ints(&q, &[&[3]])),
        ])
        .unwrap();
        let audit = audit_unipotents(&g, &bfs_ball(&g, 4, usize::MAX), 64);
        assert_eq!(audit.verdict, AuditVerdict::VacuouslyConsistent);
        assert!(audit.is_conclusive());
    }

    #[test]
    fn lamplighter_orders() {
        let d: FieldDescriptor = "GF(2)(t)".parse().unwrap();
        let t = d.variable().unwrap();
        let one = crate::FieldElement::one_in(&d);
        let zero = crate::FieldElement::zero_in(&d);
        let g = Group::new(vec![
            ("t".into(), Matrix::from_rows(vec![vec![t, zero.clone()], vec![zero.clone(), one.clone()]]).unwrap()),
            ("a".into(), Matrix::from_rows(vec![vec![one.clone(), one.clone()], vec![zero, one]]).unwrap()),
        ])
        .unwrap();
        let audit = audit_unipotents(&g, &bfs_ball(&g, 3, usize::MAX), 64);
        assert_eq!(audit.verdict, AuditVerdict::NoViolationInBall);
        assert!(audit.witnesses.iter().all(|w| w.order == OrderReport::Finite(2)));
        assert!(audit.is_conclusive());
    }
}
