//! Advisory checks over clause guards.
//!
//! * `W-SUBSUME`: two guards in one group bound the same quantity from the
//!   same side, so one implies the other.
//! * `W-UNREACHABLE`: a guard can never hold (e.g. `distance(o) < 0m`).
//! * `W-CONST`: a guard always holds.
//!
//! Only single comparisons between a quantity and a literal are analyzed.
//! Lint never changes the program or its evaluation.

use rust_decimal::Decimal;

use crate::ast::{ArithOp, CmpOp, Expr, ExprKind, Literal};
use crate::diagnostic::{DiagCode, Diagnostic};

use super::TypedProgram;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LintReport {
    pub warnings: Vec<Diagnostic>,
}

impl LintReport {
    pub fn is_empty(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.warnings.len()
    }

    pub fn count(&self, code: DiagCode) -> usize {
        self.warnings.iter().filter(|w| w.code == code).count()
    }
}

/// `subject <op> bound`, with the literal always on the right.
struct Bound<'a> {
    subject: &'a Expr,
    op: CmpOp,
    value: Decimal,
}

fn as_bound(guard: &Expr) -> Option<Bound<'_>> {
    let ExprKind::Compare { op, lhs, rhs } = &guard.kind else {
        return None;
    };
    match (&lhs.kind, &rhs.kind) {
        (ExprKind::Literal(_), ExprKind::Literal(_)) => None,
        (_, ExprKind::Literal(Literal { value, .. })) => Some(Bound {
            subject: lhs,
            op: *op,
            value: *value,
        }),
        (ExprKind::Literal(Literal { value, .. }), _) => Some(Bound {
            subject: rhs,
            op: op.flipped(),
            value: *value,
        }),
        _ => None,
    }
}

/// Whether `subject op1 c1` implies `subject op2 c2` for every real subject.
fn implies(op1: CmpOp, c1: Decimal, op2: CmpOp, c2: Decimal) -> bool {
    use CmpOp::*;
    match (op1, op2) {
        (Lt, Lt) | (Lt, Le) | (Le, Le) => c1 <= c2,
        (Le, Lt) => c1 < c2,
        (Gt, Gt) | (Gt, Ge) | (Ge, Ge) => c1 >= c2,
        (Ge, Gt) => c1 > c2,
        (Eq, Lt) => c1 < c2,
        (Eq, Le) => c1 <= c2,
        (Eq, Gt) => c1 > c2,
        (Eq, Ge) => c1 >= c2,
        (Eq, Eq) => c1 == c2,
        (Eq, Ne) => c1 != c2,
        (Ne, Ne) => c1 == c2,
        _ => false,
    }
}

/// Quantities that are nonnegative on every valid snapshot.
fn nonnegative(expr: &Expr) -> bool {
    match &expr.kind {
        ExprKind::Distance(_) | ExprKind::Aggregate { .. } => true,
        ExprKind::Literal(lit) => !lit.value.is_sign_negative(),
        ExprKind::Arith { op, lhs, rhs } => {
            !matches!(op, ArithOp::Sub) && nonnegative(lhs) && nonnegative(rhs)
        }
        _ => false,
    }
}

/// Folds a literal-only expression; `None` if it references sensor data or
/// divides by zero.
fn fold(expr: &Expr) -> Option<Folded> {
    match &expr.kind {
        ExprKind::Literal(lit) => Some(Folded::Num(lit.value)),
        ExprKind::Bool(b) => Some(Folded::Bool(*b)),
        ExprKind::Arith { op, lhs, rhs } => {
            let (Folded::Num(a), Folded::Num(b)) = (fold(lhs)?, fold(rhs)?) else {
                return None;
            };
            let v = match op {
                ArithOp::Add => a.checked_add(b),
                ArithOp::Sub => a.checked_sub(b),
                ArithOp::Mul => a.checked_mul(b),
                ArithOp::Div => a.checked_div(b),
            }?;
            Some(Folded::Num(v))
        }
        ExprKind::Compare { op, lhs, rhs } => match (fold(lhs)?, fold(rhs)?) {
            (Folded::Num(a), Folded::Num(b)) => Some(Folded::Bool(op.apply(a, b))),
            (Folded::Bool(a), Folded::Bool(b)) => Some(Folded::Bool(op.apply(a, b))),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, Copy)]
enum Folded {
    Num(Decimal),
    Bool(bool),
}

/// Truth value of a guard when it can be decided statically.
fn static_truth(guard: &Expr) -> Option<bool> {
    if let Some(Folded::Bool(b)) = fold(guard) {
        return Some(b);
    }
    let bound = as_bound(guard)?;
    if !nonnegative(bound.subject) {
        return None;
    }
    let zero = Decimal::ZERO;
    let c = bound.value;
    match bound.op {
        CmpOp::Lt if c <= zero => Some(false),
        CmpOp::Le | CmpOp::Eq if c < zero => Some(false),
        CmpOp::Ge if c <= zero => Some(true),
        CmpOp::Gt | CmpOp::Ne if c < zero => Some(true),
        _ => None,
    }
}

pub fn lint(typed: &TypedProgram) -> LintReport {
    let mut warnings = Vec::new();
    for (g, group) in typed.program().groups.iter().enumerate() {
        for (i, clause) in group.clauses.iter().enumerate() {
            match static_truth(&clause.guard) {
                Some(false) => warnings.push(Diagnostic::new(
                    DiagCode::Unreachable,
                    format!("guard of clause g{g}.c{i} can never hold"),
                    clause.guard.span,
                )),
                Some(true) => warnings.push(Diagnostic::new(
                    DiagCode::Const,
                    format!("guard of clause g{g}.c{i} always holds"),
                    clause.guard.span,
                )),
                None => {}
            }
        }

        let bounds: Vec<_> = group.clauses.iter().map(|c| as_bound(&c.guard)).collect();
        for i in 0..bounds.len() {
            for j in i + 1..bounds.len() {
                let (Some(a), Some(b)) = (&bounds[i], &bounds[j]) else {
                    continue;
                };
                if !a.subject.same_shape(b.subject) {
                    continue;
                }
                let forward = implies(a.op, a.value, b.op, b.value);
                let backward = implies(b.op, b.value, a.op, a.value);
                let message = match (forward, backward) {
                    (true, true) => {
                        format!("guards of clauses g{g}.c{i} and g{g}.c{j} are equivalent")
                    }
                    (true, false) => {
                        format!("guard of clause g{g}.c{i} implies guard of clause g{g}.c{j}")
                    }
                    (false, true) => {
                        format!("guard of clause g{g}.c{j} implies guard of clause g{g}.c{i}")
                    }
                    (false, false) => continue,
                };
                warnings.push(Diagnostic::new(
                    DiagCode::Subsume,
                    message,
                    group.clauses[j].guard.span,
                ));
            }
        }
    }
    warnings.sort_by_key(|w| w.span.offset);
    LintReport { warnings }
}
