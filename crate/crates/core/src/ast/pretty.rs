//! Canonical text form of a program.
//!
//! One binder line per group followed by one clause per line, indented by four
//! spaces. Actions are `;`-separated with a trailing `;`. Parentheses are
//! emitted only where precedence requires them, so printing and re-parsing
//! yields the same tree.

use std::fmt::Write;

use super::{Binder, Clause, Expr, ExprKind, Program, SetExpr};

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for group in &program.groups {
        write_binder(&mut out, &group.binder);
        out.push_str(":\n");
        for clause in &group.clauses {
            write_clause(&mut out, clause);
        }
    }
    out
}

fn write_binder(out: &mut String, binder: &Binder) {
    match binder {
        Binder::Exists {
            var,
            sensor,
            class_label,
        } => {
            let _ = write!(out, "exists {var} in {sensor}.all({class_label})");
        }
        Binder::Hist {
            var,
            source,
            bins,
            normalized,
        } => {
            let _ = write!(
                out,
                "hist {var} = histogram({source}, bins = {bins}, normalized = {normalized})"
            );
        }
        Binder::Lasers { var, selector } => {
            let _ = write!(out, "lasers {var} in lasers({selector})");
        }
    }
}

fn write_clause(out: &mut String, clause: &Clause) {
    out.push_str("    ");
    write_expr(out, &clause.guard);
    out.push_str(" {");
    for action in &clause.actions {
        let _ = write!(out, " {action};");
    }
    out.push_str(" }\n");
}

/// Canonical text of a single expression.
pub fn print_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn precedence(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Compare { .. } => 1,
        ExprKind::Arith { op, .. } => match op {
            super::ArithOp::Add | super::ArithOp::Sub => 2,
            super::ArithOp::Mul | super::ArithOp::Div => 3,
        },
        _ => 4,
    }
}

fn write_operand(out: &mut String, expr: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}

fn write_expr(out: &mut String, expr: &Expr) {
    match &expr.kind {
        ExprKind::Literal(lit) => {
            let _ = write!(out, "{}", lit.value.normalize());
            if let Some(suffix) = lit.suffix {
                out.push_str(suffix.text());
            }
        }
        ExprKind::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Compare { op, lhs, rhs } => {
            // comparisons are non-associative: both operands bind tighter
            write_operand(out, lhs, precedence(lhs) <= 1);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(out, rhs, precedence(rhs) <= 1);
        }
        ExprKind::Arith { op, lhs, rhs } => {
            let p = precedence(expr);
            write_operand(out, lhs, precedence(lhs) < p);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(out, rhs, precedence(rhs) <= p);
        }
        ExprKind::Distance(var) => {
            let _ = write!(out, "distance({var})");
        }
        ExprKind::Aggregate { func, arg } => {
            out.push_str(func.name());
            out.push('(');
            match arg.as_ref() {
                SetExpr::Plain(e) => write_expr(out, e),
                SetExpr::Comprehension {
                    var,
                    domain,
                    filter,
                } => {
                    let _ = write!(out, "{var} in ");
                    write_expr(out, domain);
                    if let Some(filter) = filter {
                        out.push_str(": ");
                        write_expr(out, filter);
                    }
                }
            }
            out.push(')');
        }
        ExprKind::Var(var) => out.push_str(&var.name),
        ExprKind::Field { base, field } => {
            write_operand(out, base, precedence(base) < 4);
            let _ = write!(out, ".{field}");
        }
    }
}
