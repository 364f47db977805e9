//! Typed program to flat rule table.

use std::collections::BTreeSet;
use std::fmt::Write;

use rust_decimal::prelude::ToPrimitive;

use crate::ast::{
    print_expr, Action, AggFunc, ArithOp, Binder, BinderKind, CmpOp, Expr, ExprKind, SetExpr,
    UnitType,
};
use crate::sema::{Ty, TypedProgram};
use crate::sensors::SensorSource;

use super::{ClauseRef, ConfigError, MonitorConfig};

/// Name-free guard code. Comprehension variables are resolved to positions
/// on the evaluator's bin stack.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Code {
    Num(f64),
    Bool(bool),
    /// Distance of the detection under test.
    Distance,
    /// Pixel count of the bin bound at this comprehension depth.
    BinPixels(usize),
    Cardinality(SetCode),
    Max(SetCode),
    Min(SetCode),
    Arith(ArithOp, Box<Code>, Box<Code>),
    Compare(CmpOp, Box<Code>, Box<Code>),
    CompareBool(CmpOp, Box<Code>, Box<Code>),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SetCode {
    pub(crate) source: SetSource,
    pub(crate) filter: Option<Box<Code>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SetSource {
    Bins,
    AliveLasers,
}

/// What a clause ranges over.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryScope {
    Exists {
        source: SensorSource,
        class_label: String,
    },
    Hist {
        bins: usize,
    },
    Lasers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleEntry {
    clause: ClauseRef,
    binder_kind: BinderKind,
    scope: EntryScope,
    pub(crate) guard: Code,
    guard_text: String,
    actions: Vec<Action>,
    cap_value: f64,
}

impl RuleEntry {
    pub fn clause(&self) -> ClauseRef {
        self.clause
    }

    pub fn binder_kind(&self) -> BinderKind {
        self.binder_kind
    }

    pub fn scope(&self) -> &EntryScope {
        &self.scope
    }

    /// Canonical text of the guard.
    pub fn guard_text(&self) -> &str {
        &self.guard_text
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    /// Speed in m/s applied if this clause's `cap_speed` fires.
    pub fn cap_value(&self) -> f64 {
        self.cap_value
    }
}

/// One entry per clause in source order; immutable once lowered.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    entries: Vec<RuleEntry>,
    nominal_speed: f64,
    required_sensors: BTreeSet<SensorSource>,
}

impl RuleTable {
    pub fn entries(&self) -> &[RuleEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nominal_speed(&self) -> f64 {
        self.nominal_speed
    }

    pub fn required_sensors(&self) -> &BTreeSet<SensorSource> {
        &self.required_sensors
    }

    pub fn entry(&self, at: ClauseRef) -> Option<&RuleEntry> {
        self.entries.iter().find(|e| e.clause == at)
    }

    /// `g<g>.c<c> [<binder-kind>] guard=<expr> actions=[..] cap=<m/s>`, one
    /// line per entry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let actions: Vec<String> = e.actions.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(
                out,
                "g{}.c{} [{}] guard={} actions=[{}] cap={}",
                e.clause.group,
                e.clause.clause,
                e.binder_kind,
                e.guard_text,
                actions.join(", "),
                e.cap_value
            );
        }
        out
    }
}

fn check_speed(what: &str, value: f64, nominal: f64) -> Result<(), ConfigError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(ConfigError::Invalid(format!(
            "{what} must be a positive speed, found {value}"
        )));
    }
    if value > nominal {
        return Err(ConfigError::Invalid(format!(
            "{what} {value} exceeds nominal speed {nominal}"
        )));
    }
    Ok(())
}

pub fn lower(typed: &TypedProgram, config: &MonitorConfig) -> Result<RuleTable, ConfigError> {
    let nominal = config.nominal_speed;
    if !(nominal.is_finite() && nominal > 0.0) {
        return Err(ConfigError::Invalid(format!(
            "nominal speed must be positive, found {nominal}"
        )));
    }
    check_speed("default cap", config.default_cap, nominal)?;

    let program = typed.program();
    for (&at, &value) in &config.caps {
        let exists = program
            .groups
            .get(at.group)
            .is_some_and(|g| at.clause < g.clauses.len());
        if !exists {
            return Err(ConfigError::Invalid(format!(
                "cap for clause {at} refers to no clause"
            )));
        }
        check_speed(&format!("cap for clause {at}"), value, nominal)?;
    }

    let mut entries = Vec::with_capacity(program.clause_count());
    for (g, group) in program.groups.iter().enumerate() {
        let scope = match &group.binder {
            Binder::Exists { class_label, .. } => EntryScope::Exists {
                source: typed.group_source(g),
                class_label: class_label.name.clone(),
            },
            Binder::Hist { bins, .. } => EntryScope::Hist {
                bins: usize::from(*bins),
            },
            Binder::Lasers { .. } => EntryScope::Lasers,
        };
        for (c, clause) in group.clauses.iter().enumerate() {
            let at = ClauseRef::new(g, c);
            let mut lowering = Lowering {
                typed,
                scopes: Vec::new(),
            };
            entries.push(RuleEntry {
                clause: at,
                binder_kind: group.binder.kind(),
                scope: scope.clone(),
                guard: lowering.expr(&clause.guard),
                guard_text: print_expr(&clause.guard),
                actions: clause.actions.clone(),
                cap_value: config.cap_for(at),
            });
        }
    }

    Ok(RuleTable {
        entries,
        nominal_speed: nominal,
        required_sensors: typed.sensor_requirements().clone(),
    })
}

struct Lowering<'a> {
    typed: &'a TypedProgram,
    scopes: Vec<&'a str>,
}

impl<'a> Lowering<'a> {
    fn expr(&mut self, expr: &'a Expr) -> Code {
        match &expr.kind {
            ExprKind::Literal(lit) => Code::Num(lit.value.to_f64().unwrap_or(f64::NAN)),
            ExprKind::Bool(b) => Code::Bool(*b),
            ExprKind::Compare { op, lhs, rhs } => {
                let (l, r) = (Box::new(self.expr(lhs)), Box::new(self.expr(rhs)));
                if self.typed.type_of(lhs) == Ty::Unit(UnitType::Boolean) {
                    Code::CompareBool(*op, l, r)
                } else {
                    Code::Compare(*op, l, r)
                }
            }
            ExprKind::Arith { op, lhs, rhs } => {
                Code::Arith(*op, Box::new(self.expr(lhs)), Box::new(self.expr(rhs)))
            }
            ExprKind::Distance(_) => Code::Distance,
            ExprKind::Var(var) => Code::BinPixels(self.depth_of(var.as_str())),
            ExprKind::Aggregate { func, arg } => {
                let set = match arg.as_ref() {
                    SetExpr::Plain(inner) => match self.typed.type_of(inner) {
                        // size(x) of a single bin
                        Ty::Bin => return self.expr(inner),
                        Ty::Bins => SetCode {
                            source: SetSource::Bins,
                            filter: None,
                        },
                        Ty::Lasers => SetCode {
                            source: SetSource::AliveLasers,
                            filter: None,
                        },
                        other => unreachable!("aggregate over {other} passed typecheck"),
                    },
                    SetExpr::Comprehension { var, filter, .. } => {
                        self.scopes.push(var.as_str());
                        let filter = filter.as_ref().map(|f| Box::new(self.expr(f)));
                        self.scopes.pop();
                        SetCode {
                            source: SetSource::Bins,
                            filter,
                        }
                    }
                };
                match func {
                    AggFunc::Size | AggFunc::Count => Code::Cardinality(set),
                    AggFunc::Max => Code::Max(set),
                    AggFunc::Min => Code::Min(set),
                }
            }
            ExprKind::Field { .. } => {
                unreachable!("field access outside an aggregate passed typecheck")
            }
        }
    }

    fn depth_of(&self, name: &str) -> usize {
        self.scopes
            .iter()
            .rposition(|s| *s == name)
            .expect("bin variable resolved by typecheck")
    }
}
