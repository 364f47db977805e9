//! Syntax tree of a safety program.
//!
//! A [`Program`] is an ordered list of [`RuleGroup`]s. Each group opens with a
//! [`Binder`] that names a sensor-derived value and is followed by one or more
//! guarded [`Clause`]s:
//!
//! ```text
//! exists p in camera.all(pedestrian):
//!     distance(p) < 1m { sound emergency; stop; }
//! ```
//!
//! All nodes are plain immutable data once built. Every [`Expr`] carries a
//! [`NodeId`] assigned in pre-order by [`Program::renumber`]; the type checker
//! keys its unit assignments on these ids.

mod pretty;

use std::fmt;

pub use rust_decimal::Decimal;

pub use crate::diagnostic::SourceSpan;
pub use pretty::{pretty_print, print_expr};

/// An identifier together with where it appeared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: SourceSpan::default(),
        }
    }

    pub fn spanned(name: impl Into<String>, span: SourceSpan) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub source_name: String,
    pub groups: Vec<RuleGroup>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleGroup {
    pub binder: Binder,
    pub clauses: Vec<Clause>,
    pub span: SourceSpan,
}

/// Header of a rule group.
#[derive(Debug, Clone, PartialEq)]
pub enum Binder {
    /// `exists p in camera.all(pedestrian)`
    Exists {
        var: Ident,
        sensor: Ident,
        class_label: Ident,
    },
    /// `hist h = histogram(camera.image, bins = 10, normalized = true)`
    Hist {
        var: Ident,
        source: SourcePath,
        bins: u16,
        normalized: bool,
    },
    /// `lasers a in lasers(alive)`
    Lasers { var: Ident, selector: Ident },
}

impl Binder {
    pub fn var(&self) -> &Ident {
        match self {
            Binder::Exists { var, .. } | Binder::Hist { var, .. } | Binder::Lasers { var, .. } => {
                var
            }
        }
    }

    pub fn kind(&self) -> BinderKind {
        match self {
            Binder::Exists { .. } => BinderKind::Exists,
            Binder::Hist { .. } => BinderKind::Hist,
            Binder::Lasers { .. } => BinderKind::Lasers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinderKind {
    Exists,
    Hist,
    Lasers,
}

impl fmt::Display for BinderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinderKind::Exists => "exists",
            BinderKind::Hist => "hist",
            BinderKind::Lasers => "lasers",
        })
    }
}

/// A dotted `base.field` reference such as `camera.image`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePath {
    pub base: Ident,
    pub field: Ident,
}

impl fmt::Display for SourcePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.base, self.field)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub guard: Expr,
    pub actions: Vec<Action>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Stop,
    CapSpeed,
    Sound(Ident),
}

impl Action {
    /// Equality on what the action does, ignoring source positions.
    pub fn same_effect(&self, other: &Action) -> bool {
        match (self, other) {
            (Action::Stop, Action::Stop) | (Action::CapSpeed, Action::CapSpeed) => true,
            (Action::Sound(a), Action::Sound(b)) => a.name == b.name,
            _ => false,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Stop => f.write_str("stop"),
            Action::CapSpeed => f.write_str("cap_speed"),
            Action::Sound(label) => write!(f, "sound {label}"),
        }
    }
}

/// Identifies one expression node within a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Literal(Literal),
    Bool(bool),
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Arith {
        op: ArithOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Distance(Ident),
    Aggregate {
        func: AggFunc,
        arg: Box<SetExpr>,
    },
    Var(Ident),
    Field {
        base: Box<Expr>,
        field: Ident,
    },
}

/// A numeric literal. Unsuffixed literals take their unit from the use site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub value: Decimal,
    pub suffix: Option<UnitSuffix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitSuffix {
    Meters,
    Pixels,
}

impl UnitSuffix {
    pub fn text(self) -> &'static str {
        match self {
            UnitSuffix::Meters => "m",
            UnitSuffix::Pixels => "px",
        }
    }

    pub fn unit(self) -> UnitType {
        match self {
            UnitSuffix::Meters => UnitType::Meters,
            UnitSuffix::Pixels => UnitType::Pixels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    /// The operator obtained by swapping the operands: `a < b` is `b > a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ne => CmpOp::Ne,
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn apply<T: PartialOrd>(self, lhs: T, rhs: T) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub fn apply(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            ArithOp::Add => lhs + rhs,
            ArithOp::Sub => lhs - rhs,
            ArithOp::Mul => lhs * rhs,
            ArithOp::Div => lhs / rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFunc {
    Size,
    Count,
    Max,
    Min,
}

impl AggFunc {
    pub fn name(self) -> &'static str {
        match self {
            AggFunc::Size => "size",
            AggFunc::Count => "count",
            AggFunc::Max => "max",
            AggFunc::Min => "min",
        }
    }

    pub fn from_name(name: &str) -> Option<AggFunc> {
        Some(match name {
            "size" => AggFunc::Size,
            "count" => AggFunc::Count,
            "max" => AggFunc::Max,
            "min" => AggFunc::Min,
            _ => return None,
        })
    }
}

/// Argument of an aggregate: either a plain expression or a filtered comprehension.
#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    Plain(Expr),
    Comprehension {
        var: Ident,
        domain: Expr,
        filter: Option<Expr>,
    },
}

/// Semantic unit of a scalar quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitType {
    Meters,
    Pixels,
    Count,
    Fraction,
    Boolean,
}

impl fmt::Display for UnitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitType::Meters => "meters",
            UnitType::Pixels => "pixels",
            UnitType::Count => "count",
            UnitType::Fraction => "fraction",
            UnitType::Boolean => "boolean",
        })
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            id: NodeId::default(),
            kind,
            span: SourceSpan::default(),
        }
    }

    pub fn literal(value: Decimal, suffix: Option<UnitSuffix>) -> Self {
        Expr::new(ExprKind::Literal(Literal { value, suffix }))
    }

    pub fn compare(op: CmpOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::Compare {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    pub fn arith(op: ArithOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::Arith {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    pub fn aggregate(func: AggFunc, arg: SetExpr) -> Self {
        Expr::new(ExprKind::Aggregate {
            func,
            arg: Box::new(arg),
        })
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(Ident::new(name)))
    }

    pub fn field(base: Expr, field: &str) -> Self {
        Expr::new(ExprKind::Field {
            base: Box::new(base),
            field: Ident::new(field),
        })
    }

    /// Visits this node and all descendants in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Literal(_) | ExprKind::Bool(_) | ExprKind::Distance(_) | ExprKind::Var(_) => {
            }
            ExprKind::Compare { lhs, rhs, .. } | ExprKind::Arith { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Aggregate { arg, .. } => match arg.as_ref() {
                SetExpr::Plain(e) => e.walk(f),
                SetExpr::Comprehension { domain, filter, .. } => {
                    domain.walk(f);
                    if let Some(filter) = filter {
                        filter.walk(f);
                    }
                }
            },
            ExprKind::Field { base, .. } => base.walk(f),
        }
    }

    fn walk_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        f(self);
        match &mut self.kind {
            ExprKind::Literal(_) | ExprKind::Bool(_) | ExprKind::Distance(_) | ExprKind::Var(_) => {
            }
            ExprKind::Compare { lhs, rhs, .. } | ExprKind::Arith { lhs, rhs, .. } => {
                lhs.walk_mut(f);
                rhs.walk_mut(f);
            }
            ExprKind::Aggregate { arg, .. } => match arg.as_mut() {
                SetExpr::Plain(e) => e.walk_mut(f),
                SetExpr::Comprehension { domain, filter, .. } => {
                    domain.walk_mut(f);
                    if let Some(filter) = filter {
                        filter.walk_mut(f);
                    }
                }
            },
            ExprKind::Field { base, .. } => base.walk_mut(f),
        }
    }

    /// Structural equality ignoring node ids and source spans.
    pub fn same_shape(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Literal(a), ExprKind::Literal(b)) => a == b,
            (ExprKind::Bool(a), ExprKind::Bool(b)) => a == b,
            (
                ExprKind::Compare { op, lhs, rhs },
                ExprKind::Compare {
                    op: op2,
                    lhs: lhs2,
                    rhs: rhs2,
                },
            ) => op == op2 && lhs.same_shape(lhs2) && rhs.same_shape(rhs2),
            (
                ExprKind::Arith { op, lhs, rhs },
                ExprKind::Arith {
                    op: op2,
                    lhs: lhs2,
                    rhs: rhs2,
                },
            ) => op == op2 && lhs.same_shape(lhs2) && rhs.same_shape(rhs2),
            (ExprKind::Distance(a), ExprKind::Distance(b)) => a.name == b.name,
            (ExprKind::Var(a), ExprKind::Var(b)) => a.name == b.name,
            (
                ExprKind::Field { base, field },
                ExprKind::Field {
                    base: base2,
                    field: field2,
                },
            ) => field.name == field2.name && base.same_shape(base2),
            (
                ExprKind::Aggregate { func, arg },
                ExprKind::Aggregate {
                    func: func2,
                    arg: arg2,
                },
            ) => {
                func == func2
                    && match (arg.as_ref(), arg2.as_ref()) {
                        (SetExpr::Plain(a), SetExpr::Plain(b)) => a.same_shape(b),
                        (
                            SetExpr::Comprehension {
                                var,
                                domain,
                                filter,
                            },
                            SetExpr::Comprehension {
                                var: var2,
                                domain: domain2,
                                filter: filter2,
                            },
                        ) => {
                            var.name == var2.name
                                && domain.same_shape(domain2)
                                && match (filter, filter2) {
                                    (Some(a), Some(b)) => a.same_shape(b),
                                    (None, None) => true,
                                    _ => false,
                                }
                        }
                        _ => false,
                    }
            }
            _ => false,
        }
    }
}

impl Program {
    pub fn new(source_name: impl Into<String>, groups: Vec<RuleGroup>) -> Self {
        let mut program = Program {
            source_name: source_name.into(),
            groups,
        };
        program.renumber();
        program
    }

    /// Assigns node ids to every expression in pre-order, starting at zero.
    pub fn renumber(&mut self) {
        let mut next = 0u32;
        for group in &mut self.groups {
            for clause in &mut group.clauses {
                clause.guard.walk_mut(&mut |e| {
                    e.id = NodeId(next);
                    next += 1;
                });
            }
        }
    }

    /// Copy with every source span reset, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut program = self.clone();
        for group in &mut program.groups {
            group.span = SourceSpan::default();
            match &mut group.binder {
                Binder::Exists {
                    var,
                    sensor,
                    class_label,
                } => {
                    var.span = SourceSpan::default();
                    sensor.span = SourceSpan::default();
                    class_label.span = SourceSpan::default();
                }
                Binder::Hist { var, source, .. } => {
                    var.span = SourceSpan::default();
                    source.base.span = SourceSpan::default();
                    source.field.span = SourceSpan::default();
                }
                Binder::Lasers { var, selector } => {
                    var.span = SourceSpan::default();
                    selector.span = SourceSpan::default();
                }
            }
            for clause in &mut group.clauses {
                clause.span = SourceSpan::default();
                for action in &mut clause.actions {
                    if let Action::Sound(label) = action {
                        label.span = SourceSpan::default();
                    }
                }
                clause.guard.walk_mut(&mut |e| {
                    e.span = SourceSpan::default();
                    match &mut e.kind {
                        ExprKind::Distance(v) | ExprKind::Var(v) => v.span = SourceSpan::default(),
                        ExprKind::Field { field, .. } => field.span = SourceSpan::default(),
                        ExprKind::Aggregate { arg, .. } => {
                            if let SetExpr::Comprehension { var, .. } = arg.as_mut() {
                                var.span = SourceSpan::default();
                            }
                        }
                        _ => {}
                    }
                });
            }
        }
        program
    }

    pub fn clause_count(&self) -> usize {
        self.groups.iter().map(|g| g.clauses.len()).sum()
    }
}
