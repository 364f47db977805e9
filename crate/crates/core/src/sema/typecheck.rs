use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::{
    AggFunc, ArithOp, Binder, BinderKind, Expr, ExprKind, Ident, NodeId, Program, SetExpr, UnitType,
};
use crate::diagnostic::{DiagCode, Diagnostic};
use crate::sensors::SensorSource;

/// Static type of an expression node.
///
/// Scalar quantities carry a [`UnitType`]; the remaining variants describe the
/// sensor-derived values a binder or comprehension introduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ty {
    Unit(UnitType),
    /// One detection of an `exists` binder.
    Detection,
    /// The histogram named by a `hist` binder.
    Histogram,
    /// A (possibly filtered) set of histogram bins.
    Bins,
    /// One histogram bin, bound by a comprehension.
    Bin,
    /// The alive laser set of a `lasers` binder.
    Lasers,
}

impl Ty {
    pub fn unit(self) -> Option<UnitType> {
        match self {
            Ty::Unit(u) => Some(u),
            _ => None,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Unit(u) => write!(f, "{u}"),
            Ty::Detection => f.write_str("detection"),
            Ty::Histogram => f.write_str("histogram"),
            Ty::Bins => f.write_str("bin set"),
            Ty::Bin => f.write_str("histogram bin"),
            Ty::Lasers => f.write_str("laser set"),
        }
    }
}

/// A program that passed [`typecheck`], with a type for every expression node.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedProgram {
    program: Program,
    types: BTreeMap<NodeId, Ty>,
    group_sources: Vec<SensorSource>,
    sensor_requirements: BTreeSet<SensorSource>,
}

impl TypedProgram {
    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn types(&self) -> &BTreeMap<NodeId, Ty> {
        &self.types
    }

    pub fn type_of(&self, expr: &Expr) -> Ty {
        self.types[&expr.id]
    }

    /// Sensor stream each group reads, indexed by group.
    pub fn group_source(&self, group: usize) -> SensorSource {
        self.group_sources[group]
    }

    pub fn sensor_requirements(&self) -> &BTreeSet<SensorSource> {
        &self.sensor_requirements
    }

    pub fn into_program(self) -> Program {
        self.program
    }
}

/// Resolves names, assigns units and checks that every guard is boolean.
///
/// Errors from every group and clause are collected; within one guard only the
/// first error is reported.
pub fn typecheck(program: Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let mut types = BTreeMap::new();
    let mut group_sources = Vec::with_capacity(program.groups.len());

    for group in &program.groups {
        match binder_source(&group.binder) {
            Ok(source) => group_sources.push(source),
            Err(d) => {
                errors.push(d);
                // keep indices aligned; the program is rejected anyway
                group_sources.push(SensorSource::CameraDetections);
            }
        }
        for clause in &group.clauses {
            let mut checker = Checker {
                types: BTreeMap::new(),
                binder: &group.binder,
                scopes: Vec::new(),
            };
            match checker.guard(&clause.guard) {
                Ok(()) => types.append(&mut checker.types),
                Err(d) => errors.push(d),
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let sensor_requirements = group_sources.iter().copied().collect();
    Ok(TypedProgram {
        program,
        types,
        group_sources,
        sensor_requirements,
    })
}

fn binder_source(binder: &Binder) -> Result<SensorSource, Diagnostic> {
    match binder {
        Binder::Exists { sensor, .. } => match sensor.as_str() {
            "camera" => Ok(SensorSource::CameraDetections),
            "laser" | "lidar" => Ok(SensorSource::LidarObjects),
            other => Err(Diagnostic::new(
                DiagCode::Sensor,
                format!("unknown sensor `{other}` (expected `camera`, `laser`, or `lidar`)"),
                sensor.span,
            )),
        },
        Binder::Hist { source, .. } => {
            if source.base.as_str() == "camera" && source.field.as_str() == "image" {
                Ok(SensorSource::CameraImage)
            } else {
                Err(Diagnostic::new(
                    DiagCode::Sensor,
                    format!("unknown image source `{source}` (expected `camera.image`)"),
                    source.base.span.to(source.field.span),
                ))
            }
        }
        Binder::Lasers { selector, .. } => {
            if selector.as_str() == "alive" {
                Ok(SensorSource::LaserLiveness)
            } else {
                Err(Diagnostic::new(
                    DiagCode::Sensor,
                    format!(
                        "unknown laser selector `{}` (expected `alive`)",
                        selector.as_str()
                    ),
                    selector.span,
                ))
            }
        }
    }
}

/// Result of inference: a settled type, or an unsuffixed numeric subtree whose
/// unit is decided by its use site.
#[derive(Debug, Clone, Copy)]
enum Inferred {
    Known(Ty),
    Poly,
}

struct Checker<'a> {
    types: BTreeMap<NodeId, Ty>,
    binder: &'a Binder,
    scopes: Vec<&'a str>,
}

type CResult<T> = Result<T, Diagnostic>;

fn unit_error(expr: &Expr, message: String) -> Diagnostic {
    Diagnostic::new(DiagCode::Unit, message, expr.span)
}

/// Unit algebra for arithmetic on two settled units.
pub(crate) fn arith_unit(op: ArithOp, lhs: UnitType, rhs: UnitType) -> Option<UnitType> {
    use UnitType::*;
    if lhs == Boolean || rhs == Boolean || lhs != rhs {
        return None;
    }
    match op {
        ArithOp::Add | ArithOp::Sub => Some(lhs),
        ArithOp::Div => Some(Fraction),
        ArithOp::Mul if lhs == Fraction => Some(Fraction),
        ArithOp::Mul => None,
    }
}

impl<'a> Checker<'a> {
    fn record(&mut self, expr: &Expr, ty: Ty) -> Inferred {
        self.types.insert(expr.id, ty);
        Inferred::Known(ty)
    }

    fn guard(&mut self, guard: &'a Expr) -> CResult<()> {
        match self.infer(guard)? {
            Inferred::Known(Ty::Unit(UnitType::Boolean)) => Ok(()),
            Inferred::Known(ty) => Err(Diagnostic::new(
                DiagCode::Guard,
                format!("guard must be boolean, found {ty}"),
                guard.span,
            )),
            Inferred::Poly => {
                self.settle(guard, UnitType::Fraction)?;
                Err(Diagnostic::new(
                    DiagCode::Guard,
                    "guard must be boolean, found a plain number",
                    guard.span,
                ))
            }
        }
    }

    fn lookup(&self, ident: &Ident) -> CResult<Ty> {
        let name = ident.as_str();
        if self.scopes.contains(&name) {
            return Ok(Ty::Bin);
        }
        if self.binder.var().as_str() == name {
            return Ok(match self.binder.kind() {
                BinderKind::Exists => Ty::Detection,
                BinderKind::Hist => Ty::Histogram,
                BinderKind::Lasers => Ty::Lasers,
            });
        }
        Err(Diagnostic::new(
            DiagCode::Unresolved,
            format!("unknown variable `{name}`"),
            ident.span,
        ))
    }

    /// Infers a type that must not be an unsuffixed number.
    fn infer_known(&mut self, expr: &'a Expr, what: &str) -> CResult<Ty> {
        match self.infer(expr)? {
            Inferred::Known(ty) => Ok(ty),
            Inferred::Poly => Err(unit_error(
                expr,
                format!("expected {what}, found a plain number"),
            )),
        }
    }

    fn infer_unit(&mut self, expr: &'a Expr) -> CResult<Option<UnitType>> {
        match self.infer(expr)? {
            Inferred::Known(Ty::Unit(u)) => Ok(Some(u)),
            Inferred::Known(ty) => {
                Err(unit_error(expr, format!("expected a quantity, found {ty}")))
            }
            Inferred::Poly => Ok(None),
        }
    }

    fn infer(&mut self, expr: &'a Expr) -> CResult<Inferred> {
        match &expr.kind {
            ExprKind::Literal(lit) => Ok(match lit.suffix {
                Some(suffix) => self.record(expr, Ty::Unit(suffix.unit())),
                None => Inferred::Poly,
            }),
            ExprKind::Bool(_) => Ok(self.record(expr, Ty::Unit(UnitType::Boolean))),
            ExprKind::Compare { op, lhs, rhs } => {
                let l = self.infer_unit(lhs)?;
                let r = self.infer_unit(rhs)?;
                let unit = match (l, r) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(unit_error(expr, format!("cannot compare {a} with {b}")))
                    }
                    (Some(a), _) => {
                        self.settle_side(rhs, r, a)?;
                        a
                    }
                    (None, Some(b)) => {
                        self.settle(lhs, b)?;
                        b
                    }
                    (None, None) => {
                        self.settle(lhs, UnitType::Fraction)?;
                        self.settle(rhs, UnitType::Fraction)?;
                        UnitType::Fraction
                    }
                };
                if unit == UnitType::Boolean && op.is_ordering() {
                    return Err(unit_error(
                        expr,
                        format!("`{}` cannot order boolean values", op.symbol()),
                    ));
                }
                Ok(self.record(expr, Ty::Unit(UnitType::Boolean)))
            }
            ExprKind::Arith { op, lhs, rhs } => {
                let l = self.infer_unit(lhs)?;
                let r = self.infer_unit(rhs)?;
                let (a, b) = match (l, r) {
                    (None, None) => return Ok(Inferred::Poly),
                    (Some(a), Some(b)) => (a, b),
                    (Some(a), None) => {
                        if a == UnitType::Boolean {
                            return Err(unit_error(
                                expr,
                                format!("cannot apply `{}` to boolean", op.symbol()),
                            ));
                        }
                        self.settle(rhs, a)?;
                        (a, a)
                    }
                    (None, Some(b)) => {
                        if b == UnitType::Boolean {
                            return Err(unit_error(
                                expr,
                                format!("cannot apply `{}` to boolean", op.symbol()),
                            ));
                        }
                        self.settle(lhs, b)?;
                        (b, b)
                    }
                };
                match arith_unit(*op, a, b) {
                    Some(u) => Ok(self.record(expr, Ty::Unit(u))),
                    None => Err(unit_error(
                        expr,
                        format!("cannot apply `{}` to {a} and {b}", op.symbol()),
                    )),
                }
            }
            ExprKind::Distance(var) => match self.lookup(var)? {
                Ty::Detection => Ok(self.record(expr, Ty::Unit(UnitType::Meters))),
                other => Err(unit_error(
                    expr,
                    format!(
                        "distance() expects a detection, `{}` is a {other}",
                        var.as_str()
                    ),
                )),
            },
            ExprKind::Var(var) => {
                let ty = self.lookup(var)?;
                Ok(self.record(expr, ty))
            }
            ExprKind::Field { base, field } => {
                let base_ty = self.infer_known(base, "a histogram")?;
                if base_ty == Ty::Histogram && field.as_str() == "bins" {
                    Ok(self.record(expr, Ty::Bins))
                } else {
                    Err(Diagnostic::new(
                        DiagCode::Unresolved,
                        format!("{base_ty} has no field `{}`", field.as_str()),
                        field.span,
                    ))
                }
            }
            ExprKind::Aggregate { func, arg } => {
                let arg_ty = match arg.as_ref() {
                    SetExpr::Plain(e) => self.infer_known(e, "a set")?,
                    SetExpr::Comprehension {
                        var,
                        domain,
                        filter,
                    } => self.comprehension(var, domain, filter.as_ref())?,
                };
                let result = match (func, arg_ty) {
                    (AggFunc::Size | AggFunc::Count, Ty::Bins | Ty::Lasers) => UnitType::Count,
                    (AggFunc::Size, Ty::Bin) => UnitType::Pixels,
                    (AggFunc::Max | AggFunc::Min, Ty::Bins) => UnitType::Pixels,
                    (func, ty) => {
                        return Err(unit_error(
                            expr,
                            format!("{}() cannot be applied to a {ty}", func.name()),
                        ))
                    }
                };
                Ok(self.record(expr, Ty::Unit(result)))
            }
        }
    }

    fn comprehension(
        &mut self,
        var: &'a Ident,
        domain: &'a Expr,
        filter: Option<&'a Expr>,
    ) -> CResult<Ty> {
        let domain_ty = self.infer_known(domain, "a bin set")?;
        if domain_ty != Ty::Bins {
            return Err(unit_error(
                domain,
                format!("comprehension ranges over histogram bins, found {domain_ty}"),
            ));
        }
        let name = var.as_str();
        if self.binder.var().as_str() == name || self.scopes.contains(&name) {
            return Err(Diagnostic::new(
                DiagCode::Unresolved,
                format!("variable `{name}` is already bound"),
                var.span,
            ));
        }
        if let Some(filter) = filter {
            self.scopes.push(name);
            let result = self.infer(filter);
            self.scopes.pop();
            match result? {
                Inferred::Known(Ty::Unit(UnitType::Boolean)) => {}
                Inferred::Known(ty) => {
                    return Err(Diagnostic::new(
                        DiagCode::Guard,
                        format!("comprehension filter must be boolean, found {ty}"),
                        filter.span,
                    ))
                }
                Inferred::Poly => {
                    return Err(Diagnostic::new(
                        DiagCode::Guard,
                        "comprehension filter must be boolean, found a plain number",
                        filter.span,
                    ))
                }
            }
        }
        Ok(Ty::Bins)
    }

    fn settle_side(
        &mut self,
        expr: &'a Expr,
        inferred: Option<UnitType>,
        unit: UnitType,
    ) -> CResult<()> {
        match inferred {
            Some(_) => Ok(()),
            None => self.settle(expr, unit),
        }
    }

    /// Gives `unit` to an unsuffixed numeric subtree.
    fn settle(&mut self, expr: &'a Expr, unit: UnitType) -> CResult<()> {
        if unit == UnitType::Boolean {
            return Err(unit_error(
                expr,
                "cannot compare a number with a boolean".into(),
            ));
        }
        match &expr.kind {
            ExprKind::Literal(lit) if lit.suffix.is_none() => {}
            ExprKind::Arith { op, lhs, rhs } => {
                let operand = match op {
                    ArithOp::Add | ArithOp::Sub => unit,
                    ArithOp::Mul | ArithOp::Div if unit == UnitType::Fraction => UnitType::Fraction,
                    _ => {
                        return Err(unit_error(
                            expr,
                            format!(
                                "cannot give unit {unit} to `{}` of plain numbers",
                                op.symbol()
                            ),
                        ))
                    }
                };
                self.settle(lhs, operand)?;
                self.settle(rhs, operand)?;
            }
            _ => unreachable!("settle() reached a node with a known type"),
        }
        self.types.insert(expr.id, Ty::Unit(unit));
        Ok(())
    }
}
