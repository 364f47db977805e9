//! Brute-force reference semantics: walks the AST directly, with its own
//! histogram binning and its own merge.

use psafe::ast::{Action, AggFunc, ArithOp, Binder, CmpOp, Expr, ExprKind, Program, SetExpr};
use psafe::runtime::{ClauseRef, MonitorConfig};
use psafe::sensors::{CameraFrame, Detection, Image, SensorSnapshot};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stop: bool,
    pub speed: f64,
    pub sounds: Vec<String>,
    pub fired: Vec<(usize, usize)>,
    pub faults: Vec<String>,
}

/// Bin `i` holds the pixel values `v` with `i*256 <= v*bins < (i+1)*256`.
pub fn brute_histogram(image: &Image, bins: usize) -> Vec<u64> {
    (0..bins)
        .map(|i| {
            image
                .pixels()
                .iter()
                .filter(|&&v| {
                    let scaled = usize::from(v) * bins;
                    i * 256 <= scaled && scaled < (i + 1) * 256
                })
                .count() as u64
        })
        .collect()
}

#[derive(Debug, Clone)]
enum Val {
    Num(f64),
    Bool(bool),
    Bin(u64),
    Set(Vec<u64>),
}

struct Env<'a> {
    distance: f64,
    hist: &'a [u64],
    alive: u32,
    hist_var: &'a str,
    laser_var: &'a str,
    bins: Vec<(&'a str, u64)>,
}

fn compare(op: CmpOp, a: f64, b: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return true;
    }
    match op {
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

fn num(v: Val) -> f64 {
    match v {
        Val::Num(n) => n,
        other => panic!("expected number, found {other:?}"),
    }
}

fn eval<'a>(e: &'a Expr, env: &mut Env<'a>) -> Val {
    match &e.kind {
        ExprKind::Literal(lit) => Val::Num(lit.value.to_string().parse().unwrap()),
        ExprKind::Bool(b) => Val::Bool(*b),
        ExprKind::Compare { op, lhs, rhs } => {
            let (a, b) = (eval(lhs, env), eval(rhs, env));
            match (a, b) {
                (Val::Bool(x), Val::Bool(y)) => Val::Bool(match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    other => panic!("ordering {other:?} on booleans"),
                }),
                (a, b) => Val::Bool(compare(*op, num(a), num(b))),
            }
        }
        ExprKind::Arith { op, lhs, rhs } => {
            let (a, b) = (num(eval(lhs, env)), num(eval(rhs, env)));
            Val::Num(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
                ArithOp::Div => a / b,
            })
        }
        ExprKind::Distance(_) => Val::Num(env.distance),
        ExprKind::Var(v) => {
            let name = v.as_str();
            if let Some((_, c)) = env.bins.iter().rev().find(|(n, _)| *n == name) {
                Val::Bin(*c)
            } else if name == env.laser_var {
                Val::Set(vec![1; env.alive.count_ones() as usize])
            } else {
                panic!("unbound {name}")
            }
        }
        ExprKind::Field { base, field } => {
            assert!(matches!(&base.kind, ExprKind::Var(v) if v.as_str() == env.hist_var));
            assert_eq!(field.as_str(), "bins");
            Val::Set(env.hist.to_vec())
        }
        ExprKind::Aggregate { func, arg } => {
            let members = match arg.as_ref() {
                SetExpr::Plain(inner) => eval(inner, env),
                SetExpr::Comprehension {
                    var,
                    domain,
                    filter,
                } => {
                    let Val::Set(all) = eval(domain, env) else {
                        panic!("domain")
                    };
                    let mut kept = Vec::new();
                    for c in all {
                        let keep = match filter {
                            None => true,
                            Some(f) => {
                                env.bins.push((var.as_str(), c));
                                let r = eval(f, env);
                                env.bins.pop();
                                matches!(r, Val::Bool(true))
                            }
                        };
                        if keep {
                            kept.push(c);
                        }
                    }
                    Val::Set(kept)
                }
            };
            Val::Num(match (func, members) {
                (AggFunc::Size, Val::Bin(c)) => c as f64,
                (AggFunc::Size | AggFunc::Count, Val::Set(s)) => s.len() as f64,
                (AggFunc::Max, Val::Set(s)) => s.iter().copied().max().unwrap_or(0) as f64,
                (AggFunc::Min, Val::Set(s)) => s.iter().copied().min().unwrap_or(0) as f64,
                (f, v) => panic!("{f:?} over {v:?}"),
            })
        }
    }
}

fn truth<'a>(e: &'a Expr, env: &mut Env<'a>) -> bool {
    match eval(e, env) {
        Val::Bool(b) => b,
        other => panic!("guard evaluated to {other:?}"),
    }
}

const SENSOR_ORDER: [&str; 4] = [
    "camera_detections",
    "camera_image",
    "lidar_objects",
    "laser_liveness",
];

fn required(binder: &Binder) -> &'static str {
    match binder {
        Binder::Exists { sensor, .. } if sensor.as_str() == "camera" => "camera_detections",
        Binder::Exists { .. } => "lidar_objects",
        Binder::Hist { .. } => "camera_image",
        Binder::Lasers { .. } => "laser_liveness",
    }
}

fn present(snap: &SensorSnapshot, name: &str) -> bool {
    match name {
        "camera_detections" => snap.camera_detections().is_some(),
        "camera_image" => snap.camera_frame().is_some(),
        "lidar_objects" => snap.lidar_objects().is_some(),
        _ => snap.laser_alive_mask().is_some(),
    }
}

fn fail_safe(faults: Vec<String>) -> Outcome {
    Outcome {
        stop: true,
        speed: 0.0,
        sounds: vec![],
        fired: vec![],
        faults,
    }
}

pub fn run(program: &Program, config: &MonitorConfig, snap: &SensorSnapshot) -> Outcome {
    let missing: Vec<String> = SENSOR_ORDER
        .iter()
        .filter(|s| program.groups.iter().any(|g| required(&g.binder) == **s))
        .filter(|s| !present(snap, s))
        .map(|s| format!("SENSOR_MISSING:{s}"))
        .collect();
    if !missing.is_empty() {
        return fail_safe(missing);
    }

    let mut bad_bins: Vec<(usize, usize)> = Vec::new();
    let histogram_for = |bins: usize| -> Result<Vec<u64>, usize> {
        match snap.camera_frame().unwrap() {
            CameraFrame::Image(img) => Ok(brute_histogram(img, bins)),
            CameraFrame::Histogram(h) if h.bin_counts().len() == bins => {
                Ok(h.bin_counts().to_vec())
            }
            CameraFrame::Histogram(h) => Err(h.bin_counts().len()),
        }
    };
    for g in &program.groups {
        if let Binder::Hist { bins, .. } = &g.binder {
            if let Err(found) = histogram_for(usize::from(*bins)) {
                bad_bins.push((usize::from(*bins), found));
            }
        }
    }
    if !bad_bins.is_empty() {
        bad_bins.sort();
        bad_bins.dedup();
        return fail_safe(
            bad_bins
                .iter()
                .map(|(e, f)| format!("HISTOGRAM_BINS:{e}/{f}"))
                .collect(),
        );
    }

    let alive = snap.laser_alive_mask().unwrap_or(0);
    let mut fired = Vec::new();
    for (gi, g) in program.groups.iter().enumerate() {
        for (ci, clause) in g.clauses.iter().enumerate() {
            let holds = match &g.binder {
                Binder::Exists {
                    sensor,
                    class_label,
                    ..
                } => {
                    let ds: &[Detection] = if sensor.as_str() == "camera" {
                        snap.camera_detections().unwrap()
                    } else {
                        snap.lidar_objects().unwrap()
                    };
                    ds.iter()
                        .filter(|d| d.class_label == class_label.as_str())
                        .any(|d| {
                            let mut env = Env {
                                distance: d.distance,
                                hist: &[],
                                alive,
                                hist_var: "",
                                laser_var: "",
                                bins: vec![],
                            };
                            truth(&clause.guard, &mut env)
                        })
                }
                Binder::Hist { var, bins, .. } => {
                    let counts = histogram_for(usize::from(*bins)).unwrap();
                    let mut env = Env {
                        distance: f64::NAN,
                        hist: &counts,
                        alive,
                        hist_var: var.as_str(),
                        laser_var: "",
                        bins: vec![],
                    };
                    truth(&clause.guard, &mut env)
                }
                Binder::Lasers { var, .. } => {
                    let mut env = Env {
                        distance: f64::NAN,
                        hist: &[],
                        alive,
                        hist_var: "",
                        laser_var: var.as_str(),
                        bins: vec![],
                    };
                    truth(&clause.guard, &mut env)
                }
            };
            if holds {
                fired.push((gi, ci));
            }
        }
    }

    let mut stop = false;
    let mut speed = config.nominal_speed;
    let mut sounds: Vec<String> = Vec::new();
    for &(g, c) in &fired {
        for action in &program.groups[g].clauses[c].actions {
            match action {
                Action::Stop => stop = true,
                Action::CapSpeed => {
                    let cap = config
                        .caps
                        .get(&ClauseRef::new(g, c))
                        .copied()
                        .unwrap_or(config.default_cap);
                    speed = speed.min(cap);
                }
                Action::Sound(label) => {
                    if !sounds.iter().any(|s| s == label.as_str()) {
                        sounds.push(label.name.clone());
                    }
                }
            }
        }
    }
    if stop {
        speed = 0.0;
    }
    Outcome {
        stop,
        speed,
        sounds,
        fired,
        faults: vec![],
    }
}
