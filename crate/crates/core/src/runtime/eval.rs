use crate::sensors::{compute_histogram, CameraFrame, Histogram, SensorSnapshot};

use super::lower::{Code, EntryScope, SetCode, SetSource};
use super::{merge, ActuationCommand, Fault, RuleTable};

/// Evaluates every clause against one snapshot and merges the fired actions.
///
/// If a required sensor is absent (or a precomputed histogram has the wrong
/// bin count) no guard is evaluated and the result is a stop carrying the
/// faults. Otherwise all satisfied clauses fire and their actions combine
/// most-restrictive-wins.
///
/// Cost is linear in entries times detections plus bins; there is no I/O, no
/// locking, and no failure path.
pub fn evaluate(table: &RuleTable, snapshot: &SensorSnapshot) -> ActuationCommand {
    let mut faults: Vec<Fault> = table
        .required_sensors()
        .iter()
        .filter(|s| !snapshot.has(**s))
        .map(|s| Fault::SensorMissing(*s))
        .collect();

    // one histogram per distinct bin count
    let mut histograms: Vec<(usize, Histogram)> = Vec::new();
    if faults.is_empty() {
        for entry in table.entries() {
            let EntryScope::Hist { bins } = *entry.scope() else {
                continue;
            };
            if histograms.iter().any(|(b, _)| *b == bins) {
                continue;
            }
            match snapshot.camera_frame() {
                Some(CameraFrame::Image(image)) => match compute_histogram(image, bins) {
                    Ok(h) => histograms.push((bins, h)),
                    Err(_) => faults.push(Fault::HistogramBins {
                        expected: bins,
                        found: 0,
                    }),
                },
                Some(CameraFrame::Histogram(h)) if h.bins() == bins => {
                    histograms.push((bins, h.clone()))
                }
                Some(CameraFrame::Histogram(h)) => faults.push(Fault::HistogramBins {
                    expected: bins,
                    found: h.bins(),
                }),
                None => unreachable!("camera frame presence checked above"),
            }
        }
    }
    if !faults.is_empty() {
        return ActuationCommand::fail_safe(faults);
    }

    let alive = snapshot.laser_alive_mask().unwrap_or(0);
    let mut ctx = Context {
        distance: f64::NAN,
        histogram: None,
        alive,
        stack: Vec::new(),
    };
    let nominal = table.nominal_speed();
    let contributions = table.entries().iter().filter_map(|entry| {
        let fired = match entry.scope() {
            EntryScope::Exists {
                source,
                class_label,
            } => snapshot
                .detections(*source)
                .unwrap_or_default()
                .iter()
                .filter(|d| d.class_label == *class_label)
                .any(|d| {
                    ctx.distance = d.distance;
                    ctx.truth(&entry.guard)
                }),
            EntryScope::Hist { bins } => {
                ctx.histogram = histograms
                    .iter()
                    .find(|(b, _)| b == bins)
                    .map(|(_, h)| h.bin_counts().to_vec());
                ctx.truth(&entry.guard)
            }
            EntryScope::Lasers => ctx.truth(&entry.guard),
        };
        fired.then(|| {
            ActuationCommand::from_clause(
                entry.clause(),
                entry.actions(),
                entry.cap_value(),
                nominal,
            )
        })
    });
    merge(nominal, contributions)
}

struct Context {
    distance: f64,
    histogram: Option<Vec<u64>>,
    alive: u32,
    stack: Vec<u64>,
}

impl Context {
    /// A comparison with an undefined operand (NaN, e.g. `0 / 0`) holds, so an
    /// unknowable quantity never suppresses an action.
    fn truth(&mut self, code: &Code) -> bool {
        match code {
            Code::Bool(b) => *b,
            Code::Compare(op, lhs, rhs) => {
                let (a, b) = (self.number(lhs), self.number(rhs));
                if a.is_nan() || b.is_nan() {
                    true
                } else {
                    op.apply(a, b)
                }
            }
            Code::CompareBool(op, lhs, rhs) => {
                let (a, b) = (self.truth(lhs), self.truth(rhs));
                op.apply(a, b)
            }
            other => unreachable!("numeric code {other:?} in boolean position"),
        }
    }

    fn number(&mut self, code: &Code) -> f64 {
        match code {
            Code::Num(v) => *v,
            Code::Distance => self.distance,
            Code::BinPixels(depth) => self.stack[*depth] as f64,
            Code::Cardinality(set) => self.fold_set(set, 0u64, |n, _| n + 1) as f64,
            Code::Max(set) => self
                .fold_set(set, None, |m: Option<u64>, c| {
                    Some(m.map_or(c, |m| m.max(c)))
                })
                .unwrap_or(0) as f64,
            Code::Min(set) => self
                .fold_set(set, None, |m: Option<u64>, c| {
                    Some(m.map_or(c, |m| m.min(c)))
                })
                .unwrap_or(0) as f64,
            Code::Arith(op, lhs, rhs) => {
                let a = self.number(lhs);
                let b = self.number(rhs);
                op.apply(a, b)
            }
            other => unreachable!("boolean code {other:?} in numeric position"),
        }
    }

    /// Folds the pixel counts of the set's members that pass its filter.
    fn fold_set<T>(&mut self, set: &SetCode, init: T, mut step: impl FnMut(T, u64) -> T) -> T {
        match set.source {
            SetSource::AliveLasers => {
                let mut acc = init;
                for _ in 0..self.alive.count_ones() {
                    acc = step(acc, 1);
                }
                acc
            }
            SetSource::Bins => {
                let counts = self.histogram.clone().unwrap_or_default();
                let mut acc = init;
                for c in counts {
                    let keep = match &set.filter {
                        None => true,
                        Some(filter) => {
                            self.stack.push(c);
                            let keep = self.truth(filter);
                            self.stack.pop();
                            keep
                        }
                    };
                    if keep {
                        acc = step(acc, c);
                    }
                }
                acc
            }
        }
    }
}
