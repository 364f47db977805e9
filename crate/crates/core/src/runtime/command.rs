use std::collections::HashSet;
use std::fmt;

use crate::ast::Action;
use crate::sensors::SensorSource;

/// Position of a clause: group index and clause index within the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseRef {
    pub group: usize,
    pub clause: usize,
}

impl ClauseRef {
    pub fn new(group: usize, clause: usize) -> Self {
        ClauseRef { group, clause }
    }
}

impl fmt::Display for ClauseRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.group, self.clause)
    }
}

/// A warning sound and the action that requested it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundCue {
    pub label: String,
    /// Firing clause and the action's index inside it.
    pub origin: (ClauseRef, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fault {
    SensorMissing(SensorSource),
    /// A precomputed histogram does not have the bin count a rule asks for.
    HistogramBins {
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::SensorMissing(source) => write!(f, "SENSOR_MISSING:{source}"),
            Fault::HistogramBins { expected, found } => {
                write!(f, "HISTOGRAM_BINS:{expected}/{found}")
            }
        }
    }
}

/// Merged monitor output for one tick.
///
/// Commands form a meet-semilattice under [`ActuationCommand::meet`]: a stop
/// is below every speed cap, a lower speed is below a higher one, and sounds,
/// fired clauses and faults accumulate.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuationCommand {
    pub stop: bool,
    pub speed: f64,
    /// Deduplicated by label, ordered by the first clause that requested each.
    pub sounds: Vec<SoundCue>,
    pub fired: Vec<ClauseRef>,
    pub faults: Vec<Fault>,
}

impl ActuationCommand {
    /// Unrestricted driving at `nominal_speed`; the identity of [`meet`](Self::meet)
    /// for commands capped at that speed.
    pub fn nominal(nominal_speed: f64) -> Self {
        ActuationCommand {
            stop: false,
            speed: nominal_speed,
            sounds: Vec::new(),
            fired: Vec::new(),
            faults: Vec::new(),
        }
    }

    pub fn fail_safe(mut faults: Vec<Fault>) -> Self {
        faults.sort();
        faults.dedup();
        ActuationCommand {
            stop: true,
            speed: 0.0,
            sounds: Vec::new(),
            fired: Vec::new(),
            faults,
        }
    }

    /// Contribution of one fired clause.
    pub fn from_clause(
        clause: ClauseRef,
        actions: &[Action],
        cap_value: f64,
        nominal_speed: f64,
    ) -> Self {
        let stop = actions.contains(&Action::Stop);
        let speed = if stop {
            0.0
        } else if actions.contains(&Action::CapSpeed) {
            cap_value.min(nominal_speed)
        } else {
            nominal_speed
        };
        let sounds = actions
            .iter()
            .enumerate()
            .filter_map(|(i, a)| match a {
                Action::Sound(label) => Some(SoundCue {
                    label: label.name.clone(),
                    origin: (clause, i),
                }),
                _ => None,
            })
            .collect();
        ActuationCommand {
            stop,
            speed,
            sounds: dedup_sounds(sounds),
            fired: vec![clause],
            faults: Vec::new(),
        }
    }

    /// Most-restrictive combination of two commands.
    pub fn meet(&self, other: &ActuationCommand) -> ActuationCommand {
        let stop = self.stop || other.stop;
        let speed = if stop {
            0.0
        } else {
            self.speed.min(other.speed)
        };

        let sounds = dedup_sounds(self.sounds.iter().chain(&other.sounds).cloned().collect());

        let mut fired: Vec<ClauseRef> = self.fired.iter().chain(&other.fired).copied().collect();
        fired.sort();
        fired.dedup();

        let mut faults: Vec<Fault> = self.faults.iter().chain(&other.faults).cloned().collect();
        faults.sort();
        faults.dedup();

        ActuationCommand {
            stop,
            speed,
            sounds,
            fired,
            faults,
        }
    }

    pub fn sound_labels(&self) -> Vec<&str> {
        self.sounds.iter().map(|s| s.label.as_str()).collect()
    }
}

fn dedup_sounds(mut sounds: Vec<SoundCue>) -> Vec<SoundCue> {
    sounds.sort_by(|a, b| a.origin.cmp(&b.origin).then_with(|| a.label.cmp(&b.label)));
    let mut seen = HashSet::new();
    sounds.retain(|s| seen.insert(s.label.clone()));
    sounds
}

/// Meets all contributions, starting from unrestricted driving.
pub fn merge<I>(nominal_speed: f64, contributions: I) -> ActuationCommand
where
    I: IntoIterator<Item = ActuationCommand>,
{
    contributions
        .into_iter()
        .fold(ActuationCommand::nominal(nominal_speed), |acc, c| {
            acc.meet(&c)
        })
}
