//! Random well-typed programs (as source text) and sensor snapshots.

use proptest::prelude::*;
use proptest::sample::{select, subsequence};
use proptest::strategy::BoxedStrategy;

use psafe::sensors::{Image, SensorSnapshot};

pub const LABELS: [&str; 3] = ["pedestrian", "Objects", "cyclist"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ctx {
    Exists,
    Hist,
    Lasers,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum U {
    Meters,
    Pixels,
    Count,
    Fraction,
}

fn number(max_tenths: u32) -> BoxedStrategy<String> {
    prop_oneof![
        (0..=max_tenths / 10).prop_map(|n| n.to_string()),
        (0..=max_tenths).prop_map(|n| format!("{}.{}", n / 10, n % 10)),
    ]
    .boxed()
}

fn literal(unit: U) -> BoxedStrategy<String> {
    match unit {
        U::Meters => (number(80), any::<bool>())
            .prop_map(|(n, suffixed)| if suffixed { format!("{n}m") } else { n })
            .boxed(),
        U::Pixels => (number(30_000), any::<bool>())
            .prop_map(|(n, suffixed)| if suffixed { format!("{n}px") } else { n })
            .boxed(),
        U::Count => (0u32..40).prop_map(|n| n.to_string()).boxed(),
        U::Fraction => number(20),
    }
}

fn units_in(ctx: Ctx) -> Vec<U> {
    match ctx {
        Ctx::Exists => vec![U::Meters, U::Fraction],
        Ctx::Hist => vec![U::Pixels, U::Count, U::Fraction],
        Ctx::Lasers => vec![U::Count, U::Fraction],
    }
}

const BIN_VARS: [&str; 3] = ["x", "y", "z"];

/// Numeric expression of `unit`; `bound` is the number of enclosing
/// comprehension variables.
fn num(unit: U, ctx: Ctx, bound: usize, depth: u32) -> BoxedStrategy<String> {
    let mut leaves: Vec<BoxedStrategy<String>> = Vec::new();
    match (unit, ctx) {
        (U::Meters, Ctx::Exists) => leaves.push(Just("distance(p)".to_string()).boxed()),
        (U::Pixels, Ctx::Hist) => {
            leaves.push(
                select(vec!["max(h.bins)", "min(h.bins)"])
                    .prop_map(String::from)
                    .boxed(),
            );
            for v in &BIN_VARS[..bound] {
                leaves.push(Just(format!("size({v})")).boxed());
            }
            if depth > 0 && bound < BIN_VARS.len() {
                let var = BIN_VARS[bound];
                leaves.push(
                    (
                        select(vec!["max", "min"]),
                        filter(ctx, bound + 1, depth - 1),
                    )
                        .prop_map(move |(f, flt)| format!("{f}({var} in h.bins: {flt})"))
                        .boxed(),
                );
            }
        }
        (U::Count, Ctx::Hist) => {
            leaves.push(
                select(vec!["size(h.bins)", "count(h.bins)"])
                    .prop_map(String::from)
                    .boxed(),
            );
            if depth > 0 && bound < BIN_VARS.len() {
                let var = BIN_VARS[bound];
                leaves.push(
                    (
                        select(vec!["size", "count"]),
                        filter(ctx, bound + 1, depth - 1),
                    )
                        .prop_map(move |(f, flt)| format!("{f}({var} in h.bins: {flt})"))
                        .boxed(),
                );
            }
        }
        (U::Count, Ctx::Lasers) => {
            leaves.push(
                select(vec!["count(a)", "size(a)"])
                    .prop_map(String::from)
                    .boxed(),
            );
        }
        _ => {}
    }
    // sensor-derived leaves outweigh literals
    let mut weighted = vec![(1, literal(unit))];
    weighted.extend(leaves.into_iter().map(|l| (3, l)));
    let leaf = proptest::strategy::Union::new_weighted(weighted).boxed();
    if depth == 0 {
        return leaf;
    }
    let mut composite: Vec<BoxedStrategy<String>> = Vec::new();
    let same = num(unit, ctx, bound, depth - 1);
    composite.push(
        (same.clone(), select(vec!["+", "-"]), same)
            .prop_map(|(a, op, b)| format!("({a} {op} {b})"))
            .boxed(),
    );
    if unit == U::Fraction {
        let f = num(U::Fraction, ctx, bound, depth - 1);
        composite.push(
            (f.clone(), f)
                .prop_map(|(a, b)| format!("({a} * {b})"))
                .boxed(),
        );
        for u in units_in(ctx) {
            let side = num(u, ctx, bound, depth - 1);
            composite.push(
                (side.clone(), side)
                    .prop_map(|(a, b)| format!("({a} / {b})"))
                    .boxed(),
            );
        }
    }
    prop_oneof![2 => leaf, 1 => proptest::strategy::Union::new(composite)].boxed()
}

fn comparison(ctx: Ctx, bound: usize, depth: u32) -> BoxedStrategy<String> {
    let cmp = select(vec!["<", "<=", ">", ">=", "=", "!="]);
    let per_unit: Vec<BoxedStrategy<String>> = units_in(ctx)
        .into_iter()
        .map(|u| {
            let side = num(u, ctx, bound, depth);
            (side.clone(), cmp.clone(), side)
                .prop_map(|(a, op, b)| format!("{a} {op} {b}"))
                .boxed()
        })
        .collect();
    proptest::strategy::Union::new(per_unit).boxed()
}

fn boolean(ctx: Ctx, bound: usize, depth: u32) -> BoxedStrategy<String> {
    let base = comparison(ctx, bound, depth);
    if depth == 0 {
        return prop_oneof![8 => base, 1 => select(vec!["true", "false"]).prop_map(String::from)]
            .boxed();
    }
    let inner = boolean(ctx, bound, depth - 1);
    prop_oneof![
        8 => base,
        1 => select(vec!["true", "false"]).prop_map(String::from),
        1 => (inner.clone(), select(vec!["=", "!="]), inner).prop_map(|(a, op, b)| format!("({a}) {op} ({b})")),
    ]
    .boxed()
}

fn filter(ctx: Ctx, bound: usize, depth: u32) -> BoxedStrategy<String> {
    comparison(ctx, bound, depth)
}

fn actions() -> impl Strategy<Value = String> {
    let all = vec![
        "stop",
        "cap_speed",
        "sound emergency",
        "sound move_away",
        "sound beep",
    ];
    (subsequence(all, 1..=3).prop_shuffle(), any::<bool>()).prop_map(|(acts, trailing)| {
        let body = acts.join("; ");
        if trailing {
            format!("{body};")
        } else {
            body
        }
    })
}

fn clauses(ctx: Ctx, depth: u32) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec(
        (boolean(ctx, 0, depth), actions()).prop_map(|(g, a)| format!("    {g} {{ {a} }}")),
        1..=3,
    )
}

fn group(depth: u32) -> BoxedStrategy<String> {
    let exists = (
        select(vec!["camera", "laser", "lidar"]),
        select(LABELS.to_vec()),
        clauses(Ctx::Exists, depth),
    )
        .prop_map(|(sensor, label, cs)| {
            format!("exists p in {sensor}.all({label}):\n{}", cs.join("\n"))
        });
    let hist = (
        prop_oneof![4 => 1u16..=12, 1 => Just(256u16)],
        select(vec!["", ", normalized = true", ", normalized=false"]),
        clauses(Ctx::Hist, depth),
    )
        .prop_map(|(bins, norm, cs)| {
            format!(
                "hist h = histogram(camera.image, bins = {bins}{norm}):\n{}",
                cs.join("\n")
            )
        });
    let lasers = clauses(Ctx::Lasers, depth)
        .prop_map(|cs| format!("lasers a in lasers(alive):\n{}", cs.join("\n")));
    prop_oneof![exists, hist, lasers].boxed()
}

/// Source text of a random well-typed program with up to four groups.
pub fn program() -> BoxedStrategy<String> {
    proptest::collection::vec(group(2), 0..=4)
        .prop_map(|gs| {
            let mut text = gs.join("\n");
            text.push('\n');
            text
        })
        .boxed()
}

#[derive(Debug, Clone)]
pub enum FrameSpec {
    Image {
        width: u32,
        height: u32,
        pixels: Vec<u8>,
    },
    Histogram(Vec<u64>),
}

/// Inputs for one tick; `None` fields are absent streams.
#[derive(Debug, Clone, Default)]
pub struct SnapSpec {
    pub camera: Option<Vec<(String, f64)>>,
    pub lidar: Option<Vec<(String, f64)>>,
    pub frame: Option<FrameSpec>,
    pub mask: Option<u32>,
}

impl SnapSpec {
    pub fn build(&self, timestamp: f64) -> SensorSnapshot {
        let mut b = SensorSnapshot::builder(timestamp);
        if let Some(ds) = &self.camera {
            b = b.no_camera_detections();
            for (label, d) in ds {
                b = b.camera_detection(label, *d);
            }
        }
        if let Some(ds) = &self.lidar {
            b = b.no_lidar_objects();
            for (label, d) in ds {
                b = b.lidar_object(label, *d);
            }
        }
        match &self.frame {
            Some(FrameSpec::Image {
                width,
                height,
                pixels,
            }) => b = b.camera_image(Image::new(*width, *height, pixels.clone()).unwrap()),
            Some(FrameSpec::Histogram(bins)) => b = b.camera_histogram(bins.clone()),
            None => {}
        }
        if let Some(mask) = self.mask {
            b = b.laser_alive_mask(mask);
        }
        b.build().expect("generated snapshot is valid")
    }
}

/// Distances clustered around the thresholds that appear in programs.
pub fn distance() -> impl Strategy<Value = f64> {
    prop_oneof![
        select(vec![0.0, 0.5, 1.0, 2.5, 3.0, 5.0]),
        0.0..8.0f64,
        (0u32..80).prop_map(|n| f64::from(n) / 10.0),
    ]
}

pub fn detections() -> impl Strategy<Value = Vec<(String, f64)>> {
    proptest::collection::vec(
        (select(LABELS.to_vec()).prop_map(String::from), distance()),
        0..4,
    )
}

pub fn image(max_side: u32) -> impl Strategy<Value = (u32, u32, Vec<u8>)> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        let pixels = prop_oneof![
            proptest::collection::vec(any::<u8>(), (w * h) as usize),
            any::<u8>().prop_map(move |v| vec![v; (w * h) as usize]),
        ];
        (Just(w), Just(h), pixels)
    })
}

fn frame() -> impl Strategy<Value = FrameSpec> {
    prop_oneof![
        4 => image(12).prop_map(|(width, height, pixels)| FrameSpec::Image { width, height, pixels }),
        1 => proptest::collection::vec(0u64..5000, 1..=12).prop_map(|mut bins| {
            bins[0] += 1;
            FrameSpec::Histogram(bins)
        }),
    ]
}

/// Masks biased toward the 25..=32 alive band.
pub fn mask() -> impl Strategy<Value = u32> {
    prop_oneof![
        any::<u32>(),
        (0usize..8, any::<u32>()).prop_map(|(dead, seed)| {
            let mut m = u32::MAX;
            for i in 0..dead {
                m &= !(1 << (seed.rotate_left(5 * i as u32) % 32));
            }
            m
        }),
    ]
}

fn present<T: std::fmt::Debug + Clone>(
    s: impl Strategy<Value = T>,
) -> impl Strategy<Value = Option<T>> {
    prop_oneof![12 => s.prop_map(Some), 1 => Just(None)]
}

pub fn snapshot() -> impl Strategy<Value = SnapSpec> {
    (
        present(detections()),
        present(detections()),
        present(frame()),
        present(mask()),
    )
        .prop_map(|(camera, lidar, frame, mask)| SnapSpec {
            camera,
            lidar,
            frame,
            mask,
        })
}

/// Snapshot with every stream present.
pub fn complete_snapshot() -> impl Strategy<Value = SnapSpec> {
    (detections(), detections(), frame(), mask()).prop_map(|(camera, lidar, frame, mask)| {
        SnapSpec {
            camera: Some(camera),
            lidar: Some(lidar),
            frame: Some(frame),
            mask: Some(mask),
        }
    })
}
