//! Synthetic Suturing trials whose masks realise a chosen context sequence.
//!
//! Scenes are laid out on a 320x240 grid scaled by an integer factor, with
//! every object an axis-aligned rectangle, so contours, distances and
//! overlaps are exact:
//!
//! * a grasper holding or touching the needle shares an edge with it,
//! * a grasper on the thread overlaps it,
//! * a needle in the fabric overlaps the left tissue points and lies to
//!   their left, a free needle is far from them,
//! * closed jaws are 10 px apart, open jaws 25 px.
//!
//! Each context sample is repeated for `stride` native frames, so the rolling
//! mode with a window no longer than the stride recovers it exactly.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::gesture_fsm::{FsmState, GrammarGraph};
use crate::trial_io::{
    write_context_transcript, write_gesture_transcript, write_jaw_ends, write_manifest, write_pgm, write_points,
    AnnotationPaths, ContextCode, ContextFrame, Gesture, GestureTranscript, JawEndSeries, JawEnds, ManifestFile,
    Mask, ObjectClass, Task,
};

const UNIT_W: usize = 320;
const UNIT_H: usize = 240;
const CLOSED_JAW_PX: f64 = 10.0;
const OPEN_JAW_PX: f64 = 25.0;
/// Samples spent in a gesture without a duration limit, at most.
const FREE_DWELL_MAX: usize = 12;

/// Half-open pixel rectangle `[x0, x1) x [y0, y1)`.
pub type Rect = (i64, i64, i64, i64);

/// Object rectangles and jaw state realising one context value.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub left: Option<Rect>,
    pub right: Option<Rect>,
    pub needle: Rect,
    pub thread: Option<Rect>,
    pub left_open: bool,
    pub right_open: bool,
}

/// Rectangular layout for one image size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layout {
    pub width: usize,
    pub height: usize,
    k: i64,
}

impl Layout {
    /// Fails when the image is smaller than the 320x240 unit grid.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        let k = (width / UNIT_W).min(height / UNIT_H);
        if k == 0 {
            return Err(Error::Validation(format!(
                "synthetic frames must be at least {UNIT_W}x{UNIT_H}, got {width}x{height}"
            )));
        }
        Ok(Layout {
            width,
            height,
            k: k as i64,
        })
    }

    fn r(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> Rect {
        (x0 * self.k, y0 * self.k, x1 * self.k, y1 * self.k)
    }

    pub fn tissue_points(&self) -> Vec<Point> {
        [(220, 120), (230, 120), (220, 140), (230, 140)]
            .iter()
            .map(|&(x, y)| Point::new((x * self.k) as f64, (y * self.k) as f64))
            .collect()
    }

    fn needle(&self, in_fabric: bool) -> Rect {
        if in_fabric {
            self.r(200, 118, 222, 122)
        } else {
            self.r(100, 100, 122, 104)
        }
    }

    fn thread(&self) -> Rect {
        self.r(50, 190, 90, 193)
    }

    fn far(&self, side: Side) -> Rect {
        match side {
            Side::Left => self.r(20, 20, 32, 32),
            Side::Right => self.r(280, 20, 292, 32),
        }
    }

    fn on_thread(&self, side: Side) -> Rect {
        match side {
            Side::Left => self.r(55, 185, 67, 197),
            Side::Right => self.r(75, 185, 87, 197),
        }
    }

    /// Shares the needle's top edge at its left end, or its bottom edge at
    /// its right end.
    fn on_needle(&self, side: Side, n: Rect) -> Rect {
        let g = 12 * self.k;
        match side {
            Side::Left => (n.0, n.1 - g, n.0 + g, n.1),
            Side::Right => (n.2 - g, n.3, n.2, n.3 + g),
        }
    }

    /// Scene realising `code`, or `None` if this layout cannot express it.
    pub fn scene(&self, code: ContextCode) -> Option<Scene> {
        let [lh, lc, rh, rc, s5] = code.0;
        let grip = |hold: u8, contact: u8| -> Option<(u8, bool)> {
            match (hold, contact) {
                (0, 0) => Some((0, true)),
                (v, 0) => Some((v, false)),
                (0, v) => Some((v, true)),
                _ => None,
            }
        };
        let (left, left_open) = grip(lh, lc)?;
        let (right, right_open) = grip(rh, rc)?;
        if ![0, 2, 3].contains(&left) || ![0, 2, 3].contains(&right) || s5 > 2 {
            return None;
        }
        let needle = self.needle(s5 == 2);
        let place = |side: Side, v: u8| match v {
            2 => Some(self.on_needle(side, needle)),
            3 => Some(self.on_thread(side)),
            _ => None,
        };
        let mut scene = Scene {
            left: place(Side::Left, left),
            right: place(Side::Right, right),
            needle,
            thread: (left == 3 || right == 3).then(|| self.thread()),
            left_open,
            right_open,
        };
        match s5 {
            2 => {}
            // Needs D(RG,T) or D(LG,N) finite and above the touch distance.
            1 => {
                if left == 0 {
                    scene.left = Some(self.far(Side::Left));
                } else if right == 0 {
                    scene.right = Some(self.far(Side::Right));
                    scene.thread = Some(self.thread());
                } else if left == 3 {
                } else if right == 2 {
                    scene.thread = Some(self.thread());
                } else {
                    return None;
                }
            }
            // Both distances must be absent or touching.
            _ => {
                if left == 3 {
                    return None;
                }
            }
        }
        Some(scene)
    }

    pub fn masks(&self, scene: &Scene, frame: usize) -> [Mask; 4] {
        let mk = |class: ObjectClass, r: Option<Rect>| {
            let mut m = Mask::empty(self.width, self.height, class, frame);
            if let Some((x0, y0, x1, y1)) = r {
                m.fill_rect(x0, y0, x1, y1);
            }
            m
        };
        [
            mk(ObjectClass::LeftGrasper, scene.left),
            mk(ObjectClass::RightGrasper, scene.right),
            mk(ObjectClass::Needle, Some(scene.needle)),
            mk(ObjectClass::Thread, scene.thread),
        ]
    }

    pub fn jaw_ends(&self, scene: &Scene) -> JawEnds {
        let jaw = |r: Option<Rect>, open: bool, fallback: Rect| {
            let (x0, y0, ..) = r.unwrap_or(fallback);
            let gap = if open { OPEN_JAW_PX } else { CLOSED_JAW_PX };
            let a = Point::new(x0 as f64, y0 as f64);
            [a, Point::new(a.x + gap, a.y)]
        };
        JawEnds {
            left: jaw(scene.left, scene.left_open, self.far(Side::Left)),
            right: jaw(scene.right, scene.right_open, self.far(Side::Right)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// One gesture of a walk and the context samples emitted while in it.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkStep {
    pub gesture: Gesture,
    pub contexts: Vec<ContextCode>,
}

/// Longest dwell, in samples, that stays within `gesture`'s duration limit.
pub fn max_dwell(grammar: &GrammarGraph, gesture: Gesture, rate_hz: f64) -> usize {
    match grammar.durations.get(&gesture) {
        Some(d) => ((d.max_seconds * rate_hz + 1e-9).floor() as usize).max(1),
        None => FREE_DWELL_MAX,
    }
}

/// Random path of `n_gestures` context-triggered transitions from Start.
///
/// The first context of each gesture triggers the transition into it and
/// is not part of the previous gesture's group; later contexts are drawn
/// from the gesture's own group. Only contexts accepted by `allowed` are used.
pub fn random_walk<R: Rng>(
    grammar: &GrammarGraph,
    n_gestures: usize,
    rate_hz: f64,
    rng: &mut R,
    allowed: impl Fn(ContextCode) -> bool,
) -> Result<Vec<WalkStep>> {
    let mut state = FsmState::Start;
    let mut out = Vec::with_capacity(n_gestures);
    for _ in 0..n_gestures {
        let group = grammar.group(state);
        let mut options: Vec<(Gesture, ContextCode)> = Vec::new();
        for t in grammar.outgoing(state) {
            for &c in &t.contexts {
                let wins = grammar.trigger(state, c).map(|w| w.to) == Some(t.to);
                if wins && !group.contains(&c) && allowed(c) {
                    options.push((t.to, c));
                }
            }
        }
        // Choose the target first so gestures with many triggers are not favoured.
        let targets: Vec<Gesture> = options.iter().map(|o| o.0).collect::<BTreeSet<_>>().into_iter().collect();
        let Some(&next) = targets.choose(rng) else {
            return Err(Error::Validation(format!("walk is stuck in {state}")));
        };
        let firsts: Vec<ContextCode> = options.iter().filter(|o| o.0 == next).map(|o| o.1).collect();
        let first = *firsts.choose(rng).expect("target has a trigger");
        let own: Vec<ContextCode> = grammar
            .group(FsmState::Gesture(next))
            .into_iter()
            .filter(|&c| allowed(c))
            .collect();
        let dwell = rng.gen_range(1..=max_dwell(grammar, next, rate_hz));
        let mut contexts = vec![first];
        for _ in 1..dwell {
            contexts.push(*own.choose(rng).unwrap_or(&first));
        }
        out.push(WalkStep {
            gesture: next,
            contexts,
        });
        state = FsmState::Gesture(next);
    }
    Ok(out)
}

/// Per-sample gesture labels of a walk followed by one terminal sample.
pub fn walk_labels(walk: &[WalkStep], terminal: Gesture) -> Vec<Gesture> {
    let mut labels: Vec<Gesture> = walk
        .iter()
        .flat_map(|s| std::iter::repeat(s.gesture).take(s.contexts.len()))
        .collect();
    if !labels.is_empty() {
        labels.push(terminal);
    }
    labels
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub width: usize,
    pub height: usize,
    pub frame_rate_hz: f64,
    pub output_rate_hz: f64,
    /// Gestures per walk.
    pub gestures: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            width: 640,
            height: 480,
            frame_rate_hz: 30.0,
            output_rate_hz: 3.0,
            gestures: 8,
        }
    }
}

/// Paths of one generated trial.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthTrial {
    pub trial_id: String,
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub context_gt: PathBuf,
    pub gestures_gt: PathBuf,
    pub samples: usize,
}

pub const CONTEXT_GT_FILE: &str = "context_gt.csv";
pub const GESTURES_GT_FILE: &str = "gestures_gt.txt";

/// Writes masks, annotations, manifest and ground truth for a context
/// sequence sampled at `options.output_rate_hz`.
///
/// Files with identical content are hard links to the first copy when the
/// filesystem allows it.
pub fn write_trial(
    dir: &Path,
    trial_id: &str,
    contexts: &[ContextCode],
    gestures: Option<&[Gesture]>,
    options: &SynthOptions,
) -> Result<SynthTrial> {
    let layout = Layout::new(options.width, options.height)?;
    let stride = crate::trial_io::stride_of(options.frame_rate_hz, options.output_rate_hz).ok_or_else(|| {
        Error::Validation(format!(
            "frame rate {} is not a multiple of output rate {}",
            options.frame_rate_hz, options.output_rate_hz
        ))
    })?;
    let scenes = contexts
        .iter()
        .map(|&c| layout.scene(c).ok_or_else(|| Error::Validation(format!("context {c} cannot be synthesised"))))
        .collect::<Result<Vec<_>>>()?;

    let classes = [
        (ObjectClass::LeftGrasper, "lg"),
        (ObjectClass::RightGrasper, "rg"),
        (ObjectClass::Needle, "n"),
        (ObjectClass::Thread, "t"),
    ];
    for (_, sub) in classes {
        fs::create_dir_all(dir.join("masks").join(sub)).map_err(|e| Error::io(dir, e))?;
    }
    let mut written: HashMap<(usize, Option<Rect>), PathBuf> = HashMap::new();
    let mut jaws = JawEndSeries::new();
    for (sample, scene) in scenes.iter().enumerate() {
        let rects = [scene.left, scene.right, Some(scene.needle), scene.thread];
        let masks = layout.masks(scene, sample * stride);
        for (ci, (_, sub)) in classes.iter().enumerate() {
            for frame in sample * stride..(sample + 1) * stride {
                let path = dir.join("masks").join(sub).join(format!("{frame:05}.pgm"));
                match written.get(&(ci, rects[ci])) {
                    Some(src) => link_or_copy(src, &path)?,
                    None => {
                        write_pgm(&masks[ci], &path)?;
                        written.insert((ci, rects[ci]), path);
                    }
                }
            }
        }
        jaws.insert(sample * stride, layout.jaw_ends(scene));
    }
    write_jaw_ends(&jaws, dir.join("jaw_ends.csv"))?;
    write_points(&layout.tissue_points(), dir.join("tissue_points.csv"))?;

    let masks = classes
        .iter()
        .map(|&(c, sub)| (c, format!("masks/{sub}/{{frame:05}}.pgm")))
        .collect();
    let manifest = ManifestFile {
        trial_id: trial_id.to_string(),
        task: Task::Suturing,
        frame_rate_hz: options.frame_rate_hz,
        output_rate_hz: options.output_rate_hz,
        frame_count: contexts.len() * stride,
        first_frame: 0,
        rdp_epsilon_px: None,
        tissue_radius_px: None,
        masks,
        annotations: AnnotationPaths {
            jaw_ends: Some("jaw_ends.csv".into()),
            tissue_points: Some("tissue_points.csv".into()),
        },
    };
    let manifest_path = dir.join("manifest.toml");
    write_manifest(&manifest, &manifest_path)?;

    let frames: Vec<ContextFrame> = contexts
        .iter()
        .enumerate()
        .map(|(i, c)| ContextFrame::new(i, c.0))
        .collect();
    let context_gt = dir.join(CONTEXT_GT_FILE);
    write_context_transcript(&frames, &context_gt)?;
    let gestures_gt = dir.join(GESTURES_GT_FILE);
    if let Some(labels) = gestures {
        write_gesture_transcript(&GestureTranscript::from_samples(labels).to_native(stride), &gestures_gt)?;
    }
    Ok(SynthTrial {
        trial_id: trial_id.to_string(),
        dir: dir.to_path_buf(),
        manifest: manifest_path,
        context_gt,
        gestures_gt,
        samples: contexts.len(),
    })
}

fn link_or_copy(src: &Path, dst: &Path) -> Result<()> {
    if dst.exists() {
        fs::remove_file(dst).map_err(|e| Error::io(dst, e))?;
    }
    if fs::hard_link(src, dst).is_err() {
        fs::copy(src, dst).map_err(|e| Error::io(dst, e))?;
    }
    Ok(())
}

/// Generates `n_trials` trials from random walks through the Suturing
/// grammar, under `out/<trial_id>/`.
pub fn synth_trials<R: Rng>(
    out: &Path,
    task: Task,
    n_trials: usize,
    options: &SynthOptions,
    rng: &mut R,
) -> Result<Vec<SynthTrial>> {
    if task != Task::Suturing {
        return Err(Error::Validation(format!(
            "synthetic scenes exist only for Suturing, not {task}"
        )));
    }
    let grammar = GrammarGraph::builtin(task);
    let layout = Layout::new(options.width, options.height)?;
    let mut trials = Vec::with_capacity(n_trials);
    for i in 0..n_trials {
        let walk = random_walk(&grammar, options.gestures, options.output_rate_hz, rng, |c| {
            layout.scene(c).is_some()
        })?;
        let contexts: Vec<ContextCode> = walk.iter().flat_map(|s| s.contexts.iter().copied()).collect();
        let labels = walk_labels(&walk, grammar.terminal);
        let id = format!("Suturing_Synth_T{:03}", i + 1);
        trials.push(write_trial(&out.join(&id), &id, &contexts, Some(&labels), options)?);
    }
    Ok(trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_suturing_grammar_context_is_realisable() {
        let g = GrammarGraph::builtin(Task::Suturing);
        let layout = Layout::new(640, 480).unwrap();
        for t in &g.transitions {
            for &c in &t.contexts {
                assert!(layout.scene(c).is_some(), "{c}");
            }
        }
    }

    #[test]
    fn walks_are_reproducible() {
        let g = GrammarGraph::builtin(Task::Suturing);
        let a = random_walk(&g, 10, 3.0, &mut ChaCha8Rng::seed_from_u64(5), |_| true).unwrap();
        let b = random_walk(&g, 10, 3.0, &mut ChaCha8Rng::seed_from_u64(5), |_| true).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.contexts.len() <= max_dwell(&g, s.gesture, 3.0));
        }
    }

    #[test]
    fn small_frames_rejected() {
        assert!(Layout::new(100, 100).is_err());
    }

    #[test]
    fn other_tasks_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(synth_trials(dir.path(), Task::KnotTying, 1, &SynthOptions::default(), &mut rng).is_err());
    }
}
