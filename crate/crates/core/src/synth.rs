//! Seeded gaze-session simulator.
//!
//! Neutral drivers scan widely with short fixations and frequent mirror
//! checks; distracted drivers hold their gaze in a narrow region with long
//! fixations. Each driver also drifts between a primary gaze mode and an
//! alternate one (a neutral driver briefly concentrating on the lane ahead,
//! a distracted one briefly scanning), so short windows are ambiguous while
//! long windows average over several episodes.
//!
//! All behavioural constants are invented defaults; none are measured values.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AoiKind, AoiRect, GazeSample, Vec3, VirtualWall};
use crate::io::{GeneratorProvenance, SessionRecording};
use crate::label::Label;

pub const SAMPLE_PERIOD_MS: u32 = 50;
const GENERATOR_NAME: &str = "gazewall-synth/1";

/// Secondary gaze mode a driver drifts into for short episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternateMode {
    /// Wall-local fixation spread (std, meters) while in this mode.
    pub dispersion: [f64; 2],
    pub fixation_median_s: f64,
    /// Long-run fraction of time spent in this mode.
    pub time_fraction: f64,
    pub mean_episode_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    pub label: Label,
    /// Wall-local (u right, v up) center of fixations, meters.
    pub fixation_center: [f64; 2],
    /// Wall-local fixation spread (std, meters).
    pub fixation_dispersion: [f64; 2],
    pub fixation_median_s: f64,
    /// Log-space standard deviation of fixation durations.
    pub fixation_log_sigma: f64,
    pub mirror_check_rate: f64,
    pub offplane_rate: f64,
    pub pursuit_rate: f64,
    pub saccade_duration_ms: f64,
    /// Per-sample gaze noise during fixations, meters on the wall.
    pub fixation_jitter_m: f64,
    pub alternate: AlternateMode,
}

impl BehaviorProfile {
    pub fn neutral() -> Self {
        Self {
            label: Label::Neutral,
            fixation_center: [-0.35, -0.1],
            fixation_dispersion: [0.9, 0.35],
            fixation_median_s: 0.4,
            fixation_log_sigma: 0.45,
            mirror_check_rate: 6.0,
            offplane_rate: 2.0,
            pursuit_rate: 3.0,
            saccade_duration_ms: 40.0,
            fixation_jitter_m: 0.02,
            alternate: AlternateMode {
                dispersion: [0.3, 0.14],
                fixation_median_s: 1.0,
                time_fraction: 0.22,
                mean_episode_s: 8.0,
            },
        }
    }

    pub fn distracted() -> Self {
        Self {
            label: Label::Distracted,
            fixation_center: [-0.35, -0.1],
            fixation_dispersion: [0.25, 0.12],
            fixation_median_s: 1.2,
            fixation_log_sigma: 0.45,
            mirror_check_rate: 1.0,
            offplane_rate: 2.0,
            pursuit_rate: 0.0,
            saccade_duration_ms: 40.0,
            fixation_jitter_m: 0.02,
            alternate: AlternateMode {
                dispersion: [0.8, 0.3],
                fixation_median_s: 0.5,
                time_fraction: 0.15,
                mean_episode_s: 6.0,
            },
        }
    }

    pub fn default_for(label: Label) -> Self {
        match label {
            Label::Neutral => Self::neutral(),
            Label::Distracted => Self::distracted(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.fixation_dispersion[0],
            self.fixation_dispersion[1],
            self.fixation_median_s,
            self.alternate.dispersion[0],
            self.alternate.dispersion[1],
            self.alternate.fixation_median_s,
            self.alternate.mean_episode_s,
            self.saccade_duration_ms,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config(format!("{} profile: dispersions and durations must be positive", self.label)));
        }
        let rates = [self.mirror_check_rate, self.offplane_rate, self.pursuit_rate];
        if rates.iter().any(|r| !(*r >= 0.0)) || self.fixation_log_sigma < 0.0 || self.fixation_jitter_m < 0.0 {
            return Err(Error::Config(format!("{} profile: rates must be non-negative", self.label)));
        }
        if !(0.0..1.0).contains(&self.alternate.time_fraction) {
            return Err(Error::Config(format!("{} profile: alternate time fraction must be in [0, 1)", self.label)));
        }
        Ok(())
    }
}

/// Checks both profiles and the narrowing assumption between them.
pub fn validate_profiles(neutral: &BehaviorProfile, distracted: &BehaviorProfile) -> Result<()> {
    neutral.validate()?;
    distracted.validate()?;
    if neutral.label != Label::Neutral || distracted.label != Label::Distracted {
        return Err(Error::Config("profile labels are swapped".into()));
    }
    let (n, d) = (neutral.fixation_dispersion, distracted.fixation_dispersion);
    if !(d[0] < n[0] && d[1] < n[1]) {
        return Err(Error::Config(format!(
            "distracted dispersion {d:?} must be smaller than neutral dispersion {n:?} on both axes"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSpec {
    pub driver_id: String,
    pub duration_s: u32,
    pub seed: u64,
    pub head_position: Vec3,
    pub profile: BehaviorProfile,
    pub wall: VirtualWall,
    pub aois: Vec<AoiRect>,
}

impl SessionSpec {
    pub fn new(driver_id: impl Into<String>, profile: BehaviorProfile, duration_s: u32, seed: u64) -> Self {
        Self {
            driver_id: driver_id.into(),
            duration_s,
            seed,
            head_position: default_head_position(),
            profile,
            wall: VirtualWall::default(),
            aois: AoiRect::default_cabin(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration_s == 0 {
            return Err(Error::Config("session duration must be positive".into()));
        }
        self.profile.validate()?;
        self.wall.validate()?;
        if self.profile.mirror_check_rate > 0.0 && !self.aois.iter().any(is_mirror) {
            return Err(Error::Config("mirror checks need at least one mirror AOI".into()));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        (u64::from(self.duration_s) * 1000 / u64::from(SAMPLE_PERIOD_MS)) as usize
    }
}

pub fn default_head_position() -> Vec3 {
    Vec3::new(-0.4, 0.25, -0.6)
}

fn is_mirror(a: &AoiRect) -> bool {
    matches!(a.name, AoiKind::LeftMirror | AoiKind::RightMirror | AoiKind::CentralMirror)
}

/// What the simulated eye was doing at a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Fixation,
    Saccade,
    Pursuit,
    MirrorCheck(AoiKind),
    Dropout,
}

#[derive(Debug, Clone, Copy)]
enum Segment {
    Fixation { target: [f64; 2] },
    Saccade { from: [f64; 2], to: [f64; 2] },
    Pursuit { from: [f64; 2], velocity: f64 },
    Mirror { aoi: usize, point: Vec3 },
    Dropout,
}

struct Timed {
    start: f64,
    end: f64,
    seg: Segment,
}

fn exp_wait(rng: &mut ChaCha8Rng, rate_per_min: f64) -> f64 {
    if rate_per_min <= 0.0 {
        return f64::INFINITY;
    }
    Exp::new(rate_per_min / 60_000.0).map_or(f64::INFINITY, |d| d.sample(rng))
}

fn plan_segments(spec: &SessionSpec, rng: &mut ChaCha8Rng) -> Vec<Timed> {
    let p = &spec.profile;
    let end = f64::from(spec.duration_s) * 1000.0;
    let mirrors: Vec<usize> = (0..spec.aois.len()).filter(|&i| is_mirror(&spec.aois[i])).collect();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");

    let alt = &p.alternate;
    let alt_mean_ms = alt.mean_episode_s * 1000.0;
    let primary_mean_ms = if alt.time_fraction > 0.0 {
        alt_mean_ms * (1.0 - alt.time_fraction) / alt.time_fraction
    } else {
        f64::INFINITY
    };
    let episode_len = |rng: &mut ChaCha8Rng, mean: f64| {
        if mean.is_finite() {
            Exp::new(1.0 / mean).map_or(f64::INFINITY, |d| d.sample(rng))
        } else {
            f64::INFINITY
        }
    };
    let mut in_alt = rng.random_bool(alt.time_fraction.clamp(0.0, 1.0));
    let mut episode_end = episode_len(rng, if in_alt { alt_mean_ms } else { primary_mean_ms });

    let mut next_mirror = exp_wait(rng, p.mirror_check_rate);
    let mut next_dropout = exp_wait(rng, p.offplane_rate);
    let mut next_pursuit = exp_wait(rng, p.pursuit_rate);

    let mut t = 0.0;
    let mut current = p.fixation_center;
    let mut out = Vec::new();
    let push = |out: &mut Vec<Timed>, t: &mut f64, dur: f64, seg: Segment| {
        out.push(Timed {
            start: *t,
            end: *t + dur,
            seg,
        });
        *t += dur;
    };

    while t < end {
        while t >= episode_end {
            in_alt = !in_alt;
            episode_end += episode_len(rng, if in_alt { alt_mean_ms } else { primary_mean_ms });
        }
        if t >= next_dropout {
            let dur = rng.random_range(200.0..1000.0);
            push(&mut out, &mut t, dur, Segment::Dropout);
            next_dropout = t + exp_wait(rng, p.offplane_rate);
        } else if t >= next_mirror && !mirrors.is_empty() {
            let aoi = *mirrors.choose(rng).expect("non-empty");
            let rect = &spec.aois[aoi];
            let a = rng.random_range(-0.5..0.5) * rect.half_extents[0];
            let b = rng.random_range(-0.5..0.5) * rect.half_extents[1];
            let dur = rng.random_range(500.0..1500.0);
            push(&mut out, &mut t, dur, Segment::Mirror { aoi, point: rect.local_to_point(a, b) });
            next_mirror = t + exp_wait(rng, p.mirror_check_rate);
        } else if t >= next_pursuit {
            let speed = rng.random_range(0.1..0.3) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let dur = rng.random_range(1000.0..2000.0);
            push(&mut out, &mut t, dur, Segment::Pursuit { from: current, velocity: speed });
            current[0] += speed * dur / 1000.0;
            next_pursuit = t + exp_wait(rng, p.pursuit_rate);
        } else {
            let (disp, median) = if in_alt {
                (alt.dispersion, alt.fixation_median_s)
            } else {
                (p.fixation_dispersion, p.fixation_median_s)
            };
            let target = [
                p.fixation_center[0] + disp[0] * unit.sample(rng),
                p.fixation_center[1] + disp[1] * unit.sample(rng),
            ];
            push(&mut out, &mut t, p.saccade_duration_ms, Segment::Saccade { from: current, to: target });
            let dur = LogNormal::new((median * 1000.0).ln(), p.fixation_log_sigma)
                .map_or(median * 1000.0, |d| d.sample(rng));
            push(&mut out, &mut t, dur.max(1.0), Segment::Fixation { target });
            current = target;
        }
    }
    out
}

fn direction_to(head: Vec3, target: Vec3) -> Vec3 {
    (target - head).normalized()
}

/// Simulates one session and tags every sample with the eye activity behind it.
pub fn simulate_session_annotated(spec: &SessionSpec) -> Result<Vec<(GazeSample, SampleKind)>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let segments = plan_segments(spec, &mut rng);
    let jitter = Normal::new(0.0, spec.profile.fixation_jitter_m.max(f64::MIN_POSITIVE)).expect("jitter sigma");
    let head = spec.head_position;
    let wall = &spec.wall;

    let mut out = Vec::with_capacity(spec.n_samples());
    let mut seg_idx = 0;
    for k in 0..spec.n_samples() {
        let t_ms = k as i64 * i64::from(SAMPLE_PERIOD_MS);
        let t = t_ms as f64;
        while seg_idx + 1 < segments.len() && segments[seg_idx].end <= t {
            seg_idx += 1;
        }
        let Timed { start, end, seg } = &segments[seg_idx];
        let frac = ((t - start) / (end - start)).clamp(0.0, 1.0);
        let mut on_wall = |uv: [f64; 2], noise: bool, kind: SampleKind| {
            let (du, dv) = if noise {
                (jitter.sample(&mut rng), jitter.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            let target = wall.local_to_point(uv[0] + du, uv[1] + dv);
            (
                GazeSample {
                    timestamp_ms: t_ms,
                    head_position: head,
                    gaze_direction: direction_to(head, target),
                    valid: true,
                },
                kind,
            )
        };
        let item = match *seg {
            Segment::Fixation { target } => on_wall(target, true, SampleKind::Fixation),
            Segment::Saccade { from, to } => {
                let uv = [from[0] + (to[0] - from[0]) * frac, from[1] + (to[1] - from[1]) * frac];
                on_wall(uv, false, SampleKind::Saccade)
            }
            Segment::Pursuit { from, velocity } => {
                let uv = [from[0] + velocity * (t - start) / 1000.0, from[1]];
                on_wall(uv, true, SampleKind::Pursuit)
            }
            Segment::Mirror { aoi, point } => (
                GazeSample {
                    timestamp_ms: t_ms,
                    head_position: head,
                    gaze_direction: direction_to(head, point),
                    valid: true,
                },
                SampleKind::MirrorCheck(spec.aois[aoi].name),
            ),
            Segment::Dropout => (GazeSample::invalid(t_ms, head), SampleKind::Dropout),
        };
        out.push(item);
    }
    Ok(out)
}

pub fn simulate_session(spec: &SessionSpec) -> Result<Vec<GazeSample>> {
    Ok(simulate_session_annotated(spec)?.into_iter().map(|(s, _)| s).collect())
}

/// Simulates a session and wraps it with a provenance-carrying header.
pub fn simulate_recording(spec: &SessionSpec) -> Result<SessionRecording> {
    let samples = simulate_session(spec)?;
    let provenance = GeneratorProvenance {
        generator: GENERATOR_NAME.to_owned(),
        seed: spec.seed,
        duration_s: spec.duration_s,
        profile: serde_json::to_value(&spec.profile).map_err(|e| Error::Data(e.to_string()))?,
    };
    Ok(SessionRecording::new(
        spec.driver_id.clone(),
        spec.profile.label,
        spec.wall,
        SAMPLE_PERIOD_MS,
        samples,
        Some(provenance),
    ))
}

/// Base configuration for a simulated study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub neutral: BehaviorProfile,
    pub distracted: BehaviorProfile,
    pub duration_s: u32,
    pub head_position: Vec3,
    /// Relative spread of per-driver profile perturbation (0.2 = +-20 %).
    pub perturbation: f64,
    /// Per-axis spread of per-driver head position, meters.
    pub head_jitter_m: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            neutral: BehaviorProfile::neutral(),
            distracted: BehaviorProfile::distracted(),
            duration_s: 1320,
            head_position: default_head_position(),
            perturbation: 0.2,
            head_jitter_m: 0.05,
        }
    }
}

impl CorpusConfig {
    pub fn with_duration(duration_s: u32) -> Self {
        Self {
            duration_s,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_profiles(&self.neutral, &self.distracted)?;
        if !(0.0..1.0).contains(&self.perturbation) || self.head_jitter_m < 0.0 {
            return Err(Error::Config("perturbation must be in [0, 1)".into()));
        }
        if self.duration_s == 0 {
            return Err(Error::Config("session duration must be positive".into()));
        }
        Ok(())
    }
}

fn perturb(profile: &BehaviorProfile, rel: f64, rng: &mut ChaCha8Rng) -> BehaviorProfile {
    let mut f = || if rel > 0.0 { rng.random_range(1.0 - rel..1.0 + rel) } else { 1.0 };
    let mut p = profile.clone();
    p.fixation_dispersion = [p.fixation_dispersion[0] * f(), p.fixation_dispersion[1] * f()];
    p.fixation_median_s *= f();
    p.mirror_check_rate *= f();
    p.offplane_rate *= f();
    p.pursuit_rate *= f();
    p.alternate.dispersion = [p.alternate.dispersion[0] * f(), p.alternate.dispersion[1] * f()];
    p.alternate.fixation_median_s *= f();
    p.alternate.time_fraction = (p.alternate.time_fraction * f()).min(0.95);
    p.alternate.mean_episode_s *= f();
    p
}

/// Per-driver session specs: one neutral and one distracted lap per driver.
///
/// Drivers are named `driver01`, `driver02`, ...; each gets its own head
/// position, fixation-center offset and perturbed profiles.
pub fn corpus_specs(n_drivers: usize, seed: u64, cfg: &CorpusConfig) -> Result<Vec<SessionSpec>> {
    if n_drivers < 2 {
        return Err(Error::Config(format!("a corpus needs at least 2 drivers, got {n_drivers}")));
    }
    cfg.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::with_capacity(2 * n_drivers);
    for d in 0..n_drivers {
        let driver_id = format!("driver{:02}", d + 1);
        let j = cfg.head_jitter_m;
        let mut offset = || if j > 0.0 { master.random_range(-j..j) } else { 0.0 };
        let head = cfg.head_position + Vec3::new(offset(), offset(), offset());
        let center_shift = [master.random_range(-0.1..0.1), master.random_range(-0.05..0.05)];
        for base in [&cfg.neutral, &cfg.distracted] {
            let mut profile = perturb(base, cfg.perturbation, &mut master);
            profile.fixation_center = [
                profile.fixation_center[0] + center_shift[0],
                profile.fixation_center[1] + center_shift[1],
            ];
            let mut spec = SessionSpec::new(driver_id.clone(), profile, cfg.duration_s, master.random());
            spec.head_position = head;
            specs.push(spec);
        }
    }
    Ok(specs)
}

/// Simulates a whole study: `2 * n_drivers` sessions, neutral first per driver.
pub fn make_corpus(n_drivers: usize, seed: u64, cfg: &CorpusConfig) -> Result<Vec<SessionRecording>> {
    use rayon::prelude::*;
    corpus_specs(n_drivers, seed, cfg)?
        .par_iter()
        .map(simulate_recording)
        .collect()
}
