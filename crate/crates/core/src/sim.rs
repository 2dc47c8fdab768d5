//! Synthetic multi-animal tracking scenarios with controlled identity
//! switch injection, plus the pipeline harness that runs the
//! re-identification loop over the corrupted stream and scores the
//! result.
//!
//! Identities move on disjoint horizontal lanes of the arena, one lane
//! per identity, so boxes of different identities never overlap and the
//! tracking-metric consequences of an injected label swap are exactly
//! derivable (two identity switches per pairwise swap). Embeddings are
//! drawn around fixed unit cluster centers with configurable pairwise
//! separation, so similarity thresholds can be placed analytically on
//! either side of the cluster cosines.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::mot::{evaluate_sequence, MotConfig, MotSummary, TrackRecord, TrackSet};
use crate::reid::{
    process_observation, BankEntry, EmbeddingBank, EmbeddingBanks, EmbeddingVector, Precision,
    ReidConfig, ReidEvent,
};
use crate::rng::SplitMix64;

/// Bounded random-walk parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MotionModel {
    pub speed_px_per_frame: f64,
    pub direction_change_prob: f64,
}

impl Default for MotionModel {
    fn default() -> Self {
        Self {
            speed_px_per_frame: 3.0,
            direction_change_prob: 0.1,
        }
    }
}

/// Identity-conditioned embedding synthesis.
///
/// Cluster centers are fixed unit vectors with pairwise cosine
/// `1 - cluster_separation`; observations are the center plus isotropic
/// Gaussian noise of `noise_sigma`, renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingModel {
    pub dim: usize,
    pub cluster_separation: f64,
    pub noise_sigma: f64,
}

impl Default for EmbeddingModel {
    fn default() -> Self {
        Self {
            dim: 384,
            cluster_separation: 0.6,
            noise_sigma: 0.05,
        }
    }
}

/// One permanent pairwise label swap taking effect at `frame`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SwitchSpec {
    pub frame: u64,
    pub identity_a: u64,
    pub identity_b: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioConfig {
    pub num_identities: u64,
    pub num_frames: u64,
    /// Arena (width, height) in pixels.
    pub arena: (f64, f64),
    pub motion: MotionModel,
    /// Box (width, height) in pixels.
    pub box_size: (f64, f64),
    #[cfg_attr(feature = "serde", serde(default))]
    pub switch_plan: Vec<SwitchSpec>,
    pub embedding_model: EmbeddingModel,
    pub fps: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_identities: 8,
            num_frames: 100,
            arena: (1280.0, 720.0),
            motion: MotionModel::default(),
            box_size: (60.0, 60.0),
            switch_plan: Vec::new(),
            embedding_model: EmbeddingModel::default(),
            fps: 5.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_identities == 0 || self.num_frames == 0 {
            return Err(Error::InvalidConfig(
                "need at least one identity and one frame".into(),
            ));
        }
        let (aw, ah) = self.arena;
        let (bw, bh) = self.box_size;
        if !(aw > 0.0 && ah > 0.0 && bw > 0.0 && bh > 0.0) {
            return Err(Error::InvalidConfig(
                "arena and box sizes must be positive".into(),
            ));
        }
        let lane_height = ah / self.num_identities as f64;
        if bw > aw || bh > lane_height {
            return Err(Error::OvercrowdedArena(alloc::format!(
                "{} boxes of {bw}x{bh} px cannot be laned into a {aw}x{ah} px arena",
                self.num_identities
            )));
        }
        if !(self.motion.speed_px_per_frame >= 0.0) {
            return Err(Error::InvalidConfig("speed must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.motion.direction_change_prob) {
            return Err(Error::InvalidConfig(
                "direction_change_prob must be in [0, 1]".into(),
            ));
        }
        let em = &self.embedding_model;
        if em.dim < self.num_identities as usize + 1 {
            return Err(Error::InvalidConfig(alloc::format!(
                "embedding dim {} too small for {} separated clusters",
                em.dim,
                self.num_identities
            )));
        }
        if !(0.0..=1.0).contains(&em.cluster_separation) || !(em.noise_sigma >= 0.0) {
            return Err(Error::InvalidConfig(
                "cluster_separation must be in [0, 1], noise_sigma nonnegative".into(),
            ));
        }
        if !(self.fps > 0.0) {
            return Err(Error::InvalidConfig("fps must be positive".into()));
        }
        for s in &self.switch_plan {
            if s.frame < 2 || s.frame > self.num_frames {
                return Err(Error::InvalidConfig(alloc::format!(
                    "switch frame {} outside [2, {}]",
                    s.frame,
                    self.num_frames
                )));
            }
            let valid = |id: u64| id >= 1 && id <= self.num_identities;
            if s.identity_a == s.identity_b || !valid(s.identity_a) || !valid(s.identity_b) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "switch identities ({}, {}) must be distinct and within 1..={}",
                    s.identity_a,
                    s.identity_b,
                    self.num_identities
                )));
            }
        }
        Ok(())
    }

    /// Wall-clock seconds of a 1-based frame index.
    pub fn time_of_frame(&self, frame: u64) -> f64 {
        (frame - 1) as f64 / self.fps
    }

    /// Fixed unit cluster centers, one per identity (index id-1), with
    /// pairwise cosine `1 - cluster_separation`: each center blends a
    /// shared axis with a private axis.
    pub fn cluster_centers(&self) -> Vec<EmbeddingVector> {
        let s = self.embedding_model.cluster_separation;
        let dim = self.embedding_model.dim;
        let shared = crate::math::sqrt(1.0 - s);
        let private = crate::math::sqrt(s);
        (0..self.num_identities as usize)
            .map(|i| {
                let mut values = alloc::vec![0.0; dim];
                values[0] = shared;
                values[i + 1] = private;
                EmbeddingVector::new(values, Precision::Half16).expect("nonzero by construction")
            })
            .collect()
    }
}

/// Generated scenario: the clean track set, the label-corrupted copy,
/// and the per-(frame, true identity) embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub ground_truth: TrackSet,
    pub corrupted: TrackSet,
    pub true_embeddings: BTreeMap<(u64, u64), EmbeddingVector>,
    /// Label-change events implied by the switch plan: two per applied
    /// pairwise swap. Equals the identity switches a tracking evaluation
    /// of (ground_truth, corrupted) reports.
    pub injected_switch_count: u64,
    /// Frame rate, carried so the harness can convert frame indices to
    /// bank timestamps.
    pub fps: f64,
}

struct Walker {
    x: f64,
    y: f64,
    heading: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Walker {
    fn advance(&mut self, speed: f64) {
        let dx = speed * crate::math::cos(self.heading);
        let dy = speed * crate::math::sin(self.heading);
        let (nx, flip_x) = reflect(self.x + dx, self.x_range);
        let (ny, flip_y) = reflect(self.y + dy, self.y_range);
        self.x = nx;
        self.y = ny;
        if flip_x {
            self.heading = core::f64::consts::PI - self.heading;
        }
        if flip_y {
            self.heading = -self.heading;
        }
    }
}

fn reflect(value: f64, (lo, hi): (f64, f64)) -> (f64, bool) {
    if value < lo {
        ((2.0 * lo - value).min(hi), true)
    } else if value > hi {
        ((2.0 * hi - value).max(lo), true)
    } else {
        (value, false)
    }
}

/// Deterministically generate a scenario from its config.
///
/// Identity `i` walks inside lane `i` (a horizontal band of the arena),
/// so boxes of distinct identities never overlap. The corrupted track
/// set carries the same boxes with labels permuted by the switch plan.
pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let k = cfg.num_identities;
    let (aw, ah) = cfg.arena;
    let (bw, bh) = cfg.box_size;
    let lane_height = ah / k as f64;

    let mut walkers: Vec<Walker> = (0..k)
        .map(|i| {
            let lane_top = i as f64 * lane_height;
            let x_range = (0.0, aw - bw);
            let y_range = (lane_top, lane_top + lane_height - bh);
            Walker {
                x: rng.next_range(x_range.0, x_range.1),
                y: rng.next_range(y_range.0, y_range.1),
                heading: rng.next_range(0.0, core::f64::consts::TAU),
                x_range,
                y_range,
            }
        })
        .collect();

    // Label permutation over the switch plan, applied in frame order.
    let mut plan = cfg.switch_plan.clone();
    plan.sort_by_key(|s| s.frame);
    let mut plan_cursor = 0;
    let mut label_of: Vec<u64> = (1..=k).collect();

    let mut gt_records = Vec::with_capacity((k * cfg.num_frames) as usize);
    let mut corrupted_records = Vec::with_capacity((k * cfg.num_frames) as usize);
    let mut injected_switch_count = 0_u64;

    for frame in 1..=cfg.num_frames {
        if frame > 1 {
            for walker in walkers.iter_mut() {
                if rng.next_f64() < cfg.motion.direction_change_prob {
                    walker.heading = rng.next_range(0.0, core::f64::consts::TAU);
                }
                walker.advance(cfg.motion.speed_px_per_frame);
            }
        }
        let previous_labels = label_of.clone();
        while plan_cursor < plan.len() && plan[plan_cursor].frame == frame {
            let s = plan[plan_cursor];
            label_of.swap((s.identity_a - 1) as usize, (s.identity_b - 1) as usize);
            plan_cursor += 1;
        }
        injected_switch_count += label_of
            .iter()
            .zip(&previous_labels)
            .filter(|(a, b)| a != b)
            .count() as u64;

        for (idx, walker) in walkers.iter().enumerate() {
            let identity = idx as u64 + 1;
            let bbox = BoundingBox::new(walker.x, walker.y, bw, bh)?;
            gt_records.push(TrackRecord::new(frame, identity, bbox, 1.0)?);
            corrupted_records.push(TrackRecord::new(frame, label_of[idx], bbox, 1.0)?);
        }
    }

    // Embeddings, drawn after motion in a fixed (frame, identity) order.
    let centers = cfg.cluster_centers();
    let sigma = cfg.embedding_model.noise_sigma;
    let mut true_embeddings = BTreeMap::new();
    for frame in 1..=cfg.num_frames {
        for (idx, center) in centers.iter().enumerate() {
            let identity = idx as u64 + 1;
            let embedding = if sigma > 0.0 {
                let mut values: Vec<f64> = center
                    .values
                    .iter()
                    .map(|c| c + sigma * rng.next_gaussian())
                    .collect();
                let norm = crate::math::sqrt(values.iter().map(|v| v * v).sum());
                if norm > 1e-12 {
                    for v in values.iter_mut() {
                        *v /= norm;
                    }
                } else {
                    values.copy_from_slice(&center.values);
                }
                EmbeddingVector::new(values, Precision::Half16)?
            } else {
                center.clone()
            };
            true_embeddings.insert((frame, identity), embedding);
        }
    }

    Ok(Scenario {
        ground_truth: TrackSet::from_records(gt_records)?,
        corrupted: TrackSet::from_records(corrupted_records)?,
        true_embeddings,
        injected_switch_count,
        fps: cfg.fps,
    })
}

/// Outcome of running the re-identification loop over one scenario.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HarnessReport {
    pub idsw_before: u64,
    pub idsw_after: u64,
    pub false_reinit_count: u64,
    pub corrected_switch_count: u64,
    pub events: Vec<ReidEvent>,
    pub mot_before: MotSummary,
    pub mot_after: MotSummary,
}

fn true_identity_of(gt: &TrackSet, frame: u64, bbox: &BoundingBox) -> Option<u64> {
    gt.at_frame(frame)
        .iter()
        .find(|r| r.bbox == *bbox)
        .map(|r| r.identity_id)
}

/// [`run_pipeline`] result extended with the corrected stream and the
/// final bank state, for callers that persist them.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub report: HarnessReport,
    pub corrected: TrackSet,
    pub banks: EmbeddingBanks,
}

/// Stream the corrupted records through the re-identification engine,
/// apply re-init directives as bijective relabelings from the event
/// frame onward, and evaluate tracking quality before and after.
///
/// Banks are seeded from the first `warmup_frames` frames' true
/// associations. A correction that maps label `l` onto identity `c`
/// swaps `c`'s previous holder onto `l`'s old identity, mirroring how a
/// re-prompt takes the identity over from whichever track held it; the
/// relabeling therefore stays a permutation and the corrected stream
/// remains one record per identity per frame.
pub fn run_pipeline(
    scenario: &Scenario,
    cfg: &ReidConfig,
    warmup_frames: u64,
) -> Result<HarnessReport> {
    Ok(run_pipeline_full(scenario, cfg, warmup_frames)?.report)
}

/// See [`run_pipeline`].
pub fn run_pipeline_full(
    scenario: &Scenario,
    cfg: &ReidConfig,
    warmup_frames: u64,
) -> Result<PipelineRun> {
    cfg.validate()?;
    let num_frames = scenario
        .ground_truth
        .frame_range()
        .map(|(_, hi)| hi)
        .unwrap_or(0);
    if warmup_frames == 0 || warmup_frames >= num_frames {
        return Err(Error::InvalidConfig(alloc::format!(
            "warmup_frames must be in [1, {}) for a {num_frames}-frame scenario",
            num_frames
        )));
    }
    let fps = scenario.fps;

    // Oracle warmup: each bank is seeded from its own identity's
    // embeddings over the warmup prefix.
    let mut banks = EmbeddingBanks::new();
    let identities: Vec<u64> = scenario
        .ground_truth
        .at_frame(1)
        .iter()
        .map(|r| r.identity_id)
        .collect();
    for &identity in &identities {
        let mut bank = EmbeddingBank::new(identity);
        for frame in 1..=warmup_frames {
            if let Some(embedding) = scenario.true_embeddings.get(&(frame, identity)) {
                bank.push(BankEntry::new(
                    (frame - 1) as f64 / fps,
                    embedding.clone(),
                    BankEntry::uniform_histogram(),
                )?)?;
            }
        }
        banks.insert(bank);
    }

    // Claimed label -> effective label, maintained as a permutation.
    let mut relabel: BTreeMap<u64, u64> = identities.iter().map(|&i| (i, i)).collect();
    let mut corrected_records: Vec<TrackRecord> = Vec::with_capacity(scenario.corrupted.len());
    let mut events: Vec<ReidEvent> = Vec::new();
    let mut false_reinit_count = 0_u64;
    let mut corrected_switch_count = 0_u64;

    for record in scenario.corrupted.records() {
        if record.frame_index <= warmup_frames {
            corrected_records.push(*record);
            continue;
        }
        let frame = record.frame_index;
        let claimed = *relabel
            .get(&record.identity_id)
            .unwrap_or(&record.identity_id);
        let true_id =
            true_identity_of(&scenario.ground_truth, frame, &record.bbox).ok_or_else(|| {
                Error::InvalidConfig("corrupted box missing from ground truth".into())
            })?;
        let e_cur = scenario
            .true_embeddings
            .get(&(frame, true_id))
            .ok_or_else(|| Error::InvalidConfig("missing embedding for observation".into()))?;
        let out = process_observation(
            &mut banks,
            claimed,
            e_cur,
            frame,
            (frame - 1) as f64 / fps,
            Some(record.bbox),
            BankEntry::uniform_histogram(),
            cfg,
        )?;
        if let Some(event) = out.event {
            if event.corrected_id == true_id {
                corrected_switch_count += 1;
            } else {
                false_reinit_count += 1;
            }
            events.push(event);
            // Transpose the permutation: the raw label now maps to the
            // corrected identity; the label that held it inherits ours.
            let corrected = event.corrected_id;
            let displaced = relabel
                .iter()
                .find(|(_, &v)| v == corrected)
                .map(|(&k, _)| k);
            if let Some(other_raw) = displaced {
                relabel.insert(other_raw, claimed);
            }
            relabel.insert(record.identity_id, corrected);
        }
        corrected_records.push(TrackRecord {
            identity_id: out.effective_id,
            ..*record
        });
    }

    let corrected = TrackSet::from_records(corrected_records)?;
    let mot_config = MotConfig::default();
    let mot_before = evaluate_sequence(&scenario.ground_truth, &scenario.corrupted, &mot_config)?;
    let mot_after = evaluate_sequence(&scenario.ground_truth, &corrected, &mot_config)?;
    let report = HarnessReport {
        idsw_before: mot_before.id_switches,
        idsw_after: mot_after.id_switches,
        false_reinit_count,
        corrected_switch_count,
        events,
        mot_before,
        mot_after,
    };
    Ok(PipelineRun {
        report,
        corrected,
        banks,
    })
}

/// One grid point of a sensitivity sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub tau_low: f64,
    pub tau_high: f64,
    pub cadence_s: f64,
    pub report: HarnessReport,
}

/// Cartesian sweep axes; an empty axis keeps the base config's value.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepGrid {
    pub tau_low: Vec<f64>,
    pub tau_high: Vec<f64>,
    pub cadence_s: Vec<f64>,
}

/// Run one deterministic pipeline per grid point over a single shared
/// scenario (one generation, shared seed).
pub fn sensitivity_sweep(
    cfg: &ScenarioConfig,
    base: &ReidConfig,
    grid: &SweepGrid,
    warmup_frames: u64,
) -> Result<Vec<SweepPoint>> {
    let scenario = generate(cfg)?;
    let lows = if grid.tau_low.is_empty() {
        alloc::vec![base.tau_low]
    } else {
        grid.tau_low.clone()
    };
    let highs = if grid.tau_high.is_empty() {
        alloc::vec![base.tau_high]
    } else {
        grid.tau_high.clone()
    };
    let cadences = if grid.cadence_s.is_empty() {
        alloc::vec![base.cadence_s]
    } else {
        grid.cadence_s.clone()
    };
    let mut out = Vec::with_capacity(lows.len() * highs.len() * cadences.len());
    for &tau_low in &lows {
        for &tau_high in &highs {
            for &cadence_s in &cadences {
                let point_cfg = ReidConfig {
                    tau_low,
                    tau_high,
                    cadence_s,
                    alpha: base.alpha,
                };
                point_cfg.validate()?;
                let report = run_pipeline(&scenario, &point_cfg, warmup_frames)?;
                out.push(SweepPoint {
                    tau_low,
                    tau_high,
                    cadence_s,
                    report,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless_config(switches: Vec<SwitchSpec>) -> ScenarioConfig {
        ScenarioConfig {
            num_frames: 100,
            switch_plan: switches,
            embedding_model: EmbeddingModel {
                dim: 16,
                cluster_separation: 0.6,
                noise_sigma: 0.0,
            },
            seed: 7,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn empty_switch_plan_corrupted_equals_ground_truth() {
        let scenario = generate(&noiseless_config(Vec::new())).unwrap();
        assert_eq!(scenario.ground_truth, scenario.corrupted);
        assert_eq!(scenario.injected_switch_count, 0);
    }

    #[test]
    fn same_seed_bit_identical_scenarios() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 51,
            identity_a: 1,
            identity_b: 2
        }]);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(generate(&other).unwrap().ground_truth, a.ground_truth);
    }

    #[test]
    fn injected_switches_match_tracking_evaluation() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 50,
            identity_a: 1,
            identity_b: 2
        }]);
        let scenario = generate(&cfg).unwrap();
        assert_eq!(scenario.injected_switch_count, 2);
        let summary = evaluate_sequence(
            &scenario.ground_truth,
            &scenario.corrupted,
            &MotConfig::default(),
        )
        .unwrap();
        assert_eq!(summary.id_switches, 2);
    }

    #[test]
    fn boxes_stay_inside_arena_and_lanes_disjoint() {
        let cfg = ScenarioConfig {
            num_frames: 300,
            seed: 33,
            ..ScenarioConfig::default()
        };
        let scenario = generate(&cfg).unwrap();
        let (aw, ah) = cfg.arena;
        for r in scenario.ground_truth.records() {
            assert!(r.bbox.x_left >= 0.0 && r.bbox.x_right() <= aw + 1e-9);
            assert!(r.bbox.y_top >= 0.0 && r.bbox.y_bottom() <= ah + 1e-9);
        }
        // Cross-identity IoU is always zero under the lane layout.
        for frame in [1, 150, 300] {
            let records = scenario.ground_truth.at_frame(frame);
            for a in records {
                for b in records {
                    if a.identity_id != b.identity_id {
                        assert_eq!(crate::geometry::iou(&a.bbox, &b.bbox), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn overcrowded_arena_rejected() {
        let cfg = ScenarioConfig {
            arena: (100.0, 100.0),
            box_size: (60.0, 60.0),
            ..ScenarioConfig::default()
        };
        assert!(matches!(generate(&cfg), Err(Error::OvercrowdedArena(_))));
    }

    #[test]
    fn switch_plan_validation() {
        let bad_frame = ScenarioConfig {
            switch_plan: alloc::vec![SwitchSpec {
                frame: 1,
                identity_a: 1,
                identity_b: 2
            }],
            ..ScenarioConfig::default()
        };
        assert!(bad_frame.validate().is_err());
        let same_identity = ScenarioConfig {
            switch_plan: alloc::vec![SwitchSpec {
                frame: 5,
                identity_a: 3,
                identity_b: 3
            }],
            ..ScenarioConfig::default()
        };
        assert!(same_identity.validate().is_err());
    }

    #[test]
    fn cluster_centers_have_requested_separation() {
        let cfg = noiseless_config(Vec::new());
        let centers = cfg.cluster_centers();
        for (i, a) in centers.iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-12);
            for b in centers.iter().skip(i + 1) {
                let cos = crate::reid::cosine_sim(a, b).unwrap();
                assert!((cos - 0.4).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_single_swap_is_fully_corrected() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 51,
            identity_a: 1,
            identity_b: 2
        }]);
        let scenario = generate(&cfg).unwrap();
        let report = run_pipeline(&scenario, &ReidConfig::default(), 5).unwrap();
        assert_eq!(report.idsw_before, 2);
        assert_eq!(report.idsw_after, 0);
        assert_eq!(report.corrected_switch_count, 1);
        assert_eq!(report.false_reinit_count, 0);
        assert_eq!(report.mot_after.idf1, 1.0);
        assert_eq!(report.mot_after.mota, 1.0);
        assert!(report.idsw_after <= report.idsw_before + report.false_reinit_count);
    }

    #[test]
    fn clean_noisy_scenario_produces_no_false_reinits() {
        let cfg = ScenarioConfig {
            num_frames: 100,
            embedding_model: EmbeddingModel {
                dim: 16,
                cluster_separation: 0.6,
                noise_sigma: 0.05,
            },
            seed: 11,
            ..ScenarioConfig::default()
        };
        let scenario = generate(&cfg).unwrap();
        let report = run_pipeline(&scenario, &ReidConfig::default(), 5).unwrap();
        assert_eq!(report.false_reinit_count, 0);
        assert_eq!(report.mot_after, report.mot_before);
    }

    #[test]
    fn unreachable_tau_high_disables_correction() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 51,
            identity_a: 1,
            identity_b: 2
        }]);
        let scenario = generate(&cfg).unwrap();
        let cfg_off = ReidConfig {
            tau_high: 1.01,
            ..ReidConfig::default()
        };
        let report = run_pipeline(&scenario, &cfg_off, 5).unwrap();
        assert!(report.events.is_empty());
        assert_eq!(report.idsw_after, report.idsw_before);
    }

    #[test]
    fn determinism_of_reports() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 40,
            identity_a: 3,
            identity_b: 7
        }]);
        let a = run_pipeline(&generate(&cfg).unwrap(), &ReidConfig::default(), 5).unwrap();
        let b = run_pipeline(&generate(&cfg).unwrap(), &ReidConfig::default(), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_point_sweep_equals_run_pipeline() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 51,
            identity_a: 1,
            identity_b: 2
        }]);
        let base = ReidConfig::default();
        let sweep = sensitivity_sweep(&cfg, &base, &SweepGrid::default(), 5).unwrap();
        assert_eq!(sweep.len(), 1);
        let direct = run_pipeline(&generate(&cfg).unwrap(), &base, 5).unwrap();
        assert_eq!(sweep[0].report, direct);
    }

    #[test]
    fn rising_tau_high_never_corrects_more() {
        let cfg = noiseless_config(alloc::vec![SwitchSpec {
            frame: 51,
            identity_a: 1,
            identity_b: 2
        }]);
        let grid = SweepGrid {
            tau_high: alloc::vec![0.8, 0.95, 1.01],
            ..SweepGrid::default()
        };
        let sweep = sensitivity_sweep(&cfg, &ReidConfig::default(), &grid, 5).unwrap();
        let corrected: Vec<u64> = sweep
            .iter()
            .map(|p| p.report.corrected_switch_count)
            .collect();
        assert!(corrected.windows(2).all(|w| w[0] >= w[1]), "{corrected:?}");
        assert_eq!(*corrected.last().unwrap(), 0);
    }

    #[test]
    fn no_switch_grid_never_false_reinits() {
        let cfg = ScenarioConfig {
            num_frames: 60,
            embedding_model: EmbeddingModel {
                dim: 16,
                cluster_separation: 0.6,
                noise_sigma: 0.03,
            },
            seed: 21,
            ..ScenarioConfig::default()
        };
        let grid = SweepGrid {
            tau_low: alloc::vec![0.55, 0.65],
            tau_high: alloc::vec![0.78, 0.9],
            ..SweepGrid::default()
        };
        let sweep = sensitivity_sweep(&cfg, &ReidConfig::default(), &grid, 5).unwrap();
        assert_eq!(sweep.len(), 4);
        assert!(sweep.iter().all(|p| p.report.false_reinit_count == 0));
        assert!(sweep
            .iter()
            .all(|p| p.report.idsw_after <= p.report.idsw_before + p.report.false_reinit_count));
    }

    #[test]
    fn invalid_grid_point_rejected() {
        let cfg = noiseless_config(Vec::new());
        let grid = SweepGrid {
            tau_low: alloc::vec![0.9],
            tau_high: alloc::vec![0.8],
            ..Default::default()
        };
        assert!(sensitivity_sweep(&cfg, &ReidConfig::default(), &grid, 5).is_err());
    }
}
