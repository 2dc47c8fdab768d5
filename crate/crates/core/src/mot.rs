//! CLEAR-MOT accumulation and identity-level metrics over paired
//! ground-truth and predicted track sets.
//!
//! Frame accumulation follows the standard CLEAR procedure: matches from
//! the previous frames are carried over while they remain inside the IoU
//! gate, the remainder is matched by minimum-cost assignment, and the
//! per-frame events (misses, false positives, identity switches,
//! fragmentations, matched distances) are accumulated. Identity metrics
//! (IDF1/IDP/IDR) come from a single trajectory-to-trajectory assignment
//! over the whole sequence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::assignment::{solve_min_cost, CostMatrix};
use crate::error::{Error, Result};
use crate::geometry::{iou, BoundingBox, DistanceMode};

/// One observation: a box for an identity at a frame. Frames are
/// 1-based. Confidence is carried but not used for filtering.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackRecord {
    pub frame_index: u64,
    pub identity_id: u64,
    pub bbox: BoundingBox,
    pub confidence: f64,
}

impl TrackRecord {
    pub fn new(
        frame_index: u64,
        identity_id: u64,
        bbox: BoundingBox,
        confidence: f64,
    ) -> Result<Self> {
        if frame_index == 0 {
            return Err(Error::InvalidConfig(
                "frame_index is 1-based and must be >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidConfig(alloc::format!(
                "confidence must be in [0, 1], got {confidence}"
            )));
        }
        Ok(Self {
            frame_index,
            identity_id,
            bbox,
            confidence,
        })
    }
}

/// A sequence of records sorted by (frame, identity), with at most one
/// record per (frame, identity) pair.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackSet {
    records: Vec<TrackRecord>,
}

impl TrackSet {
    pub fn from_records(mut records: Vec<TrackRecord>) -> Result<Self> {
        records.sort_by_key(|r| (r.frame_index, r.identity_id));
        for pair in records.windows(2) {
            if pair[0].frame_index == pair[1].frame_index
                && pair[0].identity_id == pair[1].identity_id
            {
                return Err(Error::DuplicateRecord {
                    frame: pair[0].frame_index,
                    identity: pair[0].identity_id,
                });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[TrackRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn frame_range(&self) -> Option<(u64, u64)> {
        match (self.records.first(), self.records.last()) {
            (Some(first), Some(last)) => Some((first.frame_index, last.frame_index)),
            _ => None,
        }
    }

    /// Distinct frame indices, ascending.
    pub fn frames(&self) -> Vec<u64> {
        let mut frames: Vec<u64> = self.records.iter().map(|r| r.frame_index).collect();
        frames.dedup();
        frames
    }

    /// Records at one frame, as a sub-slice of the sorted records.
    pub fn at_frame(&self, frame: u64) -> &[TrackRecord] {
        let start = self.records.partition_point(|r| r.frame_index < frame);
        let end = self.records.partition_point(|r| r.frame_index <= frame);
        &self.records[start..end]
    }

    /// Per-identity trajectory view: identity -> frame -> box.
    fn trajectories(&self) -> BTreeMap<u64, BTreeMap<u64, BoundingBox>> {
        let mut out: BTreeMap<u64, BTreeMap<u64, BoundingBox>> = BTreeMap::new();
        for r in &self.records {
            out.entry(r.identity_id)
                .or_default()
                .insert(r.frame_index, r.bbox);
        }
        out
    }
}

/// Evaluation parameters shared by the accumulator and the sequence
/// entry point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MotConfig {
    pub iou_gate: f64,
    pub distance_mode: DistanceMode,
    pub mt_threshold: f64,
    pub ml_threshold: f64,
}

impl Default for MotConfig {
    fn default() -> Self {
        Self {
            iou_gate: 0.5,
            distance_mode: DistanceMode::Center,
            mt_threshold: 0.8,
            ml_threshold: 0.2,
        }
    }
}

impl MotConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_gate > 0.0 && self.iou_gate <= 1.0) {
            return Err(Error::InvalidConfig("iou_gate must be in (0, 1]".into()));
        }
        if !(self.ml_threshold >= 0.0
            && self.ml_threshold < self.mt_threshold
            && self.mt_threshold <= 1.0)
        {
            return Err(Error::InvalidConfig(
                "need 0 <= ml_threshold < mt_threshold <= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Coverage {
    frames_present: u64,
    frames_tracked: u64,
    ever_tracked: bool,
    tracked_at_last_presence: bool,
}

/// Streaming CLEAR-MOT accumulator. Feed frames in ascending order via
/// [`MotAccumulator::accumulate_frame`], then call
/// [`MotAccumulator::summarize`].
#[derive(Debug, Clone, PartialEq)]
pub struct MotAccumulator {
    config: MotConfig,
    /// Last matched prediction per ground-truth identity; persists over
    /// gaps so both carry-over matching and switch detection compare
    /// against the most recent match.
    last_match: BTreeMap<u64, u64>,
    pub(crate) false_positives: u64,
    pub(crate) misses: u64,
    pub(crate) id_switches: u64,
    pub(crate) fragmentations: u64,
    pub(crate) total_gt: u64,
    pub(crate) matched_distance_sum: f64,
    pub(crate) matched_count: u64,
    coverage: BTreeMap<u64, Coverage>,
}

impl MotAccumulator {
    pub fn new(config: MotConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            last_match: BTreeMap::new(),
            false_positives: 0,
            misses: 0,
            id_switches: 0,
            fragmentations: 0,
            total_gt: 0,
            matched_distance_sum: 0.0,
            matched_count: 0,
            coverage: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> &MotConfig {
        &self.config
    }

    /// Accumulate one frame of ground truth and predictions. All records
    /// in both slices must share one frame index.
    pub fn accumulate_frame(&mut self, gt: &[TrackRecord], pred: &[TrackRecord]) -> Result<()> {
        let frame = match gt.first().or_else(|| pred.first()) {
            Some(r) => r.frame_index,
            None => return Ok(()),
        };
        for r in gt.iter().chain(pred) {
            if r.frame_index != frame {
                return Err(Error::MixedFrameIndices {
                    expected: frame,
                    got: r.frame_index,
                });
            }
        }
        check_unique_identities(gt)?;
        check_unique_identities(pred)?;

        self.total_gt += gt.len() as u64;
        let pred_by_id: BTreeMap<u64, &TrackRecord> =
            pred.iter().map(|r| (r.identity_id, r)).collect();

        // Phase 1: keep still-gated matches from the last known
        // correspondence. Each prediction can be claimed once; ground
        // truth is visited in ascending identity order.
        let mut claimed_preds: BTreeSet<u64> = BTreeSet::new();
        let mut matches: Vec<(&TrackRecord, &TrackRecord)> = Vec::new();
        let mut open_gt: Vec<&TrackRecord> = Vec::new();
        for g in gt {
            let carried = self
                .last_match
                .get(&g.identity_id)
                .and_then(|pred_id| {
                    pred_by_id.get(pred_id).filter(|p| {
                        !claimed_preds.contains(pred_id)
                            && iou(&g.bbox, &p.bbox) >= self.config.iou_gate
                    })
                })
                .copied();
            match carried {
                Some(p) => {
                    claimed_preds.insert(p.identity_id);
                    matches.push((g, p));
                }
                None => open_gt.push(g),
            }
        }

        // Phase 2: minimum-cost assignment over the remainder, with
        // out-of-gate pairs forbidden.
        let open_pred: Vec<&TrackRecord> = pred
            .iter()
            .filter(|p| !claimed_preds.contains(&p.identity_id))
            .collect();
        if !open_gt.is_empty() && !open_pred.is_empty() {
            let mut costs = CostMatrix::filled_forbidden(open_gt.len(), open_pred.len());
            for (i, g) in open_gt.iter().enumerate() {
                for (j, p) in open_pred.iter().enumerate() {
                    if iou(&g.bbox, &p.bbox) >= self.config.iou_gate {
                        costs.set(i, j, self.config.distance_mode.distance(&g.bbox, &p.bbox));
                    }
                }
            }
            let solution = solve_min_cost(&costs);
            let mut assigned_gt: BTreeSet<usize> = BTreeSet::new();
            for &(i, j) in &solution.pairs {
                assigned_gt.insert(i);
                matches.push((open_gt[i], open_pred[j]));
            }
            let unmatched_gt = open_gt.len() - assigned_gt.len();
            self.misses += unmatched_gt as u64;
            self.false_positives += (open_pred.len() - solution.pairs.len()) as u64;
            for (i, g) in open_gt.iter().enumerate() {
                if !assigned_gt.contains(&i) {
                    self.note_presence(g.identity_id, false);
                }
            }
        } else {
            self.misses += open_gt.len() as u64;
            self.false_positives += open_pred.len() as u64;
            for g in &open_gt {
                self.note_presence(g.identity_id, false);
            }
        }

        // Bookkeeping over this frame's matches.
        for (g, p) in matches {
            if let Some(&prev) = self.last_match.get(&g.identity_id) {
                if prev != p.identity_id {
                    self.id_switches += 1;
                }
            }
            self.last_match.insert(g.identity_id, p.identity_id);
            self.matched_distance_sum += self.config.distance_mode.distance(&g.bbox, &p.bbox);
            self.matched_count += 1;
            self.note_presence(g.identity_id, true);
        }
        Ok(())
    }

    fn note_presence(&mut self, gt_identity: u64, tracked: bool) {
        let cov = self.coverage.entry(gt_identity).or_default();
        cov.frames_present += 1;
        if tracked {
            if cov.ever_tracked && !cov.tracked_at_last_presence {
                self.fragmentations += 1;
            }
            cov.frames_tracked += 1;
            cov.ever_tracked = true;
        }
        cov.tracked_at_last_presence = tracked;
    }

    /// Summary over everything accumulated so far. Identity-level fields
    /// are filled from `id_metrics` when provided (as
    /// [`evaluate_sequence`] does) and are zero otherwise.
    pub fn summarize(&self, id_metrics: Option<&IdMetrics>) -> Result<MotSummary> {
        if self.total_gt == 0 {
            return Err(Error::EmptyGroundTruth);
        }
        let gt = self.total_gt as f64;
        let mota = 1.0 - (self.misses + self.false_positives + self.id_switches) as f64 / gt;
        let motp = if self.matched_count > 0 {
            self.matched_distance_sum / self.matched_count as f64
        } else {
            0.0
        };
        let detections = self.matched_count + self.false_positives;
        let precision = if detections > 0 {
            self.matched_count as f64 / detections as f64
        } else {
            0.0
        };
        let recall = self.matched_count as f64 / gt;

        let mut mostly_tracked = 0;
        let mut partially_tracked = 0;
        let mut mostly_lost = 0;
        for cov in self.coverage.values() {
            let ratio = cov.frames_tracked as f64 / cov.frames_present as f64;
            if ratio >= self.config.mt_threshold {
                mostly_tracked += 1;
            } else if ratio <= self.config.ml_threshold {
                mostly_lost += 1;
            } else {
                partially_tracked += 1;
            }
        }

        let id = id_metrics.copied().unwrap_or(IdMetrics {
            idf1: 0.0,
            idp: 0.0,
            idr: 0.0,
            idtp: 0,
            idfp: 0,
            idfn: 0,
        });
        Ok(MotSummary {
            mota,
            motp,
            idf1: id.idf1,
            idp: id.idp,
            idr: id.idr,
            precision,
            recall,
            mostly_tracked,
            partially_tracked,
            mostly_lost,
            id_switches: self.id_switches,
            fragmentations: self.fragmentations,
            false_positives: self.false_positives,
            misses: self.misses,
            matched_count: self.matched_count,
            total_gt: self.total_gt,
        })
    }
}

fn check_unique_identities(records: &[TrackRecord]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in records {
        if !seen.insert(r.identity_id) {
            return Err(Error::DuplicateRecord {
                frame: r.frame_index,
                identity: r.identity_id,
            });
        }
    }
    Ok(())
}

/// Identity-level counts from the global trajectory assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdMetrics {
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub idtp: u64,
    pub idfp: u64,
    pub idfn: u64,
}

/// Global trajectory-to-trajectory metrics.
///
/// Trajectory pair cost is the number of frames not jointly covered
/// under the IoU gate; the assignment also lets any trajectory stay
/// unmatched at the cost of its own length, so the optimum maximizes
/// the total gated frame overlap. IDTP is that overlap; IDFP and IDFN
/// are the leftover prediction and ground-truth boxes.
pub fn id_metrics(gt: &TrackSet, pred: &TrackSet, iou_gate: f64) -> Result<IdMetrics> {
    if gt.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let gt_traj = gt.trajectories();
    let pred_traj = pred.trajectories();
    let gt_ids: Vec<u64> = gt_traj.keys().copied().collect();
    let pred_ids: Vec<u64> = pred_traj.keys().copied().collect();
    let n_gt = gt_ids.len();
    let n_pred = pred_ids.len();

    let mut overlaps = alloc::vec![alloc::vec![0_u64; n_pred]; n_gt];
    for (i, gid) in gt_ids.iter().enumerate() {
        let g = &gt_traj[gid];
        for (j, pid) in pred_ids.iter().enumerate() {
            let p = &pred_traj[pid];
            let mut shared = 0;
            for (frame, gbox) in g {
                if let Some(pbox) = p.get(frame) {
                    if iou(gbox, pbox) >= iou_gate {
                        shared += 1;
                    }
                }
            }
            overlaps[i][j] = shared;
        }
    }

    // Padded square problem: real-vs-real costs len_g + len_p - 2*overlap,
    // diagonal dummies price leaving a trajectory unmatched at its length.
    let n = n_gt + n_pred;
    let mut costs = CostMatrix::filled_forbidden(n, n);
    let gt_lens: Vec<u64> = gt_ids.iter().map(|id| gt_traj[id].len() as u64).collect();
    let pred_lens: Vec<u64> = pred_ids
        .iter()
        .map(|id| pred_traj[id].len() as u64)
        .collect();
    for i in 0..n_gt {
        for j in 0..n_pred {
            let cost = gt_lens[i] + pred_lens[j] - 2 * overlaps[i][j];
            costs.set(i, j, cost as f64);
        }
        costs.set(i, n_pred + i, gt_lens[i] as f64);
    }
    for (j, len) in pred_lens.iter().enumerate() {
        costs.set(n_gt + j, j, *len as f64);
    }
    for i in n_gt..n {
        for j in n_pred..n {
            costs.set(i, j, 0.0);
        }
    }

    let solution = solve_min_cost(&costs);
    let mut idtp = 0_u64;
    for &(i, j) in &solution.pairs {
        if i < n_gt && j < n_pred {
            idtp += overlaps[i][j];
        }
    }
    let total_gt = gt.len() as u64;
    let total_pred = pred.len() as u64;
    let idfp = total_pred - idtp;
    let idfn = total_gt - idtp;
    let denom = 2 * idtp + idfp + idfn;
    let idf1 = if denom > 0 {
        (2 * idtp) as f64 / denom as f64
    } else {
        0.0
    };
    let idp = if total_pred > 0 {
        idtp as f64 / total_pred as f64
    } else {
        0.0
    };
    let idr = idtp as f64 / total_gt as f64;
    Ok(IdMetrics {
        idf1,
        idp,
        idr,
        idtp,
        idfp,
        idfn,
    })
}

/// Per-sequence summary combining CLEAR-MOT and identity metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MotSummary {
    pub mota: f64,
    /// Mean matched distance (pixels under center distance).
    pub motp: f64,
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub precision: f64,
    pub recall: f64,
    pub mostly_tracked: u64,
    pub partially_tracked: u64,
    pub mostly_lost: u64,
    pub id_switches: u64,
    pub fragmentations: u64,
    pub false_positives: u64,
    pub misses: u64,
    pub matched_count: u64,
    pub total_gt: u64,
}

/// Run the accumulator over every frame of the pair, then merge the
/// CLEAR summary with the identity metrics.
pub fn evaluate_sequence(gt: &TrackSet, pred: &TrackSet, config: &MotConfig) -> Result<MotSummary> {
    config.validate()?;
    let mut accumulator = MotAccumulator::new(*config)?;
    let frames: BTreeSet<u64> = gt.frames().into_iter().chain(pred.frames()).collect();
    for frame in frames {
        accumulator.accumulate_frame(gt.at_frame(frame), pred.at_frame(frame))?;
    }
    let id = id_metrics(gt, pred, config.iou_gate)?;
    accumulator.summarize(Some(&id))
}
