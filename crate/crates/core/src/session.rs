//! Tracker-session memory model with sliding-window pruning.
//!
//! A session caches one conditioning output per tracked object plus one
//! output per processed frame per object. Unpruned, the footprint grows
//! linearly with stream length; the pruning routine keeps only the most
//! recent `keep_last` non-conditioning entries per object and runs every
//! `interval` frames. Byte sizes are modelled, not measured, and use
//! decimal units (MB = 10^6 B).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sliding-window pruning parameters. `enabled = false` models the
/// default session behaviour of retaining every output.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PruneConfig {
    pub keep_last: usize,
    pub interval: u64,
    pub enabled: bool,
}

impl Default for PruneConfig {
    fn default() -> Self {
        Self {
            keep_last: 8,
            interval: 25,
            enabled: true,
        }
    }
}

impl PruneConfig {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// Cached outputs for one tracked object: a fixed conditioning entry and
/// frame-indexed non-conditioning entries.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectCache {
    pub cond_frame_bytes: u64,
    pub non_cond_outputs: BTreeMap<u64, u64>,
}

impl ObjectCache {
    pub fn new(cond_frame_bytes: u64) -> Self {
        Self {
            cond_frame_bytes,
            non_cond_outputs: BTreeMap::new(),
        }
    }

    pub fn bytes(&self) -> u64 {
        self.cond_frame_bytes + self.non_cond_outputs.values().sum::<u64>()
    }
}

/// What a prune pass did: entries dropped per pass, plus a marker for
/// the allocator cache clear that real sessions issue (a no-op here).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PruneEvent {
    pub frame: u64,
    pub evicted_entries: u64,
    pub cache_clear_marker: bool,
}

/// Streaming tracker session over a set of object caches.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SessionState {
    pub objects: BTreeMap<u64, ObjectCache>,
    pub frames_processed: u64,
    pub prune_config: PruneConfig,
    pub prune_events: Vec<PruneEvent>,
    last_frame_index: Option<u64>,
}

impl SessionState {
    pub fn new(prune_config: PruneConfig) -> Self {
        Self {
            objects: BTreeMap::new(),
            frames_processed: 0,
            prune_config,
            prune_events: Vec::new(),
            last_frame_index: None,
        }
    }

    /// Register a tracked object with its conditioning-frame cost.
    pub fn add_object(&mut self, object_id: u64, cond_frame_bytes: u64) {
        self.objects
            .insert(object_id, ObjectCache::new(cond_frame_bytes));
    }

    /// Append one non-conditioning entry of `per_object_bytes` to every
    /// object for `frame_index`, then prune if the configured interval
    /// elapsed. Frame indices must be strictly increasing.
    pub fn step(&mut self, frame_index: u64, per_object_bytes: u64) -> Result<()> {
        if let Some(last) = self.last_frame_index {
            if frame_index <= last {
                return Err(Error::NonMonotonicFrame {
                    last,
                    got: frame_index,
                });
            }
        }
        self.last_frame_index = Some(frame_index);
        for cache in self.objects.values_mut() {
            cache.non_cond_outputs.insert(frame_index, per_object_bytes);
        }
        self.frames_processed += 1;
        if self.prune_config.enabled
            && self
                .frames_processed
                .is_multiple_of(self.prune_config.interval)
        {
            self.prune();
        }
        Ok(())
    }

    /// Drop all but the `keep_last` most recent non-conditioning entries
    /// of every object. Conditioning entries are never touched.
    /// Idempotent.
    pub fn prune(&mut self) -> PruneEvent {
        let keep = self.prune_config.keep_last;
        let mut evicted = 0_u64;
        for cache in self.objects.values_mut() {
            while cache.non_cond_outputs.len() > keep {
                let oldest = *cache
                    .non_cond_outputs
                    .keys()
                    .next()
                    .expect("len > keep >= 0");
                cache.non_cond_outputs.remove(&oldest);
                evicted += 1;
            }
        }
        let event = PruneEvent {
            frame: self.last_frame_index.unwrap_or(0),
            evicted_entries: evicted,
            cache_clear_marker: true,
        };
        self.prune_events.push(event);
        event
    }

    /// Total modelled footprint: conditioning plus non-conditioning
    /// bytes over all objects.
    pub fn memory_bytes(&self) -> u64 {
        self.objects.values().map(ObjectCache::bytes).sum()
    }
}

/// Linear growth model parameters. Memory figures are decimal
/// (MB = 10^6 B, GB = 10^9 B).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MemoryModelParams {
    pub per_frame_per_object_mb: f64,
    pub base_mb: f64,
    pub num_objects: u64,
    pub fps: f64,
    pub budget_gb: f64,
}

impl Default for MemoryModelParams {
    fn default() -> Self {
        Self {
            per_frame_per_object_mb: 5.6,
            base_mb: 0.0,
            num_objects: 8,
            fps: 30.0,
            budget_gb: 16.0,
        }
    }
}

impl MemoryModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = self.per_frame_per_object_mb > 0.0
            && self.base_mb >= 0.0
            && self.num_objects > 0
            && self.fps > 0.0
            && self.budget_gb > 0.0;
        if !positive {
            return Err(Error::InvalidConfig(
                "memory model parameters must be positive (base may be zero)".into(),
            ));
        }
        Ok(())
    }

    pub fn entry_bytes(&self) -> u64 {
        (self.per_frame_per_object_mb * 1e6) as u64
    }

    pub fn base_bytes(&self) -> u64 {
        (self.base_mb * 1e6) as u64
    }

    pub fn budget_bytes(&self) -> u64 {
        (self.budget_gb * 1e9) as u64
    }
}

/// One point of a memory trace: footprint after processing `frame`.
pub type TracePoint = (u64, u64);

/// Drive a session over `frames` constant-size entries and record the
/// footprint after every step (base bytes included).
pub fn simulate_stream(
    params: &MemoryModelParams,
    frames: u64,
    prune_enabled: bool,
) -> Result<Vec<TracePoint>> {
    let config = PruneConfig {
        enabled: prune_enabled,
        ..PruneConfig::default()
    };
    simulate_stream_with(params, frames, &config)
}

/// [`simulate_stream`] with explicit pruning parameters.
pub fn simulate_stream_with(
    params: &MemoryModelParams,
    frames: u64,
    config: &PruneConfig,
) -> Result<Vec<TracePoint>> {
    params.validate()?;
    if frames == 0 {
        return Err(Error::InvalidConfig(
            "simulate_stream needs frames >= 1".into(),
        ));
    }
    if config.keep_last == 0 || config.interval == 0 {
        return Err(Error::InvalidConfig(
            "keep_last and interval must be >= 1".into(),
        ));
    }
    let mut session = SessionState::new(*config);
    for id in 0..params.num_objects {
        // Conditioning cost is folded into the base term of the model.
        session.add_object(id, 0);
    }
    let entry = params.entry_bytes();
    let base = params.base_bytes();
    let mut trace = Vec::with_capacity(frames as usize);
    for frame in 1..=frames {
        session.step(frame, entry)?;
        trace.push((frame, base + session.memory_bytes()));
    }
    Ok(trace)
}

/// Closed-form ceiling for a pruned trace from [`simulate_stream`]:
/// base + objects x (keep_last + interval) x entry size.
pub fn pruned_trace_bound(params: &MemoryModelParams, config: &PruneConfig) -> u64 {
    params.base_bytes()
        + params.num_objects * (config.keep_last as u64 + config.interval) * params.entry_bytes()
}

/// Seconds until the unpruned linear model exhausts the budget:
/// (budget - base) / (entry x objects x fps). Zero when the budget is
/// already spent.
pub fn time_to_budget(params: &MemoryModelParams) -> Result<f64> {
    params.validate()?;
    let headroom = params.budget_gb * 1e9 - params.base_mb * 1e6;
    if headroom <= 0.0 {
        return Ok(0.0);
    }
    let growth_per_second =
        params.per_frame_per_object_mb * 1e6 * params.num_objects as f64 * params.fps;
    Ok(headroom / growth_per_second)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_object_session(config: PruneConfig) -> SessionState {
        let mut s = SessionState::new(config);
        s.add_object(1, 0);
        s
    }

    #[test]
    fn unpruned_cache_retains_everything() {
        let mut s = single_object_session(PruneConfig::disabled());
        for f in 1..=10 {
            s.step(f, 100).unwrap();
        }
        assert_eq!(s.objects[&1].non_cond_outputs.len(), 10);
        assert_eq!(s.memory_bytes(), 1000);
    }

    #[test]
    fn pruned_caches_bounded_after_first_interval() {
        let mut s = SessionState::new(PruneConfig::default());
        for id in 0..8 {
            s.add_object(id, 0);
        }
        for f in 1..=60 {
            s.step(f, 100).unwrap();
            if f % 25 == 0 {
                // At every interval boundary the caches are back to the
                // window size.
                for cache in s.objects.values() {
                    assert_eq!(cache.non_cond_outputs.len(), 8);
                }
            }
            if f >= 25 {
                for cache in s.objects.values() {
                    assert!(cache.non_cond_outputs.len() <= 8 + 25);
                }
            }
        }
        // Last prune ran at frame 50; ten more entries accumulated.
        assert_eq!(s.objects[&0].non_cond_outputs.len(), 18);
        assert_eq!(s.prune_events.len(), 2);
    }

    #[test]
    fn prune_keeps_newest_by_frame_index() {
        let mut s = single_object_session(PruneConfig::disabled());
        for f in 1..=20 {
            s.step(f, 10).unwrap();
        }
        s.prune_config = PruneConfig::default();
        s.prune();
        let kept: Vec<u64> = s.objects[&1].non_cond_outputs.keys().copied().collect();
        assert_eq!(kept, (13..=20).collect::<Vec<_>>());
    }

    #[test]
    fn prune_is_idempotent_and_spares_small_caches() {
        let mut s = single_object_session(PruneConfig::default());
        for f in 1..=3 {
            s.step(f, 10).unwrap();
        }
        let before = s.objects.clone();
        s.prune();
        assert_eq!(s.objects, before);
        for f in 4..=30 {
            s.step(f, 10).unwrap();
        }
        s.prune();
        let once = s.objects.clone();
        s.prune();
        assert_eq!(s.objects, once);
    }

    #[test]
    fn conditioning_entry_survives_pruning() {
        let mut s = SessionState::new(PruneConfig::default());
        s.add_object(7, 10_000_000);
        for f in 1..=40 {
            s.step(f, 5_600_000).unwrap();
        }
        assert_eq!(s.objects[&7].cond_frame_bytes, 10_000_000);
    }

    #[test]
    fn memory_bytes_arithmetic() {
        let mut s = SessionState::new(PruneConfig::disabled());
        assert_eq!(s.memory_bytes(), 0);
        s.add_object(1, 10_000_000);
        for f in 1..=3 {
            s.step(f, 5_600_000).unwrap();
        }
        assert_eq!(s.memory_bytes(), 26_800_000);
    }

    #[test]
    fn steady_state_per_object_is_keep_last_times_entry() {
        let mut s = SessionState::new(PruneConfig::default());
        for id in 0..8 {
            s.add_object(id, 0);
        }
        for f in 1..=200 {
            s.step(f, 5_600_000).unwrap();
        }
        s.prune();
        for cache in s.objects.values() {
            assert_eq!(cache.bytes(), 44_800_000);
        }
        assert_eq!(s.memory_bytes(), 8 * 44_800_000);
    }

    #[test]
    fn non_monotonic_frame_rejected() {
        let mut s = single_object_session(PruneConfig::default());
        s.step(5, 10).unwrap();
        assert!(matches!(
            s.step(5, 10),
            Err(Error::NonMonotonicFrame { last: 5, got: 5 })
        ));
        assert!(s.step(6, 10).is_ok());
    }

    #[test]
    fn unpruned_trace_is_exactly_linear() {
        let params = MemoryModelParams::default();
        let trace = simulate_stream(&params, 100, false).unwrap();
        let slope = params.entry_bytes() * params.num_objects;
        for (frame, bytes) in &trace {
            assert_eq!(*bytes, params.base_bytes() + frame * slope);
        }
    }

    #[test]
    fn pruned_trace_respects_closed_form_bound() {
        let params = MemoryModelParams {
            base_mb: 50.0,
            ..MemoryModelParams::default()
        };
        let bound = pruned_trace_bound(&params, &PruneConfig::default());
        let trace = simulate_stream(&params, 2000, true).unwrap();
        for (_, bytes) in &trace {
            assert!(*bytes <= bound);
        }
        // The trace must actually plateau rather than grow.
        let late_max = trace[1000..].iter().map(|p| p.1).max().unwrap();
        let early_max = trace[100..200].iter().map(|p| p.1).max().unwrap();
        assert_eq!(late_max, early_max);
    }

    #[test]
    fn identical_runs_identical_traces() {
        let params = MemoryModelParams::default();
        let a = simulate_stream(&params, 300, true).unwrap();
        let b = simulate_stream(&params, 300, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn time_to_budget_formula() {
        let params = MemoryModelParams::default();
        // 16e9 / (5.6e6 * 8 * 30) s.
        let expected = 16e9 / (5.6e6 * 8.0 * 30.0);
        let t = time_to_budget(&params).unwrap();
        assert!((t - expected).abs() < 1e-9);
        assert!((t - 11.9).abs() < 0.01);
    }

    #[test]
    fn exhausted_budget_is_zero_and_fps_scales() {
        let mut params = MemoryModelParams::default();
        params.base_mb = params.budget_gb * 1000.0;
        assert_eq!(time_to_budget(&params).unwrap(), 0.0);

        let slow = MemoryModelParams {
            fps: 15.0,
            ..MemoryModelParams::default()
        };
        let fast = MemoryModelParams {
            fps: 30.0,
            ..MemoryModelParams::default()
        };
        let ts = time_to_budget(&slow).unwrap();
        let tf = time_to_budget(&fast).unwrap();
        assert!((ts - 2.0 * tf).abs() < 1e-9);
    }
}
