//! Embedding-pool re-identification: per-identity banks of EMA-smoothed
//! appearance embeddings, the observation-processing state machine that
//! detects and corrects identity switches, and the storage arithmetic
//! for long-horizon bank retention.
//!
//! An observation fires a correction only when it is simultaneously
//! unlike its own bank (max cosine below `tau_low`) and very like some
//! other bank (max cosine above `tau_high`). Corrections are emitted as
//! data directives; executing them is the caller's job.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::math;

/// Serialized precision of one embedding component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Precision {
    #[default]
    Half16,
    Single32,
}

impl Precision {
    pub fn bytes_per_component(&self) -> u64 {
        match self {
            Precision::Half16 => 2,
            Precision::Single32 => 4,
        }
    }

    /// On-disk bytes for one `dim`-component embedding; 384 components
    /// occupy 768 B at half precision and 1536 B at single precision.
    pub fn embedding_bytes(&self, dim: usize) -> u64 {
        self.bytes_per_component() * dim as u64
    }
}

/// Appearance embedding, held as f64 internally regardless of the
/// serialized precision tag.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
    pub precision: Precision,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>, precision: Precision) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig(
                "embedding must have at least one component".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "embedding components must be finite".into(),
            ));
        }
        Ok(Self { values, precision })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    pub fn byte_size(&self) -> u64 {
        self.precision.embedding_bytes(self.dim())
    }
}

/// Cosine similarity in `[-1, 1]`. Errors on mismatched dims or a
/// zero-norm operand.
pub fn cosine_sim(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: alloc::format!("dim {}", a.dim()),
            got: alloc::format!("dim {}", b.dim()),
        });
    }
    let sum_sq = |v: &EmbeddingVector| v.values.iter().map(|x| x * x).sum::<f64>();
    let sa = sum_sq(a);
    let sb = sum_sq(b);
    if sa == 0.0 || sb == 0.0 {
        return Err(Error::DegenerateInput(
            "zero-norm embedding in cosine".into(),
        ));
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    // sqrt(sa * sb) rather than sqrt(sa) * sqrt(sb): a vector compared
    // against itself then scores exactly 1.
    Ok((dot / math::sqrt(sa * sb)).clamp(-1.0, 1.0))
}

/// Convex blend `alpha * cur + (1 - alpha) * prev`; `alpha` weights the
/// current observation.
pub fn ema_update(
    prev: &EmbeddingVector,
    cur: &EmbeddingVector,
    alpha: f64,
) -> Result<EmbeddingVector> {
    if prev.dim() != cur.dim() {
        return Err(Error::DimMismatch {
            expected: alloc::format!("dim {}", prev.dim()),
            got: alloc::format!("dim {}", cur.dim()),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig("alpha must be in (0, 1]".into()));
    }
    let values = prev
        .values
        .iter()
        .zip(&cur.values)
        .map(|(p, c)| alpha * c + (1.0 - alpha) * p)
        .collect();
    EmbeddingVector::new(values, cur.precision)
}

/// Number of behaviour classes tracked per bank entry.
pub const BEHAVIOUR_CLASSES: usize = 9;

/// One bank entry: wall-clock timestamp, smoothed embedding, and the
/// behaviour-class histogram of the covered window (normalized to 1
/// within 1e-9).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BankEntry {
    pub timestamp: f64,
    pub embedding: EmbeddingVector,
    pub behaviour_histogram: [f64; BEHAVIOUR_CLASSES],
}

impl BankEntry {
    pub fn new(
        timestamp: f64,
        embedding: EmbeddingVector,
        behaviour_histogram: [f64; BEHAVIOUR_CLASSES],
    ) -> Result<Self> {
        if behaviour_histogram
            .iter()
            .any(|v| *v < 0.0 || !v.is_finite())
        {
            return Err(Error::InvalidConfig(
                "histogram entries must be nonnegative".into(),
            ));
        }
        let sum: f64 = behaviour_histogram.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(alloc::format!(
                "histogram must sum to 1 within 1e-9, got {sum}"
            )));
        }
        Ok(Self {
            timestamp,
            embedding,
            behaviour_histogram,
        })
    }

    /// Uniform placeholder histogram for synthetic scenarios.
    pub fn uniform_histogram() -> [f64; BEHAVIOUR_CLASSES] {
        [1.0 / BEHAVIOUR_CLASSES as f64; BEHAVIOUR_CLASSES]
    }
}

/// Time-ordered embedding history for one identity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingBank {
    pub identity_id: u64,
    entries: Vec<BankEntry>,
    pub last_update: f64,
}

impl EmbeddingBank {
    pub fn new(identity_id: u64) -> Self {
        Self {
            identity_id,
            entries: Vec::new(),
            last_update: f64::NEG_INFINITY,
        }
    }

    /// Append an entry; timestamps must be strictly increasing.
    pub fn push(&mut self, entry: BankEntry) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if entry.timestamp <= last.timestamp {
                return Err(Error::InvalidConfig(alloc::format!(
                    "bank timestamps must strictly increase: {} after {}",
                    entry.timestamp,
                    last.timestamp
                )));
            }
        }
        self.last_update = self.last_update.max(entry.timestamp);
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Max cosine of `probe` against every entry.
    pub fn max_similarity(&self, probe: &EmbeddingVector) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for entry in &self.entries {
            best = best.max(cosine_sim(probe, &entry.embedding)?);
        }
        if best == f64::NEG_INFINITY {
            return Err(Error::EmptyBank {
                identity: self.identity_id,
            });
        }
        Ok(best)
    }
}

/// All banks currently tracked, keyed by identity.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingBanks {
    banks: BTreeMap<u64, EmbeddingBank>,
}

impl EmbeddingBanks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, bank: EmbeddingBank) {
        self.banks.insert(bank.identity_id, bank);
    }

    pub fn get(&self, identity: u64) -> Option<&EmbeddingBank> {
        self.banks.get(&identity)
    }

    pub fn get_mut(&mut self, identity: u64) -> Option<&mut EmbeddingBank> {
        self.banks.get_mut(&identity)
    }

    pub fn get_or_create(&mut self, identity: u64) -> &mut EmbeddingBank {
        self.banks
            .entry(identity)
            .or_insert_with(|| EmbeddingBank::new(identity))
    }

    pub fn identities(&self) -> impl Iterator<Item = u64> + '_ {
        self.banks.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &EmbeddingBank)> {
        self.banks.iter()
    }

    pub fn len(&self) -> usize {
        self.banks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.banks.is_empty()
    }
}

/// Similarity thresholds and bank-update cadence.
///
/// The invariant is `0 < tau_low < tau_high`; `tau_high` above 1 is a
/// legal sentinel that disables re-assignment outright, since a cosine
/// can never exceed it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReidConfig {
    pub tau_low: f64,
    pub tau_high: f64,
    pub alpha: f64,
    pub cadence_s: f64,
}

impl Default for ReidConfig {
    fn default() -> Self {
        Self {
            tau_low: 0.65,
            tau_high: 0.78,
            alpha: 0.7,
            cadence_s: 3600.0,
        }
    }
}

impl ReidConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_low > 0.0 && self.tau_low < self.tau_high) {
            return Err(Error::InvalidConfig(alloc::format!(
                "need 0 < tau_low < tau_high, got {} / {}",
                self.tau_low,
                self.tau_high
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig("alpha must be in (0, 1]".into()));
        }
        if !(self.cadence_s >= 0.0) {
            return Err(Error::InvalidConfig("cadence_s must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Logged identity-swap correction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReidEvent {
    pub frame: u64,
    pub claimed_id: u64,
    pub corrected_id: u64,
    pub sim_self: f64,
    pub sim_other: f64,
}

/// Instruction to re-prompt the tracker at `bbox` under `identity`.
/// Emitted as data; the harness (or a real tracker frontend) applies it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReinitDirective {
    pub frame: u64,
    pub identity: u64,
    pub bbox: Option<BoundingBox>,
}

/// What one observation did.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationOutcome {
    pub event: Option<ReidEvent>,
    pub reinit: Option<ReinitDirective>,
    /// Identity the caller should continue the track under.
    pub effective_id: u64,
    /// Whether the cadence elapsed and an EMA entry was appended.
    pub appended_entry: bool,
}

/// Process one tracked observation against the banks.
///
/// `sim_self` is the max cosine against the claimed identity's bank and
/// `sim_other` the max over every other bank. When `sim_self < tau_low`
/// and `sim_other > tau_high`, a [`ReidEvent`] and matching
/// [`ReinitDirective`] are emitted and the observation continues under
/// the corrected identity. Independently, once `cadence_s` has elapsed
/// since the (possibly corrected) identity's last bank update, an
/// EMA-blended entry is appended.
#[allow(clippy::too_many_arguments)]
pub fn process_observation(
    banks: &mut EmbeddingBanks,
    claimed_id: u64,
    e_cur: &EmbeddingVector,
    frame: u64,
    now: f64,
    current_box: Option<BoundingBox>,
    histogram: [f64; BEHAVIOUR_CLASSES],
    cfg: &ReidConfig,
) -> Result<ObservationOutcome> {
    cfg.validate()?;
    let claimed = banks.get(claimed_id).ok_or(Error::EmptyBank {
        identity: claimed_id,
    })?;
    let sim_self = claimed.max_similarity(e_cur)?;

    let mut sim_other = f64::NEG_INFINITY;
    let mut best_other: Option<u64> = None;
    for (&identity, bank) in banks.iter() {
        if identity == claimed_id {
            continue;
        }
        let sim = bank.max_similarity(e_cur)?;
        if sim > sim_other {
            sim_other = sim;
            best_other = Some(identity);
        }
    }

    let mut event = None;
    let mut reinit = None;
    let mut effective_id = claimed_id;
    if sim_self < cfg.tau_low {
        if let Some(corrected_id) = best_other {
            if sim_other > cfg.tau_high {
                event = Some(ReidEvent {
                    frame,
                    claimed_id,
                    corrected_id,
                    sim_self,
                    sim_other,
                });
                reinit = Some(ReinitDirective {
                    frame,
                    identity: corrected_id,
                    bbox: current_box,
                });
                effective_id = corrected_id;
            }
        }
    }

    // Cadence-gated EMA append, on the identity the track continues as.
    let mut appended_entry = false;
    let bank = banks
        .get_mut(effective_id)
        .expect("effective identity came from the map");
    if now - bank.last_update >= cfg.cadence_s {
        let prev_embedding = bank
            .entries()
            .last()
            .ok_or(Error::EmptyBank {
                identity: effective_id,
            })?
            .embedding
            .clone();
        let blended = ema_update(&prev_embedding, e_cur, cfg.alpha)?;
        bank.push(BankEntry::new(now, blended, histogram)?)?;
        appended_entry = true;
    }

    Ok(ObservationOutcome {
        event,
        reinit,
        effective_id,
        appended_entry,
    })
}

/// Bank retention sizing. Byte arithmetic is exact; SI display rounding
/// happens elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StoragePolicy {
    pub cadence_entries_per_year: u64,
    pub bytes_per_embedding: u64,
    pub metadata_bytes_per_entry: u64,
    pub animals: u64,
    pub fps: f64,
}

impl Default for StoragePolicy {
    fn default() -> Self {
        Self {
            cadence_entries_per_year: 8760,
            bytes_per_embedding: Precision::Half16.embedding_bytes(384),
            metadata_bytes_per_entry: 10_000,
            animals: 200,
            fps: 5.0,
        }
    }
}

impl StoragePolicy {
    pub fn validate(&self) -> Result<()> {
        let ok = self.cadence_entries_per_year > 0
            && self.bytes_per_embedding > 0
            && self.metadata_bytes_per_entry > 0
            && self.animals > 0
            && self.fps > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(
                "storage policy fields must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Exact annual bank footprint in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnualFootprint {
    pub raw_embedding_bytes: u64,
    pub total_bytes_per_animal: u64,
    pub barn_total_bytes: u64,
}

/// Raw embedding bytes per animal-year, the per-animal total with
/// metadata, and the barn-level total.
pub fn annual_footprint(p: &StoragePolicy) -> AnnualFootprint {
    let raw_embedding_bytes = p.cadence_entries_per_year * p.bytes_per_embedding;
    let total_bytes_per_animal =
        raw_embedding_bytes + p.cadence_entries_per_year * p.metadata_bytes_per_entry;
    AnnualFootprint {
        raw_embedding_bytes,
        total_bytes_per_animal,
        barn_total_bytes: p.animals * total_bytes_per_animal,
    }
}

/// Per-frame embedding traffic before EMA aggregation, and the
/// reduction factor the cadence buys.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrafficSummary {
    pub bytes_per_animal_per_day: f64,
    pub reduction_factor: f64,
}

/// Daily raw traffic `fps x 86400 x bytes_per_embedding` and the
/// `fps x cadence_s` reduction from writing one entry per cadence.
pub fn raw_traffic_and_reduction(p: &StoragePolicy, cadence_s: f64) -> Result<TrafficSummary> {
    p.validate()?;
    if !(cadence_s > 0.0) {
        return Err(Error::InvalidConfig("cadence_s must be positive".into()));
    }
    Ok(TrafficSummary {
        bytes_per_animal_per_day: p.fps * 86_400.0 * p.bytes_per_embedding as f64,
        reduction_factor: p.fps * cadence_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_axis(dim: usize, axis: usize) -> EmbeddingVector {
        let mut values = vec![0.0; dim];
        values[axis] = 1.0;
        EmbeddingVector::new(values, Precision::Half16).unwrap()
    }

    fn seeded_bank(identity: u64, embedding: &EmbeddingVector, t: f64) -> EmbeddingBank {
        let mut bank = EmbeddingBank::new(identity);
        bank.push(BankEntry::new(t, embedding.clone(), BankEntry::uniform_histogram()).unwrap())
            .unwrap();
        bank
    }

    #[test]
    fn cosine_trivials() {
        let a = unit_axis(4, 0);
        let b = unit_axis(4, 1);
        assert_eq!(cosine_sim(&a, &a).unwrap(), 1.0);
        assert_eq!(cosine_sim(&a, &b).unwrap(), 0.0);
        let neg = EmbeddingVector::new(vec![-1.0, 0.0, 0.0, 0.0], Precision::Half16).unwrap();
        assert_eq!(cosine_sim(&a, &neg).unwrap(), -1.0);
        let zero = EmbeddingVector::new(vec![0.0; 4], Precision::Half16);
        // zero vector constructs fine; cosine rejects it
        assert!(cosine_sim(&a, &zero.unwrap()).is_err());
    }

    #[test]
    fn ema_trivials_and_convexity() {
        let prev = unit_axis(3, 0);
        let cur = unit_axis(3, 1);
        assert_eq!(ema_update(&prev, &cur, 1.0).unwrap().values, cur.values);
        assert_eq!(ema_update(&cur, &cur, 0.7).unwrap().values, cur.values);
        let zero = EmbeddingVector::new(vec![0.0; 3], Precision::Half16).unwrap();
        let blended = ema_update(&zero, &cur, 0.7).unwrap();
        assert_eq!(blended.values, vec![0.0, 0.7, 0.0]);
        // Convexity: blended norm no larger than the larger operand norm.
        let n = ema_update(&prev, &cur, 0.3).unwrap().norm();
        assert!(n <= prev.norm().max(cur.norm()) + 1e-15);
    }

    #[test]
    fn histogram_validation() {
        let e = unit_axis(3, 0);
        let mut bad = BankEntry::uniform_histogram();
        bad[0] += 1e-3;
        assert!(BankEntry::new(0.0, e.clone(), bad).is_err());
        assert!(BankEntry::new(0.0, e, BankEntry::uniform_histogram()).is_ok());
    }

    #[test]
    fn bank_timestamps_strictly_increase() {
        let e = unit_axis(3, 0);
        let mut bank = EmbeddingBank::new(1);
        bank.push(BankEntry::new(10.0, e.clone(), BankEntry::uniform_histogram()).unwrap())
            .unwrap();
        let stale = BankEntry::new(10.0, e, BankEntry::uniform_histogram()).unwrap();
        assert!(bank.push(stale).is_err());
    }

    fn two_bank_setup(dim: usize) -> (EmbeddingBanks, EmbeddingVector, EmbeddingVector) {
        let own = unit_axis(dim, 0);
        let other = unit_axis(dim, 1);
        let mut banks = EmbeddingBanks::new();
        banks.insert(seeded_bank(1, &own, 0.0));
        banks.insert(seeded_bank(2, &other, 0.0));
        (banks, own, other)
    }

    #[test]
    fn matching_own_bank_no_event() {
        let (mut banks, own, _) = two_bank_setup(8);
        let out = process_observation(
            &mut banks,
            1,
            &own,
            5,
            1.0,
            None,
            BankEntry::uniform_histogram(),
            &ReidConfig::default(),
        )
        .unwrap();
        assert!(out.event.is_none());
        assert!(out.reinit.is_none());
        assert_eq!(out.effective_id, 1);
    }

    #[test]
    fn constructed_cosines_fire_event() {
        // e_cur has cosine 0.3 to its own bank and 0.95 to the other.
        let (mut banks, own, other) = two_bank_setup(8);
        let residual = (1.0_f64 - 0.3 * 0.3 - 0.95 * 0.95).sqrt();
        let mut values = vec![0.0; 8];
        values[0] = 0.3 * own.values[0];
        values[1] = 0.95 * other.values[1];
        values[2] = residual;
        let e_cur = EmbeddingVector::new(values, Precision::Half16).unwrap();
        let out = process_observation(
            &mut banks,
            1,
            &e_cur,
            42,
            1.0,
            None,
            BankEntry::uniform_histogram(),
            &ReidConfig::default(),
        )
        .unwrap();
        let event = out.event.expect("must fire");
        assert_eq!(event.corrected_id, 2);
        assert!((event.sim_self - 0.3).abs() < 1e-12);
        assert!((event.sim_other - 0.95).abs() < 1e-12);
        assert_eq!(out.effective_id, 2);
        assert_eq!(out.reinit.unwrap().identity, 2);
    }

    #[test]
    fn doubt_without_reassignment_stays_put() {
        // sim_self 0.3, sim_other 0.5: below tau_high, so no event.
        let (mut banks, own, other) = two_bank_setup(8);
        let residual = (1.0_f64 - 0.3 * 0.3 - 0.5 * 0.5).sqrt();
        let mut values = vec![0.0; 8];
        values[0] = 0.3 * own.values[0];
        values[1] = 0.5 * other.values[1];
        values[2] = residual;
        let e_cur = EmbeddingVector::new(values, Precision::Half16).unwrap();
        let out = process_observation(
            &mut banks,
            1,
            &e_cur,
            42,
            1.0,
            None,
            BankEntry::uniform_histogram(),
            &ReidConfig::default(),
        )
        .unwrap();
        assert!(out.event.is_none());
        assert_eq!(out.effective_id, 1);
    }

    #[test]
    fn missing_claimed_bank_errors() {
        let (mut banks, own, _) = two_bank_setup(4);
        let err = process_observation(
            &mut banks,
            99,
            &own,
            1,
            1.0,
            None,
            BankEntry::uniform_histogram(),
            &ReidConfig::default(),
        );
        assert!(matches!(err, Err(Error::EmptyBank { identity: 99 })));
    }

    #[test]
    fn cadence_gates_ema_appends() {
        let (mut banks, own, _) = two_bank_setup(4);
        let cfg = ReidConfig {
            cadence_s: 10.0,
            ..ReidConfig::default()
        };
        let early = process_observation(
            &mut banks,
            1,
            &own,
            1,
            5.0,
            None,
            BankEntry::uniform_histogram(),
            &cfg,
        )
        .unwrap();
        assert!(!early.appended_entry);
        assert_eq!(banks.get(1).unwrap().len(), 1);
        let due = process_observation(
            &mut banks,
            1,
            &own,
            2,
            10.0,
            None,
            BankEntry::uniform_histogram(),
            &cfg,
        )
        .unwrap();
        assert!(due.appended_entry);
        let bank = banks.get(1).unwrap();
        assert_eq!(bank.len(), 2);
        assert_eq!(bank.last_update, 10.0);
        // Timestamps stay strictly increasing.
        assert!(bank.entries()[1].timestamp > bank.entries()[0].timestamp);
    }

    #[test]
    fn ema_append_blends_with_last_entry() {
        let own = unit_axis(3, 0);
        let mut banks = EmbeddingBanks::new();
        banks.insert(seeded_bank(1, &own, 0.0));
        banks.insert(seeded_bank(2, &unit_axis(3, 1), 0.0));
        let cfg = ReidConfig {
            cadence_s: 0.5,
            alpha: 0.7,
            ..ReidConfig::default()
        };
        let cur = unit_axis(3, 2);
        process_observation(
            &mut banks,
            1,
            &cur,
            1,
            1.0,
            None,
            BankEntry::uniform_histogram(),
            &cfg,
        )
        .unwrap();
        let entry = banks.get(1).unwrap().entries().last().unwrap().clone();
        assert!((entry.embedding.values[0] - 0.3).abs() < 1e-15);
        assert!((entry.embedding.values[2] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn well_separated_self_observations_never_fire() {
        // Claimed embeddings drawn near its own center never look more
        // like any other bank under orthogonal centers.
        let (mut banks, own, _) = two_bank_setup(6);
        let cfg = ReidConfig::default();
        for k in 0..50 {
            let mut values = own.values.clone();
            // Small deterministic wobble within the own cluster.
            values[3] = 0.1 * ((k % 7) as f64 / 7.0);
            let e = EmbeddingVector::new(values, Precision::Half16).unwrap();
            let out = process_observation(
                &mut banks,
                1,
                &e,
                k,
                0.5,
                None,
                BankEntry::uniform_histogram(),
                &cfg,
            )
            .unwrap();
            assert!(out.event.is_none());
        }
    }

    #[test]
    fn tau_high_above_one_disables_reassignment() {
        let (mut banks, _, other) = two_bank_setup(4);
        let cfg = ReidConfig {
            tau_high: 1.01,
            ..ReidConfig::default()
        };
        assert!(cfg.validate().is_ok());
        // Probe identical to the other bank: sim_other = 1.0 < 1.01.
        let out = process_observation(
            &mut banks,
            1,
            &other,
            3,
            1.0,
            None,
            BankEntry::uniform_histogram(),
            &cfg,
        )
        .unwrap();
        assert!(out.event.is_none());
    }

    #[test]
    fn invalid_threshold_order_rejected() {
        let cfg = ReidConfig {
            tau_low: 0.8,
            tau_high: 0.7,
            ..ReidConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn embedding_byte_sizes() {
        assert_eq!(Precision::Half16.embedding_bytes(384), 768);
        assert_eq!(Precision::Single32.embedding_bytes(384), 1536);
    }

    #[test]
    fn annual_footprint_known_values() {
        let p = StoragePolicy::default();
        let f = annual_footprint(&p);
        assert_eq!(f.raw_embedding_bytes, 6_727_680);
        assert_eq!(f.total_bytes_per_animal, 6_727_680 + 8760 * 10_000);
        assert_eq!(f.barn_total_bytes, 200 * f.total_bytes_per_animal);
        // Roughly 94.3 MB per animal and 18.9 GB per barn, decimal units.
        assert!((f.total_bytes_per_animal as f64 / 1e6 - 94.3).abs() < 0.1);
        assert!((f.barn_total_bytes as f64 / 1e9 - 18.9).abs() < 0.05);
    }

    #[test]
    fn traffic_and_reduction_known_values() {
        let p = StoragePolicy::default();
        let t = raw_traffic_and_reduction(&p, 3600.0).unwrap();
        assert_eq!(t.bytes_per_animal_per_day, 331_776_000.0);
        assert_eq!(t.reduction_factor, 18_000.0);
        let unit = StoragePolicy { fps: 1.0, ..p };
        assert_eq!(
            raw_traffic_and_reduction(&unit, 1.0)
                .unwrap()
                .reduction_factor,
            1.0
        );
    }
}
