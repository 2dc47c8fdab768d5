//! Four-term feature-distillation objective, its analytic gradient with
//! respect to the student tensor, and student-vs-teacher fidelity
//! diagnostics.
//!
//! The objective combines, in weight order:
//!   1. directional MSE between per-sample globally L2-normalized tensors,
//!   2. mean patch-wise cosine loss over the per-location channel vectors,
//!   3. per-(batch, channel) first/second moment matching over the spatial
//!      axes (population convention),
//!   4. plain elementwise MSE as a low-weight auxiliary term.
//!
//! Every term is a mean, so the weights are independent of batch size and
//! spatial resolution. All arithmetic is f64 regardless of on-disk
//! precision.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Dense rank-4 feature map in row-major (batch, channel, height, width)
/// order. Values are finite f64.
#[derive(Clone, PartialEq)]
pub struct FeatureTensor {
    dims: [usize; 4],
    data: Vec<f64>,
}

impl core::fmt::Debug for FeatureTensor {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "FeatureTensor({}x{}x{}x{})",
            self.dims[0], self.dims[1], self.dims[2], self.dims[3]
        )
    }
}

impl FeatureTensor {
    pub fn from_vec(dims: [usize; 4], data: Vec<f64>) -> Result<Self> {
        let count: usize = dims.iter().product();
        if dims.contains(&0) {
            return Err(Error::InvalidConfig("tensor dims must all be >= 1".into()));
        }
        if data.len() != count {
            return Err(Error::DimMismatch {
                expected: alloc::format!("{count} values for dims {dims:?}"),
                got: alloc::format!("{} values", data.len()),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("tensor values must be finite".into()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 4]) -> Result<Self> {
        let count: usize = dims.iter().product();
        if dims.contains(&0) {
            return Err(Error::InvalidConfig("tensor dims must all be >= 1".into()));
        }
        Ok(Self {
            dims,
            data: vec![0.0; count],
        })
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get_flat(&self, idx: usize) -> f64 {
        self.data[idx]
    }

    /// Panics on non-finite values; the finiteness invariant is part of
    /// the type contract.
    pub fn set_flat(&mut self, idx: usize, value: f64) {
        assert!(value.is_finite(), "tensor values must be finite");
        self.data[idx] = value;
    }

    #[inline]
    fn offset(&self, b: usize, c: usize, h: usize, w: usize) -> usize {
        ((b * self.dims[1] + c) * self.dims[2] + h) * self.dims[3] + w
    }

    pub fn get(&self, b: usize, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.offset(b, c, h, w)]
    }

    /// Mirror along the width axis; used to check paired-flip invariance.
    pub fn flipped_horizontal(&self) -> Self {
        let [bs, cs, hs, ws] = self.dims;
        let mut out = self.clone();
        for b in 0..bs {
            for c in 0..cs {
                for h in 0..hs {
                    for w in 0..ws {
                        out.data[self.offset(b, c, h, w)] = self.get(b, c, h, ws - 1 - w);
                    }
                }
            }
        }
        out
    }

    fn same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch {
                expected: alloc::format!("{:?}", self.dims),
                got: alloc::format!("{:?}", other.dims),
            });
        }
        Ok(())
    }
}

/// Term weights; defaults follow the direction-then-scale ordering
/// (1.0 / 0.5 / 0.3 / 0.1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossWeights {
    pub w_dir: f64,
    pub w_cos: f64,
    pub w_moment: f64,
    pub w_raw: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            w_dir: 1.0,
            w_cos: 0.5,
            w_moment: 0.3,
            w_raw: 0.1,
        }
    }
}

impl LossWeights {
    pub fn new(w_dir: f64, w_cos: f64, w_moment: f64, w_raw: f64) -> Result<Self> {
        for w in [w_dir, w_cos, w_moment, w_raw] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig(
                    "loss weights must be nonnegative".into(),
                ));
            }
        }
        Ok(Self {
            w_dir,
            w_cos,
            w_moment,
            w_raw,
        })
    }
}

/// How zero norms encountered as divisors are treated: `Strict` raises a
/// degenerate-input error; `Epsilon` floors every such divisor at the
/// given value (1e-12 by default) for simulation use.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NormPolicy {
    #[default]
    Strict,
    Epsilon(f64),
}

/// Default floor for [`NormPolicy::Epsilon`].
pub const DEFAULT_EPSILON: f64 = 1e-12;

impl NormPolicy {
    pub fn epsilon() -> Self {
        NormPolicy::Epsilon(DEFAULT_EPSILON)
    }

    fn divisor(&self, norm: f64, what: &str) -> Result<f64> {
        match self {
            NormPolicy::Strict => {
                if norm == 0.0 {
                    Err(Error::DegenerateInput(alloc::format!(
                        "zero norm in {what}"
                    )))
                } else {
                    Ok(norm)
                }
            }
            NormPolicy::Epsilon(eps) => Ok(norm.max(*eps)),
        }
    }
}

/// Denominator for a patch cosine, computed as sqrt(ss * tt) so a
/// location compared against itself yields exactly 1 (IEEE round-to-
/// nearest guarantees sqrt(x * x) == x). Zero-norm handling follows the
/// policy.
fn cosine_denominator(ss: f64, tt: f64, policy: NormPolicy) -> Result<f64> {
    let nx = policy.divisor(math::sqrt(ss), "student patch cosine")?;
    let ny = policy.divisor(math::sqrt(tt), "teacher patch cosine")?;
    if ss > 0.0 && tt > 0.0 {
        Ok(math::sqrt(ss * tt))
    } else {
        Ok(nx * ny)
    }
}

/// The four unweighted terms and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossBreakdown {
    pub directional: f64,
    pub cosine: f64,
    pub moment: f64,
    pub raw: f64,
    pub total: f64,
}

/// Per-(batch, channel) mean and population standard deviation over the
/// spatial axes, row-major over (batch, channel).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Per-channel-pair moments of a tensor over its spatial axes.
pub fn moment_stats(t: &FeatureTensor) -> MomentStats {
    let [bs, cs, hs, ws] = t.dims();
    let spatial = (hs * ws) as f64;
    let mut means = Vec::with_capacity(bs * cs);
    let mut stds = Vec::with_capacity(bs * cs);
    for b in 0..bs {
        for c in 0..cs {
            let base = t.offset(b, c, 0, 0);
            let block = &t.data[base..base + hs * ws];
            let mean: f64 = block.iter().sum::<f64>() / spatial;
            let var: f64 = block.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / spatial;
            means.push(mean);
            stds.push(math::sqrt(var));
        }
    }
    MomentStats { means, stds }
}

fn sample_norms(t: &FeatureTensor) -> Vec<f64> {
    let [bs, cs, hs, ws] = t.dims();
    let block = cs * hs * ws;
    (0..bs)
        .map(|b| {
            let slice = &t.data[b * block..(b + 1) * block];
            math::sqrt(slice.iter().map(|v| v * v).sum::<f64>())
        })
        .collect()
}

/// Evaluate the four-term objective under the strict zero-norm policy.
pub fn compute_loss(
    student: &FeatureTensor,
    teacher: &FeatureTensor,
    weights: &LossWeights,
) -> Result<LossBreakdown> {
    compute_loss_with(student, teacher, weights, NormPolicy::Strict)
}

pub fn compute_loss_with(
    student: &FeatureTensor,
    teacher: &FeatureTensor,
    weights: &LossWeights,
    policy: NormPolicy,
) -> Result<LossBreakdown> {
    student.same_dims(teacher)?;
    let [bs, cs, hs, ws] = student.dims();
    let n = (bs * cs * hs * ws) as f64;
    let block = cs * hs * ws;

    // Directional MSE over per-sample unit tensors.
    let s_norms = sample_norms(student);
    let t_norms = sample_norms(teacher);
    let mut dir_sum = 0.0;
    for b in 0..bs {
        let ns = policy.divisor(s_norms[b], "student directional normalization")?;
        let nt = policy.divisor(t_norms[b], "teacher directional normalization")?;
        for i in b * block..(b + 1) * block {
            let d = student.data[i] / ns - teacher.data[i] / nt;
            dir_sum += d * d;
        }
    }
    let directional = dir_sum / n;

    // Patch-wise cosine over per-location channel vectors.
    let locations = (bs * hs * ws) as f64;
    let mut cos_sum = 0.0;
    let spatial = hs * ws;
    for b in 0..bs {
        for h in 0..hs {
            for w in 0..ws {
                let base = student.offset(b, 0, h, w);
                let mut dot = 0.0;
                let mut ss = 0.0;
                let mut tt = 0.0;
                for c in 0..cs {
                    let sv = student.data[base + c * spatial];
                    let tv = teacher.data[base + c * spatial];
                    dot += sv * tv;
                    ss += sv * sv;
                    tt += tv * tv;
                }
                let denom = cosine_denominator(ss, tt, policy)?;
                cos_sum += 1.0 - (dot / denom).clamp(-1.0, 1.0);
            }
        }
    }
    let cosine = cos_sum / locations;

    // Per-(batch, channel) moment matching.
    let ms = moment_stats(student);
    let mt = moment_stats(teacher);
    let channel_pairs = (bs * cs) as f64;
    let mut moment_sum = 0.0;
    for k in 0..bs * cs {
        let ds = ms.stds[k] - mt.stds[k];
        let dm = ms.means[k] - mt.means[k];
        moment_sum += ds * ds + dm * dm;
    }
    let moment = moment_sum / channel_pairs;

    // Plain MSE.
    let raw = student
        .data
        .iter()
        .zip(&teacher.data)
        .map(|(s, t)| (s - t) * (s - t))
        .sum::<f64>()
        / n;

    let total = weights.w_dir * directional
        + weights.w_cos * cosine
        + weights.w_moment * moment
        + weights.w_raw * raw;
    Ok(LossBreakdown {
        directional,
        cosine,
        moment,
        raw,
        total,
    })
}

/// Analytic gradient of the weighted total with respect to every student
/// element, under the strict zero-norm policy.
pub fn loss_gradient(
    student: &FeatureTensor,
    teacher: &FeatureTensor,
    weights: &LossWeights,
) -> Result<FeatureTensor> {
    loss_gradient_with(student, teacher, weights, NormPolicy::Strict)
}

pub fn loss_gradient_with(
    student: &FeatureTensor,
    teacher: &FeatureTensor,
    weights: &LossWeights,
    policy: NormPolicy,
) -> Result<FeatureTensor> {
    student.same_dims(teacher)?;
    let [bs, cs, hs, ws] = student.dims();
    let n = (bs * cs * hs * ws) as f64;
    let block = cs * hs * ws;
    let mut grad = vec![0.0_f64; student.len()];

    // Directional term: per sample b with u = s/|s|, v = t/|t|,
    // d/ds [mean (u - v)^2] = 2/(N |s|) * ((u.v) u - v).
    let s_norms = sample_norms(student);
    let t_norms = sample_norms(teacher);
    for b in 0..bs {
        let ns = policy.divisor(s_norms[b], "student directional normalization")?;
        let nt = policy.divisor(t_norms[b], "teacher directional normalization")?;
        let range = b * block..(b + 1) * block;
        let mut u_dot_v = 0.0;
        for i in range.clone() {
            u_dot_v += (student.data[i] / ns) * (teacher.data[i] / nt);
        }
        let factor = weights.w_dir * 2.0 / (n * ns);
        for ((g, s), t) in grad[range.clone()]
            .iter_mut()
            .zip(&student.data[range.clone()])
            .zip(&teacher.data[range])
        {
            let u = s / ns;
            let v = t / nt;
            *g += factor * (u_dot_v * u - v);
        }
    }

    // Cosine term: per location with unit vectors x^, y^ and c = x^.y^,
    // d/dx [mean (1 - cos)] = -(1/(P |x|)) * (y^ - c x^).
    let locations = (bs * hs * ws) as f64;
    let spatial = hs * ws;
    for b in 0..bs {
        for h in 0..hs {
            for w in 0..ws {
                let base = student.offset(b, 0, h, w);
                let mut dot = 0.0;
                let mut ss = 0.0;
                let mut tt = 0.0;
                for c in 0..cs {
                    let sv = student.data[base + c * spatial];
                    let tv = teacher.data[base + c * spatial];
                    dot += sv * tv;
                    ss += sv * sv;
                    tt += tv * tv;
                }
                let nx = policy.divisor(math::sqrt(ss), "student patch cosine")?;
                let ny = policy.divisor(math::sqrt(tt), "teacher patch cosine")?;
                let cos = (dot / cosine_denominator(ss, tt, policy)?).clamp(-1.0, 1.0);
                let factor = -weights.w_cos / (locations * nx);
                for c in 0..cs {
                    let x_hat = student.data[base + c * spatial] / nx;
                    let y_hat = teacher.data[base + c * spatial] / ny;
                    grad[base + c * spatial] += factor * (y_hat - cos * x_hat);
                }
            }
        }
    }

    // Moment term: d sigma/ds_i = (s_i - mu)/(L sigma); the sigma = 0
    // kink takes the zero subgradient.
    let ms = moment_stats(student);
    let mt = moment_stats(teacher);
    let channel_pairs = (bs * cs) as f64;
    let l = spatial as f64;
    for b in 0..bs {
        for c in 0..cs {
            let k = b * cs + c;
            let mean_term =
                weights.w_moment * 2.0 * (ms.means[k] - mt.means[k]) / (channel_pairs * l);
            let sigma = ms.stds[k];
            let sigma_factor = if sigma > 0.0 {
                weights.w_moment * 2.0 * (sigma - mt.stds[k]) / (channel_pairs * l * sigma)
            } else {
                0.0
            };
            let base = student.offset(b, c, 0, 0);
            for (g, s) in grad[base..base + spatial]
                .iter_mut()
                .zip(&student.data[base..base + spatial])
            {
                *g += mean_term + sigma_factor * (s - ms.means[k]);
            }
        }
    }

    // Raw MSE term.
    let raw_factor = weights.w_raw * 2.0 / n;
    for (g, (s, t)) in grad.iter_mut().zip(student.data.iter().zip(&teacher.data)) {
        *g += raw_factor * (s - t);
    }

    FeatureTensor::from_vec(student.dims(), grad)
}

/// Student-vs-teacher fidelity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FidelityReport {
    /// Mean of the per-location channel-vector cosine similarities.
    pub cosine_mean: f64,
    /// Population standard deviation of those cosines.
    pub cosine_std: f64,
    /// Whole-tensor student std over whole-tensor teacher std.
    pub scale_ratio: f64,
    /// Plain elementwise MSE.
    pub mse: f64,
}

/// Calibration band bounds treated as "good": cosine mean at least 0.7
/// and scale ratio within [0.8, 1.2].
pub const GOOD_COSINE_MIN: f64 = 0.7;
pub const GOOD_SCALE_RANGE: (f64, f64) = (0.8, 1.2);

impl FidelityReport {
    pub fn within_band(&self, min_cosine: f64, scale_range: (f64, f64)) -> bool {
        self.cosine_mean >= min_cosine
            && self.scale_ratio >= scale_range.0
            && self.scale_ratio <= scale_range.1
    }

    pub fn within_default_band(&self) -> bool {
        self.within_band(GOOD_COSINE_MIN, GOOD_SCALE_RANGE)
    }
}

fn whole_tensor_std(t: &FeatureTensor) -> f64 {
    let n = t.len() as f64;
    let mean: f64 = t.data.iter().sum::<f64>() / n;
    let var: f64 = t.data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    math::sqrt(var)
}

/// Cosine statistics, scale ratio, and MSE of a student tensor against a
/// teacher tensor. Errors on zero teacher spread or any zero-norm
/// location vector.
pub fn fidelity(student: &FeatureTensor, teacher: &FeatureTensor) -> Result<FidelityReport> {
    student.same_dims(teacher)?;
    let [bs, cs, hs, ws] = student.dims();
    let spatial = hs * ws;
    let mut cosines = Vec::with_capacity(bs * spatial);
    for b in 0..bs {
        for h in 0..hs {
            for w in 0..ws {
                let base = student.offset(b, 0, h, w);
                let mut dot = 0.0;
                let mut ss = 0.0;
                let mut tt = 0.0;
                for c in 0..cs {
                    let sv = student.data[base + c * spatial];
                    let tv = teacher.data[base + c * spatial];
                    dot += sv * tv;
                    ss += sv * sv;
                    tt += tv * tv;
                }
                let denom = cosine_denominator(ss, tt, NormPolicy::Strict)?;
                cosines.push((dot / denom).clamp(-1.0, 1.0));
            }
        }
    }
    let p = cosines.len() as f64;
    let cosine_mean = cosines.iter().sum::<f64>() / p;
    let cosine_var = cosines
        .iter()
        .map(|c| (c - cosine_mean) * (c - cosine_mean))
        .sum::<f64>()
        / p;
    let teacher_std = whole_tensor_std(teacher);
    if teacher_std == 0.0 {
        return Err(Error::DegenerateInput(
            "teacher tensor has zero spread".into(),
        ));
    }
    let scale_ratio = whole_tensor_std(student) / teacher_std;
    let n = student.len() as f64;
    let mse = student
        .data
        .iter()
        .zip(&teacher.data)
        .map(|(s, t)| (s - t) * (s - t))
        .sum::<f64>()
        / n;
    Ok(FidelityReport {
        cosine_mean,
        cosine_std: math::sqrt(cosine_var),
        scale_ratio,
        mse,
    })
}

/// Central-difference gradient of the weighted total, step 1e-5 relative
/// (per element: h = 1e-5 * max(1, |x|)). This is the verification route
/// for [`loss_gradient`]; it evaluates the loss 2N times.
pub fn finite_difference_gradient(
    student: &FeatureTensor,
    teacher: &FeatureTensor,
    weights: &LossWeights,
    policy: NormPolicy,
) -> Result<FeatureTensor> {
    let mut probe = student.clone();
    let mut grad = Vec::with_capacity(student.len());
    for i in 0..student.len() {
        let x = student.get_flat(i);
        let h = 1e-5 * x.abs().max(1.0);
        probe.set_flat(i, x + h);
        let plus = compute_loss_with(&probe, teacher, weights, policy)?.total;
        probe.set_flat(i, x - h);
        let minus = compute_loss_with(&probe, teacher, weights, policy)?.total;
        probe.set_flat(i, x);
        grad.push((plus - minus) / (2.0 * h));
    }
    FeatureTensor::from_vec(student.dims(), grad)
}

/// Worst per-element relative disagreement between the analytic and
/// central-difference gradients: max |a - f| / max(|a|, |f|, 1e-6).
pub fn gradient_check_max_rel_error(
    student: &FeatureTensor,
    teacher: &FeatureTensor,
    weights: &LossWeights,
) -> Result<f64> {
    let analytic = loss_gradient(student, teacher, weights)?;
    let numeric = finite_difference_gradient(student, teacher, weights, NormPolicy::Strict)?;
    let max_rel = analytic
        .values()
        .iter()
        .zip(numeric.values())
        .map(|(a, f)| (a - f).abs() / a.abs().max(f.abs()).max(1e-6))
        .fold(0.0_f64, f64::max);
    Ok(max_rel)
}
