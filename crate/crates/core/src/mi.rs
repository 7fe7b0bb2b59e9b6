//! Monte-Carlo estimation of CM, bit-level, and BICM capacities.
//!
//! All estimators are plug-in expectations of log-likelihood ratios with
//! exact mixture denominators,
//!
//! ```text
//!   I(X;Y)    = E[ log2 ( p(y|x)     / p(y) ) ],   p(y)   = 1/M   sum_x'  p(y|x')
//!   I(B_mu;Y) = E[ log2 ( p(y|b_mu)  / p(y) ) ],   p(y|b) = 2/M   sum_{x' in X_b^mu} p(y|x')
//! ```
//!
//! and the BICM capacity is the sum of the bit-level terms. One sampling
//! pass serves the CM estimate and every bit level (common random
//! numbers), so the qualitative orderings between the quantities are
//! testable at modest sample counts. Mixtures are log-sum-exp stabilized.
//!
//! Randomness is drawn from counter-seeded ChaCha streams addressed by
//! (operation, cell, batch). Workers process disjoint batches and the
//! reduction runs in batch order with compensated summation, so results do
//! not depend on the worker count and repeat bit-identically for a fixed
//! seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelError, ChannelModel};
use crate::constellation::{
    constrained_subset, ConstellationError, ConstrainedSubset, Labeling, SignalSet,
};

const LN2: f64 = std::f64::consts::LN_2;
/// Samples per RNG stream; estimates always run whole batches.
const BATCH_SIZE: usize = 10_000;
/// Below this the standard error is meaningless.
pub const MIN_SAMPLES: usize = 1_000;

#[derive(Debug, Error, PartialEq)]
pub enum MiError {
    #[error("at least {MIN_SAMPLES} samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("sample cap {max} is below the initial sample count {initial}")]
    InvalidPlan { initial: usize, max: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
}

/// Sample-size control: start at `initial_samples` and double until the
/// worst standard error of the run drops below `target_std_error` (if set)
/// or `max_samples` is reached.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SamplingPlan {
    pub initial_samples: usize,
    pub target_std_error: Option<f64>,
    pub max_samples: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            initial_samples: 200_000,
            target_std_error: Some(0.002),
            max_samples: 10_000_000,
        }
    }
}

impl SamplingPlan {
    /// Exactly `n` samples (rounded up to whole batches), no doubling.
    pub fn fixed(n: usize) -> Self {
        SamplingPlan {
            initial_samples: n,
            target_std_error: None,
            max_samples: n,
        }
    }

    fn validate(&self) -> Result<(), MiError> {
        if self.initial_samples < MIN_SAMPLES {
            return Err(MiError::TooFewSamples(self.initial_samples));
        }
        if self.max_samples < self.initial_samples {
            return Err(MiError::InvalidPlan {
                initial: self.initial_samples,
                max: self.max_samples,
            });
        }
        Ok(())
    }
}

/// A Monte-Carlo mutual-information estimate in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MiEstimate {
    pub value_bits: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// Reproducibility token: the base seed of the streams that produced
    /// this estimate.
    pub seed: u64,
}

/// BICM capacity with its per-level breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct BicmEstimate {
    pub total: MiEstimate,
    pub levels: Vec<MiEstimate>,
}

/// CM capacity, bit-level capacities, and BICM capacity estimated from one
/// shared sample stream.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEstimate {
    pub cm: MiEstimate,
    pub levels: Vec<MiEstimate>,
    pub bicm: MiEstimate,
}

// ---------------------------------------------------------------------------
// Stream addressing
// ---------------------------------------------------------------------------

mod op {
    pub const CM: u16 = 1;
    pub const JOINT: u16 = 2;
    pub const BIT_LEVEL: u16 = 3;
    pub const SUBSET_CM: u16 = 4;
    pub const CONDITIONAL: u16 = 5;
}

fn stream_id(operation: u16, cell: u16, batch: u32) -> u64 {
    ((operation as u64) << 48) | ((cell as u64) << 32) | batch as u64
}

// ---------------------------------------------------------------------------
// Generic batched runner
// ---------------------------------------------------------------------------

#[derive(Default)]
struct Scratch {
    observation: Vec<f64>,
    loglik: Vec<f64>,
}

trait SampleFn: Sync {
    fn stat_count(&self) -> usize;
    /// Draws one channel use and writes one term per statistic.
    fn draw(&self, rng: &mut ChaCha8Rng, scratch: &mut Scratch, out: &mut [f64]);
}

struct BatchPartial {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

fn run_batch<E: SampleFn>(
    eval: &E,
    seed: u64,
    operation: u16,
    cell: u16,
    batch: u32,
) -> BatchPartial {
    let stats = eval.stat_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(operation, cell, batch));
    let mut scratch = Scratch::default();
    let mut terms = vec![0.0; stats];
    let mut sum = vec![0.0; stats];
    let mut sum_sq = vec![0.0; stats];
    for _ in 0..BATCH_SIZE {
        eval.draw(&mut rng, &mut scratch, &mut terms);
        for ((s, q), &t) in sum.iter_mut().zip(&mut sum_sq).zip(&terms) {
            *s += t;
            *q += t * t;
        }
    }
    BatchPartial { sum, sum_sq }
}

#[derive(Clone, Copy, Default)]
struct KahanSum {
    total: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.total + y;
        self.carry = (t - self.total) - y;
        self.total = t;
    }
}

/// Reduces batch partials in batch order; order-insensitive up to the
/// compensation, hence independent of how batches were scheduled.
fn reduce(partials: &[BatchPartial], stats: usize) -> (Vec<(f64, f64)>, u64) {
    let n = (partials.len() * BATCH_SIZE) as u64;
    let nf = n as f64;
    let mut out = Vec::with_capacity(stats);
    for k in 0..stats {
        let mut sum = KahanSum::default();
        let mut sum_sq = KahanSum::default();
        for p in partials {
            sum.add(p.sum[k]);
            sum_sq.add(p.sum_sq[k]);
        }
        let mean = sum.total / nf;
        let variance = (sum_sq.total / nf - mean * mean).max(0.0);
        out.push((mean, (variance / nf).sqrt()));
    }
    (out, n)
}

fn run_monte_carlo<E: SampleFn>(
    eval: &E,
    plan: &SamplingPlan,
    seed: u64,
    operation: u16,
    cell: u16,
) -> Result<(Vec<(f64, f64)>, u64), MiError> {
    plan.validate()?;
    let stats = eval.stat_count();
    let cap_batches = plan.max_samples.div_ceil(BATCH_SIZE);
    let mut target_batches = plan.initial_samples.div_ceil(BATCH_SIZE).min(cap_batches);
    let mut partials: Vec<BatchPartial> = Vec::new();
    loop {
        let start = partials.len() as u32;
        let mut fresh: Vec<BatchPartial> = (start..target_batches as u32)
            .into_par_iter()
            .map(|batch| run_batch(eval, seed, operation, cell, batch))
            .collect();
        partials.append(&mut fresh);

        let (summary, n) = reduce(&partials, stats);
        let worst = summary.iter().map(|&(_, se)| se).fold(0.0, f64::max);
        let met = plan.target_std_error.is_none_or(|t| worst < t);
        if met || partials.len() >= cap_batches {
            return Ok((summary, n));
        }
        target_batches = (partials.len() * 2).min(cap_batches);
    }
}

// ---------------------------------------------------------------------------
// Evaluators
// ---------------------------------------------------------------------------

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

fn log_sum_exp_indices(values: &[f64], indices: &[usize]) -> f64 {
    let max = indices
        .iter()
        .fold(f64::NEG_INFINITY, |a, &i| a.max(values[i]));
    let sum: f64 = indices.iter().map(|&i| (values[i] - max).exp()).sum();
    max + sum.ln()
}

struct LabelGroups {
    bits: usize,
    /// bit_of[mu-1][point] in {0,1}
    bit_of: Vec<Vec<u8>>,
    /// members[mu-1][b]
    members: Vec<[Vec<usize>; 2]>,
}

impl LabelGroups {
    fn new(labeling: &Labeling) -> Self {
        let bits = labeling.bits_per_symbol() as usize;
        let size = labeling.size();
        let mut bit_of = Vec::with_capacity(bits);
        let mut members = Vec::with_capacity(bits);
        for mu in 1..=bits {
            let values: Vec<u8> = (0..size).map(|i| labeling.bit(i, mu)).collect();
            let zero = (0..size).filter(|&i| values[i] == 0).collect();
            let one = (0..size).filter(|&i| values[i] == 1).collect();
            bit_of.push(values);
            members.push([zero, one]);
        }
        LabelGroups {
            bits,
            bit_of,
            members,
        }
    }
}

/// CM term plus, when labeled, one term per bit level and their sum.
struct MixtureEval<'a> {
    model: &'a ChannelModel,
    points: Vec<&'a [f64]>,
    labels: Option<LabelGroups>,
}

impl<'a> MixtureEval<'a> {
    fn evaluate_likelihoods(&self, rng: &mut ChaCha8Rng, scratch: &mut Scratch) -> usize {
        let drawn = rng.random_range(0..self.points.len());
        self.model
            .sample_into(self.points[drawn], rng, &mut scratch.observation);
        scratch.loglik.clear();
        for p in &self.points {
            scratch
                .loglik
                .push(self.model.log_likelihood_unchecked(&scratch.observation, p));
        }
        drawn
    }
}

impl SampleFn for MixtureEval<'_> {
    fn stat_count(&self) -> usize {
        match &self.labels {
            Some(groups) => groups.bits + 2,
            None => 1,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, scratch: &mut Scratch, out: &mut [f64]) {
        let drawn = self.evaluate_likelihoods(rng, scratch);
        let loglik = &scratch.loglik;
        let log_mix = log_sum_exp(loglik) - (self.points.len() as f64).ln();
        out[0] = (loglik[drawn] - log_mix) / LN2;
        if let Some(groups) = &self.labels {
            let mut total = 0.0;
            for mu in 0..groups.bits {
                let b = groups.bit_of[mu][drawn] as usize;
                let members = &groups.members[mu][b];
                let log_mix_bit =
                    log_sum_exp_indices(loglik, members) - (members.len() as f64).ln();
                let term = (log_mix_bit - log_mix) / LN2;
                out[1 + mu] = term;
                total += term;
            }
            out[groups.bits + 1] = total;
        }
    }
}

/// Single bit-level term I(B_mu;Y) for a standalone estimate.
struct BitLevelEval<'a> {
    model: &'a ChannelModel,
    points: Vec<&'a [f64]>,
    bit_of: Vec<u8>,
    members: [Vec<usize>; 2],
}

impl SampleFn for BitLevelEval<'_> {
    fn stat_count(&self) -> usize {
        1
    }

    fn draw(&self, rng: &mut ChaCha8Rng, scratch: &mut Scratch, out: &mut [f64]) {
        let drawn = rng.random_range(0..self.points.len());
        self.model
            .sample_into(self.points[drawn], rng, &mut scratch.observation);
        scratch.loglik.clear();
        for p in &self.points {
            scratch
                .loglik
                .push(self.model.log_likelihood_unchecked(&scratch.observation, p));
        }
        let loglik = &scratch.loglik;
        let log_mix = log_sum_exp(loglik) - (self.points.len() as f64).ln();
        let members = &self.members[self.bit_of[drawn] as usize];
        let log_mix_bit = log_sum_exp_indices(loglik, members) - (members.len() as f64).ln();
        out[0] = (log_mix_bit - log_mix) / LN2;
    }
}

/// One chain-rule term I(B_mu; Y | B_1..B_{mu-1}) via conditional mixtures
/// over label-prefix groups.
struct ConditionalEval<'a> {
    model: &'a ChannelModel,
    points: Vec<&'a [f64]>,
    prev_group_of: Vec<usize>,
    prev_groups: Vec<Vec<usize>>,
    cur_group_of: Vec<usize>,
    cur_groups: Vec<Vec<usize>>,
}

impl SampleFn for ConditionalEval<'_> {
    fn stat_count(&self) -> usize {
        1
    }

    fn draw(&self, rng: &mut ChaCha8Rng, scratch: &mut Scratch, out: &mut [f64]) {
        let drawn = rng.random_range(0..self.points.len());
        self.model
            .sample_into(self.points[drawn], rng, &mut scratch.observation);
        scratch.loglik.clear();
        for p in &self.points {
            scratch
                .loglik
                .push(self.model.log_likelihood_unchecked(&scratch.observation, p));
        }
        let loglik = &scratch.loglik;
        let prev = &self.prev_groups[self.prev_group_of[drawn]];
        let cur = &self.cur_groups[self.cur_group_of[drawn]];
        let log_prev = log_sum_exp_indices(loglik, prev) - (prev.len() as f64).ln();
        let log_cur = log_sum_exp_indices(loglik, cur) - (cur.len() as f64).ln();
        out[0] = (log_cur - log_prev) / LN2;
    }
}

// ---------------------------------------------------------------------------
// Public estimators
// ---------------------------------------------------------------------------

fn point_refs(set: &SignalSet) -> Vec<&[f64]> {
    set.points().iter().map(|p| p.as_slice()).collect()
}

fn check_labeling(set: &SignalSet, labeling: &Labeling) -> Result<(), MiError> {
    if labeling.size() != set.size() {
        return Err(MiError::Constellation(ConstellationError::SizeMismatch {
            labels: labeling.size(),
            points: set.size(),
        }));
    }
    Ok(())
}

fn estimate(summary: (f64, f64), n: u64, seed: u64) -> MiEstimate {
    MiEstimate {
        value_bits: summary.0,
        std_error: summary.1,
        n_samples: n,
        seed,
    }
}

/// Estimates the CM capacity I(X;Y) of `set` over `model`.
pub fn cm_capacity(
    set: &SignalSet,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<MiEstimate, MiError> {
    cm_capacity_cell(set, model, plan, seed, 0)
}

pub(crate) fn cm_capacity_cell(
    set: &SignalSet,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
    cell: u16,
) -> Result<MiEstimate, MiError> {
    model.check_compatible(set)?;
    let eval = MixtureEval {
        model,
        points: point_refs(set),
        labels: None,
    };
    let (summary, n) = run_monte_carlo(&eval, plan, seed, op::CM, cell)?;
    Ok(estimate(summary[0], n, seed))
}

/// CM capacity of a constrained sub-constellation, with the input uniform
/// over the subset.
pub fn cm_capacity_constrained(
    set: &SignalSet,
    subset: &ConstrainedSubset,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<MiEstimate, MiError> {
    model.check_compatible(set)?;
    let points: Vec<&[f64]> = subset
        .member_indices
        .iter()
        .map(|&i| set.point(i))
        .collect();
    let eval = MixtureEval {
        model,
        points,
        labels: None,
    };
    let cell = ((subset.bit_position as u16) << 1) | subset.bit_value as u16;
    let (summary, n) = run_monte_carlo(&eval, plan, seed, op::SUBSET_CM, cell)?;
    Ok(estimate(summary[0], n, seed))
}

/// CM capacity, all bit-level capacities, and the BICM capacity from one
/// shared sample stream.
pub fn joint_capacity(
    set: &SignalSet,
    labeling: &Labeling,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<JointEstimate, MiError> {
    joint_capacity_cell(set, labeling, model, plan, seed, 0)
}

pub(crate) fn joint_capacity_cell(
    set: &SignalSet,
    labeling: &Labeling,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
    cell: u16,
) -> Result<JointEstimate, MiError> {
    model.check_compatible(set)?;
    check_labeling(set, labeling)?;
    let groups = LabelGroups::new(labeling);
    let bits = groups.bits;
    let eval = MixtureEval {
        model,
        points: point_refs(set),
        labels: Some(groups),
    };
    let (summary, n) = run_monte_carlo(&eval, plan, seed, op::JOINT, cell)?;
    Ok(JointEstimate {
        cm: estimate(summary[0], n, seed),
        levels: (0..bits)
            .map(|mu| estimate(summary[1 + mu], n, seed))
            .collect(),
        bicm: estimate(summary[bits + 1], n, seed),
    })
}

/// BICM capacity (sum of bit-level capacities) with per-level breakdown.
pub fn bicm_capacity(
    set: &SignalSet,
    labeling: &Labeling,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<BicmEstimate, MiError> {
    let joint = joint_capacity(set, labeling, model, plan, seed)?;
    Ok(BicmEstimate {
        total: joint.bicm,
        levels: joint.levels,
    })
}

/// Standalone estimate of one bit-level capacity I(B_mu;Y), drawn from its
/// own stream.
pub fn bit_level_capacity(
    set: &SignalSet,
    labeling: &Labeling,
    model: &ChannelModel,
    mu: usize,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<MiEstimate, MiError> {
    model.check_compatible(set)?;
    check_labeling(set, labeling)?;
    let zero = constrained_subset(set, labeling, mu, 0)?;
    let one = constrained_subset(set, labeling, mu, 1)?;
    let eval = BitLevelEval {
        model,
        points: point_refs(set),
        bit_of: (0..set.size()).map(|i| labeling.bit(i, mu)).collect(),
        members: [zero.member_indices, one.member_indices],
    };
    let (summary, n) = run_monte_carlo(&eval, plan, seed, op::BIT_LEVEL, mu as u16)?;
    Ok(estimate(summary[0], n, seed))
}

/// BICM capacity via the CM decomposition
///
/// ```text
///   C_bicm = sum_mu ( C_cm - 1/2 sum_b C_cm(X_b^mu) )
/// ```
///
/// with every term estimated from an independent stream. Cross-checks the
/// direct sum-of-levels estimator.
pub fn bicm_capacity_via_decomposition(
    set: &SignalSet,
    labeling: &Labeling,
    model: &ChannelModel,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<MiEstimate, MiError> {
    check_labeling(set, labeling)?;
    let bits = labeling.bits_per_symbol() as usize;
    let full = cm_capacity(set, model, plan, seed)?;
    let mut value = bits as f64 * full.value_bits;
    let mut variance = (bits as f64 * full.std_error).powi(2);
    let mut n_total = full.n_samples;
    for mu in 1..=bits {
        for b in 0..2u8 {
            let subset = constrained_subset(set, labeling, mu, b)?;
            let sub = cm_capacity_constrained(set, &subset, model, plan, seed)?;
            value -= 0.5 * sub.value_bits;
            variance += 0.25 * sub.std_error * sub.std_error;
            n_total += sub.n_samples;
        }
    }
    Ok(MiEstimate {
        value_bits: value,
        std_error: variance.sqrt(),
        n_samples: n_total,
        seed,
    })
}

/// Chain-rule term I(B_mu; Y | B_1..B_{mu-1}); summing over mu recovers the
/// CM capacity.
pub fn conditional_bit_capacity(
    set: &SignalSet,
    labeling: &Labeling,
    model: &ChannelModel,
    mu: usize,
    plan: &SamplingPlan,
    seed: u64,
) -> Result<MiEstimate, MiError> {
    model.check_compatible(set)?;
    check_labeling(set, labeling)?;
    let bits = labeling.bits_per_symbol() as usize;
    if mu == 0 || mu > bits {
        return Err(MiError::Constellation(
            ConstellationError::BitPositionOutOfRange {
                mu,
                bits: bits as u32,
            },
        ));
    }
    let prefix_groups = |len: usize| -> (Vec<usize>, Vec<Vec<usize>>) {
        let group_of: Vec<usize> = (0..set.size())
            .map(|i| (labeling.label_of(i) >> (bits - len)) as usize)
            .collect();
        let mut groups = vec![Vec::new(); 1 << len];
        for (i, &g) in group_of.iter().enumerate() {
            groups[g].push(i);
        }
        (group_of, groups)
    };
    let (prev_group_of, prev_groups) = prefix_groups(mu - 1);
    let (cur_group_of, cur_groups) = prefix_groups(mu);
    let eval = ConditionalEval {
        model,
        points: point_refs(set),
        prev_group_of,
        prev_groups,
        cur_group_of,
        cur_groups,
    };
    let (summary, n) = run_monte_carlo(&eval, plan, seed, op::CONDITIONAL, mu as u16)?;
    Ok(estimate(summary[0], n, seed))
}
