//! Dialogue-act prediction from conditional frequencies of act sequences.
//!
//! The model counts direction-tagged act n-grams (default order 3) over a
//! corpus and predicts the next act by interpolating the relative frequencies
//! of all orders. Interpolation weights come from deleted interpolation on a
//! held-out corpus slice; unigram frequencies are add-one smoothed so every
//! inventory act keeps nonzero probability even for never-seen sequences.
//!
//! Histories are lists of `(act, direction)` pairs where each pair carries the
//! speaker direction of the transition to the *following* element; the last
//! element's tag is the hypothesized direction into the act being predicted.
//! Querying the same history once per direction realizes per-speaker
//! predictions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use alloc::collections::BTreeMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{split_corpus, ActLabel, Corpus};

/// Speaker direction of one transition in an act sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionTag {
    SameSpeaker,
    SpeakerChange,
    /// Reserved for the transition into a dialogue's first utterance, which
    /// has no preceding speaker.
    DialogueStart,
}

impl DirectionTag {
    pub fn between(prev_speaker: &str, next_speaker: &str) -> DirectionTag {
        if prev_speaker == next_speaker {
            DirectionTag::SameSpeaker
        } else {
            DirectionTag::SpeakerChange
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DirectionTag::SameSpeaker => "same_speaker",
            DirectionTag::SpeakerChange => "speaker_change",
            DirectionTag::DialogueStart => "dialogue_start",
        }
    }
}

impl fmt::Display for DirectionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One history element: an act plus the direction of the transition to the
/// element after it (or into the predicted act, for the last element).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaggedAct {
    pub act: ActLabel,
    pub direction: DirectionTag,
}

impl TaggedAct {
    pub fn new(act: impl Into<ActLabel>, direction: DirectionTag) -> TaggedAct {
        TaggedAct {
            act: act.into(),
            direction,
        }
    }
}

/// A ranked next-act hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub act: ActLabel,
    pub probability: f64,
}

impl Prediction {
    /// The probability scaled by 1000 and rounded, the display convention for
    /// snapshots.
    pub fn per_mille(&self) -> i64 {
        per_mille(self.probability)
    }
}

pub(crate) fn per_mille(p: f64) -> i64 {
    // f64::round is unavailable without std; probabilities are non-negative.
    (p * 1000.0 + 0.5) as i64
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    total: u64,
    per_act: BTreeMap<ActLabel, u64>,
}

/// An interpolated conditional-frequency model over dialogue-act sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    max_order: usize,
    lambdas: Vec<f64>,
    inventory: Vec<ActLabel>,
    counts: BTreeMap<Vec<TaggedAct>, ContextCounts>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredictError {
    EmptyCorpus,
    InvalidMaxOrder(usize),
    UnknownAct(ActLabel),
    InvalidGapLength(usize),
    InvalidLambdas(String),
    UnsupportedVersion(u32),
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::EmptyCorpus => f.write_str("corpus contains no utterances"),
            PredictError::InvalidMaxOrder(n) => write!(f, "max order must be >= 1, got {n}"),
            PredictError::UnknownAct(a) => {
                write!(f, "act {:?} is outside the model inventory", a.as_str())
            }
            PredictError::InvalidGapLength(n) => {
                write!(f, "gap length must lie in 1..=3, got {n}")
            }
            PredictError::InvalidLambdas(why) => write!(f, "invalid lambdas: {why}"),
            PredictError::UnsupportedVersion(v) => {
                write!(f, "unsupported model file version {v}")
            }
        }
    }
}

/// Training knobs; [`train`] uses the defaults.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub max_order: usize,
    /// Corpus fraction held out for weight estimation.
    pub held_out_fraction: f64,
    /// Seed of the deterministic held-out split.
    pub split_seed: u64,
    /// Fixed interpolation weights instead of estimating them.
    pub lambdas: Option<Vec<f64>>,
}

pub const DEFAULT_MAX_ORDER: usize = 3;
pub const DEFAULT_HELD_OUT_FRACTION: f64 = 0.1;
pub const DEFAULT_SPLIT_SEED: u64 = 1996;

/// Held-out corpora smaller than this fall back to fixed weights.
pub const MIN_HELD_OUT_EVENTS: usize = 50;

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            max_order: DEFAULT_MAX_ORDER,
            held_out_fraction: DEFAULT_HELD_OUT_FRACTION,
            split_seed: DEFAULT_SPLIT_SEED,
            lambdas: None,
        }
    }
}

/// Fixed fallback weights for corpora too small for deleted interpolation,
/// biased towards the higher orders.
fn fallback_lambdas(max_order: usize) -> Vec<f64> {
    match max_order {
        1 => alloc::vec![1.0],
        2 => alloc::vec![0.25, 0.75],
        3 => alloc::vec![0.1, 0.3, 0.6],
        n => {
            let mut v: Vec<f64> = (0..n).map(|o| (1u64 << o) as f64).collect();
            let sum: f64 = v.iter().sum();
            for x in &mut v {
                *x /= sum;
            }
            v
        }
    }
}

/// Trains a model with default configuration: order 3, 10% held-out deleted
/// interpolation.
pub fn train(corpus: &Corpus, max_order: usize) -> Result<NGramModel, PredictError> {
    train_with(
        corpus,
        &TrainConfig {
            max_order,
            ..TrainConfig::default()
        },
    )
}

pub fn train_with(corpus: &Corpus, config: &TrainConfig) -> Result<NGramModel, PredictError> {
    if config.max_order < 1 {
        return Err(PredictError::InvalidMaxOrder(config.max_order));
    }
    if corpus.utterance_count() == 0 {
        return Err(PredictError::EmptyCorpus);
    }
    let mut inventory = corpus.act_inventory.clone();
    inventory.sort_unstable();
    inventory.dedup();
    for dialogue in &corpus.dialogues {
        for (act, _) in dialogue.flat_acts() {
            if inventory.binary_search(act).is_err() {
                return Err(PredictError::UnknownAct(act.clone()));
            }
        }
    }

    let lambdas = match &config.lambdas {
        Some(l) => {
            validate_lambdas(l, config.max_order)?;
            l.clone()
        }
        None => estimate_lambdas(corpus, config),
    };

    Ok(NGramModel {
        max_order: config.max_order,
        lambdas,
        inventory,
        counts: count_corpus(corpus, config.max_order),
    })
}

fn validate_lambdas(l: &[f64], max_order: usize) -> Result<(), PredictError> {
    if l.len() != max_order {
        return Err(PredictError::InvalidLambdas(alloc::format!(
            "expected {max_order} weights, got {}",
            l.len()
        )));
    }
    if l.iter().any(|x| *x < 0.0) {
        return Err(PredictError::InvalidLambdas("negative weight".into()));
    }
    let sum: f64 = l.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(PredictError::InvalidLambdas(alloc::format!(
            "weights sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Accumulates direction-tagged n-gram counts over every dialogue's flattened
/// act sequence, all orders up to `max_order`.
fn count_corpus(corpus: &Corpus, max_order: usize) -> BTreeMap<Vec<TaggedAct>, ContextCounts> {
    let mut counts: BTreeMap<Vec<TaggedAct>, ContextCounts> = BTreeMap::new();
    for dialogue in &corpus.dialogues {
        let seq: Vec<(&ActLabel, &str)> = dialogue.flat_acts().collect();
        for i in 0..seq.len() {
            for order in 1..=max_order.min(i + 1) {
                let context = tagged_context(&seq, i, order - 1);
                let bucket = counts.entry(context).or_default();
                bucket.total += 1;
                *bucket.per_act.entry(seq[i].0.clone()).or_default() += 1;
            }
        }
    }
    counts
}

/// The `len` elements before position `i`, each tagged with the direction of
/// the transition to its successor (the last one with the transition into
/// position `i` itself).
fn tagged_context(seq: &[(&ActLabel, &str)], i: usize, len: usize) -> Vec<TaggedAct> {
    (i - len..i)
        .map(|j| TaggedAct {
            act: seq[j].0.clone(),
            direction: DirectionTag::between(seq[j].1, seq[j + 1].1),
        })
        .collect()
}

/// Deleted interpolation: counts come from the main split, then every
/// held-out event gives its unit weight to the order whose raw relative
/// frequency predicts it best (ties to the lower order). Falls back to fixed
/// weights when the held-out part is too small.
fn estimate_lambdas(corpus: &Corpus, config: &TrainConfig) -> Vec<f64> {
    let split = split_corpus(corpus, config.held_out_fraction, config.split_seed);
    let (main, held) = match split {
        Ok(pair) => pair,
        Err(_) => return fallback_lambdas(config.max_order),
    };
    if held.utterance_count() < MIN_HELD_OUT_EVENTS {
        return fallback_lambdas(config.max_order);
    }

    let main_counts = count_corpus(&main, config.max_order);
    let main_unigram_total: u64 = main_counts.get(&Vec::new()).map(|c| c.total).unwrap_or(0);
    let mut weights = alloc::vec![0f64; config.max_order];

    for dialogue in &held.dialogues {
        let seq: Vec<(&ActLabel, &str)> = dialogue.flat_acts().collect();
        for i in 0..seq.len() {
            let mut best: Option<(usize, f64)> = None;
            for order in 1..=config.max_order.min(i + 1) {
                let context = tagged_context(&seq, i, order - 1);
                let freq = match main_counts.get(&context) {
                    Some(bucket) if bucket.total > 0 => {
                        let c = bucket.per_act.get(seq[i].0).copied().unwrap_or(0);
                        if order == 1 && main_unigram_total > 0 {
                            c as f64 / main_unigram_total as f64
                        } else {
                            c as f64 / bucket.total as f64
                        }
                    }
                    _ => continue,
                };
                if freq > 0.0 && best.is_none_or(|(_, b)| freq > b) {
                    best = Some((order, freq));
                }
            }
            if let Some((order, _)) = best {
                weights[order - 1] += 1.0;
            }
        }
    }

    let sum: f64 = weights.iter().sum();
    if sum == 0.0 {
        return fallback_lambdas(config.max_order);
    }
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

impl NGramModel {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn inventory(&self) -> &[ActLabel] {
        &self.inventory
    }

    fn unigram_bucket(&self) -> Option<&ContextCounts> {
        self.counts.get(&Vec::new())
    }

    /// Add-one smoothed unigram frequency.
    fn unigram(&self, act: &ActLabel) -> f64 {
        let (count, total) = match self.unigram_bucket() {
            Some(bucket) => (bucket.per_act.get(act).copied().unwrap_or(0), bucket.total),
            None => (0, 0),
        };
        (count as f64 + 1.0) / (total as f64 + self.inventory.len() as f64)
    }

    /// The full interpolated next-act distribution for a history, in
    /// inventory order. Always sums to 1 (up to rounding): weights of the
    /// orders applicable to this history are renormalized, and orders whose
    /// context was never seen drop out.
    pub fn distribution(&self, history: &[TaggedAct]) -> Result<Vec<Prediction>, PredictError> {
        for item in history {
            if self.inventory.binary_search(&item.act).is_err() {
                return Err(PredictError::UnknownAct(item.act.clone()));
            }
        }
        let start = history.len().saturating_sub(self.max_order - 1);
        let history = &history[start..];

        // Applicable orders: the unigram always, higher orders when the
        // history is long enough and their context has been seen.
        let mut applicable: Vec<(usize, Option<&ContextCounts>)> =
            alloc::vec![(1, self.unigram_bucket())];
        for order in 2..=self.max_order {
            if history.len() < order - 1 {
                break;
            }
            let context = &history[history.len() - (order - 1)..];
            if let Some(bucket) = self.counts.get(context) {
                if bucket.total > 0 {
                    applicable.push((order, Some(bucket)));
                }
            }
        }
        let weight_sum: f64 = applicable.iter().map(|(o, _)| self.lambdas[o - 1]).sum();

        let mut out = Vec::with_capacity(self.inventory.len());
        for act in &self.inventory {
            let mut p = 0.0;
            for (order, bucket) in &applicable {
                let f = if *order == 1 {
                    self.unigram(act)
                } else {
                    let bucket = bucket.expect("non-unigram orders carry their bucket");
                    bucket.per_act.get(act).copied().unwrap_or(0) as f64 / bucket.total as f64
                };
                p += self.lambdas[order - 1] / weight_sum * f;
            }
            out.push(Prediction {
                act: act.clone(),
                probability: p,
            });
        }
        Ok(out)
    }

    /// The `k` most probable next acts, ties broken by act name.
    pub fn predict(
        &self,
        history: &[TaggedAct],
        k: usize,
    ) -> Result<Vec<Prediction>, PredictError> {
        let mut dist = self.distribution(history)?;
        dist.sort_by(|a, b| {
            b.probability
                .total_cmp(&a.probability)
                .then_with(|| a.act.cmp(&b.act))
        });
        dist.truncate(k);
        Ok(dist)
    }

    /// The interpolated probability of one act after a history.
    pub fn probability(&self, history: &[TaggedAct], act: &ActLabel) -> Result<f64, PredictError> {
        if self.inventory.binary_search(act).is_err() {
            return Err(PredictError::UnknownAct(act.clone()));
        }
        let dist = self.distribution(history)?;
        Ok(dist
            .into_iter()
            .find(|p| &p.act == act)
            .map(|p| p.probability)
            .expect("act is in the inventory"))
    }

    /// Fraction of corpus positions whose annotated act falls within the
    /// model's top-`n` prediction, histories direction-tagged with the true
    /// next speaker.
    pub fn evaluate_topn(&self, corpus: &Corpus, n: usize) -> Result<f64, PredictError> {
        let mut hits = 0usize;
        let mut total = 0usize;
        for dialogue in &corpus.dialogues {
            let seq: Vec<(&ActLabel, &str)> = dialogue.flat_acts().collect();
            for i in 0..seq.len() {
                let history = tagged_context(&seq, i, i.min(self.max_order - 1));
                let top = self.predict(&history, n)?;
                total += 1;
                if top.iter().any(|p| &p.act == seq[i].0) {
                    hits += 1;
                }
            }
        }
        if total == 0 {
            return Err(PredictError::EmptyCorpus);
        }
        Ok(hits as f64 / total as f64)
    }

    /// Ranks candidate act sequences for a gap of `gap_length` uncovered
    /// positions between two contexts. Each filler is scored by the product
    /// of interpolated probabilities of its acts given the left context and
    /// of the first right-context act given the filled history. Transitions
    /// inside the gap count as same-speaker continuations.
    pub fn estimate_gap(
        &self,
        left_context: &[TaggedAct],
        right_context: &[TaggedAct],
        gap_length: usize,
    ) -> Result<Vec<(Vec<ActLabel>, f64)>, PredictError> {
        if !(1..=3).contains(&gap_length) {
            return Err(PredictError::InvalidGapLength(gap_length));
        }
        let mut ranked: Vec<(Vec<ActLabel>, f64)> = Vec::new();
        let mut filler = alloc::vec![0usize; gap_length];
        loop {
            let mut history: Vec<TaggedAct> = left_context.to_vec();
            let mut score = 1.0;
            for &idx in &filler {
                let act = &self.inventory[idx];
                score *= self.probability(&history, act)?;
                history.push(TaggedAct {
                    act: act.clone(),
                    direction: DirectionTag::SameSpeaker,
                });
            }
            if let Some(next) = right_context.first() {
                score *= self.probability(&history, &next.act)?;
            }
            ranked.push((
                filler.iter().map(|&i| self.inventory[i].clone()).collect(),
                score,
            ));

            // Advance the odometer over inventory^gap_length.
            let mut pos = gap_length;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                filler[pos] += 1;
                if filler[pos] < self.inventory.len() {
                    break;
                }
                filler[pos] = 0;
            }
            if filler.iter().all(|&i| i == 0) {
                break;
            }
        }
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(ranked)
    }
}

// --- model file format -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CountRecord {
    history: Vec<TaggedAct>,
    act: ActLabel,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    max_order: usize,
    lambdas: Vec<f64>,
    inventory: Vec<ActLabel>,
    counts: Vec<CountRecord>,
}

pub const MODEL_FILE_VERSION: u32 = 1;

impl Serialize for NGramModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let counts = self
            .counts
            .iter()
            .flat_map(|(history, bucket)| {
                bucket.per_act.iter().map(move |(act, count)| CountRecord {
                    history: history.clone(),
                    act: act.clone(),
                    count: *count,
                })
            })
            .collect();
        ModelFile {
            version: MODEL_FILE_VERSION,
            max_order: self.max_order,
            lambdas: self.lambdas.clone(),
            inventory: self.inventory.clone(),
            counts,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NGramModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = ModelFile::deserialize(deserializer)?;
        if file.version != MODEL_FILE_VERSION {
            return Err(serde::de::Error::custom(PredictError::UnsupportedVersion(
                file.version,
            )));
        }
        validate_lambdas(&file.lambdas, file.max_order).map_err(serde::de::Error::custom)?;
        let mut inventory = file.inventory;
        inventory.sort_unstable();
        inventory.dedup();
        let mut counts: BTreeMap<Vec<TaggedAct>, ContextCounts> = BTreeMap::new();
        for record in file.counts {
            let bucket = counts.entry(record.history).or_default();
            bucket.total += record.count;
            *bucket.per_act.entry(record.act).or_default() += record.count;
        }
        Ok(NGramModel {
            max_order: file.max_order,
            lambdas: file.lambdas,
            inventory,
            counts,
        })
    }
}
