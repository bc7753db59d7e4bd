//! Plan recognition: turn-level operators cover act sequences, turns link
//! into a phase-ordered intentional structure, and turn operators can be
//! mined from a corpus.
//!
//! Recognition is a greedy longest-match left-to-right cover. It never fails:
//! spans no operator covers are wrapped in repair nodes, which can later be
//! annotated with the predictor's best guess of what the gap was.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use alloc::collections::BTreeMap;
use serde::{Deserialize, Serialize};

use crate::corpus::{ActLabel, Corpus};
use crate::predict::{DirectionTag, NGramModel, PredictError, TaggedAct};

/// Coarse stage of a dialogue. The order is the canonical progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DialoguePhase {
    Opening,
    Negotiation,
    Closing,
}

impl DialoguePhase {
    pub fn name(self) -> &'static str {
        match self {
            DialoguePhase::Opening => "opening",
            DialoguePhase::Negotiation => "negotiation",
            DialoguePhase::Closing => "closing",
        }
    }
}

impl fmt::Display for DialoguePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Phase an act argues for when no operator tag says otherwise.
pub fn fallback_phase_vote(act: &ActLabel) -> DialoguePhase {
    match act.as_str() {
        "greet" | "introduce_name" => DialoguePhase::Opening,
        "bye" => DialoguePhase::Closing,
        _ => DialoguePhase::Negotiation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorLevel {
    Turn,
    Phase,
    Dialogue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    HandCoded,
    Learned,
    Repair,
}

/// A rewrite rule: a named goal expanding into a sequence of symbols.
/// Turn-level bodies contain dialogue-act labels only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOperator {
    pub name: String,
    pub level: OperatorLevel,
    pub body: Vec<ActLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<DialoguePhase>,
    pub kind: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanError {
    EmptyCorpus,
    InvalidMinSupport(usize),
    EmptyBody(String),
    DuplicateOperatorName(String),
    NoSuchTurn(usize),
    NotARepairNode,
    Predict(PredictError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::EmptyCorpus => f.write_str("corpus contains no turns"),
            PlanError::InvalidMinSupport(n) => write!(f, "min support must be >= 1, got {n}"),
            PlanError::EmptyBody(name) => write!(f, "operator {name:?} has an empty body"),
            PlanError::DuplicateOperatorName(name) => {
                write!(f, "duplicate operator name {name:?}")
            }
            PlanError::NoSuchTurn(i) => write!(f, "no turn {i} in the structure"),
            PlanError::NotARepairNode => f.write_str("addressed node is not a repair node"),
            PlanError::Predict(e) => write!(f, "gap estimation failed: {e}"),
        }
    }
}

impl From<PredictError> for PlanError {
    fn from(e: PredictError) -> PlanError {
        PlanError::Predict(e)
    }
}

/// A validated operator collection; immutable once built and shareable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OperatorSet {
    operators: Vec<PlanOperator>,
}

impl OperatorSet {
    pub fn new(operators: Vec<PlanOperator>) -> Result<OperatorSet, PlanError> {
        let mut names: Vec<&str> = Vec::new();
        for op in &operators {
            if op.body.is_empty() {
                return Err(PlanError::EmptyBody(op.name.clone()));
            }
            if names.contains(&op.name.as_str()) {
                return Err(PlanError::DuplicateOperatorName(op.name.clone()));
            }
            names.push(&op.name);
        }
        Ok(OperatorSet { operators })
    }

    pub fn empty() -> OperatorSet {
        OperatorSet::default()
    }

    pub fn operators(&self) -> &[PlanOperator] {
        &self.operators
    }

    fn turn_operators(&self) -> impl Iterator<Item = &PlanOperator> {
        self.operators
            .iter()
            .filter(|op| op.level == OperatorLevel::Turn)
    }
}

/// How the plan recognizer filled a repair node's gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "acts")]
pub enum GapEstimate {
    Estimated(Vec<ActLabel>),
    Unestimated,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanNode {
    /// An operator instance covering its children.
    Operator {
        name: String,
        phase: Option<DialoguePhase>,
        children: Vec<PlanNode>,
    },
    /// Cover for input no operator expected.
    Repair {
        children: Vec<PlanNode>,
        estimate: Option<GapEstimate>,
    },
    Leaf {
        act: ActLabel,
    },
}

impl PlanNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            PlanNode::Leaf { .. } => 1,
            PlanNode::Operator { children, .. } | PlanNode::Repair { children, .. } => {
                children.iter().map(|c| c.leaf_count()).sum()
            }
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ActLabel>) {
        match self {
            PlanNode::Leaf { act } => out.push(act),
            PlanNode::Operator { children, .. } | PlanNode::Repair { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }
}

/// The recognized cover of one turn's act sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnSubtree {
    pub nodes: Vec<PlanNode>,
}

impl TurnSubtree {
    pub fn leaves(&self) -> Vec<&ActLabel> {
        let mut out = Vec::new();
        for node in &self.nodes {
            node.collect_leaves(&mut out);
        }
        out
    }

    /// Phase of each leaf: the covering operator's tag where present, the
    /// act's fallback vote elsewhere.
    pub fn leaf_phases(&self) -> Vec<DialoguePhase> {
        let mut out = Vec::new();
        for node in &self.nodes {
            match node {
                PlanNode::Operator {
                    phase: Some(p),
                    children,
                    ..
                } => {
                    let covered: usize = children.iter().map(|c| c.leaf_count()).sum();
                    out.extend(core::iter::repeat_n(*p, covered));
                }
                other => {
                    let mut leaves = Vec::new();
                    other.collect_leaves(&mut leaves);
                    out.extend(leaves.iter().map(|a| fallback_phase_vote(a)));
                }
            }
        }
        out
    }
}

/// Greedy longest-match cover of a turn's acts by turn-level operators.
/// Ties go to higher support, then hand-coded over learned, then name order.
/// Uncovered spans are wrapped into repair nodes, so the cover is total and
/// the leaves always equal the input in order.
pub fn recognize_turn(acts: &[ActLabel], operators: &OperatorSet) -> TurnSubtree {
    let mut nodes = Vec::new();
    let mut pending: Vec<ActLabel> = Vec::new();
    let mut i = 0;
    while i < acts.len() {
        let rest = &acts[i..];
        let best = operators
            .turn_operators()
            .filter(|op| rest.starts_with(&op.body))
            .max_by(|a, b| {
                (a.body.len(), a.support.unwrap_or(0))
                    .cmp(&(b.body.len(), b.support.unwrap_or(0)))
                    .then_with(|| {
                        // hand-coded beats learned beats repair
                        let rank = |k: OperatorKind| match k {
                            OperatorKind::HandCoded => 2,
                            OperatorKind::Learned => 1,
                            OperatorKind::Repair => 0,
                        };
                        rank(a.kind).cmp(&rank(b.kind))
                    })
                    .then_with(|| b.name.cmp(&a.name))
            });
        match best {
            Some(op) => {
                flush_repair(&mut nodes, &mut pending);
                nodes.push(PlanNode::Operator {
                    name: op.name.clone(),
                    phase: op.phase,
                    children: op
                        .body
                        .iter()
                        .map(|act| PlanNode::Leaf { act: act.clone() })
                        .collect(),
                });
                i += op.body.len();
            }
            None => {
                pending.push(acts[i].clone());
                i += 1;
            }
        }
    }
    flush_repair(&mut nodes, &mut pending);
    TurnSubtree { nodes }
}

fn flush_repair(nodes: &mut Vec<PlanNode>, pending: &mut Vec<ActLabel>) {
    if pending.is_empty() {
        return;
    }
    nodes.push(PlanNode::Repair {
        children: core::mem::take(pending)
            .into_iter()
            .map(|act| PlanNode::Leaf { act })
            .collect(),
        estimate: None,
    });
}

/// Weighted majority phase of a turn subtree: tagged operator nodes vote with
/// their leaf count, everything else votes per leaf through the fallback.
/// Ties resolve towards `current` when it participates, otherwise to the
/// earliest tied phase.
pub fn determine_phase(subtree: &TurnSubtree, current: DialoguePhase) -> DialoguePhase {
    let mut votes: BTreeMap<DialoguePhase, usize> = BTreeMap::new();
    for node in &subtree.nodes {
        match node {
            PlanNode::Operator { phase: Some(p), .. } => {
                *votes.entry(*p).or_default() += node.leaf_count()
            }
            other => {
                let mut leaves = Vec::new();
                other.collect_leaves(&mut leaves);
                for act in leaves {
                    *votes.entry(fallback_phase_vote(act)).or_default() += 1;
                }
            }
        }
    }
    let top = votes.values().copied().max().unwrap_or(0);
    let tied: Vec<DialoguePhase> = votes
        .iter()
        .filter(|(_, w)| **w == top)
        .map(|(p, _)| *p)
        .collect();
    if tied.contains(&current) {
        current
    } else {
        tied.first().copied().unwrap_or(current)
    }
}

/// One turn as linked into the structure.
#[derive(Debug, Clone, PartialEq)]
pub struct AttachedTurn {
    pub turn_index: usize,
    pub speaker: String,
    pub phase: DialoguePhase,
    pub subtree: TurnSubtree,
}

/// A phase grouping under the dialogue root; `repair` marks groups created
/// for turns that regressed to an earlier phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseNode {
    pub phase: DialoguePhase,
    pub repair: bool,
    pub turns: Vec<AttachedTurn>,
}

/// The tree over the whole dialogue: phase nodes in first-use order under a
/// single root, turn subtrees below them, dialogue acts at the leaves.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntentionalStructure {
    phases: Vec<PhaseNode>,
    current_phase: Option<DialoguePhase>,
}

/// What attaching a turn did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttachOutcome {
    pub phase: DialoguePhase,
    pub phase_repair: bool,
}

impl IntentionalStructure {
    pub fn new() -> IntentionalStructure {
        IntentionalStructure::default()
    }

    /// The phase the dialogue has progressed to; opening before any turn.
    pub fn current_phase(&self) -> DialoguePhase {
        self.current_phase.unwrap_or(DialoguePhase::Opening)
    }

    pub fn phases(&self) -> &[PhaseNode] {
        &self.phases
    }

    pub fn phase_repair_count(&self) -> usize {
        self.phases.iter().filter(|p| p.repair).count()
    }

    /// Links a recognized turn under its phase node. Same-phase turns share a
    /// node and phases only move forward; a regression is attached under a
    /// fresh repair node at phase level instead.
    pub fn attach_turn(
        &mut self,
        turn_index: usize,
        speaker: &str,
        subtree: TurnSubtree,
    ) -> AttachOutcome {
        let phase = determine_phase(&subtree, self.current_phase());
        let regression = self.current_phase.is_some_and(|current| phase < current);
        let turn = AttachedTurn {
            turn_index,
            speaker: speaker.to_string(),
            phase,
            subtree,
        };
        if regression {
            self.phases.push(PhaseNode {
                phase,
                repair: true,
                turns: alloc::vec![turn],
            });
        } else {
            match self
                .phases
                .iter_mut()
                .find(|p| !p.repair && p.phase == phase)
            {
                Some(node) => node.turns.push(turn),
                None => self.phases.push(PhaseNode {
                    phase,
                    repair: false,
                    turns: alloc::vec![turn],
                }),
            }
            self.current_phase = Some(phase.max(self.current_phase()));
        }
        AttachOutcome {
            phase,
            phase_repair: regression,
        }
    }

    /// All leaves in dialogue order as (turn index, act), across phase nodes.
    pub fn leaves(&self) -> Vec<(usize, ActLabel)> {
        let mut turns: Vec<&AttachedTurn> =
            self.phases.iter().flat_map(|p| p.turns.iter()).collect();
        turns.sort_by_key(|t| t.turn_index);
        let mut out = Vec::new();
        for turn in turns {
            for act in turn.subtree.leaves() {
                out.push((turn.turn_index, act.clone()));
            }
        }
        out
    }

    fn turn_mut(&mut self, turn_index: usize) -> Option<&mut AttachedTurn> {
        self.phases
            .iter_mut()
            .flat_map(|p| p.turns.iter_mut())
            .find(|t| t.turn_index == turn_index)
    }

    fn turn(&self, turn_index: usize) -> Option<&AttachedTurn> {
        self.phases
            .iter()
            .flat_map(|p| p.turns.iter())
            .find(|t| t.turn_index == turn_index)
    }

    /// Indices of repair nodes in a turn's subtree.
    pub fn repair_positions(&self, turn_index: usize) -> Vec<usize> {
        self.turn(turn_index)
            .map(|t| {
                t.subtree
                    .nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| matches!(n, PlanNode::Repair { .. }))
                    .map(|(i, _)| i)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Annotates one repair node with the predictor's top-ranked gap filler,
    /// scored from the leaves around the gap. Gaps wider than three acts are
    /// marked unestimated.
    pub fn repair_and_estimate(
        &mut self,
        turn_index: usize,
        node_index: usize,
        model: &NGramModel,
    ) -> Result<GapEstimate, PlanError> {
        // Collect the surrounding leaf context with speakers first.
        let mut turns: Vec<&AttachedTurn> =
            self.phases.iter().flat_map(|p| p.turns.iter()).collect();
        turns.sort_by_key(|t| t.turn_index);

        let mut left: Vec<(ActLabel, String)> = Vec::new();
        let mut gap_len = None;
        let mut right: Vec<(ActLabel, String)> = Vec::new();
        for turn in &turns {
            if turn.turn_index != turn_index {
                let bucket = if gap_len.is_none() {
                    &mut left
                } else {
                    &mut right
                };
                for act in turn.subtree.leaves() {
                    bucket.push((act.clone(), turn.speaker.clone()));
                }
                continue;
            }
            for (i, node) in turn.subtree.nodes.iter().enumerate() {
                if i == node_index {
                    match node {
                        PlanNode::Repair { children, .. } => gap_len = Some(children.len()),
                        _ => return Err(PlanError::NotARepairNode),
                    }
                } else {
                    let mut leaves = Vec::new();
                    node.collect_leaves(&mut leaves);
                    let bucket = if gap_len.is_none() {
                        &mut left
                    } else {
                        &mut right
                    };
                    for act in leaves {
                        bucket.push((act.clone(), turn.speaker.clone()));
                    }
                }
            }
        }
        let Some(gap_len) = gap_len else {
            return Err(if self.turn(turn_index).is_none() {
                PlanError::NoSuchTurn(turn_index)
            } else {
                PlanError::NotARepairNode
            });
        };

        let gap_speaker = self
            .turn(turn_index)
            .map(|t| t.speaker.clone())
            .unwrap_or_default();
        let estimate = if gap_len > 3 {
            GapEstimate::Unestimated
        } else {
            let left_tagged = tag_context(&left, &gap_speaker);
            let right_tagged: Vec<TaggedAct> = right
                .iter()
                .map(|(act, _)| TaggedAct::new(act.clone(), DirectionTag::SameSpeaker))
                .collect();
            let ranked = model.estimate_gap(&left_tagged, &right_tagged, gap_len)?;
            match ranked.into_iter().next() {
                Some((acts, _)) => GapEstimate::Estimated(acts),
                None => GapEstimate::Unestimated,
            }
        };

        let turn = self
            .turn_mut(turn_index)
            .ok_or(PlanError::NoSuchTurn(turn_index))?;
        match turn.subtree.nodes.get_mut(node_index) {
            Some(PlanNode::Repair { estimate: slot, .. }) => {
                *slot = Some(estimate.clone());
                Ok(estimate)
            }
            _ => Err(PlanError::NotARepairNode),
        }
    }

    /// Indented text rendering; leaves prefixed `act:`, repair nodes
    /// `repair:`.
    pub fn dump(&self) -> String {
        let mut out = String::from("dialogue\n");
        for phase in &self.phases {
            if phase.repair {
                out.push_str(&alloc::format!("  repair: phase {}\n", phase.phase));
            } else {
                out.push_str(&alloc::format!("  phase: {}\n", phase.phase));
            }
            for turn in &phase.turns {
                out.push_str(&alloc::format!(
                    "    turn {} ({})\n",
                    turn.turn_index,
                    turn.speaker
                ));
                for node in &turn.subtree.nodes {
                    dump_node(node, 3, &mut out);
                }
            }
        }
        out
    }
}

/// Tags a leaf context so that the final element carries the transition into
/// the gap (spoken by `gap_speaker`).
fn tag_context(context: &[(ActLabel, String)], gap_speaker: &str) -> Vec<TaggedAct> {
    (0..context.len())
        .map(|j| {
            let next_speaker = context
                .get(j + 1)
                .map(|(_, s)| s.as_str())
                .unwrap_or(gap_speaker);
            TaggedAct::new(
                context[j].0.clone(),
                DirectionTag::between(&context[j].1, next_speaker),
            )
        })
        .collect()
}

fn dump_node(node: &PlanNode, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    match node {
        PlanNode::Operator {
            name,
            phase,
            children,
        } => {
            match phase {
                Some(p) => out.push_str(&alloc::format!("op: {name} [{p}]\n")),
                None => out.push_str(&alloc::format!("op: {name}\n")),
            }
            for c in children {
                dump_node(c, depth + 1, out);
            }
        }
        PlanNode::Repair { children, estimate } => {
            match estimate {
                Some(GapEstimate::Estimated(acts)) => {
                    let names: Vec<&str> = acts.iter().map(|a| a.as_str()).collect();
                    out.push_str(&alloc::format!(
                        "repair: estimated [{}]\n",
                        names.join(", ")
                    ));
                }
                Some(GapEstimate::Unestimated) => out.push_str("repair: unestimated\n"),
                None => out.push_str("repair:\n"),
            }
            for c in children {
                dump_node(c, depth + 1, out);
            }
        }
        PlanNode::Leaf { act } => {
            out.push_str(&alloc::format!("act: {act}\n"));
        }
    }
}

/// Mines turn-level operators from a corpus: complete turns whose act
/// sequence recurs in at least `min_support` turns become operators; turns
/// whose complete pattern stays rare contribute their segments split at
/// phase-vote boundaries instead. Equal bodies merge with summed support.
pub fn learn_operators(corpus: &Corpus, min_support: u64) -> Result<Vec<PlanOperator>, PlanError> {
    if min_support < 1 {
        return Err(PlanError::InvalidMinSupport(min_support as usize));
    }
    if corpus.dialogues.iter().all(|d| d.turns.is_empty()) {
        return Err(PlanError::EmptyCorpus);
    }

    let turn_bodies: Vec<Vec<ActLabel>> = corpus
        .dialogues
        .iter()
        .flat_map(|d| d.turns.iter())
        .map(|t| t.utterances.iter().map(|u| u.act.clone()).collect())
        .collect();

    let mut complete: BTreeMap<&[ActLabel], u64> = BTreeMap::new();
    for body in &turn_bodies {
        *complete.entry(body.as_slice()).or_default() += 1;
    }

    let mut support: BTreeMap<Vec<ActLabel>, u64> = BTreeMap::new();
    for (body, count) in &complete {
        if *count >= min_support {
            *support.entry(body.to_vec()).or_default() += count;
        }
    }
    // Rare complete turns still contribute their phase-homogeneous segments.
    for body in &turn_bodies {
        if complete[body.as_slice()] >= min_support {
            continue;
        }
        for segment in split_at_phase_boundaries(body) {
            *support.entry(segment).or_default() += 1;
        }
    }

    let mut operators: Vec<PlanOperator> = support
        .into_iter()
        .filter(|(_, count)| *count >= min_support)
        .map(|(body, count)| {
            let names: Vec<&str> = body.iter().map(|a| a.as_str()).collect();
            PlanOperator {
                name: alloc::format!("learned:{}", names.join("+")),
                level: OperatorLevel::Turn,
                phase: Some(majority_phase(&body)),
                body,
                kind: OperatorKind::Learned,
                support: Some(count),
            }
        })
        .collect();
    operators.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.name.cmp(&b.name)));
    Ok(operators)
}

fn split_at_phase_boundaries(body: &[ActLabel]) -> Vec<Vec<ActLabel>> {
    let mut segments = Vec::new();
    let mut current: Vec<ActLabel> = Vec::new();
    let mut phase = None;
    for act in body {
        let vote = fallback_phase_vote(act);
        if phase.is_some_and(|p| p != vote) {
            segments.push(core::mem::take(&mut current));
        }
        phase = Some(vote);
        current.push(act.clone());
    }
    if !current.is_empty() {
        segments.push(current);
    }
    segments
}

fn majority_phase(body: &[ActLabel]) -> DialoguePhase {
    let mut votes: BTreeMap<DialoguePhase, usize> = BTreeMap::new();
    for act in body {
        *votes.entry(fallback_phase_vote(act)).or_default() += 1;
    }
    let top = votes.values().copied().max().unwrap_or(0);
    votes
        .into_iter()
        .filter(|(_, w)| *w == top)
        .map(|(p, _)| p)
        .next()
        .unwrap_or(DialoguePhase::Negotiation)
}
