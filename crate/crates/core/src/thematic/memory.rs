//! The specialization hierarchy of negotiated dates.
//!
//! Every date under negotiation is one root; nodes below it refine the date
//! level by level (year, month, week, day, day of week, period, clock time).
//! Each node records the attitudes the participants have taken towards that
//! component: proposed, rejected or accepted, in dialogue order. A focus path
//! marks the date currently under consideration; new descriptions thread into
//! the tree relative to it.
//!
//! Two structural rules keep the tree honest:
//!
//! - interval-valued nodes (`FROM_TO`) act as range context and never take
//!   children; a concrete value inside a proposed interval becomes a sibling
//!   of the interval under their shared parent, and
//! - a contradiction with the focus path at month level or coarser opens a
//!   new negotiation root, while finer contradictions branch as siblings
//!   under the shared parent.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::time::{ComponentValue, FromTo, Level, TimeDescription};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Proposed,
    Rejected,
    Accepted,
}

impl Stance {
    pub fn name(self) -> &'static str {
        match self {
            Stance::Proposed => "proposed",
            Stance::Rejected => "rejected",
            Stance::Accepted => "accepted",
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One participant's recorded stance towards a node, in dialogue order.
/// `implicit` marks rejections inferred from a competing proposal rather than
/// spoken ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attitude {
    pub stance: Stance,
    pub implicit: bool,
    pub speaker: String,
    pub turn_index: usize,
}

impl fmt::Display for Attitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.stance)?;
        if self.implicit {
            f.write_str("(implicit)")?;
        }
        write!(f, " {}@{}", self.speaker, self.turn_index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThematicNode {
    pub level: Level,
    pub value: ComponentValue,
    pub attitudes: Vec<Attitude>,
    pub children: Vec<ThematicNode>,
}

impl ThematicNode {
    fn new(level: Level, value: ComponentValue) -> ThematicNode {
        ThematicNode {
            level,
            value,
            attitudes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn current_stance(&self) -> Option<&Attitude> {
        self.attitudes.last()
    }

    fn is_range(&self) -> bool {
        matches!(self.value, ComponentValue::Range(..))
    }

    pub fn label(&self) -> String {
        format!("{}={}", self.level, self.value)
    }
}

/// Index path from a root to a node; stable because children are append-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePath {
    pub root: usize,
    pub steps: Vec<usize>,
}

impl NodePath {
    fn child(&self, idx: usize) -> NodePath {
        let mut steps = self.steps.clone();
        steps.push(idx);
        NodePath {
            root: self.root,
            steps,
        }
    }

    fn parent(&self) -> Option<NodePath> {
        let mut steps = self.steps.clone();
        steps.pop()?;
        Some(NodePath {
            root: self.root,
            steps,
        })
    }
}

/// What an insert did to the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertOutcome {
    /// Path to the deepest node named by the description; the attitude landed
    /// here and the focus moved here.
    pub path: NodePath,
    /// The insert opened a new negotiation root.
    pub new_root: bool,
    /// Number of nodes created (0 means the description named existing nodes
    /// only).
    pub created: usize,
}

/// A change observed by callers replaying thematic activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThematicEvent {
    pub event: String,
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stance: Option<Stance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speaker: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThematicError {
    EmptyDescription,
    NoFocus,
    BadPath,
}

impl fmt::Display for ThematicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThematicError::EmptyDescription => f.write_str("time description has no components"),
            ThematicError::NoFocus => f.write_str("thematic memory is empty, nothing in focus"),
            ThematicError::BadPath => f.write_str("node path does not exist"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThematicMemory {
    roots: Vec<ThematicNode>,
    focus: Option<NodePath>,
}

impl ThematicMemory {
    pub fn new() -> ThematicMemory {
        ThematicMemory::default()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[ThematicNode] {
        &self.roots
    }

    pub fn focus(&self) -> Option<&NodePath> {
        self.focus.as_ref()
    }

    pub fn node(&self, path: &NodePath) -> Option<&ThematicNode> {
        let mut node = self.roots.get(path.root)?;
        for &step in &path.steps {
            node = node.children.get(step)?;
        }
        Some(node)
    }

    fn node_mut(&mut self, path: &NodePath) -> Option<&mut ThematicNode> {
        let mut node = self.roots.get_mut(path.root)?;
        for &step in &path.steps {
            node = node.children.get_mut(step)?;
        }
        Some(node)
    }

    /// Human-readable path like `month=2/day=8/time=14:00`.
    pub fn path_string(&self, path: &NodePath) -> String {
        let mut labels = Vec::new();
        let mut node = match self.roots.get(path.root) {
            Some(n) => n,
            None => return String::new(),
        };
        labels.push(node.label());
        for &step in &path.steps {
            node = match node.children.get(step) {
                Some(n) => n,
                None => break,
            };
            labels.push(node.label());
        }
        labels.join("/")
    }

    fn components(desc: &TimeDescription) -> Vec<(Level, ComponentValue)> {
        desc.levels()
            .into_iter()
            .map(|l| (l, desc.component(l).unwrap()))
            .collect()
    }

    /// Threads a description into the hierarchy and appends `stance` at its
    /// deepest node, creating nodes as needed and moving the focus there.
    pub fn insert(
        &mut self,
        desc: &TimeDescription,
        stance: Stance,
        speaker: &str,
        turn_index: usize,
    ) -> Result<InsertOutcome, ThematicError> {
        let components = Self::components(desc);
        if components.is_empty() {
            return Err(ThematicError::EmptyDescription);
        }
        let attitude = Attitude {
            stance,
            implicit: false,
            speaker: speaker.to_string(),
            turn_index,
        };

        if self.roots.is_empty() {
            return Ok(self.create_root(&components, attitude));
        }

        let focus = self.focus.clone().expect("roots exist, so focus exists");
        let focus_nodes = self.path_nodes(&focus);

        // Coarsest level at which the description contradicts the focus path.
        let conflict =
            focus_nodes
                .iter()
                .find_map(|(path, level, value)| match desc.component(*level) {
                    Some(v) if v != *value => Some((path.clone(), *level)),
                    _ => None,
                });

        let anchor = match conflict {
            Some((_, level)) if level <= Level::Month => {
                // A different month or year is a different date: reuse a
                // matching root if one exists, otherwise open a new one.
                let other =
                    self.roots.iter().enumerate().find(|(i, r)| {
                        *i != focus.root && desc.component(r.level) == Some(r.value)
                    });
                match other {
                    Some((idx, _)) => NodePath {
                        root: idx,
                        steps: Vec::new(),
                    },
                    None => return Ok(self.create_root(&components, attitude)),
                }
            }
            Some((conflict_path, _)) => match conflict_path.parent() {
                Some(parent) => parent,
                // The conflicting node is itself a root; its only possible
                // sibling is a new root.
                None => return Ok(self.create_root(&components, attitude)),
            },
            None => {
                // No contradiction: descend the focus path while it stays
                // compatible context above the components still to place.
                // With nothing left to place the walk stops at the deepest
                // matched node, which then takes the attitude.
                let coarsest_unplaced = components.iter().map(|(l, _)| *l).find(|l| {
                    !focus_nodes
                        .iter()
                        .any(|(_, fl, fv)| fl == l && desc.component(*l) == Some(*fv))
                });
                let mut anchor = NodePath {
                    root: focus.root,
                    steps: Vec::new(),
                };
                for (path, level, value) in &focus_nodes {
                    let matched = desc.component(*level) == Some(*value);
                    let context = !matched
                        && desc.component(*level).is_none()
                        && coarsest_unplaced.is_some_and(|unplaced| *level < unplaced)
                        && !matches!(value, ComponentValue::Range(..));
                    if matched || context {
                        anchor = path.clone();
                    } else {
                        break;
                    }
                }
                anchor
            }
        };

        Ok(self.place(anchor, &components, attitude))
    }

    /// (path, level, value) triples for the root and every node down to the
    /// focus, in order.
    fn path_nodes(&self, path: &NodePath) -> Vec<(NodePath, Level, ComponentValue)> {
        let mut out = Vec::new();
        let mut node = match self.roots.get(path.root) {
            Some(n) => n,
            None => return out,
        };
        let mut current = NodePath {
            root: path.root,
            steps: Vec::new(),
        };
        out.push((current.clone(), node.level, node.value));
        for &step in &path.steps {
            node = match node.children.get(step) {
                Some(n) => n,
                None => break,
            };
            current = current.child(step);
            out.push((current.clone(), node.level, node.value));
        }
        out
    }

    fn create_root(
        &mut self,
        components: &[(Level, ComponentValue)],
        attitude: Attitude,
    ) -> InsertOutcome {
        let mut chain = components.iter().rev();
        let (level, value) = chain.next().expect("components non-empty");
        let mut node = ThematicNode::new(*level, *value);
        node.attitudes.push(attitude);
        for (level, value) in chain {
            let mut parent = ThematicNode::new(*level, *value);
            parent.children.push(node);
            node = parent;
        }
        self.roots.push(node);
        let mut path = NodePath {
            root: self.roots.len() - 1,
            steps: Vec::new(),
        };
        for _ in 1..components.len() {
            path = path.child(0);
        }
        self.focus = Some(path.clone());
        InsertOutcome {
            path,
            new_root: true,
            created: components.len(),
        }
    }

    /// Places the description's components below `anchor`, reusing matching
    /// nodes, descending through unambiguous finer context, and creating the
    /// rest. The attitude lands on the final node.
    fn place(
        &mut self,
        mut anchor: NodePath,
        components: &[(Level, ComponentValue)],
        attitude: Attitude,
    ) -> InsertOutcome {
        let anchor_level = self.node(&anchor).map(|n| n.level);
        let mut created = 0usize;
        let pending: Vec<&(Level, ComponentValue)> = components
            .iter()
            .filter(|(l, _)| anchor_level.is_none_or(|al| *l > al))
            .collect();

        if pending.is_empty() {
            // The description named existing path nodes only; the deepest
            // matching path node takes the attitude.
            let node = self.node_mut(&anchor).expect("anchor exists");
            node.attitudes.push(attitude);
            self.focus = Some(anchor.clone());
            return InsertOutcome {
                path: anchor,
                new_root: false,
                created: 0,
            };
        }

        for (level, value) in pending {
            // Contextual descent: slip through existing single context nodes
            // finer than the anchor but still coarser than this component,
            // e.g. a day-of-week node between a day and a clock time.
            loop {
                let node = self.node(&anchor).expect("anchor exists");
                let mut candidates = node.children.iter().enumerate().filter(|(_, c)| {
                    c.level < *level
                        && !c.is_range()
                        && components.iter().all(|(l, _)| l != &c.level)
                });
                match (candidates.next(), candidates.next()) {
                    (Some((idx, _)), None) => anchor = anchor.child(idx),
                    _ => break,
                }
            }
            let node = self.node(&anchor).expect("anchor exists");
            let existing = node
                .children
                .iter()
                .position(|c| c.level == *level && c.value == *value);
            anchor = match existing {
                Some(idx) => anchor.child(idx),
                None => {
                    let idx = {
                        let node = self.node_mut(&anchor).expect("anchor exists");
                        node.children.push(ThematicNode::new(*level, *value));
                        node.children.len() - 1
                    };
                    created += 1;
                    anchor.child(idx)
                }
            };
        }

        let node = self.node_mut(&anchor).expect("placed node exists");
        node.attitudes.push(attitude);
        self.focus = Some(anchor.clone());
        InsertOutcome {
            path: anchor,
            new_root: false,
            created,
        }
    }

    /// Appends an attitude to the node currently in focus (acceptances and
    /// rejections that name no date of their own).
    pub fn mark_focus(
        &mut self,
        stance: Stance,
        speaker: &str,
        turn_index: usize,
    ) -> Result<NodePath, ThematicError> {
        let path = self.focus.clone().ok_or(ThematicError::NoFocus)?;
        let attitude = Attitude {
            stance,
            implicit: false,
            speaker: speaker.to_string(),
            turn_index,
        };
        self.node_mut(&path)
            .ok_or(ThematicError::BadPath)?
            .attitudes
            .push(attitude);
        Ok(path)
    }

    /// Marks standing counter-proposals as implicitly rejected before
    /// `new_desc` is inserted as a proposal by `speaker`.
    ///
    /// A node qualifies if it sits in the focus root's tree at the same level
    /// as the new description's deepest component, its ancestors are
    /// compatible with the new description, its value is a genuine
    /// alternative (intervals only count when the new value falls outside
    /// them), it is currently proposed and not accepted, and the proposal
    /// came from the other speaker.
    pub fn infer_implicit_rejection(
        &mut self,
        new_desc: &TimeDescription,
        speaker: &str,
        turn_index: usize,
    ) -> Vec<NodePath> {
        let Some(level) = new_desc.deepest_level() else {
            return Vec::new();
        };
        let new_value = new_desc.component(level).expect("deepest level present");
        let Some(focus) = &self.focus else {
            return Vec::new();
        };
        let root_idx = focus.root;
        let Some(root) = self.roots.get(root_idx) else {
            return Vec::new();
        };

        let mut marked = Vec::new();
        // The flag tracks compatibility of the node's ancestors only; the
        // node's own value is supposed to differ from the new one.
        let mut stack: Vec<(NodePath, &ThematicNode, bool)> = alloc::vec![(
            NodePath {
                root: root_idx,
                steps: Vec::new(),
            },
            root,
            true,
        )];
        while let Some((path, node, ancestors_ok)) = stack.pop() {
            if ancestors_ok && node.level == level {
                let alternative = node.value != new_value
                    && !node.value.contains(&new_value)
                    && !new_value.contains(&node.value);
                let standing_other_proposal = node
                    .current_stance()
                    .is_some_and(|a| a.stance == Stance::Proposed && a.speaker != speaker);
                if alternative && standing_other_proposal {
                    marked.push(path.clone());
                }
            }
            let child_ok = ancestors_ok && ancestor_compatible(new_desc, node);
            for (idx, child) in node.children.iter().enumerate() {
                stack.push((path.child(idx), child, child_ok));
            }
        }

        marked.sort_by(|a, b| (a.root, &a.steps).cmp(&(b.root, &b.steps)));
        for path in &marked {
            let node = self.node_mut(path).expect("path from traversal");
            node.attitudes.push(Attitude {
                stance: Stance::Rejected,
                implicit: true,
                speaker: speaker.to_string(),
                turn_index,
            });
        }
        marked
    }

    /// Composes the current agreement: the root path of the deepest node whose
    /// latest attitude is an acceptance (ties go to the most recent
    /// acceptance). Accepting a specialization accepts the context it
    /// refines, so coarser path components are part of the result. Empty
    /// description if nothing is accepted.
    pub fn current_agreement(&self) -> TimeDescription {
        let mut best: Option<(Level, usize, NodePath)> = None;
        for (root_idx, root) in self.roots.iter().enumerate() {
            let mut stack = alloc::vec![(
                NodePath {
                    root: root_idx,
                    steps: Vec::new(),
                },
                root,
            )];
            while let Some((path, node)) = stack.pop() {
                if let Some(att) = node.current_stance() {
                    if att.stance == Stance::Accepted {
                        let better = match &best {
                            None => true,
                            Some((l, t, _)) => (node.level, att.turn_index) >= (*l, *t),
                        };
                        if better {
                            best = Some((node.level, att.turn_index, path.clone()));
                        }
                    }
                }
                for (idx, child) in node.children.iter().enumerate() {
                    stack.push((path.child(idx), child));
                }
            }
        }

        let mut desc = TimeDescription::default();
        if let Some((_, _, path)) = best {
            for (_, level, value) in self.path_nodes(&path) {
                set_component(&mut desc, level, value);
            }
        }
        desc
    }

    /// Indented tree dump, one node per line: level, value, attitude list.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for root in &self.roots {
            dump_node(root, 0, &mut out);
        }
        out
    }
}

fn ancestor_compatible(desc: &TimeDescription, node: &ThematicNode) -> bool {
    match desc.component(node.level) {
        Some(v) => v == node.value,
        None => true,
    }
}

fn set_component(desc: &mut TimeDescription, level: Level, value: ComponentValue) {
    match value {
        ComponentValue::Year(y) => desc.year = Some(y),
        ComponentValue::Month(m) => desc.month = Some(m),
        ComponentValue::Week(w) => desc.week = Some(w),
        ComponentValue::Day(d) => desc.day = Some(d),
        ComponentValue::Dow(d) => desc.dow = Some(d),
        ComponentValue::Period(p) => desc.period = Some(p),
        ComponentValue::Clock(c) => desc.time = Some(c),
        ComponentValue::Range(lo, hi) => desc.from_to = Some(FromTo { level, lo, hi }),
    }
}

fn dump_node(node: &ThematicNode, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push_str(&node.label());
    out.push_str(" [");
    for (i, att) in node.attitudes.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&att.to_string());
    }
    out.push_str("]\n");
    for child in &node.children {
        dump_node(child, depth + 1, out);
    }
}
