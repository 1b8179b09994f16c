//! The reduction constructions: each family turns an OuMv instance into a
//! static graph plus a per-pair update generator and a decision rule that
//! decodes one query answer into one bit.

pub mod densest;
pub mod host;
pub mod matching;
pub mod partial;
pub mod stpath;

/// Node labels for export: one human-readable string per dense node id.
#[derive(Debug, Clone, Default)]
pub struct LabelMap {
    labels: Vec<String>,
}

impl LabelMap {
    pub fn with_capacity(n: usize) -> Self {
        LabelMap { labels: vec![String::new(); n] }
    }

    pub fn set(&mut self, id: crate::NodeId, label: String) {
        let slot = &mut self.labels[id as usize];
        debug_assert!(slot.is_empty(), "label for node {id} assigned twice");
        *slot = label;
    }

    pub fn get(&self, id: crate::NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Every node labelled exactly once.
    pub fn is_bijective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.labels.iter().all(|l| !l.is_empty() && seen.insert(l.clone()))
    }

    /// Text export: `label id` lines.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for (id, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{label} {id}");
        }
        out
    }
}
