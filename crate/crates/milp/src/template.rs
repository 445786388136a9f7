use crate::error::{MilpError, Result};

/// One join position of a template. Anchor slots are leaves that may absorb
/// up to `p_max` further joins, to be ordered outside the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSlot {
    pub id: usize,
    pub children: Vec<usize>,
    pub anchor: Option<usize>,
}

impl JoinSlot {
    pub fn new(id: usize, children: Vec<usize>) -> Self {
        Self {
            id,
            children,
            anchor: None,
        }
    }

    pub fn anchor(id: usize, p_max: usize) -> Self {
        Self {
            id,
            children: Vec::new(),
            anchor: Some(p_max),
        }
    }

    pub fn is_anchor(&self) -> bool {
        self.anchor.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorSpec {
    None,
    /// The leaf slot on the leftmost path of each of the root's subtrees.
    TwoHalfAnchors,
}

/// A rooted tree of join slots bounding the plans a model can express.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinTemplate {
    slots: Vec<JoinSlot>,
    root: usize,
    parent: Vec<Option<usize>>,
}

impl JoinTemplate {
    pub fn new(slots: Vec<JoinSlot>, root: usize) -> Result<Self> {
        let n = slots.len();
        let bad = |m: String| Err(MilpError::InvalidArgument(m));
        if n == 0 || root >= n {
            return bad("template needs at least one slot and a valid root".into());
        }
        let mut parent = vec![None; n];
        for (i, s) in slots.iter().enumerate() {
            if s.id != i {
                return bad(format!("slot at position {i} has id {}", s.id));
            }
            if s.children.len() > 2 {
                return bad(format!("slot {i} has more than two children"));
            }
            if s.is_anchor() && !s.children.is_empty() {
                return bad(format!("anchor slot {i} has children"));
            }
            for &c in &s.children {
                if c >= n || c == root || parent[c].is_some() {
                    return bad(format!("slot {c} cannot be a child of slot {i}"));
                }
                parent[c] = Some(i);
            }
        }
        let t = Self {
            slots,
            root,
            parent,
        };
        if t.subtree(root).len() != n {
            return bad("slots are not all reachable from the root".into());
        }
        Ok(t)
    }

    /// Complete binary template of `max_depth` levels in breadth-first
    /// numbering (root 0, children of `i` at `2i+1` and `2i+2`).
    pub fn build(max_depth: usize, anchors: AnchorSpec, p_max: usize) -> Result<Self> {
        if max_depth == 0 {
            return Err(MilpError::InvalidArgument(
                "template depth must be at least 1".into(),
            ));
        }
        if max_depth > 16 {
            return Err(MilpError::InvalidArgument(format!(
                "template depth {max_depth} is too large"
            )));
        }
        let n = (1usize << max_depth) - 1;
        let mut anchor_ids = Vec::new();
        if anchors == AnchorSpec::TwoHalfAnchors {
            if max_depth < 2 {
                return Err(MilpError::InvalidArgument(
                    "two half anchors need a template of depth at least 2".into(),
                ));
            }
            for start in [1, 2] {
                let mut i = start;
                while 2 * i + 1 < n {
                    i = 2 * i + 1;
                }
                anchor_ids.push(i);
            }
        }
        let slots = (0..n)
            .map(|i| {
                if anchor_ids.contains(&i) {
                    JoinSlot::anchor(i, p_max)
                } else if 2 * i + 1 < n {
                    JoinSlot::new(i, vec![2 * i + 1, 2 * i + 2])
                } else {
                    JoinSlot::new(i, Vec::new())
                }
            })
            .collect();
        Self::new(slots, 0)
    }

    /// The smallest template with left subtree `U(n-1)` and right subtree
    /// `U((n-1)/2)`. Every binary join tree with at most `n` joins embeds into
    /// it up to swapping children, so it reaches the full bushy space.
    pub fn universal(n_joins: usize) -> Result<Self> {
        fn grow(n: usize, slots: &mut Vec<JoinSlot>) -> Option<usize> {
            if n == 0 {
                return None;
            }
            let id = slots.len();
            slots.push(JoinSlot::new(id, Vec::new()));
            let children: Vec<usize> = [grow(n - 1, slots), grow((n - 1) / 2, slots)]
                .into_iter()
                .flatten()
                .collect();
            slots[id].children = children;
            Some(id)
        }
        if n_joins == 0 || n_joins > 24 {
            return Err(MilpError::InvalidArgument(format!(
                "universal template needs 1..=24 joins, got {n_joins}"
            )));
        }
        let mut slots = Vec::new();
        grow(n_joins, &mut slots);
        Self::new(slots, 0)
    }

    pub fn slots(&self) -> &[JoinSlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, slot: usize) -> Option<usize> {
        self.parent[slot]
    }

    pub fn children(&self, slot: usize) -> &[usize] {
        &self.slots[slot].children
    }

    pub fn is_anchor(&self, slot: usize) -> bool {
        self.slots[slot].is_anchor()
    }

    pub fn p_max(&self, slot: usize) -> Option<usize> {
        self.slots[slot].anchor
    }

    pub fn anchors(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().filter(|s| s.is_anchor()).map(|s| s.id)
    }

    /// `slot` and all slots below it, in pre-order.
    pub fn subtree(&self, slot: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![slot];
        while let Some(s) = stack.pop() {
            out.push(s);
            stack.extend(self.slots[s].children.iter().rev());
        }
        out
    }

    /// Number of slots on the path from the root to `slot`, both included.
    pub fn depth(&self, slot: usize) -> usize {
        let mut d = 1;
        let mut s = slot;
        while let Some(p) = self.parent[s] {
            d += 1;
            s = p;
        }
        d
    }

    /// Largest number of joins an assignment can activate.
    pub fn capacity(&self) -> usize {
        self.slots.iter().map(|s| 1 + s.anchor.unwrap_or(0)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_two_without_anchors() {
        let t = JoinTemplate::build(2, AnchorSpec::None, 0).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.children(0), &[1, 2]);
        assert!(t.children(1).is_empty() && t.children(2).is_empty());
        assert_eq!(t.anchors().count(), 0);
    }

    #[test]
    fn depth_four_has_two_leftmost_anchors() {
        let t = JoinTemplate::build(4, AnchorSpec::TwoHalfAnchors, 3).unwrap();
        assert_eq!(t.len(), 15);
        assert_eq!(t.anchors().collect::<Vec<_>>(), vec![7, 11]);
        assert_eq!(t.p_max(7), Some(3));
        assert_eq!(t.depth(7), 4);
        assert_eq!(t.depth(11), 4);
        assert_eq!(t.capacity(), 15 + 6);
    }

    #[test]
    fn depth_two_anchors_are_the_root_children() {
        let t = JoinTemplate::build(2, AnchorSpec::TwoHalfAnchors, 1).unwrap();
        assert_eq!(t.anchors().collect::<Vec<_>>(), vec![1, 2]);
        assert!(JoinTemplate::build(1, AnchorSpec::TwoHalfAnchors, 1).is_err());
        assert!(JoinTemplate::build(0, AnchorSpec::None, 0).is_err());
    }

    #[test]
    fn custom_four_slot_template() {
        let t = JoinTemplate::new(
            vec![
                JoinSlot::new(0, vec![1, 2]),
                JoinSlot::new(1, vec![3]),
                JoinSlot::new(2, vec![]),
                JoinSlot::new(3, vec![]),
            ],
            0,
        )
        .unwrap();
        assert_eq!(t.subtree(0), vec![0, 1, 3, 2]);
        assert_eq!(t.parent(3), Some(1));
    }

    #[test]
    fn rejects_malformed_templates() {
        let dup = vec![JoinSlot::new(0, vec![1, 1]), JoinSlot::new(1, vec![])];
        assert!(JoinTemplate::new(dup, 0).is_err());
        let orphan = vec![JoinSlot::new(0, vec![]), JoinSlot::new(1, vec![])];
        assert!(JoinTemplate::new(orphan, 0).is_err());
        let anchored = vec![
            JoinSlot {
                id: 0,
                children: vec![1],
                anchor: Some(1),
            },
            JoinSlot::new(1, vec![]),
        ];
        assert!(JoinTemplate::new(anchored, 0).is_err());
    }

    #[test]
    fn universal_template_sizes() {
        let sizes: Vec<usize> = (1..=7)
            .map(|n| JoinTemplate::universal(n).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![1, 2, 4, 6, 9, 12, 17]);
        let u3 = JoinTemplate::universal(3).unwrap();
        assert_eq!(u3.children(0), &[1, 3]);
        assert_eq!(u3.children(1), &[2]);
    }
}
