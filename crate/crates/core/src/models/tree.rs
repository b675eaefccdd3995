use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Model;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    /// Goes to `left` when `x[feature] <= threshold`, else to `right`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum NodeJson {
    Split {
        id: u64,
        feature: usize,
        threshold: f64,
        left: u64,
        right: u64,
    },
    Leaf {
        id: u64,
        value: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    arity: usize,
    root: u64,
    nodes: Vec<NodeJson>,
}

#[derive(Serialize, Deserialize)]
struct ForestJson {
    trees: Vec<TreeJson>,
}

/// A binary regression/classification tree with resolved child indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    arity: usize,
    root: usize,
    nodes: Vec<Node>,
    ids: Vec<u64>,
}

impl DecisionTree {
    /// Builds a tree from `(id, node)` pairs whose child references are ids.
    /// Feature indices are 0-based here.
    pub fn new(arity: usize, root_id: u64, nodes: Vec<(u64, Node)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (pos, (id, _)) in nodes.iter().enumerate() {
            if index.insert(*id, pos).is_some() {
                return Err(Error::Model(format!("duplicate node id {id}")));
            }
        }
        let resolve = |from: u64, to: usize| {
            index
                .get(&(to as u64))
                .copied()
                .ok_or_else(|| Error::Model(format!("node {from} points to missing child {to}")))
        };
        let mut resolved = Vec::with_capacity(nodes.len());
        for &(id, node) in &nodes {
            resolved.push(match node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if feature >= arity {
                        return Err(Error::Model(format!(
                            "node {id} splits on feature {} but arity is {arity}",
                            feature + 1
                        )));
                    }
                    if !threshold.is_finite() {
                        return Err(Error::Model(format!("node {id} has a non-finite threshold")));
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left: resolve(id, left)?,
                        right: resolve(id, right)?,
                    }
                }
                Node::Leaf { value } => {
                    if !value.is_finite() {
                        return Err(Error::Model(format!("leaf {id} has a non-finite value")));
                    }
                    Node::Leaf { value }
                }
            });
        }
        let ids: Vec<u64> = nodes.iter().map(|(id, _)| *id).collect();
        let root = *index
            .get(&root_id)
            .ok_or_else(|| Error::Model(format!("root id {root_id} does not exist")))?;

        let mut parents = vec![0usize; resolved.len()];
        for node in &resolved {
            if let Node::Split { left, right, .. } = *node {
                parents[left] += 1;
                parents[right] += 1;
            }
        }
        if parents[root] != 0 {
            return Err(Error::Model(format!("root {root_id} has a parent (cycle)")));
        }
        if let Some(pos) = parents.iter().position(|&p| p > 1) {
            return Err(Error::Model(format!("node {} has more than one parent", ids[pos])));
        }
        let mut seen = vec![false; resolved.len()];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Model(format!("node {} is reachable twice (cycle)", ids[i])));
            }
            if let Node::Split { left, right, .. } = resolved[i] {
                stack.push(left);
                stack.push(right);
            }
        }
        if let Some(pos) = seen.iter().position(|s| !s) {
            return Err(Error::Model(format!(
                "node {} is not reachable from the root",
                ids[pos]
            )));
        }
        Ok(DecisionTree {
            arity,
            root,
            nodes: resolved,
            ids,
        })
    }

    /// Parses tree-json (features 1-based).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: TreeJson = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    fn from_doc(doc: TreeJson) -> Result<Self> {
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| match n {
                NodeJson::Split {
                    id,
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if feature == 0 {
                        return Err(Error::Model(format!("node {id}: features are 1-based")));
                    }
                    Ok((
                        id,
                        Node::Split {
                            feature: feature - 1,
                            threshold,
                            left: left as usize,
                            right: right as usize,
                        },
                    ))
                }
                NodeJson::Leaf { id, value } => Ok((id, Node::Leaf { value })),
            })
            .collect::<Result<Vec<_>>>()?;
        DecisionTree::new(doc.arity, doc.root, nodes)
    }

    fn to_doc(&self) -> TreeJson {
        TreeJson {
            arity: self.arity,
            root: self.ids[self.root],
            nodes: self
                .nodes
                .iter()
                .zip(&self.ids)
                .map(|(node, &id)| match *node {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => NodeJson::Split {
                        id,
                        feature: feature + 1,
                        threshold,
                        left: self.ids[left],
                        right: self.ids[right],
                    },
                    Node::Leaf { value } => NodeJson::Leaf { id, value },
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("tree serializes")
    }

    /// Copy of the tree with the leaf `id` set to `value`.
    pub fn with_leaf_value(&self, id: u64, value: f64) -> Result<Self> {
        let pos = self
            .ids
            .iter()
            .position(|&i| i == id)
            .ok_or_else(|| Error::Model(format!("no node with id {id}")))?;
        let mut out = self.clone();
        match &mut out.nodes[pos] {
            Node::Leaf { value: v } => *v = value,
            Node::Split { .. } => return Err(Error::Model(format!("node {id} is not a leaf"))),
        }
        Ok(out)
    }

    /// Leaf ids in left-to-right order.
    pub fn leaf_ids(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            match self.nodes[i] {
                Node::Leaf { .. } => out.push(self.ids[i]),
                Node::Split { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    /// Id of the leaf reached by `x`.
    pub fn leaf_for(&self, x: &[f64]) -> u64 {
        self.ids[self.descend(x)]
    }

    fn descend(&self, x: &[f64]) -> usize {
        let mut i = self.root;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

impl Model for DecisionTree {
    fn arity(&self) -> usize {
        self.arity
    }

    fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.descend(x)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("descend stops at leaves"),
        }
    }
}

/// Mean of several trees over the same inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn new(trees: Vec<DecisionTree>) -> Result<Self> {
        let first = trees
            .first()
            .ok_or_else(|| Error::Model("forest has no trees".into()))?;
        if let Some(pos) = trees.iter().position(|t| t.arity != first.arity) {
            return Err(Error::Model(format!(
                "tree {} has arity {} but tree 1 has arity {}",
                pos + 1,
                trees[pos].arity,
                first.arity
            )));
        }
        Ok(Forest { trees })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: ForestJson = serde_json::from_str(text)?;
        let trees = doc
            .trees
            .into_iter()
            .enumerate()
            .map(|(i, t)| DecisionTree::from_doc(t).map_err(|e| Error::Model(format!("tree {}: {e}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Forest::new(trees)
    }

    pub fn to_json_string(&self) -> String {
        let doc = ForestJson {
            trees: self.trees.iter().map(DecisionTree::to_doc).collect(),
        };
        serde_json::to_string(&doc).expect("forest serializes")
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }
}

impl Model for Forest {
    fn arity(&self) -> usize {
        self.trees[0].arity
    }

    fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_leaf() {
        let t = DecisionTree::from_json_str(r#"{"arity":2,"root":0,"nodes":[{"id":0,"value":0.84}]}"#).unwrap();
        assert_eq!(t.predict(&[5.0, -1.0]), 0.84);
    }

    #[test]
    fn stump_goes_right_above_threshold() {
        let json = r#"{"arity":1,"root":0,"nodes":[
            {"id":0,"feature":1,"threshold":0.5,"left":1,"right":2},
            {"id":1,"value":0},{"id":2,"value":1}]}"#;
        let t = DecisionTree::from_json_str(json).unwrap();
        assert_eq!(t.predict(&[1.0]), 1.0);
        assert_eq!(t.predict(&[0.5]), 0.0);
        let back = DecisionTree::from_json_str(&t.to_json_string()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_trees_are_rejected() {
        let cases = [
            // missing child
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"feature":1,"threshold":0.5,"left":1,"right":2},{"id":1,"value":0}]}"#,
            // cycle back to root
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"feature":1,"threshold":0.5,"left":1,"right":0},{"id":1,"value":0}]}"#,
            // shared child
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"feature":1,"threshold":0.5,"left":1,"right":1},{"id":1,"value":0}]}"#,
            // unreachable node
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"value":0},{"id":1,"value":0}]}"#,
            // feature out of range
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"feature":2,"threshold":0.5,"left":1,"right":2},{"id":1,"value":0},{"id":2,"value":1}]}"#,
            // duplicate id
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"value":0},{"id":0,"value":1}]}"#,
            // missing root
            r#"{"arity":1,"root":3,"nodes":[{"id":0,"value":0}]}"#,
            // detached cycle
            r#"{"arity":1,"root":0,"nodes":[{"id":0,"value":0},{"id":1,"feature":1,"threshold":0,"left":2,"right":3},{"id":2,"feature":1,"threshold":0,"left":1,"right":3}]}"#,
        ];
        for json in cases {
            assert!(DecisionTree::from_json_str(json).is_err(), "{json}");
        }
    }

    #[test]
    fn forest_averages() {
        let a = r#"{"arity":1,"root":0,"nodes":[{"id":0,"value":1.0}]}"#;
        let b = r#"{"arity":1,"root":0,"nodes":[{"id":0,"value":0.0}]}"#;
        let f = Forest::from_json_str(&format!(r#"{{"trees":[{a},{b}]}}"#)).unwrap();
        assert_eq!(f.predict(&[0.0]), 0.5);
        assert!(Forest::from_json_str(r#"{"trees":[]}"#).is_err());
        let c = r#"{"arity":2,"root":0,"nodes":[{"id":0,"value":0.0}]}"#;
        assert!(Forest::from_json_str(&format!(r#"{{"trees":[{a},{c}]}}"#)).is_err());
    }
}
