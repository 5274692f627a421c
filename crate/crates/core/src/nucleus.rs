//! Finite automata of tree automorphisms: Moore minimization and the
//! closure that produces a section-closed leaf alphabet ("nucleus") for a
//! contracting preset.
//!
//! Every element is later stored as a finite tree whose leaves are states of
//! this automaton. The closure guarantees that the product of two leaves
//! unfolds into a finite tree: any product state lying on (or below) a cycle
//! is promoted to a leaf.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::preset::{GroupPreset, SectionRef};

/// Upper bound on the number of leaf states; leaf codes must fit in a byte below 0xF0.
pub const MAX_STATES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct NState {
    pub perm: Box<[u8]>,
    pub children: Box<[u8]>,
}

#[derive(Clone, Debug)]
struct ExtState {
    perm: Box<[u8]>,
    /// Indices into the extension list.
    children: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Promote {
    All,
    CycleReachable,
}

/// Moore partition refinement; classes are numbered by first occurrence.
fn moore_classes(perms: &[&[u8]], children: &[Vec<usize>]) -> Vec<usize> {
    let n = perms.len();
    let mut ids: HashMap<&[u8], usize> = HashMap::new();
    let mut class: Vec<usize> = perms
        .iter()
        .map(|p| {
            let next = ids.len();
            *ids.entry(p).or_insert(next)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next_class = vec![0; n];
        for i in 0..n {
            let mut sig = Vec::with_capacity(children[i].len() + 1);
            sig.push(class[i]);
            sig.extend(children[i].iter().map(|&c| class[c]));
            let fresh = sigs.len();
            next_class[i] = *sigs.entry(sig).or_insert(fresh);
        }
        let new_count = sigs.len();
        class = next_class;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Identifies extension states with nucleus states and optionally promotes
/// unresolved ones into the nucleus. Returns the nucleus index of every
/// extension state that is (now) represented by a leaf.
fn extend(
    nucleus: &mut Vec<NState>,
    ext: &[ExtState],
    promote: Option<Promote>,
) -> Vec<Option<usize>> {
    let n = nucleus.len();
    let m = ext.len();
    let mut perms: Vec<&[u8]> = Vec::with_capacity(n + m);
    let mut children: Vec<Vec<usize>> = Vec::with_capacity(n + m);
    for s in nucleus.iter() {
        perms.push(&s.perm);
        children.push(s.children.iter().map(|&c| c as usize).collect());
    }
    for e in ext {
        perms.push(&e.perm);
        children.push(e.children.iter().map(|&j| n + j).collect());
    }
    let class = moore_classes(&perms, &children);
    let mut class_to_nucleus: HashMap<usize, usize> = HashMap::new();
    for (i, &c) in class.iter().enumerate().take(n) {
        class_to_nucleus.entry(c).or_insert(i);
    }
    let mut resolved: Vec<Option<usize>> = (0..m)
        .map(|j| class_to_nucleus.get(&class[n + j]).copied())
        .collect();
    let Some(mode) = promote else {
        return resolved;
    };

    // Unresolved classes, each with its first extension state as representative.
    let mut rep_of_class: HashMap<usize, usize> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    for j in 0..m {
        if resolved[j].is_none() && !rep_of_class.contains_key(&class[n + j]) {
            rep_of_class.insert(class[n + j], j);
            order.push(class[n + j]);
        }
    }
    if order.is_empty() {
        return resolved;
    }
    let selected: Vec<usize> = match mode {
        Promote::All => order.clone(),
        Promote::CycleReachable => {
            let mut graph = DiGraph::<usize, ()>::new();
            let mut node_of: HashMap<usize, petgraph::graph::NodeIndex> = HashMap::new();
            for &c in &order {
                node_of.insert(c, graph.add_node(c));
            }
            for &c in &order {
                let j = rep_of_class[&c];
                for &child in &children[n + j] {
                    if let Some(&t) = node_of.get(&class[child]) {
                        graph.add_edge(node_of[&c], t, ());
                    }
                }
            }
            let mut marked: HashMap<usize, bool> = HashMap::new();
            let mut stack = Vec::new();
            for scc in tarjan_scc(&graph) {
                let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
                if cyclic {
                    for v in scc {
                        stack.push(v);
                    }
                }
            }
            while let Some(v) = stack.pop() {
                let c = graph[v];
                if marked.insert(c, true).is_some() {
                    continue;
                }
                for w in graph.neighbors(v) {
                    if !marked.contains_key(&graph[w]) {
                        stack.push(w);
                    }
                }
            }
            order
                .iter()
                .copied()
                .filter(|c| marked.contains_key(c))
                .collect()
        }
    };
    if selected.is_empty() {
        return resolved;
    }
    for (k, &c) in selected.iter().enumerate() {
        class_to_nucleus.insert(c, n + k);
    }
    for &c in &selected {
        let j = rep_of_class[&c];
        let kids: Vec<u8> = children[n + j]
            .iter()
            .map(|&child| {
                *class_to_nucleus
                    .get(&class[child])
                    .expect("children of promoted states are promoted or resolved")
                    as u8
            })
            .collect();
        nucleus.push(NState {
            perm: ext[j].perm.clone(),
            children: kids.into_boxed_slice(),
        });
    }
    for j in 0..m {
        if resolved[j].is_none() {
            resolved[j] = class_to_nucleus.get(&class[n + j]).copied();
        }
    }
    resolved
}

fn inverse_ext(nucleus: &[NState]) -> Vec<ExtState> {
    nucleus
        .iter()
        .map(|s| {
            let d = s.perm.len();
            let mut inv = vec![0u8; d];
            for (v, &p) in s.perm.iter().enumerate() {
                inv[p as usize] = v as u8;
            }
            let children = (0..d)
                .map(|v| s.children[inv[v] as usize] as usize)
                .collect();
            ExtState {
                perm: inv.into_boxed_slice(),
                children,
            }
        })
        .collect()
}

fn pair_ext(nucleus: &[NState]) -> Vec<ExtState> {
    let k = nucleus.len();
    let mut out = Vec::with_capacity(k * k);
    for x in nucleus {
        for y in nucleus {
            let perm: Box<[u8]> = y.perm.iter().map(|&v| x.perm[v as usize]).collect();
            let children = (0..y.perm.len())
                .map(|v| {
                    let a = x.children[y.perm[v] as usize] as usize;
                    let b = y.children[v] as usize;
                    a * k + b
                })
                .collect();
            out.push(ExtState { perm, children });
        }
    }
    out
}

/// A pair of leaves whose product is not itself a leaf unfolds into this.
#[derive(Clone, Debug)]
pub(crate) enum PairProduct {
    Leaf(u8),
    Node {
        perm: Box<[u8]>,
        children: Vec<(u8, u8)>,
    },
}

#[derive(Debug)]
pub(crate) struct Nucleus {
    pub states: Vec<NState>,
    /// Leaf code of each generator, and of its inverse.
    pub generator: Vec<u8>,
    pub generator_inverse: Vec<u8>,
    pub inverse: Vec<Option<u8>>,
    /// Row-major `k × k` table indexed by leaf codes.
    pub products: Vec<PairProduct>,
    pub contracting: bool,
}

impl Nucleus {
    pub fn build(preset: &GroupPreset) -> Nucleus {
        let d = preset.arity;
        let g = preset.generators.len();
        // Raw automaton: 0 = identity, 1..=g generators, g+1..=2g inverses.
        let mut perms: Vec<Box<[u8]>> = Vec::with_capacity(2 * g + 1);
        let mut children: Vec<Vec<usize>> = Vec::with_capacity(2 * g + 1);
        perms.push((0..d as u8).collect());
        children.push(vec![0; d]);
        let idx = |r: SectionRef, invert: bool| -> usize {
            match (r, invert) {
                (SectionRef::Identity, _) => 0,
                (SectionRef::Generator(j), false) | (SectionRef::Inverse(j), true) => 1 + j,
                (SectionRef::Inverse(j), false) | (SectionRef::Generator(j), true) => 1 + g + j,
            }
        };
        for gen in &preset.generators {
            perms.push(gen.perm.clone().into_boxed_slice());
            children.push(gen.sections.iter().map(|&s| idx(s, false)).collect());
        }
        for gen in &preset.generators {
            let mut inv = vec![0u8; d];
            for (v, &p) in gen.perm.iter().enumerate() {
                inv[p as usize] = v as u8;
            }
            children.push(
                (0..d)
                    .map(|v| idx(gen.sections[inv[v] as usize], true))
                    .collect(),
            );
            perms.push(inv.into_boxed_slice());
        }
        let perm_refs: Vec<&[u8]> = perms.iter().map(|p| &p[..]).collect();
        let class = moore_classes(&perm_refs, &children);
        let mut first: HashMap<usize, usize> = HashMap::new();
        let mut reps = Vec::new();
        for (i, &c) in class.iter().enumerate() {
            if let std::collections::hash_map::Entry::Vacant(e) = first.entry(c) {
                e.insert(reps.len());
                reps.push(i);
            }
        }
        let mut states: Vec<NState> = reps
            .iter()
            .map(|&i| NState {
                perm: perms[i].clone(),
                children: children[i]
                    .iter()
                    .map(|&c| first[&class[c]] as u8)
                    .collect(),
            })
            .collect();
        let generator: Vec<u8> = (0..g).map(|j| first[&class[1 + j]] as u8).collect();
        let generator_inverse: Vec<u8> = (0..g).map(|j| first[&class[1 + g + j]] as u8).collect();

        let mut contracting = true;
        loop {
            let before = states.len();
            let snapshot = states.clone();
            let inv = inverse_ext(&states);
            extend(&mut states, &inv, Some(Promote::All));
            let pairs = pair_ext(&states);
            extend(&mut states, &pairs, Some(Promote::CycleReachable));
            if states.len() == before {
                break;
            }
            if states.len() > MAX_STATES {
                contracting = false;
                states = snapshot;
                break;
            }
        }

        let inv = inverse_ext(&states);
        let inverse: Vec<Option<u8>> = extend(&mut states, &inv, None)
            .into_iter()
            .map(|r| r.map(|i| i as u8))
            .collect();
        let k = states.len();
        let pairs = pair_ext(&states);
        let resolved = extend(&mut states, &pairs, None);
        let products = pairs
            .iter()
            .zip(&resolved)
            .map(|(p, r)| match r {
                Some(i) => PairProduct::Leaf(*i as u8),
                None => PairProduct::Node {
                    perm: p.perm.clone(),
                    children: p
                        .children
                        .iter()
                        .map(|&e| ((e / k) as u8, (e % k) as u8))
                        .collect(),
                },
            })
            .collect();
        Nucleus {
            states,
            generator,
            generator_inverse,
            inverse,
            products,
            contracting,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::{grigorchuk, load_preset, parse_preset};

    #[test]
    fn grigorchuk_nucleus_is_five_letters() {
        let n = Nucleus::build(&grigorchuk());
        assert!(n.contracting);
        assert_eq!(n.len(), 5);
        assert_eq!(n.generator, vec![1, 2, 3, 4]);
        assert_eq!(n.generator_inverse, vec![1, 2, 3, 4]);
        assert_eq!(n.inverse, vec![Some(0), Some(1), Some(2), Some(3), Some(4)]);
        // b·c is the leaf d
        assert!(matches!(n.products[2 * 5 + 3], PairProduct::Leaf(4)));
        // b·b is the identity
        assert!(matches!(n.products[2 * 5 + 2], PairProduct::Leaf(0)));
        // a·b is not a leaf
        assert!(matches!(n.products[5 + 2], PairProduct::Node { .. }));
    }

    #[test]
    fn duplicate_generators_share_a_leaf() {
        let json = r#"{"schema":"asg-1","name":"dup","arity":2,"generators":[
            {"label":"a","involution":true,"perm":[1,0],"sections":["1","1"]},
            {"label":"e","involution":true,"perm":[1,0],"sections":["1","1"]}]}"#;
        let n = Nucleus::build(&parse_preset(json).unwrap());
        assert_eq!(n.generator[0], n.generator[1]);
    }

    #[test]
    fn gupta_sidki_closure_terminates() {
        let n = Nucleus::build(&load_preset("gupta-sidki-3").unwrap());
        assert!(n.contracting);
        assert!(n.len() >= 5);
    }

    #[test]
    fn lamplighter_is_flagged_non_contracting() {
        let json = r#"{"schema":"asg-1","name":"lamplighter","arity":2,"generators":[
            {"label":"a","involution":false,"perm":[1,0],"sections":["a","b"]},
            {"label":"b","involution":false,"perm":[0,1],"sections":["a","b"]}]}"#;
        let n = Nucleus::build(&parse_preset(json).unwrap());
        assert!(!n.contracting);
    }
}
