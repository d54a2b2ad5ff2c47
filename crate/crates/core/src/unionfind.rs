//! Disjoint-set forest used for plain (non-temporal) connectivity.

use crate::generator::TemporalNetwork;

#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n], components: n }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    /// Merge the sets of `a` and `b`; returns false if they were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Whether the underlying (time-forgetting) graph is connected. Graphs with at
/// most one vertex are connected.
pub fn is_connected(g: &TemporalNetwork) -> bool {
    if g.n() <= 1 {
        return true;
    }
    let mut ds = DisjointSet::new(g.n());
    for e in g.edges() {
        if ds.union(e.u, e.v) && ds.components() == 1 {
            return true;
        }
    }
    ds.components() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_merge() {
        let mut ds = DisjointSet::new(5);
        assert!(ds.union(0, 1));
        assert!(ds.union(3, 4));
        assert!(!ds.union(1, 0));
        assert_eq!(ds.components(), 3);
        assert_eq!(ds.find(0), ds.find(1));
        assert_ne!(ds.find(0), ds.find(3));
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(&TemporalNetwork::empty(0)));
        assert!(is_connected(&TemporalNetwork::empty(1)));
        assert!(!is_connected(&TemporalNetwork::empty(2)));
        let g = TemporalNetwork::from_triples(3, &[(0, 1, 0.9), (1, 2, 0.1)]).unwrap();
        assert!(is_connected(&g));
        let g = TemporalNetwork::from_triples(4, &[(0, 1, 0.9), (2, 3, 0.1)]).unwrap();
        assert!(!is_connected(&g));
    }
}
