use std::collections::HashMap;

use super::{parse_selector, BoundaryEdge, Mesh2d, MeshTopology, Selector};
use crate::{Error, Result};

/// One part of the boundary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundaryRegion {
    pub edges: Vec<BoundaryEdge>,
    /// Sorted, deduplicated endpoint vertices of `edges`.
    pub nodes: Vec<usize>,
}

impl BoundaryRegion {
    fn from_edges(edges: Vec<BoundaryEdge>) -> Self {
        let mut nodes: Vec<usize> = edges.iter().flat_map(|b| b.nodes).collect();
        nodes.sort_unstable();
        nodes.dedup();
        Self { edges, nodes }
    }

    /// Oriented vertex pairs of the region's edges.
    pub fn edge_nodes(&self) -> Vec<[usize; 2]> {
        self.edges.iter().map(|b| b.nodes).collect()
    }

    /// Global edge indices of the region's edges.
    pub fn edge_indices(&self) -> Vec<usize> {
        self.edges.iter().map(|b| b.edge).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Partition of the boundary edges into ordered regions.
///
/// With `S` selectors there are `S + 1` regions; the last one holds every
/// edge no selector matched. Without selectors the single region is the
/// whole boundary.
#[derive(Debug, Clone)]
pub struct BoundaryPartition {
    pub regions: Vec<BoundaryRegion>,
    pub selectors: Vec<String>,
}

impl BoundaryPartition {
    /// Assigns each boundary edge to the first selector that is true at its
    /// midpoint.
    pub fn classify<S: AsRef<str>>(mesh: &Mesh2d, topo: &MeshTopology, selectors: &[S]) -> Result<Self> {
        let parsed = selectors
            .iter()
            .map(|s| parse_selector(s.as_ref()))
            .collect::<Result<Vec<Selector>>>()?;
        let mut buckets = vec![Vec::new(); parsed.len() + 1];
        for b in &topo.bd_edge {
            let [x, y] = b.midpoint(mesh);
            let slot = parsed.iter().position(|s| s.matches(x, y)).unwrap_or(parsed.len());
            buckets[slot].push(*b);
        }
        Ok(Self {
            regions: buckets.into_iter().map(BoundaryRegion::from_edges).collect(),
            selectors: selectors.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    /// Groups boundary edges by external labels, one region per entry of
    /// `order`, plus a trailing region for unlabelled or unlisted edges.
    ///
    /// `labelled` holds vertex pairs (any orientation) with their label.
    pub fn from_labels(topo: &MeshTopology, labelled: &[([usize; 2], i32)], order: &[i32]) -> Result<Self> {
        let lookup: HashMap<[usize; 2], i32> = labelled
            .iter()
            .map(|&([a, b], label)| ([a.min(b), a.max(b)], label))
            .collect();
        let mut buckets = vec![Vec::new(); order.len() + 1];
        for b in &topo.bd_edge {
            let key = topo.edge[b.edge];
            let slot = lookup
                .get(&key)
                .and_then(|label| order.iter().position(|l| l == label))
                .unwrap_or(order.len());
            buckets[slot].push(*b);
        }
        Ok(Self {
            regions: buckets.into_iter().map(BoundaryRegion::from_edges).collect(),
            selectors: order.iter().map(|l| format!("label=={l}")).collect(),
        })
    }

    pub fn region(&self, index: usize) -> Result<&BoundaryRegion> {
        self.regions.get(index).ok_or(Error::RegionOutOfRange {
            index,
            count: self.regions.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

pub fn classify_boundary<S: AsRef<str>>(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    selectors: &[S],
) -> Result<BoundaryPartition> {
    BoundaryPartition::classify(mesh, topo, selectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{square_mesh, uniform_refine};

    fn setup() -> (Mesh2d, MeshTopology) {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        (m, t)
    }

    fn counts(p: &BoundaryPartition) -> Vec<usize> {
        p.regions.iter().map(|r| r.edges.len()).collect()
    }

    #[test]
    fn one_selector() {
        let (m, t) = setup();
        let p = classify_boundary(&m, &t, &["x==1"]).unwrap();
        assert_eq!(counts(&p), vec![2, 6]);
        assert_eq!(p.regions[0].nodes.len(), 3);
    }

    #[test]
    fn two_selectors() {
        let (m, t) = setup();
        let p = classify_boundary(&m, &t, &["x==1", "y==0"]).unwrap();
        assert_eq!(counts(&p), vec![2, 2, 4]);
    }

    #[test]
    fn no_selectors() {
        let (m, t) = setup();
        let p = classify_boundary::<&str>(&m, &t, &[]).unwrap();
        assert_eq!(counts(&p), vec![8]);
        assert_eq!(p.regions[0].edges, t.bd_edge);
    }

    #[test]
    fn first_match_wins_and_partition_is_exact() {
        let m = uniform_refine(&square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap()).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let p = classify_boundary(&m, &t, &["x>0.5", "y<0.5", "x>0.99"]).unwrap();
        assert!(p.regions[2].is_empty());
        let mut all: Vec<usize> = p.regions.iter().flat_map(|r| r.edge_indices()).collect();
        all.sort_unstable();
        let mut expect: Vec<usize> = t.bd_edge.iter().map(|b| b.edge).collect();
        expect.sort_unstable();
        assert_eq!(all, expect);
    }

    #[test]
    fn labels() {
        let (m, t) = setup();
        // label the right side (x == 1) as 7
        let right: Vec<([usize; 2], i32)> = t
            .bd_edge
            .iter()
            .filter(|b| b.midpoint(&m)[0] == 1.0)
            .map(|b| ([b.nodes[1], b.nodes[0]], 7))
            .collect();
        let p = BoundaryPartition::from_labels(&t, &right, &[7]).unwrap();
        assert_eq!(counts(&p), vec![2, 6]);
    }

    #[test]
    fn bad_selector() {
        let (m, t) = setup();
        assert!(classify_boundary(&m, &t, &["x=="]).is_err());
        let p = classify_boundary(&m, &t, &["x==1"]).unwrap();
        assert!(p.region(2).is_err());
    }
}
