//! Partition-level metrics: cut size, spectral bipartition, and
//! within/outside-community degree z-scores.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, ShiftKind, ShiftOperator, SignVector};
use crate::spectral::SpectralBasis;

/// Node → community labeling with contiguous ids `0..C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    labels: Vec<usize>,
    names: Vec<String>,
}

impl Partition {
    /// Labels must be contiguous: every id in `0..=max` is used.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        let names = (0..count).map(|c| c.to_string()).collect();
        Self::with_names(labels, names)
    }

    pub fn with_names(labels: Vec<usize>, names: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("no nodes labeled".into()));
        }
        let mut sizes = vec![0usize; names.len()];
        for (i, &l) in labels.iter().enumerate() {
            if l >= names.len() {
                return Err(Error::InvalidPartition(format!(
                    "node {i} has community {l} but only {} names",
                    names.len()
                )));
            }
            sizes[l] += 1;
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPartition(format!("community {c} is empty")));
        }
        Ok(Partition { labels, names })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.names.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, community: usize) -> &str {
        &self.names[community]
    }

    /// Node indices of each community.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Restriction to `keep`, dropping communities that become empty.
    pub fn restrict(&self, keep: &[usize]) -> Result<Partition> {
        let mut remap = vec![usize::MAX; self.community_count()];
        let mut names = Vec::new();
        let mut labels = Vec::with_capacity(keep.len());
        let mut used = vec![false; self.community_count()];
        for &i in keep {
            used[self.labels[i]] = true;
        }
        for (c, &u) in used.iter().enumerate() {
            if u {
                remap[c] = names.len();
                names.push(self.names[c].clone());
            }
        }
        for &i in keep {
            labels.push(remap[self.labels[i]]);
        }
        Partition::with_names(labels, names)
    }
}

/// `Z_in` and `Z_out` per node; `None` where the community's degree spread is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRoleScores {
    pub z_in: Vec<Option<f64>>,
    pub z_out: Vec<Option<f64>>,
}

fn validate_signs(graph: &Graph, s: &SignVector) -> Result<()> {
    if s.len() != graph.node_count() {
        return Err(Error::InvalidPartition(format!(
            "sign vector has {} entries for {} nodes",
            s.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

/// Graph cut size `¼ sᵀ L s`: total weight of edges crossing the split.
pub fn cut_size(graph: &Graph, s: &SignVector) -> Result<f64> {
    validate_signs(graph, s)?;
    Ok(0.25 * ShiftOperator::laplacian(graph).quadratic_form(s.values())?)
}

/// Sign split from the leading modularity eigenvector, or from the Fiedler
/// vector when given a Laplacian basis. Zero entries go to `+1`.
pub fn spectral_bipartition(basis: &SpectralBasis) -> Result<SignVector> {
    let column = match basis.kind() {
        ShiftKind::Modularity => 0,
        ShiftKind::Laplacian => {
            let tau = basis.zero_tolerance();
            basis
                .eigenvalues()
                .iter()
                .position(|&l| l > tau)
                .ok_or_else(|| Error::Data("Laplacian has no non-zero eigenvalue".into()))?
        }
        other => {
            return Err(Error::Config(format!(
                "spectral bipartition needs a modularity or Laplacian basis, not {other}"
            )))
        }
    };
    Ok(SignVector::from_membership(
        &basis
            .eigenvector(column)
            .iter()
            .map(|&v| v >= 0.0)
            .collect::<Vec<_>>(),
    ))
}

/// Internal and external weighted degree of every node under `p`.
pub fn split_degrees(graph: &Graph, p: &Partition) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(graph.node_count(), p.len())?;
    let mut internal = vec![0.0; graph.node_count()];
    for (i, slot) in internal.iter_mut().enumerate() {
        *slot = graph
            .neighbors(i)
            .filter(|&(j, _)| p.label(j) == p.label(i))
            .map(|(_, w)| w)
            .sum();
    }
    let external = internal
        .iter()
        .zip(graph.degrees())
        .map(|(kin, k)| k - kin)
        .collect();
    Ok((internal, external))
}

fn zscore_within(values: &[f64], members: &[Vec<usize>]) -> Vec<Option<f64>> {
    let mut out = vec![None; values.len()];
    for group in members {
        let n = group.len() as f64;
        let mean = group.iter().map(|&i| values[i]).sum::<f64>() / n;
        let var = group.iter().map(|&i| (values[i] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd > 1e-12 * mean.abs().max(1.0) {
            for &i in group {
                out[i] = Some((values[i] - mean) / sd);
            }
        }
    }
    out
}

/// Degree z-scores standardized within each node's community (population std).
pub fn z_scores(graph: &Graph, p: &Partition) -> Result<NodeRoleScores> {
    let (internal, external) = split_degrees(graph, p)?;
    let members = p.members();
    Ok(NodeRoleScores {
        z_in: zscore_within(&internal, &members),
        z_out: zscore_within(&external, &members),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::modularity_index;
    use crate::spectral::decompose;

    #[test]
    fn k3_cut() {
        let g = fixtures::k3();
        let s = SignVector::new(vec![1.0, 1.0, -1.0]).unwrap();
        assert!((cut_size(&g, &s).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(cut_size(&g, &SignVector::ones(3)).unwrap(), 0.0);
        assert!(cut_size(&g, &SignVector::ones(4)).is_err());
    }

    #[test]
    fn toy_bipartitions() {
        let g = fixtures::toy10();
        let planted = SignVector::from_membership(&[
            true, true, true, true, true, false, false, false, false, false,
        ]);
        let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
        assert!(spectral_bipartition(&q).unwrap().same_split(&planted));
        let l = decompose(&ShiftOperator::laplacian(&g)).unwrap();
        assert!(!spectral_bipartition(&l).unwrap().same_split(&planted));
        let a = decompose(&ShiftOperator::adjacency(&g)).unwrap();
        assert!(spectral_bipartition(&a).is_err());
    }

    #[test]
    fn barbell_leading_vector_matches_exhaustive_optimum() {
        let g = fixtures::barbell6();
        let mut best = (f64::NEG_INFINITY, SignVector::ones(6));
        for mask in 0u32..64 {
            let s = SignVector::from_membership(
                &(0..6).map(|i| mask & (1 << i) != 0).collect::<Vec<_>>(),
            );
            let value = modularity_index(&g, &s).unwrap();
            if value > best.0 + 1e-12 {
                best = (value, s);
            }
        }
        let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
        let split = spectral_bipartition(&q).unwrap();
        assert!(split.same_split(&best.1));
        let triangles = SignVector::new(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]).unwrap();
        assert!(split.same_split(&triangles));
    }

    #[test]
    fn single_regular_community_has_undefined_z() {
        let g = fixtures::k3();
        let p = Partition::new(vec![0, 0, 0]).unwrap();
        let z = z_scores(&g, &p).unwrap();
        assert!(z.z_in.iter().all(Option::is_none));
        assert!(z.z_out.iter().all(Option::is_none));
    }

    #[test]
    fn planted_hub_has_maximal_z_out() {
        let (g, p) = fixtures::planted_hub();
        let z = z_scores(&g, &p).unwrap();
        let hub = g.index_of("6").unwrap();
        let (_, external) = split_degrees(&g, &p).unwrap();
        assert_eq!(external[hub], 3.0);
        // brute-force standardization of community 1's external degrees
        let group: Vec<usize> = (0..g.node_count()).filter(|&i| p.label(i) == 1).collect();
        let vals: Vec<f64> = group.iter().map(|&i| external[i]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
        let expect = (3.0 - mean) / sd;
        assert!((z.z_out[hub].unwrap() - expect).abs() < 1e-12);
        for &i in &group {
            if i != hub {
                assert!(z.z_out[i].unwrap() < z.z_out[hub].unwrap());
            }
        }
    }

    #[test]
    fn z_scores_ignore_label_names() {
        let (g, p) = fixtures::planted_hub();
        let flipped = Partition::new(p.labels().iter().map(|&l| 1 - l).collect()).unwrap();
        assert_eq!(z_scores(&g, &p).unwrap(), z_scores(&g, &flipped).unwrap());
    }

    #[test]
    fn partition_validation_and_restrict() {
        assert!(Partition::new(vec![0, 2]).is_err());
        assert!(Partition::new(vec![]).is_err());
        let p = Partition::with_names(vec![0, 1, 2, 1], vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        let r = p.restrict(&[1, 2, 3]).unwrap();
        assert_eq!(r.labels(), &[0, 1, 0]);
        assert_eq!(r.names(), &["b", "c"]);
        assert_eq!(p.members(), vec![vec![0], vec![1, 3], vec![2]]);
    }
}
