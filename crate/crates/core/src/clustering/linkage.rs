use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ClusterError, DistanceMatrix};

/// One agglomeration step. Leaves are nodes `0..n`; the cluster created
/// by merge `s` is node `n + s`. `left < right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.n
    }
}

#[derive(Clone, Copy)]
struct Nearest {
    dist: f64,
    slot: usize,
}

/// Complete-linkage agglomerative clustering.
///
/// A cluster lives in the slot of its smallest member index. Among pairs
/// at the minimal linkage distance the lexicographically lowest
/// `(slot, slot)` pair merges first.
pub fn agglomerate(dist: &DistanceMatrix) -> Result<Dendrogram, ClusterError> {
    let n = dist.len();
    if n < 2 {
        return Err(ClusterError::TooFew(n));
    }
    let mut d: Vec<f64> = (0..n * n).map(|idx| dist.get(idx / n, idx % n)).collect();
    let mut active = vec![true; n];
    let mut node = (0..n).collect::<Vec<_>>();
    let mut size = vec![1usize; n];
    let mut nearest: Vec<Option<Nearest>> = vec![None; n];

    let scan = |d: &[f64], active: &[bool], i: usize| -> Option<Nearest> {
        let mut best: Option<Nearest> = None;
        for j in (i + 1)..n {
            if !active[j] {
                continue;
            }
            let x = d[i * n + j];
            if best.map_or(true, |b| x < b.dist) {
                best = Some(Nearest { dist: x, slot: j });
            }
        }
        best
    };
    for i in 0..n {
        nearest[i] = scan(&d, &active, i);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut pick: Option<(usize, Nearest)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if let Some(nb) = nearest[i] {
                if pick.map_or(true, |(_, b)| nb.dist < b.dist) {
                    pick = Some((i, nb));
                }
            }
        }
        let (i, Nearest { dist: h, slot: j }) = pick.expect("at least two active clusters remain");

        let (a, b) = (node[i], node[j]);
        merges.push(Merge {
            left: a.min(b),
            right: a.max(b),
            distance: h,
            size: size[i] + size[j],
        });
        active[j] = false;
        node[i] = n + step;
        size[i] += size[j];
        for k in 0..n {
            if active[k] && k != i {
                let merged = d[i * n + k].max(d[j * n + k]);
                d[i * n + k] = merged;
                d[k * n + i] = merged;
            }
        }

        nearest[i] = scan(&d, &active, i);
        nearest[j] = None;
        for k in 0..i {
            if !active[k] {
                continue;
            }
            if let Some(nb) = nearest[k] {
                if nb.slot == i || nb.slot == j {
                    nearest[k] = scan(&d, &active, k);
                }
            }
        }
        for k in (i + 1)..j {
            if active[k] && nearest[k].is_some_and(|nb| nb.slot == j) {
                nearest[k] = scan(&d, &active, k);
            }
        }
    }
    Ok(Dendrogram { n, merges })
}

/// Flat labels for `k` clusters: the partition after the first `n - k`
/// merges. Cluster ids follow the order of each cluster's smallest member.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<Vec<usize>, ClusterError> {
    let n = dendrogram.n;
    if k < 1 || k > n {
        return Err(ClusterError::BadK { k, n });
    }
    // parent links over nodes 0..2n-1
    let mut parent: Vec<usize> = (0..2 * n).collect();
    for (s, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        parent[m.left] = n + s;
        parent[m.right] = n + s;
    }
    let root = |mut x: usize| {
        while parent[x] != x {
            x = parent[x];
        }
        x
    };
    let mut ids = vec![usize::MAX; 2 * n];
    let mut next = 0;
    let mut labels = Vec::with_capacity(n);
    for leaf in 0..n {
        let r = root(leaf);
        if ids[r] == usize::MAX {
            ids[r] = next;
            next += 1;
        }
        labels.push(ids[r]);
    }
    Ok(labels)
}
