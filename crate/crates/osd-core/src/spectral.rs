use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebraic::{AlgebraicReal, IntPoly};
use crate::rule::{is_primitive, Matrix};

/// Exact characteristic polynomial `det(xI - M)` by the Faddeev-LeVerrier
/// recurrence (all divisions are exact).
pub fn char_poly(m: &Matrix) -> IntPoly {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    // N_0 = I;  c_{n-k} = -tr(M N_{k-1})/k;  N_k = M N_{k-1} + c_{n-k} I.
    let mut aux: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    for k in 1..=n {
        let prod = mat_mul(m, &aux);
        let mut trace = BigInt::zero();
        for (i, row) in prod.iter().enumerate() {
            trace += &row[i];
        }
        let c = -trace / BigInt::from(k);
        coeffs[n - k] = c.clone();
        aux = prod;
        for (i, row) in aux.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    IntPoly::new(coeffs)
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// A strongly connected component of the discrepancy graph with its exact
/// spectral radius (None for a transient singleton).
#[derive(Debug, Clone)]
pub struct Scc {
    pub nodes: Vec<usize>,
    pub char_poly: IntPoly,
    pub radius: Option<AlgebraicReal>,
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub char_poly_dc: IntPoly,
    /// None marks a nilpotent discrepancy graph.
    pub lambda_dc: Option<AlgebraicReal>,
    pub sccs: Vec<Scc>,
    /// Condensation edges between SCC indices.
    pub condensation: Vec<(usize, usize)>,
    /// Per node: the largest spectral radius among SCCs reachable from it
    /// (None when the node's forward closure is cycle-free).
    pub node_lambda: Vec<Option<AlgebraicReal>>,
    pub uniform: bool,
    pub dc_primitive: bool,
}

impl SpectralReport {
    /// Smallest positive per-node radius; nodes with cycle-free forward
    /// closures are excluded.
    pub fn min_recurrent_lambda(&self) -> Option<AlgebraicReal> {
        let mut best: Option<&AlgebraicReal> = None;
        for l in self.node_lambda.iter().flatten() {
            match best {
                None => best = Some(l),
                Some(b) => {
                    if l.cmp_exact(b) == std::cmp::Ordering::Less {
                        best = Some(l);
                    }
                }
            }
        }
        best.cloned()
    }

    /// Index of an SCC achieving lambda_dc.
    pub fn leading_scc(&self) -> Option<usize> {
        let target = self.lambda_dc.as_ref()?;
        self.sccs.iter().position(|s| {
            s.radius
                .as_ref()
                .is_some_and(|r| r.equals(target))
        })
    }
}

/// Tarjan's algorithm, iterative, deterministic: vertices and neighbors are
/// visited in ascending index order, and components are sorted by their
/// minimal node index.
pub fn scc_decompose(adjacency: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<(usize, usize)>) {
    let n = adjacency.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS: (vertex, neighbor position).
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call_stack: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut pos)) = call_stack.last_mut() {
            if *pos == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *pos < adjacency[v].len() {
                let w = adjacency[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    components.push(comp);
                }
                call_stack.pop();
                if let Some(&mut (parent, _)) = call_stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    components.sort_by_key(|c| c[0]);
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut edges = std::collections::BTreeSet::new();
    for (v, nbrs) in adjacency.iter().enumerate() {
        for &w in nbrs {
            if comp_of[v] != comp_of[w] {
                edges.insert((comp_of[v], comp_of[w]));
            }
        }
    }
    (components, edges.into_iter().collect())
}

/// Full spectral analysis of a discrepancy matrix (`M[i][j]` = multiplicity
/// of child `i` under parent `j`; graph edges run parent -> child).
pub fn spectral_report(m_dc: &Matrix) -> SpectralReport {
    let n = m_dc.len();
    let cp_dc = char_poly(m_dc);
    // Adjacency: j -> i when M[i][j] > 0.
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).filter(|&i| !m_dc[i][j].is_zero()).collect())
        .collect();
    let (components, condensation) = scc_decompose(&adjacency);
    let mut sccs = Vec::with_capacity(components.len());
    for comp in &components {
        let sub: Matrix = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| m_dc[i][j].clone()).collect())
            .collect();
        let cp = char_poly(&sub);
        let recurrent = comp.len() > 1 || !m_dc[comp[0]][comp[0]].is_zero();
        let radius = if recurrent {
            AlgebraicReal::largest_real_root(&cp).ok()
        } else {
            None
        };
        sccs.push(Scc {
            nodes: comp.clone(),
            char_poly: cp,
            radius,
        });
    }
    // Propagate: reachable radius of an SCC = max of its own radius and the
    // reachable radii of its condensation successors.
    let nc = sccs.len();
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for &(a, b) in &condensation {
        succs[a].push(b);
    }
    let mut reach: Vec<Option<AlgebraicReal>> = vec![None; nc];
    let mut done = vec![false; nc];
    fn resolve(
        c: usize,
        sccs: &[Scc],
        succs: &[Vec<usize>],
        reach: &mut Vec<Option<AlgebraicReal>>,
        done: &mut Vec<bool>,
    ) {
        if done[c] {
            return;
        }
        done[c] = true;
        let mut best = sccs[c].radius.clone();
        let succ_list = succs[c].clone();
        for s in succ_list {
            resolve(s, sccs, succs, reach, done);
            if let Some(r) = &reach[s] {
                best = match best {
                    None => Some(r.clone()),
                    Some(b) => {
                        if r.cmp_exact(&b) == std::cmp::Ordering::Greater {
                            Some(r.clone())
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        reach[c] = best;
    }
    for c in 0..nc {
        resolve(c, &sccs, &succs, &mut reach, &mut done);
    }
    let mut comp_of = vec![0usize; n];
    for (ci, s) in sccs.iter().enumerate() {
        for &v in &s.nodes {
            comp_of[v] = ci;
        }
    }
    let node_lambda: Vec<Option<AlgebraicReal>> =
        (0..n).map(|v| reach[comp_of[v]].clone()).collect();
    let lambda_dc = sccs.iter().fold(None::<AlgebraicReal>, |acc, s| {
        match (&acc, &s.radius) {
            (None, r) => r.clone(),
            (Some(_), None) => acc,
            (Some(a), Some(r)) => {
                if r.cmp_exact(a) == std::cmp::Ordering::Greater {
                    Some(r.clone())
                } else {
                    acc
                }
            }
        }
    });
    let uniform = match &lambda_dc {
        None => true,
        Some(target) => node_lambda
            .iter()
            .flatten()
            .all(|l| l.equals(target)),
    };
    let dc_primitive = n > 0 && is_primitive(m_dc);
    SpectralReport {
        char_poly_dc: cp_dc,
        lambda_dc,
        sccs,
        condensation,
        node_lambda,
        uniform,
        dc_primitive,
    }
}
