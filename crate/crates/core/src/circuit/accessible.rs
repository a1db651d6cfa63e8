//! Accessible spaces of slices.
//!
//! The definition: a tuple `k` of slice sector labels is accessible when the
//! relation-level circuit with the single-value filter `ϖ[k]` inserted at the
//! slice is nonzero end to end (open wires are summed over). This is
//! evaluated tuple by tuple.
//!
//! The recipe treats routes as constraints over wire values. Starting from the
//! slice it collects every route linked to it through partitioned wires, joins
//! them and projects onto the slice. The two agree whenever the constraints
//! not linked to the slice are satisfiable, which holds for every circuit
//! whose routes have a nonzero composite.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::RoutedCircuit;
use crate::error::{Error, Result};
use crate::label::{IndexSet, Label, Subset};
use crate::par::Exec;
use crate::relations::{product_all, Relation};
use crate::spaces::PartitionedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Filter insertion, one end-to-end evaluation per tuple.
    Definition,
    /// Constraint join over the routes linked to the slice.
    Recipe,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccessibleSpace {
    pub wires: Vec<String>,
    /// Accessible tuples as a subset of the formal space's sector labels.
    pub tuples: Subset,
}

impl AccessibleSpace {
    pub fn labels(&self) -> Vec<Label> {
        self.tuples.labels()
    }

    pub fn formal_labels(&self) -> &IndexSet {
        self.tuples.universe()
    }
}

impl RoutedCircuit {
    /// Resolves slice wire ids, checking that no wire lies downstream of another.
    pub fn slice_indices(&self, wires: &[&str]) -> Result<Vec<usize>> {
        if wires.is_empty() {
            return Err(Error::InvalidSlice(
                "a slice needs at least one wire".into(),
            ));
        }
        let mut idx = Vec::with_capacity(wires.len());
        for w in wires {
            let i = self
                .wire_idx(w)
                .ok_or_else(|| Error::InvalidSlice(format!("unknown wire `{w}`")))?;
            if idx.contains(&i) {
                return Err(Error::InvalidSlice(format!("wire `{w}` listed twice")));
            }
            idx.push(i);
        }
        let desc = self.descendants();
        for &a in &idx {
            for &b in &idx {
                if desc[a][b] {
                    return Err(Error::InvalidSlice(format!(
                        "wire `{}` lies downstream of `{}`",
                        self.wires[b].0, self.wires[a].0
                    )));
                }
            }
        }
        Ok(idx)
    }

    /// Tensor of the slice wires' spaces.
    pub fn formal_space(&self, wires: &[&str]) -> Result<PartitionedSpace> {
        let idx = self.slice_indices(wires)?;
        Ok(PartitionedSpace::tensor_all(
            idx.iter().map(|&w| &self.wires[w].1),
        ))
    }

    pub fn accessible_space(
        &self,
        wires: &[&str],
        algorithm: Algorithm,
        exec: Exec,
    ) -> Result<AccessibleSpace> {
        let idx = self.slice_indices(wires)?;
        let sets: Vec<IndexSet> = idx
            .iter()
            .map(|&w| self.wires[w].1.labels().clone())
            .collect();
        let formal = product_all(&sets);
        let mask = match algorithm {
            Algorithm::Definition => self.accessible_by_definition(&idx, &sets, exec)?,
            Algorithm::Recipe => self.accessible_by_recipe(&idx)?,
        };
        Ok(AccessibleSpace {
            wires: wires.iter().map(|s| s.to_string()).collect(),
            tuples: Subset::from_mask(&formal, mask),
        })
    }

    fn accessible_by_definition(
        &self,
        idx: &[usize],
        sets: &[IndexSet],
        exec: Exec,
    ) -> Result<Vec<bool>> {
        let sizes: Vec<usize> = sets.iter().map(IndexSet::len).collect();
        let total: usize = sizes.iter().product();
        let procs: Vec<Relation> = self.boxes.iter().map(|b| b.map.route_relation()).collect();
        let objs = self.route_objs();
        let results = exec.map_range(total, |t| -> Result<bool> {
            let values = unrank(t, &sizes);
            let filters: HashMap<usize, Relation> = idx
                .iter()
                .zip(&values)
                .zip(sets)
                .map(|((&w, &v), set)| {
                    let mut mask = vec![false; set.len()];
                    mask[v] = true;
                    (w, Relation::diagonal_on(&Subset::from_mask(set, mask)))
                })
                .collect();
            let e = self.run(&procs, &objs, &self.layers, &filters, |_, _, _, _| Ok(()))?;
            Ok(!e.is_zero())
        });
        results.into_iter().collect()
    }

    fn accessible_by_recipe(&self, idx: &[usize]) -> Result<Vec<bool>> {
        let n = self.wires.len();
        let size: Vec<usize> = self.wires.iter().map(|(_, s)| s.num_sectors()).collect();
        let partitioned = |w: usize| size[w] > 1;

        // one constraint per box over its partitioned wires
        let mut constraints: Vec<(Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
        for bx in &self.boxes {
            let route = bx.map.route_relation();
            let ins: Vec<usize> = bx
                .inputs
                .iter()
                .map(|w| self.wire_idx(w).expect("validated"))
                .collect();
            let outs: Vec<usize> = bx
                .outputs
                .iter()
                .map(|w| self.wire_idx(w).expect("validated"))
                .collect();
            let in_sizes: Vec<usize> = ins.iter().map(|&w| size[w]).collect();
            let out_sizes: Vec<usize> = outs.iter().map(|&w| size[w]).collect();
            let all: Vec<usize> = ins.iter().chain(&outs).copied().collect();
            let keep: Vec<usize> = (0..all.len()).filter(|&i| partitioned(all[i])).collect();
            let scope: Vec<usize> = keep.iter().map(|&i| all[i]).collect();
            let mut rows: HashSet<Vec<usize>> = HashSet::new();
            for (k, l) in route.pairs() {
                let mut vals = unrank(k, &in_sizes);
                vals.extend(unrank(l, &out_sizes));
                rows.insert(keep.iter().map(|&i| vals[i]).collect());
            }
            let mut rows: Vec<Vec<usize>> = rows.into_iter().collect();
            rows.sort();
            constraints.push((scope, rows));
        }

        // constraints linked to the slice through partitioned wires
        let slice_vars: Vec<usize> = idx.iter().copied().filter(|&w| partitioned(w)).collect();
        let mut reached = vec![false; n];
        for &w in &slice_vars {
            reached[w] = true;
        }
        let mut order: Vec<usize> = Vec::new();
        let mut used = vec![false; constraints.len()];
        loop {
            let next = (0..constraints.len())
                .find(|&c| !used[c] && constraints[c].0.iter().any(|&w| reached[w]));
            let Some(c) = next else { break };
            used[c] = true;
            order.push(c);
            for &w in &constraints[c].0 {
                reached[w] = true;
            }
        }

        // join and eliminate variables once no pending constraint needs them
        let mut vars: Vec<usize> = slice_vars.clone();
        let mut table: HashSet<Vec<usize>> =
            product_rows(&vars.iter().map(|&w| size[w]).collect::<Vec<_>>());
        for (pos, &c) in order.iter().enumerate() {
            let (scope, rows) = &constraints[c];
            let shared: Vec<(usize, usize)> = scope
                .iter()
                .enumerate()
                .filter_map(|(j, w)| vars.iter().position(|v| v == w).map(|i| (i, j)))
                .collect();
            let fresh: Vec<usize> = (0..scope.len())
                .filter(|&j| !vars.contains(&scope[j]))
                .collect();
            let mut joined = HashSet::new();
            for row in &table {
                for r in rows {
                    if shared.iter().all(|&(i, j)| row[i] == r[j]) {
                        let mut out = row.clone();
                        out.extend(fresh.iter().map(|&j| r[j]));
                        joined.insert(out);
                    }
                }
            }
            vars.extend(fresh.iter().map(|&j| scope[j]));
            let pending: HashSet<usize> = order[pos + 1..]
                .iter()
                .flat_map(|&c| constraints[c].0.iter().copied())
                .collect();
            let keep: Vec<usize> = (0..vars.len())
                .filter(|&i| slice_vars.contains(&vars[i]) || pending.contains(&vars[i]))
                .collect();
            table = joined
                .into_iter()
                .map(|row| keep.iter().map(|&i| row[i]).collect())
                .collect();
            vars = keep.iter().map(|&i| vars[i]).collect();
        }

        let sizes: Vec<usize> = idx.iter().map(|&w| size[w]).collect();
        let total: usize = sizes.iter().product();
        let pos_in_vars: Vec<Option<usize>> = idx
            .iter()
            .map(|w| vars.iter().position(|v| v == w))
            .collect();
        let mut mask = vec![false; total];
        for row in &table {
            let values: Vec<usize> = pos_in_vars
                .iter()
                .map(|p| p.map_or(0, |i| row[i]))
                .collect();
            mask[rank(&values, &sizes)] = true;
        }
        Ok(mask)
    }
}

fn unrank(mut t: usize, sizes: &[usize]) -> Vec<usize> {
    let mut v = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        v[i] = t % sizes[i];
        t /= sizes[i];
    }
    v
}

fn rank(values: &[usize], sizes: &[usize]) -> usize {
    values
        .iter()
        .zip(sizes)
        .fold(0, |acc, (&v, &s)| acc * s + v)
}

fn product_rows(sizes: &[usize]) -> HashSet<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total).map(|t| unrank(t, sizes)).collect()
}
