//! Bounded point types by back-and-forth refinement, automorphism orbits, and
//! the deciders built on them: isotypy, logical and algebraic homogeneity,
//! and greedy reduction of formula systems.
//!
//! The rank-0 type of a point is the equivalence pattern its evaluations
//! induce on a canonical family of terms (which atomic equalities hold). Rank
//! `k+1` refines rank `k`: two points stay equivalent when their rank-`k`
//! classes agree and every one-variable extension of one is matched by an
//! extension of the other landing in the same rank-`k` class over the
//! extended sort. Cross-algebra partitions share one term family so classes
//! compare across carriers.

use std::collections::HashMap;

use crate::algebra::{FiniteAlgebra, Point, PointIndex};
use crate::congruence::kernels_equal;
use crate::error::{Error, Result};
use crate::family::{canonical_sorts, term_family};
use crate::geometry::{logical_solve, FormulaSystem};
use crate::morphisms::automorphism_group;
use crate::syntax::VarSort;

/// Tuning for type partitions.
#[derive(Debug, Clone, Copy)]
pub struct TypeOptions {
    /// Depth of the canonical term family behind the atomic (rank-0) types.
    pub atom_depth: usize,
}

impl Default for TypeOptions {
    fn default() -> TypeOptions {
        TypeOptions { atom_depth: 2 }
    }
}

/// A partition of one or two point spaces over a common sort. Class ids are
/// canonical: numbered by first appearance in flattened index order, so equal
/// partitions have equal `class_of` vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub sort: VarSort,
    /// Space sizes per participating algebra, in order.
    pub spaces: Vec<usize>,
    /// Flattened point index (first algebra's block first) to class id.
    pub class_of: Vec<u32>,
    pub class_count: usize,
}

impl Partition {
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(i);
        }
        out
    }

    /// Members of each class, restricted to one algebra's block, as local
    /// point indices.
    pub fn classes_of_block(&self, block: usize) -> Vec<Vec<usize>> {
        let start: usize = self.spaces[..block].iter().sum();
        let end = start + self.spaces[block];
        let mut out = vec![Vec::new(); self.class_count];
        for i in start..end {
            out[self.class_of[i] as usize].push(i - start);
        }
        out
    }

    pub fn class_of_local(&self, block: usize, index: PointIndex) -> u32 {
        let start: usize = self.spaces[..block].iter().sum();
        self.class_of[start + index.0]
    }

    /// `class <id>: {point, point, ...}` lines, one algebra only.
    pub fn render(&self, h: &FiniteAlgebra) -> Vec<String> {
        let mut lines = Vec::new();
        for (id, members) in self.classes_of_block(0).iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let pts: Vec<String> = members
                .iter()
                .map(|&i| Point::from_index(&self.sort, h.size(), PointIndex(i)).display(h))
                .collect();
            lines.push(format!("class {id}: {{{}}}", pts.join(", ")));
        }
        lines
    }
}

fn canonicalize(raw: &[u64]) -> (Vec<u32>, usize) {
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut out = Vec::with_capacity(raw.len());
    for &key in raw {
        let next = ids.len() as u32;
        let id = *ids.entry(key).or_insert(next);
        out.push(id);
    }
    (out, ids.len())
}

/// Atomic (rank-0) partition of the joint space: points are classed by the
/// equivalence pattern of their evaluations over the shared term family.
fn atomic_partition(
    algebras: &[&FiniteAlgebra],
    sort: &VarSort,
    atom_depth: usize,
) -> Result<Partition> {
    let family = term_family(algebras, sort, atom_depth)?;
    let spaces: Vec<usize> = algebras
        .iter()
        .map(|h| h.space_size(sort))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = spaces.iter().sum();
    let mut pattern_ids: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut class_of = Vec::with_capacity(total);
    let mut pattern = vec![0u8; family.len()];
    for (a, &space) in spaces.iter().enumerate() {
        for p in 0..space {
            // ordinal encoding of the value kernel: terms with equal values at
            // p share an ordinal, ordinals numbered by first appearance
            let mut next = 0u8;
            let mut val_ord: [u8; 256] = [u8::MAX; 256];
            for (t, table) in family.tables[a].iter().enumerate() {
                let v = table[p] as usize;
                if val_ord[v] == u8::MAX {
                    val_ord[v] = next;
                    next += 1;
                }
                pattern[t] = val_ord[v];
            }
            let id_next = pattern_ids.len() as u32;
            let id = *pattern_ids.entry(pattern.clone()).or_insert(id_next);
            class_of.push(id);
        }
    }
    // renumber by first appearance (entry order already is; keep explicit)
    let raw: Vec<u64> = class_of.iter().map(|&c| c as u64).collect();
    let (class_of, class_count) = canonicalize(&raw);
    Ok(Partition {
        sort: sort.clone(),
        spaces,
        class_of,
        class_count,
    })
}

/// One refinement round: combines each point's previous class with the set of
/// previous classes over the extended sort reachable by giving the fresh
/// variable every value.
fn refine_step(algebras: &[&FiniteAlgebra], base: &Partition, extended: &Partition) -> Partition {
    let mut key_ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
    let mut class_of = Vec::with_capacity(base.class_of.len());
    let mut flat = 0;
    let mut ext_offset = 0;
    for (a, h) in algebras.iter().enumerate() {
        let space = base.spaces[a];
        let n = h.size();
        for p in 0..space {
            let mut ext_classes: Vec<u32> = (0..n)
                .map(|v| extended.class_of[ext_offset + p + v * space])
                .collect();
            ext_classes.sort_unstable();
            ext_classes.dedup();
            let key = (base.class_of[flat], ext_classes);
            let next = key_ids.len() as u32;
            let id = *key_ids.entry(key).or_insert(next);
            class_of.push(id);
            flat += 1;
        }
        ext_offset += extended.spaces[a];
    }
    let raw: Vec<u64> = class_of.iter().map(|&c| c as u64).collect();
    let (class_of, class_count) = canonicalize(&raw);
    Partition {
        sort: base.sort.clone(),
        spaces: base.spaces.clone(),
        class_of,
        class_count,
    }
}

/// Joint type partition of the point spaces of several algebras (sharing a
/// signature) over one sort, at the given rank.
pub fn joint_type_partition(
    algebras: &[&FiniteAlgebra],
    sort: &VarSort,
    rank: usize,
    opts: TypeOptions,
) -> Result<Partition> {
    assert!(!algebras.is_empty());
    for other in &algebras[1..] {
        algebras[0].same_signature(other)?;
    }
    // sorts chain: the base sort extended by one fresh variable per level
    let mut chain = vec![sort.clone()];
    for i in 0..rank {
        chain.push(chain[i].extended(i + 1));
    }
    // rank-0 partitions for every chain sort, then fold the triangle down
    let mut row: Vec<Partition> = chain
        .iter()
        .map(|s| atomic_partition(algebras, s, opts.atom_depth))
        .collect::<Result<Vec<_>>>()?;
    for r in 1..=rank {
        let mut next_row = Vec::with_capacity(rank - r + 1);
        for i in 0..=(rank - r) {
            next_row.push(refine_step(algebras, &row[i], &row[i + 1]));
        }
        row = next_row;
    }
    Ok(row.swap_remove(0))
}

/// Type partition of a single algebra's point space.
pub fn type_partition(
    h: &FiniteAlgebra,
    sort: &VarSort,
    rank: usize,
    opts: TypeOptions,
) -> Result<Partition> {
    joint_type_partition(&[h], sort, rank, opts)
}

/// Orbits of the automorphism group acting coordinatewise on points.
pub fn orbit_partition(h: &FiniteAlgebra, sort: &VarSort) -> Result<Partition> {
    let space = h.space_size(sort)?;
    let auts = automorphism_group(h);
    let n = h.size();
    // union-find over point indices
    let mut parent: Vec<usize> = (0..space).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let arity = sort.arity();
    let mut digits = vec![0usize; arity];
    for sigma in &auts {
        for p in 0..space {
            let mut rest = p;
            for d in digits.iter_mut() {
                *d = rest % n;
                rest /= n;
            }
            let mut q = 0;
            for &d in digits.iter().rev() {
                q = q * n + sigma[d];
            }
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp != rq {
                let (lo, hi) = (rp.min(rq), rp.max(rq));
                parent[hi] = lo;
            }
        }
    }
    let raw: Vec<u64> = (0..space).map(|p| find(&mut parent, p) as u64).collect();
    let (class_of, class_count) = canonicalize(&raw);
    Ok(Partition {
        sort: sort.clone(),
        spaces: vec![space],
        class_of,
        class_count,
    })
}

/// Cross-algebra type equality of two points at bounded rank.
pub fn same_type_cross(
    h1: &FiniteAlgebra,
    mu: &Point,
    h2: &FiniteAlgebra,
    nu: &Point,
    rank: usize,
    opts: TypeOptions,
) -> Result<bool> {
    h1.same_signature(h2)?;
    if mu.sort != nu.sort {
        return Err(Error::SortMismatch(format!(
            "points over `{}` and `{}`",
            mu.sort.name(),
            nu.sort.name()
        )));
    }
    let part = joint_type_partition(&[h1, h2], &mu.sort, rank, opts)?;
    Ok(part.class_of_local(0, mu.index(h1.size())) == part.class_of_local(1, nu.index(h2.size())))
}

/// Outcome of the isotypy check.
#[derive(Debug, Clone)]
pub enum IsotypyVerdict {
    Isotypic {
        max_vars: usize,
        rank_reached: usize,
    },
    NotIsotypic {
        /// 0 for the first algebra, 1 for the second.
        witness_block: usize,
        witness: Point,
        separating_rank: usize,
    },
}

impl IsotypyVerdict {
    pub fn is_isotypic(&self) -> bool {
        matches!(self, IsotypyVerdict::Isotypic { .. })
    }
}

/// Decides whether the two point spaces realize the same bounded types in
/// both directions, for every sort size up to `max_vars`.
///
/// Rank escalates from zero; any unmatched class gives a definitive negative
/// with the earliest separating rank and a least witness point. The positive
/// verdict is reported once the joint partitions stay stable for two
/// consecutive ranks (or the rank bound is reached) and records the rank; for
/// finite algebras the stabilized partition realizes the bounded-type
/// matching exactly.
pub fn isotypic_check(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    max_vars: usize,
    rank: Option<usize>,
    opts: TypeOptions,
) -> Result<IsotypyVerdict> {
    h1.same_signature(h2)?;
    if max_vars == 0 {
        return Err(Error::InvalidInput(
            "max_vars must be at least 1".to_string(),
        ));
    }
    let rank_max = rank.unwrap_or(h1.size() + h2.size() + max_vars);
    let mut rank_reached = 0;
    for sort in canonical_sorts(max_vars) {
        let mut previous: Option<Partition> = None;
        let mut stable = 0;
        for r in 0..=rank_max {
            let part = joint_type_partition(&[h1, h2], &sort, r, opts)?;
            if let Some(flat) = first_unmatched(&part) {
                let (block, local) = split_flat(&part, flat);
                let h = if block == 0 { h1 } else { h2 };
                return Ok(IsotypyVerdict::NotIsotypic {
                    witness_block: block,
                    witness: Point::from_index(&sort, h.size(), PointIndex(local)),
                    separating_rank: r,
                });
            }
            rank_reached = rank_reached.max(r);
            if previous
                .as_ref()
                .is_some_and(|p| p.class_of == part.class_of)
            {
                stable += 1;
                if stable >= 2 {
                    break;
                }
            } else {
                stable = 0;
            }
            previous = Some(part);
        }
    }
    Ok(IsotypyVerdict::Isotypic {
        max_vars,
        rank_reached,
    })
}

/// First flattened index whose class misses on the other side, scanning the
/// first algebra's block then the second's.
fn first_unmatched(part: &Partition) -> Option<usize> {
    let cut = part.spaces[0];
    let mut seen0 = vec![false; part.class_count];
    let mut seen1 = vec![false; part.class_count];
    for (i, &c) in part.class_of.iter().enumerate() {
        if i < cut {
            seen0[c as usize] = true;
        } else {
            seen1[c as usize] = true;
        }
    }
    part.class_of.iter().enumerate().position(|(i, &c)| {
        if i < cut {
            !seen1[c as usize]
        } else {
            !seen0[c as usize]
        }
    })
}

fn split_flat(part: &Partition, flat: usize) -> (usize, usize) {
    if flat < part.spaces[0] {
        (0, flat)
    } else {
        (1, flat - part.spaces[0])
    }
}

/// Outcome of the logical homogeneity check.
#[derive(Debug, Clone)]
pub enum HomogeneityVerdict {
    Homogeneous { max_vars: usize, rank: usize },
    NotHomogeneous { sort: VarSort, pair: (Point, Point) },
}

impl HomogeneityVerdict {
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, HomogeneityVerdict::Homogeneous { .. })
    }
}

/// Logically homogeneous at the checked scale: type-equal points lie in one
/// orbit, for every sort size up to `max_vars`. The rank defaults to
/// `|H| + n` for the sort of `n` variables, where the type partition of a
/// finite algebra has stabilized.
pub fn homogeneity_check(
    h: &FiniteAlgebra,
    max_vars: usize,
    rank: Option<usize>,
    opts: TypeOptions,
) -> Result<HomogeneityVerdict> {
    let mut max_rank = 0;
    for (n, sort) in canonical_sorts(max_vars).into_iter().enumerate() {
        let r = rank.unwrap_or(h.size() + n + 1);
        max_rank = max_rank.max(r);
        let types = type_partition(h, &sort, r, opts)?;
        let orbits = orbit_partition(h, &sort)?;
        // orbits always refine types; violation means a type class spanning
        // two orbits
        let mut orbit_of_class: Vec<Option<(u32, usize)>> = vec![None; types.class_count];
        for (p, &tc) in types.class_of.iter().enumerate() {
            let oc = orbits.class_of[p];
            match orbit_of_class[tc as usize] {
                None => orbit_of_class[tc as usize] = Some((oc, p)),
                Some((first_orbit, first_point)) => {
                    if first_orbit != oc {
                        return Ok(HomogeneityVerdict::NotHomogeneous {
                            sort: sort.clone(),
                            pair: (
                                Point::from_index(&sort, h.size(), PointIndex(first_point)),
                                Point::from_index(&sort, h.size(), PointIndex(p)),
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(HomogeneityVerdict::Homogeneous {
        max_vars,
        rank: max_rank,
    })
}

/// Algebraically homogeneous at the checked scale: kernel-equal points lie in
/// one orbit. Kernel equality is exact (decided on the generated subalgebras),
/// not bounded by term depth.
pub fn algebraic_homogeneity_check(
    h: &FiniteAlgebra,
    max_vars: usize,
) -> Result<HomogeneityVerdict> {
    for sort in canonical_sorts(max_vars) {
        let space = h.space_size(&sort)?;
        let orbits = orbit_partition(h, &sort)?;
        let points: Vec<Point> = h.enumerate_points(&sort)?;
        for i in 0..space {
            for j in (i + 1)..space {
                if orbits.class_of[i] != orbits.class_of[j]
                    && kernels_equal(h, &points[i], &points[j])?
                {
                    return Ok(HomogeneityVerdict::NotHomogeneous {
                        sort: sort.clone(),
                        pair: (points[i].clone(), points[j].clone()),
                    });
                }
            }
        }
    }
    Ok(HomogeneityVerdict::Homogeneous { max_vars, rank: 0 })
}

/// Greedy left-to-right reduction of a formula system: drops every member
/// whose removal keeps the solution set identical. The result is a subsystem
/// with a bit-identical solution set.
pub fn noetherian_reduce(h: &FiniteAlgebra, system: &FormulaSystem) -> Result<FormulaSystem> {
    let target = logical_solve(h, system)?;
    let mut kept: Vec<usize> = (0..system.formulas.len()).collect();
    let mut i = 0;
    while i < kept.len() {
        let mut candidate = kept.clone();
        candidate.remove(i);
        let sub = FormulaSystem {
            sort: system.sort.clone(),
            formulas: candidate
                .iter()
                .map(|&k| system.formulas[k].clone())
                .collect(),
        };
        if logical_solve(h, &sub)? == target {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(FormulaSystem {
        sort: system.sort.clone(),
        formulas: kept.iter().map(|&k| system.formulas[k].clone()).collect(),
    })
}
