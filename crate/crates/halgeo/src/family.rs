//! Bounded enumerations of terms and formulas, deduplicated by their values,
//! plus seeded random generators.
//!
//! Term enumeration keeps one representative per distinct value table over the
//! supplied algebras; since every downstream computation observes terms only
//! through evaluation, this loses nothing while keeping families small. The
//! formula enumeration grows a per-sort table of reachable point-set values by
//! length, closing under negation, the binary connectives, quantifiers and
//! (optionally) substitution transports between the registered sorts; it kees
//! the first formula reaching each value and serves as the brute-force side of
//! several cross-checks.

use rand::Rng;

use crate::algebra::{FiniteAlgebra, Point, PointIndex};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::pointset::PointSet;
use crate::syntax::{Substitution, Term, TermNode, VarSort, VarietySpec};

/// Representative terms over one sort together with their value tables.
#[derive(Debug, Clone)]
pub struct TermFamily {
    pub sort: VarSort,
    pub terms: Vec<Term>,
    /// `tables[a][t][p]`: value of term `t` at point `p` over algebra `a`.
    pub tables: Vec<Vec<Vec<u8>>>,
}

impl TermFamily {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Enumerates terms over `sort` up to the given tree depth, keeping one
/// representative per distinct joint value table over `algebras`. Variables
/// come first, then nullary symbols, then composites in generation order.
/// All supplied algebras must share a signature.
pub fn term_family(
    algebras: &[&FiniteAlgebra],
    sort: &VarSort,
    depth: usize,
) -> Result<TermFamily> {
    assert!(!algebras.is_empty());
    let spec = algebras[0].spec();
    for other in &algebras[1..] {
        algebras[0].same_signature(other)?;
    }
    for h in algebras {
        // value tables hold one byte per point
        if h.size() > u8::MAX as usize {
            return Err(Error::CapExceeded(format!(
                "`{}` has {} elements; term families support at most 255",
                h.name(),
                h.size()
            )));
        }
    }
    let spaces: Vec<usize> = algebras
        .iter()
        .map(|h| h.space_size(sort))
        .collect::<Result<Vec<_>>>()?;

    // dedup by joint value tables: hash buckets verified by full comparison
    let mut buckets: std::collections::HashMap<u64, Vec<usize>> = std::collections::HashMap::new();
    let mut nodes: Vec<TermNode> = Vec::new();
    let mut tables: Vec<Vec<Vec<u8>>> = vec![Vec::new(); algebras.len()];

    let push = |node: TermNode,
                vectors: Vec<Vec<u8>>,
                nodes: &mut Vec<TermNode>,
                tables: &mut Vec<Vec<Vec<u8>>>,
                buckets: &mut std::collections::HashMap<u64, Vec<usize>>| {
        use std::hash::{Hash, Hasher};
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        for v in &vectors {
            v.hash(&mut hasher);
        }
        let key = hasher.finish();
        let bucket = buckets.entry(key).or_default();
        for &idx in bucket.iter() {
            if (0..vectors.len()).all(|a| tables[a][idx] == vectors[a]) {
                return;
            }
        }
        bucket.push(nodes.len());
        nodes.push(node);
        for (a, v) in vectors.into_iter().enumerate() {
            tables[a].push(v);
        }
    };

    // depth-0 representatives: variables, then nullary operations
    for (i, _) in sort.vars().iter().enumerate() {
        let vectors: Vec<Vec<u8>> = algebras
            .iter()
            .zip(&spaces)
            .map(|(h, &space)| {
                let stride = h.size().pow(i as u32);
                (0..space).map(|p| (p / stride % h.size()) as u8).collect()
            })
            .collect();
        push(
            TermNode::Var(i),
            vectors,
            &mut nodes,
            &mut tables,
            &mut buckets,
        );
    }
    for (opi, op) in spec.ops().iter().enumerate() {
        if op.arity == 0 {
            let vectors: Vec<Vec<u8>> = algebras
                .iter()
                .zip(&spaces)
                .map(|(h, &space)| vec![h.apply_op(opi, &[]) as u8; space])
                .collect();
            push(
                TermNode::App(opi, Vec::new()),
                vectors,
                &mut nodes,
                &mut tables,
                &mut buckets,
            );
        }
    }

    let mut prev_start = 0;
    for _round in 0..depth {
        let upto = nodes.len();
        for (opi, op) in spec.ops().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let mut combo = vec![0usize; op.arity];
            loop {
                if combo.iter().any(|&c| c >= prev_start) {
                    let node =
                        TermNode::App(opi, combo.iter().map(|&c| nodes[c].clone()).collect());
                    let vectors: Vec<Vec<u8>> = algebras
                        .iter()
                        .enumerate()
                        .zip(&spaces)
                        .map(|((a, h), &space)| match combo.len() {
                            1 => {
                                let va = &tables[a][combo[0]];
                                (0..space)
                                    .map(|p| h.apply_op(opi, &[va[p] as usize]) as u8)
                                    .collect()
                            }
                            2 => {
                                let va = &tables[a][combo[0]];
                                let vb = &tables[a][combo[1]];
                                (0..space)
                                    .map(|p| {
                                        h.apply_op(opi, &[va[p] as usize, vb[p] as usize]) as u8
                                    })
                                    .collect()
                            }
                            _ => {
                                let mut args = vec![0usize; combo.len()];
                                (0..space)
                                    .map(|p| {
                                        for (slot, &c) in args.iter_mut().zip(combo.iter()) {
                                            *slot = tables[a][c][p] as usize;
                                        }
                                        h.apply_op(opi, &args) as u8
                                    })
                                    .collect()
                            }
                        })
                        .collect();
                    push(node, vectors, &mut nodes, &mut tables, &mut buckets);
                }
                let mut pos = 0;
                loop {
                    if pos == combo.len() {
                        break;
                    }
                    combo[pos] += 1;
                    if combo[pos] < upto {
                        break;
                    }
                    combo[pos] = 0;
                    pos += 1;
                }
                if pos == combo.len() {
                    break;
                }
            }
        }
        if upto == nodes.len() {
            break; // closed: no new values appeared this round
        }
        prev_start = upto;
    }

    let terms = nodes
        .into_iter()
        .map(|node| Term {
            sort: sort.clone(),
            node,
        })
        .collect();
    Ok(TermFamily {
        sort: sort.clone(),
        terms,
        tables,
    })
}

/// One representative formula per reachable value tuple.
#[derive(Debug, Clone)]
pub struct FamilyEntry {
    pub formula: Formula,
    pub length: usize,
    /// Values over the algebras the family was built against, in order.
    pub values: Vec<PointSet>,
}

#[derive(Debug, Clone)]
pub struct FormulaFamily {
    pub sorts: Vec<VarSort>,
    /// `entries[s]`: deduplicated entries of sort `s`, in enumeration order.
    pub entries: Vec<Vec<FamilyEntry>>,
}

impl FormulaFamily {
    pub fn entries_of(&self, sort: &VarSort) -> &[FamilyEntry] {
        let idx = self
            .sorts
            .iter()
            .position(|s| s == sort)
            .expect("sort not in family");
        &self.entries[idx]
    }
}

/// Knobs for `formula_family`.
#[derive(Debug, Clone)]
pub struct FamilyOptions {
    pub max_len: usize,
    pub atom_depth: usize,
    /// Include substitution nodes transporting formulas between the sorts.
    pub transports: bool,
    /// Hard bound on entries per sort; enumeration stops growing past it.
    pub max_entries: usize,
}

impl Default for FamilyOptions {
    fn default() -> FamilyOptions {
        FamilyOptions {
            max_len: 4,
            atom_depth: 2,
            transports: true,
            max_entries: 50_000,
        }
    }
}

/// Enumerates formulas over each registered sort up to `opts.max_len`,
/// deduplicated by their joint values over `algebras`. Atoms are equalities
/// between term-family representatives at `opts.atom_depth`.
pub fn formula_family(
    algebras: &[&FiniteAlgebra],
    sorts: &[VarSort],
    opts: &FamilyOptions,
) -> Result<FormulaFamily> {
    assert!(!algebras.is_empty() && !sorts.is_empty());
    let n_sorts = sorts.len();
    let mut entries: Vec<Vec<FamilyEntry>> = vec![Vec::new(); n_sorts];
    let mut by_length: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); opts.max_len + 1]; n_sorts];
    let mut seen: Vec<std::collections::HashSet<Vec<u64>>> =
        vec![std::collections::HashSet::new(); n_sorts];

    let key_of = |values: &[PointSet]| -> Vec<u64> {
        let mut key = Vec::new();
        for v in values {
            let words = v.space_size().div_ceil(64).max(1);
            let base = key.len();
            key.resize(base + words, 0);
            for i in v.indices() {
                key[base + i.0 / 64] |= 1 << (i.0 % 64);
            }
            key.push(0x5eed ^ v.space_size() as u64);
        }
        key
    };

    // substitution families and their pullback maps, indexed [src][tgt]
    type SubEntry = (Substitution, Vec<Vec<usize>>);
    let mut subs: Vec<Vec<Vec<SubEntry>>> = vec![vec![Vec::new(); n_sorts]; n_sorts];
    if opts.transports {
        for (ti, tgt) in sorts.iter().enumerate() {
            let reps = term_family(algebras, tgt, opts.atom_depth)?;
            for (si, src) in sorts.iter().enumerate() {
                match reps.len().checked_pow(src.arity() as u32) {
                    Some(c) if c <= 20_000 => {}
                    _ => {
                        return Err(Error::CapExceeded(format!(
                            "substitution family `{}` -> `{}` too large",
                            src.name(),
                            tgt.name()
                        )))
                    }
                }
                let mut combo = vec![0usize; src.arity()];
                loop {
                    let images: Vec<Term> = combo.iter().map(|&c| reps.terms[c].clone()).collect();
                    let s = Substitution::new(src, tgt, images)?;
                    let maps = algebras
                        .iter()
                        .map(|h| PointSet::pullback_map(h, &s))
                        .collect::<Result<Vec<_>>>()?;
                    subs[si][ti].push((s, maps));
                    let mut pos = 0;
                    loop {
                        if pos == combo.len() {
                            break;
                        }
                        combo[pos] += 1;
                        if combo[pos] < reps.len() {
                            break;
                        }
                        combo[pos] = 0;
                        pos += 1;
                    }
                    if pos == combo.len() {
                        break;
                    }
                }
            }
        }
    }

    // length 0: equality atoms over term representatives
    for (si, sort) in sorts.iter().enumerate() {
        let reps = term_family(algebras, sort, opts.atom_depth)?;
        for i in 0..reps.len() {
            for j in i..reps.len() {
                let f = Formula::equality(reps.terms[i].clone(), reps.terms[j].clone())?;
                let values = algebras
                    .iter()
                    .map(|h| PointSet::equality(h, &reps.terms[i], &reps.terms[j]))
                    .collect::<Result<Vec<_>>>()?;
                let key = key_of(&values);
                if seen[si].insert(key) && entries[si].len() < opts.max_entries {
                    by_length[si][0].push(entries[si].len());
                    entries[si].push(FamilyEntry {
                        formula: f,
                        length: 0,
                        values,
                    });
                }
            }
        }
    }

    for len in 1..=opts.max_len {
        let mut candidates: Vec<(usize, Formula, Vec<PointSet>)> = Vec::new();
        for si in 0..n_sorts {
            for &fi in &by_length[si][len - 1] {
                let entry = &entries[si][fi];
                candidates.push((
                    si,
                    Formula::not(entry.formula.clone()),
                    entry.values.iter().map(PointSet::complement).collect(),
                ));
                for x in sorts[si].vars() {
                    let values = entry
                        .values
                        .iter()
                        .map(|v| v.exists(x))
                        .collect::<Result<Vec<_>>>()?;
                    candidates.push((si, Formula::exists(x, entry.formula.clone())?, values));
                }
            }
            for l1 in 0..len {
                let l2 = len - 1 - l1;
                for &fi in &by_length[si][l1] {
                    for &gi in &by_length[si][l2] {
                        let f = &entries[si][fi];
                        let g = &entries[si][gi];
                        let inter = f
                            .values
                            .iter()
                            .zip(&g.values)
                            .map(|(a, b)| a.intersect(b))
                            .collect::<Result<Vec<_>>>()?;
                        candidates.push((
                            si,
                            Formula::and(f.formula.clone(), g.formula.clone())?,
                            inter,
                        ));
                        let uni = f
                            .values
                            .iter()
                            .zip(&g.values)
                            .map(|(a, b)| a.union(b))
                            .collect::<Result<Vec<_>>>()?;
                        candidates.push((
                            si,
                            Formula::or(f.formula.clone(), g.formula.clone())?,
                            uni,
                        ));
                    }
                }
            }
            if opts.transports {
                for sj in 0..n_sorts {
                    for (s, maps) in &subs[sj][si] {
                        for &fi in &by_length[sj][len - 1] {
                            let entry = &entries[sj][fi];
                            let mut values = Vec::with_capacity(algebras.len());
                            for (a, h) in algebras.iter().enumerate() {
                                let mut out = PointSet::bottom(h, &sorts[si])?;
                                for (tgt_idx, &src_idx) in maps[a].iter().enumerate() {
                                    if entry.values[a].contains(PointIndex(src_idx)) {
                                        out.insert(PointIndex(tgt_idx));
                                    }
                                }
                                values.push(out);
                            }
                            candidates.push((
                                si,
                                Formula::subst(s.clone(), entry.formula.clone())?,
                                values,
                            ));
                        }
                    }
                }
            }
        }
        for (si, f, values) in candidates {
            let key = key_of(&values);
            if seen[si].insert(key) && entries[si].len() < opts.max_entries {
                by_length[si][len].push(entries[si].len());
                entries[si].push(FamilyEntry {
                    formula: f,
                    length: len,
                    values,
                });
            }
        }
    }

    Ok(FormulaFamily {
        sorts: sorts.to_vec(),
        entries,
    })
}

/// Canonical sorts `x`, `x y`, `x y z`, ... for checks that quantify over
/// sort sizes.
pub fn canonical_sorts(max_vars: usize) -> Vec<VarSort> {
    let names = ["x", "y", "z", "w", "v5", "v6", "v7", "v8"];
    assert!(max_vars <= names.len());
    (1..=max_vars)
        .map(|n| VarSort::new(&format!("X{n}"), &names[..n]).unwrap())
        .collect()
}

// ---------------------------------------------------------------------------
// Seeded random generation
// ---------------------------------------------------------------------------

pub fn random_term<R: Rng>(
    rng: &mut R,
    spec: &VarietySpec,
    sort: &VarSort,
    max_depth: usize,
) -> Term {
    Term {
        sort: sort.clone(),
        node: random_node(rng, spec, sort, max_depth),
    }
}

fn random_node<R: Rng>(
    rng: &mut R,
    spec: &VarietySpec,
    sort: &VarSort,
    max_depth: usize,
) -> TermNode {
    let composites: Vec<usize> = spec
        .ops()
        .iter()
        .enumerate()
        .filter_map(|(i, op)| (op.arity > 0).then_some(i))
        .collect();
    let nullaries: Vec<usize> = spec
        .ops()
        .iter()
        .enumerate()
        .filter_map(|(i, op)| (op.arity == 0).then_some(i))
        .collect();
    let leaf = max_depth == 0 || composites.is_empty() || rng.random_bool(0.45);
    if leaf {
        let pool = sort.arity() + nullaries.len();
        let pick = rng.random_range(0..pool);
        if pick < sort.arity() {
            TermNode::Var(pick)
        } else {
            TermNode::App(nullaries[pick - sort.arity()], Vec::new())
        }
    } else {
        let op = composites[rng.random_range(0..composites.len())];
        let args = (0..spec.ops()[op].arity)
            .map(|_| random_node(rng, spec, sort, max_depth - 1))
            .collect();
        TermNode::App(op, args)
    }
}

/// Random term whose support avoids the given variable positions. `None` when
/// the signature offers no way to do so.
pub fn random_term_avoiding<R: Rng>(
    rng: &mut R,
    spec: &VarietySpec,
    sort: &VarSort,
    max_depth: usize,
    avoid: &[usize],
) -> Option<Term> {
    let allowed: Vec<usize> = (0..sort.arity()).filter(|i| !avoid.contains(i)).collect();
    let nullaries: Vec<usize> = spec
        .ops()
        .iter()
        .enumerate()
        .filter_map(|(i, op)| (op.arity == 0).then_some(i))
        .collect();
    if allowed.is_empty() && nullaries.is_empty() {
        return None;
    }
    for _ in 0..64 {
        let t = random_term(rng, spec, sort, max_depth);
        if t.support().iter().all(|i| !avoid.contains(i)) {
            return Some(t);
        }
    }
    let node = if allowed.is_empty() {
        TermNode::App(nullaries[0], Vec::new())
    } else {
        TermNode::Var(allowed[rng.random_range(0..allowed.len())])
    };
    Some(Term {
        sort: sort.clone(),
        node,
    })
}

pub fn random_substitution<R: Rng>(
    rng: &mut R,
    spec: &VarietySpec,
    from: &VarSort,
    to: &VarSort,
    max_depth: usize,
) -> Substitution {
    let images = (0..from.arity())
        .map(|_| random_term(rng, spec, to, max_depth))
        .collect();
    Substitution::new(from, to, images).expect("images built over the codomain")
}

pub fn random_point<R: Rng>(rng: &mut R, h: &FiniteAlgebra, sort: &VarSort) -> Point {
    let values = (0..sort.arity())
        .map(|_| rng.random_range(0..h.size()))
        .collect();
    Point::new(sort, values).unwrap()
}

pub fn random_point_set<R: Rng>(
    rng: &mut R,
    h: &FiniteAlgebra,
    sort: &VarSort,
) -> Result<PointSet> {
    let mut set = PointSet::bottom(h, sort)?;
    for i in 0..set.space_size() {
        if rng.random_bool(0.5) {
            set.insert(PointIndex(i));
        }
    }
    Ok(set)
}

/// Random single-sorted formula with the given length budget.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    spec: &VarietySpec,
    sort: &VarSort,
    len_budget: usize,
) -> Formula {
    if len_budget == 0 {
        let lhs = random_term(rng, spec, sort, 2);
        let rhs = random_term(rng, spec, sort, 2);
        return Formula::equality(lhs, rhs).expect("same sort");
    }
    match rng.random_range(0..4) {
        0 => Formula::not(random_formula(rng, spec, sort, len_budget - 1)),
        1 => {
            let var = sort.vars()[rng.random_range(0..sort.arity())].clone();
            Formula::exists(&var, random_formula(rng, spec, sort, len_budget - 1)).unwrap()
        }
        2 => {
            let l1 = rng.random_range(0..len_budget);
            let f = random_formula(rng, spec, sort, l1);
            let g = random_formula(rng, spec, sort, len_budget - 1 - l1);
            Formula::and(f, g).unwrap()
        }
        _ => {
            let l1 = rng.random_range(0..len_budget);
            let f = random_formula(rng, spec, sort, l1);
            let g = random_formula(rng, spec, sort, len_budget - 1 - l1);
            Formula::or(f, g).unwrap()
        }
    }
}
