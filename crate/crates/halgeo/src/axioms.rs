//! Semantic verification of the laws tying transports to the boolean
//! structure, the quantifiers and the equalities.
//!
//! Five law groups are exercised, named by their customary labels:
//!
//! - `2`: transports are boolean homomorphisms and compose functorially
//! - `3a`: transporting a cylinder ignores the image of the cylinder variable
//! - `3b`: transports commute with the quantifier when the variable maps to a
//!   variable fresh for every other image
//! - `4a`: transports send an equality to the equality of the image terms
//! - `4b`: an elementary substitution is bounded by the matching equality
//!
//! Each law is checked as exact point-set identity (inclusion for `4b`) on
//! randomized instances drawn from a seeded generator, or exhaustively over a
//! bounded family of substitutions and all point sets at micro scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{FiniteAlgebra, PointIndex};
use crate::error::{Error, Result};
use crate::family::{
    random_point_set, random_substitution, random_term, random_term_avoiding, term_family,
};
use crate::pointset::PointSet;
use crate::syntax::{Substitution, Term, TermNode, VarSort};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomId {
    Composition,
    QuantifierChoice,
    QuantifierPush,
    EqualityTransport,
    ElementaryBound,
}

impl AxiomId {
    pub const ALL: [AxiomId; 5] = [
        AxiomId::Composition,
        AxiomId::QuantifierChoice,
        AxiomId::QuantifierPush,
        AxiomId::EqualityTransport,
        AxiomId::ElementaryBound,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            AxiomId::Composition => "2",
            AxiomId::QuantifierChoice => "3a",
            AxiomId::QuantifierPush => "3b",
            AxiomId::EqualityTransport => "4a",
            AxiomId::ElementaryBound => "4b",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AxiomResult {
    pub axiom: AxiomId,
    pub trials: usize,
    pub passes: usize,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub algebra: String,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passes == r.trials)
    }

    /// `axioms 2,3a,3b,4a,4b: PASS n/n` when everything passed and every law
    /// ran the same number of instances; per-law lines otherwise.
    pub fn summary(&self) -> String {
        if self.all_passed() {
            let labels: Vec<&str> = self.results.iter().map(|r| r.axiom.label()).collect();
            let lo = self.results.iter().map(|r| r.trials).min().unwrap_or(0);
            let hi = self.results.iter().map(|r| r.trials).max().unwrap_or(0);
            if lo == hi {
                format!("axioms {}: PASS {lo}/{lo}", labels.join(","))
            } else {
                let per: Vec<String> = self
                    .results
                    .iter()
                    .map(|r| format!("{}:{}/{}", r.axiom.label(), r.passes, r.trials))
                    .collect();
                format!("axioms PASS [{}]", per.join(" "))
            }
        } else {
            let mut out = String::new();
            for r in &self.results {
                if r.passes != r.trials {
                    out.push_str(&format!(
                        "axiom {}: FAIL {}/{}\n  counterexample: {}\n",
                        r.axiom.label(),
                        r.passes,
                        r.trials,
                        r.counterexample.as_deref().unwrap_or("<none recorded>")
                    ));
                }
            }
            out.trim_end().to_string()
        }
    }
}

struct Recorder {
    trials: usize,
    passes: usize,
    counterexample: Option<String>,
}

impl Recorder {
    fn new() -> Recorder {
        Recorder {
            trials: 0,
            passes: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if ok {
            self.passes += 1;
        } else if self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }

    fn result(self, axiom: AxiomId) -> AxiomResult {
        AxiomResult {
            axiom,
            trials: self.trials,
            passes: self.passes,
            counterexample: self.counterexample,
        }
    }
}

/// Seeded randomized verification: `trials` instances per law, drawn over the
/// registered sorts.
pub fn verify_halmos_axioms(
    h: &FiniteAlgebra,
    sorts: &[VarSort],
    trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".to_string()));
    }
    if sorts.is_empty() {
        return Err(Error::InvalidInput("no sorts registered".to_string()));
    }
    for sort in sorts {
        h.space_size(sort)?;
    }
    let spec = h.spec().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = 2;

    let mut composition = Recorder::new();
    for _ in 0..trials {
        let x = &sorts[rng.random_range(0..sorts.len())];
        let y = &sorts[rng.random_range(0..sorts.len())];
        let z = &sorts[rng.random_range(0..sorts.len())];
        let s = random_substitution(&mut rng, &spec, x, y, depth);
        let s2 = random_substitution(&mut rng, &spec, y, z, depth);
        let a = random_point_set(&mut rng, h, x)?;
        let b = random_point_set(&mut rng, h, x)?;
        let composite = s.compose(&s2)?;
        let lhs = PointSet::transport(h, &composite, &a)?;
        let rhs = PointSet::transport(h, &s2, &PointSet::transport(h, &s, &a)?)?;
        let ta = PointSet::transport(h, &s, &a)?;
        let tb = PointSet::transport(h, &s, &b)?;
        let hom_union = PointSet::transport(h, &s, &a.union(&b)?)? == ta.union(&tb)?;
        let hom_inter = PointSet::transport(h, &s, &a.intersect(&b)?)? == ta.intersect(&tb)?;
        let hom_compl = PointSet::transport(h, &s, &a.complement())? == ta.complement();
        let hom_top = PointSet::transport(h, &s, &PointSet::top(h, x)?)?.is_full();
        let ok = lhs == rhs && hom_union && hom_inter && hom_compl && hom_top;
        composition.record(ok, || {
            format!(
                "law 2 on {}: s={} s'={} A={}",
                h.name(),
                s.display(&spec),
                s2.display(&spec),
                a.hex_mask()
            )
        });
    }

    let mut choice = Recorder::new();
    for _ in 0..trials {
        let x = &sorts[rng.random_range(0..sorts.len())];
        let y = &sorts[rng.random_range(0..sorts.len())];
        let var_pos = rng.random_range(0..x.arity());
        let var = x.vars()[var_pos].clone();
        let s1 = random_substitution(&mut rng, &spec, x, y, depth);
        let mut images = s1.images().to_vec();
        images[var_pos] = random_term(&mut rng, &spec, y, depth);
        let s2 = Substitution::new(x, y, images)?;
        let a = random_point_set(&mut rng, h, x)?;
        let cyl = a.exists(&var)?;
        let ok = PointSet::transport(h, &s1, &cyl)? == PointSet::transport(h, &s2, &cyl)?;
        choice.record(ok, || {
            format!(
                "law 3a on {}: x={var} s1={} s2={} A={}",
                h.name(),
                s1.display(&spec),
                s2.display(&spec),
                a.hex_mask()
            )
        });
    }

    let mut push = Recorder::new();
    let mut push_attempts = 0;
    while push.trials < trials && push_attempts < trials * 100 {
        push_attempts += 1;
        let x = &sorts[rng.random_range(0..sorts.len())];
        let y = &sorts[rng.random_range(0..sorts.len())];
        let var_pos = rng.random_range(0..x.arity());
        let var = x.vars()[var_pos].clone();
        let y_pos = rng.random_range(0..y.arity());
        let y_var = y.vars()[y_pos].clone();
        // images of the other variables must avoid the chosen target variable
        let mut images = Vec::with_capacity(x.arity());
        let mut feasible = true;
        for i in 0..x.arity() {
            if i == var_pos {
                images.push(Term {
                    sort: y.clone(),
                    node: TermNode::Var(y_pos),
                });
            } else {
                match random_term_avoiding(&mut rng, &spec, y, depth, &[y_pos]) {
                    Some(t) => images.push(t),
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
        }
        if !feasible {
            continue;
        }
        let s = Substitution::new(x, y, images)?;
        let a = random_point_set(&mut rng, h, x)?;
        let lhs = PointSet::transport(h, &s, &a.exists(&var)?)?;
        let rhs = PointSet::transport(h, &s, &a)?.exists(&y_var)?;
        push.record(lhs == rhs, || {
            format!(
                "law 3b on {}: x={var} s={} A={}",
                h.name(),
                s.display(&spec),
                a.hex_mask()
            )
        });
    }

    let mut equality = Recorder::new();
    for _ in 0..trials {
        let x = &sorts[rng.random_range(0..sorts.len())];
        let y = &sorts[rng.random_range(0..sorts.len())];
        let s = random_substitution(&mut rng, &spec, x, y, depth);
        let w = random_term(&mut rng, &spec, x, depth);
        let w2 = random_term(&mut rng, &spec, x, depth);
        let lhs = PointSet::transport(h, &s, &PointSet::equality(h, &w, &w2)?)?;
        let rhs = PointSet::equality(h, &s.apply(&w)?, &s.apply(&w2)?)?;
        equality.record(lhs == rhs, || {
            format!(
                "law 4a on {}: s={} w={} w'={}",
                h.name(),
                s.display(&spec),
                w.display(&spec),
                w2.display(&spec)
            )
        });
    }

    let mut bound = Recorder::new();
    for _ in 0..trials {
        let x = &sorts[rng.random_range(0..sorts.len())];
        let var = x.vars()[rng.random_range(0..x.arity())].clone();
        let w = random_term(&mut rng, &spec, x, depth);
        let w2 = random_term(&mut rng, &spec, x, depth);
        let a = random_point_set(&mut rng, h, x)?;
        let sw = Substitution::elementary(x, &var, w.clone())?;
        let sw2 = Substitution::elementary(x, &var, w2.clone())?;
        let lhs = PointSet::transport(h, &sw, &a)?.intersect(&PointSet::equality(h, &w, &w2)?)?;
        let rhs = PointSet::transport(h, &sw2, &a)?;
        let ok = lhs.is_subset(&rhs)?;
        bound.record(ok, || {
            format!(
                "law 4b on {}: x={var} w={} w'={} A={}",
                h.name(),
                w.display(&spec),
                w2.display(&spec),
                a.hex_mask()
            )
        });
    }

    Ok(AxiomReport {
        algebra: h.name().to_string(),
        results: vec![
            composition.result(AxiomId::Composition),
            choice.result(AxiomId::QuantifierChoice),
            push.result(AxiomId::QuantifierPush),
            equality.result(AxiomId::EqualityTransport),
            bound.result(AxiomId::ElementaryBound),
        ],
    })
}

/// Exhaustive verification over every substitution with images drawn from the
/// term representatives at `term_depth`, every point set, every variable
/// choice and every representative term pair. Two terms with equal value
/// tables act identically in every law here, so the representative family
/// covers the full bounded term space. Intended for micro scale: spaces of at
/// most 16 points.
pub fn verify_halmos_axioms_exhaustive(
    h: &FiniteAlgebra,
    sorts: &[VarSort],
    term_depth: usize,
) -> Result<AxiomReport> {
    for sort in sorts {
        let size = h.space_size(sort)?;
        if size > 8 {
            return Err(Error::CapExceeded(format!(
                "exhaustive mode over `{}` needs at most 8 points, got {size}",
                sort.name()
            )));
        }
    }
    let spec = h.spec().clone();
    let families: Vec<_> = sorts
        .iter()
        .map(|s| term_family(&[h], s, term_depth))
        .collect::<Result<Vec<_>>>()?;
    let mut subs: Vec<Vec<Vec<Substitution>>> = vec![vec![Vec::new(); sorts.len()]; sorts.len()];
    for (si, src) in sorts.iter().enumerate() {
        for (ti, tgt) in sorts.iter().enumerate() {
            let reps = &families[ti];
            let mut combo = vec![0usize; src.arity()];
            loop {
                let images: Vec<Term> = combo.iter().map(|&c| reps.terms[c].clone()).collect();
                subs[si][ti].push(Substitution::new(src, tgt, images)?);
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
    let all_sets = |sort_idx: usize| -> Result<Vec<PointSet>> {
        let space = h.space_size(&sorts[sort_idx])?;
        (0..1usize << space)
            .map(|mask| {
                let mut set = PointSet::bottom(h, &sorts[sort_idx])?;
                for i in 0..space {
                    if mask >> i & 1 == 1 {
                        set.insert(PointIndex(i));
                    }
                }
                Ok(set)
            })
            .collect()
    };

    let mut composition = Recorder::new();
    let mut choice = Recorder::new();
    let mut push = Recorder::new();
    let mut equality = Recorder::new();
    let mut bound = Recorder::new();

    for si in 0..sorts.len() {
        let sets = all_sets(si)?;
        for ti in 0..sorts.len() {
            for s in &subs[si][ti] {
                for a in &sets {
                    let ta = PointSet::transport(h, s, a)?;
                    for b in &sets {
                        let tb = PointSet::transport(h, s, b)?;
                        let tu = PointSet::transport(h, s, &a.union(b)?)?;
                        let tn = PointSet::transport(h, s, &a.intersect(b)?)?;
                        let ok = tu == ta.union(&tb)? && tn == ta.intersect(&tb)?;
                        composition.record(ok, || {
                            format!(
                                "law 2 hom: s={} A={} B={}",
                                s.display(&spec),
                                a.hex_mask(),
                                b.hex_mask()
                            )
                        });
                    }
                    let tc = PointSet::transport(h, s, &a.complement())?;
                    composition.record(tc == ta.complement(), || {
                        format!("law 2 compl: s={} A={}", s.display(&spec), a.hex_mask())
                    });
                }
                for tgt_subs in &subs[ti] {
                    for s2 in tgt_subs {
                        let composite = s.compose(s2)?;
                        for a in &sets {
                            let lhs = PointSet::transport(h, &composite, a)?;
                            let rhs = PointSet::transport(h, s2, &PointSet::transport(h, s, a)?)?;
                            composition.record(lhs == rhs, || {
                                format!(
                                    "law 2 comp: s={} s'={} A={}",
                                    s.display(&spec),
                                    s2.display(&spec),
                                    a.hex_mask()
                                )
                            });
                        }
                    }
                }
                for (var_pos, var) in sorts[si].vars().iter().enumerate() {
                    for replacement in &families[ti].terms {
                        let mut images = s.images().to_vec();
                        images[var_pos] = replacement.clone();
                        let s2 = Substitution::new(&sorts[si], &sorts[ti], images)?;
                        for a in &sets {
                            let cyl = a.exists(var)?;
                            let lhs = PointSet::transport(h, s, &cyl)?;
                            let rhs = PointSet::transport(h, &s2, &cyl)?;
                            choice.record(lhs == rhs, || {
                                format!(
                                    "law 3a: x={var} s={} s'={} A={}",
                                    s.display(&spec),
                                    s2.display(&spec),
                                    a.hex_mask()
                                )
                            });
                        }
                    }
                    if let TermNode::Var(y_pos) = &s.image(var_pos).node {
                        let fresh_elsewhere = s
                            .images()
                            .iter()
                            .enumerate()
                            .all(|(i, img)| i == var_pos || !img.support().contains(y_pos));
                        if fresh_elsewhere {
                            let y_var = &sorts[ti].vars()[*y_pos];
                            for a in &sets {
                                let lhs = PointSet::transport(h, s, &a.exists(var)?)?;
                                let rhs = PointSet::transport(h, s, a)?.exists(y_var)?;
                                push.record(lhs == rhs, || {
                                    format!(
                                        "law 3b: x={var} s={} A={}",
                                        s.display(&spec),
                                        a.hex_mask()
                                    )
                                });
                            }
                        }
                    }
                }
                for w in &families[si].terms {
                    for w2 in &families[si].terms {
                        let lhs = PointSet::transport(h, s, &PointSet::equality(h, w, w2)?)?;
                        let rhs = PointSet::equality(h, &s.apply(w)?, &s.apply(w2)?)?;
                        equality.record(lhs == rhs, || {
                            format!(
                                "law 4a: s={} w={} w'={}",
                                s.display(&spec),
                                w.display(&spec),
                                w2.display(&spec)
                            )
                        });
                    }
                }
            }
        }
        for var in sorts[si].vars() {
            for w in &families[si].terms {
                for w2 in &families[si].terms {
                    let sw = Substitution::elementary(&sorts[si], var, w.clone())?;
                    let sw2 = Substitution::elementary(&sorts[si], var, w2.clone())?;
                    let eq = PointSet::equality(h, w, w2)?;
                    for a in &sets {
                        let lhs = PointSet::transport(h, &sw, a)?.intersect(&eq)?;
                        let rhs = PointSet::transport(h, &sw2, a)?;
                        bound.record(lhs.is_subset(&rhs)?, || {
                            format!(
                                "law 4b: x={var} w={} w'={} A={}",
                                w.display(&spec),
                                w2.display(&spec),
                                a.hex_mask()
                            )
                        });
                    }
                }
            }
        }
    }

    Ok(AxiomReport {
        algebra: h.name().to_string(),
        results: vec![
            composition.result(AxiomId::Composition),
            choice.result(AxiomId::QuantifierChoice),
            push.result(AxiomId::QuantifierPush),
            equality.result(AxiomId::EqualityTransport),
            bound.result(AxiomId::ElementaryBound),
        ],
    })
}
