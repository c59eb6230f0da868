//! Equation and formula systems, their solution sets in the affine space, the
//! two Galois correspondences sitting over them, and the bounded equivalence
//! deciders built on top.
//!
//! Equations cut out algebraic sets; their dual closure is a point-closed
//! congruence presented finitely through `congruence`. Formula systems cut out
//! definable sets; for a finite algebra the double closure of a point set
//! equals the union of automorphism orbits meeting it, which is how
//! `definable_closure` computes it (the formula-enumeration route serves as an
//! independent oracle in the test suite).

use crate::algebra::{FiniteAlgebra, Point, PointIndex};
use crate::congruence::present_closed_congruence;
use crate::error::{Error, Result};
use crate::family::{canonical_sorts, formula_family, term_family, FamilyOptions};
use crate::formula::{parse_formula, val, Formula, SortRegistry};
use crate::isotypy::{isotypic_check, IsotypyVerdict, TypeOptions};
use crate::morphisms::automorphism_group;
use crate::pointset::PointSet;
use crate::syntax::{tokenize, Parser, Term, Token, VarSort, VarietySpec};

/// A finite list of term pairs over one sort, read as simultaneous equations.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSystem {
    pub sort: VarSort,
    pub pairs: Vec<(Term, Term)>,
}

/// A finite list of formulas of one sort.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaSystem {
    pub sort: VarSort,
    pub formulas: Vec<Formula>,
}

impl EquationSystem {
    pub fn new(sort: &VarSort, pairs: Vec<(Term, Term)>) -> Result<EquationSystem> {
        for (l, r) in &pairs {
            if l.sort != *sort || r.sort != *sort {
                return Err(Error::SortMismatch(format!(
                    "equation over `{}`/`{}` in system over `{}`",
                    l.sort.name(),
                    r.sort.name(),
                    sort.name()
                )));
            }
        }
        Ok(EquationSystem {
            sort: sort.clone(),
            pairs,
        })
    }

    /// Line-oriented file format: a `sort <name>` header, then one
    /// `term == term` line per equation. `#` starts a comment.
    pub fn parse(
        text: &str,
        registry: &SortRegistry,
        spec: &VarietySpec,
    ) -> Result<EquationSystem> {
        let (sort, lines) = system_header(text, registry)?;
        let mut pairs = Vec::new();
        for line in lines {
            let tokens = tokenize(&line)?;
            let mut p = Parser::new(&tokens);
            let lhs = p.term(&sort, spec)?;
            p.expect(Token::EqEq)?;
            let rhs = p.term(&sort, spec)?;
            p.expect_end()?;
            pairs.push((
                Term {
                    sort: sort.clone(),
                    node: lhs,
                },
                Term {
                    sort: sort.clone(),
                    node: rhs,
                },
            ));
        }
        EquationSystem::new(&sort, pairs)
    }
}

impl FormulaSystem {
    pub fn new(sort: &VarSort, formulas: Vec<Formula>) -> Result<FormulaSystem> {
        for f in &formulas {
            if f.sort() != sort {
                return Err(Error::SortMismatch(format!(
                    "formula of sort `{}` in system over `{}`",
                    f.sort().name(),
                    sort.name()
                )));
            }
        }
        Ok(FormulaSystem {
            sort: sort.clone(),
            formulas,
        })
    }

    /// Same header as equation files, then one grammar formula per line.
    pub fn parse(text: &str, registry: &SortRegistry, spec: &VarietySpec) -> Result<FormulaSystem> {
        let (sort, lines) = system_header(text, registry)?;
        let formulas = lines
            .iter()
            .map(|line| parse_formula(line, &sort, registry, spec))
            .collect::<Result<Vec<_>>>()?;
        FormulaSystem::new(&sort, formulas)
    }
}

fn system_header(text: &str, registry: &SortRegistry) -> Result<(VarSort, Vec<String>)> {
    let mut sort = None;
    let mut lines = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if sort.is_none() {
            let Some(name) = line.strip_prefix("sort ") else {
                return Err(Error::Syntax(format!(
                    "expected `sort <name>` header, found `{line}`"
                )));
            };
            let name = name.trim();
            sort = Some(
                registry
                    .lookup(name)
                    .ok_or_else(|| Error::UnknownSymbol(format!("sort `{name}`")))?
                    .clone(),
            );
        } else {
            lines.push(line.to_string());
        }
    }
    let sort = sort.ok_or_else(|| Error::Syntax("missing `sort <name>` header".to_string()))?;
    Ok((sort, lines))
}

/// Solution set of an equation system: points whose kernel contains every
/// pair. The empty system solves to the full space.
pub fn solve_equations(h: &FiniteAlgebra, system: &EquationSystem) -> Result<PointSet> {
    let mut out = PointSet::top(h, &system.sort)?;
    for (l, r) in &system.pairs {
        out = out.intersect(&PointSet::equality(h, l, r)?)?;
    }
    Ok(out)
}

/// Policy for the closure of a system with an empty solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyClosurePolicy {
    /// The dual of the empty point set is the full congruence; every pair is
    /// a member.
    #[default]
    FullCongruence,
    /// Treat an empty solution set as an error.
    Strict,
}

/// Membership of a pair in the double closure of the system: the pair must be
/// identified by every solution point.
pub fn algebraic_closure_contains(
    h: &FiniteAlgebra,
    system: &EquationSystem,
    lhs: &Term,
    rhs: &Term,
    policy: EmptyClosurePolicy,
) -> Result<bool> {
    if lhs.sort != system.sort || rhs.sort != system.sort {
        return Err(Error::SortMismatch(
            "query pair outside the system sort".to_string(),
        ));
    }
    let solutions = solve_equations(h, system)?;
    if solutions.is_empty() {
        return match policy {
            EmptyClosurePolicy::FullCongruence => Ok(true),
            EmptyClosurePolicy::Strict => Err(Error::InvalidInput(
                "empty solution set; closure is the full congruence".to_string(),
            )),
        };
    }
    let points: Vec<Point> = solutions
        .indices()
        .map(|i| Point::from_index(&system.sort, h.size(), i))
        .collect();
    let pres = present_closed_congruence(h, &points)?;
    pres.contains(h, lhs, rhs)
}

/// The double closure of an arbitrary point set under the equational
/// correspondence: points whose kernel contains the kernel intersection of
/// the input. The empty set closes to the points with a fully collapsed
/// kernel (which is again empty whenever the empty set is algebraic).
pub fn algebraic_closure_points(h: &FiniteAlgebra, a: &PointSet) -> Result<PointSet> {
    let sort = a.sort().clone();
    let mut out = PointSet::bottom(h, &sort)?;
    let all: Vec<Point> = h.enumerate_points(&sort)?;
    if a.is_empty() {
        for (i, p) in all.iter().enumerate() {
            let pres = present_closed_congruence(h, std::slice::from_ref(p))?;
            if pres.image_size() == 1 {
                out.insert(PointIndex(i));
            }
        }
        return Ok(out);
    }
    let members: Vec<Point> = a
        .indices()
        .map(|i| Point::from_index(&sort, h.size(), i))
        .collect();
    let pres = present_closed_congruence(h, &members)?;
    for (i, p) in all.iter().enumerate() {
        if pres.admits_point(h, p)? {
            out.insert(PointIndex(i));
        }
    }
    Ok(out)
}

/// Solution set of a formula system: points whose logical kernel contains
/// every member. The empty system solves to the full space. Sets of this form
/// are exactly the definable sets at this sort.
pub fn logical_solve(h: &FiniteAlgebra, system: &FormulaSystem) -> Result<PointSet> {
    let mut out = PointSet::top(h, &system.sort)?;
    for f in &system.formulas {
        out = out.intersect(&val(h, f)?)?;
    }
    Ok(out)
}

/// Membership of a formula in the dual of a point set: every point of the set
/// must satisfy it.
pub fn logical_closure_contains(h: &FiniteAlgebra, a: &PointSet, f: &Formula) -> Result<bool> {
    if a.sort() != f.sort() {
        return Err(Error::SortMismatch(format!(
            "set over `{}`, formula of sort `{}`",
            a.sort().name(),
            f.sort().name()
        )));
    }
    a.is_subset(&val(h, f)?)
}

/// The double closure of a point set under the logical correspondence,
/// computed as the union of automorphism orbits meeting the set; for a finite
/// algebra this coincides with the closure through formulas. Extensive and
/// idempotent.
pub fn definable_closure(h: &FiniteAlgebra, a: &PointSet) -> Result<PointSet> {
    let mut out = a.clone();
    for sigma in automorphism_group(h) {
        out = out.union(&a.permute_elements(&sigma))?;
    }
    Ok(out)
}

/// A bounded quasiidentity: the conjunction of the premises entails the
/// conclusion.
#[derive(Debug, Clone)]
pub struct Quasiidentity {
    pub sort: VarSort,
    pub premises: Vec<(Term, Term)>,
    pub conclusion: (Term, Term),
}

impl Quasiidentity {
    pub fn display(&self, spec: &VarietySpec) -> String {
        let prem: Vec<String> = self
            .premises
            .iter()
            .map(|(l, r)| format!("{} == {}", l.display(spec), r.display(spec)))
            .collect();
        format!(
            "{} => {} == {}",
            prem.join(" & "),
            self.conclusion.0.display(spec),
            self.conclusion.1.display(spec)
        )
    }

    /// Whether the quasiidentity holds in the algebra: every solution of the
    /// premises satisfies the conclusion.
    pub fn holds_in(&self, h: &FiniteAlgebra) -> Result<bool> {
        let system = EquationSystem::new(&self.sort, self.premises.clone())?;
        let solutions = solve_equations(h, &system)?;
        let conclusion = PointSet::equality(h, &self.conclusion.0, &self.conclusion.1)?;
        solutions.is_subset(&conclusion)
    }
}

#[derive(Debug, Clone)]
pub struct AgOptions {
    /// Term depth of the enumerated equations.
    pub depth: usize,
    /// Largest sort size enumerated.
    pub max_vars: usize,
    /// Largest number of premises per system.
    pub max_pairs: usize,
    /// Bound on the number of systems examined.
    pub budget: usize,
}

impl Default for AgOptions {
    fn default() -> AgOptions {
        AgOptions {
            depth: 3,
            max_vars: 2,
            max_pairs: 2,
            budget: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum AgVerdict {
    /// A quasiidentity of the bounded family holds in exactly one algebra.
    NotEquivalent {
        witness: Quasiidentity,
        holds_in_first: bool,
        systems_checked: usize,
    },
    /// The bounded family is exhausted (or the budget ran out) with no
    /// separating quasiidentity. Never a claim about the unbounded question.
    BoundedEquivalent {
        systems_checked: usize,
        budget_exhausted: bool,
    },
}

impl AgVerdict {
    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, AgVerdict::NotEquivalent { .. })
    }
}

/// Compares the double closures of every enumerated equation system over both
/// algebras, reporting the first (in canonical enumeration order) separating
/// quasiidentity. Term enumeration is deduplicated by joint value tables,
/// which preserves exactly the distinctions visible to either algebra.
pub fn ag_equivalent(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    opts: &AgOptions,
) -> Result<AgVerdict> {
    h1.same_signature(h2)?;
    let mut systems_checked = 0usize;
    for sort in canonical_sorts(opts.max_vars) {
        let family = term_family(&[h1, h2], &sort, opts.depth)?;
        let n = family.len();
        // solution sets of single equations, per algebra
        let mut eq1: Vec<Vec<PointSet>> = vec![Vec::new(); n];
        let mut eq2: Vec<Vec<PointSet>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    let a = eq1[j][i].clone();
                    let b = eq2[j][i].clone();
                    eq1[i].push(a);
                    eq2[i].push(b);
                } else {
                    eq1[i].push(PointSet::equality(h1, &family.terms[i], &family.terms[j])?);
                    eq2[i].push(PointSet::equality(h2, &family.terms[i], &family.terms[j])?);
                }
            }
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        // systems of one or two distinct premises, in lexicographic order
        let mut seen: std::collections::HashMap<(String, String), Option<(usize, usize)>> =
            std::collections::HashMap::new();
        let mut examine = |premises: &[(usize, usize)],
                           systems_checked: &mut usize|
         -> Result<Option<Quasiidentity>> {
            *systems_checked += 1;
            let mut a1 = PointSet::top(h1, &sort)?;
            let mut a2 = PointSet::top(h2, &sort)?;
            for &(i, j) in premises {
                a1 = a1.intersect(&eq1[i][j])?;
                a2 = a2.intersect(&eq2[i][j])?;
            }
            let key = (a1.hex_mask(), a2.hex_mask());
            let outcome = match seen.get(&key) {
                Some(cached) => *cached,
                None => {
                    let mut found = None;
                    'scan: for k in 0..n {
                        for l in (k + 1)..n {
                            let in1 = a1.is_subset(&eq1[k][l])?;
                            let in2 = a2.is_subset(&eq2[k][l])?;
                            if in1 != in2 {
                                found = Some((k, l));
                                break 'scan;
                            }
                        }
                    }
                    seen.insert(key, found);
                    found
                }
            };
            Ok(outcome.map(|(k, l)| Quasiidentity {
                sort: sort.clone(),
                premises: premises
                    .iter()
                    .map(|&(i, j)| (family.terms[i].clone(), family.terms[j].clone()))
                    .collect(),
                conclusion: (family.terms[k].clone(), family.terms[l].clone()),
            }))
        };
        if opts.max_pairs >= 1 {
            for &p in &pairs {
                if systems_checked >= opts.budget {
                    return Ok(AgVerdict::BoundedEquivalent {
                        systems_checked,
                        budget_exhausted: true,
                    });
                }
                if let Some(witness) = examine(&[p], &mut systems_checked)? {
                    let holds_in_first = witness.holds_in(h1)?;
                    return Ok(AgVerdict::NotEquivalent {
                        witness,
                        holds_in_first,
                        systems_checked,
                    });
                }
            }
        }
        if opts.max_pairs >= 2 {
            for a in 0..pairs.len() {
                for b in (a + 1)..pairs.len() {
                    if systems_checked >= opts.budget {
                        return Ok(AgVerdict::BoundedEquivalent {
                            systems_checked,
                            budget_exhausted: true,
                        });
                    }
                    if let Some(witness) = examine(&[pairs[a], pairs[b]], &mut systems_checked)? {
                        let holds_in_first = witness.holds_in(h1)?;
                        return Ok(AgVerdict::NotEquivalent {
                            witness,
                            holds_in_first,
                            systems_checked,
                        });
                    }
                }
            }
        }
    }
    Ok(AgVerdict::BoundedEquivalent {
        systems_checked,
        budget_exhausted: false,
    })
}

#[derive(Debug, Clone)]
pub struct LgOptions {
    pub max_vars: usize,
    /// Rank bound for the type comparison; defaults like the isotypy checker.
    pub rank: Option<usize>,
    pub type_opts: TypeOptions,
    /// Length bound of the separating-sentence search on a negative verdict.
    pub sentence_len: usize,
}

impl Default for LgOptions {
    fn default() -> LgOptions {
        LgOptions {
            max_vars: 2,
            rank: None,
            type_opts: TypeOptions::default(),
            sentence_len: 3,
        }
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum LgVerdict {
    Equivalent {
        max_vars: usize,
        rank_reached: usize,
    },
    NotEquivalent {
        /// A sentence-like formula in one theory and not the other, when the
        /// bounded search finds one.
        witness_sentence: Option<Formula>,
        witness_block: usize,
        witness_point: Point,
        separating_rank: usize,
    },
}

impl LgVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, LgVerdict::Equivalent { .. })
    }
}

/// Decides equality of the double closures of formula systems through the
/// type machinery: the algebras are equivalent here exactly when they are
/// isotypic, so the verdict delegates to the isotypy checker and, on a
/// negative answer, searches a bounded formula family for a separating
/// sentence to report.
pub fn lg_equivalent(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    opts: &LgOptions,
) -> Result<LgVerdict> {
    match isotypic_check(h1, h2, opts.max_vars, opts.rank, opts.type_opts)? {
        IsotypyVerdict::Isotypic {
            max_vars,
            rank_reached,
        } => Ok(LgVerdict::Equivalent {
            max_vars,
            rank_reached,
        }),
        IsotypyVerdict::NotIsotypic {
            witness_block,
            witness,
            separating_rank,
        } => {
            let sorts = canonical_sorts(opts.max_vars.min(2));
            let fam = formula_family(
                &[h1, h2],
                &sorts,
                &FamilyOptions {
                    max_len: opts.sentence_len,
                    atom_depth: 2,
                    transports: false,
                    max_entries: 20_000,
                },
            )?;
            let mut witness_sentence = None;
            'search: for entries in &fam.entries {
                for entry in entries {
                    let in1 = entry.values[0].is_full();
                    let in2 = entry.values[1].is_full();
                    if in1 != in2 {
                        witness_sentence = Some(entry.formula.clone());
                        break 'search;
                    }
                }
            }
            Ok(LgVerdict::NotEquivalent {
                witness_sentence,
                witness_block,
                witness_point: witness,
                separating_rank,
            })
        }
    }
}
