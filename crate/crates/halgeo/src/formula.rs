//! The sorted, length-graded algebra of formulas and its evaluation into
//! point sets.
//!
//! Formulas are raw trees over equality atoms: negation, conjunction,
//! disjunction, existential quantifiers and substitution nodes. Evaluation
//! (`val`) is the unique structural extension sending an equality atom to its
//! solution set; its kernel at a given sort is the theory of the algebra at
//! that sort. `normalize` applies the oriented transport laws as rewrite
//! rules, pushing substitution nodes down to the atoms.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{FiniteAlgebra, Point};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::syntax::{tokenize, Parser, Substitution, Term, Token, VarSort, VarietySpec};

/// A formula of one sort. Substitution nodes change sorts; every other
/// connective preserves them.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Equality(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Subst(Substitution, Box<Formula>),
}

impl Formula {
    pub fn equality(lhs: Term, rhs: Term) -> Result<Formula> {
        if lhs.sort != rhs.sort {
            return Err(Error::SortMismatch(format!(
                "equality sides over `{}` and `{}`",
                lhs.sort.name(),
                rhs.sort.name()
            )));
        }
        Ok(Formula::Equality(lhs, rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(f: Formula, g: Formula) -> Result<Formula> {
        if f.sort() != g.sort() {
            return Err(Error::SortMismatch(format!(
                "conjunction of sorts `{}` and `{}`",
                f.sort().name(),
                g.sort().name()
            )));
        }
        Ok(Formula::And(Box::new(f), Box::new(g)))
    }

    pub fn or(f: Formula, g: Formula) -> Result<Formula> {
        if f.sort() != g.sort() {
            return Err(Error::SortMismatch(format!(
                "disjunction of sorts `{}` and `{}`",
                f.sort().name(),
                g.sort().name()
            )));
        }
        Ok(Formula::Or(Box::new(f), Box::new(g)))
    }

    pub fn exists(var: &str, f: Formula) -> Result<Formula> {
        if f.sort().position(var).is_none() {
            return Err(Error::VarNotInSort(format!(
                "`{var}` in sort `{}`",
                f.sort().name()
            )));
        }
        Ok(Formula::Exists(var.to_string(), Box::new(f)))
    }

    pub fn subst(s: Substitution, f: Formula) -> Result<Formula> {
        if *f.sort() != *s.domain() {
            return Err(Error::SortMismatch(format!(
                "substitution from `{}` applied to formula of sort `{}`",
                s.domain().name(),
                f.sort().name()
            )));
        }
        Ok(Formula::Subst(s, Box::new(f)))
    }

    /// Sort of the formula. Atoms take the sort of their terms, substitution
    /// nodes the codomain of their map, every other node that of its child.
    pub fn sort(&self) -> &VarSort {
        match self {
            Formula::Equality(lhs, _) => &lhs.sort,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::And(f, _) | Formula::Or(f, _) => {
                f.sort()
            }
            Formula::Subst(s, _) => s.codomain(),
        }
    }

    /// Length grading: atoms have length zero; negation, quantifiers and
    /// substitution nodes add one; binary connectives add the lengths plus one.
    pub fn length(&self) -> usize {
        match self {
            Formula::Equality(..) => 0,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Subst(_, f) => f.length() + 1,
            Formula::And(f, g) | Formula::Or(f, g) => f.length() + g.length() + 1,
        }
    }

    /// Deep well-formedness: sort rules at every node.
    pub fn validate(&self) -> Result<()> {
        match self {
            Formula::Equality(lhs, rhs) => {
                if lhs.sort != rhs.sort {
                    return Err(Error::SortMismatch("equality sides differ".to_string()));
                }
                Ok(())
            }
            Formula::Not(f) => f.validate(),
            Formula::And(f, g) | Formula::Or(f, g) => {
                f.validate()?;
                g.validate()?;
                if f.sort() != g.sort() {
                    return Err(Error::SortMismatch(
                        "connective joins different sorts".to_string(),
                    ));
                }
                Ok(())
            }
            Formula::Exists(x, f) => {
                f.validate()?;
                if f.sort().position(x).is_none() {
                    return Err(Error::VarNotInSort(format!(
                        "`{x}` in sort `{}`",
                        f.sort().name()
                    )));
                }
                Ok(())
            }
            Formula::Subst(s, f) => {
                f.validate()?;
                if *f.sort() != *s.domain() {
                    return Err(Error::SortMismatch(
                        "substitution domain differs from child sort".to_string(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn display(&self, spec: &VarietySpec) -> String {
        match self {
            Formula::Equality(lhs, rhs) => {
                format!("({} == {})", lhs.display(spec), rhs.display(spec))
            }
            Formula::Not(f) => format!("~{}", f.display(spec)),
            Formula::And(f, g) => format!("({} & {})", f.display(spec), g.display(spec)),
            Formula::Or(f, g) => format!("({} | {})", f.display(spec), g.display(spec)),
            Formula::Exists(x, f) => format!("E {x}.{}", f.display(spec)),
            Formula::Subst(s, f) => format!("{} {}", s.display(spec), f.display(spec)),
        }
    }
}

/// Named registry of sorts, needed to resolve substitution annotations.
#[derive(Debug, Clone, Default)]
pub struct SortRegistry {
    sorts: Vec<VarSort>,
}

impl SortRegistry {
    pub fn new() -> SortRegistry {
        SortRegistry::default()
    }

    pub fn register(&mut self, sort: VarSort) -> Result<()> {
        if self.lookup(sort.name()).is_some() {
            return Err(Error::InvalidInput(format!(
                "sort `{}` registered twice",
                sort.name()
            )));
        }
        self.sorts.push(sort);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&VarSort> {
        self.sorts.iter().find(|s| s.name() == name)
    }

    pub fn sorts(&self) -> &[VarSort] {
        &self.sorts
    }
}

/// Parses a formula of the expected sort.
///
/// Grammar: atom `(term == term)`, negation `~f`, conjunction `(f & g)`,
/// disjunction `(f | g)`, existential `E x. f`, substitution
/// `[x->term, ... : SortX -> SortY] f`. Binary connectives require their
/// parentheses; whitespace is insignificant.
pub fn parse_formula(
    text: &str,
    sort: &VarSort,
    registry: &SortRegistry,
    spec: &VarietySpec,
) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(&tokens);
    let f = parse_node(&mut p, sort, registry, spec)?;
    p.expect_end()?;
    Ok(f)
}

fn parse_node(
    p: &mut Parser,
    sort: &VarSort,
    registry: &SortRegistry,
    spec: &VarietySpec,
) -> Result<Formula> {
    p.enter()?;
    let out = parse_node_inner(p, sort, registry, spec);
    p.leave();
    out
}

fn parse_node_inner(
    p: &mut Parser,
    sort: &VarSort,
    registry: &SortRegistry,
    spec: &VarietySpec,
) -> Result<Formula> {
    match p.peek() {
        Some(Token::Tilde) => {
            p.expect(Token::Tilde)?;
            Ok(Formula::not(parse_node(p, sort, registry, spec)?))
        }
        Some(Token::Ident(name)) if name == "E" => {
            p.expect(Token::Ident("E".to_string()))?;
            let var = p.ident()?;
            p.expect(Token::Dot)?;
            let body = parse_node(p, sort, registry, spec)?;
            Formula::exists(&var, body)
        }
        Some(Token::LBracket) => {
            p.expect(Token::LBracket)?;
            // The codomain is needed to parse image terms, so collect the
            // mapping as raw token spans first and resolve after the header.
            let mut pairs: Vec<(String, Vec<Token>)> = Vec::new();
            loop {
                let var = p.ident()?;
                p.expect(Token::Arrow)?;
                let mut depth = 0usize;
                let mut span = Vec::new();
                loop {
                    match p.peek() {
                        Some(Token::LParen) => depth += 1,
                        Some(Token::RParen) => depth -= 1,
                        Some(Token::Comma) | Some(Token::Colon) if depth == 0 => break,
                        None => return Err(Error::Syntax("unterminated substitution".to_string())),
                        _ => {}
                    }
                    span.push(p.next()?.clone());
                }
                pairs.push((var, span));
                match p.next()? {
                    Token::Comma => continue,
                    Token::Colon => break,
                    t => return Err(Error::Syntax(format!("expected `,` or `:`, found {t}"))),
                }
            }
            let from_name = p.ident()?;
            p.expect(Token::Arrow)?;
            let to_name = p.ident()?;
            p.expect(Token::RBracket)?;
            let from = registry
                .lookup(&from_name)
                .ok_or_else(|| Error::UnknownSymbol(format!("sort `{from_name}`")))?
                .clone();
            let to = registry
                .lookup(&to_name)
                .ok_or_else(|| Error::UnknownSymbol(format!("sort `{to_name}`")))?
                .clone();
            if to != *sort {
                return Err(Error::SortMismatch(format!(
                    "substitution lands in `{to_name}`, expected `{}`",
                    sort.name()
                )));
            }
            let mut images: Vec<Option<Term>> = vec![None; from.arity()];
            for (var, span) in pairs {
                let pos = from
                    .position(&var)
                    .ok_or_else(|| Error::VarNotInSort(format!("`{var}` in sort `{from_name}`")))?;
                let mut sub = Parser::new(&span);
                let node = sub.term(&to, spec)?;
                sub.expect_end()?;
                if images[pos].is_some() {
                    return Err(Error::Syntax(format!("variable `{var}` mapped twice")));
                }
                images[pos] = Some(Term {
                    sort: to.clone(),
                    node,
                });
            }
            // unmapped variables default to themselves when the codomain has them
            let mut resolved = Vec::with_capacity(from.arity());
            for (i, img) in images.into_iter().enumerate() {
                match img {
                    Some(t) => resolved.push(t),
                    None => {
                        let v = &from.vars()[i];
                        resolved.push(Term::var(&to, v).map_err(|_| {
                            Error::InvalidInput(format!(
                                "variable `{v}` of `{from_name}` has no image"
                            ))
                        })?);
                    }
                }
            }
            let s = Substitution::new(&from, &to, resolved)?;
            let body = parse_node(p, &from, registry, spec)?;
            Formula::subst(s, body)
        }
        Some(Token::LParen) => {
            p.expect(Token::LParen)?;
            // Either an equality atom or a parenthesized binary connective;
            // try the atom first and fall back to the connective, reporting
            // the error of whichever attempt got further.
            let save = p.position();
            let atom = (|p: &mut Parser| -> Result<Formula> {
                let lhs_node = p.term(sort, spec)?;
                p.expect(Token::EqEq)?;
                let rhs_node = p.term(sort, spec)?;
                p.expect(Token::RParen)?;
                let lhs = Term {
                    sort: sort.clone(),
                    node: lhs_node,
                };
                let rhs = Term {
                    sort: sort.clone(),
                    node: rhs_node,
                };
                Formula::equality(lhs, rhs)
            })(p);
            let atom_err = match atom {
                Ok(f) => return Ok(f),
                Err(e) => (e, p.position()),
            };
            p.rewind(save);
            let binary = (|p: &mut Parser| -> Result<Formula> {
                let f = parse_node(p, sort, registry, spec)?;
                let op = p.next()?.clone();
                let g = parse_node(p, sort, registry, spec)?;
                p.expect(Token::RParen)?;
                match op {
                    Token::Amp => Formula::and(f, g),
                    Token::Pipe => Formula::or(f, g),
                    t => Err(Error::Syntax(format!("expected `&` or `|`, found {t}"))),
                }
            })(p);
            binary.map_err(|e| {
                if p.position() > atom_err.1 {
                    e
                } else {
                    atom_err.0
                }
            })
        }
        Some(t) => Err(Error::Syntax(format!("unexpected {t}"))),
        None => Err(Error::Syntax("unexpected end of formula".to_string())),
    }
}

/// Value of a formula in the extended boolean algebra of point sets over its
/// sort: equality atoms become solution sets, connectives become the boolean
/// operations, quantifiers become cylinders and substitution nodes transports.
pub fn val(h: &FiniteAlgebra, f: &Formula) -> Result<PointSet> {
    f.validate()?;
    val_unchecked(h, f)
}

fn val_unchecked(h: &FiniteAlgebra, f: &Formula) -> Result<PointSet> {
    match f {
        Formula::Equality(lhs, rhs) => PointSet::equality(h, lhs, rhs),
        Formula::Not(g) => Ok(val_unchecked(h, g)?.complement()),
        Formula::And(g, k) => val_unchecked(h, g)?.intersect(&val_unchecked(h, k)?),
        Formula::Or(g, k) => val_unchecked(h, g)?.union(&val_unchecked(h, k)?),
        Formula::Exists(x, g) => val_unchecked(h, g)?.exists(x),
        Formula::Subst(s, g) => PointSet::transport(h, s, &val_unchecked(h, g)?),
    }
}

/// Membership of the formula in the logical kernel of the point.
pub fn lker_contains(h: &FiniteAlgebra, point: &Point, f: &Formula) -> Result<bool> {
    if *f.sort() != point.sort {
        return Err(Error::SortMismatch(format!(
            "formula of sort `{}`, point over `{}`",
            f.sort().name(),
            point.sort.name()
        )));
    }
    Ok(val(h, f)?.contains(point.index(h.size())))
}

/// Membership in the theory of the algebra at the formula's sort: the value
/// must be the full space, equivalently the formula lies in every point's
/// logical kernel.
pub fn theory_contains(h: &FiniteAlgebra, f: &Formula) -> Result<bool> {
    Ok(val(h, f)?.is_full())
}

/// View of one algebra's theory at one sort: a formula belongs to it exactly
/// when its value is the full space.
#[derive(Debug, Clone)]
pub struct TheoryHandle<'a> {
    algebra: &'a FiniteAlgebra,
    sort: VarSort,
}

impl<'a> TheoryHandle<'a> {
    pub fn new(algebra: &'a FiniteAlgebra, sort: &VarSort) -> Result<TheoryHandle<'a>> {
        algebra.space_size(sort)?;
        Ok(TheoryHandle {
            algebra,
            sort: sort.clone(),
        })
    }

    pub fn sort(&self) -> &VarSort {
        &self.sort
    }

    pub fn contains(&self, f: &Formula) -> Result<bool> {
        if *f.sort() != self.sort {
            return Err(Error::SortMismatch(format!(
                "formula of sort `{}` against the `{}`-theory",
                f.sort().name(),
                self.sort.name()
            )));
        }
        theory_contains(self.algebra, f)
    }
}

/// Directed normalization by the transport laws: substitution nodes are pushed
/// through connectives and quantifiers, merged, applied to atoms and dropped
/// when identities; double negations are eliminated. The result evaluates to
/// the same point set as the input over every finite algebra.
pub fn normalize(f: &Formula) -> Formula {
    let mut current = f.clone();
    loop {
        let (next, changed) = rewrite(&current);
        current = next;
        if !changed {
            return current;
        }
    }
}

fn rewrite(f: &Formula) -> (Formula, bool) {
    match f {
        Formula::Subst(s, inner) => match inner.as_ref() {
            Formula::Equality(lhs, rhs) => {
                let l = s.apply(lhs).expect("validated");
                let r = s.apply(rhs).expect("validated");
                (Formula::Equality(l, r), true)
            }
            Formula::Subst(s_inner, g) => {
                let merged = s_inner.compose(s).expect("validated");
                (Formula::Subst(merged, g.clone()), true)
            }
            Formula::Not(g) => (
                Formula::Not(Box::new(Formula::Subst(s.clone(), g.clone()))),
                true,
            ),
            Formula::And(g, k) => (
                Formula::And(
                    Box::new(Formula::Subst(s.clone(), g.clone())),
                    Box::new(Formula::Subst(s.clone(), k.clone())),
                ),
                true,
            ),
            Formula::Or(g, k) => (
                Formula::Or(
                    Box::new(Formula::Subst(s.clone(), g.clone())),
                    Box::new(Formula::Subst(s.clone(), k.clone())),
                ),
                true,
            ),
            Formula::Exists(x, g) if quantifier_push_applies(s, x) => {
                let pos = s.domain().position(x).expect("validated");
                let image_var = match &s.image(pos).node {
                    crate::syntax::TermNode::Var(i) => s.codomain().vars()[*i].clone(),
                    _ => unreachable!("guarded by side condition"),
                };
                (
                    Formula::Exists(image_var, Box::new(Formula::Subst(s.clone(), g.clone()))),
                    true,
                )
            }
            _ => {
                if s.is_identity() {
                    return (inner.as_ref().clone(), true);
                }
                let (g, changed) = rewrite(inner);
                (Formula::Subst(s.clone(), Box::new(g)), changed)
            }
        },
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Not(g) => (g.as_ref().clone(), true),
            _ => {
                let (g, changed) = rewrite(inner);
                (Formula::Not(Box::new(g)), changed)
            }
        },
        Formula::And(g, k) => {
            let (g2, c1) = rewrite(g);
            let (k2, c2) = rewrite(k);
            (Formula::And(Box::new(g2), Box::new(k2)), c1 || c2)
        }
        Formula::Or(g, k) => {
            let (g2, c1) = rewrite(g);
            let (k2, c2) = rewrite(k);
            (Formula::Or(Box::new(g2), Box::new(k2)), c1 || c2)
        }
        Formula::Exists(x, g) => {
            let (g2, changed) = rewrite(g);
            (Formula::Exists(x.clone(), Box::new(g2)), changed)
        }
        Formula::Equality(..) => (f.clone(), false),
    }
}

/// Side condition for pushing a substitution through `exists x`: the image of
/// `x` is a variable that occurs in no other image. Checked syntactically on
/// the term representatives.
fn quantifier_push_applies(s: &Substitution, x: &str) -> bool {
    let Some(pos) = s.domain().position(x) else {
        return false;
    };
    let crate::syntax::TermNode::Var(y) = &s.image(pos).node else {
        return false;
    };
    for (i, img) in s.images().iter().enumerate() {
        if i != pos && img.support().contains(y) {
            return false;
        }
    }
    true
}

/// Identity of values over every supplied witness algebra. Sound for
/// equivalence relative to the witness family; witnesses must satisfy the
/// spec's identities.
pub fn semantically_equal(f: &Formula, g: &Formula, witnesses: &[&FiniteAlgebra]) -> Result<bool> {
    if f.sort() != g.sort() {
        return Err(Error::SortMismatch(format!(
            "comparing sorts `{}` and `{}`",
            f.sort().name(),
            g.sort().name()
        )));
    }
    for h in witnesses {
        if val(h, f)? != val(h, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Memoizing evaluator for workloads that revisit the same formulas.
#[derive(Default)]
pub struct ValCache {
    entries: HashMap<String, PointSet>,
}

impl ValCache {
    pub fn new() -> ValCache {
        ValCache::default()
    }

    pub fn val(&mut self, h: &FiniteAlgebra, spec: &VarietySpec, f: &Formula) -> Result<PointSet> {
        let key = format!("{}#{}#{}", h.name(), f.sort().name(), f.display(spec));
        if let Some(hit) = self.entries.get(&key) {
            return Ok(hit.clone());
        }
        let v = val(h, f)?;
        self.entries.insert(key, v.clone());
        Ok(v)
    }
}

impl fmt::Display for Formula {
    // Op names live in the spec, so Display only sketches the shape; use
    // `display(&spec)` for the grammar rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<formula of sort {} length {}>",
            self.sort().name(),
            self.length()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;
    use crate::syntax::VarSort;

    fn setup() -> (FiniteAlgebra, SortRegistry, VarSort, VarSort) {
        let s2 = library::semilattice_s2();
        let x1 = VarSort::new("X1", &["x"]).unwrap();
        let xy = VarSort::new("X", &["x", "y"]).unwrap();
        let mut reg = SortRegistry::new();
        reg.register(x1.clone()).unwrap();
        reg.register(xy.clone()).unwrap();
        (s2, reg, x1, xy)
    }

    #[test]
    fn atom_has_length_zero() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("(meet(x,y) == x)", &xy, &reg, s2.spec()).unwrap();
        assert_eq!(f.length(), 0);
        assert!(matches!(f, Formula::Equality(..)));
    }

    #[test]
    fn exists_parses_with_length_one() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("E x. (meet(x,y) == y)", &xy, &reg, s2.spec()).unwrap();
        assert_eq!(f.length(), 1);
        assert_eq!(f.sort(), &xy);
    }

    #[test]
    fn conjunction_length_is_additive_plus_one() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("((x==y) & E x.(x==x))", &xy, &reg, s2.spec()).unwrap();
        assert_eq!(f.length(), 2);
    }

    #[test]
    fn print_parse_round_trip() {
        let (s2, reg, _x1, xy) = setup();
        let texts = [
            "(meet(x, y) == x)",
            "~(x == y)",
            "((x == y) | ~(meet(x, y) == y))",
            "E y.((x == y) & (meet(x, y) == x))",
        ];
        for t in texts {
            let f = parse_formula(t, &xy, &reg, s2.spec()).unwrap();
            let printed = f.display(s2.spec());
            let back = parse_formula(&printed, &xy, &reg, s2.spec()).unwrap();
            assert_eq!(f, back, "{t}");
        }
        let f = parse_formula(
            "[x->meet(x, y) : X1 -> X] (x == meet(x, x))",
            &xy,
            &reg,
            s2.spec(),
        )
        .unwrap();
        assert_eq!(f.length(), 1);
        assert_eq!(f.sort(), &xy);
        let back = parse_formula(&f.display(s2.spec()), &xy, &reg, s2.spec()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn val_of_exists_example_is_top() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("E x.(meet(x,y)==y)", &xy, &reg, s2.spec()).unwrap();
        assert!(val(&s2, &f).unwrap().is_full());
    }

    #[test]
    fn val_of_negated_reflexivity_is_bottom() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("~(meet(x, y) == meet(x, y))", &xy, &reg, s2.spec()).unwrap();
        assert!(val(&s2, &f).unwrap().is_empty());
    }

    #[test]
    fn order_four_element_detected_by_sentence() {
        let z4 = library::cyclic(4);
        let v4 = library::klein();
        let x1 = VarSort::new("X1", &["x"]).unwrap();
        let mut reg = SortRegistry::new();
        reg.register(x1.clone()).unwrap();
        let f = parse_formula("E x.~(mul(x, x) == e())", &x1, &reg, z4.spec()).unwrap();
        assert!(val(&z4, &f).unwrap().is_full());
        assert!(val(&v4, &f).unwrap().is_empty());
    }

    #[test]
    fn lker_membership_matches_value() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("(x == y)", &xy, &reg, s2.spec()).unwrap();
        let p00 = Point::new(&xy, vec![0, 0]).unwrap();
        let p10 = Point::new(&xy, vec![1, 0]).unwrap();
        assert!(lker_contains(&s2, &p00, &f).unwrap());
        assert!(!lker_contains(&s2, &p10, &f).unwrap());

        let g = parse_formula("(meet(x, y) == x)", &xy, &reg, s2.spec()).unwrap();
        assert!(!lker_contains(&s2, &p10, &g).unwrap());
    }

    #[test]
    fn theory_handle_view() {
        let (s2, reg, _, xy) = setup();
        let theory = TheoryHandle::new(&s2, &xy).unwrap();
        let idem = parse_formula("(meet(x, x) == x)", &xy, &reg, s2.spec()).unwrap();
        assert!(theory.contains(&idem).unwrap());
        let other = VarSort::new("W", &["u"]).unwrap();
        let stray = Formula::equality(
            Term::parse("u", &other, s2.spec()).unwrap(),
            Term::parse("u", &other, s2.spec()).unwrap(),
        )
        .unwrap();
        assert!(theory.contains(&stray).is_err());
    }

    #[test]
    fn theory_examples() {
        let (s2, reg, _, xy) = setup();
        let idem = parse_formula("(meet(x, x) == x)", &xy, &reg, s2.spec()).unwrap();
        assert!(theory_contains(&s2, &idem).unwrap());
        let diag = parse_formula("(x == y)", &xy, &reg, s2.spec()).unwrap();
        assert!(!theory_contains(&s2, &diag).unwrap());

        let z2 = library::cyclic(2);
        let x1 = VarSort::new("X1", &["x"]).unwrap();
        let mut reg2 = SortRegistry::new();
        reg2.register(x1.clone()).unwrap();
        let f = parse_formula("E x.~(x == e())", &x1, &reg2, z2.spec()).unwrap();
        assert!(theory_contains(&z2, &f).unwrap());
    }

    #[test]
    fn normalize_applies_substitution_to_atom() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula(
            "[x->meet(x, y) : X1 -> X] (x == meet(x, x))",
            &xy,
            &reg,
            s2.spec(),
        )
        .unwrap();
        let n = normalize(&f);
        assert_eq!(
            n.display(s2.spec()),
            "(meet(x, y) == meet(meet(x, y), meet(x, y)))"
        );
    }

    #[test]
    fn normalize_drops_identity_substitution() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("E x.(x == y)", &xy, &reg, s2.spec()).unwrap();
        let wrapped = Formula::subst(Substitution::identity(&xy), f.clone()).unwrap();
        assert_eq!(normalize(&wrapped), f);
    }

    #[test]
    fn normalize_merges_nested_substitutions() {
        let (s2, reg, x1, xy) = setup();
        let inner = parse_formula("(x == x)", &x1, &reg, s2.spec()).unwrap();
        let s = Substitution::new(
            &x1,
            &xy,
            vec![Term::parse("meet(x, y)", &xy, s2.spec()).unwrap()],
        )
        .unwrap();
        let outer =
            Substitution::elementary(&xy, "y", Term::parse("meet(y, y)", &xy, s2.spec()).unwrap())
                .unwrap();
        let f = Formula::subst(outer, Formula::subst(s, inner).unwrap()).unwrap();
        let n = normalize(&f);
        assert!(matches!(n, Formula::Equality(..)));
        assert_eq!(val(&s2, &n).unwrap(), val(&s2, &f).unwrap());
    }

    #[test]
    fn normalize_pushes_through_quantifier_under_side_condition() {
        let (s2, reg, _, xy) = setup();
        let uv = VarSort::new("U", &["u", "v"]).unwrap();
        let mut reg2 = reg.clone();
        reg2.register(uv.clone()).unwrap();
        // x -> u (a variable free of the other image), y -> meet(v, v)
        let s = Substitution::new(
            &xy,
            &uv,
            vec![
                Term::parse("u", &uv, s2.spec()).unwrap(),
                Term::parse("meet(v, v)", &uv, s2.spec()).unwrap(),
            ],
        )
        .unwrap();
        let inner = parse_formula("E x.(meet(x, y) == y)", &xy, &reg, s2.spec()).unwrap();
        let f = Formula::subst(s, inner).unwrap();
        let n = normalize(&f);
        assert!(matches!(n, Formula::Exists(ref v, _) if v == "u"));
        assert_eq!(val(&s2, &n).unwrap(), val(&s2, &f).unwrap());
    }

    #[test]
    fn double_negation_is_eliminated() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("~~(x == y)", &xy, &reg, s2.spec()).unwrap();
        assert!(matches!(normalize(&f), Formula::Equality(..)));
    }

    #[test]
    fn semantic_equality_examples() {
        let (s2, reg, _, xy) = setup();
        let f = parse_formula("E x.(x == y)", &xy, &reg, s2.spec()).unwrap();
        let g = parse_formula("(y == y)", &xy, &reg, s2.spec()).unwrap();
        assert!(semantically_equal(&f, &g, &[&s2]).unwrap());

        let h = parse_formula("(x == y)", &xy, &reg, s2.spec()).unwrap();
        let k = parse_formula("(x == x)", &xy, &reg, s2.spec()).unwrap();
        assert!(!semantically_equal(&h, &k, &[&s2]).unwrap());
    }

    #[test]
    fn normalize_preserves_values_on_compound_shapes() {
        let (s2, reg, x1, xy) = setup();
        let texts = [
            "~~((x == y) & ~(meet(x, y) == x))",
            "E y.~E x.(meet(x, y) == y)",
        ];
        for t in texts {
            let f = parse_formula(t, &xy, &reg, s2.spec()).unwrap();
            let n = normalize(&f);
            assert_eq!(val(&s2, &f).unwrap(), val(&s2, &n).unwrap(), "{t}");
        }
        let body =
            parse_formula("(~(x == meet(x, x)) | E x.(x == x))", &x1, &reg, s2.spec()).unwrap();
        let s = Substitution::new(
            &x1,
            &xy,
            vec![Term::parse("meet(y, x)", &xy, s2.spec()).unwrap()],
        )
        .unwrap();
        let f = Formula::subst(s, body).unwrap();
        let n = normalize(&f);
        assert_eq!(val(&s2, &f).unwrap(), val(&s2, &n).unwrap());
    }
}
