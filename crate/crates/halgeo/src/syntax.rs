//! Signatures, variable sorts, terms of the free algebra and substitutions.
//!
//! Terms are kept absolutely free: no identity of the ambient variety is ever
//! applied syntactically. Everything downstream observes terms only through
//! evaluation in finite algebras, which is faithful for all the geometry
//! computed here.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// An operation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// A signature together with an optional list of defining identities.
///
/// The identities are term pairs over some registered sort; algebras loaded
/// against the spec are checked to satisfy each one exhaustively.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietySpec {
    ops: Vec<OpSymbol>,
    identities: Vec<(Term, Term)>,
}

impl VarietySpec {
    pub fn new(ops: Vec<(&str, usize)>) -> Result<VarietySpec> {
        let mut seen = HashSet::new();
        for (name, _) in &ops {
            if !seen.insert(*name) {
                return Err(Error::InvalidInput(format!("duplicate op symbol `{name}`")));
            }
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidInput(format!("bad op name `{name}`")));
            }
        }
        Ok(VarietySpec {
            ops: ops
                .into_iter()
                .map(|(name, arity)| OpSymbol {
                    name: name.to_string(),
                    arity,
                })
                .collect(),
            identities: Vec::new(),
        })
    }

    /// Registers a defining identity `lhs == rhs`. Both terms must share a sort
    /// and must already be built against this spec.
    pub fn add_identity(&mut self, lhs: Term, rhs: Term) -> Result<()> {
        if lhs.sort != rhs.sort {
            return Err(Error::SortMismatch(format!(
                "identity sides over sorts `{}` and `{}`",
                lhs.sort.name, rhs.sort.name
            )));
        }
        for t in [&lhs, &rhs] {
            t.node.check_ops(self)?;
        }
        self.identities.push((lhs, rhs));
        Ok(())
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    pub fn identities(&self) -> &[(Term, Term)] {
        &self.identities
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|op| op.name == name)
    }

    pub fn op(&self, index: usize) -> &OpSymbol {
        &self.ops[index]
    }

    /// True when both specs expose the same operation symbols in the same order.
    pub fn same_signature(&self, other: &VarietySpec) -> bool {
        self.ops == other.ops
    }
}

/// A named finite set of variables; the order of declaration is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSort {
    name: String,
    vars: Vec<String>,
}

impl VarSort {
    pub fn new(name: &str, vars: &[&str]) -> Result<VarSort> {
        if vars.is_empty() {
            return Err(Error::InvalidInput(format!(
                "sort `{name}` has no variables"
            )));
        }
        let mut seen = HashSet::new();
        for v in vars {
            if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidInput(format!("bad variable name `{v}`")));
            }
            if !seen.insert(*v) {
                return Err(Error::InvalidInput(format!(
                    "duplicate variable `{v}` in sort `{name}`"
                )));
            }
        }
        Ok(VarSort {
            name: name.to_string(),
            vars: vars.iter().map(|v| v.to_string()).collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// A copy of this sort extended by one fresh variable, used by the
    /// type-refinement machinery. The fresh name never collides with an
    /// existing variable.
    pub fn extended(&self, hint: usize) -> VarSort {
        let mut k = hint;
        loop {
            let candidate = format!("z{k}");
            if self.position(&candidate).is_none() {
                let mut vars = self.vars.clone();
                vars.push(candidate);
                return VarSort {
                    name: format!("{}+{}", self.name, k),
                    vars,
                };
            }
            k += 1;
        }
    }
}

impl fmt::Display for VarSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Tree of a term; variables are positions in the owning sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermNode {
    Var(usize),
    App(usize, Vec<TermNode>),
}

impl TermNode {
    fn check_ops(&self, spec: &VarietySpec) -> Result<()> {
        match self {
            TermNode::Var(_) => Ok(()),
            TermNode::App(op, args) => {
                if *op >= spec.ops.len() {
                    return Err(Error::UnknownSymbol(format!("op index {op}")));
                }
                if spec.ops[*op].arity != args.len() {
                    return Err(Error::ArityMismatch(spec.ops[*op].name.clone()));
                }
                for a in args {
                    a.check_ops(spec)?;
                }
                Ok(())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TermNode::Var(_) => 0,
            TermNode::App(_, args) => 1 + args.iter().map(TermNode::depth).max().unwrap_or(0),
        }
    }

    fn collect_support(&self, out: &mut Vec<bool>) {
        match self {
            TermNode::Var(i) => out[*i] = true,
            TermNode::App(_, args) => {
                for a in args {
                    a.collect_support(out);
                }
            }
        }
    }

    fn render(&self, sort: &VarSort, spec: &VarietySpec, out: &mut String) {
        match self {
            TermNode::Var(i) => out.push_str(&sort.vars[*i]),
            TermNode::App(op, args) => {
                out.push_str(&spec.ops[*op].name);
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    a.render(sort, spec, out);
                }
                out.push(')');
            }
        }
    }
}

/// An element of the free algebra over a declared sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub sort: VarSort,
    pub node: TermNode,
}

impl Term {
    pub fn var(sort: &VarSort, name: &str) -> Result<Term> {
        let i = sort
            .position(name)
            .ok_or_else(|| Error::VarNotInSort(format!("`{name}` in sort `{}`", sort.name)))?;
        Ok(Term {
            sort: sort.clone(),
            node: TermNode::Var(i),
        })
    }

    pub fn app(spec: &VarietySpec, sort: &VarSort, op: &str, args: Vec<Term>) -> Result<Term> {
        let idx = spec
            .op_index(op)
            .ok_or_else(|| Error::UnknownSymbol(op.to_string()))?;
        if spec.ops[idx].arity != args.len() {
            return Err(Error::ArityMismatch(format!(
                "op `{op}` takes {} arguments, got {}",
                spec.ops[idx].arity,
                args.len()
            )));
        }
        let mut nodes = Vec::with_capacity(args.len());
        for a in args {
            if a.sort != *sort {
                return Err(Error::SortMismatch(format!(
                    "argument over `{}` in term over `{}`",
                    a.sort.name, sort.name
                )));
            }
            nodes.push(a.node);
        }
        Ok(Term {
            sort: sort.clone(),
            node: TermNode::App(idx, nodes),
        })
    }

    pub fn from_node(sort: &VarSort, spec: &VarietySpec, node: TermNode) -> Result<Term> {
        node.check_ops(spec)?;
        let mut support = vec![false; sort.arity()];
        node.collect_support(&mut support);
        Ok(Term {
            sort: sort.clone(),
            node,
        })
    }

    /// Parses `text` over `sort`; grammar: `term := var | op "(" term ("," term)* ")"`,
    /// nullary ops written `op()` or bare when the name is not a variable.
    pub fn parse(text: &str, sort: &VarSort, spec: &VarietySpec) -> Result<Term> {
        let tokens = tokenize(text)?;
        let mut p = Parser::new(&tokens);
        let node = p.term(sort, spec)?;
        p.expect_end()?;
        Ok(Term {
            sort: sort.clone(),
            node,
        })
    }

    /// Set of variable positions occurring in the term.
    pub fn support(&self) -> Vec<usize> {
        let mut flags = vec![false; self.sort.arity()];
        self.node.collect_support(&mut flags);
        flags
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.then_some(i))
            .collect()
    }

    pub fn depth(&self) -> usize {
        self.node.depth()
    }

    pub fn display(&self, spec: &VarietySpec) -> String {
        let mut out = String::new();
        self.node.render(&self.sort, spec, &mut out);
        out
    }
}

/// A sort-changing map sending each variable of the domain to a term over the
/// codomain; it acts on terms as the unique homomorphic extension.
#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    domain: VarSort,
    codomain: VarSort,
    images: Vec<Term>,
}

impl Substitution {
    pub fn new(domain: &VarSort, codomain: &VarSort, images: Vec<Term>) -> Result<Substitution> {
        if images.len() != domain.arity() {
            return Err(Error::InvalidInput(format!(
                "substitution needs {} images, got {}",
                domain.arity(),
                images.len()
            )));
        }
        for t in &images {
            if t.sort != *codomain {
                return Err(Error::SortMismatch(format!(
                    "image over `{}`, expected `{}`",
                    t.sort.name, codomain.name
                )));
            }
        }
        Ok(Substitution {
            domain: domain.clone(),
            codomain: codomain.clone(),
            images,
        })
    }

    pub fn identity(sort: &VarSort) -> Substitution {
        let images = (0..sort.arity())
            .map(|i| Term {
                sort: sort.clone(),
                node: TermNode::Var(i),
            })
            .collect();
        Substitution {
            domain: sort.clone(),
            codomain: sort.clone(),
            images,
        }
    }

    /// The endo-substitution of `sort` moving only `var` to `image`.
    pub fn elementary(sort: &VarSort, var: &str, image: Term) -> Result<Substitution> {
        let pos = sort
            .position(var)
            .ok_or_else(|| Error::VarNotInSort(format!("`{var}` in sort `{}`", sort.name)))?;
        if image.sort != *sort {
            return Err(Error::SortMismatch(format!(
                "image over `{}`, expected `{}`",
                image.sort.name, sort.name
            )));
        }
        let mut sub = Substitution::identity(sort);
        sub.images[pos] = image;
        Ok(sub)
    }

    pub fn domain(&self) -> &VarSort {
        &self.domain
    }

    pub fn codomain(&self) -> &VarSort {
        &self.codomain
    }

    pub fn images(&self) -> &[Term] {
        &self.images
    }

    pub fn image(&self, var_position: usize) -> &Term {
        &self.images[var_position]
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, t)| matches!(t.node, TermNode::Var(j) if j == i))
    }

    /// Applies the substitution to a term over the domain sort.
    pub fn apply(&self, term: &Term) -> Result<Term> {
        if term.sort != self.domain {
            return Err(Error::SortMismatch(format!(
                "term over `{}`, substitution domain `{}`",
                term.sort.name, self.domain.name
            )));
        }
        Ok(Term {
            sort: self.codomain.clone(),
            node: self.apply_node(&term.node),
        })
    }

    fn apply_node(&self, node: &TermNode) -> TermNode {
        match node {
            TermNode::Var(i) => self.images[*i].node.clone(),
            TermNode::App(op, args) => {
                TermNode::App(*op, args.iter().map(|a| self.apply_node(a)).collect())
            }
        }
    }

    /// Composite substitution: applying the result equals applying `self`
    /// first and `then` second.
    pub fn compose(&self, then: &Substitution) -> Result<Substitution> {
        if self.codomain != then.domain {
            return Err(Error::SortMismatch(format!(
                "cannot chain `{}` -> `{}` with `{}` -> `{}`",
                self.domain.name, self.codomain.name, then.domain.name, then.codomain.name
            )));
        }
        let images = self
            .images
            .iter()
            .map(|t| then.apply(t))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(&self.domain, &then.codomain, images)
    }

    pub fn display(&self, spec: &VarietySpec) -> String {
        let body = self
            .domain
            .vars()
            .iter()
            .zip(&self.images)
            .map(|(v, t)| format!("{v}->{}", t.display(spec)))
            .collect::<Vec<_>>()
            .join(", ");
        format!("[{body} : {} -> {}]", self.domain.name, self.codomain.name)
    }
}

// ---------------------------------------------------------------------------
// Tokenizer shared by the term and formula grammars.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    EqEq,
    Tilde,
    Amp,
    Pipe,
    Dot,
    LBracket,
    RBracket,
    Arrow,
    Colon,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::Comma => write!(f, "`,`"),
            Token::EqEq => write!(f, "`==`"),
            Token::Tilde => write!(f, "`~`"),
            Token::Amp => write!(f, "`&`"),
            Token::Pipe => write!(f, "`|`"),
            Token::Dot => write!(f, "`.`"),
            Token::LBracket => write!(f, "`[`"),
            Token::RBracket => write!(f, "`]`"),
            Token::Arrow => write!(f, "`->`"),
            Token::Colon => write!(f, "`:`"),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            ',' => {
                chars.next();
                out.push(Token::Comma);
            }
            '~' => {
                chars.next();
                out.push(Token::Tilde);
            }
            '&' => {
                chars.next();
                out.push(Token::Amp);
            }
            '|' => {
                chars.next();
                out.push(Token::Pipe);
            }
            '.' => {
                chars.next();
                out.push(Token::Dot);
            }
            '[' => {
                chars.next();
                out.push(Token::LBracket);
            }
            ']' => {
                chars.next();
                out.push(Token::RBracket);
            }
            ':' => {
                chars.next();
                out.push(Token::Colon);
            }
            '=' => {
                chars.next();
                if chars.peek() == Some(&'=') {
                    chars.next();
                    out.push(Token::EqEq);
                } else {
                    return Err(Error::Syntax("single `=`, expected `==`".to_string()));
                }
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    out.push(Token::Arrow);
                } else {
                    return Err(Error::Syntax("single `-`, expected `->`".to_string()));
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(ident));
            }
            other => return Err(Error::Syntax(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

pub(crate) struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    depth: usize,
}

/// Nesting bound for the recursive-descent parsers; inputs deeper than this
/// are rejected instead of overflowing the stack.
const MAX_NESTING: usize = 400;

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [Token]) -> Parser<'a> {
        Parser {
            tokens,
            pos: 0,
            depth: 0,
        }
    }

    pub(crate) fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(Error::Syntax(format!("nesting deeper than {MAX_NESTING}")));
        }
        Ok(())
    }

    pub(crate) fn leave(&mut self) {
        self.depth -= 1;
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn rewind(&mut self, position: usize) {
        self.pos = position;
    }

    pub(crate) fn next(&mut self) -> Result<&Token> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| Error::Syntax("unexpected end of input".to_string()))?;
        self.pos += 1;
        Ok(t)
    }

    pub(crate) fn expect(&mut self, expected: Token) -> Result<()> {
        let t = self.next()?;
        if *t == expected {
            Ok(())
        } else {
            Err(Error::Syntax(format!("expected {expected}, found {t}")))
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(Error::Syntax(format!(
                "trailing input at {}",
                self.tokens[self.pos]
            )))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.next()? {
            Token::Ident(s) => Ok(s.clone()),
            t => Err(Error::Syntax(format!("expected identifier, found {t}"))),
        }
    }

    /// Parses one term over `sort`.
    pub(crate) fn term(&mut self, sort: &VarSort, spec: &VarietySpec) -> Result<TermNode> {
        self.enter()?;
        let out = self.term_inner(sort, spec);
        self.leave();
        out
    }

    fn term_inner(&mut self, sort: &VarSort, spec: &VarietySpec) -> Result<TermNode> {
        let name = self.ident()?;
        if self.peek() == Some(&Token::LParen) {
            self.expect(Token::LParen)?;
            let op = spec
                .op_index(&name)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            let mut args = Vec::new();
            if self.peek() == Some(&Token::RParen) {
                self.next()?;
            } else {
                loop {
                    args.push(self.term(sort, spec)?);
                    match self.next()? {
                        Token::Comma => continue,
                        Token::RParen => break,
                        t => return Err(Error::Syntax(format!("expected `,` or `)`, found {t}"))),
                    }
                }
            }
            if spec.ops()[op].arity != args.len() {
                return Err(Error::ArityMismatch(format!(
                    "op `{name}` takes {} arguments, got {}",
                    spec.ops()[op].arity,
                    args.len()
                )));
            }
            Ok(TermNode::App(op, args))
        } else if let Some(i) = sort.position(&name) {
            Ok(TermNode::Var(i))
        } else if let Some(op) = spec.op_index(&name) {
            if spec.ops()[op].arity == 0 {
                Ok(TermNode::App(op, Vec::new()))
            } else {
                Err(Error::ArityMismatch(format!(
                    "op `{name}` of arity {} used without arguments",
                    spec.ops()[op].arity
                )))
            }
        } else {
            Err(Error::VarNotInSort(format!(
                "`{name}` in sort `{}`",
                sort.name
            )))
        }
    }
}
