//! Command-line front end: loads algebras, sorts and systems, runs one query
//! and renders a deterministic report.
//!
//! Exit status: 0 on success, 1 on a negative verdict (documented per
//! command), 2 on any error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use halgeo::algebra::{FiniteAlgebra, Point};
use halgeo::axioms::verify_halmos_axioms;
use halgeo::error::{Error, Result};
use halgeo::family::canonical_sorts;
use halgeo::formula::{lker_contains, parse_formula, theory_contains, val, Formula, SortRegistry};
use halgeo::geometry::{
    ag_equivalent, algebraic_closure_contains, definable_closure, lg_equivalent, logical_solve,
    solve_equations, AgOptions, AgVerdict, EmptyClosurePolicy, EquationSystem, FormulaSystem,
    LgOptions, LgVerdict,
};
use halgeo::isotypy::{
    algebraic_homogeneity_check, homogeneity_check, isotypic_check, noetherian_reduce,
    orbit_partition, type_partition, HomogeneityVerdict, IsotypyVerdict, Partition, TypeOptions,
};
use halgeo::morphisms::{automorphism_group, isomorphism_search};
use halgeo::pointset::PointSet;
use halgeo::syntax::VarSort;

#[derive(Parser)]
#[command(
    name = "halgeo",
    version,
    about = "Equational and logical geometry over finite algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct Opts {
    /// Algebra file
    #[arg(short = 'a', long = "algebra", visible_alias = "a")]
    algebra: Option<PathBuf>,
    /// Second algebra file
    #[arg(long = "b")]
    b: Option<PathBuf>,
    /// Sort declaration `x y ...` or `Name: x y ...`; repeatable, first is
    /// primary. Names default to X, X2, X3, ...
    #[arg(long = "sort")]
    sort: Vec<String>,
    /// Formula in the query grammar
    #[arg(long = "formula")]
    formula: Option<String>,
    /// Equation or formula system file
    #[arg(long = "system")]
    system: Option<PathBuf>,
    /// Point assignment `x=e y=a` (or comma separated)
    #[arg(long = "point")]
    point: Option<String>,
    /// Refinement rank (defaults depend on the command)
    #[arg(long = "rank")]
    rank: Option<usize>,
    /// Term depth bound
    #[arg(long = "depth")]
    depth: Option<usize>,
    /// Largest sort size checked
    #[arg(long = "max-vars")]
    max_vars: Option<usize>,
    /// Randomized trials / enumeration budget
    #[arg(long = "trials")]
    trials: Option<usize>,
    /// Random seed
    #[arg(long = "seed", default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long = "format", value_enum, default_value = "text")]
    format: Format,
    /// Point cap (HALGEO_CAP overrides)
    #[arg(long = "cap")]
    cap: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula to its solution set
    Eval(Opts),
    /// Membership of a formula in the theory of the algebra (exit 1 if not)
    Theory(Opts),
    /// Solve an equation system file
    SolveEq(Opts),
    /// Solve a formula system file
    SolveLog(Opts),
    /// Membership of an equality in the closure of an equation system
    ClosureAlg(Opts),
    /// Membership of a formula in the dual of a solution set
    ClosureLog(Opts),
    /// Closure of a formula system's solution set under definability
    DefinableClosure(Opts),
    /// Membership of a formula in the logical kernel of a point
    Lker(Opts),
    /// Membership of an equality in the kernel of a point
    Ker(Opts),
    /// Automorphism group of the algebra
    Aut(Opts),
    /// Orbit partition of the point space
    Orbits(Opts),
    /// Bounded type partition of the point space
    Types(Opts),
    /// Verify the transport and quantifier laws on random instances
    CheckAxioms(Opts),
    /// Bounded equational-geometry equivalence of two algebras
    AgEquiv(Opts),
    /// Logical-geometry equivalence of two algebras
    LgEquiv(Opts),
    /// Isotypy of two algebras (exit 1 if not isotypic)
    Isotypic(Opts),
    /// Logical homogeneity (exit 1 if not)
    Homogeneous(Opts),
    /// Algebraic homogeneity (exit 1 if not)
    AlgHomogeneous(Opts),
    /// Reduce a formula system keeping its solution set
    NoetherianReduce(Opts),
    /// Isomorphism search between two algebras (exit 1 if none)
    Iso(Opts),
}

/// Rendered command result: human text, machine key=value lines, exit status.
struct Output {
    text: String,
    machine: Vec<(String, String)>,
    negative: bool,
}

impl Output {
    fn new() -> Output {
        Output {
            text: String::new(),
            machine: Vec::new(),
            negative: false,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn kv(&mut self, key: &str, value: impl ToString) {
        self.machine.push((key.to_string(), value.to_string()));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    type Handler = fn(&Opts, &Env) -> Result<Output>;
    let (opts, run): (&Opts, Handler) = match &cli.command {
        Command::Eval(o) => (o, cmd_eval),
        Command::Theory(o) => (o, cmd_theory),
        Command::SolveEq(o) => (o, cmd_solve_eq),
        Command::SolveLog(o) => (o, cmd_solve_log),
        Command::ClosureAlg(o) => (o, cmd_closure_alg),
        Command::ClosureLog(o) => (o, cmd_closure_log),
        Command::DefinableClosure(o) => (o, cmd_definable_closure),
        Command::Lker(o) => (o, cmd_lker),
        Command::Ker(o) => (o, cmd_ker),
        Command::Aut(o) => (o, cmd_aut),
        Command::Orbits(o) => (o, cmd_orbits),
        Command::Types(o) => (o, cmd_types),
        Command::CheckAxioms(o) => (o, cmd_check_axioms),
        Command::AgEquiv(o) => (o, cmd_ag_equiv),
        Command::LgEquiv(o) => (o, cmd_lg_equiv),
        Command::Isotypic(o) => (o, cmd_isotypic),
        Command::Homogeneous(o) => (o, cmd_homogeneous),
        Command::AlgHomogeneous(o) => (o, cmd_alg_homogeneous),
        Command::NoetherianReduce(o) => (o, cmd_noetherian_reduce),
        Command::Iso(o) => (o, cmd_iso),
    };
    let env = match Env::build(opts) {
        Ok(env) => env,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(opts, &env) {
        Ok(out) => {
            match opts.format {
                Format::Text => print!("{}", out.text),
                Format::Machine => {
                    for (k, v) in &out.machine {
                        println!("{k}={v}");
                    }
                }
            }
            if out.negative {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Loaded workspace: algebras, registered sorts, configuration.
struct Env {
    algebra: Option<FiniteAlgebra>,
    second: Option<FiniteAlgebra>,
    registry: SortRegistry,
    sorts: Vec<VarSort>,
}

impl Env {
    fn build(opts: &Opts) -> Result<Env> {
        let cap = match std::env::var("HALGEO_CAP") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad HALGEO_CAP value `{v}`")))?,
            ),
            Err(_) => opts.cap,
        };
        let load = |path: &PathBuf| -> Result<FiniteAlgebra> {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidInput(format!("cannot read `{}`: {e}", path.display()))
            })?;
            let mut h = FiniteAlgebra::parse(&text)?;
            if let Some(c) = cap {
                h.set_point_cap(c);
            }
            Ok(h)
        };
        let algebra = opts.algebra.as_ref().map(&load).transpose()?;
        let second = opts.b.as_ref().map(&load).transpose()?;
        let mut registry = SortRegistry::new();
        let mut sorts = Vec::new();
        for (i, decl) in opts.sort.iter().enumerate() {
            // `Name: vars...` or bare `vars...`; a bare single word naming an
            // already registered sort refers to it
            let (name, vars_text) = match decl.split_once(':') {
                Some((n, v)) => (n.trim().to_string(), v.trim().to_string()),
                None => {
                    let token = decl.trim();
                    if !token.contains(char::is_whitespace) {
                        if let Some(known) = registry.lookup(token) {
                            sorts.push(known.clone());
                            continue;
                        }
                    }
                    let default = if i == 0 {
                        "X".to_string()
                    } else {
                        format!("X{}", i + 1)
                    };
                    (default, token.to_string())
                }
            };
            let vars: Vec<&str> = vars_text.split_whitespace().collect();
            let sort = VarSort::new(&name, &vars)?;
            registry.register(sort.clone())?;
            sorts.push(sort);
        }
        Ok(Env {
            algebra,
            second,
            registry,
            sorts,
        })
    }

    fn algebra(&self) -> Result<&FiniteAlgebra> {
        self.algebra
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("missing --algebra".to_string()))
    }

    fn second(&self) -> Result<&FiniteAlgebra> {
        self.second
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("missing --b".to_string()))
    }

    fn primary_sort(&self) -> Result<&VarSort> {
        self.sorts
            .first()
            .ok_or_else(|| Error::InvalidInput("missing --sort".to_string()))
    }
}

fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("missing --{flag}")))
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read `{}`: {e}", path.display())))
}

fn parse_point(text: &str, sort: &VarSort, h: &FiniteAlgebra) -> Result<Point> {
    let mut values = vec![None; sort.arity()];
    for part in text.split(|c: char| c == ',' || c.is_whitespace()) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (var, elem) = part.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!(
                "bad point component `{part}`, expected var=element"
            ))
        })?;
        let pos = sort.position(var.trim()).ok_or_else(|| {
            Error::VarNotInSort(format!("`{}` in sort `{}`", var.trim(), sort.name()))
        })?;
        let idx = h
            .element_index(elem.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown element `{}`", elem.trim())))?;
        values[pos] = Some(idx);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                Error::InvalidInput(format!("point misses variable `{}`", sort.vars()[i]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Point::new(sort, values)
}

fn point_plain(p: &Point, h: &FiniteAlgebra) -> String {
    p.sort
        .vars()
        .iter()
        .zip(&p.values)
        .map(|(v, &e)| format!("{v}={}", h.element_name(e)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_point_set(out: &mut Output, set: &PointSet, h: &FiniteAlgebra) {
    out.line(format!("points: {}", set.count()));
    for p in set.render_points(h) {
        out.line(format!("  {p}"));
    }
    out.line(format!("mask: {}", set.hex_mask()));
    out.kv("points", set.count());
    out.kv("mask", set.hex_mask());
}

fn render_partition(out: &mut Output, part: &Partition, h: &FiniteAlgebra) {
    let classes = part.classes_of_block(0);
    out.line(format!("classes: {}", part.class_count));
    for line in part.render(h) {
        out.line(line);
    }
    out.kv("classes", part.class_count);
    for (id, members) in classes.iter().enumerate() {
        let joined: Vec<String> = members.iter().map(|m| m.to_string()).collect();
        out.kv(&format!("class{id}"), joined.join(","));
    }
}

fn parsed_formula(opts: &Opts, env: &Env) -> Result<Formula> {
    let text = require(&opts.formula, "formula")?;
    let sort = env.primary_sort()?;
    parse_formula(text, sort, &env.registry, env.algebra()?.spec())
}

fn equality_query(opts: &Opts, env: &Env, sort: &VarSort) -> Result<(halgeo::Term, halgeo::Term)> {
    let text = require(&opts.formula, "formula")?;
    let f = parse_formula(text, sort, &env.registry, env.algebra()?.spec())?;
    match f {
        Formula::Equality(lhs, rhs) => Ok((lhs, rhs)),
        _ => Err(Error::InvalidInput(
            "expected an equality atom `(term == term)`".to_string(),
        )),
    }
}

fn cmd_eval(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let f = parsed_formula(opts, env)?;
    let set = val(h, &f)?;
    let mut out = Output::new();
    render_point_set(&mut out, &set, h);
    Ok(out)
}

fn cmd_theory(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let f = parsed_formula(opts, env)?;
    let answer = theory_contains(h, &f)?;
    let mut out = Output::new();
    out.line(format!("in theory: {answer}"));
    out.kv("in_theory", answer);
    out.negative = !answer;
    Ok(out)
}

fn cmd_solve_eq(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let text = read_file(require(&opts.system, "system")?)?;
    let system = EquationSystem::parse(&text, &env.registry, h.spec())?;
    let set = solve_equations(h, &system)?;
    let mut out = Output::new();
    render_point_set(&mut out, &set, h);
    Ok(out)
}

fn cmd_solve_log(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let text = read_file(require(&opts.system, "system")?)?;
    let system = FormulaSystem::parse(&text, &env.registry, h.spec())?;
    let set = logical_solve(h, &system)?;
    let mut out = Output::new();
    render_point_set(&mut out, &set, h);
    Ok(out)
}

fn cmd_closure_alg(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let text = read_file(require(&opts.system, "system")?)?;
    let system = EquationSystem::parse(&text, &env.registry, h.spec())?;
    let (lhs, rhs) = equality_query(opts, env, &system.sort)?;
    let empty = solve_equations(h, &system)?.is_empty();
    let answer =
        algebraic_closure_contains(h, &system, &lhs, &rhs, EmptyClosurePolicy::FullCongruence)?;
    let mut out = Output::new();
    out.line(format!("in closure: {answer}"));
    if empty {
        out.line("note: empty solution set; closure is the full congruence");
    }
    out.kv("in_closure", answer);
    out.kv("empty_solution_set", empty);
    out.negative = !answer;
    Ok(out)
}

fn cmd_closure_log(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let text = read_file(require(&opts.system, "system")?)?;
    let system = FormulaSystem::parse(&text, &env.registry, h.spec())?;
    let f = {
        let text = require(&opts.formula, "formula")?;
        parse_formula(text, &system.sort, &env.registry, h.spec())?
    };
    let set = logical_solve(h, &system)?;
    let empty = set.is_empty();
    let answer = halgeo::geometry::logical_closure_contains(h, &set, &f)?;
    let mut out = Output::new();
    out.line(format!("in closure: {answer}"));
    if empty {
        out.line("note: empty solution set; its dual is the improper filter");
    }
    out.kv("in_closure", answer);
    out.kv("empty_solution_set", empty);
    out.negative = !answer;
    Ok(out)
}

fn cmd_definable_closure(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let text = read_file(require(&opts.system, "system")?)?;
    let system = FormulaSystem::parse(&text, &env.registry, h.spec())?;
    let set = logical_solve(h, &system)?;
    let closed = definable_closure(h, &set)?;
    let mut out = Output::new();
    render_point_set(&mut out, &closed, h);
    Ok(out)
}

fn cmd_lker(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let sort = env.primary_sort()?;
    let point = parse_point(require(&opts.point, "point")?, sort, h)?;
    let f = parsed_formula(opts, env)?;
    let answer = lker_contains(h, &point, &f)?;
    let mut out = Output::new();
    out.line(format!("in lker: {answer}"));
    out.kv("in_lker", answer);
    out.negative = !answer;
    Ok(out)
}

fn cmd_ker(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let sort = env.primary_sort()?;
    let point = parse_point(require(&opts.point, "point")?, sort, h)?;
    let (lhs, rhs) = equality_query(opts, env, sort)?;
    let answer = h.kernel_contains(&point, &lhs, &rhs)?;
    let mut out = Output::new();
    out.line(format!("in ker: {answer}"));
    out.kv("in_ker", answer);
    out.negative = !answer;
    Ok(out)
}

fn cmd_aut(_opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let auts = automorphism_group(h);
    let mut out = Output::new();
    out.line(format!("automorphisms: {}", auts.len()));
    out.kv("count", auts.len());
    for (i, sigma) in auts.iter().enumerate() {
        let rendered: Vec<String> = sigma
            .iter()
            .enumerate()
            .map(|(from, &to)| format!("{}->{}", h.element_name(from), h.element_name(to)))
            .collect();
        out.line(format!("  {}", rendered.join(", ")));
        out.kv(&format!("aut{i}"), rendered.join(","));
    }
    Ok(out)
}

fn cmd_orbits(_opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let sort = env.primary_sort()?;
    let part = orbit_partition(h, sort)?;
    let mut out = Output::new();
    render_partition(&mut out, &part, h);
    Ok(out)
}

fn cmd_types(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let sort = env.primary_sort()?;
    let rank = opts.rank.unwrap_or(h.size() + sort.arity());
    let type_opts = TypeOptions {
        atom_depth: opts.depth.unwrap_or(2),
    };
    let part = type_partition(h, sort, rank, type_opts)?;
    let mut out = Output::new();
    out.line(format!("rank: {rank}"));
    out.kv("rank", rank);
    render_partition(&mut out, &part, h);
    Ok(out)
}

fn cmd_check_axioms(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let sorts = if env.sorts.is_empty() {
        canonical_sorts(3)
    } else {
        env.sorts.clone()
    };
    let trials = opts.trials.unwrap_or(100);
    let report = verify_halmos_axioms(h, &sorts, trials, opts.seed)?;
    let mut out = Output::new();
    out.line(report.summary());
    for r in &report.results {
        out.kv(
            &format!("axiom{}", r.axiom.label()),
            format!("{}/{}", r.passes, r.trials),
        );
    }
    out.kv("all_pass", report.all_passed());
    if let Some(cx) = report
        .results
        .iter()
        .find_map(|r| r.counterexample.as_deref())
    {
        out.kv("counterexample", cx);
    }
    out.negative = !report.all_passed();
    Ok(out)
}

fn cmd_ag_equiv(opts: &Opts, env: &Env) -> Result<Output> {
    let h1 = env.algebra()?;
    let h2 = env.second()?;
    let ag = AgOptions {
        depth: opts.depth.unwrap_or(3),
        max_vars: opts.max_vars.unwrap_or(2),
        max_pairs: 2,
        budget: opts.trials.unwrap_or(200_000),
    };
    let verdict = ag_equivalent(h1, h2, &ag)?;
    let mut out = Output::new();
    match verdict {
        AgVerdict::NotEquivalent {
            witness,
            holds_in_first,
            systems_checked,
        } => {
            let holder = if holds_in_first { h1.name() } else { h2.name() };
            out.line(format!(
                "NOT AG-EQUIVALENT; witness {}; holds in {holder} only",
                witness.display(h1.spec())
            ));
            out.kv("verdict", "NOT-EQUIVALENT");
            out.kv("witness", witness.display(h1.spec()));
            out.kv("holds_in", holder);
            out.kv("systems_checked", systems_checked);
            out.negative = true;
        }
        AgVerdict::BoundedEquivalent {
            systems_checked,
            budget_exhausted,
        } => {
            out.line(format!(
                "BOUNDED-EQUIVALENT; systems checked {systems_checked}; depth {}",
                ag.depth
            ));
            out.kv("verdict", "BOUNDED-EQUIVALENT");
            out.kv("systems_checked", systems_checked);
            out.kv("budget_exhausted", budget_exhausted);
        }
    }
    Ok(out)
}

fn cmd_lg_equiv(opts: &Opts, env: &Env) -> Result<Output> {
    let h1 = env.algebra()?;
    let h2 = env.second()?;
    let lg = LgOptions {
        max_vars: opts.max_vars.unwrap_or(2),
        rank: opts.rank,
        type_opts: TypeOptions {
            atom_depth: opts.depth.unwrap_or(2),
        },
        sentence_len: 3,
    };
    let verdict = lg_equivalent(h1, h2, &lg)?;
    let mut out = Output::new();
    match verdict {
        LgVerdict::Equivalent {
            max_vars,
            rank_reached,
        } => {
            out.line(format!(
                "LG-EQUIVALENT; max-vars {max_vars}; rank {rank_reached}"
            ));
            out.kv("verdict", "EQUIVALENT");
            out.kv("max_vars", max_vars);
            out.kv("rank", rank_reached);
        }
        LgVerdict::NotEquivalent {
            witness_sentence,
            witness_block,
            witness_point,
            separating_rank,
        } => {
            let algebra = if witness_block == 0 { h1 } else { h2 };
            let mut line = "NOT LG-EQUIVALENT".to_string();
            if let Some(f) = &witness_sentence {
                line.push_str(&format!("; witness sentence {}", f.display(h1.spec())));
            }
            line.push_str(&format!(
                "; witness point {} in {}; separating rank {separating_rank}",
                point_plain(&witness_point, algebra),
                algebra.name()
            ));
            out.line(line);
            out.kv("verdict", "NOT-EQUIVALENT");
            if let Some(f) = &witness_sentence {
                out.kv("witness_sentence", f.display(h1.spec()));
            }
            out.kv("witness_point", point_plain(&witness_point, algebra));
            out.kv("witness_algebra", algebra.name());
            out.kv("separating_rank", separating_rank);
            out.negative = true;
        }
    }
    Ok(out)
}

fn cmd_isotypic(opts: &Opts, env: &Env) -> Result<Output> {
    let h1 = env.algebra()?;
    let h2 = env.second()?;
    let type_opts = TypeOptions {
        atom_depth: opts.depth.unwrap_or(2),
    };
    let verdict = isotypic_check(h1, h2, opts.max_vars.unwrap_or(2), opts.rank, type_opts)?;
    let mut out = Output::new();
    match verdict {
        IsotypyVerdict::Isotypic {
            max_vars,
            rank_reached,
        } => {
            out.line(format!(
                "ISOTYPIC; max-vars {max_vars}; rank {rank_reached}"
            ));
            out.kv("isotypic", true);
            out.kv("max_vars", max_vars);
            out.kv("rank", rank_reached);
        }
        IsotypyVerdict::NotIsotypic {
            witness_block,
            witness,
            separating_rank,
        } => {
            let algebra = if witness_block == 0 { h1 } else { h2 };
            out.line(format!(
                "NOT ISOTYPIC; witness {}; separating rank {separating_rank}",
                point_plain(&witness, algebra)
            ));
            out.kv("isotypic", false);
            out.kv("witness", point_plain(&witness, algebra));
            out.kv("witness_algebra", algebra.name());
            out.kv("separating_rank", separating_rank);
            out.negative = true;
        }
    }
    Ok(out)
}

fn cmd_homogeneous(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let type_opts = TypeOptions {
        atom_depth: opts.depth.unwrap_or(2),
    };
    let verdict = homogeneity_check(h, opts.max_vars.unwrap_or(2), opts.rank, type_opts)?;
    Ok(render_homogeneity(verdict, h, "LOGICALLY"))
}

fn cmd_alg_homogeneous(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let verdict = algebraic_homogeneity_check(h, opts.max_vars.unwrap_or(2))?;
    Ok(render_homogeneity(verdict, h, "ALGEBRAICALLY"))
}

fn render_homogeneity(verdict: HomogeneityVerdict, h: &FiniteAlgebra, kind: &str) -> Output {
    let mut out = Output::new();
    match verdict {
        HomogeneityVerdict::Homogeneous { max_vars, rank } => {
            if rank > 0 {
                out.line(format!(
                    "{kind} HOMOGENEOUS; max-vars {max_vars}; rank {rank}"
                ));
                out.kv("homogeneous", true);
                out.kv("max_vars", max_vars);
                out.kv("rank", rank);
            } else {
                out.line(format!("{kind} HOMOGENEOUS; max-vars {max_vars}"));
                out.kv("homogeneous", true);
                out.kv("max_vars", max_vars);
            }
        }
        HomogeneityVerdict::NotHomogeneous { sort, pair } => {
            out.line(format!(
                "NOT {kind} HOMOGENEOUS; witness pair ({}), ({}); sort {}",
                point_plain(&pair.0, h),
                point_plain(&pair.1, h),
                sort.name()
            ));
            out.kv("homogeneous", false);
            out.kv("witness1", point_plain(&pair.0, h));
            out.kv("witness2", point_plain(&pair.1, h));
            out.kv("sort", sort.name().to_string());
            out.negative = true;
        }
    }
    out
}

fn cmd_noetherian_reduce(opts: &Opts, env: &Env) -> Result<Output> {
    let h = env.algebra()?;
    let text = read_file(require(&opts.system, "system")?)?;
    let system = FormulaSystem::parse(&text, &env.registry, h.spec())?;
    let reduced = noetherian_reduce(h, &system)?;
    let mut out = Output::new();
    out.line(format!(
        "kept: {} of {}",
        reduced.formulas.len(),
        system.formulas.len()
    ));
    out.kv("kept", reduced.formulas.len());
    out.kv("original", system.formulas.len());
    for (i, f) in reduced.formulas.iter().enumerate() {
        out.line(format!("  {}", f.display(h.spec())));
        out.kv(&format!("formula{i}"), f.display(h.spec()));
    }
    Ok(out)
}

fn cmd_iso(_opts: &Opts, env: &Env) -> Result<Output> {
    let h1 = env.algebra()?;
    let h2 = env.second()?;
    let mut out = Output::new();
    match isomorphism_search(h1, h2)? {
        Some(map) => {
            let rendered: Vec<String> = map
                .iter()
                .enumerate()
                .map(|(from, &to)| format!("{}->{}", h1.element_name(from), h2.element_name(to)))
                .collect();
            out.line(format!("ISOMORPHIC; map {}", rendered.join(", ")));
            out.kv("isomorphic", true);
            out.kv("map", rendered.join(","));
        }
        None => {
            out.line("NOT ISOMORPHIC");
            out.kv("isomorphic", false);
            out.negative = true;
        }
    }
    Ok(out)
}
