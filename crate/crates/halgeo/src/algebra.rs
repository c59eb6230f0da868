//! Finite algebras given by total operation tables, and points of affine
//! spaces over them.
//!
//! A point over a sort `X` assigns an element to every variable of `X`; it is
//! the same thing as the homomorphism from the free algebra over `X` that
//! extends the assignment. Points are indexed positionally: the first declared
//! variable is the least significant digit in base `|H|`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::syntax::{Term, TermNode, VarSort, VarietySpec};

/// Default cap on the size of an enumerated affine space.
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

/// Canonical index of a point inside its affine space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointIndex(pub usize);

/// An assignment from the variables of a sort to elements of an algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub sort: VarSort,
    pub values: Vec<usize>,
}

impl Point {
    pub fn new(sort: &VarSort, values: Vec<usize>) -> Result<Point> {
        if values.len() != sort.arity() {
            return Err(Error::InvalidInput(format!(
                "point needs {} values, got {}",
                sort.arity(),
                values.len()
            )));
        }
        Ok(Point {
            sort: sort.clone(),
            values,
        })
    }

    pub fn index(&self, carrier: usize) -> PointIndex {
        let mut idx = 0;
        for &v in self.values.iter().rev() {
            idx = idx * carrier + v;
        }
        PointIndex(idx)
    }

    pub fn from_index(sort: &VarSort, carrier: usize, index: PointIndex) -> Point {
        let mut rest = index.0;
        let values = (0..sort.arity())
            .map(|_| {
                let v = rest % carrier;
                rest /= carrier;
                v
            })
            .collect();
        Point {
            sort: sort.clone(),
            values,
        }
    }

    /// Renders as `(x=e0, y=e1)` using the algebra's element names.
    pub fn display(&self, algebra: &FiniteAlgebra) -> String {
        let inner = self
            .sort
            .vars()
            .iter()
            .zip(&self.values)
            .map(|(v, &e)| format!("{v}={}", algebra.element_name(e)))
            .collect::<Vec<_>>()
            .join(", ");
        format!("({inner})")
    }
}

/// A finite algebra with a total table for every operation of its signature.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAlgebra {
    name: String,
    spec: VarietySpec,
    elements: Vec<String>,
    /// `tables[op][a1 + a2*n + ... + ak*n^(k-1)]` for an op of arity `k`.
    tables: Vec<Vec<usize>>,
    point_cap: usize,
}

impl FiniteAlgebra {
    pub fn new(
        name: &str,
        spec: &VarietySpec,
        elements: Vec<&str>,
        tables: Vec<Vec<usize>>,
    ) -> Result<FiniteAlgebra> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra(format!("`{name}` has no elements")));
        }
        let mut seen = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if e.is_empty() || !e.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidAlgebra(format!("bad element name `{e}`")));
            }
            if seen.insert(e.to_string(), i).is_some() {
                return Err(Error::InvalidAlgebra(format!("duplicate element `{e}`")));
            }
        }
        if tables.len() != spec.ops().len() {
            return Err(Error::SignatureMismatch(format!(
                "`{name}` supplies {} tables for {} ops",
                tables.len(),
                spec.ops().len()
            )));
        }
        for (op, table) in spec.ops().iter().zip(&tables) {
            let expected = table_rows(n, op.arity, &op.name)?;
            if table.len() != expected {
                return Err(Error::InvalidAlgebra(format!(
                    "table for `{}` has {} rows, needs {expected}",
                    op.name,
                    table.len()
                )));
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidAlgebra(format!(
                    "table for `{}` yields out-of-carrier value {bad}",
                    op.name
                )));
            }
        }
        let algebra = FiniteAlgebra {
            name: name.to_string(),
            spec: spec.clone(),
            elements: elements.into_iter().map(str::to_string).collect(),
            tables,
            point_cap: DEFAULT_POINT_CAP,
        };
        for (lhs, rhs) in spec.identities() {
            if let Some(witness) = algebra.identity_failure(lhs, rhs)? {
                return Err(Error::InvalidAlgebra(format!(
                    "`{}` violates identity `{} == {}` at {}",
                    algebra.name,
                    lhs.display(spec),
                    rhs.display(spec),
                    witness.display(&algebra)
                )));
            }
        }
        Ok(algebra)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> &VarietySpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn element_names(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, index: usize) -> &str {
        &self.elements[index]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn point_cap(&self) -> usize {
        self.point_cap
    }

    pub fn set_point_cap(&mut self, cap: usize) {
        self.point_cap = cap;
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.spec.same_signature(&other.spec) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "`{}` and `{}` have different signatures",
                self.name, other.name
            )))
        }
    }

    /// Direct table lookup for one operation application.
    pub fn apply_op(&self, op: usize, args: &[usize]) -> usize {
        let n = self.elements.len();
        let mut idx = 0;
        for &a in args.iter().rev() {
            idx = idx * n + a;
        }
        self.tables[op][idx]
    }

    /// Size of the affine space over `sort`, guarded by the point cap.
    pub fn space_size(&self, sort: &VarSort) -> Result<usize> {
        let mut size: usize = 1;
        for _ in 0..sort.arity() {
            size = size.checked_mul(self.elements.len()).ok_or_else(|| {
                Error::CapExceeded(format!(
                    "space over `{}` for `{}` overflows",
                    sort.name(),
                    self.name
                ))
            })?;
            if size > self.point_cap {
                return Err(Error::CapExceeded(format!(
                    "space over `{}` for `{}` exceeds cap {}",
                    sort.name(),
                    self.name,
                    self.point_cap
                )));
            }
        }
        Ok(size)
    }

    /// All points over `sort` in index order.
    pub fn enumerate_points(&self, sort: &VarSort) -> Result<Vec<Point>> {
        let size = self.space_size(sort)?;
        Ok((0..size)
            .map(|i| Point::from_index(sort, self.elements.len(), PointIndex(i)))
            .collect())
    }

    /// Value of a term at a point: the homomorphic extension of the assignment.
    pub fn eval(&self, point: &Point, term: &Term) -> Result<usize> {
        if term.sort != point.sort {
            return Err(Error::SortMismatch(format!(
                "term over `{}`, point over `{}`",
                term.sort.name(),
                point.sort.name()
            )));
        }
        Ok(self.eval_node(&point.values, &term.node))
    }

    /// Evaluates a raw term tree against an assignment vector.
    pub fn eval_node(&self, assignment: &[usize], node: &TermNode) -> usize {
        match node {
            TermNode::Var(i) => assignment[*i],
            TermNode::App(op, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.eval_node(assignment, a)).collect();
                self.apply_op(*op, &vals)
            }
        }
    }

    /// True when the point identifies the two terms.
    pub fn kernel_contains(&self, point: &Point, lhs: &Term, rhs: &Term) -> Result<bool> {
        Ok(self.eval(point, lhs)? == self.eval(point, rhs)?)
    }

    /// First assignment violating `lhs == rhs`, if any.
    pub fn identity_failure(&self, lhs: &Term, rhs: &Term) -> Result<Option<Point>> {
        if lhs.sort != rhs.sort {
            return Err(Error::SortMismatch(
                "identity sides differ in sort".to_string(),
            ));
        }
        for point in self.enumerate_points(&lhs.sort)? {
            if self.eval(&point, lhs)? != self.eval(&point, rhs)? {
                return Ok(Some(point));
            }
        }
        Ok(None)
    }

    pub fn satisfies_identities(&self, spec: &VarietySpec) -> Result<bool> {
        for (lhs, rhs) in spec.identities() {
            if self.identity_failure(lhs, rhs)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parses the line-oriented algebra file format.
    ///
    /// ```text
    /// algebra <name>
    /// elements <e0> <e1> ...
    /// op <opname> <arity>
    /// table <opname>
    /// <arg1> ... <argk> <result>
    /// ```
    ///
    /// All `|H|^k` rows of each table are required, in any order. Lines
    /// starting with `#` are comments; unknown directives are errors.
    pub fn parse(text: &str) -> Result<FiniteAlgebra> {
        let mut name: Option<String> = None;
        let mut elements: Vec<String> = Vec::new();
        let mut ops: Vec<(String, usize)> = Vec::new();
        // op name -> (filled flags, entries)
        let mut tables: HashMap<String, Vec<Option<usize>>> = HashMap::new();
        let mut current_table: Option<String> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            let rest: Vec<&str> = words.collect();
            let at = |msg: String| Error::InvalidAlgebra(format!("line {}: {msg}", lineno + 1));
            match head {
                "algebra" => {
                    current_table = None;
                    if rest.len() != 1 {
                        return Err(at("`algebra` takes one name".to_string()));
                    }
                    name = Some(rest[0].to_string());
                }
                "elements" => {
                    current_table = None;
                    if rest.is_empty() {
                        return Err(at("`elements` needs at least one name".to_string()));
                    }
                    elements = rest.iter().map(|s| s.to_string()).collect();
                }
                "op" => {
                    current_table = None;
                    if rest.len() != 2 {
                        return Err(at("`op` takes a name and an arity".to_string()));
                    }
                    let arity: usize = rest[1]
                        .parse()
                        .map_err(|_| at(format!("bad arity `{}`", rest[1])))?;
                    ops.push((rest[0].to_string(), arity));
                }
                "table" => {
                    if rest.len() != 1 {
                        return Err(at("`table` takes one op name".to_string()));
                    }
                    let op = rest[0].to_string();
                    let (_, arity) = ops
                        .iter()
                        .find(|(n, _)| *n == op)
                        .ok_or_else(|| at(format!("table for undeclared op `{op}`")))?;
                    if elements.is_empty() {
                        return Err(at("`table` before `elements`".to_string()));
                    }
                    let rows = table_rows(elements.len(), *arity, &op)?;
                    tables.entry(op.clone()).or_insert_with(|| vec![None; rows]);
                    current_table = Some(op);
                }
                _ => {
                    // Inside a table block any line is a row of element names.
                    let Some(op) = current_table.clone() else {
                        return Err(at(format!("unknown directive `{head}`")));
                    };
                    let arity = ops.iter().find(|(n, _)| *n == op).unwrap().1;
                    let mut row = vec![head];
                    row.extend(rest);
                    if row.len() != arity + 1 {
                        return Err(at(format!(
                            "table row for `{op}` needs {} entries, got {}",
                            arity + 1,
                            row.len()
                        )));
                    }
                    let resolve = |e: &str| {
                        elements
                            .iter()
                            .position(|x| x == e)
                            .ok_or_else(|| at(format!("unknown element `{e}`")))
                    };
                    let n = elements.len();
                    let mut idx = 0;
                    for e in row[..arity].iter().rev() {
                        idx = idx * n + resolve(e)?;
                    }
                    let value = resolve(row[arity])?;
                    let slot = &mut tables.get_mut(&op).unwrap()[idx];
                    if slot.is_some() {
                        return Err(at(format!("duplicate table row for `{op}`")));
                    }
                    *slot = Some(value);
                }
            }
        }

        let name = name.ok_or_else(|| {
            Error::InvalidAlgebra("missing `algebra <name>` directive".to_string())
        })?;
        let spec = VarietySpec::new(ops.iter().map(|(n, a)| (n.as_str(), *a)).collect())?;
        let mut table_vec = Vec::new();
        for (op, arity) in &ops {
            let rows = table_rows(elements.len(), *arity, op)?;
            let filled = tables
                .remove(op)
                .ok_or_else(|| Error::InvalidAlgebra(format!("missing table for `{op}`")))?;
            let mut out = Vec::with_capacity(rows);
            for (i, slot) in filled.into_iter().enumerate() {
                out.push(slot.ok_or_else(|| {
                    Error::InvalidAlgebra(format!("table for `{op}` is missing row {i}"))
                })?);
            }
            table_vec.push(out);
        }
        FiniteAlgebra::new(
            &name,
            &spec,
            elements.iter().map(String::as_str).collect(),
            table_vec,
        )
    }

    /// Renders back into the algebra file format.
    pub fn to_file_format(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("algebra {}\n", self.name));
        out.push_str(&format!("elements {}\n", self.elements.join(" ")));
        for op in self.spec.ops() {
            out.push_str(&format!("op {} {}\n", op.name, op.arity));
        }
        for (opi, op) in self.spec.ops().iter().enumerate() {
            out.push_str(&format!("table {}\n", op.name));
            let rows = self.elements.len().pow(op.arity as u32);
            for idx in 0..rows {
                let mut rest = idx;
                let mut row = Vec::with_capacity(op.arity + 1);
                for _ in 0..op.arity {
                    row.push(self.elements[rest % self.elements.len()].clone());
                    rest /= self.elements.len();
                }
                row.push(self.elements[self.tables[opi][idx]].clone());
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

/// Guarded table size: `carrier^arity`, bounded so hostile inputs cannot
/// overflow or exhaust memory.
fn table_rows(carrier: usize, arity: usize, op: &str) -> Result<usize> {
    let mut rows: usize = 1;
    for _ in 0..arity {
        rows = rows
            .checked_mul(carrier)
            .ok_or_else(|| Error::InvalidAlgebra(format!("table for `{op}` overflows")))?;
        if rows > DEFAULT_POINT_CAP {
            return Err(Error::InvalidAlgebra(format!(
                "table for `{op}` needs {rows}+ rows, beyond the supported size"
            )));
        }
    }
    Ok(rows)
}
