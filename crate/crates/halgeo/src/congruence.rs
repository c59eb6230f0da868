//! Finite presentations of point-closed congruences on the free algebra.
//!
//! The congruence cut out by a finite set of points `A` identifies two terms
//! exactly when they evaluate equally at every point of `A`. Although the
//! congruence has infinitely many pairs, it is determined by the subalgebra of
//! the `|A|`-fold direct power generated by the variable tuples; membership is
//! decided by coordinatewise evaluation.

use std::collections::HashMap;

use crate::algebra::{FiniteAlgebra, Point};
use crate::error::{Error, Result};
use crate::syntax::{Term, VarSort};

/// Presentation of the congruence `{(w, w') | every point of A identifies w, w'}`.
#[derive(Debug, Clone)]
pub struct QuotientPresentation {
    sort: VarSort,
    points: Vec<Point>,
    /// For each variable of the sort, its tuple of values across the points.
    generators: Vec<Vec<usize>>,
    /// The subalgebra of the direct power generated by the variable tuples.
    image: Vec<Vec<usize>>,
}

/// Builds the presentation for a non-empty list of points over one sort.
pub fn present_closed_congruence(
    h: &FiniteAlgebra,
    points: &[Point],
) -> Result<QuotientPresentation> {
    if points.is_empty() {
        return Err(Error::InvalidInput(
            "closed congruence of an empty point family".to_string(),
        ));
    }
    let sort = points[0].sort.clone();
    for p in points {
        if p.sort != sort {
            return Err(Error::SortMismatch(format!(
                "points over `{}` and `{}`",
                sort.name(),
                p.sort.name()
            )));
        }
    }
    let generators: Vec<Vec<usize>> = (0..sort.arity())
        .map(|i| points.iter().map(|p| p.values[i]).collect())
        .collect();
    let image = generate_subpower(h, &generators, points.len());
    Ok(QuotientPresentation {
        sort,
        points: points.to_vec(),
        generators,
        image,
    })
}

/// Closure of the generator tuples inside the direct power `H^width`.
fn generate_subpower(
    h: &FiniteAlgebra,
    generators: &[Vec<usize>],
    width: usize,
) -> Vec<Vec<usize>> {
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut elements: Vec<Vec<usize>> = Vec::new();
    let push = |t: Vec<usize>, elements: &mut Vec<Vec<usize>>, seen: &mut HashMap<_, _>| {
        if !seen.contains_key(&t) {
            seen.insert(t.clone(), elements.len());
            elements.push(t);
        }
    };
    for g in generators {
        push(g.clone(), &mut elements, &mut seen);
    }
    for (opi, op) in h.spec().ops().iter().enumerate() {
        if op.arity == 0 {
            let c = h.apply_op(opi, &[]);
            push(vec![c; width], &mut elements, &mut seen);
        }
    }
    let mut frontier = 0;
    while frontier < elements.len() {
        let upto = elements.len();
        for (opi, op) in h.spec().ops().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            let mut combo = vec![0usize; op.arity];
            loop {
                // at least one argument from the yet-unprocessed block
                if combo.iter().any(|&c| c >= frontier) {
                    let tuple: Vec<usize> = (0..width)
                        .map(|k| {
                            let args: Vec<usize> = combo.iter().map(|&c| elements[c][k]).collect();
                            h.apply_op(opi, &args)
                        })
                        .collect();
                    push(tuple, &mut elements, &mut seen);
                }
                // advance the mixed-radix counter over indices < upto
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
        frontier = upto;
    }
    elements
}

impl QuotientPresentation {
    pub fn sort(&self) -> &VarSort {
        &self.sort
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn image_size(&self) -> usize {
        self.image.len()
    }

    /// Coordinatewise evaluation of a term across the witness points.
    pub fn tuple_eval(&self, h: &FiniteAlgebra, term: &Term) -> Result<Vec<usize>> {
        if term.sort != self.sort {
            return Err(Error::SortMismatch(format!(
                "term over `{}`, presentation over `{}`",
                term.sort.name(),
                self.sort.name()
            )));
        }
        Ok(self
            .points
            .iter()
            .map(|p| h.eval_node(&p.values, &term.node))
            .collect())
    }

    /// Membership of the pair in the presented congruence.
    pub fn contains(&self, h: &FiniteAlgebra, lhs: &Term, rhs: &Term) -> Result<bool> {
        Ok(self.tuple_eval(h, lhs)? == self.tuple_eval(h, rhs)?)
    }

    /// Whether a further point respects every pair of the congruence, i.e.
    /// whether the assignment factors through the presented quotient. Decided
    /// by checking that extending every generator tuple with the point's value
    /// keeps the projection away from the new coordinate injective.
    pub fn admits_point(&self, h: &FiniteAlgebra, point: &Point) -> Result<bool> {
        if point.sort != self.sort {
            return Err(Error::SortMismatch(format!(
                "point over `{}`, presentation over `{}`",
                point.sort.name(),
                self.sort.name()
            )));
        }
        let width = self.points.len() + 1;
        let generators: Vec<Vec<usize>> = self
            .generators
            .iter()
            .zip(&point.values)
            .map(|(g, &v)| {
                let mut t = g.clone();
                t.push(v);
                t
            })
            .collect();
        let extended = generate_subpower(h, &generators, width);
        let mut graph: HashMap<&[usize], usize> = HashMap::new();
        for tuple in &extended {
            let (head, tail) = tuple.split_at(tuple.len() - 1);
            if let Some(&prev) = graph.get(head) {
                if prev != tail[0] {
                    return Ok(false);
                }
            } else {
                graph.insert(head, tail[0]);
            }
        }
        Ok(true)
    }
}

/// Whether two points over one sort have the same kernel congruence. Exact:
/// checks mutual admission, which compares the generated subalgebras of the
/// square under the coordinate identification.
pub fn kernels_equal(h: &FiniteAlgebra, mu: &Point, nu: &Point) -> Result<bool> {
    let pres_mu = present_closed_congruence(h, std::slice::from_ref(mu))?;
    if !pres_mu.admits_point(h, nu)? {
        return Ok(false);
    }
    let pres_nu = present_closed_congruence(h, std::slice::from_ref(nu))?;
    pres_nu.admits_point(h, mu)
}

/// All terms over the sort evaluate freely through the presentation: handy
/// check used by tests that a term's tuple matches pointwise evaluation.
pub fn tuple_matches_pointwise(
    h: &FiniteAlgebra,
    pres: &QuotientPresentation,
    term: &Term,
) -> Result<bool> {
    let tuple = pres.tuple_eval(h, term)?;
    for (p, &t) in pres.points().iter().zip(&tuple) {
        if h.eval(p, term)? != t {
            return Ok(false);
        }
    }
    Ok(true)
}
