//! Subsets of an affine space as bit-vectors, together with the structure that
//! makes the full power set an extended boolean algebra: boolean operations,
//! term-equality sets, existential quantifiers and substitution transports.

use crate::algebra::{FiniteAlgebra, Point, PointIndex};
use crate::error::{Error, Result};
use crate::syntax::{Substitution, Term, VarSort};

/// A subset of `Hom(W(X), H)` for one algebra and one sort, stored as a
/// bit-vector indexed by point index (least significant bit first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    algebra: String,
    carrier: usize,
    sort: VarSort,
    len: usize,
    bits: Vec<u64>,
}

impl PointSet {
    pub fn bottom(h: &FiniteAlgebra, sort: &VarSort) -> Result<PointSet> {
        let len = h.space_size(sort)?;
        Ok(PointSet {
            algebra: h.name().to_string(),
            carrier: h.size(),
            sort: sort.clone(),
            len,
            bits: vec![0; len.div_ceil(64)],
        })
    }

    pub fn top(h: &FiniteAlgebra, sort: &VarSort) -> Result<PointSet> {
        let mut set = PointSet::bottom(h, sort)?;
        for w in set.bits.iter_mut() {
            *w = u64::MAX;
        }
        set.mask_tail();
        Ok(set)
    }

    pub fn from_indices(h: &FiniteAlgebra, sort: &VarSort, indices: &[usize]) -> Result<PointSet> {
        let mut set = PointSet::bottom(h, sort)?;
        for &i in indices {
            if i >= set.len {
                return Err(Error::InvalidInput(format!(
                    "point index {i} outside space of size {}",
                    set.len
                )));
            }
            set.insert(PointIndex(i));
        }
        Ok(set)
    }

    /// Exactly the points where both terms evaluate equally.
    pub fn equality(h: &FiniteAlgebra, lhs: &Term, rhs: &Term) -> Result<PointSet> {
        if lhs.sort != rhs.sort {
            return Err(Error::SortMismatch(format!(
                "equality sides over `{}` and `{}`",
                lhs.sort.name(),
                rhs.sort.name()
            )));
        }
        let mut set = PointSet::bottom(h, &lhs.sort)?;
        let mut assignment = vec![0usize; lhs.sort.arity()];
        for i in 0..set.len {
            decode(i, h.size(), &mut assignment);
            if h.eval_node(&assignment, &lhs.node) == h.eval_node(&assignment, &rhs.node) {
                set.insert(PointIndex(i));
            }
        }
        Ok(set)
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    fn compatible(&self, other: &PointSet) -> Result<()> {
        if self.algebra != other.algebra || self.carrier != other.carrier {
            return Err(Error::AlgebraMismatch(format!(
                "`{}` vs `{}`",
                self.algebra, other.algebra
            )));
        }
        if self.sort != other.sort {
            return Err(Error::SortMismatch(format!(
                "`{}` vs `{}`",
                self.sort.name(),
                other.sort.name()
            )));
        }
        Ok(())
    }

    pub fn algebra_name(&self) -> &str {
        &self.algebra
    }

    pub fn sort(&self) -> &VarSort {
        &self.sort
    }

    /// Number of points in the ambient space.
    pub fn space_size(&self) -> usize {
        self.len
    }

    pub fn contains(&self, i: PointIndex) -> bool {
        i.0 < self.len && self.bits[i.0 / 64] >> (i.0 % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: PointIndex) {
        self.bits[i.0 / 64] |= 1 << (i.0 % 64);
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn indices(&self) -> impl Iterator<Item = PointIndex> + '_ {
        (0..self.len)
            .filter(|&i| self.contains(PointIndex(i)))
            .map(PointIndex)
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, o) in out.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        Ok(out)
    }

    pub fn intersect(&self, other: &PointSet) -> Result<PointSet> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, o) in out.bits.iter_mut().zip(&other.bits) {
            *w &= o;
        }
        Ok(out)
    }

    pub fn complement(&self) -> PointSet {
        let mut out = self.clone();
        for w in out.bits.iter_mut() {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    pub fn is_subset(&self, other: &PointSet) -> Result<bool> {
        self.compatible(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    /// The cylinder of the set along `var`: a point belongs to the result when
    /// some member agrees with it everywhere except possibly at `var`.
    pub fn exists(&self, var: &str) -> Result<PointSet> {
        let pos = self.sort.position(var).ok_or_else(|| {
            Error::VarNotInSort(format!("`{var}` in sort `{}`", self.sort.name()))
        })?;
        let stride = self.carrier.pow(pos as u32);
        let mut out = self.clone();
        for i in 0..self.len {
            if out.contains(PointIndex(i)) {
                continue;
            }
            let base = i - (i / stride % self.carrier) * stride;
            for v in 0..self.carrier {
                if self.contains(PointIndex(base + v * stride)) {
                    out.insert(PointIndex(i));
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Pullback of a point along a substitution: precompose the homomorphism
    /// with the substitution. The point lives over the codomain sort.
    pub fn pullback_point(h: &FiniteAlgebra, s: &Substitution, point: &Point) -> Result<Point> {
        if point.sort != *s.codomain() {
            return Err(Error::SortMismatch(format!(
                "point over `{}`, substitution codomain `{}`",
                point.sort.name(),
                s.codomain().name()
            )));
        }
        let values = s
            .images()
            .iter()
            .map(|t| h.eval_node(&point.values, &t.node))
            .collect();
        Point::new(s.domain(), values)
    }

    /// Map sending each point index of the codomain space to the index of its
    /// pullback in the domain space.
    pub fn pullback_map(h: &FiniteAlgebra, s: &Substitution) -> Result<Vec<usize>> {
        let target = h.space_size(s.codomain())?;
        h.space_size(s.domain())?;
        let n = h.size();
        let mut assignment = vec![0usize; s.codomain().arity()];
        let mut map = Vec::with_capacity(target);
        for i in 0..target {
            decode(i, n, &mut assignment);
            let mut idx = 0;
            for t in s.images().iter().rev() {
                idx = idx * n + h.eval_node(&assignment, &t.node);
            }
            map.push(idx);
        }
        Ok(map)
    }

    /// Transport of a set over the domain sort to the codomain sort: a point
    /// belongs to the image exactly when its pullback lies in the set.
    pub fn transport(h: &FiniteAlgebra, s: &Substitution, set: &PointSet) -> Result<PointSet> {
        if set.sort != *s.domain() {
            return Err(Error::SortMismatch(format!(
                "set over `{}`, substitution domain `{}`",
                set.sort.name(),
                s.domain().name()
            )));
        }
        if set.algebra != h.name() || set.carrier != h.size() {
            return Err(Error::AlgebraMismatch(format!(
                "set over `{}`, algebra `{}`",
                set.algebra,
                h.name()
            )));
        }
        let map = PointSet::pullback_map(h, s)?;
        let mut out = PointSet::bottom(h, s.codomain())?;
        for (i, &src) in map.iter().enumerate() {
            if set.contains(PointIndex(src)) {
                out.insert(PointIndex(i));
            }
        }
        Ok(out)
    }

    /// Image of the set under a carrier permutation acting coordinatewise.
    pub fn permute_elements(&self, perm: &[usize]) -> PointSet {
        let mut out = PointSet {
            algebra: self.algebra.clone(),
            carrier: self.carrier,
            sort: self.sort.clone(),
            len: self.len,
            bits: vec![0; self.bits.len()],
        };
        let n = self.carrier;
        let mut assignment = vec![0usize; self.sort.arity()];
        for i in 0..self.len {
            if !self.contains(PointIndex(i)) {
                continue;
            }
            decode(i, n, &mut assignment);
            let mut idx = 0;
            for &v in assignment.iter().rev() {
                idx = idx * n + perm[v];
            }
            out.insert(PointIndex(idx));
        }
        out
    }

    /// Hexadecimal rendering of the bit-vector, least significant bit first,
    /// without leading zeros (`0` for the empty set).
    pub fn hex_mask(&self) -> String {
        let nibbles = self.len.div_ceil(4).max(1);
        let mut out = String::with_capacity(nibbles);
        let mut significant = false;
        for k in (0..nibbles).rev() {
            let word = self.bits.get(k / 16).copied().unwrap_or(0);
            let nibble = (word >> (k % 16 * 4)) & 0xf;
            if nibble != 0 {
                significant = true;
            }
            if significant {
                out.push(char::from_digit(nibble as u32, 16).unwrap());
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Member points in index order, rendered with element names.
    pub fn render_points(&self, h: &FiniteAlgebra) -> Vec<String> {
        self.indices()
            .map(|i| Point::from_index(&self.sort, self.carrier, i).display(h))
            .collect()
    }
}

fn decode(mut index: usize, carrier: usize, out: &mut [usize]) {
    for v in out.iter_mut() {
        *v = index % carrier;
        index /= carrier;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;
    use crate::syntax::VarSort;

    fn xy() -> VarSort {
        VarSort::new("X", &["x", "y"]).unwrap()
    }

    #[test]
    fn complement_of_top_is_bottom() {
        let s2 = library::semilattice_s2();
        let top = PointSet::top(&s2, &xy()).unwrap();
        assert_eq!(top.complement(), PointSet::bottom(&s2, &xy()).unwrap());
    }

    #[test]
    fn finite_intersection() {
        let s2 = library::semilattice_s2();
        let a = PointSet::from_indices(&s2, &xy(), &[0, 2, 3]).unwrap();
        let b = PointSet::from_indices(&s2, &xy(), &[1, 3]).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.indices().collect::<Vec<_>>(), vec![PointIndex(3)]);
    }

    #[test]
    fn excluded_middle() {
        let s2 = library::semilattice_s2();
        for mask in 0..16usize {
            let idxs: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let a = PointSet::from_indices(&s2, &xy(), &idxs).unwrap();
            assert!(a.union(&a.complement()).unwrap().is_full());
        }
    }

    #[test]
    fn equality_set_of_meet_example() {
        let s2 = library::semilattice_s2();
        let sort = xy();
        let lhs = Term::parse("meet(x, y)", &sort, s2.spec()).unwrap();
        let rhs = Term::parse("x", &sort, s2.spec()).unwrap();
        let set = PointSet::equality(&s2, &lhs, &rhs).unwrap();
        let idxs: Vec<usize> = set.indices().map(|i| i.0).collect();
        assert_eq!(idxs, vec![0, 2, 3]);
        assert_eq!(set.hex_mask(), "d");
    }

    #[test]
    fn reflexive_equality_is_top() {
        let z3 = library::cyclic(3);
        let sort = xy();
        let w = Term::parse("mul(x, mul(y, x))", &sort, z3.spec()).unwrap();
        assert!(PointSet::equality(&z3, &w, &w).unwrap().is_full());
    }

    #[test]
    fn squares_vanish_in_z2() {
        let z2 = library::cyclic(2);
        let sort = VarSort::new("X", &["x"]).unwrap();
        let lhs = Term::parse("mul(x, x)", &sort, z2.spec()).unwrap();
        let rhs = Term::parse("e()", &sort, z2.spec()).unwrap();
        assert!(PointSet::equality(&z2, &lhs, &rhs).unwrap().is_full());
    }

    #[test]
    fn exists_frees_one_coordinate() {
        let s2 = library::semilattice_s2();
        let a = PointSet::from_indices(&s2, &xy(), &[1]).unwrap();
        let e = a.exists("x").unwrap();
        assert_eq!(e.indices().map(|i| i.0).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn exists_of_bottom_is_bottom() {
        let s2 = library::semilattice_s2();
        let bottom = PointSet::bottom(&s2, &xy()).unwrap();
        assert!(bottom.exists("y").unwrap().is_empty());
    }

    #[test]
    fn exists_of_meet_equality_is_top() {
        let s2 = library::semilattice_s2();
        let sort = xy();
        let lhs = Term::parse("meet(x, y)", &sort, s2.spec()).unwrap();
        let rhs = Term::parse("y", &sort, s2.spec()).unwrap();
        let set = PointSet::equality(&s2, &lhs, &rhs).unwrap();
        assert!(set.exists("x").unwrap().is_full());
    }

    #[test]
    fn transport_along_meet_image() {
        let s2 = library::semilattice_s2();
        let x1 = VarSort::new("X1", &["x"]).unwrap();
        let sort = xy();
        let s = Substitution::new(
            &x1,
            &sort,
            vec![Term::parse("meet(x, y)", &sort, s2.spec()).unwrap()],
        )
        .unwrap();
        let a = PointSet::from_indices(&s2, &x1, &[1]).unwrap();
        let t = PointSet::transport(&s2, &s, &a).unwrap();
        assert_eq!(t.indices().map(|i| i.0).collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn transport_along_identity_is_neutral() {
        let s2 = library::semilattice_s2();
        let sort = xy();
        let id = Substitution::identity(&sort);
        let a = PointSet::from_indices(&s2, &sort, &[1, 2]).unwrap();
        assert_eq!(PointSet::transport(&s2, &id, &a).unwrap(), a);
    }

    #[test]
    fn transport_preserves_top() {
        let z2 = library::cyclic(2);
        let x1 = VarSort::new("X1", &["x"]).unwrap();
        let sort = xy();
        let s = Substitution::new(
            &x1,
            &sort,
            vec![Term::parse("mul(x, y)", &sort, z2.spec()).unwrap()],
        )
        .unwrap();
        let top = PointSet::top(&z2, &x1).unwrap();
        assert!(PointSet::transport(&z2, &s, &top).unwrap().is_full());
    }

    #[test]
    fn equality_transport_instance() {
        // transporting the equality of x with its self-meet along x -> meet(x, y)
        // gives the equality of the image terms
        let s2 = library::semilattice_s2();
        let x1 = VarSort::new("X1", &["x"]).unwrap();
        let sort = xy();
        let s = Substitution::new(
            &x1,
            &sort,
            vec![Term::parse("meet(x, y)", &sort, s2.spec()).unwrap()],
        )
        .unwrap();
        let atom = PointSet::equality(
            &s2,
            &Term::parse("x", &x1, s2.spec()).unwrap(),
            &Term::parse("meet(x, x)", &x1, s2.spec()).unwrap(),
        )
        .unwrap();
        let lhs = PointSet::transport(&s2, &s, &atom).unwrap();
        let rhs = PointSet::equality(
            &s2,
            &Term::parse("meet(x, y)", &sort, s2.spec()).unwrap(),
            &Term::parse("meet(meet(x, y), meet(x, y))", &sort, s2.spec()).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hex_mask_is_stable() {
        let s2 = library::semilattice_s2();
        let top = PointSet::top(&s2, &xy()).unwrap();
        assert_eq!(top.hex_mask(), "f");
        assert_eq!(PointSet::bottom(&s2, &xy()).unwrap().hex_mask(), "0");
        let a = PointSet::from_indices(&s2, &xy(), &[0, 2, 3]).unwrap();
        assert_eq!(a.hex_mask(), "d");
    }

    #[test]
    fn hex_mask_spans_multiple_words() {
        // 81-point space: the mask crosses the 64-bit word boundary
        let z3 = library::cyclic(3);
        let sort = VarSort::new("X", &["x", "y", "z", "w"]).unwrap();
        let idxs = [0usize, 63, 64, 80];
        let set = PointSet::from_indices(&z3, &sort, &idxs).unwrap();
        let mask = set.hex_mask();
        // reconstruct the indices from the rendered mask
        let mut recovered = Vec::new();
        for (k, c) in mask.chars().rev().enumerate() {
            let nibble = c.to_digit(16).unwrap();
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    recovered.push(k * 4 + b);
                }
            }
        }
        assert_eq!(recovered, idxs);
        assert_eq!(PointSet::top(&z3, &sort).unwrap().hex_mask().len(), 21);
    }

    #[test]
    fn point_rendering() {
        let s2 = library::semilattice_s2();
        let a = PointSet::from_indices(&s2, &xy(), &[2]).unwrap();
        assert_eq!(a.render_points(&s2), vec!["(x=0, y=1)".to_string()]);
    }
}
