//! Automorphism and isomorphism search by backtracking over element bijections
//! with partial-table pruning. Intended for desk-scale carriers.

use crate::algebra::FiniteAlgebra;
use crate::error::Result;

/// All table-preserving permutations of the carrier, in lexicographic order.
/// Always contains the identity.
pub fn automorphism_group(h: &FiniteAlgebra) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut partial = vec![None; h.size()];
    let mut used = vec![false; h.size()];
    search(h, h, &mut partial, &mut used, 0, &mut |perm| {
        out.push(perm.to_vec());
        true
    });
    out
}

/// A table-preserving bijection between the two algebras, or `None` when no
/// such bijection exists. The returned map is the lexicographically least one.
pub fn isomorphism_search(h1: &FiniteAlgebra, h2: &FiniteAlgebra) -> Result<Option<Vec<usize>>> {
    h1.same_signature(h2)?;
    if h1.size() != h2.size() {
        return Ok(None);
    }
    let mut found = None;
    let mut partial = vec![None; h1.size()];
    let mut used = vec![false; h2.size()];
    search(h1, h2, &mut partial, &mut used, 0, &mut |perm| {
        found = Some(perm.to_vec());
        false
    });
    Ok(found)
}

/// Depth-first assignment of images in ascending order; `emit` returns false
/// to stop after the first hit.
fn search(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    partial: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    depth: usize,
    emit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if depth == h1.size() {
        let perm: Vec<usize> = partial.iter().map(|v| v.unwrap()).collect();
        return emit(&perm);
    }
    for image in 0..h2.size() {
        if used[image] {
            continue;
        }
        partial[depth] = Some(image);
        used[image] = true;
        if consistent(h1, h2, partial) && !search(h1, h2, partial, used, depth + 1, emit) {
            partial[depth] = None;
            used[image] = false;
            return false;
        }
        partial[depth] = None;
        used[image] = false;
    }
    true
}

/// Checks every fully determined table constraint under the partial map.
fn consistent(h1: &FiniteAlgebra, h2: &FiniteAlgebra, partial: &[Option<usize>]) -> bool {
    let assigned: Vec<usize> = partial
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|_| i))
        .collect();
    for (opi, op) in h1.spec().ops().iter().enumerate() {
        let mut args = vec![0usize; op.arity];
        if !tuples_ok(h1, h2, partial, &assigned, opi, &mut args, 0) {
            return false;
        }
    }
    true
}

fn tuples_ok(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    partial: &[Option<usize>],
    assigned: &[usize],
    op: usize,
    args: &mut Vec<usize>,
    pos: usize,
) -> bool {
    if pos == args.len() {
        let result = h1.apply_op(op, args);
        if let Some(image) = partial[result] {
            let mapped: Vec<usize> = args.iter().map(|&a| partial[a].unwrap()).collect();
            return h2.apply_op(op, &mapped) == image;
        }
        return true;
    }
    for &a in assigned {
        args[pos] = a;
        if !tuples_ok(h1, h2, partial, assigned, op, args, pos + 1) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;

    #[test]
    fn s2_has_only_identity() {
        let auts = automorphism_group(&library::semilattice_s2());
        assert_eq!(auts, vec![vec![0, 1]]);
    }

    #[test]
    fn z3_has_inversion() {
        let auts = automorphism_group(&library::cyclic(3));
        assert_eq!(auts, vec![vec![0, 1, 2], vec![0, 2, 1]]);
    }

    #[test]
    fn klein_has_six_automorphisms() {
        let auts = automorphism_group(&library::klein());
        assert_eq!(auts.len(), 6);
        assert!(auts.contains(&vec![0, 1, 2, 3]));
    }

    #[test]
    fn automorphisms_form_a_group() {
        let mut algebras = library::standard_library();
        algebras.push(library::cyclic(5));
        for h in algebras {
            assert!(h.size() <= 5);
            let auts = automorphism_group(&h);
            assert!(auts.contains(&(0..h.size()).collect::<Vec<_>>()));
            for a in &auts {
                // inverse
                let mut inv = vec![0; a.len()];
                for (i, &v) in a.iter().enumerate() {
                    inv[v] = i;
                }
                assert!(auts.contains(&inv), "{}: inverse closed", h.name());
                for b in &auts {
                    let comp: Vec<usize> = (0..a.len()).map(|i| b[a[i]]).collect();
                    assert!(auts.contains(&comp), "{}: composition closed", h.name());
                }
            }
        }
    }

    #[test]
    fn z4_and_klein_are_not_isomorphic() {
        let iso = isomorphism_search(&library::cyclic(4), &library::klein()).unwrap();
        assert!(iso.is_none());
    }

    #[test]
    fn z6_is_z2_times_z3() {
        let z6 = library::cyclic(6);
        let p = library::direct_product(&library::cyclic(2), &library::cyclic(3));
        let iso = isomorphism_search(&z6, &p).unwrap().expect("CRT map");
        // verify it preserves the tables
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(
                    iso[z6.apply_op(0, &[a, b])],
                    p.apply_op(0, &[iso[a], iso[b]])
                );
            }
        }
    }

    #[test]
    fn self_isomorphism_is_identity() {
        let z4 = library::cyclic(4);
        let iso = isomorphism_search(&z4, &z4).unwrap().unwrap();
        assert_eq!(iso, vec![0, 1, 2, 3]);
    }
}
