//! Stock finite algebras used throughout the examples and tests.
//!
//! Groups are presented over the signature `{mul/2, e/0}`; semilattices over
//! `{meet/2}`. `standard_library` collects a family of small two-to-four
//! element algebras sharing the `{mul/2, e/0}` signature so that any pair can
//! be compared.

use crate::algebra::FiniteAlgebra;
use crate::syntax::VarietySpec;

/// Signature of groups as used here: binary `mul` and nullary `e`.
pub fn group_spec() -> VarietySpec {
    VarietySpec::new(vec![("mul", 2), ("e", 0)]).unwrap()
}

/// Signature of meet-semilattices: a single binary `meet`.
pub fn semilattice_spec() -> VarietySpec {
    VarietySpec::new(vec![("meet", 2)]).unwrap()
}

/// The two-element chain `{0, 1}` with `meet = min`.
pub fn semilattice_s2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        "S2",
        &semilattice_spec(),
        vec!["0", "1"],
        vec![vec![0, 0, 0, 1]],
    )
    .unwrap()
}

/// The meet-semilattice on the chain `0 < 1 < ... < n-1`.
pub fn chain_semilattice(n: usize) -> FiniteAlgebra {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut table = Vec::with_capacity(n * n);
    for b in 0..n {
        for a in 0..n {
            table.push(a.min(b));
        }
    }
    FiniteAlgebra::new(
        &format!("C{n}"),
        &semilattice_spec(),
        names.iter().map(String::as_str).collect(),
        vec![table],
    )
    .unwrap()
}

fn cyclic_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "e".to_string(),
            1 if n == 2 => "a".to_string(),
            1 => "g".to_string(),
            _ => format!("g{i}"),
        })
        .collect()
}

/// The cyclic group of order `n` over `{mul, e}`.
pub fn cyclic(n: usize) -> FiniteAlgebra {
    assert!(n >= 1);
    let names = cyclic_names(n);
    let mut mul = Vec::with_capacity(n * n);
    for b in 0..n {
        for a in 0..n {
            mul.push((a + b) % n);
        }
    }
    FiniteAlgebra::new(
        &format!("Z{n}"),
        &group_spec(),
        names.iter().map(String::as_str).collect(),
        vec![mul, vec![0]],
    )
    .unwrap()
}

/// The Klein four-group over `{mul, e}`.
pub fn klein() -> FiniteAlgebra {
    // e a b c with a*b = c and every square = e.
    let mul = vec![
        0, 1, 2, 3, // * e
        1, 0, 3, 2, // * a
        2, 3, 0, 1, // * b
        3, 2, 1, 0, // * c
    ];
    FiniteAlgebra::new(
        "V4",
        &group_spec(),
        vec!["e", "a", "b", "c"],
        vec![mul, vec![0]],
    )
    .unwrap()
}

/// Componentwise direct product; both factors must share a signature.
pub fn direct_product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    a.same_signature(b)
        .expect("product factors must share a signature");
    let na = a.size();
    let nb = b.size();
    let n = na * nb;
    let names: Vec<String> = (0..n)
        .map(|i| format!("{}_{}", a.element_name(i % na), b.element_name(i / na)))
        .collect();
    let mut tables = Vec::new();
    for (opi, op) in a.spec().ops().iter().enumerate() {
        let rows = n.pow(op.arity as u32);
        let mut table = Vec::with_capacity(rows);
        for idx in 0..rows {
            let mut rest = idx;
            let mut args_a = Vec::with_capacity(op.arity);
            let mut args_b = Vec::with_capacity(op.arity);
            for _ in 0..op.arity {
                let v = rest % n;
                rest /= n;
                args_a.push(v % na);
                args_b.push(v / na);
            }
            let ra = a.apply_op(opi, &args_a);
            let rb = b.apply_op(opi, &args_b);
            table.push(ra + rb * na);
        }
        tables.push(table);
    }
    FiniteAlgebra::new(
        &format!("{}x{}", a.name(), b.name()),
        a.spec(),
        names.iter().map(String::as_str).collect(),
        tables,
    )
    .unwrap()
}

/// A `{mul, e}` algebra from an explicit multiplication table and unit index.
pub fn mul_algebra(name: &str, elements: Vec<&str>, mul: Vec<usize>, unit: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(name, &group_spec(), elements, vec![mul, vec![unit]]).unwrap()
}

/// A family of small `{mul, e}` algebras with at most four elements, pairwise
/// comparable. Contains both groups and assorted non-group tables.
pub fn standard_library() -> Vec<FiniteAlgebra> {
    let chain2_top = mul_algebra("M2top", vec!["0", "1"], vec![0, 0, 0, 1], 1);
    let chain2_bot = mul_algebra("M2bot", vec!["0", "1"], vec![0, 0, 0, 1], 0);
    let chain3_top = {
        let mut mul = Vec::new();
        for b in 0..3usize {
            for a in 0..3usize {
                mul.push(a.min(b));
            }
        }
        mul_algebra("M3top", vec!["0", "1", "2"], mul, 2)
    };
    let chain4_top = {
        let mut mul = Vec::new();
        for b in 0..4usize {
            for a in 0..4usize {
                mul.push(a.min(b));
            }
        }
        mul_algebra("M4top", vec!["0", "1", "2", "3"], mul, 3)
    };
    let left2 = mul_algebra("L2", vec!["0", "1"], vec![0, 1, 0, 1], 0);
    let right2 = mul_algebra("R2", vec!["0", "1"], vec![0, 0, 1, 1], 0);
    vec![
        cyclic(1),
        cyclic(2),
        cyclic(3),
        cyclic(4),
        klein(),
        direct_product(&cyclic(2), &cyclic(2)),
        chain2_top,
        chain2_bot,
        chain3_top,
        chain4_top,
        left2,
        right2,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Term, VarSort};

    #[test]
    fn cyclic_groups_satisfy_group_identities() {
        let mut spec = group_spec();
        let xyz = VarSort::new("I3", &["x", "y", "z"]).unwrap();
        let x1 = VarSort::new("I1", &["x"]).unwrap();
        let assoc_l = Term::parse("mul(mul(x, y), z)", &xyz, &spec).unwrap();
        let assoc_r = Term::parse("mul(x, mul(y, z))", &xyz, &spec).unwrap();
        spec.add_identity(assoc_l, assoc_r).unwrap();
        let unit_l = Term::parse("mul(e(), x)", &x1, &spec).unwrap();
        let x = Term::parse("x", &x1, &spec).unwrap();
        spec.add_identity(unit_l, x).unwrap();

        for n in 1..=6 {
            assert!(cyclic(n).satisfies_identities(&spec).unwrap(), "Z{n}");
        }
        assert!(klein().satisfies_identities(&spec).unwrap());
        assert!(direct_product(&cyclic(2), &cyclic(3))
            .satisfies_identities(&spec)
            .unwrap());
    }

    #[test]
    fn product_has_componentwise_tables() {
        let p = direct_product(&cyclic(2), &cyclic(3));
        assert_eq!(p.size(), 6);
        // (a,g) * (a,g2) = (e, e)
        let ag = p.element_index("a_g").unwrap();
        let ag2 = p.element_index("a_g2").unwrap();
        assert_eq!(p.apply_op(0, &[ag, ag2]), p.element_index("e_e").unwrap());
    }

    #[test]
    fn standard_library_is_uniform_and_small() {
        let lib = standard_library();
        assert!(lib.len() >= 10);
        for a in &lib {
            assert!(a.size() <= 4);
            a.same_signature(&lib[0]).unwrap();
        }
    }
}
