use halgeo::algebra::FiniteAlgebra;
use halgeo::family::term_family;
use halgeo::isotypy::{type_partition, TypeOptions};
use halgeo::syntax::{VarSort, VarietySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn main() {
    let spec = VarietySpec::new(vec![("mul", 2), ("e", 0)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 4;
    let mul = (0..n * n).map(|_| rng.random_range(0..n)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let h = FiniteAlgebra::new("R", &spec, names.iter().map(String::as_str).collect(), vec![mul, vec![0]]).unwrap();
    for vars in [7usize, 8] {
        let names: Vec<&str> = ["x", "y", "z", "w", "v", "u", "t", "s"][..vars].to_vec();
        let sort = VarSort::new("S", &names).unwrap();
        let t = Instant::now();
        let fam = term_family(&[&h], &sort, 2).unwrap();
        println!("{vars} vars depth 2: {:?} -> {} reps", t.elapsed(), fam.len());
    }
    let xy = VarSort::new("X", &["x", "y"]).unwrap();
    for rank in 3..=6 {
        let t = Instant::now();
        let tp = type_partition(&h, &xy, rank, TypeOptions { atom_depth: 2 }).unwrap();
        println!("depth2 rank {rank}: {:?} -> {} classes", t.elapsed(), tp.class_count);
    }
}
