//! Seeded pair generators and their predicates.

use lpbm::verify::{check_pair, generate_pairs, Generator, PairFamily};

fn main() -> lpbm::Result<()> {
    let families = [
        PairFamily::new("sym", Generator::SymmetricPolytope, 2, 3),
        PairFamily::new("boxes", Generator::UnconditionalBox, 3, 3),
        PairFamily::new("weak", Generator::WeaklyUnconditional, 2, 3),
        PairFamily::new("refl", Generator::ReflectionInvariant, 2, 3)
            .with_normals(vec![vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]),
        PairFamily::new("dil", Generator::DilatatePair, 2, 3),
        PairFamily::new("any", Generator::GenericPosition, 2, 3),
    ];
    for f in &families {
        for pair in generate_pairs(f, 42)? {
            check_pair(f, &pair)?;
            let nk = pair.k.as_polytope().map_or(0, |p| p.vertices().len());
            let nl = pair.l.as_polytope().map_or(0, |p| p.vertices().len());
            println!("{:<6} pair {}: {nk} and {nl} vertices, {:?}", f.name, pair.id, pair.relation);
        }
    }
    Ok(())
}
