use oumvlab_core::gadgets::densest::*;
use oumvlab_core::oumv::{generate_instance, GenMode};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    for n in [3usize, 4] {
        let mut bad = 0; let mut total = 0;
        for seed in 0..100u64 {
            for mode in [GenMode::Uniform, GenMode::PlantedZero, GenMode::PlantedOne, GenMode::Sparse] {
                let inst = generate_instance(n, mode, seed).unwrap();
                let (mut g, mut layout) = build_dense_const(n, None, &inst.matrix, seed).unwrap();
                for (k, (u, v)) in inst.pairs.iter().enumerate() {
                    apply_pair_dense(&mut g, &mut layout, u, v).unwrap();
                    let (bit, _) = decide_dense(&g, &layout);
                    total += 1;
                    if bit != inst.truth[k] { bad += 1; println!("MISMATCH const n={n} seed={seed} {mode:?} pair {k}"); }
                }
            }
        }
        println!("const n={n}: {bad}/{total} in {:?}", t0.elapsed());
    }
    // expander n=8 d=3 spot check
    let t = Instant::now();
    let mut bad = 0; let mut tot = 0;
    for seed in 0..3u64 {
        let inst = generate_instance(8, GenMode::Sparse, seed).unwrap();
        let (mut g, mut layout, _) = build_dense_expander(8, None, &inst.matrix, seed).unwrap();
        for (k, (u, v)) in inst.pairs.iter().enumerate() {
            apply_pair_dense(&mut g, &mut layout, u, v).unwrap();
            let (bit, _) = decide_dense(&g, &layout);
            tot += 1;
            if bit != inst.truth[k] { bad += 1; }
        }
    }
    println!("expander n=8: {bad}/{tot} in {:?}", t.elapsed());
}
