use mmfact_core::arrangement::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn well_spread(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<Hyperplane> {
    let mut normals: Vec<Vec<f64>> = Vec::new();
    while normals.len() < count {
        let a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-3 { continue; }
        let unit: Vec<f64> = a.iter().map(|v| v / norm).collect();
        if !normals.iter().any(|n| n.iter().zip(&unit).map(|(p, q)| p * q).sum::<f64>().abs() > 0.95) {
            normals.push(unit);
        }
    }
    normals.into_iter().map(|a| Hyperplane { a, b: 0.0 }).collect()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    for fixture in 0..20usize {
        let dim = 2 + (fixture % 3);
        let count = (2 + (fixture % 7)).min(2 * dim);
        let planes = well_spread(&mut rng, dim, count);
        if fixture != 5 { continue; }
        let enumerated = enumerate_regions(&planes, &vec![0.0; dim], 1.0, 1e-8, 0).unwrap();
        // sample
        let mut srng = ChaCha8Rng::seed_from_u64(99 + fixture as u64);
        let mut sampled: BTreeSet<Vec<bool>> = BTreeSet::new();
        for _ in 0..100_000 {
            let x: Vec<f64> = (0..dim).map(|_| (srng.random::<f64>() * 2.0 - 1.0)).collect();
            let mut ok = true;
            let mut bits = Vec::new();
            for p in &planes {
                let v = p.eval(&x);
                if v.abs() <= 1e-7 { ok = false; break; }
                bits.push(v < 0.0);
            }
            if ok { sampled.insert(bits); }
        }
        let eset: BTreeSet<Vec<bool>> = enumerated.iter().map(|r| r.bits.clone()).collect();
        println!("fixture {fixture}: dim={dim} count={count} enumerated={} sampled={}", eset.len(), sampled.len());
        for extra in eset.difference(&sampled) {
            let sv = SignVector { bits: extra.clone() };
            let ip = interior_point(&sv, &planes, 1.0);
            println!("  enum-only {:?} slack={:?}", extra.iter().map(|&b| b as u8).collect::<Vec<_>>(), ip.map(|i| i.slack));
        }
        for extra in sampled.difference(&eset) {
            println!("  sample-only {:?}", extra.iter().map(|&b| b as u8).collect::<Vec<_>>());
        }
    }
}
