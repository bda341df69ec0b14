use mmfact_core::gop;
use mmfact_core::problem::{ProblemInstance, SolverConfig};
use mmfact_core::ndarray::array;
use std::time::Instant;

fn main() {
    let mut converged = 0;
    for seed in 0..20u64 {
        let inst = ProblemInstance::new(array![[0.0, -1.0, -0.5]], 2, 1.0, 0.01, seed).unwrap();
        let cfg = SolverConfig { epsilon: 0.01, max_iterations: 3000, max_wall_seconds: 50.0, ..SolverConfig::default() };
        let t0 = Instant::now();
        let report = gop::run(&inst, &cfg).unwrap();
        if matches!(report.status, gop::SolveStatus::Converged) { converged += 1; }
        println!("seed={:2} status={:?} iters={:4} pubd={:.6} rlbd={:+.6} secs={:.2}",
            seed, report.status, report.iterations, report.pubd, report.rlbd, t0.elapsed().as_secs_f64());
    }
    println!("{converged}/20 converged");
}
