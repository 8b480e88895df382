use std::time::Instant;
use klmsim::*;

fn main() {
    let input = QubitState::plus();
    for (q, m) in [(1.0, 1), (2.0, 6), (1.29663, 3)] {
        let kind = StrategyKind::Identical { resource: geometric_peak_resource(2, q).unwrap() };
        let t = Instant::now();
        let r = simulate_chain(&kind, &input, m, 1_000_000, 0).unwrap();
        println!("q={q} M={m}: rate={:.6} in {:?}", r.success_rate, t.elapsed());
    }
}
