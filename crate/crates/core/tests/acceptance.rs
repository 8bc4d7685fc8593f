use std::time::Instant;

use scissors_core::verify::{self, Check, DEFAULT_SEED};

fn report(n: usize, c: &Check, secs: f64) {
    let status = if c.passed { "PASS" } else { "FAIL" };
    println!("criterion {n:>2}: {status} {} ({:.1}s) {}", c.name, secs, c.detail);
}

#[test]
fn acceptance() {
    let criteria: Vec<Box<dyn Fn() -> Check>> = vec![
        Box::new(verify::criterion1),
        Box::new(verify::criterion2),
        Box::new(verify::criterion3),
        Box::new(verify::criterion4),
        Box::new(verify::criterion5),
        Box::new(verify::criterion6),
        Box::new(verify::criterion7),
        Box::new(|| verify::criterion8(DEFAULT_SEED)),
        Box::new(|| verify::criterion9(DEFAULT_SEED)),
        Box::new(verify::criterion10),
    ];
    let mut results = Vec::new();
    for (i, f) in criteria.iter().enumerate() {
        let t = Instant::now();
        let c = f();
        report(i + 1, &c, t.elapsed().as_secs_f64());
        results.push(c);
    }
    let passed = results.iter().filter(|c| c.passed).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    for (i, c) in results.iter().enumerate() {
        assert!(!c.detail.starts_with("error"), "criterion {} could not run: {}", i + 1, c.detail);
    }
}
