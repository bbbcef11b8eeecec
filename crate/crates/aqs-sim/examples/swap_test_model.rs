// Usage: cargo run --example swap_test_model
//
// The probabilistic equality tester behind the fingerprint comparisons.
// One swap test passes with probability (1+F)/2 for states of fidelity F,
// so m repetitions let unequal states slip through at ((1+F)/2)^m while
// identical states pass every time.

use num_complex::Complex64;

use aqs_sim::qubit::{swap_test_compare, Qubit, SeededRng, StateLabel};

fn main() {
    let trials = 10_000u64;

    // identical states: one-sided, never reported unequal
    let plus = Qubit::standard(StateLabel::Plus);
    let mut rng = SeededRng::new(11);
    let all_equal = (0..trials).all(|_| swap_test_compare(&plus, &plus, 1, &mut rng));
    assert!(all_equal);
    println!("identical states, m=1: reported equal {trials}/{trials} times");
    println!();

    println!("{:>4} {:>3} {:>10} {:>10}", "F", "m", "analytic", "observed");
    for &fidelity in &[0.0_f64, 0.5] {
        let a = Qubit::standard(StateLabel::Zero);
        let b = Qubit::new(
            Complex64::new(fidelity.sqrt(), 0.0),
            Complex64::new((1.0 - fidelity).sqrt(), 0.0),
        )
        .unwrap();
        for m in [1, 3, 5] {
            let analytic = ((1.0 + fidelity) / 2.0).powi(m as i32);
            let mut false_equal = 0;
            for trial in 0..trials {
                let mut rng = SeededRng::for_trial(23, trial);
                if swap_test_compare(&a, &b, m, &mut rng) {
                    false_equal += 1;
                }
            }
            let observed = false_equal as f64 / trials as f64;
            println!("{fidelity:>4} {m:>3} {analytic:>10.6} {observed:>10.6}");
            assert!((observed - analytic).abs() < 0.02);
        }
    }
    println!();
    println!("unequal states can pass, equal states cannot fail: the error is one-sided");
}
