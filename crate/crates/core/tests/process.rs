use matchbox_core::asymptotics::{classify, residue_asymptotic, truncated_return_probability};
use matchbox_core::expectations::{first_return_distribution, residue_diagonal_sum, residue_recursion};
use matchbox_core::simulator::{
    estimate, run_first_return, run_residue_observed, sample, step_labelled, trial_rng, ProcessState,
    SimulationTarget, TieBreak,
};
use matchbox_core::{Exact, ExactPolynomial, Field, Regime};
use proptest::prelude::*;

fn r(a: i64, b: i64) -> Exact {
    Exact::new(a.into(), b.into())
}

proptest! {
    #[test]
    fn tie_break_does_not_change_sorted_state(
        boxes in proptest::collection::vec(0u64..6, 2..7),
        moves in proptest::collection::vec(any::<bool>(), 0..30),
    ) {
        let mut first = boxes.clone();
        let mut last = boxes.clone();
        let mut sorted = ProcessState::new(boxes).unwrap();
        for big in moves {
            let a = step_labelled(&mut first, big, TieBreak::First);
            let b = step_labelled(&mut last, big, TieBreak::Last);
            let c = sorted.step(big);
            prop_assert_eq!(a.is_ok(), b.is_ok());
            prop_assert_eq!(a.is_ok(), c.is_ok());
            let Ok(next) = c else { break };
            sorted = next;
            let mut fs = first.clone();
            fs.sort_unstable_by(|x, y| y.cmp(x));
            let mut ls = last.clone();
            ls.sort_unstable_by(|x, y| y.cmp(x));
            prop_assert_eq!(&fs, &ls);
            prop_assert_eq!(fs.as_slice(), sorted.boxes());
        }
    }

    #[test]
    fn trajectories_stay_in_the_wedge(k in 2usize..6, n in 1u64..30, p in 0.05f64..0.95, seed: u64) {
        let mut rng = trial_rng(seed, 0);
        let mut steps = 0u64;
        let x = run_residue_observed(k, n, p, &mut rng, |s| {
            steps += 1;
            let b = s.boxes();
            assert!(b[0] - b[k - 2] <= 1, "state {s} leaves the wedge");
            assert!(b.windows(2).all(|w| w[0] >= w[1]));
        })
        .unwrap();
        prop_assert!(steps >= n && steps <= k as u64 * n - (k as u64 - 1));
        prop_assert!(x >= k as u64 - 1 && x <= (k as u64 - 1) * n);
        let y = run_first_return(k, n, p, &mut rng).unwrap();
        prop_assert!(y >= 1 && y <= n);
    }

    #[test]
    fn symbolic_residue_matches_numeric(k in 2usize..5, a in 1i64..20) {
        let p = r(a, 21);
        let sym = residue_recursion(k, 10, &ExactPolynomial::x()).unwrap();
        let num = residue_diagonal_sum(k, 10, &p).unwrap();
        for (s, v) in sym.iter().zip(&num) {
            prop_assert_eq!(&s.eval(&p), v);
        }
    }
}

#[test]
fn residue_law_for_two_matches() {
    let sims = sample(3, 2, 0.5, 100_000, 11, SimulationTarget::Residue).unwrap();
    let count = |v: u64| sims.iter().filter(|&&x| x == v).count() as f64 / sims.len() as f64;
    assert!((count(4) - 0.5).abs() < 0.01);
    assert!((count(3) - 0.25).abs() < 0.01);
    assert!((count(2) - 0.25).abs() < 0.01);
    let est = estimate(3, 2, 0.5, 100_000, 11, SimulationTarget::Residue).unwrap();
    assert!((est.mean - 3.25).abs() < 3.0 * est.stderr);
}

#[test]
fn first_return_law_matches_distribution() {
    let sims = sample(3, 2, 0.5, 100_000, 3, SimulationTarget::FirstReturn).unwrap();
    let hits = sims.iter().filter(|&&y| y == 1).count() as f64;
    let phat = hits / sims.len() as f64;
    let se = (0.25f64 * 0.75 / sims.len() as f64).sqrt();
    assert!((phat - 0.25).abs() < 3.0 * se);

    let trials = 1_000_000u64;
    let sims = sample(3, 3, 0.5, trials, 17, SimulationTarget::FirstReturn).unwrap();
    let dist = first_return_distribution(3, 3, &r(1, 2)).unwrap();
    for i in 1..=3u64 {
        let want = dist.prob(i as usize).to_f64();
        let got = sims.iter().filter(|&&y| y == i).count() as f64 / trials as f64;
        let se = (want * (1.0 - want) / trials as f64).sqrt();
        assert!((got - want).abs() < 4.0 * se, "Y={i}: {got} vs {want}");
    }
}

#[test]
fn truncated_return_probability_rises_to_one() {
    for k in 2..=5 {
        let p = 1.0 - 0.5 / k as f64;
        assert_eq!(classify(k, &p), Regime::Supercritical);
        let mut last = 0.0;
        for order in [5, 10, 20, 40, 80, 160, 320] {
            let v = truncated_return_probability(k, p, order);
            assert!(v >= last && v < 1.0 + 1e-14, "k={k} order={order}: {v}");
            last = v;
        }
        assert!(1.0 - last < 1e-6);
    }
}

#[test]
fn subcritical_error_vanishes() {
    let p = 0.4f64;
    let m = residue_diagonal_sum(3, 300, &p).unwrap();
    let err = |n: usize| (m[n - 1] - residue_asymptotic(3, n, &p).unwrap()).abs();
    assert!(err(300) < 1e-6);
    assert!(err(300) < err(50));
    // slope of the exact values
    assert!((m[299] - m[298] - 4.0 / 3.0).abs() < 1e-6);
}
