//! Oracle checks for the exponential potentials: naive-sum recomputation,
//! the per-ball telescoping identity, and one-step drift against a literal
//! enumeration of every insertion pair and deletion target.

use binsim_core::{
    ball_potential_sum, drift_estimate, exact_drift, gamma_potential, phi_clipped, phi_signed,
    psi_signed, zero_excess_bins, BinState, RngState,
};

fn random_loads(rng: &mut RngState, n: usize, max: u64) -> Vec<u64> {
    (0..n).map(|_| rng.below(max + 1)).collect()
}

/// Γ recomputed the slow way: a plain loop over the raw loads.
fn gamma_naive(loads: &[u64], alpha: f64) -> f64 {
    let n = loads.len() as f64;
    let avg = loads.iter().sum::<u64>() as f64 / n;
    loads
        .iter()
        .map(|&v| {
            let y = v as f64 - avg;
            (alpha * y).exp() + (-alpha * y).exp()
        })
        .sum()
}

/// Expected one-step Γ change by literal enumeration: all n² ordered choice
/// pairs (ball to the less-loaded member) and every non-empty deletion
/// target, each applied to a copy of the loads.
fn drift_by_enumeration(loads: &[u64], beta: f64, alpha: f64) -> f64 {
    let n = loads.len();
    let g0 = gamma_naive(loads, alpha);
    let mut drift = 0.0;
    if beta > 0.0 {
        let pair_weight = beta / (n * n) as f64;
        for i in 0..n {
            for j in 0..n {
                let target = if loads[j] < loads[i] { j } else { i };
                let mut after = loads.to_vec();
                after[target] += 1;
                drift += pair_weight * (gamma_naive(&after, alpha) - g0);
            }
        }
    }
    let nonempty: Vec<usize> = (0..n).filter(|&i| loads[i] > 0).collect();
    if beta < 1.0 && !nonempty.is_empty() {
        let weight = (1.0 - beta) / nonempty.len() as f64;
        for &i in &nonempty {
            let mut after = loads.to_vec();
            after[i] -= 1;
            drift += weight * (gamma_naive(&after, alpha) - g0);
        }
    }
    drift
}

#[test]
fn signed_potentials_match_naive_sums() {
    let mut rng = RngState::new(31_337);
    for _ in 0..300 {
        let n = 1 + rng.below(64) as usize;
        let loads = random_loads(&mut rng, n, 40);
        let state = BinState::from_loads(&loads);
        let alpha = 0.01 + 0.2 * rng.uniform_f64();
        let n = loads.len() as f64;
        let avg = loads.iter().sum::<u64>() as f64 / n;
        let phi: f64 = loads.iter().map(|&v| (alpha * (v as f64 - avg)).exp()).sum();
        let psi: f64 = loads.iter().map(|&v| (-alpha * (v as f64 - avg)).exp()).sum();
        let tol = 1e-12 * phi.max(psi).max(1.0);
        assert!((phi_signed(&state, alpha).unwrap() - phi).abs() <= tol);
        assert!((psi_signed(&state, alpha).unwrap() - psi).abs() <= tol);
        let gamma = gamma_potential(&state, alpha).unwrap();
        assert!((gamma - (phi + psi)).abs() <= 2.0 * tol);
        // Γ = Φ + Ψ ≥ 2n with equality only when perfectly balanced.
        assert!(gamma >= 2.0 * n - 1e-9);
    }
    let balanced = BinState::from_loads(&[7; 12]);
    assert!((gamma_potential(&balanced, 0.13).unwrap() - 24.0).abs() < 1e-12);
}

#[test]
fn per_ball_telescoping_reproduces_the_clipped_potential() {
    // Σ_balls π + #{zero-excess bins} = Σ_bins e^{α·X⁺}: the per-ball
    // telescoping route and the per-bin route agree to 1e-9 relative on
    // 1000 random states.
    let mut rng = RngState::new(64_000);
    for _ in 0..1_000 {
        let loads = random_loads(&mut rng, 64, 50);
        let state = BinState::from_loads(&loads);
        let alpha = 0.05;
        let lhs = ball_potential_sum(&state, alpha).unwrap() + zero_excess_bins(&state) as f64;
        let rhs = phi_clipped(&state, alpha).unwrap();
        assert!(
            (lhs - rhs).abs() <= 1e-9 * rhs.abs(),
            "lhs={lhs}, rhs={rhs}, loads={loads:?}"
        );
    }
}

#[test]
fn gamma_is_permutation_invariant() {
    let mut rng = RngState::new(11);
    let mut loads = random_loads(&mut rng, 32, 25);
    let alpha = 0.07;
    let reference = gamma_potential(&BinState::from_loads(&loads), alpha).unwrap();
    for _ in 0..10 {
        // Fisher–Yates shuffle driven by the test RNG.
        for i in (1..loads.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            loads.swap(i, j);
        }
        let shuffled = gamma_potential(&BinState::from_loads(&loads), alpha).unwrap();
        assert_eq!(reference, shuffled, "summation order changed the value");
    }
}

#[test]
fn moving_a_ball_outward_raises_both_potentials() {
    // Taking a ball from a below-average bin and giving it to an
    // above-average bin increases imbalance; Φ and Ψ must both rise
    // strictly (the total is unchanged, so the average stays put).
    let mut rng = RngState::new(404);
    let mut tested = 0;
    while tested < 100 {
        let n = 2 + rng.below(30) as usize;
        let loads = random_loads(&mut rng, n, 20);
        let total: u64 = loads.iter().sum();
        let avg = total as f64 / loads.len() as f64;
        let donor = loads.iter().position(|&v| v > 0 && (v as f64) < avg);
        let receiver = loads.iter().position(|&v| v as f64 > avg);
        let (Some(donor), Some(receiver)) = (donor, receiver) else {
            continue;
        };
        let alpha = 0.02 + 0.3 * rng.uniform_f64();
        let before = BinState::from_loads(&loads);
        let mut moved = loads.clone();
        moved[donor] -= 1;
        moved[receiver] += 1;
        let after = BinState::from_loads(&moved);
        assert!(phi_signed(&after, alpha).unwrap() > phi_signed(&before, alpha).unwrap());
        assert!(psi_signed(&after, alpha).unwrap() > psi_signed(&before, alpha).unwrap());
        tested += 1;
    }
}

#[test]
fn grouped_drift_equals_literal_enumeration() {
    // The production drift groups transitions by distinct load value; the
    // oracle enumerates all n² pairs and every deletion target literally.
    let mut rng = RngState::new(161_616);
    for trial in 0..100 {
        let n = 2 + rng.below(15) as usize;
        let loads = random_loads(&mut rng, n, 12);
        let beta = rng.uniform_f64();
        let alpha = 0.02 + 0.18 * rng.uniform_f64();
        let state = BinState::from_loads(&loads);
        let fast = exact_drift(&state, beta, alpha).unwrap();
        let slow = drift_by_enumeration(&loads, beta, alpha);
        let scale = gamma_naive(&loads, alpha).max(1.0);
        assert!(
            (fast - slow).abs() <= 1e-12 * scale,
            "trial {trial}: fast={fast}, slow={slow}, loads={loads:?}, β={beta}, α={alpha}"
        );
    }
}

#[test]
fn drift_edge_cases_match_enumeration() {
    // β = 0 (pure deletion), β = 1 (pure insertion), and an empty system
    // (deletion coin fizzles into a no-op, drift 0).
    let loads = [9u64, 4, 4, 1, 0, 0];
    let state = BinState::from_loads(&loads);
    for beta in [0.0, 1.0] {
        let fast = exact_drift(&state, beta, 0.1).unwrap();
        let slow = drift_by_enumeration(&loads, beta, 0.1);
        assert!((fast - slow).abs() <= 1e-12 * gamma_naive(&loads, 0.1));
    }
    let empty = BinState::new(8);
    assert_eq!(exact_drift(&empty, 0.0, 0.1).unwrap(), 0.0);

    // Pure two-choice insertion on a strongly skewed state: the Φ side
    // dominates and the insertion-driven average shift pulls Γ down.
    let mut skewed = vec![0u64; 16];
    skewed[0] = 30;
    let state = BinState::from_loads(&skewed);
    let drift = exact_drift(&state, 1.0, 0.1).unwrap();
    assert!(drift < 0.0, "drift = {drift}");
    assert!((drift - drift_by_enumeration(&skewed, 1.0, 0.1)).abs() <= 1e-10);
}

#[test]
fn monte_carlo_drift_tightens_and_tracks_the_exact_value() {
    let loads = [6u64, 5, 3, 3, 2, 1, 0, 4, 2, 7];
    let state = BinState::from_loads(&loads);
    let (beta, alpha) = (0.55, 0.1);
    let exact = exact_drift(&state, beta, alpha).unwrap();
    let rng = RngState::new(2_718);
    let mut last_se = f64::INFINITY;
    for trials in [1_000u64, 4_000, 16_000, 64_000] {
        let (mean, se) = drift_estimate(&state, beta, alpha, trials, &rng).unwrap();
        assert!(se < last_se, "SE failed to shrink at {trials} trials");
        // Balanced-state degeneracy aside (this state is skewed), the mean
        // must stay within 3 SE plus rounding dust of the exact drift.
        assert!(
            (mean - exact).abs() <= 3.0 * se + 1e-12,
            "trials={trials}: mean={mean}, exact={exact}, se={se}"
        );
        last_se = se;
    }
    // SE shrinks like 1/√trials: 64× the trials is 8× tighter, up to noise.
    assert!(last_se < 0.3);
}

#[test]
fn monte_carlo_drift_agrees_with_enumeration_across_random_states() {
    // 100 random small states; the estimate must sit within 3 SE (plus an
    // absolute guard for variance-degenerate states) of the enumeration
    // value in at least 99 of them.
    let mut rng = RngState::new(55_500);
    let mut misses = 0;
    for trial in 0..100u64 {
        let n = 2 + rng.below(15) as usize;
        let loads = random_loads(&mut rng, n, 10);
        let beta = rng.uniform_f64();
        let alpha = 0.02 + 0.1 * rng.uniform_f64();
        let state = BinState::from_loads(&loads);
        let exact = exact_drift(&state, beta, alpha).unwrap();
        let (mean, se) = drift_estimate(&state, beta, alpha, 2_000, &rng.child(trial)).unwrap();
        if (mean - exact).abs() > 3.0 * se + 1e-12 {
            misses += 1;
        }
    }
    assert!(misses <= 1, "{misses} of 100 states fell outside 3 SE");
}
