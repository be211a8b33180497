//! Behavioral checks of the shared-randomness couplings: per-process
//! deletion marginals, prefix-sum dominance along coupled trajectories,
//! distance axioms, and contraction of the meeting coupling.

use binsim_core::{
    majorizes, transformation_distance, BinState, CoupledPair, CouplingOutcome, DeletionModel,
    MeetingPair, RngState, Schedule, StepEvent,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Spreads `balls` uniformly random balls over `n` bins.
fn random_split(rng: &mut RngState, n: usize, balls: u64) -> Vec<u64> {
    let mut loads = vec![0u64; n];
    for _ in 0..balls {
        loads[rng.below(n as u64) as usize] += 1;
    }
    loads
}

/// Chi-square goodness-of-fit statistic for observed counts against
/// expected probabilities.
fn chi_square(observed: &[u64], probs: &[f64], trials: u64) -> f64 {
    observed
        .iter()
        .zip(probs)
        .map(|(&obs, &p)| {
            let expect = p * trials as f64;
            (obs as f64 - expect).powi(2) / expect
        })
        .sum()
}

#[test]
fn coupled_deletion_marginals_stay_uniform_and_ball_weighted() {
    // One shared uniform drives both deletions, so neither marginal is
    // obvious by construction. With distinct loads every sorted position is
    // its own load class: X must delete each position uniformly, Y in
    // proportion to its load.
    let distinct = [4u64, 2, 1];
    let trials = 1_000_000u64;
    let master = RngState::new(74_205);

    let mut x_hits = vec![0u64; distinct.len()];
    let mut y_hits = vec![0u64; distinct.len()];
    for i in 0..trials {
        let mut pair = CoupledPair::from_states(&distinct, &distinct, master.child(i)).unwrap();
        match pair.step(0.0) {
            (StepEvent::DeleteBin { bin: bx }, StepEvent::DeleteBall { bin: by }) => {
                x_hits[bx] += 1;
                y_hits[by] += 1;
            }
            other => panic!("β = 0 must delete in both copies, got {other:?}"),
        }
    }
    // Significance 10⁻³, 2 degrees of freedom.
    let critical = ChiSquared::new((distinct.len() - 1) as f64).unwrap().inverse_cdf(0.999);
    let chi2_x = chi_square(&x_hits, &[1.0 / 3.0; 3], trials);
    assert!(chi2_x < critical, "uniform marginal: χ² = {chi2_x:.2} ≥ {critical:.2}");
    let chi2_y = chi_square(&y_hits, &[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], trials);
    assert!(chi2_y < critical, "weighted marginal: χ² = {chi2_y:.2} ≥ {critical:.2}");

    // With ties the marginal is defined on load classes (bins sharing a load
    // are interchangeable; the deterministic within-plateau pick is a
    // relabeling). For [4,2,1,1]: X hits the load-1 class with probability
    // 2/4, Y with probability 2/8.
    let tied = [4u64, 2, 1, 1];
    let class_of = |pos: usize| match tied[pos] {
        4 => 0usize,
        2 => 1,
        _ => 2,
    };
    let mut x_class = vec![0u64; 3];
    let mut y_class = vec![0u64; 3];
    for i in 0..trials {
        let mut pair =
            CoupledPair::from_states(&tied, &tied, master.child(2 * trials + i)).unwrap();
        match pair.step(0.0) {
            (StepEvent::DeleteBin { bin: bx }, StepEvent::DeleteBall { bin: by }) => {
                x_class[class_of(bx)] += 1;
                y_class[class_of(by)] += 1;
            }
            other => panic!("unexpected events {other:?}"),
        }
    }
    let chi2_x = chi_square(&x_class, &[0.25, 0.25, 0.5], trials);
    assert!(chi2_x < critical, "uniform class marginal: χ² = {chi2_x:.2}");
    let chi2_y = chi_square(&y_class, &[0.5, 0.25, 0.25], trials);
    assert!(chi2_y < critical, "weighted class marginal: χ² = {chi2_y:.2}");

    // The two-bin worked example from the coupling construction: X deletes
    // rank 0 of [3, 1] with probability 1/2, Y with probability 3/4.
    let mut x0 = 0u64;
    let mut y0 = 0u64;
    let small = [3u64, 1];
    for i in 0..trials {
        let mut pair = CoupledPair::from_states(&small, &small, master.child(trials + i)).unwrap();
        match pair.step(0.0) {
            (StepEvent::DeleteBin { bin: bx }, StepEvent::DeleteBall { bin: by }) => {
                x0 += u64::from(bx == 0);
                y0 += u64::from(by == 0);
            }
            other => panic!("unexpected events {other:?}"),
        }
    }
    let t = trials as f64;
    let se_half = (0.25 / t).sqrt();
    let se_q3 = (0.75 * 0.25 / t).sqrt();
    assert!((x0 as f64 / t - 0.5).abs() <= 3.0 * se_half, "X rank-0 rate {}", x0 as f64 / t);
    assert!((y0 as f64 / t - 0.75).abs() <= 3.0 * se_q3, "Y rank-0 rate {}", y0 as f64 / t);
}

#[test]
fn bin_deletion_copy_majorizes_ball_deletion_copy_at_every_step() {
    // From equal empty starts, the random-bin-deletion copy stays at least
    // as imbalanced as the random-ball-deletion copy: prefix sums of the
    // sorted loads dominate after every one of 10⁵ steps, for all 20 seeds.
    for seed in 0..20u64 {
        let mut pair = CoupledPair::new(8, RngState::new(9_000 + seed));
        for t in 0..100_000u64 {
            pair.step(0.6);
            assert_eq!(
                pair.state_x().total_load(),
                pair.state_y().total_load(),
                "totals diverged at step {t} of seed {seed}"
            );
            assert!(
                majorizes(pair.state_x().loads(), pair.state_y().loads()).unwrap(),
                "dominance broken at step {t} of seed {seed}: x={:?}, y={:?}",
                pair.state_x().loads(),
                pair.state_y().loads()
            );
        }
        pair.state_x().check_coherence().unwrap();
        pair.state_y().check_coherence().unwrap();
    }
}

#[test]
fn transformation_distance_is_a_metric_with_the_imbalance_bound() {
    let mut rng = RngState::new(321);
    for _ in 0..200 {
        let n = 32;
        let balls = rng.below(200);
        let x = random_split(&mut rng, n, balls);
        let y = random_split(&mut rng, n, balls);
        let z = random_split(&mut rng, n, balls);

        let dxy = transformation_distance(&x, &y).unwrap();
        let dyx = transformation_distance(&y, &x).unwrap();
        let dxz = transformation_distance(&x, &z).unwrap();
        let dzy = transformation_distance(&z, &y).unwrap();
        assert_eq!(dxy, dyx, "symmetry");
        assert_eq!(transformation_distance(&x, &x).unwrap(), 0, "identity");
        assert!(dxy <= dxz + dzy, "triangle: {dxy} > {dxz} + {dzy}");
        assert_eq!(dxy == 0, {
            let mut xs = x.clone();
            let mut ys = y.clone();
            xs.sort_unstable();
            ys.sort_unstable();
            xs == ys
        });

        // Moving one ball changes the distance by at most 1.
        if balls > 0 {
            let mut moved = x.clone();
            let from = moved.iter().position(|&v| v > 0).unwrap();
            moved[from] -= 1;
            let to = rng.below(n as u64) as usize;
            moved[to] += 1;
            let d_moved = transformation_distance(&moved, &y).unwrap();
            assert!(d_moved.abs_diff(dxy) <= 1);
        }

        // Distance is bounded by the total imbalance of the two vectors:
        // Δ(x, y) ≤ 2n·max(adisc(x), adisc(y)).
        let adisc = |loads: &[u64]| {
            let s = binsim_core::measure(&BinState::from_loads(loads), 0);
            s.adisc
        };
        let bound = 2.0 * n as f64 * adisc(&x).max(adisc(&y));
        assert!(
            dxy as f64 <= bound + 1e-9,
            "Δ = {dxy} exceeds imbalance bound {bound}"
        );
    }
}

#[test]
fn unequal_inputs_are_rejected_everywhere() {
    assert!(transformation_distance(&[1, 2], &[1, 2, 0]).is_err());
    assert!(transformation_distance(&[3, 0], &[1, 1]).is_err());
    assert!(majorizes(&[2, 2], &[3, 2]).is_err());
    assert!(CoupledPair::from_states(&[1, 0], &[2, 0], RngState::new(0)).is_err());
    assert!(MeetingPair::new(&[1, 0], &[2, 0], DeletionModel::Bin, RngState::new(0)).is_err());
}

#[test]
fn meeting_distance_contracts_in_expectation() {
    // 400 independent coupled runs from distance 5; at sampled times the
    // across-run mean of Δ(t+1) − Δ(t) must not be positive beyond 3 SE.
    let runs = 400u64;
    let horizon = 400usize;
    let master = RngState::new(606);

    let x0 = [8u64, 6, 5, 5, 4, 4, 3, 3, 2, 2, 2, 1, 1, 1, 1, 0];
    let mut y0 = x0;
    // Push five balls from the tallest bins into the empties: Δ(x0, y0) = 5.
    y0[0] -= 3;
    y0[1] -= 2;
    y0[15] += 3;
    y0[11] += 2;
    assert_eq!(transformation_distance(&x0, &y0).unwrap(), 5);

    let mut traces: Vec<Vec<u64>> = Vec::new();
    for run in 0..runs {
        let mut pair = MeetingPair::new(&x0, &y0, DeletionModel::Ball, master.child(run)).unwrap();
        let mut trace = Vec::with_capacity(horizon + 1);
        trace.push(pair.delta());
        for _ in 0..horizon {
            pair.step(0.55);
            trace.push(pair.delta());
        }
        traces.push(trace);
    }

    for t in (0..horizon).step_by(50) {
        let diffs: Vec<f64> = traces
            .iter()
            .map(|tr| tr[t + 1] as f64 - tr[t] as f64)
            .collect();
        let mean = diffs.iter().sum::<f64>() / runs as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
        let se = (var / runs as f64).sqrt();
        assert!(
            mean <= 3.0 * se + 1e-12,
            "step {t}: mean Δ-change {mean:.5} above noise (SE {se:.5})"
        );
    }
    // Contraction is real, not just non-expansion: the average distance at
    // the horizon is well below the starting distance.
    let final_mean =
        traces.iter().map(|tr| tr[horizon] as f64).sum::<f64>() / runs as f64;
    assert!(final_mean < 2.5, "mean final distance {final_mean}");
}

#[test]
fn displaced_pairs_meet_within_the_cubic_budget_and_stay_fused() {
    let n = 16usize;
    let budget = MeetingPair::default_timeout(n);
    let schedule = Schedule::constant(0.5).unwrap();
    for model in [DeletionModel::Bin, DeletionModel::Ball] {
        for seed in 0..10u64 {
            let mut x0 = vec![3u64; n];
            let mut y0 = x0.clone();
            x0[0] += 1;
            x0[5] -= 1;
            y0[2] += 1;
            y0[9] -= 1;
            let mut pair = MeetingPair::new(&x0, &y0, model, RngState::new(33 + seed)).unwrap();
            match pair.run_until_met(&schedule, budget).unwrap() {
                CouplingOutcome::CoupledAt { step } => {
                    assert!(step <= budget);
                    assert_eq!(pair.state_x().loads(), pair.state_y().loads());
                }
                CouplingOutcome::TimedOut { .. } => {
                    panic!("{model:?} seed {seed}: no meeting within {budget} steps")
                }
            }
            // Once met, the copies evolve in lockstep forever.
            for _ in 0..2_000 {
                pair.step(0.5);
                assert_eq!(pair.delta(), 0);
            }
            assert_eq!(pair.state_x().loads(), pair.state_y().loads());
            pair.state_x().check_coherence().unwrap();
        }
    }
}

#[test]
fn meeting_runs_respect_finite_schedules() {
    let short = Schedule::explicit(vec![0.5; 10]).unwrap();
    let mut pair = MeetingPair::new(&[2, 0], &[1, 1], DeletionModel::Bin, RngState::new(1)).unwrap();
    // The pair may meet inside 10 steps; if not, the schedule runs out and
    // the error must surface rather than silently reusing β values.
    match pair.run_until_met(&short, 1_000_000) {
        Ok(CouplingOutcome::CoupledAt { step }) => assert!(step <= 10),
        Ok(CouplingOutcome::TimedOut { .. }) => panic!("budget was not the binding limit"),
        Err(e) => assert!(e.to_string().contains("ends at step 10")),
    }
}
