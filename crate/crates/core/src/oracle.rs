//! Ground truth for the placement problem.
//!
//! Once the allocation of points to brackets is fixed, the best placement spaces
//! each bracket evenly, so the problem reduces to choosing integer counts. The
//! optimum is `max_N min_{m: N_m >= 1} A_m / (N_m + 1)`, which this module solves
//! exactly by a parametric search over the finite set of candidate spacings, and
//! independently by enumerating every composition of the point count.
//!
//! The Monte Carlo baseline samples uniform random placements and records their
//! objective, giving the empirical distribution a solver's score is ranked
//! against.

use std::io::{self, Write};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristic::{spacing, Allocation};
use crate::layout::{min_gap_sorted, partition, BracketSet, Instance, ObjectiveMode};
use crate::parallel::{map_indexed, Execution};

/// Relative tolerance for spacing comparisons at candidate values.
pub const REL_TOL: f64 = 1e-9;

pub const BRUTE_FORCE_MAX_FLOATING: usize = 12;
pub const BRUTE_FORCE_MAX_BRACKETS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimum_value: f64,
    pub optimal_allocation: Allocation,
    /// Feasibility tests (parametric search) or compositions (brute force)
    /// evaluated.
    pub candidates_examined: usize,
}

/// Largest number of points a bracket of length `area` can hold while keeping
/// spacing at least `v`: the largest `n` with `area >= v * (n + 1)`.
pub fn capacity(area: f64, v: f64) -> usize {
    if area.is_nan() || area <= 0.0 {
        return 0;
    }
    let fits = |slots: f64| area >= v * slots * (1.0 - REL_TOL);
    let mut slots = (area / v).floor();
    // Division can land one off either way at exact candidate values.
    if fits(slots + 1.0) {
        slots += 1.0;
    }
    while slots > 0.0 && !fits(slots) {
        slots -= 1.0;
    }
    if slots >= usize::MAX as f64 {
        return usize::MAX;
    }
    (slots as usize).saturating_sub(1)
}

/// Whether `num_floating` points fit with every used bracket keeping spacing
/// at least `v`.
pub fn feasible(bracket_set: &BracketSet, num_floating: usize, v: f64) -> Result<bool> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(format!(
            "spacing threshold must be positive and finite, got {v}"
        )));
    }
    Ok(feasible_unchecked(&bracket_set.areas(), num_floating, v))
}

fn feasible_unchecked(areas: &[f64], num_floating: usize, v: f64) -> bool {
    let mut total = 0usize;
    for &a in areas {
        total = total.saturating_add(capacity(a, v));
        if total >= num_floating {
            return true;
        }
    }
    total >= num_floating
}

fn check_solvable(areas: &[f64], num_floating: usize) -> Result<()> {
    if num_floating == 0 {
        return Err(Error::NothingToPlace);
    }
    if areas.iter().all(|&a| a.is_nan() || a <= 0.0) {
        return Err(Error::DegenerateInstance);
    }
    Ok(())
}

/// Exact optimum by binary search over the candidate spacings
/// `{A_m / (k + 1) : k = 1..=num_floating}`.
pub fn exact_optimum(instance: &Instance) -> Result<OracleResult> {
    exact_optimum_for(&partition(instance).areas(), instance.num_floating())
}

/// [`exact_optimum`] on bare bracket lengths.
pub fn exact_optimum_for(areas: &[f64], num_floating: usize) -> Result<OracleResult> {
    check_solvable(areas, num_floating)?;
    let mut candidates: Vec<f64> = areas
        .iter()
        .filter(|&&a| a > 0.0)
        .flat_map(|&a| (1..=num_floating).map(move |k| spacing(a, k)))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Feasibility is monotone: a prefix of the ascending candidates is feasible.
    // The optimum is always a candidate, so the prefix is nonempty.
    let mut examined = 0;
    let boundary = candidates.partition_point(|&v| {
        examined += 1;
        feasible_unchecked(areas, num_floating, v)
    });
    let best = candidates[boundary.max(1) - 1];

    let allocation = reconstruct(areas, num_floating, best);
    let value = allocation
        .min_spacing(areas)
        .expect("num_floating >= 1 gives a used bracket");
    debug_assert!(value >= best * (1.0 - REL_TOL));
    Ok(OracleResult {
        optimum_value: best,
        optimal_allocation: allocation,
        candidates_examined: examined,
    })
}

/// Fill every bracket to capacity at `v`, then remove surplus points from the
/// bracket whose spacing after removal is largest (lowest index on ties).
fn reconstruct(areas: &[f64], num_floating: usize, v: f64) -> Allocation {
    let mut counts: Vec<usize> = areas.iter().map(|&a| capacity(a, v)).collect();
    let mut total: usize = counts.iter().sum();
    while total > num_floating {
        let mut best: Option<(usize, f64)> = None;
        for (m, (&a, &n)) in areas.iter().zip(&counts).enumerate() {
            if n == 0 {
                continue;
            }
            let s = spacing(a, n - 1);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((m, s));
            }
        }
        let (m, _) = best.expect("surplus implies a used bracket");
        counts[m] -= 1;
        total -= 1;
    }
    Allocation::new(counts)
}

/// Exhaustive search over every way of splitting the points among brackets.
///
/// Limited to `num_floating <= 12` and at most 8 brackets.
pub fn brute_force_optimum(instance: &Instance) -> Result<OracleResult> {
    brute_force_optimum_for(&partition(instance).areas(), instance.num_floating())
}

pub fn brute_force_optimum_for(areas: &[f64], num_floating: usize) -> Result<OracleResult> {
    if num_floating > BRUTE_FORCE_MAX_FLOATING || areas.len() > BRUTE_FORCE_MAX_BRACKETS {
        return Err(Error::TooLarge(format!(
            "{num_floating} floating points in {} brackets exceeds {BRUTE_FORCE_MAX_FLOATING} points / {BRUTE_FORCE_MAX_BRACKETS} brackets",
            areas.len()
        )));
    }
    check_solvable(areas, num_floating)?;

    struct Search<'a> {
        areas: &'a [f64],
        counts: Vec<usize>,
        best: f64,
        best_counts: Vec<usize>,
        visited: usize,
    }

    impl Search<'_> {
        fn visit(&mut self, m: usize, remaining: usize) {
            if m + 1 == self.areas.len() {
                self.counts[m] = remaining;
                self.visited += 1;
                let value = self
                    .counts
                    .iter()
                    .zip(self.areas)
                    .filter(|(&n, _)| n > 0)
                    .map(|(&n, &a)| spacing(a, n))
                    .fold(f64::INFINITY, f64::min);
                if value > self.best {
                    self.best = value;
                    self.best_counts.clone_from(&self.counts);
                }
                return;
            }
            for n in 0..=remaining {
                self.counts[m] = n;
                self.visit(m + 1, remaining - n);
            }
        }
    }

    let mut search = Search {
        areas,
        counts: vec![0; areas.len()],
        best: f64::NEG_INFINITY,
        best_counts: vec![0; areas.len()],
        visited: 0,
    };
    search.visit(0, num_floating);
    Ok(OracleResult {
        optimum_value: search.best,
        optimal_allocation: Allocation::new(search.best_counts),
        candidates_examined: search.visited,
    })
}

/// Objectives of uniformly random placements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSample {
    pub objectives: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
}

/// Random generator for trial `trial` of a run seeded with `seed`. Each trial
/// gets its own ChaCha stream so results do not depend on execution order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Controllable-mode objective of `trials` placements drawn i.i.d. uniform on the
/// open interval.
pub fn random_baseline(instance: &Instance, trials: usize, seed: u64) -> Result<BaselineSample> {
    random_baseline_with(instance, trials, seed, Execution::default())
}

pub fn random_baseline_with(
    instance: &Instance,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<BaselineSample> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let nfl = instance.num_floating();
    if nfl == 0 {
        return Err(Error::NothingToPlace);
    }
    let lo = instance.boundary_lower().value();
    let hi = instance.boundary_upper().value();
    let walls = instance.walls();
    let dist = Uniform::new(lo, hi);

    let objectives = map_indexed(trials, exec, |k| {
        let mut rng = trial_rng(seed, k as u64);
        let mut positions: Vec<f64> = (0..nfl)
            .map(|_| loop {
                let p = dist.sample(&mut rng);
                if p > lo && p < hi {
                    break p;
                }
            })
            .collect();
        positions.sort_by(f64::total_cmp);
        min_gap_sorted(&walls, &positions, ObjectiveMode::Controllable)
    });
    Ok(BaselineSample {
        objectives,
        seed,
        trials,
    })
}

/// Fraction of the sample strictly below `value`.
pub fn quantile_of(value: f64, sample: &BaselineSample) -> f64 {
    if sample.objectives.is_empty() {
        return 0.0;
    }
    let below = sample.objectives.iter().filter(|&&o| o < value).count();
    below as f64 / sample.objectives.len() as f64
}

/// Empirical CDF: `(value, P[X <= value])` for each distinct value, ascending.
pub fn empirical_cdf(sample: &BaselineSample) -> Vec<(f64, f64)> {
    let mut sorted = sample.objectives.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = p,
            _ => out.push((v, p)),
        }
    }
    out
}

/// CSV with header `trial,objective`.
pub fn write_baseline_csv<W: Write>(sample: &BaselineSample, mut out: W) -> io::Result<()> {
    writeln!(out, "trial,objective")?;
    for (k, o) in sample.objectives.iter().enumerate() {
        writeln!(out, "{k},{o}")?;
    }
    out.flush()
}

/// CSV with header `value,cumulative_prob`, ascending by value.
pub fn write_cdf_csv<W: Write>(sample: &BaselineSample, mut out: W) -> io::Result<()> {
    writeln!(out, "value,cumulative_prob")?;
    for (v, p) in empirical_cdf(sample) {
        writeln!(out, "{v},{p}")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bs(walls: &[f64]) -> BracketSet {
        let n = walls.len();
        partition(
            &Instance::new(walls[0], walls[n - 1], walls[1..n - 1].iter().copied(), 0).unwrap(),
        )
    }

    #[test]
    fn feasibility_examples() {
        let b = bs(&[0.0, 250.0, 750.0, 1000.0]);
        assert!(!feasible(&b, 7, 100.0).unwrap());
        assert!(feasible(&b, 7, 250.0 / 3.0).unwrap());
        assert_eq!(capacity(250.0, 250.0 / 3.0), 2);
        assert_eq!(capacity(500.0, 250.0 / 3.0), 5);
        assert!(!feasible(&b, 1, 1000.0).unwrap());
        assert!(feasible(&b, 0, 1000.0).unwrap());
        assert!(feasible(&b, 7, 0.0).is_err());
        assert!(feasible(&b, 7, -1.0).is_err());
    }

    #[test]
    fn capacity_edges() {
        assert_eq!(capacity(0.0, 1.0), 0);
        assert_eq!(capacity(1.0, 2.0), 0);
        assert_eq!(capacity(2.0, 1.0), 1);
        assert_eq!(capacity(0.3, 0.1), 2);
    }

    #[test]
    fn exact_examples() {
        let inst = Instance::new(0.0, 1000.0, [], 3).unwrap();
        let r = exact_optimum(&inst).unwrap();
        assert_eq!(r.optimum_value, 250.0);
        assert_eq!(r.optimal_allocation.counts(), &[3]);

        let r = exact_optimum_for(&[100.0, 900.0], 1).unwrap();
        assert_eq!(r.optimum_value, 450.0);
        assert_eq!(r.optimal_allocation.counts(), &[0, 1]);

        let r = exact_optimum_for(&[250.0, 500.0, 250.0], 7).unwrap();
        assert_relative_eq!(r.optimum_value, 250.0 / 3.0, max_relative = 1e-12);
        assert_eq!(r.optimal_allocation.total(), 7);
        assert!(
            r.optimal_allocation
                .min_spacing(&[250.0, 500.0, 250.0])
                .unwrap()
                >= 250.0 / 3.0 - 1e-9
        );
    }

    #[test]
    fn exact_errors() {
        assert_eq!(
            exact_optimum_for(&[0.0, 0.0], 2),
            Err(Error::DegenerateInstance)
        );
        assert_eq!(exact_optimum_for(&[10.0], 0), Err(Error::NothingToPlace));
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_optimum_for(&[250.0, 500.0, 250.0], 7).unwrap();
        assert_relative_eq!(r.optimum_value, 250.0 / 3.0, max_relative = 1e-12);

        let r = brute_force_optimum_for(&[1000.0], 6).unwrap();
        assert_relative_eq!(r.optimum_value, 1000.0 / 7.0, max_relative = 1e-12);
        assert_eq!(r.candidates_examined, 1);

        let r = brute_force_optimum_for(&[500.0, 500.0], 2).unwrap();
        assert_eq!(r.optimum_value, 250.0);
        assert_eq!(r.optimal_allocation.counts(), &[1, 1]);
        assert_eq!(r.candidates_examined, 3);
    }

    #[test]
    fn brute_force_guard() {
        let err = brute_force_optimum_for(&[1.0; 3], 13).unwrap_err();
        assert!(matches!(err, Error::TooLarge(_)));
        assert!(brute_force_optimum_for(&[1.0; 9], 2).is_err());
    }

    #[test]
    fn baseline_single_point() {
        let inst = Instance::new(0.0, 1000.0, [], 1).unwrap();
        let s = random_baseline(&inst, 1, 7).unwrap();
        let p: f64 = Uniform::new(0.0, 1000.0).sample(&mut trial_rng(7, 0));
        assert_eq!(s.objectives, vec![p.min(1000.0 - p)]);
    }

    #[test]
    fn baseline_is_deterministic_and_order_independent() {
        let inst = Instance::new(0.0, 1000.0, [300.0, 310.0, 720.0], 6).unwrap();
        let a = random_baseline_with(&inst, 2000, 42, Execution::Sequential).unwrap();
        let b = random_baseline_with(&inst, 2000, 42, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = random_baseline_with(&inst, 500, 42, Execution::Sequential).unwrap();
        assert_eq!(&a.objectives[..500], &c.objectives[..]);
        let d = random_baseline_with(&inst, 500, 43, Execution::Sequential).unwrap();
        assert_ne!(c.objectives, d.objectives);
    }

    #[test]
    fn baseline_errors() {
        let inst = Instance::new(0.0, 1000.0, [], 1).unwrap();
        assert!(random_baseline(&inst, 0, 1).is_err());
        let inst = inst.with_num_floating(0);
        assert_eq!(random_baseline(&inst, 5, 1), Err(Error::NothingToPlace));
    }

    #[test]
    fn quantile_examples() {
        let s = BaselineSample {
            objectives: vec![10.0, 20.0, 30.0],
            seed: 0,
            trials: 3,
        };
        assert_eq!(quantile_of(31.0, &s), 1.0);
        assert_eq!(quantile_of(10.0, &s), 0.0);
        assert_eq!(quantile_of(20.0, &s), 1.0 / 3.0);
    }

    #[test]
    fn csv_exports() {
        let s = BaselineSample {
            objectives: vec![3.0, 1.5, 3.0, 2.0],
            seed: 0,
            trials: 4,
        };
        let mut buf = Vec::new();
        write_baseline_csv(&s, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "trial,objective\n0,3\n1,1.5\n2,3\n3,2\n"
        );
        let mut buf = Vec::new();
        write_cdf_csv(&s, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "value,cumulative_prob\n1.5,0.25\n2,0.5\n3,1\n"
        );
    }
}
