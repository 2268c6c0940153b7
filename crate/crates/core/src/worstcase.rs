//! Worst-case spacing over all bump configurations.
//!
//! For `M = bumps + 1` brackets the smallest achievable optimum over every
//! placement of the bumps is `Ls / (NFLs + 2M - 1)`. The bound is attained by
//! `M - 1` brackets of width `2v` (each holds one point at spacing `v`) plus one
//! bracket of width `(NFLs + 1) v` holding the remaining points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{Instance, TrackPosition};
use crate::oracle::exact_optimum_for;
use crate::parallel::{map_indexed, Execution};

/// Upper limit on exact-optimum evaluations in a grid sweep.
pub const MAX_GRID_EVALUATIONS: u128 = 10_000_000;

fn check_args(total_length: f64, num_floating: usize) -> Result<()> {
    if !(total_length.is_finite() && total_length > 0.0) {
        return Err(Error::invalid(format!(
            "total length must be positive and finite, got {total_length}"
        )));
    }
    if num_floating == 0 {
        return Err(Error::NothingToPlace);
    }
    Ok(())
}

/// `Ls / (NFLs + 2M - 1)` with `M = num_bumps + 1`.
pub fn worst_case_value(total_length: f64, num_floating: usize, num_bumps: usize) -> Result<f64> {
    check_args(total_length, num_floating)?;
    let brackets = num_bumps + 1;
    Ok(total_length / (num_floating + 2 * brackets - 1) as f64)
}

/// Instance on `(0, total_length)` whose exact optimum equals
/// [`worst_case_value`]. Small brackets come first.
pub fn adversarial_instance(
    total_length: f64,
    num_floating: usize,
    num_bumps: usize,
) -> Result<Instance> {
    let v = worst_case_value(total_length, num_floating, num_bumps)?;
    if num_bumps == 0 {
        return Err(Error::invalid(
            "adversarial instance needs at least one bump",
        ));
    }
    let bumps = (1..=num_bumps).map(|i| 2.0 * v * i as f64);
    Instance::new(0.0, total_length, bumps, num_floating)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseReport {
    pub formula_value: f64,
    pub verified_min: f64,
    pub argmin_bumps: Vec<TrackPosition>,
    /// Grid step, `Ls / grid_points`.
    pub grid_resolution: f64,
}

impl WorstCaseReport {
    /// Grid minimum is no lower than the formula, up to one grid step.
    pub fn bound_holds(&self) -> bool {
        self.verified_min >= self.formula_value - self.grid_resolution
    }

    /// Grid minimum lies within one grid step of the formula.
    pub fn within_resolution(&self) -> bool {
        (self.verified_min - self.formula_value).abs() <= self.grid_resolution
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Minimum exact optimum over all strictly increasing bump tuples on the grid
/// `{i * Ls / grid_points : 0 < i < grid_points}`.
pub fn verify_worst_case(
    total_length: f64,
    num_floating: usize,
    num_bumps: usize,
    grid_points: usize,
) -> Result<WorstCaseReport> {
    verify_worst_case_with(
        total_length,
        num_floating,
        num_bumps,
        grid_points,
        Execution::default(),
    )
}

pub fn verify_worst_case_with(
    total_length: f64,
    num_floating: usize,
    num_bumps: usize,
    grid_points: usize,
    exec: Execution,
) -> Result<WorstCaseReport> {
    let formula_value = worst_case_value(total_length, num_floating, num_bumps)?;
    if grid_points < 2 {
        return Err(Error::invalid("grid needs at least 2 points"));
    }
    let interior = grid_points - 1;
    let evaluations = binomial(interior as u128, num_bumps as u128);
    if evaluations > MAX_GRID_EVALUATIONS {
        return Err(Error::TooLarge(format!(
            "{evaluations} grid evaluations exceed the limit of {MAX_GRID_EVALUATIONS}"
        )));
    }
    if evaluations == 0 {
        return Err(Error::invalid(format!(
            "grid of {grid_points} points cannot hold {num_bumps} distinct bumps"
        )));
    }
    let step = total_length / grid_points as f64;
    let coord = |i: usize| i as f64 * step;

    let best = if num_bumps == 0 {
        let r = exact_optimum_for(&[total_length], num_floating)?;
        (r.optimum_value, Vec::new())
    } else {
        // Parallel over the first bump index; the rest enumerated in order.
        let partial = map_indexed(interior, exec, |first| {
            let mut tuple = vec![first + 1];
            let mut best: Option<(f64, Vec<usize>)> = None;
            sweep(
                &mut tuple,
                num_bumps,
                interior,
                &coord,
                total_length,
                num_floating,
                &mut best,
            );
            best
        });
        partial
            .into_iter()
            .flatten()
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
            .map(|(v, t)| (v, t.into_iter().map(coord).collect()))
            .expect("at least one grid tuple")
    };

    Ok(WorstCaseReport {
        formula_value,
        verified_min: best.0,
        argmin_bumps: best
            .1
            .into_iter()
            .map(|b| TrackPosition::new(b).expect("finite grid coordinate"))
            .collect(),
        grid_resolution: step,
    })
}

fn sweep(
    tuple: &mut Vec<usize>,
    num_bumps: usize,
    interior: usize,
    coord: &impl Fn(usize) -> f64,
    total_length: f64,
    num_floating: usize,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    if tuple.len() == num_bumps {
        let mut areas = Vec::with_capacity(num_bumps + 1);
        let mut prev = 0.0;
        for &i in tuple.iter() {
            let c = coord(i);
            areas.push(c - prev);
            prev = c;
        }
        areas.push(total_length - prev);
        let v = exact_optimum_for(&areas, num_floating)
            .expect("grid brackets have positive area")
            .optimum_value;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            *best = Some((v, tuple.clone()));
        }
        return;
    }
    let start = tuple.last().copied().unwrap_or(0) + 1;
    for next in start..=interior {
        tuple.push(next);
        sweep(
            tuple,
            num_bumps,
            interior,
            coord,
            total_length,
            num_floating,
            best,
        );
        tuple.pop();
    }
}
