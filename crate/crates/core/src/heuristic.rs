//! Bracket-allocation heuristic.
//!
//! The pipeline is: partition the interval into brackets, compute the real-valued
//! allocation that equalises spacing across all brackets, drop brackets whose
//! share is below one point, round the rest, then move single points between
//! brackets until the total matches, and finally space the points evenly inside
//! each bracket.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{partition, BracketSet, Instance, Placement, TrackPosition};

/// Spacing between neighbours when `count` points are spread evenly over a
/// bracket of length `area`.
#[inline]
pub fn spacing(area: f64, count: usize) -> f64 {
    area / (count as f64 + 1.0)
}

/// Integer number of floating points per bracket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    counts: Vec<usize>,
}

impl Allocation {
    pub fn new(counts: Vec<usize>) -> Self {
        Allocation { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Smallest spacing over brackets that hold at least one point, or `None`
    /// if the allocation is empty.
    pub fn min_spacing(&self, areas: &[f64]) -> Option<f64> {
        self.counts
            .iter()
            .zip(areas)
            .filter(|(&n, _)| n > 0)
            .map(|(&n, &a)| spacing(a, n))
            .min_by(f64::total_cmp)
    }
}

/// Real-valued allocation before integerisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAllocation {
    pub values: Vec<f64>,
}

impl RawAllocation {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Allocation that gives every bracket the same spacing `Ls / (NFLs + M)`.
///
/// Values may be negative for small brackets; they always sum to `num_floating`.
pub fn initial_allocation_raw(
    bracket_set: &BracketSet,
    num_floating: usize,
) -> Result<RawAllocation> {
    if bracket_set.is_empty() {
        return Err(Error::invalid("bracket set is empty"));
    }
    let total = bracket_set.total_length();
    if total <= 0.0 {
        return Err(Error::DegenerateBoundary);
    }
    let scale = (num_floating + bracket_set.len()) as f64 / total;
    let values = bracket_set
        .brackets()
        .iter()
        .map(|b| scale * b.area() - 1.0)
        .collect();
    Ok(RawAllocation { values })
}

/// Zero every bracket whose raw share is below one point and round the rest
/// half-up.
pub fn eliminate_and_round(raw: &RawAllocation) -> Allocation {
    let counts = raw
        .values
        .iter()
        .map(|&v| {
            if v < 1.0 {
                0
            } else {
                (v + 0.5).floor() as usize
            }
        })
        .collect();
    Allocation { counts }
}

/// Move one point at a time until the allocation holds exactly `num_floating`.
///
/// When short, the bracket with the largest spacing after receiving a point
/// gains one (every bracket is eligible, including eliminated ones). When over,
/// the used bracket with the smallest current spacing loses one. Ties go to the
/// lowest index.
pub fn adjust(
    allocation: &Allocation,
    bracket_set: &BracketSet,
    num_floating: usize,
) -> Allocation {
    assert_eq!(
        allocation.len(),
        bracket_set.len(),
        "allocation must have one count per bracket"
    );
    let areas = bracket_set.areas();
    let mut counts = allocation.counts.clone();
    let mut total: usize = counts.iter().sum();

    while total < num_floating {
        let target = argbest(
            &areas,
            &counts,
            |_| true,
            |a, n| spacing(a, n + 1),
            |x, y| x > y,
        );
        // Bracket set is nonempty, so some index always qualifies.
        let m = target.expect("nonempty bracket set");
        counts[m] += 1;
        total += 1;
    }
    while total > num_floating {
        let target = argbest(&areas, &counts, |n| n >= 1, spacing, |x, y| x < y);
        let m = target.expect("total > 0 implies a used bracket");
        counts[m] -= 1;
        total -= 1;
    }
    Allocation { counts }
}

/// Index of the first bracket whose score is strictly better than all earlier
/// candidates.
fn argbest(
    areas: &[f64],
    counts: &[usize],
    eligible: impl Fn(usize) -> bool,
    score: impl Fn(f64, usize) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (m, (&a, &n)) in areas.iter().zip(counts).enumerate() {
        if !eligible(n) {
            continue;
        }
        let s = score(a, n);
        match best {
            Some((_, b)) if !better(s, b) => {}
            _ => best = Some((m, s)),
        }
    }
    best.map(|(m, _)| m)
}

/// Spread each bracket's points evenly between its walls, ascending overall.
pub fn place(bracket_set: &BracketSet, allocation: &Allocation) -> Vec<TrackPosition> {
    let mut out = Vec::with_capacity(allocation.total());
    for (bracket, &n) in bracket_set.brackets().iter().zip(&allocation.counts) {
        let step = spacing(bracket.area(), n);
        let lower = bracket.lower_wall.value();
        out.extend((1..=n).map(|k| {
            TrackPosition::new(lower + k as f64 * step).expect("finite walls give finite positions")
        }));
    }
    out
}

/// Every intermediate stage of one heuristic run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRun {
    pub brackets: BracketSet,
    pub raw: RawAllocation,
    pub initial: Allocation,
    pub allocation: Allocation,
    /// Number of single-point moves made by [`adjust`].
    pub adjustments: usize,
    pub placement: Placement,
}

/// Run the full heuristic and keep the intermediate allocations.
pub fn optimize_detailed(instance: &Instance) -> Result<HeuristicRun> {
    let nfl = instance.num_floating();
    if nfl == 0 {
        return Err(Error::NothingToPlace);
    }
    let brackets = partition(instance);
    if brackets.brackets().iter().all(|b| b.area() <= 0.0) {
        return Err(Error::DegenerateInstance);
    }
    let raw = initial_allocation_raw(&brackets, nfl)?;
    let initial = eliminate_and_round(&raw);
    let allocation = adjust(&initial, &brackets, nfl);
    let adjustments = initial.total().abs_diff(nfl);
    let positions = place(&brackets, &allocation);
    let placement = Placement::from_positions(instance, positions)?;
    Ok(HeuristicRun {
        brackets,
        raw,
        initial,
        allocation,
        adjustments,
        placement,
    })
}

/// Heuristic placement for `instance`.
pub fn optimize(instance: &Instance) -> Result<Placement> {
    optimize_detailed(instance).map(|run| run.placement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brackets(walls: &[f64]) -> BracketSet {
        let n = walls.len();
        let inst =
            Instance::new(walls[0], walls[n - 1], walls[1..n - 1].iter().copied(), 0).unwrap();
        partition(&inst)
    }

    #[test]
    fn spacing_values() {
        assert_eq!(spacing(500.0, 4), 100.0);
        assert_eq!(spacing(250.0, 0), 250.0);
        assert_eq!(spacing(0.0, 3), 0.0);
    }

    #[test]
    fn raw_allocation_examples() {
        let bs = brackets(&[0.0, 250.0, 750.0, 1000.0]);
        let raw = initial_allocation_raw(&bs, 7).unwrap();
        assert_eq!(raw.values, vec![1.5, 4.0, 1.5]);
        assert_eq!(raw.sum(), 7.0);

        let raw = initial_allocation_raw(&brackets(&[0.0, 1000.0]), 6).unwrap();
        assert_eq!(raw.values, vec![6.0]);

        let raw = initial_allocation_raw(&brackets(&[0.0, 500.0, 1000.0]), 0).unwrap();
        assert_eq!(raw.values, vec![0.0, 0.0]);
    }

    #[test]
    fn eliminate_examples() {
        let r = |v: &[f64]| eliminate_and_round(&RawAllocation { values: v.to_vec() });
        assert_eq!(r(&[1.5, 4.0, 1.5]).counts(), &[2, 4, 2]);
        assert_eq!(r(&[1.5, 4.0, 1.5]).total(), 8);
        assert_eq!(r(&[0.7, 5.3]).counts(), &[0, 5]);
        assert_eq!(r(&[6.0]).counts(), &[6]);
        assert_eq!(r(&[-0.4, 0.99, 1.0, 2.49]).counts(), &[0, 0, 1, 2]);
    }

    #[test]
    fn adjust_decrements_lowest_index_on_tie() {
        let bs = brackets(&[0.0, 250.0, 750.0, 1000.0]);
        let out = adjust(&Allocation::new(vec![2, 4, 2]), &bs, 7);
        assert_eq!(out.counts(), &[1, 4, 2]);
    }

    #[test]
    fn adjust_increments_largest_spacing() {
        let bs = brackets(&[0.0, 100.0, 1000.0]);
        let out = adjust(&Allocation::new(vec![0, 5]), &bs, 6);
        assert_eq!(out.counts(), &[0, 6]);
    }

    #[test]
    fn adjust_revives_eliminated_bracket() {
        // Bracket 0 starts eliminated and wins the tie at spacing 50.
        let bs = brackets(&[0.0, 100.0, 1000.0]);
        let out = adjust(&Allocation::new(vec![0, 0]), &bs, 19);
        assert_eq!(out.counts(), &[1, 18]);
    }

    #[test]
    fn adjust_noop_and_zero() {
        let bs = brackets(&[0.0, 1000.0]);
        assert_eq!(adjust(&Allocation::new(vec![3]), &bs, 3).counts(), &[3]);
        assert_eq!(adjust(&Allocation::new(vec![3]), &bs, 0).counts(), &[0]);
    }

    #[test]
    fn place_examples() {
        let bs = brackets(&[250.0, 750.0]);
        let p: Vec<f64> = place(&bs, &Allocation::new(vec![4]))
            .iter()
            .map(|p| p.value())
            .collect();
        assert_eq!(p, vec![350.0, 450.0, 550.0, 650.0]);

        let bs = brackets(&[0.0, 1000.0]);
        let p = place(&bs, &Allocation::new(vec![1]));
        assert_eq!(p[0].value(), 500.0);

        let bs = brackets(&[0.0, 250.0, 750.0, 1000.0]);
        let p: Vec<f64> = place(&bs, &Allocation::new(vec![1, 4, 2]))
            .iter()
            .map(|p| p.value())
            .collect();
        let expect = [
            125.0,
            350.0,
            450.0,
            550.0,
            650.0,
            2500.0 / 3.0,
            2750.0 / 3.0,
        ];
        for (a, b) in p.iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn optimize_without_bumps() {
        let inst = Instance::new(0.0, 1000.0, [], 6).unwrap();
        let pl = optimize(&inst).unwrap();
        for (k, p) in pl.positions.iter().enumerate() {
            assert_relative_eq!(
                p.value(),
                1000.0 / 7.0 * (k + 1) as f64,
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(
            pl.objective_controllable,
            1000.0 / 7.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn optimize_two_bumps() {
        let inst = Instance::new(0.0, 1000.0, [250.0, 750.0], 7).unwrap();
        let run = optimize_detailed(&inst).unwrap();
        assert_eq!(run.initial.counts(), &[2, 4, 2]);
        assert_eq!(run.allocation.counts(), &[1, 4, 2]);
        assert_eq!(run.adjustments, 1);
        assert_relative_eq!(
            run.placement.objective_controllable,
            250.0 / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn optimize_nothing_to_place() {
        let inst = Instance::new(0.0, 1000.0, [500.0], 0).unwrap();
        assert_eq!(optimize(&inst), Err(Error::NothingToPlace));
    }
}
