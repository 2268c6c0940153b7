//! Instances, the bracket partition and evaluation of the max-min objective.
//!
//! An [`Instance`] is an open interval of tracks with fixed bumps inside it and a
//! number of floating locations to place. Boundaries and bumps split the interval
//! into contiguous [`Bracket`]s; every solver in this crate works on that
//! partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A radial position measured in tracks. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TrackPosition(f64);

impl TrackPosition {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(TrackPosition(value))
        } else {
            Err(Error::invalid(format!(
                "track position must be finite, got {value}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TrackPosition {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        TrackPosition::new(value)
    }
}

impl From<TrackPosition> for f64 {
    fn from(p: TrackPosition) -> f64 {
        p.0
    }
}

/// Wire form of an [`Instance`], validated on conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceSpec {
    boundary_lower: f64,
    boundary_upper: f64,
    #[serde(default)]
    bumps: Vec<f64>,
    num_floating: usize,
}

/// A placement problem: boundaries, fixed bumps and the number of floating
/// locations to place.
///
/// Bumps are kept sorted and exact duplicates are merged. Every bump lies
/// strictly between the boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceSpec", into = "InstanceSpec")]
pub struct Instance {
    boundary_lower: TrackPosition,
    boundary_upper: TrackPosition,
    bumps: Vec<TrackPosition>,
    num_floating: usize,
}

impl Instance {
    pub fn new(
        boundary_lower: f64,
        boundary_upper: f64,
        bumps: impl IntoIterator<Item = f64>,
        num_floating: usize,
    ) -> Result<Self> {
        let lower = TrackPosition::new(boundary_lower)
            .map_err(|_| Error::invalid("boundary_lower must be finite"))?;
        let upper = TrackPosition::new(boundary_upper)
            .map_err(|_| Error::invalid("boundary_upper must be finite"))?;
        if lower.0 >= upper.0 {
            return Err(Error::invalid(format!(
                "boundary_lower < boundary_upper violated ({} >= {})",
                lower.0, upper.0
            )));
        }
        let mut bumps = bumps
            .into_iter()
            .map(|b| TrackPosition::new(b).map_err(|_| Error::invalid("every bump must be finite")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(b) = bumps.iter().find(|b| b.0 <= lower.0 || b.0 >= upper.0) {
            return Err(Error::invalid(format!(
                "every bump must satisfy boundary_lower < bump < boundary_upper, got {} outside ({}, {})",
                b.0, lower.0, upper.0
            )));
        }
        bumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        bumps.dedup();
        Ok(Instance {
            boundary_lower: lower,
            boundary_upper: upper,
            bumps,
            num_floating,
        })
    }

    pub fn boundary_lower(&self) -> TrackPosition {
        self.boundary_lower
    }

    pub fn boundary_upper(&self) -> TrackPosition {
        self.boundary_upper
    }

    /// Sorted, deduplicated bump positions.
    pub fn bumps(&self) -> &[TrackPosition] {
        &self.bumps
    }

    pub fn num_floating(&self) -> usize {
        self.num_floating
    }

    pub fn total_length(&self) -> f64 {
        self.boundary_upper.0 - self.boundary_lower.0
    }

    /// Same boundaries and bumps with a different number of points to place.
    pub fn with_num_floating(&self, num_floating: usize) -> Instance {
        Instance {
            num_floating,
            ..self.clone()
        }
    }

    /// Boundaries and bumps in ascending order.
    pub fn walls(&self) -> Vec<f64> {
        let mut walls = Vec::with_capacity(self.bumps.len() + 2);
        walls.push(self.boundary_lower.0);
        walls.extend(self.bumps.iter().map(|b| b.0));
        walls.push(self.boundary_upper.0);
        walls
    }
}

impl TryFrom<InstanceSpec> for Instance {
    type Error = Error;

    fn try_from(spec: InstanceSpec) -> Result<Self> {
        Instance::new(
            spec.boundary_lower,
            spec.boundary_upper,
            spec.bumps,
            spec.num_floating,
        )
    }
}

impl From<Instance> for InstanceSpec {
    fn from(instance: Instance) -> Self {
        InstanceSpec {
            boundary_lower: instance.boundary_lower.0,
            boundary_upper: instance.boundary_upper.0,
            bumps: instance.bumps.iter().map(|b| b.0).collect(),
            num_floating: instance.num_floating,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallKind {
    Boundary,
    Bump,
}

/// A subinterval between two consecutive walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower_wall: TrackPosition,
    pub upper_wall: TrackPosition,
    pub lower_kind: WallKind,
    pub upper_kind: WallKind,
}

impl Bracket {
    #[inline]
    pub fn area(&self) -> f64 {
        self.upper_wall.0 - self.lower_wall.0
    }
}

/// Contiguous brackets covering `[boundary_lower, boundary_upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketSet {
    brackets: Vec<Bracket>,
    total_length: f64,
}

impl BracketSet {
    pub fn brackets(&self) -> &[Bracket] {
        &self.brackets
    }

    pub fn len(&self) -> usize {
        self.brackets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.brackets.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn areas(&self) -> Vec<f64> {
        self.brackets.iter().map(Bracket::area).collect()
    }
}

/// Split the instance interval at every bump. Yields `bumps + 1` brackets.
pub fn partition(instance: &Instance) -> BracketSet {
    let walls = instance.walls();
    let last = walls.len() - 2;
    let brackets = walls
        .windows(2)
        .enumerate()
        .map(|(i, w)| Bracket {
            lower_wall: TrackPosition(w[0]),
            upper_wall: TrackPosition(w[1]),
            lower_kind: if i == 0 {
                WallKind::Boundary
            } else {
                WallKind::Bump
            },
            upper_kind: if i == last {
                WallKind::Boundary
            } else {
                WallKind::Bump
            },
        })
        .collect();
    BracketSet {
        brackets,
        total_length: instance.total_length(),
    }
}

/// Which pairs of points enter the minimum distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Only pairs with at least one floating point.
    #[default]
    Controllable,
    /// Every pair of points of interest, including bump-bump and bump-boundary.
    Strict,
}

/// Final floating positions with the objective under both modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub positions: Vec<TrackPosition>,
    pub objective_controllable: f64,
    pub objective_strict: f64,
}

impl Placement {
    pub fn from_positions(instance: &Instance, positions: Vec<TrackPosition>) -> Result<Self> {
        let values: Vec<f64> = positions.iter().map(|p| p.0).collect();
        let objective_controllable =
            evaluate_objective_raw(instance, &values, ObjectiveMode::Controllable)?;
        let objective_strict = evaluate_objective_raw(instance, &values, ObjectiveMode::Strict)?;
        Ok(Placement {
            positions,
            objective_controllable,
            objective_strict,
        })
    }

    pub fn objective(&self, mode: ObjectiveMode) -> f64 {
        match mode {
            ObjectiveMode::Controllable => self.objective_controllable,
            ObjectiveMode::Strict => self.objective_strict,
        }
    }
}

/// Minimum pairwise distance of a placement.
///
/// Positions must lie strictly inside the boundaries and there must be exactly
/// `num_floating` of them.
pub fn evaluate_objective(
    instance: &Instance,
    positions: &[TrackPosition],
    mode: ObjectiveMode,
) -> Result<f64> {
    let values: Vec<f64> = positions.iter().map(|p| p.0).collect();
    evaluate_objective_raw(instance, &values, mode)
}

pub(crate) fn evaluate_objective_raw(
    instance: &Instance,
    positions: &[f64],
    mode: ObjectiveMode,
) -> Result<f64> {
    if positions.len() != instance.num_floating {
        return Err(Error::invalid(format!(
            "expected {} positions (num_floating), got {}",
            instance.num_floating,
            positions.len()
        )));
    }
    let (lo, hi) = (instance.boundary_lower.0, instance.boundary_upper.0);
    if let Some(p) = positions.iter().find(|&&p| !(p > lo && p < hi)) {
        return Err(Error::invalid(format!(
            "position {p} is not strictly inside ({lo}, {hi})"
        )));
    }
    if mode == ObjectiveMode::Controllable && positions.is_empty() {
        return Err(Error::NothingToPlace);
    }
    let mut sorted = positions.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(min_gap_sorted(&instance.walls(), &sorted, mode))
}

/// Smallest gap between neighbours in the merged sequence of `walls` and
/// `floating` (both ascending). In controllable mode only gaps touching a
/// floating point count; the nearest neighbour of any point is adjacent to it in
/// sorted order, so adjacent gaps suffice.
pub(crate) fn min_gap_sorted(walls: &[f64], floating: &[f64], mode: ObjectiveMode) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut prev: Option<(f64, bool)> = None;
    let mut best = f64::INFINITY;
    while i < walls.len() || j < floating.len() {
        let take_floating = j < floating.len() && (i >= walls.len() || floating[j] < walls[i]);
        let cur = if take_floating {
            j += 1;
            (floating[j - 1], true)
        } else {
            i += 1;
            (walls[i - 1], false)
        };
        if let Some((p, p_floating)) = prev {
            if mode == ObjectiveMode::Strict || p_floating || cur.1 {
                best = best.min(cur.0 - p);
            }
        }
        prev = Some(cur);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(v: &[f64]) -> Vec<TrackPosition> {
        v.iter().map(|&x| TrackPosition::new(x).unwrap()).collect()
    }

    #[test]
    fn partition_two_bumps() {
        let inst = Instance::new(0.0, 1000.0, [250.0, 750.0], 0).unwrap();
        let bs = partition(&inst);
        assert_eq!(bs.areas(), vec![250.0, 500.0, 250.0]);
        assert_eq!(bs.brackets()[0].lower_kind, WallKind::Boundary);
        assert_eq!(bs.brackets()[0].upper_kind, WallKind::Bump);
        assert_eq!(bs.brackets()[2].upper_kind, WallKind::Boundary);
    }

    #[test]
    fn partition_no_bumps() {
        let inst = Instance::new(0.0, 1000.0, [], 3).unwrap();
        let bs = partition(&inst);
        assert_eq!(bs.len(), 1);
        assert_eq!(bs.areas(), vec![1000.0]);
        assert_eq!(bs.brackets()[0].upper_kind, WallKind::Boundary);
    }

    #[test]
    fn duplicate_bumps_are_merged() {
        let inst = Instance::new(0.0, 1000.0, [500.0, 500.0], 1).unwrap();
        assert_eq!(inst.bumps().len(), 1);
        assert_eq!(partition(&inst).areas(), vec![500.0, 500.0]);
    }

    #[test]
    fn close_bumps_are_kept() {
        let inst = Instance::new(0.0, 1000.0, [500.0, 500.001], 1).unwrap();
        assert_eq!(partition(&inst).len(), 3);
    }

    #[test]
    fn rejects_bad_instances() {
        let err = Instance::new(10.0, 10.0, [], 1).unwrap_err();
        assert!(err.to_string().contains("boundary_lower < boundary_upper"));
        let err = Instance::new(0.0, 10.0, [10.0], 1).unwrap_err();
        assert!(err
            .to_string()
            .contains("boundary_lower < bump < boundary_upper"));
        assert!(Instance::new(0.0, f64::NAN, [], 1).is_err());
        assert!(Instance::new(0.0, 10.0, [f64::INFINITY], 1).is_err());
    }

    #[test]
    fn instance_json_roundtrip_and_validation() {
        let inst: Instance = serde_json::from_str(
            r#"{"boundary_lower": 0, "boundary_upper": 1000, "bumps": [750, 250], "num_floating": 7}"#,
        )
        .unwrap();
        assert_eq!(inst.bumps(), pos(&[250.0, 750.0]).as_slice());
        let back: Instance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);

        let err = serde_json::from_str::<Instance>(
            r#"{"boundary_lower": 0, "boundary_upper": 100, "bumps": [150], "num_floating": 1}"#,
        )
        .unwrap_err();
        assert!(err
            .to_string()
            .contains("boundary_lower < bump < boundary_upper"));
    }

    #[test]
    fn objective_symmetric_midpoints() {
        let inst = Instance::new(0.0, 1000.0, [500.0], 2).unwrap();
        let p = pos(&[250.0, 750.0]);
        assert_eq!(
            evaluate_objective(&inst, &p, ObjectiveMode::Controllable).unwrap(),
            250.0
        );
        assert_eq!(
            evaluate_objective(&inst, &p, ObjectiveMode::Strict).unwrap(),
            250.0
        );
    }

    #[test]
    fn strict_mode_sees_fixed_pairs() {
        let inst = Instance::new(0.0, 1000.0, [100.0, 120.0], 1).unwrap();
        let p = pos(&[560.0]);
        assert_eq!(
            evaluate_objective(&inst, &p, ObjectiveMode::Controllable).unwrap(),
            440.0
        );
        assert_eq!(
            evaluate_objective(&inst, &p, ObjectiveMode::Strict).unwrap(),
            20.0
        );
    }

    #[test]
    fn objective_errors() {
        let inst = Instance::new(0.0, 1000.0, [], 0).unwrap();
        assert_eq!(
            evaluate_objective(&inst, &[], ObjectiveMode::Controllable),
            Err(Error::NothingToPlace)
        );
        assert_eq!(
            evaluate_objective(&inst, &[], ObjectiveMode::Strict).unwrap(),
            1000.0
        );

        let inst = Instance::new(0.0, 1000.0, [], 1).unwrap();
        assert!(evaluate_objective(&inst, &pos(&[0.0]), ObjectiveMode::Controllable).is_err());
        assert!(evaluate_objective(&inst, &pos(&[1.0, 2.0]), ObjectiveMode::Controllable).is_err());
    }

    #[test]
    fn unsorted_positions_are_accepted() {
        let inst = Instance::new(0.0, 100.0, [50.0], 3).unwrap();
        let a = evaluate_objective(
            &inst,
            &pos(&[80.0, 10.0, 30.0]),
            ObjectiveMode::Controllable,
        );
        assert_eq!(a.unwrap(), 10.0);
    }
}
