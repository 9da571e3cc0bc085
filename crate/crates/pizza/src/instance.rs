//! Problem inputs: `2n` labeled point sets with validation, odd-size padding
//! and post-solve repair.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::arrangement::{is_bisecting, point_labels, Arrangement};
use crate::geometry::{
    orient, perp, region_label, sweep_first_hit, Anchor, Orientation, OrientedLine, Point,
    PointRef, Rational, RegionLabel, Resolver, Turn,
};

/// `2n` labeled point sets in the plane.
///
/// A family is *valid* when the set count is even and at least 2, all points
/// of the union are pairwise distinct, and no three points of the union are
/// collinear. Solvers require validity; construction does not enforce it, use
/// [`PointFamily::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFamily {
    sets: Vec<Vec<Point>>,
    labels: Vec<String>,
}

impl Resolver for PointFamily {
    fn point(&self, r: PointRef) -> &Point {
        &self.sets[r.set][r.index]
    }
}

impl PointFamily {
    /// Build a family with default labels `P1, P2, ...`.
    pub fn new(sets: Vec<Vec<Point>>) -> Self {
        let labels = (1..=sets.len()).map(|i| format!("P{i}")).collect();
        PointFamily { sets, labels }
    }

    /// Build a family with explicit labels; lengths must match.
    pub fn with_labels(sets: Vec<Vec<Point>>, labels: Vec<String>) -> Self {
        assert_eq!(sets.len(), labels.len(), "one label per set");
        PointFamily { sets, labels }
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    /// Number of lines a solution must have, `set_count / 2`.
    pub fn line_count(&self) -> usize {
        self.sets.len() / 2
    }

    pub fn set(&self, i: usize) -> &[Point] {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[Vec<Point>] {
        &self.sets
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn total_points(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// All points with their references, in set order then input order.
    pub fn points(&self) -> impl Iterator<Item = (PointRef, &Point)> {
        self.sets.iter().enumerate().flat_map(|(s, pts)| {
            pts.iter()
                .enumerate()
                .map(move |(i, p)| (PointRef::new(s, i), p))
        })
    }

    /// Replace the point behind `r`; used by the homotopy interpolation.
    pub(crate) fn set_point(&mut self, r: PointRef, p: Point) {
        self.sets[r.set][r.index] = p;
    }

    pub(crate) fn push_point(&mut self, set: usize, p: Point) {
        self.sets[set].push(p);
    }

    /// Check every family invariant and report all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.sets.len() < 2 || self.sets.len() % 2 != 0 {
            violations.push(Violation::BadSetCount {
                count: self.sets.len(),
            });
        }
        let all: Vec<(PointRef, &Point)> = self.points().collect();
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                if all[i].1 == all[j].1 {
                    violations.push(Violation::DuplicatePoint {
                        first: all[i].0,
                        second: all[j].0,
                    });
                }
            }
        }
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                for k in (j + 1)..all.len() {
                    if orient(all[i].1, all[j].1, all[k].1) == Orientation::Collinear {
                        violations.push(Violation::CollinearTriple {
                            a: all[i].0,
                            b: all[j].0,
                            c: all[k].0,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Axis-aligned bounding box of the union, `None` for an empty family.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut pts = self.points().map(|(_, p)| p);
        let first = pts.next()?;
        let (mut minx, mut maxx) = (first.x.clone(), first.x.clone());
        let (mut miny, mut maxy) = (first.y.clone(), first.y.clone());
        for p in pts {
            if p.x < minx {
                minx = p.x.clone();
            }
            if p.x > maxx {
                maxx = p.x.clone();
            }
            if p.y < miny {
                miny = p.y.clone();
            }
            if p.y > maxy {
                maxy = p.y.clone();
            }
        }
        Some((Point::new(minx, miny), Point::new(maxx, maxy)))
    }
}

/// Outcome of [`PointFamily::validate`]; empty means the family is accepted
/// by every other module.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The set count must be even and at least 2.
    BadSetCount { count: usize },
    DuplicatePoint { first: PointRef, second: PointRef },
    CollinearTriple { a: PointRef, b: PointRef, c: PointRef },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadSetCount { count } => {
                write!(f, "set count must be even and >= 2, got {count}")
            }
            Violation::DuplicatePoint { first, second } => write!(
                f,
                "duplicate point: ({},{}) and ({},{})",
                first.set, first.index, second.set, second.index
            ),
            Violation::CollinearTriple { a, b, c } => write!(
                f,
                "collinear triple: ({},{}) ({},{}) ({},{})",
                a.set, a.index, b.set, b.index, c.set, c.index
            ),
        }
    }
}

/// Which points `pad_to_odd` appended, as (set index, point) pairs.
///
/// Added points always sit at the end of their set, so deleting them
/// recovers the original family exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PaddingRecord {
    pub added: Vec<(usize, Point)>,
}

impl PaddingRecord {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
    }
}

/// Give every even-size set one extra point so all sets have odd size.
///
/// New points are placed far outside the bounding box of the union (beyond
/// twice its extent) on a convex arc, and checked against every point pair so
/// the padded family stays in general position. Requires a valid family.
pub fn pad_to_odd(family: &PointFamily) -> (PointFamily, PaddingRecord) {
    let mut padded = family.clone();
    let mut record = PaddingRecord::default();
    let needs: Vec<usize> = (0..family.set_count())
        .filter(|&i| family.set(i).len() % 2 == 0)
        .collect();
    if needs.is_empty() {
        return (padded, record);
    }
    let (base_x, base_y) = match family.bounding_box() {
        Some((lo, hi)) => {
            let dia = {
                let dx = &hi.x - &lo.x;
                let dy = &hi.y - &lo.y;
                let d = if dx > dy { dx } else { dy };
                if d > Rational::one() {
                    d
                } else {
                    Rational::one()
                }
            };
            let two = crate::geometry::rat_int(2);
            (&hi.x + &two * &dia + Rational::one(), &hi.y + &two * &dia + Rational::one())
        }
        None => (Rational::one(), Rational::one()),
    };
    // Candidates walk up a parabola shifted past the bounding box; points on
    // a strictly convex curve are never mutually collinear, so only
    // collinearity with pairs of existing points needs rejection.
    let mut step: i64 = 0;
    for &set in &needs {
        let point = loop {
            let t = crate::geometry::rat_int(step);
            step += 1;
            let candidate = Point::new(&base_x + &t, &base_y + &t * &t);
            if placement_is_generic(&padded, &candidate) {
                break candidate;
            }
        };
        padded.push_point(set, point.clone());
        record.added.push((set, point));
    }
    (padded, record)
}

fn placement_is_generic(family: &PointFamily, candidate: &Point) -> bool {
    let pts: Vec<&Point> = family.points().map(|(_, p)| p).collect();
    if pts.iter().any(|p| *p == candidate) {
        return false;
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if orient(pts[i], pts[j], candidate) == Orientation::Collinear {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Error)]
pub enum RepairError {
    #[error("arrangement does not bisect the padded family")]
    NotBisecting,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Turn an arrangement bisecting the padded family into one bisecting the
/// original family.
///
/// Removing an added point that sat on a line changes no side count, but the
/// line loses its defining point: the anchor is replaced by a free point at
/// the same coordinates. Removing an added point that sat strictly inside a
/// region leaves its set one point short there: the line through the set's
/// surviving representative is rotated slightly around its other anchor so
/// that exactly the representative's side assignment changes, which restores
/// the balance. The rotation stops strictly before the first original point
/// in its way, so no other point changes region; the rotated line is
/// anchored at the pivot and a synthesized rational point.
pub fn repair_after_padding(
    family: &PointFamily,
    record: &PaddingRecord,
    arr: &Arrangement,
) -> Result<Arrangement, RepairError> {
    let mut padded = family.clone();
    for (set, p) in &record.added {
        padded.push_point(*set, p.clone());
    }
    if !is_bisecting(&padded, arr) {
        return Err(RepairError::NotBisecting);
    }
    if record.added.is_empty() {
        return Ok(arr.clone());
    }

    let labels = point_labels(&padded, arr);
    let mut lines: Vec<OrientedLine> = arr.lines().to_vec();

    // Added points sitting on a line anchor that line; keep the geometry and
    // drop the reference. Added points strictly inside a region queue a
    // rotation of their set's representative line, keyed by line index.
    let mut releases: BTreeMap<usize, Vec<(PointRef, RegionLabel)>> = BTreeMap::new();
    for (set, q) in &record.added {
        let qref = PointRef::new(*set, family.set(*set).len());
        match labels[qref.set][qref.index] {
            RegionLabel::Boundary => {
                let mut replaced = false;
                for line in &mut lines {
                    if line.a.as_ref() == Some(qref) {
                        line.a = Anchor::Free(q.clone());
                        replaced = true;
                    }
                    if line.b.as_ref() == Some(qref) {
                        line.b = Anchor::Free(q.clone());
                        replaced = true;
                    }
                }
                if !replaced {
                    return Err(RepairError::Internal(
                        "on-line added point anchors no line".into(),
                    ));
                }
            }
            region => {
                let (line_idx, rep) = arr
                    .lines()
                    .iter()
                    .enumerate()
                    .find_map(|(i, l)| {
                        [l.a.as_ref(), l.b.as_ref()]
                            .into_iter()
                            .flatten()
                            .find(|r| r.set == *set)
                            .map(|r| (i, r))
                    })
                    .ok_or_else(|| {
                        RepairError::Internal("padded set has no representative anchor".into())
                    })?;
                releases.entry(line_idx).or_default().push((rep, region));
            }
        }
    }

    for (line_idx, rels) in releases {
        let line = lines[line_idx].clone();
        let (a_pos, b_pos) = {
            let (a, b) = line.resolve(&padded);
            (a.clone(), b.clone())
        };
        let old_dir = Point::new(&b_pos.x - &a_pos.x, &b_pos.y - &a_pos.y);
        let flag = line.positive_left;

        // Pivot candidates: the surviving anchor for a single release, or
        // synthesized points on the line when both anchors are released.
        let pivots: Vec<Anchor> = match rels.len() {
            1 => {
                let released = rels[0].0;
                let keep = if line.a.as_ref() == Some(released) {
                    line.b.clone()
                } else {
                    line.a.clone()
                };
                vec![keep]
            }
            2 => {
                let p1 = padded.point(rels[0].0);
                let p2 = padded.point(rels[1].0);
                let midpoint = Point::new(
                    (&p1.x + &p2.x) / crate::geometry::rat_int(2),
                    (&p1.y + &p2.y) / crate::geometry::rat_int(2),
                );
                let beyond = Point::new(
                    &p2.x + (&p2.x - &p1.x),
                    &p2.y + (&p2.y - &p1.y),
                );
                vec![Anchor::Free(midpoint), Anchor::Free(beyond)]
            }
            _ => {
                return Err(RepairError::Internal(
                    "more than two releases on one line".into(),
                ))
            }
        };

        let mut committed = false;
        'outer: for pivot_anchor in pivots {
            let pivot_pos = match &pivot_anchor {
                Anchor::Ref(r) => padded.point(*r).clone(),
                Anchor::Free(p) => p.clone(),
            };
            for turn in [Turn::Ccw, Turn::Cw] {
                // Original points strictly off the old line bound the sweep.
                let obstacles = family.points().filter(|(_, p)| {
                    orient(&a_pos, &b_pos, p) != Orientation::Collinear
                });
                let new_dir = match sweep_first_hit(&pivot_pos, &old_dir, turn, obstacles) {
                    Some((hit_ref, flipped)) => {
                        let hp = family.point(hit_ref);
                        let v = if flipped {
                            Point::new(&pivot_pos.x - &hp.x, &pivot_pos.y - &hp.y)
                        } else {
                            Point::new(&hp.x - &pivot_pos.x, &hp.y - &pivot_pos.y)
                        };
                        Point::new(&old_dir.x + &v.x, &old_dir.y + &v.y)
                    }
                    None => {
                        let p = perp(&old_dir, turn);
                        Point::new(&old_dir.x + &p.x, &old_dir.y + &p.y)
                    }
                };
                let candidate_line = OrientedLine {
                    a: pivot_anchor.clone(),
                    b: Anchor::Free(Point::new(
                        &pivot_pos.x + &new_dir.x,
                        &pivot_pos.y + &new_dir.y,
                    )),
                    positive_left: flag,
                };
                let mut candidate = lines.clone();
                candidate[line_idx] = candidate_line;
                let all_land = rels.iter().all(|(released, needed)| {
                    region_label(family, &candidate, family.point(*released)) == *needed
                });
                if all_land {
                    lines = candidate;
                    committed = true;
                    break 'outer;
                }
            }
        }
        if !committed {
            return Err(RepairError::Internal(
                "no rotation restores the released points".into(),
            ));
        }
    }

    let repaired = Arrangement::new(lines).canonicalized();
    if !is_bisecting(family, &repaired) {
        return Err(RepairError::Internal(
            "repaired arrangement does not bisect the original family".into(),
        ));
    }
    Ok(repaired)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;

    fn fam(sets: Vec<Vec<(i64, i64)>>) -> PointFamily {
        PointFamily::new(
            sets.into_iter()
                .map(|s| s.into_iter().map(|(x, y)| Point::from_ints(x, y)).collect())
                .collect(),
        )
    }

    #[test]
    fn validate_accepts_two_singletons() {
        let f = fam(vec![vec![(0, 0)], vec![(1, 1)]]);
        assert!(f.is_valid());
    }

    #[test]
    fn validate_reports_collinear_triple() {
        let f = fam(vec![vec![(0, 0), (1, 1)], vec![(2, 2)]]);
        let report = f.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CollinearTriple { .. })));
    }

    #[test]
    fn validate_rejects_odd_set_count() {
        let f = fam(vec![vec![(0, 0)], vec![(1, 1)], vec![(2, 3)]]);
        let report = f.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::BadSetCount { count: 3 })));
    }

    #[test]
    fn validate_reports_duplicates_across_sets() {
        let f = fam(vec![vec![(0, 0)], vec![(0, 0)]]);
        let report = f.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DuplicatePoint { .. })));
    }

    #[test]
    fn pad_identity_on_all_odd() {
        let f = fam(vec![vec![(0, 0)], vec![(1, 2)]]);
        let (padded, record) = pad_to_odd(&f);
        assert_eq!(padded, f);
        assert!(record.is_empty());
    }

    #[test]
    fn pad_adds_one_point_per_even_set() {
        let f = fam(vec![vec![(0, 0), (1, 0)], vec![(3, 5)]]);
        let (padded, record) = pad_to_odd(&f);
        assert_eq!(record.added.len(), 1);
        assert_eq!(padded.set(0).len(), 3);
        assert_eq!(padded.set(1).len(), 1);
        assert!(padded.is_valid());
    }

    #[test]
    fn pad_output_is_valid_and_recoverable() {
        let f = fam(vec![
            vec![(0, 0), (4, 1), (1, 3), (2, 7)],
            vec![(5, 5), (6, 2)],
            vec![(-3, 2)],
            vec![(-1, -4), (2, -2)],
        ]);
        assert!(f.is_valid());
        let (padded, record) = pad_to_odd(&f);
        assert!(padded.is_valid());
        for i in 0..padded.set_count() {
            assert_eq!(padded.set(i).len() % 2, 1);
        }
        // Deleting the added points recovers the original family.
        let mut stripped = padded.clone();
        for (set, p) in record.added.iter().rev() {
            let popped = stripped.sets[*set].pop().unwrap();
            assert_eq!(&popped, p);
        }
        assert_eq!(stripped, f);
    }

    #[test]
    fn padded_points_land_outside_the_bounding_box() {
        let f = fam(vec![vec![(0, 0), (10, 10)], vec![(5, 1)]]);
        let (_, record) = pad_to_odd(&f);
        for (_, p) in &record.added {
            assert!(p.x > rat(10, 1));
            assert!(p.y > rat(10, 1));
        }
    }
}
