//! Well-separated families and per-pair cuts with prescribed counts.
//!
//! In the plane, a family is well-separated when the convex hulls of its
//! sets are pairwise disjoint. For such families a line through one point of
//! each set in a pair can realize any prescribed split of the remaining
//! points, and the per-pair cuts assemble into an arrangement hitting
//! prescribed parity-region counts after an orientation-parity correction.

use thiserror::Error;

use crate::arrangement::{balance, Arrangement};
use crate::geometry::{orient, Anchor, Orientation, OrientedLine, Point, PointRef};
use crate::instance::PointFamily;

/// Per-set target counts for the positive parity region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaVector {
    pub k: Vec<usize>,
}

impl AlphaVector {
    pub fn new(k: Vec<usize>) -> Self {
        AlphaVector { k }
    }

    /// Bisection targets `⌊|P_i|/2⌋` for a family.
    pub fn bisection(family: &PointFamily) -> Self {
        AlphaVector {
            k: (0..family.set_count())
                .map(|s| family.set(s).len() / 2)
                .collect(),
        }
    }
}

#[derive(Debug, Error)]
pub enum AlphaError {
    #[error("family is not valid: {0}")]
    InvalidFamily(String),
    #[error("sets {a} and {b} have intersecting convex hulls")]
    NotWellSeparated { a: usize, b: usize },
    #[error("alpha vector has {got} entries, family has {want} sets")]
    WrongLength { got: usize, want: usize },
    #[error(
        "k[{set}] = {k} out of range: the cut passes through one point of the set, \
         so at most {max} points can sit on the positive side"
    )]
    KOutOfRange { set: usize, k: usize, max: usize },
    #[error("no line through sets {a} and {b} achieves the requested counts")]
    NoCut { a: usize, b: usize },
    #[error("the cut for pair ({a}, {b}) crosses the hull of foreign set {foreign}")]
    ForeignCrossing { a: usize, b: usize, foreign: usize },
    #[error("assembled arrangement missed its target on set {set}: wanted {want}, got {got}")]
    TargetMissed { set: usize, want: usize, got: usize },
}

/// Convex hull in counterclockwise order (Andrew's monotone chain), exact.
/// Degenerate hulls come back as a single point or a two-point segment.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p)
                != Orientation::Counterclockwise
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p)
                != Orientation::Counterclockwise
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    // Assumes a, b, p collinear.
    let (minx, maxx) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (miny, maxy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    minx <= &p.x && &p.x <= maxx && miny <= &p.y && &p.y <= maxy
}

fn segments_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = orient(c, d, a).sign();
    let d2 = orient(c, d, b).sign();
    let d3 = orient(a, b, c).sign();
    let d4 = orient(a, b, d).sign();
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(c, d, a))
        || (d2 == 0 && on_segment(c, d, b))
        || (d3 == 0 && on_segment(a, b, c))
        || (d4 == 0 && on_segment(a, b, d))
}

/// Point containment in a hull as produced by [`convex_hull`], boundary
/// inclusive.
fn hull_contains(hull: &[Point], p: &Point) -> bool {
    match hull.len() {
        0 => false,
        1 => &hull[0] == p,
        2 => orient(&hull[0], &hull[1], p) == Orientation::Collinear && on_segment(&hull[0], &hull[1], p),
        _ => (0..hull.len()).all(|i| {
            let j = (i + 1) % hull.len();
            orient(&hull[i], &hull[j], p) != Orientation::Clockwise
        }),
    }
}

fn hull_edges(hull: &[Point]) -> Vec<(&Point, &Point)> {
    match hull.len() {
        0 | 1 => Vec::new(),
        2 => vec![(&hull[0], &hull[1])],
        _ => (0..hull.len())
            .map(|i| (&hull[i], &hull[(i + 1) % hull.len()]))
            .collect(),
    }
}

/// Exact convex hull intersection test, touching counts as intersecting.
pub fn hulls_intersect(a: &[Point], b: &[Point]) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    if a.iter().any(|p| hull_contains(b, p)) || b.iter().any(|p| hull_contains(a, p)) {
        return true;
    }
    for (p, q) in hull_edges(a) {
        for (r, s) in hull_edges(b) {
            if segments_intersect(p, q, r, s) {
                return true;
            }
        }
    }
    false
}

/// True iff the convex hulls of all pairs of sets are disjoint.
pub fn is_well_separated(family: &PointFamily) -> bool {
    let hulls: Vec<Vec<Point>> = (0..family.set_count())
        .map(|s| convex_hull(family.set(s)))
        .collect();
    for i in 0..hulls.len() {
        for j in (i + 1)..hulls.len() {
            if hulls_intersect(&hulls[i], &hulls[j]) {
                return false;
            }
        }
    }
    true
}

/// A cut through one point of each set in a pair: indices into the two sets
/// plus the orientation bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCut {
    pub p_index: usize,
    pub q_index: usize,
    pub positive_left: bool,
}

fn count_strict_left(a: &Point, b: &Point, pts: &[Point], skip: usize) -> usize {
    pts.iter()
        .enumerate()
        .filter(|&(i, p)| i != skip && orient(a, b, p) == Orientation::Counterclockwise)
        .count()
}

/// The unique line through one point of `p_set` and one of `q_set` with
/// exactly `kp` and `kq` points strictly on its positive side.
///
/// Requires disjoint hulls and `k < size` for both sets: the anchor point
/// counts to neither side.
pub fn alpha_hs_pair(
    p_set: &[Point],
    q_set: &[Point],
    kp: usize,
    kq: usize,
) -> Result<PairCut, AlphaError> {
    if hulls_intersect(&convex_hull(p_set), &convex_hull(q_set)) {
        return Err(AlphaError::NotWellSeparated { a: 0, b: 1 });
    }
    if kp >= p_set.len() {
        return Err(AlphaError::KOutOfRange {
            set: 0,
            k: kp,
            max: p_set.len() - 1,
        });
    }
    if kq >= q_set.len() {
        return Err(AlphaError::KOutOfRange {
            set: 1,
            k: kq,
            max: q_set.len() - 1,
        });
    }
    // Off-center targets are realized by two distinct unoriented lines (the
    // central Ham-Sandwich targets by exactly one); the scan order makes the
    // returned cut deterministic.
    for (i, a) in p_set.iter().enumerate() {
        for (j, b) in q_set.iter().enumerate() {
            let left_p = count_strict_left(a, b, p_set, i);
            let left_q = count_strict_left(a, b, q_set, j);
            for positive_left in [true, false] {
                let (cp, cq) = if positive_left {
                    (left_p, left_q)
                } else {
                    (p_set.len() - 1 - left_p, q_set.len() - 1 - left_q)
                };
                if (cp, cq) == (kp, kq) {
                    return Ok(PairCut {
                        p_index: i,
                        q_index: j,
                        positive_left,
                    });
                }
            }
        }
    }
    Err(AlphaError::NoCut { a: 0, b: 1 })
}

/// The side of a whole set relative to an oriented candidate line; `None`
/// when the set is split or touches the line.
fn uniform_side(a: &Point, b: &Point, positive_left: bool, pts: &[Point]) -> Option<bool> {
    let mut side: Option<bool> = None;
    for p in pts {
        let s = match orient(a, b, p) {
            Orientation::Collinear => return None,
            Orientation::Counterclockwise => positive_left,
            Orientation::Clockwise => !positive_left,
        };
        match side {
            None => side = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    side
}

/// Build an arrangement with exactly `k_i` points of every set in the
/// positive parity region.
///
/// Sets are paired in label order `(1,2), (3,4), ...`. Placeholder lines
/// through the pairs fix which side of each cut every foreign hull lies on;
/// the per-pair targets are then corrected by the parity of foreign positive
/// sides before searching each pair's cut. The assembled arrangement is
/// re-verified against the requested counts before it is returned.
pub fn alpha_pizza_cut(
    family: &PointFamily,
    alpha: &AlphaVector,
) -> Result<Arrangement, AlphaError> {
    let report = family.validate();
    if !report.is_valid() {
        return Err(AlphaError::InvalidFamily(
            report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    if alpha.k.len() != family.set_count() {
        return Err(AlphaError::WrongLength {
            got: alpha.k.len(),
            want: family.set_count(),
        });
    }
    let hulls: Vec<Vec<Point>> = (0..family.set_count())
        .map(|s| convex_hull(family.set(s)))
        .collect();
    for i in 0..hulls.len() {
        for j in (i + 1)..hulls.len() {
            if hulls_intersect(&hulls[i], &hulls[j]) {
                return Err(AlphaError::NotWellSeparated { a: i, b: j });
            }
        }
    }
    for (s, &k) in alpha.k.iter().enumerate() {
        if k >= family.set(s).len() {
            return Err(AlphaError::KOutOfRange {
                set: s,
                k,
                max: family.set(s).len() - 1,
            });
        }
    }

    let n = family.line_count();
    let pair_sets: Vec<(usize, usize)> = (0..n).map(|i| (2 * i, 2 * i + 1)).collect();

    // Placeholder lines pin the side every foreign hull takes; well-separated
    // inputs keep those sides stable when the placeholders move to the final
    // cuts, and the final verification catches inputs that do not.
    let mut foreign_positive = vec![vec![false; n]; family.set_count()];
    for (i, &(a, b)) in pair_sets.iter().enumerate() {
        let pa = &family.set(a)[0];
        let pb = &family.set(b)[0];
        for s in 0..family.set_count() {
            if s == a || s == b {
                continue;
            }
            match uniform_side(pa, pb, true, family.set(s)) {
                Some(side) => foreign_positive[s][i] = side,
                None => {
                    return Err(AlphaError::ForeignCrossing {
                        a,
                        b,
                        foreign: s,
                    })
                }
            }
        }
    }

    // Per-set own-pair targets after the foreign-parity correction. For a
    // fixed unoriented line set the only achievable global count vectors are
    // the aligned one and its complement (flipping any single orientation
    // bit complements every set's count), so solving for the lexicographic
    // minimum of the target vector and its complement makes the line set
    // canonical; one final bit flip then restores the requested counts.
    let targets: Vec<usize> = (0..family.set_count())
        .map(|set| {
            let own = set / 2;
            let parity: usize = (0..n)
                .filter(|&l| l != own && foreign_positive[set][l])
                .count();
            if parity % 2 == 1 {
                alpha.k[set]
            } else {
                family.set(set).len() - 1 - alpha.k[set]
            }
        })
        .collect();
    let complements: Vec<usize> = targets
        .iter()
        .enumerate()
        .map(|(s, &t)| family.set(s).len() - 1 - t)
        .collect();
    let (solve_for, flip_after) = if targets <= complements {
        (targets, false)
    } else {
        (complements, true)
    };

    let mut lines = Vec::with_capacity(n);
    for (i, &(sa, sb)) in pair_sets.iter().enumerate() {
        let (ta, tb) = (solve_for[sa], solve_for[sb]);
        let p_set = family.set(sa);
        let q_set = family.set(sb);
        let reference = (0..family.set_count()).find(|&s| s != sa && s != sb);

        let mut chosen: Option<OrientedLine> = None;
        'search: for (pi, a) in p_set.iter().enumerate() {
            for (qi, b) in q_set.iter().enumerate() {
                let orientations: Vec<bool> = match reference {
                    // Align with the placeholder via any one foreign hull;
                    // with a single pair there is nothing to align against.
                    Some(j0) => match uniform_side(a, b, true, family.set(j0)) {
                        Some(side) => vec![side == foreign_positive[j0][i]],
                        None => continue,
                    },
                    None => vec![true, false],
                };
                for positive_left in orientations {
                    let left_p = count_strict_left(a, b, p_set, pi);
                    let left_q = count_strict_left(a, b, q_set, qi);
                    let (cp, cq) = if positive_left {
                        (left_p, left_q)
                    } else {
                        (p_set.len() - 1 - left_p, q_set.len() - 1 - left_q)
                    };
                    if (cp, cq) != (ta, tb) {
                        continue;
                    }
                    // All foreign hulls must keep their placeholder sides.
                    for s in 0..family.set_count() {
                        if s == sa || s == sb {
                            continue;
                        }
                        match uniform_side(a, b, positive_left, family.set(s)) {
                            Some(side) if side == foreign_positive[s][i] => {}
                            _ => {
                                return Err(AlphaError::ForeignCrossing {
                                    a: sa,
                                    b: sb,
                                    foreign: s,
                                })
                            }
                        }
                    }
                    chosen = Some(OrientedLine {
                        a: Anchor::Ref(PointRef::new(sa, pi)),
                        b: Anchor::Ref(PointRef::new(sb, qi)),
                        positive_left,
                    });
                    break 'search;
                }
            }
        }
        lines.push(chosen.ok_or(AlphaError::NoCut { a: sa, b: sb })?);
    }

    if flip_after {
        lines[0].positive_left = !lines[0].positive_left;
    }
    let arr = Arrangement::new(lines);
    let got = balance(family, &arr);
    for (s, b) in got.sets.iter().enumerate() {
        if b.plus != alpha.k[s] {
            return Err(AlphaError::TargetMissed {
                set: s,
                want: alpha.k[s],
                got: b.plus,
            });
        }
    }
    Ok(arr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::is_bisecting;
    use crate::geometry::rat;
    use crate::samples;

    fn fam(sets: Vec<Vec<(i64, i64)>>) -> PointFamily {
        PointFamily::new(
            sets.into_iter()
                .map(|s| s.into_iter().map(|(x, y)| Point::from_ints(x, y)).collect())
                .collect(),
        )
    }

    #[test]
    fn singletons_are_well_separated() {
        let f = fam(vec![vec![(0, 0)], vec![(1, 1)], vec![(5, 2)], vec![(3, 9)]]);
        assert!(is_well_separated(&f));
    }

    #[test]
    fn containment_is_detected() {
        // A singleton inside a triangle: hulls intersect.
        let f = PointFamily::new(vec![
            vec![
                Point::from_ints(-1, 0),
                Point::from_ints(1, 0),
                Point::from_ints(0, 1),
            ],
            vec![Point::new(rat(0, 1), rat(1, 3))],
        ]);
        assert!(!is_well_separated(&f));
    }

    #[test]
    fn crossing_hulls_are_detected() {
        let f = fam(vec![
            vec![(0, 0), (4, 4), (0, 4)],
            vec![(1, 2), (5, 3), (5, 8)],
        ]);
        assert!(!is_well_separated(&f));
    }

    #[test]
    fn clusters_are_well_separated() {
        let mut r = samples::rng(11);
        let f = samples::random_separated_family(&mut r, 6, &[1, 3, 5]);
        assert!(is_well_separated(&f));
    }

    #[test]
    fn pair_cut_for_singletons_is_the_joining_line() {
        let p = vec![Point::from_ints(0, 0)];
        let q = vec![Point::from_ints(3, 1)];
        let cut = alpha_hs_pair(&p, &q, 0, 0).unwrap();
        assert_eq!((cut.p_index, cut.q_index), (0, 0));
    }

    #[test]
    fn pair_cut_matches_the_unique_ham_sandwich_cut() {
        let p = vec![
            Point::from_ints(0, 0),
            Point::from_ints(2, 1),
            Point::from_ints(1, 3),
        ];
        let q = vec![
            Point::from_ints(10, 0),
            Point::from_ints(12, 2),
            Point::from_ints(11, 5),
        ];
        let cut = alpha_hs_pair(&p, &q, 1, 1).unwrap();
        // The two-set family has exactly one bisecting arrangement; its line
        // must use the same anchors.
        let f = PointFamily::new(vec![p, q]);
        let only = crate::brute::enumerate_bisections(&f).unwrap().remove(0);
        let expected = Arrangement::from_ref_pairs(&[(
            PointRef::new(0, cut.p_index),
            PointRef::new(1, cut.q_index),
        )]);
        assert_eq!(only, expected);
    }

    #[test]
    fn pair_cut_k_zero_puts_all_points_negative() {
        let p = vec![
            Point::from_ints(0, 0),
            Point::from_ints(2, 1),
            Point::from_ints(1, 3),
        ];
        let q = vec![Point::from_ints(9, 4)];
        let cut = alpha_hs_pair(&p, &q, 0, 0).unwrap();
        let a = &p[cut.p_index];
        let b = &q[cut.q_index];
        let on_positive = p
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != cut.p_index)
            .filter(|(_, pt)| {
                let o = orient(a, b, pt);
                (o == Orientation::Counterclockwise) == cut.positive_left
            })
            .count();
        assert_eq!(on_positive, 0);
    }

    #[test]
    fn pair_cut_rejects_intersecting_hulls() {
        let p = vec![
            Point::from_ints(-1, 0),
            Point::from_ints(1, 0),
            Point::from_ints(0, 3),
        ];
        let q = vec![Point::from_ints(0, 1)];
        assert!(matches!(
            alpha_hs_pair(&p, &q, 1, 0),
            Err(AlphaError::NotWellSeparated { .. })
        ));
    }

    #[test]
    fn pair_cut_multiplicity_by_exhaustion() {
        // Central targets have a unique unoriented cut; every other target
        // pair is realized by exactly two unoriented lines (the same cut
        // seen from its two closed-count descriptions), and always by at
        // least one.
        let p = vec![
            Point::from_ints(0, 0),
            Point::from_ints(3, 1),
            Point::from_ints(1, 4),
            Point::from_ints(4, 5),
            Point::from_ints(2, 8),
        ];
        let q = vec![
            Point::from_ints(20, 0),
            Point::from_ints(23, 2),
            Point::from_ints(21, 5),
        ];
        for kp in 0..p.len() {
            for kq in 0..q.len() {
                let mut matches = Vec::new();
                for (i, a) in p.iter().enumerate() {
                    for (j, b) in q.iter().enumerate() {
                        for positive_left in [true, false] {
                            let lp = count_strict_left(a, b, &p, i);
                            let lq = count_strict_left(a, b, &q, j);
                            let (cp, cq) = if positive_left {
                                (lp, lq)
                            } else {
                                (p.len() - 1 - lp, q.len() - 1 - lq)
                            };
                            if (cp, cq) == (kp, kq) {
                                matches.push((i, j));
                            }
                        }
                    }
                }
                matches.sort();
                matches.dedup();
                let central = 2 * kp + 1 == p.len() && 2 * kq + 1 == q.len();
                if central {
                    assert_eq!(matches.len(), 1, "kp={kp} kq={kq}: {matches:?}");
                } else {
                    assert_eq!(matches.len(), 2, "kp={kp} kq={kq}: {matches:?}");
                }
            }
        }
    }

    #[test]
    fn alpha_cut_bisection_targets_bisect() {
        let mut r = samples::rng(21);
        let f = samples::random_separated_family(&mut r, 4, &[1, 3, 5]);
        let arr = alpha_pizza_cut(&f, &AlphaVector::bisection(&f)).unwrap();
        assert!(is_bisecting(&f, &arr));
    }

    #[test]
    fn alpha_cut_four_singletons_zero_targets() {
        let f = fam(vec![vec![(0, 0)], vec![(10, 1)], vec![(3, 20)], vec![(13, 24)]]);
        let arr = alpha_pizza_cut(&f, &AlphaVector::new(vec![0, 0, 0, 0])).unwrap();
        let report = balance(&f, &arr);
        for b in &report.sets {
            assert_eq!((b.plus, b.minus, b.on), (0, 0, 1));
        }
    }

    #[test]
    fn alpha_cut_hits_random_targets_exactly() {
        use rand::Rng;
        for seed in 0..5 {
            let mut r = samples::rng(100 + seed);
            let f = samples::random_separated_family(&mut r, 6, &[1, 3, 5]);
            let k: Vec<usize> = (0..f.set_count())
                .map(|s| r.gen_range(0..f.set(s).len()))
                .collect();
            let arr = alpha_pizza_cut(&f, &AlphaVector::new(k.clone())).unwrap();
            let report = balance(&f, &arr);
            for (s, b) in report.sets.iter().enumerate() {
                assert_eq!(b.plus, k[s], "seed {seed} set {s}");
            }
        }
    }

    #[test]
    fn alpha_cut_complement_gives_same_unoriented_arrangement() {
        let mut r = samples::rng(77);
        let f = samples::random_separated_family(&mut r, 4, &[3, 5]);
        let k: Vec<usize> = (0..f.set_count()).map(|s| f.set(s).len() / 3).collect();
        let complement: Vec<usize> = k
            .iter()
            .enumerate()
            .map(|(s, &v)| f.set(s).len() - 1 - v)
            .collect();
        let a = alpha_pizza_cut(&f, &AlphaVector::new(k)).unwrap();
        let b = alpha_pizza_cut(&f, &AlphaVector::new(complement)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alpha_cut_flags_full_set_target() {
        let f = fam(vec![vec![(0, 0)], vec![(10, 1)]]);
        assert!(matches!(
            alpha_pizza_cut(&f, &AlphaVector::new(vec![1, 0])),
            Err(AlphaError::KOutOfRange { set: 0, k: 1, .. })
        ));
    }

    #[test]
    fn alpha_cut_rejects_non_separated_families() {
        let f = PointFamily::new(vec![
            vec![
                Point::from_ints(-1, 0),
                Point::from_ints(1, 0),
                Point::from_ints(0, 3),
            ],
            vec![Point::from_ints(0, 1)],
        ]);
        assert!(matches!(
            alpha_pizza_cut(&f, &AlphaVector::new(vec![1, 0])),
            Err(AlphaError::NotWellSeparated { .. })
        ));
    }
}
