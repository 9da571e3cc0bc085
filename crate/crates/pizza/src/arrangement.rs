//! The matching-based arrangement representation and the bisection
//! predicates, including the almost-bisecting predicate used at degenerate
//! configurations.

use std::hash::{Hash, Hasher};

use crate::geometry::{region_label, Anchor, OrientedLine, PointRef, RegionLabel};
use crate::instance::PointFamily;

/// One of the two parity classes of an arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Plus,
    Minus,
}

impl Region {
    pub fn label(self) -> RegionLabel {
        match self {
            Region::Plus => RegionLabel::RPlus,
            Region::Minus => RegionLabel::RMinus,
        }
    }

    pub fn other(self) -> Region {
        match self {
            Region::Plus => Region::Minus,
            Region::Minus => Region::Plus,
        }
    }
}

/// An arrangement of `n` oriented lines anchored at instance points.
///
/// Arrangements are value objects keyed by the unordered set of unordered
/// anchor pairs: two arrangements are equal iff those sets are equal,
/// ignoring orientation bits, since reorienting lines only swaps the two
/// parity regions.
#[derive(Clone, Debug)]
pub struct Arrangement {
    lines: Vec<OrientedLine>,
}

impl Arrangement {
    pub fn new(lines: Vec<OrientedLine>) -> Self {
        Arrangement { lines }
    }

    /// Lines through the given instance point pairs, canonically oriented.
    pub fn from_ref_pairs(pairs: &[(PointRef, PointRef)]) -> Self {
        Arrangement::new(
            pairs
                .iter()
                .map(|&(a, b)| OrientedLine::through_refs(a, b))
                .collect(),
        )
        .canonicalized()
    }

    pub fn lines(&self) -> &[OrientedLine] {
        &self.lines
    }

    pub fn lines_mut(&mut self) -> &mut Vec<OrientedLine> {
        &mut self.lines
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Identity of the arrangement: anchor pairs, each ordered, sorted.
    pub fn key(&self) -> ArrangementKey {
        let mut pairs: Vec<(Anchor, Anchor)> = self
            .lines
            .iter()
            .map(|l| {
                if l.a <= l.b {
                    (l.a.clone(), l.b.clone())
                } else {
                    (l.b.clone(), l.a.clone())
                }
            })
            .collect();
        pairs.sort();
        ArrangementKey(pairs)
    }

    /// Canonical form: anchors ordered within each line (adjusting the bit so
    /// the geometric positive side is unchanged), lines sorted, and the bits
    /// globally flipped if needed so the smallest anchor pair has
    /// `positive_left = true`.
    pub fn canonicalized(&self) -> Arrangement {
        let mut lines: Vec<OrientedLine> = self
            .lines
            .iter()
            .map(|l| {
                if l.a <= l.b {
                    l.clone()
                } else {
                    // Swapping the anchor order mirrors "left of a -> b".
                    OrientedLine {
                        a: l.b.clone(),
                        b: l.a.clone(),
                        positive_left: !l.positive_left,
                    }
                }
            })
            .collect();
        lines.sort_by(|l, r| (&l.a, &l.b).cmp(&(&r.a, &r.b)));
        if let Some(first) = lines.first() {
            if !first.positive_left {
                // A global reorientation at most swaps the two regions.
                for line in &mut lines {
                    line.positive_left = !line.positive_left;
                }
            }
        }
        Arrangement { lines }
    }

    /// The anchor referencing a point of `set`, if any.
    pub fn anchor_ref_in_set(&self, set: usize) -> Option<PointRef> {
        self.lines.iter().flat_map(|l| [&l.a, &l.b]).find_map(|a| {
            a.as_ref().filter(|r| r.set == set)
        })
    }
}

impl PartialEq for Arrangement {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Arrangement {}

impl Hash for Arrangement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

/// Hashable identity of an arrangement (anchor pairs only).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrangementKey(Vec<(Anchor, Anchor)>);

/// Per-set side counts of a family against an arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub sets: Vec<SetBalance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetBalance {
    pub plus: usize,
    pub minus: usize,
    pub on: usize,
}

impl SetBalance {
    pub fn total(&self) -> usize {
        self.plus + self.minus + self.on
    }

    /// Exactly `⌊size/2⌋` points in each region.
    pub fn is_exact_bisection(&self) -> bool {
        let half = self.total() / 2;
        self.plus == half && self.minus == half
    }
}

/// Region label of every point of the family, in set order.
pub fn point_labels(family: &PointFamily, arr: &Arrangement) -> Vec<Vec<RegionLabel>> {
    (0..family.set_count())
        .map(|s| {
            family
                .set(s)
                .iter()
                .map(|p| region_label(family, arr.lines(), p))
                .collect()
        })
        .collect()
}

/// Count, per set, the points in each parity region and on the lines.
pub fn balance(family: &PointFamily, arr: &Arrangement) -> BalanceReport {
    let sets = point_labels(family, arr)
        .into_iter()
        .map(|labels| {
            let mut b = SetBalance {
                plus: 0,
                minus: 0,
                on: 0,
            };
            for label in labels {
                match label {
                    RegionLabel::RPlus => b.plus += 1,
                    RegionLabel::RMinus => b.minus += 1,
                    RegionLabel::Boundary => b.on += 1,
                }
            }
            b
        })
        .collect();
    BalanceReport { sets }
}

/// True iff every set has exactly `⌊|P_i|/2⌋` points in each parity region.
pub fn is_bisecting(family: &PointFamily, arr: &Arrangement) -> bool {
    balance(family, arr)
        .sets
        .iter()
        .all(SetBalance::is_exact_bisection)
}

/// A degenerate-configuration arrangement that bisects every set except one,
/// which has two points on lines and a one-point imbalance off them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlmostBisecting {
    /// The doubly-hit set.
    pub set: usize,
    /// The region with one point too few among the doubly-hit set's off-line
    /// points.
    pub deficient: Region,
}

/// Check the almost-bisecting predicate; `Some` identifies the doubly-hit
/// set and its deficient region.
pub fn is_almost_bisecting(family: &PointFamily, arr: &Arrangement) -> Option<AlmostBisecting> {
    let report = balance(family, arr);
    let mut found: Option<AlmostBisecting> = None;
    for (i, b) in report.sets.iter().enumerate() {
        if b.is_exact_bisection() {
            continue;
        }
        let deficient = if b.on == 2 && b.plus + 1 == b.minus {
            Region::Plus
        } else if b.on == 2 && b.minus + 1 == b.plus {
            Region::Minus
        } else {
            return None;
        };
        if found.is_some() {
            // Two imbalanced sets: not almost bisecting.
            return None;
        }
        found = Some(AlmostBisecting { set: i, deficient });
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn fam(sets: Vec<Vec<(i64, i64)>>) -> PointFamily {
        PointFamily::new(
            sets.into_iter()
                .map(|s| s.into_iter().map(|(x, y)| Point::from_ints(x, y)).collect())
                .collect(),
        )
    }

    fn r(set: usize, index: usize) -> PointRef {
        PointRef::new(set, index)
    }

    #[test]
    fn balance_counts_on_line_singletons() {
        let f = fam(vec![vec![(0, 0)], vec![(2, 1)]]);
        let arr = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0))]);
        let report = balance(&f, &arr);
        for b in &report.sets {
            assert_eq!((b.plus, b.minus, b.on), (0, 0, 1));
        }
        assert!(is_bisecting(&f, &arr));
    }

    #[test]
    fn balance_counts_partition_the_set() {
        let f = fam(vec![vec![(0, 1), (0, -1), (5, 5)], vec![(7, 0)], vec![(9, 3)], vec![(8, -2)]]);
        // Single-line arrangements only exist for 2-set families; use a line
        // through the two singleton reps and one through the other pair.
        let arr = Arrangement::from_ref_pairs(&[(r(1, 0), r(2, 0)), (r(3, 0), r(0, 2))]);
        let report = balance(&f, &arr);
        for (i, b) in report.sets.iter().enumerate() {
            assert_eq!(b.total(), f.set(i).len());
        }
    }

    #[test]
    fn bisecting_two_singletons() {
        let f = fam(vec![vec![(0, 0)], vec![(2, 1)], vec![(5, 0)], vec![(6, 4)]]);
        let good = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 0), r(3, 0))]);
        assert!(is_bisecting(&f, &good));
        let bad = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 0), r(0, 0))]);
        // Reusing an anchor leaves set 3 off every line, unbalanced.
        assert!(!is_bisecting(&f, &bad));
    }

    #[test]
    fn four_singletons_all_three_matchings_bisect() {
        let f = fam(vec![vec![(0, 0)], vec![(1, 0)], vec![(0, 1)], vec![(1, 1)]]);
        let matchings = [
            [(r(0, 0), r(1, 0)), (r(2, 0), r(3, 0))],
            [(r(0, 0), r(2, 0)), (r(1, 0), r(3, 0))],
            [(r(0, 0), r(3, 0)), (r(1, 0), r(2, 0))],
        ];
        for pairs in &matchings {
            assert!(is_bisecting(&f, &Arrangement::from_ref_pairs(pairs)));
        }
    }

    #[test]
    fn flipping_all_bits_preserves_bisection() {
        let f = fam(vec![vec![(0, 0)], vec![(2, 1)], vec![(5, 0)], vec![(6, 4)]]);
        let mut arr = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 0), r(3, 0))]);
        assert!(is_bisecting(&f, &arr));
        for line in arr.lines_mut() {
            line.positive_left = !line.positive_left;
        }
        assert!(is_bisecting(&f, &arr));
    }

    #[test]
    fn equality_ignores_orientation_and_order() {
        let a = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 0), r(3, 0))]);
        let mut b = Arrangement::new(vec![
            OrientedLine {
                a: Anchor::Ref(r(3, 0)),
                b: Anchor::Ref(r(2, 0)),
                positive_left: false,
            },
            OrientedLine {
                a: Anchor::Ref(r(1, 0)),
                b: Anchor::Ref(r(0, 0)),
                positive_left: true,
            },
        ]);
        assert_eq!(a, b);
        b.lines_mut().swap(0, 1);
        assert_eq!(a, b);
        let c = Arrangement::from_ref_pairs(&[(r(0, 0), r(2, 0)), (r(1, 0), r(3, 0))]);
        assert_ne!(a, c);
    }

    #[test]
    fn canonical_form_pins_first_bit() {
        let arr = Arrangement::new(vec![
            OrientedLine {
                a: Anchor::Ref(r(1, 0)),
                b: Anchor::Ref(r(0, 0)),
                positive_left: true,
            },
            OrientedLine {
                a: Anchor::Ref(r(2, 0)),
                b: Anchor::Ref(r(3, 0)),
                positive_left: false,
            },
        ]);
        let canon = arr.canonicalized();
        assert!(canon.lines()[0].a <= canon.lines()[0].b);
        assert!(canon.lines()[0].positive_left);
        assert_eq!(canon, arr);
    }

    #[test]
    fn almost_bisecting_rejects_exact_bisections() {
        let f = fam(vec![vec![(0, 0)], vec![(2, 1)], vec![(5, 0)], vec![(6, 4)]]);
        let arr = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 0), r(3, 0))]);
        assert!(is_bisecting(&f, &arr));
        assert_eq!(is_almost_bisecting(&f, &arr), None);
    }

    #[test]
    fn almost_bisecting_detects_doubly_hit_set() {
        // Set 3 = {a, b, c} with a and b on lines and c strictly in R+,
        // every other set exactly bisected. Lines: one through the two
        // singleton sets 0 and 1, one through a point of set 2 and a of set 3.
        // Geometry chosen so the collinear triple (set 3's a rides the line
        // through sets 0-1) leaves set 3 doubly hit.
        let f = PointFamily::new(vec![
            vec![Point::from_ints(0, 0)],
            vec![Point::from_ints(4, 0)],
            vec![Point::from_ints(0, 5), Point::from_ints(1, -3), Point::from_ints(6, 2)],
            vec![Point::from_ints(2, 0), Point::from_ints(3, 4), Point::from_ints(5, -2)],
        ]);
        // Line A through (0,0)-(4,0): the x-axis; set 3's point (2,0) rides it.
        // Line B through set 2's (1,-3) and set 3's (3,4).
        let arr = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 1), r(3, 1))]);
        let got = is_almost_bisecting(&f, &arr).expect("doubly-hit set expected");
        assert_eq!(got.set, 3);
        // Set 3 off-line point is (5,-2); whichever region it avoids is
        // deficient. Verify against the balance report.
        let report = balance(&f, &arr);
        let b = report.sets[3];
        assert_eq!(b.on, 2);
        assert_eq!(b.plus + b.minus, 1);
        let expected = if b.plus < b.minus { Region::Plus } else { Region::Minus };
        assert_eq!(got.deficient, expected);
        // Sets 0 and 1 are exactly bisected singletons (count on = 1), set 2
        // must also be exactly bisected for the predicate to hold.
        assert!(report.sets[2].is_exact_bisection());
    }

    #[test]
    fn almost_bisecting_rejects_two_doubly_hit_sets() {
        // Both anchor sets of one line collapsed: fabricate by checking a
        // family where two sets each have two on-line points.
        let f = PointFamily::new(vec![
            vec![Point::from_ints(0, 0), Point::from_ints(4, 0), Point::from_ints(1, 7)],
            vec![Point::from_ints(2, 0), Point::from_ints(6, 0), Point::from_ints(3, -5)],
            vec![Point::from_ints(-2, 3)],
            vec![Point::from_ints(9, 4)],
        ]);
        // The x-axis holds two points of set 0 AND two points of set 1.
        let arr = Arrangement::from_ref_pairs(&[(r(0, 0), r(1, 0)), (r(2, 0), r(3, 0))]);
        // Line 0 through (0,0)-(2,0) is the x-axis, so (4,0) and (6,0) ride it.
        assert_eq!(is_almost_bisecting(&f, &arr), None);
    }
}
