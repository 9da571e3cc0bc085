//! Necklace splitting via the parabola embedding.
//!
//! Each necklace position `x` becomes two plane points `(x, x^2)` and
//! `(x+2, (x+2)^2)`. Points on a strictly convex curve are automatically in
//! general position, and any line meets the parabola at most twice, so a
//! bisecting arrangement of the embedded family crosses one of the two
//! copies at most `n` times; reading region labels along that copy yields a
//! necklace solution with at most `n` cuts.

use thiserror::Error;

use crate::arrangement::{is_bisecting, Arrangement};
use crate::geometry::{rat_int, region_label, Point, Rational, RegionLabel};
use crate::instance::PointFamily;

#[derive(Debug, Error)]
pub enum NecklaceError {
    #[error("invalid necklace instance: {0}")]
    InvalidInstance(String),
    #[error("arrangement does not bisect the embedded family")]
    NotBisecting,
    #[error("both copies need more than {n} cuts ({a} and {b}); the bisection is inconsistent")]
    TooManyCuts { n: usize, a: usize, b: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

/// `n` point sets on the open unit interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecklaceInstance {
    sets: Vec<Vec<Rational>>,
    labels: Vec<String>,
}

impl NecklaceInstance {
    pub fn new(sets: Vec<Vec<Rational>>) -> Self {
        let labels = (1..=sets.len()).map(|i| format!("N{i}")).collect();
        NecklaceInstance { sets, labels }
    }

    pub fn with_labels(sets: Vec<Vec<Rational>>, labels: Vec<String>) -> Self {
        assert_eq!(sets.len(), labels.len());
        NecklaceInstance { sets, labels }
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<Rational>] {
        &self.sets
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// All positions strictly inside (0,1) and pairwise distinct.
    pub fn validate(&self) -> Result<(), NecklaceError> {
        if self.sets.is_empty() {
            return Err(NecklaceError::InvalidInstance("no sets".into()));
        }
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        let mut all: Vec<&Rational> = Vec::new();
        for set in &self.sets {
            for x in set {
                if *x <= zero || *x >= one {
                    return Err(NecklaceError::InvalidInstance(format!(
                        "position {x} is not strictly inside (0,1)"
                    )));
                }
                all.push(x);
            }
        }
        let mut sorted = all.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(NecklaceError::InvalidInstance(format!(
                    "duplicate position {}",
                    w[0]
                )));
            }
        }
        Ok(())
    }
}

/// Interval sign of a necklace solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalLabel {
    Plus,
    Minus,
}

impl IntervalLabel {
    pub fn other(self) -> Self {
        match self {
            IntervalLabel::Plus => IntervalLabel::Minus,
            IntervalLabel::Minus => IntervalLabel::Plus,
        }
    }
}

/// At most `n` increasing cut positions; intervals alternate signs starting
/// with `first_label` on `[0, cuts[0])`. Positions exactly on a cut count to
/// neither class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecklaceSolution {
    pub cuts: Vec<Rational>,
    pub first_label: IntervalLabel,
}

impl NecklaceSolution {
    /// The sign of the interval containing `x`, `None` when `x` sits on a cut.
    pub fn label_of(&self, x: &Rational) -> Option<IntervalLabel> {
        let mut label = self.first_label;
        for c in &self.cuts {
            if c == x {
                return None;
            }
            if c < x {
                label = label.other();
            }
        }
        Some(label)
    }
}

/// Per-set counts of a necklace instance against a solution:
/// (plus, minus, on-cut) per set.
pub fn necklace_balance(
    inst: &NecklaceInstance,
    sol: &NecklaceSolution,
) -> Vec<(usize, usize, usize)> {
    inst.sets()
        .iter()
        .map(|set| {
            let mut plus = 0;
            let mut minus = 0;
            let mut on = 0;
            for x in set {
                match sol.label_of(x) {
                    Some(IntervalLabel::Plus) => plus += 1,
                    Some(IntervalLabel::Minus) => minus += 1,
                    None => on += 1,
                }
            }
            (plus, minus, on)
        })
        .collect()
}

fn parabola_point(x: &Rational) -> Point {
    Point::new(x.clone(), x * x)
}

/// Embed a necklace instance as `2n` plane sets: two parabola copies of each
/// set, the second shifted by 2. Output order interleaves the copies:
/// `A_1, B_1, A_2, B_2, ...`.
pub fn necklace_to_pizza(inst: &NecklaceInstance) -> Result<PointFamily, NecklaceError> {
    inst.validate()?;
    let two = rat_int(2);
    let mut sets = Vec::with_capacity(2 * inst.set_count());
    let mut labels = Vec::with_capacity(2 * inst.set_count());
    for (i, set) in inst.sets().iter().enumerate() {
        let first: Vec<Point> = set.iter().map(parabola_point).collect();
        let second: Vec<Point> = set.iter().map(|x| parabola_point(&(x + &two))).collect();
        sets.push(first);
        labels.push(format!("{}-a", inst.labels()[i]));
        sets.push(second);
        labels.push(format!("{}-b", inst.labels()[i]));
    }
    let family = PointFamily::with_labels(sets, labels);
    debug_assert!(family.is_valid(), "parabola embedding must be generic");
    Ok(family)
}

/// Region labels along one copy, ordered by position.
struct CopyReading {
    /// (original position, label) sorted by position.
    points: Vec<(Rational, RegionLabel)>,
}

fn read_copy(
    inst: &NecklaceInstance,
    embedded: &PointFamily,
    arr: &Arrangement,
    copy: usize,
) -> CopyReading {
    let mut points = Vec::new();
    for (i, set) in inst.sets().iter().enumerate() {
        let plane_set = 2 * i + copy;
        for (j, x) in set.iter().enumerate() {
            let p = &embedded.set(plane_set)[j];
            let label = region_label(embedded, arr.lines(), p);
            points.push((x.clone(), label));
        }
    }
    points.sort_by(|a, b| a.0.cmp(&b.0));
    CopyReading { points }
}

/// Cuts and first label realizing the read-off labels, or an error carrying
/// the cut count when it exceeds the budget check done by the caller.
fn cuts_for_reading(reading: &CopyReading) -> Result<(Vec<Rational>, IntervalLabel), NecklaceError> {
    let two = rat_int(2);
    let mut cuts: Vec<Rational> = Vec::new();
    let mut current: Option<IntervalLabel> = None;
    let mut first_label: Option<IntervalLabel> = None;
    let mut prev_pos: Option<Rational> = None;
    for (x, label) in &reading.points {
        match label {
            RegionLabel::Boundary => {
                // The embedded point rides a line: the cut sits exactly here.
                cuts.push(x.clone());
                current = current.map(IntervalLabel::other);
            }
            RegionLabel::RPlus | RegionLabel::RMinus => {
                let sign = if *label == RegionLabel::RPlus {
                    IntervalLabel::Plus
                } else {
                    IntervalLabel::Minus
                };
                match current {
                    None => {
                        // First signed point: the label of the leading
                        // interval is this sign undone by the cuts before it.
                        let mut lead = sign;
                        for _ in 0..cuts.len() {
                            lead = lead.other();
                        }
                        first_label = Some(first_label.unwrap_or(lead));
                        current = Some(sign);
                    }
                    Some(c) if c == sign => {}
                    Some(_) => {
                        let prev = prev_pos.as_ref().ok_or_else(|| {
                            NecklaceError::Internal("label flip before any point".into())
                        })?;
                        cuts.push((prev + x) / &two);
                        current = Some(sign);
                    }
                }
            }
        }
        prev_pos = Some(x.clone());
    }
    Ok((cuts, first_label.unwrap_or(IntervalLabel::Plus)))
}

/// Lift a bisecting arrangement of the embedded family back to a necklace
/// solution with at most `n` cuts.
///
/// Both copies are read; the one needing at most `n` cuts wins (the first
/// copy on ties). Cut positions between differently-labeled neighbors are
/// midpoints of the original positions, which keeps everything rational.
pub fn pizza_to_necklace(
    inst: &NecklaceInstance,
    arr: &Arrangement,
) -> Result<NecklaceSolution, NecklaceError> {
    let embedded = necklace_to_pizza(inst)?;
    if !is_bisecting(&embedded, arr) {
        return Err(NecklaceError::NotBisecting);
    }
    let n = inst.set_count();
    let first = cuts_for_reading(&read_copy(inst, &embedded, arr, 0))?;
    if first.0.len() <= n {
        return Ok(NecklaceSolution {
            cuts: first.0,
            first_label: first.1,
        });
    }
    let second = cuts_for_reading(&read_copy(inst, &embedded, arr, 1))?;
    if second.0.len() <= n {
        return Ok(NecklaceSolution {
            cuts: second.0,
            first_label: second.1,
        });
    }
    Err(NecklaceError::TooManyCuts {
        n,
        a: first.0.len(),
        b: second.0.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use crate::geometry::rat;

    fn inst(sets: Vec<Vec<(i64, i64)>>) -> NecklaceInstance {
        NecklaceInstance::new(
            sets.into_iter()
                .map(|s| s.into_iter().map(|(n, d)| rat(n, d)).collect())
                .collect(),
        )
    }

    #[test]
    fn embedding_substitutes_into_the_parabola() {
        let i = inst(vec![vec![(1, 2)]]);
        let f = necklace_to_pizza(&i).unwrap();
        assert_eq!(f.set_count(), 2);
        assert_eq!(f.set(0)[0], Point::new(rat(1, 2), rat(1, 4)));
        assert_eq!(f.set(1)[0], Point::new(rat(5, 2), rat(25, 4)));
    }

    #[test]
    fn embedding_is_valid_and_preserves_sizes() {
        let i = inst(vec![vec![(1, 4), (3, 4)], vec![(1, 2)]]);
        let f = necklace_to_pizza(&i).unwrap();
        assert!(f.is_valid());
        assert_eq!(f.set(0).len(), 2);
        assert_eq!(f.set(1).len(), 2);
        assert_eq!(f.set(2).len(), 1);
        assert_eq!(f.set(3).len(), 1);
    }

    #[test]
    fn validation_rejects_out_of_range_and_duplicates() {
        assert!(inst(vec![vec![(3, 2)]]).validate().is_err());
        assert!(inst(vec![vec![(1, 2)], vec![(1, 2)]]).validate().is_err());
        assert!(inst(vec![vec![(1, 4), (3, 4)]]).validate().is_ok());
    }

    #[test]
    fn lift_splits_every_set_in_half() {
        // Odd sets so the embedded family is brute-solvable directly.
        let i = inst(vec![
            vec![(1, 8), (3, 8), (5, 8)],
            vec![(1, 4), (1, 2), (7, 8)],
        ]);
        let f = necklace_to_pizza(&i).unwrap();
        let arr = brute::first_bisection(&f).unwrap().expect("solution exists");
        let sol = pizza_to_necklace(&i, &arr).unwrap();
        assert!(sol.cuts.len() <= i.set_count());
        for w in sol.cuts.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (s, (plus, minus, on)) in necklace_balance(&i, &sol).iter().enumerate() {
            let half = i.sets()[s].len() / 2;
            assert_eq!((*plus, *minus), (half, half), "set {s}");
            assert_eq!(plus + minus + on, i.sets()[s].len());
        }
    }

    #[test]
    fn lift_bound_holds_over_brute_enumeration() {
        let i = inst(vec![vec![(1, 8), (2, 8), (3, 8)], vec![(5, 8), (6, 8), (55, 80)]]);
        let f = necklace_to_pizza(&i).unwrap();
        for arr in brute::enumerate_bisections(&f).unwrap() {
            let sol = pizza_to_necklace(&i, &arr).unwrap();
            assert!(sol.cuts.len() <= i.set_count());
        }
    }

    #[test]
    fn lift_rejects_non_bisections() {
        let i = inst(vec![vec![(1, 8), (3, 8), (5, 8)], vec![(1, 4), (1, 2), (7, 8)]]);
        let f = necklace_to_pizza(&i).unwrap();
        // A line pairing two first-copy points of different sets plus an
        // arbitrary second line anchor does not bisect in general; find one.
        let arrs = brute::enumerate_bisections(&f).unwrap();
        let mut bad = None;
        use crate::geometry::PointRef;
        for a in 0..3 {
            let candidate = Arrangement::from_ref_pairs(&[
                (PointRef::new(0, a), PointRef::new(2, 0)),
                (PointRef::new(1, 0), PointRef::new(3, 0)),
            ]);
            if !arrs.contains(&candidate) {
                bad = Some(candidate);
                break;
            }
        }
        if let Some(candidate) = bad {
            if !crate::arrangement::is_bisecting(&f, &candidate) {
                assert!(matches!(
                    pizza_to_necklace(&i, &candidate),
                    Err(NecklaceError::NotBisecting)
                ));
            }
        }
    }
}
