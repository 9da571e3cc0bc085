//! Exact rational primitives: points, oriented lines, the orientation
//! predicate and the parity region classifier.
//!
//! Everything here is decided, never estimated: coordinates are
//! arbitrary-precision rationals and all predicates reduce to integer sign
//! computations.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact scalar carrying all coordinates and event times.
///
/// Always stored in lowest terms with a positive denominator (the
/// `num_rational` representation maintains both), so equality is
/// canonical-form equality.
pub type Rational = BigRational;

/// Build a rational from an integer numerator and denominator.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(num.into(), den.into())
}

/// Build a rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    BigRational::from_integer(num.into())
}

/// A point in the plane with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(rat_int(x), rat_int(y))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sign of an ordered point triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Positive determinant: `c` lies to the left of the ray `a -> b`.
    Counterclockwise,
    Collinear,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Counterclockwise => 1,
            Orientation::Collinear => 0,
            Orientation::Clockwise => -1,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Counterclockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
            Orientation::Clockwise => Orientation::Counterclockwise,
        }
    }
}

/// Exact orientation of the triple `(a, b, c)`: the sign of
/// `det(b - a, c - a)`.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Orientation {
    // Sign of (b.x - a.x)(c.y - a.y) - (b.y - a.y)(c.x - a.x), computed on
    // rationals; no rounding anywhere.
    let lhs = (&b.x - &a.x) * (&c.y - &a.y);
    let rhs = (&b.y - &a.y) * (&c.x - &a.x);
    let det = lhs - rhs;
    if det.is_zero() {
        Orientation::Collinear
    } else if det.is_positive() {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    }
}

/// Cross product `(b - a) x (c - a)` as an exact rational.
pub fn cross(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// Reference to a point of an instance: set index and position within the set.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub struct PointRef {
    pub set: usize,
    pub index: usize,
}

impl PointRef {
    pub fn new(set: usize, index: usize) -> Self {
        PointRef { set, index }
    }
}

/// A line anchor: either a reference into the instance or a free rational
/// point.
///
/// Solver outputs anchor lines at instance points; free anchors only appear
/// when the padding repair has to keep a line whose defining point was
/// removed, or synthesize a slightly rotated line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Anchor {
    Ref(PointRef),
    Free(Point),
}

impl Anchor {
    pub fn as_ref(&self) -> Option<PointRef> {
        match self {
            Anchor::Ref(r) => Some(*r),
            Anchor::Free(_) => None,
        }
    }
}

/// Anything that can resolve a [`PointRef`] to coordinates.
pub trait Resolver {
    fn point(&self, r: PointRef) -> &Point;
}

/// An oriented line through two distinct anchors.
///
/// With `positive_left = true` the positive side is the open half-plane to
/// the left of the ray `a -> b`; flipping the bit swaps the sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedLine {
    pub a: Anchor,
    pub b: Anchor,
    pub positive_left: bool,
}

impl OrientedLine {
    pub fn through_refs(a: PointRef, b: PointRef) -> Self {
        OrientedLine {
            a: Anchor::Ref(a),
            b: Anchor::Ref(b),
            positive_left: true,
        }
    }

    pub fn resolve<'r>(&'r self, points: &'r impl Resolver) -> (&'r Point, &'r Point) {
        let a = match &self.a {
            Anchor::Ref(r) => points.point(*r),
            Anchor::Free(p) => p,
        };
        let b = match &self.b {
            Anchor::Ref(r) => points.point(*r),
            Anchor::Free(p) => p,
        };
        (a, b)
    }
}

/// Which side of an oriented line a point falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SideLabel {
    Positive,
    Negative,
    On,
}

/// Classify `p` against an oriented line.
pub fn side_of(points: &impl Resolver, line: &OrientedLine, p: &Point) -> SideLabel {
    let (a, b) = line.resolve(points);
    match (orient(a, b, p), line.positive_left) {
        (Orientation::Collinear, _) => SideLabel::On,
        (Orientation::Counterclockwise, true) | (Orientation::Clockwise, false) => {
            SideLabel::Positive
        }
        _ => SideLabel::Negative,
    }
}

/// Parity class of a point under an arrangement of oriented lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// On the positive side of an even number of lines.
    RPlus,
    /// On the positive side of an odd number of lines.
    RMinus,
    /// On some line; counts to neither region.
    Boundary,
}

/// Rotation sense for line sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Turn {
    Ccw,
    Cw,
}

/// Perpendicular of `dir`, a quarter turn in the given sense.
pub fn perp(dir: &Point, turn: Turn) -> Point {
    match turn {
        Turn::Ccw => Point::new(-dir.y.clone(), dir.x.clone()),
        Turn::Cw => Point::new(dir.y.clone(), -dir.x.clone()),
    }
}

fn vec_cross(a: &Point, b: &Point) -> Rational {
    &a.x * &b.y - &a.y * &b.x
}

/// First candidate point hit when the line through `pivot` with direction
/// `dir` rotates in `turn` sense by less than a half turn.
///
/// Candidates must not lie on the rotating line. Returns the hit and
/// whether the swept oriented direction meets `pivot - hit` rather than
/// `hit - pivot`.
pub fn sweep_first_hit<'a>(
    pivot: &Point,
    dir: &Point,
    turn: Turn,
    candidates: impl Iterator<Item = (PointRef, &'a Point)>,
) -> Option<(PointRef, bool)> {
    let mut best: Option<(PointRef, bool, Point)> = None;
    for (r, p) in candidates {
        let v = Point::new(&p.x - &pivot.x, &p.y - &pivot.y);
        let s = vec_cross(dir, &v);
        debug_assert!(!s.is_zero(), "sweep candidate lies on the rotating line");
        let keep_sign = match turn {
            Turn::Ccw => s.is_positive(),
            Turn::Cw => s.is_negative(),
        };
        let (flipped, v) = if keep_sign {
            (false, v)
        } else {
            (true, Point::new(-&v.x, -&v.y))
        };
        best = match best {
            None => Some((r, flipped, v)),
            Some((br, bf, bv)) => {
                // Both representatives sit in the open swept half-plane, so
                // their cross sign orders the hit angles.
                let c = vec_cross(&v, &bv);
                debug_assert!(!c.is_zero(), "two sweep candidates share a direction");
                let earlier = match turn {
                    Turn::Ccw => c.is_positive(),
                    Turn::Cw => c.is_negative(),
                };
                if earlier {
                    Some((r, flipped, v))
                } else {
                    Some((br, bf, bv))
                }
            }
        };
    }
    best.map(|(r, flipped, _)| (r, flipped))
}

/// Classify `p` against a whole arrangement: `Boundary` if it lies on any
/// line, otherwise `RPlus` when the count of lines whose positive side
/// contains it is even and `RMinus` when odd.
pub fn region_label(points: &impl Resolver, lines: &[OrientedLine], p: &Point) -> RegionLabel {
    let mut positives = 0usize;
    for line in lines {
        match side_of(points, line, p) {
            SideLabel::On => return RegionLabel::Boundary,
            SideLabel::Positive => positives += 1,
            SideLabel::Negative => {}
        }
    }
    if positives % 2 == 0 {
        RegionLabel::RPlus
    } else {
        RegionLabel::RMinus
    }
}
