//! Path-following solver: build a well-separated start configuration whose
//! bisections are known, move the points one at a time to the target, and
//! drag bisecting arrangements through every orientation-change event.
//!
//! At an event exactly one point triple becomes collinear. An arrangement
//! whose lines avoid the triple is unaffected. Otherwise the crossing either
//! swaps a representative inside one set, or kicks off a rotation cascade at
//! the degenerate configuration: the doubly-hit set releases its off-line
//! representative, the released line pivots to the next free point, and the
//! imbalance wanders between sets until it returns to the tripled line,
//! where the arrangement either survives re-anchored or annihilates with a
//! partner arrangement. Bisections vanish (and appear) in pairs, so some
//! start arrangement always survives to the target.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{
    is_almost_bisecting, is_bisecting, point_labels, Arrangement, ArrangementKey,
};
use crate::geometry::{
    orient, rat, rat_int, region_label, sweep_first_hit, Anchor, Orientation, OrientedLine, Point,
    PointRef, Rational, RegionLabel, Resolver, Turn,
};
use crate::instance::{pad_to_odd, repair_after_padding, PointFamily};
use crate::separated::{alpha_hs_pair, is_well_separated};

#[derive(Debug, Error)]
pub enum HomotopyError {
    #[error("family is not valid: {0}")]
    InvalidFamily(String),
    #[error("set {set} has even size {size}; the scheduler requires odd sets")]
    EvenSet { set: usize, size: usize },
    #[error("no generic start configuration found after {attempts} attempts")]
    RetryLimitExceeded { attempts: usize },
    #[error("degenerate schedule: {0}")]
    DegenerateSchedule(String),
    #[error("seed arrangement {index} does not bisect the start configuration")]
    BadSeed { index: usize },
    #[error("repair failed: {0}")]
    Repair(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Well-separated copy of the target family, one cluster per set, with the
/// index-order correspondence between cluster points and target points.
#[derive(Clone, Debug)]
pub struct StartConfiguration {
    q: PointFamily,
}

impl StartConfiguration {
    pub fn family(&self) -> &PointFamily {
        &self.q
    }
}

/// One orientation change: while `mover` travels its leg, it crosses the
/// line spanned by the stationary `pair` at `time`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub mover: PointRef,
    pub pair: (PointRef, PointRef),
    /// Collinearity time within the leg, strictly between 0 and 1.
    #[serde(serialize_with = "serialize_rational")]
    pub time: Rational,
    /// Index of the mover's motion leg in the global move order.
    pub leg: usize,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::io::format_rational(r))
}

/// The ordered event list for one start/target pair.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub events: Vec<Event>,
}

impl Schedule {
    /// Number of levels (event-free intervals) is `events.len() + 1`.
    pub fn level_count(&self) -> usize {
        self.events.len() + 1
    }
}

/// Outcome of pushing one bisecting arrangement through one event.
#[derive(Clone, Debug)]
pub enum StepOutcome {
    /// The arrangement is untouched and still bisects after the event.
    Unaffected,
    /// The arrangement continues as a re-anchored variant that bisects after
    /// the event.
    Resolved(Arrangement),
    /// The arrangement dies at this event together with the returned
    /// partner, which bisects *before* the event. Walked in reverse this is
    /// a pair being born.
    PairVanished(Arrangement),
}

impl StepOutcome {
    pub fn kind(&self) -> &'static str {
        match self {
            StepOutcome::Unaffected => "unaffected",
            StepOutcome::Resolved(_) => "resolved",
            StepOutcome::PairVanished(_) => "pair_vanished",
        }
    }
}

/// Interpolation bookkeeping: points move one at a time, in global
/// (set, index) order, from their start to their target position.
#[derive(Clone, Debug)]
pub struct Timeline {
    start: PointFamily,
    target: PointFamily,
    legs: Vec<PointRef>,
}

impl Timeline {
    pub fn new(start: &StartConfiguration, target: &PointFamily) -> Self {
        let legs = target.points().map(|(r, _)| r).collect();
        Timeline {
            start: start.family().clone(),
            target: target.clone(),
            legs,
        }
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    pub fn start_family(&self) -> &PointFamily {
        &self.start
    }

    pub fn target_family(&self) -> &PointFamily {
        &self.target
    }

    /// Configuration during leg `leg` at local time `t`: earlier legs are at
    /// their targets, later legs at their starts, the mover in between.
    pub fn config(&self, leg: usize, t: &Rational) -> PointFamily {
        let mut family = self.start.clone();
        for (i, &r) in self.legs.iter().enumerate() {
            if i < leg {
                family.set_point(r, self.target.point(r).clone());
            } else if i == leg {
                let q = self.start.point(r);
                let p = self.target.point(r);
                let x = &q.x + t * (&p.x - &q.x);
                let y = &q.y + t * (&p.y - &q.y);
                family.set_point(r, Point::new(x, y));
            }
        }
        family
    }

    /// Representative configuration of level `k`: strictly between events
    /// `k-1` and `k`, with level 0 the start and the last level the target.
    pub fn level_config(&self, schedule: &Schedule, level: usize) -> PointFamily {
        let c = schedule.events.len();
        assert!(level <= c);
        if level == 0 {
            return self.start.clone();
        }
        if level == c {
            return self.target.clone();
        }
        let prev = &schedule.events[level - 1];
        let next = &schedule.events[level];
        if prev.leg == next.leg {
            let mid = (&prev.time + &next.time) / rat_int(2);
            self.config(prev.leg, &mid)
        } else {
            // Legs strictly between the two events are event-free, so any
            // snapshot before the next event sees the same order type.
            let mid = &next.time / rat_int(2);
            self.config(next.leg, &mid)
        }
    }

    /// The exactly-degenerate configuration at an event, with the mover on
    /// the stationary pair's line.
    pub fn degenerate_config(&self, event: &Event) -> PointFamily {
        self.config(event.leg, &event.time)
    }
}

const MAX_START_ATTEMPTS: usize = 64;

/// Build the well-separated start configuration for a valid all-odd family.
///
/// Clusters of radius `1/(8m)` sit at rational points of a circle whose
/// radius exceeds the target's bounding box; the correspondence is the
/// index-order bijection. The combined start and target points are generic:
/// pairwise distinct with no collinear triple.
pub fn make_start(family: &PointFamily) -> Result<StartConfiguration, HomotopyError> {
    check_all_odd(family)?;
    for attempt in 0..MAX_START_ATTEMPTS {
        let start = build_start(family, 0, attempt);
        if start_is_generic(&start, family) {
            return Ok(start);
        }
    }
    Err(HomotopyError::RetryLimitExceeded {
        attempts: MAX_START_ATTEMPTS,
    })
}

fn check_all_odd(family: &PointFamily) -> Result<(), HomotopyError> {
    let report = family.validate();
    if !report.is_valid() {
        return Err(HomotopyError::InvalidFamily(
            report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    for s in 0..family.set_count() {
        if family.set(s).len() % 2 == 0 {
            return Err(HomotopyError::EvenSet {
                set: s,
                size: family.set(s).len(),
            });
        }
    }
    Ok(())
}

/// Deterministic cluster construction; `attempt` reshuffles the in-cluster
/// perturbations until the combined configuration is generic.
fn build_start(family: &PointFamily, seed: u64, attempt: usize) -> StartConfiguration {
    let m = family.total_points() as i64;
    let k = family.set_count() as i64;
    let max_abs = family
        .points()
        .map(|(_, p)| {
            let ax = p.x.abs();
            let ay = p.y.abs();
            if ax > ay {
                ax
            } else {
                ay
            }
        })
        .max()
        .unwrap_or_else(Rational::zero);
    // Far outside the target's bounding box, and scaled so hard that chords
    // between clusters keep clear of every third cluster.
    let radius = rat_int(2) * max_abs + rat_int(2) + rat_int(4 * k * k * k * k);
    let rho = rat(1, 8 * m.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((attempt as u64) << 32) ^ 0x5a17);

    let mut sets = Vec::with_capacity(family.set_count());
    for s in 0..family.set_count() {
        let size = family.set(s).len() as i64;
        // Rational point on the circle via the tangent half-angle map.
        let t = circle_parameter(s);
        let denom = Rational::one() + &t * &t;
        let cx = &radius * (Rational::one() - &t * &t) / &denom;
        let cy = &radius * rat_int(2) * &t / &denom;
        let eps = &rho / rat_int(4 * (size + 2) * (size + 2));
        let jitter = &rho / rat_int(1 << 24);
        let mut pts = Vec::with_capacity(size as usize);
        for j in 0..size {
            let dx: i64 = rng.gen_range(-(1 << 20)..(1 << 20));
            let dy: i64 = rng.gen_range(-(1 << 20)..(1 << 20));
            let ox = &eps * rat_int(j + 1) + &jitter * rat_int(dx);
            let oy = &eps * rat_int((j + 1) * (j + 1)) + &jitter * rat_int(dy);
            pts.push(Point::new(&cx + ox, &cy + oy));
        }
        sets.push(pts);
    }
    let q = PointFamily::with_labels(sets, family.labels().to_vec());
    StartConfiguration { q }
}

/// Tangent half-angle parameters 0, 1, -1, 2, -2, ...: distinct directions
/// around the circle.
fn circle_parameter(i: usize) -> Rational {
    if i == 0 {
        Rational::zero()
    } else if i % 2 == 1 {
        rat_int(((i + 1) / 2) as i64)
    } else {
        rat_int(-((i / 2) as i64))
    }
}

/// Generic relative position of start and target: all points distinct, no
/// three collinear, and the start alone is well-separated.
fn start_is_generic(start: &StartConfiguration, target: &PointFamily) -> bool {
    if !start.family().is_valid() || !is_well_separated(start.family()) {
        return false;
    }
    let combined: Vec<&Point> = start
        .family()
        .points()
        .map(|(_, p)| p)
        .chain(target.points().map(|(_, p)| p))
        .collect();
    for i in 0..combined.len() {
        for j in (i + 1)..combined.len() {
            if combined[i] == combined[j] {
                return false;
            }
        }
    }
    for i in 0..combined.len() {
        for j in (i + 1)..combined.len() {
            for l in (j + 1)..combined.len() {
                if orient(combined[i], combined[j], combined[l]) == Orientation::Collinear {
                    return false;
                }
            }
        }
    }
    true
}

/// All orientation-change events along the one-point-at-a-time motion from
/// the start to the target, sorted by (leg, time).
///
/// Within a leg every mover/stationary-pair collinearity is linear in the
/// leg time, so every event time is rational. Fails if two events collide;
/// callers then retry with a freshly perturbed start.
pub fn event_schedule(
    start: &StartConfiguration,
    family: &PointFamily,
) -> Result<Schedule, HomotopyError> {
    check_all_odd(family)?;
    let timeline = Timeline::new(start, family);
    let m = timeline.leg_count();
    let mut events = Vec::new();
    for leg in 0..m {
        let mover_ref = timeline.legs[leg];
        let q = timeline.start.point(mover_ref).clone();
        let p = timeline.target.point(mover_ref).clone();
        let d = Point::new(&p.x - &q.x, &p.y - &q.y);
        // Stationary positions for this leg.
        let stationary: Vec<(PointRef, Point)> = timeline
            .legs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != leg)
            .map(|(i, &r)| {
                let pos = if i < leg {
                    timeline.target.point(r).clone()
                } else {
                    timeline.start.point(r).clone()
                };
                (r, pos)
            })
            .collect();
        let mut leg_events: Vec<Event> = Vec::new();
        for i in 0..stationary.len() {
            for j in (i + 1)..stationary.len() {
                let (ur, u) = &stationary[i];
                let (vr, v) = &stationary[j];
                // cross(v-u, x(t)-u) = a + b t with x(t) = q + t d.
                let a = (&v.x - &u.x) * (&q.y - &u.y) - (&v.y - &u.y) * (&q.x - &u.x);
                let b = (&v.x - &u.x) * &d.y - (&v.y - &u.y) * &d.x;
                if b.is_zero() {
                    if a.is_zero() {
                        return Err(HomotopyError::DegenerateSchedule(format!(
                            "mover ({},{}) travels along the line of ({},{}) and ({},{})",
                            mover_ref.set, mover_ref.index, ur.set, ur.index, vr.set, vr.index
                        )));
                    }
                    continue;
                }
                let t = -a / b;
                if t <= Rational::zero() || t >= Rational::one() {
                    continue;
                }
                leg_events.push(Event {
                    mover: mover_ref,
                    pair: (*ur, *vr),
                    time: t,
                    leg,
                });
            }
        }
        leg_events.sort_by(|x, y| x.time.cmp(&y.time));
        for w in leg_events.windows(2) {
            if w[0].time == w[1].time {
                return Err(HomotopyError::DegenerateSchedule(format!(
                    "two events of leg {leg} coincide at t = {}",
                    w[0].time
                )));
            }
        }
        events.extend(leg_events);
    }
    Ok(Schedule { events })
}

/// Start configuration plus schedule, retrying the cluster perturbation
/// until the schedule is non-degenerate.
pub fn prepared_start(
    family: &PointFamily,
    seed: u64,
) -> Result<(StartConfiguration, Schedule), HomotopyError> {
    check_all_odd(family)?;
    for attempt in 0..MAX_START_ATTEMPTS {
        let start = build_start(family, seed, attempt);
        if !start_is_generic(&start, family) {
            continue;
        }
        match event_schedule(&start, family) {
            Ok(schedule) => return Ok((start, schedule)),
            Err(HomotopyError::DegenerateSchedule(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(HomotopyError::RetryLimitExceeded {
        attempts: MAX_START_ATTEMPTS,
    })
}

/// The per-pair Ham-Sandwich arrangement of the start configuration for one
/// perfect matching of the set indices.
pub fn seed_arrangement(
    start: &StartConfiguration,
    matching: &[(usize, usize)],
) -> Result<Arrangement, HomotopyError> {
    let q = start.family();
    let mut lines = Vec::with_capacity(matching.len());
    for &(a, b) in matching {
        let cut = alpha_hs_pair(
            q.set(a),
            q.set(b),
            (q.set(a).len() - 1) / 2,
            (q.set(b).len() - 1) / 2,
        )
        .map_err(|e| HomotopyError::Internal(format!("seed cut failed: {e}")))?;
        lines.push(OrientedLine {
            a: Anchor::Ref(PointRef::new(a, cut.p_index)),
            b: Anchor::Ref(PointRef::new(b, cut.q_index)),
            positive_left: cut.positive_left,
        });
    }
    Ok(Arrangement::new(lines).canonicalized())
}

/// The line of `arr` whose anchors are both inside the event's collinear
/// triple, together with the third (crossing) point.
fn affected_line(arr: &Arrangement, event: &Event) -> Option<(usize, PointRef)> {
    let trio = [event.mover, event.pair.0, event.pair.1];
    for (idx, line) in arr.lines().iter().enumerate() {
        let (a, b) = match (line.a.as_ref(), line.b.as_ref()) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        if trio.contains(&a) && trio.contains(&b) {
            let z = trio.into_iter().find(|r| *r != a && *r != b)?;
            return Some((idx, z));
        }
    }
    None
}

/// Oriented direction and side flag of a stored line: positive side is the
/// left of `direction` iff the flag holds.
fn line_direction(points: &impl Resolver, line: &OrientedLine) -> (Point, bool) {
    let (a, b) = line.resolve(points);
    (Point::new(&b.x - &a.x, &b.y - &a.y), line.positive_left)
}

/// Push one bisecting arrangement through one event.
///
/// `cfg_from` and `cfg_to` are the configurations on the two sides of the
/// event (either temporal direction works); `arr` must bisect `cfg_from`.
pub fn advance(
    cfg_from: &PointFamily,
    cfg_to: &PointFamily,
    event: &Event,
    arr: &Arrangement,
) -> Result<StepOutcome, HomotopyError> {
    let (line_idx, z) = match affected_line(arr, event) {
        None => {
            debug_assert!(is_bisecting(cfg_to, arr));
            return Ok(StepOutcome::Unaffected);
        }
        Some(hit) => hit,
    };
    if is_bisecting(cfg_to, arr) {
        // The crossing point rides another line of the arrangement, so its
        // region label stays on the boundary and no count changes.
        return Ok(StepOutcome::Unaffected);
    }
    if !is_bisecting(cfg_from, arr) {
        return Err(HomotopyError::Internal(
            "advance called with a non-bisecting arrangement".into(),
        ));
    }

    let cfg_degen = degenerate_between(cfg_from, cfg_to, event)?;
    let (a_ref, b_ref) = {
        let line = &arr.lines()[line_idx];
        (
            line.a.as_ref().expect("instance anchor"),
            line.b.as_ref().expect("instance anchor"),
        )
    };

    if z.set == a_ref.set || z.set == b_ref.set {
        // The crossing point shares a set with an anchor of the crossed
        // line: the only candidate swaps that anchor for the crossing point.
        let keep = if z.set == a_ref.set { b_ref } else { a_ref };
        let mut candidate = arr.clone();
        candidate.lines_mut()[line_idx] = OrientedLine {
            a: Anchor::Ref(keep),
            b: Anchor::Ref(z),
            positive_left: true,
        };
        let candidate = candidate.canonicalized();
        return finalize(cfg_from, cfg_to, candidate);
    }

    cascade(cfg_from, cfg_to, &cfg_degen, arr, line_idx, z)
}

/// The configuration with the mover exactly on the stationary pair's line.
fn degenerate_between(
    cfg_from: &PointFamily,
    cfg_to: &PointFamily,
    event: &Event,
) -> Result<PointFamily, HomotopyError> {
    let mf = cfg_from.point(event.mover).clone();
    let mt = cfg_to.point(event.mover).clone();
    let u = cfg_from.point(event.pair.0);
    let v = cfg_from.point(event.pair.1);
    debug_assert_eq!(u, cfg_to.point(event.pair.0));
    let d = Point::new(&mt.x - &mf.x, &mt.y - &mf.y);
    let a = (&v.x - &u.x) * (&mf.y - &u.y) - (&v.y - &u.y) * (&mf.x - &u.x);
    let b = (&v.x - &u.x) * &d.y - (&v.y - &u.y) * &d.x;
    if b.is_zero() {
        return Err(HomotopyError::Internal(
            "event mover does not cross the stationary line".into(),
        ));
    }
    let s = -a / b;
    if s <= Rational::zero() || s >= Rational::one() {
        return Err(HomotopyError::Internal(
            "event collinearity lies outside the step".into(),
        ));
    }
    let pos = Point::new(&mf.x + &s * &d.x, &mf.y + &s * &d.y);
    let mut degen = cfg_from.clone();
    degen.set_point(event.mover, pos);
    Ok(degen)
}

/// Select the surviving side for a finished candidate arrangement.
fn finalize(
    cfg_from: &PointFamily,
    cfg_to: &PointFamily,
    candidate: Arrangement,
) -> Result<StepOutcome, HomotopyError> {
    let bisects_to = is_bisecting(cfg_to, &candidate);
    let bisects_from = is_bisecting(cfg_from, &candidate);
    match (bisects_to, bisects_from) {
        (true, false) => Ok(StepOutcome::Resolved(candidate)),
        (false, true) => Ok(StepOutcome::PairVanished(candidate)),
        other => Err(HomotopyError::Internal(format!(
            "candidate bisects neither or both sides of the event: {other:?}"
        ))),
    }
}

/// The rotation cascade at the degenerate configuration.
fn cascade(
    cfg_from: &PointFamily,
    cfg_to: &PointFamily,
    cfg_degen: &PointFamily,
    arr: &Arrangement,
    tripled_idx: usize,
    z: PointRef,
) -> Result<StepOutcome, HomotopyError> {
    let trio: [PointRef; 3] = {
        let line = &arr.lines()[tripled_idx];
        [
            line.a.as_ref().expect("instance anchor"),
            line.b.as_ref().expect("instance anchor"),
            z,
        ]
    };
    let mut work = arr.clone();
    let mut last_changed = tripled_idx;
    let mut steps = 0usize;
    let mut visited: HashSet<ArrangementKey> = HashSet::new();
    visited.insert(work.key());

    loop {
        let state = is_almost_bisecting(cfg_degen, &work).ok_or_else(|| {
            HomotopyError::Internal("cascade arrangement is not almost bisecting".into())
        })?;
        let labels = point_labels(cfg_degen, &work);
        let on_points: Vec<PointRef> = labels[state.set]
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == RegionLabel::Boundary)
            .map(|(i, _)| PointRef::new(state.set, i))
            .collect();
        if on_points.len() != 2 {
            return Err(HomotopyError::Internal(format!(
                "doubly-hit set has {} on-line points",
                on_points.len()
            )));
        }

        if steps > 0 {
            if let Some(&beta) = on_points.iter().find(|r| trio.contains(r)) {
                // The imbalance reached a set incident to the tripled line:
                // re-anchor it at the two other collinear points and test
                // which side of the event keeps a bisection.
                let keep: Vec<PointRef> = trio.iter().copied().filter(|r| *r != beta).collect();
                work.lines_mut()[tripled_idx] = OrientedLine {
                    a: Anchor::Ref(keep[0]),
                    b: Anchor::Ref(keep[1]),
                    positive_left: true,
                };
                return finalize(cfg_from, cfg_to, work.canonicalized());
            }
        }

        // Release the on-line point that is not on the line modified last;
        // at step 0 that line is the tripled line carrying the crossing
        // point, so the released point is the set's old representative.
        let released = *on_points
            .iter()
            .find(|r| !line_contains(cfg_degen, &work.lines()[last_changed], **r))
            .ok_or_else(|| {
                HomotopyError::Internal("both on-line points sit on the last line".into())
            })?;
        let rel_idx = (0..work.line_count())
            .find(|&i| i != last_changed && line_contains(cfg_degen, &work.lines()[i], released))
            .ok_or_else(|| HomotopyError::Internal("released point has no line".into()))?;
        let rel_line = work.lines()[rel_idx].clone();
        let pivot_ref = [rel_line.a.as_ref(), rel_line.b.as_ref()]
            .into_iter()
            .flatten()
            .find(|r| *r != released)
            .ok_or_else(|| HomotopyError::Internal("rotating line has no pivot anchor".into()))?;
        let pivot = cfg_degen.point(pivot_ref).clone();
        let (old_dir, side_flag) = line_direction(cfg_degen, &rel_line);

        // Eligible targets: instance points on no line of the arrangement.
        let eligible = || {
            cfg_degen
                .points()
                .filter(|(r, _)| labels[r.set][r.index] != RegionLabel::Boundary)
        };

        let mut applied = false;
        for turn in [Turn::Ccw, Turn::Cw] {
            let Some((hit_ref, flipped)) = sweep_first_hit(&pivot, &old_dir, turn, eligible())
            else {
                continue;
            };
            // The oriented direction rotates continuously onto the hit's
            // swept representative, so the left-side flag carries over once
            // the anchor order encodes that representative.
            let new_line = if flipped {
                OrientedLine {
                    a: Anchor::Ref(hit_ref),
                    b: Anchor::Ref(pivot_ref),
                    positive_left: side_flag,
                }
            } else {
                OrientedLine {
                    a: Anchor::Ref(pivot_ref),
                    b: Anchor::Ref(hit_ref),
                    positive_left: side_flag,
                }
            };
            // Does the released point land in the deficient region?
            let mut candidate = work.clone();
            candidate.lines_mut()[rel_idx] = new_line;
            let label = region_label(cfg_degen, candidate.lines(), cfg_degen.point(released));
            if label == state.deficient.label() {
                if !visited.insert(candidate.key()) {
                    return Err(HomotopyError::Internal(
                        "cascade revisited an arrangement".into(),
                    ));
                }
                work = candidate;
                last_changed = rel_idx;
                applied = true;
                break;
            }
        }
        if !applied {
            return Err(HomotopyError::Internal(
                "no rotation direction feeds the deficient region".into(),
            ));
        }
        steps += 1;
        if visited.len() > 4 * total_arrangement_bound(cfg_degen) {
            return Err(HomotopyError::Internal(
                "cascade exceeded the arrangement bound".into(),
            ));
        }
    }
}

fn total_arrangement_bound(family: &PointFamily) -> usize {
    // Loose cap on distinct cascade states: every point can anchor with
    // every other point at most once.
    let m = family.total_points();
    m * m + 16
}

fn line_contains(points: &impl Resolver, line: &OrientedLine, r: PointRef) -> bool {
    let (a, b) = line.resolve(points);
    orient(a, b, points.point(r)) == Orientation::Collinear
}

/// One record per `advance` call made by the solver.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub seed_index: usize,
    pub event_index: usize,
    pub direction: &'static str,
    pub outcome: &'static str,
    pub before: Vec<((usize, usize), (usize, usize))>,
    pub after: Option<Vec<((usize, usize), (usize, usize))>>,
}

fn describe(arr: &Arrangement) -> Vec<((usize, usize), (usize, usize))> {
    let mut pairs: Vec<((usize, usize), (usize, usize))> = arr
        .lines()
        .iter()
        .map(|l| {
            let a = l.a.as_ref().map(|r| (r.set, r.index)).unwrap_or((usize::MAX, 0));
            let b = l.b.as_ref().map(|r| (r.set, r.index)).unwrap_or((usize::MAX, 0));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    pairs.sort();
    pairs
}

/// Solve a valid family: pad to odd sizes, follow seed arrangements through
/// the schedule, and repair the padding afterwards.
pub fn solve(family: &PointFamily) -> Result<Arrangement, HomotopyError> {
    solve_seeded(family, 0, &mut |_| {})
}

pub fn solve_seeded(
    family: &PointFamily,
    seed: u64,
    trace: &mut dyn FnMut(&TraceRecord),
) -> Result<Arrangement, HomotopyError> {
    let report = family.validate();
    if !report.is_valid() {
        return Err(HomotopyError::InvalidFamily(
            report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let (padded, record) = pad_to_odd(family);
    let (start, schedule) = prepared_start(&padded, seed)?;
    let timeline = Timeline::new(&start, &padded);
    let arr = follow_paths(&timeline, &schedule, trace)?;
    let repaired = repair_after_padding(family, &record, &arr)
        .map_err(|e| HomotopyError::Repair(e.to_string()))?;
    Ok(repaired)
}

/// Walk seed paths through the schedule until one reaches the target level.
///
/// A path that vanishes in a pair turns around and walks its partner
/// backwards; reaching level 0 identifies the partner seed, which is then
/// skipped. A reversed walk can flip forward again when it meets the event
/// where its arrangement was born. Odd start parity guarantees some walk
/// ends at the target.
fn follow_paths(
    timeline: &Timeline,
    schedule: &Schedule,
    trace: &mut dyn FnMut(&TraceRecord),
) -> Result<Arrangement, HomotopyError> {
    let start = StartConfiguration {
        q: timeline.start_family().clone(),
    };
    let k = timeline.start_family().set_count();
    let matchings = crate::brute::perfect_matchings(k);
    let level_count = schedule.level_count();
    let top = level_count - 1;

    let mut matching_index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    for (i, m) in matchings.iter().enumerate() {
        matching_index.insert(m.clone(), i);
    }

    let mut dead: HashSet<usize> = HashSet::new();
    // Vanished pairs recorded by (event, partner key): a later seed walking
    // into that event as the partner is pruned immediately.
    let mut vanished: HashSet<(usize, ArrangementKey)> = HashSet::new();

    let start_cfg = timeline.level_config(schedule, 0);
    for (mi, matching) in matchings.iter().enumerate() {
        if dead.contains(&mi) {
            continue;
        }
        let seed_arr = seed_arrangement(&start, matching)?;
        if !is_bisecting(&start_cfg, &seed_arr) {
            return Err(HomotopyError::BadSeed { index: mi });
        }
        let mut arr = seed_arr;
        let mut level = 0usize;
        let mut up = true;
        let mut visited: HashSet<(usize, ArrangementKey)> = HashSet::new();
        loop {
            if up && level == top {
                return Ok(arr);
            }
            if !up && level == 0 {
                // Walked back to a seed: identify and retire it.
                let partner = matching_of(&arr)?;
                match matching_index.get(&partner) {
                    Some(&pi) => {
                        dead.insert(pi);
                    }
                    None => {
                        return Err(HomotopyError::Internal(
                            "reversed walk ended at a non-matching arrangement".into(),
                        ))
                    }
                }
                break;
            }
            if !visited.insert((level, arr.key())) {
                return Err(HomotopyError::Internal("path revisited a vertex".into()));
            }
            let event_idx = if up { level } else { level - 1 };
            if up && vanished.contains(&(event_idx, arr.key())) {
                // Known partner of an already-vanished path.
                break;
            }
            let next_level = if up { level + 1 } else { level - 1 };
            let cfg_from = timeline.level_config(schedule, level);
            let cfg_to = timeline.level_config(schedule, next_level);
            let outcome = advance(&cfg_from, &cfg_to, &schedule.events[event_idx], &arr)?;
            trace(&TraceRecord {
                seed_index: mi,
                event_index: event_idx,
                direction: if up { "up" } else { "down" },
                outcome: outcome.kind(),
                before: describe(&arr),
                after: match &outcome {
                    StepOutcome::Unaffected => None,
                    StepOutcome::Resolved(b) | StepOutcome::PairVanished(b) => Some(describe(b)),
                },
            });
            match outcome {
                StepOutcome::Unaffected => level = next_level,
                StepOutcome::Resolved(b) => {
                    arr = b;
                    level = next_level;
                }
                StepOutcome::PairVanished(b) => {
                    vanished.insert((event_idx, b.key()));
                    arr = b;
                    up = !up;
                }
            }
        }
    }
    Err(HomotopyError::Internal(
        "all seed paths died; parity guarantees a survivor".into(),
    ))
}

/// The perfect matching of set indices behind a seed-level arrangement.
fn matching_of(arr: &Arrangement) -> Result<Vec<(usize, usize)>, HomotopyError> {
    let mut pairs: Vec<(usize, usize)> = arr
        .lines()
        .iter()
        .map(|l| {
            let a = l.a.as_ref().map(|r| r.set);
            let b = l.b.as_ref().map(|r| r.set);
            match (a, b) {
                (Some(a), Some(b)) if a < b => Ok((a, b)),
                (Some(a), Some(b)) => Ok((b, a)),
                _ => Err(HomotopyError::Internal("free anchor in a seed path".into())),
            }
        })
        .collect::<Result<_, _>>()?;
    pairs.sort();
    Ok(pairs)
}

/// Count of events whose collinear triple involves the mover of each leg;
/// exposed for schedule diagnostics and tests.
pub fn event_count_bound(family: &PointFamily) -> usize {
    let m = family.total_points();
    if m < 3 {
        0
    } else {
        m * (m - 1) * (m - 2) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute;
    use crate::samples;

    fn fam(sets: Vec<Vec<(i64, i64)>>) -> PointFamily {
        PointFamily::new(
            sets.into_iter()
                .map(|s| s.into_iter().map(|(x, y)| Point::from_ints(x, y)).collect())
                .collect(),
        )
    }

    #[test]
    fn start_clusters_match_sizes_and_are_separated() {
        let f = fam(vec![
            vec![(0, 0), (3, 1), (1, 4)],
            vec![(10, 2)],
            vec![(5, 8), (6, 1), (9, 9)],
            vec![(-4, 2)],
        ]);
        let start = make_start(&f).unwrap();
        for s in 0..f.set_count() {
            assert_eq!(start.family().set(s).len(), f.set(s).len());
        }
        assert!(is_well_separated(start.family()));
        assert!(start.family().is_valid());
    }

    #[test]
    fn single_crossing_event_time() {
        // Mover (0,0) -> (1,1) against stationary (1,0) and (0,1): the
        // collinearity x + y = 1 is crossed at t = 1/2.
        let f = fam(vec![vec![(1, 1)], vec![(1, 0)], vec![(0, 1)], vec![(4, 9)]]);
        let start = StartConfiguration {
            q: fam(vec![vec![(0, 0)], vec![(1, 0)], vec![(0, 1)], vec![(4, 9)]]),
        };
        let schedule = event_schedule(&start, &f).unwrap();
        let crossing: Vec<&Event> = schedule
            .events
            .iter()
            .filter(|e| e.mover == PointRef::new(0, 0))
            .filter(|e| {
                let pair_sets = [e.pair.0.set, e.pair.1.set];
                pair_sets.contains(&1) && pair_sets.contains(&2)
            })
            .collect();
        assert_eq!(crossing.len(), 1);
        assert_eq!(crossing[0].time, rat(1, 2));
        assert_eq!(crossing[0].leg, 0);
    }

    #[test]
    fn schedule_is_bounded_and_sorted() {
        let mut r = samples::rng(5);
        let f = samples::random_odd_family(&mut r, 4, 3);
        let (_, schedule) = prepared_start(&f, 0).unwrap();
        assert!(schedule.events.len() <= event_count_bound(&f));
        for w in schedule.events.windows(2) {
            assert!(
                w[0].leg < w[1].leg || (w[0].leg == w[1].leg && w[0].time < w[1].time),
                "events must be sorted by (leg, time)"
            );
        }
    }

    #[test]
    fn consecutive_levels_differ_in_exactly_one_triple() {
        let mut r = samples::rng(9);
        let f = samples::random_odd_family(&mut r, 2, 3);
        let (start, schedule) = prepared_start(&f, 0).unwrap();
        let timeline = Timeline::new(&start, &f);
        let mut previous = timeline.level_config(&schedule, 0);
        for level in 1..schedule.level_count() {
            let current = timeline.level_config(&schedule, level);
            let pts_prev: Vec<_> = previous.points().map(|(_, p)| p.clone()).collect();
            let pts_cur: Vec<_> = current.points().map(|(_, p)| p.clone()).collect();
            let m = pts_prev.len();
            let mut changed = 0usize;
            for i in 0..m {
                for j in (i + 1)..m {
                    for l in (j + 1)..m {
                        let a = orient(&pts_prev[i], &pts_prev[j], &pts_prev[l]);
                        let b = orient(&pts_cur[i], &pts_cur[j], &pts_cur[l]);
                        if a != b {
                            changed += 1;
                        }
                    }
                }
            }
            assert_eq!(changed, 1, "level {level} must flip exactly one triple");
            previous = current;
        }
    }

    #[test]
    fn solver_output_is_a_brute_bisection() {
        for seed in 0..4 {
            let mut r = samples::rng(400 + seed);
            let f = samples::random_odd_family(&mut r, 4, 3);
            let arr = solve(&f).unwrap();
            assert!(is_bisecting(&f, &arr), "seed {seed}");
            let all = brute::enumerate_bisections(&f).unwrap();
            assert!(all.contains(&arr), "seed {seed}: output not in enumeration");
        }
    }

    #[test]
    fn solver_is_deterministic() {
        let mut r = samples::rng(123);
        let f = samples::random_odd_family(&mut r, 4, 3);
        let a = solve(&f).unwrap();
        let b = solve(&f).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn four_singletons_survive_without_events_on_lines() {
        let f = fam(vec![vec![(0, 0)], vec![(7, 1)], vec![(3, 5)], vec![(9, 8)]]);
        let arr = solve(&f).unwrap();
        assert!(is_bisecting(&f, &arr));
        // All three matchings bisect a 4-singleton family at the target.
        assert_eq!(brute::count_bisections(&f).unwrap(), 3);
    }

    #[test]
    fn pair_counts_change_by_zero_or_two_across_events() {
        let mut r = samples::rng(31);
        let f = samples::random_odd_family(&mut r, 4, 3);
        let (start, schedule) = prepared_start(&f, 0).unwrap();
        let timeline = Timeline::new(&start, &f);
        let mut prev_count = brute::count_bisections(&timeline.level_config(&schedule, 0)).unwrap();
        assert_eq!(prev_count, 3);
        for level in 1..schedule.level_count() {
            let cfg = timeline.level_config(&schedule, level);
            let count = brute::count_bisections(&cfg).unwrap();
            let diff = count as i64 - prev_count as i64;
            assert!(
                diff == 0 || diff == 2 || diff == -2,
                "level {level}: count jumped by {diff}"
            );
            assert_eq!(count % 2, 1);
            prev_count = count;
        }
    }
}
