//! File formats. Instances, solutions and necklace data travel as JSON with
//! every coordinate an exact `numerator/denominator` string; emission is
//! canonical (lowest terms, positive denominator, fixed field order), so
//! identical data serializes to identical bytes.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::geometry::{Anchor, OrientedLine, Point, PointRef, Rational};
use crate::instance::PointFamily;
use crate::necklace::{IntervalLabel, NecklaceInstance, NecklaceSolution};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid rational '{0}'")]
    BadRational(String),
    #[error("zero denominator in '{0}'")]
    ZeroDenominator(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported version {0} (expected 1)")]
    Version(u32),
    #[error("{0}")]
    Structure(String),
}

/// Canonical `numerator/denominator` form, denominator always present.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `numerator/denominator` (or a bare integer); the result is reduced
/// to canonical form.
pub fn parse_rational(s: &str) -> Result<Rational, FormatError> {
    let trimmed = s.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (trimmed, None),
    };
    let numer: BigInt = num
        .parse()
        .map_err(|_| FormatError::BadRational(s.to_string()))?;
    let denom: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| FormatError::BadRational(s.to_string()))?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(FormatError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

fn parse_point(xy: &[String; 2]) -> Result<Point, FormatError> {
    Ok(Point::new(parse_rational(&xy[0])?, parse_rational(&xy[1])?))
}

fn format_point(p: &Point) -> [String; 2] {
    [format_rational(&p.x), format_rational(&p.y)]
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    version: u32,
    n_sets: usize,
    sets: Vec<Vec<[String; 2]>>,
    labels: Vec<String>,
}

/// Canonical JSON for an instance: sets in label order, points in input
/// order, lowest-terms rationals.
pub fn instance_to_json(family: &PointFamily) -> String {
    let file = InstanceFile {
        version: 1,
        n_sets: family.set_count(),
        sets: (0..family.set_count())
            .map(|s| family.set(s).iter().map(format_point).collect())
            .collect(),
        labels: family.labels().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("instance serialization cannot fail")
}

/// Parse an instance file. Structure and rationals are checked here;
/// geometric validity is a separate concern (`PointFamily::validate`).
pub fn instance_from_json(text: &str) -> Result<PointFamily, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Version(file.version));
    }
    if file.n_sets != file.sets.len() {
        return Err(FormatError::Structure(format!(
            "n_sets = {} but {} sets present",
            file.n_sets,
            file.sets.len()
        )));
    }
    if file.labels.len() != file.sets.len() {
        return Err(FormatError::Structure(format!(
            "{} labels for {} sets",
            file.labels.len(),
            file.sets.len()
        )));
    }
    let mut sets = Vec::with_capacity(file.sets.len());
    for wire in &file.sets {
        sets.push(
            wire.iter()
                .map(parse_point)
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(PointFamily::with_labels(sets, file.labels))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AnchorWire {
    Ref([usize; 2]),
    Free { x: String, y: String },
}

impl AnchorWire {
    fn encode(anchor: &Anchor) -> AnchorWire {
        match anchor {
            Anchor::Ref(r) => AnchorWire::Ref([r.set, r.index]),
            Anchor::Free(p) => AnchorWire::Free {
                x: format_rational(&p.x),
                y: format_rational(&p.y),
            },
        }
    }

    fn decode(&self) -> Result<Anchor, FormatError> {
        match self {
            AnchorWire::Ref([set, index]) => Ok(Anchor::Ref(PointRef::new(*set, *index))),
            AnchorWire::Free { x, y } => Ok(Anchor::Free(Point::new(
                parse_rational(x)?,
                parse_rational(y)?,
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LineWire {
    a: AnchorWire,
    b: AnchorWire,
    positive: bool,
}

fn encode_lines(arr: &Arrangement) -> Vec<LineWire> {
    arr.lines()
        .iter()
        .map(|l| LineWire {
            a: AnchorWire::encode(&l.a),
            b: AnchorWire::encode(&l.b),
            positive: l.positive_left,
        })
        .collect()
}

fn decode_lines(wire: &[LineWire]) -> Result<Arrangement, FormatError> {
    let lines = wire
        .iter()
        .map(|w| {
            Ok(OrientedLine {
                a: w.a.decode()?,
                b: w.b.decode()?,
                positive_left: w.positive,
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Arrangement::new(lines))
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    version: u32,
    lines: Vec<LineWire>,
}

pub fn solution_to_json(arr: &Arrangement) -> String {
    let file = SolutionFile {
        version: 1,
        lines: encode_lines(&arr.canonicalized()),
    };
    serde_json::to_string_pretty(&file).expect("solution serialization cannot fail")
}

pub fn solution_from_json(text: &str) -> Result<Arrangement, FormatError> {
    let file: SolutionFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Version(file.version));
    }
    decode_lines(&file.lines)
}

#[derive(Serialize, Deserialize)]
struct SolutionsFile {
    version: u32,
    count: usize,
    solutions: Vec<Vec<LineWire>>,
}

/// Enumeration output: every bisecting arrangement, canonically ordered.
pub fn solutions_to_json(arrs: &[Arrangement]) -> String {
    let file = SolutionsFile {
        version: 1,
        count: arrs.len(),
        solutions: arrs
            .iter()
            .map(|a| encode_lines(&a.canonicalized()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("solutions serialization cannot fail")
}

pub fn solutions_from_json(text: &str) -> Result<Vec<Arrangement>, FormatError> {
    let file: SolutionsFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Version(file.version));
    }
    file.solutions.iter().map(|w| decode_lines(w)).collect()
}

#[derive(Serialize, Deserialize)]
struct NecklaceFile {
    version: u32,
    n_sets: usize,
    sets: Vec<Vec<String>>,
    labels: Vec<String>,
}

pub fn necklace_to_json(inst: &NecklaceInstance) -> String {
    let file = NecklaceFile {
        version: 1,
        n_sets: inst.set_count(),
        sets: inst
            .sets()
            .iter()
            .map(|s| s.iter().map(format_rational).collect())
            .collect(),
        labels: inst.labels().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("necklace serialization cannot fail")
}

pub fn necklace_from_json(text: &str) -> Result<NecklaceInstance, FormatError> {
    let file: NecklaceFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Version(file.version));
    }
    if file.n_sets != file.sets.len() {
        return Err(FormatError::Structure(format!(
            "n_sets = {} but {} sets present",
            file.n_sets,
            file.sets.len()
        )));
    }
    if file.labels.len() != file.sets.len() {
        return Err(FormatError::Structure(format!(
            "{} labels for {} sets",
            file.labels.len(),
            file.sets.len()
        )));
    }
    let sets = file
        .sets
        .iter()
        .map(|s| s.iter().map(|x| parse_rational(x)).collect())
        .collect::<Result<Vec<Vec<Rational>>, _>>()?;
    Ok(NecklaceInstance::with_labels(sets, file.labels))
}

#[derive(Serialize, Deserialize)]
struct NecklaceSolutionFile {
    version: u32,
    cuts: Vec<String>,
    first_label: String,
}

pub fn necklace_solution_to_json(sol: &NecklaceSolution) -> String {
    let file = NecklaceSolutionFile {
        version: 1,
        cuts: sol.cuts.iter().map(format_rational).collect(),
        first_label: match sol.first_label {
            IntervalLabel::Plus => "plus".to_string(),
            IntervalLabel::Minus => "minus".to_string(),
        },
    };
    serde_json::to_string_pretty(&file).expect("necklace solution serialization cannot fail")
}

pub fn necklace_solution_from_json(text: &str) -> Result<NecklaceSolution, FormatError> {
    let file: NecklaceSolutionFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(FormatError::Version(file.version));
    }
    let cuts = file
        .cuts
        .iter()
        .map(|c| parse_rational(c))
        .collect::<Result<Vec<_>, _>>()?;
    let first_label = match file.first_label.as_str() {
        "plus" => IntervalLabel::Plus,
        "minus" => IntervalLabel::Minus,
        other => {
            return Err(FormatError::Structure(format!(
                "first_label must be 'plus' or 'minus', got '{other}'"
            )))
        }
    };
    Ok(NecklaceSolution { cuts, first_label })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;

    #[test]
    fn rational_round_trip_and_canonicalization() {
        assert_eq!(format_rational(&rat(3, 7)), "3/7");
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
        assert_eq!(format_rational(&rat(4, 1)), "4/1");
        assert_eq!(parse_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("1/-2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("5").unwrap(), rat(5, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn instance_round_trip_is_bit_exact() {
        let f = PointFamily::new(vec![
            vec![Point::new(rat(1, 2), rat(-3, 4))],
            vec![Point::from_ints(2, 5)],
        ]);
        let json = instance_to_json(&f);
        let back = instance_from_json(&json).unwrap();
        assert_eq!(back, f);
        assert_eq!(instance_to_json(&back), json);
    }

    #[test]
    fn instance_parser_rejects_bad_structure() {
        assert!(instance_from_json("{}").is_err());
        assert!(instance_from_json("not json").is_err());
        let wrong_count = r#"{"version":1,"n_sets":3,"sets":[[["1/1","2/1"]]],"labels":["P1"]}"#;
        assert!(instance_from_json(wrong_count).is_err());
        let bad_version = r#"{"version":2,"n_sets":1,"sets":[[["1/1","2/1"]]],"labels":["P1"]}"#;
        assert!(matches!(
            instance_from_json(bad_version),
            Err(FormatError::Version(2))
        ));
    }

    #[test]
    fn solution_round_trip_with_free_anchor() {
        let arr = Arrangement::new(vec![OrientedLine {
            a: Anchor::Ref(PointRef::new(0, 1)),
            b: Anchor::Free(Point::new(rat(7, 3), rat(0, 1))),
            positive_left: false,
        }]);
        let json = solution_to_json(&arr);
        let back = solution_from_json(&json).unwrap();
        assert_eq!(back.key(), arr.key());
    }

    #[test]
    fn necklace_round_trip() {
        let inst = NecklaceInstance::new(vec![vec![rat(1, 4), rat(3, 4)], vec![rat(1, 2)]]);
        let back = necklace_from_json(&necklace_to_json(&inst)).unwrap();
        assert_eq!(back, inst);
        let sol = NecklaceSolution {
            cuts: vec![rat(1, 3), rat(2, 3)],
            first_label: IntervalLabel::Minus,
        };
        let back = necklace_solution_from_json(&necklace_solution_to_json(&sol)).unwrap();
        assert_eq!(back, sol);
    }
}
