//! JSON files for ensembles, topologies and schemes. Indices are 1-based and
//! rationals are strings such as `"-3/4"`; plain JSON integers are accepted on input.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{Ensemble, EnsembleError};
use crate::exactla::{format_rational, parse_rational, ExactMatrix, IndexSet, Rational};
use crate::tim::{Scheme, SparseAssignment, TimError, Topology};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{location}: bad rational literal {literal:?}")]
    Literal { location: String, literal: String },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Tim(#[from] TimError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Literal {
    Int(i64),
    Text(String),
}

impl Literal {
    fn parse(&self, location: impl FnOnce() -> String) -> Result<Rational, FormatError> {
        match self {
            Literal::Int(v) => Ok(Rational::from_integer((*v).into())),
            Literal::Text(s) => parse_rational(s).map_err(|_| FormatError::Literal {
                location: location(),
                literal: s.clone(),
            }),
        }
    }
}

type ColumnsLit = Vec<Vec<Literal>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    n: usize,
    matrices: Vec<ColumnsLit>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    #[serde(rename = "K")]
    k: usize,
    interference_sets: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentFile {
    tau: usize,
    sets: Vec<Option<Vec<usize>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    n: usize,
    beamformers: Vec<ColumnsLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assignment: Option<AssignmentFile>,
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn matrix_from_columns(n: usize, cols: &ColumnsLit, what: &str) -> Result<ExactMatrix, FormatError> {
    let mut parsed = Vec::with_capacity(cols.len());
    for (c, col) in cols.iter().enumerate() {
        if col.len() != n {
            return Err(FormatError::Shape(format!(
                "{what}, column {}: {} entries, expected {n}",
                c + 1,
                col.len()
            )));
        }
        let v = col
            .iter()
            .enumerate()
            .map(|(r, lit)| lit.parse(|| format!("{what}, column {}, row {}", c + 1, r + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        parsed.push(v);
    }
    ExactMatrix::from_columns(n, &parsed).map_err(|e| FormatError::Shape(format!("{what}: {e}")))
}

fn columns_to_literals(m: &ExactMatrix) -> ColumnsLit {
    m.columns()
        .iter()
        .map(|col| col.iter().map(|x| Literal::Text(format_rational(x))).collect())
        .collect()
}

pub fn parse_ensemble_str(text: &str) -> Result<Ensemble, FormatError> {
    let f: EnsembleFile = serde_json::from_str(text)?;
    let blocks = f
        .matrices
        .iter()
        .enumerate()
        .map(|(i, cols)| matrix_from_columns(f.n, cols, &format!("block {}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    if blocks.is_empty() {
        return Err(EnsembleError::NoBlocks.into());
    }
    Ok(Ensemble::new(blocks)?)
}

pub fn parse_ensemble(path: impl AsRef<Path>) -> Result<Ensemble, FormatError> {
    parse_ensemble_str(&read(path.as_ref())?)
}

pub fn ensemble_to_json(e: &Ensemble) -> serde_json::Value {
    serde_json::to_value(EnsembleFile {
        n: e.n(),
        matrices: e.blocks().iter().map(columns_to_literals).collect(),
    })
    .expect("plain data serializes")
}

pub fn parse_topology_str(text: &str) -> Result<Topology, FormatError> {
    let f: TopologyFile = serde_json::from_str(text)?;
    if f.interference_sets.len() != f.k {
        return Err(FormatError::Shape(format!(
            "K = {} but {} interference sets given",
            f.k,
            f.interference_sets.len()
        )));
    }
    Ok(Topology::from_lists(&f.interference_sets)?)
}

pub fn parse_topology(path: impl AsRef<Path>) -> Result<Topology, FormatError> {
    parse_topology_str(&read(path.as_ref())?)
}

pub fn topology_to_json(t: &Topology) -> serde_json::Value {
    serde_json::to_value(TopologyFile {
        k: t.k(),
        interference_sets: t.interference_sets().iter().map(IndexSet::one_based).collect(),
    })
    .expect("plain data serializes")
}

pub fn parse_scheme_str(text: &str) -> Result<(Scheme, Option<SparseAssignment>), FormatError> {
    let f: SchemeFile = serde_json::from_str(text)?;
    let bs = f
        .beamformers
        .iter()
        .enumerate()
        .map(|(i, cols)| matrix_from_columns(f.n, cols, &format!("beamformer {}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let scheme = Scheme::new(f.n, bs)?;
    let assignment = f
        .assignment
        .map(|a| {
            if a.sets.len() != scheme.k() {
                return Err(FormatError::Shape(format!(
                    "assignment lists {} sets for {} users",
                    a.sets.len(),
                    scheme.k()
                )));
            }
            let sets = a
                .sets
                .iter()
                .enumerate()
                .map(|(r, s)| {
                    s.as_ref()
                        .map(|l| {
                            IndexSet::from_one_based(f.n, l.iter().copied()).map_err(|e| {
                                FormatError::Shape(format!("assignment set {}: {e}", r + 1))
                            })
                        })
                        .transpose()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SparseAssignment {
                n: f.n,
                tau: a.tau,
                sets,
            })
        })
        .transpose()?;
    Ok((scheme, assignment))
}

pub fn parse_scheme(path: impl AsRef<Path>) -> Result<(Scheme, Option<SparseAssignment>), FormatError> {
    parse_scheme_str(&read(path.as_ref())?)
}

pub fn scheme_to_json(s: &Scheme, a: Option<&SparseAssignment>) -> serde_json::Value {
    serde_json::to_value(SchemeFile {
        n: s.n(),
        beamformers: s.beamformers().iter().map(columns_to_literals).collect(),
        assignment: a.map(|a| AssignmentFile {
            tau: a.tau,
            sets: a.sets.iter().map(|s| s.map(|s| s.one_based())).collect(),
        }),
    })
    .expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const E1: &str = r#"{"n": 4, "matrices": [
        [["1","1","1","0"], ["1","2","3","0"]],
        [[1,0,1,0], [0,1,1,0]]
    ]}"#;

    #[test]
    fn e1_loads() {
        let e = parse_ensemble_str(E1).unwrap();
        assert_eq!((e.n(), e.k(), e.r()), (4, 2, 4));
        let back = parse_ensemble_str(&ensemble_to_json(&e).to_string()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn ensemble_load_errors() {
        let dependent = r#"{"n": 2, "matrices": [[["1","0"],["2","0"]]]}"#;
        assert!(matches!(
            parse_ensemble_str(dependent),
            Err(FormatError::Ensemble(EnsembleError::RankDeficient { block: 1, .. }))
        ));
        let zero_den = r#"{"n": 1, "matrices": [[["1/0"]]]}"#;
        match parse_ensemble_str(zero_den) {
            Err(FormatError::Literal { location, literal }) => {
                assert_eq!(literal, "1/0");
                assert!(location.contains("block 1"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_ensemble_str(r#"{"n": 2, "matrices": [[["1"]]]}"#),
            Err(FormatError::Shape(_))
        ));
        assert!(matches!(parse_ensemble_str("{"), Err(FormatError::Json(_))));
    }

    #[test]
    fn topology_round_trip() {
        let text = r#"{"K": 3, "interference_sets": [[2], [], [1, 2]]}"#;
        let t = parse_topology_str(text).unwrap();
        assert_eq!(t.k(), 3);
        assert_eq!(parse_topology_str(&topology_to_json(&t).to_string()).unwrap(), t);
    }

    #[test]
    fn topology_load_errors() {
        for bad in [
            r#"{"K": 2, "interference_sets": [[1], []]}"#,
            r#"{"K": 2, "interference_sets": [[0], []]}"#,
            r#"{"K": 2, "interference_sets": [[3], []]}"#,
            r#"{"K": 3, "interference_sets": [[2], []]}"#,
        ] {
            assert!(parse_topology_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scheme_round_trip() {
        let text = r#"{"n": 3, "beamformers": [[["1","0","0"]], [["1/2","-1","3"]]],
            "assignment": {"tau": 1, "sets": [[1], null]}}"#;
        let (s, a) = parse_scheme_str(text).unwrap();
        let a = a.unwrap();
        assert_eq!(a.sets[0].unwrap().one_based(), vec![1]);
        let (s2, a2) = parse_scheme_str(&scheme_to_json(&s, Some(&a)).to_string()).unwrap();
        assert_eq!((s2, a2.unwrap()), (s, a));
    }
}
