use serde::{Deserialize, Serialize};

use super::StateSpaceSystem;
use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// On-disk system description. Matrices are arrays of rows.
#[derive(Debug, Serialize, Deserialize)]
struct SystemFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    h: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

fn to_matrix(label: &str, rows: &[Vec<f64>]) -> Result<Matrix> {
    let Some(first) = rows.first() else {
        return Err(Error::Parse {
            message: format!("matrix \"{label}\" has no rows"),
            row: None,
            col: None,
        });
    };
    let width = first.len();
    if width == 0 {
        return Err(Error::Parse {
            message: format!("matrix \"{label}\" has empty rows"),
            row: Some(0),
            col: None,
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Parse {
                message: format!(
                    "matrix \"{label}\": row {i} has {} entries, expected {width}",
                    row.len()
                ),
                row: Some(i),
                col: Some(row.len().min(width)),
            });
        }
    }
    Matrix::from_rows(rows)
}

/// Parses a system from its JSON description.
pub fn load_system(text: &str) -> Result<StateSpaceSystem> {
    let file: SystemFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        message: e.to_string(),
        row: Some(e.line()),
        col: Some(e.column()),
    })?;
    let a = to_matrix("A", &file.a)?;
    let b = to_matrix("B", &file.b)?;
    let h = file.h.as_deref().map(|h| to_matrix("H", h)).transpose()?;
    let sys = StateSpaceSystem::new(a, b, h)?;
    Ok(match file.name {
        Some(name) => sys.with_name(name),
        None => sys,
    })
}

/// Serializes a system to pretty-printed JSON.
pub fn save_system(sys: &StateSpaceSystem) -> String {
    let file = SystemFile {
        a: sys.a().to_rows(),
        b: sys.b().to_rows(),
        h: sys.h().map(Matrix::to_rows),
        name: sys.name().map(str::to_owned),
    };
    serde_json::to_string_pretty(&file).expect("system serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = r#"{
        "name": "example",
        "A": [[2, 1, 0, 0], [0, 1, 0, 1], [0, 2, 0, 0], [1, 1, 0, 0]],
        "B": [[1, 0], [0, 0], [0, 1], [0, 1]]
    }"#;

    #[test]
    fn loads_example_system() {
        let sys = load_system(EX1).unwrap();
        assert_eq!((sys.states(), sys.inputs()), (4, 2));
        assert_eq!(sys.a()[(2, 1)], 2.0);
        assert_eq!(sys.b()[(3, 1)], 1.0);
        assert!(sys.h().is_none());
        assert_eq!(sys.name(), Some("example"));
    }

    #[test]
    fn round_trip_with_output() {
        let h = Matrix::from_rows(&[[1.0, 0.0, 1.0, -1.0], [0.0, 5.0, 6.0, -5.0]]).unwrap();
        let sys = load_system(EX1).unwrap().with_output(h).unwrap();
        assert_eq!(load_system(&save_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn round_trip_preserves_awkward_decimals() {
        let a = Matrix::from_rows(&[[0.1, 1.0 / 3.0], [-2.5e-17, 6.02214076e23]]).unwrap();
        let sys = StateSpaceSystem::new(a, Matrix::column(&[1.0, 0.0]), None).unwrap();
        assert_eq!(load_system(&save_system(&sys)).unwrap(), sys);
    }

    #[test]
    fn ragged_rows_report_location() {
        let err = load_system(r#"{"A": [[1, 2], [3]], "B": [[1], [0]]}"#).unwrap_err();
        match err {
            Error::Parse { row, message, .. } => {
                assert_eq!(row, Some(1));
                assert!(message.contains("\"A\""));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_and_dimension_errors() {
        assert!(matches!(
            load_system("{\"A\": [[1]]"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_system(r#"{"A": [[1, 0], [0, 1]], "B": [[1]]}"#),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            load_system(r#"{"A": [], "B": [[1]]}"#),
            Err(Error::Parse { .. })
        ));
    }
}
