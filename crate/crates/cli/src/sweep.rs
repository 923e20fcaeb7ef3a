use std::io::Write;

use indinet::protocol::closed_form::{check_particle_number, closed_form_with_gram};
use indinet::protocol::runners::probability_f64;
use indinet::protocol::{chain_gram, ProtocolKind};
use indinet::Scalar;
use serde::Serialize;

use crate::report::exact_string;
use crate::{Failure, Format};

#[derive(Serialize)]
pub struct Row {
    pub kind: ProtocolKind,
    pub n: usize,
    pub probability_exact: String,
    pub probability_float: f64,
}

/// One row per (kind, n), kinds in the given order, n ascending.
pub fn rows(kinds: &[ProtocolKind], n_max: usize, bound: usize) -> Result<Vec<Row>, Failure> {
    check_particle_number(n_max)?;
    if n_max > bound {
        return Err(Failure::Usage(format!(
            "n_max {n_max} exceeds the permanent bound {bound}"
        )));
    }
    let half = Scalar::from_ratio(1, 2);
    let mut rows = Vec::new();
    for &kind in kinds {
        for n in (4..=n_max).step_by(2) {
            let p = closed_form_with_gram(kind, n, &chain_gram(n, &half), bound)?;
            rows.push(Row {
                kind,
                n,
                probability_exact: exact_string(&p)?,
                probability_float: probability_f64(&p),
            });
        }
    }
    Ok(rows)
}

pub fn write(out: &mut impl Write, rows: &[Row], format: Format) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(e.to_string());
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(rows).expect("rows serialize");
            writeln!(out, "{text}").map_err(io)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            w.flush().map_err(io)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_per_kind_and_n() {
        let Ok(rows) = rows(&ProtocolKind::ALL, 8, 20) else { panic!("sweep failed") };
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[2].probability_exact, "1/16");
        assert!(rows.iter().all(|r| (r.probability_float - r.probability_exact.parse::<Scalar>().unwrap().to_f64()).abs() < 1e-15));
    }

    #[test]
    fn odd_or_oversized_n_rejected() {
        assert!(rows(&ProtocolKind::ALL, 9, 20).is_err());
        assert!(rows(&ProtocolKind::ALL, 10, 8).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = rows(&[ProtocolKind::FermionicShared], 4, 20).ok().unwrap();
        let mut buf = Vec::new();
        assert!(write(&mut buf, &rows, Format::Csv).is_ok());
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "kind,n,probability_exact,probability_float\nfermionic_shared,4,2/9,0.2222222222222222\n"
        );
    }
}
