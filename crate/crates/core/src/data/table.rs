//! Raw tabular data: CSV ingestion, derived columns, and mean imputation.

use std::collections::BTreeSet;
use std::path::Path;

use crate::data::frame::RecordId;
use crate::data::mapping::{ColumnMapping, Letter};
use crate::error::{Error, Result};

/// One table cell: a finite number or a missing value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Missing,
    Value(f64),
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Missing => None,
            Cell::Value(v) => Some(v),
        }
    }

    pub fn is_missing(self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// A rectangular table of numeric cells with unique column names.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl RawTable {
    /// Build a table, checking that rows are rectangular and headers unique.
    pub fn new(headers: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        let unique: BTreeSet<&str> = headers.iter().map(String::as_str).collect();
        if unique.len() != headers.len() {
            return Err(Error::InvalidConfig {
                message: "table headers are not unique".into(),
            });
        }
        for row in &rows {
            if row.len() != headers.len() {
                return Err(Error::InvalidConfig {
                    message: format!(
                        "row has {} cells, expected {}",
                        row.len(),
                        headers.len()
                    ),
                });
            }
        }
        Ok(RawTable { headers, rows })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.headers.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Keep only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<RawTable> {
        let mut indices = Vec::with_capacity(names.len());
        for name in names {
            let idx = self.column_index(name).ok_or_else(|| Error::MissingHeader {
                name: (*name).to_string(),
            })?;
            indices.push(idx);
        }
        let rows = self
            .rows
            .iter()
            .map(|row| indices.iter().map(|&i| row[i]).collect())
            .collect();
        RawTable::new(names.iter().map(|n| n.to_string()).collect(), rows)
    }
}

/// Parse one currency cell. Leading `$`, thousands separators, interior
/// whitespace, and parenthesized negatives are all normalized; anything
/// that still fails to parse as a finite number becomes [`Cell::Missing`].
pub fn parse_currency(raw: &str) -> Cell {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Cell::Missing;
    }
    let mut cleaned = String::with_capacity(trimmed.len());
    let mut negative = false;
    let mut depth = 0u32;
    for ch in trimmed.chars() {
        match ch {
            '(' => {
                negative = true;
                depth += 1;
            }
            ')' => {
                if depth == 0 {
                    return Cell::Missing;
                }
                depth -= 1;
            }
            '$' | ',' => {}
            c if c.is_whitespace() => {}
            c => cleaned.push(c),
        }
    }
    if depth != 0 {
        return Cell::Missing;
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v.is_finite() => Cell::Value(if negative { -v } else { v }),
        _ => Cell::Missing,
    }
}

/// Read an award-level CSV and return the record identifiers alongside the
/// table restricted to columns A–G in letter order.
pub fn ingest_csv(
    path: impl AsRef<Path>,
    mapping: &ColumnMapping,
) -> Result<(Vec<RecordId>, RawTable)> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileNotFound {
            path: path.display().to_string(),
        });
    }
    mapping.validate()?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let position_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingHeader {
                name: name.to_string(),
            })
    };

    let id_idx = position_of(&mapping.id_column)?;
    let mut letter_indices = Vec::with_capacity(Letter::ORIGINAL.len());
    for letter in Letter::ORIGINAL {
        // validate() guarantees the key exists
        let header = mapping.header_for(letter).expect("validated mapping");
        letter_indices.push(position_of(header)?);
    }

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let id = record.get(id_idx).unwrap_or("").trim();
        if id.is_empty() {
            return Err(Error::EmptyRecordId { row: row_no + 1 });
        }
        ids.push(RecordId::new(id));
        rows.push(
            letter_indices
                .iter()
                .map(|&i| parse_currency(record.get(i).unwrap_or("")))
                .collect(),
        );
    }
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }

    let mut seen = BTreeSet::new();
    let mut duplicates = BTreeSet::new();
    for id in &ids {
        if !seen.insert(id.as_str()) {
            duplicates.insert(id.as_str().to_string());
        }
    }
    if !duplicates.is_empty() {
        return Err(Error::DuplicateRecordIds {
            ids: duplicates.into_iter().collect(),
        });
    }

    let headers = Letter::ORIGINAL
        .iter()
        .map(|l| l.as_str().to_string())
        .collect();
    Ok((ids, RawTable::new(headers, rows)?))
}

/// Append the derived columns H–J. A missing operand makes the derived cell
/// missing as well.
pub fn compute_derived(table: &RawTable, mapping: &ColumnMapping) -> Result<RawTable> {
    mapping.validate()?;
    let mut operand_indices = Vec::new();
    for (letter, formula) in &mapping.derived {
        let lhs = table
            .column_index(formula.lhs.as_str())
            .ok_or_else(|| Error::MissingHeader {
                name: formula.lhs.as_str().to_string(),
            })?;
        let rhs = table
            .column_index(formula.rhs.as_str())
            .ok_or_else(|| Error::MissingHeader {
                name: formula.rhs.as_str().to_string(),
            })?;
        operand_indices.push((*letter, *formula, lhs, rhs));
    }

    let mut headers = table.headers().to_vec();
    let mut rows = table.rows().to_vec();
    for (letter, formula, lhs, rhs) in operand_indices {
        headers.push(letter.as_str().to_string());
        for row in rows.iter_mut() {
            let cell = match (row[lhs], row[rhs]) {
                (Cell::Value(a), Cell::Value(b)) => Cell::Value(formula.apply(a, b)),
                _ => Cell::Missing,
            };
            row.push(cell);
        }
    }
    RawTable::new(headers, rows)
}

/// Replace every missing cell by the arithmetic mean of the observed cells
/// in its column.
pub fn impute_mean(table: &RawTable) -> Result<RawTable> {
    let n_cols = table.n_cols();
    let mut sums = vec![0.0f64; n_cols];
    let mut counts = vec![0usize; n_cols];
    for row in table.rows() {
        for (j, cell) in row.iter().enumerate() {
            if let Cell::Value(v) = cell {
                sums[j] += v;
                counts[j] += 1;
            }
        }
    }
    let mut means = vec![0.0f64; n_cols];
    for j in 0..n_cols {
        if counts[j] == 0 {
            return Err(Error::AllMissingColumn {
                column: table.headers()[j].clone(),
            });
        }
        means[j] = sums[j] / counts[j] as f64;
    }
    let rows = table
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, cell)| match cell {
                    Cell::Missing => Cell::Value(means[j]),
                    value => *value,
                })
                .collect()
        })
        .collect();
    RawTable::new(table.headers().to_vec(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::mapping::DerivedFormula;
    use std::io::Write;

    fn mapping() -> ColumnMapping {
        ColumnMapping::default()
    }

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file
    }

    const HEADER: &str = "contract_award_unique_key,federal_action_obligation,\
total_dollars_obligated,total_outlayed_amount_for_overall_award,\
base_and_exercised_options_value,current_total_value_of_award,\
base_and_all_options_value,potential_total_value_of_award";

    #[test]
    fn parses_plain_and_currency_cells() {
        assert_eq!(parse_currency("96270"), Cell::Value(96270.0));
        assert_eq!(parse_currency("$1,234.50"), Cell::Value(1234.5));
        assert_eq!(parse_currency("(500)"), Cell::Value(-500.0));
        assert_eq!(parse_currency("$(1,000.25)"), Cell::Value(-1000.25));
        assert_eq!(parse_currency(" 12 345 "), Cell::Value(12345.0));
        assert_eq!(parse_currency("abc"), Cell::Missing);
        assert_eq!(parse_currency(""), Cell::Missing);
        assert_eq!(parse_currency("inf"), Cell::Missing);
        assert_eq!(parse_currency("NaN"), Cell::Missing);
        assert_eq!(parse_currency("(42"), Cell::Missing);
    }

    #[test]
    fn ingest_restricts_to_letters_in_order() {
        let file = write_csv(&format!(
            "{HEADER}\nAWD-1,96270,96270,96270,96270,96270,96270,96270\n\
AWD-2,1,2,3,4,5,6,7\n"
        ));
        let (ids, table) = ingest_csv(file.path(), &mapping()).unwrap();
        assert_eq!(ids.len(), 2);
        assert_eq!(ids[0].as_str(), "AWD-1");
        assert_eq!(
            table.headers(),
            &["A", "B", "C", "D", "E", "F", "G"]
        );
        assert_eq!(table.rows()[0], vec![Cell::Value(96270.0); 7]);
        assert_eq!(table.rows()[1][6], Cell::Value(7.0));
    }

    #[test]
    fn ingest_turns_unparseable_cells_into_missing() {
        let file = write_csv(&format!("{HEADER}\nAWD-1,abc,2,3,4,5,6,7\n"));
        let (_, table) = ingest_csv(file.path(), &mapping()).unwrap();
        assert_eq!(table.rows()[0][0], Cell::Missing);
    }

    #[test]
    fn ingest_errors() {
        assert!(matches!(
            ingest_csv("/nonexistent/file.csv", &mapping()),
            Err(Error::FileNotFound { .. })
        ));

        let file = write_csv("a,b\n1,2\n");
        assert!(matches!(
            ingest_csv(file.path(), &mapping()),
            Err(Error::MissingHeader { .. })
        ));

        let file = write_csv(&format!("{HEADER}\n"));
        assert!(matches!(
            ingest_csv(file.path(), &mapping()),
            Err(Error::EmptyTable)
        ));

        let file = write_csv(&format!(
            "{HEADER}\nAWD-1,1,2,3,4,5,6,7\nAWD-1,1,2,3,4,5,6,7\n"
        ));
        match ingest_csv(file.path(), &mapping()) {
            Err(Error::DuplicateRecordIds { ids }) => assert_eq!(ids, vec!["AWD-1"]),
            other => panic!("expected duplicate-id error, got {other:?}"),
        }
    }

    fn letters_table(rows: Vec<Vec<Cell>>) -> RawTable {
        let headers = Letter::ORIGINAL
            .iter()
            .map(|l| l.as_str().to_string())
            .collect();
        RawTable::new(headers, rows).unwrap()
    }

    #[test]
    fn derived_columns_follow_letter_formulas() {
        // A=10, B=C=0, D=4, E=12, F=7, G=9 -> H=6, I=2, J=2
        let table = letters_table(vec![vec![
            Cell::Value(10.0),
            Cell::Value(0.0),
            Cell::Value(0.0),
            Cell::Value(4.0),
            Cell::Value(12.0),
            Cell::Value(7.0),
            Cell::Value(9.0),
        ]]);
        let derived = compute_derived(&table, &mapping()).unwrap();
        assert_eq!(
            derived.headers(),
            &["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"]
        );
        let row = &derived.rows()[0];
        assert_eq!(row[7], Cell::Value(6.0));
        assert_eq!(row[8], Cell::Value(2.0));
        assert_eq!(row[9], Cell::Value(2.0));
    }

    #[test]
    fn identical_award_amounts_zero_out_derived_columns() {
        let table = letters_table(vec![vec![Cell::Value(96270.0); 7]]);
        let derived = compute_derived(&table, &mapping()).unwrap();
        let row = &derived.rows()[0];
        assert_eq!(row[7], Cell::Value(0.0));
        assert_eq!(row[8], Cell::Value(0.0));
        assert_eq!(row[9], Cell::Value(0.0));
    }

    #[test]
    fn missing_operand_propagates_to_derived_cell() {
        let mut cells = vec![Cell::Value(1.0); 7];
        cells[0] = Cell::Missing; // A missing -> H and I missing, J fine
        let table = letters_table(vec![cells]);
        let derived = compute_derived(&table, &mapping()).unwrap();
        let row = &derived.rows()[0];
        assert_eq!(row[7], Cell::Missing);
        assert_eq!(row[8], Cell::Missing);
        assert_eq!(row[9], Cell::Value(0.0));
    }

    #[test]
    fn custom_derived_formula_is_honored() {
        let mut custom = mapping();
        custom
            .derived
            .insert(Letter::H, DerivedFormula::sub(Letter::D, Letter::A));
        let table = letters_table(vec![vec![
            Cell::Value(10.0),
            Cell::Value(0.0),
            Cell::Value(0.0),
            Cell::Value(4.0),
            Cell::Value(12.0),
            Cell::Value(7.0),
            Cell::Value(9.0),
        ]]);
        let derived = compute_derived(&table, &custom).unwrap();
        assert_eq!(derived.rows()[0][7], Cell::Value(-6.0));
    }

    #[test]
    fn imputation_fills_missing_with_column_mean() {
        let table = RawTable::new(
            vec!["x".into()],
            vec![
                vec![Cell::Value(1.0)],
                vec![Cell::Missing],
                vec![Cell::Value(3.0)],
            ],
        )
        .unwrap();
        let imputed = impute_mean(&table).unwrap();
        assert_eq!(
            imputed.rows(),
            &[
                vec![Cell::Value(1.0)],
                vec![Cell::Value(2.0)],
                vec![Cell::Value(3.0)],
            ]
        );
    }

    #[test]
    fn imputation_leaves_complete_columns_unchanged() {
        let table = RawTable::new(
            vec!["x".into()],
            vec![vec![Cell::Value(5.5)], vec![Cell::Value(-1.0)]],
        )
        .unwrap();
        assert_eq!(impute_mean(&table).unwrap(), table);
    }

    #[test]
    fn all_missing_column_is_an_error() {
        let table = RawTable::new(
            vec!["x".into()],
            vec![vec![Cell::Missing], vec![Cell::Missing]],
        )
        .unwrap();
        assert!(matches!(
            impute_mean(&table),
            Err(Error::AllMissingColumn { .. })
        ));
    }
}
