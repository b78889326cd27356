use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use serde::Deserialize;
use thiserror::Error;

use crate::arith::SUnitExponents;
use crate::elliptic::{decompose, ModelKind};
use crate::model::{check_solution, Solution, Verdict};

const EMBEDDED: &str = include_str!("../../data/tables.csv");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("line {line}: {row} fails the equation, y^n - x^2 - C = {residual}")]
    FailsEquation {
        line: u64,
        row: String,
        residual: BigInt,
    },
    #[error("line {line}: {row} has gcd(x, y) = {gcd}")]
    NotCoprime {
        line: u64,
        row: String,
        gcd: BigUint,
    },
}

#[derive(Debug, Deserialize)]
struct RawRow {
    table: u8,
    n: u32,
    alpha: u32,
    beta: u32,
    gamma: u32,
    z: u64,
    a: u32,
    b: u32,
    c: u32,
    x: String,
    y: String,
}

/// One printed table line: model exponents, the printed z, and the solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub table: u8,
    /// 1-based position within its table.
    pub row: usize,
    pub model: [u32; 3],
    /// Kept as printed; the actual scale is recomputed from (a, b, c).
    pub z_claimed: u64,
    pub solution: Solution,
}

impl TableRow {
    pub fn anchor(&self) -> String {
        format!("Table {} row {}", self.table, self.row)
    }

    pub fn kind(&self) -> ModelKind {
        if self.solution.n == 4 {
            ModelKind::Quartic
        } else {
            ModelKind::Cubic
        }
    }

    /// (alpha, beta, gamma, z) recomputed from the exponents.
    pub fn recomputed(&self) -> ([u32; 3], BigUint) {
        let (m, z) = decompose(self.solution.exp, self.kind());
        ([m.alpha, m.beta, m.gamma], z)
    }
}

fn parse_big(field: &str, name: &str, line: u64) -> Result<BigUint, TableError> {
    field.trim().parse().map_err(|_| TableError::Malformed {
        line,
        reason: format!("{name} = {field:?} is not a nonnegative integer"),
    })
}

/// Parses CSV text with header `table,n,alpha,beta,gamma,z,a,b,c,x,y` and
/// verifies every row exactly. The first bad row aborts the load.
pub fn parse_tables(text: &str) -> Result<Vec<TableRow>, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| TableError::Malformed {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let mut rows: Vec<TableRow> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| TableError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let raw: RawRow =
            record
                .deserialize(Some(&headers))
                .map_err(|e| TableError::Malformed {
                    line,
                    reason: e.to_string(),
                })?;
        let x = parse_big(&raw.x, "x", line)?;
        let y = parse_big(&raw.y, "y", line)?;
        let solution = Solution::new(x, y, SUnitExponents::new(raw.a, raw.b, raw.c), raw.n)
            .map_err(|e| TableError::Malformed {
                line,
                reason: e.to_string(),
            })?;
        match check_solution(&solution) {
            Verdict::Valid => {}
            Verdict::EquationFails { residual } => {
                return Err(TableError::FailsEquation {
                    line,
                    row: solution.to_string(),
                    residual,
                })
            }
            Verdict::NotCoprime { gcd } => {
                return Err(TableError::NotCoprime {
                    line,
                    row: solution.to_string(),
                    gcd,
                })
            }
        }
        let row = rows.iter().filter(|r| r.table == raw.table).count() + 1;
        rows.push(TableRow {
            table: raw.table,
            row,
            model: [raw.alpha, raw.beta, raw.gamma],
            z_claimed: raw.z,
            solution,
        });
    }
    Ok(rows)
}

pub fn ingest_tables(path: &Path) -> Result<Vec<TableRow>, TableError> {
    let text = fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_tables(&text)
}

/// The six shipped tables.
pub fn embedded_tables() -> Vec<TableRow> {
    parse_tables(EMBEDDED).expect("shipped tables verify")
}

/// Rows of the given tables, as solutions, in file order.
pub fn solutions_of(rows: &[TableRow], tables: &[u8]) -> Vec<Solution> {
    rows.iter()
        .filter(|r| tables.contains(&r.table))
        .map(|r| r.solution.clone())
        .collect()
}

/// Complete solution lists for n = 5, 6 and 10.
pub fn theorem_rows(n: u32) -> Vec<Solution> {
    let rows: &[(u64, u64, (u32, u32, u32))] = match n {
        5 => &[(1, 3, (1, 0, 2)), (241, 9, (3, 0, 2))],
        6 => &[(5, 3, (6, 0, 1)), (37, 5, (4, 4, 1)), (117, 5, (4, 0, 2))],
        10 => &[(241, 3, (3, 0, 2))],
        _ => &[],
    };
    rows.iter()
        .map(|&(x, y, e)| Solution::from_parts(x, y, e, n))
        .collect()
}

/// Which tables hold the full lists and which hold their bc > 0 parts.
pub const MASTER_TABLES: [(u32, &[u8], &[u8]); 2] = [(3, &[1, 2], &[4, 5]), (4, &[3], &[6])];
