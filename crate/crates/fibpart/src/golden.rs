//! Golden fixtures: expected outputs committed as plain text.
//!
//! The matrices are space-separated rows.  [`parse_int_grid`] is the shared
//! reader; it rejects ragged input so a corrupted fixture fails loudly.

/// First 4x4 corner of the greedy mex matrix.
pub const MATRIX_4X4: &str = include_str!("../fixtures/golden/matrix_4x4.txt");

/// First 20x20 corner of the greedy mex matrix.
pub const MATRIX_20X20: &str = include_str!("../fixtures/golden/matrix_20x20.txt");

/// A 9-run, 4-factor, 3-level orthogonal array of strength 2 and index 1.
pub const OA_9X4: &str = include_str!("../fixtures/golden/oa_9x4.txt");

/// Parses a whitespace-separated integer grid, requiring equal row lengths.
pub fn parse_int_grid(text: &str) -> Result<Vec<Vec<i64>>, String> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if let Some(first) = rows.first() {
            let first: &Vec<i64> = first;
            if first.len() != row.len() {
                return Err(format!(
                    "line {}: expected {} entries, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("no rows".into());
    }
    Ok(rows)
}
