use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Per-method count of cells where the method attains the minimum value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WinsTally {
    pub wins: BTreeMap<String, usize>,
    pub cells: usize,
}

impl WinsTally {
    pub fn get(&self, method: &str) -> usize {
        self.wins.get(method).copied().unwrap_or(0)
    }
}

/// `results[method][cell]` holds an error value; lower is better. Every
/// method that ties for the minimum of a cell is credited.
pub fn count_wins(results: &BTreeMap<String, BTreeMap<String, f64>>) -> Result<WinsTally> {
    let cells: std::collections::BTreeSet<&String> =
        results.values().flat_map(|m| m.keys()).collect();
    let mut tally = WinsTally {
        wins: results.keys().map(|m| (m.clone(), 0)).collect(),
        cells: cells.len(),
    };
    for cell in cells {
        let mut best = f64::INFINITY;
        for (method, values) in results {
            let v = *values.get(cell).ok_or_else(|| {
                Error::Data(format!("method '{method}' has no value for cell '{cell}'"))
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("method '{method}', cell '{cell}'")));
            }
            best = best.min(v);
        }
        for (method, values) in results {
            if values[cell] == best {
                *tally.wins.get_mut(method).expect("seeded above") += 1;
            }
        }
    }
    Ok(tally)
}
