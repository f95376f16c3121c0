//! Reference records as JSON documents, for export and for `verify --reference`.

use serde::{Deserialize, Serialize};
use syz_core::refdata::{ReferenceExample, SeriesTable};
use syz_series::rational::{format_rational, parse_rational};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub index: Vec<u32>,
    pub coefficient: String,
}

/// Unlisted indices of total degree up to `extent` are zero; a missing
/// extent means the table is exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub nvars: usize,
    pub extent: Option<u32>,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceDoc {
    pub id: String,
    pub name: String,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub charge_rows: Vec<Vec<i64>>,
    pub pf_operators: Vec<String>,
    pub compact_divisor: Option<usize>,
    pub delta_table: Option<TableDoc>,
    pub inverse_map_table: Vec<TableDoc>,
    pub period_table: Vec<TableDoc>,
    pub notes: String,
}

fn table_doc(t: &SeriesTable) -> TableDoc {
    TableDoc {
        nvars: t.nvars,
        extent: t.extent,
        entries: t
            .entries
            .iter()
            .map(|(index, c)| EntryDoc {
                index: index.clone(),
                coefficient: format_rational(c),
            })
            .collect(),
    }
}

fn table(d: &TableDoc) -> Result<SeriesTable, CliError> {
    let mut entries = Vec::with_capacity(d.entries.len());
    for e in &d.entries {
        if e.index.len() != d.nvars {
            return Err(CliError::Parse(format!(
                "table index {:?} does not have {} entries",
                e.index, d.nvars
            )));
        }
        let c = parse_rational(&e.coefficient).map_err(|err| CliError::Parse(err.to_string()))?;
        entries.push((e.index.clone(), c));
    }
    Ok(SeriesTable {
        nvars: d.nvars,
        extent: d.extent,
        entries,
    })
}

impl ReferenceDoc {
    pub fn from_example(r: &ReferenceExample) -> Self {
        ReferenceDoc {
            id: r.id.clone(),
            name: r.name.clone(),
            rank: r.rank,
            rays: r.rays.clone(),
            max_cones: r.max_cones.clone(),
            charge_rows: r.charge_rows.clone(),
            pf_operators: r.pf_operators.clone(),
            compact_divisor: r.compact_divisor,
            delta_table: r.delta_table.as_ref().map(table_doc),
            inverse_map_table: r.inverse_map_table.iter().map(table_doc).collect(),
            period_table: r.period_table.iter().map(table_doc).collect(),
            notes: r.notes.clone(),
        }
    }

    pub fn to_example(&self) -> Result<ReferenceExample, CliError> {
        Ok(ReferenceExample {
            id: self.id.clone(),
            name: self.name.clone(),
            rank: self.rank,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
            charge_rows: self.charge_rows.clone(),
            pf_operators: self.pf_operators.clone(),
            compact_divisor: self.compact_divisor,
            delta_table: self.delta_table.as_ref().map(table).transpose()?,
            inverse_map_table: self
                .inverse_map_table
                .iter()
                .map(table)
                .collect::<Result<_, _>>()?,
            period_table: self
                .period_table
                .iter()
                .map(table)
                .collect::<Result<_, _>>()?,
            notes: self.notes.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use syz_core::refdata::{lookup_reference, EXAMPLE_IDS};

    #[test]
    fn round_trip_every_record() {
        for id in EXAMPLE_IDS {
            let r = lookup_reference(id).unwrap();
            let doc = ReferenceDoc::from_example(&r);
            let text = serde_json::to_string(&doc).unwrap();
            let back: ReferenceDoc = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_example().unwrap(), r);
        }
    }
}
