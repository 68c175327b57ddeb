//! Walls and chambers of the one-parameter stability space of a vine.
//!
//! On a vine the parameter is `(x, -x)` with `x = φ(C1)`, and both
//! subcurves have `cr = e`, so the walls are the points `x = m - e/2`,
//! `m ∈ ℤ`. Stable tables are constant on the open intervals between them.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational, RationalString};
use crate::stability::{is_nondegenerate, stable_sheaf_data, PhiVector, SheafDatum};
use crate::vine::{enumerate_vines, VineCurve};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSet {
    pub window: [RationalString; 2],
    pub positions: Vec<RationalString>,
}

impl WallSet {
    pub fn lo(&self) -> Rational {
        self.window[0].0
    }

    pub fn hi(&self) -> Rational {
        self.window[1].0
    }

    pub fn positions(&self) -> Vec<Rational> {
        self.positions.iter().map(|p| p.0).collect()
    }
}

/// Walls of `vine` in the closed window `[lo, hi]`.
pub fn walls(vine: &VineCurve, lo: Rational, hi: Rational) -> Result<WallSet> {
    if lo > hi {
        return Err(Error::Precondition(format!(
            "empty window {}..{}",
            format_rational(&lo),
            format_rational(&hi)
        )));
    }
    let half_e = Rational::new(vine.e as i64, 2);
    let first = (lo + half_e).ceil().to_integer();
    let last = (hi + half_e).floor().to_integer();
    let positions = (first..=last)
        .map(|m| RationalString(int(m) - half_e))
        .collect();
    Ok(WallSet {
        window: [RationalString(lo), RationalString(hi)],
        positions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub lo: Rational,
    pub hi: Rational,
    pub representative: Rational,
    pub stable_table: Vec<SheafDatum>,
    pub is_small_perturbation: bool,
}

impl Chamber {
    pub fn table_string(&self) -> String {
        table_string(&self.stable_table)
    }

    pub fn contains_line_bundle(&self, bidegree: (i64, i64)) -> bool {
        self.stable_table
            .iter()
            .any(|f| f.is_line_bundle() && f.degrees() == [bidegree.0, bidegree.1])
    }
}

pub fn table_string(table: &[SheafDatum]) -> String {
    table
        .iter()
        .map(|f| f.compact())
        .collect::<Vec<_>>()
        .join(";")
}

/// Degree-0 stable data on `vine` at `φ(C1) = x`.
pub fn stable_table_at(
    vine: &VineCurve,
    x: Rational,
    include_nonfree: bool,
) -> Result<Vec<SheafDatum>> {
    stable_sheaf_data(&vine.to_graph(), &PhiVector::on_vine(x), 0, include_nonfree)
}

/// The maximal open intervals of `[lo, hi]` minus the walls.
pub fn chambers(
    vine: &VineCurve,
    lo: Rational,
    hi: Rational,
    include_nonfree: bool,
) -> Result<Vec<Chamber>> {
    let wall_set = walls(vine, lo, hi)?;
    let mut cuts: Vec<Rational> = vec![lo];
    cuts.extend(wall_set.positions());
    cuts.push(hi);
    cuts.dedup();

    let graph = vine.to_graph();
    let half_e = Rational::new(vine.e as i64, 2);
    let mut out = Vec::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a >= b {
            continue;
        }
        let mut representative = (a + b) / 2;
        if !is_nondegenerate(&graph, &PhiVector::on_vine(representative))? {
            representative += (b - a) / 1000;
        }
        let stable_table = stable_sheaf_data(
            &graph,
            &PhiVector::on_vine(representative),
            0,
            include_nonfree,
        )?;
        out.push(Chamber {
            lo: a,
            hi: b,
            representative,
            stable_table,
            is_small_perturbation: -half_e <= a && b <= half_e,
        });
    }
    Ok(out)
}

/// The `e` chambers inside `(-e/2, e/2)` with their line-bundle tables.
pub fn small_perturbation_chambers(vine: &VineCurve) -> Result<Vec<Chamber>> {
    let half_e = Rational::new(vine.e as i64, 2);
    chambers(vine, -half_e, half_e, false)
}

/// Stable data gained and lost when crossing `wall` from left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallCrossing {
    pub wall: Rational,
    pub left_only: Vec<SheafDatum>,
    pub right_only: Vec<SheafDatum>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasRecord {
    pub g: u32,
    pub n: u32,
    pub vine: VineCurve,
    pub walls: WallSet,
    pub chambers: Vec<Chamber>,
    pub crossings: Vec<WallCrossing>,
}

pub fn atlas_record(
    g: u32,
    n: u32,
    vine: &VineCurve,
    lo: Rational,
    hi: Rational,
    include_nonfree: bool,
) -> Result<AtlasRecord> {
    let wall_set = walls(vine, lo, hi)?;
    let chambers = chambers(vine, lo, hi, include_nonfree)?;
    let crossings = chambers
        .windows(2)
        .map(|pair| {
            let left: BTreeSet<_> = pair[0].stable_table.iter().cloned().collect();
            let right: BTreeSet<_> = pair[1].stable_table.iter().cloned().collect();
            WallCrossing {
                wall: pair[0].hi,
                left_only: left.difference(&right).cloned().collect(),
                right_only: right.difference(&left).cloned().collect(),
            }
        })
        .collect();
    Ok(AtlasRecord {
        g,
        n,
        vine: vine.clone(),
        walls: wall_set,
        chambers,
        crossings,
    })
}

/// One record per vine of `enumerate_vines(g, n, 1)`, in canonical vine order.
pub fn atlas(
    g: u32,
    n: u32,
    lo: Rational,
    hi: Rational,
    include_nonfree: bool,
) -> Result<Vec<AtlasRecord>> {
    if g < 1 || n < 1 {
        return Err(Error::Precondition("atlas needs g >= 1 and n >= 1".into()));
    }
    let vines = enumerate_vines(g, n, 1);
    let mut records = vines
        .par_iter()
        .map(|v| atlas_record(g, n, v, lo, hi, include_nonfree))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.vine.cmp(&b.vine));
    Ok(records)
}

#[derive(Serialize, Deserialize)]
pub struct ChamberJson {
    pub lo: RationalString,
    pub hi: RationalString,
    pub representative: RationalString,
    pub is_small_perturbation: bool,
    pub stable_table: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct CrossingJson {
    pub wall: RationalString,
    pub left_only: Vec<String>,
    pub right_only: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct AtlasRecordJson {
    pub g: u32,
    pub n: u32,
    pub vine: VineCurve,
    pub walls: WallSet,
    pub chambers: Vec<ChamberJson>,
    pub wall_crossings: Vec<CrossingJson>,
}

impl From<&AtlasRecord> for AtlasRecordJson {
    fn from(r: &AtlasRecord) -> Self {
        let compact = |t: &[SheafDatum]| t.iter().map(|f| f.compact()).collect();
        AtlasRecordJson {
            g: r.g,
            n: r.n,
            vine: r.vine.clone(),
            walls: r.walls.clone(),
            chambers: r
                .chambers
                .iter()
                .map(|c| ChamberJson {
                    lo: RationalString(c.lo),
                    hi: RationalString(c.hi),
                    representative: RationalString(c.representative),
                    is_small_perturbation: c.is_small_perturbation,
                    stable_table: compact(&c.stable_table),
                })
                .collect(),
            wall_crossings: r
                .crossings
                .iter()
                .map(|x| CrossingJson {
                    wall: RationalString(x.wall),
                    left_only: compact(&x.left_only),
                    right_only: compact(&x.right_only),
                })
                .collect(),
        }
    }
}

pub fn write_json<W: Write>(records: &[AtlasRecord], mut out: W) -> Result<()> {
    let json: Vec<AtlasRecordJson> = records.iter().map(AtlasRecordJson::from).collect();
    serde_json::to_writer_pretty(&mut out, &json)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub const CSV_HEADER: [&str; 10] = [
    "g",
    "n",
    "g1",
    "g2",
    "e",
    "S",
    "chamber_lo",
    "chamber_hi",
    "is_small_perturbation",
    "table",
];

pub fn write_csv<W: Write>(records: &[AtlasRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        let s = format!(
            "{{{}}}",
            r.vine
                .side1
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        for c in &r.chambers {
            writer.write_record([
                r.g.to_string(),
                r.n.to_string(),
                r.vine.g1.to_string(),
                r.vine.g2.to_string(),
                r.vine.e.to_string(),
                s.clone(),
                format_rational(&c.lo),
                format_rational(&c.hi),
                c.is_small_perturbation.to_string(),
                c.table_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlasFormat {
    Json,
    Csv,
}

pub fn export(records: &[AtlasRecord], path: &Path, format: AtlasFormat) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let writer = std::io::BufWriter::new(file);
    match format {
        AtlasFormat::Json => write_json(records, writer),
        AtlasFormat::Csv => write_csv(records, writer),
    }
}
