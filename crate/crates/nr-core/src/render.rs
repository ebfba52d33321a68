//! Grid renderings of a completed run: text, CSV, and SVG.
//!
//! Every renderer walks the same (slot, CRB) grid in slot-major order, so
//! identical reports produce byte-identical artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::CellCoord;
use crate::scenario::RunReport;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("unknown render format {0:?}; expected text, csv, or svg")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Csv,
    Svg,
}

impl FromStr for RenderFormat {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            other => Err(RenderError::UnknownFormat(other.to_string())),
        }
    }
}

impl RenderFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Text => "txt",
            Self::Csv => "csv",
            Self::Svg => "svg",
        }
    }
}

/// What occupies one grid cell.
#[derive(Debug, Clone, PartialEq, Eq)]
enum CellTag {
    Protected(String),
    Ue(String),
}

fn cell_map(report: &RunReport) -> BTreeMap<CellCoord, CellTag> {
    let mut map = BTreeMap::new();
    for p in &report.protections {
        for slot in p.slots[0]..=p.slots[1] {
            for crb in p.crbs[0]..=p.crbs[1] {
                map.insert(CellCoord::new(slot, crb), CellTag::Protected(p.label.clone()));
            }
        }
    }
    // Assignments win over protection tags; a successful run has no such
    // overlap, and a violating one should show the offending UE.
    for a in &report.assignments {
        for cell in a.cells() {
            map.insert(cell, CellTag::Ue(a.ue_id.clone()));
        }
    }
    map
}

/// Stable symbol per UE: '1'..'9' then 'a'..'z' in order of first appearance
/// in the report's per-UE stats.
fn ue_symbols(report: &RunReport) -> BTreeMap<String, char> {
    let alphabet: Vec<char> = ('1'..='9').chain('a'..='z').collect();
    report
        .per_ue
        .iter()
        .enumerate()
        .map(|(i, s)| (s.ue_id.clone(), alphabet[i % alphabet.len()]))
        .collect()
}

pub fn render_grid(report: &RunReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Text => render_text(report),
        RenderFormat::Csv => render_csv(report),
        RenderFormat::Svg => render_svg(report),
    }
}

/// One row per slot, one character per CRB: '.' idle, 'P' protected,
/// UE symbol otherwise.
fn render_text(report: &RunReport) -> String {
    let cells = cell_map(report);
    let symbols = ue_symbols(report);
    let mut out = String::new();
    let _ = writeln!(out, "# grid: {} slots x {} CRBs", report.horizon_slots, report.n_crb);
    for (ue, sym) in &symbols {
        let _ = writeln!(out, "# {sym} = {ue}");
    }
    for slot in 0..report.horizon_slots {
        let _ = write!(out, "slot {slot:>3} |");
        for crb in 0..report.n_crb {
            let c = match cells.get(&CellCoord::new(slot, crb)) {
                None => '.',
                Some(CellTag::Protected(_)) => 'P',
                Some(CellTag::Ue(ue)) => symbols.get(ue).copied().unwrap_or('?'),
            };
            out.push(c);
        }
        out.push('\n');
    }
    out
}

/// Slot-major CSV with a fixed header; every cell of the grid is listed.
fn render_csv(report: &RunReport) -> String {
    let cells = cell_map(report);
    let mut out = String::from("slot,crb,occupant\n");
    for slot in 0..report.horizon_slots {
        for crb in 0..report.n_crb {
            let occupant = match cells.get(&CellCoord::new(slot, crb)) {
                None => "idle".to_string(),
                Some(CellTag::Protected(label)) => format!("protected:{label}"),
                Some(CellTag::Ue(ue)) => ue.clone(),
            };
            let _ = writeln!(out, "{slot},{crb},{occupant}");
        }
    }
    out
}

const SVG_CELL: u32 = 8;
const UE_COLORS: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Time on the x axis, frequency on the y axis (CRB 0 at the bottom).
fn render_svg(report: &RunReport) -> String {
    let cells = cell_map(report);
    let symbols = ue_symbols(report);
    let ue_index: BTreeMap<&String, usize> =
        symbols.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let width = report.horizon_slots * SVG_CELL;
    let height = u32::from(report.n_crb) * SVG_CELL;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(out, "<rect width=\"{width}\" height=\"{height}\" fill=\"#f5f5f5\"/>");
    for slot in 0..report.horizon_slots {
        for crb in 0..report.n_crb {
            let fill = match cells.get(&CellCoord::new(slot, crb)) {
                None => continue,
                Some(CellTag::Protected(_)) => "#444444".to_string(),
                Some(CellTag::Ue(ue)) => {
                    UE_COLORS[ue_index.get(ue).copied().unwrap_or(0) % UE_COLORS.len()].to_string()
                }
            };
            let x = slot * SVG_CELL;
            let y = height - u32::from(crb + 1) * SVG_CELL;
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{SVG_CELL}\" height=\"{SVG_CELL}\" fill=\"{fill}\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{run_scenario, RunReport, Scenario};

    fn report() -> RunReport {
        let json = r#"{
            "schema_version": 1,
            "carrier": {"n_crb": 100, "mu": 0},
            "bwps": [
                {"id": 0, "crb_start": 0, "size_rb": 50},
                {"id": 1, "crb_start": 50, "size_rb": 50}
            ],
            "ues": [
                {"ue_id": "ue1", "demand_rbs": 50, "latency_budget_slots": 8, "time_sensitive": false, "rnti": 4097},
                {"ue_id": "ue2", "demand_rbs": 50, "latency_budget_slots": 8, "time_sensitive": false, "rnti": 4098},
                {"ue_id": "ue3", "demand_rbs": 50, "latency_budget_slots": 8, "time_sensitive": false, "rnti": 4099}
            ],
            "horizon_slots": 5,
            "start_slot": 1
        }"#;
        let mut scenario = Scenario::from_json(json).unwrap();
        scenario.ues.truncate(3);
        run_scenario(&scenario).unwrap()
    }

    #[test]
    fn empty_grid_is_all_idle() {
        let mut r = report();
        r.assignments.clear();
        r.protections.clear();
        let text = render_text(&r);
        let grid_rows: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("slot"))
            .collect();
        assert_eq!(grid_rows.len(), 5);
        for row in grid_rows {
            let cells = row.split('|').nth(1).unwrap();
            assert!(cells.chars().all(|c| c == '.'));
        }
    }

    #[test]
    fn csv_matches_verifier_cells() {
        let r = report();
        let csv = render_csv(&r);
        let mut rendered = std::collections::BTreeSet::new();
        for line in csv.lines().skip(1) {
            let mut parts = line.split(',');
            let slot: u32 = parts.next().unwrap().parse().unwrap();
            let crb: u16 = parts.next().unwrap().parse().unwrap();
            let occupant = parts.next().unwrap();
            if occupant != "idle" && !occupant.starts_with("protected:") {
                rendered.insert(CellCoord::new(slot, crb));
            }
        }
        assert_eq!(rendered, r.occupied_cells());
    }

    #[test]
    fn renders_are_deterministic() {
        let a = report();
        let b = report();
        for format in [RenderFormat::Text, RenderFormat::Csv, RenderFormat::Svg] {
            assert_eq!(render_grid(&a, format), render_grid(&b, format));
        }
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<RenderFormat>().unwrap(), RenderFormat::Csv);
        assert!(matches!(
            "pdf".parse::<RenderFormat>(),
            Err(RenderError::UnknownFormat(_))
        ));
    }
}
