use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use mzi_duality::duality::{
    fringe_samples, predictive_report, retrodictive_probabilities, PredictiveReport, RetrodictiveReport,
};
use mzi_duality::interferometer::DetectorModel;
use mzi_duality::protocols::{
    efficiency_grid, frontier_sweep, run_game, trial_records, AlternativeGame, FrontierPoint, Game, GameStats,
    PredictiveGame, PredictiveMode, RetrodictiveGame, TrialRecord,
};
use mzi_duality::states::{family_distances, make_input_state, Bit, InputLabel, PathState};
use serde::Serialize;
use serde_json::Value;

use crate::config::{GameKind, Input};
use crate::output::{emit, num, to_json, FieldTable};

/// Family state with both bits `+1`: weights set by `α`, relative phase `φ`.
fn family_state(input: &Input) -> Result<PathState> {
    let label = InputLabel::new(Bit::Plus, Bit::Plus, input.alpha, input.phi)?;
    Ok(make_input_state(&label))
}

fn efficiency(input: &Input) -> f64 {
    input.efficiency.expect("detector flags are required for this command")
}

/// Flattens a JSON document into dotted `field,value` rows.
fn flatten(prefix: &str, v: &Value, table: &mut FieldTable) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, table);
            }
        }
        Value::Null => {
            table.row(prefix, "");
        }
        Value::String(s) => {
            table.row(prefix, s);
        }
        other => {
            table.row(prefix, other.to_string());
        }
    }
}

fn render<T: Serialize>(doc: &T, csv: bool) -> Result<String> {
    if csv {
        let mut table = FieldTable::new();
        flatten("", &serde_json::to_value(doc)?, &mut table);
        Ok(table.finish())
    } else {
        to_json(doc)
    }
}

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    pub input: Input,
    pub predictive: PredictiveReport,
    pub retrodictive: RetrodictiveReport,
}

pub fn report_doc(input: &Input) -> Result<ReportDoc> {
    let e = efficiency(input);
    let det = DetectorModel::from_efficiency(e)?;
    Ok(ReportDoc {
        input: *input,
        predictive: predictive_report(&family_state(input)?, &det)?,
        retrodictive: retrodictive_probabilities(input.alpha, input.phi, e)?,
    })
}

pub fn report(input: &Input, csv: bool, out: Option<&Path>) -> Result<()> {
    emit(out, &render(&report_doc(input)?, csv)?)
}

#[derive(Debug, Serialize)]
pub struct FringePoint {
    pub phase: f64,
    pub p_plus: f64,
}

#[derive(Debug, Serialize)]
pub struct FringeDoc {
    pub input: Input,
    pub grid: usize,
    pub points: Vec<FringePoint>,
}

pub fn fringe_doc(input: &Input, grid: usize) -> Result<FringeDoc> {
    let det = DetectorModel::from_efficiency(efficiency(input))?;
    let points = fringe_samples(&family_state(input)?, &det, grid)?
        .into_iter()
        .map(|(phase, p_plus)| FringePoint { phase, p_plus })
        .collect();
    Ok(FringeDoc {
        input: *input,
        grid,
        points,
    })
}

pub fn fringe(input: &Input, grid: usize, csv: bool, out: Option<&Path>) -> Result<()> {
    let doc = fringe_doc(input, grid)?;
    let text = if csv {
        let mut s = String::from("phase,p_plus\n");
        for p in &doc.points {
            writeln!(s, "{:.16e},{:.16e}", p.phase, p.p_plus)?;
        }
        s
    } else {
        to_json(&doc)?
    };
    emit(out, &text)
}

#[derive(Debug, Serialize)]
pub struct FrontierDoc {
    pub alpha: f64,
    pub phi: f64,
    pub d_ww: f64,
    pub d_wp: f64,
    pub points: Vec<FrontierPoint>,
}

pub fn frontier_doc(input: &Input, points: usize) -> Result<FrontierDoc> {
    let d = family_distances(input.alpha, input.phi)?;
    Ok(FrontierDoc {
        alpha: input.alpha,
        phi: input.phi,
        d_ww: d.d_ww,
        d_wp: d.d_wp,
        points: frontier_sweep(input.alpha, input.phi, &efficiency_grid(points))?,
    })
}

pub fn frontier(input: &Input, points: usize, csv: bool, out: Option<&Path>) -> Result<()> {
    let doc = frontier_doc(input, points)?;
    let text = if csv {
        let mut s = String::from("efficiency,p_ww,p_wp\n");
        for p in &doc.points {
            writeln!(s, "{},{},{}", num(p.efficiency), num(p.p_ww), num(p.p_wp))?;
        }
        s
    } else {
        to_json(&doc)?
    };
    emit(out, &text)
}

#[derive(Debug, Serialize)]
pub struct GameDoc {
    pub input: Input,
    pub averaged: bool,
    pub stats: GameStats,
}

pub struct GameRun {
    pub kind: GameKind,
    pub n: u64,
    pub seed: u64,
    pub averaged: bool,
}

fn bit_cell(b: Option<Bit>) -> String {
    b.map(|b| b.value().to_string()).unwrap_or_default()
}

/// Per-trial CSV: `trial,b_ww,b_wp,port_bit,pol_bit,g_ww,g_wp`.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut s = String::with_capacity(32 * (records.len() + 1));
    s.push_str("trial,b_ww,b_wp,port_bit,pol_bit,g_ww,g_wp\n");
    for r in records {
        let (b_ww, b_wp) = r.hidden.bits();
        let cells = [b_ww, b_wp, r.port_bit, r.pol_bit, r.g_ww, r.g_wp].map(bit_cell);
        // writing to a String cannot fail
        let _ = writeln!(s, "{},{}", r.trial, cells.join(","));
    }
    s
}

fn play(game: &impl Game, run: &GameRun, trials: Option<&Path>) -> Result<GameStats> {
    let stats = run_game(game, run.n, run.seed)?;
    if let Some(path) = trials {
        emit(Some(path), &trials_csv(&trial_records(game, run.n, run.seed)?))?;
    }
    Ok(stats)
}

pub fn game_doc(input: &Input, run: &GameRun, trials: Option<&Path>) -> Result<GameDoc> {
    let e = efficiency(input);
    let stats = match run.kind {
        GameKind::PredictiveWw | GameKind::PredictiveWp => {
            let mode = if run.kind == GameKind::PredictiveWw {
                PredictiveMode::Ww
            } else {
                PredictiveMode::Wp
            };
            let det = DetectorModel::from_efficiency(e)?;
            play(&PredictiveGame::new(&family_state(input)?, &det, mode)?, run, trials)?
        }
        GameKind::Retrodictive => play(&RetrodictiveGame::new(input.alpha, input.phi, e)?, run, trials)?,
        GameKind::Alternative => play(&AlternativeGame::new(e, run.averaged)?, run, trials)?,
    };
    Ok(GameDoc {
        input: *input,
        averaged: run.averaged,
        stats,
    })
}

pub fn game(input: &Input, run: &GameRun, trials: Option<&Path>, csv: bool, out: Option<&Path>) -> Result<()> {
    emit(out, &render(&game_doc(input, run, trials)?, csv)?)
}
