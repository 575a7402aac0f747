//! Questionnaire responses in long CSV form, and the descriptive table.
//!
//! Input has one row per answer: `participant,item,construct,score`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;

use aiden_core::stats::{Analysis, Construct, Item, LikertMatrix, Reliability, Summary};
use anyhow::{bail, Context};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct Row {
    participant: String,
    item: String,
    construct: String,
    score: i64,
}

/// Builds the matrix from CSV; participants and items keep first-appearance order.
pub fn read_matrix<R: Read>(input: R) -> anyhow::Result<LikertMatrix> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let expected = ["participant", "item", "construct", "score"];
    if headers.iter().collect::<Vec<_>>() != expected {
        bail!("header must be {}, got {}", expected.join(","), headers.iter().collect::<Vec<_>>().join(","));
    }

    let mut participants: Vec<String> = Vec::new();
    let mut items: Vec<Item> = Vec::new();
    let mut cells: HashMap<(usize, usize), u8> = HashMap::new();
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let at = line + 2;
        let row = row.with_context(|| format!("line {at}"))?;
        let construct: Construct = row.construct.parse().with_context(|| format!("line {at}"))?;
        let score = u8::try_from(row.score)
            .ok()
            .filter(|s| (1..=5).contains(s))
            .with_context(|| format!("line {at}: score {} outside 1..=5", row.score))?;
        let p = match participants.iter().position(|p| *p == row.participant) {
            Some(p) => p,
            None => {
                participants.push(row.participant.clone());
                participants.len() - 1
            }
        };
        let i = match items.iter().position(|it| it.id == row.item) {
            Some(i) => {
                if items[i].construct != construct {
                    bail!(
                        "line {at}: item {} listed under {} and {}",
                        row.item,
                        items[i].construct,
                        construct
                    );
                }
                i
            }
            None => {
                items.push(Item {
                    id: row.item.clone(),
                    construct,
                });
                items.len() - 1
            }
        };
        if cells.insert((p, i), score).is_some() {
            bail!("line {at}: second answer from {} to {}", row.participant, row.item);
        }
    }

    let mut scores = Vec::with_capacity(participants.len());
    for (p, who) in participants.iter().enumerate() {
        let mut row = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            match cells.get(&(p, i)) {
                Some(s) => row.push(*s),
                None => bail!("{who} did not answer {}", item.id),
            }
        }
        scores.push(row);
    }
    Ok(LikertMatrix::new(participants, items, scores)?)
}

fn summary_cells(s: &Summary) -> [String; 6] {
    [
        format!("{:.2}", s.median),
        format!("{:.2}", s.iqr),
        format!("{:.2}", s.mean),
        format!("{:.2}", s.sd),
        format!("[{:.2}, {:.2}]", s.ci_low, s.ci_high),
        s.adjective.to_string(),
    ]
}

/// Per-construct blocks of item rows plus an aggregate row, then the inferential lines.
pub fn render_analysis(a: &Analysis) -> String {
    let header = ["Item", "Mdn", "IQR", "Mean", "SD", "95% CI", "Rating"];
    let mut blocks: Vec<(String, Vec<[String; 7]>)> = Vec::new();
    for row in &a.constructs {
        let alpha = match row.alpha {
            Reliability::Alpha(v) => format!("alpha {v:.2}"),
            Reliability::Degenerate => "alpha undefined".into(),
        };
        let heading = format!("{} ({}), {}", row.construct.title(), row.construct.code(), alpha);
        let mut lines = Vec::new();
        for item in a.items.iter().filter(|i| i.item.construct == row.construct) {
            let [m, q, me, sd, ci, adj] = summary_cells(&item.summary);
            lines.push([item.item.id.clone(), m, q, me, sd, ci, adj]);
        }
        let [m, q, me, sd, ci, adj] = summary_cells(&row.summary);
        lines.push(["Aggregate".into(), m, q, me, sd, ci, adj]);
        blocks.push((heading, lines));
    }

    let mut widths = header.map(str::len);
    for (_, lines) in &blocks {
        for l in lines {
            for (w, cell) in widths.iter_mut().zip(l) {
                *w = (*w).max(cell.chars().count());
            }
        }
    }
    let fmt_row = |cells: &[String]| {
        let mut s = String::from("  ");
        for (c, (cell, w)) in cells.iter().zip(widths).enumerate() {
            let pad = w - cell.chars().count();
            match c {
                0 => s.push_str(&format!("{cell}{}", " ".repeat(pad))),
                6 => s.push_str(&format!("  {cell}")),
                _ => s.push_str(&format!("  {}{cell}", " ".repeat(pad))),
            }
        }
        s.trim_end().to_owned()
    };

    let mut out = String::new();
    let _ = writeln!(out, "{} participants, {} bootstrap resamples, seed {}", a.participants, a.resamples, a.seed);
    let head = fmt_row(&header.map(String::from));
    let _ = writeln!(out, "{head}");
    let _ = writeln!(out, "{}", "-".repeat(head.chars().count()));
    for (heading, lines) in &blocks {
        let _ = writeln!(out, "{heading}");
        for l in lines {
            let _ = writeln!(out, "{}", fmt_row(l));
        }
    }

    if let Some(w) = &a.pu_vs_peou {
        let _ = writeln!(out, "\nWilcoxon PU vs PEOU: Z = {:.2}, p = {:.2} ({} non-zero pairs)", w.z, w.p, w.n);
    }
    if !a.bi_correlations.is_empty() {
        let _ = writeln!(out, "Spearman against BI:");
        for (c, r) in &a.bi_correlations {
            match r {
                Some(r) => {
                    let _ = writeln!(out, "  {:<5} rho = {:.3}, p = {:.3}", c.code(), r.rho, r.p);
                }
                None => {
                    let _ = writeln!(out, "  {:<5} undefined", c.code());
                }
            }
        }
        if let Some(top) = a.bi_top_correlate {
            let _ = writeln!(out, "Strongest correlate of BI: {}", top.code());
        }
    }
    out
}

pub fn analysis_to_json(a: &Analysis) -> String {
    serde_json::to_string_pretty(a).expect("analysis serializes")
}

pub fn analysis_from_json(raw: &str) -> serde_json::Result<Analysis> {
    serde_json::from_str(raw)
}
