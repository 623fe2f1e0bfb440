//! `report.md`, rendered from the aggregate artifacts only.

use std::fmt::Write as _;
use std::path::Path;

use mtaudit_core::aggregation::WEIGHTS_BASIS;
use mtaudit_core::scoring::round_half_up;
use serde_json::Value;

use crate::config::AuditConfig;
use crate::error::{CliError, Result};
use crate::manifest::StageRecorder;
use crate::pipeline::{self, REPORT};

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::bad_artifact(path, e))
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::bad_artifact(path, e))?;
    let header = r
        .headers()
        .map_err(|e| CliError::bad_artifact(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| CliError::bad_artifact(path, e))
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

fn pct(v: &Value) -> String {
    v.as_f64()
        .map(|x| format!("{}%", round_half_up(100.0 * x, 0)))
        .unwrap_or_else(|| "n/a".into())
}

fn num(v: &Value, decimals: u32) -> String {
    v.as_f64()
        .map(|x| format!("{:.*}", decimals as usize, round_half_up(x, decimals)))
        .unwrap_or_else(|| "n/a".into())
}

fn num_str(s: &str, decimals: u32) -> String {
    match s.parse::<f64>() {
        Ok(x) => format!("{:.*}", decimals as usize, round_half_up(x, decimals)),
        Err(_) if s.is_empty() => "n/a".into(),
        Err(_) => s.to_string(),
    }
}

pub fn write_report(config: &AuditConfig, rec: &mut StageRecorder) -> Result<()> {
    let d = config.display_decimals;
    let mut md = String::new();
    let engine = &config.engine;
    writeln!(md, "# Pronoun bias audit: {}", engine.engine_id).unwrap();
    writeln!(
        md,
        "\nSentences were translated from `{}` to `{}`. A bias of 0 means the engine picked the \
         majority pronoun; higher values mean the chosen pronoun misrepresents more of the workforce \
         than the majority choice would.\n",
        engine.source_lang, engine.target_lang
    )
    .unwrap();

    writeln!(md, "## Summary by reference\n").unwrap();
    writeln!(
        md,
        "| reference | scored | wrong | wrong share | he for she | she for he | P(wrong \\| female-dominated) | P(wrong \\| male-dominated) | median B | max B | unbounded |"
    )
    .unwrap();
    writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|").unwrap();
    for &kind in &config.references {
        let path = config.out_dir.join(pipeline::summary_path(kind));
        if !path.is_file() {
            return Err(CliError::MissingArtifact { stage: "report", path });
        }
        rec.input(&path)?;
        let s = read_json(&path)?;
        let split = &s["wrong_direction_split"];
        writeln!(
            md,
            "| {kind} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            s["scoreable"],
            s["wrong"],
            pct(&s["wrong_fraction"]),
            pct(&split["he_for_she"]),
            pct(&split["she_for_he"]),
            pct(&s["p_wrong_given_female_dominated"]),
            pct(&s["p_wrong_given_male_dominated"]),
            num(&s["bias_median"], d),
            num(&s["bias_max"], d),
            s["unbounded_count"],
        )
        .unwrap();
    }
    writeln!(
        md,
        "\nMedian and maximum are over finite positive scores. Unbounded scores (a wrong pronoun for an \
         occupation held entirely by one gender) are counted separately.\n"
    )
    .unwrap();

    for &kind in &config.references {
        let path = config.out_dir.join(pipeline::coverage_path(kind));
        if path.is_file() {
            rec.input(&path)?;
            let c = read_json(&path)?;
            let gaps = c["omitted"].as_array().cloned().unwrap_or_default();
            if !gaps.is_empty() {
                let list: Vec<String> = gaps
                    .iter()
                    .map(|g| {
                        format!(
                            "{} ({})",
                            g["occupation_id"].as_str().unwrap_or("?"),
                            g["reason"].as_str().unwrap_or("?")
                        )
                    })
                    .collect();
                writeln!(md, "Not scored under {kind}: {}.\n", list.join(", ")).unwrap();
            }
        }
    }

    writeln!(md, "## Sectors\n").unwrap();
    writeln!(md, "Weights: {WEIGHTS_BASIS} (an approximation where a category holds several occupations).\n").unwrap();
    for &kind in &config.references {
        let path = config.out_dir.join(pipeline::sectors_path(kind));
        if !path.is_file() {
            continue;
        }
        rec.input(&path)?;
        let (_, rows) = read_table(&path)?;
        writeln!(md, "### {kind}\n").unwrap();
        writeln!(md, "| sector | dominance | weighted B | occupations | unbounded |").unwrap();
        writeln!(md, "|---|---|---|---|---|").unwrap();
        for r in rows {
            writeln!(md, "| {} | {} | {} | {} | {} |", r[0], r[1], num_str(&r[2], d), r[3], r[4]).unwrap();
        }
        writeln!(md).unwrap();
    }

    let changes_path = config.out_dir.join(pipeline::CHANGES);
    if changes_path.is_file() {
        rec.input(&changes_path)?;
        let changes = read_json(&changes_path)?;
        let changes = changes.as_array().cloned().unwrap_or_default();
        if !changes.is_empty() {
            writeln!(md, "## Adjectives\n").unwrap();
            writeln!(md, "| adjective | she→she | he→he | she→he | he→she | paired | changed | changes mostly she→he |").unwrap();
            writeln!(md, "|---|---|---|---|---|---|---|---|").unwrap();
            for m in changes {
                writeln!(
                    md,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    m["adjective_id"].as_str().unwrap_or("?"),
                    m["she_to_she"],
                    m["he_to_he"],
                    m["she_to_he"],
                    m["he_to_she"],
                    m["paired"],
                    pct(&m["changed_fraction"]),
                    if m["mostly_she_to_he"].as_bool() == Some(true) { "yes" } else { "no" },
                )
                .unwrap();
            }
            writeln!(md).unwrap();
        }
    }

    let dist_path = config.out_dir.join(pipeline::DISTRIBUTION);
    if dist_path.is_file() {
        rec.input(&dist_path)?;
        let (_, rows) = read_table(&dist_path)?;
        writeln!(md, "## Pronoun distribution\n").unwrap();
        writeln!(md, "| variant | sentences | he | she | other |").unwrap();
        writeln!(md, "|---|---|---|---|---|").unwrap();
        for r in rows {
            let p = |s: &str| pct(&s.parse::<f64>().map(Value::from).unwrap_or(Value::Null));
            writeln!(md, "| {} | {} | {} | {} | {} |", r[0], r[1], p(&r[2]), p(&r[3]), p(&r[4])).unwrap();
        }
        writeln!(md).unwrap();
    }

    let corr_path = config.out_dir.join(pipeline::CORRELATION);
    if corr_path.is_file() {
        rec.input(&corr_path)?;
        let c = read_json(&corr_path)?;
        writeln!(md, "## Perception and employment\n").unwrap();
        match c["pearson_r"].as_f64() {
            Some(r) => writeln!(
                md,
                "Pearson correlation between perceived femininity and the female employment share over {} occupations: {:.2}.",
                c["n"],
                round_half_up(r, 2)
            )
            .unwrap(),
            None => writeln!(md, "Correlation not computed: {}.", c["error"].as_str().unwrap_or("?")).unwrap(),
        }
    }

    rec.output(REPORT, md.as_bytes())?;
    Ok(())
}
