//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs fully offline against the bundled demo fixture.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mtaudit_core::aggregation::{category_bias, median, summary_stats};
use mtaudit_core::gendering::GenderLabel;
use mtaudit_core::lexicon::GenderShare;
use mtaudit_core::scoring::{
    bias_score, display_bias, error_points, optimal_error, probabilistic_expected_error,
    score_share, Bias, ReferenceKind,
};
use mtaudit_core::survey::{perception_scores, LikertTally};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn share(female: f64) -> GenderShare {
    GenderShare::from_female(female).expect("valid share")
}

fn finite(b: Bias) -> f64 {
    b.finite().expect("finite bias")
}

// 1 -------------------------------------------------------------------------

fn category_table() -> Outcome {
    let rows = [
        ("statistician", 0.73, GenderLabel::Masculine, 46.0 / 27.0, "1.7"),
        ("dancer", 0.58, GenderLabel::Feminine, 0.0, "0"),
        ("choreographer", 0.58, GenderLabel::Masculine, 16.0 / 42.0, "0.4"),
    ];
    for (id, f, label, internal, shown) in rows {
        let r = score_share(id, label, ReferenceKind::SourceStats, share(f)).map_err(|e| e.to_string())?;
        let b = finite(r.bias);
        ensure((b - internal).abs() < 1e-12, || format!("{id}: B={b}, want {internal}"))?;
        ensure(display_bias(r.bias, 1) == shown, || {
            format!("{id}: shows {}, want {shown}", display_bias(r.bias, 1))
        })?;
    }
    let dancer = score_share("d", GenderLabel::Feminine, ReferenceKind::SourceStats, share(0.58)).unwrap();
    let choreo = score_share("c", GenderLabel::Masculine, ReferenceKind::SourceStats, share(0.58)).unwrap();
    let cat = category_bias("2723", &[dancer.bias, choreo.bias]).map_err(|e| e.to_string())?;
    let mean = cat.mean_bias.ok_or("no category mean")?;
    ensure((mean - 8.0 / 42.0).abs() < 1e-12, || format!("category mean {mean}"))?;
    ensure(display_bias(Bias::Finite(mean), 1) == "0.2", || "category mean display".into())?;
    Ok("1.7 / 0 / 0.4, category 0.2".into())
}

// 2 -------------------------------------------------------------------------

fn carpenter_tally() -> Outcome {
    let s = perception_scores(&LikertTally::new("carpenter", [170, 12, 7, 3, 4, 0])).map_err(|e| e.to_string())?;
    ensure((s.masculinity - 446.5 / 454.0).abs() < 1e-12, || format!("masculinity {}", s.masculinity))?;
    ensure((s.femininity - 7.5 / 454.0).abs() < 1e-12, || format!("femininity {}", s.femininity))?;
    ensure(s.display_percent() == (98, 2), || format!("display {:?}", s.display_percent()))?;
    Ok("98% / 2%".into())
}

// 3 -------------------------------------------------------------------------

fn worked_example() -> Outcome {
    let b = bias_score(60.0, 40.0).map_err(|e| e.to_string())?;
    ensure(b == Bias::Finite(0.5), || format!("(60,40) gave {b:?}"))?;
    let b = bias_score(40.0, 40.0).map_err(|e| e.to_string())?;
    ensure(b == Bias::Finite(0.0), || format!("(40,40) gave {b:?}"))?;
    Ok("0.5 and 0".into())
}

// 4 -------------------------------------------------------------------------

fn property_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20200415);
    let mut ps: Vec<f64> = (0..10_000).map(|_| rng.gen_range(0.0..=1.0)).collect();
    ps.extend([0.0, 0.5, 1.0]);
    for p in ps {
        let s = share(p);
        let m = score_share("x", GenderLabel::Masculine, ReferenceKind::SourceStats, s).unwrap();
        let f = score_share("x", GenderLabel::Feminine, ReferenceKind::SourceStats, s).unwrap();
        for r in [&m, &f] {
            ensure(r.optimal_error <= 50.0, || format!("E_o > 50 at p={p}"))?;
            ensure(r.error_points >= r.optimal_error, || format!("E_t < E_o at p={p}"))?;
            if let Some(b) = r.bias.finite() {
                ensure(b >= 0.0, || format!("negative B at p={p}"))?;
            }
        }
        let min = [m.bias, f.bias].iter().filter_map(|b| b.finite()).fold(f64::INFINITY, f64::min);
        ensure(min == 0.0, || format!("min B {min} at p={p}"))?;
        let mirrored = score_share("x", GenderLabel::Feminine, ReferenceKind::SourceStats, s.swapped()).unwrap();
        ensure(m.bias == mirrored.bias, || format!("swap asymmetry at p={p}"))?;
        if p == 0.5 {
            ensure(m.bias.is_zero() && f.bias.is_zero(), || "nonzero B at p=0.5".into())?;
        }
    }
    Ok("10,003 shares".into())
}

// 5 -------------------------------------------------------------------------

fn probabilistic_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let draws = 1_000_000;
    let mut worst: f64 = 0.0;
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let s = share(p);
        let mut total = 0.0;
        for _ in 0..draws {
            let label = if rng.gen::<f64>() < p { GenderLabel::Feminine } else { GenderLabel::Masculine };
            total += error_points(label, s).unwrap();
        }
        let simulated = total / draws as f64;
        let expected = probabilistic_expected_error(s);
        ensure((expected - 200.0 * p * (1.0 - p)).abs() < 1e-9, || format!("closed form at p={p}"))?;
        let gap = (simulated - expected).abs();
        worst = worst.max(gap);
        ensure(gap <= 0.5, || format!("p={p}: simulated {simulated:.3}, expected {expected:.3}"))?;
    }
    for i in 0..=1000 {
        let p = i as f64 / 1000.0;
        let s = share(p);
        let (prob, opt) = (probabilistic_expected_error(s), optimal_error(s));
        if i == 0 || i == 500 || i == 1000 {
            ensure((prob - opt).abs() < 1e-9, || format!("degenerate p={p}: {prob} vs {opt}"))?;
        } else {
            ensure(prob > opt, || format!("p={p}: probabilistic {prob} <= optimal {opt}"))?;
        }
    }
    Ok(format!("max Monte-Carlo gap {worst:.3} points"))
}

// 6 -------------------------------------------------------------------------

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

fn audit(args: &[&str], out: &Path) -> Result<String, String> {
    let config = fixture_dir().join("demo.json");
    let output = Command::new(env!("CARGO_BIN_EXE_audit"))
        .args(args)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!(
            "audit {args:?} exited {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&output.stdout).into_owned())
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_csv(path: &Path) -> Result<Vec<BTreeMap<String, String>>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| e.to_string())
}

fn close(got: Option<f64>, want: &Value, what: &str) -> Result<(), String> {
    match (got, want.as_f64()) {
        (None, None) => Ok(()),
        (Some(g), Some(w)) if (g - w).abs() <= 1e-9 => Ok(()),
        _ => Err(format!("{what}: got {got:?}, want {want}")),
    }
}

fn opt_f64(s: &str) -> Option<f64> {
    s.parse().ok()
}

fn end_to_end() -> Outcome {
    let expected = read_json(&fixture_dir().join("expected.json"))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    audit(&["all"], &out)?;
    let agg = out.join("aggregate");
    let mut checked = 0;

    for (reference, want) in expected["references"].as_object().unwrap() {
        let got = read_json(&agg.join(format!("summary_{reference}.json")))?;
        for key in ["scoreable", "wrong", "he_for_she", "she_for_he", "unbounded_count"] {
            ensure(got[key] == want[key], || format!("{reference}.{key}: {} vs {}", got[key], want[key]))?;
            checked += 1;
        }
        for key in [
            "wrong_fraction",
            "p_wrong_given_female_dominated",
            "p_wrong_given_male_dominated",
            "bias_min",
            "bias_median",
            "bias_max",
        ] {
            close(got[key].as_f64(), &want[key], &format!("{reference}.{key}"))?;
            checked += 1;
        }
        let split = got["wrong_direction_split"]["he_for_she"].as_f64().unwrap_or(f64::NAN);
        let want_split = want["he_for_she"].as_f64().unwrap() / want["wrong"].as_f64().unwrap();
        ensure((split - want_split).abs() < 1e-12, || format!("{reference} split {split}"))?;

        let sectors = read_csv(&agg.join(format!("sectors_{reference}.csv")))?;
        let want_sectors = want["sectors"].as_array().unwrap();
        ensure(sectors.len() == want_sectors.len(), || format!("{reference}: {} sector rows", sectors.len()))?;
        for w in want_sectors {
            let row = sectors
                .iter()
                .find(|r| r["sector_id"] == w["sector_id"].as_str().unwrap() && r["dominance"] == w["dominance"].as_str().unwrap())
                .ok_or_else(|| format!("{reference}: missing sector {w}"))?;
            close(opt_f64(&row["weighted_bias"]), &w["weighted_bias"], &format!("{reference} sector {}", row["sector_id"]))?;
            ensure(row["n_occupations"] == w["n_occupations"].to_string(), || format!("{reference} n {row:?}"))?;
            ensure(row["unbounded_count"] == w["unbounded_count"].to_string(), || format!("{reference} unbounded {row:?}"))?;
            checked += 1;
        }

        let scores = read_csv(&out.join(format!("scores/{reference}.csv")))?;
        let want_occ = want["occupations"].as_object().unwrap();
        ensure(scores.len() == want_occ.len(), || format!("{reference}: {} scored", scores.len()))?;
        for row in &scores {
            let w = &want_occ[&row["occupation_id"]];
            if w == "unbounded" {
                ensure(row["bias"] == "unbounded", || format!("{row:?}"))?;
            } else {
                close(opt_f64(&row["bias"]), w, &format!("{reference} {}", row["occupation_id"]))?;
            }
            checked += 1;
        }
    }

    let changes = read_json(&agg.join("changes.json"))?;
    for (adj, want) in expected["change_matrices"].as_object().unwrap() {
        let got = changes
            .as_array()
            .unwrap()
            .iter()
            .find(|m| m["adjective_id"] == adj.as_str())
            .ok_or_else(|| format!("no change matrix for {adj}"))?;
        for (cell, n) in want.as_object().unwrap() {
            ensure(&got[cell] == n, || format!("{adj}.{cell}: {} vs {n}", got[cell]))?;
            checked += 1;
        }
    }
    let bad = &changes.as_array().unwrap().iter().find(|m| m["adjective_id"] == "bad").unwrap();
    ensure(bad["she_to_he"] == 3 && (bad["changed_fraction"].as_f64().unwrap() - 3.0 / 26.0).abs() < 1e-12, || {
        "bad: 3 of 26 flips expected".into()
    })?;

    let dist = read_csv(&agg.join("pronoun_distribution.csv"))?;
    for (variant, want) in expected["pronoun_distribution"].as_object().unwrap() {
        let row = dist.iter().find(|r| &r["variant"] == variant).ok_or_else(|| format!("no variant {variant}"))?;
        for key in ["masculine", "feminine", "other"] {
            close(opt_f64(&row[key]), &want[key], &format!("{variant}.{key}"))?;
            checked += 1;
        }
    }

    let corr = read_json(&agg.join("perception_correlation.json"))?;
    close(corr["pearson_r"].as_f64(), &expected["perception_correlation"], "perception correlation")?;
    ensure(corr["n"] == expected["perception_pairs"], || "correlation pair count".into())?;
    checked += 1;

    ensure(out.join("report.md").is_file(), || "report.md missing".into())?;
    Ok(format!("{checked} values match the oracle"))
}

// 7 -------------------------------------------------------------------------

fn tree(root: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) -> std::io::Result<()> {
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                if rel != "manifest.jsonl" {
                    out.insert(rel, std::fs::read(&path)?);
                }
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out).map_err(|e| e.to_string())?;
    Ok(out)
}

fn same_tree(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>) -> Result<(), String> {
    let names = |t: &BTreeMap<String, Vec<u8>>| t.keys().cloned().collect::<Vec<_>>();
    ensure(names(a) == names(b), || format!("file sets differ: {:?} vs {:?}", names(a), names(b)))?;
    for (name, bytes) in a {
        ensure(&b[name] == bytes, || format!("{name} differs"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    audit(&["all"], &first)?;
    let snapshot = tree(&first)?;
    audit(&["all"], &second)?;
    same_tree(&snapshot, &tree(&second)?)?;

    audit(&["all"], &first)?;
    same_tree(&snapshot, &tree(&first)?)?;

    audit(&["translate"], &first)?;
    same_tree(&snapshot, &tree(&first)?)?;
    let manifest = std::fs::read_to_string(first.join("manifest.jsonl")).map_err(|e| e.to_string())?;
    let last: Value = serde_json::from_str(manifest.lines().last().unwrap()).map_err(|e| e.to_string())?;
    ensure(last["stage"] == "translate", || "last manifest entry is not translate".into())?;
    ensure(last["stats"]["backend_queries"] == 0, || format!("warm cache issued {} queries", last["stats"]["backend_queries"]))?;
    ensure(last["stats"]["cache_hits"] == 130, || format!("cache hits {}", last["stats"]["cache_hits"]))?;
    Ok(format!("{} artifacts identical; warm translate issued 0 queries", snapshot.len()))
}

// 8 -------------------------------------------------------------------------

fn unbounded_handling() -> Outcome {
    let all_women = share(1.0);
    let all_men = share(0.0);
    let wrong_f = score_share("a", GenderLabel::Masculine, ReferenceKind::SourceStats, all_women).unwrap();
    let wrong_m = score_share("b", GenderLabel::Feminine, ReferenceKind::SourceStats, all_men).unwrap();
    ensure(wrong_f.bias.is_unbounded() && wrong_m.bias.is_unbounded(), || "wrong pronoun not unbounded".into())?;
    let right_f = score_share("c", GenderLabel::Feminine, ReferenceKind::SourceStats, all_women).unwrap();
    let right_m = score_share("d", GenderLabel::Masculine, ReferenceKind::SourceStats, all_men).unwrap();
    ensure(right_f.bias == Bias::Finite(0.0) && right_m.bias == Bias::Finite(0.0), || "right pronoun not 0".into())?;

    let half = score_share("e", GenderLabel::Masculine, ReferenceKind::SourceStats, share(0.6)).unwrap();
    let results = vec![wrong_f.clone(), wrong_m, right_f, right_m, half.clone()];
    let s = summary_stats(&results, ReferenceKind::SourceStats);
    ensure(s.unbounded_count == 2, || format!("unbounded_count {}", s.unbounded_count))?;
    ensure(s.wrong == 3, || format!("wrong {}", s.wrong))?;
    ensure(s.bias_median == median(&[finite(half.bias)]), || "median includes unbounded".into())?;
    let cat = category_bias("x", &[wrong_f.bias, half.bias]).unwrap();
    ensure(cat.mean_bias == Some(finite(half.bias)) && cat.unbounded_count == 1, || "category mean includes unbounded".into())?;
    Ok("unbounded excluded from means and medians, counted".into())
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "category table golden values", budget: Some(Duration::from_secs(1)), run: category_table },
        Criterion { id: 2, name: "carpenter survey tally", budget: Some(Duration::from_secs(1)), run: carpenter_tally },
        Criterion { id: 3, name: "worked bias example", budget: None, run: worked_example },
        Criterion { id: 4, name: "randomized bias properties", budget: Some(Duration::from_secs(5)), run: property_suite },
        Criterion { id: 5, name: "probabilistic translator oracle", budget: None, run: probabilistic_oracle },
        Criterion { id: 6, name: "end-to-end fixture audit", budget: Some(Duration::from_secs(10)), run: end_to_end },
        Criterion { id: 7, name: "determinism and warm cache", budget: None, run: determinism },
        Criterion { id: 8, name: "unbounded handling", budget: None, run: unbounded_handling },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let result = match (result, c.budget) {
            (Ok(_), Some(budget)) if elapsed > budget => Err(format!("took {elapsed:.2?}, budget {budget:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS AC{} {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL AC{} {} ({elapsed:.2?}): {why}", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
