use std::path::{Path, PathBuf};

use mtaudit_core::aggregation::{
    adjective_change_matrix, occupation_weights, pronoun_distribution, sector_bias,
};
use mtaudit_core::gendering::{classify, Classifier, GenderLabel, LabelCounts};
use mtaudit_core::lexicon::{
    load_registry, resolve_reference, validate_registry, ClassificationSystem, Dominance,
    OmissionReason, RegistryFiles, SocLink,
};
use mtaudit_core::scoring::{score_occupation, ReferenceKind};
use mtaudit_core::sentences::{generate_corpus, load_adjectives, load_templates};
use mtaudit_core::survey::{load_survey, perception_scores};
use mtaudit_core::translation::fixture_backend;
use mtaudit_core::translation::Backend;

fn demo(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo").join(name)
}

fn files() -> RegistryFiles {
    RegistryFiles {
        occupations: demo("occupations.csv"),
        categories_feor: demo("categories_feor.csv"),
        categories_soc: demo("categories_soc.csv"),
        crosswalk: demo("crosswalk.csv"),
        sectors: Some(demo("sectors.csv")),
    }
}

#[test]
fn registry_loads_clean() {
    let registry = load_registry(&files()).unwrap();
    assert_eq!(registry.occupations().len(), 30);
    assert_eq!(registry.scoreable().count(), 26);
    assert!(validate_registry(&registry).is_empty());

    let engineer = registry.occupation("engineer").unwrap();
    assert_eq!(engineer.soc_code.as_deref(), Some("17-2199"));
    assert_eq!(engineer.soc_link, Some(SocLink::Override));
    let statistician = registry.occupation("statistician").unwrap();
    assert_eq!(statistician.soc_link, Some(SocLink::Explicit));
    assert_eq!(registry.occupation("soldier").unwrap().soc_code, None);
}

#[test]
fn target_reference_omits_suppressed_and_military() {
    let registry = load_registry(&files()).unwrap();
    let target = resolve_reference(&registry, ReferenceKind::TargetStats).unwrap();
    assert_eq!(target.len(), 21);
    let reason = |id: &str| target.omitted.iter().find(|o| o.occupation_id == id).map(|o| o.reason);
    assert_eq!(reason("dancer"), Some(OmissionReason::Suppressed));
    assert_eq!(reason("soldier"), Some(OmissionReason::NoCategory));
    assert_eq!(reason("doctor"), None);
}

#[test]
fn shared_category_splits_its_head_count() {
    let registry = load_registry(&files()).unwrap();
    let w = occupation_weights(&registry, ClassificationSystem::Feor);
    assert_eq!(w["dancer"], 1250.0);
    assert_eq!(w["choreographer"], 1250.0);
    assert_eq!(w["nurse"], 65000.0);
    assert!(!w.contains_key("midwife"));
}

#[test]
fn military_is_unbiased_under_source_stats() {
    let registry = load_registry(&files()).unwrap();
    let source = resolve_reference(&registry, ReferenceKind::SourceStats).unwrap();
    let results: Vec<_> = ["soldier", "officer"]
        .iter()
        .map(|id| score_occupation(id, GenderLabel::Masculine, &source).unwrap())
        .collect();
    let sectors = sector_bias(&results, &registry, Dominance::MaleDominated).unwrap();
    assert_eq!(sectors["military"].weighted_bias, Some(0.0));
    assert!(sector_bias(&results, &registry, Dominance::FemaleDominated).unwrap().is_empty());
}

#[test]
fn corpus_has_five_sentences_per_occupation() {
    let registry = load_registry(&files()).unwrap();
    let templates = load_templates(&demo("templates.csv")).unwrap();
    let adjectives = load_adjectives(&demo("adjectives.csv")).unwrap();
    let units = generate_corpus(&registry, &templates, &adjectives).unwrap();
    assert_eq!(units.len(), 130);

    let backend = fixture_backend(&demo("translations.tsv")).unwrap();
    let lines: Vec<String> = units.iter().map(|u| u.source_text.clone()).collect();
    let out = backend.translate_batch(&lines).unwrap();
    assert!(out.iter().all(|r| r.is_ok()), "every generated sentence has a canned translation");
}

#[test]
fn carpenter_in_the_survey_file() {
    let tallies = load_survey(&demo("survey.csv")).unwrap();
    let carpenter = tallies.iter().find(|t| t.occupation_id == "carpenter").unwrap();
    assert_eq!(carpenter.counts, [170, 12, 7, 3, 4, 0]);
    assert_eq!(perception_scores(carpenter).unwrap().display_percent(), (98, 2));
}

#[test]
fn thirty_record_label_tally() {
    let mut texts = Vec::new();
    texts.extend((0..21).map(|i| format!("he is worker {i}")));
    texts.extend((0..7).map(|i| format!("she is worker {i}")));
    texts.extend(["it is a machine".to_string(), "they are a team".to_string()]);
    let keyed: Vec<(usize, String)> = texts.into_iter().enumerate().collect();
    let (labels, counts) = Classifier::default().classify_corpus(keyed.iter().map(|(k, t)| (k, t.as_str())));
    assert_eq!(labels.len(), 30);
    assert_eq!(counts.as_tuple(), (21, 7, 2, 0, 0));
    assert_eq!(counts, labels.values().copied().collect::<LabelCounts>());

    let d = pronoun_distribution(labels.values().copied());
    assert_eq!(d.masculine, 0.7);
    assert!((d.feminine - 0.2333).abs() < 1e-4);
    assert!((d.other - 0.0667).abs() < 1e-4);
}

#[test]
fn gender_specific_output_is_ambiguous_and_unpaired() {
    assert_eq!(classify("he/she is a very good nurse"), GenderLabel::Ambiguous);
    let base = [("nurse".to_string(), GenderLabel::Feminine)].into_iter().collect();
    let adj = [("nurse".to_string(), GenderLabel::Ambiguous)].into_iter().collect();
    let m = adjective_change_matrix(&base, &adj, "very_good");
    assert_eq!(m.paired, 0);
    assert_eq!(m.changed_fraction, None);
}
