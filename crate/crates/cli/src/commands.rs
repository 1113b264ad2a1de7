use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use retrokit_core::pattern::{parse_template_tsv, write_template_tsv, ReactionTemplate};
use retrokit_core::CanonicalSmiles;
use retrokit_engine::dataset::{
    augment_negatives, build_compound_table, chains_from_pathways, clean_reactions, make_pathway_pairs, one_step_rows,
    parse_compound_tsv, parse_dataset_tsv, parse_mono_tsv, parse_pathway_tsv, parse_reaction_tsv, split_mono_product,
    split_train_test, strict_check_violations, subsample_negatives, write_compound_tsv, write_dataset_tsv,
    write_mono_tsv, write_reaction_tsv, CompoundFetcher, DatasetRow, FetchConfig,
};
use retrokit_engine::pipeline::{parse_gold_tsv, pathways_tsv, run_retro, PipelineError, SearchConfig};
use retrokit_engine::ranking::{evaluate_ranking, training_examples, EvalReport, Featurizer, RankingError, Scorer};
use retrokit_engine::synth::{augmentation_templates, generate_corpus, planted_chain, SynthConfig};
use retrokit_neural::{
    load_weights, save_weights, train, Architecture, ClassWeighting, MlpModel, NeuralError, TrainConfig,
};

use crate::args::{required, AugmentArgs, EvalArgs, IngestArgs, RetroArgs, SynthArgs, TrainArgs};
use crate::error::CliError;
use crate::io::{check_input, check_output, create_dir, read, write, write_json};

pub const SCHEMA_VERSION: u32 = 1;

fn input_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read_templates(path: &Path) -> Result<Vec<ReactionTemplate>, CliError> {
    parse_template_tsv(&read(path)?)
        .map_err(|e| input_error(path, e))?
        .iter()
        .map(|t| t.to_backward().map_err(|e| input_error(path, e)))
        .collect()
}

pub fn synth(args: SynthArgs, seed: u64) -> Result<(), CliError> {
    let out = required(args.out_dir, "out-dir")?;
    let defaults = SynthConfig::default();
    let config = SynthConfig {
        seed,
        pathways: args.pathways.unwrap_or(defaults.pathways),
        steps: args.steps.unwrap_or(defaults.steps),
        ..defaults
    };
    if config.steps < 2 {
        return Err(CliError::Input("--steps must be at least 2".into()));
    }
    create_dir(&out)?;
    let corpus = generate_corpus(&config);
    write(&out.join("reactions.tsv"), write_reaction_tsv(&corpus.reactions))?;
    write(&out.join("compounds.tsv"), write_compound_tsv(&[]))?;
    let mut pathways = String::from("pathway_id\treactions\n");
    for (id, reactions) in &corpus.pathways {
        let _ = writeln!(pathways, "{id}\t{}", reactions.join(";"));
    }
    write(&out.join("pathways.tsv"), pathways)?;
    write(&out.join("templates.tsv"), write_template_tsv(&augmentation_templates()))?;

    let chain = planted_chain(seed, 3);
    let mut gold = String::from("step\tproduct\tprecursors\n");
    for (i, (product, precursors)) in chain.gold.steps.iter().enumerate() {
        let joined: Vec<&str> = precursors.iter().map(CanonicalSmiles::as_str).collect();
        let _ = writeln!(gold, "{}\t{}\t{}", i + 1, product.as_str(), joined.join("."));
    }
    write(&out.join("planted_gold.tsv"), gold)?;
    write(&out.join("planted_target.smi"), format!("{}\n", chain.target.as_str()))?;
    write(&out.join("planted_stop.smi"), format!("{}\n", chain.start.as_str()))?;
    println!(
        "synth: {} reactions in {} pathways, {} rules used",
        corpus.reactions.len(),
        corpus.pathways.len(),
        corpus.rule_counts.len()
    );
    Ok(())
}

pub fn ingest(args: IngestArgs) -> Result<(), CliError> {
    let reactions_path = required(args.reactions, "reactions")?;
    let compounds_path = required(args.compounds, "compounds")?;
    let out = required(args.out_dir, "out-dir")?;
    check_input(&reactions_path)?;
    check_input(&compounds_path)?;

    let raw = parse_reaction_tsv(&read(&reactions_path)?).map_err(|e| input_error(&reactions_path, e))?;
    let mut compounds = parse_compound_tsv(&read(&compounds_path)?).map_err(|e| input_error(&compounds_path, e))?;
    if let Some(endpoint) = args.fetch_endpoint {
        let mut config = FetchConfig { endpoint: Some(endpoint), ..FetchConfig::default() };
        if let Some(ms) = args.fetch_interval_ms {
            config.min_interval = Duration::from_millis(ms);
        }
        let mut fetcher = CompoundFetcher::new(config);
        let missing: Vec<String> = compounds.iter().filter(|(_, s)| s.is_none()).map(|(id, _)| id.clone()).collect();
        let fetched: BTreeMap<String, Option<String>> =
            fetcher.resolve(&missing).map_err(|e| CliError::Input(e.to_string()))?.into_iter().collect();
        for (id, smiles) in &mut compounds {
            if smiles.is_none() {
                *smiles = fetched.get(id).cloned().flatten();
            }
        }
    }
    create_dir(&out)?;
    let table = build_compound_table(&compounds);
    let (records, mut stats) = clean_reactions(&raw, &table);
    let mono = split_mono_product(&records);
    stats.mono_reactions = mono.len();
    stats.mono_flagged = mono.iter().filter(|m| m.no_shared_bits).count();
    stats.unique_products = mono.iter().map(|m| &m.product).collect::<BTreeSet<_>>().len();
    write(&out.join("mono.tsv"), write_mono_tsv(&mono))?;
    write_json(&out.join("stats.json"), &stats)?;
    println!(
        "ingest: {} of {} reactions usable, {} mono-product reactions",
        stats.reactions_usable, stats.reactions_in, stats.mono_reactions
    );
    if stats.reactions_usable == 0 {
        return Err(CliError::Degenerate("no usable reactions".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct AugmentSummary {
    schema_version: u32,
    seed: u64,
    templates: usize,
    positives: usize,
    unique_products: usize,
    negatives: usize,
    train_rows: usize,
    test_rows: usize,
    train_groups: usize,
    test_groups: usize,
    chains: Option<usize>,
    chain_pairs_skipped: Option<usize>,
    train2_rows: Option<usize>,
    test2_rows: Option<usize>,
}

fn group_count(rows: &[DatasetRow]) -> usize {
    rows.iter().map(|r| r.group_key.as_str()).collect::<BTreeSet<_>>().len()
}

pub fn augment(args: AugmentArgs, seed: u64) -> Result<(), CliError> {
    let corpus_path = required(args.corpus, "corpus")?;
    let templates_path = required(args.templates, "templates")?;
    let out = required(args.out_dir, "out-dir")?;
    check_input(&corpus_path)?;
    check_input(&templates_path)?;
    if let Some(p) = &args.pathways {
        check_input(p)?;
    }
    let neg_fraction = args.neg_fraction.unwrap_or(1.0);
    let test_fraction = args.test_fraction.unwrap_or(0.2);
    if !(neg_fraction > 0.0 && neg_fraction <= 1.0) {
        return Err(CliError::Input(format!("--neg-fraction must be in (0, 1], got {neg_fraction}")));
    }
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(CliError::Input(format!("--test-fraction must be in [0, 1], got {test_fraction}")));
    }

    let mono = parse_mono_tsv(&read(&corpus_path)?).map_err(|e| input_error(&corpus_path, e))?;
    let templates = read_templates(&templates_path)?;
    if templates.is_empty() {
        return Err(CliError::Degenerate("template table is empty".into()));
    }
    if mono.is_empty() {
        return Err(CliError::Degenerate("corpus has no positive reactions".into()));
    }
    let pathways = match &args.pathways {
        Some(p) => Some(parse_pathway_tsv(&read(p)?).map_err(|e| input_error(p, e))?),
        None => None,
    };
    create_dir(&out)?;

    let augmentation = augment_negatives(&mono, &templates);
    let violations = strict_check_violations(&mono, &augmentation.negatives);
    if violations > 0 {
        return Err(CliError::Invariant(format!("{violations} negatives equal a positive reaction")));
    }
    let split = |rows: Vec<DatasetRow>| -> Result<(Vec<DatasetRow>, Vec<DatasetRow>), CliError> {
        let (train, test) = split_train_test(rows, test_fraction, seed).map_err(|e| CliError::Input(e.to_string()))?;
        let train = if neg_fraction < 1.0 && !train.is_empty() {
            subsample_negatives(train, neg_fraction, seed).map_err(|e| CliError::Input(e.to_string()))?
        } else {
            train
        };
        Ok((train, test))
    };
    let (train1, test1) = split(one_step_rows(&mono, &augmentation))?;
    write(&out.join("train.tsv"), write_dataset_tsv(&train1))?;
    write(&out.join("test.tsv"), write_dataset_tsv(&test1))?;
    let mut histogram = String::from("negatives\tpositives\n");
    for (negatives, positives) in augmentation.histogram(&mono) {
        let _ = writeln!(histogram, "{negatives}\t{positives}");
    }
    write(&out.join("histogram.tsv"), histogram)?;

    let mut summary = AugmentSummary {
        schema_version: SCHEMA_VERSION,
        seed,
        templates: templates.len(),
        positives: mono.len(),
        unique_products: augmentation.per_product.len(),
        negatives: augmentation.negatives.len(),
        train_rows: train1.len(),
        test_rows: test1.len(),
        train_groups: group_count(&train1),
        test_groups: group_count(&test1),
        chains: None,
        chain_pairs_skipped: None,
        train2_rows: None,
        test2_rows: None,
    };
    if let Some(pathways) = pathways {
        let (chains, skipped) = chains_from_pathways(&pathways, &mono);
        let (train2, test2) = split(make_pathway_pairs(&chains, &augmentation.sets_by_product()))?;
        write(&out.join("train2.tsv"), write_dataset_tsv(&train2))?;
        write(&out.join("test2.tsv"), write_dataset_tsv(&test2))?;
        summary.chains = Some(chains.len());
        summary.chain_pairs_skipped = Some(skipped);
        summary.train2_rows = Some(train2.len());
        summary.test2_rows = Some(test2.len());
    }
    write_json(&out.join("augment.json"), &summary)?;
    println!(
        "augment: {} positives, {} negatives, {} train / {} test rows",
        summary.positives, summary.negatives, summary.train_rows, summary.test_rows
    );
    Ok(())
}

fn parse_class_weighting(text: &str) -> Result<ClassWeighting, CliError> {
    match text {
        "none" => Ok(ClassWeighting::None),
        "balanced" => Ok(ClassWeighting::Balanced),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite() && *w > 0.0)
            .map(ClassWeighting::PositiveWeight)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "--class-weighting: expected none, balanced or a positive number, got {other:?}"
                ))
            }),
    }
}

pub fn train_model(args: TrainArgs, seed: u64) -> Result<(), CliError> {
    let name = required(args.model, "model")?;
    let data_path = required(args.data, "data")?;
    let out = required(args.out, "out")?;
    let arch = Architecture::from_name(&name)
        .ok_or_else(|| CliError::Input(format!("--model: expected nn1pr or nn2pr, got {name:?}")))?;
    check_input(&data_path)?;
    check_output(&out)?;
    if let Some(h) = &args.history {
        check_output(h)?;
    }
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        learning_rate: args.lr.unwrap_or(defaults.learning_rate),
        batch_size: args.batch.unwrap_or(defaults.batch_size),
        epochs: args.epochs.unwrap_or(defaults.epochs),
        seed,
        class_weighting: match &args.class_weighting {
            Some(text) => parse_class_weighting(text)?,
            None => defaults.class_weighting,
        },
        ..defaults
    };

    let rows = parse_dataset_tsv(&read(&data_path)?).map_err(|e| input_error(&data_path, e))?;
    let examples = training_examples(&Featurizer::default(), &rows).map_err(|e| input_error(&data_path, e))?;
    if let Some(bad) = examples.iter().find(|e| e.input.dim() != arch.input_dim()) {
        return Err(CliError::Width { expected: arch.input_dim(), actual: bad.input.dim() });
    }
    let model = arch.build(seed);
    println!("{}: {} parameters", arch.name(), model.parameter_count());
    let (trained, history) = train(&model, &examples, &config).map_err(|e| match e {
        NeuralError::EmptyDataset | NeuralError::SingleClassDataset => CliError::Degenerate(e.to_string()),
        NeuralError::InvalidConfig(_) | NeuralError::BadDropout(_) => CliError::Input(e.to_string()),
        other => CliError::Invariant(other.to_string()),
    })?;
    save_weights(&trained, &out).map_err(|e| input_error(&out, e))?;
    if let Some(path) = &args.history {
        let mut csv = String::from("epoch,loss,accuracy\n");
        for h in &history {
            let _ = writeln!(csv, "{},{},{}", h.epoch, h.loss, h.accuracy);
        }
        write(path, csv)?;
    }
    if let Some(last) = history.last() {
        println!("epoch {}: loss {:.6}, accuracy {:.4}", last.epoch, last.loss, last.accuracy);
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<(MlpModel, Architecture), CliError> {
    let model = load_weights(path).map_err(|e| input_error(path, e))?;
    let arch = [Architecture::Nn1pr, Architecture::Nn2pr]
        .into_iter()
        .find(|a| a.input_dim() == model.input_dim())
        .ok_or_else(|| input_error(path, format!("input width {} matches no known network", model.input_dim())))?;
    Ok((model, arch))
}

#[derive(Serialize)]
struct EvalSummary {
    schema_version: u32,
    groups: usize,
    model: EvalReport,
    baseline: EvalReport,
}

fn ranking_error(e: RankingError) -> CliError {
    match e {
        RankingError::Neural(NeuralError::DimensionMismatch { expected, actual }) => {
            CliError::Width { expected, actual }
        }
        RankingError::NoCandidates => CliError::Degenerate(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let weights = required(args.weights, "weights")?;
    let data_path = required(args.data, "data")?;
    let report = required(args.report, "report")?;
    check_input(&weights)?;
    check_input(&data_path)?;
    check_output(&report)?;
    if let Some(r) = &args.ranks {
        check_output(r)?;
    }
    let (model, arch) = load_model(&weights)?;
    let rows = parse_dataset_tsv(&read(&data_path)?).map_err(|e| input_error(&data_path, e))?;
    let featurizer = Featurizer::default();
    let scorer = match arch {
        Architecture::Nn1pr => Scorer::Nn1(&model),
        Architecture::Nn2pr => Scorer::Nn2(&model),
    };
    let evaluate = |s: Scorer<'_>| evaluate_ranking(|r| s.score_row(&featurizer, r), &rows).map_err(ranking_error);
    let trained = evaluate(scorer)?;
    let baseline = evaluate(Scorer::Baseline)?;
    if let Some(path) = &args.ranks {
        write(path, trained.to_tsv())?;
    }
    let summary = EvalSummary {
        schema_version: SCHEMA_VERSION,
        groups: trained.rows.len(),
        model: trained.report(scorer.name()),
        baseline: baseline.report(Scorer::Baseline.name()),
    };
    write_json(&report, &summary)?;
    let top10 = |r: &EvalReport| r.coverage.iter().find(|p| p.k == 10).map_or(0.0, |p| p.fraction);
    println!(
        "eval: {} groups, top-10 coverage {} {:.4}, {} {:.4}",
        summary.groups,
        summary.model.scorer,
        top10(&summary.model),
        summary.baseline.scorer,
        top10(&summary.baseline)
    );
    Ok(())
}

fn read_stop_set(path: &Path) -> Result<BTreeSet<CanonicalSmiles>, CliError> {
    read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| CanonicalSmiles::from_smiles(l).map_err(|e| input_error(path, e)))
        .collect()
}

pub fn retro(args: RetroArgs) -> Result<(), CliError> {
    let target = required(args.target, "target")?;
    let templates_path = required(args.templates, "templates")?;
    let nn1_path = required(args.nn1, "nn1")?;
    let report_path = required(args.report, "report")?;
    for p in [Some(&templates_path), Some(&nn1_path), args.nn2.as_ref(), args.stop_set.as_ref(), args.gold.as_ref()]
        .into_iter()
        .flatten()
    {
        check_input(p)?;
    }
    check_output(&report_path)?;
    if let Some(p) = &args.pathways {
        check_output(p)?;
    }
    CanonicalSmiles::from_smiles(&target).map_err(|e| CliError::Input(format!("--target: {e}")))?;

    let templates = read_templates(&templates_path)?;
    let (nn1, arch1) = load_model(&nn1_path)?;
    if arch1 != Architecture::Nn1pr {
        return Err(CliError::Width { expected: Architecture::Nn1pr.input_dim(), actual: nn1.input_dim() });
    }
    let nn2 = match &args.nn2 {
        Some(p) => {
            let (model, arch) = load_model(p)?;
            if arch != Architecture::Nn2pr {
                return Err(CliError::Width { expected: Architecture::Nn2pr.input_dim(), actual: model.input_dim() });
            }
            Some(model)
        }
        None => None,
    };
    let defaults = SearchConfig::default();
    let config = SearchConfig {
        max_steps: args.max_steps.unwrap_or(defaults.max_steps),
        beam_width: args.beam.unwrap_or(defaults.beam_width),
        prune_threshold: args.prune.unwrap_or(defaults.prune_threshold),
        stop_set: match &args.stop_set {
            Some(p) => read_stop_set(p)?,
            None => BTreeSet::new(),
        },
        max_nodes: args.max_nodes.unwrap_or(defaults.max_nodes),
    };
    let gold = match &args.gold {
        Some(p) => Some(parse_gold_tsv(&read(p)?).map_err(|e| input_error(p, e))?),
        None => None,
    };
    let result = run_retro(&target, &templates, &nn1, nn2.as_ref(), &config, gold.as_ref()).map_err(|e| match e {
        PipelineError::TargetParse(_) | PipelineError::InvalidConfig(_) => CliError::Input(e.to_string()),
        PipelineError::InvariantViolation(_) => CliError::Invariant(e.to_string()),
        PipelineError::Ranking(r) => ranking_error(r),
    })?;
    write_json(&report_path, &result.report)?;
    if let Some(p) = &args.pathways {
        write(p, pathways_tsv(&result.pathways))?;
    }
    println!(
        "retro: {} nodes, {} pathways{}",
        result.report.node_count,
        result.pathways.len(),
        if result.report.budget_exceeded { " (node budget reached)" } else { "" }
    );
    if result.pathways.is_empty() {
        return Err(CliError::Degenerate("no pathway found".into()));
    }
    Ok(())
}
