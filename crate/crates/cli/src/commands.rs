use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use greedymatch_core::analytics::{
    grid_proposal_probabilities, grid_recurrence, grid_step3_sum, linear_recurrence, multiunit_bound_per_node,
    multiunit_segment_sum, pr_lower_bound_grid, pr_lower_bound_linear, pr_lower_bound_multiunit,
    solve_tree_fixed_point, steady_state_participants, LeftRecursion, GRID_P_M,
};
use greedymatch_core::exact::{
    decomposition_bound_instance, multiunit_bound, neighbor_max_bound, neighbor_max_bound_expected,
    optimal_exhaustive, optimal_multiunit_exhaustive, optimal_path_dp, optimal_tree_dp, DEFAULT_MAX_EDGES,
};
use greedymatch_core::experiments::{
    figure_config, hash_json, run_experiment, sample_graph, ExperimentConfig, ExperimentReport, GraphConfig,
    QuantityModel,
};
use greedymatch_core::graph::{Family, WeightSource};
use greedymatch_core::greedy::{greedy_match_multiunit_with, greedy_match_with, greedy_with_failures};
use greedymatch_core::{GreedyOptions, TieRule, WeightModel, WeightedGraph};

use crate::args::*;

/// Prints the reproducibility line to standard error.
fn announce(seed: Option<u64>, hash: &str) {
    match seed {
        Some(s) => eprintln!("seed={s} config_hash={hash}"),
        None => eprintln!("seed=unused config_hash={hash}"),
    }
}

/// The explicit seed, or one derived from the invocation's hash.
fn resolve_seed(explicit: Option<u64>, invocation: &impl Serialize) -> u64 {
    explicit.unwrap_or_else(|| {
        let h = hash_json(invocation);
        u64::from_str_radix(&h[..16], 16).expect("hex digest")
    })
}

/// Hash of the invocation with the effective seed filled in and, for commands
/// that read a graph, the input file's contents.
fn invocation_hash(args: &impl Serialize, seed: Option<u64>, input: Option<&Path>) -> Result<String> {
    let mut value = serde_json::to_value(args)?;
    if let Some(s) = seed {
        value["seed"] = json!(s);
    }
    if let Some(path) = input {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        value["input"] = json!(hash_json(&bytes));
    }
    Ok(hash_json(&value))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("value serialises") + "\n"
}

fn model_from(values: Vec<f64>, probs: Option<Vec<f64>>) -> Result<WeightModel> {
    Ok(match probs {
        Some(p) => WeightModel::new(values, p)?,
        None => WeightModel::uniform(values)?,
    })
}

fn model_args(m: &ModelArgs) -> Result<WeightModel> {
    let values = match (&m.values, m.k) {
        (Some(v), Some(k)) if v.len() != k => bail!("--K {k} disagrees with {} values given to --v", v.len()),
        (Some(v), _) => v.clone(),
        (None, Some(k)) => (1..=k).map(|i| i as f64).collect(),
        (None, None) => vec![1.0, 2.0],
    };
    model_from(values, m.probs.clone())
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let seed = resolve_seed(args.seed, args);
    announce(Some(seed), &invocation_hash(args, Some(seed), None)?);

    let model = model_from(args.weights.values.clone(), args.weights.probs.clone())?;
    let weights = match args.library {
        Some(library_size) => WeightSource::Caches {
            library_size,
            cache_size: args.cache,
        },
        None => model.into(),
    };
    let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("--{flag} is required for this family"));
    let family = match args.family {
        FamilyArg::Line => Family::Line { n: need(args.n, "n")? },
        FamilyArg::Grid2d => Family::Grid2d { side: need(args.side, "side")? },
        FamilyArg::Gnp => {
            let n = need(args.n, "n")?;
            let p = match (args.edge_prob, args.d) {
                (Some(p), None) => p,
                (None, Some(d)) => d / (n as f64 - 1.0).max(1.0),
                _ => bail!("gnp needs exactly one of --edge-prob and --d"),
            };
            Family::Gnp { n, p }
        }
        FamilyArg::Geometric => Family::Geometric {
            n: need(args.n, "n")?,
            radius: args.radius,
            range: args.range.context("--range is required for geometric graphs")?,
        },
        FamilyArg::Caching => Family::Caching {
            locations: args.locations.clone(),
            users: args.users,
            range: args.range.context("--range is required for caching graphs")?,
        },
    };
    let mut config = ExperimentConfig::new(GraphConfig { family, weights }, 1, seed);
    config.quantities = args.quantities.clone().map(QuantityModel::uniform);
    let g = sample_graph(&config, config.graph.as_ref().expect("set above"), seed)?;
    match &args.out {
        Some(path) => g.write(path)?,
        None => emit(&g.to_json()?, None)?,
    }
    Ok(())
}

fn read_graph(path: &Path) -> Result<WeightedGraph> {
    Ok(WeightedGraph::read(path)?)
}

fn longest_edge(g: &WeightedGraph) -> f64 {
    let Some(c) = g.coords() else { return 0.0 };
    g.edges()
        .iter()
        .map(|e| {
            let (a, b) = (c[e.u as usize], c[e.v as usize]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .fold(0.0, f64::max)
}

pub fn match_graph(args: &MatchArgs, workers: usize) -> Result<()> {
    let g = read_graph(&args.input)?;
    let tie_rule = match args.tie_rule {
        TieArg::Id => TieRule::Id,
        TieArg::Left => TieRule::Left,
    };
    let opts = GreedyOptions::default()
        .with_tie_rule(tie_rule)
        .with_workers(workers)
        .with_trace();
    let text = if let Some(deltas) = &args.failures {
        if args.multiunit {
            bail!("--failures applies to single-unit matching only");
        }
        if tie_rule != TieRule::Id {
            bail!("--failures uses the default id tie rule");
        }
        let seed = resolve_seed(args.seed, args);
        announce(Some(seed), &invocation_hash(args, Some(seed), Some(&args.input))?);
        let radius = args.interference_radius.unwrap_or_else(|| longest_edge(&g));
        let outcome = greedy_with_failures(&g, deltas[0], deltas[1], radius, seed)?;
        to_json(&outcome)
    } else {
        announce(None, &invocation_hash(args, None, Some(&args.input))?);
        let mut outcome = if args.multiunit {
            greedy_match_multiunit_with(&g, &opts)?
        } else {
            greedy_match_with(&g, &opts)
        };
        if let Some(path) = &args.trace {
            let csv = outcome.trace_csv().expect("trace requested");
            fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
        }
        outcome.trace = None;
        to_json(&outcome)
    };
    emit(&text, args.out.as_deref())
}

pub fn optimal(args: &OptimalArgs) -> Result<()> {
    announce(None, &invocation_hash(args, None, Some(&args.input))?);
    let g = read_graph(&args.input)?;
    let result = match args.method {
        OptimalMethod::PathDp => optimal_path_dp(&g)?,
        OptimalMethod::TreeDp => optimal_tree_dp(&g)?,
        OptimalMethod::Exhaustive => optimal_exhaustive(&g, args.max_edges.unwrap_or(DEFAULT_MAX_EDGES))?,
        OptimalMethod::MultiunitExhaustive => optimal_multiunit_exhaustive(&g)?,
    };
    emit(&to_json(&result), args.out.as_deref())
}

pub fn bound(args: &BoundArgs) -> Result<()> {
    announce(None, &invocation_hash(args, None, Some(&args.input))?);
    let g = read_graph(&args.input)?;
    let result = match args.kind {
        BoundKind::Decomposition => to_json(&decomposition_bound_instance(&g)?),
        BoundKind::NeighborMax => to_json(&neighbor_max_bound(&g)),
        BoundKind::NeighborMaxExpected => {
            let values = args.values.clone().unwrap_or_else(|| g.support().to_vec());
            let model = model_from(values, args.probs.clone())?;
            to_json(&json!({
                "total_weight": neighbor_max_bound_expected(&g, &model),
                "method": "neighbor_max_expected",
            }))
        }
        BoundKind::Multiunit => to_json(&multiunit_bound(&g)?),
    };
    emit(&result, None)
}

pub fn analyze(formula: &Formula) -> Result<()> {
    announce(None, &hash_json(formula));
    let text = match formula {
        Formula::PrLinear(m) => format!("{}", pr_lower_bound_linear(&model_args(m)?)?),
        Formula::Slope(m) => to_json(&linear_recurrence(&model_args(m)?)?),
        Formula::Grid { delta } => {
            let model = WeightModel::two_level(*delta)?;
            let step3 = grid_step3_sum(&model, GRID_P_M)?;
            to_json(&json!({
                "recurrence": grid_recurrence(&model)?,
                "p_m": GRID_P_M,
                "step3_sum": step3.value,
                "step3_tail_bound": step3.tail_bound,
                "pr_lower_bound": pr_lower_bound_grid(&model)?,
            }))
        }
        Formula::Multiunit { delta } => {
            let model = WeightModel::two_level(*delta)?;
            let seg = multiunit_segment_sum(&model)?;
            to_json(&json!({
                "line_slope": linear_recurrence(&model)?.slope,
                "segment_sum": seg.value,
                "segment_tail_bound": seg.tail_bound,
                "bound_per_node": multiunit_bound_per_node(&model)?,
                "pr_lower_bound": pr_lower_bound_multiunit(&model)?,
            }))
        }
        Formula::Proposal { k } => to_json(&json!({
            "self_consistent": grid_proposal_probabilities(*k, LeftRecursion::SelfConsistent),
            "right_in_sum": grid_proposal_probabilities(*k, LeftRecursion::RightInSum),
        })),
        Formula::TreeFixedPoint { d, model, tolerance } => {
            let model = model_args(model)?;
            let sol = solve_tree_fixed_point(*d, &model, *tolerance)?;
            to_json(&json!({
                "d": sol.d,
                "y": sol.y,
                "residuals": sol.residuals,
                "root_match_probabilities": sol.root_match_probabilities(&model),
                "expected_root_weight": sol.expected_root_weight(&model),
                "approximate": *d >= 1.0,
            }))
        }
        Formula::SteadyState { lambda, mu, gamma, interval } => {
            format!("{}", steady_state_participants(*lambda, *mu, *gamma, *interval)?)
        }
    };
    emit(&text, None)
}

fn write_report(report: &ExperimentReport, json_out: Option<&Path>, csv_out: Option<&Path>) -> Result<()> {
    if let Some(path) = csv_out {
        report.write_csv(path)?;
    }
    match json_out {
        Some(path) => report.write_json(path)?,
        None => emit(&report.to_json(), None)?,
    }
    Ok(())
}

pub fn experiment(args: &ExperimentArgs) -> Result<()> {
    let mut config = ExperimentConfig::read(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    config.validate()?;
    announce(Some(config.seed), &config.hash());
    let report = run_experiment(&config)?;
    write_report(&report, args.out.as_deref(), args.csv.as_deref())
}

pub fn reproduce(args: &ReproduceArgs) -> Result<()> {
    let mut config = figure_config(&args.figure)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    config.validate()?;
    if args.print_config {
        return emit(&config.to_toml(), None);
    }
    announce(Some(config.seed), &config.hash());
    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let report = run_experiment(&config)?;
    let csv = args.out_dir.join(format!("{}.csv", args.figure));
    let json = args.out_dir.join(format!("{}.json", args.figure));
    write_report(&report, Some(&json), Some(&csv))?;
    eprintln!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
