use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use topoprune::report::{PlanDocument, ScoresDocument};
use topoprune::{
    plan_overlap, read_trace, score_trace, synth_trace, write_trace, LayerTrace, PipelineParams,
    SampleScores, Scalar, Scenario, SynthSpec,
};

use crate::config::{params_from, plan_options_from, Precision, RunConfig};
use crate::{
    Command, DiagramArgs, EpiArgs, InspectArgs, OverlapArgs, PlanArgs, ScoreArgs, SynthArgs,
    TopologyArgs, UsageError,
};

pub const TIMINGS_FORMAT: &str = "topoprune.timings/1";

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Score(a) => score(a),
        Command::Plan(a) => plan(a),
        Command::Overlap(a) => overlap(a),
        Command::Diagram(a) => diagram(a),
        Command::Epi(a) => epi(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text)
}

fn synth(a: SynthArgs) -> Result<()> {
    let scenario = match (a.scenario, a.plateau_first, a.plateau_last) {
        (Scenario::RedundantPlateau { first, last }, f, l) => Scenario::RedundantPlateau {
            first: f.unwrap_or(first),
            last: l.unwrap_or(last),
        },
        (s, None, None) => s,
        _ => {
            return Err(usage(
                "--plateau-first/--plateau-last only apply to redundant_plateau",
            ))
        }
    };
    let spec = SynthSpec {
        seed: a.seed,
        token_count: a.tokens,
        dim: a.dim,
        layer_count: a.layers,
        scenario,
        noise_scale: a.noise,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let trace = synth_trace(&spec)?;
    write_trace(&trace, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!("{}", a.out.display());
    Ok(())
}

fn load_trace(path: &Path) -> Result<LayerTrace> {
    read_trace(path).with_context(|| format!("reading {}", path.display()))
}

fn sample_name(trace: &LayerTrace, path: &Path) -> String {
    match trace.manifest.get("sample_id") {
        Some(id) if !id.is_empty() => id.clone(),
        _ => path
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
    }
}

fn score_one<T: Scalar>(
    trace: &LayerTrace,
    path: &Path,
    params: &PipelineParams,
) -> Result<SampleScores<T>> {
    let mut s =
        score_trace::<T>(trace, params).with_context(|| format!("scoring {}", path.display()))?;
    s.sample_id = sample_name(trace, path);
    if s.k_clamped() {
        eprintln!(
            "note: {}: k = {} exceeds N - 1, using effective k = {}",
            path.display(),
            s.k_requested,
            s.k_effective
        );
    }
    Ok(s)
}

fn score(a: ScoreArgs) -> Result<()> {
    let config = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| usage(format!("{}: not a config document: {e}", path.display())))?
        }
        None => RunConfig::from_args(&a),
    };
    config.validate()?;
    match config.precision {
        Precision::F32 => score_with::<f32>(&config),
        Precision::F64 => score_with::<f64>(&config),
    }
}

#[derive(Serialize)]
struct TimingRow {
    sample_id: String,
    source: String,
    graph_seconds: f64,
    complex_seconds: f64,
    homology_seconds: f64,
    scoring_seconds: f64,
}

#[derive(Serialize)]
struct TimingsDocument {
    format: &'static str,
    samples: Vec<TimingRow>,
}

fn score_with<T: Scalar>(config: &RunConfig) -> Result<()> {
    let samples = config
        .inputs
        .par_iter()
        .map(|path| {
            let mut trace = load_trace(path)?;
            if config.token_fraction < 1.0 {
                trace = trace.subsample_tokens(config.token_fraction, config.seed)?;
            }
            score_one::<T>(&trace, path, &config.params)
        })
        .collect::<Result<Vec<_>>>()?;
    let sources: Vec<String> = config
        .inputs
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    let doc =
        ScoresDocument::new(config.params, &samples, &sources).context("aggregating samples")?;
    let plan = PlanDocument::new(doc.plan(&config.plan).context("planning")?);

    let out = &config.out_dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("config.json"), config)?;
    write_json(&out.join("scores.json"), &doc)?;
    write_json(&out.join("plan.json"), &plan)?;
    write_json(
        &out.join("timings.json"),
        &TimingsDocument {
            format: TIMINGS_FORMAT,
            samples: samples
                .iter()
                .zip(&sources)
                .map(|(s, src)| TimingRow {
                    sample_id: s.sample_id.clone(),
                    source: src.clone(),
                    graph_seconds: s.timings.graph.as_secs_f64(),
                    complex_seconds: s.timings.complex.as_secs_f64(),
                    homology_seconds: s.timings.homology.as_secs_f64(),
                    scoring_seconds: s.timings.scoring.as_secs_f64(),
                })
                .collect(),
        },
    )?;
    for (i, s) in samples.iter().enumerate() {
        write_file(&out.join(format!("diagram_{i}.csv")), s.diagram.to_csv())?;
        write_rasters(out, &format!("epi_{i}"), s)?;
    }

    println!("samples: {}", samples.len());
    for (s, src) in samples.iter().zip(&sources) {
        let clamp = if s.k_clamped() { " (clamped)" } else { "" };
        println!(
            "  {} [{}]: L={} N={} k={}{} intervals={}",
            s.sample_id,
            src,
            s.layer_count,
            s.token_count,
            s.k_effective,
            clamp,
            s.diagram.intervals.len()
        );
    }
    println!("pruned layers: {:?}", plan.plan.pruned);
    println!("outputs: {}", out.display());
    Ok(())
}

fn write_rasters<T: Scalar>(dir: &Path, stem: &str, s: &SampleScores<T>) -> Result<()> {
    for r in &s.rasters {
        write_file(&dir.join(format!("{stem}_h{}.csv", r.p())), r.to_csv())?;
        write_file(&dir.join(format!("{stem}_h{}.pgm", r.p())), r.to_pgm())?;
    }
    Ok(())
}

fn plan(a: PlanArgs) -> Result<()> {
    let options = plan_options_from(&a.plan);
    options.mode.validate().map_err(|e| usage(e.to_string()))?;
    let path = &a.scores;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: ScoresDocument = serde_json::from_str(&text)
        .with_context(|| format!("{}: malformed scores document", path.display()))?;
    doc.validate()
        .map_err(|e| anyhow::anyhow!("{}: malformed scores document: {e}", path.display()))?;
    let plan = PlanDocument::new(doc.plan(&options).context("planning")?);
    match &a.out {
        Some(out) => {
            write_json(out, &plan)?;
            println!("pruned layers: {:?}", plan.plan.pruned);
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &plan)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

fn read_plan(path: &PathBuf) -> Result<PlanDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: PlanDocument = serde_json::from_str(&text)
        .with_context(|| format!("{}: malformed plan document", path.display()))?;
    doc.validate()
        .map_err(|e| anyhow::anyhow!("{}: malformed plan document: {e}", path.display()))?;
    Ok(doc)
}

fn overlap(a: OverlapArgs) -> Result<()> {
    let (pa, pb) = (read_plan(&a.a)?, read_plan(&a.b)?);
    let value = plan_overlap(&pa.plan, &pb.plan, a.metric)?;
    println!("{value:.4}");
    Ok(())
}

fn checked_params(t: &TopologyArgs) -> Result<PipelineParams> {
    let params = params_from(t);
    params.validate().map_err(usage)?;
    Ok(params)
}

fn diagram(a: DiagramArgs) -> Result<()> {
    let params = checked_params(&a.topology)?;
    let trace = load_trace(&a.trace)?;
    let csv = match a.topology.precision {
        Precision::F32 => score_one::<f32>(&trace, &a.trace, &params)?
            .diagram
            .to_csv(),
        Precision::F64 => score_one::<f64>(&trace, &a.trace, &params)?
            .diagram
            .to_csv(),
    };
    match &a.out {
        Some(out) => write_file(out, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn epi(a: EpiArgs) -> Result<()> {
    let params = checked_params(&a.topology)?;
    let trace = load_trace(&a.trace)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    match a.topology.precision {
        Precision::F32 => write_rasters(
            &a.out_dir,
            "epi",
            &score_one::<f32>(&trace, &a.trace, &params)?,
        )?,
        Precision::F64 => write_rasters(
            &a.out_dir,
            "epi",
            &score_one::<f64>(&trace, &a.trace, &params)?,
        )?,
    }
    println!("{}", a.out_dir.display());
    Ok(())
}

fn inspect(a: InspectArgs) -> Result<()> {
    let t = load_trace(&a.trace)?;
    println!("file: {}", a.trace.display());
    println!("format: LTRC v{}", topoprune::trace::VERSION);
    println!("layers (L): {}", t.layer_count());
    println!("tokens (N): {}", t.token_count());
    println!("dim (d): {}", t.dim());
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "layer", "mean", "std", "min", "max", "mean_norm"
    );
    for l in 0..t.layer_count() {
        let xs = t.layer(l);
        let n = xs.len() as f64;
        let mean = xs.iter().map(|&x| f64::from(x)).sum::<f64>() / n;
        let var = xs
            .iter()
            .map(|&x| (f64::from(x) - mean).powi(2))
            .sum::<f64>()
            / n;
        let min = xs.iter().copied().fold(f32::INFINITY, f32::min);
        let max = xs.iter().copied().fold(f32::NEG_INFINITY, f32::max);
        let norm = (0..t.token_count())
            .map(|i| {
                t.point(l, i)
                    .iter()
                    .map(|&x| f64::from(x).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .sum::<f64>()
            / t.token_count() as f64;
        println!(
            "{:>5} {mean:>12.5} {:>12.5} {min:>12.5} {max:>12.5} {norm:>12.5}",
            l + 1,
            var.sqrt()
        );
    }
    if t.manifest.is_empty() {
        println!("manifest: (none)");
    } else {
        println!("manifest:");
        for (k, v) in &t.manifest {
            println!("  {k}: {v}");
        }
    }
    Ok(())
}
