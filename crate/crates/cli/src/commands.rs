//! Subcommand implementations. Every command returns a stable exit
//! code; diagnostics go to stderr, reports to stdout.

use crate::corpus;
use crate::exit;
use clap::{Parser, Subcommand};
use rctx_core::analysis::{self, ScenarioShape};
use rctx_core::formats::{self, FormatError, Report};
use rctx_core::model::{EmpiricalModel, ModelError};
use rctx_core::obstruction::{self, Verdict};
use rctx_core::scenario::Event;
use rctx_core::semiring::SemiringKind;
use rctx_core::cochain;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rctx",
    version,
    about = "Exact contextuality analysis of finite empirical models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse and validate a model file.
    Validate { path: PathBuf },
    /// Analyze a model file. With no analysis flag, runs the
    /// generalized obstruction sweep.
    Analyze {
        path: PathBuf,
        /// Reinterpret the model over another semiring before analysis.
        /// Only the support collapse to `boolean` is defined.
        #[arg(long)]
        semiring: Option<String>,
        /// Classical ring-coefficient obstruction sweep.
        #[arg(long)]
        classical: bool,
        /// Generalized semifield obstruction sweep.
        #[arg(long)]
        generalized: bool,
        /// Contextual fraction by exact rational LP.
        #[arg(long)]
        fraction: bool,
        /// Cross-check verdicts against the brute-force oracles and the
        /// algebraic law checks; any mismatch fails hard.
        #[arg(long)]
        oracle: bool,
        /// Seed for the randomized law checks run under --oracle.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Enumeration cutoff for global assignments.
        #[arg(long, default_value_t = 1u128 << 20)]
        cutoff: u128,
        /// Also write the JSON report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the built-in corpus against its frozen expectations, then
    /// run a seeded random-model oracle sweep.
    Corpus {
        /// Seed for the random-model sweep.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Enumeration cutoff for global assignments.
        #[arg(long, default_value_t = 1u128 << 20)]
        cutoff: u128,
    },
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Analyze {
            path,
            semiring,
            classical,
            generalized,
            fraction,
            oracle,
            seed,
            cutoff,
            out,
        } => cmd_analyze(
            &path,
            semiring.as_deref(),
            classical,
            generalized,
            fraction,
            oracle,
            seed,
            cutoff,
            out.as_deref(),
        ),
        Command::Corpus { seed, cutoff } => cmd_corpus(seed, cutoff),
    }
}

fn load_model(path: &std::path::Path) -> Result<EmpiricalModel, i32> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(exit::SEMANTIC);
        }
    };
    match formats::parse_model(&text) {
        Ok((_, model)) => Ok(model),
        Err(FormatError::Syntax {
            line,
            column,
            message,
        }) => {
            eprintln!("syntax error in {} at {line}:{column}: {message}", path.display());
            Err(exit::SYNTAX)
        }
        Err(other) => {
            eprintln!("invalid model {}: {other}", path.display());
            Err(exit::SEMANTIC)
        }
    }
}

fn cmd_validate(path: &std::path::Path) -> i32 {
    let model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let s = model.scenario();
    println!(
        "valid model: {} measurements, {} contexts, semiring {}",
        s.measurement_count(),
        s.context_count(),
        model.semiring()
    );
    if let Some(w) = model.disturbance_witness() {
        // Validity is table-level; disturbance is only warned about here.
        println!(
            "warning: model is disturbing (contexts {} and {} disagree at {})",
            s.context_label(w.context_a),
            s.context_label(w.context_b),
            s.event_key(&w.event)
        );
    }
    exit::OK
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    path: &std::path::Path,
    semiring_override: Option<&str>,
    classical: bool,
    generalized: bool,
    fraction: bool,
    oracle: bool,
    seed: u64,
    cutoff: u128,
    out: Option<&std::path::Path>,
) -> i32 {
    let mut model = match load_model(path) {
        Ok(m) => m,
        Err(code) => return code,
    };

    if let Some(name) = semiring_override {
        if name == model.semiring().name() {
            // No-op override.
        } else if name == "boolean" {
            model = analysis::possibilistic_collapse(&model);
        } else {
            eprintln!(
                "error: cannot reinterpret a {} model over `{name}`; only the support collapse to `boolean` is defined",
                model.semiring()
            );
            return exit::SEMANTIC;
        }
    }

    let run_generalized = generalized || (!classical && !fraction);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut report = Report::new(&name, &model);

    // Cutoff is enforced up front against the global-assignment count.
    let global_count = model
        .scenario()
        .event_count(&(0..model.scenario().measurement_count()).collect::<Vec<_>>());
    if global_count > cutoff {
        eprintln!(
            "error: {global_count} global assignments exceed the cutoff {cutoff}"
        );
        return exit::TOO_LARGE;
    }

    if let Some(witness) = model.disturbance_witness() {
        report.set_disturbance(&model, &witness);
        print!("{}", report.render_text());
        if let Some(out_path) = out {
            if let Err(e) = std::fs::write(out_path, report.to_json()) {
                eprintln!("error: cannot write {}: {e}", out_path.display());
                return exit::SEMANTIC;
            }
        }
        return exit::DISTURBING;
    }

    let nerve = model.scenario().nerve(2);
    let mut mismatches = 0usize;

    let verdict = if run_generalized || oracle {
        match analysis::is_r_contextual(&model) {
            Ok(v) => Some(v),
            Err(e) => {
                eprintln!("error: {e}");
                return map_analysis_error(&e);
            }
        }
    } else {
        None
    };
    if run_generalized {
        if let Some(v) = &verdict {
            report.set_generalized(&model, v);
        }
    }

    if classical {
        let ring = corpus::classical_ring(&model);
        let mut rows: Vec<(usize, Event, Verdict)> = Vec::new();
        for (ctx, event) in model.supported_sections() {
            match obstruction::classical_obstruction(&model, ctx, &event, &ring, &nerve) {
                Ok(r) => rows.push((ctx, event, r.verdict)),
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit::SEMANTIC;
                }
            }
        }
        report.set_classical(&model, &rows);
    }

    if fraction {
        if model.semiring().kind() != SemiringKind::NonnegRational {
            eprintln!(
                "error: the contextual fraction is defined for nonneg-rational models, not {}",
                model.semiring()
            );
            return exit::SEMANTIC;
        }
        match analysis::contextual_fraction(&model) {
            Ok(f) => report.set_fraction(&f),
            Err(e) => {
                eprintln!("error: {e}");
                return map_analysis_error(&e);
            }
        }
    }

    if oracle {
        let v = verdict.as_ref().expect("oracle path computes the sweep");
        // Per-section agreement with the brute-force oracle.
        let mut disagreements = Vec::new();
        for section in &v.sections {
            let trivial =
                match analysis::brute_force_section_oracle(&model, section.context, &section.event)
                {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return map_analysis_error(&e);
                    }
                };
            if trivial != (section.verdict == Verdict::Trivial) {
                disagreements.push(format!(
                    "{} -> {}",
                    model.scenario().context_label(section.context),
                    model.scenario().event_key(&section.event)
                ));
            }
        }
        let agrees = disagreements.is_empty();
        if !agrees {
            mismatches += 1;
        }
        report.push_oracle(
            "section-extendability",
            agrees,
            if agrees {
                format!("{} sections checked", v.sections.len())
            } else {
                format!("disagree at {}", disagreements.join(", "))
            },
        );

        // Verdict versus factorizability.
        match analysis::brute_force_noncontextual_oracle(&model) {
            Ok(decomposable) => {
                let agrees = decomposable == !v.contextual;
                if !agrees {
                    mismatches += 1;
                }
                report.push_oracle(
                    "factorizability",
                    agrees,
                    format!(
                        "sweep says {}, oracle decomposition {}",
                        if v.contextual { "contextual" } else { "noncontextual" },
                        if decomposable { "exists" } else { "absent" }
                    ),
                );
            }
            Err(e) => {
                eprintln!("error: {e}");
                return map_analysis_error(&e);
            }
        }

        // Fraction consistency on rational models.
        if model.semiring().kind() == SemiringKind::NonnegRational {
            match analysis::contextual_fraction(&model) {
                Ok(f) => {
                    let agrees = (f.value > num::BigRational::from_integer(0.into()))
                        == v.contextual;
                    if !agrees {
                        mismatches += 1;
                    }
                    report.push_oracle(
                        "fraction-positivity",
                        agrees,
                        format!("fraction {}", f.value),
                    );
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return map_analysis_error(&e);
                }
            }
        }

        // Seeded algebraic law checks on this model's scenario.
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let law = cochain::complex_condition_check(
            model.scenario(),
            &nerve,
            model.semiring(),
            0,
            25,
            &mut rng,
        )
        .unwrap_or(false);
        if !law {
            mismatches += 1;
        }
        report.push_oracle(
            "coboundary-compatibility",
            law,
            "25 random degree-0 cochains".to_string(),
        );
    }

    print!("{}", report.render_text());
    if let Some(out_path) = out {
        if let Err(e) = std::fs::write(out_path, report.to_json()) {
            eprintln!("error: cannot write {}: {e}", out_path.display());
            return exit::SEMANTIC;
        }
    }
    if mismatches > 0 {
        eprintln!("error: {mismatches} oracle cross-check(s) failed");
        return exit::MISMATCH;
    }
    exit::OK
}

fn map_analysis_error(e: &analysis::AnalysisError) -> i32 {
    match e {
        analysis::AnalysisError::Disturbing(_) => exit::DISTURBING,
        analysis::AnalysisError::Model(ModelError::TooLarge(_)) => exit::TOO_LARGE,
        _ => exit::SEMANTIC,
    }
}

fn cmd_corpus(seed: u64, cutoff: u128) -> i32 {
    let expectations = corpus::expectations();
    let mut failures = 0usize;

    for entry in corpus::ENTRIES {
        let expected = expectations
            .iter()
            .find(|e| e.name == entry.name)
            .expect("every corpus entry has an expectation");
        let diffs = corpus::check_entry(entry, expected);
        if diffs.is_empty() {
            println!("corpus {}: ok", entry.name);
        } else {
            failures += diffs.len();
            println!("corpus {}: FAILED", entry.name);
            for d in diffs {
                println!("  {d}");
            }
        }
    }

    // Seeded random-model sweep: implementation vs oracles.
    let shapes = [ScenarioShape::FourCycle, ScenarioShape::Triangle];
    let mut checked = 0usize;
    for (i, shape) in shapes.iter().enumerate() {
        for k in 0..6u64 {
            let model_seed = seed.wrapping_add(k * 2 + i as u64 * 101);
            let rational = analysis::random_nondisturbing_rational(*shape, model_seed, 12);
            let boolean = analysis::random_nondisturbing_boolean(*shape, model_seed);
            for model in [rational, boolean] {
                if model
                    .scenario()
                    .event_count(&(0..model.scenario().measurement_count()).collect::<Vec<_>>())
                    > cutoff
                {
                    println!("sweep: skipped a model above the cutoff");
                    continue;
                }
                match sweep_against_oracle(&model) {
                    Ok(n) => checked += n,
                    Err(msg) => {
                        failures += 1;
                        println!("sweep seed {model_seed}: {msg}");
                    }
                }
            }
        }
    }
    println!("sweep: {checked} sections checked against the oracle");

    if failures == 0 {
        println!("corpus: all expectations met");
        exit::OK
    } else {
        println!("corpus: {failures} failure(s)");
        exit::MISMATCH
    }
}

fn sweep_against_oracle(model: &EmpiricalModel) -> Result<usize, String> {
    let verdict = analysis::is_r_contextual(model).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for section in &verdict.sections {
        let oracle = analysis::brute_force_section_oracle(model, section.context, &section.event)
            .map_err(|e| e.to_string())?;
        if oracle != (section.verdict == Verdict::Trivial) {
            return Err(format!(
                "oracle mismatch at {} -> {}",
                model.scenario().context_label(section.context),
                model.scenario().event_key(&section.event)
            ));
        }
        checked += 1;
    }
    let decomposable =
        analysis::brute_force_noncontextual_oracle(model).map_err(|e| e.to_string())?;
    if decomposable != !verdict.contextual {
        return Err("verdict/factorizability mismatch".to_string());
    }
    Ok(checked)
}
