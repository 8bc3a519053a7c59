//! Command-line front door: scenario loading, loop classification, holonomy
//! evaluation, cocycle pipelines, covering-space queries, flatness scans,
//! transport, and interference scans, all deterministic under a seed.
//!
//! Exit codes: 0 success, 2 parse/config, 3 genericity, 4 non-flat numeric
//! request, 5 cocycle validation failure, 6 certificate verification
//! failure, 7 insufficient samples, 8 resource cap.

mod scenario;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use holobundle::cocycle::{self, CertificateFile, Cocycle, CocycleError, CocycleFile};
use holobundle::covering::{self, CoveringError, TreeVertex};
use holobundle::geometry::{self, GeometryError, PlanePath};
use holobundle::holonomy::{self, FluxScenario, GridSpec, HolonomyError, HolonomyMap};
use holobundle::liegroups::GroupTag;
use holobundle::propagator::{self, PropagatorError, WalkEnsemble};
use holobundle::section;
use holobundle::wire;
use holobundle::Word;

use scenario::{load_path_csv, ScenarioFile};

const EXIT_PARSE: i32 = 2;
const EXIT_GENERICITY: i32 = 3;
const EXIT_NONFLAT: i32 = 4;
const EXIT_VALIDATION: i32 = 5;
const EXIT_VERIFICATION: i32 = 6;
const EXIT_SAMPLES: i32 = 7;
const EXIT_RESOURCE: i32 = 8;

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

type CmdResult = Result<(), Failure>;

fn geometry_code(e: &GeometryError) -> i32 {
    match e {
        GeometryError::PunctureSetup(_) => EXIT_PARSE,
        _ => EXIT_GENERICITY,
    }
}

fn holonomy_code(e: &HolonomyError) -> i32 {
    match e {
        HolonomyError::Geometry(inner) => geometry_code(inner),
        HolonomyError::BasepointMismatch { .. } | HolonomyError::PunctureProximity { .. } => {
            EXIT_GENERICITY
        }
        HolonomyError::NonConvergence { .. } => EXIT_NONFLAT,
        _ => EXIT_PARSE,
    }
}

fn propagator_code(e: &PropagatorError) -> i32 {
    match e {
        PropagatorError::InsufficientSamples { .. } => EXIT_SAMPLES,
        PropagatorError::Geometry(inner) => geometry_code(inner),
        PropagatorError::Holonomy(inner) => holonomy_code(inner),
        _ => EXIT_PARSE,
    }
}

fn covering_code(e: &CoveringError) -> i32 {
    match e {
        CoveringError::ResourceExceeded { .. } => EXIT_RESOURCE,
        _ => EXIT_PARSE,
    }
}

#[derive(Parser)]
#[command(
    name = "holobundle",
    about = "Loop classification, holonomy, cocycle trivialization, covers, and interference over punctured planes",
    version
)]
struct Cli {
    /// Seed for all stochastic subcommands (falls back to HOLOBUNDLE_SEED,
    /// then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a closed loop into its reduced word and winding vector.
    Classify {
        #[arg(long)]
        scenario: PathBuf,
        /// Loop vertices as CSV, one "x,y" per line; closed up automatically.
        #[arg(long)]
        path: PathBuf,
    },
    /// Holonomy of a word or a concrete loop, optionally cross-checked
    /// against the numeric Wilson line.
    Holonomy {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, conflicts_with = "path")]
        word: Option<String>,
        #[arg(long)]
        path: Option<PathBuf>,
        /// Also integrate the Wilson line and report the distance.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Allow --numeric on scenarios whose fluxes do not commute.
        #[arg(long)]
        force: bool,
    },
    /// Cocycle pipelines: generate, validate, trivialize, verify.
    Cocycle {
        #[command(subcommand)]
        sub: CocycleCmd,
    },
    /// Interference scan over a screen; writes intensity CSV.
    Interfere {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a summary JSON (class mass, overflow, fringe shift).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Compare against the zero-flux pattern at the same seed.
        #[arg(long)]
        baseline: bool,
    },
    /// Universal-cover queries: lift, ball, monodromy.
    Cover {
        #[command(subcommand)]
        sub: CoverCmd,
    },
    /// Plaquette flatness scan and flux commutator table.
    Flatcheck {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        plaquette: f64,
        #[arg(long, default_value_t = 1.0)]
        padding: f64,
    },
    /// Parallel transport of a fiber vector along a path.
    Transport {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        path: PathBuf,
        /// Complex components "re,im;re,im;..."
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Generate a seeded random cocycle.
    Gen {
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check antisymmetry and all triple relations.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Construct a trivialization certificate.
    Trivialize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 33)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a certificate standalone.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = cocycle::CONSTRUCTION_TOL)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum CoverCmd {
    /// Endpoint of the lift of a loop word.
    Lift {
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "e")]
        start: String,
    },
    /// All tree vertices within a radius of the root.
    Ball {
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        radius: u32,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Holonomy of a fiber vertex.
    Monodromy {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        word: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("HOLOBUNDLE_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    let result = match cli.command {
        Command::Classify { scenario, path } => cmd_classify(&scenario, &path),
        Command::Holonomy {
            scenario,
            word,
            path,
            numeric,
            steps,
            force,
        } => cmd_holonomy(
            &scenario,
            word.as_deref(),
            path.as_deref(),
            numeric,
            steps,
            force,
        ),
        Command::Cocycle { sub } => match sub {
            CocycleCmd::Gen { rank, group, out } => cmd_cocycle_gen(rank, &group, seed, &out),
            CocycleCmd::Validate { input } => cmd_cocycle_validate(&input),
            CocycleCmd::Trivialize {
                input,
                samples,
                out,
            } => cmd_cocycle_trivialize(&input, samples, &out),
            CocycleCmd::Verify { cert, tol } => cmd_cocycle_verify(&cert, tol),
        },
        Command::Interfere {
            scenario,
            out,
            summary,
            baseline,
        } => cmd_interfere(&scenario, &out, summary.as_deref(), baseline, seed),
        Command::Cover { sub } => match sub {
            CoverCmd::Lift { rank, word, start } => cmd_cover_lift(rank, &word, &start),
            CoverCmd::Ball { rank, radius, cap } => cmd_cover_ball(rank, radius, cap),
            CoverCmd::Monodromy { scenario, word } => cmd_cover_monodromy(&scenario, &word),
        },
        Command::Flatcheck {
            scenario,
            plaquette,
            padding,
        } => cmd_flatcheck(&scenario, plaquette, padding),
        Command::Transport {
            scenario,
            path,
            vector,
            steps,
        } => cmd_transport(&scenario, &path, &vector, steps),
    };
    if let Err(failure) = result {
        let line = failure.message.replace('\n', " ");
        eprintln!("error[E{}]: {}", failure.code, line);
        std::process::exit(failure.code);
    }
}

fn load_scenario(path: &Path) -> Result<FluxScenario, Failure> {
    let file = ScenarioFile::load(path).map_err(|e| fail(EXIT_PARSE, e))?;
    file.to_scenario().map_err(|e| fail(EXIT_PARSE, e))
}

fn load_scenario_file(path: &Path) -> Result<(ScenarioFile, FluxScenario), Failure> {
    let file = ScenarioFile::load(path).map_err(|e| fail(EXIT_PARSE, e))?;
    let scenario = file.to_scenario().map_err(|e| fail(EXIT_PARSE, e))?;
    Ok((file, scenario))
}

fn load_loop(path: &Path) -> Result<PlanePath, Failure> {
    let vertices = load_path_csv(path).map_err(|e| fail(EXIT_PARSE, e))?;
    PlanePath::closed(vertices).map_err(|e| fail(geometry_code(&e), e))
}

fn print_json(value: serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("valid JSON")
    );
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| fail(EXIT_PARSE, format!("cannot create {}: {e}", path.display())))?;
    file.write_all(text.as_bytes())
        .map_err(|e| fail(EXIT_PARSE, format!("cannot write {}: {e}", path.display())))
}

fn cmd_classify(scenario_path: &Path, path_csv: &Path) -> CmdResult {
    let scenario = load_scenario(scenario_path)?;
    let loop_path = load_loop(path_csv)?;
    let word = geometry::word_of_loop(&loop_path, scenario.punctures(), scenario.rank())
        .map_err(|e| fail(geometry_code(&e), e))?;
    let winding = geometry::winding_numbers(&loop_path, scenario.punctures())
        .map_err(|e| fail(geometry_code(&e), e))?;
    print_json(json!({
        "word": word.to_string(),
        "winding": winding,
    }));
    Ok(())
}

fn cmd_holonomy(
    scenario_path: &Path,
    word_text: Option<&str>,
    path_csv: Option<&Path>,
    numeric: bool,
    steps: usize,
    force: bool,
) -> CmdResult {
    let scenario = load_scenario(scenario_path)?;
    let (word, concrete_path) = match (word_text, path_csv) {
        (Some(text), None) => {
            let word = Word::parse(scenario.rank(), text).map_err(|e| fail(EXIT_PARSE, e))?;
            (word, None)
        }
        (None, Some(csv)) => {
            let loop_path = load_loop(csv)?;
            let word = geometry::word_of_loop(&loop_path, scenario.punctures(), scenario.rank())
                .map_err(|e| fail(geometry_code(&e), e))?;
            (word, Some(loop_path))
        }
        _ => return Err(fail(EXIT_PARSE, "provide exactly one of --word or --path")),
    };
    let map = HolonomyMap::from_scenario(&scenario);
    let exact = map
        .holonomy_of_word(&word)
        .map_err(|e| fail(holonomy_code(&e), e))?;
    let mut output = json!({
        "group": scenario.group().name(),
        "word": word.to_string(),
        "matrix": wire::matrix_to_data(exact.matrix()),
    });
    if numeric {
        if !scenario.is_flat() && !force {
            return Err(fail(
                EXIT_NONFLAT,
                format!(
                    "scenario is non-flat (max flux commutator {:.3e}); the Wilson line is path dependent, pass --force to integrate anyway",
                    scenario.max_commutator_norm()
                ),
            ));
        }
        let path = match concrete_path {
            Some(p) => p,
            None => {
                geometry::loop_realizing_word(&word, scenario.punctures(), scenario.basepoint())
                    .map_err(|e| fail(geometry_code(&e), e))?
            }
        };
        let numeric_value = holonomy::wilson_line(&scenario, &path, steps)
            .map_err(|e| fail(holonomy_code(&e), e))?;
        let distance = numeric_value
            .distance(&exact)
            .map_err(|e| fail(EXIT_PARSE, e))?;
        output["numeric_matrix"] = json!(wire::matrix_to_data(numeric_value.matrix()));
        output["distance"] = json!(distance);
        output["steps"] = json!(steps);
    }
    print_json(output);
    Ok(())
}

fn cmd_cocycle_gen(rank: u32, group: &str, seed: u64, out: &Path) -> CmdResult {
    let tag = GroupTag::parse(group).map_err(|e| fail(EXIT_PARSE, e))?;
    let cocycle = cocycle::random_cocycle(rank, tag, seed).map_err(|e| fail(EXIT_PARSE, e))?;
    let text = serde_json::to_string_pretty(&cocycle.to_file()).expect("serializable");
    write_text(out, &(text + "\n"))?;
    print_json(json!({
        "written": out.display().to_string(),
        "rank": rank,
        "group": tag.name(),
        "seed": seed,
    }));
    Ok(())
}

fn load_cocycle(path: &Path, semantic_code: i32) -> Result<Cocycle, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    let file: CocycleFile = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_PARSE, format!("bad cocycle JSON: {e}")))?;
    // structurally valid JSON whose matrices fail membership is a semantic
    // failure, not a parse failure
    Cocycle::from_file(&file).map_err(|e| fail(semantic_code, e))
}

fn cmd_cocycle_validate(input: &Path) -> CmdResult {
    let cocycle_data = load_cocycle(input, EXIT_VALIDATION)?;
    let report = cocycle::validate_cocycle(&cocycle_data, cocycle::VALIDATION_TOL);
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    print_json(json!({
        "ok": report.is_ok(),
        "max_residual": report.max_residual,
        "tolerance": report.tolerance,
        "violations": violations,
    }));
    if !report.is_ok() {
        return Err(fail(
            EXIT_VALIDATION,
            format!(
                "cocycle fails validation with max residual {:.3e}",
                report.max_residual
            ),
        ));
    }
    Ok(())
}

fn cmd_cocycle_trivialize(input: &Path, samples: usize, out: &Path) -> CmdResult {
    let cocycle_data = load_cocycle(input, EXIT_VALIDATION)?;
    let triv = cocycle::trivialize(&cocycle_data, samples).map_err(|e| match e {
        CocycleError::Validation { .. } => fail(EXIT_VALIDATION, e),
        other => fail(EXIT_PARSE, other),
    })?;
    let report = cocycle::verify_trivialization(&cocycle_data, &triv, cocycle::CONSTRUCTION_TOL)
        .map_err(|e| fail(EXIT_PARSE, e))?;
    let cert = CertificateFile::build(&cocycle_data, &triv);
    let text = serde_json::to_string_pretty(&cert).expect("serializable");
    write_text(out, &(text + "\n"))?;
    print_json(json!({
        "written": out.display().to_string(),
        "samples_per_set": triv.samples_per_set(),
        "max_overlap_residual": report.max_overlap_residual,
        "max_continuity_gap": report.max_continuity_gap,
    }));
    Ok(())
}

fn cmd_cocycle_verify(cert_path: &Path, tol: f64) -> CmdResult {
    let text = std::fs::read_to_string(cert_path).map_err(|e| {
        fail(
            EXIT_PARSE,
            format!("cannot read {}: {e}", cert_path.display()),
        )
    })?;
    let cert: CertificateFile = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_PARSE, format!("bad certificate JSON: {e}")))?;
    let (cocycle_data, triv) = cert.decode().map_err(|e| fail(EXIT_VERIFICATION, e))?;
    let report = cocycle::verify_trivialization(&cocycle_data, &triv, tol)
        .map_err(|e| fail(EXIT_VERIFICATION, e))?;
    print_json(json!({
        "pass": report.pass(),
        "max_overlap_residual": report.max_overlap_residual,
        "worst_overlap": report.worst_overlap,
        "max_continuity_gap": report.max_continuity_gap,
        "delta_max": report.delta_max,
        "tolerance": report.tolerance,
    }));
    if !report.pass() {
        return Err(fail(
            EXIT_VERIFICATION,
            format!(
                "certificate fails verification: residual {:.3e}, continuity gap {:.3e} (budget {:.3e})",
                report.max_overlap_residual, report.max_continuity_gap, report.delta_max
            ),
        ));
    }
    Ok(())
}

fn cmd_interfere(
    scenario_path: &Path,
    out: &Path,
    summary: Option<&Path>,
    baseline: bool,
    seed: u64,
) -> CmdResult {
    let (file, scenario) = load_scenario_file(scenario_path)?;
    let lattice = file
        .lattice
        .ok_or_else(|| fail(EXIT_PARSE, "scenario has no lattice parameters"))?;
    let screen = file
        .screen
        .ok_or_else(|| fail(EXIT_PARSE, "scenario has no screen parameters"))?;
    let (detectors, coords) = screen.detectors().map_err(|e| fail(EXIT_PARSE, e))?;

    let ensemble = WalkEnsemble::new(
        scenario.clone(),
        scenario.basepoint(),
        lattice.steps,
        lattice.samples,
        seed,
        lattice.spacing,
    )
    .map_err(|e| fail(propagator_code(&e), e))?
    .with_word_cap(lattice.word_cap);

    let map = HolonomyMap::from_scenario(&scenario);
    let trivial_map = HolonomyMap::from_images(
        scenario.rank(),
        (0..scenario.rank())
            .map(|_| holobundle::GroupElement::identity(scenario.group()))
            .collect(),
    )
    .expect("identity images share the tag");

    let mut intensities = Vec::with_capacity(detectors.len());
    let mut baseline_intensities = Vec::with_capacity(detectors.len());
    let mut min_accepted = u64::MAX;
    let mut overflow_sum = 0.0f64;
    let mut table_mass_sum = 0.0f64;
    for &detector in &detectors {
        let table = propagator::sample_class_amplitudes(&ensemble, detector)
            .map_err(|e| fail(propagator_code(&e), e))?;
        min_accepted = min_accepted.min(table.accepted());
        overflow_sum += table.overflow_mass();
        table_mass_sum += table.table_mass();
        let k = propagator::assemble_propagator(&table, &map)
            .map_err(|e| fail(propagator_code(&e), e))?;
        intensities.push(k.norm_squared());
        if baseline {
            let k0 = propagator::assemble_propagator(&table, &trivial_map)
                .map_err(|e| fail(propagator_code(&e), e))?;
            baseline_intensities.push(k0.norm_squared());
        }
    }

    let mut csv = String::from("coordinate,intensity\n");
    for (coord, intensity) in coords.iter().zip(&intensities) {
        csv.push_str(&format!("{coord},{intensity}\n"));
    }
    write_text(out, &csv)?;

    if let Some(summary_path) = summary {
        let fringe = if baseline {
            match propagator::fringe_shift(&intensities, &baseline_intensities, &coords) {
                Ok(shift) => json!(shift),
                Err(PropagatorError::FlatPattern { .. }) => serde_json::Value::Null,
                Err(e) => return Err(fail(propagator_code(&e), e)),
            }
        } else {
            serde_json::Value::Null
        };
        let n = detectors.len() as f64;
        let summary_value = json!({
            "screen_points": detectors.len(),
            "samples_per_point": lattice.samples,
            "min_accepted": min_accepted,
            "mean_table_mass": table_mass_sum / n,
            "mean_overflow_mass": overflow_sum / n,
            "fringe_shift_vs_zero_flux": fringe,
            "seed": seed,
        });
        write_text(
            summary_path,
            &(serde_json::to_string_pretty(&summary_value).expect("serializable") + "\n"),
        )?;
    }
    Ok(())
}

fn cmd_cover_lift(rank: u32, word_text: &str, start_text: &str) -> CmdResult {
    let word = Word::parse(rank, word_text).map_err(|e| fail(EXIT_PARSE, e))?;
    let start =
        TreeVertex::from_word(Word::parse(rank, start_text).map_err(|e| fail(EXIT_PARSE, e))?);
    let end = covering::lift_loop(&word, &start).map_err(|e| fail(covering_code(&e), e))?;
    print_json(json!({
        "start": start.to_string(),
        "word": word.to_string(),
        "end": end.to_string(),
    }));
    Ok(())
}

fn cmd_cover_ball(rank: u32, radius: u32, cap: Option<usize>) -> CmdResult {
    let ball = covering::fiber_ball(rank, radius, cap).map_err(|e| fail(covering_code(&e), e))?;
    let words: Vec<String> = ball.iter().map(|v| v.to_string()).collect();
    print_json(json!({
        "rank": rank,
        "radius": radius,
        "count": ball.len(),
        "words": words,
    }));
    Ok(())
}

fn cmd_cover_monodromy(scenario_path: &Path, word_text: &str) -> CmdResult {
    let scenario = load_scenario(scenario_path)?;
    let word = Word::parse(scenario.rank(), word_text).map_err(|e| fail(EXIT_PARSE, e))?;
    let vertex = TreeVertex::from_word(word);
    let map = HolonomyMap::from_scenario(&scenario);
    let value =
        covering::monodromy_holonomy(&map, &vertex).map_err(|e| fail(covering_code(&e), e))?;
    print_json(json!({
        "group": scenario.group().name(),
        "vertex": vertex.to_string(),
        "matrix": wire::matrix_to_data(value.matrix()),
    }));
    Ok(())
}

fn cmd_flatcheck(scenario_path: &Path, plaquette: f64, padding: f64) -> CmdResult {
    let scenario = load_scenario(scenario_path)?;
    let grid = GridSpec::covering(&scenario, padding, plaquette);
    let report =
        holonomy::verify_flatness(&scenario, &grid).map_err(|e| fail(holonomy_code(&e), e))?;
    let commutators: Vec<serde_json::Value> = report
        .commutator_norms
        .iter()
        .map(|&(j, k, norm)| json!({"pair": [j, k], "norm": norm}))
        .collect();
    print_json(json!({
        "non_flat": report.non_flat,
        "max_plaquette_deviation": report.max_plaquette_deviation,
        "worst_plaquette": [report.worst_plaquette.x, report.worst_plaquette.y],
        "commutators": commutators,
        "plaquettes_evaluated": report.plaquettes_evaluated,
        "plaquettes_skipped": report.plaquettes_skipped,
    }));
    Ok(())
}

fn parse_vector(text: &str) -> Result<Vec<[f64; 2]>, Failure> {
    text.split(';')
        .map(|pair| {
            let mut parts = pair.split(',');
            let re = parts
                .next()
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| fail(EXIT_PARSE, format!("bad vector component '{pair}'")))?;
            let im = parts
                .next()
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| fail(EXIT_PARSE, format!("bad vector component '{pair}'")))?;
            if parts.next().is_some() {
                return Err(fail(EXIT_PARSE, "vector components are 're,im' pairs"));
            }
            Ok([re, im])
        })
        .collect()
}

fn cmd_transport(scenario_path: &Path, path_csv: &Path, vector: &str, steps: usize) -> CmdResult {
    let scenario = load_scenario(scenario_path)?;
    let vertices = load_path_csv(path_csv).map_err(|e| fail(EXIT_PARSE, e))?;
    let path = PlanePath::open(vertices).map_err(|e| fail(geometry_code(&e), e))?;
    let components = parse_vector(vector)?;
    let z0 = wire::vector_from_data(&components);
    let transported = section::parallel_transport(&scenario, &z0, &path, steps)
        .map_err(|e| fail(EXIT_GENERICITY, e))?;
    print_json(json!({
        "vector": wire::vector_to_data(&transported),
    }));
    Ok(())
}
