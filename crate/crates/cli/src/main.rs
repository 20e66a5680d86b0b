use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use platemorph::config::{extract_overrides, ConfigError, PipelineConfig};
use platemorph::eval::{evaluate, EvalError};
use platemorph::pipeline::{load_mask, run_pipeline, DirSink, MaskError, NoDump, PipelineError, StageSink};
use platemorph::synth::{generate_corpus, SynthSpec};
use platemorph_core::netpbm::load_ppm;
use platemorph_core::preprocess::ImageMask;
use serde_json::json;

const EXIT_NO_CANDIDATE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_CONFIG: u8 = 4;

/// License plate localization by binary morphology.
///
/// Pipeline settings come from `--config FILE` (`key = value` lines) and
/// `--key=value` overrides such as `--canny.sigma=1.5`.
#[derive(Parser)]
#[command(name = "platemorph", version)]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the plate in one P6 image.
    Locate {
        image: PathBuf,
        /// Write the numbered stage images.
        #[arg(long)]
        dump: bool,
        /// Stage directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded synthetic corpus with ground-truth sidecars.
    GenCorpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score the pipeline on a corpus directory.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
    },
}

struct Failure {
    code: u8,
    stage: Option<&'static str>,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            stage: None,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(EXIT_CONFIG, e)
    }
}

impl From<MaskError> for Failure {
    fn from(e: MaskError) -> Self {
        Failure::new(EXIT_IO, e)
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match e {
            PipelineError::NoCandidate => EXIT_NO_CANDIDATE,
            PipelineError::Io { .. } => EXIT_IO,
            PipelineError::Stage { .. } => EXIT_CONFIG,
        };
        Self {
            code,
            stage: Some(e.stage()),
            message: e.to_string(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Pipeline { source, path } => {
                let mut f = Failure::from(source);
                f.message = format!("{}: {}", path.display(), f.message);
                f
            }
            other => Failure::new(EXIT_IO, other),
        }
    }
}

fn load_config(file: Option<&Path>, overrides: &[(String, String)]) -> Result<PipelineConfig, Failure> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = file {
        let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn mask_for(cfg: &PipelineConfig) -> Result<Option<ImageMask>, Failure> {
    Ok(cfg.mask.as_deref().map(load_mask).transpose()?)
}

fn run(cli: Cli, overrides: &[(String, String)]) -> Result<(), Failure> {
    match cli.command {
        Command::Locate { image, dump, out } => {
            let mut cfg = load_config(cli.config.as_deref(), overrides)?;
            cfg.dump_stages = dump;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            let mask = mask_for(&cfg)?;
            let bytes = fs::read(&image).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", image.display())))?;
            let img = load_ppm(&bytes).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", image.display())))?;
            let mut sink: Box<dyn StageSink> = if cfg.dump_stages {
                Box::new(DirSink::new(&cfg.output_dir))
            } else {
                Box::new(NoDump)
            };
            let loc = run_pipeline(&img, mask.as_ref(), &cfg, sink.as_mut())?;
            println!(
                "{}",
                serde_json::to_string(&loc.result).expect("plate result serializes")
            );
        }
        Command::GenCorpus { seed, n, out } => {
            if !overrides.is_empty() {
                return Err(Failure::new(EXIT_CONFIG, "gen-corpus takes no pipeline overrides"));
            }
            let spec = SynthSpec {
                seed,
                ..SynthSpec::default()
            };
            let paths = generate_corpus(&spec, n, &out)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", out.display())))?;
            println!("{}", json!({"seed": seed, "n": paths.len(), "out": out}));
        }
        Command::Evaluate { corpus } => {
            let cfg = load_config(cli.config.as_deref(), overrides)?;
            let mask = mask_for(&cfg)?;
            let (records, summary) = evaluate(&corpus, mask.as_ref(), &cfg)?;
            for r in &records {
                println!("{}", serde_json::to_string(r).expect("record serializes"));
            }
            println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let (args, overrides) = extract_overrides(std::env::args().collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            println!("{}", json!({"error": f.message, "stage": f.stage, "status": f.code}));
            ExitCode::from(f.code)
        }
    }
}
