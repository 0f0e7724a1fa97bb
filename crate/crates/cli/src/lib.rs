//! The `motion-code` command-line tool.
//!
//! Exit status is 0 on success, 1 when an input fails validation or parsing,
//! and 2 on usage errors. Machine-readable output goes to standard output;
//! prompts and diagnostics go to standard error.

mod commands;
pub mod wizard;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "motion-code", version, about = "Motion-code taxonomy toolkit")]
pub struct Cli {
    /// Codebook JSON file (defaults to the built-in table)
    #[arg(long, global = true, value_name = "PATH")]
    pub codebook: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a code string and show its components and verbs
    Parse { code: String },
    /// Format a 9-digit bit string or a class tuple like 2,0,1,1,0 as a code
    Fmt { input: String },
    /// List all valid codes in ascending bit order
    Enumerate,
    /// Hamming distance between two codes
    Dist {
        a: String,
        b: String,
        /// Count differing components instead of bits
        #[arg(long)]
        components: bool,
    },
    /// Codebook verbs closest to a code
    Nearest {
        code: String,
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
    /// Build a code by answering the decision-tree questions
    Wizard {
        /// Scripted answers, one per line ("-" reads standard input)
        #[arg(long, value_name = "PATH")]
        script: Option<PathBuf>,
        /// Nearest verbs to list for codes outside the codebook
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Inspect, export or validate a codebook
    Codebook {
        #[command(subcommand)]
        action: CodebookAction,
    },
    /// Generate a synthetic labeled feature dataset
    Synth(SynthArgs),
    /// Train a predictor on a labeled dataset
    Train(TrainArgs),
    /// Predict codes for every record of a dataset
    Predict(PredictArgs),
    /// Evaluate a predictor on a labeled dataset
    Eval(PredictArgs),
    /// Replace the nouns of a fraction of records with wrong ones
    Noise(NoiseArgs),
}

#[derive(Debug, Subcommand)]
pub enum CodebookAction {
    /// Print one line per entry
    Show,
    /// Print the codebook in its JSON file format
    Export {
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Check a codebook file
    Validate { path: PathBuf },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Visual feature dimension
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 32)]
    pub noun_dim: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset output (JSON Lines); standard output when omitted
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Where to write the synthetic noun embeddings
    #[arg(long, value_name = "PATH")]
    pub embeddings_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub use_nouns: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 3e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 5)]
    pub decay_every: usize,
    #[arg(long, default_value_t = 0.6)]
    pub decay_factor: f64,
    #[arg(long, default_value_t = 0.0)]
    pub weight_decay: f64,
    #[arg(long, default_value_t = 1)]
    pub batch_size: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// Model output (JSON)
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OptimizerArg {
    Sgd,
    Adam,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub embeddings: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Fraction of records whose nouns are replaced
    #[arg(long, default_value_t = 0.2)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Embedding file whose tokens form the replacement vocabulary
    #[arg(long, value_name = "PATH")]
    pub embeddings: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

/// Standard streams for one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit status.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let rendered = err.render().to_string();
            let sink: &mut dyn Write = if err.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match commands::execute(&cli, io) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(io.stderr, "error: {err:#}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut io = Io {
            stdin: &mut input,
            stdout: &mut out,
            stderr: &mut err,
        };
        let mut full = vec!["motion-code"];
        full.extend_from_slice(args);
        let status = run(full, &mut io);
        (
            status,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(invoke(&["frobnicate"], "").0, 2);
        assert_eq!(invoke(&["parse", "--bogus", "x"], "").0, 2);
        assert_eq!(invoke(&[], "").0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (status, out, _) = invoke(&["--help"], "");
        assert_eq!(status, 0);
        assert!(out.contains("wizard"));
    }

    #[test]
    fn parse_reports_components() {
        let (status, out, _) = invoke(&["parse", "101-0-01-01-0"], "");
        assert_eq!(status, 0);
        assert!(out.contains("turn over, flip"));
        assert!(out.contains("contact (rigid, continuous)"));
    }

    #[test]
    fn parse_invalid_dof_exits_1() {
        let (status, out, err) = invoke(&["parse", "101-0-10-00-0"], "");
        assert_eq!(status, 1);
        assert!(out.is_empty());
        assert!(err.contains("prismatic"), "{err}");
    }

    #[test]
    fn dist_prints_number() {
        assert_eq!(
            invoke(&["dist", "000-0-00-01-0", "000-0-01-00-0"], "").1,
            "2\n"
        );
        assert_eq!(
            invoke(&["dist", "--components", "100-1-01-11-0", "111-1-01-11-0"], "").1,
            "1\n"
        );
    }

    #[test]
    fn fmt_accepts_bits_and_classes() {
        assert_eq!(invoke(&["fmt", "101001010"], "").1, "101-0-01-01-0\n");
        assert_eq!(invoke(&["fmt", "4,1,2,0,0"], "").1, "111-1-11-00-0\n");
        assert_eq!(invoke(&["fmt", "010000000"], "").0, 1);
        assert_eq!(invoke(&["fmt", "4,1,3,0,0"], "").0, 1);
    }

    #[test]
    fn interactive_wizard_reprompts() {
        let (status, out, err) = invoke(
            &["wizard"],
            "perhaps\ny\nrigid\ncontinuous\nacyclic\n1\n1\nn\n",
        );
        assert_eq!(status, 0);
        assert!(out.starts_with("101-0-01-01-0"));
        assert!(err.contains("invalid answer \"perhaps\""));
        assert_eq!(err.matches("touch the passive object").count(), 2);
    }

    #[test]
    fn interactive_wizard_eof_fails() {
        assert_eq!(invoke(&["wizard"], "y\n").0, 1);
    }

    #[test]
    fn scripted_wizard_from_stdin() {
        let (status, out, _) = invoke(&["wizard", "--script", "-"], "n\nacyclic\n0\n1\nn\n");
        assert_eq!(status, 0);
        assert_eq!(out, "000-0-00-01-0  pour\n");
        let (status, _, err) = invoke(&["wizard", "--script", "-"], "maybe\n");
        assert_eq!(status, 1);
        assert!(err.contains("line 1"));
    }
}
