use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use motion_code::metrics::{component_distance, evaluate, hamming, render_table};
use motion_code::predictor::{
    inject_noun_noise, read_records, synth_dataset, train, write_records, EmbeddingTable,
    FeatureRecord, ModelConfig, Optimizer, PredictorModel, SynthConfig, TrainConfig,
};
use motion_code::{enumerate_all, Codebook, ComponentClasses, MotionCode};

use crate::wizard::{run_script, Wizard};
use crate::{
    Cli, CodebookAction, Command, Format, Io, NoiseArgs, OptimizerArg, PredictArgs, SynthArgs,
    TrainArgs,
};

pub(crate) fn execute(cli: &Cli, io: &mut Io<'_>) -> Result<()> {
    let format = cli.format;
    match &cli.command {
        Command::Parse { code } => parse(cli, code, io),
        Command::Fmt { input } => {
            let code = format_input(input)?;
            emit(io, format, &json!(code.to_string()), &format!("{code}\n"))
        }
        Command::Enumerate => {
            let all = enumerate_all();
            let text: String = all.iter().map(|c| format!("{c}\n")).collect();
            emit(io, format, &json!(all), &text)
        }
        Command::Dist { a, b, components } => {
            let (a, b) = (code_arg(a)?, code_arg(b)?);
            let (bits, comps) = (hamming(&a, &b), component_distance(&a, &b));
            let shown = if *components { comps } else { bits };
            emit(
                io,
                format,
                &json!({ "hamming": bits, "components": comps }),
                &format!("{shown}\n"),
            )
        }
        Command::Nearest { code, k } => {
            if *k == 0 {
                bail!("--k must be at least 1");
            }
            let book = codebook(cli)?;
            let rows = book.nearest_verbs(&code_arg(code)?, *k);
            let text: String = rows
                .iter()
                .map(|n| format!("{}  {}  {}\n", n.distance, n.code, n.label))
                .collect();
            emit(io, format, &json!(rows), &text)
        }
        Command::Wizard { script, k } => wizard(cli, script.as_deref(), *k, io),
        Command::Codebook { action } => codebook_command(cli, action, io),
        Command::Synth(args) => synth(cli, args, io),
        Command::Train(args) => train_command(args, format, io),
        Command::Predict(args) => predict(args, io),
        Command::Eval(args) => eval(args, format, io),
        Command::Noise(args) => noise(args, io),
    }
}

fn emit(io: &mut Io<'_>, format: Format, value: &serde_json::Value, table: &str) -> Result<()> {
    match format {
        Format::Json => writeln!(io.stdout, "{}", serde_json::to_string_pretty(value)?)?,
        Format::Table => io.stdout.write_all(table.as_bytes())?,
    }
    Ok(())
}

fn code_arg(text: &str) -> Result<MotionCode> {
    MotionCode::parse(text).with_context(|| format!("invalid motion code {text:?}"))
}

fn codebook(cli: &Cli) -> Result<Codebook> {
    match &cli.codebook {
        None => Ok(Codebook::builtin()),
        Some(path) => load_codebook(path),
    }
}

fn load_codebook(path: &Path) -> Result<Codebook> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Codebook::load(file).with_context(|| format!("loading codebook {}", path.display()))
}

fn read_lines(path: &Path, stdin: &mut dyn BufRead) -> Result<Vec<String>> {
    let lines = if path == Path::new("-") {
        stdin.lines().collect::<std::io::Result<Vec<_>>>()
    } else {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        BufReader::new(file).lines().collect()
    };
    lines.with_context(|| format!("reading {}", path.display()))
}

fn load_records(path: &Path) -> Result<Vec<FeatureRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_records(BufReader::new(file)).with_context(|| format!("reading dataset {}", path.display()))
}

fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    EmbeddingTable::from_text(BufReader::new(file))
        .with_context(|| format!("reading embeddings {}", path.display()))
}

fn write_output(io: &mut Io<'_>, path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => io.stdout.write_all(bytes).map_err(Into::into),
    }
}

/// Accepts nine binary digits, a comma-separated class tuple, or a code
/// string.
fn format_input(input: &str) -> Result<MotionCode> {
    let input = input.trim();
    if input.contains(',') {
        let classes: Vec<usize> = input
            .split(',')
            .map(|c| c.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("invalid class tuple {input:?}"))?;
        let classes: [usize; 5] = classes
            .try_into()
            .map_err(|v: Vec<usize>| anyhow!("class tuple needs 5 entries, got {}", v.len()))?;
        return Ok(MotionCode::from_classes(ComponentClasses::from_array(classes))?);
    }
    if input.len() == 9 && input.bytes().all(|b| b == b'0' || b == b'1') {
        let bits: Vec<u8> = input.bytes().map(|b| b - b'0').collect();
        return MotionCode::from_bits(&bits).with_context(|| format!("invalid bits {input:?}"));
    }
    code_arg(input)
}

fn parse(cli: &Cli, text: &str, io: &mut Io<'_>) -> Result<()> {
    let code = code_arg(text)?;
    let verbs = codebook(cli)?.verbs_for(&code);
    let bits: String = code.to_bits().iter().map(|b| b.to_string()).collect();
    let classes = code.classes().to_array();
    let value = json!({
        "code": code,
        "bits": bits,
        "classes": classes,
        "interaction": code.interaction.to_string(),
        "recurrence": code.recurrence.to_string(),
        "prismatic": code.prismatic.to_string(),
        "revolute": code.revolute.to_string(),
        "passive": code.passive.to_string(),
        "verbs": verbs,
    });
    let class_text: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
    let verb_text = if verbs.is_empty() {
        "(none)".to_string()
    } else {
        verbs.join(", ")
    };
    let table = format!(
        "code         {code}\n\
         bits         {bits}\n\
         classes      {}\n\
         interaction  {}\n\
         recurrence   {}\n\
         prismatic    {}\n\
         revolute     {}\n\
         passive      {}\n\
         verbs        {verb_text}\n",
        class_text.join(","),
        code.interaction,
        code.recurrence,
        code.prismatic,
        code.revolute,
        code.passive,
    );
    emit(io, cli.format, &value, &table)
}

fn wizard(cli: &Cli, script: Option<&Path>, k: usize, io: &mut Io<'_>) -> Result<()> {
    let book = codebook(cli)?;
    let codes = match script {
        Some(path) => {
            let lines = read_lines(path, io.stdin)?;
            run_script(&lines).with_context(|| format!("in script {}", path.display()))?
        }
        None => vec![interactive(io)?],
    };
    let mut results = Vec::new();
    let mut table = String::new();
    for code in codes {
        let verbs = book.verbs_for(&code);
        let nearest = if verbs.is_empty() {
            book.nearest_verbs(&code, k)
        } else {
            Vec::new()
        };
        let summary = if !verbs.is_empty() {
            verbs.join(", ")
        } else if nearest.is_empty() {
            "(no codebook entries)".to_string()
        } else {
            let near: Vec<String> = nearest
                .iter()
                .map(|n| format!("{} ({})", n.label, n.distance))
                .collect();
            format!("~ {}", near.join(", "))
        };
        table.push_str(&format!("{code}  {summary}\n"));
        results.push(json!({ "code": code, "verbs": verbs, "nearest": nearest }));
    }
    emit(io, cli.format, &json!(results), &table)
}

fn interactive(io: &mut Io<'_>) -> Result<MotionCode> {
    let mut wizard = Wizard::new();
    while let Some(question) = wizard.next_question() {
        write!(io.stderr, "{} ", question.prompt())?;
        io.stderr.flush()?;
        let mut line = String::new();
        if io.stdin.read_line(&mut line)? == 0 {
            bail!("input ended before the {question} question was answered");
        }
        if let Err(e) = wizard.answer(&line) {
            writeln!(io.stderr, "{e}")?;
        }
    }
    Ok(wizard.code().expect("all questions answered"))
}

fn codebook_command(cli: &Cli, action: &CodebookAction, io: &mut Io<'_>) -> Result<()> {
    match action {
        CodebookAction::Show => {
            let book = codebook(cli)?;
            let mut table = String::new();
            let mut rows = Vec::new();
            for entry in book.entries() {
                let labels: Vec<&str> = entry.verbs.iter().map(|v| v.label.as_str()).collect();
                table.push_str(&format!("{}  {}\n", entry.code, labels.join(", ")));
                rows.push(json!({ "code": entry.code, "verbs": labels }));
            }
            emit(io, cli.format, &json!(rows), &table)
        }
        CodebookAction::Export { output } => {
            let mut buf = Vec::new();
            codebook(cli)?.save(&mut buf)?;
            write_output(io, output.as_deref(), &buf)
        }
        CodebookAction::Validate { path } => {
            let book = load_codebook(path)?;
            writeln!(
                io.stdout,
                "ok: {} entries, {} verbs",
                book.len(),
                book.verb_count()
            )?;
            Ok(())
        }
    }
}

fn synth(cli: &Cli, args: &SynthArgs, io: &mut Io<'_>) -> Result<()> {
    let codes = codebook(cli)?.codes();
    let config = SynthConfig {
        n: args.n,
        visual_dim: args.dim,
        noun_dim: args.noun_dim,
        sigma: args.sigma,
        seed: args.seed,
    };
    let data = synth_dataset(&codes, &config)?;
    if let Some(path) = &args.embeddings_out {
        let mut buf = Vec::new();
        data.embeddings.write_text(&mut buf)?;
        std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut buf = Vec::new();
    write_records(&mut buf, &data.records)?;
    write_output(io, args.output.as_deref(), &buf)
}

fn train_command(args: &TrainArgs, format: Format, io: &mut Io<'_>) -> Result<()> {
    let records = load_records(&args.data)?;
    let first = records
        .first()
        .ok_or_else(|| anyhow!("dataset {} is empty", args.data.display()))?;
    let table = args.embeddings.as_deref().map(load_embeddings).transpose()?;
    let mut model_config = ModelConfig::new(first.rgb.len());
    model_config.seed = args.seed;
    if args.use_nouns {
        let table = table
            .as_ref()
            .ok_or_else(|| anyhow!("--use-nouns needs --embeddings"))?;
        model_config = model_config.with_nouns(table.dim());
    }
    let config = TrainConfig {
        epochs: args.epochs,
        base_lr: args.lr,
        decay_factor: args.decay_factor,
        decay_every: args.decay_every,
        batch_size: args.batch_size,
        weight_decay: args.weight_decay,
        seed: args.seed,
        optimizer: match args.optimizer {
            OptimizerArg::Sgd => Optimizer::Sgd,
            OptimizerArg::Adam => Optimizer::Adam,
        },
    };
    let (model, trace) = train(PredictorModel::new(model_config), &records, table.as_ref(), &config)?;
    let mut buf = Vec::new();
    model.save(&mut buf)?;
    std::fs::write(&args.output, buf).with_context(|| format!("writing {}", args.output.display()))?;

    let mut text = format!("{:>5}  {:>10}  {:>10}  {:>10}\n", "epoch", "lr", "rgb_loss", "flow_loss");
    for s in &trace {
        text.push_str(&format!(
            "{:>5}  {:>10.3e}  {:>10.6}  {:>10.6}\n",
            s.epoch, s.learning_rate, s.rgb_loss, s.flow_loss
        ));
    }
    emit(io, format, &json!(trace), &text)
}

struct Loaded {
    model: PredictorModel,
    records: Vec<FeatureRecord>,
    table: Option<EmbeddingTable>,
}

fn load_for_inference(args: &PredictArgs) -> Result<Loaded> {
    let file = File::open(&args.model).with_context(|| format!("opening {}", args.model.display()))?;
    let model = PredictorModel::load(BufReader::new(file))
        .with_context(|| format!("loading model {}", args.model.display()))?;
    let records = load_records(&args.data)?;
    let table = args.embeddings.as_deref().map(load_embeddings).transpose()?;
    if model.config.use_nouns && table.is_none() {
        bail!("model uses noun features; pass --embeddings");
    }
    Ok(Loaded {
        model,
        records,
        table,
    })
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    id: &'a str,
    rgb: MotionCode,
    flow: MotionCode,
    fused: MotionCode,
    fused_probs: &'a [Vec<f64>; 5],
}

fn predict(args: &PredictArgs, io: &mut Io<'_>) -> Result<()> {
    let loaded = load_for_inference(args)?;
    let mut buf = Vec::new();
    for record in &loaded.records {
        let p = loaded
            .model
            .predict(record, loaded.table.as_ref())
            .with_context(|| format!("record {:?}", record.id))?;
        let line = PredictionLine {
            id: &record.id,
            rgb: p.rgb,
            flow: p.flow,
            fused: p.fused,
            fused_probs: &p.fused_probs.heads,
        };
        serde_json::to_writer(&mut buf, &line)?;
        buf.push(b'\n');
    }
    write_output(io, args.output.as_deref(), &buf)
}

fn eval(args: &PredictArgs, format: Format, io: &mut Io<'_>) -> Result<()> {
    let loaded = load_for_inference(args)?;
    let mut pairs = [Vec::new(), Vec::new(), Vec::new()];
    for record in &loaded.records {
        let truth = record
            .label
            .ok_or_else(|| anyhow!("record {:?} has no code to evaluate against", record.id))?;
        let p = loaded
            .model
            .predict(record, loaded.table.as_ref())
            .with_context(|| format!("record {:?}", record.id))?;
        pairs[0].push((p.rgb, truth));
        pairs[1].push((p.flow, truth));
        pairs[2].push((p.fused, truth));
    }
    let [rgb, flow, fused] = pairs.map(|p| evaluate(&p));
    let (rgb, flow, fused) = (rgb?, flow?, fused?);
    let value = json!({ "rgb": rgb, "flow": flow, "fused": fused });
    let table = render_table(&[("RGB", &rgb), ("Flow", &flow), ("Fused", &fused)]);
    let mut buf = Vec::new();
    match format {
        Format::Json => writeln!(buf, "{}", serde_json::to_string_pretty(&value)?)?,
        Format::Table => buf.extend_from_slice(table.as_bytes()),
    }
    write_output(io, args.output.as_deref(), &buf)
}

fn noise(args: &NoiseArgs, io: &mut Io<'_>) -> Result<()> {
    let records = load_records(&args.data)?;
    let vocabulary = load_embeddings(&args.embeddings)?.tokens().to_vec();
    let noisy = inject_noun_noise(&records, args.rho, &vocabulary, args.seed)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &noisy)?;
    write_output(io, args.output.as_deref(), &buf)
}
