//! File readers and writers for the corpus, model, operator and lexicon
//! formats. All formats are UTF-8 JSON; validation runs on load so that bad
//! data is reported with its file name.

use anyhow::Context;

use dlg_core::clarify::{validate_lexicon, ConfusablePair};
use dlg_core::corpus::Corpus;
use dlg_core::plan::{OperatorSet, PlanOperator};
use dlg_core::predict::NGramModel;

pub fn load_corpus(path: &str) -> anyhow::Result<Corpus> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading corpus {path}"))?;
    let corpus: Corpus =
        serde_json::from_str(&text).with_context(|| format!("parsing corpus {path}"))?;
    corpus
        .validate()
        .map_err(|e| anyhow::anyhow!("{e}"))
        .with_context(|| format!("validating corpus {path}"))?;
    Ok(corpus)
}

pub fn load_model(path: &str) -> anyhow::Result<NGramModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading model {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing model {path}"))
}

pub fn save_model(path: &str, model: &NGramModel) -> anyhow::Result<()> {
    let mut text = serde_json::to_string(model)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing model {path}"))
}

pub fn load_operators(path: &str) -> anyhow::Result<OperatorSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading operators {path}"))?;
    let operators: Vec<PlanOperator> =
        serde_json::from_str(&text).with_context(|| format!("parsing operators {path}"))?;
    OperatorSet::new(operators)
        .map_err(|e| anyhow::anyhow!("{e}"))
        .with_context(|| format!("validating operators {path}"))
}

pub fn save_operators(path: &str, operators: &[PlanOperator]) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(operators)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing operators {path}"))
}

pub fn load_lexicon(path: &str) -> anyhow::Result<Vec<ConfusablePair>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading lexicon {path}"))?;
    let pairs: Vec<ConfusablePair> =
        serde_json::from_str(&text).with_context(|| format!("parsing lexicon {path}"))?;
    validate_lexicon(&pairs)
        .map_err(|e| anyhow::anyhow!("{e}"))
        .with_context(|| format!("validating lexicon {path}"))?;
    Ok(pairs)
}
