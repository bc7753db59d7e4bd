use dlg_core::plan::learn_operators;

use crate::config::Defaults;
use crate::files;
use crate::LearnOpsArgs;

pub fn run(args: &LearnOpsArgs, defaults: &Defaults) -> anyhow::Result<()> {
    let corpus = files::load_corpus(&args.corpus)?;
    let min_support = args.min_support.or(defaults.min_support).unwrap_or(2);
    let operators = learn_operators(&corpus, min_support)
        .map_err(|e| anyhow::anyhow!("learning operators from {}: {e}", args.corpus))?;
    files::save_operators(&args.out, &operators)?;
    println!(
        "learned {} operators (min support {min_support})",
        operators.len()
    );
    Ok(())
}
