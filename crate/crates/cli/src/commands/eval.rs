use crate::config::Defaults;
use crate::files;
use crate::EvalArgs;

pub fn run(args: &EvalArgs, defaults: &Defaults) -> anyhow::Result<()> {
    let model = files::load_model(&args.model)?;
    let corpus = files::load_corpus(&args.corpus)?;
    let top_n = args.top_n.or(defaults.top_n).unwrap_or(3) as usize;
    let rate = model
        .evaluate_topn(&corpus, top_n)
        .map_err(|e| anyhow::anyhow!("evaluating {} on {}: {e}", args.model, args.corpus))?;
    println!("top-{top_n} hit rate: {:.2}%", rate * 100.0);
    Ok(())
}
