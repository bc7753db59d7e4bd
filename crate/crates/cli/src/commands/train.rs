use dlg_core::predict::{self, TrainConfig};

use crate::config::Defaults;
use crate::files;
use crate::TrainArgs;

pub fn run(args: &TrainArgs, defaults: &Defaults) -> anyhow::Result<()> {
    let corpus = files::load_corpus(&args.corpus)?;
    let config = TrainConfig {
        max_order: args
            .max_order
            .or(defaults.max_order)
            .unwrap_or(predict::DEFAULT_MAX_ORDER as u32) as usize,
        held_out_fraction: args
            .held_out
            .or(defaults.held_out)
            .unwrap_or(predict::DEFAULT_HELD_OUT_FRACTION),
        split_seed: args
            .seed
            .or(defaults.seed)
            .unwrap_or(predict::DEFAULT_SPLIT_SEED),
        lambdas: None,
    };
    let model = predict::train_with(&corpus, &config)
        .map_err(|e| anyhow::anyhow!("training on {}: {e}", args.corpus))?;
    files::save_model(&args.model, &model)?;

    let lambdas: Vec<String> = model.lambdas().iter().map(|l| format!("{l:.4}")).collect();
    println!("lambdas: [{}]", lambdas.join(", "));
    Ok(())
}
