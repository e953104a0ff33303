use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use ctrlrob_cnn::config::{default_fc2, default_group_count, CnnConfig, FULL_GROUPS};
use ctrlrob_cnn::{build_model, save_model, train};
use ctrlrob_core::dataset::load_dataset;

use crate::args::TrainArgs;
use crate::config::{resolve_out_dir, Resolver};
use crate::errors::CliError;

pub fn run(args: TrainArgs, file: &BTreeMap<String, String>) -> Result<(), CliError> {
    let mut resolver = Resolver::new("train", file);
    let manifest: PathBuf = resolver.require::<String>("manifest", path_str(args.manifest))?.into();
    let dataset = load_dataset(&manifest)?;
    let n = dataset.manifest.n;
    resolver.note("n", n);

    let epochs = resolver.get("epochs", args.epochs, 10)?;
    let lr = resolver.get("lr", args.lr, ctrlrob_tensor_nn::AdamConfig::default().lr)?;
    let loss = resolver
        .get("loss", args.loss, "l1".into())?
        .parse::<ctrlrob_tensor_nn::LossKind>()
        .map_err(CliError::usage)?;
    let fc2 = resolver.get("fc2", args.fc2, default_fc2(n))?;
    let groups = resolver.get("groups", args.groups, default_group_count(n))?;
    let batch = resolver.get("batch", args.batch, 1)?;
    let model_seed = resolver.get("model-seed", args.model_seed, 0)?;
    let shuffle_seed = resolver.get("shuffle-seed", args.shuffle_seed, 0)?;
    let out_dir = resolve_out_dir(&mut resolver, args.out_dir)?;
    resolver.write_snapshot(&out_dir)?;

    if groups == 0 || groups > FULL_GROUPS.len() {
        return Err(CliError::usage(format!(
            "groups must lie in 1..={}, got {groups}",
            FULL_GROUPS.len()
        )));
    }
    let config = CnnConfig {
        n,
        groups: FULL_GROUPS[..groups].to_vec(),
        fc2,
        epochs,
        loss,
        adam: ctrlrob_tensor_nn::AdamConfig {
            lr,
            ..Default::default()
        },
        batch_size: batch,
        seed: model_seed,
    };

    let mut model = build_model(&config)?;
    println!(
        "training: n={n} groups={groups} fc2={fc2} params={}",
        model.network.param_count()
    );
    train(&mut model, &dataset, shuffle_seed)?;

    let mut log_csv = String::from("epoch,train_loss,val_loss\n");
    for entry in &model.log {
        let _ = writeln!(
            log_csv,
            "{},{},{}",
            entry.epoch, entry.train_loss, entry.val_loss
        );
        println!(
            "epoch {}: train {:.6} val {:.6}",
            entry.epoch, entry.train_loss, entry.val_loss
        );
    }
    std::fs::write(out_dir.join("training-log.csv"), log_csv)?;
    save_model(&out_dir.join("model.ckpt"), &model)?;
    println!("model -> {}", out_dir.join("model.ckpt").display());
    Ok(())
}

pub(crate) fn path_str(path: Option<PathBuf>) -> Option<String> {
    path.map(|p| p.display().to_string())
}
