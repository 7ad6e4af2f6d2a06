//! TOML experiment configs. A file names a preset and overrides any of its
//! keys; command-line flags are applied on top by the caller.

use std::path::Path;

use levelset_core::analysis::{ExperimentSpec, NonsingularSweep};
use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::{Error, Result};

/// `skinny`/`3a` or `wide`/`3b`.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    match name {
        "skinny" | "3a" => Ok(ExperimentSpec::skinny()),
        "wide" | "3b" => Ok(ExperimentSpec::wide()),
        _ => Err(Error::Config(format!("unknown preset {name:?}, expected skinny or wide"))),
    }
}

/// Tables replace each other wholesale when they carry different `kind`
/// tags, since their other keys belong to different variants.
fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) if b.get("kind") == o.get("kind") || !o.contains_key("kind") => {
                merge(b, o)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn overlay<T: Serialize + DeserializeOwned>(base: &T, text: &str, path: &Path) -> Result<T> {
    let mut table = Table::try_from(base).map_err(|e| Error::format(path, e))?;
    let over: Table = toml::from_str(text).map_err(|e| Error::format(path, e))?;
    merge(&mut table, over);
    table.try_into().map_err(|e| Error::format(path, e))
}

/// Reads an experiment config. The optional top-level `preset` key selects
/// the base, falling back to `default_preset`.
pub fn load_experiment(path: &Path, default_preset: &str) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let mut over: Table = toml::from_str(&text).map_err(|e| Error::format(path, e))?;
    let base = match over.remove("preset") {
        Some(Value::String(p)) => preset(&p)?,
        Some(_) => return Err(Error::format(path, "preset must be a string")),
        None => preset(default_preset)?,
    };
    let rest = toml::to_string(&over).expect("table serializes");
    let spec = overlay(&base, &rest, path)?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_sweep(path: &Path) -> Result<NonsingularSweep> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let params = overlay(&NonsingularSweep::default(), &text, path)?;
    params.validate()?;
    Ok(params)
}

/// The config file equivalent of `spec`.
pub fn experiment_to_toml(spec: &ExperimentSpec) -> String {
    toml::to_string(spec).expect("spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use levelset_core::analysis::ProbeLevels;
    use levelset_core::nn::Activation;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn overrides_apply_over_preset() {
        let f = write(
            "preset = \"wide\"\nseeds = [4, 5]\nlevels = \"0.3, 0.7\"\n[train]\nsteps = 10\n[activation]\nkind = \"tanh\"\n",
        );
        let spec = load_experiment(f.path(), "skinny").unwrap();
        assert_eq!(spec.arch, [2, 3, 1]);
        assert_eq!(spec.seeds, [4, 5]);
        assert_eq!(spec.train.steps, 10);
        assert_eq!(spec.train.learning_rate, ExperimentSpec::wide().train.learning_rate);
        assert_eq!(spec.activation, Activation::Tanh);
        assert_eq!(spec.levels, ProbeLevels::Values(vec![0.3, 0.7]));
    }

    #[test]
    fn round_trip() {
        for spec in [ExperimentSpec::skinny(), ExperimentSpec::wide()] {
            let f = write(&experiment_to_toml(&spec));
            assert_eq!(load_experiment(f.path(), "wide").unwrap(), spec);
        }
    }

    #[test]
    fn rejects_inconsistent_regime() {
        let f = write("preset = \"skinny\"\narch = [2, 5, 1]\n");
        assert!(load_experiment(f.path(), "skinny").is_err());
        let f = write("preset = \"huge\"\n");
        assert!(matches!(load_experiment(f.path(), "skinny"), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_overrides() {
        let f = write("count = 3\n[window]\nlo = [-1.0, -1.0]\nhi = [1.0, 1.0]\n");
        let p = load_sweep(f.path()).unwrap();
        assert_eq!(p.count, 3);
        assert_eq!(p.window.hi(), [1.0, 1.0]);
        assert_eq!(p.levels_per_net, 5);
    }
}
