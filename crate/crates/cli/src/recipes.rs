//! Named figure presets and their JSON form.

use planar_memory::montecarlo::{ExperimentConfig, Mode, ReadoutDecoder};
use serde::{Deserialize, Serialize};

/// A set of curves sharing one p grid. Each curve is written to its own CSV
/// file, `<recipe>_<label>.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureRecipe {
    pub name: String,
    /// Which plot of the original study the data corresponds to.
    pub figure: String,
    pub p_grid: Vec<f64>,
    pub curves: Vec<Curve>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Curve {
    /// Monte Carlo estimate; `config.p` is replaced by each grid value.
    /// Columns: N,M,p,k,n,mode,decoder,syndrome_noise,seed,successes,p_hat,stderr.
    Simulation { label: String, config: ExperimentConfig },
    /// Analytic storage bound. Columns: N,M,k,p,alpha,bound,vacuous.
    StorageBound {
        label: String,
        rows: usize,
        cols: usize,
        steps: usize,
    },
}

impl Curve {
    pub fn label(&self) -> &str {
        match self {
            Curve::Simulation { label, .. } | Curve::StorageBound { label, .. } => label,
        }
    }
}

pub const DEFAULT_GRID: [f64; 8] = [0.001, 0.002, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03];

fn sim(label: &str, config: ExperimentConfig) -> Curve {
    Curve::Simulation {
        label: label.into(),
        config,
    }
}

fn sized(rows: usize, cols: usize, mode: Mode) -> ExperimentConfig {
    ExperimentConfig {
        rows,
        cols,
        mode,
        ..Default::default()
    }
}

pub fn builtin() -> Vec<FigureRecipe> {
    let base = ExperimentConfig::default();
    let recipe = |name: &str, figure: &str, curves: Vec<Curve>| FigureRecipe {
        name: name.into(),
        figure: figure.into(),
        p_grid: DEFAULT_GRID.to_vec(),
        curves,
    };
    let sizes = [(5, 6), (7, 8), (9, 10), (11, 12)];
    let mut storage_curves: Vec<Curve> = sizes
        .iter()
        .map(|&(n, m)| sim(&format!("no-enc-{n}x{m}"), sized(n, m, Mode::NoEncode)))
        .collect();
    storage_curves.extend(sizes.iter().map(|&(n, m)| Curve::StorageBound {
        label: format!("bound-{n}x{m}"),
        rows: n,
        cols: m,
        steps: base.steps,
    }));
    vec![
        recipe(
            "fig:enc-vs-no-enc",
            "Encoding with line decoding vs no encoding with perfect decoding",
            vec![
                sim("encode-line", base.clone()),
                sim(
                    "no-encode",
                    ExperimentConfig {
                        mode: Mode::NoEncode,
                        ..base.clone()
                    },
                ),
            ],
        ),
        recipe(
            "fig:syndrome-noise",
            "Errors on qubits and syndrome vs errors on qubits only",
            vec![
                sim("syndrome-noise-on", base.clone()),
                sim(
                    "syndrome-noise-off",
                    ExperimentConfig {
                        syndrome_noise: false,
                        ..base.clone()
                    },
                ),
            ],
        ),
        recipe(
            "fig:errsyndr",
            "No encoding with perfect decoding for several code sizes, with the storage bound",
            storage_curves,
        ),
        recipe(
            "fig:enc-cmp-code-sizes",
            "Encoding with line decoding for several code sizes",
            sizes
                .iter()
                .map(|&(n, m)| sim(&format!("encode-{n}x{m}"), sized(n, m, Mode::Encode)))
                .collect(),
        ),
        recipe(
            "fig:line-vs-multiline",
            "Line vs multiline decoding",
            vec![
                sim("line", base.clone()),
                sim(
                    "multiline",
                    ExperimentConfig {
                        decoder: ReadoutDecoder::Multiline,
                        ..base
                    },
                ),
            ],
        ),
    ]
}

pub fn find(name: &str) -> Option<FigureRecipe> {
    builtin().into_iter().find(|r| r.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip_through_json() {
        for r in builtin() {
            let text = serde_json::to_string_pretty(&r).unwrap();
            let back: FigureRecipe = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
            assert!(!r.figure.is_empty());
        }
    }

    #[test]
    fn labels_unique_within_recipe() {
        for r in builtin() {
            let mut labels: Vec<_> = r.curves.iter().map(Curve::label).collect();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), r.curves.len());
        }
    }
}
