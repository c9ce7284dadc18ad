//! Ready-made experiment configurations.

use std::path::{Path, PathBuf};

use serde::Serialize;
use shiftlab::shiftop::GoldenForm;
use shiftlab::verify::Counterexample;
use shiftlab::ScalarField;

use crate::config::{CheckSettings, Construction, ExperimentConfig, ScalarInput};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub config: ExperimentConfig,
}

fn preset(name: &str, description: &str, construction: Construction) -> Preset {
    Preset {
        name: name.into(),
        description: description.into(),
        config: ExperimentConfig { seed: 0, construction, checks: CheckSettings::default() },
    }
}

fn block(p: Vec<usize>) -> Construction {
    Construction::BlockMethod { p, circles: 1, degree: 8, field: ScalarField::Real, gamma: None, gamma_seed: 0 }
}

fn delta(a: f64, b: f64) -> [ScalarInput; 2] {
    [ScalarInput::Real(a), ScalarInput::Real(b)]
}

pub fn presets() -> Vec<Preset> {
    let mut out = vec![
        preset("block-2-4", "two cyclic families of circle blocks, p = (2, 4)", block(vec![2, 4])),
        preset("block-2", "one cyclic family of two circle blocks", block(vec![2])),
        preset(
            "composition-quarter",
            "composition on the Cantor block, δ = (1/4, 1/4), two limit points",
            Construction::Composition { delta: delta(0.25, 0.25), period: 2, depth: 8, alphabet: 2 },
        ),
        preset(
            "composition-signed",
            "composition with δ = (1/2, −1/2) and one limit point",
            Construction::Composition { delta: delta(0.5, -0.5), period: 1, depth: 8, alphabet: 2 },
        ),
    ];
    for (name, form) in [("golden-plain", GoldenForm::Plain), ("golden-product", GoldenForm::Product), ("golden-twin", GoldenForm::Twin)] {
        let mut p = preset(name, "circle rotation by the golden angle with the arc functional", Construction::GoldenArcModel { form, degree: 16 });
        if form == GoldenForm::Product {
            // sup norms on the 2-torus sample resolution² points
            p.config.checks.resolution = 256;
        }
        out.push(p);
    }
    out.push(preset("complex-2", "two rotated circles with complex weights", Construction::ComplexFamily { n: 2, degree: 16, z: None }));
    out.push(preset(
        "cantor-set",
        "composition on the 2-adic integers with a translation fixing L₀",
        Construction::CantorSet { delta: delta(0.25, 0.25), depth: 8, alphabet: 2, l0: None, m0: None },
    ));
    for which in Counterexample::ALL {
        let name = format!("counterexample-{}", which.name().to_lowercase().replace('_', "-"));
        out.push(preset(&name, "isometry with an explicit non-shift witness", Construction::Counterexample { which }));
    }
    out
}

/// Writes every preset as `<name>.json` into `dir`.
pub fn write_presets(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for p in presets() {
        let path = dir.join(format!("{}.json", p.name));
        std::fs::write(&path, serde_json::to_string_pretty(&p.config).expect("config serializes"))?;
        paths.push(path);
    }
    Ok(paths)
}
