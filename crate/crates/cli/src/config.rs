//! Scenario files and command-line presets.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use waveguide_core::Scenario;

/// A TOML file with one `[[scenario]]` table per run.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    scenario: Vec<Scenario>,
}

pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let file: ConfigFile = toml::from_str(text)?;
    if file.scenario.is_empty() {
        bail!("no [[scenario]] table");
    }
    let mut seen = std::collections::BTreeSet::new();
    for s in &file.scenario {
        if !seen.insert(s.name.as_str()) {
            bail!("scenario name {:?} appears twice; output files would collide", s.name);
        }
    }
    Ok(file.scenario)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenarios(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Unit strip with a Neumann window of length --alpha at height --b.
    Corollary1,
    /// Unit strip with a rectangular bulge --rect AMPLITUDExWIDTH.
    Corollary2,
    /// Unit tube widened to radius --r over --width.
    Corollary3,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Corollary1 => "corollary1",
            Preset::Corollary2 => "corollary2",
            Preset::Corollary3 => "corollary3",
        }
    }
}

/// Parameters of the presets; unused ones must stay unset.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct PresetArgs {
    /// Window length (corollary1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Window height in [1/2, 1] (corollary1).
    #[arg(long)]
    pub b: Option<f64>,
    /// Bulge as AMPLITUDExWIDTH, e.g. 1x1 (corollary2).
    #[arg(long, value_parser = parse_rect)]
    pub rect: Option<(f64, f64)>,
    /// Widened tube radius (corollary3).
    #[arg(long)]
    pub r: Option<f64>,
    /// Length of the widened section (corollary3).
    #[arg(long)]
    pub width: Option<f64>,
}

fn parse_rect(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("{s:?} is not of the form AMPLITUDExWIDTH"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(w)?))
}

pub fn preset_scenario(preset: Preset, p: &PresetArgs) -> Result<Scenario> {
    let unused = |names: &[(&str, bool)]| -> Result<()> {
        for (n, set) in names {
            if *set {
                bail!("--{n} does not apply to preset {}", preset.name());
            }
        }
        Ok(())
    };
    let s = match preset {
        Preset::Corollary1 => {
            unused(&[("rect", p.rect.is_some()), ("r", p.r.is_some()), ("width", p.width.is_some())])?;
            Scenario::corollary1(p.alpha.unwrap_or(1.0), p.b.unwrap_or(1.0))?
        }
        Preset::Corollary2 => {
            unused(&[("alpha", p.alpha.is_some()), ("b", p.b.is_some()), ("r", p.r.is_some()), ("width", p.width.is_some())])?;
            let (a, w) = p.rect.unwrap_or((1.0, 1.0));
            Scenario::corollary2(a, w)?
        }
        Preset::Corollary3 => {
            unused(&[("alpha", p.alpha.is_some()), ("b", p.b.is_some()), ("rect", p.rect.is_some())])?;
            Scenario::corollary3(p.r.unwrap_or(1.2), p.width.unwrap_or(2.0))?
        }
    };
    Ok(s)
}
