//! The effective run configuration: defaults, an optional TOML file, then
//! command-line overrides. It is echoed into every report.

use std::path::Path;

use anyhow::{bail, Context, Result};
use growthclass::battery::{self, Member};
use growthclass::{Grid, GridSpec, Policy};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[value(alias = "structured")]
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatterySel {
    /// Bases, products and mixtures.
    Standard,
    /// Gevrey and q-Gevrey bases only.
    Bases,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
    /// Add the truncation knots of a sequence to the grid where a
    /// command samples `ω` or recovers from it.
    pub knot_augmented: bool,
    #[serde(rename = "J")]
    pub j: usize,
    pub margin: f64,
    pub l_max: u32,
    pub c_max: u32,
    /// The H (and L) ladder is 2, 4, ... up to this.
    pub h_max: f64,
    /// The parameter ladders are 1, 2, ... up to this and the reciprocals.
    pub c_ladder_max: f64,
    pub format: Format,
    pub battery: BatterySel,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        let p = Policy::default();
        RunConfig {
            t_min: g.t_min,
            t_max: g.t_max,
            n: g.n,
            knot_augmented: true,
            j: battery::J_DEFAULT,
            margin: p.margin,
            l_max: p.l_max,
            c_max: p.c_max,
            h_max: *p.h_ladder.last().unwrap(),
            c_ladder_max: *p.exists_ladder.last().unwrap(),
            format: Format::Json,
            battery: BatterySel::Standard,
        }
    }
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Smallest grid abscissa t.
    #[arg(long, global = true)]
    pub grid_min: Option<f64>,
    #[arg(long, global = true)]
    pub grid_max: Option<f64>,
    /// Number of geometric grid points.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Truncation index of generated sequences.
    #[arg(long = "J", global = true)]
    pub j: Option<usize>,
    /// Trend slope margin.
    #[arg(long, global = true)]
    pub margin: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file with any RunConfig fields; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
}

impl RunConfig {
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let mut c = match &o.config {
            Some(p) => Self::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(x) = o.grid_min {
            c.t_min = x;
        }
        if let Some(x) = o.grid_max {
            c.t_max = x;
        }
        if let Some(x) = o.grid_n {
            c.n = x;
        }
        if let Some(x) = o.j {
            c.j = x;
        }
        if let Some(x) = o.margin {
            c.margin = x;
        }
        if let Some(x) = o.format {
            c.format = x;
        }
        c.validate()?;
        Ok(c)
    }

    fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("t_min", self.t_min),
            ("t_max", self.t_max),
            ("margin", self.margin),
            ("h_max", self.h_max),
            ("c_ladder_max", self.c_ladder_max),
        ];
        for (k, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                bail!("{k} must be a positive number, got {v}");
            }
        }
        if self.t_min >= self.t_max {
            bail!(
                "t_min = {} must be below t_max = {}",
                self.t_min,
                self.t_max
            );
        }
        if self.n < 2 {
            bail!("the grid needs at least 2 points");
        }
        if self.j < 8 {
            bail!("J must be at least 8, got {}", self.j);
        }
        if self.l_max == 0 || self.c_max == 0 {
            bail!("l_max and c_max must be positive");
        }
        if self.h_max < 2.0 {
            bail!("h_max must be at least 2");
        }
        if self.c_ladder_max < 1.0 {
            bail!("c_ladder_max must be at least 1");
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::geometric(&GridSpec {
            t_min: self.t_min,
            t_max: self.t_max,
            n: self.n,
        })
    }

    pub fn policy(&self) -> Policy {
        let doublings = |top: f64| {
            let k = top.log2().floor() as i32;
            (0..=k).map(|i| 2f64.powi(i)).collect::<Vec<_>>()
        };
        let c = doublings(self.c_ladder_max);
        Policy {
            margin: self.margin,
            l_max: self.l_max,
            c_max: self.c_max,
            h_ladder: doublings(self.h_max)[1..].to_vec(),
            forall_ladder: c.iter().map(|x| 1.0 / x).collect(),
            exists_ladder: c,
            ..Policy::default()
        }
    }

    pub fn battery(&self) -> Vec<Member> {
        match self.battery {
            BatterySel::Standard => battery::standard(self.j),
            BatterySel::Bases => battery::bases(self.j),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_the_library_policy() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.policy(), Policy::default());
        assert_eq!(c.grid(), Grid::geometric(&GridSpec::default()));
    }

    #[test]
    fn toml_then_flags() {
        let dir = std::env::temp_dir().join(format!("gc-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("run.toml");
        std::fs::write(&p, "J = 64\nmargin = 0.1\nformat = \"csv\"\n").unwrap();
        let o = Overrides {
            config: Some(p.clone()),
            margin: Some(0.2),
            ..Default::default()
        };
        let c = RunConfig::resolve(&o).unwrap();
        assert_eq!((c.j, c.margin, c.format), (64, 0.2, Format::Csv));
        std::fs::write(&p, "bogus = 1\n").unwrap();
        assert!(RunConfig::resolve(&o).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn invalid_values_are_rejected() {
        for o in [
            Overrides {
                j: Some(4),
                ..Default::default()
            },
            Overrides {
                grid_min: Some(10.0),
                grid_max: Some(1.0),
                ..Default::default()
            },
            Overrides {
                margin: Some(-1.0),
                ..Default::default()
            },
        ] {
            assert!(RunConfig::resolve(&o).is_err());
        }
    }
}
