//! Declarative scenario files (TOML).
//!
//! A scenario describes one design run, or a waveform set when it has a
//! `[set]` table. The top-level `seed` feeds every random choice the file
//! leaves open: the RPOCA sketch seed, random initializations, and chaotic
//! initial conditions that are not given explicitly.

use std::fs;
use std::path::{Path, PathBuf};

use pslseq::factorization::Completion;
use pslseq::{Algorithm, ChaoticMap, ChaoticParams, Constraint, Encoding, Initialization, SketchConfig, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::import_sequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub algorithm: Algorithm,
    pub n: usize,
    pub q: usize,
    pub epsilon: Option<f64>,
    pub max_iterations: Option<usize>,
    pub qp_delta: Option<f64>,
    #[serde(default)]
    pub constraint: Constraint,
    #[serde(default)]
    pub init: InitSpec,
    pub sketch: Option<SketchSpec>,
    pub set: Option<SetSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory of the scenario file; relative `init.file` paths resolve
    /// against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    #[default]
    Golomb,
    Chu,
    Barker13,
    ModifiedBernoulli {
        x0: Option<f64>,
        a: Option<f64>,
        b: Option<f64>,
        burn_in: Option<usize>,
        #[serde(default)]
        encoding: Encoding,
    },
    Bernoulli {
        lambda: f64,
        x0: Option<f64>,
        burn_in: Option<usize>,
        #[serde(default)]
        encoding: Encoding,
    },
    Random {
        seed: Option<u64>,
    },
    /// A sequence file in the `index,re,im` format.
    Explicit {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SketchSpec {
    pub rank: usize,
    pub seed: Option<u64>,
    pub power_iterations: Option<usize>,
    pub completion: Option<Completion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub m: usize,
    /// Initial conditions of the chaotic map, one per member. Drawn from the
    /// scenario seed when absent.
    pub seeds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut s = Self::parse(&text)?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| parse_error(text, &e))
    }

    pub fn is_set(&self) -> bool {
        self.set.is_some()
    }

    /// Replaces every random seed of the scenario: the top-level seed, the
    /// sketch seed and the seed of a random initialization. Explicit chaotic
    /// initial conditions are left alone.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let Some(sketch) = &mut self.sketch {
            sketch.seed = Some(seed);
        }
        if let InitSpec::Random { seed: s } = &mut self.init {
            *s = Some(seed);
        }
    }

    /// Output directory: the override, else `output.dir`, else `out/<name>`.
    pub fn output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        match (override_dir, &self.output.dir) {
            (Some(d), _) => d.to_path_buf(),
            (None, Some(d)) => d.clone(),
            (None, None) => Path::new("out").join(&self.name),
        }
    }

    fn chaotic_params(&self, x0: f64) -> CliResult<(ChaoticParams, Encoding)> {
        let (map, burn_in, encoding) = match &self.init {
            InitSpec::ModifiedBernoulli { a, b, burn_in, encoding, .. } => (
                ChaoticMap::Modified {
                    a: a.unwrap_or(pslseq::chaos::DEFAULT_A),
                    b: b.unwrap_or(pslseq::chaos::DEFAULT_B),
                },
                burn_in,
                encoding,
            ),
            InitSpec::Bernoulli {
                lambda, burn_in, encoding, ..
            } => (ChaoticMap::Bernoulli { lambda: *lambda }, burn_in, encoding),
            _ => return Err(CliError::validation("init.kind", "expected a chaotic initialization")),
        };
        let params = ChaoticParams {
            map,
            x0,
            burn_in: burn_in.unwrap_or(pslseq::chaos::DEFAULT_BURN_IN),
        };
        map.validate()?;
        Ok((params, *encoding))
    }

    /// Open interval of admissible initial conditions for the chaotic map.
    fn x0_domain(&self) -> CliResult<(f64, f64)> {
        match &self.init {
            InitSpec::ModifiedBernoulli { a, .. } => {
                let a = a.unwrap_or(pslseq::chaos::DEFAULT_A);
                Ok((-a, a))
            }
            InitSpec::Bernoulli { .. } => Ok((0.0, 1.0)),
            _ => Err(CliError::validation("init.kind", "expected a chaotic initialization")),
        }
    }

    /// `count` distinct initial conditions drawn from the scenario seed,
    /// kept away from the ends of the domain and from zero.
    fn draw_x0(&self, count: usize, stream: u64) -> CliResult<Vec<f64>> {
        let (lo, hi) = self.x0_domain()?;
        let margin = 0.01 * (hi - lo);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let mut out: Vec<f64> = Vec::with_capacity(count);
        while out.len() < count {
            let x = rng.random_range(lo + margin..hi - margin);
            if x.abs() > margin && out.iter().all(|y| (x - y).abs() > 1e-9) {
                out.push(x);
            }
        }
        Ok(out)
    }

    fn initialization(&self) -> CliResult<Initialization> {
        Ok(match &self.init {
            InitSpec::Golomb => Initialization::Golomb,
            InitSpec::Chu => Initialization::Chu,
            InitSpec::Barker13 => Initialization::Barker13,
            InitSpec::ModifiedBernoulli { x0, .. } | InitSpec::Bernoulli { x0, .. } => {
                let x0 = match x0 {
                    Some(x) => *x,
                    None => self.draw_x0(1, 0)?[0],
                };
                let (params, encoding) = self.chaotic_params(x0)?;
                Initialization::Chaotic { params, encoding }
            }
            InitSpec::Random { seed } => Initialization::Random {
                seed: seed.unwrap_or(self.seed),
            },
            InitSpec::Explicit { file } => Initialization::Explicit {
                sequence: import_sequence(&self.base_dir.join(file))?,
            },
        })
    }

    /// The validated solver configuration. For set scenarios this is the base
    /// configuration every member copies.
    pub fn solver_config(&self) -> CliResult<SolverConfig> {
        let mut c = SolverConfig::new(self.algorithm, self.n, self.q)
            .with_init(self.initialization()?)
            .with_constraint(self.constraint);
        if let Some(e) = self.epsilon {
            c = c.with_epsilon(e);
        }
        if let Some(m) = self.max_iterations {
            c = c.with_max_iterations(m);
        }
        if let Some(d) = self.qp_delta {
            c = c.with_qp_delta(d);
        }
        match (&self.sketch, self.algorithm) {
            (Some(s), _) => {
                let mut sk = SketchConfig::new(s.rank, s.seed.unwrap_or(self.seed));
                if let Some(p) = s.power_iterations {
                    sk.power_iterations = p;
                }
                if let Some(comp) = s.completion {
                    sk.completion = comp;
                }
                c = c.with_sketch(sk);
            }
            (None, Algorithm::Rpoca) => {
                return Err(CliError::validation("sketch", "RPOCA needs a [sketch] table with a rank"));
            }
            (None, _) => {}
        }
        c.validate()?;
        // Fail on a bad initialization before any compute starts.
        c.init.build(c.n)?;
        Ok(c)
    }

    /// Member initial conditions of a set scenario.
    pub fn set_seeds(&self) -> CliResult<Vec<f64>> {
        let set = self
            .set
            .as_ref()
            .ok_or_else(|| CliError::validation("set", "scenario has no [set] table"))?;
        if set.m < 2 {
            return Err(CliError::validation("set.m", format!("need at least 2 members, got {}", set.m)));
        }
        self.x0_domain()?;
        let seeds = match &set.seeds {
            Some(s) => {
                if s.len() != set.m {
                    return Err(CliError::validation(
                        "set.seeds",
                        format!("expected {} initial conditions, got {}", set.m, s.len()),
                    ));
                }
                s.clone()
            }
            None => self.draw_x0(set.m, 1)?,
        };
        for &x0 in &seeds {
            self.chaotic_params(x0)?.0.validate().map_err(|e| match CliError::from(e) {
                CliError::Validation { message, .. } => CliError::validation("set.seeds", message),
                other => other,
            })?;
        }
        Ok(seeds)
    }
}

/// Maps a TOML error to a validation error naming the offending key.
fn parse_error(text: &str, e: &toml::de::Error) -> CliError {
    let message = e.message().to_string();
    let field = backticked(&message).or_else(|| {
        let start = e.span()?.start;
        let line = text[..start].rsplit('\n').next().unwrap_or("");
        let full = text[start - line.len()..].lines().next()?;
        let key = full.split('=').next()?.trim();
        (!key.is_empty() && !key.starts_with('[')).then(|| key.to_string())
    });
    CliError::Validation {
        field,
        message: e.to_string().trim_end().to_string(),
    }
}

fn backticked(message: &str) -> Option<String> {
    let rest = message.split_once("field `")?.1;
    Some(rest.split('`').next()?.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "name = \"t\"\nalgorithm = \"poca\"\nn = 16\nq = 8\n";

    #[test]
    fn minimal_scenario_defaults() {
        let s = Scenario::parse(BASE).unwrap();
        let c = s.solver_config().unwrap();
        assert_eq!(c, SolverConfig::new(Algorithm::Poca, 16, 8));
        assert!(!s.is_set());
        assert_eq!(s.output_dir(None), Path::new("out/t"));
    }

    #[test]
    fn errors_name_the_field() {
        let err = |text: &str| Scenario::parse(text).and_then(|s| s.solver_config()).unwrap_err();
        assert_eq!(err("name = \"t\"\nalgorithm = \"poca\"\nn = 8\nq = 9\n").field(), Some("q"));
        assert_eq!(err("name = \"t\"\nalgorithm = \"poca\"\nn = 8\n").field(), Some("q"));
        assert_eq!(err(&format!("{BASE}bogus = 1\n")).field(), Some("bogus"));
        assert_eq!(err("name = \"t\"\nalgorithm = \"poca\"\nn = \"x\"\nq = 2\n").field(), Some("n"));
        assert_eq!(err(&format!("{BASE}epsilon = -1.0\n")).field(), Some("epsilon"));
        assert_eq!(
            err(&format!("{BASE}[constraint]\nkind = \"papr\"\na = 0.5\n")).field(),
            Some("constraint.a")
        );
        assert_eq!(
            err(&format!("{BASE}[init]\nkind = \"modified_bernoulli\"\nx0 = 2.0\n")).field(),
            Some("init.x0")
        );
        assert_eq!(err("name = \"t\"\nalgorithm = \"rpoca\"\nn = 16\nq = 8\n").field(), Some("sketch"));
        assert_eq!(
            err("name = \"t\"\nalgorithm = \"rpoca\"\nn = 16\nq = 8\n[sketch]\nrank = 9\n").field(),
            Some("sketch.rank")
        );
        assert!(matches!(err(&format!("{BASE}[init]\nkind = \"explicit\"\nfile = \"/nonexistent.csv\"\n")), CliError::Io { .. }));
    }

    #[test]
    fn seeds_are_drawn_and_overridden() {
        let text = format!("{BASE}seed = 3\n[init]\nkind = \"modified_bernoulli\"\n[set]\nm = 6\n");
        let s = Scenario::parse(&text).unwrap();
        let a = s.set_seeds().unwrap();
        assert_eq!(a.len(), 6);
        assert!(a.iter().all(|x| x.abs() < 1.0 && *x != 0.0));
        assert_eq!(a, s.set_seeds().unwrap());
        let mut t = s.clone();
        t.override_seed(4);
        assert_ne!(a, t.set_seeds().unwrap());
        assert_ne!(s.solver_config().unwrap().init, t.solver_config().unwrap().init);

        let bad = format!("{BASE}[init]\nkind = \"modified_bernoulli\"\n[set]\nm = 2\nseeds = [0.1]\n");
        assert_eq!(Scenario::parse(&bad).unwrap().set_seeds().unwrap_err().field(), Some("set.seeds"));
        let bad = format!("{BASE}[init]\nkind = \"modified_bernoulli\"\n[set]\nm = 2\nseeds = [0.1, 1.5]\n");
        assert_eq!(Scenario::parse(&bad).unwrap().set_seeds().unwrap_err().field(), Some("set.seeds"));
        let bad = format!("{BASE}[set]\nm = 2\n");
        assert_eq!(Scenario::parse(&bad).unwrap().set_seeds().unwrap_err().field(), Some("init.kind"));
    }

    #[test]
    fn sketch_and_constraint_tables() {
        let text = "name = \"r\"\nalgorithm = \"rpoca\"\nn = 32\nq = 8\nseed = 9\n\
                    [sketch]\nrank = 4\npower_iterations = 0\ncompletion = \"none\"\n\
                    [constraint]\nkind = \"papr\"\na = 1.2\n";
        let c = Scenario::parse(text).unwrap().solver_config().unwrap();
        assert_eq!(c.sketch, SketchConfig::literal(4, 9));
        assert_eq!(c.constraint, Constraint::Papr { a: 1.2 });
    }
}
