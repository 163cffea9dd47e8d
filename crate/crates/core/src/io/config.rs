//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [grid]
//! dim = 1
//! length = 2*pi
//! points = 256
//! ```
//!
//! Values are numbers, `inf`, `pi`, products and quotients of those
//! (`2*pi`, `pi/4`), or bare words for the enumerated keys. Every problem in a
//! file is reported at once.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::DiagnosticsConfig;
use crate::dynamics::{Formulation, SchemeConfig, SimState, SpatialScheme};
use crate::eos::{self, EosParams};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, VectorField};
use crate::kernel::{KernelKind, KernelSpec, Profile};

#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// `sigma_0 = u_0^{(1)} = amplitude * cos(2 pi mode x_1 / L)`, other components 0.
    SingleMode { mode: u32, amplitude: f64 },
    /// Random Fourier modes with `kmin <= |m| <= kmax`, each field rescaled so
    /// that its maximum modulus is `amplitude`.
    RandomBand {
        kmin: u32,
        kmax: u32,
        amplitude: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub perturbation: Perturbation,
    /// Variables the run evolves. The perturbation always defines `sigma_0`;
    /// primitive runs start from `rho_0 = rho(sigma_0)`.
    pub formulation: Formulation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub series: String,
    pub snapshot_every: usize,
}

impl OutputConfig {
    pub fn series_path(&self) -> PathBuf {
        self.directory.join(&self.series)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Grid,
    pub eos: EosParams,
    pub kernel: KernelSpec,
    pub scheme: SchemeConfig,
    pub initial: InitialData,
    pub output: OutputConfig,
    pub diagnostics: DiagnosticsConfig,
}

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["dim", "length", "points"]),
    ("eos", &["A", "gamma", "rho_bar", "a", "a_sym", "tau"]),
    ("kernel", &["kind", "profile", "radius", "rate", "cutoff", "amplitude"]),
    (
        "scheme",
        &["spatial", "dealias", "cfl", "dt_max", "t_end", "blowup_factor"],
    ),
    (
        "initial",
        &["type", "mode", "kmin", "kmax", "amplitude", "seed", "formulation"],
    ),
    ("output", &["directory", "series", "snapshot_every"]),
    ("diagnostics", &["sobolev_s", "beta"]),
];

/// Evaluates `inf`, `pi`, plain numbers and `*` / `/` chains of them.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = text;
    loop {
        let cut = rest.find(['*', '/']).unwrap_or(rest.len());
        let term = rest[..cut].trim();
        let v = match term {
            "pi" => PI,
            "inf" | "+inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            t => t.parse::<f64>().ok().filter(|x| x.is_finite())?,
        };
        value = if op == '*' { value * v } else { value / v };
        if cut == rest.len() {
            return Some(value);
        }
        op = rest[cut..].chars().next()?;
        rest = &rest[cut + 1..];
    }
}

struct Section<'a> {
    name: &'static str,
    entries: BTreeMap<String, (usize, String)>,
    errors: &'a mut Vec<String>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let (line, text) = self.raw(key)?.clone();
        let v = parse_number(&text);
        if v.is_none() {
            self.errors.push(format!(
                "line {line}: [{}] {key}: expected a number, got '{text}'",
                self.name
            ));
        }
        v
    }

    fn number_or(&mut self, key: &str, default: f64) -> f64 {
        if self.has(key) {
            self.number(key).unwrap_or(default)
        } else {
            default
        }
    }

    fn required_number(&mut self, key: &str) -> Option<f64> {
        if !self.has(key) {
            self.errors
                .push(format!("[{}] missing required key '{key}'", self.name));
            return None;
        }
        self.number(key)
    }

    fn integer(&mut self, key: &str) -> Option<u64> {
        let (line, text) = self.raw(key)?.clone();
        let v = text.trim().parse::<u64>().ok();
        if v.is_none() {
            self.errors.push(format!(
                "line {line}: [{}] {key}: expected a nonnegative integer, got '{text}'",
                self.name
            ));
        }
        v
    }

    fn required_integer(&mut self, key: &str) -> Option<u64> {
        if !self.has(key) {
            self.errors
                .push(format!("[{}] missing required key '{key}'", self.name));
            return None;
        }
        self.integer(key)
    }

    fn word(&mut self, key: &str, allowed: &[&str]) -> Option<String> {
        let (line, text) = self.raw(key)?.clone();
        let w = text.trim().to_string();
        if allowed.contains(&w.as_str()) {
            Some(w)
        } else {
            self.errors.push(format!(
                "line {line}: [{}] {key}: expected one of {}, got '{w}'",
                self.name,
                allowed.join(", ")
            ));
            None
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        match self.word(key, &["true", "false"]) {
            Some(w) => w == "true",
            None => default,
        }
    }

    fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(|(_, t)| t.trim().to_string())
    }

    fn error(&mut self, message: String) {
        self.errors.push(format!("[{}] {message}", self.name));
    }
}

fn split_sections(text: &str, errors: &mut Vec<String>) -> BTreeMap<&'static str, BTreeMap<String, (usize, String)>> {
    let mut sections: BTreeMap<&'static str, BTreeMap<String, (usize, String)>> =
        KEYS.iter().map(|(s, _)| (*s, BTreeMap::new())).collect();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            current = KEYS.iter().find(|(s, _)| *s == name).map(|(s, _)| *s);
            if current.is_none() {
                errors.push(format!("line {line_no}: unknown section [{name}]"));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {line_no}: expected 'key = value', got '{line}'"));
            continue;
        };
        let key = key.trim();
        let Some(section) = current else {
            errors.push(format!(
                "line {line_no}: key '{key}' outside a known section"
            ));
            continue;
        };
        let allowed = KEYS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            errors.push(format!(
                "line {line_no}: unknown key '{key}' in [{section}]"
            ));
            continue;
        }
        let entries = sections.get_mut(section).expect("known section");
        if entries
            .insert(key.to_string(), (line_no, value.trim().to_string()))
            .is_some()
        {
            errors.push(format!("line {line_no}: duplicate key '{key}' in [{section}]"));
        }
    }
    sections
}

/// Parses and validates a configuration. On failure the error lists every
/// problem found.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut errors = Vec::new();
    let mut sections = split_sections(text, &mut errors);
    let mut take = |name: &'static str| sections.remove(name).unwrap_or_default();

    // grid
    let entries = take("grid");
    let mut s = Section { name: "grid", entries, errors: &mut errors };
    let dim = if s.has("dim") { s.integer("dim") } else { Some(1) };
    let length = s.number_or("length", 2.0 * PI);
    let points = s.required_integer("points");
    let grid = match (dim, points) {
        (Some(d), Some(n)) => match Grid::new(d as usize, length, n as usize) {
            Ok(g) => Some(g),
            Err(e) => {
                s.error(e.to_string());
                None
            }
        },
        _ => None,
    };

    // eos
    let entries = take("eos");
    let mut s = Section { name: "eos", entries, errors: &mut errors };
    let a_const = s.number_or("A", 1.0);
    let gamma = s.required_number("gamma");
    let rho_bar = s.required_number("rho_bar");
    let tau = s.required_number("tau");
    let alignment = match (s.has("a"), s.has("a_sym")) {
        (true, true) => {
            s.error("give either 'a' or 'a_sym', not both".into());
            None
        }
        (false, false) => {
            s.error("missing required key 'a' (or 'a_sym')".into());
            None
        }
        (true, false) => s.number("a").map(|v| (v, false)),
        (false, true) => s.number("a_sym").map(|v| (v, true)),
    };
    let eos = match (gamma, rho_bar, tau, alignment) {
        (Some(g), Some(r), Some(t), Some((a, sym))) => {
            let built = if sym {
                EosParams::with_symmetrized_alignment(a_const, g, r, a, t)
            } else {
                EosParams::new(a_const, g, r, a, t)
            };
            match built {
                Ok(e) => Some(e),
                Err(e) => {
                    s.error(e.to_string());
                    None
                }
            }
        }
        _ => None,
    };

    // kernel
    let entries = take("kernel");
    let mut s = Section { name: "kernel", entries, errors: &mut errors };
    let kind = if s.has("kind") {
        s.word("kind", &["isotropic", "projection"])
    } else {
        s.error("missing required key 'kind'".into());
        None
    };
    let profile_name = if s.has("profile") {
        s.word("profile", &["top_hat", "bump", "exponential"])
    } else {
        s.error("missing required key 'profile'".into());
        None
    };
    let amplitude = s.number_or("amplitude", 1.0);
    let profile = match profile_name.as_deref() {
        Some("top_hat") => s.required_number("radius").map(|radius| Profile::TopHat { radius }),
        Some("bump") => s.required_number("radius").map(|radius| Profile::Bump { radius }),
        Some("exponential") => {
            let rate = s.required_number("rate");
            let cutoff = s.required_number("cutoff");
            rate.zip(cutoff)
                .map(|(rate, cutoff)| Profile::Exponential { rate, cutoff })
        }
        _ => None,
    };
    let kernel = match (kind.as_deref(), profile) {
        (Some(k), Some(profile)) => {
            let spec = KernelSpec {
                kind: if k == "isotropic" {
                    KernelKind::Isotropic
                } else {
                    KernelKind::Projection
                },
                profile,
                amplitude,
            };
            match grid.map(|g| spec.validate(&g)) {
                Some(Err(e)) => {
                    s.error(e.to_string());
                    None
                }
                _ => Some(spec),
            }
        }
        _ => None,
    };

    // scheme
    let entries = take("scheme");
    let mut s = Section { name: "scheme", entries, errors: &mut errors };
    let d = SchemeConfig::default();
    let spatial = match s.word("spatial", &["spectral", "llf_fv"]).as_deref() {
        Some("llf_fv") => SpatialScheme::LlfFv,
        _ => SpatialScheme::Spectral,
    };
    let dealias = if s.has("dealias") { s.boolean("dealias", d.dealias) } else { d.dealias };
    let cfl = s.number_or("cfl", d.cfl);
    let dt_max = s.number_or("dt_max", d.dt_max);
    let t_end = s.required_number("t_end");
    let blowup_factor = s.number_or("blowup_factor", d.blowup_factor);
    if let Some(t) = t_end {
        if !(t > 0.0) {
            s.error(format!("t_end must be positive, got {t}"));
        }
    }

    // output
    let entries = take("output");
    let mut s = Section { name: "output", entries, errors: &mut errors };
    let directory = PathBuf::from(s.text("directory").unwrap_or_else(|| "output".into()));
    let series = s.text("series").unwrap_or_else(|| "series.csv".into());
    let snapshot_every = if s.has("snapshot_every") {
        s.integer("snapshot_every").unwrap_or(1) as usize
    } else {
        100
    };
    let output = OutputConfig {
        directory,
        series,
        snapshot_every,
    };

    let scheme = SchemeConfig {
        spatial,
        dealias,
        cfl,
        dt_max,
        t_end: t_end.unwrap_or(d.t_end),
        snapshot_every,
        blowup_factor,
    };
    if let Err(Error::InvalidParameter(m)) = scheme.validate() {
        errors.push(format!("[scheme] {m}"));
    }

    // initial
    let entries = take("initial");
    let mut s = Section { name: "initial", entries, errors: &mut errors };
    let formulation = match s.word("formulation", &["primitive", "symmetrized"]).as_deref() {
        Some("primitive") => Formulation::Primitive,
        _ => Formulation::Symmetrized,
    };
    let kind = if s.has("type") {
        s.word("type", &["single_mode", "random_band"])
    } else {
        s.error("missing required key 'type'".into());
        None
    };
    let amp = s.required_number("amplitude");
    if let Some(a) = amp {
        if !(a >= 0.0) {
            s.error(format!("amplitude must be nonnegative, got {a}"));
        }
    }
    let half = grid.map(|g| (g.points() / 2) as u64);
    let perturbation = match kind.as_deref() {
        Some("single_mode") => {
            let mode = if s.has("mode") { s.integer("mode") } else { Some(1) };
            if let (Some(m), Some(h)) = (mode, half) {
                if m >= h {
                    s.error(format!("mode {m} must be below n/2 = {h}"));
                }
            }
            mode.zip(amp).map(|(mode, amplitude)| Perturbation::SingleMode {
                mode: mode as u32,
                amplitude,
            })
        }
        Some("random_band") => {
            let kmin = s.required_integer("kmin");
            let kmax = s.required_integer("kmax");
            let seed = if s.has("seed") {
                s.integer("seed")
            } else {
                s.error("random_band needs an explicit 'seed'".into());
                None
            };
            if let (Some(lo), Some(hi)) = (kmin, kmax) {
                if lo < 1 || hi < lo {
                    s.error(format!("need 1 <= kmin <= kmax, got kmin = {lo}, kmax = {hi}"));
                }
                if let Some(h) = half {
                    if hi >= h {
                        s.error(format!("kmax {hi} must be below n/2 = {h}"));
                    }
                }
            }
            match (kmin, kmax, seed, amp) {
                (Some(kmin), Some(kmax), Some(seed), Some(amplitude)) => Some(Perturbation::RandomBand {
                    kmin: kmin as u32,
                    kmax: kmax as u32,
                    amplitude,
                    seed,
                }),
                _ => None,
            }
        }
        _ => None,
    };

    // diagnostics
    let entries = take("diagnostics");
    let mut s = Section { name: "diagnostics", entries, errors: &mut errors };
    let dd = DiagnosticsConfig::for_dim(grid.map(|g| g.dim()).unwrap_or(1));
    let diagnostics = DiagnosticsConfig {
        sobolev_s: if s.has("sobolev_s") {
            s.integer("sobolev_s").map(|v| v as usize).unwrap_or(dd.sobolev_s)
        } else {
            dd.sobolev_s
        },
        beta: s.number_or("beta", dd.beta),
    };
    if let Err(e) = diagnostics.validate() {
        s.error(e.to_string());
    }

    let config = match (grid, eos, kernel, perturbation) {
        (Some(grid), Some(eos), Some(kernel), Some(perturbation)) if errors.is_empty() => {
            let c = RunConfig {
                grid,
                eos,
                kernel,
                scheme,
                initial: InitialData {
                    perturbation,
                    formulation,
                },
                output,
                diagnostics,
            };
            if let Err(e) = c.initial_state() {
                errors.push(format!("[initial] {e}"));
            }
            Some(c)
        }
        _ => None,
    };
    match config {
        Some(c) if errors.is_empty() => Ok(c),
        _ => Err(Error::Config(errors)),
    }
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Fourier phases of one random field with `kmin <= |m| <= kmax`, rescaled to
/// maximum modulus `amplitude`.
fn random_field(grid: Grid, kmin: u32, kmax: u32, amplitude: f64, rng: &mut ChaCha8Rng) -> ScalarField {
    let l = grid.length();
    let mut modes: Vec<([f64; 2], f64, f64)> = Vec::new();
    let k = kmax as i64;
    let wave = |m: i64| 2.0 * PI * m as f64 / l;
    if grid.dim() == 1 {
        for m in kmin as i64..=k {
            modes.push(([wave(m), 0.0], rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI)));
        }
    } else {
        for m0 in -k..=k {
            for m1 in 0..=k {
                if m1 == 0 && m0 <= 0 {
                    continue;
                }
                let r2 = (m0 * m0 + m1 * m1) as f64;
                if r2 < (kmin as f64).powi(2) || r2 > (k as f64).powi(2) {
                    continue;
                }
                modes.push((
                    [wave(m0), wave(m1)],
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..2.0 * PI),
                ));
            }
        }
    }
    let raw = ScalarField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|(kv, a, phi)| a * (kv[0] * x[0] + kv[1] * x[1] + phi).cos())
            .sum()
    });
    let peak = raw.max_abs();
    if peak > 0.0 {
        raw.map(|v| amplitude * v / peak)
    } else {
        raw
    }
}

impl InitialData {
    /// `(sigma_0, u_0)` on `grid`.
    pub fn sigma_velocity(&self, grid: Grid) -> (ScalarField, VectorField) {
        match self.perturbation {
            Perturbation::SingleMode { mode, amplitude } => {
                let k = 2.0 * PI * mode as f64 / grid.length();
                let sigma = ScalarField::from_fn(grid, |x| amplitude * (k * x[0]).cos());
                let u = VectorField::from_fn(grid, |x| [amplitude * (k * x[0]).cos(), 0.0]);
                (sigma, u)
            }
            Perturbation::RandomBand {
                kmin,
                kmax,
                amplitude,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sigma = random_field(grid, kmin, kmax, amplitude, &mut rng);
                let comps = (0..grid.dim())
                    .map(|_| random_field(grid, kmin, kmax, amplitude, &mut rng))
                    .collect();
                let u = VectorField::from_components(comps).expect("same grid");
                (sigma, u)
            }
        }
    }
}

impl RunConfig {
    /// The initial state in the configured formulation.
    pub fn initial_state(&self) -> Result<SimState> {
        let (sigma, u) = self.initial.sigma_velocity(self.grid);
        let density_like = match self.initial.formulation {
            Formulation::Symmetrized => {
                eos::check_sigma(&sigma, &self.eos)?;
                sigma
            }
            Formulation::Primitive => eos::rho_from_sigma(&sigma, &self.eos)?,
        };
        SimState::new(self.initial.formulation, density_like, u, 0.0)
    }
}
