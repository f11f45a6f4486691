//! Flat `section.key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key has a
//! default; unknown or repeated keys are rejected so that a typo never runs
//! silently with a default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use resqfi_core::analysis::{EstimationTarget, ScanMethod, TimeGrid};
use resqfi_core::gaussian::InitialStateSpec;
use resqfi_core::reservoir::{OhmicSpectralDensity, Parameter, PhotonicCrystalReservoir};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

const DEFAULTS: &[(&str, &str)] = &[
    ("reservoir.kind", "ohmic"),
    ("reservoir.eta", "0.4"),
    ("reservoir.omega_c", "10"),
    ("reservoir.s", "1"),
    ("reservoir.omega_u", "160"),
    ("reservoir.gamma0", "1"),
    ("sensor.omega0", "1"),
    ("state.phi", "0"),
    ("time.t_max", "40"),
    ("time.steps", "400"),
    ("estimation.theta", "eta"),
    ("estimation.epsilon", "1e-7"),
    ("dynamics.method", "volterra"),
    ("qfi.method", "exact"),
    ("qfi.mode", "time"),
    ("scan.beta", "0:1:11"),
    ("scan.theta", "0.5:3:11"),
    ("scan.nbar", "0:100:11"),
    ("spectrum.param", "eta"),
    ("spectrum.range", "0.01:0.5:50"),
    ("output.dir", "out"),
];

/// State keys have no defaults because the two parameterizations exclude
/// each other.
const STATE_KEYS: &[&str] = &["state.alpha", "state.r", "state.nbar", "state.beta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReservoirKind {
    Ohmic,
    Photonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsMethod {
    Volterra,
    Spectral,
    Markovian,
    Photonic,
}

impl DynamicsMethod {
    pub fn name(self) -> &'static str {
        match self {
            DynamicsMethod::Volterra => "volterra",
            DynamicsMethod::Spectral => "spectral",
            DynamicsMethod::Markovian => "markovian",
            DynamicsMethod::Photonic => "photonic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiMode {
    /// F(t) on the time grid.
    Time,
    /// δF over β × θ at t_max with the Θ = n̄ threshold.
    Surface,
    /// F(t_max) against n̄ for each β.
    Nbar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ReservoirKind,
    pub ohmic: Option<OhmicSpectralDensity>,
    pub photonic: Option<PhotonicCrystalReservoir>,
    pub omega0: f64,
    pub state: InitialStateSpec,
    /// (n̄, β) when the state was given that way; scans over β keep n̄ fixed.
    pub nbar_beta: Option<(f64, f64)>,
    pub phi: f64,
    pub grid: TimeGrid,
    pub target: EstimationTarget,
    pub dynamics_method: DynamicsMethod,
    pub qfi_method: ScanMethod,
    pub qfi_mode: QfiMode,
    pub beta_axis: Vec<f64>,
    pub theta_axis: Vec<f64>,
    pub nbar_axis: Vec<f64>,
    pub sweep_param: Parameter,
    pub sweep_axis: Vec<f64>,
    pub out_dir: PathBuf,
    /// Effective key/value pairs, defaults included, in key order.
    pub entries: BTreeMap<String, String>,
}

/// Splits `key = value` lines into a map.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("line {}: expected key = value, got {line:?}", lineno + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return err(format!("line {}: empty key or value", lineno + 1));
        }
        let known = DEFAULTS.iter().any(|(d, _)| *d == k) || STATE_KEYS.contains(&k);
        if !known {
            return err(format!("line {}: unknown key {k:?}", lineno + 1));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return err(format!("line {}: key {k:?} given twice", lineno + 1));
        }
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64, ConfigError> {
    let v = &map[key];
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(format!("{key} = {v:?} is not a finite number")),
    }
}

fn parameter(key: &str, v: &str) -> Result<Parameter, ConfigError> {
    Parameter::parse(v).ok_or_else(|| ConfigError(format!("{key} = {v:?}: expected eta, omega_c, s or omega_u")))
}

/// `lo:hi:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_axis(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError(format!("{key} = {v:?}: expected lo:hi:count or a comma-separated list"));
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * step }).collect())
    } else {
        v.split(',')
            .map(|x| x.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad))
            .collect()
    }
}

fn core_err(key: &str, e: resqfi_core::Error) -> ConfigError {
    ConfigError(format!("{key}: {e}"))
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        Self::from_entries(parse_entries(text)?)
    }

    pub fn from_entries(user: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let mut map: BTreeMap<String, String> =
            DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let by_nbar = user.contains_key("state.nbar") || user.contains_key("state.beta");
        let by_alpha = user.contains_key("state.alpha") || user.contains_key("state.r");
        if by_nbar && by_alpha {
            return err("state.nbar/state.beta and state.alpha/state.r are mutually exclusive");
        }
        if by_nbar {
            map.insert("state.nbar".into(), "1".into());
            map.insert("state.beta".into(), "0".into());
        } else {
            map.insert("state.alpha".into(), "1".into());
            map.insert("state.r".into(), "0".into());
        }
        map.extend(user);

        let kind = match map["reservoir.kind"].as_str() {
            "ohmic" => ReservoirKind::Ohmic,
            "photonic" => ReservoirKind::Photonic,
            other => return err(format!("reservoir.kind = {other:?}: expected ohmic or photonic")),
        };
        let (ohmic, photonic) = match kind {
            ReservoirKind::Ohmic => {
                let sd = OhmicSpectralDensity::new(
                    number(&map, "reservoir.eta")?,
                    number(&map, "reservoir.omega_c")?,
                    number(&map, "reservoir.s")?,
                )
                .map_err(|e| core_err("reservoir", e))?;
                (Some(sd), None)
            }
            ReservoirKind::Photonic => {
                let pc = PhotonicCrystalReservoir::new(number(&map, "reservoir.omega_u")?, number(&map, "reservoir.gamma0")?)
                    .map_err(|e| core_err("reservoir", e))?;
                (None, Some(pc))
            }
        };
        let omega0 = number(&map, "sensor.omega0")?;
        if omega0 <= 0.0 {
            return err("sensor.omega0 must be positive");
        }
        let phi = number(&map, "state.phi")?;
        let (state, nbar_beta) = if by_nbar {
            let (n, b) = (number(&map, "state.nbar")?, number(&map, "state.beta")?);
            (
                InitialStateSpec::from_nbar_beta(n, b, phi).map_err(|e| core_err("state", e))?,
                Some((n, b)),
            )
        } else {
            (
                InitialStateSpec::from_alpha(number(&map, "state.alpha")?, phi, number(&map, "state.r")?)
                    .map_err(|e| core_err("state", e))?,
                None,
            )
        };
        let steps_raw = &map["time.steps"];
        let steps: usize = steps_raw
            .parse()
            .map_err(|_| ConfigError(format!("time.steps = {steps_raw:?} is not a positive integer")))?;
        let grid = TimeGrid::new(number(&map, "time.t_max")?, steps).map_err(|e| core_err("time", e))?;
        let which = parameter("estimation.theta", &map["estimation.theta"])?;
        let target = EstimationTarget::with_epsilon(which, number(&map, "estimation.epsilon")?)
            .map_err(|e| core_err("estimation.epsilon", e))?;
        match (kind, which) {
            (ReservoirKind::Photonic, Parameter::OmegaU) | (ReservoirKind::Ohmic, Parameter::Eta | Parameter::OmegaC | Parameter::S) => {}
            _ => {
                return err(format!(
                    "estimation.theta = {} is not a parameter of the {} reservoir",
                    which.name(),
                    map["reservoir.kind"]
                ))
            }
        }
        let dynamics_method = match map["dynamics.method"].as_str() {
            "volterra" => DynamicsMethod::Volterra,
            "spectral" => DynamicsMethod::Spectral,
            "markovian" => DynamicsMethod::Markovian,
            "photonic" => DynamicsMethod::Photonic,
            other => {
                return err(format!(
                    "dynamics.method = {other:?}: expected volterra, spectral, markovian or photonic"
                ))
            }
        };
        if (dynamics_method == DynamicsMethod::Photonic) != (kind == ReservoirKind::Photonic) {
            return err("dynamics.method = photonic goes with reservoir.kind = photonic and only with it");
        }
        let qfi_method = match map["qfi.method"].as_str() {
            "exact" => ScanMethod::Exact,
            "markovian" => ScanMethod::Markovian,
            "asymptotic" => ScanMethod::Asymptotic,
            other => return err(format!("qfi.method = {other:?}: expected exact, markovian or asymptotic")),
        };
        let qfi_mode = match map["qfi.mode"].as_str() {
            "time" => QfiMode::Time,
            "surface" => QfiMode::Surface,
            "nbar" => QfiMode::Nbar,
            other => return err(format!("qfi.mode = {other:?}: expected time, surface or nbar")),
        };
        let beta_axis = parse_axis("scan.beta", &map["scan.beta"])?;
        if beta_axis.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return err("scan.beta values must lie in [0, 1]");
        }
        let nbar_axis = parse_axis("scan.nbar", &map["scan.nbar"])?;
        if nbar_axis.iter().any(|&n| n < 0.0) {
            return err("scan.nbar values must be non-negative");
        }
        let theta_axis = parse_axis("scan.theta", &map["scan.theta"])?;
        let sweep_param = parameter("spectrum.param", &map["spectrum.param"])?;
        if sweep_param == Parameter::OmegaU {
            return err("spectrum.param must be eta, omega_c or s");
        }
        let sweep_axis = parse_axis("spectrum.range", &map["spectrum.range"])?;
        let out_dir = PathBuf::from(&map["output.dir"]);
        Ok(RunConfig {
            kind,
            ohmic,
            photonic,
            omega0,
            state,
            nbar_beta,
            phi,
            grid,
            target,
            dynamics_method,
            qfi_method,
            qfi_mode,
            beta_axis,
            theta_axis,
            nbar_axis,
            sweep_param,
            sweep_axis,
            out_dir,
            entries: map,
        })
    }

    pub fn ohmic(&self) -> Result<&OhmicSpectralDensity, ConfigError> {
        self.ohmic
            .as_ref()
            .ok_or_else(|| ConfigError("this command needs reservoir.kind = ohmic".into()))
    }

    pub fn photonic(&self) -> Result<&PhotonicCrystalReservoir, ConfigError> {
        self.photonic
            .as_ref()
            .ok_or_else(|| ConfigError("this command needs reservoir.kind = photonic".into()))
    }

    /// n̄ held fixed by β scans.
    pub fn nbar(&self) -> f64 {
        self.nbar_beta.map_or_else(|| self.state.nbar(), |(n, _)| n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse() {
        let c = RunConfig::from_text("").unwrap();
        assert_eq!(c.kind, ReservoirKind::Ohmic);
        assert_eq!(c.grid.steps, 400);
        assert_eq!(c.entries["state.alpha"], "1");
        assert!(!c.entries.contains_key("state.nbar"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_text("reservoir.etaa = 1").is_err());
        assert!(RunConfig::from_text("reservoir.eta = 1\nreservoir.eta = 2").is_err());
        assert!(RunConfig::from_text("state.nbar = 4\nstate.r = 1").is_err());
        assert!(RunConfig::from_text("reservoir.eta = -1").is_err());
        assert!(RunConfig::from_text("time.steps = many").is_err());
        assert!(RunConfig::from_text("no equals sign").is_err());
        assert!(RunConfig::from_text("estimation.theta = omega_u").is_err());
    }

    #[test]
    fn axes() {
        assert_eq!(parse_axis("k", "0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("k", "1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_axis("k", "0:1").is_err());
    }

    #[test]
    fn comments_and_state_by_nbar() {
        let c = RunConfig::from_text("# preset\n\nstate.nbar = 100\nstate.beta = 0.5\n").unwrap();
        assert!((c.state.nbar() - 100.0).abs() < 1e-9);
        assert_eq!(c.nbar(), 100.0);
    }
}
