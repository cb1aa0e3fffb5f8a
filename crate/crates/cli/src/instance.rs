//! Instance files.
//!
//! Instances are TOML tables of probabilities. Values may be strings holding
//! exact fractions or decimals (`"2/5"`, `"0.4"`) or plain TOML numbers; a
//! number is read through its shortest decimal rendering, so `0.4` means
//! exactly `2/5`.
//!
//! Marginal form: `p_z0_given_x0`, `p_z0_given_x1`, `p_z0_given_y0`,
//! `p_z0_given_y1`, `p_x1`, `p_y1`.
//!
//! Joint form: `theta_x`, `theta_y`, `theta_z_given_00`, `theta_z_given_01`,
//! `theta_z_given_10`, `theta_z_given_11` with `theta_z_given_xy =
//! P(Z=1 | X=x, Y=y)`.
//!
//! Confounded inputs: `alpha_00 … alpha_11` (`P(X=i, Z=j)`), `beta_00 …
//! beta_11` (`P(Y=i, Z=j)`). Interventional tables use `do0_z0`, `do0_z1`,
//! `do1_z0`, `do1_z1` (`P(Z=j | do(cause=i))`).

use std::path::Path;

use scm_marginal::confounded::{InterventionalTable, ObservationalJoint2};
use scm_marginal::experiment::JointParams;
use scm_marginal::rational::parse_rational;
use scm_marginal::scm::MarginalObservation;
use scm_marginal::{Error, Rational};
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed TOML in {path}: {message}")]
    Toml { path: String, message: String },
    #[error("{0}")]
    Model(#[from] Error),
}

pub const MARGINAL_KEYS: [&str; 6] =
    ["p_z0_given_x0", "p_z0_given_x1", "p_z0_given_y0", "p_z0_given_y1", "p_x1", "p_y1"];
pub const JOINT_KEYS: [&str; 6] = [
    "theta_x",
    "theta_y",
    "theta_z_given_00",
    "theta_z_given_01",
    "theta_z_given_10",
    "theta_z_given_11",
];
pub const ALPHA_KEYS: [&str; 4] = ["alpha_00", "alpha_01", "alpha_10", "alpha_11"];
pub const BETA_KEYS: [&str; 4] = ["beta_00", "beta_01", "beta_10", "beta_11"];
pub const DO_KEYS: [&str; 4] = ["do0_z0", "do0_z1", "do1_z0", "do1_z1"];

/// A merge instance in either accepted form.
#[derive(Debug, Clone)]
pub enum InstanceSpec {
    Marginal { obs_x: MarginalObservation, obs_y: MarginalObservation },
    Joint(JointParams),
}

impl InstanceSpec {
    pub fn observations(&self) -> Result<(MarginalObservation, MarginalObservation), Error> {
        match self {
            Self::Marginal { obs_x, obs_y } => Ok((obs_x.clone(), obs_y.clone())),
            Self::Joint(p) => p.observations(),
        }
    }
}

fn read_table(path: &Path) -> Result<toml::Table, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| InputError::Io { path: path.display().to_string(), source })?;
    text.parse::<toml::Table>()
        .map_err(|e| InputError::Toml { path: path.display().to_string(), message: e.to_string() })
}

fn value_to_rational(key: &str, v: &toml::Value) -> Result<Rational, Error> {
    match v {
        toml::Value::String(s) => parse_rational(s),
        toml::Value::Integer(i) => parse_rational(&i.to_string()),
        toml::Value::Float(f) => parse_rational(&f.to_string()),
        other => Err(Error::Parse(format!("{key}: expected a number, got {other}"))),
    }
}

fn take<const N: usize>(table: &toml::Table, keys: [&str; N]) -> Result<[Rational; N], Error> {
    let mut out: [Rational; N] = std::array::from_fn(|_| Rational::default());
    for (slot, key) in out.iter_mut().zip(keys) {
        let v = table.get(key).ok_or_else(|| Error::Parse(format!("missing key {key}")))?;
        *slot = value_to_rational(key, v)?;
    }
    Ok(out)
}

fn reject_unknown(table: &toml::Table, allowed: &[&str]) -> Result<(), Error> {
    match table.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Parse(format!("unknown key {k}"))),
        None => Ok(()),
    }
}

pub fn parse_instance(table: &toml::Table) -> Result<InstanceSpec, Error> {
    if table.contains_key("theta_x") {
        reject_unknown(table, &JOINT_KEYS)?;
        let [tx, ty, z00, z01, z10, z11] = take(table, JOINT_KEYS)?;
        let params = JointParams { theta_x: tx, theta_y: ty, theta_z: [z00, z01, z10, z11] };
        params.validate()?;
        Ok(InstanceSpec::Joint(params))
    } else {
        reject_unknown(table, &MARGINAL_KEYS)?;
        let [x0, x1, y0, y1, px, py] = take(table, MARGINAL_KEYS)?;
        Ok(InstanceSpec::Marginal {
            obs_x: MarginalObservation::new(x0, x1, px, "X")?,
            obs_y: MarginalObservation::new(y0, y1, py, "Y")?,
        })
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceSpec, InputError> {
    Ok(parse_instance(&read_table(path)?)?)
}

pub fn parse_observational(table: &toml::Table) -> Result<(ObservationalJoint2, ObservationalJoint2), Error> {
    let mut allowed: Vec<&str> = ALPHA_KEYS.to_vec();
    allowed.extend(BETA_KEYS);
    reject_unknown(table, &allowed)?;
    Ok((ObservationalJoint2::new(take(table, ALPHA_KEYS)?)?, ObservationalJoint2::new(take(table, BETA_KEYS)?)?))
}

pub fn load_observational(path: &Path) -> Result<(ObservationalJoint2, ObservationalJoint2), InputError> {
    Ok(parse_observational(&read_table(path)?)?)
}

pub fn parse_interventional(table: &toml::Table) -> Result<InterventionalTable, Error> {
    reject_unknown(table, &DO_KEYS)?;
    InterventionalTable::new(take(table, DO_KEYS)?)
}

pub fn load_interventional(path: &Path) -> Result<InterventionalTable, InputError> {
    Ok(parse_interventional(&read_table(path)?)?)
}
