//! Key-value run configuration with `[system]`, `[drive]` and `[numerics]`
//! sections.
//!
//! Rate keys in `[system]` take the parameter name bare or with the suffix
//! `_omega_m` (both mean "in units of omega_m"), or with `_hz`, in which case the
//! value is an ordinary frequency and is converted with `2 pi f / omega_m`. The
//! mechanical frequency itself is `omega_m` (rad/s) or `omega_m_hz`; the bath is
//! given as `n_th` or `temperature_k`. Keys are matched case-insensitively so
//! `coupling_J` and `coupling_j` are the same key.
//!
//! [`Config::to_toml_string`] writes a canonical form (SI for `omega_m`,
//! `omega_d` and `drive_power`, `_omega_m` for every rate) which parses back to
//! the identical value.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::linalg::GmresSettings;
use crate::params::{thermal_occupation, SystemParams};

pub const REFERENCE_TOML: &str = include_str!("../configs/reference.toml");

const RATE_KEYS: [&str; 8] = [
    "delta_1",
    "delta_2",
    "coupling_j",
    "coupling_g",
    "duffing_eta",
    "kappa_1",
    "kappa_2",
    "gamma_m",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    /// Largest admissible mean-field residual, in units of omega_m.
    pub tol_meanfield: f64,
    /// Largest continuation step as a fraction of the target power.
    pub continuation_step: f64,
    /// Smallest continuation step as a fraction of the power span.
    pub continuation_min_step: f64,
    pub newton_max_iter: usize,
    pub fock_dims_effective: Vec<usize>,
    pub fock_dims_full: Vec<usize>,
    pub gmres_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    /// Upper bound on stored superoperator nonzeros.
    pub max_superop_nnz: usize,
    pub trajectory_samples: usize,
    /// Density-matrix RK4 step is `factor / ||L||_inf`.
    pub fock_dt_factor: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            tol_meanfield: 1e-10,
            continuation_step: 0.05,
            continuation_min_step: 1e-3,
            newton_max_iter: 60,
            fock_dims_effective: vec![12, 16],
            fock_dims_full: vec![4, 4, 16],
            gmres_tol: 1e-12,
            gmres_restart: 80,
            gmres_max_iter: 3000,
            max_superop_nnz: 60_000_000,
            trajectory_samples: 400,
            fock_dt_factor: 2.5,
        }
    }
}

impl Numerics {
    pub fn gmres(&self) -> GmresSettings {
        GmresSettings {
            tol: self.gmres_tol,
            restart: self.gmres_restart,
            max_iter: self.gmres_max_iter,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub system: SystemParams,
    pub numerics: Numerics,
}

impl Config {
    pub fn reference() -> Self {
        Config::from_toml_str(REFERENCE_TOML).expect("bundled reference config is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Config::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut system = None;
        let mut drive = None;
        let mut numerics = None;
        for (key, value) in root {
            let table = match value {
                Value::Table(t) => lower_keys(t)?,
                _ => return Err(Error::Config(format!("top-level key `{key}` is not a section"))),
            };
            match key.to_ascii_lowercase().as_str() {
                "system" => system = Some(table),
                "drive" => drive = Some(table),
                "numerics" => numerics = Some(table),
                other => return Err(Error::Config(format!("unknown section [{other}]"))),
            }
        }
        let mut system = system.ok_or_else(|| Error::Config("missing [system] section".into()))?;
        let mut drive = drive.ok_or_else(|| Error::Config("missing [drive] section".into()))?;

        let omega_m = match take_one_of(&mut system, &["omega_m", "omega_m_hz"])? {
            Some(("omega_m", v)) => v,
            Some((_, hz)) => 2.0 * PI * hz,
            None => return Err(Error::Config("[system] needs omega_m or omega_m_hz".into())),
        };
        let mut rates = [0.0; RATE_KEYS.len()];
        for (slot, name) in rates.iter_mut().zip(RATE_KEYS) {
            let bare = name.to_string();
            let dimless = format!("{name}_omega_m");
            let hz = format!("{name}_hz");
            *slot = match take_one_of(&mut system, &[bare.as_str(), dimless.as_str(), hz.as_str()])? {
                Some((k, v)) if k == hz => 2.0 * PI * v / omega_m,
                Some((_, v)) => v,
                None => return Err(Error::Config(format!("[system] is missing `{name}`"))),
            };
        }
        let n_th = match take_one_of(&mut system, &["n_th", "temperature_k"])? {
            Some(("n_th", v)) => v,
            Some((_, kelvin)) => thermal_occupation(kelvin, omega_m)?,
            None => 0.0,
        };
        reject_leftovers("system", &system)?;

        let drive_power = match take_one_of(&mut drive, &["drive_power", "drive_power_mw"])? {
            Some(("drive_power", v)) => v,
            Some((_, mw)) => mw * 1e-3,
            None => return Err(Error::Config("[drive] needs drive_power".into())),
        };
        let omega_d = match take_one_of(&mut drive, &["omega_d", "omega_d_hz"])? {
            Some(("omega_d", v)) => v,
            Some((_, hz)) => 2.0 * PI * hz,
            None => return Err(Error::Config("[drive] needs omega_d or omega_d_hz".into())),
        };
        reject_leftovers("drive", &drive)?;

        let [delta_1, delta_2, coupling_j, coupling_g, duffing_eta, kappa_1, kappa_2, gamma_m] =
            rates;
        let system = SystemParams {
            omega_m,
            delta_1,
            delta_2,
            coupling_j,
            coupling_g,
            duffing_eta,
            kappa_1,
            kappa_2,
            gamma_m,
            n_th,
            drive_power,
            omega_d,
        };
        system.validate()?;

        let numerics = match numerics {
            Some(table) => Value::Table(table)
                .try_into::<NumericsPatch>()
                .map_err(|e| Error::Config(format!("[numerics]: {e}")))?
                .apply(Numerics::default()),
            None => Numerics::default(),
        };
        Ok(Config { system, numerics })
    }

    pub fn to_toml_string(&self) -> String {
        let s = &self.system;
        let mut system = Table::new();
        system.insert("omega_m".into(), Value::Float(s.omega_m));
        let rates = [
            s.delta_1,
            s.delta_2,
            s.coupling_j,
            s.coupling_g,
            s.duffing_eta,
            s.kappa_1,
            s.kappa_2,
            s.gamma_m,
        ];
        for (name, v) in RATE_KEYS.iter().zip(rates) {
            system.insert(format!("{name}_omega_m"), Value::Float(v));
        }
        system.insert("n_th".into(), Value::Float(s.n_th));

        let mut drive = Table::new();
        drive.insert("drive_power".into(), Value::Float(s.drive_power));
        drive.insert("omega_d".into(), Value::Float(s.omega_d));

        let numerics = Table::try_from(&self.numerics).expect("numerics serialize to a table");

        let mut root = Table::new();
        root.insert("system".into(), Value::Table(system));
        root.insert("drive".into(), Value::Table(drive));
        root.insert("numerics".into(), Value::Table(numerics));
        toml::to_string(&root).expect("config tables serialize")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }
}

/// Optional overrides for [`Numerics`]; missing keys keep their defaults.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericsPatch {
    tol_meanfield: Option<f64>,
    continuation_step: Option<f64>,
    continuation_min_step: Option<f64>,
    newton_max_iter: Option<usize>,
    fock_dims_effective: Option<Vec<usize>>,
    fock_dims_full: Option<Vec<usize>>,
    gmres_tol: Option<f64>,
    gmres_restart: Option<usize>,
    gmres_max_iter: Option<usize>,
    max_superop_nnz: Option<usize>,
    trajectory_samples: Option<usize>,
    fock_dt_factor: Option<f64>,
}

impl NumericsPatch {
    fn apply(self, mut n: Numerics) -> Numerics {
        macro_rules! patch {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { n.$field = v; } )* };
        }
        patch!(
            tol_meanfield,
            continuation_step,
            continuation_min_step,
            newton_max_iter,
            fock_dims_effective,
            fock_dims_full,
            gmres_tol,
            gmres_restart,
            gmres_max_iter,
            max_superop_nnz,
            trajectory_samples,
            fock_dt_factor
        );
        n
    }
}

fn lower_keys(table: Table) -> Result<Table> {
    let mut out = Table::new();
    for (k, v) in table {
        let lower = k.to_ascii_lowercase();
        if out.insert(lower.clone(), v).is_some() {
            return Err(Error::Config(format!("key `{lower}` given twice")));
        }
    }
    Ok(out)
}

/// Removes whichever of `keys` is present; more than one present is an error.
fn take_one_of<'k>(table: &mut Table, keys: &[&'k str]) -> Result<Option<(&'k str, f64)>> {
    let mut found = None;
    for &key in keys {
        if let Some(value) = table.remove(key) {
            if let Some((first, _)) = found {
                return Err(Error::Config(format!("`{first}` and `{key}` are mutually exclusive")));
            }
            let number = match value {
                Value::Float(f) => f,
                Value::Integer(i) => i as f64,
                other => {
                    return Err(Error::Config(format!(
                        "`{key}` must be a number, got {}",
                        other.type_str()
                    )))
                }
            };
            found = Some((key, number));
        }
    }
    Ok(found)
}

fn reject_leftovers(section: &str, table: &Table) -> Result<()> {
    match table.keys().next() {
        Some(key) => Err(Error::Config(format!("unknown key `{key}` in [{section}]"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_reference_matches_reference_params() {
        let config = Config::reference();
        assert_eq!(config.system, SystemParams::reference());
        assert_eq!(config.numerics, Numerics::default());
    }

    #[test]
    fn reference_round_trips_bit_exactly() {
        let config = Config::reference();
        let again = Config::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(again, config);
        for (a, b) in [
            (again.system.omega_m, config.system.omega_m),
            (again.system.omega_d, config.system.omega_d),
            (again.system.delta_2, config.system.delta_2),
        ] {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn hz_keys_are_converted() {
        let text = r#"
            [system]
            omega_m_hz = 5e6
            delta_1_hz = 250e6
            delta_2 = 1.05
            coupling_J_omega_m = 18
            coupling_g = 1e-3
            duffing_eta = 1e-4
            kappa_1 = 100
            kappa_2 = 0.1
            gamma_m = 1e-6
            [drive]
            drive_power_mw = 0.53
            omega_d_hz = 5e14
        "#;
        let c = Config::from_toml_str(text).unwrap();
        assert!((c.system.delta_1 - 50.0).abs() < 1e-12);
        assert_eq!(c.system.coupling_j, 18.0);
        assert!((c.system.drive_power - 0.53e-3).abs() < 1e-18);
        assert_eq!(c.system.n_th, 0.0);
    }

    #[test]
    fn conflicting_and_unknown_keys_are_rejected() {
        let base = Config::reference().to_toml_string();
        let dup = base.replace("delta_2_omega_m = 1.05", "delta_2_omega_m = 1.05\ndelta_2_hz = 1.0");
        assert!(matches!(Config::from_toml_str(&dup), Err(Error::Config(_))));
        let typo = base.replace("n_th = 0.0", "n_thermal = 0.0");
        assert!(matches!(Config::from_toml_str(&typo), Err(Error::Config(_))));
        let bad_numerics = format!("{base}\nfoo = 1\n");
        assert!(Config::from_toml_str(&bad_numerics).is_err());
    }

    #[test]
    fn negative_rate_fails_validation() {
        let text = Config::reference()
            .to_toml_string()
            .replace("kappa_2_omega_m = 0.1", "kappa_2_omega_m = -0.1");
        assert!(matches!(
            Config::from_toml_str(&text),
            Err(Error::ParameterDomain { name: "kappa_2", .. })
        ));
    }

    #[test]
    fn temperature_key_sets_occupation() {
        let text = Config::reference()
            .to_toml_string()
            .replace("n_th = 0.0", "temperature_k = 0.01");
        let c = Config::from_toml_str(&text).unwrap();
        let expected = thermal_occupation(0.01, c.system.omega_m).unwrap();
        assert_eq!(c.system.n_th, expected);
        assert!(expected > 0.0);
    }
}
