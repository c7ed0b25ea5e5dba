//! Command-line flags and their validation into an [`ExperimentSpec`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dgshock::scheme::{shock_position, ubar_for_position, Mesh1D};
use dgshock::{NumericalFluxKind, RkOrder, SvvConfig};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::num;

#[derive(Debug, Parser)]
#[command(
    name = "dgshock",
    version,
    about = "Discrete shock profiles of modal DG schemes for Burgers' equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form shock-cell profiles over a sweep of shock positions.
    Profile {
        #[command(flatten)]
        common: Common,
        /// Number of interior sample positions in (-1, 1) when --sc is absent.
        #[arg(long, default_value_t = 41)]
        samples: usize,
    },
    /// Time-march to a steady state and dump the solution.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of the linearized operator around a steady state.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Δt/h of the linearization; defaults to cfl_scale/(2p+1).
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Supersonic-side decay of a converged steady state.
    DecayTable {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FluxArg {
    Godunov,
    Llf,
    Osher,
}

impl From<FluxArg> for NumericalFluxKind {
    fn from(f: FluxArg) -> Self {
        match f {
            FluxArg::Godunov => NumericalFluxKind::Godunov,
            FluxArg::Llf => NumericalFluxKind::LocalLaxFriedrichs,
            FluxArg::Osher => NumericalFluxKind::EngquistOsher,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Polynomial degree.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 20)]
    pub cells: usize,
    /// Numerical flux (godunov by default, llf for decay-table).
    #[arg(long, value_enum)]
    pub flux: Option<FluxArg>,
    /// Kink location of the initial data; the shock settles at x = 1/2 + ubar/4.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "sc")]
    pub ubar: Option<f64>,
    /// Relative shock position in the middle cell.
    #[arg(long, allow_negative_numbers = true)]
    pub sc: Option<f64>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub rk: u8,
    #[arg(long, default_value_t = 1.0)]
    pub cfl_scale: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Enable spectral vanishing viscosity.
    #[arg(long)]
    pub svv: bool,
    /// SVV amplitude; defaults to h/(p+1).
    #[arg(long, requires = "svv")]
    pub svv_eps: Option<f64>,
    /// Threshold of the smoothness indicator switching SVV modes.
    #[arg(long, requires = "svv")]
    pub detector_threshold: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Exit with status 3 when the march does not converge.
    #[arg(long)]
    pub require_converged: bool,
}

/// Where the shock sits: derived from `ubar` or from `s_c` in the middle cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockPlacement {
    pub ubar: f64,
    pub cell: usize,
    pub s_c: f64,
    /// `s_c` was given directly.
    pub analytic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub command: &'static str,
    pub p: usize,
    pub n_cells: usize,
    pub flux: NumericalFluxKind,
    pub ubar: Option<f64>,
    pub s_c: Option<f64>,
    pub rk: RkOrder,
    pub cfl_scale: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub svv: Option<SvvConfig<f64>>,
    pub lambda: Option<f64>,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub require_converged: bool,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}

impl ExperimentSpec {
    pub fn from_command(cmd: Command) -> Result<Self, CliError> {
        let (name, common, samples, lambda, default_flux) = match cmd {
            Command::Profile { common, samples } => {
                ("profile", common, samples, None, FluxArg::Godunov)
            }
            Command::Run { common } => ("run", common, 0, None, FluxArg::Godunov),
            Command::Spectrum { common, lambda } => {
                ("spectrum", common, 0, lambda, FluxArg::Godunov)
            }
            Command::DecayTable { common } => ("decay-table", common, 0, None, FluxArg::Llf),
        };
        let svv = common.svv.then(|| {
            let base = SvvConfig::default();
            SvvConfig {
                epsilon: common.svv_eps,
                detector_threshold: common.detector_threshold.unwrap_or(base.detector_threshold),
                ..base
            }
        });
        let spec = ExperimentSpec {
            command: name,
            p: common.p,
            n_cells: common.cells,
            flux: common.flux.unwrap_or(default_flux).into(),
            ubar: common.ubar,
            s_c: common.sc,
            rk: RkOrder::from_order(common.rk as usize).map_err(|e| bad(e.to_string()))?,
            cfl_scale: common.cfl_scale,
            max_steps: common.max_steps,
            tol: common.tol,
            svv,
            lambda,
            samples,
            out: common.out,
            format: common.format,
            require_converged: common.require_converged,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        let max_p = if self.command == "profile" { 3 } else { 8 };
        if self.p > max_p {
            return Err(bad(format!(
                "--p {} exceeds the supported maximum {max_p}",
                self.p
            )));
        }
        if self.n_cells < 2 {
            return Err(bad("--cells must be at least 2"));
        }
        if !(self.cfl_scale > 0.0 && self.cfl_scale.is_finite()) {
            return Err(bad("--cfl-scale must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(bad("--tol must be positive"));
        }
        if let Some(s) = self.s_c {
            if !(s.abs() <= 1.0) {
                return Err(bad(format!("--sc {s} outside [-1, 1]")));
            }
        }
        if let Some(u) = self.ubar {
            if !u.is_finite() {
                return Err(bad("--ubar must be finite"));
            }
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(bad("--lambda must be positive"));
            }
        }
        if let Some(cfg) = &self.svv {
            cfg.validate(dgshock::BasisOrder(self.p))
                .map_err(|e| bad(e.to_string()))?;
        }
        if self.command == "profile" && self.s_c.is_none() && self.samples == 0 {
            return Err(bad("--samples must be positive"));
        }
        if self.command != "profile" && self.ubar.is_none() && self.s_c.is_none() {
            return Err(bad(format!("{} needs --ubar or --sc", self.command)));
        }
        Ok(())
    }

    pub fn mesh(&self) -> Mesh1D<f64> {
        Mesh1D::unit(self.n_cells).expect("validated cell count")
    }

    /// Shock placement for the marching commands; `--sc` places the shock
    /// in cell `n_cells / 2`.
    pub fn placement(&self) -> Result<ShockPlacement, CliError> {
        let mesh = self.mesh();
        if let Some(s) = self.s_c {
            let cell = self.n_cells / 2;
            let ubar = ubar_for_position(cell, s, &mesh);
            return Ok(ShockPlacement {
                ubar,
                cell,
                s_c: s,
                analytic: true,
            });
        }
        let ubar = self.ubar.expect("validated position");
        let (cell, s_c) = shock_position(ubar, &mesh).map_err(|e| bad(e.to_string()))?;
        Ok(ShockPlacement {
            ubar,
            cell,
            s_c,
            analytic: false,
        })
    }

    pub fn to_json(&self) -> Value {
        let opt = |x: Option<f64>| x.map(num).unwrap_or(Value::Null);
        let svv = match &self.svv {
            Some(cfg) => json!({
                "epsilon": opt(cfg.epsilon),
                "m_shock": cfg.m_shock,
                "m_smooth": cfg.m_smooth,
                "detector_threshold": num(cfg.detector_threshold),
            }),
            None => Value::Null,
        };
        let mut v = json!({
            "command": self.command,
            "p": self.p,
            "cells": self.n_cells,
            "flux": self.flux.name(),
            "ubar": opt(self.ubar),
            "sc": opt(self.s_c),
            "rk": self.rk.order(),
            "cfl_scale": num(self.cfl_scale),
            "max_steps": self.max_steps,
            "tol": num(self.tol),
            "svv": svv,
            "require_converged": self.require_converged,
        });
        if self.command == "spectrum" {
            v["lambda"] = opt(self.lambda);
        }
        if self.command == "profile" {
            v["samples"] = json!(self.samples);
        }
        v
    }
}
