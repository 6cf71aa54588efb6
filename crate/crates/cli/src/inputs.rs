//! Named families, projector and noise specifications, and `λ_sup` policies.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use entbound::io::{load_state, load_subspace};
use entbound::operator::DensityOperator;
use entbound::states::{
    eigen_ensemble, max_entangled, mixture_antisym_phi_plus_ensemble, werner, EnsembleDecomposition, StateFamily,
};
use entbound::subspace::{LambdaSupPolicy, Subspace};
use entbound::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Isotropic,
    Werner,
    Mixture,
    Bell,
    WernerW1,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Named state family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Local dimension of a named family.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Fidelity parameter (isotropic, mixture).
    #[arg(long = "F")]
    pub f: Option<f64>,
    /// Werner parameter.
    #[arg(long = "W")]
    pub w: Option<f64>,
    /// State file (JSON).
    #[arg(long, conflicts_with = "family")]
    pub state: Option<PathBuf>,
}

/// A resolved input state.
pub struct Source {
    pub rho: DensityOperator,
    pub family: Option<FamilyName>,
    /// A decomposition to evaluate convex-roof upper bounds on.
    pub ensemble: Option<EnsembleDecomposition>,
}

fn need(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Parse(format!("--{name} is required for this family")))
}

pub fn family_state(family: FamilyName, d: usize, f: Option<f64>, w: Option<f64>) -> Result<Source> {
    let (rho, ensemble) = match family {
        FamilyName::Isotropic => (StateFamily::Isotropic { d, f: need("F", f)? }.density()?, None),
        FamilyName::Werner => (StateFamily::Werner { d, w: need("W", w)? }.density()?, None),
        FamilyName::Mixture => {
            let ens = mixture_antisym_phi_plus_ensemble(d, need("F", f)?)?;
            (ens.reconstruct()?, Some(ens))
        }
        FamilyName::Bell => {
            if d != 2 {
                return Err(Error::Domain(format!("the bell family is two-qubit only, got d = {d}")));
            }
            let phi = max_entangled(2)?;
            let ens = EnsembleDecomposition::new(vec![(1.0, phi.clone())])?;
            (phi.density(), Some(ens))
        }
        FamilyName::WernerW1 => (werner(d, 1.0)?, None),
    };
    Ok(Source {
        rho,
        family: Some(family),
        ensemble,
    })
}

impl StateArgs {
    pub fn resolve(&self) -> Result<Source> {
        match (&self.family, &self.state) {
            (Some(fam), None) => family_state(*fam, self.d, self.f, self.w),
            (None, Some(path)) => {
                let rho = load_state(path)?.density();
                Ok(Source {
                    rho,
                    family: None,
                    ensemble: None,
                })
            }
            _ => Err(Error::Parse("give exactly one of --family or --state".into())),
        }
    }
}

impl Source {
    pub fn ensemble_or_eigen(&self) -> Result<EnsembleDecomposition> {
        match &self.ensemble {
            Some(e) => Ok(e.clone()),
            None => eigen_ensemble(&self.rho),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectorSpec {
    PhiPlus,
    Antisym,
    Support,
    File(PathBuf),
}

impl FromStr for ProjectorSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "phi-plus" => Ok(ProjectorSpec::PhiPlus),
            "antisym" => Ok(ProjectorSpec::Antisym),
            "support" => Ok(ProjectorSpec::Support),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(ProjectorSpec::File(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown projector '{s}' (phi-plus, antisym, support, file:<path>)"
                )),
            },
        }
    }
}

impl ProjectorSpec {
    pub fn name(&self) -> String {
        match self {
            ProjectorSpec::PhiPlus => "phi-plus".into(),
            ProjectorSpec::Antisym => "antisym".into(),
            ProjectorSpec::Support => "support".into(),
            ProjectorSpec::File(p) => format!("file:{}", p.display()),
        }
    }

    /// Whether the subspace depends on the state.
    pub fn state_dependent(&self) -> bool {
        matches!(self, ProjectorSpec::Support)
    }

    pub fn subspace(&self, rho: &DensityOperator) -> Result<Subspace> {
        let v = match self {
            ProjectorSpec::PhiPlus => {
                if rho.dim_a() != rho.dim_b() {
                    return Err(Error::Dimension(format!(
                        "phi-plus needs equal local dimensions, state is {}x{}",
                        rho.dim_a(),
                        rho.dim_b()
                    )));
                }
                Subspace::span(&max_entangled(rho.dim_a())?)
            }
            ProjectorSpec::Antisym => {
                if rho.dim_a() != rho.dim_b() {
                    return Err(Error::Dimension(format!(
                        "antisym needs equal local dimensions, state is {}x{}",
                        rho.dim_a(),
                        rho.dim_b()
                    )));
                }
                Subspace::antisymmetric(rho.dim_a())?
            }
            ProjectorSpec::Support => Subspace::support(rho)?,
            ProjectorSpec::File(p) => load_subspace(p)?,
        };
        v.check_compatible(rho)?;
        Ok(v)
    }
}

/// Projectors used when none is given on the command line.
pub fn default_projectors(family: Option<FamilyName>) -> Result<Vec<ProjectorSpec>> {
    match family {
        Some(FamilyName::Isotropic) | Some(FamilyName::Bell) => Ok(vec![ProjectorSpec::PhiPlus]),
        Some(FamilyName::Werner) | Some(FamilyName::WernerW1) => Ok(vec![ProjectorSpec::Antisym]),
        Some(FamilyName::Mixture) => Ok(vec![ProjectorSpec::Antisym, ProjectorSpec::PhiPlus]),
        None => Err(Error::Parse(
            "--projector is required for states read from a file".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    MaximallyMixed,
    File(PathBuf),
}

impl FromStr for NoiseSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "maximally-mixed" => Ok(NoiseSpec::MaximallyMixed),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(NoiseSpec::File(PathBuf::from(p))),
                _ => Err(format!("unknown noise '{s}' (maximally-mixed, file:<path>)")),
            },
        }
    }
}

impl NoiseSpec {
    pub fn density(&self, dim_a: usize, dim_b: usize) -> Result<DensityOperator> {
        let rho_m = match self {
            NoiseSpec::MaximallyMixed => DensityOperator::maximally_mixed(dim_a, dim_b)?,
            NoiseSpec::File(p) => load_state(p)?.density(),
        };
        if (rho_m.dim_a(), rho_m.dim_b()) != (dim_a, dim_b) {
            return Err(Error::Dimension(format!(
                "noise is {}x{}, state is {dim_a}x{dim_b}",
                rho_m.dim_a(),
                rho_m.dim_b()
            )));
        }
        Ok(rho_m)
    }
}

pub fn parse_policy(s: &str) -> std::result::Result<LambdaSupPolicy, String> {
    match s {
        "closed" => Ok(LambdaSupPolicy::Closed),
        "heuristic" => Ok(LambdaSupPolicy::Heuristic),
        _ => {
            let eps = s
                .strip_prefix("net:")
                .ok_or_else(|| format!("unknown policy '{s}' (closed, net:<eps>, heuristic)"))?;
            let eps: f64 = eps.parse().map_err(|_| format!("bad epsilon in '{s}'"))?;
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(format!("epsilon must be positive, got {eps}"));
            }
            Ok(LambdaSupPolicy::Net { eps })
        }
    }
}
