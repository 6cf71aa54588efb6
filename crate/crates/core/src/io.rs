//! JSON file formats for states and subspaces.
//!
//! Complex numbers are `[re, im]` pairs. A state file is
//! `{ "dim_a", "dim_b", "kind": "pure" | "density", "data": [...] }` with
//! densities stored row-major; a subspace file is
//! `{ "dim_a", "dim_b", "basis": [[...], ...] }` with one flat vector per
//! basis element (orthonormalized on load).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::operator::DensityOperator;
use crate::states::PureState;
use crate::subspace::Subspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub kind: StateKind,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
}

/// A state read from disk.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityOperator),
}

impl LoadedState {
    pub fn density(&self) -> DensityOperator {
        match self {
            LoadedState::Pure(p) => p.density(),
            LoadedState::Density(r) => r.clone(),
        }
    }
}

fn to_pairs<'a>(it: impl Iterator<Item = &'a C64>) -> Vec<[f64; 2]> {
    it.map(|z| [z.re, z.im]).collect()
}

fn to_vector(data: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(data.len(), data.iter().map(|p| C64::new(p[0], p[1])))
}

fn expect_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Parse(format!(
            "{what}: expected {want} complex entries, found {got}"
        )));
    }
    Ok(())
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        StateFile {
            dim_a: psi.dim_a(),
            dim_b: psi.dim_b(),
            kind: StateKind::Pure,
            data: to_pairs(psi.amplitudes().iter()),
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        // nalgebra iterates column-major; emit rows
        let m = rho.matrix();
        StateFile {
            dim_a: rho.dim_a(),
            dim_b: rho.dim_b(),
            kind: StateKind::Density,
            data: to_pairs(m.transpose().iter()),
        }
    }

    pub fn into_state(self) -> Result<LoadedState> {
        let d = self
            .dim_a
            .checked_mul(self.dim_b)
            .ok_or_else(|| Error::Parse("dimension overflow".into()))?;
        match self.kind {
            StateKind::Pure => {
                expect_len("pure state", self.data.len(), d)?;
                Ok(LoadedState::Pure(PureState::new(
                    self.dim_a,
                    self.dim_b,
                    to_vector(&self.data),
                )?))
            }
            StateKind::Density => {
                expect_len("density", self.data.len(), d * d)?;
                let m = CMatrix::from_row_iterator(d, d, self.data.iter().map(|p| C64::new(p[0], p[1])));
                Ok(LoadedState::Density(DensityOperator::from_matrix(
                    self.dim_a, self.dim_b, m,
                )?))
            }
        }
    }
}

impl SubspaceFile {
    pub fn from_subspace(v: &Subspace) -> Self {
        SubspaceFile {
            dim_a: v.dim_a(),
            dim_b: v.dim_b(),
            basis: v.basis().iter().map(|b| to_pairs(b.amplitudes().iter())).collect(),
        }
    }

    pub fn into_subspace(self) -> Result<Subspace> {
        if self.basis.is_empty() {
            return Err(Error::Parse("subspace basis is empty".into()));
        }
        let d = self.dim_a * self.dim_b;
        let mut vecs = Vec::with_capacity(self.basis.len());
        for (i, b) in self.basis.iter().enumerate() {
            expect_len(&format!("basis vector {i}"), b.len(), d)?;
            vecs.push(to_vector(b));
        }
        Subspace::from_spanning(self.dim_a, self.dim_b, &vecs)
    }
}

pub fn parse_state(json: &str) -> Result<LoadedState> {
    serde_json::from_str::<StateFile>(json)
        .map_err(|e| Error::Parse(e.to_string()))?
        .into_state()
}

pub fn parse_subspace(json: &str) -> Result<Subspace> {
    serde_json::from_str::<SubspaceFile>(json)
        .map_err(|e| Error::Parse(e.to_string()))?
        .into_subspace()
}

pub fn load_state(path: impl AsRef<Path>) -> Result<LoadedState> {
    parse_state(&fs::read_to_string(path)?)
}

pub fn load_subspace(path: impl AsRef<Path>) -> Result<Subspace> {
    parse_subspace(&fs::read_to_string(path)?)
}

pub fn save_state(path: impl AsRef<Path>, state: &StateFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(state)?)?;
    Ok(())
}

pub fn save_subspace(path: impl AsRef<Path>, v: &Subspace) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&SubspaceFile::from_subspace(v))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{max_entangled, random_density, random_pure};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_round_trip() {
        let psi = max_entangled(3).unwrap();
        let json = serde_json::to_string(&StateFile::from_pure(&psi)).unwrap();
        match parse_state(&json).unwrap() {
            LoadedState::Pure(p) => assert!((p.amplitudes() - psi.amplitudes()).norm() < 1e-15),
            _ => panic!("expected pure"),
        }
    }

    #[test]
    fn density_is_row_major() {
        let json = r#"{"dim_a":2,"dim_b":2,"kind":"density","data":[
            [0.5,0],[0,0],[0,0],[0,0.5],
            [0,0],[0,0],[0,0],[0,0],
            [0,0],[0,0],[0,0],[0,0],
            [0,-0.5],[0,0],[0,0],[0.5,0]]}"#;
        let rho = parse_state(json).unwrap().density();
        assert_eq!(rho.matrix()[(0, 3)], C64::new(0.0, 0.5));
        assert_eq!(rho.matrix()[(3, 0)], C64::new(0.0, -0.5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_state("{"), Err(Error::Parse(_))));
        let short = r#"{"dim_a":2,"dim_b":2,"kind":"pure","data":[[1,0]]}"#;
        assert!(matches!(parse_state(short), Err(Error::Parse(_))));
        let bad_kind = r#"{"dim_a":2,"dim_b":2,"kind":"mixed","data":[]}"#;
        assert!(matches!(parse_state(bad_kind), Err(Error::Parse(_))));
        let empty = r#"{"dim_a":2,"dim_b":2,"basis":[]}"#;
        assert!(matches!(parse_subspace(empty), Err(Error::Parse(_))));
        let flipped = r#"{"dim_a":3,"dim_b":2,"kind":"pure","data":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#;
        assert!(matches!(parse_state(flipped), Err(Error::Dimension(_))));
    }

    #[test]
    fn subspace_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = Subspace::random(2, 3, 2, &mut rng).unwrap();
        let w = parse_subspace(&serde_json::to_string(&SubspaceFile::from_subspace(&v)).unwrap()).unwrap();
        assert!((v.projector_matrix() - w.projector_matrix()).norm() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn density_round_trip(seed in any::<u64>(), rank in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(2, 3, rank, &mut rng).unwrap();
            let json = serde_json::to_string(&StateFile::from_density(&rho)).unwrap();
            let back = parse_state(&json).unwrap().density();
            prop_assert!((back.matrix() - rho.matrix()).norm() < 1e-14);
        }

        #[test]
        fn pure_file_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_pure(3, 3, &mut rng).unwrap();
            let back = parse_state(&serde_json::to_string(&StateFile::from_pure(&psi)).unwrap()).unwrap();
            prop_assert!((back.density().matrix() - psi.density().matrix()).norm() < 1e-14);
        }
    }
}
