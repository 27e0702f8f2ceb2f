//! JSON report, schema `v1`.
//!
//! Integers are decimal strings so that arbitrary precision survives any JSON
//! reader. Lattices are given by their row Hermite normal form over the Hall
//! basis of the free Lie ring. Everything except `timing_ms` is a function of
//! the command line, the input bytes and the seed.

use liedim::{AbelianInvariants, FreeLieContext, Lattice, LieVec, Presentation};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "v1";

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Vec<String>,
    /// Hex SHA-256 of the input file; absent for built-in inputs.
    pub input_sha256: Option<String>,
    pub seed: Option<u64>,
    pub presentation: Option<PresentationJson>,
    pub results: Value,
    pub checks: Vec<CheckJson>,
    pub passed: bool,
    pub timing_ms: f64,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            schema: SCHEMA,
            command,
            input_sha256: None,
            seed: None,
            presentation: None,
            results: Value::Null,
            checks: Vec::new(),
            passed: true,
            timing_ms: 0.0,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(CheckJson {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationJson {
    pub generators: Vec<String>,
    pub class_cap: usize,
    pub lie_cap: usize,
    pub relators: Vec<String>,
}

impl From<&Presentation> for PresentationJson {
    fn from(p: &Presentation) -> Self {
        let ctx = p.ctx();
        PresentationJson {
            generators: ctx.generators().iter().map(|g| g.name.clone()).collect(),
            class_cap: p.class_cap(),
            lie_cap: ctx.cap(),
            relators: p.relators().iter().map(|r| ctx.format(r)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantsJson {
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub display: String,
}

impl From<&AbelianInvariants> for InvariantsJson {
    fn from(a: &AbelianInvariants) -> Self {
        InvariantsJson {
            free_rank: a.free_rank,
            torsion: strings(&a.torsion),
            display: a.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeJson {
    pub ambient: usize,
    pub rank: usize,
    /// Basis rows in Hermite normal form, dense.
    pub hnf: Vec<Vec<String>>,
}

impl From<&Lattice> for LatticeJson {
    fn from(l: &Lattice) -> Self {
        let n = l.ambient_rank();
        LatticeJson {
            ambient: n,
            rank: l.rank(),
            hnf: l.basis().iter().map(|r| strings(&r.to_dense(n))).collect(),
        }
    }
}

/// Labels of the Hall basis, the column order of every `hnf` matrix.
pub fn hall_labels(ctx: &FreeLieContext) -> Vec<String> {
    (0..ctx.rank()).map(|id| ctx.element_string(id)).collect()
}

pub fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(BigInt::to_string).collect()
}

pub fn formatted(ctx: &FreeLieContext, v: &[LieVec]) -> Vec<String> {
    v.iter().map(|x| ctx.format(x)).collect()
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report values serialize")
}
