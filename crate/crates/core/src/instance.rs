//! Problem instances, norm selectors, support sets and the JSON instance file.
//!
//! An instance describes `min ||x||_p^p  s.t.  ||Ax - b||_q <= sigma`. The file
//! format is a single JSON object
//!
//! ```json
//! {"format": 1, "m": 2, "n": 3, "a": [1, 1, 1, 1, 1, -1], "b": [3, 3], "sigma": 1, "p": 0.5}
//! ```
//!
//! with `a` stored row-major. Scalars are written with the shortest decimal
//! representation that round-trips, so `read(write(inst)) == inst` bit for bit.

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FILE_FORMAT_VERSION: u32 = 1;

/// Norm used for the data-fit constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

impl Norm {
    pub fn exponent(self) -> f64 {
        match self {
            Norm::L1 => 1.0,
            Norm::L2 => 2.0,
            Norm::Inf => f64::INFINITY,
        }
    }

    pub fn of(self, x: &[f64]) -> f64 {
        match self {
            Norm::L1 => x.iter().map(|v| v.abs()).sum(),
            Norm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Inf => x.iter().fold(0.0, |acc, v| acc.max(v.abs())),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Inf => "inf",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "Inf" | "infinity" => Ok(Norm::Inf),
            other => Err(Error::param(format!("unknown norm selector {other:?}"))),
        }
    }
}

/// One constrained sparse-recovery problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub sigma: f64,
    /// Exponent of the objective; 0 when the instance is only fed to the L0 oracle.
    pub p: f64,
}

impl ProblemInstance {
    /// Builds an instance from a row-major matrix. Shapes are checked, values are not;
    /// call [`validate_instance`] before solving.
    pub fn from_row_major(
        m: usize,
        n: usize,
        a: &[f64],
        b: &[f64],
        sigma: f64,
        p: f64,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "m = {m}, n = {n}; both must be positive"
            )));
        }
        if a.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "a has {} entries, expected m*n = {}",
                a.len(),
                m * n
            )));
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "b has length {}, expected m = {m}",
                b.len()
            )));
        }
        Ok(Self {
            a: DMatrix::from_row_slice(m, n, a),
            b: DVector::from_column_slice(b),
            sigma,
            p,
        })
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn with_p(&self, p: f64) -> Self {
        Self { p, ..self.clone() }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            sigma,
            ..self.clone()
        }
    }

    /// `Ax - b`.
    pub fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x - &self.b
    }

    pub fn residual_norm(&self, x: &DVector<f64>, q: Norm) -> f64 {
        q.of(self.residual(x).as_slice())
    }

    /// The small worked instance with `A = [[1,1,1],[1,1,-1]]`, `b = (3,3)`, `sigma = 1`.
    pub fn example_2x3(p: f64) -> Self {
        Self::from_row_major(2, 3, &[1.0, 1.0, 1.0, 1.0, 1.0, -1.0], &[3.0, 3.0], 1.0, p)
            .expect("static shapes")
    }

    fn row_major(&self) -> Vec<f64> {
        let (m, n) = self.a.shape();
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.a[(i, j)]);
            }
        }
        out
    }
}

/// Checks shapes, finiteness, `sigma >= 0` and the blanket assumption `||b||_q > sigma`.
pub fn validate_instance(inst: &ProblemInstance, q: Norm) -> Result<()> {
    let (m, n) = inst.a.shape();
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("m = {m}, n = {n}")));
    }
    if inst.b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "b has length {}, A has {m} rows",
            inst.b.len()
        )));
    }
    if inst.a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("A"));
    }
    if inst.b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("b"));
    }
    if !inst.sigma.is_finite() {
        return Err(Error::NonFinite("sigma"));
    }
    if !inst.p.is_finite() {
        return Err(Error::NonFinite("p"));
    }
    if inst.sigma < 0.0 {
        return Err(Error::param(format!("sigma = {} is negative", inst.sigma)));
    }
    let b_norm = q.of(inst.b.as_slice());
    if b_norm <= inst.sigma {
        return Err(Error::TrivialInstance {
            norm: q.label(),
            b_norm,
            sigma: inst.sigma,
        });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format: u32,
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    sigma: f64,
    p: f64,
}

pub fn instance_to_json(inst: &ProblemInstance) -> String {
    let file = InstanceFile {
        format: FILE_FORMAT_VERSION,
        m: inst.m(),
        n: inst.n(),
        a: inst.row_major(),
        b: inst.b.as_slice().to_vec(),
        sigma: inst.sigma,
        p: inst.p,
    };
    serde_json::to_string(&file).expect("instance serialization is infallible")
}

pub fn instance_from_json(text: &str, context: &str) -> Result<ProblemInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: context.to_string(),
        message: e.to_string(),
    })?;
    if file.format != FILE_FORMAT_VERSION {
        return Err(Error::Parse {
            context: context.to_string(),
            message: format!(
                "unsupported format version {} (expected {FILE_FORMAT_VERSION})",
                file.format
            ),
        });
    }
    ProblemInstance::from_row_major(file.m, file.n, &file.a, &file.b, file.sigma, file.p)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    instance_from_json(&text, &path.display().to_string())
}

pub fn write_instance(inst: &ProblemInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(inst)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Sorted, duplicate-free set of coordinate indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Indices of the exactly-nonzero coordinates of `x`.
    pub fn of(x: &[f64]) -> Self {
        Self(
            x.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    pub fn from_indices(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::DimensionMismatch(format!(
                    "support index {last} out of range for n = {n}"
                )));
            }
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Complement in `0..n`.
    pub fn complement(&self, n: usize) -> Self {
        let mut it = self.0.iter().peekable();
        let mut out = Vec::with_capacity(n - self.0.len());
        for i in 0..n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        Self(out)
    }

    /// Columns of `a` restricted to this set.
    pub fn columns_of(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        a.select_columns(self.0.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_validates_under_l1() {
        let inst = ProblemInstance::example_2x3(0.5);
        validate_instance(&inst, Norm::L1).unwrap();
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.a[(1, 2)], -1.0);
    }

    #[test]
    fn zero_data_is_trivial() {
        let inst =
            ProblemInstance::from_row_major(2, 2, &[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0], 0.0, 0.5)
                .unwrap();
        assert!(matches!(
            validate_instance(&inst, Norm::L1),
            Err(Error::TrivialInstance { .. })
        ));
    }

    #[test]
    fn b_length_mismatch() {
        let err = ProblemInstance::from_row_major(2, 3, &[0.0; 6], &[1.0, 2.0, 3.0], 0.1, 0.5);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn non_finite_rejected() {
        let mut inst = ProblemInstance::example_2x3(0.5);
        inst.a[(0, 0)] = f64::NAN;
        assert!(matches!(
            validate_instance(&inst, Norm::L1),
            Err(Error::NonFinite("A"))
        ));
    }

    #[test]
    fn norm_selector_changes_triviality() {
        // ||b||_1 = 6, ||b||_2 = 4.24, ||b||_inf = 3
        let inst = ProblemInstance::example_2x3(0.5).with_sigma(4.0);
        assert!(validate_instance(&inst, Norm::L1).is_ok());
        assert!(validate_instance(&inst, Norm::L2).is_ok());
        assert!(validate_instance(&inst, Norm::Inf).is_err());
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ex.json");
        let mut inst = ProblemInstance::example_2x3(0.5);
        inst.a[(0, 1)] = 0.1 + 0.2;
        inst.sigma = 1.0 / 3.0;
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back, inst);
        for (x, y) in back.a.iter().zip(inst.a.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(back.sigma.to_bits(), inst.sigma.to_bits());
    }

    #[test]
    fn missing_field_is_named() {
        let text = r#"{"format":1,"m":1,"n":1,"a":[1.0],"b":[2.0],"p":0.5}"#;
        match instance_from_json(text, "inline") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("sigma"), "{message}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_columns_in_file() {
        let text = r#"{"format":1,"m":1,"n":0,"a":[],"b":[2.0],"sigma":0.0,"p":0.5}"#;
        assert!(matches!(
            instance_from_json(text, "inline"),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn support_set_ops() {
        let s = SupportSet::of(&[0.0, 1.0, 0.0, -2.0]);
        assert_eq!(s.indices(), &[1, 3]);
        assert_eq!(s.complement(4).indices(), &[0, 2]);
        let t = SupportSet::from_indices(vec![3, 1, 3], 4).unwrap();
        assert_eq!(s, t);
        assert!(SupportSet::from_indices(vec![4], 4).is_err());
    }
}
