//! Built-in test functions with known ridge structure, their input samplers,
//! and analytic central subspaces.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{OrthonormalBasis, SymmetricMatrix};
use crate::rng::stream_rng;
use crate::standardize::Dataset;

/// Seed of the stored quad3d instantiation.
pub const QUAD3D_SEED: u64 = 7;

/// Log-input mean of the Hartmann model, ordered (μ, ρ, ∂p₀/∂x, η, B₀).
pub const HARTMANN_MEAN: [f64; 5] = [-2.25, 1.0, 0.3, 0.3, -0.75];
/// Diagonal of the log-input covariance of the Hartmann model.
pub const HARTMANN_VARIANCE: [f64; 5] = [0.15, 0.25, 0.25, 0.25, 0.25];

/// Input measure of a test function.
#[derive(Debug, Clone, PartialEq)]
pub enum InputDensity {
    StdGaussian { dim: usize },
    Gaussian {
        mean: DVector<f64>,
        cov: SymmetricMatrix,
        chol: DMatrix<f64>,
    },
}

impl InputDensity {
    pub fn gaussian(mean: DVector<f64>, cov: SymmetricMatrix) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                found: mean.len(),
            });
        }
        let chol = cov
            .as_matrix()
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("Gaussian covariance is not positive definite".into()))?
            .l();
        Ok(InputDensity::Gaussian { mean, cov, chol })
    }

    pub fn dim(&self) -> usize {
        match self {
            InputDensity::StdGaussian { dim } => *dim,
            InputDensity::Gaussian { mean, .. } => mean.len(),
        }
    }

    /// `n` independent rows, drawn row by row.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(n, m);
        let mut xi = DVector::zeros(m);
        for i in 0..n {
            for v in xi.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            match self {
                InputDensity::StdGaussian { .. } => out.set_row(i, &xi.transpose()),
                InputDensity::Gaussian { mean, chol, .. } => {
                    let x = mean + chol * &xi;
                    out.set_row(i, &x.transpose());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleNote {
    /// Follows directly from the formula.
    Exact,
    /// Stated for the example without a separate derivation here.
    PaperAsserted,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSubspace {
    pub basis: Option<OrthonormalBasis>,
    pub note: OracleNote,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `(bᵀx)²`
    Quad1d { b: DVector<f64> },
    /// `xᵀBBᵀx + bᵀx`
    Quad3d {
        quad: DMatrix<f64>,
        linear: DVector<f64>,
    },
    /// `x₁x₂`
    Product,
    /// `(x₁ + c₁)(x₂ + c₂)`
    ShiftedProduct { c1: f64, c2: f64 },
    /// 0 inside radius `r1` or outside `r2`, 1 on the ring between them.
    Bullseye { r1: f64, r2: f64 },
    /// `aᵀx`
    Linear { a: DVector<f64> },
    /// Induced magnetic field of the Hartmann flow as a function of log inputs.
    HartmannLog { ell: f64, mu0: f64 },
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const FUNCTION_NAMES: [&str; 7] = [
    "quad1d",
    "quad3d",
    "product",
    "shifted_product",
    "bullseye",
    "linear",
    "hartmann_log",
];

impl TestFunction {
    pub fn quad1d(b: DVector<f64>) -> Result<Self> {
        if b.is_empty() || b.iter().all(|&v| v == 0.0) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParameter {
                name: "b".into(),
                reason: "must be a finite nonzero vector".into(),
            });
        }
        Ok(TestFunction::Quad1d { b })
    }

    /// quad1d on `R^10` with `b = (1, …, 1)/√10`.
    pub fn quad1d_default() -> Self {
        TestFunction::Quad1d {
            b: unit_ones(10),
        }
    }

    pub fn quad3d(quad: DMatrix<f64>, linear: DVector<f64>) -> Result<Self> {
        let m = quad.nrows();
        if quad.ncols() != 2 || linear.len() != m || m < 3 {
            return Err(Error::BadParameter {
                name: "B".into(),
                reason: "B must be m×2 and b length m with m ≥ 3".into(),
            });
        }
        let basis = OrthonormalBasis::orthonormalize(quad.clone()).map_err(|_| Error::BadParameter {
            name: "B".into(),
            reason: "B must have full column rank".into(),
        })?;
        if basis.residual_norm(&linear) <= 1e-8 * linear.norm() || linear.norm() == 0.0 {
            return Err(Error::BadParameter {
                name: "b".into(),
                reason: "b must not lie in the column span of B".into(),
            });
        }
        Ok(TestFunction::Quad3d { quad, linear })
    }

    /// quad3d on `R^10` built from a seeded random orthonormal frame
    /// `q₁, q₂, q₃`: `B = [q₁, 1.5 q₂]`, `b = 2q₁ + 2q₂ + 0.5q₃`.
    ///
    /// `b` has components both inside and outside `colspan(B)`; with `b`
    /// orthogonal to `colspan(B)` the quadratic part is symmetric under
    /// reflection and SIR sees only one direction.
    pub fn quad3d_seeded(seed: u64) -> Self {
        let m = 10;
        let mut rng = stream_rng(seed, 0);
        let g = DMatrix::from_fn(m, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let frame = OrthonormalBasis::orthonormalize(g)
            .expect("Gaussian 10×3 draw is full rank")
            .into_columns();
        let (q1, q2, q3) = (frame.column(0), frame.column(1), frame.column(2));
        let mut quad = DMatrix::zeros(m, 2);
        quad.set_column(0, &q1);
        quad.set_column(1, &(q2 * 1.5));
        let linear = q1 * 2.0 + q2 * 2.0 + q3 * 0.5;
        TestFunction::Quad3d { quad, linear }
    }

    pub fn quad3d_default() -> Self {
        Self::quad3d_seeded(QUAD3D_SEED)
    }

    pub fn shifted_product(c1: f64, c2: f64) -> Self {
        TestFunction::ShiftedProduct { c1, c2 }
    }

    pub fn bullseye(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r1 < r2 && r2.is_finite()) {
            return Err(Error::BadParameter {
                name: "r1/r2".into(),
                reason: "need 0 < r1 < r2".into(),
            });
        }
        Ok(TestFunction::Bullseye { r1, r2 })
    }

    /// Bullseye with radii from [`bullseye_radii`].
    pub fn bullseye_default() -> Self {
        let (r1, r2) = bullseye_radii();
        TestFunction::Bullseye { r1, r2 }
    }

    pub fn linear(a: DVector<f64>) -> Result<Self> {
        if a.is_empty() || a.iter().all(|&v| v == 0.0) || a.iter().any(|v| !v.is_finite()) {
            return Err(Error::BadParameter {
                name: "a".into(),
                reason: "must be a finite nonzero vector".into(),
            });
        }
        Ok(TestFunction::Linear { a })
    }

    /// Linear function on `R^5` with `a = (1, …, 1)/√5`.
    pub fn linear_default() -> Self {
        TestFunction::Linear { a: unit_ones(5) }
    }

    pub fn hartmann_log() -> Self {
        TestFunction::HartmannLog { ell: 1.0, mu0: 1.0 }
    }

    /// Builds a function from its name and `name=value` parameters.
    ///
    /// Vector values are comma separated. Recognized parameters:
    /// quad1d `b`, `m`; quad3d `seed`; shifted_product `c1`, `c2`;
    /// bullseye `r1`, `r2`; linear `a`, `m`; hartmann_log `ell`, `mu0`.
    pub fn from_params(name: &str, params: &[(String, String)]) -> Result<Self> {
        let allowed: &[&str] = match name {
            "quad1d" => &["b", "m"],
            "quad3d" => &["seed"],
            "product" => &[],
            "shifted_product" => &["c1", "c2"],
            "bullseye" => &["r1", "r2"],
            "linear" => &["a", "m"],
            "hartmann_log" => &["ell", "mu0"],
            other => return Err(Error::UnknownFunction(other.to_string())),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::BadParameter {
                name: k.clone(),
                reason: format!("not a parameter of {name}"),
            });
        }
        let get = |key: &str| params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());

        match name {
            "quad1d" => match (get("b"), get("m")) {
                (Some(b), _) => Self::quad1d(parse_vector("b", b)?),
                (None, Some(m)) => Ok(TestFunction::Quad1d {
                    b: unit_ones(parse_dim("m", m)?),
                }),
                (None, None) => Ok(Self::quad1d_default()),
            },
            "quad3d" => Ok(Self::quad3d_seeded(match get("seed") {
                Some(s) => s.trim().parse().map_err(|_| Error::BadParameter {
                    name: "seed".into(),
                    reason: format!("`{s}` is not an unsigned integer"),
                })?,
                None => QUAD3D_SEED,
            })),
            "product" => Ok(TestFunction::Product),
            "shifted_product" => Ok(Self::shifted_product(
                get("c1").map(|v| parse_scalar("c1", v)).transpose()?.unwrap_or(1.0),
                get("c2").map(|v| parse_scalar("c2", v)).transpose()?.unwrap_or(1.0),
            )),
            "bullseye" => {
                let (d1, d2) = bullseye_radii();
                Self::bullseye(
                    get("r1").map(|v| parse_scalar("r1", v)).transpose()?.unwrap_or(d1),
                    get("r2").map(|v| parse_scalar("r2", v)).transpose()?.unwrap_or(d2),
                )
            }
            "linear" => match (get("a"), get("m")) {
                (Some(a), _) => Self::linear(parse_vector("a", a)?),
                (None, Some(m)) => Ok(TestFunction::Linear {
                    a: unit_ones(parse_dim("m", m)?),
                }),
                (None, None) => Ok(Self::linear_default()),
            },
            "hartmann_log" => {
                let ell = get("ell").map(|v| parse_scalar("ell", v)).transpose()?.unwrap_or(1.0);
                let mu0 = get("mu0").map(|v| parse_scalar("mu0", v)).transpose()?.unwrap_or(1.0);
                if !(ell > 0.0 && mu0 > 0.0) {
                    return Err(Error::BadParameter {
                        name: "ell/mu0".into(),
                        reason: "must be positive".into(),
                    });
                }
                Ok(TestFunction::HartmannLog { ell, mu0 })
            }
            _ => unreachable!(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::Quad1d { .. } => "quad1d",
            TestFunction::Quad3d { .. } => "quad3d",
            TestFunction::Product => "product",
            TestFunction::ShiftedProduct { .. } => "shifted_product",
            TestFunction::Bullseye { .. } => "bullseye",
            TestFunction::Linear { .. } => "linear",
            TestFunction::HartmannLog { .. } => "hartmann_log",
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            TestFunction::Quad1d { b } => b.len(),
            TestFunction::Quad3d { linear, .. } => linear.len(),
            TestFunction::Product | TestFunction::ShiftedProduct { .. } | TestFunction::Bullseye { .. } => 2,
            TestFunction::Linear { a } => a.len(),
            TestFunction::HartmannLog { .. } => 5,
        }
    }

    pub fn input_density(&self) -> InputDensity {
        match self {
            TestFunction::HartmannLog { .. } => {
                let mean = DVector::from_column_slice(&HARTMANN_MEAN);
                let cov = SymmetricMatrix::new(DMatrix::from_diagonal(&DVector::from_column_slice(
                    &HARTMANN_VARIANCE,
                )))
                .expect("diagonal covariance is symmetric");
                InputDensity::gaussian(mean, cov).expect("positive variances")
            }
            other => InputDensity::StdGaussian {
                dim: other.input_dim(),
            },
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("input must be finite".into()));
        }
        Ok(self.eval(x))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Quad1d { b } => {
                let t = dot(b.as_slice(), x);
                t * t
            }
            TestFunction::Quad3d { quad, linear } => {
                let u0: f64 = (0..x.len()).map(|i| quad[(i, 0)] * x[i]).sum();
                let u1: f64 = (0..x.len()).map(|i| quad[(i, 1)] * x[i]).sum();
                u0 * u0 + u1 * u1 + dot(linear.as_slice(), x)
            }
            TestFunction::Product => x[0] * x[1],
            TestFunction::ShiftedProduct { c1, c2 } => shifted_product_evaluate(x, *c1, *c2),
            TestFunction::Bullseye { r1, r2 } => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                if r <= *r1 || r >= *r2 {
                    0.0
                } else {
                    1.0
                }
            }
            TestFunction::Linear { a } => dot(a.as_slice(), x),
            TestFunction::HartmannLog { ell, mu0 } => {
                let [mu, _rho, dpdx, eta, b0] = [x[0], x[1], x[2], x[3], x[4]].map(f64::exp);
                induced_field(mu, dpdx, eta, b0, *ell, *mu0)
            }
        }
    }

    /// `n` inputs from the function's density with their responses.
    pub fn sample_inputs(&self, n: usize, seed: u64) -> Result<Dataset> {
        self.sample_inputs_stream(n, seed, 0)
    }

    /// As [`sample_inputs`](Self::sample_inputs) on an independent stream.
    pub fn sample_inputs_stream(&self, n: usize, seed: u64, stream: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        let mut rng = stream_rng(seed, stream);
        let x = self.input_density().sample(n, &mut rng);
        let mut row = vec![0.0; x.ncols()];
        let y = (0..n)
            .map(|i| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = x[(i, j)];
                }
                self.eval(&row)
            })
            .collect();
        Dataset::new(x, y)
    }

    pub fn oracle_subspace(&self) -> OracleSubspace {
        let exact = |cols: DMatrix<f64>| OracleSubspace {
            basis: Some(OrthonormalBasis::orthonormalize(cols).expect("oracle spanning set has full rank")),
            note: OracleNote::Exact,
        };
        match self {
            TestFunction::Quad1d { b } => exact(DMatrix::from_column_slice(b.len(), 1, b.as_slice())),
            TestFunction::Quad3d { quad, linear } => {
                let m = linear.len();
                let mut cols = DMatrix::zeros(m, 3);
                cols.set_column(0, &quad.column(0));
                cols.set_column(1, &quad.column(1));
                cols.set_column(2, linear);
                exact(cols)
            }
            TestFunction::Product | TestFunction::Bullseye { .. } => OracleSubspace {
                basis: Some(OrthonormalBasis::standard(2, 2).unwrap()),
                note: OracleNote::PaperAsserted,
            },
            TestFunction::ShiftedProduct { .. } => exact(DMatrix::identity(2, 2)),
            TestFunction::Linear { a } => exact(DMatrix::from_column_slice(a.len(), 1, a.as_slice())),
            TestFunction::HartmannLog { .. } => {
                // B_ind = (p/B₀)(ℓμ₀/2)(1 − tanh(s)/s) with s = B₀ℓ/(2√(ημ)):
                // log(p/B₀) and log(B₀) − (log η + log μ)/2 carry all dependence
                let mut cols = DMatrix::zeros(5, 2);
                cols[(2, 0)] = 1.0;
                cols[(4, 0)] = -1.0;
                cols[(4, 1)] = 1.0;
                cols[(0, 1)] = -0.5;
                cols[(3, 1)] = -0.5;
                exact(cols)
            }
        }
    }
}

/// `(x₁ + c₁)(x₂ + c₂)`
pub fn shifted_product_evaluate(x: &[f64], c1: f64, c2: f64) -> f64 {
    (x[0] + c1) * (x[1] + c2)
}

/// Total induced magnetic field in physical (not log) inputs.
pub fn induced_field(mu: f64, dpdx: f64, eta: f64, b0: f64, ell: f64, mu0: f64) -> f64 {
    let root = (eta * mu).sqrt();
    dpdx * ell * mu0 / (2.0 * b0) * (1.0 - 2.0 * root / (b0 * ell) * (b0 * ell / (2.0 * root)).tanh())
}

/// Radii `(1, r₂)` with `r₂ > √2` and `r₁² e^{−r₁²/2} = r₂² e^{−r₂²/2}`.
///
/// For these radii both response levels of the bullseye have identity
/// conditional covariance under a standard Gaussian input.
pub fn bullseye_radii() -> (f64, f64) {
    let g = |r: f64| r * r * (-0.5 * r * r).exp();
    let r1 = 1.0;
    let target = g(r1);
    // g increases up to √2 and decreases to 0 after it
    let mut lo = std::f64::consts::SQRT_2;
    let mut hi = 2.0;
    while g(hi) >= target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r2 = if (g(lo) - target).abs() <= (g(hi) - target).abs() { lo } else { hi };
    (r1, r2)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn unit_ones(m: usize) -> DVector<f64> {
    DVector::from_element(m, 1.0 / (m as f64).sqrt())
}

fn parse_scalar(name: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::BadParameter {
            name: name.into(),
            reason: format!("`{v}` is not a finite number"),
        })
}

fn parse_dim(name: &str, v: &str) -> Result<usize> {
    match v.trim().parse::<usize>() {
        Ok(m) if m >= 1 => Ok(m),
        _ => Err(Error::BadParameter {
            name: name.into(),
            reason: format!("`{v}` is not a positive integer"),
        }),
    }
}

fn parse_vector(name: &str, v: &str) -> Result<DVector<f64>> {
    let vals = v
        .split(',')
        .map(|s| parse_scalar(name, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(vals))
}
