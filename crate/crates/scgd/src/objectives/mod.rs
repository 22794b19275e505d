//! Objectives, synthetic data, and ground-truth solvers.
//!
//! Two regularized empirical-risk objectives over a dataset (X, y) with
//! X ∈ R^{n×p}, plus two deterministic 2-D toys used to visualize coordinate
//! selection:
//!
//! - ridge:      f(θ) = 1/(2n) Σᵢ (yᵢ − ⟨xᵢ, θ⟩)² + (μ/2)‖θ‖²
//! - logistic:   f(θ) = 1/n Σᵢ ln(1 + exp(−yᵢ⟨xᵢ, θ⟩)) + μ‖θ‖²,  yᵢ ∈ {−1, +1}
//! - quadratic 2-D:      f(x, y) = (x² + y²)/2   (both coordinates matter)
//! - axis quadratic 2-D: h(x, y) = x²/2          (only the first coordinate matters)
//!
//! Synthetic designs are block-structured: column j belongs to group
//! k = ⌊j/B⌋ (0-indexed) and is drawn i.i.d. N(0, (k+1)^{−α}), so early groups
//! carry most of the signal and a good coordinate policy should favor them.

mod csv;

pub use csv::{export_csv, import_csv};

use crate::rng;
use crate::{Result, ScgdError};
use nalgebra::{DMatrix, DVector};

/// Parameter vector; coordinate-masked updates are applied by the optimizer.
pub type ParamVector = DVector<f64>;

/// How labels are generated from the design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelModel {
    /// y = Xw + ε with ε ~ N(0, I) and w = (1/√p)·(1, …, 1).
    LinearGaussian,
    /// yᵢ = +1 with probability sigmoid(⟨xᵢ, w⟩), else −1.
    LogisticBernoulli,
}

/// Configuration for [`generate_block_dataset`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlockStructureConfig {
    pub n: usize,
    pub p: usize,
    /// Decay exponent α ≥ 0 of the group variances (k+1)^{−α}.
    pub alpha_block: f64,
    /// Columns per variance group (B). The last group may be ragged.
    pub block_size: usize,
    pub label_model: LabelModel,
    pub seed: u64,
}

impl BlockStructureConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(ScgdError::InvalidConfig("n and p must be ≥ 1".into()));
        }
        if self.block_size == 0 || self.block_size > self.p {
            return Err(ScgdError::InvalidConfig(format!(
                "block_size must lie in 1..={}, got {}",
                self.p, self.block_size
            )));
        }
        if !self.alpha_block.is_finite() || self.alpha_block < 0.0 {
            return Err(ScgdError::InvalidConfig(format!(
                "alpha_block must be finite and ≥ 0, got {}",
                self.alpha_block
            )));
        }
        Ok(())
    }

    /// Configured variance of column `j`: (⌊j/B⌋ + 1)^{−α}.
    pub fn column_variance(&self, j: usize) -> f64 {
        let group = (j / self.block_size) as f64;
        (group + 1.0).powf(-self.alpha_block)
    }
}

/// A dense dataset: features X ∈ R^{n×p} (rows are samples) and labels y ∈ R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    labels: DVector<f64>,
}

impl Dataset {
    pub fn new(features: DMatrix<f64>, labels: DVector<f64>) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(ScgdError::InvalidConfig("dataset must be non-empty".into()));
        }
        if labels.len() != features.nrows() {
            return Err(ScgdError::DimensionMismatch { expected: features.nrows(), got: labels.len() });
        }
        if features.iter().any(|v| !v.is_finite()) || labels.iter().any(|v| !v.is_finite()) {
            return Err(ScgdError::InvalidConfig("dataset contains non-finite values".into()));
        }
        Ok(Dataset { features, labels })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }
}

/// Draw a block-structured dataset. All randomness comes from one ChaCha8
/// stream seeded by `cfg.seed`: the design is filled column by column (each
/// column is n Box–Muller normals scaled by the group standard deviation),
/// then the labels consume n further draws. Identical configs reproduce the
/// dataset bit for bit.
pub fn generate_block_dataset(cfg: &BlockStructureConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut r = rng::stream(cfg.seed, 0);
    let (n, p) = (cfg.n, cfg.p);

    let mut features = DMatrix::<f64>::zeros(n, p);
    for j in 0..p {
        let sd = cfg.column_variance(j).sqrt();
        for i in 0..n {
            features[(i, j)] = sd * rng::standard_normal(&mut r);
        }
    }

    let w = 1.0 / (p as f64).sqrt();
    let mut labels = DVector::<f64>::zeros(n);
    for i in 0..n {
        let signal: f64 = features.row(i).iter().sum::<f64>() * w;
        labels[i] = match cfg.label_model {
            LabelModel::LinearGaussian => signal + rng::standard_normal(&mut r),
            LabelModel::LogisticBernoulli => {
                let u: f64 = rand::Rng::random(&mut r);
                if u < sigmoid(signal) {
                    1.0
                } else {
                    -1.0
                }
            }
        };
    }

    Dataset::new(features, labels)
}

/// Which loss the objective evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Ridge,
    Logistic,
    Quadratic2D,
    AxisQuadratic2D,
}

/// An objective instance: a kind, a regularization strength, and (for the
/// data-driven kinds) a dataset. The 2-D toys are deterministic and data-free;
/// they report a single pseudo-sample so the stochastic loop can treat every
/// objective uniformly.
#[derive(Debug, Clone)]
pub struct Objective {
    kind: ObjectiveKind,
    mu: f64,
    dataset: Option<Dataset>,
}

impl Objective {
    pub fn ridge(dataset: Dataset, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(Objective { kind: ObjectiveKind::Ridge, mu, dataset: Some(dataset) })
    }

    pub fn logistic(dataset: Dataset, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        if dataset.labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(ScgdError::InvalidConfig("logistic labels must be −1 or +1".into()));
        }
        Ok(Objective { kind: ObjectiveKind::Logistic, mu, dataset: Some(dataset) })
    }

    pub fn quadratic_2d() -> Self {
        Objective { kind: ObjectiveKind::Quadratic2D, mu: 0.0, dataset: None }
    }

    pub fn axis_quadratic_2d() -> Self {
        Objective { kind: ObjectiveKind::AxisQuadratic2D, mu: 0.0, dataset: None }
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        self.dataset.as_ref()
    }

    /// Dimension of θ.
    pub fn dim(&self) -> usize {
        match &self.dataset {
            Some(d) => d.p(),
            None => 2,
        }
    }

    /// Number of samples available to the stochastic loop (1 for the toys).
    pub fn sample_count(&self) -> usize {
        self.dataset.as_ref().map_or(1, Dataset::n)
    }

    /// Full objective value f(θ).
    pub fn full_objective(&self, theta: &ParamVector) -> Result<f64> {
        self.check_dim(theta)?;
        match self.kind {
            ObjectiveKind::Quadratic2D => Ok(0.5 * (theta[0] * theta[0] + theta[1] * theta[1])),
            ObjectiveKind::AxisQuadratic2D => Ok(0.5 * theta[0] * theta[0]),
            ObjectiveKind::Ridge => {
                let d = self.data();
                let r = d.labels() - d.features() * theta;
                let n = d.n() as f64;
                Ok(r.norm_squared() / (2.0 * n) + 0.5 * self.mu * theta.norm_squared())
            }
            ObjectiveKind::Logistic => {
                let d = self.data();
                let z = d.features() * theta;
                let n = d.n() as f64;
                let loss: f64 = (0..d.n()).map(|i| softplus(-d.labels()[i] * z[i])).sum();
                Ok(loss / n + self.mu * theta.norm_squared())
            }
        }
    }

    /// Mini-batch loss: the mean per-sample loss over `indices` plus the
    /// regularization term. Averaging over all indices recovers
    /// [`Objective::full_objective`]; the toys ignore the (single) index.
    pub fn sample_loss(&self, theta: &ParamVector, indices: &[usize]) -> Result<f64> {
        self.check_dim(theta)?;
        self.check_batch(indices)?;
        match self.kind {
            ObjectiveKind::Quadratic2D | ObjectiveKind::AxisQuadratic2D => self.full_objective(theta),
            ObjectiveKind::Ridge => {
                let d = self.data();
                let mut acc = 0.0;
                for &i in indices {
                    let r = d.labels()[i] - dot_row(d.features(), i, theta);
                    acc += 0.5 * r * r;
                }
                Ok(acc / indices.len() as f64 + 0.5 * self.mu * theta.norm_squared())
            }
            ObjectiveKind::Logistic => {
                let d = self.data();
                let mut acc = 0.0;
                for &i in indices {
                    acc += softplus(-d.labels()[i] * dot_row(d.features(), i, theta));
                }
                Ok(acc / indices.len() as f64 + self.mu * theta.norm_squared())
            }
        }
    }

    /// Exact gradient: of the full objective when `indices` is `None`, of the
    /// mini-batch loss otherwise.
    pub fn exact_gradient(&self, theta: &ParamVector, indices: Option<&[usize]>) -> Result<ParamVector> {
        self.check_dim(theta)?;
        if let Some(batch) = indices {
            self.check_batch(batch)?;
        }
        match self.kind {
            ObjectiveKind::Quadratic2D => Ok(theta.clone()),
            ObjectiveKind::AxisQuadratic2D => Ok(DVector::from_vec(vec![theta[0], 0.0])),
            ObjectiveKind::Ridge => {
                let d = self.data();
                let mut g = match indices {
                    None => {
                        let r = d.labels() - d.features() * theta;
                        -(d.features().transpose() * r) / d.n() as f64
                    }
                    Some(batch) => {
                        let mut g = DVector::zeros(d.p());
                        for &i in batch {
                            let r = d.labels()[i] - dot_row(d.features(), i, theta);
                            g.axpy(-r / batch.len() as f64, &d.features().row(i).transpose(), 1.0);
                        }
                        g
                    }
                };
                g.axpy(self.mu, theta, 1.0);
                Ok(g)
            }
            ObjectiveKind::Logistic => {
                let d = self.data();
                let mut g = DVector::zeros(d.p());
                let accumulate = |g: &mut DVector<f64>, i: usize, scale: f64| {
                    let y = d.labels()[i];
                    let z = dot_row(d.features(), i, theta);
                    // ∂ softplus(−yz) = −y·σ(−yz)
                    g.axpy(scale * (-y) * sigmoid(-y * z), &d.features().row(i).transpose(), 1.0);
                };
                match indices {
                    None => {
                        for i in 0..d.n() {
                            accumulate(&mut g, i, 1.0 / d.n() as f64);
                        }
                    }
                    Some(batch) => {
                        for &i in batch {
                            accumulate(&mut g, i, 1.0 / batch.len() as f64);
                        }
                    }
                }
                g.axpy(2.0 * self.mu, theta, 1.0);
                Ok(g)
            }
        }
    }

    /// Ground-truth minimizer and value (θ*, f*).
    ///
    /// Ridge solves the normal equations (XᵀX/n + μI)θ = Xᵀy/n by Cholesky;
    /// logistic runs damped Newton with Armijo backtracking to
    /// ‖∇f‖∞ ≤ 1e−10; the toys are known in closed form.
    pub fn solve_oracle(&self) -> Result<(ParamVector, f64)> {
        match self.kind {
            ObjectiveKind::Quadratic2D | ObjectiveKind::AxisQuadratic2D => {
                Ok((DVector::zeros(2), 0.0))
            }
            ObjectiveKind::Ridge => {
                let h = self.ridge_hessian().expect("ridge has a Hessian");
                let d = self.data();
                let rhs = d.features().transpose() * d.labels() / d.n() as f64;
                let chol = nalgebra::Cholesky::new(h).ok_or(ScgdError::SingularSystem)?;
                // Rounding can hand Cholesky a tiny positive pivot on an
                // exactly rank-deficient Gram matrix; reject those too.
                let ldiag = chol.l_dirty();
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for j in 0..ldiag.nrows() {
                    lo = lo.min(ldiag[(j, j)]);
                    hi = hi.max(ldiag[(j, j)]);
                }
                if lo <= 1e-7 * hi {
                    return Err(ScgdError::SingularSystem);
                }
                let theta = chol.solve(&rhs);
                let value = self.full_objective(&theta)?;
                Ok((theta, value))
            }
            ObjectiveKind::Logistic => self.solve_logistic_oracle(),
        }
    }

    /// Hessian XᵀX/n + μI of the ridge objective (constant in θ).
    pub fn ridge_hessian(&self) -> Option<DMatrix<f64>> {
        if self.kind != ObjectiveKind::Ridge {
            return None;
        }
        let d = self.data();
        let mut h = d.features().transpose() * d.features() / d.n() as f64;
        for j in 0..d.p() {
            h[(j, j)] += self.mu;
        }
        Some(h)
    }

    /// A smoothness (gradient-Lipschitz) constant L for the objective: the
    /// largest Hessian eigenvalue for ridge and the toys, and the standard
    /// upper bound λmax(XᵀX)/(4n) + 2μ for logistic.
    pub fn smoothness_constant(&self) -> f64 {
        match self.kind {
            ObjectiveKind::Quadratic2D | ObjectiveKind::AxisQuadratic2D => 1.0,
            ObjectiveKind::Ridge => {
                let h = self.ridge_hessian().expect("ridge has a Hessian");
                largest_eigenvalue(&h)
            }
            ObjectiveKind::Logistic => {
                let d = self.data();
                let gram = d.features().transpose() * d.features() / d.n() as f64;
                0.25 * largest_eigenvalue(&gram) + 2.0 * self.mu
            }
        }
    }

    fn solve_logistic_oracle(&self) -> Result<(ParamVector, f64)> {
        const TOL: f64 = 1e-10;
        const MAX_ITERS: u64 = 500;
        let d = self.data();
        let (x, n) = (d.features(), d.n());
        let mut theta = DVector::zeros(self.dim());
        let mut value = self.full_objective(&theta)?;
        for iter in 0..MAX_ITERS {
            let grad = self.exact_gradient(&theta, None)?;
            let grad_norm = grad.amax();
            if grad_norm <= TOL {
                return Ok((theta, value));
            }
            // Newton direction from the weighted Gram matrix
            // H = Xᵀ·diag(σᵢ(1−σᵢ))·X/n + 2μI, built as SᵀS with the rows of
            // X scaled by √(wᵢ/n); fall back to the gradient when H is not
            // usably positive definite (possible only at μ = 0).
            let mut scaled = x.clone();
            for i in 0..n {
                let z = dot_row(x, i, &theta);
                let s = sigmoid(z);
                let w = ((s * (1.0 - s)).max(0.0) / n as f64).sqrt();
                for j in 0..d.p() {
                    scaled[(i, j)] *= w;
                }
            }
            let mut hessian = scaled.transpose() * &scaled;
            for j in 0..d.p() {
                hessian[(j, j)] += 2.0 * self.mu;
            }
            let direction = nalgebra::Cholesky::new(hessian)
                .map(|chol| chol.solve(&grad))
                .unwrap_or_else(|| grad.clone());
            let slope = grad.dot(&direction);
            let mut t: f64 = 1.0;
            loop {
                let candidate = &theta - t * &direction;
                let cand_value = self.full_objective(&candidate)?;
                if cand_value <= value - 1e-4 * t * slope {
                    theta = candidate;
                    value = cand_value;
                    break;
                }
                t *= 0.5;
                if t < 1e-20 {
                    return Err(ScgdError::OracleDidNotConverge { iters: iter, grad_norm });
                }
            }
        }
        let grad_norm = self.exact_gradient(&theta, None)?.amax();
        if grad_norm <= TOL {
            Ok((theta, value))
        } else {
            Err(ScgdError::OracleDidNotConverge { iters: MAX_ITERS, grad_norm })
        }
    }

    fn data(&self) -> &Dataset {
        self.dataset.as_ref().expect("data-driven objective carries a dataset")
    }

    fn check_dim(&self, theta: &ParamVector) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(ScgdError::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        Ok(())
    }

    fn check_batch(&self, indices: &[usize]) -> Result<()> {
        if indices.is_empty() {
            return Err(ScgdError::InvalidConfig("batch must contain at least one index".into()));
        }
        let n = self.sample_count();
        for &i in indices {
            if i >= n {
                return Err(ScgdError::IndexOutOfRange { index: i, len: n });
            }
        }
        Ok(())
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(ScgdError::InvalidConfig(format!("μ must be finite and ≥ 0, got {mu}")));
    }
    Ok(())
}

fn dot_row(m: &DMatrix<f64>, i: usize, v: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        acc += m[(i, j)] * v[j];
    }
    acc
}

/// Numerically stable ln(1 + e^z).
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Numerically stable 1/(1 + e^{−u}).
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Largest eigenvalue of a symmetric matrix.
pub fn largest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}
