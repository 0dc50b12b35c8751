//! GKSL generator, its vectorized superoperator, and purity propagation.

use nalgebra::{DMatrix, DVectorView, DVectorViewMut};

use crate::error::{Error, Result};
use crate::numerics::{integrate_linear_ode, ComplexMatrix, C64};
use crate::states::{DensityMatrix, StateTolerance};

/// Jump operators `L_α` with rates `γ_α` and an optional Hamiltonian (ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    dim: usize,
    jumps: Vec<ComplexMatrix>,
    rates: Vec<f64>,
    hamiltonian: Option<ComplexMatrix>,
}

impl LindbladModel {
    pub fn new(jumps: Vec<ComplexMatrix>, rates: Vec<f64>, hamiltonian: Option<ComplexMatrix>) -> Result<Self> {
        let Some(first) = jumps.first() else {
            return Err(Error::Parameter("at least one jump operator is required".into()));
        };
        let dim = first.rows();
        if jumps.len() != rates.len() {
            return Err(Error::Parameter(format!("{} jump operators but {} rates", jumps.len(), rates.len())));
        }
        if jumps.iter().any(|l| l.rows() != dim || l.cols() != dim) {
            return Err(Error::Dimension(format!("all jump operators must be {dim}x{dim}")));
        }
        if rates.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(Error::Parameter("rates must be finite and non-negative".into()));
        }
        if !(rates.iter().sum::<f64>() > 0.0) {
            return Err(Error::Parameter("total rate must be positive".into()));
        }
        if let Some(h) = &hamiltonian {
            if h.rows() != dim || h.cols() != dim {
                return Err(Error::Dimension(format!("Hamiltonian must be {dim}x{dim}")));
            }
            let defect = h.hermitian_defect();
            if defect > crate::numerics::HERMITIAN_TOL {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(Self { dim, jumps, rates, hamiltonian })
    }

    /// One jump operator at rate `gamma`, no Hamiltonian.
    pub fn single(jump: ComplexMatrix, gamma: f64) -> Result<Self> {
        Self::new(vec![jump], vec![gamma], None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix> {
        self.hamiltonian.as_ref()
    }

    /// `Γ = Σ γ_α`.
    pub fn total_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    /// Generator acting on column-stacked `vec(ρ)`, an `N² × N²` matrix.
    pub fn superoperator(&self) -> DMatrix<C64> {
        let n = self.dim;
        let id = DMatrix::<C64>::identity(n, n);
        let mut sup = DMatrix::<C64>::zeros(n * n, n * n);
        // vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)
        if let Some(h) = &self.hamiltonian {
            let h = h.as_matrix();
            let minus_i = C64::new(0.0, -1.0);
            sup += (id.kronecker(h) - h.transpose().kronecker(&id)) * minus_i;
        }
        for (l, &gamma) in self.jumps.iter().zip(&self.rates) {
            if gamma == 0.0 {
                continue;
            }
            let l = l.as_matrix();
            let k = l.adjoint() * l;
            let half = C64::new(0.5, 0.0);
            let term = l.conjugate().kronecker(l) - id.kronecker(&k) * half - k.transpose().kronecker(&id) * half;
            sup += term * C64::new(gamma, 0.0);
        }
        sup
    }
}

/// `−i[H, ρ] + Σ_α γ_α (L_α ρ L_α† − ½{L_α†L_α, ρ})`.
pub fn apply_generator(model: &LindbladModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = model.dim;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::Dimension(format!(
            "state is {}x{} but the model acts on dimension {n}",
            rho.rows(),
            rho.cols()
        )));
    }
    let r = rho.as_matrix();
    let mut out = DMatrix::<C64>::zeros(n, n);
    if let Some(h) = &model.hamiltonian {
        let h = h.as_matrix();
        out += (h * r - r * h) * C64::new(0.0, -1.0);
    }
    for (l, &gamma) in model.jumps.iter().zip(&model.rates) {
        let l = l.as_matrix();
        let ld = l.adjoint();
        let k = &ld * l;
        let term = l * r * &ld - (&k * r + r * &k) * C64::new(0.5, 0.0);
        out += term * C64::new(gamma, 0.0);
    }
    ComplexMatrix::from_matrix(out)
}

/// Solves `ρ̇ = 𝓛(ρ)` on `t_grid`, validating every output state.
pub fn propagate(model: &LindbladModel, rho0: &DensityMatrix, t_grid: &[f64], rel_tol: f64) -> Result<Vec<DensityMatrix>> {
    let n = model.dim;
    if rho0.dim() != n {
        return Err(Error::Dimension(format!("state dimension {} vs model dimension {n}", rho0.dim())));
    }
    let sup = model.superoperator();
    let n2 = n * n;
    let y0 = rho0.matrix().as_matrix().as_slice().to_vec();
    let states = integrate_linear_ode(
        |y, dy| {
            let x = DVectorView::from_slice(y, n2);
            let mut out = DVectorViewMut::from_slice(dy, n2);
            out.gemv(C64::new(1.0, 0.0), &sup, &x, C64::new(0.0, 0.0));
        },
        &y0,
        t_grid,
        rel_tol,
    )?;
    states
        .into_iter()
        .map(|v| {
            let m = ComplexMatrix::from_matrix(DMatrix::from_vec(n, n, v))?;
            DensityMatrix::with_tolerance(m, StateTolerance::PROPAGATED)
        })
        .collect()
}

/// Purity `tr ρ_t²` sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityTrajectory {
    times: Vec<f64>,
    purities: Vec<f64>,
}

impl PurityTrajectory {
    pub fn new(times: Vec<f64>, purities: Vec<f64>) -> Result<Self> {
        if times.len() != purities.len() || times.is_empty() {
            return Err(Error::Dimension(format!(
                "{} times for {} purities",
                times.len(),
                purities.len()
            )));
        }
        Ok(Self { times, purities })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn purities(&self) -> &[f64] {
        &self.purities
    }

    pub fn initial(&self) -> f64 {
        self.purities[0]
    }
}

pub fn purity_trajectory(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<PurityTrajectory> {
    let states = propagate(model, rho0, t_grid, rel_tol)?;
    let mut purities: Vec<f64> = states.iter().map(DensityMatrix::purity).collect();
    purities[0] = rho0.purity();
    PurityTrajectory::new(t_grid.to_vec(), purities)
}

/// Pointwise arithmetic mean of trajectories sharing one time grid, summed
/// in slice order.
pub fn ensemble_mean(trajectories: &[PurityTrajectory]) -> Result<PurityTrajectory> {
    let Some(first) = trajectories.first() else {
        return Err(Error::Parameter("no trajectories to average".into()));
    };
    if trajectories.iter().any(|t| t.times != first.times) {
        return Err(Error::Parameter("trajectories use different time grids".into()));
    }
    let count = trajectories.len() as f64;
    let purities = (0..first.times.len())
        .map(|k| trajectories.iter().map(|t| t.purities[k]).sum::<f64>() / count)
        .collect();
    PurityTrajectory::new(first.times.clone(), purities)
}

/// `(P₀ − P_∞)·exp(−⟨D_L⟩·t) + P_∞`.
pub fn ansatz_purity(p0: f64, p_inf: f64, d_l: f64, t: f64) -> f64 {
    (p0 - p_inf) * (-d_l * t).exp() + p_inf
}

/// Deviation of a trajectory from the exponential ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub max_relative_deviation: f64,
    /// `traj − ansatz` at each grid time.
    pub residuals: Vec<f64>,
    pub relative_deviations: Vec<f64>,
}

/// Compares `traj` with the ansatz evaluated at the given rate `d_l`.
pub fn fit_purity_ansatz(traj: &PurityTrajectory, p0: f64, p_inf: f64, d_l: f64) -> Result<FitReport> {
    if !(d_l > 0.0) {
        return Err(Error::Parameter(format!("decay rate must be positive, got {d_l}")));
    }
    let mut residuals = Vec::with_capacity(traj.times.len());
    let mut relative = Vec::with_capacity(traj.times.len());
    for (&t, &p) in traj.times.iter().zip(&traj.purities) {
        let fit = ansatz_purity(p0, p_inf, d_l, t);
        residuals.push(p - fit);
        relative.push((p - fit).abs() / fit.abs());
    }
    let max_relative_deviation = relative.iter().copied().fold(0.0, f64::max);
    Ok(FitReport {
        max_relative_deviation,
        residuals,
        relative_deviations: relative,
    })
}

/// Rate estimated from the purity after one short step:
/// `(P₀ − P(δt)) / (P₀·δt)`.
pub fn short_time_rate(model: &LindbladModel, rho0: &DensityMatrix, dt: f64, rel_tol: f64) -> Result<f64> {
    let traj = purity_trajectory(model, rho0, &[0.0, dt], rel_tol)?;
    let p0 = traj.purities[0];
    Ok((p0 - traj.purities[1]) / (p0 * dt))
}

/// Spacing of a time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Zero followed by logarithmically spaced points from `t_max/1000`.
    Log,
}

pub fn time_grid(t_max: f64, n_points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || n_points < 2 {
        return Err(Error::Parameter(format!(
            "time grid needs t_max > 0 and at least two points (got {t_max}, {n_points})"
        )));
    }
    let last = (n_points - 1) as f64;
    let grid = match spacing {
        Spacing::Linear => (0..n_points).map(|k| t_max * k as f64 / last).collect(),
        Spacing::Log => {
            let start = (t_max / 1000.0).ln();
            let stop = t_max.ln();
            let steps = (n_points - 2).max(1) as f64;
            std::iter::once(0.0)
                .chain((0..n_points - 1).map(|k| {
                    if k == n_points - 2 {
                        t_max
                    } else {
                        (start + (stop - start) * k as f64 / steps).exp()
                    }
                }))
                .collect()
        }
    };
    Ok(grid)
}
