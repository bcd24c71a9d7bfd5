//! Brute-force evolution of the two-body state under the exchange Hamiltonian
//! `H = w_c n_c + w_h n_h + g (a_c^dag a_h + a_c a_h^dag)` on a truncated
//! product basis `|n_c> (x) |n_h>`, with hard cutoffs `a^dag |N-1> = 0`.
//!
//! Small spaces are evolved through a dense Hermitian eigendecomposition.
//! Large truncations are evolved one excitation sector at a time: `H`
//! conserves `n_c + n_h`, so each sector is a real symmetric tridiagonal block.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::collision::{CollisionOutcome, HeisenbergForm};
use crate::error::{require_non_negative, require_positive, QtmError, Result};
use crate::machine::MachineConfig;
use crate::system::{oscillator_tail_mass, thermal_populations, SystemKind};

type C64 = Complex<f64>;

pub const DEFAULT_LEVEL_COUNT: usize = 60;
pub const DEFAULT_TAIL_MASS_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_DIMENSION: usize = 1 << 16;
/// Largest product dimension evolved densely by `oracle_collision`. Larger
/// spaces go through the sector path, which is exact as well and much cheaper
/// once an oscillator is truncated.
pub const DENSE_DIMENSION_LIMIT: usize = 64;

const HERMITICITY_TOLERANCE: f64 = 1e-12;
const REALITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    level_count: usize,
    tail_mass_tolerance: f64,
    max_dimension: usize,
}

impl TruncationPolicy {
    pub fn new(level_count: usize, tail_mass_tolerance: f64) -> Result<Self> {
        if level_count < 2 {
            return Err(QtmError::Domain {
                name: "level_count",
                value: level_count as f64,
                requirement: "an oscillator truncation needs at least 2 levels",
            });
        }
        require_positive("tail_mass_tolerance", tail_mass_tolerance)?;
        Ok(TruncationPolicy {
            level_count,
            tail_mass_tolerance,
            max_dimension: DEFAULT_MAX_DIMENSION,
        })
    }

    pub fn with_max_dimension(mut self, max_dimension: usize) -> Self {
        self.max_dimension = max_dimension;
        self
    }

    pub fn level_count(&self) -> usize {
        self.level_count
    }

    pub fn tail_mass_tolerance(&self) -> f64 {
        self.tail_mass_tolerance
    }

    pub fn max_dimension(&self) -> usize {
        self.max_dimension
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            level_count: DEFAULT_LEVEL_COUNT,
            tail_mass_tolerance: DEFAULT_TAIL_MASS_TOLERANCE,
            max_dimension: DEFAULT_MAX_DIMENSION,
        }
    }
}

/// Truncated product space of a cold and a hot system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSpace {
    kind_c: SystemKind,
    kind_h: SystemKind,
    levels_c: usize,
    levels_h: usize,
}

impl PairSpace {
    pub fn new(kind_c: SystemKind, kind_h: SystemKind, levels_c: usize, levels_h: usize) -> Result<Self> {
        check_levels(kind_c, levels_c)?;
        check_levels(kind_h, levels_h)?;
        Ok(PairSpace {
            kind_c,
            kind_h,
            levels_c,
            levels_h,
        })
    }

    /// Qubits get 2 levels, finite systems their own count, oscillators the policy's.
    pub fn for_policy(kind_c: SystemKind, kind_h: SystemKind, policy: &TruncationPolicy) -> Result<Self> {
        let levels = |kind: SystemKind| kind.level_count().unwrap_or(policy.level_count);
        Self::new(kind_c, kind_h, levels(kind_c), levels(kind_h))
    }

    pub fn kind_c(&self) -> SystemKind {
        self.kind_c
    }

    pub fn kind_h(&self) -> SystemKind {
        self.kind_h
    }

    pub fn levels_c(&self) -> usize {
        self.levels_c
    }

    pub fn levels_h(&self) -> usize {
        self.levels_h
    }

    pub fn dimension(&self) -> usize {
        self.levels_c * self.levels_h
    }

    /// Product-basis index of `|n_c> (x) |n_h>`.
    pub fn index(&self, n_c: usize, n_h: usize) -> usize {
        n_c * self.levels_h + n_h
    }

    pub fn has_oscillator(&self) -> bool {
        self.kind_c == SystemKind::Oscillator || self.kind_h == SystemKind::Oscillator
    }

    /// Same space with every oscillator truncation doubled.
    pub fn doubled(&self) -> Self {
        let double = |kind, n: usize| if kind == SystemKind::Oscillator { 2 * n } else { n };
        PairSpace {
            levels_c: double(self.kind_c, self.levels_c),
            levels_h: double(self.kind_h, self.levels_h),
            ..*self
        }
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.dimension() > cap {
            return Err(QtmError::Resource {
                dimension: self.dimension(),
                cap,
            });
        }
        Ok(())
    }

    /// Product basis states as (n_c, n_h), in index order.
    fn states(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.levels_c).flat_map(move |c| (0..self.levels_h).map(move |h| (c, h)))
    }
}

fn check_levels(kind: SystemKind, levels: usize) -> Result<()> {
    let ok = match kind.level_count() {
        Some(n) => n == levels,
        None => levels >= 2,
    };
    if ok {
        Ok(())
    } else {
        Err(QtmError::Domain {
            name: "level count",
            value: levels as f64,
            requirement: "qubits need 2 levels, finite systems their own count, oscillators at least 2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Cold,
    Hot,
}

/// Square complex matrix over the product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QtmError::Numerical(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseOperator { matrix })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let diag = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        DenseOperator {
            matrix: DMatrix::from_diagonal(&diag),
        }
    }

    pub fn number_operator(space: &PairSpace, side: Side) -> Self {
        let values: Vec<f64> = space
            .states()
            .map(|(c, h)| match side {
                Side::Cold => c as f64,
                Side::Hot => h as f64,
            })
            .collect();
        Self::diagonal(&values)
    }

    /// Truncated Gibbs product state (normalized on the truncated space).
    pub fn thermal_product_state(
        space: &PairSpace,
        omega_c: f64,
        omega_h: f64,
        t_c: f64,
        t_h: f64,
    ) -> Result<Self> {
        let p = product_populations(
            &thermal_populations(space.levels_c, omega_c, t_c)?,
            &thermal_populations(space.levels_h, omega_h, t_h)?,
        );
        Ok(Self::diagonal(&p))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest |M_ij - conj(M_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol * (1.0 + self.max_abs())
    }

    /// Hermitian, unit trace and positive semidefinite, each to `tol`.
    pub fn is_density_matrix(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) || (self.trace() - C64::new(1.0, 0.0)).norm() > tol {
            return false;
        }
        SymmetricEigen::try_new(self.matrix.clone(), f64::EPSILON, 0)
            .map(|e| e.eigenvalues.iter().all(|&l| l >= -tol))
            .unwrap_or(false)
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &DenseOperator) -> f64 {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).norm()
    }

    fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

fn product_populations(p_c: &[f64], p_h: &[f64]) -> Vec<f64> {
    p_c.iter()
        .flat_map(|&a| p_h.iter().map(move |&b| a * b))
        .collect()
}

/// Matrix element of `a_c^dag a_h` from `(n_c, n_h)` to `(n_c + 1, n_h - 1)`, if allowed.
fn hop(space: &PairSpace, n_c: usize, n_h: usize) -> Option<(usize, f64)> {
    if n_h == 0 || n_c + 1 >= space.levels_c {
        return None;
    }
    let amplitude = ((n_c + 1) as f64).sqrt() * (n_h as f64).sqrt();
    Some((space.index(n_c + 1, n_h - 1), amplitude))
}

pub fn build_total_hamiltonian(
    space: &PairSpace,
    omega_c: f64,
    omega_h: f64,
    g: f64,
    cap: usize,
) -> Result<DenseOperator> {
    space.check_cap(cap)?;
    let n = space.dimension();
    let mut h = DMatrix::<C64>::zeros(n, n);
    for (c, hot) in space.states() {
        let i = space.index(c, hot);
        h[(i, i)] = C64::new(omega_c * c as f64 + omega_h * hot as f64, 0.0);
        if let Some((j, amp)) = hop(space, c, hot) {
            h[(i, j)] = C64::new(g * amp, 0.0);
            h[(j, i)] = C64::new(g * amp, 0.0);
        }
    }
    Ok(DenseOperator { matrix: h })
}

/// `(A_+, A_-)` with `A_+ = a_h a_c^dag + a_h^dag a_c` and `A_- = a_h a_c^dag - a_h^dag a_c`.
pub fn exchange_operators(space: &PairSpace) -> (DenseOperator, DenseOperator) {
    let n = space.dimension();
    let mut plus = DMatrix::<C64>::zeros(n, n);
    let mut minus = DMatrix::<C64>::zeros(n, n);
    for (c, hot) in space.states() {
        let i = space.index(c, hot);
        if let Some((j, amp)) = hop(space, c, hot) {
            plus[(j, i)] += amp;
            plus[(i, j)] += amp;
            minus[(j, i)] += amp;
            minus[(i, j)] -= amp;
        }
    }
    (DenseOperator { matrix: plus }, DenseOperator { matrix: minus })
}

/// Eigendecomposition of a Hermitian Hamiltonian, reusable across times.
#[derive(Debug, Clone)]
pub struct DenseEvolution {
    eigenvalues: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl DenseEvolution {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        if !h.is_hermitian(HERMITICITY_TOLERANCE) {
            return Err(QtmError::Numerical(format!(
                "Hamiltonian is not Hermitian: deviation {:e}",
                h.hermiticity_error()
            )));
        }
        let n = h.dimension();
        let eig = SymmetricEigen::try_new(h.matrix.clone(), f64::EPSILON, 1000 * n.max(1))
            .ok_or_else(|| {
                QtmError::Numerical(format!(
                    "eigendecomposition failed to converge: dimension {n}, Frobenius norm {:e}",
                    h.matrix.norm()
                ))
            })?;
        Ok(DenseEvolution {
            eigenvalues: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Conjugates `op` into the energy basis, applies `exp(i sign (l_a - l_b) tau)`, and back.
    fn rotate(&self, op: &DMatrix<C64>, tau: f64, sign: f64) -> DMatrix<C64> {
        let v = &self.vectors;
        let mut inner = v.adjoint() * op * v;
        let l = &self.eigenvalues;
        for a in 0..inner.nrows() {
            for b in 0..inner.ncols() {
                let phase = sign * (l[a] - l[b]) * tau;
                inner[(a, b)] *= C64::new(phase.cos(), phase.sin());
            }
        }
        v * inner * v.adjoint()
    }

    /// `rho(tau) = exp(-i H tau) rho0 exp(i H tau)`.
    pub fn evolve(&self, rho0: &DenseOperator, tau: f64) -> DenseOperator {
        DenseOperator {
            matrix: self.rotate(&rho0.matrix, tau, -1.0),
        }
    }

    /// Heisenberg-picture operator `exp(i H tau) O exp(-i H tau)`.
    pub fn heisenberg(&self, observable: &DenseOperator, tau: f64) -> DenseOperator {
        DenseOperator {
            matrix: self.rotate(&observable.matrix, tau, 1.0),
        }
    }

    pub fn expectation(&self, rho0: &DenseOperator, tau: f64, observable: &DenseOperator) -> Result<f64> {
        let rho = self.evolve(rho0, tau);
        let value = (&observable.matrix * &rho.matrix).trace();
        if value.im.abs() > REALITY_TOLERANCE * (1.0 + value.re.abs()) {
            return Err(QtmError::Numerical(format!(
                "expectation value has imaginary part {:e}",
                value.im
            )));
        }
        Ok(value.re)
    }
}

/// `Tr[O exp(-i H tau) rho0 exp(i H tau)]` through a Hermitian eigendecomposition.
pub fn evolve_mean_occupation(
    h: &DenseOperator,
    rho0: &DenseOperator,
    tau: f64,
    observable: &DenseOperator,
) -> Result<f64> {
    require_non_negative("tau", tau)?;
    let n = h.dimension();
    if rho0.dimension() != n || observable.dimension() != n {
        return Err(QtmError::Numerical(format!(
            "dimension mismatch: H {n}, rho0 {}, observable {}",
            rho0.dimension(),
            observable.dimension()
        )));
    }
    if !rho0.is_density_matrix(1e-10) {
        return Err(QtmError::Domain {
            name: "rho0 trace",
            value: rho0.trace().re,
            requirement: "initial state must be a density matrix",
        });
    }
    DenseEvolution::new(h)?.expectation(rho0, tau, observable)
}

struct SectorBlock {
    states: Vec<usize>,
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// Per-sector eigendecomposition for the evolution of number-diagonal states.
pub struct SectorEvolution {
    space: PairSpace,
    blocks: Vec<SectorBlock>,
}

impl SectorEvolution {
    pub fn new(space: &PairSpace, omega_c: f64, omega_h: f64, g: f64, cap: usize) -> Result<Self> {
        space.check_cap(cap)?;
        let (nc, nh) = (space.levels_c, space.levels_h);
        let mut blocks = Vec::with_capacity(nc + nh - 1);
        for total in 0..(nc + nh - 1) {
            let c_lo = total.saturating_sub(nh - 1);
            let c_hi = total.min(nc - 1);
            let m = c_hi - c_lo + 1;
            let mut block = DMatrix::<f64>::zeros(m, m);
            let mut states = Vec::with_capacity(m);
            for (a, c) in (c_lo..=c_hi).enumerate() {
                let hot = total - c;
                states.push(space.index(c, hot));
                block[(a, a)] = omega_c * c as f64 + omega_h * hot as f64;
                if a + 1 < m {
                    let amp = g * ((c + 1) as f64).sqrt() * (hot as f64).sqrt();
                    block[(a, a + 1)] = amp;
                    block[(a + 1, a)] = amp;
                }
            }
            let eig = SymmetricEigen::try_new(block, f64::EPSILON, 1000 * m).ok_or_else(|| {
                QtmError::Numerical(format!(
                    "sector {total} eigendecomposition failed (size {m})"
                ))
            })?;
            blocks.push(SectorBlock {
                states,
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            });
        }
        Ok(SectorEvolution {
            space: *space,
            blocks,
        })
    }

    pub fn space(&self) -> &PairSpace {
        &self.space
    }

    /// Diagonal of `rho(tau)` for a number-diagonal `rho0` with the given populations.
    pub fn evolve_populations(&self, populations: &[f64], tau: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.space.dimension()];
        for block in &self.blocks {
            let m = block.states.len();
            if m == 1 {
                out[block.states[0]] += populations[block.states[0]];
                continue;
            }
            let mean = block.eigenvalues.iter().sum::<f64>() / m as f64;
            let u = &block.vectors;
            let mut uc = u.clone();
            let mut us = u.clone();
            for (j, &l) in block.eigenvalues.iter().enumerate() {
                let (s, c) = ((l - mean) * tau).sin_cos();
                uc.column_mut(j).scale_mut(c);
                us.column_mut(j).scale_mut(s);
            }
            let re = &uc * u.transpose();
            let im = &us * u.transpose();
            for (a, &ia) in block.states.iter().enumerate() {
                let mut total = 0.0;
                for (b, &ib) in block.states.iter().enumerate() {
                    let p = populations[ib];
                    if p != 0.0 {
                        total += p * (re[(a, b)].powi(2) + im[(a, b)].powi(2));
                    }
                }
                out[ia] += total;
            }
        }
        out
    }
}

/// Joint and marginal populations after one collision from a number-diagonal product state.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPopulations {
    pub joint: Vec<f64>,
    pub marginal_c: Vec<f64>,
    pub marginal_h: Vec<f64>,
}

impl PairPopulations {
    pub fn mean_c(&self) -> f64 {
        mean_level(&self.marginal_c)
    }

    pub fn mean_h(&self) -> f64 {
        mean_level(&self.marginal_h)
    }
}

fn mean_level(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(n, w)| n as f64 * w).sum()
}

/// Evolves `diag(p_c) (x) diag(p_h)` for `tau` and returns the resulting populations.
pub fn evolve_product_populations(
    evolution: &SectorEvolution,
    p_c: &[f64],
    p_h: &[f64],
    tau: f64,
) -> Result<PairPopulations> {
    require_non_negative("tau", tau)?;
    let space = evolution.space();
    if p_c.len() != space.levels_c || p_h.len() != space.levels_h {
        return Err(QtmError::Numerical(format!(
            "population lengths ({}, {}) do not match the space ({}, {})",
            p_c.len(),
            p_h.len(),
            space.levels_c,
            space.levels_h
        )));
    }
    let joint = evolution.evolve_populations(&product_populations(p_c, p_h), tau);
    let mut marginal_c = vec![0.0; space.levels_c];
    let mut marginal_h = vec![0.0; space.levels_h];
    for (c, h) in space.states() {
        let w = joint[space.index(c, h)];
        marginal_c[c] += w;
        marginal_h[h] += w;
    }
    Ok(PairPopulations {
        joint,
        marginal_c,
        marginal_h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    /// No oscillator involved; the finite model is evolved exactly.
    Exact,
    /// Oscillator truncation converged under doubling and tail-mass tests.
    Certified,
    /// Oscillator truncation failed a convergence test; values must not be consumed.
    Unconverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Dense,
    Sector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    /// Energetics from the truncated thermal and evolved occupations.
    /// `outcome.a` is the effective coefficient (n_h_post - n_c_th)/(n_h_th - n_c_th).
    pub outcome: CollisionOutcome,
    pub status: OracleStatus,
    pub method: OracleMethod,
    pub levels: (usize, usize),
    /// Largest thermal population an oscillator side keeps above its truncation.
    pub tail_mass: f64,
    /// |<n_h>_tau(2N) - <n_h>_tau(N)| for oscillator sides.
    pub doubling_change: Option<f64>,
    /// Change of <n_c + n_h> over the collision.
    pub excitation_drift: f64,
}

impl OracleReport {
    pub fn is_certified(&self) -> bool {
        self.status != OracleStatus::Unconverged
    }

    pub fn certified_outcome(&self) -> Result<CollisionOutcome> {
        if self.is_certified() {
            Ok(self.outcome)
        } else {
            Err(QtmError::Unconverged(format!(
                "levels {:?}: tail mass {:e}, doubling change {:e}",
                self.levels,
                self.tail_mass,
                self.doubling_change.unwrap_or(f64::NAN)
            )))
        }
    }
}

struct PairRun {
    n_c_th: f64,
    n_h_th: f64,
    n_c_post: f64,
    n_h_post: f64,
    method: OracleMethod,
}

fn run_pair(space: &PairSpace, config: &MachineConfig, tau: f64, cap: usize) -> Result<PairRun> {
    let (wc, wh) = (config.omega_c(), config.omega_h());
    let p_c = thermal_populations(space.levels_c, wc, config.t_c())?;
    let p_h = thermal_populations(space.levels_h, wh, config.t_h())?;
    let (n_c_th, n_h_th) = (mean_level(&p_c), mean_level(&p_h));
    if space.dimension() <= DENSE_DIMENSION_LIMIT {
        let h = build_total_hamiltonian(space, wc, wh, config.g(), cap)?;
        let rho0 = DenseOperator::diagonal(&product_populations(&p_c, &p_h));
        let evolution = DenseEvolution::new(&h)?;
        let n_c_post = evolution.expectation(&rho0, tau, &DenseOperator::number_operator(space, Side::Cold))?;
        let n_h_post = evolution.expectation(&rho0, tau, &DenseOperator::number_operator(space, Side::Hot))?;
        Ok(PairRun {
            n_c_th,
            n_h_th,
            n_c_post,
            n_h_post,
            method: OracleMethod::Dense,
        })
    } else {
        let evolution = SectorEvolution::new(space, wc, wh, config.g(), cap)?;
        let after = evolve_product_populations(&evolution, &p_c, &p_h, tau)?;
        Ok(PairRun {
            n_c_th,
            n_h_th,
            n_c_post: after.mean_c(),
            n_h_post: after.mean_h(),
            method: OracleMethod::Sector,
        })
    }
}

/// One collision evolved exactly from the (truncated) thermal product state.
pub fn oracle_collision(config: &MachineConfig, tau: f64, policy: &TruncationPolicy) -> Result<OracleReport> {
    require_non_negative("tau", tau)?;
    config.check_stability()?;
    let space = PairSpace::for_policy(config.kind_c(), config.kind_h(), policy)?;
    let run = run_pair(&space, config, tau, policy.max_dimension)?;

    let (mut status, mut tail_mass, mut doubling_change) = (OracleStatus::Exact, 0.0, None);
    if space.has_oscillator() {
        let tail = |kind, levels, omega, t| {
            if kind == SystemKind::Oscillator {
                oscillator_tail_mass(levels, omega, t)
            } else {
                Ok(0.0)
            }
        };
        tail_mass = tail(space.kind_c, space.levels_c, config.omega_c(), config.t_c())?
            .max(tail(space.kind_h, space.levels_h, config.omega_h(), config.t_h())?);
        let refined = run_pair(&space.doubled(), config, tau, policy.max_dimension)?;
        let change = (refined.n_h_post - run.n_h_post).abs();
        doubling_change = Some(change);
        status = if change < policy.tail_mass_tolerance && tail_mass < policy.tail_mass_tolerance {
            OracleStatus::Certified
        } else {
            OracleStatus::Unconverged
        };
    }

    let imbalance = run.n_h_th - run.n_c_th;
    let a = if imbalance != 0.0 {
        (run.n_h_post - run.n_c_th) / imbalance
    } else {
        f64::NAN
    };
    let mut outcome = CollisionOutcome::from_transfer(
        config.omega_c(),
        config.omega_h(),
        run.n_c_th,
        run.n_h_th,
        run.n_h_th - run.n_h_post,
        a,
    );
    outcome.n_c_post = run.n_c_post;
    Ok(OracleReport {
        outcome,
        status,
        method: run.method,
        levels: (space.levels_c, space.levels_h),
        tail_mass,
        doubling_change,
        excitation_drift: (run.n_c_post + run.n_h_post) - (run.n_c_th + run.n_h_th),
    })
}

/// Heisenberg coefficients read off the numerically evolved `n_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalHeisenberg {
    pub form: HeisenbergForm,
    /// Real part of `f_-`; zero up to rounding.
    pub f_minus_re: f64,
    /// Largest deviation of `U^dag n_h U` from the four-operator form on
    /// sectors below the truncation edge.
    pub identity_residual: f64,
}

pub fn heisenberg_coefficients(
    space: &PairSpace,
    omega_c: f64,
    omega_h: f64,
    g: f64,
    tau: f64,
) -> Result<NumericalHeisenberg> {
    require_non_negative("tau", tau)?;
    let h = build_total_hamiltonian(space, omega_c, omega_h, g, DEFAULT_MAX_DIMENSION)?;
    let evolution = DenseEvolution::new(&h)?;
    let n_h = DenseOperator::number_operator(space, Side::Hot);
    let n_c = DenseOperator::number_operator(space, Side::Cold);
    let x = evolution.heisenberg(&n_h, tau).matrix;

    let (e1, e2) = (space.index(0, 1), space.index(1, 0));
    let sum = x[(e2, e1)];
    let diff = x[(e1, e2)];
    let f_plus = 0.5 * (sum + diff);
    let f_minus = 0.5 * (sum - diff);
    let form = HeisenbergForm {
        f_h: x[(e1, e1)].re,
        f_c: x[(e2, e2)].re,
        f_plus: f_plus.re,
        f_minus_im: f_minus.im,
    };

    let (a_plus, a_minus) = exchange_operators(space);
    let model = n_h.matrix.map(|z| z * form.f_h)
        + n_c.matrix.map(|z| z * form.f_c)
        + a_plus.matrix.map(|z| z * f_plus)
        + a_minus.matrix.map(|z| z * f_minus);
    let edge = space.levels_c.min(space.levels_h) - 1;
    let inside: Vec<usize> = space
        .states()
        .filter(|&(c, h)| c + h <= edge)
        .map(|(c, h)| space.index(c, h))
        .collect();
    let mut residual = 0.0f64;
    for &i in &inside {
        for &j in &inside {
            residual = residual.max((x[(i, j)] - model[(i, j)]).norm());
        }
    }
    Ok(NumericalHeisenberg {
        form,
        f_minus_re: f_minus.re,
        identity_residual: residual,
    })
}
