//! Degenerate-elliptic extension of a boundary datum to the half-space,
//! computed per frequency either from the exact profile θ or by a
//! finite-volume two-point solve on a graded mesh in y.

use alloc::format;
use alloc::vec::Vec;

use libm::{pow, sqrt};
use num_complex::Complex64;

use crate::error::{domain, numerical, Error, Result};
use crate::grid::{inverse_transform, norm_slots, transform, GridField, GridSpec, SpectrumField};
use crate::specfun::{check_order, theta_profile};

/// Nodes y_j = Y (j/M)^q, j = 0..M.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    height: f64,
    exponent: f64,
    nodes: Vec<f64>,
}

impl GradedMesh {
    pub fn new(height: f64, count: usize, exponent: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::Config(format!("mesh height must be positive, got {height}")));
        }
        if count < 2 {
            return Err(Error::Config(format!("mesh needs at least 2 intervals, got {count}")));
        }
        if !(exponent >= 1.0) {
            return Err(Error::Config(format!("grading exponent must be >= 1, got {exponent}")));
        }
        let nodes = (0..=count)
            .map(|j| height * pow(j as f64 / count as f64, exponent))
            .collect();
        Ok(Self { height, exponent, nodes })
    }

    /// Y = 10/m, q = max(2, 1/s).
    pub fn for_problem(m: f64, s: f64, count: usize) -> Result<Self> {
        check_order("graded_mesh", s)?;
        if !(m > 0.0) {
            return Err(domain("graded_mesh", format!("mass m = {m}")));
        }
        Self::new(10.0 / m, count, (1.0 / s).max(2.0))
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Number of intervals M.
    pub fn count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Flux coefficients 1/∫_{y_j}^{y_{j+1}} t^{2s−1} dt, exact for profiles
    /// with constant weighted flux on each cell.
    fn fluxes(&self, s: f64) -> Vec<f64> {
        let e = 2.0 * s;
        self.nodes
            .windows(2)
            .map(|w| e / (pow(w[1], e) - pow(w[0], e)))
            .collect()
    }

    /// Dual-cell masses ∫ t^{1−2s} dt over [y_{j−½}, y_{j+½}] ∩ [0, Y].
    fn masses(&self, s: f64) -> Vec<f64> {
        let e = 2.0 - 2.0 * s;
        let y = &self.nodes;
        let mid = |j: usize| 0.5 * (y[j] + y[j + 1]);
        let m = self.count();
        (0..=m)
            .map(|j| {
                let lo = if j == 0 { 0.0 } else { mid(j - 1) };
                let hi = if j == m { y[m] } else { mid(j) };
                (pow(hi, e) - pow(lo, e)) / e
            })
            .collect()
    }
}

/// Slices of an extension U(·, y_j) on a common base grid.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    base: GridSpec,
    mesh: GradedMesh,
    slices: Vec<GridField>,
    m: f64,
    s: f64,
}

impl ExtensionField {
    pub fn new(mesh: GradedMesh, slices: Vec<GridField>, m: f64, s: f64) -> Result<Self> {
        check_order("extension_field", s)?;
        if slices.len() != mesh.nodes().len() {
            return Err(Error::Shape(format!(
                "{} slices for {} mesh nodes",
                slices.len(),
                mesh.nodes().len()
            )));
        }
        let base = *slices[0].spec();
        for sl in &slices[1..] {
            base.check_same(sl.spec(), "extension_field")?;
        }
        Ok(Self { base, mesh, slices, m, s })
    }

    pub fn base(&self) -> &GridSpec {
        &self.base
    }

    pub fn mesh(&self) -> &GradedMesh {
        &self.mesh
    }

    pub fn slices(&self) -> &[GridField] {
        &self.slices
    }

    pub fn slice(&self, j: usize) -> &GridField {
        &self.slices[j]
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// Same mesh and parameters, new slices.
    pub fn with_slices(&self, slices: Vec<GridField>) -> Result<Self> {
        Self::new(self.mesh.clone(), slices, self.m, self.s)
    }
}

fn check_inputs(op: &'static str, m: f64, s: f64) -> Result<()> {
    check_order(op, s)?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(domain(op, format!("mass m = {m}")));
    }
    Ok(())
}

/// Builds slices from per-norm profiles: profiles[slot][j] multiplies û.
fn assemble(u: &GridField, mesh: &GradedMesh, slot: &[u32], profiles: &[Vec<f64>], m: f64, s: f64) -> Result<ExtensionField> {
    let spec = *u.spec();
    let hat = transform(u);
    let mut slices = Vec::with_capacity(mesh.nodes().len());
    slices.push(u.clone());
    for j in 1..mesh.nodes().len() {
        let coeffs: Vec<Complex64> = hat
            .coefficients()
            .iter()
            .zip(slot)
            .map(|(c, &k)| c * profiles[k as usize][j])
            .collect();
        slices.push(inverse_transform(&SpectrumField::new(spec, coeffs)?));
    }
    ExtensionField::new(mesh.clone(), slices, m, s)
}

fn norm_scale(spec: &GridSpec) -> f64 {
    let w = core::f64::consts::PI / spec.half_width();
    w * w
}

/// Û(k, y) = û(k) θ(y √(|k|² + m²)).
pub fn extend_spectral(u: &GridField, m: f64, s: f64, mesh: &GradedMesh) -> Result<ExtensionField> {
    check_inputs("extend_spectral", m, s)?;
    let spec = *u.spec();
    let (slot, norms) = norm_slots(&spec);
    let scale = norm_scale(&spec);
    let profiles = norms
        .iter()
        .map(|&q| {
            let root = sqrt(scale * q as f64 + m * m);
            mesh.nodes().iter().map(|&y| theta_profile(s, y * root)).collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    assemble(u, mesh, &slot, &profiles, m, s)
}

/// Finite-volume solution of −(y^{1−2s}φ')' + λ y^{1−2s}φ = 0 with φ(0) = 1
/// and φ(Y) = 0.
pub fn solve_profile(lambda: f64, s: f64, mesh: &GradedMesh) -> Result<Vec<f64>> {
    check_order("solve_profile", s)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain("solve_profile", format!("lambda = {lambda}")));
    }
    let a = mesh.fluxes(s);
    let b = mesh.masses(s);
    let m = mesh.count();
    // unknowns φ_1..φ_{M−1}; row j: −a_{j−1}φ_{j−1} + (a_{j−1}+a_j+λb_j)φ_j − a_jφ_{j+1} = 0
    let n = m - 1;
    let mut diag: Vec<f64> = (1..m).map(|j| a[j - 1] + a[j] + lambda * b[j]).collect();
    let mut rhs = alloc::vec![0.0; n];
    rhs[0] = a[0];
    // Thomas sweep; the system is symmetric and diagonally dominant
    for i in 1..n {
        let off = a[i];
        if !(diag[i - 1] > 0.0) {
            return Err(numerical("solve_profile", format!("zero pivot at node {i} for lambda = {lambda}")));
        }
        let f = off / diag[i - 1];
        diag[i] -= f * off;
        rhs[i] += f * rhs[i - 1];
    }
    let mut phi = alloc::vec![0.0; m + 1];
    phi[0] = 1.0;
    let mut next = 0.0;
    for i in (0..n).rev() {
        let v = (rhs[i] + a[i + 1] * next) / diag[i];
        if !v.is_finite() {
            return Err(numerical("solve_profile", format!("non-finite profile at node {} for lambda = {lambda}", i + 1)));
        }
        phi[i + 1] = v;
        next = v;
    }
    Ok(phi)
}

/// Per-frequency finite-volume extension.
pub fn extend_ode(u: &GridField, m: f64, s: f64, mesh: &GradedMesh) -> Result<ExtensionField> {
    check_inputs("extend_ode", m, s)?;
    if mesh.count() < 64 {
        return Err(Error::Config(format!("extend_ode needs at least 64 mesh intervals, got {}", mesh.count())));
    }
    let spec = *u.spec();
    let (slot, norms) = norm_slots(&spec);
    let scale = norm_scale(&spec);
    let profiles = norms
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            solve_profile(scale * q as f64 + m * m, s, mesh).map_err(|e| match e {
                Error::Numerical { op, detail } => Error::Numerical {
                    op,
                    detail: format!("{detail} (frequency slot {i}, folded norm {q})"),
                },
                other => other,
            })
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    assemble(u, mesh, &slot, &profiles, m, s)
}

/// Nodes used by the boundary fit.
pub const TRACE_FIT_NODES: usize = 6;

/// Least-squares weights w_j with A = Σ w_j U(y_j) for U ≈ c + A y^{2s} on
/// the first positive nodes.
fn trace_weights(nodes: &[f64], s: f64) -> Result<Vec<f64>> {
    let t: Vec<f64> = nodes.iter().map(|&y| pow(y, 2.0 * s)).collect();
    let n = t.len() as f64;
    let st: f64 = t.iter().sum();
    let stt: f64 = t.iter().map(|v| v * v).sum();
    let det = n * stt - st * st;
    if !(det > 1e-12 * n * stt) {
        return Err(numerical("trace_derivative", format!("ill-conditioned boundary fit (det = {det:e})")));
    }
    Ok(t.iter().map(|&ti| (n * ti - st) / det).collect())
}

/// −lim y^{1−2s} ∂_y U, from the fit U ≈ c + A y^{2s}: returns −2sA.
pub fn trace_derivative(field: &ExtensionField, s: f64) -> Result<GridField> {
    check_order("trace_derivative", s)?;
    let nodes = field.mesh().nodes();
    if nodes.len() < TRACE_FIT_NODES + 1 {
        return Err(numerical("trace_derivative", "mesh has fewer nodes than the boundary fit"));
    }
    let spec = field.base();
    let kmax = core::f64::consts::PI / spec.spacing();
    let top = sqrt(field.mass() * field.mass() + spec.dim() as f64 * kmax * kmax);
    let resolved = nodes[1..].iter().filter(|&&y| y * top < 0.1).count();
    if resolved < 8 {
        return Err(numerical(
            "trace_derivative",
            format!("only {resolved} mesh nodes resolve the boundary layer; 8 are needed"),
        ));
    }
    let w = trace_weights(&nodes[1..=TRACE_FIT_NODES], s)?;
    let mut out = GridField::zeros(*spec);
    for (wj, sl) in w.iter().zip(&field.slices()[1..]) {
        out.add_scaled(-2.0 * s * wj, sl);
    }
    Ok(out)
}

/// Discrete weighted energy (Σ_k over modes of the finite-volume form
/// Σ a_j |ΔÛ|² + (|k|²+m²) Σ b_j |Û_j|²)^{1/2}, with the same h^N n^{−N}
/// Plancherel weight as the H^s norm.
pub fn xs_norm(field: &ExtensionField, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(domain("xs_norm", format!("mass m = {m}")));
    }
    let s = field.order();
    let spec = field.base();
    let mesh = field.mesh();
    let a = mesh.fluxes(s);
    let b = mesh.masses(s);
    let k2: Vec<f64> = (0..spec.len()).map(|i| spec.k_squared(i) + m * m).collect();
    let hats: Vec<SpectrumField> = field.slices().iter().map(transform).collect();
    let mut energy = 0.0;
    for (j, hat) in hats.iter().enumerate() {
        let c = hat.coefficients();
        energy += b[j] * c.iter().zip(&k2).map(|(z, l)| l * z.norm_sqr()).sum::<f64>();
        if j + 1 < hats.len() {
            let d = hats[j + 1].coefficients();
            energy += a[j] * c.iter().zip(d).map(|(x, y)| (y - x).norm_sqr()).sum::<f64>();
        }
    }
    Ok(sqrt(spec.cell_volume() * energy / spec.len() as f64))
}
