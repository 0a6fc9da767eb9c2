//! Analytic Laplace eigenbases on intervals and rectangles.
//!
//! Every eigenfunction is a (tensor product of) sine or cosine profile(s)
//! normalized in the inner product of the solution space: the gradient-only
//! product when part of the boundary carries a Dirichlet condition, the full
//! first-order Sobolev product otherwise. With that normalization the
//! compact operator `A` defined by `(Au, φ) = ∫ u φ` is diagonal with
//! entries `μ_j = 1/κ_j` (resp. `1/(κ_j + 1)`).
//!
//! Coefficient vectors are indexed by *position* `p = 0..n_modes`; the
//! conventional mode index is `j = p + first_index()`, where `first_index`
//! is 0 for pure Neumann boundaries (so `e_0` is the constant) and 1
//! otherwise.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION_1D: usize = 512;
pub const DEFAULT_RESOLUTION_2D: usize = 128;
pub const DEFAULT_MODES_1D: usize = 64;
pub const DEFAULT_MODES_2D: usize = 100;
pub const MIN_RESOLUTION: usize = 16;
/// Relative tolerance used to group equal Laplace eigenvalues.
pub const MULTIPLICITY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Interval,
    Rectangle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub lengths: Vec<f64>,
    pub grid_resolution: usize,
}

impl DomainSpec {
    pub fn interval(length: f64, grid_resolution: usize) -> Result<Self> {
        let d = Self {
            kind: DomainKind::Interval,
            lengths: vec![length],
            grid_resolution,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(lx: f64, ly: f64, grid_resolution: usize) -> Result<Self> {
        let d = Self {
            kind: DomainKind::Rectangle,
            lengths: vec![lx, ly],
            grid_resolution,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            DomainKind::Interval => 1,
            DomainKind::Rectangle => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.len() != self.dim() {
            return Err(Error::InvalidDomain(format!(
                "{:?} needs {} length(s), got {}",
                self.kind,
                self.dim(),
                self.lengths.len()
            )));
        }
        if let Some(l) = self.lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidDomain(format!(
                "lengths must be positive, got {l}"
            )));
        }
        if self.grid_resolution < MIN_RESOLUTION {
            return Err(Error::InvalidDomain(format!(
                "grid resolution {} is below the minimum {MIN_RESOLUTION}",
                self.grid_resolution
            )));
        }
        Ok(())
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        self.lengths.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceCondition {
    Dirichlet,
    Neumann,
}

/// Boundary condition per face: `[left, right]` on an interval and
/// `[x = 0, x = Lx, y = 0, y = Ly]` on a rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySpec {
    pub faces: Vec<FaceCondition>,
}

impl BoundarySpec {
    pub fn new(faces: Vec<FaceCondition>) -> Self {
        Self { faces }
    }

    pub fn uniform(condition: FaceCondition, dim: usize) -> Self {
        Self {
            faces: vec![condition; 2 * dim],
        }
    }

    pub fn dirichlet(dim: usize) -> Self {
        Self::uniform(FaceCondition::Dirichlet, dim)
    }

    pub fn neumann(dim: usize) -> Self {
        Self::uniform(FaceCondition::Neumann, dim)
    }

    pub fn has_dirichlet(&self) -> bool {
        self.faces.contains(&FaceCondition::Dirichlet)
    }

    pub fn has_neumann(&self) -> bool {
        self.faces.contains(&FaceCondition::Neumann)
    }

    fn validate(&self, domain: &DomainSpec) -> Result<()> {
        let expected = 2 * domain.dim();
        if self.faces.len() != expected {
            return Err(Error::InvalidBoundary(format!(
                "{:?} has {expected} faces, {} conditions given",
                domain.kind,
                self.faces.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerProductMode {
    GradientOnly,
    FullSobolev,
}

/// One-dimensional eigenfunction family determined by the two end conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisFamily {
    /// sin(jπx/L), j ≥ 1
    DirichletDirichlet,
    /// cos(jπx/L), j ≥ 0
    NeumannNeumann,
    /// sin((j+½)πx/L), j ≥ 0
    DirichletNeumann,
    /// cos((j+½)πx/L), j ≥ 0
    NeumannDirichlet,
}

impl AxisFamily {
    fn from_faces(lo: FaceCondition, hi: FaceCondition) -> Self {
        use FaceCondition::*;
        match (lo, hi) {
            (Dirichlet, Dirichlet) => Self::DirichletDirichlet,
            (Neumann, Neumann) => Self::NeumannNeumann,
            (Dirichlet, Neumann) => Self::DirichletNeumann,
            (Neumann, Dirichlet) => Self::NeumannDirichlet,
        }
    }

    fn first_mode(self) -> u32 {
        match self {
            Self::DirichletDirichlet => 1,
            _ => 0,
        }
    }

    /// Wavenumber in units of π/(2L); always an integer.
    fn half_wavenumber(self, j: u32) -> u64 {
        match self {
            Self::DirichletDirichlet | Self::NeumannNeumann => 2 * j as u64,
            Self::DirichletNeumann | Self::NeumannDirichlet => 2 * j as u64 + 1,
        }
    }

    fn is_sine(self) -> bool {
        matches!(self, Self::DirichletDirichlet | Self::DirichletNeumann)
    }

    /// L²-normalized profile value and derivative at `x`.
    fn profile(self, j: u32, length: f64, x: f64) -> (f64, f64) {
        let h = self.half_wavenumber(j);
        if h == 0 {
            return ((1.0 / length).sqrt(), 0.0);
        }
        let k = h as f64 * PI / (2.0 * length);
        let a = (2.0 / length).sqrt();
        if self.is_sine() {
            (a * (k * x).sin(), a * k * (k * x).cos())
        } else {
            (a * (k * x).cos(), -a * k * (k * x).sin())
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub index: usize,
    pub kappa: f64,
    pub mode_numbers: Vec<u32>,
    /// Grid values of `e_j`, normalized in the active inner product.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub domain: DomainSpec,
    pub boundary: BoundarySpec,
    pub pairs: Vec<EigenPair>,
    pub inner_product_mode: InnerProductMode,
    /// `(A e_j, e_j) = μ_j` per position.
    pub mass_diagonal: Vec<f64>,
    families: Vec<AxisFamily>,
    first_index: usize,
    next_kappa: f64,
    coords: Vec<[f64; 2]>,
    weights: Vec<f64>,
    neumann_nodes: Vec<(usize, f64)>,
}

struct Candidate {
    kappa: f64,
    exact_key: Option<u64>,
    modes: Vec<u32>,
}

impl SpectralBasis {
    /// Builds the first `n_modes` eigenpairs sorted by κ ascending, ties broken
    /// by lexicographic mode numbers.
    pub fn new(domain: DomainSpec, boundary: BoundarySpec, n_modes: usize) -> Result<Self> {
        domain.validate()?;
        boundary.validate(&domain)?;
        if n_modes < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 modes, got {n_modes}"
            )));
        }
        let dim = domain.dim();
        let families: Vec<AxisFamily> = (0..dim)
            .map(|a| AxisFamily::from_faces(boundary.faces[2 * a], boundary.faces[2 * a + 1]))
            .collect();
        let has_dirichlet = boundary.has_dirichlet();

        let mut candidates = enumerate_candidates(&domain, &families, n_modes + 1);
        sort_candidates(&mut candidates);
        candidates.truncate(n_modes + 1);
        let next_kappa = candidates[n_modes].kappa;
        candidates.truncate(n_modes);

        // at least 8 grid points per shortest wavelength: h ≤ (res - 1) / 2
        let h_cap = (domain.grid_resolution as u64 - 1) / 2;
        if let Some(bad) = candidates.iter().position(|c| {
            c.modes
                .iter()
                .zip(&families)
                .any(|(&j, f)| f.half_wavenumber(j) > h_cap)
        }) {
            return Err(Error::TooManyModes {
                requested: n_modes,
                cap: bad,
            });
        }

        let (coords, weights) = grid(&domain);
        let first_index = usize::from(has_dirichlet);
        let mut pairs = Vec::with_capacity(n_modes);
        let mut mass_diagonal = Vec::with_capacity(n_modes);
        for (p, c) in candidates.into_iter().enumerate() {
            let shift = if has_dirichlet { 0.0 } else { 1.0 };
            let mu = 1.0 / (c.kappa + shift);
            let scale = mu.sqrt();
            let values = coords
                .iter()
                .map(|x| scale * product_profile(&families, &domain.lengths, &c.modes, x).0)
                .collect();
            pairs.push(EigenPair {
                index: p + first_index,
                kappa: c.kappa,
                mode_numbers: c.modes,
                values,
            });
            mass_diagonal.push(mu);
        }
        let neumann_nodes = neumann_nodes(&domain, &boundary);
        Ok(Self {
            inner_product_mode: if has_dirichlet {
                InnerProductMode::GradientOnly
            } else {
                InnerProductMode::FullSobolev
            },
            domain,
            boundary,
            pairs,
            mass_diagonal,
            families,
            first_index,
            next_kappa,
            coords,
            weights,
            neumann_nodes,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.pairs.len()
    }

    pub fn first_index(&self) -> usize {
        self.first_index
    }

    pub fn has_dirichlet(&self) -> bool {
        self.first_index == 1
    }

    /// Position in coefficient vectors of mode index `j`.
    pub fn position(&self, j: usize) -> Result<usize> {
        j.checked_sub(self.first_index)
            .filter(|p| *p < self.pairs.len())
            .ok_or(Error::ModeOutOfRange(j))
    }

    pub fn pair(&self, j: usize) -> Result<&EigenPair> {
        Ok(&self.pairs[self.position(j)?])
    }

    pub fn kappas(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.kappa)
    }

    /// κ of the first mode not retained; drives the truncation tail bound.
    pub fn next_kappa(&self) -> f64 {
        self.next_kappa
    }

    /// Diagonal of `I - A` in the eigenbasis when `Γ_D = ∅`, identity otherwise:
    /// the quadratic form normalizing the generalized Rayleigh quotient.
    pub fn denominator_diagonal(&self) -> Vec<f64> {
        if self.has_dirichlet() {
            vec![1.0; self.n_modes()]
        } else {
            self.mass_diagonal.iter().map(|mu| 1.0 - mu).collect()
        }
    }

    pub fn grid_len(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Trapezoid quadrature weights of the grid.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Grid nodes on `Γ_N` with their boundary quadrature weights. Corner
    /// nodes shared by two Neumann edges appear once per edge.
    pub fn neumann_nodes(&self) -> &[(usize, f64)] {
        &self.neumann_nodes
    }

    pub fn grid_function(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.coords.iter().map(|x| f(x[0], x[1])).collect()
    }

    /// Composite trapezoid quadrature over the domain.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.weights.len());
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn boundary_integrate(&self, f: &[f64]) -> f64 {
        self.neumann_nodes.iter().map(|&(i, w)| w * f[i]).sum()
    }

    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f)
            .map(|(w, a)| w * a * a)
            .sum::<f64>()
            .sqrt()
    }

    pub fn boundary_l2_norm(&self, f: &[f64]) -> f64 {
        self.neumann_nodes
            .iter()
            .map(|&(i, w)| w * f[i] * f[i])
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product of two coefficient vectors; the basis is orthonormal so
    /// this is the Euclidean dot product.
    pub fn inner_product(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    pub fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                got,
            });
        }
        Ok(())
    }

    pub fn check_len_grid(&self, got: usize) -> Result<()> {
        if got != self.grid_len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid_len(),
                got,
            });
        }
        Ok(())
    }

    /// Norm of an arbitrary grid function in the active inner product, with
    /// the gradient taken by first differences. Used for functions outside
    /// the retained span such as `u⁺`.
    pub fn grid_active_norm(&self, f: &[f64]) -> f64 {
        let n = self.domain.grid_resolution;
        let mut grad = 0.0;
        match self.domain.dim() {
            1 => {
                let h = self.domain.lengths[0] / (n - 1) as f64;
                for i in 0..n - 1 {
                    grad += (f[i + 1] - f[i]).powi(2) / h;
                }
            }
            _ => {
                let hx = self.domain.lengths[0] / (n - 1) as f64;
                let hy = self.domain.lengths[1] / (n - 1) as f64;
                let edge_w = |i: usize, h: f64| if i == 0 || i == n - 1 { 0.5 * h } else { h };
                for iy in 0..n {
                    for ix in 0..n - 1 {
                        let d = f[iy * n + ix + 1] - f[iy * n + ix];
                        grad += d * d / hx * edge_w(iy, hy);
                    }
                }
                for ix in 0..n {
                    for iy in 0..n - 1 {
                        let d = f[(iy + 1) * n + ix] - f[iy * n + ix];
                        grad += d * d / hy * edge_w(ix, hx);
                    }
                }
            }
        }
        if self.has_dirichlet() {
            grad.sqrt()
        } else {
            (grad + self.l2_norm(f).powi(2)).sqrt()
        }
    }

    /// Grid values of `Σ c_j e_j`.
    pub fn evaluate(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid_len()];
        for (c, pair) in coeffs.iter().zip(&self.pairs) {
            if *c == 0.0 {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&pair.values) {
                *o += c * e;
            }
        }
        out
    }

    /// Coefficients `r_j = ∫ w e_j dΩ`: the representer of the functional
    /// `φ ↦ ∫ w φ dΩ` in the active inner product (equivalently the
    /// coefficients of `A w`).
    pub fn represent_density(&self, w: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = w.iter().zip(&self.weights).map(|(a, q)| a * q).collect();
        self.pairs
            .iter()
            .map(|p| p.values.iter().zip(&weighted).map(|(e, a)| e * a).sum())
            .collect()
    }

    /// Representer of `φ ↦ ∫_{Γ_N} w φ dΓ`.
    pub fn represent_boundary_density(&self, w: &[f64]) -> Result<Vec<f64>> {
        if self.neumann_nodes.is_empty() {
            return Err(Error::EmptyNeumannBoundary);
        }
        Ok(self
            .pairs
            .iter()
            .map(|p| {
                self.neumann_nodes
                    .iter()
                    .map(|&(i, q)| q * w[i] * p.values[i])
                    .sum()
            })
            .collect())
    }

    /// Coefficients of the L²-orthogonal projection of `f` onto the retained
    /// span, expressed in the eigenbasis: `c_j = (f, e_j)` in the active inner
    /// product, computed as `∫ f e_j dΩ / μ_j`.
    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        self.represent_density(f)
            .into_iter()
            .zip(&self.mass_diagonal)
            .map(|(r, mu)| r / mu)
            .collect()
    }

    /// Gradient-only and full Sobolev norms of a coefficient vector.
    pub fn sobolev_norms(&self, coeffs: &[f64]) -> (f64, f64) {
        let mut grad = 0.0;
        let mut full = 0.0;
        // ‖e_j‖²_{L²} = μ_j, ‖∇e_j‖² = κ_j μ_j
        for ((c, p), mu) in coeffs.iter().zip(&self.pairs).zip(&self.mass_diagonal) {
            grad += c * c * p.kappa * mu;
            full += c * c * (p.kappa + 1.0) * mu;
        }
        (grad.sqrt(), full.sqrt())
    }

    /// Grid gradient of `e_j` (per axis, zero second component in 1D).
    pub fn gradient_values(&self, j: usize) -> Result<Vec<[f64; 2]>> {
        let p = self.position(j)?;
        let scale = self.mass_diagonal[p].sqrt();
        let modes = &self.pairs[p].mode_numbers;
        Ok(self
            .coords
            .iter()
            .map(|x| {
                let g = product_profile(&self.families, &self.domain.lengths, modes, x).1;
                [scale * g[0], scale * g[1]]
            })
            .collect())
    }

    /// Worst relative defect of the discrete eigenrelation
    /// `∫∇e_j·∇e_k = κ_j ∫ e_j e_k` over all retained `k`.
    pub fn eigen_residual(&self, j: usize) -> Result<f64> {
        let p = self.position(j)?;
        let gj = self.gradient_values(j)?;
        let kappa = self.pairs[p].kappa;
        let ej = &self.pairs[p].values;
        let mut worst: f64 = 0.0;
        for pk in 0..self.n_modes() {
            let gk = self.gradient_values(pk + self.first_index)?;
            let stiff: f64 = self
                .weights
                .iter()
                .zip(gj.iter().zip(&gk))
                .map(|(w, (a, b))| w * (a[0] * b[0] + a[1] * b[1]))
                .sum();
            let mass: f64 = self
                .weights
                .iter()
                .zip(ej.iter().zip(&self.pairs[pk].values))
                .map(|(w, (a, b))| w * a * b)
                .sum();
            let mu = self.mass_diagonal[p];
            worst = worst.max((stiff - kappa * mass).abs() / (kappa * mu).max(mu));
        }
        Ok(worst)
    }

    /// Position groups of equal κ (relative tolerance [`MULTIPLICITY_RTOL`]),
    /// reported as mode indices.
    pub fn multiplicity_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (p, pair) in self.pairs.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if kappa_eq(self.pairs[g[0] - self.first_index].kappa, pair.kappa) => {
                    g.push(p + self.first_index)
                }
                _ => groups.push(vec![p + self.first_index]),
            }
        }
        groups
    }

    /// Mode indices sharing κ with mode `j` (including `j`).
    pub fn group_of(&self, j: usize) -> Result<Vec<usize>> {
        let k = self.pair(j)?.kappa;
        Ok(self
            .pairs
            .iter()
            .filter(|p| kappa_eq(p.kappa, k))
            .map(|p| p.index)
            .collect())
    }
}

pub(crate) fn kappa_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= MULTIPLICITY_RTOL * a.abs().max(b.abs())
}

fn enumerate_candidates(domain: &DomainSpec, families: &[AxisFamily], count: usize) -> Vec<Candidate> {
    let l = &domain.lengths;
    let axis_kappa = |f: AxisFamily, j: u32, len: f64| {
        let h = f.half_wavenumber(j) as f64;
        (h * PI / (2.0 * len)).powi(2)
    };
    match families {
        [f] => (0..count as u32)
            .map(|k| {
                let j = f.first_mode() + k;
                let h = f.half_wavenumber(j);
                Candidate {
                    kappa: axis_kappa(*f, j, l[0]),
                    exact_key: Some(h * h),
                    modes: vec![j],
                }
            })
            .collect(),
        [fx, fy] => {
            // every retained pair has per-axis rank below `count`
            let equal = l[0] == l[1];
            let mut out = Vec::with_capacity(count * count);
            for kx in 0..count as u32 {
                for ky in 0..count as u32 {
                    let (jx, jy) = (fx.first_mode() + kx, fy.first_mode() + ky);
                    let (hx, hy) = (fx.half_wavenumber(jx), fy.half_wavenumber(jy));
                    let (kappa, exact_key) = if equal {
                        let s = hx * hx + hy * hy;
                        ((PI / (2.0 * l[0])).powi(2) * s as f64, Some(s))
                    } else {
                        (axis_kappa(*fx, jx, l[0]) + axis_kappa(*fy, jy, l[1]), None)
                    };
                    out.push(Candidate {
                        kappa,
                        exact_key,
                        modes: vec![jx, jy],
                    });
                }
            }
            out
        }
        _ => unreachable!("domain dimension is 1 or 2"),
    }
}

fn sort_candidates(c: &mut [Candidate]) {
    if c.iter().all(|x| x.exact_key.is_some()) {
        c.sort_by(|a, b| {
            a.exact_key
                .cmp(&b.exact_key)
                .then_with(|| a.modes.cmp(&b.modes))
        });
        return;
    }
    c.sort_by(|a, b| a.kappa.total_cmp(&b.kappa).then_with(|| a.modes.cmp(&b.modes)));
    // re-sort runs of numerically equal κ lexicographically
    let mut start = 0;
    while start < c.len() {
        let mut end = start + 1;
        while end < c.len() && kappa_eq(c[start].kappa, c[end].kappa) {
            end += 1;
        }
        c[start..end].sort_by(|a, b| a.modes.cmp(&b.modes));
        start = end;
    }
}

fn product_profile(
    families: &[AxisFamily],
    lengths: &[f64],
    modes: &[u32],
    x: &[f64; 2],
) -> (f64, [f64; 2]) {
    match families.len() {
        1 => {
            let (v, d) = families[0].profile(modes[0], lengths[0], x[0]);
            (v, [d, 0.0])
        }
        _ => {
            let (vx, dx) = families[0].profile(modes[0], lengths[0], x[0]);
            let (vy, dy) = families[1].profile(modes[1], lengths[1], x[1]);
            (vx * vy, [dx * vy, vx * dy])
        }
    }
}

fn axis_grid(len: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = len / (n - 1) as f64;
    let x = (0..n).map(|i| i as f64 * h).collect();
    let w = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    (x, w)
}

fn grid(domain: &DomainSpec) -> (Vec<[f64; 2]>, Vec<f64>) {
    let n = domain.grid_resolution;
    match domain.kind {
        DomainKind::Interval => {
            let (x, w) = axis_grid(domain.lengths[0], n);
            (x.into_iter().map(|x| [x, 0.0]).collect(), w)
        }
        DomainKind::Rectangle => {
            let (x, wx) = axis_grid(domain.lengths[0], n);
            let (y, wy) = axis_grid(domain.lengths[1], n);
            let mut coords = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for (yi, wyi) in y.iter().zip(&wy) {
                for (xi, wxi) in x.iter().zip(&wx) {
                    coords.push([*xi, *yi]);
                    weights.push(wxi * wyi);
                }
            }
            (coords, weights)
        }
    }
}

fn neumann_nodes(domain: &DomainSpec, boundary: &BoundarySpec) -> Vec<(usize, f64)> {
    let n = domain.grid_resolution;
    let is_neumann = |f: usize| boundary.faces[f] == FaceCondition::Neumann;
    let mut out = Vec::new();
    match domain.kind {
        DomainKind::Interval => {
            if is_neumann(0) {
                out.push((0, 1.0));
            }
            if is_neumann(1) {
                out.push((n - 1, 1.0));
            }
        }
        DomainKind::Rectangle => {
            let (_, wx) = axis_grid(domain.lengths[0], n);
            let (_, wy) = axis_grid(domain.lengths[1], n);
            // faces: x = 0, x = Lx (vertical edges, quadrature along y), y = 0, y = Ly
            if is_neumann(0) {
                out.extend((0..n).map(|iy| (iy * n, wy[iy])));
            }
            if is_neumann(1) {
                out.extend((0..n).map(|iy| (iy * n + n - 1, wy[iy])));
            }
            if is_neumann(2) {
                out.extend((0..n).map(|ix| (ix, wx[ix])));
            }
            if is_neumann(3) {
                out.extend((0..n).map(|ix| ((n - 1) * n + ix, wx[ix])));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(faces: [FaceCondition; 2], n: usize) -> SpectralBasis {
        SpectralBasis::new(
            DomainSpec::interval(PI, 512).unwrap(),
            BoundarySpec::new(faces.to_vec()),
            n,
        )
        .unwrap()
    }

    #[test]
    fn neumann_interval_spectrum() {
        use FaceCondition::Neumann;
        let b = interval([Neumann, Neumann], 4);
        let k: Vec<f64> = b.kappas().collect();
        for (a, e) in k.iter().zip([0.0, 1.0, 4.0, 9.0]) {
            assert!((a - e).abs() < 1e-12, "{k:?}");
        }
        assert_eq!(b.first_index(), 0);
        assert_eq!(b.inner_product_mode, InnerProductMode::FullSobolev);
        assert!((b.mass_diagonal[0] - 1.0).abs() < 1e-15);
        // e_1 ∝ cos x
        let e1 = &b.pair(1).unwrap().values;
        let ratio = e1[100] / b.coords()[100][0].cos();
        for (v, x) in e1.iter().zip(b.coords()).step_by(37) {
            if x[0].cos().abs() > 1e-3 {
                assert!((v / x[0].cos() - ratio).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dirichlet_interval_spectrum() {
        use FaceCondition::Dirichlet;
        let b = interval([Dirichlet, Dirichlet], 3);
        let k: Vec<f64> = b.kappas().collect();
        for (a, e) in k.iter().zip([1.0, 4.0, 9.0]) {
            assert!((a - e).abs() < 1e-12);
        }
        assert_eq!(b.first_index(), 1);
        assert!(b.position(0).is_err());
        assert!((b.mass_diagonal[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mixed_interval_uses_half_integers() {
        use FaceCondition::*;
        let b = interval([Dirichlet, Neumann], 3);
        let k: Vec<f64> = b.kappas().collect();
        for (a, e) in k.iter().zip([0.25, 2.25, 6.25]) {
            assert!((a - e).abs() < 1e-12);
        }
        // value at the Neumann end is extremal, zero at the Dirichlet end
        let e = &b.pair(1).unwrap().values;
        assert!(e[0].abs() < 1e-15);
        assert!(e[511] > 0.0);
    }

    #[test]
    fn square_neumann_groups() {
        let b = SpectralBasis::new(
            DomainSpec::rectangle(PI, PI, 64).unwrap(),
            BoundarySpec::neumann(2),
            5,
        )
        .unwrap();
        let k: Vec<f64> = b.kappas().collect();
        // brute-force enumeration of m² + n², m, n ≤ 4
        let mut oracle: Vec<u32> = (0..=4u32)
            .flat_map(|m| (0..=4u32).map(move |n| m * m + n * n))
            .collect();
        oracle.sort_unstable();
        for (a, e) in k.iter().zip(&oracle) {
            assert!((a - *e as f64).abs() < 1e-12);
        }
        assert_eq!(b.multiplicity_groups(), vec![vec![0], vec![1, 2], vec![3], vec![4]]);
        assert_eq!(b.pairs[1].mode_numbers, vec![0, 1]);
        assert_eq!(b.pairs[2].mode_numbers, vec![1, 0]);
    }

    #[test]
    fn quadrature_basics() {
        use FaceCondition::Dirichlet;
        let b = interval([Dirichlet, Dirichlet], 4);
        assert!((b.integrate(&vec![1.0; b.grid_len()]) - PI).abs() < 1e-12);
        let s2 = b.grid_function(|x, _| x.sin().powi(2));
        assert!((b.integrate(&s2) - PI / 2.0).abs() < 1e-8);
        let prod: Vec<f64> = b.pairs[0]
            .values
            .iter()
            .zip(&b.pairs[1].values)
            .map(|(a, c)| a * c)
            .collect();
        assert!(b.integrate(&prod).abs() < 1e-8);
    }

    #[test]
    fn inner_product_is_parseval() {
        use FaceCondition::Neumann;
        let b = interval([Neumann, Neumann], 4);
        let u = [0.0, 3.0, 4.0, 0.0];
        assert_eq!(b.inner_product(&u, &u).unwrap(), 25.0);
        assert!(b.inner_product(&u, &[1.0]).is_err());
    }

    #[test]
    fn project_recovers_modes() {
        use FaceCondition::*;
        let b = interval([Neumann, Dirichlet], 8);
        let p = b.project(&b.pair(2).unwrap().values);
        let target = b.position(2).unwrap();
        for (i, c) in p.iter().enumerate() {
            let e = if i == target { 1.0 } else { 0.0 };
            assert!((c - e).abs() < 1e-8);
        }
        assert!(b.project(&vec![0.0; b.grid_len()]).iter().all(|c| *c == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DomainSpec::interval(-1.0, 64).is_err());
        assert!(DomainSpec::interval(1.0, 8).is_err());
        let d = DomainSpec::interval(1.0, 64).unwrap();
        assert!(SpectralBasis::new(d.clone(), BoundarySpec::neumann(1), 1).is_err());
        assert!(SpectralBasis::new(d.clone(), BoundarySpec::neumann(2), 4).is_err());
        match SpectralBasis::new(d, BoundarySpec::dirichlet(1), 40) {
            Err(Error::TooManyModes { cap, .. }) => assert_eq!(cap, 15),
            other => panic!("{other:?}"),
        }
    }
}
