//! The torus phase-space distribution of a probe/signal pair, its logical
//! grid states, and their overlaps.
//!
//! The distribution is the character-weighted sum of displacement matrix
//! elements
//!
//! `W(x,k) = Σ_{m,n} ⟨φ|D(mα₀,nβ₀)|ψ⟩ e^{2πi(nβ₀x − mα₀k)}`,
//!
//! which the Gaussian closed form resums into a genus-2 theta function:
//! `W(x,k) = 𝒩e^Φ Θ[ε;δ](ξ|Ω)` with `Ω = iΓ` and
//! `ξ = (−α₀k, β₀x) + η/(2πi)`. [`QztDistribution::eval`] takes the theta
//! route; [`qzt_brute_force`] takes the raw route (quadrature elements times
//! the lattice sum, no theta functions anywhere) and serves as the second
//! independent oracle.
//!
//! For an equally squeezed vacuum pair the period matrix is diagonal,
//! `Ω = diag(τ₁, τ₂)` with `τ₁ = iπħ²/(P²σ²)`, `τ₂ = iπσ²/L²`, and the two
//! logical grid states are the distributions with characteristic `[0;0]`
//! (bit 0) and `[1/2,1/2; 1/2,1/2]` (bit 1).

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::exec;
use crate::gaussian::{
    closed_form_parts, matrix_element_quadrature, ClosedFormParts, GaussianState, QuadConfig,
};
use crate::kahan::{ComplexNeumaier, Neumaier};
use crate::theta::{riemann_theta, PeriodMatrix};
use crate::torus::{ThetaCharacteristic, TorusGeometry};

/// Default certified tolerance for theta evaluations inside distributions.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Points in the flat-limit peak-width slice.
const SLICE_POINTS: usize = 4096;

/// A phase-space distribution: prefactor plus the `(Ω, ξ-offset)` map from a
/// phase-space point to a complex amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct QztDistribution {
    geom: TorusGeometry,
    parts: ClosedFormParts,
    characteristic: ThetaCharacteristic,
    omega: PeriodMatrix,
    xi_offset: [Complex64; 2],
    tol: f64,
}

impl QztDistribution {
    pub fn geometry(&self) -> &TorusGeometry {
        &self.geom
    }

    pub fn parts(&self) -> &ClosedFormParts {
        &self.parts
    }

    pub fn characteristic(&self) -> &ThetaCharacteristic {
        &self.characteristic
    }

    pub fn omega(&self) -> &PeriodMatrix {
        &self.omega
    }

    /// Constant offset added to `(−α₀k, β₀x)`, namely `η/(2πi)`.
    pub fn xi_offset(&self) -> [Complex64; 2] {
        self.xi_offset
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Same distribution with a different theta tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Domain(format!("tolerance must be in (0,1), got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    /// The canonical trace of the underlying module element: the
    /// `(m,n) = (0,0)` coefficient, i.e. the plain overlap `⟨φ|ψ⟩`.
    pub fn canonical_trace(&self) -> Complex64 {
        self.parts.prefactor()
    }

    /// Evaluate at a physical phase-space point `(x, k)`.
    pub fn eval(&self, x: f64, k: f64) -> Result<Complex64> {
        let xi1 = -self.geom.position_step() * k;
        let xi2 = self.geom.momentum_step() * x;
        self.eval_xi(xi1, xi2)
    }

    /// Evaluate at a dimensionless torus point `ξ` (before the stored
    /// offset). The distribution has period 1 in each component of `ξ` for
    /// the zero characteristic and period 2 for half characteristics.
    pub fn eval_xi(&self, xi1: f64, xi2: f64) -> Result<Complex64> {
        let xi = [
            Complex64::new(xi1, 0.0) + self.xi_offset[0],
            Complex64::new(xi2, 0.0) + self.xi_offset[1],
        ];
        let theta = riemann_theta(xi, &self.omega, &self.characteristic, self.tol)?;
        Ok(self.parts.prefactor() * theta.value)
    }
}

/// Assemble the theta-function form of the distribution from physical
/// parameters. Fails if `Im Ω` is not positive-definite, which signals
/// invalid physical parameters.
pub fn qzt_assemble(
    probe: &GaussianState,
    signal: &GaussianState,
    geom: &TorusGeometry,
    characteristic: ThetaCharacteristic,
) -> Result<QztDistribution> {
    let parts = closed_form_parts(probe, signal, geom);
    let i = Complex64::new(0.0, 1.0);
    let g = parts.gamma();
    let omega = PeriodMatrix::from_parts(i * g[0][0], i * g[0][1], i * g[1][1])?;
    let eta = parts.eta();
    // xi offset = eta / (2 pi i) = -i eta / (2 pi)
    let scale = Complex64::new(0.0, -1.0 / TAU);
    Ok(QztDistribution {
        geom: *geom,
        parts,
        characteristic,
        omega,
        xi_offset: [eta[0] * scale, eta[1] * scale],
        tol: DEFAULT_TOL,
    })
}

fn brute_force_row(
    probe: &GaussianState,
    signal: &GaussianState,
    geom: &TorusGeometry,
    x: f64,
    k: f64,
    m: i64,
    radius: i64,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    let alpha0 = geom.position_step();
    let beta0 = geom.momentum_step();
    let mut row = ComplexNeumaier::new();
    for n in -radius..=radius {
        let element = matrix_element_quadrature(probe, signal, geom, m, n, cfg)?;
        let phase = Complex64::new(0.0, TAU * (n as f64 * beta0 * x - m as f64 * alpha0 * k)).exp();
        row.add(element * phase);
    }
    Ok(row.total())
}

fn brute_force_combine(rows: Vec<Result<Complex64>>) -> Result<Complex64> {
    let mut acc = ComplexNeumaier::new();
    for row in rows {
        acc.add(row?);
    }
    Ok(acc.total())
}

/// Direct truncated lattice sum of the distribution using quadrature matrix
/// elements for every `(m,n)` with `‖(m,n)‖_∞ ≤ radius`.
///
/// This path never touches theta functions; it is the second independent
/// oracle against which [`QztDistribution::eval`] is verified.
pub fn qzt_brute_force(
    probe: &GaussianState,
    signal: &GaussianState,
    geom: &TorusGeometry,
    x: f64,
    k: f64,
    radius: usize,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    let r = radius as i64;
    let rows = exec::map_ordered((-r..=r).collect(), |m| {
        brute_force_row(probe, signal, geom, x, k, m, r, cfg)
    });
    brute_force_combine(rows)
}

/// Sequential reference path of [`qzt_brute_force`]; identical summation
/// structure, so results are bit-identical.
pub fn qzt_brute_force_seq(
    probe: &GaussianState,
    signal: &GaussianState,
    geom: &TorusGeometry,
    x: f64,
    k: f64,
    radius: usize,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    let r = radius as i64;
    let rows = (-r..=r)
        .map(|m| brute_force_row(probe, signal, geom, x, k, m, r, cfg))
        .collect();
    brute_force_combine(rows)
}

/// Decay parameters of the equally squeezed vacuum distribution:
/// `τ₁ = iπħ²/(P²σ²)` and `τ₂ = iπσ²/L²`.
pub fn squeezed_vacuum_tau(geom: &TorusGeometry, sigma: f64) -> Result<(Complex64, Complex64)> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let hbar = geom.hbar();
    let tau1 = Complex64::new(
        0.0,
        PI * hbar * hbar / (geom.momentum_period().powi(2) * sigma * sigma),
    );
    let tau2 = Complex64::new(0.0, PI * sigma * sigma / geom.position_period().powi(2));
    Ok((tau1, tau2))
}

/// The squeezing-independent product `|τ₁||τ₂| = (θ₀/2)²`.
pub fn lattice_uncertainty(geom: &TorusGeometry, sigma: f64) -> Result<f64> {
    let (tau1, tau2) = squeezed_vacuum_tau(geom, sigma)?;
    Ok(tau1.norm() * tau2.norm())
}

/// Logical bit label of a grid state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalBit {
    Zero,
    One,
}

impl LogicalBit {
    /// Theta characteristic carried by this bit.
    pub fn characteristic(&self) -> ThetaCharacteristic {
        match self {
            LogicalBit::Zero => ThetaCharacteristic::zero(),
            LogicalBit::One => ThetaCharacteristic::half(),
        }
    }
}

/// One of the two logical grid states: a squeezed-vacuum distribution with
/// the characteristic determined by the bit.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalState {
    pub bit: LogicalBit,
    pub distribution: QztDistribution,
}

/// Build the logical state for `bit` with squeezing width `sigma`.
pub fn ggkp_logical(geom: &TorusGeometry, sigma: f64, bit: LogicalBit) -> Result<LogicalState> {
    let state = GaussianState::new(0.0, 0.0, sigma)?;
    let distribution = qzt_assemble(&state, &state, geom, bit.characteristic())?;
    Ok(LogicalState { bit, distribution })
}

/// The three L² pairings of two distributions over the doubled cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSums {
    /// `∫∫ ā·b dξ₁dξ₂` over `ξ ∈ [0,2)²`.
    pub cross: Complex64,
    /// `∫∫ |a|²`.
    pub norm_a: f64,
    /// `∫∫ |b|²`.
    pub norm_b: f64,
}

impl OverlapSums {
    /// `|⟨a,b⟩| / (‖a‖‖b‖)`.
    pub fn normalized_cross(&self) -> f64 {
        self.cross.norm() / (self.norm_a * self.norm_b).sqrt()
    }
}

fn check_same_torus(a: &LogicalState, b: &LogicalState) -> Result<()> {
    if a.distribution.geometry() != b.distribution.geometry()
        || a.distribution.omega() != b.distribution.omega()
    {
        return Err(Error::GeometryMismatch(
            "overlap requires states on the same torus with equal squeezing".into(),
        ));
    }
    Ok(())
}

fn overlap_row(
    a: &QztDistribution,
    b: &QztDistribution,
    resolution: usize,
    i: usize,
) -> Result<(Complex64, f64, f64)> {
    let step = 2.0 / resolution as f64;
    let xi1 = i as f64 * step;
    let mut cross = ComplexNeumaier::new();
    let mut na = Neumaier::new();
    let mut nb = Neumaier::new();
    for j in 0..resolution {
        let xi2 = j as f64 * step;
        let va = a.eval_xi(xi1, xi2)?;
        let vb = b.eval_xi(xi1, xi2)?;
        cross.add(va.conj() * vb);
        na.add(va.norm_sqr());
        nb.add(vb.norm_sqr());
    }
    Ok((cross.total(), na.total(), nb.total()))
}

fn overlap_combine(rows: Vec<Result<(Complex64, f64, f64)>>, resolution: usize) -> Result<OverlapSums> {
    let mut cross = ComplexNeumaier::new();
    let mut na = Neumaier::new();
    let mut nb = Neumaier::new();
    for row in rows {
        let (c, a, b) = row?;
        cross.add(c);
        na.add(a);
        nb.add(b);
    }
    let cell = (2.0 / resolution as f64).powi(2);
    Ok(OverlapSums {
        cross: cross.total() * cell,
        norm_a: na.total() * cell,
        norm_b: nb.total() * cell,
    })
}

/// Numerical L² pairings over the doubled cell `ξ ∈ [0,2)²` on a
/// `resolution²` grid (the trapezoid rule coincides with this rectangle sum
/// on the periodic cell). Convergence evidence comes from re-running at
/// halved resolution.
pub fn torus_overlap_sums(
    a: &LogicalState,
    b: &LogicalState,
    resolution: usize,
) -> Result<OverlapSums> {
    check_same_torus(a, b)?;
    if resolution < 2 || resolution % 2 != 0 {
        return Err(Error::Domain(format!(
            "overlap resolution must be even and >= 2, got {resolution}"
        )));
    }
    let rows = exec::map_ordered((0..resolution).collect(), |i| {
        overlap_row(&a.distribution, &b.distribution, resolution, i)
    });
    overlap_combine(rows, resolution)
}

/// Sequential reference path of [`torus_overlap_sums`]; bit-identical.
pub fn torus_overlap_sums_seq(
    a: &LogicalState,
    b: &LogicalState,
    resolution: usize,
) -> Result<OverlapSums> {
    check_same_torus(a, b)?;
    if resolution < 2 || resolution % 2 != 0 {
        return Err(Error::Domain(format!(
            "overlap resolution must be even and >= 2, got {resolution}"
        )));
    }
    let rows = (0..resolution)
        .map(|i| overlap_row(&a.distribution, &b.distribution, resolution, i))
        .collect();
    overlap_combine(rows, resolution)
}

/// The doubled-cell inner product `∫∫ ā·b dξ₁dξ₂`.
pub fn torus_overlap(a: &LogicalState, b: &LogicalState, resolution: usize) -> Result<Complex64> {
    Ok(torus_overlap_sums(a, b, resolution)?.cross)
}

/// One row of the flat-limit scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    /// Scale factor applied to both periods.
    pub scale: f64,
    /// Full width at half maximum of the central `ξ₂` peak of `|W|`.
    pub fwhm: f64,
    /// Location of the peak maximum in `ξ₂` (an integer up to grid error).
    pub peak_center: f64,
}

fn measure_fwhm(values: &[f64], step: f64, origin: f64) -> Result<(f64, f64)> {
    let (peak_idx, peak_val) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite magnitudes"))
        .expect("non-empty slice");
    let min_val = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !peak_val.is_finite() || *peak_val <= 0.0 {
        return Err(Error::DegenerateScan("distribution magnitude is not positive".into()));
    }
    let half = peak_val / 2.0;
    if min_val > half {
        return Err(Error::DegenerateScan(
            "distribution is too flat: magnitude never falls to half maximum".into(),
        ));
    }
    if peak_idx == 0 || peak_idx == values.len() - 1 {
        return Err(Error::DegenerateScan("peak sits on the scan boundary".into()));
    }

    let crossing = |from: usize, dir: isize| -> Option<f64> {
        let mut i = from as isize;
        loop {
            let next = i + dir;
            if next < 0 || next as usize >= values.len() {
                return None;
            }
            let (a, b) = (values[i as usize], values[next as usize]);
            if a >= half && b < half {
                let frac = (a - half) / (a - b);
                return Some(origin + (i as f64 + dir as f64 * frac) * step);
            }
            i = next;
        }
    };
    let right = crossing(peak_idx, 1)
        .ok_or_else(|| Error::DegenerateScan("no half-maximum crossing to the right".into()))?;
    let left = crossing(peak_idx, -1)
        .ok_or_else(|| Error::DegenerateScan("no half-maximum crossing to the left".into()))?;
    Ok((right - left, origin + peak_idx as f64 * step))
}

/// For each scale `c`, builds the bit-0 state on the geometry `(cL, cP)` and
/// measures the FWHM of the central peak of `|W|` along `ξ₂` on a
/// 4096-point slice. Peaks sharpen monotonically as the periods grow (the
/// flat-space limit), which callers assert on the returned sequence.
pub fn flat_limit_scan(
    geom: &TorusGeometry,
    sigma: f64,
    scales: &[f64],
) -> Result<Vec<ScanPoint>> {
    if scales.is_empty() {
        return Err(Error::Domain("scale list must not be empty".into()));
    }
    for w in scales.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("scales must be strictly increasing".into()));
        }
    }
    if !(scales[0] > 0.0 && scales[0].is_finite()) {
        return Err(Error::Domain(format!("scales must be positive, got {}", scales[0])));
    }

    let step = 1.0 / SLICE_POINTS as f64;
    let origin = -0.5;
    let mut out = Vec::with_capacity(scales.len());
    for &scale in scales {
        let state = ggkp_logical(&geom.scaled(scale)?, sigma, LogicalBit::Zero)?;
        let values = exec::map_ordered((0..=SLICE_POINTS).collect(), |j| {
            state
                .distribution
                .eval_xi(0.0, origin + j as f64 * step)
                .map(|v| v.norm())
        });
        let values: Result<Vec<f64>> = values.into_iter().collect();
        let (fwhm, peak_center) = measure_fwhm(&values?, step, origin)?;
        out.push(ScanPoint {
            scale,
            fwhm,
            peak_center,
        });
    }
    Ok(out)
}

/// Rectangular phase-space sampling window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub nx: usize,
    pub nk: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, k_min: f64, k_max: f64, nx: usize, nk: usize) -> Result<Self> {
        for v in [x_min, x_max, k_min, k_max] {
            if !v.is_finite() {
                return Err(Error::Domain("grid bounds must be finite".into()));
            }
        }
        if x_max <= x_min || k_max <= k_min {
            return Err(Error::Domain(
                "grid requires x_max > x_min and k_max > k_min".into(),
            ));
        }
        if nx == 0 || nk == 0 {
            return Err(Error::Domain("grid needs nx >= 1 and nk >= 1".into()));
        }
        if nx.saturating_mul(nk) > 100_000_000 {
            return Err(Error::Domain(format!(
                "grid too large: {} points exceeds 1e8",
                nx.saturating_mul(nk)
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            k_min,
            k_max,
            nx,
            nk,
        })
    }

    /// `i`-th sample of an inclusive linspace with `n` points.
    fn coord(min: f64, max: f64, n: usize, i: usize) -> f64 {
        if n == 1 {
            min
        } else {
            min + i as f64 * (max - min) / (n - 1) as f64
        }
    }

    pub fn x_at(&self, i: usize) -> f64 {
        Self::coord(self.x_min, self.x_max, self.nx, i)
    }

    pub fn k_at(&self, j: usize) -> f64 {
        Self::coord(self.k_min, self.k_max, self.nk, j)
    }
}

/// One evaluated grid sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub k: f64,
    pub value: Complex64,
}

fn grid_row(dist: &QztDistribution, spec: &GridSpec, j: usize) -> Result<Vec<GridPoint>> {
    let k = spec.k_at(j);
    (0..spec.nx)
        .map(|i| {
            let x = spec.x_at(i);
            dist.eval(x, k).map(|value| GridPoint { x, k, value })
        })
        .collect()
}

fn grid_flatten(rows: Vec<Result<Vec<GridPoint>>>, capacity: usize) -> Result<Vec<GridPoint>> {
    let mut out = Vec::with_capacity(capacity);
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Evaluate the distribution over the grid, row-major with `x` fastest.
pub fn grid_eval(dist: &QztDistribution, spec: &GridSpec) -> Result<Vec<GridPoint>> {
    let rows = exec::map_ordered((0..spec.nk).collect(), |j| grid_row(dist, spec, j));
    grid_flatten(rows, spec.nx * spec.nk)
}

/// Sequential reference path of [`grid_eval`]; bit-identical.
pub fn grid_eval_seq(dist: &QztDistribution, spec: &GridSpec) -> Result<Vec<GridPoint>> {
    let rows = (0..spec.nk).map(|j| grid_row(dist, spec, j)).collect();
    grid_flatten(rows, spec.nx * spec.nk)
}
