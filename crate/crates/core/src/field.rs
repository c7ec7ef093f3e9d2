//! Core domain types: wave-speed parameters, evaluable scalar fields, Cauchy
//! data, forcing terms, solution evaluators and evaluation grids.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{BiwaveError, Result};

/// Wave speeds `a`, `b` (with `a² > b² > 0`) and the spatial dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiwaveParams {
    a: f64,
    b: f64,
    n: usize,
}

impl BiwaveParams {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(BiwaveError::NonFiniteSpeed { a, b });
        }
        if n < 1 {
            return Err(BiwaveError::InvalidDimension(n));
        }
        if a <= 0.0 || b <= 0.0 {
            return Err(BiwaveError::NonPositiveSpeed { a, b });
        }
        let (a2, b2) = (a * a, b * b);
        if a2 == b2 {
            return Err(BiwaveError::DegenerateSpeeds { a, b });
        }
        if a2 < b2 {
            return Err(BiwaveError::SpeedOrdering { a, b });
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `a² − b²`, the denominator shared by every solution formula.
    pub fn speed_gap(&self) -> f64 {
        self.a * self.a - self.b * self.b
    }

    pub fn with_dimension(&self, n: usize) -> Result<Self> {
        Self::new(self.a, self.b, n)
    }
}

/// Validated construction of [`BiwaveParams`].
pub fn make_params(a: f64, b: f64, n: usize) -> Result<BiwaveParams> {
    BiwaveParams::new(a, b, n)
}

/// One complex exponential `c · exp(i ω k·x)` with integer wavevector `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMode {
    pub k: Vec<i32>,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
struct RealTerm {
    wavevector: Vec<f64>,
    cos: f64,
    sin: f64,
}

/// A real trigonometric polynomial `Σ c_k exp(i ω k·x)` with `c_{−k} = conj(c_k)`.
///
/// `ω` is the base frequency (period `2π/ω` per axis). Modes are kept merged
/// and sorted by `k`; evaluation goes through an equivalent real cosine/sine
/// expansion with one term per `±k` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    base_frequency: f64,
    modes: Vec<TrigMode>,
    terms: Vec<RealTerm>,
}

const CONJ_TOL: f64 = 1e-12;

fn negate(k: &[i32]) -> Vec<i32> {
    k.iter().map(|v| -v).collect()
}

/// First nonzero component positive; the zero vector is its own representative.
fn is_canonical(k: &[i32]) -> bool {
    k.iter().find(|&&v| v != 0).map_or(true, |&v| v > 0)
}

impl TrigPoly {
    pub fn new(dim: usize, base_frequency: f64, modes: Vec<TrigMode>) -> Result<Self> {
        if dim < 1 {
            return Err(BiwaveError::InvalidDimension(dim));
        }
        if !(base_frequency.is_finite() && base_frequency > 0.0) {
            return Err(BiwaveError::NonFinite("trig base frequency"));
        }
        let mut merged: BTreeMap<Vec<i32>, Complex64> = BTreeMap::new();
        for mode in modes {
            if mode.k.len() != dim {
                return Err(BiwaveError::DimensionMismatch {
                    expected: dim,
                    got: mode.k.len(),
                });
            }
            if !(mode.amplitude.re.is_finite() && mode.amplitude.im.is_finite()) {
                return Err(BiwaveError::NonFinite("trig amplitude"));
            }
            *merged.entry(mode.k).or_default() += mode.amplitude;
        }
        merged.retain(|_, c| c.norm() > 0.0);

        let scale = merged.values().map(|c| c.norm()).fold(1.0, f64::max);
        for (k, c) in &merged {
            let partner = merged.get(&negate(k)).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > CONJ_TOL * scale {
                return Err(BiwaveError::NotConjugateSymmetric(k.clone()));
            }
        }

        let modes: Vec<TrigMode> = merged
            .into_iter()
            .map(|(k, amplitude)| TrigMode { k, amplitude })
            .collect();
        let terms = modes
            .iter()
            .filter(|m| is_canonical(&m.k))
            .map(|m| {
                let wavevector = m.k.iter().map(|&v| base_frequency * v as f64).collect();
                if m.k.iter().all(|&v| v == 0) {
                    RealTerm {
                        wavevector,
                        cos: m.amplitude.re,
                        sin: 0.0,
                    }
                } else {
                    // c e^{iθ} + conj(c) e^{−iθ} = 2 Re(c) cos θ − 2 Im(c) sin θ
                    RealTerm {
                        wavevector,
                        cos: 2.0 * m.amplitude.re,
                        sin: -2.0 * m.amplitude.im,
                    }
                }
            })
            .collect();
        Ok(Self {
            dim,
            base_frequency,
            modes,
            terms,
        })
    }

    /// Build from real terms `(k, α, β)` meaning `α cos(ω k·x) + β sin(ω k·x)`.
    pub fn from_real_terms(
        dim: usize,
        base_frequency: f64,
        terms: &[(Vec<i32>, f64, f64)],
    ) -> Result<Self> {
        let mut modes = Vec::with_capacity(2 * terms.len());
        for (k, alpha, beta) in terms {
            if k.iter().all(|&v| v == 0) {
                modes.push(TrigMode {
                    k: k.clone(),
                    amplitude: Complex64::new(*alpha, 0.0),
                });
            } else {
                let c = Complex64::new(0.5 * alpha, -0.5 * beta);
                modes.push(TrigMode {
                    k: k.clone(),
                    amplitude: c,
                });
                modes.push(TrigMode {
                    k: negate(k),
                    amplitude: c.conj(),
                });
            }
        }
        Self::new(dim, base_frequency, modes)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            base_frequency: 1.0,
            modes: Vec::new(),
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::from_real_terms(dim, 1.0, &[(vec![0; dim], value, 0.0)])
    }

    /// `cos(k·x)` at base frequency 1.
    pub fn cos(k: &[i32]) -> Result<Self> {
        Self::from_real_terms(k.len(), 1.0, &[(k.to_vec(), 1.0, 0.0)])
    }

    /// `sin(k·x)` at base frequency 1.
    pub fn sin(k: &[i32]) -> Result<Self> {
        Self::from_real_terms(k.len(), 1.0, &[(k.to_vec(), 0.0, 1.0)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    pub fn modes(&self) -> &[TrigMode] {
        &self.modes
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Physical wavevector `ω k`.
    pub fn wavevector(&self, k: &[i32]) -> Vec<f64> {
        k.iter().map(|&v| self.base_frequency * v as f64).collect()
    }

    /// Largest mode amplitude `max |c_k|`.
    pub fn amplitude_scale(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude.norm()).fold(0.0, f64::max)
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for term in &self.terms {
            let phase: f64 = term.wavevector.iter().zip(x).map(|(k, v)| k * v).sum();
            let (s, c) = phase.sin_cos();
            acc += term.cos * c + term.sin * s;
        }
        acc
    }

    /// Full complex sum `Σ c_k exp(i ω k·x)`, including the imaginary residue.
    pub fn value_complex(&self, x: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .map(|m| {
                let phase: f64 = m
                    .k
                    .iter()
                    .zip(x)
                    .map(|(&k, v)| self.base_frequency * k as f64 * v)
                    .sum();
                m.amplitude * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    fn map_amplitudes(&self, f: impl Fn(&TrigMode) -> Complex64) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| TrigMode {
                k: m.k.clone(),
                amplitude: f(m),
            })
            .collect();
        Self::new(self.dim, self.base_frequency, modes)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.map_amplitudes(|m| m.amplitude * factor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.dim != other.dim {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.base_frequency != other.base_frequency {
            return Err(BiwaveError::IncompatibleTrigPoly(format!(
                "base frequencies {} and {}",
                self.base_frequency, other.base_frequency
            )));
        }
        let modes = self.modes.iter().chain(&other.modes).cloned().collect();
        Self::new(self.dim, self.base_frequency, modes)
    }

    /// Δ applied mode by mode (multiplier `−|ω k|²`).
    pub fn laplacian(&self) -> Result<Self> {
        let w2 = self.base_frequency * self.base_frequency;
        self.map_amplitudes(|m| {
            let k2: f64 = m.k.iter().map(|&v| (v as f64) * (v as f64)).sum();
            -m.amplitude * (w2 * k2)
        })
    }

    /// The field `x ↦ p(x − shift)`.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        self.map_amplitudes(|m| {
            let phase: f64 = m
                .k
                .iter()
                .zip(shift)
                .map(|(&k, s)| self.base_frequency * k as f64 * s)
                .sum();
            m.amplitude * Complex64::from_polar(1.0, -phase)
        })
    }
}

/// Isotropic Gaussian bump `A · exp(−|x − c|² / w²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

impl Gaussian {
    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = self
            .center
            .iter()
            .zip(x)
            .map(|(c, v)| (v - c) * (v - c))
            .sum();
        self.amplitude * (-r2 / (self.width * self.width)).exp()
    }
}

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// An evaluable scalar field on ℝⁿ.
///
/// Only trigonometric polynomials (and the zero field) are accepted by the
/// spectral oracle; Gaussians and closures are for solver evaluation only.
#[derive(Clone)]
pub enum ScalarField {
    Zero { dim: usize },
    Trig(TrigPoly),
    Gaussian(Gaussian),
    Closure { dim: usize, f: PointFn },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Zero { dim } => write!(f, "Zero({dim})"),
            ScalarField::Trig(p) => f.debug_tuple("Trig").field(p).finish(),
            ScalarField::Gaussian(g) => f.debug_tuple("Gaussian").field(g).finish(),
            ScalarField::Closure { dim, .. } => write!(f, "Closure({dim})"),
        }
    }
}

impl From<TrigPoly> for ScalarField {
    fn from(p: TrigPoly) -> Self {
        ScalarField::Trig(p)
    }
}

impl ScalarField {
    pub fn zero(dim: usize) -> Self {
        ScalarField::Zero { dim }
    }

    pub fn gaussian(center: Vec<f64>, width: f64, amplitude: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(BiwaveError::InvalidDimension(0));
        }
        if !(width.is_finite() && width > 0.0) || !amplitude.is_finite() {
            return Err(BiwaveError::NonFinite("gaussian width/amplitude"));
        }
        Ok(ScalarField::Gaussian(Gaussian {
            center,
            width,
            amplitude,
        }))
    }

    pub fn closure(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Closure {
            dim,
            f: Arc::new(f),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ScalarField::Zero { dim } | ScalarField::Closure { dim, .. } => *dim,
            ScalarField::Trig(p) => p.dim(),
            ScalarField::Gaussian(g) => g.center.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarField::Zero { .. } => true,
            ScalarField::Trig(p) => p.is_empty(),
            ScalarField::Gaussian(g) => g.amplitude == 0.0,
            ScalarField::Closure { .. } => false,
        }
    }

    /// Unchecked evaluation; `x.len()` must equal `self.dim()`.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            ScalarField::Zero { .. } => 0.0,
            ScalarField::Trig(p) => p.value(x),
            ScalarField::Gaussian(g) => g.value(x),
            ScalarField::Closure { f, .. } => f(x),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.value(x))
    }

    /// The field as a trigonometric polynomial, if it is one.
    pub fn to_trig(&self) -> Option<TrigPoly> {
        match self {
            ScalarField::Zero { dim } => Some(TrigPoly::zero(*dim)),
            ScalarField::Trig(p) => Some(p.clone()),
            _ => None,
        }
    }
}

/// Checked field evaluation.
pub fn eval_field(f: &ScalarField, x: &[f64]) -> Result<f64> {
    f.eval(x)
}

/// The four Cauchy data `φ0 … φ3` (values of `u, ∂u/∂t, ∂²u/∂t², ∂³u/∂t³` at t = 0).
#[derive(Debug, Clone)]
pub struct InitialData {
    fields: [ScalarField; 4],
}

pub(crate) const PHI_NAMES: [&str; 4] = ["phi0", "phi1", "phi2", "phi3"];

impl InitialData {
    pub fn new(
        phi0: ScalarField,
        phi1: ScalarField,
        phi2: ScalarField,
        phi3: ScalarField,
    ) -> Result<Self> {
        let dim = phi0.dim();
        for f in [&phi1, &phi2, &phi3] {
            if f.dim() != dim {
                return Err(BiwaveError::DimensionMismatch {
                    expected: dim,
                    got: f.dim(),
                });
            }
        }
        Ok(Self {
            fields: [phi0, phi1, phi2, phi3],
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            fields: std::array::from_fn(|_| ScalarField::zero(dim)),
        }
    }

    /// Data with only the top derivative `φ3` nonzero.
    pub fn top_derivative(phi3: ScalarField) -> Self {
        let dim = phi3.dim();
        Self {
            fields: [
                ScalarField::zero(dim),
                ScalarField::zero(dim),
                ScalarField::zero(dim),
                phi3,
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.fields[0].dim()
    }

    pub fn phi(&self, k: usize) -> &ScalarField {
        &self.fields[k]
    }

    pub fn fields(&self) -> &[ScalarField; 4] {
        &self.fields
    }

    /// All four fields as trigonometric polynomials.
    pub fn to_trig(&self) -> Result<[TrigPoly; 4]> {
        let mut out: [TrigPoly; 4] = std::array::from_fn(|_| TrigPoly::zero(self.dim()));
        for (k, f) in self.fields.iter().enumerate() {
            out[k] = f.to_trig().ok_or(BiwaveError::NotTrigPoly(PHI_NAMES[k]))?;
        }
        Ok(out)
    }

    /// `φ0 + tφ1 + t²φ2/2 + t³φ3/6`, the Taylor polynomial forced by the data.
    pub fn taylor(&self, x: &[f64], t: f64) -> f64 {
        let [p0, p1, p2, p3] = &self.fields;
        let mut acc = p0.value(x);
        if !p1.is_zero() {
            acc += t * p1.value(x);
        }
        if !p2.is_zero() {
            acc += 0.5 * t * t * p2.value(x);
        }
        if !p3.is_zero() {
            acc += t * t * t / 6.0 * p3.value(x);
        }
        acc
    }
}

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real time amplitude `g(t)`.
#[derive(Clone)]
pub struct TimeProfile {
    f: TimeFn,
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TimeProfile")
    }
}

impl TimeProfile {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

/// One separable forcing term `g(t) · S(x)` with a trigonometric spatial part.
#[derive(Debug, Clone)]
pub struct ForcingTerm {
    pub space: TrigPoly,
    pub time: TimeProfile,
}

/// Right-hand side `f(x, t)` of the nonhomogeneous problem.
#[derive(Clone)]
pub enum ForcingField {
    Zero {
        dim: usize,
    },
    Separable {
        dim: usize,
        terms: Vec<ForcingTerm>,
        horizon: Option<f64>,
    },
    Closure {
        dim: usize,
        f: SpaceTimeFn,
        horizon: Option<f64>,
    },
}

impl fmt::Debug for ForcingField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingField::Zero { dim } => write!(f, "Zero({dim})"),
            ForcingField::Separable { dim, terms, horizon } => f
                .debug_struct("Separable")
                .field("dim", dim)
                .field("terms", terms)
                .field("horizon", horizon)
                .finish(),
            ForcingField::Closure { dim, horizon, .. } => f
                .debug_struct("Closure")
                .field("dim", dim)
                .field("horizon", horizon)
                .finish(),
        }
    }
}

impl ForcingField {
    pub fn zero(dim: usize) -> Self {
        ForcingField::Zero { dim }
    }

    pub fn separable(dim: usize, terms: Vec<ForcingTerm>) -> Result<Self> {
        for term in &terms {
            if term.space.dim() != dim && !term.space.is_empty() {
                return Err(BiwaveError::DimensionMismatch {
                    expected: dim,
                    got: term.space.dim(),
                });
            }
        }
        Ok(ForcingField::Separable {
            dim,
            terms,
            horizon: None,
        })
    }

    pub fn closure(dim: usize, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        ForcingField::Closure {
            dim,
            f: Arc::new(f),
            horizon: None,
        }
    }

    /// Restrict the forcing to `t ∈ [0, horizon]`.
    pub fn with_horizon(self, limit: f64) -> Self {
        match self {
            ForcingField::Separable { dim, terms, .. } => ForcingField::Separable {
                dim,
                terms,
                horizon: Some(limit),
            },
            ForcingField::Closure { dim, f, .. } => ForcingField::Closure {
                dim,
                f,
                horizon: Some(limit),
            },
            zero => zero,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ForcingField::Zero { dim }
            | ForcingField::Separable { dim, .. }
            | ForcingField::Closure { dim, .. } => *dim,
        }
    }

    pub fn horizon(&self) -> Option<f64> {
        match self {
            ForcingField::Zero { .. } => None,
            ForcingField::Separable { horizon, .. } | ForcingField::Closure { horizon, .. } => {
                *horizon
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ForcingField::Zero { .. } => true,
            ForcingField::Separable { terms, .. } => terms.iter().all(|t| t.space.is_empty()),
            ForcingField::Closure { .. } => false,
        }
    }

    pub fn check_horizon(&self, t: f64) -> Result<()> {
        match self.horizon() {
            Some(horizon) if t > horizon => Err(BiwaveError::ForcingHorizon { t, horizon }),
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        match self {
            ForcingField::Zero { .. } => 0.0,
            ForcingField::Separable { terms, .. } => terms
                .iter()
                .map(|term| term.time.value(t) * term.space.value(x))
                .sum(),
            ForcingField::Closure { f, .. } => f(x, t),
        }
    }

    /// The spatial slice `f(·, τ)` as a scalar field.
    pub fn slice(&self, tau: f64) -> Result<ScalarField> {
        self.check_horizon(tau)?;
        Ok(match self {
            ForcingField::Zero { dim } => ScalarField::zero(*dim),
            ForcingField::Separable { dim, terms, .. } => {
                let mut acc = TrigPoly::zero(*dim);
                for term in terms {
                    acc = acc.add(&term.space.scale(term.time.value(tau))?)?;
                }
                ScalarField::Trig(acc)
            }
            ForcingField::Closure { dim, f, .. } => {
                let f = Arc::clone(f);
                ScalarField::closure(*dim, move |x| f(x, tau))
            }
        })
    }
}

/// Which code path produced a [`SolutionEvaluator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Solver1d,
    SolverOdd,
    SolverEven,
    Duhamel,
    Oracle,
    External,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Solver1d => "solver-1d",
            Provenance::SolverOdd => "solver-odd",
            Provenance::SolverEven => "solver-even",
            Provenance::Duhamel => "duhamel",
            Provenance::Oracle => "oracle",
            Provenance::External => "external",
        }
    }
}

type EvalFn = Arc<dyn Fn(&[f64], f64) -> Result<f64> + Send + Sync>;

/// An immutable map `(x, t) ↦ u(x, t)`.
#[derive(Clone)]
pub struct SolutionEvaluator {
    params: BiwaveParams,
    provenance: Provenance,
    inner: EvalFn,
}

impl fmt::Debug for SolutionEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionEvaluator")
            .field("params", &self.params)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl SolutionEvaluator {
    pub fn new(
        params: BiwaveParams,
        provenance: Provenance,
        f: impl Fn(&[f64], f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            params,
            provenance,
            inner: Arc::new(f),
        }
    }

    /// Wrap an infallible closure, e.g. an analytic reference solution.
    pub fn from_fn(
        params: BiwaveParams,
        f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(params, Provenance::External, move |x, t| Ok(f(x, t)))
    }

    pub fn params(&self) -> &BiwaveParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.n()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        if x.len() != self.params.n() {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.params.n(),
                got: x.len(),
            });
        }
        if !t.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(BiwaveError::NonFinite("evaluation point"));
        }
        if t < 0.0 {
            return Err(BiwaveError::NegativeTime(t));
        }
        (self.inner)(x, t)
    }
}

/// Tensor grid of spatial sample axes and a list of time samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    axes: Vec<Vec<f64>>,
    times: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

/// `count` evenly spaced samples on `[lo, hi]` (both ends included).
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl EvalGrid {
    pub fn new(axes: Vec<Vec<f64>>, times: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(BiwaveError::InvalidGrid("no spatial axes".into()));
        }
        for (i, axis) in axes.iter().enumerate() {
            if axis.is_empty() || !strictly_increasing(axis) {
                return Err(BiwaveError::InvalidGrid(format!(
                    "axis x{} must be non-empty and strictly increasing",
                    i + 1
                )));
            }
        }
        if times.is_empty() || !strictly_increasing(&times) {
            return Err(BiwaveError::InvalidGrid(
                "time samples must be non-empty and strictly increasing".into(),
            ));
        }
        Ok(Self { axes, times })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product::<usize>() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points in row-major order over `(x1, …, xn, t)`, `t` fastest.
    pub fn points(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.axes.len()];
        loop {
            let x: Vec<f64> = idx.iter().zip(&self.axes).map(|(&i, a)| a[i]).collect();
            for &t in &self.times {
                out.push((x.clone(), t));
            }
            let mut d = self.axes.len();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.axes[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn make_params_examples() {
        let p = make_params(1.0, 0.5, 1).unwrap();
        assert_eq!((p.a(), p.b(), p.n()), (1.0, 0.5, 1));
        assert_eq!(make_params(1.0, 1.0, 3).unwrap_err().code(), "degenerate-speeds");
        assert_eq!(make_params(0.5, 1.0, 2).unwrap_err().code(), "ordering");
        assert_eq!(make_params(1.0, 0.0, 2).unwrap_err().code(), "non-positive-speed");
        assert_eq!(make_params(1.0, 0.5, 0).unwrap_err().code(), "invalid-dimension");
        assert_eq!(make_params(f64::NAN, 0.5, 1).unwrap_err().code(), "non-finite-speed");
    }

    #[test]
    fn eval_field_examples() {
        let z = ScalarField::zero(2);
        assert_eq!(eval_field(&z, &[0.3, -1.0]).unwrap(), 0.0);

        let sine = TrigPoly::new(
            1,
            1.0,
            vec![
                TrigMode { k: vec![1], amplitude: Complex64::new(0.0, -0.5) },
                TrigMode { k: vec![-1], amplitude: Complex64::new(0.0, 0.5) },
            ],
        )
        .unwrap();
        let v = eval_field(&sine.into(), &[PI / 2.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        let g = ScalarField::gaussian(vec![0.0], 1.0, 1.0).unwrap();
        assert_eq!(eval_field(&g, &[0.0]).unwrap(), 1.0);

        assert_eq!(
            eval_field(&g, &[0.0, 1.0]).unwrap_err().code(),
            "dimension-mismatch"
        );
    }

    #[test]
    fn conjugate_symmetry_is_enforced() {
        let err = TrigPoly::new(
            1,
            1.0,
            vec![TrigMode { k: vec![1], amplitude: Complex64::new(1.0, 0.0) }],
        )
        .unwrap_err();
        assert_eq!(err.code(), "not-conjugate-symmetric");
    }

    #[test]
    fn imaginary_residue_is_negligible() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let terms: Vec<_> = (0..6)
            .map(|_| {
                let k = vec![rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
                (k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .collect();
        let p = TrigPoly::from_real_terms(3, 1.0, &terms).unwrap();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let c = p.value_complex(&x);
            assert!(c.im.abs() < 1e-12);
            assert!((c.re - p.value(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_ops() {
        let p = TrigPoly::cos(&[1, 1]).unwrap();
        let lap = p.laplacian().unwrap();
        let x = [0.3, 0.4];
        assert!((lap.value(&x) + 2.0 * p.value(&x)).abs() < 1e-14);
        let shifted = p.translate(&[0.1, 0.2]).unwrap();
        assert!((shifted.value(&x) - (0.2f64 + 0.2).cos()).abs() < 1e-14);
        let sum = p.add(&p.scale(-1.0).unwrap()).unwrap();
        assert!(sum.is_empty());
    }

    #[test]
    fn grid_order_is_row_major() {
        let g = EvalGrid::new(vec![vec![0.0, 1.0], vec![5.0, 6.0]], vec![0.1, 0.2]).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], (vec![0.0, 5.0], 0.1));
        assert_eq!(pts[1], (vec![0.0, 5.0], 0.2));
        assert_eq!(pts[2], (vec![0.0, 6.0], 0.1));
        assert_eq!(pts[7], (vec![1.0, 6.0], 0.2));
        assert!(EvalGrid::new(vec![vec![1.0, 0.0]], vec![0.0]).is_err());
        assert!(EvalGrid::new(vec![vec![1.0]], vec![]).is_err());
    }

    #[test]
    fn forcing_slice_matches_value() {
        let f = ForcingField::separable(
            1,
            vec![ForcingTerm {
                space: TrigPoly::cos(&[1]).unwrap(),
                time: TimeProfile::new(|t| t.cos()),
            }],
        )
        .unwrap();
        let s = f.slice(0.7).unwrap();
        assert!((s.value(&[0.3]) - f.value(&[0.3], 0.7)).abs() < 1e-15);
        let limited = f.with_horizon(1.0);
        assert_eq!(limited.slice(1.5).unwrap_err().code(), "forcing-horizon");
    }
}
