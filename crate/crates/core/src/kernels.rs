//! Influence kernels psi on the periodic domain (-1/2, 1/2] and their
//! integral quantities: L1 norm, level-set integrals, cell-averaged
//! convolution weights and circular convolution.
//!
//! Kernels are nonnegative, symmetric (all variants evaluate on a radius)
//! and integrable. The power-law variant |x|^(-alpha) with alpha in (0, 1)
//! is unbounded at the origin but integrable; the origin cell is always
//! handled through exact cell averages, never pointwise evaluation at 0.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_integral, compensated_sum, TORUS_HALF};

/// Relative tolerance for adaptive quadrature on bounded closed-form kernels.
const QUAD_REL_TOL: f64 = 1e-11;

/// An influence function on the torus, evaluated on the radius r in (0, 1/2].
#[derive(Clone)]
pub enum Kernel {
    /// psi(r) = r^(-alpha), alpha in (0, 1). Unbounded but integrable.
    PowerLaw { alpha: f64 },
    /// A bounded closed-form kernel with a known sup norm.
    Bounded {
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        sup_norm: f64,
    },
    /// Piecewise-linear symmetric profile. Constant at `values[0]` inside the
    /// first radius, zero beyond the last.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::PowerLaw { alpha } => write!(f, "PowerLaw {{ alpha: {alpha} }}"),
            Kernel::Bounded { sup_norm, .. } => write!(f, "Bounded {{ sup_norm: {sup_norm} }}"),
            Kernel::Tabulated { radii, values } => f
                .debug_struct("Tabulated")
                .field("radii", radii)
                .field("values", values)
                .finish(),
        }
    }
}

impl Kernel {
    /// Power-law kernel |x|^(-alpha); requires alpha in (0, 1).
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "power-law exponent alpha = {alpha} must lie in the open interval (0, 1)"
            )));
        }
        Ok(Kernel::PowerLaw { alpha })
    }

    /// Constant kernel psi == value.
    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!(
                "constant kernel value {value} must be finite and >= 0"
            )));
        }
        Ok(Kernel::Bounded {
            eval: Arc::new(move |_| value),
            sup_norm: value,
        })
    }

    /// Bounded closed-form kernel with its sup norm.
    pub fn bounded(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sup_norm: f64,
    ) -> Result<Self> {
        if !(sup_norm >= 0.0) || !sup_norm.is_finite() {
            return Err(Error::Domain(format!(
                "sup norm {sup_norm} must be finite and >= 0"
            )));
        }
        Ok(Kernel::Bounded {
            eval: Arc::new(eval),
            sup_norm,
        })
    }

    /// Piecewise-linear kernel through `(radii[i], values[i])`.
    /// Radii must be strictly increasing in (0, 1/2]; values nonnegative.
    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(Error::Domain(format!(
                "tabulated kernel needs matching nonempty radii/values (got {} and {})",
                radii.len(),
                values.len()
            )));
        }
        for w in radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain(
                    "tabulated radii must be strictly increasing".into(),
                ));
            }
        }
        if !(radii[0] > 0.0) || radii[radii.len() - 1] > TORUS_HALF {
            return Err(Error::Domain(
                "tabulated radii must lie in (0, 1/2]".into(),
            ));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Domain(
                "tabulated values must be finite and >= 0".into(),
            ));
        }
        Ok(Kernel::Tabulated { radii, values })
    }

    /// Whether psi is essentially bounded.
    pub fn is_bounded(&self) -> bool {
        !matches!(self, Kernel::PowerLaw { .. })
    }

    /// Sup norm for bounded kernels; `None` for the power law.
    pub fn sup_norm(&self) -> Option<f64> {
        match self {
            Kernel::PowerLaw { .. } => None,
            Kernel::Bounded { sup_norm, .. } => Some(*sup_norm),
            Kernel::Tabulated { values, .. } => {
                Some(values.iter().cloned().fold(0.0, f64::max))
            }
        }
    }

    /// Evaluate psi(r) for 0 < r <= 1/2.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!(
                "kernel evaluated at r = {r}; the singular point r <= 0 is not evaluable"
            )));
        }
        if r > TORUS_HALF {
            return Err(Error::Domain(format!(
                "kernel evaluated at r = {r} beyond the torus half-width 1/2"
            )));
        }
        Ok(self.psi(r))
    }

    /// Unchecked evaluation; callers guarantee 0 < r <= 1/2.
    pub(crate) fn psi(&self, r: f64) -> f64 {
        match self {
            Kernel::PowerLaw { alpha } => {
                // Fast paths for the exponents the pair loops hit hardest.
                if *alpha == 0.5 {
                    r.sqrt().recip()
                } else if *alpha == 0.25 {
                    r.sqrt().sqrt().recip()
                } else if *alpha == 0.75 {
                    let s = r.sqrt();
                    (s * s.sqrt()).recip()
                } else {
                    r.powf(-alpha)
                }
            }
            Kernel::Bounded { eval, .. } => eval(r),
            Kernel::Tabulated { radii, values } => tabulated_value(radii, values, r),
        }
    }

    /// Total weight over the torus: l1 = int_X psi.
    pub fn l1_norm(&self) -> f64 {
        match self {
            Kernel::PowerLaw { alpha } => 2.0f64.powf(*alpha) / (1.0 - alpha),
            _ => 2.0 * self.partial_integral(0.0, TORUS_HALF),
        }
    }

    /// int_0^radius psi(r) dr doubled, i.e. the kernel weight of the ball
    /// {|y| <= radius}. Radii beyond 1/2 are clamped to the torus.
    pub fn ball_integral(&self, radius: f64) -> Result<f64> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!(
                "ball radius {radius} must be finite and >= 0"
            )));
        }
        Ok(2.0 * self.partial_integral(0.0, radius.min(TORUS_HALF)))
    }

    /// Exact (or adaptively integrated) int_a^b psi(r) dr for 0 <= a <= b <= 1/2.
    fn partial_integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!((0.0..=TORUS_HALF + 1e-15).contains(&a) && a <= b && b <= TORUS_HALF + 1e-15);
        if b <= a {
            return 0.0;
        }
        match self {
            Kernel::PowerLaw { alpha } => {
                let p = 1.0 - alpha;
                (b.powf(p) - a.powf(p)) / p
            }
            Kernel::Bounded { eval, .. } => {
                adaptive_integral(&|r| eval(r.max(f64::MIN_POSITIVE)), a, b, QUAD_REL_TOL)
            }
            Kernel::Tabulated { radii, values } => {
                tabulated_integral(radii, values, a, b)
            }
        }
    }

    /// Level-set integral I(k) = int over {psi >= k} of psi.
    ///
    /// Nonincreasing in k with I(0) = l1_norm; for the power law the level
    /// set is the ball of radius min(k^(-1/alpha), 1/2).
    pub fn level_set_integral(&self, k: f64) -> Result<f64> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!(
                "level-set threshold k = {k} must be finite and >= 0"
            )));
        }
        if k == 0.0 {
            // The level set is the whole torus: identical to the L1 norm,
            // bitwise.
            return Ok(self.l1_norm());
        }
        Ok(match self {
            Kernel::PowerLaw { alpha } => {
                let r_k = k.powf(-1.0 / alpha);
                if r_k >= TORUS_HALF {
                    self.l1_norm()
                } else {
                    2.0 * r_k.powf(1.0 - alpha) / (1.0 - alpha)
                }
            }
            Kernel::Bounded { eval, .. } => {
                2.0 * adaptive_integral(
                    &|r| {
                        let v = eval(r.max(f64::MIN_POSITIVE));
                        if v >= k {
                            v
                        } else {
                            0.0
                        }
                    },
                    0.0,
                    TORUS_HALF,
                    QUAD_REL_TOL,
                )
            }
            Kernel::Tabulated { radii, values } => {
                2.0 * tabulated_level_set(radii, values, k)
            }
        })
    }

    /// Cell-averaged convolution weights on a uniform n-cell torus grid.
    ///
    /// weights[j] integrates psi over the cell centered at the displacement
    /// j*dx (periodically wrapped); the origin cell uses the exact integral
    /// so the singularity never gets evaluated pointwise. Requires n even
    /// and >= 4 so the singular cell is centered at 0.
    #[allow(clippy::needless_range_loop)] // m indexes both weights[m] and weights[n-m]
    pub fn cell_weights(&self, n: usize) -> Result<ConvolutionWeights> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::config(format!(
                "grid size n = {n} must be even and >= 4"
            )));
        }
        let dx = 1.0 / n as f64;
        let half = n / 2;
        let mut weights = vec![0.0; n];
        weights[0] = 2.0 * self.partial_integral(0.0, 0.5 * dx);
        for m in 1..half {
            let c = m as f64 * dx;
            weights[m] = self.partial_integral(c - 0.5 * dx, c + 0.5 * dx);
        }
        // Antipodal cell [1/2 - dx/2, 1/2 + dx/2] folds onto itself.
        weights[half] = 2.0 * self.partial_integral(TORUS_HALF - 0.5 * dx, TORUS_HALF);
        for m in 1..half {
            weights[n - m] = weights[m];
        }
        Ok(ConvolutionWeights { dx, weights })
    }
}

/// Piecewise-linear profile value: constant inside the first radius, linear
/// between samples, zero strictly beyond the last radius.
fn tabulated_value(radii: &[f64], values: &[f64], r: f64) -> f64 {
    let last = radii.len() - 1;
    if r <= radii[0] {
        values[0]
    } else if r > radii[last] {
        0.0
    } else {
        let idx = radii.partition_point(|&p| p < r);
        let (r0, r1) = (radii[idx - 1], radii[idx]);
        let (v0, v1) = (values[idx - 1], values[idx]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }
}

/// Exact integral of the piecewise-linear tabulated profile over [a, b].
/// Midpoint evaluation per linearity segment is exact and immune to the
/// jump at the last radius.
fn tabulated_integral(radii: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    // Breakpoints of linearity restricted to [a, b].
    let mut pts = vec![a];
    for &r in radii {
        if r > a && r < b {
            pts.push(r);
        }
    }
    pts.push(b);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        total += (q - p) * tabulated_value(radii, values, 0.5 * (p + q));
    }
    total
}

/// Exact int over {psi >= k} of psi on (0, 1/2] for the tabulated profile.
fn tabulated_level_set(radii: &[f64], values: &[f64], k: f64) -> f64 {
    let last = radii.len() - 1;
    let mut total = 0.0;
    // Constant head segment (0, radii[0]].
    if values[0] >= k {
        total += values[0] * radii[0];
    }
    // Linear interior segments.
    for i in 0..last {
        let (p, q) = (radii[i], radii[i + 1]);
        let (vp, vq) = (values[i], values[i + 1]);
        total += linear_piece_level_set(p, q, vp, vq, k);
    }
    // Zero tail [radii[last], 1/2]: contributes only when k == 0, and then 0.
    total
}

/// Integral of the linear function through (p, vp), (q, vq) over the sub-
/// interval of [p, q] where it is >= k.
fn linear_piece_level_set(p: f64, q: f64, vp: f64, vq: f64, k: f64) -> f64 {
    if vp >= k && vq >= k {
        return 0.5 * (vp + vq) * (q - p);
    }
    if vp < k && vq < k {
        return 0.0;
    }
    let rc = p + (k - vp) * (q - p) / (vq - vp);
    if vp >= k {
        0.5 * (vp + k) * (rc - p)
    } else {
        0.5 * (k + vq) * (q - rc)
    }
}

/// Cell-integrated kernel weights for circular convolution on a uniform grid.
///
/// Immutable after construction; sharing across workers is safe.
#[derive(Debug, Clone)]
pub struct ConvolutionWeights {
    dx: f64,
    weights: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sum of all weights; equals the kernel L1 norm up to rounding.
    pub fn total(&self) -> f64 {
        compensated_sum(self.weights.iter().cloned())
    }

    /// Circular convolution (psi * field)_i = sum_j weights[j] field[i-j mod n].
    pub fn convolve(&self, field: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; field.len()];
        self.convolve_into(field, &mut out)?;
        Ok(out)
    }

    /// Convolution into a caller-provided buffer.
    pub fn convolve_into(&self, field: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.weights.len();
        if field.len() != n || out.len() != n {
            return Err(Error::config(format!(
                "convolution length mismatch: weights n = {n}, field = {}, out = {}",
                field.len(),
                out.len()
            )));
        }
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            // j <= i wraps nowhere; j > i wraps once.
            for j in 0..=i {
                acc += self.weights[j] * field[i - j];
            }
            for j in (i + 1)..n {
                acc += self.weights[j] * field[n + i - j];
            }
            *o = acc;
        }
        Ok(())
    }
}
