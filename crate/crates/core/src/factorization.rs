//! The shifted-copy convolution matrix `X̃`, its polar factor `L`, and the
//! per-element target points.
//!
//! `X̃` is `(N+Q-1) x Q` with column `j` holding `x_0..x_{N-1}` at rows
//! `j..j+N-1`, so `X̃^H X̃` is the Hermitian Toeplitz matrix of the first `Q`
//! autocorrelation lags. With the economy SVD `X̃^H = U1 Σ U2^H`, the
//! orthonormal-column matrix nearest to `X̃` is `L = U2 U1^H`.
//!
//! Two factorizations are provided: a dense SVD, and a randomized range
//! finder that only ever holds `O(S (N+Q))` numbers for a sketch of rank `S`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::correlation::autocorrelation_lags;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::metrics::chebyshev_norm;
use crate::sequence::ComplexSequence;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Implicit `(N+Q-1) x Q` convolution matrix of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix {
    x: ComplexSequence,
    q: usize,
    // r_0..r_{Q-1}
    lags: Vec<C64>,
}

impl ConvolutionMatrix {
    /// Builds `X̃` for window `q`, requiring `2 <= q <= N`.
    pub fn new(x: &ComplexSequence, q: usize) -> Result<Self> {
        if q < 2 || q > x.len() {
            return Err(Error::invalid("q", format!("need 2 <= Q <= N = {}, got {q}", x.len())));
        }
        Ok(Self::with_window(x, q))
    }

    /// Like [`new`](Self::new) but also admits `q = 1`.
    pub(crate) fn with_window(x: &ComplexSequence, q: usize) -> Self {
        debug_assert!(q >= 1 && q <= x.len());
        let mut lags = autocorrelation_lags(x, q);
        lags[0].im = 0.0;
        Self { x: x.clone(), q, lags }
    }

    pub fn source(&self) -> &ComplexSequence {
        &self.x
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn rows(&self) -> usize {
        self.x.len() + self.q - 1
    }

    pub fn cols(&self) -> usize {
        self.q
    }

    /// Autocorrelation lags `r_0..r_{Q-1}` of the source.
    pub fn lags(&self) -> &[C64] {
        &self.lags
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match i.checked_sub(j) {
            Some(k) if k < self.x.len() && j < self.q => self.x[k],
            _ => ZERO,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.entry(i, j))
    }

    /// `X̃^H X̃`, assembled from the autocorrelation lags.
    pub fn gram(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.q, self.q, |i, j| {
            if i >= j {
                self.lags[i - j]
            } else {
                self.lags[j - i].conj()
            }
        })
    }

    /// `X̃ v` for `v` of length `Q`.
    pub fn mul(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.q, "vector length must equal Q");
        let x = self.x.samples();
        let mut out = vec![ZERO; self.rows()];
        for (j, &vj) in v.iter().enumerate() {
            for (o, &xn) in out[j..j + x.len()].iter_mut().zip(x) {
                *o += xn * vj;
            }
        }
        out
    }

    /// `X̃^H w` for `w` of length `N+Q-1`.
    pub fn mul_adjoint(&self, w: &[C64]) -> Vec<C64> {
        assert_eq!(w.len(), self.rows(), "vector length must equal N+Q-1");
        let x = self.x.samples();
        (0..self.q)
            .map(|j| x.iter().zip(&w[j..j + x.len()]).map(|(a, b)| a.conj() * b).sum())
            .collect()
    }

    /// `X̃^H X̃ v` through the Toeplitz gram, `O(Q^2)`.
    pub fn gram_mul(&self, v: &[C64]) -> Vec<C64> {
        (0..self.q)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .map(|(j, &vj)| {
                        let g = if i >= j { self.lags[i - j] } else { self.lags[j - i].conj() };
                        g * vj
                    })
                    .sum()
            })
            .collect()
    }
}

/// A linear map exposing the products the randomized factorization needs.
pub(crate) trait Operator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, v: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, w: &[C64]) -> Vec<C64>;
    fn gram_apply(&self, v: &[C64]) -> Vec<C64> {
        self.apply_adjoint(&self.apply(v))
    }
}

impl Operator for ConvolutionMatrix {
    fn rows(&self) -> usize {
        ConvolutionMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        self.q
    }
    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.mul(v)
    }
    fn apply_adjoint(&self, w: &[C64]) -> Vec<C64> {
        self.mul_adjoint(w)
    }
    fn gram_apply(&self, v: &[C64]) -> Vec<C64> {
        self.gram_mul(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMode {
    Exact,
    Randomized { rank: usize, completed: bool },
}

/// How entries outside the sketched subspace are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completion {
    /// Use the rank-`S` product `U2 U1^H` as is.
    None,
    /// Treat the unsketched singular values as `sqrt(r_0)`: the target becomes
    /// `U2 U1^H + X̃ (I - U1 U1^H) / sqrt(r_0)`. Near convergence `X̃^H X̃`
    /// approaches `r_0 I`, so this is the polar factor's first-order
    /// behaviour on the complement.
    #[default]
    Isotropic,
}

/// Rank and seed of a Gaussian sketch `Ω` of shape `(N+Q-1) x S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSketch {
    pub rank: usize,
    pub seed: u64,
}

impl RandomSketch {
    /// The sketch matrix this seed determines: independent standard normal
    /// real and imaginary parts, drawn column by column from ChaCha8.
    pub fn omega(&self, rows: usize) -> DMatrix<C64> {
        draw_gaussian(rows, self.rank, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }
}

pub(crate) fn draw_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(rows, cols, ZERO);
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = C64::new(re, im);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizedOptions {
    pub rank: usize,
    /// Power iterations with `X̃^H X̃ - r_0 I` after the initial projection.
    /// They steer the sketch toward the directions whose singular values
    /// deviate most from `sqrt(r_0)`, which are the ones the design loop must
    /// correct.
    pub power_iterations: usize,
    pub completion: Completion,
}

impl RandomizedOptions {
    /// The plain range finder: one projection, no power iterations, no
    /// completion.
    pub fn literal(rank: usize) -> Self {
        Self {
            rank,
            power_iterations: 0,
            completion: Completion::None,
        }
    }

    /// The configuration the randomized design loop uses by default.
    pub fn tuned(rank: usize) -> Self {
        Self {
            rank,
            power_iterations: 2,
            completion: Completion::Isotropic,
        }
    }
}

/// `L` in factored form `U2 U1^H` (with `U1` `Q x K`, `U2` `(N+Q-1) x K`),
/// plus what the target completion needs.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFactor {
    mode: FactorMode,
    u1: DMatrix<C64>,
    u2: DMatrix<C64>,
    sigma: Vec<f64>,
    // Exact mode materializes L; the randomized mode never does.
    dense: Option<DMatrix<C64>>,
    source: Option<(ComplexSequence, f64)>,
    sketch_len: usize,
}

impl UnitaryFactor {
    pub fn mode(&self) -> FactorMode {
        self.mode
    }

    pub fn rows(&self) -> usize {
        self.u2.nrows()
    }

    pub fn cols(&self) -> usize {
        self.u1.nrows()
    }

    /// Number of retained singular triplets (`Q` exact, `S` randomized).
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    /// Entry `(i, j)` of `L = U2 U1^H`.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        if let Some(d) = &self.dense {
            return d[(i, j)];
        }
        (0..self.rank()).map(|s| self.u2[(i, s)] * self.u1[(j, s)].conj()).sum()
    }

    /// Entry `(i, j)` of the matrix the center step targets: `L` itself, or
    /// its completion in randomized mode.
    pub fn target_entry(&self, i: usize, j: usize) -> C64 {
        match &self.source {
            None => self.entry(i, j),
            Some((x, r0)) => {
                let sqrt_r0 = r0.sqrt();
                let base = match i.checked_sub(j) {
                    Some(k) if k < x.len() => x[k] / sqrt_r0,
                    _ => ZERO,
                };
                (0..self.rank()).fold(base, |acc, s| {
                    acc + self.u2[(i, s)] * (1.0 - self.sigma[s] / sqrt_r0) * self.u1[(j, s)].conj()
                })
            }
        }
    }

    /// `L` materialized densely.
    pub fn dense(&self) -> DMatrix<C64> {
        match &self.dense {
            Some(d) => d.clone(),
            None => &self.u2 * self.u1.adjoint(),
        }
    }

    /// `‖L^H L - I‖_∞` for the exact factor. For a rank-`S` factor `L^H L` is
    /// a projection, so the residual is measured on the retained subspace:
    /// the larger of `‖U1^H U1 - I_S‖_∞` and `‖U2^H U2 - I_S‖_∞`.
    pub fn orthonormality_residual(&self) -> f64 {
        let id = |k| DMatrix::<C64>::identity(k, k);
        let cheb = |m: DMatrix<C64>| chebyshev_norm(&m).unwrap_or(f64::INFINITY);
        match self.mode {
            FactorMode::Exact => {
                let l = self.dense();
                cheb(l.adjoint() * &l - id(self.cols()))
            }
            FactorMode::Randomized { .. } => {
                let k = self.rank();
                cheb(self.u1.adjoint() * &self.u1 - id(k)).max(cheb(self.u2.adjoint() * &self.u2 - id(k)))
            }
        }
    }

    /// `U1 Σ U2^H`, the approximation of `X̃^H` the factor was built from.
    pub fn reconstruct_adjoint(&self) -> DMatrix<C64> {
        let mut scaled = self.u1.clone();
        for (s, &sv) in self.sigma.iter().enumerate() {
            scaled.column_mut(s).scale_mut(sv);
        }
        scaled * self.u2.adjoint()
    }

    /// Peak number of complex/real values held while building and storing
    /// the factor (excluding the input sequence).
    pub fn working_set_len(&self) -> usize {
        self.u1.len() + self.u2.len() + self.sigma.len() + self.dense.as_ref().map_or(0, |d| d.len()) + self.sketch_len
    }

    /// The `Q` targets for element `n` (0-based): `scale · L̂[n+j, j]`,
    /// `j = 0..Q`, where `L̂` is the completed target.
    pub fn mu_set(&self, n: usize, scale: f64) -> Vec<C64> {
        (0..self.cols()).map(|j| self.target_entry(n + j, j) * scale).collect()
    }
}

/// Dense economy SVD of `X̃^H`, returning `L = U2 U1^H`.
pub fn exact_unitary_factor(xt: &ConvolutionMatrix) -> Result<UnitaryFactor> {
    let xh = xt.to_dense().adjoint();
    let svd = xh.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numerical("SVD did not return singular vectors".into())),
    };
    // X̃^H = u Σ v_t, hence U1 = u and U2 = v_t^H
    let u2 = v_t.adjoint();
    let l = &u2 * u.adjoint();
    if l.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite unitary factor".into()));
    }
    Ok(UnitaryFactor {
        mode: FactorMode::Exact,
        sigma: svd.singular_values.iter().copied().collect(),
        u1: u,
        u2,
        dense: Some(l),
        source: None,
        sketch_len: 0,
    })
}

/// Randomized rank-`s` factor with a sketch drawn from `seed`, using the plain
/// range finder (see [`RandomizedOptions::literal`]).
pub fn randomized_unitary_factor(xt: &ConvolutionMatrix, s: usize, seed: u64) -> Result<UnitaryFactor> {
    randomized_unitary_factor_with(xt, &RandomizedOptions::literal(s), &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Randomized factor drawing its sketch from `rng`, so that a design loop can
/// take a fresh `Ω` every cycle from one seeded stream.
pub fn randomized_unitary_factor_with<R: Rng + ?Sized>(
    xt: &ConvolutionMatrix,
    options: &RandomizedOptions,
    rng: &mut R,
) -> Result<UnitaryFactor> {
    let s = options.rank;
    if s < 1 || s > xt.q() {
        return Err(Error::invalid("sketch_rank", format!("need 1 <= S <= Q = {}, got {s}", xt.q())));
    }
    let r0 = xt.lags()[0].re;
    let low = sketch_svd(xt, s, options.power_iterations, r0, rng)?;
    let source = match options.completion {
        Completion::Isotropic if r0 > 0.0 => Some((xt.source().clone(), r0)),
        _ => None,
    };
    Ok(UnitaryFactor {
        mode: FactorMode::Randomized {
            rank: s,
            completed: source.is_some(),
        },
        u1: low.u1,
        u2: low.u2,
        sigma: low.sigma,
        dense: None,
        source,
        sketch_len: low.sketch_len,
    })
}

pub(crate) struct LowRank {
    pub u1: DMatrix<C64>,
    pub u2: DMatrix<C64>,
    pub sigma: Vec<f64>,
    pub sketch_len: usize,
}

/// Range finder for `A^H` (`A` is `rows x cols`): `Y = A^H Ω`, optional power
/// iterations with `A^H A - shift I`, thin QR, then the SVD of the small
/// factor `B = Q_f^H A^H`.
pub(crate) fn sketch_svd<Op: Operator, R: Rng + ?Sized>(
    op: &Op,
    s: usize,
    power_iterations: usize,
    shift: f64,
    rng: &mut R,
) -> Result<LowRank> {
    let (rows, cols) = (op.rows(), op.cols());
    let omega = draw_gaussian(rows, s, rng);
    let mut y = DMatrix::from_element(cols, s, ZERO);
    for k in 0..s {
        let col: Vec<C64> = omega.column(k).iter().copied().collect();
        y.set_column(k, &nalgebra::DVector::from_vec(op.apply_adjoint(&col)));
    }
    let sketch_len = omega.len() + y.len();
    drop(omega);

    for _ in 0..power_iterations {
        let q = y.clone().qr().q();
        let mut z = DMatrix::from_element(cols, s, ZERO);
        for k in 0..s {
            let col: Vec<C64> = q.column(k).iter().copied().collect();
            let g = op.gram_apply(&col);
            let shifted: Vec<C64> = g.iter().zip(&col).map(|(a, b)| a - b * shift).collect();
            z.set_column(k, &nalgebra::DVector::from_vec(shifted));
        }
        // At an exact fixed point the shifted gram vanishes; keep the
        // previous subspace rather than orthonormalizing round-off.
        if z.norm() <= 1e-13 * shift.abs().max(f64::MIN_POSITIVE) * q.norm() {
            break;
        }
        y = z;
    }
    let qf = y.qr().q();

    // W = A Q_f, so B = W^H = Û1 Σ̂ U2^H with Û1 = V_w and U2 = U_w.
    let mut w = DMatrix::from_element(rows, s, ZERO);
    for k in 0..s {
        let col: Vec<C64> = qf.column(k).iter().copied().collect();
        w.set_column(k, &nalgebra::DVector::from_vec(op.apply(&col)));
    }
    let w_len = w.len();
    let svd = w.svd(true, true);
    let (u_w, v_t_w) = match (svd.u, svd.v_t) {
        (Some(u), Some(v)) => (u, v),
        _ => return Err(Error::Numerical("SVD did not return singular vectors".into())),
    };
    let u1 = &qf * v_t_w.adjoint();
    Ok(LowRank {
        u1,
        u2: u_w,
        sigma: svd.singular_values.iter().copied().collect(),
        sketch_len: sketch_len + w_len,
    })
}

/// The `Q` targets for element `n` (0-based) as a point set:
/// `scale · L̂[n+j, j]` for `j = 0..Q`.
pub fn gather_mu(factor: &UnitaryFactor, n: usize, scale: f64) -> Result<PointSet> {
    let len = factor.rows() + 1 - factor.cols();
    if n >= len {
        return Err(Error::invalid("n", format!("element index {n} out of range 0..{len}")));
    }
    Ok(PointSet::from_vec_unchecked(factor.mu_set(n, scale)))
}
