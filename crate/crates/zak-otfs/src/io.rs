//! The discrete DD input/output relation: dense `MN x MN` channel matrix
//! construction from an effective-channel grid, received-frame synthesis
//! with colored noise, and a direct quadruple-sum oracle used to validate
//! the matrix path.

use crate::dd::{DdIndex, ExtGrid, GridConfig, PhaseTable, QpFrame};
use crate::error::Error;
use crate::filters::NoiseCovariance;
use crate::linalg::{self, CMat};
use crate::{Result, C64};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Wrap truncation of the quasi-periodic replica sums; `|m|,|n| <= 2` is
/// accurate to well below working tolerances for crystallized channels.
pub const WRAP_MAX: i64 = 2;

/// Dense DD channel matrix with the vectorization `index = l*M + k`.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    grid: GridConfig,
    mat: CMat,
}

impl ChannelMatrix {
    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn from_mat(grid: GridConfig, mat: CMat) -> Self {
        Self { grid, mat }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    /// `y = H x` for a vectorized frame.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.mat, x)
    }

    /// Squared Frobenius norm.
    pub fn energy(&self) -> f64 {
        linalg::frobenius_sq(&self.mat)
    }
}

/// Received DD frame, vectorized as `y[l*M + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RxFrame {
    grid: GridConfig,
    y: Vec<C64>,
}

impl RxFrame {
    pub fn new(grid: GridConfig, y: Vec<C64>) -> Result<Self> {
        if y.len() != grid.mn() {
            return Err(Error::LengthMismatch { expected: grid.mn(), got: y.len() });
        }
        Ok(Self { grid, y })
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.y[self.grid.vec_index(k, l)]
    }

    pub fn as_vec(&self) -> &[C64] {
        &self.y
    }

    pub fn as_vec_mut(&mut self) -> &mut [C64] {
        &mut self.y
    }
}

/// Build the DD channel matrix
///
/// `H[l'M+k', lM+k] = sum_{|m|,|n|<=2} h_eff[k'-k-nM, l'-l-mN]
///                    e^{j2pi nl/N} e^{j2pi (l'-l-mN)(k+nM)/(MN)}`
///
/// from an effective channel sampled on (at least) the standard extended
/// grid. Both unit phases combine into a single root-of-unity lookup:
/// `nl/N + (l'-l-mN)(k+nM)/(MN) = (nlM + (l'-l-mN)(k+nM)) / (MN)`.
pub fn build_h(heff: &ExtGrid) -> Result<ChannelMatrix> {
    let grid = *heff.grid();
    let (m, n) = (grid.m() as i64, grid.n() as i64);
    if heff.k_min() > -(3 * m - 1)
        || heff.k_max() < 3 * m - 1
        || heff.l_min() > -(3 * n - 1)
        || heff.l_max() < 3 * n - 1
    {
        return Err(Error::SupportMismatch(format!(
            "effective channel window [{}, {}]x[{}, {}] does not cover the standard extent",
            heff.k_min(),
            heff.k_max(),
            heff.l_min(),
            heff.l_max()
        )));
    }
    let mn = grid.mn();
    let mni = mn as i64;
    let phases = PhaseTable::new(&grid);
    let data = heff.data();
    let nl_stride = heff.nl() as i64;
    let (k_min, l_min) = (heff.k_min(), heff.l_min());

    let mut mat = CMat::zeros(mn, mn);
    for col in 0..mn {
        let (k, l) = grid.bin_of(col);
        let (k, l) = (k as i64, l as i64);
        // column-major fill: output row index is l'*M + k'
        for nw in -WRAP_MAX..=WRAP_MAX {
            let kn = k + nw * m;
            let base_exp = nw * l * m;
            for mw in -WRAP_MAX..=WRAP_MAX {
                for lp in 0..n {
                    let dl = lp - l - mw * n;
                    let exp = (base_exp + dl * kn).rem_euclid(mni);
                    let ph = phases.phase_2pi(exp);
                    // h_eff flat offset for (dk = k'-k-nM, dl), k' = 0
                    let mut off = (-k - nw * m - k_min) * nl_stride + (dl - l_min);
                    let row0 = (lp * m) as usize;
                    for kp in 0..m as usize {
                        let v = data[off as usize];
                        if v.re != 0.0 || v.im != 0.0 {
                            let cur = mat[(row0 + kp, col)];
                            mat[(row0 + kp, col)] = cur + v * ph;
                        }
                        off += nl_stride;
                    }
                }
            }
        }
    }
    Ok(ChannelMatrix { grid, mat })
}

/// Zero-mean circularly-symmetric unit-variance complex Gaussian vector.
fn standard_complex_gaussian(len: usize, seed: u64, stream: u64) -> Vec<C64> {
    use rand_distr::StandardNormal;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// Symmetric factor `F` of a noise covariance (`F F^H = C`), used to draw
/// colored noise. Eigenvalues are clipped at zero; they only go negative
/// through roundoff.
#[derive(Debug, Clone)]
pub struct NoiseFactor {
    grid: GridConfig,
    f: CMat,
}

impl NoiseFactor {
    pub fn from_covariance(c: &NoiseCovariance) -> Result<Self> {
        let (f, _) = linalg::psd_factor(c.mat(), 1e-8)?;
        Ok(Self { grid: *c.grid(), f })
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    /// One colored-noise draw, scaled by `scale` (amplitude units).
    pub fn draw(&self, scale: f64, seed: u64, stream: u64) -> Vec<C64> {
        let xi = standard_complex_gaussian(self.grid.mn(), seed, stream);
        let mut n = linalg::matvec(&self.f, &xi);
        for v in &mut n {
            *v *= scale;
        }
        n
    }
}

/// Synthesize a received frame `y = H x + n` with colored Gaussian noise of
/// covariance `scale^2 * F F^H`. Pass `None` for the noiseless limit.
pub fn synthesize_rx(
    h: &ChannelMatrix,
    x: &[C64],
    noise: Option<(&NoiseFactor, f64)>,
    seed: u64,
    stream: u64,
) -> Result<RxFrame> {
    if x.len() != h.grid.mn() {
        return Err(Error::LengthMismatch { expected: h.grid.mn(), got: x.len() });
    }
    let mut y = h.apply(x);
    if let Some((factor, scale)) = noise {
        if factor.grid != h.grid {
            return Err(Error::GridMismatch("noise factor grid differs from channel grid".into()));
        }
        let n = factor.draw(scale, seed, stream);
        for (yi, ni) in y.iter_mut().zip(n) {
            *yi += ni;
        }
    }
    RxFrame::new(h.grid, y)
}

/// Direct evaluation of the noiseless I/O relation as the quadruple sum
///
/// `y[k',l'] = sum_{|m|<=m_max, |n|<=n_max} sum_{k,l} h_eff[k'-k-nM, l'-l-mN]
///            x[k,l] e^{j2pi nl/N} e^{j2pi (l'-l-mN)(k+nM)/(MN)}`
///
/// with no matrix in between. Values of `h_eff` outside its stored window
/// read as zero.
pub fn io_oracle_direct(heff: &ExtGrid, x: &QpFrame, m_max: i64, n_max: i64) -> Result<RxFrame> {
    if heff.grid() != x.grid() {
        return Err(Error::GridMismatch("effective channel and frame grids differ".into()));
    }
    let grid = *heff.grid();
    let (m, n) = (grid.m() as i64, grid.n() as i64);
    let mni = grid.mn() as i64;
    let phases = PhaseTable::new(&grid);
    let mut y = vec![C64::new(0.0, 0.0); grid.mn()];
    for kp in 0..m {
        for lp in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for nw in -n_max..=n_max {
                for mw in -m_max..=m_max {
                    for k in 0..m {
                        for l in 0..n {
                            let h = heff.get(DdIndex::new(kp - k - nw * m, lp - l - mw * n));
                            if h.re == 0.0 && h.im == 0.0 {
                                continue;
                            }
                            let xv = x.get(k as usize, l as usize);
                            if xv.re == 0.0 && xv.im == 0.0 {
                                continue;
                            }
                            let exp = (nw * l * m + (lp - l - mw * n) * (k + nw * m)).rem_euclid(mni);
                            acc += h * xv * phases.phase_2pi(exp);
                        }
                    }
                }
            }
            y[grid.vec_index(kp as usize, lp as usize)] = acc;
        }
    }
    RxFrame::new(grid, y)
}
