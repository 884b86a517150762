//! Pilot frame construction: exclusive and embedded layouts, read-off and
//! estimation regions, and the detection mask.

use crate::dd::{DdIndex, GridConfig, QpFrame};
use crate::error::Error;
use crate::{Result, C64};

/// Frame flavor: pilot-only, or pilot plus guarded data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Exclusive,
    Embedded,
}

/// Axis-aligned rectangle of integer DD indices (inclusive bounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub k_lo: i64,
    pub k_hi: i64,
    pub l_lo: i64,
    pub l_hi: i64,
}

impl Region {
    /// Exclusive-frame read-off region: the whole fundamental period.
    pub fn r_exc(grid: &GridConfig) -> Self {
        Self { k_lo: 0, k_hi: grid.m() as i64 - 1, l_lo: 0, l_hi: grid.n() as i64 - 1 }
    }

    /// Exclusive model-free estimation region, centered:
    /// `[-M/2, M/2) x [-N/2, N/2)`.
    pub fn f_exc(grid: &GridConfig) -> Self {
        let (m, n) = (grid.m() as i64, grid.n() as i64);
        Self { k_lo: -m / 2, k_hi: m / 2 - 1, l_lo: -n / 2, l_hi: n / 2 - 1 }
    }

    /// Embedded-frame read-off region (in frame coordinates):
    /// delay rows within `2*k_max` of the pilot, all Doppler columns.
    pub fn r_emb(grid: &GridConfig, k_max: usize) -> Self {
        let m = grid.m() as i64;
        let k = k_max as i64;
        Self { k_lo: m / 2 - 2 * k, k_hi: m / 2 + 2 * k, l_lo: 0, l_hi: grid.n() as i64 - 1 }
    }

    /// Embedded model-free estimation region, centered:
    /// `[-2*k_max, 2*k_max] x [-N/2, N/2)`.
    pub fn f_emb(grid: &GridConfig, k_max: usize) -> Self {
        let n = grid.n() as i64;
        let k = k_max as i64;
        Self { k_lo: -2 * k, k_hi: 2 * k, l_lo: -n / 2, l_hi: n / 2 - 1 }
    }

    pub fn contains(&self, idx: DdIndex) -> bool {
        idx.k >= self.k_lo && idx.k <= self.k_hi && idx.l >= self.l_lo && idx.l <= self.l_hi
    }

    pub fn num_cells(&self) -> usize {
        ((self.k_hi - self.k_lo + 1) * (self.l_hi - self.l_lo + 1)) as usize
    }

    /// Translate by `(dk, dl)`.
    pub fn shifted(&self, dk: i64, dl: i64) -> Self {
        Self {
            k_lo: self.k_lo + dk,
            k_hi: self.k_hi + dk,
            l_lo: self.l_lo + dl,
            l_hi: self.l_hi + dl,
        }
    }
}

/// Binary detection mask over the fundamental period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    grid_m: usize,
    grid_n: usize,
    ones: Vec<bool>,
}

impl Mask {
    pub fn is_set(&self, k: usize, l: usize) -> bool {
        self.ones[l * self.grid_m + k]
    }

    pub fn count_ones(&self) -> usize {
        self.ones.iter().filter(|&&b| b).count()
    }

    /// Zero a vectorized frame outside the mask.
    pub fn apply(&self, y: &[C64]) -> Vec<C64> {
        y.iter()
            .enumerate()
            .map(|(i, &v)| if self.ones[i] { v } else { C64::new(0.0, 0.0) })
            .collect()
    }

    /// Mask with ones exactly on `region` (frame coordinates).
    pub fn from_region(grid: &GridConfig, region: &Region) -> Self {
        let (m, n) = (grid.m(), grid.n());
        let mut ones = vec![false; grid.mn()];
        for k in 0..m {
            for l in 0..n {
                if region.contains(DdIndex::new(k as i64, l as i64)) {
                    ones[l * m + k] = true;
                }
            }
        }
        Self { grid_m: m, grid_n: n, ones }
    }
}

/// Detection mask around the pilot: ones on
/// `K x L = {M/2 .. M/2+k_max} x {N/2-l_max .. N/2+l_max}`.
pub fn make_mask(grid: &GridConfig, k_max: usize, l_max: usize) -> Result<Mask> {
    let (m, n) = (grid.m(), grid.n());
    if k_max >= m / 2 || l_max >= n / 2 {
        return Err(Error::InvalidParameter(format!(
            "mask extents k_max={k_max}, l_max={l_max} must satisfy k_max < M/2, l_max < N/2"
        )));
    }
    let region = Region {
        k_lo: (m / 2) as i64,
        k_hi: (m / 2 + k_max) as i64,
        l_lo: (n / 2 - l_max) as i64,
        l_hi: (n / 2 + l_max) as i64,
    };
    Ok(Mask::from_region(grid, &region))
}

/// Detection extents from the channel spreads:
/// `k_max = ceil(tau_max / (tau_p/M))`, `l_max = ceil(nu_max / (nu_p/N))`.
pub fn detection_extents(tau_max: f64, nu_max: f64, grid: &GridConfig) -> (usize, usize) {
    let k_max = (tau_max / grid.delay_res()).ceil() as usize;
    let l_max = (nu_max / grid.doppler_res()).ceil() as usize;
    (k_max, l_max)
}

/// Pilot/guard/data layout of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLayout {
    pub kind: FrameKind,
    grid: GridConfig,
    pub pilot_pos: (usize, usize),
    pub alpha: C64,
    pub k_max: usize,
    pub l_max: usize,
    /// Vectorized indices forced to zero (empty for exclusive frames the
    /// pilot aside; the whole complement is implicitly zero there).
    guard: Vec<usize>,
    /// Vectorized indices carrying data symbols, ascending.
    data: Vec<usize>,
}

impl FrameLayout {
    pub fn exclusive(grid: GridConfig, alpha: C64, k_max: usize, l_max: usize) -> Self {
        let (m, n) = (grid.m(), grid.n());
        let pilot = grid.vec_index(m / 2, n / 2);
        let guard = (0..grid.mn()).filter(|&i| i != pilot).collect();
        Self {
            kind: FrameKind::Exclusive,
            grid,
            pilot_pos: (m / 2, n / 2),
            alpha,
            k_max,
            l_max,
            guard,
            data: Vec::new(),
        }
    }

    pub fn embedded(grid: GridConfig, alpha: C64, k_max: usize, l_max: usize) -> Result<Self> {
        let (m, n) = (grid.m(), grid.n());
        if 8 * k_max + 1 > m {
            return Err(Error::InvalidParameter(format!(
                "guard extent 8*k_max+1 = {} exceeds M = {m}",
                8 * k_max + 1
            )));
        }
        let pilot = grid.vec_index(m / 2, n / 2);
        // guard band: delay rows within 4*k_max of the pilot, all Dopplers
        let g_lo = m / 2 - 4 * k_max;
        let g_hi = m / 2 + 4 * k_max;
        let mut guard = Vec::new();
        let mut data = Vec::new();
        for idx in 0..grid.mn() {
            let (k, _) = grid.bin_of(idx);
            if k >= g_lo && k <= g_hi {
                if idx != pilot {
                    guard.push(idx);
                }
            } else {
                data.push(idx);
            }
        }
        Ok(Self {
            kind: FrameKind::Embedded,
            grid,
            pilot_pos: (m / 2, n / 2),
            alpha,
            k_max,
            l_max,
            guard,
            data,
        })
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn guard_indices(&self) -> &[usize] {
        &self.guard
    }

    pub fn data_indices(&self) -> &[usize] {
        &self.data
    }

    /// Fraction of frame bins carrying data.
    pub fn frame_efficiency(&self) -> f64 {
        self.data.len() as f64 / self.grid.mn() as f64
    }

    /// Model-free read-off region for this layout, in centered coordinates.
    pub fn readoff_region(&self) -> Region {
        match self.kind {
            FrameKind::Exclusive => Region::f_exc(&self.grid),
            FrameKind::Embedded => Region::f_emb(&self.grid, self.k_max),
        }
    }

    /// The pilot-only frame (alpha at the center, zero elsewhere).
    pub fn pilot_frame(&self) -> QpFrame {
        make_exclusive_frame(&self.grid, self.alpha)
    }
}

/// Pilot-only frame: `alpha` at `(M/2, N/2)`, zeros elsewhere.
pub fn make_exclusive_frame(grid: &GridConfig, alpha: C64) -> QpFrame {
    let mut f = QpFrame::zeros(*grid);
    f.set(grid.m() / 2, grid.n() / 2, alpha);
    f
}

/// Embedded frame: pilot at the center, zeros on the guard band, and the
/// given data symbols on the remaining bins in ascending vectorized order.
pub fn make_embedded_frame(
    grid: &GridConfig,
    alpha: C64,
    data_symbols: &[C64],
    k_max: usize,
    l_max: usize,
) -> Result<(QpFrame, FrameLayout)> {
    let layout = FrameLayout::embedded(*grid, alpha, k_max, l_max)?;
    if data_symbols.len() != layout.data.len() {
        return Err(Error::LengthMismatch { expected: layout.data.len(), got: data_symbols.len() });
    }
    let mut f = QpFrame::zeros(*grid);
    f.set(layout.pilot_pos.0, layout.pilot_pos.1, alpha);
    for (&idx, &s) in layout.data.iter().zip(data_symbols) {
        f.as_vec_mut()[idx] = s;
    }
    Ok((f, layout))
}
