//! Delay-Doppler grid geometry, quasi-periodic frames, discrete twisted
//! convolution, and the discrete Zak transform pair.
//!
//! Everything here works on the integer DD lattice with steps
//! `(tau_p/M, nu_p/N)`. A frame holds one fundamental period of samples;
//! values outside it are only reachable through the quasi-periodic
//! extension rule.

use crate::error::Error;
use crate::{Result, C64};
use std::f64::consts::PI;

/// Frame geometry: `M` delay bins and `N` Doppler bins over one fundamental
/// DD period `tau_p x nu_p` with `tau_p * nu_p = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    m: usize,
    n: usize,
    nu_p: f64,
    tau_p: f64,
}

impl GridConfig {
    /// `m`, `n` must be even and at least 2 (the pilot sits at `(M/2, N/2)`).
    pub fn new(m: usize, n: usize, nu_p: f64) -> Result<Self> {
        if m < 2 || m % 2 != 0 || n < 2 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "M and N must be even and >= 2, got M={m}, N={n}"
            )));
        }
        if !(nu_p > 0.0) || !nu_p.is_finite() {
            return Err(Error::InvalidGrid(format!("nu_p must be positive, got {nu_p}")));
        }
        Ok(Self { m, n, nu_p, tau_p: 1.0 / nu_p })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of DD bins `M*N`.
    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// Doppler period in Hz.
    pub fn nu_p(&self) -> f64 {
        self.nu_p
    }

    /// Delay period in seconds (`1/nu_p`).
    pub fn tau_p(&self) -> f64 {
        self.tau_p
    }

    /// Frame bandwidth `B = M * nu_p`.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.nu_p
    }

    /// Frame duration `T = N * tau_p`.
    pub fn duration(&self) -> f64 {
        self.n as f64 * self.tau_p
    }

    /// Delay bin width `tau_p / M = 1/B`.
    pub fn delay_res(&self) -> f64 {
        self.tau_p / self.m as f64
    }

    /// Doppler bin width `nu_p / N = 1/T`.
    pub fn doppler_res(&self) -> f64 {
        self.nu_p / self.n as f64
    }

    /// Vectorization index `l*M + k` of an in-frame bin.
    pub fn vec_index(&self, k: usize, l: usize) -> usize {
        debug_assert!(k < self.m && l < self.n);
        l * self.m + k
    }

    /// Inverse of [`vec_index`](Self::vec_index).
    pub fn bin_of(&self, idx: usize) -> (usize, usize) {
        (idx % self.m, idx / self.m)
    }
}

/// Unbounded integer DD lattice index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DdIndex {
    pub k: i64,
    pub l: i64,
}

impl DdIndex {
    pub fn new(k: i64, l: i64) -> Self {
        Self { k, l }
    }
}

/// Exact unit-phase helper: integer powers of `exp(j*2*pi/(2*M*N))`.
///
/// All phases appearing in the discrete DD machinery are of the form
/// `exp(j*pi*p/(M*N))` with integer `p`; reducing `p` modulo `2*M*N`
/// before the complex exponential keeps results bit-reproducible.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    roots: Vec<C64>,
    order: i64,
}

impl PhaseTable {
    pub fn new(grid: &GridConfig) -> Self {
        let order = 2 * grid.mn() as i64;
        let roots = (0..order)
            .map(|r| {
                let ang = 2.0 * PI * r as f64 / order as f64;
                C64::new(ang.cos(), ang.sin())
            })
            .collect();
        Self { roots, order }
    }

    /// `exp(j * pi * p / (M*N))`.
    pub fn phase_pi(&self, p: i64) -> C64 {
        self.roots[p.rem_euclid(self.order) as usize]
    }

    /// `exp(j * 2 * pi * p / (M*N))`.
    pub fn phase_2pi(&self, p: i64) -> C64 {
        self.phase_pi(2 * p)
    }
}

/// One fundamental period of a quasi-periodic DD signal, stored in the
/// vectorized order `samples[l*M + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpFrame {
    grid: GridConfig,
    samples: Vec<C64>,
}

impl QpFrame {
    pub fn zeros(grid: GridConfig) -> Self {
        let len = grid.mn();
        Self { grid, samples: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn from_vec(grid: GridConfig, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.mn() {
            return Err(Error::LengthMismatch { expected: grid.mn(), got: samples.len() });
        }
        Ok(Self { grid, samples })
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.samples[self.grid.vec_index(k, l)]
    }

    pub fn set(&mut self, k: usize, l: usize, v: C64) {
        let idx = self.grid.vec_index(k, l);
        self.samples[idx] = v;
    }

    /// Vectorized view (`l*M + k` ordering).
    pub fn as_vec(&self) -> &[C64] {
        &self.samples
    }

    pub fn as_vec_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    /// Sum of `|samples|^2` over the fundamental period.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Quasi-periodic extension: for `k = k0 + n*M`, `l = l0 + m*N` with
    /// `(k0, l0)` in the fundamental period, returns
    /// `samples[k0, l0] * exp(j*2*pi*n*l0/N)`.
    pub fn qp_extend(&self, idx: DdIndex) -> C64 {
        let m = self.grid.m as i64;
        let n = self.grid.n as i64;
        let k0 = idx.k.rem_euclid(m);
        let l0 = idx.l.rem_euclid(n);
        let n_wrap = (idx.k - k0) / m;
        let v = self.samples[self.grid.vec_index(k0 as usize, l0 as usize)];
        if n_wrap == 0 {
            return v;
        }
        let ang = 2.0 * PI * ((n_wrap * l0).rem_euclid(n) as f64) / n as f64;
        v * C64::new(ang.cos(), ang.sin())
    }
}

/// Dense grid over a rectangular window of the integer DD lattice, with an
/// explicit origin. Used for effective channels and their estimates, whose
/// supports extend well beyond one fundamental period.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtGrid {
    grid: GridConfig,
    k_min: i64,
    l_min: i64,
    nk: usize,
    nl: usize,
    data: Vec<C64>,
}

impl ExtGrid {
    pub fn zeros(grid: GridConfig, k_min: i64, l_min: i64, nk: usize, nl: usize) -> Self {
        Self { grid, k_min, l_min, nk, nl, data: vec![C64::new(0.0, 0.0); nk * nl] }
    }

    /// Standard effective-channel extent: delay indices
    /// `-(3M-1) ..= 3M-1` and Doppler indices `-(3N-1) ..= 3N-1`,
    /// i.e. a `(6M-1) x (6N-1)` window. This covers every index reachable
    /// by the I/O relation with wrap truncation `|m|,|n| <= 2`.
    pub fn standard(grid: GridConfig) -> Self {
        let (m, n) = (grid.m as i64, grid.n as i64);
        Self::zeros(grid, -(3 * m - 1), -(3 * n - 1), (6 * grid.m - 1) as usize, (6 * grid.n - 1) as usize)
    }

    /// Like [`standard`](Self::standard) but covering wrap terms up to
    /// `|m|,|n| <= extra`, i.e. a `(2(extra+1)M-1) x (2(extra+1)N-1)` window.
    pub fn with_wrap_extent(grid: GridConfig, extra: usize) -> Self {
        let (m, n) = (grid.m as i64, grid.n as i64);
        let hk = (extra as i64 + 1) * m - 1;
        let hl = (extra as i64 + 1) * n - 1;
        Self::zeros(grid, -hk, -hl, (2 * hk + 1) as usize, (2 * hl + 1) as usize)
    }

    pub fn grid(&self) -> &GridConfig {
        &self.grid
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn l_min(&self) -> i64 {
        self.l_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.nk as i64 - 1
    }

    pub fn l_max(&self) -> i64 {
        self.l_min + self.nl as i64 - 1
    }

    pub fn nk(&self) -> usize {
        self.nk
    }

    pub fn nl(&self) -> usize {
        self.nl
    }

    pub fn contains(&self, idx: DdIndex) -> bool {
        idx.k >= self.k_min
            && idx.k <= self.k_max()
            && idx.l >= self.l_min
            && idx.l <= self.l_max()
    }

    #[inline]
    fn offset(&self, idx: DdIndex) -> usize {
        let r = (idx.k - self.k_min) as usize;
        let c = (idx.l - self.l_min) as usize;
        r * self.nl + c
    }

    /// Value at `idx`, or zero outside the stored window.
    #[inline]
    pub fn get(&self, idx: DdIndex) -> C64 {
        if self.contains(idx) {
            self.data[self.offset(idx)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, idx: DdIndex, v: C64) {
        debug_assert!(self.contains(idx));
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Iterate `(index, value)` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (DdIndex, C64)> + '_ {
        (0..self.nk).flat_map(move |r| {
            (0..self.nl).map(move |c| {
                let idx = DdIndex::new(self.k_min + r as i64, self.l_min + c as i64);
                (idx, self.data[r * self.nl + c])
            })
        })
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn same_layout(&self, other: &ExtGrid) -> bool {
        self.grid == other.grid
            && self.k_min == other.k_min
            && self.l_min == other.l_min
            && self.nk == other.nk
            && self.nl == other.nl
    }
}

/// Scaling convention for [`twisted_convolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvScale {
    /// Plain lattice sum; the unit impulse at the origin is the identity.
    Unit,
    /// Multiply by the lattice cell area `(tau_p/M)*(nu_p/N)`, approximating
    /// the continuous twisted-convolution integral.
    CellArea,
}

/// Discrete twisted convolution on the integer DD lattice:
///
/// `c[k,l] = sum_{k',l'} a[k',l'] * b[k-k',l-l'] * exp(j*2*pi*l'*(k-k')/(M*N))`
///
/// The output window is the Minkowski sum of the input windows.
pub fn twisted_convolve(a: &ExtGrid, b: &ExtGrid, scale: ConvScale) -> Result<ExtGrid> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(
            "twisted convolution inputs must share one grid config".into(),
        ));
    }
    let grid = a.grid;
    let mn = grid.mn() as i64;
    let phases = PhaseTable::new(&grid);
    let mut out = ExtGrid::zeros(
        grid,
        a.k_min + b.k_min,
        a.l_min + b.l_min,
        a.nk + b.nk - 1,
        a.nl + b.nl - 1,
    );
    for (ia, va) in a.iter() {
        if va == C64::new(0.0, 0.0) {
            continue;
        }
        for (ib, vb) in b.iter() {
            if vb == C64::new(0.0, 0.0) {
                continue;
            }
            let k = ia.k + ib.k;
            let l = ia.l + ib.l;
            // phase exponent l' * (k - k') = ia.l * ib.k, reduced mod MN
            let ph = phases.phase_2pi((ia.l * ib.k).rem_euclid(mn));
            let cur = out.get(DdIndex::new(k, l));
            out.set(DdIndex::new(k, l), cur + va * vb * ph);
        }
    }
    if scale == ConvScale::CellArea {
        let cell = grid.delay_res() * grid.doppler_res();
        for v in out.data_mut() {
            *v *= cell;
        }
    }
    Ok(out)
}

/// Discrete Zak transform of a rate-`B` sample sequence of length `M*N`:
///
/// `frame[k,l] = sqrt(tau_p/M) * sum_q x[k + q*M] * exp(-j*2*pi*l*q/N)`
pub fn zak_forward(x: &[C64], grid: GridConfig) -> Result<QpFrame> {
    if x.len() != grid.mn() {
        return Err(Error::LengthMismatch { expected: grid.mn(), got: x.len() });
    }
    let (m, n) = (grid.m, grid.n);
    let scale = (grid.tau_p / m as f64).sqrt();
    // exp(-j*2*pi*r/N) table
    let w: Vec<C64> = (0..n)
        .map(|r| {
            let ang = -2.0 * PI * r as f64 / n as f64;
            C64::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut frame = QpFrame::zeros(grid);
    for k in 0..m {
        for l in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for q in 0..n {
                acc += x[k + q * m] * w[(l * q) % n];
            }
            frame.set(k, l, acc * scale);
        }
    }
    Ok(frame)
}

/// Exact inverse of [`zak_forward`]: inverse DFT over the Doppler axis per
/// delay residue, then de-interleave into the time sequence.
pub fn zak_inverse(frame: &QpFrame) -> Vec<C64> {
    let grid = frame.grid;
    let (m, n) = (grid.m, grid.n);
    let scale = 1.0 / ((grid.tau_p / m as f64).sqrt() * n as f64);
    let w: Vec<C64> = (0..n)
        .map(|r| {
            let ang = 2.0 * PI * r as f64 / n as f64;
            C64::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut x = vec![C64::new(0.0, 0.0); m * n];
    for k in 0..m {
        for q in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..n {
                acc += frame.get(k, l) * w[(l * q) % n];
            }
            x[k + q * m] = acc * scale;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn grid_8x8() -> GridConfig {
        GridConfig::new(8, 8, 15e3).unwrap()
    }

    fn random_frame(grid: GridConfig, seed: u64) -> QpFrame {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let v: Vec<C64> = (0..grid.mn())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        QpFrame::from_vec(grid, v).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridConfig::new(0, 8, 15e3).is_err());
        assert!(GridConfig::new(7, 8, 15e3).is_err());
        assert!(GridConfig::new(8, 2, 15e3).is_ok());
        assert!(GridConfig::new(8, 8, 0.0).is_err());
        let g = GridConfig::new(64, 24, 15e3).unwrap();
        assert!((g.tau_p() * g.nu_p() - 1.0).abs() < 1e-15);
        assert!((g.bandwidth() - 960e3).abs() < 1e-6);
        assert!((g.duration() - 1.6e-3).abs() < 1e-12);
    }

    #[test]
    fn qp_extend_fundamental_identity() {
        let grid = grid_8x8();
        let f = random_frame(grid, 1);
        for k in 0..8 {
            for l in 0..8 {
                assert_eq!(f.qp_extend(DdIndex::new(k as i64, l as i64)), f.get(k, l));
            }
        }
    }

    #[test]
    fn qp_extend_zero_doppler_phase() {
        let grid = grid_8x8();
        let f = random_frame(grid, 2);
        for k in 0..8i64 {
            let a = f.qp_extend(DdIndex::new(k, 0));
            let b = f.qp_extend(DdIndex::new(k + 8, 0));
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn qp_extend_quarter_phase() {
        // N = 4, l = 1: one delay-period shift multiplies by exp(j*pi/2) = j.
        let grid = GridConfig::new(4, 4, 15e3).unwrap();
        let f = random_frame(grid, 3);
        for k in 0..4i64 {
            let a = f.qp_extend(DdIndex::new(k, 1));
            let b = f.qp_extend(DdIndex::new(k + 4, 1));
            assert!((b - a * C64::new(0.0, 1.0)).norm() < 1e-15);
        }
    }

    proptest! {
        // Quasi-periodicity holds literally for arbitrary wraps.
        #[test]
        fn qp_extension_rule(k in 0i64..8, l in 0i64..8, n in -5i64..=5, m in -5i64..=5) {
            let grid = grid_8x8();
            let f = random_frame(grid, 11);
            let base = f.qp_extend(DdIndex::new(k, l));
            let wrapped = f.qp_extend(DdIndex::new(k + n * 8, l + m * 8));
            let ang = 2.0 * std::f64::consts::PI * (n * l) as f64 / 8.0;
            let expect = base * C64::new(ang.cos(), ang.sin());
            prop_assert!((wrapped - expect).norm() < 1e-12);
        }

        #[test]
        fn zak_round_trip(seed in 0u64..32) {
            let grid = GridConfig::new(8, 6, 15e3).unwrap();
            let f = random_frame(grid, seed);
            let x = zak_inverse(&f);
            let back = zak_forward(&x, grid).unwrap();
            let err: f64 = back
                .as_vec()
                .iter()
                .zip(f.as_vec())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let norm = f.energy().sqrt();
            prop_assert!(err <= 1e-12 * norm.max(1e-30));
        }
    }

    fn impulse(grid: GridConfig, k: i64, l: i64, v: C64) -> ExtGrid {
        let mut g = ExtGrid::zeros(grid, k, l, 1, 1);
        g.set(DdIndex::new(k, l), v);
        g
    }

    #[test]
    fn twisted_identity() {
        let grid = grid_8x8();
        let mut b = ExtGrid::zeros(grid, -3, -2, 7, 6);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for r in 0..7i64 {
            for c in 0..6i64 {
                b.set(
                    DdIndex::new(r - 3, c - 2),
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        let delta = impulse(grid, 0, 0, C64::new(1.0, 0.0));
        let c = twisted_convolve(&delta, &b, ConvScale::Unit).unwrap();
        for (idx, v) in b.iter() {
            assert!((c.get(idx) - v).norm() < 1e-15);
        }
    }

    #[test]
    fn twisted_zero_doppler_impulses() {
        let grid = grid_8x8();
        let a = impulse(grid, 3, 0, C64::new(1.0, 0.0));
        let b = impulse(grid, 2, 0, C64::new(1.0, 0.0));
        let c = twisted_convolve(&a, &b, ConvScale::Unit).unwrap();
        let v = c.get(DdIndex::new(5, 0));
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((c.energy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn twisted_single_term_phase() {
        // a at (0, l0), b at (k1, 0): the only term carries
        // exp(j*2*pi*l0*k1/(M*N)).
        let grid = grid_8x8();
        let (l0, k1) = (3i64, 2i64);
        let a = impulse(grid, 0, l0, C64::new(1.0, 0.0));
        let b = impulse(grid, k1, 0, C64::new(1.0, 0.0));
        let c = twisted_convolve(&a, &b, ConvScale::Unit).unwrap();
        let ang = 2.0 * PI * (l0 * k1) as f64 / 64.0;
        let expect = C64::new(ang.cos(), ang.sin());
        assert!((c.get(DdIndex::new(k1, l0)) - expect).norm() < 1e-15);
    }

    #[test]
    fn twisted_associative_on_impulses() {
        let grid = grid_8x8();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut pick = || {
                impulse(
                    grid,
                    rng.gen_range(-9i64..9),
                    rng.gen_range(-9i64..9),
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            };
            let (a, b, c) = (pick(), pick(), pick());
            let left = twisted_convolve(&twisted_convolve(&a, &b, ConvScale::Unit).unwrap(), &c, ConvScale::Unit).unwrap();
            let right = twisted_convolve(&a, &twisted_convolve(&b, &c, ConvScale::Unit).unwrap(), ConvScale::Unit).unwrap();
            for (idx, v) in left.iter() {
                assert!((v - right.get(idx)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn twisted_rejects_mismatched_grids() {
        let a = impulse(grid_8x8(), 0, 0, C64::new(1.0, 0.0));
        let b = impulse(GridConfig::new(4, 4, 15e3).unwrap(), 0, 0, C64::new(1.0, 0.0));
        assert!(twisted_convolve(&a, &b, ConvScale::Unit).is_err());
    }

    #[test]
    fn zak_forward_zero_and_impulse() {
        let grid = grid_8x8();
        let zeros = vec![C64::new(0.0, 0.0); 64];
        let f = zak_forward(&zeros, grid).unwrap();
        assert_eq!(f.energy(), 0.0);

        let mut x = zeros;
        x[0] = C64::new(1.0, 0.0);
        let f = zak_forward(&x, grid).unwrap();
        let expect = (grid.tau_p() / 8.0).sqrt();
        for l in 0..8 {
            assert!((f.get(0, l) - C64::new(expect, 0.0)).norm() < 1e-15);
        }
        for k in 1..8 {
            for l in 0..8 {
                assert_eq!(f.get(k, l), C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn zak_inverse_pulsone_structure() {
        // A single DD bin at (0,0) is a pulse train in time: nonzero at
        // samples 0, M, 2M, ...
        let grid = grid_8x8();
        let mut f = QpFrame::zeros(grid);
        f.set(0, 0, C64::new(1.0, 0.0));
        let x = zak_inverse(&f);
        for (i, v) in x.iter().enumerate() {
            if i % 8 == 0 {
                assert!(v.norm() > 1e-6, "expected pulse at sample {i}");
            } else {
                assert!(v.norm() < 1e-15, "expected zero at sample {i}");
            }
        }
    }

    #[test]
    fn zak_length_mismatch() {
        let grid = grid_8x8();
        assert!(zak_forward(&vec![C64::new(0.0, 0.0); 63], grid).is_err());
    }

    #[test]
    fn zak_energy_scaling() {
        // The pair is unitary up to the fixed constant (tau_p*N/M) induced
        // by the sqrt(tau_p/M) normalization.
        let grid = GridConfig::new(8, 6, 15e3).unwrap();
        let f = random_frame(grid, 21);
        let x = zak_inverse(&f);
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let scale = grid.tau_p() * grid.n() as f64 / grid.m() as f64;
        let rel = (f.energy() - scale * ex).abs() / f.energy();
        assert!(rel < 1e-12, "rel err {rel}");
    }
}
