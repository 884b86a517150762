//! Quadrature oracle for the effective channel.
//!
//! Evaluates the matched-filter twisted-convolution cascade
//! `w_rx *s (paths *s w_tx)` at arbitrary DD points by reducing the Dirac
//! path terms analytically and integrating the remaining filter product
//! numerically. Deliberately independent of the closed forms in
//! [`crate::filters`]; used as their cross-check and by the `validate`
//! command. Slow by design.
//!
//! After substituting the matched receive filter, the integrand's
//! `e^{j2pi uv} e^{-j2pi v(tau+u)}` phases collapse to `e^{-j2pi v tau}`,
//! so the 2-D integral is a tensor product of two 1-D cross-ambiguity
//! integrals handled in [`crate::quad`].

use crate::channel::PathSet;
use crate::dd::{DdIndex, GridConfig};
use crate::filters::PulseFilter;
use crate::quad::{gauss_cross_ambiguity, sinc_cross_ambiguity};
use crate::{Result, C64};
use std::f64::consts::PI;

/// Effective channel of one unit-gain path at `(tau, nu)`, via quadrature.
pub fn cascade_point(
    filter: &PulseFilter,
    tau_i: f64,
    nu_i: f64,
    tau: f64,
    nu: f64,
    grid: &GridConfig,
) -> Result<C64> {
    let b = grid.bandwidth();
    let t = grid.duration();
    // Dirac reduction leaves e^{j2pi nu_i (tau - tau_i)} times the delay-axis
    // and Doppler-axis filter cross-ambiguities.
    let lead = C64::new(0.0, 2.0 * PI * nu_i * (tau - tau_i)).exp();
    let (ax_delay, ax_doppler) = match filter {
        PulseFilter::Sinc => (
            sinc_cross_ambiguity(b * (tau - tau_i), 2.0 * PI * nu_i / b)?,
            sinc_cross_ambiguity(t * (nu - nu_i), -2.0 * PI * tau / t)?,
        ),
        PulseFilter::Gaussian { alpha_tau, alpha_nu } => (
            gauss_cross_ambiguity(*alpha_tau, b * (tau - tau_i), 2.0 * PI * nu_i / b)?,
            gauss_cross_ambiguity(*alpha_nu, t * (nu - nu_i), -2.0 * PI * tau / t)?,
        ),
    };
    Ok(lead * ax_delay * ax_doppler)
}

/// Quadrature value of the effective channel at the given integer DD lattice
/// points. Zero paths give zero everywhere.
pub fn heff_oracle(
    filter: &PulseFilter,
    paths: &PathSet,
    grid: &GridConfig,
    points: &[DdIndex],
) -> Result<Vec<C64>> {
    filter.validate()?;
    let mut out = vec![C64::new(0.0, 0.0); points.len()];
    for path in &paths.paths {
        for (slot, idx) in out.iter_mut().zip(points) {
            let tau = idx.k as f64 * grid.delay_res();
            let nu = idx.l as f64 * grid.doppler_res();
            *slot += path.gain * cascade_point(filter, path.delay, path.doppler, tau, nu, grid)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PathSet;
    use crate::filters::{heff_closed_form, heff_closed_point};

    fn grid() -> GridConfig {
        GridConfig::new(8, 8, 15e3).unwrap()
    }

    #[test]
    fn zero_paths_give_zero() {
        let g = grid();
        let pts = vec![DdIndex::new(0, 0), DdIndex::new(3, -2)];
        let v = heff_oracle(&PulseFilter::Sinc, &PathSet::default(), &g, &pts).unwrap();
        assert!(v.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn gaussian_origin_matches_closed_form() {
        let g = grid();
        let paths = PathSet::single(0.0, 0.0);
        let v = heff_oracle(&PulseFilter::gaussian_default(), &paths, &g, &[DdIndex::new(0, 0)]).unwrap();
        let c = heff_closed_point(
            &PulseFilter::gaussian_default(),
            C64::new(1.0, 0.0),
            0.0,
            0.0,
            0.0,
            0.0,
            &g,
        );
        assert!((v[0] - c).norm() < 1e-6 * c.norm());
    }

    #[test]
    fn fractional_path_grid_matches_closed_form() {
        // One fractional-DD path, both filters, every extended-grid point.
        let g = grid();
        let paths = PathSet::single(0.5 * g.delay_res(), 0.31 * g.doppler_res());
        for filter in [PulseFilter::Sinc, PulseFilter::gaussian_default()] {
            let closed = heff_closed_form(&filter, &paths, &g).unwrap();
            let pts: Vec<DdIndex> = closed.iter().map(|(i, _)| i).collect();
            let vals = heff_oracle(&filter, &paths, &g, &pts).unwrap();
            let scale = closed.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
            for (p, v) in pts.iter().zip(&vals) {
                let c = closed.get(*p);
                assert!(
                    (c - v).norm() <= 1e-6 * scale,
                    "{filter:?} at ({}, {}): closed {c} vs oracle {v}",
                    p.k,
                    p.l
                );
            }
        }
    }

    #[test]
    fn matched_filter_self_correlation() {
        // Unit path at the origin: the oracle computes the filter's twisted
        // self-correlation, which the closed form must reproduce.
        let g = grid();
        let paths = PathSet::single(0.0, 0.0);
        for filter in [PulseFilter::Sinc, PulseFilter::gaussian_default()] {
            let closed = heff_closed_form(&filter, &paths, &g).unwrap();
            let pts: Vec<DdIndex> =
                (-4..=4).flat_map(|k| (-4..=4).map(move |l| DdIndex::new(k, l))).collect();
            let vals = heff_oracle(&filter, &paths, &g, &pts).unwrap();
            for (p, v) in pts.iter().zip(&vals) {
                assert!((closed.get(*p) - v).norm() < 1e-6);
            }
        }
    }
}
