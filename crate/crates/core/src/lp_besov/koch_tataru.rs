//! Discrete Koch–Tataru `X` norm of a sampled periodic trajectory:
//! `sup_t t^{1/2}‖u(t)‖_∞ + sup_{x,R} |B(x,R)|^{-1/2} ‖u‖_{L²((0,R²)×B(x,R))}`.

use super::NormError;
use crate::grid_oracle::{Grid, GridField};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KochTataruNorm {
    pub sup_part: f64,
    pub carleson_part: f64,
    pub total: f64,
}

/// `t_max·2^{-i}`, `i = 0..count`, in increasing order.
pub fn dyadic_times(t_max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .rev()
        .map(|i| t_max * 2f64.powi(-(i as i32)))
        .collect()
}

fn ball_volume(n: usize, r: f64) -> f64 {
    match n {
        1 => 2.0 * r,
        2 => PI * r * r,
        3 => 4.0 / 3.0 * PI * r.powi(3),
        _ => panic!("dimension {n} not supported"),
    }
}

/// `trajectory` holds `(t, components)` pairs; `radii` are the box scales
/// `R`; ball centres run over a coarse sub-grid with `centres` points per
/// axis.
pub fn koch_tataru_x_norm(
    grid: &Grid,
    trajectory: &[(f64, Vec<GridField>)],
    radii: &[f64],
    centres: usize,
) -> Result<KochTataruNorm, NormError> {
    if trajectory.is_empty() {
        return Err(NormError::EmptyTrajectory);
    }
    let mut traj: Vec<&(f64, Vec<GridField>)> = trajectory.iter().collect();
    traj.sort_by(|a, b| a.0.total_cmp(&b.0));
    let spec = grid.spec;
    let n = spec.dim;
    let npts = spec.len();
    let cell = (spec.length / spec.points as f64).powi(n as i32);
    // |u|² on the grid per time
    let dens: Vec<Vec<f64>> = traj
        .iter()
        .map(|(_, comps)| {
            let mut acc = vec![0.0; npts];
            for c in comps {
                for (a, z) in acc.iter_mut().zip(grid.to_physical(c)) {
                    *a += z.norm_sqr();
                }
            }
            acc
        })
        .collect();
    let sup_part = traj
        .iter()
        .zip(&dens)
        .map(|((t, _), d)| t.max(0.0).sqrt() * d.iter().copied().fold(0.0, f64::max).sqrt())
        .fold(0.0, f64::max);
    // left-endpoint-free Riemann weights: each sample covers (t_{i-1}, t_i]
    let weights: Vec<f64> = (0..traj.len())
        .map(|i| traj[i].0 - if i == 0 { 0.0 } else { traj[i - 1].0 })
        .collect();
    let stride = (spec.points / centres.max(1)).max(1);
    let h = spec.length / spec.points as f64;
    let mut carleson = 0.0f64;
    let c_count = spec.points.div_ceil(stride);
    for &r in radii {
        let t_top = r * r;
        let reach = (r / h).floor() as i64;
        let vol = ball_volume(n, r);
        for c in 0..c_count.pow(n as u32) {
            let mut centre = vec![0i64; n];
            let mut rem = c;
            for d in (0..n).rev() {
                centre[d] = ((rem % c_count) * stride) as i64;
                rem /= c_count;
            }
            let side = (2 * reach + 1) as usize;
            let mut total = 0.0;
            for (i, d) in dens.iter().enumerate() {
                let ti = traj[i].0;
                if ti <= 0.0 || ti - weights[i] >= t_top {
                    continue;
                }
                let dt = weights[i].min(t_top - (ti - weights[i]));
                let mut s = 0.0;
                for o in 0..side.pow(n as u32) {
                    let mut rem = o;
                    let mut idx = 0usize;
                    let mut dist2 = 0.0;
                    for dd in 0..n {
                        let off = (rem % side) as i64 - reach;
                        rem /= side;
                        dist2 += (off as f64 * h).powi(2);
                        let p = spec.points as i64;
                        idx = idx * spec.points + (centre[dd] + off).rem_euclid(p) as usize;
                    }
                    if dist2 <= r * r {
                        s += d[idx];
                    }
                }
                total += dt * s * cell;
            }
            carleson = carleson.max((total / vol).sqrt());
        }
    }
    Ok(KochTataruNorm {
        sup_part,
        carleson_part: carleson,
        total: sup_part + carleson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_oracle::GridSpec;

    #[test]
    fn empty_trajectory_is_rejected() {
        let g = Grid::new(GridSpec {
            dim: 2,
            points: 8,
            length: 1.0,
        });
        assert!(matches!(
            koch_tataru_x_norm(&g, &[], &[0.1], 4),
            Err(NormError::EmptyTrajectory)
        ));
    }

    #[test]
    fn zero_trajectory_has_zero_norm() {
        let g = Grid::new(GridSpec {
            dim: 2,
            points: 8,
            length: 1.0,
        });
        let tr: Vec<(f64, Vec<GridField>)> = dyadic_times(0.1, 4)
            .into_iter()
            .map(|t| (t, vec![g.zeros()]))
            .collect();
        let v = koch_tataru_x_norm(&g, &tr, &[0.1, 0.2], 4).unwrap();
        assert_eq!(v.total, 0.0);
    }
}
