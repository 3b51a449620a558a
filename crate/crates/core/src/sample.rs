//! Seeded random metrics, cubic forms and rotations.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::Mat;
use crate::math::norm2;
use crate::point::StatPoint;
use crate::tensor::{CubicForm, MetricPoint, Tensor};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `g = I + 0.5·M Mᵀ / n` with `M` entries uniform in `[-1, 1]`.
pub fn random_metric<R: Rng>(n: usize, rng: &mut R) -> Result<MetricPoint> {
    let m = Mat::from_row_major(
        n,
        (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
    )?;
    let mm = m.mul(&m.transpose()).scale(0.5 / n as f64);
    MetricPoint::symmetrized(&Mat::identity(n).add(&mm))
}

/// Entries i.i.d. uniform in `[-1, 1]`, then totally symmetrized.
pub fn random_cubic<R: Rng>(n: usize, rng: &mut R) -> Result<CubicForm> {
    let t = Tensor::from_data(
        n,
        3,
        0,
        (0..n * n * n)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect(),
    )?;
    CubicForm::symmetrize(&t)
}

/// Random structure; `metric` selects a random (rather than identity)
/// metric, `trace_free` projects the cubic form onto its trace-free part.
pub fn random_stat_point(n: usize, seed: u64, metric: bool, trace_free: bool) -> Result<StatPoint> {
    let mut r = rng(seed);
    let g = if metric {
        random_metric(n, &mut r)?
    } else {
        MetricPoint::identity(n)?
    };
    let mut a = random_cubic(n, &mut r)?;
    if trace_free {
        a = a.trace_free_part(&g)?;
    }
    StatPoint::new(g, a)
}

/// Uniformly distributed unit vector.
pub fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let nv = norm2(&v);
        if nv > 1e-8 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// Random orthogonal matrix (Gram–Schmidt on a Gaussian matrix).
pub fn random_rotation<R: Rng>(n: usize, rng: &mut R) -> Mat {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<f64> = (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            for _pass in 0..2 {
                for c in &cols {
                    let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
                }
            }
            let nv = norm2(&v);
            if nv < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|x| x / nv).collect());
        }
        if ok {
            let mut m = Mat::zeros(n);
            for (j, c) in cols.iter().enumerate() {
                for i in 0..n {
                    m[(i, j)] = c[i];
                }
            }
            return m;
        }
    }
}
