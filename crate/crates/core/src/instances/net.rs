//! Geometric nets: uniform angular grids on the circle and sphere.
//!
//! Coordinates within 1e-12 of 0 or +/-1 are snapped exactly so that
//! semicircle membership tests and alpha = 1 constraint sets stay
//! meaningful on floating-point nets.

const SNAP: f64 = 1e-12;

pub(crate) fn snap_coord(x: f64) -> f64 {
    if x.abs() < SNAP {
        0.0
    } else if (x - 1.0).abs() < SNAP {
        1.0
    } else if (x + 1.0).abs() < SNAP {
        -1.0
    } else {
        x
    }
}

/// Snaps an inner product of near-unit vectors into [-1, 1].
pub(crate) fn snap_ip(v: f64) -> f64 {
    let v = snap_coord(v);
    v.clamp(-1.0, 1.0)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `resolution` points uniformly spaced on the unit circle, starting at
/// angle 0, counterclockwise.
pub fn circle_net(resolution: usize) -> Vec<Vec<f64>> {
    (0..resolution)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
            vec![snap_coord(theta.cos()), snap_coord(theta.sin())]
        })
        .collect()
}

/// Uniform angular grid on the unit sphere in R^n. For n = 2 this is the
/// circle net; for n >= 3 it grids the spherical angles (resolution points
/// per angle) and deduplicates pole collapses.
pub fn sphere_net(n: usize, resolution: usize) -> Vec<Vec<f64>> {
    assert!(n >= 2, "sphere net needs dimension >= 2");
    if n == 2 {
        return circle_net(resolution);
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut angles = vec![0usize; n - 1];
    loop {
        let mut p = Vec::with_capacity(n);
        let mut sin_prod = 1.0;
        for (i, &k) in angles.iter().enumerate() {
            let phi = if i + 1 < n - 1 {
                std::f64::consts::PI * k as f64 / (resolution.max(2) - 1) as f64
            } else {
                2.0 * std::f64::consts::PI * k as f64 / resolution as f64
            };
            p.push(snap_coord(sin_prod * phi.cos()));
            sin_prod *= phi.sin();
        }
        p.push(snap_coord(sin_prod));
        if !points
            .iter()
            .any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-9))
        {
            points.push(p);
        }
        // advance the angle counter
        let mut i = 0;
        loop {
            angles[i] += 1;
            if angles[i] < resolution {
                break;
            }
            angles[i] = 0;
            i += 1;
            if i == n - 1 {
                return points;
            }
        }
    }
}

/// Open right semicircle: x > 0.
pub(crate) fn in_u0(p: &[f64]) -> bool {
    p[0] > 0.0
}

/// Open upper semicircle: y > 0.
pub(crate) fn in_u1(p: &[f64]) -> bool {
    p[1] > 0.0
}
