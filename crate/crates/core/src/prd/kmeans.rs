//! Lloyd's k-means with k-means++ seeding over row-major points.

use rand::Rng;

pub const DEFAULT_MAX_ITERATIONS: usize = 500;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct KMeans {
    /// `k x dim`, row-major.
    pub centers: Vec<f64>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    /// False when the iteration cap was hit before the centers settled.
    pub converged: bool,
}

/// Clusters `n = points.len() / dim` points into `k` groups.
///
/// Iteration stops once no center moves farther than `tolerance`
/// (Euclidean) or after `max_iterations` rounds.
pub fn kmeans<R: Rng + ?Sized>(
    points: &[f64],
    dim: usize,
    k: usize,
    max_iterations: usize,
    tolerance: f64,
    rng: &mut R,
) -> KMeans {
    let n = points.len() / dim;
    assert!(k >= 1 && n >= k, "k-means needs at least k points");
    let point = |i: usize| &points[i * dim..(i + 1) * dim];

    let mut centers = plus_plus_init(points, dim, k, rng);
    let mut assignments = vec![0usize; n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        assign(points, dim, &centers, &mut assignments);

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &c) in assignments.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(point(i)) {
                *s += x;
            }
        }
        let mut taken = vec![false; n];
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                sums[c * dim..(c + 1) * dim]
                    .iter_mut()
                    .for_each(|s| *s *= inv);
            } else {
                // Empty cluster: restart it at the point worst served by its center.
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| {
                        let da = sq_dist(point(a), center(&centers, dim, assignments[a]));
                        let db = sq_dist(point(b), center(&centers, dim, assignments[b]));
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("n >= k leaves a candidate");
                taken[far] = true;
                sums[c * dim..(c + 1) * dim].copy_from_slice(point(far));
            }
        }
        let shift = (0..k)
            .map(|c| sq_dist(center(&centers, dim, c), center(&sums, dim, c)))
            .fold(0.0f64, f64::max)
            .sqrt();
        centers = sums;
        if shift <= tolerance {
            converged = true;
            break;
        }
    }
    assign(points, dim, &centers, &mut assignments);
    KMeans {
        centers,
        assignments,
        iterations,
        converged,
    }
}

fn center(centers: &[f64], dim: usize, c: usize) -> &[f64] {
    &centers[c * dim..(c + 1) * dim]
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(points: &[f64], dim: usize, centers: &[f64], out: &mut [usize]) {
    let k = centers.len() / dim;
    for (i, slot) in out.iter_mut().enumerate() {
        let p = &points[i * dim..(i + 1) * dim];
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let d = sq_dist(p, center(centers, dim, c));
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        *slot = best;
    }
}

/// k-means++: each new center is drawn with probability proportional to the
/// squared distance to the nearest center already chosen.
fn plus_plus_init<R: Rng + ?Sized>(points: &[f64], dim: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let n = points.len() / dim;
    let point = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut centers = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..n);
    centers.extend_from_slice(point(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(point(i), point(first))).collect();

    for _ in 1..k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Round-off can leave `acc` just short of `target`.
            pick.unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).expect("total > 0"))
        } else {
            // Fewer distinct points than clusters.
            rng.random_range(0..n)
        };
        centers.extend_from_slice(point(next));
        for (i, slot) in nearest.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(point(i), point(next)));
        }
    }
    centers
}
