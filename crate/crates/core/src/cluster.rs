//! K-Means with greedy k-means++ seeding, Lloyd iterations and the
//! multi-restart protocol (run `r` uses seed `base_seed + r`; the
//! lowest-inertia run is the representative one).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::matrix::DenseMatrix;
use crate::scalar::{squared_distance, Scalar};

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds the number of points ({n})")]
    TooManyClusters { k: usize, n: usize },
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("runs must be at least 1")]
    ZeroRuns,
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult<T> {
    pub assignments: Vec<usize>,
    pub centers: DenseMatrix<T>,
    pub inertia: T,
    pub iterations: usize,
    pub seed: u64,
}

impl<T: Scalar> ClusteringResult<T> {
    pub fn k(&self) -> usize {
        self.centers.nrows()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary<T> {
    pub runs: Vec<ClusteringResult<T>>,
    pub best_index: usize,
}

impl<T: Scalar> RestartSummary<T> {
    pub fn best(&self) -> &ClusteringResult<T> {
        &self.runs[self.best_index]
    }

    pub fn inertias(&self) -> Vec<T> {
        self.runs.iter().map(|r| r.inertia).collect()
    }
}

/// K-Means configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    k: usize,
    max_iter: usize,
    tol: f64,
}

impl KMeans {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        }
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    /// Convergence tolerance, relative to the mean per-feature variance.
    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn check<T: Scalar>(&self, points: &DenseMatrix<T>) -> Result<(), ClusterError> {
        if self.k == 0 {
            return Err(ClusterError::ZeroK);
        }
        if self.max_iter == 0 {
            return Err(ClusterError::ZeroIterations);
        }
        if self.k > points.nrows() {
            return Err(ClusterError::TooManyClusters {
                k: self.k,
                n: points.nrows(),
            });
        }
        if !points.is_finite() {
            return Err(ClusterError::NonFinite);
        }
        Ok(())
    }

    pub fn fit<T: Scalar>(
        &self,
        points: &DenseMatrix<T>,
        seed: u64,
    ) -> Result<ClusteringResult<T>, ClusterError> {
        self.check(points)?;
        Ok(self.run(points, seed, None))
    }

    /// Like [`KMeans::fit`], also returning the inertia after every Lloyd
    /// iteration (assignment step followed by center update).
    pub fn fit_traced<T: Scalar>(
        &self,
        points: &DenseMatrix<T>,
        seed: u64,
    ) -> Result<(ClusteringResult<T>, Vec<T>), ClusterError> {
        self.check(points)?;
        let mut trace = Vec::new();
        let result = self.run(points, seed, Some(&mut trace));
        Ok((result, trace))
    }

    pub fn fit_restarts<T: Scalar>(
        &self,
        points: &DenseMatrix<T>,
        runs: usize,
        base_seed: u64,
    ) -> Result<RestartSummary<T>, ClusterError> {
        if runs == 0 {
            return Err(ClusterError::ZeroRuns);
        }
        self.check(points)?;
        let runs: Vec<ClusteringResult<T>> = (0..runs as u64)
            .into_par_iter()
            .map(|r| self.run(points, base_seed.wrapping_add(r), None))
            .collect();
        let mut best_index = 0;
        for (i, run) in runs.iter().enumerate() {
            if run.inertia < runs[best_index].inertia {
                best_index = i;
            }
        }
        Ok(RestartSummary { runs, best_index })
    }

    fn run<T: Scalar>(
        &self,
        points: &DenseMatrix<T>,
        seed: u64,
        mut trace: Option<&mut Vec<T>>,
    ) -> ClusteringResult<T> {
        let n = points.nrows();
        let k = self.k;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = T::of(self.tol) * mean_feature_variance(points);

        let mut centers = kmeans_plus_plus(points, k, &mut rng);
        let mut assignments = vec![0usize; n];
        let mut distances = vec![T::zero(); n];
        let mut iterations = 0;

        while iterations < self.max_iter {
            iterations += 1;
            assign(points, &centers, &mut assignments, &mut distances);
            repair_empty(k, &mut assignments, &mut distances);
            let updated = means(points, &assignments, k);
            let shift: T = updated
                .rows()
                .zip(centers.rows())
                .map(|(a, b)| squared_distance(a, b))
                .sum();
            centers = updated;
            if let Some(trace) = trace.as_deref_mut() {
                trace.push(inertia_unchecked(points, &assignments, &centers));
            }
            if shift <= tol {
                break;
            }
        }

        // Final assignment so labels are consistent with the returned centers.
        assign(points, &centers, &mut assignments, &mut distances);
        for moved in repair_empty(k, &mut assignments, &mut distances) {
            centers.row_mut(assignments[moved]).copy_from_slice(points.row(moved));
        }
        let inertia = inertia_unchecked(points, &assignments, &centers);

        ClusteringResult {
            assignments,
            centers,
            inertia,
            iterations,
            seed,
        }
    }
}

fn mean_feature_variance<T: Scalar>(points: &DenseMatrix<T>) -> T {
    let n = points.nrows();
    let d = points.ncols();
    if n == 0 || d == 0 {
        return T::zero();
    }
    let nf = T::of(n as f64);
    let mut total = T::zero();
    for j in 0..d {
        let mean = points.rows().map(|r| r[j]).sum::<T>() / nf;
        let var = points
            .rows()
            .map(|r| {
                let dv = r[j] - mean;
                dv * dv
            })
            .sum::<T>()
            / nf;
        total = total + var;
    }
    total / T::of(d as f64)
}

/// Index drawn with probability proportional to `weights`, via one uniform draw.
fn weighted_pick<T: Scalar>(weights: &[T], total: f64, rng: &mut ChaCha8Rng) -> usize {
    if total.is_nan() || total <= 0.0 {
        return rng.random_range(0..weights.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, w) in weights.iter().enumerate() {
        let w = w.as_f64();
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if acc > target {
                return i;
            }
        }
    }
    last_positive
}

/// Greedy k-means++: each new center is the best of `2 + ln k` candidates
/// sampled proportionally to squared distance.
fn kmeans_plus_plus<T: Scalar>(
    points: &DenseMatrix<T>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> DenseMatrix<T> {
    let n = points.nrows();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut centers = DenseMatrix::zeros(k, points.ncols());

    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from_slice(points.row(first));
    let mut closest: Vec<T> = points
        .rows()
        .map(|p| squared_distance(p, points.row(first)))
        .collect();

    for c in 1..k {
        let total: f64 = closest.iter().map(|d| d.as_f64()).sum();
        let mut best: Option<(usize, T, Vec<T>)> = None;
        for _ in 0..trials {
            let candidate = weighted_pick(&closest, total, rng);
            let updated: Vec<T> = points
                .rows()
                .zip(&closest)
                .map(|(p, &d)| d.min(squared_distance(p, points.row(candidate))))
                .collect();
            let potential: T = updated.iter().copied().sum();
            if best.as_ref().is_none_or(|(_, b, _)| potential < *b) {
                best = Some((candidate, potential, updated));
            }
        }
        let (chosen, _, updated) = best.expect("at least two trials");
        centers.row_mut(c).copy_from_slice(points.row(chosen));
        closest = updated;
    }
    centers
}

/// Nearest-center assignment; ties go to the lowest center index.
fn assign<T: Scalar>(
    points: &DenseMatrix<T>,
    centers: &DenseMatrix<T>,
    assignments: &mut [usize],
    distances: &mut [T],
) {
    assignments
        .par_iter_mut()
        .zip(distances.par_iter_mut())
        .enumerate()
        .for_each(|(i, (a, dist))| {
            let p = points.row(i);
            let mut best = 0;
            let mut best_d = squared_distance(p, centers.row(0));
            for c in 1..centers.nrows() {
                let d = squared_distance(p, centers.row(c));
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            *a = best;
            *dist = best_d;
        });
}

/// Moves, for each empty cluster, the point farthest from its center (among
/// clusters with more than one member) into it. Returns the moved points.
fn repair_empty<T: Scalar>(k: usize, assignments: &mut [usize], distances: &mut [T]) -> Vec<usize> {
    let mut sizes = vec![0usize; k];
    for &a in assignments.iter() {
        sizes[a] += 1;
    }
    let mut moved = Vec::new();
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far: Option<usize> = None;
        for i in 0..assignments.len() {
            if sizes[assignments[i]] > 1 && far.is_none_or(|f| distances[i] > distances[f]) {
                far = Some(i);
            }
        }
        let i = far.expect("k <= n guarantees a donor cluster");
        sizes[assignments[i]] -= 1;
        sizes[empty] = 1;
        assignments[i] = empty;
        distances[i] = T::zero();
        moved.push(i);
    }
    moved
}

fn means<T: Scalar>(points: &DenseMatrix<T>, assignments: &[usize], k: usize) -> DenseMatrix<T> {
    let mut sums = DenseMatrix::zeros(k, points.ncols());
    let mut counts = vec![0usize; k];
    for (p, &a) in points.rows().zip(assignments) {
        counts[a] += 1;
        for (s, &x) in sums.row_mut(a).iter_mut().zip(p) {
            *s = *s + x;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            let cf = T::of(count as f64);
            for s in sums.row_mut(c) {
                *s = *s / cf;
            }
        }
    }
    sums
}

fn inertia_unchecked<T: Scalar>(points: &DenseMatrix<T>, assignments: &[usize], centers: &DenseMatrix<T>) -> T {
    points
        .rows()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, centers.row(a)))
        .sum()
}

/// Sum of squared distances from each point to its assigned center.
pub fn inertia_of<T: Scalar>(
    points: &DenseMatrix<T>,
    assignments: &[usize],
    centers: &DenseMatrix<T>,
) -> Result<T, ClusterError> {
    if assignments.len() != points.nrows() {
        return Err(ClusterError::Shape(format!(
            "{} assignments for {} points",
            assignments.len(),
            points.nrows()
        )));
    }
    if centers.ncols() != points.ncols() {
        return Err(ClusterError::Shape(format!(
            "centers have {} columns, points have {}",
            centers.ncols(),
            points.ncols()
        )));
    }
    if let Some(&a) = assignments.iter().find(|&&a| a >= centers.nrows()) {
        return Err(ClusterError::Shape(format!(
            "assignment {a} out of range for {} centers",
            centers.nrows()
        )));
    }
    Ok(inertia_unchecked(points, assignments, centers))
}

/// One K-Means run.
pub fn kmeans_once<T: Scalar>(
    points: &DenseMatrix<T>,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<ClusteringResult<T>, ClusterError> {
    KMeans::new(k).max_iter(max_iter).tol(tol).fit(points, seed)
}

/// `runs` independent K-Means runs with default iteration settings.
pub fn kmeans_restarts<T: Scalar>(
    points: &DenseMatrix<T>,
    k: usize,
    runs: usize,
    base_seed: u64,
) -> Result<RestartSummary<T>, ClusterError> {
    KMeans::new(k).fit_restarts(points, runs, base_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]).unwrap()
    }

    #[test]
    fn k_equals_n_gives_zero_inertia() {
        let pts = square();
        let r = kmeans_once(&pts, 4, 3, 300, 1e-4).unwrap();
        assert_eq!(r.inertia, 0.0);
        let mut sizes = r.cluster_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 1, 1]);
    }

    #[test]
    fn k_one_is_the_mean() {
        let pts = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 9.0]]).unwrap();
        let r = kmeans_once(&pts, 1, 0, 300, 1e-4).unwrap();
        assert_eq!(r.centers.row(0), &[3.0, 5.0]);
        // (4+9) + (0+1) + (4+16)
        assert!((r.inertia - 34.0_f64).abs() < 1e-12);
    }

    #[test]
    fn two_pairs() {
        let r = kmeans_once(&square(), 2, 11, 300, 1e-4).unwrap();
        assert!((r.inertia - 1.0).abs() < 1e-12);
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[2], r.assignments[3]);
        assert_ne!(r.assignments[0], r.assignments[2]);
    }

    #[test]
    fn errors() {
        let pts = square();
        assert_eq!(
            kmeans_once(&pts, 5, 0, 300, 1e-4).unwrap_err(),
            ClusterError::TooManyClusters { k: 5, n: 4 }
        );
        assert_eq!(kmeans_once(&pts, 0, 0, 300, 1e-4).unwrap_err(), ClusterError::ZeroK);
        let bad = DenseMatrix::from_rows(&[[0.0], [f64::NAN]]).unwrap();
        assert_eq!(kmeans_once(&bad, 1, 0, 300, 1e-4).unwrap_err(), ClusterError::NonFinite);
        assert_eq!(kmeans_restarts(&pts, 2, 0, 0).unwrap_err(), ClusterError::ZeroRuns);
    }

    #[test]
    fn duplicate_points_keep_all_clusters_live() {
        let pts = DenseMatrix::from_rows(&[[1.0_f32], [1.0], [1.0], [2.0]]).unwrap();
        let r = kmeans_once(&pts, 3, 5, 300, 1e-4).unwrap();
        assert!(r.cluster_sizes().iter().all(|&s| s > 0));
        let recomputed = inertia_of(&pts, &r.assignments, &r.centers).unwrap();
        assert!((recomputed - r.inertia).abs() <= 1e-6);
    }

    #[test]
    fn inertia_examples() {
        let pts = square();
        let centers = DenseMatrix::from_rows(&[[0.0, 0.5], [10.0, 0.5]]).unwrap();
        assert!((inertia_of(&pts, &[0, 0, 1, 1], &centers).unwrap() - 1.0).abs() < 1e-12);
        let one = DenseMatrix::from_rows(&[[3.0, 0.0]]).unwrap();
        let origin = DenseMatrix::from_rows(&[[0.0, 0.0]]).unwrap();
        assert_eq!(inertia_of(&one, &[0], &origin).unwrap(), 9.0);
        assert_eq!(inertia_of(&one, &[0], &one).unwrap(), 0.0);
        assert!(inertia_of(&one, &[0, 0], &one).is_err());
        assert!(inertia_of(&one, &[1], &one).is_err());
    }

    #[test]
    fn single_restart_wraps_run() {
        let pts = square();
        let s = kmeans_restarts(&pts, 2, 1, 42).unwrap();
        assert_eq!(s.runs.len(), 1);
        assert_eq!(s.best_index, 0);
        assert_eq!(s.runs[0], kmeans_once(&pts, 2, 42, DEFAULT_MAX_ITER, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn tied_restarts_pick_first() {
        let s = kmeans_restarts(&square(), 2, 50, 0).unwrap();
        assert!(s.runs.iter().all(|r| (r.inertia - 1.0).abs() < 1e-12));
        assert_eq!(s.best_index, 0);
        for (r, run) in s.runs.iter().enumerate() {
            assert_eq!(run.seed, r as u64);
        }
    }
}
