//! Learning algorithms driven only by a manifold's distance, exp and log
//! maps: pairwise distance matrices, Karcher means, K-means clustering and
//! K-nearest-neighbor classification. Running them against
//! [`EuclideanSpace`](crate::geometry::EuclideanSpace) gives the flat
//! baselines used for comparisons.

use crate::error::{Error, Result};
use crate::geometry::manifold::{metric_norm, Manifold};
use crate::geometry::ops::GeodesicSolver;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Points with optional class labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub points: Vec<DVector<f64>>,
    pub labels: Option<Vec<usize>>,
}

impl LabeledDataset {
    pub fn new(points: Vec<DVector<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("dataset is empty".into()));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::Domain("dataset points have mixed dimensions".into()));
        }
        if let Some(ref l) = labels {
            if l.len() != points.len() {
                return Err(Error::DimensionMismatch { expected: points.len(), got: l.len() });
            }
        }
        Ok(LabeledDataset { points, labels })
    }
}

/// Pairwise distance matrix with failed pairs flagged.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    /// Symmetric matrix with zero diagonal; failed entries are NaN.
    pub matrix: DMatrix<f64>,
    /// (i, j, message) for every pair whose distance computation failed.
    pub failures: Vec<(usize, usize, String)>,
}

/// All pairwise distances, computed concurrently. Failures do not abort
/// the matrix: the entry is set to NaN and the pair is reported.
pub fn pairwise_distances(
    points: &[DVector<f64>],
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
) -> PairwiseDistances {
    let n = points.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let results: Vec<(usize, usize, Result<f64>)> = pairs
        .into_par_iter()
        .map(|(i, j)| (i, j, solver.dist(manifold, &points[i], &points[j])))
        .collect();
    let mut matrix = DMatrix::zeros(n, n);
    let mut failures = Vec::new();
    for (i, j, res) in results {
        match res {
            Ok(d) => {
                matrix[(i, j)] = d;
                matrix[(j, i)] = d;
            }
            Err(e) => {
                matrix[(i, j)] = f64::NAN;
                matrix[(j, i)] = f64::NAN;
                failures.push((i, j, e.to_string()));
            }
        }
    }
    PairwiseDistances { matrix, failures }
}

/// Karcher (intrinsic) mean by fixed-point iteration
/// mu <- exp_mu(tau mean_i log_mu(x_i)), with the unit step halved whenever
/// the sum-of-squared-distances objective increases. Converges when the
/// mean log has metric norm <= tol.
pub fn karcher_mean(
    points: &[DVector<f64>],
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    karcher_mean_from(points, manifold, solver, tol, max_iter, None)
}

/// [`karcher_mean`] with an explicit starting iterate (used to warm-start
/// centroid updates).
pub fn karcher_mean_from(
    points: &[DVector<f64>],
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
    tol: f64,
    max_iter: usize,
    init: Option<&DVector<f64>>,
) -> Result<DVector<f64>> {
    let mut cache = vec![None; points.len()];
    karcher_mean_cached(points, manifold, solver, tol, max_iter, init, &mut cache)
}

/// [`karcher_mean_from`] with a per-point tangent cache: each log solve is
/// warm-started from the tangent computed at the previous iterate, which
/// keeps the Newton shooting to a couple of steps once the mean settles.
fn karcher_mean_cached(
    points: &[DVector<f64>],
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
    tol: f64,
    max_iter: usize,
    init: Option<&DVector<f64>>,
    cache: &mut [Option<DVector<f64>>],
) -> Result<DVector<f64>> {
    if points.is_empty() {
        return Err(Error::Domain("mean of an empty point set".into()));
    }
    if points.len() == 1 {
        return Ok(points[0].clone());
    }
    let n = points.len() as f64;
    let mut mu = match init {
        Some(p) => p.clone(),
        None => {
            // coordinate-wise mean when it lies in the domain, else a data point
            let mut acc = DVector::zeros(points[0].len());
            for p in points {
                acc += p;
            }
            acc /= n;
            if manifold.belongs(&acc) {
                acc
            } else {
                points[0].clone()
            }
        }
    };
    let logs_and_objective = |mu: &DVector<f64>,
                              cache: &mut [Option<DVector<f64>>]|
     -> Result<(DVector<f64>, f64)> {
        let mut mean_log = DVector::zeros(mu.len());
        let mut objective = 0.0;
        for (i, p) in points.iter().enumerate() {
            let v = solver.log_with_guess(manifold, mu, p, cache[i].as_ref())?;
            objective += metric_norm(manifold, mu, &v)?.powi(2);
            mean_log += &v / n;
            cache[i] = Some(v);
        }
        Ok((mean_log, objective))
    };
    let (mut mean_log, mut objective) = logs_and_objective(&mu, cache)?;
    for _ in 0..max_iter {
        let residual = metric_norm(manifold, &mu, &mean_log)?;
        if residual <= tol {
            return Ok(mu);
        }
        let mut tau = 1.0;
        let mut advanced = false;
        for _ in 0..8 {
            let step = &mean_log * tau;
            if let Ok(candidate) = solver.exp(manifold, &mu, &step) {
                if let Ok((cand_log, cand_obj)) = logs_and_objective(&candidate, cache) {
                    if cand_obj <= objective * (1.0 + 1e-12) {
                        mu = candidate;
                        mean_log = cand_log;
                        objective = cand_obj;
                        advanced = true;
                        break;
                    }
                }
            }
            tau *= 0.5;
        }
        if !advanced {
            return Err(Error::NonConvergence { iterations: max_iter, residual });
        }
    }
    let residual = metric_norm(manifold, &mu, &mean_log)?;
    if residual <= tol {
        Ok(mu)
    } else {
        Err(Error::NonConvergence { iterations: max_iter, residual })
    }
}

/// Output of [`riemannian_kmeans`].
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub centroids: Vec<DVector<f64>>,
    /// Index of the assigned centroid per input point.
    pub assignments: Vec<usize>,
    /// Sum of squared distances from each point to its centroid.
    pub objective: f64,
    pub iterations: usize,
    /// Number of empty-cluster reseeds performed across all iterations.
    pub reseeds: usize,
}

/// K-means with manifold distances: k-means++ seeding, alternating nearest
/// -centroid assignment and Karcher-mean updates. Deterministic for a
/// given seed. Empty clusters are reseeded at the point farthest from its
/// assigned centroid.
pub fn riemannian_kmeans(
    dataset: &LabeledDataset,
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusteringResult> {
    let pd = pairwise_distances(&dataset.points, manifold, solver);
    if let Some(&(i, j, _)) = pd.failures.first() {
        // recompute the failed pair to surface the underlying error
        solver.dist(manifold, &dataset.points[i], &dataset.points[j])?;
        return Err(Error::Domain(format!("distance failed for points {i} and {j}")));
    }
    riemannian_kmeans_with_matrix(dataset, manifold, solver, k, seed, max_iter, &pd.matrix)
}

/// [`riemannian_kmeans`] reusing a precomputed pairwise distance matrix for
/// seeding and the first assignment (the initial centroids are data points).
/// Later assignments prune candidate centroids with the triangle inequality
/// (a centroid at distance `>= 2 d(p, best)` from the current best cannot
/// win) and warm-start every geodesic log from the previous iteration's
/// tangent, so repeated runs over the same dataset stay cheap.
pub fn riemannian_kmeans_with_matrix(
    dataset: &LabeledDataset,
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
    k: usize,
    seed: u64,
    max_iter: usize,
    pairwise: &DMatrix<f64>,
) -> Result<ClusteringResult> {
    let points = &dataset.points;
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} invalid for {n} points")));
    }
    if pairwise.nrows() != n || pairwise.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: pairwise.nrows() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // k-means++ seeding straight from the matrix
    let mut centroid_idx: Vec<usize> = vec![rng.gen_range(0..n)];
    let mut best_sq: Vec<f64> =
        (0..n).map(|i| pairwise[(centroid_idx[0], i)].powi(2)).collect();
    while centroid_idx.len() < k {
        let total: f64 = best_sq.iter().sum();
        let next = if total <= 0.0 {
            // all remaining mass on existing centroids: pick any unused point
            (0..n).find(|&i| best_sq[i] > 0.0).unwrap_or(rng.gen_range(0..n))
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in best_sq.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        for i in 0..n {
            best_sq[i] = best_sq[i].min(pairwise[(next, i)].powi(2));
        }
        centroid_idx.push(next);
    }
    let mut centroids: Vec<DVector<f64>> =
        centroid_idx.iter().map(|&i| points[i].clone()).collect();
    // tangent cache: cache[c][i] = log from centroid c toward point i, used
    // to warm-start the next solve against the (slightly moved) centroid
    let mut cache: Vec<Vec<Option<DVector<f64>>>> = vec![vec![None; n]; k];
    let mut assignments = vec![0usize; n];
    let mut iterations = 0;
    let mut objective = f64::INFINITY;
    let mut reseeds = 0usize;
    for it in 0..max_iter {
        iterations = it + 1;
        let mut new_assignments = vec![0usize; n];
        let mut d_assigned = vec![0.0f64; n];
        if it == 0 {
            // initial centroids are data points: read the matrix
            for i in 0..n {
                let (mut bc, mut bd) = (0usize, pairwise[(centroid_idx[0], i)]);
                for (c, &ci) in centroid_idx.iter().enumerate().skip(1) {
                    let d = pairwise[(ci, i)];
                    if d < bd {
                        bd = d;
                        bc = c;
                    }
                }
                new_assignments[i] = bc;
                d_assigned[i] = bd;
            }
        } else {
            // inter-centroid distances drive the triangle-inequality pruning
            let mut cc = DMatrix::zeros(k, k);
            for a in 0..k {
                for b in (a + 1)..k {
                    let d = solver.dist(manifold, &centroids[a], &centroids[b])?;
                    cc[(a, b)] = d;
                    cc[(b, a)] = d;
                }
            }
            for i in 0..n {
                let mut bc = assignments[i];
                let mut bd = dist_to_centroid(
                    solver,
                    manifold,
                    &centroids[bc],
                    &points[i],
                    &mut cache[bc][i],
                )?;
                for c in 0..k {
                    if c == bc || cc[(bc, c)] >= 2.0 * bd {
                        continue;
                    }
                    let d = dist_to_centroid(
                        solver,
                        manifold,
                        &centroids[c],
                        &points[i],
                        &mut cache[c][i],
                    )?;
                    if d < bd {
                        bd = d;
                        bc = c;
                    }
                }
                new_assignments[i] = bc;
                d_assigned[i] = bd;
            }
        }
        // empty-cluster policy: reseed at the farthest point
        for c in 0..k {
            if !new_assignments.contains(&c) {
                let far = (0..n)
                    .max_by(|&a, &b| d_assigned[a].total_cmp(&d_assigned[b]))
                    .expect("nonempty dataset");
                centroids[c] = points[far].clone();
                cache[c] = vec![None; n];
                new_assignments[far] = c;
                d_assigned[far] = 0.0;
                reseeds += 1;
            }
        }
        let converged = new_assignments == assignments && it > 0;
        assignments = new_assignments;
        objective = d_assigned.iter().map(|d| d * d).sum();
        if converged {
            break;
        }
        // centroid update via warm-started Karcher means
        for c in 0..k {
            let member_idx: Vec<usize> =
                (0..n).filter(|&i| assignments[i] == c).collect();
            if member_idx.is_empty() {
                continue;
            }
            let members: Vec<DVector<f64>> =
                member_idx.iter().map(|&i| points[i].clone()).collect();
            let mut mcache: Vec<Option<DVector<f64>>> =
                member_idx.iter().map(|&i| cache[c][i].take()).collect();
            // the mean cannot be located more precisely than the log solves
            // that drive it, so the tolerance scales with the solver's
            let karcher_tol = (20.0 * solver.shoot_tol).max(1e-4);
            centroids[c] = karcher_mean_cached(
                &members,
                manifold,
                solver,
                karcher_tol,
                60,
                Some(&centroids[c]),
                &mut mcache,
            )?;
            for (slot, &i) in mcache.into_iter().zip(&member_idx) {
                cache[c][i] = slot;
            }
        }
    }
    Ok(ClusteringResult { centroids, assignments, objective, iterations, reseeds })
}

/// Distance from a moving centroid to a fixed data point, warm-started from
/// (and refreshing) the cached tangent for that pair.
fn dist_to_centroid(
    solver: &GeodesicSolver,
    manifold: &dyn Manifold,
    centroid: &DVector<f64>,
    point: &DVector<f64>,
    slot: &mut Option<DVector<f64>>,
) -> Result<f64> {
    if solver.use_closed_forms {
        if let Some(res) = manifold.dist_closed(centroid, point) {
            return res;
        }
    }
    let v = solver.log_with_guess(manifold, centroid, point, slot.as_ref())?;
    let d = metric_norm(manifold, centroid, &v)?;
    *slot = Some(v);
    Ok(d)
}

/// Majority-vote K-nearest-neighbor classification under manifold
/// distances. Vote ties are broken by the smaller summed distance of the
/// tied labels' neighbors, then by the lower label index.
pub fn knn_classify(
    train: &LabeledDataset,
    test_points: &[DVector<f64>],
    manifold: &dyn Manifold,
    solver: &GeodesicSolver,
    k: usize,
) -> Result<Vec<usize>> {
    let labels = train
        .labels
        .as_ref()
        .ok_or_else(|| Error::Domain("training dataset has no labels".into()))?;
    if k == 0 || k > train.points.len() {
        return Err(Error::Domain(format!(
            "k = {k} invalid for {} training points",
            train.points.len()
        )));
    }
    let rows: Vec<Result<Vec<f64>>> = test_points
        .par_iter()
        .map(|q| {
            train
                .points
                .iter()
                .map(|p| solver.dist(manifold, q, p))
                .collect::<Result<Vec<f64>>>()
        })
        .collect();
    let mut out = Vec::with_capacity(test_points.len());
    for row in rows {
        out.push(vote(&row?, labels, k));
    }
    Ok(out)
}

/// K-NN prediction from a precomputed distance matrix: classify the points
/// in `test_idx` using rows of `dist` restricted to `train_idx`.
pub fn knn_classify_from_matrix(
    dist: &DMatrix<f64>,
    train_idx: &[usize],
    labels: &[usize],
    test_idx: &[usize],
    k: usize,
) -> Result<Vec<usize>> {
    if labels.len() != train_idx.len() {
        return Err(Error::DimensionMismatch { expected: train_idx.len(), got: labels.len() });
    }
    if k == 0 || k > train_idx.len() {
        return Err(Error::Domain(format!("k = {k} invalid for {} training points", train_idx.len())));
    }
    let mut out = Vec::with_capacity(test_idx.len());
    for &t in test_idx {
        let row: Vec<f64> = train_idx.iter().map(|&j| dist[(t, j)]).collect();
        out.push(vote(&row, labels, k));
    }
    Ok(out)
}

fn vote(dists: &[f64], labels: &[usize], k: usize) -> usize {
    let mut order: Vec<usize> = (0..dists.len()).collect();
    order.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]));
    let neighbors = &order[..k];
    let max_label = neighbors.iter().map(|&i| labels[i]).max().unwrap_or(0);
    let mut votes = vec![0usize; max_label + 1];
    let mut sums = vec![0.0f64; max_label + 1];
    for &i in neighbors {
        votes[labels[i]] += 1;
        sums[labels[i]] += dists[i];
    }
    let mut best = 0usize;
    for l in 1..votes.len() {
        let better = votes[l] > votes[best]
            || (votes[l] == votes[best] && sums[l] < sums[best]);
        if better {
            best = l;
        }
    }
    best
}
