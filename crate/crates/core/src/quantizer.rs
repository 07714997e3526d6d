//! k-means codebook training and nearest-centroid assignment.
//!
//! Training minimizes squared Euclidean distance (standard Lloyd iterations
//! from a k-means++ seeding). Centroids are accumulated in `f64` and stored as
//! `f32`. The assignment step runs in parallel over frames, but every
//! reduction happens sequentially in frame order, so the result does not
//! depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::{FeatureSequence, FrameMatrix};

pub const DEFAULT_K: usize = 100;
pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_REL_TOL: f64 = 1e-4;

/// K×D centroid matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    centroids: FrameMatrix,
}

impl Codebook {
    pub fn new(centroids: FrameMatrix) -> Result<Self> {
        if centroids.rows() == 0 {
            return Err(Error::InvalidArgument("codebook needs at least one centroid".into()));
        }
        if centroids.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("codebook contains non-finite values".into()));
        }
        Ok(Self { centroids })
    }

    pub fn k(&self) -> usize {
        self.centroids.rows()
    }

    pub fn dim(&self) -> usize {
        self.centroids.dim()
    }

    pub fn centroids(&self) -> &FrameMatrix {
        &self.centroids
    }

    pub fn centroid(&self, i: usize) -> &[f32] {
        self.centroids.row(i)
    }

    /// Nearest centroid and its squared distance; ties go to the lowest index.
    pub fn nearest(&self, frame: &[f32]) -> (u32, f64) {
        let mut best = (0u32, f64::INFINITY);
        for (i, c) in self.centroids.iter_rows().enumerate() {
            let d = squared_distance(frame, c);
            if d < best.1 {
                best = (i as u32, d);
            }
        }
        best
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim });
        }
        Ok(())
    }
}

pub fn squared_distance(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once the relative inertia improvement drops below this.
    pub rel_tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { k: DEFAULT_K, seed: 0, max_iters: DEFAULT_MAX_ITERS, rel_tol: DEFAULT_REL_TOL }
    }
}

impl KMeansConfig {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    /// Inertia (sum of squared distances) after each assignment step.
    pub inertia_trace: Vec<f64>,
}

impl TrainingReport {
    pub fn final_inertia(&self) -> f64 {
        self.inertia_trace.last().copied().unwrap_or(0.0)
    }
}

pub fn train_codebook(features: &[FeatureSequence], config: &KMeansConfig) -> Result<Codebook> {
    train_codebook_with_report(features, config).map(|(cb, _)| cb)
}

pub fn train_codebook_with_report(
    features: &[FeatureSequence],
    config: &KMeansConfig,
) -> Result<(Codebook, TrainingReport)> {
    let dim = features.first().map_or(0, |f| f.frames.dim());
    if let Some(f) = features.iter().find(|f| f.frames.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: f.frames.dim() }
            .in_utterance(&f.utterance_id));
    }
    let points: Vec<&[f32]> = features.iter().flat_map(|f| f.frames.iter_rows()).collect();
    train_on_points(&points, dim, config)
}

/// Lloyd's algorithm over pooled frames.
pub fn train_on_points(points: &[&[f32]], dim: usize, config: &KMeansConfig) -> Result<(Codebook, TrainingReport)> {
    let k = config.k;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if points.len() < k {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the number of pooled frames ({})",
            points.len()
        )));
    }
    if config.rel_tol.is_nan() || config.rel_tol < 0.0 {
        return Err(Error::InvalidArgument("rel_tol must be non-negative".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centroids = kmeans_plus_plus(points, dim, k, &mut rng);
    let mut trace = Vec::new();
    let mut labels: Vec<(u32, f64)> = Vec::new();

    for iter in 0..config.max_iters.max(1) {
        points.par_iter().map(|p| nearest_f64(p, &centroids, dim)).collect_into_vec(&mut labels);
        let inertia: f64 = labels.iter().map(|&(_, d)| d).sum();
        let converged = match trace.last() {
            Some(&prev) if prev > 0.0 => (prev - inertia) / prev < config.rel_tol,
            Some(_) => true,
            None => inertia == 0.0,
        };
        trace.push(inertia);
        if converged || iter + 1 == config.max_iters.max(1) {
            break;
        }
        update_centroids(points, dim, &labels, &mut centroids);
    }

    let data = centroids.iter().map(|&v| v as f32).collect();
    let codebook = Codebook::new(FrameMatrix::new(data, dim)?)?;
    Ok((codebook, TrainingReport { inertia_trace: trace }))
}

fn kmeans_plus_plus(points: &[&[f32]], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..points.len());
    centroids.extend(points[first].iter().map(|&v| f64::from(v)));
    let mut d2: Vec<f64> = points.par_iter().map(|p| sq_dist_f64(p, &centroids[..dim])).collect();

    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                acc += d;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // fewer distinct points than clusters
            rng.random_range(0..points.len())
        };
        centroids.extend(points[chosen].iter().map(|&v| f64::from(v)));
        let new = &centroids[c * dim..(c + 1) * dim];
        d2.par_iter_mut().zip(points.par_iter()).for_each(|(d, p)| *d = d.min(sq_dist_f64(p, new)));
    }
    centroids
}

fn update_centroids(points: &[&[f32]], dim: usize, labels: &[(u32, f64)], centroids: &mut [f64]) {
    let k = centroids.len() / dim;
    let mut sums = vec![0.0f64; k * dim];
    let mut counts = vec![0usize; k];
    for (p, &(label, _)) in points.iter().zip(labels) {
        let label = label as usize;
        counts[label] += 1;
        for (s, &v) in sums[label * dim..(label + 1) * dim].iter_mut().zip(p.iter()) {
            *s += f64::from(v);
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let n = counts[c] as f64;
            for (dst, s) in centroids[c * dim..(c + 1) * dim].iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                *dst = s / n;
            }
        }
    }

    if counts.iter().all(|&n| n > 0) {
        return;
    }
    // Empty clusters take the point farthest from its own centroid.
    let mut spread: Vec<f64> = points
        .iter()
        .zip(labels)
        .map(|(p, &(label, _))| sq_dist_f64(p, &centroids[label as usize * dim..(label as usize + 1) * dim]))
        .collect();
    for c in (0..k).filter(|&c| counts[c] == 0) {
        let (far, _) = spread
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        for (dst, &v) in centroids[c * dim..(c + 1) * dim].iter_mut().zip(points[far].iter()) {
            *dst = f64::from(v);
        }
        spread[far] = 0.0;
    }
}

fn sq_dist_f64(p: &[f32], c: &[f64]) -> f64 {
    p.iter()
        .zip(c)
        .map(|(&x, &y)| {
            let d = f64::from(x) - y;
            d * d
        })
        .sum()
}

fn nearest_f64(p: &[f32], centroids: &[f64], dim: usize) -> (u32, f64) {
    let mut best = (0u32, f64::INFINITY);
    for (i, c) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist_f64(p, c);
        if d < best.1 {
            best = (i as u32, d);
        }
    }
    best
}

/// Nearest-centroid label for every frame (Euclidean; ties to the lowest index).
pub fn assign(frames: &FrameMatrix, codebook: &Codebook) -> Result<Vec<u32>> {
    if frames.is_empty() {
        return Ok(Vec::new());
    }
    codebook.check_dim(frames.dim())?;
    Ok(frames.as_slice().par_chunks_exact(frames.dim()).map(|f| codebook.nearest(f).0).collect())
}
