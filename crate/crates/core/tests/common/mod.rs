//! Brute-force reference implementations shared by the integration tests.
//! None of these reuse library code paths beyond plain data types.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_seq(rng: &mut impl Rng, max_len: usize, alphabet: u32) -> Vec<u32> {
    let n = rng.random_range(0..=max_len);
    (0..n).map(|_| rng.random_range(0..alphabet)).collect()
}

/// Best local alignment score found by walking every alignment path from
/// every start cell, with no score table.
pub fn brute_local_score(x: &[u32], y: &[u32], m: i32, mm: i32, w: i32) -> i32 {
    fn walk(x: &[u32], y: &[u32], i: usize, j: usize, acc: i32, m: i32, mm: i32, w: i32, best: &mut i32) {
        *best = (*best).max(acc);
        if i < x.len() && j < y.len() {
            let s = if x[i] == y[j] { m } else { mm };
            walk(x, y, i + 1, j + 1, acc + s, m, mm, w, best);
        }
        if i < x.len() {
            walk(x, y, i + 1, j, acc - w, m, mm, w, best);
        }
        if j < y.len() {
            walk(x, y, i, j + 1, acc - w, m, mm, w, best);
        }
    }
    let mut best = 0;
    for a in 0..x.len() {
        for c in 0..y.len() {
            walk(x, y, a, c, 0, m, mm, w, &mut best);
        }
    }
    best
}

/// All optimal local alignments as column lists, found by exhaustive search.
pub fn brute_optimal_alignments(x: &[u32], y: &[u32], m: i32, mm: i32, w: i32) -> (i32, Vec<Vec<(Option<u32>, Option<u32>)>>) {
    type Cols = Vec<(Option<u32>, Option<u32>)>;
    #[allow(clippy::too_many_arguments)]
    fn walk(x: &[u32], y: &[u32], i: usize, j: usize, acc: i32, cols: &mut Cols, out: &mut (i32, Vec<Cols>), p: (i32, i32, i32)) {
        let (m, mm, w) = p;
        if !cols.is_empty() {
            if acc > out.0 {
                *out = (acc, vec![cols.clone()]);
            } else if acc == out.0 && !out.1.contains(cols) {
                out.1.push(cols.clone());
            }
        }
        if i < x.len() && j < y.len() {
            cols.push((Some(x[i]), Some(y[j])));
            walk(x, y, i + 1, j + 1, acc + if x[i] == y[j] { m } else { mm }, cols, out, p);
            cols.pop();
        }
        if i < x.len() {
            cols.push((Some(x[i]), None));
            walk(x, y, i + 1, j, acc - w, cols, out, p);
            cols.pop();
        }
        if j < y.len() {
            cols.push((None, Some(y[j])));
            walk(x, y, i, j + 1, acc - w, cols, out, p);
            cols.pop();
        }
    }
    let mut out = (i32::MIN, Vec::new());
    for a in 0..x.len() {
        for c in 0..y.len() {
            walk(x, y, a, c, 0, &mut Vec::new(), &mut out, (m, mm, w));
        }
    }
    out
}

pub fn euclid(a: &[f32], b: &[f32]) -> f64 {
    let mut s = 0.0f64;
    for (&p, &q) in a.iter().zip(b) {
        let d = f64::from(p) - f64::from(q);
        s += d * d;
    }
    s.sqrt()
}

/// Frame-order cost of one tiling given per-frame unit labels.
pub fn tiling_cost(frames: &[Vec<f32>], centroids: &[Vec<f32>], labels: &[usize], segments: usize, gamma: f64) -> f64 {
    let mut total = 0.0;
    for (z, &u) in frames.iter().zip(labels) {
        total += euclid(z, &centroids[u]);
    }
    total - gamma * (frames.len() - segments) as f64
}

/// Minimum segmentation cost over every boundary set and every unit choice.
pub fn brute_segment_cost(frames: &[Vec<f32>], centroids: &[Vec<f32>], gamma: f64) -> f64 {
    let t = frames.len();
    let k = centroids.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << (t - 1)) {
        // bit b set: a segment boundary after frame b
        let mut bounds = vec![0];
        for b in 0..t - 1 {
            if mask >> b & 1 == 1 {
                bounds.push(b + 1);
            }
        }
        bounds.push(t);
        let n = bounds.len() - 1;
        let mut choice = vec![0usize; n];
        loop {
            let mut labels = vec![0; t];
            for s in 0..n {
                for l in &mut labels[bounds[s]..bounds[s + 1]] {
                    *l = choice[s];
                }
            }
            best = best.min(tiling_cost(frames, centroids, &labels, n, gamma));
            let mut d = 0;
            while d < n {
                choice[d] += 1;
                if choice[d] < k {
                    break;
                }
                choice[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
        }
    }
    best
}

/// Edit distance by plain recursion; only for short inputs.
pub fn recursive_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((ha, ta)), Some((hb, tb))) => {
            let sub = recursive_levenshtein(ta, tb) + usize::from(ha != hb);
            sub.min(recursive_levenshtein(ta, b) + 1).min(recursive_levenshtein(a, tb) + 1)
        }
    }
}

/// Covered speech time for one recording: walks the sorted breakpoints and
/// counts each elementary interval lying inside some fragment and some VAD
/// region.
pub fn sweep_line_covered(fragments: &[(f64, f64)], vad: &[(f64, f64)]) -> f64 {
    let mut points: Vec<f64> = fragments.iter().chain(vad).flat_map(|&(s, e)| [s, e]).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let inside = |set: &[(f64, f64)], t: f64| set.iter().any(|&(s, e)| s <= t && t < e);
    let mut covered = 0.0;
    for w in points.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if inside(fragments, mid) && inside(vad, mid) {
            covered += w[1] - w[0];
        }
    }
    covered
}
