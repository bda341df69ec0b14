//! Hyperplane arrangement preprocessing and cell enumeration.
//!
//! The qualifying constraints of a branch-and-bound node form a central
//! arrangement (all hyperplanes pass through the node's linearization point).
//! This module deduplicates them and enumerates every nonempty sign region:
//! bit 1 means the constraint is `≤ 0` in that region, bit 0 means `≥ 0`.
//! Regions are certified nonempty by a small interior-point LP.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lagrangian::AffineForm;
use crate::lp::{solve_lp, LinearProgram, LpStatus, Sense};

/// A hyperplane `a·x̄ + b = 0`; the two constraint sides are `a·x̄ + b ⋛ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.a.len());
        self.b + self.a.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
    }

    fn from_affine(form: &AffineForm) -> Self {
        Self { a: form.coeffs.clone(), b: form.constant }
    }
}

/// Where an original constraint row ended up after preprocessing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneRef {
    /// Maps to unique plane `index`; `flipped` when the stored plane is the
    /// negated original, so the region bit must be inverted on expansion.
    Kept { index: usize, flipped: bool },
    /// Dropped as trivial; `bit` is the side that holds everywhere.
    Trivial { bit: bool },
}

/// The deduplicated arrangement with the map from original row positions.
#[derive(Debug, Clone)]
pub struct Arrangement {
    /// Unique hyperplanes, normalized to unit Euclidean norm over `(a, b)`
    /// with a sign canonicalization.
    pub planes: Vec<Hyperplane>,
    /// One entry per original row.
    pub map: Vec<PlaneRef>,
}

impl Arrangement {
    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn from_affine_forms(forms: &[AffineForm], dedup_tau: f64, zero_tau: f64) -> Self {
        let rows: Vec<Hyperplane> = forms.iter().map(Hyperplane::from_affine).collect();
        preprocess(&rows, dedup_tau, zero_tau)
    }
}

/// A region label: one bit per unique hyperplane, 1 ⇔ `a·x̄ + b ≤ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector {
    pub bits: Vec<bool>,
}

impl SignVector {
    pub fn flip(&self, h: usize) -> SignVector {
        let mut bits = self.bits.clone();
        bits[h] = !bits[h];
        SignVector { bits }
    }

    /// Expands to the original row positions, applying orientation flips and
    /// filling trivial rows with their constant side.
    pub fn expand(&self, arrangement: &Arrangement) -> Vec<bool> {
        arrangement
            .map
            .iter()
            .map(|r| match *r {
                PlaneRef::Kept { index, flipped } => self.bits[index] ^ flipped,
                PlaneRef::Trivial { bit } => bit,
            })
            .collect()
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Normalizes `(a, b)` to unit norm and canonical sign (largest-magnitude
/// coefficient positive). Returns the plane and whether the sign was flipped.
fn canonicalize(a: &[f64], b: f64) -> (Hyperplane, bool) {
    let norm = (a.iter().map(|v| v * v).sum::<f64>() + b * b).sqrt();
    let mut best = b.abs();
    let mut lead_val = b;
    for &v in a {
        if v.abs() > best {
            best = v.abs();
            lead_val = v;
        }
    }
    let flip = lead_val < 0.0;
    let s = if flip { -1.0 } else { 1.0 } / norm;
    (Hyperplane { a: a.iter().map(|v| v * s).collect(), b: b * s }, flip)
}

/// Proportionality test on normalized extended rows: all pairwise cross
/// products below `tau`.
fn proportional(h1: &Hyperplane, h2: &Hyperplane, tau: f64) -> bool {
    let n = h1.a.len();
    let get = |h: &Hyperplane, i: usize| if i < n { h.a[i] } else { h.b };
    for l in 0..=n {
        for m in (l + 1)..=n {
            let cross = get(h1, l) * get(h2, m) - get(h2, l) * get(h1, m);
            if cross.abs() > tau {
                return false;
            }
        }
    }
    true
}

/// Removes all-zero rows and merges duplicates (proportionality over the
/// extended `(a, b)` vectors, sign-insensitive). The map records each
/// original row's unique index and orientation, or its constant side when
/// dropped.
pub fn preprocess(rows: &[Hyperplane], dedup_tau: f64, zero_tau: f64) -> Arrangement {
    let mut planes: Vec<Hyperplane> = Vec::new();
    let mut map: Vec<PlaneRef> = Vec::with_capacity(rows.len());
    for row in rows {
        if row.a.iter().all(|v| v.abs() <= zero_tau) {
            // Not a hyperplane; the constraint side is decided by the offset.
            map.push(PlaneRef::Trivial { bit: row.b <= 0.0 });
            continue;
        }
        let (canon, flipped) = canonicalize(&row.a, row.b);
        let existing = planes.iter().position(|p| proportional(p, &canon, dedup_tau));
        match existing {
            Some(index) => map.push(PlaneRef::Kept { index, flipped }),
            None => {
                planes.push(canon);
                map.push(PlaneRef::Kept { index: planes.len() - 1, flipped });
            }
        }
    }
    Arrangement { planes, map }
}

/// An interior point of a sign region together with its slack.
#[derive(Debug, Clone)]
pub struct InteriorPoint {
    pub x: Vec<f64>,
    pub slack: f64,
}

/// Finds the deepest interior point of the region `signs` by LP:
/// maximize `z` subject to the signed plane rows at distance `z` and the box
/// rows `±x_l + z ≤ box_bound`. `None` when the LP is infeasible.
pub fn interior_point(
    signs: &SignVector,
    planes: &[Hyperplane],
    box_bound: f64,
) -> Option<InteriorPoint> {
    debug_assert_eq!(signs.bits.len(), planes.len());
    let dim = planes.first().map_or(0, |p| p.a.len());
    if dim == 0 {
        return Some(InteriorPoint { x: Vec::new(), slack: box_bound });
    }
    let mut lp = LinearProgram::new(dim + 1); // x then z
    lp.objective[dim] = -1.0; // maximize z
    lp.bounds[dim] = (0.0, f64::INFINITY);
    for (h, plane) in planes.iter().enumerate() {
        let mut row = vec![0.0; dim + 1];
        row[dim] = 1.0;
        if signs.bits[h] {
            // a·x + b ≤ −z
            row[..dim].copy_from_slice(&plane.a);
            lp.add_row(row, Sense::Le, -plane.b);
        } else {
            // a·x + b ≥ z
            for (c, a) in row.iter_mut().zip(&plane.a) {
                *c = -a;
            }
            row[dim] = 1.0;
            lp.add_row(row, Sense::Le, plane.b);
        }
    }
    for l in 0..dim {
        let mut row = vec![0.0; dim + 1];
        row[l] = 1.0;
        row[dim] = 1.0;
        lp.add_row(row, Sense::Le, box_bound);
        let mut row = vec![0.0; dim + 1];
        row[l] = -1.0;
        row[dim] = 1.0;
        lp.add_row(row, Sense::Le, box_bound);
    }
    let res = solve_lp(&lp).ok()?;
    if res.status != LpStatus::Optimal {
        return None;
    }
    let slack = res.point[dim];
    Some(InteriorPoint { x: res.point[..dim].to_vec(), slack })
}

fn region_nonempty(
    signs: &SignVector,
    planes: &[Hyperplane],
    box_bound: f64,
    interior_tau: f64,
) -> Option<InteriorPoint> {
    interior_point(signs, planes, box_bound).filter(|ip| ip.slack > interior_tau)
}

/// Sign vector of a concrete point, `None` if any plane is within `tau`.
fn strict_signs_at(planes: &[Hyperplane], x: &[f64], tau: f64) -> Option<SignVector> {
    let mut bits = Vec::with_capacity(planes.len());
    for p in planes {
        let v = p.eval(x);
        if v.abs() <= tau {
            return None;
        }
        bits.push(v < 0.0);
    }
    Some(SignVector { bits })
}

/// Finds one nonempty region by perturbing `center` along random directions
/// until every plane shows a strict sign, then certifies it with
/// [`interior_point`]. Fails after 100 directions.
pub fn find_root_region(
    planes: &[Hyperplane],
    center: &[f64],
    box_bound: f64,
    interior_tau: f64,
    seed: u64,
) -> Result<SignVector> {
    if planes.is_empty() {
        return Ok(SignVector { bits: Vec::new() });
    }
    let dim = planes[0].a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        // Random direction, rejected if degenerate.
        let dir: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-9 {
            continue;
        }
        for delta_exp in -6..0 {
            let delta = 10f64.powi(delta_exp) * box_bound.max(1.0);
            let point: Vec<f64> =
                center.iter().zip(&dir).map(|(c, d)| c + delta * d / norm).collect();
            let Some(signs) = strict_signs_at(planes, &point, interior_tau) else {
                continue;
            };
            if region_nonempty(&signs, planes, box_bound, interior_tau).is_some() {
                return Ok(signs);
            }
        }
    }
    Err(Error::DegenerateArrangement(
        "no strict sign vector found after 100 perturbation directions".into(),
    ))
}

/// Indices of the region's strict hyperplanes: those whose single-bit flip
/// yields another nonempty region.
pub fn strict_hyperplanes(
    region: &SignVector,
    planes: &[Hyperplane],
    box_bound: f64,
    interior_tau: f64,
) -> Vec<usize> {
    (0..planes.len())
        .filter(|&h| {
            region_nonempty(&region.flip(h), planes, box_bound, interior_tau).is_some()
        })
        .collect()
}

/// Reflects `point` across plane `h`; a cheap candidate witness for the
/// flipped region, checked against every plane before use.
fn reflected_witness(
    candidate: &SignVector,
    planes: &[Hyperplane],
    h: usize,
    point: &[f64],
    box_bound: f64,
    interior_tau: f64,
) -> Option<Vec<f64>> {
    let plane = &planes[h];
    let a_norm_sq: f64 = plane.a.iter().map(|v| v * v).sum();
    if a_norm_sq <= 0.0 {
        return None;
    }
    let step = 2.0 * plane.eval(point) / a_norm_sq;
    let reflected: Vec<f64> = point.iter().zip(&plane.a).map(|(x, a)| x - step * a).collect();
    for (bit, p) in candidate.bits.iter().zip(planes) {
        let v = p.eval(&reflected);
        let ok = if *bit { v < -interior_tau } else { v > interior_tau };
        if !ok {
            return None;
        }
    }
    if reflected.iter().any(|x| x.abs() >= box_bound - interior_tau) {
        return None;
    }
    Some(reflected)
}

/// Enumerates every nonempty region of the arrangement as sorted sign
/// vectors. Frontier search from a root region: pop a region, flip each
/// strict hyperplane to reach its neighbors, keep going until no new region
/// appears. The region count never exceeds `2^planes`.
pub fn enumerate_regions(
    planes: &[Hyperplane],
    center: &[f64],
    box_bound: f64,
    interior_tau: f64,
    root_seed: u64,
) -> Result<Vec<SignVector>> {
    if planes.is_empty() {
        return Ok(vec![SignVector { bits: Vec::new() }]);
    }
    let root = find_root_region(planes, center, box_bound, interior_tau, root_seed)?;
    let root_point = region_nonempty(&root, planes, box_bound, interior_tau)
        .expect("root region was certified nonempty")
        .x;

    // probed: candidate → interior point if nonempty. Regions own a witness
    // point used to seed the reflection shortcut for their neighbors.
    let mut probed: HashMap<SignVector, Option<Vec<f64>>> = HashMap::new();
    probed.insert(root.clone(), Some(root_point.clone()));
    let mut regions: BTreeSet<SignVector> = BTreeSet::new();
    regions.insert(root.clone());
    let mut frontier: Vec<(SignVector, Vec<f64>)> = vec![(root, root_point)];

    while !frontier.is_empty() {
        // Wave of unseen neighbor candidates; first source wins, in
        // deterministic frontier order.
        let mut wave: BTreeMap<SignVector, (usize, Vec<f64>)> = BTreeMap::new();
        for (region, point) in &frontier {
            for h in 0..planes.len() {
                let cand = region.flip(h);
                if probed.contains_key(&cand) || wave.contains_key(&cand) {
                    continue;
                }
                wave.insert(cand, (h, point.clone()));
            }
        }
        let entries: Vec<(SignVector, usize, Vec<f64>)> =
            wave.into_iter().map(|(c, (h, p))| (c, h, p)).collect();
        let results: Vec<(SignVector, Option<Vec<f64>>)> = entries
            .into_par_iter()
            .map(|(cand, h, source)| {
                let witness =
                    reflected_witness(&cand, planes, h, &source, box_bound, interior_tau)
                        .or_else(|| {
                            region_nonempty(&cand, planes, box_bound, interior_tau)
                                .map(|ip| ip.x)
                        });
                (cand, witness)
            })
            .collect();

        let mut next = Vec::new();
        for (cand, witness) in results {
            if let Some(point) = &witness {
                if regions.insert(cand.clone()) {
                    next.push((cand.clone(), point.clone()));
                }
            }
            probed.insert(cand, witness);
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        frontier = next;
    }
    Ok(regions.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(a: &[f64], b: f64) -> Hyperplane {
        Hyperplane { a: a.to_vec(), b }
    }

    #[test]
    fn preprocess_merges_positive_scaling() {
        let arr = preprocess(&[plane(&[1.0, 2.0], 3.0), plane(&[2.0, 4.0], 6.0)], 1e-9, 1e-12);
        assert_eq!(arr.planes.len(), 1);
        let [PlaneRef::Kept { index: 0, flipped: f0 }, PlaneRef::Kept { index: 0, flipped: f1 }] =
            arr.map[..]
        else {
            panic!("unexpected map {:?}", arr.map);
        };
        assert_eq!(f0, f1); // same orientation
    }

    #[test]
    fn preprocess_merges_negative_scaling_with_flip() {
        let arr = preprocess(&[plane(&[1.0, 0.0], 0.0), plane(&[-2.0, 0.0], 0.0)], 1e-9, 1e-12);
        assert_eq!(arr.planes.len(), 1);
        let [PlaneRef::Kept { flipped: f0, .. }, PlaneRef::Kept { flipped: f1, .. }] = arr.map[..]
        else {
            panic!("unexpected map {:?}", arr.map);
        };
        assert_ne!(f0, f1);
    }

    #[test]
    fn preprocess_drops_zero_rows() {
        let arr = preprocess(&[plane(&[0.0, 0.0], -1e-15), plane(&[1.0, 0.0], 0.0)], 1e-9, 1e-12);
        assert_eq!(arr.planes.len(), 1);
        assert!(matches!(arr.map[0], PlaneRef::Trivial { bit: true }));
    }

    #[test]
    fn preprocess_dedups_noisy_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut rows = Vec::new();
        let mut originals = Vec::new();
        for _ in 0..40 {
            let a: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let b = rng.random::<f64>() - 0.5;
            originals.push(plane(&a, b));
            rows.push(plane(&a, b));
        }
        // Duplicate 10 with multiplicative noise around a random scale.
        for i in 0..10 {
            let scale = if i % 2 == 0 { 1.5 } else { -0.7 };
            let src = &originals[i * 3];
            let noisy: Vec<f64> = src.a.iter().map(|v| v * scale * (1.0 + 1e-12)).collect();
            rows.push(plane(&noisy, src.b * scale * (1.0 + 1e-12)));
        }
        let arr = preprocess(&rows, 1e-9, 1e-12);
        assert_eq!(arr.planes.len(), 40);
    }

    #[test]
    fn interior_point_hand_lp() {
        // One plane x = 0, sign x ≥ 0, box 1: max z s.t. z ≤ x, z ≤ 1 − x,
        // z ≤ 1 + x gives z* = 0.5 at x = 0.5.
        let planes = vec![plane(&[1.0], 0.0)];
        let ip = interior_point(&SignVector { bits: vec![false] }, &planes, 1.0).unwrap();
        assert!((ip.slack - 0.5).abs() <= 1e-7);
        assert!((ip.x[0] - 0.5).abs() <= 1e-7);
    }

    #[test]
    fn interior_point_contradictory_near_duplicates() {
        let planes = vec![plane(&[1.0, 0.0], 0.0), plane(&[1.0 + 1e-13, 0.0], 0.0)];
        let signs = SignVector { bits: vec![true, false] };
        assert!(region_nonempty(&signs, &planes, 1.0, 1e-8).is_none());
    }

    #[test]
    fn root_region_single_plane() {
        let planes = vec![plane(&[1.0, 0.0], 0.0)];
        let root = find_root_region(&planes, &[0.0, 0.0], 1.0, 1e-8, 0).unwrap();
        assert_eq!(root.bits.len(), 1);
        let ip = region_nonempty(&root, &planes, 1.0, 1e-8).unwrap();
        assert!(ip.slack > 1e-8);
    }

    #[test]
    fn root_region_matches_point_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let planes: Vec<Hyperplane> = (0..4)
            .map(|_| {
                let a: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                canonicalize(&a, 0.0).0
            })
            .collect();
        let root = find_root_region(&planes, &[0.0; 3], 1.0, 1e-8, 7).unwrap();
        // Interior point of that region reproduces the same sign vector.
        let ip = region_nonempty(&root, &planes, 1.0, 1e-8).unwrap();
        let direct = strict_signs_at(&planes, &ip.x, 1e-10).unwrap();
        assert_eq!(root, direct);
    }

    #[test]
    fn one_plane_two_regions() {
        let planes = vec![plane(&[1.0, 0.5], 0.0)];
        let regions = enumerate_regions(&planes, &[0.0, 0.0], 1.0, 1e-8, 0).unwrap();
        assert_eq!(regions.len(), 2);
    }

    #[test]
    fn three_concurrent_lines_six_sectors() {
        let planes = vec![
            plane(&[1.0, 0.0], 0.0),
            plane(&[0.0, 1.0], 0.0),
            plane(&[1.0, -1.0], 0.0),
        ];
        let regions = enumerate_regions(&planes, &[0.0, 0.0], 1.0, 1e-8, 0).unwrap();
        assert_eq!(regions.len(), 6);
    }

    #[test]
    fn strict_hyperplanes_in_planar_sector() {
        let planes = vec![
            plane(&[1.0, 0.0], 0.0),
            plane(&[0.0, 1.0], 0.0),
            plane(&[1.0, -1.0], 0.0),
        ];
        let regions = enumerate_regions(&planes, &[0.0, 0.0], 1.0, 1e-8, 0).unwrap();
        for region in &regions {
            let strict = strict_hyperplanes(region, &planes, 1.0, 1e-8);
            assert_eq!(strict.len(), 2, "sector {region:?} bounded by {strict:?}");
        }
    }

    #[test]
    fn strict_hyperplane_single_plane_both_sides() {
        let planes = vec![plane(&[1.0], 0.0)];
        for bits in [vec![true], vec![false]] {
            let strict = strict_hyperplanes(&SignVector { bits }, &planes, 1.0, 1e-8);
            assert_eq!(strict, vec![0]);
        }
    }

    #[test]
    fn empty_arrangement_single_trivial_region() {
        let regions = enumerate_regions(&[], &[], 1.0, 1e-8, 0).unwrap();
        assert_eq!(regions.len(), 1);
        assert!(regions[0].bits.is_empty());
    }

    #[test]
    fn enumeration_independent_of_root_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let planes: Vec<Hyperplane> = (0..5)
            .map(|_| {
                let a: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                canonicalize(&a, 0.0).0
            })
            .collect();
        let baseline = enumerate_regions(&planes, &[0.0; 3], 1.0, 1e-8, 0).unwrap();
        for seed in 1..=10 {
            let other = enumerate_regions(&planes, &[0.0; 3], 1.0, 1e-8, seed).unwrap();
            assert_eq!(baseline, other);
        }
    }

    /// Sampling oracle: distinct strict sign vectors over many box samples.
    fn sampled_regions(
        planes: &[Hyperplane],
        box_bound: f64,
        samples: usize,
        seed: u64,
    ) -> BTreeSet<SignVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = planes[0].a.len();
        let mut out = BTreeSet::new();
        for _ in 0..samples {
            let x: Vec<f64> =
                (0..dim).map(|_| (rng.random::<f64>() * 2.0 - 1.0) * box_bound).collect();
            if let Some(sv) = strict_signs_at(planes, &x, 1e-7) {
                out.insert(sv);
            }
        }
        out
    }

    /// Random central arrangement whose regions all admit an inscribed slack
    /// of at least `min_slack`, so a 100k-point oracle resolves every region.
    /// Deterministic: attempts consume the seeded stream until one fits.
    pub(super) fn fat_central_arrangement(
        rng: &mut ChaCha8Rng,
        dim: usize,
        count: usize,
        min_slack: f64,
    ) -> Vec<Hyperplane> {
        'attempt: loop {
            let mut normals: Vec<Vec<f64>> = Vec::new();
            while normals.len() < count {
                let a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 1e-3 {
                    continue;
                }
                let unit: Vec<f64> = a.iter().map(|v| v / norm).collect();
                let close = normals.iter().any(|n| {
                    let dot: f64 = n.iter().zip(&unit).map(|(p, q)| p * q).sum();
                    dot.abs() > 0.9
                });
                if !close {
                    normals.push(unit);
                }
            }
            let planes: Vec<Hyperplane> =
                normals.into_iter().map(|a| canonicalize(&a, 0.0).0).collect();
            let Ok(regions) = enumerate_regions(&planes, &vec![0.0; dim], 1.0, 1e-8, 0) else {
                continue 'attempt;
            };
            for region in &regions {
                let slack = interior_point(region, &planes, 1.0).map_or(0.0, |ip| ip.slack);
                if slack < min_slack {
                    continue 'attempt;
                }
            }
            return planes;
        }
    }

    #[test]
    fn enumeration_matches_sampling_oracle_on_random_central_arrangements() {
        let mut rng = ChaCha8Rng::seed_from_u64(2025);
        for fixture in 0..20usize {
            let dim = 2 + (fixture % 3); // up to 4
            let count = (2 + (fixture % 7)).min(2 * dim); // up to 8
            let planes = fat_central_arrangement(&mut rng, dim, count, 0.15);
            let enumerated = enumerate_regions(&planes, &vec![0.0; dim], 1.0, 1e-8, 0).unwrap();
            let sampled = sampled_regions(&planes, 1.0, 100_000, 99 + fixture as u64);
            let enumerated_set: BTreeSet<SignVector> = enumerated.iter().cloned().collect();
            assert_eq!(
                enumerated_set, sampled,
                "fixture {fixture}: enumeration and sampling disagree"
            );
            assert!(enumerated.len() <= 1usize << count);
        }
    }

    #[test]
    fn expansion_respects_orientation() {
        let rows = vec![plane(&[1.0, 0.0], 0.0), plane(&[-1.0, 0.0], 0.0), plane(&[0.0, 0.0], 0.0)];
        let arr = preprocess(&rows, 1e-9, 1e-12);
        assert_eq!(arr.planes.len(), 1);
        let sv = SignVector { bits: vec![true] };
        let expanded = sv.expand(&arr);
        assert_eq!(expanded[0], !expanded[1]); // opposite orientations
        assert!(expanded[2]); // trivial row with b = 0 ⇒ ≤ side
    }
}
