//! Hexagonal BS layout, tier neighborhoods and interference coordination.
//!
//! BSs sit on a hexagonal lattice in axial coordinates. The cell radius is
//! the hexagon circumradius, so neighboring sites are `sqrt(3) * radius`
//! apart. Index 0 is always the central BS; rings follow outward.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use crate::channel::{distance3, Point3};
use crate::error::{Error, Result};

/// Attempts made by [`sample_occupancy`] before giving up.
pub const OCCUPANCY_RETRIES: usize = 1000;

const AXIAL_DIRECTIONS: [(i32, i32); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// Axial hex-lattice coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HexCoord {
    pub aq: i32,
    pub ar: i32,
}

impl HexCoord {
    pub const ORIGIN: HexCoord = HexCoord { aq: 0, ar: 0 };

    pub fn new(aq: i32, ar: i32) -> Self {
        Self { aq, ar }
    }

    pub fn distance(self, other: HexCoord) -> u32 {
        let dq = self.aq - other.aq;
        let dr = self.ar - other.ar;
        (dq.unsigned_abs() + dr.unsigned_abs() + (dq + dr).unsigned_abs()) / 2
    }

    fn offset(self, (dq, dr): (i32, i32), k: i32) -> Self {
        Self::new(self.aq + dq * k, self.ar + dr * k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    bs_positions: Vec<Point3>,
    hex_coords: Vec<HexCoord>,
    cell_radius: f64,
    bs_height: f64,
    tiers: u32,
}

impl CellLayout {
    pub fn len(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bs_positions.is_empty()
    }

    pub fn positions(&self) -> &[Point3] {
        &self.bs_positions
    }

    pub fn position(&self, index: usize) -> Result<Point3> {
        self.check(index)?;
        Ok(self.bs_positions[index])
    }

    pub fn hex_coords(&self) -> &[HexCoord] {
        &self.hex_coords
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius
    }

    pub fn bs_height(&self) -> f64 {
        self.bs_height
    }

    pub fn tiers(&self) -> u32 {
        self.tiers
    }

    /// Distance between hex-adjacent sites.
    pub fn inter_site_distance(&self) -> f64 {
        Float::sqrt(3.0f64) * self.cell_radius
    }

    fn check(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::Index { index, len: self.len() })
        }
    }

    /// Whether a horizontal point lies in the hexagonal cell of the central
    /// BS (boundary included).
    pub fn in_central_cell(&self, x: f64, y: f64) -> bool {
        let half_isd = self.inter_site_distance() / 2.0;
        let s = Float::sqrt(3.0f64) / 2.0;
        // Voronoi cell: projections onto the six neighbor directions.
        [(1.0, 0.0), (0.5, s), (-0.5, s)]
            .iter()
            .all(|(ux, uy)| (x * ux + y * uy).abs() <= half_isd * (1.0 + 1e-12))
    }
}

pub fn build_hex_layout(tiers: u32, cell_radius: f64, bs_height: f64) -> Result<CellLayout> {
    if cell_radius <= 0.0 || !cell_radius.is_finite() {
        return Err(Error::InvalidParameter("cell radius must be positive"));
    }
    let isd = Float::sqrt(3.0f64) * cell_radius;
    let mut hex_coords = vec![HexCoord::ORIGIN];
    for k in 1..=tiers as i32 {
        let mut h = HexCoord::ORIGIN.offset(AXIAL_DIRECTIONS[4], k);
        for dir in AXIAL_DIRECTIONS {
            for _ in 0..k {
                hex_coords.push(h);
                h = h.offset(dir, 1);
            }
        }
    }
    let bs_positions = hex_coords
        .iter()
        .map(|h| {
            let (q, r) = (h.aq as f64, h.ar as f64);
            [isd * (q + r / 2.0), isd * Float::sqrt(3.0f64) / 2.0 * r, bs_height]
        })
        .collect();
    Ok(CellLayout {
        bs_positions,
        hex_coords,
        cell_radius,
        bs_height,
        tiers,
    })
}

/// BSs within `b` tiers of BS `a` (including `a`), ascending index order.
pub fn tier_set(layout: &CellLayout, a: usize, b: u32) -> Result<Vec<usize>> {
    layout.check(a)?;
    let center = layout.hex_coords[a];
    Ok(layout
        .hex_coords
        .iter()
        .enumerate()
        .filter(|(_, h)| h.distance(center) <= b)
        .map(|(i, _)| i)
        .collect())
}

/// Index of the BS closest to `uav`, lowest index on ties.
pub fn nearest_bs(layout: &CellLayout, uav: Point3) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in layout.bs_positions.iter().enumerate() {
        let d = distance3(*p, uav);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NoCandidates)
}

/// `T_c(q)` minus the `e`-tier neighborhoods of every occupied BS.
pub fn available_bs(
    layout: &CellLayout,
    occupied: &[usize],
    nearest: usize,
    tiers: u32,
    icic_tiers: u32,
) -> Result<Vec<usize>> {
    for &i in occupied {
        layout.check(i)?;
    }
    let hex = &layout.hex_coords;
    Ok(tier_set(layout, nearest, tiers)?
        .into_iter()
        .filter(|&k| occupied.iter().all(|&i| hex[i].distance(hex[k]) > icic_tiers))
        .collect())
}

/// Result of drawing co-channel occupancy for one scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyDraw {
    /// Occupied BSs, ascending.
    pub occupied: Vec<usize>,
    /// Available BSs, ascending.
    pub available: Vec<usize>,
    pub nearest: usize,
}

/// Draws `occupied_count` occupied BSs whose hex separation exceeds
/// `icic_tiers`, by sequential uniform picks among the BSs not yet excluded.
/// An attempt is rejected if the picks run out or leave no available BS.
pub fn sample_occupancy<R: Rng + ?Sized>(
    layout: &CellLayout,
    occupied_count: usize,
    icic_tiers: u32,
    uav: Point3,
    rng: &mut R,
) -> Result<OccupancyDraw> {
    let nearest = nearest_bs(layout, uav)?;
    let m = layout.len();
    let hex = &layout.hex_coords;
    for _ in 0..OCCUPANCY_RETRIES {
        let mut allowed = vec![true; m];
        let mut occupied = Vec::with_capacity(occupied_count);
        let mut pool = Vec::with_capacity(m);
        for _ in 0..occupied_count {
            pool.clear();
            pool.extend((0..m).filter(|&i| allowed[i]));
            if pool.is_empty() {
                break;
            }
            let pick = pool[rng.random_range(0..pool.len())];
            occupied.push(pick);
            for (i, flag) in allowed.iter_mut().enumerate() {
                if hex[i].distance(hex[pick]) <= icic_tiers {
                    *flag = false;
                }
            }
        }
        if occupied.len() < occupied_count {
            continue;
        }
        occupied.sort_unstable();
        let available = available_bs(layout, &occupied, nearest, layout.tiers, icic_tiers)?;
        if !available.is_empty() {
            return Ok(OccupancyDraw {
                occupied,
                available,
                nearest,
            });
        }
    }
    Err(Error::Sampling {
        attempts: OCCUPANCY_RETRIES,
        occupied: occupied_count,
        icic_tiers,
        bs_count: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::{BTreeSet, VecDeque};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layout4() -> CellLayout {
        build_hex_layout(4, 100.0, 30.0).unwrap()
    }

    /// Tier set by breadth-first expansion over geometric adjacency.
    fn bfs_tier_set(layout: &CellLayout, a: usize, b: u32) -> BTreeSet<usize> {
        let isd = layout.inter_site_distance();
        let pos = layout.positions();
        let adjacent = |i: usize, j: usize| {
            let d = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
            i != j && (d - isd).abs() < 1e-6
        };
        let mut depth = vec![u32::MAX; layout.len()];
        depth[a] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(i) = queue.pop_front() {
            for j in 0..layout.len() {
                if adjacent(i, j) && depth[j] == u32::MAX {
                    depth[j] = depth[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        (0..layout.len()).filter(|&i| depth[i] <= b).collect()
    }

    #[test]
    fn bs_counts() {
        assert_eq!(layout4().len(), 61);
        let single = build_hex_layout(0, 100.0, 30.0).unwrap();
        assert_eq!(single.positions(), &[[0.0, 0.0, 30.0]]);
        for q in 0..8 {
            let l = build_hex_layout(q, 50.0, 10.0).unwrap();
            assert_eq!(l.len(), (1 + 3 * q * (q + 1)) as usize);
        }
    }

    #[test]
    fn first_ring_geometry() {
        let l = build_hex_layout(1, 100.0, 30.0).unwrap();
        assert_eq!(l.len(), 7);
        for p in &l.positions()[1..] {
            let d = p[0].hypot(p[1]);
            assert!((d - 173.20508075688772).abs() < 1e-9);
            assert_eq!(p[2], 30.0);
        }
    }

    #[test]
    fn adjacent_sites_are_one_isd_apart() {
        let l = layout4();
        let isd = l.inter_site_distance();
        for i in 0..l.len() {
            for j in 0..l.len() {
                if l.hex_coords()[i].distance(l.hex_coords()[j]) == 1 {
                    let (a, b) = (l.positions()[i], l.positions()[j]);
                    assert!(((a[0] - b[0]).hypot(a[1] - b[1]) - isd).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn hex_distance_is_a_metric() {
        let l = layout4();
        let h = l.hex_coords();
        for a in h {
            assert_eq!(a.distance(*a), 0);
            for b in h {
                assert_eq!(a.distance(*b), b.distance(*a));
                for c in h.iter().step_by(7) {
                    assert!(a.distance(*c) <= a.distance(*b) + b.distance(*c));
                }
            }
        }
    }

    #[test]
    fn tier_sets() {
        let l = layout4();
        assert_eq!(tier_set(&l, 17, 0).unwrap(), vec![17]);
        assert_eq!(tier_set(&l, 0, 1).unwrap().len(), 7);
        // outermost corner of the disk
        let corner = l.hex_coords().iter().position(|h| *h == HexCoord::new(4, 0)).unwrap();
        assert_eq!(tier_set(&l, corner, 1).unwrap().len(), 4);
        assert_eq!(tier_set(&l, 61, 1), Err(Error::Index { index: 61, len: 61 }));
    }

    #[test]
    fn tier_sets_match_bfs() {
        let l = layout4();
        for a in 0..l.len() {
            for b in 0..=4 {
                let got: BTreeSet<usize> = tier_set(&l, a, b).unwrap().into_iter().collect();
                assert_eq!(got, bfs_tier_set(&l, a, b), "a = {a}, b = {b}");
            }
        }
    }

    #[test]
    fn nearest_bs_cases() {
        let l = layout4();
        assert_eq!(nearest_bs(&l, [0.0, 0.0, 100.0]).unwrap(), 0);
        for i in [8, 12, 18] {
            let p = l.positions()[i];
            assert_eq!(nearest_bs(&l, [p[0], p[1], 100.0]).unwrap(), i);
        }
        // equidistant between BS 0 and BS i: lower index wins
        let p = l.positions()[3];
        let mid = [p[0] / 2.0, p[1] / 2.0, 100.0];
        let d0 = distance3(l.positions()[0], mid);
        let d3 = distance3(p, mid);
        assert!((d0 - d3).abs() < 1e-9);
        assert_eq!(nearest_bs(&l, mid).unwrap(), 0);
    }

    #[test]
    fn available_sets() {
        let l = layout4();
        assert_eq!(available_bs(&l, &[], 0, 4, 1).unwrap().len(), 61);
        let av = available_bs(&l, &[0], 0, 4, 1).unwrap();
        assert_eq!(av.len(), 54);
        assert!(!av.contains(&0));
    }

    #[test]
    fn available_matches_brute_force_filter() {
        let l = layout4();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let draw = sample_occupancy(&l, 12, 1, [0.0, 0.0, 100.0], &mut rng).unwrap();
            let mut expected = Vec::new();
            for k in 0..61 {
                let mut prohibited = false;
                for &i in &draw.occupied {
                    if tier_set(&l, i, 1).unwrap().contains(&k) {
                        prohibited = true;
                    }
                }
                if !prohibited {
                    expected.push(k);
                }
            }
            assert_eq!(draw.available, expected);
        }
    }

    #[test]
    fn occupancy_edge_cases() {
        let l = layout4();
        let uav = [3.0, -4.0, 100.0];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let none = sample_occupancy(&l, 0, 1, uav, &mut rng).unwrap();
        assert!(none.occupied.is_empty());
        assert_eq!(none.available, tier_set(&l, 0, 4).unwrap());

        let one = sample_occupancy(&l, 1, 1, uav, &mut rng).unwrap();
        assert_eq!(one.occupied.len(), 1);
        assert_eq!(one.available, available_bs(&l, &one.occupied, 0, 4, 1).unwrap());

        let err = sample_occupancy(&l, 70, 1, uav, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Sampling { occupied: 70, .. }));
    }

    #[test]
    fn ten_occupied_feasible_over_200_seeds() {
        let l = layout4();
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = sample_occupancy(&l, 10, 1, [0.0, 0.0, 100.0], &mut rng).unwrap();
            assert_eq!(d.occupied.len(), 10);
            assert!(!d.available.is_empty());
        }
    }

    #[test]
    fn central_cell_membership() {
        let l = layout4();
        assert!(l.in_central_cell(0.0, 0.0));
        assert!(l.in_central_cell(0.0, 99.999));
        assert!(!l.in_central_cell(0.0, 100.001));
        assert!(l.in_central_cell(86.6, 0.0));
        assert!(!l.in_central_cell(86.61, 0.0));
    }

    proptest! {
        #[test]
        fn occupancy_invariants(seed in any::<u64>(), j in 0usize..=12) {
            let l = layout4();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draw = sample_occupancy(&l, j, 1, [10.0, 20.0, 100.0], &mut rng).unwrap();
            let h = l.hex_coords();
            prop_assert_eq!(draw.occupied.len(), j);
            for (x, &a) in draw.occupied.iter().enumerate() {
                for &b in &draw.occupied[x + 1..] {
                    prop_assert!(h[a].distance(h[b]) > 1);
                }
                prop_assert!(!draw.available.contains(&a));
            }
            for &k in &draw.available {
                for &i in &draw.occupied {
                    prop_assert!(h[k].distance(h[i]) > 1);
                }
            }
            let mut again = ChaCha8Rng::seed_from_u64(seed);
            prop_assert_eq!(sample_occupancy(&l, j, 1, [10.0, 20.0, 100.0], &mut again).unwrap(), draw);
        }
    }
}
