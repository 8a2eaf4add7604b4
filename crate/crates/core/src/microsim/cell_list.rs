//! Cell-list spatial index on the torus.
//!
//! Bucket side is at least the interaction cutoff, so a point's neighbors
//! within the cutoff always sit in the 3^d surrounding buckets. Keeps the
//! acceptance evaluation O(neighbors) as the population grows.

use crate::grid::{Point, TorusDomain};
use crate::potential::Potential;

pub struct CellList {
    dom: TorusDomain,
    cells_per_side: usize,
    cell_side: f64,
    buckets: Vec<Vec<u32>>,
    points: Vec<Point>,
}

impl CellList {
    pub fn new(dom: TorusDomain, cutoff: f64) -> Self {
        let cells_per_side = if cutoff > 0.0 {
            ((dom.side() / cutoff).floor() as usize).max(1)
        } else {
            1
        };
        let bucket_count = cells_per_side.pow(dom.dim() as u32);
        Self {
            dom,
            cells_per_side,
            cell_side: dom.side() / cells_per_side as f64,
            buckets: vec![Vec::new(); bucket_count],
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn bucket_of(&self, x: Point) -> usize {
        let w = self.dom.wrap(x);
        let n = self.cells_per_side;
        let ix = ((w[0] / self.cell_side) as usize).min(n - 1);
        match self.dom.dim() {
            1 => ix,
            _ => {
                let iy = ((w[1] / self.cell_side) as usize).min(n - 1);
                ix + n * iy
            }
        }
    }

    pub fn insert(&mut self, x: Point) {
        let b = self.bucket_of(x);
        self.buckets[b].push(self.points.len() as u32);
        self.points.push(x);
    }

    /// `sum_y phi(x - y)` over the stored points, torus distances.
    pub fn potential_sum(&self, pot: &Potential, x: Point) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let n = self.cells_per_side;
        if n <= 3 {
            // neighborhood covers everything; skip the bucket walk
            return self
                .points
                .iter()
                .map(|y| pot.eval_radial(self.dom.distance(x, *y)))
                .sum();
        }
        let w = self.dom.wrap(x);
        let ix = ((w[0] / self.cell_side) as usize).min(n - 1);
        let xs = [(ix + n - 1) % n, ix, (ix + 1) % n];
        let mut acc = 0.0;
        match self.dom.dim() {
            1 => {
                for &bx in &xs {
                    for &pi in &self.buckets[bx] {
                        acc += pot.eval_radial(self.dom.distance(x, self.points[pi as usize]));
                    }
                }
            }
            _ => {
                let iy = ((w[1] / self.cell_side) as usize).min(n - 1);
                let ys = [(iy + n - 1) % n, iy, (iy + 1) % n];
                for &by in &ys {
                    for &bx in &xs {
                        for &pi in &self.buckets[bx + n * by] {
                            acc += pot.eval_radial(self.dom.distance(x, self.points[pi as usize]));
                        }
                    }
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute_force(dom: &TorusDomain, pot: &Potential, pts: &[Point], x: Point) -> f64 {
        pts.iter()
            .map(|y| pot.eval_radial(dom.distance(x, *y)))
            .sum()
    }

    #[test]
    fn matches_brute_force_1d() {
        let dom = TorusDomain::new(1, 10.0, 8).unwrap();
        let pot = Potential::gaussian(1.0, 0.4, 1.5).unwrap();
        let mut list = CellList::new(dom, pot.range_cutoff());
        let pts: Vec<Point> = (0..200)
            .map(|k| [((k * 37) % 1000) as f64 * 0.01, 0.0])
            .collect();
        for p in &pts {
            list.insert(*p);
        }
        for q in [[0.0, 0.0], [5.01, 0.0], [9.99, 0.0], [2.5, 0.0]] {
            assert_relative_eq!(
                list.potential_sum(&pot, q),
                brute_force(&dom, &pot, &pts, q),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn matches_brute_force_2d_including_wrap() {
        let dom = TorusDomain::new(2, 6.0, 8).unwrap();
        let pot = Potential::top_hat(0.7, 1.1).unwrap();
        let mut list = CellList::new(dom, pot.range_cutoff());
        let pts: Vec<Point> = (0..300)
            .map(|k| {
                let a = ((k * 131) % 600) as f64 * 0.01;
                let b = ((k * 17 + 3) % 600) as f64 * 0.01;
                [a, b]
            })
            .collect();
        for p in &pts {
            list.insert(*p);
        }
        for q in [[0.05, 5.95], [3.0, 3.0], [5.9, 0.1]] {
            assert_relative_eq!(
                list.potential_sum(&pot, q),
                brute_force(&dom, &pot, &pts, q),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn coarse_bucket_grid_degenerates_to_full_scan() {
        // cutoff close to L forces a single bucket per side
        let dom = TorusDomain::new(1, 4.0, 8).unwrap();
        let pot = Potential::top_hat(1.0, 2.0).unwrap();
        let mut list = CellList::new(dom, pot.range_cutoff());
        for k in 0..50 {
            list.insert([k as f64 * 0.08, 0.0]);
        }
        let q = [1.7, 0.0];
        assert_relative_eq!(
            list.potential_sum(&pot, q),
            brute_force(&dom, &pot, list.points(), q),
            epsilon = 1e-10
        );
    }
}
