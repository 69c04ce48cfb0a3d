use rand::Rng;

use crate::error::Result;
use crate::levy::{cell_sample_unchecked, LevySeedSpec};
use crate::scalar::Scalar;
use crate::trawl::SliceTable;

/// All centred slice cells `χ_{i,j}` (absolute column `j ≥ i`) and row
/// tails `ζ_{i,n}` of one realisation. Memory is quadratic in `n`; meant
/// for checking the partial-sum decomposition on small grids.
#[derive(Clone, Debug)]
pub struct CellField<T> {
    pub n: usize,
    rows: Vec<Vec<T>>,
    tails: Vec<T>,
    mean: T,
}

impl<T: Scalar> CellField<T> {
    pub fn sample<R: Rng + ?Sized>(seed: &LevySeedSpec<T>, table: &SliceTable<T>, rng: &mut R) -> Result<Self> {
        let mu = seed.mean()?;
        let n = table.n;
        let draw = |area: T, rng: &mut R| cell_sample_unchecked(seed, area, rng) - mu * area;
        let mut rows = Vec::with_capacity(n);
        let mut tails = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<T> = (i..n).map(|j| draw(if i == 0 { table.row0[j] } else { table.offset[j - i] }, rng)).collect();
            rows.push(row);
            tails.push(draw(table.row_tail(i), rng));
        }
        Ok(Self { n, rows, tails, mean: mu * table.leb })
    }

    /// `χ_{i,j}`, `i ≤ j < n`.
    pub fn cell(&self, i: usize, j: usize) -> T {
        self.rows[i][j - i]
    }

    /// `ζ_{i,m} = Σ_{j ≥ m} χ_{i,j}`, including the part beyond the grid.
    pub fn zeta(&self, i: usize, m: usize) -> T {
        let start = m.max(i);
        self.rows[i][start - i..].iter().fold(self.tails[i], |a, &c| a + c)
    }

    /// `X_{kΔ}` rebuilt from the cells.
    pub fn path(&self) -> Vec<T> {
        (0..self.n).map(|k| (0..=k).fold(self.mean, |acc, i| acc + self.rows[i][k - i] + self.zeta(i, k + 1))).collect()
    }
}
