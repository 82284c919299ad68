//! Tiled arena: a bordered rectangular mosaic of coloured cells.
//!
//! Interior cells are coloured red (supporting the better option) or blue
//! with an exact count quota, uniformly shuffled per seed. The border ring
//! is uncoloured; border cells and the interior ring touching them raise a
//! wall flag that robots use for obstacle avoidance.

use super::{SimConfig, SimError};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Colour of one arena cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellColor {
    /// Evidence for the better option (A).
    Red,
    /// Evidence for the other option (B).
    Blue,
    /// Uncoloured boundary cell.
    Border,
}

/// The arena grid. Dimensions count total cells including the border ring,
/// so the interior is `(cols - 2) x (rows - 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub cols: usize,
    pub rows: usize,
    pub cell_size_cm: f64,
    colors: Vec<CellColor>,
    /// Nominal quality signal attached to each cell by colour (used by the
    /// antagonistic estimation mode; zero on border cells).
    quality: Vec<f64>,
    wall: Vec<bool>,
    /// Number of red interior cells (exact quota).
    pub n_red: usize,
}

impl Arena {
    pub fn width_cm(&self) -> f64 {
        self.cols as f64 * self.cell_size_cm
    }

    pub fn height_cm(&self) -> f64 {
        self.rows as f64 * self.cell_size_cm
    }

    pub fn interior_cells(&self) -> usize {
        (self.cols - 2) * (self.rows - 2)
    }

    fn index(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.cols && row < self.rows);
        row * self.cols + col
    }

    /// Grid coordinates of a position, clamped into the grid.
    pub fn cell_at(&self, x: f64, y: f64) -> (usize, usize) {
        let col = ((x / self.cell_size_cm).floor() as i64).clamp(0, self.cols as i64 - 1);
        let row = ((y / self.cell_size_cm).floor() as i64).clamp(0, self.rows as i64 - 1);
        (col as usize, row as usize)
    }

    /// Stable cell identifier for visit deduplication.
    pub fn id_at(&self, x: f64, y: f64) -> usize {
        let (col, row) = self.cell_at(x, y);
        self.index(col, row)
    }

    pub fn n_cells(&self) -> usize {
        self.cols * self.rows
    }

    pub fn color_at(&self, x: f64, y: f64) -> CellColor {
        let (col, row) = self.cell_at(x, y);
        self.colors[self.index(col, row)]
    }

    /// Nominal quality signal of the cell under the position.
    pub fn quality_signal_at(&self, x: f64, y: f64) -> f64 {
        let (col, row) = self.cell_at(x, y);
        self.quality[self.index(col, row)]
    }

    pub fn wall_at(&self, x: f64, y: f64) -> bool {
        let (col, row) = self.cell_at(x, y);
        self.wall[self.index(col, row)]
    }

    /// Colour of the nearest interior cell: identical to `color_at` inside
    /// the interior, and the adjacent interior cell when the position
    /// overlaps the border ring. Self-sourcing uses this so a colour read
    /// never lands on an uncoloured cell.
    pub fn nearest_interior_color(&self, x: f64, y: f64) -> CellColor {
        let (col, row) = self.cell_at(x, y);
        let col = col.clamp(1, self.cols - 2);
        let row = row.clamp(1, self.rows - 2);
        self.colors[self.index(col, row)]
    }

    /// Whether the cell at `(col, row)` lies on the outer border ring.
    pub fn is_border(&self, col: usize, row: usize) -> bool {
        col == 0 || row == 0 || col == self.cols - 1 || row == self.rows - 1
    }
}

/// Builds the mosaic for a config: interior `interior_cols x interior_rows`
/// cells plus a border ring, with exactly
/// `floor(red_fraction * interior + 0.5)` red cells placed uniformly at
/// random.
pub fn build_arena(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Result<Arena, SimError> {
    let interior = cfg.interior_cols * cfg.interior_rows;
    if interior < 4 {
        return Err(SimError::ArenaTooSmall { interior });
    }
    let red_fraction = cfg.red_fraction();
    debug_assert!((0.0..=1.0).contains(&red_fraction));
    let cols = cfg.interior_cols + 2;
    let rows = cfg.interior_rows + 2;

    let n_red = (red_fraction * interior as f64 + 0.5).floor() as usize;
    let mut interior_colors = vec![CellColor::Red; n_red];
    interior_colors.resize(interior, CellColor::Blue);
    interior_colors.shuffle(rng);

    let mut colors = vec![CellColor::Border; cols * rows];
    let mut quality = vec![0.0; cols * rows];
    let mut wall = vec![false; cols * rows];
    let mut it = interior_colors.into_iter();
    for row in 0..rows {
        for col in 0..cols {
            let idx = row * cols + col;
            let border = col == 0 || row == 0 || col == cols - 1 || row == rows - 1;
            let near_border =
                col == 1 || row == 1 || col == cols - 2 || row == rows - 2;
            wall[idx] = border || near_border;
            if !border {
                let c = it.next().expect("interior cell count mismatch");
                colors[idx] = c;
                quality[idx] = match c {
                    CellColor::Red => cfg.params.q_a,
                    CellColor::Blue => cfg.params.q_b,
                    CellColor::Border => unreachable!(),
                };
            }
        }
    }
    debug_assert!(it.next().is_none());

    Ok(Arena {
        cols,
        rows,
        cell_size_cm: cfg.cell_size_cm,
        colors,
        quality,
        wall,
        n_red,
    })
}
