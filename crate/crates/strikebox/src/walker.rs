//! S-box generation by random walks over a byte grid.
//!
//! The bit stream is first materialized as a square grid of bytes. A walk
//! then starts somewhere on the grid and moves one cell at a time in one
//! of eight directions (3 bits of the stream per step), wrapping at the
//! edges. Every cell value not yet collected is appended to the output;
//! once 256 distinct values have been gathered they form a bijective
//! S-box in collection order.

use crate::bits::{BitCursor, BitStream};
use crate::sbox::SBox;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("need at least {needed} bits, got {got}")]
    InsufficientBits { needed: usize, got: usize },
    #[error("direction stream ended after collecting {collected} of 256 values")]
    ExhaustedDirections { collected: usize },
    #[error("step budget {budget} exhausted after collecting {collected} of 256 values")]
    StepBudgetExceeded { budget: usize, collected: usize },
    #[error("start ({row}, {col}) outside a {side}x{side} grid")]
    InvalidStart { row: usize, col: usize, side: usize },
    #[error("totalSbox must be at least 1")]
    InvalidTotal,
}

/// One of the eight walk directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left = 0,
    LeftUp = 1,
    Up = 2,
    RightUp = 3,
    Right = 4,
    RightDown = 5,
    Down = 6,
    LeftDown = 7,
}

impl Direction {
    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Direction::Left,
            1 => Direction::LeftUp,
            2 => Direction::Up,
            3 => Direction::RightUp,
            4 => Direction::Right,
            5 => Direction::RightDown,
            6 => Direction::Down,
            7 => Direction::LeftDown,
            _ => return None,
        })
    }

    pub fn code(&self) -> u8 {
        *self as u8
    }

    /// Row/column deltas; row 0 is the top of the grid.
    pub fn delta(&self) -> (i8, i8) {
        match self {
            Direction::Left => (0, -1),
            Direction::LeftUp => (-1, -1),
            Direction::Up => (-1, 0),
            Direction::RightUp => (-1, 1),
            Direction::Right => (0, 1),
            Direction::RightDown => (1, 1),
            Direction::Down => (1, 0),
            Direction::LeftDown => (1, -1),
        }
    }
}

/// A square grid of byte values built from a bit stream.
#[derive(Debug, Clone)]
pub struct EntropyGrid {
    side: usize,
    cells: Vec<u8>,
}

impl EntropyGrid {
    /// Minimum grid side.
    pub const MIN_SIDE: usize = 16;

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.side + col]
    }

    /// Number of distinct byte values present anywhere in the grid.
    pub fn distinct_values(&self) -> usize {
        let mut seen = [false; 256];
        for &c in &self.cells {
            seen[c as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }
}

/// Builds a grid from the stream: consecutive 8-bit groups become bytes,
/// the side is the floor square root of the byte count, and surplus bytes
/// (plus any trailing partial byte) are discarded.
pub fn build_grid(bits: &BitStream) -> Result<EntropyGrid, WalkError> {
    let needed = EntropyGrid::MIN_SIDE * EntropyGrid::MIN_SIDE * 8;
    if bits.len() < needed {
        return Err(WalkError::InsufficientBits { needed, got: bits.len() });
    }
    let mut bytes = bits.to_bytes_msb();
    let side = bytes.len().isqrt();
    bytes.truncate(side * side);
    Ok(EntropyGrid { side, cells: bytes })
}

/// Record of one walk: where it started, every step taken, and the bytes
/// collected (in order — for a complete walk this is the S-box table).
#[derive(Debug, Clone)]
pub struct WalkTrace {
    pub start: (usize, usize),
    pub steps: Vec<Direction>,
    pub visited_values: Vec<u8>,
}

/// Moves one cell in `dir` with toroidal wraparound.
pub fn step(pos: (usize, usize), dir: Direction, side: usize) -> (usize, usize) {
    let (dr, dc) = dir.delta();
    (
        (pos.0 + side).wrapping_add_signed(dr as isize) % side,
        (pos.1 + side).wrapping_add_signed(dc as isize) % side,
    )
}

/// Renders a trace as CSV: `step,row,col,value,collected`. Step 0 is the
/// start cell; the `collected` column marks cells whose value entered the
/// output.
pub fn walk_trace_csv(grid: &EntropyGrid, trace: &WalkTrace) -> String {
    let mut out = String::from("step,row,col,value,collected\n");
    let mut pos = trace.start;
    let mut seen = [false; 256];
    let mut record = |step: usize, pos: (usize, usize), seen: &mut [bool; 256]| {
        let v = grid.get(pos.0, pos.1);
        let fresh = !seen[v as usize];
        seen[v as usize] = true;
        out.push_str(&format!("{step},{},{},{v},{}\n", pos.0, pos.1, fresh as u8));
    };
    record(0, pos, &mut seen);
    for (i, dir) in trace.steps.iter().enumerate() {
        pos = step(pos, *dir, grid.side());
        record(i + 1, pos, &mut seen);
    }
    out
}

/// Default per-walk step budget.
pub const DEFAULT_STEP_BUDGET: usize = 65_536;

/// Runs one walk over the grid, reading 3-bit direction codes from
/// `directions` until 256 distinct byte values have been collected.
///
/// The byte under the current position is collected first; each 3-bit
/// group (MSB first) then moves the position one cell with toroidal
/// wraparound. Cells holding already-collected values are skipped.
pub fn random_walk(
    grid: &EntropyGrid,
    directions: &BitStream,
    start: (usize, usize),
) -> Result<(SBox, WalkTrace), WalkError> {
    let mut cursor = BitCursor::new(directions);
    walk_with_cursor(grid, &mut cursor, start, DEFAULT_STEP_BUDGET)
}

/// [`random_walk`] over an explicit cursor and step budget. The cursor is
/// left positioned after the final consumed direction group.
pub fn walk_with_cursor(
    grid: &EntropyGrid,
    cursor: &mut BitCursor<'_>,
    start: (usize, usize),
    step_budget: usize,
) -> Result<(SBox, WalkTrace), WalkError> {
    let side = grid.side();
    if start.0 >= side || start.1 >= side {
        return Err(WalkError::InvalidStart { row: start.0, col: start.1, side });
    }
    let mut pos = start;
    let mut seen = [false; 256];
    let mut values = Vec::with_capacity(256);
    let mut steps = Vec::new();
    let collect = |pos: (usize, usize), values: &mut Vec<u8>, seen: &mut [bool; 256]| {
        let v = grid.get(pos.0, pos.1);
        if !seen[v as usize] {
            seen[v as usize] = true;
            values.push(v);
        }
        values.len()
    };
    let mut collected = collect(pos, &mut values, &mut seen);
    while collected < 256 {
        if steps.len() >= step_budget {
            return Err(WalkError::StepBudgetExceeded { budget: step_budget, collected });
        }
        let code = cursor
            .take_bits(3)
            .ok_or(WalkError::ExhaustedDirections { collected })? as u8;
        let dir = Direction::from_code(code).expect("3 bits are a valid code");
        pos = step(pos, dir, side);
        steps.push(dir);
        collected = collect(pos, &mut values, &mut seen);
    }
    let sbox = SBox::from_bytes(&values).expect("256 distinct collected values");
    Ok((sbox, WalkTrace { start, steps, visited_values: values }))
}

/// Configuration for [`construct_sboxes`].
#[derive(Debug, Clone)]
pub struct ConstructConfig {
    /// Side of the grid carved from the front of the stream. `None` picks
    /// `sqrt(byte_count / 2)` clamped to `[16, 128]`, leaving at least half
    /// of a minimal stream for the walks.
    pub grid_side: Option<usize>,
    /// Per-walk step budget.
    pub step_budget: usize,
    /// Total failed walks tolerated before giving up on the stream.
    pub failure_budget: usize,
    /// Reread the stream from the start when the walks outrun it. Keeps
    /// construction deterministic while letting a finite stream feed an
    /// arbitrary number of walks. When `false` the stream must cover every
    /// walk or construction fails.
    pub cyclic_directions: bool,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        Self {
            grid_side: None,
            step_budget: DEFAULT_STEP_BUDGET,
            failure_budget: 1024,
            cyclic_directions: true,
        }
    }
}

/// Result of a construction run.
#[derive(Debug, Clone)]
pub struct Construction {
    pub grid: EntropyGrid,
    pub sboxes: Vec<SBox>,
    pub traces: Vec<WalkTrace>,
    /// Walks that hit the step budget and were discarded.
    pub failures: usize,
}

fn default_grid_side(bit_len: usize) -> usize {
    (bit_len / 8 / 2).isqrt().clamp(EntropyGrid::MIN_SIDE, 128)
}

/// Builds one grid from the front of the stream, then walks it repeatedly
/// (fresh start position and direction bits per walk) until `total`
/// bijective S-boxes have been produced.
///
/// Each walk draws its start cell from the next `2 * ceil(log2 side)` bits
/// of the stream, interpreted as row and column mod the side. Failed walks
/// are discarded and retried with the bits that follow.
pub fn construct_sboxes(
    bits: &BitStream,
    total: usize,
    cfg: &ConstructConfig,
) -> Result<Construction, WalkError> {
    if total == 0 {
        return Err(WalkError::InvalidTotal);
    }
    let side = cfg.grid_side.unwrap_or_else(|| default_grid_side(bits.len()));
    if side < EntropyGrid::MIN_SIDE {
        return Err(WalkError::InvalidStart { row: 0, col: 0, side });
    }
    let grid_bits = side * side * 8;
    if bits.len() < grid_bits {
        return Err(WalkError::InsufficientBits { needed: grid_bits, got: bits.len() });
    }
    let grid = EntropyGrid {
        side,
        cells: bits.to_bytes_msb()[..side * side].to_vec(),
    };

    let mut cursor = if cfg.cyclic_directions {
        BitCursor::cyclic(bits)
    } else {
        BitCursor::new(bits)
    };
    // skip past the grid prefix
    for _ in 0..grid_bits / 64 {
        cursor.take_bits(64);
    }
    cursor.take_bits(grid_bits % 64);

    let coord_bits = usize::BITS as usize - (side - 1).leading_zeros() as usize;
    let mut out = Construction { grid, sboxes: Vec::with_capacity(total), traces: Vec::new(), failures: 0 };
    while out.sboxes.len() < total {
        let row = cursor
            .take_bits(coord_bits)
            .ok_or(WalkError::ExhaustedDirections { collected: 0 })? as usize
            % side;
        let col = cursor
            .take_bits(coord_bits)
            .ok_or(WalkError::ExhaustedDirections { collected: 0 })? as usize
            % side;
        match walk_with_cursor(&out.grid, &mut cursor, (row, col), cfg.step_budget) {
            Ok((sbox, trace)) => {
                out.sboxes.push(sbox);
                out.traces.push(trace);
            }
            Err(WalkError::StepBudgetExceeded { .. }) | Err(WalkError::ExhaustedDirections { .. })
                if out.failures < cfg.failure_budget =>
            {
                out.failures += 1;
            }
            Err(WalkError::StepBudgetExceeded { .. }) | Err(WalkError::ExhaustedDirections { .. }) => {
                return Err(WalkError::InsufficientBits { needed: grid_bits, got: bits.len() });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
