//! 01*-matrices, zone classification, corners, and mixed-minor searches.
//!
//! A matrix over {0, 1, *} is *horizontal* if all rows are constant,
//! *vertical* if all columns are constant, *constant* if both, and *mixed*
//! if it is neither horizontal nor vertical, or if it has at least two rows
//! and two columns and contains a *. A *corner* is a mixed 2x2 submatrix;
//! a matrix has a corner exactly when it is mixed, and the searches below
//! return explicit witnesses so that callers can re-verify every claim.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Interval, IntervalPartition, OrderedGraph};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MatrixError {
    Empty,
    NotSquare,
    ShapeMismatch,
    StarPresent { r: usize, c: usize },
    MixedZone { i: usize, j: usize },
    ZoneNotMixed { i: usize, j: usize },
    OddPartCount,
    NotTwoByTwo,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::Empty => write!(f, "matrix has no entries"),
            MatrixError::NotSquare => write!(f, "matrix is not square"),
            MatrixError::ShapeMismatch => write!(f, "division does not match matrix shape"),
            MatrixError::StarPresent { r, c } => write!(f, "* entry at ({r}, {c})"),
            MatrixError::MixedZone { i, j } => write!(f, "zone ({i}, {j}) is mixed"),
            MatrixError::ZoneNotMixed { i, j } => write!(f, "zone ({i}, {j}) is not mixed"),
            MatrixError::OddPartCount => write!(f, "division must have an even number of parts"),
            MatrixError::NotTwoByTwo => write!(f, "division must have exactly two row and two column parts"),
        }
    }
}

/// Matrix entry, ordered 0 < 1 < * for zone contraction.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Entry {
    Zero,
    One,
    Star,
}

impl Entry {
    pub fn as_char(self) -> char {
        match self {
            Entry::Zero => '0',
            Entry::One => '1',
            Entry::Star => '*',
        }
    }

    pub fn from_char(c: char) -> Option<Entry> {
        match c {
            '0' => Some(Entry::Zero),
            '1' => Some(Entry::One),
            '*' => Some(Entry::Star),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    Constant,
    Horizontal,
    Vertical,
    Mixed,
    /// Residual case: a matrix containing * that is neither mixed nor
    /// constant (necessarily a single row or column).
    Unclassified,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Constant => "constant",
            Classification::Horizontal => "horizontal",
            Classification::Vertical => "vertical",
            Classification::Mixed => "mixed",
            Classification::Unclassified => "none",
        }
    }
}

/// Mixed 2x2 submatrix given by row indices `r1 < r2` and columns `c1 < c2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Corner {
    pub r1: usize,
    pub r2: usize,
    pub c1: usize,
    pub c2: usize,
}

/// Row and column interval partitions dividing a matrix into zones.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Division {
    pub rows: IntervalPartition,
    pub cols: IntervalPartition,
}

impl Division {
    pub fn new(rows: IntervalPartition, cols: IntervalPartition) -> Self {
        Division { rows, cols }
    }

    pub fn symmetric(parts: IntervalPartition) -> Self {
        Division {
            rows: parts.clone(),
            cols: parts,
        }
    }

    pub fn zone(&self, i: usize, j: usize) -> (Interval, Interval) {
        (self.rows.part(i), self.cols.part(j))
    }
}

/// Dense row-major 01*-matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct TriMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Entry>,
}

impl fmt::Debug for TriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TriMatrix({}x{})", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c).as_char())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl TriMatrix {
    pub fn filled(rows: usize, cols: usize, e: Entry) -> Self {
        TriMatrix {
            rows,
            cols,
            data: vec![e; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[Entry]]) -> Result<Self, MatrixError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MatrixError::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::ShapeMismatch);
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(TriMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Adjacency matrix of `g` in vertex order, with * on the diagonal.
    pub fn adjacency(g: &OrderedGraph) -> Self {
        let n = g.n();
        let mut m = TriMatrix::filled(n, n, Entry::Zero);
        for v in 0..n {
            m.set(v, v, Entry::Star);
        }
        for (u, v) in g.edges() {
            m.set(u, v, Entry::One);
            m.set(v, u, Entry::One);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Entry {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: Entry) {
        self.data[r * self.cols + c] = e;
    }

    pub fn transpose(&self) -> TriMatrix {
        let mut t = TriMatrix::filled(self.cols, self.rows, Entry::Zero);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn submatrix(&self, rows: Interval, cols: Interval) -> TriMatrix {
        let mut s = TriMatrix::filled(rows.len(), cols.len(), Entry::Zero);
        for (ri, r) in rows.iter().enumerate() {
            for (ci, c) in cols.iter().enumerate() {
                s.set(ri, ci, self.get(r, c));
            }
        }
        s
    }

    pub fn has_star(&self) -> bool {
        self.data.contains(&Entry::Star)
    }

    fn first_star(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|&e| e == Entry::Star)
            .map(|i| (i / self.cols, i % self.cols))
    }

    pub fn is_horizontal(&self) -> bool {
        (0..self.rows).all(|r| (1..self.cols).all(|c| self.get(r, c) == self.get(r, 0)))
    }

    pub fn is_vertical(&self) -> bool {
        (0..self.cols).all(|c| (1..self.rows).all(|r| self.get(r, c) == self.get(0, c)))
    }

    pub fn is_mixed(&self) -> bool {
        (!self.is_horizontal() && !self.is_vertical())
            || (self.rows >= 2 && self.cols >= 2 && self.has_star())
    }

    pub fn classify(&self) -> Result<Classification, MatrixError> {
        if self.data.is_empty() {
            return Err(MatrixError::Empty);
        }
        let h = self.is_horizontal();
        let v = self.is_vertical();
        let star = self.has_star();
        if (!h && !v) || (self.rows >= 2 && self.cols >= 2 && star) {
            return Ok(Classification::Mixed);
        }
        if h && v {
            return Ok(Classification::Constant);
        }
        if star {
            return Ok(Classification::Unclassified);
        }
        Ok(if h {
            Classification::Horizontal
        } else {
            Classification::Vertical
        })
    }

    /// First corner in the deterministic search order, if the matrix is
    /// mixed; `None` exactly when it is not.
    pub fn find_corner(&self) -> Option<Corner> {
        if self.rows >= 2 && self.cols >= 2 {
            if let Some((r, c)) = self.first_star() {
                // any 2x2 submatrix through a * is mixed
                let r2 = if r == 0 { 1 } else { 0 };
                let c2 = if c == 0 { 1 } else { 0 };
                return Some(Corner {
                    r1: r.min(r2),
                    r2: r.max(r2),
                    c1: c.min(c2),
                    c2: c.max(c2),
                });
            }
        }
        // star-free (or too thin for the star clause): mixed means neither
        // horizontal nor vertical
        let (r, c1, c2) = self.first_row_break()?;
        let (rr1, rr2, cc) = self.first_col_break()?;
        let (a, b) = (self.get(r, c1), self.get(r, c2));
        for r2 in 0..self.rows {
            if r2 != r && (self.get(r2, c1), self.get(r2, c2)) != (a, b) {
                return Some(Corner {
                    r1: r.min(r2),
                    r2: r.max(r2),
                    c1,
                    c2,
                });
            }
        }
        // every row agrees with row r on (c1, c2), so both columns are
        // constant; pair the non-constant column with one of them
        let steady = c1; // cc != c1 since column c1 is constant
        Some(Corner {
            r1: rr1,
            r2: rr2,
            c1: cc.min(steady),
            c2: cc.max(steady),
        })
    }

    /// First `(r, c, c')` with `m[r][c] != m[r][c']`, scanning rows in order.
    fn first_row_break(&self) -> Option<(usize, usize, usize)> {
        for r in 0..self.rows {
            for c in 1..self.cols {
                if self.get(r, c) != self.get(r, c - 1) {
                    return Some((r, c - 1, c));
                }
            }
        }
        None
    }

    fn first_col_break(&self) -> Option<(usize, usize, usize)> {
        for c in 0..self.cols {
            for r in 1..self.rows {
                if self.get(r, c) != self.get(r - 1, c) {
                    return Some((r - 1, r, c));
                }
            }
        }
        None
    }

    fn check_division(&self, d: &Division) -> Result<(), MatrixError> {
        if d.rows.n() != self.rows || d.cols.n() != self.cols {
            return Err(MatrixError::ShapeMismatch);
        }
        Ok(())
    }

    /// Corner with one row in each row block and one column in each column
    /// block of a 2x2 division whose four zones are all mixed.
    pub fn find_spanning_corner(&self, d: &Division) -> Result<Corner, MatrixError> {
        self.check_division(d)?;
        if d.rows.len() != 2 || d.cols.len() != 2 {
            return Err(MatrixError::NotTwoByTwo);
        }
        let oracle = ZoneOracle::new(self);
        for i in 0..2 {
            for j in 0..2 {
                let (ri, cj) = d.zone(i, j);
                if !oracle.mixed(ri, cj) {
                    return Err(MatrixError::ZoneNotMixed { i, j });
                }
            }
        }
        let (r_top, r_bot) = (d.rows.part(0), d.rows.part(1));
        let (c_left, c_right) = (d.cols.part(0), d.cols.part(1));
        if let Some((r, c)) = self.first_star() {
            // pick the companion row and column from the opposite blocks
            let r2 = if r_top.contains(r) { r_bot.lo } else { r_top.lo };
            let c2 = if c_left.contains(c) { c_right.lo } else { c_left.lo };
            return Ok(Corner {
                r1: r.min(r2),
                r2: r.max(r2),
                c1: c.min(c2),
                c2: c.max(c2),
            });
        }
        // star-free: the top-left zone is not horizontal, the bottom-right
        // zone is not vertical; stitch a corner across them
        let r = r_top
            .iter()
            .find(|&r| c_left.iter().any(|c| self.get(r, c) != self.get(r, c_left.lo)))
            .expect("mixed star-free zone has a non-constant row");
        let cp = c_right
            .iter()
            .find(|&c| r_bot.iter().any(|r| self.get(r, c) != self.get(r_bot.lo, c)))
            .expect("mixed star-free zone has a non-constant column");
        let e = self.get(r, cp);
        let c = c_left
            .iter()
            .find(|&c| self.get(r, c) != e)
            .expect("row r takes both values on the left block");
        let rp = r_bot
            .iter()
            .find(|&rr| self.get(rr, cp) != e)
            .expect("column cp takes both values on the bottom block");
        Ok(Corner {
            r1: r,
            r2: rp,
            c1: c,
            c2: cp,
        })
    }

    /// Contracts each zone to its maximum entry under 0 < 1 < *.
    pub fn contract(&self, d: &Division) -> Result<TriMatrix, MatrixError> {
        self.check_division(d)?;
        let mut out = TriMatrix::filled(d.rows.len(), d.cols.len(), Entry::Zero);
        for i in 0..d.rows.len() {
            for j in 0..d.cols.len() {
                let (ri, cj) = d.zone(i, j);
                let mut m = Entry::Zero;
                for r in ri.iter() {
                    for c in cj.iter() {
                        m = m.max(self.get(r, c));
                    }
                }
                out.set(i, j, m);
            }
        }
        Ok(out)
    }

    /// Zeroes every zone that is not vertical. Requires a star-free matrix
    /// with no mixed zone.
    pub fn horizontal_deletion(&self, d: &Division) -> Result<TriMatrix, MatrixError> {
        self.deletion(d, false)
    }

    /// Zeroes every zone that is not horizontal. Requires a star-free matrix
    /// with no mixed zone.
    pub fn vertical_deletion(&self, d: &Division) -> Result<TriMatrix, MatrixError> {
        self.deletion(d, true)
    }

    fn deletion(&self, d: &Division, keep_horizontal: bool) -> Result<TriMatrix, MatrixError> {
        self.check_division(d)?;
        if let Some((r, c)) = self.first_star() {
            return Err(MatrixError::StarPresent { r, c });
        }
        let oracle = ZoneOracle::new(self);
        let mut out = self.clone();
        for i in 0..d.rows.len() {
            for j in 0..d.cols.len() {
                let (ri, cj) = d.zone(i, j);
                if oracle.mixed(ri, cj) {
                    return Err(MatrixError::MixedZone { i, j });
                }
                let keep = if keep_horizontal {
                    oracle.horizontal(ri, cj)
                } else {
                    oracle.vertical(ri, cj)
                };
                if !keep {
                    for r in ri.iter() {
                        for c in cj.iter() {
                            out.set(r, c, Entry::Zero);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exhaustive search for a `d`-division all of whose zones are mixed.
    /// Divisions are enumerated in lexicographic cut order (rows outer),
    /// so the returned witness is deterministic. Row and column stripes
    /// that are not mixed are pruned up front: a submatrix of a non-mixed
    /// matrix is never mixed.
    pub fn find_mixed_minor(&self, d: usize) -> Option<Division> {
        if d == 0 || d > self.rows || d > self.cols {
            return None;
        }
        let oracle = ZoneOracle::new(self);
        let full_rows = Interval { lo: 0, hi: self.rows };
        let full_cols = Interval { lo: 0, hi: self.cols };
        let mut col_parts: Vec<IntervalPartition> = Vec::new();
        for_each_composition(self.cols, d, |ccuts| {
            let cp = IntervalPartition::from_cuts(self.cols, ccuts).unwrap();
            if (0..d).all(|j| oracle.mixed(full_rows, cp.part(j))) {
                col_parts.push(cp);
            }
            true
        });
        if col_parts.is_empty() {
            return None;
        }
        let mut found: Option<Division> = None;
        for_each_composition(self.rows, d, |rcuts| {
            let rp = IntervalPartition::from_cuts(self.rows, rcuts).unwrap();
            if (0..d).any(|i| !oracle.mixed(rp.part(i), full_cols)) {
                return true;
            }
            for cp in &col_parts {
                let mut all_mixed = true;
                'zones: for i in 0..d {
                    for j in 0..d {
                        if !oracle.mixed(rp.part(i), cp.part(j)) {
                            all_mixed = false;
                            break 'zones;
                        }
                    }
                }
                if all_mixed {
                    found = Some(Division::new(rp, cp.clone()));
                    return false;
                }
            }
            true
        });
        found
    }

    /// Like [`find_mixed_minor`] but over symmetric divisions of a square
    /// matrix only.
    pub fn find_mixed_minor_symmetric(&self, d: usize) -> Result<Option<Division>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        if d == 0 || d > self.rows {
            return Ok(None);
        }
        let oracle = ZoneOracle::new(self);
        let mut found = None;
        for_each_composition(self.rows, d, |cuts| {
            let p = IntervalPartition::from_cuts(self.rows, cuts).unwrap();
            let mut hit = true;
            'zones: for i in 0..d {
                for j in 0..d {
                    if !oracle.mixed(p.part(i), p.part(j)) {
                        hit = false;
                        break 'zones;
                    }
                }
            }
            if hit {
                found = Some(Division::symmetric(p));
            }
            !hit
        });
        Ok(found)
    }

    /// Exhaustive search for a symmetric `d`-division of a square matrix
    /// whose off-diagonal zones are all mixed.
    pub fn find_almost_mixed_minor(&self, d: usize) -> Result<Option<IntervalPartition>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare);
        }
        if d == 0 || d > self.rows {
            return Ok(None);
        }
        let oracle = ZoneOracle::new(self);
        let mut found = None;
        for_each_composition(self.rows, d, |cuts| {
            let p = IntervalPartition::from_cuts(self.rows, cuts).unwrap();
            if all_off_diagonal_mixed(&oracle, &p) {
                found = Some(p);
                false
            } else {
                true
            }
        });
        Ok(found)
    }

    /// Number of mixed zones of a division.
    pub fn count_mixed_zones(&self, d: &Division) -> Result<usize, MatrixError> {
        self.check_division(d)?;
        let oracle = ZoneOracle::new(self);
        let mut count = 0;
        for i in 0..d.rows.len() {
            for j in 0..d.cols.len() {
                let (ri, cj) = d.zone(i, j);
                if oracle.mixed(ri, cj) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Turns a symmetric `2d`-division with all off-diagonal zones mixed into
    /// a `d`-division with all zones mixed, by merging the first `d + 1` row
    /// blocks and the last `d + 1` column blocks.
    pub fn merge_to_mixed_minor(&self, amm: &IntervalPartition) -> Result<Division, MatrixError> {
        if !self.is_square() || amm.n() != self.rows {
            return Err(MatrixError::NotSquare);
        }
        if amm.len() % 2 != 0 || amm.len() < 2 {
            return Err(MatrixError::OddPartCount);
        }
        let d = amm.len() / 2;
        let oracle = ZoneOracle::new(self);
        for i in 0..2 * d {
            for j in 0..2 * d {
                if i != j && !oracle.mixed(amm.part(i), amm.part(j)) {
                    return Err(MatrixError::ZoneNotMixed { i, j });
                }
            }
        }
        let mut row_groups = vec![1usize; d];
        row_groups[0] = d + 1;
        let mut col_groups = vec![1usize; d];
        col_groups[d - 1] = d + 1;
        let rows = amm.coarsen(&row_groups).expect("group sizes sum to 2d");
        let cols = amm.coarsen(&col_groups).expect("group sizes sum to 2d");
        let division = Division::new(rows, cols);
        for i in 0..d {
            for j in 0..d {
                let (ri, cj) = division.zone(i, j);
                debug_assert!(oracle.mixed(ri, cj), "merged zone ({i}, {j}) must be mixed");
            }
        }
        Ok(division)
    }
}

fn all_off_diagonal_mixed(oracle: &ZoneOracle, p: &IntervalPartition) -> bool {
    let k = p.len();
    for i in 0..k {
        for j in 0..k {
            if i != j && !oracle.mixed(p.part(i), p.part(j)) {
                return false;
            }
        }
    }
    true
}

/// Calls `f` with each strictly increasing cut vector dividing `0..n` into
/// `d` nonempty parts, in lexicographic order, while `f` returns true.
pub fn for_each_composition(n: usize, d: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if d == 0 || d > n {
        return true;
    }
    let mut cuts: Vec<usize> = (1..d).collect();
    loop {
        if !f(&cuts) {
            return false;
        }
        // advance to the next combination of d-1 cuts out of 1..n
        let k = cuts.len();
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            let max_here = n - (k - i);
            if cuts[i] < max_here {
                cuts[i] += 1;
                for j in i + 1..k {
                    cuts[j] = cuts[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// O(1) rectangle classification queries over a fixed matrix, built from
/// prefix sums of row breaks, column breaks, and star positions.
pub struct ZoneOracle {
    row_breaks: Prefix2,
    col_breaks: Prefix2,
    stars: Prefix2,
}

impl ZoneOracle {
    pub fn new(m: &TriMatrix) -> Self {
        let row_breaks = Prefix2::build(m.rows, m.cols.saturating_sub(1), |r, c| {
            m.get(r, c + 1) != m.get(r, c)
        });
        let col_breaks = Prefix2::build(m.rows.saturating_sub(1), m.cols, |r, c| {
            m.get(r + 1, c) != m.get(r, c)
        });
        let stars = Prefix2::build(m.rows, m.cols, |r, c| m.get(r, c) == Entry::Star);
        ZoneOracle {
            row_breaks,
            col_breaks,
            stars,
        }
    }

    pub fn horizontal(&self, rows: Interval, cols: Interval) -> bool {
        cols.len() < 2 || self.row_breaks.count(rows.lo, rows.hi, cols.lo, cols.hi - 1) == 0
    }

    pub fn vertical(&self, rows: Interval, cols: Interval) -> bool {
        rows.len() < 2 || self.col_breaks.count(rows.lo, rows.hi - 1, cols.lo, cols.hi) == 0
    }

    pub fn has_star(&self, rows: Interval, cols: Interval) -> bool {
        self.stars.count(rows.lo, rows.hi, cols.lo, cols.hi) > 0
    }

    pub fn mixed(&self, rows: Interval, cols: Interval) -> bool {
        let thick = rows.len() >= 2 && cols.len() >= 2;
        (!self.horizontal(rows, cols) && !self.vertical(rows, cols))
            || (thick && self.has_star(rows, cols))
    }

    pub fn classify(&self, rows: Interval, cols: Interval) -> Classification {
        if self.mixed(rows, cols) {
            return Classification::Mixed;
        }
        let h = self.horizontal(rows, cols);
        let v = self.vertical(rows, cols);
        if h && v {
            Classification::Constant
        } else if self.has_star(rows, cols) {
            Classification::Unclassified
        } else if h {
            Classification::Horizontal
        } else {
            Classification::Vertical
        }
    }
}

struct Prefix2 {
    cols: usize,
    sums: Vec<u32>,
}

impl Prefix2 {
    fn build(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let w = cols + 1;
        let mut sums = vec![0u32; (rows + 1) * w];
        for r in 0..rows {
            let mut row_total = 0u32;
            for c in 0..cols {
                row_total += f(r, c) as u32;
                sums[(r + 1) * w + c + 1] = sums[r * w + c + 1] + row_total;
            }
        }
        Prefix2 { cols, sums }
    }

    /// Sum over rows `r0..r1`, cols `c0..c1` (saturating on an empty range).
    fn count(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> u32 {
        if r0 >= r1 || c0 >= c1 {
            return 0;
        }
        let w = self.cols + 1;
        self.sums[r1 * w + c1] + self.sums[r0 * w + c0]
            - self.sums[r0 * w + c1]
            - self.sums[r1 * w + c0]
    }
}
