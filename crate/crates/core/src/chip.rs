//! Column-structured model of a heterogeneous FPGA fabric.
//!
//! The fabric is a grid of `width` columns. Each column holds one resource
//! kind. CLB columns carry one tile per CLB row; BRAM and DSP columns carry
//! `macro_rows_per_col` taller tiles over the same physical height. All
//! rectangles are quantized vertically to `quantum` CLB rows so that every
//! window covers a whole number of macro tiles regardless of its y offset.

use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ColumnKind {
    Clb,
    Bram,
    Dsp,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Clb => "CLB",
            ColumnKind::Bram => "BRAM",
            ColumnKind::Dsp => "DSP",
        })
    }
}

/// Tile counts of the three resource kinds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ResourceVector {
    pub clb: u64,
    pub bram: u64,
    pub dsp: u64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector { clb: 0, bram: 0, dsp: 0 };

    pub fn new(clb: u64, bram: u64, dsp: u64) -> Self {
        Self { clb, bram, dsp }
    }

    /// Componentwise `self >= other`.
    pub fn covers(&self, other: &ResourceVector) -> bool {
        self.clb >= other.clb && self.bram >= other.bram && self.dsp >= other.dsp
    }

    pub fn min(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector {
            clb: self.clb.min(other.clb),
            bram: self.bram.min(other.bram),
            dsp: self.dsp.min(other.dsp),
        }
    }

    pub fn get(&self, kind: ColumnKind) -> u64 {
        match kind {
            ColumnKind::Clb => self.clb,
            ColumnKind::Bram => self.bram,
            ColumnKind::Dsp => self.dsp,
        }
    }
}

impl Add for ResourceVector {
    type Output = ResourceVector;
    fn add(self, o: ResourceVector) -> ResourceVector {
        ResourceVector { clb: self.clb + o.clb, bram: self.bram + o.bram, dsp: self.dsp + o.dsp }
    }
}

impl AddAssign for ResourceVector {
    fn add_assign(&mut self, o: ResourceVector) {
        *self = *self + o;
    }
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(clb={}, bram={}, dsp={})", self.clb, self.bram, self.dsp)
    }
}

/// A rectangle in tile coordinates. `(1, 1)` is the bottom-left tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    /// Rightmost covered column.
    pub fn right(&self) -> usize {
        self.x + self.w - 1
    }

    /// Topmost covered row.
    pub fn top(&self) -> usize {
        self.y + self.h - 1
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x <= o.right() && o.x <= self.right() && self.y <= o.top() && o.y <= self.top()
    }

    pub fn contains(&self, o: &Rect) -> bool {
        o.x >= self.x && o.right() <= self.right() && o.y >= self.y && o.top() <= self.top()
    }

    /// Smallest rectangle covering both.
    pub fn union(&self, o: &Rect) -> Rect {
        let x = self.x.min(o.x);
        let y = self.y.min(o.y);
        let r = self.right().max(o.right());
        let t = self.top().max(o.top());
        Rect { x, y, w: r - x + 1, h: t - y + 1 }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x as f64 + (self.w as f64 - 1.0) / 2.0, self.y as f64 + (self.h as f64 - 1.0) / 2.0)
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[x={} y={} w={} h={}]", self.x, self.y, self.w, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipModel {
    pub width: usize,
    pub height: usize,
    pub bram_cols: Vec<usize>,
    pub dsp_cols: Vec<usize>,
    pub clb_rows_per_col: usize,
    pub macro_rows_per_col: usize,
    pub quantum: usize,
    kinds: Vec<ColumnKind>,
    // prefix[k][i] = number of columns of kind k among columns 1..=i
    prefix: [Vec<usize>; 3],
    // min_cols[w] = componentwise min over x of the column counts of a width-w window
    min_cols: Vec<[usize; 3]>,
}

const XC7VX485T_BRAM: [usize; 15] = [5, 11, 23, 29, 37, 48, 66, 77, 88, 99, 110, 118, 124, 136, 142];
const XC7VX485T_DSP: [usize; 20] =
    [14, 20, 26, 34, 40, 45, 51, 63, 69, 74, 80, 85, 91, 96, 102, 107, 113, 121, 127, 133];

fn kind_index(k: ColumnKind) -> usize {
    match k {
        ColumnKind::Clb => 0,
        ColumnKind::Bram => 1,
        ColumnKind::Dsp => 2,
    }
}

impl ChipModel {
    /// Builds and validates a chip. `clb_rows_per_col` equals `height`.
    pub fn new(
        width: usize,
        height: usize,
        mut bram_cols: Vec<usize>,
        mut dsp_cols: Vec<usize>,
        macro_rows_per_col: usize,
        quantum: usize,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidChip(m));
        if width == 0 || height == 0 {
            return bad("width and height must be positive".into());
        }
        if quantum == 0 || height % quantum != 0 {
            return bad(format!("quantum {quantum} must divide height {height}"));
        }
        if macro_rows_per_col == 0 || macro_rows_per_col > height {
            return bad(format!("macro_rows {macro_rows_per_col} must lie in [1, {height}]"));
        }
        if (quantum * macro_rows_per_col) % height != 0 {
            return bad(format!(
                "a {quantum}-row quantum does not cover a whole number of macro tiles \
                 ({macro_rows_per_col} macro rows over {height} rows)"
            ));
        }
        bram_cols.sort_unstable();
        bram_cols.dedup();
        dsp_cols.sort_unstable();
        dsp_cols.dedup();
        let mut kinds = vec![ColumnKind::Clb; width];
        for &c in &bram_cols {
            if c == 0 || c > width {
                return bad(format!("BRAM column {c} outside [1, {width}]"));
            }
            kinds[c - 1] = ColumnKind::Bram;
        }
        for &c in &dsp_cols {
            if c == 0 || c > width {
                return bad(format!("DSP column {c} outside [1, {width}]"));
            }
            if kinds[c - 1] != ColumnKind::Clb {
                return bad(format!("column {c} is both BRAM and DSP"));
            }
            kinds[c - 1] = ColumnKind::Dsp;
        }

        let mut prefix: [Vec<usize>; 3] = [vec![0; width + 1], vec![0; width + 1], vec![0; width + 1]];
        for (i, &k) in kinds.iter().enumerate() {
            for (j, p) in prefix.iter_mut().enumerate() {
                p[i + 1] = p[i] + usize::from(kind_index(k) == j);
            }
        }
        let mut min_cols = vec![[0usize; 3]; width + 1];
        for w in 1..=width {
            let mut best = [usize::MAX; 3];
            for x in 1..=width - w + 1 {
                for (j, p) in prefix.iter().enumerate() {
                    best[j] = best[j].min(p[x + w - 1] - p[x - 1]);
                }
            }
            min_cols[w] = best;
        }

        Ok(ChipModel {
            width,
            height,
            bram_cols,
            dsp_cols,
            clb_rows_per_col: height,
            macro_rows_per_col,
            quantum,
            kinds,
            prefix,
            min_cols,
        })
    }

    /// The Virtex-7 XC7VX485T: 146 columns, 350 CLB rows, 140 BRAM/DSP rows.
    pub fn builtin_xc7vx485t() -> ChipModel {
        ChipModel::new(146, 350, XC7VX485T_BRAM.to_vec(), XC7VX485T_DSP.to_vec(), 140, 5)
            .expect("builtin chip is valid")
    }

    /// Parses the line-oriented chip description format.
    pub fn parse(text: &str) -> Result<ChipModel> {
        let mut width = None;
        let mut height = None;
        let mut quantum = None;
        let mut macro_rows = None;
        let mut bram = Vec::new();
        let mut dsp = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| Error::Syntax { line: line_no, msg };
            let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let value = value.trim();
            let num = |v: &str| v.trim().parse::<usize>().map_err(|_| syntax(format!("bad number `{v}`")));
            let list = |v: &str| -> Result<Vec<usize>> {
                v.split(',').filter(|s| !s.trim().is_empty()).map(num).collect()
            };
            match key {
                "width" => width = Some(num(value)?),
                "height" => height = Some(num(value)?),
                "quantum" => quantum = Some(num(value)?),
                "macro_rows" => macro_rows = Some(num(value)?),
                "bram_cols" => bram = list(value)?,
                "dsp_cols" => dsp = list(value)?,
                other => return Err(syntax(format!("unknown key `{other}`"))),
            }
        }
        let need = |v: Option<usize>, k: &str| v.ok_or_else(|| Error::InvalidChip(format!("missing `{k}`")));
        let width = need(width, "width")?;
        let height = need(height, "height")?;
        ChipModel::new(
            width,
            height,
            bram,
            dsp,
            macro_rows.unwrap_or(height),
            quantum.unwrap_or(1),
        )
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "width {}\nheight {}\nquantum {}\nmacro_rows {}\nbram_cols {}\ndsp_cols {}\n",
            self.width,
            self.height,
            self.quantum,
            self.macro_rows_per_col,
            join(&self.bram_cols),
            join(&self.dsp_cols)
        )
    }

    pub fn column_kind(&self, x: usize) -> Result<ColumnKind> {
        if x == 0 || x > self.width {
            return Err(Error::ColumnRange(x, self.width));
        }
        Ok(self.kinds[x - 1])
    }

    /// Number of columns of each kind (CLB, BRAM, DSP).
    pub fn column_counts(&self) -> [usize; 3] {
        [self.prefix[0][self.width], self.prefix[1][self.width], self.prefix[2][self.width]]
    }

    /// Macro tiles covered by a quantum-aligned height.
    pub fn macro_tiles(&self, h: usize) -> u64 {
        (h * self.macro_rows_per_col / self.clb_rows_per_col) as u64
    }

    /// Tiles a single full-height column of the given kind provides.
    pub fn column_capacity(&self, kind: ColumnKind) -> u64 {
        match kind {
            ColumnKind::Clb => self.clb_rows_per_col as u64,
            _ => self.macro_rows_per_col as u64,
        }
    }

    pub fn capacity(&self) -> ResourceVector {
        let [c, b, d] = self.column_counts();
        self.counts_for(c, b, d, self.height)
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    fn counts_for(&self, clb_cols: usize, bram_cols: usize, dsp_cols: usize, h: usize) -> ResourceVector {
        let m = self.macro_tiles(h);
        ResourceVector {
            clb: (clb_cols * h) as u64,
            bram: bram_cols as u64 * m,
            dsp: dsp_cols as u64 * m,
        }
    }

    fn check_height(&self, h: usize) -> Result<()> {
        if h == 0 || h % self.quantum != 0 {
            return Err(Error::Unaligned(format!("h={h}"), self.quantum));
        }
        if h > self.height {
            return Err(Error::OutOfChip(format!("h={h}")));
        }
        Ok(())
    }

    pub fn resources_in_window(&self, r: &Rect) -> Result<ResourceVector> {
        if r.w == 0 || r.h == 0 || r.h % self.quantum != 0 || r.y == 0 || (r.y - 1) % self.quantum != 0 {
            return Err(Error::Unaligned(r.to_string(), self.quantum));
        }
        if r.x == 0 || r.right() > self.width || r.top() > self.height {
            return Err(Error::OutOfChip(r.to_string()));
        }
        let span = |k: usize| self.prefix[k][r.right()] - self.prefix[k][r.x - 1];
        Ok(self.counts_for(span(0), span(1), span(2), r.h))
    }

    /// Resources in the part of `r` that lies on the chip. Rectangles fully
    /// off-chip count as empty.
    pub fn resources_in_window_clipped(&self, r: &Rect) -> ResourceVector {
        if r.x > self.width || r.y > self.height {
            return ResourceVector::ZERO;
        }
        let right = r.right().min(self.width);
        let top = r.top().min(self.height);
        let clipped = Rect::new(r.x, r.y, right - r.x + 1, top - r.y + 1);
        self.resources_in_window(&clipped).unwrap_or(ResourceVector::ZERO)
    }

    /// Componentwise minimum of the window contents over every horizontal
    /// position of a `w`-wide, `h`-tall window.
    pub fn min_window_over_x(&self, w: usize, h: usize) -> Result<ResourceVector> {
        if w == 0 || w > self.width {
            return Err(Error::OutOfChip(format!("w={w}")));
        }
        self.check_height(h)?;
        let [c, b, d] = self.min_cols[w];
        Ok(self.counts_for(c, b, d, h))
    }

    /// Minimum column counts (CLB, BRAM, DSP) over all positions of a
    /// `w`-wide window.
    pub fn min_columns(&self, w: usize) -> [usize; 3] {
        self.min_cols[w]
    }
}
