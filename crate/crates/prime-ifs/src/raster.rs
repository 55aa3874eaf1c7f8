//! Density rasterization: accumulate orbit points into a square grid and
//! emit binary PGM images (dark = dense) and point CSV files.

use crate::error::{Error, Result};
use crate::ifs::Point;

/// Square density grid. Row 0 is the top of the image; the math origin
/// (0, 0) lands in the bottom-left pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityGrid {
    size: usize,
    counts: Vec<u64>,
    points_total: u64,
}

impl DensityGrid {
    fn zero(size: usize) -> Self {
        DensityGrid {
            size,
            counts: vec![0; size * size],
            points_total: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points_total(&self) -> u64 {
        self.points_total
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count_at(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.size + col]
    }

    fn bin(&mut self, p: Point) {
        let s = self.size;
        let col = ((p.x * s as f64) as usize).min(s - 1);
        let row = s - 1 - ((p.y * s as f64) as usize).min(s - 1);
        self.counts[row * s + col] += 1;
        self.points_total += 1;
    }

    #[cfg(feature = "parallel")]
    fn merge(mut self, other: DensityGrid) -> DensityGrid {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.points_total += other.points_total;
        self
    }
}

fn check_points(points: &[Point], size: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::InvalidGridSize);
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y))
    {
        return Err(Error::OutOfUnitSquare(p.x, p.y));
    }
    Ok(())
}

/// Bin points into a size x size grid. Sharded across workers when the
/// `parallel` feature is enabled; shard sums are identical to the
/// sequential result for any shard count.
pub fn accumulate(points: &[Point], size: usize) -> Result<DensityGrid> {
    check_points(points, size)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let chunk = (points.len() / rayon::current_num_threads().max(1)).max(4096);
        Ok(points
            .par_chunks(chunk)
            .map(|shard| {
                let mut g = DensityGrid::zero(size);
                for &p in shard {
                    g.bin(p);
                }
                g
            })
            .reduce(|| DensityGrid::zero(size), DensityGrid::merge))
    }
    #[cfg(not(feature = "parallel"))]
    accumulate_seq(points, size)
}

/// Sequential reference path for [`accumulate`].
pub fn accumulate_seq(points: &[Point], size: usize) -> Result<DensityGrid> {
    check_points(points, size)?;
    let mut g = DensityGrid::zero(size);
    for &p in points {
        g.bin(p);
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrayScale {
    Linear,
    Log,
}

/// Render a binary P5 PGM, maxval 255, darker = more visited.
pub fn render_pgm(g: &DensityGrid, scale: GrayScale) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", g.size, g.size);
    let mut out = Vec::with_capacity(header.len() + g.counts.len());
    out.extend_from_slice(header.as_bytes());
    let c_max = g.counts.iter().copied().max().unwrap_or(0);
    if c_max == 0 {
        out.resize(out.len() + g.counts.len(), 0xFF);
        return out;
    }
    for &c in &g.counts {
        let v = match scale {
            GrayScale::Linear => c as f64 / c_max as f64,
            GrayScale::Log => ((1 + c) as f64).ln() / ((1 + c_max) as f64).ln(),
        };
        out.push(255 - (255.0 * v).round() as u8);
    }
    out
}

/// Overlay 1-pixel mid-gray gridlines at multiples of size / divider on a
/// rendered PGM. No-op for divider < 2.
pub fn apply_gridlines(pgm: &mut [u8], size: usize, divider: usize) {
    if divider < 2 {
        return;
    }
    let header_len = pgm.len() - size * size;
    let pixels = &mut pgm[header_len..];
    for k in 1..divider {
        let line = k * size / divider;
        if line >= size {
            continue;
        }
        for i in 0..size {
            pixels[line * size + i] = 128;
            pixels[i * size + line] = 128;
        }
    }
}

/// One "x,y" row per point, shortest round-trip formatting, LF endings.
pub fn write_points_csv(points: &[Point]) -> String {
    let mut out = String::new();
    for p in points {
        out.push_str(&format!("{},{}\n", p.x, p.y));
    }
    out
}

/// Parse the CSV produced by [`write_points_csv`]; bit-exact round trip.
pub fn parse_points_csv(text: &str) -> Result<Vec<Point>> {
    text.lines()
        .map(|line| {
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| Error::InvalidAddress(format!("bad CSV row {line:?}")))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidAddress(format!("bad number {s:?}")))
            };
            Ok(Point::new(parse(x)?, parse(y)?))
        })
        .collect()
}
