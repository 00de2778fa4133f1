//! Marker-controlled watershed segmentation.
//!
//! Contour rings are split into 8-connected components, each becoming one
//! marker. The flood then runs over the raw gray levels: drops are dark, so
//! they are the basins. Everything outside the dilated drop mask is seeded
//! as background so that the flood can never spill across the card.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, GrayImage};

/// Label of card background in a [`LabelMap`].
pub const BACKGROUND: u32 = 0;
/// Label of pixels where two different segments meet.
pub const RIDGE: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;

const NEIGHBORS_4: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundingBox {
    pub min_x: u32,
    pub min_y: u32,
    pub max_x: u32,
    pub max_y: u32,
}

impl BoundingBox {
    fn point(x: u32, y: u32) -> Self {
        Self {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        }
    }

    fn include(&mut self, x: u32, y: u32) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn width(&self) -> u32 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> u32 {
        self.max_y - self.min_y + 1
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= f64::from(self.min_x)
            && x <= f64::from(self.max_x)
            && y >= f64::from(self.min_y)
            && y <= f64::from(self.max_y)
    }
}

/// One 8-connected component of a contour mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub label: u32,
    pub pixels: Vec<(u32, u32)>,
    pub bbox: BoundingBox,
}

impl Contour {
    /// Builds a marker from an arbitrary non-empty pixel list.
    pub fn new(label: u32, pixels: Vec<(u32, u32)>) -> Result<Self> {
        if label == BACKGROUND || label >= UNSET {
            return Err(Error::parameter(
                "label",
                format!("contour labels must be in 1..{UNSET}, got {label}"),
            ));
        }
        let (&(x0, y0), rest) = pixels
            .split_first()
            .ok_or_else(|| Error::parameter("pixels", "contour must not be empty"))?;
        let mut bbox = BoundingBox::point(x0, y0);
        for &(x, y) in rest {
            bbox.include(x, y);
        }
        Ok(Self {
            label,
            pixels,
            bbox,
        })
    }
}

/// Per-pixel segment labels produced by [`watershed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Largest segment label present.
    pub fn max_label(&self) -> u32 {
        self.labels
            .iter()
            .copied()
            .filter(|&l| l != RIDGE)
            .max()
            .unwrap_or(BACKGROUND)
    }

    pub fn ridge_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == RIDGE).count()
    }
}

/// One segmented droplet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropSegment {
    pub label: u32,
    pub area_px: u64,
    /// Mean pixel coordinate `(x, y)`.
    pub centroid: (f64, f64),
    pub bbox: BoundingBox,
    pub width_px: u32,
    pub height_px: u32,
}

/// Splits a mask into 8-connected components, labeled `1..=K` in raster
/// order of each component's first pixel.
pub fn find_contours(mask: &BinaryImage) -> Vec<Contour> {
    let (w, h) = mask.dimensions();
    let mut seen = vec![false; mask.len()];
    let mut contours = Vec::new();
    let mut queue = VecDeque::new();

    for (start, &fg) in mask.pixels().iter().enumerate() {
        if !fg || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w as usize) as u32, (i / w as usize) as u32);
            pixels.push((x, y));
            for j in neighbors(x, y, w, h, &NEIGHBORS_8) {
                if mask.pixels()[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let label = contours.len() as u32 + 1;
        contours.push(Contour::new(label, pixels).expect("component is non-empty"));
    }
    contours
}

fn neighbors<'a>(
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    offsets: &'a [(i64, i64)],
) -> impl Iterator<Item = usize> + 'a {
    offsets.iter().filter_map(move |&(dx, dy)| {
        let nx = i64::from(x) + dx;
        let ny = i64::from(y) + dy;
        (nx >= 0 && ny >= 0 && nx < i64::from(w) && ny < i64::from(h))
            .then(|| ny as usize * w as usize + nx as usize)
    })
}

#[derive(Debug, Clone, Copy)]
struct FloodEntry {
    level: f64,
    seq: u64,
    index: usize,
    label: u32,
}

impl PartialEq for FloodEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FloodEntry {}

impl PartialOrd for FloodEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FloodEntry {
    // Reversed so that `BinaryHeap` pops the lowest (level, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .level
            .total_cmp(&self.level)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Marker-controlled priority flood over `gray`.
///
/// Each contour's pixels are seeded with its label; every pixel that is
/// `false` in `dilated` is seeded as [`BACKGROUND`]. Remaining pixels are
/// popped in ascending `(gray level, insertion order)` and take the label of
/// the 4-neighbor that queued them, unless their already-labeled neighbors
/// carry two different segment labels, in which case they become [`RIDGE`]
/// and stop the flood there. Seed labels are never overwritten; where two
/// contours claim the same pixel the lower-indexed contour wins.
pub fn watershed(gray: &GrayImage, contours: &[Contour], dilated: &BinaryImage) -> Result<LabelMap> {
    let (w, h) = gray.dimensions();
    if dilated.dimensions() != (w, h) {
        return Err(Error::DimensionMismatch {
            left_width: w,
            left_height: h,
            right_width: dilated.width(),
            right_height: dilated.height(),
        });
    }
    let n = gray.len();
    let levels = gray.pixels();
    let mut labels = vec![UNSET; n];
    let mut seeds = Vec::new();

    for contour in contours {
        for &(x, y) in &contour.pixels {
            if x >= w || y >= h {
                return Err(Error::DimensionMismatch {
                    left_width: w,
                    left_height: h,
                    right_width: contour.bbox.max_x + 1,
                    right_height: contour.bbox.max_y + 1,
                });
            }
            let i = y as usize * w as usize + x as usize;
            if labels[i] == UNSET {
                labels[i] = contour.label;
                seeds.push(i);
            }
        }
    }
    for (i, &covered) in dilated.pixels().iter().enumerate() {
        if !covered && labels[i] == UNSET {
            labels[i] = BACKGROUND;
            seeds.push(i);
        }
    }

    let mut queued = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let xy = |i: usize| ((i % w as usize) as u32, (i / w as usize) as u32);

    for &i in &seeds {
        queued[i] = true;
    }
    for &i in &seeds {
        let (x, y) = xy(i);
        if neighbors(x, y, w, h, &NEIGHBORS_4).any(|j| labels[j] == UNSET) {
            heap.push(FloodEntry {
                level: levels[i],
                seq,
                index: i,
                label: labels[i],
            });
            seq += 1;
        }
    }

    while let Some(entry) = heap.pop() {
        let i = entry.index;
        let (x, y) = xy(i);
        if labels[i] == UNSET {
            let mut first = None;
            let mut conflict = false;
            for j in neighbors(x, y, w, h, &NEIGHBORS_4) {
                let l = labels[j];
                if l == BACKGROUND || l == RIDGE || l == UNSET {
                    continue;
                }
                match first {
                    None => first = Some(l),
                    Some(f) if f != l => conflict = true,
                    _ => {}
                }
            }
            labels[i] = if conflict { RIDGE } else { entry.label };
        }
        let label = labels[i];
        if label == RIDGE {
            continue;
        }
        for j in neighbors(x, y, w, h, &NEIGHBORS_4) {
            if labels[j] == UNSET && !queued[j] {
                queued[j] = true;
                heap.push(FloodEntry {
                    level: levels[j],
                    seq,
                    index: j,
                    label,
                });
                seq += 1;
            }
        }
    }

    // Pixels fenced off by ridges or unreachable from any seed.
    for l in &mut labels {
        if *l == UNSET {
            *l = BACKGROUND;
        }
    }

    Ok(LabelMap {
        width: w,
        height: h,
        labels,
    })
}

/// Collects one [`DropSegment`] per label with at least `min_area_px`
/// pixels, sorted by label. Ridge and background pixels are never counted.
pub fn extract_segments(lm: &LabelMap, min_area_px: u64) -> Vec<DropSegment> {
    collect_segments(lm, None, min_area_px)
}

/// Like [`extract_segments`], but only pixels that are `true` in `material`
/// contribute to a segment. Used to measure drop stain alone, without the
/// outer ring the dilated marker adds around each drop.
pub fn extract_segments_within(
    lm: &LabelMap,
    material: &BinaryImage,
    min_area_px: u64,
) -> Result<Vec<DropSegment>> {
    if material.dimensions() != lm.dimensions() {
        return Err(Error::DimensionMismatch {
            left_width: lm.width,
            left_height: lm.height,
            right_width: material.width(),
            right_height: material.height(),
        });
    }
    Ok(collect_segments(lm, Some(material), min_area_px))
}

struct Accumulator {
    area: u64,
    sum_x: f64,
    sum_y: f64,
    bbox: BoundingBox,
}

fn collect_segments(lm: &LabelMap, material: Option<&BinaryImage>, min_area_px: u64) -> Vec<DropSegment> {
    let max_label = lm.max_label() as usize;
    let mut acc: Vec<Option<Accumulator>> = (0..=max_label).map(|_| None).collect();
    let w = lm.width as usize;

    for (i, &label) in lm.labels.iter().enumerate() {
        if label == BACKGROUND || label == RIDGE {
            continue;
        }
        if material.is_some_and(|m| !m.pixels()[i]) {
            continue;
        }
        let (x, y) = ((i % w) as u32, (i / w) as u32);
        let slot = &mut acc[label as usize];
        match slot {
            Some(a) => {
                a.area += 1;
                a.sum_x += f64::from(x);
                a.sum_y += f64::from(y);
                a.bbox.include(x, y);
            }
            None => {
                *slot = Some(Accumulator {
                    area: 1,
                    sum_x: f64::from(x),
                    sum_y: f64::from(y),
                    bbox: BoundingBox::point(x, y),
                })
            }
        }
    }

    acc.into_iter()
        .enumerate()
        .filter_map(|(label, a)| {
            let a = a?;
            (a.area >= min_area_px.max(1)).then(|| DropSegment {
                label: label as u32,
                area_px: a.area,
                centroid: (a.sum_x / a.area as f64, a.sum_y / a.area as f64),
                bbox: a.bbox,
                width_px: a.bbox.width(),
                height_px: a.bbox.height(),
            })
        })
        .collect()
}
