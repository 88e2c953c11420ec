//! Synthetic maps shared by the integration tests.
#![allow(dead_code)]

use area_graph::map_io::GridMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RES: f64 = 0.05;
pub const FREE: u8 = 254;
pub const WALL: u8 = 0;

/// Raster under construction: everything free until walls are drawn.
pub struct Canvas {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<u8>,
}

impl Canvas {
    pub fn new(width: usize, height: usize) -> Self {
        Canvas { width, height, cells: vec![FREE; width * height] }
    }

    /// Fills `[x0, x1) × [y0, y1)` with `value`.
    pub fn fill(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, value: u8) -> &mut Self {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.cells[y * self.width + x] = value;
            }
        }
        self
    }

    pub fn frame(&mut self, t: usize) -> &mut Self {
        let (w, h) = (self.width, self.height);
        self.fill(0, 0, w, t, WALL).fill(0, h - t, w, h, WALL).fill(0, 0, t, h, WALL).fill(w - t, 0, w, h, WALL)
    }

    pub fn map(&self) -> GridMap {
        GridMap::new(self.width, self.height, RES, self.cells.clone()).unwrap()
    }
}

/// Two rooms above one corridor; 0.9 m doors, 2.0 m corridor, 0.05 m/px.
///
/// ```text
///  x:  0   4        98 102        196 200
///      +---+---------+--+----------+---+  y 0
///      |   room A    |  |  room B      |
///      +-----[door]------------[door]--+  y 100..106
///      |          corridor             |  y 106..146
///      +-------------------------------+  y 150
/// ```
pub struct TwoRooms {
    pub map: GridMap,
    /// 1 = room A, 2 = room B, 3 = corridor, 0 elsewhere.
    pub truth: Vec<u32>,
}

pub const DOOR_WIDTH: f64 = 0.9;
pub const CORRIDOR_WIDTH: f64 = 2.0;

pub fn two_rooms() -> TwoRooms {
    let (w, h) = (200, 150);
    let mut c = Canvas::new(w, h);
    c.frame(4);
    c.fill(98, 4, 102, 100, WALL);
    c.fill(0, 100, w, 106, WALL);
    c.fill(40, 100, 58, 106, FREE);
    c.fill(140, 100, 158, 106, FREE);
    let mut truth = vec![0u32; w * h];
    let mut label = |x0: usize, y0: usize, x1: usize, y1: usize, l: u32| {
        for y in y0..y1 {
            for x in x0..x1 {
                truth[y * w + x] = l;
            }
        }
    };
    label(4, 4, 98, 100, 1);
    label(102, 4, 196, 100, 2);
    label(4, 106, 196, 146, 3);
    TwoRooms { map: c.map(), truth }
}

/// Perfect maze of `n`×`n` cells carved with a seeded depth-first search.
/// Corridors are `corridor` px wide, walls `wall` px thick.
pub fn maze(n: usize, corridor: usize, wall: usize, seed: u64) -> GridMap {
    let pitch = corridor + wall;
    let size = n * pitch + wall;
    let mut c = Canvas::new(size, size);
    c.fill(0, 0, size, size, WALL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![false; n * n];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    let open = |c: &mut Canvas, x: usize, y: usize| {
        let (px, py) = (wall + x * pitch, wall + y * pitch);
        c.fill(px, py, px + corridor, py + corridor, FREE);
    };
    open(&mut c, 0, 0);
    while let Some(&(x, y)) = stack.last() {
        let mut next: Vec<(usize, usize)> = [(0i64, -1i64), (1, 0), (0, 1), (-1, 0)]
            .iter()
            .map(|&(dx, dy)| (x as i64 + dx, y as i64 + dy))
            .filter(|&(nx, ny)| nx >= 0 && ny >= 0 && (nx as usize) < n && (ny as usize) < n)
            .map(|(nx, ny)| (nx as usize, ny as usize))
            .filter(|&(nx, ny)| !seen[ny * n + nx])
            .collect();
        if next.is_empty() {
            stack.pop();
            continue;
        }
        next.shuffle(&mut rng);
        let (nx, ny) = next[0];
        seen[ny * n + nx] = true;
        open(&mut c, nx, ny);
        // knock down the wall between the two cells
        let (px, py) = (wall + x.min(nx) * pitch, wall + y.min(ny) * pitch);
        if nx != x {
            c.fill(px + corridor, py, px + pitch, py + corridor, FREE);
        } else {
            c.fill(px, py + corridor, px + corridor, py + pitch, FREE);
        }
        stack.push((nx, ny));
    }
    c.map()
}

/// Writes `map` as an 8-bit PNG.
pub fn save_png(map: &GridMap, path: &std::path::Path) {
    let mut img = image::GrayImage::new(map.width() as u32, map.height() as u32);
    for y in 0..map.height() {
        for x in 0..map.width() {
            img.put_pixel(x as u32, y as u32, image::Luma([map.intensity(x, y)]));
        }
    }
    img.save(path).unwrap();
}

/// Writes a label raster as a 16-bit PNG.
pub fn save_labels(width: usize, height: usize, labels: &[u32], path: &std::path::Path) {
    let data: Vec<u16> = labels.iter().map(|&l| l as u16).collect();
    let img: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
        image::ImageBuffer::from_raw(width as u32, height as u32, data).unwrap();
    img.save(path).unwrap();
}

/// Random floor plan: a horizontal corridor with rooms above and below,
/// each room with one door onto the corridor.
pub fn random_floor(seed: u64) -> GridMap {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = 3;
    let (w, h) = (rng.gen_range(160..=240), rng.gen_range(130..=190));
    let mut c = Canvas::new(w, h);
    c.frame(t);
    let cw = rng.gen_range(26..=40);
    let cy = rng.gen_range(h / 3..h - h / 3 - cw / 2);
    let (top, bottom) = (cy, cy + cw);
    c.fill(0, top - t, w, top, WALL);
    c.fill(0, bottom, w, bottom + t, WALL);
    for (y0, y1, door_y) in [(t, top - t, top - t), (bottom + t, h - t, bottom)] {
        if y1 <= y0 + 20 {
            continue;
        }
        let rooms = rng.gen_range(1..=3);
        let mut cuts: Vec<usize> = (0..rooms - 1).map(|_| rng.gen_range(40..w - 40)).collect();
        cuts.sort();
        cuts.dedup_by(|a, b| a.abs_diff(*b) < 30);
        let mut x0 = t;
        for x in cuts.iter().copied().chain(std::iter::once(w - t)) {
            if x < w - t {
                c.fill(x, y0, x + t, y1, WALL);
            }
            let door = rng.gen_range(14..=19);
            if x > x0 + door + 6 {
                let dx = rng.gen_range(x0 + 3..x - door - 2);
                c.fill(dx, door_y, dx + door, door_y + t, FREE);
            }
            x0 = x + t;
        }
    }
    c.map()
}

/// Closed rectangular compartments with no doors, of random sizes.
pub fn compartments(seed: u64) -> GridMap {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = 3;
    let (w, h) = (rng.gen_range(120..=200), rng.gen_range(100..=160));
    let mut c = Canvas::new(w, h);
    c.frame(t);
    let columns = rng.gen_range(2..=4);
    let mut xs: Vec<usize> = (0..columns - 1).map(|_| rng.gen_range(25..w - 25)).collect();
    xs.sort();
    xs.dedup_by(|a, b| a.abs_diff(*b) < 20);
    let mut x0 = 0;
    for x in xs.iter().copied().chain(std::iter::once(w)) {
        if x < w {
            c.fill(x, 0, x + t, h, WALL);
        }
        if rng.gen_bool(0.6) {
            let y = rng.gen_range(25..h - 25);
            c.fill(x0, y, x, y + t, WALL);
        }
        x0 = x;
    }
    c.map()
}

/// Connected components of equal non-zero labels (4-neighbourhood).
pub fn label_components(width: usize, height: usize, labels: &[u32]) -> usize {
    let mut copy = labels.to_vec();
    relabel_components(width, height, &mut copy)
}

/// Replaces every label by the 1-based index of its connected component
/// (4-neighbourhood, equal labels); returns the component count.
pub fn relabel_components(width: usize, height: usize, labels: &mut [u32]) -> usize {
    let mut out = vec![0u32; labels.len()];
    let mut count = 0;
    for start in 0..labels.len() {
        if out[start] != 0 || labels[start] == 0 {
            continue;
        }
        count += 1;
        out[start] = count as u32;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (x, y) = (i % width, i / width);
            let mut next = Vec::with_capacity(4);
            if x > 0 {
                next.push(i - 1);
            }
            if x + 1 < width {
                next.push(i + 1);
            }
            if y > 0 {
                next.push(i - width);
            }
            if y + 1 < height {
                next.push(i + width);
            }
            for j in next {
                if out[j] == 0 && labels[j] == labels[i] {
                    out[j] = count as u32;
                    stack.push(j);
                }
            }
        }
    }
    labels.copy_from_slice(&out);
    count
}

/// Mean MCC by direct definition: quadratic overlap scans, greedy matching
/// by repeated global maximum, counts by a per-pixel loop.
pub fn brute_force_mcc(seg: &[u32], gt: &[u32]) -> f64 {
    let mut gts: Vec<u32> = gt.iter().copied().filter(|&g| g != 0).collect();
    gts.sort();
    gts.dedup();
    let mut preds: Vec<u32> = gt.iter().zip(seg).filter(|(g, p)| **g != 0 && **p != 0).map(|(_, p)| *p).collect();
    preds.sort();
    preds.dedup();
    let overlap = |g: u32, p: u32| gt.iter().zip(seg).filter(|(a, b)| **a == g && **b == p).count();
    let mut pairing: Vec<(u32, u32)> = Vec::new();
    loop {
        let mut best: Option<(usize, u32, u32)> = None;
        for &g in &gts {
            for &p in &preds {
                if pairing.iter().any(|&(a, b)| a == g || b == p) {
                    continue;
                }
                let o = overlap(g, p);
                if o > 0 && best.is_none_or(|(bo, _, _)| o > bo) {
                    best = Some((o, g, p));
                }
            }
        }
        match best {
            Some((_, g, p)) => pairing.push((g, p)),
            None => break,
        }
    }
    let n = gt.iter().filter(|&&g| g != 0).count() as f64;
    let mut total = 0.0;
    for &g in &gts {
        let p = pairing.iter().find(|&&(a, _)| a == g).map(|&(_, b)| b);
        let (mut tp, mut tn, mut fp, mut fn_) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (&a, &b) in gt.iter().zip(seg) {
            if a == 0 {
                continue;
            }
            match (a == g, p == Some(b)) {
                (true, true) => tp += 1.0,
                (false, false) => tn += 1.0,
                (false, true) => fp += 1.0,
                (true, false) => fn_ += 1.0,
            }
        }
        let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        let m = if den == 0.0 { 0.0 } else { (tp * tn - fp * fn_) / den.sqrt() };
        total += m * (tp + fn_);
    }
    if n == 0.0 {
        0.0
    } else {
        total / n
    }
}
