use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Budget, MatingModel, PointClass};
use crate::moebius::SpherePoint;

/// Square pixel grid: pixel `(i, j)` (column, row from the top) sits at
/// `center + radius·((2i + 1)/px − 1, 1 − (2j + 1)/px)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex<f64>,
    pub radius: f64,
    pub px: usize,
}

impl GridSpec {
    pub fn new(center: Complex<f64>, radius: f64, px: usize) -> Self {
        assert!(radius > 0.0 && px > 0, "grid needs a positive radius and pixel count");
        Self { center, radius, px }
    }

    pub fn point(&self, i: usize, j: usize) -> Complex<f64> {
        let n = self.px as f64;
        let x = (2 * i + 1) as f64 / n - 1.0;
        let y = 1.0 - (2 * j + 1) as f64 / n;
        self.center + Complex::new(x, y) * self.radius
    }

    /// Pixel containing `z`, if inside the window.
    pub fn nearest(&self, z: Complex<f64>) -> Option<(usize, usize)> {
        let u = (z - self.center) / self.radius;
        let n = self.px as f64;
        let i = ((u.re + 1.0) * n / 2.0).floor();
        let j = ((1.0 - u.im) * n / 2.0).floor();
        if !(0.0..n).contains(&i) || !(0.0..n).contains(&j) {
            return None;
        }
        Some((i as usize, j as usize))
    }

    /// Centered at the origin, so that `η` maps the window partly onto itself.
    pub fn is_eta_symmetric(&self) -> bool {
        self.center == Complex::new(0.0, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum PixelCode {
    NotAttracted = 0,
    Attracted = 1,
    AttractedBackward = 2,
    BudgetExhausted = 3,
    NoAttractor = 4,
    /// Parameter plane: attractor present, no moving critical point attracted.
    Structured = 5,
    /// Parameter plane: some moving critical point attracted.
    CriticalAttracted = 6,
}

impl PixelCode {
    fn rgb(self, depth: u16) -> [u8; 3] {
        let shade = 255 - (depth.min(40) as u32 * 5) as u8;
        match self {
            PixelCode::NotAttracted => [0, 0, 0],
            PixelCode::Attracted => [40, 90, shade],
            PixelCode::AttractedBackward => [shade, 120, 30],
            PixelCode::BudgetExhausted => [128, 128, 128],
            PixelCode::NoAttractor => [200, 0, 200],
            PixelCode::Structured => [255, 255, 255],
            PixelCode::CriticalAttracted => [20, 40, shade / 2],
        }
    }

    fn is_attracted(self) -> bool {
        matches!(self, PixelCode::Attracted | PixelCode::AttractedBackward)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ImageKind {
    Dynamical { c: Complex<f64> },
    Parameter,
}

/// Per-pixel classification, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneImage {
    pub grid: GridSpec,
    pub kind: ImageKind,
    pub budget: Budget,
    pub seed: u64,
    pub codes: Vec<PixelCode>,
    pub depths: Vec<u16>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Pixels whose `η`-image falls inside the window.
    pub compared: usize,
    /// Compared pixels with no matching pixel among the 3×3 block around the
    /// nearest pixel of the `η`-image.
    pub defective: usize,
    pub fraction: f64,
}

/// Bounding box of pixel centres, in the plane's coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Some pixel of the set lies in the outermost row or column.
    pub touches_border: bool,
}

impl PlaneImage {
    pub fn code(&self, i: usize, j: usize) -> PixelCode {
        self.codes[j * self.grid.px + i]
    }

    pub fn count(&self, code: PixelCode) -> usize {
        self.codes.iter().filter(|&&c| c == code).count()
    }

    /// Binary PPM with max value 255.
    pub fn to_ppm(&self) -> Vec<u8> {
        let px = self.grid.px;
        let mut out = format!("P6\n{px} {px}\n255\n").into_bytes();
        out.reserve(3 * px * px);
        for (c, d) in self.codes.iter().zip(&self.depths) {
            out.extend_from_slice(&c.rgb(*d));
        }
        out
    }

    /// SHA-256 of the PPM encoding, hex.
    pub fn content_hash(&self) -> String {
        sha256_hex(&self.to_ppm())
    }

    /// Compares each pixel with the pixel nearest its `η`-image, allowing one
    /// pixel of aliasing. `None` unless the grid is `η`-symmetric.
    pub fn symmetry_defect(&self) -> Option<SymmetryReport> {
        if !self.grid.is_eta_symmetric() {
            return None;
        }
        let px = self.grid.px;
        let (mut compared, mut defective) = (0, 0);
        for j in 0..px {
            for i in 0..px {
                let z = self.grid.point(i, j);
                let Some((bi, bj)) = self.grid.nearest(Complex::new(1.0, 0.0) / z) else { continue };
                compared += 1;
                let mine = self.code(i, j).is_attracted();
                let matched = (bj.saturating_sub(1)..=(bj + 1).min(px - 1))
                    .any(|y| (bi.saturating_sub(1)..=(bi + 1).min(px - 1)).any(|x| self.code(x, y).is_attracted() == mine));
                if !matched {
                    defective += 1;
                }
            }
        }
        let fraction = if compared == 0 { 0.0 } else { defective as f64 / compared as f64 };
        Some(SymmetryReport { compared, defective, fraction })
    }

    /// Bounding box of the pixels carrying `code`.
    pub fn bounding_box(&self, code: PixelCode) -> Option<BoundingBox> {
        let px = self.grid.px;
        let mut bbox: Option<BoundingBox> = None;
        for j in 0..px {
            for i in 0..px {
                if self.code(i, j) != code {
                    continue;
                }
                let z = self.grid.point(i, j);
                let border = i == 0 || j == 0 || i + 1 == px || j + 1 == px;
                let b = bbox.get_or_insert(BoundingBox {
                    re_min: z.re,
                    re_max: z.re,
                    im_min: z.im,
                    im_max: z.im,
                    touches_border: false,
                });
                b.re_min = b.re_min.min(z.re);
                b.re_max = b.re_max.max(z.re);
                b.im_min = b.im_min.min(z.im);
                b.im_max = b.im_max.max(z.im);
                b.touches_border |= border;
            }
        }
        bbox
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn depth_u16(d: usize) -> u16 {
    d.min(u16::MAX as usize) as u16
}

/// Classifies every pixel of the dynamical plane of `R_c`. Without an
/// attractor every pixel is [`PixelCode::NoAttractor`].
pub fn render_dynamical_plane(c: Complex<f64>, grid: GridSpec, budget: Budget) -> PlaneImage {
    let model = MatingModel::family(c, budget).ok();
    let px = grid.px;
    let pixels: Vec<(PixelCode, u16)> = (0..px * px)
        .into_par_iter()
        .map(|k| {
            let Some(m) = model.as_ref().filter(|m| m.attractor.is_some()) else {
                return (PixelCode::NoAttractor, 0);
            };
            let z = SpherePoint::finite(grid.point(k % px, k / px));
            match m.classify(&z).expect("attractor present") {
                PointClass::Attracted { depth, backward: false } => (PixelCode::Attracted, depth_u16(depth)),
                PointClass::Attracted { depth, backward: true } => (PixelCode::AttractedBackward, depth_u16(depth)),
                PointClass::NotAttracted => (PixelCode::NotAttracted, 0),
                PointClass::BudgetExhausted => (PixelCode::BudgetExhausted, 0),
            }
        })
        .collect();
    let (codes, depths) = pixels.into_iter().unzip();
    PlaneImage { grid, kind: ImageKind::Dynamical { c }, budget, seed: 0, codes, depths }
}

/// Classifies each parameter `c` by whether `R_c` has an attractor and
/// whether any moving critical point is attracted. The structured set is
/// [`PixelCode::Structured`].
pub fn render_parameter_plane(grid: GridSpec, budget: Budget) -> PlaneImage {
    let px = grid.px;
    let pixels: Vec<(PixelCode, u16)> = (0..px * px)
        .into_par_iter()
        .map(|k| classify_parameter(grid.point(k % px, k / px), budget))
        .collect();
    let (codes, depths) = pixels.into_iter().unzip();
    PlaneImage { grid, kind: ImageKind::Parameter, budget, seed: 0, codes, depths }
}

fn classify_parameter(c: Complex<f64>, budget: Budget) -> (PixelCode, u16) {
    let Ok(m) = MatingModel::family(c, budget) else {
        return (PixelCode::NoAttractor, 0);
    };
    if m.attractor.is_none() {
        return (PixelCode::NoAttractor, 0);
    }
    let Ok(crit) = m.moving_critical_points() else {
        return (PixelCode::NoAttractor, 0);
    };
    let mut exhausted = false;
    let mut first: Option<usize> = None;
    for p in &crit {
        match m.classify(p).expect("attractor present") {
            PointClass::Attracted { depth, .. } => first = Some(first.map_or(depth, |f| f.min(depth))),
            PointClass::BudgetExhausted => exhausted = true,
            PointClass::NotAttracted => {}
        }
    }
    match (first, exhausted) {
        (Some(d), _) => (PixelCode::CriticalAttracted, depth_u16(d)),
        (None, true) => (PixelCode::BudgetExhausted, 0),
        (None, false) => (PixelCode::Structured, 0),
    }
}
