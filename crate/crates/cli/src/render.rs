//! Escape-time rendering with traced-ray overlays, written as binary PPM.
//!
//! Rendering is a pure function of the spec: identical specs produce
//! byte-identical files. Pixels are computed in parallel but assembled by
//! index, so scheduling cannot change the output.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use externray_core::numerics::{Plane, RayTrace};
use externray_core::Angle;

/// Which set is drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum PlaneSpec {
    Mandelbrot,
    Julia(Complex64),
}

/// A deterministic rendering request.
#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub plane: PlaneSpec,
    /// Center of the viewport in the complex plane.
    pub center: Complex64,
    /// Real-axis span of the viewport.
    pub width: f64,
    /// Pixel dimensions `(width, height)`.
    pub pixels: (u32, u32),
    pub max_iterations: u32,
    pub escape_radius: f64,
    /// Rays to trace and draw on top.
    pub overlays: Vec<Angle>,
}

/// Pixels beyond this are refused (resource cap).
pub const MAX_PIXELS: u64 = 1 << 26;

impl RenderSpec {
    pub fn validate(&self) -> Result<(), String> {
        let (w, h) = self.pixels;
        if w == 0 || h == 0 {
            return Err("pixel dimensions must be positive".into());
        }
        if (w as u64) * (h as u64) > MAX_PIXELS {
            return Err(format!("pixel count exceeds cap of {MAX_PIXELS}"));
        }
        if self.width.is_nan() || self.width <= 0.0 {
            return Err("viewport width must be positive".into());
        }
        if self.escape_radius.is_nan() || self.escape_radius < 2.0 {
            return Err("escape radius must be at least 2".into());
        }
        if self.max_iterations == 0 {
            return Err("max iterations must be positive".into());
        }
        Ok(())
    }

    /// Complex coordinate of a (sub)pixel center.
    fn pixel_to_point(&self, i: f64, j: f64) -> Complex64 {
        let (w, h) = self.pixels;
        let scale = self.width / w as f64;
        Complex64::new(
            self.center.re + (i + 0.5 - w as f64 / 2.0) * scale,
            self.center.im + (h as f64 / 2.0 - j - 0.5) * scale,
        )
    }

    /// Pixel coordinate of a complex point (unclamped).
    fn point_to_pixel(&self, z: Complex64) -> (f64, f64) {
        let (w, h) = self.pixels;
        let scale = self.width / w as f64;
        (
            (z.re - self.center.re) / scale + w as f64 / 2.0 - 0.5,
            h as f64 / 2.0 - (z.im - self.center.im) / scale - 0.5,
        )
    }
}

/// Row-major 8-bit RGB image.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32) -> Image {
        Image { width, height, data: vec![0; 3 * width as usize * height as usize] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: (u8, u8, u8)) {
        let idx = 3 * (y as usize * self.width as usize + x as usize);
        self.data[idx] = rgb.0;
        self.data[idx + 1] = rgb.1;
        self.data[idx + 2] = rgb.2;
    }

    pub fn pixel(&self, x: u32, y: u32) -> (u8, u8, u8) {
        let idx = 3 * (y as usize * self.width as usize + x as usize);
        (self.data[idx], self.data[idx + 1], self.data[idx + 2])
    }
}

/// Escape iteration count, `None` when the orbit survives the budget.
fn escape_count(z0: Complex64, c: Complex64, max_iterations: u32, radius: f64) -> Option<u32> {
    let r2 = radius * radius;
    let mut z = z0;
    for it in 0..max_iterations {
        if z.norm_sqr() > r2 {
            return Some(it);
        }
        z = z * z + c;
    }
    None
}

/// Renders the escape-time picture: logarithmic grayscale on the iteration
/// count (white far out, darker toward the set), interior black.
pub fn render(spec: &RenderSpec) -> Result<Image, String> {
    spec.validate()?;
    let (w, h) = spec.pixels;
    let denom = (1.0 + spec.max_iterations as f64).ln();
    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|j| {
            let mut row = Vec::with_capacity(3 * w as usize);
            for i in 0..w {
                let point = spec.pixel_to_point(i as f64, j as f64);
                let (z0, c) = match spec.plane {
                    PlaneSpec::Mandelbrot => (Complex64::new(0.0, 0.0), point),
                    PlaneSpec::Julia(c) => (point, c),
                };
                let shade =
                    match escape_count(z0, c, spec.max_iterations, spec.escape_radius) {
                        Some(it) => {
                            255 - (230.0 * (1.0 + it as f64).ln() / denom) as u8
                        }
                        None => 0,
                    };
                row.extend_from_slice(&[shade, shade, shade]);
            }
            row
        })
        .collect();
    let mut img = Image::new(w, h);
    img.data = rows.concat();
    Ok(img)
}

const RAY_COLOR: (u8, u8, u8) = (225, 30, 30);
const MARKER_COLOR: (u8, u8, u8) = (30, 30, 225);

/// Draws a traced ray as a polyline, marking the landing point. Only the
/// stroked pixels change; segments outside the viewport are clipped. A trace
/// from the wrong plane leaves the image untouched.
pub fn overlay_trace(mut img: Image, spec: &RenderSpec, trace: &RayTrace) -> Image {
    let matches = match (&spec.plane, &trace.plane) {
        (PlaneSpec::Mandelbrot, Plane::Parameter) => true,
        (PlaneSpec::Julia(c), Plane::Dynamic(tc)) => (c - tc).norm() < 1e-12,
        _ => false,
    };
    if !matches {
        return img;
    }
    for pair in trace.points.windows(2) {
        let a = spec.point_to_pixel(pair[0].1);
        let b = spec.point_to_pixel(pair[1].1);
        draw_segment(&mut img, a, b, RAY_COLOR);
    }
    if let Some(land) = trace.landing {
        let (x, y) = spec.point_to_pixel(land);
        let (xi, yi) = (x.round() as i64, y.round() as i64);
        for d in -2i64..=2 {
            plot(&mut img, xi + d, yi, MARKER_COLOR);
            plot(&mut img, xi, yi + d, MARKER_COLOR);
        }
    }
    img
}

fn plot(img: &mut Image, x: i64, y: i64, color: (u8, u8, u8)) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.set_pixel(x as u32, y as u32, color);
    }
}

/// Liang–Barsky clip to the pixel rectangle, then an integer Bresenham walk.
fn draw_segment(img: &mut Image, a: (f64, f64), b: (f64, f64), color: (u8, u8, u8)) {
    if !(a.0.is_finite() && a.1.is_finite() && b.0.is_finite() && b.1.is_finite()) {
        return;
    }
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-dx, a.0 - (-0.5)),
        (dx, (w - 0.5) - a.0),
        (-dy, a.1 - (-0.5)),
        (dy, (h - 0.5) - a.1),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                if r > t1 {
                    return;
                }
                t0 = t0.max(r);
            } else {
                if r < t0 {
                    return;
                }
                t1 = t1.min(r);
            }
        }
    }
    let start = (a.0 + t0 * dx, a.1 + t0 * dy);
    let end = (a.0 + t1 * dx, a.1 + t1 * dy);
    let (mut x0, mut y0) = (start.0.round() as i64, start.1.round() as i64);
    let (x1, y1) = (end.0.round() as i64, end.1.round() as i64);
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let mut err = dx + dy;
    loop {
        plot(img, x0, y0, color);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

/// Writes binary PPM (`P6`, maxval 255), bit-exact for a given image.
pub fn write_image(img: &Image, path: &Path) -> Result<(), String> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    file.write_all(header.as_bytes())
        .and_then(|_| file.write_all(img.data()))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}
