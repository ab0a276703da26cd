//! Globally adaptive Gauss–Kronrod (7/15) integration over finite segments,
//! plus the window search that turns an integral over the support into one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XK[1], XK[3], XK[5], XK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const INITIAL_PIECES: usize = 16;

/// Number of nats below the integrand's peak at which the window may end.
pub(crate) const WINDOW_DEPTH: f64 = 60.0;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    /// Truncation error estimate `|K - G|`.
    error: f64,
    /// Rounding error of the Kronrod sum.
    rounding: f64,
}

impl Piece {
    fn new(f: &impl Fn(f64) -> (f64, f64), a: f64, b: f64) -> Self {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let (fc, rc) = f(c);
        let mut kronrod = WK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut abs = WK[7] * fc.abs();
        let mut pointwise = WK[7] * rc;
        for j in 0..7 {
            let ((lo, rlo), (hi, rhi)) = (f(c - h * XK[j]), f(c + h * XK[j]));
            kronrod += WK[j] * (lo + hi);
            abs += WK[j] * (lo.abs() + hi.abs());
            pointwise += WK[j] * (rlo + rhi);
            if j % 2 == 1 {
                gauss += WG[j / 2] * (lo + hi);
            }
        }
        Piece {
            a,
            b,
            value: kronrod * h,
            error: ((kronrod - gauss) * h).abs(),
            rounding: (50.0 * f64::EPSILON * abs + pointwise) * h.abs(),
        }
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over the union of `segments`, bisecting the piece with the
/// largest error until the total truncation error meets
/// `max(abs_tol, rel_tol·|I|)`.
///
/// `f(x)` returns the integrand and a bound on its rounding error at `x`;
/// the reported error adds the integrated rounding bound.
pub(crate) fn integrate(
    f: impl Fn(f64) -> (f64, f64),
    segments: &[(f64, f64)],
    abs_tol: f64,
    rel_tol: f64,
    max_pieces: usize,
) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    for &(a, b) in segments {
        let w = (b - a) / INITIAL_PIECES as f64;
        for i in 0..INITIAL_PIECES {
            let lo = a + w * i as f64;
            let hi = if i + 1 == INITIAL_PIECES { b } else { lo + w };
            heap.push(Piece::new(&f, lo, hi));
        }
    }
    loop {
        let (value, error, rounding) = totals(&heap);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence("integrand is not finite on the window".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral { value, error: error + rounding });
        }
        if heap.len() >= max_pieces {
            return Err(Error::NonConvergence(format!(
                "quadrature error {error:.3e} above tolerance after {max_pieces} subdivisions"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence("quadrature piece cannot be bisected further".into()));
        }
        heap.push(Piece::new(&f, worst.a, mid));
        heap.push(Piece::new(&f, mid, worst.b));
    }
}

fn totals(heap: &BinaryHeap<Piece>) -> (f64, f64, f64) {
    let mut value = crate::numeric::CompensatedSum::new();
    let (mut error, mut rounding) = (0.0, 0.0);
    for p in heap.iter() {
        value.add(p.value);
        error += p.error;
        rounding += p.rounding;
    }
    (value.value(), error, rounding)
}

/// A finite integration window `[lo, hi]`; `lo_open`/`hi_open` mark the ends
/// that truncate the support (and may need widening).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Window {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Window {
    pub(crate) fn union(self, other: Window) -> Window {
        Window {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            lo_open: self.lo_open || other.lo_open,
            hi_open: self.hi_open || other.hi_open,
        }
    }
}

const GRID: usize = 512;
const MAX_WIDENINGS: usize = 64;

/// Widens the open ends of `w` until `log_f` at each open end (and further
/// out) sits at least [`WINDOW_DEPTH`] nats below its peak on the window.
/// Returns the widened window and a bound on the mass left outside it.
pub(crate) fn settle_window(log_f: impl Fn(f64) -> f64, mut w: Window) -> Result<(Window, f64)> {
    for _ in 0..MAX_WIDENINGS {
        let width = w.hi - w.lo;
        let peak = (0..=GRID)
            .map(|i| log_f(w.lo + width * i as f64 / GRID as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        if peak.is_nan() || peak == f64::INFINITY {
            return Err(Error::NonConvergence("integrand is not finite on the window".into()));
        }
        if peak == f64::NEG_INFINITY {
            return Ok((w, 0.0));
        }
        let floor = peak - WINDOW_DEPTH;
        let settled = |x: f64, y: f64| {
            let (a, b) = (log_f(x), log_f(y));
            !a.is_nan() && !b.is_nan() && a <= floor && b <= floor
        };
        let lo_ok = !w.lo_open || settled(w.lo, w.lo - 0.5 * width);
        let hi_ok = !w.hi_open || settled(w.hi, w.hi + 0.5 * width);
        if lo_ok && hi_ok {
            let edge = |open: bool, x: f64| if open { log_f(x).exp() } else { 0.0 };
            // The integrand decays past each settled end, so its edge value
            // times one window width bounds each tail.
            let tail = (edge(w.lo_open, w.lo) + edge(w.hi_open, w.hi)) * width;
            return Ok((w, tail));
        }
        if !lo_ok {
            w.lo -= width;
        }
        if !hi_ok {
            w.hi += width;
        }
        if !(w.lo.is_finite() && w.hi.is_finite()) {
            break;
        }
    }
    Err(Error::NonConvergence("integrand does not decay; the integral may diverge".into()))
}
