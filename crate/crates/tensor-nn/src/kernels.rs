//! Hot inner loops shared by the layers.
//!
//! Both helpers fix their floating-point evaluation order: `axpy` is
//! elementwise (order-free), `dot` always combines four fixed lanes plus
//! a tail. Results are therefore identical run to run and do not depend
//! on parallelism above them.

/// `out[i] += a * x[i]`
#[inline]
pub fn axpy(a: f64, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(x.len(), out.len());
    for (o, &v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

/// 4-lane sum.
#[inline]
pub fn sum(x: &[f64]) -> f64 {
    let lanes = x.len() / 4 * 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let mut i = 0;
    while i < lanes {
        s0 += x[i];
        s1 += x[i + 1];
        s2 += x[i + 2];
        s3 += x[i + 3];
        i += 4;
    }
    let mut tail = 0.0;
    for &v in &x[lanes..] {
        tail += v;
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// Row stencil: `out[x] += sum_j taps[j] * pin[x + j]`.
///
/// `pin` must hold at least `out.len() + K - 1` values; callers get that
/// for free by zero-padding their planes. The unrolled tap loop keeps a
/// fixed per-element evaluation order while the compiler vectorizes
/// across `x`.
#[inline]
fn rowconv_add_k<const K: usize>(out: &mut [f64], pin: &[f64], taps: &[f64; K]) {
    let w = out.len();
    let pin = &pin[..w + K - 1];
    for x in 0..w {
        let mut acc = out[x];
        for j in 0..K {
            acc += taps[j] * pin[x + j];
        }
        out[x] = acc;
    }
}

/// Dispatch the row stencil over the kernel widths in use.
#[inline]
pub fn rowconv_add(out: &mut [f64], pin: &[f64], taps: &[f64]) {
    match taps.len() {
        1 => rowconv_add_k::<1>(out, pin, taps.try_into().unwrap()),
        3 => rowconv_add_k::<3>(out, pin, taps.try_into().unwrap()),
        5 => rowconv_add_k::<5>(out, pin, taps.try_into().unwrap()),
        7 => rowconv_add_k::<7>(out, pin, taps.try_into().unwrap()),
        k => {
            for x in 0..out.len() {
                let window = &pin[x..x + k];
                let mut acc = out[x];
                for j in 0..k {
                    acc += taps[j] * window[j];
                }
                out[x] = acc;
            }
        }
    }
}

/// Correlation accumulator: `acc[j] += sum_x g[x] * pin[x + j]`.
///
/// The kernel-gradient inner loop: one pass over the row feeds all `K`
/// tap positions, with `K` independent accumulation chains.
#[inline]
fn corr_acc_k<const K: usize>(g: &[f64], pin: &[f64], acc: &mut [f64; K]) {
    let w = g.len();
    let pin = &pin[..w + K - 1];
    for x in 0..w {
        let gv = g[x];
        for j in 0..K {
            acc[j] += gv * pin[x + j];
        }
    }
}

/// Dispatch the correlation accumulator over the kernel widths in use.
#[inline]
pub fn corr_acc(g: &[f64], pin: &[f64], acc: &mut [f64]) {
    match acc.len() {
        1 => corr_acc_k::<1>(g, pin, acc.try_into().unwrap()),
        3 => corr_acc_k::<3>(g, pin, acc.try_into().unwrap()),
        5 => corr_acc_k::<5>(g, pin, acc.try_into().unwrap()),
        7 => corr_acc_k::<7>(g, pin, acc.try_into().unwrap()),
        k => {
            let pin = &pin[..g.len() + k - 1];
            for (x, &gv) in g.iter().enumerate() {
                for j in 0..k {
                    acc[j] += gv * pin[x + j];
                }
            }
        }
    }
}

/// Dot product with four independent accumulator lanes.
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let lanes = x.len() / 4 * 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let mut i = 0;
    while i < lanes {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
        i += 4;
    }
    let mut tail = 0.0;
    for j in lanes..x.len() {
        tail += x[j] * y[j];
    }
    (s0 + s1) + (s2 + s3) + tail
}
