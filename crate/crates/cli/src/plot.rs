use std::f64::consts::TAU;

/// Graph of a circle map sampled at `(xs, ys)` with both axes on `[0, 2π)`,
/// as a binary PPM: black points on white with a grey diagonal.
pub fn graph_ppm(xs: &[f64], ys: &[f64], px: usize) -> Vec<u8> {
    let mut pix = vec![255u8; 3 * px * px];
    let cell = |v: f64| ((v / TAU) * px as f64).floor().clamp(0.0, px as f64 - 1.0) as usize;
    let mut put = |i: usize, j: usize, c: u8| {
        let k = 3 * ((px - 1 - j) * px + i);
        pix[k..k + 3].fill(c);
    };
    for i in 0..px {
        put(i, i, 200);
    }
    for (&x, &y) in xs.iter().zip(ys) {
        put(cell(x), cell(y), 0);
    }
    let mut out = format!("P6\n{px} {px}\n255\n").into_bytes();
    out.extend_from_slice(&pix);
    out
}
