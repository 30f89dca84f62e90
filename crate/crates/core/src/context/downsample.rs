use crate::trial_io::ContextFrame;

/// Rolling mode of `values`, ties going to the value seen most recently.
pub fn window_mode(values: &[u8]) -> u8 {
    let mut counts = [0usize; 256];
    let mut last_seen = [0usize; 256];
    for (i, &v) in values.iter().enumerate() {
        counts[v as usize] += 1;
        last_seen[v as usize] = i;
    }
    (0..=255u8)
        .filter(|&v| counts[v as usize] > 0)
        .max_by_key(|&v| (counts[v as usize], last_seen[v as usize]))
        .unwrap_or(0)
}

/// Reduces a native-rate series to one sample per `stride` frames.
///
/// Output sample `k` covers the `window` frames ending at frame
/// `min((k + 1) * stride, n) - 1` (clipped at the start of the series) and
/// takes the per-variable mode over them. Output length is `ceil(n / stride)`.
pub fn downsample(frames: &[ContextFrame], window: usize, stride: usize) -> Vec<ContextFrame> {
    assert!(window >= 1 && stride >= 1, "window and stride must be positive");
    let n = frames.len();
    let mut out = Vec::with_capacity(n.div_ceil(stride));
    let mut column = Vec::with_capacity(window);
    for k in 0..n.div_ceil(stride) {
        let end = ((k + 1) * stride).min(n);
        let start = end.saturating_sub(window);
        let mut values = [0u8; 5];
        for (var, slot) in values.iter_mut().enumerate() {
            column.clear();
            column.extend(frames[start..end].iter().map(|f| f.values[var]));
            *slot = window_mode(&column);
        }
        out.push(ContextFrame::new(k, values));
    }
    out
}
