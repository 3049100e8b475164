//! Stage-two envelopes over a strictly increasing grid.

/// Running maximum from the left.
pub fn running_max(v: &[f64]) -> Vec<f64> {
    let mut acc = f64::NEG_INFINITY;
    v.iter().map(|&x| {
        acc = acc.max(x);
        acc
    })
    .collect()
}

/// Running minimum from the right.
pub fn running_min(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    let mut acc = f64::INFINITY;
    for i in (0..v.len()).rev() {
        acc = acc.min(v[i]);
        out[i] = acc;
    }
    out
}

/// Largest chord of `lower` spanning each grid point, including the point's
/// own value.
///
/// The chord weights are nonnegative, so the result is monotone in `lower`
/// even in floating point.
pub fn concave_lower(x: &[f64], lower: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = lower.to_vec();
    for i in 0..n {
        for k in i + 1..n {
            let span = x[k] - x[i];
            for j in i + 1..k {
                let wl = (x[k] - x[j]) / span;
                let wr = (x[j] - x[i]) / span;
                let chord = wl * lower[i] + wr * lower[k];
                if chord > out[j] {
                    out[j] = chord;
                }
            }
        }
    }
    out
}

/// Smallest extrapolation of lines through an upper value and a lower
/// envelope value on the same side of each grid point, capped by the upper
/// value at the point itself.
///
/// For a target `x_j` and `x_j < y_i < y_k` the line through `(y_i, U_i)` and
/// `(y_k, B_k)` evaluated at `x_j` bounds `g(x_j)` from above; the steepest
/// such line per `i` is tracked with a prefix slope, and symmetrically for
/// `y_k < y_i < x_j`.
pub fn concave_upper(x: &[f64], upper: &[f64], lower_env: &[f64]) -> Vec<f64> {
    let n = x.len();
    // Largest slope to a lower point on the right, smallest slope from a
    // lower point on the left.
    let mut right_slope = vec![f64::NEG_INFINITY; n];
    let mut left_slope = vec![f64::INFINITY; n];
    for i in 0..n {
        for k in i + 1..n {
            right_slope[i] = right_slope[i].max((lower_env[k] - upper[i]) / (x[k] - x[i]));
        }
        for k in 0..i {
            left_slope[i] = left_slope[i].min((upper[i] - lower_env[k]) / (x[i] - x[k]));
        }
    }
    let mut out = upper.to_vec();
    for j in 0..n {
        for i in j + 1..n.saturating_sub(1) {
            let v = upper[i] + (x[j] - x[i]) * right_slope[i];
            if v < out[j] {
                out[j] = v;
            }
        }
        for i in 1..j {
            let v = upper[i] + (x[j] - x[i]) * left_slope[i];
            if v < out[j] {
                out[j] = v;
            }
        }
    }
    out
}
