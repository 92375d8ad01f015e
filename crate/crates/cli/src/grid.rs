use anyhow::{bail, Context, Result};

const MAX_POINTS: usize = 100_000;

/// Parses `a,b,c`, `start:step:stop` or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("expected start:step:stop, got {text:?}");
        }
        let [start, step, stop] = [parts[0], parts[1], parts[2]].map(parse_number);
        let (start, step, stop) = (start?, step?, stop?);
        if !(step > 0.0) {
            bail!("grid step must be positive, got {step}");
        }
        if stop < start {
            bail!("grid stop {stop} is below start {start}");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > MAX_POINTS {
            bail!("grid {text:?} has {count} points (limit {MAX_POINTS})");
        }
        return Ok((0..count).map(|i| tidy(start + i as f64 * step)).collect());
    }
    text.split(',').map(parse_number).collect()
}

fn parse_number(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("bad number {s:?}"))?;
    if !v.is_finite() {
        bail!("non-finite value {s:?}");
    }
    Ok(v)
}

// Strips accumulated binary noise so `0:0.1:1` prints as 0.3, not 0.30000000000000004.
fn tidy(x: f64) -> f64 {
    let scaled = (x * 1e10).round() / 1e10;
    if scaled == 0.0 {
        0.0
    } else {
        scaled
    }
}
