//! Flag parsers for grids and lists.

/// Evaluation grid (newtype so clap treats one flag as one list).
#[derive(Clone, Debug)]
pub struct Grid(pub Vec<f64>);

/// Comma list of flow parameters.
#[derive(Clone, Debug)]
pub struct TList(pub Vec<f64>);

/// Inclusive coefficient index range.
#[derive(Clone, Copy, Debug)]
pub struct KRange(pub usize, pub usize);

/// `lo:hi:count`, inclusive of both endpoints, exactly `count` points.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("expected lo:hi:count, got '{s}'"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad grid start '{lo}'"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad grid end '{hi}'"))?;
    let count: usize = count
        .parse()
        .map_err(|_| format!("bad grid count '{count}'"))?;
    if count == 0 {
        return Err("grid count must be at least 1".to_string());
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(format!("grid range must be ordered, got {lo}:{hi}"));
    }
    if count == 1 {
        return Ok(Grid(vec![lo]));
    }
    Ok(Grid(
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    ))
}

/// Single value or comma list.
pub fn parse_t_list(s: &str) -> Result<TList, String> {
    let values: Result<Vec<f64>, _> = s.split(',').map(str::trim).map(str::parse).collect();
    let values = values.map_err(|_| format!("bad t list '{s}'"))?;
    if values.is_empty() {
        return Err("t list must not be empty".to_string());
    }
    Ok(TList(values))
}

/// `lo:hi` inclusive integer range.
pub fn parse_krange(s: &str) -> Result<KRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi] = parts.as_slice() else {
        return Err(format!("expected lo:hi, got '{s}'"));
    };
    let lo: usize = lo.parse().map_err(|_| format!("bad k start '{lo}'"))?;
    let hi: usize = hi.parse().map_err(|_| format!("bad k end '{hi}'"))?;
    if lo == 0 || hi < lo {
        return Err(format!("k range must be ordered and positive, got {lo}:{hi}"));
    }
    Ok(KRange(lo, hi))
}
