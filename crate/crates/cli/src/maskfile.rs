//! Plain-text mask export.
//!
//! ```text
//! rarebasis-mask 1
//! dims 16 16
//! frames 0:4 0:4
//! runs 2
//! 0 3
//! 16 3
//! ```
//!
//! `frames` lists `fine:coarse` exponents per axis; each run line is
//! `start length` over the row-major cell index (last axis fastest).

use rarebasis_core::oracle::GridMask;
use rarebasis_core::AxisFrame;

use crate::CliError;

const MAGIC: &str = "rarebasis-mask 1";

pub fn write_mask(mask: &GridMask) -> String {
    let runs = mask.runs();
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let dims: Vec<String> = mask.dims().iter().map(u64::to_string).collect();
    out.push_str(&format!("dims {}\n", dims.join(" ")));
    let frames: Vec<String> = mask.frames().iter().map(|f| format!("{}:{}", f.fine_exp(), f.coarse_exp())).collect();
    out.push_str(&format!("frames {}\n", frames.join(" ")));
    out.push_str(&format!("runs {}\n", runs.len()));
    for (a, b) in runs {
        out.push_str(&format!("{a} {}\n", b - a));
    }
    out
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

pub fn read_mask(text: &str, guard: u64) -> Result<GridMask, CliError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing mask header"));
    }
    let field = |line: Option<&str>, key: &str| -> Result<Vec<String>, CliError> {
        let line = line.ok_or_else(|| bad(format!("missing {key} line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(bad(format!("expected {key} line, found {line:?}")));
        }
        Ok(parts.map(str::to_string).collect())
    };
    let dims: Vec<u64> = field(lines.next(), "dims")?
        .iter()
        .map(|d| d.parse().map_err(|_| bad(format!("bad dimension {d:?}"))))
        .collect::<Result<_, _>>()?;
    let frames: Vec<AxisFrame> = field(lines.next(), "frames")?
        .iter()
        .map(|f| {
            let (a, b) = f.split_once(':').ok_or_else(|| bad(format!("bad frame {f:?}")))?;
            let a = a.parse().map_err(|_| bad(format!("bad frame {f:?}")))?;
            let b = b.parse().map_err(|_| bad(format!("bad frame {f:?}")))?;
            Ok(AxisFrame::new(a, b)?)
        })
        .collect::<Result<_, CliError>>()?;
    if frames.iter().map(AxisFrame::cell_count).collect::<Vec<_>>() != dims {
        return Err(bad("dims do not match frames"));
    }
    let count: usize = field(lines.next(), "runs")?
        .first()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| bad("bad run count"))?;
    let mut runs = Vec::with_capacity(count);
    for _ in 0..count {
        let line = lines.next().ok_or_else(|| bad("fewer runs than announced"))?;
        let (a, len) = line.split_once(' ').ok_or_else(|| bad(format!("bad run {line:?}")))?;
        let a: u64 = a.trim().parse().map_err(|_| bad(format!("bad run {line:?}")))?;
        let len: u64 = len.trim().parse().map_err(|_| bad(format!("bad run {line:?}")))?;
        runs.push((a, a + len));
    }
    if lines.next().is_some() {
        return Err(bad("trailing data after runs"));
    }
    Ok(GridMask::from_runs(frames, &runs, guard)?)
}
