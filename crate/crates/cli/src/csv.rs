//! Long-format trajectory files: header `t,x,value`, one row per sample,
//! time-major, 17 significant digits, LF line endings.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use iss_certify::Trajectory;

use crate::error::CliError;

pub fn write_trajectory<W: Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    out.write_all(b"t,x,value\n")?;
    let xs = traj.grid.xs();
    for (n, row) in traj.values.iter().enumerate() {
        let t = traj.grid.t(n);
        for (x, v) in xs.iter().zip(row) {
            writeln!(out, "{t:.16e},{x:.16e},{v:.16e}")?;
        }
    }
    Ok(())
}

pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_trajectory(traj, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Reads back `(t, x, value)` rows.
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<[f64; 3]>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if i == 0 {
            if line != "t,x,value" {
                return Err(CliError::Usage(format!("{}: unexpected header {line:?}", path.display())));
            }
            continue;
        }
        let mut row = [0.0; 3];
        let mut fields = line.split(',');
        for slot in row.iter_mut() {
            *slot = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Usage(format!("{}: bad row {}", path.display(), i + 1)))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use iss_certify::{Grid, VariableTag};

    #[test]
    fn zero_trajectory_rows() {
        let grid = Grid { nx: 2, nt: 1, t_final: 1.0 };
        let traj = Trajectory::zeros(grid, VariableTag::U);
        let mut buf = Vec::new();
        write_trajectory(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "t,x,value");
        assert_eq!(lines.len(), 1 + 4 + 1);
        assert!(lines[1..5].iter().all(|l| l.ends_with(",0.0000000000000000e0")));
        assert!(!text.contains('\r'));
    }
}
