//! Gnuplot data files and a script that renders them.

use std::fmt::Write as _;
use std::path::Path;

use super::report::{Phase, RoundRow};
use crate::error::Result;

pub const SCRIPT: &str = "plot.gp";

const GNUPLOT: &str = "\
set terminal pngcairo size 900,600
set key top right
set xlabel 'round'

set output 'comparisons.png'
set ylabel 'comparisons'
plot 'comparisons.dat' index 0 using 1:2 with lines title 'training', \\
     '' index 1 using 1:2 with lines title 'limiting', \\
     'baseline.dat' using 1:2 with lines title 'baseline'

set output 'steps.png'
set ylabel 'steps'
plot 'comparisons.dat' index 1 using 1:3 with lines title 'phase 1', \\
     '' index 1 using 1:4 with lines title 'phase 2'

set output 'conflicts.png'
set ylabel 'size'
plot 'conflicts.dat' using 1:2 with lines title 'max bucket', \\
     '' using 1:3 with lines title 'sum of conflicts'

set output 'wall.png'
set ylabel 'ns'
set logscale y
plot 'wall.dat' index 0 using 1:2 with lines title 'training', \\
     '' index 1 using 1:2 with lines title 'limiting'
";

/// Writes `comparisons.dat`, `conflicts.dat`, `wall.dat`, `baseline.dat` and
/// `plot.gp` into `dir`. Two-phase files hold the training block at index 0
/// and the limiting block at index 1.
pub fn write(dir: &Path, rows: &[RoundRow], baseline: &[u64]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut cmp = String::from("# round comparisons steps_phase1 steps_phase2\n");
    let mut wall = String::from("# round wall_ns\n");
    for phase in [Phase::Train, Phase::Limit] {
        for r in rows.iter().filter(|r| r.phase == phase) {
            writeln!(cmp, "{} {} {} {}", r.round, r.comparisons, r.steps_phase1, r.steps_phase2).unwrap();
            writeln!(wall, "{} {}", r.round, r.wall_ns).unwrap();
        }
        cmp.push_str("\n\n");
        wall.push_str("\n\n");
    }
    let mut conf = String::from("# round max_bucket sum_conflicts\n");
    let mut base = String::from("# round baseline\n");
    let limit: Vec<&RoundRow> = rows.iter().filter(|r| r.phase == Phase::Limit).collect();
    for r in &limit {
        writeln!(conf, "{} {} {}", r.round, r.max_bucket, r.sum_conflicts).unwrap();
    }
    for (r, b) in limit.iter().zip(baseline) {
        writeln!(base, "{} {}", r.round, b).unwrap();
    }
    std::fs::write(dir.join("comparisons.dat"), cmp)?;
    std::fs::write(dir.join("wall.dat"), wall)?;
    std::fs::write(dir.join("conflicts.dat"), conf)?;
    std::fs::write(dir.join("baseline.dat"), base)?;
    std::fs::write(dir.join(SCRIPT), GNUPLOT)?;
    Ok(())
}
