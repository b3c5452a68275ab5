//! CSV reports and final-state dumps.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::amr::StepStats;
use crate::error::HarnessError;
use crate::harness::convergence::{CaseResult, RunReport};
use crate::mesh::TreeMesh;
use crate::reconstruction::Vars;

pub const ERRORS_HEADER: &str = "k,N0,levels,S_ref,avgN,L1,Linf,EOC";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// One row per run. Wall time is left out so that reruns produce identical
/// files.
pub fn write_errors_csv<'a, W: Write>(reports: impl IntoIterator<Item = &'a RunReport>, mut w: W) -> io::Result<()> {
    writeln!(w, "{ERRORS_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{:e},{:e},{},{},{}",
            r.k,
            r.n0,
            r.levels,
            r.s_ref,
            r.avg_n,
            opt(r.l1),
            opt(r.linf),
            opt(r.eoc)
        )?;
    }
    Ok(())
}

/// `id,level,x[,y],h,u0,u1,...` per leaf.
pub fn write_solution_csv<W: Write>(mesh: &TreeMesh, u: &[Vars], components: usize, mut w: W) -> io::Result<()> {
    let dim = mesh.dim();
    let mut header = String::from("id,level,x");
    if dim == 2 {
        header.push_str(",y");
    }
    header.push_str(",h");
    for c in 0..components {
        header.push_str(&format!(",u{c}"));
    }
    writeln!(w, "{header}")?;
    for id in mesh.leaves() {
        let c = mesh.center(id);
        write!(w, "{},{},{:e}", id.index(), mesh.level(id), c[0])?;
        if dim == 2 {
            write!(w, ",{:e}", c[1])?;
        }
        write!(w, ",{:e}", mesh.size(id))?;
        for v in &u[id.index()][..components] {
            write!(w, ",{v:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_step_log<W: Write>(steps: &[StepStats], mut w: W) -> io::Result<()> {
    writeln!(w, "{}", StepStats::CSV_HEADER)?;
    for s in steps {
        s.write_csv_row(&mut w)?;
    }
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, HarnessError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes `mesh_final.txt`, `solution_final.csv` and `steps.csv` of a run
/// into `dir`.
pub fn write_case(dir: &Path, case: &CaseResult, components: usize) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    if case.report.failure.is_none() {
        let mut w = create(dir, "mesh_final.txt")?;
        case.mesh.write_dump(&mut w)?;
        w.flush()?;
        let mut w = create(dir, "solution_final.csv")?;
        write_solution_csv(&case.mesh, &case.u, components, &mut w)?;
        w.flush()?;
    }
    let mut w = create(dir, "steps.csv")?;
    write_step_log(&case.steps, &mut w)?;
    w.flush()?;
    Ok(())
}

/// `errors.csv` in `dir` plus one subdirectory `k<k>` per run.
pub fn write_sweep(dir: &Path, cases: &[CaseResult], components: usize) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    let mut w = create(dir, "errors.csv")?;
    write_errors_csv(cases.iter().map(|c| &c.report), &mut w)?;
    w.flush()?;
    for c in cases {
        write_case(&dir.join(format!("k{}", c.report.k)), c, components)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Domain;
    use std::time::Duration;

    #[test]
    fn errors_rows() {
        let r = RunReport {
            k: 1,
            n0: 32,
            levels: 3,
            s_ref: 0.005,
            avg_n: 40.5,
            final_n: 41,
            steps: 10,
            t: 0.35,
            l1: Some(1.5e-3),
            linf: None,
            eoc: Some(2.5),
            wall_time: Duration::from_secs(3),
            failure: None,
        };
        let mut buf = Vec::new();
        write_errors_csv([&r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], ERRORS_HEADER);
        let f: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(f.len(), 8);
        assert_eq!(f[..3], ["1", "32", "3"]);
        assert_eq!(f[5].parse::<f64>().unwrap(), 1.5e-3);
        assert_eq!(f[6], "");
        assert_eq!(f[7].parse::<f64>().unwrap(), 2.5);
    }

    #[test]
    fn solution_rows_follow_the_leaves() {
        let mut mesh = TreeMesh::build_uniform(&Domain::rectangle([0.0, 0.0], [1.0, 1.0]), 2, 1).unwrap();
        let id = mesh.leaves()[0];
        mesh.refine(id).unwrap();
        let u: Vec<Vars> = (0..mesh.capacity()).map(|i| [i as f64, 0.5, 0.0, 0.0]).collect();
        let mut buf = Vec::new();
        write_solution_csv(&mesh, &u, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "id,level,x,y,h,u0,u1");
        assert_eq!(text.lines().count(), 1 + mesh.leaf_count());
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 7);
        assert_eq!(row[0].parse::<f64>().unwrap(), row[5].parse::<f64>().unwrap());
    }
}
