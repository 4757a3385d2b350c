use anyhow::{bail, Result};

use crate::output::{Format, Report, Table};

#[allow(dead_code)]
#[path = "../../core/tests/criteria/mod.rs"]
mod criteria;

/// `which` is a criterion number 1-11 or `all`.
pub fn acceptance(which: &str) -> Result<Report> {
    let total = criteria::CRITERIA.len();
    let numbers: Vec<usize> = if which == "all" {
        (1..=total).collect()
    } else {
        match which.parse::<usize>() {
            Ok(n) if (1..=total).contains(&n) => vec![n],
            _ => bail!("--criterion must be 1..={total} or all, got {which:?}"),
        }
    };
    let mut r = Report::new("acceptance", Format::Csv);
    r.param("criterion", which);
    let mut t = Table::new(&["criterion", "name", "passed", "detail", "seconds"]);
    let mut failed = 0usize;
    for n in numbers {
        let run = criteria::run(n);
        if !run.outcome.ok {
            failed += 1;
            r.violate(format!("criterion {n} failed: {}", run.outcome.detail));
        }
        t.push(vec![
            n.into(),
            run.name.into(),
            run.outcome.ok.into(),
            run.outcome.detail.into(),
            run.seconds.into(),
        ]);
    }
    r.sum("run", t.rows.len()).sum("failed", failed);
    r.table = Some(t);
    Ok(r)
}
