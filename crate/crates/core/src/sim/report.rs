use std::fmt::Write as _;

use super::{RoundReport, SweepPoint};

/// Per-column means; `round` is unused and `draws` holds the total.
pub fn mean_report(reports: &[RoundReport]) -> RoundReport {
    let k = reports.len().max(1) as f64;
    let r_mc = if reports.iter().all(|r| r.r_mc.is_some()) && !reports.is_empty() {
        Some(reports.iter().filter_map(|r| r.r_mc).sum::<f64>() / k)
    } else {
        None
    };
    RoundReport {
        round: 0,
        r_mr: reports.iter().map(|r| r.r_mr).sum::<f64>() / k,
        r_mc,
        avg_bandwidth: reports.iter().map(|r| r.avg_bandwidth).sum::<f64>() / k,
        draws: reports.iter().map(|r| r.draws).sum(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Header `round,r_mr,r_mc,avg_bandwidth,draws`, one row per round, then a
/// `mean` row. `r_mc` is blank for selection rounds.
pub fn rounds_csv(reports: &[RoundReport]) -> String {
    let mut out = String::from("round,r_mr,r_mc,avg_bandwidth,draws\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{},{},{}", r.round, r.r_mr, opt(r.r_mc), r.avg_bandwidth, r.draws);
    }
    let m = mean_report(reports);
    let _ = writeln!(out, "mean,{},{},{},{}", m.r_mr, opt(m.r_mc), m.avg_bandwidth, m.draws);
    out
}

/// Distinct sorted values with the share of samples at or below each.
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut steps: Vec<(f64, f64)> = Vec::new();
    for (k, v) in sorted.iter().enumerate() {
        let frac = (k + 1) as f64 / n;
        match steps.last_mut() {
            Some(last) if last.0 == *v => last.1 = frac,
            _ => steps.push((*v, frac)),
        }
    }
    steps
}

/// Header `value,cumulative_fraction`.
pub fn cdf_csv(values: &[f64]) -> String {
    let mut out = String::from("value,cumulative_fraction\n");
    for (v, f) in empirical_cdf(values) {
        let _ = writeln!(out, "{v},{f}");
    }
    out
}

/// Header `axis,value,mean_r_mr,mean_r_mc,mean_bandwidth,circle_size,
/// trusted_circle_size,mean_circle_size,mean_trusted_circle_size`; the last
/// two are only filled for a sweep over `n`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(
        "axis,value,mean_r_mr,mean_r_mc,mean_bandwidth,circle_size,trusted_circle_size,\
         mean_circle_size,mean_trusted_circle_size\n",
    );
    for p in points {
        let sel = mean_report(&p.selection);
        let circ = mean_report(&p.circuits);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.axis,
            p.value,
            sel.r_mr,
            opt(circ.r_mc),
            sel.avg_bandwidth,
            p.circle_size,
            p.trusted_circle_size,
            opt(p.mean_circle_size),
            opt(p.mean_trusted_circle_size),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(round: usize, r_mr: f64, r_mc: Option<f64>) -> RoundReport {
        RoundReport {
            round,
            r_mr,
            r_mc,
            avg_bandwidth: 2.0,
            draws: 10,
        }
    }

    #[test]
    fn csv_layout() {
        let rows = [report(0, 0.1, None), report(1, 0.3, None)];
        assert_eq!(
            rounds_csv(&rows),
            "round,r_mr,r_mc,avg_bandwidth,draws\n0,0.1,,2,10\n1,0.3,,2,10\nmean,0.2,,2,20\n"
        );
        let rows = [report(0, 0.5, Some(1.0))];
        assert!(rounds_csv(&rows).ends_with("mean,0.5,1,2,10\n"));
    }

    #[test]
    fn cdf_steps() {
        assert_eq!(cdf_csv(&[0.0, 0.0, 0.0]), "value,cumulative_fraction\n0,1\n");
        assert_eq!(empirical_cdf(&[0.3, 0.1, 0.3, 0.2]), vec![(0.1, 0.25), (0.2, 0.5), (0.3, 1.0)]);
        assert!(empirical_cdf(&[]).is_empty());
    }
}
