//! Average-rank and Friedman/Finner summaries of result tables, rendered as
//! text and csv.

use std::fmt::Write as _;

use crate::error::Result;
use crate::fmt::significant;
use crate::metrics::{average_ranks, friedman_finner, FriedmanResult, ResultTable};

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: String,
    pub table: ResultTable,
    /// Datasets left out because a cell was missing.
    pub dropped: Vec<String>,
    pub avg_ranks: Vec<f64>,
    /// `None` with fewer than three methods or two datasets.
    pub friedman: Option<FriedmanResult>,
}

/// Higher values are treated as better.
pub fn analyse(title: impl Into<String>, table: ResultTable, dropped: Vec<String>) -> Result<Section> {
    let avg_ranks = average_ranks(&table, true)?;
    let friedman = friedman_finner(&table).ok();
    Ok(Section {
        title: title.into(),
        table,
        dropped,
        avg_ranks,
        friedman,
    })
}

/// Like [`analyse`] but the Friedman test is required to succeed.
pub fn analyse_strict(title: impl Into<String>, table: ResultTable, dropped: Vec<String>) -> Result<Section> {
    let friedman = Some(friedman_finner(&table)?);
    let avg_ranks = average_ranks(&table, true)?;
    Ok(Section {
        title: title.into(),
        table,
        dropped,
        avg_ranks,
        friedman,
    })
}

pub fn render_text(sections: &[Section]) -> String {
    let mut out = String::new();
    for s in sections {
        let _ = writeln!(out, "== {} ==", s.title);
        let _ = write!(out, "datasets: {}", s.table.datasets.len());
        if !s.dropped.is_empty() {
            let _ = write!(out, " (missing cells, left out: {})", s.dropped.join(", "));
        }
        out.push('\n');
        let width = s.table.methods.iter().map(String::len).max().unwrap_or(0).max(6);
        let _ = writeln!(out, "{:<width$}  {:>8}  {:>8}  {:>10}  {:>10}", "method", "avg_rank", "z", "p", "p_finner");
        let mut order: Vec<usize> = (0..s.table.methods.len()).collect();
        order.sort_by(|&a, &b| s.avg_ranks[a].total_cmp(&s.avg_ranks[b]).then(a.cmp(&b)));
        for j in order {
            let name = &s.table.methods[j];
            let _ = write!(out, "{name:<width$}  {:>8.2}", s.avg_ranks[j]);
            match &s.friedman {
                Some(f) if f.control == j => {
                    let _ = write!(out, "  {:>8}  {:>10}  {:>10}", "control", "-", "-");
                }
                Some(f) => {
                    if let Some(c) = f.comparisons.iter().find(|c| c.method == j) {
                        let _ = write!(
                            out,
                            "  {:>8.3}  {:>10}  {:>10}",
                            c.z,
                            significant(c.p_raw, 4),
                            significant(c.p_adjusted, 4)
                        );
                    }
                }
                None => {}
            }
            out.push('\n');
        }
        match &s.friedman {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "Friedman chi2 = {:.4}, df = {}, p = {}",
                    f.chi2,
                    f.df,
                    significant(f.p_value, 4)
                );
            }
            None => out.push_str("Friedman test not applicable (needs >= 3 methods and >= 2 datasets)\n"),
        }
        out.push('\n');
    }
    out
}

pub fn render_csv(sections: &[Section]) -> String {
    let mut out = String::from("table,method,avg_rank,is_control,z,p_raw,p_finner,friedman_chi2,friedman_df,friedman_p\n");
    for s in sections {
        for (j, name) in s.table.methods.iter().enumerate() {
            let _ = write!(out, "{},{},{:.4}", s.title, name, s.avg_ranks[j]);
            match &s.friedman {
                Some(f) => {
                    let cmp = f.comparisons.iter().find(|c| c.method == j);
                    let (z, p, adj) = match cmp {
                        Some(c) => (
                            format!("{:.6}", c.z),
                            significant(c.p_raw, 6),
                            significant(c.p_adjusted, 6),
                        ),
                        None => ("NA".into(), "NA".into(), "NA".into()),
                    };
                    let _ = writeln!(
                        out,
                        ",{},{z},{p},{adj},{:.6},{},{}",
                        u8::from(f.control == j),
                        f.chi2,
                        f.df,
                        significant(f.p_value, 6)
                    );
                }
                None => out.push_str(",0,NA,NA,NA,NA,NA,NA\n"),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        ResultTable::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![0.9, 0.5, 0.1]; 4],
        )
        .unwrap()
    }

    #[test]
    fn text_lists_control_first() {
        let s = analyse("knn / auc", table(), vec!["e".into()]).unwrap();
        let text = render_text(&[s]);
        assert!(text.starts_with("== knn / auc ==\ndatasets: 4 (missing cells, left out: e)\n"));
        let x = text.find("\nx ").unwrap();
        let z = text.find("\nz ").unwrap();
        assert!(x < z);
        assert!(text.contains("Friedman chi2 = 8.0000, df = 2"));
    }

    #[test]
    fn csv_has_one_row_per_method() {
        let s = analyse("t", table(), vec![]).unwrap();
        let csv = render_csv(&[s]);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("t,x,1.0000,1,NA,NA,NA,8.000000,2,"));
    }

    #[test]
    fn two_methods_skip_friedman() {
        let t = ResultTable::new(vec!["a".into(), "b".into()], vec!["x".into(), "y".into()], vec![vec![0.1, 0.2]; 2])
            .unwrap();
        let s = analyse("t", t.clone(), vec![]).unwrap();
        assert!(s.friedman.is_none());
        assert!(render_text(&[s]).contains("not applicable"));
        assert!(analyse_strict("t", t, vec![]).is_err());
    }
}
