//! Comma-separated tables. Floats use `{:.16e}` (17 significant digits) so
//! every double round-trips exactly; missing values are empty cells.

use crate::CliError;

pub const RESULTS_HEADER: [&str; 11] = [
    "quantity",
    "k",
    "q",
    "eps",
    "eta",
    "t",
    "j",
    "shell_norm",
    "aggregate",
    "predicted_scaling",
    "ratio",
];

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_f64(cell: &str) -> Result<f64, String> {
    match cell {
        "" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        s => s.parse::<f64>().map_err(|_| format!("not a number: {s:?}")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub quantity: String,
    pub k: i32,
    pub q: f64,
    pub eps: f64,
    pub eta: f64,
    pub t: f64,
    /// Shell index; `None` on aggregate rows.
    pub j: Option<i32>,
    pub shell_norm: f64,
    pub aggregate: f64,
    pub predicted_scaling: f64,
    pub ratio: f64,
}

impl ResultRow {
    pub fn aggregate(
        quantity: &str,
        k: i32,
        q: f64,
        eps: f64,
        eta: f64,
        t: f64,
        value: f64,
        predicted: f64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            k,
            q,
            eps,
            eta,
            t,
            j: None,
            shell_norm: f64::NAN,
            aggregate: value,
            predicted_scaling: predicted,
            ratio: value / predicted,
        }
    }

    pub fn shell(
        quantity: &str,
        k: i32,
        q: f64,
        eps: f64,
        eta: f64,
        t: f64,
        j: i32,
        norm: f64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            k,
            q,
            eps,
            eta,
            t,
            j: Some(j),
            shell_norm: norm,
            aggregate: f64::NAN,
            predicted_scaling: f64::NAN,
            ratio: f64::NAN,
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.quantity.clone(),
            self.k.to_string(),
            fmt_f64(self.q),
            fmt_f64(self.eps),
            fmt_f64(self.eta),
            fmt_f64(self.t),
            self.j.map(|j| j.to_string()).unwrap_or_default(),
            fmt_f64(self.shell_norm),
            fmt_f64(self.aggregate),
            fmt_f64(self.predicted_scaling),
            fmt_f64(self.ratio),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Plain tables only: no quoting, every row as wide as the header.
pub fn parse_table(text: &str) -> Result<Table, CliError> {
    let bad = |m: String| CliError::Config(format!("csv: {m}"));
    let mut lines = text.lines();
    let header: Vec<String> = match lines.next() {
        Some(h) if !h.is_empty() => h.split(',').map(str::to_string).collect(),
        _ => return Err(bad("missing header row".into())),
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(bad(format!(
                "row {} has {} cells, header has {}",
                i + 1,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn writable_name(q: &str) -> bool {
    !q.is_empty() && !q.contains([',', '\n', '\r'])
}

pub fn results_table(rows: &[ResultRow]) -> Result<Table, CliError> {
    let mut t = Table::new(&RESULTS_HEADER);
    for r in rows {
        if !writable_name(&r.quantity) {
            return Err(CliError::Config(format!(
                "quantity name {:?} cannot be written",
                r.quantity
            )));
        }
        t.push(r.cells());
    }
    Ok(t)
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>, CliError> {
    let table = parse_table(text)?;
    if table.header != RESULTS_HEADER {
        return Err(CliError::Config(format!(
            "csv: unexpected header {:?}",
            table.header
        )));
    }
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let ctx = |m: String| CliError::Config(format!("csv row {}: {m}", i + 1));
            let f = |c: usize| parse_f64(&r[c]).map_err(ctx);
            if !writable_name(&r[0]) {
                return Err(ctx(format!("bad quantity {:?}", r[0])));
            }
            Ok(ResultRow {
                quantity: r[0].clone(),
                k: r[1].parse().map_err(|_| ctx(format!("bad k {:?}", r[1])))?,
                q: f(2)?,
                eps: f(3)?,
                eta: f(4)?,
                t: f(5)?,
                j: if r[6].is_empty() {
                    None
                } else {
                    Some(r[6].parse().map_err(|_| ctx(format!("bad j {:?}", r[6])))?)
                },
                shell_norm: f(7)?,
                aggregate: f(8)?,
                predicted_scaling: f(9)?,
                ratio: f(10)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn same(a: f64, b: f64) -> bool {
        a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
    }

    proptest! {
        #[test]
        fn doubles_round_trip(x in any::<f64>()) {
            let back = parse_f64(&fmt_f64(x)).unwrap();
            prop_assert!(same(x, back) || (x.is_nan() && back.is_nan()));
        }

        #[test]
        fn rows_round_trip(k in 1i32..200, j in proptest::option::of(-5i32..60), v in 1e-300f64..1e300, q in 1.0f64..8.0) {
            let mut r = ResultRow::aggregate("S", k, q, 0.02, 4e-4, 1e-30, v, 3.0);
            r.j = j;
            let text = results_table(std::slice::from_ref(&r)).unwrap().render();
            let back = parse_results_csv(&text).unwrap();
            prop_assert_eq!(back.len(), 1);
            let b = &back[0];
            prop_assert_eq!(&b.quantity, &r.quantity);
            prop_assert_eq!(b.j, r.j);
            prop_assert!(same(b.aggregate, r.aggregate) && same(b.ratio, r.ratio) && same(b.shell_norm, r.shell_norm));
        }
    }

    #[test]
    fn header_is_fixed() {
        assert!(parse_results_csv("k,q\n1,2\n").is_err());
        assert!(parse_results_csv("").is_err());
        let t = results_table(&[]).unwrap().render();
        assert_eq!(
            t,
            "quantity,k,q,eps,eta,t,j,shell_norm,aggregate,predicted_scaling,ratio\n"
        );
    }

    #[test]
    fn infinite_q_is_written_as_inf() {
        let r = ResultRow::shell("S", 32, f64::INFINITY, 0.02, 4e-4, 1e-3, 8, 0.5);
        let text = results_table(&[r]).unwrap().render();
        assert!(text.contains(",inf,"));
        assert!(parse_results_csv(&text).unwrap()[0].q.is_infinite());
    }

    #[test]
    fn stray_carriage_return_is_rejected_on_read() {
        let text = format!("{}\nA\r11,64,inf,0.02,,,,,1,,\n", RESULTS_HEADER.join(","));
        assert!(parse_results_csv(&text).is_err());
    }
}
