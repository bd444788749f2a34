use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // non-finite numbers have no JSON form
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by the CSV header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let mut m = Map::new();
                    for (k, c) in self.header.iter().zip(row) {
                        m.insert((*k).to_string(), c.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "x", "region"]);
        t.push(vec![Cell::Int(3), Cell::Num(0.1), Cell::Text("B".into())]);
        t.push(vec![
            Cell::Int(-1),
            Cell::Num(-2.5e3),
            Cell::Text("A".into()),
        ]);
        assert_eq!(
            t.to_csv(),
            "n,x,region\n3,1.0000000000000001e-1,B\n-1,-2.5000000000000000e3,A\n"
        );
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [
            std::f64::consts::PI,
            1.0 / 3.0,
            2.0f64.sqrt() * 1e-200,
            123456789.123,
        ] {
            let s = Cell::Num(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_rows() {
        let mut t = Table::new(&["x", "psi"]);
        t.push(vec![Cell::Num(1.0), Cell::Num(f64::NAN)]);
        assert_eq!(t.to_json().to_string(), r#"[{"psi":null,"x":1.0}]"#);
    }
}
