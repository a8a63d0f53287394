use serde_json::{Map, Value};

/// A CSV table held as strings, so the file and the inline JSON form agree.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Shortest round-trip decimal; scientific notation outside
    /// `[1e-4, 1e15)`. Non-finite values become empty cells.
    pub fn num(v: f64) -> String {
        if !v.is_finite() {
            return String::new();
        }
        let a = v.abs();
        if a != 0.0 && !(1e-4..1e15).contains(&a) {
            format!("{v:e}")
        } else {
            format!("{v}")
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self.header.iter().cloned().zip(r.iter().map(|c| Value::from(c.as_str()))).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.5, -2.25e-9, 7.381080594576113, 3e20] {
            assert_eq!(Table::num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(Table::num(f64::NAN), "");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.row(vec!["1".into(), "x,y".into()]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "a,b\n1,\"x,y\"\n");
    }
}
