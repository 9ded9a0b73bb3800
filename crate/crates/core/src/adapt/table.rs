use std::fmt::Write as _;

/// Named columns of optional reals, rendered as CSV with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                if let Some(v) = v {
                    let _ = write!(s, "{v:.16e}");
                }
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["t", "error"]);
        t.push(vec![Some(0.5), None]);
        assert_eq!(t.to_csv(), "t,error\n5.0000000000000000e-1,\n");
        let back: f64 = "5.0000000000000000e-1".parse().unwrap();
        assert_eq!(back, 0.5);
    }
}
