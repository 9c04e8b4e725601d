use crate::error::{Error, Result};

/// Real-valued observables sampled on a strictly increasing time grid.
///
/// Stored column-wise; every label has exactly one value per time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    labels: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, labels: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimes("times must be strictly increasing".into()));
        }
        if labels.len() != columns.len() || columns.iter().any(|c| c.len() != times.len()) {
            return Err(Error::InvalidTimes("ragged time series".into()));
        }
        Ok(Self {
            times,
            labels,
            columns,
        })
    }

    /// Builds from per-time records, each holding one value per label.
    pub fn from_rows(times: Vec<f64>, labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let mut columns = vec![Vec::with_capacity(rows.len()); labels.len()];
        for row in rows {
            if row.len() != labels.len() {
                return Err(Error::InvalidTimes("record width does not match labels".into()));
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        Self::new(times, labels, columns)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    /// Values of every label at sample `i`, in label order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}

/// `0, dt, 2 dt, ..., t_max` (the end point is included when it lies on the grid
/// to within a millionth of a step).
pub fn uniform_times(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0 && t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidTimes(format!("need t_max >= 0 and dt > 0, got {t_max}, {dt}")));
    }
    let steps = (t_max / dt + 1e-6).floor() as usize;
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoint() {
        let t = uniform_times(50.0, 0.05).unwrap();
        assert_eq!(t.len(), 1001);
        assert!((t[1000] - 50.0).abs() < 1e-12);
        assert!(uniform_times(1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_ragged_or_unsorted() {
        assert!(TimeSeries::new(vec![0.0, 0.0], vec![], vec![]).is_err());
        assert!(TimeSeries::new(vec![0.0, 1.0], vec!["a".into()], vec![vec![1.0]]).is_err());
        let s = TimeSeries::from_rows(vec![0.0, 1.0], vec!["a".into(), "b".into()], &[vec![1.0, 2.0], vec![3.0, 4.0]])
            .unwrap();
        assert_eq!(s.column("b").unwrap(), &[2.0, 4.0]);
        assert_eq!(s.row(1), vec![3.0, 4.0]);
    }
}
