use std::collections::BTreeMap;

use serde::Serialize;

use super::MetricsError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthRow {
    /// Whitespace token count of the source text.
    pub length: usize,
    pub mean_f1: f64,
    pub count: usize,
}

/// Mean F1 per source length, one row per occupied length.
pub fn length_report<'a, I>(pairs: I) -> Result<Vec<LengthRow>, MetricsError>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut buckets: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (source, f1) in pairs {
        let e = buckets.entry(source.split_whitespace().count()).or_default();
        e.0 += f1;
        e.1 += 1;
    }
    if buckets.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(buckets.into_iter().map(|(length, (sum, count))| LengthRow { length, mean_f1: sum / count as f64, count }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets() {
        let rows = length_report([("a b c", 1.0), ("x y z", 1.0)]).unwrap();
        assert_eq!(rows, vec![LengthRow { length: 3, mean_f1: 1.0, count: 2 }]);
        let rows = length_report([("a", 0.5), ("a b", 1.0), ("c", 0.25), ("c d", 0.0)]).unwrap();
        assert_eq!(rows[0], LengthRow { length: 1, mean_f1: 0.375, count: 2 });
        assert_eq!(rows[1], LengthRow { length: 2, mean_f1: 0.5, count: 2 });
        assert_eq!(length_report(Vec::<(&str, f64)>::new()), Err(MetricsError::EmptyInput));
    }
}
