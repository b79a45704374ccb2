use serde::{Deserialize, Serialize};

/// Arithmetic mean with population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self {
            mean,
            std: var.sqrt(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std() {
        let ms = MeanStd::of(&[2.0, 4.0]).unwrap();
        assert_eq!(ms.mean, 3.0);
        assert_eq!(ms.std, 1.0);
        assert!(MeanStd::of(&[]).is_none());
        assert_eq!(MeanStd::of(&[7.0]).unwrap().std, 0.0);
    }
}
