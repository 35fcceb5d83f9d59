use serde::{Deserialize, Serialize};

/// Label of a factor `G_{i+1}/G_i` in a normal series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesLabel {
    #[serde(rename = "LF")]
    LocallyFinite,
    #[serde(rename = "Ab")]
    Abelian,
}

/// Factor labels of `1 = G₀ ⊴ G₁ ⊴ … ⊴ G_n = G`, bottom first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalSeries(pub Vec<SeriesLabel>);

impl NormalSeries {
    pub fn labels(&self) -> &[SeriesLabel] {
        &self.0
    }

    /// No two consecutive locally finite factors.
    pub fn is_normalized(&self) -> bool {
        !self
            .0
            .windows(2)
            .any(|w| w[0] == SeriesLabel::LocallyFinite && w[1] == SeriesLabel::LocallyFinite)
    }
}

/// Merges adjacent locally finite factors (an extension of locally finite
/// groups is locally finite) until none remain adjacent.
pub fn normalize_normal_series(series: &NormalSeries) -> NormalSeries {
    let mut out: Vec<SeriesLabel> = Vec::with_capacity(series.0.len());
    for &label in &series.0 {
        if label == SeriesLabel::LocallyFinite && out.last() == Some(&SeriesLabel::LocallyFinite) {
            continue;
        }
        out.push(label);
    }
    NormalSeries(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use SeriesLabel::{Abelian as Ab, LocallyFinite as LF};

    #[test]
    fn examples() {
        let s = NormalSeries(vec![LF, LF, Ab]);
        assert_eq!(normalize_normal_series(&s).0, vec![LF, Ab]);
        assert_eq!(normalize_normal_series(&NormalSeries(vec![Ab])).0, vec![Ab]);
        let s = NormalSeries(vec![LF, LF, LF, Ab, LF, LF]);
        assert_eq!(normalize_normal_series(&s).0, vec![LF, Ab, LF]);
        assert!(normalize_normal_series(&NormalSeries(vec![])).0.is_empty());
    }

    #[test]
    fn serde_labels() {
        let s: NormalSeries = serde_json::from_str(r#"["LF","Ab"]"#).unwrap();
        assert_eq!(s.0, vec![LF, Ab]);
    }
}
