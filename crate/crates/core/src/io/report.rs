use std::collections::BTreeMap;
use std::fmt::{Debug, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_max::RankRect;
use crate::scan::{RectBounds, ScanConfig, ScanResult};
use crate::tangent_family::Mode;

/// Wall-clock seconds spent in one stage of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// The result part of a feasible run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub bounds: RectBounds,
    pub rect: RankRect,
    pub time_threshold: Option<f64>,
    pub m_frac: f64,
    pub b_frac: f64,
    pub value_lower: f64,
    pub value_upper: f64,
    pub achieved_value: f64,
    pub p_value: Option<f64>,
    pub family_size: usize,
}

impl From<&ScanResult> for Outcome {
    fn from(r: &ScanResult) -> Self {
        Self {
            bounds: r.bounds,
            rect: r.rect,
            time_threshold: r.time_threshold,
            m_frac: r.m_frac,
            b_frac: r.b_frac,
            value_lower: r.value_lower,
            value_upper: r.value_upper,
            achieved_value: r.achieved_value,
            p_value: r.p_value,
            family_size: r.family_size,
        }
    }
}

/// Everything a run prints: the configuration echo, the outcome (absent when
/// no rectangle meets the support) and optional stage timings.
///
/// The text form is one `key: value` per line with floats in shortest
/// round-trip notation, so [`RunReport::from_text`] restores it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub function: String,
    pub epsilon: f64,
    pub mode: Mode,
    pub support_c: f64,
    pub one_sided: bool,
    pub prospective: bool,
    pub exact: bool,
    pub replicas: usize,
    pub seed: u64,
    pub points: usize,
    pub feasible: bool,
    pub outcome: Option<Outcome>,
    pub timings: Vec<StageTiming>,
}

fn opt<T: Debug>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_owned(), |v| format!("{v:?}"))
}

impl RunReport {
    pub fn new(
        config: &ScanConfig,
        points: usize,
        prospective: bool,
        exact: bool,
        result: Option<&ScanResult>,
    ) -> Self {
        Self {
            function: config.function.name().to_owned(),
            epsilon: config.epsilon,
            mode: config.mode,
            support_c: config.support_c,
            one_sided: config.one_sided,
            prospective,
            exact,
            replicas: config.replicas,
            seed: config.seed,
            points,
            feasible: result.is_some(),
            outcome: result.map(Outcome::from),
            timings: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}: {v}");
        };
        kv("function", self.function.clone());
        kv("epsilon", format!("{:?}", self.epsilon));
        kv("mode", self.mode.to_string());
        kv("support", format!("{:?}", self.support_c));
        kv("one_sided", self.one_sided.to_string());
        kv("prospective", self.prospective.to_string());
        kv("exact", self.exact.to_string());
        kv("replicas", self.replicas.to_string());
        kv("seed", self.seed.to_string());
        kv("points", self.points.to_string());
        kv("feasible", self.feasible.to_string());
        if let Some(o) = &self.outcome {
            kv("x_lo", format!("{:?}", o.bounds.x_lo));
            kv("x_hi", format!("{:?}", o.bounds.x_hi));
            kv("y_lo", format!("{:?}", o.bounds.y_lo));
            kv("y_hi", format!("{:?}", o.bounds.y_hi));
            kv("rank_x_lo", o.rect.x_lo.to_string());
            kv("rank_x_hi", o.rect.x_hi.to_string());
            kv("rank_y_lo", o.rect.y_lo.to_string());
            kv("rank_y_hi", o.rect.y_hi.to_string());
            kv("time_threshold", opt(o.time_threshold));
            kv("m_frac", format!("{:?}", o.m_frac));
            kv("b_frac", format!("{:?}", o.b_frac));
            kv("value_lower", format!("{:?}", o.value_lower));
            kv("value_upper", format!("{:?}", o.value_upper));
            kv("achieved_value", format!("{:?}", o.achieved_value));
            kv("p_value", opt(o.p_value));
            kv("family_size", o.family_size.to_string());
        }
        for t in &self.timings {
            kv(&format!("time.{}", t.stage), format!("{:?}", t.seconds));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: "<report>".into(), line, msg };
        let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        let mut timings = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let (k, v) = raw.split_once(": ").ok_or_else(|| err(i + 1, format!("expected 'key: value', got '{raw}'")))?;
            if let Some(stage) = k.strip_prefix("time.") {
                let seconds = v.parse().map_err(|_| err(i + 1, format!("bad timing '{v}'")))?;
                timings.push(StageTiming { stage: stage.to_owned(), seconds });
            } else if fields.insert(k, (i + 1, v)).is_some() {
                return Err(err(i + 1, format!("duplicate key '{k}'")));
            }
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(0, format!("missing key '{k}'")));
        fn parse<T: FromStr>(k: &str, (line, v): (usize, &str)) -> Result<T> {
            v.parse().map_err(|_| Error::Parse {
                path: "<report>".into(),
                line,
                msg: format!("bad value '{v}' for '{k}'"),
            })
        }
        let num = |k: &str| -> Result<f64> { parse(k, get(k)?) };
        let rank = |k: &str| -> Result<u32> { parse(k, get(k)?) };
        let maybe = |k: &str| -> Result<Option<f64>> {
            match get(k)? {
                (_, "none") => Ok(None),
                e => parse(k, e).map(Some),
            }
        };
        let feasible: bool = parse("feasible", get("feasible")?)?;
        let outcome = if feasible {
            Some(Outcome {
                bounds: RectBounds { x_lo: num("x_lo")?, x_hi: num("x_hi")?, y_lo: num("y_lo")?, y_hi: num("y_hi")? },
                rect: RankRect {
                    x_lo: rank("rank_x_lo")?,
                    x_hi: rank("rank_x_hi")?,
                    y_lo: rank("rank_y_lo")?,
                    y_hi: rank("rank_y_hi")?,
                },
                time_threshold: maybe("time_threshold")?,
                m_frac: num("m_frac")?,
                b_frac: num("b_frac")?,
                value_lower: num("value_lower")?,
                value_upper: num("value_upper")?,
                achieved_value: num("achieved_value")?,
                p_value: maybe("p_value")?,
                family_size: parse("family_size", get("family_size")?)?,
            })
        } else {
            None
        };
        Ok(Self {
            function: get("function")?.1.to_owned(),
            epsilon: num("epsilon")?,
            mode: parse("mode", get("mode")?)?,
            support_c: num("support")?,
            one_sided: parse("one_sided", get("one_sided")?)?,
            prospective: parse("prospective", get("prospective")?)?,
            exact: parse("exact", get("exact")?)?,
            replicas: parse("replicas", get("replicas")?)?,
            seed: parse("seed", get("seed")?)?,
            points: parse("points", get("points")?)?,
            feasible,
            outcome,
            timings,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(feasible: bool) -> RunReport {
        let result = ScanResult {
            rect: RankRect { x_lo: 1, x_hi: 4, y_lo: 0, y_hi: 2 },
            bounds: RectBounds { x_lo: 0.1, x_hi: 1e-300, y_lo: -3.25, y_hi: 7.0 },
            m_frac: 1.0 / 3.0,
            b_frac: 0.2,
            value_lower: 0.123456789012345,
            value_upper: 0.173456789012345,
            achieved_value: 0.14,
            winning_plane: None,
            p_value: Some(0.01),
            time_threshold: None,
            family_size: 42,
        };
        let cfg = ScanConfig { replicas: 99, seed: u64::MAX, ..ScanConfig::default() };
        let mut r = RunReport::new(&cfg, 10, false, false, feasible.then_some(&result));
        r.timings.push(StageTiming { stage: "scan".into(), seconds: 0.5 });
        r
    }

    #[test]
    fn text_round_trip() {
        for feasible in [true, false] {
            let r = sample(feasible);
            let text = r.to_text();
            assert_eq!(RunReport::from_text(&text).unwrap(), r);
            assert!(text.contains(&format!("feasible: {feasible}")));
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample(true);
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_malformed() {
        assert!(RunReport::from_text("nonsense").is_err());
        let text = sample(true).to_text().replace("epsilon: 0.05", "epsilon: abc");
        assert!(matches!(RunReport::from_text(&text), Err(Error::Parse { line: 2, .. })));
        let text = sample(true).to_text().replace("seed: ", "sed: ");
        assert!(RunReport::from_text(&text).is_err());
    }
}
