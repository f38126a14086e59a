//! Channel specification files.
//!
//! A spec is a list of `key = value` lines. `#` starts a comment. A line
//! `[child]` opens a mixture component; keys after it belong to that child
//! until the next `[child]`. See `docs/spec-format.md` for the grammar.

use std::collections::BTreeMap;
use std::fmt;

use pauli_dyn_core::families::{
    cosine_flip, isotropic_rtn, isotropic_rtn_confined, rate_defined_dephasing, rtn_flip, semigroup_flip, RateProfile,
    RtnParams,
};
use pauli_dyn_core::mixing::mix;
use pauli_dyn_core::{Axis, MixtureWeights, PauliChannel};

use crate::CliError;

pub const DEFAULT_HORIZON: f64 = 10.0;
pub const DEFAULT_GRID: usize = 1001;
const CONFINED_CHECK_GRID: usize = 20001;

const KEYS: &[&str] = &[
    "family", "axis", "mu", "gamma0", "d", "w", "omega", "weights", "horizon", "grid", "label", "confined",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    CosineFlip,
    SemigroupFlip,
    RtnFlip,
    IsotropicRtn,
    RateDephasingTan,
    RateDephasingTan2,
    Mixture,
}

impl Family {
    fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "cosine_flip" => Family::CosineFlip,
            "semigroup_flip" => Family::SemigroupFlip,
            "rtn_flip" => Family::RtnFlip,
            "isotropic_rtn" => Family::IsotropicRtn,
            "rate_dephasing_tan" => Family::RateDephasingTan,
            "rate_dephasing_tan2" => Family::RateDephasingTan2,
            "mixture" => Family::Mixture,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
    col: usize,
}

/// One section of a spec file: the top level or a `[child]` block.
#[derive(Debug, Clone, PartialEq)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn new(line: usize) -> Self {
        Section {
            line,
            entries: BTreeMap::new(),
        }
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn err(&self, key: &str, message: String) -> ParseError {
        match self.get(key) {
            Some(e) => ParseError {
                line: e.line,
                col: e.col,
                message,
            },
            None => ParseError {
                line: self.line,
                col: 1,
                message,
            },
        }
    }

    fn require(&self, key: &str) -> Result<&Entry, ParseError> {
        self.get(key)
            .ok_or_else(|| self.err(key, format!("missing key `{key}`")))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ParseError> {
        self.get(key)
            .map(|e| parse_number(e).map_err(|m| self.err(key, m)))
            .transpose()
    }

    fn required_number(&self, key: &str) -> Result<f64, ParseError> {
        self.require(key)?;
        Ok(self.number(key)?.expect("checked above"))
    }

    fn axis(&self, default: Option<Axis>) -> Result<Axis, ParseError> {
        match self.get("axis") {
            None => default.ok_or_else(|| self.err("axis", "missing key `axis`".into())),
            Some(e) => parse_axis(&e.value).ok_or_else(|| self.err("axis", format!("bad axis `{}`", e.value))),
        }
    }

    fn weights(&self) -> Result<Option<Vec<f64>>, ParseError> {
        let Some(e) = self.get("weights") else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| parse_number_str(s.trim()).map_err(|m| self.err("weights", m)))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn parse_number_str(s: &str) -> Result<f64, String> {
    let v = match s {
        "pi" => std::f64::consts::PI,
        _ => s.parse::<f64>().map_err(|_| format!("expected a number, got `{s}`"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got `{s}`"))
    }
}

fn parse_number(e: &Entry) -> Result<f64, String> {
    parse_number_str(&e.value)
}

fn parse_axis(s: &str) -> Option<Axis> {
    match s {
        "1" | "x" | "X" => Some(Axis::X),
        "2" | "y" | "Y" => Some(Axis::Y),
        "3" | "z" | "Z" => Some(Axis::Z),
        _ => None,
    }
}

/// A parsed, validated channel specification.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub family: Family,
    pub label: Option<String>,
    pub axis: Option<Axis>,
    pub mu: Option<f64>,
    pub gamma0: Option<f64>,
    pub rtn: Option<RtnParams>,
    pub omega: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub confined: bool,
    pub horizon: Option<f64>,
    pub grid: Option<usize>,
    pub children: Vec<ChannelSpec>,
}

pub fn parse_spec(text: &str) -> Result<ChannelSpec, ParseError> {
    let mut sections = vec![Section::new(1)];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') {
            if trimmed != "[child]" {
                return Err(ParseError {
                    line: line_no,
                    col: indent + 1,
                    message: format!("unknown section `{trimmed}`, expected `[child]`"),
                });
            }
            sections.push(Section::new(line_no));
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(ParseError {
                line: line_no,
                col: indent + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        let value_part = &content[eq + 1..];
        let value = value_part.trim();
        let value_col = eq + 2 + (value_part.len() - value_part.trim_start().len());
        if !KEYS.contains(&key) {
            return Err(ParseError {
                line: line_no,
                col: indent + 1,
                message: format!("unknown key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(ParseError {
                line: line_no,
                col: value_col,
                message: format!("empty value for `{key}`"),
            });
        }
        let section = sections.last_mut().expect("top level always present");
        if section.entries.contains_key(key) {
            return Err(ParseError {
                line: line_no,
                col: indent + 1,
                message: format!("duplicate key `{key}`"),
            });
        }
        section.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line: line_no,
                col: value_col,
            },
        );
    }

    let mut iter = sections.into_iter();
    let top = iter.next().expect("top level always present");
    let children: Vec<Section> = iter.collect();
    let mut spec = section_to_spec(&top, true)?;
    if spec.family == Family::Mixture {
        if children.is_empty() {
            return Err(top.err("family", "a mixture needs at least one `[child]` section".into()));
        }
        spec.children = children
            .iter()
            .map(|c| section_to_spec(c, false))
            .collect::<Result<_, _>>()?;
        let n = spec.weights.as_ref().map(Vec::len);
        if n != Some(spec.children.len()) {
            return Err(top.err(
                "weights",
                format!(
                    "mixture of {} children needs {} weights",
                    spec.children.len(),
                    spec.children.len()
                ),
            ));
        }
    } else if let Some(c) = children.first() {
        return Err(ParseError {
            line: c.line,
            col: 1,
            message: "`[child]` sections are only allowed in a mixture".into(),
        });
    }
    Ok(spec)
}

fn section_to_spec(s: &Section, top_level: bool) -> Result<ChannelSpec, ParseError> {
    let fam_entry = s.require("family")?;
    let family = Family::parse(&fam_entry.value)
        .ok_or_else(|| s.err("family", format!("unknown family `{}`", fam_entry.value)))?;
    if !top_level {
        if family == Family::Mixture {
            return Err(s.err("family", "nested mixtures are not supported".into()));
        }
        for key in ["horizon", "grid"] {
            if s.get(key).is_some() {
                return Err(s.err(key, format!("`{key}` belongs at the top level")));
            }
        }
    }

    let allowed: &[&str] = match family {
        Family::CosineFlip => &["axis", "mu"],
        Family::SemigroupFlip => &["axis", "gamma0"],
        Family::RtnFlip => &["axis", "d", "w"],
        Family::IsotropicRtn => &["d", "w", "weights", "confined"],
        Family::RateDephasingTan | Family::RateDephasingTan2 => &["axis", "omega"],
        Family::Mixture => &["weights"],
    };
    for key in s.entries.keys() {
        if !matches!(key.as_str(), "family" | "label" | "horizon" | "grid") && !allowed.contains(&key.as_str()) {
            return Err(s.err(key, format!("key `{key}` does not apply to this family")));
        }
    }

    let positive = |key: &str, v: f64| -> Result<f64, ParseError> {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(s.err(key, format!("`{key}` must be positive")))
        }
    };

    let mut spec = ChannelSpec {
        family,
        label: s.get("label").map(|e| e.value.clone()),
        axis: None,
        mu: None,
        gamma0: None,
        rtn: None,
        omega: None,
        weights: s.weights()?,
        confined: false,
        horizon: s.number("horizon")?.map(|h| positive("horizon", h)).transpose()?,
        grid: None,
        children: Vec::new(),
    };
    if let Some(e) = s.get("grid") {
        let g: usize = e
            .value
            .parse()
            .map_err(|_| s.err("grid", format!("expected an integer, got `{}`", e.value)))?;
        if g < 2 {
            return Err(s.err("grid", "`grid` must be at least 2".into()));
        }
        spec.grid = Some(g);
    }
    if let Some(e) = s.get("confined") {
        spec.confined = match e.value.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(s.err("confined", format!("expected true or false, got `{other}`"))),
        };
    }

    match family {
        Family::CosineFlip => {
            spec.axis = Some(s.axis(None)?);
            spec.mu = Some(positive("mu", s.required_number("mu")?)?);
        }
        Family::SemigroupFlip => {
            spec.axis = Some(s.axis(None)?);
            spec.gamma0 = Some(positive("gamma0", s.required_number("gamma0")?)?);
        }
        Family::RtnFlip | Family::IsotropicRtn => {
            if family == Family::RtnFlip {
                spec.axis = Some(s.axis(None)?);
            }
            let w = positive("w", s.required_number("w")?)?;
            let d = positive("d", s.required_number("d")?)?;
            spec.rtn = Some(RtnParams { w, d });
            if family == Family::IsotropicRtn {
                match &spec.weights {
                    None => spec.weights = Some(vec![1.0 / 3.0; 3]),
                    Some(w) => {
                        let arr: [f64; 3] = w
                            .as_slice()
                            .try_into()
                            .map_err(|_| s.err("weights", "isotropic_rtn needs three weights".into()))?;
                        MixtureWeights::new(arr[0], arr[1], arr[2]).map_err(|e| s.err("weights", e.to_string()))?;
                    }
                }
            }
        }
        Family::RateDephasingTan | Family::RateDephasingTan2 => {
            spec.axis = Some(s.axis(Some(Axis::Z))?);
            spec.omega = Some(positive("omega", s.required_number("omega")?)?);
        }
        Family::Mixture => {
            s.require("weights")?;
        }
    }
    Ok(spec)
}

impl ChannelSpec {
    pub fn horizon(&self, flag: Option<f64>) -> f64 {
        flag.or(self.horizon).unwrap_or(DEFAULT_HORIZON)
    }

    pub fn grid(&self, flag: Option<usize>) -> usize {
        flag.or(self.grid).unwrap_or(DEFAULT_GRID)
    }

    /// Builds the channel. `horizon` is used for the confinement check of
    /// `isotropic_rtn` with `confined = true`.
    pub fn build(&self, horizon: f64) -> Result<PauliChannel, CliError> {
        let ch = match self.family {
            Family::CosineFlip => cosine_flip(self.axis.expect("validated"), self.mu.expect("validated"))?,
            Family::SemigroupFlip => semigroup_flip(self.axis.expect("validated"), self.gamma0.expect("validated"))?,
            Family::RtnFlip => {
                let p = self.rtn.expect("validated");
                rtn_flip(self.axis.expect("validated"), RtnParams::new(p.w, p.d)?)
            }
            Family::IsotropicRtn => {
                let p = self.rtn.expect("validated");
                let p = RtnParams::new(p.w, p.d)?;
                let w = self.weights.as_deref().expect("validated");
                let weights = MixtureWeights::new(w[0], w[1], w[2])?;
                if self.confined {
                    isotropic_rtn_confined(p, weights, horizon, CONFINED_CHECK_GRID)?
                } else {
                    isotropic_rtn(p, weights)
                }
            }
            Family::RateDephasingTan => rate_defined_dephasing(
                &RateProfile::Tan {
                    omega: self.omega.expect("validated"),
                },
                self.axis.expect("validated"),
            )?,
            Family::RateDephasingTan2 => rate_defined_dephasing(
                &RateProfile::TanSquared {
                    omega: self.omega.expect("validated"),
                },
                self.axis.expect("validated"),
            )?,
            Family::Mixture => {
                let children = self
                    .children
                    .iter()
                    .map(|c| c.build(horizon))
                    .collect::<Result<Vec<_>, _>>()?;
                mix(&children, self.weights.as_deref().expect("validated"))?
            }
        };
        Ok(match &self.label {
            Some(label) => PauliChannel::new(label.clone(), ch.lambda_functions().clone())
                .with_validated_until(ch.validated_until()),
            None => ch,
        })
    }
}
