//! Confirmation measures for evidence-to-claim links.
//!
//! Ratio measures take the logarithm of a probability ratio, so positive
//! values mean the evidence confirms the claim, zero means it is irrelevant
//! and negative values mean it disconfirms. A zero numerator yields the
//! negative-infinity sentinel rather than an error.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Log base used when none is configured.
pub const DEFAULT_BASE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "kebab-case")]
pub enum MeasureError {
    #[error("{name} = {value} is not a probability in [0, 1]")]
    NotAProbability { name: String, value: f64 },
    #[error("{name} must be non-zero for this measure")]
    ZeroDenominator { name: String },
    #[error("log base {base} must be greater than 1")]
    InvalidBase { base: f64 },
    #[error("incoherent inputs: {reason}")]
    Incoherent { reason: String },
}

/// Six-level qualitative elicitation scale with fixed representative values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualitativeLevel {
    Certain,
    VeryConfident,
    Confident,
    Neutral,
    Surprised,
    VerySurprised,
}

impl QualitativeLevel {
    pub const ALL: [QualitativeLevel; 6] = [
        QualitativeLevel::Certain,
        QualitativeLevel::VeryConfident,
        QualitativeLevel::Confident,
        QualitativeLevel::Neutral,
        QualitativeLevel::Surprised,
        QualitativeLevel::VerySurprised,
    ];

    pub fn probability(self) -> f64 {
        qualitative_to_probability(self)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            QualitativeLevel::Certain => "certain",
            QualitativeLevel::VeryConfident => "very_confident",
            QualitativeLevel::Confident => "confident",
            QualitativeLevel::Neutral => "neutral",
            QualitativeLevel::Surprised => "surprised",
            QualitativeLevel::VerySurprised => "very_surprised",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.keyword() == word)
    }
}

impl fmt::Display for QualitativeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

pub fn qualitative_to_probability(level: QualitativeLevel) -> f64 {
    match level {
        QualitativeLevel::Certain => 1.0,
        QualitativeLevel::VeryConfident => 0.99,
        QualitativeLevel::Confident => 0.9,
        QualitativeLevel::Neutral => 0.5,
        QualitativeLevel::Surprised => 0.1,
        QualitativeLevel::VerySurprised => 0.01,
    }
}

/// One elicited probability, either a number or a qualitative level.
///
/// Serializes as a bare number or as the level's keyword.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Judgment {
    Numeric(f64),
    Qualitative(QualitativeLevel),
}

impl Judgment {
    pub fn probability(self) -> f64 {
        match self {
            Judgment::Numeric(p) => p,
            Judgment::Qualitative(level) => level.probability(),
        }
    }
}

impl Serialize for Judgment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Judgment::Numeric(p) => s.serialize_f64(*p),
            Judgment::Qualitative(level) => s.serialize_str(level.keyword()),
        }
    }
}

impl<'de> Deserialize<'de> for Judgment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Level(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Judgment::Numeric(p)),
            Raw::Level(word) => QualitativeLevel::from_keyword(&word)
                .map(Judgment::Qualitative)
                .ok_or_else(|| {
                    serde::de::Error::custom(format!("unknown qualitative level `{word}`"))
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElicitField {
    Prior,
    Posterior,
    Likelihood,
    LikelihoodNot,
    Marginal,
}

impl ElicitField {
    pub const ALL: [ElicitField; 5] = [
        ElicitField::Prior,
        ElicitField::Posterior,
        ElicitField::Likelihood,
        ElicitField::LikelihoodNot,
        ElicitField::Marginal,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ElicitField::Prior => "prior",
            ElicitField::Posterior => "posterior",
            ElicitField::Likelihood => "likelihood",
            ElicitField::LikelihoodNot => "likelihood_not",
            ElicitField::Marginal => "marginal",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.keyword() == word)
    }
}

/// Expert judgments on a claim/evidence pair: P(C), P(C|E), P(E|C), P(E|¬C), P(E).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Elicitation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Judgment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posterior: Option<Judgment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likelihood: Option<Judgment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub likelihood_not: Option<Judgment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginal: Option<Judgment>,
}

impl Elicitation {
    pub fn get(&self, field: ElicitField) -> Option<Judgment> {
        match field {
            ElicitField::Prior => self.prior,
            ElicitField::Posterior => self.posterior,
            ElicitField::Likelihood => self.likelihood,
            ElicitField::LikelihoodNot => self.likelihood_not,
            ElicitField::Marginal => self.marginal,
        }
    }

    pub fn set(&mut self, field: ElicitField, value: Option<Judgment>) {
        let slot = match field {
            ElicitField::Prior => &mut self.prior,
            ElicitField::Posterior => &mut self.posterior,
            ElicitField::Likelihood => &mut self.likelihood,
            ElicitField::LikelihoodNot => &mut self.likelihood_not,
            ElicitField::Marginal => &mut self.marginal,
        };
        *slot = value;
    }

    /// Present entries in canonical field order.
    pub fn entries(&self) -> impl Iterator<Item = (ElicitField, Judgment)> + '_ {
        ElicitField::ALL
            .into_iter()
            .filter_map(|f| self.get(f).map(|j| (f, j)))
    }

    pub fn is_empty(&self) -> bool {
        self.entries().next().is_none()
    }

    fn p(&self, field: ElicitField) -> Option<f64> {
        self.get(field).map(Judgment::probability)
    }

    /// Every measure the present judgments determine.
    ///
    /// Carnap's measure uses P(C∧E) = P(E|C)·P(C).
    pub fn measures(&self, base: f64) -> Vec<Result<MeasureResult, MeasureError>> {
        use ElicitField::*;
        let mut out = Vec::new();
        if let (Some(prior), Some(post)) = (self.p(Prior), self.p(Posterior)) {
            out.push(keynes(prior, post, base));
        }
        if let (Some(lik), Some(marg)) = (self.p(Likelihood), self.p(Marginal)) {
            out.push(l_keynes(lik, marg, base));
        }
        if let (Some(lik), Some(lik_not)) = (self.p(Likelihood), self.p(LikelihoodNot)) {
            out.push(good(lik, lik_not, base));
        }
        if let (Some(lik), Some(prior), Some(marg)) =
            (self.p(Likelihood), self.p(Prior), self.p(Marginal))
        {
            out.push(carnap(lik * prior, prior, marg));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Keynes,
    LKeynes,
    Good,
    Carnap,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Keynes => "keynes",
            Measure::LKeynes => "l_keynes",
            Measure::Good => "good",
            Measure::Carnap => "carnap",
        }
    }

    /// Measures expressible as functions of P(C|E) and P(C) alone; only these
    /// count towards the soundness gate.
    pub fn counts_for_soundness(self) -> bool {
        !matches!(self, Measure::Carnap)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A measure value; infinities are legitimate sentinels and serialize as
/// the strings `"+inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MeasureValue(pub f64);

impl MeasureValue {
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0.0
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("+inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            write!(f, "{:.4}", self.0)
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("+inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for MeasureValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(MeasureValue(v)),
            Raw::Text(t) if t == "+inf" => Ok(MeasureValue(f64::INFINITY)),
            Raw::Text(t) if t == "-inf" => Ok(MeasureValue(f64::NEG_INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad measure value `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub measure: Measure,
    pub value: MeasureValue,
    /// Log base; `None` for Carnap's measure, which is a plain difference.
    pub base: Option<f64>,
}

fn check_prob(name: &str, value: f64) -> Result<f64, MeasureError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(MeasureError::NotAProbability {
            name: name.to_string(),
            value,
        })
    }
}

fn check_denominator(name: &str, value: f64) -> Result<f64, MeasureError> {
    check_prob(name, value)?;
    if value == 0.0 {
        Err(MeasureError::ZeroDenominator {
            name: name.to_string(),
        })
    } else {
        Ok(value)
    }
}

fn check_base(base: f64) -> Result<f64, MeasureError> {
    if base.is_finite() && base > 1.0 {
        Ok(base)
    } else {
        Err(MeasureError::InvalidBase { base })
    }
}

/// `log_base(numerator / denominator)`, with a zero numerator mapped to −∞.
fn log_ratio(numerator: f64, denominator: f64, base: f64) -> MeasureValue {
    if numerator == 0.0 {
        MeasureValue(f64::NEG_INFINITY)
    } else {
        MeasureValue((numerator / denominator).ln() / base.ln())
    }
}

/// Keynes' measure: log P(C|E) / P(C).
pub fn keynes(prior: f64, posterior: f64, base: f64) -> Result<MeasureResult, MeasureError> {
    let base = check_base(base)?;
    let prior = check_denominator("prior", prior)?;
    let posterior = check_prob("posterior", posterior)?;
    Ok(MeasureResult {
        measure: Measure::Keynes,
        value: log_ratio(posterior, prior, base),
        base: Some(base),
    })
}

/// Likelihood variant of Keynes' measure: log P(E|C) / P(E).
pub fn l_keynes(likelihood: f64, marginal: f64, base: f64) -> Result<MeasureResult, MeasureError> {
    let base = check_base(base)?;
    let marginal = check_denominator("marginal", marginal)?;
    let likelihood = check_prob("likelihood", likelihood)?;
    Ok(MeasureResult {
        measure: Measure::LKeynes,
        value: log_ratio(likelihood, marginal, base),
        base: Some(base),
    })
}

/// Good's weight of evidence: log P(E|C) / P(E|¬C).
pub fn good(
    likelihood: f64,
    likelihood_not: f64,
    base: f64,
) -> Result<MeasureResult, MeasureError> {
    let base = check_base(base)?;
    let likelihood_not = check_denominator("likelihood_not", likelihood_not)?;
    let likelihood = check_prob("likelihood", likelihood)?;
    Ok(MeasureResult {
        measure: Measure::Good,
        value: log_ratio(likelihood, likelihood_not, base),
        base: Some(base),
    })
}

/// Carnap's measure: P(C∧E) − P(C)·P(E). No logarithm, so no base.
pub fn carnap(p_joint: f64, prior: f64, marginal: f64) -> Result<MeasureResult, MeasureError> {
    let p_joint = check_prob("p_joint", p_joint)?;
    let prior = check_prob("prior", prior)?;
    let marginal = check_prob("marginal", marginal)?;
    if p_joint > prior.min(marginal) {
        return Err(MeasureError::Incoherent {
            reason: format!(
                "P(C∧E) = {p_joint} exceeds min(P(C), P(E)) = {}",
                prior.min(marginal)
            ),
        });
    }
    // Fréchet lower bound; the small slack absorbs rounding in P(E|C)·P(C)
    if p_joint < prior + marginal - 1.0 - 1e-12 {
        return Err(MeasureError::Incoherent {
            reason: format!("P(C∧E) = {p_joint} is below P(C) + P(E) − 1"),
        });
    }
    Ok(MeasureResult {
        measure: Measure::Carnap,
        value: MeasureValue(p_joint - prior * marginal),
        base: None,
    })
}

/// Boost to Keynes' measure from adding E2 after E1:
/// log P(E2|C∧E1) / P(E2|E1).
pub fn diversity_boost(
    p_e2_given_c_e1: f64,
    p_e2_given_e1: f64,
    base: f64,
) -> Result<MeasureValue, MeasureError> {
    let base = check_base(base)?;
    let denominator = check_denominator("P(E2|E1)", p_e2_given_e1)?;
    let numerator = check_prob("P(E2|C∧E1)", p_e2_given_c_e1)?;
    Ok(log_ratio(numerator, denominator, base))
}

/// An inconsistency among elicited judgments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "finding", rename_all = "kebab-case")]
pub enum ConsistencyFinding {
    /// Keynes and L-Keynes should coincide by Bayes' theorem.
    KeynesMismatch { keynes: f64, l_keynes: f64 },
    /// P(C|E)·P(E) should equal P(E|C)·P(C).
    BayesViolation {
        posterior_times_marginal: f64,
        likelihood_times_prior: f64,
    },
    /// P(E) should equal P(E|C)P(C) + P(E|¬C)(1 − P(C)).
    TotalProbabilityViolation { marginal: f64, implied: f64 },
    /// Good's measure should equal the log odds ratio of posterior to prior.
    GoodMismatch { good: f64, log_odds_ratio: f64 },
    /// A measure could not be evaluated on the elicited values.
    DomainError { detail: MeasureError },
}

impl fmt::Display for ConsistencyFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsistencyFinding::KeynesMismatch { keynes, l_keynes } => {
                write!(f, "Keynes ({keynes:.4}) and L-Keynes ({l_keynes:.4}) disagree")
            }
            ConsistencyFinding::BayesViolation {
                posterior_times_marginal,
                likelihood_times_prior,
            } => write!(
                f,
                "P(C|E)·P(E) = {posterior_times_marginal:.4} but P(E|C)·P(C) = {likelihood_times_prior:.4}"
            ),
            ConsistencyFinding::TotalProbabilityViolation { marginal, implied } => write!(
                f,
                "P(E) = {marginal:.4} but P(E|C)P(C) + P(E|¬C)(1 − P(C)) = {implied:.4}"
            ),
            ConsistencyFinding::GoodMismatch { good, log_odds_ratio } => {
                write!(f, "Good ({good:.4}) and log odds ratio ({log_odds_ratio:.4}) disagree")
            }
            ConsistencyFinding::DomainError { detail } => write!(f, "{detail}"),
        }
    }
}

/// Cross-check elicited judgments for Bayes consistency.
///
/// Checks only run when the judgments they need are present; an elicitation
/// that determines a single measure yields no findings.
pub fn cross_check(e: &Elicitation, tolerance: f64) -> Vec<ConsistencyFinding> {
    use ElicitField::*;
    let mut findings = Vec::new();
    let (prior, post, lik, lik_not, marg) = (
        e.p(Prior),
        e.p(Posterior),
        e.p(Likelihood),
        e.p(LikelihoodNot),
        e.p(Marginal),
    );

    if let (Some(prior), Some(post), Some(lik), Some(marg)) = (prior, post, lik, marg) {
        match (
            keynes(prior, post, DEFAULT_BASE),
            l_keynes(lik, marg, DEFAULT_BASE),
        ) {
            (Ok(k), Ok(l)) => {
                let (k, l) = (k.value.get(), l.value.get());
                let agree = if k.is_infinite() || l.is_infinite() {
                    k == l
                } else {
                    (k - l).abs() <= tolerance
                };
                if !agree {
                    findings.push(ConsistencyFinding::KeynesMismatch {
                        keynes: k,
                        l_keynes: l,
                    });
                }
            }
            (Err(detail), _) | (_, Err(detail)) => {
                findings.push(ConsistencyFinding::DomainError { detail })
            }
        }
        let (lhs, rhs) = (post * marg, lik * prior);
        if (lhs - rhs).abs() > tolerance {
            findings.push(ConsistencyFinding::BayesViolation {
                posterior_times_marginal: lhs,
                likelihood_times_prior: rhs,
            });
        }
    }

    if let (Some(prior), Some(lik), Some(lik_not), Some(marg)) = (prior, lik, lik_not, marg) {
        let implied = lik * prior + lik_not * (1.0 - prior);
        if (marg - implied).abs() > tolerance {
            findings.push(ConsistencyFinding::TotalProbabilityViolation {
                marginal: marg,
                implied,
            });
        }
    }

    if let (Some(prior), Some(post), Some(lik), Some(lik_not)) = (prior, post, lik, lik_not) {
        let odds = |p: f64| p / (1.0 - p);
        if prior > 0.0 && prior < 1.0 && post > 0.0 && post < 1.0 && lik > 0.0 && lik_not > 0.0 {
            let g = (lik / lik_not).log10();
            let lor = (odds(post) / odds(prior)).log10();
            if (g - lor).abs() > tolerance {
                findings.push(ConsistencyFinding::GoodMismatch {
                    good: g,
                    log_odds_ratio: lor,
                });
            }
        }
    }

    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn qualitative_scale_table() {
        assert_eq!(qualitative_to_probability(QualitativeLevel::Neutral), 0.5);
        assert_eq!(qualitative_to_probability(QualitativeLevel::Certain), 1.0);
        assert_eq!(
            qualitative_to_probability(QualitativeLevel::VerySurprised),
            0.01
        );
        let all: Vec<f64> = QualitativeLevel::ALL
            .iter()
            .map(|l| l.probability())
            .collect();
        assert_eq!(all, vec![1.0, 0.99, 0.9, 0.5, 0.1, 0.01]);
    }

    #[test]
    fn keynes_neutral_to_confident() {
        let neutral = QualitativeLevel::Neutral.probability();
        let confident = QualitativeLevel::Confident.probability();
        let k = keynes(neutral, confident, 10.0).unwrap();
        // log10(1.8)
        assert!(close(k.value.get(), 0.255_272_505_103_306, 1e-12));
        assert!(close(k.value.get(), 0.26, 0.005));
    }

    #[test]
    fn keynes_examples() {
        assert_eq!(keynes(0.3, 0.3, 10.0).unwrap().value.get(), 0.0);
        assert!(close(
            keynes(0.25, 0.5, 2.0).unwrap().value.get(),
            1.0,
            1e-15
        ));
        assert_eq!(
            keynes(0.5, 0.0, 10.0).unwrap().value.get(),
            f64::NEG_INFINITY
        );
        assert!(matches!(
            keynes(0.0, 0.5, 10.0),
            Err(MeasureError::ZeroDenominator { .. })
        ));
        assert!(matches!(
            keynes(0.5, 0.5, 1.0),
            Err(MeasureError::InvalidBase { .. })
        ));
        assert!(matches!(
            keynes(0.5, 1.2, 10.0),
            Err(MeasureError::NotAProbability { .. })
        ));
    }

    #[test]
    fn l_keynes_examples() {
        assert!(close(
            l_keynes(0.9, 0.5, 10.0).unwrap().value.get(),
            0.255_272_505_103_306,
            1e-12
        ));
        assert_eq!(l_keynes(0.4, 0.4, 10.0).unwrap().value.get(), 0.0);
        assert_eq!(
            l_keynes(0.0, 0.4, 10.0).unwrap().value.get(),
            f64::NEG_INFINITY
        );
        assert!(l_keynes(0.4, 0.0, 10.0).is_err());
    }

    #[test]
    fn good_examples() {
        // log10(9)
        assert!(close(
            good(0.9, 0.1, 10.0).unwrap().value.get(),
            0.954_242_509_439_325,
            1e-12
        ));
        assert_eq!(good(0.3, 0.3, 10.0).unwrap().value.get(), 0.0);
        assert!(good(0.3, 0.0, 10.0).is_err());
    }

    #[test]
    fn good_matches_odds_form_on_enumerated_joint() {
        // Joint over {C,¬C}×{E,¬E} with P(C)=0.5, P(C|E)=0.9, P(E)=0.5.
        let (ce, c_ne, nc_e, nc_ne) = (0.45, 0.05, 0.05, 0.45);
        let prior = ce + c_ne;
        let marginal = ce + nc_e;
        let posterior = ce / marginal;
        let lik = ce / prior;
        let lik_not = nc_e / (nc_e + nc_ne);
        let odds = |p: f64| p / (1.0 - p);
        assert!(close(odds(posterior) / odds(prior), 9.0, 1e-12));
        let g = good(lik, lik_not, 10.0).unwrap().value.get();
        assert!(close(g, 9f64.log10(), 1e-12));
    }

    #[test]
    fn carnap_examples() {
        assert!(close(
            carnap(0.25, 0.5, 0.5).unwrap().value.get(),
            0.0,
            1e-15
        ));
        assert!(close(
            carnap(0.45, 0.5, 0.5).unwrap().value.get(),
            0.2,
            1e-15
        ));
        assert!(matches!(
            carnap(0.6, 0.5, 0.9),
            Err(MeasureError::Incoherent { .. })
        ));
        assert!(matches!(
            carnap(0.0, 0.8, 0.8),
            Err(MeasureError::Incoherent { .. })
        ));
    }

    #[test]
    fn diversity_boost_examples() {
        assert_eq!(diversity_boost(0.95, 0.95, 10.0).unwrap().get(), 0.0);
        assert!(close(
            diversity_boost(0.9, 0.3, 10.0).unwrap().get(),
            0.477_121_254_719_662,
            1e-12
        ));
        assert!(diversity_boost(0.1, 0.5, 10.0).unwrap().get() < 0.0);
        assert!(diversity_boost(0.1, 0.0, 10.0).is_err());
    }

    fn el(prior: f64, post: f64, lik: f64, marg: f64) -> Elicitation {
        Elicitation {
            prior: Some(Judgment::Numeric(prior)),
            posterior: Some(Judgment::Numeric(post)),
            likelihood: Some(Judgment::Numeric(lik)),
            likelihood_not: None,
            marginal: Some(Judgment::Numeric(marg)),
        }
    }

    #[test]
    fn cross_check_consistent() {
        assert!(cross_check(&el(0.5, 0.9, 0.9, 0.5), 1e-9).is_empty());
    }

    #[test]
    fn cross_check_inconsistent() {
        let findings = cross_check(&el(0.5, 0.9, 0.75, 0.5), 1e-9);
        assert!(findings
            .iter()
            .any(|f| matches!(f, ConsistencyFinding::KeynesMismatch { .. })));
        assert!(findings
            .iter()
            .any(|f| matches!(f, ConsistencyFinding::BayesViolation { .. })));
        if let Some(ConsistencyFinding::KeynesMismatch { keynes, l_keynes }) = findings.first() {
            assert!(close(10f64.powf(*keynes), 1.8, 1e-12));
            assert!(close(10f64.powf(*l_keynes), 1.5, 1e-12));
        }
    }

    #[test]
    fn cross_check_insufficient_data() {
        let e = Elicitation {
            prior: Some(Judgment::Numeric(0.5)),
            posterior: Some(Judgment::Numeric(0.9)),
            ..Default::default()
        };
        assert!(cross_check(&e, 1e-9).is_empty());
    }

    #[test]
    fn total_probability_check() {
        let mut e = el(0.5, 0.9, 0.9, 0.5);
        e.likelihood_not = Some(Judgment::Numeric(0.1));
        assert!(cross_check(&e, 1e-9).is_empty());
        e.likelihood_not = Some(Judgment::Numeric(0.3));
        assert!(cross_check(&e, 1e-9)
            .iter()
            .any(|f| matches!(f, ConsistencyFinding::TotalProbabilityViolation { .. })));
    }

    #[test]
    fn judgments_serialize_by_name() {
        let e = Elicitation {
            prior: Some(Judgment::Qualitative(QualitativeLevel::Neutral)),
            posterior: Some(Judgment::Numeric(0.9)),
            ..Default::default()
        };
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"prior":"neutral","posterior":0.9}"#);
        assert_eq!(serde_json::from_str::<Elicitation>(&text).unwrap(), e);
    }

    #[test]
    fn infinity_sentinel_serialization() {
        let v = MeasureValue(f64::NEG_INFINITY);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#""-inf""#);
        assert_eq!(
            serde_json::to_string(&MeasureValue(f64::INFINITY)).unwrap(),
            r#""+inf""#
        );
        let back: MeasureValue = serde_json::from_str(r#""-inf""#).unwrap();
        assert_eq!(back, v);
    }
}
