//! Single-input Mamdani inference on `[0, 1]`.
//!
//! Pipeline: fuzzify the crisp input against the input terms, truncate each
//! rule's output term at its activation degree (min), combine the truncated
//! terms pointwise (max), and take the centroid of the result.

mod fcl;

pub use fcl::{parse_fcl, FclError, FclErrorKind};

use thiserror::Error;

/// Shipped FCL source for [`default_system`].
pub const DEFAULT_FCL: &str = include_str!("../../assets/default.fcl");

/// Default number of samples used by the centroid defuzzifier.
pub const DEFAULT_RESOLUTION: usize = 1001;
/// Lowest accepted defuzzifier resolution.
pub const MIN_RESOLUTION: usize = 101;

/// Independent accumulators in the centroid sums.
const LANES: usize = 8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FuzzyError {
    #[error("crisp input {0} outside [0, 1]")]
    InputOutOfRange(f64),
    #[error("membership function needs at least two vertices")]
    TooFewVertices,
    #[error("non-increasing x at vertex {index}")]
    NonIncreasing { index: usize },
    #[error("vertex {index} outside the unit square: ({x}, {mu})")]
    VertexOutOfRange { index: usize, x: f64, mu: f64 },
    #[error("system has no rules")]
    NoRules,
    #[error("unresolved term {0:?}")]
    UnresolvedTerm(String),
    #[error("duplicate term {0:?}")]
    DuplicateTerm(String),
    #[error("resolution {0} below minimum {MIN_RESOLUTION}")]
    Resolution(usize),
    #[error("default output {0} outside [0, 1]")]
    DefaultOutOfRange(f64),
}

/// Piecewise-linear membership function over `[0, 1]`, zero outside its vertex span.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipFunction {
    vertices: Vec<(f64, f64)>,
}

impl MembershipFunction {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self, FuzzyError> {
        if vertices.len() < 2 {
            return Err(FuzzyError::TooFewVertices);
        }
        for (index, &(x, mu)) in vertices.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&mu) {
                return Err(FuzzyError::VertexOutOfRange { index, x, mu });
            }
        }
        if let Some(index) = vertices.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(FuzzyError::NonIncreasing { index: index + 1 });
        }
        Ok(MembershipFunction { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.vertices[0];
        let last = self.vertices[self.vertices.len() - 1];
        if x < first.0 || x > last.0 {
            return 0.0;
        }
        // first vertex with vx >= x
        let hi = self.vertices.partition_point(|&(vx, _)| vx < x);
        if hi == 0 {
            return first.1;
        }
        let (x0, y0) = self.vertices[hi - 1];
        let (x1, y1) = self.vertices[hi];
        if x == x1 {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// A named membership function.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub name: String,
    pub function: MembershipFunction,
}

impl Term {
    pub fn new(name: impl Into<String>, vertices: Vec<(f64, f64)>) -> Result<Self, FuzzyError> {
        Ok(Term {
            name: name.into(),
            function: MembershipFunction::new(vertices)?,
        })
    }
}

/// `IF input IS antecedent THEN output IS consequent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyRule {
    pub antecedent: String,
    pub consequent: String,
}

/// A validated single-input, single-output Mamdani system with min activation,
/// max accumulation and centroid defuzzification.
#[derive(Debug, Clone)]
pub struct FuzzySystem {
    name: String,
    input_var: String,
    output_var: String,
    input_terms: Vec<Term>,
    output_terms: Vec<Term>,
    rules: Vec<FuzzyRule>,
    default_output: f64,
    resolution: usize,
    // resolved (input index, output index) per rule
    links: Vec<(usize, usize)>,
    // defuzzifier grid positions in [0, 1]
    abscissae: Vec<f64>,
    // output term samples on the defuzzifier grid, one row per output term
    samples: Vec<Vec<f64>>,
}

impl PartialEq for FuzzySystem {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.input_var == other.input_var
            && self.output_var == other.output_var
            && self.input_terms == other.input_terms
            && self.output_terms == other.output_terms
            && self.rules == other.rules
            && self.default_output == other.default_output
            && self.resolution == other.resolution
    }
}

/// Variable and block names of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemNames {
    pub block: String,
    pub input: String,
    pub output: String,
}

impl FuzzySystem {
    pub fn new(
        names: SystemNames,
        input_terms: Vec<Term>,
        output_terms: Vec<Term>,
        rules: Vec<FuzzyRule>,
        default_output: f64,
    ) -> Result<Self, FuzzyError> {
        if rules.is_empty() {
            return Err(FuzzyError::NoRules);
        }
        if !(0.0..=1.0).contains(&default_output) {
            return Err(FuzzyError::DefaultOutOfRange(default_output));
        }
        for terms in [&input_terms, &output_terms] {
            for (i, t) in terms.iter().enumerate() {
                if terms[..i].iter().any(|o| o.name == t.name) {
                    return Err(FuzzyError::DuplicateTerm(t.name.clone()));
                }
            }
        }
        let find = |terms: &[Term], name: &str| {
            terms
                .iter()
                .position(|t| t.name == name)
                .ok_or_else(|| FuzzyError::UnresolvedTerm(name.to_string()))
        };
        let links = rules
            .iter()
            .map(|r| Ok((find(&input_terms, &r.antecedent)?, find(&output_terms, &r.consequent)?)))
            .collect::<Result<Vec<_>, FuzzyError>>()?;

        let mut system = FuzzySystem {
            name: names.block,
            input_var: names.input,
            output_var: names.output,
            input_terms,
            output_terms,
            rules,
            default_output,
            resolution: DEFAULT_RESOLUTION,
            links,
            abscissae: Vec::new(),
            samples: Vec::new(),
        };
        system.resample();
        Ok(system)
    }

    /// Returns a copy using `resolution` centroid samples.
    pub fn with_resolution(mut self, resolution: usize) -> Result<Self, FuzzyError> {
        if resolution < MIN_RESOLUTION {
            return Err(FuzzyError::Resolution(resolution));
        }
        self.resolution = resolution;
        self.resample();
        Ok(self)
    }

    fn resample(&mut self) {
        let step = 1.0 / (self.resolution - 1) as f64;
        self.abscissae = (0..self.resolution).map(|j| j as f64 * step).collect();
        self.samples = self
            .output_terms
            .iter()
            .map(|t| (0..self.resolution).map(|j| t.function.eval(j as f64 * step)).collect())
            .collect();
    }

    pub fn names(&self) -> SystemNames {
        SystemNames {
            block: self.name.clone(),
            input: self.input_var.clone(),
            output: self.output_var.clone(),
        }
    }

    pub fn input_terms(&self) -> &[Term] {
        &self.input_terms
    }

    pub fn output_terms(&self) -> &[Term] {
        &self.output_terms
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Output returned when no rule fires.
    pub fn default_output(&self) -> f64 {
        self.default_output
    }

    /// Maps a crisp input in `[0, 1]` to a likelihood in `[0, 1]`.
    pub fn evaluate(&self, x: f64) -> Result<f64, FuzzyError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(FuzzyError::InputOutOfRange(x));
        }
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: f64) -> f64 {
        let mut mu: Vec<f64> = Vec::new();
        for &(input, output) in &self.links {
            let degree = self.input_terms[input].function.eval(x);
            if degree <= 0.0 {
                continue;
            }
            let samples = &self.samples[output];
            if mu.is_empty() {
                mu.extend(samples.iter().map(|&s| degree.min(s)));
            } else {
                for (m, &s) in mu.iter_mut().zip(samples) {
                    *m = m.max(degree.min(s));
                }
            }
        }
        if mu.is_empty() {
            return self.default_output;
        }

        // Trapezoid rule; the uniform step cancels in the ratio.
        let last = self.resolution - 1;
        let mut area = [0.0; LANES];
        let mut moment = [0.0; LANES];
        let chunks = mu.chunks_exact(LANES).zip(self.abscissae.chunks_exact(LANES));
        for (m, y) in chunks {
            for lane in 0..LANES {
                area[lane] += m[lane];
                moment[lane] += m[lane] * y[lane];
            }
        }
        let done = mu.len() - mu.len() % LANES;
        let mut area: f64 = area.iter().sum();
        let mut moment: f64 = moment.iter().sum();
        for (m, y) in mu[done..].iter().zip(&self.abscissae[done..]) {
            area += m;
            moment += m * y;
        }
        area -= 0.5 * (mu[0] + mu[last]);
        moment -= 0.5 * mu[last];
        if area <= 0.0 {
            self.default_output
        } else {
            (moment / area).clamp(0.0, 1.0)
        }
    }

    /// Serializes the system as FCL text accepted by [`parse_fcl`].
    pub fn to_fcl(&self) -> String {
        fcl::write_fcl(self)
    }
}

/// Two-rule system: input terms `close_to_r(x) = x` and `close_to_R(x) = 1 - x`,
/// output terms `adjacent` (rising) and `non_adjacent` (falling).
pub fn default_system() -> FuzzySystem {
    let names = SystemNames {
        block: "adjacency".into(),
        input: "closeness".into(),
        output: "likelihood".into(),
    };
    let input = vec![
        Term::new("close_to_r", vec![(0.0, 0.0), (1.0, 1.0)]).expect("valid term"),
        Term::new("close_to_R", vec![(0.0, 1.0), (1.0, 0.0)]).expect("valid term"),
    ];
    let output = vec![
        Term::new("adjacent", vec![(0.0, 0.0), (1.0, 1.0)]).expect("valid term"),
        Term::new("non_adjacent", vec![(0.0, 1.0), (1.0, 0.0)]).expect("valid term"),
    ];
    let rules = vec![
        FuzzyRule {
            antecedent: "close_to_r".into(),
            consequent: "adjacent".into(),
        },
        FuzzyRule {
            antecedent: "close_to_R".into(),
            consequent: "non_adjacent".into(),
        },
    ];
    FuzzySystem::new(names, input, output, rules, 0.5).expect("default system is valid")
}
