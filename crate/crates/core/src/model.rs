//! Problem data: polynomials, constraint generators, index families.

use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarPoly {
    coeffs: Vec<f64>,
}

impl ScalarPoly {
    /// `coeffs[k]` multiplies `t^k`. An empty list is the zero polynomial.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        ScalarPoly { coeffs }
    }

    pub fn zero() -> Self {
        ScalarPoly { coeffs: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree of the stored representation (trailing zeros not stripped).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> ScalarPoly {
        if self.coeffs.len() <= 1 {
            return ScalarPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        ScalarPoly { coeffs }
    }
}

/// A point of the index set `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IndexValue {
    /// Real index of an interval generator.
    Real(f64),
    /// Positive integer index of a countable generator.
    Natural(u64),
    /// Row position of an explicit finite generator.
    Position(usize),
}

impl IndexValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            IndexValue::Real(t) => t,
            IndexValue::Natural(k) => k as f64,
            IndexValue::Position(i) => i as f64,
        }
    }
}

impl Eq for IndexValue {}

impl PartialOrd for IndexValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IndexValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        fn rank(v: &IndexValue) -> u8 {
            match v {
                IndexValue::Real(_) => 0,
                IndexValue::Natural(_) => 1,
                IndexValue::Position(_) => 2,
            }
        }
        match (self, other) {
            (IndexValue::Real(a), IndexValue::Real(b)) => a.total_cmp(b),
            (IndexValue::Natural(a), IndexValue::Natural(b)) => a.cmp(b),
            (IndexValue::Position(a), IndexValue::Position(b)) => a.cmp(b),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Real(t) => write!(f, "{}", t),
            IndexValue::Natural(k) => write!(f, "{}", k),
            IndexValue::Position(i) => write!(f, "#{}", i),
        }
    }
}

/// Produces the constraint row `(a_t, b_t)` for each index `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConstraintGenerator {
    /// An explicit, ordered list of rows `a'x <= b`. `labels` carries the
    /// user-facing index value of each row (defaults to the row position).
    ExplicitFinite {
        rows: Vec<(Vec<f64>, f64)>,
        labels: Vec<f64>,
    },
    /// `T = [lo, hi]`, rows given by coordinate polynomials in `t`.
    IntervalPoly {
        lo: f64,
        hi: f64,
        a: Vec<ScalarPoly>,
        b: ScalarPoly,
    },
    /// `T = {1, 2, 3, ...}`, rows given by polynomials evaluated at `k`.
    CountablePoly { a: Vec<ScalarPoly>, b: ScalarPoly },
}

impl ConstraintGenerator {
    pub fn explicit(rows: Vec<(Vec<f64>, f64)>) -> Self {
        let labels = (0..rows.len()).map(|i| i as f64).collect();
        ConstraintGenerator::ExplicitFinite { rows, labels }
    }

    /// Number of variables the rows act on.
    pub fn dim(&self) -> usize {
        match self {
            ConstraintGenerator::ExplicitFinite { rows, .. } => {
                rows.first().map_or(0, |(a, _)| a.len())
            }
            ConstraintGenerator::IntervalPoly { a, .. } => a.len(),
            ConstraintGenerator::CountablePoly { a, .. } => a.len(),
        }
    }

    /// The full index list when `T` is finite.
    pub fn index_list(&self) -> Option<Vec<IndexValue>> {
        match self {
            ConstraintGenerator::ExplicitFinite { rows, .. } => {
                Some((0..rows.len()).map(IndexValue::Position).collect())
            }
            _ => None,
        }
    }
}

/// `inf c'x` subject to `a_t'x <= b_t` for all `t` in the generator's index set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSIP {
    pub n: usize,
    pub c: Vec<f64>,
    pub generator: ConstraintGenerator,
}

impl LinearSIP {
    pub fn new(c: Vec<f64>, generator: ConstraintGenerator) -> Result<Self, Error> {
        let n = c.len();
        if n == 0 {
            return Err(Error::InvalidArgument("objective has no coordinates".into()));
        }
        match &generator {
            ConstraintGenerator::ExplicitFinite { rows, labels } => {
                if rows.is_empty() {
                    return Err(Error::InvalidArgument("explicit generator has no rows".into()));
                }
                if labels.len() != rows.len() {
                    return Err(Error::InvalidArgument(format!(
                        "{} labels for {} rows",
                        labels.len(),
                        rows.len()
                    )));
                }
                for (i, (a, _)) in rows.iter().enumerate() {
                    if a.len() != n {
                        return Err(Error::InvalidArgument(format!(
                            "row {} has {} coefficients, objective has {}",
                            i,
                            a.len(),
                            n
                        )));
                    }
                }
            }
            ConstraintGenerator::IntervalPoly { lo, hi, a, .. } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidArgument(format!(
                        "interval [{}, {}] is not a nondegenerate bounded interval",
                        lo, hi
                    )));
                }
                if a.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "{} coordinate polynomials, objective has {} coordinates",
                        a.len(),
                        n
                    )));
                }
            }
            ConstraintGenerator::CountablePoly { a, .. } => {
                if a.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "{} coordinate polynomials, objective has {} coordinates",
                        a.len(),
                        n
                    )));
                }
            }
        }
        Ok(LinearSIP { n, c, generator })
    }

    /// Constraint row at index `t`: coefficients `a_t` and right-hand side `b_t`.
    pub fn eval_constraint(&self, idx: &IndexValue) -> Result<(Vec<f64>, f64), Error> {
        eval_constraint(&self.generator, idx)
    }
}

pub fn eval_constraint(
    gen: &ConstraintGenerator,
    idx: &IndexValue,
) -> Result<(Vec<f64>, f64), Error> {
    match (gen, idx) {
        (ConstraintGenerator::ExplicitFinite { rows, .. }, IndexValue::Position(i)) => rows
            .get(*i)
            .cloned()
            .ok_or_else(|| Error::IndexOutOfRange(format!("row {} of {}", i, rows.len()))),
        (ConstraintGenerator::IntervalPoly { lo, hi, a, b }, IndexValue::Real(t)) => {
            if !(*lo <= *t && *t <= *hi) {
                return Err(Error::IndexOutOfRange(format!(
                    "t = {} outside [{}, {}]",
                    t, lo, hi
                )));
            }
            Ok((a.iter().map(|p| p.eval(*t)).collect(), b.eval(*t)))
        }
        (ConstraintGenerator::CountablePoly { a, b }, IndexValue::Natural(k)) => {
            if *k == 0 {
                return Err(Error::IndexOutOfRange("countable indices start at 1".into()));
            }
            let t = *k as f64;
            Ok((a.iter().map(|p| p.eval(t)).collect(), b.eval(t)))
        }
        _ => Err(Error::IndexOutOfRange(format!(
            "index {} does not match the generator's index set",
            idx
        ))),
    }
}

/// Uniform grid of `n` points on `[lo, hi]`, endpoints exact.
///
/// Halving the step keeps existing points bit-identical: refining `n` to
/// `2n - 1` reproduces the old grid as a subset.
pub fn sample_interval(lo: f64, hi: f64, n: usize) -> Result<Vec<IndexValue>, Error> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 sample points, got {}",
            n
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "[{}, {}] is not a nondegenerate bounded interval",
            lo, hi
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = if i == n - 1 { hi } else { lo + i as f64 * step };
        out.push(IndexValue::Real(t));
    }
    Ok(out)
}

/// A family of finite subsets of the index set over which the dual is taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum IndexFamily {
    /// All singletons `{t}`.
    Singletons,
    /// Prefixes `{t_1, ..., t_m}` of a countable ordering.
    Prefixes,
    /// Every finite subset; materialised as the full sampled index set.
    AllFinite,
    /// An explicit list of finite subsets.
    Explicit(Vec<Vec<IndexValue>>),
}

impl IndexFamily {
    pub fn describe(&self) -> &'static str {
        match self {
            IndexFamily::Singletons => "singletons",
            IndexFamily::Prefixes => "prefixes",
            IndexFamily::AllFinite => "all finite subsets",
            IndexFamily::Explicit(_) => "explicit subsets",
        }
    }
}

/// Does the union of the family cover every index of `t`?
///
/// Decidable only for an explicit finite index list; the symbolic families
/// cover by construction.
pub fn family_is_covering(family: &IndexFamily, t: &[IndexValue]) -> bool {
    match family {
        IndexFamily::Singletons | IndexFamily::Prefixes | IndexFamily::AllFinite => true,
        IndexFamily::Explicit(subsets) => t
            .iter()
            .all(|idx| subsets.iter().any(|s| s.contains(idx))),
    }
}

/// [`family_is_covering`] against a generator's own index set. Errors unless
/// the generator is explicit and finite (the only decidable case).
pub fn family_is_covering_for(
    family: &IndexFamily,
    gen: &ConstraintGenerator,
) -> Result<bool, Error> {
    let t = gen.index_list().ok_or_else(|| {
        Error::Unsupported("covering is only decidable for an explicit finite index set".into())
    })?;
    Ok(family_is_covering(family, &t))
}

/// Is the family directed: does every pair of members have a member
/// containing their union?
///
/// `index_count` is the size of the index set when known (`None` = infinite).
/// Singletons are directed only when there are fewer than two indices.
pub fn family_is_directed(family: &IndexFamily, index_count: Option<usize>) -> bool {
    match family {
        IndexFamily::Prefixes | IndexFamily::AllFinite => true,
        IndexFamily::Singletons => matches!(index_count, Some(k) if k < 2),
        IndexFamily::Explicit(subsets) => {
            for (i, s1) in subsets.iter().enumerate() {
                for s2 in subsets.iter().skip(i + 1) {
                    let union_contained = subsets.iter().any(|m| {
                        s1.iter().all(|v| m.contains(v)) && s2.iter().all(|v| m.contains(v))
                    });
                    if !union_contained {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Materialise family members over a sampled index list, up to `max_count`
/// members. Singletons come in sample order, prefixes in increasing length.
pub fn expand_family(
    family: &IndexFamily,
    sampled_t: &[IndexValue],
    max_count: usize,
) -> Vec<Vec<IndexValue>> {
    let members: Vec<Vec<IndexValue>> = match family {
        IndexFamily::Singletons => sampled_t.iter().map(|v| vec![*v]).collect(),
        IndexFamily::Prefixes => (1..=sampled_t.len())
            .map(|m| sampled_t[..m].to_vec())
            .collect(),
        IndexFamily::AllFinite => vec![sampled_t.to_vec()],
        IndexFamily::Explicit(subsets) => subsets.clone(),
    };
    members.into_iter().take(max_count).collect()
}
