//! Series augmented with single logarithms.

use crate::series::MultiSeries;
use crate::SeriesError;

/// `s₀ + Σ_b s_b · log q_b`, all components sharing arity and cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    plain: MultiSeries,
    log_parts: Vec<MultiSeries>,
}

impl LogSeries {
    pub fn new(plain: MultiSeries, log_parts: Vec<MultiSeries>) -> Result<Self, SeriesError> {
        if log_parts.len() != plain.nvars() {
            return Err(SeriesError::ArityMismatch {
                expected: plain.nvars(),
                got: log_parts.len(),
            });
        }
        for p in &log_parts {
            plain.check_compatible(p)?;
        }
        Ok(LogSeries { plain, log_parts })
    }

    pub fn zero(nvars: usize, cutoff: u32) -> Self {
        LogSeries {
            plain: MultiSeries::zero(nvars, cutoff),
            log_parts: vec![MultiSeries::zero(nvars, cutoff); nvars],
        }
    }

    /// `c · log q_var`.
    pub fn log_var(nvars: usize, cutoff: u32, var: usize, c: crate::Rational) -> Self {
        let mut out = Self::zero(nvars, cutoff);
        out.log_parts[var] = MultiSeries::constant(nvars, cutoff, c);
        out
    }

    pub fn plain(&self) -> &MultiSeries {
        &self.plain
    }

    pub fn log_parts(&self) -> &[MultiSeries] {
        &self.log_parts
    }

    pub fn nvars(&self) -> usize {
        self.plain.nvars()
    }

    pub fn cutoff(&self) -> u32 {
        self.plain.cutoff()
    }

    pub fn is_zero(&self) -> bool {
        self.plain.is_zero() && self.log_parts.iter().all(MultiSeries::is_zero)
    }

    pub fn add(&self, other: &LogSeries) -> Result<LogSeries, SeriesError> {
        let plain = self.plain.add(&other.plain)?;
        let log_parts = self
            .log_parts
            .iter()
            .zip(&other.log_parts)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(LogSeries { plain, log_parts })
    }

    pub fn add_plain(&self, s: &MultiSeries) -> Result<LogSeries, SeriesError> {
        Ok(LogSeries {
            plain: self.plain.add(s)?,
            log_parts: self.log_parts.clone(),
        })
    }

    pub fn scale(&self, c: &crate::Rational) -> LogSeries {
        LogSeries {
            plain: self.plain.scale(c),
            log_parts: self.log_parts.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `θ_var`, using `θ_a(s · log q_b) = (θ_a s) log q_b + δ_ab s`.
    pub fn euler(&self, var: usize) -> LogSeries {
        let plain = self.plain.euler(var).add_unchecked(&self.log_parts[var]);
        LogSeries {
            plain,
            log_parts: self.log_parts.iter().map(|p| p.euler(var)).collect(),
        }
    }

    /// Multiplication by `c · q^m`; overflow beyond the cutoff is discarded.
    pub fn mul_monomial(&self, m: &crate::Monomial, c: &crate::Rational) -> LogSeries {
        LogSeries {
            plain: self.plain.mul_monomial(m, c),
            log_parts: self
                .log_parts
                .iter()
                .map(|p| p.mul_monomial(m, c))
                .collect(),
        }
    }
}
