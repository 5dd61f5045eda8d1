//! Fourier multiplier symbols 𝔪(n) and the composite operator symbol |n|^{2s}𝔪(n).
//!
//! A multiplier is admissible when it is even in n (M1), non-decreasing on
//! n ≥ 1 (M2) and pinched between two positive constants m0 < 𝔪(n) < m1 for
//! n ≠ 0 (M3). The [`MultiplierSpec::validate`] report checks all three on a
//! finite range; the solver itself never assumes more than what it evaluates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which symbol family the spec describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    /// 𝔪(n) ≡ 1, so the operator is the fractional Laplacian (-Δ)^s.
    Fractional,
    /// Intermediate Long Wave: 𝔪(n) = |coth(δn) - 1/(δn)| for n ≠ 0, 0 at n = 0.
    Ilw { depth: f64 },
    /// Tabulated values: `values[i]` is 𝔪(i + 1), so the table covers 1 ≤ |n| ≤ len.
    Table { values: Vec<f64> },
}

/// A multiplier symbol together with the dispersion exponent s and the
/// user-asserted hypothesis bounds m0, m1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub s: f64,
    pub kind: MultiplierKind,
    pub m0: f64,
    pub m1: f64,
}

/// One hypothesis violation found by [`MultiplierSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// M1: 𝔪(-n) ≠ 𝔪(n).
    Asymmetric { n: i64 },
    /// M2: 𝔪(n) < 𝔪(n-1) on the positive axis.
    Decreasing { n: i64, value: f64, previous: f64 },
    /// M3: 𝔪(n) outside (m0, m1) for n ≠ 0.
    OutOfBounds { n: i64, value: f64 },
}

/// Result of checking (M1)-(M3) on |n| ≤ n_max. Empty means all hold.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checked_up_to: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// coth(x) - 1/x, the ILW symbol before taking absolute values.
///
/// The direct formula cancels catastrophically as x -> 0 (both terms blow up
/// while the difference tends to 0 like x/3), so small arguments switch to the
/// Laurent tail x/3 - x^3/45 + 2x^5/945, which is exact to double precision
/// for |x| < 1e-3.
fn coth_minus_inv(x: f64) -> f64 {
    debug_assert!(x != 0.0);
    // odd function: evaluate on |x| so the symbol is even to the bit
    let a = x.abs();
    let value = if a < 1e-2 {
        let a2 = a * a;
        a / 3.0 - a * a2 / 45.0 + 2.0 * a * a2 * a2 / 945.0
    } else if a > 20.0 {
        // coth saturates at 1; expm1 underflows harmlessly
        let e = (-2.0 * a).exp();
        1.0 + 2.0 * e / (1.0 - e) - 1.0 / a
    } else {
        // coth(a) = 1 + 2/(e^{2a} - 1), with e^{2a}-1 via expm1
        1.0 + 2.0 / f64::exp_m1(2.0 * a) - 1.0 / a
    };
    value.copysign(x)
}

impl MultiplierSpec {
    /// Fractional Laplacian multiplier 𝔪 ≡ 1 with permissive bounds.
    pub fn fractional(s: f64) -> Self {
        Self {
            s,
            kind: MultiplierKind::Fractional,
            m0: 0.5,
            m1: 2.0,
        }
    }

    /// ILW multiplier of depth `delta`. The symbol increases from
    /// coth(δ) - 1/δ at n = 1 towards 1, so m0 below the first value and
    /// m1 = 1 are valid hypothesis constants.
    pub fn ilw(s: f64, delta: f64) -> Self {
        let first = coth_minus_inv(delta).abs();
        Self {
            s,
            kind: MultiplierKind::Ilw { depth: delta },
            m0: 0.5 * first,
            m1: 1.0,
        }
    }

    /// Tabulated multiplier. The bounds are deliberately required from the
    /// caller: M3 is a hypothesis to be asserted, not inferred from data.
    pub fn table(s: f64, values: Vec<f64>, m0: f64, m1: f64) -> Self {
        Self {
            s,
            kind: MultiplierKind::Table { values },
            m0,
            m1,
        }
    }

    pub fn with_bounds(mut self, m0: f64, m1: f64) -> Self {
        self.m0 = m0;
        self.m1 = m1;
        self
    }

    pub fn is_fractional(&self) -> bool {
        matches!(self.kind, MultiplierKind::Fractional)
    }

    /// The symbol 𝔪(n). Even in n by construction for all kinds.
    pub fn symbol(&self, n: i64) -> Result<f64> {
        let a = n.unsigned_abs() as usize;
        match &self.kind {
            MultiplierKind::Fractional => Ok(1.0),
            MultiplierKind::Ilw { depth } => {
                if n == 0 {
                    Ok(0.0)
                } else {
                    Ok(coth_minus_inv(depth * a as f64).abs())
                }
            }
            MultiplierKind::Table { values } => {
                if n == 0 {
                    Ok(0.0)
                } else if a <= values.len() {
                    Ok(values[a - 1])
                } else {
                    Err(Error::TableOutOfRange {
                        n,
                        n_max: values.len(),
                    })
                }
            }
        }
    }

    /// The symbol of 𝓛: |n|^{2s} 𝔪(n). Zero at n = 0 for every kind.
    pub fn operator_symbol(&self, n: i64) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let a = n.unsigned_abs() as f64;
        Ok(a.powf(2.0 * self.s) * self.symbol(n)?)
    }

    /// Largest |n| the symbol can be evaluated at (None = unbounded).
    pub fn max_mode(&self) -> Option<usize> {
        match &self.kind {
            MultiplierKind::Table { values } => Some(values.len()),
            _ => None,
        }
    }

    /// Check (M1)-(M3) numerically on 1 ≤ |n| ≤ n_max (clamped to the table
    /// length for tabulated symbols). Violations are report entries, never
    /// errors.
    pub fn validate(&self, n_max: usize) -> ValidationReport {
        let top = match self.max_mode() {
            Some(cap) => n_max.min(cap),
            None => n_max,
        };
        let mut violations = Vec::new();
        let mut prev = None;
        for n in 1..=top as i64 {
            let v = self
                .symbol(n)
                .expect("symbol within validated range must evaluate");
            let v_neg = self.symbol(-n).expect("mirror mode must evaluate");
            if v != v_neg {
                violations.push(Violation::Asymmetric { n });
            }
            if let Some(p) = prev {
                if v < p {
                    violations.push(Violation::Decreasing {
                        n,
                        value: v,
                        previous: p,
                    });
                }
            }
            if !(self.m0 < v && v < self.m1) {
                violations.push(Violation::OutOfBounds { n, value: v });
            }
            prev = Some(v);
        }
        ValidationReport {
            checked_up_to: top,
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Scalar reference values evaluated with a 30-digit library:
    //   coth(2) - 1/2 = 0.537314720727548095877809764768
    //   coth(1) - 1   = 0.313035285499331303636161246931
    const ILW_D1_N2: f64 = 0.537314720727548;
    const ILW_D1_N1: f64 = 0.313035285499331;

    #[test]
    fn fractional_symbol_is_one() {
        let spec = MultiplierSpec::fractional(0.5);
        assert_eq!(spec.symbol(7).unwrap(), 1.0);
        assert_eq!(spec.symbol(-7).unwrap(), 1.0);
    }

    #[test]
    fn ilw_symbol_values() {
        let spec = MultiplierSpec::ilw(0.5, 1.0);
        assert_eq!(spec.symbol(0).unwrap(), 0.0);
        assert!((spec.symbol(2).unwrap() - ILW_D1_N2).abs() < 1e-14);
        assert!((spec.symbol(1).unwrap() - ILW_D1_N1).abs() < 1e-14);
    }

    #[test]
    fn operator_symbol_values() {
        let spec = MultiplierSpec::fractional(0.5);
        assert!((spec.operator_symbol(3).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(spec.operator_symbol(0).unwrap(), 0.0);
        let spec1 = MultiplierSpec::fractional(1.0);
        assert!((spec1.operator_symbol(2).unwrap() - 4.0).abs() < 1e-14);
        // symmetry in n
        let ilw = MultiplierSpec::ilw(0.5, 1.0);
        for n in 1..=50 {
            assert_eq!(
                ilw.operator_symbol(n).unwrap(),
                ilw.operator_symbol(-n).unwrap()
            );
        }
    }

    #[test]
    fn table_out_of_range() {
        let spec = MultiplierSpec::table(0.5, vec![1.0, 1.1], 0.9, 1.2);
        assert!(spec.symbol(2).is_ok());
        assert!(matches!(
            spec.symbol(3),
            Err(Error::TableOutOfRange { n: 3, n_max: 2 })
        ));
    }

    #[test]
    fn validate_fractional_clean() {
        let report = MultiplierSpec::fractional(0.5).validate(100);
        assert!(report.is_ok());
        assert_eq!(report.checked_up_to, 100);
    }

    #[test]
    fn validate_ilw_bound_sensitivity() {
        // m(1) = 0.3130...: m0 = 0.3 is a valid lower bound, m0 = 0.32 is not.
        let ok = MultiplierSpec::ilw(0.5, 1.0).with_bounds(0.3, 1.0).validate(100);
        assert!(ok.is_ok());
        let bad = MultiplierSpec::ilw(0.5, 1.0).with_bounds(0.32, 1.0).validate(100);
        assert_eq!(bad.violations.len(), 1);
        assert!(matches!(
            bad.violations[0],
            Violation::OutOfBounds { n: 1, value } if (value - ILW_D1_N1).abs() < 1e-14
        ));
    }

    #[test]
    fn validate_decreasing_table() {
        let report = MultiplierSpec::table(0.5, vec![2.0, 1.0], 0.5, 3.0).validate(10);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Decreasing { n: 2, .. })));
        assert_eq!(report.checked_up_to, 2);
    }

    #[test]
    fn operator_symbol_strictly_increasing() {
        for spec in [
            MultiplierSpec::fractional(0.5),
            MultiplierSpec::fractional(1.0),
            MultiplierSpec::ilw(0.5, 1.0),
            MultiplierSpec::ilw(0.75, 0.3),
        ] {
            let mut prev = 0.0;
            for n in 1..=200 {
                let v = spec.operator_symbol(n).unwrap();
                assert!(v > prev, "symbol not increasing at n = {n} for {spec:?}");
                prev = v;
            }
        }
    }

    #[test]
    fn ilw_tends_to_one() {
        // The approach is governed by the 1/(delta n) tail: error ~ 1e-4 at
        // n = 1e4 and ~1e-7 at n = 1e7.
        let spec = MultiplierSpec::ilw(0.5, 1.0);
        let at_1e4 = spec.symbol(10_000).unwrap();
        assert!((at_1e4 - 1.0).abs() < 1.01e-4);
        let at_1e7 = spec.symbol(10_000_000).unwrap();
        assert!((at_1e7 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coth_minus_inv_small_argument() {
        // Laurent tail x/3 - x^3/45 + ... checked against 25-digit values
        assert!((coth_minus_inv(1e-4) - 3.3333333311111111e-5).abs() < 1e-19);
        assert!((coth_minus_inv(1e-3) - 3.3333331111111323e-4).abs() < 1e-18);
        // branch seam: both formulas agree around |x| = 1e-2
        let below = coth_minus_inv(0.999e-2);
        let above = coth_minus_inv(1.001e-2);
        assert!((above - below - (1.001e-2 - 0.999e-2) / 3.0).abs() < 5e-10);
        // odd function, so the symbol |.| is even
        assert_eq!(coth_minus_inv(-0.7), -coth_minus_inv(0.7));
    }
}
