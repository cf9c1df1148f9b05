//! Synthetic data-generating distributions with known means.
//!
//! Each kind exposes its exact mean (and variance where finite), so
//! simulation studies can score estimators against the truth. Sampling is
//! driven by an explicit [`RngStream`].

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::importance::expo_is_term;
use crate::rng::RngStream;
use crate::sample::Sample;

/// Tagged description of a synthetic distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    SkewNormal { location: f64, scale: f64, shape: f64 },
    /// Location-scale Pareto: `location + scale * U^(-1/shape)`.
    Pareto { location: f64, scale: f64, shape: f64 },
    Lognormal { mu: f64, sigma: f64 },
    Beta { a: f64, b: f64 },
    /// Shifted exponential: `offset + Expo(rate)`.
    Expo { rate: f64, offset: f64 },
    /// `Expo(rate) + t_scale * t(t_dof)`, the t component centered at zero.
    ExpoPlusT { rate: f64, t_dof: f64, t_scale: f64 },
    /// Symmetric three-point law: `+-n_ref^2 sigma` each with probability
    /// `1/(2 n_ref^p_exponent)`, zero otherwise.
    ThreePoint { sigma: f64, p_exponent: f64, n_ref: u32 },
    /// `+sigma` with probability `1/2 + epsilon`, `-sigma` otherwise; the
    /// mean-median gap approaches one standard deviation as epsilon -> 0.
    TwoPointMaxBias { sigma: f64, epsilon: f64 },
    /// Exponential-tilting importance-sampling terms `lambda X e^{-(lambda-1)X}`
    /// with `X ~ Expo(1)`; unbiased for `1/lambda`, infinite variance once
    /// `1/lambda >= 2`.
    ExpoIS { lambda: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        let ok = match *self {
            Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            SkewNormal {
                location,
                scale,
                shape,
            } => location.is_finite() && scale > 0.0 && shape.is_finite(),
            Pareto {
                location,
                scale,
                shape,
            } => location.is_finite() && scale > 0.0 && shape > 0.0,
            Lognormal { mu, sigma } => mu.is_finite() && sigma > 0.0,
            Beta { a, b } => a > 0.0 && b > 0.0,
            Expo { rate, offset } => rate > 0.0 && offset.is_finite(),
            ExpoPlusT {
                rate,
                t_dof,
                t_scale,
            } => rate > 0.0 && t_dof > 0.0 && t_scale >= 0.0,
            ThreePoint {
                sigma,
                p_exponent,
                n_ref,
            } => sigma > 0.0 && p_exponent >= 0.0 && n_ref >= 1,
            TwoPointMaxBias { sigma, epsilon } => sigma > 0.0 && (0.0..0.5).contains(&epsilon),
            ExpoIS { lambda } => lambda > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConfigError(format!("invalid parameters: {self:?}")))
        }
    }

    /// Exact mean, when it exists.
    pub fn true_mean(&self) -> Result<f64> {
        use DistributionSpec::*;
        self.validate()?;
        match *self {
            Normal { mean, .. } => Ok(mean),
            SkewNormal {
                location,
                scale,
                shape,
            } => {
                let delta = shape / (1.0 + shape * shape).sqrt();
                Ok(location + scale * delta * (2.0 / std::f64::consts::PI).sqrt())
            }
            Pareto {
                location,
                scale,
                shape,
            } => {
                if shape <= 1.0 {
                    Err(Error::UndefinedMean(format!("pareto shape {shape}")))
                } else {
                    Ok(location + scale * shape / (shape - 1.0))
                }
            }
            Lognormal { mu, sigma } => Ok((mu + 0.5 * sigma * sigma).exp()),
            Beta { a, b } => Ok(a / (a + b)),
            Expo { rate, offset } => Ok(1.0 / rate + offset),
            ExpoPlusT { rate, t_dof, .. } => {
                if t_dof <= 1.0 {
                    Err(Error::UndefinedMean(format!("t dof {t_dof}")))
                } else {
                    Ok(1.0 / rate)
                }
            }
            ThreePoint { .. } => Ok(0.0),
            TwoPointMaxBias { sigma, epsilon } => Ok(2.0 * epsilon * sigma),
            ExpoIS { lambda } => Ok(1.0 / lambda),
        }
    }

    /// Exact variance; an error marks parameter regions where it is
    /// undefined or infinite.
    pub fn true_variance(&self) -> Result<f64> {
        use DistributionSpec::*;
        self.validate()?;
        match *self {
            Normal { sd, .. } => Ok(sd * sd),
            SkewNormal { scale, shape, .. } => {
                let d2 = shape * shape / (1.0 + shape * shape);
                Ok(scale * scale * (1.0 - 2.0 * d2 / std::f64::consts::PI))
            }
            Pareto { scale, shape, .. } => {
                if shape <= 2.0 {
                    Err(Error::DomainError(format!(
                        "pareto variance infinite for shape {shape}"
                    )))
                } else {
                    Ok(scale * scale * shape / ((shape - 1.0).powi(2) * (shape - 2.0)))
                }
            }
            Lognormal { mu, sigma } => {
                let s2 = sigma * sigma;
                Ok((s2.exp() - 1.0) * (2.0 * mu + s2).exp())
            }
            Beta { a, b } => Ok(a * b / ((a + b).powi(2) * (a + b + 1.0))),
            Expo { rate, .. } => Ok(1.0 / (rate * rate)),
            ExpoPlusT {
                rate,
                t_dof,
                t_scale,
            } => {
                if t_dof <= 2.0 {
                    Err(Error::DomainError(format!(
                        "t variance infinite for dof {t_dof}"
                    )))
                } else {
                    Ok(1.0 / (rate * rate) + t_scale * t_scale * t_dof / (t_dof - 2.0))
                }
            }
            ThreePoint {
                sigma,
                p_exponent,
                n_ref,
            } => Ok((n_ref as f64).powf(4.0 - p_exponent) * sigma * sigma),
            TwoPointMaxBias { sigma, epsilon } => {
                Ok(sigma * sigma * (1.0 - 4.0 * epsilon * epsilon))
            }
            ExpoIS { lambda } => {
                if lambda <= 0.5 {
                    Err(Error::DomainError(format!(
                        "tilted-term variance infinite for 1/lambda = {}",
                        1.0 / lambda
                    )))
                } else {
                    Ok(2.0 * lambda * lambda / (2.0 * lambda - 1.0).powi(3)
                        - 1.0 / (lambda * lambda))
                }
            }
        }
    }

    pub fn has_finite_variance(&self) -> bool {
        self.true_variance().is_ok()
    }
}

/// Draws `n` iid values; reproducible per stream.
pub fn sample_distribution(
    dist: &DistributionSpec,
    n: usize,
    stream: &RngStream,
) -> Result<Sample> {
    use DistributionSpec::*;
    dist.validate()?;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = stream.rng();
    let mut values = Vec::with_capacity(n);
    match *dist {
        Normal { mean, sd } => {
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                values.push(mean + sd * z);
            }
        }
        SkewNormal {
            location,
            scale,
            shape,
        } => {
            // exact two-normal representation, no rejection step
            let delta = shape / (1.0 + shape * shape).sqrt();
            let co = (1.0 - delta * delta).sqrt();
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                values.push(location + scale * (delta * z1.abs() + co * z2));
            }
        }
        Pareto {
            location,
            scale,
            shape,
        } => {
            for _ in 0..n {
                let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
                values.push(location + scale * u.powf(-1.0 / shape));
            }
        }
        Lognormal { mu, sigma } => {
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                values.push((mu + sigma * z).exp());
            }
        }
        Beta { a, b } => {
            let beta = BetaDist::new(a, b)
                .map_err(|e| Error::ConfigError(format!("beta({a}, {b}): {e}")))?;
            for _ in 0..n {
                values.push(beta.sample(&mut rng));
            }
        }
        Expo { rate, offset } => {
            for _ in 0..n {
                let e: f64 = rng.sample(Exp1);
                values.push(e / rate + offset);
            }
        }
        ExpoPlusT {
            rate,
            t_dof,
            t_scale,
        } => {
            // t variate as a chi-square scale mixture of normals
            let chi2 = rand_distr::Gamma::new(t_dof / 2.0, 2.0)
                .map_err(|e| Error::ConfigError(format!("chi-square dof {t_dof}: {e}")))?;
            for _ in 0..n {
                let e: f64 = rng.sample(Exp1);
                let z: f64 = rng.sample(StandardNormal);
                let w: f64 = chi2.sample(&mut rng);
                values.push(e / rate + t_scale * z * (t_dof / w).sqrt());
            }
        }
        ThreePoint {
            sigma,
            p_exponent,
            n_ref,
        } => {
            let spike = (n_ref as f64).powi(2) * sigma;
            let tail = 0.5 / (n_ref as f64).powf(p_exponent);
            for _ in 0..n {
                let u: f64 = rng.random();
                values.push(if u < tail {
                    spike
                } else if u < 2.0 * tail {
                    -spike
                } else {
                    0.0
                });
            }
        }
        TwoPointMaxBias { sigma, epsilon } => {
            for _ in 0..n {
                let u: f64 = rng.random();
                values.push(if u < 0.5 + epsilon { sigma } else { -sigma });
            }
        }
        ExpoIS { lambda } => {
            for _ in 0..n {
                let x: f64 = rng.sample(Exp1);
                values.push(expo_is_term(lambda, x));
            }
        }
    }
    Sample::new(values)
}

impl std::fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use DistributionSpec::*;
        match *self {
            Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
            SkewNormal {
                location,
                scale,
                shape,
            } => write!(f, "skewnormal({location},{scale},{shape})"),
            Pareto {
                location,
                scale,
                shape,
            } => write!(f, "pareto({location},{scale},{shape})"),
            Lognormal { mu, sigma } => write!(f, "lognormal({mu},{sigma})"),
            Beta { a, b } => write!(f, "beta({a},{b})"),
            Expo { rate, offset } => write!(f, "expo({rate},{offset})"),
            ExpoPlusT {
                rate,
                t_dof,
                t_scale,
            } => write!(f, "expot({rate},{t_dof},{t_scale})"),
            ThreePoint {
                sigma,
                p_exponent,
                n_ref,
            } => write!(f, "threepoint({sigma},{p_exponent},{n_ref})"),
            TwoPointMaxBias { sigma, epsilon } => write!(f, "twopoint({sigma},{epsilon})"),
            ExpoIS { lambda } => write!(f, "expois({lambda})"),
        }
    }
}

impl std::str::FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `kind(p1,p2,...)`, e.g. `pareto(0,1000,2.5)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::ConfigError(format!("missing '(' in '{s}'")))?;
        if !s.ends_with(')') {
            return Err(Error::ConfigError(format!("missing ')' in '{s}'")));
        }
        let kind = s[..open].trim().to_ascii_lowercase();
        let body = &s[open + 1..s.len() - 1];
        let args: Vec<f64> = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::ConfigError(format!("bad parameter '{p}': {e}")))
                })
                .collect::<Result<_>>()?
        };
        let want = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::ConfigError(format!(
                    "{kind} takes {k} parameters, got {}",
                    args.len()
                )))
            }
        };
        use DistributionSpec::*;
        let dist = match kind.as_str() {
            "normal" => {
                want(2)?;
                Normal {
                    mean: args[0],
                    sd: args[1],
                }
            }
            "skewnormal" => {
                want(3)?;
                SkewNormal {
                    location: args[0],
                    scale: args[1],
                    shape: args[2],
                }
            }
            "pareto" => {
                want(3)?;
                Pareto {
                    location: args[0],
                    scale: args[1],
                    shape: args[2],
                }
            }
            "lognormal" => {
                want(2)?;
                Lognormal {
                    mu: args[0],
                    sigma: args[1],
                }
            }
            "beta" => {
                want(2)?;
                Beta {
                    a: args[0],
                    b: args[1],
                }
            }
            "expo" => match args.len() {
                1 => Expo {
                    rate: args[0],
                    offset: 0.0,
                },
                2 => Expo {
                    rate: args[0],
                    offset: args[1],
                },
                k => {
                    return Err(Error::ConfigError(format!(
                        "expo takes 1 or 2 parameters, got {k}"
                    )))
                }
            },
            "expot" => {
                want(3)?;
                ExpoPlusT {
                    rate: args[0],
                    t_dof: args[1],
                    t_scale: args[2],
                }
            }
            "threepoint" => {
                want(3)?;
                if args[2] < 1.0 || args[2].fract() != 0.0 || args[2] > u32::MAX as f64 {
                    return Err(Error::ConfigError(format!(
                        "threepoint n_ref must be a positive integer, got {}",
                        args[2]
                    )));
                }
                ThreePoint {
                    sigma: args[0],
                    p_exponent: args[1],
                    n_ref: args[2] as u32,
                }
            }
            "twopoint" => {
                want(2)?;
                TwoPointMaxBias {
                    sigma: args[0],
                    epsilon: args[1],
                }
            }
            "expois" => {
                want(1)?;
                ExpoIS { lambda: args[0] }
            }
            other => return Err(Error::ConfigError(format!("unknown distribution '{other}'"))),
        };
        dist.validate()?;
        Ok(dist)
    }
}
