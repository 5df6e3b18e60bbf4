//! Closed-form constants of the shape `r * pi^p * 2^t * prod Gamma(c)^k`.
//!
//! Every Gamma value with a rational argument is reduced to a rational
//! multiple of `Gamma(c)` with `c` in `(0, 1]`; `Gamma(1) = 1` and
//! `Gamma(1/2) = pi^(1/2)` are folded away, so two equal products have the
//! same representation. Powers of two keep their integer part in `r` and only
//! a fractional exponent in `t`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{floor_q, format_q, q, qf, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbolic {
    rational: Q,
    pi_pow: Q,
    two_pow: Q,
    gamma: BTreeMap<Q, i64>,
}

impl Symbolic {
    pub fn rational(r: Q) -> Self {
        Symbolic { rational: r, pi_pow: Q::zero(), two_pow: Q::zero(), gamma: BTreeMap::new() }
            .canonical()
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    pub fn pi_pow(e: Q) -> Self {
        Symbolic { rational: Q::one(), pi_pow: e, two_pow: Q::zero(), gamma: BTreeMap::new() }
    }

    /// `2^e` for rational `e`.
    pub fn two_pow(e: &Q) -> Self {
        Symbolic { rational: Q::one(), pi_pow: Q::zero(), two_pow: e.clone(), gamma: BTreeMap::new() }
            .canonical()
    }

    /// `Gamma(x)` for rational `x` away from the poles.
    pub fn gamma(x: &Q) -> Result<Self> {
        if x.is_integer() && !x.is_positive() {
            return Err(Error::SingularParameter(format!("Gamma({}) is a pole", format_q(x))));
        }
        let fl = Q::from_integer(floor_q(x));
        let core = if x.is_integer() { Q::one() } else { x - &fl };
        // Gamma(x) = Gamma(core) * prod_{i} (core + i) for x > core,
        // Gamma(x) = Gamma(core) / prod_{i} (x + i) for x < core.
        let mut r = Q::one();
        if x >= &core {
            let steps = (x - &core).to_integer().to_i64().unwrap_or(0);
            for i in 0..steps {
                r *= &core + q(i);
            }
        } else {
            let steps = (&core - x).to_integer().to_i64().unwrap_or(0);
            for i in 0..steps {
                r /= x + q(i);
            }
        }
        let mut s = Symbolic::rational(r);
        if core == qf(1, 2) {
            s.pi_pow = qf(1, 2);
        } else if !core.is_one() {
            s.gamma.insert(core, 1);
        }
        Ok(s)
    }

    fn canonical(mut self) -> Self {
        if self.rational.is_zero() {
            self.pi_pow = Q::zero();
            self.two_pow = Q::zero();
            self.gamma.clear();
            return self;
        }
        let fl = floor_q(&self.two_pow);
        if !fl.is_zero() {
            let p = fl.to_i64().expect("power of two fits in i64");
            let factor = if p >= 0 {
                Q::from_integer(num_traits::pow(num_bigint::BigInt::from(2), p as usize))
            } else {
                Q::new(One::one(), num_traits::pow(num_bigint::BigInt::from(2), (-p) as usize))
            };
            self.rational *= factor;
            self.two_pow -= Q::from_integer(fl);
        }
        self.gamma.retain(|_, e| *e != 0);
        self
    }

    pub fn mul(&self, other: &Symbolic) -> Symbolic {
        let mut gamma = self.gamma.clone();
        for (c, e) in &other.gamma {
            *gamma.entry(c.clone()).or_insert(0) += e;
        }
        Symbolic {
            rational: &self.rational * &other.rational,
            pi_pow: &self.pi_pow + &other.pi_pow,
            two_pow: &self.two_pow + &other.two_pow,
            gamma,
        }
        .canonical()
    }

    pub fn recip(&self) -> Result<Symbolic> {
        if self.rational.is_zero() {
            return Err(Error::SingularParameter("division by a zero constant".into()));
        }
        Ok(Symbolic {
            rational: self.rational.recip(),
            pi_pow: -self.pi_pow.clone(),
            two_pow: -self.two_pow.clone(),
            gamma: self.gamma.iter().map(|(c, e)| (c.clone(), -e)).collect(),
        }
        .canonical())
    }

    pub fn div(&self, other: &Symbolic) -> Result<Symbolic> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn scale(&self, r: &Q) -> Symbolic {
        self.mul(&Symbolic::rational(r.clone()))
    }

    pub fn powi(&self, k: u32) -> Symbolic {
        (0..k).fold(Symbolic::one(), |acc, _| acc.mul(self))
    }

    /// The exact value when no transcendental factor remains.
    pub fn as_rational(&self) -> Option<Q> {
        (self.pi_pow.is_zero() && self.two_pow.is_zero() && self.gamma.is_empty())
            .then(|| self.rational.clone())
    }

    pub fn rational_part(&self) -> &Q {
        &self.rational
    }

    pub fn pi_exponent(&self) -> &Q {
        &self.pi_pow
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn to_json(&self) -> SymbolicJson {
        SymbolicJson {
            rational: format_q(&self.rational),
            pi_pow: format_q(&self.pi_pow),
            two_pow: format_q(&self.two_pow),
            gamma: self.gamma.iter().map(|(c, e)| (format_q(c), *e)).collect(),
        }
    }

    /// Floating-point approximation, for display only.
    pub fn approx(&self) -> f64 {
        let mut v = self.rational.to_f64().unwrap_or(f64::NAN);
        v *= std::f64::consts::PI.powf(self.pi_pow.to_f64().unwrap_or(f64::NAN));
        v *= 2f64.powf(self.two_pow.to_f64().unwrap_or(f64::NAN));
        for (c, e) in &self.gamma {
            v *= gamma_f64(c.to_f64().unwrap_or(f64::NAN)).powi(*e as i32);
        }
        v
    }
}

/// Lanczos approximation, only used by [`Symbolic::approx`].
fn gamma_f64(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_f64(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + G + 0.5;
    let mut a = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

impl fmt::Display for Symbolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let transcendental =
            !self.pi_pow.is_zero() || !self.two_pow.is_zero() || !self.gamma.is_empty();
        if !self.rational.is_one() || !transcendental {
            parts.push(format_q(&self.rational));
        }
        if !self.pi_pow.is_zero() {
            parts.push(format!("pi^({})", format_q(&self.pi_pow)));
        }
        if !self.two_pow.is_zero() {
            parts.push(format!("2^({})", format_q(&self.two_pow)));
        }
        for (c, e) in &self.gamma {
            parts.push(format!("Gamma({})^({e})", format_q(c)));
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Structural JSON form, e.g.
/// `{"rational":"2","pi_pow":"1","two_pow":"0","gamma":[["1/3",1]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicJson {
    pub rational: String,
    pub pi_pow: String,
    pub two_pow: String,
    pub gamma: Vec<(String, i64)>,
}

/// `n!` as an exact rational, convenient inside formulas.
pub fn factorial_q(n: u64) -> Q {
    Q::from_integer(crate::rational::factorial(n))
}
