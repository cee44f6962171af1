//! Coherent joint distributions over a claim C and evidence E.

use rand::Rng;

/// The four cells of the joint distribution, indexed by (C, E).
#[derive(Debug, Clone, Copy)]
pub struct Joint {
    pub c_e: f64,
    pub c_not_e: f64,
    pub not_c_e: f64,
    pub not_c_not_e: f64,
}

impl Joint {
    /// Uniform over the simplex, with every cell at least `floor` before
    /// renormalizing so that no conditional is undefined.
    pub fn sample(rng: &mut impl Rng, floor: f64) -> Joint {
        // exponential spacings give a uniform point on the simplex
        let mut w = [0.0f64; 4];
        for x in &mut w {
            let u: f64 = rng.gen_range(f64::EPSILON..1.0);
            *x = -u.ln() + floor;
        }
        let total: f64 = w.iter().sum();
        Joint {
            c_e: w[0] / total,
            c_not_e: w[1] / total,
            not_c_e: w[2] / total,
            not_c_not_e: w[3] / total,
        }
    }

    pub fn p_c(&self) -> f64 {
        self.c_e + self.c_not_e
    }

    pub fn p_e(&self) -> f64 {
        self.c_e + self.not_c_e
    }

    pub fn p_c_given_e(&self) -> f64 {
        self.c_e / self.p_e()
    }

    pub fn p_e_given_c(&self) -> f64 {
        self.c_e / self.p_c()
    }

    pub fn p_e_given_not_c(&self) -> f64 {
        self.not_c_e / (self.not_c_e + self.not_c_not_e)
    }

    /// log of P(C∧E) / (P(C)·P(E)); both Keynes forms reduce to this.
    pub fn log_association(&self, base: f64) -> f64 {
        (self.c_e / (self.p_c() * self.p_e())).ln() / base.ln()
    }

    /// log of odds(C|E) / odds(C), from the cells.
    pub fn log_odds_ratio(&self, base: f64) -> f64 {
        let posterior_odds = self.c_e / self.not_c_e;
        let prior_odds = self.p_c() / (self.not_c_e + self.not_c_not_e);
        (posterior_odds / prior_odds).ln() / base.ln()
    }

    /// P(C∧E) − P(C)·P(E).
    pub fn covariance(&self) -> f64 {
        self.c_e * self.not_c_not_e - self.c_not_e * self.not_c_e
    }
}
