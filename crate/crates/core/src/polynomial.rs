//! Bivariate polynomials `Σ c x^i y^j` with analytic derivatives.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

#[inline]
fn pow(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}

impl Polynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    pub fn from_triples(terms: &[(u32, u32, f64)]) -> Self {
        Self::new(
            terms
                .iter()
                .map(|&(i, j, coeff)| Monomial { i, j, coeff })
                .collect(),
        )
    }

    pub fn constant(c: f64) -> Self {
        Self::from_triples(&[(0, 0, c)])
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|t| t.coeff != 0.0)
            .map(|t| t.i + t.j)
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff * s,
                    ..*t
                })
                .collect(),
        )
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * pow(x[0], t.i) * pow(x[1], t.j))
            .sum()
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for t in &self.terms {
            if t.i > 0 {
                g[0] += t.coeff * t.i as f64 * pow(x[0], t.i - 1) * pow(x[1], t.j);
            }
            if t.j > 0 {
                g[1] += t.coeff * t.j as f64 * pow(x[0], t.i) * pow(x[1], t.j - 1);
            }
        }
        g
    }

    pub fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        for t in &self.terms {
            let (i, j, c) = (t.i, t.j, t.coeff);
            if i > 1 {
                h[0][0] += c * (i * (i - 1)) as f64 * pow(x[0], i - 2) * pow(x[1], j);
            }
            if j > 1 {
                h[1][1] += c * (j * (j - 1)) as f64 * pow(x[0], i) * pow(x[1], j - 2);
            }
            if i > 0 && j > 0 {
                h[0][1] += c * (i * j) as f64 * pow(x[0], i - 1) * pow(x[1], j - 1);
            }
        }
        h[1][0] = h[0][1];
        h
    }
}
