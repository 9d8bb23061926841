//! Truncated power series over a [`Weight`].

use crate::weight::Weight;

/// Coefficients `c_0, …, c_{n-1}` of a power series modulo `x^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<W> {
    pub coeffs: Vec<W>,
}

impl<W: Weight> Series<W> {
    pub fn new(mut coeffs: Vec<W>, order: usize) -> Self {
        coeffs.resize(order, W::zero());
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![W::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = W::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order();
        let mut out = vec![W::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Series { coeffs: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, w: &W) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.clone() * w.clone()).collect(),
        }
    }

    /// `x^k · self`, truncated.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = vec![W::zero(); n];
        for i in 0..n.saturating_sub(k) {
            out[i + k] = self.coeffs[i].clone();
        }
        Series { coeffs: out }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `1 / self`; requires a non-zero constant term.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.order();
        let c0 = self.coeffs.first()?.clone();
        if c0.is_zero() {
            return None;
        }
        let mut out: Vec<W> = Vec::with_capacity(n);
        out.push(W::one() / c0.clone());
        for j in 1..n {
            let mut acc = W::zero();
            for i in 1..=j {
                if !self.coeffs[i].is_zero() {
                    acc = acc + self.coeffs[i].clone() * out[j - i].clone();
                }
            }
            out.push(W::zero() - acc / c0.clone());
        }
        Some(Series { coeffs: out })
    }

    /// `Σ c_k x^k` evaluated numerically.
    pub fn eval(&self, x: &W) -> W {
        self.coeffs
            .iter()
            .rev()
            .fold(W::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}
