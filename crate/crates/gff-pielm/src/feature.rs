//! Random Fourier-feature hidden layer and its analytic derivatives.
//!
//! A layer holds `M` frozen neurons. Neuron `m` maps an input point `v` to
//! `phi(z)` with `z = delta_m * (w_m . v) + b_m`. For the cosine layer each
//! neuron carries its own frequency coefficient `delta_m` drawn from a linearly
//! spaced vector, so the hidden layer acts as a bank of single-frequency
//! Fourier features. The tanh baseline uses `delta_m = 1` throughout.
//!
//! All evaluation is pure; a constructed layer is immutable and can be shared
//! across threads.

use ndarray::{Array1, Array2};
use rand::distributions::Uniform;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Activation applied by every neuron of a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ActivationKind {
    /// `cos(delta_m * (w_m . v) + b_m)`, bounded in [-1, 1].
    GffCosine,
    /// `tanh(w_m . v + b_m)`, bounded in (-1, 1).
    VanillaTanh,
}

impl ActivationKind {
    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::GffCosine => "gff-cosine",
            ActivationKind::VanillaTanh => "vanilla-tanh",
        }
    }
}

/// Frozen hidden-layer parameters.
///
/// Reconstructing with identical arguments yields bit-identical parameters:
/// the seeded stream draws `W` row-major (neuron-major) first, then `b`.
#[derive(Debug, Clone)]
pub struct FeatureLayer {
    weights: Array2<f64>,
    biases: Array1<f64>,
    delta: Array1<f64>,
    kind: ActivationKind,
    seed: u64,
}

impl FeatureLayer {
    /// Builds the cosine layer with per-neuron frequency coefficients.
    ///
    /// `delta` is linearly spaced over `[delta1, delta_m_max]` (a single-point
    /// vector when `neurons == 1`), weights are standard normal and biases
    /// uniform on `[0, 2*pi]`.
    pub fn gff(
        neurons: usize,
        d_in: usize,
        delta1: f64,
        delta_m_max: f64,
        seed: u64,
    ) -> Result<Self> {
        if neurons == 0 || d_in == 0 {
            return Err(Error::InvalidParameter(format!(
                "layer needs neurons >= 1 and d_in >= 1, got {neurons}, {d_in}"
            )));
        }
        if !(delta1.is_finite() && delta_m_max.is_finite()) || delta1 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "frequency interval must be finite and positive, got [{delta1}, {delta_m_max}]"
            )));
        }
        if delta1 > delta_m_max {
            return Err(Error::InvalidParameter(format!(
                "frequency interval is inverted: [{delta1}, {delta_m_max}]"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights =
            Array2::from_shape_simple_fn((neurons, d_in), || rng.sample::<f64, _>(StandardNormal));
        let two_pi = 2.0 * std::f64::consts::PI;
        let biases = Array1::from_shape_simple_fn(neurons, || rng.gen_range(0.0..two_pi));
        let delta = linspace(delta1, delta_m_max, neurons);
        Ok(Self {
            weights,
            biases,
            delta,
            kind: ActivationKind::GffCosine,
            seed,
        })
    }

    /// Builds the tanh baseline with weights and biases uniform on `[-l, l]`.
    pub fn vanilla(neurons: usize, d_in: usize, l: f64, seed: u64) -> Result<Self> {
        if neurons == 0 || d_in == 0 {
            return Err(Error::InvalidParameter(format!(
                "layer needs neurons >= 1 and d_in >= 1, got {neurons}, {d_in}"
            )));
        }
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "half-width must be positive and finite, got {l}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new_inclusive(-l, l);
        let weights = Array2::from_shape_simple_fn((neurons, d_in), || rng.sample(dist));
        let biases = Array1::from_shape_simple_fn(neurons, || rng.sample(dist));
        Ok(Self {
            weights,
            biases,
            delta: Array1::ones(neurons),
            kind: ActivationKind::VanillaTanh,
        seed,
        })
    }

    /// Assembles a layer from explicit parameters, bypassing the seeded
    /// draws. Intended for tests and hand-built dictionaries.
    #[doc(hidden)]
    pub fn from_parts(
        weights: Array2<f64>,
        biases: Array1<f64>,
        delta: Array1<f64>,
        kind: ActivationKind,
    ) -> Result<Self> {
        let neurons = weights.nrows();
        if biases.len() != neurons || delta.len() != neurons {
            return Err(Error::DimensionMismatch {
                expected: neurons,
                got: biases.len().min(delta.len()),
            });
        }
        Ok(Self {
            weights,
            biases,
            delta,
            kind,
            seed: 0,
        })
    }

    pub fn neurons(&self) -> usize {
        self.weights.nrows()
    }

    pub fn d_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Frequency coefficients, ascending (all ones for the tanh baseline).
    pub fn delta(&self) -> &Array1<f64> {
        &self.delta
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn biases(&self) -> &Array1<f64> {
        &self.biases
    }

    fn check_point(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.d_in() {
            return Err(Error::DimensionMismatch {
                expected: self.d_in(),
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "input point has non-finite coordinates".into(),
            ));
        }
        Ok(())
    }

    /// `z_m = delta_m * (w_m . v) + b_m`.
    fn preactivation(&self, m: usize, v: &[f64]) -> f64 {
        let wv: f64 = self
            .weights
            .row(m)
            .iter()
            .zip(v)
            .map(|(w, x)| w * x)
            .sum();
        self.delta[m] * wv + self.biases[m]
    }

    /// Analytic partial derivative of feature `m` at `v`.
    ///
    /// `orders[i]` is the derivative order along coordinate `i`; the result is
    /// `prod_i (delta_m * w_{m,i})^orders[i] * phi^(n)(z)` with `n` the total
    /// order. Tanh supports `n <= 2`; the cosine layer supports any order.
    pub fn derivative(&self, m: usize, v: &[f64], orders: &[u32]) -> Result<f64> {
        self.check_point(v)?;
        if orders.len() != self.d_in() {
            return Err(Error::DimensionMismatch {
                expected: self.d_in(),
                got: orders.len(),
            });
        }
        if m >= self.neurons() {
            return Err(Error::InvalidParameter(format!(
                "neuron index {m} out of range (layer has {})",
                self.neurons()
            )));
        }
        let n: u32 = orders.iter().sum();
        let z = self.preactivation(m, v);
        let mut coef = 1.0;
        for (i, &a) in orders.iter().enumerate() {
            if a > 0 {
                coef *= (self.delta[m] * self.weights[[m, i]]).powi(a as i32);
            }
        }
        Ok(coef * self.phi_derivative(z, n)?)
    }

    /// `phi^(n)(z)` for this layer's activation.
    fn phi_derivative(&self, z: f64, n: u32) -> Result<f64> {
        match self.kind {
            ActivationKind::GffCosine => Ok((z + f64::from(n) * std::f64::consts::FRAC_PI_2).cos()),
            ActivationKind::VanillaTanh => {
                let t = z.tanh();
                match n {
                    0 => Ok(t),
                    1 => Ok(1.0 - t * t),
                    2 => Ok(-2.0 * t * (1.0 - t * t)),
                    _ => Err(Error::UnsupportedOrder {
                        activation: "tanh",
                        order: n,
                        max: 2,
                    }),
                }
            }
        }
    }

    /// Raw feature values `h_m(v)` for all neurons.
    pub fn row(&self, v: &[f64]) -> Result<Array1<f64>> {
        let zero = vec![0u32; self.d_in()];
        self.derivative_row(v, &zero)
    }

    /// Vector over neurons of the `orders` partial derivative at `v`.
    ///
    /// Same values as [`derivative`](Self::derivative) per entry, evaluated in
    /// one pass per row so assembly stays cheap.
    pub fn derivative_row(&self, v: &[f64], orders: &[u32]) -> Result<Array1<f64>> {
        self.check_point(v)?;
        if orders.len() != self.d_in() {
            return Err(Error::DimensionMismatch {
                expected: self.d_in(),
                got: orders.len(),
            });
        }
        let n: u32 = orders.iter().sum();
        if self.kind == ActivationKind::VanillaTanh && n > 2 {
            return Err(Error::UnsupportedOrder {
                activation: "tanh",
                order: n,
                max: 2,
            });
        }
        let coef = self.weight_power(orders);
        let mut out = Array1::zeros(self.neurons());
        for m in 0..self.neurons() {
            let z = self.preactivation(m, v);
            out[m] = coef[m] * self.phi_derivative(z, n)?;
        }
        Ok(out)
    }

    /// Per-neuron product `prod_i (delta_m * w_{m,i})^orders[i]`; input-point
    /// independent, so callers assembling many rows can reuse it.
    pub(crate) fn weight_power(&self, orders: &[u32]) -> Array1<f64> {
        let mut coef = Array1::ones(self.neurons());
        for (i, &a) in orders.iter().enumerate() {
            if a > 0 {
                for m in 0..self.neurons() {
                    coef[m] *= (self.delta[m] * self.weights[[m, i]]).powi(a as i32);
                }
            }
        }
        coef
    }

    /// `z` vector for one input point, reused across operator terms.
    pub(crate) fn preactivation_row(&self, v: &[f64]) -> Array1<f64> {
        let mut z = Array1::zeros(self.neurons());
        for m in 0..self.neurons() {
            z[m] = self.preactivation(m, v);
        }
        z
    }

    pub(crate) fn phi_row(&self, z: &Array1<f64>, n: u32, out: &mut Array1<f64>) {
        match self.kind {
            ActivationKind::GffCosine => {
                let shift = f64::from(n) * std::f64::consts::FRAC_PI_2;
                out.zip_mut_with(z, |o, &zi| *o = (zi + shift).cos());
            }
            ActivationKind::VanillaTanh => {
                out.zip_mut_with(z, |o, &zi| {
                    let t = zi.tanh();
                    *o = match n {
                        0 => t,
                        1 => 1.0 - t * t,
                        _ => -2.0 * t * (1.0 - t * t),
                    };
                });
            }
        }
    }
}

/// `count` points linearly spaced over `[lo, hi]`, inclusive; `[lo]` when
/// `count == 1`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Array1<f64> {
    if count == 1 {
        return Array1::from_elem(1, lo);
    }
    let step = (hi - lo) / (count as f64 - 1.0);
    Array1::from_shape_fn(count, |i| lo + step * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn gff_delta_is_linspace() {
        let layer = FeatureLayer::gff(3, 1, 1.0, 3.0, 0).unwrap();
        assert_eq!(layer.delta().to_vec(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn gff_single_neuron_delta() {
        let layer = FeatureLayer::gff(1, 1, 5.0, 5.0, 0).unwrap();
        assert_eq!(layer.delta().to_vec(), vec![5.0]);
    }

    #[test]
    fn gff_linspace_spacing_uniform() {
        let layer = FeatureLayer::gff(200, 1, 1.0, 400.0, 7).unwrap();
        let d = layer.delta();
        let step = d[1] - d[0];
        for m in 1..d.len() {
            assert_relative_eq!(d[m] - d[m - 1], step, max_relative = 1e-12);
        }
        assert_eq!(d[0], 1.0);
        assert_eq!(d[d.len() - 1], 400.0);
    }

    #[test]
    fn gff_reconstruction_is_bit_identical() {
        let a = FeatureLayer::gff(200, 2, 1.0, 400.0, 42).unwrap();
        let b = FeatureLayer::gff(200, 2, 1.0, 400.0, 42).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.biases(), b.biases());
        assert_eq!(a.delta(), b.delta());
    }

    #[test]
    fn gff_bias_range() {
        let layer = FeatureLayer::gff(500, 1, 1.0, 10.0, 3).unwrap();
        for &b in layer.biases() {
            assert!((0.0..2.0 * std::f64::consts::PI).contains(&b));
        }
    }

    #[test]
    fn vanilla_entries_bounded() {
        for (l, seed) in [(10.0, 1u64), (40.0, 2)] {
            let layer = FeatureLayer::vanilla(100, 1, l, seed).unwrap();
            let max = layer
                .weights()
                .iter()
                .chain(layer.biases().iter())
                .fold(0.0f64, |acc, &x| acc.max(x.abs()));
            assert!(max <= l, "|entry| {max} exceeds {l}");
        }
    }

    #[test]
    fn vanilla_reconstruction_is_bit_identical() {
        let a = FeatureLayer::vanilla(100, 1, 10.0, 9).unwrap();
        let b = FeatureLayer::vanilla(100, 1, 10.0, 9).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.biases(), b.biases());
    }

    #[test]
    fn construction_errors() {
        assert!(FeatureLayer::gff(0, 1, 1.0, 2.0, 0).is_err());
        assert!(FeatureLayer::gff(3, 0, 1.0, 2.0, 0).is_err());
        assert!(FeatureLayer::gff(3, 1, 4.0, 2.0, 0).is_err());
        assert!(FeatureLayer::gff(3, 1, f64::NAN, 2.0, 0).is_err());
        assert!(FeatureLayer::gff(3, 1, -1.0, 2.0, 0).is_err());
        assert!(FeatureLayer::vanilla(3, 1, 0.0, 0).is_err());
        assert!(FeatureLayer::vanilla(3, 1, -2.0, 0).is_err());
    }

    /// Layer with hand-set parameters for closed-form checks.
    fn manual_gff(delta: f64, w: Vec<f64>, b: f64) -> FeatureLayer {
        let d = w.len();
        FeatureLayer::from_parts(
            Array2::from_shape_vec((1, d), w).unwrap(),
            Array1::from_elem(1, b),
            Array1::from_elem(1, delta),
            ActivationKind::GffCosine,
        )
        .unwrap()
    }

    #[test]
    fn cosine_derivative_closed_forms() {
        let l = manual_gff(1.0, vec![1.0], 0.0);
        assert_relative_eq!(l.derivative(0, &[0.0], &[0]).unwrap(), 1.0);
        assert_relative_eq!(l.derivative(0, &[0.0], &[2]).unwrap(), -1.0);

        let l = manual_gff(2.0, vec![1.0], 0.0);
        let d = l
            .derivative(0, &[std::f64::consts::FRAC_PI_4], &[1])
            .unwrap();
        assert_relative_eq!(d, -2.0, max_relative = 1e-14);
    }

    #[test]
    fn cosine_fourth_derivative_cycles() {
        let l = manual_gff(3.0, vec![0.7, -1.3], 0.4);
        let v = [0.3, -0.8];
        let base = l.derivative(0, &v, &[0, 0]).unwrap();
        let fourth = l.derivative(0, &v, &[4, 0]).unwrap();
        let scale = (3.0f64 * 0.7).powi(4);
        assert_relative_eq!(fourth, scale * base, max_relative = 1e-12);
    }

    #[test]
    fn tanh_order_cap() {
        let l = FeatureLayer::vanilla(4, 1, 2.0, 0).unwrap();
        assert!(matches!(
            l.derivative(0, &[0.5], &[3]),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(l.derivative(0, &[0.5], &[2]).is_ok());
    }

    #[test]
    fn row_matches_derivative_and_is_bounded() {
        let l = FeatureLayer::gff(50, 2, 1.0, 30.0, 5).unwrap();
        let v = [0.4, 0.9];
        let row = l.row(&v).unwrap();
        for m in 0..l.neurons() {
            assert_eq!(row[m], l.derivative(m, &v, &[0, 0]).unwrap());
            assert!(row[m].abs() <= 1.0);
        }
    }

    #[test]
    fn single_neuron_row_value() {
        let l = manual_gff(2.0, vec![1.0], 0.0);
        let row = l.row(&[std::f64::consts::FRAC_PI_4]).unwrap();
        assert_relative_eq!(row[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let l = FeatureLayer::gff(3, 2, 1.0, 5.0, 0).unwrap();
        assert!(matches!(
            l.row(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(l.derivative(0, &[1.0, 2.0], &[1]).is_err());
    }

    /// Central-difference oracle: five-point stencils per coordinate.
    ///
    /// First derivatives use step 1e-4. Second derivatives divide by h^2, so
    /// their rounding floor is eps/h^2; a wider step (5e-3) keeps that floor
    /// below the 1e-8 absolute tolerance while the fourth-order stencil keeps
    /// truncation below the 1e-5 relative tolerance.
    fn fd_derivative(l: &FeatureLayer, m: usize, v: &[f64], orders: &[u32]) -> f64 {
        fn go(l: &FeatureLayer, m: usize, v: &mut Vec<f64>, orders: &[u32], i: usize) -> f64 {
            if i == orders.len() {
                return l.derivative(m, v, &vec![0; orders.len()]).unwrap();
            }
            let mut at = |v: &mut Vec<f64>, shift: f64, i: usize| {
                v[i] += shift;
                let r = go(l, m, v, orders, i + 1);
                v[i] -= shift;
                r
            };
            match orders[i] {
                0 => go(l, m, v, orders, i + 1),
                1 => {
                    let h = 1e-4;
                    (at(v, -2.0 * h, i) - 8.0 * at(v, -h, i) + 8.0 * at(v, h, i)
                        - at(v, 2.0 * h, i))
                        / (12.0 * h)
                }
                2 => {
                    let h = 5e-3;
                    (-at(v, -2.0 * h, i) + 16.0 * at(v, -h, i) - 30.0 * go(l, m, v, orders, i + 1)
                        + 16.0 * at(v, h, i)
                        - at(v, 2.0 * h, i))
                        / (12.0 * h * h)
                }
                _ => unreachable!("oracle covers orders <= 2"),
            }
        }
        go(l, m, &mut v.to_vec(), orders, 0)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0;
        while checked < 100 {
            let d_in = rng.gen_range(1..=3usize);
            let gff = rng.gen_bool(0.5);
            let layer = if gff {
                FeatureLayer::gff(8, d_in, rng.gen_range(0.5..2.0), rng.gen_range(3.0..5.0), rng.gen())
                    .unwrap()
            } else {
                FeatureLayer::vanilla(8, d_in, rng.gen_range(0.5..3.0), rng.gen()).unwrap()
            };
            // keep |delta * w| modest so the oracle's own rounding floor stays
            // well below the absolute tolerance
            let m = match (0..8).find(|&m| {
                layer
                    .weights()
                    .row(m)
                    .iter()
                    .all(|w| (layer.delta()[m] * w).abs() <= 15.0)
            }) {
                Some(m) => m,
                None => continue,
            };
            let v: Vec<f64> = (0..d_in).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut orders = vec![0u32; d_in];
            for _ in 0..rng.gen_range(0..=2) {
                let i = rng.gen_range(0..d_in);
                if orders[i] < 2 {
                    orders[i] += 1;
                }
            }
            let exact = layer.derivative(m, &v, &orders).unwrap();
            let approx = fd_derivative(&layer, m, &v, &orders);
            let err = (exact - approx).abs();
            if exact.abs() < 1e-3 {
                assert!(err <= 1e-8, "abs err {err} for value {exact}");
            } else {
                assert!(err / exact.abs() <= 1e-5, "rel err {} at orders {orders:?}", err / exact.abs());
            }
            checked += 1;
        }
    }
}
