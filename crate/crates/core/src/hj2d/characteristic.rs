use super::solve::interpolate;
use super::Hj2dError;
use crate::hamiltonian::{HamiltonianSpec, Lattice, Point};
use crate::norm;
use crate::ode::{integrate, Tolerance};

/// Velocity field of the test trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Steering {
    /// `ẋ = b/ε`.
    Drift,
    /// `ẋ = b/ε - ν DH/|DH|`.
    Descend(f64),
    /// `ẋ = b/ε + ν DH/|DH|`.
    Ascend(f64),
}

#[derive(Debug, Clone)]
pub struct CharacteristicReport {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    /// `u(X(t))` at the sample times.
    pub w: Vec<f64>,
    /// Smallest `e^{-λτ}w(τ) + ∫_σ^τ e^{-λt} f dt - e^{-λσ}w(σ)` over all
    /// ordered sample pairs.
    pub worst_margin: f64,
}

/// Samples `w = u∘X` along `ẋ = E(x)` on `[σ, τ]` and checks the discounted
/// inequality `e^{-λσ}w(σ) ≤ e^{-λτ}w(τ) + ∫_σ^τ e^{-λt} f dt` for every
/// pair of sample times, with `f ≡ f_bound`.
#[allow(clippy::too_many_arguments)]
pub fn check_characteristic_inequality(
    spec: &HamiltonianSpec,
    lattice: &Lattice,
    u: &[f64],
    x_start: Point,
    eps: f64,
    steering: Steering,
    (sigma, tau): (f64, f64),
    lambda: f64,
    f_bound: f64,
    samples: usize,
) -> Result<CharacteristicReport, Hj2dError> {
    let field = |y: &[f64; 2]| {
        let d = spec.gradient(*y);
        let b = [d[1] / eps, -d[0] / eps];
        let (s, nu) = match steering {
            Steering::Drift => return b,
            Steering::Descend(nu) => (-1.0, nu),
            Steering::Ascend(nu) => (1.0, nu),
        };
        let m = norm(d);
        if m == 0.0 {
            return b;
        }
        [b[0] + s * nu * d[0] / m, b[1] + s * nu * d[1] / m]
    };
    let n = samples.max(1);
    let dt = (tau - sigma) / n as f64;
    let tol = Tolerance {
        rtol: 1e-10,
        atol: 1e-12,
    };
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    let mut x = x_start;
    for k in 0..=n {
        let t = sigma + k as f64 * dt;
        if k > 0 {
            x = integrate(&field, x, dt, (dt * 0.1).min(eps * 0.01), tol);
        }
        let v = interpolate(lattice, u, x).ok_or(Hj2dError::TrajectoryExit { t })?;
        times.push(t);
        points.push(x);
        w.push(v);
    }
    let integral = |a: f64, b: f64| {
        if lambda == 0.0 {
            f_bound * (b - a)
        } else {
            f_bound * ((-lambda * a).exp() - (-lambda * b).exp()) / lambda
        }
    };
    let mut worst = f64::INFINITY;
    for j in 0..=n {
        for k in j + 1..=n {
            let margin = (-lambda * times[k]).exp() * w[k] + integral(times[j], times[k])
                - (-lambda * times[j]).exp() * w[j];
            worst = worst.min(margin);
        }
    }
    Ok(CharacteristicReport {
        times,
        points,
        w,
        worst_margin: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_lattice() -> Lattice {
        Lattice {
            origin: [-2.0, -2.0],
            spacing: 4.0 / 63.0,
            nx: 64,
            ny: 64,
        }
    }

    #[test]
    fn constant_field_is_the_equality_case() {
        let spec = HamiltonianSpec::harmonic(1.0);
        let lat = box_lattice();
        let c = 0.7;
        let lambda = 1.3;
        let u = vec![c; lat.len()];
        let r = check_characteristic_inequality(
            &spec,
            &lat,
            &u,
            [0.5, 0.2],
            0.1,
            Steering::Drift,
            (0.0, 0.3),
            lambda,
            lambda * c,
            32,
        )
        .unwrap();
        assert!(r.worst_margin.abs() <= 1e-9, "{}", r.worst_margin);
    }

    #[test]
    fn undiscounted_case_is_monotonicity() {
        // u = H grows along the ascending trajectory, so w(σ) ≤ w(τ).
        let spec = HamiltonianSpec::harmonic(1.0);
        let lat = box_lattice();
        let u: Vec<f64> = (0..lat.len())
            .map(|k| {
                let (i, j) = lat.coords(k);
                spec.value(lat.point(i, j))
            })
            .collect();
        let r = check_characteristic_inequality(
            &spec,
            &lat,
            &u,
            [0.5, 0.0],
            0.2,
            Steering::Ascend(0.5),
            (0.0, 1.0),
            0.0,
            0.0,
            40,
        )
        .unwrap();
        assert!(r.worst_margin >= -1e-3);
        assert!(r.w.last().unwrap() > &r.w[0]);
        let d = check_characteristic_inequality(
            &spec,
            &lat,
            &u,
            [0.5, 0.0],
            0.2,
            Steering::Descend(0.5),
            (0.0, 0.5),
            0.0,
            0.0,
            40,
        )
        .unwrap();
        assert!(d.worst_margin < 0.0);
    }

    #[test]
    fn leaving_the_lattice_is_an_error() {
        let spec = HamiltonianSpec::harmonic(1.0);
        let lat = box_lattice();
        let u = vec![0.0; lat.len()];
        let r = check_characteristic_inequality(
            &spec,
            &lat,
            &u,
            [1.5, 0.0],
            1.0,
            Steering::Ascend(2.0),
            (0.0, 2.0),
            1.0,
            0.0,
            20,
        );
        assert!(matches!(r, Err(Hj2dError::TrajectoryExit { .. })));
    }
}
