//! Application fixtures: attitude kinematics driven by body angular rates,
//! and Frenet-frame propagation driven by curvature and torsion. Both are
//! thin factories producing [`LinearQde`] systems for the engine, plus the
//! convention plumbing (component orderings, frame reconstruction) that the
//! raw equations leave open.

use std::sync::Arc;

use crate::engine::{solve_ivp, Ivp, LinearQde, Trajectory};
use crate::error::{Error, Result};
use crate::matrix::{QMat, QVec};
use crate::quat::Quat;

/// Unit quaternion for a rotation of `theta` radians about the unit axis
/// `e`: `(cos(theta/2), e sin(theta/2))`.
pub fn axis_angle_quat(axis: [f64; 3], theta: f64) -> Result<Quat> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitAxis(norm));
    }
    let half = 0.5 * theta;
    let s = half.sin();
    Ok(Quat::new(
        half.cos(),
        axis[0] * s,
        axis[1] * s,
        axis[2] * s,
    ))
}

/// Rotation action `v -> q v conj(q)` on a 3-vector. This is the
/// convention-free way to compare attitudes produced under different
/// component orderings.
pub fn rotate(q: &Quat, v: [f64; 3]) -> [f64; 3] {
    let p = *q * Quat::pure(v[0], v[1], v[2]) * q.conj();
    [p.x, p.y, p.z]
}

/// Body angular rates `t -> (wx, wy, wz)` in radians per second.
#[derive(Clone)]
pub struct BodyRates {
    provider: Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>,
}

impl BodyRates {
    pub fn new(provider: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        BodyRates {
            provider: Arc::new(provider),
        }
    }

    pub fn constant(omega: [f64; 3]) -> Self {
        BodyRates::new(move |_| omega)
    }

    /// Loads samples from CSV rows `t, wx, wy, wz` (an optional header line
    /// is skipped); evaluation linearly interpolates and clamps at the ends.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let samples = parse_csv_rows(text, 4)?;
        let table: Vec<(f64, [f64; 3])> = samples
            .into_iter()
            .map(|row| (row[0], [row[1], row[2], row[3]]))
            .collect();
        if table.is_empty() {
            return Err(Error::Parse {
                offset: 0,
                msg: "rates CSV holds no samples".into(),
            });
        }
        Ok(BodyRates::new(move |t| interp3(&table, t)))
    }

    pub fn eval(&self, t: f64) -> [f64; 3] {
        (self.provider)(t)
    }

    fn omega_quat(&self, t: f64) -> Quat {
        let w = self.eval(t);
        Quat::pure(w[0], w[1], w[2])
    }
}

fn parse_csv_rows(text: &str, cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && fields[0].parse::<f64>().is_err() {
            continue; // header
        }
        if fields.len() != cols {
            return Err(Error::Parse {
                offset: 0,
                msg: format!("expected {} CSV columns, found {}", cols, fields.len()),
            });
        }
        let mut row = Vec::with_capacity(cols);
        for f in fields {
            row.push(f.parse::<f64>().map_err(|_| Error::Parse {
                offset: 0,
                msg: format!("invalid number {:?} in CSV", f),
            })?);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn interp3(table: &[(f64, [f64; 3])], t: f64) -> [f64; 3] {
    if t <= table[0].0 {
        return table[0].1;
    }
    if t >= table[table.len() - 1].0 {
        return table[table.len() - 1].1;
    }
    let idx = table.partition_point(|&(u, _)| u <= t) - 1;
    let (t0, a) = table[idx];
    let (t1, b) = table[idx + 1];
    let s = (t - t0) / (t1 - t0);
    [
        a[0] + s * (b[0] - a[0]),
        a[1] + s * (b[1] - a[1]),
        a[2] + s * (b[2] - a[2]),
    ]
}

/// Attitude kinematics model: the quaternion-product form
/// `q'(t) = 1/2 q omega(t)` (omega as a pure quaternion) together with the
/// skew real 4x4 form `q' = 1/2 Omega q`.
///
/// The engine integrates left-action systems `x' = A(t) x`, while the
/// quaternion-product form multiplies on the right. Conjugation swaps the
/// sides: `y = conj(q)` satisfies `y' = (-1/2 omega(t)) y` exactly, so
/// that is the 1-dimensional system exposed here; [`AttitudeModel::propagate`]
/// conjugates on the way in and out.
pub struct AttitudeModel {
    rates: BodyRates,
}

/// Builds the attitude model for a rate provider.
pub fn attitude_qde(rates: BodyRates) -> AttitudeModel {
    AttitudeModel { rates }
}

/// Attitude history with dense evaluation (conjugation handled internally).
pub struct AttitudeTrajectory {
    traj: Trajectory,
}

impl AttitudeTrajectory {
    pub fn eval(&self, t: f64) -> Quat {
        self.traj.eval(t)[0].conj()
    }

    pub fn times(&self) -> &[f64] {
        self.traj.nodes().0
    }
}

impl AttitudeModel {
    /// Left-action embedding of the quaternion-product form: solutions of
    /// the returned system are *conjugates* of attitude quaternions.
    pub fn conjugate_qde(&self, interval: (f64, f64)) -> Result<LinearQde> {
        let rates = self.rates.clone();
        LinearQde::new(
            1,
            interval,
            "attitude (conjugate embedding)",
            Arc::new(move |t| QMat::diag(&[rates.omega_quat(t) * -0.5])),
        )
    }

    /// Integrates the quaternion-product form with RK4.
    pub fn propagate(&self, q0: Quat, t0: f64, t1: f64, steps: usize) -> Result<AttitudeTrajectory> {
        let qde = self.conjugate_qde((t0.min(t1), t0.max(t1).max(t0 + 1e-9)))?;
        let ivp = Ivp::new(qde, t0, QVec::new(vec![q0.conj()]))?;
        Ok(AttitudeTrajectory {
            traj: solve_ivp(&ivp, t1, steps)?,
        })
    }

    /// The skew 4x4 rate matrix in the scalar-last component ordering
    /// `(q1, q2, q3, q0)`.
    pub fn wertz_omega(&self, t: f64) -> [[f64; 4]; 4] {
        let [wx, wy, wz] = self.rates.eval(t);
        [
            [0.0, wz, -wy, wx],
            [-wz, 0.0, wx, wy],
            [wy, -wx, 0.0, wz],
            [-wx, -wy, -wz, 0.0],
        ]
    }

    /// Integrates `q' = 1/2 Omega q` directly as a real 4-vector system
    /// (scalar-last ordering), independent of the quaternion engine.
    /// Returns samples `(t, q)` with `q` converted back to scalar-first.
    pub fn propagate_wertz(
        &self,
        q0: Quat,
        t0: f64,
        t1: f64,
        steps: usize,
    ) -> Vec<(f64, Quat)> {
        let deriv = |t: f64, y: &[f64; 4]| {
            let omega = self.wertz_omega(t);
            let mut out = [0.0; 4];
            for (r, row) in omega.iter().enumerate() {
                out[r] = 0.5 * row.iter().zip(y.iter()).map(|(a, b)| a * b).sum::<f64>();
            }
            out
        };
        let mut y = [q0.x, q0.y, q0.z, q0.w];
        let h = (t1 - t0) / steps as f64;
        let mut out = Vec::with_capacity(steps + 1);
        out.push((t0, q0));
        for step in 0..steps {
            let t = t0 + step as f64 * h;
            let k1 = deriv(t, &y);
            let k2 = deriv(t + 0.5 * h, &add4(&y, &scale4(&k1, 0.5 * h)));
            let k3 = deriv(t + 0.5 * h, &add4(&y, &scale4(&k2, 0.5 * h)));
            let k4 = deriv(t + h, &add4(&y, &scale4(&k3, h)));
            for idx in 0..4 {
                y[idx] += h / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
            }
            let t_next = t0 + (step + 1) as f64 * h;
            out.push((t_next, Quat::new(y[3], y[0], y[1], y[2])));
        }
        out
    }
}

fn add4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn scale4(a: &[f64; 4], s: f64) -> [f64; 4] {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

/// Intrinsic curve data `s -> (speed, curvature, torsion)` with `speed > 0`.
#[derive(Clone)]
pub struct CurveGeometry {
    speed: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    curvature: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    torsion: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CurveGeometry {
    pub fn new(
        speed: impl Fn(f64) -> f64 + Send + Sync + 'static,
        curvature: impl Fn(f64) -> f64 + Send + Sync + 'static,
        torsion: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CurveGeometry {
            speed: Arc::new(speed),
            curvature: Arc::new(curvature),
            torsion: Arc::new(torsion),
        }
    }

    pub fn constant(v: f64, kappa: f64, tau: f64) -> Self {
        CurveGeometry::new(move |_| v, move |_| kappa, move |_| tau)
    }

    /// Loads samples from CSV rows `s, v, kappa, tau` with linear
    /// interpolation.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let rows = parse_csv_rows(text, 4)?;
        if rows.is_empty() {
            return Err(Error::Parse {
                offset: 0,
                msg: "geometry CSV holds no samples".into(),
            });
        }
        let table: Vec<(f64, [f64; 3])> = rows
            .into_iter()
            .map(|r| (r[0], [r[1], r[2], r[3]]))
            .collect();
        let t1 = table.clone();
        let t2 = table.clone();
        Ok(CurveGeometry {
            speed: Arc::new(move |s| interp3(&table, s)[0]),
            curvature: Arc::new(move |s| interp3(&t1, s)[1]),
            torsion: Arc::new(move |s| interp3(&t2, s)[2]),
        })
    }

    pub fn speed(&self, s: f64) -> f64 {
        (self.speed)(s)
    }

    pub fn curvature(&self, s: f64) -> f64 {
        (self.curvature)(s)
    }

    pub fn torsion(&self, s: f64) -> f64 {
        (self.torsion)(s)
    }
}

/// An orthonormal moving frame: tangent, binormal, principal normal.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub tangent: [f64; 3],
    pub binormal: [f64; 3],
    pub normal: [f64; 3],
}

impl Frame {
    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let vs = [self.tangent, self.binormal, self.normal];
        let mut worst = 0.0f64;
        for (r, a) in vs.iter().enumerate() {
            for (c, b) in vs.iter().enumerate() {
                let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                let expect = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        worst
    }
}

/// Reconstructs the frame carried by an orientation quaternion: the frame
/// vectors are the rotated canonical axes.
pub fn frame_from_quat(q: &Quat) -> Frame {
    Frame {
        tangent: rotate(q, [1.0, 0.0, 0.0]),
        binormal: rotate(q, [0.0, 1.0, 0.0]),
        normal: rotate(q, [0.0, 0.0, 1.0]),
    }
}

/// Frenet propagation model: the real 4-dimensional embedding
/// `q'(s) = 1/2 v(s) K(s) q(s)` with the skew generator
/// `K = [[0, -tau, 0, -kappa], [tau, 0, kappa, 0], [0, -kappa, 0, tau],
/// [kappa, 0, -tau, 0]]` acting on the components `(q0, q1, q2, q3)`.
/// `K` is skew-symmetric, so propagation preserves the quaternion norm.
pub struct FrenetModel {
    geom: CurveGeometry,
}

pub fn frenet_qde(geom: CurveGeometry) -> FrenetModel {
    FrenetModel { geom }
}

/// Frenet history with dense evaluation of the orientation quaternion.
pub struct FrenetTrajectory {
    traj: Trajectory,
}

impl FrenetTrajectory {
    pub fn eval(&self, s: f64) -> Quat {
        let x = self.traj.eval(s);
        Quat::new(x[0].w, x[1].w, x[2].w, x[3].w)
    }

    pub fn frame(&self, s: f64) -> Frame {
        frame_from_quat(&self.eval(s))
    }

    pub fn times(&self) -> &[f64] {
        self.traj.nodes().0
    }
}

impl FrenetModel {
    /// The 4-dimensional real-coefficient system for the engine.
    pub fn qde(&self, interval: (f64, f64)) -> Result<LinearQde> {
        let geom = self.geom.clone();
        LinearQde::new(
            4,
            interval,
            "frenet frame",
            Arc::new(move |s| {
                let half_v = 0.5 * geom.speed(s);
                let kappa = geom.curvature(s);
                let tau = geom.torsion(s);
                let r = |v: f64| Quat::real(v * half_v);
                QMat::from_rows(vec![
                    vec![r(0.0), r(-tau), r(0.0), r(-kappa)],
                    vec![r(tau), r(0.0), r(kappa), r(0.0)],
                    vec![r(0.0), r(-kappa), r(0.0), r(tau)],
                    vec![r(kappa), r(0.0), r(-tau), r(0.0)],
                ])
                .expect("4x4 construction")
            }),
        )
    }

    pub fn propagate(&self, q0: Quat, s0: f64, s1: f64, steps: usize) -> Result<FrenetTrajectory> {
        let qde = self.qde((s0.min(s1), s0.max(s1).max(s0 + 1e-9)))?;
        let x0 = QVec::new(vec![
            Quat::real(q0.w),
            Quat::real(q0.x),
            Quat::real(q0.y),
            Quat::real(q0.z),
        ]);
        let ivp = Ivp::new(qde, s0, x0)?;
        Ok(FrenetTrajectory {
            traj: solve_ivp(&ivp, s1, steps)?,
        })
    }

    /// Largest central-difference residual of the reconstructed frame
    /// against the frame equations `T' = v kappa B`,
    /// `B' = -v kappa T + v tau N`, `N' = -v tau B` over the samples.
    pub fn frame_residual(&self, traj: &FrenetTrajectory, samples: &[f64]) -> f64 {
        let h = 1e-4;
        let mut worst = 0.0f64;
        for &s in samples {
            let fp = traj.frame(s + h);
            let fm = traj.frame(s - h);
            let f = traj.frame(s);
            let v = self.geom.speed(s);
            let kappa = self.geom.curvature(s);
            let tau = self.geom.torsion(s);
            for c in 0..3 {
                let dt = (fp.tangent[c] - fm.tangent[c]) / (2.0 * h);
                let db = (fp.binormal[c] - fm.binormal[c]) / (2.0 * h);
                let dn = (fp.normal[c] - fm.normal[c]) / (2.0 * h);
                worst = worst.max((dt - v * kappa * f.binormal[c]).abs());
                worst = worst
                    .max((db - v * (-kappa * f.tangent[c] + tau * f.normal[c])).abs());
                worst = worst.max((dn + v * tau * f.binormal[c]).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_angle_examples() {
        // z axis, pi -> k
        let q = axis_angle_quat([0.0, 0.0, 1.0], std::f64::consts::PI).unwrap();
        assert!(q.dist(&Quat::K) < 1e-15);
        // zero angle -> 1
        let q = axis_angle_quat([0.0, 1.0, 0.0], 0.0).unwrap();
        assert_eq!(q, Quat::ONE);
        // x axis, pi/2
        let q = axis_angle_quat([1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(q.dist(&Quat::new(r, r, 0.0, 0.0)) < 1e-15);
        assert!((q.norm() - 1.0).abs() < 1e-12);
        // non-unit axis is rejected
        assert!(matches!(
            axis_angle_quat([1.0, 1.0, 0.0], 0.3),
            Err(Error::NonUnitAxis(_))
        ));
    }

    #[test]
    fn constant_spin_matches_axis_angle() {
        let c = 0.9;
        let model = attitude_qde(BodyRates::constant([0.0, 0.0, c]));
        let traj = model.propagate(Quat::ONE, 0.0, 1.0, 5000).unwrap();
        let q1 = traj.eval(1.0);
        let expect = axis_angle_quat([0.0, 0.0, 1.0], c).unwrap();
        assert!(q1.dist(&expect) < 1e-8, "dist {}", q1.dist(&expect));
        // norm preserved
        assert!((q1.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_rates_hold_attitude() {
        let model = attitude_qde(BodyRates::constant([0.0, 0.0, 0.0]));
        let q0 = axis_angle_quat([0.0, 1.0, 0.0], 0.7).unwrap();
        let traj = model.propagate(q0, 0.0, 2.0, 100).unwrap();
        assert!(traj.eval(2.0).dist(&q0) < 1e-12);
    }

    #[test]
    fn spin_composition_is_additive() {
        let model = attitude_qde(BodyRates::constant([0.0, 0.0, 1.0]));
        let part1 = model.propagate(Quat::ONE, 0.0, 0.4, 2000).unwrap().eval(0.4);
        let part2 = model.propagate(part1, 0.4, 1.0, 3000).unwrap().eval(1.0);
        let whole = model.propagate(Quat::ONE, 0.0, 1.0, 5000).unwrap().eval(1.0);
        assert!(part2.dist(&whole) < 1e-8);
    }

    #[test]
    fn wertz_and_marins_agree_on_rotation_action() {
        let model = attitude_qde(BodyRates::new(|t: f64| [0.3 * t.sin(), -0.2, 0.5]));
        let q0 = axis_angle_quat([1.0, 0.0, 0.0], 0.3).unwrap();
        let marins = model.propagate(q0, 0.0, 1.0, 4000).unwrap().eval(1.0);
        let wertz = model.propagate_wertz(q0, 0.0, 1.0, 4000).last().unwrap().1;
        for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let a = rotate(&marins, v);
            let b = rotate(&wertz, v);
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() < 1e-8);
            }
        }
        // components also agree in magnitude
        let ma = marins.components();
        let wa = wertz.components();
        for idx in 0..4 {
            assert!((ma[idx].abs() - wa[idx].abs()).abs() < 1e-8);
        }
    }

    #[test]
    fn pure_rates_preserve_unit_norm() {
        let model = attitude_qde(BodyRates::new(|t: f64| [t.cos(), 0.4 * t, -0.8]));
        let traj = model.propagate(Quat::ONE, 0.0, 1.0, 10_000).unwrap();
        for &t in &[0.25, 0.5, 0.75, 1.0] {
            assert!((traj.eval(t).norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rates_csv_interpolates() {
        let csv = "t,wx,wy,wz\n0,0,0,1\n1,0,0,3\n";
        let rates = BodyRates::from_csv_str(csv).unwrap();
        assert_eq!(rates.eval(0.0), [0.0, 0.0, 1.0]);
        assert_eq!(rates.eval(0.5), [0.0, 0.0, 2.0]);
        assert_eq!(rates.eval(9.0), [0.0, 0.0, 3.0]); // clamped
        assert!(BodyRates::from_csv_str("t,wx\n0,1\n").is_err());
    }

    #[test]
    fn straight_line_keeps_frame() {
        let model = frenet_qde(CurveGeometry::constant(1.0, 0.0, 0.0));
        let traj = model.propagate(Quat::ONE, 0.0, 3.0, 100).unwrap();
        assert!(traj.eval(3.0).dist(&Quat::ONE) < 1e-12);
    }

    #[test]
    fn helix_frame_satisfies_frame_equations() {
        let model = frenet_qde(CurveGeometry::constant(1.0, 0.4, 0.25));
        let traj = model.propagate(Quat::ONE, 0.0, 6.0, 20_000).unwrap();
        let samples: Vec<f64> = (1..=20).map(|k| 0.28 * k as f64).collect();
        let residual = model.frame_residual(&traj, &samples);
        assert!(residual < 1e-6, "frame residual {}", residual);
        // unit norm and orthonormality along the way
        for &s in &samples {
            assert!((traj.eval(s).norm() - 1.0).abs() < 1e-8);
            assert!(traj.frame(s).gram_deviation() < 1e-6);
        }
    }
}
