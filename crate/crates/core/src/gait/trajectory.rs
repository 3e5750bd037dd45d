use std::f64::consts::{PI, TAU};
use std::io::{self, BufRead, Write};

use crate::legkin::ActuatorAngles;

use super::{GaitError, LegId};

pub const CSV_HEADER: &str = "t_s,fl_t1,fl_t2,fr_t1,fr_t2,rl_t1,rl_t2,rr_t1,rr_t2";

/// Shift `raw` by the multiple of 2π that lands nearest `previous`.
pub fn unwrap_toward(previous: f64, raw: f64) -> f64 {
    raw + TAU * ((previous - raw) / TAU).round()
}

/// Wrap an angle difference into `(-π, π]`.
pub fn shortest_delta(delta: f64) -> f64 {
    let d = delta - TAU * (delta / TAU).round();
    if d <= -PI {
        d + TAU
    } else {
        d
    }
}

/// Fixed-rate stream of actuator positions for all four legs.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorTrajectory {
    pub dt: f64,
    pub samples: Vec<[ActuatorAngles; 4]>,
}

impl ActuatorTrajectory {
    pub fn empty(dt: f64) -> Self {
        Self {
            dt,
            samples: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of the last sample; zero for empty or single-sample trajectories.
    pub fn duration(&self) -> f64 {
        self.samples.len().saturating_sub(1) as f64 * self.dt
    }

    /// One channel as a series. `channel` is 0 for θ1, 1 for θ2.
    pub fn channel(&self, leg: LegId, channel: usize) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s[leg.index()].as_array()[channel])
            .collect()
    }

    /// Largest per-sample change over all channels, in rad.
    pub fn max_step(&self) -> f64 {
        self.samples
            .windows(2)
            .flat_map(|w| {
                (0..4).flat_map(move |l| {
                    let (a, b) = (w[0][l].as_array(), w[1][l].as_array());
                    [(b[0] - a[0]).abs(), (b[1] - a[1]).abs()]
                })
            })
            .fold(0.0, f64::max)
    }

    /// Verify that no channel moves faster than `omega_max`.
    pub fn check_speed(&self, omega_max: f64) -> Result<(), GaitError> {
        let limit = omega_max * self.dt * (1.0 + 1e-9);
        for (k, w) in self.samples.windows(2).enumerate() {
            for leg in LegId::ALL {
                let (a, b) = (w[0][leg.index()].as_array(), w[1][leg.index()].as_array());
                for c in 0..2 {
                    let step = (b[c] - a[c]).abs();
                    if step > limit {
                        return Err(GaitError::SpeedViolation {
                            leg,
                            channel: c + 1,
                            time: (k + 1) as f64 * self.dt,
                            rate: step / self.dt,
                            limit: omega_max,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (k, s) in self.samples.iter().enumerate() {
            write!(out, "{}", k as f64 * self.dt)?;
            for a in s {
                write!(out, ",{},{}", a.theta1, a.theta2)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parse the CSV written by [`write_csv`](Self::write_csv). The sample
    /// period is taken from the first two rows.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, GaitError> {
        let bad =
            |line: usize, msg: &str| GaitError::InvalidTrajectory(format!("line {line}: {msg}"));
        let mut lines = input.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == CSV_HEADER => {}
            _ => return Err(bad(1, "missing or wrong header")),
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (n, line) in lines {
            let line = line.map_err(|e| bad(n + 1, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| bad(n + 1, &e.to_string()))?;
            if vals.len() != 9 {
                return Err(bad(n + 1, "expected 9 fields"));
            }
            times.push(vals[0]);
            let leg = |l: usize| ActuatorAngles::new(vals[1 + 2 * l], vals[2 + 2 * l]);
            samples.push([leg(0), leg(1), leg(2), leg(3)]);
        }
        let dt = match times.as_slice() {
            [t0, t1, ..] if t1 > t0 => t1 - t0,
            [_, _, ..] => return Err(bad(3, "time must increase")),
            _ => 0.0,
        };
        Ok(Self { dt, samples })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unwrap_picks_nearest_turn() {
        assert_eq!(unwrap_toward(0.0, 0.5), 0.5);
        assert!((unwrap_toward(6.0, 0.1) - (0.1 + TAU)).abs() < 1e-15);
        assert!((unwrap_toward(-6.0, -0.1) - (-0.1 - TAU)).abs() < 1e-15);
        assert!((unwrap_toward(100.0, 0.0) - 16.0 * TAU).abs() < 1e-12);
    }

    #[test]
    fn shortest_delta_range() {
        assert_eq!(shortest_delta(PI), PI);
        assert!((shortest_delta(-PI) - PI).abs() < 1e-15);
        assert!((shortest_delta(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
        assert_eq!(shortest_delta(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn unwrap_only_shifts_by_turns(prev in -100.0f64..100.0, raw in -10.0f64..10.0) {
            let u = unwrap_toward(prev, raw);
            prop_assert!((u - prev).abs() <= PI + 1e-9);
            let turns = (u - raw) / TAU;
            prop_assert!((turns - turns.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_round_trip() {
        let a = |x: f64| ActuatorAngles::new(x, -2.0 * x);
        let traj = ActuatorTrajectory {
            dt: 0.01,
            samples: vec![
                [a(0.0), a(0.1), a(0.2), a(0.3)],
                [a(0.5), a(0.25), a(-7.0), a(1e-9)],
            ],
        };
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let back = ActuatorTrajectory::read_csv(&buf[..]).unwrap();
        assert_eq!(back, traj);
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(ActuatorTrajectory::read_csv(&b"t,a\n"[..]).is_err());
        let short = format!("{CSV_HEADER}\n0,1,2\n");
        assert!(ActuatorTrajectory::read_csv(short.as_bytes()).is_err());
    }

    #[test]
    fn speed_check_flags_jumps() {
        let z = ActuatorAngles::default();
        let traj = ActuatorTrajectory {
            dt: 0.01,
            samples: vec![[z; 4], [z, z, ActuatorAngles::new(0.0, 0.2), z]],
        };
        assert!(traj.check_speed(30.0).is_ok());
        match traj.check_speed(10.0) {
            Err(GaitError::SpeedViolation { leg, channel, .. }) => {
                assert_eq!(leg, LegId::RearLeft);
                assert_eq!(channel, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
