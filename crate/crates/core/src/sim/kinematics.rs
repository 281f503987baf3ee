//! Interception of belt-borne objects by a straight-line end-effector.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{Belt, RobotSpec};
use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Infeasible {
    #[error("no nonnegative meeting time")]
    NoRoot,
    #[error("meeting point outside robot reach")]
    OutOfReach,
    #[error("meeting point off the belt")]
    OffBelt,
}

/// Meeting point of an end-effector and an object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intercept {
    /// Travel time from the decision instant to the meeting point.
    pub tau: f64,
    pub point: Point2,
    /// Absolute meeting time.
    pub time: f64,
}

/// Smallest `tau >= 0` with `|obj + (v_belt * tau, 0) - ee| = v_ee * tau`.
pub fn meeting_time(ee: Point2, obj: Point2, belt_speed: f64, ee_speed: f64) -> Option<f64> {
    let d = obj - ee;
    let c = d.x * d.x + d.y * d.y;
    if c == 0.0 {
        return Some(0.0);
    }
    let a = belt_speed * belt_speed - ee_speed * ee_speed;
    let b = 2.0 * d.x * belt_speed;
    if a == 0.0 {
        // Equal speeds: b*tau + c = 0.
        return if b < 0.0 { Some(-c / b) } else { None };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let q = if b == 0.0 { -0.5 * disc.sqrt() } else { q };
    let mut best: Option<f64> = None;
    for root in [q / a, if q != 0.0 { c / q } else { f64::NAN }] {
        if root.is_finite() && root >= 0.0 {
            best = Some(best.map_or(root, |b: f64| b.min(root)));
        }
    }
    best
}

/// Earliest interception of an object at `obj` (position at time `t0`) by the
/// end-effector of `robot`, currently at `ee`. Feasible only when the meeting
/// point is within reach of the base and on the belt.
pub fn intercept(
    robot: &RobotSpec,
    ee: Point2,
    obj: Point2,
    t0: f64,
    belt: &Belt,
) -> Result<Intercept, Infeasible> {
    let tau = meeting_time(ee, obj, belt.speed, robot.ee_speed).ok_or(Infeasible::NoRoot)?;
    let point = Point2::new(obj.x + belt.speed * tau, obj.y);
    if !belt.contains(point) {
        return Err(Infeasible::OffBelt);
    }
    if !robot.within_reach(point) {
        return Err(Infeasible::OutOfReach);
    }
    Ok(Intercept {
        tau,
        point,
        time: t0 + tau,
    })
}

/// A committed pick-and-place cycle: rest -> meeting point, grasp, carry back
/// to the rest point, drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PnPTask {
    pub robot_index: usize,
    pub object_id: u32,
    pub decision_time: f64,
    pub ee_start: Point2,
    pub intercept_point: Point2,
    pub intercept_time: f64,
    pub carry_end_time: f64,
    pub t_process: f64,
}

impl PnPTask {
    pub fn plan(
        robot: &RobotSpec,
        object_id: u32,
        decision_time: f64,
        ee_start: Point2,
        hit: Intercept,
        grasp_dwell: f64,
        drop_dwell: f64,
    ) -> Self {
        let t_process = processing_time(robot, hit, grasp_dwell, drop_dwell);
        Self {
            robot_index: robot.index,
            object_id,
            decision_time,
            ee_start,
            intercept_point: hit.point,
            intercept_time: hit.time,
            carry_end_time: decision_time + t_process,
            t_process,
        }
    }

    /// End-effector position at absolute time `t`, piecewise linear over the cycle.
    pub fn ee_position(&self, rest: Point2, ee_speed: f64, grasp_dwell: f64, t: f64) -> Point2 {
        if t <= self.decision_time {
            return self.ee_start;
        }
        if t < self.intercept_time {
            let span = self.intercept_time - self.decision_time;
            return self.ee_start.lerp(self.intercept_point, (t - self.decision_time) / span);
        }
        let carry_start = self.intercept_time + grasp_dwell;
        if t <= carry_start {
            return self.intercept_point;
        }
        let carry_time = self.intercept_point.distance(rest) / ee_speed;
        if carry_time <= 0.0 || t >= carry_start + carry_time {
            return rest;
        }
        self.intercept_point.lerp(rest, (t - carry_start) / carry_time)
    }
}

pub fn processing_time(robot: &RobotSpec, hit: Intercept, grasp_dwell: f64, drop_dwell: f64) -> f64 {
    hit.tau + grasp_dwell + hit.point.distance(robot.rest_point) / robot.ee_speed + drop_dwell
}
