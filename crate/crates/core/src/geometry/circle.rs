//! The stratified circle of directions attached to unramified exponential data.

use serde::Serialize;

use super::exponential::{integer_leading_data, stokes_directions, ExponentialData};
use crate::base::make_circle_base;
use crate::error::{Error, Result};
use crate::exact::{ExactAngle, GaussianRational, StokesDirection};
use crate::fibration::StokesFibration;
use crate::poset::FinPoset;

/// Points are the distinct Stokes directions of all pairs, sorted by angle.
#[derive(Clone, Debug)]
pub struct CircleSpace {
    pub data: ExponentialData,
    pub fibration: StokesFibration,
    /// A representative direction per point.
    pub points: Vec<StokesDirection>,
    pub angles: Vec<ExactAngle>,
    /// Pairs `(i, j)` of value indices having each point as a direction.
    pub provenance: Vec<Vec<(usize, usize)>>,
    /// Leading pole order of `v_i − v_j`; zero on the diagonal.
    pub pole_orders: Vec<Vec<u32>>,
    /// No Stokes direction at all; the single point is nominal.
    pub fully_constant: bool,
}

impl CircleSpace {
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.data.names()
    }

    /// Same stratification and data, another fibration with the same names.
    pub fn with_fibration(&self, fibration: StokesFibration) -> Result<CircleSpace> {
        if fibration.base() != self.fibration.base() {
            return Err(Error::Invalid("fibration lives over a different circle".into()));
        }
        Ok(CircleSpace {
            fibration,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Point<'a> {
            name: String,
            direction: &'a StokesDirection,
            approx: f64,
            pairs: Vec<[&'a str; 2]>,
        }
        let names = self.data.names();
        let points: Vec<Point> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, d)| Point {
                name: format!("p{i}"),
                direction: d,
                approx: self.angles[i].to_f64(),
                pairs: self.provenance[i]
                    .iter()
                    .map(|&(a, b)| [names[a].as_str(), names[b].as_str()])
                    .collect(),
            })
            .collect();
        serde_json::json!({
            "values": self.data,
            "fibration": self.fibration,
            "points": points,
            "fully_constant": self.fully_constant,
        })
    }
}

/// Direction record for JSON output.
pub fn direction_json(d: &StokesDirection) -> serde_json::Value {
    serde_json::json!({ "c": d.c, "m": d.m, "k": d.k, "approx": d.to_f64() })
}

struct PairDirections {
    a: usize,
    b: usize,
    dirs: Vec<StokesDirection>,
    angles: Vec<ExactAngle>,
}

impl PairDirections {
    /// `a < b` on the arc leaving `theta` counterclockwise.
    fn less_after(&self, theta: &ExactAngle) -> bool {
        let last = self
            .angles
            .iter()
            .rposition(|t| t <= theta)
            .unwrap_or(self.angles.len() - 1);
        self.dirs[last].k % 2 == 1
    }

    fn has_direction(&self, theta: &ExactAngle) -> bool {
        self.angles.iter().any(|t| t == theta)
    }
}

pub fn build_circle_space(e: &ExponentialData) -> Result<CircleSpace> {
    let names = e.names();
    let n = names.len();
    if n == 0 {
        return Err(Error::Invalid("exponential data without values".into()));
    }
    let mut pole_orders = vec![vec![0u32; n]; n];
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (m, _) = integer_leading_data(&e.values[a], &e.values[b])?;
            pole_orders[a][b] = m;
            pole_orders[b][a] = m;
            let dirs = stokes_directions(&e.values[a], &e.values[b])?;
            let angles = dirs.iter().map(|d| d.angle()).collect();
            pairs.push(PairDirections { a, b, dirs, angles });
        }
    }
    let mut all: Vec<(ExactAngle, StokesDirection)> = pairs
        .iter()
        .flat_map(|p| p.angles.iter().cloned().zip(p.dirs.iter().cloned()))
        .collect();
    all.sort_by(|x, y| x.0.cmp(&y.0));
    all.dedup_by(|x, y| x.0 == y.0);

    if all.is_empty() {
        let point = StokesDirection::new(GaussianRational::i(), 1, 0)?;
        let base = make_circle_base(1)?;
        let fibration = StokesFibration::constant(base, FinPoset::antichain(&names));
        return Ok(CircleSpace {
            data: e.clone(),
            fibration,
            angles: vec![point.angle()],
            points: vec![point],
            provenance: vec![Vec::new()],
            pole_orders,
            fully_constant: true,
        });
    }

    let (angles, points): (Vec<ExactAngle>, Vec<StokesDirection>) = all.into_iter().unzip();
    let np = points.len();
    let mut arc_fibers = Vec::with_capacity(np);
    let mut point_fibers = Vec::with_capacity(np);
    let mut provenance = Vec::with_capacity(np);
    for theta in &angles {
        let mut arc = vec![vec![false; n]; n];
        for (a, row) in arc.iter_mut().enumerate() {
            row[a] = true;
        }
        let mut point = arc.clone();
        let mut here = Vec::new();
        for p in &pairs {
            let (lo, hi) = if p.less_after(theta) { (p.a, p.b) } else { (p.b, p.a) };
            arc[lo][hi] = true;
            if p.has_direction(theta) {
                here.push((p.a, p.b));
            } else {
                point[lo][hi] = true;
            }
        }
        arc_fibers.push(FinPoset::new(names.clone(), arc)?);
        point_fibers.push(FinPoset::new(names.clone(), point)?);
        provenance.push(here);
    }
    let base = make_circle_base(np)?;
    let mut fibers = point_fibers;
    fibers.extend(arc_fibers);
    let id: Vec<usize> = (0..n).collect();
    let fibration = StokesFibration::new(base, fibers, vec![id; 2 * np])?;
    fibration.validate()?;
    Ok(CircleSpace {
        data: e.clone(),
        fibration,
        points,
        angles,
        provenance,
        pole_orders,
        fully_constant: false,
    })
}
