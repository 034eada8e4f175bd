use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::GridWorld;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlannerError {
    #[error("start {0} is blocked")]
    StartBlocked(HybridState),
    #[error("goal {0} is blocked")]
    GoalBlocked(HybridState),
    #[error("state {0} is outside the map")]
    OutOfBounds(HybridState),
    #[error("no path from {start} to {goal}")]
    NoPath {
        start: HybridState,
        goal: HybridState,
    },
    #[error("flight is disabled but {0} is an air state")]
    FlightDisabled(HybridState),
    #[error("invalid cost model: {0}")]
    InvalidCost(String),
    #[error("inconsistent path: {0}")]
    InconsistentPath(String),
    #[error("cannot parse state `{0}` (expected `x,y,ground` or `x,y,airK`)")]
    BadState(String),
}

pub type Result<T> = std::result::Result<T, PlannerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Drive,
    Fly,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Drive => "drive",
            Mode::Fly => "fly",
        }
    }
}

/// A cell on one layer. Layer 0 is the ground (driving); layers `k >= 1` are
/// air layers (flying), so the mode follows from the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HybridState {
    pub x: usize,
    pub y: usize,
    pub layer: usize,
}

impl HybridState {
    pub const fn ground(x: usize, y: usize) -> Self {
        Self { x, y, layer: 0 }
    }

    pub const fn air(x: usize, y: usize, layer: usize) -> Self {
        Self { x, y, layer }
    }

    pub fn mode(&self) -> Mode {
        if self.layer == 0 {
            Mode::Drive
        } else {
            Mode::Fly
        }
    }

    pub fn same_cell(&self, other: &HybridState) -> bool {
        self.x == other.x && self.y == other.y
    }
}

impl fmt::Display for HybridState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.layer == 0 {
            write!(f, "({}, {}, ground)", self.x, self.y)
        } else {
            write!(f, "({}, {}, air{})", self.x, self.y, self.layer)
        }
    }
}

impl FromStr for HybridState {
    type Err = PlannerError;

    /// `x,y,ground`, `x,y,airK` (K >= 1) or `x,y,K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || PlannerError::BadState(s.to_owned());
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [x, y, layer] = parts.as_slice() else {
            return Err(bad());
        };
        let x = x.parse().map_err(|_| bad())?;
        let y = y.parse().map_err(|_| bad())?;
        let layer = match *layer {
            "ground" => 0,
            l => match l.strip_prefix("air") {
                Some(k) => match k.parse::<usize>() {
                    Ok(k) if k >= 1 => k,
                    _ => return Err(bad()),
                },
                None => l.parse().map_err(|_| bad())?,
            },
        };
        Ok(Self { x, y, layer })
    }
}

/// Power, speed and terrain limits that price each move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    /// W
    pub drive_power: f64,
    /// W
    pub fly_power: f64,
    /// m/s
    pub drive_speed: f64,
    /// m/s
    pub fly_speed: f64,
    /// s per fold/unfold
    pub switch_time: f64,
    /// W drawn during a mode switch
    pub switch_power: f64,
    /// m
    pub max_step_height: f64,
    /// degrees
    pub max_slope: f64,
    pub allow_flight: bool,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            drive_power: 2840.0,
            fly_power: 6276.0,
            drive_speed: 10.06,
            fly_speed: 7.47,
            switch_time: 5.0,
            switch_power: 2840.0,
            max_step_height: 0.1,
            max_slope: 30.0,
            allow_flight: true,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.drive_power)
            && positive(self.fly_power)
            && positive(self.drive_speed)
            && positive(self.fly_speed))
        {
            return Err(PlannerError::InvalidCost(
                "powers and speeds must be > 0".into(),
            ));
        }
        let non_negative = |v: f64| v >= 0.0 && v.is_finite();
        if !(non_negative(self.switch_time)
            && non_negative(self.switch_power)
            && non_negative(self.max_step_height)
            && non_negative(self.max_slope))
        {
            return Err(PlannerError::InvalidCost(
                "switch time/power and terrain limits must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// J per metre driven.
    pub fn drive_energy_per_meter(&self) -> f64 {
        self.drive_power / self.drive_speed
    }

    /// J per metre flown.
    pub fn fly_energy_per_meter(&self) -> f64 {
        self.fly_power / self.fly_speed
    }

    pub fn switch_energy(&self) -> f64 {
        self.switch_power * self.switch_time
    }

    /// Cheapest energy per metre over both modes; scales the heuristic.
    pub fn min_energy_per_meter(&self) -> f64 {
        self.drive_energy_per_meter()
            .min(self.fly_energy_per_meter())
    }
}

/// Time and energy for one move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub to: HybridState,
    pub time: f64,
    pub energy: f64,
}

fn ground_distance(world: &GridWorld, a: &HybridState, b: &HybridState) -> f64 {
    let dx = a.x as f64 - b.x as f64;
    let dy = a.y as f64 - b.y as f64;
    world.resolution() * dx.hypot(dy)
}

fn air_distance(world: &GridWorld, a: &HybridState, b: &HybridState) -> f64 {
    let dz = world.altitude(a.layer) - world.altitude(b.layer);
    ground_distance(world, a, b).hypot(dz)
}

/// Whether a ground move between two cells respects the step and slope limits.
pub(crate) fn terrain_passable(
    world: &GridWorld,
    cost: &CostModel,
    from: (usize, usize),
    to: (usize, usize),
) -> bool {
    let rise = (world.elevation(to.0, to.1) - world.elevation(from.0, from.1)).abs();
    if rise > cost.max_step_height {
        return false;
    }
    let run = ground_distance(
        world,
        &HybridState::ground(from.0, from.1),
        &HybridState::ground(to.0, to.1),
    );
    rise == 0.0 || rise.atan2(run).to_degrees() <= cost.max_slope
}

/// Whether the air column above a ground cell is clear up to `layer`.
fn column_clear(world: &GridWorld, x: usize, y: usize, layer: usize) -> bool {
    (1..=layer).all(|k| !world.is_blocked(k, x, y))
}

/// Time and energy for travelling between two states of the same path.
/// Same-mode states may be any distance apart (smoothed paths); a mode
/// switch must stay on one cell.
pub fn segment_cost(
    world: &GridWorld,
    cost: &CostModel,
    a: &HybridState,
    b: &HybridState,
) -> Result<(f64, f64)> {
    for s in [a, b] {
        check_bounds(world, s)?;
    }
    match (a.mode(), b.mode()) {
        (Mode::Drive, Mode::Drive) => {
            let d = ground_distance(world, a, b);
            Ok((d / cost.drive_speed, cost.drive_energy_per_meter() * d))
        }
        (Mode::Fly, Mode::Fly) => {
            let d = air_distance(world, a, b);
            Ok((d / cost.fly_speed, cost.fly_energy_per_meter() * d))
        }
        _ if a.same_cell(b) => Ok((cost.switch_time, cost.switch_energy())),
        _ => Err(PlannerError::InconsistentPath(format!(
            "mode switch between different cells {a} -> {b}"
        ))),
    }
}

fn check_bounds(world: &GridWorld, s: &HybridState) -> Result<()> {
    if s.x >= world.width() || s.y >= world.height() || s.layer >= world.layer_count() {
        return Err(PlannerError::OutOfBounds(*s));
    }
    Ok(())
}

fn edge(world: &GridWorld, cost: &CostModel, from: &HybridState, to: HybridState) -> Edge {
    let (time, energy) = segment_cost(world, cost, from, &to).expect("neighbour in bounds");
    Edge { to, time, energy }
}

/// Every move out of `state`: 8-connected driving on the ground, 26-connected
/// flying across air layers, and take-off/landing on the same cell.
pub fn successors(world: &GridWorld, cost: &CostModel, state: &HybridState) -> Vec<Edge> {
    let mut out = Vec::new();
    let (x, y) = (state.x as i64, state.y as i64);
    let free = |layer: usize, cx: i64, cy: i64| {
        world.in_bounds(cx, cy) && !world.is_blocked(layer, cx as usize, cy as usize)
    };

    if state.layer == 0 {
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy) == (0, 0) || !free(0, x + dx, y + dy) {
                    continue;
                }
                // no corner cutting past blocked cells
                if dx != 0 && dy != 0 && !(free(0, x + dx, y) && free(0, x, y + dy)) {
                    continue;
                }
                let to = ((x + dx) as usize, (y + dy) as usize);
                if !terrain_passable(world, cost, (state.x, state.y), to) {
                    continue;
                }
                out.push(edge(world, cost, state, HybridState::ground(to.0, to.1)));
            }
        }
        if cost.allow_flight {
            for k in 1..world.layer_count() {
                if !column_clear(world, state.x, state.y, k) {
                    break;
                }
                out.push(edge(
                    world,
                    cost,
                    state,
                    HybridState::air(state.x, state.y, k),
                ));
            }
        }
        return out;
    }

    let top = world.layer_count() as i64 - 1;
    let z = state.layer as i64;
    for dz in -1..=1i64 {
        let nz = z + dz;
        if nz < 1 || nz > top {
            continue;
        }
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy, dz) == (0, 0, 0) {
                    continue;
                }
                // every cell of the swept box must be free
                let clear = [0, dz].iter().all(|&oz| {
                    [0, dy].iter().all(|&oy| {
                        [0, dx].iter().all(|&ox| {
                            (ox, oy, oz) == (0, 0, 0) || free((z + oz) as usize, x + ox, y + oy)
                        })
                    })
                });
                if clear {
                    let to = HybridState::air((x + dx) as usize, (y + dy) as usize, nz as usize);
                    out.push(edge(world, cost, state, to));
                }
            }
        }
    }
    if !world.is_blocked(0, state.x, state.y) && column_clear(world, state.x, state.y, state.layer)
    {
        out.push(edge(
            world,
            cost,
            state,
            HybridState::ground(state.x, state.y),
        ));
    }
    out
}

/// Admissible lower bound on the energy still needed to reach `goal`:
/// planar distance times the cheapest energy per metre.
pub fn heuristic(
    world: &GridWorld,
    cost: &CostModel,
    state: &HybridState,
    goal: &HybridState,
) -> f64 {
    ground_distance(world, state, goal) * cost.min_energy_per_meter()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridPath {
    pub states: Vec<HybridState>,
    /// s, one per consecutive pair of states
    pub segment_times: Vec<f64>,
    /// J
    pub segment_energies: Vec<f64>,
    pub total_energy: f64,
    pub total_time: f64,
    pub switch_count: usize,
}

impl HybridPath {
    /// Builds a path from states, pricing every segment.
    pub fn from_states(
        world: &GridWorld,
        cost: &CostModel,
        states: Vec<HybridState>,
    ) -> Result<Self> {
        let mut segment_times = Vec::with_capacity(states.len().saturating_sub(1));
        let mut segment_energies = Vec::with_capacity(states.len().saturating_sub(1));
        for s in &states {
            check_bounds(world, s)?;
        }
        for pair in states.windows(2) {
            let (t, e) = segment_cost(world, cost, &pair[0], &pair[1])?;
            segment_times.push(t);
            segment_energies.push(e);
        }
        let switch_count = states
            .windows(2)
            .filter(|p| p[0].mode() != p[1].mode())
            .count();
        Ok(Self {
            total_energy: segment_energies.iter().sum(),
            total_time: segment_times.iter().sum(),
            segment_times,
            segment_energies,
            switch_count,
            states,
        })
    }

    /// Cumulative (time s, energy J) at each state.
    pub fn cumulative(&self) -> Vec<(f64, f64)> {
        let mut t = 0.0;
        let mut e = 0.0;
        let mut out = Vec::with_capacity(self.states.len());
        if !self.states.is_empty() {
            out.push((0.0, 0.0));
        }
        for (dt, de) in self.segment_times.iter().zip(&self.segment_energies) {
            t += dt;
            e += de;
            out.push((t, e));
        }
        out
    }
}

/// Recomputes (energy J, time s) of a path from its geometry.
pub fn path_energy(path: &HybridPath, world: &GridWorld, cost: &CostModel) -> Result<(f64, f64)> {
    let mut energy = 0.0;
    let mut time = 0.0;
    for s in &path.states {
        check_bounds(world, s)?;
    }
    for pair in path.states.windows(2) {
        let (t, e) = segment_cost(world, cost, &pair[0], &pair[1])?;
        time += t;
        energy += e;
    }
    Ok((energy, time))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A state popped from the open list, with its heuristic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub state: HybridState,
    pub g: f64,
    pub h: f64,
}

/// Minimum-energy hybrid path by A*.
pub fn plan(
    world: &GridWorld,
    start: HybridState,
    goal: HybridState,
    cost: &CostModel,
) -> Result<HybridPath> {
    search(world, start, goal, cost, None)
}

/// [`plan`], also returning every expansion in order.
pub fn plan_traced(
    world: &GridWorld,
    start: HybridState,
    goal: HybridState,
    cost: &CostModel,
) -> Result<(HybridPath, Vec<Expansion>)> {
    let mut trace = Vec::new();
    let path = search(world, start, goal, cost, Some(&mut trace))?;
    Ok((path, trace))
}

fn validate_endpoints(
    world: &GridWorld,
    start: &HybridState,
    goal: &HybridState,
    cost: &CostModel,
) -> Result<()> {
    cost.validate()?;
    check_bounds(world, start)?;
    check_bounds(world, goal)?;
    if !cost.allow_flight {
        for s in [start, goal] {
            if s.mode() == Mode::Fly {
                return Err(PlannerError::FlightDisabled(*s));
            }
        }
    }
    if world.is_blocked(start.layer, start.x, start.y) {
        return Err(PlannerError::StartBlocked(*start));
    }
    if world.is_blocked(goal.layer, goal.x, goal.y) {
        return Err(PlannerError::GoalBlocked(*goal));
    }
    Ok(())
}

fn search(
    world: &GridWorld,
    start: HybridState,
    goal: HybridState,
    cost: &CostModel,
    mut trace: Option<&mut Vec<Expansion>>,
) -> Result<HybridPath> {
    validate_endpoints(world, &start, &goal, cost)?;
    let plane = world.width() * world.height();
    let id = |s: &HybridState| s.layer * plane + s.y * world.width() + s.x;
    let n = plane * world.layer_count();
    let mut best = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<HybridState>> = vec![None; n];

    // Ties on f prefer the ground (driving), then lower layers, then (x, y).
    let mut open = BinaryHeap::new();
    best[id(&start)] = 0.0;
    open.push(Reverse((
        Key(heuristic(world, cost, &start, &goal)),
        start.layer,
        start.x,
        start.y,
        Key(0.0),
    )));

    while let Some(Reverse((_, layer, x, y, Key(g)))) = open.pop() {
        let state = HybridState { x, y, layer };
        if g > best[id(&state)] {
            continue;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(Expansion {
                state,
                g,
                h: heuristic(world, cost, &state, &goal),
            });
        }
        if state == goal {
            let mut states = vec![goal];
            let mut cur = goal;
            while let Some(p) = parent[id(&cur)] {
                states.push(p);
                cur = p;
            }
            states.reverse();
            return HybridPath::from_states(world, cost, states);
        }
        for e in successors(world, cost, &state) {
            let ng = g + e.energy;
            let j = id(&e.to);
            if ng < best[j] {
                best[j] = ng;
                parent[j] = Some(state);
                let f = ng + heuristic(world, cost, &e.to, &goal);
                open.push(Reverse((Key(f), e.to.layer, e.to.x, e.to.y, Key(ng))));
            }
        }
    }
    Err(PlannerError::NoPath { start, goal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walled(wall_in_air: bool) -> GridWorld {
        let mut w = GridWorld::new(5, 5, 1.0, vec![3.0]).unwrap();
        for y in 0..5 {
            w.set_blocked(0, 2, y, true);
            if wall_in_air {
                w.set_blocked(1, 2, y, true);
            }
        }
        w
    }

    #[test]
    fn start_equals_goal() {
        let w = walled(false);
        let s = HybridState::ground(0, 0);
        let p = plan(&w, s, s, &CostModel::default()).unwrap();
        assert_eq!(p.states, vec![s]);
        assert_eq!(
            (p.total_energy, p.total_time, p.switch_count),
            (0.0, 0.0, 0)
        );
    }

    #[test]
    fn wall_needs_flight() {
        let w = walled(false);
        let (s, g) = (HybridState::ground(0, 2), HybridState::ground(4, 2));
        let drive_only = CostModel {
            allow_flight: false,
            ..CostModel::default()
        };
        assert!(matches!(
            plan(&w, s, g, &drive_only),
            Err(PlannerError::NoPath { .. })
        ));
        let p = plan(&w, s, g, &CostModel::default()).unwrap();
        assert_eq!(p.switch_count, 2);
        assert_eq!(p.states.last().unwrap().mode(), Mode::Drive);
        assert!(p.states.iter().any(|s| s.mode() == Mode::Fly));
        assert!(matches!(
            plan(&walled(true), s, g, &CostModel::default()),
            Err(PlannerError::NoPath { .. })
        ));
    }

    #[test]
    fn blocked_endpoints() {
        let w = walled(false);
        let c = CostModel::default();
        assert!(matches!(
            plan(&w, HybridState::ground(2, 0), HybridState::ground(0, 0), &c),
            Err(PlannerError::StartBlocked(_))
        ));
        assert!(matches!(
            plan(&w, HybridState::ground(0, 0), HybridState::ground(2, 1), &c),
            Err(PlannerError::GoalBlocked(_))
        ));
        assert!(matches!(
            plan(&w, HybridState::ground(9, 0), HybridState::ground(0, 0), &c),
            Err(PlannerError::OutOfBounds(_))
        ));
    }

    #[test]
    fn path_energy_arithmetic() {
        let w = GridWorld::new(11, 1, 1.0, vec![2.0]).unwrap();
        let c = CostModel::default();
        let empty = HybridPath::from_states(&w, &c, vec![]).unwrap();
        assert_eq!(path_energy(&empty, &w, &c).unwrap(), (0.0, 0.0));

        let drive = HybridPath::from_states(
            &w,
            &c,
            vec![HybridState::ground(0, 0), HybridState::ground(10, 0)],
        )
        .unwrap();
        let (e, t) = path_energy(&drive, &w, &c).unwrap();
        assert!((e - 2840.0 * 10.0 / 10.06).abs() < 1e-9);
        assert!((e - 2823.1).abs() < 0.05);
        assert!((t - 0.994).abs() < 5e-4);

        let switch = HybridPath::from_states(
            &w,
            &c,
            vec![HybridState::ground(3, 0), HybridState::air(3, 0, 1)],
        )
        .unwrap();
        assert_eq!(
            path_energy(&switch, &w, &c).unwrap(),
            (c.switch_power * 5.0, 5.0)
        );

        let bad = HybridPath {
            states: vec![HybridState::ground(0, 0), HybridState::air(1, 0, 1)],
            segment_times: vec![0.0],
            segment_energies: vec![0.0],
            total_energy: 0.0,
            total_time: 0.0,
            switch_count: 1,
        };
        assert!(matches!(
            path_energy(&bad, &w, &c),
            Err(PlannerError::InconsistentPath(_))
        ));
    }

    #[test]
    fn step_and_slope_limits() {
        let mut w = GridWorld::new(3, 1, 1.0, vec![]).unwrap();
        w.set_elevation(1, 0, 0.2);
        let c = CostModel::default();
        let err = plan(&w, HybridState::ground(0, 0), HybridState::ground(2, 0), &c);
        assert!(matches!(err, Err(PlannerError::NoPath { .. })));
        let relaxed = CostModel {
            max_step_height: 0.5,
            ..c
        };
        assert!(plan(
            &w,
            HybridState::ground(0, 0),
            HybridState::ground(2, 0),
            &relaxed
        )
        .is_ok());
        let steep = CostModel {
            max_step_height: 0.5,
            max_slope: 10.0,
            ..c
        };
        assert!(plan(
            &w,
            HybridState::ground(0, 0),
            HybridState::ground(2, 0),
            &steep
        )
        .is_err());
    }

    #[test]
    fn no_corner_cutting() {
        let mut w = GridWorld::new(2, 2, 1.0, vec![]).unwrap();
        w.set_blocked(0, 1, 0, true);
        let next = successors(&w, &CostModel::default(), &HybridState::ground(0, 0));
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].to, HybridState::ground(0, 1));
    }

    #[test]
    fn state_parsing() {
        assert_eq!(
            "3,4,ground".parse::<HybridState>().unwrap(),
            HybridState::ground(3, 4)
        );
        assert_eq!(
            "3, 4, air2".parse::<HybridState>().unwrap(),
            HybridState::air(3, 4, 2)
        );
        assert_eq!(
            "0,0,1".parse::<HybridState>().unwrap(),
            HybridState::air(0, 0, 1)
        );
        for bad in [
            "",
            "1,2",
            "1,2,air0",
            "a,2,ground",
            "1,2,3,4",
            "-1,0,ground",
        ] {
            assert!(bad.parse::<HybridState>().is_err(), "{bad}");
        }
    }
}
