use std::collections::BTreeSet;

use super::grid::GridWorld;
use super::search::{segment_cost, terrain_passable, CostModel, HybridPath, HybridState, Mode};

type Cell = (usize, usize);

/// Samples per cell along a shortcut ray.
const SAMPLES_PER_CELL: f64 = 20.0;

/// Cells visited by the segment between two cell centres, in order. Where
/// consecutive samples jump diagonally both side cells are reported, so a
/// ray grazing a corner counts as touching the cells on either side.
fn ray_cells(a: Cell, b: Cell) -> (Vec<Cell>, BTreeSet<Cell>) {
    let (ax, ay) = (a.0 as f64, a.1 as f64);
    let (bx, by) = (b.0 as f64, b.1 as f64);
    let span = (bx - ax).abs().max((by - ay).abs());
    let samples = (span * SAMPLES_PER_CELL).ceil().max(1.0) as usize;
    let mut ordered: Vec<Cell> = vec![a];
    let mut corners = BTreeSet::new();
    for i in 1..=samples {
        let t = i as f64 / samples as f64;
        let cell = (
            (ax + t * (bx - ax)).round() as usize,
            (ay + t * (by - ay)).round() as usize,
        );
        let prev = *ordered.last().unwrap();
        if cell == prev {
            continue;
        }
        if cell.0 != prev.0 && cell.1 != prev.1 {
            corners.insert((prev.0, cell.1));
            ordered.push((cell.0, prev.1));
        }
        ordered.push(cell);
    }
    (ordered, corners)
}

/// Line-of-sight check for a same-mode shortcut.
pub fn shortcut_clear(
    world: &GridWorld,
    cost: &CostModel,
    a: &HybridState,
    b: &HybridState,
) -> bool {
    if a.mode() != b.mode() {
        return false;
    }
    let (ordered, corners) = ray_cells((a.x, a.y), (b.x, b.y));
    match a.mode() {
        Mode::Drive => {
            let free = |c: &(usize, usize)| !world.is_blocked(0, c.0, c.1);
            if !ordered.iter().all(free) || !corners.iter().all(free) {
                return false;
            }
            // corner cells must also be reachable over the terrain
            let steps_ok = ordered
                .windows(2)
                .all(|w| terrain_passable(world, cost, w[0], w[1]));
            let corners_ok = ordered.windows(3).all(|w| {
                let (p, n) = (w[0], w[2]);
                if p.0 == n.0 || p.1 == n.1 {
                    return true;
                }
                let side = (p.0, n.1);
                !corners.contains(&side)
                    || (terrain_passable(world, cost, p, side)
                        && terrain_passable(world, cost, side, n))
            });
            steps_ok && corners_ok
        }
        Mode::Fly => {
            let (lo, hi) = (a.layer.min(b.layer), a.layer.max(b.layer));
            (lo..=hi).all(|k| {
                ordered
                    .iter()
                    .chain(corners.iter())
                    .all(|c| !world.is_blocked(k, c.0, c.1))
            })
        }
    }
}

fn polyline_length(world: &GridWorld, cost: &CostModel, states: &[HybridState]) -> f64 {
    states
        .windows(2)
        .map(|w| {
            segment_cost(world, cost, &w[0], &w[1])
                .map(|(_, e)| e)
                .unwrap_or(f64::INFINITY)
        })
        .sum()
}

/// Greedy line-of-sight shortcutting inside each single-mode run. Mode
/// switches are kept as they are; a shortcut is taken only when it is clear
/// and strictly cheaper than the stretch it replaces.
pub fn smooth(path: &HybridPath, world: &GridWorld, cost: &CostModel) -> HybridPath {
    let states = &path.states;
    if states.len() < 3 {
        return path.clone();
    }
    let mut out: Vec<HybridState> = Vec::with_capacity(states.len());
    let mut run_start = 0;
    while run_start < states.len() {
        let mode = states[run_start].mode();
        let mut run_end = run_start;
        while run_end + 1 < states.len() && states[run_end + 1].mode() == mode {
            run_end += 1;
        }
        let mut i = run_start;
        out.push(states[i]);
        while i < run_end {
            let mut j = run_end;
            while j > i + 1 {
                let direct = segment_cost(world, cost, &states[i], &states[j])
                    .map(|(_, e)| e)
                    .unwrap_or(f64::INFINITY);
                let detour = polyline_length(world, cost, &states[i..=j]);
                if direct < detour * (1.0 - 1e-12)
                    && shortcut_clear(world, cost, &states[i], &states[j])
                {
                    break;
                }
                j -= 1;
            }
            out.push(states[j]);
            i = j;
        }
        run_start = run_end + 1;
    }
    match HybridPath::from_states(world, cost, out) {
        Ok(p) if p.total_energy <= path.total_energy => p,
        _ => path.clone(),
    }
}
