use std::fmt::Write as _;

/// Upper bound on `width * height` accepted from a map file.
pub const MAX_CELLS: usize = 1 << 24;
/// Upper bound on the number of air layers.
pub const MAX_AIR_LAYERS: usize = 64;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MapError {
    #[error("map file is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: bad token `{token}`: {message}")]
    Token {
        line: usize,
        token: String,
        message: String,
    },
    #[error("line {line}: row has {found} cells, expected {expected}")]
    RowWidth {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("map body ends early: {section} needs {expected} rows, found {found}")]
    Truncated {
        section: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unexpected data after the last matrix")]
    TrailingData { line: usize },
    #[error("air layer altitudes must be strictly increasing")]
    NonMonotoneLayers,
    #[error("invalid map: {0}")]
    Invalid(String),
}

/// Rasterised 2.5D map: a drivable ground layer with elevation and a stack
/// of flat air layers. Cells are addressed `(x, y)` with `x < width`; layer 0
/// is the ground and layer `k >= 1` is the `k`-th air layer from the bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    resolution: f64,
    ground_blocked: Vec<bool>,
    elevation: Vec<f64>,
    air_altitudes: Vec<f64>,
    air_blocked: Vec<Vec<bool>>,
}

/// Receives (x, y, token, line) for each cell of a map matrix.
type CellSink<'a> = dyn FnMut(usize, usize, &str, usize) -> Result<(), MapError> + 'a;

impl GridWorld {
    /// Obstacle-free flat world.
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        air_altitudes: Vec<f64>,
    ) -> Result<Self, MapError> {
        validate_header(width, height, resolution, &air_altitudes)?;
        let cells = width * height;
        Ok(Self {
            width,
            height,
            resolution,
            ground_blocked: vec![false; cells],
            elevation: vec![0.0; cells],
            air_blocked: vec![vec![false; cells]; air_altitudes.len()],
            air_altitudes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn air_layer_count(&self) -> usize {
        self.air_altitudes.len()
    }

    /// Layers including the ground.
    pub fn layer_count(&self) -> usize {
        1 + self.air_altitudes.len()
    }

    pub fn air_altitudes(&self) -> &[f64] {
        &self.air_altitudes
    }

    /// Altitude of an air layer (`layer >= 1`).
    pub fn altitude(&self, layer: usize) -> f64 {
        self.air_altitudes[layer - 1]
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    fn index(&self, x: usize, y: usize) -> usize {
        assert!(
            x < self.width && y < self.height,
            "cell ({x}, {y}) out of bounds"
        );
        y * self.width + x
    }

    fn layer_cells(&self, layer: usize) -> &[bool] {
        if layer == 0 {
            &self.ground_blocked
        } else {
            &self.air_blocked[layer - 1]
        }
    }

    fn layer_cells_mut(&mut self, layer: usize) -> &mut Vec<bool> {
        if layer == 0 {
            &mut self.ground_blocked
        } else {
            &mut self.air_blocked[layer - 1]
        }
    }

    pub fn is_blocked(&self, layer: usize, x: usize, y: usize) -> bool {
        self.layer_cells(layer)[self.index(x, y)]
    }

    pub fn set_blocked(&mut self, layer: usize, x: usize, y: usize, blocked: bool) {
        let i = self.index(x, y);
        self.layer_cells_mut(layer)[i] = blocked;
    }

    pub fn elevation(&self, x: usize, y: usize) -> f64 {
        self.elevation[self.index(x, y)]
    }

    pub fn set_elevation(&mut self, x: usize, y: usize, meters: f64) {
        let i = self.index(x, y);
        self.elevation[i] = meters;
    }

    pub fn blocked_count(&self, layer: usize) -> usize {
        self.layer_cells(layer).iter().filter(|b| **b).count()
    }

    /// Parses the text map format:
    ///
    /// ```text
    /// width height resolution_m n_air_layers altitude_1 .. altitude_n
    /// <ground occupancy: height rows of width 0/1 tokens>
    /// <ground elevation: height rows of width numbers, metres>
    /// <air layer 1 occupancy> .. <air layer n occupancy>
    /// ```
    ///
    /// Row `r` of each matrix is `y = r`. Text after `#` and blank lines are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines.next().ok_or(MapError::Empty)?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let header_err = |message: String| MapError::Header {
            line: header_line,
            message,
        };
        if tokens.len() < 4 {
            return Err(header_err(
                "expected `width height resolution_m n_air_layers altitudes...`".into(),
            ));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| header_err(format!("`{s}` is not a count: {e}")))
        };
        let float = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| header_err(format!("`{s}` is not a number: {e}")))
        };
        let width = int(tokens[0])?;
        let height = int(tokens[1])?;
        let resolution = float(tokens[2])?;
        let layers = int(tokens[3])?;
        if layers > MAX_AIR_LAYERS {
            return Err(header_err(format!(
                "{layers} air layers exceeds the limit of {MAX_AIR_LAYERS}"
            )));
        }
        if tokens.len() != 4 + layers {
            return Err(header_err(format!(
                "header declares {layers} air layers but lists {} altitudes",
                tokens.len() - 4
            )));
        }
        let altitudes = tokens[4..]
            .iter()
            .map(|s| float(s))
            .collect::<Result<Vec<_>, _>>()?;
        validate_header(width, height, resolution, &altitudes)?;

        let mut world = Self::new(width, height, resolution, altitudes)?;
        let mut read_matrix = |section: String, store: &mut CellSink| -> Result<(), MapError> {
            for y in 0..height {
                let Some((line, row)) = lines.next() else {
                    return Err(MapError::Truncated {
                        section,
                        expected: height,
                        found: y,
                    });
                };
                let cells: Vec<&str> = row.split_whitespace().collect();
                if cells.len() != width {
                    return Err(MapError::RowWidth {
                        line,
                        found: cells.len(),
                        expected: width,
                    });
                }
                for (x, token) in cells.into_iter().enumerate() {
                    store(x, y, token, line)?;
                }
            }
            Ok(())
        };

        let mut ground = vec![false; width * height];
        read_matrix("ground occupancy".into(), &mut |x, y, t, line| {
            ground[y * width + x] = parse_flag(t, line)?;
            Ok(())
        })?;
        let mut elevation = vec![0.0; width * height];
        read_matrix("ground elevation".into(), &mut |x, y, t, line| {
            let v: f64 = t
                .parse()
                .map_err(|e: std::num::ParseFloatError| MapError::Token {
                    line,
                    token: t.to_owned(),
                    message: e.to_string(),
                })?;
            if !v.is_finite() {
                return Err(MapError::Token {
                    line,
                    token: t.to_owned(),
                    message: "elevation must be finite".into(),
                });
            }
            elevation[y * width + x] = v;
            Ok(())
        })?;
        let mut air = vec![vec![false; width * height]; layers];
        for (k, layer) in air.iter_mut().enumerate() {
            read_matrix(format!("air layer {}", k + 1), &mut |x, y, t, line| {
                layer[y * width + x] = parse_flag(t, line)?;
                Ok(())
            })?;
        }
        if let Some((line, _)) = lines.next() {
            return Err(MapError::TrailingData { line });
        }
        world.ground_blocked = ground;
        world.elevation = elevation;
        world.air_blocked = air;
        Ok(world)
    }

    /// Serialises to the format read by [`GridWorld::parse`]. Numbers use the
    /// shortest representation that parses back to the same value.
    pub fn to_map_string(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{} {} {} {}",
            self.width,
            self.height,
            self.resolution,
            self.air_altitudes.len()
        );
        for a in &self.air_altitudes {
            let _ = write!(out, " {a}");
        }
        out.push('\n');
        let flags = |out: &mut String, cells: &[bool]| {
            for row in cells.chunks(self.width) {
                let line: Vec<&str> = row.iter().map(|b| if *b { "1" } else { "0" }).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        };
        flags(&mut out, &self.ground_blocked);
        for row in self.elevation.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        for layer in &self.air_blocked {
            flags(&mut out, layer);
        }
        out
    }

    /// Blocks every cell within Euclidean distance `radius` (m) of a blocked
    /// cell, each layer independently. Elevation is untouched.
    pub fn inflate(&self, radius: f64) -> GridWorld {
        let mut out = self.clone();
        if !(radius > 0.0) {
            return out;
        }
        let reach = (radius / self.resolution)
            .floor()
            .min(self.width.max(self.height) as f64) as i64;
        let limit = radius * radius * (1.0 + 1e-12);
        let res2 = self.resolution * self.resolution;
        let offsets: Vec<(i64, i64)> = (-reach..=reach)
            .flat_map(|dy| (-reach..=reach).map(move |dx| (dx, dy)))
            .filter(|&(dx, dy)| ((dx * dx + dy * dy) as f64) * res2 <= limit)
            .collect();
        for layer in 0..self.layer_count() {
            let src = self.layer_cells(layer);
            let dst = out.layer_cells_mut(layer);
            for y in 0..self.height {
                for x in 0..self.width {
                    if !src[y * self.width + x] {
                        continue;
                    }
                    for &(dx, dy) in &offsets {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx >= 0
                            && ny >= 0
                            && (nx as usize) < self.width
                            && (ny as usize) < self.height
                        {
                            dst[ny as usize * self.width + nx as usize] = true;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Free-function form of [`GridWorld::inflate`].
pub fn inflate(world: &GridWorld, radius: f64) -> GridWorld {
    world.inflate(radius)
}

/// Free-function form of [`GridWorld::parse`].
pub fn load_grid(text: &str) -> Result<GridWorld, MapError> {
    GridWorld::parse(text)
}

fn parse_flag(token: &str, line: usize) -> Result<bool, MapError> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(MapError::Token {
            line,
            token: token.to_owned(),
            message: "occupancy must be 0 or 1".into(),
        }),
    }
}

fn validate_header(
    width: usize,
    height: usize,
    resolution: f64,
    altitudes: &[f64],
) -> Result<(), MapError> {
    if width == 0 || height == 0 {
        return Err(MapError::Invalid("dimensions must be >= 1".into()));
    }
    match width.checked_mul(height) {
        Some(cells) if cells <= MAX_CELLS => {}
        _ => {
            return Err(MapError::Invalid(format!(
                "{width}x{height} exceeds the limit of {MAX_CELLS} cells"
            )))
        }
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(MapError::Invalid("resolution must be > 0".into()));
    }
    if altitudes.len() > MAX_AIR_LAYERS {
        return Err(MapError::Invalid(format!(
            "more than {MAX_AIR_LAYERS} air layers"
        )));
    }
    if altitudes.iter().any(|a| !a.is_finite()) {
        return Err(MapError::Invalid("altitudes must be finite".into()));
    }
    if altitudes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MapError::NonMonotoneLayers);
    }
    Ok(())
}
