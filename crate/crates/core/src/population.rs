//! Synthetic study populations and CSV-backed real ones.
//!
//! The six benchmark mean functions cover a linear surface, two curved
//! additive surfaces, one surface that is not a function of any single
//! index, and two genuine single-index surfaces in 4 and 10 auxiliaries.
//! Auxiliaries are independent Uniform(0, 1); responses add centered
//! Gaussian noise.
//!
//! Generation is reproducible by construction: each auxiliary column and
//! the noise vector get their own counter-based RNG stream, so a population
//! is a pure function of `(mean_fn, sigma, size, seed)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};
use crate::scalar::Real;

/// The benchmark mean functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeanFn {
    /// `x1 + x2`: linear.
    #[serde(rename = "m1")]
    M1,
    /// `1 + (x1 + x2)^2`: quadratic in one index.
    #[serde(rename = "m2")]
    M2,
    /// `x1 + x2 + 4 exp(-(x1 + x2)^2)`: bump in one index.
    #[serde(rename = "m3")]
    M3,
    /// `m3 + sqrt(x1^2 + x2^2)`: no exact single-index representation.
    #[serde(rename = "m4")]
    M4,
    /// `sin(pi x' theta0)`, `theta0 = (1, 1, 0, 1)/sqrt(3)` in 4 variables.
    #[serde(rename = "m5")]
    M5,
    /// `sin(pi x' theta0)`, `theta0 = (1, 1, 0, ..., 0, 1)/sqrt(3)` in 10.
    #[serde(rename = "m6")]
    M6,
}

impl MeanFn {
    pub const ALL: [MeanFn; 6] = [
        MeanFn::M1,
        MeanFn::M2,
        MeanFn::M3,
        MeanFn::M4,
        MeanFn::M5,
        MeanFn::M6,
    ];

    /// Number of auxiliary variables the function consumes.
    pub fn dim(self) -> usize {
        match self {
            MeanFn::M1 | MeanFn::M2 | MeanFn::M3 | MeanFn::M4 => 2,
            MeanFn::M5 => 4,
            MeanFn::M6 => 10,
        }
    }

    /// The generating index direction, for the two single-index surfaces.
    pub fn theta0<R: Real>(self) -> Option<Vec<R>> {
        let inv_sqrt3 = R::one() / R::of(3.0).sqrt();
        match self {
            MeanFn::M5 => Some(vec![inv_sqrt3, inv_sqrt3, R::zero(), inv_sqrt3]),
            MeanFn::M6 => {
                let mut t = vec![R::zero(); 10];
                t[0] = inv_sqrt3;
                t[1] = inv_sqrt3;
                t[9] = inv_sqrt3;
                Some(t)
            }
            _ => None,
        }
    }
}

impl fmt::Display for MeanFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MeanFn::M1 => "m1",
            MeanFn::M2 => "m2",
            MeanFn::M3 => "m3",
            MeanFn::M4 => "m4",
            MeanFn::M5 => "m5",
            MeanFn::M6 => "m6",
        };
        f.write_str(s)
    }
}

impl FromStr for MeanFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m1" => Ok(MeanFn::M1),
            "m2" => Ok(MeanFn::M2),
            "m3" => Ok(MeanFn::M3),
            "m4" => Ok(MeanFn::M4),
            "m5" => Ok(MeanFn::M5),
            "m6" => Ok(MeanFn::M6),
            other => Err(Error::InvalidConfig(format!(
                "unknown mean function {other:?} (expected m1..m6)"
            ))),
        }
    }
}

/// Noise-free surface value at one auxiliary row.
pub fn mean_value<R: Real>(f: MeanFn, x: &[R]) -> Result<R> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    let v = match f {
        MeanFn::M1 => x[0] + x[1],
        MeanFn::M2 => {
            let s = x[0] + x[1];
            R::one() + s * s
        }
        MeanFn::M3 => {
            let s = x[0] + x[1];
            s + R::of(4.0) * (-(s * s)).exp()
        }
        MeanFn::M4 => {
            let s = x[0] + x[1];
            s + R::of(4.0) * (-(s * s)).exp() + (x[0] * x[0] + x[1] * x[1]).sqrt()
        }
        MeanFn::M5 | MeanFn::M6 => {
            let theta0 = f.theta0::<R>().expect("single-index surface");
            (R::PI() * dot(x, &theta0)).sin()
        }
    };
    Ok(v)
}

/// Recipe for a synthetic population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationSpec<R> {
    pub mean_fn: MeanFn,
    pub sigma: R,
    pub size: usize,
    pub seed: u64,
}

/// A finite population: row ids, auxiliary matrix, and (when known)
/// responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<R> {
    pub ids: Vec<String>,
    pub x: Mat<R>,
    pub y: Option<Vec<R>>,
}

impl<R: Real> Population<R> {
    pub fn size(&self) -> usize {
        self.x.rows()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    /// The responses, or an error naming the first id if they are absent.
    pub fn responses(&self) -> Result<&[R]> {
        self.y.as_deref().ok_or_else(|| {
            Error::MissingResponse(self.ids.first().cloned().unwrap_or_default())
        })
    }
}

/// Standard normal draws by the Marsaglia polar method on top of a seeded
/// uniform stream. The pair-producing rejection loop caches its second
/// draw, so consecutive calls consume the stream in a fixed pattern.
pub(crate) struct NormalSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSource {
    pub(crate) fn new(rng: ChaCha8Rng) -> Self {
        NormalSource { rng, spare: None }
    }

    pub(crate) fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * self.rng.gen::<f64>() - 1.0;
            let v = 2.0 * self.rng.gen::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}

/// Generates a synthetic population, deterministic in its arguments:
/// auxiliary column `q` reads RNG stream `q + 1`, the noise reads
/// stream 0, all seeded from `spec.seed`.
pub fn generate<R: Real>(spec: &PopulationSpec<R>) -> Population<R> {
    let d = spec.mean_fn.dim();
    let n = spec.size;
    let mut x = Mat::zeros(n, d);
    for q in 0..d {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(q as u64 + 1);
        for i in 0..n {
            x.set(i, q, R::of(rng.gen::<f64>()));
        }
    }
    let mut noise_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    noise_rng.set_stream(0);
    let mut noise = NormalSource::new(noise_rng);
    let y: Vec<R> = (0..n)
        .map(|i| {
            let m = mean_value(spec.mean_fn, x.row(i)).expect("row has the right width");
            m + spec.sigma * R::of(noise.next_normal())
        })
        .collect();
    let ids = (1..=n).map(|i| i.to_string()).collect();
    Population { ids, x, y: Some(y) }
}

/// Loads a population from CSV with header `id,x1,...,xd[,y]`.
pub fn load_population(path: &Path) -> Result<Population<f64>> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Parse {
                path: display.clone(),
                line: 0,
                message: "cannot open file".to_string(),
            },
            _ => parse_err(&display, 1, &e.to_string()),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| parse_err(&display, 1, &e.to_string()))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.first() != Some(&"id") {
        return Err(parse_err(&display, 1, "first column must be \"id\""));
    }
    let has_y = cols.last() == Some(&"y");
    let d = cols.len() - 1 - usize::from(has_y);
    if d == 0 {
        return Err(parse_err(&display, 1, "no auxiliary columns found"));
    }
    for (q, name) in cols[1..1 + d].iter().enumerate() {
        let expected = format!("x{}", q + 1);
        if *name != expected {
            return Err(parse_err(
                &display,
                1,
                &format!("expected column {expected:?}, found {name:?}"),
            ));
        }
    }

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut y = if has_y { Some(Vec::new()) } else { None };
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(&display, idx + 2, &e.to_string()))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(idx + 2);
        if record.len() != cols.len() {
            return Err(parse_err(
                &display,
                line,
                &format!("expected {} fields, found {}", cols.len(), record.len()),
            ));
        }
        ids.push(record[0].to_string());
        let mut row = Vec::with_capacity(d);
        for q in 0..d {
            row.push(parse_field(&record[q + 1], &display, line, &cols[q + 1])?);
        }
        rows.push(row);
        if let Some(ys) = y.as_mut() {
            ys.push(parse_field(&record[d + 1], &display, line, "y")?);
        }
    }
    if ids.is_empty() {
        return Err(Error::PopulationTooSmall { min: 1, got: 0 });
    }
    Ok(Population {
        ids,
        x: Mat::from_rows(rows)?,
        y,
    })
}

/// Writes a population as CSV with the same schema [`load_population`]
/// reads. Floats are written with shortest round-trip precision.
pub fn save_population(pop: &Population<f64>, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(io_of_csv)?;
    let d = pop.dim();
    let mut header = vec!["id".to_string()];
    for q in 1..=d {
        header.push(format!("x{q}"));
    }
    if pop.y.is_some() {
        header.push("y".to_string());
    }
    writer.write_record(&header).map_err(io_of_csv)?;
    for i in 0..pop.size() {
        let mut record = vec![pop.ids[i].clone()];
        for q in 0..d {
            record.push(pop.x.get(i, q).to_string());
        }
        if let Some(y) = &pop.y {
            record.push(y[i].to_string());
        }
        writer.write_record(&record).map_err(io_of_csv)?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_err(path: &str, line: usize, message: &str) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.to_string(),
    }
}

fn parse_field(raw: &str, path: &str, line: usize, col: &str) -> Result<f64> {
    let v: f64 = raw.parse().map_err(|_| {
        parse_err(path, line, &format!("column {col:?}: {raw:?} is not a number"))
    })?;
    if !v.is_finite() {
        return Err(parse_err(
            path,
            line,
            &format!("column {col:?}: value {raw:?} is not finite"),
        ));
    }
    Ok(v)
}

fn io_of_csv(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidConfig(format!("csv write failed: {other:?}")),
    }
}
