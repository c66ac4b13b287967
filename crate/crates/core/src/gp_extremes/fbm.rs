use std::io::{Read, Write};
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::{ordered_map, stream, StreamRng};

const MAGIC: &[u8; 4] = b"FBM1";
const DENSE_LIMIT: usize = 1 << 12;

#[derive(Clone)]
enum Method {
    Brownian,
    Linear,
    Circulant { sqrt_eig: Arc<Vec<f64>>, fft: Arc<dyn Fft<f64>> },
    Dense { chol: Arc<Vec<f64>> },
}

/// Samples fBm on the grid {kT/n : k = 0..n}.
///
/// Paths are drawn from independent streams keyed by path index, so any
/// batch is reproducible regardless of how it is split across workers.
#[derive(Clone)]
pub struct FbmGenerator {
    hurst: f64,
    n: usize,
    horizon: f64,
    method: Method,
}

impl FbmGenerator {
    /// Sampling scheme: `brownian`, `linear`, `circulant` or `dense`.
    pub fn method_name(&self) -> &'static str {
        match self.method {
            Method::Brownian => "brownian",
            Method::Linear => "linear",
            Method::Circulant { .. } => "circulant",
            Method::Dense { .. } => "dense",
        }
    }
}

impl std::fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = self.method_name();
        f.debug_struct("FbmGenerator")
            .field("hurst", &self.hurst)
            .field("n", &self.n)
            .field("horizon", &self.horizon)
            .field("method", &m)
            .finish()
    }
}

fn fgn_cov(k: usize, h: f64) -> f64 {
    let k = k as f64;
    let p = 2.0 * h;
    0.5 * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).abs().powf(p))
}

fn circulant_spectrum(h: f64, n: usize) -> (Vec<f64>, Arc<dyn Fft<f64>>) {
    let m = 2 * n;
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| Complex64::new(fgn_cov(if j <= n { j } else { m - j }, h), 0.0))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut row);
    (row.into_iter().map(|z| z.re).collect(), fft)
}

fn cholesky(h: f64, n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = fgn_cov(i - j, h);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::EmbeddingFailure(format!("covariance not positive definite at row {i}")));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

impl FbmGenerator {
    pub fn new(hurst: f64, n_steps: usize, horizon: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst <= 1.0) {
            return Err(Error::spec(format!("H must lie in (0, 1], got {hurst}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::spec(format!("horizon must be positive, got {horizon}")));
        }
        if n_steps == 0 || !n_steps.is_power_of_two() {
            return Err(Error::spec(format!("n_steps must be a power of two, got {n_steps}")));
        }
        let method = if hurst == 0.5 {
            Method::Brownian
        } else if hurst == 1.0 {
            Method::Linear
        } else {
            let (eig, fft) = circulant_spectrum(hurst, n_steps);
            let top = eig.iter().cloned().fold(0.0, f64::max);
            let worst = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            if worst >= -1e-10 * top {
                let m = eig.len() as f64;
                let sqrt_eig = eig.iter().map(|&l| (l.max(0.0) / m).sqrt()).collect();
                Method::Circulant { sqrt_eig: Arc::new(sqrt_eig), fft }
            } else if n_steps <= DENSE_LIMIT {
                Method::Dense { chol: Arc::new(cholesky(hurst, n_steps)?) }
            } else {
                return Err(Error::EmbeddingFailure(format!(
                    "negative eigenvalue {worst:.3e} and n = {n_steps} exceeds the dense limit {DENSE_LIMIT}"
                )));
            }
        };
        Ok(FbmGenerator { hurst, n: n_steps, horizon, method })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn n_steps(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| k as f64 * self.step()).collect()
    }

    /// Writes the n increments into `out`, unscaled (unit step).
    fn unit_increments(&self, rng: &mut StreamRng, out: &mut [f64]) {
        match &self.method {
            Method::Brownian => out.iter_mut().for_each(|x| *x = rng.sample(StandardNormal)),
            Method::Linear => {
                let z: f64 = rng.sample(StandardNormal);
                out.iter_mut().for_each(|x| *x = z);
            }
            Method::Circulant { sqrt_eig, fft } => {
                let mut w: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|&s| Complex64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal)))
                    .collect();
                fft.process(&mut w);
                for (o, z) in out.iter_mut().zip(&w) {
                    *o = z.re;
                }
            }
            Method::Dense { chol } => {
                let z: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = chol[i * self.n..i * self.n + i + 1].iter().zip(&z).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    /// Fills `path` (length n + 1) with one sample path starting at 0.
    pub fn fill(&self, rng: &mut StreamRng, path: &mut [f64]) {
        assert_eq!(path.len(), self.n + 1);
        self.unit_increments(rng, &mut path[1..]);
        let scale = self.step().powf(self.hurst);
        path[0] = 0.0;
        let mut acc = 0.0;
        for x in path[1..].iter_mut() {
            acc += *x * scale;
            *x = acc;
        }
    }

    /// max_k (B(t_k) − trend(t_k)) over one path, including t = 0.
    pub fn running_sup<F: Fn(f64) -> f64>(&self, rng: &mut StreamRng, trend: F) -> f64 {
        let dt = self.step();
        let mut best = -trend(0.0);
        if let Method::Brownian = self.method {
            let sd = dt.sqrt();
            let mut x = 0.0;
            for k in 1..=self.n {
                x += sd * rng.sample::<f64, _>(StandardNormal);
                best = best.max(x - trend(k as f64 * dt));
            }
            return best;
        }
        let p = self.sample(rng);
        for (k, x) in p.iter().enumerate().skip(1) {
            best = best.max(x - trend(k as f64 * dt));
        }
        best
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Vec<f64> {
        let mut p = vec![0.0; self.n + 1];
        self.fill(rng, &mut p);
        p
    }

    /// Path `i` of the batch keyed by `seed`.
    pub fn path(&self, seed: u64, i: u64) -> Vec<f64> {
        self.sample(&mut stream(seed, i))
    }

    /// Applies `f` to paths 0..count and returns the results in path order.
    pub fn map_paths<T, F>(&self, count: usize, seed: u64, workers: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync,
    {
        const CHUNK: usize = 64;
        let chunks = count.div_ceil(CHUNK);
        ordered_map(chunks, workers, |c| {
            let mut buf = vec![0.0; self.n + 1];
            (c * CHUNK..((c + 1) * CHUNK).min(count))
                .map(|i| {
                    self.fill(&mut stream(seed, i as u64), &mut buf);
                    f(&buf)
                })
                .collect::<Vec<T>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }
}

/// One fBm path on [0, T] with `n_steps` steps.
pub fn fbm_simulate(hurst: f64, n_steps: usize, horizon: f64, seed: u64) -> Result<Vec<f64>> {
    Ok(FbmGenerator::new(hurst, n_steps, horizon)?.path(seed, 0))
}

/// `count` paths, each drawn from its own stream.
pub fn fbm_paths(hurst: f64, n_steps: usize, horizon: f64, count: usize, seed: u64, workers: usize) -> Result<Vec<Vec<f64>>> {
    let g = FbmGenerator::new(hurst, n_steps, horizon)?;
    Ok(g.map_paths(count, seed, workers, <[f64]>::to_vec))
}

/// A batch of paths on a shared grid, as stored in dump files.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDump {
    pub hurst: f64,
    pub n_steps: usize,
    pub horizon: f64,
    pub paths: Vec<Vec<f64>>,
}

impl PathDump {
    /// Binary layout: "FBM1", H (f64), n (u64), T (f64), then each path's
    /// n + 1 values, all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::spec(format!("write failed: {e}"));
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&self.hurst.to_le_bytes()).map_err(io)?;
        w.write_all(&(self.n_steps as u64).to_le_bytes()).map_err(io)?;
        w.write_all(&self.horizon.to_le_bytes()).map_err(io)?;
        for p in &self.paths {
            debug_assert_eq!(p.len(), self.n_steps + 1);
            for x in p {
                w.write_all(&x.to_le_bytes()).map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf).map_err(|e| Error::spec(format!("read failed: {e}")))?;
        if buf.len() < 28 || &buf[..4] != MAGIC {
            return Err(Error::spec("not an FBM1 dump"));
        }
        let f = |i: usize| f64::from_le_bytes(buf[i..i + 8].try_into().unwrap());
        let hurst = f(4);
        let n_steps = u64::from_le_bytes(buf[12..20].try_into().unwrap()) as usize;
        let horizon = f(20);
        let row = (n_steps + 1) * 8;
        let body = &buf[28..];
        if body.len() % row != 0 {
            return Err(Error::spec("FBM1 body is not a whole number of paths"));
        }
        let paths = body
            .chunks_exact(row)
            .map(|c| c.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect())
            .collect();
        Ok(PathDump { hurst, n_steps, horizon, paths })
    }

    /// Columns `t, path0, path1, ...`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let err = |e: csv::Error| Error::spec(format!("csv write failed: {e}"));
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.paths.len()).map(|i| format!("path{i}")));
        wr.write_record(&header).map_err(err)?;
        let dt = self.horizon / self.n_steps as f64;
        for k in 0..=self.n_steps {
            let mut rec = vec![(k as f64 * dt).to_string()];
            rec.extend(self.paths.iter().map(|p| p[k].to_string()));
            wr.write_record(&rec).map_err(err)?;
        }
        wr.flush().map_err(|e| Error::spec(format!("csv flush failed: {e}")))
    }
}
