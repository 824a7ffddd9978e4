use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use plume_core::{GridSpec, Plume, SensitivityUnits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_autodiff::{Graph, Tensor};

use crate::loss::{decoder_forward, encoder_forward, register_params};
use crate::{CvaeArch, CvaeError, LatentCode};

/// A trained (or freshly initialized) autoencoder: the architecture
/// table, the parameter tensors in storage order, and the KL weight it
/// was (or will be) trained with. Immutable; training produces new
/// models.
#[derive(Debug, Clone)]
pub struct CvaeModel {
    arch: CvaeArch,
    lambda: f64,
    params: Vec<Tensor>,
}

impl CvaeModel {
    /// Glorot-initialized model.
    pub fn init(arch: CvaeArch, lambda: f64, seed: u64) -> Result<Self, CvaeError> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = arch.init_params(&mut rng);
        Ok(Self { arch, lambda, params })
    }

    pub fn from_parts(arch: CvaeArch, lambda: f64, params: Vec<Tensor>) -> Result<Self, CvaeError> {
        arch.validate()?;
        let shapes = arch.param_shapes();
        if params.len() != shapes.len() {
            return Err(CvaeError::Shape(format!(
                "{} parameter tensors, architecture declares {}",
                params.len(),
                shapes.len()
            )));
        }
        for (i, (p, s)) in params.iter().zip(&shapes).enumerate() {
            if p.shape() != &s[..] {
                return Err(CvaeError::Shape(format!(
                    "parameter {i} has shape {:?}, architecture declares {s:?}",
                    p.shape()
                )));
            }
        }
        Ok(Self { arch, lambda, params })
    }

    pub fn arch(&self) -> &CvaeArch {
        &self.arch
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn params(&self) -> &[Tensor] {
        &self.params
    }

    /// The same architecture with replaced parameter tensors.
    pub fn with_params(&self, params: Vec<Tensor>) -> Result<Self, CvaeError> {
        Self::from_parts(self.arch.clone(), self.lambda, params)
    }

    /// Encode an image tensor of shape `[1, side, side]` into its
    /// variational mean and log-variance. Deterministic.
    pub fn encode_image(&self, image: &Tensor) -> Result<LatentCode, CvaeError> {
        let side = self.arch.input_side;
        if image.shape() != [1, side, side] {
            return Err(CvaeError::Shape(format!(
                "image shape {:?}, expected [1, {side}, {side}]",
                image.shape()
            )));
        }
        let mut g = Graph::new();
        let ids = register_params(&mut g, &self.arch, &self.params);
        let input = g.leaf(image.clone());
        let (mean, log_var) = encoder_forward(&mut g, &self.arch, &ids, input)?;
        Ok(LatentCode {
            mean: g.value(mean).data().to_vec(),
            log_variance: g.value(log_var).data().to_vec(),
        })
    }

    /// Encode a canonical-frame plume (its grid must be square with the
    /// architecture's input side).
    pub fn encode(&self, plume: &Plume) -> Result<LatentCode, CvaeError> {
        self.encode_image(&plume_to_image(plume, self.arch.input_side)?)
    }

    /// Decode a latent vector into the deterministic decoder-mean image
    /// of shape `[1, side, side]`.
    pub fn decode(&self, latent: &[f64]) -> Result<Tensor, CvaeError> {
        if latent.len() != self.arch.r {
            return Err(CvaeError::Shape(format!(
                "latent length {}, architecture has r = {}",
                latent.len(),
                self.arch.r
            )));
        }
        let mut g = Graph::new();
        let ids = register_params(&mut g, &self.arch, &self.params);
        let u = g.leaf(Tensor::from_vec(vec![self.arch.r], latent.to_vec())?);
        let out = decoder_forward(&mut g, &self.arch, &ids, u)?;
        Ok(g.value(out).clone())
    }

    /// Decode onto a canonical grid (must match the input side).
    pub fn decode_plume(&self, latent: &[f64], grid: &GridSpec) -> Result<Plume, CvaeError> {
        let side = self.arch.input_side;
        if grid.n_lon != side || grid.n_lat != side {
            return Err(CvaeError::Shape(format!(
                "grid is {}x{}, architecture decodes {side}x{side}",
                grid.n_lon, grid.n_lat
            )));
        }
        let image = self.decode(latent)?;
        Ok(Plume::new(
            *grid,
            image.data().to_vec(),
            SensitivityUnits::NsPerG,
            (0.0, 0.0),
            0,
            None,
        )?)
    }

    // --- checkpoint format ------------------------------------------------

    pub fn save<W: Write>(&self, mut w: W) -> Result<(), CvaeError> {
        writeln!(w, "CVAE1")?;
        writeln!(w, "input_side {}", self.arch.input_side)?;
        writeln!(w, "r {}", self.arch.r)?;
        writeln!(w, "leaky_slope {}", self.arch.leaky_slope)?;
        writeln!(w, "enc_channels {}", join(&self.arch.enc_channels))?;
        writeln!(w, "dec_initial {}", self.arch.dec_initial_channels)?;
        writeln!(w, "dec_channels {}", join(&self.arch.dec_channels))?;
        writeln!(w, "enc_geom {} {} {}", self.arch.enc_kernel, self.arch.enc_padding, self.arch.pool_window)?;
        writeln!(w, "dec_geom {} {} {}", self.arch.dec_kernel, self.arch.dec_stride, self.arch.dec_padding)?;
        writeln!(w, "lambda {}", self.lambda)?;
        let total: usize = self.params.iter().map(Tensor::len).sum();
        writeln!(w, "params {} {}", self.params.len(), total)?;
        for p in &self.params {
            for v in p.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load<R: Read>(r: R) -> Result<Self, CvaeError> {
        let mut rd = BufReader::new(r);
        let mut line = String::new();
        let magic = next_line(&mut rd, &mut line)?;
        if magic != "CVAE1" {
            return Err(CvaeError::Format(format!("bad magic {magic:?}, expected \"CVAE1\"")));
        }
        let input_side = parse_field(&next_line(&mut rd, &mut line)?, "input_side")?;
        let r_dim = parse_field(&next_line(&mut rd, &mut line)?, "r")?;
        let leaky_slope: f64 = parse_field(&next_line(&mut rd, &mut line)?, "leaky_slope")?;
        let enc_channels = parse_list(&next_line(&mut rd, &mut line)?, "enc_channels")?;
        let dec_initial = parse_field(&next_line(&mut rd, &mut line)?, "dec_initial")?;
        let dec_channels = parse_list(&next_line(&mut rd, &mut line)?, "dec_channels")?;
        let enc_geom: Vec<usize> = parse_list(&next_line(&mut rd, &mut line)?, "enc_geom")?;
        let dec_geom: Vec<usize> = parse_list(&next_line(&mut rd, &mut line)?, "dec_geom")?;
        let lambda: f64 = parse_field(&next_line(&mut rd, &mut line)?, "lambda")?;
        if enc_geom.len() != 3 || dec_geom.len() != 3 {
            return Err(CvaeError::Format("geometry lines need 3 fields".into()));
        }
        let arch = CvaeArch {
            input_side,
            r: r_dim,
            enc_channels,
            dec_initial_channels: dec_initial,
            dec_channels,
            leaky_slope,
            enc_kernel: enc_geom[0],
            enc_padding: enc_geom[1],
            pool_window: enc_geom[2],
            dec_kernel: dec_geom[0],
            dec_stride: dec_geom[1],
            dec_padding: dec_geom[2],
        };
        arch.validate()?;

        let params_line = next_line(&mut rd, &mut line)?;
        let counts: Vec<usize> = parse_list(&params_line, "params")?;
        let [n_tensors, total] = counts[..] else {
            return Err(CvaeError::Format("params line needs 2 fields".into()));
        };
        let shapes = arch.param_shapes();
        let declared: usize = shapes.iter().map(|s| s.iter().product::<usize>()).sum();
        if n_tensors != shapes.len() || total != declared {
            return Err(CvaeError::Format(format!(
                "checkpoint declares {n_tensors} tensors/{total} values, architecture needs {}/{declared}",
                shapes.len()
            )));
        }
        let mut params = Vec::with_capacity(shapes.len());
        for shape in shapes {
            let len: usize = shape.iter().product();
            let mut buf = vec![0u8; len * 8];
            rd.read_exact(&mut buf)?;
            let data =
                buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
            params.push(Tensor::from_vec(shape, data)?);
        }
        Self::from_parts(arch, lambda, params)
    }

    pub fn save_file(&self, path: &Path) -> Result<(), CvaeError> {
        self.save(BufWriter::new(File::create(path)?))
    }

    pub fn load_file(path: &Path) -> Result<Self, CvaeError> {
        Self::load(File::open(path)?)
    }
}

/// View a square canonical plume as a `[1, side, side]` image tensor.
pub fn plume_to_image(p: &Plume, side: usize) -> Result<Tensor, CvaeError> {
    let grid = p.grid();
    if grid.n_lon != side || grid.n_lat != side {
        return Err(CvaeError::Shape(format!(
            "plume grid is {}x{}, expected {side}x{side}",
            grid.n_lon, grid.n_lat
        )));
    }
    Ok(Tensor::from_vec(vec![1, side, side], p.values().to_vec())?)
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn next_line<R: BufRead>(r: &mut R, line: &mut String) -> Result<String, CvaeError> {
    line.clear();
    if r.read_line(line)? == 0 {
        return Err(CvaeError::Format("unexpected end of header".into()));
    }
    Ok(line.trim_end_matches(['\r', '\n']).to_string())
}

fn parse_field<T: std::str::FromStr>(line: &str, key: &str) -> Result<T, CvaeError> {
    line.strip_prefix(key)
        .map(str::trim)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CvaeError::Format(format!("bad {key} line: {line:?}")))
}

fn parse_list<T: std::str::FromStr>(line: &str, key: &str) -> Result<Vec<T>, CvaeError> {
    line.strip_prefix(key)
        .map(|s| {
            s.split_whitespace()
                .map(|t| t.parse().map_err(|_| ()))
                .collect::<Result<Vec<T>, ()>>()
        })
        .and_then(Result::ok)
        .ok_or_else(|| CvaeError::Format(format!("bad {key} line: {line:?}")))
}
