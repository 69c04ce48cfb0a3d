use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::rng::{path_rng, PathRng};
use crate::scalar::Scalar;

use super::{GridScheme, GridSimulator};

/// Runs `f(path_index, rng)` for every path in parallel; results are in
/// path order and independent of the thread count.
pub fn par_map_paths<U, F>(num_paths: usize, master_seed: u64, domain: u64, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize, &mut PathRng) -> U + Sync,
{
    (0..num_paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = path_rng(master_seed, domain, k as u64);
            f(k, &mut rng)
        })
        .collect()
}

/// `num_paths × n` matrix of grid values, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble<T> {
    pub data: Vec<T>,
    pub num_paths: usize,
    pub n: usize,
    pub scheme: GridScheme<T>,
    pub seed_label: String,
    pub trawl_label: String,
    pub master_seed: u64,
    pub centered: bool,
}

pub fn simulate_ensemble<T: Scalar>(sim: &GridSimulator<T>, num_paths: usize, master_seed: u64, domain: u64) -> PathEnsemble<T> {
    let rows = par_map_paths(num_paths, master_seed, domain, |_, rng| sim.sample_path(rng));
    PathEnsemble {
        data: rows.concat(),
        num_paths,
        n: sim.scheme.n,
        scheme: sim.scheme,
        seed_label: sim.seed.label(),
        trawl_label: sim.trawl.label(),
        master_seed,
        centered: false,
    }
}

/// Metadata written next to a binary or CSV ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSidecar {
    pub schema: u32,
    pub num_paths: usize,
    pub n: usize,
    pub delta: f64,
    pub c: f64,
    pub p: f64,
    pub seed: String,
    pub trawl: String,
    pub master_seed: u64,
    pub centered: bool,
    pub data_sha256: String,
    pub spec_sha256: Option<String>,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl<T: Scalar> PathEnsemble<T> {
    pub fn row(&self, k: usize) -> &[T] {
        &self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Subtracts the exact marginal mean.
    pub fn center(&mut self, mean: T) {
        if !self.centered {
            self.data.iter_mut().for_each(|x| *x = *x - mean);
            self.centered = true;
        }
    }

    fn sidecar(&self, bytes: &[u8], spec: Option<&str>) -> EnsembleSidecar {
        EnsembleSidecar {
            schema: 1,
            num_paths: self.num_paths,
            n: self.n,
            delta: self.scheme.delta().f64(),
            c: self.scheme.c.f64(),
            p: self.scheme.p.f64(),
            seed: self.seed_label.clone(),
            trawl: self.trawl_label.clone(),
            master_seed: self.master_seed,
            centered: self.centered,
            data_sha256: hex(&Sha256::digest(bytes)),
            spec_sha256: spec.map(|s| hex(&Sha256::digest(s.as_bytes()))),
        }
    }

    fn write_sidecar(&self, path: &Path, bytes: &[u8], spec: Option<&str>) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.sidecar(bytes, spec)).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(sidecar_path(path), json)?;
        Ok(())
    }

    /// Little-endian `f64` matrix plus `<path>.json`. `spec` is the source
    /// text of the scenario, hashed into the sidecar.
    pub fn write_binary(&self, path: &Path, spec: Option<&str>) -> Result<()> {
        let bytes: Vec<u8> = self.data.iter().flat_map(|x| x.f64().to_le_bytes()).collect();
        fs::write(path, &bytes)?;
        self.write_sidecar(path, &bytes, spec)
    }

    pub fn write_csv(&self, path: &Path, spec: Option<&str>) -> Result<()> {
        let mut buf = Vec::new();
        {
            let mut w = BufWriter::new(&mut buf);
            for r in self.rows() {
                let line: Vec<String> = r.iter().map(|x| format!("{:e}", x.f64())).collect();
                writeln!(w, "{}", line.join(","))?;
            }
        }
        fs::write(path, &buf)?;
        self.write_sidecar(path, &buf, spec)
    }
}

/// Loads a binary ensemble and checks it against its sidecar hash.
pub fn read_binary(path: &Path) -> Result<(Vec<f64>, EnsembleSidecar)> {
    let bytes = fs::read(path)?;
    let meta: EnsembleSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?).map_err(|e| Error::Format(e.to_string()))?;
    if hex(&Sha256::digest(&bytes)) != meta.data_sha256 {
        return Err(Error::Format(format!("{} does not match its sidecar hash", path.display())));
    }
    if bytes.len() != 8 * meta.num_paths * meta.n {
        return invalid("binary size disagrees with sidecar shape");
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok((data, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevySeedSpec;
    use crate::sim::SimMethod;
    use crate::trawl::TrawlFunction;

    fn sim() -> GridSimulator<f64> {
        let t = TrawlFunction::exponential(1.0).unwrap();
        let s = LevySeedSpec::poisson(1.0).unwrap();
        GridSimulator::new(&s, &t, GridScheme::fixed(16, 0.25).unwrap(), SimMethod::Auto).unwrap()
    }

    #[test]
    fn ensemble_independent_of_thread_count() {
        let s = sim();
        let run =
            |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| simulate_ensemble(&s, 200, 42, 3));
        let a = run(1);
        assert_eq!(a, run(4));
        assert_eq!(a, run(7));
        assert_ne!(a.data, simulate_ensemble(&s, 200, 43, 3).data);
    }

    #[test]
    fn binary_round_trip_and_tamper_detection() {
        let e = simulate_ensemble(&sim(), 10, 1, 0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ens.bin");
        e.write_binary(&p, Some("n = 16")).unwrap();
        let (data, meta) = read_binary(&p).unwrap();
        assert_eq!(data, e.data);
        assert_eq!((meta.num_paths, meta.n, meta.schema), (10, 16, 1));
        assert!(meta.spec_sha256.is_some());
        let mut bytes = fs::read(&p).unwrap();
        bytes[0] ^= 1;
        fs::write(&p, bytes).unwrap();
        assert!(read_binary(&p).is_err());
        let c = dir.path().join("ens.csv");
        e.write_csv(&c, None).unwrap();
        assert_eq!(fs::read_to_string(&c).unwrap().lines().count(), 10);
    }

    #[test]
    fn marginals_are_stationary() {
        let mut e = simulate_ensemble(&sim(), 20_000, 11, 0);
        e.center(1.0);
        for j in [0, 7, 15] {
            let col = e.column(j);
            let m = col.iter().sum::<f64>() / col.len() as f64;
            assert!(m.abs() < 4.0 * (1.0 / col.len() as f64).sqrt(), "column {j}: {m}");
        }
    }
}
