//! Binary dataset container.
//!
//! Layout (little-endian): magic `CGSD`, u16 version (= 1), u32 signal
//! count, u32 samples per signal, f64 sample interval, then per signal a
//! u8 label (0 = H0, 1 = H1), an f32 SNR/GSNR in dB (NaN for H0), and the
//! samples as interleaved f32 I/Q pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::dataset::LabeledDataset;
use crate::error::SignalError;
use crate::signal::{ComplexSignal, Hypothesis};
use crate::Result;

const MAGIC: &[u8; 4] = b"CGSD";
const VERSION: u16 = 1;

/// Writes a dataset. All signals must share one length.
pub fn write_dataset<P: AsRef<Path>>(path: P, dataset: &LabeledDataset) -> Result<()> {
    if dataset.is_empty() {
        return Err(SignalError::InvalidArgument("cannot write an empty dataset".into()));
    }
    let n = dataset.signals()[0].len();
    if dataset.signals().iter().any(|s| s.len() != n) {
        return Err(SignalError::InvalidArgument(
            "container requires uniform signal length".into(),
        ));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(dataset.len() as u32).to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&dataset.signals()[0].sample_interval().to_le_bytes())?;
    for ((signal, label), snr) in dataset
        .signals()
        .iter()
        .zip(dataset.labels())
        .zip(dataset.snr_db())
    {
        w.write_all(&[label.label()])?;
        let snr = snr.map(|v| v as f32).unwrap_or(f32::NAN);
        w.write_all(&snr.to_le_bytes())?;
        for s in signal.samples() {
            w.write_all(&(s.re as f32).to_le_bytes())?;
            w.write_all(&(s.im as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_exact<R: Read, const K: usize>(r: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

/// Reads a dataset written by [`write_dataset`].
pub fn read_dataset<P: AsRef<Path>>(path: P) -> Result<LabeledDataset> {
    let mut r = BufReader::new(File::open(path)?);
    let magic = read_exact::<_, 4>(&mut r)?;
    if &magic != MAGIC {
        return Err(SignalError::Format("bad magic, expected CGSD".into()));
    }
    let version = u16::from_le_bytes(read_exact::<_, 2>(&mut r)?);
    if version != VERSION {
        return Err(SignalError::Format(format!("unsupported version {version}")));
    }
    let count = u32::from_le_bytes(read_exact::<_, 4>(&mut r)?) as usize;
    let n = u32::from_le_bytes(read_exact::<_, 4>(&mut r)?) as usize;
    let sample_interval = f64::from_le_bytes(read_exact::<_, 8>(&mut r)?);
    if n == 0 || count == 0 {
        return Err(SignalError::Format("empty container".into()));
    }

    let mut signals = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    let mut snrs = Vec::with_capacity(count);
    for i in 0..count {
        let label = match read_exact::<_, 1>(&mut r)?[0] {
            0 => Hypothesis::H0,
            1 => Hypothesis::H1,
            other => {
                return Err(SignalError::Format(format!("signal {i}: bad label byte {other}")))
            }
        };
        let snr = f32::from_le_bytes(read_exact::<_, 4>(&mut r)?);
        let snr = if snr.is_nan() { None } else { Some(snr as f64) };
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let re = f32::from_le_bytes(read_exact::<_, 4>(&mut r)?);
            let im = f32::from_le_bytes(read_exact::<_, 4>(&mut r)?);
            samples.push(Complex64::new(re as f64, im as f64));
        }
        signals.push(ComplexSignal::new(samples, sample_interval)?);
        labels.push(label);
        snrs.push(snr);
    }
    LabeledDataset::new(signals, labels, snrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_dataset, ChannelKind, DatasetSpec, SignalKind};
    use crate::noise::NoiseSpec;

    fn tiny_dataset() -> LabeledDataset {
        build_dataset(&DatasetSpec {
            signal_kind: SignalKind::Gaussian,
            noise: NoiseSpec::Cscwg { variance: 1.0 },
            channel_kind: ChannelKind::Flat,
            n_samples_per_signal: 16,
            snr_grid_db: vec![0.0, 10.0],
            h0_count: 5,
            h1_count: 5,
            sample_interval: 50e-9,
            seed: 1,
        })
        .unwrap()
    }

    #[test]
    fn round_trip_is_stable_after_first_quantization() {
        let ds = tiny_dataset();
        let dir = std::env::temp_dir().join("cgsd-roundtrip-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p1 = dir.join("a.cgsd");
        let p2 = dir.join("b.cgsd");

        write_dataset(&p1, &ds).unwrap();
        let back = read_dataset(&p1).unwrap();
        assert_eq!(back.len(), ds.len());
        assert_eq!(back.labels(), ds.labels());
        // f32 storage: values match to single precision.
        for (a, b) in back.signals()[0].samples().iter().zip(ds.signals()[0].samples()) {
            assert!((a.re - b.re).abs() < 1e-6 && (a.im - b.im).abs() < 1e-6);
        }

        // Writing the read-back dataset reproduces the bytes exactly.
        write_dataset(&p2, &back).unwrap();
        let bytes1 = std::fs::read(&p1).unwrap();
        let bytes2 = std::fs::read(&p2).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn rejects_garbage() {
        let dir = std::env::temp_dir().join("cgsd-garbage-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.cgsd");
        std::fs::write(&p, b"not a dataset").unwrap();
        assert!(read_dataset(&p).is_err());
    }
}
