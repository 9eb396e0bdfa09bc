//! Binary model files.
//!
//! Layout (little-endian): 8-byte magic, `u32` version, `u32` config length, the config as
//! JSON, `u64` state count, `u64` action count, then the table row-major as `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{AgentConfig, AgentError, QModel, QTable};

pub const MODEL_MAGIC: &[u8; 8] = b"TWQMODEL";
pub const MODEL_VERSION: u32 = 1;

const MAX_CONFIG_BYTES: u32 = 1 << 20;

pub fn write_model<W: Write>(model: &QModel, mut w: W) -> Result<(), AgentError> {
    let config =
        serde_json::to_vec(&model.config).map_err(|e| AgentError::Format(e.to_string()))?;
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&MODEL_VERSION.to_le_bytes())?;
    w.write_all(&(config.len() as u32).to_le_bytes())?;
    w.write_all(&config)?;
    w.write_all(&(model.table.n_states() as u64).to_le_bytes())?;
    w.write_all(&(model.table.n_actions() as u64).to_le_bytes())?;
    for v in model.table.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_model(model: &QModel, path: &Path) -> Result<(), AgentError> {
    write_model(model, BufWriter::new(File::create(path)?))
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N], AgentError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => AgentError::Format("truncated file".into()),
        _ => AgentError::Io(e),
    })?;
    Ok(buf)
}

pub fn read_model<R: Read>(mut r: R) -> Result<QModel, AgentError> {
    if &read_array::<8, _>(&mut r)? != MODEL_MAGIC {
        return Err(AgentError::Format("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != MODEL_VERSION {
        return Err(AgentError::Format(format!("unsupported version {version}")));
    }
    let config_len = u32::from_le_bytes(read_array(&mut r)?);
    if config_len > MAX_CONFIG_BYTES {
        return Err(AgentError::Format(format!(
            "config block of {config_len} bytes"
        )));
    }
    let mut config = vec![0u8; config_len as usize];
    r.read_exact(&mut config)
        .map_err(|_| AgentError::Format("truncated config block".into()))?;
    let config: AgentConfig = serde_json::from_slice(&config)
        .map_err(|e| AgentError::Format(format!("config block: {e}")))?;
    config.validate()?;
    let n_states = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let n_actions = u64::from_le_bytes(read_array(&mut r)?) as usize;
    if n_states != config.n_states() || n_actions != config.n_actions() {
        return Err(AgentError::Format(format!(
            "table is {n_states}x{n_actions} but config implies {}x{}",
            config.n_states(),
            config.n_actions()
        )));
    }
    let mut values = Vec::with_capacity(n_states * n_actions);
    for _ in 0..n_states * n_actions {
        values.push(f64::from_le_bytes(read_array(&mut r)?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(AgentError::Format("trailing bytes after table".into()));
    }
    Ok(QModel {
        config,
        table: QTable::from_values(n_states, n_actions, values)?,
    })
}

pub fn load_model(path: &Path) -> Result<QModel, AgentError> {
    read_model(BufReader::new(File::open(path)?))
}
