//! LTRC binary layout (all little-endian):
//!
//! ```text
//! "LTRC" | version u32 = 1 | L u32 | N u32 | d u32 | reserved u32 = 0
//! then L blocks of N*d float32, row-major (token, then coordinate)
//! ```
//!
//! Metadata lives in a sidecar `<path>.manifest.json` holding a flat string map.

use std::fs;
use std::path::{Path, PathBuf};

use super::{LayerTrace, Manifest, TraceError};

pub const MAGIC: [u8; 4] = *b"LTRC";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 24;

const HEADER_FIELDS: [&str; 6] = ["magic", "version", "L", "N", "d", "reserved"];

/// Sidecar path for a trace file: the same path with `.manifest.json` appended.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}

/// Serializes the binary part of a trace.
pub fn encode(trace: &LayerTrace) -> Result<Vec<u8>, TraceError> {
    trace.validate()?;
    let fields = [
        ("L", trace.layer_count()),
        ("N", trace.token_count()),
        ("d", trace.dim()),
    ];
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * trace.data().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for (field, value) in fields {
        let value = u32::try_from(value).map_err(|_| TraceError::InvalidHeader {
            field,
            value: value as u64,
            reason: "does not fit in u32",
        })?;
        out.extend_from_slice(&value.to_le_bytes());
    }
    out.extend_from_slice(&0u32.to_le_bytes());
    for x in trace.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

/// Parses the binary part of a trace. The manifest is left empty.
pub fn decode(bytes: &[u8]) -> Result<LayerTrace, TraceError> {
    let word = |i: usize| -> Result<[u8; 4], TraceError> {
        bytes
            .get(4 * i..4 * i + 4)
            .map(|w| w.try_into().expect("4-byte slice"))
            .ok_or(TraceError::TruncatedHeader {
                field: HEADER_FIELDS[i],
            })
    };

    let magic = word(0)?;
    if magic != MAGIC {
        return Err(TraceError::BadMagic { found: magic });
    }
    let version = u32::from_le_bytes(word(1)?);
    if version != VERSION {
        return Err(TraceError::VersionMismatch {
            expected: VERSION,
            found: version,
        });
    }
    let layers = u32::from_le_bytes(word(2)?);
    let tokens = u32::from_le_bytes(word(3)?);
    let dim = u32::from_le_bytes(word(4)?);
    let reserved = u32::from_le_bytes(word(5)?);
    if reserved != 0 {
        return Err(TraceError::ReservedNonZero { found: reserved });
    }
    for (field, value, min) in [("L", layers, 2), ("N", tokens, 1), ("d", dim, 1)] {
        if value < min {
            return Err(TraceError::InvalidHeader {
                field,
                value: value.into(),
                reason: if min == 2 {
                    "must be at least 2"
                } else {
                    "must be at least 1"
                },
            });
        }
    }

    let declared = u64::from(layers) * u64::from(tokens) * u64::from(dim);
    let expected_bytes = declared * 4;
    let actual_bytes = (bytes.len() - HEADER_LEN) as u64;
    if actual_bytes < expected_bytes {
        return Err(TraceError::TruncatedPayload {
            declared,
            expected_bytes,
            actual_bytes,
        });
    }
    if actual_bytes > expected_bytes {
        return Err(TraceError::TrailingBytes {
            extra: actual_bytes - expected_bytes,
        });
    }

    let data = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
        .collect();
    LayerTrace::new(layers as usize, tokens as usize, dim as usize, data)
}

/// Writes `trace` as an LTRC file plus its manifest sidecar.
///
/// The trace is validated first; on failure nothing is written.
pub fn write_trace(trace: &LayerTrace, path: impl AsRef<Path>) -> Result<(), TraceError> {
    let path = path.as_ref();
    let bytes = encode(trace)?;
    let manifest = serde_json::to_string_pretty(&trace.manifest)?;
    let io = |source| TraceError::Io {
        path: path.display().to_string(),
        source,
    };
    fs::write(path, bytes).map_err(io)?;
    let sidecar = manifest_path(path);
    fs::write(&sidecar, manifest + "\n").map_err(|source| TraceError::Io {
        path: sidecar.display().to_string(),
        source,
    })
}

/// Reads an LTRC file and, when present, its manifest sidecar.
pub fn read_trace(path: impl AsRef<Path>) -> Result<LayerTrace, TraceError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let trace = decode(&bytes)?;
    let sidecar = manifest_path(path);
    let manifest = if sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|source| TraceError::Io {
            path: sidecar.display().to_string(),
            source,
        })?;
        serde_json::from_str::<Manifest>(&text)?
    } else {
        Manifest::new()
    };
    Ok(trace.with_manifest(manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> LayerTrace {
        LayerTrace::new(2, 1, 1, vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn smallest_trace_layout() {
        let bytes = encode(&tiny()).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 8);
        assert_eq!(&bytes[..4], b"LTRC");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &1u32.to_le_bytes());
        assert_eq!(&bytes[16..20], &1u32.to_le_bytes());
        assert_eq!(&bytes[20..24], &[0, 0, 0, 0]);
        assert_eq!(&bytes[24..28], &0.0f32.to_le_bytes());
        assert_eq!(&bytes[28..32], &1.0f32.to_le_bytes());
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode(&tiny()).unwrap();
        bytes[0] = b'X';
        let err = decode(&bytes).unwrap_err();
        assert!(err.to_string().contains("bad magic"), "{err}");
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = encode(&tiny()).unwrap();
        bytes[4] = 2;
        assert!(matches!(
            decode(&bytes),
            Err(TraceError::VersionMismatch { found: 2, .. })
        ));
    }

    #[test]
    fn header_claims_more_layers_than_present() {
        let trace = LayerTrace::new(2, 2, 3, (0..12).map(|x| x as f32).collect()).unwrap();
        let mut bytes = encode(&trace).unwrap();
        bytes[8..12].copy_from_slice(&3u32.to_le_bytes());
        let err = decode(&bytes).unwrap_err();
        assert!(err.to_string().contains("truncated payload"), "{err}");
    }

    #[test]
    fn every_prefix_is_diagnosed() {
        let trace = LayerTrace::new(3, 2, 2, (0..12).map(|x| x as f32 * 0.5).collect()).unwrap();
        let bytes = encode(&trace).unwrap();
        for cut in 0..bytes.len() {
            let err = decode(&bytes[..cut]).unwrap_err();
            let msg = err.to_string();
            assert!(
                msg.contains("truncated header") || msg.contains("truncated payload"),
                "prefix {cut}: {msg}"
            );
        }
        assert_eq!(decode(&bytes).unwrap(), trace);
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode(&tiny()).unwrap();
        bytes.push(0);
        assert!(matches!(
            decode(&bytes),
            Err(TraceError::TrailingBytes { extra: 1 })
        ));
    }

    #[test]
    fn nonzero_reserved_and_zero_dims_rejected() {
        let mut bytes = encode(&tiny()).unwrap();
        bytes[20] = 1;
        assert!(matches!(
            decode(&bytes),
            Err(TraceError::ReservedNonZero { found: 1 })
        ));

        let mut bytes = encode(&tiny()).unwrap();
        bytes[16..20].copy_from_slice(&0u32.to_le_bytes());
        let err = decode(&bytes).unwrap_err();
        assert!(err.to_string().contains("`d`"), "{err}");
    }

    #[test]
    fn non_finite_payload_rejected_on_read() {
        let mut bytes = encode(&tiny()).unwrap();
        bytes[28..32].copy_from_slice(&f32::INFINITY.to_le_bytes());
        assert!(matches!(
            decode(&bytes),
            Err(TraceError::NonFinite { layer: 1, .. })
        ));
    }

    #[test]
    fn file_round_trip_with_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.ltrc");
        let mut manifest = Manifest::new();
        manifest.insert("model_id".into(), "tiny".into());
        manifest.insert("sample_id".into(), "0".into());
        let trace = tiny().with_manifest(manifest);
        write_trace(&trace, &path).unwrap();
        assert!(manifest_path(&path).exists());
        assert_eq!(read_trace(&path).unwrap(), trace);
    }

    #[test]
    fn non_finite_rejected_before_writing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ltrc");
        let trace = LayerTrace::new_unchecked(2, 1, 1, vec![0.0, f32::NAN]);
        assert!(matches!(
            write_trace(&trace, &path),
            Err(TraceError::NonFinite { .. })
        ));
        assert!(!path.exists());
        assert!(!manifest_path(&path).exists());
    }

    #[test]
    fn missing_sidecar_gives_empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.ltrc");
        std::fs::write(&path, encode(&tiny()).unwrap()).unwrap();
        assert!(read_trace(&path).unwrap().manifest.is_empty());
    }
}
