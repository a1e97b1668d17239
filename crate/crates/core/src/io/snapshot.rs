use super::{IoError, IoResult};
use crate::dynamics::{LinState, WaveStateDiff, WaveStateUndiff};
use crate::scalar::Cplx;
use crate::spectral::{validate_lattice, Lattice, QpFunction};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::sync::Arc;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"QPWW";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Which pair of unknowns a snapshot holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Diff = 0,
    Undiff = 1,
    Linearized = 2,
}

impl StateKind {
    fn from_byte(b: u8) -> IoResult<Self> {
        match b {
            0 => Ok(Self::Diff),
            1 => Ok(Self::Undiff),
            2 => Ok(Self::Linearized),
            _ => Err(IoError::CorruptSnapshot(format!("unknown state kind {b}"))),
        }
    }
}

/// A stored state together with its lattice and time stamp.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub kind: StateKind,
    /// Whether the fields were projected onto the admissible class.
    pub projected: bool,
    pub step: u64,
    pub time: f64,
    pub fields: [QpFunction<f64>; 2],
}

impl Snapshot {
    pub fn lattice(&self) -> &Arc<Lattice<f64>> {
        self.fields[0].lattice()
    }

    pub fn from_diff(s: &WaveStateDiff<f64>, step: u64, time: f64) -> Self {
        Self::new(StateKind::Diff, s.w.clone(), s.r.clone(), step, time)
    }

    pub fn from_undiff(s: &WaveStateUndiff<f64>, step: u64, time: f64) -> Self {
        Self::new(StateKind::Undiff, s.w.clone(), s.q.clone(), step, time)
    }

    pub fn from_lin(s: &LinState<f64>, step: u64, time: f64) -> Self {
        Self::new(StateKind::Linearized, s.w.clone(), s.r.clone(), step, time)
    }

    fn new(kind: StateKind, a: QpFunction<f64>, b: QpFunction<f64>, step: u64, time: f64) -> Self {
        Self {
            kind,
            projected: true,
            step,
            time,
            fields: [a, b],
        }
    }

    fn expect(&self, kind: StateKind) -> IoResult<[QpFunction<f64>; 2]> {
        if self.kind != kind {
            return Err(IoError::validation(
                "snapshot",
                format!("holds a {:?} state, expected {:?}", self.kind, kind),
            ));
        }
        Ok(self.fields.clone())
    }

    pub fn into_diff(&self) -> IoResult<WaveStateDiff<f64>> {
        let [w, r] = self.expect(StateKind::Diff)?;
        Ok(WaveStateDiff::new(w, r))
    }

    pub fn into_undiff(&self) -> IoResult<WaveStateUndiff<f64>> {
        let [w, q] = self.expect(StateKind::Undiff)?;
        Ok(WaveStateUndiff::new(w, q))
    }

    pub fn into_lin(&self) -> IoResult<LinState<f64>> {
        let [w, r] = self.expect(StateKind::Linearized)?;
        Ok(LinState::new(w, r))
    }
}

/// Serialized snapshot: magic, version, kind, flags, lattice, time stamp,
/// coefficients, then a SHA-256 of everything before it. Little endian.
pub fn snapshot_bytes(s: &Snapshot) -> Vec<u8> {
    let lat = s.lattice();
    let mut out = Vec::new();
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.push(s.kind as u8);
    out.push(s.projected as u8);
    out.extend_from_slice(&(lat.dim() as u32).to_le_bytes());
    for k in lat.frequencies() {
        out.extend_from_slice(&k.to_le_bytes());
    }
    out.extend_from_slice(&(lat.radius() as u32).to_le_bytes());
    out.extend_from_slice(&s.step.to_le_bytes());
    out.extend_from_slice(&s.time.to_le_bytes());
    out.extend_from_slice(&(lat.len() as u64).to_le_bytes());
    for f in &s.fields {
        for c in f.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> IoResult<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.buf.len());
        let end = end.ok_or_else(|| IoError::CorruptSnapshot("unexpected end of data".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> IoResult<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> IoResult<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
    fn u64(&mut self) -> IoResult<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn f64(&mut self) -> IoResult<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

/// Parses bytes produced by [`snapshot_bytes`].
pub fn read_snapshot(bytes: &[u8]) -> IoResult<Snapshot> {
    if bytes.len() < 8 || &bytes[..4] != SNAPSHOT_MAGIC {
        return Err(IoError::CorruptSnapshot("missing magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != SNAPSHOT_VERSION {
        return Err(IoError::FormatVersionMismatch {
            found: version,
            expected: SNAPSHOT_VERSION,
        });
    }
    if bytes.len() < 8 + 32 {
        return Err(IoError::CorruptSnapshot("truncated".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(IoError::CorruptSnapshot("checksum mismatch".into()));
    }
    let mut r = Reader { buf: body, pos: 8 };
    let kind = StateKind::from_byte(r.u8()?)?;
    let projected = r.u8()? != 0;
    let d = r.u32()? as usize;
    if d == 0 || d > 8 {
        return Err(IoError::CorruptSnapshot(format!("dimension {d}")));
    }
    let k = (0..d).map(|_| r.f64()).collect::<IoResult<Vec<_>>>()?;
    let n = r.u32()? as usize;
    let step = r.u64()?;
    let time = r.f64()?;
    let len = r.u64()? as usize;
    let lat = validate_lattice(&k, n, 0.0)?;
    if len != lat.len() {
        return Err(IoError::CorruptSnapshot(format!(
            "{len} coefficients for a box of {}",
            lat.len()
        )));
    }
    let mut field = || -> IoResult<QpFunction<f64>> {
        let c = (0..len)
            .map(|_| Ok(Cplx::new(r.f64()?, r.f64()?)))
            .collect::<IoResult<Vec<_>>>()?;
        Ok(QpFunction::from_coeffs(lat.clone(), c))
    };
    let a = field()?;
    let b = field()?;
    if r.pos != body.len() {
        return Err(IoError::CorruptSnapshot("trailing bytes".into()));
    }
    Ok(Snapshot {
        kind,
        projected,
        step,
        time,
        fields: [a, b],
    })
}

pub fn export_snapshot(s: &Snapshot, path: &Path) -> IoResult<()> {
    std::fs::write(path, snapshot_bytes(s))?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> IoResult<Snapshot> {
    read_snapshot(&std::fs::read(path)?)
}

/// Loads a snapshot and zero-pads it into `target`, which must have the
/// same frequencies and a box at least as large.
pub fn load_snapshot_into(path: &Path, target: &Arc<Lattice<f64>>) -> IoResult<Snapshot> {
    let mut s = load_snapshot(path)?;
    let lat = s.lattice().clone();
    if lat.frequencies() != target.frequencies() {
        return Err(IoError::validation(
            "snapshot",
            "frequency vector differs from the configured lattice",
        ));
    }
    if lat.radius() > target.radius() {
        return Err(IoError::validation(
            "snapshot",
            format!(
                "box N = {} does not fit into N = {}",
                lat.radius(),
                target.radius()
            ),
        ));
    }
    if lat.radius() < target.radius() {
        log::info!(
            "embedding snapshot from N = {} into N = {}",
            lat.radius(),
            target.radius()
        );
        let [a, b] = &s.fields;
        s.fields = [a.embed(target)?, b.embed(target)?];
    }
    Ok(s)
}
