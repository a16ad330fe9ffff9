//! GMAP binary raster format.
//!
//! Layout (little-endian):
//!
//! ```text
//! "GMAP" | version u16 = 1 | channel_count u16 | height u32 | width u32
//! | resolution_micrometers u32 | ego_row u32 | ego_col u32
//! | ego_heading_microradians i32
//! then per channel: channel_id u16 | height*width f32, row-major
//! ```
//!
//! Channel ids 0..=5 are [`ChannelId`] layers. Derived rasters reuse the
//! container with [`MASK_CHANNEL`], [`DISTANCE_CHANNEL`] and the two
//! direction channels.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid_map::{Cell, ChannelId, GridGeometry, GridMap};

pub const MAGIC: &[u8; 4] = b"GMAP";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

pub const MASK_CHANNEL: u16 = 100;
pub const DISTANCE_CHANNEL: u16 = 101;
pub const DIRECTION_DX_CHANNEL: u16 = 102;
pub const DIRECTION_DY_CHANNEL: u16 = 103;

/// Container contents without any interpretation of channel ids.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGmap {
    pub geometry: GridGeometry,
    pub channels: Vec<(u16, Vec<f32>)>,
}

impl RawGmap {
    pub fn channel(&self, id: u16) -> Option<&[f32]> {
        self.channels
            .iter()
            .find(|(c, _)| *c == id)
            .map(|(_, d)| d.as_slice())
    }
}

pub fn encode(raw: &RawGmap) -> Result<Vec<u8>> {
    let g = &raw.geometry;
    let n = g.len();
    let count = u16::try_from(raw.channels.len())
        .map_err(|_| Error::invalid("too many channels for GMAP"))?;
    let dim = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::invalid(format!("{what} {v} exceeds u32")))
    };
    let mut seen = Vec::with_capacity(raw.channels.len());
    let mut out = Vec::with_capacity(HEADER_LEN + raw.channels.len() * (2 + 4 * n));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&dim(g.height(), "height")?.to_le_bytes());
    out.extend_from_slice(&dim(g.width(), "width")?.to_le_bytes());
    out.extend_from_slice(&g.resolution_um().to_le_bytes());
    out.extend_from_slice(&dim(g.ego_cell().row as usize, "ego row")?.to_le_bytes());
    out.extend_from_slice(&dim(g.ego_cell().col as usize, "ego col")?.to_le_bytes());
    out.extend_from_slice(&g.heading_urad().to_le_bytes());
    for (id, data) in &raw.channels {
        if seen.contains(id) {
            return Err(Error::invalid(format!("duplicate channel id {id}")));
        }
        seen.push(*id);
        if data.len() != n {
            return Err(Error::invalid(format!(
                "channel {id} has {} cells, expected {n}",
                data.len()
            )));
        }
        out.extend_from_slice(&id.to_le_bytes());
        for v in data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::format(
                self.pos as u64,
                format!(
                    "truncated {what}: need {n} bytes, {} left",
                    self.buf.len() - self.pos
                ),
            ));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn i32(&mut self, what: &str) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<RawGmap> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != MAGIC {
        return Err(Error::format(0, format!("bad magic {magic:?}")));
    }
    let version = r.u16("version")?;
    if version != VERSION {
        return Err(Error::format(4, format!("unsupported version {version}")));
    }
    let count = r.u16("channel count")?;
    let height = r.u32("height")? as usize;
    let width = r.u32("width")? as usize;
    let resolution_um = r.u32("resolution")?;
    let ego_row = r.u32("ego row")?;
    let ego_col = r.u32("ego col")?;
    let heading = r.i32("heading")?;
    let geometry = GridGeometry::from_raw(
        height,
        width,
        resolution_um,
        Cell::new(ego_row as i64, ego_col as i64),
        heading,
    )
    .map_err(|e| Error::format(8, e.to_string()))?;

    let n = geometry.len();
    let mut channels: Vec<(u16, Vec<f32>)> = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let at = r.pos;
        let id = r.u16("channel id")?;
        if channels.iter().any(|(c, _)| *c == id) {
            return Err(Error::format(
                at as u64,
                format!("duplicate channel id {id}"),
            ));
        }
        let payload = r.take(n * 4, "channel payload")?;
        let data = payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        channels.push((id, data));
    }
    if r.pos != bytes.len() {
        return Err(Error::format(
            r.pos as u64,
            format!("{} trailing bytes", bytes.len() - r.pos),
        ));
    }
    Ok(RawGmap { geometry, channels })
}

pub fn read_raw(path: impl AsRef<Path>) -> Result<RawGmap> {
    decode(&fs::read(path)?)
}

pub fn write_raw(path: impl AsRef<Path>, raw: &RawGmap) -> Result<()> {
    fs::write(path, encode(raw)?)?;
    Ok(())
}

impl From<GridMap> for RawGmap {
    fn from(g: GridMap) -> Self {
        let (geometry, channels) = g.into_parts();
        RawGmap {
            geometry,
            channels: channels.into_iter().map(|(id, d)| (id.code(), d)).collect(),
        }
    }
}

impl TryFrom<RawGmap> for GridMap {
    type Error = Error;

    fn try_from(raw: RawGmap) -> Result<GridMap> {
        let mut channels = BTreeMap::new();
        for (code, data) in raw.channels {
            let id = ChannelId::from_code(code).ok_or_else(|| {
                Error::format(
                    HEADER_LEN as u64,
                    format!("channel id {code} is not a grid-map layer"),
                )
            })?;
            channels.insert(id, data);
        }
        GridMap::from_channels(raw.geometry, channels)
    }
}

pub fn encode_grid(g: &GridMap) -> Result<Vec<u8>> {
    encode(&RawGmap::from(g.clone()))
}

pub fn decode_grid(bytes: &[u8]) -> Result<GridMap> {
    GridMap::try_from(decode(bytes)?)
}

pub fn write_gmap(path: impl AsRef<Path>, g: &GridMap) -> Result<()> {
    fs::write(path, encode_grid(g)?)?;
    Ok(())
}

pub fn read_gmap(path: impl AsRef<Path>) -> Result<GridMap> {
    decode_grid(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_grid() -> GridMap {
        let mut g = GridMap::new(
            &[
                ChannelId::Occupancy,
                ChannelId::Elevation,
                ChannelId::GroundMarkings,
            ],
            5,
            7,
            0.26,
            Cell::new(4, 3),
            0.25,
        )
        .unwrap();
        g.set(ChannelId::Occupancy, Cell::new(1, 2), 0.75);
        g.set(ChannelId::Elevation, Cell::new(0, 6), -1.5);
        g.set(ChannelId::GroundMarkings, Cell::new(4, 0), 1.0);
        g
    }

    #[test]
    fn header_layout() {
        let bytes = encode_grid(&sample_grid()).unwrap();
        assert_eq!(&bytes[0..4], b"GMAP");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 3);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 5);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 7);
        assert_eq!(
            u32::from_le_bytes(bytes[16..20].try_into().unwrap()),
            260_000
        );
        assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[24..28].try_into().unwrap()), 3);
        assert_eq!(
            i32::from_le_bytes(bytes[28..32].try_into().unwrap()),
            250_000
        );
        // channels in ascending id order: GroundMarkings(0), Occupancy(3), Elevation(5)
        assert_eq!(u16::from_le_bytes([bytes[32], bytes[33]]), 0);
        assert_eq!(bytes.len(), HEADER_LEN + 3 * (2 + 4 * 35));
    }

    #[test]
    fn grid_round_trip_exact() {
        let g = sample_grid();
        let back = decode_grid(&encode_grid(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert_eq!(encode_grid(&back).unwrap(), encode_grid(&g).unwrap());
    }

    #[test]
    fn rejects_bad_magic_and_version() {
        let mut bytes = encode_grid(&sample_grid()).unwrap();
        bytes[0] = b'X';
        assert!(matches!(
            decode(&bytes),
            Err(Error::Format { offset: 0, .. })
        ));
        let mut bytes = encode_grid(&sample_grid()).unwrap();
        bytes[4] = 2;
        assert!(matches!(
            decode(&bytes),
            Err(Error::Format { offset: 4, .. })
        ));
    }

    #[test]
    fn rejects_duplicate_channel() {
        let g = sample_grid();
        let mut bytes = encode_grid(&g).unwrap();
        // relabel the second channel (Occupancy) as GroundMarkings
        let second = HEADER_LEN + 2 + 4 * 35;
        bytes[second..second + 2].copy_from_slice(&0u16.to_le_bytes());
        match decode(&bytes) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, second as u64),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_truncation_and_trailing() {
        let bytes = encode_grid(&sample_grid()).unwrap();
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode(&bytes[..10]).is_err());
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(decode(&longer).is_err());
    }

    #[test]
    fn unknown_layer_is_not_a_grid() {
        let raw = RawGmap {
            geometry: *sample_grid().geometry(),
            channels: vec![(MASK_CHANNEL, vec![0.0; 35])],
        };
        let bytes = encode(&raw).unwrap();
        assert_eq!(decode(&bytes).unwrap(), raw);
        assert!(decode_grid(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn raw_round_trip(
            h in 1usize..6, w in 1usize..6, res_um in 1u32..1_000_000,
            heading in -3_141_592i32..3_141_592,
            vals in proptest::collection::vec(proptest::num::f32::ANY, 36 * 2),
        ) {
            let geometry = GridGeometry::from_raw(h, w, res_um, Cell::new(0, 0), heading).unwrap();
            let n = h * w;
            let raw = RawGmap {
                geometry,
                channels: vec![(7, vals[..n].to_vec()), (101, vals[36..36 + n].to_vec())],
            };
            let bytes = encode(&raw).unwrap();
            let back = decode(&bytes).unwrap();
            prop_assert_eq!(back.geometry, raw.geometry);
            for ((ia, da), (ib, db)) in back.channels.iter().zip(&raw.channels) {
                prop_assert_eq!(ia, ib);
                let ba: Vec<u32> = da.iter().map(|v| v.to_bits()).collect();
                let bb: Vec<u32> = db.iter().map(|v| v.to_bits()).collect();
                prop_assert_eq!(ba, bb);
            }
        }
    }
}
