use super::{CharacteristicProfile, Frame, RadialGrid};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

const MAGIC: &str = "# maxcool-profile v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileHeader {
    pub e: f64,
    pub time: f64,
    pub frame: Frame,
}

/// Two-column `x,phi` CSV preceded by a one-line header.
pub fn write_profile<W: Write>(mut out: W, phi: &CharacteristicProfile, e: f64, frame: Frame) -> Result<()> {
    writeln!(out, "{MAGIC} e={e} t={} frame={frame}", phi.time)?;
    for (i, v) in phi.values.iter().enumerate() {
        writeln!(out, "{:e},{:e}", phi.grid.node(i), v)?;
    }
    Ok(())
}

pub fn read_profile<R: BufRead>(input: R) -> Result<(CharacteristicProfile, ProfileHeader)> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty profile file".into()))??;
    let rest = first
        .strip_prefix(MAGIC)
        .ok_or_else(|| Error::Parse(format!("missing `{MAGIC}` header")))?;
    let (mut e, mut time, mut frame) = (None, None, None);
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
        let num = || v.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{v}`")));
        match k {
            "e" => e = Some(num()?),
            "t" => time = Some(num()?),
            "frame" => frame = Some(v.parse::<Frame>()?),
            _ => return Err(Error::Parse(format!("unknown header key `{k}`"))),
        }
    }
    let header = ProfileHeader {
        e: e.ok_or_else(|| Error::Parse("header lacks e".into()))?,
        time: time.ok_or_else(|| Error::Parse("header lacks t".into()))?,
        frame: frame.ok_or_else(|| Error::Parse("header lacks frame".into()))?,
    };
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (x, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad row `{line}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{s}`")))
        };
        xs.push(parse(x)?);
        values.push(parse(v)?);
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let grid = RadialGrid::new(xs.len(), *xs.last().expect("non-empty"))?;
    for (i, x) in xs.iter().enumerate() {
        if (x - grid.node(i)).abs() > 1e-9 * grid.x_max() {
            return Err(Error::GridMismatch(format!(
                "node {i} at {x} is not on a uniform grid from 0"
            )));
        }
    }
    let profile = CharacteristicProfile::from_values(grid, values, header.time)?;
    Ok((profile, header))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid = RadialGrid::new(300, 12.0).unwrap();
        let mut phi = CharacteristicProfile::default_initial(grid);
        phi.time = 2.5;
        let mut buf = Vec::new();
        write_profile(&mut buf, &phi, 0.9, Frame::Rescaled).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# maxcool-profile v1 e=0.9 t=2.5 frame=rescaled-g\n"));
        let (back, h) = read_profile(&buf[..]).unwrap();
        assert_eq!(back, phi);
        assert_eq!(
            h,
            ProfileHeader {
                e: 0.9,
                time: 2.5,
                frame: Frame::Rescaled
            }
        );
    }

    #[test]
    fn rejects_missing_header() {
        assert!(read_profile(&b"0,1\n1,0.5\n"[..]).is_err());
    }
}
