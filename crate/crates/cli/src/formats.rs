//! Plain-text frame formats: PBM (P1) for binary layers, PGM (P2) for
//! integer and real fields, CSV for frame sequences and time series.
//!
//! PGM files carry their value mapping in a comment line
//! `# value = <offset> + <scale> * gray`. Integer fields use scale 1, so
//! they round-trip exactly; real fields are quantized to 16 bits.

use std::fmt::Write as _;
use std::io::{Read, Write};

use oregonator_core::{IntField2D, RealField2D};

use crate::CliError;

/// Largest PGM sample value.
pub const PGM_MAXVAL: i64 = 65_535;

fn malformed(what: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("malformed {what}: {msg}"))
}

/// Writes a binary layer as ASCII PBM, one image row per text line.
pub fn write_pbm(frame: &IntField2D, out: &mut impl Write) -> Result<(), CliError> {
    frame.require_binary()?;
    let mut s = format!("P1\n{} {}\n", frame.width(), frame.height());
    for k in 0..frame.height() {
        let row: Vec<&str> = (0..frame.width())
            .map(|j| if frame.get(j, k) == 1 { "1" } else { "0" })
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Header tokens of a netpbm file with comments removed, plus the comments.
fn tokens(text: &str) -> (Vec<&str>, Vec<&str>) {
    let mut toks = Vec::new();
    let mut comments = Vec::new();
    for line in text.lines() {
        let (body, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(line[i + 1..].trim())),
            None => (line, None),
        };
        toks.extend(body.split_whitespace());
        comments.extend(comment);
    }
    (toks, comments)
}

fn dims(toks: &[&str], what: &str) -> Result<(usize, usize), CliError> {
    let parse = |i: usize, name: &str| -> Result<usize, CliError> {
        toks.get(i)
            .ok_or_else(|| malformed(what, format!("missing {name}")))?
            .parse()
            .map_err(|e| malformed(what, format!("{name}: {e}")))
    };
    Ok((parse(1, "width")?, parse(2, "height")?))
}

pub fn read_pbm(input: &mut impl Read) -> Result<IntField2D, CliError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (toks, _) = tokens(&text);
    if toks.first() != Some(&"P1") {
        return Err(malformed("PBM", "expected magic P1"));
    }
    let (w, h) = dims(&toks, "PBM")?;
    // P1 allows samples without separating whitespace
    let samples: Vec<i64> = toks[3..]
        .iter()
        .flat_map(|t| t.chars())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(malformed("PBM", format!("sample {other:?}"))),
        })
        .collect::<Result<_, _>>()?;
    if samples.len() != w * h {
        return Err(malformed("PBM", format!("expected {} samples, found {}", w * h, samples.len())));
    }
    Ok(IntField2D::new(w, h, samples)?)
}

/// Affine map `value = offset + scale · gray` stored in a PGM comment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayMap {
    pub offset: f64,
    pub scale: f64,
}

fn write_pgm_samples(
    w: usize,
    h: usize,
    maxval: i64,
    map: GrayMap,
    gray: impl Fn(usize, usize) -> i64,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let mut s = String::new();
    writeln!(s, "P2").unwrap();
    writeln!(s, "# value = {} + {} * gray", map.offset, map.scale).unwrap();
    writeln!(s, "{w} {h}").unwrap();
    writeln!(s, "{maxval}").unwrap();
    for k in 0..h {
        let row: Vec<String> = (0..w).map(|j| gray(j, k).to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Integer field as PGM with `value = min + gray`.
pub fn write_pgm_int(frame: &IntField2D, out: &mut impl Write) -> Result<(), CliError> {
    let lo = frame.values().iter().copied().min().unwrap_or(0);
    let hi = frame.values().iter().copied().max().unwrap_or(0);
    if hi - lo > PGM_MAXVAL {
        return Err(CliError::Input(format!(
            "value range [{lo}, {hi}] is wider than the PGM limit {PGM_MAXVAL}"
        )));
    }
    let map = GrayMap {
        offset: lo as f64,
        scale: 1.0,
    };
    write_pgm_samples(frame.width(), frame.height(), (hi - lo).max(1), map, |j, k| frame.get(j, k) - lo, out)
}

/// Real field as 16-bit PGM spanning `[min, max]`.
pub fn write_pgm_real(frame: &RealField2D, out: &mut impl Write) -> Result<(), CliError> {
    let lo = frame.values().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = frame.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = if hi > lo { (hi - lo) / PGM_MAXVAL as f64 } else { 1.0 };
    let map = GrayMap { offset: lo, scale };
    write_pgm_samples(
        frame.width(),
        frame.height(),
        PGM_MAXVAL,
        map,
        |j, k| ((frame.get(j, k) - lo) / scale).round() as i64,
        out,
    )
}

/// Parsed PGM: gray samples plus the recorded mapping (identity when the
/// file has none).
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: i64,
    pub map: GrayMap,
    pub gray: Vec<i64>,
}

impl Pgm {
    pub fn values(&self) -> Vec<f64> {
        self.gray.iter().map(|&g| self.map.offset + self.map.scale * g as f64).collect()
    }

    /// Integer field; the mapping must have an integer offset and scale 1.
    pub fn to_int_field(&self) -> Result<IntField2D, CliError> {
        let GrayMap { offset, scale } = self.map;
        if scale != 1.0 || offset.fract() != 0.0 {
            return Err(malformed("PGM", "mapping is not an integer shift"));
        }
        let vals = self.gray.iter().map(|&g| offset as i64 + g).collect();
        Ok(IntField2D::new(self.width, self.height, vals)?)
    }
}

fn parse_map(comment: &str) -> Option<GrayMap> {
    let rest = comment.strip_prefix("value =")?;
    let (offset, rest) = rest.split_once('+')?;
    let (scale, rest) = rest.split_once('*')?;
    if rest.trim() != "gray" {
        return None;
    }
    Some(GrayMap {
        offset: offset.trim().parse().ok()?,
        scale: scale.trim().parse().ok()?,
    })
}

pub fn read_pgm(input: &mut impl Read) -> Result<Pgm, CliError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (toks, comments) = tokens(&text);
    if toks.first() != Some(&"P2") {
        return Err(malformed("PGM", "expected magic P2"));
    }
    let (width, height) = dims(&toks, "PGM")?;
    let maxval: i64 = toks
        .get(3)
        .ok_or_else(|| malformed("PGM", "missing maxval"))?
        .parse()
        .map_err(|e| malformed("PGM", format!("maxval: {e}")))?;
    if !(1..=PGM_MAXVAL).contains(&maxval) {
        return Err(malformed("PGM", format!("maxval {maxval} out of range")));
    }
    let gray: Vec<i64> = toks[4..]
        .iter()
        .map(|t| t.parse::<i64>().map_err(|e| malformed("PGM", format!("sample {t:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    if gray.len() != width * height {
        return Err(malformed("PGM", format!("expected {} samples, found {}", width * height, gray.len())));
    }
    if let Some(g) = gray.iter().find(|&&g| g < 0 || g > maxval) {
        return Err(malformed("PGM", format!("sample {g} outside 0..={maxval}")));
    }
    let map = comments.iter().find_map(|c| parse_map(c)).unwrap_or(GrayMap {
        offset: 0.0,
        scale: 1.0,
    });
    Ok(Pgm {
        width,
        height,
        maxval,
        map,
        gray,
    })
}

/// One `n,j,k,value` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRow<T> {
    pub n: usize,
    pub j: usize,
    pub k: usize,
    pub value: T,
}

pub const FRAME_HEADER: [&str; 4] = ["n", "j", "k", "value"];

/// Writes frames as `n,j,k,value` rows (frame-major, then row-major).
pub fn write_frames_csv<T: Copy + ToString>(
    frames: &[&oregonator_core::Field2D<T>],
    first_n: usize,
    out: impl Write,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FRAME_HEADER)?;
    for (i, f) in frames.iter().enumerate() {
        let n = (first_n + i).to_string();
        for k in 0..f.height() {
            for j in 0..f.width() {
                w.write_record([n.as_str(), &j.to_string(), &k.to_string(), &f.get(j, k).to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_cell_rows<T: std::str::FromStr>(input: impl Read) -> Result<Vec<CellRow<T>>, CliError>
where
    T::Err: std::fmt::Display,
{
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().collect::<Vec<_>>() != FRAME_HEADER {
        return Err(malformed("CSV", "expected header n,j,k,value"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let idx = |i: usize| -> Result<usize, CliError> {
            field(i).parse().map_err(|e| malformed("CSV", format!("line {}: {e}", rows.len() + 2)))
        };
        rows.push(CellRow {
            n: idx(0)?,
            j: idx(1)?,
            k: idx(2)?,
            value: field(3)
                .parse()
                .map_err(|e| malformed("CSV", format!("line {}: {e}", rows.len() + 2)))?,
        });
    }
    Ok(rows)
}

/// `(n, values, width, height)` of one frame.
pub type RawFrame<T> = (usize, Vec<T>, usize, usize);

/// Rebuilds the frames of a `n,j,k,value` file. Every frame must cover its
/// grid exactly once and all frames must share one shape.
pub fn frames_from_rows<T: Copy + Default>(rows: &[CellRow<T>]) -> Result<Vec<RawFrame<T>>, CliError> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    let mut frames = Vec::new();
    let mut shape = None;
    for n in ns {
        let cells: Vec<&CellRow<T>> = rows.iter().filter(|r| r.n == n).collect();
        let w = cells.iter().map(|r| r.j + 1).max().unwrap_or(0);
        let h = cells.iter().map(|r| r.k + 1).max().unwrap_or(0);
        if *shape.get_or_insert((w, h)) != (w, h) {
            return Err(malformed("CSV", format!("frame {n} is {w}x{h}, earlier frames differ")));
        }
        let mut vals = vec![T::default(); w * h];
        let mut seen = vec![false; w * h];
        for c in &cells {
            let i = c.k * w + c.j;
            if std::mem::replace(&mut seen[i], true) {
                return Err(malformed("CSV", format!("frame {n} repeats cell ({}, {})", c.j, c.k)));
            }
            vals[i] = c.value;
        }
        if seen.iter().any(|s| !s) {
            return Err(malformed("CSV", format!("frame {n} does not cover its {w}x{h} grid")));
        }
        frames.push((n, vals, w, h));
    }
    Ok(frames)
}

pub fn read_int_frames(input: impl Read) -> Result<Vec<(usize, IntField2D)>, CliError> {
    let rows = read_cell_rows::<i64>(input)?;
    frames_from_rows(&rows)?
        .into_iter()
        .map(|(n, v, w, h)| Ok((n, IntField2D::new(w, h, v)?)))
        .collect()
}

pub fn read_real_frames(input: impl Read) -> Result<Vec<(usize, RealField2D)>, CliError> {
    let rows = read_cell_rows::<f64>(input)?;
    frames_from_rows(&rows)?
        .into_iter()
        .map(|(n, v, w, h)| Ok((n, RealField2D::new(w, h, v)?)))
        .collect()
}

/// Header plus numeric rows.
pub fn write_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, out: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(input: impl Read) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|x| x.trim().parse::<f64>().map_err(|e| malformed("CSV", format!("{x:?}: {e}"))))
                .collect::<Result<_, _>>()?,
        );
    }
    Ok((header, rows))
}

/// Text rendering of a binary layer: `#` for 1, `.` for 0.
pub fn ascii(frame: &IntField2D) -> String {
    let mut s = String::with_capacity((frame.width() + 1) * frame.height());
    for k in 0..frame.height() {
        s.extend((0..frame.width()).map(|j| if frame.get(j, k) == 1 { '#' } else { '.' }));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pbm_round_trip() {
        let f = IntField2D::from_fn(5, 3, |j, k| ((j + 2 * k) % 3 == 0) as i64).unwrap();
        let mut buf = Vec::new();
        write_pbm(&f, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "P1\n5 3\n1 0 0 1 0\n0 1 0 0 1\n0 0 1 0 0\n");
        assert_eq!(read_pbm(&mut buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn pbm_accepts_packed_samples_and_comments() {
        let text = "P1\n# a comment\n3 2\n101\n010\n";
        let f = read_pbm(&mut text.as_bytes()).unwrap();
        assert_eq!(f.values(), &[1, 0, 1, 0, 1, 0]);
        assert!(read_pbm(&mut "P1\n2 2\n1 0 1\n".as_bytes()).is_err());
        assert!(read_pbm(&mut "P2\n1 1\n1\n0\n".as_bytes()).is_err());
    }

    #[test]
    fn pbm_rejects_non_binary_layers() {
        let f = IntField2D::new(2, 1, vec![0, 2]).unwrap();
        assert!(write_pbm(&f, &mut Vec::new()).is_err());
    }

    #[test]
    fn pgm_int_round_trip() {
        let f = IntField2D::from_fn(4, 3, |j, k| j as i64 * 3 - k as i64 * 7).unwrap();
        let mut buf = Vec::new();
        write_pgm_int(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("P2\n# value = -14 + 1 * gray\n4 3\n23\n"));
        assert_eq!(read_pgm(&mut buf.as_slice()).unwrap().to_int_field().unwrap(), f);
    }

    #[test]
    fn pgm_uniform_int_field() {
        let f = IntField2D::filled(2, 2, -1).unwrap();
        let mut buf = Vec::new();
        write_pgm_int(&f, &mut buf).unwrap();
        assert_eq!(read_pgm(&mut buf.as_slice()).unwrap().to_int_field().unwrap(), f);
    }

    #[test]
    fn pgm_real_round_trip_within_quantum() {
        let f = RealField2D::from_fn(6, 4, |j, k| 0.1 + (j as f64).sin().abs() + 0.01 * k as f64).unwrap();
        let mut buf = Vec::new();
        write_pgm_real(&f, &mut buf).unwrap();
        let pgm = read_pgm(&mut buf.as_slice()).unwrap();
        let quantum = pgm.map.scale;
        for (a, b) in pgm.values().iter().zip(f.values()) {
            assert!((a - b).abs() <= quantum / 2.0 + 1e-15);
        }
        assert!(pgm.to_int_field().is_err());
    }

    #[test]
    fn pgm_rejects_bad_samples() {
        assert!(read_pgm(&mut "P2\n1 1\n3\n4\n".as_bytes()).is_err());
        assert!(read_pgm(&mut "P2\n2 1\n3\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn frame_csv_round_trip() {
        let a = IntField2D::from_fn(3, 2, |j, k| j as i64 - k as i64).unwrap();
        let b = IntField2D::filled(3, 2, 7).unwrap();
        let mut buf = Vec::new();
        write_frames_csv(&[&a, &b], 4, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,j,k,value\n4,0,0,0\n4,1,0,1\n"));
        let back = read_int_frames(buf.as_slice()).unwrap();
        assert_eq!(back, vec![(4, a), (5, b)]);
    }

    #[test]
    fn real_frame_csv_is_exact() {
        let a = RealField2D::from_fn(2, 2, |j, k| 1.0 / (1 + j + 3 * k) as f64).unwrap();
        let mut buf = Vec::new();
        write_frames_csv(&[&a], 0, &mut buf).unwrap();
        assert_eq!(read_real_frames(buf.as_slice()).unwrap(), vec![(0, a)]);
    }

    #[test]
    fn frame_csv_detects_gaps_and_repeats() {
        assert!(read_int_frames("n,j,k,value\n0,0,0,1\n0,1,1,1\n".as_bytes()).is_err());
        assert!(read_int_frames("n,j,k,value\n0,0,0,1\n0,0,0,1\n".as_bytes()).is_err());
        assert!(read_int_frames("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn ascii_rendering() {
        let f = IntField2D::new(3, 2, vec![1, 0, 0, 0, 1, 1]).unwrap();
        assert_eq!(ascii(&f), "#..\n.##\n");
    }
}
