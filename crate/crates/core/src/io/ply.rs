//! PLY point clouds, ascii and binary.
//!
//! Reading accepts any scalar property types and skips unrelated elements.
//! Writing always declares `x`, `y`, `z` (and optional `origin_x/y/z`) as
//! `double` and the label as `uchar class_id`.

use std::io::Write;

use crate::cloud::{LabeledPoint, LabeledPointCloud};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::io::{coerce_label, CloudFileFormat, ScanCloud};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
    BinaryBe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Ty {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => Ty::I8,
            "uchar" | "uint8" => Ty::U8,
            "short" | "int16" => Ty::I16,
            "ushort" | "uint16" => Ty::U16,
            "int" | "int32" => Ty::I32,
            "uint" | "uint32" => Ty::U32,
            "float" | "float32" => Ty::F32,
            "double" | "float64" => Ty::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Ty::I8 | Ty::U8 => 1,
            Ty::I16 | Ty::U16 => 2,
            Ty::I32 | Ty::U32 | Ty::F32 => 4,
            Ty::F64 => 8,
        }
    }
}

#[derive(Clone, Debug)]
enum Prop {
    Scalar { name: String, ty: Ty },
    List { count: Ty, item: Ty },
}

#[derive(Clone, Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Prop>,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    frame_note: String,
    body_offset: usize,
}

/// Value read from the body. Floats keep their native width so `f32` clouds
/// survive a round trip bit-exactly.
#[derive(Clone, Copy, Debug)]
enum Val {
    Int(i64),
    F32(f32),
    F64(f64),
}

impl Val {
    fn as_f64(self) -> f64 {
        match self {
            Val::Int(i) => i as f64,
            Val::F32(f) => f as f64,
            Val::F64(f) => f,
        }
    }
}

pub(crate) fn detect(bytes: &[u8]) -> Option<CloudFileFormat> {
    if !(bytes.starts_with(b"ply\n") || bytes.starts_with(b"ply\r\n")) {
        return None;
    }
    let head = &bytes[..bytes.len().min(4096)];
    let text = String::from_utf8_lossy(head);
    text.lines()
        .find_map(|l| match l.trim().strip_prefix("format ") {
            Some(f) if f.starts_with("ascii") => Some(CloudFileFormat::PlyAscii),
            Some(_) => Some(CloudFileFormat::PlyBinaryLe),
            None => None,
        })
}

fn parse_header(bytes: &[u8], source: &str) -> Result<Header> {
    let mut pos = 0usize;
    let mut line_no = 0usize;
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut frame_note = String::new();

    loop {
        let rest = &bytes[pos..];
        let nl = rest.iter().position(|&b| b == b'\n').ok_or_else(|| {
            Error::parse(format!("{source}: byte {pos}"), "unterminated PLY header")
        })?;
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| Error::parse(format!("{source}: byte {pos}"), "non-UTF-8 header line"))?
            .trim_end_matches('\r');
        pos += nl + 1;
        line_no += 1;
        let loc = || format!("{source}:{line_no}");
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.first().copied() {
            _ if line_no == 1 => {
                if line.trim() != "ply" {
                    return Err(Error::Format(format!("{source}: missing `ply` magic")));
                }
            }
            Some("format") => {
                encoding = Some(match tok.get(1).copied() {
                    Some("ascii") => Encoding::Ascii,
                    Some("binary_little_endian") => Encoding::BinaryLe,
                    Some("binary_big_endian") => Encoding::BinaryBe,
                    other => {
                        return Err(Error::Format(format!(
                            "{}: unsupported PLY format {other:?}",
                            loc()
                        )))
                    }
                });
            }
            Some("comment") => {
                if let Some(note) = line.trim_start().strip_prefix("comment frame_note") {
                    frame_note = note.trim().to_string();
                }
            }
            Some("obj_info") | None => {}
            Some("element") => {
                if tok.len() != 3 {
                    return Err(Error::parse(loc(), "malformed element line"));
                }
                let count = tok[2]
                    .parse()
                    .map_err(|_| Error::parse(loc(), "invalid element count"))?;
                elements.push(Element {
                    name: tok[1].to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| Error::parse(loc(), "property before element"))?;
                let bad = || Error::parse(loc(), format!("malformed property `{line}`"));
                let prop = if tok.get(1) == Some(&"list") {
                    if tok.len() != 5 {
                        return Err(bad());
                    }
                    Prop::List {
                        count: Ty::parse(tok[2]).ok_or_else(bad)?,
                        item: Ty::parse(tok[3]).ok_or_else(bad)?,
                    }
                } else {
                    if tok.len() != 3 {
                        return Err(bad());
                    }
                    Prop::Scalar {
                        name: tok[2].to_string(),
                        ty: Ty::parse(tok[1]).ok_or_else(bad)?,
                    }
                };
                el.props.push(prop);
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(Error::parse(
                    loc(),
                    format!("unknown header keyword `{other}`"),
                ))
            }
        }
    }
    let encoding = encoding
        .ok_or_else(|| Error::Format(format!("{source}: PLY header lacks a format line")))?;
    Ok(Header {
        encoding,
        elements,
        frame_note,
        body_offset: pos,
    })
}

struct Columns {
    x: usize,
    y: usize,
    z: usize,
    label: Option<usize>,
    origin: Option<[usize; 3]>,
}

fn vertex_columns(el: &Element, source: &str) -> Result<Columns> {
    let find = |n: &str| {
        el.props
            .iter()
            .position(|p| matches!(p, Prop::Scalar { name, .. } if name == n))
    };
    let need = |n: &str| {
        find(n).ok_or_else(|| Error::Format(format!("{source}: vertex element lacks `{n}`")))
    };
    let origin = match (find("origin_x"), find("origin_y"), find("origin_z")) {
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        _ => None,
    };
    Ok(Columns {
        x: need("x")?,
        y: need("y")?,
        z: need("z")?,
        label: find("class_id").or_else(|| find("scalar_Classification")),
        origin,
    })
}

struct Binary<'a> {
    bytes: &'a [u8],
    pos: usize,
    big_endian: bool,
    source: &'a str,
}

impl Binary<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self
            .pos
            .checked_add(N)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::parse(
                    format!("{}: byte {}", self.source, self.pos),
                    "unexpected end of PLY body",
                )
            })?;
        let mut a = [0u8; N];
        a.copy_from_slice(&self.bytes[self.pos..end]);
        if self.big_endian {
            a.reverse();
        }
        self.pos = end;
        Ok(a)
    }

    fn read(&mut self, ty: Ty) -> Result<Val> {
        Ok(match ty {
            Ty::I8 => Val::Int(i8::from_le_bytes(self.take()?) as i64),
            Ty::U8 => Val::Int(u8::from_le_bytes(self.take()?) as i64),
            Ty::I16 => Val::Int(i16::from_le_bytes(self.take()?) as i64),
            Ty::U16 => Val::Int(u16::from_le_bytes(self.take()?) as i64),
            Ty::I32 => Val::Int(i32::from_le_bytes(self.take()?) as i64),
            Ty::U32 => Val::Int(u32::from_le_bytes(self.take()?) as i64),
            Ty::F32 => Val::F32(f32::from_le_bytes(self.take()?)),
            Ty::F64 => Val::F64(f64::from_le_bytes(self.take()?)),
        })
    }

    fn skip_list(&mut self, count: Ty, item: Ty) -> Result<()> {
        let n = match self.read(count)? {
            Val::Int(n) if n >= 0 => n as usize,
            _ => {
                return Err(Error::parse(
                    format!("{}: byte {}", self.source, self.pos),
                    "invalid list length",
                ))
            }
        };
        let len = n.saturating_mul(item.size());
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::parse(
                    format!("{}: byte {}", self.source, self.pos),
                    "list runs past end of PLY body",
                )
            })?;
        self.pos = end;
        Ok(())
    }
}

fn to_scalar<T: Scalar>(v: Val) -> T {
    match v {
        Val::F32(f) if std::mem::size_of::<T>() == 4 => T::from_f32(f).unwrap_or_else(T::nan),
        other => T::from_f64_lossy(other.as_f64()),
    }
}

fn label_of(v: Val) -> i64 {
    let f = v.as_f64();
    if f.fract() == 0.0 && f.abs() < 1e15 {
        f as i64
    } else {
        -1
    }
}

fn finite<T: Scalar>(v: T, loc: impl Fn() -> String) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::parse(loc(), "non-finite coordinate"))
    }
}

pub(crate) fn parse<T: Scalar>(bytes: &[u8], source: &str) -> Result<ScanCloud<T>> {
    let header = parse_header(bytes, source)?;
    let body = &bytes[header.body_offset..];
    let vi = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| Error::Format(format!("{source}: no vertex element")))?;
    let cols = vertex_columns(&header.elements[vi], source)?;

    let mut points = Vec::new();
    let mut origins = Vec::new();

    match header.encoding {
        Encoding::Ascii => {
            let text = std::str::from_utf8(body)
                .map_err(|_| Error::parse(source, "non-UTF-8 ascii PLY body"))?;
            let mut lines = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty());
            let header_lines = bytes[..header.body_offset]
                .iter()
                .filter(|&&b| b == b'\n')
                .count();
            for (ei, el) in header.elements.iter().enumerate() {
                for _ in 0..el.count {
                    let (ln, line) = lines.next().ok_or_else(|| {
                        Error::parse(
                            source,
                            format!("element `{}` has fewer records than declared", el.name),
                        )
                    })?;
                    if ei != vi {
                        continue;
                    }
                    let loc = || format!("{source}:{}", header_lines + ln + 1);
                    let tok: Vec<&str> = line.split_whitespace().collect();
                    if tok.len() != el.props.len()
                        || el.props.iter().any(|p| matches!(p, Prop::List { .. }))
                    {
                        return Err(Error::parse(
                            loc(),
                            format!("expected {} values, found {}", el.props.len(), tok.len()),
                        ));
                    }
                    let coord = |i: usize| -> Result<T> {
                        let v: T = tok[i].parse().map_err(|_| {
                            Error::parse(loc(), format!("invalid number `{}`", tok[i]))
                        })?;
                        finite(v, loc)
                    };
                    let label = match cols.label {
                        Some(i) => {
                            let v: f64 = tok[i].parse().map_err(|_| {
                                Error::parse(loc(), format!("invalid label `{}`", tok[i]))
                            })?;
                            label_of(Val::F64(v))
                        }
                        None => 12,
                    };
                    points.push(LabeledPoint {
                        pos: Vec3::new(coord(cols.x)?, coord(cols.y)?, coord(cols.z)?),
                        class: coerce_label(label, &loc),
                    });
                    if let Some([a, b, c]) = cols.origin {
                        origins.push(Vec3::new(coord(a)?, coord(b)?, coord(c)?));
                    }
                }
            }
        }
        Encoding::BinaryLe | Encoding::BinaryBe => {
            let mut r = Binary {
                bytes: body,
                pos: 0,
                big_endian: header.encoding == Encoding::BinaryBe,
                source,
            };
            let mut row: Vec<Val> = Vec::new();
            for (ei, el) in header.elements.iter().enumerate() {
                if ei == vi {
                    let rec: usize = el
                        .props
                        .iter()
                        .map(|p| {
                            if let Prop::Scalar { ty, .. } = p {
                                ty.size()
                            } else {
                                1
                            }
                        })
                        .sum();
                    let cap = el.count.min(body.len() / rec.max(1));
                    points.reserve(cap);
                }
                for _ in 0..el.count {
                    let start = r.pos + header.body_offset;
                    row.clear();
                    for p in &el.props {
                        match *p {
                            Prop::Scalar { ty, .. } => row.push(r.read(ty)?),
                            Prop::List { count, item } => {
                                if ei == vi {
                                    return Err(Error::Format(format!(
                                        "{source}: list property in vertex element"
                                    )));
                                }
                                r.skip_list(count, item)?;
                            }
                        }
                    }
                    if ei != vi {
                        continue;
                    }
                    let loc = || format!("{source}: byte {start}");
                    let c = |i: usize| finite(to_scalar::<T>(row[i]), loc);
                    let label = cols.label.map_or(12, |i| label_of(row[i]));
                    points.push(LabeledPoint {
                        pos: Vec3::new(c(cols.x)?, c(cols.y)?, c(cols.z)?),
                        class: coerce_label(label, &loc),
                    });
                    if let Some([a, b, cc]) = cols.origin {
                        origins.push(Vec3::new(c(a)?, c(b)?, c(cc)?));
                    }
                }
            }
        }
    }
    let origins = cols.origin.is_some().then_some(origins);
    Ok(ScanCloud {
        cloud: LabeledPointCloud {
            points,
            frame_note: header.frame_note,
        },
        origins,
    })
}

pub(crate) fn write<T: Scalar, W: Write>(
    w: &mut W,
    cloud: &LabeledPointCloud<T>,
    origins: Option<&[Vec3<T>]>,
    binary: bool,
) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(
        w,
        "format {} 1.0",
        if binary {
            "binary_little_endian"
        } else {
            "ascii"
        }
    )?;
    if !cloud.frame_note.is_empty() {
        writeln!(
            w,
            "comment frame_note {}",
            super::xyzl::one_line(&cloud.frame_note)
        )?;
    }
    writeln!(w, "element vertex {}", cloud.len())?;
    for n in ["x", "y", "z"] {
        writeln!(w, "property double {n}")?;
    }
    writeln!(w, "property uchar class_id")?;
    if origins.is_some() {
        for n in ["origin_x", "origin_y", "origin_z"] {
            writeln!(w, "property double {n}")?;
        }
    }
    writeln!(w, "end_header")?;
    for (i, p) in cloud.points.iter().enumerate() {
        let origin = origins.map(|o| o[i]);
        if binary {
            for v in p.pos.to_f64() {
                w.write_all(&v.to_le_bytes())?;
            }
            w.write_all(&[p.class.id()])?;
            if let Some(o) = origin {
                for v in o.to_f64() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        } else {
            write!(w, "{} {} {} {}", p.pos.x, p.pos.y, p.pos.z, p.class.id())?;
            if let Some(o) = origin {
                write!(w, " {} {} {}", o.x, o.y, o.z)?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}
