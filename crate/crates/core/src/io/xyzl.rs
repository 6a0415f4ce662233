//! Whitespace-separated `x y z class_id` text, optionally followed by the
//! ray origin `ox oy oz`. `#` starts a comment; blank lines are skipped.

use std::io::Write;

use crate::cloud::{LabeledPoint, LabeledPointCloud};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::io::{coerce_label, ScanCloud};
use crate::scalar::Scalar;

const NOTE_PREFIX: &str = "# frame_note:";

pub(crate) fn parse<T: Scalar>(text: &str, source: &str) -> Result<ScanCloud<T>> {
    let mut points = Vec::new();
    let mut origins: Vec<Vec3<T>> = Vec::new();
    let mut columns: Option<usize> = None;
    let mut frame_note = String::new();

    for (ln, raw) in text.lines().enumerate() {
        let loc = || format!("{source}:{}", ln + 1);
        if let Some(note) = raw.strip_prefix(NOTE_PREFIX) {
            frame_note = note.trim().to_string();
            continue;
        }
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 4 && tok.len() != 7 {
            return Err(Error::parse(
                loc(),
                format!("expected 4 or 7 columns, found {}", tok.len()),
            ));
        }
        match columns {
            None => columns = Some(tok.len()),
            Some(c) if c != tok.len() => {
                return Err(Error::parse(
                    loc(),
                    format!("column count changed from {c} to {}", tok.len()),
                ))
            }
            _ => {}
        }
        let coord = |s: &str| -> Result<T> {
            let v: T = s
                .parse()
                .map_err(|_| Error::parse(loc(), format!("invalid coordinate `{s}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::parse(loc(), format!("non-finite coordinate `{s}`")))
            }
        };
        let label: i64 = tok[3]
            .parse()
            .map_err(|_| Error::parse(loc(), format!("invalid class id `{}`", tok[3])))?;
        points.push(LabeledPoint {
            pos: Vec3::new(coord(tok[0])?, coord(tok[1])?, coord(tok[2])?),
            class: coerce_label(label, &loc),
        });
        if tok.len() == 7 {
            origins.push(Vec3::new(coord(tok[4])?, coord(tok[5])?, coord(tok[6])?));
        }
    }
    let origins = (columns == Some(7)).then_some(origins);
    Ok(ScanCloud {
        cloud: LabeledPointCloud { points, frame_note },
        origins,
    })
}

pub(crate) fn write<T: Scalar, W: Write>(
    w: &mut W,
    cloud: &LabeledPointCloud<T>,
    origins: Option<&[Vec3<T>]>,
) -> std::io::Result<()> {
    if !cloud.frame_note.is_empty() {
        writeln!(w, "{NOTE_PREFIX} {}", one_line(&cloud.frame_note))?;
    }
    for (i, p) in cloud.points.iter().enumerate() {
        write!(w, "{} {} {} {}", p.pos.x, p.pos.y, p.pos.z, p.class.id())?;
        if let Some(o) = origins {
            write!(w, " {} {} {}", o[i].x, o[i].y, o[i].z)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub(crate) fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}
