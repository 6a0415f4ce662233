#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn dogss() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dogss"))
}

pub fn run(args: &[&str]) -> Output {
    dogss().args(args).output().expect("spawn dogss")
}

pub fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "dogss {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[derive(Default)]
pub struct Obj {
    text: String,
    vertices: usize,
}

impl Obj {
    pub fn quad(&mut self, class: &str, c: [[f64; 3]; 4]) -> &mut Self {
        writeln!(self.text, "g {class}").unwrap();
        for v in c {
            writeln!(self.text, "v {} {} {}", v[0], v[1], v[2]).unwrap();
        }
        let b = self.vertices;
        writeln!(self.text, "f {} {} {}", b + 1, b + 2, b + 3).unwrap();
        writeln!(self.text, "f {} {} {}", b + 1, b + 3, b + 4).unwrap();
        self.vertices += 4;
        self
    }

    pub fn cuboid(&mut self, class: &str, lo: [f64; 3], hi: [f64; 3]) -> &mut Self {
        let [x0, y0, z0] = lo;
        let [x1, y1, z1] = hi;
        self.quad(
            class,
            [[x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0]],
        )
        .quad(
            class,
            [[x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1]],
        )
        .quad(
            class,
            [[x0, y0, z0], [x1, y0, z0], [x1, y0, z1], [x0, y0, z1]],
        )
        .quad(
            class,
            [[x0, y1, z0], [x1, y1, z0], [x1, y1, z1], [x0, y1, z1]],
        )
        .quad(
            class,
            [[x0, y0, z0], [x0, y1, z0], [x0, y1, z1], [x0, y0, z1]],
        )
        .quad(
            class,
            [[x1, y0, z0], [x1, y1, z0], [x1, y1, z1], [x1, y0, z1]],
        )
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// 10 x 10 x 4 m room centred on the origin with a door and a window.
pub fn room() -> Obj {
    let mut o = Obj::default();
    let (h, t) = (5.0, 4.0);
    o.quad(
        "GroundSurface",
        [[-h, -h, 0.0], [h, -h, 0.0], [h, h, 0.0], [-h, h, 0.0]],
    )
    .quad(
        "RoofSurface",
        [[-h, -h, t], [h, -h, t], [h, h, t], [-h, h, t]],
    )
    .quad(
        "WallSurface_n",
        [[-h, h, 0.0], [h, h, 0.0], [h, h, t], [-h, h, t]],
    )
    .quad(
        "WallSurface_s",
        [[-h, -h, 0.0], [h, -h, 0.0], [h, -h, t], [-h, -h, t]],
    )
    .quad(
        "WallSurface_e",
        [[h, -h, 0.0], [h, h, 0.0], [h, h, t], [h, -h, t]],
    )
    .quad(
        "WallSurface_w",
        [[-h, -h, 0.0], [-h, h, 0.0], [-h, h, t], [-h, -h, t]],
    )
    .quad(
        "Door",
        [
            [-4.98, -1.0, 0.0],
            [-4.98, 1.0, 0.0],
            [-4.98, 1.0, 2.2],
            [-4.98, -1.0, 2.2],
        ],
    )
    .quad(
        "Window",
        [
            [-1.5, 4.98, 1.0],
            [1.5, 4.98, 1.0],
            [1.5, 4.98, 2.5],
            [-1.5, 4.98, 2.5],
        ],
    );
    o
}

/// A street canyon: road, pavements, two facades with doors, windows and
/// balconies, benches and a tree trunk.
pub fn street() -> Obj {
    let mut o = Obj::default();
    let (x0, x1) = (-40.0, 40.0);
    o.quad(
        "RoadSurface",
        [
            [x0, -4.0, 0.0],
            [x1, -4.0, 0.0],
            [x1, 4.0, 0.0],
            [x0, 4.0, 0.0],
        ],
    );
    for s in [-1.0, 1.0] {
        o.quad(
            "GroundSurface",
            [
                [x0, 4.0 * s, 0.0],
                [x1, 4.0 * s, 0.0],
                [x1, 8.0 * s, 0.15],
                [x0, 8.0 * s, 0.15],
            ],
        );
        o.quad(
            "WallSurface",
            [
                [x0, 8.0 * s, 0.0],
                [x1, 8.0 * s, 0.0],
                [x1, 8.0 * s, 15.0],
                [x0, 8.0 * s, 15.0],
            ],
        );
        let y = 7.98 * s;
        for k in 0..8 {
            let x = -35.0 + 10.0 * k as f64;
            o.quad(
                "Door",
                [
                    [x, y, 0.15],
                    [x + 1.2, y, 0.15],
                    [x + 1.2, y, 2.4],
                    [x, y, 2.4],
                ],
            );
            for z in [4.0, 8.0] {
                o.quad(
                    "Window",
                    [
                        [x + 3.0, y, z],
                        [x + 5.0, y, z],
                        [x + 5.0, y, z + 1.6],
                        [x + 3.0, y, z + 1.6],
                    ],
                );
            }
            let (ya, yb) = if s > 0.0 { (6.8, 7.98) } else { (-7.98, -6.8) };
            o.cuboid(
                "BuildingInstallation",
                [x + 6.0, ya, 3.0],
                [x + 8.5, yb, 3.3],
            );
            o.cuboid(
                "CityFurniture",
                [x + 2.0, 6.0 * s - 0.25, 0.15],
                [x + 3.8, 6.0 * s + 0.25, 0.6],
            );
        }
        o.cuboid(
            "SolitaryVegetationObject",
            [-0.2, 5.0 * s - 0.2, 0.15],
            [0.2, 5.0 * s + 0.2, 4.0],
        );
    }
    o
}

pub fn trajectory_json(from: [f64; 3], to: [f64; 3], duration: f64) -> String {
    format!(
        r#"[{{"t": 0.0, "x": {}, "y": {}, "z": {}, "yaw": 0.0}}, {{"t": {duration}, "x": {}, "y": {}, "z": {}, "yaw": 0.0}}]"#,
        from[0], from[1], from[2], to[0], to[1], to[2]
    )
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not a JSON line ({e}): {text}"))
}
