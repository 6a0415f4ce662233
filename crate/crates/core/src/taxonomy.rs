//! The twelve-class road-space taxonomy, its mapping from OpenDRIVE 1.4 and
//! CityGML 2.0 descriptors, and per-class weighting.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Semantic class of a point or mesh triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum SemanticClass {
    RoadSurface = 1,
    GroundSurface = 2,
    CityFurniture = 3,
    Vehicle = 4,
    Pedestrian = 5,
    WallSurface = 6,
    RoofSurface = 7,
    Door = 8,
    Window = 9,
    BuildingInstallation = 10,
    SolitaryVegetationObject = 11,
    Noise = 12,
}

impl SemanticClass {
    pub const ALL: [SemanticClass; 12] = [
        SemanticClass::RoadSurface,
        SemanticClass::GroundSurface,
        SemanticClass::CityFurniture,
        SemanticClass::Vehicle,
        SemanticClass::Pedestrian,
        SemanticClass::WallSurface,
        SemanticClass::RoofSurface,
        SemanticClass::Door,
        SemanticClass::Window,
        SemanticClass::BuildingInstallation,
        SemanticClass::SolitaryVegetationObject,
        SemanticClass::Noise,
    ];

    #[inline]
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1..=12 => Some(Self::ALL[id as usize - 1]),
            _ => None,
        }
    }

    /// Maps any integer label onto a class; out-of-range labels become
    /// [`SemanticClass::Noise`]. The flag is true when coercion happened.
    pub fn from_label(label: i64) -> (Self, bool) {
        match u8::try_from(label).ok().and_then(Self::from_id) {
            Some(c) => (c, false),
            None => (SemanticClass::Noise, true),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SemanticClass::RoadSurface => "RoadSurface",
            SemanticClass::GroundSurface => "GroundSurface",
            SemanticClass::CityFurniture => "CityFurniture",
            SemanticClass::Vehicle => "Vehicle",
            SemanticClass::Pedestrian => "Pedestrian",
            SemanticClass::WallSurface => "WallSurface",
            SemanticClass::RoofSurface => "RoofSurface",
            SemanticClass::Door => "Door",
            SemanticClass::Window => "Window",
            SemanticClass::BuildingInstallation => "BuildingInstallation",
            SemanticClass::SolitaryVegetationObject => "SolitaryVegetationObject",
            SemanticClass::Noise => "Noise",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemanticClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Some(c) = Self::from_name(s) {
            return Ok(c);
        }
        s.parse::<u8>()
            .ok()
            .and_then(Self::from_id)
            .ok_or_else(|| Error::config("class", format!("unknown class `{s}`")))
    }
}

/// Source modeling standard of a descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Standard {
    #[serde(rename = "OpenDRIVE-1.4", alias = "OpenDRIVE")]
    OpenDrive14,
    #[serde(rename = "CityGML-2.0", alias = "CityGML")]
    CityGml20,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub standard: Standard,
    pub descriptor: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
    pub target_id: u8,
}

/// Descriptor-to-class correspondence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMapping {
    entries: Vec<(MappingEntry, SemanticClass)>,
}

fn norm(s: &str) -> String {
    s.trim().to_ascii_lowercase()
}

impl ClassMapping {
    pub fn new(entries: Vec<MappingEntry>) -> Result<Self> {
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                let class = SemanticClass::from_id(e.target_id).ok_or_else(|| {
                    Error::config(
                        format!("[{i}].target_id"),
                        format!("{} is not a class id", e.target_id),
                    )
                })?;
                Ok((e, class))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    /// The built-in OpenDRIVE 1.4 / CityGML 2.0 table.
    ///
    /// CityGML `AuxiliaryTrafficArea` is shared by road and ground rows; the
    /// rows carry the qualifiers of their OpenDRIVE counterpart so each can be
    /// told apart, and the unqualified descriptor resolves to the first row.
    pub fn builtin() -> Self {
        use SemanticClass::*;
        use Standard::*;
        let rows: &[(Standard, &str, &[(&str, &str)], SemanticClass)] = &[
            (
                OpenDrive14,
                "LaneSectionLRLane",
                &[("type", "driving")],
                RoadSurface,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "barrier"), ("name", "raisedMedian")],
                RoadSurface,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "barrier"), ("name", "trafficIsland")],
                RoadSurface,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "roadMark")],
                RoadSurface,
            ),
            (CityGml20, "TrafficArea", &[("function", "1")], RoadSurface),
            (CityGml20, "AuxiliaryTrafficArea", &[], RoadSurface),
            (
                CityGml20,
                "AuxiliaryTrafficArea",
                &[("name", "raisedMedian")],
                RoadSurface,
            ),
            (
                CityGml20,
                "AuxiliaryTrafficArea",
                &[("name", "trafficIsland")],
                RoadSurface,
            ),
            (
                CityGml20,
                "AuxiliaryTrafficArea",
                &[("type", "roadMark")],
                RoadSurface,
            ),
            (
                OpenDrive14,
                "LaneSectionLRLane",
                &[("type", "sidewalk")],
                GroundSurface,
            ),
            (
                OpenDrive14,
                "LaneSectionLRLane",
                &[("type", "border")],
                GroundSurface,
            ),
            (
                OpenDrive14,
                "LaneSectionLRLane",
                &[("type", "none"), ("material", "grass")],
                GroundSurface,
            ),
            (
                CityGml20,
                "TrafficArea",
                &[("function", "2")],
                GroundSurface,
            ),
            (
                CityGml20,
                "AuxiliaryTrafficArea",
                &[("type", "border")],
                GroundSurface,
            ),
            (
                CityGml20,
                "AuxiliaryTrafficArea",
                &[("type", "none"), ("material", "grass")],
                GroundSurface,
            ),
            (CityGml20, "OuterFloorSurface", &[], GroundSurface),
            (
                OpenDrive14,
                "Signal",
                &[("name", "trafficLight")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "Signal",
                &[("name", "trafficSign")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "pole"), ("name", "streetLamp")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "pole"), ("name", "trafficLight")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "pole"), ("name", "trafficSign")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "barrier"), ("name", "fence")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "obstacle"), ("name", "controllerBox")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "obstacle"), ("name", "bench")],
                CityFurniture,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "barrier"), ("name", "wall")],
                CityFurniture,
            ),
            (CityGml20, "CityFurniture", &[], CityFurniture),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "building"), ("orientation", "side")],
                WallSurface,
            ),
            (CityGml20, "WallSurface", &[], WallSurface),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "building"), ("orientation", "top")],
                RoofSurface,
            ),
            (CityGml20, "RoofSurface", &[], RoofSurface),
            (CityGml20, "Door", &[], Door),
            (CityGml20, "Window", &[], Window),
            (CityGml20, "BuildingInstallation", &[], BuildingInstallation),
            (CityGml20, "OuterCeilingSurface", &[], BuildingInstallation),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "tree")],
                SolitaryVegetationObject,
            ),
            (
                OpenDrive14,
                "RoadObject",
                &[("type", "vegetation")],
                SolitaryVegetationObject,
            ),
            (
                CityGml20,
                "SolitaryVegetationObject",
                &[],
                SolitaryVegetationObject,
            ),
        ];
        let entries = rows
            .iter()
            .map(|&(standard, descriptor, attrs, class)| {
                (
                    MappingEntry {
                        standard,
                        descriptor: descriptor.to_string(),
                        attributes: attrs
                            .iter()
                            .map(|&(k, v)| (k.to_string(), v.to_string()))
                            .collect(),
                        target_id: class.id(),
                    },
                    class,
                )
            })
            .collect();
        Self { entries }
    }

    /// Loads a JSON override: either a bare array of entries or
    /// `{"entries": [...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            Bare(Vec<MappingEntry>),
            Wrapped { entries: Vec<MappingEntry> },
        }
        let de = &mut serde_json::Deserializer::from_str(s);
        let doc: Doc = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))?;
        match doc {
            Doc::Bare(v) | Doc::Wrapped { entries: v } => Self::new(v),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&s)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MappingEntry, SemanticClass)> {
        self.entries.iter().map(|(e, c)| (e, *c))
    }

    /// Resolves a descriptor. Among rows whose qualifiers are all satisfied,
    /// the one with the most qualifiers wins; ties go to the earlier row.
    /// No match yields [`SemanticClass::Noise`].
    pub fn map_class(
        &self,
        standard: Standard,
        descriptor: &str,
        attributes: &BTreeMap<String, String>,
    ) -> SemanticClass {
        let descriptor = norm(descriptor);
        let attrs: BTreeMap<String, String> =
            attributes.iter().map(|(k, v)| (norm(k), norm(v))).collect();
        let mut best: Option<(usize, SemanticClass)> = None;
        for (entry, class) in &self.entries {
            if entry.standard != standard || norm(&entry.descriptor) != descriptor {
                continue;
            }
            let satisfied = entry
                .attributes
                .iter()
                .all(|(k, v)| attrs.get(&norm(k)).is_some_and(|got| *got == norm(v)));
            if !satisfied {
                continue;
            }
            let specificity = entry.attributes.len();
            if best.is_none_or(|(s, _)| specificity > s) {
                best = Some((specificity, *class));
            }
        }
        best.map_or(SemanticClass::Noise, |(_, c)| c)
    }
}

impl Default for ClassMapping {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Convenience wrapper over the built-in table.
pub fn map_class(
    standard: Standard,
    descriptor: &str,
    attributes: &BTreeMap<String, String>,
) -> SemanticClass {
    ClassMapping::builtin().map_class(standard, descriptor, attributes)
}

/// Per-class weights summing to one. Absent classes weigh zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ClassWeights {
    weights: BTreeMap<SemanticClass, f64>,
}

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

impl ClassWeights {
    pub fn new(weights: BTreeMap<SemanticClass, f64>) -> Result<Self> {
        for (c, w) in &weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::config(
                    format!("class_weights.{c}"),
                    format!("weight must be a non-negative number, got {w}"),
                ));
            }
        }
        let sum: f64 = weights.values().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::config(
                "class_weights",
                format!("weights must sum to 1, got {sum}"),
            ));
        }
        Ok(Self { weights })
    }

    #[inline]
    pub fn get(&self, c: SemanticClass) -> f64 {
        self.weights.get(&c).copied().unwrap_or(0.0)
    }

    /// Classes with positive weight, in id order.
    pub fn weighted_classes(&self) -> impl Iterator<Item = (SemanticClass, f64)> + '_ {
        self.weights
            .iter()
            .filter(|(_, w)| **w > 0.0)
            .map(|(c, w)| (*c, *w))
    }

    pub fn as_map(&self) -> &BTreeMap<SemanticClass, f64> {
        &self.weights
    }
}

impl<'de> Deserialize<'de> for ClassWeights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        let mut weights = BTreeMap::new();
        for (k, w) in raw {
            let c: SemanticClass = k.parse().map_err(serde::de::Error::custom)?;
            weights.insert(c, w);
        }
        ClassWeights::new(weights).map_err(serde::de::Error::custom)
    }
}

impl Default for ClassWeights {
    fn default() -> Self {
        default_weights()
    }
}

/// Building-oriented weights over the static, well-represented classes.
pub fn default_weights() -> ClassWeights {
    use SemanticClass::*;
    let weights = [
        (CityFurniture, 0.1),
        (GroundSurface, 0.1),
        (WallSurface, 0.2),
        (RoofSurface, 0.15),
        (Door, 0.15),
        (Window, 0.15),
        (BuildingInstallation, 0.15),
    ]
    .into_iter()
    .collect();
    ClassWeights { weights }
}
