//! Research areas, the venue → area map, and seed-set construction.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Paper;
use crate::error::{Error, Result};

/// The 26-area map shipped with the crate.
pub const DEFAULT_AREA_MAP: &str = include_str!("../../data/csrankings_areas.json");

/// One research area; `index` is its position in the label space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Area {
    pub id: String,
    pub name: String,
    pub index: usize,
}

/// Ordered set of research areas with contiguous 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AreaSet {
    areas: Vec<Area>,
    by_id: HashMap<String, usize>,
}

impl AreaSet {
    pub fn new<I, S, T>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut set = AreaSet::default();
        for (id, name) in items {
            let id = id.into();
            if id.trim().is_empty() {
                return Err(Error::InvalidAreaMap("area with empty id".into()));
            }
            let index = set.areas.len();
            if set.by_id.insert(id.clone(), index).is_some() {
                return Err(Error::InvalidAreaMap(format!("duplicate area id `{id}`")));
            }
            set.areas.push(Area { id, name: name.into(), index });
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Area> {
        self.areas.get(index)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Area> {
        self.areas.iter()
    }

    pub fn ids(&self) -> Vec<String> {
        self.areas.iter().map(|a| a.id.clone()).collect()
    }
}

impl std::ops::Index<usize> for AreaSet {
    type Output = Area;

    fn index(&self, index: usize) -> &Area {
        &self.areas[index]
    }
}

/// Lowercase, trim, and collapse internal whitespace runs to one space.
pub fn normalize_venue(venue: &str) -> String {
    venue.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize, Deserialize)]
struct AreaMapFile {
    areas: Vec<AreaMapEntry>,
}

#[derive(Serialize, Deserialize)]
struct AreaMapEntry {
    id: String,
    name: String,
    #[serde(default)]
    venues: Vec<String>,
}

/// Maps normalized venue names to exactly one research area.
#[derive(Debug, Clone)]
pub struct VenueMap {
    areas: AreaSet,
    venues: HashMap<String, usize>,
}

impl VenueMap {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: AreaMapFile = serde_json::from_str(text)?;
        let areas = AreaSet::new(file.areas.iter().map(|a| (a.id.clone(), a.name.clone())))?;
        let mut venues: HashMap<String, usize> = HashMap::new();
        for (index, entry) in file.areas.iter().enumerate() {
            for venue in &entry.venues {
                let key = normalize_venue(venue);
                if key.is_empty() {
                    continue;
                }
                match venues.get(&key) {
                    Some(&other) if other != index => {
                        return Err(Error::VenueConflict {
                            venue: venue.clone(),
                            first: areas[other].id.clone(),
                            second: entry.id.clone(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        venues.insert(key, index);
                    }
                }
            }
        }
        Ok(VenueMap { areas, venues })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// The shipped 26-area map.
    pub fn default_map() -> Self {
        Self::from_json(DEFAULT_AREA_MAP).expect("shipped area map is valid")
    }

    pub fn areas(&self) -> &AreaSet {
        &self.areas
    }

    pub fn venue_count(&self) -> usize {
        self.venues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.venues.is_empty()
    }

    pub fn lookup(&self, venue: &str) -> Option<usize> {
        self.venues.get(&normalize_venue(venue)).copied()
    }

    /// Serializes back to the area map file layout, venues sorted per area.
    pub fn to_json(&self) -> Result<String> {
        let mut entries: Vec<AreaMapEntry> = self
            .areas
            .iter()
            .map(|a| AreaMapEntry { id: a.id.clone(), name: a.name.clone(), venues: Vec::new() })
            .collect();
        for (venue, &index) in &self.venues {
            entries[index].venues.push(venue.clone());
        }
        for e in &mut entries {
            e.venues.sort();
        }
        Ok(serde_json::to_string_pretty(&AreaMapFile { areas: entries })?)
    }
}

/// Anything that can say which area a seed paper belongs to.
pub trait SeedLookup {
    fn seed_area(&self, paper_id: &str) -> Option<usize>;
}

/// Seed assignment: paper id → area index for every paper in a mapped venue.
#[derive(Debug, Clone)]
pub struct SeedSet {
    assignment: HashMap<String, usize>,
    /// Seed ids in corpus order.
    order: Vec<String>,
    counts: Vec<usize>,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn ids(&self) -> &[String] {
        &self.order
    }

    pub fn contains(&self, id: &str) -> bool {
        self.assignment.contains_key(id)
    }

    /// Areas that received no seed papers.
    pub fn empty_areas(&self) -> Vec<usize> {
        self.counts.iter().enumerate().filter(|(_, &c)| c == 0).map(|(i, _)| i).collect()
    }
}

impl SeedLookup for SeedSet {
    fn seed_area(&self, paper_id: &str) -> Option<usize> {
        self.assignment.get(paper_id).copied()
    }
}

impl SeedLookup for HashMap<String, usize> {
    fn seed_area(&self, paper_id: &str) -> Option<usize> {
        self.get(paper_id).copied()
    }
}

/// Assigns every paper whose normalized venue is mapped to that venue's area.
pub fn build_seed_set(papers: &[Paper], venue_map: &VenueMap) -> Result<SeedSet> {
    if venue_map.is_empty() {
        return Err(Error::EmptyVenueMap);
    }
    let mut assignment = HashMap::new();
    let mut order = Vec::new();
    let mut counts = vec![0; venue_map.areas().len()];
    for paper in papers {
        if let Some(area) = venue_map.lookup(&paper.venue) {
            if assignment.insert(paper.id.clone(), area).is_none() {
                order.push(paper.id.clone());
                counts[area] += 1;
            }
        }
    }
    let seeds = SeedSet { assignment, order, counts };
    // an entirely empty seed set is reported once, by the index builder
    for area in seeds.empty_areas().into_iter().filter(|_| !seeds.is_empty()) {
        log::warn!("area `{}` has no seed papers", venue_map.areas()[area].id);
    }
    Ok(seeds)
}

/// Reads a `paper_id<TAB>area_id` label file. Blank lines and `#` comments
/// are skipped.
pub fn read_labels<R: BufRead>(reader: R, areas: &AreaSet) -> Result<Vec<(String, usize)>> {
    let mut labels = Vec::new();
    let mut seen = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (Some(id), Some(area), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Label { line: line_no, message: "expected `paper_id<TAB>area_id`".into() });
        };
        let (id, area) = (id.trim(), area.trim());
        let index = areas
            .index_of(area)
            .ok_or_else(|| Error::Label { line: line_no, message: format!("unknown area `{area}`") })?;
        if seen.insert(id.to_string(), index).is_some() {
            return Err(Error::Label { line: line_no, message: format!("duplicate label for `{id}`") });
        }
        labels.push((id.to_string(), index));
    }
    Ok(labels)
}

pub fn read_labels_file(path: impl AsRef<Path>, areas: &AreaSet) -> Result<Vec<(String, usize)>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    read_labels(std::io::BufReader::new(file), areas)
}

pub fn write_labels<W: Write>(labels: &[(String, usize)], areas: &AreaSet, mut out: W) -> Result<()> {
    for (id, area) in labels {
        writeln!(out, "{}\t{}", id, areas[*area].id)?;
    }
    out.flush()?;
    Ok(())
}
