//! Geo-referencing: ccTLD lookup for web documents, nearest-city search
//! for geo-tagged posts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// Mean Earth radius in km (IUGG).
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Default search radius around a city.
pub const DEFAULT_CITY_RADIUS_KM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub name: String,
    /// ISO 3166 alpha-2 code.
    pub country: String,
    pub lat: f64,
    pub lon: f64,
}

/// Great-circle distance in km between two (lat, lon) points in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let dlat = (lat2 - lat1).to_radians();
    let dlon = (lon2 - lon1).to_radians();
    let a = (dlat / 2.0).sin().powi(2)
        + lat1.to_radians().cos() * lat2.to_radians().cos() * (dlon / 2.0).sin().powi(2);
    2.0 * a.sqrt().min(1.0).asin() * EARTH_RADIUS_KM
}

/// City gazetteer for nearest-city geo-referencing.
///
/// Cities are held sorted lexicographically by (name, country); distance
/// ties resolve to the smallest index in that order.
#[derive(Debug, Clone)]
pub struct CityIndex {
    cities: Vec<City>,
}

impl CityIndex {
    pub fn new(mut cities: Vec<City>) -> Self {
        for c in &mut cities {
            c.country = c.country.to_uppercase();
        }
        cities.sort_by(|a, b| (a.name.as_str(), a.country.as_str()).cmp(&(b.name.as_str(), b.country.as_str())));
        Self { cities }
    }

    /// Load from CSV with required header `name,country,lat,lon`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers().map_err(IngestError::Csv)?.clone();
        let expected = ["name", "country", "lat", "lon"];
        let got: Vec<&str> = headers.iter().map(str::trim).collect();
        if got != expected {
            return Err(IngestError::BadHeader {
                expected: expected.join(","),
                got: got.join(","),
            });
        }
        let mut cities = Vec::new();
        for row in rdr.deserialize::<City>() {
            let city: City = row.map_err(IngestError::Csv)?;
            if !(-90.0..=90.0).contains(&city.lat) || !(-180.0..=180.0).contains(&city.lon) {
                return Err(IngestError::BadCoordinates {
                    name: city.name,
                    lat: city.lat,
                    lon: city.lon,
                });
            }
            cities.push(city);
        }
        Ok(Self::new(cities))
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, IngestError> {
        let file = std::fs::File::open(path).map_err(IngestError::Io)?;
        Ok(Self::from_csv_reader(std::io::BufReader::new(file))?)
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn cities(&self) -> &[City] {
        &self.cities
    }

    /// Nearest city and its distance in km. `None` only when empty.
    pub fn nearest(&self, lat: f64, lon: f64) -> Option<(&City, f64)> {
        let mut best: Option<(&City, f64)> = None;
        for city in &self.cities {
            let d = haversine_km(lat, lon, city.lat, city.lon);
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((city, d)),
            }
        }
        best
    }

    /// Country of the nearest city when within `radius_km`, else `None`.
    pub fn georeference(&self, lat: f64, lon: f64, radius_km: f64) -> Option<&str> {
        let (city, dist) = self.nearest(lat, lon)?;
        (dist <= radius_km).then(|| city.country.as_str())
    }
}

/// Country-code TLD lookup table with an exclusion set for domains used
/// for non-geographic purposes (.ai, .fm, .io, .ly, .ag, .tv by default).
#[derive(Debug, Clone)]
pub struct TldTable {
    map: BTreeMap<String, String>,
    exclusions: BTreeSet<String>,
}

impl TldTable {
    pub fn new(map: BTreeMap<String, String>, exclusions: BTreeSet<String>) -> Self {
        let map = map
            .into_iter()
            .map(|(k, v)| (k.to_lowercase(), v.to_uppercase()))
            .collect();
        let exclusions = exclusions.into_iter().map(|s| s.to_lowercase()).collect();
        Self { map, exclusions }
    }

    /// Built-in ccTLD table and exclusion list.
    pub fn builtin() -> Self {
        let map = Self::parse_table_csv(include_str!("../../data/tlds.csv"))
            .expect("builtin TLD table parses");
        let exclusions = Self::parse_exclusions(include_str!("../../data/tld_exclusions.txt"));
        Self::new(map, exclusions)
    }

    /// Parse `suffix,country` rows. A first line exactly matching the
    /// header names is skipped.
    pub fn parse_table_csv(text: &str) -> Result<BTreeMap<String, String>, IngestError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if i == 0 && line.eq_ignore_ascii_case("suffix,country") {
                continue;
            }
            let (suffix, country) = line.split_once(',').ok_or(IngestError::BadTldRow {
                line: i + 1,
            })?;
            map.insert(suffix.trim().to_string(), country.trim().to_string());
        }
        Ok(map)
    }

    /// One suffix per line; `#` comments and blanks ignored.
    pub fn parse_exclusions(text: &str) -> BTreeSet<String> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_start_matches('.').to_string())
            .collect()
    }

    pub fn from_paths(table: &Path, exclusions: Option<&Path>) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(table).map_err(IngestError::Io)?;
        let map = Self::parse_table_csv(&text)?;
        let exclusions = match exclusions {
            Some(p) => {
                Self::parse_exclusions(&std::fs::read_to_string(p).map_err(IngestError::Io)?)
            }
            None => BTreeSet::new(),
        };
        Ok(Self::new(map, exclusions))
    }

    /// Country for a ccTLD suffix, unless excluded or unmapped. Generic
    /// TLDs are simply absent from the table.
    pub fn georeference(&self, suffix: &str) -> Option<&str> {
        if self.exclusions.contains(suffix) {
            return None;
        }
        self.map.get(suffix).map(String::as_str)
    }
}
