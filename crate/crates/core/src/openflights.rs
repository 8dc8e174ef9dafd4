//! OpenFlights `airports.dat` / `routes.dat` ingestion.
//!
//! Airports become nodes when at least one route between two distinct known
//! airports touches them. Any route between a pair gives a single unit edge.
//! The signal counts route endpoints: each directed route adds one to its
//! source and one to its destination. Counts are taken over every resolved
//! route before nodes are dropped, then standardized over the nodes that
//! remain.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord};
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, GraphSignal};

const BUNDLED_TABLE: &str = include_str!("../data/continents.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Continent {
    Africa,
    Asia,
    Europe,
    NorthAmerica,
    Oceania,
    SouthAmerica,
}

impl Continent {
    /// Alphabetical; communities are numbered in this order.
    pub const ALL: [Continent; 6] = [
        Continent::Africa,
        Continent::Asia,
        Continent::Europe,
        Continent::NorthAmerica,
        Continent::Oceania,
        Continent::SouthAmerica,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Continent::Africa => "Africa",
            Continent::Asia => "Asia",
            Continent::Europe => "Europe",
            Continent::NorthAmerica => "North America",
            Continent::Oceania => "Oceania",
            Continent::SouthAmerica => "South America",
        }
    }

    pub fn from_name(name: &str) -> Option<Continent> {
        Continent::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(name.trim()))
    }

}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AirportRecord {
    pub airport_id: i64,
    pub name: String,
    pub city: String,
    pub country: String,
    pub iata: Option<String>,
    pub icao: Option<String>,
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: Option<f64>,
    pub tz_offset: Option<f64>,
    pub dst: Option<String>,
    pub tz_olson: Option<String>,
    pub kind: Option<String>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteRecord {
    pub airline: Option<String>,
    pub airline_id: Option<i64>,
    pub src_code: Option<String>,
    pub src_id: Option<i64>,
    pub dst_code: Option<String>,
    pub dst_id: Option<i64>,
    pub codeshare: bool,
    pub stops: u32,
    pub equipment: Option<String>,
}

fn field(row: &StringRecord, i: usize) -> Option<String> {
    row.get(i)
        .map(str::trim)
        .filter(|s| !s.is_empty() && *s != "\\N")
        .map(str::to_string)
}

fn int_field(row: &StringRecord, i: usize) -> std::result::Result<Option<i64>, ()> {
    field(row, i).map(|s| s.parse().map_err(|_| ())).transpose()
}

fn real_field(row: &StringRecord, i: usize) -> std::result::Result<Option<f64>, ()> {
    field(row, i)
        .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(()))
        .transpose()
}

fn parse_airport(row: &StringRecord) -> std::result::Result<AirportRecord, ()> {
    if row.len() < 8 {
        return Err(());
    }
    let airport_id = int_field(row, 0)?.ok_or(())?;
    let latitude = real_field(row, 6)?.ok_or(())?;
    let longitude = real_field(row, 7)?.ok_or(())?;
    if !(-90.0..=90.0).contains(&latitude) || !(-180.0..=180.0).contains(&longitude) {
        return Err(());
    }
    Ok(AirportRecord {
        airport_id,
        name: field(row, 1).unwrap_or_default(),
        city: field(row, 2).unwrap_or_default(),
        country: field(row, 3).unwrap_or_default(),
        iata: field(row, 4),
        icao: field(row, 5),
        latitude,
        longitude,
        altitude: real_field(row, 8).unwrap_or(None),
        tz_offset: real_field(row, 9).unwrap_or(None),
        dst: field(row, 10),
        tz_olson: field(row, 11),
        kind: field(row, 12),
        source: field(row, 13),
    })
}

fn parse_route(row: &StringRecord) -> std::result::Result<RouteRecord, ()> {
    if row.len() < 6 {
        return Err(());
    }
    let route = RouteRecord {
        airline: field(row, 0),
        airline_id: int_field(row, 1)?,
        src_code: field(row, 2),
        src_id: int_field(row, 3)?,
        dst_code: field(row, 4),
        dst_id: int_field(row, 5)?,
        codeshare: field(row, 6).is_some_and(|s| s.eq_ignore_ascii_case("y")),
        stops: field(row, 7).map_or(Ok(0), |s| s.parse().map_err(|_| ()))?,
        equipment: field(row, 8),
    };
    if (route.src_id.is_none() && route.src_code.is_none())
        || (route.dst_id.is_none() && route.dst_code.is_none())
    {
        return Err(());
    }
    Ok(route)
}

/// Parsed rows plus the number of rows that could not be parsed.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub skipped: usize,
}

fn parse_rows<T, R: Read>(
    input: R,
    parse: impl Fn(&StringRecord) -> std::result::Result<T, ()>,
) -> Parsed<T> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = Vec::new();
    let mut skipped = 0;
    for (k, row) in reader.records().enumerate() {
        match row.map_err(|_| ()).and_then(|r| parse(&r)) {
            Ok(rec) => records.push(rec),
            // a leading line that fails to parse is taken to be a header
            Err(()) if k == 0 => {}
            Err(()) => skipped += 1,
        }
    }
    Parsed { records, skipped }
}

pub fn parse_airports<R: Read>(input: R) -> Parsed<AirportRecord> {
    parse_rows(input, parse_airport)
}

pub fn parse_routes<R: Read>(input: R) -> Parsed<RouteRecord> {
    parse_rows(input, parse_route)
}

pub fn read_airports(path: &Path) -> Result<Parsed<AirportRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_airports(std::io::BufReader::new(f)))
}

pub fn read_routes(path: &Path) -> Result<Parsed<RouteRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_routes(std::io::BufReader::new(f)))
}

/// Country → continent lookup. A country listed with an empty continent is
/// known to have none of the six.
#[derive(Debug, Clone)]
pub struct ContinentTable {
    entries: HashMap<String, Option<Continent>>,
}

impl ContinentTable {
    pub fn bundled() -> ContinentTable {
        ContinentTable::from_csv(BUNDLED_TABLE).expect("bundled continent table is valid")
    }

    /// Rows `country,continent[,note]` after a header line; `#` comments allowed.
    pub fn from_csv(text: &str) -> Result<ContinentTable> {
        let mut reader = ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut entries = HashMap::new();
        for row in reader.records() {
            let row = row.map_err(|e| Error::Data(format!("continent table: {e}")))?;
            let country = row.get(0).unwrap_or("").trim().to_lowercase();
            let name = row.get(1).unwrap_or("").trim();
            let continent = if name.is_empty() {
                None
            } else {
                Some(Continent::from_name(name).ok_or_else(|| {
                    Error::Data(format!("continent table: unknown continent `{name}`"))
                })?)
            };
            entries.insert(country, continent);
        }
        Ok(ContinentTable { entries })
    }

    /// `Some(None)` for countries explicitly without a continent.
    pub fn lookup(&self, country: &str) -> Option<Option<Continent>> {
        self.entries.get(&country.trim().to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

const SOUTH_AMERICAN_ZONES: &[&str] = &[
    "Araguaina", "Argentina", "Asuncion", "Bahia", "Belem", "Boa_Vista", "Bogota", "Buenos_Aires",
    "Campo_Grande", "Caracas", "Catamarca", "Cayenne", "Cordoba", "Cuiaba", "Eirunepe",
    "Fortaleza", "Guayaquil", "Guyana", "Jujuy", "La_Paz", "Lima", "Maceio", "Manaus", "Mendoza",
    "Montevideo", "Noronha", "Paramaribo", "Porto_Velho", "Punta_Arenas", "Recife", "Rio_Branco",
    "Santarem", "Santiago", "Sao_Paulo",
];

/// Continent implied by an Olson time zone name.
pub fn continent_of_timezone(tz: &str) -> Option<Continent> {
    let (region, rest) = tz.split_once('/')?;
    let city = rest.split('/').next().unwrap_or(rest);
    match region {
        "Europe" | "Arctic" => Some(Continent::Europe),
        "Africa" => Some(Continent::Africa),
        "Asia" => Some(Continent::Asia),
        "Australia" | "Pacific" => Some(Continent::Oceania),
        "America" => Some(if SOUTH_AMERICAN_ZONES.contains(&city) {
            Continent::SouthAmerica
        } else {
            Continent::NorthAmerica
        }),
        "Atlantic" => match city {
            "Bermuda" => Some(Continent::NorthAmerica),
            "Stanley" | "South_Georgia" => Some(Continent::SouthAmerica),
            "Cape_Verde" | "St_Helena" => Some(Continent::Africa),
            "Azores" | "Canary" | "Faroe" | "Faeroe" | "Madeira" | "Reykjavik" => Some(Continent::Europe),
            _ => None,
        },
        "Indian" => match city {
            "Chagos" | "Christmas" | "Cocos" | "Maldives" => Some(Continent::Asia),
            "Antananarivo" | "Comoro" | "Kerguelen" | "Mahe" | "Mauritius" | "Mayotte"
            | "Reunion" => Some(Continent::Africa),
            _ => None,
        },
        _ => None,
    }
}

/// Country table first, then the time zone.
pub fn continent_of(airport: &AirportRecord, table: &ContinentTable) -> Option<Continent> {
    match table.lookup(&airport.country) {
        Some(known) => known,
        None => airport.tz_olson.as_deref().and_then(continent_of_timezone),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestOptions {
    pub restrict_to_largest_component: bool,
    pub drop_unmappable_continent: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            restrict_to_largest_component: true,
            drop_unmappable_continent: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub airports: usize,
    pub airport_rows_skipped: usize,
    pub duplicate_airport_ids: usize,
    pub routes: usize,
    pub route_rows_skipped: usize,
    pub routes_unknown_airport: usize,
    pub routes_same_endpoint: usize,
    pub routes_resolved: usize,
    pub unmappable_nodes_dropped: usize,
    pub unmappable_countries: BTreeMap<String, usize>,
    pub nodes_outside_largest_component: usize,
    pub nodes: usize,
    pub edges: usize,
    pub community_sizes: BTreeMap<String, usize>,
    pub graph_hash: String,
}

#[derive(Debug, Clone)]
pub struct FlightsData {
    pub graph: Graph,
    /// Standardized endpoint counts.
    pub signal: GraphSignal,
    pub endpoint_counts: Vec<f64>,
    pub partition: Partition,
    pub airports: Vec<AirportRecord>,
    pub report: IngestReport,
}

/// External id per airport: IATA when unique, else ICAO when unique, else `OF<id>`.
fn external_ids(airports: &[&AirportRecord]) -> Vec<String> {
    let count = |key: fn(&AirportRecord) -> Option<&String>| {
        let mut c: HashMap<&str, usize> = HashMap::new();
        for a in airports {
            if let Some(k) = key(a) {
                *c.entry(k.as_str()).or_insert(0) += 1;
            }
        }
        c
    };
    let iata = count(|a| a.iata.as_ref());
    let icao = count(|a| a.icao.as_ref());
    airports
        .iter()
        .map(|a| match (&a.iata, &a.icao) {
            (Some(code), _) if iata[code.as_str()] == 1 && !icao.contains_key(code.as_str()) => code.clone(),
            (_, Some(code)) if icao[code.as_str()] == 1 && !iata.contains_key(code.as_str()) => code.clone(),
            _ => format!("OF{}", a.airport_id),
        })
        .collect()
}

pub fn build_flights_graph(
    airports: &[AirportRecord],
    routes: &[RouteRecord],
    opts: IngestOptions,
    table: &ContinentTable,
) -> Result<FlightsData> {
    let mut report = IngestReport {
        airports: airports.len(),
        routes: routes.len(),
        ..Default::default()
    };

    let mut by_id: HashMap<i64, usize> = HashMap::new();
    for (k, a) in airports.iter().enumerate() {
        if by_id.insert(a.airport_id, k).is_some() {
            report.duplicate_airport_ids += 1;
        }
    }
    let mut by_code: HashMap<&str, usize> = HashMap::new();
    for (k, a) in airports.iter().enumerate() {
        for code in [&a.iata, &a.icao].into_iter().flatten() {
            by_code.entry(code.as_str()).or_insert(k);
        }
    }
    let resolve = |id: Option<i64>, code: &Option<String>| -> Option<usize> {
        match id {
            Some(id) => by_id.get(&id).copied(),
            None => code.as_deref().and_then(|c| by_code.get(c).copied()),
        }
    };

    let mut counts: HashMap<usize, f64> = HashMap::new();
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for r in routes {
        let (Some(s), Some(d)) = (resolve(r.src_id, &r.src_code), resolve(r.dst_id, &r.dst_code)) else {
            report.routes_unknown_airport += 1;
            continue;
        };
        if s == d {
            report.routes_same_endpoint += 1;
            continue;
        }
        report.routes_resolved += 1;
        *counts.entry(s).or_insert(0.0) += 1.0;
        *counts.entry(d).or_insert(0.0) += 1.0;
        pairs.insert((s.min(d), s.max(d)));
    }
    if pairs.is_empty() {
        return Err(Error::Data("no usable routes between known airports".into()));
    }

    let mut continent: HashMap<usize, Continent> = HashMap::new();
    let mut endpoints: Vec<usize> = counts.keys().copied().collect();
    endpoints.sort_unstable();
    for &k in &endpoints {
        match continent_of(&airports[k], table) {
            Some(c) => {
                continent.insert(k, c);
            }
            None if opts.drop_unmappable_continent => {
                report.unmappable_nodes_dropped += 1;
                *report
                    .unmappable_countries
                    .entry(airports[k].country.clone())
                    .or_insert(0) += 1;
            }
            None => {
                return Err(Error::Data(format!(
                    "airport {} ({}) has no continent for country `{}`",
                    airports[k].airport_id, airports[k].name, airports[k].country
                )))
            }
        }
    }

    let kept: Vec<usize> = endpoints.iter().copied().filter(|k| continent.contains_key(k)).collect();
    let kept_records: Vec<&AirportRecord> = kept.iter().map(|&k| &airports[k]).collect();
    let ids = external_ids(&kept_records);
    let id_of: HashMap<usize, &str> = kept.iter().zip(&ids).map(|(&k, s)| (k, s.as_str())).collect();

    let mut builder = GraphBuilder::new();
    let mut sorted_pairs: Vec<&(usize, usize)> = pairs.iter().collect();
    sorted_pairs.sort_unstable();
    for &&(a, b) in &sorted_pairs {
        if let (Some(ia), Some(ib)) = (id_of.get(&a), id_of.get(&b)) {
            builder.add_edge(*ia, *ib, 1.0)?;
        }
    }
    let full = builder
        .build()
        .map_err(|_| Error::Data("no routes left after dropping unmappable airports".into()))?;
    let record_of: HashMap<&str, usize> = ids.iter().zip(&kept).map(|(s, &k)| (s.as_str(), k)).collect();

    let graph = if opts.restrict_to_largest_component {
        let keep = full.largest_component();
        report.nodes_outside_largest_component = full.node_count() - keep.len();
        full.induced_subgraph(&keep)?
    } else {
        full
    };

    let records: Vec<usize> = graph.node_ids().iter().map(|id| record_of[id.as_str()]).collect();
    let endpoint_counts: Vec<f64> = records.iter().map(|k| counts[k]).collect();
    let mut present: Vec<Continent> = records.iter().map(|k| continent[k]).collect();
    present.sort_unstable();
    present.dedup();
    let labels = records
        .iter()
        .map(|k| present.binary_search(&continent[k]).unwrap_or_default())
        .collect();
    let names = present.iter().map(|c| c.name().to_string()).collect();
    let partition = Partition::with_names(labels, names)?;

    let raw = GraphSignal::new(endpoint_counts.clone())?;
    let signal = match raw.standardized() {
        Ok(z) => z,
        Err(_) => {
            log::warn!("endpoint counts are constant; signal left demeaned without scaling");
            GraphSignal::zeros(raw.len())
        }
    };
    for (name, members) in partition.names().iter().zip(partition.members()) {
        report.community_sizes.insert(name.clone(), members.len());
    }
    report.nodes = graph.node_count();
    report.edges = graph.edge_count();
    report.graph_hash = graph.content_hash();
    let airports = records.iter().map(|&k| airports[k].clone()).collect();
    Ok(FlightsData {
        graph,
        signal,
        endpoint_counts,
        partition,
        airports,
        report,
    })
}

/// Reads `airports.dat` and `routes.dat` from `dir` and builds the dataset.
pub fn load_openflights(dir: &Path, opts: IngestOptions) -> Result<FlightsData> {
    let airports = read_airports(&dir.join("airports.dat"))?;
    let routes = read_routes(&dir.join("routes.dat"))?;
    if airports.skipped > 0 || routes.skipped > 0 {
        log::warn!(
            "skipped {} airport rows and {} route rows that did not parse",
            airports.skipped,
            routes.skipped
        );
    }
    let mut data = build_flights_graph(&airports.records, &routes.records, opts, &ContinentTable::bundled())?;
    data.report.airport_rows_skipped = airports.skipped;
    data.report.route_rows_skipped = routes.skipped;
    if data.report.routes_unknown_airport > 0 {
        log::warn!("dropped {} routes with unknown airports", data.report.routes_unknown_airport);
    }
    Ok(data)
}
