//! Builds the airport graph, endpoint-count signal and continent partition
//! from OpenFlights `airports.dat` and `routes.dat`.
//!
//! With a directory argument the real files are read from it; without one a
//! small inline sample is used.
//!
//! ```bash
//! cargo run --example openflights_ingest -- path/to/openflights
//! ```

use modgsp::openflights::{build_flights_graph, load_openflights, parse_airports, parse_routes, ContinentTable, IngestOptions};
use std::path::PathBuf;

const AIRPORTS: &str = r#"1,"Heathrow","London","United Kingdom","LHR","EGLL",51.47,-0.46,83,0,"E","Europe/London","airport","OurAirports"
2,"Charles de Gaulle","Paris","France","CDG","LFPG",49.01,2.55,392,1,"E","Europe/Paris","airport","OurAirports"
3,"John F Kennedy","New York","United States","JFK","KJFK",40.64,-73.78,13,-5,"A","America/New_York","airport","OurAirports"
4,"Los Angeles","Los Angeles","United States","LAX","KLAX",33.94,-118.41,125,-8,"A","America/Los_Angeles","airport","OurAirports"
5,"Narita","Tokyo","Japan","NRT","RJAA",35.76,140.39,141,9,"U","Asia/Tokyo","airport","OurAirports"
6,"Isolated Strip","Nowhere","Japan","ISO","RJXX",35.0,139.0,10,9,"U","Asia/Tokyo","airport","OurAirports"
"#;

const ROUTES: &str = "BA,1355,LHR,1,CDG,2,,0,320
AF,137,CDG,2,LHR,1,,0,320
BA,1355,LHR,1,JFK,3,,0,777
AA,24,JFK,3,LAX,4,Y,0,321
JL,2822,LAX,4,NRT,5,,0,788
JL,2822,NRT,5,LHR,1,,0,788
";

fn main() -> modgsp::Result<()> {
    let data = match std::env::args_os().nth(1).map(PathBuf::from) {
        Some(dir) => load_openflights(&dir, IngestOptions::default())?,
        None => {
            let airports = parse_airports(AIRPORTS.as_bytes()).records;
            let routes = parse_routes(ROUTES.as_bytes()).records;
            build_flights_graph(&airports, &routes, IngestOptions::default(), &ContinentTable::bundled())?
        }
    };
    let r = &data.report;
    println!(
        "{} airports, {} routes -> {} nodes, {} edges ({} outside the largest component)",
        r.airports, r.routes, r.nodes, r.edges, r.nodes_outside_largest_component
    );
    println!("communities: {:?}", r.community_sizes);
    let g = &data.graph;
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| data.endpoint_counts[b].total_cmp(&data.endpoint_counts[a]));
    for &i in order.iter().take(10) {
        println!(
            "{:<6} {:<24} {:<14} degree {:>4} endpoints {:>5} signal {:+.3}",
            g.node_id(i),
            data.airports[i].name,
            data.partition.name(data.partition.label(i)),
            g.degree(i),
            data.endpoint_counts[i],
            data.signal.values()[i]
        );
    }
    Ok(())
}
