//! Antenna coverage disks and their RCC-5 relations.
//!
//! Points are projected with spherical Web Mercator and buffered into exact
//! disks. Disk pairs are classified with closed-form DE-9IM predicates.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::network::ConstraintNetwork;
use crate::relation::RelationSet;
use crate::solver::{overlap_graph, Assignment};

/// Sphere radius of the Web Mercator convention, meters.
pub const EARTH_RADIUS_M: f64 = 6_378_137.0;
/// Latitude cutoff in degrees.
pub const MAX_LATITUDE: f64 = 85.06;
pub const DEFAULT_RADIUS_M: f64 = 300.0;
pub const DEFAULT_EPS_M: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum GeoError {
    Latitude(f64),
    Longitude(f64),
    Radius(f64),
    NonFinite,
    Epsilon(f64),
    SameRegion(String),
}

impl fmt::Display for GeoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeoError::Latitude(v) => {
                write!(f, "latitude {v} outside [-{MAX_LATITUDE}, {MAX_LATITUDE}]")
            }
            GeoError::Longitude(v) => write!(f, "longitude {v} outside [-180, 180]"),
            GeoError::Radius(v) => write!(f, "radius must be positive, got {v}"),
            GeoError::NonFinite => f.write_str("non-finite coordinate"),
            GeoError::Epsilon(v) => write!(f, "tolerance must be non-negative, got {v}"),
            GeoError::SameRegion(id) => write!(f, "cannot classify region `{id}` against itself"),
        }
    }
}

impl core::error::Error for GeoError {}

#[derive(Clone, Debug, PartialEq)]
pub struct Antenna {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub id: String,
    pub center: (f64, f64),
    pub radius: f64,
}

/// Degrees to Mercator meters.
pub fn project_mercator(lat: f64, lon: f64) -> Result<(f64, f64), GeoError> {
    if !lat.is_finite() || !lon.is_finite() {
        return Err(GeoError::NonFinite);
    }
    if lat.abs() > MAX_LATITUDE {
        return Err(GeoError::Latitude(lat));
    }
    if lon.abs() > 180.0 {
        return Err(GeoError::Longitude(lon));
    }
    let phi = lat.to_radians();
    let x = EARTH_RADIUS_M * lon.to_radians();
    // asinh(tan φ) equals ln(tan(π/4 + φ/2)) and is exact at the equator
    let y = EARTH_RADIUS_M * libm::asinh(libm::tan(phi));
    Ok((x, y))
}

/// Mercator meters back to `(lat, lon)` degrees.
pub fn inverse_mercator(x: f64, y: f64) -> (f64, f64) {
    let lat = libm::atan(libm::sinh(y / EARTH_RADIUS_M));
    let lon = x / EARTH_RADIUS_M;
    (lat * 180.0 / PI, lon * 180.0 / PI)
}

pub fn buffer(antenna: &Antenna, radius: f64) -> Result<Region, GeoError> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(GeoError::Radius(radius));
    }
    Ok(Region {
        id: antenna.id.clone(),
        center: project_mercator(antenna.lat, antenna.lon)?,
        radius,
    })
}

/// DE-9IM relation classes that can occur between two disks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum De9im {
    Disjoint,
    Touches,
    Overlap,
    CoveredBy,
    Covers,
    Equal,
}

impl De9im {
    pub fn as_str(self) -> &'static str {
        match self {
            De9im::Disjoint => "disjoint",
            De9im::Touches => "touches",
            De9im::Overlap => "overlap",
            De9im::CoveredBy => "coveredby",
            De9im::Covers => "covers",
            De9im::Equal => "equal",
        }
    }

    pub fn parse(s: &str) -> Option<De9im> {
        [
            De9im::Disjoint,
            De9im::Touches,
            De9im::Overlap,
            De9im::CoveredBy,
            De9im::Covers,
            De9im::Equal,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }

    /// RCC-5 relation name; touching disks are discrete.
    pub fn rcc5(self) -> &'static str {
        match self {
            De9im::Disjoint | De9im::Touches => "dr",
            De9im::Overlap => "po",
            De9im::CoveredBy => "pp",
            De9im::Covers => "ppi",
            De9im::Equal => "eq",
        }
    }
}

/// Classification of regions `a < b` (indices into the region list).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialPair {
    pub a: usize,
    pub b: usize,
    pub de9im: De9im,
    pub distance: f64,
}

impl SpatialPair {
    pub fn rcc5(&self) -> &'static str {
        self.de9im.rcc5()
    }
}

/// DE-9IM class of disk `a` relative to disk `b`.
pub fn classify_pair(a: &Region, b: &Region, eps: f64) -> Result<De9im, GeoError> {
    if a.id == b.id {
        return Err(GeoError::SameRegion(a.id.clone()));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(GeoError::Epsilon(eps));
    }
    let d = distance(a, b);
    let (r1, r2) = (a.radius, b.radius);
    Ok(if d <= eps && (r1 - r2).abs() <= eps {
        De9im::Equal
    } else if d + r1 <= r2 + eps {
        De9im::CoveredBy
    } else if d + r2 <= r1 + eps {
        De9im::Covers
    } else if (d - (r1 + r2)).abs() <= eps {
        De9im::Touches
    } else if d > r1 + r2 + eps {
        De9im::Disjoint
    } else {
        De9im::Overlap
    })
}

fn distance(a: &Region, b: &Region) -> f64 {
    libm::hypot(a.center.0 - b.center.0, a.center.1 - b.center.1)
}

/// Every unordered pair, in `(a, b)` lexicographic order.
pub fn classify_all(regions: &[Region], eps: f64) -> Result<Vec<SpatialPair>, GeoError> {
    let n = regions.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push(SpatialPair {
                a,
                b,
                de9im: classify_pair(&regions[a], &regions[b], eps)?,
                distance: distance(&regions[a], &regions[b]),
            });
        }
    }
    Ok(out)
}

/// Index into the output of [`classify_all`] for `a < b`.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Network over region indices that keeps `known_per_region` classified
/// relations for each region, plus the full pair table.
///
/// Region `i` picks its nearest neighbours by center distance (ties by
/// index), skipping pairs another region already contributed.
pub fn build_network(
    regions: &[Region],
    known_per_region: usize,
    eps: f64,
) -> Result<(ConstraintNetwork, Vec<SpatialPair>), GeoError> {
    let n = regions.len();
    let table = classify_all(regions, eps)?;
    let mut net = ConstraintNetwork::with_elements(n);
    let mut chosen = alloc::vec![false; table.len()];
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (distance(&regions[i], &regions[j]), j))
            .collect();
        others.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        let mut kept = 0;
        for (_, j) in others {
            if kept == known_per_region {
                break;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let idx = pair_index(n, a, b);
            if chosen[idx] {
                continue;
            }
            chosen[idx] = true;
            kept += 1;
            net.add(a, b, &[table[idx].rcc5()]);
        }
    }
    Ok((net, table))
}

/// Network containing every classified pair.
pub fn full_network(n: usize, table: &[SpatialPair]) -> ConstraintNetwork {
    let mut net = ConstraintNetwork::with_elements(n);
    for p in table {
        net.add(p.a, p.b, &[p.rcc5()]);
    }
    net
}

/// Interference arcs of a solved model.
pub fn build_overlap_graph(model: &Assignment, overlap: RelationSet) -> Vec<(usize, usize)> {
    overlap_graph(model, overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Calculus;
    use alloc::format;
    use alloc::string::ToString;

    fn disk(id: &str, x: f64, y: f64, r: f64) -> Region {
        Region {
            id: id.to_string(),
            center: (x, y),
            radius: r,
        }
    }

    #[test]
    fn mercator_reference_points() {
        assert_eq!(project_mercator(0.0, 0.0).unwrap(), (0.0, 0.0));
        let (x, y) = project_mercator(0.0, 180.0).unwrap();
        assert!((x - 20037508.342789244).abs() < 1e-6);
        assert_eq!(y, 0.0);
        let (_, y) = project_mercator(85.06, 0.0).unwrap();
        let reference = EARTH_RADIUS_M * libm::log(libm::tan(core::f64::consts::FRAC_PI_4 + 85.06f64.to_radians() / 2.0));
        assert!((y - reference).abs() < 1e-6);
        assert!((y / 20037508.342789244 - 1.0).abs() < 1e-3);
        assert!(project_mercator(85.1, 0.0).is_err());
        assert!(project_mercator(0.0, 180.5).is_err());
        assert!(project_mercator(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn mercator_round_trip() {
        for i in 0..10 {
            for j in 0..10 {
                let lat = -85.0 + 170.0 * i as f64 / 9.0;
                let lon = -180.0 + 360.0 * j as f64 / 9.0;
                let (x, y) = project_mercator(lat, lon).unwrap();
                let (la, lo) = inverse_mercator(x, y);
                assert!((la - lat).abs() < 1e-9 && (lo - lon).abs() < 1e-9, "{lat} {lon}");
            }
        }
    }

    #[test]
    fn buffering() {
        let a = Antenna { id: "a".into(), lat: 0.0, lon: 0.0 };
        assert_eq!(buffer(&a, 300.0).unwrap(), disk("a", 0.0, 0.0, 300.0));
        assert_eq!(buffer(&a, 150.0).unwrap().radius, 150.0);
        assert_eq!(buffer(&a, 0.0), Err(GeoError::Radius(0.0)));
    }

    #[test]
    fn disk_classes() {
        let c = |d: f64, r1: f64, r2: f64| {
            classify_pair(&disk("a", 0.0, 0.0, r1), &disk("b", d, 0.0, r2), DEFAULT_EPS_M).unwrap()
        };
        assert_eq!(c(500.0, 300.0, 300.0), De9im::Overlap);
        assert_eq!(c(0.0, 300.0, 300.0), De9im::Equal);
        assert_eq!(c(600.0, 300.0, 300.0), De9im::Touches);
        assert_eq!(c(600.0, 300.0, 300.0).rcc5(), "dr");
        assert_eq!(c(601.0, 300.0, 300.0), De9im::Disjoint);
        assert_eq!(c(50.0, 100.0, 300.0), De9im::CoveredBy);
        assert_eq!(c(200.0, 100.0, 300.0), De9im::CoveredBy);
        assert_eq!(c(50.0, 300.0, 100.0), De9im::Covers);
        assert!(classify_pair(&disk("a", 0.0, 0.0, 1.0), &disk("a", 5.0, 0.0, 1.0), 0.0).is_err());
    }

    /// Containment oracle by sampling: counts sample points of the plane
    /// inside each disk.
    fn sampled(a: &Region, b: &Region) -> De9im {
        let (mut only_a, mut only_b, mut both) = (false, false, false);
        let lo_x = (a.center.0 - a.radius).min(b.center.0 - b.radius);
        let hi_x = (a.center.0 + a.radius).max(b.center.0 + b.radius);
        let lo_y = (a.center.1 - a.radius).min(b.center.1 - b.radius);
        let hi_y = (a.center.1 + a.radius).max(b.center.1 + b.radius);
        let steps = 300;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = lo_x + (hi_x - lo_x) * i as f64 / steps as f64;
                let y = lo_y + (hi_y - lo_y) * j as f64 / steps as f64;
                let ia = libm::hypot(x - a.center.0, y - a.center.1) < a.radius;
                let ib = libm::hypot(x - b.center.0, y - b.center.1) < b.radius;
                only_a |= ia && !ib;
                only_b |= ib && !ia;
                both |= ia && ib;
            }
        }
        match (both, only_a, only_b) {
            (false, _, _) => De9im::Disjoint,
            (true, true, true) => De9im::Overlap,
            (true, false, true) => De9im::CoveredBy,
            (true, true, false) => De9im::Covers,
            (true, false, false) => De9im::Equal,
        }
    }

    #[test]
    fn analytic_agrees_with_sampling() {
        let cases = [
            (500.0, 0.0, 300.0, 300.0),
            (700.0, 100.0, 300.0, 300.0),
            (120.0, 40.0, 100.0, 400.0),
            (10.0, 300.0, 500.0, 150.0),
            (0.0, 0.0, 200.0, 200.0),
            (250.0, 250.0, 200.0, 200.0),
        ];
        for (x, y, r1, r2) in cases {
            let a = disk("a", 0.0, 0.0, r1);
            let b = disk("b", x, y, r2);
            assert_eq!(classify_pair(&a, &b, DEFAULT_EPS_M).unwrap(), sampled(&a, &b), "{x} {y} {r1} {r2}");
        }
    }

    #[test]
    fn collinear_network() {
        let regions: Vec<Region> = (0..3).map(|i| disk(&format!("r{i}"), 500.0 * i as f64, 0.0, 300.0)).collect();
        let (net, table) = build_network(&regions, 10, DEFAULT_EPS_M).unwrap();
        assert_eq!(table.len(), 3);
        let mut got: Vec<(usize, usize, &str)> = net
            .constraints
            .iter()
            .map(|c| (c.x, c.y, c.relations[0].as_str()))
            .collect();
        got.sort();
        assert_eq!(got, [(0, 1, "po"), (0, 2, "dr"), (1, 2, "po")]);

        let (net, _) = build_network(&regions, 0, DEFAULT_EPS_M).unwrap();
        assert_eq!((net.len(), net.constraints.len()), (3, 0));
    }

    #[test]
    fn one_known_picks_nearest() {
        let regions = [
            disk("a", 0.0, 0.0, 300.0),
            disk("b", 2000.0, 0.0, 300.0),
            disk("c", 400.0, 0.0, 300.0),
        ];
        let (net, table) = build_network(&regions, 1, DEFAULT_EPS_M).unwrap();
        let pairs: Vec<(usize, usize)> = net.constraints.iter().map(|c| (c.x, c.y)).collect();
        // a and c pick each other; b then takes c
        assert_eq!(pairs, [(0, 2), (1, 2)]);
        assert_eq!(table[pair_index(3, 0, 2)].de9im, De9im::Overlap);
    }

    #[test]
    fn pair_index_matches_table_order() {
        let regions: Vec<Region> = (0..6).map(|i| disk(&format!("{i}"), 100.0 * i as f64, 0.0, 1.0)).collect();
        let table = classify_all(&regions, 0.0).unwrap();
        for (k, p) in table.iter().enumerate() {
            assert_eq!(pair_index(6, p.a, p.b), k);
        }
    }

    #[test]
    fn full_table_is_rcc5() {
        let calc = Calculus::rcc5();
        let regions = [disk("a", 0.0, 0.0, 300.0), disk("b", 100.0, 0.0, 50.0)];
        let table = classify_all(&regions, DEFAULT_EPS_M).unwrap();
        let net = full_network(2, &table);
        assert_eq!(net.constraints[0].relations, ["ppi"]);
        assert!(calc.relation_index("ppi").is_some());
    }
}
