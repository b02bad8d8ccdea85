//! Scenario files: line-oriented `key = value` pairs with `#` comments.
//! Any value may be a sweep `[a; b; c]`; sweeps expand to the cartesian
//! product in key order, the last key varying fastest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::contacts::LinkParams;
use crate::map::{Region, DEFAULT_SNAP_TOLERANCE};
use crate::mobility::MobilityParams;
use crate::routing::{RouterKind, WaveParams};
use crate::traffic::{preset, TrafficKind, TrafficPattern};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("duplicate key '{0}'")]
    DuplicateKey(String),
    #[error("missing required key '{0}'")]
    MissingKey(String),
    #[error("{key}: empty sweep")]
    EmptySweep { key: String },
    #[error("{key}: {message}")]
    Value { key: String, message: String },
    #[error("config contains sweeps; it expands to {0} runs")]
    HasSweeps(usize),
}

fn value_err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    Grid { rows: usize, cols: usize, spacing: f64 },
    Wkt { files: Vec<PathBuf>, snap: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfig {
    pub count: usize,
    pub region: Option<Region>,
    pub mobility: MobilityParams,
}

/// One fully resolved simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub end_time: f64,
    pub tick: f64,
    pub seed: u64,
    pub map: MapSource,
    /// Group 1 creates the messages; further groups only relay them.
    pub groups: Vec<GroupConfig>,
    pub link: LinkParams,
    /// Limit a node to one transfer whether sending or receiving. When off,
    /// only senders are limited.
    pub exclusive_receiver: bool,
    pub router: RouterKind,
    pub wave: WaveParams,
    pub buffer: u64,
    pub traffic: TrafficPattern,
    pub report_interval: f64,
    pub output: Option<PathBuf>,
    /// Position within an expanded sweep.
    pub run_index: usize,
    /// Swept keys and the values chosen for this run.
    pub swept: Vec<(String, String)>,
}

const GROUPS: usize = 2;

impl ScenarioConfig {
    /// A scenario with every default set and the given map, router, buffer
    /// and traffic.
    pub fn new(map: MapSource, router: RouterKind, buffer: u64, traffic: TrafficPattern) -> Self {
        let group = |count| GroupConfig {
            count,
            region: None,
            mobility: MobilityParams::default(),
        };
        Self {
            end_time: 9000.0,
            tick: 0.1,
            seed: 0,
            map,
            groups: vec![group(5), group(95)],
            link: LinkParams::default(),
            exclusive_receiver: true,
            router,
            wave: WaveParams::default(),
            buffer,
            traffic,
            report_interval: 10.0,
            output: None,
            run_index: 0,
            swept: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return Err(value_err("end_time", "must be positive"));
        }
        if !(self.tick > 0.0 && self.tick.is_finite()) {
            return Err(value_err("tick", "must be positive"));
        }
        if !(self.report_interval >= self.tick && self.report_interval.is_finite()) {
            return Err(value_err("report.interval", "must be at least one tick"));
        }
        if self.buffer == 0 {
            return Err(value_err("buffer", "must be positive"));
        }
        if self.node_count() < 2 {
            return Err(value_err("group2.count", "need at least 2 nodes in total"));
        }
        if self.groups[0].count == 0 {
            return Err(value_err("group1.count", "message sources need at least one node"));
        }
        for (i, g) in self.groups.iter().enumerate() {
            g.mobility
                .validate()
                .map_err(|e| value_err(&format!("group{}", i + 1), e.to_string()))?;
        }
        self.link.validate().map_err(|e| value_err("link", e.to_string()))?;
        self.wave.validate().map_err(|e| value_err("wave", e.to_string()))?;
        self.traffic
            .validate()
            .map_err(|e| value_err("traffic", e.to_string()))?;
        if self.traffic.kind == TrafficKind::Periodic && self.traffic.window > self.end_time {
            return Err(value_err("traffic.window", "exceeds end_time"));
        }
        match &self.map {
            MapSource::Grid { rows, cols, spacing } => {
                if *rows == 0 || *cols == 0 || spacing.is_nan() || *spacing <= 0.0 {
                    return Err(value_err("map.grid", "need rows, cols >= 1 and spacing > 0"));
                }
            }
            MapSource::Wkt { files, snap } => {
                if files.is_empty() {
                    return Err(value_err("map.wkt", "no files"));
                }
                if let Some(f) = files.iter().find(|f| !f.exists()) {
                    return Err(value_err("map.wkt", format!("{} does not exist", f.display())));
                }
                if !(*snap >= 0.0 && snap.is_finite()) {
                    return Err(value_err("map.snap", "must be a non-negative distance"));
                }
            }
        }
        Ok(())
    }

    /// Canonical config text; loading it back yields the same scenario
    /// (apart from sweep bookkeeping).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("end_time", fmt_f(self.end_time));
        kv("tick", fmt_f(self.tick));
        kv("seed", self.seed.to_string());
        match &self.map {
            MapSource::Grid { rows, cols, spacing } => kv("map.grid", format!("{rows} {cols} {}", fmt_f(*spacing))),
            MapSource::Wkt { files, snap } => {
                let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
                kv("map.wkt", names.join(", "));
                kv("map.snap", fmt_f(*snap));
            }
        }
        for (i, g) in self.groups.iter().enumerate() {
            let p = format!("group{}", i + 1);
            kv(&format!("{p}.count"), g.count.to_string());
            if let Some(r) = &g.region {
                kv(&format!("{p}.region"), region_text(r));
            }
            kv(&format!("{p}.speed_min"), fmt_f(g.mobility.speed_min));
            kv(&format!("{p}.speed_max"), fmt_f(g.mobility.speed_max));
            kv(&format!("{p}.wait_min"), fmt_f(g.mobility.wait_min));
            kv(&format!("{p}.wait_max"), fmt_f(g.mobility.wait_max));
        }
        kv("link.range", fmt_f(self.link.range));
        kv("link.bandwidth", fmt_f(self.link.bandwidth));
        kv("link.exclusive_receiver", self.exclusive_receiver.to_string());
        kv("router", self.router.to_string());
        kv("buffer", self.buffer.to_string());
        kv("wave.immunity", fmt_f(self.wave.immunity));
        kv("wave.custody_fraction", fmt_f(self.wave.custody_fraction));
        let kind = match self.traffic.kind {
            TrafficKind::One => "one",
            TrafficKind::Periodic => "moderate",
        };
        kv("traffic", kind.to_string());
        kv("traffic.interval_min", fmt_f(self.traffic.interval_min));
        kv("traffic.interval_max", fmt_f(self.traffic.interval_max));
        kv("traffic.window", fmt_f(self.traffic.window));
        kv("traffic.size", self.traffic.size.to_string());
        kv("traffic.ttl", fmt_f(self.traffic.ttl));
        kv("report.interval", fmt_f(self.report_interval));
        if let Some(o) = &self.output {
            kv("output", o.display().to_string());
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn region_text(r: &Region) -> String {
    match r {
        Region::BBox { min, max } => format!("BBOX {} {} {} {}", min.x, min.y, max.x, max.y),
        Region::Polygon(ring) => {
            let pts: Vec<String> = ring.iter().chain(ring.first()).map(|p| p.to_string()).collect();
            format!("POLYGON (({}))", pts.join(", "))
        }
    }
}

/// Parses `500000`, `500KB`, `5 MB`, `1.4MB` (1 KB = 1000 bytes).
pub fn parse_bytes(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let split = t
        .find(|c: char| c.is_ascii_alphabetic())
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let mult = match unit.trim().to_ascii_uppercase().as_str() {
        "" | "B" => 1.0,
        "KB" => 1e3,
        "MB" => 1e6,
        "GB" => 1e9,
        other => return Err(format!("unknown byte unit '{other}'")),
    };
    let n: f64 = num.trim().parse().map_err(|_| format!("invalid byte count '{t}'"))?;
    let bytes = (n * mult).round();
    if !(bytes >= 0.0 && bytes < u64::MAX as f64) {
        return Err(format!("byte count '{t}' out of range"));
    }
    Ok(bytes as u64)
}

struct Setting {
    key: String,
    values: Vec<String>,
    swept: bool,
}

fn split_settings(text: &str) -> Result<Vec<Setting>, ConfigError> {
    let mut out: Vec<Setting> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: idx + 1,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: idx + 1,
                message: "empty key".into(),
            });
        }
        if out.iter().any(|s| s.key == key) {
            return Err(ConfigError::DuplicateKey(key));
        }
        let v = v.trim();
        let setting = if let Some(inner) = v.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line: idx + 1,
                message: format!("unterminated sweep for '{key}'"),
            })?;
            let values: Vec<String> = inner
                .split(';')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if values.is_empty() {
                return Err(ConfigError::EmptySweep { key });
            }
            Setting { key, values, swept: true }
        } else {
            Setting {
                key,
                values: vec![v.to_string()],
                swept: false,
            }
        };
        out.push(setting);
    }
    Ok(out)
}

const KNOWN_KEYS: &[&str] = &[
    "end_time",
    "tick",
    "seed",
    "map.grid",
    "map.wkt",
    "map.snap",
    "link.range",
    "link.bandwidth",
    "link.exclusive_receiver",
    "router",
    "buffer",
    "wave.immunity",
    "wave.custody_fraction",
    "traffic",
    "traffic.interval_min",
    "traffic.interval_max",
    "traffic.window",
    "traffic.size",
    "traffic.ttl",
    "report.interval",
    "output",
];

const GROUP_KEYS: &[&str] = &["count", "region", "region_file", "speed_min", "speed_max", "wait_min", "wait_max"];

fn is_known(key: &str) -> bool {
    if KNOWN_KEYS.contains(&key) {
        return true;
    }
    (1..=GROUPS).any(|g| {
        key.strip_prefix(&format!("group{g}."))
            .is_some_and(|rest| GROUP_KEYS.contains(&rest))
    })
}

fn num(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .parse()
        .map_err(|_| value_err(key, format!("invalid number '{v}'")))?;
    if !x.is_finite() {
        return Err(value_err(key, format!("invalid number '{v}'")));
    }
    Ok(x)
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| value_err(key, format!("invalid integer '{v}'")))
}

fn resolve(base: Option<&Path>, p: &str) -> PathBuf {
    let path = PathBuf::from(p);
    match base {
        Some(b) if path.is_relative() => b.join(path),
        _ => path,
    }
}

fn build(pairs: &[(&str, &str)], base: Option<&Path>) -> Result<ScenarioConfig, ConfigError> {
    let get = |k: &str| pairs.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    let required = |k: &str| get(k).ok_or_else(|| ConfigError::MissingKey(k.to_string()));

    let router: RouterKind = required("router")?
        .parse()
        .map_err(|e: crate::routing::RoutingError| value_err("router", e.to_string()))?;
    let buffer = parse_bytes(required("buffer")?).map_err(|m| value_err("buffer", m))?;
    let mut traffic = preset(required("traffic")?).map_err(|e| value_err("traffic", e.to_string()))?;

    let map = match (get("map.grid"), get("map.wkt")) {
        (Some(_), Some(_)) => return Err(value_err("map.wkt", "map.grid and map.wkt are exclusive")),
        (None, None) => return Err(ConfigError::MissingKey("map.grid".into())),
        (Some(g), None) => {
            if get("map.snap").is_some() {
                return Err(value_err("map.snap", "only applies to map.wkt"));
            }
            let parts: Vec<&str> = g.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(value_err("map.grid", "expected 'rows cols spacing'"));
            }
            MapSource::Grid {
                rows: int("map.grid", parts[0])?,
                cols: int("map.grid", parts[1])?,
                spacing: num("map.grid", parts[2])?,
            }
        }
        (None, Some(w)) => MapSource::Wkt {
            files: w
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| resolve(base, s))
                .collect(),
            snap: get("map.snap")
                .map(|v| num("map.snap", v))
                .transpose()?
                .unwrap_or(DEFAULT_SNAP_TOLERANCE),
        },
    };

    let mut cfg = ScenarioConfig::new(map, router, buffer, traffic.clone());
    for &(key, v) in pairs {
        match key {
            "end_time" => cfg.end_time = num(key, v)?,
            "tick" => cfg.tick = num(key, v)?,
            "seed" => cfg.seed = int(key, v)?,
            "link.range" => cfg.link.range = num(key, v)?,
            "link.bandwidth" => cfg.link.bandwidth = parse_bytes(v).map_err(|m| value_err(key, m))? as f64,
            "link.exclusive_receiver" => {
                cfg.exclusive_receiver = v
                    .parse()
                    .map_err(|_| value_err(key, format!("expected true or false, got '{v}'")))?
            }
            "wave.immunity" => cfg.wave.immunity = num(key, v)?,
            "wave.custody_fraction" => cfg.wave.custody_fraction = num(key, v)?,
            "traffic.interval_min" => traffic.interval_min = num(key, v)?,
            "traffic.interval_max" => traffic.interval_max = num(key, v)?,
            "traffic.window" => traffic.window = num(key, v)?,
            "traffic.size" => traffic.size = parse_bytes(v).map_err(|m| value_err(key, m))?,
            "traffic.ttl" => traffic.ttl = num(key, v)?,
            "report.interval" => cfg.report_interval = num(key, v)?,
            "output" => cfg.output = Some(resolve(base, v)),
            _ => {
                if let Some((g, field)) = key
                    .strip_prefix("group")
                    .and_then(|rest| rest.split_once('.'))
                {
                    let gi: usize = g.parse::<usize>().expect("validated group key") - 1;
                    let group = &mut cfg.groups[gi];
                    match field {
                        "count" => group.count = int(key, v)?,
                        "region" => {
                            if get(&format!("group{g}.region_file")).is_some() {
                                return Err(value_err(key, "region and region_file are exclusive"));
                            }
                            group.region = Some(Region::parse_line(v, 1).map_err(|e| value_err(key, e.to_string()))?);
                        }
                        "region_file" => {
                            let path = resolve(base, v);
                            let text = std::fs::read_to_string(&path)
                                .map_err(|e| value_err(key, format!("{}: {e}", path.display())))?;
                            group.region = Some(
                                Region::parse(&text)
                                    .map_err(|e| value_err(key, format!("{}: {e}", path.display())))?,
                            );
                        }
                        "speed_min" => group.mobility.speed_min = num(key, v)?,
                        "speed_max" => group.mobility.speed_max = num(key, v)?,
                        "wait_min" => group.mobility.wait_min = num(key, v)?,
                        "wait_max" => group.mobility.wait_max = num(key, v)?,
                        _ => unreachable!("validated group key"),
                    }
                }
            }
        }
    }
    cfg.traffic = traffic;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a scenario and expands its sweeps. Relative paths resolve against
/// the current directory.
pub fn load_config(text: &str) -> Result<Vec<ScenarioConfig>, ConfigError> {
    load_config_in(text, None)
}

/// Reads a scenario file; relative paths resolve against its directory.
pub fn load_config_file(path: &Path) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Syntax {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    load_config_in(&text, path.parent())
}

pub fn load_config_in(text: &str, base: Option<&Path>) -> Result<Vec<ScenarioConfig>, ConfigError> {
    let settings = split_settings(text)?;
    if let Some(s) = settings.iter().find(|s| !is_known(&s.key)) {
        return Err(ConfigError::UnknownKey(s.key.clone()));
    }
    let total: usize = settings.iter().map(|s| s.values.len()).product();
    let seed_swept = settings.iter().any(|s| s.key == "seed" && s.swept);
    let mut runs = Vec::with_capacity(total);
    for run in 0..total {
        // mixed-radix decode, last key fastest
        let mut rest = run;
        let mut choice = vec![0; settings.len()];
        for (i, s) in settings.iter().enumerate().rev() {
            choice[i] = rest % s.values.len();
            rest /= s.values.len();
        }
        let pairs: Vec<(&str, &str)> = settings
            .iter()
            .zip(&choice)
            .map(|(s, &c)| (s.key.as_str(), s.values[c].as_str()))
            .collect();
        let mut cfg = build(&pairs, base)?;
        cfg.run_index = run;
        cfg.swept = settings
            .iter()
            .zip(&choice)
            .filter(|(s, _)| s.swept)
            .map(|(s, &c)| (s.key.clone(), s.values[c].clone()))
            .collect();
        if !seed_swept {
            cfg.seed = cfg.seed.wrapping_add(run as u64);
        }
        runs.push(cfg);
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BASE: &str = "map.grid = 5 5 20\nrouter = epidemic\nbuffer = 500KB\ntraffic = one\n";

    #[test]
    fn plain_config_is_one_run() {
        let runs = load_config(BASE).unwrap();
        assert_eq!(runs.len(), 1);
        let c = &runs[0];
        assert_eq!(c.buffer, 500_000);
        assert_eq!((c.end_time, c.tick, c.report_interval), (9000.0, 0.1, 10.0));
        assert_eq!(c.node_count(), 100);
        assert_eq!(c.map, MapSource::Grid { rows: 5, cols: 5, spacing: 20.0 });
    }

    #[test]
    fn sweeps_expand_last_key_fastest() {
        let text = format!("{BASE}seed = 7\ngroup2.count = [95; 495; 995; 2995]\nbuffer_x = 1\n");
        assert_eq!(load_config(&text).unwrap_err(), ConfigError::UnknownKey("buffer_x".into()));
        let text = BASE.replace("buffer = 500KB", "buffer = [500KB; 5MB]")
            + "seed = 7\ngroup2.count = [95; 495; 995; 2995]\n";
        let runs = load_config(&text).unwrap();
        assert_eq!(runs.len(), 8);
        assert_eq!(runs[1].buffer, 500_000);
        assert_eq!(runs[1].groups[1].count, 495);
        assert_eq!(runs[4].buffer, 5_000_000);
        assert_eq!(runs[4].groups[1].count, 95);
        assert_eq!(runs[5].seed, 12);
        assert_eq!(
            runs[5].swept,
            vec![("buffer".into(), "5MB".into()), ("group2.count".into(), "495".into())]
        );
    }

    #[test]
    fn swept_seed_is_used_as_is() {
        let text = format!("{BASE}seed = [3; 9]\n").replace("router = epidemic", "router = [epidemic; wave]");
        let runs = load_config(&text).unwrap();
        let seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![3, 9, 3, 9]);
    }

    #[test]
    fn errors_name_the_key() {
        let err = load_config(&BASE.replace("epidemic", "wav")).unwrap_err();
        assert!(err.to_string().contains("unknown router 'wav'"), "{err}");
        assert_eq!(
            load_config("router = wave\nbuffer = 1MB\ntraffic = one\n").unwrap_err(),
            ConfigError::MissingKey("map.grid".into())
        );
        assert_eq!(
            load_config(&BASE.replace("router = epidemic\n", "")).unwrap_err(),
            ConfigError::MissingKey("router".into())
        );
        assert_eq!(
            load_config(&format!("{BASE}tick = []\n")).unwrap_err(),
            ConfigError::EmptySweep { key: "tick".into() }
        );
        assert!(matches!(load_config(&format!("{BASE}tick = fast\n")), Err(ConfigError::Value { key, .. }) if key == "tick"));
        assert!(matches!(load_config(&format!("{BASE}tick\n")), Err(ConfigError::Syntax { line: 5, .. })));
        assert!(matches!(load_config(&format!("{BASE}router = wave\n")), Err(ConfigError::DuplicateKey(_))));
        assert!(load_config(&format!("{BASE}group2.count = 0\ngroup1.count = 1\n")).is_err());
        assert!(load_config("map.grid = 5 5 20\nrouter = epidemic\nbuffer = 500KB\ntraffic = high\ntraffic.window = 99999\n").is_err());
    }

    #[test]
    fn overrides_and_regions() {
        let text = format!(
            "{BASE}# comment\ntraffic = high # trailing\ntraffic.interval_max = 45\n\
             group1.region = BBOX 20 20 60 60\nlink.bandwidth = 1.4MB\nlink.exclusive_receiver = false\n"
        )
        .replace("traffic = one\n", "");
        let c = &load_config(&text).unwrap()[0];
        assert_eq!(c.traffic.interval_min, 30.0);
        assert_eq!(c.traffic.interval_max, 45.0);
        assert_eq!(c.link.bandwidth, 1_400_000.0);
        assert!(!c.exclusive_receiver);
        assert!(matches!(c.groups[0].region, Some(Region::BBox { .. })));
    }

    #[test]
    fn byte_units() {
        assert_eq!(parse_bytes("500KB"), Ok(500_000));
        assert_eq!(parse_bytes("5 MB"), Ok(5_000_000));
        assert_eq!(parse_bytes("2064"), Ok(2064));
        assert_eq!(parse_bytes("2064b"), Ok(2064));
        assert!(parse_bytes("5 MiB").is_err());
        assert!(parse_bytes("lots").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = load_config(BASE).unwrap().remove(0);
        let b = load_config(BASE).unwrap().remove(0);
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let c = load_config(&BASE.replace("epidemic", "wave")).unwrap().remove(0);
        assert_ne!(a.hash(), c.hash());
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(
            rows in 1usize..30, spacing in 1.0f64..100.0, seed in any::<u64>(),
            buffer in 1u64..10_000_000, g2 in 1usize..3000, wave in any::<bool>(),
            lo in 0.0f64..50.0, hi in 50.0f64..100.0, tick in 0.01f64..1.0,
        ) {
            let router = if wave { RouterKind::Wave } else { RouterKind::Epidemic };
            let mut c = ScenarioConfig::new(
                MapSource::Grid { rows, cols: rows + 1, spacing },
                router,
                buffer,
                preset("high").unwrap(),
            );
            c.seed = seed;
            c.tick = tick;
            c.groups[1].count = g2;
            c.groups[0].region = Some(Region::bbox(crate::map::GeoPoint::new(lo, lo), crate::map::GeoPoint::new(hi, hi)).unwrap());
            c.traffic.interval_max = 31.5;
            let back = load_config(&c.to_text()).unwrap().remove(0);
            prop_assert_eq!(back, c);
        }
    }
}
