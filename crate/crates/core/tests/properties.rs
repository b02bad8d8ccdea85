use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dtnsim::analysis::repeated_receipts;
use dtnsim::contacts::detect;
use dtnsim::engine::{run, EventKind, EventRecord, MapSource, RunOutput, ScenarioConfig};
use dtnsim::map::{build_graph, generate_grid, restrict, shortest_path, GeoPoint, Polyline, Region};
use dtnsim::mobility::{advance, init_state, MobilityParams, MovementGraph};
use dtnsim::traffic::preset;
use dtnsim::{MessageId, NodeId, RouterKind};

fn point() -> impl Strategy<Value = GeoPoint> {
    (0.0f64..200.0, 0.0f64..200.0).prop_map(|(x, y)| GeoPoint::new(x, y))
}

fn polylines() -> impl Strategy<Value = Vec<Polyline>> {
    prop::collection::vec(prop::collection::vec(point(), 2..5), 1..8)
        .prop_map(|ls| ls.into_iter().filter_map(Polyline::new).collect())
}

fn router() -> impl Strategy<Value = RouterKind> {
    prop_oneof![
        Just(RouterKind::Epidemic),
        Just(RouterKind::Wave),
        Just(RouterKind::FirstContact),
        Just(RouterKind::DirectDelivery),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_keeps_total_length(lines in polylines()) {
        prop_assume!(!lines.is_empty());
        let g = build_graph(&lines, 0.0).unwrap();
        let input: f64 = lines.iter().map(|l| l.length()).sum();
        prop_assert!((g.total_length() - input).abs() <= 1e-6 * input.max(1.0));
    }

    #[test]
    fn restrict_is_idempotent(rows in 2usize..8, cols in 2usize..8, lo in 0.0f64..40.0, span in 10.0f64..80.0) {
        let g = generate_grid(rows, cols, 10.0).unwrap();
        let region = Region::bbox(GeoPoint::new(lo, lo), GeoPoint::new(lo + span, lo + span)).unwrap();
        if let Ok(once) = restrict(&g, &region) {
            let twice = restrict(&once, &region).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn grid_paths_are_manhattan(rows in 2usize..7, cols in 2usize..7, a in 0usize..49, b in 0usize..49) {
        let g = generate_grid(rows, cols, 5.0).unwrap();
        let n = rows * cols;
        prop_assert_eq!(g.edge_count(), 2 * rows * cols - rows - cols);
        let (a, b) = (a % n, b % n);
        let p = shortest_path(&g, a, b).unwrap();
        let (pa, pb) = (g.vertex(a), g.vertex(b));
        let manhattan = (pa.x - pb.x).abs() + (pa.y - pb.y).abs();
        prop_assert!((p.length - manhattan).abs() < 1e-9);
        prop_assert_eq!(p.vertices.first(), Some(&a));
        prop_assert_eq!(p.vertices.last(), Some(&b));
    }

    #[test]
    fn detection_matches_brute_force(pos in prop::collection::vec(point(), 0..120), range in 1.0f64..30.0) {
        let mut brute = Vec::new();
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                if pos[i].distance(pos[j]) <= range {
                    brute.push((NodeId(i as u32), NodeId(j as u32)));
                }
            }
        }
        prop_assert_eq!(detect(&pos, range), brute);
    }

    #[test]
    fn movement_is_continuous_confined_and_repeatable(seed in any::<u64>(), wait_max in 0.0f64..30.0) {
        let full = generate_grid(6, 6, 20.0).unwrap();
        let region = Region::bbox(GeoPoint::new(15.0, 15.0), GeoPoint::new(75.0, 75.0)).unwrap();
        let graph = MovementGraph::new(restrict(&full, &region).unwrap()).unwrap();
        let params = MobilityParams { wait_max, ..MobilityParams::default() };
        let trace = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = init_state(&graph, &params, &mut rng);
            let mut out = vec![(s.position(), s.leg_speed())];
            for _ in 0..1500 {
                advance(&mut s, 0.1, &graph, &params, &mut rng);
                out.push((s.position(), s.leg_speed()));
            }
            out
        };
        let a = trace(seed);
        for w in a.windows(2) {
            let ((p, v0), (q, v1)) = (w[0], w[1]);
            prop_assert!(p.distance(q) <= v0.max(v1) * 0.1 + 1e-6);
            prop_assert!(region.contains(q));
        }
        prop_assert_eq!(a, trace(seed));
    }
}

fn small_scenario(router: RouterKind, nodes: usize, buffer: u64, size: u64, seed: u64) -> ScenarioConfig {
    let map = MapSource::Grid {
        rows: 4,
        cols: 4,
        spacing: 12.0,
    };
    let mut traffic = preset("high").unwrap();
    traffic.size = size;
    traffic.window = 600.0;
    traffic.ttl = 400.0;
    let mut c = ScenarioConfig::new(map, router, buffer, traffic);
    c.end_time = 900.0;
    c.groups[0].count = 2;
    c.groups[1].count = nodes - 2;
    c.seed = seed;
    c
}

/// Checks the event-log contracts that hold for every router.
fn check_log(out: &RunOutput) -> Result<(), TestCaseError> {
    let cfg = &out.config;
    let recs = &out.records;
    prop_assert!(recs.windows(2).all(|w| w[0].time <= w[1].time));
    prop_assert!(out.occupancy.iter().all(|s| (0.0..=100.0).contains(&s.mean_occupancy_pct)));

    let mut created: HashMap<MessageId, f64> = HashMap::new();
    let mut open: HashMap<(MessageId, NodeId, NodeId), f64> = HashMap::new();
    let mut busy: HashMap<NodeId, (NodeId, NodeId)> = HashMap::new();
    let ticks_needed = cfg.traffic.size.div_ceil(cfg.link.bytes_per_tick(cfg.tick)) as f64;
    for r in recs {
        match (r.kind, r.to) {
            (EventKind::Create, _) => {
                created.insert(r.message, r.time);
            }
            (EventKind::SendStart, Some(to)) => {
                prop_assert!(created.contains_key(&r.message));
                for n in [r.from, to] {
                    if cfg.exclusive_receiver || n == r.from {
                        prop_assert!(!busy.contains_key(&n), "{n} double-booked at {}", r.time);
                    }
                }
                busy.insert(r.from, (r.from, to));
                if cfg.exclusive_receiver {
                    busy.insert(to, (r.from, to));
                }
                open.insert((r.message, r.from, to), r.time);
            }
            (EventKind::Received | EventKind::Aborted, Some(to)) => {
                let start = open.remove(&(r.message, r.from, to));
                prop_assert!(start.is_some(), "{r} without SEND_START");
                busy.retain(|_, job| *job != (r.from, to));
                if r.kind == EventKind::Received {
                    prop_assert!(r.time <= created[&r.message] + cfg.traffic.ttl + 1e-9, "{r} after ttl");
                    let took = r.time - start.unwrap();
                    prop_assert!(took >= (ticks_needed - 1.0) * cfg.tick - 1e-6, "{r} too fast");
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Replays buffers from the log and checks every DROP_BUFFER evicts the
/// oldest receipt, skipping a payload the node is still sending. Within the
/// tick its transfer ends, that payload may go too.
fn check_fifo(recs: &[EventRecord], n: usize) -> Result<(), TestCaseError> {
    let mut ends = HashMap::new();
    let mut open: HashMap<(MessageId, NodeId, NodeId), usize> = HashMap::new();
    for (i, r) in recs.iter().enumerate() {
        match (r.kind, r.to) {
            (EventKind::SendStart, Some(to)) => {
                open.insert((r.message, r.from, to), i);
            }
            (EventKind::Received | EventKind::Aborted, Some(to)) => {
                if let Some(s) = open.remove(&(r.message, r.from, to)) {
                    ends.insert(s, r.time);
                }
            }
            _ => {}
        }
    }
    let mut buf: Vec<VecDeque<MessageId>> = vec![VecDeque::new(); n];
    let mut sending: Vec<Option<(MessageId, f64)>> = vec![None; n];
    for (i, r) in recs.iter().enumerate() {
        let f = r.from.index();
        match (r.kind, r.to) {
            (EventKind::Create, _) => buf[f].push_back(r.message),
            (EventKind::Aborted, None) => buf[f].retain(|&m| m != r.message),
            (EventKind::SendStart, Some(_)) => {
                sending[f] = Some((r.message, ends.get(&i).copied().unwrap_or(f64::INFINITY)));
            }
            (EventKind::Received, Some(to)) => {
                sending[f] = None;
                buf[to.index()].push_back(r.message);
            }
            (EventKind::Aborted, Some(_)) => sending[f] = None,
            (EventKind::DropBuffer, _) => {
                let pinned = sending[f].map(|(m, _)| m);
                let oldest = buf[f].iter().copied().find(|&m| Some(m) != pinned);
                let ends_now = sending[f].is_some_and(|(_, end)| end <= r.time);
                let ok = oldest == Some(r.message) || (ends_now && buf[f].front() == Some(&r.message));
                prop_assert!(ok, "at {}: expected {:?}", r, oldest);
                buf[f].retain(|&m| m != r.message);
            }
            (EventKind::DropTtl | EventKind::DropCustody, _) => buf[f].retain(|&m| m != r.message),
            _ => {}
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn engine_contracts(
        router in router(),
        nodes in 3usize..12,
        slots in 1u64..6,
        size in prop_oneof![Just(2064u64), 2064u64..400_000],
        exclusive in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut cfg = small_scenario(router, nodes, size * slots, size, seed);
        cfg.exclusive_receiver = exclusive;
        let out = run(&cfg).unwrap();
        check_log(&out)?;
        if router != RouterKind::FirstContact {
            check_fifo(&out.records, nodes)?;
        }
        if router == RouterKind::Wave {
            prop_assert!(repeated_receipts(&out.records).is_empty());
        }
        prop_assert_eq!(out.event_log(), run(&cfg).unwrap().event_log());
    }

    #[test]
    fn routers_agree_without_eviction(nodes in 3usize..12, seed in any::<u64>()) {
        let e = run(&small_scenario(RouterKind::Epidemic, nodes, 10_000_000, 2064, seed)).unwrap();
        prop_assume!(e.count(EventKind::DropBuffer) == 0);
        let w = run(&small_scenario(RouterKind::Wave, nodes, 10_000_000, 2064, seed)).unwrap();
        prop_assert_eq!(e.event_log(), w.event_log());
    }
}
