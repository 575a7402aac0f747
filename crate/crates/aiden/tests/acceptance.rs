//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use aiden::bench::{render_runtime_table, run_convergence, run_runtime_eval, trial_request, ConvergenceSpec, RuntimeStats, Trial};
use aiden::protocol::{
    decode_request, decode_response, encode, ErrorCode, GuidanceResult, Outcome, Response, ResultBody,
};
use aiden::{serve, ClassRef, Client, Pose, Request, RequestBody, ServerConfig, World};
use aiden_core::guidance::normalized_offsets;
use aiden_core::stats::{
    adjective_rating, cronbach_alpha, descriptive, spearman_rho, wilcoxon_signed_rank, Adjective, StatsError,
};
use aiden_core::{
    directional_command, haptic_tier, normalized_center_distance, project, step_camera, BBox, BackendProfile,
    CameraPose, Detection, DetectorNoise, Direction, FeedbackEvent, FrameGeometry, FunctionKind, GuidanceConfig,
    GuidancePhase, HapticTier, LatencyModel, PulsePattern, SceneObject,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

const CUP: u8 = 41;

fn frame() -> FrameGeometry {
    FrameGeometry::new(640, 480).unwrap()
}

fn pulse_tiers() -> Check {
    let cfg = GuidanceConfig::default();
    let expect = [
        (0.5, HapticTier::Peripheral, (200, 300, false)),
        (0.2, HapticTier::Approaching, (200, 100, false)),
        (0.05, HapticTier::Locked, (0, 0, true)),
    ];
    for (d, tier, (on, off, cont)) in expect {
        let (t, p) = haptic_tier(d, &cfg).map_err(|e| e.to_string())?;
        ensure!(t == tier, "d = {d}: tier {t:?}");
        ensure!((p.on_ms(), p.off_ms(), p.is_continuous()) == (on, off, cont), "d = {d}: {p:?}");
    }
    let phrases = [
        (Direction::Left, "Move camera to the left"),
        (Direction::Right, "Move camera to the right"),
        (Direction::Up, "Tilt up"),
        (Direction::Down, "Tilt down"),
    ];
    for (dir, text) in phrases {
        ensure!(dir.speech().as_bytes() == text.as_bytes(), "{dir:?}: {:?}", dir.speech());
        match FeedbackEvent::speech(dir) {
            FeedbackEvent::Speech { text: t, .. } => ensure!(t == text, "{dir:?} event text {t:?}"),
            other => return Err(format!("{other:?}")),
        }
    }
    Ok("(200,300) / (200,100) / continuous at d = 0.5 / 0.2 / 0.05; 4 phrases byte-exact".into())
}

fn inverse_frequency() -> Check {
    let cfg = GuidanceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ds: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..=1.0)).collect();
    ds.sort_by(|a, b| b.total_cmp(a));
    let periods: Vec<u32> = ds.iter().map(|d| haptic_tier(*d, &cfg).unwrap().1.period_ms()).collect();
    if let Some(i) = periods.windows(2).position(|w| w[1] > w[0]) {
        return Err(format!("period rises from {} to {} ms as d falls to {}", periods[i], periods[i + 1], ds[i + 1]));
    }
    let slow = PulsePattern::PERIPHERAL.frequency_hz();
    let fast = PulsePattern::APPROACHING.frequency_hz();
    ensure!(slow == Some(1.0 / 0.5), "peripheral {slow:?} Hz");
    ensure!(fast == Some(1.0 / 0.3), "approaching {fast:?} Hz");
    ensure!(format!("{:.2}", fast.unwrap()) == "3.33", "approaching {fast:?}");
    ensure!(PulsePattern::CONTINUOUS.frequency_hz().is_none(), "continuous has a frequency");
    Ok(format!("1000 distances monotone; {:.1} Hz and {:.2} Hz", slow.unwrap(), fast.unwrap()))
}

fn closed_loop() -> Check {
    let started = Instant::now();
    let mut spec = ConvergenceSpec::new(World::demo(), CUP, 2.0, (0..100).collect());
    spec.noise = DetectorNoise::noiseless(0);
    let clean = run_convergence(&spec).map_err(|e| e.to_string())?;
    spec.noise = DetectorNoise {
        dropout_prob: 0.10,
        pixel_sigma: 2.0,
        ..DetectorNoise::noiseless(0)
    };
    let noisy = run_convergence(&spec).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure!(clean.tick_budget == 200, "budget {}", clean.tick_budget);
    ensure!(clean.successes == 100, "noise-free {}/100 locked", clean.successes);
    ensure!(noisy.success_rate() >= 0.95, "noisy {}/100 locked", noisy.successes);
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "noise-free {}/100, noisy {}/100, {:.2} s",
        clean.successes,
        noisy.successes,
        elapsed.as_secs_f64()
    ))
}

fn direction_correctness() -> Check {
    let cfg = GuidanceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 1000 {
        let pose = CameraPose::default().looking_at(rng.random_range(-180.0..180.0), rng.random_range(-80.0..80.0));
        let obj = SceneObject::new(
            CUP,
            pose.pan_deg + rng.random_range(-34.0..34.0),
            pose.tilt_deg + rng.random_range(-26.0..26.0),
            rng.random_range(0.5..10.0),
        )
        .unwrap();
        let Some(det) = project(&obj, &pose, &frame(), 0.9) else { continue };
        if normalized_center_distance(&det, &frame()) < cfg.t_outer {
            continue;
        }
        let dir = directional_command(&det, &frame(), &cfg).ok_or("no command in coarse region")?;
        let next = step_camera(&pose, dir, 1.0).map_err(|e| e.to_string())?;
        let (bp, bt) = pose.offset_to(&obj);
        let (ap, at) = next.offset_to(&obj);
        let (before, after) = if dir.is_horizontal() { (bp, ap) } else { (bt, at) };
        ensure!(
            after.abs() < before.abs(),
            "{dir:?} from {pose:?} toward {obj:?}: {before} -> {after} (offsets {:?})",
            normalized_offsets(&det, &frame())
        );
        checked += 1;
    }
    Ok("1000 coarse placements, every 1 degree step shrinks the commanded offset".into())
}

fn fifo() -> Check {
    let mut profile = BackendProfile::zero();
    profile.find_object = LatencyModel::new(0.0002, 0.0002).unwrap();
    for rep in 0..100 {
        let server = serve("127.0.0.1:0", None, ServerConfig {
            profile,
            ..ServerConfig::default()
        })
        .map_err(|e| e.to_string())?;
        let addr = server.addr();
        let clients: Vec<_> = (0..5)
            .map(|k| {
                thread::spawn(move || {
                    let mut c = Client::connect(addr).unwrap();
                    let ids: Vec<String> = (0..10).map(|i| format!("c{k}-{i}")).collect();
                    for id in &ids {
                        c.send(&Request {
                            id: id.clone(),
                            body: RequestBody::FindObject {
                                target_class: ClassRef::Name("cup".into()),
                                pose: None,
                            },
                            sent_at: None,
                        })
                        .unwrap();
                    }
                    let got: Vec<String> = (0..10).map(|_| c.receive().unwrap().id.unwrap()).collect();
                    (ids, got)
                })
            })
            .collect();
        for c in clients {
            let (sent, got) = c.join().map_err(|_| "client thread panicked")?;
            ensure!(sent == got, "rep {rep}: replies {got:?} for {sent:?}");
        }
        let (arrivals, completions) = (server.arrivals(), server.completions());
        ensure!(completions.len() == 50, "rep {rep}: {} completions", completions.len());
        ensure!(arrivals == completions, "rep {rep}: completion order differs from arrival order");
    }
    Ok("100 repetitions of 5 x 10 requests, completion order == arrival order".into())
}

fn runtime_table() -> Check {
    let profile = BackendProfile::measured().scaled(0.01).map_err(|e| e.to_string())?;
    let server = serve("127.0.0.1:0", None, ServerConfig {
        profile,
        ..ServerConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let mut client = Client::connect(server.addr()).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (kind, paper_ms) in [
        (FunctionKind::SceneDescribe, 73.4),
        (FunctionKind::Ocr, 70.9),
        (FunctionKind::FindObject, 2.3),
    ] {
        let body = trial_request(kind, "street_sign", "cup".into());
        let stats = run_runtime_eval(&mut client, kind, &body, 20).map_err(|e| e.to_string())?;
        let model = profile.model(kind);
        ensure!((model.mean_s * 1000.0 - paper_ms).abs() < 1e-9, "{kind:?} profile mean {}", model.mean_s);
        let se = model.std_s / (stats.n as f64).sqrt();
        let off = (stats.server_mean_s - model.mean_s).abs();
        ensure!(stats.n == 20 && stats.valid, "{kind:?}: n = {}", stats.n);
        ensure!(
            off <= 3.0 * se,
            "{kind:?}: server mean {:.3} ms is {:.2} SE from {paper_ms} ms",
            stats.server_mean_s * 1000.0,
            off / se
        );
        if let Some(t) = stats.trials.iter().position(|t| t.e2e_s <= t.server_s) {
            return Err(format!("{kind:?}: trial {} has e2e <= server", t + 1));
        }
        notes.push(format!("{:.1} ms ({:.1} SE)", stats.server_mean_s * 1000.0, off / se));
        rows.push(stats);
    }
    print!("{}", render_runtime_table(&rows));
    Ok(format!("server means {}", notes.join(", ")))
}

fn fps_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let n = rng.random_range(1..=30);
        let trials: Vec<Trial> = (0..n)
            .map(|_| Trial {
                server_s: 0.01,
                queue_s: 0.0,
                e2e_s: rng.random_range(0.05..2.0),
            })
            .collect();
        let s = RuntimeStats::from_trials(FunctionKind::FindObject, trials, true).ok_or("no stats")?;
        ensure!(s.fps == Some(1.0 / s.e2e_mean_s), "fps {:?} vs 1/{}", s.fps, s.e2e_mean_s);
    }
    let one = Trial {
        server_s: 0.2,
        queue_s: 0.0,
        e2e_s: 0.51,
    };
    let s = RuntimeStats::from_trials(FunctionKind::FindObject, vec![one], true).ok_or("no stats")?;
    let fps = s.fps.ok_or("find object has no fps")?;
    ensure!(format!("{fps:.2}") == "1.96", "1/0.51 renders as {fps:.2}");
    ensure!(
        RuntimeStats::from_trials(FunctionKind::Ocr, vec![one], true).and_then(|s| s.fps).is_none(),
        "ocr row carries an fps"
    );
    Ok(format!("1000 random rows exact; 1/0.51 = {fps:.2} fps"))
}

fn all_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..5usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = (code % 5) as f64 + 1.0;
                    code /= 5;
                    v
                })
                .collect()
        })
        .collect()
}

fn statistics() -> Check {
    const TOL: f64 = 1e-9;
    let col = vec![1.0, 3.0, 2.0, 5.0, 4.0, 4.0, 2.0];
    let shifted: Vec<f64> = col.iter().map(|v| v + 1.0).collect();
    let a_dup = cronbach_alpha(&[col.clone(), col.clone(), col.clone()]).map_err(|e| e.to_string())?;
    let a_shift = cronbach_alpha(&[col.clone(), shifted.clone()]).map_err(|e| e.to_string())?;
    ensure!((a_dup - 1.0).abs() < TOL && (a_shift - 1.0).abs() < TOL, "alpha {a_dup} / {a_shift}");

    let w = wilcoxon_signed_rank(&col, &col).map_err(|e| e.to_string())?;
    ensure!((w.z, w.p) == (0.0, 1.0), "identical pairs give {w:?}");
    let up = spearman_rho(&col, &shifted).map_err(|e| e.to_string())?.rho;
    let down = spearman_rho(&col, &col.iter().map(|v| -v.powi(3)).collect::<Vec<_>>()).map_err(|e| e.to_string())?.rho;
    ensure!((up - 1.0).abs() < TOL && (down + 1.0).abs() < TOL, "rho {up} / {down}");

    let mut cases = 0usize;
    for n in 1..=5 {
        for v in all_vectors(n) {
            let d = descriptive(&v).map_err(|e| e.to_string())?;
            let (m, sd) = oracle::mean_sd(&v);
            let iqr = oracle::quantile(&v, 0.75) - oracle::quantile(&v, 0.25);
            ensure!(
                (d.mean - m).abs() < TOL && (d.sd - sd).abs() < TOL,
                "mean/sd of {v:?}"
            );
            ensure!(
                (d.median - oracle::median(&v)).abs() < TOL && (d.iqr - iqr).abs() < TOL,
                "median/iqr of {v:?}"
            );
            cases += 1;
        }
    }
    for n in 1..=5usize {
        for mut code in 0..9usize.pow(n as u32) {
            let diff: Vec<f64> = (0..n)
                .map(|_| {
                    let v = (code % 9) as f64 - 4.0;
                    code /= 9;
                    v
                })
                .collect();
            let b = vec![5.0; n];
            let a: Vec<f64> = diff.iter().map(|x| x + 5.0).collect();
            let w = wilcoxon_signed_rank(&a, &b).map_err(|e| e.to_string())?;
            match oracle::wilcoxon_z(&diff) {
                None => ensure!((w.z, w.p) == (0.0, 1.0), "all-zero differences {diff:?}"),
                Some(z) => ensure!(
                    (w.z - z).abs() < TOL && (w.p - oracle::normal_two_sided(z)).abs() < TOL,
                    "wilcoxon on {diff:?}: {w:?} vs z = {z}"
                ),
            }
            cases += 1;
        }
    }
    for n in 3..=5 {
        let ys = all_vectors(n);
        for x in ys.iter().filter(|x| x.windows(2).all(|w| w[0] <= w[1])) {
            for y in &ys {
                let want = oracle::pairwise_corr(&oracle::ranks(x), &oracle::ranks(y));
                match (spearman_rho(x, y), want) {
                    (Ok(r), Some(e)) => ensure!((r.rho - e).abs() < TOL, "rho {x:?} {y:?}"),
                    (Err(StatsError::Degenerate(_)), None) => {}
                    (got, want) => return Err(format!("{x:?} {y:?}: {got:?} vs {want:?}")),
                }
                cases += 1;
            }
        }
    }
    for a in all_vectors(3) {
        for b in all_vectors(3) {
            let cols = [a.clone(), b.clone()];
            if let Ok(v) = cronbach_alpha(&cols) {
                ensure!((v - oracle::alpha(&cols)).abs() < TOL, "alpha {cols:?}");
            }
            cases += 1;
        }
    }

    for (mean, label) in [(4.25, Adjective::Excellent), (3.86, Adjective::Good), (4.57, Adjective::Best)] {
        let got = adjective_rating(mean).map_err(|e| e.to_string())?;
        ensure!(got == label, "{mean} rated {got:?}");
    }
    Ok(format!("{cases} exhaustive cases within 1e-9; 4.25 Excellent, 3.86 Good, 4.57 Best"))
}

const CHARS: &[char] = &['a', 'Z', '0', ' ', '"', '\\', '/', '\n', '\r', '\t', '\u{0}', '\u{1f}', 'é', 'ß', '€', '😀', '\u{2028}', '{', '}', ':'];

fn text(rng: &mut ChaCha8Rng, max: usize) -> String {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| CHARS[rng.random_range(0..CHARS.len())]).collect()
}

fn float(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(-400.0..400.0),
        1 => 0.0,
        2 => -0.0,
        _ => loop {
            let v = f64::from_bits(rng.random());
            if v.is_finite() {
                break v;
            }
        },
    }
}

fn pose(rng: &mut ChaCha8Rng) -> Option<Pose> {
    rng.random_bool(0.5).then(|| Pose {
        pan_deg: float(rng),
        tilt_deg: float(rng),
    })
}

fn direction(rng: &mut ChaCha8Rng) -> Direction {
    Direction::ALL[rng.random_range(0..4)]
}

fn class_ref(rng: &mut ChaCha8Rng) -> ClassRef {
    match rng.random_range(0..3) {
        0 => ClassRef::Id(rng.random_range(-5..90)),
        1 => ClassRef::Id(rng.random()),
        _ => ClassRef::Name(["cup", "door", "person", "unicorn", ""][rng.random_range(0..5)].into()),
    }
}

fn request(rng: &mut ChaCha8Rng) -> Request {
    let fixture = |rng: &mut ChaCha8Rng| match rng.random_range(0..3) {
        0 => "street_sign".to_string(),
        1 => "blank".to_string(),
        _ => text(rng, 12),
    };
    let body = match rng.random_range(0..4) {
        0 => RequestBody::FindObject {
            target_class: class_ref(rng),
            pose: pose(rng),
        },
        1 => RequestBody::SceneDescribe {
            fixture: fixture(rng),
            question: rng.random_bool(0.5).then(|| text(rng, 30)),
        },
        2 => RequestBody::Ocr { fixture: fixture(rng) },
        _ => RequestBody::Guide {
            target_class: class_ref(rng),
            direction: rng.random_bool(0.5).then(|| direction(rng)),
            pose: pose(rng),
        },
    };
    Request {
        id: text(rng, 16),
        body,
        sent_at: rng.random_bool(0.5).then(|| rng.random()),
    }
}

fn detection(rng: &mut ChaCha8Rng) -> Detection {
    let (x, y) = (rng.random_range(0.0..600.0), rng.random_range(0.0..440.0));
    let (w, h) = (rng.random_range(0.1..40.0), rng.random_range(0.1..40.0));
    Detection::new(rng.random_range(0..81), rng.random_range(0.0..=1.0), BBox::new(x, y, x + w, y + h).unwrap()).unwrap()
}

fn response(rng: &mut ChaCha8Rng) -> Response {
    let detections = |rng: &mut ChaCha8Rng| (0..rng.random_range(0..4)).map(|_| detection(rng)).collect();
    let outcome = match rng.random_range(0..5) {
        0 => Outcome::Ok {
            result: ResultBody::FindObject { detections: detections(rng) },
        },
        1 => Outcome::Ok {
            result: ResultBody::Ocr {
                text: text(rng, 40),
                prompt: text(rng, 20),
            },
        },
        2 => Outcome::Ok {
            result: ResultBody::SceneDescribe {
                text: text(rng, 40),
                prompt: text(rng, 20),
            },
        },
        3 => {
            let phase = match rng.random_range(0..4) {
                0 => GuidancePhase::Searching,
                1 => GuidancePhase::Coarse(direction(rng)),
                2 => GuidancePhase::Approaching,
                _ => GuidancePhase::Locked,
            };
            let events = (0..rng.random_range(0..4))
                .map(|_| match rng.random_range(0..3) {
                    0 => FeedbackEvent::speech(direction(rng)),
                    1 => FeedbackEvent::Haptic([PulsePattern::PERIPHERAL, PulsePattern::APPROACHING, PulsePattern::CONTINUOUS][rng.random_range(0..3)]),
                    _ => FeedbackEvent::LockedTone,
                })
                .collect();
            Outcome::Ok {
                result: ResultBody::Guide(GuidanceResult {
                    phase,
                    distance: rng.random_bool(0.7).then(|| rng.random_range(0.0..=1.0)),
                    events,
                    pose: pose(rng).unwrap_or(Pose { pan_deg: 0.0, tilt_deg: 0.0 }),
                    detections: detections(rng),
                }),
            }
        }
        _ => Outcome::Error {
            code: [
                ErrorCode::MalformedFrame,
                ErrorCode::FrameTooLong,
                ErrorCode::BadRequest,
                ErrorCode::UnknownClass,
                ErrorCode::UnknownFixture,
            ][rng.random_range(0..5)],
            message: text(rng, 30),
        },
    };
    Response {
        id: rng.random_bool(0.8).then(|| text(rng, 12)),
        seq: rng.random(),
        outcome,
        queue_ms: rng.random_range(0.0..1e4),
        server_ms: rng.random_range(0.0..1e4),
        scheduled_ms: rng.random_range(0.0..1e4),
    }
}

fn fuzz_frame(rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut bytes = match rng.random_range(0..4) {
        0 => (0..rng.random_range(1..200)).map(|_| rng.random::<u8>()).collect(),
        1 | 2 => {
            let mut b = encode(&request(rng)).into_bytes();
            for _ in 0..rng.random_range(1..6) {
                if b.is_empty() {
                    break;
                }
                let i = rng.random_range(0..b.len());
                match rng.random_range(0..4) {
                    0 => b[i] = rng.random(),
                    1 => {
                        b.remove(i);
                    }
                    2 => b.insert(i, b"{}[]\",:0e-\\"[rng.random_range(0..11)]),
                    _ => b.truncate(i),
                }
            }
            b
        }
        _ => encode(&request(rng)).into_bytes(),
    };
    bytes.retain(|b| *b != b'\n');
    bytes
}

fn protocol() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let req = request(&mut rng);
        let line = encode(&req);
        ensure!(!line.contains('\n'), "newline in {line:?}");
        let back = decode_request(&line).map_err(|e| format!("{line}: {e:?}"))?;
        ensure!(back == req && encode(&back) == line, "request round trip {line}");
        let resp = response(&mut rng);
        let line = encode(&resp);
        let back = decode_response(&line).map_err(|e| format!("{line}: {e}"))?;
        ensure!(back == resp && encode(&back) == line, "response round trip {line}");
    }

    let server = serve("127.0.0.1:0", None, ServerConfig {
        profile: BackendProfile::zero(),
        ..ServerConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let raw = TcpStream::connect(server.addr()).map_err(|e| e.to_string())?;
    raw.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    let mut writer = raw.try_clone().unwrap();
    let mut reader = BufReader::new(raw);
    let mut answered = 0;
    for i in 0..10_000 {
        let frame = fuzz_frame(&mut rng);
        let blank = std::str::from_utf8(&frame).is_ok_and(|s| s.trim().is_empty());
        writer.write_all(&frame).and_then(|_| writer.write_all(b"\n")).map_err(|e| format!("frame {i}: {e}"))?;
        if blank {
            continue;
        }
        let mut line = String::new();
        reader.read_line(&mut line).map_err(|e| format!("frame {i}: {e}"))?;
        decode_response(line.trim_end()).map_err(|e| format!("frame {i}: reply {line:?}: {e}"))?;
        answered += 1;
    }
    let mut client = Client::connect(server.addr()).map_err(|e| e.to_string())?;
    let ok = client.call(RequestBody::Ocr { fixture: "street_sign".into() }).map_err(|e| e.to_string())?;
    ensure!(ok.response.is_ok(), "server unhealthy after fuzzing: {:?}", ok.response);
    ensure!(server.completions().len() == answered + 1, "{} completions for {answered} frames", server.completions().len());
    Ok(format!("20000 round trips exact; 10000 fuzzed frames, {answered} answered, server healthy"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("pulse-tier conformance", pulse_tiers),
        ("inverse-frequency property", inverse_frequency),
        ("closed-loop convergence", closed_loop),
        ("direction correctness", direction_correctness),
        ("fifo ordering", fifo),
        ("runtime table at scale 0.01", runtime_table),
        ("fps identity", fps_identity),
        ("statistics oracles", statistics),
        ("protocol robustness", protocol),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
