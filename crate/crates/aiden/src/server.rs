//! The offload server: many connections, one queue, one worker.
//!
//! Every frame read from any connection is stamped with a global arrival
//! sequence number and pushed onto a single channel under the same lock, so
//! queue order is arrival order. A single worker thread drains the channel,
//! which makes completion order equal to arrival order.

use std::collections::HashMap;
use std::io::{self, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use aiden_core::{
    detect, guidance_tick, normalized_center_distance, select_target, step_camera, BackendProfile,
    CameraPose, Detection, FunctionKind, GuidanceConfig, GuidanceState,
};

use crate::fixtures::{FixtureStore, OCR_PROMPT, VQA_PROMPT};
use crate::protocol::{
    decode_request, encode, read_frame, ErrorCode, Frame, GuidanceResult, Outcome, Pose, Request,
    RequestBody, Response, ResultBody, MAX_FRAME_BYTES,
};
use crate::scene::World;
use crate::ws;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Latency profile, already scaled.
    pub profile: BackendProfile,
    pub world: World,
    pub fixtures: FixtureStore,
    pub seed: u64,
    pub guidance: GuidanceConfig,
    /// Camera step applied by a guide request carrying a direction.
    pub step_deg: f64,
    /// Directory served over plain HTTP on the socket-upgrade port.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            profile: BackendProfile::measured(),
            world: World::demo(),
            fixtures: FixtureStore::builtin(),
            seed: 0,
            guidance: GuidanceConfig::default(),
            step_deg: 2.0,
            ui_dir: None,
        }
    }
}

/// Who sent a frame, in which position it arrived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub seq: u64,
    pub conn: u64,
    pub id: Option<String>,
}

/// Where a connection's responses go.
#[derive(Clone)]
pub(crate) enum Sink {
    Tcp(Arc<TcpStream>),
    Channel(Sender<String>),
}

impl Sink {
    fn send(&self, line: String) {
        match self {
            Sink::Tcp(stream) => {
                let mut s = &**stream;
                let _ = s.write_all(line.as_bytes()).and_then(|_| s.write_all(b"\n"));
            }
            Sink::Channel(tx) => {
                let _ = tx.send(line);
            }
        }
    }
}

enum Work {
    Frame(Frame),
    Closed,
    Stop,
}

struct Job {
    seq: u64,
    conn: u64,
    arrived: Instant,
    work: Work,
    sink: Option<Sink>,
}

struct Queue {
    next_seq: u64,
    tx: Sender<Job>,
}

pub(crate) struct Shared {
    queue: Mutex<Queue>,
    arrivals: Mutex<Vec<LogEntry>>,
    completions: Mutex<Vec<LogEntry>>,
    stop: AtomicBool,
    next_conn: AtomicU64,
    open: Mutex<HashMap<u64, TcpStream>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn frame_id(frame: &Frame) -> Option<String> {
    match frame {
        Frame::Line(line) => decode_request(line).map(|r| Some(r.id)).unwrap_or_else(|e| e.id),
        _ => None,
    }
}

impl Shared {
    pub(crate) fn stopping(&self) -> bool {
        self.stop.load(Ordering::SeqCst)
    }

    pub(crate) fn register(&self, stream: Option<&TcpStream>) -> u64 {
        let conn = self.next_conn.fetch_add(1, Ordering::SeqCst);
        if let Some(clone) = stream.and_then(|s| s.try_clone().ok()) {
            lock(&self.open).insert(conn, clone);
        }
        conn
    }

    pub(crate) fn enqueue_frame(&self, conn: u64, frame: Frame, sink: &Sink) {
        let id = frame_id(&frame);
        let mut q = lock(&self.queue);
        let seq = q.next_seq;
        q.next_seq += 1;
        lock(&self.arrivals).push(LogEntry { seq, conn, id });
        let _ = q.tx.send(Job {
            seq,
            conn,
            arrived: Instant::now(),
            work: Work::Frame(frame),
            sink: Some(sink.clone()),
        });
    }

    pub(crate) fn closed(&self, conn: u64) {
        lock(&self.open).remove(&conn);
        let q = lock(&self.queue);
        let _ = q.tx.send(Job {
            seq: u64::MAX,
            conn,
            arrived: Instant::now(),
            work: Work::Closed,
            sink: None,
        });
    }
}

/// A running server. Dropping it shuts it down.
pub struct ServerHandle {
    addr: SocketAddr,
    ws_addr: Option<SocketAddr>,
    shared: Arc<Shared>,
    threads: Vec<JoinHandle<()>>,
}

/// Binds the framed-protocol port and, if given, the socket-upgrade port, and starts serving.
pub fn serve<A: ToSocketAddrs>(
    addr: A,
    ws_addr: Option<A>,
    config: ServerConfig,
) -> io::Result<ServerHandle> {
    config
        .profile
        .validate()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    if !(config.step_deg > 0.0 && config.step_deg.is_finite()) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "step must be positive"));
    }
    let listener = TcpListener::bind(addr)?;
    let ws_listener = ws_addr.map(TcpListener::bind).transpose()?;

    let (tx, rx) = mpsc::channel();
    let shared = Arc::new(Shared {
        queue: Mutex::new(Queue { next_seq: 0, tx }),
        arrivals: Mutex::new(Vec::new()),
        completions: Mutex::new(Vec::new()),
        stop: AtomicBool::new(false),
        next_conn: AtomicU64::new(0),
        open: Mutex::new(HashMap::new()),
    });

    let mut handle = ServerHandle {
        addr: listener.local_addr()?,
        ws_addr: ws_listener.as_ref().map(|l| l.local_addr()).transpose()?,
        shared: Arc::clone(&shared),
        threads: Vec::new(),
    };

    let ui_dir = config.ui_dir.clone();
    let worker_shared = Arc::clone(&shared);
    handle
        .threads
        .push(thread::spawn(move || Worker::new(config, worker_shared).run(rx)));

    let tcp_shared = Arc::clone(&shared);
    handle.threads.push(thread::spawn(move || {
        accept_loop(listener, tcp_shared, serve_tcp)
    }));

    if let Some(l) = ws_listener {
        let ws_shared = Arc::clone(&shared);
        handle.threads.push(thread::spawn(move || {
            accept_loop(l, ws_shared, move |stream, shared| {
                ws::serve_connection(stream, shared, ui_dir.as_deref())
            })
        }));
    }
    Ok(handle)
}

fn accept_loop<F>(listener: TcpListener, shared: Arc<Shared>, handler: F)
where
    F: Fn(TcpStream, Arc<Shared>) + Clone + Send + 'static,
{
    for stream in listener.incoming() {
        if shared.stopping() {
            break;
        }
        let Ok(stream) = stream else { continue };
        let shared = Arc::clone(&shared);
        let handler = handler.clone();
        thread::spawn(move || handler(stream, shared));
    }
}

fn serve_tcp(stream: TcpStream, shared: Arc<Shared>) {
    let _ = stream.set_nodelay(true);
    let conn = shared.register(Some(&stream));
    let Ok(read_half) = stream.try_clone() else {
        shared.closed(conn);
        return;
    };
    let sink = Sink::Tcp(Arc::new(stream));
    let mut reader = BufReader::new(read_half);
    while !shared.stopping() {
        match read_frame(&mut reader, MAX_FRAME_BYTES) {
            Ok(Some(frame)) => shared.enqueue_frame(conn, frame, &sink),
            Ok(None) | Err(_) => break,
        }
    }
    shared.closed(conn);
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn ws_addr(&self) -> Option<SocketAddr> {
        self.ws_addr
    }

    /// Frames in the order they entered the queue.
    pub fn arrivals(&self) -> Vec<LogEntry> {
        lock(&self.shared.arrivals).clone()
    }

    /// Frames in the order the worker finished them.
    pub fn completions(&self) -> Vec<LogEntry> {
        lock(&self.shared.completions).clone()
    }

    /// Stops accepting, closes every connection and waits for the worker.
    /// Returns the number of frames processed.
    pub fn shutdown(mut self) -> usize {
        self.stop_threads();
        lock(&self.shared.completions).len()
    }

    /// Blocks until the server stops on its own, which it never does; for the CLI.
    pub fn wait(mut self) {
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }

    fn stop_threads(&mut self) {
        if self.threads.is_empty() {
            return;
        }
        self.shared.stop.store(true, Ordering::SeqCst);
        for addr in [Some(self.addr), self.ws_addr].into_iter().flatten() {
            let _ = TcpStream::connect_timeout(&addr, Duration::from_secs(1));
        }
        for (_, s) in lock(&self.shared.open).drain() {
            let _ = s.shutdown(std::net::Shutdown::Both);
        }
        {
            let q = lock(&self.shared.queue);
            let _ = q.tx.send(Job {
                seq: u64::MAX,
                conn: u64::MAX,
                arrived: Instant::now(),
                work: Work::Stop,
                sink: None,
            });
        }
        for t in self.threads.drain(..) {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_threads();
    }
}

struct Session {
    target: u8,
    pose: CameraPose,
    state: GuidanceState,
    ticks: u64,
    started: Instant,
}

struct Worker {
    config: ServerConfig,
    shared: Arc<Shared>,
    sessions: HashMap<u64, Session>,
}

type Handled = (Outcome, Option<FunctionKind>);

fn failure(code: ErrorCode, message: impl Into<String>) -> Handled {
    (
        Outcome::Error {
            code,
            message: message.into(),
        },
        None,
    )
}

fn success(result: ResultBody, kind: FunctionKind) -> Handled {
    (Outcome::Ok { result }, Some(kind))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn sleep_s(s: f64) {
    if s > 0.0 && s.is_finite() {
        thread::sleep(Duration::from_secs_f64(s));
    }
}

impl Worker {
    fn new(config: ServerConfig, shared: Arc<Shared>) -> Self {
        Self {
            config,
            shared,
            sessions: HashMap::new(),
        }
    }

    fn run(mut self, rx: Receiver<Job>) {
        for job in rx {
            match job.work {
                Work::Stop => break,
                Work::Closed => {
                    self.sessions.remove(&job.conn);
                }
                Work::Frame(frame) => {
                    let start = Instant::now();
                    let queue_ms = ms(start.duration_since(job.arrived));
                    let (id, (outcome, kind)) = self.handle(job.conn, job.seq, frame);
                    let scheduled_s = kind.map_or(0.0, |k| {
                        self.config.profile.scheduled(k, self.config.seed, job.seq)
                    });
                    sleep_s(scheduled_s);
                    let server_ms = ms(start.elapsed());
                    lock(&self.shared.completions).push(LogEntry {
                        seq: job.seq,
                        conn: job.conn,
                        id: id.clone(),
                    });
                    sleep_s(self.config.profile.scheduled_overhead(self.config.seed, job.seq));
                    let response = Response {
                        id,
                        seq: job.seq,
                        outcome,
                        queue_ms,
                        server_ms,
                        scheduled_ms: scheduled_s * 1000.0,
                    };
                    if let Some(sink) = job.sink {
                        sink.send(encode(&response));
                    }
                }
            }
        }
    }

    fn handle(&mut self, conn: u64, seq: u64, frame: Frame) -> (Option<String>, Handled) {
        let line = match frame {
            Frame::Line(line) => line,
            Frame::TooLong => {
                let msg = format!("frame exceeds {MAX_FRAME_BYTES} bytes");
                return (None, failure(ErrorCode::FrameTooLong, msg));
            }
            Frame::NotUtf8 => return (None, failure(ErrorCode::MalformedFrame, "frame is not UTF-8")),
        };
        match decode_request(&line) {
            Ok(req) => {
                let id = Some(req.id.clone());
                (id, self.dispatch(conn, seq, req))
            }
            Err(e) => (e.id, failure(e.code, e.message)),
        }
    }

    fn pose(&self, pose: Option<Pose>) -> CameraPose {
        let base = self.config.world.camera;
        match pose {
            Some(p) => base.looking_at(aiden_core::sim::wrap_deg(p.pan_deg), aiden_core::sim::wrap_deg(p.tilt_deg)),
            None => base,
        }
    }

    fn dispatch(&mut self, conn: u64, seq: u64, req: Request) -> Handled {
        let world = &self.config.world;
        match req.body {
            RequestBody::FindObject { target_class, pose } => {
                let Some(class) = target_class.resolve() else {
                    return failure(ErrorCode::UnknownClass, format!("unknown class {target_class}"));
                };
                let detections: Vec<Detection> =
                    detect(&world.objects, &self.pose(pose), &world.frame, &world.noise, seq)
                        .into_iter()
                        .filter(|d| d.class_id == class)
                        .collect();
                success(ResultBody::FindObject { detections }, FunctionKind::FindObject)
            }
            RequestBody::SceneDescribe { fixture, question } => match self.config.fixtures.get(&fixture) {
                Some(text) => success(
                    ResultBody::SceneDescribe {
                        text: text.to_owned(),
                        prompt: question.unwrap_or_else(|| VQA_PROMPT.to_owned()),
                    },
                    FunctionKind::SceneDescribe,
                ),
                None => failure(ErrorCode::UnknownFixture, format!("unknown fixture {fixture:?}")),
            },
            RequestBody::Ocr { fixture } => match self.config.fixtures.get(&fixture) {
                Some(text) => success(
                    ResultBody::Ocr {
                        text: text.to_owned(),
                        prompt: OCR_PROMPT.to_owned(),
                    },
                    FunctionKind::Ocr,
                ),
                None => failure(ErrorCode::UnknownFixture, format!("unknown fixture {fixture:?}")),
            },
            RequestBody::Guide {
                target_class,
                direction,
                pose,
            } => {
                let Some(class) = target_class.resolve() else {
                    return failure(ErrorCode::UnknownClass, format!("unknown class {target_class}"));
                };
                let start_pose = self.pose(pose);
                let session = self.sessions.entry(conn).or_insert_with(|| Session {
                    target: class,
                    pose: start_pose,
                    state: GuidanceState::default(),
                    ticks: 0,
                    started: Instant::now(),
                });
                if session.target != class {
                    session.target = class;
                    session.state = GuidanceState::default();
                }
                if pose.is_some() {
                    session.pose = start_pose;
                }
                if let Some(dir) = direction {
                    match step_camera(&session.pose, dir, self.config.step_deg) {
                        Ok(p) => session.pose = p,
                        Err(e) => return failure(ErrorCode::BadRequest, e.to_string()),
                    }
                }
                let detections = detect(
                    &world.objects,
                    &session.pose,
                    &world.frame,
                    &world.noise,
                    session.ticks,
                );
                session.ticks += 1;
                let now_ms = req
                    .sent_at
                    .unwrap_or_else(|| session.started.elapsed().as_millis() as u64);
                let (state, events) = guidance_tick(
                    &detections,
                    class,
                    &world.frame,
                    &session.state,
                    &self.config.guidance,
                    now_ms,
                );
                session.state = state;
                let distance =
                    select_target(&detections, class).map(|d| normalized_center_distance(d, &world.frame));
                success(
                    ResultBody::Guide(GuidanceResult {
                        phase: session.state.phase,
                        distance,
                        events,
                        pose: Pose {
                            pan_deg: session.pose.pan_deg,
                            tilt_deg: session.pose.tilt_deg,
                        },
                        detections,
                    }),
                    FunctionKind::FindObject,
                )
            }
        }
    }
}
