//! Browser-facing port: the framed protocol over a WebSocket upgrade, and
//! plain HTTP for the static steering page.
//!
//! Each text message may carry one or more newline-separated request frames;
//! each response goes out as its own text message.

use std::io::{self, Cursor, Read, Write};
use std::net::TcpStream;
use std::path::{Component, Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Duration;

use tungstenite::{Message, WebSocket};

use crate::protocol::{read_frame, Frame, MAX_FRAME_BYTES};
use crate::server::{Shared, Sink};

const MAX_HEADER_BYTES: usize = 16 * 1024;
const POLL: Duration = Duration::from_millis(10);

/// A stream that replays already-read bytes before reading on.
struct Prefixed {
    head: Cursor<Vec<u8>>,
    stream: TcpStream,
}

impl Read for Prefixed {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        if (self.head.position() as usize) < self.head.get_ref().len() {
            return self.head.read(buf);
        }
        self.stream.read(buf)
    }
}

impl Write for Prefixed {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.stream.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.stream.flush()
    }
}

fn read_head(stream: &mut TcpStream) -> io::Result<Vec<u8>> {
    let mut head = Vec::new();
    let mut chunk = [0u8; 1024];
    while !head.windows(4).any(|w| w == b"\r\n\r\n") {
        if head.len() > MAX_HEADER_BYTES {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "header too large"));
        }
        let n = stream.read(&mut chunk)?;
        if n == 0 {
            return Err(io::ErrorKind::UnexpectedEof.into());
        }
        head.extend_from_slice(&chunk[..n]);
    }
    Ok(head)
}

fn is_upgrade(head: &str) -> bool {
    head.lines().any(|l| {
        let l = l.to_ascii_lowercase();
        l.starts_with("upgrade:") && l.contains("websocket")
    })
}

pub(crate) fn serve_connection(mut stream: TcpStream, shared: Arc<Shared>, ui_dir: Option<&Path>) {
    let _ = stream.set_read_timeout(Some(Duration::from_secs(10)));
    let Ok(head) = read_head(&mut stream) else { return };
    let text = String::from_utf8_lossy(&head).into_owned();
    if is_upgrade(&text) {
        let Ok(raw) = stream.try_clone() else { return };
        let conn = shared.register(Some(&raw));
        if let Ok(ws) = tungstenite::accept(Prefixed {
            head: Cursor::new(head),
            stream,
        }) {
            run_socket(ws, raw, conn, &shared);
        }
        shared.closed(conn);
    } else {
        let _ = serve_static(&mut stream, &text, ui_dir);
    }
}

fn run_socket(mut ws: WebSocket<Prefixed>, raw: TcpStream, conn: u64, shared: &Shared) {
    let (tx, rx) = mpsc::channel::<String>();
    let sink = Sink::Channel(tx);
    let _ = raw.set_read_timeout(Some(POLL));
    while !shared.stopping() {
        match ws.read() {
            Ok(Message::Text(text)) => {
                let mut reader = io::BufReader::new(text.as_bytes());
                while let Ok(Some(frame)) = read_frame(&mut reader, MAX_FRAME_BYTES) {
                    shared.enqueue_frame(conn, frame, &sink);
                }
            }
            Ok(Message::Binary(_)) => shared.enqueue_frame(conn, Frame::NotUtf8, &sink),
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e))
                if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {}
            Err(_) => break,
        }
        for line in rx.try_iter() {
            if ws.send(Message::text(line)).is_err() {
                return;
            }
        }
    }
    let _ = ws.close(None);
    let _ = ws.flush();
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "html" | "htm" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript; charset=utf-8",
        "css" => "text/css; charset=utf-8",
        "json" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "wasm" => "application/wasm",
        _ => "application/octet-stream",
    }
}

/// Maps a request path inside `root`, refusing anything that escapes it.
fn resolve(root: &Path, target: &str) -> Option<PathBuf> {
    let path = target.split(['?', '#']).next().unwrap_or("/");
    let rel = Path::new(path.trim_start_matches('/'));
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return None;
    }
    let mut full = root.join(rel);
    if full.is_dir() {
        full.push("index.html");
    }
    full.is_file().then_some(full)
}

fn serve_static(stream: &mut TcpStream, head: &str, ui_dir: Option<&Path>) -> io::Result<()> {
    let mut parts = head.lines().next().unwrap_or("").split_whitespace();
    let method = parts.next().unwrap_or("");
    let target = parts.next().unwrap_or("/");
    let found = match (method, ui_dir) {
        ("GET" | "HEAD", Some(root)) => resolve(root, target),
        _ => None,
    };
    let (status, ctype, body) = match found.and_then(|p| std::fs::read(&p).ok().map(|b| (p, b))) {
        Some((path, body)) => ("200 OK", content_type(&path), body),
        None => ("404 Not Found", "text/plain; charset=utf-8", b"not found\n".to_vec()),
    };
    write!(
        stream,
        "HTTP/1.1 {status}\r\nContent-Type: {ctype}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    )?;
    if method != "HEAD" {
        stream.write_all(&body)?;
    }
    stream.flush()
}
