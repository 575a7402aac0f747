//! Synchronous client that times each call from its own clock.

use std::io::{self, BufReader, Write};
use std::net::{SocketAddr, TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::protocol::{decode_response, encode, read_frame, Frame, Request, RequestBody, Response};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("cannot connect to {addr}: {source}")]
    Connect { addr: String, source: io::Error },
    #[error("no response within {0:?}")]
    Timeout(Duration),
    #[error("connection closed by server")]
    Closed,
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("unreadable response: {0}")]
    Protocol(String),
}

/// A response together with the caller-side round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub response: Response,
    /// Receive time minus send time on the client clock.
    pub e2e_ms: f64,
}

pub struct Client {
    writer: TcpStream,
    reader: BufReader<TcpStream>,
    timeout: Duration,
    epoch: Instant,
    next_id: u64,
}

impl Client {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Self, ClientError> {
        Self::connect_with_timeout(addr, DEFAULT_TIMEOUT)
    }

    pub fn connect_with_timeout<A: ToSocketAddrs>(addr: A, timeout: Duration) -> Result<Self, ClientError> {
        let addrs: Vec<SocketAddr> = addr
            .to_socket_addrs()
            .map_err(|source| ClientError::Connect {
                addr: "<unresolved>".into(),
                source,
            })?
            .collect();
        let mut last = io::Error::new(io::ErrorKind::InvalidInput, "no address");
        for a in &addrs {
            match TcpStream::connect_timeout(a, timeout) {
                Ok(stream) => {
                    stream.set_nodelay(true)?;
                    stream.set_read_timeout(Some(timeout))?;
                    let reader = BufReader::new(stream.try_clone()?);
                    return Ok(Self {
                        writer: stream,
                        reader,
                        timeout,
                        epoch: Instant::now(),
                        next_id: 0,
                    });
                }
                Err(e) => last = e,
            }
        }
        Err(ClientError::Connect {
            addr: addrs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
            source: last,
        })
    }

    /// A request with a fresh id and the current client timestamp.
    pub fn request(&mut self, body: RequestBody) -> Request {
        self.next_id += 1;
        Request {
            id: format!("r{}", self.next_id),
            body,
            sent_at: Some(self.epoch.elapsed().as_millis() as u64),
        }
    }

    /// Writes one frame and returns the instant it left.
    pub fn send(&mut self, request: &Request) -> Result<Instant, ClientError> {
        self.send_raw(&encode(request))
    }

    /// Writes an arbitrary line, for probing the server with bad frames.
    pub fn send_raw(&mut self, line: &str) -> Result<Instant, ClientError> {
        let mut buf = Vec::with_capacity(line.len() + 1);
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
        let sent = Instant::now();
        self.writer.write_all(&buf)?;
        Ok(sent)
    }

    /// Reads the next response frame.
    pub fn receive(&mut self) -> Result<Response, ClientError> {
        match read_frame(&mut self.reader, usize::MAX) {
            Ok(Some(Frame::Line(line))) => decode_response(&line).map_err(|e| ClientError::Protocol(e.to_string())),
            Ok(Some(_)) => Err(ClientError::Protocol("response is not UTF-8".into())),
            Ok(None) => Err(ClientError::Closed),
            Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => {
                Err(ClientError::Timeout(self.timeout))
            }
            Err(e) => Err(e.into()),
        }
    }

    /// One trial: send, wait for the matching response, time it.
    pub fn call(&mut self, body: RequestBody) -> Result<Reply, ClientError> {
        let req = self.request(body);
        self.call_request(&req)
    }

    pub fn call_request(&mut self, request: &Request) -> Result<Reply, ClientError> {
        let sent = self.send(request)?;
        loop {
            let response = self.receive()?;
            if response.id.as_deref() == Some(request.id.as_str()) {
                return Ok(Reply {
                    response,
                    e2e_ms: sent.elapsed().as_secs_f64() * 1000.0,
                });
            }
        }
    }
}
