use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, SyncSender, TrySendError};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::protocol::{decode_inbound, encode};
use super::{BridgeError, InboundMessage, OutboundMessage, TerrainLink};

/// Depth of the outbound and inbound queues, messages.
pub const QUEUE_DEPTH: usize = 256;

const POLL_INTERVAL: Duration = Duration::from_millis(20);

#[derive(Debug, Default)]
struct Counters {
    dropped_out: AtomicU64,
    dropped_in: AtomicU64,
    rejected_in: AtomicU64,
}

/// TCP server speaking the line protocol to one terrain client at a time.
///
/// The control side never blocks: outbound lines are dropped when the client
/// falls behind, and inbound messages are read from a queue.
pub struct BridgeEndpoint {
    addr: SocketAddr,
    out_tx: SyncSender<String>,
    in_rx: Receiver<InboundMessage>,
    counters: Arc<Counters>,
    shutdown: Arc<AtomicBool>,
    acceptor: Option<JoinHandle<()>>,
}

impl BridgeEndpoint {
    pub fn bind(addr: &str) -> Result<Self, BridgeError> {
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let (out_tx, out_rx) = mpsc::sync_channel::<String>(QUEUE_DEPTH);
        let (in_tx, in_rx) = mpsc::sync_channel::<InboundMessage>(QUEUE_DEPTH);
        let counters = Arc::new(Counters::default());
        let shutdown = Arc::new(AtomicBool::new(false));
        let out_rx = Arc::new(Mutex::new(out_rx));

        let acceptor = {
            let counters = Arc::clone(&counters);
            let shutdown = Arc::clone(&shutdown);
            thread::spawn(move || {
                while !shutdown.load(Ordering::Relaxed) {
                    match listener.accept() {
                        Ok((stream, _)) => {
                            serve_client(stream, &out_rx, &in_tx, &counters, &shutdown);
                        }
                        Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                            thread::sleep(POLL_INTERVAL);
                        }
                        Err(_) => thread::sleep(POLL_INTERVAL),
                    }
                }
            })
        };

        Ok(Self {
            addr,
            out_tx,
            in_rx,
            counters,
            shutdown,
            acceptor: Some(acceptor),
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Outbound messages dropped because the queue was full.
    pub fn dropped_outbound(&self) -> u64 {
        self.counters.dropped_out.load(Ordering::Relaxed)
    }

    /// Inbound messages dropped because the control side was not draining.
    pub fn dropped_inbound(&self) -> u64 {
        self.counters.dropped_in.load(Ordering::Relaxed)
    }

    /// Inbound lines that failed to decode.
    pub fn rejected_inbound(&self) -> u64 {
        self.counters.rejected_in.load(Ordering::Relaxed)
    }
}

impl Drop for BridgeEndpoint {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        if let Some(handle) = self.acceptor.take() {
            let _ = handle.join();
        }
    }
}

fn serve_client(
    stream: TcpStream,
    out_rx: &Arc<Mutex<Receiver<String>>>,
    in_tx: &SyncSender<InboundMessage>,
    counters: &Arc<Counters>,
    shutdown: &Arc<AtomicBool>,
) {
    let _ = stream.set_nonblocking(false);
    let _ = stream.set_read_timeout(Some(POLL_INTERVAL));
    let _ = stream.set_nodelay(true);
    let Ok(read_half) = stream.try_clone() else {
        return;
    };
    let closed = Arc::new(AtomicBool::new(false));

    let reader = {
        let in_tx = in_tx.clone();
        let counters = Arc::clone(counters);
        let shutdown = Arc::clone(shutdown);
        let closed = Arc::clone(&closed);
        thread::spawn(move || {
            let mut reader = BufReader::new(read_half);
            let mut line = String::new();
            while !shutdown.load(Ordering::Relaxed) && !closed.load(Ordering::Relaxed) {
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if line.ends_with('\n') {
                            match decode_inbound(&line) {
                                Ok(msg) => {
                                    if let Err(TrySendError::Full(_)) = in_tx.try_send(msg) {
                                        counters.dropped_in.fetch_add(1, Ordering::Relaxed);
                                    }
                                }
                                Err(_) => {
                                    counters.rejected_in.fetch_add(1, Ordering::Relaxed);
                                }
                            }
                            line.clear();
                        }
                    }
                    Err(e)
                        if matches!(
                            e.kind(),
                            std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
                        ) => {}
                    Err(_) => break,
                }
            }
            closed.store(true, Ordering::Relaxed);
        })
    };

    let mut writer = stream;
    while !shutdown.load(Ordering::Relaxed) && !closed.load(Ordering::Relaxed) {
        let next = match out_rx.lock() {
            Ok(rx) => rx.recv_timeout(POLL_INTERVAL),
            Err(_) => break,
        };
        match next {
            Ok(line) => {
                if writer.write_all(line.as_bytes()).is_err() {
                    break;
                }
            }
            Err(RecvTimeoutError::Timeout) => {}
            Err(RecvTimeoutError::Disconnected) => break,
        }
    }
    closed.store(true, Ordering::Relaxed);
    let _ = writer.shutdown(std::net::Shutdown::Both);
    let _ = reader.join();
}

impl TerrainLink for BridgeEndpoint {
    fn send(&mut self, msg: &OutboundMessage) -> Result<(), BridgeError> {
        match self.out_tx.try_send(encode(msg)?) {
            Ok(()) => {}
            Err(TrySendError::Full(_)) | Err(TrySendError::Disconnected(_)) => {
                self.counters.dropped_out.fetch_add(1, Ordering::Relaxed);
            }
        }
        Ok(())
    }

    fn poll(&mut self) -> Vec<InboundMessage> {
        self.in_rx.try_iter().collect()
    }
}
