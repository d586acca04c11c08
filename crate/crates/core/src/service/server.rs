use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use super::{Release, ServiceConfig, Session};
use crate::error::{Error, Result};

const ACCEPT_POLL: Duration = Duration::from_millis(5);
/// Quiet period after the release during which late lines still get
/// `ERR released` before the session closes.
const LINGER: Duration = Duration::from_millis(100);

struct Request {
    line: String,
    reply: Sender<Option<String>>,
}

/// Runs one session on the configured endpoint and returns its release.
pub fn serve(config: &ServiceConfig) -> Result<Release> {
    let mut session = Session::new(config)?;
    if config.is_stdin() {
        let stdin = io::stdin();
        let stdout = io::stdout();
        return serve_stream(&mut session, stdin.lock(), stdout.lock());
    }
    let listener = TcpListener::bind(&config.endpoint).map_err(|e| {
        Error::Io(io::Error::new(e.kind(), format!("cannot bind {}: {e}", config.endpoint)))
    })?;
    serve_listener(listener, session)
}

/// Answers every line of `input`; lines after the release are refused.
/// Fails if the input ends before a release happened.
pub fn serve_stream<R: BufRead, W: Write>(session: &mut Session, input: R, mut output: W) -> Result<Release> {
    for raw in input.split(b'\n') {
        let raw = raw?;
        if let Some(reply) = session.handle_line(&String::from_utf8_lossy(&raw)) {
            writeln!(output, "{reply}")?;
            output.flush()?;
        }
    }
    session.release().cloned().ok_or_else(|| {
        Error::Io(io::Error::new(io::ErrorKind::UnexpectedEof, "input ended before the release"))
    })
}

fn connection(stream: TcpStream, queue: Sender<Request>) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    let (reply_tx, reply_rx) = mpsc::channel();
    for raw in reader.split(b'\n') {
        let line = String::from_utf8_lossy(&raw?).into_owned();
        if queue.send(Request { line, reply: reply_tx.clone() }).is_err() {
            break;
        }
        match reply_rx.recv() {
            Ok(Some(reply)) => writeln!(writer, "{reply}")?,
            Ok(None) => {}
            Err(_) => break,
        }
    }
    Ok(())
}

/// Serves an already bound listener. Every connection gets its own reader
/// thread; all lines go through one queue and are applied in arrival order
/// by the calling thread, which owns the session.
pub fn serve_listener(listener: TcpListener, mut session: Session) -> Result<Release> {
    listener.set_nonblocking(true)?;
    let (queue_tx, queue_rx) = mpsc::channel::<Request>();
    let stop = Arc::new(AtomicBool::new(false));
    let acceptor = {
        let stop = Arc::clone(&stop);
        thread::spawn(move || {
            while !stop.load(Ordering::Relaxed) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        if stream.set_nonblocking(false).is_ok() {
                            let queue = queue_tx.clone();
                            thread::spawn(move || connection(stream, queue));
                        }
                    }
                    Err(_) => thread::sleep(ACCEPT_POLL),
                }
            }
        })
    };
    let answer = |session: &mut Session, req: Request| {
        let reply = session.handle_line(&req.line);
        let _ = req.reply.send(reply);
    };
    while !session.is_released() {
        match queue_rx.recv() {
            Ok(req) => answer(&mut session, req),
            Err(_) => break,
        }
    }
    stop.store(true, Ordering::Relaxed);
    loop {
        match queue_rx.recv_timeout(LINGER) {
            Ok(req) => answer(&mut session, req),
            Err(RecvTimeoutError::Timeout) | Err(RecvTimeoutError::Disconnected) => break,
        }
    }
    let _ = acceptor.join();
    session
        .release()
        .cloned()
        .ok_or_else(|| Error::Io(io::Error::other("listener closed before the release")))
}
