use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::thread;

use super::{BridgeError, PatternCatalog, Session};
use crate::sim::WorldConfig;

/// TCP front end: one thread and one [`Session`] per connection.
#[derive(Debug)]
pub struct BridgeServer {
    listener: TcpListener,
    cfg: WorldConfig,
    catalog: Arc<PatternCatalog>,
}

impl BridgeServer {
    pub fn bind(addr: impl ToSocketAddrs, cfg: WorldConfig, catalog: PatternCatalog) -> Result<Self, BridgeError> {
        cfg.validate().map_err(crate::sim::SimError::from)?;
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            cfg,
            catalog: Arc::new(catalog),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until the listener fails.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            let session = Session::new(self.cfg.clone(), Arc::clone(&self.catalog));
            thread::spawn(move || {
                let _ = handle_connection(stream, session);
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> thread::JoinHandle<io::Result<()>> {
        thread::spawn(move || self.run())
    }
}

fn handle_connection(stream: TcpStream, session: Session) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_stream(reader, stream, session)
}

/// Serves one session over any line-oriented stream until `close` or EOF.
pub fn serve_stream<R: BufRead, W: Write>(reader: R, mut writer: W, mut session: Session) -> io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (reply, close) = session.handle_line(&line);
        writer.write_all(reply.to_line().as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        if close {
            break;
        }
    }
    Ok(())
}

/// Serves a single session over standard input and output.
pub fn serve_stdio(cfg: WorldConfig, catalog: PatternCatalog) -> Result<(), BridgeError> {
    cfg.validate().map_err(crate::sim::SimError::from)?;
    let session = Session::new(cfg, Arc::new(catalog));
    let stdin = io::stdin();
    serve_stream(stdin.lock(), io::stdout().lock(), session)?;
    Ok(())
}
