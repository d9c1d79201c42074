use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The JSON report: resolved config, payload, and a hash over both.
pub fn envelope(command: &str, config: &Value, payload: &Value) -> Value {
    let body = json!({ "command": command, "config": config, "payload": payload });
    let hash = sha256_hex(&serde_json::to_vec(&body).expect("json values serialize"));
    json!({
        "tool": "isomwalk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "payload": payload,
        "sha256": hash,
    })
}

/// Where a command writes its files. Without an output directory only the
/// JSON report is produced, on stdout.
pub struct Sink {
    dir: Option<PathBuf>,
    command: String,
    config: Value,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, command: &str, config: Value) -> std::io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink {
            dir,
            command: command.to_string(),
            config,
            written: Vec::new(),
        })
    }

    fn path(&self, ext: &str) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}.{ext}", self.command)))
    }

    /// CSV preceded by `#` lines carrying the config and the body hash.
    pub fn csv_text(&mut self, body: &str) -> std::io::Result<()> {
        let Some(path) = self.path("csv") else {
            return Ok(());
        };
        let mut f = fs::File::create(&path)?;
        writeln!(
            f,
            "# isomwalk {} {}",
            self.command,
            env!("CARGO_PKG_VERSION")
        )?;
        writeln!(f, "# config: {}", serde_json::to_string(&self.config)?)?;
        writeln!(f, "# sha256: {}", sha256_hex(body.as_bytes()))?;
        f.write_all(body.as_bytes())?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv_rows<T: Serialize>(
        &mut self,
        rows: impl IntoIterator<Item = T>,
    ) -> std::io::Result<()> {
        if self.dir.is_none() {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(std::io::Error::other)?;
        }
        let body = String::from_utf8(
            w.into_inner()
                .map_err(|e| std::io::Error::other(e.to_string()))?,
        )
        .expect("csv output is utf-8");
        self.csv_text(&body)
    }

    pub fn svg(&mut self, body: &str) -> std::io::Result<()> {
        let Some(path) = self.path("svg") else {
            return Ok(());
        };
        let hash = sha256_hex(body.as_bytes());
        let meta = serde_json::to_string(&json!({ "config": self.config, "sha256": hash }))?;
        let text = body.replacen(
            "<!--metadata-->",
            &format!("<metadata>{}</metadata>", xml_escape(&meta)),
            1,
        );
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    /// Writes the JSON report to the output directory and prints it.
    pub fn finish(mut self, payload: &Value) -> std::io::Result<Value> {
        let env = envelope(&self.command, &self.config, payload);
        let text = serde_json::to_string_pretty(&env)?;
        if let Some(path) = self.path("json") {
            fs::write(&path, format!("{text}\n"))?;
            self.written.push(path);
        }
        println!("{text}");
        Ok(env)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Scatter plot of `(x, y, mass)` on `[−w, w]²`. Opacity grows with the
/// logarithm of the mass, so darker dots carry more multiplicity.
pub fn scatter_svg(points: &[(f64, f64, f64)], window: f64) -> String {
    const SIZE: f64 = 600.0;
    let inside: Vec<_> = points
        .iter()
        .filter(|p| p.0.abs() <= window && p.1.abs() <= window && p.2 > 0.0)
        .collect();
    let (lo, hi) = inside.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        (lo.min(p.2), hi.max(p.2))
    });
    let span = (hi / lo).ln();
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<!--metadata-->\n<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    );
    let px = |v: f64| (v + window) / (2.0 * window) * SIZE;
    s.push_str(&format!(
        "<line x1=\"0\" y1=\"{c}\" x2=\"{SIZE}\" y2=\"{c}\" stroke=\"#ccc\"/>\n<line x1=\"{c}\" y1=\"0\" x2=\"{c}\" y2=\"{SIZE}\" stroke=\"#ccc\"/>\n",
        c = SIZE / 2.0
    ));
    for p in inside {
        let t = if span > 0.0 {
            (p.2 / lo).ln() / span
        } else {
            1.0
        };
        s.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.5\" fill=\"black\" fill-opacity=\"{:.3}\"/>\n",
            px(p.0),
            SIZE - px(p.1),
            0.1 + 0.9 * t
        ));
    }
    s.push_str("</svg>\n");
    s
}
