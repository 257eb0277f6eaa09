use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Serialize)]
pub struct CliError {
    #[serde(rename = "error")]
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        Self { kind: "usage", message }
    }
    pub fn config(message: String) -> Self {
        Self { kind: "invalid_config", message }
    }
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self { kind: "io", message: format!("{}: {e}", path.display()) }
    }
}

impl From<png_det::Error> for CliError {
    fn from(e: png_det::Error) -> Self {
        use png_det::Error::*;
        let kind = match &e {
            InvalidParams(_) | OutOfRange(_) | Shape(_) => "invalid_params",
            Quadrature(_) | Singular | IllConditioned { .. } | Disagreement(_) => "numerical",
            SizeGuard { .. } => "size_guard",
            Invariant(_) => "invariant",
        };
        Self { kind, message: e.to_string() }
    }
}

/// Flags override the config file, which overrides the defaults each
/// command applies afterwards. Unknown config keys are rejected.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Value>) -> Result<T, CliError> {
    let mut merged = config.and_then(Value::as_object).cloned().unwrap_or_default();
    let flags = serde_json::to_value(&flags).map_err(|e| CliError::config(e.to_string()))?;
    for (k, v) in flags.as_object().into_iter().flatten() {
        if !v.is_null() {
            merged.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::config(e.to_string()))
}

/// Seed precedence: flag or config, then PNG_DET_SEED, then the default.
pub fn seed_or_default(seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("PNG_DET_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::config(format!("PNG_DET_SEED is not an integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub workers: usize,
    pub code_version: String,
    pub started_unix: Option<f64>,
    pub finished_unix: Option<f64>,
    pub outputs: Vec<String>,
    #[serde(skip)]
    timestamps: bool,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl RunManifest {
    pub fn start(timestamps: bool) -> Self {
        Self {
            subcommand: String::new(),
            config: Value::Null,
            config_sha256: String::new(),
            seed: None,
            workers: 0,
            code_version: env!("CARGO_PKG_VERSION").into(),
            started_unix: timestamps.then(now),
            finished_unix: None,
            outputs: Vec::new(),
            timestamps,
        }
    }

    pub fn finish(&mut self, name: &str, config: Value, workers: usize, out: Option<&Path>) {
        self.subcommand = name.into();
        self.seed = config.get("seed").or_else(|| config.get("experiment")?.get("seed")).and_then(Value::as_u64);
        self.config_sha256 = hex(&Sha256::digest(config.to_string().as_bytes()));
        self.config = config;
        self.workers = workers;
        self.outputs = vec![out.map_or("-".into(), |p| p.display().to_string())];
        if self.timestamps {
            self.finished_unix = Some(now());
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub enum Output {
    Json(Value),
    /// CSV body; the manifest goes on a leading `#` line.
    Csv(String),
    /// Human-readable lines plus a JSON payload written only with --out.
    Lines(Vec<String>, Value),
}

impl Output {
    pub fn emit(&self, manifest: &RunManifest, out: Option<&Path>) -> Result<(), CliError> {
        let man = serde_json::to_value(manifest).map_err(|e| CliError::config(e.to_string()))?;
        let text = match self {
            Output::Json(v) => pretty(&json!({ "manifest": man, "result": v })),
            Output::Csv(body) => format!("# manifest: {man}\n{body}"),
            Output::Lines(lines, v) => {
                for l in lines {
                    println!("{l}");
                }
                if out.is_none() {
                    return Ok(());
                }
                pretty(&json!({ "manifest": man, "result": v }))
            }
        };
        match out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::config(e.to_string()))
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
