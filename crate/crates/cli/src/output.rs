use std::fs;
use std::path::{Path, PathBuf};

use honeycomb_core::recoupling::CacheSnapshot;
use honeycomb_core::{Engine, Error, QParam};
use serde_json::{json, Value};

fn cache_file(dir: &Path, p: QParam) -> PathBuf {
    let name = match p {
        QParam::Classical => "recoupling-classical.json".to_string(),
        QParam::RootOfUnity(r) => format!("recoupling-quantum-r{r}.json"),
    };
    dir.join(name)
}

/// A private memoized engine, warmed from the cache directory if one is set.
pub fn load_engine(p: QParam, cache: Option<&Path>) -> Result<Engine, Error> {
    let engine = Engine::fresh(p, true);
    if let Some(dir) = cache {
        let file = cache_file(dir, p);
        if file.exists() {
            let snap: CacheSnapshot = serde_json::from_slice(&fs::read(&file)?)?;
            match engine.restore(&snap) {
                Ok(_) => {}
                // a stale cache is rebuilt rather than trusted
                Err(e) => eprintln!("ignoring cache {}: {e}", file.display()),
            }
        }
    }
    Ok(engine)
}

pub fn save_engine(engine: &Engine, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let file = cache_file(dir, engine.param());
    let tmp = file.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(&engine.snapshot())?)?;
    fs::rename(&tmp, &file)?;
    Ok(())
}

pub fn conventions() -> Value {
    json!({
        "zero_handling": "A_ij = 0 when either evaluation is 0, including the diagonal",
        "tie_breaking": "equal row sums keep ascending configuration index",
        "entry": "|conj(e_i) e_j|^2 / max(|e_i|^4, |e_j|^4) = min(|e|^2) / max(|e|^2)",
        "row_sums": "f64 accumulation; exact rationals in the classical backend",
        "config_order": "multisets by total multiplicity, then lexicographic cycle ids",
        "delta": "Delta_n = (-1)^n [n+1]",
    })
}

/// Writes `data` to `dir/name` and a `name.meta.json` sidecar next to it.
pub fn write_with_meta(dir: &Path, name: &str, data: &[u8], meta: Value) -> Result<PathBuf, Error> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, data)?;
    let mut full = json!({
        "tool": "honeycomb",
        "version": env!("CARGO_PKG_VERSION"),
        "file": name,
        "conventions": conventions(),
    });
    if let (Some(obj), Value::Object(extra)) = (full.as_object_mut(), meta) {
        obj.extend(extra);
    }
    fs::write(
        dir.join(format!("{name}.meta.json")),
        serde_json::to_vec_pretty(&full)?,
    )?;
    Ok(path)
}

/// Prints a line to stdout, exiting quietly if the reader has gone away.
pub fn emit(line: impl std::fmt::Display) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}
