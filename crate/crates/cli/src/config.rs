//! `--config FILE` support: each `key=value` line becomes `--key value`,
//! inserted ahead of the real arguments so that the command line wins.

use std::ffi::OsString;
use std::fs;

pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("--config: cannot read {}: {e}", path.to_string_lossy()))?;
    let mut injected = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("--config: line {} is not key=value: {raw}", i + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            return Err("--config: a config file cannot name another config file".into());
        }
        injected.push(OsString::from(format!("--{key}")));
        injected.push(OsString::from(value.trim()));
    }
    // argv[0] is the program and argv[1] the subcommand.
    let split = argv.len().min(2);
    let mut out: Vec<OsString> = argv[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[split..]);
    Ok(out)
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(OsString::from(v));
        }
    }
    None
}
