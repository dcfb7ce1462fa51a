//! `--config FILE`: a JSON object `{"command": "...", "<flag>": value, ...}`
//! parsed through the same flag definitions as the command line.

use std::path::Path;

use clap::Parser;
use serde_json::Value;

use crate::args::{Cli, Command};
use crate::{CliError, CliResult};

pub enum Resolve {
    Clap(clap::Error),
    Failed(CliError),
}

impl From<CliError> for Resolve {
    fn from(e: CliError) -> Self {
        Resolve::Failed(e)
    }
}

pub fn resolve(cli: Cli) -> Result<Command, Resolve> {
    match (cli.config, cli.command) {
        (None, Some(c)) => Ok(c),
        (None, None) => Err(CliError::Usage("no subcommand given; see --help".into()).into()),
        (Some(_), Some(_)) => Err(CliError::Usage("give either a subcommand or --config, not both".into()).into()),
        (Some(path), None) => {
            let argv = config_argv(&path)?;
            let parsed = Cli::try_parse_from(argv).map_err(Resolve::Clap)?;
            parsed.command.ok_or_else(|| CliError::Usage("config names no command".into()).into())
        }
    }
}

fn config_argv(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    let command = match map.get("command") {
        Some(Value::String(c)) => c.clone(),
        _ => return Err(CliError::Usage("config needs a string field \"command\"".into())),
    };
    let mut argv = vec!["gabordual".to_string(), command];
    for (key, v) in map.iter().filter(|(k, _)| k.as_str() != "command") {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => argv.push(flag),
            Value::Number(n) => argv.extend([flag, n.to_string()]),
            Value::String(s) => argv.extend([flag, s.clone()]),
            _ => return Err(CliError::Usage(format!("config field {key:?} must be a scalar"))),
        }
    }
    Ok(argv)
}
