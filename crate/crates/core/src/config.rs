//! Protocol configuration: hierarchy size, named timing values, command
//! timing constraints and sliding-window rules.
//!
//! The text format is line oriented with four sections:
//!
//! ```text
//! # comments start with '#'
//! [hierarchy]
//! name = two-bank
//! ranks = 1
//! banks_per_rank = 2
//! time_unit = ck
//!
//! [timings]
//! tRCD = 11
//!
//! [constraints]
//! # scope, [from commands], [to commands], timing name or literal ticks
//! intra_bank, [ACT], [RD, WR, RDA, WRA], tRCD
//!
//! [windows]
//! # name, threshold N, length, group (rank | channel), [commands] or [*]
//! FAW, 4, tFAW, rank, [ACT]
//! ```
//!
//! Unknown sections, keys, scopes and commands are rejected.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::petri::{CommandKind, Coordinate};
use crate::timing::TimeStamp;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key `{0}` in [hierarchy]")]
    MissingKey(&'static str),
    #[error("`{0}` must be at least 1")]
    ZeroCount(&'static str),
    #[error("unresolved timing name `{0}`")]
    UnresolvedTiming(String),
    #[error("constraint #{0} has an empty command list")]
    EmptyCommandList(usize),
    #[error("window rule `{0}`: {1}")]
    InvalidWindow(String, String),
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

type ScopeFn = dyn Fn(&Coordinate, &Coordinate) -> bool + Send + Sync;

/// Decides whether a constraint applies between two transition coordinates.
#[derive(Clone)]
pub enum ScopePredicate {
    /// Same rank and same bank.
    IntraBank,
    /// Same rank, any pair of coordinates in it.
    IntraRank,
    /// Same rank, two different banks.
    InterBank,
    /// Different ranks.
    InterRank,
    AllPairs,
    Custom {
        name: String,
        func: Arc<ScopeFn>,
    },
}

impl ScopePredicate {
    pub fn custom(
        name: impl Into<String>,
        func: impl Fn(&Coordinate, &Coordinate) -> bool + Send + Sync + 'static,
    ) -> Self {
        ScopePredicate::Custom {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ScopePredicate::IntraBank => "intra_bank",
            ScopePredicate::IntraRank => "intra_rank",
            ScopePredicate::InterBank => "inter_bank",
            ScopePredicate::InterRank => "inter_rank",
            ScopePredicate::AllPairs => "all_pairs",
            ScopePredicate::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, from: &Coordinate, to: &Coordinate) -> bool {
        match self {
            ScopePredicate::IntraBank => {
                from.rank == to.rank && from.bank.is_some() && from.bank == to.bank
            }
            ScopePredicate::IntraRank => from.rank == to.rank,
            ScopePredicate::InterBank => match (from.bank, to.bank) {
                (Some(a), Some(b)) => from.rank == to.rank && a != b,
                _ => false,
            },
            ScopePredicate::InterRank => from.rank != to.rank,
            ScopePredicate::AllPairs => true,
            ScopePredicate::Custom { func, .. } => func(from, to),
        }
    }
}

impl fmt::Debug for ScopePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for ScopePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for ScopePredicate {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

/// Named scope predicates available to the parser beyond the built-ins.
#[derive(Clone, Default)]
pub struct ScopeRegistry {
    custom: HashMap<String, ScopePredicate>,
}

impl ScopeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        name: impl Into<String>,
        func: impl Fn(&Coordinate, &Coordinate) -> bool + Send + Sync + 'static,
    ) -> &mut Self {
        let name = name.into();
        self.custom
            .insert(name.clone(), ScopePredicate::custom(name, func));
        self
    }

    pub fn resolve(&self, name: &str) -> Option<ScopePredicate> {
        Some(match name {
            "intra_bank" => ScopePredicate::IntraBank,
            "intra_rank" => ScopePredicate::IntraRank,
            "inter_bank" => ScopePredicate::InterBank,
            "inter_rank" => ScopePredicate::InterRank,
            "all_pairs" => ScopePredicate::AllPairs,
            _ => return self.custom.get(name).cloned(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimingValue {
    Named(String),
    Literal(TimeStamp),
}

impl fmt::Display for TimingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimingValue::Named(name) => f.write_str(name),
            TimingValue::Literal(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandTimingConstraint {
    pub scope: ScopePredicate,
    pub from: Vec<CommandKind>,
    pub to: Vec<CommandKind>,
    pub value: TimingValue,
}

impl CommandTimingConstraint {
    pub fn new(
        scope: ScopePredicate,
        from: impl IntoIterator<Item = CommandKind>,
        to: impl IntoIterator<Item = CommandKind>,
        value: TimingValue,
    ) -> Self {
        Self {
            scope,
            from: from.into_iter().collect(),
            to: to.into_iter().collect(),
            value,
        }
    }
}

/// Which coordinates share one window counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowGroup {
    /// One counter per rank.
    Rank,
    /// One counter for the whole channel.
    Channel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub name: String,
    pub threshold: u32,
    pub length: TimingValue,
    pub group: WindowGroup,
    /// `None` watches every command.
    pub commands: Option<Vec<CommandKind>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub name: String,
    pub ranks: u32,
    pub banks_per_rank: u32,
    pub time_unit: String,
    pub timings: BTreeMap<String, TimeStamp>,
    pub windows: Vec<WindowSpec>,
    pub constraints: Vec<CommandTimingConstraint>,
}

impl ProtocolConfig {
    /// A config with no timing information.
    pub fn functional(ranks: u32, banks_per_rank: u32) -> Self {
        Self {
            name: format!("{ranks}x{banks_per_rank}"),
            ranks,
            banks_per_rank,
            time_unit: "ck".into(),
            timings: BTreeMap::new(),
            windows: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with(text, &ScopeRegistry::new())
    }

    pub fn parse_with(text: &str, scopes: &ScopeRegistry) -> Result<Self, ConfigError> {
        Parser::new(scopes).run(text)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_file_with(path, &ScopeRegistry::new())
    }

    pub fn from_file_with(
        path: impl AsRef<Path>,
        scopes: &ScopeRegistry,
    ) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_with(&text, scopes)
    }

    pub fn resolve(&self, value: &TimingValue) -> Result<TimeStamp, ConfigError> {
        match value {
            TimingValue::Literal(v) => Ok(*v),
            TimingValue::Named(name) => self
                .timings
                .get(name)
                .copied()
                .ok_or_else(|| ConfigError::UnresolvedTiming(name.clone())),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.ranks == 0 {
            return Err(ConfigError::ZeroCount("ranks"));
        }
        if self.banks_per_rank == 0 {
            return Err(ConfigError::ZeroCount("banks_per_rank"));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.from.is_empty() || c.to.is_empty() {
                return Err(ConfigError::EmptyCommandList(i));
            }
            self.resolve(&c.value)?;
        }
        for w in &self.windows {
            if w.threshold == 0 {
                return Err(ConfigError::InvalidWindow(
                    w.name.clone(),
                    "threshold must be at least 1".into(),
                ));
            }
            if self.resolve(&w.length)? == 0 {
                return Err(ConfigError::InvalidWindow(
                    w.name.clone(),
                    "length must be positive".into(),
                ));
            }
            if w.commands.as_ref().is_some_and(|c| c.is_empty()) {
                return Err(ConfigError::InvalidWindow(
                    w.name.clone(),
                    "empty command list".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Hierarchy,
    Timings,
    Constraints,
    Windows,
}

struct Parser<'a> {
    scopes: &'a ScopeRegistry,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(scopes: &'a ScopeRegistry) -> Self {
        Self { scopes, line: 0 }
    }

    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn run(mut self, text: &str) -> Result<ProtocolConfig, ConfigError> {
        let mut section = Section::None;
        let mut name = None;
        let mut ranks = None;
        let mut banks = None;
        let mut unit = None;
        let mut timings = BTreeMap::new();
        let mut constraints = Vec::new();
        let mut windows = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            self.line = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match header.trim() {
                    "hierarchy" => Section::Hierarchy,
                    "timings" => Section::Timings,
                    "constraints" => Section::Constraints,
                    "windows" => Section::Windows,
                    other => return Err(self.err(format!("unknown section [{other}]"))),
                };
                continue;
            }
            match section {
                Section::None => return Err(self.err("content before the first section")),
                Section::Hierarchy => {
                    let (key, value) = self.key_value(line)?;
                    let slot_taken = match key {
                        "name" => name.replace(value.to_string()).is_some(),
                        "time_unit" => unit.replace(value.to_string()).is_some(),
                        "ranks" => ranks.replace(self.number(value)? as u32).is_some(),
                        "banks_per_rank" => banks.replace(self.number(value)? as u32).is_some(),
                        other => return Err(self.err(format!("unknown key `{other}`"))),
                    };
                    if slot_taken {
                        return Err(self.err(format!("duplicate key `{key}`")));
                    }
                }
                Section::Timings => {
                    let (key, value) = self.key_value(line)?;
                    if !is_identifier(key) {
                        return Err(self.err(format!("invalid timing name `{key}`")));
                    }
                    let value = self.number(value)?;
                    if timings.insert(key.to_string(), value).is_some() {
                        return Err(self.err(format!("duplicate timing `{key}`")));
                    }
                }
                Section::Constraints => constraints.push(self.constraint(line)?),
                Section::Windows => windows.push(self.window(line)?),
            }
        }

        let config = ProtocolConfig {
            name: name.unwrap_or_else(|| "unnamed".into()),
            ranks: ranks.ok_or(ConfigError::MissingKey("ranks"))?,
            banks_per_rank: banks.ok_or(ConfigError::MissingKey("banks_per_rank"))?,
            time_unit: unit.unwrap_or_else(|| "ck".into()),
            timings,
            windows,
            constraints,
        };
        config.validate()?;
        Ok(config)
    }

    fn key_value<'l>(&self, line: &'l str) -> Result<(&'l str, &'l str), ConfigError> {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| self.err("expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(self.err("expected `key = value`"));
        }
        Ok((key, value))
    }

    fn number(&self, text: &str) -> Result<TimeStamp, ConfigError> {
        text.parse()
            .map_err(|_| self.err(format!("expected a non-negative integer, got `{text}`")))
    }

    fn value(&self, text: &str) -> Result<TimingValue, ConfigError> {
        if text.bytes().all(|b| b.is_ascii_digit()) && !text.is_empty() {
            Ok(TimingValue::Literal(self.number(text)?))
        } else if is_identifier(text) {
            Ok(TimingValue::Named(text.to_string()))
        } else {
            Err(self.err(format!("invalid timing value `{text}`")))
        }
    }

    /// Splits on top-level commas, keeping bracketed lists together.
    fn fields<'l>(&self, line: &'l str) -> Result<Vec<&'l str>, ConfigError> {
        let mut fields = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (i, ch) in line.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| self.err("unbalanced `]`"))?
                }
                ',' if depth == 0 => {
                    fields.push(line[start..i].trim());
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(self.err("unbalanced `[`"));
        }
        fields.push(line[start..].trim());
        Ok(fields)
    }

    fn command_list(&self, field: &str) -> Result<Option<Vec<CommandKind>>, ConfigError> {
        let inner = field
            .strip_prefix('[')
            .and_then(|f| f.strip_suffix(']'))
            .ok_or_else(|| self.err(format!("expected a bracketed command list, got `{field}`")))?
            .trim();
        if inner == "*" {
            return Ok(None);
        }
        let commands = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<CommandKind>()
                    .map_err(|e| self.err(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if commands.is_empty() {
            return Err(self.err("empty command list"));
        }
        Ok(Some(commands))
    }

    fn explicit_list(&self, field: &str) -> Result<Vec<CommandKind>, ConfigError> {
        self.command_list(field)?
            .ok_or_else(|| self.err("`*` is only allowed in window rules"))
    }

    fn constraint(&self, line: &str) -> Result<CommandTimingConstraint, ConfigError> {
        let fields = self.fields(line)?;
        let [scope, from, to, value] = fields[..] else {
            return Err(self.err("expected `scope, [from], [to], timing`"));
        };
        let scope = self
            .scopes
            .resolve(scope)
            .ok_or_else(|| self.err(format!("unknown scope `{scope}`")))?;
        Ok(CommandTimingConstraint {
            scope,
            from: self.explicit_list(from)?,
            to: self.explicit_list(to)?,
            value: self.value(value)?,
        })
    }

    fn window(&self, line: &str) -> Result<WindowSpec, ConfigError> {
        let fields = self.fields(line)?;
        let [name, threshold, length, group, commands] = fields[..] else {
            return Err(self.err("expected `name, N, length, group, [commands]`"));
        };
        if !is_identifier(name) {
            return Err(self.err(format!("invalid window name `{name}`")));
        }
        let group = match group {
            "rank" => WindowGroup::Rank,
            "channel" => WindowGroup::Channel,
            other => return Err(self.err(format!("unknown window group `{other}`"))),
        };
        Ok(WindowSpec {
            name: name.to_string(),
            threshold: self.number(threshold)? as u32,
            length: self.value(length)?,
            group,
            commands: self.command_list(commands)?,
        })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
[hierarchy]
name = sample
ranks = 1
banks_per_rank = 2
time_unit = ck

[timings]
tRCD = 11   # trailing comment
tFAW = 24

[constraints]
intra_bank, [ACT], [RD, WR, RDA, WRA], tRCD
inter_bank, [ACT], [ACT], 5

[windows]
FAW, 4, tFAW, rank, [ACT]
BUS, 1, 1, channel, [*]
";

    #[test]
    fn parses_sample() {
        let cfg = ProtocolConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.name, "sample");
        assert_eq!((cfg.ranks, cfg.banks_per_rank), (1, 2));
        assert_eq!(cfg.timings["tRCD"], 11);
        assert_eq!(cfg.constraints.len(), 2);
        let c = &cfg.constraints[0];
        assert_eq!(c.scope, ScopePredicate::IntraBank);
        assert_eq!(c.from, vec![CommandKind::ACT]);
        assert_eq!(
            c.to,
            vec![
                CommandKind::RD,
                CommandKind::WR,
                CommandKind::RDA,
                CommandKind::WRA
            ]
        );
        assert_eq!(c.value, TimingValue::Named("tRCD".into()));
        assert_eq!(cfg.constraints[1].value, TimingValue::Literal(5));
        assert_eq!(cfg.windows[0].group, WindowGroup::Rank);
        assert_eq!(cfg.windows[1].commands, None);
        assert_eq!(cfg.resolve(&cfg.windows[0].length).unwrap(), 24);
    }

    fn syntax_err(text: &str) -> String {
        match ProtocolConfig::parse(text) {
            Err(ConfigError::Syntax { message, .. }) => message,
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_things() {
        let base = "[hierarchy]\nranks = 1\nbanks_per_rank = 2\n";
        assert!(syntax_err(&format!("{base}colour = red\n")).contains("unknown key"));
        assert!(syntax_err(&format!("{base}[extras]\n")).contains("unknown section"));
        assert!(
            syntax_err(&format!("{base}[constraints]\nsame_bg, [ACT], [ACT], 4\n"))
                .contains("unknown scope")
        );
        assert!(syntax_err(&format!(
            "{base}[constraints]\nintra_bank, [ACT], [FOO], 4\n"
        ))
        .contains("FOO"));
        assert!(syntax_err("ranks = 1\n").contains("before the first section"));
        assert!(syntax_err(&format!("{base}ranks = 2\n")).contains("duplicate"));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            ProtocolConfig::parse("[hierarchy]\nranks = 0\nbanks_per_rank = 2\n"),
            Err(ConfigError::ZeroCount("ranks"))
        ));
        assert!(matches!(
            ProtocolConfig::parse("[hierarchy]\nranks = 1\n"),
            Err(ConfigError::MissingKey("banks_per_rank"))
        ));
        assert!(matches!(
            ProtocolConfig::parse(
                "[hierarchy]\nranks = 1\nbanks_per_rank = 1\n[constraints]\nintra_bank, [ACT], [RD], tXYZ\n"
            ),
            Err(ConfigError::UnresolvedTiming(name)) if name == "tXYZ"
        ));
        assert!(matches!(
            ProtocolConfig::parse(
                "[hierarchy]\nranks = 1\nbanks_per_rank = 1\n[windows]\nFAW, 0, 10, rank, [ACT]\n"
            ),
            Err(ConfigError::InvalidWindow(..))
        ));
        let msg = syntax_err("[hierarchy]\nranks = -1\n");
        assert!(msg.contains("non-negative"), "{msg}");
    }

    #[test]
    fn custom_scope_via_registry() {
        let text = "[hierarchy]\nranks = 2\nbanks_per_rank = 4\n[constraints]\nsame_bank_index, [ACT], [ACT], 3\n";
        assert!(ProtocolConfig::parse(text).is_err());
        let mut registry = ScopeRegistry::new();
        registry.register("same_bank_index", |a, b| {
            a.bank.is_some() && a.bank == b.bank && a.rank != b.rank
        });
        let cfg = ProtocolConfig::parse_with(text, &registry).unwrap();
        let scope = &cfg.constraints[0].scope;
        assert_eq!(scope.name(), "same_bank_index");
        assert!(scope.eval(&Coordinate::bank(0, 1), &Coordinate::bank(1, 1)));
        assert!(!scope.eval(&Coordinate::bank(0, 1), &Coordinate::bank(0, 1)));
    }

    #[test]
    fn scope_semantics() {
        let b00 = Coordinate::bank(0, 0);
        let b01 = Coordinate::bank(0, 1);
        let b10 = Coordinate::bank(1, 0);
        let r0 = Coordinate::rank(0);
        assert!(ScopePredicate::IntraBank.eval(&b00, &b00));
        assert!(!ScopePredicate::IntraBank.eval(&b00, &b01));
        assert!(!ScopePredicate::IntraBank.eval(&r0, &r0));
        assert!(!ScopePredicate::IntraBank.eval(&b00, &b10));
        assert!(ScopePredicate::InterBank.eval(&b00, &b01));
        assert!(!ScopePredicate::InterBank.eval(&b00, &b00));
        assert!(!ScopePredicate::InterBank.eval(&b00, &b10));
        assert!(!ScopePredicate::InterBank.eval(&b00, &r0));
        assert!(ScopePredicate::IntraRank.eval(&b00, &r0));
        assert!(ScopePredicate::IntraRank.eval(&b00, &b01));
        assert!(!ScopePredicate::IntraRank.eval(&b00, &b10));
        assert!(ScopePredicate::InterRank.eval(&b00, &b10));
        assert!(ScopePredicate::AllPairs.eval(&b00, &b10));
    }
}
