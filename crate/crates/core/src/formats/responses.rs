use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Response {
    Present,
    Absent,
}

impl Response {
    pub fn as_str(self) -> &'static str {
        match self {
            Response::Present => "present",
            Response::Absent => "absent",
        }
    }

    pub fn is_present(self) -> bool {
        self == Response::Present
    }
}

impl From<bool> for Response {
    fn from(present: bool) -> Self {
        if present {
            Response::Present
        } else {
            Response::Absent
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Response {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "present" => Ok(Response::Present),
            "absent" => Ok(Response::Absent),
            other => Err(format!("response must be 'present' or 'absent', got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRecord {
    pub trial_id: String,
    pub response: Response,
    /// Optional decision-variable value; carried along, never analysed.
    pub score: Option<f64>,
}

/// `trial_id,response[,score]` CSV: the boundary between any observer and
/// the analysis pipeline.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResponseFile {
    pub records: Vec<ResponseRecord>,
}

impl ResponseFile {
    pub fn new(records: Vec<ResponseRecord>) -> Self {
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_scores(&self) -> bool {
        self.records.iter().any(|r| r.score.is_some())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, path)
    }

    pub fn from_reader<R: Read>(reader: R, origin: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::parse(origin, 1, e.to_string()))?
            .clone();
        let names: Vec<&str> = headers.iter().collect();
        let with_score = match names.as_slice() {
            ["trial_id", "response"] => false,
            ["trial_id", "response", "score"] => true,
            _ => {
                return Err(Error::parse(
                    origin,
                    1,
                    format!(
                        "expected header 'trial_id,response' or 'trial_id,response,score', got '{}'",
                        names.join(",")
                    ),
                ))
            }
        };

        let mut records = Vec::new();
        for result in rdr.records() {
            let record = result.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(origin, line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize, name: &str| {
                record
                    .get(i)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::parse(origin, line, format!("missing field '{name}'")))
            };
            let trial_id = field(0, "trial_id")?.to_string();
            let response = field(1, "response")?
                .parse::<Response>()
                .map_err(|m| Error::parse(origin, line, m))?;
            let score = match record.get(2) {
                Some(s) if with_score && !s.is_empty() => Some(s.parse::<f64>().map_err(|e| {
                    Error::parse(origin, line, format!("bad score '{s}': {e}"))
                })?),
                Some(_) if !with_score => {
                    return Err(Error::parse(origin, line, "unexpected third column"))
                }
                _ => None,
            };
            if record.len() > 3 {
                return Err(Error::parse(origin, line, "too many columns"));
            }
            records.push(ResponseRecord {
                trial_id,
                response,
                score,
            });
        }
        Ok(Self { records })
    }

    pub fn to_writer<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let with_score = self.has_scores();
        if with_score {
            writeln!(w, "trial_id,response,score")?;
        } else {
            writeln!(w, "trial_id,response")?;
        }
        for r in &self.records {
            match (with_score, r.score) {
                (true, Some(s)) => writeln!(w, "{},{},{}", r.trial_id, r.response, s)?,
                (true, None) => writeln!(w, "{},{},", r.trial_id, r.response)?,
                (false, _) => writeln!(w, "{},{}", r.trial_id, r.response)?,
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.to_writer(&mut buf).expect("writing to memory");
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}
