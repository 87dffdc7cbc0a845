use std::fs;
use std::path::Path;

use anyhow::Context;
use orthosep_core::invariants::{expand_set, set_chen, set_tm, set_tm2};
use orthosep_core::{Field, InvariantSet, Manifest, Member, Poly};
use serde::Serialize;

use crate::commands::Failure;
use crate::{Expect, SetArgs, SetChoice};

/// Expected verdicts for a set, where there are any.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Claim {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separating: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal: Option<bool>,
}

impl Claim {
    pub fn is_empty(&self) -> bool {
        self.separating.is_none() && self.minimal.is_none()
    }
}

pub fn default_claim(choice: SetChoice, field: &Field, m: usize) -> Claim {
    let q = field.q();
    let yes = Claim {
        separating: Some(true),
        minimal: Some(true),
    };
    let no = Claim {
        separating: Some(false),
        minimal: None,
    };
    match choice {
        SetChoice::Tm => yes,
        SetChoice::Tm2 if q == 2 || m == 1 => yes,
        SetChoice::Tm2 => no,
        // a generating set in characteristic 2
        SetChoice::Chen if field.p() == 2 => Claim {
            separating: Some(true),
            minimal: None,
        },
        SetChoice::Chen | SetChoice::File => Claim::default(),
        SetChoice::T1Expanded if m == 1 => yes,
        SetChoice::T1Expanded => no,
    }
}

pub fn claim_for(expect: Expect, choice: SetChoice, field: &Field, m: usize) -> Claim {
    match expect {
        Expect::Auto => default_claim(choice, field, m),
        Expect::Separating => Claim {
            separating: Some(true),
            minimal: None,
        },
        Expect::NotSeparating => Claim {
            separating: Some(false),
            minimal: None,
        },
        Expect::Minimal => Claim {
            separating: Some(true),
            minimal: Some(true),
        },
        Expect::None => Claim::default(),
    }
}

pub fn build(field: &Field, m: usize, args: &SetArgs) -> Result<InvariantSet, Failure> {
    let set = match args.set {
        SetChoice::Tm => set_tm(m, field)?,
        SetChoice::Tm2 => set_tm2(m, field)?,
        SetChoice::Chen => set_chen(m, field)?,
        SetChoice::T1Expanded => expand_set(&set_tm(1, field)?, m)?,
        SetChoice::File => {
            let path = args
                .set_file
                .as_deref()
                .ok_or_else(|| Failure::Config("--set file needs --set-file".into()))?;
            load(field, m, path)?
        }
    };
    Ok(set)
}

/// Reads a manifest (JSON object) or a list of polynomials, one per line,
/// with `#` comments.
pub fn load(field: &Field, m: usize, path: &Path) -> Result<InvariantSet, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let manifest: Manifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))?;
        if manifest.q != field.q() || manifest.m != m {
            return Err(Failure::Config(format!(
                "manifest is for q={} m={}, requested q={} m={m}",
                manifest.q,
                manifest.m,
                field.q()
            )));
        }
        return Ok(InvariantSet::from_manifest(&manifest, field)?);
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "custom".into());
    let mut set = InvariantSet::new(name, m, field);
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let poly = Poly::parse(field, m, line)
            .map_err(|e| Failure::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        set.push(Member {
            descriptor: None,
            poly,
        })?;
    }
    Ok(set)
}
