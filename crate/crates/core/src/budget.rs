//! Combinatorial limits shared by every enumeration.

use crate::error::{Error, Result};

pub const BUDGET_ENV: &str = "POLYWELL_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Faces (or activity patterns) produced by one enumeration.
    pub faces: usize,
    /// Sign vectors visited when enumerating graph orientations.
    pub orientations: usize,
    /// Supports or sign patterns visited by brute-force oracles.
    pub supports: usize,
    /// Generator pairs in Minkowski sums and expanded max-affine pieces.
    pub pieces: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            faces: 50_000,
            orientations: 1 << 20,
            supports: 1 << 24,
            pieces: 1 << 16,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            faces: usize::MAX,
            orientations: usize::MAX,
            supports: usize::MAX,
            pieces: usize::MAX,
        }
    }

    /// Accepts either a single integer applied to every key, or `key=value` pairs
    /// separated by commas (`faces=1000,orientations=64`).
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |m: String| Error::Format(format!("{BUDGET_ENV}: {m}"));
        if let Ok(n) = spec.parse::<usize>() {
            return Ok(Budget {
                faces: n,
                orientations: n,
                supports: n,
                pieces: n,
            });
        }
        let mut b = Budget::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| bad(format!("invalid number in {part:?}")))?;
            match k.trim() {
                "faces" => b.faces = v,
                "orientations" => b.orientations = v,
                "supports" => b.supports = v,
                "pieces" => b.pieces = v,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(b)
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(s) => Self::parse(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    pub(crate) fn check(resource: &'static str, limit: usize, used: usize) -> Result<()> {
        if used > limit {
            Err(Error::BudgetExceeded { resource, limit })
        } else {
            Ok(())
        }
    }
}
