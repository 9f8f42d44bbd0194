//! Serializable summaries shared by the command-line tool and the C API.

use std::fmt::Write as _;

use serde::Serialize;

use crate::channel::{Mac, UserSet};
use crate::compat::{self, CompatFailure, RegionCheck, ShortcutResults, SubsetCheck};
use crate::error::Result;
use crate::oracle::OracleVerdict;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEntry {
    pub set: String,
    pub mask: u32,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub groups: Vec<String>,
    pub output_size: usize,
    pub rates: Vec<RateEntry>,
    pub sum_capacity: f64,
    /// Corner points of the dominant face, two users only.
    pub dominant_face: Option<[(f64, f64); 2]>,
}

impl RegionSummary {
    pub fn new(mac: &Mac) -> Self {
        let region = mac.region();
        Self {
            groups: mac.groups().iter().map(ToString::to_string).collect(),
            output_size: mac.output_size(),
            rates: region
                .entries
                .iter()
                .map(|&(s, bits)| RateEntry { set: s.to_string(), mask: s.mask(), bits })
                .collect(),
            sum_capacity: region.sum_capacity(),
            dominant_face: region.dominant_face_corners(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "groups: {}", self.groups.join(", "));
        let _ = writeln!(out, "outputs: {}", self.output_size);
        for r in &self.rates {
            let _ = writeln!(out, "I_{:<12} = {:.6} bits", r.set, r.bits);
        }
        let _ = writeln!(out, "sum capacity   = {:.6} bits", self.sum_capacity);
        if let Some([a, b]) = self.dominant_face {
            let _ = writeln!(
                out,
                "dominant face  : ({:.6}, {:.6}) -- ({:.6}, {:.6}), sum {:.6}",
                a.0,
                a.1,
                b.0,
                b.1,
                a.0 + a.1
            );
        }
        out
    }
}

/// One value of the witness `F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessEntry {
    pub xhat: String,
    pub y: String,
    pub phase_turns: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSummary {
    pub set: String,
    pub mask: u32,
    pub compatible: bool,
    pub stage: Option<&'static str>,
    pub failure: Option<String>,
    pub evidence: Option<CompatFailure>,
    pub witness: Option<Vec<WitnessEntry>>,
    pub shortcuts: ShortcutResults,
    pub shortcuts_agree: bool,
}

impl SubsetSummary {
    pub fn new(mac: &Mac, check: &SubsetCheck) -> Self {
        let (g1, g2) = reduced_groups(mac, check.set);
        let witness = check.report.witness().map(|w| {
            w.function()
                .entries()
                .map(|(x, y, v)| WitnessEntry {
                    xhat: g1.element_at(x).to_string(),
                    y: g2.element_at(y).to_string(),
                    phase_turns: compat::phase_turns(v),
                    re: v.re,
                    im: v.im,
                })
                .collect()
        });
        let failure = check.report.failure();
        Self {
            set: check.set.to_string(),
            mask: check.set.mask(),
            compatible: check.report.is_compatible(),
            stage: failure.map(CompatFailure::stage),
            failure: failure.map(ToString::to_string),
            evidence: failure.cloned(),
            witness,
            shortcuts: check.shortcuts.clone(),
            shortcuts_agree: check.shortcuts.agree_with(check.report.is_compatible()),
        }
    }
}

fn reduced_groups(mac: &Mac, set: UserSet) -> (crate::GroupSpec, crate::GroupSpec) {
    let pick = |s: UserSet| {
        crate::GroupSpec::product_of(s.members().map(|i| &mac.groups()[i])).expect("fits")
    };
    (pick(set), pick(set.complement(mac.users())))
}

/// Short form of a unit complex number.
fn unit_value(re: f64, im: f64, turns: f64) -> String {
    let near = |a: f64, b: f64| (a - b).abs() < 1e-9;
    match (re, im) {
        _ if near(re, 1.0) && near(im, 0.0) => "1".into(),
        _ if near(re, -1.0) && near(im, 0.0) => "-1".into(),
        _ if near(re, 0.0) && near(im, 1.0) => "i".into(),
        _ if near(re, 0.0) && near(im, -1.0) => "-i".into(),
        _ => format!("exp(2 pi i {turns:.6})"),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub preserved: bool,
    pub subsets: Vec<SubsetSummary>,
    pub tolerances: Tolerances,
}

impl CheckSummary {
    pub fn from_region(mac: &Mac, region: &RegionCheck, tol: &Tolerances) -> Self {
        Self {
            preserved: region.preserved(),
            subsets: region.subsets.iter().map(|c| SubsetSummary::new(mac, c)).collect(),
            tolerances: *tol,
        }
    }

    pub fn from_subset(mac: &Mac, check: &SubsetCheck, tol: &Tolerances) -> Self {
        Self {
            preserved: check.report.is_compatible(),
            subsets: vec![SubsetSummary::new(mac, check)],
            tolerances: *tol,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.subsets {
            let verdict = if s.compatible { "compatible" } else { "NOT compatible" };
            let _ = writeln!(out, "S = {}: {verdict}", s.set);
            if let Some(f) = &s.failure {
                let _ = writeln!(out, "  evidence: {f}");
            }
            if let Some(w) = &s.witness {
                let _ = writeln!(out, "  witness F on {} points:", w.len());
                for e in w {
                    let _ = writeln!(
                        out,
                        "    F({},{}) = {}  (phase {:.6} turns)",
                        e.xhat,
                        e.y,
                        unit_value(e.re, e.im, e.phase_turns),
                        e.phase_turns
                    );
                }
            }
            if let Some(a) = s.shortcuts.prime_field {
                match a {
                    Some(a) => {
                        let _ = writeln!(out, "  prime-field shortcut: I(X+aY;Y|Z) = 0 at a = {a}");
                    }
                    None => {
                        let _ = writeln!(out, "  prime-field shortcut: no a with I(X+aY;Y|Z) = 0");
                    }
                }
            }
            if let Some(c) = s.shortcuts.coprime {
                let _ = writeln!(out, "  co-prime shortcut: I(X;Y|Z) = 0 is {c}");
            }
            if !s.shortcuts_agree {
                let _ = writeln!(out, "  WARNING: shortcut disagrees with the full checker");
            }
        }
        let verdict = if self.preserved { "preserved" } else { "not preserved" };
        let _ = writeln!(out, "region: {verdict}");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub verdicts: Vec<OracleVerdict>,
    /// Checker verdict per set, where one was computed.
    pub checker: Vec<Option<bool>>,
    pub disagreements: Vec<String>,
    pub limitation: &'static str,
}

pub const ORACLE_LIMITATION: &str =
    "the oracle only probes finite depth; a loss deeper than the probed depth is not detected";

impl OracleSummary {
    pub fn new(verdicts: Vec<OracleVerdict>, checker: Vec<Option<bool>>) -> Self {
        let disagreements = verdicts
            .iter()
            .zip(&checker)
            .filter_map(|(v, c)| match c {
                Some(c) if *c != v.preserved => Some(format!(
                    "S = {}: checker says {}, oracle through depth {} says {}",
                    v.set,
                    if *c { "compatible" } else { "not compatible" },
                    v.max_depth,
                    if v.preserved { "preserved" } else { "not preserved" }
                )),
                _ => None,
            })
            .collect();
        Self { verdicts, checker, disagreements, limitation: ORACLE_LIMITATION }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let _ = writeln!(out, "S = {}  (I_S(W) = {:.6} bits)", v.set, v.probes[0].reference);
            let _ = writeln!(out, "  depth  average    deficit");
            for p in &v.probes {
                let _ = writeln!(out, "  {:>5}  {:.6}  {:+.3e}", p.depth, p.average, p.deficit);
                for (s, val) in &p.values {
                    let _ = writeln!(out, "         I_S(W^{s}) = {val:.6}");
                }
            }
            let _ = match v.failing_depth {
                Some(d) => writeln!(out, "  not preserved (loss at depth {d})"),
                None => writeln!(out, "  preserved through depth {}", v.max_depth),
            };
        }
        for d in &self.disagreements {
            let _ = writeln!(out, "!!! DISAGREEMENT WITH CHECKER: {d}");
        }
        let _ = writeln!(out, "note: {}", self.limitation);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizeSummary {
    pub sequence: String,
    pub merged: bool,
    pub region: RegionSummary,
}

impl PolarizeSummary {
    pub fn render(&self) -> String {
        let mut out = format!(
            "W^{}: {} outputs{}\n",
            self.sequence,
            self.region.output_size,
            if self.merged { " after merging" } else { "" }
        );
        out.push_str(&self.region.render());
        out
    }
}

/// Runs the checker for `set`, or every proper set when `None`.
pub fn check(mac: &Mac, set: Option<UserSet>, tol: &Tolerances) -> Result<CheckSummary> {
    Ok(match set {
        Some(s) => CheckSummary::from_subset(mac, &compat::check_subset(mac, s, tol)?, tol),
        None => CheckSummary::from_region(mac, &compat::check_region(mac, tol)?, tol),
    })
}

pub fn checker_verdict(mac: &Mac, set: UserSet, tol: &Tolerances) -> Result<Option<bool>> {
    if set == UserSet::full(mac.users()) {
        return Ok(Some(true));
    }
    Ok(Some(compat::check_subset(mac, set, tol)?.report.is_compatible()))
}
