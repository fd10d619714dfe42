//! Case analysis ruling out Maslov periods `Σ ≥ 4` for monotone tori in `C^m`.
//!
//! Suppose `Σ` is even and the stabilization index is `k + 1`. Comparing
//! coefficients in `(1+t)^m = Σ_{i≤k} (1 + t^{iΣ+1}) Q_i` forces the
//! alternating sum `Σ_{l≤N} (-1)^l C(m, l)` to vanish for `N = (k+1)Σ - 1`.
//! Since that sum equals `(-1)^N C(m-1, N)`, it vanishes only for `N ≥ m`,
//! while degree bounds give `N ≤ m`. So `(k+1)Σ = m + 1` is the only escape.
//! Escapes with `k + 1 = 1` contradict nonvanishing torus cohomology; other
//! escapes (only possible for odd `m`) are resolved on `L × L ⊂ C^{2m}`,
//! whose period is a multiple of `Σ`.

use std::fmt::Write as _;

use serde::Serialize;

use super::alternating_binomial_sum;

/// Facts taken as given by the decision procedure.
pub const AXIOMS: [&str; 3] = [
    "H*(T^m; Z2) is nonzero",
    "Floer cohomology of a displaceable Lagrangian vanishes",
    "the product of monotone tori is a monotone torus whose Maslov period is a multiple of each factor's",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ExcludedDegree,
    ExcludedPartialSum,
    ExcludedK1,
    Escape,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ExcludedDegree => "excluded_degree",
            Status::ExcludedPartialSum => "excluded_partial_sum",
            Status::ExcludedK1 => "excluded_k1",
            Status::Escape => "escape",
        }
    }
}

/// One candidate stabilization index `k(L)` for a given `Σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateRow {
    /// Candidate value of `k(L)`.
    pub kl: u64,
    /// `N = k(L)·Σ - 1`.
    #[serde(rename = "N")]
    pub n: u64,
    pub status: Status,
    /// `Σ_{l≤N} (-1)^l C(m, l)` when `N < m`; nonzero there.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_sum: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaCase {
    #[serde(rename = "Sigma")]
    pub sigma: u64,
    pub status: Status,
    /// `k(L)` of an escape.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub certificate: Vec<CandidateRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub doubled_m: u64,
    /// Periods that escaped the direct analysis.
    pub escapes: Vec<u64>,
    pub report: Box<AudinReport>,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AudinReport {
    pub m: u64,
    pub axioms: Vec<String>,
    pub cases: Vec<SigmaCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
    pub verdict: u64,
}

fn decide_sigma(m: u64, sigma: u64) -> SigmaCase {
    let mut certificate = Vec::new();
    let mut kl = 1;
    loop {
        let n = kl * sigma - 1;
        let (status, partial_sum) = match (kl, n.cmp(&m)) {
            (_, std::cmp::Ordering::Greater) => (Status::ExcludedDegree, None),
            (1, std::cmp::Ordering::Equal) => (Status::ExcludedK1, None),
            (_, std::cmp::Ordering::Equal) => (Status::Escape, None),
            (1, std::cmp::Ordering::Less) => (Status::ExcludedK1, None),
            (_, std::cmp::Ordering::Less) => {
                let s = alternating_binomial_sum(m, n);
                debug_assert!(s != 0.into());
                (Status::ExcludedPartialSum, Some(s.to_string()))
            }
        };
        certificate.push(CandidateRow {
            kl,
            n,
            status,
            partial_sum,
        });
        if n > m {
            break;
        }
        kl += 1;
    }
    let escape = certificate.iter().find(|r| r.status == Status::Escape);
    let (status, k) = if let Some(row) = escape {
        (Status::Escape, Some(row.kl))
    } else if sigma == m + 1 {
        (Status::ExcludedK1, None)
    } else if certificate.iter().any(|r| r.status == Status::ExcludedPartialSum) {
        (Status::ExcludedPartialSum, None)
    } else {
        (Status::ExcludedDegree, None)
    };
    SigmaCase {
        sigma,
        status,
        k,
        certificate,
    }
}

/// Runs the case analysis for tori in `C^m`, recursing once through `C^{2m}`
/// for odd `m`.
pub fn audin_decide(m: u64) -> AudinReport {
    let cases: Vec<SigmaCase> = (4..=m + 1)
        .filter(|s| s % 2 == 0)
        .map(|s| decide_sigma(m, s))
        .collect();
    let escapes: Vec<u64> = cases
        .iter()
        .filter(|c| c.status == Status::Escape)
        .map(|c| c.sigma)
        .collect();
    let divides = cases.iter().any(|c| (m + 1).is_multiple_of(c.sigma));
    let resolution = (m % 2 == 1 && m >= 2 && divides).then(|| {
        let report = audin_decide(2 * m);
        // L × L has period a multiple of Σ ≥ 4, impossible once every Σ' ≥ 4 is excluded on C^{2m}.
        let resolved = report.verdict == 2;
        Resolution {
            doubled_m: 2 * m,
            escapes: escapes.clone(),
            report: Box::new(report),
            resolved,
        }
    });
    let unresolved: Vec<u64> = match &resolution {
        Some(r) if r.resolved => Vec::new(),
        _ => escapes,
    };
    AudinReport {
        m,
        axioms: AXIOMS.iter().map(|s| s.to_string()).collect(),
        cases,
        resolution,
        verdict: unresolved.iter().copied().max().unwrap_or(2),
    }
}

impl AudinReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain text table, one line per Σ, followed by the verdict.
    pub fn table(&self) -> String {
        let mut out = String::new();
        self.write_table(&mut out, "");
        out
    }

    fn write_table(&self, out: &mut String, indent: &str) {
        let _ = writeln!(out, "{indent}m = {}", self.m);
        let _ = writeln!(out, "{indent}{:>6}  {:<22} k(L)", "Sigma", "status");
        for c in &self.cases {
            let k = c.k.map_or("-".to_string(), |k| k.to_string());
            let _ = writeln!(out, "{indent}{:>6}  {:<22} {k}", c.sigma, c.status.as_str());
        }
        if let Some(r) = &self.resolution {
            let _ = writeln!(
                out,
                "{indent}product with itself in C^{} ({}):",
                r.doubled_m,
                if r.resolved { "resolved" } else { "unresolved" }
            );
            r.report.write_table(out, &format!("{indent}  "));
        }
        let _ = writeln!(out, "{indent}verdict: Sigma = {}", self.verdict);
    }
}
