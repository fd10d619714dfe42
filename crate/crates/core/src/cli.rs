//! Command-line front end. [`run`] takes explicit streams so it can be
//! driven from tests; `main` only wires it to the process.
//!
//! Exit codes: 0 success, 1 violations or a negative verdict, 2 usage or
//! input errors.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use crate::chain_maps::{
    induced_page_map, parse_map_entries, verify_cochain_map, verify_homotopy, FilteredMap,
};
use crate::cohomology::{hf_filtration, integer_graded_cohomology, zsigma_cohomology};
use crate::complex::{format_rational, parse_complex, parse_complex_unchecked, parse_rational, FilteredComplex};
use crate::maslov::{
    compatibility_check, kunneth_index, maslov_loop_index, monotone_constants, parse_path, window_lift,
    DiskClassData,
};
use crate::morse::{parse_matching, quantum_perturbed_torus, torus_complex, TorusSpec};
use crate::obstruction::decomposition::Decomposition;
use crate::obstruction::{
    alternating_binomial_sum, audin_decide, check_page_recursion, decomposition_search, poincare_laurent,
    rank_balance, rescan_descending, LaurentPoly,
};
use crate::spectral::{
    einfty_oracle, page_oracle, stabilization_bound, tsv_dump, Page, SpectralSequence,
};

#[derive(Parser, Debug)]
#[command(name = "intfloer", version, about = "Spectral sequences of action-filtered Z/2 cochain complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Complex file; standard input when omitted.
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the complex invariants and list every violation.
    Validate(Input),
    /// Integer-graded cohomology: one `n<TAB>dim` row per nonzero grade.
    Cohom(Input),
    /// Z_Σ-graded cohomology: one `j<TAB>dim` row per residue.
    Hf {
        #[command(flatten)]
        input: Input,
        /// Print the action filtration as `j<TAB>n<TAB>dim` rows instead.
        #[arg(long)]
        filtration: bool,
    },
    /// Spectral pages `E^1 .. E^K`.
    Pages {
        #[command(flatten)]
        input: Input,
        /// Last page; defaults to the stabilization bound.
        #[arg(long)]
        max_k: Option<usize>,
        /// Tab-separated rows `k n j dim rank` instead of JSON.
        #[arg(long)]
        tsv: bool,
    },
    /// Print k(L), the first stable page.
    Kl(Input),
    /// Compare pages with the subquotient oracle; exit 1 on a mismatch.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Poincaré–Laurent polynomial of a page.
    Poly {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Use the limit page.
        #[arg(long, conflicts_with = "k")]
        infinity: bool,
    },
    /// Check the page recursion, or with `--balance` the signed rank balance.
    Recursion {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        balance: bool,
    },
    /// Search for a nonnegative decomposition of (1+t)^m or of given coefficients.
    Decomp {
        #[arg(long)]
        sigma: i64,
        #[arg(long)]
        k: usize,
        /// Target (1+t)^m.
        #[arg(long, conflicts_with = "coeffs")]
        m: Option<u32>,
        /// Comma-separated target coefficients, lowest exponent first.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// Exponent of the first coefficient.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        min_exp: i64,
    },
    /// Alternating binomial sum Σ_{l≤N} (-1)^l C(m, l).
    Binom {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// Decide which Maslov periods a monotone torus in C^m can have.
    Audin {
        #[arg(long)]
        m: u64,
        /// Human-readable table instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// Maslov index and monotonicity arithmetic.
    #[command(subcommand)]
    Maslov(MaslovCommand),
    /// Verify a filtered cochain map and report induced isomorphisms.
    Mapcheck {
        source: PathBuf,
        target: PathBuf,
        /// Map file `{"entries": [[src, dst], ..]}`.
        map: PathBuf,
        /// Report induced maps on pages 1..=K.
        #[arg(long, default_value_t = 1)]
        pages: usize,
        /// Second map `g`; with `--homotopy`, checks `f - g = Hδ + δH`.
        #[arg(long, requires = "homotopy")]
        other: Option<PathBuf>,
        #[arg(long, requires = "other")]
        homotopy: Option<PathBuf>,
    },
    /// Generate fixture complexes.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand, Debug)]
enum MaslovCommand {
    /// Index of a closed loop in a path file.
    Index { path: PathBuf },
    /// Index of the product of two loops.
    Kunneth { first: PathBuf, second: PathBuf },
    /// σ, Σ and λ from disk class pairings given as `omega:mu`.
    Monotone {
        #[arg(long = "class", required = true, allow_hyphen_values = true)]
        classes: Vec<String>,
    },
    /// Lift an action in [0, σ) into the window (r, r + σ).
    Lift {
        #[arg(long)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long)]
        sigma: String,
    },
    /// Whether a deck element with the given loop index and action is consistent.
    Compat {
        #[arg(long = "class", required = true, allow_hyphen_values = true)]
        classes: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        index: i64,
        #[arg(long, allow_hyphen_values = true)]
        action: String,
    },
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Torus Morse complex, optionally with prescribed quantum edges.
    Torus {
        #[arg(long)]
        m: usize,
        /// Matching file `{"edges": [{"from": [..], "to": [..], "shift": i}]}`.
        #[arg(long)]
        quantum: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        sigma: i64,
        #[arg(long, default_value = "1/2")]
        lambda: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        r: String,
    },
}

/// Failure that ends the command with exit code 2.
struct Fatal(String);

impl<E: Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn read_text(&mut self, file: Option<&Path>) -> Result<String, Fatal> {
        match file {
            Some(p) => read_file(p),
            None => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Fatal(format!("reading standard input: {e}")))?;
                Ok(s)
            }
        }
    }

    fn complex(&mut self, input: &Input) -> Result<FilteredComplex, Fatal> {
        let text = self.read_text(input.file.as_deref())?;
        let c = parse_complex(&text).map_err(|e| Fatal(format!("{}: {e}", source_name(input.file.as_deref()))))?;
        self.warn(&c)?;
        Ok(c)
    }

    fn warn(&mut self, c: &FilteredComplex) -> Result<(), Fatal> {
        for w in c.warnings() {
            writeln!(self.err, "warning: {w}")?;
        }
        Ok(())
    }

    fn print(&mut self, s: impl Display) -> Result<(), Fatal> {
        write!(self.out, "{s}")?;
        Ok(())
    }
}

fn source_name(file: Option<&Path>) -> String {
    file.map_or("<stdin>".to_string(), |p| p.display().to_string())
}

fn read_file(p: &Path) -> Result<String, Fatal> {
    fs::read_to_string(p).map_err(|e| Fatal(format!("{}: {e}", p.display())))
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        out: stdout,
        err: stderr,
    };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<i32, Fatal> {
    match command {
        Command::Validate(input) => {
            let text = io.read_text(input.file.as_deref())?;
            let c = parse_complex_unchecked(&text)
                .map_err(|e| Fatal(format!("{}: {e}", source_name(input.file.as_deref()))))?;
            io.warn(&c)?;
            let violations = c.validate();
            if violations.is_empty() {
                io.print("ok\n")?;
                return Ok(0);
            }
            for v in &violations {
                io.print(format_args!("{}\t{v}\n", v.rule()))?;
            }
            Ok(1)
        }
        Command::Cohom(input) => {
            let c = io.complex(&input)?;
            for (n, d) in integer_graded_cohomology(&c).table {
                io.print(format_args!("{n}\t{d}\n"))?;
            }
            Ok(0)
        }
        Command::Hf { input, filtration } => {
            let c = io.complex(&input)?;
            if filtration {
                for (j, chain) in hf_filtration(&c).chains {
                    for (n, d) in chain {
                        io.print(format_args!("{j}\t{n}\t{d}\n"))?;
                    }
                }
            } else {
                let hf = zsigma_cohomology(&c);
                for j in 0..c.sigma_maslov() {
                    io.print(format_args!("{j}\t{}\n", hf.dim(j)))?;
                }
            }
            Ok(0)
        }
        Command::Pages { input, max_k, tsv } => {
            let c = io.complex(&input)?;
            let max_k = max_k.unwrap_or_else(|| stabilization_bound(&c));
            if tsv {
                io.print(tsv_dump(&c, max_k)?)?;
            } else {
                io.print(pages_json(&c, max_k)?)?;
            }
            Ok(0)
        }
        Command::Kl(input) => {
            let c = io.complex(&input)?;
            io.print(format_args!("{}\n", SpectralSequence::new(&c).k_stable()))?;
            Ok(0)
        }
        Command::Oracle { input, max_k } => {
            let c = io.complex(&input)?;
            let ss = SpectralSequence::new(&c);
            let bound = stabilization_bound(&c);
            let mut mismatch = false;
            for k in 1..=max_k.unwrap_or(bound) {
                let same = ss.page(k)?.dims() == page_oracle(&c, k)?.dims();
                mismatch |= !same;
                io.print(format_args!("{k}\t{}\n", if same { "match" } else { "MISMATCH" }))?;
            }
            let same = ss.einfty().dims() == einfty_oracle(&c).dims();
            mismatch |= !same;
            io.print(format_args!("inf\t{}\n", if same { "match" } else { "MISMATCH" }))?;
            Ok(i32::from(mismatch))
        }
        Command::Poly { input, k, infinity } => {
            let c = io.complex(&input)?;
            let ss = SpectralSequence::new(&c);
            let page = if infinity { ss.einfty() } else { ss.page(k)? };
            io.print(format_args!("{}\n", poincare_laurent(&page)))?;
            Ok(0)
        }
        Command::Recursion { input, balance } => {
            let c = io.complex(&input)?;
            if balance {
                let ok = rank_balance(&c)?;
                io.print(format_args!("{ok}\n"))?;
                return Ok(i32::from(!ok));
            }
            let violations = check_page_recursion(&c);
            if violations.is_empty() {
                io.print("ok\n")?;
                return Ok(0);
            }
            for v in &violations {
                io.print(format_args!("{v}\n"))?;
            }
            Ok(1)
        }
        Command::Decomp {
            sigma,
            k,
            m,
            coeffs,
            min_exp,
        } => {
            let target = match (m, coeffs) {
                (Some(m), None) => LaurentPoly::one_plus_t_pow(m),
                (None, Some(list)) => {
                    let parsed = list
                        .split(',')
                        .map(|s| s.trim().parse::<BigInt>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| Fatal(format!("--coeffs: {e}")))?;
                    LaurentPoly::from_coeffs(
                        parsed
                            .into_iter()
                            .enumerate()
                            .map(|(i, c)| (min_exp + i as i64, c)),
                    )
                }
                _ => return Err(Fatal("give exactly one of --m and --coeffs".into())),
            };
            match decomposition_search(&target, sigma, k)? {
                Decomposition::Witness(qs) => {
                    let v = json!({
                        "target": target.to_string(),
                        "witness": qs.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                    });
                    io.print(format_args!("{}\n", serde_json::to_string_pretty(&v)?))?;
                    Ok(0)
                }
                Decomposition::Impossible(cert) => {
                    let rescan = rescan_descending(&target, sigma, k)?;
                    let v = json!({
                        "target": target.to_string(),
                        "witness": null,
                        "certificate": {
                            "Sigma": cert.sigma,
                            "k": cert.k,
                            "supports": cert.supports,
                            "coefficient_bound": cert.coefficient_bound,
                            "states_explored": cert.states_explored,
                            "descending_rescan_agrees": rescan.is_none(),
                        },
                    });
                    io.print(format_args!("{}\n", serde_json::to_string_pretty(&v)?))?;
                    Ok(1)
                }
            }
        }
        Command::Binom { m, n } => {
            io.print(format_args!("{}\n", alternating_binomial_sum(m, n)))?;
            Ok(0)
        }
        Command::Audin { m, table } => {
            if m < 2 {
                return Err(Fatal("--m must be at least 2".into()));
            }
            let report = audin_decide(m);
            if table {
                io.print(report.table())?;
            } else {
                io.print(report.to_json())?;
            }
            Ok(if report.verdict == 2 { 0 } else { 1 })
        }
        Command::Maslov(cmd) => maslov(cmd, io),
        Command::Mapcheck {
            source,
            target,
            map,
            pages,
            other,
            homotopy,
        } => {
            let s = parse_complex(&read_file(&source)?).map_err(|e| Fatal(format!("{}: {e}", source.display())))?;
            let t = parse_complex(&read_file(&target)?).map_err(|e| Fatal(format!("{}: {e}", target.display())))?;
            let f = FilteredMap::from_ids(&s, &t, 0, &parse_map_entries(&read_file(&map)?)?)?;
            let mut violations = verify_cochain_map(&f);
            if let (Some(g), Some(h)) = (other, homotopy) {
                let g = FilteredMap::from_ids(&s, &t, 0, &parse_map_entries(&read_file(&g)?)?)?;
                let h = FilteredMap::from_ids(&s, &t, -1, &parse_map_entries(&read_file(&h)?)?)?;
                violations.extend(verify_cochain_map(&g));
                violations.extend(verify_homotopy(&f, &g, &h));
            }
            if !violations.is_empty() {
                for v in &violations {
                    io.print(format_args!("{v}\n"))?;
                }
                return Ok(1);
            }
            io.print("ok\n")?;
            for k in 1..=pages {
                let induced = induced_page_map(&f, k)?;
                io.print(format_args!("{k}\t{}\n", if induced.iso { "iso" } else { "not-iso" }))?;
            }
            Ok(0)
        }
        Command::Gen(GenCommand::Torus {
            m,
            quantum,
            sigma,
            lambda,
            r,
        }) => {
            let spec = TorusSpec::new(m, sigma, parse_rational("lambda", &lambda)?, parse_rational("r", &r)?)?;
            let c = match quantum {
                None => torus_complex(&spec)?,
                Some(p) => quantum_perturbed_torus(&spec, &parse_matching(&read_file(&p)?)?)?,
            };
            io.warn(&c)?;
            io.print(c.to_json())?;
            Ok(0)
        }
    }
}

fn pages_json(c: &FilteredComplex, max_k: usize) -> Result<String, Fatal> {
    let ss = SpectralSequence::new(c);
    let mut pages = Vec::new();
    for k in 1..=max_k {
        let page: Page = ss.page(k)?;
        let d = crate::spectral::differential_on(c, &page)?;
        let cells: Vec<_> = page
            .cells
            .values()
            .map(|cell| {
                json!({
                    "n": cell.n,
                    "j": cell.j,
                    "dim": cell.dim,
                    "rank": d.get(&cell.n).map_or(0, |m| m.rank()),
                })
            })
            .collect();
        pages.push(json!({ "k": k, "cells": cells }));
    }
    let v = json!({ "k_stable": ss.k_stable(), "pages": pages });
    Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
}

fn disk_classes(classes: &[String]) -> Result<DiskClassData, Fatal> {
    let classes = classes
        .iter()
        .map(|s| {
            let (w, mu) = s
                .split_once(':')
                .ok_or_else(|| Fatal(format!("class {s:?} is not of the form omega:mu")))?;
            let mu = mu.trim().parse::<i64>().map_err(|e| Fatal(format!("class {s:?}: {e}")))?;
            Ok((parse_rational("omega", w.trim())?, mu))
        })
        .collect::<Result<Vec<_>, Fatal>>()?;
    Ok(DiskClassData { classes })
}

fn maslov(cmd: MaslovCommand, io: &mut Io<'_>) -> Result<i32, Fatal> {
    match cmd {
        MaslovCommand::Index { path } => {
            let p = parse_path(&read_file(&path)?)?;
            io.print(format_args!("{}\n", maslov_loop_index(&p)?))?;
        }
        MaslovCommand::Kunneth { first, second } => {
            let a = parse_path(&read_file(&first)?)?;
            let b = parse_path(&read_file(&second)?)?;
            io.print(format_args!("{}\n", kunneth_index(&a, &b)?))?;
        }
        MaslovCommand::Monotone { classes } => match monotone_constants(&disk_classes(&classes)?) {
            Ok(c) => {
                let v = json!({
                    "sigma": format_rational(&c.sigma),
                    "Sigma": c.sigma_maslov,
                    "lambda": format_rational(&c.lambda),
                });
                io.print(format_args!("{}\n", serde_json::to_string_pretty(&v)?))?;
            }
            Err(crate::maslov::MaslovError::NotMonotone(a, b)) => {
                io.print(format_args!("not monotone: {} {}\n", classes[a], classes[b]))?;
                return Ok(1);
            }
            Err(e) => return Err(e.into()),
        },
        MaslovCommand::Lift { a, r, sigma } => {
            let (lifted, shift) = window_lift(
                &parse_rational("a", &a)?,
                &parse_rational("r", &r)?,
                &parse_rational("sigma", &sigma)?,
            )?;
            io.print(format_args!("{}\t{shift}\n", format_rational(&lifted)))?;
        }
        MaslovCommand::Compat {
            classes,
            index,
            action,
        } => {
            let ok = compatibility_check(&disk_classes(&classes)?, index, &parse_rational("action", &action)?)?;
            io.print(format_args!("{ok}\n"))?;
            return Ok(i32::from(!ok));
        }
    }
    Ok(0)
}
