//! FCIDUMP ingestion and spin-orbital expansion of molecular integrals.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Tolerance used by the symmetry invariants.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Two entries for the same integral may differ by at most this much.
pub const DUPLICATE_TOL: f64 = 1e-10;

/// Spatial-orbital integrals as stored in an FCIDUMP file.
///
/// `h` is row-major `n_spatial x n_spatial`; `g_chem` holds `(ij|kl)` at
/// `((i * n + j) * n + k) * n + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub e_core: f64,
    pub h: Vec<f64>,
    pub g_chem: Vec<f64>,
    pub ms2: i32,
    pub source_label: String,
}

impl MolecularIntegrals {
    /// Zero integrals for `n_spatial` orbitals.
    pub fn zeros(n_spatial: usize, n_electrons: usize) -> Self {
        Self {
            n_spatial,
            n_electrons,
            e_core: 0.0,
            h: vec![0.0; n_spatial * n_spatial],
            g_chem: vec![0.0; n_spatial.pow(4)],
            ms2: 0,
            source_label: String::new(),
        }
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_spatial + q]
    }

    #[inline]
    pub fn g(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n_spatial;
        self.g_chem[((i * n + j) * n + k) * n + l]
    }

    /// Sets `h[p][q]` and `h[q][p]`.
    pub fn set_h(&mut self, p: usize, q: usize, value: f64) {
        let n = self.n_spatial;
        self.h[p * n + q] = value;
        self.h[q * n + p] = value;
    }

    /// Sets `(ij|kl)` and its seven real-orbital partners.
    pub fn set_g(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let n = self.n_spatial;
        for (a, b, c, d) in eightfold(i, j, k, l) {
            self.g_chem[((a * n + b) * n + c) * n + d] = value;
        }
    }

    /// Checks the symmetry and electron-count invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        if self.n_electrons == 0 || self.n_electrons > 2 * n {
            return Err(Error::Argument(format!(
                "{} electrons do not fit in {} spatial orbitals",
                self.n_electrons, n
            )));
        }
        for p in 0..n {
            for q in 0..p {
                if (self.h(p, q) - self.h(q, p)).abs() > SYMMETRY_TOL {
                    return Err(Error::Contract(format!("h not symmetric at ({p},{q})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.g(i, j, k, l);
                        for (a, b, c, d) in eightfold(i, j, k, l) {
                            if (self.g(a, b, c, d) - v).abs() > SYMMETRY_TOL {
                                return Err(Error::Contract(format!(
                                    "g_chem lacks 8-fold symmetry at ({i}{j}|{k}{l})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Renders the integrals as FCIDUMP text (unique nonzero entries only).
    pub fn to_fcidump(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        let _ = writeln!(out, " &FCI NORB={},NELEC={},MS2={},\n &END", n, self.n_electrons, self.ms2);
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                            continue;
                        }
                        let v = self.g(i, j, k, l);
                        if v != 0.0 {
                            let _ = writeln!(out, "{:e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1);
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = self.h(i, j);
                if v != 0.0 {
                    let _ = writeln!(out, "{:e} {} {} 0 0", v, i + 1, j + 1);
                }
            }
        }
        let _ = writeln!(out, "{:e} 0 0 0 0", self.e_core);
        out
    }
}

fn eightfold(i: usize, j: usize, k: usize, l: usize) -> [(usize, usize, usize, usize); 8] {
    [(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k), (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)]
}

#[derive(Default)]
struct Namelist {
    norb: Option<usize>,
    nelec: Option<usize>,
    ms2: Option<i32>,
}

fn parse_namelist(text: &str, last_line: usize) -> Result<Namelist> {
    let body = text.replace("&FCI", " ").replace("&fci", " ").replace("&END", " ").replace("&end", " ");
    let body = body.trim().trim_end_matches('/');
    let mut nl = Namelist::default();
    let mut current: Option<String> = None;
    for field in body.split(',') {
        let field = field.trim();
        if field.is_empty() {
            continue;
        }
        let value = match field.split_once('=') {
            Some((key, value)) => {
                current = Some(key.trim().to_ascii_uppercase());
                value.trim()
            }
            // continuation of a list-valued key such as ORBSYM
            None if current.is_some() => field,
            None => return Err(Error::Parse { line: last_line, msg: format!("stray namelist token `{field}`") }),
        };
        let bad = |what: &str| Error::Parse { line: last_line, msg: format!("invalid {what} value `{value}`") };
        match current.as_deref() {
            Some("NORB") => nl.norb = Some(value.parse().map_err(|_| bad("NORB"))?),
            Some("NELEC") => nl.nelec = Some(value.parse().map_err(|_| bad("NELEC"))?),
            Some("MS2") => nl.ms2 = Some(value.parse().map_err(|_| bad("MS2"))?),
            Some("UHF") => {
                let v = value.to_ascii_uppercase();
                if v.contains('T') {
                    return Err(Error::Parse {
                        line: last_line,
                        msg: "unrestricted (UHF) integrals are not supported".into(),
                    });
                }
            }
            // ORBSYM, ISYM and anything else are accepted and ignored.
            _ => {}
        }
    }
    Ok(nl)
}

fn parse_real(token: &str) -> Option<f64> {
    token.replace(['D', 'd'], "E").parse().ok()
}

/// Parses FCIDUMP text into [`MolecularIntegrals`].
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines().enumerate();

    let mut header = String::new();
    let mut header_end = None;
    for (idx, line) in lines.by_ref() {
        let trimmed = line.trim();
        if header.is_empty() {
            if trimmed.is_empty() {
                continue;
            }
            if !trimmed.to_ascii_uppercase().starts_with("&FCI") {
                return Err(Error::Parse { line: idx + 1, msg: "expected `&FCI` namelist".into() });
            }
        }
        header.push_str(line);
        header.push(' ');
        let upper = trimmed.to_ascii_uppercase();
        if upper.contains("&END") || upper.ends_with('/') {
            header_end = Some(idx + 1);
            break;
        }
    }
    let header_end =
        header_end.ok_or(Error::Parse { line: text.lines().count().max(1), msg: "unterminated namelist".into() })?;
    let nl = parse_namelist(&header, header_end)?;
    let missing = |key: &str| Error::Parse { line: header_end, msg: format!("namelist lacks {key}") };
    let norb = nl.norb.ok_or_else(|| missing("NORB"))?;
    let nelec = nl.nelec.ok_or_else(|| missing("NELEC"))?;

    let mut mi = MolecularIntegrals::zeros(norb, nelec);
    mi.ms2 = nl.ms2.unwrap_or(0);

    // canonical key -> value, for duplicate detection
    let mut seen: HashMap<[usize; 4], f64> = HashMap::new();
    let mut record = |key: [usize; 4], value: f64| -> Result<bool> {
        match seen.get(&key) {
            Some(&prev) if (prev - value).abs() > DUPLICATE_TOL => Err(Error::Consistency {
                key: format!("{} {} {} {}", key[0], key[1], key[2], key[3]),
                first: prev,
                second: value,
            }),
            Some(_) => Ok(false),
            None => {
                seen.insert(key, value);
                Ok(true)
            }
        }
    };

    for (idx, line) in lines {
        let line_no = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `value i j k l`, found {} fields", tokens.len()),
            });
        }
        let value = parse_real(tokens[0])
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad real `{}`", tokens[0]) })?;
        let mut idx4 = [0usize; 4];
        for (slot, tok) in idx4.iter_mut().zip(&tokens[1..]) {
            *slot = tok.parse().map_err(|_| Error::Parse { line: line_no, msg: format!("bad index `{tok}`") })?;
            if *slot > norb {
                return Err(Error::Bounds { index: *slot, limit: norb });
            }
        }
        match idx4 {
            [0, 0, 0, 0] => {
                if record([0; 4], value)? {
                    mi.e_core = value;
                }
            }
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let key = [i.max(j), i.min(j), 0, 0];
                if record(key, value)? {
                    mi.set_h(i - 1, j - 1, value);
                }
            }
            // orbital-energy records some writers append
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let ij = (i.max(j), i.min(j));
                let kl = (k.max(l), k.min(l));
                let (a, b) = if ij >= kl { (ij, kl) } else { (kl, ij) };
                if record([a.0, a.1, b.0, b.1], value)? {
                    mi.set_g(i - 1, j - 1, k - 1, l - 1, value);
                }
            }
            _ => return Err(Error::Parse { line: line_no, msg: format!("unsupported index pattern {idx4:?}") }),
        }
    }
    mi.validate()?;
    Ok(mi)
}

/// Spin-orbital integrals in physicist notation.
///
/// Spin orbital `2k` is spatial orbital `k` with spin alpha, `2k + 1` with
/// spin beta. `g_phys` stores `<pq|g|rs>` at `((p * n + q) * n + r) * n + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIntegrals {
    pub n_so: usize,
    pub n_electrons: usize,
    pub e_core: f64,
    pub h_so: Vec<f64>,
    pub g_phys: Vec<f64>,
}

impl SpinOrbitalIntegrals {
    pub fn zeros(n_so: usize, n_electrons: usize) -> Self {
        Self { n_so, n_electrons, e_core: 0.0, h_so: vec![0.0; n_so * n_so], g_phys: vec![0.0; n_so.pow(4)] }
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h_so[p * self.n_so + q]
    }

    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_so;
        self.g_phys[((p * n + q) * n + r) * n + s]
    }

    #[inline]
    pub fn g_mut(&mut self, p: usize, q: usize, r: usize, s: usize) -> &mut f64 {
        let n = self.n_so;
        &mut self.g_phys[((p * n + q) * n + r) * n + s]
    }
}

/// Spin label of a spin orbital under the interleaved convention (0 = alpha).
#[inline]
pub fn spin_of(so: usize) -> usize {
    so % 2
}

/// Expands spatial integrals to interleaved spin orbitals, converting
/// `(PR|QS)` to `<pq|g|rs>`.
pub fn to_spin_orbitals(mi: &MolecularIntegrals) -> SpinOrbitalIntegrals {
    let n_so = 2 * mi.n_spatial;
    let mut so = SpinOrbitalIntegrals::zeros(n_so, mi.n_electrons);
    so.e_core = mi.e_core;
    for p in 0..n_so {
        for q in 0..n_so {
            if spin_of(p) == spin_of(q) {
                so.h_so[p * n_so + q] = mi.h(p / 2, q / 2);
            }
        }
    }
    for p in 0..n_so {
        for q in 0..n_so {
            for r in (0..n_so).filter(|&r| spin_of(r) == spin_of(p)) {
                for s in (0..n_so).filter(|&s| spin_of(s) == spin_of(q)) {
                    *so.g_mut(p, q, r, s) = mi.g(p / 2, r / 2, q / 2, s / 2);
                }
            }
        }
    }
    so
}

/// Key/value sidecar written next to each fixture by the fixture generator.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixtureSidecar {
    pub e_hf: Option<f64>,
    pub orbital_energies: Vec<f64>,
    pub entries: Vec<(String, String)>,
}

/// Reads and parses an FCIDUMP file; the path becomes the source label.
pub fn read_fcidump(path: impl AsRef<std::path::Path>) -> Result<MolecularIntegrals> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    let mut mi = parse_fcidump(&text)?;
    mi.source_label = path.display().to_string();
    Ok(mi)
}

pub fn parse_sidecar(text: &str) -> Result<FixtureSidecar> {
    let mut out = FixtureSidecar::default();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or(Error::Parse { line: idx + 1, msg: "expected key=value".into() })?;
        let bad = || Error::Parse { line: idx + 1, msg: format!("bad number in `{key}`") };
        match key.trim() {
            "e_hf" => out.e_hf = Some(value.trim().parse().map_err(|_| bad())?),
            "orbital_energies" => {
                out.orbital_energies = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad())?
            }
            _ => {}
        }
        out.entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}
