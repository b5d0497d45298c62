use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, VqeError};

const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// One- and two-electron integrals over spatial orbitals, plus the constant core energy.
///
/// Two-electron integrals are in chemists' notation `(pq|rs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    n_orbitals: usize,
    pub n_electrons: usize,
    pub ms2: i64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    pub e_core: f64,
}

impl IntegralSet {
    pub fn zeros(n_orbitals: usize, n_electrons: usize) -> Self {
        Self {
            n_orbitals,
            n_electrons,
            ms2: 0,
            one_body: vec![0.0; n_orbitals.pow(2)],
            two_body: vec![0.0; n_orbitals.pow(4)],
            e_core: 0.0,
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    fn idx2(&self, p: usize, q: usize) -> usize {
        p * self.n_orbitals + q
    }

    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n_orbitals + q) * self.n_orbitals + r) * self.n_orbitals + s
    }

    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.one_body[self.idx2(p, q)]
    }

    /// `(pq|rs)`
    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    /// Sets `h_pq` and `h_qp`.
    pub fn set_h1(&mut self, p: usize, q: usize, v: f64) {
        let (a, b) = (self.idx2(p, q), self.idx2(q, p));
        self.one_body[a] = v;
        self.one_body[b] = v;
    }

    /// Sets `(pq|rs)` and its seven symmetry images.
    pub fn set_h2(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx4(a, b, c, d);
            self.two_body[i] = v;
        }
    }

    /// Checks the symmetric-matrix and 8-fold tensor symmetries.
    pub fn check_symmetry(&self) -> Result<()> {
        let n = self.n_orbitals;
        for p in 0..n {
            for q in 0..n {
                if (self.h1(p, q) - self.h1(q, p)).abs() > SYMMETRY_TOLERANCE {
                    return Err(VqeError::Contract(format!("h1 not symmetric at ({p},{q})")));
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.h2(p, q, r, s);
                        let images = [
                            self.h2(q, p, r, s),
                            self.h2(p, q, s, r),
                            self.h2(r, s, p, q),
                        ];
                        if images.iter().any(|w| (w - v).abs() > SYMMETRY_TOLERANCE) {
                            return Err(VqeError::Contract(format!(
                                "two-electron integrals lack 8-fold symmetry at ({p}{q}|{r}{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_fcidump_file(path: &Path) -> Result<Self> {
        parse_fcidump(&std::fs::read_to_string(path)?)
    }

    /// FCIDUMP text with one entry per symmetry-unique nonzero integral.
    pub fn to_fcidump(&self) -> String {
        let n = self.n_orbitals;
        let mut out = format!(
            " &FCI NORB={},NELEC={},MS2={},\n  ORBSYM={}\n  ISYM=1,\n &END\n",
            n,
            self.n_electrons,
            self.ms2,
            "1,".repeat(n)
        );
        let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if pair(p, q) < pair(r, s) {
                            continue;
                        }
                        let v = self.h2(p, q, r, s);
                        if v != 0.0 {
                            let _ =
                                writeln!(out, "{:e} {} {} {} {}", v, p + 1, q + 1, r + 1, s + 1);
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..=p {
                let v = self.h1(p, q);
                if v != 0.0 {
                    let _ = writeln!(out, "{:e} {} {} 0 0", v, p + 1, q + 1);
                }
            }
        }
        let _ = writeln!(out, "{:e} 0 0 0 0", self.e_core);
        out
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.replace(['D', 'd'], "e").parse().ok()
}

fn header_value(header: &str, key: &str, line: usize) -> Result<Option<i64>> {
    let upper = header.to_ascii_uppercase();
    let mut search = 0;
    while let Some(pos) = upper[search..].find(key) {
        let start = search + pos;
        let before_ok = start == 0 || !upper.as_bytes()[start - 1].is_ascii_alphanumeric();
        let rest = upper[start + key.len()..].trim_start();
        if before_ok {
            if let Some(rest) = rest.strip_prefix('=') {
                let token: String = rest
                    .trim_start()
                    .chars()
                    .take_while(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
                    .collect();
                return token
                    .parse()
                    .map(Some)
                    .map_err(|_| VqeError::parse(line, format!("bad {key} value")));
            }
        }
        search = start + key.len();
    }
    Ok(None)
}

/// Parses FCIDUMP text: a `&FCI ... &END` (or `/`) header, then `value p q r s` lines with
/// 1-based indices. `p q 0 0` is one-electron, `0 0 0 0` the core energy, and `p 0 0 0`
/// (orbital energies) is ignored.
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = String::new();
    let mut header_end = 0;
    for (no, line) in lines.by_ref() {
        header.push_str(line);
        header.push(' ');
        header_end = no;
        let t = line.trim().to_ascii_uppercase();
        if t.ends_with("&END") || t == "/" || t.ends_with('/') {
            break;
        }
    }
    if !header.to_ascii_uppercase().contains("&FCI") {
        return Err(VqeError::parse(1, "missing &FCI header"));
    }
    let norb = header_value(&header, "NORB", header_end)?
        .ok_or_else(|| VqeError::parse(header_end, "header lacks NORB"))?;
    let nelec = header_value(&header, "NELEC", header_end)?
        .ok_or_else(|| VqeError::parse(header_end, "header lacks NELEC"))?;
    let ms2 = header_value(&header, "MS2", header_end)?.unwrap_or(0);
    if norb <= 0 || nelec < 0 || nelec > 2 * norb {
        return Err(VqeError::parse(
            header_end,
            format!("inconsistent header NORB={norb} NELEC={nelec}"),
        ));
    }
    let n = norb as usize;
    let mut ints = IntegralSet::zeros(n, nelec as usize);
    ints.ms2 = ms2;

    for (no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(VqeError::parse(no, "expected 'value p q r s'"));
        }
        let v = parse_number(fields[0])
            .filter(|v| v.is_finite())
            .ok_or_else(|| VqeError::parse(no, format!("bad value '{}'", fields[0])))?;
        let mut idx = [0usize; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            idx[k] = f
                .parse()
                .map_err(|_| VqeError::parse(no, format!("bad index '{f}'")))?;
            if idx[k] > n {
                return Err(VqeError::parse(
                    no,
                    format!("index {} exceeds NORB={n}", idx[k]),
                ));
            }
        }
        match idx {
            [0, 0, 0, 0] => ints.e_core = v,
            [p, q, 0, 0] if p > 0 && q > 0 => ints.set_h1(p - 1, q - 1, v),
            [_, 0, 0, 0] => {}
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                ints.set_h2(p - 1, q - 1, r - 1, s - 1, v)
            }
            _ => return Err(VqeError::parse(no, "unsupported index pattern")),
        }
    }
    Ok(ints)
}
