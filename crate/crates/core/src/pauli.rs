//! Hamiltonians as real-weighted sums of Pauli strings.
//!
//! Text format (one term per line, `#` starts a comment):
//!
//! ```text
//! # -J (Z + X)/sqrt(2), J = pi/4
//! -0.5553603672697958 Z
//! -0.5553603672697958 X
//! ```

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{c, i_pow, re, Real, C};

/// Dense paths (matrices, diagonalization, exponentials) refuse registers
/// larger than this unless a different cap is passed explicitly.
pub const DEFAULT_MATRIX_QUBIT_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn matrix<T: Real>(self) -> Matrix<T> {
        let (o, l) = (re(T::zero()), re(T::one()));
        let rows = match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, c(T::zero(), -T::one())], [c(T::zero(), T::one()), o]],
            Pauli::Z => [[l, o], [o, -l]],
        };
        Matrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2")
    }
}

/// Tensor product of single-qubit Paulis; position `q` acts on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self(ops)
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self(vec![Pauli::I; num_qubits])
    }

    /// `op` on `qubit`, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, op: Pauli) -> Self {
        let mut ops = vec![Pauli::I; num_qubits];
        ops[qubit] = op;
        Self(ops)
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.0
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len()
    }

    /// Only I and Z factors.
    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&q| self.0[q] != Pauli::I).collect()
    }

    /// `(flip, sign, ny)`: `P|i⟩ = i^ny (-1)^popcount(i & sign) |i ^ flip⟩`.
    fn masks(&self) -> (usize, usize, u64) {
        let n = self.0.len();
        let mut flip = 0;
        let mut sign = 0;
        let mut ny = 0;
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ny += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, ny)
    }

    /// `P|ψ⟩` without forming a matrix.
    pub fn apply<T: Real>(&self, amps: &[C<T>]) -> Vec<C<T>> {
        let (flip, sign, ny) = self.masks();
        let phase = i_pow::<T>(ny);
        let mut out = vec![C::zero(); amps.len()];
        for (i, a) in amps.iter().enumerate() {
            let s = if (i & sign).count_ones() % 2 == 1 { -phase } else { phase };
            out[i ^ flip] = s * a;
        }
        out
    }

    /// `⟨ψ|P|ψ⟩` (complex; real up to rounding).
    pub fn expectation<T: Real>(&self, amps: &[C<T>]) -> C<T> {
        let (flip, sign, ny) = self.masks();
        let phase = i_pow::<T>(ny);
        let mut acc = C::zero();
        for (i, a) in amps.iter().enumerate() {
            let s = if (i & sign).count_ones() % 2 == 1 { -phase } else { phase };
            acc += amps[i ^ flip].conj() * s * a;
        }
        acc
    }

    /// In-place `exp(-i·angle·P)|ψ⟩ = cos(angle)|ψ⟩ - i sin(angle) P|ψ⟩`.
    pub fn apply_rotation<T: Real>(&self, amps: &mut [C<T>], angle: T) {
        let p_psi = self.apply(amps);
        let (co, si) = (angle.cos(), angle.sin());
        let minus_i_sin = c(T::zero(), -si);
        for (a, pa) in amps.iter_mut().zip(p_psi) {
            *a = *a * co + minus_i_sin * pa;
        }
    }

    /// Dense `2^n × 2^n` matrix of the string.
    pub fn matrix<T: Real>(&self) -> Matrix<T> {
        self.0
            .iter()
            .fold(Matrix::identity(1), |acc, p| acc.kron(&p.matrix()))
    }

    /// Pads with identities: `before` qubits ahead, `after` behind.
    pub fn embed(&self, before: usize, after: usize) -> Self {
        let mut ops = vec![Pauli::I; before];
        ops.extend_from_slice(&self.0);
        ops.extend(std::iter::repeat(Pauli::I).take(after));
        Self(ops)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return domain("empty Pauli string");
        }
        s.chars()
            .map(|ch| {
                Pauli::from_symbol(ch)
                    .ok_or_else(|| Error::Domain(format!("invalid Pauli symbol {ch:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Real-weighted sum of Pauli strings on a fixed register.
///
/// Terms are kept merged, sorted by string and free of exact zeros, so two
/// sums describing the same operator compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T: Real = f64> {
    num_qubits: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> PauliSum<T> {
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = (T, PauliString)>) -> Result<Self> {
        if num_qubits == 0 {
            return domain("Hamiltonian needs at least one qubit");
        }
        let mut collected: Vec<(T, PauliString)> = Vec::new();
        for (coeff, string) in terms {
            if string.num_qubits() != num_qubits {
                return domain(format!(
                    "Pauli string {string} has length {}, expected {num_qubits}",
                    string.num_qubits()
                ));
            }
            if !coeff.is_finite() {
                return domain(format!("non-finite coefficient on {string}"));
            }
            collected.push((coeff, string));
        }
        collected.sort_by(|a, b| a.1.cmp(&b.1));
        let mut terms: Vec<(T, PauliString)> = Vec::with_capacity(collected.len());
        for (coeff, string) in collected {
            match terms.last_mut() {
                Some((acc, last)) if *last == string => *acc += coeff,
                _ => terms.push((coeff, string)),
            }
        }
        terms.retain(|(coeff, _)| *coeff != T::zero());
        Ok(Self { num_qubits, terms })
    }

    /// Parses `<coeff> <string>` lines.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut width: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (coeff, string) = parse_term_line(content).map_err(|message| Error::Parse { line, message })?;
            match width {
                None => width = Some(string.num_qubits()),
                Some(w) if w != string.num_qubits() => {
                    return Err(Error::Parse {
                        line,
                        message: format!("Pauli string {string} has length {}, expected {w}", string.num_qubits()),
                    })
                }
                _ => {}
            }
            terms.push((coeff, string));
        }
        let n = width.ok_or(Error::Parse {
            line: 0,
            message: "no Hamiltonian terms found".into(),
        })?;
        Self::new(n, terms)
    }

    /// Inverse of [`PauliSum::parse_text`]; coefficients print losslessly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (coeff, string) in &self.terms {
            out.push_str(&format!("{} {}\n", coeff, string));
        }
        out
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    /// Coefficient of `string`, zero when absent.
    pub fn coefficient(&self, string: &PauliString) -> T {
        self.terms
            .iter()
            .find(|(_, s)| s == string)
            .map_or(T::zero(), |(c, _)| *c)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::new(self.num_qubits, self.terms.iter().map(|(c, s)| (*c * factor, s.clone())))
            .expect("same shape")
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "cannot add Hamiltonians on {} and {} qubits",
                self.num_qubits, other.num_qubits
            ));
        }
        Self::new(self.num_qubits, self.terms.iter().chain(&other.terms).cloned())
    }

    /// Same operator acting on a larger register.
    pub fn embed(&self, before: usize, after: usize) -> Self {
        Self::new(
            self.num_qubits + before + after,
            self.terms.iter().map(|(c, s)| (*c, s.embed(before, after))),
        )
        .expect("embedding keeps terms valid")
    }

    /// `Σ |coeff|`, an upper bound on the spectral norm.
    pub fn one_norm(&self) -> T {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Dense matrix under the default qubit cap.
    pub fn to_matrix(&self) -> Result<Matrix<T>> {
        self.to_matrix_capped(DEFAULT_MATRIX_QUBIT_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<Matrix<T>> {
        if self.num_qubits > cap {
            return Err(Error::Resource(format!(
                "dense matrix of {} qubits exceeds the cap of {cap}",
                self.num_qubits
            )));
        }
        let dim = 1usize << self.num_qubits;
        let mut out = Matrix::zeros(dim, dim);
        // Column j of the term matrix is P|j⟩.
        for (coeff, string) in &self.terms {
            let mut basis = vec![C::zero(); dim];
            for j in 0..dim {
                basis[j] = re(T::one());
                let col = string.apply(&basis);
                for (i, v) in col.iter().enumerate() {
                    if !v.is_zero() {
                        out[(i, j)] += *v * *coeff;
                    }
                }
                basis[j] = C::zero();
            }
        }
        Ok(out)
    }

    /// Terms in first-order product-formula order: diagonal (I/Z) strings
    /// first, then the rest, each group in lexicographic string order.
    pub fn trotter_order(&self) -> Vec<(T, PauliString)> {
        let mut ordered: Vec<(T, PauliString)> = self.terms.iter().filter(|(_, s)| s.is_diagonal()).cloned().collect();
        ordered.extend(self.terms.iter().filter(|(_, s)| !s.is_diagonal()).cloned());
        ordered
    }
}

fn parse_term_line<T: Real>(content: &str) -> std::result::Result<(T, PauliString), String> {
    let mut parts = content.split_whitespace();
    let coeff_text = parts.next().ok_or("missing coefficient")?;
    let string_text = parts.next().ok_or_else(|| format!("missing Pauli string after {coeff_text:?}"))?;
    if let Some(extra) = parts.next() {
        return Err(format!("unexpected trailing token {extra:?}"));
    }
    let coeff: f64 = coeff_text
        .parse()
        .map_err(|_| format!("invalid coefficient {coeff_text:?}"))?;
    if !coeff.is_finite() {
        return Err(format!("non-finite coefficient {coeff_text:?}"));
    }
    let string: PauliString = string_text.parse().map_err(|e: Error| match e {
        Error::Domain(m) => m,
        other => other.to_string(),
    })?;
    Ok((T::of(coeff), string))
}

impl<T: Real> FromStr for PauliSum<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

fn check_coupling<T: Real>(j: T) -> Result<()> {
    if !(j > T::zero()) || !j.is_finite() {
        return domain(format!("coupling J must be positive and finite, got {j}"));
    }
    Ok(())
}

/// `-J·H` with `H = (Z + X)/√2` the Hadamard gate (single qubit).
pub fn hadamard_hamiltonian<T: Real>(j: T) -> Result<PauliSum<T>> {
    check_coupling(j)?;
    let coeff = -j * T::FRAC_1_SQRT_2();
    PauliSum::new(
        1,
        [(coeff, PauliString::new(vec![Pauli::Z])), (coeff, PauliString::new(vec![Pauli::X]))],
    )
}

/// `-J Σ_q Z_q`, whose ground state is `|0…0⟩`.
pub fn initial_hamiltonian<T: Real>(j: T, num_qubits: usize) -> Result<PauliSum<T>> {
    check_coupling(j)?;
    PauliSum::new(
        num_qubits,
        (0..num_qubits).map(|q| (-j, PauliString::single(num_qubits, q, Pauli::Z))),
    )
}

/// Open transverse-field Ising chain `-J (Σ Z_q Z_{q+1} + g Σ X_q)`.
///
/// With two qubits and `g = 1` this is the `tfim2` demo model.
pub fn transverse_field_ising<T: Real>(j: T, g: T, num_qubits: usize) -> Result<PauliSum<T>> {
    check_coupling(j)?;
    if num_qubits < 2 {
        return domain("Ising chain needs at least two qubits");
    }
    let mut terms = Vec::new();
    for q in 0..num_qubits - 1 {
        let mut ops = vec![Pauli::I; num_qubits];
        ops[q] = Pauli::Z;
        ops[q + 1] = Pauli::Z;
        terms.push((-j, PauliString::new(ops)));
    }
    for q in 0..num_qubits {
        terms.push((-j * g, PauliString::single(num_qubits, q, Pauli::X)));
    }
    PauliSum::new(num_qubits, terms)
}

/// `(1-s)·h0 + s·h1`.
pub fn interpolate<T: Real>(h0: &PauliSum<T>, h1: &PauliSum<T>, s: T) -> Result<PauliSum<T>> {
    if h0.num_qubits() != h1.num_qubits() {
        return domain(format!(
            "interpolation endpoints act on {} and {} qubits",
            h0.num_qubits(),
            h1.num_qubits()
        ));
    }
    if !(s >= T::zero() && s <= T::one()) {
        return domain(format!("schedule parameter s = {s} outside [0, 1]"));
    }
    h0.scaled(T::one() - s).plus(&h1.scaled(s))
}
