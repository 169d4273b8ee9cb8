//! Complex phasor hypervector algebra.
//!
//! A [`Hypervector`] keeps the generating phase of every element alongside the
//! evaluated unit phasors. Fractional powers scale the stored phases, so
//! `power(power(x, a), b) == power(x, a * b)` and
//! `bind(power(x, a), power(x, b)) == power(x, a + b)` hold to rounding,
//! independent of any principal-branch choice.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dimension used throughout the arm experiments.
pub const DEFAULT_DIMENSION: usize = 1024;

/// Read access shared by phasor and dense vectors.
pub trait ComplexVector {
    fn elements(&self) -> &[Complex64];

    fn dim(&self) -> usize {
        self.elements().len()
    }

    fn norm(&self) -> f64 {
        self.elements().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Unit-magnitude complex vector with its generating phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Hypervector {
    phases: Vec<f64>,
    elements: Vec<Complex64>,
}

impl Hypervector {
    /// Builds a phasor from phases in radians (any real value).
    pub fn from_phases(phases: Vec<f64>) -> Self {
        let elements = phases.iter().map(|&p| Complex64::cis(p)).collect();
        Self { phases, elements }
    }

    /// Builds a phasor from unit-interval draws `u`, i.e. phases `2πu`.
    pub fn from_unit_phases(unit: &[f64]) -> Self {
        Self::from_phases(unit.iter().map(|u| TAU * u).collect())
    }

    pub fn ones(d: usize) -> Self {
        Self::from_phases(vec![0.0; d])
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn to_dense(&self) -> DenseVector {
        DenseVector::new(self.elements.clone())
    }

    pub fn bind(&self, other: &Hypervector) -> Result<Hypervector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::from_phases(
            self.phases.iter().zip(&other.phases).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Binds with the conjugate of `other`, i.e. unbinds `other`.
    pub fn unbind(&self, other: &Hypervector) -> Result<Hypervector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::from_phases(
            self.phases.iter().zip(&other.phases).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn conjugate(&self) -> Hypervector {
        Self::from_phases(self.phases.iter().map(|p| -p).collect())
    }

    pub fn power(&self, exponent: f64) -> Hypervector {
        Self::from_phases(self.phases.iter().map(|p| p * exponent).collect())
    }

    pub fn negate(&self) -> Hypervector {
        Self::from_phases(self.phases.iter().map(|p| p + PI).collect())
    }

    /// Largest deviation of any element magnitude from 1.
    pub fn max_magnitude_error(&self) -> f64 {
        self.elements.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

impl ComplexVector for Hypervector {
    fn elements(&self) -> &[Complex64] {
        &self.elements
    }

    fn norm(&self) -> f64 {
        (self.elements.len() as f64).sqrt()
    }
}

impl From<Vec<f64>> for Hypervector {
    fn from(phases: Vec<f64>) -> Self {
        Self::from_phases(phases)
    }
}

impl From<Hypervector> for Vec<f64> {
    fn from(v: Hypervector) -> Self {
        v.phases
    }
}

/// Complex vector with arbitrary magnitudes (bundles, CML actions).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    elements: Vec<Complex64>,
}

impl DenseVector {
    pub fn new(elements: Vec<Complex64>) -> Self {
        Self { elements }
    }

    pub fn zeros(d: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); d])
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.elements
    }

    pub fn scale(&self, factor: f64) -> DenseVector {
        Self::new(self.elements.iter().map(|z| z * factor).collect())
    }

    pub fn add<V: ComplexVector + ?Sized>(&self, other: &V) -> Result<DenseVector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::new(self.elements.iter().zip(other.elements()).map(|(a, b)| a + b).collect()))
    }

    pub fn sub<V: ComplexVector + ?Sized>(&self, other: &V) -> Result<DenseVector> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::new(self.elements.iter().zip(other.elements()).map(|(a, b)| a - b).collect()))
    }
}

impl ComplexVector for DenseVector {
    fn elements(&self) -> &[Complex64] {
        &self.elements
    }
}

impl From<&Hypervector> for DenseVector {
    fn from(v: &Hypervector) -> Self {
        v.to_dense()
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Draws `d` phases `2πu`, `u ~ U[0, 1)`, stored as principal values in
/// `(-π, π]` so that fractional powers follow the principal branch.
pub fn random_phasor<R: RngCore + ?Sized>(d: usize, rng: &mut R) -> Result<Hypervector> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let phases = (0..d)
        .map(|_| {
            let p = TAU * rng.random::<f64>();
            if p > PI {
                p - TAU
            } else {
                p
            }
        })
        .collect();
    Ok(Hypervector::from_phases(phases))
}

pub fn bind(u: &Hypervector, v: &Hypervector) -> Result<Hypervector> {
    u.bind(v)
}

pub fn conjugate(v: &Hypervector) -> Hypervector {
    v.conjugate()
}

pub fn power(v: &Hypervector, exponent: f64) -> Hypervector {
    v.power(exponent)
}

pub fn negate(v: &Hypervector) -> Hypervector {
    v.negate()
}

/// Elementwise sum of the inputs.
pub fn bundle<V: ComplexVector>(vs: &[V]) -> Result<DenseVector> {
    let first = vs.first().ok_or(Error::Empty("bundle of no vectors"))?;
    let d = first.dim();
    let mut acc = vec![Complex64::new(0.0, 0.0); d];
    for v in vs {
        check_dims(d, v.dim())?;
        for (a, z) in acc.iter_mut().zip(v.elements()) {
            *a += z;
        }
    }
    Ok(DenseVector::new(acc))
}

/// Projects every element onto the unit circle; exact zeros become `1 + 0j`.
pub fn normalize_phase<V: ComplexVector + ?Sized>(v: &V) -> Hypervector {
    Hypervector::from_phases(
        v.elements()
            .iter()
            .map(|z| if z.re == 0.0 && z.im == 0.0 { 0.0 } else { z.arg() })
            .collect(),
    )
}

/// Real part of the conjugate inner product, normalized by both norms.
///
/// For phasors both norms are `√d`, giving `Re(Σ u_i v_i*) / d`.
pub fn similarity<U, V>(u: &U, v: &V) -> Result<f64>
where
    U: ComplexVector + ?Sized,
    V: ComplexVector + ?Sized,
{
    check_dims(u.dim(), v.dim())?;
    let denom = u.norm() * v.norm();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(inner_re(u.elements(), v.elements()) / denom)
}

pub(crate) fn inner_re(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

/// Axis basis for fractional power encoding of 2D points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisPair {
    pub seed: u64,
    #[serde(rename = "x_phases")]
    pub x_basis: Hypervector,
    #[serde(rename = "y_phases")]
    pub y_basis: Hypervector,
}

impl BasisPair {
    /// Generates `x` then `y` from one rng.
    pub fn generate<R: RngCore + ?Sized>(d: usize, seed: u64, rng: &mut R) -> Result<Self> {
        let x_basis = random_phasor(d, rng)?;
        let y_basis = random_phasor(d, rng)?;
        Ok(Self { seed, x_basis, y_basis })
    }

    /// Generates a basis from the dedicated basis stream of `seed`.
    pub fn from_seed(d: usize, seed: u64) -> Result<Self> {
        let mut rng = crate::rng::HdcRng::stream(seed, crate::rng::Stream::Basis, 0);
        Self::generate(d, seed, &mut rng)
    }

    pub fn dim(&self) -> usize {
        self.x_basis.dim()
    }

    /// `x^a ⊙ y^b`.
    pub fn encode(&self, a: f64, b: f64) -> Hypervector {
        fpe_encode(self, a, b)
    }
}

pub fn fpe_encode(basis: &BasisPair, a: f64, b: f64) -> Hypervector {
    Hypervector::from_phases(
        basis
            .x_basis
            .phases()
            .iter()
            .zip(basis.y_basis.phases())
            .map(|(x, y)| x * a + y * b)
            .collect(),
    )
}

/// Per-entry metadata: position, real angle and Cartesian offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodebookLabel {
    pub index: usize,
    pub angle: f64,
    pub offset: [f64; 2],
}

/// Ordered vocabulary of hypervectors. Index `k - 1` holds the entry the
/// literature numbers `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CodebookRepr", into = "CodebookRepr")]
pub struct Codebook {
    entries: Vec<Hypervector>,
    labels: Vec<CodebookLabel>,
}

impl Codebook {
    pub fn new(entries: Vec<Hypervector>, labels: Vec<CodebookLabel>) -> Result<Self> {
        let first = entries.first().ok_or(Error::Empty("codebook"))?;
        let d = first.dim();
        if labels.len() != entries.len() {
            return Err(Error::InvalidCodebookSize(labels.len()));
        }
        for (i, (e, l)) in entries.iter().zip(&labels).enumerate() {
            check_dims(d, e.dim())?;
            if l.index != i {
                return Err(Error::IndexOutOfRange { index: l.index, len: entries.len() });
            }
        }
        Ok(Self { entries, labels })
    }

    /// Codebook with default labels (angle 0, zero offset).
    pub fn from_entries(entries: Vec<Hypervector>) -> Result<Self> {
        let labels = (0..entries.len())
            .map(|index| CodebookLabel { index, angle: 0.0, offset: [0.0, 0.0] })
            .collect();
        Self::new(entries, labels)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn entries(&self) -> &[Hypervector] {
        &self.entries
    }

    pub fn labels(&self) -> &[CodebookLabel] {
        &self.labels
    }

    pub fn entry(&self, index: usize) -> Result<&Hypervector> {
        self.entries.get(index).ok_or(Error::IndexOutOfRange { index, len: self.len() })
    }

    pub fn label(&self, index: usize) -> Result<&CodebookLabel> {
        self.labels.get(index).ok_or(Error::IndexOutOfRange { index, len: self.len() })
    }

    /// Normalized superposition of all entries.
    pub fn superposition(&self) -> Hypervector {
        normalize_phase(&bundle(&self.entries).expect("codebook is non-empty and uniform"))
    }

    /// SHA-256 over the labels and the little-endian phase bytes, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim() as u64).to_le_bytes());
        for (e, l) in self.entries.iter().zip(&self.labels) {
            h.update((l.index as u64).to_le_bytes());
            h.update(l.angle.to_le_bytes());
            h.update(l.offset[0].to_le_bytes());
            h.update(l.offset[1].to_le_bytes());
            for p in e.phases() {
                h.update(p.to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CodebookRepr {
    dimension: usize,
    entries: Vec<CodebookEntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct CodebookEntryRepr {
    #[serde(flatten)]
    label: CodebookLabel,
    phases: Vec<f64>,
}

impl TryFrom<CodebookRepr> for Codebook {
    type Error = Error;

    fn try_from(r: CodebookRepr) -> Result<Self> {
        let (entries, labels): (Vec<_>, Vec<_>) = r
            .entries
            .into_iter()
            .map(|e| (Hypervector::from_phases(e.phases), e.label))
            .unzip();
        let cb = Codebook::new(entries, labels)?;
        check_dims(r.dimension, cb.dim())?;
        Ok(cb)
    }
}

impl From<Codebook> for CodebookRepr {
    fn from(cb: Codebook) -> Self {
        let dimension = cb.dim();
        let entries = cb
            .entries
            .into_iter()
            .zip(cb.labels)
            .map(|(e, label)| CodebookEntryRepr { label, phases: e.into() })
            .collect();
        CodebookRepr { dimension, entries }
    }
}

/// Best match of a query against a codebook.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recovered {
    pub index: usize,
    pub similarity: f64,
}

/// Best match by absolute similarity; `sign` is `-1` for anti-parallel hits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedRecovered {
    pub index: usize,
    pub similarity: f64,
    pub sign: i8,
}

/// Cleanup: the most similar entry if its similarity reaches `threshold`.
pub fn recover<V: ComplexVector + ?Sized>(
    query: &V,
    codebook: &Codebook,
    threshold: f64,
) -> Result<Option<Recovered>> {
    let mut best: Option<Recovered> = None;
    for (index, e) in codebook.entries().iter().enumerate() {
        let similarity = similarity(query, e)?;
        if best.is_none_or(|b| similarity > b.similarity) {
            best = Some(Recovered { index, similarity });
        }
    }
    Ok(best.filter(|b| b.similarity >= threshold))
}

/// Cleanup by `|similarity|`, reporting the sign of the winning match.
pub fn recover_signed<V: ComplexVector + ?Sized>(
    query: &V,
    codebook: &Codebook,
    threshold: f64,
) -> Result<Option<SignedRecovered>> {
    let mut best: Option<(usize, f64)> = None;
    for (index, e) in codebook.entries().iter().enumerate() {
        let s = similarity(query, e)?;
        if best.is_none_or(|(_, b)| s.abs() > b.abs()) {
            best = Some((index, s));
        }
    }
    Ok(best.filter(|(_, s)| s.abs() >= threshold).map(|(index, s)| SignedRecovered {
        index,
        similarity: s.abs(),
        sign: if s < 0.0 { -1 } else { 1 },
    }))
}

/// Ring of `m` states: `s_1` has phases `2πU/m` with integer `U ∈ {1..m}`,
/// and each later state rotates every element by `2π/m`.
pub fn circular_codebook<R: RngCore + ?Sized>(m: usize, d: usize, rng: &mut R) -> Result<Codebook> {
    if m < 2 {
        return Err(Error::InvalidCodebookSize(m));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let step = TAU / m as f64;
    let first: Vec<f64> = (0..d).map(|_| rng.random_range(1..=m) as f64 * step).collect();
    let mut entries = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for k in 0..m {
        let shift = k as f64 * step;
        entries.push(Hypervector::from_phases(first.iter().map(|p| p + shift).collect()));
        labels.push(CodebookLabel { index: k, angle: shift, offset: [shift.cos(), shift.sin()] });
    }
    Codebook::new(entries, labels)
}

/// The constant phasor `e^{j2π/m}` that advances a circular codebook by one state.
pub fn unit_rotation(m: usize, d: usize) -> Hypervector {
    Hypervector::from_phases(vec![TAU / m as f64; d])
}
