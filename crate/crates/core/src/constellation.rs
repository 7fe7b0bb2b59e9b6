//! (Bi-)orthogonal signal sets and their binary labelings.
//!
//! Two constellation families are supported, both normalized to unit
//! symbol energy:
//!
//! * **M-PPM** — the M standard unit vectors of R^M (orthogonal signaling,
//!   D = M dimensions).
//! * **M-biPPM** — the D = M/2 unit vectors of R^D together with their
//!   negatives (biorthogonal signaling). The one-dimensional case 2-biPPM
//!   is BPSK.
//!
//! A [`Labeling`] is a bijection between m-bit binary labels and signal
//! indices; fixing one label bit selects a [`ConstrainedSubset`] of M/2
//! elements, the building block of the BICM analysis.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConstellationError {
    #[error("constellation size {0} must be a power of two >= 2")]
    InvalidSize(usize),
    #[error("near-Gray labeling is only defined for biPPM sets")]
    NearGrayRequiresBiPpm,
    #[error("bit position {mu} out of range 1..={bits}")]
    BitPositionOutOfRange { mu: usize, bits: u32 },
    #[error("bit value {0} must be 0 or 1")]
    InvalidBitValue(u8),
    #[error("labeling covers {labels} labels but the set has {points} points")]
    SizeMismatch { labels: usize, points: usize },
    #[error("labels do not form a bijection onto m-bit strings")]
    NotBijective,
}

/// Constellation family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalSetKind {
    Ppm,
    BiPpm,
}

/// A finite set of M real-valued points in D dimensions with unit symbol
/// energy (every point has squared norm exactly 1; entries are 0 or +/-1).
#[derive(Debug, Clone)]
pub struct SignalSet {
    kind: SignalSetKind,
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl SignalSet {
    /// Orthogonal M-PPM: point i is the i-th standard unit vector of R^M.
    pub fn ppm(size: usize) -> Result<Self, ConstellationError> {
        check_size(size)?;
        let points = (0..size).map(|i| unit_vector(size, i, 1.0)).collect();
        Ok(SignalSet {
            kind: SignalSetKind::Ppm,
            dim: size,
            points,
        })
    }

    /// Biorthogonal M-biPPM in D = M/2 dimensions, ordered
    /// e_1, ..., e_D, -e_1, ..., -e_D.
    pub fn bippm(size: usize) -> Result<Self, ConstellationError> {
        check_size(size)?;
        let dim = size / 2;
        let mut points: Vec<Vec<f64>> = (0..dim).map(|i| unit_vector(dim, i, 1.0)).collect();
        points.extend((0..dim).map(|i| unit_vector(dim, i, -1.0)));
        Ok(SignalSet {
            kind: SignalSetKind::BiPpm,
            dim,
            points,
        })
    }

    pub fn kind(&self) -> SignalSetKind {
        self.kind
    }

    /// Number of signal elements M.
    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Signal-space dimension D.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bits per symbol m = log2(M).
    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index]
    }
}

fn check_size(size: usize) -> Result<(), ConstellationError> {
    if size < 2 || !size.is_power_of_two() {
        return Err(ConstellationError::InvalidSize(size));
    }
    Ok(())
}

fn unit_vector(dim: usize, index: usize, sign: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[index] = sign;
    v
}

// ---------------------------------------------------------------------------
// Labelings
// ---------------------------------------------------------------------------

/// Bijective mapping between signal indices and m-bit binary labels.
///
/// Bit position 1 is the most significant bit of the written label, so the
/// label string of point `i` reads left to right as positions 1..=m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    bits_per_symbol: u32,
    label_of: Vec<u32>,
    index_of: Vec<usize>,
}

impl Labeling {
    /// Natural labeling.
    ///
    /// For PPM the label of e_i is the binary representation of i-1. For
    /// biPPM the most significant bit carries the sign (0 positive,
    /// 1 negative) and the remaining m-1 bits the position index.
    pub fn natural(set: &SignalSet) -> Self {
        let m = set.bits_per_symbol();
        let labels = match set.kind() {
            SignalSetKind::Ppm => (0..set.size() as u32).collect(),
            SignalSetKind::BiPpm => {
                let dim = set.dim() as u32;
                (0..dim)
                    .chain((0..dim).map(|i| (1 << (m - 1)) | i))
                    .collect()
            }
        };
        Self::from_labels(labels, m).expect("natural labeling is bijective")
    }

    /// Near-Gray labeling for biPPM.
    ///
    /// Positive elements take the binary position index (with leading 0);
    /// each negative element takes the bitwise complement of its positive
    /// counterpart's label. Antipodal pairs therefore receive complementary
    /// labels, and for 4-biPPM the construction is an exact Gray labeling.
    pub fn near_gray(set: &SignalSet) -> Result<Self, ConstellationError> {
        if set.kind() != SignalSetKind::BiPpm {
            return Err(ConstellationError::NearGrayRequiresBiPpm);
        }
        let m = set.bits_per_symbol();
        let mask = (1u32 << m) - 1;
        let dim = set.dim() as u32;
        let labels = (0..dim).chain((0..dim).map(|i| !i & mask)).collect();
        Ok(Self::from_labels(labels, m).expect("near-Gray labeling is bijective"))
    }

    /// Uniformly random bijective labeling, reproducible from `seed`.
    pub fn random(set: &SignalSet, seed: u64) -> Self {
        let m = set.bits_per_symbol();
        let mut labels: Vec<u32> = (0..set.size() as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        labels.shuffle(&mut rng);
        Self::from_labels(labels, m).expect("permutation of labels is bijective")
    }

    /// Builds a labeling from an explicit index -> label table, verifying
    /// that it is a bijection onto {0,1}^m.
    pub fn from_labels(
        label_of: Vec<u32>,
        bits_per_symbol: u32,
    ) -> Result<Self, ConstellationError> {
        let size = label_of.len();
        if size != 1usize << bits_per_symbol {
            return Err(ConstellationError::SizeMismatch {
                labels: size,
                points: 1usize << bits_per_symbol,
            });
        }
        let mut index_of = vec![usize::MAX; size];
        for (index, &label) in label_of.iter().enumerate() {
            if label as usize >= size || index_of[label as usize] != usize::MAX {
                return Err(ConstellationError::NotBijective);
            }
            index_of[label as usize] = index;
        }
        Ok(Labeling {
            bits_per_symbol,
            label_of,
            index_of,
        })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn size(&self) -> usize {
        self.label_of.len()
    }

    pub fn label_of(&self, index: usize) -> u32 {
        self.label_of[index]
    }

    pub fn index_of(&self, label: u32) -> usize {
        self.index_of[label as usize]
    }

    /// Bit value at position `mu` (1 = most significant) of the label of
    /// point `index`.
    pub fn bit(&self, index: usize, mu: usize) -> u8 {
        ((self.label_of[index] >> (self.bits_per_symbol as usize - mu)) & 1) as u8
    }

    /// Label of point `index` as a bit string, e.g. "110".
    pub fn label_string(&self, index: usize) -> String {
        let m = self.bits_per_symbol as usize;
        (1..=m)
            .map(|mu| char::from(b'0' + self.bit(index, mu)))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Constrained subsets
// ---------------------------------------------------------------------------

/// The half of a labeled signal set whose labels carry bit value `bit_value`
/// at position `bit_position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedSubset {
    pub bit_position: usize,
    pub bit_value: u8,
    pub member_indices: Vec<usize>,
}

/// Selects the M/2 signal indices whose label has value `b` at bit
/// position `mu` (1 = most significant).
pub fn constrained_subset(
    set: &SignalSet,
    labeling: &Labeling,
    mu: usize,
    b: u8,
) -> Result<ConstrainedSubset, ConstellationError> {
    if labeling.size() != set.size() {
        return Err(ConstellationError::SizeMismatch {
            labels: labeling.size(),
            points: set.size(),
        });
    }
    if mu == 0 || mu > labeling.bits_per_symbol() as usize {
        return Err(ConstellationError::BitPositionOutOfRange {
            mu,
            bits: labeling.bits_per_symbol(),
        });
    }
    if b > 1 {
        return Err(ConstellationError::InvalidBitValue(b));
    }
    let member_indices = (0..set.size())
        .filter(|&i| labeling.bit(i, mu) == b)
        .collect();
    Ok(ConstrainedSubset {
        bit_position: mu,
        bit_value: b,
        member_indices,
    })
}

/// Text table of a labeled constellation: index, signal vector, and one
/// label-string column per provided labeling.
pub fn labeled_table(set: &SignalSet, labelings: &[(&str, &Labeling)]) -> String {
    let mut out = String::new();
    out.push_str("  i  signal element");
    let width = 3 * set.dim() + 2;
    for _ in "signal element".len()..width {
        out.push(' ');
    }
    for (name, _) in labelings {
        out.push_str(&format!("  {name}"));
    }
    out.push('\n');
    for i in 0..set.size() {
        let coords: Vec<String> = set.point(i).iter().map(|x| format!("{x:+.0}")).collect();
        out.push_str(&format!("{:>3}  [{}]", i + 1, coords.join(" ")));
        for (name, lab) in labelings {
            out.push_str(&format!(
                "  {:>width$}",
                lab.label_string(i),
                width = name.len()
            ));
        }
        out.push('\n');
    }
    out
}
