//! Pages of open books as combinatorial surfaces.
//!
//! A surface of genus `g` with `b` boundary components carries the standard
//! first-homology basis `a_1, b_1, …, a_g, b_g, d_1, …, d_{b-1}`, in that
//! coordinate order. The intersection pairing is symplectic on the handle
//! classes (`⟨a_i, b_i⟩ = +1`) and zero on the boundary classes. The class of
//! the last boundary component is `-(d_1 + … + d_{b-1})`.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("page must have at least one boundary component")]
    NoBoundary,
    #[error("homology vector has length {found}, basis has length {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("boundary index {index} out of range 1..={count}")]
    InvalidBoundary { index: usize, count: usize },
    #[error("handle feet must touch two distinct boundary components")]
    IdenticalFeet,
}

/// Orientation or twist sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            other => Err(format!("invalid sign `{other}`")),
        }
    }
}

/// One slot of the homology basis. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    A(usize),
    B(usize),
    D(usize),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::A(i) => write!(f, "a{i}"),
            BasisLabel::B(i) => write!(f, "b{i}"),
            BasisLabel::D(i) => write!(f, "d{i}"),
        }
    }
}

impl FromStr for BasisLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, tail) = s.split_at(1.min(s.len()));
        let index: usize = tail
            .parse()
            .map_err(|_| format!("invalid basis label `{s}`"))?;
        if index == 0 {
            return Err(format!("invalid basis label `{s}`"));
        }
        match head {
            "a" => Ok(BasisLabel::A(index)),
            "b" => Ok(BasisLabel::B(index)),
            "d" => Ok(BasisLabel::D(index)),
            _ => Err(format!("invalid basis label `{s}`")),
        }
    }
}

/// What a named curve on the page stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    LinkComponent,
    StabilizationCurve,
    BoundaryParallel,
    BindingLabel,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::LinkComponent => "link-component",
            CurveKind::StabilizationCurve => "stabilization-curve",
            CurveKind::BoundaryParallel => "boundary-parallel",
            CurveKind::BindingLabel => "binding-label",
        })
    }
}

impl FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "link-component" => Ok(CurveKind::LinkComponent),
            "stabilization-curve" => Ok(CurveKind::StabilizationCurve),
            "boundary-parallel" => Ok(CurveKind::BoundaryParallel),
            "binding-label" => Ok(CurveKind::BindingLabel),
            other => Err(format!("invalid curve kind `{other}`")),
        }
    }
}

/// A named curve on a page: homology class plus placement metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRef {
    pub id: String,
    pub homology: Vec<i64>,
    pub kind: CurveKind,
    pub orientation: Sign,
}

/// Where the feet of an attached 1-handle land. Boundary indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feet {
    SameBoundary { boundary: usize },
    DifferentBoundaries { first: usize, second: usize },
}

/// Coordinate map from the basis before a handle attachment into the basis
/// after it. Old vectors embed by copying surviving coordinates and zero
/// padding the new ones; a boundary class whose component loses its label
/// is dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisEmbedding {
    pub old_dim: usize,
    pub new_dim: usize,
    targets: Vec<Option<usize>>,
    /// New coordinates with no preimage; the first one is the class crossed
    /// once by the co-core of the attached handle.
    pub new_indices: Vec<usize>,
}

impl BasisEmbedding {
    pub fn embed(&self, v: &[i64]) -> Result<Vec<i64>, SurfaceError> {
        if v.len() != self.old_dim {
            return Err(SurfaceError::DimensionMismatch {
                expected: self.old_dim,
                found: v.len(),
            });
        }
        let mut out = vec![0; self.new_dim];
        for (i, &coeff) in v.iter().enumerate() {
            if let Some(j) = self.targets[i] {
                out[j] = coeff;
            }
        }
        Ok(out)
    }

    /// Coordinate of the co-core class of the attached handle.
    pub fn cocore_index(&self) -> usize {
        self.new_indices[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    genus: usize,
    boundary_count: usize,
}

impl Surface {
    pub fn new(genus: usize, boundary_count: usize) -> Result<Surface, SurfaceError> {
        if boundary_count == 0 {
            return Err(SurfaceError::NoBoundary);
        }
        Ok(Surface {
            genus,
            boundary_count,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    pub fn euler_char(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_count as i64
    }

    /// Basis length: `2g + b - 1`.
    pub fn dim(&self) -> usize {
        2 * self.genus + self.boundary_count - 1
    }

    pub fn basis(&self) -> Vec<BasisLabel> {
        let mut basis = Vec::with_capacity(self.dim());
        for i in 1..=self.genus {
            basis.push(BasisLabel::A(i));
            basis.push(BasisLabel::B(i));
        }
        for i in 1..self.boundary_count {
            basis.push(BasisLabel::D(i));
        }
        basis
    }

    pub fn basis_index(&self, label: BasisLabel) -> Option<usize> {
        match label {
            BasisLabel::A(i) if i >= 1 && i <= self.genus => Some(2 * (i - 1)),
            BasisLabel::B(i) if i >= 1 && i <= self.genus => Some(2 * (i - 1) + 1),
            BasisLabel::D(i) if i >= 1 && i < self.boundary_count => {
                Some(2 * self.genus + (i - 1))
            }
            _ => None,
        }
    }

    pub fn unit_class(&self, label: BasisLabel) -> Option<Vec<i64>> {
        self.basis_index(label).map(|i| {
            let mut v = vec![0; self.dim()];
            v[i] = 1;
            v
        })
    }

    /// Homology class of the given boundary component (1-based). The last
    /// component carries the class `-(d_1 + … + d_{b-1})`.
    pub fn boundary_class(&self, boundary: usize) -> Result<Vec<i64>, SurfaceError> {
        if boundary == 0 || boundary > self.boundary_count {
            return Err(SurfaceError::InvalidBoundary {
                index: boundary,
                count: self.boundary_count,
            });
        }
        let mut v = vec![0; self.dim()];
        if boundary < self.boundary_count {
            v[2 * self.genus + boundary - 1] = 1;
        } else {
            for i in 0..self.boundary_count - 1 {
                v[2 * self.genus + i] = -1;
            }
        }
        Ok(v)
    }

    fn check_dim(&self, v: &[i64]) -> Result<(), SurfaceError> {
        if v.len() != self.dim() {
            return Err(SurfaceError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Algebraic intersection number. Bilinear and antisymmetric; boundary
    /// classes pair to zero with everything.
    pub fn intersection(&self, x: &[i64], y: &[i64]) -> Result<i64, SurfaceError> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut total = 0;
        for i in 0..self.genus {
            total += x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i];
        }
        Ok(total)
    }

    /// Transvection action of a Dehn twist along `c`. A positive
    /// (right-handed) twist maps `x ↦ x + ⟨x,c⟩·c`; a negative twist
    /// subtracts instead. This sign convention is fixed project-wide.
    pub fn twist_action(
        &self,
        c: &CurveRef,
        sign: Sign,
        x: &[i64],
    ) -> Result<Vec<i64>, SurfaceError> {
        self.check_dim(&c.homology)?;
        self.check_dim(x)?;
        let pairing = self.intersection(x, &c.homology)?;
        let factor = sign.as_i64() * pairing;
        Ok(x.iter()
            .zip(c.homology.iter())
            .map(|(&xi, &ci)| xi + factor * ci)
            .collect())
    }

    /// Attach a 1-handle. Same-boundary feet split one boundary component in
    /// two (`b+1`, genus fixed); feet on different components merge them
    /// (`b-1`, genus `+1`). Euler characteristic drops by exactly one either
    /// way. Returns the new surface and the basis embedding for old vectors.
    pub fn attach_handle(&self, feet: Feet) -> Result<(Surface, BasisEmbedding), SurfaceError> {
        let old_dim = self.dim();
        match feet {
            Feet::SameBoundary { boundary } => {
                if boundary == 0 || boundary > self.boundary_count {
                    return Err(SurfaceError::InvalidBoundary {
                        index: boundary,
                        count: self.boundary_count,
                    });
                }
                let next = Surface {
                    genus: self.genus,
                    boundary_count: self.boundary_count + 1,
                };
                let new_dim = next.dim();
                let targets = (0..old_dim).map(Some).collect();
                let embedding = BasisEmbedding {
                    old_dim,
                    new_dim,
                    targets,
                    new_indices: vec![new_dim - 1],
                };
                Ok((next, embedding))
            }
            Feet::DifferentBoundaries { first, second } => {
                for index in [first, second] {
                    if index == 0 || index > self.boundary_count {
                        return Err(SurfaceError::InvalidBoundary {
                            index,
                            count: self.boundary_count,
                        });
                    }
                }
                if first == second {
                    return Err(SurfaceError::IdenticalFeet);
                }
                let k = first.max(second);
                let next = Surface {
                    genus: self.genus + 1,
                    boundary_count: self.boundary_count - 1,
                };
                let new_dim = next.dim();
                let mut targets = vec![None; old_dim];
                // Old handle classes keep their slots.
                for (i, slot) in targets.iter_mut().take(2 * self.genus).enumerate() {
                    *slot = Some(i);
                }
                // Boundary components renumber with `k` removed; a labeled
                // component that becomes the (label-less) last one drops.
                for i in 1..self.boundary_count {
                    if i == k {
                        continue;
                    }
                    let ni = if i < k { i } else { i - 1 };
                    if ni < next.boundary_count {
                        targets[2 * self.genus + i - 1] = Some(2 * next.genus + ni - 1);
                    }
                }
                let embedding = BasisEmbedding {
                    old_dim,
                    new_dim,
                    targets,
                    new_indices: vec![2 * self.genus, 2 * self.genus + 1],
                };
                Ok((next, embedding))
            }
        }
    }
}
