//! Open books as a page plus an ordered word of signed Dehn twists, with
//! labeled binding components and stabilization moves.
//!
//! Word entries act on homology in word order: the first entry is applied
//! first. This is the one composition convention used project-wide.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

use crate::digest::hex_digest;
use crate::surface::{CurveRef, Feet, Sign, Surface, SurfaceError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpenBookError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("binding labels: {found} given, page has {expected} boundary components")]
    BindingCount { expected: usize, found: usize },
    #[error("duplicate binding label `{0}`")]
    DuplicateBinding(String),
    #[error("unknown binding label `{0}`")]
    UnknownBinding(String),
    #[error("stabilization curve must cross the new co-core once (coefficient ±1 on the new class)")]
    CoCoreCondition,
    #[error("twist curve `{id}` has length {found}, basis has length {expected}")]
    WordDimension {
        id: String,
        expected: usize,
        found: usize,
    },
}

/// One signed Dehn twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Twist {
    pub curve: CurveRef,
    pub sign: Sign,
}

/// Ordered word of signed Dehn twists. Order is significant and never
/// silently rearranged.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonodromyWord {
    pub twists: Vec<Twist>,
}

impl MonodromyWord {
    pub fn empty() -> MonodromyWord {
        MonodromyWord { twists: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }
}

/// Binding relabeling produced by a stabilization.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelabelMap {
    /// Old label → new label, for labels that changed. Absent labels are
    /// unchanged.
    pub renames: BTreeMap<String, String>,
    /// Label of a freshly created binding component, if any.
    pub new_binding: Option<String>,
}

impl RelabelMap {
    pub fn apply(&self, label: &str) -> String {
        self.renames
            .get(label)
            .cloned()
            .unwrap_or_else(|| label.to_string())
    }
}

/// Action of a twist word on first homology, stored column-wise:
/// `columns[j]` is the image of the j-th basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyAction {
    pub columns: Vec<Vec<i64>>,
}

impl HomologyAction {
    pub fn identity(dim: usize) -> HomologyAction {
        let columns = (0..dim)
            .map(|j| {
                let mut v = vec![0; dim];
                v[j] = 1;
                v
            })
            .collect();
        HomologyAction { columns }
    }

    pub fn is_identity(&self) -> bool {
        *self == HomologyAction::identity(self.columns.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenBook {
    pub page: Surface,
    pub monodromy: MonodromyWord,
    pub bindings: Vec<String>,
    pub sub_binding_marks: BTreeSet<String>,
}

impl OpenBook {
    pub fn new(page: Surface, bindings: Vec<String>) -> Result<OpenBook, OpenBookError> {
        if bindings.len() != page.boundary_count() {
            return Err(OpenBookError::BindingCount {
                expected: page.boundary_count(),
                found: bindings.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for label in &bindings {
            if !seen.insert(label.clone()) {
                return Err(OpenBookError::DuplicateBinding(label.clone()));
            }
        }
        Ok(OpenBook {
            page,
            monodromy: MonodromyWord::empty(),
            bindings,
            sub_binding_marks: BTreeSet::new(),
        })
    }

    /// Open book with default binding labels `B1…Bb` and empty word.
    pub fn with_default_bindings(page: Surface) -> OpenBook {
        let bindings = (1..=page.boundary_count())
            .map(|i| format!("B{i}"))
            .collect();
        OpenBook::new(page, bindings).expect("default labels are distinct")
    }

    pub fn set_word(mut self, word: MonodromyWord) -> Result<OpenBook, OpenBookError> {
        for twist in &word.twists {
            if twist.curve.homology.len() != self.page.dim() {
                return Err(OpenBookError::WordDimension {
                    id: twist.curve.id.clone(),
                    expected: self.page.dim(),
                    found: twist.curve.homology.len(),
                });
            }
        }
        self.monodromy = word;
        Ok(self)
    }

    pub fn binding_index(&self, label: &str) -> Option<usize> {
        self.bindings.iter().position(|b| b == label)
    }

    /// Smallest `B<n>` not already in use.
    pub fn fresh_binding_label(&self) -> String {
        let used: BTreeSet<&str> = self.bindings.iter().map(String::as_str).collect();
        let mut n = self.bindings.len() + 1;
        loop {
            let candidate = format!("B{n}");
            if !used.contains(candidate.as_str()) {
                return candidate;
            }
            n += 1;
        }
    }

    fn stabilize(
        &self,
        feet: Feet,
        curve: CurveRef,
        sign: Sign,
    ) -> Result<(OpenBook, RelabelMap), OpenBookError> {
        let (page, embedding) = self.page.attach_handle(feet)?;
        if curve.homology.len() != page.dim() {
            return Err(OpenBookError::WordDimension {
                id: curve.id.clone(),
                expected: page.dim(),
                found: curve.homology.len(),
            });
        }
        if curve.homology[embedding.cocore_index()].abs() != 1 {
            return Err(OpenBookError::CoCoreCondition);
        }

        let mut twists = Vec::with_capacity(self.monodromy.len() + 1);
        for twist in &self.monodromy.twists {
            twists.push(Twist {
                curve: CurveRef {
                    homology: embedding.embed(&twist.curve.homology)?,
                    ..twist.curve.clone()
                },
                sign: twist.sign,
            });
        }
        twists.push(Twist { curve, sign });

        let mut relabel = RelabelMap::default();
        let mut bindings = self.bindings.clone();
        let mut marks = self.sub_binding_marks.clone();
        match feet {
            Feet::SameBoundary { .. } => {
                let fresh = self.fresh_binding_label();
                bindings.push(fresh.clone());
                relabel.new_binding = Some(fresh);
            }
            Feet::DifferentBoundaries { first, second } => {
                let j = first.min(second);
                let k = first.max(second);
                let kept = bindings[j - 1].clone();
                let removed = bindings.remove(k - 1);
                if marks.remove(&removed) {
                    marks.insert(kept.clone());
                }
                relabel.renames.insert(removed, kept);
            }
        }

        Ok((
            OpenBook {
                page,
                monodromy: MonodromyWord { twists },
                bindings,
                sub_binding_marks: marks,
            },
            relabel,
        ))
    }

    /// Positive stabilization: attach a 1-handle and append a right-handed
    /// twist along `c`. `c` must cross the co-core of the new handle exactly
    /// once. Does not change the supported contact structure; certificates
    /// record this rather than verify it.
    pub fn positive_stabilize(
        &self,
        feet: Feet,
        c: CurveRef,
    ) -> Result<(OpenBook, RelabelMap), OpenBookError> {
        self.stabilize(feet, c, Sign::Plus)
    }

    /// Negative stabilization: as above with a left-handed twist. The
    /// supported contact structure may change.
    pub fn negative_stabilize(
        &self,
        feet: Feet,
        c: CurveRef,
    ) -> Result<(OpenBook, RelabelMap), OpenBookError> {
        self.stabilize(feet, c, Sign::Minus)
    }

    /// Fold of the transvections of the word, in word order.
    pub fn monodromy_action(&self) -> HomologyAction {
        let dim = self.page.dim();
        let mut action = HomologyAction::identity(dim);
        for twist in &self.monodromy.twists {
            for column in &mut action.columns {
                *column = self
                    .page
                    .twist_action(&twist.curve, twist.sign, column)
                    .expect("word curves validated against the page");
            }
        }
        action
    }

    pub fn digest(&self) -> String {
        let mut parts: Vec<String> = vec![
            self.page.genus().to_string(),
            self.page.boundary_count().to_string(),
        ];
        for twist in &self.monodromy.twists {
            parts.push(format!(
                "{}|{}|{}|{:?}",
                twist.curve.id, twist.sign, twist.curve.kind, twist.curve.homology
            ));
        }
        parts.push(self.bindings.join(","));
        parts.push(
            self.sub_binding_marks
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(","),
        );
        hex_digest(parts)
    }
}

impl fmt::Display for OpenBook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(g={}, b={}, |word|={})",
            self.page.genus(),
            self.page.boundary_count(),
            self.monodromy.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{BasisLabel, CurveKind};

    fn disk_book() -> OpenBook {
        OpenBook::with_default_bindings(Surface::new(0, 1).unwrap())
    }

    fn hopf_curve(new_dim: usize) -> CurveRef {
        let mut homology = vec![0; new_dim];
        homology[new_dim - 1] = 1;
        CurveRef {
            id: "c".into(),
            homology,
            kind: CurveKind::StabilizationCurve,
            orientation: Sign::Plus,
        }
    }

    #[test]
    fn hopf_stabilization_of_the_disk() {
        let ob = disk_book();
        let (ob2, relabel) = ob
            .positive_stabilize(Feet::SameBoundary { boundary: 1 }, hopf_curve(1))
            .unwrap();
        assert_eq!(ob2.page.genus(), 0);
        assert_eq!(ob2.page.boundary_count(), 2);
        assert_eq!(ob2.page.euler_char(), 0);
        assert_eq!(ob2.monodromy.len(), 1);
        assert_eq!(ob2.monodromy.twists[0].sign, Sign::Plus);
        assert_eq!(relabel.new_binding.as_deref(), Some("B2"));
        assert_eq!(ob2.bindings, vec!["B1".to_string(), "B2".to_string()]);
    }

    #[test]
    fn negative_stabilization_differs_only_in_sign() {
        let ob = disk_book();
        let (pos, _) = ob
            .positive_stabilize(Feet::SameBoundary { boundary: 1 }, hopf_curve(1))
            .unwrap();
        let (neg, _) = ob
            .negative_stabilize(Feet::SameBoundary { boundary: 1 }, hopf_curve(1))
            .unwrap();
        assert_eq!(pos.page, neg.page);
        assert_eq!(pos.bindings, neg.bindings);
        assert_eq!(pos.monodromy.twists[0].curve, neg.monodromy.twists[0].curve);
        assert_eq!(neg.monodromy.twists[0].sign, Sign::Minus);
        assert_eq!(neg.page.euler_char(), ob.page.euler_char() - 1);
    }

    #[test]
    fn cocore_condition_enforced() {
        let ob = disk_book();
        let mut c = hopf_curve(1);
        c.homology[0] = 2;
        assert_eq!(
            ob.positive_stabilize(Feet::SameBoundary { boundary: 1 }, c),
            Err(OpenBookError::CoCoreCondition)
        );
    }

    #[test]
    fn empty_word_acts_as_identity() {
        let ob = OpenBook::with_default_bindings(Surface::new(2, 2).unwrap());
        assert!(ob.monodromy_action().is_identity());
    }

    #[test]
    fn single_twist_action_matches_hand_computed_block() {
        let page = Surface::new(1, 1).unwrap();
        let a1 = CurveRef {
            id: "a1".into(),
            homology: page.unit_class(BasisLabel::A(1)).unwrap(),
            kind: CurveKind::LinkComponent,
            orientation: Sign::Plus,
        };
        let ob = OpenBook::with_default_bindings(page)
            .set_word(MonodromyWord {
                twists: vec![Twist {
                    curve: a1,
                    sign: Sign::Plus,
                }],
            })
            .unwrap();
        // Columns of [[1, -1], [0, 1]] in (a1, b1) coordinates.
        assert_eq!(
            ob.monodromy_action().columns,
            vec![vec![1, 0], vec![-1, 1]]
        );
    }

    #[test]
    fn inverse_pair_cancels() {
        let page = Surface::new(1, 2).unwrap();
        let c = CurveRef {
            id: "c".into(),
            homology: vec![1, 2, 3],
            kind: CurveKind::LinkComponent,
            orientation: Sign::Plus,
        };
        let ob = OpenBook::with_default_bindings(page)
            .set_word(MonodromyWord {
                twists: vec![
                    Twist {
                        curve: c.clone(),
                        sign: Sign::Plus,
                    },
                    Twist {
                        curve: c,
                        sign: Sign::Minus,
                    },
                ],
            })
            .unwrap();
        assert!(ob.monodromy_action().is_identity());
    }

    #[test]
    fn stabilization_ledger_round_trip() {
        let page = Surface::new(1, 2).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let (ob2, _) = ob
            .positive_stabilize(Feet::SameBoundary { boundary: 2 }, hopf_curve(4))
            .unwrap();
        // Dropping the appended twist and the handle restores the ledger.
        assert_eq!(ob2.page.genus(), ob.page.genus());
        assert_eq!(ob2.page.boundary_count() - 1, ob.page.boundary_count());
        assert_eq!(ob2.monodromy.len() - 1, ob.monodromy.len());
        let trimmed: Vec<Vec<i64>> = ob2.monodromy.twists[..ob.monodromy.len()]
            .iter()
            .map(|t| t.curve.homology[..ob.page.dim()].to_vec())
            .collect();
        let original: Vec<Vec<i64>> = ob
            .monodromy
            .twists
            .iter()
            .map(|t| t.curve.homology.clone())
            .collect();
        assert_eq!(trimmed, original);
    }

    #[test]
    fn merging_feet_relabel_bindings() {
        let page = Surface::new(0, 3).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let mut c = CurveRef {
            id: "c".into(),
            homology: vec![0; 3],
            kind: CurveKind::StabilizationCurve,
            orientation: Sign::Plus,
        };
        c.homology[0] = 1; // new a-class coordinate
        let (ob2, relabel) = ob
            .positive_stabilize(
                Feet::DifferentBoundaries {
                    first: 2,
                    second: 3,
                },
                c,
            )
            .unwrap();
        assert_eq!(ob2.page.genus(), 1);
        assert_eq!(ob2.bindings, vec!["B1".to_string(), "B2".to_string()]);
        assert_eq!(relabel.apply("B3"), "B2");
        assert_eq!(relabel.apply("B1"), "B1");
    }
}
