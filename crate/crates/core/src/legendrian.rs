//! Legendrian links on pages: per-component framing ledger, classical
//! invariant arithmetic, and the push-off relations.
//!
//! Classical invariants (`tb`, `rot`, `sl`) exist only for null-homologous
//! components. The framing offset is the contact framing minus the page
//! framing, tracked as an integer ledger; no operation ever raises it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

use crate::digest::hex_digest;
use crate::openbook::OpenBook;
use crate::surface::{CurveRef, Sign};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LegendrianError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("component `{0}` is not null-homologous; classical invariants are absent")]
    InvariantsAbsent(String),
}

/// One link component placed on a page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkComponent {
    pub id: String,
    pub curve: CurveRef,
    pub orientation: Sign,
    /// Components share a parallel class iff they are parallel copies of one
    /// another on the page.
    pub parallel_class: String,
    /// Position inside the parallel class; 1 is innermost, increasing outward.
    pub class_index: u32,
    pub nearest_binding: String,
    /// Contact framing minus page framing.
    pub framing_offset: i64,
    pub null_homologous: bool,
    pub tb: Option<i64>,
    pub rot: Option<i64>,
}

/// A Legendrian link on the page of an open book. A component with framing
/// offset zero sits so that page framing and contact framing agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkPlacement {
    pub open_book: OpenBook,
    pub components: Vec<LinkComponent>,
}

/// One invariant violation, as data rather than an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub component: Option<String>,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.component {
            Some(id) => write!(f, "{id}: {}", self.rule),
            None => f.write_str(&self.rule),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransverseComponent {
    pub id: String,
    pub sl: Option<i64>,
    pub loose: Option<bool>,
}

/// Classical-invariant record of a transverse link. `sl` is present only for
/// null-homologous components; looseness is an input flag, never computed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransverseLinkRecord {
    pub components: Vec<TransverseComponent>,
}

impl LinkPlacement {
    pub fn component(&self, id: &str) -> Result<&LinkComponent, LegendrianError> {
        self.components
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| LegendrianError::UnknownComponent(id.to_string()))
    }

    /// Legendrian stabilization of one component: `tb` drops by one, `rot`
    /// moves by the stabilization sign, and the framing offset drops by one
    /// (a stabilization adds a left twist relative to the page framing).
    pub fn stabilize_legendrian(
        &self,
        id: &str,
        sign: Sign,
    ) -> Result<LinkPlacement, LegendrianError> {
        self.component(id)?;
        let components = self
            .components
            .iter()
            .map(|c| {
                if c.id == id {
                    LinkComponent {
                        tb: c.tb.map(|tb| tb - 1),
                        rot: c.rot.map(|rot| rot + sign.as_i64()),
                        framing_offset: c.framing_offset - 1,
                        ..c.clone()
                    }
                } else {
                    c.clone()
                }
            })
            .collect();
        Ok(LinkPlacement {
            open_book: self.open_book.clone(),
            components,
        })
    }

    /// Self-linking number of the transverse push-off: `tb - rot` for the
    /// positive push-off, `tb + rot` for the negative one.
    pub fn pushoff_invariants(&self, id: &str, sign: Sign) -> Result<i64, LegendrianError> {
        let component = self.component(id)?;
        let (tb, rot) = match (component.tb, component.rot) {
            (Some(tb), Some(rot)) => (tb, rot),
            _ => return Err(LegendrianError::InvariantsAbsent(id.to_string())),
        };
        Ok(tb - sign.as_i64() * rot)
    }

    /// Checks every structural invariant and returns the violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut seen_ids = BTreeSet::new();
        let dim = self.open_book.page.dim();

        for c in &self.components {
            if !seen_ids.insert(c.id.clone()) {
                violations.push(Violation {
                    component: Some(c.id.clone()),
                    rule: "duplicate component id".into(),
                });
            }
            if self.open_book.binding_index(&c.nearest_binding).is_none() {
                violations.push(Violation {
                    component: Some(c.id.clone()),
                    rule: format!("nearest binding `{}` does not resolve", c.nearest_binding),
                });
            }
            if c.curve.homology.len() != dim {
                violations.push(Violation {
                    component: Some(c.id.clone()),
                    rule: format!(
                        "curve homology has length {}, basis has length {dim}",
                        c.curve.homology.len()
                    ),
                });
            }
            if c.null_homologous != (c.tb.is_some() && c.rot.is_some()) {
                violations.push(Violation {
                    component: Some(c.id.clone()),
                    rule: "tb/rot must be present exactly when null-homologous".into(),
                });
            }
            if c.curve.kind == crate::surface::CurveKind::BoundaryParallel
                && c.curve.homology.len() == dim
                && c.curve.homology[..2 * self.open_book.page.genus()]
                    .iter()
                    .any(|&x| x != 0)
            {
                violations.push(Violation {
                    component: Some(c.id.clone()),
                    rule: "boundary-parallel curve touches handle classes".into(),
                });
            }
            if c.orientation != c.curve.orientation {
                violations.push(Violation {
                    component: Some(c.id.clone()),
                    rule: "component orientation disagrees with its curve".into(),
                });
            }
        }

        // Parallel-class structure: contiguous indices from 1, and homology
        // classes that agree up to orientation.
        let mut classes: BTreeMap<&str, Vec<&LinkComponent>> = BTreeMap::new();
        for c in &self.components {
            classes.entry(&c.parallel_class).or_default().push(c);
        }
        for (class, members) in classes {
            let mut indices: Vec<u32> = members.iter().map(|c| c.class_index).collect();
            indices.sort_unstable();
            let expected: Vec<u32> = (1..=members.len() as u32).collect();
            if indices != expected {
                violations.push(Violation {
                    component: None,
                    rule: format!(
                        "parallel class `{class}` indices {indices:?} are not 1..={}",
                        members.len()
                    ),
                });
            }
            if members.len() > 1 {
                let oriented = |c: &LinkComponent| -> Vec<i64> {
                    c.curve
                        .homology
                        .iter()
                        .map(|&x| c.orientation.as_i64() * x)
                        .collect()
                };
                let reference = oriented(members[0]);
                for member in &members[1..] {
                    if member.curve.homology.len() == dim
                        && members[0].curve.homology.len() == dim
                        && oriented(member) != reference
                    {
                        violations.push(Violation {
                            component: Some(member.id.clone()),
                            rule: format!(
                                "parallel class `{class}` members are not homology-parallel"
                            ),
                        });
                    }
                }
            }
        }
        violations
    }

    pub fn digest(&self) -> String {
        let mut parts = vec![self.open_book.digest()];
        for c in &self.components {
            parts.push(format!(
                "{}|{:?}|{}|{}|{}|{}|{}|{}|{:?}|{:?}",
                c.id,
                c.curve.homology,
                c.orientation,
                c.parallel_class,
                c.class_index,
                c.nearest_binding,
                c.framing_offset,
                c.null_homologous,
                c.tb,
                c.rot,
            ));
        }
        hex_digest(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{CurveKind, Surface};

    fn placement_with(tb: i64, rot: i64) -> LinkPlacement {
        let page = Surface::new(0, 2).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let curve = CurveRef {
            id: "k1".into(),
            homology: vec![2],
            kind: CurveKind::LinkComponent,
            orientation: Sign::Plus,
        };
        LinkPlacement {
            open_book: ob,
            components: vec![LinkComponent {
                id: "K1".into(),
                curve,
                orientation: Sign::Plus,
                parallel_class: "p1".into(),
                class_index: 1,
                nearest_binding: "B1".into(),
                framing_offset: 0,
                null_homologous: true,
                tb: Some(tb),
                rot: Some(rot),
            }],
        }
    }

    #[test]
    fn stabilization_arithmetic() {
        let p = placement_with(0, 0);
        let plus = p.stabilize_legendrian("K1", Sign::Plus).unwrap();
        let c = plus.component("K1").unwrap();
        assert_eq!((c.tb, c.rot), (Some(-1), Some(1)));
        assert_eq!(c.framing_offset, -1);

        let minus = p.stabilize_legendrian("K1", Sign::Minus).unwrap();
        let c = minus.component("K1").unwrap();
        assert_eq!((c.tb, c.rot), (Some(-1), Some(-1)));
    }

    #[test]
    fn stabilizations_commute() {
        let p = placement_with(0, 0);
        let pm = p
            .stabilize_legendrian("K1", Sign::Plus)
            .unwrap()
            .stabilize_legendrian("K1", Sign::Minus)
            .unwrap();
        let mp = p
            .stabilize_legendrian("K1", Sign::Minus)
            .unwrap()
            .stabilize_legendrian("K1", Sign::Plus)
            .unwrap();
        assert_eq!(pm, mp);
        let c = pm.component("K1").unwrap();
        assert_eq!((c.tb, c.rot), (Some(-2), Some(0)));
    }

    #[test]
    fn unknown_component_is_an_error() {
        let p = placement_with(0, 0);
        assert_eq!(
            p.stabilize_legendrian("K9", Sign::Plus),
            Err(LegendrianError::UnknownComponent("K9".into()))
        );
    }

    #[test]
    fn pushoff_formula_instances() {
        assert_eq!(
            placement_with(-1, 0)
                .pushoff_invariants("K1", Sign::Plus)
                .unwrap(),
            -1
        );
        // sl of the positive push-off is blind to a negative stabilization.
        assert_eq!(
            placement_with(-2, -1)
                .pushoff_invariants("K1", Sign::Plus)
                .unwrap(),
            -1
        );
        assert_eq!(
            placement_with(-1, 0)
                .pushoff_invariants("K1", Sign::Minus)
                .unwrap(),
            -1
        );
    }

    #[test]
    fn pushoff_requires_invariants() {
        let mut p = placement_with(0, 0);
        p.components[0].null_homologous = false;
        p.components[0].tb = None;
        p.components[0].rot = None;
        assert_eq!(
            p.pushoff_invariants("K1", Sign::Plus),
            Err(LegendrianError::InvariantsAbsent("K1".into()))
        );
    }

    #[test]
    fn validate_accepts_well_formed_placement() {
        assert!(placement_with(0, 0).validate().is_empty());
    }

    #[test]
    fn validate_flags_duplicate_class_index() {
        let mut p = placement_with(0, 0);
        let mut second = p.components[0].clone();
        second.id = "K2".into();
        second.class_index = 1;
        p.components.push(second);
        let violations = p.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].rule.contains("indices"));
    }

    #[test]
    fn validate_flags_invariants_on_non_null_homologous() {
        let mut p = placement_with(0, 0);
        p.components[0].null_homologous = false;
        let violations = p.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].rule.contains("null-homologous"));
    }
}
