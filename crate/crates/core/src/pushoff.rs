//! Realizing a Legendrian link on a page as a sub-binding: case
//! classification, ordered stabilization schedules built from arcs "to the
//! right", replay, and permutation checks.
//!
//! A schedule never attaches a handle with feet on two different boundary
//! components, so the page genus is pinned for the whole replay and the
//! boundary count grows by exactly one per step.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::digest::hex_digest;
use crate::legendrian::{LinkComponent, LinkPlacement, Violation};
use crate::openbook::{HomologyAction, OpenBook, OpenBookError};
use crate::surface::{CurveKind, CurveRef, Feet, Sign, Surface, SurfaceError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PushoffError {
    #[error("invalid placement: {0:?}")]
    InvalidPlacement(Vec<Violation>),
    #[error("framing offset must be zero (component `{0}`)")]
    NonzeroFramingOffset(String),
    #[error("empty link")]
    EmptyLink,
    #[error("unreachable target binding `{0}`")]
    UnreachableTarget(String),
    #[error("certificate was not built from this placement")]
    CertificateMismatch,
    #[error("ledger replay mismatch: {0}")]
    LedgerMismatch(String),
    #[error(transparent)]
    OpenBook(#[from] OpenBookError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation must rearrange step indices 0..{expected}")]
    NotAPermutation { expected: usize },
    #[error("step {step} must come after step {requires} (dependency constraint)")]
    DependencyViolated { step: usize, requires: usize },
}

/// The six cases of the realization algorithm. `1*` means planar page,
/// `*b*` means some parallel class has at least two members, `*b(ii)` means
/// some class mixes orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    C1a,
    C1bi,
    C1bii,
    C2a,
    C2bi,
    C2bii,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::C1a => "1a",
            Case::C1bi => "1bi",
            Case::C1bii => "1bii",
            Case::C2a => "2a",
            Case::C2bi => "2bi",
            Case::C2bii => "2bii",
        })
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1a" => Ok(Case::C1a),
            "1bi" => Ok(Case::C1bi),
            "1bii" => Ok(Case::C1bii),
            "2a" => Ok(Case::C2a),
            "2bi" => Ok(Case::C2bi),
            "2bii" => Ok(Case::C2bii),
            other => Err(format!("invalid case tag `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Boundary-parallel positive stabilization inserted at an orientation
    /// reversal inside a parallel class.
    AuxBoundaryParallel,
    /// The push-off stabilization of one link component.
    Pushoff,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::AuxBoundaryParallel => "aux",
            StepKind::Pushoff => "pushoff",
        })
    }
}

impl FromStr for StepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aux" => Ok(StepKind::AuxBoundaryParallel),
            "pushoff" => Ok(StepKind::Pushoff),
            other => Err(format!("invalid step kind `{other}`")),
        }
    }
}

/// One positive stabilization in a schedule. Steps are numbered from 1.
/// `depends_on` and `disjoint_from` partition all prior step indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleStep {
    pub index: usize,
    pub kind: StepKind,
    pub target_component: Option<String>,
    /// Binding label the same-boundary handle feet land on.
    pub feet_binding: String,
    pub twist_curve: CurveRef,
    /// Predicted label of the binding component the step creates.
    pub new_binding: String,
    pub depends_on: BTreeSet<usize>,
    pub disjoint_from: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerRow {
    pub step: usize,
    pub genus: usize,
    pub boundary_count: usize,
    pub euler_char: i64,
    pub word_len: usize,
}

/// Replayable record of a realization run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub input_digest: String,
    pub case: Case,
    pub initial_genus: usize,
    pub initial_boundary: usize,
    pub initial_word_len: usize,
    pub steps: Vec<ScheduleStep>,
    /// Filled by `apply_schedule`; one row per step.
    pub ledger: Vec<LedgerRow>,
    pub sub_binding_map: BTreeMap<String, String>,
    /// Components negatively stabilized by aux steps, with counts.
    pub negative_stabilizations: BTreeMap<String, u32>,
    pub order_free: bool,
    pub tags: Vec<String>,
}

impl Certificate {
    pub fn digest(&self) -> String {
        let mut parts = vec![
            self.input_digest.clone(),
            self.case.to_string(),
            format!(
                "{}|{}|{}",
                self.initial_genus, self.initial_boundary, self.initial_word_len
            ),
        ];
        for step in &self.steps {
            parts.push(format!(
                "{}|{}|{:?}|{}|{}|{:?}|{:?}|{:?}",
                step.index,
                step.kind,
                step.target_component,
                step.feet_binding,
                step.new_binding,
                step.twist_curve.homology,
                step.depends_on,
                step.disjoint_from,
            ));
        }
        for row in &self.ledger {
            parts.push(format!(
                "{}|{}|{}|{}|{}",
                row.step, row.genus, row.boundary_count, row.euler_char, row.word_len
            ));
        }
        for (component, binding) in &self.sub_binding_map {
            parts.push(format!("{component}->{binding}"));
        }
        hex_digest(parts)
    }

    /// Ledger a faithful replay must produce, derived from the initial page
    /// alone: all feet are same-boundary, so each step adds one boundary
    /// component, one word letter, and lowers the Euler characteristic by 1.
    pub fn expected_ledger(&self) -> Vec<LedgerRow> {
        (1..=self.steps.len())
            .map(|i| LedgerRow {
                step: i,
                genus: self.initial_genus,
                boundary_count: self.initial_boundary + i,
                euler_char: 2 - 2 * self.initial_genus as i64 - (self.initial_boundary + i) as i64,
                word_len: self.initial_word_len + i,
            })
            .collect()
    }
}

fn require_valid(p: &LinkPlacement) -> Result<(), PushoffError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(PushoffError::InvalidPlacement(violations));
    }
    Ok(())
}

/// Classify a placement into one of the six algorithm cases.
pub fn classify(p: &LinkPlacement) -> Result<Case, PushoffError> {
    require_valid(p)?;
    if p.components.is_empty() {
        return Err(PushoffError::EmptyLink);
    }
    let planar = p.open_book.page.genus() == 0;
    let mut classes: BTreeMap<&str, Vec<&LinkComponent>> = BTreeMap::new();
    for c in &p.components {
        classes.entry(&c.parallel_class).or_default().push(c);
    }
    let has_parallel = classes.values().any(|members| members.len() >= 2);
    let mixed = classes.values().any(|members| {
        members.len() >= 2
            && members
                .iter()
                .any(|c| c.orientation != members[0].orientation)
    });
    Ok(match (planar, has_parallel, mixed) {
        (true, false, _) => Case::C1a,
        (true, true, false) => Case::C1bi,
        (true, true, true) => Case::C1bii,
        (false, false, _) => Case::C2a,
        (false, true, false) => Case::C2bi,
        (false, true, true) => Case::C2bii,
    })
}

/// Zero-pad a vector to `dim` coordinates.
fn pad(v: &[i64], dim: usize) -> Vec<i64> {
    let mut out = v.to_vec();
    out.resize(dim, 0);
    out
}

/// The primitive of the construction: positively stabilize along a curve
/// that runs from a binding component around `k` and back. The twist curve
/// pairs with every old page class exactly as `k` does and crosses the new
/// co-core once; the new binding component is the transverse push-off of `k`.
pub fn lemma_crucial_step(
    ob: &OpenBook,
    k: &LinkComponent,
    gamma_target: &str,
) -> Result<(OpenBook, String), PushoffError> {
    if k.framing_offset != 0 {
        return Err(PushoffError::NonzeroFramingOffset(k.id.clone()));
    }
    let boundary = ob
        .binding_index(gamma_target)
        .ok_or_else(|| PushoffError::UnreachableTarget(gamma_target.to_string()))?
        + 1;
    let new_dim = ob.page.dim() + 1;
    let mut homology = pad(&k.curve.homology, new_dim);
    homology[new_dim - 1] = 1;
    let curve = CurveRef {
        id: format!("alpha-{}", k.id),
        homology,
        kind: CurveKind::StabilizationCurve,
        orientation: Sign::Plus,
    };
    let (ob2, relabel) = ob.positive_stabilize(Feet::SameBoundary { boundary }, curve)?;
    let label = relabel
        .new_binding
        .expect("same-boundary stabilization creates a binding");
    let mut ob2 = ob2;
    ob2.sub_binding_marks.insert(label.clone());
    Ok((ob2, label))
}

struct SimulatedComponent {
    id: String,
    orientation: Sign,
    homology: Vec<i64>,
    nearest: String,
}

/// Does this component already bound its own binding component? True for a
/// singleton class whose curve is parallel to its nearest binding and whose
/// binding is claimed by no other component.
fn bounds_own_binding(p: &LinkPlacement, c: &LinkComponent, class_size: usize) -> bool {
    if class_size != 1 || c.curve.kind != CurveKind::BoundaryParallel {
        return false;
    }
    let index = match p.open_book.binding_index(&c.nearest_binding) {
        Some(i) => i + 1,
        None => return false,
    };
    let class = match p.open_book.page.boundary_class(index) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let negated: Vec<i64> = class.iter().map(|&x| -x).collect();
    let parallel = c.curve.homology == class || c.curve.homology == negated;
    let unique = p
        .components
        .iter()
        .all(|other| other.id == c.id || other.nearest_binding != c.nearest_binding);
    parallel && unique
}

/// Smallest unused `B<n>` given the labels currently in play.
fn fresh_label(labels: &[String]) -> String {
    let used: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
    let mut n = labels.len() + 1;
    loop {
        let candidate = format!("B{n}");
        if !used.contains(candidate.as_str()) {
            return candidate;
        }
        n += 1;
    }
}

/// Build the ordered stabilization schedule for a placement. Every component
/// must sit with framing offset zero. The certificate is unapplied: its
/// ledger is filled by `apply_schedule`.
pub fn build_schedule(p: &LinkPlacement) -> Result<Certificate, PushoffError> {
    let case = classify(p)?;
    for c in &p.components {
        if c.framing_offset != 0 {
            return Err(PushoffError::NonzeroFramingOffset(c.id.clone()));
        }
    }

    let base = &p.open_book.page;
    let genus = base.genus();

    // Classes in order of first appearance; members ordered by class index.
    let mut class_order: Vec<String> = Vec::new();
    let mut classes: BTreeMap<String, Vec<&LinkComponent>> = BTreeMap::new();
    for c in &p.components {
        if !classes.contains_key(&c.parallel_class) {
            class_order.push(c.parallel_class.clone());
        }
        classes.entry(c.parallel_class.clone()).or_default().push(c);
    }
    for members in classes.values_mut() {
        members.sort_by_key(|c| c.class_index);
    }

    let mut tags = Vec::new();
    if genus > 0 {
        let non_meridional = classes.values().any(|members| {
            members.len() >= 2
                && members[0].curve.homology[..2 * genus]
                    .iter()
                    .any(|&x| x != 0)
        });
        if non_meridional {
            tags.push("remark-extension".to_string());
        }
    }

    let mut sub_binding_map = BTreeMap::new();
    let mut negative_stabilizations: BTreeMap<String, u32> = BTreeMap::new();
    let mut steps: Vec<ScheduleStep> = Vec::new();
    let mut labels = p.open_book.bindings.clone();
    let mut dim = base.dim();
    let mut boundary = base.boundary_count();
    // Step indices per class, for the dependency bookkeeping.
    let mut class_steps: BTreeMap<String, Vec<usize>> = BTreeMap::new();

    for class in &class_order {
        let members = &classes[class];
        if bounds_own_binding(p, members[0], members.len()) {
            sub_binding_map.insert(members[0].id.clone(), members[0].nearest_binding.clone());
            continue;
        }

        // Which end the first arc reaches "to the right": the innermost
        // member when it is positively oriented, the outermost otherwise.
        let ascending = members[0].orientation == Sign::Plus;
        let scheduled: Vec<&LinkComponent> = if ascending {
            members.to_vec()
        } else {
            members.iter().rev().cloned().collect()
        };

        let mut sims: Vec<SimulatedComponent> = scheduled
            .iter()
            .map(|c| SimulatedComponent {
                id: c.id.clone(),
                orientation: c.orientation,
                homology: pad(&c.curve.homology, dim),
                nearest: c.nearest_binding.clone(),
            })
            .collect();

        let mut previous_orientation: Option<Sign> = None;
        for position in 0..sims.len() {
            if let Some(prev) = previous_orientation {
                if prev != sims[position].orientation {
                    // Orientation reversal: stabilize along a boundary
                    // parallel curve, push the component over the handle,
                    // and redirect the rest of the class to the new binding.
                    let feet = sims[position].nearest.clone();
                    let feet_index = labels
                        .iter()
                        .position(|l| l == &feet)
                        .ok_or_else(|| PushoffError::UnreachableTarget(feet.clone()))?
                        + 1;
                    let surface = Surface::new(genus, boundary)?;
                    let mut homology = pad(&surface.boundary_class(feet_index)?, dim + 1);
                    homology[dim] = 1;
                    let index = steps.len() + 1;
                    let prior: Vec<usize> = class_steps.get(class).cloned().unwrap_or_default();
                    let depends_on: BTreeSet<usize> = prior.iter().copied().collect();
                    let disjoint_from: BTreeSet<usize> = (1..index)
                        .filter(|i| !depends_on.contains(i))
                        .collect();
                    let new_binding = fresh_label(&labels);
                    steps.push(ScheduleStep {
                        index,
                        kind: StepKind::AuxBoundaryParallel,
                        target_component: Some(sims[position].id.clone()),
                        feet_binding: feet,
                        twist_curve: CurveRef {
                            id: format!("c{index}"),
                            homology,
                            kind: CurveKind::BoundaryParallel,
                            orientation: Sign::Plus,
                        },
                        new_binding: new_binding.clone(),
                        depends_on,
                        disjoint_from,
                    });
                    class_steps.entry(class.clone()).or_default().push(index);
                    labels.push(new_binding.clone());
                    boundary += 1;
                    dim += 1;
                    for sim in sims.iter_mut() {
                        sim.homology = pad(&sim.homology, dim);
                    }
                    // The reversal component rides over the handle: it is
                    // negatively stabilized and its class gains the new
                    // handle coordinate.
                    sims[position].homology[dim - 1] += 1;
                    *negative_stabilizations
                        .entry(sims[position].id.clone())
                        .or_insert(0) += 1;
                    for sim in sims[position..].iter_mut() {
                        sim.nearest = new_binding.clone();
                    }
                }
            }

            // Push-off stabilization of this component.
            let feet = sims[position].nearest.clone();
            if !labels.iter().any(|l| l == &feet) {
                return Err(PushoffError::UnreachableTarget(feet));
            }
            let mut homology = pad(&sims[position].homology, dim + 1);
            homology[dim] = 1;
            let index = steps.len() + 1;
            let prior: Vec<usize> = class_steps.get(class).cloned().unwrap_or_default();
            let depends_on: BTreeSet<usize> = prior.iter().copied().collect();
            let disjoint_from: BTreeSet<usize> =
                (1..index).filter(|i| !depends_on.contains(i)).collect();
            let new_binding = fresh_label(&labels);
            steps.push(ScheduleStep {
                index,
                kind: StepKind::Pushoff,
                target_component: Some(sims[position].id.clone()),
                feet_binding: feet,
                twist_curve: CurveRef {
                    id: format!("c{index}"),
                    homology,
                    kind: CurveKind::StabilizationCurve,
                    orientation: Sign::Plus,
                },
                new_binding: new_binding.clone(),
                depends_on,
                disjoint_from,
            });
            class_steps.entry(class.clone()).or_default().push(index);
            labels.push(new_binding);
            boundary += 1;
            dim += 1;
            for sim in sims.iter_mut() {
                sim.homology = pad(&sim.homology, dim);
            }
            previous_orientation = Some(sims[position].orientation);
        }
    }

    let order_free = steps.iter().all(|s| s.depends_on.is_empty());
    Ok(Certificate {
        input_digest: p.digest(),
        case,
        initial_genus: genus,
        initial_boundary: base.boundary_count(),
        initial_word_len: p.open_book.monodromy.len(),
        steps,
        ledger: Vec::new(),
        sub_binding_map,
        negative_stabilizations,
        order_free,
        tags,
    })
}

/// Replay a schedule on the placement it was built from: one positive
/// same-boundary stabilization per step, ledger rows recorded, resulting
/// bindings marked as the transverse link.
pub fn apply_schedule(
    p: &LinkPlacement,
    cert: &Certificate,
) -> Result<(OpenBook, Certificate), PushoffError> {
    if cert.input_digest != p.digest() {
        return Err(PushoffError::CertificateMismatch);
    }
    let mut ob = p.open_book.clone();
    let initial_genus = ob.page.genus();
    let mut out = cert.clone();
    out.ledger.clear();

    for step in &cert.steps {
        let boundary = ob
            .binding_index(&step.feet_binding)
            .ok_or_else(|| PushoffError::UnreachableTarget(step.feet_binding.clone()))?
            + 1;
        let (next, relabel) =
            ob.positive_stabilize(Feet::SameBoundary { boundary }, step.twist_curve.clone())?;
        let created = relabel
            .new_binding
            .expect("same-boundary stabilization creates a binding");
        if created != step.new_binding {
            return Err(PushoffError::LedgerMismatch(format!(
                "step {} created binding `{created}`, certificate predicted `{}`",
                step.index, step.new_binding
            )));
        }
        ob = next;
        if ob.page.genus() != initial_genus {
            return Err(PushoffError::LedgerMismatch(format!(
                "step {} changed the genus",
                step.index
            )));
        }
        out.ledger.push(LedgerRow {
            step: step.index,
            genus: ob.page.genus(),
            boundary_count: ob.page.boundary_count(),
            euler_char: ob.page.euler_char(),
            word_len: ob.monodromy.len(),
        });
        if step.kind == StepKind::Pushoff {
            if let Some(target) = &step.target_component {
                out.sub_binding_map.insert(target.clone(), created.clone());
            }
        }
    }

    if out.ledger != out.expected_ledger() {
        return Err(PushoffError::LedgerMismatch(
            "replayed ledger differs from the derived ledger".into(),
        ));
    }

    for binding in out.sub_binding_map.values() {
        if ob.binding_index(binding).is_none() {
            return Err(PushoffError::LedgerMismatch(format!(
                "sub-binding `{binding}` does not resolve after replay"
            )));
        }
        ob.sub_binding_marks.insert(binding.clone());
    }
    Ok((ob, out))
}

/// Check a permutation of the schedule. Permutations that violate a
/// dependency constraint are rejected, not replayed; valid ones are replayed
/// on the final page and compared against the recorded order by monodromy
/// homology action and ledger.
pub fn permute_and_check(
    ob: &OpenBook,
    cert: &Certificate,
    perm: &[usize],
) -> Result<bool, PermError> {
    let n = cert.steps.len();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(PermError::NotAPermutation { expected: n });
    }
    for &i in perm {
        if i >= n || seen[i] {
            return Err(PermError::NotAPermutation { expected: n });
        }
        seen[i] = true;
    }
    let mut placed = vec![false; n];
    for &i in perm {
        let step = &cert.steps[i];
        for &dep in &step.depends_on {
            if !placed[dep - 1] {
                return Err(PermError::DependencyViolated {
                    step: step.index,
                    requires: dep,
                });
            }
        }
        placed[i] = true;
    }

    let final_dim = ob.page.dim() + n;
    let final_surface = Surface::new(cert.initial_genus, cert.initial_boundary + n)
        .expect("boundary stays positive");
    let action_for = |order: &[usize]| -> HomologyAction {
        let mut action = HomologyAction::identity(final_dim);
        for &i in order {
            let step = &cert.steps[i];
            let curve = CurveRef {
                homology: pad(&step.twist_curve.homology, final_dim),
                ..step.twist_curve.clone()
            };
            for column in &mut action.columns {
                *column = final_surface
                    .twist_action(&curve, Sign::Plus, column)
                    .expect("padded to the final basis");
            }
        }
        action
    };
    let identity_order: Vec<usize> = (0..n).collect();
    let recorded = action_for(&identity_order);
    let permuted = action_for(perm);
    // Same-boundary feet make the per-position ledger independent of the
    // order, so only the homology action can distinguish replays.
    Ok(recorded == permuted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendrian::LinkComponent;

    fn component(
        id: &str,
        homology: Vec<i64>,
        orientation: Sign,
        class: &str,
        class_index: u32,
        binding: &str,
    ) -> LinkComponent {
        LinkComponent {
            id: id.into(),
            curve: CurveRef {
                id: format!("k-{id}"),
                homology: homology
                    .iter()
                    .map(|&x| orientation.as_i64() * x)
                    .collect(),
                kind: CurveKind::LinkComponent,
                orientation,
            },
            orientation,
            parallel_class: class.into(),
            class_index,
            nearest_binding: binding.into(),
            framing_offset: 0,
            null_homologous: true,
            tb: Some(-1),
            rot: Some(0),
        }
    }

    fn planar_singletons(n: usize) -> LinkPlacement {
        let page = Surface::new(0, 2).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let components = (1..=n)
            .map(|i| {
                component(
                    &format!("K{i}"),
                    vec![i as i64 + 1],
                    Sign::Plus,
                    &format!("p{i}"),
                    1,
                    "B1",
                )
            })
            .collect();
        LinkPlacement {
            open_book: ob,
            components,
        }
    }

    fn planar_class(orientations: &[Sign]) -> LinkPlacement {
        let page = Surface::new(0, 2).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let components = orientations
            .iter()
            .enumerate()
            .map(|(i, &orientation)| {
                component(
                    &format!("K{}", i + 1),
                    vec![2],
                    orientation,
                    "p1",
                    (i + 1) as u32,
                    "B1",
                )
            })
            .collect();
        LinkPlacement {
            open_book: ob,
            components,
        }
    }

    #[test]
    fn classify_matches_defining_predicates() {
        assert_eq!(classify(&planar_singletons(3)).unwrap(), Case::C1a);
        assert_eq!(
            classify(&planar_class(&[Sign::Plus, Sign::Plus, Sign::Plus])).unwrap(),
            Case::C1bi
        );

        let page = Surface::new(2, 1).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let p = LinkPlacement {
            open_book: ob,
            components: vec![
                component("K1", vec![1, 0, 0, 0], Sign::Plus, "p1", 1, "B1"),
                component("K2", vec![1, 0, 0, 0], Sign::Minus, "p1", 2, "B1"),
            ],
        };
        assert_eq!(classify(&p).unwrap(), Case::C2bii);
    }

    #[test]
    fn classify_rejects_empty_link() {
        let page = Surface::new(0, 2).unwrap();
        let p = LinkPlacement {
            open_book: OpenBook::with_default_bindings(page),
            components: vec![],
        };
        assert_eq!(classify(&p), Err(PushoffError::EmptyLink));
    }

    #[test]
    fn crucial_step_on_the_singleton_disk() {
        let page = Surface::new(0, 1).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let k = component("K1", vec![], Sign::Plus, "p1", 1, "B1");
        let (ob2, label) = lemma_crucial_step(&ob, &k, "B1").unwrap();
        assert_eq!(ob2.page.genus(), 0);
        assert_eq!(ob2.page.boundary_count(), 2);
        assert_eq!(ob2.page.euler_char(), 0);
        assert_eq!(ob2.monodromy.len(), 1);
        assert_eq!(ob2.monodromy.twists[0].sign, Sign::Plus);
        assert_eq!(label, "B2");
        assert!(ob2.sub_binding_marks.contains("B2"));
    }

    #[test]
    fn crucial_step_requires_zero_offset() {
        let page = Surface::new(0, 1).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let mut k = component("K1", vec![], Sign::Plus, "p1", 1, "B1");
        k.framing_offset = -1;
        assert_eq!(
            lemma_crucial_step(&ob, &k, "B1"),
            Err(PushoffError::NonzeroFramingOffset("K1".into()))
        );
    }

    #[test]
    fn case_1a_schedule_is_order_free() {
        let p = planar_singletons(3);
        let cert = build_schedule(&p).unwrap();
        assert_eq!(cert.case, Case::C1a);
        assert_eq!(cert.steps.len(), 3);
        assert!(cert.order_free);
        assert!(cert.steps.iter().all(|s| s.kind == StepKind::Pushoff));

        let (ob, cert) = apply_schedule(&p, &cert).unwrap();
        assert_eq!(ob.page.genus(), 0);
        assert_eq!(ob.page.boundary_count(), 5);
        assert_eq!(ob.monodromy.len(), 3);
        assert_eq!(cert.ledger.len(), 3);
        assert_eq!(cert.sub_binding_map.len(), 3);
    }

    #[test]
    fn case_1bi_schedule_is_ordered() {
        let p = planar_class(&[Sign::Plus, Sign::Plus]);
        let cert = build_schedule(&p).unwrap();
        assert_eq!(cert.case, Case::C1bi);
        assert_eq!(cert.steps.len(), 2);
        assert!(!cert.order_free);
        assert_eq!(cert.steps[1].depends_on, BTreeSet::from([1]));
    }

    #[test]
    fn case_1bii_inserts_an_aux_step() {
        // Orientations (+, +, -) in class order: two push-offs, one aux
        // stabilization at the reversal, then the last push-off. The
        // reversed component is negatively stabilized once.
        let p = planar_class(&[Sign::Plus, Sign::Plus, Sign::Minus]);
        let cert = build_schedule(&p).unwrap();
        assert_eq!(cert.case, Case::C1bii);
        let kinds: Vec<StepKind> = cert.steps.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                StepKind::Pushoff,
                StepKind::Pushoff,
                StepKind::AuxBoundaryParallel,
                StepKind::Pushoff,
            ]
        );
        assert_eq!(
            cert.negative_stabilizations,
            BTreeMap::from([("K3".to_string(), 1)])
        );
        // The post-reversal push-off uses the binding created by the aux step.
        assert_eq!(cert.steps[3].feet_binding, cert.steps[2].new_binding);

        let (ob, cert) = apply_schedule(&p, &cert).unwrap();
        assert_eq!(ob.page.genus(), 0);
        assert_eq!(ob.page.boundary_count(), 2 + 4);
        assert_eq!(cert.sub_binding_map.len(), 3);
    }

    #[test]
    fn case_2a_replay_ledger() {
        let page = Surface::new(1, 1).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        let p = LinkPlacement {
            open_book: ob,
            components: vec![
                component("K1", vec![1, 0], Sign::Plus, "p1", 1, "B1"),
                component("K2", vec![0, 1], Sign::Plus, "p2", 1, "B1"),
            ],
        };
        let cert = build_schedule(&p).unwrap();
        assert_eq!(cert.case, Case::C2a);
        let (ob, _) = apply_schedule(&p, &cert).unwrap();
        assert_eq!((ob.page.genus(), ob.page.boundary_count()), (1, 3));
    }

    #[test]
    fn bounds_own_binding_shortcut() {
        let page = Surface::new(0, 2).unwrap();
        let ob = OpenBook::with_default_bindings(page.clone());
        let mut c = component("K1", page.boundary_class(1).unwrap(), Sign::Plus, "p1", 1, "B1");
        c.curve.kind = CurveKind::BoundaryParallel;
        let p = LinkPlacement {
            open_book: ob,
            components: vec![c],
        };
        let cert = build_schedule(&p).unwrap();
        assert!(cert.steps.is_empty());
        assert_eq!(cert.sub_binding_map.get("K1"), Some(&"B1".to_string()));
        let (ob, _) = apply_schedule(&p, &cert).unwrap();
        assert_eq!(ob.page.boundary_count(), 2);
        assert!(ob.sub_binding_marks.contains("B1"));
    }

    #[test]
    fn schedule_requires_zero_offsets() {
        let mut p = planar_singletons(1);
        p.components[0].framing_offset = -1;
        assert_eq!(
            build_schedule(&p),
            Err(PushoffError::NonzeroFramingOffset("K1".into()))
        );
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let p = planar_singletons(2);
        let mut cert = build_schedule(&p).unwrap();
        cert.input_digest = "0".repeat(64);
        assert_eq!(
            apply_schedule(&p, &cert),
            Err(PushoffError::CertificateMismatch)
        );
    }

    #[test]
    fn permutations_respecting_dependencies_replay_equal() {
        let p = planar_singletons(3);
        let cert = build_schedule(&p).unwrap();
        assert!(permute_and_check(&p.open_book, &cert, &[2, 0, 1]).unwrap());

        let ordered = planar_class(&[Sign::Plus, Sign::Plus]);
        let cert = build_schedule(&ordered).unwrap();
        assert!(permute_and_check(&ordered.open_book, &cert, &[0, 1]).unwrap());
        assert_eq!(
            permute_and_check(&ordered.open_book, &cert, &[1, 0]),
            Err(PermError::DependencyViolated {
                step: 2,
                requires: 1
            })
        );
    }
}
