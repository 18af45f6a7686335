//! Legendrian approximation of sub-bindings, framing decrease moves, and
//! support-genus certificates.
//!
//! Support genus is represented exclusively by upper-bound certificates: a
//! witness open book of the stated genus, plus the provenance needed to
//! replay how it was produced. Minimality is out of scope. No operation in
//! this module (or anywhere else) raises a framing offset.

use thiserror::Error;

use crate::digest::hex_digest;
use crate::legendrian::{LegendrianError, LinkComponent, LinkPlacement};
use crate::openbook::{OpenBook, OpenBookError};
use crate::pushoff::{apply_schedule, build_schedule, PushoffError};
use crate::surface::{CurveKind, CurveRef, Feet, Sign};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApproxError {
    #[error("no sub-binding marks given")]
    NoMarks,
    #[error("mark `{0}` is not a binding label")]
    UnknownMark(String),
    #[error("negative step count")]
    NegativeSteps,
    #[error("planar witness required")]
    PlanarWitnessRequired,
    #[error("loose flag required")]
    LooseFlagRequired,
    #[error("support-genus witness genus {witness} differs from bound {bound}")]
    WitnessGenusMismatch { witness: usize, bound: usize },
    #[error(transparent)]
    OpenBook(#[from] OpenBookError),
    #[error(transparent)]
    Legendrian(#[from] LegendrianError),
    #[error(transparent)]
    Pushoff(#[from] PushoffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgKind {
    Legendrian,
    Transverse,
}

/// Witness backing a support-genus bound: a sub-binding for a transverse
/// link, a page placement with framing offset zero for a Legendrian one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    SubBinding(OpenBook),
    PagePlacement(LinkPlacement),
}

impl Witness {
    pub fn genus(&self) -> usize {
        match self {
            Witness::SubBinding(ob) => ob.page.genus(),
            Witness::PagePlacement(p) => p.open_book.page.genus(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvenanceEntry {
    pub op: String,
    pub detail: String,
}

/// Upper-bound certificate for the support genus of a link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgCertificate {
    pub kind: SgKind,
    pub link_digest: String,
    pub genus_upper_bound: usize,
    pub witness: Witness,
    pub provenance: Vec<ProvenanceEntry>,
    /// External facts the certificate leans on without checking them.
    pub assumptions: Vec<String>,
}

impl SgCertificate {
    pub fn transverse(ob: OpenBook) -> Result<SgCertificate, ApproxError> {
        if ob.sub_binding_marks.is_empty() {
            return Err(ApproxError::NoMarks);
        }
        Ok(SgCertificate {
            kind: SgKind::Transverse,
            link_digest: ob.digest(),
            genus_upper_bound: ob.page.genus(),
            witness: Witness::SubBinding(ob),
            provenance: Vec::new(),
            assumptions: Vec::new(),
        })
    }

    pub fn check_witness(&self) -> Result<(), ApproxError> {
        if self.witness.genus() != self.genus_upper_bound {
            return Err(ApproxError::WitnessGenusMismatch {
                witness: self.witness.genus(),
                bound: self.genus_upper_bound,
            });
        }
        Ok(())
    }
}

fn boundary_parallel_curve(
    ob: &OpenBook,
    binding: &str,
    id: &str,
) -> Result<CurveRef, ApproxError> {
    let index = ob
        .binding_index(binding)
        .ok_or_else(|| ApproxError::UnknownMark(binding.to_string()))?
        + 1;
    Ok(CurveRef {
        id: id.to_string(),
        homology: ob.page.boundary_class(index).map_err(OpenBookError::from)?,
        kind: CurveKind::BoundaryParallel,
        orientation: Sign::Plus,
    })
}

/// Stabilization curve for a same-boundary handle at `binding`: boundary
/// parallel, crossing the new co-core once.
fn handle_curve(ob: &OpenBook, binding: &str, id: &str) -> Result<CurveRef, ApproxError> {
    let index = ob
        .binding_index(binding)
        .ok_or_else(|| ApproxError::UnknownMark(binding.to_string()))?
        + 1;
    let class = ob.page.boundary_class(index).map_err(OpenBookError::from)?;
    let mut homology = class;
    homology.push(1);
    Ok(CurveRef {
        id: id.to_string(),
        homology,
        kind: CurveKind::BoundaryParallel,
        orientation: Sign::Plus,
    })
}

/// Legendrian approximation of marked sub-binding components: each marked
/// binding yields a page curve parallel to it with framing offset zero. When
/// the binding is connected, one positive boundary-parallel stabilization is
/// applied first; it changes neither the genus nor the transverse isotopy
/// class of the binding.
pub fn approximate_subbinding(
    ob: &OpenBook,
    marks: &[String],
) -> Result<LinkPlacement, ApproxError> {
    if marks.is_empty() {
        return Err(ApproxError::NoMarks);
    }
    for mark in marks {
        if ob.binding_index(mark).is_none() {
            return Err(ApproxError::UnknownMark(mark.clone()));
        }
    }

    let mut ob = ob.clone();
    if ob.page.boundary_count() == 1 {
        let curve = handle_curve(&ob, &ob.bindings[0], "stab0")?;
        let boundary = 1;
        let (next, _) = ob.positive_stabilize(Feet::SameBoundary { boundary }, curve)?;
        ob = next;
    }

    for mark in marks {
        ob.sub_binding_marks.insert(mark.clone());
    }

    let mut components = Vec::new();
    for mark in marks {
        let curve = boundary_parallel_curve(&ob, mark, &format!("k-{mark}"))?;
        components.push(LinkComponent {
            id: format!("L-{mark}"),
            curve,
            orientation: Sign::Plus,
            parallel_class: format!("pc-{mark}"),
            class_index: 1,
            nearest_binding: mark.clone(),
            framing_offset: 0,
            null_homologous: false,
            tb: None,
            rot: None,
        });
    }
    Ok(LinkPlacement {
        open_book: ob,
        components,
    })
}

/// Decrease the contact framing of one component by `n`: each iteration
/// positively stabilizes the open book along the component's binding and
/// pushes the component over the handle, which negatively stabilizes it
/// (`tb - 1`, `rot - 1` when the invariants exist) and lowers the framing
/// offset by one. The genus never changes.
pub fn decrease_contact_framing(
    p: &LinkPlacement,
    id: &str,
    n: i64,
) -> Result<LinkPlacement, ApproxError> {
    if n < 0 {
        return Err(ApproxError::NegativeSteps);
    }
    let mut placement = p.clone();
    placement.component(id)?;
    for iteration in 0..n {
        let binding = placement.component(id)?.nearest_binding.clone();
        let curve = handle_curve(
            &placement.open_book,
            &binding,
            &format!("fr-{id}-{iteration}"),
        )?;
        let boundary = placement
            .open_book
            .binding_index(&binding)
            .expect("validated above")
            + 1;
        let (ob, _) = placement
            .open_book
            .positive_stabilize(Feet::SameBoundary { boundary }, curve)?;
        let new_dim = ob.page.dim();
        let components = placement
            .components
            .iter()
            .map(|c| {
                let mut homology = c.curve.homology.clone();
                homology.resize(new_dim, 0);
                if c.id == id {
                    // The component rides over the new handle.
                    homology[new_dim - 1] += c.orientation.as_i64();
                }
                let mut next = LinkComponent {
                    curve: CurveRef {
                        homology,
                        ..c.curve.clone()
                    },
                    ..c.clone()
                };
                if c.id == id {
                    next.tb = next.tb.map(|tb| tb - 1);
                    next.rot = next.rot.map(|rot| rot - 1);
                    next.framing_offset -= 1;
                }
                next
            })
            .collect();
        placement = LinkPlacement {
            open_book: ob,
            components,
        };
    }
    Ok(placement)
}

/// Both directions of the support-genus round trip: approximate the marked
/// sub-binding on the page (genus fixed), then run the realization algorithm
/// on the approximation (genus fixed again). The two transverse bounds agree
/// by construction; the certificates carry the replay provenance.
pub fn roundtrip_sg(
    t_cert: &SgCertificate,
) -> Result<(SgCertificate, SgCertificate), ApproxError> {
    t_cert.check_witness()?;
    let ob = match &t_cert.witness {
        Witness::SubBinding(ob) => ob,
        Witness::PagePlacement(_) => return Err(ApproxError::NoMarks),
    };
    if ob.sub_binding_marks.is_empty() {
        return Err(ApproxError::NoMarks);
    }
    let genus = ob.page.genus();
    let marks: Vec<String> = ob.sub_binding_marks.iter().cloned().collect();

    let placement = approximate_subbinding(ob, &marks)?;
    let mut l_provenance = t_cert.provenance.clone();
    l_provenance.push(ProvenanceEntry {
        op: "approximate-subbinding".into(),
        detail: placement.digest(),
    });
    let l_cert = SgCertificate {
        kind: SgKind::Legendrian,
        link_digest: t_cert.link_digest.clone(),
        genus_upper_bound: genus,
        witness: Witness::PagePlacement(placement.clone()),
        provenance: l_provenance.clone(),
        assumptions: vec!["binding-stabilization-preserves-transverse-isotopy".into()],
    };

    let schedule = build_schedule(&placement)?;
    let (realized, schedule) = apply_schedule(&placement, &schedule)?;
    let mut t_provenance = l_provenance;
    t_provenance.push(ProvenanceEntry {
        op: "pushoff-schedule".into(),
        detail: schedule.digest(),
    });
    let t_cert2 = SgCertificate {
        kind: SgKind::Transverse,
        link_digest: t_cert.link_digest.clone(),
        genus_upper_bound: realized.page.genus(),
        witness: Witness::SubBinding(realized),
        provenance: t_provenance,
        assumptions: l_cert.assumptions.clone(),
    };
    t_cert2.check_witness()?;
    Ok((l_cert, t_cert2))
}

/// Pipeline for loose planar placements: `m` extra negative
/// stabilizations per component (framing-decrease moves on the planar page,
/// after which the page framing again agrees with the contact framing), then
/// the realization algorithm. The resulting bound is zero.
pub fn loose_planar_pipeline(
    p: &LinkPlacement,
    loose: bool,
    m: i64,
) -> Result<SgCertificate, ApproxError> {
    if p.open_book.page.genus() != 0 {
        return Err(ApproxError::PlanarWitnessRequired);
    }
    if !loose {
        return Err(ApproxError::LooseFlagRequired);
    }
    let mut placement = p.clone();
    let ids: Vec<String> = placement.components.iter().map(|c| c.id.clone()).collect();
    for id in &ids {
        placement = decrease_contact_framing(&placement, id, m)?;
    }
    // On the stabilized page the contact framing agrees with the page
    // framing again; the offset ledger restarts at zero for the push-off.
    for c in placement.components.iter_mut() {
        c.framing_offset = 0;
    }

    let schedule = build_schedule(&placement)?;
    let (realized, schedule) = apply_schedule(&placement, &schedule)?;
    let cert = SgCertificate {
        kind: SgKind::Transverse,
        link_digest: p.digest(),
        genus_upper_bound: realized.page.genus(),
        witness: Witness::SubBinding(realized),
        provenance: vec![
            ProvenanceEntry {
                op: "negative-stabilizations".into(),
                detail: hex_digest(
                    [m.to_string()]
                        .into_iter()
                        .chain(ids.iter().cloned()),
                ),
            },
            ProvenanceEntry {
                op: "pushoff-schedule".into(),
                detail: schedule.digest(),
            },
        ],
        assumptions: vec!["planar-witness-for-loose-legendrian".into()],
    };
    cert.check_witness()?;
    Ok(cert)
}
