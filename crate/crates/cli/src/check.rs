//! Batch property-check driver. Each check yields one report entry; the
//! caller's exit code is 0 iff every entry passed. Randomized checks are
//! reproducible through an explicit seed (`OPENBOOK_KIT_SEED`).

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use openbook_core::pushoff::{apply_schedule, build_schedule, permute_and_check};
use openbook_core::{
    Case, Certificate, CurveKind, CurveRef, Feet, LedgerRow, LinkComponent, LinkPlacement,
    MonodromyWord, OpenBook, ScheduleStep, SgCertificate, SgKind, Sign, StepKind, Surface, Twist,
    Witness,
};

use crate::format::{emit, parse, Document};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckEntry {
    fn pass(name: impl Into<String>) -> CheckEntry {
        CheckEntry {
            name: name.into(),
            pass: true,
            detail: "ok".into(),
        }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>) -> CheckEntry {
        CheckEntry {
            name: name.into(),
            pass: false,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub seed: u64,
    /// Exhaustively permute schedules with at most four steps.
    pub permutations_all: bool,
}

// --------------------------------------------------------- document checks

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for slot in 0..=rest.len() {
            let mut perm = rest.clone();
            perm.insert(slot, n - 1);
            out.push(perm);
        }
    }
    out
}

fn check_certificate(name: &str, cert: &Certificate, options: &CheckOptions) -> Vec<CheckEntry> {
    let mut entries = Vec::new();

    if cert.ledger == cert.expected_ledger() {
        entries.push(CheckEntry::pass(format!("{name}: ledger")));
    } else {
        entries.push(CheckEntry::fail(
            format!("{name}: ledger"),
            "ledger replay mismatch",
        ));
    }

    let mut coverage_ok = true;
    for step in &cert.steps {
        let prior: BTreeSet<usize> = (1..step.index).collect();
        let mut union = step.depends_on.clone();
        union.extend(step.disjoint_from.iter().copied());
        if union != prior || !step.depends_on.is_disjoint(&step.disjoint_from) {
            coverage_ok = false;
        }
    }
    entries.push(if coverage_ok {
        CheckEntry::pass(format!("{name}: dependency coverage"))
    } else {
        CheckEntry::fail(
            format!("{name}: dependency coverage"),
            "depends/disjoint sets must partition the prior steps",
        )
    });

    let no_dependencies = cert.steps.iter().all(|s| s.depends_on.is_empty());
    entries.push(if cert.order_free == no_dependencies {
        CheckEntry::pass(format!("{name}: order_free flag"))
    } else {
        CheckEntry::fail(
            format!("{name}: order_free flag"),
            "order_free disagrees with the dependency sets",
        )
    });

    if options.permutations_all && cert.steps.len() <= 4 {
        let page = Surface::new(cert.initial_genus, cert.initial_boundary);
        match page {
            Err(e) => entries.push(CheckEntry::fail(
                format!("{name}: permutations"),
                e.to_string(),
            )),
            Ok(page) => {
                let ob = OpenBook::with_default_bindings(page);
                let mut ok = true;
                let mut detail = String::from("ok");
                let mut saw_rejection = false;
                for perm in permutations(cert.steps.len()) {
                    match permute_and_check(&ob, cert, &perm) {
                        Ok(true) => {}
                        Ok(false) => {
                            if cert.order_free {
                                ok = false;
                                detail = format!("order_free replay differs under {perm:?}");
                            }
                        }
                        Err(e) => {
                            saw_rejection = true;
                            if cert.order_free {
                                ok = false;
                                detail = e.to_string();
                            }
                        }
                    }
                }
                if !cert.order_free && !saw_rejection {
                    ok = false;
                    detail = "dependent schedule accepted every permutation".into();
                }
                entries.push(if ok {
                    CheckEntry::pass(format!("{name}: permutations"))
                } else {
                    CheckEntry::fail(format!("{name}: permutations"), detail)
                });
            }
        }
    }

    entries
}

fn check_sg(name: &str, cert: &SgCertificate) -> Vec<CheckEntry> {
    let mut entries = Vec::new();
    match cert.check_witness() {
        Ok(()) => entries.push(CheckEntry::pass(format!("{name}: witness"))),
        Err(e) => entries.push(CheckEntry::fail(format!("{name}: witness"), e.to_string())),
    }
    entries
}

/// All checks for one document: parse, canonical round trip, and per-kind
/// structural properties.
pub fn check_document(name: &str, text: &str, options: &CheckOptions) -> Vec<CheckEntry> {
    let doc = match parse(text) {
        Ok(doc) => doc,
        Err(e) => return vec![CheckEntry::fail(format!("{name}: parse"), e.to_string())],
    };
    let mut entries = vec![CheckEntry::pass(format!("{name}: parse"))];

    match emit(&doc).and_then(|canonical| parse(&canonical).map(|re| (canonical, re))) {
        Ok((canonical, reparsed)) => {
            if reparsed == doc && emit(&reparsed).as_deref() == Ok(canonical.as_str()) {
                entries.push(CheckEntry::pass(format!("{name}: round-trip")));
            } else {
                entries.push(CheckEntry::fail(
                    format!("{name}: round-trip"),
                    "parse(emit(x)) differs from x",
                ));
            }
        }
        Err(e) => entries.push(CheckEntry::fail(
            format!("{name}: round-trip"),
            e.to_string(),
        )),
    }

    match &doc {
        Document::OpenBook(_) => {}
        Document::Placement(p) => {
            let violations = p.validate();
            entries.push(if violations.is_empty() {
                CheckEntry::pass(format!("{name}: placement"))
            } else {
                CheckEntry::fail(format!("{name}: placement"), format!("{violations:?}"))
            });
        }
        Document::Certificate(cert) => entries.extend(check_certificate(name, cert, options)),
        Document::SgCertificate(cert) => entries.extend(check_sg(name, cert)),
    }
    entries
}

// ------------------------------------------------------ randomized suites

fn random_curve(rng: &mut ChaCha8Rng, id: String, kind: CurveKind, dim: usize) -> CurveRef {
    let orientation = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let homology: Vec<i64> = (0..dim).map(|_| rng.gen_range(-2..=2)).collect();
    CurveRef {
        id,
        homology,
        kind,
        orientation,
    }
}

fn random_open_book(rng: &mut ChaCha8Rng) -> OpenBook {
    let genus = rng.gen_range(0..=2);
    let boundary = rng.gen_range(1..=3);
    let page = Surface::new(genus, boundary).expect("boundary is positive");
    let dim = page.dim();
    let ob = OpenBook::with_default_bindings(page);
    let twists = (0..rng.gen_range(0..=3))
        .map(|i| Twist {
            curve: random_curve(rng, format!("t{i}"), CurveKind::StabilizationCurve, dim),
            sign: if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
        })
        .collect();
    let mut ob = ob.set_word(MonodromyWord { twists }).expect("dim matches");
    if rng.gen_bool(0.3) {
        let mark = ob.bindings[rng.gen_range(0..ob.bindings.len())].clone();
        ob.sub_binding_marks.insert(mark);
    }
    ob
}

fn random_placement(rng: &mut ChaCha8Rng) -> LinkPlacement {
    let ob = random_open_book(rng);
    let dim = ob.page.dim();
    let components = (0..rng.gen_range(1..=3))
        .map(|i| {
            let orientation = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let null_homologous = rng.gen_bool(0.5);
            let curve = CurveRef {
                orientation,
                ..random_curve(rng, format!("k{i}"), CurveKind::LinkComponent, dim)
            };
            LinkComponent {
                id: format!("K{i}"),
                curve,
                orientation,
                parallel_class: format!("p{}", rng.gen_range(0..2)),
                class_index: i as u32 + 1,
                nearest_binding: ob.bindings[rng.gen_range(0..ob.bindings.len())].clone(),
                framing_offset: rng.gen_range(-2..=0),
                null_homologous,
                tb: null_homologous.then(|| rng.gen_range(-5..=2)),
                rot: null_homologous.then(|| rng.gen_range(-3..=3)),
            }
        })
        .collect();
    LinkPlacement {
        open_book: ob,
        components,
    }
}

fn random_certificate(rng: &mut ChaCha8Rng) -> Certificate {
    let genus = rng.gen_range(0..=2);
    let boundary = rng.gen_range(1..=3);
    let dim = 2 * genus + boundary - 1;
    let n = rng.gen_range(0..=4usize);
    let cases = [Case::C1a, Case::C1bi, Case::C1bii, Case::C2a, Case::C2bi, Case::C2bii];
    let mut steps = Vec::new();
    for index in 1..=n {
        let depends_on: BTreeSet<usize> =
            (1..index).filter(|_| rng.gen_bool(0.4)).collect();
        let disjoint_from: BTreeSet<usize> = (1..index)
            .filter(|i| !depends_on.contains(i))
            .collect();
        steps.push(ScheduleStep {
            index,
            kind: if rng.gen_bool(0.8) {
                StepKind::Pushoff
            } else {
                StepKind::AuxBoundaryParallel
            },
            target_component: rng.gen_bool(0.8).then(|| format!("K{index}")),
            feet_binding: format!("B{}", rng.gen_range(1..=boundary)),
            twist_curve: random_curve(
                rng,
                format!("c{index}"),
                CurveKind::StabilizationCurve,
                dim + index,
            ),
            new_binding: format!("B{}", boundary + index),
            depends_on,
            disjoint_from,
        });
    }
    let ledger = (1..=n)
        .map(|step| LedgerRow {
            step,
            genus,
            boundary_count: boundary + step,
            euler_char: 2 - 2 * genus as i64 - (boundary + step) as i64,
            word_len: step,
        })
        .collect();
    let order_free = steps.iter().all(|s: &ScheduleStep| s.depends_on.is_empty());
    let mut negative_stabilizations = BTreeMap::new();
    for i in 1..=n {
        if rng.gen_bool(0.2) {
            negative_stabilizations.insert(format!("K{i}"), rng.gen_range(1..=3u32));
        }
    }
    Certificate {
        input_digest: format!("{:064x}", rng.gen::<u128>()),
        case: cases[rng.gen_range(0..cases.len())],
        initial_genus: genus,
        initial_boundary: boundary,
        initial_word_len: 0,
        steps,
        ledger,
        sub_binding_map: (1..=n)
            .filter(|_| rng.gen_bool(0.5))
            .map(|i| (format!("K{i}"), format!("B{}", boundary + i)))
            .collect(),
        negative_stabilizations,
        order_free,
        tags: if rng.gen_bool(0.2) {
            vec!["remark-extension".into()]
        } else {
            Vec::new()
        },
    }
}

fn random_sg(rng: &mut ChaCha8Rng) -> SgCertificate {
    let assumptions = vec!["binding-stabilization-preserves-transverse-isotopy".to_string()];
    let provenance = Vec::new();
    if rng.gen_bool(0.5) {
        let mut ob = random_open_book(rng);
        let mark = ob.bindings[rng.gen_range(0..ob.bindings.len())].clone();
        ob.sub_binding_marks.insert(mark);
        SgCertificate {
            kind: SgKind::Transverse,
            link_digest: ob.digest(),
            genus_upper_bound: ob.page.genus(),
            witness: Witness::SubBinding(ob),
            provenance,
            assumptions,
        }
    } else {
        let p = random_placement(rng);
        SgCertificate {
            kind: SgKind::Legendrian,
            link_digest: p.digest(),
            genus_upper_bound: p.open_book.page.genus(),
            witness: Witness::PagePlacement(p),
            provenance,
            assumptions,
        }
    }
}

/// One randomized document of any kind. Shared with the round-trip tests.
pub fn random_document(rng: &mut ChaCha8Rng) -> Document {
    match rng.gen_range(0..4) {
        0 => Document::OpenBook(random_open_book(rng)),
        1 => Document::Placement(random_placement(rng)),
        2 => Document::Certificate(random_certificate(rng)),
        _ => Document::SgCertificate(random_sg(rng)),
    }
}

fn suite_stabilization_arithmetic(rng: &mut ChaCha8Rng) -> CheckEntry {
    let name = "builtin: stabilization arithmetic";
    let page = Surface::new(0, 1).expect("disk");
    for _ in 0..500 {
        let tb0 = rng.gen_range(-6..=3);
        let rot0 = rng.gen_range(-4..=4);
        let mut placement = LinkPlacement {
            open_book: OpenBook::with_default_bindings(page.clone()),
            components: vec![LinkComponent {
                id: "K".into(),
                curve: CurveRef {
                    id: "k".into(),
                    homology: vec![],
                    kind: CurveKind::LinkComponent,
                    orientation: Sign::Plus,
                },
                orientation: Sign::Plus,
                parallel_class: "p".into(),
                class_index: 1,
                nearest_binding: "B1".into(),
                framing_offset: 0,
                null_homologous: true,
                tb: Some(tb0),
                rot: Some(rot0),
            }],
        };
        let mut tb = tb0;
        let mut rot = rot0;
        for _ in 0..rng.gen_range(0..6) {
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let sl_before = placement
                .pushoff_invariants("K", Sign::Plus)
                .expect("invariants present");
            placement = placement
                .stabilize_legendrian("K", sign)
                .expect("component exists");
            tb -= 1;
            rot += sign.as_i64();
            if sign == Sign::Minus {
                // sl of the positive push-off is unchanged by a negative
                // Legendrian stabilization.
                let sl = placement
                    .pushoff_invariants("K", Sign::Plus)
                    .expect("invariants present");
                if sl != sl_before {
                    return CheckEntry::fail(name, "sl(T+) changed under negative stabilization");
                }
            }
            let c = placement.component("K").expect("component exists");
            if c.tb != Some(tb) || c.rot != Some(rot) {
                return CheckEntry::fail(name, "tb/rot arithmetic mismatch");
            }
        }
    }
    CheckEntry::pass(name)
}

fn suite_handle_ledger() -> CheckEntry {
    let name = "builtin: handle attachment ledger";
    for genus in 0..=3usize {
        for boundary in 1..=4usize {
            let page = Surface::new(genus, boundary).expect("boundary positive");
            for boundary_choice in 1..=boundary {
                let (next, _) = page
                    .attach_handle(Feet::SameBoundary {
                        boundary: boundary_choice,
                    })
                    .expect("valid feet");
                if next.euler_char() != page.euler_char() - 1
                    || (next.genus(), next.boundary_count()) != (genus, boundary + 1)
                {
                    return CheckEntry::fail(name, "same-boundary dichotomy failed");
                }
            }
            if boundary >= 2 {
                let (next, _) = page
                    .attach_handle(Feet::DifferentBoundaries { first: 1, second: 2 })
                    .expect("valid feet");
                if next.euler_char() != page.euler_char() - 1
                    || (next.genus(), next.boundary_count()) != (genus + 1, boundary - 1)
                {
                    return CheckEntry::fail(name, "different-boundary dichotomy failed");
                }
            }
        }
    }
    CheckEntry::pass(name)
}

fn suite_document_round_trip(rng: &mut ChaCha8Rng) -> CheckEntry {
    let name = "builtin: document round trip";
    for i in 0..100 {
        let doc = random_document(rng);
        let text = match emit(&doc) {
            Ok(text) => text,
            Err(e) => return CheckEntry::fail(name, format!("document {i}: {e}")),
        };
        match parse(&text) {
            Ok(parsed) if parsed == doc => match emit(&parsed) {
                Ok(again) if again == text => {}
                _ => return CheckEntry::fail(name, format!("document {i}: bytes differ")),
            },
            Ok(_) => return CheckEntry::fail(name, format!("document {i}: value differs")),
            Err(e) => return CheckEntry::fail(name, format!("document {i}: {e}")),
        }
    }
    CheckEntry::pass(name)
}

fn suite_schedule_replay(rng: &mut ChaCha8Rng) -> CheckEntry {
    let name = "builtin: schedule replay";
    for i in 0..25 {
        let genus = rng.gen_range(0..=2);
        let class_count = rng.gen_range(1..=2usize);
        let page = Surface::new(genus, class_count + 1).expect("boundary positive");
        let dim = page.dim();
        let ob = OpenBook::with_default_bindings(page);
        let mut components = Vec::new();
        for class in 0..class_count {
            for index in 0..rng.gen_range(1..=2u32) {
                let orientation = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                let mut homology = vec![0; dim];
                homology[2 * genus + class] = 2 * orientation.as_i64();
                components.push(LinkComponent {
                    id: format!("K{class}-{index}"),
                    curve: CurveRef {
                        id: format!("k{class}-{index}"),
                        homology,
                        kind: CurveKind::LinkComponent,
                        orientation,
                    },
                    orientation,
                    parallel_class: format!("p{class}"),
                    class_index: index + 1,
                    nearest_binding: format!("B{}", class + 1),
                    framing_offset: 0,
                    null_homologous: false,
                    tb: None,
                    rot: None,
                });
            }
        }
        let placement = LinkPlacement {
            open_book: ob,
            components,
        };
        let cert = match build_schedule(&placement) {
            Ok(cert) => cert,
            Err(e) => return CheckEntry::fail(name, format!("placement {i}: {e}")),
        };
        match apply_schedule(&placement, &cert) {
            Ok((realized, replayed)) => {
                if realized.page.genus() != genus {
                    return CheckEntry::fail(name, format!("placement {i}: genus changed"));
                }
                if replayed.ledger != replayed.expected_ledger() {
                    return CheckEntry::fail(name, format!("placement {i}: ledger mismatch"));
                }
            }
            Err(e) => return CheckEntry::fail(name, format!("placement {i}: {e}")),
        }
    }
    CheckEntry::pass(name)
}

/// The built-in seeded suites, run when `check` is invoked with no files or
/// alongside document checks.
pub fn builtin_suites(options: &CheckOptions) -> Vec<CheckEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    vec![
        suite_stabilization_arithmetic(&mut rng),
        suite_handle_ledger(),
        suite_document_round_trip(&mut rng),
        suite_schedule_replay(&mut rng),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_suites_pass() {
        let options = CheckOptions {
            seed: 7,
            permutations_all: false,
        };
        for entry in builtin_suites(&options) {
            assert!(entry.pass, "{}: {}", entry.name, entry.detail);
        }
    }

    #[test]
    fn tampered_ledger_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cert = random_certificate(&mut rng);
        while cert.steps.is_empty() {
            cert = random_certificate(&mut rng);
        }
        cert.ledger[0].boundary_count += 1;
        let text = emit(&Document::Certificate(cert)).unwrap();
        let entries = check_document("t", &text, &CheckOptions::default());
        let ledger = entries.iter().find(|e| e.name == "t: ledger").unwrap();
        assert!(!ledger.pass);
        assert_eq!(ledger.detail, "ledger replay mismatch");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let options = CheckOptions {
            seed: 42,
            permutations_all: false,
        };
        assert_eq!(builtin_suites(&options), builtin_suites(&options));
    }
}
