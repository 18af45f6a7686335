//! Regenerates the `fixtures/` directory at the repository root. Run from
//! the workspace root:
//!
//! ```text
//! cargo run -p openbook-cli --example gen_fixtures
//! ```

use std::path::PathBuf;

use openbook_core::approx::roundtrip_sg;
use openbook_core::pushoff::{apply_schedule, build_schedule};
use openbook_core::{
    CurveKind, CurveRef, LinkComponent, LinkPlacement, MonodromyWord, OpenBook, SgCertificate,
    Sign, Surface, Twist,
};

use openbook_cli::{emit, Document};

fn placement(orientations: &[(Sign, &str)]) -> LinkPlacement {
    let boundary = orientations.len() + 1;
    let page = Surface::new(0, boundary).unwrap();
    let ob = OpenBook::with_default_bindings(page.clone());
    let components = orientations
        .iter()
        .enumerate()
        .map(|(i, &(orientation, class))| {
            let class_index = orientations[..i]
                .iter()
                .filter(|&&(_, c)| c == class)
                .count() as u32
                + 1;
            let class_slot = orientations
                .iter()
                .map(|&(_, c)| c)
                .collect::<Vec<_>>()
                .iter()
                .position(|&c| c == class)
                .unwrap();
            let mut homology = vec![0; page.dim()];
            homology[class_slot] = 2 * orientation.as_i64();
            LinkComponent {
                id: format!("K{}", i + 1),
                curve: CurveRef {
                    id: format!("k{}", i + 1),
                    homology,
                    kind: CurveKind::LinkComponent,
                    orientation,
                },
                orientation,
                parallel_class: class.to_string(),
                class_index,
                nearest_binding: format!("B{}", class_slot + 1),
                framing_offset: 0,
                null_homologous: true,
                tb: Some(-1),
                rot: Some(0),
            }
        })
        .collect();
    LinkPlacement {
        open_book: ob,
        components,
    }
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, doc: &Document| {
        std::fs::write(dir.join(name), emit(doc).unwrap()).unwrap();
        println!("wrote fixtures/{name}");
    };

    // Disk and a genus-one page with a positive twist along a1.
    let disk = OpenBook::with_default_bindings(Surface::new(0, 1).unwrap());
    write("disk.obk", &Document::OpenBook(disk));

    let torus_page = Surface::new(1, 1).unwrap();
    let torus = OpenBook::with_default_bindings(torus_page.clone())
        .set_word(MonodromyWord {
            twists: vec![Twist {
                curve: CurveRef {
                    id: "w1".into(),
                    homology: torus_page.unit_class(torus_page.basis()[0]).unwrap(),
                    kind: CurveKind::StabilizationCurve,
                    orientation: Sign::Plus,
                },
                sign: Sign::Plus,
            }],
        })
        .unwrap();
    write("torus.obk", &Document::OpenBook(torus));

    // A three-component planar placement in distinct parallel classes and
    // its realization outputs.
    let unlink = placement(&[(Sign::Plus, "p1"), (Sign::Plus, "p2"), (Sign::Plus, "p3")]);
    write("unlink.obk", &Document::Placement(unlink.clone()));
    let cert = build_schedule(&unlink).unwrap();
    let (realized, cert) = apply_schedule(&unlink, &cert).unwrap();
    write("unlink.cert.obk", &Document::Certificate(cert));
    write("unlink.book.obk", &Document::OpenBook(realized));

    // A mixed-orientation class: the schedule contains an auxiliary step
    // and dependency constraints.
    let mixed = placement(&[(Sign::Plus, "p1"), (Sign::Plus, "p1"), (Sign::Minus, "p1")]);
    write("mixed.obk", &Document::Placement(mixed.clone()));
    let cert = build_schedule(&mixed).unwrap();
    let (_, cert) = apply_schedule(&mixed, &cert).unwrap();
    write("mixed.cert.obk", &Document::Certificate(cert));

    // Support-genus certificates for a marked genus-one sub-binding.
    let mut marked = OpenBook::with_default_bindings(Surface::new(1, 2).unwrap());
    marked.sub_binding_marks.insert("B1".into());
    let t_cert = SgCertificate::transverse(marked).unwrap();
    let (l_cert, t_cert2) = roundtrip_sg(&t_cert).unwrap();
    write("subbinding.sg.obk", &Document::SgCertificate(t_cert));
    write("legendrian.sg.obk", &Document::SgCertificate(l_cert));
    write("realized.sg.obk", &Document::SgCertificate(t_cert2));
}
