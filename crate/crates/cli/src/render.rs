//! Deterministic SVG diagrams for open books, placements and certificates.
//!
//! The drawing is schematic: boundary circles in a row, one `<g
//! class="handle">` pair per genus, one `<g class="link">` per link curve
//! with an orientation arrow, and numbered `c_i` labels for certificate step
//! curves. Identical input yields byte-identical output.

use std::fmt::Write as _;
use thiserror::Error;

use openbook_core::{Certificate, LinkPlacement, OpenBook, Sign, Surface};

use crate::format::Document;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("unsupported document kind `{0}`")]
    Unsupported(&'static str),
}

const CELL: i64 = 60;
const MARGIN: i64 = 30;
const RADIUS: i64 = 20;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Canvas {
    body: String,
    width: i64,
    height: i64,
}

impl Canvas {
    fn new() -> Canvas {
        Canvas {
            body: String::new(),
            width: 2 * MARGIN,
            height: 2 * MARGIN,
        }
    }

    fn reserve(&mut self, x: i64, y: i64) {
        self.width = self.width.max(x + CELL);
        self.height = self.height.max(y + CELL);
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

fn draw_page(canvas: &mut Canvas, page: &Surface, bindings: &[String]) {
    let y = MARGIN + CELL;
    for (i, label) in bindings.iter().enumerate() {
        let cx = MARGIN + CELL / 2 + i as i64 * CELL;
        canvas.reserve(cx, y);
        writeln!(
            canvas.body,
            "  <circle class=\"boundary\" cx=\"{cx}\" cy=\"{y}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"black\"/>"
        )
        .expect("write to string");
        writeln!(
            canvas.body,
            "  <text class=\"binding-label\" x=\"{cx}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
            escape(label),
            ty = y + 4
        )
        .expect("write to string");
    }
    let handle_y = y + 2 * CELL;
    for g in 0..page.genus() {
        let x = MARGIN + CELL / 2 + g as i64 * 2 * CELL;
        canvas.reserve(x + CELL, handle_y);
        writeln!(canvas.body, "  <g class=\"handle\">").expect("write to string");
        writeln!(
            canvas.body,
            "    <circle cx=\"{x}\" cy=\"{handle_y}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"black\"/>"
        )
        .expect("write to string");
        writeln!(
            canvas.body,
            "    <circle cx=\"{cx2}\" cy=\"{handle_y}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"black\"/>",
            cx2 = x + CELL
        )
        .expect("write to string");
        writeln!(
            canvas.body,
            "    <text x=\"{tx}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"12\">g{n}</text>",
            tx = x + CELL / 2,
            ty = handle_y + 4,
            n = g + 1
        )
        .expect("write to string");
        writeln!(canvas.body, "  </g>").expect("write to string");
    }
}

fn draw_link(canvas: &mut Canvas, index: usize, id: &str, orientation: Sign) {
    let y = MARGIN + 5 * CELL;
    let x = MARGIN + CELL / 2 + index as i64 * 2 * CELL;
    canvas.reserve(x + CELL, y);
    let arrow = match orientation {
        Sign::Plus => format!(
            "M {ax} {ay} l -8 -4 l 0 8 z",
            ax = x + RADIUS + 8,
            ay = y
        ),
        Sign::Minus => format!(
            "M {ax} {ay} l 8 -4 l 0 8 z",
            ax = x - RADIUS - 8,
            ay = y
        ),
    };
    writeln!(canvas.body, "  <g class=\"link\">").expect("write to string");
    writeln!(
        canvas.body,
        "    <circle cx=\"{x}\" cy=\"{y}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"black\"/>"
    )
    .expect("write to string");
    writeln!(canvas.body, "    <path d=\"{arrow}\" fill=\"black\"/>").expect("write to string");
    writeln!(
        canvas.body,
        "    <text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        escape(id),
        ty = y + 4
    )
    .expect("write to string");
    writeln!(canvas.body, "  </g>").expect("write to string");
}

fn render_open_book(ob: &OpenBook) -> String {
    let mut canvas = Canvas::new();
    draw_page(&mut canvas, &ob.page, &ob.bindings);
    canvas.finish()
}

fn render_placement(p: &LinkPlacement) -> String {
    let mut canvas = Canvas::new();
    draw_page(&mut canvas, &p.open_book.page, &p.open_book.bindings);
    for (i, component) in p.components.iter().enumerate() {
        draw_link(&mut canvas, i, &component.id, component.orientation);
    }
    canvas.finish()
}

fn render_certificate(cert: &Certificate) -> String {
    let mut canvas = Canvas::new();
    let page = Surface::new(cert.initial_genus, cert.initial_boundary)
        .expect("certificate carries a valid initial page");
    let bindings: Vec<String> = (1..=cert.initial_boundary)
        .map(|i| format!("B{i}"))
        .collect();
    draw_page(&mut canvas, &page, &bindings);
    let y = MARGIN + 7 * CELL;
    for step in &cert.steps {
        let x = MARGIN + CELL / 2 + (step.index as i64 - 1) * CELL;
        canvas.reserve(x, y);
        writeln!(
            canvas.body,
            "  <g class=\"stabilization\">"
        )
        .expect("write to string");
        writeln!(
            canvas.body,
            "    <circle cx=\"{x}\" cy=\"{y}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 2\"/>"
        )
        .expect("write to string");
        writeln!(
            canvas.body,
            "    <text class=\"step-label\" x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"12\">c{n}</text>",
            ty = y + 4,
            n = step.index
        )
        .expect("write to string");
        writeln!(canvas.body, "  </g>").expect("write to string");
    }
    canvas.finish()
}

pub fn render(doc: &Document) -> Result<String, RenderError> {
    match doc {
        Document::OpenBook(ob) => Ok(render_open_book(ob)),
        Document::Placement(p) => Ok(render_placement(p)),
        Document::Certificate(c) => Ok(render_certificate(c)),
        Document::SgCertificate(_) => Err(RenderError::Unsupported("sg_certificate")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_is_one_circle_no_handles() {
        let ob = OpenBook::with_default_bindings(Surface::new(0, 1).unwrap());
        let svg = render(&Document::OpenBook(ob)).unwrap();
        assert_eq!(svg.matches("class=\"boundary\"").count(), 1);
        assert_eq!(svg.matches("class=\"handle\"").count(), 0);
    }

    #[test]
    fn genus_one_two_boundaries_with_link() {
        use openbook_core::{CurveKind, CurveRef, LinkComponent};
        let ob = OpenBook::with_default_bindings(Surface::new(1, 2).unwrap());
        let p = LinkPlacement {
            open_book: ob,
            components: vec![LinkComponent {
                id: "K1".into(),
                curve: CurveRef {
                    id: "k1".into(),
                    homology: vec![1, 0, 0],
                    kind: CurveKind::LinkComponent,
                    orientation: Sign::Plus,
                },
                orientation: Sign::Plus,
                parallel_class: "p1".into(),
                class_index: 1,
                nearest_binding: "B1".into(),
                framing_offset: 0,
                null_homologous: true,
                tb: Some(-1),
                rot: Some(0),
            }],
        };
        let svg = render(&Document::Placement(p)).unwrap();
        assert_eq!(svg.matches("class=\"boundary\"").count(), 2);
        assert_eq!(svg.matches("class=\"handle\"").count(), 1);
        assert_eq!(svg.matches("class=\"link\"").count(), 1);
        assert_eq!(svg.matches("<path").count(), 1);
    }

    #[test]
    fn deterministic_bytes() {
        let ob = OpenBook::with_default_bindings(Surface::new(2, 3).unwrap());
        let doc = Document::OpenBook(ob);
        assert_eq!(render(&doc).unwrap(), render(&doc).unwrap());
    }
}
