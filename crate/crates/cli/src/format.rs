//! Line-oriented structured text interchange format.
//!
//! Documents are meant to be diffed and reviewed: one fact per line, a
//! versioned header, and a canonical emission so that `parse` followed by
//! `emit` reproduces a canonical document byte for byte.
//!
//! Grammar (all tokens separated by single spaces, `-` marks an empty
//! value):
//!
//! ```text
//! obk 1 <open_book|placement|certificate|sg_certificate>
//!
//! open_book body:
//!   page genus=<g> boundary=<b>
//!   basis <label…|->
//!   binding <label>                (one per boundary component, in order)
//!   mark <label>                   (sorted)
//!   curve <id> <kind> <sign> <coeff,…|->
//!   twist <id> <sign>              (word order)
//!
//! placement body: open_book body, then
//!   component <id> curve=<id> orient=<sign> class=<label> index=<n>
//!             binding=<label> offset=<int> nullh=<bool> tb=<int|-> rot=<int|->
//!
//! certificate body:
//!   meta digest=<hex> case=<tag> order_free=<bool> genus0=<g> boundary0=<b> word0=<n>
//!   tag <text>
//!   negstab <component> <count>
//!   curve …                        (step twist curves, in step order)
//!   step <i> kind=<pushoff|aux> target=<id|-> feet=<label> curve=<id>
//!        new=<label> depends=<i,…|-> disjoint=<i,…|->
//!   ledger <i> genus=<g> boundary=<b> chi=<x> word=<n>
//!   subbind <component> <binding>
//!
//! sg_certificate body:
//!   meta kind=<legendrian|transverse> digest=<hex> bound=<g>
//!   assume <text>
//!   prov <op> <detail|->
//!   begin witness
//!   <nested document, including its own header>
//!   end
//! ```
//!
//! Every `curve` line must be referenced by a `twist`, `component` or `step`
//! line; unreferenced curves are a parse error so that re-emission is
//! canonical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

use openbook_core::{
    Case, Certificate, CurveKind, CurveRef, LedgerRow, LinkComponent, LinkPlacement,
    MonodromyWord, OpenBook, ProvenanceEntry, ScheduleStep, SgCertificate, SgKind, Sign,
    StepKind, Surface, Twist, Witness,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("emit: {0}")]
    Emit(String),
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    OpenBook(OpenBook),
    Placement(LinkPlacement),
    Certificate(Certificate),
    SgCertificate(SgCertificate),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::OpenBook(_) => "open_book",
            Document::Placement(_) => "placement",
            Document::Certificate(_) => "certificate",
            Document::SgCertificate(_) => "sg_certificate",
        }
    }
}

fn check_token(value: &str) -> Result<(), FormatError> {
    let ok = !value.is_empty()
        && value != "-"
        && value
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '+'));
    if ok {
        Ok(())
    } else {
        Err(FormatError::Emit(format!("invalid token `{value}`")))
    }
}

fn homology_text(v: &[i64]) -> String {
    if v.is_empty() {
        "-".to_string()
    } else {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn indices_text(set: &std::collections::BTreeSet<usize>) -> String {
    if set.is_empty() {
        "-".to_string()
    } else {
        set.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn opt_int_text(v: Option<i64>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "-".to_string(),
    }
}

// ---------------------------------------------------------------- emission

fn emit_curve_line(out: &mut String, curve: &CurveRef) -> Result<(), FormatError> {
    check_token(&curve.id)?;
    writeln!(
        out,
        "curve {} {} {} {}",
        curve.id,
        curve.kind,
        curve.orientation,
        homology_text(&curve.homology)
    )
    .expect("write to string");
    Ok(())
}

/// Word curves in first-use order, deduplicated by id. Two distinct curves
/// may not share an id.
fn word_curves(word: &MonodromyWord) -> Result<Vec<CurveRef>, FormatError> {
    let mut seen: BTreeMap<String, CurveRef> = BTreeMap::new();
    let mut order = Vec::new();
    for twist in &word.twists {
        match seen.get(&twist.curve.id) {
            None => {
                seen.insert(twist.curve.id.clone(), twist.curve.clone());
                order.push(twist.curve.clone());
            }
            Some(existing) if *existing == twist.curve => {}
            Some(_) => {
                return Err(FormatError::Emit(format!(
                    "curve id `{}` used for two different curves",
                    twist.curve.id
                )))
            }
        }
    }
    Ok(order)
}

fn emit_open_book_body(out: &mut String, ob: &OpenBook) -> Result<(), FormatError> {
    writeln!(
        out,
        "page genus={} boundary={}",
        ob.page.genus(),
        ob.page.boundary_count()
    )
    .expect("write to string");
    let basis = ob.page.basis();
    if basis.is_empty() {
        out.push_str("basis -\n");
    } else {
        let labels: Vec<String> = basis.iter().map(|l| l.to_string()).collect();
        writeln!(out, "basis {}", labels.join(" ")).expect("write to string");
    }
    for binding in &ob.bindings {
        check_token(binding)?;
        writeln!(out, "binding {binding}").expect("write to string");
    }
    for mark in &ob.sub_binding_marks {
        writeln!(out, "mark {mark}").expect("write to string");
    }
    for curve in word_curves(&ob.monodromy)? {
        emit_curve_line(out, &curve)?;
    }
    for twist in &ob.monodromy.twists {
        writeln!(out, "twist {} {}", twist.curve.id, twist.sign).expect("write to string");
    }
    Ok(())
}

fn emit_placement_body(out: &mut String, p: &LinkPlacement) -> Result<(), FormatError> {
    writeln!(
        out,
        "page genus={} boundary={}",
        p.open_book.page.genus(),
        p.open_book.page.boundary_count()
    )
    .expect("write to string");
    let basis = p.open_book.page.basis();
    if basis.is_empty() {
        out.push_str("basis -\n");
    } else {
        let labels: Vec<String> = basis.iter().map(|l| l.to_string()).collect();
        writeln!(out, "basis {}", labels.join(" ")).expect("write to string");
    }
    for binding in &p.open_book.bindings {
        check_token(binding)?;
        writeln!(out, "binding {binding}").expect("write to string");
    }
    for mark in &p.open_book.sub_binding_marks {
        writeln!(out, "mark {mark}").expect("write to string");
    }
    let mut emitted: BTreeMap<String, CurveRef> = BTreeMap::new();
    for curve in word_curves(&p.open_book.monodromy)? {
        emitted.insert(curve.id.clone(), curve.clone());
        emit_curve_line(out, &curve)?;
    }
    for component in &p.components {
        match emitted.get(&component.curve.id) {
            None => {
                emitted.insert(component.curve.id.clone(), component.curve.clone());
                emit_curve_line(out, &component.curve)?;
            }
            Some(existing) if *existing == component.curve => {}
            Some(_) => {
                return Err(FormatError::Emit(format!(
                    "curve id `{}` used for two different curves",
                    component.curve.id
                )))
            }
        }
    }
    for twist in &p.open_book.monodromy.twists {
        writeln!(out, "twist {} {}", twist.curve.id, twist.sign).expect("write to string");
    }
    for c in &p.components {
        check_token(&c.id)?;
        check_token(&c.parallel_class)?;
        check_token(&c.nearest_binding)?;
        writeln!(
            out,
            "component {} curve={} orient={} class={} index={} binding={} offset={} nullh={} tb={} rot={}",
            c.id,
            c.curve.id,
            c.orientation,
            c.parallel_class,
            c.class_index,
            c.nearest_binding,
            c.framing_offset,
            c.null_homologous,
            opt_int_text(c.tb),
            opt_int_text(c.rot),
        )
        .expect("write to string");
    }
    Ok(())
}

fn emit_certificate_body(out: &mut String, cert: &Certificate) -> Result<(), FormatError> {
    writeln!(
        out,
        "meta digest={} case={} order_free={} genus0={} boundary0={} word0={}",
        cert.input_digest,
        cert.case,
        cert.order_free,
        cert.initial_genus,
        cert.initial_boundary,
        cert.initial_word_len
    )
    .expect("write to string");
    for tag in &cert.tags {
        check_token(tag)?;
        writeln!(out, "tag {tag}").expect("write to string");
    }
    for (component, count) in &cert.negative_stabilizations {
        writeln!(out, "negstab {component} {count}").expect("write to string");
    }
    for step in &cert.steps {
        emit_curve_line(out, &step.twist_curve)?;
    }
    for step in &cert.steps {
        writeln!(
            out,
            "step {} kind={} target={} feet={} curve={} new={} depends={} disjoint={}",
            step.index,
            step.kind,
            step.target_component.as_deref().unwrap_or("-"),
            step.feet_binding,
            step.twist_curve.id,
            step.new_binding,
            indices_text(&step.depends_on),
            indices_text(&step.disjoint_from),
        )
        .expect("write to string");
    }
    for row in &cert.ledger {
        writeln!(
            out,
            "ledger {} genus={} boundary={} chi={} word={}",
            row.step, row.genus, row.boundary_count, row.euler_char, row.word_len
        )
        .expect("write to string");
    }
    for (component, binding) in &cert.sub_binding_map {
        writeln!(out, "subbind {component} {binding}").expect("write to string");
    }
    Ok(())
}

fn emit_sg_body(out: &mut String, cert: &SgCertificate) -> Result<(), FormatError> {
    let kind = match cert.kind {
        SgKind::Legendrian => "legendrian",
        SgKind::Transverse => "transverse",
    };
    writeln!(
        out,
        "meta kind={kind} digest={} bound={}",
        cert.link_digest, cert.genus_upper_bound
    )
    .expect("write to string");
    for assumption in &cert.assumptions {
        check_token(assumption)?;
        writeln!(out, "assume {assumption}").expect("write to string");
    }
    for entry in &cert.provenance {
        check_token(&entry.op)?;
        if entry.detail != "-" && !entry.detail.is_empty() {
            check_token(&entry.detail)?;
            writeln!(out, "prov {} {}", entry.op, entry.detail).expect("write to string");
        } else {
            writeln!(out, "prov {} -", entry.op).expect("write to string");
        }
    }
    out.push_str("begin witness\n");
    let inner = match &cert.witness {
        Witness::SubBinding(ob) => emit(&Document::OpenBook(ob.clone()))?,
        Witness::PagePlacement(p) => emit(&Document::Placement(p.clone()))?,
    };
    out.push_str(&inner);
    out.push_str("end\n");
    Ok(())
}

/// Canonical emission. The output always ends with a newline.
pub fn emit(doc: &Document) -> Result<String, FormatError> {
    let mut out = String::new();
    writeln!(out, "obk {FORMAT_VERSION} {}", doc.kind()).expect("write to string");
    match doc {
        Document::OpenBook(ob) => emit_open_book_body(&mut out, ob)?,
        Document::Placement(p) => emit_placement_body(&mut out, p)?,
        Document::Certificate(c) => emit_certificate_body(&mut out, c)?,
        Document::SgCertificate(c) => emit_sg_body(&mut out, c)?,
    }
    Ok(out)
}

// ----------------------------------------------------------------- parsing

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

fn tokenize(input: &str) -> Vec<Line<'_>> {
    input
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some(Line {
                    number: i + 1,
                    tokens,
                })
            }
        })
        .collect()
}

fn kv<'a>(line: &Line<'a>, position: usize, key: &str) -> Result<&'a str, FormatError> {
    let token = line.tokens.get(position).copied().ok_or(FormatError::Parse {
        line: line.number,
        message: format!("missing field `{key}`"),
    })?;
    match token.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => parse_err(line.number, format!("expected `{key}=…`, found `{token}`")),
    }
}

fn parse_int<T: std::str::FromStr>(line: usize, text: &str) -> Result<T, FormatError> {
    text.parse()
        .map_err(|_| FormatError::Parse {
            line,
            message: format!("invalid number `{text}`"),
        })
}

fn parse_opt_int(line: usize, text: &str) -> Result<Option<i64>, FormatError> {
    if text == "-" {
        Ok(None)
    } else {
        Ok(Some(parse_int(line, text)?))
    }
}

fn parse_bool(line: usize, text: &str) -> Result<bool, FormatError> {
    match text {
        "true" => Ok(true),
        "false" => Ok(false),
        other => parse_err(line, format!("invalid boolean `{other}`")),
    }
}

fn parse_sign(line: usize, text: &str) -> Result<Sign, FormatError> {
    text.parse().map_err(|e: String| FormatError::Parse {
        line,
        message: e,
    })
}

fn parse_homology(line: usize, text: &str) -> Result<Vec<i64>, FormatError> {
    if text == "-" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|x| parse_int(line, x))
        .collect()
}

fn parse_indices(
    line: usize,
    text: &str,
) -> Result<std::collections::BTreeSet<usize>, FormatError> {
    if text == "-" {
        return Ok(Default::default());
    }
    text.split(',').map(|x| parse_int(line, x)).collect()
}

fn parse_curve_line(line: &Line<'_>) -> Result<CurveRef, FormatError> {
    if line.tokens.len() != 5 {
        return parse_err(line.number, "curve line needs: id kind sign homology");
    }
    let kind: CurveKind = line.tokens[2].parse().map_err(|e: String| FormatError::Parse {
        line: line.number,
        message: e,
    })?;
    Ok(CurveRef {
        id: line.tokens[1].to_string(),
        kind,
        orientation: parse_sign(line.number, line.tokens[3])?,
        homology: parse_homology(line.number, line.tokens[4])?,
    })
}

struct BookData {
    open_book: OpenBook,
    curves: Vec<CurveRef>,
    referenced: std::collections::BTreeSet<String>,
}

impl BookData {
    fn curve(&mut self, line: usize, id: &str) -> Result<CurveRef, FormatError> {
        match self.curves.iter().find(|c| c.id == id) {
            Some(curve) => {
                self.referenced.insert(id.to_string());
                Ok(curve.clone())
            }
            None => parse_err(line, format!("unknown curve `{id}`")),
        }
    }
}

/// Parse the shared page/binding/curve/twist lines. Leaves `referenced`
/// tracking so callers can reject unreferenced curves.
fn parse_book_lines(lines: &[Line<'_>]) -> Result<(BookData, Vec<usize>), FormatError> {
    let first = lines.first().ok_or(FormatError::Parse {
        line: 0,
        message: "empty document body".into(),
    })?;
    if first.tokens[0] != "page" {
        return parse_err(first.number, "body must start with a `page` line");
    }
    let genus: usize = parse_int(first.number, kv(first, 1, "genus")?)?;
    let boundary: usize = parse_int(first.number, kv(first, 2, "boundary")?)?;
    let page = Surface::new(genus, boundary).map_err(|e| FormatError::Parse {
        line: first.number,
        message: e.to_string(),
    })?;

    let mut bindings: Vec<String> = Vec::new();
    let mut marks: Vec<String> = Vec::new();
    let mut curves: Vec<CurveRef> = Vec::new();
    let mut twists: Vec<(usize, String, Sign)> = Vec::new();
    let mut consumed = vec![0usize]; // indices into `lines` handled here
    let mut saw_basis = false;

    for (i, line) in lines.iter().enumerate().skip(1) {
        match line.tokens[0] {
            "basis" => {
                let expected: Vec<String> =
                    page.basis().iter().map(|l| l.to_string()).collect();
                let given: Vec<String> = if line.tokens.len() == 2 && line.tokens[1] == "-" {
                    Vec::new()
                } else {
                    line.tokens[1..].iter().map(|s| s.to_string()).collect()
                };
                if given != expected {
                    return parse_err(
                        line.number,
                        format!("basis must be `{}`", expected.join(" ")),
                    );
                }
                saw_basis = true;
                consumed.push(i);
            }
            "binding" => {
                if line.tokens.len() != 2 {
                    return parse_err(line.number, "binding line needs one label");
                }
                bindings.push(line.tokens[1].to_string());
                consumed.push(i);
            }
            "mark" => {
                if line.tokens.len() != 2 {
                    return parse_err(line.number, "mark line needs one label");
                }
                marks.push(line.tokens[1].to_string());
                consumed.push(i);
            }
            "curve" => {
                let curve = parse_curve_line(line)?;
                if curves.iter().any(|c| c.id == curve.id) {
                    return parse_err(line.number, format!("duplicate curve `{}`", curve.id));
                }
                curves.push(curve);
                consumed.push(i);
            }
            "twist" => {
                if line.tokens.len() != 3 {
                    return parse_err(line.number, "twist line needs: id sign");
                }
                twists.push((
                    line.number,
                    line.tokens[1].to_string(),
                    parse_sign(line.number, line.tokens[2])?,
                ));
                consumed.push(i);
            }
            _ => {}
        }
    }
    if !saw_basis {
        return parse_err(first.number, "missing `basis` line");
    }

    let open_book = OpenBook::new(page, bindings).map_err(|e| FormatError::Parse {
        line: first.number,
        message: e.to_string(),
    })?;
    let mut data = BookData {
        open_book,
        curves,
        referenced: Default::default(),
    };
    let mut word = Vec::new();
    for (line, id, sign) in twists {
        let curve = data.curve(line, &id)?;
        word.push(Twist { curve, sign });
    }
    for mark in marks {
        if data.open_book.binding_index(&mark).is_none() {
            return parse_err(first.number, format!("mark `{mark}` is not a binding"));
        }
        data.open_book.sub_binding_marks.insert(mark);
    }
    data.open_book = data
        .open_book
        .clone()
        .set_word(MonodromyWord { twists: word })
        .map_err(|e| FormatError::Parse {
            line: first.number,
            message: e.to_string(),
        })?;
    Ok((data, consumed))
}

fn reject_unreferenced(data: &BookData, lines: &[Line<'_>]) -> Result<(), FormatError> {
    for curve in &data.curves {
        if !data.referenced.contains(&curve.id) {
            let line = lines
                .iter()
                .find(|l| l.tokens[0] == "curve" && l.tokens.get(1) == Some(&curve.id.as_str()))
                .map(|l| l.number)
                .unwrap_or(0);
            return parse_err(line, format!("unreferenced curve `{}`", curve.id));
        }
    }
    Ok(())
}

fn parse_open_book(lines: &[Line<'_>]) -> Result<OpenBook, FormatError> {
    let (data, _) = parse_book_lines(lines)?;
    for line in lines.iter().skip(1) {
        match line.tokens[0] {
            "basis" | "binding" | "mark" | "curve" | "twist" => {}
            other => return parse_err(line.number, format!("unexpected line `{other}`")),
        }
    }
    reject_unreferenced(&data, lines)?;
    Ok(data.open_book)
}

fn parse_placement(lines: &[Line<'_>]) -> Result<LinkPlacement, FormatError> {
    let (mut data, _) = parse_book_lines(lines)?;
    let mut components = Vec::new();
    for line in lines.iter().skip(1) {
        match line.tokens[0] {
            "basis" | "binding" | "mark" | "curve" | "twist" => {}
            "component" => {
                if line.tokens.len() != 11 {
                    return parse_err(line.number, "component line needs 10 fields");
                }
                let id = line.tokens[1].to_string();
                let curve_id = kv(line, 2, "curve")?;
                let orientation = parse_sign(line.number, kv(line, 3, "orient")?)?;
                let parallel_class = kv(line, 4, "class")?.to_string();
                let class_index: u32 = parse_int(line.number, kv(line, 5, "index")?)?;
                let nearest_binding = kv(line, 6, "binding")?.to_string();
                let framing_offset: i64 = parse_int(line.number, kv(line, 7, "offset")?)?;
                let null_homologous = parse_bool(line.number, kv(line, 8, "nullh")?)?;
                let tb = parse_opt_int(line.number, kv(line, 9, "tb")?)?;
                let rot = parse_opt_int(line.number, kv(line, 10, "rot")?)?;
                let curve = data.curve(line.number, curve_id)?;
                if curve.orientation != orientation {
                    return parse_err(
                        line.number,
                        "component orientation disagrees with its curve",
                    );
                }
                components.push(LinkComponent {
                    id,
                    curve,
                    orientation,
                    parallel_class,
                    class_index,
                    nearest_binding,
                    framing_offset,
                    null_homologous,
                    tb,
                    rot,
                });
            }
            other => return parse_err(line.number, format!("unexpected line `{other}`")),
        }
    }
    reject_unreferenced(&data, lines)?;
    Ok(LinkPlacement {
        open_book: data.open_book,
        components,
    })
}

fn parse_certificate(lines: &[Line<'_>]) -> Result<Certificate, FormatError> {
    let first = lines.first().ok_or(FormatError::Parse {
        line: 0,
        message: "empty document body".into(),
    })?;
    if first.tokens[0] != "meta" {
        return parse_err(first.number, "certificate body must start with `meta`");
    }
    let input_digest = kv(first, 1, "digest")?.to_string();
    let case: Case = kv(first, 2, "case")?
        .parse()
        .map_err(|e: String| FormatError::Parse {
            line: first.number,
            message: e,
        })?;
    let order_free = parse_bool(first.number, kv(first, 3, "order_free")?)?;
    let initial_genus: usize = parse_int(first.number, kv(first, 4, "genus0")?)?;
    let initial_boundary: usize = parse_int(first.number, kv(first, 5, "boundary0")?)?;
    let initial_word_len: usize = parse_int(first.number, kv(first, 6, "word0")?)?;

    let mut tags = Vec::new();
    let mut negative_stabilizations = BTreeMap::new();
    let mut curves: Vec<CurveRef> = Vec::new();
    let mut steps: Vec<ScheduleStep> = Vec::new();
    let mut ledger: Vec<LedgerRow> = Vec::new();
    let mut sub_binding_map = BTreeMap::new();

    for line in lines.iter().skip(1) {
        match line.tokens[0] {
            "tag" => {
                if line.tokens.len() != 2 {
                    return parse_err(line.number, "tag line needs one token");
                }
                tags.push(line.tokens[1].to_string());
            }
            "negstab" => {
                if line.tokens.len() != 3 {
                    return parse_err(line.number, "negstab line needs: component count");
                }
                let count: u32 = parse_int(line.number, line.tokens[2])?;
                negative_stabilizations.insert(line.tokens[1].to_string(), count);
            }
            "curve" => {
                let curve = parse_curve_line(line)?;
                if curves.iter().any(|c| c.id == curve.id) {
                    return parse_err(line.number, format!("duplicate curve `{}`", curve.id));
                }
                curves.push(curve);
            }
            "step" => {
                if line.tokens.len() != 9 {
                    return parse_err(line.number, "step line needs 8 fields");
                }
                let index: usize = parse_int(line.number, line.tokens[1])?;
                let kind: StepKind = kv(line, 2, "kind")?
                    .parse()
                    .map_err(|e: String| FormatError::Parse {
                        line: line.number,
                        message: e,
                    })?;
                let target = kv(line, 3, "target")?;
                let target_component = if target == "-" {
                    None
                } else {
                    Some(target.to_string())
                };
                let feet_binding = kv(line, 4, "feet")?.to_string();
                let curve_id = kv(line, 5, "curve")?;
                let new_binding = kv(line, 6, "new")?.to_string();
                let depends_on = parse_indices(line.number, kv(line, 7, "depends")?)?;
                let disjoint_from = parse_indices(line.number, kv(line, 8, "disjoint")?)?;
                let twist_curve = curves
                    .iter()
                    .find(|c| c.id == curve_id)
                    .cloned()
                    .ok_or(FormatError::Parse {
                        line: line.number,
                        message: format!("unknown curve `{curve_id}`"),
                    })?;
                if index != steps.len() + 1 {
                    return parse_err(
                        line.number,
                        format!("step index {index} out of order, expected {}", steps.len() + 1),
                    );
                }
                steps.push(ScheduleStep {
                    index,
                    kind,
                    target_component,
                    feet_binding,
                    twist_curve,
                    new_binding,
                    depends_on,
                    disjoint_from,
                });
            }
            "ledger" => {
                if line.tokens.len() != 6 {
                    return parse_err(line.number, "ledger line needs 5 fields");
                }
                ledger.push(LedgerRow {
                    step: parse_int(line.number, line.tokens[1])?,
                    genus: parse_int(line.number, kv(line, 2, "genus")?)?,
                    boundary_count: parse_int(line.number, kv(line, 3, "boundary")?)?,
                    euler_char: parse_int(line.number, kv(line, 4, "chi")?)?,
                    word_len: parse_int(line.number, kv(line, 5, "word")?)?,
                });
            }
            "subbind" => {
                if line.tokens.len() != 3 {
                    return parse_err(line.number, "subbind line needs: component binding");
                }
                sub_binding_map.insert(line.tokens[1].to_string(), line.tokens[2].to_string());
            }
            other => return parse_err(line.number, format!("unexpected line `{other}`")),
        }
    }

    for curve in &curves {
        if !steps.iter().any(|s| s.twist_curve.id == curve.id) {
            return parse_err(first.number, format!("unreferenced curve `{}`", curve.id));
        }
    }

    Ok(Certificate {
        input_digest,
        case,
        initial_genus,
        initial_boundary,
        initial_word_len,
        steps,
        ledger,
        sub_binding_map,
        negative_stabilizations,
        order_free,
        tags,
    })
}

fn parse_sg(input_lines: &[Line<'_>], raw: &str) -> Result<SgCertificate, FormatError> {
    let first = input_lines.first().ok_or(FormatError::Parse {
        line: 0,
        message: "empty document body".into(),
    })?;
    if first.tokens[0] != "meta" {
        return parse_err(first.number, "sg_certificate body must start with `meta`");
    }
    let kind = match kv(first, 1, "kind")? {
        "legendrian" => SgKind::Legendrian,
        "transverse" => SgKind::Transverse,
        other => return parse_err(first.number, format!("invalid sg kind `{other}`")),
    };
    let link_digest = kv(first, 2, "digest")?.to_string();
    let genus_upper_bound: usize = parse_int(first.number, kv(first, 3, "bound")?)?;

    let mut assumptions = Vec::new();
    let mut provenance = Vec::new();
    let mut witness_span: Option<(usize, usize)> = None; // line numbers, exclusive

    let mut depth = 0usize;
    let mut begin_line = 0usize;
    for line in input_lines.iter().skip(1) {
        if line.tokens[0] == "begin" {
            if depth == 0 {
                if line.tokens.get(1) != Some(&"witness") {
                    return parse_err(line.number, "only `begin witness` blocks are supported");
                }
                begin_line = line.number;
            }
            depth += 1;
            continue;
        }
        if line.tokens[0] == "end" {
            if depth == 0 {
                return parse_err(line.number, "`end` without `begin`");
            }
            depth -= 1;
            if depth == 0 {
                if witness_span.is_some() {
                    return parse_err(line.number, "multiple witness blocks");
                }
                witness_span = Some((begin_line, line.number));
            }
            continue;
        }
        if depth > 0 {
            continue;
        }
        match line.tokens[0] {
            "assume" => {
                if line.tokens.len() != 2 {
                    return parse_err(line.number, "assume line needs one token");
                }
                assumptions.push(line.tokens[1].to_string());
            }
            "prov" => {
                if line.tokens.len() != 3 {
                    return parse_err(line.number, "prov line needs: op detail");
                }
                provenance.push(ProvenanceEntry {
                    op: line.tokens[1].to_string(),
                    detail: line.tokens[2].to_string(),
                });
            }
            other => return parse_err(line.number, format!("unexpected line `{other}`")),
        }
    }
    if depth != 0 {
        return parse_err(begin_line, "unterminated witness block");
    }
    let (start, end) = witness_span.ok_or(FormatError::Parse {
        line: first.number,
        message: "missing witness block".into(),
    })?;

    let inner: String = raw
        .lines()
        .enumerate()
        .filter(|(i, _)| i + 1 > start && i + 1 < end)
        .map(|(_, l)| format!("{l}\n"))
        .collect();
    let witness_doc = parse(&inner).map_err(|e| match e {
        FormatError::Parse { line, message } => FormatError::Parse {
            line: line + start,
            message,
        },
        other => other,
    })?;
    let witness = match (kind, witness_doc) {
        (SgKind::Transverse, Document::OpenBook(ob)) => Witness::SubBinding(ob),
        (SgKind::Legendrian, Document::Placement(p)) => Witness::PagePlacement(p),
        _ => {
            return parse_err(
                start,
                "witness kind does not match the certificate kind",
            )
        }
    };

    Ok(SgCertificate {
        kind,
        link_digest,
        genus_upper_bound,
        witness,
        provenance,
        assumptions,
    })
}

/// Parse a document. Accepts any whitespace-normalized variant of the
/// canonical form; `emit` restores canonical bytes.
pub fn parse(input: &str) -> Result<Document, FormatError> {
    let lines = tokenize(input);
    let header = lines.first().ok_or(FormatError::Parse {
        line: 1,
        message: "empty document".into(),
    })?;
    if header.tokens.len() != 3 || header.tokens[0] != "obk" {
        return parse_err(header.number, "header must be `obk <version> <kind>`");
    }
    let version: u32 = parse_int(header.number, header.tokens[1])?;
    if version != FORMAT_VERSION {
        return parse_err(
            header.number,
            format!("unsupported format version {version}"),
        );
    }
    let body = &lines[1..];
    match header.tokens[2] {
        "open_book" => Ok(Document::OpenBook(parse_open_book(body)?)),
        "placement" => Ok(Document::Placement(parse_placement(body)?)),
        "certificate" => Ok(Document::Certificate(parse_certificate(body)?)),
        "sg_certificate" => Ok(Document::SgCertificate(parse_sg(body, input)?)),
        other => parse_err(header.number, format!("unknown document kind `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use openbook_core::pushoff::{apply_schedule, build_schedule};

    fn sample_placement() -> LinkPlacement {
        let page = Surface::new(0, 2).unwrap();
        let ob = OpenBook::with_default_bindings(page);
        LinkPlacement {
            open_book: ob,
            components: vec![LinkComponent {
                id: "K1".into(),
                curve: CurveRef {
                    id: "k1".into(),
                    homology: vec![2],
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
        }
    }

    #[test]
    fn open_book_round_trip() {
        let ob = OpenBook::with_default_bindings(Surface::new(1, 2).unwrap());
        let doc = Document::OpenBook(ob);
        let text = emit(&doc).unwrap();
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(emit(&parsed).unwrap(), text);
    }

    #[test]
    fn placement_round_trip() {
        let doc = Document::Placement(sample_placement());
        let text = emit(&doc).unwrap();
        assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn certificate_round_trip() {
        let p = sample_placement();
        let cert = build_schedule(&p).unwrap();
        let (_, cert) = apply_schedule(&p, &cert).unwrap();
        let doc = Document::Certificate(cert);
        let text = emit(&doc).unwrap();
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(emit(&parsed).unwrap(), text);
    }

    #[test]
    fn sg_certificate_round_trip() {
        let mut ob = OpenBook::with_default_bindings(Surface::new(2, 2).unwrap());
        ob.sub_binding_marks.insert("B1".into());
        let cert = SgCertificate::transverse(ob).unwrap();
        let doc = Document::SgCertificate(cert);
        let text = emit(&doc).unwrap();
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(emit(&parsed).unwrap(), text);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse("obk 1 open_book\npage genus=zero boundary=1\n").unwrap_err();
        assert_eq!(
            err,
            FormatError::Parse {
                line: 2,
                message: "invalid number `zero`".into()
            }
        );
    }

    #[test]
    fn unreferenced_curves_are_rejected() {
        let text = "obk 1 open_book\npage genus=0 boundary=1\nbasis -\nbinding B1\ncurve c1 link-component + -\n";
        let err = parse(text).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 5, .. }));
    }
}
