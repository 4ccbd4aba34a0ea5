use super::Formula;

// Binding strength, loosest first.
const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Prints a formula in the concrete grammar, folding the encodings of the
/// derived connectives back into their sugar. `parse_formula(render(φ)) == φ`.
pub fn render(formula: &Formula) -> String {
    let mut out = String::new();
    write(formula, IFF, &mut out);
    out
}

enum View<'a> {
    Iff(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Prefix(String, &'a Formula),
    Leaf(String),
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::Top => View::Leaf("T".into()),
        Formula::Atom(p) => View::Leaf(p.clone()),
        Formula::And(l, r) => {
            if let (Some((a, b)), Some((c, d))) = (l.as_implication(), r.as_implication()) {
                if a == d && b == c {
                    return View::Iff(a, b);
                }
            }
            View::And(l, r)
        }
        Formula::Knows(a, body) => View::Prefix(format!("K {a} "), body),
        Formula::Arb(body) => View::Prefix("A ".into(), body),
        Formula::Announce(ann, body) => View::Prefix(format!("[{}] ", render(ann)), body),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Top => View::Leaf("F".into()),
            Formula::And(l, r) => match (l.as_ref(), r.as_ref()) {
                (Formula::Not(a), Formula::Not(b)) if !matches!(a.as_ref(), Formula::And(..)) => {
                    View::Or(a, b)
                }
                (a, Formula::Not(b)) => View::Imp(a, b),
                _ => View::Prefix("~".into(), inner),
            },
            Formula::Knows(a, body) => match body.as_ref() {
                Formula::Not(b) => View::Prefix(format!("Khat {a} "), b),
                _ => View::Prefix("~".into(), inner),
            },
            Formula::Announce(ann, body) => match body.as_ref() {
                Formula::Not(b) => View::Prefix(format!("<{}> ", render(ann)), b),
                _ => View::Prefix("~".into(), inner),
            },
            Formula::Arb(body) => match body.as_ref() {
                Formula::Not(b) => View::Prefix("E ".into(), b),
                _ => View::Prefix("~".into(), inner),
            },
            _ => View::Prefix("~".into(), inner),
        },
    }
}

fn write(f: &Formula, context: u8, out: &mut String) {
    let (level, l, r, op) = match view(f) {
        View::Leaf(s) => {
            out.push_str(&s);
            return;
        }
        View::Prefix(prefix, body) => {
            out.push_str(&prefix);
            write(body, UNARY, out);
            return;
        }
        View::Iff(l, r) => (IFF, l, r, " <-> "),
        View::Imp(l, r) => (IMP, l, r, " -> "),
        View::Or(l, r) => (OR, l, r, " | "),
        View::And(l, r) => (AND, l, r, " & "),
    };
    let wrap = level < context;
    if wrap {
        out.push('(');
    }
    // `<->`, `|` and `&` associate left, `->` associates right.
    let (lctx, rctx) = if level == IMP {
        (level + 1, level)
    } else {
        (level, level + 1)
    };
    write(l, lctx, out);
    out.push_str(op);
    write(r, rctx, out);
    if wrap {
        out.push(')');
    }
}
