//! Minimal `Accept` header negotiation.

struct Range<'a> {
    kind: &'a str,
    subtype: &'a str,
    q: f32,
}

fn ranges(header: &str) -> Vec<Range<'_>> {
    header
        .split(',')
        .filter_map(|item| {
            let mut parts = item.split(';').map(str::trim);
            let (kind, subtype) = parts.next()?.split_once('/')?;
            let mut q = 1.0;
            for p in parts {
                if let Some(v) = p.strip_prefix("q=").or_else(|| p.strip_prefix("Q=")) {
                    q = v.trim().parse().unwrap_or(0.0);
                }
            }
            Some(Range { kind, subtype, q })
        })
        .collect()
}

/// Picks the offered media type the client prefers. A missing or empty
/// header accepts the first offer; `None` means nothing is acceptable.
pub fn negotiate<'o>(accept: Option<&str>, offered: &[&'o str]) -> Option<&'o str> {
    let header = accept.map(str::trim).filter(|h| !h.is_empty());
    let Some(header) = header else {
        return offered.first().copied();
    };
    let ranges = ranges(header);
    let mut best: Option<(&'o str, f32, u8)> = None;
    for &offer in offered {
        let (kind, subtype) = offer.split_once('/').unwrap_or((offer, ""));
        // The most specific matching range decides the quality.
        let matched = ranges
            .iter()
            .filter_map(|r| {
                let specificity = match (r.kind, r.subtype) {
                    (k, s) if k.eq_ignore_ascii_case(kind) && s.eq_ignore_ascii_case(subtype) => 2,
                    (k, "*") if k.eq_ignore_ascii_case(kind) => 1,
                    ("*", "*") => 0,
                    _ => return None,
                };
                Some((specificity, r.q))
            })
            .max_by(|a, b| a.0.cmp(&b.0));
        if let Some((specificity, q)) = matched {
            if q > 0.0 && best.is_none_or(|(_, bq, bs)| q > bq || (q == bq && specificity > bs)) {
                best = Some((offer, q, specificity));
            }
        }
    }
    best.map(|(o, _, _)| o)
}
