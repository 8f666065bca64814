use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DateRejection {
    RangeTooWide,
    Unparseable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParsedDate {
    Accepted(i32),
    Rejected(DateRejection),
}

impl ParsedDate {
    pub fn year(self) -> Option<i32> {
        match self {
            ParsedDate::Accepted(y) => Some(y),
            ParsedDate::Rejected(_) => None,
        }
    }
}

/// Widest accepted range, in years between the endpoints.
const MAX_RANGE: i32 = 10;

const PREFIXES: [&str; 4] = ["circa", "ca.", "c.", "ca "];
const SUFFIXES: [&str; 3] = ["a.d.", "a.d", "ad"];

fn strip_qualifiers(raw: &str) -> String {
    let mut s = raw.trim().to_lowercase();
    loop {
        let before = s.len();
        for p in PREFIXES {
            if let Some(rest) = s.strip_prefix(p) {
                s = rest.trim_start().to_string();
            }
        }
        for suffix in SUFFIXES {
            if let Some(rest) = s.strip_suffix(suffix) {
                if rest.is_empty()
                    || rest.ends_with(|c: char| c.is_ascii_digit() || c.is_whitespace())
                {
                    s = rest.trim_end().to_string();
                }
            }
        }
        if let Some(rest) = s.strip_suffix('.') {
            s = rest.trim_end().to_string();
        }
        if s.len() == before {
            return s;
        }
    }
}

fn year_token(s: &str) -> Option<i32> {
    let s = strip_qualifiers(s);
    if (3..=4).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

/// Normalises a creation date: a single year is kept, a range of at most
/// ten years collapses to the floor of its midpoint, anything else is
/// rejected.
pub fn parse_date(raw: &str) -> ParsedDate {
    if let Some(year) = year_token(raw) {
        return ParsedDate::Accepted(year);
    }
    let cleaned = strip_qualifiers(raw);
    let mut parts = cleaned.split(['-', '–']);
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return ParsedDate::Rejected(DateRejection::Unparseable);
    };
    match (year_token(a), year_token(b)) {
        (Some(y1), Some(y2)) if y2 >= y1 => {
            if y2 - y1 > MAX_RANGE {
                ParsedDate::Rejected(DateRejection::RangeTooWide)
            } else {
                ParsedDate::Accepted((y1 + y2).div_euclid(2))
            }
        }
        _ => ParsedDate::Rejected(DateRejection::Unparseable),
    }
}
