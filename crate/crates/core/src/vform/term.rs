use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Derivative applied to a test or trial symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Val,
    Dx,
    Dy,
    Grad,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Val => "val",
            Tag::Dx => "dx",
            Tag::Dy => "dy",
            Tag::Grad => "grad",
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "val" => Ok(Tag::Val),
            "dx" => Ok(Tag::Dx),
            "dy" => Ok(Tag::Dy),
            "grad" => Ok(Tag::Grad),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

/// `symbol.tag`, e.g. `v1.dx`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub symbol: String,
    pub tag: Tag,
}

impl Term {
    pub fn new(symbol: impl Into<String>, tag: Tag) -> Self {
        Self {
            symbol: symbol.into(),
            tag,
        }
    }

    /// Component index of a standard symbol: `v`/`u` are component 0,
    /// `v3`/`u3` component 2. Returns `None` for other symbols.
    pub fn component(&self, prefix: char) -> Option<usize> {
        let rest = self.symbol.strip_prefix(prefix)?;
        if rest.is_empty() {
            return Some(0);
        }
        match rest.parse::<usize>() {
            Ok(n) if n >= 1 && !rest.starts_with('0') => Some(n - 1),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.symbol, self.tag.as_str())
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sum = parse_term_sum(s)?;
        match <[Term; 1]>::try_from(sum.0) {
            Ok([t]) => Ok(t),
            Err(_) => Err(Error::TermSyntax {
                input: s.to_string(),
                pos: s.find('+').unwrap_or(0),
                msg: "expected a single term".into(),
            }),
        }
    }
}

/// `'+'`-joined terms, e.g. `v1.dy + v2.dx`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermSum(pub Vec<Term>);

impl TermSum {
    pub fn single(term: Term) -> Self {
        Self(vec![term])
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for TermSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_term_sum(s)
    }
}

/// Parses `term ('+' term)*` with `term := ident '.' tag`.
pub fn parse_term_sum(s: &str) -> Result<TermSum> {
    let err = |pos: usize, msg: &str| Error::TermSyntax {
        input: s.to_string(),
        pos,
        msg: msg.to_string(),
    };
    let bytes = s.as_bytes();
    let skip_ws = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        i
    };
    let ident = |i: usize| {
        let mut j = i;
        if j < bytes.len() && (bytes[j].is_ascii_alphabetic() || bytes[j] == b'_') {
            j += 1;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
        }
        j
    };

    let mut terms = Vec::new();
    let mut i = skip_ws(0);
    loop {
        let end = ident(i);
        if end == i {
            return Err(err(i, "expected a symbol"));
        }
        let symbol = &s[i..end];
        i = skip_ws(end);
        if bytes.get(i) != Some(&b'.') {
            return Err(err(i, "expected `.` after symbol"));
        }
        i = skip_ws(i + 1);
        let end = ident(i);
        if end == i {
            return Err(err(i, "expected a derivative tag"));
        }
        let tag: Tag = s[i..end].parse()?;
        terms.push(Term::new(symbol, tag));
        i = skip_ws(end);
        match bytes.get(i) {
            None => break,
            Some(b'+') => i = skip_ws(i + 1),
            Some(_) => return Err(err(i, "expected `+` or end of input")),
        }
    }
    Ok(TermSum(terms))
}
