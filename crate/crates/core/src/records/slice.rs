//! `name[start:end]` split slices. Bounds are record ordinals or integer
//! percentages (`80%`); percentages map to `floor(n * p / 100)`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Index(usize),
    Percent(u32),
}

impl Bound {
    fn resolve(self, n: usize) -> usize {
        match self {
            Bound::Index(i) => i.min(n),
            Bound::Percent(p) => ((n as u128 * p as u128) / 100) as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSlice {
    pub name: String,
    pub start: Option<Bound>,
    pub end: Option<Bound>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid slice `{expr}`: {reason}")]
pub struct SliceSyntax {
    pub expr: String,
    pub reason: &'static str,
}

impl SplitSlice {
    pub fn parse(expr: &str) -> Result<SplitSlice, SliceSyntax> {
        let err = |reason| SliceSyntax { expr: expr.to_string(), reason };
        let (name, range) = match expr.find('[') {
            Some(open) => {
                let inner = expr[open + 1..].strip_suffix(']').ok_or_else(|| err("missing closing `]`"))?;
                (&expr[..open], Some(inner))
            }
            None => (expr, None),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || "_-./".contains(c)) {
            return Err(err("expected a split or record-set name"));
        }
        let (start, end) = match range {
            None => (None, None),
            Some(inner) => {
                let (s, e) = inner.split_once(':').ok_or_else(|| err("expected `start:end`"))?;
                (parse_bound(s.trim()).map_err(err)?, parse_bound(e.trim()).map_err(err)?)
            }
        };
        if let (Some(Bound::Percent(s)), Some(Bound::Percent(e))) = (start, end) {
            if s > e {
                return Err(err("start percentage exceeds end percentage"));
            }
        }
        if let (Some(Bound::Index(s)), Some(Bound::Index(e))) = (start, end) {
            if s > e {
                return Err(err("start index exceeds end index"));
            }
        }
        Ok(SplitSlice { name: name.to_string(), start, end })
    }

    /// Whether resolving needs the total record count.
    pub fn needs_total(&self) -> bool {
        matches!(self.start, Some(Bound::Percent(_))) || matches!(self.end, Some(Bound::Percent(_)))
    }

    /// Half-open ordinal range over `n` records.
    pub fn range(&self, n: usize) -> std::ops::Range<usize> {
        let start = self.start.map_or(0, |b| b.resolve(n));
        let end = self.end.map_or(n, |b| b.resolve(n));
        start.min(end)..end
    }

    pub fn is_full(&self) -> bool {
        self.start.is_none() && self.end.is_none()
    }
}

fn parse_bound(s: &str) -> Result<Option<Bound>, &'static str> {
    if s.is_empty() {
        return Ok(None);
    }
    if let Some(p) = s.strip_suffix('%') {
        if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
            return Err("percentages are whole numbers");
        }
        let p: u32 = p.parse().map_err(|_| "percentage out of range")?;
        if p > 100 {
            return Err("percentages lie between 0 and 100");
        }
        return Ok(Some(Bound::Percent(p)));
    }
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err("bounds are non-negative integers or percentages");
    }
    s.parse().map(|i| Some(Bound::Index(i))).map_err(|_| "index out of range")
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Index(i) => write!(f, "{i}"),
            Bound::Percent(p) => write!(f, "{p}%"),
        }
    }
}

impl fmt::Display for SplitSlice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.is_full() {
            let show = |b: Option<Bound>| b.map(|b| b.to_string()).unwrap_or_default();
            write!(f, "[{}:{}]", show(self.start), show(self.end))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_forms() {
        let s = SplitSlice::parse("default[:80%]").unwrap();
        assert_eq!((s.name.as_str(), s.start, s.end), ("default", None, Some(Bound::Percent(80))));
        assert_eq!(s.range(10), 0..8);
        let s = SplitSlice::parse("default").unwrap();
        assert!(s.is_full());
        assert_eq!(s.range(10), 0..10);
        let s = SplitSlice::parse("train[10:20]").unwrap();
        assert_eq!((s.start, s.end), (Some(Bound::Index(10)), Some(Bound::Index(20))));
        assert_eq!(s.range(15), 10..15);
        assert_eq!(s.range(5), 5..5);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "[:1]", "a[1]", "a[:80%", "a[:101%]", "a[-1:]", "a[50%:10%]", "a[1.5%:]", "a b", "a[5:2]"] {
            assert!(SplitSlice::parse(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn percent_halves_partition(n in 0usize..500, p in 0u32..=100) {
            let head = SplitSlice::parse(&format!("d[:{p}%]")).unwrap().range(n);
            let tail = SplitSlice::parse(&format!("d[{p}%:]")).unwrap().range(n);
            prop_assert_eq!(head.start, 0);
            prop_assert_eq!(head.end, tail.start);
            prop_assert_eq!(tail.end, n);
        }

        #[test]
        fn display_reparses(s in 0u32..=50, e in 50u32..=100) {
            let slice = SplitSlice::parse(&format!("x[{s}%:{e}%]")).unwrap();
            prop_assert_eq!(SplitSlice::parse(&slice.to_string()).unwrap(), slice);
        }
    }
}
