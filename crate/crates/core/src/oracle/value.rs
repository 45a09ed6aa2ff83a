//! Hereditarily finite values and trace encoding of functions.

use std::collections::BTreeSet;
use std::fmt;

use super::OracleError;

/// A hereditarily finite set-theoretic value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetValue {
    Tup(Vec<SetValue>),
    Fin(BTreeSet<SetValue>),
    /// Constructor tuple `⟨k; v̄⟩`.
    Tag(u64, Vec<SetValue>),
    /// Graph of a function on a finite domain.
    Graph(BTreeSet<(SetValue, SetValue)>),
}

impl SetValue {
    pub fn empty() -> Self {
        SetValue::Fin(BTreeSet::new())
    }

    /// `{∅}`.
    pub fn one() -> Self {
        SetValue::fin([SetValue::empty()])
    }

    /// Von Neumann numeral: `n = {0, …, n-1}`.
    pub fn nat(n: usize) -> Self {
        let mut s = BTreeSet::new();
        for _ in 0..n {
            let next = SetValue::Fin(s.clone());
            s.insert(next);
        }
        SetValue::Fin(s)
    }

    pub fn fin(items: impl IntoIterator<Item = SetValue>) -> Self {
        SetValue::Fin(items.into_iter().collect())
    }

    pub fn pair(a: SetValue, b: SetValue) -> Self {
        SetValue::Tup(vec![a, b])
    }

    pub fn as_fin(&self) -> Option<&BTreeSet<SetValue>> {
        match self {
            SetValue::Fin(s) => Some(s),
            _ => None,
        }
    }

    /// Looks `x` up in a function graph.
    pub fn graph_apply(&self, x: &SetValue) -> Option<&SetValue> {
        match self {
            SetValue::Graph(g) => g.iter().find(|(a, _)| a == x).map(|(_, b)| b),
            _ => None,
        }
    }

    /// Nesting depth of constructor tags.
    pub fn tag_depth(&self) -> usize {
        match self {
            SetValue::Tag(_, xs) => 1 + xs.iter().map(SetValue::tag_depth).max().unwrap_or(0),
            SetValue::Tup(xs) => xs.iter().map(SetValue::tag_depth).max().unwrap_or(0),
            SetValue::Fin(s) => s.iter().map(SetValue::tag_depth).max().unwrap_or(0),
            SetValue::Graph(g) => g
                .iter()
                .map(|(a, b)| a.tag_depth().max(b.tag_depth()))
                .max()
                .unwrap_or(0),
        }
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: impl Iterator<Item = impl fmt::Display>) -> fmt::Result {
            for (i, x) in xs.enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            SetValue::Fin(s) if s.is_empty() => write!(f, "∅"),
            SetValue::Fin(s) => {
                write!(f, "{{")?;
                list(f, s.iter())?;
                write!(f, "}}")
            }
            SetValue::Tup(xs) => {
                write!(f, "(")?;
                list(f, xs.iter())?;
                write!(f, ")")
            }
            SetValue::Tag(k, xs) => {
                write!(f, "⟨{k}")?;
                if !xs.is_empty() {
                    write!(f, "; ")?;
                    list(f, xs.iter())?;
                }
                write!(f, "⟩")
            }
            SetValue::Graph(g) => {
                write!(f, "[")?;
                list(f, g.iter().map(|(a, b)| format!("{a} ↦ {b}")))?;
                write!(f, "]")
            }
        }
    }
}

/// Trace encoding `⋃_{(x,y)} {x} × y` of a function whose values are sets.
pub fn encode(graph: &[(SetValue, SetValue)]) -> Result<SetValue, OracleError> {
    let mut out = BTreeSet::new();
    for (i, (x, y)) in graph.iter().enumerate() {
        if graph[..i].iter().any(|(x2, y2)| x2 == x && y2 != y) {
            return Err(OracleError::Argument(format!("graph is not functional at {x}")));
        }
        let ys = y
            .as_fin()
            .ok_or_else(|| OracleError::Argument(format!("function value {y} is not a set")))?;
        for z in ys {
            out.insert(SetValue::pair(x.clone(), z.clone()));
        }
    }
    Ok(SetValue::Fin(out))
}

/// `{ y | (x, y) ∈ f }`.
pub fn decode(f: &SetValue, x: &SetValue) -> SetValue {
    let mut out = BTreeSet::new();
    if let SetValue::Fin(s) = f {
        for p in s {
            if let SetValue::Tup(xy) = p {
                if xy.len() == 2 && &xy[0] == x {
                    out.insert(xy[1].clone());
                }
            }
        }
    }
    SetValue::Fin(out)
}

/// Iterated decoding: `decode*(f, [x₁, …, xₙ]) = decode(… decode(f, x₁) …, xₙ)`.
pub fn decode_all(f: &SetValue, args: &[SetValue]) -> SetValue {
    args.iter().fold(f.clone(), |acc, x| decode(&acc, x))
}

/// All choice functions `x ↦ b ∈ B(x)` over the finite domain `dom`, as
/// graphs. `None` if there are more than `limit` of them.
pub fn choice_functions(
    dom: &[SetValue],
    cod: &mut dyn FnMut(&SetValue) -> Result<Vec<SetValue>, OracleError>,
    limit: usize,
) -> Result<Option<Vec<Vec<(SetValue, SetValue)>>>, OracleError> {
    let mut acc: Vec<Vec<(SetValue, SetValue)>> = vec![Vec::new()];
    for x in dom {
        let bs = cod(x)?;
        if acc.len().saturating_mul(bs.len()) > limit {
            return Ok(None);
        }
        acc = acc
            .iter()
            .flat_map(|g| {
                bs.iter().map(move |b| {
                    let mut g = g.clone();
                    g.push((x.clone(), b.clone()));
                    g
                })
            })
            .collect();
    }
    Ok(Some(acc))
}

/// The trace-encoded dependent function space `{ E(f) | f ∈ Π_{x∈A} B(x) }`
/// for families of sets.
pub fn encoded_pi(
    dom: &[SetValue],
    cod: &dyn Fn(&SetValue) -> BTreeSet<SetValue>,
) -> Result<BTreeSet<SetValue>, OracleError> {
    let fns = choice_functions(dom, &mut |x| Ok(cod(x).into_iter().collect()), 1 << 20)?
        .ok_or_else(|| OracleError::Unsupported("function space too large".into()))?;
    fns.iter().map(|g| encode(g)).collect()
}
