//! Group oracles: groups with decidable equality and canonical forms.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::GimageError;
use crate::words::{Letter, Sign, Symbol, Word};

/// A group given by its operations and a canonical byte encoding.
pub trait GroupOracle {
    type Elem: Clone + Debug + PartialEq;

    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn canonical(&self, a: &Self::Elem) -> Vec<u8>;

    /// The element denoted by a single name, if any.
    fn element_named(&self, name: &str) -> Option<Self::Elem>;

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.canonical(a) == self.canonical(b)
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        self.equal(a, &self.identity())
    }

    /// Evaluates an expression: whitespace separated names, each optionally
    /// primed for the inverse. The empty expression is the identity.
    fn parse_element(&self, expr: &str) -> Result<Self::Elem, GimageError> {
        let word = Word::parse(expr).map_err(|e| GimageError::Expression {
            expr: expr.to_string(),
            message: e.to_string(),
        })?;
        let mut acc = self.identity();
        for s in &word {
            let e = self
                .element_named(s.letter.name())
                .ok_or_else(|| GimageError::Expression {
                    expr: expr.to_string(),
                    message: format!("unknown element {:?}", s.letter.name()),
                })?;
            let e = match s.sign {
                Sign::Positive => e,
                Sign::Inverse => self.invert(&e),
            };
            acc = self.multiply(&acc, &e);
        }
        Ok(acc)
    }
}

/// The free group on named generators; elements are freely reduced words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeGroupOracle {
    generators: Vec<Letter>,
}

impl FreeGroupOracle {
    pub fn new(generators: Vec<Letter>) -> Self {
        FreeGroupOracle { generators }
    }

    pub fn generators(&self) -> &[Letter] {
        &self.generators
    }
}

impl GroupOracle for FreeGroupOracle {
    type Elem = Word;

    fn identity(&self) -> Word {
        Word::empty()
    }

    fn multiply(&self, a: &Word, b: &Word) -> Word {
        a.concat(b).free_reduce()
    }

    fn invert(&self, a: &Word) -> Word {
        a.invert()
    }

    fn canonical(&self, a: &Word) -> Vec<u8> {
        a.free_reduce().to_string().into_bytes()
    }

    fn element_named(&self, name: &str) -> Option<Word> {
        self.generators
            .iter()
            .find(|g| g.name() == name)
            .map(|g| Word::from_symbols(vec![g.positive()]))
    }
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct FiniteGroupTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    order: usize,
    table: Vec<Vec<usize>>,
    names: Vec<String>,
}

impl TryFrom<TableJson> for FiniteGroupTable {
    type Error = GimageError;

    fn try_from(j: TableJson) -> Result<Self, GimageError> {
        if j.table.len() != j.order || j.names.len() != j.order {
            return Err(GimageError::BadTable(format!(
                "order {} but {} rows and {} names",
                j.order,
                j.table.len(),
                j.names.len()
            )));
        }
        FiniteGroupTable::new(j.names, j.table)
    }
}

impl From<FiniteGroupTable> for TableJson {
    fn from(t: FiniteGroupTable) -> Self {
        TableJson {
            order: t.order(),
            table: t.table,
            names: t.names,
        }
    }
}

impl FiniteGroupTable {
    /// Validates a table: Latin square, two-sided identity, associativity,
    /// and distinct names usable as generator tokens.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GimageError> {
        let n = table.len();
        let bad = |m: String| Err(GimageError::BadTable(m));
        if n == 0 {
            return bad("empty group".into());
        }
        if names.len() != n {
            return bad(format!("{} names for order {n}", names.len()));
        }
        for name in &names {
            if Letter::new(name).is_err() {
                return bad(format!("unusable element name {name:?}"));
            }
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return bad("element names are not distinct".into());
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n || row.iter().any(|x| *x >= n) {
                return bad(format!("row {i} is not a row of indices below {n}"));
            }
            let mut seen = vec![false; n];
            for x in row {
                if std::mem::replace(&mut seen[*x], true) {
                    return bad(format!("row {i} repeats an entry"));
                }
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if std::mem::replace(&mut seen[row[j]], true) {
                    return bad(format!("column {j} repeats an entry"));
                }
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        else {
            return bad("no two-sided identity".into());
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| table[a][b] == identity)
                    .expect("Latin rows contain the identity")
            })
            .collect();
        Ok(FiniteGroupTable {
            names,
            table,
            identity,
            inverses,
        })
    }

    /// The cyclic group of order `n` with elements `e, g, g2, …`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{i}"),
            })
            .collect();
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        FiniteGroupTable::new(names, table).expect("cyclic tables are valid")
    }

    /// The symmetric group on `n` points. Elements are permutations in
    /// lexicographic order of their one-line notation, named `p` followed by
    /// that notation (`p102`), with the identity named `e`; the product
    /// `a b` applies `a` first.
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            perms.push(current.clone());
            // next permutation in lexicographic order
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n)
                .rev()
                .find(|&j| current[j] > current[i - 1])
                .expect("pivot exists");
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        let index = |p: &Vec<usize>| {
            perms
                .iter()
                .position(|q| q == p)
                .expect("closed under product")
        };
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index(&(0..n).map(|x| b[a[x]]).collect()))
                    .collect()
            })
            .collect();
        let names = perms
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if i == 0 {
                    "e".to_string()
                } else {
                    format!("p{}", p.iter().map(|x| x.to_string()).collect::<String>())
                }
            })
            .collect();
        FiniteGroupTable::new(names, table).expect("symmetric tables are valid")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Non-identity elements in index order.
    pub fn nonidentity(&self) -> Vec<usize> {
        (0..self.order()).filter(|a| *a != self.identity).collect()
    }

    /// Product of a sequence of elements.
    pub fn evaluate(&self, elems: &[usize]) -> usize {
        elems
            .iter()
            .fold(self.identity, |acc, x| self.table[acc][*x])
    }
}

/// Oracle over a shared multiplication table; elements are indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupOracle {
    table: Arc<FiniteGroupTable>,
}

impl FiniteGroupOracle {
    pub fn new(table: FiniteGroupTable) -> Self {
        FiniteGroupOracle {
            table: Arc::new(table),
        }
    }

    pub fn table(&self) -> &FiniteGroupTable {
        &self.table
    }
}

impl GroupOracle for FiniteGroupOracle {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.table.identity()
    }

    fn multiply(&self, a: &usize, b: &usize) -> usize {
        self.table.multiply(*a, *b)
    }

    fn invert(&self, a: &usize) -> usize {
        self.table.inverse(*a)
    }

    fn canonical(&self, a: &usize) -> Vec<u8> {
        a.to_string().into_bytes()
    }

    fn element_named(&self, name: &str) -> Option<usize> {
        self.table.index_of(name)
    }
}

/// A syllable of a free product normal form.
#[derive(Debug, Clone, PartialEq)]
pub enum Syllable<A, B> {
    Left(A),
    Right(B),
}

/// The free product of two oracles. Elements are alternating sequences of
/// nontrivial syllables; the empty sequence is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeProductOracle<L, R> {
    pub left: L,
    pub right: R,
}

impl<L: GroupOracle, R: GroupOracle> FreeProductOracle<L, R> {
    pub fn new(left: L, right: R) -> Self {
        FreeProductOracle { left, right }
    }

    /// Appends one syllable to a normal form, merging and cancelling.
    fn push(&self, out: &mut Vec<Syllable<L::Elem, R::Elem>>, s: Syllable<L::Elem, R::Elem>) {
        let merged = match (out.last(), &s) {
            (Some(Syllable::Left(a)), Syllable::Left(b)) => {
                Some(Syllable::Left(self.left.multiply(a, b)))
            }
            (Some(Syllable::Right(a)), Syllable::Right(b)) => {
                Some(Syllable::Right(self.right.multiply(a, b)))
            }
            _ => None,
        };
        match merged {
            Some(m) => {
                out.pop();
                if !self.trivial(&m) {
                    out.push(m);
                }
            }
            None => {
                if !self.trivial(&s) {
                    out.push(s);
                }
            }
        }
    }

    fn trivial(&self, s: &Syllable<L::Elem, R::Elem>) -> bool {
        match s {
            Syllable::Left(a) => self.left.is_identity(a),
            Syllable::Right(b) => self.right.is_identity(b),
        }
    }
}

impl<L: GroupOracle, R: GroupOracle> GroupOracle for FreeProductOracle<L, R> {
    type Elem = Vec<Syllable<L::Elem, R::Elem>>;

    fn identity(&self) -> Self::Elem {
        Vec::new()
    }

    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = a.clone();
        for s in b {
            self.push(&mut out, s.clone());
        }
        out
    }

    fn invert(&self, a: &Self::Elem) -> Self::Elem {
        a.iter()
            .rev()
            .map(|s| match s {
                Syllable::Left(x) => Syllable::Left(self.left.invert(x)),
                Syllable::Right(y) => Syllable::Right(self.right.invert(y)),
            })
            .collect()
    }

    fn canonical(&self, a: &Self::Elem) -> Vec<u8> {
        let mut out = Vec::new();
        for s in a {
            let (tag, bytes) = match s {
                Syllable::Left(x) => (b'L', self.left.canonical(x)),
                Syllable::Right(y) => (b'R', self.right.canonical(y)),
            };
            out.push(tag);
            out.extend_from_slice(bytes.len().to_string().as_bytes());
            out.push(b':');
            out.extend_from_slice(&bytes);
        }
        out
    }

    fn element_named(&self, name: &str) -> Option<Self::Elem> {
        if let Some(x) = self.left.element_named(name) {
            let mut out = Vec::new();
            self.push(&mut out, Syllable::Left(x));
            return Some(out);
        }
        self.right.element_named(name).map(|y| {
            let mut out = Vec::new();
            self.push(&mut out, Syllable::Right(y));
            out
        })
    }
}

/// Serializable description of an oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    Free {
        generators: Vec<String>,
    },
    Finite {
        table: FiniteGroupTable,
    },
    FreeProduct {
        left: Box<OracleSpec>,
        right: Box<OracleSpec>,
    },
}

/// Runtime-selected oracle built from an [`OracleSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DynOracle {
    Free(FreeGroupOracle),
    Finite(FiniteGroupOracle),
    FreeProduct(Box<FreeProductOracle<DynOracle, DynOracle>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynElem {
    Free(Word),
    Finite(usize),
    Product(Vec<Syllable<DynElem, DynElem>>),
}

impl DynOracle {
    pub fn from_spec(spec: &OracleSpec) -> Result<Self, GimageError> {
        Ok(match spec {
            OracleSpec::Free { generators } => DynOracle::Free(FreeGroupOracle::new(
                generators
                    .iter()
                    .map(|g| Letter::new(g).map_err(|e| GimageError::BadTable(e.to_string())))
                    .collect::<Result<_, _>>()?,
            )),
            OracleSpec::Finite { table } => {
                DynOracle::Finite(FiniteGroupOracle::new(table.clone()))
            }
            OracleSpec::FreeProduct { left, right } => DynOracle::FreeProduct(Box::new(
                FreeProductOracle::new(DynOracle::from_spec(left)?, DynOracle::from_spec(right)?),
            )),
        })
    }

    pub fn to_spec(&self) -> OracleSpec {
        match self {
            DynOracle::Free(f) => OracleSpec::Free {
                generators: f
                    .generators()
                    .iter()
                    .map(|g| g.name().to_string())
                    .collect(),
            },
            DynOracle::Finite(f) => OracleSpec::Finite {
                table: f.table().clone(),
            },
            DynOracle::FreeProduct(p) => OracleSpec::FreeProduct {
                left: Box::new(p.left.to_spec()),
                right: Box::new(p.right.to_spec()),
            },
        }
    }

    /// Renders an element back into expression syntax.
    pub fn render(&self, e: &DynElem) -> String {
        match (self, e) {
            (DynOracle::Free(_), DynElem::Free(w)) => w.to_string(),
            (DynOracle::Finite(f), DynElem::Finite(i)) => {
                if *i == f.table().identity() {
                    String::new()
                } else {
                    f.table().name(*i).to_string()
                }
            }
            (DynOracle::FreeProduct(p), DynElem::Product(syl)) => syl
                .iter()
                .map(|s| match s {
                    Syllable::Left(x) => p.left.render(x),
                    Syllable::Right(y) => p.right.render(y),
                })
                .collect::<Vec<_>>()
                .join(" "),
            _ => panic!("element does not belong to this oracle"),
        }
    }
}

impl GroupOracle for DynOracle {
    type Elem = DynElem;

    fn identity(&self) -> DynElem {
        match self {
            DynOracle::Free(f) => DynElem::Free(f.identity()),
            DynOracle::Finite(f) => DynElem::Finite(f.identity()),
            DynOracle::FreeProduct(p) => DynElem::Product(p.identity()),
        }
    }

    fn multiply(&self, a: &DynElem, b: &DynElem) -> DynElem {
        match (self, a, b) {
            (DynOracle::Free(f), DynElem::Free(x), DynElem::Free(y)) => {
                DynElem::Free(f.multiply(x, y))
            }
            (DynOracle::Finite(f), DynElem::Finite(x), DynElem::Finite(y)) => {
                DynElem::Finite(f.multiply(x, y))
            }
            (DynOracle::FreeProduct(p), DynElem::Product(x), DynElem::Product(y)) => {
                DynElem::Product(p.multiply(x, y))
            }
            _ => panic!("elements do not belong to this oracle"),
        }
    }

    fn invert(&self, a: &DynElem) -> DynElem {
        match (self, a) {
            (DynOracle::Free(f), DynElem::Free(x)) => DynElem::Free(f.invert(x)),
            (DynOracle::Finite(f), DynElem::Finite(x)) => DynElem::Finite(f.invert(x)),
            (DynOracle::FreeProduct(p), DynElem::Product(x)) => DynElem::Product(p.invert(x)),
            _ => panic!("element does not belong to this oracle"),
        }
    }

    fn canonical(&self, a: &DynElem) -> Vec<u8> {
        match (self, a) {
            (DynOracle::Free(f), DynElem::Free(x)) => f.canonical(x),
            (DynOracle::Finite(f), DynElem::Finite(x)) => f.canonical(x),
            (DynOracle::FreeProduct(p), DynElem::Product(x)) => p.canonical(x),
            _ => panic!("element does not belong to this oracle"),
        }
    }

    fn element_named(&self, name: &str) -> Option<DynElem> {
        match self {
            DynOracle::Free(f) => f.element_named(name).map(DynElem::Free),
            DynOracle::Finite(f) => f.element_named(name).map(DynElem::Finite),
            DynOracle::FreeProduct(p) => p.element_named(name).map(DynElem::Product),
        }
    }
}

/// Convenience: the word `g` as a free group element.
pub fn free_letter(g: &Letter) -> Word {
    Word::from_symbols(vec![Symbol::new(g.clone(), Sign::Positive)])
}
