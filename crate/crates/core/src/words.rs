//! Alphabets, involutive words and special inverse monoid presentations.
//!
//! Words are sequences of signed generator occurrences. The text format uses a
//! trailing apostrophe for the inverse of a generator (`c'` is `c⁻¹`), and
//! tokens are separated by whitespace or commas, so generator names may span
//! several characters (`x_a`, `d_3_2`).

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Characters that may not appear in a generator name.
const RESERVED: &[char] = &['\'', ',', ';', ':', '='];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared generator {0:?}")]
    Undeclared(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("relator {0} is empty")]
    EmptyRelator(usize),
}

/// A generator name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(Arc<str>);

impl Letter {
    pub fn new(name: &str) -> Result<Self, WordError> {
        if name.is_empty()
            || name
                .chars()
                .any(|c| c.is_whitespace() || RESERVED.contains(&c))
        {
            return Err(WordError::InvalidName(name.to_string()));
        }
        Ok(Letter(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn positive(&self) -> Symbol {
        Symbol::new(self.clone(), Sign::Positive)
    }

    pub fn inverse(&self) -> Symbol {
        Symbol::new(self.clone(), Sign::Inverse)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Exponent of a letter occurrence. `Inverse` orders before `Positive`, so
/// label order is lexicographic on (name, exponent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Inverse,
    Positive,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Inverse => Sign::Positive,
            Sign::Positive => Sign::Inverse,
        }
    }

    pub fn exponent(self) -> i8 {
        match self {
            Sign::Inverse => -1,
            Sign::Positive => 1,
        }
    }
}

/// A signed occurrence of a generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub letter: Letter,
    pub sign: Sign,
}

impl Symbol {
    pub fn new(letter: Letter, sign: Sign) -> Self {
        Symbol { letter, sign }
    }

    pub fn inverse(&self) -> Symbol {
        Symbol::new(self.letter.clone(), self.sign.flip())
    }

    pub fn is_inverse_of(&self, other: &Symbol) -> bool {
        self.letter == other.letter && self.sign != other.sign
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Positive => write!(f, "{}", self.letter),
            Sign::Inverse => write!(f, "{}'", self.letter),
        }
    }
}

/// A finite word over an involutive alphabet.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// Parses whitespace/comma separated tokens, each optionally primed.
    /// Generators are not checked against any alphabet.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let mut symbols = Vec::new();
        for token in text.split(|c: char| c.is_whitespace() || c == ',') {
            if token.is_empty() {
                continue;
            }
            symbols.push(parse_token(token).map_err(|msg| WordError::Syntax {
                line: 1,
                column: column_of(text, token),
                message: msg,
            })?);
        }
        Ok(Word(symbols))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(Symbol::inverse).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.0.clone();
        symbols.extend_from_slice(&other.0);
        Word(symbols)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    /// Deletes adjacent `x x⁻¹` pairs until none remain.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Symbol> = Vec::with_capacity(self.0.len());
        for s in &self.0 {
            if out.last().is_some_and(|last| last.is_inverse_of(s)) {
                out.pop();
            } else {
                out.push(s.clone());
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].is_inverse_of(&w[1]))
    }

    /// Distinct letters in order of first occurrence.
    pub fn letters(&self) -> Vec<Letter> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for s in &self.0 {
            if seen.insert(s.letter.clone()) {
                out.push(s.letter.clone());
            }
        }
        out
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.to_string())
    }
}

fn parse_token(token: &str) -> Result<Symbol, String> {
    let (name, sign) = match token.strip_suffix('\'') {
        Some(stem) => (stem, Sign::Inverse),
        None => (token, Sign::Positive),
    };
    let letter = Letter::new(name).map_err(|_| format!("invalid token {token:?}"))?;
    Ok(Symbol::new(letter, sign))
}

fn column_of(haystack: &str, needle: &str) -> usize {
    let offset = needle.as_ptr() as usize - haystack.as_ptr() as usize;
    haystack[..offset].chars().count() + 1
}

/// A special inverse monoid presentation `⟨A | r = 1, …⟩`.
///
/// Relators are kept exactly as given; a relator such as `c c'` is not
/// reduced away because it forces a `c`-edge at every vertex of every
/// Schützenberger graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: Vec<Letter>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<Letter>, relators: Vec<Word>) -> Result<Self, WordError> {
        let mut declared = HashSet::new();
        for g in &generators {
            if !declared.insert(g.clone()) {
                return Err(WordError::DuplicateGenerator(g.name().to_string()));
            }
        }
        for (i, r) in relators.iter().enumerate() {
            if r.is_empty() {
                return Err(WordError::EmptyRelator(i));
            }
            if let Some(s) = r.iter().find(|s| !declared.contains(&s.letter)) {
                return Err(WordError::Undeclared(s.letter.name().to_string()));
            }
        }
        Ok(Presentation {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> &[Letter] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn has_generator(&self, l: &Letter) -> bool {
        self.generators.contains(l)
    }

    pub fn generator(&self, name: &str) -> Option<&Letter> {
        self.generators.iter().find(|g| g.name() == name)
    }

    /// Returns the first letter of `w` that is not a generator.
    pub fn check_word(&self, w: &Word) -> Result<(), WordError> {
        match w.iter().find(|s| !self.has_generator(&s.letter)) {
            Some(s) => Err(WordError::Undeclared(s.letter.name().to_string())),
            None => Ok(()),
        }
    }

    /// Parses a word and checks it against the generators.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let w = Word::parse(text)?;
        self.check_word(&w)?;
        Ok(w)
    }

    /// Parses the text format `gens: <tok>+ ; rels: <word> (, <word>)*`.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        parse_presentation(text)
    }

    /// Strict nonempty prefixes of the relators, deduplicated as literal
    /// words, in order of first occurrence.
    pub fn proper_prefixes(&self) -> Vec<Word> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in &self.relators {
            for len in 1..r.len() {
                let p = r.prefix(len);
                if seen.insert(p.clone()) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Strict nonempty suffixes of the relators (generators of the left units).
    pub fn proper_suffixes(&self) -> Vec<Word> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in &self.relators {
            for start in 1..r.len() {
                let s = r.suffix_from(start);
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("gens:")?;
        for g in &self.generators {
            write!(f, " {g}")?;
        }
        f.write_str(" ; rels:")?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation({:?})", self.to_string())
    }
}

/// Character cursor tracking line and column for error messages.
struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_space(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> WordError {
        WordError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<(), WordError> {
        self.skip_space();
        for expected in keyword.chars() {
            match self.peek() {
                Some(c) if c == expected => {
                    self.bump();
                }
                _ => return Err(self.error(format!("expected `{keyword}`"))),
            }
        }
        Ok(())
    }

    /// Reads a generator name; returns it with its starting position.
    fn name(&mut self) -> Option<(String, usize, usize)> {
        let (line, column) = (self.line, self.column);
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || RESERVED.contains(&c) || c == '#' {
                break;
            }
            name.push(c);
            self.bump();
        }
        (!name.is_empty()).then_some((name, line, column))
    }
}

fn parse_presentation(text: &str) -> Result<Presentation, WordError> {
    let mut cur = Cursor::new(text);
    cur.expect_keyword("gens:")?;
    let mut generators = Vec::new();
    loop {
        cur.skip_space();
        match cur.peek() {
            Some(';') => {
                cur.bump();
                break;
            }
            None => return Err(cur.error("expected `;` after generators")),
            _ => {}
        }
        let Some((name, line, column)) = cur.name() else {
            return Err(cur.error("expected a generator name"));
        };
        let letter = Letter::new(&name).map_err(|_| WordError::Syntax {
            line,
            column,
            message: format!("invalid generator name {name:?}"),
        })?;
        if generators.contains(&letter) {
            return Err(WordError::DuplicateGenerator(name));
        }
        generators.push(letter);
    }
    if generators.is_empty() {
        return Err(cur.error("no generators declared"));
    }
    cur.expect_keyword("rels:")?;

    let mut relators = Vec::new();
    let mut current: Vec<Symbol> = Vec::new();
    let mut seen_unit = false;
    let finish = |current: &mut Vec<Symbol>, relators: &mut Vec<Word>, cur: &Cursor| {
        if current.is_empty() {
            return Err(cur.error("empty relator"));
        }
        relators.push(Word(std::mem::take(current)));
        Ok(())
    };
    loop {
        cur.skip_space();
        match cur.peek() {
            None => {
                if !current.is_empty() || seen_unit {
                    finish(&mut current, &mut relators, &cur)?;
                } else if !relators.is_empty() {
                    return Err(cur.error("trailing comma"));
                }
                break;
            }
            Some(',') => {
                finish(&mut current, &mut relators, &cur)?;
                cur.bump();
                seen_unit = false;
            }
            Some('=') => {
                cur.bump();
                cur.skip_space();
                if cur.peek() != Some('1') {
                    return Err(cur.error("expected `1` after `=`"));
                }
                cur.bump();
                seen_unit = true;
                cur.skip_space();
                if !matches!(cur.peek(), None | Some(',')) {
                    return Err(cur.error("expected `,` after `=1`"));
                }
            }
            Some(c) if RESERVED.contains(&c) => {
                return Err(cur.error(format!("unexpected `{c}`")));
            }
            Some(_) => {
                let (name, line, column) = cur.name().expect("nonempty token");
                let letter = generators
                    .iter()
                    .find(|g| g.name() == name)
                    .cloned()
                    .ok_or_else(|| {
                        let _ = (line, column);
                        WordError::Undeclared(name.clone())
                    })?;
                let sign = if cur.peek() == Some('\'') {
                    cur.bump();
                    Sign::Inverse
                } else {
                    Sign::Positive
                };
                current.push(Symbol::new(letter, sign));
            }
        }
    }
    Presentation::new(generators, relators)
}
