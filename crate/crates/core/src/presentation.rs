//! Finite presentations: a small word DSL, and Todd–Coxeter enumeration over
//! the trivial subgroup to realize the presented group as a regular
//! permutation representation.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! presentation := "<" gens "|" relators? ">"
//! gens         := label ("," label)*
//! relators     := expr ("," expr)*
//! expr         := word ("=" word)?
//! word         := factor ("*" factor)*
//! factor       := atom ("^" int)?
//! atom         := label | "1" | "(" word ")" | "[" word "," word "]"
//! ```
//!
//! `[x,y]` is `x y x^-1 y^-1` and `u = v` is the relator `u v^-1`.

use crate::error::{Error, Result};
use crate::group::FiniteGroup;

pub const DEFAULT_MAX_COSETS: usize = 100_000;

/// Freely reduced word: `(generator index, nonzero exponent)` with adjacent
/// generators distinct.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(Vec<(usize, i64)>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn generator(g: usize) -> Word {
        Word(vec![(g, 1)])
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of letters.
    pub fn len(&self) -> usize {
        self.0.iter().map(|s| s.1.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push((g, e));
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.0 {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::identity();
        for _ in 0..k.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    /// `x y x^-1 y^-1`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    /// Letters as Todd–Coxeter columns: `2g` for `g`, `2g+1` for `g^-1`.
    fn letters(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.0 {
            let col = if e > 0 { 2 * g } else { 2 * g + 1 };
            out.extend(std::iter::repeat_n(col, e.unsigned_abs() as usize));
        }
        out
    }

    /// Evaluates the word in `group`, sending generator `i` to `images[i]`.
    pub fn eval(&self, group: &FiniteGroup, images: &[usize]) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &(g, e)| group.mul(acc, group.pow(images[g], e)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub labels: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(labels: Vec<String>, relators: Vec<Word>) -> Result<Presentation> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Input(format!("duplicate generator label `{l}`")));
            }
        }
        if relators
            .iter()
            .any(|r| r.syllables().iter().any(|&(g, _)| g >= labels.len()))
        {
            return Err(Error::Input("relator references an undeclared generator".into()));
        }
        Ok(Presentation { labels, relators })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Lt,
    Gt,
    Bar,
    Comma,
    Eq,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Minus,
    Int(i64),
    Ident,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize, usize, &'a str)>,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Lexer<'a>> {
        let mut toks = Vec::new();
        let mut line = 1;
        let mut col = 1;
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let (l0, c0) = (line, col);
            if c == '\n' {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                i += 1;
                col += 1;
                continue;
            }
            let single = match c {
                '<' => Some(Tok::Lt),
                '>' => Some(Tok::Gt),
                '|' => Some(Tok::Bar),
                ',' => Some(Tok::Comma),
                '=' => Some(Tok::Eq),
                '*' => Some(Tok::Star),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                '-' => Some(Tok::Minus),
                _ => None,
            };
            if let Some(t) = single {
                toks.push((t, l0, c0, &src[i..i + 1]));
                i += 1;
                col += 1;
                continue;
            }
            let start = i;
            if c.is_ascii_digit() {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let v: i64 = text.parse().map_err(|_| Error::Syntax {
                    line: l0,
                    column: c0,
                    message: format!("integer `{text}` out of range"),
                })?;
                toks.push((Tok::Int(v), l0, c0, text));
            } else if c.is_ascii_alphabetic() || c == '_' {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident, l0, c0, &src[start..i]));
            } else {
                return Err(Error::Syntax {
                    line: l0,
                    column: c0,
                    message: format!("unexpected character `{c}`"),
                });
            }
            col += i - start;
        }
        toks.push((Tok::End, line, col, ""));
        Ok(Lexer { src, toks, pos: 0 })
    }

    fn peek(&self) -> Tok {
        self.toks[self.pos].0
    }

    fn next(&mut self) -> (Tok, usize, usize, &'a str) {
        let t = self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (_, line, column, _) = self.toks[self.pos];
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == t {
            self.next();
            Ok(())
        } else {
            let found = self.toks[self.pos].3;
            let found = if found.is_empty() { "end of input" } else { found };
            self.error(format!("expected {what}, found `{found}`"))
        }
    }
}

struct Parser<'a, 'l> {
    lex: Lexer<'a>,
    labels: &'l [String],
}

impl Parser<'_, '_> {
    fn expr(&mut self) -> Result<Word> {
        let lhs = self.word()?;
        if self.lex.peek() == Tok::Eq {
            self.lex.next();
            let rhs = self.word()?;
            return Ok(lhs.concat(&rhs.inverse()));
        }
        Ok(lhs)
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = self.factor()?;
        while self.lex.peek() == Tok::Star {
            self.lex.next();
            w = w.concat(&self.factor()?);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word> {
        let base = self.atom()?;
        if self.lex.peek() == Tok::Caret {
            self.lex.next();
            let negative = if self.lex.peek() == Tok::Minus {
                self.lex.next();
                true
            } else {
                false
            };
            match self.lex.peek() {
                Tok::Int(k) => {
                    self.lex.next();
                    return Ok(base.pow(if negative { -k } else { k }));
                }
                _ => return self.lex.error("expected an integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Word> {
        match self.lex.peek() {
            Tok::Ident => {
                let (_, line, column, text) = self.lex.next();
                match self.labels.iter().position(|l| l == text) {
                    Some(g) => Ok(Word::generator(g)),
                    None => {
                        let _ = (line, column);
                        Err(Error::UnknownGenerator(text.to_string()))
                    }
                }
            }
            Tok::Int(1) => {
                self.lex.next();
                Ok(Word::identity())
            }
            Tok::LParen => {
                self.lex.next();
                let w = self.word()?;
                self.lex.expect(Tok::RParen, "`)`")?;
                Ok(w)
            }
            Tok::LBracket => {
                self.lex.next();
                let x = self.word()?;
                self.lex.expect(Tok::Comma, "`,` inside commutator")?;
                let y = self.word()?;
                self.lex.expect(Tok::RBracket, "`]`")?;
                Ok(Word::commutator(&x, &y))
            }
            _ => self.lex.error("expected a generator, `(` or `[`"),
        }
    }
}

/// Parses `< gens | relators >`.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut lex = Lexer::new(text)?;
    lex.expect(Tok::Lt, "`<`")?;
    let mut labels: Vec<String> = Vec::new();
    loop {
        if lex.peek() != Tok::Ident {
            return lex.error("expected a generator label");
        }
        let (_, _, _, text) = lex.next();
        if labels.iter().any(|l| l == text) {
            return lex.error(format!("duplicate generator `{text}`"));
        }
        if text == "e" {
            return lex.error("`e` is reserved for the identity");
        }
        labels.push(text.to_string());
        if lex.peek() == Tok::Comma {
            lex.next();
        } else {
            break;
        }
    }
    lex.expect(Tok::Bar, "`|`")?;
    let mut parser = Parser {
        lex,
        labels: &labels,
    };
    let mut relators = Vec::new();
    if parser.lex.peek() != Tok::Gt {
        loop {
            relators.push(parser.expr()?);
            if parser.lex.peek() == Tok::Comma {
                parser.lex.next();
            } else {
                break;
            }
        }
    }
    parser.lex.expect(Tok::Gt, "`>`")?;
    if parser.lex.peek() != Tok::End {
        return parser.lex.error("trailing input after `>`");
    }
    let _ = parser.lex.src;
    Presentation::new(labels, relators)
}

/// Parses a word or equation over the given labels.
pub fn parse_word(text: &str, labels: &[String]) -> Result<Word> {
    let lex = Lexer::new(text)?;
    let mut parser = Parser { lex, labels };
    let w = parser.expr()?;
    if parser.lex.peek() != Tok::End {
        return parser.lex.error("trailing input");
    }
    Ok(w)
}

/// Evaluates a word written in the group's generator labels.
pub fn word_eval(group: &FiniteGroup, text: &str) -> Result<usize> {
    let labels: Vec<String> = group.generators().iter().map(|g| g.label.clone()).collect();
    let images: Vec<usize> = group.generators().iter().map(|g| g.element).collect();
    Ok(parse_word(text, &labels)?.eval(group, &images))
}

const NONE: u32 = u32::MAX;

/// Coset table over the trivial subgroup. Columns are `2g` for generator `g`
/// and `2g+1` for its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    labels: Vec<String>,
    rows: Vec<Vec<u32>>,
    complete: bool,
}

impl CosetTable {
    pub fn num_cosets(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn entry(&self, coset: usize, column: usize) -> Option<usize> {
        let v = self.rows[coset][column];
        (v != NONE).then_some(v as usize)
    }

    /// Follows `word` from `coset`; `None` if it runs into an undefined entry.
    pub fn trace(&self, coset: usize, word: &Word) -> Option<usize> {
        word.letters()
            .into_iter()
            .try_fold(coset, |c, col| self.entry(c, col))
    }
}

struct Enumerator<'a> {
    cols: usize,
    table: Vec<u32>,
    forward: Vec<u32>,
    live: usize,
    relators: &'a [Vec<usize>],
    max_live: usize,
    max_rows: usize,
    queue: Vec<u32>,
}

impl Enumerator<'_> {
    fn rows(&self) -> usize {
        self.forward.len()
    }

    #[inline]
    fn get(&self, c: usize, x: usize) -> u32 {
        self.table[c * self.cols + x]
    }

    #[inline]
    fn set(&mut self, c: usize, x: usize, v: u32) {
        self.table[c * self.cols + x] = v;
    }

    fn alive(&self, c: usize) -> bool {
        self.forward[c] as usize == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.forward[root] as usize != root {
            root = self.forward[root] as usize;
        }
        let mut cur = c;
        while self.forward[cur] as usize != root {
            let next = self.forward[cur] as usize;
            self.forward[cur] = root as u32;
            cur = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.live >= self.max_live || self.rows() >= self.max_rows {
            return Err(Error::Resource(format!(
                "coset enumeration exceeded {} cosets",
                self.max_live
            )));
        }
        let d = self.rows();
        self.forward.push(d as u32);
        self.table.extend(std::iter::repeat_n(NONE, self.cols));
        self.live += 1;
        self.set(c, x, d as u32);
        self.set(d, x ^ 1, c as u32);
        Ok(())
    }

    fn merge(&mut self, k: usize, l: usize) {
        let phi = self.rep(k);
        let psi = self.rep(l);
        if phi != psi {
            let (mu, nu) = if phi < psi { (phi, psi) } else { (psi, phi) };
            self.forward[nu] = mu as u32;
            self.live -= 1;
            self.queue.push(nu as u32);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let gamma = self.queue[i] as usize;
            i += 1;
            for x in 0..self.cols {
                let delta = self.get(gamma, x);
                if delta == NONE {
                    continue;
                }
                let delta = delta as usize;
                self.set(delta, x ^ 1, NONE);
                let mu = self.rep(gamma);
                let nu = self.rep(delta);
                if self.get(mu, x) != NONE {
                    let t = self.get(mu, x) as usize;
                    self.merge(nu, t);
                } else if self.get(nu, x ^ 1) != NONE {
                    let t = self.get(nu, x ^ 1) as usize;
                    self.merge(mu, t);
                } else {
                    self.set(mu, x, nu as u32);
                    self.set(nu, x ^ 1, mu as u32);
                }
            }
        }
    }

    /// Scans `word` from `alpha`, defining cosets when `fill` is set.
    fn scan(&mut self, alpha: usize, word: &[usize], fill: bool) -> Result<()> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = word.len();
        loop {
            while i < j && self.get(f, word[i]) != NONE {
                f = self.get(f, word[i]) as usize;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.get(b, word[j - 1] ^ 1) != NONE {
                b = self.get(b, word[j - 1] ^ 1) as usize;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, word[i], b as u32);
                self.set(b, word[i] ^ 1, f as u32);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    fn lookahead(&mut self) {
        let mut beta = 0;
        while beta < self.rows() {
            if self.alive(beta) {
                for r in 0..self.relators.len() {
                    let rel = &self.relators[r];
                    if self.scan(beta, rel, false).is_err() || !self.alive(beta) {
                        break;
                    }
                }
            }
            beta += 1;
        }
    }

    fn run(&mut self) -> Result<()> {
        let longest = self.relators.iter().map(Vec::len).max().unwrap_or(0);
        let mut alpha = 0;
        while alpha < self.rows() {
            if self.alive(alpha) {
                if self.live + longest + self.cols >= self.max_live {
                    self.lookahead();
                }
                for r in 0..self.relators.len() {
                    let rel = &self.relators[r];
                    self.scan(alpha, rel, true)?;
                    if !self.alive(alpha) {
                        break;
                    }
                }
                if self.alive(alpha) {
                    for x in 0..self.cols {
                        if self.get(alpha, x) == NONE {
                            self.define(alpha, x)?;
                        }
                    }
                }
            }
            alpha += 1;
        }
        Ok(())
    }
}

/// HLT coset enumeration over the trivial subgroup, with a lookahead pass
/// when the table approaches `max_cosets` live rows.
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Result<CosetTable> {
    if max_cosets == 0 {
        return Err(Error::Precondition("max_cosets must be at least 1".into()));
    }
    let cols = 2 * p.labels.len();
    let relators: Vec<Vec<usize>> = p
        .relators
        .iter()
        .map(|r| r.letters())
        .filter(|r| !r.is_empty())
        .collect();
    let mut e = Enumerator {
        cols,
        table: vec![NONE; cols],
        forward: vec![0],
        live: 1,
        relators: &relators,
        max_live: max_cosets,
        max_rows: max_cosets.saturating_mul(8).max(16),
        queue: Vec::new(),
    };
    e.run()?;
    let live: Vec<usize> = (0..e.rows()).filter(|&c| e.alive(c)).collect();
    let mut new_index = vec![usize::MAX; e.rows()];
    for (i, &c) in live.iter().enumerate() {
        new_index[c] = i;
    }
    let mut rows = Vec::with_capacity(live.len());
    for &c in &live {
        let mut row = Vec::with_capacity(cols);
        for x in 0..cols {
            let v = e.get(c, x);
            if v == NONE {
                return Err(Error::Internal("enumeration finished with a hole".into()));
            }
            let r = e.rep(v as usize);
            row.push(new_index[r] as u32);
        }
        rows.push(row);
    }
    Ok(CosetTable {
        labels: p.labels.clone(),
        rows,
        complete: true,
    })
}

/// The group acting regularly on the cosets of a complete table.
pub fn coset_table_to_group(t: &CosetTable) -> Result<FiniteGroup> {
    if !t.complete || t.rows.iter().any(|r| r.contains(&NONE)) {
        return Err(Error::IncompleteTable);
    }
    let right: Vec<Vec<usize>> = t
        .rows
        .iter()
        .map(|row| (0..t.labels.len()).map(|g| row[2 * g] as usize).collect())
        .collect();
    FiniteGroup::from_regular_action(&right, t.labels.clone())
}

/// Parses and enumerates a presentation in one step.
pub fn group_from_presentation(text: &str, max_cosets: usize) -> Result<FiniteGroup> {
    let p = parse_presentation(text)?;
    let table = todd_coxeter(&p, max_cosets)?;
    coset_table_to_group(&table)
}
