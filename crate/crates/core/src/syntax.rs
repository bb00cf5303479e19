//! Formulas of propositional Lax Logic: the AST, concrete syntax and the
//! numeric measures (degree, weight, atom set) used by the calculi.
//!
//! The ascii grammar, loosest binding first:
//!
//! ```text
//! imp   := or ( "->" imp )?          right associative
//! or    := and ( "|" and )*          left associative
//! and   := unary ( "&" unary )*      left associative
//! unary := "O" unary | "~" unary | atom | "false" | "true" | "(" imp ")"
//! ```
//!
//! `~a` is sugar for `a -> false` and `true` for `false -> false`, so the
//! AST only has the six constructors below. A word starting with an upper
//! case `O` is read as the circle operator applied to the rest of the word,
//! which makes `Op` and `O p` the same formula; atom names therefore never
//! start with `O`. The unicode symbols `⊥ ⊤ ∧ ∨ → ○ ¬` are accepted as
//! well.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Name = Arc<str>;

/// A formula. Children are reference counted so clones are cheap and
/// formulas can be shared freely between threads.
///
/// The derived `Ord` is the fixed syntactic order used to canonicalise
/// multisets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "FormulaJson", from = "FormulaJson")]
pub enum Formula {
    Bot,
    Atom(Name),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Circle(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn imp(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Imp(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn circle(body: Formula) -> Formula {
        Formula::Circle(Arc::new(body))
    }

    /// `false -> false`
    pub fn top() -> Formula {
        Formula::imp(Formula::Bot, Formula::Bot)
    }

    /// `f -> false`
    pub fn neg(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bot)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Imp(a, b) if **a == Formula::Bot && **b == Formula::Bot)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Formula::Circle(_))
    }

    /// d(⊥)=0, d(p)=1, d(○φ)=d(φ)+1, d(φ∘ψ)=d(φ)+d(ψ)+1.
    pub fn degree(&self) -> usize {
        match self {
            Formula::Bot => 0,
            Formula::Atom(_) => 1,
            Formula::Circle(a) => a.degree() + 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.degree() + b.degree() + 1
            }
        }
    }

    /// Dyckhoff weight: conjunction costs 2, disjunction, implication and
    /// the circle cost 1, atoms and ⊥ weigh 1.
    pub fn weight(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(_) => 1,
            Formula::Circle(a) => a.weight() + 1,
            Formula::And(a, b) => a.weight() + b.weight() + 2,
            Formula::Or(a, b) | Formula::Imp(a, b) => a.weight() + b.weight() + 1,
        }
    }

    /// Nesting height of connectives; atoms and ⊥ have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(_) => 0,
            Formula::Circle(a) => a.depth() + 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.depth().max(b.depth()) + 1
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(_) => 1,
            Formula::Circle(a) => a.size() + 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.size() + b.size() + 1,
        }
    }

    pub fn atoms(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(n) => {
                out.insert(n.clone());
            }
            Formula::Circle(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn contains_atom(&self, p: &str) -> bool {
        match self {
            Formula::Bot => false,
            Formula::Atom(n) => &**n == p,
            Formula::Circle(a) => a.contains_atom(p),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_atom(p) || b.contains_atom(p)
            }
        }
    }

    /// All subformula occurrences, pre-order, including `self`.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f.clone());
            match f {
                Formula::Bot | Formula::Atom(_) => {}
                Formula::Circle(a) => stack.push(a),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    pub fn render(&self, notation: Notation) -> String {
        let mut out = String::new();
        write_formula(&mut out, self, notation);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Notation::Ascii))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Notation::Unicode))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notation {
    Ascii,
    Unicode,
    Latex,
}

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_PREFIX: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        _ if f.is_top() => PREC_PREFIX,
        Formula::Bot | Formula::Atom(_) | Formula::Circle(_) => PREC_PREFIX,
        Formula::Imp(_, b) if **b == Formula::Bot => PREC_PREFIX,
        Formula::And(..) => PREC_AND,
        Formula::Or(..) => PREC_OR,
        Formula::Imp(..) => PREC_IMP,
    }
}

struct Symbols {
    bot: &'static str,
    top: &'static str,
    and: &'static str,
    or: &'static str,
    imp: &'static str,
    circle: &'static str,
    neg: &'static str,
}

fn symbols(notation: Notation) -> Symbols {
    match notation {
        Notation::Ascii => Symbols {
            bot: "false",
            top: "true",
            and: " & ",
            or: " | ",
            imp: " -> ",
            circle: "O ",
            neg: "~",
        },
        Notation::Unicode => Symbols {
            bot: "⊥",
            top: "⊤",
            and: " ∧ ",
            or: " ∨ ",
            imp: " → ",
            circle: "○",
            neg: "¬",
        },
        Notation::Latex => Symbols {
            bot: "\\bot",
            top: "\\top",
            and: " \\land ",
            or: " \\lor ",
            imp: " \\to ",
            circle: "\\bigcirc",
            neg: "\\neg",
        },
    }
}

fn write_formula(out: &mut String, f: &Formula, notation: Notation) {
    let sym = symbols(notation);
    let wrap = |out: &mut String, g: &Formula, parens: bool| {
        if parens {
            out.push('(');
            write_formula(out, g, notation);
            out.push(')');
        } else {
            write_formula(out, g, notation);
        }
    };
    match f {
        _ if f.is_top() => out.push_str(sym.top),
        Formula::Bot => out.push_str(sym.bot),
        Formula::Atom(n) => out.push_str(n),
        Formula::Circle(a) => {
            out.push_str(sym.circle);
            if notation == Notation::Latex && starts_with_letter(a, notation) {
                out.push(' ');
            }
            wrap(out, a, precedence(a) < PREC_PREFIX);
        }
        Formula::Imp(a, b) if **b == Formula::Bot => {
            out.push_str(sym.neg);
            if notation == Notation::Latex && starts_with_letter(a, notation) {
                out.push(' ');
            }
            wrap(out, a, precedence(a) < PREC_PREFIX);
        }
        Formula::And(a, b) => {
            wrap(out, a, precedence(a) < PREC_AND);
            out.push_str(sym.and);
            wrap(out, b, precedence(b) <= PREC_AND);
        }
        Formula::Or(a, b) => {
            wrap(out, a, precedence(a) < PREC_OR);
            out.push_str(sym.or);
            wrap(out, b, precedence(b) <= PREC_OR);
        }
        Formula::Imp(a, b) => {
            wrap(out, a, precedence(a) <= PREC_IMP);
            out.push_str(sym.imp);
            wrap(out, b, precedence(b) < PREC_IMP);
        }
    }
}

/// Whether the rendering of `f` starts with a plain letter, in which case a
/// preceding LaTeX command needs a separating space.
fn starts_with_letter(f: &Formula, notation: Notation) -> bool {
    let mut s = String::new();
    write_formula(&mut s, f, notation);
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    False,
    True,
    Circle,
    Neg,
    And,
    Or,
    Arrow,
    Turnstile,
    Comma,
    LParen,
    RParen,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                tokens.push((pos, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((pos, Token::RParen));
                i += 1;
            }
            ',' => {
                tokens.push((pos, Token::Comma));
                i += 1;
            }
            '&' | '∧' => {
                tokens.push((pos, Token::And));
                i += 1;
            }
            '|' | '∨' => {
                tokens.push((pos, Token::Or));
                i += 1;
            }
            '~' | '¬' => {
                tokens.push((pos, Token::Neg));
                i += 1;
            }
            '○' => {
                tokens.push((pos, Token::Circle));
                i += 1;
            }
            '⊥' => {
                tokens.push((pos, Token::False));
                i += 1;
            }
            '⊤' => {
                tokens.push((pos, Token::True));
                i += 1;
            }
            '→' => {
                tokens.push((pos, Token::Arrow));
                i += 1;
            }
            '⇒' => {
                tokens.push((pos, Token::Turnstile));
                i += 1;
            }
            '-' if chars.get(i + 1).map(|c| c.1) == Some('>') => {
                tokens.push((pos, Token::Arrow));
                i += 2;
            }
            '=' if chars.get(i + 1).map(|c| c.1) == Some('>') => {
                tokens.push((pos, Token::Turnstile));
                i += 2;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let mut word: &str = &text[pos..chars.get(i).map_or(text.len(), |c| c.0)];
                let mut offset = chars[start].0;
                while let Some(rest) = word.strip_prefix('O') {
                    tokens.push((offset, Token::Circle));
                    word = rest;
                    offset += 1;
                }
                if word.is_empty() {
                    continue;
                }
                if !word.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(Error::Syntax {
                        pos: offset,
                        msg: format!("identifier may not start with {:?}", &word[..1]),
                    });
                }
                let tok = match word {
                    "false" => Token::False,
                    "true" => Token::True,
                    _ => Token::Ident(word.to_string()),
                };
                tokens.push((offset, tok));
            }
            other => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(tokens)
}

pub(crate) struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            end: text.len(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    pub(crate) fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.error(format!("unexpected token {t:?}")),
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Token::Circle) => {
                self.bump();
                Ok(Formula::circle(self.unary()?))
            }
            Some(Token::Neg) => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Some(Token::False) => {
                self.bump();
                Ok(Formula::Bot)
            }
            Some(Token::True) => {
                self.bump();
                Ok(Formula::top())
            }
            Some(Token::Ident(name)) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Some(Token::LParen) => {
                self.bump();
                let f = self.formula()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.error("expected ')'");
                }
                self.bump();
                Ok(f)
            }
            Some(t) => self.error(format!("expected a formula, found {t:?}")),
            None => self.error("expected a formula, found end of input"),
        }
    }
}

/// Parses a formula in the ascii (or unicode) concrete syntax.
pub fn parse(text: &str) -> Result<Formula> {
    let mut parser = Parser::new(text)?;
    let f = parser.formula()?;
    parser.expect_end()?;
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum FormulaJson {
    Bot,
    Atom { name: String },
    And { lhs: Box<FormulaJson>, rhs: Box<FormulaJson> },
    Or { lhs: Box<FormulaJson>, rhs: Box<FormulaJson> },
    Imp { lhs: Box<FormulaJson>, rhs: Box<FormulaJson> },
    Circle { body: Box<FormulaJson> },
}

impl From<Formula> for FormulaJson {
    fn from(f: Formula) -> Self {
        let conv = |g: &Arc<Formula>| Box::new(FormulaJson::from((**g).clone()));
        match &f {
            Formula::Bot => FormulaJson::Bot,
            Formula::Atom(n) => FormulaJson::Atom { name: n.to_string() },
            Formula::And(a, b) => FormulaJson::And { lhs: conv(a), rhs: conv(b) },
            Formula::Or(a, b) => FormulaJson::Or { lhs: conv(a), rhs: conv(b) },
            Formula::Imp(a, b) => FormulaJson::Imp { lhs: conv(a), rhs: conv(b) },
            Formula::Circle(a) => FormulaJson::Circle { body: conv(a) },
        }
    }
}

impl From<FormulaJson> for Formula {
    fn from(j: FormulaJson) -> Self {
        match j {
            FormulaJson::Bot => Formula::Bot,
            FormulaJson::Atom { name } => Formula::atom(&name),
            FormulaJson::And { lhs, rhs } => Formula::and((*lhs).into(), (*rhs).into()),
            FormulaJson::Or { lhs, rhs } => Formula::or((*lhs).into(), (*rhs).into()),
            FormulaJson::Imp { lhs, rhs } => Formula::imp((*lhs).into(), (*rhs).into()),
            FormulaJson::Circle { body } => Formula::circle((*body).into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn parses_grammar_examples() {
        assert_eq!(parse("Op -> p").unwrap(), Formula::imp(Formula::circle(p()), p()));
        assert_eq!(
            parse("O O p -> O p").unwrap(),
            Formula::imp(Formula::circle(Formula::circle(p())), Formula::circle(p()))
        );
        assert_eq!(
            parse("a & b | c").unwrap(),
            Formula::or(Formula::and(Formula::atom("a"), Formula::atom("b")), Formula::atom("c"))
        );
        assert_eq!(parse("~a").unwrap(), Formula::imp(Formula::atom("a"), Formula::Bot));
        assert_eq!(parse("true").unwrap(), Formula::imp(Formula::Bot, Formula::Bot));
        assert_eq!(parse("OOp").unwrap(), parse("O O p").unwrap());
    }

    #[test]
    fn associativity() {
        assert_eq!(parse("p -> q -> p").unwrap(), Formula::imp(p(), Formula::imp(q(), p())));
        assert_eq!(
            parse("p & q & p").unwrap(),
            Formula::and(Formula::and(p(), q()), p())
        );
        assert_eq!(parse("p | q | p").unwrap(), Formula::or(Formula::or(p(), q()), p()));
    }

    #[test]
    fn unicode_input() {
        assert_eq!(parse("○p → p ∧ ⊤").unwrap(), parse("O p -> p & true").unwrap());
        assert_eq!(parse("¬⊥").unwrap(), parse("~false").unwrap());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("p & ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse("(p | q") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse("p $ q").is_err());
        assert!(parse("p q").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn measures() {
        assert_eq!(Formula::Bot.degree(), 0);
        assert_eq!(Formula::circle(p()).degree(), 2);
        assert_eq!(Formula::and(p(), q()).degree(), 3);
        assert_eq!(Formula::and(p(), q()).weight(), 4);
        assert_eq!(Formula::imp(p(), q()).weight(), 3);
        assert_eq!(Formula::circle(Formula::Bot).weight(), 2);
    }

    #[test]
    fn atom_sets() {
        let names = |f: &Formula| f.atoms().iter().map(|n| n.to_string()).collect::<Vec<_>>();
        assert_eq!(names(&parse("p & (q -> false)").unwrap()), ["p", "q"]);
        assert!(names(&Formula::Bot).is_empty());
        assert_eq!(names(&parse("O p | p").unwrap()), ["p"]);
    }

    #[test]
    fn rendering() {
        let f = Formula::imp(Formula::circle(p()), p());
        assert_eq!(f.render(Notation::Ascii), "O p -> p");
        let g = Formula::and(p(), Formula::or(q(), Formula::atom("r")));
        assert_eq!(g.render(Notation::Ascii), "p & (q | r)");
        assert_eq!(Formula::circle(Formula::Bot).render(Notation::Latex), "\\bigcirc\\bot");
        assert_eq!(Formula::circle(p()).render(Notation::Latex), "\\bigcirc p");
        assert_eq!(f.render(Notation::Unicode), "○p → p");
        assert_eq!(parse("(p -> q) -> p").unwrap().to_string(), "(p -> q) -> p");
        assert_eq!(parse("~(p & q)").unwrap().to_string(), "~(p & q)");
        assert_eq!(parse("O (p -> q)").unwrap().to_string(), "O (p -> q)");
    }

    #[test]
    fn json_shape() {
        let f = parse("O p -> false").unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["op"], "imp");
        assert_eq!(v["lhs"]["op"], "circle");
        assert_eq!(v["lhs"]["body"]["name"], "p");
        assert_eq!(v["rhs"]["op"], "bot");
        let back: Formula = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
