use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::layout::{QueryBlock, QueryLayout};
use crate::error::QueryError;
use crate::geometry::{Location, PageDims};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    pub blocks: Vec<QueryBlock>,
}

/// Query document as sent by clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub canvas: PageDims,
    pub layouts: BTreeMap<String, LayoutSpec>,
    /// Boolean expression over layout names; may be omitted when there is
    /// exactly one layout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Atom { layout: String, region: Option<Location> },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn atom(layout: &str, region: Option<Location>) -> Self {
        Expr::Atom {
            layout: layout.to_string(),
            region,
        }
    }

    /// Atoms with their polarity (`true` when under an even number of NOTs).
    pub fn atoms(&self) -> Vec<(&str, Option<Location>, bool)> {
        fn walk<'a>(e: &'a Expr, positive: bool, out: &mut Vec<(&'a str, Option<Location>, bool)>) {
            match e {
                Expr::Atom { layout, region } => out.push((layout, *region, positive)),
                Expr::Not(inner) => walk(inner, !positive, out),
                Expr::And(a, b) | Expr::Or(a, b) => {
                    walk(a, positive, out);
                    walk(b, positive, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, true, &mut out);
        out
    }

    pub fn eval(&self, atom: &mut impl FnMut(&str, Option<Location>) -> bool) -> bool {
        match self {
            Expr::Atom { layout, region } => atom(layout, *region),
            Expr::Not(e) => !e.eval(atom),
            Expr::And(a, b) => a.eval(atom) && b.eval(atom),
            Expr::Or(a, b) => a.eval(atom) || b.eval(atom),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom { layout, region: None } => write!(f, "{layout}"),
            Expr::Atom {
                layout,
                region: Some(r),
            } => write!(f, "({layout},{})", r.as_str()),
            Expr::Not(e) => write!(f, "(NOT {e})"),
            Expr::And(a, b) => write!(f, "({a} AND {b})"),
            Expr::Or(a, b) => write!(f, "({a} OR {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    And,
    Or,
    Not,
    Name(String),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, QueryError> {
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' | ')' | ',' => {
                chars.next();
                out.push((
                    i,
                    match c {
                        '(' => Tok::Open,
                        ')' => Tok::Close,
                        _ => Tok::Comma,
                    },
                ));
            }
            c if c.is_alphanumeric() || c == '_' || c == '-' => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '-' {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "AND" | "and" => Tok::And,
                    "OR" | "or" => Tok::Or,
                    "NOT" | "not" => Tok::Not,
                    _ => Tok::Name(word),
                };
                out.push((i, tok));
            }
            other => {
                return Err(QueryError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, message: impl Into<String>) -> QueryError {
        QueryError::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), QueryError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn or(&mut self) -> Result<Expr, QueryError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, QueryError> {
        let mut lhs = self.not()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Expr::And(Box::new(lhs), Box::new(self.not()?));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, QueryError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, QueryError> {
        match self.peek().cloned() {
            Some(Tok::Name(name)) => {
                self.pos += 1;
                Ok(Expr::atom(&name, None))
            }
            Some(Tok::Open) => {
                // `( NAME , REGION )` is an atom; anything else is grouping
                if let (Some((_, Tok::Name(name))), Some((_, Tok::Comma))) =
                    (self.toks.get(self.pos + 1), self.toks.get(self.pos + 2))
                {
                    let name = name.clone();
                    self.pos += 3;
                    let region = match self.peek() {
                        Some(Tok::Name(r)) => Location::parse(r)
                            .ok_or_else(|| self.error(format!("unknown region `{r}`")))?,
                        _ => return Err(self.error("expected a region")),
                    };
                    self.pos += 1;
                    self.expect(Tok::Close, "`)`")?;
                    return Ok(Expr::atom(&name, Some(region)));
                }
                self.pos += 1;
                let e = self.or()?;
                self.expect(Tok::Close, "`)`")?;
                Ok(e)
            }
            Some(_) => Err(self.error("expected a layout name or `(`")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

/// Parses a Boolean expression over layout names. NOT binds tighter than
/// AND, which binds tighter than OR.
pub fn parse_expr(s: &str) -> Result<Expr, QueryError> {
    let mut p = Parser {
        toks: tokenize(s)?,
        pos: 0,
        end: s.len(),
    };
    let e = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// A validated query: layouts with derived dummies plus the expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedQuery {
    pub canvas: PageDims,
    pub layouts: BTreeMap<String, QueryLayout>,
    pub expr: Expr,
}

impl ParsedQuery {
    /// Query type of each layout.
    pub fn types(&self) -> BTreeMap<String, u8> {
        self.layouts
            .iter()
            .map(|(n, l)| (n.clone(), l.query_type()))
            .collect()
    }
}

pub fn parse_query(text: &str) -> Result<ParsedQuery, QueryError> {
    let spec: QuerySpec = serde_json::from_str(text).map_err(|e| QueryError::Malformed(e.to_string()))?;
    parse_spec(&spec)
}

pub fn parse_spec(spec: &QuerySpec) -> Result<ParsedQuery, QueryError> {
    if spec.layouts.is_empty() {
        return Err(QueryError::Malformed("no layouts given".into()));
    }
    let expr = match &spec.expr {
        Some(e) => parse_expr(e)?,
        None if spec.layouts.len() == 1 => Expr::atom(spec.layouts.keys().next().expect("one layout"), None),
        None => return Err(QueryError::Malformed("several layouts need an `expr`".into())),
    };
    let atoms = expr.atoms();
    for (name, _, _) in &atoms {
        if !spec.layouts.contains_key(*name) {
            return Err(QueryError::UnknownLayout(name.to_string()));
        }
    }
    if !atoms.iter().any(|(_, _, positive)| *positive) {
        return Err(QueryError::NotOnly);
    }
    let mut layouts = BTreeMap::new();
    for (name, l) in &spec.layouts {
        layouts.insert(name.clone(), QueryLayout::new(name.clone(), spec.canvas, l.blocks.clone())?);
    }
    Ok(ParsedQuery {
        canvas: spec.canvas,
        layouts,
        expr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("A OR B AND NOT C").unwrap();
        assert_eq!(e.to_string(), "(A OR (B AND (NOT C)))");
        let e = parse_expr("(A OR B) AND C").unwrap();
        assert_eq!(e.to_string(), "((A OR B) AND C)");
    }

    #[test]
    fn region_atoms() {
        let e = parse_expr("(A, bottom) AND (B) AND (NOT C)").unwrap();
        assert_eq!(e.to_string(), "(((A,bottom) AND B) AND (NOT C))");
        let atoms = e.atoms();
        assert_eq!(
            atoms,
            vec![("A", Some(Location::Bottom), true), ("B", None, true), ("C", None, false)]
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert!(matches!(parse_expr("A AND"), Err(QueryError::Syntax { offset: 5, .. })));
        assert!(matches!(parse_expr("(A"), Err(QueryError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("(A, middle)"), Err(QueryError::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("A B"), Err(QueryError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("A & B"), Err(QueryError::Syntax { offset: 2, .. })));
    }

    fn spec(expr: Option<&str>) -> String {
        let e = expr.map_or(String::new(), |e| format!(r#","expr":"{e}""#));
        format!(
            r#"{{"canvas":{{"w":100,"h":100}},"layouts":{{"A":{{"blocks":[{{"x":0,"y":0,"w":100,"h":100,"kind":"text"}}]}},"C":{{"blocks":[{{"x":0,"y":0,"w":100,"h":100,"kind":"any"}}]}}}}{e}}}"#
        )
    }

    #[test]
    fn not_only_is_rejected() {
        assert_eq!(parse_query(&spec(Some("NOT A"))).unwrap_err(), QueryError::NotOnly);
        assert_eq!(parse_query(&spec(Some("NOT (A OR C)"))).unwrap_err(), QueryError::NotOnly);
        assert!(parse_query(&spec(Some("NOT NOT A"))).is_ok());
    }

    #[test]
    fn single_block_is_type_one() {
        let q = parse_query(&spec(Some("A AND NOT C"))).unwrap();
        assert_eq!(q.types()["A"], 1);
        assert_eq!(q.types()["C"], 2);
    }

    #[test]
    fn expression_is_required_for_several_layouts() {
        assert!(matches!(parse_query(&spec(None)), Err(QueryError::Malformed(_))));
        assert_eq!(parse_query(&spec(Some("A OR Z"))).unwrap_err(), QueryError::UnknownLayout("Z".into()));
        assert!(matches!(parse_query("{"), Err(QueryError::Malformed(_))));
    }
}
