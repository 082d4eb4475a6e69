//! Query expressions: `op(arg, ..., name=value)` over literals.
//!
//! ```text
//! expr  := call | set | list | "string" | number | @ref | word
//! call  := word "(" [expr ("," expr)*] [("," | ε) word "=" expr ...] ")"
//! set   := "{" [expr ("," expr)*] "}"
//! list  := "[" [expr ("," expr)*] "]"
//! ```
//!
//! Positional arguments precede named ones. Printing produces the canonical
//! form, which parses back to the same tree.

use std::fmt;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Call {
        op: String,
        args: Vec<Expr>,
        named: Vec<(String, Expr)>,
    },
    Set(Vec<Expr>),
    List(Vec<Expr>),
    Str(String),
    /// Kept as written so element ids such as `1` survive untouched.
    Num(String),
    Ref(String),
    Word(String),
}

impl Expr {
    pub fn call(op: &str, args: Vec<Expr>) -> Expr {
        Expr::Call {
            op: op.to_string(),
            args,
            named: Vec::new(),
        }
    }
}

const DELIMS: &str = "(){}[],=\"@";

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !DELIMS.contains(c)
}

/// A word that the lexer would read as a number.
fn looks_numeric(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.')) && s.parse::<f64>().is_ok()
}

/// Words are runs of non-delimiter characters; `@` is also allowed after the
/// first character so level-tagged ids like `A'@1` stay one token.
pub fn is_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if is_word_char(c))
        && chars.all(|c| is_word_char(c) || c == '@')
        && !looks_numeric(s)
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Expr]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Call { op, args, named } => {
                write!(f, "{op}(")?;
                write_list(f, args)?;
                for (i, (k, v)) in named.iter().enumerate() {
                    if i > 0 || !args.is_empty() {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                f.write_str(")")
            }
            Expr::Set(items) => {
                f.write_str("{")?;
                write_list(f, items)?;
                f.write_str("}")
            }
            Expr::List(items) => {
                f.write_str("[")?;
                write_list(f, items)?;
                f.write_str("]")
            }
            Expr::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Expr::Num(n) | Expr::Word(n) => f.write_str(n),
            Expr::Ref(r) => write!(f, "@{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open(char),
    Close(char),
    Comma,
    Eq,
    Str(String),
    Num(String),
    Ref(String),
    Word(String),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, CliError> {
    let err = |pos: usize, message: &str| CliError::Parse {
        pos,
        message: message.to_string(),
    };
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' | '{' | '[' => {
                out.push((pos, Tok::Open(c)));
                i += 1;
            }
            ')' | '}' | ']' => {
                out.push((pos, Tok::Close(c)));
                i += 1;
            }
            ',' => {
                out.push((pos, Tok::Comma));
                i += 1;
            }
            '=' => {
                out.push((pos, Tok::Eq));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    let Some(&(_, c)) = chars.get(i) else {
                        return Err(err(pos, "unterminated string"));
                    };
                    i += 1;
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(&(at, e)) = chars.get(i) else {
                                return Err(err(pos, "unterminated string"));
                            };
                            i += 1;
                            s.push(match e {
                                'n' => '\n',
                                '"' | '\\' => e,
                                _ => return Err(err(at, "unknown escape")),
                            });
                        }
                        c => s.push(c),
                    }
                }
                out.push((pos, Tok::Str(s)));
            }
            _ => {
                let reference = c == '@';
                if reference {
                    i += 1;
                }
                let start = i;
                while i < chars.len() && (is_word_char(chars[i].1) || (i > start && chars[i].1 == '@')) {
                    i += 1;
                }
                if i == start {
                    return Err(err(
                        pos,
                        if reference {
                            "expected a name after '@'"
                        } else {
                            "unexpected character"
                        },
                    ));
                }
                let end = chars.get(i).map_or(src.len(), |&(p, _)| p);
                let text = src[chars[start].0..end].to_string();
                out.push((
                    pos,
                    if reference {
                        Tok::Ref(text)
                    } else if looks_numeric(&text) {
                        Tok::Num(text)
                    } else {
                        Tok::Word(text)
                    },
                ));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, CliError> {
        Err(CliError::Parse {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("expected an expression");
        };
        match tok {
            Tok::Open('{') | Tok::Open('[') => {
                self.at += 1;
                let close = if tok == Tok::Open('{') { '}' } else { ']' };
                let mut items = Vec::new();
                if self.peek() == Some(&Tok::Close(close)) {
                    self.at += 1;
                } else {
                    loop {
                        items.push(self.expr()?);
                        match self.next() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::Close(c)) if c == close => break,
                            _ => {
                                self.at -= 1;
                                return self.fail(format!("expected ',' or '{close}'"));
                            }
                        }
                    }
                }
                Ok(if close == '}' {
                    Expr::Set(items)
                } else {
                    Expr::List(items)
                })
            }
            Tok::Str(s) => {
                self.at += 1;
                Ok(Expr::Str(s))
            }
            Tok::Num(n) => {
                self.at += 1;
                Ok(Expr::Num(n))
            }
            Tok::Ref(r) => {
                self.at += 1;
                Ok(Expr::Ref(r))
            }
            Tok::Word(w) => {
                self.at += 1;
                if self.peek() == Some(&Tok::Open('(')) {
                    self.at += 1;
                    self.call(w)
                } else {
                    Ok(Expr::Word(w))
                }
            }
            _ => self.fail("expected an expression"),
        }
    }

    fn call(&mut self, op: String) -> Result<Expr, CliError> {
        let mut args = Vec::new();
        let mut named: Vec<(String, Expr)> = Vec::new();
        if self.peek() == Some(&Tok::Close(')')) {
            self.at += 1;
            return Ok(Expr::Call { op, args, named });
        }
        loop {
            let is_named = matches!(
                (self.toks.get(self.at), self.toks.get(self.at + 1)),
                (Some((_, Tok::Word(_))), Some((_, Tok::Eq)))
            );
            if is_named {
                let Some(Tok::Word(k)) = self.next() else {
                    unreachable!()
                };
                self.at += 1;
                named.push((k, self.expr()?));
            } else {
                if !named.is_empty() {
                    return self.fail("positional argument after a named one");
                }
                args.push(self.expr()?);
            }
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::Close(')')) => break,
                _ => {
                    self.at -= 1;
                    return self.fail("expected ',' or ')'");
                }
            }
        }
        Ok(Expr::Call { op, args, named })
    }
}

pub fn parse(src: &str) -> Result<Expr, CliError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return p.fail("trailing input");
    }
    Ok(e)
}
