use crate::error::{DiscoError, Result, Span};

use super::token::{keyword, Token, TokenKind, SYMBOLS};

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
    /// No token has been produced yet on the current line.
    line_start: bool,
    tokens: Vec<Token>,
}

/// Split source text into tokens. `--` comments are dropped; `|||` and
/// `!!!` lines become single [`TokenKind::DocLine`] / [`TokenKind::TestLine`]
/// tokens carrying the rest of the line.
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer {
        src,
        pos: 0,
        line: 1,
        column: 1,
        line_start: true,
        tokens: Vec::new(),
    };
    lx.run()?;
    Ok(lx.tokens)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && !is_symbol_letter(c) || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() && !is_symbol_letter(c)) || c == '_' || c == '\''
}

/// Letter-like characters that are operators or type names in their own right.
fn is_symbol_letter(c: char) -> bool {
    matches!(c, 'λ' | 'ℕ' | 'ℤ' | 'ℚ' | '𝔽' | '𝔹')
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
            self.line_start = true;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.column)
    }

    fn push(&mut self, kind: TokenKind, text: String, span: Span) {
        self.tokens.push(Token { kind, text, span });
        self.line_start = false;
    }

    fn take_line(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn run(&mut self) -> Result<()> {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let span = self.span();
            let rest = self.rest();
            if rest.starts_with("--") {
                self.take_line();
                continue;
            }
            if self.line_start && (rest.starts_with("|||") || rest.starts_with("!!!")) {
                let kind = if rest.starts_with("|||") {
                    TokenKind::DocLine
                } else {
                    TokenKind::TestLine
                };
                for _ in 0..3 {
                    self.bump();
                }
                let line = self.take_line();
                let text = line.strip_prefix(' ').unwrap_or(&line).trim_end().to_string();
                self.push(kind, text, span);
                continue;
            }
            if c.is_ascii_digit() {
                let mut digits = String::new();
                while let Some(d) = self.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(d);
                    self.bump();
                }
                self.push(TokenKind::Nat, digits, span);
                continue;
            }
            if is_ident_start(c) {
                let mut word = String::new();
                while let Some(d) = self.peek().filter(|d| is_ident_continue(*d)) {
                    word.push(d);
                    self.bump();
                }
                let kind = keyword(&word).unwrap_or(TokenKind::Ident);
                self.push(kind, word, span);
                continue;
            }
            match c {
                '"' => {
                    self.bump();
                    let s = self.string_body(span)?;
                    self.push(TokenKind::Str, s, span);
                }
                '\'' => {
                    self.bump();
                    let ch = self.char_body(span)?;
                    self.push(TokenKind::Char, ch.to_string(), span);
                }
                '~' => self.section(span)?,
                _ => {
                    let (sym, kind) = SYMBOLS
                        .iter()
                        .find(|(sym, _)| rest.starts_with(sym))
                        .copied()
                        .ok_or_else(|| DiscoError::lex(span, format!("unexpected character '{c}'")))?;
                    for _ in sym.chars() {
                        self.bump();
                    }
                    self.push(kind, sym.to_string(), span);
                }
            }
        }
        Ok(())
    }

    fn escape(&mut self, span: Span) -> Result<char> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('0') => Ok('\0'),
            Some('\\') => Ok('\\'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some(other) => Err(DiscoError::lex(span, format!("unknown escape '\\{other}'"))),
            None => Err(DiscoError::lex(span, "unterminated escape")),
        }
    }

    fn string_body(&mut self, span: Span) -> Result<String> {
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => out.push(self.escape(span)?),
                Some('\n') | None => return Err(DiscoError::lex(span, "unterminated string literal")),
                Some(c) => out.push(c),
            }
        }
    }

    fn char_body(&mut self, span: Span) -> Result<char> {
        let ch = match self.bump() {
            Some('\\') => self.escape(span)?,
            Some('\'') | Some('\n') | None => {
                return Err(DiscoError::lex(span, "malformed character literal"))
            }
            Some(c) => c,
        };
        if self.bump() != Some('\'') {
            return Err(DiscoError::lex(span, "malformed character literal"));
        }
        Ok(ch)
    }

    fn section(&mut self, span: Span) -> Result<()> {
        self.bump();
        let body_start = self.pos;
        let close = self
            .rest()
            .find('~')
            .filter(|i| !self.rest()[..*i].contains('\n'));
        let Some(len) = close else {
            return Err(DiscoError::lex(span, "unterminated operator section"));
        };
        let inner = self.src[body_start..body_start + len].trim().to_string();
        let inner_tokens = tokenize(&inner).map_err(|_| bad_section(span, &inner))?;
        let op = match inner_tokens.as_slice() {
            [t] => t.kind.binop().ok_or_else(|| bad_section(span, &inner))?,
            _ => return Err(bad_section(span, &inner)),
        };
        for _ in 0..=self.src[body_start..body_start + len].chars().count() {
            self.bump();
        }
        self.push(TokenKind::Section(op), format!("~{inner}~"), span);
        Ok(())
    }
}

fn bad_section(span: Span, inner: &str) -> DiscoError {
    DiscoError::lex(span, format!("'{inner}' is not an operator"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use TokenKind::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn juxtaposed_literal_splits() {
        let toks = tokenize("2x").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!((toks[0].kind, toks[0].text.as_str()), (Nat, "2"));
        assert_eq!((toks[1].kind, toks[1].text.as_str()), (Ident, "x"));
    }

    #[test]
    fn operator_synonyms_share_kinds() {
        let expected = kinds("p /\\ q");
        for src in ["p ∧ q", "p && q", "p and q"] {
            assert_eq!(kinds(src), expected, "{src}");
        }
        assert_eq!(kinds("p \\/ q"), kinds("p ∨ q"));
        assert_eq!(kinds("p || q"), kinds("p or q"));
        assert_eq!(kinds("not p"), kinds("¬p"));
        for ty in ["ℕ", "N", "Nat", "Natural"] {
            assert_eq!(kinds(ty), vec![TyNat]);
        }
        for ty in ["ℤ", "Z", "Int", "Integer"] {
            assert_eq!(kinds(ty), vec![TyInt]);
        }
        assert_eq!(kinds("𝔽"), kinds("Frac"));
        assert_eq!(kinds("ℚ"), kinds("Rational"));
        assert_eq!(kinds("N * N -> N"), kinds("ℕ × ℕ → ℕ"));
    }

    #[test]
    fn case_delimiters() {
        let toks = tokenize("{? x ?}").unwrap();
        let ks: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(ks, vec![CaseOpen, Ident, CaseClose]);
    }

    #[test]
    fn doc_and_test_lines() {
        let toks = tokenize("||| The gcd.\n!!! gcd(7,6) == 1\ngcd : N -- comment\n").unwrap();
        assert_eq!(toks[0].kind, DocLine);
        assert_eq!(toks[0].text, "The gcd.");
        assert_eq!(toks[1].kind, TestLine);
        assert_eq!(toks[1].text, "gcd(7,6) == 1");
        assert_eq!(toks.len(), 5);
    }

    #[test]
    fn sections_and_primes() {
        assert_eq!(kinds("~/\\~"), vec![Section(crate::syntax::ast::BinOp::And)]);
        assert_eq!(kinds("~+~"), vec![Section(crate::syntax::ast::BinOp::Add)]);
        let toks = tokenize("zOrder'(n)").unwrap();
        assert_eq!(toks[0].text, "zOrder'");
    }

    #[test]
    fn literals() {
        let toks = tokenize(r#""a\"b" 'c' '\n'"#).unwrap();
        assert_eq!(toks[0].text, "a\"b");
        assert_eq!(toks[1].text, "c");
        assert_eq!(toks[2].text, "\n");
        assert!(tokenize("\"abc").is_err());
        assert!(tokenize("'ab'").is_err());
        assert!(tokenize("x $ y").is_err());
    }

    #[test]
    fn spans_are_monotone() {
        let toks = tokenize("f : N -> N\nf(x) =\n  {? x if x > 2,\n     0 otherwise ?}").unwrap();
        for w in toks.windows(2) {
            assert!(w[0].span < w[1].span);
        }
    }
}
