use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Kw(Kw),
    Assign,
    LParen,
    RParen,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Eq,
    Ne,
    Lt,
    Le,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kw {
    Procedure,
    Enquiry,
    Main,
    End,
    If,
    Then,
    Elseif,
    Else,
    While,
    Do,
    Skip,
    Return,
    Code,
    True,
    False,
    And,
    Or,
    Not,
    Mod,
}

impl Kw {
    const TABLE: [(&'static str, Kw); 19] = [
        ("procedure", Kw::Procedure),
        ("enquiry", Kw::Enquiry),
        ("main", Kw::Main),
        ("end", Kw::End),
        ("if", Kw::If),
        ("then", Kw::Then),
        ("elseif", Kw::Elseif),
        ("else", Kw::Else),
        ("while", Kw::While),
        ("do", Kw::Do),
        ("skip", Kw::Skip),
        ("return", Kw::Return),
        ("code", Kw::Code),
        ("true", Kw::True),
        ("false", Kw::False),
        ("and", Kw::And),
        ("or", Kw::Or),
        ("not", Kw::Not),
        ("mod", Kw::Mod),
    ];

    fn lookup(word: &str) -> Option<Kw> {
        Kw::TABLE.iter().find(|(w, _)| *w == word).map(|(_, k)| *k)
    }

    pub fn as_str(self) -> &'static str {
        Kw::TABLE.iter().find(|(_, k)| *k == self).unwrap().0
    }

    pub fn is_keyword(word: &str) -> bool {
        Kw::lookup(word).is_some()
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Kw(k) => write!(f, "'{}'", k.as_str()),
            Tok::Assign => f.write_str("':='"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Semi => f.write_str("';'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Eq => f.write_str("'='"),
            Tok::Ne => f.write_str("'!='"),
            Tok::Lt => f.write_str("'<'"),
            Tok::Le => f.write_str("'<='"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let syntax = |line, col, expected: &[&str], found: String| ParseError::Syntax {
        line,
        col,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }

        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            let word: String = chars[start..i].iter().collect();
            match Kw::lookup(&word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<u64>().map_err(|_| {
                syntax(
                    start_line,
                    start_col,
                    &["integer below 2^64"],
                    format!("integer {digits}"),
                )
            })?;
            Tok::Int(n)
        } else if c == '"' {
            i += 1;
            col += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(syntax(line, col, &["'\"'"], "end of line".into()));
                    }
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('"' | '\\')) => {
                            s.push(e);
                            i += 2;
                            col += 2;
                        }
                        Some('n') => {
                            s.push('\n');
                            i += 2;
                            col += 2;
                        }
                        other => {
                            return Err(syntax(
                                line,
                                col,
                                &["escape \\\" \\\\ or \\n"],
                                format!("{other:?}"),
                            ));
                        }
                    },
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            Tok::Str(s)
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                (':', Some('=')) => (Tok::Assign, 2),
                ('!', Some('=')) | ('/', Some('=')) => (Tok::Ne, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('≠', _) => (Tok::Ne, 1),
                ('≤', _) => (Tok::Le, 1),
                ('×', _) => (Tok::Star, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('=', _) => (Tok::Eq, 1),
                ('<', _) => (Tok::Lt, 1),
                _ => {
                    return Err(syntax(line, col, &["token"], format!("character {c:?}")));
                }
            };
            advance(len, &mut i);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|s| s.tok).collect()
    }

    #[test]
    fn comments_and_operators() {
        assert_eq!(
            toks("x := x - 1 -- decrement\ny ≠ 2"),
            vec![
                Tok::Ident("x".into()),
                Tok::Assign,
                Tok::Ident("x".into()),
                Tok::Minus,
                Tok::Int(1),
                Tok::Ident("y".into()),
                Tok::Ne,
                Tok::Int(2),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("skip\n  end").unwrap();
        assert_eq!((t[1].line, t[1].col), (2, 3));
    }

    #[test]
    fn unterminated_string() {
        assert!(matches!(
            tokenize("Error(\"oops"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
    }
}
