use super::Pos;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Word(String),
    Str(String),
    Num(f64),
    LBrace,
    RBrace,
    Semi,
    Comma,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(_) => "string".into(),
            Tok::Num(n) => format!("number {n}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LexError {
    pub message: String,
    pub pos: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
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
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '/' {
                let (line, column) = (cur.line, cur.column);
                cur.bump();
                if cur.peek() != Some('/') {
                    return Err(LexError {
                        message: "unexpected `/` (comments start with `//`)".into(),
                        pos: Pos {
                            line,
                            column,
                            length: 1,
                        },
                    });
                }
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }
        let (line, column) = (cur.line, cur.column);
        let at = |length: usize| Pos {
            line,
            column,
            length,
        };
        let Some(c) = cur.peek() else {
            out.push(Token {
                tok: Tok::Eof,
                pos: at(0),
            });
            return Ok(out);
        };
        let tok = match c {
            '{' | '}' | ';' | ',' => {
                cur.bump();
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                Token { tok: t, pos: at(1) }
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                let mut len = 1;
                loop {
                    let Some(c) = cur.bump() else {
                        return Err(LexError {
                            message: "unterminated string".into(),
                            pos: at(len),
                        });
                    };
                    len += 1;
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(e) = cur.bump() else {
                                return Err(LexError {
                                    message: "unterminated string".into(),
                                    pos: at(len),
                                });
                            };
                            len += 1;
                            match e {
                                '"' => s.push('"'),
                                '\\' => s.push('\\'),
                                'n' => s.push('\n'),
                                't' => s.push('\t'),
                                'r' => s.push('\r'),
                                'u' => {
                                    let (ch, used) =
                                        unicode_escape(&mut cur).ok_or_else(|| LexError {
                                            message: "invalid unicode escape (expected \\u{XXXX})"
                                                .into(),
                                            pos: at(len),
                                        })?;
                                    len += used;
                                    s.push(ch);
                                }
                                other => {
                                    return Err(LexError {
                                        message: format!("unknown escape `\\{other}`"),
                                        pos: at(len),
                                    })
                                }
                            }
                        }
                        c => s.push(c),
                    }
                }
                Token {
                    tok: Tok::Str(s),
                    pos: at(len),
                }
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    let exp_sign =
                        matches!(c, '-' | '+') && matches!(s.chars().last(), Some('e' | 'E'));
                    if c.is_ascii_digit()
                        || c == '.'
                        || c == 'e'
                        || c == 'E'
                        || exp_sign
                        || (s.is_empty() && (c == '-' || c == '+'))
                    {
                        s.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                let len = s.chars().count();
                match s.parse::<f64>() {
                    Ok(v) if !v.is_nan() => Token {
                        tok: Tok::Num(v),
                        pos: at(len),
                    },
                    _ => {
                        return Err(LexError {
                            message: format!("malformed number `{s}`"),
                            pos: at(len),
                        })
                    }
                }
            }
            c if is_word_start(c) => {
                let mut s = String::new();
                while let Some(c) = cur.peek().filter(|c| is_word_char(*c)) {
                    s.push(c);
                    cur.bump();
                }
                let len = s.chars().count();
                Token {
                    tok: Tok::Word(s),
                    pos: at(len),
                }
            }
            other => {
                return Err(LexError {
                    message: format!("unexpected character {other:?}"),
                    pos: at(1),
                })
            }
        };
        out.push(tok);
    }
}

fn unicode_escape(cur: &mut Cursor<'_>) -> Option<(char, usize)> {
    if cur.bump()? != '{' {
        return None;
    }
    let mut hex = String::new();
    loop {
        match cur.bump()? {
            '}' => break,
            c if c.is_ascii_hexdigit() && hex.len() < 6 => hex.push(c),
            _ => return None,
        }
    }
    let ch = char::from_u32(u32::from_str_radix(&hex, 16).ok()?)?;
    Some((ch, hex.len() + 2))
}
