use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    LParen,
    RParen,
    Symbol,
    Variable,
    Keyword,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Lowercased text. Parentheses carry "(" and ")".
    pub text: String,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("illegal character {ch:?}")]
pub struct LexError {
    pub ch: char,
    pub line: u32,
    pub column: u32,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '=' | '.')
}

/// Splits PDDL source into tokens. Comments run from `;` to end of line and
/// all text is folded to lowercase.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1u32, 1u32);

    while let Some(&c) = chars.peek() {
        let (start_line, start_col) = (line, column);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '(' | ')' => {
                chars.next();
                column += 1;
                tokens.push(Token {
                    kind: if c == '(' {
                        TokenKind::LParen
                    } else {
                        TokenKind::RParen
                    },
                    text: c.to_string(),
                    line: start_line,
                    column: start_col,
                });
            }
            _ => {
                let kind = match c {
                    '?' => TokenKind::Variable,
                    ':' => TokenKind::Keyword,
                    c if is_name_char(c) => TokenKind::Symbol,
                    _ => {
                        return Err(LexError {
                            ch: c,
                            line,
                            column,
                        })
                    }
                };
                let mut text = String::new();
                if kind != TokenKind::Symbol {
                    text.push(c);
                    chars.next();
                    column += 1;
                }
                while let Some(&c) = chars.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    text.push(c.to_ascii_lowercase());
                    chars.next();
                    column += 1;
                }
                if text.len() == 1 && kind != TokenKind::Symbol {
                    // a bare '?' or ':'
                    return Err(LexError {
                        ch: c,
                        line: start_line,
                        column: start_col,
                    });
                }
                tokens.push(Token {
                    kind,
                    text,
                    line: start_line,
                    column: start_col,
                });
            }
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds_texts(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn define_header() {
        use TokenKind::*;
        let toks = kinds_texts("(define (domain d))");
        let expected: Vec<(TokenKind, String)> = vec![
            (LParen, "(".into()),
            (Symbol, "define".into()),
            (LParen, "(".into()),
            (Symbol, "domain".into()),
            (Symbol, "d".into()),
            (RParen, ")".into()),
            (RParen, ")".into()),
        ];
        assert_eq!(toks, expected);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn comments_are_skipped() {
        let toks = tokenize("?x ; comment\n:action").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].kind, TokenKind::Variable);
        assert_eq!(toks[0].text, "?x");
        assert_eq!(toks[1].kind, TokenKind::Keyword);
        assert_eq!(toks[1].text, ":action");
        assert_eq!((toks[1].line, toks[1].column), (2, 1));
    }

    #[test]
    fn case_folding() {
        let toks = tokenize("(ON A B)").unwrap();
        assert_eq!(toks[1].text, "on");
        assert_eq!(toks[2].text, "a");
    }

    #[test]
    fn illegal_character_has_position() {
        let err = tokenize("(a\n  #b)").unwrap_err();
        assert_eq!(err.ch, '#');
        assert_eq!((err.line, err.column), (2, 3));
        assert!(tokenize("( ? )").is_err());
    }

    fn token_text() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("(".to_string()),
            Just(")".to_string()),
            "[a-z][a-z0-9_-]{0,6}",
            "\\?[a-z][a-z0-9-]{0,4}",
            ":[a-z][a-z-]{0,8}",
        ]
    }

    proptest! {
        #[test]
        fn retokenizing_joined_text_is_stable(words in prop::collection::vec(token_text(), 0..40)) {
            let first = tokenize(&words.join(" ")).unwrap();
            let joined = first.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
            let second = tokenize(&joined).unwrap();
            let strip = |v: Vec<Token>| v.into_iter().map(|t| (t.kind, t.text)).collect::<Vec<_>>();
            prop_assert_eq!(strip(first), strip(second));
        }

        #[test]
        fn lexer_never_panics(src in "\\PC{0,200}") {
            let _ = tokenize(&src);
        }
    }
}
