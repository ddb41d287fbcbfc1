use crate::error::ParseError;
use crate::rule::{Alphabet, SubstitutionRule, Word};

fn is_letter_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_letter_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Statement {
    lhs: String,
    rhs: Vec<(usize, String)>,
}

/// Splits the text into `lhs -> rhs` statements, tracking positions for
/// error reports. Statements are separated by newlines or `;`, and `#`
/// comments run to end of line.
fn statements(text: &str) -> Result<Vec<Statement>, ParseError> {
    let mut out = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let uncommented = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut offset = 0;
        for piece in uncommented.split(';') {
            let stmt = parse_statement(piece, line_no, offset)?;
            if let Some(stmt) = stmt {
                out.push(stmt);
            }
            offset += piece.chars().count() + 1;
        }
    }
    Ok(out)
}

/// Parses one statement (or nothing, for blank text). `base` is the column
/// of the piece's first character within its line.
fn parse_statement(
    piece: &str,
    line: usize,
    base: usize,
) -> Result<Option<Statement>, ParseError> {
    let chars: Vec<char> = piece.chars().collect();
    let mut i = 0;
    let col = |i: usize| base + i + 1;
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    if i == chars.len() {
        return Ok(None);
    }
    if !is_letter_start(chars[i]) {
        return Err(ParseError::Syntax {
            line,
            column: col(i),
            message: format!("expected a letter name, found `{}`", chars[i]),
        });
    }
    let start = i;
    while i < chars.len() && is_letter_char(chars[i]) {
        i += 1;
    }
    let lhs: String = chars[start..i].iter().collect();
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    if !(i + 1 < chars.len() && chars[i] == '-' && chars[i + 1] == '>') {
        return Err(ParseError::Syntax {
            line,
            column: col(i),
            message: "expected `->`".into(),
        });
    }
    i += 2;
    let mut rhs = Vec::new();
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        if !is_letter_char(chars[i]) {
            return Err(ParseError::Syntax {
                line,
                column: col(i),
                message: format!("unexpected character `{}` in image", chars[i]),
            });
        }
        let start = i;
        while i < chars.len() && is_letter_char(chars[i]) {
            i += 1;
        }
        rhs.push((col(start), chars[start..i].iter().collect()));
    }
    if rhs.is_empty() {
        return Err(ParseError::Syntax {
            line,
            column: col(i),
            message: format!("empty image for `{lhs}`"),
        });
    }
    Ok(Some(Statement { lhs, rhs }))
}

/// Parses the rule DSL. The alphabet is the set of left-hand sides in
/// order of appearance; when every letter is a single character, image
/// tokens may run letters together.
pub fn parse_rule(text: &str) -> Result<SubstitutionRule, ParseError> {
    let stmts = statements(text)?;
    if stmts.is_empty() {
        return Err(ParseError::Syntax {
            line: 1,
            column: 1,
            message: "no rules found".into(),
        });
    }
    let mut letters: Vec<String> = Vec::new();
    for stmt in &stmts {
        if letters.contains(&stmt.lhs) {
            return Err(ParseError::DuplicateRule {
                letter: stmt.lhs.clone(),
            });
        }
        letters.push(stmt.lhs.clone());
    }
    let single_char = letters.iter().all(|l| l.chars().count() == 1);
    let index = |name: &str| letters.iter().position(|l| l == name);
    let mut images: Vec<Word> = Vec::new();
    for stmt in &stmts {
        let mut image = Vec::new();
        for (_, token) in &stmt.rhs {
            if let Some(i) = index(token) {
                image.push(i);
            } else if single_char {
                for c in token.chars() {
                    match index(&c.to_string()) {
                        Some(i) => image.push(i),
                        None => {
                            return Err(ParseError::UndefinedLetter {
                                letter: c.to_string(),
                            })
                        }
                    }
                }
            } else {
                return Err(ParseError::UndefinedLetter {
                    letter: token.clone(),
                });
            }
        }
        images.push(image);
    }
    Ok(SubstitutionRule::new(Alphabet::new(letters), images))
}

/// Prints a rule in the DSL, one statement per line. Single-character
/// alphabets use contiguous images; multi-character names are spaced.
pub fn print_rule(rule: &SubstitutionRule) -> String {
    let single = rule.alphabet.single_char();
    let mut out = String::new();
    for i in 0..rule.letter_count() {
        let image: Vec<&str> = rule.image(i).iter().map(|&l| rule.alphabet.name(l)).collect();
        let joined = if single {
            image.concat()
        } else {
            image.join(" ")
        };
        out.push_str(&format!("{} -> {}\n", rule.alphabet.name(i), joined));
    }
    out
}
