//! Tokenizing for the small `name(arg,...)` notation shared by schema, example,
//! bias and clause files.

/// One argument of an atom as written in text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawArg {
    pub text: String,
    pub quoted: bool,
}

/// Parses `name(a, "b", c)` into its name and arguments.
pub(crate) fn parse_atom(src: &str) -> Result<(String, Vec<RawArg>), String> {
    let src = src.trim();
    let open = src
        .find('(')
        .ok_or_else(|| format!("expected `name(...)`, found `{src}`"))?;
    if !src.ends_with(')') {
        return Err(format!("missing closing `)` in `{src}`"));
    }
    let name = src[..open].trim();
    if !is_identifier(name) {
        return Err(format!("invalid relation name `{name}`"));
    }
    let inner = &src[open + 1..src.len() - 1];
    let mut args = Vec::new();
    for piece in split_top_level(inner, ',')? {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(format!("empty argument in `{src}`"));
        }
        if let Some(rest) = piece.strip_prefix('"') {
            let text = rest
                .strip_suffix('"')
                .ok_or_else(|| format!("unterminated string in `{src}`"))?;
            if text.contains('"') {
                return Err(format!("stray quote in `{src}`"));
            }
            args.push(RawArg {
                text: text.to_string(),
                quoted: true,
            });
        } else {
            if piece.contains(['"', '(', ')']) {
                return Err(format!("malformed argument `{piece}`"));
            }
            args.push(RawArg {
                text: piece.to_string(),
                quoted: false,
            });
        }
    }
    Ok((name.to_string(), args))
}

/// Splits on `sep` outside of parentheses and double quotes.
pub(crate) fn split_top_level(src: &str, sep: char) -> Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut quoted = false;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '(' if !quoted => depth += 1,
            ')' if !quoted => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("unbalanced `)` in `{src}`"));
                }
            }
            c if c == sep && !quoted && depth == 0 => {
                parts.push(&src[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if quoted {
        return Err(format!("unterminated string in `{src}`"));
    }
    if depth != 0 {
        return Err(format!("unbalanced `(` in `{src}`"));
    }
    parts.push(&src[start..]);
    Ok(parts)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}
