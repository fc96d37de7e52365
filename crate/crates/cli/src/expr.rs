//! Restricted numeric expression grammar for drive parameters.
//!
//! Accepted forms: a decimal literal (`0.5`, `-1`, `2e-3`), a rational
//! `a/b` (`16/27`), or a surd `a*sqrt(b)/c` with the `a*` prefix and the
//! `/c` suffix each optional (`sqrt(2)`, `4*sqrt(11)/27`). The surd form
//! exists so exact reference values can be entered without decimal
//! rounding; anything richer belongs in a calculator, not a flag parser.

/// Parses one expression of the restricted grammar into a float.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty numeric expression".into());
    }

    if let Some(idx) = s.find("sqrt(") {
        let (prefix, rest) = s.split_at(idx);
        let factor = if prefix.is_empty() {
            1.0
        } else if prefix == "-" {
            -1.0
        } else {
            let bare = prefix
                .strip_suffix('*')
                .ok_or_else(|| format!("expected '*' between the factor and sqrt in '{s}'"))?;
            parse_literal(bare)?
        };

        let inner_and_tail = &rest["sqrt(".len()..];
        let close = inner_and_tail
            .find(')')
            .ok_or_else(|| format!("missing ')' in '{s}'"))?;
        let inner = parse_literal(&inner_and_tail[..close])?;
        if inner < 0.0 {
            return Err(format!("square root of a negative value in '{s}'"));
        }

        let tail = &inner_and_tail[close + 1..];
        let divisor = if tail.is_empty() {
            1.0
        } else {
            let bare = tail
                .strip_prefix('/')
                .ok_or_else(|| format!("unexpected trailing '{tail}' in '{s}'"))?;
            parse_literal(bare)?
        };
        if divisor == 0.0 {
            return Err(format!("division by zero in '{s}'"));
        }
        return Ok(factor * inner.sqrt() / divisor);
    }

    if let Some((numerator, denominator)) = s.split_once('/') {
        let den = parse_literal(denominator)?;
        if den == 0.0 {
            return Err(format!("division by zero in '{s}'"));
        }
        return Ok(parse_literal(numerator)? / den);
    }

    parse_literal(s)
}

fn parse_literal(text: &str) -> Result<f64, String> {
    let s = text.trim();
    s.parse::<f64>()
        .map_err(|_| format!("'{s}' is not a numeric literal"))
}

/// Parses a comma-separated list of expressions; empty input means an
/// empty list.
pub fn parse_number_list(text: &str) -> Result<Vec<f64>, String> {
    let s = text.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_number).collect()
}
