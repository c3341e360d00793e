//! Reader and writer for the supported Fuzzy Control Language subset:
//! one `FUNCTION_BLOCK` with a single input and output variable, piecewise-linear
//! `TERM` point lists, `COG` defuzzification and a MIN/MAX `RULEBLOCK`.
//! Keywords are case-insensitive; identifiers are not.

use std::fmt;

use thiserror::Error;

use super::{FuzzyError, FuzzyRule, FuzzySystem, SystemNames, Term};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind} at {token:?}")]
pub struct FclError {
    pub line: usize,
    pub token: String,
    pub kind: FclErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FclErrorKind {
    UnknownKeyword,
    Expected(&'static str),
    UnexpectedEof,
    UnknownVariable(String),
    UnresolvedTerm(String),
    NonIncreasingX,
    MissingRuleblock,
    Unsupported(&'static str),
    VariableCount,
    Invalid(FuzzyError),
}

impl fmt::Display for FclErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FclErrorKind::UnknownKeyword => write!(f, "unknown keyword"),
            FclErrorKind::Expected(what) => write!(f, "expected {what}"),
            FclErrorKind::UnexpectedEof => write!(f, "unexpected end of input"),
            FclErrorKind::UnknownVariable(v) => write!(f, "unknown variable {v:?}"),
            FclErrorKind::UnresolvedTerm(t) => write!(f, "unresolved term {t:?}"),
            FclErrorKind::NonIncreasingX => write!(f, "non-increasing x"),
            FclErrorKind::MissingRuleblock => write!(f, "missing RULEBLOCK"),
            FclErrorKind::Unsupported(what) => write!(f, "unsupported {what}"),
            FclErrorKind::VariableCount => {
                write!(f, "exactly one input and one output variable are required")
            }
            FclErrorKind::Invalid(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Number(f64),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, FclError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b'\n' => {
                line += 1;
                i += 1;
            }
            _ if c.is_ascii_whitespace() => i += 1,
            b'(' if bytes.get(i + 1) == Some(&b'*') => {
                let open_line = line;
                i += 2;
                loop {
                    match bytes.get(i) {
                        None => {
                            return Err(FclError {
                                line: open_line,
                                token: "(*".into(),
                                kind: FclErrorKind::UnexpectedEof,
                            })
                        }
                        Some(b'*') if bytes.get(i + 1) == Some(&b')') => {
                            i += 2;
                            break;
                        }
                        Some(b'\n') => line += 1,
                        _ => {}
                    }
                    i += 1;
                }
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' | b')' | b',' | b';' => {
                let p = match c {
                    b'(' => "(",
                    b')' => ")",
                    b',' => ",",
                    _ => ";",
                };
                tokens.push(Token { tok: Tok::Punct(p), text: p.into(), line });
                i += 1;
            }
            b':' => {
                let p = if bytes.get(i + 1) == Some(&b'=') { ":=" } else { ":" };
                i += p.len();
                tokens.push(Token { tok: Tok::Punct(p), text: p.into(), line });
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let text = &src[start..i];
                tokens.push(Token { tok: Tok::Word(text.into()), text: text.into(), line });
            }
            _ if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                i += 1;
                while i < bytes.len() {
                    let b = bytes[i];
                    let exp_sign = (b == b'-' || b == b'+') && matches!(bytes[i - 1], b'e' | b'E');
                    if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| FclError {
                    line,
                    token: text.into(),
                    kind: FclErrorKind::Expected("number"),
                })?;
                tokens.push(Token { tok: Tok::Number(value), text: text.into(), line });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(FclError {
                    line,
                    token: ch.to_string(),
                    kind: FclErrorKind::Expected("keyword, identifier, number or punctuation"),
                });
            }
        }
    }
    Ok(tokens)
}

struct PendingRule {
    rule: FuzzyRule,
    line: usize,
    input_var: Token,
    output_var: Token,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn last_line(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.line)
    }

    fn next(&mut self) -> Result<Token, FclError> {
        let token = self.tokens.get(self.pos).cloned().ok_or_else(|| FclError {
            line: self.last_line(),
            token: String::new(),
            kind: FclErrorKind::UnexpectedEof,
        })?;
        self.pos += 1;
        Ok(token)
    }

    fn error(token: &Token, kind: FclErrorKind) -> FclError {
        FclError { line: token.line, token: token.text.clone(), kind }
    }

    fn keyword(&mut self, kw: &'static str) -> Result<Token, FclError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Word(w) if w.eq_ignore_ascii_case(kw) => Ok(t),
            _ => Err(Self::error(&t, FclErrorKind::Expected(kw))),
        }
    }

    fn punct(&mut self, p: &'static str) -> Result<(), FclError> {
        let t = self.next()?;
        match t.tok {
            Tok::Punct(q) if q == p => Ok(()),
            _ => Err(Self::error(&t, FclErrorKind::Expected(p))),
        }
    }

    fn ident(&mut self) -> Result<Token, FclError> {
        let t = self.next()?;
        match t.tok {
            Tok::Word(_) => Ok(t),
            _ => Err(Self::error(&t, FclErrorKind::Expected("identifier"))),
        }
    }

    fn number(&mut self) -> Result<f64, FclError> {
        let t = self.next()?;
        match t.tok {
            Tok::Number(v) => Ok(v),
            _ => Err(Self::error(&t, FclErrorKind::Expected("number"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Word(w), .. }) if w.eq_ignore_ascii_case(kw))
    }

    /// `<name> : REAL ;` entries up to `END_VAR`.
    fn var_block(&mut self) -> Result<Vec<Token>, FclError> {
        let mut vars = Vec::new();
        while !self.at_keyword("END_VAR") {
            let name = self.ident()?;
            self.punct(":")?;
            self.keyword("REAL")?;
            self.punct(";")?;
            vars.push(name);
        }
        self.keyword("END_VAR")?;
        Ok(vars)
    }

    /// `TERM <name> := (x, mu) ... ;` with the `TERM` keyword already consumed.
    fn term(&mut self) -> Result<Term, FclError> {
        let name = self.ident()?;
        self.punct(":=")?;
        let mut points: Vec<(f64, f64)> = Vec::new();
        while matches!(self.peek(), Some(Token { tok: Tok::Punct("("), .. })) {
            self.punct("(")?;
            let x_token = self.peek().cloned();
            let x = self.number()?;
            self.punct(",")?;
            let mu = self.number()?;
            self.punct(")")?;
            if let (Some(&(prev, _)), Some(t)) = (points.last(), &x_token) {
                if x <= prev {
                    return Err(Self::error(t, FclErrorKind::NonIncreasingX));
                }
            }
            points.push((x, mu));
        }
        let end = self.next()?;
        if end.tok != Tok::Punct(";") {
            return Err(Self::error(&end, FclErrorKind::Expected("( or ;")));
        }
        Term::new(name.text.clone(), points).map_err(|e| Self::error(&name, FclErrorKind::Invalid(e)))
    }

    /// `<KEY> : <VALUE> ;` where only `value` is supported.
    fn setting(&mut self, value: &'static str, what: &'static str) -> Result<(), FclError> {
        self.punct(":")?;
        let t = self.ident()?;
        if !t.text.eq_ignore_ascii_case(value) {
            return Err(Self::error(&t, FclErrorKind::Unsupported(what)));
        }
        self.punct(";")
    }
}

/// Parses FCL text into a validated [`FuzzySystem`].
pub fn parse_fcl(text: &str) -> Result<FuzzySystem, FclError> {
    let mut p = Parser { tokens: tokenize(text)?, pos: 0 };

    p.keyword("FUNCTION_BLOCK")?;
    let block = p.ident()?.text;

    let mut inputs: Vec<Token> = Vec::new();
    let mut outputs: Vec<Token> = Vec::new();
    let mut input_terms: Option<(Token, Vec<Term>)> = None;
    let mut output_terms: Option<(Token, Vec<Term>)> = None;
    let mut default_output = 0.5;
    let mut rules: Option<(Token, Vec<PendingRule>)> = None;

    let end = loop {
        let t = p.next()?;
        let Tok::Word(word) = &t.tok else {
            return Err(Parser::error(&t, FclErrorKind::Expected("section keyword")));
        };
        match word.to_ascii_uppercase().as_str() {
            "END_FUNCTION_BLOCK" => break t,
            "VAR_INPUT" => inputs.extend(p.var_block()?),
            "VAR_OUTPUT" => outputs.extend(p.var_block()?),
            "FUZZIFY" => {
                let var = p.ident()?;
                let mut terms = Vec::new();
                while !p.at_keyword("END_FUZZIFY") {
                    p.keyword("TERM")?;
                    terms.push(p.term()?);
                }
                p.keyword("END_FUZZIFY")?;
                input_terms = Some((var, terms));
            }
            "DEFUZZIFY" => {
                let var = p.ident()?;
                let mut terms = Vec::new();
                loop {
                    let t = p.next()?;
                    let Tok::Word(w) = &t.tok else {
                        return Err(Parser::error(&t, FclErrorKind::Expected("DEFUZZIFY entry")));
                    };
                    match w.to_ascii_uppercase().as_str() {
                        "END_DEFUZZIFY" => break,
                        "TERM" => terms.push(p.term()?),
                        "METHOD" => p.setting("COG", "defuzzification method")?,
                        "DEFAULT" => {
                            p.punct(":=")?;
                            default_output = p.number()?;
                            p.punct(";")?;
                        }
                        _ => return Err(Parser::error(&t, FclErrorKind::UnknownKeyword)),
                    }
                }
                output_terms = Some((var, terms));
            }
            "RULEBLOCK" => {
                let name = p.ident()?;
                let mut list = Vec::new();
                loop {
                    let t = p.next()?;
                    let Tok::Word(w) = &t.tok else {
                        return Err(Parser::error(&t, FclErrorKind::Expected("RULEBLOCK entry")));
                    };
                    match w.to_ascii_uppercase().as_str() {
                        "END_RULEBLOCK" => break,
                        "AND" | "ACT" => p.setting("MIN", "operator")?,
                        "OR" | "ACCU" => p.setting("MAX", "operator")?,
                        "RULE" => {
                            // label: number or identifier
                            let label = p.next()?;
                            if matches!(label.tok, Tok::Punct(_)) {
                                return Err(Parser::error(&label, FclErrorKind::Expected("rule label")));
                            }
                            p.punct(":")?;
                            p.keyword("IF")?;
                            let in_var = p.ident()?;
                            p.keyword("IS")?;
                            let antecedent = p.ident()?;
                            p.keyword("THEN")?;
                            let out_var = p.ident()?;
                            p.keyword("IS")?;
                            let consequent = p.ident()?;
                            let end = p.next()?;
                            if end.tok != Tok::Punct(";") {
                                let kind = if matches!(&end.tok, Tok::Word(w) if w.eq_ignore_ascii_case("AND") || w.eq_ignore_ascii_case("OR")) {
                                    FclErrorKind::Unsupported("multi-clause rule")
                                } else {
                                    FclErrorKind::Expected(";")
                                };
                                return Err(Parser::error(&end, kind));
                            }
                            list.push(PendingRule {
                                rule: FuzzyRule {
                                    antecedent: antecedent.text,
                                    consequent: consequent.text,
                                },
                                line: t.line,
                                input_var: in_var,
                                output_var: out_var,
                            });
                        }
                        _ => return Err(Parser::error(&t, FclErrorKind::UnknownKeyword)),
                    }
                }
                rules = Some((name, list));
            }
            _ => return Err(Parser::error(&t, FclErrorKind::UnknownKeyword)),
        }
    };

    if let Some(t) = p.peek() {
        return Err(Parser::error(t, FclErrorKind::Expected("end of input")));
    }

    if inputs.len() != 1 || outputs.len() != 1 {
        return Err(Parser::error(&end, FclErrorKind::VariableCount));
    }
    let (input_var, output_var) = (inputs[0].text.clone(), outputs[0].text.clone());

    let Some((rb_name, pending)) = rules else {
        return Err(Parser::error(&end, FclErrorKind::MissingRuleblock));
    };

    let (in_tok, input_terms) = input_terms.ok_or_else(|| Parser::error(&end, FclErrorKind::Expected("FUZZIFY block")))?;
    let (out_tok, output_terms) = output_terms.ok_or_else(|| Parser::error(&end, FclErrorKind::Expected("DEFUZZIFY block")))?;
    if in_tok.text != input_var {
        return Err(Parser::error(&in_tok, FclErrorKind::UnknownVariable(in_tok.text.clone())));
    }
    if out_tok.text != output_var {
        return Err(Parser::error(&out_tok, FclErrorKind::UnknownVariable(out_tok.text.clone())));
    }

    for rule in &pending {
        let (in_var, out_var) = (&rule.input_var, &rule.output_var);
        if in_var.text != input_var {
            return Err(Parser::error(in_var, FclErrorKind::UnknownVariable(in_var.text.clone())));
        }
        if out_var.text != output_var {
            return Err(Parser::error(out_var, FclErrorKind::UnknownVariable(out_var.text.clone())));
        }
        for (name, terms) in [
            (&rule.rule.antecedent, &input_terms),
            (&rule.rule.consequent, &output_terms),
        ] {
            if !terms.iter().any(|t| &t.name == name) {
                return Err(FclError {
                    line: rule.line,
                    token: name.clone(),
                    kind: FclErrorKind::UnresolvedTerm(name.clone()),
                });
            }
        }
    }
    if pending.is_empty() {
        return Err(Parser::error(&rb_name, FclErrorKind::Invalid(FuzzyError::NoRules)));
    }

    let names = SystemNames { block, input: input_var, output: output_var };
    let rules = pending.into_iter().map(|r| r.rule).collect();
    FuzzySystem::new(names, input_terms, output_terms, rules, default_output)
        .map_err(|e| Parser::error(&end, FclErrorKind::Invalid(e)))
}

fn points(term: &Term) -> String {
    term.function
        .vertices()
        .iter()
        .map(|(x, mu)| format!("({x}, {mu})"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub(super) fn write_fcl(sys: &FuzzySystem) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("FUNCTION_BLOCK {}", sys.name));
    line(String::new());
    line("VAR_INPUT".into());
    line(format!("    {} : REAL;", sys.input_var));
    line("END_VAR".into());
    line(String::new());
    line("VAR_OUTPUT".into());
    line(format!("    {} : REAL;", sys.output_var));
    line("END_VAR".into());
    line(String::new());
    line(format!("FUZZIFY {}", sys.input_var));
    for t in &sys.input_terms {
        line(format!("    TERM {} := {};", t.name, points(t)));
    }
    line("END_FUZZIFY".into());
    line(String::new());
    line(format!("DEFUZZIFY {}", sys.output_var));
    for t in &sys.output_terms {
        line(format!("    TERM {} := {};", t.name, points(t)));
    }
    line("    METHOD : COG;".into());
    line(format!("    DEFAULT := {};", sys.default_output));
    line("END_DEFUZZIFY".into());
    line(String::new());
    line("RULEBLOCK rules".into());
    line("    AND : MIN;".into());
    line("    ACT : MIN;".into());
    line("    ACCU : MAX;".into());
    for (i, r) in sys.rules.iter().enumerate() {
        line(format!(
            "    RULE {} : IF {} IS {} THEN {} IS {};",
            i + 1,
            sys.input_var,
            r.antecedent,
            sys.output_var,
            r.consequent
        ));
    }
    line("END_RULEBLOCK".into());
    line(String::new());
    line("END_FUNCTION_BLOCK".into());
    out
}
