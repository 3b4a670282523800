//! Line-oriented circuit text format.
//!
//! ```text
//! circuit  := line*
//! line     := stmt? comment? NEWLINE
//! stmt     := "qubits" INT | gate | meas
//! gate     := ID ( "(" SIGNED_FLOAT ")" )? qref ( "," qref )*
//! qref     := "q[" INT "]"
//! meas     := "measure" qref "->" "c[" INT "]"
//! comment  := "//" any-to-EOL
//! ```
//!
//! `ID` is one of `h x y z s sdg u1 cx`. `u1` takes one angle in radians
//! (`pi` and `-pi` are accepted literals); `cx` takes control then target.
//! `qubits N` must come before any gate. Parsing never stops at the first
//! problem: every diagnostic in the source is returned.

use std::f64::consts::PI;
use std::fmt;

use crate::circuit::Circuit;
use crate::gate::GateOp;
use crate::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub message: String,
    pub kind: DiagnosticKind,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Semantic => "semantic",
        };
        write!(f, "{}:{}: {kind} error: {}", self.span.line, self.span.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Float(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Float(x) => write!(f, "`{x}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Arrow => f.write_str("`->`"),
        }
    }
}

struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, lineno: usize, diags: &mut Vec<ParseDiagnostic>) -> Option<Vec<Spanned>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, message: String| ParseDiagnostic {
        span: SourceSpan { line: lineno, column: col },
        message,
        kind: DiagnosticKind::Syntax,
    };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '/' if chars.get(i + 1) == Some(&'/') => break,
            '(' => {
                out.push(Spanned { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, col });
                i += 1;
            }
            '[' => {
                out.push(Spanned { tok: Tok::LBracket, col });
                i += 1;
            }
            ']' => {
                out.push(Spanned { tok: Tok::RBracket, col });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, col });
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::Arrow, col });
                i += 2;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if word == "pi" {
                    out.push(Spanned { tok: Tok::Float(PI), col });
                } else {
                    out.push(Spanned { tok: Tok::Ident(word), col });
                }
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' || c == '+' => {
                let start = i;
                if c == '-' || c == '+' {
                    i += 1;
                    if chars[i..].starts_with(&['p', 'i']) && !chars.get(i + 2).is_some_and(|c| c.is_ascii_alphanumeric()) {
                        let v = if c == '-' { -PI } else { PI };
                        out.push(Spanned { tok: Tok::Float(v), col });
                        i += 2;
                        continue;
                    }
                }
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mark = i;
                    i += 1;
                    if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                        i += 1;
                    }
                    if i < chars.len() && chars[i].is_ascii_digit() {
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        i = mark;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let is_int = text.chars().all(|c| c.is_ascii_digit());
                if is_int {
                    match text.parse::<u64>() {
                        Ok(n) => out.push(Spanned { tok: Tok::Int(n), col }),
                        Err(_) => {
                            diags.push(err(col, format!("integer `{text}` is too large")));
                            return None;
                        }
                    }
                } else {
                    match text.parse::<f64>() {
                        Ok(v) if v.is_finite() => out.push(Spanned { tok: Tok::Float(v), col }),
                        _ => {
                            diags.push(err(col, format!("malformed number `{text}`")));
                            return None;
                        }
                    }
                }
            }
            other => {
                diags.push(err(col, format!("unexpected character `{other}`")));
                return None;
            }
        }
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GateName {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    U1,
    Cx,
}

impl GateName {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "h" => GateName::H,
            "x" => GateName::X,
            "y" => GateName::Y,
            "z" => GateName::Z,
            "s" => GateName::S,
            "sdg" => GateName::Sdg,
            "u1" => GateName::U1,
            "cx" => GateName::Cx,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        if self == GateName::Cx {
            2
        } else {
            1
        }
    }
}

struct LineParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

type PResult<T> = std::result::Result<T, ParseDiagnostic>;

impl<'a> LineParser<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn syntax(&self, message: String) -> ParseDiagnostic {
        ParseDiagnostic {
            span: SourceSpan { line: self.line, column: self.col() },
            message,
            kind: DiagnosticKind::Syntax,
        }
    }

    fn found(&self) -> String {
        self.toks.get(self.pos).map_or("end of line".to_string(), |t| t.tok.to_string())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}, found {}", self.found())))
        }
    }

    fn int(&mut self, what: &str) -> PResult<(u64, usize)> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                let col = self.col();
                self.pos += 1;
                Ok((n, col))
            }
            _ => Err(self.syntax(format!("expected {what}, found {}", self.found()))),
        }
    }

    /// `<reg>[INT]`; returns (index, column of the register name).
    fn reg_ref(&mut self, reg: &str) -> PResult<(u64, usize)> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) if s == reg => self.pos += 1,
            _ => return Err(self.syntax(format!("expected `{reg}[...]`, found {}", self.found()))),
        }
        self.expect(Tok::LBracket, "`[`")?;
        let (n, _) = self.int("an index")?;
        self.expect(Tok::RBracket, "`]`")?;
        Ok((n, col))
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.toks.len() {
            Err(self.syntax(format!("unexpected {} after statement", self.found())))
        } else {
            Ok(())
        }
    }
}

enum Stmt {
    Qubits(u64),
    Gate { name: String, name_col: usize, param: Option<(f64, usize)>, qrefs: Vec<(u64, usize)> },
    Measure { qubit: (u64, usize), clbit: (u64, usize) },
}

fn parse_stmt(p: &mut LineParser<'_>) -> PResult<Stmt> {
    let (word, col) = match p.peek() {
        Some(Tok::Ident(w)) => (w.clone(), p.col()),
        _ => return Err(p.syntax(format!("expected a statement, found {}", p.found()))),
    };
    p.pos += 1;
    let stmt = match word.as_str() {
        "qubits" => Stmt::Qubits(p.int("a qubit count")?.0),
        "measure" => {
            let qubit = p.reg_ref("q")?;
            p.expect(Tok::Arrow, "`->`")?;
            let clbit = p.reg_ref("c")?;
            Stmt::Measure { qubit, clbit }
        }
        _ => {
            let param = if p.peek() == Some(&Tok::LParen) {
                p.pos += 1;
                let pcol = p.col();
                let v = match p.peek() {
                    Some(Tok::Float(v)) => *v,
                    Some(Tok::Int(n)) => *n as f64,
                    _ => return Err(p.syntax(format!("expected an angle, found {}", p.found()))),
                };
                p.pos += 1;
                p.expect(Tok::RParen, "`)`")?;
                Some((v, pcol))
            } else {
                None
            };
            let mut qrefs = vec![p.reg_ref("q")?];
            while p.peek() == Some(&Tok::Comma) {
                p.pos += 1;
                qrefs.push(p.reg_ref("q")?);
            }
            Stmt::Gate { name: word, name_col: col, param, qrefs }
        }
    };
    p.finish()?;
    Ok(stmt)
}

/// Parse circuit text, returning every diagnostic on failure.
pub fn parse_circuit(source: &str) -> std::result::Result<Circuit, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let mut num_qubits: Option<usize> = None;
    let mut ops: Vec<GateOp> = Vec::new();
    let mut measured: Vec<(usize, usize, usize)> = Vec::new(); // (qubit, clbit, line)
    let mut saw_body = false;

    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let Some(toks) = lex_line(line, lineno, &mut diags) else { continue };
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser { toks: &toks, pos: 0, line: lineno, end_col: line.chars().count() + 1 };
        let stmt = match parse_stmt(&mut p) {
            Ok(s) => s,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        let sem = |column: usize, message: String| ParseDiagnostic {
            span: SourceSpan { line: lineno, column },
            message,
            kind: DiagnosticKind::Semantic,
        };
        match stmt {
            Stmt::Qubits(n) => {
                if num_qubits.is_some() {
                    diags.push(sem(1, "duplicate `qubits` declaration".into()));
                } else if saw_body {
                    diags.push(sem(1, "`qubits` must precede all gates and measurements".into()));
                } else if n == 0 || n as usize > MAX_QUBITS {
                    diags.push(sem(8.min(line.len()), format!("qubit count {n} outside 1..={MAX_QUBITS}")));
                    num_qubits = Some(MAX_QUBITS);
                } else {
                    num_qubits = Some(n as usize);
                }
            }
            Stmt::Measure { qubit: (q, qcol), clbit: (c, ccol) } => {
                saw_body = true;
                let Some(n) = num_qubits else {
                    diags.push(sem(1, "`measure` before `qubits` declaration".into()));
                    continue;
                };
                if q as usize >= n {
                    diags.push(sem(qcol, format!("q[{q}] out of range ({n} qubits)")));
                    continue;
                }
                if let Some((_, _, l)) = measured.iter().find(|m| m.1 == c as usize) {
                    diags.push(sem(ccol, format!("c[{c}] already written at line {l}")));
                    continue;
                }
                if let Some((_, _, l)) = measured.iter().find(|m| m.0 == q as usize) {
                    diags.push(sem(qcol, format!("q[{q}] already measured at line {l}")));
                    continue;
                }
                measured.push((q as usize, c as usize, lineno));
            }
            Stmt::Gate { name, name_col, param, qrefs } => {
                saw_body = true;
                let Some(kind) = GateName::parse(&name) else {
                    diags.push(sem(name_col, format!("unknown gate `{name}`")));
                    continue;
                };
                let Some(n) = num_qubits else {
                    diags.push(sem(name_col, format!("gate `{name}` before `qubits` declaration")));
                    continue;
                };
                let mut ok = true;
                match (kind, param) {
                    (GateName::U1, None) => {
                        diags.push(sem(name_col, "`u1` requires one angle parameter".into()));
                        ok = false;
                    }
                    (GateName::U1, Some(_)) => {}
                    (_, Some((_, pcol))) => {
                        diags.push(sem(pcol, format!("`{name}` takes no parameter")));
                        ok = false;
                    }
                    _ => {}
                }
                if qrefs.len() != kind.arity() {
                    diags.push(sem(
                        name_col,
                        format!("`{name}` takes {} qubit(s), got {}", kind.arity(), qrefs.len()),
                    ));
                    ok = false;
                }
                for &(q, qcol) in &qrefs {
                    if q as usize >= n {
                        diags.push(sem(qcol, format!("q[{q}] out of range ({n} qubits)")));
                        ok = false;
                    } else if let Some((_, _, l)) = measured.iter().find(|m| m.0 == q as usize) {
                        diags.push(sem(qcol, format!("`{name}` on q[{q}] after its measurement at line {l}")));
                        ok = false;
                    }
                }
                if kind == GateName::Cx && qrefs.len() == 2 && qrefs[0].0 == qrefs[1].0 {
                    diags.push(sem(qrefs[1].1, format!("`cx` control and target are both q[{}]", qrefs[0].0)));
                    ok = false;
                }
                if !ok {
                    continue;
                }
                let q0 = qrefs[0].0 as usize;
                ops.push(match kind {
                    GateName::H => GateOp::H(q0),
                    GateName::X => GateOp::X(q0),
                    GateName::Y => GateOp::Y(q0),
                    GateName::Z => GateOp::Z(q0),
                    GateName::S => GateOp::S(q0),
                    GateName::Sdg => GateOp::Sdg(q0),
                    GateName::U1 => GateOp::U1(q0, param.expect("checked").0),
                    GateName::Cx => GateOp::Cx(q0, qrefs[1].0 as usize),
                });
            }
        }
    }

    let Some(n) = num_qubits else {
        if diags.is_empty() {
            diags.push(ParseDiagnostic {
                span: SourceSpan { line: 1, column: 1 },
                message: "missing `qubits` declaration".into(),
                kind: DiagnosticKind::Semantic,
            });
        }
        return Err(diags);
    };
    if !diags.is_empty() {
        diags.sort_by_key(|d| d.span);
        return Err(diags);
    }

    let build = || -> crate::Result<Circuit> {
        let mut c = Circuit::new(n)?;
        c.extend(&ops)?;
        for (q, cb, _) in &measured {
            c.measure(*q, *cb)?;
        }
        Ok(c)
    };
    build().map_err(|e| {
        vec![ParseDiagnostic {
            span: SourceSpan { line: 1, column: 1 },
            message: e.to_string(),
            kind: DiagnosticKind::Semantic,
        }]
    })
}

/// Canonical text: one statement per line, gates then measurements.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.num_qubits());
    for op in circuit.ops() {
        out.push_str(&op.to_string());
        out.push('\n');
    }
    for m in circuit.measurements() {
        out.push_str(&format!("measure q[{}] -> c[{}]\n", m.qubit, m.clbit));
    }
    out
}
