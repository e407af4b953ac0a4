//! Job-file lexer and parser.
//!
//! A job file declares named objects (algebras, complexes, dg-algebras,
//! schemes, witnesses) followed by exactly one `task` block. The grammar
//! is small and line-oriented-ish; see JOBFILE.md next to this crate for
//! the reference. Parsing never touches mathematics — it produces a tree
//! of blocks and entries that `build.rs` interprets.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.pos, self.msg)
    }
}

pub type PResult<T> = std::result::Result<T, ParseError>;

fn err<T>(pos: Pos, msg: impl Into<String>) -> PResult<T> {
    Err(ParseError { pos, msg: msg.into() })
}

// ---- lexer ----

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Eq,
    Semi,
    Comma,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Arrow => write!(f, "`->`"),
        }
    }
}

fn lex(src: &str) -> PResult<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = src.chars().peekable();
    macro_rules! bump {
        () => {{
            let c = it.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        }};
    }
    while let Some(&c) = it.peek() {
        let pos = Pos { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = it.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' => {
                bump!();
                out.push((Tok::LBrace, pos));
            }
            '}' => {
                bump!();
                out.push((Tok::RBrace, pos));
            }
            '[' => {
                bump!();
                out.push((Tok::LBracket, pos));
            }
            ']' => {
                bump!();
                out.push((Tok::RBracket, pos));
            }
            '(' => {
                bump!();
                out.push((Tok::LParen, pos));
            }
            ')' => {
                bump!();
                out.push((Tok::RParen, pos));
            }
            '=' => {
                bump!();
                out.push((Tok::Eq, pos));
            }
            ';' => {
                bump!();
                out.push((Tok::Semi, pos));
            }
            ',' => {
                bump!();
                out.push((Tok::Comma, pos));
            }
            '-' => {
                bump!();
                match it.peek() {
                    Some('>') => {
                        bump!();
                        out.push((Tok::Arrow, pos));
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let mut n = String::from("-");
                        while let Some(&d) = it.peek() {
                            if d.is_ascii_digit() {
                                n.push(bump!());
                            } else {
                                break;
                            }
                        }
                        let v: i64 = n
                            .parse()
                            .map_err(|_| ParseError { pos, msg: format!("integer out of range `{n}`") })?;
                        out.push((Tok::Int(v), pos));
                    }
                    _ => return err(pos, "stray `-` (did you mean `->` or a negative integer?)"),
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match it.peek() {
                        None => return err(pos, "unterminated string"),
                        Some('"') => {
                            bump!();
                            break;
                        }
                        Some('\\') => {
                            bump!();
                            match it.peek() {
                                Some('"') => {
                                    bump!();
                                    s.push('"');
                                }
                                Some('\\') => {
                                    bump!();
                                    s.push('\\');
                                }
                                Some('n') => {
                                    bump!();
                                    s.push('\n');
                                }
                                _ => return err(Pos { line, col }, "unknown escape in string"),
                            }
                        }
                        Some(_) => s.push(bump!()),
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            d if d.is_ascii_digit() => {
                let mut n = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_digit() {
                        n.push(bump!());
                    } else {
                        break;
                    }
                }
                let v: i64 =
                    n.parse().map_err(|_| ParseError { pos, msg: format!("integer out of range `{n}`") })?;
                out.push((Tok::Int(v), pos));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut s = String::new();
                while let Some(&a) = it.peek() {
                    // `-` inside identifiers covers task names like
                    // check-azumaya; the lexer already consumed any
                    // leading digits/arrows, so this is unambiguous.
                    if a.is_ascii_alphanumeric() || a == '_' || a == '-' {
                        s.push(bump!());
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            other => return err(pos, format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

// ---- syntax tree ----

#[derive(Debug, Clone)]
pub enum Value {
    Str(String),
    Int(i64),
    List(Vec<Value>),
    /// `{ x -> "expr"; y -> "expr"; }`
    Map(Vec<(String, String)>),
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    /// `d[-1] = ...` carries index Some(-1).
    pub index: Option<i64>,
    pub value: Value,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub kind: String,
    pub name: Option<String>,
    /// Parenthesized head arguments, e.g. `overlap (U, V)`.
    pub args: Vec<String>,
    pub entries: Vec<Entry>,
    pub blocks: Vec<Block>,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct JobFile {
    pub objects: Vec<Block>,
    pub task: Block,
}

// ---- parser ----

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.i).cloned();
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> PResult<Pos> {
        let pos = self.pos();
        match self.next() {
            Some((t, p)) if t == want => Ok(p),
            Some((t, p)) => err(p, format!("expected {want}, found {t}")),
            None => err(pos, format!("expected {want}, found end of file")),
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Ident(s), p)) => Ok((s, p)),
            Some((t, p)) => err(p, format!("expected identifier, found {t}")),
            None => err(pos, "expected identifier, found end of file"),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Str(s), _)) => Ok(Value::Str(s)),
            Some((Tok::Int(n), _)) => Ok(Value::Int(n)),
            Some((Tok::LBracket, _)) => {
                let mut items = Vec::new();
                if self.peek() == Some(&Tok::RBracket) {
                    self.next();
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    match self.next() {
                        Some((Tok::Comma, _)) => continue,
                        Some((Tok::RBracket, _)) => break,
                        Some((t, p)) => return err(p, format!("expected `,` or `]`, found {t}")),
                        None => return err(self.end, "unterminated list"),
                    }
                }
                Ok(Value::List(items))
            }
            Some((Tok::LBrace, _)) => {
                let mut pairs = Vec::new();
                loop {
                    match self.next() {
                        Some((Tok::RBrace, _)) => break,
                        Some((Tok::Ident(k), _)) => {
                            self.expect(Tok::Arrow)?;
                            let vpos = self.pos();
                            let v = match self.next() {
                                Some((Tok::Str(s), _)) => s,
                                Some((t, p)) => {
                                    return err(p, format!("expected string after `->`, found {t}"))
                                }
                                None => return err(vpos, "expected string after `->`"),
                            };
                            pairs.push((k, v));
                            match self.peek() {
                                Some(Tok::Semi) => {
                                    self.next();
                                }
                                Some(Tok::RBrace) => {}
                                _ => {
                                    let p = self.pos();
                                    return err(p, "expected `;` or `}` in map");
                                }
                            }
                        }
                        Some((t, p)) => return err(p, format!("expected identifier or `}}` in map, found {t}")),
                        None => return err(self.end, "unterminated map"),
                    }
                }
                Ok(Value::Map(pairs))
            }
            Some((t, p)) => err(p, format!("expected a value, found {t}")),
            None => err(pos, "expected a value, found end of file"),
        }
    }

    /// Parse the items between `{` and `}` of a block.
    fn body(&mut self, block: &mut Block) -> PResult<()> {
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.next();
                    return Ok(());
                }
                Some(Tok::Ident(_)) => {
                    let (head, hpos) = self.ident()?;
                    match self.peek() {
                        // entry: `key = value ;` or `key [idx] = value ;`
                        Some(Tok::Eq) => {
                            self.next();
                            let value = self.value()?;
                            self.expect(Tok::Semi)?;
                            block.entries.push(Entry { key: head, index: None, value, pos: hpos });
                        }
                        Some(Tok::LBracket) => {
                            self.next();
                            let ipos = self.pos();
                            let idx = match self.next() {
                                Some((Tok::Int(n), _)) => n,
                                Some((t, p)) => return err(p, format!("expected integer index, found {t}")),
                                None => return err(ipos, "expected integer index"),
                            };
                            self.expect(Tok::RBracket)?;
                            self.expect(Tok::Eq)?;
                            let value = self.value()?;
                            self.expect(Tok::Semi)?;
                            block.entries.push(Entry { key: head, index: Some(idx), value, pos: hpos });
                        }
                        // subblock: `kind name { ... }` / `kind (a, b) { ... }` / `kind { ... }`
                        Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::LBrace) => {
                            let sub = self.block_after_kind(head, hpos)?;
                            block.blocks.push(sub);
                        }
                        Some(t) => {
                            let p = self.pos();
                            return err(p, format!("expected `=`, `[`, name or `{{` after `{head}`, found {t}"));
                        }
                        None => return err(self.end, format!("unexpected end of file after `{head}`")),
                    }
                }
                Some(t) => {
                    let p = self.pos();
                    return err(p, format!("expected an entry, a block or `}}`, found {t}"));
                }
                None => return err(self.end, "unterminated block (missing `}`)"),
            }
        }
    }

    fn block_after_kind(&mut self, kind: String, pos: Pos) -> PResult<Block> {
        let mut block =
            Block { kind, name: None, args: Vec::new(), entries: Vec::new(), blocks: Vec::new(), pos };
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let (n, _) = self.ident()?;
                block.name = Some(n);
            }
            Some(Tok::LParen) => {
                self.next();
                loop {
                    let (a, _) = self.ident()?;
                    block.args.push(a);
                    match self.next() {
                        Some((Tok::Comma, _)) => continue,
                        Some((Tok::RParen, _)) => break,
                        Some((t, p)) => return err(p, format!("expected `,` or `)`, found {t}")),
                        None => return err(self.end, "unterminated argument list"),
                    }
                }
            }
            _ => {}
        }
        self.expect(Tok::LBrace)?;
        self.body(&mut block)?;
        Ok(block)
    }
}

const OBJECT_KINDS: &[&str] = &["algebra", "complex", "dgalgebra", "scheme", "witness"];

pub fn parse(src: &str) -> PResult<JobFile> {
    let (objects, task, end) = parse_loose(src)?;
    match task {
        Some(task) => Ok(JobFile { objects, task }),
        None => err(end, "job file has no task block"),
    }
}

/// Like `parse`, but a missing task block is allowed; standalone
/// certificate files are objects-plus-witness with no task.
pub fn parse_loose(src: &str) -> PResult<(Vec<Block>, Option<Block>, Pos)> {
    let toks = lex(src)?;
    let end = toks.last().map(|(_, p)| *p).unwrap_or(Pos { line: 1, col: 1 });
    let mut p = Parser { toks, i: 0, end };
    let mut objects = Vec::new();
    let mut task: Option<Block> = None;
    while p.peek().is_some() {
        let (kind, kpos) = p.ident()?;
        if kind == "task" {
            let b = p.block_after_kind(kind, kpos)?;
            if b.name.is_none() {
                return err(kpos, "task block needs a task name, e.g. `task check-azumaya { ... }`");
            }
            if task.is_some() {
                return err(kpos, "more than one task block");
            }
            task = Some(b);
        } else if OBJECT_KINDS.contains(&kind.as_str()) {
            let b = p.block_after_kind(kind, kpos)?;
            match &b.name {
                None => return err(kpos, format!("{} block needs a name", b.kind)),
                Some(n) => {
                    if objects.iter().any(|o: &Block| o.name.as_deref() == Some(n.as_str())) {
                        return err(kpos, format!("duplicate object name `{n}`"));
                    }
                }
            }
            objects.push(b);
        } else {
            return err(
                kpos,
                format!(
                    "unknown block kind `{kind}` (expected one of algebra, complex, dgalgebra, scheme, witness, task)"
                ),
            );
        }
    }
    Ok((objects, task, end))
}

// ---- typed accessors used by the builder ----

impl Value {
    pub fn as_str(&self, pos: Pos, key: &str) -> PResult<&str> {
        match self {
            Value::Str(s) => Ok(s),
            _ => err(pos, format!("`{key}` must be a string")),
        }
    }

    pub fn as_int(&self, pos: Pos, key: &str) -> PResult<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            _ => err(pos, format!("`{key}` must be an integer")),
        }
    }

    pub fn as_str_list(&self, pos: Pos, key: &str) -> PResult<Vec<String>> {
        match self {
            Value::List(items) => items
                .iter()
                .map(|v| match v {
                    Value::Str(s) => Ok(s.clone()),
                    _ => err(pos, format!("`{key}` must be a list of strings")),
                })
                .collect(),
            _ => err(pos, format!("`{key}` must be a list of strings")),
        }
    }

    pub fn as_int_list(&self, pos: Pos, key: &str) -> PResult<Vec<i64>> {
        match self {
            Value::List(items) => items
                .iter()
                .map(|v| match v {
                    Value::Int(n) => Ok(*n),
                    _ => err(pos, format!("`{key}` must be a list of integers")),
                })
                .collect(),
            _ => err(pos, format!("`{key}` must be a list of integers")),
        }
    }

    /// A matrix of polynomial expressions: list of rows of strings.
    pub fn as_mat(&self, pos: Pos, key: &str) -> PResult<Vec<Vec<String>>> {
        match self {
            Value::List(rows) => rows
                .iter()
                .map(|r| match r {
                    Value::List(_) => r.as_str_list(pos, key),
                    _ => err(pos, format!("`{key}` must be a list of rows (lists of strings)")),
                })
                .collect(),
            _ => err(pos, format!("`{key}` must be a matrix: a list of rows of strings")),
        }
    }

    pub fn as_map(&self, pos: Pos, key: &str) -> PResult<&[(String, String)]> {
        match self {
            Value::Map(pairs) => Ok(pairs),
            _ => err(pos, format!("`{key}` must be a map `{{ var -> \"expr\"; ... }}`")),
        }
    }

    /// Nested integer lists (extension-field point coordinates).
    pub fn as_int_list_list(&self, pos: Pos, key: &str) -> PResult<Vec<Vec<i64>>> {
        match self {
            Value::List(items) => items
                .iter()
                .map(|v| match v {
                    Value::List(_) => v.as_int_list(pos, key),
                    _ => err(pos, format!("`{key}` must be a list of integer lists")),
                })
                .collect(),
            _ => err(pos, format!("`{key}` must be a list of integer lists")),
        }
    }
}

impl Block {
    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key && e.index.is_none())
    }

    pub fn indexed(&self, key: &str) -> Vec<(i64, &Entry)> {
        let mut out: Vec<(i64, &Entry)> =
            self.entries.iter().filter_map(|e| e.index.map(|i| (i, e))).filter(|(_, e)| e.key == key).collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }

    pub fn req(&self, key: &str) -> PResult<&Entry> {
        self.entry(key).ok_or_else(|| ParseError {
            pos: self.pos,
            msg: format!("{} `{}` is missing the `{key}` entry", self.kind, self.name.as_deref().unwrap_or("?")),
        })
    }

    pub fn str_entry(&self, key: &str) -> PResult<Option<String>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => Ok(Some(e.value.as_str(e.pos, key)?.to_string())),
        }
    }

    pub fn req_str(&self, key: &str) -> PResult<String> {
        let e = self.req(key)?;
        Ok(e.value.as_str(e.pos, key)?.to_string())
    }

    pub fn int_entry(&self, key: &str) -> PResult<Option<i64>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => Ok(Some(e.value.as_int(e.pos, key)?)),
        }
    }

    pub fn subblocks(&self, kind: &str) -> Vec<&Block> {
        self.blocks.iter().filter(|b| b.kind == kind).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_and_parses_a_small_job() {
        let src = r#"
# A two-object job.
algebra A {
  field = "Q";
  vars = ["x", "y"];
  relations = ["x*y - 1"];
}
complex E {
  algebra = "A";
  degrees = [0, 1];
  ranks = [1, 1];
  d[0] = [["x"]];
}
task support {
  complex = "E";
}
"#;
        let f = parse(src).unwrap();
        assert_eq!(f.objects.len(), 2);
        assert_eq!(f.objects[0].kind, "algebra");
        assert_eq!(f.objects[0].name.as_deref(), Some("A"));
        assert_eq!(f.task.name.as_deref(), Some("support"));
        let e = &f.objects[1];
        assert_eq!(e.indexed("d").len(), 1);
        assert_eq!(e.req("ranks").unwrap().value.as_int_list(e.pos, "ranks").unwrap(), vec![1, 1]);
    }

    #[test]
    fn parses_scheme_blocks_with_args_and_maps() {
        let src = r#"
scheme X {
  patch U { algebra = "AU"; }
  patch V { algebra = "AV"; }
  overlap (U, V) {
    f = "t";
    map = { t -> "1/s"; };
  }
  overlap (V, U) {
    f = "s";
    map = { s -> "1/t"; };
  }
}
task cech { scheme = "X"; }
"#;
        let f = parse(src).unwrap();
        let x = &f.objects[0];
        assert_eq!(x.subblocks("patch").len(), 2);
        let ov = x.subblocks("overlap");
        assert_eq!(ov[0].args, vec!["U", "V"]);
        let m = ov[0].req("map").unwrap();
        assert_eq!(m.value.as_map(m.pos, "map").unwrap()[0].0, "t");
    }

    #[test]
    fn rejects_jobs_without_a_task() {
        let e = parse("algebra A { field = \"Q\"; vars = []; }").unwrap_err();
        assert!(e.msg.contains("no task block"), "{}", e.msg);
        let e2 = parse("").unwrap_err();
        assert!(e2.msg.contains("no task block"));
    }

    #[test]
    fn reports_positions() {
        let e = parse("task t {\n  broken\n}").unwrap_err();
        assert_eq!(e.pos.line, 3); // `}` is not a valid continuation after `broken`
    }

    #[test]
    fn negative_integers_and_indexed_entries() {
        let src = "complex E { degrees = [-2, 0]; }\ntask support { complex = \"E\"; }";
        let f = parse(src).unwrap();
        let e = f.objects[0].req("degrees").unwrap();
        assert_eq!(e.value.as_int_list(e.pos, "degrees").unwrap(), vec![-2, 0]);
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let src = "algebra A { field = \"Q\"; }\nalgebra A { field = \"Q\"; }\ntask support { }";
        assert!(parse(src).is_err());
    }
}
