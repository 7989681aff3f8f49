//! The declarative workspace format: line-oriented blocks declaring
//! sets, categories, functors, constructs, underlying functors,
//! emergences, batteries, diagrams, resolutions, block diagrams,
//! structure hints, and set-functor tables.
//!
//! Composition tables are ground truth: non-identity composites must be
//! written out. Identity morphisms and their forced composition rows
//! are filled in automatically unless declared (declared rows always
//! win, so broken tables stay expressible for `check` to report).
//! References resolve to earlier declarations only; files merge in
//! argument order.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use emcat_core::abd::{AbdBuilder, AbstractBlockDiagram};
use emcat_core::{
    CategoryBuilder, Construct, DiagramEmergence, Emergence, FinCategory, FinFunction, FinSet,
    Functor, GsuFunctor, GuFunctor, NaturalTransformation, OperationTable, PropertyTag,
    Resolution, SemiEmergence, SetFunctorTable, SignatureHints, SignatureSlot, SlotKind,
    StructureSignature,
};

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eq,
    Arrow,
    Colon,
    Comma,
    Sep,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str) -> PResult<Lexer> {
    let mut toks = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let bytes: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            match c {
                c if c.is_whitespace() => i += 1,
                '{' => {
                    toks.push((Tok::LBrace, lineno + 1, col));
                    i += 1;
                }
                '}' => {
                    toks.push((Tok::RBrace, lineno + 1, col));
                    i += 1;
                }
                '(' => {
                    toks.push((Tok::LParen, lineno + 1, col));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, lineno + 1, col));
                    i += 1;
                }
                '[' => {
                    toks.push((Tok::LBracket, lineno + 1, col));
                    i += 1;
                }
                ']' => {
                    toks.push((Tok::RBracket, lineno + 1, col));
                    i += 1;
                }
                '=' => {
                    toks.push((Tok::Eq, lineno + 1, col));
                    i += 1;
                }
                ':' => {
                    toks.push((Tok::Colon, lineno + 1, col));
                    i += 1;
                }
                ',' => {
                    toks.push((Tok::Comma, lineno + 1, col));
                    i += 1;
                }
                ';' => {
                    toks.push((Tok::Sep, lineno + 1, col));
                    i += 1;
                }
                '-' if i + 1 < bytes.len() && bytes[i + 1] == '>' => {
                    toks.push((Tok::Arrow, lineno + 1, col));
                    i += 2;
                }
                '"' => {
                    let mut s = String::new();
                    i += 1;
                    loop {
                        if i >= bytes.len() {
                            return Err(ParseError {
                                line: lineno + 1,
                                col,
                                message: "unterminated quoted name".into(),
                            });
                        }
                        if bytes[i] == '"' {
                            i += 1;
                            break;
                        }
                        s.push(bytes[i]);
                        i += 1;
                    }
                    toks.push((Tok::Ident(s), lineno + 1, col));
                }
                _ => {
                    let mut s = String::new();
                    while i < bytes.len() {
                        let c = bytes[i];
                        if c.is_whitespace()
                            || "{}()[]=:,;\"#".contains(c)
                            || (c == '-' && i + 1 < bytes.len() && bytes[i + 1] == '>')
                        {
                            break;
                        }
                        s.push(c);
                        i += 1;
                    }
                    toks.push((Tok::Ident(s), lineno + 1, col));
                }
            }
        }
        toks.push((Tok::Sep, lineno + 1, bytes.len() + 1));
    }
    Ok(Lexer { toks })
}

struct Cursor {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((0, 0))
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn skip_seps(&mut self) {
        while matches!(self.peek(), Some(Tok::Sep)) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<()> {
        if !matches!(want, Tok::Sep) {
            self.skip_seps();
        }
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        self.skip_seps();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    /// Idents until the next non-ident token (does not consume it).
    fn ident_list(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(Tok::Ident(s)) = self.peek() {
            out.push(s.clone());
            self.pos += 1;
        }
        out
    }

    fn at_statement_end(&mut self) -> bool {
        matches!(self.peek(), Some(Tok::Sep) | Some(Tok::RBrace) | None)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatteryDecl {
    pub emergences: Vec<String>,
    pub categories: Vec<String>,
}

/// All declarations of a workspace, in declaration order.
#[derive(Debug, Default)]
pub struct Workspace {
    pub sets: Vec<(String, FinSet)>,
    pub categories: Vec<(String, Arc<FinCategory>)>,
    pub functors: Vec<(String, Functor)>,
    pub naturals: Vec<(String, NaturalTransformation)>,
    pub constructs: Vec<(String, Arc<Construct>)>,
    pub gus: Vec<(String, GuFunctor)>,
    pub gsus: Vec<(String, GsuFunctor)>,
    pub emergences: Vec<(String, Emergence)>,
    pub semis: Vec<(String, SemiEmergence)>,
    pub batteries: Vec<(String, BatteryDecl)>,
    pub diagrams: Vec<(String, DiagramEmergence)>,
    pub resolutions: Vec<(String, Resolution)>,
    pub abds: Vec<(String, AbstractBlockDiagram)>,
    pub hints: Vec<(String, SignatureHints)>,
    pub setfunctors: Vec<(String, SetFunctorTable)>,
}

macro_rules! finder {
    ($fn_name:ident, $field:ident, $ty:ty, $kind:literal) => {
        pub fn $fn_name(&self, name: &str) -> Option<&$ty> {
            self.$field.iter().find(|(n, _)| n == name).map(|(_, v)| v)
        }
    };
}

impl Workspace {
    finder!(set, sets, FinSet, "set");
    finder!(category, categories, Arc<FinCategory>, "category");
    finder!(functor, functors, Functor, "functor");
    finder!(natural, naturals, NaturalTransformation, "natural");
    finder!(construct, constructs, Arc<Construct>, "construct");
    finder!(gu, gus, GuFunctor, "gu");
    finder!(gsu, gsus, GsuFunctor, "gsu");
    finder!(emergence, emergences, Emergence, "emergence");
    finder!(semi, semis, SemiEmergence, "semi");
    finder!(battery, batteries, BatteryDecl, "battery");
    finder!(diagram, diagrams, DiagramEmergence, "diagram");
    finder!(resolution, resolutions, Resolution, "resolution");
    finder!(abd, abds, AbstractBlockDiagram, "abd");
    finder!(hint, hints, SignatureHints, "hints");
    finder!(setfunctor, setfunctors, SetFunctorTable, "setfunctor");
}

/// Parse one or more workspace files, merged in argument order.
pub fn parse_workspace(sources: &[(String, String)]) -> PResult<Workspace> {
    let mut ws = Workspace::default();
    for (label, src) in sources {
        parse_into(&mut ws, src).map_err(|e| ParseError {
            line: e.line,
            col: e.col,
            message: format!("{label}: {}", e.message),
        })?;
    }
    Ok(ws)
}

fn check_unique(existing: &[String], name: &str, kind: &str, cur: &Cursor) -> PResult<()> {
    if existing.iter().any(|n| n == name) {
        Err(cur.err(format!("duplicate {kind} `{name}`")))
    } else {
        Ok(())
    }
}

fn parse_into(ws: &mut Workspace, src: &str) -> PResult<()> {
    let lexer = lex(src)?;
    let mut cur = Cursor {
        toks: lexer.toks,
        pos: 0,
    };
    loop {
        cur.skip_seps();
        let Some(tok) = cur.peek().cloned() else {
            break;
        };
        let Tok::Ident(kind) = tok else {
            return Err(cur.err("expected a declaration keyword"));
        };
        cur.pos += 1;
        match kind.as_str() {
            "set" => parse_set(ws, &mut cur)?,
            "category" => parse_category(ws, &mut cur)?,
            "functor" => parse_functor(ws, &mut cur)?,
            "natural" => parse_natural(ws, &mut cur)?,
            "construct" => parse_construct(ws, &mut cur)?,
            "gu" => parse_underlying(ws, &mut cur, false)?,
            "gsu" => parse_underlying(ws, &mut cur, true)?,
            "emergence" => parse_emergence(ws, &mut cur, false)?,
            "semi" => parse_emergence(ws, &mut cur, true)?,
            "battery" => parse_battery(ws, &mut cur)?,
            "diagram" => parse_diagram(ws, &mut cur)?,
            "resolution" => parse_resolution(ws, &mut cur)?,
            "abd" => parse_abd(ws, &mut cur)?,
            "hints" => parse_hints(ws, &mut cur)?,
            "setfunctor" => parse_setfunctor(ws, &mut cur)?,
            other => return Err(cur.err(format!("unknown declaration kind `{other}`"))),
        }
    }
    Ok(())
}

fn parse_braced_elems(cur: &mut Cursor) -> PResult<Vec<String>> {
    cur.expect(Tok::LBrace, "`{`")?;
    let mut out = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek() {
            Some(Tok::Ident(_)) => out.push(cur.ident("element")?),
            Some(Tok::RBrace) => {
                cur.pos += 1;
                return Ok(out);
            }
            _ => return Err(cur.err("expected element or `}`")),
        }
    }
}

fn parse_set(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("set name")?;
    check_unique(
        &ws.sets.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "set",
        cur,
    )?;
    let elems = parse_braced_elems(cur)?;
    ws.sets.push((name, FinSet::new(elems)));
    Ok(())
}

fn parse_category(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("category name")?;
    check_unique(
        &ws.categories.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "category",
        cur,
    )?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut b = CategoryBuilder::new(&name);
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "objects" => {
                        for o in cur.ident_list() {
                            b.object(o);
                        }
                    }
                    "mor" => {
                        let m = cur.ident("morphism name")?;
                        let dom = cur.ident("domain object")?;
                        let cod = cur.ident("codomain object")?;
                        b.morphism(m, dom, cod);
                    }
                    "identity" => {
                        let obj = cur.ident("object")?;
                        let m = cur.ident("identity morphism name")?;
                        b.morphism(m.clone(), obj.clone(), obj.clone());
                        b.identity(obj, m);
                    }
                    "compose" => {
                        let g = cur.ident("outer morphism")?;
                        let f = cur.ident("inner morphism")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let h = cur.ident("composite morphism")?;
                        b.compose(g, f, h);
                    }
                    other => return Err(cur.err(format!("unknown category statement `{other}`"))),
                }
                if !cur.at_statement_end() {
                    return Err(cur.err("unexpected trailing tokens in statement"));
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    b.auto_identities().fill_identity_compositions();
    let cat = b.build().map_err(|e| cur.err(e.to_string()))?;
    ws.categories.push((name, Arc::new(cat)));
    Ok(())
}

fn parse_functor(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("functor name")?;
    check_unique(
        &ws.functors.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "functor",
        cur,
    )?;
    cur.expect(Tok::Colon, "`:`")?;
    let src_name = cur.ident("source category")?;
    cur.expect(Tok::Arrow, "`->`")?;
    let tgt_name = cur.ident("target category")?;
    let src = ws
        .category(&src_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown category `{src_name}`")))?;
    let tgt = ws
        .category(&tgt_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown category `{tgt_name}`")))?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut object_map: Vec<Option<usize>> = vec![None; src.object_count()];
    let mut morphism_map: Vec<Option<usize>> = vec![None; src.morphism_count()];
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "obj" => {
                        let a = cur.ident("source object")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let b = cur.ident("target object")?;
                        let ai = src
                            .object_id(&a)
                            .ok_or_else(|| cur.err(format!("unknown object `{a}`")))?;
                        let bi = tgt
                            .object_id(&b)
                            .ok_or_else(|| cur.err(format!("unknown object `{b}`")))?;
                        object_map[ai] = Some(bi);
                    }
                    "mor" => {
                        let a = cur.ident("source morphism")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let b = cur.ident("target morphism")?;
                        let ai = src
                            .morphism_id(&a)
                            .ok_or_else(|| cur.err(format!("unknown morphism `{a}`")))?;
                        let bi = tgt
                            .morphism_id(&b)
                            .ok_or_else(|| cur.err(format!("unknown morphism `{b}`")))?;
                        morphism_map[ai] = Some(bi);
                    }
                    other => return Err(cur.err(format!("unknown functor statement `{other}`"))),
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    let object_map = object_map
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| cur.err(format!("no image for object `{}`", src.object_name(i)))))
        .collect::<PResult<Vec<_>>>()?;
    // Identities default to the identities of the object images.
    let morphism_map = morphism_map
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            Some(v) => Ok(v),
            None if src.is_identity(i) => {
                let o = src.morphism(i).dom;
                Ok(tgt.identity_of(object_map[o]))
            }
            None => Err(cur.err(format!(
                "no image for morphism `{}` (morphism map must be total)",
                src.morphism(i).name
            ))),
        })
        .collect::<PResult<Vec<_>>>()?;
    let f = Functor::new(&name, src, tgt, object_map, morphism_map)
        .map_err(|e| cur.err(e.to_string()))?;
    ws.functors.push((name, f));
    Ok(())
}

fn parse_natural(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("natural transformation name")?;
    check_unique(
        &ws.naturals.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "natural",
        cur,
    )?;
    cur.expect(Tok::Colon, "`:`")?;
    let from_name = cur.ident("source functor")?;
    cur.expect(Tok::Arrow, "`->`")?;
    let to_name = cur.ident("target functor")?;
    let from = ws
        .functor(&from_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown functor `{from_name}`")))?;
    let to = ws
        .functor(&to_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown functor `{to_name}`")))?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut components: Vec<Option<usize>> = vec![None; from.source.object_count()];
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) if kw == "at" => {
                cur.pos += 1;
                let a = cur.ident("source object")?;
                cur.expect(Tok::Eq, "`=`")?;
                let m = cur.ident("target morphism")?;
                let ai = from
                    .source
                    .object_id(&a)
                    .ok_or_else(|| cur.err(format!("unknown object `{a}`")))?;
                let mi = from
                    .target
                    .morphism_id(&m)
                    .ok_or_else(|| cur.err(format!("unknown morphism `{m}`")))?;
                components[ai] = Some(mi);
            }
            _ => return Err(cur.err("expected `at` statement or `}`")),
        }
    }
    let components = components
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                cur.err(format!(
                    "no component at object `{}`",
                    from.source.object_name(i)
                ))
            })
        })
        .collect::<PResult<Vec<_>>>()?;
    ws.naturals.push((
        name,
        NaturalTransformation {
            from,
            to,
            components,
        },
    ));
    Ok(())
}

fn parse_tags(cur: &mut Cursor) -> PResult<BTreeSet<PropertyTag>> {
    cur.expect(Tok::LBracket, "`[`")?;
    let mut tags = BTreeSet::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBracket) => {
                cur.pos += 1;
                return Ok(tags);
            }
            Some(Tok::Ident(_)) => {
                let t = cur.ident("tag")?;
                tags.insert(PropertyTag::parse(&t).map_err(|e| cur.err(e.to_string()))?);
            }
            _ => return Err(cur.err("expected tag or `]`")),
        }
    }
}

/// Rows of the form `a b = c` (internal/external tables).
fn parse_table_rows(cur: &mut Cursor) -> PResult<Vec<(String, String, String)>> {
    cur.expect(Tok::LBrace, "`{`")?;
    let mut rows = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                return Ok(rows);
            }
            Some(Tok::Ident(_)) => {
                let a = cur.ident("left argument")?;
                let b = cur.ident("right argument")?;
                cur.expect(Tok::Eq, "`=`")?;
                let c = cur.ident("result")?;
                rows.push((a, b, c));
            }
            _ => return Err(cur.err("expected row or `}`")),
        }
    }
}

/// Rows of the form `a -> b` (function tables).
fn parse_fn_rows(cur: &mut Cursor) -> PResult<Vec<(String, String)>> {
    cur.expect(Tok::LBrace, "`{`")?;
    let mut rows = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                return Ok(rows);
            }
            Some(Tok::Ident(_)) => {
                let a = cur.ident("element")?;
                cur.expect(Tok::Arrow, "`->`")?;
                let b = cur.ident("image element")?;
                rows.push((a, b));
            }
            _ => return Err(cur.err("expected row or `}`")),
        }
    }
}

struct SlotDecl {
    name: String,
    kind: SlotKind,
    tags: BTreeSet<PropertyTag>,
}

fn parse_slot(cur: &mut Cursor) -> PResult<SlotDecl> {
    let name = cur.ident("slot name")?;
    let kind_word = cur.ident("slot kind")?;
    let kind = match kind_word.as_str() {
        "internal" => SlotKind::Internal,
        "external" => {
            let scalars = parse_braced_elems(cur)?;
            SlotKind::External(FinSet::new(scalars))
        }
        other => return Err(cur.err(format!("unknown slot kind `{other}`"))),
    };
    let tags = parse_tags(cur)?;
    Ok(SlotDecl { name, kind, tags })
}

fn parse_construct(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("construct name")?;
    check_unique(
        &ws.constructs.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "construct",
        cur,
    )?;
    let on = cur.ident("`on`")?;
    if on != "on" {
        return Err(cur.err("expected `on <category>`"));
    }
    let cat_name = cur.ident("category name")?;
    let cat = ws
        .category(&cat_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown category `{cat_name}`")))?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut slots: Vec<SlotDecl> = Vec::new();
    let mut carriers: Vec<Option<FinSet>> = vec![None; cat.object_count()];
    let mut tables: Vec<Vec<Option<(BTreeSet<PropertyTag>, Vec<(String, String, String)>)>>> =
        vec![Vec::new(); cat.object_count()];
    let mut underlying_rows: Vec<Option<Vec<(String, String)>>> =
        vec![None; cat.morphism_count()];
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "slot" => {
                        let s = parse_slot(cur)?;
                        for t in tables.iter_mut() {
                            t.push(None);
                        }
                        slots.push(s);
                    }
                    "carrier" => {
                        let obj = cur.ident("object")?;
                        let oi = cat
                            .object_id(&obj)
                            .ok_or_else(|| cur.err(format!("unknown object `{obj}`")))?;
                        carriers[oi] = Some(FinSet::new(parse_braced_elems(cur)?));
                    }
                    "table" => {
                        let obj = cur.ident("object")?;
                        let slot = cur.ident("slot name")?;
                        let oi = cat
                            .object_id(&obj)
                            .ok_or_else(|| cur.err(format!("unknown object `{obj}`")))?;
                        let si = slots
                            .iter()
                            .position(|s| s.name == slot)
                            .ok_or_else(|| cur.err(format!("unknown slot `{slot}`")))?;
                        let rows = parse_table_rows(cur)?;
                        tables[oi][si] = Some((slots[si].tags.clone(), rows));
                    }
                    "underlying" => {
                        let m = cur.ident("morphism")?;
                        let mi = cat
                            .morphism_id(&m)
                            .ok_or_else(|| cur.err(format!("unknown morphism `{m}`")))?;
                        underlying_rows[mi] = Some(parse_fn_rows(cur)?);
                    }
                    other => {
                        return Err(cur.err(format!("unknown construct statement `{other}`")))
                    }
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    let carriers = carriers
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| cur.err(format!("no carrier for object `{}`", cat.object_name(i))))
        })
        .collect::<PResult<Vec<_>>>()?;
    let signature = StructureSignature::new(
        slots
            .iter()
            .map(|s| SignatureSlot {
                name: s.name.clone(),
                kind: s.kind.clone(),
                tags: s.tags.clone(),
            })
            .collect(),
    )
    .map_err(|e| cur.err(e.to_string()))?;
    let mut structure = Vec::with_capacity(cat.object_count());
    for (oi, per_slot) in tables.into_iter().enumerate() {
        let mut ts = Vec::with_capacity(slots.len());
        for (si, entry) in per_slot.into_iter().enumerate() {
            let (tags, rows) = entry.ok_or_else(|| {
                cur.err(format!(
                    "no table for slot `{}` on object `{}`",
                    slots[si].name,
                    cat.object_name(oi)
                ))
            })?;
            let table = match &slots[si].kind {
                SlotKind::Internal => OperationTable::internal_from_rows(
                    carriers[oi].clone(),
                    rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
                    tags,
                ),
                SlotKind::External(scalars) => OperationTable::external_from_rows(
                    scalars.clone(),
                    carriers[oi].clone(),
                    rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
                    tags,
                ),
            }
            .map_err(|e| cur.err(e.to_string()))?;
            ts.push(table);
        }
        structure.push(ts);
    }
    let underlying = underlying_rows
        .into_iter()
        .enumerate()
        .map(|(mi, v)| {
            let mor = cat.morphism(mi);
            match v {
                Some(rows) => FinFunction::from_pairs(
                    carriers[mor.dom].clone(),
                    carriers[mor.cod].clone(),
                    rows.iter().map(|(a, b)| (a.as_str(), b.as_str())),
                )
                .map_err(|e| cur.err(e.to_string())),
                None if cat.is_identity(mi) => Ok(FinFunction::identity(&carriers[mor.dom])),
                None => Err(cur.err(format!(
                    "no underlying rows for morphism `{}`",
                    mor.name
                ))),
            }
        })
        .collect::<PResult<Vec<_>>>()?;
    let construct = Construct::new(&name, cat, signature, carriers, structure, underlying)
        .map_err(|e| cur.err(e.to_string()))?;
    ws.constructs.push((name, Arc::new(construct)));
    Ok(())
}

fn parse_underlying(ws: &mut Workspace, cur: &mut Cursor, semi: bool) -> PResult<()> {
    let name = cur.ident("functor name")?;
    let kind = if semi { "gsu" } else { "gu" };
    let names: Vec<String> = if semi {
        ws.gsus.iter().map(|(n, _)| n.clone()).collect()
    } else {
        ws.gus.iter().map(|(n, _)| n.clone()).collect()
    };
    check_unique(&names, &name, kind, cur)?;
    let on = cur.ident("`on`")?;
    if on != "on" {
        return Err(cur.err("expected `on <construct>`"));
    }
    let c_name = cur.ident("construct name")?;
    let construct = ws
        .construct(&c_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown construct `{c_name}`")))?;
    let cat = construct.category.clone();
    cur.expect(Tok::LBrace, "`{`")?;
    let mut object_sets: Vec<Option<FinSet>> = vec![None; cat.object_count()];
    let mut fn_rows: Vec<Option<Vec<(String, String)>>> = vec![None; cat.morphism_count()];
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "obj" if semi => {
                        let o = cur.ident("object")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let oi = cat
                            .object_id(&o)
                            .ok_or_else(|| cur.err(format!("unknown object `{o}`")))?;
                        object_sets[oi] = Some(FinSet::new(parse_braced_elems(cur)?));
                    }
                    "mor" => {
                        let m = cur.ident("morphism")?;
                        let mi = cat
                            .morphism_id(&m)
                            .ok_or_else(|| cur.err(format!("unknown morphism `{m}`")))?;
                        fn_rows[mi] = Some(parse_fn_rows(cur)?);
                    }
                    other => {
                        return Err(cur.err(format!("unknown {kind} statement `{other}`")))
                    }
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    let object_sets: Vec<FinSet> = object_sets
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.unwrap_or_else(|| construct.carrier(i).clone()))
        .collect();
    let assignment = fn_rows
        .into_iter()
        .enumerate()
        .map(|(mi, v)| {
            let mor = cat.morphism(mi);
            match v {
                Some(rows) => FinFunction::from_pairs(
                    object_sets[mor.dom].clone(),
                    object_sets[mor.cod].clone(),
                    rows.iter().map(|(a, b)| (a.as_str(), b.as_str())),
                )
                .map_err(|e| cur.err(e.to_string())),
                None if cat.is_identity(mi) => {
                    Ok(FinFunction::identity(&object_sets[mor.dom]))
                }
                None => {
                    // Default to the construct's underlying function when
                    // it typechecks against the object assignment.
                    let f = construct.underlying(mi).clone();
                    if f.domain() == &object_sets[mor.dom] && f.codomain() == &object_sets[mor.cod]
                    {
                        Ok(f)
                    } else {
                        Err(cur.err(format!(
                            "no rows for morphism `{}` and the standard function does not typecheck",
                            mor.name
                        )))
                    }
                }
            }
        })
        .collect::<PResult<Vec<_>>>()?;
    if semi {
        let gsu = GsuFunctor::new(construct, object_sets, assignment)
            .map_err(|e| cur.err(e.to_string()))?;
        ws.gsus.push((name, gsu));
    } else {
        let gu = GuFunctor::new(construct, assignment).map_err(|e| cur.err(e.to_string()))?;
        ws.gus.push((name, gu));
    }
    Ok(())
}

fn parse_emergence(ws: &mut Workspace, cur: &mut Cursor, semi: bool) -> PResult<()> {
    let name = cur.ident("emergence name")?;
    let names: Vec<String> = if semi {
        ws.semis.iter().map(|(n, _)| n.clone()).collect()
    } else {
        ws.emergences.iter().map(|(n, _)| n.clone()).collect()
    };
    check_unique(&names, &name, if semi { "semi" } else { "emergence" }, cur)?;
    cur.expect(Tok::Eq, "`=`")?;
    cur.expect(Tok::LParen, "`(`")?;
    let c_name = cur.ident("construct name")?;
    cur.expect(Tok::Comma, "`,`")?;
    let u_name = cur.ident("underlying functor name (or `standard`)")?;
    cur.expect(Tok::RParen, "`)`")?;
    let construct = ws
        .construct(&c_name)
        .cloned()
        .ok_or_else(|| cur.err(format!("unknown construct `{c_name}`")))?;
    if semi {
        let gsu = if u_name == "standard" {
            GsuFunctor::from(GuFunctor::standard(construct.clone()))
        } else {
            ws.gsu(&u_name)
                .cloned()
                .ok_or_else(|| cur.err(format!("unknown gsu functor `{u_name}`")))?
        };
        let e = SemiEmergence::new(&name, construct, gsu).map_err(|e| cur.err(e.to_string()))?;
        ws.semis.push((name, e));
    } else {
        let gu = if u_name == "standard" {
            GuFunctor::standard(construct.clone())
        } else {
            ws.gu(&u_name)
                .cloned()
                .ok_or_else(|| cur.err(format!("unknown gu functor `{u_name}`")))?
        };
        let e = Emergence::new(&name, construct, gu).map_err(|e| cur.err(e.to_string()))?;
        ws.emergences.push((name, e));
    }
    Ok(())
}

fn parse_battery(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("battery name")?;
    check_unique(
        &ws.batteries.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "battery",
        cur,
    )?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut decl = BatteryDecl::default();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "emergences" => {
                        for e in cur.ident_list() {
                            if ws.emergence(&e).is_none() {
                                return Err(cur.err(format!("unknown emergence `{e}`")));
                            }
                            decl.emergences.push(e);
                        }
                    }
                    "categories" => {
                        for c in cur.ident_list() {
                            if ws.category(&c).is_none() {
                                return Err(cur.err(format!("unknown category `{c}`")));
                            }
                            decl.categories.push(c);
                        }
                    }
                    other => return Err(cur.err(format!("unknown battery statement `{other}`"))),
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    ws.batteries.push((name, decl));
    Ok(())
}

fn parse_diagram(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("diagram name")?;
    check_unique(
        &ws.diagrams.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "diagram",
        cur,
    )?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut scheme: Option<Arc<FinCategory>> = None;
    let mut node_names: Vec<(String, String)> = Vec::new();
    let mut edge_names: Vec<(String, String)> = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "scheme" => {
                        let s = cur.ident("scheme category")?;
                        scheme = Some(
                            ws.category(&s)
                                .cloned()
                                .ok_or_else(|| cur.err(format!("unknown category `{s}`")))?,
                        );
                    }
                    "node" => {
                        let n = cur.ident("scheme object")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let e = cur.ident("emergence name")?;
                        node_names.push((n, e));
                    }
                    "edge" => {
                        let d = cur.ident("scheme morphism")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let f = cur.ident("functor name")?;
                        edge_names.push((d, f));
                    }
                    other => return Err(cur.err(format!("unknown diagram statement `{other}`"))),
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    let scheme = scheme.ok_or_else(|| cur.err("diagram needs a `scheme` statement"))?;
    let mut nodes: Vec<Option<Emergence>> = vec![None; scheme.object_count()];
    for (n, e) in &node_names {
        let oi = scheme
            .object_id(n)
            .ok_or_else(|| cur.err(format!("unknown scheme object `{n}`")))?;
        nodes[oi] = Some(
            ws.emergence(e)
                .cloned()
                .ok_or_else(|| cur.err(format!("unknown emergence `{e}`")))?,
        );
    }
    let nodes = nodes
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| cur.err(format!("no node for scheme object `{}`", scheme.object_name(i))))
        })
        .collect::<PResult<Vec<_>>>()?;
    let mut edges: Vec<Option<Functor>> = vec![None; scheme.morphism_count()];
    for (d, f) in &edge_names {
        let mi = scheme
            .morphism_id(d)
            .ok_or_else(|| cur.err(format!("unknown scheme morphism `{d}`")))?;
        edges[mi] = Some(
            ws.functor(f)
                .cloned()
                .ok_or_else(|| cur.err(format!("unknown functor `{f}`")))?,
        );
    }
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(mi, v)| match v {
            Some(v) => Ok(v),
            None if scheme.is_identity(mi) => {
                let o = scheme.morphism(mi).dom;
                Ok(Functor::identity(nodes[o].category().clone()))
            }
            None => Err(cur.err(format!(
                "no edge for scheme morphism `{}`",
                scheme.morphism(mi).name
            ))),
        })
        .collect::<PResult<Vec<_>>>()?;
    let d = DiagramEmergence::new(scheme, nodes, edges).map_err(|e| cur.err(e.to_string()))?;
    ws.diagrams.push((name, d));
    Ok(())
}

/// Rows of the form `a b = c d` (tuple-to-tuple component rows).
fn parse_component_rows(
    cur: &mut Cursor,
    n_in: usize,
    n_out: usize,
) -> PResult<Vec<(Vec<String>, Vec<String>)>> {
    cur.expect(Tok::LBrace, "`{`")?;
    let mut rows = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                return Ok(rows);
            }
            // Zero-input rows start directly at `=`.
            Some(Tok::Ident(_)) | Some(Tok::Eq) => {
                let mut ins = Vec::with_capacity(n_in);
                for _ in 0..n_in {
                    ins.push(cur.ident("input element")?);
                }
                cur.expect(Tok::Eq, "`=`")?;
                let mut outs = Vec::with_capacity(n_out);
                for _ in 0..n_out {
                    outs.push(cur.ident("output element")?);
                }
                rows.push((ins, outs));
            }
            _ => return Err(cur.err("expected row or `}`")),
        }
    }
}

fn parse_port_list(cur: &mut Cursor) -> PResult<Vec<String>> {
    cur.expect(Tok::LParen, "`(`")?;
    let mut out = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RParen) => {
                cur.pos += 1;
                return Ok(out);
            }
            Some(Tok::Ident(_)) => out.push(cur.ident("port")?),
            _ => return Err(cur.err("expected port or `)`")),
        }
    }
}

fn parse_parts_block(
    cur: &mut Cursor,
    port_kw: &str,
    part_kw: &str,
) -> PResult<(Vec<(String, FinSet)>, Vec<(String, Vec<String>, Vec<String>, Vec<(Vec<String>, Vec<String>)>)>)> {
    cur.expect(Tok::LBrace, "`{`")?;
    let mut ports: Vec<(String, FinSet)> = Vec::new();
    let mut parts = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                return Ok((ports, parts));
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                if kw == port_kw {
                    let p = cur.ident("port name")?;
                    ports.push((p, FinSet::new(parse_braced_elems(cur)?)));
                } else if kw == part_kw {
                    let c = cur.ident("component name")?;
                    let in_kw = cur.ident("`in`")?;
                    if in_kw != "in" {
                        return Err(cur.err("expected `in (ports...)`"));
                    }
                    let ins = parse_port_list(cur)?;
                    let out_kw = cur.ident("`out`")?;
                    if out_kw != "out" {
                        return Err(cur.err("expected `out (ports...)`"));
                    }
                    let outs = parse_port_list(cur)?;
                    let rows = parse_component_rows(cur, ins.len(), outs.len())?;
                    parts.push((c, ins, outs, rows));
                } else {
                    return Err(cur.err(format!("unknown statement `{kw}`")));
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
}

fn parse_resolution(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("resolution name")?;
    check_unique(
        &ws.resolutions.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "resolution",
        cur,
    )?;
    let (signals, parts) = parse_parts_block(cur, "signal", "part")?;
    ws.resolutions.push((
        name.clone(),
        Resolution {
            name,
            signals,
            parts,
        },
    ));
    Ok(())
}

fn parse_abd(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("abd name")?;
    check_unique(
        &ws.abds.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "abd",
        cur,
    )?;
    let (ports, components) = parse_parts_block(cur, "port", "component")?;
    let abd = AbdBuilder {
        name: name.clone(),
        ports,
        components,
    }
    .build()
    .map_err(|e| cur.err(e.to_string()))?;
    ws.abds.push((name, abd));
    Ok(())
}

fn parse_hints(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("hints name")?;
    check_unique(
        &ws.hints.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "hints",
        cur,
    )?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut slots: Vec<SlotDecl> = Vec::new();
    let mut raw_tables: Vec<(String, String, Vec<(String, String, String)>)> = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "slot" => slots.push(parse_slot(cur)?),
                    "table" => {
                        let port = cur.ident("port name")?;
                        let slot = cur.ident("slot name")?;
                        let rows = parse_table_rows(cur)?;
                        raw_tables.push((port, slot, rows));
                    }
                    other => return Err(cur.err(format!("unknown hints statement `{other}`"))),
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    // Tables are grouped per port; the carrier is inferred from the rows.
    let mut per_port: Vec<(String, Vec<Option<Vec<(String, String, String)>>>)> = Vec::new();
    for (port, slot, rows) in raw_tables {
        let si = slots
            .iter()
            .position(|s| s.name == slot)
            .ok_or_else(|| cur.err(format!("unknown slot `{slot}`")))?;
        let entry = match per_port.iter_mut().find(|(p, _)| p == &port) {
            Some(e) => e,
            None => {
                per_port.push((port.clone(), vec![None; slots.len()]));
                per_port.last_mut().unwrap()
            }
        };
        entry.1[si] = Some(rows);
    }
    let mut tables = Vec::new();
    for (port, per_slot) in per_port {
        let mut ts = Vec::with_capacity(slots.len());
        for (si, rows) in per_slot.into_iter().enumerate() {
            let rows = rows.ok_or_else(|| {
                cur.err(format!(
                    "hints for port `{port}` missing a table for slot `{}`",
                    slots[si].name
                ))
            })?;
            let carrier = FinSet::new(
                rows.iter()
                    .flat_map(|(a, b, c)| [a.clone(), b.clone(), c.clone()]),
            );
            let table = match &slots[si].kind {
                SlotKind::Internal => OperationTable::internal_from_rows(
                    carrier,
                    rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
                    slots[si].tags.clone(),
                ),
                SlotKind::External(scalars) => {
                    let carrier = FinSet::new(
                        rows.iter().flat_map(|(_, b, c)| [b.clone(), c.clone()]),
                    );
                    OperationTable::external_from_rows(
                        scalars.clone(),
                        carrier,
                        rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
                        slots[si].tags.clone(),
                    )
                }
            }
            .map_err(|e| cur.err(e.to_string()))?;
            ts.push(table);
        }
        tables.push((port, ts));
    }
    ws.hints.push((
        name,
        SignatureHints {
            slots: slots
                .into_iter()
                .map(|s| SignatureSlot {
                    name: s.name,
                    kind: s.kind,
                    tags: s.tags,
                })
                .collect(),
            tables,
        },
    ));
    Ok(())
}

fn parse_setfunctor(ws: &mut Workspace, cur: &mut Cursor) -> PResult<()> {
    let name = cur.ident("setfunctor name")?;
    check_unique(
        &ws.setfunctors.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        &name,
        "setfunctor",
        cur,
    )?;
    cur.expect(Tok::LBrace, "`{`")?;
    let mut universe: Option<FinSet> = None;
    let mut nodes: Vec<(String, FinSet)> = Vec::new();
    let mut assignment: Vec<(String, FinSet)> = Vec::new();
    let mut arrows: Vec<(String, String, String, Vec<(String, String)>)> = Vec::new();
    let mut images: Vec<(String, Vec<(String, String)>)> = Vec::new();
    let mut products: Vec<(String, String, String)> = Vec::new();
    loop {
        cur.skip_seps();
        match cur.peek().cloned() {
            Some(Tok::RBrace) => {
                cur.pos += 1;
                break;
            }
            Some(Tok::Ident(kw)) => {
                cur.pos += 1;
                match kw.as_str() {
                    "universe" => universe = Some(FinSet::new(parse_braced_elems(cur)?)),
                    "node" => {
                        let n = cur.ident("node name")?;
                        nodes.push((n, FinSet::new(parse_braced_elems(cur)?)));
                    }
                    "assign" => {
                        let n = cur.ident("node name")?;
                        assignment.push((n, FinSet::new(parse_braced_elems(cur)?)));
                    }
                    "arrow" => {
                        let m = cur.ident("arrow name")?;
                        let a = cur.ident("domain node")?;
                        let b = cur.ident("codomain node")?;
                        arrows.push((m, a, b, parse_fn_rows(cur)?));
                    }
                    "image" => {
                        let m = cur.ident("arrow name")?;
                        images.push((m, parse_fn_rows(cur)?));
                    }
                    "product" => {
                        let a = cur.ident("left node")?;
                        let b = cur.ident("right node")?;
                        cur.expect(Tok::Eq, "`=`")?;
                        let k = cur.ident("product node")?;
                        products.push((a, b, k));
                    }
                    other => {
                        return Err(cur.err(format!("unknown setfunctor statement `{other}`")))
                    }
                }
            }
            _ => return Err(cur.err("expected statement or `}`")),
        }
    }
    let universe = universe.ok_or_else(|| cur.err("setfunctor needs a `universe`"))?;
    let node_index = |n: &str| nodes.iter().position(|(m, _)| m == n);
    let mut assigned: Vec<Option<FinSet>> = vec![None; nodes.len()];
    for (n, s) in assignment {
        let i = node_index(&n).ok_or_else(|| cur.err(format!("unknown node `{n}`")))?;
        assigned[i] = Some(s);
    }
    let assigned = assigned
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| cur.err(format!("node `{}` has no assignment", nodes[i].0))))
        .collect::<PResult<Vec<_>>>()?;
    let mut actions = Vec::new();
    for (m, a, b, rows) in arrows {
        let ai = node_index(&a).ok_or_else(|| cur.err(format!("unknown node `{a}`")))?;
        let bi = node_index(&b).ok_or_else(|| cur.err(format!("unknown node `{b}`")))?;
        let f = FinFunction::from_pairs(
            nodes[ai].1.clone(),
            nodes[bi].1.clone(),
            rows.iter().map(|(x, y)| (x.as_str(), y.as_str())),
        )
        .map_err(|e| cur.err(e.to_string()))?;
        let img_rows = images
            .iter()
            .find(|(n, _)| n == &m)
            .ok_or_else(|| cur.err(format!("arrow `{m}` has no `image` block")))?;
        let tf = FinFunction::from_pairs(
            assigned[ai].clone(),
            assigned[bi].clone(),
            img_rows.1.iter().map(|(x, y)| (x.as_str(), y.as_str())),
        )
        .map_err(|e| cur.err(e.to_string()))?;
        actions.push((m, f, tf));
    }
    let products = products
        .into_iter()
        .map(|(a, b, k)| {
            Ok((
                node_index(&a).ok_or_else(|| cur.err(format!("unknown node `{a}`")))?,
                node_index(&b).ok_or_else(|| cur.err(format!("unknown node `{b}`")))?,
                node_index(&k).ok_or_else(|| cur.err(format!("unknown node `{k}`")))?,
            ))
        })
        .collect::<PResult<Vec<_>>>()?;
    ws.setfunctors.push((
        name.clone(),
        SetFunctorTable {
            name,
            universe,
            nodes,
            assignment: assigned,
            actions,
            products,
        },
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn quote(name: &str) -> String {
    let safe = !name.is_empty()
        && name.chars().all(|c| {
            c.is_alphanumeric() || "_.@+*'/!?%~^|<>-×⊎∘→π⁻¹ι".contains(c)
        })
        && !name.contains("->");
    if safe {
        name.to_string()
    } else {
        format!("\"{name}\"")
    }
}

fn set_body(s: &FinSet) -> String {
    let elems: Vec<String> = s.iter().map(quote).collect();
    format!("{{ {} }}", elems.join(" "))
}

pub fn serialize_category(cat: &FinCategory) -> String {
    let mut out = format!("category {} {{\n", quote(&cat.name));
    let _ = writeln!(
        out,
        "  objects {}",
        cat.objects().iter().map(|o| quote(o)).collect::<Vec<_>>().join(" ")
    );
    // Morphisms in declaration order; identity statements both declare
    // the morphism and mark it, so re-parsing preserves the order.
    for m in cat.morphism_ids() {
        let mor = cat.morphism(m);
        if cat.is_identity(m) {
            let _ = writeln!(
                out,
                "  identity {} {}",
                quote(cat.object_name(mor.dom)),
                quote(&mor.name)
            );
        } else {
            let _ = writeln!(
                out,
                "  mor {} {} {}",
                quote(&mor.name),
                quote(cat.object_name(mor.dom)),
                quote(cat.object_name(mor.cod))
            );
        }
    }
    for g in cat.morphism_ids() {
        for f in cat.morphism_ids() {
            if let Some(h) = cat.compose(g, f) {
                // Identity-law rows that are auto-filled are omitted.
                let forced = (cat.is_identity(g) && h == f) || (cat.is_identity(f) && h == g);
                if !forced {
                    let _ = writeln!(
                        out,
                        "  compose {} {} = {}",
                        quote(&cat.morphism(g).name),
                        quote(&cat.morphism(f).name),
                        quote(&cat.morphism(h).name)
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn serialize_functor(name: &str, f: &Functor) -> String {
    let mut out = format!(
        "functor {} : {} -> {} {{\n",
        quote(name),
        quote(&f.source.name),
        quote(&f.target.name)
    );
    for o in 0..f.source.object_count() {
        let _ = writeln!(
            out,
            "  obj {} = {}",
            quote(f.source.object_name(o)),
            quote(f.target.object_name(f.on_object(o)))
        );
    }
    for m in f.source.morphism_ids() {
        if f.source.is_identity(m) {
            continue;
        }
        let _ = writeln!(
            out,
            "  mor {} = {}",
            quote(&f.source.morphism(m).name),
            quote(&f.target.morphism(f.on_morphism(m)).name)
        );
    }
    out.push_str("}\n");
    out
}

fn tags_body(tags: &BTreeSet<PropertyTag>) -> String {
    let ts: Vec<String> = tags.iter().map(|t| t.to_string()).collect();
    format!("[{}]", ts.join(" "))
}

pub fn serialize_construct(c: &Construct) -> String {
    let cat = &c.category;
    let mut out = serialize_category(cat);
    let _ = writeln!(out, "construct {} on {} {{", quote(&c.name), quote(&cat.name));
    for slot in &c.signature.slots {
        match &slot.kind {
            SlotKind::Internal => {
                let _ = writeln!(
                    out,
                    "  slot {} internal {}",
                    quote(&slot.name),
                    tags_body(&slot.tags)
                );
            }
            SlotKind::External(scalars) => {
                let _ = writeln!(
                    out,
                    "  slot {} external {} {}",
                    quote(&slot.name),
                    set_body(scalars),
                    tags_body(&slot.tags)
                );
            }
        }
    }
    for o in 0..cat.object_count() {
        let _ = writeln!(
            out,
            "  carrier {} {}",
            quote(cat.object_name(o)),
            set_body(c.carrier(o))
        );
    }
    for o in 0..cat.object_count() {
        for (slot, table) in c.signature.slots.iter().zip(c.tables(o)) {
            let rows: Vec<String> = table
                .rows()
                .iter()
                .map(|(a, b, r)| format!("{} {} = {}", quote(a), quote(b), quote(r)))
                .collect();
            let _ = writeln!(
                out,
                "  table {} {} {{ {} }}",
                quote(cat.object_name(o)),
                quote(&slot.name),
                rows.join(" ; ")
            );
        }
    }
    for m in cat.morphism_ids() {
        if cat.is_identity(m) {
            continue;
        }
        let f = c.underlying(m);
        let rows: Vec<String> = f
            .domain()
            .iter()
            .map(|e| format!("{} -> {}", quote(e), quote(f.apply(e).unwrap())))
            .collect();
        let _ = writeln!(
            out,
            "  underlying {} {{ {} }}",
            quote(&cat.morphism(m).name),
            rows.join(" ; ")
        );
    }
    out.push_str("}\n");
    out
}

pub fn serialize_emergence(e: &Emergence) -> String {
    let mut out = serialize_construct(&e.construct);
    let standard = e.gu.assignment() == e.construct.underlying_all();
    if standard {
        let _ = writeln!(
            out,
            "emergence {} = ( {} , standard )",
            quote(&e.name),
            quote(&e.construct.name)
        );
    } else {
        let gu_name = format!("{}-gu", e.name);
        let _ = writeln!(out, "gu {} on {} {{", quote(&gu_name), quote(&e.construct.name));
        for m in e.category().morphism_ids() {
            if e.category().is_identity(m) {
                continue;
            }
            let f = e.gu.on_morphism(m);
            let rows: Vec<String> = f
                .domain()
                .iter()
                .map(|x| format!("{} -> {}", quote(x), quote(f.apply(x).unwrap())))
                .collect();
            let _ = writeln!(
                out,
                "  mor {} {{ {} }}",
                quote(&e.category().morphism(m).name),
                rows.join(" ; ")
            );
        }
        out.push_str("}\n");
        let _ = writeln!(
            out,
            "emergence {} = ( {} , {} )",
            quote(&e.name),
            quote(&e.construct.name),
            quote(&gu_name)
        );
    }
    out
}

pub fn serialize_abd(abd: &AbstractBlockDiagram) -> String {
    let mut out = format!("abd {} {{\n", quote(&abd.name));
    for p in &abd.ports {
        let _ = writeln!(out, "  port {} {}", quote(&p.name), set_body(&p.set));
    }
    for c in &abd.components {
        let ins: Vec<String> = c.inputs.iter().map(|&p| quote(&abd.ports[p].name)).collect();
        let outs: Vec<String> = c.outputs.iter().map(|&p| quote(&abd.ports[p].name)).collect();
        let rows: Vec<String> = c
            .rows(&abd.ports)
            .iter()
            .map(|(i, o)| {
                format!(
                    "{} = {}",
                    i.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" "),
                    o.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" ")
                )
            })
            .collect();
        let _ = writeln!(
            out,
            "  component {} in ( {} ) out ( {} ) {{ {} }}",
            quote(&c.name),
            ins.join(" "),
            outs.join(" "),
            rows.join(" ; ")
        );
    }
    out.push_str("}\n");
    out
}

/// Canonical text for a whole workspace, in declaration order.
pub fn serialize_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (name, s) in &ws.sets {
        let _ = writeln!(out, "set {} {}", quote(name), set_body(s));
    }
    for (_, c) in &ws.categories {
        out.push_str(&serialize_category(c));
    }
    for (name, f) in &ws.functors {
        out.push_str(&serialize_functor(name, f));
    }
    for (name, t) in &ws.naturals {
        let mut s = format!(
            "natural {} : {} -> {} {{\n",
            quote(name),
            quote(&t.from.name),
            quote(&t.to.name)
        );
        for (o, &c) in t.components.iter().enumerate() {
            let _ = writeln!(
                s,
                "  at {} = {}",
                quote(t.from.source.object_name(o)),
                quote(&t.from.target.morphism(c).name)
            );
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (_, c) in &ws.constructs {
        // Skip the category re-emission: it already appears above.
        let full = serialize_construct(c);
        let marker = format!("construct {} on", quote(&c.name));
        if let Some(idx) = full.find(&marker) {
            out.push_str(&full[idx..]);
        }
    }
    for (name, gu) in &ws.gus {
        let mut s = format!("gu {} on {} {{\n", quote(name), quote(&gu.construct.name));
        let cat = &gu.construct.category;
        for m in cat.morphism_ids() {
            if cat.is_identity(m) {
                continue;
            }
            let f = gu.on_morphism(m);
            let rows: Vec<String> = f
                .domain()
                .iter()
                .map(|x| format!("{} -> {}", quote(x), quote(f.apply(x).unwrap())))
                .collect();
            let _ = writeln!(s, "  mor {} {{ {} }}", quote(&cat.morphism(m).name), rows.join(" ; "));
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (name, gsu) in &ws.gsus {
        let mut s = format!("gsu {} on {} {{\n", quote(name), quote(&gsu.construct.name));
        let cat = &gsu.construct.category;
        for o in 0..cat.object_count() {
            let _ = writeln!(
                s,
                "  obj {} = {}",
                quote(cat.object_name(o)),
                set_body(gsu.object_set(o))
            );
        }
        for m in cat.morphism_ids() {
            if cat.is_identity(m) {
                continue;
            }
            let f = gsu.on_morphism(m);
            let rows: Vec<String> = f
                .domain()
                .iter()
                .map(|x| format!("{} -> {}", quote(x), quote(f.apply(x).unwrap())))
                .collect();
            let _ = writeln!(s, "  mor {} {{ {} }}", quote(&cat.morphism(m).name), rows.join(" ; "));
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (name, e) in &ws.emergences {
        let standard = e.gu.assignment() == e.construct.underlying_all();
        let u = if standard {
            "standard".to_string()
        } else {
            // Emergences referencing a named gu keep the reference only if
            // one matches; otherwise the assignment was inline.
            ws.gus
                .iter()
                .find(|(_, g)| g.construct.name == e.construct.name && g.assignment() == e.gu.assignment())
                .map(|(n, _)| quote(n))
                .unwrap_or_else(|| "standard".to_string())
        };
        let _ = writeln!(
            out,
            "emergence {} = ( {} , {} )",
            quote(name),
            quote(&e.construct.name),
            u
        );
    }
    for (name, e) in &ws.semis {
        let u = ws
            .gsus
            .iter()
            .find(|(_, g)| g.construct.name == e.construct.name && g.assignment() == e.gsu.assignment())
            .map(|(n, _)| quote(n))
            .unwrap_or_else(|| "standard".to_string());
        let _ = writeln!(out, "semi {} = ( {} , {} )", quote(name), quote(&e.construct.name), u);
    }
    for (name, b) in &ws.batteries {
        let mut s = format!("battery {} {{\n", quote(name));
        if !b.emergences.is_empty() {
            let _ = writeln!(
                s,
                "  emergences {}",
                b.emergences.iter().map(|e| quote(e)).collect::<Vec<_>>().join(" ")
            );
        }
        if !b.categories.is_empty() {
            let _ = writeln!(
                s,
                "  categories {}",
                b.categories.iter().map(|c| quote(c)).collect::<Vec<_>>().join(" ")
            );
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (name, d) in &ws.diagrams {
        let mut s = format!("diagram {} {{\n", quote(name));
        let _ = writeln!(s, "  scheme {}", quote(&d.scheme.name));
        for (o, node) in d.nodes.iter().enumerate() {
            let e_name = ws
                .emergences
                .iter()
                .find(|(_, e)| *e == *node)
                .map(|(n, _)| n.clone())
                .unwrap_or_else(|| node.name.clone());
            let _ = writeln!(s, "  node {} = {}", quote(d.scheme.object_name(o)), quote(&e_name));
        }
        for m in d.scheme.morphism_ids() {
            if d.scheme.is_identity(m) {
                continue;
            }
            let f_name = ws
                .functors
                .iter()
                .find(|(_, f)| *f == d.edges[m])
                .map(|(n, _)| n.clone())
                .unwrap_or_else(|| d.edges[m].name.clone());
            let _ = writeln!(s, "  edge {} = {}", quote(&d.scheme.morphism(m).name), quote(&f_name));
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (name, r) in &ws.resolutions {
        let mut s = format!("resolution {} {{\n", quote(name));
        for (sig, set) in &r.signals {
            let _ = writeln!(s, "  signal {} {}", quote(sig), set_body(set));
        }
        for (c, ins, outs, rows) in &r.parts {
            let row_text: Vec<String> = rows
                .iter()
                .map(|(i, o)| {
                    format!(
                        "{} = {}",
                        i.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" "),
                        o.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" ")
                    )
                })
                .collect();
            let _ = writeln!(
                s,
                "  part {} in ( {} ) out ( {} ) {{ {} }}",
                quote(c),
                ins.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" "),
                outs.iter().map(|x| quote(x)).collect::<Vec<_>>().join(" "),
                row_text.join(" ; ")
            );
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (_, abd) in &ws.abds {
        out.push_str(&serialize_abd(abd));
    }
    for (name, h) in &ws.hints {
        let mut s = format!("hints {} {{\n", quote(name));
        for slot in &h.slots {
            match &slot.kind {
                SlotKind::Internal => {
                    let _ = writeln!(s, "  slot {} internal {}", quote(&slot.name), tags_body(&slot.tags));
                }
                SlotKind::External(scalars) => {
                    let _ = writeln!(
                        s,
                        "  slot {} external {} {}",
                        quote(&slot.name),
                        set_body(scalars),
                        tags_body(&slot.tags)
                    );
                }
            }
        }
        for (port, tables) in &h.tables {
            for (slot, table) in h.slots.iter().zip(tables) {
                let rows: Vec<String> = table
                    .rows()
                    .iter()
                    .map(|(a, b, c)| format!("{} {} = {}", quote(a), quote(b), quote(c)))
                    .collect();
                let _ = writeln!(
                    s,
                    "  table {} {} {{ {} }}",
                    quote(port),
                    quote(&slot.name),
                    rows.join(" ; ")
                );
            }
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    for (name, t) in &ws.setfunctors {
        let mut s = format!("setfunctor {} {{\n", quote(name));
        let _ = writeln!(s, "  universe {}", set_body(&t.universe));
        for (n, set) in &t.nodes {
            let _ = writeln!(s, "  node {} {}", quote(n), set_body(set));
        }
        for ((n, _), a) in t.nodes.iter().zip(t.assignment.iter()) {
            let _ = writeln!(s, "  assign {} {}", quote(n), set_body(a));
        }
        for (m, f, tf) in &t.actions {
            let dom = t.node_of_set(f.domain()).map(|i| t.nodes[i].0.clone()).unwrap_or_default();
            let cod = t
                .node_of_set(f.codomain())
                .map(|i| t.nodes[i].0.clone())
                .unwrap_or_default();
            let rows: Vec<String> = f
                .domain()
                .iter()
                .map(|x| format!("{} -> {}", quote(x), quote(f.apply(x).unwrap())))
                .collect();
            let _ = writeln!(
                s,
                "  arrow {} {} {} {{ {} }}",
                quote(m),
                quote(&dom),
                quote(&cod),
                rows.join(" ; ")
            );
            let rows: Vec<String> = tf
                .domain()
                .iter()
                .map(|x| format!("{} -> {}", quote(x), quote(tf.apply(x).unwrap())))
                .collect();
            let _ = writeln!(s, "  image {} {{ {} }}", quote(m), rows.join(" ; "));
        }
        for (i, j, k) in &t.products {
            let _ = writeln!(
                s,
                "  product {} {} = {}",
                quote(&t.nodes[*i].0),
                quote(&t.nodes[*j].0),
                quote(&t.nodes[*k].0)
            );
        }
        s.push_str("}\n");
        out.push_str(&s);
    }
    out
}
