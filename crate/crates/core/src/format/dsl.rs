//! Recursive-descent parser for the case DSL.

use crate::measures::{ElicitField, Elicitation, Judgment, QualitativeLevel};
use crate::model::{
    BlockKind, BlockMode, BlockNode, ClaimNode, ClaimRole, DefeaterNode, DefeaterStatus,
    EvidenceNode, Exactness, Node, NodeId, SubcaseRef,
};
use crate::validity::Assessment;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseDiagnostic, Pos, RawCase, Severity, SourceMap};

type PResult<T> = Result<T, (String, Pos)>;

pub(crate) fn parse(file: &str, text: &str) -> Result<RawCase, Vec<ParseDiagnostic>> {
    let error = |message: String, pos: Pos| {
        vec![ParseDiagnostic {
            severity: Severity::Error,
            message,
            span: pos.with_file(file),
        }]
    };
    let tokens = tokenize(text).map_err(|e| error(e.message, e.pos))?;
    let mut p = Parser {
        tokens,
        at: 0,
        source: SourceMap::new(file),
        decls: Vec::new(),
        warnings: Vec::new(),
    };
    match p.case() {
        Ok(title) => Ok(RawCase {
            title,
            decls: p.decls,
            source: p.source,
            warnings: p.warnings,
        }),
        Err((message, pos)) => Err(error(message, pos)),
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    source: SourceMap,
    decls: Vec<Node>,
    warnings: Vec<ParseDiagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        let t = self.peek();
        Err((
            format!("expected {wanted}, found {}", t.tok.describe()),
            t.pos,
        ))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if self.peek().tok == tok {
            Ok(self.next().pos)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.peek().tok {
            Tok::Word(w) => Some(w),
            _ => None,
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        if self.peek_word() == Some(kw) {
            Ok(self.next().pos)
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_word() == Some(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn word(&mut self, wanted: &str) -> PResult<(String, Pos)> {
        match self.peek().tok.clone() {
            Tok::Word(w) => Ok((w, self.next().pos)),
            _ => self.unexpected(wanted),
        }
    }

    fn id(&mut self) -> PResult<(NodeId, Pos)> {
        let (w, pos) = self.word("a node id")?;
        match NodeId::new(w) {
            Ok(id) => Ok((id, pos)),
            Err(e) => Err((e.to_string(), pos)),
        }
    }

    fn reference(&mut self, from: &NodeId) -> PResult<NodeId> {
        let (id, pos) = self.id()?;
        self.source.reference(from, &id, pos);
        Ok(id)
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.next();
                Ok(s)
            }
            _ => self.unexpected("a string"),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek().tok {
            Tok::Num(n) => {
                self.next();
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn boolean(&mut self) -> PResult<bool> {
        match self.peek_word() {
            Some("true") => {
                self.next();
                Ok(true)
            }
            Some("false") => {
                self.next();
                Ok(false)
            }
            _ => self.unexpected("`true` or `false`"),
        }
    }

    /// Header span: from the item keyword to the end of its id.
    fn declare(&mut self, id: &NodeId, start: Pos, id_pos: Pos) {
        let length = if start.line == id_pos.line {
            id_pos.column + id_pos.length - start.column
        } else {
            start.length
        };
        self.source.declare(
            id,
            Pos {
                line: start.line,
                column: start.column,
                length,
            },
        );
    }

    fn case(&mut self) -> PResult<String> {
        let start = self.keyword("case")?;
        self.source.set_case(start);
        let title = self.string()?;
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            self.item()?;
        }
        if self.peek().tok != Tok::Eof {
            return self.unexpected("end of input (one case per file)");
        }
        Ok(title)
    }

    fn item(&mut self) -> PResult<()> {
        let start = self.peek().pos;
        let (kw, _) = match self.peek_word() {
            Some(_) => self.word("an item")?,
            None => return self.unexpected("`claim`, `assumption`, `residual`, `evidence`, `block`, `defeater`, `subcase` or `}`"),
        };
        match kw.as_str() {
            "claim" => self.claim(start),
            "assumption" => self.assumption(start),
            "residual" => self.residual(start),
            "evidence" => self.evidence(start),
            "block" => self.block(start),
            "defeater" => self.defeater(start),
            "subcase" => self.subcase(start),
            other => Err((
                format!("unknown item `{other}`; expected claim, assumption, residual, evidence, block, defeater or subcase"),
                start,
            )),
        }
    }

    fn claim(&mut self, start: Pos) -> PResult<()> {
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let text = self.string()?;
        let mut role = ClaimRole::Ordinary;
        let mut justification = None;
        loop {
            let pos = self.peek().pos;
            match self.peek_word() {
                Some(r @ ("top" | "side")) => {
                    let r = if r == "top" {
                        ClaimRole::Top
                    } else {
                        ClaimRole::Side
                    };
                    self.next();
                    if role != ClaimRole::Ordinary {
                        return Err(("a claim takes at most one of `top` and `side`".into(), pos));
                    }
                    role = r;
                }
                Some("justification") => {
                    self.next();
                    if justification.is_some() {
                        return Err(("`justification` given twice".into(), pos));
                    }
                    justification = Some(self.string()?);
                }
                _ => break,
            }
        }
        self.eat(&Tok::Semi);
        self.decls.push(Node::Claim(ClaimNode {
            id,
            text,
            role,
            justification,
        }));
        Ok(())
    }

    fn assumption(&mut self, start: Pos) -> PResult<()> {
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let text = self.string()?;
        self.keyword("prob")?;
        let prob = self.number()?;
        let justification = if self.eat_keyword("justification") {
            Some(self.string()?)
        } else {
            None
        };
        self.eat(&Tok::Semi);
        self.decls.push(Node::Claim(ClaimNode {
            id,
            text,
            role: ClaimRole::Assumption { prob },
            justification,
        }));
        Ok(())
    }

    fn residual(&mut self, start: Pos) -> PResult<()> {
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let text = self.string()?;
        self.keyword("likelihood")?;
        let likelihood = self.number()?;
        self.keyword("consequence")?;
        let consequence = self.number()?;
        let class = if self.eat_keyword("class") {
            Some(self.string()?)
        } else {
            None
        };
        self.eat(&Tok::Semi);
        self.decls.push(Node::Claim(ClaimNode {
            id,
            text,
            role: ClaimRole::ResidualDoubt {
                likelihood,
                consequence,
                class,
            },
            justification: None,
        }));
        Ok(())
    }

    /// `{ field value ; ... }` with each field at most once, in any order.
    fn fields(
        &mut self,
        allowed: &[&str],
        mut each: impl FnMut(&mut Self, &str) -> PResult<()>,
    ) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        let mut seen: Vec<String> = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let pos = self.peek().pos;
            let (w, _) = match self.peek_word() {
                Some(_) => self.word("a field")?,
                None => return self.unexpected(&format!("one of {} or `}}`", quote_list(allowed))),
            };
            if !allowed.contains(&w.as_str()) {
                return Err((
                    format!(
                        "unknown field `{w}`; expected one of {}",
                        quote_list(allowed)
                    ),
                    pos,
                ));
            }
            if seen.contains(&w) {
                return Err((format!("field `{w}` given twice"), pos));
            }
            each(self, &w)?;
            seen.push(w);
        }
        Ok(())
    }

    fn evidence(&mut self, start: Pos) -> PResult<()> {
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let mut description = None;
        let mut assembly = None;
        let mut posterior = None;
        let mut accepted = true;
        let mut elicitation = None;
        let mut elicit_pos = Pos::default();
        let brace = self.peek().pos;
        self.fields(
            &["description", "assembly", "posterior", "accepted", "elicit"],
            |p, f| {
                match f {
                    "description" => description = Some(p.string()?),
                    "assembly" => assembly = Some(p.string()?),
                    "posterior" => posterior = Some(p.number()?),
                    "accepted" => accepted = p.boolean()?,
                    _ => {
                        elicit_pos = p.peek().pos;
                        elicitation = Some(p.elicit()?);
                        p.eat(&Tok::Semi);
                        return Ok(());
                    }
                }
                p.expect(Tok::Semi).map(|_| ())
            },
        )?;
        let description =
            description.ok_or_else(|| (format!("evidence `{id}` needs a `description`"), brace))?;
        let assembly =
            assembly.ok_or_else(|| (format!("evidence `{id}` needs an `assembly`"), brace))?;
        if assembly.trim().is_empty() {
            return Err((
                format!("evidence `{id}` has an empty assembly reference"),
                brace,
            ));
        }
        let elicited = elicitation
            .as_ref()
            .and_then(|e: &Elicitation| e.posterior)
            .map(Judgment::probability);
        if let (Some(p), Some(q)) = (posterior, elicited) {
            if (p - q).abs() > 1e-12 {
                self.warnings.push(ParseDiagnostic {
                    severity: Severity::Warning,
                    message: format!(
                        "evidence `{id}`: posterior {p} differs from elicited posterior {q}; the declared posterior is used for confidence"
                    ),
                    span: elicit_pos.with_file(self.source.file()),
                });
            }
        }
        self.decls.push(Node::Evidence(EvidenceNode {
            id,
            description,
            assembly,
            accepted,
            posterior,
            elicitation,
        }));
        Ok(())
    }

    fn elicit(&mut self) -> PResult<Elicitation> {
        let mut e = Elicitation::default();
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let (w, pos) = self.word("an elicitation field or `}`")?;
            let field = ElicitField::from_keyword(&w).ok_or_else(|| {
                (
                    format!("unknown elicitation field `{w}`; expected prior, posterior, likelihood, likelihood_not or marginal"),
                    pos,
                )
            })?;
            if e.get(field).is_some() {
                return Err((format!("elicitation field `{w}` given twice"), pos));
            }
            let value = match self.peek().tok.clone() {
                Tok::Num(n) => {
                    self.next();
                    Judgment::Numeric(n)
                }
                Tok::Word(level) => {
                    let lpos = self.next().pos;
                    Judgment::Qualitative(QualitativeLevel::from_keyword(&level).ok_or_else(|| {
                        (
                            format!("unknown level `{level}`; expected certain, very_confident, confident, neutral, surprised or very_surprised"),
                            lpos,
                        )
                    })?)
                }
                _ => return self.unexpected("a number or qualitative level"),
            };
            e.set(field, Some(value));
            while self.eat(&Tok::Semi) {}
        }
        Ok(e)
    }

    fn block(&mut self, start: Pos) -> PResult<()> {
        let (kind_word, kind_pos) = self.word("a block kind")?;
        let kind = BlockKind::from_keyword(&kind_word).ok_or_else(|| {
            (
                format!("unknown block kind `{kind_word}`; expected decomposition, substitution, concretion, calculation or incorporation"),
                kind_pos,
            )
        })?;
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let mut parent = None;
        let mut mode = BlockMode::Conjunctive;
        let mut side = None;
        let mut subs = Vec::new();
        let mut justification = None;
        let brace = self.peek().pos;
        let me = id.clone();
        self.fields(
            &["parent", "mode", "side", "sub", "justification"],
            |p, f| {
                match f {
                    "parent" => parent = Some(p.reference(&me)?),
                    "mode" => {
                        let (m, pos) = p.word("`conjunctive` or `disjunctive`")?;
                        mode = match m.as_str() {
                            "conjunctive" => BlockMode::Conjunctive,
                            "disjunctive" => BlockMode::Disjunctive,
                            _ => {
                                return Err((
                                    format!(
                                        "unknown mode `{m}`; expected conjunctive or disjunctive"
                                    ),
                                    pos,
                                ))
                            }
                        };
                    }
                    "side" => side = Some(p.reference(&me)?),
                    "sub" => {
                        subs.push(p.reference(&me)?);
                        while p.eat(&Tok::Comma) {
                            subs.push(p.reference(&me)?);
                        }
                    }
                    _ => justification = Some(p.string()?),
                }
                p.expect(Tok::Semi).map(|_| ())
            },
        )?;
        let parent = parent.ok_or_else(|| (format!("block `{id}` needs a `parent`"), brace))?;
        if subs.is_empty() {
            return Err((format!("block `{id}` needs a `sub` list"), brace));
        }
        let justification = justification
            .ok_or_else(|| (format!("block `{id}` needs a `justification`"), brace))?;
        self.decls.push(Node::Block(BlockNode {
            id,
            kind,
            mode,
            parent,
            subclaims: subs,
            sideclaim: side,
            justification,
        }));
        Ok(())
    }

    fn defeater(&mut self, start: Pos) -> PResult<()> {
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let (ex, ex_pos) = self.word("`exploratory` or `exact`")?;
        let exactness = match ex.as_str() {
            "exploratory" => Exactness::Exploratory,
            "exact" => Exactness::Exact,
            _ => {
                return Err((
                    format!("expected `exploratory` or `exact`, found `{ex}`"),
                    ex_pos,
                ))
            }
        };
        let mut target = None;
        let mut claim = String::new();
        let mut status = DefeaterStatus::Doubt;
        let mut narrative = None;
        let brace = self.peek().pos;
        let me = id.clone();
        self.fields(&["targets", "claim", "status", "narrative"], |p, f| {
            match f {
                "targets" => target = Some(p.reference(&me)?),
                "claim" => claim = p.string()?,
                "status" => {
                    let (s, pos) = p.word("a defeater status")?;
                    status = DefeaterStatus::from_keyword(&s).ok_or_else(|| {
                        (
                            format!("unknown status `{s}`; expected doubt, investigating, sustained, refuted, addressed or residual"),
                            pos,
                        )
                    })?;
                }
                _ => narrative = Some(p.string()?),
            }
            p.expect(Tok::Semi).map(|_| ())
        })?;
        let target = target.ok_or_else(|| (format!("defeater `{id}` needs `targets`"), brace))?;
        self.decls.push(Node::Defeater(DefeaterNode {
            id,
            claim,
            target,
            exactness,
            status,
            narrative,
        }));
        Ok(())
    }

    fn subcase(&mut self, start: Pos) -> PResult<()> {
        let (id, id_pos) = self.id()?;
        self.declare(&id, start, id_pos);
        let text = self.string()?;
        let external = if self.eat_keyword("external") {
            Some(self.string()?)
        } else {
            None
        };
        let assessed = if self.eat_keyword("assessed") {
            let (w, pos) = self.word("`true`, `false` or `unsupported`")?;
            Some(Assessment::from_keyword(&w).ok_or_else(|| {
                (
                    format!("expected `true`, `false` or `unsupported`, found `{w}`"),
                    pos,
                )
            })?)
        } else {
            None
        };
        self.eat(&Tok::Semi);
        self.decls.push(Node::Subcase(SubcaseRef {
            id,
            text,
            external,
            assessed,
        }));
        Ok(())
    }
}

fn quote_list(words: &[&str]) -> String {
    words
        .iter()
        .map(|w| format!("`{w}`"))
        .collect::<Vec<_>>()
        .join(", ")
}
