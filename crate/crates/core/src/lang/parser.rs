use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::{ParseError, Span, MAX_INPUT_BYTES};
use crate::linalg::ComplexScalar;
use crate::quantum::{ConfigKind, OutcomeLabel};

pub const KEYWORDS: &[&str] = &[
    "system",
    "dim",
    "structure",
    "over",
    "builtin",
    "config",
    "bridge",
    "physical",
    "epistemic",
    "via",
    "statement",
    "yields",
    "compose",
    "using",
    "joint",
    "projective",
    "povm",
];

const DECL_KEYWORDS: &[&str] = &["system", "structure", "config", "bridge", "statement"];
const MAX_ERRORS: usize = 64;
const MAX_NESTING: usize = 32;
const MAX_TUPLE_DEPTH: usize = 8;

/// Marker for "an error was recorded; unwind to the next declaration".
struct Abort;

type PResult<T> = Result<T, Abort>;

/// Parses scenario source text.
///
/// Syntax errors are collected per declaration: after an error the parser
/// skips to the next declaration keyword and keeps going, so one pass
/// reports every broken declaration.
pub fn parse(src: &str) -> Result<Scenario, Vec<ParseError>> {
    if src.len() > MAX_INPUT_BYTES {
        return Err(vec![ParseError::syntax(
            format!("input is {} bytes; the limit is {MAX_INPUT_BYTES}", src.len()),
            Span { start: 0, end: 0, line: 1, col: 1, len: 0 },
            Vec::new(),
        )]);
    }
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, pos: 0, errors: Vec::new(), depth: 0, seen: BTreeMap::new() };
    let scenario = p.scenario();
    if p.errors.is_empty() {
        Ok(scenario)
    } else {
        Err(p.errors)
    }
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
    depth: usize,
    /// (namespace, id) pairs already declared
    seen: BTreeMap<(&'static str, String), Span>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == kw)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn fail<T>(&mut self, expected: &[&str]) -> PResult<T> {
        let tok = self.peek().clone();
        let message = match expected {
            [] => format!("unexpected {}", tok.kind.describe()),
            [one] => format!("expected {one}, found {}", tok.kind.describe()),
            many => format!("expected one of {}, found {}", many.join(", "), tok.kind.describe()),
        };
        self.error_at(message, tok.span, expected);
        Err(Abort)
    }

    fn error_at(&mut self, message: String, span: Span, expected: &[&str]) {
        if self.errors.len() < MAX_ERRORS {
            self.errors.push(ParseError::syntax(message, span, expected.iter().map(|s| s.to_string()).collect()));
        }
    }

    fn keyword(&mut self, kw: &'static str) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.advance().span)
        } else {
            let e = format!("`{kw}`");
            self.fail(&[e.as_str()])
        }
    }

    fn punct(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.advance().span)
        } else {
            let e = format!("`{}`", kind.symbol());
            self.fail(&[e.as_str()])
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::Ident(s) if !KEYWORDS.contains(&s.as_str()) && s != "_" => {
                let name = s.clone();
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            TokenKind::Ident(s) => {
                let msg = format!("expected identifier, found reserved word `{s}`");
                let span = self.peek().span;
                self.error_at(msg, span, &["identifier"]);
                Err(Abort)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn declare(&mut self, ns: &'static str, id: &Ident) {
        let key = (ns, id.name.clone());
        if let Some(first) = self.seen.get(&key).copied() {
            if self.errors.len() < MAX_ERRORS {
                self.errors.push(ParseError::duplicate(
                    format!("duplicate {ns} `{}` (first declared at {}:{})", id.name, first.line, first.col),
                    id.span,
                ));
            }
        } else {
            self.seen.insert(key, id.span);
        }
    }

    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.advance();
        }
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()) => return,
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn scenario(&mut self) -> Scenario {
        let mut sc = Scenario::default();
        while !self.at(&TokenKind::Eof) {
            if self.errors.len() >= MAX_ERRORS {
                break;
            }
            let start = self.pos;
            self.depth = 0;
            let r = match &self.peek().kind {
                TokenKind::Ident(s) => match s.as_str() {
                    "system" => self.system().map(|d| sc.systems.push(d)),
                    "structure" => self.structure().map(|d| sc.structures.push(d)),
                    "config" => self.config().map(|d| sc.configurations.push(d)),
                    "bridge" => self.bridge().map(|d| sc.bridges.push(d)),
                    "statement" => self.statement().map(|d| sc.statements.push(d)),
                    _ => self.fail(DECL_EXPECTED),
                },
                _ => self.fail(DECL_EXPECTED),
            };
            if r.is_err() {
                self.recover(start);
            }
        }
        sc
    }

    fn system(&mut self) -> PResult<SystemDecl> {
        let start = self.keyword("system")?;
        let id = self.ident()?;
        self.keyword("dim")?;
        let dim = self.positive_int()?;
        let mut factors = Vec::new();
        if self.at(&TokenKind::Eq) {
            self.advance();
            factors.push(self.ident()?);
            while self.at_keyword("x") && matches!(self.peek_at(1).kind, TokenKind::Ident(_)) {
                self.advance();
                factors.push(self.ident()?);
            }
            if factors.len() < 2 {
                return self.fail(&["`x`"]);
            }
        }
        self.declare("system", &id);
        Ok(SystemDecl { id, dim, factors, span: start.to(self.prev_span(), self.src) })
    }

    fn positive_int(&mut self) -> PResult<usize> {
        let tok = self.peek().clone();
        if let TokenKind::Number(text) = &tok.kind {
            if text.bytes().all(|b| b.is_ascii_digit()) {
                match text.parse::<usize>() {
                    Ok(n) if n > 0 => {
                        self.advance();
                        return Ok(n);
                    }
                    _ => {
                        self.error_at(
                            format!("dimension `{text}` is not a positive integer in range"),
                            tok.span,
                            &["positive integer"],
                        );
                        return Err(Abort);
                    }
                }
            }
        }
        self.fail(&["positive integer"])
    }

    fn structure(&mut self) -> PResult<StructureDecl> {
        let start = self.keyword("structure")?;
        let id = self.ident()?;
        self.keyword("over")?;
        let over = self.ident()?;
        let source = if self.at_keyword("builtin") {
            self.advance();
            let name = self.ident()?;
            let args = if self.at(&TokenKind::LParen) { self.args()? } else { Vec::new() };
            StructureSource::Builtin(BuiltinCall { name, args })
        } else if self.at(&TokenKind::LBracket) {
            if matches!(self.peek_at(1).kind, TokenKind::LBracket) {
                StructureSource::Matrix(self.matrix()?)
            } else {
                StructureSource::Vector(self.vector()?)
            }
        } else {
            return self.fail(&["`builtin`", "`[`"]);
        };
        self.declare("structure", &id);
        Ok(StructureDecl { id, over, source, span: start.to(self.prev_span(), self.src) })
    }

    fn config(&mut self) -> PResult<ConfigDecl> {
        let start = self.keyword("config")?;
        let id = self.ident()?;
        self.keyword("over")?;
        let over = self.ident()?;
        let source = if self.at_keyword("builtin") {
            self.advance();
            let name = self.ident()?;
            let args = self.args()?;
            ConfigSource::Builtin(BuiltinCall { name, args })
        } else {
            let kind = if self.at_keyword("povm") {
                self.advance();
                ConfigKind::Povm
            } else {
                if self.at_keyword("projective") {
                    self.advance();
                }
                ConfigKind::Projective
            };
            if !self.at(&TokenKind::LBrace) {
                return self.fail(&["`builtin`", "`projective`", "`povm`", "`{`"]);
            }
            self.advance();
            let mut effects = Vec::new();
            while !self.at(&TokenKind::RBrace) {
                let row_start = self.peek().span;
                let label = self.outcome(0)?;
                self.punct(TokenKind::Colon)?;
                let matrix = self.matrix()?;
                effects.push(EffectRow { label, matrix, span: row_start.to(self.prev_span(), self.src) });
            }
            if effects.is_empty() {
                return self.fail(&["outcome label"]);
            }
            self.advance();
            ConfigSource::Table { kind, effects }
        };
        self.declare("config", &id);
        Ok(ConfigDecl { id, over, source, span: start.to(self.prev_span(), self.src) })
    }

    fn bridge(&mut self) -> PResult<BridgeDecl> {
        let start = self.keyword("bridge")?;
        let id = self.ident()?;
        let kind = if self.at_keyword("physical") {
            BridgeKind::Physical
        } else if self.at_keyword("epistemic") {
            BridgeKind::Epistemic
        } else {
            return self.fail(&["`physical`", "`epistemic`"]);
        };
        self.advance();
        self.keyword("via")?;
        let config = self.ident()?;
        self.punct(TokenKind::LBrace)?;
        let mut maps = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            let m_start = self.punct(TokenKind::LParen)?;
            let mut key = vec![self.pattern()?];
            while self.at(&TokenKind::Comma) {
                self.advance();
                key.push(self.pattern()?);
            }
            self.punct(TokenKind::RParen)?;
            self.punct(TokenKind::Arrow)?;
            let target = self.outcome(0)?;
            maps.push(BridgeMapping { key, target, span: m_start.to(self.prev_span(), self.src) });
        }
        self.advance();
        self.declare("bridge", &id);
        Ok(BridgeDecl { id, kind, config, maps, span: start.to(self.prev_span(), self.src) })
    }

    fn pattern(&mut self) -> PResult<OutcomePattern> {
        if matches!(&self.peek().kind, TokenKind::Ident(s) if s == "_") {
            self.advance();
            return Ok(OutcomePattern::Any);
        }
        Ok(OutcomePattern::Label(self.outcome(0)?))
    }

    fn outcome(&mut self, depth: usize) -> PResult<OutcomeLabel> {
        if self.at(&TokenKind::LParen) {
            if depth >= MAX_TUPLE_DEPTH {
                let span = self.peek().span;
                self.error_at("outcome tuple nested too deeply".into(), span, &[]);
                return Err(Abort);
            }
            self.advance();
            let mut items = vec![self.outcome(depth + 1)?];
            while self.at(&TokenKind::Comma) {
                self.advance();
                items.push(self.outcome(depth + 1)?);
            }
            self.punct(TokenKind::RParen)?;
            Ok(OutcomeLabel::Tuple(items))
        } else if matches!(self.peek().kind, TokenKind::Ident(_)) {
            Ok(OutcomeLabel::Atom(self.ident()?.name))
        } else {
            self.fail(&["outcome label"])
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let start = self.keyword("statement")?;
        let id = self.ident()?;
        self.punct(TokenKind::LBrace)?;
        let claim = self.claim(false)?;
        self.punct(TokenKind::RBrace)?;
        self.declare("statement", &id);
        Ok(Statement { id, claim, span: start.to(self.prev_span(), self.src) })
    }

    fn claim(&mut self, in_compose: bool) -> PResult<Claim> {
        let start = self.peek().span;
        if self.at_keyword("yields") {
            self.advance();
            self.punct(TokenKind::LParen)?;
            let subject = self.subject()?;
            let config = if self.at(&TokenKind::Comma) {
                self.advance();
                Some(self.ident()?)
            } else {
                None
            };
            self.punct(TokenKind::RParen)?;
            self.punct(TokenKind::Eq)?;
            let o_start = self.peek().span;
            let label = self.outcome(0)?;
            let outcome = OutcomeRef { label, span: o_start.to(self.prev_span(), self.src) };
            Ok(Claim {
                kind: ClaimKind::Yields { subject, config, outcome },
                span: start.to(self.prev_span(), self.src),
            })
        } else if self.at_keyword("compose") {
            if self.depth >= MAX_NESTING {
                self.error_at(format!("compose nested deeper than {MAX_NESTING}"), start, &[]);
                return Err(Abort);
            }
            self.depth += 1;
            self.advance();
            self.punct(TokenKind::LBrace)?;
            let mut children = Vec::new();
            while !self.at(&TokenKind::RBrace) {
                children.push(self.claim(true)?);
            }
            let close = self.advance().span;
            if children.len() < 2 {
                self.error_at(
                    "compose needs at least two claims".into(),
                    start.to(close, self.src),
                    &["`yields`", "`compose`"],
                );
                return Err(Abort);
            }
            let bridge = if self.at_keyword("using") {
                self.advance();
                Some(self.ident()?)
            } else {
                None
            };
            self.depth -= 1;
            Ok(Claim { kind: ClaimKind::Compose { children, bridge }, span: start.to(self.prev_span(), self.src) })
        } else if self.at_keyword("joint") && !in_compose {
            self.advance();
            self.punct(TokenKind::LParen)?;
            let subject = self.subject()?;
            self.punct(TokenKind::Comma)?;
            let first = self.ident()?;
            self.punct(TokenKind::Comma)?;
            let second = self.ident()?;
            self.punct(TokenKind::RParen)?;
            Ok(Claim { kind: ClaimKind::Joint { subject, first, second }, span: start.to(self.prev_span(), self.src) })
        } else if in_compose {
            if self.at_keyword("joint") {
                self.error_at("a joint request cannot appear inside compose".into(), start, &["`yields`", "`compose`"]);
                return Err(Abort);
            }
            self.fail(&["`yields`", "`compose`", "`}`"])
        } else {
            self.fail(&["`yields`", "`compose`", "`joint`"])
        }
    }

    fn subject(&mut self) -> PResult<Subject> {
        let system = self.ident()?;
        let factor = if self.at(&TokenKind::Dot) {
            self.advance();
            Some(self.ident()?)
        } else {
            None
        };
        let span = system.span.to(self.prev_span(), self.src);
        Ok(Subject { system, factor, span })
    }

    fn args(&mut self) -> PResult<Vec<f64>> {
        self.punct(TokenKind::LParen)?;
        let mut args = Vec::new();
        if !self.at(&TokenKind::RParen) {
            args.push(self.real()?);
            while self.at(&TokenKind::Comma) {
                self.advance();
                args.push(self.real()?);
            }
        }
        self.punct(TokenKind::RParen)?;
        Ok(args)
    }

    fn number_value(&mut self, text: &str, span: Span) -> PResult<f64> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.error_at(format!("numeric literal `{text}` is out of range"), span, &[]);
                Err(Abort)
            }
        }
    }

    /// `-`? NUMBER
    fn real(&mut self) -> PResult<f64> {
        let negative = self.at(&TokenKind::Minus);
        if negative {
            self.advance();
        }
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Number(text) => {
                self.advance();
                let v = self.number_value(text, tok.span)?;
                Ok(if negative { -v } else { v })
            }
            _ => self.fail(&["number"]),
        }
    }

    /// `-`? NUMBER ((`+`|`-`) NUMBER `i`)?  |  `-`? NUMBER `i`
    fn complex(&mut self) -> PResult<ComplexScalar> {
        let negative = self.at(&TokenKind::Minus);
        if negative {
            self.advance();
        }
        let sign = if negative { -1.0 } else { 1.0 };
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Imaginary(text) => {
                self.advance();
                let v = self.number_value(text, tok.span)?;
                Ok(ComplexScalar::new(0.0, sign * v))
            }
            TokenKind::Number(text) => {
                self.advance();
                let re = sign * self.number_value(text, tok.span)?;
                let im_sign = match self.peek().kind {
                    TokenKind::Plus => 1.0,
                    TokenKind::Minus => -1.0,
                    _ => return Ok(ComplexScalar::new(re, 0.0)),
                };
                self.advance();
                let tok = self.peek().clone();
                match &tok.kind {
                    TokenKind::Imaginary(text) => {
                        self.advance();
                        let im = self.number_value(text, tok.span)?;
                        Ok(ComplexScalar::new(re, im_sign * im))
                    }
                    _ => self.fail(&["imaginary part like `0.5i`"]),
                }
            }
            _ => self.fail(&["number"]),
        }
    }

    fn vector(&mut self) -> PResult<Vec<ComplexScalar>> {
        self.punct(TokenKind::LBracket)?;
        let mut v = vec![self.complex()?];
        while self.at(&TokenKind::Comma) {
            self.advance();
            v.push(self.complex()?);
        }
        self.punct(TokenKind::RBracket)?;
        Ok(v)
    }

    fn matrix(&mut self) -> PResult<Vec<Vec<ComplexScalar>>> {
        self.punct(TokenKind::LBracket)?;
        let mut rows = vec![self.vector()?];
        while self.at(&TokenKind::Comma) {
            self.advance();
            rows.push(self.vector()?);
        }
        self.punct(TokenKind::RBracket)?;
        Ok(rows)
    }
}

const DECL_EXPECTED: &[&str] = &["`system`", "`structure`", "`config`", "`bridge`", "`statement`"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ParseErrorKind;

    #[test]
    fn empty_file() {
        let s = parse("").unwrap();
        assert!(s.is_empty());
        assert!(parse("  # only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn yields_statement() {
        let s = parse("statement s1 { yields(particle, z_axis) = up }").unwrap();
        let st = &s.statements[0];
        assert_eq!(st.id.name, "s1");
        assert_eq!(st.claim.node_kind(), NodeKind::Yields);
        let ClaimKind::Yields { subject, config, outcome } = &st.claim.kind else { panic!() };
        assert_eq!(subject.system.name, "particle");
        assert_eq!(config.as_ref().unwrap().name, "z_axis");
        assert_eq!(outcome.label, OutcomeLabel::atom("up"));
    }

    #[test]
    fn intrinsic_form_parses() {
        let s = parse("statement bad { yields(particle) = up }").unwrap();
        assert_eq!(s.statements[0].claim.node_kind(), NodeKind::IntrinsicYields);
    }

    #[test]
    fn compose_with_bridge_and_tuple_outcome() {
        let src = "statement c { compose { yields(pair.left, a) = up yields(pair, j) = (up, down) } using door }";
        let s = parse(src).unwrap();
        let ClaimKind::Compose { children, bridge } = &s.statements[0].claim.kind else { panic!() };
        assert_eq!(children.len(), 2);
        assert_eq!(bridge.as_ref().unwrap().name, "door");
        let ClaimKind::Yields { subject, outcome, .. } = &children[0].kind else { panic!() };
        assert_eq!(subject.factor.as_ref().unwrap().name, "left");
        let ClaimKind::Yields { outcome: o2, .. } = &children[1].kind else { panic!() };
        assert_eq!(o2.label, OutcomeLabel::pair("up".into(), "down".into()));
        assert_eq!(&src[outcome.span.start..outcome.span.end], "up");
    }

    #[test]
    fn declarations() {
        let src = "system a dim 2\nsystem b dim 2\nsystem ab dim 4 = a x b\n\
                   structure s over a [0.6, 0 + 0.8i]\n\
                   structure r over a [[0.5, 0], [0, 0.5]]\n\
                   structure t over ab builtin singlet\n\
                   config c over a builtin spin_axis(-1.5, 2e-1)\n\
                   config d over a povm { yes: [[1, 0], [0, 0]] no: [[0, 0], [0, 1]] }\n\
                   bridge br physical via d { (yes, _) -> yes }";
        let s = parse(src).unwrap();
        assert_eq!(s.systems[2].factors.len(), 2);
        assert_eq!(
            s.structures[0].source,
            StructureSource::Vector(vec![ComplexScalar::new(0.6, 0.0), ComplexScalar::new(0.0, 0.8),])
        );
        assert!(matches!(s.structures[1].source, StructureSource::Matrix(_)));
        let ConfigSource::Builtin(b) = &s.configurations[0].source else { panic!() };
        assert_eq!(b.args, vec![-1.5, 0.2]);
        assert!(matches!(s.configurations[1].source, ConfigSource::Table { kind: ConfigKind::Povm, .. }));
        assert_eq!(s.bridges[0].maps[0].key, vec![OutcomePattern::Label("yes".into()), OutcomePattern::Any]);
    }

    #[test]
    fn errors_carry_positions_and_hints() {
        let errs = parse("system a dim 2\nstructure s over\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].span.line, 3);
        assert!(errs[0].expected.iter().any(|e| e == "identifier"));
    }

    #[test]
    fn recovers_and_reports_each_broken_declaration() {
        let errs = parse("system dim 2\nsystem ok dim 2\nconfig c over ok builtin\nstatement s { yields(ok) = up }")
            .unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].span.line, 1);
        assert_eq!(errs[1].span.line, 4);
    }

    #[test]
    fn duplicate_identifier() {
        let errs = parse("system a dim 2\nsystem a dim 3").unwrap_err();
        assert_eq!(errs[0].kind, ParseErrorKind::DuplicateIdentifier);
        // separate namespaces may reuse a name
        assert!(parse("system a dim 2\nconfig a over a builtin spin_z()").is_ok());
    }

    #[test]
    fn compose_rules() {
        assert!(parse("statement s { compose { yields(a, b) = c } }").is_err());
        assert!(parse("statement s { compose { yields(a, b) = c joint(a, b, c) } }").is_err());
        let deep = format!(
            "statement s {{ {} yields(a, b) = c yields(a, b) = c {} }}",
            "compose { ".repeat(40),
            "} yields(a, b) = c ".repeat(40)
        );
        assert!(parse(&deep).is_err());
    }

    #[test]
    fn rejects_bad_numbers_and_dims() {
        assert!(parse("system a dim 0").is_err());
        assert!(parse("system a dim 2.5").is_err());
        assert!(parse("config c over a builtin spin_axis(1e999)").is_err());
        assert!(parse("structure s over a [1 + 2]").is_err());
    }

    #[test]
    fn keywords_are_reserved() {
        assert!(parse("system yields dim 2").is_err());
        assert!(parse("system _ dim 2").is_err());
    }

    #[test]
    fn spans_cover_claims() {
        let src = "statement s {\n  joint(p, a, b)\n}";
        let s = parse(src).unwrap();
        let c = &s.statements[0].claim;
        assert_eq!(&src[c.span.start..c.span.end], "joint(p, a, b)");
        assert_eq!((c.span.line, c.span.col, c.span.len), (2, 3, 14));
    }
}
