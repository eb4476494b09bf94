"""Reader for the ``.bkb`` knowledge base format.

::

    % comment
    combine noisy_or.
    domain aids/1 values {yes, no} positive yes.
    pb 1: aids(p1).
    pb 4: aids(X) <- aids(Y), contact(X,Y), true, member(X,[p1,p2,p3]), member(Y,[p1,p2,p3]).
    cb: adult(X) <- person(X), not minor(X).
    cpt 1: { () -> yes: 0.7, no: 0.3 }

Bodies of non-unit PB clauses are split at ``true``: atoms before it are
direct influences, literals after it are context, and ``member`` literals
after it become type constraints.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .kb import DomainDecl, KnowledgeBase, RawCPT, ValidationError, universe_of, validate_kb
from .terms import Atom, Clause, Literal, Var

log = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\d*\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?(?![A-Za-z_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*|\d+[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><-|:-|->|\\\+|[()\[\]{},.:;/|=@~])
    """,
    re.VERBOSE,
)


class ParseError(SyntaxError):
    """Malformed input; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.anon = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise ParseError(f"{message} (found {found!r})", tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.text in texts and self.tok.kind in ("op", "name")

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            self.error(f"expected {text!r}")
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def name(self, what: str = "a name") -> str:
        if self.tok.kind != "name":
            self.error(f"expected {what}")
        return self.advance().text

    def integer(self) -> int:
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit():
            self.error("expected a clause number")
        self.advance()
        return int(tok.text)

    # -- grammar
    def term(self):
        tok = self.tok
        if tok.text == "[":
            self.advance()
            items = [self.constant()]
            while self.at(","):
                self.advance()
                items.append(self.constant())
            self.expect("]")
            deduped = tuple(dict.fromkeys(items))
            if len(deduped) != len(items):
                log.warning("line %d: duplicate constants removed from list", tok.line)
            return deduped
        if tok.kind == "num":
            self.advance()
            return tok.text
        text = self.name("a term")
        if text == "_":
            self.anon += 1
            return Var(f"_G{self.anon}")
        if text[0].isupper() or text[0] == "_":
            return Var(text)
        return text

    def constant(self) -> str:
        t = self.term()
        if not isinstance(t, str):
            self.error("expected a constant")
        return t

    def atom(self) -> Atom:
        tok = self.tok
        pred = self.name("a predicate")
        if pred[0].isupper() or pred[0] == "_":
            self.error("predicate symbols start with a lower-case letter", tok)
        args = []
        if self.at("("):
            self.advance()
            args.append(self.term())
            while self.at(","):
                self.advance()
                args.append(self.term())
            self.expect(")")
        plain = args[:1] if pred == "member" and len(args) == 2 else args
        if any(isinstance(a, tuple) for a in plain):
            self.error("constant lists only appear as the second argument of member", tok)
        return Atom(pred, tuple(args))

    def literal(self) -> Literal:
        if self.at("not", "\\+", "~"):
            self.advance()
            return Literal(self.atom(), positive=False)
        return Literal(self.atom())

    def body(self) -> list[tuple[Literal, Token]]:
        out = []
        while True:
            tok = self.tok
            out.append((self.literal(), tok))
            if not self.at(","):
                return out
            self.advance()

    def clause_body(self):
        if self.at("<-", ":-"):
            self.advance()
            return self.body()
        return []

    def pb_clause(self) -> Clause:
        self.expect("pb")
        k = self.integer()
        self.expect(":")
        head = self.atom()
        body = self.clause_body()
        self.expect(".")
        influences, context, constraints = [], [], []
        seen_true = not body
        for lit, tok in body:
            a = lit.atom
            if not seen_true:
                if a.key == ("true", 0) and lit.positive:
                    seen_true = True
                elif not lit.positive or a.is_builtin:
                    self.error("only plain atoms may precede 'true' in a PB clause", tok)
                else:
                    influences.append(a)
            elif a.key == ("member", 2) and lit.positive:
                v, dom = a.args
                if not isinstance(dom, tuple):
                    self.error("member needs a constant list as second argument", tok)
                constraints.append((v, dom))
            elif a.key == ("true", 0) and lit.positive:
                continue
            else:
                context.append(lit)
        if not seen_true:
            self.error(f"PB clause {k} has a body but no 'true' separator")
        return Clause(head, tuple(influences), tuple(context), tuple(constraints), index=k)

    def cb_clause(self) -> Clause:
        self.expect("cb")
        self.expect(":")
        head = self.atom()
        body = self.clause_body()
        self.expect(".")
        return Clause(head, context=tuple(lit for lit, _ in body))

    def domain(self) -> DomainDecl:
        self.expect("domain")
        pred = self.name("a predicate")
        self.expect("/")
        arity = self.integer()
        self.expect("values")
        self.expect("{")
        values = [self.name("a value")]
        while self.at(","):
            self.advance()
            values.append(self.name("a value"))
        self.expect("}")
        positive = None
        if self.at("positive"):
            self.advance()
            positive = self.name("a value")
        self.expect(".")
        if len(set(values)) != len(values):
            self.error(f"duplicate values in domain of {pred}/{arity}")
        return DomainDecl(pred, arity, tuple(values), positive)

    def probability(self) -> float:
        if self.tok.kind != "num":
            self.error("expected a probability")
        return float(self.advance().text)

    def cpt(self) -> RawCPT:
        self.expect("cpt")
        k = self.integer()
        self.expect(":")
        self.expect("{")
        rows: dict = {}
        while not self.at("}"):
            self.expect("(")
            parents = []
            if not self.at(")"):
                parents.append(self.name("a value"))
                while self.at(","):
                    self.advance()
                    parents.append(self.name("a value"))
            self.expect(")")
            self.expect("->")
            dist = {}
            while True:
                v = self.name("a value")
                self.expect(":")
                if v in dist:
                    self.error(f"value {v} listed twice in one CPT row")
                dist[v] = self.probability()
                if not self.at(","):
                    break
                self.advance()
            if tuple(parents) in rows:
                self.error(f"duplicate row ({', '.join(parents)}) in CPT {k}")
            rows[tuple(parents)] = dist
            if self.at(";"):
                self.advance()
            elif not self.at("}"):
                self.error("expected ';' or '}'")
        self.expect("}")
        if self.at("."):
            self.advance()
        return RawCPT(k, rows)

    def parse(self) -> KnowledgeBase:
        pb, cb, cpts, domains = [], [], {}, {}
        combination = None
        while self.tok.kind != "eof":
            tok = self.tok
            if self.at("pb"):
                pb.append(self.pb_clause())
            elif self.at("cb"):
                cb.append(self.cb_clause())
            elif self.at("cpt"):
                cpt = self.cpt()
                if cpt.index in cpts:
                    self.error(f"second CPT block for clause {cpt.index}", tok)
                cpts[cpt.index] = cpt
            elif self.at("domain"):
                d = self.domain()
                if (d.pred, d.arity) in domains:
                    self.error(f"second domain declaration for {d.pred}/{d.arity}", tok)
                domains[(d.pred, d.arity)] = d
            elif self.at("combine"):
                self.advance()
                if combination is not None:
                    self.error("combination rule declared twice", tok)
                combination = self.name("a combination rule")
                self.expect(".")
            else:
                self.error("expected 'pb', 'cb', 'cpt', 'domain' or 'combine'")
        pb, cb = tuple(pb), tuple(cb)
        return KnowledgeBase(
            pb=pb, cb=cb, cpts=cpts, combination=combination or "noisy_or",
            domains=domains, constants=universe_of(pb + cb),
        )


def parse_kb(text: str, validate: bool = True) -> KnowledgeBase:
    """Parse ``.bkb`` text.

    Raises :class:`ParseError` on malformed input and, when ``validate`` is
    set, :class:`ValidationError` listing every violated invariant.
    """
    kb = _Parser(text).parse()
    if validate:
        diags = validate_kb(kb)
        if diags:
            raise ValidationError(diags)
    return kb


def parse_atom(text: str) -> Atom:
    """Parse a single atom such as ``aids(p1)``."""
    p = _Parser(text)
    atom = p.atom()
    if p.tok.kind != "eof":
        p.error("trailing input after atom")
    return atom


def split_atoms(text: str) -> list[Atom]:
    """Parse a comma-separated atom list; commas inside parentheses do not split."""
    p = _Parser(text)
    if p.tok.kind == "eof":
        return []
    out = [p.atom()]
    while p.at(","):
        p.advance()
        out.append(p.atom())
    if p.tok.kind != "eof":
        p.error("expected ',' between atoms")
    return out


def load_kb(path, validate: bool = True) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read(), validate=validate)
