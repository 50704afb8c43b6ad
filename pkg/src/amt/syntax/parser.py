"""Recursive-descent parser for ``.amt`` model files and constraint
expressions."""

from __future__ import annotations

from typing import Optional

from amt.expr import (
    AllInstances, Binary, CollOp, Expr, Iterate, Lit, Name, Nav, SIMPLE_COLL_OPS,
    ITERATOR_OPS, SourceSpan, Unary,
)
from amt.model import (
    MANY, OPTIONAL, Assert, Assign, AssocDecl, Attribute, ClassDecl, LinkDecl,
    Message, Model, ObjDecl, ObjectDiagram, Observe, Operation, Param, Send,
    SequenceDiagram, Statechart, TestCase, Transition,
)
from amt.syntax.lexer import ParseError, ParseFailure, Token, tokenize

_TOP_KEYWORDS = ("class", "assoc", "objects", "test", "sd")
# Keywords that can only start a top-level declaration (``sd`` also opens a
# test's interaction block, so it is no resync point).
_RESYNC_KEYWORDS = ("class", "assoc", "objects", "test")
_COMPARE = ("=", "<>", "<", "<=", ">", ">=")


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.file, a.line, a.col, b.end_line, b.end_col)


class Parser:
    def __init__(self, text: str, filename: str = "<input>"):
        self.filename = filename
        self.toks = tokenize(text, filename)
        self.i = 0
        self.errors: list[ParseError] = []

    # -- token plumbing -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def fail(self, expected: str) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return ParseError(f"expected {expected}, found {found}", t.span)

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.advance()
        raise self.fail(repr(text))

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind == "ident":
            return self.advance()
        raise self.fail(what)

    def span_from(self, start: Token) -> SourceSpan:
        prev = self.toks[self.i - 1] if self.i > 0 else start
        return _join(start.span, prev.span)

    # -- model ------------------------------------------------------------

    def parse_model(self) -> Model:
        start = self.tok
        try:
            self.expect("model")
            name = self.ident("model name").text
            self.expect("{")
        except ParseError as e:
            raise ParseFailure([e])
        classes, assocs, fixtures, tests, sds = [], [], [], [], []
        while not self.at("}") and self.tok.kind != "eof":
            decl_start = self.i
            try:
                if self.at("class"):
                    classes.append(self.class_decl())
                elif self.at("assoc"):
                    assocs.append(self.assoc_decl())
                elif self.at("objects"):
                    fixtures.append(self.fixture_decl())
                elif self.at("test"):
                    tests.append(self.test_decl())
                elif self.at("sd"):
                    sds.append(self.sd_decl())
                else:
                    raise self.fail("declaration")
            except ParseError as e:
                self.errors.append(e)
                self.recover(decl_start)
        try:
            self.expect("}")
            if self.tok.kind != "eof":
                raise self.fail("end of input")
        except ParseError as e:
            self.errors.append(e)
        if self.errors:
            raise ParseFailure(self.errors)
        return Model(name, tuple(classes), tuple(assocs), tuple(fixtures), tuple(tests),
                     tuple(sds), span=self.span_from(start), files=(self.filename,))

    def recover(self, decl_start: int) -> None:
        """Skip to the end of the broken declaration or the next keyword that
        can only begin one."""
        depth = 0
        for t in self.toks[decl_start:self.i]:
            if t.is_("sym", "{"):
                depth += 1
            elif t.is_("sym", "}"):
                depth -= 1
        if self.i == decl_start:
            self.advance()
            if self.toks[decl_start].is_("sym", "{"):
                depth += 1
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "kw" and t.text in _RESYNC_KEYWORDS and self.i > decl_start:
                return
            if t.is_("sym", "{"):
                depth += 1
            elif t.is_("sym", "}"):
                if depth <= 0:
                    return  # closing brace of the model
                depth -= 1
                self.advance()
                if depth == 0:
                    self.accept(";")
                    return
                continue
            self.advance()

    def class_decl(self) -> ClassDecl:
        start = self.expect("class")
        name = self.ident("class name").text
        stereotype = "none"
        if self.accept("<<"):
            st = self.ident("stereotype")
            if st.text not in ("requirement", "auxiliary"):
                raise ParseError(f"expected 'requirement' or 'auxiliary', found {st.text!r}",
                                 st.span)
            stereotype = st.text
            self.expect(">>")
        superclass = None
        if self.accept("extends"):
            superclass = self.ident("superclass name").text
        self.expect("{")
        attrs, ops, invs = [], [], []
        statechart = None
        while not self.at("}"):
            if self.at("attr"):
                t = self.advance()
                aname = self.ident("attribute name").text
                self.expect(":")
                atype = self.ident("type").text
                self.expect(";")
                attrs.append(Attribute(aname, atype, self.span_from(t)))
            elif self.at("op"):
                t = self.advance()
                oname = self.ident("operation name").text
                self.expect("(")
                params = []
                if not self.at(")"):
                    while True:
                        pt = self.ident("parameter name")
                        self.expect(":")
                        ptype = self.ident("type").text
                        params.append(Param(pt.text, ptype, self.span_from(pt)))
                        if not self.accept(","):
                            break
                self.expect(")")
                self.expect(";")
                ops.append(Operation(oname, tuple(params), self.span_from(t)))
            elif self.at("inv"):
                self.advance()
                invs.append(self.expr())
                self.expect(";")
            elif self.at("statechart"):
                if statechart is not None:
                    raise ParseError("duplicate statechart", self.tok.span)
                statechart = self.statechart()
            else:
                raise self.fail("class member")
        self.expect("}")
        return ClassDecl(name, stereotype, superclass, tuple(attrs), tuple(ops), tuple(invs),
                         statechart, self.span_from(start))

    def statechart(self) -> Statechart:
        start = self.expect("statechart")
        self.expect("{")
        self.expect("initial")
        initial = self.ident("state name").text
        self.expect(";")
        states = []
        while self.accept("state"):
            states.append(self.ident("state name").text)
            self.expect(";")
        transitions = []
        while self.at("transition"):
            transitions.append(self.transition())
        self.expect("}")
        return Statechart(tuple(states), initial, tuple(transitions), self.span_from(start))

    def transition(self) -> Transition:
        start = self.expect("transition")
        source = self.ident("state name").text
        self.expect("->")
        target = self.ident("state name").text
        self.expect("on")
        event = self.ident("event name").text
        guard = None
        if self.accept("["):
            guard = self.expr()
            self.expect("]")
        actions = []
        if self.accept("/"):
            self.expect("{")
            while not self.at("}"):
                actions.append(self.action())
            self.expect("}")
        self.expect(";")
        return Transition(source, target, event, guard, tuple(actions), self.span_from(start))

    def action(self):
        start = self.tok
        if self.accept("send"):
            names = []
            if self.accept("self"):
                self.expect(".")
            names.append(self.ident("role or operation name").text)
            while self.accept("."):
                names.append(self.ident("role or operation name").text)
            self.expect("(")
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.accept(","):
                    args.append(self.expr())
            self.expect(")")
            self.expect(";")
            return Send(tuple(names[:-1]), names[-1], tuple(args), self.span_from(start))
        attr = self.ident("attribute name or 'send'").text
        self.expect(":=")
        rhs = self.expr()
        self.expect(";")
        return Assign(attr, rhs, self.span_from(start))

    def assoc_decl(self) -> AssocDecl:
        start = self.expect("assoc")
        name = self.ident("association name").text
        source = self.ident("class name").text
        self.expect("->")
        target = self.ident("class name").text
        self.expect("[")
        if self.accept("*"):
            mult = MANY
        else:
            lo = self.tok
            if lo.kind != "int" or lo.value != 0:
                raise self.fail("'0..1', '0..*' or '*'")
            self.advance()
            self.expect("..")
            if self.accept("*"):
                mult = MANY
            elif self.tok.kind == "int" and self.tok.value == 1:
                self.advance()
                mult = OPTIONAL
            else:
                raise self.fail("'1' or '*'")
        self.expect("]")
        self.expect("role")
        role = self.ident("role name").text
        self.expect(";")
        return AssocDecl(name, source, target, mult, role, self.span_from(start))

    def fixture_decl(self) -> ObjectDiagram:
        start = self.expect("objects")
        name = self.ident("fixture name").text
        self.expect("{")
        objects, links = self.od_body()
        self.expect("}")
        return ObjectDiagram(name, objects, links, self.span_from(start))

    def od_body(self) -> tuple[tuple[ObjDecl, ...], tuple[LinkDecl, ...]]:
        objects, links = [], []
        while self.tok.kind == "ident":
            objects.append(self.obj_decl())
        while self.at("link"):
            t = self.advance()
            assoc = self.ident("association name").text
            src = self.ident("object name").text
            self.expect("->")
            dst = self.ident("object name").text
            self.expect(";")
            links.append(LinkDecl(assoc, src, dst, self.span_from(t)))
        return tuple(objects), tuple(links)

    def obj_decl(self) -> ObjDecl:
        start = self.ident("object name")
        self.expect(":")
        cls = self.ident("class name").text
        self.expect("{")
        values = []
        state = None
        while self.tok.kind == "ident":
            attr = self.advance().text
            self.expect("=")
            values.append((attr, self.literal()))
            self.expect(";")
        if self.accept("state"):
            self.expect("=")
            state = self.ident("state name").text
            self.expect(";")
        self.expect("}")
        return ObjDecl(start.text, cls, tuple(values), state, self.span_from(start))

    def literal(self) -> Lit:
        t = self.tok
        if t.is_("sym", "-") and self.peek().kind in ("int", "real"):
            self.advance()
            n = self.advance()
            kind = "Integer" if n.kind == "int" else "Real"
            return Lit(kind, -n.value, _join(t.span, n.span))
        if t.kind == "int":
            self.advance()
            return Lit("Integer", t.value, t.span)
        if t.kind == "real":
            self.advance()
            return Lit("Real", t.value, t.span)
        if t.kind == "string":
            self.advance()
            return Lit("String", t.value, t.span)
        if t.is_("kw", "true") or t.is_("kw", "false"):
            self.advance()
            return Lit("Boolean", t.text == "true", t.span)
        raise self.fail("literal")

    def test_decl(self) -> TestCase:
        start = self.expect("test")
        name = self.ident("test name").text
        self.expect("{")
        self.expect("fixture")
        fixture = self.ident("fixture name").text
        self.expect(";")
        self.expect("sd")
        self.expect("{")
        self.expect("trigger")
        self.expect(":")
        trigger = [self.message()]
        while self.tok.kind == "ident" or self.at("env"):
            trigger.append(self.message())
        steps = []
        while not self.at("}"):
            t = self.tok
            if self.accept("observe"):
                self.expect(":")
                steps.append(Observe(self.message(), self.span_from(t)))
            elif self.accept("assert"):
                e = self.expr()
                self.expect(";")
                steps.append(Assert(e, self.span_from(t)))
            else:
                raise self.fail("'observe', 'assert' or '}'")
        self.expect("}")
        oracle = None
        if self.at("oracle"):
            t = self.advance()
            self.expect("{")
            objects, links = self.od_body()
            self.expect("}")
            oracle = ObjectDiagram("", objects, links, self.span_from(t))
        self.expect("}")
        return TestCase(name, fixture, tuple(trigger), tuple(steps), oracle,
                        self.span_from(start))

    def sd_decl(self) -> SequenceDiagram:
        start = self.expect("sd")
        name = self.ident("sequence diagram name").text
        self.expect("{")
        msgs = []
        while not self.at("}"):
            msgs.append(self.message())
        self.expect("}")
        return SequenceDiagram(name, tuple(msgs), self.span_from(start))

    def message(self, terminated: bool = True) -> Message:
        start = self.tok
        if self.accept("env"):
            sender = "env"
        else:
            sender = self.ident("sender").text
        self.expect("->")
        receiver = self.ident("receiver").text
        self.expect(".")
        op = self.ident("operation name").text
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.literal())
            while self.accept(","):
                args.append(self.literal())
        self.expect(")")
        if terminated:
            self.expect(";")
        return Message(sender, receiver, op, tuple(args), self.span_from(start))

    # -- expressions ------------------------------------------------------

    def expr(self) -> Expr:
        return self.implies()

    def _binary_level(self, ops: tuple[str, ...], sub) -> Expr:
        left = sub()
        while self.tok.kind in ("sym", "kw") and self.tok.text in ops:
            op = self.advance().text
            right = sub()
            left = Binary(op, left, right, _join(left.span, right.span))
        return left

    def implies(self) -> Expr:
        return self._binary_level(("implies",), self.or_)

    def or_(self) -> Expr:
        return self._binary_level(("or",), self.and_)

    def and_(self) -> Expr:
        return self._binary_level(("and",), self.not_)

    def not_(self) -> Expr:
        if self.at("not"):
            t = self.advance()
            operand = self.not_()
            return Unary("not", operand, _join(t.span, operand.span))
        return self.comparison()

    def comparison(self) -> Expr:
        return self._binary_level(_COMPARE, self.additive)

    def additive(self) -> Expr:
        return self._binary_level(("+", "-"), self.multiplicative)

    def multiplicative(self) -> Expr:
        return self._binary_level(("*", "/", "mod"), self.unary)

    def unary(self) -> Expr:
        if self.at("-"):
            t = self.tok
            if self.peek().kind in ("int", "real"):
                return self.postfix(self.literal())
            self.advance()
            operand = self.unary()
            return Unary("-", operand, _join(t.span, operand.span))
        return self.postfix(self.primary())

    def primary(self) -> Expr:
        t = self.tok
        if t.kind in ("int", "real", "string") or t.is_("kw", "true") or t.is_("kw", "false"):
            return self.literal()
        if self.accept("self"):
            return Name("self", t.span)
        if t.kind == "ident":
            self.advance()
            if (self.at(".") and self.peek().kind == "ident"
                    and self.peek().text == "allInstances"):
                self.advance()
                self.advance()
                self.expect("(")
                self.expect(")")
                return AllInstances(t.text, self.span_from(t))
            return Name(t.text, t.span)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.fail("expression")

    def postfix(self, e: Expr) -> Expr:
        while True:
            if self.accept("."):
                f = self.ident("feature name")
                e = Nav(e, f.text, _join(e.span, f.span))
            elif self.accept("->"):
                opt = self.ident("collection operation")
                op = opt.text
                self.expect("(")
                if op in ITERATOR_OPS:
                    var = self.ident("iterator variable").text
                    self.expect("|")
                    body = self.expr()
                    self.expect(")")
                    e = Iterate(e, op, var, body, self.span_from(opt))
                elif op in SIMPLE_COLL_OPS:
                    args = []
                    if not self.at(")"):
                        args.append(self.expr())
                        while self.accept(","):
                            args.append(self.expr())
                    self.expect(")")
                    if len(args) != SIMPLE_COLL_OPS[op]:
                        raise ParseError(f"'{op}' takes {SIMPLE_COLL_OPS[op]} argument(s)",
                                         opt.span)
                    e = CollOp(e, op, tuple(args), _join(e.span, self.toks[self.i - 1].span))
                else:
                    raise ParseError(f"unknown collection operation '{op}'", opt.span)
            else:
                return e


def parse(text: str, filename: str = "<input>") -> Model:
    """Parse a model file; raises ParseFailure listing every error found."""
    return Parser(text, filename).parse_model()


def _parse_whole(text: str, filename: str, rule):
    p = Parser(text, filename)
    try:
        out = rule(p)
        if p.tok.kind != "eof":
            raise p.fail("end of input")
    except ParseError as e:
        raise ParseFailure([e])
    return out


def parse_constraint(text: str, filename: str = "<expr>") -> Expr:
    return _parse_whole(text, filename, Parser.expr)


def parse_messages(text: str, filename: str = "<events>") -> list[Message]:
    """Parse ``[sender ->] obj.op(args); ...`` (sender defaults to env)."""

    def rule(p: Parser) -> list[Message]:
        msgs = []
        while p.tok.kind != "eof":
            if p.peek().is_("sym", "->") or p.at("env"):
                msgs.append(p.message(terminated=False))
            else:
                start = p.tok
                receiver = p.ident("receiver").text
                p.expect(".")
                op = p.ident("operation name").text
                p.expect("(")
                args = []
                if not p.at(")"):
                    args.append(p.literal())
                    while p.accept(","):
                        args.append(p.literal())
                p.expect(")")
                msgs.append(Message("env", receiver, op, tuple(args), p.span_from(start)))
            if not p.accept(";"):
                break
        return msgs

    return _parse_whole(text, filename, rule)
