"""Canonical pretty-printer; output reparses to an equal model."""

from __future__ import annotations

from amt.expr import (
    AllInstances, Binary, CollOp, Expr, Iterate, Lit, Name, Nav, POSTFIX_PREC,
    PRECEDENCE, UNARY_MINUS_PREC, Unary,
)
from amt.model import (
    MANY, Assert, Assign, AssocDecl, ClassDecl, LinkDecl, Message, Model, ObjDecl,
    ObjectDiagram, Observe, SequenceDiagram, Statechart, TestCase, Transition,
)

IND = "  "


def format_real(x: float) -> str:
    s = repr(float(x))
    if "e" in s and "." not in s.split("e")[0]:
        mant, exp = s.split("e")
        s = f"{mant}.0e{exp}"
    elif "." not in s and "e" not in s:
        s += ".0"
    return s


def format_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def format_literal(lit: Lit) -> str:
    if lit.kind == "Boolean":
        return "true" if lit.value else "false"
    if lit.kind == "Integer":
        return str(lit.value)
    if lit.kind == "Real":
        return format_real(lit.value)
    return format_string(lit.value)


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return PRECEDENCE[e.op]
    if isinstance(e, Unary):
        return PRECEDENCE["not"] if e.op == "not" else UNARY_MINUS_PREC
    if isinstance(e, Lit) and e.kind in ("Integer", "Real") and _is_negative(e.value):
        return UNARY_MINUS_PREC
    return POSTFIX_PREC + 1


def _is_negative(x) -> bool:
    return x < 0 or (x == 0 and str(x).startswith("-"))


def format_expr(e: Expr, min_prec: int = 0) -> str:
    s = _format(e)
    return f"({s})" if _prec(e) < min_prec else s


def _format(e: Expr) -> str:
    if isinstance(e, Lit):
        return format_literal(e)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, AllInstances):
        return f"{e.class_name}.allInstances()"
    if isinstance(e, Nav):
        return f"{format_expr(e.source, POSTFIX_PREC)}.{e.feature}"
    if isinstance(e, CollOp):
        args = ", ".join(format_expr(a) for a in e.args)
        return f"{format_expr(e.source, POSTFIX_PREC)}->{e.op}({args})"
    if isinstance(e, Iterate):
        return (f"{format_expr(e.source, POSTFIX_PREC)}->{e.op}"
                f"({e.var} | {format_expr(e.body)})")
    if isinstance(e, Unary):
        if e.op == "not":
            return f"not {format_expr(e.operand, PRECEDENCE['not'])}"
        inner = format_expr(e.operand, UNARY_MINUS_PREC)
        if inner[0].isdigit() or inner[0] == "-":
            # keep "-5" from folding into a negative literal
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Binary):
        p = PRECEDENCE[e.op]
        # all binary operators parse left-associative
        return f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
    raise TypeError(f"not an expression: {e!r}")


def format_message(m: Message) -> str:
    args = ", ".join(format_literal(a) for a in m.args)
    return f"{m.sender} -> {m.receiver}.{m.op}({args});"


def _action(a) -> str:
    if isinstance(a, Assign):
        return f"{a.attr} := {format_expr(a.expr)};"
    target = ".".join(a.path + (a.op,)) if a.path else f"self.{a.op}"
    args = ", ".join(format_expr(x) for x in a.args)
    return f"send {target}({args});"


def _transition(t: Transition) -> str:
    s = f"transition {t.source} -> {t.target} on {t.event}"
    if t.guard is not None:
        s += f" [{format_expr(t.guard)}]"
    if t.actions:
        s += " / { " + " ".join(_action(a) for a in t.actions) + " }"
    return s + ";"


def _statechart(sc: Statechart, ind: str) -> list[str]:
    lines = [f"{ind}statechart {{", f"{ind}{IND}initial {sc.initial};"]
    lines += [f"{ind}{IND}state {s};" for s in sc.states]
    lines += [f"{ind}{IND}{_transition(t)}" for t in sc.transitions]
    lines.append(f"{ind}}}")
    return lines


def _class(c: ClassDecl) -> list[str]:
    head = f"{IND}class {c.name}"
    if c.stereotype != "none":
        head += f" <<{c.stereotype}>>"
    if c.superclass:
        head += f" extends {c.superclass}"
    lines = [head + " {"]
    ind = IND * 2
    for a in c.attributes:
        lines.append(f"{ind}attr {a.name}: {a.type};")
    for o in c.operations:
        params = ", ".join(f"{p.name}: {p.type}" for p in o.params)
        lines.append(f"{ind}op {o.name}({params});")
    for inv in c.invariants:
        lines.append(f"{ind}inv {format_expr(inv)};")
    if c.statechart is not None:
        lines += _statechart(c.statechart, ind)
    lines.append(f"{IND}}}")
    return lines


def _assoc(a: AssocDecl) -> str:
    mult = "*" if a.multiplicity == MANY else "0..1"
    return f"{IND}assoc {a.name} {a.source} -> {a.target} [{mult}] role {a.role};"


def _obj(o: ObjDecl) -> str:
    parts = [f"{k} = {format_literal(v)};" for k, v in o.values]
    if o.state is not None:
        parts.append(f"state = {o.state};")
    body = " ".join(parts)
    return f"{o.name} : {o.cls} {{ {body} }}" if body else f"{o.name} : {o.cls} {{ }}"


def _link(lk: LinkDecl) -> str:
    return f"link {lk.assoc} {lk.source} -> {lk.target};"


def _od_body(od: ObjectDiagram, ind: str) -> list[str]:
    return [ind + _obj(o) for o in od.objects] + [ind + _link(lk) for lk in od.links]


def _fixture(f: ObjectDiagram) -> list[str]:
    return [f"{IND}objects {f.name} {{", *_od_body(f, IND * 2), f"{IND}}}"]


def _test(t: TestCase) -> list[str]:
    i2, i3 = IND * 2, IND * 3
    lines = [f"{IND}test {t.name} {{", f"{i2}fixture {t.fixture};", f"{i2}sd {{"]
    lines.append(f"{i3}trigger: " + " ".join(format_message(m) for m in t.trigger))
    for st in t.steps:
        if isinstance(st, Observe):
            lines.append(f"{i3}observe: {format_message(st.message)}")
        elif isinstance(st, Assert):
            lines.append(f"{i3}assert {format_expr(st.expr)};")
    lines.append(f"{i2}}}")
    if t.oracle is not None:
        lines += [f"{i2}oracle {{", *_od_body(t.oracle, i3), f"{i2}}}"]
    lines.append(f"{IND}}}")
    return lines


def _sd(s: SequenceDiagram) -> list[str]:
    return [f"{IND}sd {s.name} {{", *[IND * 2 + format_message(m) for m in s.messages],
            f"{IND}}}"]


def print_model(model: Model) -> str:
    lines = [f"model {model.name} {{"]
    for c in model.classes:
        lines += _class(c)
    lines += [_assoc(a) for a in model.associations]
    for f in model.fixtures:
        lines += _fixture(f)
    for t in model.tests:
        lines += _test(t)
    for s in model.sds:
        lines += _sd(s)
    lines.append("}")
    return "\n".join(lines) + "\n"
