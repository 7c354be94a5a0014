"""OpenQASM 2.0 front end.

Parses a source text into a flat :class:`~evdd.circuit.Circuit`:
registers are flattened in declaration order, whole-register gate
applications are unrolled, user-defined gates are macro-expanded down
to the standard library, ``barrier`` is dropped, and measurements are
recorded (not executed).

Only the literal include ``"qelib1.inc"`` resolves, to an embedded copy
of the standard header; the gates it declares that have native matrix
builders are kept as primitives, the rest (u0, crx, cry, rzz) expand
through their definitions.  ``opaque``, ``if`` and ``reset`` are
rejected with errors naming the construct.
"""

from __future__ import annotations

import math
import os
import re

from .circuit import GATE_SHAPES, Circuit, GateSpec
from .errors import (ArityMismatchError, ParseError, QubitOutOfRangeError,
                     UnboundIdentifierError, UnknownGateError,
                     UnsupportedFeatureError)

MAX_EXPANSION_DEPTH = 64

# The standard library header shipped with OpenQASM 2.0.
QELIB1 = """
// Standard gate library
gate u3(theta,phi,lambda) q { U(theta,phi,lambda) q; }
gate u2(phi,lambda) q { U(pi/2,phi,lambda) q; }
gate u1(lambda) q { U(0,0,lambda) q; }
gate cx c,t { CX c,t; }
gate id a { U(0,0,0) a; }
gate u0(gamma) q { U(0,0,0) q; }
gate x a { u3(pi,0,pi) a; }
gate y a { u3(pi,pi/2,pi/2) a; }
gate z a { u1(pi) a; }
gate h a { u2(0,pi) a; }
gate s a { u1(pi/2) a; }
gate sdg a { u1(-pi/2) a; }
gate t a { u1(pi/4) a; }
gate tdg a { u1(-pi/4) a; }
gate rx(theta) a { u3(theta,-pi/2,pi/2) a; }
gate ry(theta) a { u3(theta,0,0) a; }
gate rz(phi) a { u1(phi) a; }
gate cz a,b { h b; cx a,b; h b; }
gate cy a,b { sdg b; cx a,b; s b; }
gate swap a,b { cx a,b; cx b,a; cx a,b; }
gate ch a,b {
  h b; sdg b; cx a,b; h b; t b; cx a,b;
  t b; h b; s b; x b; s a;
}
gate ccx a,b,c {
  h c; cx b,c; tdg c; cx a,c; t c; cx b,c;
  tdg c; cx a,c; t c; h c; t b; cx a,b;
  t a; tdg b; cx a,b;
}
gate cswap a,b,c { cx c,b; ccx a,b,c; cx c,b; }
gate crx(lambda) a,b {
  u1(pi/2) b; cx a,b; u3(-lambda/2,0,0) b;
  cx a,b; u3(lambda/2,-pi/2,0) b;
}
gate cry(lambda) a,b { ry(lambda/2) b; cx a,b; ry(-lambda/2) b; cx a,b; }
gate crz(lambda) a,b { rz(lambda/2) b; cx a,b; rz(-lambda/2) b; cx a,b; }
gate cu1(lambda) a,b {
  u1(lambda/2) a; cx a,b; u1(-lambda/2) b;
  cx a,b; u1(lambda/2) b;
}
gate cu3(theta,phi,lambda) c,t {
  u1((lambda+phi)/2) c; u1((lambda-phi)/2) t; cx c,t;
  u3(-theta/2,0,-(phi+lambda)/2) t; cx c,t; u3(theta/2,phi,0) t;
}
gate rzz(theta) a,b { cx a,b; u1(theta) b; cx a,b; }
"""

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<real>(\d+\.\d*|\.\d+)([eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<eq>==)
  | (?P<sym>[()\[\]{},;+\-*/^])
""", re.VERBOSE)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}({self.text!r})@{self.line}:{self.col}"


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, m.start() - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = m.start() + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parameter expressions ---------------------------------------------------

_FUNCTIONS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "ln": math.log, "sqrt": math.sqrt,
}


def eval_param(expr, bindings: dict[str, float] | None = None) -> float:
    """Evaluate a parsed parameter expression tree to a float.

    ``expr`` may also be a source string, which is parsed first.
    """
    if isinstance(expr, str):
        parser = _Parser(_tokenize(expr), "<expr>")
        expr = parser._parse_expr()
        parser._expect("eof")
    bindings = bindings or {}

    def ev(node) -> float:
        op = node[0]
        if op == "num":
            return node[1]
        if op == "pi":
            return math.pi
        if op == "id":
            try:
                return bindings[node[1]]
            except KeyError:
                raise UnboundIdentifierError(
                    f"unbound parameter '{node[1]}'") from None
        if op == "neg":
            return -ev(node[1])
        if op == "fn":
            return _FUNCTIONS[node[1]](ev(node[2]))
        a, b = ev(node[1]), ev(node[2])
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                raise ZeroDivisionError("division by zero in gate parameter")
            return a / b
        if op == "^":
            return a ** b
        raise ValueError(f"bad expression node {node!r}")

    value = ev(expr)
    if not math.isfinite(value):
        raise ArithmeticError(f"parameter expression is not finite: {value}")
    return value


class _GateDef:
    __slots__ = ("name", "params", "qubits", "body", "builtin")

    def __init__(self, name, params, qubits, body, builtin):
        self.name = name
        self.params = params
        self.qubits = qubits
        self.body = body  # list of (name, param exprs, qubit formal names)
        self.builtin = builtin


class _Parser:
    def __init__(self, tokens: list[_Token], source_name: str):
        self._tokens = tokens
        self._pos = 0
        self.source_name = source_name
        self.qregs: list[tuple[str, int, int]] = []  # (name, offset, size)
        self.cregs: list[tuple[str, int, int]] = []
        self.gates: dict[str, _GateDef] = {}
        self.ops: list[GateSpec] = []
        self.measurements: list[tuple[int, int]] = []
        self.expand_builtins = False

    # -- token plumbing ---------------------------------------------------

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _next(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _error(self, message: str, tok: _Token | None = None):
        tok = tok or self._peek()
        raise ParseError(message, tok.line, tok.col)

    def _expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self._peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            self._error(f"expected {want!r}, found {tok.text!r}")
        return self._next()

    def _accept(self, kind: str, text: str | None = None) -> _Token | None:
        tok = self._peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self._next()
        return None

    # -- grammar ----------------------------------------------------------

    def parse_program(self):
        self._expect("id", "OPENQASM")
        version = self._expect("real")
        if version.text != "2.0":
            raise UnsupportedFeatureError(
                f"only OPENQASM 2.0 is supported, not {version.text}")
        self._expect("sym", ";")
        while self._peek().kind != "eof":
            self._parse_statement()

    def _parse_statement(self):
        tok = self._peek()
        if tok.kind != "id":
            self._error(f"expected a statement, found {tok.text!r}")
        name = tok.text
        if name == "include":
            self._parse_include()
        elif name == "qreg":
            self._parse_reg(self.qregs)
        elif name == "creg":
            self._parse_reg(self.cregs)
        elif name == "gate":
            self._parse_gate_def()
        elif name == "opaque":
            raise UnsupportedFeatureError(
                f"'opaque' gates are not supported "
                f"(line {tok.line})")
        elif name == "if":
            raise UnsupportedFeatureError(
                f"'if' statements are not supported (line {tok.line})")
        elif name == "reset":
            raise UnsupportedFeatureError(
                f"'reset' is not supported (line {tok.line})")
        elif name == "measure":
            self._parse_measure()
        elif name == "barrier":
            self._next()
            if self._peek().kind == "id":
                self._parse_qubit_args()
            self._expect("sym", ";")
        else:
            self._parse_application()

    def _parse_include(self):
        self._next()
        fname = self._expect("string").text.strip('"')
        self._expect("sym", ";")
        if fname != "qelib1.inc":
            raise UnsupportedFeatureError(
                f"only include \"qelib1.inc\" is supported, not {fname!r}")
        sub = _Parser(_tokenize(QELIB1), "qelib1.inc")
        while sub._peek().kind != "eof":
            sub._parse_statement()
        for gdef in sub.gates.values():
            gdef.builtin = gdef.name in GATE_SHAPES
            self.gates.setdefault(gdef.name, gdef)

    def _parse_reg(self, regs):
        self._next()
        name = self._expect("id").text
        self._expect("sym", "[")
        size = int(self._expect("int").text)
        self._expect("sym", "]")
        self._expect("sym", ";")
        if size < 1:
            self._error(f"register '{name}' must have positive size")
        if any(name == r[0] for r in self.qregs + self.cregs):
            self._error(f"register '{name}' already declared")
        offset = sum(r[2] for r in regs)
        regs.append((name, offset, size))

    def _parse_gate_def(self):
        self._next()
        name = self._expect("id").text
        params: list[str] = []
        if self._accept("sym", "("):
            if not self._accept("sym", ")"):
                params.append(self._expect("id").text)
                while self._accept("sym", ","):
                    params.append(self._expect("id").text)
                self._expect("sym", ")")
        qubits = [self._expect("id").text]
        while self._accept("sym", ","):
            qubits.append(self._expect("id").text)
        self._expect("sym", "{")
        body = []
        while not self._accept("sym", "}"):
            tok = self._peek()
            if tok.text == "barrier":
                self._next()
                while not self._accept("sym", ";"):
                    self._next()
                continue
            gname = self._expect("id").text
            if gname in ("measure", "reset", "if", "opaque"):
                raise UnsupportedFeatureError(
                    f"'{gname}' inside a gate body is not supported "
                    f"(line {tok.line})")
            exprs = []
            if self._accept("sym", "("):
                if not self._accept("sym", ")"):
                    exprs.append(self._parse_expr())
                    while self._accept("sym", ","):
                        exprs.append(self._parse_expr())
                    self._expect("sym", ")")
            args = [self._expect("id").text]
            while self._accept("sym", ","):
                args.append(self._expect("id").text)
            self._expect("sym", ";")
            body.append((gname, exprs, args))
        self.gates[name] = _GateDef(name, params, qubits, body, builtin=False)

    def _lookup_qreg(self, name: str, tok: _Token):
        for rname, offset, size in self.qregs:
            if rname == name:
                return offset, size
        self._error(f"unknown quantum register '{name}'", tok)

    def _lookup_creg(self, name: str, tok: _Token):
        for rname, offset, size in self.cregs:
            if rname == name:
                return offset, size
        self._error(f"unknown classical register '{name}'", tok)

    def _parse_qubit_arg(self) -> list[int]:
        tok = self._expect("id")
        offset, size = self._lookup_qreg(tok.text, tok)
        if self._accept("sym", "["):
            idx = int(self._expect("int").text)
            self._expect("sym", "]")
            if idx >= size:
                raise QubitOutOfRangeError(
                    f"index {idx} out of range for register "
                    f"'{tok.text}[{size}]' (line {tok.line})")
            return [offset + idx]
        return list(range(offset, offset + size))

    def _parse_qubit_args(self) -> list[list[int]]:
        args = [self._parse_qubit_arg()]
        while self._accept("sym", ","):
            args.append(self._parse_qubit_arg())
        return args

    def _parse_measure(self):
        self._next()
        qtok = self._peek()
        qubits = self._parse_qubit_arg()
        self._expect("arrow")
        ctok = self._expect("id")
        coffset, csize = self._lookup_creg(ctok.text, ctok)
        if self._accept("sym", "["):
            cidx = int(self._expect("int").text)
            self._expect("sym", "]")
            if cidx >= csize:
                self._error(f"classical index {cidx} out of range", ctok)
            cbits = [coffset + cidx]
        else:
            cbits = list(range(coffset, coffset + csize))
        self._expect("sym", ";")
        if len(qubits) != len(cbits):
            raise ArityMismatchError(
                f"measure maps {len(qubits)} qubits to {len(cbits)} bits "
                f"(line {qtok.line})")
        self.measurements.extend(zip(qubits, cbits))

    def _parse_application(self):
        tok = self._next()
        name = tok.text
        exprs = []
        if self._accept("sym", "("):
            if not self._accept("sym", ")"):
                exprs.append(self._parse_expr())
                while self._accept("sym", ","):
                    exprs.append(self._parse_expr())
                self._expect("sym", ")")
        args = self._parse_qubit_args()
        self._expect("sym", ";")
        params = tuple(eval_param(e) for e in exprs)
        # Broadcast whole-register arguments.
        length = max(len(a) for a in args)
        for a in args:
            if len(a) not in (1, length):
                raise ArityMismatchError(
                    f"mismatched register sizes in '{name}' "
                    f"(line {tok.line})")
        for i in range(length):
            qubits = [a[i] if len(a) > 1 else a[0] for a in args]
            if len(set(qubits)) != len(qubits):
                raise ArityMismatchError(
                    f"repeated qubit in '{name}' (line {tok.line})")
            self._emit(name, params, qubits, tok, 0)

    def _emit(self, name: str, params: tuple[float, ...],
              qubits: list[int], tok: _Token, depth: int):
        if depth > MAX_EXPANSION_DEPTH:
            raise UnsupportedFeatureError(
                f"gate expansion deeper than {MAX_EXPANSION_DEPTH} levels; "
                f"cyclic definition of '{name}'?")
        primitive = name in ("U", "CX")
        if name == "U":
            name = "u3"
        elif name == "CX":
            name = "cx"
        shape = GATE_SHAPES.get(name)
        gdef = self.gates.get(name)
        keep = shape is not None and (
            primitive
            or (gdef is not None and gdef.builtin and not self.expand_builtins))
        if keep:
            n_params, n_controls, n_targets = shape
            if len(params) != n_params:
                raise ArityMismatchError(
                    f"gate '{name}' takes {n_params} parameters, got "
                    f"{len(params)} (line {tok.line})")
            if len(qubits) != n_controls + n_targets:
                raise ArityMismatchError(
                    f"gate '{name}' acts on {n_controls + n_targets} qubits, "
                    f"got {len(qubits)} (line {tok.line})")
            self.ops.append(GateSpec(
                name, params,
                tuple(qubits[:n_controls]), tuple(qubits[n_controls:])))
            return
        if gdef is None:
            hint = "; did you include \"qelib1.inc\"?" if shape else ""
            raise UnknownGateError(
                f"unknown gate '{name}' (line {tok.line}){hint}")
        if len(params) != len(gdef.params):
            raise ArityMismatchError(
                f"gate '{name}' takes {len(gdef.params)} parameters, got "
                f"{len(params)} (line {tok.line})")
        if len(qubits) != len(gdef.qubits):
            raise ArityMismatchError(
                f"gate '{name}' acts on {len(gdef.qubits)} qubits, got "
                f"{len(qubits)} (line {tok.line})")
        bindings = dict(zip(gdef.params, params))
        qmap = dict(zip(gdef.qubits, qubits))
        for gname, exprs, formal_args in gdef.body:
            sub_params = tuple(eval_param(e, bindings) for e in exprs)
            sub_qubits = []
            for a in formal_args:
                if a not in qmap:
                    raise UnknownGateError(
                        f"gate body of '{name}' uses undeclared qubit '{a}'")
                sub_qubits.append(qmap[a])
            if len(set(sub_qubits)) != len(sub_qubits):
                raise ArityMismatchError(
                    f"repeated qubit inside expansion of '{name}'")
            self._emit(gname, sub_params, sub_qubits, tok, depth + 1)

    # -- expressions --------------------------------------------------------

    def _parse_expr(self):
        node = self._parse_term()
        while True:
            if self._accept("sym", "+"):
                node = ("+", node, self._parse_term())
            elif self._accept("sym", "-"):
                node = ("-", node, self._parse_term())
            else:
                return node

    def _parse_term(self):
        node = self._parse_factor()
        while True:
            if self._accept("sym", "*"):
                node = ("*", node, self._parse_factor())
            elif self._accept("sym", "/"):
                node = ("/", node, self._parse_factor())
            else:
                return node

    def _parse_factor(self):
        node = self._parse_base()
        if self._accept("sym", "^"):
            return ("^", node, self._parse_factor())
        return node

    def _parse_base(self):
        if self._accept("sym", "-"):
            return ("neg", self._parse_base())
        if self._accept("sym", "("):
            node = self._parse_expr()
            self._expect("sym", ")")
            return node
        tok = self._peek()
        if tok.kind in ("real", "int"):
            self._next()
            return ("num", float(tok.text))
        if tok.kind == "id":
            self._next()
            if tok.text == "pi":
                return ("pi",)
            if tok.text in _FUNCTIONS:
                self._expect("sym", "(")
                arg = self._parse_expr()
                self._expect("sym", ")")
                return ("fn", tok.text, arg)
            return ("id", tok.text)
        self._error(f"expected an expression, found {tok.text!r}")


def parse(source: str, source_name: str = "",
          expand_builtins: bool = False) -> Circuit:
    """Parse OpenQASM 2.0 text into a Circuit.

    With ``expand_builtins`` every standard-library gate is expanded
    through its header definition down to u3 and cx; by default the
    standard gates are kept as primitives.
    """
    parser = _Parser(_tokenize(source), source_name)
    parser.expand_builtins = expand_builtins
    parser.parse_program()
    n = sum(size for _, _, size in parser.qregs)
    return Circuit(n=n, ops=parser.ops,
                   measurements=parser.measurements,
                   source_name=source_name)


def parse_file(path, expand_builtins: bool = False) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(str(path)))[0]
    return parse(text, source_name=name, expand_builtins=expand_builtins)
