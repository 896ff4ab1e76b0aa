"""Discrimination rules: a small predicate language over label keys.

Rules files are JSON::

    {"schema_version": 1,
     "rules": [{"if": "low_quality.watermark == true",
                "action": "drop", "reason": "watermarked"}, ...]}

Predicate grammar (whitespace-insensitive)::

    expr       := or_expr
    or_expr    := and_expr ("or" and_expr)*
    and_expr   := unary ("and" unary)*
    unary      := "not" unary | "(" expr ")" | comparison
    comparison := key cmp_op literal | key "in" "[" literal ("," literal)* "]"
    cmp_op     := "==" | "!=" | "<" | "<=" | ">" | ">="
    literal    := number | "true" | "false" | quoted string

Parsing is schema-checked: unknown keys and kind mismatches (ordering a
bool, comparing a number against a string, ...) are rejected up front
with the offending position.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .schema import LabelSchema, UnknownLabelError

ACTIONS = ("drop", "keep", "tag")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op>==|!=|<=|>=|<|>)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<lbracket>\[)
  | (?P<rbracket>\])
  | (?P<comma>,)
  | (?P<number>-?\d+(\.\d+)?)
  | (?P<string>"[^"]*"|'[^']*')
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"and", "or", "not", "in", "true", "false"}


class RuleError(ValueError):
    pass


class RuleSyntaxError(RuleError):
    def __init__(self, message: str, position: int):
        super().__init__(f"at column {position + 1}: {message}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def _lex(text: str) -> list[Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            tok_text = m.group()
            if kind == "word" and tok_text in _KEYWORDS:
                kind = tok_text
            tokens.append(Token(kind, tok_text, i))
        i = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


# --- predicate AST -----------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    key: str
    op: str                  # ==, !=, <, <=, >, >=, in
    value: Any               # literal or tuple of literals for `in`

    def evaluate(self, labels: dict[str, Any]) -> bool:
        if self.key not in labels:
            raise MissingLabelError(self.key)
        actual = labels[self.key]
        if self.op == "==":
            return actual == self.value
        if self.op == "!=":
            return actual != self.value
        if self.op == "in":
            return actual in self.value
        if self.op == "<":
            return actual < self.value
        if self.op == "<=":
            return actual <= self.value
        if self.op == ">":
            return actual > self.value
        if self.op == ">=":
            return actual >= self.value
        raise AssertionError(self.op)

    def keys(self) -> set[str]:
        return {self.key}


@dataclass(frozen=True)
class BoolOp:
    op: str                  # and | or | not
    operands: tuple

    def evaluate(self, labels: dict[str, Any]) -> bool:
        if self.op == "and":
            return all(node.evaluate(labels) for node in self.operands)
        if self.op == "or":
            return any(node.evaluate(labels) for node in self.operands)
        return not self.operands[0].evaluate(labels)

    def keys(self) -> set[str]:
        out: set[str] = set()
        for node in self.operands:
            out |= node.keys()
        return out


class MissingLabelError(RuleError):
    def __init__(self, key: str):
        super().__init__(f"record is missing label {key!r} referenced by a rule")
        self.key = key


class _Parser:
    def __init__(self, text: str, schema: LabelSchema):
        self.tokens = _lex(text)
        self.schema = schema
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise RuleSyntaxError(f"expected {kind}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def parse(self):
        node = self.or_expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise RuleSyntaxError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return node

    def or_expr(self):
        node = self.and_expr()
        while self.peek().kind == "or":
            self.advance()
            node = BoolOp("or", (node, self.and_expr()))
        return node

    def and_expr(self):
        node = self.unary()
        while self.peek().kind == "and":
            self.advance()
            node = BoolOp("and", (node, self.unary()))
        return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "not":
            self.advance()
            return BoolOp("not", (self.unary(),))
        if tok.kind == "lparen":
            self.advance()
            node = self.or_expr()
            self.expect("rparen")
            return node
        return self.comparison()

    def comparison(self):
        tok = self.peek()
        if tok.kind != "word":
            raise RuleSyntaxError(f"expected label key, found {tok.text or 'end of input'!r}", tok.pos)
        key_tok = self.advance()
        key = key_tok.text
        try:
            label = self.schema.label(key)
        except UnknownLabelError:
            raise RuleSyntaxError(f"unknown label key {key!r}", key_tok.pos) from None

        op_tok = self.peek()
        if op_tok.kind == "in":
            self.advance()
            values = self._literal_list()
            for v, pos in values:
                self._check_kind(label, v, pos, ordered=False)
            return Comparison(key, "in", tuple(v for v, _ in values))
        if op_tok.kind != "op":
            raise RuleSyntaxError(
                f"expected comparison operator after {key!r}, found {op_tok.text or 'end of input'!r}",
                op_tok.pos,
            )
        self.advance()
        value, pos = self._literal()
        self._check_kind(label, value, pos, ordered=op_tok.text in ("<", "<=", ">", ">="))
        return Comparison(key, op_tok.text, value)

    def _literal(self) -> tuple[Any, int]:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            value = float(tok.text) if "." in tok.text else int(tok.text)
            return value, tok.pos
        if tok.kind in ("true", "false"):
            self.advance()
            return tok.kind == "true", tok.pos
        if tok.kind == "string":
            self.advance()
            return tok.text[1:-1], tok.pos
        raise RuleSyntaxError(f"expected literal, found {tok.text or 'end of input'!r}", tok.pos)

    def _literal_list(self) -> list[tuple[Any, int]]:
        self.expect("lbracket")
        values = [self._literal()]
        while self.peek().kind == "comma":
            self.advance()
            values.append(self._literal())
        self.expect("rbracket")
        return values

    def _check_kind(self, label, value: Any, pos: int, ordered: bool) -> None:
        if label.kind == "bool":
            if ordered:
                raise RuleSyntaxError(f"label {label.key!r} is boolean; ordering comparison invalid", pos)
            if not isinstance(value, bool):
                raise RuleSyntaxError(f"label {label.key!r} is boolean; literal {value!r} is not", pos)
        elif label.kind == "number":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise RuleSyntaxError(f"label {label.key!r} is numeric; literal {value!r} is not", pos)
        elif label.kind == "category":
            if ordered:
                raise RuleSyntaxError(f"label {label.key!r} is a category; ordering comparison invalid", pos)
            if not isinstance(value, str):
                raise RuleSyntaxError(f"label {label.key!r} is a category; literal {value!r} is not a string", pos)


def parse_predicate(text: str, schema: LabelSchema):
    """Parse one predicate expression, schema-checked."""
    return _Parser(text, schema).parse()


@dataclass(frozen=True)
class Rule:
    predicate: Comparison | BoolOp
    action: str
    reason: str
    source: str

    def keys(self) -> set[str]:
        return self.predicate.keys()


@dataclass
class RuleSet:
    schema_version: int
    rules: list[Rule] = field(default_factory=list)

    def keys(self) -> set[str]:
        out: set[str] = set()
        for rule in self.rules:
            out |= rule.keys()
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "rules": [
                {"if": r.source, "action": r.action, "reason": r.reason} for r in self.rules
            ],
        }


def rules_from_dict(obj: dict[str, Any], schema: LabelSchema) -> RuleSet:
    if "rules" not in obj or not isinstance(obj["rules"], list):
        raise RuleError("rules file must contain a 'rules' array")
    ruleset = RuleSet(schema_version=int(obj.get("schema_version", 1)))
    for idx, entry in enumerate(obj["rules"]):
        try:
            source = entry["if"]
            action = entry["action"]
            reason = entry["reason"]
        except (TypeError, KeyError) as exc:
            raise RuleError(f"rule {idx}: missing field {exc}") from None
        if action not in ACTIONS:
            raise RuleError(f"rule {idx}: action must be one of {ACTIONS}, got {action!r}")
        try:
            predicate = parse_predicate(source, schema)
        except RuleSyntaxError as exc:
            raise RuleSyntaxError(f"rule {idx} ({reason!r}): {exc}", exc.position) from None
        ruleset.rules.append(Rule(predicate=predicate, action=action, reason=reason, source=source))
    return ruleset


def parse_rules(config_text: str, schema: LabelSchema) -> RuleSet:
    """Parse a rules file (JSON text) against a schema."""
    try:
        obj = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise RuleError(f"rules file is not valid JSON: {exc}") from None
    return rules_from_dict(obj, schema)


def load_rules(path: str, schema: LabelSchema) -> RuleSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rules(fh.read(), schema)
