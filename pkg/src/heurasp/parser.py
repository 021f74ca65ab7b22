"""Tokenizer and recursive-descent parser for the input language.

Statements end with `.`, `%` starts a line comment.  Both `:-` and the
arrow `←` are accepted, as are the ASCII and typeset comparison symbols.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .syntax import (
    SIGN_NEG, SIGN_NONE, SIGN_POS,
    Aggregate, AggregateElement, Arith, Atom, ChoiceElement, ChoiceHead,
    Comparison, HeuristicAtom, HeuristicDirective, Integer, Interval,
    Program, Rule, Symbol, Variable,
)

_TOKEN_RE = re.compile(r"""
    (?P<WS>\s+)
  | (?P<COMMENT>%[^\n]*)
  | (?P<DOTDOT>\.\.)
  | (?P<ARROW>:-|←)
  | (?P<HEURISTIC>\#heuristic\b)
  | (?P<AGGFUNC>\#\w+)
  | (?P<INT>\d+)
  | (?P<IDENT>[a-z]\w*)
  | (?P<VAR>[A-Z]\w*)
  | (?P<ANON>_\w*)
  | (?P<LE><=|≤)
  | (?P<GE>>=|≥)
  | (?P<NE>!=|≠)
  | (?P<OP>[=<>{}()\[\];:,.@+\-*\\])
""", re.VERBOSE)

_KEYWORDS = {"not"}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind},{self.text!r})"


def tokenize(text):
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "WS":
            nl = value.count("\n")
            if nl:
                line += nl
                line_start = pos + value.rfind("\n") + 1
        elif kind != "COMMENT":
            if kind == "LE":
                tokens.append(Token("OP", "<=", line, col))
            elif kind == "GE":
                tokens.append(Token("OP", ">=", line, col))
            elif kind == "NE":
                tokens.append(Token("OP", "!=", line, col))
            elif kind == "ARROW":
                tokens.append(Token("ARROW", ":-", line, col))
            elif kind == "IDENT" and value in _KEYWORDS:
                tokens.append(Token(value.upper(), value, line, col))
            else:
                tokens.append(Token(kind, value, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0
        self.anon_counter = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset=0):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_op(self, text):
        tok = self.peek()
        return tok.kind == "OP" and tok.text == text

    def expect_op(self, text):
        tok = self.next()
        if tok.kind != "OP" or tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def fail(self, message, tok=None, code=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col, code)

    # -- entry point -------------------------------------------------------

    def parse_program(self):
        rules = []
        directives = []
        while self.peek().kind != "EOF":
            stmt = self.parse_statement()
            if isinstance(stmt, HeuristicDirective):
                directives.append(stmt)
            else:
                rules.append(stmt)
        return Program(tuple(rules), tuple(directives))

    def parse_statement(self):
        tok = self.peek()
        if tok.kind == "HEURISTIC":
            return self.parse_directive()
        if tok.kind == "INT" or (tok.kind == "VAR" and self.peek(1).text == "{"):
            # A term in front of `{` is a choice lower bound.
            self.fail("bounded choice heads are not supported", tok,
                      code="E_UNSUPPORTED_BOUNDS")
        if tok.kind == "ARROW":
            self.next()
            body_pos, body_neg = self.parse_body()
            self.expect_op(".")
            return Rule(None, body_pos, body_neg)
        head = self.parse_head()
        if self.peek().kind == "ARROW":
            self.next()
            body_pos, body_neg = self.parse_body()
        else:
            body_pos, body_neg = (), ()
        self.expect_op(".")
        return Rule(head, body_pos, body_neg)

    # -- heads ---------------------------------------------------------------

    def parse_head(self):
        if self.at_op("{"):
            return self.parse_choice_head()
        return self.parse_classical_atom()

    def parse_choice_head(self):
        self.expect_op("{")
        elements = []
        while True:
            atom = self.parse_classical_atom()
            condition = []
            if self.at_op(":"):
                self.next()
                condition.append(self.parse_condition_element())
                while self.at_op(","):
                    self.next()
                    condition.append(self.parse_condition_element())
            elements.append(ChoiceElement(atom, tuple(condition)))
            if self.at_op(";"):
                self.next()
                continue
            break
        self.expect_op("}")
        tok = self.peek()
        if tok.kind in ("INT", "VAR"):
            self.fail("bounded choice heads are not supported", tok,
                      code="E_UNSUPPORTED_BOUNDS")
        return ChoiceHead(tuple(elements))

    def parse_condition_element(self):
        # Atom or comparison inside a choice element condition.
        return self.parse_body_element(allow_aggregate=False)

    # -- bodies ----------------------------------------------------------------

    def parse_body(self):
        positive, negative = [], []
        while True:
            if self.peek().kind == "NOT":
                self.next()
                negative.append(self.parse_classical_atom())
            else:
                positive.append(self.parse_body_element(allow_aggregate=True))
            if self.at_op(","):
                self.next()
                continue
            break
        return tuple(positive), tuple(negative)

    def parse_body_element(self, allow_aggregate):
        tok = self.peek()
        if tok.kind == "AGGFUNC" or (self.is_term_start(tok) and self.aggregate_follows()):
            if not allow_aggregate:
                self.fail("aggregate not allowed here", tok, code="E_UNSUPPORTED")
            return self.parse_aggregate_atom()
        if tok.kind == "IDENT" and not self.comparison_follows():
            return self.parse_classical_atom()
        # Otherwise this is a comparison between two terms.
        left = self.parse_term()
        op = self.parse_comparison_op()
        right = self.parse_term()
        return Comparison(op, left, right)

    def is_term_start(self, tok):
        return (tok.kind in ("INT", "VAR", "ANON", "IDENT")
                or (tok.kind == "OP" and tok.text in ("(", "-")))

    def comparison_follows(self):
        """After an IDENT at self.pos, does a comparison operator follow?

        Looks past a balanced argument list so that `p(X) = q` style input
        is classified as a comparison on symbolic terms.
        """
        i = self.pos + 1
        if i < len(self.tokens) and self.tokens[i].text == "(":
            depth = 1
            i += 1
            while i < len(self.tokens) and depth:
                if self.tokens[i].text == "(":
                    depth += 1
                elif self.tokens[i].text == ")":
                    depth -= 1
                i += 1
        while i < len(self.tokens) and self.tokens[i].text in ("+", "-", "*", "\\", ".."):
            i += 2  # skip operator and one operand token, coarse but enough
        return i < len(self.tokens) and self.tokens[i].text in ("=", "!=", "<", "<=", ">", ">=")

    def aggregate_follows(self):
        """Is the upcoming input `term REL #func {...}`?"""
        i = self.pos
        depth = 0
        while i < len(self.tokens):
            t = self.tokens[i]
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
            elif depth == 0:
                if t.kind == "AGGFUNC":
                    return True
                if t.text in (",", ".", ";", "}") or t.kind in ("ARROW", "EOF", "NOT"):
                    return False
            i += 1
        return False

    def parse_comparison_op(self):
        tok = self.next()
        if tok.kind == "OP" and tok.text in ("=", "!=", "<", "<=", ">", ">="):
            return tok.text
        self.fail(f"expected comparison operator, found {tok.text!r}", tok)

    def parse_aggregate_atom(self):
        """Parse `term REL #fn {...}` or `#fn {...} REL term`, canonicalizing
        to a lower bound.  Anything that amounts to an upper bound is
        rejected."""
        tok = self.peek()
        if tok.kind == "AGGFUNC":
            func_tok = self.next()
            elements = self.parse_aggregate_elements()
            op = self.parse_comparison_op()
            bound = self.parse_term()
            # `#fn {...} >= k` is the lower bound k; `> k` is k+1.
            if op == ">=":
                pass
            elif op == ">":
                bound = Arith("+", bound, Integer(1))
            else:
                self.fail("only lower-bounded aggregates are supported",
                          func_tok, code="E_UNSUPPORTED_BOUNDS")
        else:
            bound = self.parse_term()
            op = self.parse_comparison_op()
            if op == "<":
                bound = Arith("+", bound, Integer(1))
            elif op != "<=":
                self.fail("only lower-bounded aggregates are supported",
                          code="E_UNSUPPORTED_BOUNDS")
            func_tok = self.next()
            if func_tok.kind != "AGGFUNC":
                self.fail("expected aggregate function", func_tok)
            elements = self.parse_aggregate_elements()
        func = func_tok.text[1:]
        if func not in ("count", "sum"):
            self.fail(f"aggregate function #{func} is not supported",
                      func_tok, code="E_UNSUPPORTED")
        return Aggregate(func, elements, bound)

    def parse_aggregate_elements(self):
        self.expect_op("{")
        elements = []
        while True:
            terms = [self.parse_term()]
            while self.at_op(","):
                self.next()
                terms.append(self.parse_term())
            condition = []
            if self.at_op(":"):
                self.next()
                condition.append(self.parse_body_element(allow_aggregate=False))
                while self.at_op(","):
                    self.next()
                    condition.append(self.parse_body_element(allow_aggregate=False))
            elements.append(AggregateElement(tuple(terms), tuple(condition)))
            if self.at_op(";"):
                self.next()
                continue
            break
        self.expect_op("}")
        if len({len(e.terms) for e in elements}) > 1:
            self.fail("aggregate elements must share one tuple arity",
                      code="E_UNSUPPORTED")
        return tuple(elements)

    # -- directives ---------------------------------------------------------

    def parse_directive(self):
        self.next()  # #heuristic
        head = self.parse_heuristic_atom()
        positive, negative = [], []
        if self.at_op(":"):
            self.next()
            while True:
                if self.peek().kind == "NOT":
                    self.next()
                    negative.append(self.parse_heuristic_atom())
                else:
                    positive.append(self.parse_heuristic_condition_element())
                if self.at_op(","):
                    self.next()
                    continue
                break
        self.expect_op(".")
        weight, level = Integer(0), Integer(0)
        if self.at_op("["):
            self.next()
            weight = self.parse_term()
            if self.at_op("@"):
                self.next()
                level = self.parse_term()
            self.expect_op("]")
        return HeuristicDirective(head, tuple(positive), tuple(negative),
                                  weight, level)

    def parse_heuristic_condition_element(self):
        tok = self.peek()
        if tok.kind == "AGGFUNC" or (self.is_term_start(tok) and self.aggregate_follows()):
            self.fail("aggregates are not allowed in heuristic conditions",
                      tok, code="E_UNSUPPORTED")
        if tok.text in (SIGN_POS, SIGN_NEG) or (
                tok.kind == "IDENT" and not self.comparison_follows()):
            return self.parse_heuristic_atom()
        left = self.parse_term()
        op = self.parse_comparison_op()
        right = self.parse_term()
        return Comparison(op, left, right)

    def parse_heuristic_atom(self):
        sign = SIGN_NONE
        tok = self.peek()
        if tok.kind == "OP" and tok.text in (SIGN_POS, SIGN_NEG):
            sign = tok.text
            self.next()
        return HeuristicAtom(sign, self.parse_classical_atom())

    # -- atoms and terms ------------------------------------------------------

    def parse_classical_atom(self):
        tok = self.next()
        if tok.kind != "IDENT":
            self.fail(f"expected predicate name, found {tok.text!r}", tok)
        args = ()
        if self.at_op("("):
            self.next()
            out = [self.parse_term()]
            while self.at_op(","):
                self.next()
                out.append(self.parse_term())
            self.expect_op(")")
            args = tuple(out)
        return Atom(tok.text, args)

    def parse_term(self):
        term = self.parse_additive()
        if self.peek().kind == "DOTDOT":
            self.next()
            high = self.parse_additive()
            return Interval(term, high)
        return term

    def parse_additive(self):
        term = self.parse_multiplicative()
        while self.peek().kind == "OP" and self.peek().text in ("+", "-"):
            op = self.next().text
            term = Arith(op, term, self.parse_multiplicative())
        return term

    def parse_multiplicative(self):
        term = self.parse_primary()
        while self.peek().kind == "OP" and self.peek().text in ("*", "\\"):
            op = self.next().text
            term = Arith(op, term, self.parse_primary())
        return term

    def parse_primary(self):
        tok = self.next()
        if tok.kind == "INT":
            return Integer(int(tok.text))
        if tok.kind == "VAR":
            return Variable(tok.text)
        if tok.kind == "ANON":
            if tok.text != "_":
                self.fail("identifiers may not start with '_'", tok)
            self.anon_counter += 1
            return Variable(f"_{self.anon_counter}")
        if tok.kind == "IDENT":
            if self.at_op("("):
                self.fail("function symbols with arguments are not supported",
                          tok, code="E_UNSUPPORTED")
            return Symbol(tok.text)
        if tok.kind == "OP" and tok.text == "(":
            term = self.parse_term()
            self.expect_op(")")
            return term
        if tok.kind == "OP" and tok.text == "-":
            inner = self.parse_primary()
            if isinstance(inner, Integer):
                return Integer(-inner.value)
            return Arith("-", Integer(0), inner)
        self.fail(f"expected term, found {tok.text!r}", tok)


def parse_program(text):
    """Parse UTF-8 source into an un-normalized Program."""
    return Parser(text).parse_program()
