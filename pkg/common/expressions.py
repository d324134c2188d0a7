"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ModelDefinitionException
from .jets import Jet2, guarded_divide

FUNCTIONS = ('sin', 'cos', 'exp')

_PRECEDENCE = {'+': 1, '-': 1, '*': 2, '/': 2}
_UNARY_PRECEDENCE = 3
_ATOM_PRECEDENCE = 4

_TOKEN_PATTERN = re.compile(
    r'\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<name>[A-Za-z_][A-Za-z_0-9]*)'
    r'|(?P<symbol>[-+*/()]))')


class ExpressionTree(object):
    """
    Base node of the frame expression language. Nodes are immutable and
    evaluate either on floats or on Jet2 values.
    """

    def evaluate(self, values):
        raise NotImplementedError

    @property
    def precedence(self):
        return _ATOM_PRECEDENCE

    def emit(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(ExpressionTree):
    value: float

    def evaluate(self, values):
        return self.value

    @property
    def precedence(self):
        return _UNARY_PRECEDENCE if self.value < 0 else _ATOM_PRECEDENCE

    def emit(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Coordinate(ExpressionTree):
    name: str
    index: int

    def evaluate(self, values):
        return values[self.index]

    def emit(self):
        return self.name


@dataclass(frozen=True)
class Negate(ExpressionTree):
    operand: ExpressionTree

    def evaluate(self, values):
        return -self.operand.evaluate(values)

    @property
    def precedence(self):
        return _UNARY_PRECEDENCE

    def emit(self):
        return '-{}'.format(_wrap(self.operand, _UNARY_PRECEDENCE))


@dataclass(frozen=True)
class BinaryOp(ExpressionTree):
    op: str
    left: ExpressionTree
    right: ExpressionTree

    def evaluate(self, values):
        left = self.left.evaluate(values)
        right = self.right.evaluate(values)
        if self.op == '+':
            return left + right
        if self.op == '-':
            return left - right
        if self.op == '*':
            return left * right
        if isinstance(right, Jet2):
            return left / right
        if isinstance(left, Jet2):
            return left * guarded_divide(1.0, right)
        return guarded_divide(left, right)

    @property
    def precedence(self):
        return _PRECEDENCE[self.op]

    def emit(self):
        own = self.precedence
        left = _wrap(self.left, own)
        right = _wrap(self.right, own + 1)
        return '{} {} {}'.format(left, self.op, right)


@dataclass(frozen=True)
class FunctionCall(ExpressionTree):
    function: str
    argument: ExpressionTree

    def evaluate(self, values):
        argument = self.argument.evaluate(values)
        if isinstance(argument, Jet2):
            return getattr(argument, self.function)()
        return getattr(math, self.function)(argument)

    def emit(self):
        return '{}({})'.format(self.function, self.argument.emit())


def _wrap(node, minimum):
    text = node.emit()
    if node.precedence < minimum:
        return '({})'.format(text)
    return text


def constant(value):
    return Constant(float(value))


def parse_expression(text, coordinates: Sequence[str]):
    """ Parses an expression over the given coordinate names. """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return constant(text)
    if not isinstance(text, str):
        raise ExpressionParseException(
            'Expected an expression string, got {!r}'.format(text))
    parser = _Parser(_tokenize(text), list(coordinates), text)
    tree = parser.expression()
    parser.expect_end()
    return tree


def _tokenize(text):
    tokens = []
    position = 0
    stripped = text.rstrip()
    while position < len(stripped):
        match = _TOKEN_PATTERN.match(stripped, position)
        if match is None or match.end() == position:
            raise ExpressionParseException(
                'Unexpected character at {} in {!r}'.format(position, text))
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        position = match.end()
    return tokens


class _Parser(object):
    def __init__(self, tokens, coordinates, text):
        self._tokens = tokens
        self._position = 0
        self._coordinates = coordinates
        self._text = text

    def _peek(self):
        if self._position < len(self._tokens):
            return self._tokens[self._position]
        return (None, None)

    def _next(self):
        token = self._peek()
        self._position += 1
        return token

    def expect_end(self):
        kind, value = self._peek()
        if kind is not None:
            raise ExpressionParseException(
                'Unexpected {!r} in {!r}'.format(value, self._text))

    def expression(self):
        node = self.term()
        while self._peek() in (('symbol', '+'), ('symbol', '-')):
            _, op = self._next()
            node = BinaryOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self._peek() in (('symbol', '*'), ('symbol', '/')):
            _, op = self._next()
            node = BinaryOp(op, node, self.unary())
        return node

    def unary(self):
        if self._peek() == ('symbol', '-'):
            self._next()
            return Negate(self.unary())
        if self._peek() == ('symbol', '+'):
            self._next()
            return self.unary()
        return self.atom()

    def atom(self):
        kind, value = self._next()
        if kind == 'number':
            return Constant(float(value))
        if kind == 'name':
            if value in FUNCTIONS:
                self._expect('(')
                argument = self.expression()
                self._expect(')')
                return FunctionCall(value, argument)
            if value not in self._coordinates:
                raise ExpressionParseException(
                    'Unknown name {!r} in {!r}. Declared coordinates: {}'.format(
                        value, self._text, self._coordinates))
            return Coordinate(value, self._coordinates.index(value))
        if (kind, value) == ('symbol', '('):
            node = self.expression()
            self._expect(')')
            return node
        raise ExpressionParseException(
            'Unexpected {!r} in {!r}'.format(value, self._text))

    def _expect(self, symbol):
        kind, value = self._next()
        if (kind, value) != ('symbol', symbol):
            raise ExpressionParseException(
                'Expected {!r} in {!r}'.format(symbol, self._text))


def jet_eval(expression, point, order=2):
    """ Value, gradient and hessian of an expression at a chart point. """
    dimension = len(point)
    variables = [Jet2.variable(value, index, dimension, order)
                 for index, value in enumerate(point)]
    result = expression.evaluate(variables)
    if not isinstance(result, Jet2):
        result = Jet2.constant(result, dimension, order)
    return result


class ExpressionParseException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)
