"""
Gauss code parsing and the indexing conventions for knot projections/diagrams

Conventions used everywhere else:
  - crossings are labeled 1..c in order of first appearance along the traversal
  - passes are positions 1..2c along the traversal (0-based internally)
  - base point b_j sits on edge e_j, immediately before pass j
  - a diagram is a projection plus an assignment index in 0..2^c-1; bit i set
    means the first pass through crossing i+1 is an overpass
"""

import re
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional, Tuple, Union

from src.utils.errors import (
    BadToken,
    EmptyInput,
    InconsistentKind,
    IndexOutOfRange,
    InputError,
    LabelNotTwice,
    MissingKind,
)

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r'^([OoUu])?([0-9]+)$')


class PassKind(Enum):
    """Over/under information of a single pass through a crossing"""
    OVER = 'O'
    UNDER = 'U'

    @property
    def opposite(self) -> 'PassKind':
        return PassKind.UNDER if self is PassKind.OVER else PassKind.OVER

    def __neg__(self) -> 'PassKind':
        return self.opposite

    @property
    def sign(self) -> int:
        # ou matrix convention: 1 means over, -1 means under
        return 1 if self is PassKind.OVER else -1


@dataclass(frozen=True)
class KnotProjection:
    """
    Cyclic double-occurrence word of crossing labels.

    Construct with `KnotProjection.from_labels` to normalize arbitrary labels;
    the constructor itself only accepts an already normalized word.
    """
    passes: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'passes', tuple(self.passes))
        _validate_labels(self.passes)
        expected = 1
        for position, label in enumerate(self.passes, start=1):
            if label > expected:
                raise InputError(f"label {label} at position {position} is not in first-appearance order")
            if label == expected:
                expected += 1

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> 'KnotProjection':
        labels = list(labels)
        _validate_labels(labels)
        relabel = first_appearance_map(labels)
        return cls(tuple(relabel[label] for label in labels))

    @property
    def crossing_count(self) -> int:
        return len(self.passes) // 2

    @cached_property
    def pass_positions(self) -> Tuple[Tuple[int, int], ...]:
        """0-based (first, second) positions of each crossing, indexed by label - 1"""
        seen = {}
        for position, label in enumerate(self.passes):
            seen.setdefault(label, []).append(position)
        return tuple(tuple(seen[label]) for label in range(1, self.crossing_count + 1))

    @cached_property
    def is_second_pass(self) -> Tuple[bool, ...]:
        flags = [False] * len(self.passes)
        for _, second in self.pass_positions:
            flags[second] = True
        return tuple(flags)

    def partner(self, position: int) -> int:
        """0-based position of the other pass through the same crossing"""
        first, second = self.pass_positions[self.passes[position] - 1]
        return second if position == first else first

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class KnotDiagram:
    """A projection with over/under information, identified by its assignment index"""
    projection: KnotProjection
    assignment_index: int

    def __post_init__(self):
        high = 2 ** self.projection.crossing_count - 1
        if not 0 <= self.assignment_index <= high:
            raise IndexOutOfRange('assignment', self.assignment_index, 0, high)

    @property
    def crossing_count(self) -> int:
        return self.projection.crossing_count

    @property
    def assignment(self) -> Tuple[PassKind, ...]:
        """Kind of the first pass through each crossing"""
        return tuple(
            PassKind.OVER if (self.assignment_index >> i) & 1 else PassKind.UNDER
            for i in range(self.crossing_count)
        )

    @cached_property
    def pass_kinds(self) -> Tuple[PassKind, ...]:
        """Kind of every pass, by traversal position"""
        first_kinds = self.assignment
        return tuple(
            -first_kinds[label - 1] if second else first_kinds[label - 1]
            for label, second in zip(self.projection.passes, self.projection.is_second_pass)
        )

    def __str__(self) -> str:
        return render(self)


def first_appearance_map(labels: Iterable[int]) -> dict:
    relabel = {}
    for label in labels:
        if label not in relabel:
            relabel[label] = len(relabel) + 1
    return relabel


def _validate_labels(labels) -> None:
    if len(labels) == 0:
        raise EmptyInput()
    counts = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    for label, count in counts.items():
        if count != 2:
            raise LabelNotTwice(label, count)


def _tokenize(text: str) -> List[Tuple[Optional[str], int]]:
    if text is None or not text.strip():
        raise EmptyInput()
    tokens = []
    for position, token in enumerate(text.split(), start=1):
        match = TOKEN_PATTERN.match(token)
        if not match or int(match.group(2)) == 0:
            raise BadToken(position, token)
        prefix = match.group(1).upper() if match.group(1) else None
        tokens.append((prefix, int(match.group(2))))
    return tokens


def parse_projection(text: str) -> KnotProjection:
    """Parse a Gauss code; O/U prefixes are accepted and ignored"""
    tokens = _tokenize(text)
    return KnotProjection.from_labels(label for _, label in tokens)


def parse_diagram(text: str) -> KnotDiagram:
    """Parse an annotated Gauss code such as 'O1 U2 O3 U1 O2 U3'"""
    tokens = _tokenize(text)
    for position, (prefix, _) in enumerate(tokens, start=1):
        if prefix is None:
            raise MissingKind(position)

    labels = [label for _, label in tokens]
    projection = KnotProjection.from_labels(labels)
    relabel = first_appearance_map(labels)

    first_kind = {}
    index = 0
    for prefix, label in tokens:
        kind = PassKind(prefix)
        if label not in first_kind:
            first_kind[label] = kind
            if kind is PassKind.OVER:
                index |= 1 << (relabel[label] - 1)
        elif first_kind[label] is kind:
            raise InconsistentKind(label)

    return KnotDiagram(projection, index)


def parse_code(text: str) -> Union[KnotProjection, KnotDiagram]:
    """Parse either form, deciding by the presence of O/U prefixes"""
    tokens = _tokenize(text)
    if any(prefix is not None for prefix, _ in tokens):
        return parse_diagram(text)
    return parse_projection(text)


def parse_diagram_arg(code: str, assignment: Optional[int] = None) -> KnotDiagram:
    """
    Resolve a diagram given either as an annotated code or as a plain code
    plus an assignment index.
    """
    if assignment is None:
        return parse_diagram(code)
    return diagram_from_assignment(parse_projection(code), assignment)


def render(obj: Union[KnotProjection, KnotDiagram]) -> str:
    if isinstance(obj, KnotDiagram):
        return ' '.join(
            f"{kind.value}{label}"
            for kind, label in zip(obj.pass_kinds, obj.projection.passes)
        )
    return ' '.join(str(label) for label in obj.passes)


def diagram_from_assignment(projection: KnotProjection, index: int) -> KnotDiagram:
    return KnotDiagram(projection, index)


def shadow(diagram: KnotDiagram) -> KnotProjection:
    return diagram.projection


def mirror(diagram: KnotDiagram) -> KnotDiagram:
    """The diagram with every crossing changed"""
    full = 2 ** diagram.crossing_count - 1
    return KnotDiagram(diagram.projection, full ^ diagram.assignment_index)
