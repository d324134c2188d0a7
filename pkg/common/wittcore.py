"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ModelDefinitionException
from .framebackends import FrameBackend

SYMMETRY_TOLERANCE = 1e-12
PAIRING_CONDITION = 1e12
LIE_TOLERANCE = 1e-12
CHART_TOLERANCE = 1e-9

_LABEL_PATTERN = re.compile(r'^(?P<kind>[pq])(?P<ordinal>\d+)(?P<star>\*?)$')


class BlockKind(Enum):
    Anisotropic = 'q'
    Isotropic = 'p'
    IsotropicDual = 'p*'


@dataclass(frozen=True)
class BlockLabel:
    """
    Label of a Witt summand. ordinal is the l of q_l or the k of p_k;
    index is the signed integer whose parity drives the symmetry involution.
    """

    kind: BlockKind
    ordinal: int
    index: int

    @classmethod
    def anisotropic(cls, ordinal, index=None):
        return cls(BlockKind.Anisotropic, ordinal, 1 - ordinal if index is None else index)

    @classmethod
    def isotropic(cls, ordinal, index=None):
        return cls(BlockKind.Isotropic, ordinal, ordinal if index is None else index)

    @classmethod
    def parse(cls, name, index=None):
        match = _LABEL_PATTERN.match(str(name).strip())
        if match is None:
            raise UnknownBlockException('{!r} is not a block name'.format(name))
        ordinal = int(match.group('ordinal'))
        if match.group('kind') == 'q':
            if match.group('star'):
                raise UnknownBlockException('Anisotropic block {!r} has no dual'.format(name))
            return cls.anisotropic(ordinal, index)
        label = cls.isotropic(ordinal, index)
        return label.star() if match.group('star') else label

    @property
    def name(self):
        if self.kind is BlockKind.Anisotropic:
            return 'q{}'.format(self.ordinal)
        suffix = '*' if self.kind is BlockKind.IsotropicDual else ''
        return 'p{}{}'.format(self.ordinal, suffix)

    @property
    def is_isotropic(self):
        return self.kind is not BlockKind.Anisotropic

    @property
    def parity(self):
        return self.index % 2

    def star(self):
        if self.kind is BlockKind.Isotropic:
            return BlockLabel(BlockKind.IsotropicDual, self.ordinal, self.index)
        if self.kind is BlockKind.IsotropicDual:
            return BlockLabel(BlockKind.Isotropic, self.ordinal, self.index)
        return self

    def __str__(self):
        return self.name


class WittGrading(object):
    """
    Ordered blocks (label, dimension) plus the block of every frame slot.
    Slots are 0-based here; documents and the CLI use 1-based indices.
    """

    def __init__(self, blocks, frame_slots=None, parity_mode=False):
        self.blocks = tuple((label, int(dimension)) for label, dimension in blocks)
        if frame_slots is None:
            frame_slots = [label for label, dimension in self.blocks for _ in range(dimension)]
        self.frame_slots = tuple(frame_slots)
        self.parity_mode = parity_mode
        self._slots = {}
        for slot, label in enumerate(self.frame_slots):
            self._slots.setdefault(label, []).append(slot)
        self._slots = {label: np.array(slots, dtype=int) for label, slots in self._slots.items()}

    @property
    def labels(self):
        return [label for label, _ in self.blocks]

    @property
    def dimension(self):
        return len(self.frame_slots)

    def block_dimension(self, label):
        for block, dimension in self.blocks:
            if block == label:
                return dimension
        raise UnknownBlockException('Unknown block {}'.format(label))

    def label(self, name):
        if isinstance(name, BlockLabel):
            self.block_dimension(name)
            return name
        for label in self.labels:
            if label.name == str(name):
                return label
        raise UnknownBlockException(
            'Unknown block {!r}. Known blocks: {}'.format(
                name, ', '.join(label.name for label in self.labels)))

    def slots(self, label):
        label = self.label(label)
        return self._slots.get(label, np.array([], dtype=int))

    def block_of(self, slot):
        return self.frame_slots[slot]

    def mask(self, labels):
        selected = [self.label(label) for label in labels]
        return np.array([label in selected for label in self.frame_slots])

    def isotropic_pairs(self):
        return [(label, label.star()) for label in self.labels
                if label.kind is BlockKind.Isotropic]

    def with_indices(self, indices):
        """ Re-labels blocks by name -> signed index and enables parity mode. """
        renamed = {}
        for name, index in indices.items():
            label = self.label(name)
            renamed[label] = int(index)
            if label.is_isotropic:
                renamed.setdefault(label.star(), int(index))
                if renamed[label.star()] != int(index):
                    raise ParityUnassignedException(
                        'Blocks {} and {} must share one index'.format(label, label.star()))

        def relabel(label):
            if label not in renamed:
                return label
            return BlockLabel(label.kind, label.ordinal, renamed[label])
        blocks = [(relabel(label), dimension) for label, dimension in self.blocks]
        slots = [relabel(label) for label in self.frame_slots]
        logging.debug('Block indices set to {}'.format(
            {label.name: label.index for label, _ in blocks}))
        return WittGrading(blocks, slots, parity_mode=True)

    def parity_signs(self):
        """ Diagonal of the involution delta: +1 on even blocks, -1 on odd blocks. """
        if not self.parity_mode:
            raise ParityUnassignedException(
                'Parity mode is not enabled. Assign block indices first')
        return np.array([-1.0 if label.parity else 1.0 for label in self.frame_slots])

    def __eq__(self, other):
        return isinstance(other, WittGrading) \
            and self.blocks == other.blocks \
            and self.frame_slots == other.frame_slots

    def __repr__(self):
        return 'WittGrading({})'.format(
            ', '.join('{}:{}'.format(label.name, dimension) for label, dimension in self.blocks))


class WittViolation(Enum):
    DegeneratePairing = 'DegeneratePairing'
    DimensionMismatch = 'DimensionMismatch'
    IndefiniteAnisotropicBlock = 'IndefiniteAnisotropicBlock'
    DegenerateAnisotropicBlock = 'DegenerateAnisotropicBlock'
    OverlappingSlots = 'OverlappingSlots'
    NonOrthogonalBlocks = 'NonOrthogonalBlocks'
    NotSymmetric = 'NotSymmetric'
    InvalidLabel = 'InvalidLabel'
    DuplicateLabel = 'DuplicateLabel'


class WittStructure(object):
    """ A validated grading and constant Gram matrix. """

    def __init__(self, grading, gram, lax=False):
        self.grading = grading
        self.gram = np.array(gram, dtype=float)
        self.gram.setflags(write=False)
        self.gram_inverse = np.linalg.inv(self.gram)
        self.gram_inverse.setflags(write=False)
        self.lax = lax

    @property
    def dimension(self):
        return self.grading.dimension

    def inner(self, v, w):
        return float(np.asarray(v) @ self.gram @ np.asarray(w))

    def project(self, v, label):
        vector = np.asarray(v, dtype=float)
        mask = np.zeros(self.dimension, dtype=bool)
        mask[self.grading.slots(label)] = True
        return np.where(mask, vector, 0.0)

    def flat(self, v):
        return self.gram @ np.asarray(v, dtype=float)

    def sharp(self, alpha, label=None):
        vector = self.gram_inverse @ np.asarray(alpha, dtype=float)
        if label is None:
            return vector
        return self.project(vector, label)

    def restricted_sharp(self, alpha, labels):
        """
        The vector u supported on the given blocks with g(u, Y) = alpha(Y)
        for every Y in those blocks.
        """
        slots = np.concatenate([self.grading.slots(label) for label in labels])
        vector = np.zeros(self.dimension)
        sub_gram = self.gram[np.ix_(slots, slots)]
        vector[slots] = np.linalg.solve(sub_gram, np.asarray(alpha, dtype=float)[slots])
        return vector


class DistinguishedNullPair(object):
    def __init__(self, n_slot, nstar_slot):
        self.n_slot = int(n_slot)
        self.nstar_slot = int(nstar_slot)

    def validate(self, structure):
        grading = structure.grading
        dimension = grading.dimension
        if not (0 <= self.n_slot < dimension and 0 <= self.nstar_slot < dimension):
            raise NotNullPairModelException(
                'Null pair slots {} are outside the frame'.format(self.slots))
        n_block = grading.block_of(self.n_slot)
        nstar_block = grading.block_of(self.nstar_slot)
        if not n_block.is_isotropic or nstar_block != n_block.star():
            raise NotNullPairModelException(
                'Slots {} do not lie in a dual isotropic pair'.format(self.slots))
        gram = structure.gram
        n, nstar = self.n_slot, self.nstar_slot
        if gram[n, n] != 0.0 or gram[nstar, nstar] != 0.0 \
                or abs(gram[n, nstar] - 1.0) > SYMMETRY_TOLERANCE:
            raise NotNullPairModelException(
                'Null pair must satisfy g(n,n)=g(n*,n*)=0 and g(n,n*)=1, got {} {} {}'.format(
                    gram[n, n], gram[nstar, nstar], gram[n, nstar]))
        return self

    @property
    def slots(self):
        return (self.n_slot, self.nstar_slot)

    def null_blocks(self, grading):
        return (grading.block_of(self.n_slot), grading.block_of(self.nstar_slot))

    def is_rank_one(self, grading):
        return grading.block_dimension(grading.block_of(self.n_slot)) == 1


class FrameModel(object):
    """
    Adapted frame model: validated Witt structure, frame backend and the
    optional null pair, complex structure J and Fefferman inputs.
    """

    def __init__(self, structure, backend, null_pair=None, name='',
                 complex_structure=None, fefferman=None, params=None):
        if not isinstance(structure, WittStructure):
            raise ValueError('Expected a validated WittStructure')
        if not isinstance(backend, FrameBackend):
            raise ValueError('Expected a FrameBackend')
        if backend.chart_dimension != structure.dimension:
            raise ModelDefinitionException(
                'Backend dimension {} differs from the grading dimension {}'.format(
                    backend.chart_dimension, structure.dimension))
        self.structure = structure
        self.backend = backend
        self.null_pair = None if null_pair is None else null_pair.validate(structure)
        self.name = name
        self.complex_structure = None if complex_structure is None \
            else np.array(complex_structure, dtype=float)
        self.fefferman = fefferman
        self.params = dict(params or {})
        self._memo = {}

    @property
    def grading(self):
        return self.structure.grading

    @property
    def gram(self):
        return self.structure.gram

    @property
    def dimension(self):
        return self.structure.dimension

    @property
    def default_tolerance(self):
        return LIE_TOLERANCE if self.backend.is_constant else CHART_TOLERANCE

    def origin(self):
        return np.zeros(self.backend.chart_dimension)

    def frame_matrix(self, x):
        return self.backend.frame_matrix(x)

    def memoize(self, key, compute):
        """ Caches point-independent values of constant backends. """
        if not self.backend.is_constant:
            return compute()
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def with_grading(self, grading):
        structure = validate_witt_structure(grading, self.gram, lax=self.structure.lax)
        return FrameModel(structure, self.backend, self.null_pair, self.name,
                          self.complex_structure, self.fefferman, self.params)

    def __repr__(self):
        return 'FrameModel(name={}, grading={})'.format(self.name, self.grading)


def validate_witt_structure(grading, gram, lax=False):
    """
    Checks the grading and Gram matrix of a Witt decomposition and returns
    a WittStructure. Every violated clause is listed in the raised error.
    """
    violations = []
    matrix = np.array(gram, dtype=float)
    dimension = grading.dimension

    violations.extend(_label_violations(grading))
    total = sum(dimension for _, dimension in grading.blocks)
    if total != dimension or matrix.shape != (dimension, dimension):
        violations.append((WittViolation.OverlappingSlots,
                           'Block dimensions sum to {}, frame has {} slots, Gram is {}'.format(
                               total, dimension, matrix.shape)))
        raise InvalidWittStructureException(violations)
    for label, block_dimension in grading.blocks:
        assigned = len(grading.slots(label))
        if assigned != block_dimension:
            violations.append((WittViolation.OverlappingSlots,
                               'Block {} declares {} slots but {} are assigned'.format(
                                   label, block_dimension, assigned)))
    for label in grading.frame_slots:
        if label not in grading.labels:
            violations.append((WittViolation.OverlappingSlots,
                               'A frame slot refers to the undeclared block {}'.format(label)))
            break

    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
        violations.append((WittViolation.NotSymmetric, 'Gram matrix is not symmetric'))

    violations.extend(_pairing_violations(grading, matrix))
    violations.extend(_orthogonality_violations(grading, matrix))
    violations.extend(_anisotropic_violations(grading, matrix, lax))

    if violations:
        raise InvalidWittStructureException(violations)
    logging.debug('Validated Witt structure {}'.format(grading))
    return WittStructure(grading, matrix, lax)


def _label_violations(grading):
    violations = []
    seen = set()
    for label, _ in grading.blocks:
        if label in seen:
            violations.append((WittViolation.DuplicateLabel,
                               'Block {} is declared twice'.format(label)))
        seen.add(label)
        if label.is_isotropic and label.index < 1:
            violations.append((WittViolation.InvalidLabel,
                               'Isotropic block {} needs a positive index, got {}'.format(
                                   label, label.index)))
        if not label.is_isotropic and label.index > 0:
            violations.append((WittViolation.InvalidLabel,
                               'Anisotropic block {} needs a non-positive index, got {}'.format(
                                   label, label.index)))
    indices = {}
    for label, _ in grading.blocks:
        key = (label.kind is BlockKind.Anisotropic, label.index)
        owner = label if not label.is_isotropic else (label.ordinal, 'p')
        if key in indices and indices[key] != owner:
            violations.append((WittViolation.DuplicateLabel,
                               'Index {} is used by more than one block'.format(label.index)))
        indices[key] = owner
    return violations


def _pairing_violations(grading, matrix):
    violations = []
    for label, dual in grading.isotropic_pairs():
        if dual not in grading.labels:
            violations.append((WittViolation.DimensionMismatch,
                               'Block {} has no dual block {}'.format(label, dual)))
            continue
        if grading.block_dimension(label) != grading.block_dimension(dual):
            violations.append((WittViolation.DimensionMismatch,
                               'Blocks {}/{} have dimensions {} and {}'.format(
                                   label, dual, grading.block_dimension(label),
                                   grading.block_dimension(dual))))
            continue
        pairing = matrix[np.ix_(grading.slots(label), grading.slots(dual))]
        if pairing.size == 0 or np.linalg.cond(pairing) > PAIRING_CONDITION:
            violations.append((WittViolation.DegeneratePairing,
                               'The {}/{} pairing block is singular'.format(label, dual)))
    for label in grading.labels:
        if label.kind is BlockKind.IsotropicDual and label.star() not in grading.labels:
            violations.append((WittViolation.DimensionMismatch,
                               'Block {} has no dual block {}'.format(label, label.star())))
    return violations


def _orthogonality_violations(grading, matrix):
    violations = []
    for first in grading.labels:
        for second in grading.labels:
            if second == first.star():
                continue
            entries = matrix[np.ix_(grading.slots(first), grading.slots(second))]
            if entries.size and np.any(entries != 0.0):
                violations.append((WittViolation.NonOrthogonalBlocks,
                                   'Gram entries between {} and {} must vanish'.format(
                                       first, second)))
    return violations


def _anisotropic_violations(grading, matrix, lax):
    violations = []
    for label in grading.labels:
        if label.is_isotropic:
            continue
        slots = grading.slots(label)
        block = matrix[np.ix_(slots, slots)]
        eigenvalues = np.linalg.eigvalsh((block + block.T) / 2.0)
        if np.any(np.abs(eigenvalues) <= SYMMETRY_TOLERANCE):
            violations.append((WittViolation.DegenerateAnisotropicBlock,
                               'Block {} is degenerate'.format(label)))
        elif not lax and not (np.all(eigenvalues > 0) or np.all(eigenvalues < 0)):
            violations.append((WittViolation.IndefiniteAnisotropicBlock,
                               'Block {} is indefinite'.format(label)))
    return violations


def _structure_of(model):
    return model.structure if isinstance(model, FrameModel) else model


def project(model, v, label):
    structure = _structure_of(model)
    return structure.project(v, structure.grading.label(label))


def musical(model, value, direction, block=None):
    """ flat multiplies by the Gram matrix, sharp by its inverse, optionally within a block. """
    structure = _structure_of(model)
    if direction == 'flat':
        covector = structure.flat(value)
        return covector if block is None else structure.project(covector, block)
    if direction == 'sharp':
        return structure.sharp(value, None if block is None else structure.grading.label(block))
    raise ValueError('Direction must be flat or sharp, got {!r}'.format(direction))


def structure_functions(model, x=None):
    """ c[a, b, k]: the k-th frame component of [E_a, E_b] at x. """
    point = model.origin() if x is None else x
    return model.backend.structure_functions(point)


def lowered_brackets(structure, brackets):
    """ C[a, b, c] = g([E_a, E_b], E_c); trailing derivative axes are carried along. """
    return np.einsum('abk...,kc->abc...', brackets, structure.gram)


class InvalidWittStructureException(ModelDefinitionException):
    def __init__(self, violations):
        self.violations = list(violations)
        message = 'Invalid Witt structure: ' + '; '.join(
            '{}: {}'.format(kind.value, text) for kind, text in self.violations)
        super().__init__(message)

    @property
    def kinds(self):
        return [kind for kind, _ in self.violations]


class UnknownBlockException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class ParityUnassignedException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class NotNullPairModelException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)
