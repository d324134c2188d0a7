"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.

Manifold spec documents (JSON). Frame indices are 1-based in documents
and 0-based everywhere in the engine.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ModelDefinitionException
from .expressions import ExpressionParseException, jet_eval, parse_expression
from .framebackends import ChartBackend, InvalidStructureConstantsException, LieConstantBackend
from .hermitian import FeffermanData
from .wittcore import (BlockLabel, DistinguishedNullPair, FrameModel, InvalidWittStructureException,
                       LIE_TOLERANCE, NotNullPairModelException, UnknownBlockException,
                       WittGrading, validate_witt_structure)

BACKEND_TYPES = ('lie_constant', 'chart')


@dataclass
class BlockSpec:
    label: str
    dimension: int
    index: int


@dataclass
class FeffermanSpec:
    cr_dimension: int
    ricci_form: List[List[str]]
    scalar: str
    reeb_lie_g: List[List[str]]


@dataclass
class ManifoldSpec:
    """
    Normalized document: gram and bracket entries are sparse, 1-based and
    sorted, expressions are stored in their canonical emitted form.
    """

    name: str
    dimension: int
    blocks: List[BlockSpec]
    frame_blocks: List[str]
    gram: List[list]
    backend: str
    brackets: List[list] = field(default_factory=list)
    coordinates: List[str] = field(default_factory=list)
    frame: List[List[str]] = field(default_factory=list)
    domain: Optional[List[List[float]]] = None
    jet_order: int = 2
    null_pair: Optional[List[int]] = None
    complex_structure: Optional[List[List[float]]] = None
    fefferman: Optional[FeffermanSpec] = None
    lax: bool = False


def load_manifold_spec(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ManifoldSpecParseException(
            'Invalid JSON at line {} column {}: {}'.format(error.lineno, error.colno, error.msg))
    if not isinstance(document, dict):
        raise ManifoldSpecParseException('A manifold spec must be a JSON object')
    spec = _read_document(document)
    build_model(spec)
    logging.debug('Loaded manifold spec {}'.format(spec.name))
    return spec


def load_manifold_spec_file(path):
    with open(path, 'r') as handle:
        return load_manifold_spec(handle.read())


def spec_to_document(spec):
    """ The JSON object of a spec, in the layout load_manifold_spec reads. """
    document = {'name': spec.name,
                'dimension': spec.dimension,
                'blocks': [asdict(block) for block in spec.blocks],
                'frame_blocks': list(spec.frame_blocks),
                'gram': [list(entry) for entry in spec.gram]}
    if spec.backend == 'lie_constant':
        backend = {'type': 'lie_constant', 'brackets': [list(entry) for entry in spec.brackets]}
    else:
        backend = {'type': 'chart', 'coordinates': list(spec.coordinates),
                   'frame': [list(row) for row in spec.frame], 'jet_order': spec.jet_order}
        if spec.domain is not None:
            backend['domain'] = [list(pair) for pair in spec.domain]
    document['backend'] = backend
    if spec.null_pair is not None:
        document['null_pair'] = list(spec.null_pair)
    if spec.complex_structure is not None:
        document['complex_structure'] = [list(row) for row in spec.complex_structure]
    if spec.fefferman is not None:
        document['fefferman'] = asdict(spec.fefferman)
    if spec.lax:
        document['lax'] = True
    return document


def emit_manifold_spec(spec):
    return json.dumps(spec_to_document(spec), indent=2) + '\n'


def normalize_manifold_spec(text):
    return emit_manifold_spec(load_manifold_spec(text))


def _required(document, key, path):
    if key not in document:
        raise ManifoldSpecValidationException(_join(path, key), 'is required')
    return document[key]


def _join(path, key):
    if isinstance(key, int):
        return '{}[{}]'.format(path, key)
    return '{}.{}'.format(path, key) if path else key


def _integer(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ManifoldSpecValidationException(path, 'must be an integer, got {!r}'.format(value))
    if minimum is not None and value < minimum:
        raise ManifoldSpecValidationException(path, 'must be at least {}'.format(minimum))
    return value


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ManifoldSpecValidationException(
            path, 'must be a finite number, got {!r}'.format(value))
    return float(value)


def _list(value, path, length=None):
    if not isinstance(value, list):
        raise ManifoldSpecValidationException(path, 'must be a list')
    if length is not None and len(value) != length:
        raise ManifoldSpecValidationException(
            path, 'must have {} entries, got {}'.format(length, len(value)))
    return value


def _slot(value, path, dimension):
    _integer(value, path, 1)
    if value > dimension:
        raise ManifoldSpecValidationException(
            path, 'frame index {} exceeds {}'.format(value, dimension))
    return value


def _read_document(document):
    name = str(document.get('name', 'custom'))
    dimension = _integer(_required(document, 'dimension', ''), 'dimension', 1)

    blocks = []
    for k, entry in enumerate(_list(_required(document, 'blocks', ''), 'blocks')):
        path = _join('blocks', k)
        label = str(_required(entry, 'label', path))
        try:
            parsed = BlockLabel.parse(label)
        except UnknownBlockException as error:
            raise ManifoldSpecValidationException(_join(path, 'label'), str(error))
        size = _integer(_required(entry, 'dimension', path), _join(path, 'dimension'), 1)
        index = _integer(entry.get('index', parsed.index), _join(path, 'index'))
        blocks.append(BlockSpec(parsed.name, size, index))

    frame_blocks = document.get('frame_blocks')
    if frame_blocks is None:
        frame_blocks = [block.label for block in blocks for _ in range(block.dimension)]
    frame_blocks = [str(label) for label in _list(frame_blocks, 'frame_blocks', dimension)]

    gram = _sparse_entries(_required(document, 'gram', ''), 'gram', dimension, ('i', 'j'),
                           symmetric=True)

    backend_document = _required(document, 'backend', '')
    backend = _required(backend_document, 'type', 'backend')
    if backend not in BACKEND_TYPES:
        raise ManifoldSpecValidationException(
            'backend.type', 'must be one of {}, got {!r}'.format(BACKEND_TYPES, backend))
    spec = ManifoldSpec(name, dimension, blocks, frame_blocks, gram, backend,
                        lax=bool(document.get('lax', False)))

    if backend == 'lie_constant':
        spec.brackets = _sparse_entries(backend_document.get('brackets', []), 'backend.brackets',
                                        dimension, ('a', 'b', 'k'), symmetric=False)
    else:
        _read_chart(spec, backend_document)

    if document.get('null_pair') is not None:
        pair = _list(document['null_pair'], 'null_pair', 2)
        spec.null_pair = [_slot(value, _join('null_pair', k), dimension)
                          for k, value in enumerate(pair)]
    if document.get('complex_structure') is not None:
        rows = _list(document['complex_structure'], 'complex_structure', dimension)
        spec.complex_structure = [
            [_number(value, '{}[{}][{}]'.format('complex_structure', r, c))
             for c, value in enumerate(_list(row, _join('complex_structure', r), dimension))]
            for r, row in enumerate(rows)]
    if document.get('fefferman') is not None:
        spec.fefferman = _read_fefferman(document['fefferman'], spec)
    return spec


def _sparse_entries(entries, path, dimension, keys, symmetric):
    """
    Entries are [indices..., value] lists, returned sorted; antisymmetric
    bracket pairs keep a < b. keys name the index positions in messages.
    """
    seen = {}
    for k, entry in enumerate(_list(entries, path)):
        entry_path = _join(path, k)
        _list(entry, entry_path, len(keys) + 1)
        indices = [_slot(entry[position], '{} ({})'.format(_join(entry_path, position), key),
                         dimension)
                   for position, key in enumerate(keys)]
        value = _number(entry[-1], _join(entry_path, len(keys)))
        first, second = indices[0], indices[1]
        if symmetric and first > second:
            indices[0], indices[1] = second, first
        if not symmetric:
            if first == second:
                if value != 0.0:
                    raise ManifoldSpecValidationException(
                        entry_path, '[E_{0}, E_{0}] must vanish'.format(first))
                continue
            if first > second:
                indices[0], indices[1] = second, first
                value = -value
        key = tuple(indices)
        if key in seen:
            raise ManifoldSpecValidationException(
                entry_path, 'duplicates the entry {}'.format(list(key)))
        seen[key] = value
    return [list(key) + [value] for key, value in sorted(seen.items()) if value != 0.0]


def _read_chart(spec, backend_document):
    coordinates = [str(name) for name in
                   _list(_required(backend_document, 'coordinates', 'backend'),
                         'backend.coordinates', spec.dimension)]
    rows = _list(_required(backend_document, 'frame', 'backend'), 'backend.frame', spec.dimension)
    frame = []
    for a, row in enumerate(rows):
        entries = []
        for mu, text in enumerate(_list(row, '{}[{}]'.format('backend.frame', a), spec.dimension)):
            entries.append(_canonical_expression(
                text, coordinates, 'backend.frame[{}][{}]'.format(a, mu)))
        frame.append(entries)
    spec.coordinates = coordinates
    spec.frame = frame
    if backend_document.get('domain') is not None:
        domain = _list(backend_document['domain'], 'backend.domain', spec.dimension)
        spec.domain = [[_number(value, 'backend.domain[{}][{}]'.format(r, c))
                        for c, value in enumerate(_list(pair, _join('backend.domain', r), 2))]
                       for r, pair in enumerate(domain)]
    spec.jet_order = _integer(backend_document.get('jet_order', 2), 'backend.jet_order', 1)


def _canonical_expression(text, coordinates, path):
    try:
        return parse_expression(text, coordinates).emit()
    except ExpressionParseException as error:
        raise ManifoldSpecValidationException(path, str(error))


def _read_fefferman(document, spec):
    if spec.backend != 'chart':
        raise ManifoldSpecValidationException('fefferman', 'requires a chart backend')
    cr_dimension = _integer(_required(document, 'cr_dimension', 'fefferman'),
                            'fefferman.cr_dimension', 1)
    if spec.dimension != 2 * cr_dimension + 2:
        raise ManifoldSpecValidationException(
            'fefferman.cr_dimension', 'implies dimension {}, got {}'.format(
                2 * cr_dimension + 2, spec.dimension))

    def matrix(key):
        rows = _list(document.get(key, [['0'] * spec.dimension] * spec.dimension),
                     _join('fefferman', key), spec.dimension)
        return [[_canonical_expression(text, spec.coordinates,
                                       'fefferman.{}[{}][{}]'.format(key, r, c))
                 for c, text in enumerate(_list(row, 'fefferman.{}[{}]'.format(key, r),
                                                spec.dimension))]
                for r, row in enumerate(rows)]
    scalar = _canonical_expression(document.get('scalar', '0'), spec.coordinates,
                                   'fefferman.scalar')
    return FeffermanSpec(cr_dimension, matrix('ricci_form'), scalar, matrix('reeb_lie_g'))


def _grading(spec):
    labels = {}
    blocks = []
    for block in spec.blocks:
        label = BlockLabel.parse(block.label, block.index)
        labels[block.label] = label
        blocks.append((label, block.dimension))
    slots = []
    for k, name in enumerate(spec.frame_blocks):
        if name not in labels:
            raise ManifoldSpecValidationException(
                _join('frame_blocks', k), 'refers to the undeclared block {!r}'.format(name))
        slots.append(labels[name])
    parity_mode = any(block.index != BlockLabel.parse(block.label).index for block in spec.blocks)
    return WittGrading(blocks, slots, parity_mode=parity_mode)


def _dense(entries, dimension, symmetric):
    size = len(entries[0]) - 1 if entries else (2 if symmetric else 3)
    array = np.zeros((dimension,) * size)
    for entry in entries:
        indices = tuple(index - 1 for index in entry[:-1])
        array[indices] = entry[-1]
        swapped = (indices[1], indices[0]) + indices[2:]
        array[swapped] = entry[-1] if symmetric else -entry[-1]
    return array


def build_model(spec):
    """ FrameModel of a spec; every failure names the offending field. """
    grading = _grading(spec)
    try:
        structure = validate_witt_structure(grading, _dense(spec.gram, spec.dimension, True),
                                            lax=spec.lax)
    except InvalidWittStructureException as error:
        raise ManifoldSpecValidationException(
            'blocks', '; '.join(message for _, message in error.violations))

    if spec.backend == 'lie_constant':
        try:
            backend = LieConstantBackend(_dense(spec.brackets, spec.dimension, False))
        except InvalidStructureConstantsException as error:
            raise ManifoldSpecValidationException('backend.brackets', str(error))
        residual = backend.jacobi_residual()
        if residual > LIE_TOLERANCE:
            raise ManifoldSpecValidationException(
                'backend.brackets', 'violates the Jacobi identity by {:.3e}'.format(residual))
    else:
        frame = [[parse_expression(text, spec.coordinates) for text in row] for row in spec.frame]
        backend = ChartBackend(spec.coordinates, frame, spec.domain, spec.jet_order)

    null_pair = None
    if spec.null_pair is not None:
        null_pair = DistinguishedNullPair(spec.null_pair[0] - 1, spec.null_pair[1] - 1)
        try:
            null_pair.validate(structure)
        except NotNullPairModelException as error:
            raise ManifoldSpecValidationException('null_pair', str(error))

    fefferman = None
    if spec.fefferman is not None:
        fefferman = _compile_fefferman(spec.fefferman, spec.coordinates, backend)
    return FrameModel(structure, backend, null_pair, spec.name, spec.complex_structure, fefferman,
                      {'spec': spec.name})


def _compile_fefferman(fefferman, coordinates, backend):
    def compile_matrix(rows):
        trees = [[parse_expression(text, coordinates) for text in row] for row in rows]
        return lambda x: np.array([[tree.evaluate([float(v) for v in x]) for tree in row]
                                   for row in trees], dtype=float)

    scalar = parse_expression(fefferman.scalar, coordinates)

    def scalar_differential(x):
        gradient = jet_eval(scalar, np.asarray(x, dtype=float), order=1).gradient
        return backend.frame_matrix(x).T @ gradient

    return FeffermanData(fefferman.cr_dimension,
                         ricci_form=compile_matrix(fefferman.ricci_form),
                         scalar=lambda x: float(scalar.evaluate([float(v) for v in x])),
                         scalar_differential=scalar_differential,
                         reeb_lie_g=compile_matrix(fefferman.reeb_lie_g),
                         expressions=fefferman)


def _sparse(array, symmetric):
    entries = []
    for indices in zip(*np.nonzero(array)):
        if indices[0] > indices[1] or (not symmetric and indices[0] == indices[1]):
            continue
        entries.append([int(index) + 1 for index in indices] + [float(array[indices])])
    return sorted(entries)


def model_to_spec(model):
    """ Document form of any model, built-in or loaded. """
    grading = model.grading
    blocks = [BlockSpec(label.name, dimension, label.index) for label, dimension in grading.blocks]
    spec = ManifoldSpec(model.name, model.dimension, blocks,
                        [label.name for label in grading.frame_slots],
                        _sparse(model.gram, True), 'lie_constant', lax=model.structure.lax)
    backend = model.backend
    if isinstance(backend, LieConstantBackend):
        spec.brackets = _sparse(backend.structure_constants, False)
    else:
        spec.backend = 'chart'
        spec.coordinates = list(backend.coordinates)
        spec.frame = [[tree.emit() for tree in row] for row in backend.frame]
        spec.domain = None if backend.domain is None else backend.domain.tolist()
        spec.jet_order = backend.jet_order
    if model.null_pair is not None:
        spec.null_pair = [slot + 1 for slot in model.null_pair.slots]
    if model.complex_structure is not None:
        spec.complex_structure = model.complex_structure.tolist()
    if model.fefferman is not None:
        spec.fefferman = model.fefferman.expressions or _flat_fefferman_spec(
            model.fefferman.cr_dimension, model.dimension)
    return spec


def _flat_fefferman_spec(cr_dimension, dimension):
    zeros = [['0.0'] * dimension for _ in range(dimension)]
    return FeffermanSpec(cr_dimension, zeros, '0.0', [list(row) for row in zeros])


class ManifoldSpecParseException(ModelDefinitionException):
    def __init__(self, message):
        super().__init__(message)


class ManifoldSpecValidationException(ModelDefinitionException):
    def __init__(self, field, message):
        super().__init__('{}: {}'.format(field, message))
        self.field = field
