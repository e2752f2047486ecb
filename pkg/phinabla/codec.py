"""
JSON documents exchanged on standard streams. Every document carries "schema", "kind" and "context".

Scalars are {"val": v, "unit": [..], "prec": k} ("prec" only when inexact; "val" null for zeros); the reader also
accepts an integer or an "a/b" string. Elements are lists of [exponent, scalar] pairs, or
{"terms": [...], "window_loss": true, "prec": k} when those flags are set. Matrices are lists of rows.
"""

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .coeffring import FieldContext, Scalar, make_field
from .exceptions import DocumentError, PhiNablaError
from .filtration import FilteredModule
from .gstruct import GL, GPair, GroupDescriptor, make_group
from .matrix import Matrix
from .phimod import (CertificateBlock, Module, PhiNablaModule, SlopeCertificate, build_module,
                     connection_matrix)
from .report import SCHEMA
from .robba import RingContext, RobbaElement, make_ring

KIND_MODULE = 'module'
KIND_PAIR = 'pair'
KIND_CERTIFICATE = 'certificate'
KIND_FILTRATION = 'filtration'
KIND_MATRIX = 'matrix'


def encode_scalar(x: Scalar) -> dict:
    encoded = {'val': x.val, 'unit': list(x.unit)}
    if x.prec is not None:
        encoded['prec'] = x.prec

    return encoded


def decode_scalar(value: Any, field: FieldContext) -> Scalar:
    if isinstance(value, bool):
        raise DocumentError('booleans are not scalars')

    if isinstance(value, int):
        return field.scalar(value)

    if isinstance(value, str):
        try:
            return field.scalar(Fraction(value))
        except (ValueError, ZeroDivisionError) as error:
            raise DocumentError(f'bad rational {value!r}') from error

    if not isinstance(value, dict) or 'val' not in value:
        raise DocumentError(f'bad scalar {value!r}')

    prec = value.get('prec')
    if value['val'] is None:
        return field.zero().with_precision(prec)

    unit = Scalar.from_coefficients(field, [int(c) for c in value.get('unit', [1])])
    return (unit * field.pi_power(int(value['val']))).with_precision(prec)


def encode_element(x: RobbaElement) -> dict:
    encoded: Dict[str, Any] = {
        'window': list(x.ring.window),
        'terms': [[i, encode_scalar(c)] for i, c in sorted(x.terms.items())],
        'window_loss': x.window_loss,
    }
    if x.prec is not None:
        encoded['prec'] = x.prec

    return encoded


def decode_element(value: Any, ring: RingContext, window: Optional[Tuple[int, int]] = None) -> RobbaElement:
    """
    Reads an element object, a bare term list or a scalar shorthand. `window` is the window the document was
    written for (default: the ring's); an element declaring another one is rejected.
    """

    if isinstance(value, (int, str)) and not isinstance(value, bool):
        return ring.constant(decode_scalar(value, ring.field))

    window_loss = False
    prec = None
    if isinstance(value, dict):
        if 'window' in value:
            try:
                declared = tuple(int(w) for w in value['window'])
            except (TypeError, ValueError) as error:
                raise DocumentError(f'bad element window {value["window"]!r}') from error
            expected = tuple(window or ring.window)
            if declared != expected:
                raise DocumentError(f'element window {list(declared)} does not match the context {list(expected)}')
        window_loss = bool(value.get('window_loss', False))
        prec = value.get('prec')
        value = value.get('terms')

    if not isinstance(value, list):
        raise DocumentError(f'bad element {value!r}')

    raw = {}
    for term in value:
        if not isinstance(term, list) or len(term) != 2:
            raise DocumentError(f'bad term {term!r}')
        exponent, coefficient = term
        c = decode_scalar(coefficient, ring.field)
        raw[int(exponent)] = raw[int(exponent)] + c if int(exponent) in raw else c

    return RobbaElement._build(ring, raw, window_loss, prec)


def encode_matrix(M: Matrix) -> list:
    return [[encode_element(x) for x in row] for row in M.rows]


def decode_matrix(value: Any, ring: RingContext, window: Optional[Tuple[int, int]] = None) -> Matrix:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise DocumentError('matrix must be a list of rows')

    return Matrix(ring, [[decode_element(x, ring, window) for x in row] for row in value])


def encode_context(ring: RingContext) -> dict:
    field = ring.field
    context: Dict[str, Any] = {'p': field.p, 'f': field.f, 'N': field.N, 'window': list(ring.window)}
    if ring.lift_terms is not None:
        context['frob_image'] = [[i, encode_scalar(c)] for i, c in ring.lift_terms]
    if ring.kummer_m != 1:
        context['kummer_m'] = ring.kummer_m
    if ring.q != field.q:
        context['frob_q'] = ring.q

    return context


def encode_blocks(C: SlopeCertificate) -> list:
    return [[b.rank, str(b.slope)] for b in C.blocks]


def encode_group(D: GroupDescriptor) -> dict:
    group: Dict[str, Any] = {'kind': D.kind, 'd': D.d}
    if D.form is not None:
        group['form'] = [[str(c) for c in row] for row in D.form]

    return group


class DocumentBuilder:
    """
    Builds a document in one pass: header, context, then the payload. Sub-objects (a certificate or group
    next to a module, generator metadata) may be attached to any kind.
    """

    def __init__(self, kind: str):
        self._kind = kind
        self._ring: Optional[RingContext] = None
        self._payload: Dict[str, Any] = {}

    def set_context(self, ring: RingContext) -> 'DocumentBuilder':
        self._ring = ring
        return self

    def set_module(self, M: Module) -> 'DocumentBuilder':
        self._ring = self._ring or M.ring
        self._payload['dim'] = M.dim
        self._payload['frob_power'] = M.frob_power
        self._payload['A'] = encode_matrix(M.A)
        if isinstance(M, PhiNablaModule):
            self._payload['N'] = encode_matrix(M.N)

        return self

    def set_pair(self, P: GPair) -> 'DocumentBuilder':
        self._ring = self._ring or P.ring
        self._payload['group'] = encode_group(P.group)
        self._payload['frob_power'] = P.frob_power
        self._payload['g'] = encode_matrix(P.g)
        self._payload['X'] = encode_matrix(P.X)
        return self

    def set_group(self, D: GroupDescriptor) -> 'DocumentBuilder':
        self._payload['group'] = encode_group(D)
        return self

    def set_certificate(self, C: SlopeCertificate) -> 'DocumentBuilder':
        """ Top level for certificate documents, nested under "certificate" otherwise. """

        self._ring = self._ring or C.U.ring
        certificate = {'U': encode_matrix(C.U), 'blocks': encode_blocks(C)}
        if self._kind == KIND_CERTIFICATE:
            self._payload.update(certificate)
        else:
            self._payload['certificate'] = certificate

        return self

    def set_filtration(self, F: FilteredModule) -> 'DocumentBuilder':
        self._payload['jumps'] = [str(j) for j in F.jumps]
        self._payload['ranks'] = list(F.ranks)
        if F.U is not None:
            self._ring = self._ring or F.U.ring
            self._payload['U'] = encode_matrix(F.U)

        return self

    def set_matrix(self, M: Matrix) -> 'DocumentBuilder':
        self._ring = self._ring or M.ring
        self._payload['matrix'] = encode_matrix(M)
        return self

    def set_metadata(self, key: str, value: Any) -> 'DocumentBuilder':
        self._payload[key] = value
        return self

    def __add_header__(self, document: dict) -> None:
        document['schema'] = SCHEMA
        document['kind'] = self._kind

    def __add_context__(self, document: dict) -> None:
        if self._ring is None:
            raise DocumentError(f'{self._kind} document without a context')

        document['context'] = encode_context(self._ring)

    def build(self) -> dict:
        document: Dict[str, Any] = {}

        # header first so that documents read naturally
        self.__add_header__(document)
        self.__add_context__(document)
        document.update(self._payload)
        return document

    def json(self) -> str:
        return json.dumps(self.build(), sort_keys=False)


class DocumentReader:
    """ Decodes documents; `overrides` (p, f, N, window) given on the command line replace the document's. """

    def __init__(self, overrides: Optional[Dict[str, Any]] = None):
        self.overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        self._fields: Dict[Tuple[int, int, int], FieldContext] = {}

    def _field(self, p: int, f: int, N: int) -> FieldContext:
        key = (p, f, N)
        if key not in self._fields:
            self._fields[key] = make_field(p, f, N)

        return self._fields[key]

    def context(self, document: dict) -> RingContext:
        try:
            context = dict(document['context'])
        except (KeyError, TypeError) as error:
            raise DocumentError('document has no context') from error

        context.update(self.overrides)
        try:
            field = self._field(int(context['p']), int(context.get('f', 1)), int(context.get('N', 8)))
            window = tuple(int(w) for w in context.get('window', (-32, 32)))
            kummer_m = int(context.get('kummer_m', 1))
            if kummer_m != 1 or 'frob_q' in context:
                return RingContext(field, window, int(context.get('frob_q', 0)), None, kummer_m)

            frob_image = None
            if 'frob_image' in context:
                frob_image = {int(i): decode_scalar(c, field) for i, c in context['frob_image']}

            return make_ring(field, window, frob_image)
        except PhiNablaError:
            raise
        except (KeyError, TypeError, ValueError) as error:
            raise DocumentError(f'bad context: {error}') from error

    @staticmethod
    def written_window(document: dict) -> Tuple[int, int]:
        """ Window the document's elements were written for, before any override. """

        lo, hi = document['context'].get('window', (-32, 32))
        return int(lo), int(hi)

    @staticmethod
    def kind(document: dict) -> str:
        if not isinstance(document, dict):
            raise DocumentError('document must be a JSON object')

        if document.get('schema') != SCHEMA:
            raise DocumentError(f'unsupported schema {document.get("schema")!r}')

        return document.get('kind', '')

    @staticmethod
    def _require(document: dict, key: str) -> Any:
        if key not in document:
            raise DocumentError(f'document has no {key!r}')

        return document[key]

    def matrix(self, document: dict, key: str = 'matrix') -> Matrix:
        return decode_matrix(self._require(document, key), self.context(document), self.written_window(document))

    def module(self, document: dict) -> Module:
        """ Reads a module document, or a pair document as the module (g, X). Never re-checks compatibility. """

        self.kind(document)
        ring = self.context(document)
        window = self.written_window(document)
        frob_power = int(document.get('frob_power', 1))
        if 'A' in document:
            A = decode_matrix(document['A'], ring, window)
            N = decode_matrix(document['N'], ring, window) if 'N' in document else None
        else:
            A = decode_matrix(self._require(document, 'g'), ring, window)
            N = decode_matrix(self._require(document, 'X'), ring, window)

        if 'dim' in document and int(document['dim']) != A.nrows:
            raise DocumentError(f'dim {document["dim"]} does not match a {A.nrows}x{A.ncols} matrix')

        return build_module(A, N, frob_power, checked=False)

    def group(self, document: dict, d: int) -> GroupDescriptor:
        if 'group' not in document:
            return make_group(GL, d)

        group = document['group']
        try:
            return make_group(group['kind'], int(group.get('d', d)), group.get('form'))
        except (KeyError, TypeError, ValueError) as error:
            raise DocumentError(f'bad group {group!r}') from error

    def pair(self, document: dict) -> GPair:
        """ Reads a pair document, or a module document as a pair of its declared group (GL by default). """

        M = self.module(document)
        return GPair(self.group(document, M.dim), M.A, connection_matrix(M), M.frob_power)

    def certificate(self, document: dict) -> SlopeCertificate:
        kind = self.kind(document)
        body = document if kind == KIND_CERTIFICATE else self._require(document, 'certificate')
        ring = self.context(document)
        try:
            blocks = tuple(CertificateBlock(int(r), Fraction(s)) for r, s in self._require(body, 'blocks'))
        except (TypeError, ValueError, ZeroDivisionError) as error:
            raise DocumentError(f'bad certificate blocks: {error}') from error

        U = decode_matrix(self._require(body, 'U'), ring, self.written_window(document))
        return SlopeCertificate(U, blocks)

    def filtration(self, document: dict) -> FilteredModule:
        try:
            jumps = tuple(Fraction(j) for j in self._require(document, 'jumps'))
            ranks = tuple(int(r) for r in self._require(document, 'ranks'))
        except (TypeError, ValueError, ZeroDivisionError) as error:
            raise DocumentError(f'bad filtration: {error}') from error

        U = None
        if 'U' in document:
            U = decode_matrix(document['U'], self.context(document), self.written_window(document))
        return FilteredModule(jumps, ranks, U)


def loads(text: str) -> List[dict]:
    """ One JSON document, or several separated by newlines (one report per line). """

    text = text.strip()
    if not text:
        raise DocumentError('empty input')

    try:
        return [json.loads(text)]
    except json.JSONDecodeError:
        pass

    try:
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as error:
        raise DocumentError(f'invalid JSON: {error}') from error
