import json
import random
from fractions import Fraction

import pytest

from phinabla.codec import (KIND_CERTIFICATE, KIND_FILTRATION, KIND_MATRIX, KIND_MODULE, KIND_PAIR, DocumentBuilder,
                            DocumentReader, decode_element, decode_scalar, encode_context, encode_element,
                            encode_scalar, loads)
from phinabla.coeffring import make_field
from phinabla.exceptions import DocumentError
from phinabla.filtration import FilteredModule
from phinabla.gstruct import GL, SL
from phinabla.matrix import Matrix
from phinabla.phimod import PhiModule, PhiNablaModule
from phinabla.robba import make_extension, make_ring
from phinabla.seeds import kummer_sl2_pair, scrambled_seed, split_seed, standard_module

Q3 = make_field(3, 1, 8)
R3 = make_ring(Q3, (-32, 32))
WIDE = make_ring(Q3, (-64, 64))


def through_json(builder: DocumentBuilder) -> dict:
    documents = loads(builder.json())
    assert len(documents) == 1
    return documents[0]


def test_inexact_scalar_keeps_precision():
    x = Q3.scalar(Fraction(1, 2))
    encoded = encode_scalar(x)
    assert encoded['prec'] == 8
    assert decode_scalar(encoded, Q3) == x


def test_exact_scalar_has_no_precision():
    encoded = encode_scalar(Q3.pi_power(-2))
    assert encoded == {'val': -2, 'unit': [1]}
    assert decode_scalar(encoded, Q3) == Q3.pi_power(-2)


def test_scalar_shorthand():
    assert decode_scalar(5, Q3) == Q3.scalar(5)
    assert decode_scalar('1/2', Q3) == Q3.scalar(Fraction(1, 2))
    assert decode_scalar({'val': None, 'prec': 4}, Q3).prec == 4


def test_bad_scalars():
    for value in (True, '1/0', 'half', [1], {'unit': [1]}):
        with pytest.raises(DocumentError):
            decode_scalar(value, Q3)


def test_element_flags_survive():
    lost = R3.element({40: 1, 1: 2})
    assert lost.window_loss
    encoded = encode_element(lost)
    assert encoded['window_loss'] is True
    assert decode_element(encoded, R3) == lost

    inexact = R3.monomial(-1, Fraction(1, 2))
    assert decode_element(encode_element(inexact), R3) == inexact


def test_element_object():
    x = R3.element({-1: 3, 2: 1})
    assert encode_element(x) == {
        'window': [-32, 32],
        'terms': [[-1, {'val': 1, 'unit': [1]}], [2, {'val': 0, 'unit': [1]}]],
        'window_loss': False,
    }
    assert decode_element(encode_element(x), R3) == x
    assert decode_element(7, R3) == R3.constant(7)
    assert decode_element([[2, 1], [-1, 3]], R3) == x


def test_element_window_must_match_the_context():
    encoded = encode_element(WIDE.monomial(40))
    with pytest.raises(DocumentError):
        decode_element(encoded, R3)
    assert decode_element(encoded, R3, (-64, 64)).window_loss

    with pytest.raises(DocumentError):
        decode_element(dict(encoded, window='wide'), WIDE)

    document = DocumentBuilder(KIND_MATRIX).set_matrix(Matrix.identity(R3, 1)).build()
    document['matrix'][0][0]['window'] = [-16, 16]
    with pytest.raises(DocumentError):
        DocumentReader().matrix(document)


def test_repeated_exponents_add_up():
    assert decode_element([[1, 2], [1, 3]], R3) == R3.monomial(1, 5)


def test_explicit_context():
    document = DocumentBuilder(KIND_FILTRATION).set_context(WIDE).set_filtration(FilteredModule((0,), (1,))).build()
    assert document['context'] == {'p': 3, 'f': 1, 'N': 8, 'window': [-64, 64]}
    assert DocumentReader().context(document) == WIDE


def test_window_override_drops_terms():
    document = DocumentBuilder(KIND_MATRIX).set_matrix(Matrix(R3, [[R3.monomial(8)]])).build()
    entry = DocumentReader({'window': (-4, 4)}).matrix(document)[0, 0]
    assert entry.is_zero
    assert entry.window_loss


def test_scrambled_module_document():
    seed = scrambled_seed(WIDE, [(0, 1), (1, 1)], random.Random(3))
    document = through_json(DocumentBuilder(KIND_MODULE).set_module(seed.module).set_certificate(seed.certificate))
    assert document['kind'] == KIND_MODULE
    assert document['context']['window'] == [-64, 64]

    reader = DocumentReader()
    M = reader.module(document)
    assert isinstance(M, PhiNablaModule)
    assert M.ring == WIDE
    assert M.A == seed.module.A
    assert M.N == seed.module.N

    C = reader.certificate(document)
    assert C.U == seed.certificate.U
    assert C.blocks == seed.certificate.blocks


def test_module_without_connection():
    document = through_json(DocumentBuilder(KIND_MODULE).set_module(standard_module(R3, 1, 2)))
    assert 'N' not in document
    M = DocumentReader().module(document)
    assert isinstance(M, PhiModule)
    assert M.A == standard_module(R3, 1, 2).A


def test_dimension_mismatch():
    document = DocumentBuilder(KIND_MODULE).set_module(standard_module(R3, 0, 1)).build()
    document['dim'] = 2
    with pytest.raises(DocumentError):
        DocumentReader().module(document)


def test_pair_read_as_module():
    P = kummer_sl2_pair(R3, 1, 2)
    document = through_json(DocumentBuilder(KIND_PAIR).set_pair(P))
    reader = DocumentReader()

    M = reader.module(document)
    assert M.A == P.g
    assert M.N == P.X

    pair = reader.pair(document)
    assert pair.group.kind == SL
    assert pair.group.to_label() == 'SL(2)'


def test_module_read_as_pair():
    M, _ = split_seed(R3, [(0, 1), (1, 1)])
    pair = DocumentReader().pair(DocumentBuilder(KIND_MODULE).set_module(M).build())
    assert pair.group.kind == GL
    assert pair.g == M.A
    assert pair.X == M.N


def test_certificate_placement():
    _, C = split_seed(R3, [(0, 1), (Fraction(1, 2), 2)])
    top = DocumentBuilder(KIND_CERTIFICATE).set_certificate(C).build()
    assert top['blocks'] == [[1, '0'], [2, '1/2']]

    nested = DocumentBuilder(KIND_MATRIX).set_matrix(C.U).set_certificate(C).build()
    assert 'blocks' not in nested
    assert nested['certificate']['blocks'] == top['blocks']

    reader = DocumentReader()
    for document in (top, nested):
        assert reader.certificate(document).blocks == C.blocks


def test_filtration_document():
    F = FilteredModule((0, '1/2'), (1, 2), Matrix.identity(R3, 3))
    document = through_json(DocumentBuilder(KIND_FILTRATION).set_filtration(F))
    assert document['jumps'] == ['0', '1/2']
    assert DocumentReader().filtration(document) == F


def test_ring_contexts_round_trip():
    lifted = make_ring(Q3, (-32, 32), {3: 1, 4: 3})
    inner = make_extension(R3, 2).inner
    reader = DocumentReader()
    for ring in (R3, lifted, inner):
        assert reader.context({'context': encode_context(ring)}) == ring


def test_missing_context():
    with pytest.raises(DocumentError):
        DocumentReader().context({'schema': '1', 'kind': KIND_MODULE})

    with pytest.raises(DocumentError):
        DocumentBuilder(KIND_FILTRATION).set_filtration(FilteredModule((0,), (1,))).build()


def test_unsupported_schema():
    document = DocumentBuilder(KIND_MODULE).set_module(standard_module(R3, 0, 1)).build()
    document['schema'] = '2'
    with pytest.raises(DocumentError):
        DocumentReader().module(document)


def test_group_defaults_to_general_linear():
    assert DocumentReader().group({}, 3).to_label() == 'GL(3)'

    with pytest.raises(DocumentError):
        DocumentReader().group({'group': {'d': 2}}, 2)


def test_json_lines():
    first = DocumentBuilder(KIND_MATRIX).set_matrix(Matrix.identity(R3, 1)).json()
    second = DocumentBuilder(KIND_MATRIX).set_matrix(Matrix.zeros(R3, 1)).json()
    documents = loads(f'{first}\n\n{second}\n')
    assert [d['matrix'][0][0]['terms'] for d in documents] == [[[0, {'val': 0, 'unit': [1]}]], []]


def test_invalid_input():
    for text in ('', '   \n', '{"schema": "1"', '{}\n{'):
        with pytest.raises(DocumentError):
            loads(text)

    assert loads(json.dumps({'schema': '1'})) == [{'schema': '1'}]
