"""
Command-line driver. Documents travel as JSON on standard streams so subcommands compose through pipes:

    phinabla gen scramble --blocks 0:1,1:1 --seed 7 | phinabla verify-slopes

Exit codes: 0 pass, 1 fail, 2 inconclusive or degraded precision, 3 usage, input or I/O error.
"""

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from sympy import factorint

from . import codec
from .coeffring import make_field
from .config import Settings, load_settings
from .exceptions import MalformedCertificate, PatternViolation, PhiNablaError, UsageError
from .gstruct import (GL, SL, block_reduce, bphinabla_check, cocharacter_from_certificate,
                      monodromy_certificate_check, pair_from_module, pushforward_pair, trivial_cocharacter,
                      unit_root_reduce)
from .logger import Log
from .matrix import Matrix
from .phimod import (CertificateBlock, PhiNablaModule, SlopeCertificate, build_module, gauge_compat_check,
                     newton_polygon, polygon_svg, polygon_tsv, pushforward, pushforward_certificate, tensor,
                     tensor_certificate, twist, twist_certificate, verify_slope_certificate)
from .report import SCHEMA, Check, Report
from .robba import RingContext, make_extension, make_ring
from .seeds import (kummer_seed, kummer_sl2_pair, kummer_witness, parse_blocks, scrambled_seed, standard_module,
                    zero_connection)
from .status import ExitCode, Status


class ArgumentParser(argparse.ArgumentParser):
    """ Raises instead of exiting so that usage errors get the JSON error document and exit code 3. """

    def error(self, message):
        raise UsageError(message)


@dataclass
class Outcome:
    payload: Union[dict, str]
    status: Status = Status.PASS

    def render(self) -> str:
        if isinstance(self.payload, str):
            return self.payload.rstrip('\n')

        return json.dumps(self.payload)


@dataclass
class Invocation:
    args: argparse.Namespace
    settings: Settings
    reader: codec.DocumentReader

    def ring(self) -> RingContext:
        s = self.settings
        return make_ring(make_field(s.p, s.f, s.N), s.window)


def _read_documents(paths: Sequence[str]) -> List[dict]:
    documents = []
    for path in paths or ['-']:
        if path == '-':
            text = sys.stdin.read()
        else:
            with open(path, encoding='utf-8') as stream:
                text = stream.read()
        documents.extend(codec.loads(text))

    return documents


def _read_one(path: str) -> dict:
    documents = _read_documents([path])
    if len(documents) != 1:
        raise UsageError(f'expected one document in {path}, found {len(documents)}')

    return documents[0]


def _certificate(inv: Invocation, document: dict) -> SlopeCertificate:
    if inv.args.certificate:
        return inv.reader.certificate(_read_one(inv.args.certificate))

    if 'certificate' not in document and document.get('kind') != codec.KIND_CERTIFICATE:
        raise UsageError('no certificate: pass --certificate or use a document carrying one')

    return inv.reader.certificate(document)


def _report_outcome(report: Report, **extra: Any) -> Outcome:
    payload = report.to_json()
    payload.update(extra)
    return Outcome(payload, report.status)


def _prime_power(q: int):
    factors = factorint(q)
    if q < 2 or len(factors) != 1:
        raise UsageError(f'{q} is not a prime power')

    (p, f), = factors.items()
    return int(p), int(f)


def _single_block_certificate(ring: RingContext, rank: int, slope) -> SlopeCertificate:
    return SlopeCertificate(Matrix.identity(ring, rank), (CertificateBlock(rank, slope),))


def gen_standard(inv: Invocation) -> List[Outcome]:
    args = inv.args
    ring = inv.ring()
    M = standard_module(ring, args.s, args.r)
    if args.with_nabla == 'zero':
        M = zero_connection(M)

    builder = codec.DocumentBuilder(codec.KIND_MODULE).set_module(M)
    builder.set_certificate(_single_block_certificate(ring, args.r, Fraction(args.s, args.r)))
    return [Outcome(builder.build())]


def gen_kummer(inv: Invocation) -> List[Outcome]:
    args = inv.args
    ring = inv.ring()
    if args.rank == 1:
        pair = pair_from_module(kummer_seed(ring, args.a, args.m))
    else:
        pair = kummer_sl2_pair(ring, args.a, args.m)

    builder = codec.DocumentBuilder(codec.KIND_PAIR).set_pair(pair)
    builder.set_certificate(_single_block_certificate(ring, pair.dim, 0))
    builder.set_metadata('kummer', {'a': args.a, 'm': args.m})
    return [Outcome(builder.build())]


def gen_scramble(inv: Invocation) -> List[Outcome]:
    args = inv.args
    rng = random.Random(inv.settings.seed)
    seed = scrambled_seed(inv.ring(), parse_blocks(args.blocks), rng, args.group)
    builder = codec.DocumentBuilder(codec.KIND_MODULE).set_module(seed.module)
    builder.set_group(seed.pair.group).set_certificate(seed.certificate)
    builder.set_metadata('planted', {'g': codec.encode_matrix(seed.planted.g),
                                     'X': codec.encode_matrix(seed.planted.X)})
    return [Outcome(builder.build())]


def _for_each(inv: Invocation, handler: Callable[[Invocation, dict], Outcome]) -> List[Outcome]:
    """ Runs `handler` on every input document, `--jobs` at a time. """

    documents = _read_documents(inv.args.files)
    if inv.settings.jobs > 1 and len(documents) > 1:
        with ThreadPoolExecutor(max_workers=inv.settings.jobs) as executor:
            return list(executor.map(lambda document: handler(inv, document), documents))

    return [handler(inv, document) for document in documents]


def _check_gauge(inv: Invocation, document: dict) -> Outcome:
    M = inv.reader.module(document)
    if inv.settings.q_power != 1:
        M = build_module(M.A, M.N if isinstance(M, PhiNablaModule) else None, inv.settings.q_power,
                         checked=False)

    return _report_outcome(gauge_compat_check(M))


def _check_pair(inv: Invocation, document: dict) -> Outcome:
    return _report_outcome(bphinabla_check(inv.reader.pair(document)))


def _rejected_certificate(name: str, error: PhiNablaError) -> Outcome:
    """ Failed report for a certificate that parses but does not fit the data. """

    Log.debug('cli', f'{name}: certificate rejected: {error}')
    report = Report(name)
    report.add(Check('certificate', Status.FAIL, detail=f'{type(error).__name__}: {error}'))
    return _report_outcome(report)


def _verify_slopes(inv: Invocation, document: dict) -> Outcome:
    M = inv.reader.module(document)
    C = _certificate(inv, document)
    try:
        report = verify_slope_certificate(M, C, jobs=inv.settings.jobs)
    except (PatternViolation, MalformedCertificate) as error:
        return _rejected_certificate('slope-certificate', error)

    return _report_outcome(report)


def _attach_certificate(builder: codec.DocumentBuilder, document: dict, reader: codec.DocumentReader,
                        transform: Callable[[SlopeCertificate], SlopeCertificate]):
    if 'certificate' in document:
        builder.set_certificate(transform(reader.certificate(document)))


def run_pushforward(inv: Invocation) -> List[Outcome]:
    n = inv.args.n
    document = _read_one(inv.args.file)
    if document.get('kind') == codec.KIND_PAIR:
        pushed, check = pushforward_pair(inv.reader.pair(document), n)
        builder = codec.DocumentBuilder(codec.KIND_PAIR).set_pair(pushed)
        builder.set_metadata('check', check.to_json())
        return [Outcome(builder.build(), check.status)]

    M = pushforward(inv.reader.module(document), n)
    builder = codec.DocumentBuilder(codec.KIND_MODULE).set_module(M)
    _attach_certificate(builder, document, inv.reader, lambda C: pushforward_certificate(C, n))
    status = Status.PASS
    if isinstance(M, PhiNablaModule):
        report = gauge_compat_check(M)
        builder.set_metadata('report', report.to_json())
        status = report.status

    return [Outcome(builder.build(), status)]


def run_twist(inv: Invocation) -> List[Outcome]:
    s = inv.args.s
    document = _read_one(inv.args.file)
    builder = codec.DocumentBuilder(codec.KIND_MODULE).set_module(twist(inv.reader.module(document), s))
    _attach_certificate(builder, document, inv.reader, lambda C: twist_certificate(C, s))
    return [Outcome(builder.build())]


def run_tensor(inv: Invocation) -> List[Outcome]:
    first, second = _read_one(inv.args.first), _read_one(inv.args.second)
    M = tensor(inv.reader.module(first), inv.reader.module(second))
    builder = codec.DocumentBuilder(codec.KIND_MODULE).set_module(M)
    if 'certificate' in first and 'certificate' in second:
        builder.set_certificate(tensor_certificate(inv.reader.certificate(first), inv.reader.certificate(second)))

    return [Outcome(builder.build())]


def run_reduce(inv: Invocation) -> List[Outcome]:
    document = _read_one(inv.args.file)
    pair = inv.reader.pair(document)
    C = _certificate(inv, document)
    try:
        reduction = block_reduce(pair, C)
    except (PatternViolation, MalformedCertificate) as error:
        return [_rejected_certificate('reduce', error)]

    report = Report('reduce')
    report.extend(reduction.report, 'block_')
    report.extend(unit_root_reduce(reduction.z, reduction.X0, reduction.cocharacter, pair.frob_power), 'unit_')
    return [_report_outcome(report, z=codec.encode_matrix(reduction.z), X0=codec.encode_matrix(reduction.X0))]


def run_monodromy(inv: Invocation) -> List[Outcome]:
    document = _read_one(inv.args.file)
    pair = inv.reader.pair(document)
    has_certificate = inv.args.certificate or 'certificate' in document
    cochar = cocharacter_from_certificate(_certificate(inv, document)) if has_certificate \
        else trivial_cocharacter(pair.dim)

    if inv.args.witness == 'auto':
        kummer = document.get('kummer')
        if not isinstance(kummer, dict):
            raise UsageError('--witness auto needs the kummer metadata written by "gen kummer"')
        ext = make_extension(pair.ring, int(kummer['m']))
        b = kummer_witness(ext, int(kummer['a']), pair.dim)
    else:
        witness = _read_one(inv.args.witness)
        context = witness.get('context', {})
        ext = make_extension(pair.ring, int(context.get('kummer_m', 1)), int(context.get('f', pair.ring.field.f)))
        b = codec.decode_matrix(witness.get('matrix'), ext.inner)

    result = monodromy_certificate_check(pair, cochar, b, ext)
    transformed = result.transformed.to_json() if result.transformed is not None else None
    return [_report_outcome(result.report, transformed=transformed)]


def run_polygon(inv: Invocation) -> List[Outcome]:
    document = _read_one(inv.args.file)
    points = newton_polygon(_certificate(inv, document))
    text = polygon_svg(points) if inv.args.format == 'svg' else polygon_tsv(points)
    return [Outcome(text)]


def _common_options() -> ArgumentParser:
    common = ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument('--p', type=int, help='residue characteristic')
    common.add_argument('--f', type=int, help='degree of the unramified coefficient field')
    common.add_argument('--N', type=int, help='p-adic precision')
    common.add_argument('--window', help='support window LO:HI')
    common.add_argument('--q-power', type=int, dest='q_power', help='treat modules as φ^n-modules')
    common.add_argument('--seed', type=int, help='seed of randomized generators')
    common.add_argument('--jobs', type=int, help='parallel workers over input files and blocks')
    common.add_argument('--out', help='output file (default: standard output)')
    common.add_argument('--config', help='YAML file of defaults')
    common.add_argument('--log-level', dest='log_level', help='DEBUG, INFO, WARNING or ERROR')
    return common


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(prog='phinabla', allow_abbrev=False,
                            description='Certificate checks for φ-modules and (φ,∇)-modules over the Robba ring.')
    commands = parser.add_subparsers(dest='command', required=True)

    gen = commands.add_parser('gen', help='seed generators', allow_abbrev=False)
    generators = gen.add_subparsers(dest='generator', required=True)

    standard = generators.add_parser('standard', parents=[common], allow_abbrev=False)
    standard.add_argument('--s', type=int, required=True)
    standard.add_argument('--r', type=int, required=True)
    standard.add_argument('--with-nabla', dest='with_nabla', choices=('none', 'zero'), default='none')
    standard.set_defaults(run=gen_standard)

    kummer = generators.add_parser('kummer', parents=[common], allow_abbrev=False)
    kummer.add_argument('--a', type=int, required=True)
    kummer.add_argument('--m', type=int, required=True)
    kummer.add_argument('--rank', type=int, choices=(1, 2), default=2)
    kummer.set_defaults(run=gen_kummer)

    scramble = generators.add_parser('scramble', parents=[common], allow_abbrev=False)
    scramble.add_argument('--blocks', required=True, help='SLOPE:RANK,... in increasing slope order')
    scramble.add_argument('--group', choices=(GL, SL), default=GL)
    scramble.set_defaults(run=gen_scramble)

    for generator in (standard, kummer, scramble):
        generator.add_argument('--q', type=int, help='prime power q = p^f')

    for name, handler in (('check-gauge', _check_gauge), ('check-pair', _check_pair)):
        command = commands.add_parser(name, parents=[common], allow_abbrev=False)
        command.add_argument('files', nargs='*')
        command.set_defaults(run=lambda inv, handler=handler: _for_each(inv, handler))

    slopes = commands.add_parser('verify-slopes', parents=[common], allow_abbrev=False)
    slopes.add_argument('files', nargs='*')
    slopes.add_argument('--certificate')
    slopes.set_defaults(run=lambda inv: _for_each(inv, _verify_slopes))

    push = commands.add_parser('pushforward', parents=[common], allow_abbrev=False)
    push.add_argument('n', type=int)
    push.add_argument('file', nargs='?', default='-')
    push.set_defaults(run=run_pushforward)

    tw = commands.add_parser('twist', parents=[common], allow_abbrev=False)
    tw.add_argument('s', type=int)
    tw.add_argument('file', nargs='?', default='-')
    tw.set_defaults(run=run_twist)

    tens = commands.add_parser('tensor', parents=[common], allow_abbrev=False)
    tens.add_argument('first')
    tens.add_argument('second')
    tens.set_defaults(run=run_tensor)

    reduce = commands.add_parser('reduce', parents=[common], allow_abbrev=False)
    reduce.add_argument('file', nargs='?', default='-')
    reduce.add_argument('--certificate')
    reduce.set_defaults(run=run_reduce)

    monodromy = commands.add_parser('monodromy-verify', parents=[common], allow_abbrev=False)
    monodromy.add_argument('file', nargs='?', default='-')
    monodromy.add_argument('--witness', default='auto', help='"auto" or a witness matrix document')
    monodromy.add_argument('--certificate')
    monodromy.set_defaults(run=run_monodromy)

    polygon = commands.add_parser('polygon', parents=[common], allow_abbrev=False)
    polygon.add_argument('file', nargs='?', default='-')
    polygon.add_argument('--certificate')
    polygon.add_argument('--format', choices=('tsv', 'svg'), default='tsv')
    polygon.set_defaults(run=run_polygon)

    return parser


def _settings(args: argparse.Namespace) -> Settings:
    settings = load_settings(args.config)
    if getattr(args, 'q', None) is not None:
        args.p, args.f = _prime_power(args.q)

    flags = {name: getattr(args, name) for name in ('p', 'f', 'N', 'window', 'q_power', 'seed', 'jobs',
                                                  'log_level')}
    settings = settings.merged(flags)
    if settings.jobs < 1 or settings.q_power < 1:
        raise UsageError('--jobs and --q-power must be positive')

    return settings


def _error_document(error: BaseException) -> dict:
    return {'schema': SCHEMA, 'error': {'type': type(error).__name__, 'message': str(error)}}


def _write(outcomes: List[Outcome], out: Optional[str]):
    text = '\n'.join(outcome.render() for outcome in outcomes) + '\n'
    if out is None:
        sys.stdout.write(text)
        return

    with open(out, 'w', encoding='utf-8') as stream:
        stream.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        settings = _settings(args)
        Log.set_level(settings.log_level)

        # only flags given on the command line override the context stored in documents
        overrides: Dict[str, Any] = {'p': args.p, 'f': args.f, 'N': args.N,
                                     'window': settings.window if args.window is not None else None}
        invocation = Invocation(args, settings, codec.DocumentReader(overrides))
        Log.debug('cli', f'{args.command} with {settings}')

        outcomes = args.run(invocation)
        _write(outcomes, args.out)
        status = Status.worst(outcome.status for outcome in outcomes)
        Log.info('cli', f'{args.command}: {status.value}')
        return status.exit_code

    except (PhiNablaError, OSError, ValueError, KeyError, TypeError) as error:
        Log.error('cli', f'{type(error).__name__}: {error}')
        sys.stdout.write(json.dumps(_error_document(error)) + '\n')
        return ExitCode.USAGE
