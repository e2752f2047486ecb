from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Union

from .matrix import Matrix
from .robba import RobbaElement
from .status import Status

SCHEMA = '1'


@dataclass(frozen=True)
class Check:
    name: str
    status: Status
    precision: Optional[int] = None
    window_loss: bool = False
    detail: str = ''

    def to_json(self) -> dict:
        return {
            'name': self.name,
            'status': self.status.value,
            'precision': self.precision,
            'window_loss': self.window_loss,
            'detail': self.detail,
        }


@dataclass
class Report:
    subject: str
    checks: List[Check] = field(default_factory=list)

    def add(self, check: Check) -> 'Report':
        self.checks.append(check)
        return self

    def extend(self, other: 'Report', prefix: str = '') -> 'Report':
        for check in other.checks:
            name = f'{prefix}{check.name}' if prefix else check.name
            self.checks.append(Check(name, check.status, check.precision, check.window_loss, check.detail))
        return self

    @property
    def status(self) -> Status:
        return Status.worst(check.status for check in self.checks)

    @property
    def holds(self) -> bool:
        return self.status.holds

    def check(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check

        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            'schema': SCHEMA,
            'subject': self.subject,
            'status': self.status.value,
            'checks': [check.to_json() for check in self.checks],
        }


def residual_check(name: str, residual: Union[Matrix, RobbaElement, Iterable[RobbaElement]], N: int,
                   detail: str = '') -> Check:
    """
    Verdict for "residual == 0 modulo π^N". A coefficient of valuation below N and below the precision its entry
    is known to is a discrepancy: fail, or inconclusive when window loss touched the computation. A vanishing
    residual passes, at degraded precision when window loss occurred or digits below N were lost.
    """

    if isinstance(residual, Matrix):
        located = [((i, j), x) for i, j, x in residual.positions()]
    elif isinstance(residual, RobbaElement):
        located = [(None, residual)]
    else:
        located = [(k, x) for k, x in enumerate(residual)]

    window_loss = any(x.window_loss for _, x in located)
    precision = N
    offender = None
    for where, x in located:
        if x.prec is not None:
            precision = min(precision, x.prec)
        if offender is None:
            floor = N if x.prec is None else min(N, x.prec)
            for i, c in sorted(x.terms.items()):
                if c.val < floor:
                    offender = (where, i, c)
                    break

    if offender is not None:
        where, i, c = offender
        text = f'entry {where}: coefficient of degree {i} has valuation {c.val}'
        status = Status.INCONCLUSIVE if window_loss else Status.FAIL
        return Check(name, status, precision, window_loss, f'{detail}; {text}' if detail else text)

    status = Status.DEGRADED if window_loss or precision < N else Status.PASS
    return Check(name, status, precision, window_loss, detail)


def boolean_check(name: str, condition: bool, detail: str = '', precision: Optional[int] = None,
                  window_loss: bool = False) -> Check:
    if condition:
        status = Status.DEGRADED if window_loss else Status.PASS
    else:
        status = Status.INCONCLUSIVE if window_loss else Status.FAIL

    return Check(name, status, precision, window_loss, detail)
