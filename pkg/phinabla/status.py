import enum
from typing import Iterable


class ExitCode:
    PASS = 0
    FAIL = 1
    INCONCLUSIVE = 2
    USAGE = 3


class Status(enum.Enum):
    """ Verdict lattice shared by every check. Order of severity: pass < degraded < inconclusive < fail. """

    PASS = 'pass'
    DEGRADED = 'pass-at-degraded-precision'
    INCONCLUSIVE = 'inconclusive'
    FAIL = 'fail'

    @property
    def severity(self) -> int:
        return _SEVERITY[self]

    @property
    def exit_code(self) -> int:
        if self is Status.PASS:
            return ExitCode.PASS

        if self is Status.FAIL:
            return ExitCode.FAIL

        return ExitCode.INCONCLUSIVE

    @property
    def holds(self) -> bool:
        """ True when the checked identity holds, possibly only at degraded precision. """

        return self in (Status.PASS, Status.DEGRADED)

    @staticmethod
    def worst(statuses: Iterable['Status']) -> 'Status':
        result = Status.PASS
        for status in statuses:
            if status.severity > result.severity:
                result = status

        return result


_SEVERITY = {
    Status.PASS: 0,
    Status.DEGRADED: 1,
    Status.INCONCLUSIVE: 2,
    Status.FAIL: 3,
}
