"""Single-threaded run coordination: channels, role tasks, verdicts.

Roles are generators.  A role that wants input yields the channel it is
waiting on; the scheduler resumes it when the attacker has written
something there.  All scheduling is deterministic under the run seed; the
only freedom is the order in which independently runnable roles advance,
and that order is drawn from a seeded RNG.

Verdict discipline (the safety semantics):
  * an assertion failure decides the run only if no assumption failure was
    recorded before it; otherwise it is suppressed,
  * contract violations decide the run the same way,
  * an attacker read on an empty channel with no role able to make progress
    is a deadlock,
  * otherwise the run is Ok.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterator, NoReturn, Optional

from .backend import RandomSource
from .errors import ContractViolationError
from .levels import Level, level
from .state import AssumptionFailure, CryptoState


class VerdictKind(enum.Enum):
    OK = "ok"
    ASSERTION_FAILURE = "assertion-failure"
    ASSUMPTION_FAILURE = "assumption-failure"
    DEADLOCK = "deadlock"
    CONTRACT_VIOLATION = "contract-violation"


EXIT_CODES = {
    VerdictKind.OK: 0,
    VerdictKind.ASSERTION_FAILURE: 10,
    VerdictKind.ASSUMPTION_FAILURE: 11,
    VerdictKind.DEADLOCK: 12,
    VerdictKind.CONTRACT_VIOLATION: 13,
}


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    location: Optional[str] = None
    detail: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "location": self.location, "detail": self.detail}


def _assumption_verdict(f: AssumptionFailure) -> Verdict:
    return Verdict(VerdictKind.ASSUMPTION_FAILURE, None, f.kind.value)


class _StopRun(Exception):
    """Internal: the verdict is decided, unwind to the run loop."""


class _RoleAbort(Exception):
    """Internal: this role stops (suppressed assertion), run continues."""


class Channel:
    """Byte pipe between one role and the attacker-controlled network.

    Two FIFOs, one per direction, so a role never consumes its own writes:
    to_net holds what the role sent (the attacker reads it), from_net holds
    what the attacker delivered (the role reads it).
    """

    __slots__ = ("name", "to_net", "from_net")

    def __init__(self, name: str):
        self.name = name
        self.to_net: deque[bytes] = deque()
        self.from_net: deque[bytes] = deque()

    def __repr__(self) -> str:
        return f"<Channel {self.name}>"


class RoleTask:
    __slots__ = ("name", "gen", "done", "waiting_on")

    def __init__(self, name: str, gen: Iterator):
        self.name = name
        self.gen = gen
        self.done = False
        self.waiting_on: Optional[Channel] = None


class Runtime:
    def __init__(self, cs: CryptoState, protocol: str, seed: int,
                 rand: Optional[RandomSource] = None):
        self.cs = cs
        self.protocol = protocol
        self.seed = seed
        self.rand = rand if rand is not None else RandomSource(seed)
        self.roles: list[RoleTask] = []
        self.verdict: Optional[Verdict] = None
        self.assertions_checked = 0
        self.suppressed: list[tuple[str, str]] = []
        self._sched = random.Random(seed ^ 0x5EED)
        self._spawned = 0

    # -- roles --------------------------------------------------------------

    def spawn(self, name: str, gen: Iterator) -> RoleTask:
        self._spawned += 1
        task = RoleTask(f"{name}#{self._spawned}", gen)
        self.roles.append(task)
        return task

    def channel_read(self, ch: Channel):
        """Role-side read; used as ``yield from`` inside role generators."""
        while not ch.from_net:
            yield ch
        return ch.from_net.popleft()

    def role_write(self, ch: Channel, data: bytes):
        self._check_public(data, f"channel_write[{ch.name}]")
        ch.to_net.append(data)

    # -- attacker-side channel access ----------------------------------------

    def att_write(self, ch: Channel, data: bytes):
        self._check_public(data, f"att_channel_write[{ch.name}]")
        ch.from_net.append(data)

    def att_read(self, ch: Channel) -> bytes:
        if not ch.to_net:
            self.drain()
        if not ch.to_net:
            if self.cs.failure is not None:
                self.verdict = _assumption_verdict(self.cs.failure)
            else:
                self.verdict = Verdict(
                    VerdictKind.DEADLOCK, f"att_channel_read[{ch.name}]",
                    "read on empty channel with no runnable role",
                )
            raise _StopRun()
        return ch.to_net.popleft()

    def _check_public(self, data: bytes, location: str):
        t = self.cs.term_of(data)
        if t is None:
            raise ContractViolationError(location, "unregistered bytes")
        if not level(Level.LOW, t, self.cs.log):
            raise ContractViolationError(location, "attempt to send a non-public value")

    # -- assertions and faults ----------------------------------------------

    def assert_event(self, holds: bool, location: str, description: str):
        self.assertions_checked += 1
        if holds:
            return
        if self.cs.failure is not None:
            self.suppressed.append((location, description))
            raise _RoleAbort()
        self.verdict = Verdict(VerdictKind.ASSERTION_FAILURE, location, description)
        raise _StopRun()

    def contract_violation(self, exc: ContractViolationError) -> NoReturn:
        if self.cs.failure is not None:
            self.suppressed.append((exc.location, exc.reason))
            self.verdict = _assumption_verdict(self.cs.failure)
        else:
            self.verdict = Verdict(VerdictKind.CONTRACT_VIOLATION, exc.location, exc.reason)
        raise _StopRun()

    # -- scheduling -----------------------------------------------------------

    def _runnable(self) -> list[RoleTask]:
        return [
            t for t in self.roles
            if not t.done and (t.waiting_on is None or t.waiting_on.from_net)
        ]

    def drain(self):
        """Advance every runnable role until all are parked or finished."""
        while True:
            ready = self._runnable()
            if not ready:
                return
            self._sched.shuffle(ready)
            for task in ready:
                self._step(task)

    def _step(self, task: RoleTask):
        task.waiting_on = None
        while True:
            try:
                ch = task.gen.send(None)
            except StopIteration:
                task.done = True
                return
            except _RoleAbort:
                task.done = True
                return
            except ContractViolationError as exc:
                task.done = True
                self.contract_violation(exc)
            if ch.from_net:
                continue
            task.waiting_on = ch
            return

    # -- verdict ---------------------------------------------------------------

    def finalize(self) -> Verdict:
        if self.verdict is None:
            try:
                self.drain()
            except _StopRun:
                pass
        if self.verdict is not None:
            return self.verdict
        if self.cs.failure is not None:
            self.verdict = _assumption_verdict(self.cs.failure)
        elif any(not t.done for t in self.roles):
            stuck = ", ".join(t.name for t in self.roles if not t.done)
            self.verdict = Verdict(VerdictKind.DEADLOCK, stuck, "roles still waiting at end of run")
        else:
            self.verdict = Verdict(VerdictKind.OK)
        return self.verdict
