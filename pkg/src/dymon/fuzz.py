"""Type-directed random generation of attack programs, plus the fuzz loop.

Programs are generated straight against the typed attacker interface, so
every generated program is well formed by construction.  The loop replays
the embedded corpus first (known-interesting programs), then generated
ones, and buckets runs by verdict.  Runs whose verdict is a decisive
assertion failure are kept verbatim as counterexamples; every run is also
swept for weak-secrecy violations in its final log.

Everything is deterministic in (protocol, count, max_len, seed).
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field

from .attacker import interface_for, run_attack
from .dsl import (
    AssignString,
    AttackProgram,
    Call,
    CallAssign,
    Decl,
    Statement,
    ValueKind,
    format_attack,
)
from .levels import weak_secrecy_violations
from .runtime import VerdictKind
from .scripts import CORPUS
from .terms import render_term, render_usage

_WORDS = (
    b"Alice", b"Bob", b"Carol", b"Dave",
    b"Request", b"Response", b"Transfer", b"Hello",
    b"payload", b"x", b"0", b"\x00\x01", b"",
)

# relative pick weights; functions not listed default to 2
_WEIGHTS = {
    "att_setup": 10,
    "att_or_setup": 10,
    "att_getChannel_client": 6,
    "att_getChannel_server": 6,
    "att_getChannel_initiator": 6,
    "att_getChannel_responder": 6,
    "att_run_client": 6,
    "att_run_server": 6,
    "att_run_initiator": 6,
    "att_run_responder": 6,
    "att_channel_read": 5,
    "att_channel_write": 5,
    "att_toBytespub": 1,
    "att_hmacsha1Verify": 1,
}


class _Builder:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.statements: list[Statement] = []
        self.pools: dict[ValueKind, list[str]] = {k: [] for k in ValueKind}
        self._next = 0
        self.commands = 0

    def _fresh(self, kind: ValueKind) -> str:
        name = f"v{self._next}"
        self._next += 1
        self.statements.append(Decl(name, kind))
        self.pools[kind].append(name)
        return name

    def emit_string(self, value: bytes) -> str:
        name = self._fresh(ValueKind.STRING)
        self.statements.append(AssignString(name, value))
        self.commands += 1
        return name

    def emit_call(self, fn: str, params, result) -> None:
        args = tuple(self.rng.choice(self.pools[p]) for p in params)
        if result is None:
            self.statements.append(Call(fn, args))
        else:
            name = self._fresh(result)
            self.statements.append(CallAssign(name, fn, args))
        self.commands += 1


def generate_program(rng: random.Random, protocol: str, max_len: int) -> AttackProgram:
    """Random well-typed straight-line program with at most max_len commands."""
    interface = interface_for(protocol)
    b = _Builder(rng)

    # seed the pools: a couple of principal names and payload words, so the
    # setup and conversion functions are callable from the start
    for word in rng.sample(_WORDS[:4], k=2) + list(rng.sample(_WORDS, k=2)):
        if b.commands >= max_len:
            break
        b.emit_string(word)

    while b.commands < max_len:
        callable_fns = [
            (fn, sig) for fn, sig in interface.items()
            if all(b.pools[p] for p in sig.params)
        ]
        fn, sig = b.rng.choices(
            callable_fns,
            weights=[_WEIGHTS.get(fn, 2) for fn, _ in callable_fns],
        )[0]
        b.emit_call(fn, sig.params, sig.result)
    return AttackProgram(tuple(b.statements))


@dataclass
class FuzzResult:
    protocol: str
    count: int
    max_len: int
    seed: int
    histogram: dict[str, int]
    counterexamples: list[dict] = field(default_factory=list)
    secrecy_violations: list[dict] = field(default_factory=list)
    corpus_runs: int = 0
    elapsed: float = 0.0

    def to_report(self) -> dict:
        return {
            "protocol": self.protocol,
            "count": self.count,
            "max_len": self.max_len,
            "seed": self.seed,
            "histogram": dict(sorted(self.histogram.items())),
            "counterexamples": self.counterexamples,
            "secrecy_violations": self.secrecy_violations,
            "corpus_runs": self.corpus_runs,
            "elapsed_seconds": round(self.elapsed, 3),
        }


def fuzz_attacks(
    protocol: str,
    count: int,
    max_len: int = 16,
    seed: int = 0,
    *,
    audit: str = "full",
) -> FuzzResult:
    """Run count attack programs against the protocol; corpus first."""
    rng = random.Random(seed)
    corpus = CORPUS.get(protocol, ())
    histogram: Counter[str] = Counter()
    out = FuzzResult(protocol, count, max_len, seed, histogram)
    started = time.monotonic()

    for i in range(count):
        run_seed = rng.getrandbits(32)
        if i < len(corpus):
            program = corpus[i]
            out.corpus_runs += 1
        else:
            program = generate_program(rng, protocol, max_len)
        result = run_attack(program, protocol, seed=run_seed, audit=audit)
        histogram[result.verdict.kind.value] += 1

        if result.verdict.kind is VerdictKind.ASSERTION_FAILURE:
            text = program if isinstance(program, str) else format_attack(program)
            out.counterexamples.append({
                "iteration": i,
                "seed": run_seed,
                "verdict": result.verdict.to_dict(),
                "program": text,
            })
        for lit, usage in weak_secrecy_violations(result.state.log):
            out.secrecy_violations.append({
                "iteration": i,
                "seed": run_seed,
                "term": render_term(lit),
                "usage": render_usage(usage),
            })

    out.elapsed = time.monotonic() - started
    return out
