"""Hybrid state: the representation table plus the event log.

Every byte array that crosses the wrapper surface is *registered*: mapped
to the symbolic term it represents.  The table is a bijection, literals
map to their own bytes, and every registered term is derivably High; the
soundness argument leans on all three, so test builds re-audit them after
every wrapper call.

Registration is where the symbolic fiction meets reality.  If two distinct
terms ever produce the same bytes (or one term two byte strings), the
symbolic model's injectivity assumption is broken: the wrapper records a
sticky Collision assumption failure instead of updating the table.  A run
with a recorded assumption failure cannot fail an assertion afterwards,
because the verdict machinery suppresses them.

Wrapper preconditions guard honest role code; breaking one raises
ContractViolationError, which is a verdict of its own (a bug in the code
under test, not an attack and not bad luck).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

from . import backend
from .errors import ContractViolationError, TableAuditError
from .levels import Level, can_hmac, can_senc, hmac_comp, level, senc_comp
from .terms import (
    AttackerGuess,
    Bad,
    Convention,
    Event,
    Hmac,
    HmacKey,
    Literal,
    Log,
    New,
    Pair,
    SEnc,
    SEncKey,
    STANDARD,
    TAG_REQUEST,
    TAG_RESPONSE,
    Term,
    Usage,
    render_term,
)
from .wire import bytes_equal, pair_decode, pair_encode


class AssumptionKind(enum.Enum):
    COLLISION = "collision"
    LUCKY_GUESS = "lucky-guess"


@dataclass(frozen=True)
class AssumptionFailure:
    kind: AssumptionKind
    data: bytes
    existing: Optional[Term]
    attempted: Optional[Term]
    note: str = ""


class RepresentationTable:
    """Bijection between concrete byte strings and symbolic terms."""

    __slots__ = ("by_bytes", "by_term")

    def __init__(self):
        self.by_bytes: dict[bytes, Term] = {}
        self.by_term: dict[Term, bytes] = {}

    def __len__(self) -> int:
        return len(self.by_bytes)


class CryptoState:
    """Log + table + sticky assumption failures, with the wrapper surface.

    audit modes: "full" re-checks the whole table after every wrapper call,
    "delta" checks only what the call touched (growth is structural), and
    "off" disables the hook.  Registration-time checks (term High, literal
    transparency) stay on in every mode; they guard runtime soundness, not
    test instrumentation.
    """

    def __init__(
        self,
        convention: Convention = STANDARD,
        mac_fn: Optional[Callable[[bytes, bytes], bytes]] = None,
        audit: str = "full",
    ):
        if audit not in ("full", "delta", "off"):
            raise ValueError(f"unknown audit mode {audit!r}")
        self.log = Log.empty(convention)
        self.table = RepresentationTable()
        self.mac_fn = mac_fn or backend.hmac_sha1
        self.audit = audit
        self.failures: list[AssumptionFailure] = []
        self.soundness_notes: list[str] = []
        self.wrapper_calls = 0
        self._last_table_len = 0
        self._last_log_len = 0

    # -- bookkeeping ------------------------------------------------------

    @property
    def failure(self) -> Optional[AssumptionFailure]:
        return self.failures[0] if self.failures else None

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    def _record_failure(self, kind, data, existing, attempted, note=""):
        self.failures.append(AssumptionFailure(kind, data, existing, attempted, note))

    def term_of(self, data: bytes) -> Optional[Term]:
        return self.table.by_bytes.get(data)

    def bytes_of(self, t: Term) -> Optional[bytes]:
        return self.table.by_term.get(t)

    def _require_registered(self, data: bytes, location: str) -> Term:
        t = self.table.by_bytes.get(data)
        if t is None:
            raise ContractViolationError(location, "unregistered bytes")
        return t

    def _log_add(self, e: Event):
        self.log = self.log.add(e)

    def _register(self, data: bytes, t: Term) -> bool:
        """Bind data <-> t; returns False if a collision was recorded."""
        if not level(Level.HIGH, t, self.log):
            raise TableAuditError(
                f"registration of non-High term {render_term(t)}"
            )
        if isinstance(t, Literal) and t.data != data:
            raise TableAuditError("literal registered with foreign bytes")
        existing_t = self.table.by_bytes.get(data)
        if existing_t is not None and existing_t != t:
            self._record_failure(AssumptionKind.COLLISION, data, existing_t, t)
            return False
        existing_b = self.table.by_term.get(t)
        if existing_b is not None and existing_b != data:
            self._record_failure(
                AssumptionKind.COLLISION, data, t, t,
                note="term already bound to different bytes",
            )
            return False
        if existing_t is None:
            self.table.by_bytes[data] = t
        if existing_b is None:
            self.table.by_term[t] = data
        return True

    def _adopt_public(self, raw: bytes) -> bool:
        """Bind unknown bytes as a fresh attacker-guess literal.

        Reuses the existing term when the bytes are already registered Low;
        records a LuckyGuess when they are registered but not Low (the
        attacker produced secret bytes out of thin air).
        """
        t = self.table.by_bytes.get(raw)
        if t is None:
            lit = Literal(raw)
            self._log_add(New(lit, AttackerGuess()))
            self._register(raw, lit)
            return True
        if level(Level.LOW, t, self.log):
            return True
        self._record_failure(AssumptionKind.LUCKY_GUESS, raw, t, None)
        return False

    # -- wrappers ---------------------------------------------------------

    def w_to_string(self, raw: bytes) -> Optional[bytes]:
        """Introduce caller-chosen public bytes.  None signals a LuckyGuess."""
        if len(raw) == 0:
            raise ContractViolationError("to_string", "empty input")
        ok = self._adopt_public(raw)
        self._post_op()
        return raw if ok else None

    def w_fresh(self, usage: Usage, nbytes: int, src: backend.RandomSource) -> Optional[bytes]:
        """Draw fresh bytes and log their creation under the given usage."""
        if isinstance(usage, AttackerGuess):
            raise ContractViolationError("fresh", "attacker-guess usage")
        data = src.draw(nbytes)
        clash = self.table.by_bytes.get(data)
        if clash is not None:
            self._record_failure(
                AssumptionKind.COLLISION, data, clash, Literal(data),
                note="fresh draw repeated registered bytes",
            )
            self._post_op()
            return None
        lit = Literal(data)
        self._log_add(New(lit, usage))
        self._register(data, lit)
        self._post_op()
        return data

    def w_pair(self, b1: bytes, b2: bytes) -> bytes:
        t1 = self._require_registered(b1, "pair")
        t2 = self._require_registered(b2, "pair")
        out = pair_encode(b1, b2)
        self._register(out, Pair(t1, t2))
        self._post_op()
        return out

    def w_destruct(self, data: bytes) -> tuple[bytes, bytes]:
        """Split pair framing.  Raises MalformedPairError on bad framing."""
        t = self._require_registered(data, "destruct")
        if not isinstance(t, Pair) and not level(Level.LOW, t, self.log):
            raise ContractViolationError("destruct", "input neither a pair nor public")
        x, y = pair_decode(data)
        if isinstance(t, Pair):
            self._register(x, t.fst)
            self._register(y, t.snd)
        else:
            # public non-pair bytes that happen to carry framing: the split
            # parts are just more public data
            self._adopt_public(x)
            self._adopt_public(y)
        self._post_op()
        return x, y

    def w_hmacsha1(self, key: bytes, msg: bytes) -> bytes:
        tk = self._require_registered(key, "hmacsha1")
        tm = self._require_registered(msg, "hmacsha1")
        if not (
            can_hmac(tk, tm, self.log)
            or (level(Level.LOW, tk, self.log) and level(Level.LOW, tm, self.log))
        ):
            raise ContractViolationError(
                "hmacsha1", "payload not sayable under key usage and key not public"
            )
        digest = self.mac_fn(key, msg)
        self._register(digest, Hmac(tk, tm))
        self._post_op()
        return digest

    def w_hmacsha1_verify(self, key: bytes, msg: bytes, mac: bytes) -> bool:
        tk = self._require_registered(key, "hmacsha1_verify")
        tm = self._require_registered(msg, "hmacsha1_verify")
        self._require_registered(mac, "hmacsha1_verify")
        digest = self.mac_fn(key, msg)
        ok = bytes_equal(digest, mac)
        if ok:
            expected = Hmac(tk, tm)
            if level(Level.HIGH, expected, self.log):
                # registering the recomputed digest surfaces collisions
                # where the presented mac bytes were bound to another term
                self._register(digest, expected)
            else:
                # the check passed for a mac nobody could legitimately have
                # produced, so the presented bytes collide with it
                self._record_failure(
                    AssumptionKind.COLLISION, digest,
                    self.table.by_bytes.get(digest), expected,
                    note="verify succeeded without a sanctioned derivation",
                )
            if any(isinstance(u, HmacKey) for u in self.log.usages_of(tk)):
                if not (can_hmac(tk, tm, self.log) or hmac_comp(tk, self.log)):
                    self.soundness_notes.append(
                        "mac verified but payload neither sayable nor key "
                        f"compromised: {render_term(Hmac(tk, tm))}"
                    )
        self._post_op()
        return ok

    def w_senc(self, key: bytes, plaintext: bytes) -> bytes:
        tk = self._require_registered(key, "senc")
        tp = self._require_registered(plaintext, "senc")
        if not (
            can_senc(tk, tp, self.log)
            or (level(Level.LOW, tk, self.log) and level(Level.LOW, tp, self.log))
        ):
            raise ContractViolationError(
                "senc", "plaintext not a well-formed ticket and key not public"
            )
        out = backend.senc(key, plaintext)
        self._register(out, SEnc(tk, tp))
        self._post_op()
        return out

    def w_sdec(self, key: bytes, ciphertext: bytes) -> bytes:
        """Authenticated decryption.  Raises AuthFailureError on bad tags."""
        tk = self._require_registered(key, "sdec")
        tc = self._require_registered(ciphertext, "sdec")
        plain = backend.sdec(key, ciphertext)
        if isinstance(tc, SEnc) and tc.key == tk:
            self._register(plain, tc.body)
            if any(isinstance(u, SEncKey) for u in self.log.usages_of(tk)):
                if not (can_senc(tk, tc.body, self.log) or senc_comp(tk, self.log)):
                    self.soundness_notes.append(
                        "decryption succeeded but ticket neither well-formed "
                        f"nor key compromised: {render_term(tc)}"
                    )
        else:
            # the tag verified under this key but the symbolic term was
            # built some other way: an injectivity break we can name
            self._record_failure(
                AssumptionKind.COLLISION, ciphertext, tc, None,
                note="ciphertext term does not match decryption key",
            )
        self._post_op()
        return plain

    def log_event(self, e: Event):
        """Record a protocol event.  Creation events belong to the wrappers."""
        if isinstance(e, New):
            raise ContractViolationError("log_event", "New events are wrapper-internal")
        self._log_add(e)
        self._post_op()

    # -- audit ------------------------------------------------------------

    def _post_op(self):
        self.wrapper_calls += 1
        if self.audit == "off" or self.failures:
            self._snapshot()
            return
        if len(self.table) < self._last_table_len or len(self.log) < self._last_log_len:
            raise TableAuditError("state shrank")
        if not self.log.good:
            raise TableAuditError("log lost goodness")
        if self.audit == "full":
            bb, bt = self.table.by_bytes, self.table.by_term
            if len(bb) != len(bt):
                raise TableAuditError("table sides disagree in size")
            for data, t in bb.items():
                if bt.get(t) != data:
                    raise TableAuditError("table is not a bijection")
                if isinstance(t, Literal) and t.data != data:
                    raise TableAuditError("literal transparency broken")
                if not level(Level.HIGH, t, self.log):
                    raise TableAuditError(
                        f"registered term not High: {render_term(t)}"
                    )
        self._snapshot()

    def _snapshot(self):
        self._last_table_len = len(self.table)
        self._last_log_len = len(self.log)

    # -- reporting --------------------------------------------------------

    def dump(self) -> dict:
        from .terms import render_event  # local to avoid import clutter

        return {
            "response_binds_request": self.log.convention.response_binds_request,
            "events": [render_event(e) for e in self.log],
            "table": [
                {"bytes": data.hex(), "term": render_term(t)}
                for data, t in self.table.by_bytes.items()
            ],
        }


def initial_state(
    convention: Convention = STANDARD,
    mac_fn: Optional[Callable[[bytes, bytes], bytes]] = None,
    audit: str = "full",
) -> CryptoState:
    """Fresh state with the two message-format tags pre-registered."""
    cs = CryptoState(convention=convention, mac_fn=mac_fn, audit=audit)
    for tag in (TAG_REQUEST, TAG_RESPONSE):
        lit = Literal(tag)
        cs._log_add(New(lit, AttackerGuess()))
        cs._register(tag, lit)
    cs._post_op()
    return cs
