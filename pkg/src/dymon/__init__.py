"""Executable symbolic-crypto runtime.

Concrete byte arrays flow through real cryptographic operations while a
representation table tracks the symbolic term each byte string stands for.
An inductive two-point level judgement over the run's event log decides
what the attacker may know; wrapper contracts police the honest roles; a
straight-line attack language drives replays and fuzzing against the
bundled protocols.
"""

from .attacker import FAILED, PROTOCOLS, RunResult, interface_for, run_attack
from .backend import RandomSource, hmac_sha1, sdec, senc
from .dsl import (
    AttackProgram,
    Signature,
    ValueKind,
    format_attack,
    parse_attack,
    validate_attack,
)
from .errors import (
    AttackSyntaxError,
    AuthFailureError,
    ContractViolationError,
    DymonError,
    EncodingError,
    MalformedPairError,
    TableAuditError,
    TermSyntaxError,
)
from .fuzz import FuzzResult, fuzz_attacks, generate_program
from .levels import (
    Level,
    can_hmac,
    can_senc,
    explain,
    hmac_comp,
    level,
    nonce_comp,
    senc_comp,
    weak_secrecy_violations,
)
from .runtime import Channel, EXIT_CODES, Runtime, Verdict, VerdictKind
from .scripts import CORPUS, HONEST_DRIVERS, OR_HONEST, RPC_HONEST, RPC_SPLICE
from .state import (
    AssumptionFailure,
    AssumptionKind,
    CryptoState,
    RepresentationTable,
    initial_state,
)
from .terms import (
    AttackerGuess,
    Bad,
    Convention,
    Event,
    Hmac,
    HmacKey,
    Initiator,
    Literal,
    Log,
    New,
    Nonce,
    Pair,
    PresharedKey,
    PrincipalKey,
    Request,
    Responder,
    Response,
    SEnc,
    SEncKey,
    SessionKey,
    STANDARD,
    TAG_REQUEST,
    TAG_RESPONSE,
    Term,
    Usage,
    parse_event,
    parse_term,
    render_event,
    render_term,
    render_usage,
)
from .wire import pair_decode, pair_encode

__version__ = "0.1.0"

__all__ = [
    "AssumptionFailure",
    "AssumptionKind",
    "AttackProgram",
    "AttackSyntaxError",
    "AttackerGuess",
    "AuthFailureError",
    "Bad",
    "CORPUS",
    "Channel",
    "ContractViolationError",
    "Convention",
    "CryptoState",
    "DymonError",
    "EXIT_CODES",
    "EncodingError",
    "Event",
    "FAILED",
    "FuzzResult",
    "HONEST_DRIVERS",
    "Hmac",
    "HmacKey",
    "Initiator",
    "Level",
    "Literal",
    "Log",
    "MalformedPairError",
    "New",
    "Nonce",
    "OR_HONEST",
    "PROTOCOLS",
    "Pair",
    "PresharedKey",
    "PrincipalKey",
    "RPC_HONEST",
    "RPC_SPLICE",
    "RandomSource",
    "RepresentationTable",
    "Request",
    "Responder",
    "Response",
    "RunResult",
    "Runtime",
    "SEnc",
    "SEncKey",
    "STANDARD",
    "SessionKey",
    "Signature",
    "TAG_REQUEST",
    "TAG_RESPONSE",
    "TableAuditError",
    "Term",
    "TermSyntaxError",
    "Usage",
    "ValueKind",
    "Verdict",
    "VerdictKind",
    "can_hmac",
    "can_senc",
    "explain",
    "format_attack",
    "fuzz_attacks",
    "generate_program",
    "hmac_comp",
    "hmac_sha1",
    "initial_state",
    "interface_for",
    "level",
    "nonce_comp",
    "parse_attack",
    "parse_event",
    "parse_term",
    "render_event",
    "render_term",
    "render_usage",
    "run_attack",
    "sdec",
    "senc",
    "senc_comp",
    "validate_attack",
    "weak_secrecy_violations",
    "pair_decode",
    "pair_encode",
]
