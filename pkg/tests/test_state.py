"""Wrapper surface: registration, collisions, lucky guesses, audits."""

import pytest

from dymon import (
    AssumptionKind,
    AttackerGuess,
    Bad,
    ContractViolationError,
    Hmac,
    HmacKey,
    Level,
    Literal,
    New,
    Pair,
    PresharedKey,
    PrincipalKey,
    RandomSource,
    Request,
    SEncKey,
    TAG_REQUEST,
    TableAuditError,
    hmac_sha1,
    initial_state,
    level,
    pair_encode,
)

A, B = Literal(b"Alice"), Literal(b"Bob")


def seeded(cs):
    """Register the two principal names as public data."""
    assert cs.w_to_string(b"Alice") == b"Alice"
    assert cs.w_to_string(b"Bob") == b"Bob"
    return cs


def with_key(cs, usage=None):
    usage = usage or HmacKey(PresharedKey(A, B))
    key = cs.w_fresh(usage, 16, RandomSource(5))
    assert key is not None
    return key


class StubSource:
    """Returns a fixed byte string on every draw."""

    def __init__(self, data: bytes):
        self.data = data
        self.counter = 0

    def draw(self, nbytes: int) -> bytes:
        self.counter += 1
        return self.data[:nbytes]


def test_initial_state_registers_exactly_the_tags():
    cs = initial_state()
    assert len(cs.log) == 2
    assert len(cs.table) == 2
    assert cs.term_of(b"1") == Literal(b"1")
    assert cs.term_of(b"2") == Literal(b"2")
    assert cs.failures == []


# -- w_to_string ---------------------------------------------------------------


def test_to_string_registers_fresh_public_literal():
    cs = initial_state()
    out = cs.w_to_string(b"hello")
    assert out == b"hello"
    assert cs.term_of(b"hello") == Literal(b"hello")
    assert level(Level.LOW, Literal(b"hello"), cs.log)


def test_to_string_reuses_existing_public_binding():
    cs = initial_state()
    cs.w_to_string(b"hello")
    events_before = len(cs.log)
    assert cs.w_to_string(b"hello") == b"hello"
    assert len(cs.log) == events_before


def test_to_string_of_secret_bytes_is_a_lucky_guess():
    cs = seeded(initial_state())
    key = with_key(cs)
    assert cs.w_to_string(key) is None
    assert cs.failure is not None
    assert cs.failure.kind is AssumptionKind.LUCKY_GUESS
    assert cs.failure.data == key


def test_to_string_rejects_empty():
    with pytest.raises(ContractViolationError):
        initial_state().w_to_string(b"")


# -- w_fresh -------------------------------------------------------------------


def test_fresh_logs_usage_and_stays_secret():
    cs = seeded(initial_state())
    key = with_key(cs)
    t = cs.term_of(key)
    assert t == Literal(key)
    assert New(t, HmacKey(PresharedKey(A, B))) in cs.log
    assert not level(Level.LOW, t, cs.log)


def test_fresh_duplicate_draw_is_a_collision():
    cs = seeded(initial_state())
    src = StubSource(b"\x07" * 16)
    k1 = cs.w_fresh(HmacKey(PresharedKey(A, B)), 16, src)
    assert k1 == b"\x07" * 16
    k2 = cs.w_fresh(HmacKey(PresharedKey(A, B)), 16, src)
    assert k2 is None
    assert cs.failure.kind is AssumptionKind.COLLISION
    assert "fresh draw" in cs.failure.note


def test_fresh_rejects_attacker_guess_usage():
    with pytest.raises(ContractViolationError):
        initial_state().w_fresh(AttackerGuess(), 16, RandomSource(0))


# -- pairs ---------------------------------------------------------------------


def test_pair_and_destruct_round_trip():
    cs = seeded(initial_state())
    blob = cs.w_pair(b"Alice", b"Bob")
    assert cs.term_of(blob) == Pair(A, B)
    assert cs.w_destruct(blob) == (b"Alice", b"Bob")


def test_pair_requires_registered_inputs():
    with pytest.raises(ContractViolationError):
        initial_state().w_pair(b"zz", b"1")


def test_destruct_of_public_non_pair_adopts_components():
    cs = initial_state()
    framed = pair_encode(b"xx", b"yy")
    cs.w_to_string(framed)
    x, y = cs.w_destruct(framed)
    assert (x, y) == (b"xx", b"yy")
    assert cs.term_of(b"xx") == Literal(b"xx")
    assert level(Level.LOW, Literal(b"yy"), cs.log)


def test_destruct_of_secret_non_pair_is_a_contract_violation():
    cs = seeded(initial_state())
    key = with_key(cs)
    with pytest.raises(ContractViolationError):
        cs.w_destruct(key)


# -- mac wrappers --------------------------------------------------------------


def test_hmac_requires_sayable_or_public():
    cs = seeded(initial_state())
    key = with_key(cs)
    req = cs.w_to_string(b"q")
    payload = cs.w_pair(b"1", req)
    with pytest.raises(ContractViolationError):
        cs.w_hmacsha1(key, payload)
    cs.log_event(Request(A, B, Literal(b"q")))
    digest = cs.w_hmacsha1(key, payload)
    assert digest == hmac_sha1(key, payload)
    assert cs.term_of(digest) == Hmac(cs.term_of(key), cs.term_of(payload))


def test_hmac_public_key_route_needs_no_event():
    cs = initial_state()
    k = cs.w_to_string(b"weak")
    m = cs.w_to_string(b"data")
    assert cs.w_hmacsha1(k, m) == hmac_sha1(b"weak", b"data")


def test_verify_agrees_with_real_mac():
    cs = initial_state()
    k = cs.w_to_string(b"weak")
    m = cs.w_to_string(b"data")
    mac = cs.w_hmacsha1(k, m)
    assert cs.w_hmacsha1_verify(k, m, mac)
    other = cs.w_to_string(b"other")
    assert not cs.w_hmacsha1_verify(k, other, mac)


def test_verify_success_with_stub_mac_reveals_collision():
    stub = lambda key, msg: b"\x00"
    cs = initial_state(mac_fn=stub)
    k = cs.w_to_string(b"weak")
    m1 = cs.w_to_string(b"one")
    m2 = cs.w_to_string(b"two")
    mac = cs.w_hmacsha1(k, m1)
    assert mac == b"\x00"
    assert cs.failures == []
    # verifying a different message against the same stub digest succeeds
    # concretely but forces a second term onto the same bytes
    assert cs.w_hmacsha1_verify(k, m2, mac)
    assert cs.failure is not None
    assert cs.failure.kind is AssumptionKind.COLLISION


def test_verify_notes_unsound_success_on_keyed_mac():
    # force verification success for a payload that is neither sayable nor
    # under a compromised key: the wrapper keeps a soundness note
    stub = lambda key, msg: b"\x00"
    cs = seeded(initial_state(mac_fn=stub))
    key = with_key(cs)
    m = cs.w_to_string(b"unsanctioned")
    mac = cs.w_to_string(b"\x00")
    assert cs.w_hmacsha1_verify(key, m, mac)
    assert cs.soundness_notes


# -- cipher wrappers -----------------------------------------------------------


def test_senc_requires_ticket_or_public():
    cs = seeded(initial_state())
    ek = with_key(cs, SEncKey(PrincipalKey(A)))
    body = cs.w_to_string(b"freeform")
    with pytest.raises(ContractViolationError):
        cs.w_senc(ek, body)


def test_senc_public_route_and_sdec_round_trip():
    cs = initial_state()
    k = cs.w_to_string(b"weak")
    body = cs.w_to_string(b"data")
    blob = cs.w_senc(k, body)
    assert cs.w_sdec(k, blob) == b"data"


def test_sdec_foreign_term_under_matching_tag_is_collision():
    # decrypting bytes whose term is not an SEnc under this key: only
    # reachable when the real tag check passes, so force it with w_to_string
    # bytes crafted from a genuine encryption
    from dymon import senc

    cs = initial_state()
    k = cs.w_to_string(b"weak")
    blob = senc(b"weak", b"data")
    cs.w_to_string(blob)  # registered as a plain literal, not an SEnc term
    out = cs.w_sdec(k, blob)
    assert out == b"data"
    assert cs.failure.kind is AssumptionKind.COLLISION
    assert "does not match" in cs.failure.note


def test_log_event_refuses_new():
    cs = initial_state()
    with pytest.raises(ContractViolationError):
        cs.log_event(New(Literal(b"x"), AttackerGuess()))


# -- audit ---------------------------------------------------------------------


def test_audit_rejects_hand_broken_table():
    cs = initial_state()
    cs.table.by_bytes[b"evil"] = Literal(b"good")  # break transparency
    with pytest.raises(TableAuditError):
        cs.w_to_string(b"poke")


def test_audit_rejects_non_bijection():
    cs = initial_state()
    cs.table.by_bytes[b"zz"] = Literal(b"zz")  # one-sided insert
    with pytest.raises(TableAuditError):
        cs.w_to_string(b"poke")


def test_audit_off_skips_table_scan():
    cs = initial_state(audit="off")
    cs.table.by_bytes[b"evil"] = Literal(b"good")
    cs.w_to_string(b"poke")  # does not raise


def test_registration_checks_stay_on_with_audit_off():
    cs = initial_state(audit="off")
    with pytest.raises(TableAuditError):
        cs._register(b"data", Literal(b"other"))


def test_register_refuses_underivable_term():
    cs = initial_state(audit="off")
    with pytest.raises(TableAuditError):
        cs._register(b"g", Literal(b"g"))  # no New event: not even High


def test_unknown_audit_mode_rejected():
    with pytest.raises(ValueError):
        initial_state(audit="sometimes")


def test_dump_shape():
    cs = initial_state()
    cs.w_to_string(b"x")
    doc = cs.dump()
    assert doc["response_binds_request"] is True
    assert any("New" in e for e in doc["events"])
    assert {"bytes", "term"} <= set(doc["table"][0])
