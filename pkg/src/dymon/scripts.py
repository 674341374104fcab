"""Canonical attack scripts, embedded so the CLI, tests, and fuzzer corpus
share one copy.  The repository's attacks/ directory carries the same text
as loose files for direct CLI use.
"""

from __future__ import annotations

# Honest relay of one RPC exchange: the attacker faithfully forwards the
# request to the server and the response back to the client.
RPC_HONEST = """\
# honest relay of one request/response exchange
let a : string
a = "Alice"
let b : string
b = "Bob"
let r : string
r = "Request"
let alice : bytespub
alice = att_toBytespub(a)
let bob : bytespub
bob = att_toBytespub(b)
let arg : bytespub
arg = att_toBytespub(r)
let s : session
s = att_setup(alice, bob)
let clientC : channel
clientC = att_getChannel_client(s)
let serverC : channel
serverC = att_getChannel_server(s)
att_run_server(s)
att_run_client(s, arg)
let req : bytespub
req = att_channel_read(clientC)
att_channel_write(serverC, req)
let resp : bytespub
resp = att_channel_read(serverC)
att_channel_write(clientC, resp)
"""

# Response splice: run one full exchange, then start a second client and
# feed it the recorded first response.  Against the flawed variant the
# second client accepts a response for a request it never made.
RPC_SPLICE = """\
# replay the first response to a second client
let a : string
a = "Alice"
let b : string
b = "Bob"
let r1 : string
r1 = "Request1"
let r2 : string
r2 = "Request2"
let alice : bytespub
alice = att_toBytespub(a)
let bob : bytespub
bob = att_toBytespub(b)
let arg1 : bytespub
arg1 = att_toBytespub(r1)
let arg2 : bytespub
arg2 = att_toBytespub(r2)
let s : session
s = att_setup(alice, bob)
let clientC : channel
clientC = att_getChannel_client(s)
let serverC : channel
serverC = att_getChannel_server(s)
att_run_server(s)
att_run_client(s, arg1)
let req1 : bytespub
req1 = att_channel_read(clientC)
att_channel_write(serverC, req1)
let resp1 : bytespub
resp1 = att_channel_read(serverC)
att_channel_write(clientC, resp1)
att_run_client(s, arg2)
let req2 : bytespub
req2 = att_channel_read(clientC)
att_channel_write(clientC, resp1)
"""

# Honest relay of the full key exchange: initiator -> responder -> server,
# tickets back through the responder to the initiator.
OR_HONEST = """\
# honest relay of the key exchange
let a : string
a = "Alice"
let b : string
b = "Bob"
let alice : bytespub
alice = att_toBytespub(a)
let bob : bytespub
bob = att_toBytespub(b)
let s : session
s = att_or_setup(alice, bob)
let initC : channel
initC = att_getChannel_initiator(s)
let respC : channel
respC = att_getChannel_responder(s)
let servC : channel
servC = att_getChannel_server(s)
att_run_responder(s)
att_run_server(s)
att_run_initiator(s)
let m1 : bytespub
m1 = att_channel_read(initC)
att_channel_write(respC, m1)
let m2 : bytespub
m2 = att_channel_read(respC)
att_channel_write(servC, m2)
let m3 : bytespub
m3 = att_channel_read(servC)
att_channel_write(respC, m3)
let m4 : bytespub
m4 = att_channel_read(respC)
att_channel_write(initC, m4)
"""

HONEST_DRIVERS = {
    "rpc-correct": RPC_HONEST,
    "rpc-flawed": RPC_HONEST,
    "otway-rees": OR_HONEST,
}

CORPUS = {
    "rpc-correct": (RPC_HONEST, RPC_SPLICE),
    "rpc-flawed": (RPC_HONEST, RPC_SPLICE),
    "otway-rees": (OR_HONEST,),
}
