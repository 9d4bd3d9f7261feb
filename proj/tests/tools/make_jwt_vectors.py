#!/usr/bin/env python3
"""Reference oracle for the JWT golden vectors used by the acceptance suite.

Computes compact HS256 JWTs with Python's hmac/hashlib, independent of the
C++ implementation. Run it to regenerate the frozen constants in
tests/acceptance/acceptance_main.cpp.
"""
import base64
import hashlib
import hmac
import json


def b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def mint(key: bytes, sub: str, iat: int, exp: int, jti: str, perms: list[str]) -> str:
    header = {"alg": "HS256", "typ": "JWT"}
    payload = {"exp": exp, "iat": iat, "jti": jti, "permissions": perms, "sub": sub}
    h = b64url(json.dumps(header, sort_keys=True, separators=(",", ":")).encode())
    p = b64url(json.dumps(payload, sort_keys=True, separators=(",", ":")).encode())
    sig = hmac.new(key, f"{h}.{p}".encode("ascii"), hashlib.sha256).digest()
    return f"{h}.{p}.{b64url(sig)}"


VECTORS = [
    {
        "name": "single allow permission",
        "key": bytes([0x0B] * 32),
        "sub": "alice",
        "iat": 1700000000,
        "exp": 1700000005,
        "jti": "00000000-0000-0000-0000-000000000000",
        "perms": ["config.put|ALLOW|p1"],
    },
    {
        "name": "empty permission list",
        "key": bytes(range(32)),
        "sub": "bob",
        "iat": 1712345678,
        "exp": 1712345683,
        "jti": "123e4567-e89b-42d3-a456-426614174000",
        "perms": [],
    },
    {
        "name": "mixed allow deny set",
        "key": bytes([0x42] * 32),
        "sub": "carol.ops-1",
        "iat": 1699999999,
        "exp": 1700000004,
        "jti": "ffffffff-ffff-4fff-8fff-ffffffffffff",
        "perms": [
            "config.get|ALLOW|5f2c6b1a-9d3e-4c7f-8a21-0b64d9e3a111",
            "ns.read|DENY|5f2c6b1a-9d3e-4c7f-8a21-0b64d9e3a222",
            "org.member.add|ALLOW|5f2c6b1a-9d3e-4c7f-8a21-0b64d9e3a333",
        ],
    },
]

for v in VECTORS:
    tok = mint(v["key"], v["sub"], v["iat"], v["exp"], v["jti"], v["perms"])
    print(f'// {v["name"]}')
    print(f'key_hex = {v["key"].hex()}')
    print(f'token   = {tok}')
    print()
