"""Signed session tokens.

The service acts as its own identity provider: a login names a subject
and gets back an HMAC-signed token. Verification checks the signature
and expiry only; per-project rights come from project membership.
"""
from __future__ import annotations

import base64
import hashlib
import hmac
import json
import os
import secrets
import time

from ..errors import Unauthenticated

SESSION_SECRET_ENV = "STAGEBOARD_SESSION_SECRET"
DEFAULT_TOKEN_TTL = 12 * 60 * 60  # seconds


def resolve_secret(explicit: str | None = None) -> str:
    """Explicit setting, then the environment, then a per-process random secret."""
    return explicit or os.environ.get(SESSION_SECRET_ENV) or secrets.token_hex(32)


def _b64(raw: bytes) -> str:
    return base64.urlsafe_b64encode(raw).rstrip(b"=").decode("ascii")


def _unb64(text: str) -> bytes:
    padding = "=" * (-len(text) % 4)
    return base64.urlsafe_b64decode(text + padding)


def _sign(secret: str, body: str) -> str:
    digest = hmac.new(secret.encode("utf-8"), body.encode("ascii"), hashlib.sha256).digest()
    return _b64(digest)


def issue_token(
    secret: str,
    subject: str,
    display_name: str = "",
    ttl_seconds: int = DEFAULT_TOKEN_TTL,
    now=time.time,
) -> tuple[str, int]:
    """Returns (token, expiry as epoch seconds)."""
    expires = int(now()) + ttl_seconds
    payload = {"sub": subject, "name": display_name, "exp": expires}
    body = _b64(json.dumps(payload, sort_keys=True).encode("utf-8"))
    return f"{body}.{_sign(secret, body)}", expires


def verify_token(secret: str, token: str, now=time.time) -> dict:
    """Payload of a valid token; raises Unauthenticated otherwise."""
    try:
        body, signature = token.split(".", 1)
    except ValueError:
        raise Unauthenticated("malformed session token")
    if not hmac.compare_digest(signature, _sign(secret, body)):
        raise Unauthenticated("session token signature does not verify")
    try:
        payload = json.loads(_unb64(body))
    except (ValueError, TypeError):
        raise Unauthenticated("session token payload is unreadable")
    if not isinstance(payload, dict) or "sub" not in payload or "exp" not in payload:
        raise Unauthenticated("session token payload is incomplete")
    if int(payload["exp"]) <= int(now()):
        raise Unauthenticated("session token has expired")
    return payload
