"""Attack strategies: key offset, and malicious-KGC impersonation / MITM.

The key offset strategy carries no secret state at all; it only rescales the
ephemeral point of an intercepted message.  The malicious-KGC strategies take
only the master secret, identities, public parameters and their own
randomness, never anything a victim holds privately.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

from .curve_math import scalar_mul
from .cui_protocol import (
    INITIATOR,
    RESPONDER,
    CuiEphemeral,
    CuiKgcState,
    CuiMessage,
    CuiParams,
    CuiSessionSecrets,
    CuiUserKeys,
    cui_derive,
    cui_extract_partial,
    cui_gen_user,
    cui_initiate,
)
from .deng_protocol import DengMessage, DengParams
from .errors import BadAlpha
from .rng import SeededRng

A_TO_B = "A->B"
B_TO_A = "B->A"
BOTH = "both"
DIRECTIONS = (A_TO_B, B_TO_A, BOTH)

Message = Union[CuiMessage, DengMessage]


def check_alpha(alpha: int, n: int) -> int:
    alpha %= n
    if alpha in (0, 1):
        raise BadAlpha("alpha must not be 0 or 1 mod n")
    return alpha


def draw_alpha(rng: SeededRng, n: int) -> int:
    return rng.randrange(2, n)


@dataclass(frozen=True)
class TamperRule:
    """Channel behaviour; ``kind`` is "scale-ephemeral" or "replace-message"."""

    direction: str
    kind: str
    alpha: int | None = None

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.kind == "scale-ephemeral":
            if self.alpha is None or self.alpha in (0, 1):
                raise BadAlpha("scaling rule needs alpha not in {0, 1}")
        elif self.kind != "replace-message":
            raise ValueError(f"unknown tamper kind {self.kind!r}")

    def applies_to(self, direction: str) -> bool:
        return self.direction in (BOTH, direction)


def koa_tamper(msg: Message, alpha: int, params: CuiParams | DengParams) -> Message:
    """Scale only the ephemeral point of ``msg`` by alpha."""
    curve = params.curve
    alpha = check_alpha(alpha, curve.n)
    if isinstance(msg, CuiMessage):
        return replace(msg, T=scalar_mul(alpha, msg.T, curve))
    if isinstance(msg, DengMessage):
        return replace(msg, M=scalar_mul(alpha, msg.M, curve))
    raise TypeError(f"cannot tamper with {type(msg).__name__}")


@dataclass(frozen=True)
class KeyOffsetAdversary:
    """Passive-knowledge tamperer: holds alpha and a direction, nothing else."""

    alpha: int
    direction: str = BOTH

    def rule(self) -> TamperRule:
        return TamperRule(self.direction, "scale-ephemeral", self.alpha)

    def intercept(self, msg: Message, direction: str, params) -> Message:
        if self.rule().applies_to(direction):
            return koa_tamper(msg, self.alpha, params)
        return msg


@dataclass
class MaliciousKgc:
    """Forged per-identity key material derived from the master secret.

    ``forged`` maps a victim identity to the (keys, ephemeral) pair the
    adversary uses when posing as that identity.
    """

    master: int
    forged: dict[bytes, tuple[CuiUserKeys, CuiEphemeral]] = field(default_factory=dict)


def bia_forge_cui(
    master: int, victim_ID: bytes, params: CuiParams, rng: SeededRng, state: MaliciousKgc | None = None
) -> tuple[MaliciousKgc, CuiMessage]:
    """Build a fresh message posing as ``victim_ID``.

    The partial key comes from the master secret; the "user secret" x' and
    the ephemeral t' are the adversary's own choices, so s' = x' + d and the
    forged X' = x'G satisfy the implicit-key identity for ``victim_ID``.
    """
    if state is None:
        state = MaliciousKgc(master)
    d = cui_extract_partial(CuiKgcState(master), victim_ID, params)
    keys = cui_gen_user(params, victim_ID, d, rng.fork("x'"))
    eph, msg = cui_initiate(keys, params, rng.fork("t'"))
    state.forged[victim_ID] = (keys, eph)
    return state, msg


def bia_derive_cui(
    state: MaliciousKgc, peer_msg: CuiMessage, params: CuiParams, as_ID: bytes, role: str = INITIATOR
) -> CuiSessionSecrets:
    keys, eph = state.forged[as_ID]
    return cui_derive(keys, eph, peer_msg, role, params)


@dataclass(frozen=True)
class MmaSessions:
    forged_to_b: CuiMessage
    forged_to_a: CuiMessage
    with_a: CuiSessionSecrets
    with_b: CuiSessionSecrets
    state: MaliciousKgc


def mma_forge_cui(
    master: int, ID_A: bytes, ID_B: bytes, params: CuiParams, rng: SeededRng
) -> tuple[MaliciousKgc, CuiMessage, CuiMessage]:
    """Independent forgeries: one posing as A (for B), one posing as B (for A)."""
    state, as_a = bia_forge_cui(master, ID_A, params, rng.fork("as-A"))
    state, as_b = bia_forge_cui(master, ID_B, params, rng.fork("as-B"), state)
    return state, as_a, as_b


def mma_run_cui(
    master: int,
    ID_A: bytes,
    ID_B: bytes,
    params: CuiParams,
    rng: SeededRng,
    from_a: CuiMessage,
    from_b: CuiMessage,
) -> MmaSessions:
    """Man in the middle between initiator A and responder B.

    ``from_a`` / ``from_b`` are the intercepted honest messages; neither is
    forwarded.  The adversary is responder (as B) toward A and initiator
    (as A) toward B.
    """
    state, as_a, as_b = mma_forge_cui(master, ID_A, ID_B, params, rng)
    with_a = bia_derive_cui(state, from_a, params, ID_B, RESPONDER)
    with_b = bia_derive_cui(state, from_b, params, ID_A, INITIATOR)
    return MmaSessions(as_a, as_b, with_a, with_b, state)
