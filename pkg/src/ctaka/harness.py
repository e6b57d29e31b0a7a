"""Deterministic scenario runner.

A run wires together the KGC, two honest parties, a key directory and a
single channel function through which every message passes.  The adversary
(if any) lives in that channel.  All randomness is forked from one seeded
root stream by (party, purpose), so a config always replays to the same
transcript bytes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

from . import adversary as adv
from .curve_math import CurveParams, Point, encode_point, get_profile
from .cui_protocol import (
    INITIATOR,
    RESPONDER,
    CuiMessage,
    cui_confirm_tag,
    cui_derive,
    cui_extract_partial,
    cui_gen_user,
    cui_initiate,
    cui_setup,
    cui_transcript,
    cui_verify_tag,
)
from .deng_protocol import (
    DengMessage,
    DengPublicRecord,
    deng_derive,
    deng_initiate,
    deng_register,
    deng_setup,
    deng_transcript,
)
from .errors import (
    BadAlpha,
    ConfigError,
    DegeneratePoint,
    DegenerateScalar,
    DuplicateIdentity,
    InvalidPoint,
    UnknownIdentity,
)
from .hash_encoding import DIGEST_ALGORITHM, short_digest
from .rng import SeededRng

PROTOCOLS = ("cui", "deng")
SCENARIOS = ("honest", "koa", "bia", "mma")
ATTACKS = ("koa", "bia", "mma")
MAX_ATTEMPTS = 8
_ABORTS = (DegenerateScalar, DegeneratePoint, InvalidPoint)


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str
    scenario: str
    profile: str = "toy"
    seed: int = 1
    alpha: int | None = None
    confirm: bool = False
    identities: tuple[str, str] = ("alice", "bob")

    def __post_init__(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.scenario in ("bia", "mma") and self.protocol != "cui":
            raise ConfigError(f"{self.scenario} is only defined against the cui protocol")
        get_profile(self.profile)
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.alpha is not None:
            if self.scenario != "koa":
                raise ConfigError("alpha only applies to the koa scenario")
            try:
                adv.check_alpha(self.alpha, get_profile(self.profile).n)
            except BadAlpha as e:
                raise ConfigError(str(e)) from None
        if len(self.identities) != 2 or self.identities[0] == self.identities[1]:
            raise ConfigError("need two distinct identities")

    @property
    def curve(self) -> CurveParams:
        return get_profile(self.profile)


class KeyDirectory:
    """Write-once map from identity to published public record."""

    def __init__(self) -> None:
        self._records: dict[bytes, Any] = {}

    def publish(self, ID: bytes, record: Any) -> None:
        if ID in self._records:
            raise DuplicateIdentity(ID)
        self._records[ID] = record

    def lookup(self, ID: bytes) -> Any:
        try:
            return self._records[ID]
        except KeyError:
            raise UnknownIdentity(ID) from None

    def __contains__(self, ID: bytes) -> bool:
        return ID in self._records


def directory_publish(directory: KeyDirectory, ID: bytes, record: Any) -> None:
    directory.publish(ID, record)


def directory_lookup(directory: KeyDirectory, ID: bytes) -> Any:
    return directory.lookup(ID)


@dataclass
class Verdict:
    keys_match: bool
    attack_success: bool
    aborted: bool = False
    confirmation_detected: bool = False
    k1_equal: bool | None = None
    k2_equal: bool | None = None
    l_equal: bool | None = None
    adversary_matches: dict[str, bool] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class Transcript:
    header: dict[str, Any]
    events: list[dict[str, Any]] = field(default_factory=list)
    key_material: dict[str, dict[str, str]] = field(default_factory=dict)
    secrets: dict[str, dict[str, str]] = field(default_factory=dict)
    verdict: Verdict | None = None

    def event(self, kind: str, **fields: Any) -> None:
        self.events.append({"kind": kind, **fields})

    def as_dict(self) -> dict[str, Any]:
        out = {
            "header": self.header,
            "events": self.events,
            "key_material": self.key_material,
            "verdict": self.verdict.as_dict() if self.verdict else None,
        }
        if self.secrets:
            out["secrets"] = self.secrets
        return out


# -- verdict ----------------------------------------------------------------


def _eq(material: dict[str, dict[str, str]], a: str, b: str, key: str) -> bool | None:
    if a in material and b in material and key in material[a] and key in material[b]:
        return material[a][key] == material[b][key]
    return None


def judge(
    protocol: str,
    scenario: str,
    material: dict[str, dict[str, str]],
    confirm: bool = False,
    rejections: int = 0,
    aborted: bool = False,
) -> Verdict:
    """Turn collected key digests into a verdict.

    ``material`` maps a session label ("A", "B", "adversary-as-A", ...) to
    digests of its key material.  Only digests are consulted, so the verdict
    can be recomputed from an emitted transcript.
    """
    if aborted:
        return Verdict(keys_match=False, attack_success=False, aborted=True)
    keys_match = bool(_eq(material, "A", "B", "SK"))
    v = Verdict(keys_match=keys_match, attack_success=False)
    if protocol == "cui" and scenario in ("honest", "koa"):
        v.k1_equal = _eq(material, "A", "B", "K1")
        v.k2_equal = _eq(material, "A", "B", "K2")
    if protocol == "deng":
        v.l_equal = _eq(material, "A", "B", "l")
    detected = confirm and rejections > 0
    v.confirmation_detected = detected

    if scenario == "koa":
        success = not keys_match
        if protocol == "cui":
            success = success and bool(v.k2_equal)
        v.attack_success = success and not detected
    elif scenario == "bia":
        v.adversary_matches = {"B": bool(_eq(material, "adversary-as-A", "B", "SK"))}
        v.attack_success = v.adversary_matches["B"]
    elif scenario == "mma":
        v.adversary_matches = {
            "A": bool(_eq(material, "adversary-as-B", "A", "SK")),
            "B": bool(_eq(material, "adversary-as-A", "B", "SK")),
        }
        v.attack_success = all(v.adversary_matches.values())
    return v


def expectation_met(config: ScenarioConfig, verdict: Verdict) -> bool:
    """Honest runs must agree; attacks must succeed unless confirmation stops them."""
    if verdict.aborted:
        return False
    if config.scenario == "honest":
        return verdict.keys_match and not verdict.confirmation_detected
    if config.scenario == "koa" and config.confirm:
        return verdict.confirmation_detected and not verdict.attack_success
    return verdict.attack_success


# -- helpers ----------------------------------------------------------------


def _hex_point(P: Point, curve: CurveParams) -> str:
    return encode_point(P, curve).hex()


def _hex_scalar(k: int, curve: CurveParams) -> str:
    return k.to_bytes(curve.scalar_bytes, "big").hex()


def _msg_fields(msg, curve: CurveParams) -> dict[str, str]:
    if isinstance(msg, CuiMessage):
        return {"ID": msg.ID.hex(), "X": _hex_point(msg.X, curve), "T": _hex_point(msg.T, curve)}
    return {"R": _hex_point(msg.R, curve), "M": _hex_point(msg.M, curve)}


class _Run:
    """Mutable state of one scenario execution."""

    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config
        self.curve = config.curve
        self.root = SeededRng(config.seed, f"ctaka/{config.protocol}/{config.scenario}/{config.profile}")
        self.ids = tuple(i.encode("utf-8") for i in config.identities)
        self.directory = KeyDirectory()
        self.toy = config.profile == "toy"
        c = self.curve
        self.t = Transcript(
            header={
                "config": {
                    "protocol": config.protocol,
                    "scenario": config.scenario,
                    "profile": config.profile,
                    "seed": config.seed,
                    "alpha": None if config.alpha is None else format(config.alpha, "x"),
                    "confirm": config.confirm,
                    "identities": list(config.identities),
                },
                "digest_algorithm": DIGEST_ALGORITHM,
                # confirmation is only discussed for Cui; on Deng it is our addition
                "extensions": ["deng-key-confirmation"] if config.protocol == "deng" and config.confirm else [],
                "curve": {
                    "profile_id": c.profile_id,
                    "p": format(c.p, "x"),
                    "a": format(c.a, "x"),
                    "b": format(c.b, "x"),
                    "Gx": format(c.G.x, "x"),
                    "Gy": format(c.G.y, "x"),
                    "n": format(c.n, "x"),
                },
            }
        )
        self.rejections = 0
        self.koa: adv.KeyOffsetAdversary | None = None
        if config.scenario == "koa":
            alpha = config.alpha
            if alpha is None:
                alpha = adv.draw_alpha(self.root.fork("adversary/alpha"), c.n)
            self.koa = adv.KeyOffsetAdversary(alpha, adv.BOTH)

    # channel ---------------------------------------------------------------

    def channel(self, msg, direction: str, params):
        src, dst = ("A", "B") if direction == adv.A_TO_B else ("B", "A")
        self.t.event("send", direction=direction, sender=src, message=_msg_fields(msg, self.curve))
        out = msg
        if self.koa is not None:
            out = self.koa.intercept(msg, direction, params)
            rule = self.koa.rule()
            self.t.event(
                "tamper",
                direction=direction,
                rule=rule.kind,
                alpha=format(rule.alpha, "x"),
                message=_msg_fields(out, self.curve),
            )
        self.t.event("deliver", direction=direction, recipient=dst, message=_msg_fields(out, self.curve))
        return out

    def inject(self, msg, direction: str, posing_as: str) -> None:
        dst = "B" if direction == adv.A_TO_B else "A"
        self.t.event(
            "tamper",
            direction=direction,
            rule="replace-message",
            posing_as=posing_as,
            message=_msg_fields(msg, self.curve),
        )
        self.t.event("deliver", direction=direction, recipient=dst, message=_msg_fields(msg, self.curve))

    def intercept(self, msg, direction: str) -> None:
        src = "A" if direction == adv.A_TO_B else "B"
        self.t.event("send", direction=direction, sender=src, message=_msg_fields(msg, self.curve))
        self.t.event("drop", direction=direction)

    # key material ----------------------------------------------------------

    def record(self, label: str, values: dict[str, Any]) -> None:
        digests, raw = {}, {}
        for name, v in values.items():
            if isinstance(v, Point):
                b = encode_point(v, self.curve)
            elif isinstance(v, bytes):
                b = v
            else:
                b = v.to_bytes(self.curve.scalar_bytes, "big")
            digests[name] = short_digest(b)
            raw[name] = b.hex()
        self.t.key_material[label] = digests
        if self.toy:
            self.t.secrets.setdefault(label, {}).update(raw)

    def record_secret(self, label: str, **values: int) -> None:
        if self.toy:
            self.t.secrets.setdefault(label, {}).update(
                {k: _hex_scalar(v, self.curve) for k, v in values.items()}
            )

    def confirm(self, sessions: dict[str, tuple[bytes, bytes, str]], links: list[tuple[str, str]]) -> None:
        """Exchange tags over each (sender, receiver) link.

        ``sessions`` maps a label to (SK, observed transcript, own role).
        """
        for sender, receiver in links:
            sk, view, role = sessions[sender]
            tag = cui_confirm_tag(sk, view, role)
            r_sk, r_view, _ = sessions[receiver]
            ok = cui_verify_tag(r_sk, r_view, role, tag)
            honest = receiver in ("A", "B")
            if honest and not ok:
                self.rejections += 1
            self.t.event("confirm", sender=sender, receiver=receiver, tag=tag.hex(), accepted=ok)


def _attempts(run: _Run, body: Callable[[int], None]) -> bool:
    """Retry the agreement phase with fresh ephemerals after a degenerate abort."""
    for attempt in range(MAX_ATTEMPTS):
        try:
            body(attempt)
            return True
        except _ABORTS as e:
            run.t.event("abort", attempt=attempt, reason=type(e).__name__, detail=str(e))
            run.t.key_material.clear()
            run.t.secrets = {k: v for k, v in run.t.secrets.items() if k.startswith("long-term")}
            run.rejections = 0
    return False


# -- cui --------------------------------------------------------------------


def _run_cui(run: _Run) -> bool:
    cfg, curve, root = run.config, run.curve, run.root
    params, kgc = cui_setup(curve, root.fork("kgc/setup"))
    run.t.event("setup", P_pub=_hex_point(params.P_pub, curve))
    run.record_secret("long-term:KGC", s=kgc.s)

    users = {}
    for label, ID in zip("AB", run.ids):
        d = cui_extract_partial(kgc, ID, params)
        keys = cui_gen_user(params, ID, d, root.fork(f"party/{label}/long-term"))
        run.directory.publish(ID, keys.X)
        users[label] = keys
        run.t.event("register", party=label, ID=ID.hex(), X=_hex_point(keys.X, curve))
        run.record_secret(f"long-term:{label}", x=keys.x, d=d, s_i=keys.s_i)
    A, B = users["A"], users["B"]

    def session(attempt: int) -> None:
        rng_a = root.fork(f"party/A/session/{attempt}")
        rng_b = root.fork(f"party/B/session/{attempt}")
        rng_adv = root.fork(f"adversary/session/{attempt}")
        sessions: dict[str, tuple[bytes, bytes, str]] = {}

        if cfg.scenario in ("honest", "koa"):
            eph_a, msg_a = cui_initiate(A, params, rng_a)
            got_b = run.channel(msg_a, adv.A_TO_B, params)
            eph_b, msg_b = cui_initiate(B, params, rng_b)
            got_a = run.channel(msg_b, adv.B_TO_A, params)
            run.record_secret("session:A", t=eph_a.t)
            run.record_secret("session:B", t=eph_b.t)
            sa = cui_derive(A, eph_a, got_a, INITIATOR, params)
            sb = cui_derive(B, eph_b, got_b, RESPONDER, params)
            run.record("A", {"K1": sa.K1, "K2": sa.K2, "SK": sa.SK})
            run.record("B", {"K1": sb.K1, "K2": sb.K2, "SK": sb.SK})
            sessions["A"] = (sa.SK, cui_transcript(msg_a, got_a, params), INITIATOR)
            sessions["B"] = (sb.SK, cui_transcript(got_b, msg_b, params), RESPONDER)
            links = [("B", "A"), ("A", "B")]

        elif cfg.scenario == "bia":
            # A never speaks; the KGC opens the session in A's name
            state, forged = adv.bia_forge_cui(kgc.s, A.ID, params, rng_adv)
            run.inject(forged, adv.A_TO_B, posing_as="A")
            eph_b, msg_b = cui_initiate(B, params, rng_b)
            run.intercept(msg_b, adv.B_TO_A)
            keys, eph = state.forged[A.ID]
            run.record_secret("adversary-as-A", x_forged=keys.x, s_forged=keys.s_i, t_forged=eph.t)
            run.record_secret("session:B", t=eph_b.t)
            s_adv = adv.bia_derive_cui(state, msg_b, params, A.ID, INITIATOR)
            sb = cui_derive(B, eph_b, forged, RESPONDER, params)
            run.record("adversary-as-A", {"K1": s_adv.K1, "K2": s_adv.K2, "SK": s_adv.SK})
            run.record("B", {"K1": sb.K1, "K2": sb.K2, "SK": sb.SK})
            sessions["adversary-as-A"] = (s_adv.SK, cui_transcript(forged, msg_b, params), INITIATOR)
            sessions["B"] = (sb.SK, cui_transcript(forged, msg_b, params), RESPONDER)
            links = [("B", "adversary-as-A"), ("adversary-as-A", "B")]

        else:  # mma
            eph_a, msg_a = cui_initiate(A, params, rng_a)
            run.intercept(msg_a, adv.A_TO_B)
            eph_b, msg_b = cui_initiate(B, params, rng_b)
            run.intercept(msg_b, adv.B_TO_A)
            mma = adv.mma_run_cui(kgc.s, A.ID, B.ID, params, rng_adv, msg_a, msg_b)
            run.inject(mma.forged_to_b, adv.A_TO_B, posing_as="A")
            run.inject(mma.forged_to_a, adv.B_TO_A, posing_as="B")
            run.record_secret("session:A", t=eph_a.t)
            run.record_secret("session:B", t=eph_b.t)
            sa = cui_derive(A, eph_a, mma.forged_to_a, INITIATOR, params)
            sb = cui_derive(B, eph_b, mma.forged_to_b, RESPONDER, params)
            run.record("A", {"K1": sa.K1, "K2": sa.K2, "SK": sa.SK})
            run.record("B", {"K1": sb.K1, "K2": sb.K2, "SK": sb.SK})
            w_a, w_b = mma.with_a, mma.with_b
            run.record("adversary-as-B", {"K1": w_a.K1, "K2": w_a.K2, "SK": w_a.SK})
            run.record("adversary-as-A", {"K1": w_b.K1, "K2": w_b.K2, "SK": w_b.SK})
            view_a = cui_transcript(msg_a, mma.forged_to_a, params)
            view_b = cui_transcript(mma.forged_to_b, msg_b, params)
            sessions["A"] = (sa.SK, view_a, INITIATOR)
            sessions["B"] = (sb.SK, view_b, RESPONDER)
            sessions["adversary-as-B"] = (w_a.SK, view_a, RESPONDER)
            sessions["adversary-as-A"] = (w_b.SK, view_b, INITIATOR)
            links = [
                ("adversary-as-B", "A"),
                ("A", "adversary-as-B"),
                ("B", "adversary-as-A"),
                ("adversary-as-A", "B"),
            ]

        if cfg.confirm:
            run.confirm(sessions, links)

    return _attempts(run, session)


# -- deng -------------------------------------------------------------------


def _run_deng(run: _Run) -> bool:
    curve, root = run.curve, run.root
    params, kgc = deng_setup(curve, root.fork("kgc/setup"))
    run.t.event("setup", P_pub=_hex_point(params.P_pub, curve))
    run.record_secret("long-term:KGC", x=kgc.x)

    regs = {}
    for label, ID in zip("AB", run.ids):
        reg = deng_register(ID, kgc, params, root.fork(f"party/{label}/long-term"), root.fork(f"kgc/issue/{label}"))
        run.directory.publish(ID, DengPublicRecord(ID, reg.T))
        regs[label] = reg
        run.t.event("register", party=label, ID=ID.hex(), T=_hex_point(reg.T, curve), R=_hex_point(reg.R, curve))
        run.record_secret(f"long-term:{label}", t=reg.t, r=reg.r_issued, h=reg.h, d=reg.d)
    A, B = regs["A"], regs["B"]

    def session(attempt: int) -> None:
        eph_a, msg_a = deng_initiate(A, params, root.fork(f"party/A/session/{attempt}"))
        got_b = run.channel(msg_a, adv.A_TO_B, params)
        eph_b, msg_b = deng_initiate(B, params, root.fork(f"party/B/session/{attempt}"))
        got_a = run.channel(msg_b, adv.B_TO_A, params)
        run.record_secret("session:A", a=eph_a.a)
        run.record_secret("session:B", a=eph_b.a)
        sa = deng_derive(A, eph_a, run.directory.lookup(B.ID), got_a, INITIATOR, params)
        sb = deng_derive(B, eph_b, run.directory.lookup(A.ID), got_b, RESPONDER, params)
        run.record("A", {"l": sa.l, "K": sa.K, "SK": sa.SK})
        run.record("B", {"l": sb.l, "K": sb.K, "SK": sb.SK})
        if run.config.confirm:
            sessions = {
                "A": (sa.SK, deng_transcript(A.ID, B.ID, msg_a, got_a, params), INITIATOR),
                "B": (sb.SK, deng_transcript(A.ID, B.ID, got_b, msg_b, params), RESPONDER),
            }
            run.confirm(sessions, [("B", "A"), ("A", "B")])

    return _attempts(run, session)


def run_scenario(config: ScenarioConfig) -> tuple[Transcript, Verdict]:
    run = _Run(config)
    completed = _run_cui(run) if config.protocol == "cui" else _run_deng(run)
    verdict = judge(
        config.protocol,
        config.scenario,
        run.t.key_material,
        confirm=config.confirm,
        rejections=run.rejections,
        aborted=not completed,
    )
    run.t.verdict = verdict
    run.t.event("verdict", **verdict.as_dict())
    return run.t, verdict


def verdict_from_transcript(doc: dict[str, Any]) -> Verdict:
    """Recompute the verdict from an emitted JSON transcript."""
    cfg = doc["header"]["config"]
    rejections = sum(
        1 for e in doc["events"] if e["kind"] == "confirm" and e["receiver"] in ("A", "B") and not e["accepted"]
    )
    aborted = sum(1 for e in doc["events"] if e["kind"] == "abort") >= MAX_ATTEMPTS
    return judge(cfg["protocol"], cfg["scenario"], doc["key_material"], cfg["confirm"], rejections, aborted)


# -- emission ---------------------------------------------------------------


def emit_transcript(t: Transcript, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(t.as_dict(), sort_keys=True, indent=2) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    cfg = t.header["config"]
    lines = [
        f"# ctaka transcript: {cfg['protocol']} / {cfg['scenario']} / {cfg['profile']} / seed {cfg['seed']}",
        f"digest: {t.header['digest_algorithm']}",
        f"curve: {t.header['curve']['profile_id']} p=0x{t.header['curve']['p']} n=0x{t.header['curve']['n']}",
        f"confirm: {'on' if cfg['confirm'] else 'off'}",
    ]
    if t.header["extensions"]:
        lines.append("extensions: " + ",".join(t.header["extensions"]))
    for i, e in enumerate(t.events):
        rest = " ".join(f"{k}={_flat(v)}" for k, v in sorted(e.items()) if k != "kind")
        lines.append(f"[{i:02d}] {e['kind']} {rest}".rstrip())
    for label in sorted(t.key_material):
        digests = " ".join(f"{k}={v}" for k, v in sorted(t.key_material[label].items()))
        lines.append(f"keys {label}: {digests}")
    v = t.verdict.as_dict() if t.verdict else {}
    lines.append("verdict: " + " ".join(f"{k}={_flat(v[k])}" for k in sorted(v)))
    return ("\n".join(lines) + "\n").encode()


def _flat(v: Any) -> str:
    if isinstance(v, dict):
        return "{" + ",".join(f"{k}:{_flat(x)}" for k, x in sorted(v.items())) + "}"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)
