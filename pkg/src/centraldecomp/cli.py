"""Command-line driver: ``centraldecomp decompose|adjoint|classify|charsub|oracle|product|corpus``."""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass

from .bilinear import BilinearMap, adjoint_algebra, idempotents_to_perp
from .corpus import corpus_group
from .frames import find_frame
from .gfield import DETERMINISTIC, RANDOMIZED
from .pgroup import ClassTwoGroup, PresentationError, central_product, group_from_json, group_to_json
from .pipeline import (
    ORACLE_HARD_CAP,
    LieRing,
    brute_force_oracle,
    central_decomposition_max,
    characteristic_subgroups,
    classify_type,
    coefficient_adjoint,
    default_oracle_bound,
    fully_invariant_subgroups,
    is_centrally_indecomposable,
    lie_bi_map,
    lie_decomposition_max,
    verify_report_json,
    star_summary,
)
from .starring import RingStructure

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3

CORPUS_NAMES = {
    "or_p": "Or", "or": "Or", "e_p": "E", "e": "E", "u_p": "U", "u": "U",
    "x_p": "extraspecial", "extraspecial": "extraspecial", "r_p": "R", "r": "R",
    "tang": "Tang", "d8": "D8", "q8": "Q8", "d8od8": "D8oD8",
}


class InputError(ValueError):
    pass


@dataclass
class JobConfig:
    command: str
    source: str
    mode: str = RANDOMIZED
    seed: int | None = None
    bound: int | None = None
    fmt: str = "json"
    verify: bool = False
    output: str | None = None

    def __post_init__(self):
        if self.mode == DETERMINISTIC:
            self.seed = None
        elif self.seed is None:
            self.seed = random.SystemRandom().randrange(2**32)
        if self.bound is not None and self.bound > ORACLE_HARD_CAP:
            raise InputError(f"--max-order {self.bound} exceeds the hard cap {ORACLE_HARD_CAP}")

    @property
    def rng(self) -> random.Random | None:
        return None if self.mode == DETERMINISTIC else random.Random(self.seed)


def parse_corpus(spec: str) -> ClassTwoGroup:
    """``or_p(3)``, ``tang``, ``d8`` and so on."""
    m = re.fullmatch(r"\s*([A-Za-z0-9_]+)\s*(?:\(\s*(\d+)\s*\))?\s*", spec)
    if not m or m.group(1).lower() not in CORPUS_NAMES:
        raise InputError(f"unknown corpus group {spec!r}; known: {', '.join(sorted(CORPUS_NAMES))}")
    name = CORPUS_NAMES[m.group(1).lower()]
    p = int(m.group(2)) if m.group(2) else None
    if name == "Tang":
        if p not in (None, 2):
            raise InputError("tang is defined for p = 2 only")
        p = None
    if name in ("D8", "Q8", "D8oD8") and p not in (None, 2):
        raise InputError(f"{m.group(1)} is a 2-group")
    if name == "U" and p == 2:
        raise InputError("u_p needs an odd prime")
    try:
        return corpus_group(name, None if name in ("Tang", "D8", "Q8", "D8oD8") else p)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def load_input(source: str):
    """A ClassTwoGroup, BilinearMap or LieRing, detected by schema keys."""
    if source.startswith("corpus:"):
        return parse_corpus(source[len("corpus:"):])
    try:
        with open(source) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{source}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{source}: top level must be an object")
    if "generators" in data:
        return group_from_json(data)
    if "tensor" in data:
        return BilinearMap.from_json(data)
    if "brackets" in data:
        return LieRing.from_json(data)
    raise InputError(f"{source}: unrecognized schema (expected 'generators', 'tensor' or 'brackets')")


def _matrices(pairs) -> list:
    return [[[list(r) for r in M] for M in e] for e in pairs]


# -- commands -------------------------------------------------------------------------


def cmd_decompose(cfg: JobConfig, obj) -> tuple[dict, str]:
    if isinstance(obj, ClassTwoGroup):
        report = central_decomposition_max(obj, cfg.mode, cfg.seed, cfg.rng)
        data = report.to_json()
        if cfg.verify:
            again = verify_report_json(obj, json.loads(json.dumps(data)))
            data["reverified"] = all(ok for _, ok, _ in again)
            if not data["reverified"]:
                raise AssertionError("emitted report does not re-verify")
        if not report.verified:
            raise AssertionError("decomposition failed verification")
        return data, report.to_text()
    if isinstance(obj, BilinearMap):
        R = adjoint_algebra(obj)
        fr = find_frame(R, cfg.mode, cfg.rng)
        parts = idempotents_to_perp(obj, fr.idempotents).parts
        data = {
            "size": len(parts),
            "parts": [[list(x) for x in U.basis] for U in parts],
            "frame": _matrices(fr.idempotents),
            "seed": cfg.seed, "mode": cfg.mode,
        }
        text = f"perp-decomposition of size {len(parts)}\n" + "\n".join(
            f"  part {i}: rank {U.rank}, basis {[list(x) for x in U.basis]}" for i, U in enumerate(parts))
        return data, text
    D = lie_decomposition_max(obj, cfg.mode, cfg.seed, cfg.rng)
    data = {
        "size": len(D),
        "members": [[list(x) for x in M.basis] for M in D.members],
        "verified": bool(D.check()),
        "seed": cfg.seed, "mode": cfg.mode,
    }
    return data, f"Lie ring central decomposition of size {len(D)}"


def cmd_adjoint(cfg: JobConfig, obj) -> tuple[dict, str]:
    if isinstance(obj, ClassTwoGroup):
        R = adjoint_algebra(obj.bi_map())
    elif isinstance(obj, BilinearMap):
        R = adjoint_algebra(obj)
    else:
        R = coefficient_adjoint(lie_bi_map(obj))
    data = {"additive_rank": R.rank, "basis_exps": R.basis_exps, "basis": _matrices(R.basis),
            "degenerate": R.degenerate}
    if not R.degenerate and R.rank:
        data["star_ring"] = star_summary(RingStructure(R, cfg.mode, cfg.rng))
    text = f"adjoint ring of additive rank {R.rank} (exponents {R.basis_exps})"
    if "star_ring" in data:
        text += f"; *-simple quotients: {', '.join(data['star_ring']['labels'])}"
    return data, text


def _need_group(obj, cmd: str) -> ClassTwoGroup:
    if not isinstance(obj, ClassTwoGroup):
        raise InputError(f"{cmd} needs a group")
    return obj


def cmd_classify(cfg: JobConfig, obj) -> tuple[dict, str]:
    P = _need_group(obj, "classify")
    v = is_centrally_indecomposable(P, cfg.mode, cfg.rng)
    data = {"indecomposable": v.ok, "reason": v.reason, "type": None}
    if v.ok and not P.is_abelian():
        data["type"] = classify_type(P, check=False, mode=cfg.mode, rng=cfg.rng)
    else:
        data["witness"] = [{"order": H.order, "generators": [list(g) for g in H.igs]} for H in v.witness]
    text = data["type"] or v.reason if v.ok else f"decomposable: {v.reason}"
    return data, text


def cmd_charsub(cfg: JobConfig, obj, full: bool = False) -> tuple[dict, str]:
    P = _need_group(obj, "charsub")
    found = (fully_invariant_subgroups if full else characteristic_subgroups)(P, cfg.mode, cfg.rng)
    items = [{"order": s.order, "sources": s.sources, "generators": [list(g) for g in s.subgroup.igs],
              "ideal": _matrices(s.ideal)} for s in found]
    text = "\n".join(f"order {s.order:>8}  from {', '.join(s.sources)}" for s in found)
    return {"subgroups": items, "fully_invariant": full}, text


def cmd_oracle(cfg: JobConfig, obj) -> tuple[dict, str]:
    P = _need_group(obj, "oracle")
    bound = cfg.bound or default_oracle_bound(P.p)
    size = brute_force_oracle(P, bound)
    return {"size": size, "bound": bound}, str(size)


def cmd_product(cfg: JobConfig, obj, exponents) -> tuple[dict, str]:
    G = _need_group(obj, "product")
    a = exponents or [1, 1]
    P = central_product([G] * len(a), exponents=a)
    R = adjoint_algebra(P.bi_map())
    S = RingStructure(R, cfg.mode, cfg.rng)
    fr = find_frame(R, cfg.mode, cfg.rng, structure=S)
    fp = {
        "order": P.order,
        "additive_rank": R.rank,
        "quotient_degrees": [c.iso.n for c in S.components],
        "frame_size": len(fr),
    }
    text = f"group of order {P.order}; adjoint additive rank {R.rank}, frame size {len(fr)}"
    return {"group": group_to_json(P), "fingerprint": fp}, text


def cmd_corpus(cfg: JobConfig, obj) -> tuple[dict, str]:
    P = _need_group(obj, "corpus")
    return group_to_json(P), f"group of order {P.order} on {P.n} generators"


# -- argument parsing -------------------------------------------------------------------


def _exponent_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"-a expects comma-separated integers, got {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for every randomized routine")
    common.add_argument("--deterministic", action="store_true", help="use deterministic variants; ignores --seed")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    common.add_argument("--verify", action="store_true", help="re-verify the emitted report after a JSON round trip")
    common.add_argument("--max-order", type=int, default=None, help="oracle bound on |P|")
    common.add_argument("-a", dest="exponents", type=_exponent_list, default=None, help="exponent vector, e.g. 1,3")
    common.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(prog="centraldecomp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, hlp in [
        ("decompose", "maximum central decomposition of a group (or perp/Lie analogue)"),
        ("adjoint", "adjoint *-ring of the commutation map"),
        ("classify", "indecomposability verdict and type"),
        ("charsub", "characteristic subgroups from *-invariant ideals"),
        ("oracle", "exhaustive maximum decomposition size"),
        ("product", "central product G^{o(a_1..a_n)} with an adjoint fingerprint"),
        ("corpus", "emit a corpus presentation as JSON"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=hlp)
        sp.add_argument("input", help="JSON file or corpus:NAME[(p)]")
        if name == "charsub":
            sp.add_argument("--full", action="store_true", help="fully invariant subgroups instead")
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = JobConfig(args.command, args.input, DETERMINISTIC if args.deterministic else RANDOMIZED,
                        args.seed, args.max_order, args.fmt, args.verify, args.output)
        src = args.input
        if args.command == "corpus" and not src.startswith("corpus:"):
            src = "corpus:" + src
        obj = load_input(src)
        cmd = args.command
        if cmd == "charsub":
            data, text = cmd_charsub(cfg, obj, args.full)
        elif cmd == "product":
            data, text = cmd_product(cfg, obj, args.exponents)
        else:
            data, text = globals()[f"cmd_{cmd}"](cfg, obj)
    except (InputError, PresentationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    out = json.dumps(data, indent=2, sort_keys=True) if cfg.fmt == "json" else text
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out, file=stdout)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))
