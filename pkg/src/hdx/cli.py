"""``hdx`` command line.

Every command writes one JSON document (``hdx-report/1``, or ``hdx-cert/1``
for ``certify``) to ``--out`` or stdout.  Exit status: 0 on success, 2 when
a checked hypothesis or inequality fails, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from hdx import __version__, config
from hdx.complex_core import (
    WeightedComplex,
    complex_from_json,
    format_rational,
    parse_rational,
    total_weight,
    weight_law_violations,
)
from hdx.errors import BadArgs, HDXError, HypothesisNotMet, ParseError
from hdx.expansion import expansion_report
from hdx.f2_chains import Cochain, random_cochain
from hdx.generators import KINDS, GeneratorSpec, generate
from hdx.isoperimetry import ledger_k1, ledger_k2, scan_isoperimetry
from hdx.minimality import eps_local_minimize
from hdx.overlap_cert import certify_2skeleton
from hdx.spectral import descent_check, spectral_profile
from hdx.suite import lemma_suite

REPORT_SCHEMA = "hdx-report/1"
COCHAIN_SCHEMA = "hdx-cochain/1"
COMMANDS = ("validate", "weights", "spectral", "expansion", "minimize", "scan", "certify", "lemma-suite", "gen")

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS = 0, 1, 2


@dataclass
class RunConfig:
    """Everything a run depends on.  Rationals are kept as ``"p/q"`` strings
    so the config round-trips through JSON unchanged."""

    command: str
    input: str | None = None
    out: str | None = None
    cap: int = config.ENUMERATION_CAP
    tolerance: float = config.TOLERANCE
    seed: int = config.SEED
    threads: int = 1
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if data.get("command") not in COMMANDS:
            raise ParseError(f"unknown command {data.get('command')!r}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def echo(self) -> dict:
        """Config as echoed in reports: everything except where output goes
        and how many threads ran, neither of which may change the result."""
        d = self.to_dict()
        d.pop("out")
        d.pop("threads")
        return d


# --- input -------------------------------------------------------------------


def load_complex(source: str) -> WeightedComplex:
    """A complex file path, or ``gen:KIND[:key=value,...]``."""
    if source.startswith("gen:"):
        _, _, rest = source.partition(":")
        kind, _, params = rest.partition(":")
        args = dict(p.split("=", 1) for p in params.split(",") if p)
        return generate(GeneratorSpec(kind, args))
    try:
        with open(source) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc}") from exc
    return complex_from_json(text)


def load_cochain(path: str, X: WeightedComplex) -> Cochain:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read cochain {path}: {exc}") from exc
    if data.get("schema") != COCHAIN_SCHEMA:
        raise ParseError(f"cochain file must have schema {COCHAIN_SCHEMA}")
    if data.get("complex") not in (None, X.digest):
        raise BadArgs("cochain was written for a different complex")
    return Cochain.from_hex(X, int(data["k"]), data["hex"])


def cochain_document(phi: Cochain) -> dict:
    return {"schema": COCHAIN_SCHEMA, "k": phi.k, "hex": phi.to_hex(), "complex": phi.X.digest}


def _rat(opts: dict, key: str) -> Fraction | None:
    v = opts.get(key)
    return None if v is None else parse_rational(v)


# --- commands ------------------------------------------------------------------


def cmd_validate(cfg: RunConfig, X: WeightedComplex) -> tuple[dict, bool]:
    bad = weight_law_violations(X)
    return {
        "dimension": X.n,
        "cells": {str(k): X.num_cells(k) for k in range(-1, X.n + 1)},
        "weight_kind": X.kind.name.lower(),
        "weight_law": not bad,
        "violations": [
            {"simplex": list(s), "stored": format_rational(a), "expected": format_rational(b)} for s, a, b in bad
        ],
    }, not bad


def cmd_weights(cfg: RunConfig, X: WeightedComplex) -> tuple[dict, bool]:
    ks = cfg.options.get("k")
    ks = range(-1, X.n + 1) if ks is None else [int(ks)]
    levels = {}
    for k in ks:
        levels[str(k)] = {
            "total": format_rational(total_weight(X, k)),
            "cells": [[list(s), format_rational(w)] for s, w in zip(X.cells(k), X.weights(k))],
        }
    return {"levels": levels}, True


def cmd_spectral(cfg: RunConfig, X: WeightedComplex) -> tuple[dict, bool]:
    prof = spectral_profile(X, cfg.threads, cfg.tolerance)
    flags = descent_check(prof)
    out = prof.to_dict()
    out["descent"] = flags
    out["local_spectral_expansion"] = out["lambdas"][-1] if out["lambdas"] else None
    return out, True


def cmd_expansion(cfg: RunConfig, X: WeightedComplex) -> tuple[dict, bool]:
    ks = cfg.options.get("k")
    rep = expansion_report(X, ks, cfg.options.get("mode", "quotient"), cfg.cap)
    return rep.to_dict(), True


def cmd_minimize(cfg: RunConfig, X: WeightedComplex) -> tuple[dict, bool]:
    o = cfg.options
    if o.get("cochain"):
        phi = load_cochain(o["cochain"], X)
    elif o.get("random_k") is not None:
        phi = random_cochain(X, int(o["random_k"]), np.random.default_rng(cfg.seed))
    else:
        raise BadArgs("minimize needs --cochain FILE or --random-k K")
    trace = eps_local_minimize(phi, _rat(o, "eps") or Fraction(1, 16), cfg.cap)
    return trace.to_dict(), True


def cmd_scan(cfg: RunConfig, X: WeightedComplex) -> tuple[dict, bool]:
    o = cfg.options
    k = int(o["k"])
    common = dict(
        epsilon=_rat(o, "epsilon") or Fraction(1, 6),
        limit=int(o.get("limit", 4000)),
        seed=cfg.seed,
        cap=cfg.cap,
        tol=cfg.tolerance,
        enforce_spectral=bool(o.get("enforce_spectral", False)),
    )
    target = _rat(o, "target")
    C, eps = _rat(o, "override_C"), _rat(o, "override_eps")
    ledger = None
    if k in (1, 2):
        ledger = ledger_k1() if k == 1 else ledger_k2(common["epsilon"])
    faithful = scan_isoperimetry(X, k, ledger, target=target, **common)
    out = {"ledger": None if ledger is None else ledger.to_dict(), "faithful": faithful.to_dict()}
    ok = faithful.passed
    if C is not None or eps is not None:
        over = scan_isoperimetry(X, k, ledger, C=C, eps=eps, target=target, **common)
        out["override"] = over.to_dict()
        ok = ok and over.passed
    return out, ok


def cmd_certify(cfg: RunConfig, X: WeightedComplex):
    o = cfg.options
    cert = certify_2skeleton(
        X, _rat(o, "epsilon"), int(o.get("l", 2)), _rat(o, "max_M"), cfg.threads, cfg.cap
    )
    return cert, cert.satisfied


def cmd_lemma_suite(cfg: RunConfig, X) -> tuple[dict, bool]:
    o = cfg.options
    results = lemma_suite(cfg.seed, int(o.get("samples", 2000)), bool(o.get("inject_corruption", False)))
    return {
        "checks": [r.to_dict() for r in results],
        "lines": [r.line() for r in results],
    }, all(r.passed for r in results)


def cmd_gen(cfg: RunConfig, X) -> tuple[dict, bool]:
    o = dict(cfg.options)
    kind = o.pop("kind")
    params = {k: v for k, v in o.items() if v is not None}
    if "seed" not in params and kind == "linial-meshulam":
        params["seed"] = cfg.seed
    Y = generate(GeneratorSpec(kind, params))
    return Y.to_json_dict(), True


HANDLERS = {
    "validate": cmd_validate,
    "weights": cmd_weights,
    "spectral": cmd_spectral,
    "expansion": cmd_expansion,
    "minimize": cmd_minimize,
    "scan": cmd_scan,
    "certify": cmd_certify,
    "lemma-suite": cmd_lemma_suite,
    "gen": cmd_gen,
}

NEEDS_INPUT = {"validate", "weights", "spectral", "expansion", "minimize", "scan", "certify"}


def render(cfg: RunConfig, X: WeightedComplex | None, result, ok: bool) -> str:
    if cfg.command == "certify":
        return result.to_json()
    if cfg.command == "gen":
        return json.dumps(result, sort_keys=True) + "\n"
    doc = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "command": cfg.command,
        "complex": None if X is None else X.digest,
        "config": cfg.echo(),
        "status": "ok" if ok else "hypothesis-failure",
        "result": result,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the exit code."""
    X = None
    if cfg.command in NEEDS_INPUT:
        if not cfg.input:
            raise BadArgs(f"{cfg.command} needs an input complex")
        X = load_complex(cfg.input)
    try:
        result, ok = HANDLERS[cfg.command](cfg, X)
    except HypothesisNotMet as exc:
        result, ok = {"hypothesis_not_met": exc.hypothesis, "detail": str(exc)}, False
    text = render(cfg, X, result, ok)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        if cfg.command == "lemma-suite":
            print("\n".join(result["lines"]))
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_HYPOTHESIS


# --- argument parsing ----------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--cap", type=int, default=config.ENUMERATION_CAP, help="largest enumeration allowed")
    common.add_argument("--tol", type=float, default=config.TOLERANCE, help="float tolerance for spectral checks")
    common.add_argument("--seed", type=int, default=config.SEED)
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("--config", help="load a saved RunConfig JSON (other flags ignored)")
    common.add_argument("--dump-config", action="store_true", help="print the RunConfig and exit")

    p = argparse.ArgumentParser(prog="hdx", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hdx {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(name: str, help: str):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.add_argument("input", help="complex file, or gen:KIND:key=value,...")
        return sp

    with_input("validate", "parse a complex and check the weight law")
    sp = with_input("weights", "list cell weights")
    sp.add_argument("--k", type=int)
    with_input("spectral", "link spectral gaps and descent checks")
    sp = with_input("expansion", "coboundary and cocycle expansion, cofilling, systole")
    sp.add_argument("--k", type=int, action="append")
    sp.add_argument("--mode", choices=("quotient", "exhaustive"), default="quotient")
    sp = with_input("minimize", "epsilon-local minimization of a cochain")
    sp.add_argument("--cochain", help="hdx-cochain/1 JSON file")
    sp.add_argument("--random-k", type=int, help="minimize a seeded random k-cochain instead")
    sp.add_argument("--eps", default="1/16")
    sp = with_input("scan", "isoperimetric inequality scan")
    sp.add_argument("--k", type=int, required=True, choices=(0, 1, 2))
    sp.add_argument("--override-C")
    sp.add_argument("--override-eps")
    sp.add_argument("--target")
    sp.add_argument("--epsilon", help="vertex-link expansion floor for the degree-2 ledger")
    sp.add_argument("--limit", type=int, default=4000)
    sp.add_argument("--enforce-spectral", action="store_true")
    sp = with_input("certify", "overlap hypothesis certificate for the 2-skeleton")
    sp.add_argument("--l", type=int, default=2)
    sp.add_argument("--epsilon")
    sp.add_argument("--max-M")
    sp = sub.add_parser("lemma-suite", parents=[common], help="identity checks across the corpus")
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--inject-corruption", action="store_true")
    sp = sub.add_parser("gen", parents=[common], help="write a generated complex")
    sp.add_argument("--kind", required=True, choices=KINDS)
    for flag in ("v", "l", "n", "q", "p", "path"):
        sp.add_argument(f"--{flag}")
    return p


_GLOBAL = {"command", "input", "out", "cap", "tol", "seed", "threads", "config", "dump_config"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.config:
        with open(ns.config) as fh:
            return RunConfig.from_json(fh.read())
    options = {k: v for k, v in vars(ns).items() if k not in _GLOBAL and v is not None and v is not False}
    if ns.command == "gen" and "seed" not in options:
        options["seed"] = ns.seed
    return RunConfig(
        command=ns.command,
        input=getattr(ns, "input", None),
        out=ns.out,
        cap=ns.cap,
        tolerance=ns.tol,
        seed=ns.seed,
        threads=ns.threads,
        options=options,
    )


def main(argv=None) -> int:
    ns = _parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if ns.dump_config:
            print(cfg.to_json())
            return EXIT_OK
        return run(cfg)
    except HDXError as exc:
        print(f"hdx: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
