"""Command-line entry point: ``padic-gz <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence

from .crosscheck import Orientation, bijection_check, orient
from .eisenstein import PAdicContext, identity_check, theta_lhs
from .quadratic import RhsMode, SetupError, make_pair, make_setup, rhs_product
from .quaternion import norm_counts
from .rational import FactoredRational
from .selftest import run_all

SCHEMA_VERSION = "1.0"
EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64
COMMANDS = ("classical-gz", "shimura-rhs", "theta-lhs", "identity-check", "census", "selftest")

# Published factored value of the CM difference for (D1, D2); the product over x
# should be this to the power 8/(w1 w2).
CLASSICAL_CONSTANTS: dict[tuple[int, int], dict[int, int]] = {
    (-43, -163): {2: 19, 3: 6, 5: 3, 7: 3, 37: 1, 433: 1},
}

# Primes expected on each side of the Shimura product, up to one global inversion.
SHIMURA_SUPPORT: dict[tuple[int, int, int, int], tuple[frozenset, frozenset]] = {
    (-43, -163, 2, 3): (frozenset({2, 29, 257, 277}), frozenset({73, 137, 241})),
}

MIN_DIGITS = 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    d1: int = -43
    d2: int = -163
    p: int = 2
    q: int = 3
    precision: int = 12
    n_max: int | None = None
    report: str | None = None
    seed: int = 0
    workers: int = 1
    timing: bool = False
    format: str = "text"

    @property
    def levels(self) -> int:
        if self.n_max is not None:
            return self.n_max
        return 5 if self.p == 2 else 3


# --- serialization ----------------------------------------------------------


def factored_dict(r: FactoredRational) -> dict[str, Any]:
    return {
        "value": str(r),
        "numerator": str(r.numerator),
        "denominator": str(r.denominator),
        "exponents": {str(p): e for p, e in r.exponents},
    }


def setup_dict(s) -> dict[str, Any]:
    return {"D1": s.D1, "D2": s.D2, "D": s.D, "p": s.p, "q": s.q, "N": s.N,
            "w1": s.w1, "w2": s.w2, "rootP": s.root_p, "rootQ": s.root_q}


def orientation_dict(o: Orientation) -> dict[str, Any]:
    return {"note": o.note, "reflex": o.reflex, "rootQ": o.setup.root_q}


def combine(verdicts: Sequence[str]) -> str:
    if "fail" in verdicts:
        return "fail"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "pass"


# --- commands ------------------------------------------------------------------


def cmd_classical(cfg: RunConfig) -> dict[str, Any]:
    pair = make_pair(cfg.d1, cfg.d2)
    product = rhs_product(pair, RhsMode.MODULAR4)
    out: dict[str, Any] = {"product": factored_dict(product)}
    const = CLASSICAL_CONSTANTS.get((pair.D1, pair.D2)) or CLASSICAL_CONSTANTS.get((pair.D2, pair.D1))
    if const is None:
        out["reference"] = None
        out["verdict"] = "inconclusive"
        return out
    power = 8 // (pair.w1 * pair.w2)
    expected = FactoredRational.from_exponents(const) ** power
    out["reference"] = {"constant": str(FactoredRational.from_exponents(const)), "power": power,
                        "expected": str(expected)}
    out["verdict"] = "pass" if product == expected else "fail"
    return out


def _ratio_exponent(value: FactoredRational, num: frozenset, den: frozenset) -> int | None:
    """e with value = (prod num / prod den)^e, if it exists."""
    exps = dict(value.exponents)
    if set(exps) != num | den:
        return None
    es = {e if p in num else -e for p, e in exps.items()}
    return es.pop() if len(es) == 1 else None


def cmd_shimura(cfg: RunConfig) -> dict[str, Any]:
    o = orient(make_setup(cfg.d1, cfg.d2, cfg.p, cfg.q))
    s = o.setup
    value = rhs_product(s, RhsMode.SHIMURA4N)
    pos = sorted(p for p, e in value.exponents if e > 0)
    neg = sorted(p for p, e in value.exponents if e < 0)
    out: dict[str, Any] = {"setup": setup_dict(s), "orientation": orientation_dict(o),
                           "product": factored_dict(value), "positivePrimes": pos, "negativePrimes": neg}
    ref = SHIMURA_SUPPORT.get((s.D1, s.D2, s.p, s.q))
    if ref is None:
        out["verdict"] = "pass"
        return out
    num, den = ref
    e = _ratio_exponent(value, num, den)
    inverted = False
    if e is not None and e < 0:
        e, inverted = -e, True
    out["reference"] = {"numeratorPrimes": sorted(num), "denominatorPrimes": sorted(den),
                        "exponent": e, "inverted": inverted}
    out["verdict"] = "pass" if e is not None else "fail"
    return out


def cmd_theta(cfg: RunConfig) -> dict[str, Any]:
    o = orient(make_setup(cfg.d1, cfg.d2, cfg.p, cfg.q))
    s = o.setup
    ctx = PAdicContext.for_traces(s, cfg.precision, s.p ** (2 * cfg.levels))
    theta, theta_p, even, odd = theta_lhs(s, ctx, cfg.levels, cfg.workers)
    verdict = "pass" if min(theta.stabilized_precision, theta_p.stabilized_precision) >= MIN_DIGITS \
        else "inconclusive"
    return {"setup": setup_dict(s), "orientation": orientation_dict(o),
            "theta": theta.to_dict(), "thetaP": theta_p.to_dict(),
            "termCounts": {str(st.t): st.count for st in even + odd}, "verdict": verdict}


def cmd_identity(cfg: RunConfig) -> dict[str, Any]:
    o = orient(make_setup(cfg.d1, cfg.d2, cfg.p, cfg.q))
    s = o.setup
    r = identity_check(s, cfg.precision, cfg.levels, cfg.workers)
    return {
        "setup": setup_dict(s),
        "orientation": orientation_dict(o),
        "theta": r.theta.to_dict(),
        "thetaP": r.theta_p.to_dict(),
        "A": r.a_report.to_dict(),
        "directAAgrees": r.a_direct_agrees,
        "B": {"value": r.b_value.to_dict(), "factored": factored_dict(r.b_factored),
              "stableAcrossLevels": r.b_levels_stable},
        "congruence": {"APlusB": r.a_plus_b.to_dict(), "precision": r.congruence_precision,
                       "holds": r.a_plus_b_holds, "AMinusB": r.a_minus_b.to_dict()},
        "rhs": {"product": factored_dict(r.rhs), "log": r.rhs_log.to_dict(),
                "orientationOfB": r.b_orientation},
        "valuation": {"fromTheta": r.valuation_lhs, "fromRhs": r.valuation_rhs,
                      "sign": r.valuation_sign, "evenLevels": r.valuation_even_levels,
                      "oddLevels": r.valuation_odd_levels},
        "derivative": {"even": r.derivative.to_dict(),
                       "odd": [v.to_dict() for v in r.odd_derivative],
                       "alternating": r.alternating},
        "termCounts": r.term_counts,
        "verdict": r.verdict,
    }


def cmd_census(cfg: RunConfig, max_norm: int = 64) -> dict[str, Any]:
    o = orient(make_setup(cfg.d1, cfg.d2, cfg.p, cfg.q))
    if o.emb is None:
        return {"orientation": orientation_dict(o), "verdict": "inconclusive"}
    s = o.setup
    counts = norm_counts(o.emb.order, max_norm)
    bad, total = bijection_check(s, o.emb, max_norm)
    return {"setup": setup_dict(s), "orientation": orientation_dict(o),
            "omega1": str(o.emb.omega1), "omega2": str(o.emb.omega2),
            "normCounts": {str(k): v for k, v in counts.items()},
            "bijection": {"nuChecked": total, "mismatches": [list(m) for m in bad[:20]]},
            "verdict": "pass" if not bad else "fail"}


def cmd_selftest(cfg: RunConfig) -> dict[str, Any]:
    s = make_setup(cfg.d1, cfg.d2, cfg.p, cfg.q)
    results = run_all(s, cfg.seed)
    return {"suites": [r.to_dict() for r in results],
            "verdict": "pass" if all(r.passed for r in results) else "fail"}


HANDLERS = {
    "classical-gz": cmd_classical,
    "shimura-rhs": cmd_shimura,
    "theta-lhs": cmd_theta,
    "identity-check": cmd_identity,
    "census": cmd_census,
    "selftest": cmd_selftest,
}


def execute(command: str, cfg: RunConfig) -> tuple[dict[str, Any], float]:
    """Run one command; returns the report and the elapsed seconds."""
    if command not in HANDLERS:
        raise UsageError(f"unknown command {command!r}")
    start = time.perf_counter()
    results = HANDLERS[command](cfg)
    elapsed = time.perf_counter() - start
    cfg_out = {k: v for k, v in asdict(cfg).items() if k not in ("report", "timing", "format", "workers")}
    cfg_out["n_max"] = cfg.levels
    report = {"schemaVersion": SCHEMA_VERSION, "command": command, "config": cfg_out,
              "results": results, "verdict": results["verdict"]}
    if cfg.timing:
        report["timing"] = {"seconds": round(elapsed, 3)}
    return report, elapsed


# --- rendering -------------------------------------------------------------------


def _render(node: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(node, dict):
        if set(node) == {"valuation", "unitDigits", "knownPrecision"}:
            return [pad + _padic_text(node)]
        for k, v in node.items():
            if isinstance(v, dict) and not set(v) == {"valuation", "unitDigits", "knownPrecision"}:
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                lines.append(f"{pad}{k}:")
                for item in v:
                    block = _render(item, indent + 2)
                    block[0] = f"{pad}  - {block[0].lstrip()}"
                    lines.extend(block)
            else:
                text = _padic_text(v) if isinstance(v, dict) else v
                lines.append(f"{pad}{k}: {text}")
        return lines
    return [pad + str(node)]


def _padic_text(d: dict) -> str:
    digits = "".join(str(x) if x < 10 else f"[{x}]" for x in reversed(d["unitDigits"]))
    if d["valuation"] is None:
        return f"0 (known mod p^{d['knownPrecision']})"
    return f"p^{d['valuation']} * ...{digits or '0'} (known mod p^{d['knownPrecision']})"


def render_text(report: dict, elapsed: float) -> str:
    lines = [f"{report['command']}: {report['verdict'].upper()}"]
    lines.extend(_render(report["results"], 1))
    lines.append(f"  elapsed: {elapsed:.2f} s")
    return "\n".join(lines)


# --- argument handling ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="padic-gz", description="Factorization checks for CM values and p-adic theta products.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--d1", type=int)
    parser.add_argument("--d2", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--q", type=int)
    parser.add_argument("--precision", type=int, help="target p-adic digits K (default 12)")
    parser.add_argument("--n-max", type=int, dest="n_max", help="truncation level (default 5 for p=2, else 3)")
    parser.add_argument("--report", help="write the JSON report to this path")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int, help="worker processes for the nu enumeration (default: cores)")
    parser.add_argument("--config", help="JSON file with any of the options above; flags win")
    parser.add_argument("--format", choices=("text", "json"), help="stdout format (default text)")
    parser.add_argument("--timing", action="store_true", default=None,
                        help="include wall-clock timing in the JSON report")
    return parser


_KEYS = ("d1", "d2", "p", "q", "precision", "n_max", "report", "seed", "workers", "format", "timing")


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for k, v in data.items():
            key = k.replace("-", "_")
            if key not in _KEYS:
                raise UsageError(f"unknown config key {k!r}")
            values[key] = v
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    if "workers" not in values:
        values["workers"] = os.cpu_count() or 1
    cfg = RunConfig(**values)
    if cfg.precision < 1 or (cfg.n_max is not None and cfg.n_max < 1) or cfg.workers < 1:
        raise UsageError("precision, n-max and workers must be positive")
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args)
        report, elapsed = execute(args.command, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SetupError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(report, indent=2)
    if cfg.report:
        Path(cfg.report).write_text(text + "\n")
    print(text if cfg.format == "json" else render_text(report, elapsed))
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[report["verdict"]]


if __name__ == "__main__":
    sys.exit(main())
