"""Command-line client for the bound-evaluation service.

Three subcommands:

    eval binom --n N --p P --k K     one binomial query, JSON or text report
    eval pois  --mu MU --k K         one Poisson query
    sweep binom --n N --k K          CSV sweep of every bound over p
    verify [--config PATH]           run the certification grid, JSON verdicts

By default the service layer is called in-process; pass ``--server URL`` to
send the same requests to a running HTTP instance instead.  stdout carries
data, stderr carries diagnostics.  Exit codes: 0 success, 1 verification
failure, 2 usage/config error.

Illustrative sweep configurations spanning moderate and extreme k/n:
(n=100, k=60), (n=100, k=90), (n=1000, k=900).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError, DomainError
from .service import handlers
from .service.schemas import (
    BinomialEvalRequest,
    PoissonEvalRequest,
    SweepRequest,
    VerifyRequest,
)

_PRECISION = 12  # significant digits in every numeric output cell


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.{_PRECISION}g}"
    return str(x)


def _quantize(obj):
    """Round every float leaf to the documented output precision."""
    if isinstance(obj, dict):
        return {k: _quantize(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_quantize(v) for v in obj]
    if isinstance(obj, float):
        return float(_fmt(obj))
    return obj


def _parse_probability(text: str) -> float:
    """Accept decimals ('0.3') and fractions ('3/10')."""
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse probability {text!r}")
    p = float(value)
    if not (0.0 < p < 1.0):
        raise argparse.ArgumentTypeError(f"p must lie strictly inside (0, 1), got {text}")
    return p


def _parse_positive_real(text: str) -> float:
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse number {text!r}")
    if not (value > 0.0) or math.isinf(value):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailbounds",
        description="Tail probabilities, tail conditional expectations, and bounds "
        "for binomial and Poisson distributions.",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        help="send requests to a running HTTP service instead of computing in-process",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ev = commands.add_parser("eval", help="evaluate every bound at one (distribution, k)")
    ev_dist = ev.add_subparsers(dest="dist", required=True)

    ev_binom = ev_dist.add_parser("binom", help="binomial query")
    ev_binom.add_argument("--n", type=int, required=True, help="number of trials")
    ev_binom.add_argument("--p", type=_parse_probability, required=True,
                          help="success probability, decimal or fraction")
    ev_binom.add_argument("--k", type=int, required=True, help="tail threshold, k > n p")
    ev_binom.add_argument("--format", choices=("json", "text"), default="json")

    ev_pois = ev_dist.add_parser("pois", help="Poisson query")
    ev_pois.add_argument("--mu", type=_parse_positive_real, required=True, help="mean")
    ev_pois.add_argument("--k", type=float, required=True,
                         help="tail threshold; non-integer values are raised to the next integer")
    ev_pois.add_argument("--format", choices=("json", "text"), default="json")
    ev_pois.add_argument(
        "--chernoff-plus-mu",
        action="store_true",
        help="also report the exp(+mu) variant of the exponential-moment bound "
        "(weaker than trivial; for cross-checking external sources)",
    )

    sw = commands.add_parser("sweep", help="sweep every bound over p at fixed (n, k), CSV")
    sw_dist = sw.add_subparsers(dest="dist", required=True)
    sw_binom = sw_dist.add_parser(
        "binom",
        help="binomial sweep",
        epilog="illustrative (n, k) pairs: (100, 60) moderate, (100, 90) and "
        "(1000, 900) extreme k/n",
    )
    sw_binom.add_argument("--n", type=int, required=True)
    sw_binom.add_argument("--k", type=int, required=True)
    sw_binom.add_argument("--p-min", type=_parse_probability, default=None)
    sw_binom.add_argument("--p-max", type=_parse_probability, default=None)
    sw_binom.add_argument("--step", type=_parse_probability, default=None,
                          help="p increment (default 0.01)")
    sw_binom.add_argument(
        "--figure-exponent",
        action="store_true",
        help="use the p^(2l) prefactor variant in the pelekis_lower column "
        "instead of the default p^(2(l+1))",
    )

    vf = commands.add_parser("verify", help="run the certification grid")
    vf.add_argument("--config", metavar="PATH", default=None,
                    help="grid configuration file (default: the shipped grid)")
    return parser


# --------------------------------------------------------------------------
# transport: in-process by default, HTTP when --server is given
# --------------------------------------------------------------------------


def _call(server: str | None, path: str, request) -> dict:
    if server is None:
        handler = {
            "/eval/binomial": handlers.evaluate_binomial,
            "/eval/poisson": handlers.evaluate_poisson,
            "/sweep/binomial": handlers.sweep_binomial,
            "/verify": handlers.run_verification,
        }[path]
        return handler(request).model_dump(mode="json")
    import httpx

    response = httpx.post(
        server.rstrip("/") + path, json=request.model_dump(mode="json"), timeout=600.0
    )
    if response.status_code == 422:
        detail = response.json().get("detail", response.text)
        raise DomainError(str(detail))
    response.raise_for_status()
    return response.json()


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def _render_report_text(report: dict) -> str:
    lines = []
    query = report["query"]
    if query["dist"] == "binomial":
        lines.append(f"binomial n={query['n']} p={_fmt(query['p'])} k={query['k']}")
    else:
        lines.append(f"poisson mu={_fmt(query['mu'])} k={query['k']}")
    lines.append("")
    lines.append("exact")
    for name in ("sf", "tce", "log_sf"):
        lines.append(f"  {name:<22} {_fmt(report['exact'][name])}")
    lines.append("bounds")
    for name, value in report["bounds"].items():
        cell = "out of domain" if value is None else _fmt(value)
        lines.append(f"  {name:<22} {cell}")
    for field, label in (("anomalies", "anomaly"), ("notes", "note")):
        for entry in report["meta"][field]:
            lines.append(f"{label}: {entry}")
    return "\n".join(lines) + "\n"


def _render_sweep_csv(sweep: dict) -> str:
    out = [",".join(sweep["header"])]
    for row in sweep["rows"]:
        out.append(",".join(_fmt(row[column]) for column in sweep["header"]))
    return "\n".join(out) + "\n"


def _emit_json(payload: dict) -> None:
    print(json.dumps(_quantize(payload), indent=2))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _cmd_eval(args) -> int:
    if args.dist == "binom":
        request = BinomialEvalRequest(n=args.n, p=args.p, k=args.k)
        report = _call(args.server, "/eval/binomial", request)
        report["query"] = {k: v for k, v in report["query"].items() if v is not None}
    else:
        k = math.ceil(args.k)
        request = PoissonEvalRequest(
            mu=args.mu, k=k, chernoff_plus_mu=args.chernoff_plus_mu
        )
        report = _call(args.server, "/eval/poisson", request)
        report["query"] = {k_: v for k_, v in report["query"].items() if v is not None}
        if k != args.k:
            report["meta"]["notes"].append(
                f"threshold {_fmt(args.k)} evaluated at k = {k}"
            )
    if args.format == "text":
        sys.stdout.write(_render_report_text(report))
    else:
        _emit_json(report)
    return 0


def _cmd_sweep(args) -> int:
    request = SweepRequest(
        n=args.n,
        k=args.k,
        p_min=args.p_min,
        p_max=args.p_max,
        step=args.step,
        figure_exponent=args.figure_exponent,
    )
    sweep = _call(args.server, "/sweep/binomial", request)
    sys.stdout.write(_render_sweep_csv(sweep))
    return 0


def _cmd_verify(args) -> int:
    config_text = None
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        config_text = path.read_text(encoding="utf-8")
    result = _call(args.server, "/verify", VerifyRequest(config=config_text))
    _emit_json(result)
    return 0 if result["all_passed"] else 1


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_verify(args)
    except (DomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
