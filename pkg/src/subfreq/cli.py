"""Command-line entry point ``subfreq``.

Results go to stdout as ``key=value`` lines or CSV.  Failures print a single
``error: <Kind>: <message>`` line on stderr and exit with status 1 (status 2
for malformed flags).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import codes, hardgen, netsketch, oracle, sampling
from .dataset import ColumnQuery, Dataset, format_dataset, load_dataset, save_dataset
from .errors import SubfreqError

TRADEOFF_HEADER = ["alpha", "relative_space", "approx_factor"]
FIGURE_HEADER = TRADEOFF_HEADER + ["log2_approx_factor"]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return format(x, ".10g")


def _sig3(x: float) -> str:
    return format(float(x), ".3g")


def _int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _float_list(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _emit(out, pairs: Dict[str, object]) -> None:
    for key, value in pairs.items():
        out.write(f"{key}={_fmt(value) if not isinstance(value, str) else value}\n")


def _write_text(text: str, path: Optional[str], out) -> None:
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        out.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subfreq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a dataset file and report its shape")
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="rewrite the dataset in canonical form")

    p = sub.add_parser("sample", help="draw a uniform row sample")
    p.add_argument("--data", required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("query", help="answer a projection query exactly or from a sample")
    p.add_argument("--cols", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--exact", action="store_true")
    src.add_argument("--sample")
    p.add_argument("--data")
    p.add_argument("--p", type=float)
    p.add_argument("--pattern")
    p.add_argument("--hh", action="store_true")
    p.add_argument("--phi", type=float)
    p.add_argument("--eps", type=float)

    p = sub.add_parser("net-build", help="build an alpha-net of sketches and write a manifest")
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--sketch", choices=["exact", "bottomk", "signhash"], default="exact")
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("net-query", help="answer a query from a net manifest")
    p.add_argument("--net", required=True)
    p.add_argument("--cols", required=True)

    p = sub.add_parser("gen", help="generate a lower-bound instance")
    p.add_argument("--problem", choices=list(hardgen.PROBLEMS), required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--t-size", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--case", choices=["in", "out"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("code", help="enumerate the constant-weight code B(d, k)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("code-random", help="sample a random low-overlap constant-weight code")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("reduce-alphabet", help="re-encode symbols in a smaller alphabet")
    p.add_argument("--data", required=True)
    p.add_argument("--q-target", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("tradeoff", help="space/approximation tradeoff of the alpha-net as CSV")
    p.add_argument("--d", type=int, required=True)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--alphas")
    grid.add_argument("--grid", type=int)
    return parser


@dataclass
class RunConfig:
    """A parsed command: subcommand name plus the flags given on the command line."""

    command: str
    options: Dict[str, object] = field(default_factory=dict)

    @classmethod
    def from_argv(cls, argv: Sequence[str]) -> "RunConfig":
        ns = build_parser().parse_args(list(argv))
        opts = {k: v for k, v in vars(ns).items() if k != "command" and v is not None and v is not False}
        return cls(ns.command, opts)

    def to_argv(self) -> List[str]:
        argv = [self.command]
        for key, value in self.options.items():
            flag = "--" + key.replace("_", "-")
            if value is True:
                argv.append(flag)
            else:
                argv += [flag, _fmt(value) if not isinstance(value, str) else value]
        return argv

    def get(self, key, default=None):
        return self.options.get(key, default)


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _cmd_ingest(cfg: RunConfig, out) -> None:
    a = load_dataset(cfg.get("data"))
    if cfg.get("out"):
        save_dataset(a, cfg.get("out"))
    _emit(out, {"n": a.n, "d": a.d, "q": a.q})


def _cmd_sample(cfg: RunConfig, out) -> None:
    a = load_dataset(cfg.get("data"))
    t = cfg.get("t")
    if t is None:
        if cfg.get("eps") is None or cfg.get("delta") is None:
            raise ValueError("sample needs --t or both --eps and --delta")
        t = sampling.sample_size(cfg.get("eps"), cfg.get("delta"))
    seed = cfg.get("seed")
    s = sampling.build_sample(a, t, np.random.default_rng(seed))
    text = sampling.format_sample(s, seed)
    if cfg.get("out"):
        _write_text(text, cfg.get("out"), out)
        _emit(out, {"n": s.n, "t": s.t, "seed": seed})
    else:
        out.write(text)


def _cmd_query(cfg: RunConfig, out) -> None:
    c = ColumnQuery.parse(cfg.get("cols"))
    pattern = _int_list(cfg.get("pattern")) if cfg.get("pattern") else None
    if cfg.get("exact"):
        if not cfg.get("data"):
            raise ValueError("--exact needs --data")
        f = oracle.frequency_vector(load_dataset(cfg.get("data")), c)
        if pattern is not None:
            _emit(out, {"f": oracle.point_frequency(f, pattern)})
        elif cfg.get("hh"):
            p = cfg.get("p", 1.0)
            ids = sorted(oracle.heavy_hitters(f, p, cfg.get("phi")))
            _emit(out, {"heavy_hitters": ",".join(map(str, ids))})
        elif cfg.get("p") is not None:
            p = cfg.get("p")
            _emit(out, {f"F{p:g}": oracle.moment(f, p)})
        else:
            raise ValueError("query needs one of --p, --pattern or --hh")
        return
    s = sampling.load_sample(cfg.get("sample"))
    if pattern is not None:
        _emit(out, {"f_hat": sampling.estimate_frequency(s, c, pattern)})
    elif cfg.get("hh"):
        if cfg.get("phi") is None or cfg.get("eps") is None:
            raise ValueError("sample heavy hitters need --phi and --eps")
        ids = sorted(sampling.sample_heavy_hitters(s, c, cfg.get("phi"), cfg.get("eps")))
        _emit(out, {"heavy_hitters": ",".join(map(str, ids))})
    else:
        raise ValueError("a sample answers --pattern or --hh queries")


_MANIFEST_KEYS = ("data", "data_sha256", "alpha", "p", "sketch", "eps", "delta", "seed")


def _build_from_manifest(meta: Dict[str, str]):
    a = load_dataset(meta["data"])
    net = netsketch.build_net(a.d, float(meta["alpha"]))
    eps = float(meta["eps"]) if meta.get("eps") else None
    delta = float(meta["delta"]) if meta.get("delta") else None
    spec = netsketch.SketchSpec.for_net(meta["sketch"], len(net), eps, delta)
    rng = np.random.default_rng(int(meta["seed"]))
    return netsketch.build_sketchnet(a, net, spec, float(meta["p"]), rng)


def _cmd_net_build(cfg: RunConfig, out) -> None:
    data = os.path.abspath(cfg.get("data"))
    meta = {
        "data": data,
        "data_sha256": _sha256(data),
        "alpha": _fmt(cfg.get("alpha")),
        "p": _fmt(cfg.get("p")),
        "sketch": cfg.get("sketch", "exact"),
        "eps": _fmt(cfg.get("eps")) if cfg.get("eps") is not None else "",
        "delta": _fmt(cfg.get("delta")) if cfg.get("delta") is not None else "",
        "seed": _fmt(cfg.get("seed", 0)),
    }
    snet = _build_from_manifest(meta)
    with open(cfg.get("out"), "w", encoding="ascii") as fh:
        fh.write(hardgen.format_metadata(meta))
    _emit(out, {
        "members": len(snet.net),
        "lo": snet.net.lo,
        "hi": snet.net.hi,
        "size_bound": netsketch.net_size_bound(snet.net.d, snet.net.alpha),
        "beta": snet.spec.beta,
        "distortion": netsketch.rounding_distortion(snet.p, snet.net.alpha, snet.net.d, snet.q),
    })


def _cmd_net_query(cfg: RunConfig, out) -> None:
    with open(cfg.get("net"), encoding="ascii") as fh:
        meta = hardgen.parse_metadata(fh.read())
    missing = [k for k in _MANIFEST_KEYS if k not in meta]
    if missing:
        raise ValueError(f"net manifest lacks {', '.join(missing)}")
    if _sha256(meta["data"]) != meta["data_sha256"]:
        raise ValueError(f"{meta['data']} changed since the net was built")
    snet = _build_from_manifest(meta)
    est, cert = netsketch.query(snet, ColumnQuery.parse(cfg.get("cols")))
    _emit(out, {
        "estimate": est,
        "used_subset": cert.used_subset.format(),
        "beta": cert.beta,
        "distortion": cert.distortion,
    })


def _cmd_gen(cfg: RunConfig, out) -> None:
    inst = hardgen.generate(
        cfg.get("problem"),
        np.random.default_rng(cfg.get("seed", 0)),
        d=cfg.get("d"),
        case_in=cfg.get("case") == "in",
        k=cfg.get("k"),
        q=cfg.get("q"),
        eps=cfg.get("eps"),
        gamma=cfg.get("gamma"),
        t_size=cfg.get("t_size"),
        p=cfg.get("p"),
        verify=bool(cfg.get("verify")),
    )
    if cfg.get("out"):
        inst.save(cfg.get("out"))
    meta = inst.metadata()
    if cfg.get("verify"):
        meta["verified"] = "true"
    out.write(hardgen.format_metadata(meta))


def _cmd_code(cfg: RunConfig, out) -> None:
    code = codes.enumerate_constant_weight(cfg.get("d"), cfg.get("k"))
    _write_text(format_dataset(code.as_dataset()), cfg.get("out"), out)


def _cmd_code_random(cfg: RunConfig, out) -> None:
    code = codes.sample_random_code(cfg.get("d"), cfg.get("eps"), cfg.get("gamma"),
                                    cfg.get("size"), np.random.default_rng(cfg.get("seed", 0)))
    _write_text(format_dataset(code.as_dataset()), cfg.get("out"), out)


def _cmd_reduce_alphabet(cfg: RunConfig, out) -> None:
    a = hardgen.reduce_alphabet(load_dataset(cfg.get("data")), cfg.get("q_target"))
    _write_text(format_dataset(a), cfg.get("out"), out)


def _cmd_tradeoff(cfg: RunConfig, out) -> None:
    d = cfg.get("d")
    writer = csv.writer(out, lineterminator="\n")
    if cfg.get("grid") is not None:
        writer.writerow(FIGURE_HEADER)
        for row in netsketch.emit_figure_data(d, cfg.get("grid")):
            writer.writerow([_fmt(x) for x in row])
    else:
        writer.writerow(TRADEOFF_HEADER)
        for row in netsketch.tradeoff_table(d, _float_list(cfg.get("alphas"))):
            writer.writerow([_sig3(x) for x in row])


COMMANDS = {
    "ingest": _cmd_ingest,
    "sample": _cmd_sample,
    "query": _cmd_query,
    "net-build": _cmd_net_build,
    "net-query": _cmd_net_query,
    "gen": _cmd_gen,
    "code": _cmd_code,
    "code-random": _cmd_code_random,
    "reduce-alphabet": _cmd_reduce_alphabet,
    "tradeoff": _cmd_tradeoff,
}


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        COMMANDS[cfg.command](cfg, out)
    except (SubfreqError, ValueError, OSError, AssertionError) as exc:
        message = str(exc).replace("\n", " ")
        err.write(f"error: {type(exc).__name__}: {message}\n")
        return 1
    return 0


def _one_line_warning(message, category, filename, lineno, line=None):
    return f"warning: {category.__name__}: {message}\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    warnings.formatwarning = _one_line_warning
    return run(RunConfig.from_argv(argv))


def run_captured(argv: Sequence[str]):
    """Run a command in-process; returns ``(status, stdout, stderr)``."""
    out, err = io.StringIO(), io.StringIO()
    try:
        cfg = RunConfig.from_argv(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    status = run(cfg, out, err)
    return status, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
