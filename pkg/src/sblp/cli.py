"""Command-line interface: ``sblp code build | decode | sweep``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
The worker count of ``sweep`` defaults to ``$SBLP_WORKERS`` (or 1); it never
changes the numbers written.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata
from pathlib import Path

import numpy as np

from . import codes, gf2, simulator
from .channel import prior_llr
from .decoders import KINDS, DecoderConfig, decode_batch


class UsageError(Exception):
    """Bad arguments or configuration (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Everything that determines the numbers of a sweep.

    Decoder parameters left as None take the per-kind defaults (100/100
    standalone, 25/75 combined, alpha 0.75, alpha1 0.9).
    """

    code: str = "b1"
    decoders: list[str] = field(default_factory=lambda: ["sb-ms"])
    p_list: list[float] = field(default_factory=lambda: [0.05])
    alpha: float | None = None
    alpha1: float | None = None
    ims_max: int | None = None
    ilp_max: int | None = None
    early_stop: bool | None = None
    handoff: str | None = None
    seed: int = 0
    target_errors: int = 100
    max_trials: int = 100_000
    block_size: int = simulator.DEFAULT_BLOCK
    count_non_convergence: bool = True
    out: str = "sweep.csv"
    trace: bool = False

    def __post_init__(self) -> None:
        bad = [k for k in self.decoders if k not in KINDS]
        if bad:
            raise UsageError(f"unknown decoder kind {bad[0]!r}; choose from {', '.join(KINDS)}")
        if not self.decoders:
            raise UsageError("no decoder given")
        if not self.p_list:
            raise UsageError("p-list must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_list):
            raise UsageError("probabilities must lie in [0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    def decoder_config(self, kind: str) -> DecoderConfig:
        try:
            return DecoderConfig.for_kind(
                kind, alpha=self.alpha, alpha1=self.alpha1, ims_max=self.ims_max,
                ilp_max=self.ilp_max, handoff=self.handoff,
                # the two combined kinds fix early stopping themselves
                early_stop=None if kind.startswith("combined") else self.early_stop,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def stop_rule(self) -> simulator.StopRule:
        try:
            return simulator.StopRule(self.target_errors, self.max_trials)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from exc


def _load_code(spec: str) -> codes.CssCode:
    try:
        return codes.load_code(spec)
    except (FileNotFoundError, ValueError, codes.AlistError, codes.CssError, KeyError) as exc:
        raise UsageError(f"cannot load code {spec!r}: {exc}") from exc


def _read_bits(path: str, length: int, what: str) -> np.ndarray:
    rows = []
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip().replace(" ", "")
        if not line or line.startswith("#"):
            continue
        if set(line) - {"0", "1"}:
            raise UsageError(f"{path}:{no}: {what} must be a 0/1 string")
        if len(line) != length:
            raise UsageError(f"{path}:{no}: {what} has length {len(line)}, expected {length}")
        rows.append([int(c) for c in line])
    if not rows:
        raise UsageError(f"{path}: no {what} found")
    return np.array(rows, dtype=np.uint8)


def _bits(v) -> str:
    return "".join(map(str, np.asarray(v, dtype=np.uint8)))


# ---------------------------------------------------------------------------
# code build


def _degree_profile(H: gf2.BinaryMatrix) -> str:
    col = np.bincount(H.dense.sum(axis=0))
    row = np.bincount(H.dense.sum(axis=1))
    fmt = lambda hist: " ".join(f"{d}:{c}" for d, c in enumerate(hist) if c)  # noqa: E731
    return f"column degrees {fmt(col)}; row degrees {fmt(row)}"


def cmd_code_build(args) -> int:
    if args.hx or args.hz:
        if not (args.hx and args.hz):
            raise UsageError("--hx and --hz must be given together")
        try:
            hx, hz = codes.load_alist(args.hx), codes.load_alist(args.hz)
        except (OSError, codes.AlistError) as exc:
            raise UsageError(str(exc)) from exc
        params = {"kind": "alist"}
    else:
        if args.construction is None:
            raise UsageError("give --construction or --hx/--hz")
        params = {"kind": args.construction}
        if args.construction == "gb":
            if args.a is None or args.b is None or args.ell is None:
                raise UsageError("gb needs --a, --b and --ell")
            params.update(a=args.a, b=args.b, ell=args.ell)
        elif args.construction == "hgp-ring":
            if args.size is None:
                raise UsageError("hgp-ring needs --size")
            params.update(size=args.size)
        elif args.construction not in codes.BUILTIN_CODES:
            raise UsageError(f"unknown construction {args.construction!r}")
        hx = hz = None
    try:
        if hx is not None:
            code = codes.CssCode(args.name or Path(args.hx).stem, hx, hz, params)
        else:
            code = codes.from_constructor(params, name=args.name)
    except codes.CssError as exc:
        raise UsageError(f"not a CSS pair: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = codes.save_manifest(code, out, args.name or code.name)
    print(f"{code.name}: n = {code.n}, k = {code.k}")
    print(f"H_X {code.hx.m} x {code.hx.n}: {_degree_profile(code.hx)}")
    print(f"H_Z {code.hz.m} x {code.hz.n}: {_degree_profile(code.hz)}")
    print(f"manifest written to {manifest}")
    return 0


# ---------------------------------------------------------------------------
# decode


def cmd_decode(args) -> int:
    code = _load_code(args.code)
    graph = code.x_graph
    if (args.syndrome_file is None) == (args.error_file is None):
        raise UsageError("give exactly one of --syndrome-file and --error-file")
    if args.syndrome_file is not None:
        S = _read_bits(args.syndrome_file, graph.m, "syndrome")
        E = None
    else:
        E = _read_bits(args.error_file, code.n, "error")
        S = gf2.syndrome(E, code.hz)
    run = RunConfig(code=args.code, decoders=[args.decoder], p_list=[args.p], alpha=args.alpha,
                    alpha1=args.alpha1, ims_max=args.ims_max, ilp_max=args.ilp_max,
                    early_stop=False if args.no_early_stop else None)
    kind = args.decoder
    if args.no_early_stop and kind == "combined":
        kind = "combined-no-early-stop"
    cfg = run.decoder_config(kind)
    out = decode_batch(kind, S, graph, cfg, prior_llr(args.p), trace=args.trace)
    stab = gf2.RowSpace(code.hx) if E is not None else None
    for r in range(len(S)):
        o = out[r]
        print(f"e_hat: {_bits(o.e_hat)}")
        line = (f"converged: {str(o.converged).lower()}  ms_iterations: {o.ms_iterations}  "
                f"lp_iterations: {o.lp_iterations}  stop: {o.stop_reason.value}")
        if stab is not None:
            line += f"  classification: {simulator.classify_outcome(E[r], o, code, stab).value}"
        print(line)
        if args.trace:
            print("trace: " + " ".join(map(str, o.trace)))
    return 0


# ---------------------------------------------------------------------------
# sweep


def _sweep_config(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    flags = {
        "code": args.code, "decoders": args.decoder, "p_list": args.p_list, "alpha": args.alpha,
        "alpha1": args.alpha1, "ims_max": args.ims_max, "ilp_max": args.ilp_max, "seed": args.seed,
        "target_errors": args.target_errors, "max_trials": args.max_trials,
        "block_size": args.block_size, "out": args.out, "handoff": args.handoff,
    }
    if args.p is not None:
        flags["p_list"] = [args.p]
    if args.no_early_stop:
        flags["early_stop"] = False
    if args.trace:
        flags["trace"] = True
    if args.separate_non_convergence:
        flags["count_non_convergence"] = False
    data.update({k: v for k, v in flags.items() if v is not None})
    try:
        return RunConfig.from_dict(data)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _kinds(run: RunConfig) -> list[str]:
    # --no-early-stop turns the combined decoder into its no-early-stop variant
    if run.early_stop is False:
        return ["combined-no-early-stop" if k == "combined" else k for k in run.decoders]
    return list(run.decoders)


def cmd_sweep(args) -> int:
    run = _sweep_config(args)
    if args.dry_run:
        print(json.dumps(run.to_dict(), indent=2))
        return 0
    code = _load_code(run.code)
    kinds = _kinds(run)
    configs = {k: run.decoder_config(k) for k in kinds}
    stop = run.stop_rule()
    if run.block_size <= 0:
        raise UsageError("block size must be positive")
    try:
        workers = args.workers or simulator.default_workers()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    out = Path(run.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    ckpt = out.with_name(out.name + ".checkpoint.json")
    trace_path = out.with_name(out.stem + ".traces.jsonl")
    done: dict = {}
    if args.resume and ckpt.exists():
        saved = json.loads(ckpt.read_text())
        if saved.get("config") != run.to_dict():
            raise UsageError(f"checkpoint {ckpt} was written for a different configuration")
        for d in saved["points"]:
            pt = simulator.PointStats.from_dict(d)
            done[(pt.decoder, pt.p)] = pt
    finished = [done[k] for k in done]

    def checkpoint(pt: simulator.PointStats) -> None:
        finished.append(pt)
        out.write_text(simulator.points_to_csv(finished))
        ckpt.write_text(json.dumps({"config": run.to_dict(), "points": [q.to_dict() for q in finished]}))
        if pt.traces is not None:
            with trace_path.open("a") as fh:
                for idx, verdict, counts in pt.traces:
                    fh.write(json.dumps({"decoder": pt.decoder, "p": pt.p, "trial": idx,
                                         "classification": verdict, "unmatched": counts}) + "\n")
        print(f"{pt.decoder} p={pt.p}: {pt.logical_errors}/{pt.trials} ler={pt.ler:.4g} "
              f"avg_iters={pt.avg_total_iters:.3f}", file=sys.stderr)

    if run.trace and not done and trace_path.exists():
        trace_path.unlink()
    started = time.time()
    result = simulator.sweep(code, kinds, run.p_list, configs, stop, run.seed, workers=workers,
                             block_size=run.block_size, trace=run.trace,
                             count_non_convergence=run.count_non_convergence,
                             on_point=checkpoint, skip=done)
    out.write_text(result.to_csv())
    manifest = {
        "code": {"name": code.name, "n": code.n, "k": code.k, "spec": run.code},
        "config": run.to_dict(),
        "decoder_configs": {k: asdict(c) for k, c in configs.items()},
        "seed": run.seed,
        "stream_key": "(seed, round(p * 1e12), block)",
        "version": _version(),
        "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
        "wall_clock_s": round(time.time() - started, 3),
        "workers": workers,
        "points": [pt.to_dict() for pt in result.points],
    }
    out.with_suffix(".json").write_text(json.dumps(manifest, indent=2) + "\n")
    if ckpt.exists():
        ckpt.unlink()
    return 0


# ---------------------------------------------------------------------------
# parser


def _decoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="min-sum scaling factor (default 0.75)")
    p.add_argument("--alpha1", type=float, help="LP scaling factor (default 0.9)")
    p.add_argument("--ims-max", type=int, help="min-sum iteration budget")
    p.add_argument("--ilp-max", type=int, help="LP iteration budget")
    p.add_argument("--no-early-stop", action="store_true", help="run the combined decoder without early stopping")
    p.add_argument("--trace", action="store_true", help="record unmatched-syndrome counts per iteration")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sblp", description="Syndrome-based min-sum / LP decoding of quantum LDPC codes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    code = sub.add_parser("code", help="code construction")
    code_sub = code.add_subparsers(dest="action", required=True, parser_class=_Parser)
    build = code_sub.add_parser("build", help="build a code and write alist files plus a manifest")
    build.add_argument("--construction", help="gb, hgp-ring or a builtin name (" + ", ".join(codes.BUILTIN_CODES) + ")")
    build.add_argument("--a", type=_ints, help="gb: exponents of a(x)")
    build.add_argument("--b", type=_ints, help="gb: exponents of b(x)")
    build.add_argument("--ell", type=int, help="gb: circulant size")
    build.add_argument("--size", type=int, help="hgp-ring: length of the repetition ring")
    build.add_argument("--hx", help="alist file of H_X (with --hz)")
    build.add_argument("--hz", help="alist file of H_Z (with --hx)")
    build.add_argument("--name", help="code name and file stem")
    build.add_argument("--out", default=".", help="output directory")
    build.set_defaults(func=cmd_code_build)

    dec = sub.add_parser("decode", help="decode syndromes or errors read from a file")
    dec.add_argument("--code", required=True, help="builtin name or manifest path")
    dec.add_argument("--decoder", default="combined", choices=KINDS)
    dec.add_argument("--p", type=float, default=0.05, help="depolarizing probability used for the priors")
    dec.add_argument("--syndrome-file", help="one syndrome bitstring per line")
    dec.add_argument("--error-file", help="one X-error bitstring per line")
    _decoder_flags(dec)
    dec.set_defaults(func=cmd_decode)

    sw = sub.add_parser("sweep", help="estimate logical error rates over a list of probabilities")
    sw.add_argument("--config", help="JSON RunConfig; flags override its entries")
    sw.add_argument("--code", help="builtin name or manifest path")
    sw.add_argument("--decoder", type=lambda s: s.split(","), help="comma-separated decoder kinds")
    sw.add_argument("--p", type=float, help="single probability")
    sw.add_argument("--p-list", type=_floats, help="comma-separated probabilities")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--target-errors", type=int, help="stop a point after this many logical errors")
    sw.add_argument("--max-trials", type=int, help="stop a point after this many trials")
    sw.add_argument("--block-size", type=int, help="trials per random-stream block")
    sw.add_argument("--handoff", choices=("messages", "zero"), help="LP start of the combined decoder")
    sw.add_argument("--separate-non-convergence", action="store_true",
                    help="do not count non-converged trials as logical errors")
    sw.add_argument("--workers", type=int, help="worker processes (default $SBLP_WORKERS or 1)")
    sw.add_argument("--out", help="CSV path; the manifest goes next to it with a .json suffix")
    sw.add_argument("--resume", action="store_true", help="skip points stored in the checkpoint")
    sw.add_argument("--dry-run", action="store_true", help="print the parsed configuration and exit")
    _decoder_flags(sw)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sblp: error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("sblp: interrupted; completed points are in the checkpoint", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"sblp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
