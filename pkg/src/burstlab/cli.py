"""
Command-line interface.

Every run writes its CSV outputs and a ``manifest.json`` (configuration,
seed, input digests, tool version) into ``--out``. Outputs are sorted by
tag then time, so thread count never changes their bytes.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .attention import (DEFAULT_MIN_WINDOWS, DEFAULT_THRESHOLD, DEFAULT_WINDOW, detect_episodes,
                        lv_series, topic_train, union_counts, write_counts_csv,
                        write_episodes_csv, write_series_csv)
from .distribution import (DEFAULT_LV_BINS, DensityAccumulator, PopularityBinning,
                           write_density_csv)
from .errors import BurstlabError, ConfigurationError, DataError
from .ingest import FORMATS, build_trains, load_events, write_rejects_csv
from .lv import batch_lv, write_lv_csv
from .nullmodel import merge, surrogate_ensemble
from .spikes import write_trains_csv
from .synth import KINDS, GeneratorSpec, parse_config, simulate

logger = logging.getLogger("burstlab")

DEFAULT_SEED = 20120502
SEED_ENV = "BURSTLAB_SEED"
EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
SUBCOMMANDS = ("ingest", "lv", "dist", "nullmodel", "series", "detect", "synth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _tag_list(text):
    return [v for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="burstlab",
                     description="Local variation (L_V) analysis of tagged event logs.")
    parser.add_argument("--version", action="version", version=f"burstlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + ",replay}",
                                parser_class=_Parser)

    def common(p, *, inputs=True, seed=False):
        if inputs:
            p.add_argument("--input", action="append", required=True, metavar="PATH",
                           help="event log (repeatable)")
            p.add_argument("--format", choices=FORMATS, default="csv")
            p.add_argument("--from", dest="t_from", type=int, metavar="EPOCH",
                           help="range start (inclusive)")
            p.add_argument("--to", dest="t_to", type=int, metavar="EPOCH",
                           help="range end (exclusive)")
            p.add_argument("--threads", type=int, default=1)
        if seed:
            p.add_argument("--seed", type=int,
                           help=f"master seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
        p.add_argument("--out", default=".", metavar="DIR", help="output directory")

    def binning(p):
        p.add_argument("--pop-edges", type=_int_list, metavar="E1,E2,...",
                       help="popularity bin edges (default: decades)")
        p.add_argument("--lv-bins", type=int, default=DEFAULT_LV_BINS)

    def windows(p):
        p.add_argument("--window", type=int, default=DEFAULT_WINDOW, metavar="SECONDS")
        p.add_argument("--tags", type=_tag_list, metavar="A,B,...",
                       help="tags to analyse (default: all)")
        p.add_argument("--topic", action="store_true",
                       help="also analyse the merged train of the selected tags")

    p = sub.add_parser("ingest", help="build spike trains from event logs")
    common(p)
    p = sub.add_parser("lv", help="local variation per train")
    common(p)
    p.add_argument("--low-cut", type=float, default=0.5)
    p.add_argument("--high-cut", type=float, default=1.5)
    p = sub.add_parser("dist", help="LV densities per popularity bin")
    common(p)
    binning(p)
    p = sub.add_parser("nullmodel", help="surrogate trains and their LV densities")
    common(p, seed=True)
    binning(p)
    p.add_argument("--replicas", type=int, default=1,
                   help="surrogates per real train")
    p = sub.add_parser("series", help="windowed LV(t) and counts")
    common(p)
    windows(p)
    p = sub.add_parser("detect", help="collective-attention episodes")
    common(p)
    windows(p)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--min-windows", type=int, default=DEFAULT_MIN_WINDOWS)
    p = sub.add_parser("synth", help="generate a synthetic train")
    common(p, inputs=False, seed=True)
    p.add_argument("--config", metavar="FILE", help="key = value generator file")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--rate", type=float)
    p.add_argument("--shape", type=float)
    p.add_argument("--isi-pair", type=_int_list, metavar="A,B")
    p.add_argument("--duration", type=int)
    p.add_argument("--n-spikes", type=int)
    p.add_argument("--start", type=int)
    p.add_argument("--tag")
    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, metavar="DIR")
    return parser


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV} must be an integer, got {env!r}")
    return DEFAULT_SEED


class _Run:
    """Output directory bookkeeping for one invocation."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = argv
        self.out = Path(args.out)
        self.outputs: dict[str, str] = {}
        self.extra: dict = {}

    def write(self, name, writer, *payload):
        buf = io.StringIO()
        writer(*payload, buf)
        data = buf.getvalue().encode("utf-8")
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_bytes(data)
        self.outputs[name] = hashlib.sha256(data).hexdigest()

    def manifest(self, seed):
        args = self.args
        inputs = []
        for key in ("input", "config"):
            value = getattr(args, key, None)
            for path in ([value] if isinstance(value, str) else value or []):
                inputs.append({"path": os.path.abspath(path), "sha256": _sha256(path)})
        config = {k: v for k, v in vars(args).items() if k not in ("out",)}
        if "seed" in config:
            config["seed"] = seed
        doc = {
            "tool": "burstlab",
            "version": __version__,
            "command": args.command,
            "argv": _portable_argv(self.argv),
            "seed": seed,
            "config": config,
            "inputs": inputs,
            "outputs": dict(sorted(self.outputs.items())),
        }
        doc.update(self.extra)
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                                                encoding="utf-8")


def _portable_argv(argv):
    """argv without ``--out`` and with absolute input paths."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--out":
            i += 2
            continue
        if tok.startswith("--out="):
            i += 1
            continue
        if tok in ("--input", "--config") and i + 1 < len(argv):
            out += [tok, os.path.abspath(argv[i + 1])]
            i += 2
            continue
        for flag in ("--input=", "--config="):
            if tok.startswith(flag):
                tok = flag + os.path.abspath(tok[len(flag):])
        out.append(tok)
        i += 1
    return out


def _time_range(args):
    if args.t_from is None and args.t_to is None:
        return None
    lo = 0 if args.t_from is None else args.t_from
    hi = (1 << 62) if args.t_to is None else args.t_to
    if not lo < hi:
        raise ConfigurationError(f"--from {lo} must be smaller than --to {hi}")
    return lo, hi


def _load_trains(run):
    args = run.args
    if args.threads < 1:
        raise ConfigurationError("--threads must be >= 1")
    rejects = []
    events = load_events(args.input, args.format, rejects)
    trains, stats = build_trains(events, _time_range(args))
    run.write("rejects.csv", write_rejects_csv, rejects)
    run.extra["corpus"] = stats.as_dict()
    run.extra["rejected_lines"] = len(rejects)
    if rejects:
        logger.warning("%d malformed line(s) written to rejects.csv", len(rejects))
    return trains, stats


def _binning(args, trains):
    if args.lv_bins < 3:
        raise ConfigurationError("--lv-bins must be >= 3")
    if args.pop_edges:
        return PopularityBinning(tuple(args.pop_edges))
    max_p = max((t.popularity for t in trains), default=1)
    return PopularityBinning.decades(max_p)


def _write_density(run, name, trains, results, binning, lv_bins):
    acc = DensityAccumulator(binning, lv_bins)
    acc.update((t.popularity, r) for t, r in zip(trains, results))
    densities = acc.finalize()
    run.write(name, write_density_csv, densities)
    run.extra.setdefault("density_summary", {})[name] = [
        {"pop_bin_lo": d.pop_lo, "pop_bin_hi": d.pop_hi, "n_trains": d.n_trains,
         "excluded": d.excluded, "mean_lv": d.mean_lv, "peak_lv": d.peak_lv}
        for d in densities]


def _write_tag_summary(trains, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["tag", "popularity", "raw_count"])
    for tag, train in trains.items():
        writer.writerow([tag, train.popularity, train.raw_count])


def cmd_ingest(run):
    trains, _ = _load_trains(run)
    run.write("trains.csv", write_trains_csv, trains.values())
    run.write("tags.csv", _write_tag_summary, trains)


def cmd_lv(run):
    args = run.args
    if not args.low_cut <= args.high_cut:
        raise ConfigurationError("--low-cut must not exceed --high-cut")
    trains, _ = _load_trains(run)
    tl = list(trains.values())
    results = batch_lv(tl, args.threads)

    def writer(out):
        write_lv_csv(tl, results, out, args.low_cut, args.high_cut)

    run.write("lv.csv", writer)


def cmd_dist(run):
    args = run.args
    trains, _ = _load_trains(run)
    tl = list(trains.values())
    binning = _binning(args, tl)
    results = batch_lv(tl, args.threads)
    run.write("lv.csv", write_lv_csv, tl, results)
    _write_density(run, "density.csv", tl, results, binning, args.lv_bins)


def cmd_nullmodel(run, seed):
    args = run.args
    if args.replicas < 1:
        raise ConfigurationError("--replicas must be >= 1")
    trains, _ = _load_trains(run)
    tl = list(trains.values())
    binning = _binning(args, tl)
    merged = merge(tl)
    multiplicity = Counter(t.popularity for t in tl)
    surrogates = []
    for p in sorted(multiplicity):
        surrogates.extend(surrogate_ensemble(merged, [p], multiplicity[p] * args.replicas,
                                             seed, threads=args.threads))
    results = batch_lv(surrogates, args.threads)
    run.extra["merged_spikes"] = len(merged)
    run.write("surrogates.csv", write_trains_csv, surrogates)
    run.write("surrogate_lv.csv", write_lv_csv, surrogates, results)
    _write_density(run, "surrogate_density.csv", surrogates, results, binning, args.lv_bins)


def _series_inputs(run):
    args = run.args
    trains, _ = _load_trains(run)
    if args.tags:
        missing = [t for t in args.tags if t not in trains]
        if missing:
            logger.warning("tags without spikes in range: %s", ", ".join(missing))
        selected = [trains[t] for t in args.tags if t in trains]
    else:
        selected = list(trains.values())
    w = args.window
    if w < 10:
        raise ConfigurationError("--window must be >= 10 seconds")
    rng = _time_range(args)
    if args.t_from is not None and args.t_to is not None:
        t0, t1 = rng
    else:
        spikes = [t.times for t in selected if t.popularity]
        if not spikes:
            raise DataError("no spikes for the selected tags in range")
        first = min(int(s[0]) for s in spikes)
        last = max(int(s[-1]) for s in spikes)
        t0 = args.t_from if args.t_from is not None else (first // w) * w
        t1 = args.t_to if args.t_to is not None else (last // w + 1) * w
        if not t0 < t1:
            raise ConfigurationError(f"empty analysis range [{t0}, {t1})")
    targets = list(selected)
    if args.topic:
        targets.append(topic_train(selected, tag="topic"))
    series = [lv_series(t, (t0, t1), w) for t in targets]
    run.extra["range"] = [t0, t1]
    run.write("series.csv", write_series_csv, series)
    run.write("counts.csv", write_counts_csv, union_counts(selected, (t0, t1), w))
    return series


def cmd_series(run):
    _series_inputs(run)


def cmd_detect(run):
    args = run.args
    series = _series_inputs(run)
    episodes = []
    for s in series:
        episodes.extend(detect_episodes(s, args.threshold, args.min_windows))
    run.write("episodes.csv", write_episodes_csv, episodes)


def cmd_synth(run, seed):
    args = run.args
    values = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read config {args.config!r}: {exc}") from exc
        base = parse_config(text)
        values = {k: getattr(base, k) for k in
                  ("kind", "rate", "shape", "isi_pair", "duration", "n_spikes", "seed", "start",
                   "tag")}
    for key in ("kind", "rate", "shape", "isi_pair", "duration", "n_spikes", "start", "tag"):
        value = getattr(args, key)
        if value is not None:
            values[key] = tuple(value) if key == "isi_pair" else value
    if args.seed is not None or "seed" not in values:
        values["seed"] = seed
    if "kind" not in values:
        raise ConfigurationError("synth needs --kind or a config file")
    spec = GeneratorSpec(**values)
    result = simulate(spec)
    for note in result.warnings:
        logger.warning(note)
    run.extra["synth"] = {"n_drawn": result.n_drawn, "n_collapsed": result.n_collapsed,
                          "warnings": list(result.warnings), "seed": spec.seed}
    run.write("synth.csv", write_trains_csv, [result.train])
    return spec.seed


COMMANDS = {
    "ingest": cmd_ingest,
    "lv": cmd_lv,
    "dist": cmd_dist,
    "series": cmd_series,
    "detect": cmd_detect,
}


def _replay(args) -> int:
    try:
        doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        argv = list(doc["argv"])
        seed = doc["seed"]
    except (OSError, ValueError, KeyError) as exc:
        print(f"burstlab: cannot read manifest {args.manifest!r}: {exc}", file=sys.stderr)
        return EXIT_DATA
    out = args.out if args.out is not None else str(Path(args.manifest).parent)
    if doc.get("command") in ("nullmodel", "synth"):
        argv += ["--seed", str(seed)]
    return main(argv + ["--out", out])


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    if args.command == "replay":
        return _replay(args)
    run = _Run(args, argv)
    try:
        seed = _resolve_seed(args)
        if args.command == "nullmodel":
            cmd_nullmodel(run, seed)
        elif args.command == "synth":
            seed = cmd_synth(run, seed)
        else:
            COMMANDS[args.command](run)
        run.manifest(seed)
    except ConfigurationError as exc:
        print(f"burstlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, BurstlabError) as exc:
        print(f"burstlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
