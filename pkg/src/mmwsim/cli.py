"""Command-line entry point: ``mmwsim run | genpool | validate``.

Exit status: 0 on success, 2 when the scenario does not parse or validate,
3 when a run or pool write fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .channel.pool import ClusterStats, generate_realization_pool, save_pool
from .scenario_file import ScenarioFileError, dump_scenario, load_scenario
from .sim import traces as tr
from .sim.runner import pool_seed, run

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_RUNTIME = 3

SUMMARY_FILE = "summary.txt"
SCENARIO_COPY = "scenario.yaml"

log = logging.getLogger("mmwsim")


def _run_one(scenario, out_dir: str) -> str:
    result = run(scenario)
    paths = result.write(out_dir)
    with open(os.path.join(out_dir, SCENARIO_COPY), "w", encoding="utf-8") as fh:
        fh.write(dump_scenario(scenario))

    # recomputed from the file on disk, not from memory
    stats = tr.summarize(tr.read_slot_traces(paths["slots"]), result.duration)
    lines = ["# effective parameters"]
    lines += ["#   " + line for line in dump_scenario(scenario).splitlines()]
    lines.append(f"# duration_s: {result.duration!r}")
    lines.append(f"# miesm_table_sha256: {result.miesm_digest}")
    lines += [f"{k}: {v}" for k, v in stats.items()]
    text = "\n".join(lines) + "\n"
    with open(os.path.join(out_dir, SUMMARY_FILE), "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def cmd_run(args) -> int:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"run.seed={args.seed}")
    if args.out is not None:
        overrides.append(f"run.output_dir={args.out}")
    try:
        scenario = load_scenario(args.file, overrides)
    except ScenarioFileError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    if args.replications < 1:
        print("--replications must be >= 1", file=sys.stderr)
        return EXIT_PARSE

    base = scenario.run.output_dir
    jobs = []
    for i in range(args.replications):
        seed = scenario.run.seed + i
        sc = dataclasses.replace(scenario, run=dataclasses.replace(scenario.run, seed=seed))
        out = base if args.replications == 1 else os.path.join(base, f"seed{seed}")
        jobs.append((sc, out))

    try:
        with ThreadPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as pool:
            texts = list(pool.map(lambda job: _run_one(*job), jobs))
    except Exception as exc:  # any failure inside a run
        log.debug("run failed", exc_info=True)
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for (sc, out), text in zip(jobs, texts):
        print(f"== {out}")
        print(text, end="")
    return EXIT_OK


def cmd_genpool(args) -> int:
    if args.count < 1 or args.tx_antennas < 1 or args.rx_antennas < 1:
        print("count and antenna numbers must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    pool = generate_realization_pool(pool_seed(args.seed), args.count, ClusterStats(), args.tx_antennas, args.rx_antennas)
    try:
        save_pool(pool, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {len(pool)} realizations ({args.tx_antennas}x{args.rx_antennas}) to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        load_scenario(args.file)
    except ScenarioFileError as exc:
        print(exc)
        return EXIT_PARSE
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmwsim", description="mmWave PHY/MAC discrete-event simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="dotted override, e.g. radio.tx_power_dbm=27")
    p.add_argument("--out", help="output directory (overrides run.output_dir)")
    p.add_argument("--seed", type=int, help="master seed (overrides run.seed)")
    p.add_argument("--replications", type=int, default=1, help="run N consecutive seeds in parallel")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("genpool", help="generate a channel realization pool file")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--tx-antennas", type=int, default=64)
    p.add_argument("--rx-antennas", type=int, default=16)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_genpool)

    p = sub.add_parser("validate", help="check a scenario file without running it")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
