"""Command-line driver: solve single pairs, run budget-matched comparisons,
generate instance files and dump the penalty matrix.

Exit codes for ``solve``: 0 isomorphism found, 1 no mapping found,
2 non-isomorphic by degree sequence, 3 for any error (bad flags included).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .baselines import SaConfig, SqaConfig, run_pimc_sqa, run_sa
from .encoding import MappingCode, NonIsomorphicVerdict, build_code
from .graphs import ORACLE_MAX_N, GraphParseError, format_pair, read_pair, verify_mapping
from .instances import iso_random, noniso_same_degree, petersen_vs_prism
from .trace import Isomorphic, NotFound, RunTrace
from .vmc import VmcConfig, run_vmc

EXIT_FOUND, EXIT_NOT_FOUND, EXIT_PRUNED, EXIT_ERROR = 0, 1, 2, 3
BACKENDS = ("sa", "sqa", "rbm")
REPORT_COLUMNS = [
    "instance",
    "backend",
    "n",
    "qubits",
    "space_log2",
    "reps",
    "mean_best_energy",
    "final_hit_rate",
    "mean_iter_seconds",
]
GEN_KINDS = ("iso-random", "noniso-same-degree", "petersen-vs-prism")

_CONFIG_TYPES = {"rbm": VmcConfig, "sa": SaConfig, "sqa": SqaConfig}


class CliError(Exception):
    """Any user-facing failure; mapped to exit code 3."""


class ParityError(CliError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would collide with the
    # "degree-pruned" verdict code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- configuration


def _coerce(value: str, default):
    v = value.strip()
    if v.lower() in ("none", ""):
        return None
    if isinstance(default, bool):
        if v.lower() in ("1", "true", "yes", "on"):
            return True
        if v.lower() in ("0", "false", "no", "off"):
            return False
        raise CliError(f"expected a boolean, got {value!r}")
    try:
        if isinstance(default, int):
            return int(v)
        num = float(v)
    except ValueError as exc:
        raise CliError(f"bad numeric value {value!r}") from exc
    return int(num) if num.is_integer() and "." not in v and "e" not in v.lower() else num


def load_config_file(path) -> Dict[str, dict]:
    """Read ``key = value`` lines grouped under ``[rbm]``, ``[sa]``, ``[sqa]``.

    A ``[run]`` section may hold ``reps`` and ``seed``.
    """
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    out: Dict[str, dict] = {}
    for section in cp.sections():
        if section not in (*_CONFIG_TYPES, "run"):
            raise CliError(f"unknown config section [{section}]")
        if section == "run":
            known = {"reps": 100, "seed": 0}
        else:
            known = {f.name: _field_default(f) for f in dataclasses.fields(_CONFIG_TYPES[section])}
        vals = {}
        for key, raw in cp.items(section):
            if key not in known:
                raise CliError(f"unknown key {key!r} in [{section}]")
            vals[key] = _coerce(raw, known[key])
        out[section] = vals
    return out


def _field_default(f):
    if f.default is dataclasses.MISSING:
        return None
    # Optional counts default to None; treat them as integers when parsing
    return 0 if f.default is None and "int" in str(f.type) else f.default


def backend_config(backend: str, args, file_cfg: Dict[str, dict], seed: int):
    """Shipped defaults, then the config file, then command-line flags."""
    vals = dict(file_cfg.get(backend, {}))
    if backend == "rbm":
        flags = {"n_iterations": args.iters, "samples_per_iter": args.samples, "learning_rate": args.lr}
    else:
        flags = {"n_annealing": args.iters, "n_sweep": args.sweeps}
    vals.update({k: v for k, v in flags.items() if v is not None})
    vals["seed"] = seed
    try:
        return _CONFIG_TYPES[backend](**vals)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid {backend} configuration: {exc}") from exc


def budget(cfg, L: int) -> int:
    """Candidate solutions explored over a whole run."""
    if isinstance(cfg, VmcConfig):
        return cfg.n_iterations * (cfg.samples_per_iter or 10 * L)
    return cfg.n_annealing * (cfg.n_sweep or 10 * L)


def check_parity(configs: Dict[str, object], L: int) -> int:
    budgets = {b: budget(c, L) for b, c in configs.items()}
    if len(set(budgets.values())) > 1:
        detail = ", ".join(f"{b}={v}" for b, v in budgets.items())
        raise ParityError(
            f"budget parity violated for L={L} (iterations x candidates per iteration): {detail}"
        )
    return next(iter(budgets.values()))


def run_backend(backend: str, code: MappingCode, cfg) -> RunTrace:
    if backend == "rbm":
        return run_vmc(code, cfg)
    if backend == "sa":
        return run_sa(code, cfg)
    if backend == "sqa":
        return run_pimc_sqa(code, cfg)
    raise CliError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------- verbs


def _load(path) -> tuple:
    try:
        return read_pair(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except GraphParseError as exc:
        raise CliError(f"{path}: {exc}") from exc


def cmd_solve(args, file_cfg) -> int:
    g1, g2 = _load(args.instance)
    code = build_code(g1, g2)
    if isinstance(code, NonIsomorphicVerdict):
        print(f"NON-ISOMORPHIC by degree sequence ({code.reason})")
        return EXIT_PRUNED
    seed = args.seed if args.seed is not None else file_cfg.get("run", {}).get("seed", 0)
    cfg = backend_config(args.backend, args, file_cfg, seed)
    if isinstance(cfg, VmcConfig):
        cfg = dataclasses.replace(cfg, early_stop=True)
    elif isinstance(cfg, SqaConfig):
        cfg = dataclasses.replace(cfg, stop_at_zero=True)
    trace = run_backend(args.backend, code, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / f"{Path(args.instance).stem}_{args.backend}_seed{seed}.csv"
    trace.write_csv(trace_path)
    v = trace.verdict
    if isinstance(v, Isomorphic):
        # end-to-end guard: never print an unverified mapping
        if not verify_mapping(g1, g2, v.mapping):
            raise CliError("internal error: reported mapping failed verification")
        print("ISOMORPHIC")
        print(v.mapping)
        status = EXIT_FOUND
    else:
        floor = v.best_energy if isinstance(v, NotFound) else trace.best_energy
        print(f"NO MAPPING FOUND, floor {floor}")
        status = EXIT_NOT_FOUND
    print(f"trace: {trace_path}", file=sys.stderr)
    return status


@dataclasses.dataclass
class ReportRow:
    instance: str
    backend: str
    n: int
    qubits: int
    reps: int
    best_energies: List[int]
    hit_rates: List[float]
    iter_seconds: List[float]

    @property
    def space_log2(self) -> int:
        return self.qubits

    def as_row(self) -> list:
        return [
            self.instance,
            self.backend,
            self.n,
            self.qubits,
            self.space_log2,
            self.reps,
            f"{np.mean(self.best_energies):.6f}",
            f"{np.mean(self.hit_rates):.6f}",
            f"{np.mean(self.iter_seconds):.6f}",
        ]


def compare(
    instances: Sequence[tuple],
    backends: Sequence[str],
    configs: Dict[str, object],
    reps: int,
    seed_base: int = 0,
    out_dir: Optional[Path] = None,
) -> List[ReportRow]:
    """Run every instance x backend x repetition; repetition ``r`` uses seed ``seed_base + r``.

    ``instances`` holds ``(name, g1, g2)``. Pairs removed by degree pruning
    are skipped (no solver runs on them).
    """
    if reps < 1:
        raise CliError("reps must be >= 1")
    if len(backends) < 2:
        raise CliError("compare needs at least two backends")
    rows = []
    for name, g1, g2 in instances:
        code = build_code(g1, g2)
        if isinstance(code, NonIsomorphicVerdict):
            print(f"{name}: NON-ISOMORPHIC by degree sequence, skipped", file=sys.stderr)
            continue
        check_parity({b: configs[b] for b in backends}, code.L)
        for b in backends:
            row = ReportRow(name, b, g1.n, code.L, reps, [], [], [])
            for r in range(reps):
                cfg = dataclasses.replace(configs[b], seed=seed_base + r)
                trace = run_backend(b, code, cfg)
                row.best_energies.append(int(trace.best_energy))
                row.hit_rates.append(trace.final_hit_rate)
                row.iter_seconds.append(trace.mean_iter_seconds)
                if out_dir is not None:
                    trace.write_csv(out_dir / f"{name}_{b}_rep{r}.csv")
            rows.append(row)
    return rows


def write_report(rows: Sequence[ReportRow], path) -> None:
    with open(path, "w", newline="") as fh:
        now = datetime.now(timezone.utc).isoformat(timespec="seconds")
        fh.write(f"# comparison report written {now}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for row in rows:
            w.writerow(row.as_row())


def cmd_compare(args, file_cfg) -> int:
    backends = args.backend or list(BACKENDS)
    run = file_cfg.get("run", {})
    reps = args.reps if args.reps is not None else run.get("reps", 100)
    seed = args.seed if args.seed is not None else run.get("seed", 0)
    configs = {b: backend_config(b, args, file_cfg, seed) for b in backends}
    instances = [(Path(p).stem, *_load(p)) for p in args.instances]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rows = compare(instances, backends, configs, reps, seed, out)
    write_report(rows, out / "report.csv")
    for row in rows:
        print(
            f"{row.instance:>12} {row.backend:>4}  L={row.qubits:<3} "
            f"best={np.mean(row.best_energies):.3f} hit={np.mean(row.hit_rates):.3f} "
            f"iter={np.mean(row.iter_seconds) * 1e3:.3f} ms"
        )
    print(f"report: {out / 'report.csv'} ({time.perf_counter() - t0:.1f} s)", file=sys.stderr)
    return 0


def generate(kind: str, n: int, seed: int) -> str:
    """Instance-pair file text for one of ``GEN_KINDS``."""
    header = [f"kind={kind} n={n} seed={seed}"]
    if kind == "iso-random":
        g1, g2 = iso_random(n, seed)
        header.append("isomorphic")
    elif kind == "noniso-same-degree":
        if n < 4:
            raise CliError("noniso-same-degree needs n >= 4")
        g1, g2, verified = noniso_same_degree(n, seed)
        if verified:
            header.append("non-isomorphic (oracle verified)")
        else:
            print(
                f"warning: n={n} exceeds the oracle limit {ORACLE_MAX_N}; non-isomorphism unverified",
                file=sys.stderr,
            )
            header.append("unverified")
    elif kind == "petersen-vs-prism":
        g1, g2 = petersen_vs_prism()
        header = [f"kind={kind}", "non-isomorphic (oracle verified)"]
    else:
        raise CliError(f"unknown kind {kind!r}; choose from {', '.join(GEN_KINDS)}")
    return format_pair(g1, g2, header)


def cmd_gen(args, file_cfg) -> int:
    text = generate(args.kind, args.n, args.seed if args.seed is not None else 0)
    if args.out_file:
        Path(args.out_file).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_dump_q(args, file_cfg) -> int:
    g1, g2 = _load(args.instance)
    code = build_code(g1, g2)
    if isinstance(code, NonIsomorphicVerdict):
        print(f"NON-ISOMORPHIC by degree sequence ({code.reason})")
        return EXIT_PRUNED
    if args.out_file:
        code.dump_q(args.out_file)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["row", "col", "coefficient"])
        for i, j, c in code.q_entries():
            w.writerow([i, j, c])
    print(f"L={code.L} pairs: {' '.join(f'{i}-{j}' for i, j in code.pairs)}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--iters", type=int, help="iterations / annealing steps")
    shared.add_argument("--sweeps", type=int, help="SA/SQA moves per annealing step")
    shared.add_argument("--samples", type=int, help="RBM samples per iteration")
    shared.add_argument("--lr", type=float, help="RBM learning rate")
    shared.add_argument("--seed", type=int, help="seed (base seed for compare)")
    shared.add_argument("--reps", type=int, help="repetitions per backend (compare)")
    shared.add_argument("--out", default="runs", help="output directory")
    shared.add_argument("--config", help="key = value file with [rbm] [sa] [sqa] [run] sections")

    p = _Parser(prog="rbmgi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[shared], help="decide one instance pair")
    s.add_argument("instance")
    s.add_argument("--backend", choices=BACKENDS, default="rbm")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", parents=[shared], help="budget-matched backend comparison")
    c.add_argument("instances", nargs="+")
    c.add_argument("--backend", choices=BACKENDS, action="append", help="repeat; default all three")
    c.set_defaults(func=cmd_compare)

    g = sub.add_parser("gen", parents=[shared], help="write an instance pair file")
    g.add_argument("kind", choices=GEN_KINDS)
    g.add_argument("-n", type=int, default=6)
    g.add_argument("-o", "--out-file", help="destination (default stdout)")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("dump-q", parents=[shared], help="print the penalty matrix as CSV")
    d.add_argument("instance")
    d.add_argument("-o", "--out-file")
    d.set_defaults(func=cmd_dump_q)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = load_config_file(args.config) if args.config else {}
        return args.func(args, file_cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
