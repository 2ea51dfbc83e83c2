"""Command-line experiment runner.

Reads an optional flat ``key = value`` config file, applies command-line
overrides, runs one experiment and writes a CSV table plus a JSON manifest
next to it. Exit status: 0 on success, 2 on invalid configuration, 3 on
I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .complexity import complexity_ratio, scheme_flops
from .errors import ConfigError, OIAError
from .schemes import SchemeId
from .simulate import (
    SweepRecord,
    SweepResult,
    SweepSpec,
    db_to_linear,
    dof_slope,
    interference_free_samples,
    run_sweep,
)

log = logging.getLogger("oiasim")

OUTPUT_DIR_ENV = "OIASIM_OUTPUT_DIR"
EXPERIMENTS = ("snr_sweep", "user_scaling", "convergence_in_K", "complexity_table")
RATE_HEADER = ("scheme", "M", "K", "snr_db", "mean_rate", "std_err", "trials")
FLOP_HEADER = ("scheme", "K", "n_r", "flops")
_DEFAULT_K = {
    "snr_sweep": (50,),
    "user_scaling": (),
    "convergence_in_K": (1, 10, 100, 1000),
    "complexity_table": (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000),
}

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


@dataclass
class ExperimentConfig:
    experiment: str = "snr_sweep"
    schemes: list[SchemeId] = field(default_factory=lambda: [SchemeId.OIA2])
    M: int = 1
    n_r: int | None = None
    K: list[int] | None = None
    c: float = 1.0
    dof_m: float = 1.0
    snr_start: float = 0.0
    snr_stop: float = 50.0
    snr_step: float = 5.0
    trials: int = 2000
    seed: int = 0
    out: Path | None = None
    workers: int = 1
    dof_lo: float = 20.0
    dof_hi: float = 40.0

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: must be one of {', '.join(EXPERIMENTS)}")
        if not self.schemes:
            raise ConfigError("scheme: at least one scheme is required")
        if self.M < 1:
            raise ConfigError(f"m: must be >= 1, got {self.M}")
        if self.n_r is not None and self.n_r != 2 * self.M:
            raise ConfigError(f"n_r: must equal 2M = {2 * self.M}, got {self.n_r}")
        if self.experiment != "user_scaling" and (not self.group_sizes() or min(self.group_sizes()) < 1):
            raise ConfigError("k: every group size must be >= 1")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        if self.experiment in ("snr_sweep", "user_scaling"):
            if not self.snr_step > 0:
                raise ConfigError(f"snr_step: must be > 0, got {self.snr_step}")
            if self.snr_stop < self.snr_start:
                raise ConfigError("snr_stop: empty SNR range (stop < start)")
        if self.experiment == "user_scaling":
            if not 0.0 <= self.dof_m <= self.M:
                raise ConfigError(f"dof_m: must lie in [0, M], got {self.dof_m}")
            if not self.c > 0:
                raise ConfigError(f"c: must be > 0, got {self.c}")
        if self.experiment == "complexity_table":
            bad = [s.value for s in self.schemes if s not in (SchemeId.MAX_SNR, SchemeId.OIA1, SchemeId.OIA2)]
            if bad:
                raise ConfigError(f"scheme: no flop model for {', '.join(bad)}")

    def group_sizes(self) -> list[int]:
        if self.K is not None:
            return list(self.K)
        return list(_DEFAULT_K[self.experiment])

    def snr_grid(self) -> list[float]:
        n = int(math.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return [self.snr_start + i * self.snr_step for i in range(n)]

    def echo(self) -> dict:
        d = asdict(self)
        d["schemes"] = [s.value for s in self.schemes]
        d["out"] = None if self.out is None else str(self.out)
        return d


def _int_list(text: str) -> list[int]:
    return [int(float(t)) for t in text.split(",") if t.strip()]


def _scheme_list(text: str) -> list[SchemeId]:
    return [SchemeId.parse(t) for t in text.split(",") if t.strip()]


# config key -> (attribute, parser)
_FIELDS = {
    "experiment": ("experiment", str.strip),
    "scheme": ("schemes", _scheme_list),
    "schemes": ("schemes", _scheme_list),
    "m": ("M", int),
    "n_r": ("n_r", int),
    "k": ("K", _int_list),
    "c": ("c", float),
    "dof_m": ("dof_m", float),
    "snr_start": ("snr_start", float),
    "snr_stop": ("snr_stop", float),
    "snr_step": ("snr_step", float),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "out": ("out", Path),
    "workers": ("workers", int),
    "dof_lo": ("dof_lo", float),
    "dof_hi": ("dof_hi", float),
}


def _apply(cfg: ExperimentConfig, key: str, value: str, where: str) -> None:
    norm = key.strip().lower().replace("-", "_")
    if norm not in _FIELDS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    attr, parse = _FIELDS[norm]
    try:
        setattr(cfg, attr, parse(value))
    except ValueError as exc:
        raise ConfigError(f"{where}: {norm}: {exc}") from None


def parse_config_file(path: Path, cfg: ExperimentConfig | None = None) -> ExperimentConfig:
    """Load ``key = value`` lines; ``#`` starts a comment."""
    cfg = cfg or ExperimentConfig()
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split(sep, 1)
        _apply(cfg, key, value.strip(), f"{path}:{lineno}")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="oiasim",
        description="Monte-Carlo experiments for opportunistic interference alignment.",
    )
    p.add_argument("config", nargs="?", type=Path, help="optional key = value config file")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--scheme", help="comma-separated: OIA1,OIA2,MAX_SNR,TDM1,TDM2,OPT")
    p.add_argument("--m", help="streams per transmitter (N_R = 2M)")
    p.add_argument("--n-r", help="receive antennas; must equal 2M")
    p.add_argument("--k", help="users per group; comma-separated list allowed")
    p.add_argument("--c", help="user-scaling constant in K = c * P^(dof_m * M)")
    p.add_argument("--dof-m", help="target DoF for user scaling")
    p.add_argument("--snr-start", help="first SNR point, dB")
    p.add_argument("--snr-stop", help="last SNR point, dB (inclusive)")
    p.add_argument("--snr-step", help="SNR step, dB")
    p.add_argument("--trials", help="Monte-Carlo trials per point")
    p.add_argument("--seed", help="RNG seed")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--workers", help="threads for trial evaluation")
    p.add_argument("--dof-lo", help="lower edge of the DoF regression window, dB")
    p.add_argument("--dof-hi", help="upper edge of the DoF regression window, dB")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config is not None:
        cfg = parse_config_file(args.config, cfg)
    for key in _FIELDS:
        value = getattr(args, key, None)
        if value is not None:
            _apply(cfg, key, str(value), f"--{key.replace('_', '-')}")
    cfg.validate()
    return cfg


def _fmt(x: float) -> str:
    # Shortest repr that round-trips exactly.
    return repr(float(x))


def _rate_rows(result: SweepResult):
    spec = result.spec
    for r in result.records:
        yield (spec.scheme.value, spec.M, r.K, _fmt(r.snr_db), _fmt(r.mean_rate), _fmt(r.std_error), r.trials)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def read_rate_csv(path: Path) -> dict[tuple[str, str], SweepResult]:
    """Parse a rate CSV back into sweep results keyed by ``(scheme, K-label)``.

    Rows whose K changes along SNR (user scaling) share the label ``"scaled"``
    when the file comes from a scaled run; otherwise the label is the K value.
    """
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    by_scheme: dict[str, list[dict]] = {}
    for row in rows:
        by_scheme.setdefault(row["scheme"], []).append(row)
    out: dict[tuple[str, str], SweepResult] = {}
    for scheme, srows in by_scheme.items():
        snrs = [float(r["snr_db"]) for r in srows]
        scaled = len(set(snrs)) == len(snrs) and len({r["K"] for r in srows}) > 1
        for row in srows:
            label = "scaled" if scaled else row["K"]
            res = out.setdefault((scheme, label), SweepResult(spec=None))
            res.records.append(
                SweepRecord(
                    float(row["snr_db"]), int(row["K"]), float(row["mean_rate"]),
                    float(row["std_err"]), int(row["trials"]),
                )
            )
    return out


def _summarise(label: str, result: SweepResult, cfg: ExperimentConfig) -> None:
    first, last = result.records[0], result.records[-1]
    line = f"{label}: rate {first.mean_rate:.6g} @ {first.snr_db:g} dB -> {last.mean_rate:.6g} @ {last.snr_db:g} dB"
    try:
        line += f", DoF slope [{cfg.dof_lo:g}, {cfg.dof_hi:g}] dB = {dof_slope(result, cfg.dof_lo, cfg.dof_hi):.6g}"
    except OIAError:
        pass
    print(line)


def _run_rates(cfg: ExperimentConfig) -> list[tuple]:
    rows: list[tuple] = []
    if cfg.experiment == "snr_sweep":
        for scheme in cfg.schemes:
            for k in cfg.group_sizes():
                spec = SweepSpec(scheme, cfg.M, tuple(cfg.snr_grid()), cfg.trials, cfg.seed, K=k)
                res = run_sweep(spec, workers=cfg.workers)
                _summarise(f"{scheme.value} K={k}", res, cfg)
                rows.extend(_rate_rows(res))
    elif cfg.experiment == "user_scaling":
        for scheme in cfg.schemes:
            spec = SweepSpec(
                scheme, cfg.M, tuple(cfg.snr_grid()), cfg.trials, cfg.seed, c=cfg.c, dof_m=cfg.dof_m
            )
            res = run_sweep(spec, workers=cfg.workers)
            _summarise(f"{scheme.value} K=max(1, round({cfg.c:g} P^{cfg.dof_m * cfg.M:g}))", res, cfg)
            rows.extend(_rate_rows(res))
    else:  # convergence_in_K
        snr = cfg.snr_start
        for scheme in cfg.schemes:
            for k in sorted(cfg.group_sizes()):
                spec = SweepSpec(scheme, cfg.M, (snr,), cfg.trials, cfg.seed, K=k)
                res = run_sweep(spec, workers=cfg.workers)
                print(f"{scheme.value} K={k} @ {snr:g} dB: rate {res.records[0].mean_rate:.6g}")
                rows.extend(_rate_rows(res))
        ref = interference_free_samples(cfg.M, db_to_linear(snr), cfg.trials, cfg.seed)
        print(f"interference-free {cfg.M}x{cfg.M} reference @ {snr:g} dB: {ref.mean():.6g}")
    return rows


def _run_flops(cfg: ExperimentConfig) -> list[tuple]:
    n_r = 2 * cfg.M
    ks = sorted(cfg.group_sizes())
    rows = [(s.value, k, n_r, scheme_flops(s, k, n_r)) for s in cfg.schemes for k in ks]
    if SchemeId.OIA1 in cfg.schemes:
        for s in cfg.schemes:
            print(f"{s.value}/OIA1 at K={ks[-1]}, n_r={n_r}: {complexity_ratio(s, SchemeId.OIA1, ks[-1], n_r):.6g}")
    return rows


def output_path(cfg: ExperimentConfig) -> Path:
    if cfg.out is not None:
        return Path(cfg.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{cfg.experiment}.csv"


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run ``cfg`` and write its CSV and manifest; returns the CSV path."""
    cfg.validate()
    path = output_path(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    if cfg.experiment == "complexity_table":
        header, rows = FLOP_HEADER, _run_flops(cfg)
    else:
        header, rows = RATE_HEADER, _run_rates(cfg)
    write_csv(path, header, rows)
    manifest = {
        "config": cfg.echo(),
        "seed": cfg.seed,
        "version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "csv": path.name,
    }
    path.with_suffix(".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    log.info("wrote %s", path)
    return path


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"oiasim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"oiasim: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        path = run_experiment(cfg)
    except ConfigError as exc:
        print(f"oiasim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"oiasim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
