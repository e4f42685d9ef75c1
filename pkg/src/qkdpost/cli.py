"""Command-line front end: rate tables, session campaigns, verification.

Three subcommands on one console script:

* ``keyrate`` writes the rate-curve table for a protocol on an inclusive
  error-rate grid.
* ``simulate`` runs seeded end-to-end sessions and writes per-session
  reports plus a campaign summary.
* ``verify`` runs one of the randomized verification suites and fails the
  process when any assertion exceeds its bound.

Every output embeds the tool version, the canonicalized argument list, and
the seed, and contains no timestamps, so a rerun with identical arguments
produces a byte-identical file. Exit codes: 0 success, 1 output I/O
failure, 2 bad usage, 3 verification failure.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .channel import bb84_family, sample_pair, six_state_point
from .entropy import type_deviation_bound
from .keyrate import CURVES, rate_first_arg, rate_second_arg, render_csv, render_json_rows, sweep
from .oracle import (
    coset_decomposition_check,
    lemma_suite,
    random_bell_diagonal,
    random_density,
    theorem3_direct,
    worst_case_check,
)
from .protocol import Abort, SessionConfig, parameter_estimation, run_full_session, toeplitz_hash

_EXIT_IO = 1
_EXIT_VERIFY = 3


def _canonical_params(params: dict) -> str:
    return " ".join(f"{k}={params[k]}" for k in sorted(params))


def _comment_header(command: str, params: dict, seed: int) -> str:
    return (
        f"# qkdpost {__version__}\n"
        f"# command: {command}\n"
        f"# args: {_canonical_params(params)}\n"
        f"# seed: {seed}\n"
    )


def _json_envelope(command: str, params: dict, seed: int) -> dict:
    return {
        "version": __version__,
        "command": command,
        "args": {k: params[k] for k in sorted(params)},
        "seed": seed,
    }


def _emit(text: str, out: str | None):
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        click.echo(f"cannot write {out}: {exc}", err=True)
        sys.exit(_EXIT_IO)


@click.group()
@click.version_option(__version__, prog_name="qkdpost")
def main():
    """Key-rate tables, reconciliation session campaigns, verification."""


@main.command()
@click.option("--protocol", type=click.Choice(["six-state", "bb84"]), required=True)
@click.option("--emin", type=float, default=0.0, show_default=True)
@click.option("--emax", type=float, required=True)
@click.option("--step", type=float, default=1e-3, show_default=True)
@click.option(
    "--curves",
    default="proposed,vollbrecht,bstep,oneway",
    show_default=True,
    help="Comma-separated curve names.",
)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Default: stdout.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
def keyrate(protocol, emin, emax, step, curves, fmt, out, seed):
    """Write the key-rate table on the inclusive grid [emin, emax]."""
    curve_list = tuple(c.strip() for c in curves.split(",") if c.strip())
    if not curve_list:
        raise click.UsageError("no curves requested")
    for c in curve_list:
        if c not in CURVES:
            raise click.UsageError(f"unknown curve {c!r}; choices: {', '.join(CURVES)}")
    try:
        rows = sweep(emin, emax, step, protocol)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    params = {
        "protocol": protocol,
        "emin": emin,
        "emax": emax,
        "step": step,
        "curves": ",".join(curve_list),
        "format": fmt,
    }
    if fmt == "csv":
        text = _comment_header("keyrate", params, seed) + render_csv(rows, curve_list)
    else:
        payload = _json_envelope("keyrate", params, seed)
        payload["rows"] = render_json_rows(rows, curve_list)
        text = json.dumps(payload, indent=2) + "\n"
    _emit(text, out)


@main.command()
@click.option("--e", "error_rate", type=float, required=True, help="Channel error rate.")
@click.option("--protocol", type=click.Choice(["six-state", "bb84"]), default="six-state", show_default=True)
@click.option("--n", type=int, default=50_000, show_default=True, help="Blocks per session.")
@click.option("--m", type=int, default=20_000, show_default=True, help="Estimation sample size.")
@click.option("--trials", type=int, default=1, show_default=True)
@click.option("--delta", type=float, default=0.05, show_default=True, help="Code-rate margin.")
@click.option("--tolerance", type=float, default=0.02, show_default=True, help="Abort tolerance.")
@click.option("--margin", type=float, default=0.0, show_default=True, help="Key-rate deduction.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Default: stdout.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
def simulate(error_rate, protocol, n, m, trials, delta, tolerance, margin, fmt, out, seed):
    """Run seeded end-to-end sessions and summarize the campaign."""
    if trials < 1:
        raise click.UsageError("trials must be >= 1")
    try:
        if protocol == "six-state":
            channel = six_state_point(error_rate)
        else:
            channel = bb84_family(error_rate, 0.5 * error_rate)
        base_cfg = dict(
            channel=channel,
            n=n,
            m=m,
            delta=delta,
            abort_tolerance=tolerance,
            finite_size_margin=margin,
            mapping=protocol,
        )
        SessionConfig(seed=0, **base_cfg)
    except ValueError as exc:
        raise click.UsageError(str(exc))

    trial_seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64).tolist()
    reports = []
    for trial, trial_seed in enumerate(trial_seeds):
        report = run_full_session(SessionConfig(seed=int(trial_seed), **base_cfg))
        record = {"trial": trial, "trial_seed": int(trial_seed)}
        record.update(report.to_dict())
        reports.append(record)

    count = float(trials)
    summary = {
        "trials": trials,
        "aborted": sum(r["aborted"] for r in reports),
        "success_fraction": sum(r["reconciliation_ok"] for r in reports) / count,
        "key_match_fraction": sum(r["key_match"] for r in reports) / count,
        "mean_empirical_key_rate": sum(r["empirical_key_rate"] for r in reports) / count,
        "mean_leak_per_bit": sum(r["leak_bits"] for r in reports) / (count * 2 * n),
    }
    params = {
        "e": error_rate,
        "protocol": protocol,
        "n": n,
        "m": m,
        "trials": trials,
        "delta": delta,
        "tolerance": tolerance,
        "margin": margin,
        "format": fmt,
    }
    if fmt == "json":
        payload = _json_envelope("simulate", params, seed)
        payload["summary"] = summary
        payload["reports"] = reports
        text = json.dumps(payload, indent=2) + "\n"
    else:
        fields = (
            "trial",
            "trial_seed",
            "aborted",
            "estimated_e",
            "n_hat0",
            "bounds_violated",
            "leak_bits",
            "reconciliation_ok",
            "key_match",
            "key_bits",
            "empirical_key_rate",
        )
        lines = [_comment_header("simulate", params, seed).rstrip("\n")]
        for key in sorted(summary):
            lines.append(f"# {key}: {summary[key]:.12g}" if isinstance(summary[key], float) else f"# {key}: {summary[key]}")
        lines.append(",".join(fields))
        for r in reports:
            cells = []
            for f in fields:
                v = r[f]
                cells.append(f"{v:.12g}" if isinstance(v, float) else str(int(v)))
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    _emit(text, out)


def _suite_theorem3(samples: int, rng: np.random.Generator) -> list[dict]:
    dev_first = 0.0
    dev_second = 0.0
    for _ in range(samples):
        p = random_bell_diagonal(rng)
        direct_first, direct_second = theorem3_direct(p)
        dev_first = max(dev_first, abs(rate_first_arg(p) - direct_first))
        dev_second = max(dev_second, abs(rate_second_arg(p) - direct_second))
    return [
        {"name": "first_argument_vs_oracle", "deviation": dev_first, "bound": 1e-9},
        {"name": "second_argument_vs_oracle", "deviation": dev_second, "bound": 1e-9},
    ]


def _suite_lemmas(samples: int, rng: np.random.Generator) -> list[dict]:
    worst = lemma_suite(samples, rng)
    return [{"name": name, "deviation": max(v, 0.0), "bound": 1e-9} for name, v in sorted(worst.items())]


def _suite_twirl(samples: int, rng: np.random.Generator) -> list[dict]:
    first_excess = 0.0
    second_excess = 0.0
    law_dev = 0.0
    for _ in range(samples):
        rec = worst_case_check(random_density(4, rng))
        first_excess = max(first_excess, rec.first_twirled - rec.first_original)
        second_excess = max(second_excess, rec.second_twirled - rec.second_original)
        law_dev = max(
            law_dev,
            abs(rec.w1_original(0) - rec.w1_twirled(0)),
            abs(rec.w2_original(0) - rec.w2_twirled(0)),
        )
    return [
        {"name": "first_bracket_twirl_excess", "deviation": max(first_excess, 0.0), "bound": 1e-9},
        {"name": "second_bracket_twirl_excess", "deviation": max(second_excess, 0.0), "bound": 1e-9},
        {"name": "block_law_invariance", "deviation": law_dev, "bound": 1e-12},
    ]


def _suite_coset(samples: int, rng: np.random.Generator) -> list[dict]:
    code = [(0, 0), (1, 1)]
    worst = 0.0
    for _ in range(samples):
        p = random_bell_diagonal(rng)
        for shift in ((0, 0), (0, 1), (1, 0), (1, 1)):
            worst = max(worst, coset_decomposition_check(p, code, shift))
    return [{"name": "coset_mixture_identity", "deviation": worst, "bound": 1e-10}]


def _suite_types(samples: int, rng: np.random.Generator) -> list[dict]:
    m, tol, e = 10_000, 0.02, 0.05
    channel = six_state_point(e)
    aborts = 0
    for _ in range(samples):
        x, y = sample_pair(channel, m, rng)
        if isinstance(parameter_estimation(x, y, e, tol), Abort):
            aborts += 1
    # tol on the scalar rate is an L1 radius of 2*tol on the binary type
    bound = type_deviation_bound(m, 2 * tol, 2)
    return [{"name": "abort_fraction_vs_type_bound", "deviation": aborts / samples, "bound": bound}]


def _suite_hash(samples: int, rng: np.random.Generator) -> list[dict]:
    """Two-universality over the full 10-bit domain.

    By linearity a pair (a, b) collides exactly when the hash of a XOR b is
    zero, so sweeping all nonzero differences covers every distinct pair.
    The slack covers the maximum of 1023 per-difference binomials, which
    concentrates at sqrt(2 ln 1023) standard deviations above the collision
    probability; two more keep the false-failure rate per run below 1e-3.
    """
    bits, ell = 10, 4
    seeds = rng.integers(0, 2, size=(samples, bits + ell - 1), dtype=np.uint8)
    # toeplitz[s, i, j] = seeds[s, i - j + bits - 1]
    i_idx = np.arange(ell)[:, None]
    j_idx = np.arange(bits)[None, :]
    toeplitz = seeds[:, i_idx - j_idx + bits - 1]
    worst = 0.0
    classes = 2**bits - 1
    z_max = (2.0 * np.log(classes)) ** 0.5 + 2.0
    sigma = (2.0**-ell * (1 - 2.0**-ell) / samples) ** 0.5
    convention_dev = 0.0
    for diff in range(1, 2**bits):
        d = np.array([(diff >> (bits - 1 - k)) & 1 for k in range(bits)], dtype=np.uint8)
        outputs = (toeplitz @ d) & 1
        collisions = float(np.mean(~outputs.any(axis=1)))
        worst = max(worst, collisions)
        if diff <= 8:
            expected = toeplitz_hash(seeds[diff % samples], d, ell)
            convention_dev = max(convention_dev, float(np.abs(outputs[diff % samples] - expected).max()))
    return [
        {"name": "max_collision_fraction", "deviation": worst, "bound": 2.0**-ell + z_max * sigma},
        {"name": "matrix_convention_vs_hash", "deviation": convention_dev, "bound": 0.0},
    ]


_SUITES = {
    "theorem3": _suite_theorem3,
    "lemmas": _suite_lemmas,
    "twirl": _suite_twirl,
    "coset": _suite_coset,
    "types": _suite_types,
    "hash": _suite_hash,
}


@main.command()
@click.option("--suite", type=click.Choice(sorted(_SUITES)), required=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Default: stdout.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=1, show_default=True)
def verify(suite, samples, fmt, out, seed):
    """Run a verification suite; nonzero exit when any bound is exceeded."""
    if samples < 1:
        raise click.UsageError("samples must be >= 1")
    checks = _SUITES[suite](samples, np.random.default_rng(seed))
    for check in checks:
        check["pass"] = bool(check["deviation"] <= check["bound"])
    passed = all(c["pass"] for c in checks)
    params = {"suite": suite, "samples": samples, "format": fmt}
    if fmt == "json":
        payload = _json_envelope("verify", params, seed)
        payload["checks"] = checks
        payload["passed"] = passed
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [_comment_header("verify", params, seed).rstrip("\n")]
        lines.append("name,deviation,bound,status")
        for c in checks:
            lines.append(f"{c['name']},{c['deviation']:.12g},{c['bound']:.12g},{'PASS' if c['pass'] else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    _emit(text, out)
    if not passed:
        sys.exit(_EXIT_VERIFY)
