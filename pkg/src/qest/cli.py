"""``qest`` command-line interface.

Exit codes: 0 success, 1 I/O, parse or usage error, 2 model-domain error,
3 verification failure.  Numbers are printed with 17 significant digits.
"""
import os
import sys

import click

from . import gridstate, io, oracle
from .bound import cmi_for_model
from .exceptions import ModelError, WrongBranchError
from .measurement import achieved_value, classical_fisher, inequality_slack, optimal_measurement_for_weight
from .mixed import cstar
from .statmodel import fisher_pair
from .tolerances import DEFAULT_SEED

EXIT_OK, EXIT_IO, EXIT_MODEL, EXIT_VERIFY = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code, message=None):
        super().__init__(message)
        self.code = code
        self.message = message


def _default_seed():
    raw = os.environ.get("QEST_SEED")
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        raise _Exit(EXIT_IO, f"QEST_SEED must be an integer, got {raw!r}") from None


def _default_jobs():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _float_list(text, name):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise _Exit(EXIT_IO, f"{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise _Exit(EXIT_IO, f"{name}: empty list")
    return vals


def _load(path):
    try:
        return io.load_model(path)
    except io.FileFormatError as exc:
        raise _Exit(EXIT_IO, str(exc)) from None
    except ModelError as exc:
        raise _Exit(EXIT_MODEL, f"{path}: {exc}") from None


def _load_pure(path):
    pure, _ = _load(path)
    if pure is None:
        raise _Exit(EXIT_MODEL, f"{path}: no pure model (psi0/dpsi); use mixed-bound")
    return pure


def _emit(doc):
    click.echo(io.dumps(doc))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Most informative Cramer-Rao bounds for two-parameter pure-state models."""


@cli.command()
@click.argument("model", type=click.Path(dir_okay=False))
def bound(model):
    """Print the bound for MODEL as JSON."""
    m = _load_pure(model)
    try:
        res = cmi_for_model(m)
    except ModelError as exc:
        raise _Exit(EXIT_MODEL, str(exc)) from None
    _emit({
        "c_mi": res.value,
        "c_sld": res.c_sld,
        "beta": res.beta,
        "eta": res.eta,
        "phi_star": res.phi_star,
        "s1": res.s[0],
        "s2": res.s[1],
        "branch": res.branch,
    })


@cli.command()
@click.argument("model", type=click.Path(dir_okay=False))
@click.option("--phi", type=float, default=None, help="Boundary angle override in [-eta, eta].")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the POVM here; otherwise it is included in the printed JSON.")
def measure(model, phi, out):
    """Construct the optimal measurement for MODEL and report what it achieves."""
    m = _load_pure(model)
    try:
        povm, res = optimal_measurement_for_weight(m, phi)
    except (ModelError, WrongBranchError) as exc:
        raise _Exit(EXIT_MODEL, str(exc)) from None
    except ValueError as exc:
        raise _Exit(EXIT_IO, str(exc)) from None
    cf = classical_fisher(povm, m)
    doc = {
        "achieved": achieved_value(povm, m),
        "c_mi": res.value,
        "phi": res.phi_star if phi is None else phi,
        "slack": inequality_slack(cf, fisher_pair(m).beta),
        "outcomes": len(povm),
    }
    if out is None:
        doc["povm"] = io.povm_to_json(povm)
    else:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(io.povm_to_json(povm), indent=1) + "\n")
        except OSError as exc:
            raise _Exit(EXIT_IO, f"{out}: {exc.strerror or exc}") from None
        doc["povm_file"] = out
    _emit(doc)


@cli.command()
@click.argument("model", type=click.Path(dir_okay=False))
@click.argument("povm", type=click.Path(dir_okay=False))
def fisher(model, povm):
    """Evaluate POVM on MODEL: Fisher matrix, tr[W F^-1] and inequality slack."""
    m = _load_pure(model)
    try:
        p = io.load_povm(povm)
    except io.FileFormatError as exc:
        raise _Exit(EXIT_IO, str(exc)) from None
    if p.dim != m.dim:
        raise _Exit(EXIT_MODEL, f"POVM acts on dimension {p.dim}, model has {m.dim}")
    cf = classical_fisher(p, m)
    _emit({
        "achieved": achieved_value(p, m),
        "F": cf.F,
        "slack": inequality_slack(cf, fisher_pair(m).beta),
        "valid": p.is_valid(),
    })


@cli.command()
@click.option("--samples", type=click.IntRange(min=0), default=10_000, show_default=True)
@click.option("--seed", type=str, default=None, help="Fuzz seed; defaults to $QEST_SEED or 0xC0FFEE.")
@click.option("--dims", type=str, default="2,3,4,5", show_default=True)
@click.option("--quartic-samples", type=click.IntRange(min=0), default=1000, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker processes (default: all CPUs).")
@click.option("--inject-violation", is_flag=True,
              help="Negative control: inflate every Fisher matrix by 50%, which must fail.")
def verify(samples, seed, dims, quartic_samples, jobs, inject_violation):
    """Fuzz the Fisher-information and regret inequalities; print a TSV report."""
    if seed is None:
        seed = _default_seed()
    else:
        try:
            seed = int(seed, 0)
        except ValueError:
            raise _Exit(EXIT_IO, f"--seed must be an integer, got {seed!r}") from None
    try:
        dim_list = [int(x) for x in dims.split(",") if x.strip()]
    except ValueError:
        raise _Exit(EXIT_IO, f"--dims: expected comma-separated integers, got {dims!r}") from None
    if not dim_list or min(dim_list) < 2:
        raise _Exit(EXIT_IO, "--dims: dimensions must be integers >= 2")
    jobs = jobs or _default_jobs()
    reports = oracle.run_fuzz(samples, dim_list, seed, jobs, perturb=1.5 if inject_violation else 1.0)
    reports.append(oracle.quartic_agreement(quartic_samples, seed))
    click.echo("name\tmax_violation\tsamples\tpassed")
    for r in reports:
        click.echo(r.tsv())
    if not all(r.passed for r in reports):
        raise _Exit(EXIT_VERIFY)


@cli.command("grid-sweep")
@click.option("--deltas", type=str, default=None, help="Comma-separated squeezing values (default 0.60..0.15).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV path (default: stdout).")
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker processes (default: all CPUs).")
def grid_sweep(deltas, out, jobs):
    """Grid-state displacement sensing: J, beta and both bounds per squeezing value."""
    ds = gridstate.DEFAULT_DELTAS if deltas is None else _float_list(deltas, "--deltas")
    try:
        rows = gridstate.sweep(ds, jobs=jobs or _default_jobs())
    except ValueError as exc:
        raise _Exit(EXIT_MODEL, str(exc)) from None
    dicts = [r.as_dict() for r in rows]
    if out is None:
        io.write_csv(sys.stdout, gridstate.CSV_FIELDS, dicts)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            io.write_csv(fh, gridstate.CSV_FIELDS, dicts)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"{out}: {exc.strerror or exc}") from None


@cli.command("mixed-bound")
@click.argument("model", type=click.Path(dir_okay=False))
def mixed_bound(model):
    """Lower bound for a mixed-state MODEL (a pure file is read as |psi><psi|)."""
    pure, mixed = _load(model)
    try:
        if mixed is None:
            mixed = io.pure_to_mixed(pure)
        res = cstar(mixed)
    except ModelError as exc:
        raise _Exit(EXIT_MODEL, f"{type(exc).__name__}: {exc}") from None
    _emit({"c_star": res.value, "beta": res.beta, "attainable": False})


def main(argv=None):
    """Run the CLI and return its exit code instead of raising ``SystemExit``."""
    try:
        cli.main(args=argv, prog_name="qest", standalone_mode=False)
    except _Exit as exc:
        if exc.message:
            click.echo(f"qest: {exc.message}", err=True)
        return exc.code
    except click.exceptions.Abort:
        click.echo("qest: aborted", err=True)
        return EXIT_IO
    except click.ClickException as exc:
        # usage errors map to 1 so that 2 keeps meaning "model error"
        exc.show()
        return EXIT_IO
    except click.exceptions.Exit as exc:
        return exc.exit_code
    return EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
