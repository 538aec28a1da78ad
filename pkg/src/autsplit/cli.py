"""Command-line front end.

JSON (or CSV) results on stdout, logs on stderr.  Exit codes: 0 for any
computed verdict (including Unknown), 2 for invalid input, 3 for budget
exhaustion, 4 for a failed verification (a bug signal), 5 when a section is
requested for a group whose classifier verdict is not Splits.  Every flag
can also be set through an AUTSPLIT_-prefixed environment variable; flags
win.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from . import oracle as _oracle
from .cache import CertificateCache
from .errors import (
    BudgetExceeded,
    NotSplitBlock,
    OracleBudgetExceeded,
    RankTooSmall,
    SpecError,
    VerificationFailed,
)
from .groups import (
    DEFAULT_DELTA_BUDGET,
    DEFAULT_ELEMENT_BUDGET,
    PGroupSpec,
    delta_order,
    pi_order,
    spec_from_json,
    spec_to_json,
    validate_spec,
)
from .splitting import build_verified_section, classify

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_VERIFY_FAILED = 4
EXIT_NOT_SPLIT = 5


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True))


def _parse_blocks(blocks: tuple[str, ...]):
    out = []
    for b in blocks:
        try:
            n, r = b.split(":")
            out.append((int(n), int(r)))
        except ValueError as exc:
            raise SpecError(f"bad block {b!r}, expected n:r") from exc
    return out


def _spec_from_options(p, blocks, spec_file) -> PGroupSpec:
    if spec_file is not None:
        with open(spec_file) as fh:
            return spec_from_json(json.load(fh))
    if p is None or not blocks:
        raise SpecError("provide -p and -b n:r, or --spec-file")
    return validate_spec(p, _parse_blocks(blocks))


def _fail_invalid(exc) -> None:
    click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(EXIT_INVALID)


@click.group()
def main() -> None:
    """Splitting decisions for the automorphism group of a finite abelian p-group."""


def _spec_options(f):
    f = click.option("--spec-file", type=click.Path(exists=True),
                     default=None, help="Spec JSON file.")(f)
    f = click.option("-b", "--block", "blocks", multiple=True,
                     help="Block as n:r, repeatable, increasing n.")(f)
    f = click.option("-p", "prime", type=int, default=None,
                     help="The prime p.")(f)
    return f


@main.command("classify")
@_spec_options
def cmd_classify(prime, blocks, spec_file) -> None:
    """Print the splitting verdict for a group."""
    try:
        spec = _spec_from_options(prime, blocks, spec_file)
    except (SpecError, json.JSONDecodeError) as exc:
        _fail_invalid(exc)
    _echo_json(classify(spec).to_json())


@main.command("section")
@_spec_options
@click.option("--verify-mode", default="auto",
              type=click.Choice(["auto", "full-table", "generator-relations",
                                 "sampled"]))
@click.option("--cache-dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--budget-assignments", type=int,
              default=_oracle.DEFAULT_ASSIGNMENT_BUDGET)
@click.option("-o", "--output", type=click.Path(), default=None,
              help="Also write the certificate JSON to this file.")
def cmd_section(prime, blocks, spec_file, verify_mode, cache_dir, seed,
                budget_assignments, output) -> None:
    """Construct and verify an explicit section; print the certificate."""
    try:
        spec = _spec_from_options(prime, blocks, spec_file)
    except (SpecError, json.JSONDecodeError) as exc:
        _fail_invalid(exc)
    verdict = classify(spec)
    if verdict.outcome != "Splits":
        click.echo(f"classifier verdict is {verdict.outcome}; no section",
                   err=True)
        sys.exit(EXIT_NOT_SPLIT)
    cache = CertificateCache(cache_dir) if cache_dir else None
    try:
        cert, report = build_verified_section(
            spec, mode=verify_mode, seed=seed,
            oracle_budget=budget_assignments, cache=cache)
    except (BudgetExceeded, OracleBudgetExceeded) as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    except VerificationFailed as exc:
        click.echo(f"verification failed (bug signal): {exc}", err=True)
        sys.exit(EXIT_VERIFY_FAILED)
    except NotSplitBlock as exc:
        click.echo(f"no section: {exc}", err=True)
        sys.exit(EXIT_NOT_SPLIT)
    payload = cert.to_json()
    if cache is not None:
        cache.store_spec(cert)
    if output:
        with open(output, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
    _echo_json(payload)
    click.echo(
        f"verified: mode={report.mode} pairs={report.pairs_checked}", err=True)


@main.group("oracle")
def cmd_oracle() -> None:
    """Brute-force ground-truth checks."""


@cmd_oracle.command("bijective-equiv")
@_spec_options
@click.option("--samples", type=int, default=10_000)
@click.option("--seed", type=int, default=0)
@click.option("--budget-elems", type=int, default=DEFAULT_ELEMENT_BUDGET)
def cmd_bijective_equiv(prime, blocks, spec_file, samples, seed,
                        budget_elems) -> None:
    """Compare the unit criterion against brute-force bijectivity."""
    try:
        spec = _spec_from_options(prime, blocks, spec_file)
    except (SpecError, json.JSONDecodeError) as exc:
        _fail_invalid(exc)
    try:
        report = _oracle.bijective_equivalence_report(
            spec, samples=samples, seed=seed, element_budget=budget_elems)
    except BudgetExceeded as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    _echo_json(report.to_json())
    sys.exit(EXIT_OK if report.disagreements == 0 else EXIT_VERIFY_FAILED)


@cmd_oracle.command("delta-count")
@_spec_options
@click.option("--budget-elems", type=int, default=DEFAULT_DELTA_BUDGET)
def cmd_delta_count(prime, blocks, spec_file, budget_elems) -> None:
    """Check the kernel-size formula against direct enumeration."""
    try:
        spec = _spec_from_options(prime, blocks, spec_file)
    except (SpecError, json.JSONDecodeError) as exc:
        _fail_invalid(exc)
    formula = delta_order(spec)
    try:
        enumerated = sum(1 for _ in _oracle.enumerate_delta(
            spec, budget=budget_elems))
    except BudgetExceeded as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    _echo_json({"spec": spec_to_json(spec), "formula": formula,
                "enumerated": enumerated, "agree": formula == enumerated})


@cmd_oracle.command("obstruction")
@_spec_options
@click.option("--budget-elems", type=int, default=DEFAULT_DELTA_BUDGET)
def cmd_obstruction(prime, blocks, spec_file, budget_elems) -> None:
    """Scan the transvection-lift coset for an order-p element."""
    try:
        spec = _spec_from_options(prime, blocks, spec_file)
    except (SpecError, json.JSONDecodeError) as exc:
        _fail_invalid(exc)
    try:
        report = _oracle.order_p_coset_obstruction(spec, budget=budget_elems)
    except RankTooSmall as exc:
        _fail_invalid(exc)
    except BudgetExceeded as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    _echo_json(report.to_json())


@cmd_oracle.command("complement-search")
@_spec_options
@click.option("--seed", type=int, default=0)
@click.option("--budget-assignments", type=int,
              default=_oracle.DEFAULT_ASSIGNMENT_BUDGET)
@click.option("--budget-elems", type=int, default=DEFAULT_DELTA_BUDGET)
@click.option("--pre-obstruction/--no-pre-obstruction", default=True,
              help="Run the cheap coset obstruction before searching.")
def cmd_complement_search(prime, blocks, spec_file, seed, budget_assignments,
                          budget_elems, pre_obstruction) -> None:
    """Exhaustive generator-lift search deciding splitting directly."""
    try:
        spec = _spec_from_options(prime, blocks, spec_file)
    except (SpecError, json.JSONDecodeError) as exc:
        _fail_invalid(exc)
    try:
        result = _oracle.complement_lift_search(
            spec, seed=seed, assignment_budget=budget_assignments,
            delta_budget=budget_elems, pre_obstruction=pre_obstruction)
    except BudgetExceeded as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        sys.exit(EXIT_BUDGET)
    _echo_json(result.to_json())
    sys.exit(EXIT_BUDGET if result.outcome == "BudgetExceeded" else EXIT_OK)


# --- batch sweeps ---

def _oracle_cross_check(spec: PGroupSpec, outcome: str, seed: int,
                        budget_assignments: int, budget_elems: int):
    """(oracle_verdict, agreement) for one spec; agreement None = classifier-only."""
    if outcome == "Splits":
        if pi_order(spec) > 5000:
            return None, None
        try:
            build_verified_section(
                spec, mode="auto", seed=seed,
                oracle_budget=budget_assignments, full_table_limit=256)
            return "SectionVerified", True
        except (BudgetExceeded, OracleBudgetExceeded):
            return None, None
        except (VerificationFailed, NotSplitBlock):
            return "SectionFailed", False
    if outcome == "DoesNotSplit":
        if spec.ranks[0] >= 2 and delta_order(spec) <= budget_elems:
            report = _oracle.order_p_coset_obstruction(spec,
                                                       budget=budget_elems)
            if report.verdict == "NoOrderPLift":
                return "NoOrderPLift", True
            return "OrderPLiftExists", None
        return None, None
    # Unknown region: record search data; there is no verdict to agree with
    try:
        result = _oracle.complement_lift_search(
            spec, seed=seed, assignment_budget=min(budget_assignments, 2 ** 14),
            delta_budget=budget_elems)
    except BudgetExceeded:
        return None, None
    if result.outcome == "BudgetExceeded":
        return None, None
    return result.outcome, None


def _batch_row(line: str, lineno: int, with_oracle: bool, seed: int,
               budget_assignments: int, budget_elems: int) -> dict:
    try:
        spec = spec_from_json(json.loads(line))
    except (SpecError, json.JSONDecodeError, TypeError) as exc:
        return {"line": lineno, "error": f"{type(exc).__name__}: {exc}"}
    verdict = classify(spec)
    row = {
        "line": lineno,
        "spec": spec_to_json(spec),
        "outcome": verdict.outcome,
        "rule": verdict.rule,
        "oracle": None,
        "agreement": None,
    }
    if with_oracle:
        oracle_verdict, agreement = _oracle_cross_check(
            spec, verdict.outcome, seed, budget_assignments, budget_elems)
        row["oracle"] = oracle_verdict
        row["agreement"] = agreement
        if oracle_verdict is None or agreement is None:
            row["note"] = "classifier-only"
    return row


@main.command("batch")
@click.argument("input_file", type=click.Path(exists=True))
@click.option("--with-oracle", is_flag=True, default=False)
@click.option("--seed", type=int, default=0)
@click.option("--budget-assignments", type=int, default=2 ** 16)
@click.option("--budget-elems", type=int, default=DEFAULT_DELTA_BUDGET)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json")
@click.option("--continue", "continue_on_error", is_flag=True, default=False,
              help="Keep going past malformed lines (still exits 2).")
@click.option("--workers", type=int, default=1,
              help="Process rows in parallel; output stays in input order.")
def cmd_batch(input_file, with_oracle, seed, budget_assignments, budget_elems,
              fmt, continue_on_error, workers) -> None:
    """One verdict row per spec line of a JSONL file."""
    with open(input_file) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]

    def work(args):
        lineno, line = args
        return _batch_row(line, lineno, with_oracle, seed,
                          budget_assignments, budget_elems)

    jobs = list(enumerate(lines, start=1))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                _batch_row, lines, range(1, len(lines) + 1),
                [with_oracle] * len(lines), [seed] * len(lines),
                [budget_assignments] * len(lines),
                [budget_elems] * len(lines)))
    else:
        rows = [work(j) for j in jobs]

    had_error = False
    disagreement = False
    for row in rows:
        if "error" in row:
            had_error = True
            click.echo(f"line {row['line']}: {row['error']}", err=True)
            if not continue_on_error:
                sys.exit(EXIT_INVALID)
        elif row.get("agreement") is False:
            disagreement = True

    if fmt == "json":
        for row in rows:
            _echo_json(row)
    else:
        cols = ["line", "spec", "outcome", "rule", "oracle", "agreement",
                "note", "error"]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            flat = dict(row)
            if "spec" in flat:
                flat["spec"] = json.dumps(flat["spec"], sort_keys=True)
            writer.writerow(flat)
        click.echo(buf.getvalue(), nl=False)

    if had_error:
        sys.exit(EXIT_INVALID)
    if disagreement:
        sys.exit(1)


# --- cache management ---

@main.group("cache")
@click.option("--cache-dir", type=click.Path(), required=True)
@click.pass_context
def cmd_cache(ctx, cache_dir) -> None:
    """Inspect or clear the certificate cache."""
    ctx.obj = CertificateCache(cache_dir)


@cmd_cache.command("list")
@click.pass_obj
def cmd_cache_list(cache: CertificateCache) -> None:
    for path in cache.entries():
        click.echo(path.name)


@cmd_cache.command("verify")
@click.pass_obj
def cmd_cache_verify(cache: CertificateCache) -> None:
    bad = 0
    for name, ok, detail in cache.verify_all():
        click.echo(f"{name}: {'ok' if ok else 'FAILED'} ({detail})")
        bad += 0 if ok else 1
    if bad:
        sys.exit(EXIT_VERIFY_FAILED)


@cmd_cache.command("clear")
@click.pass_obj
def cmd_cache_clear(cache: CertificateCache) -> None:
    click.echo(f"removed {cache.clear()} certificates")


def run() -> None:
    main(auto_envvar_prefix="AUTSPLIT")


if __name__ == "__main__":
    run()
