"""Command-line entry points: ``invariants``, ``check``, ``factorize``, ``random``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .equivalence import (
    DEFAULT_GAUGE_BUDGET,
    EQUIVALENT_VERDICTS,
    TripartiteDecision,
    Verdict,
    bridge_split,
    decide_equivalence,
)
from .fileio import (
    DECISION_SCHEMA,
    FACTORIZE_SCHEMA,
    INVARIANTS_SCHEMA,
    StateFormatError,
    load_matrix,
    load_state,
    matrix_pairs,
    report_to_json,
    serialize_matrix,
    serialize_state,
)
from .invariants import nested_invariant, power_sum_invariants, singular_spectrum
from .realign import is_unitarily_decomposable
from .states import Cut, apply_local_unitaries, random_state, random_unitary
from .tolerances import Tolerances

EXIT_EQUIVALENT = 0
EXIT_INVARIANTS_DIFFER = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_EXIT_FOR_VERDICT = {
    Verdict.EQUIVALENT_D1: EXIT_EQUIVALENT,
    Verdict.EQUIVALENT_D2: EXIT_EQUIVALENT,
    Verdict.EQUIVALENT_D3: EXIT_EQUIVALENT,
    Verdict.INVARIANTS_DIFFER: EXIT_INVARIANTS_DIFFER,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

_CUT_LABEL = {Cut.A: "A|BC", Cut.B: "B|AC", Cut.C: "C|AB"}
_CUT_LETTER = {Cut.A: "I", Cut.B: "J", Cut.C: "K"}
_CUT_FOR_DIGIT = {"1": Cut.A, "2": Cut.B, "3": Cut.C}


class UsageError(Exception):
    """Bad command usage detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tolerances(args) -> Tolerances:
    return Tolerances(
        spectra=args.spec_tol,
        reconstruction=args.tol,
        rank_one=args.rank1_tol,
    )


def _parse_order(text: str, dims: tuple[int, int, int]) -> tuple[Cut, ...]:
    if text == "auto":
        # Smallest bridge space first: cheapest factorization attempts early.
        return tuple(
            sorted(Cut, key=lambda cut: np.prod(bridge_split(cut, dims)))
        )
    tokens = [t.strip() for t in text.split(",")]
    if sorted(tokens) != ["1", "2", "3"]:
        raise UsageError(f"--order must be a permutation of 1,2,3 or 'auto', got {text!r}")
    return tuple(_CUT_FOR_DIGIT[t] for t in tokens)


def _tolerance_dict(tols: Tolerances) -> dict:
    return {
        "norm": tols.norm,
        "unitarity": tols.unitarity,
        "spectra": tols.spectra,
        "reconstruction": tols.reconstruction,
        "rank_one": tols.rank_one,
        "invariant": tols.invariant,
    }


# ---------------------------------------------------------------- invariants


def _cmd_invariants(args) -> int:
    state = load_state(args.state, strict=args.strict)
    lines = [f"dims: {state.dims[0]} {state.dims[1]} {state.dims[2]}"]
    report = {
        "schema": INVARIANTS_SCHEMA,
        "input": str(args.state),
        "dims": list(state.dims),
        "power_sums": {},
        "spectra": {},
    }
    for cut in Cut:
        inv = power_sum_invariants(state, cut)
        spectrum = singular_spectrum(state, cut)
        report["power_sums"][cut.value] = list(inv.values)
        report["spectra"][cut.value] = [float(s) for s in spectrum]
        rendered = " ".join(format(v, ".12g") for v in inv.values)
        lines.append(f"{_CUT_LETTER[cut]} (cut {_CUT_LABEL[cut]}): {rendered}")
    if args.nested is not None:
        outer, inner, alpha, beta = args.nested
        value = nested_invariant(state, outer, inner, alpha, beta)
        report["nested"] = {
            "outer": outer,
            "inner": inner,
            "alpha": alpha,
            "beta": beta,
            "value": value,
        }
        lines.append(
            f"nested(outer={outer}, inner={inner}, alpha={alpha}, beta={beta}): "
            f"{value:.12g}"
        )
    if args.json:
        sys.stdout.write(report_to_json(report))
    else:
        print("\n".join(lines))
    return 0


# --------------------------------------------------------------------- check


def _decision_report(
    decision: TripartiteDecision,
    state,
    other,
    tols: Tolerances,
    elapsed: float,
    inputs: tuple[str, str],
) -> dict:
    report = {
        "schema": DECISION_SCHEMA,
        "inputs": list(inputs),
        "dims": list(state.dims),
        "verdict": decision.verdict.value,
        "power_sums": {
            "first": {},
            "second": {},
        },
        "bridge_defects": {
            attempt.cut.value: attempt.defect for attempt in decision.attempts
        },
        "residual": decision.residual,
        "tolerances": _tolerance_dict(tols),
        "elapsed_seconds": elapsed,
        "certificate": None,
        "bridge": None,
        "witness": None,
    }
    for cut in Cut:
        report["power_sums"]["first"][cut.value] = list(
            power_sum_invariants(state, cut).values
        )
        report["power_sums"]["second"][cut.value] = list(
            power_sum_invariants(other, cut).values
        )
    if decision.local_factors is not None:
        u1, u2, u3 = decision.local_factors
        report["certificate"] = {
            "u1": matrix_pairs(u1),
            "u2": matrix_pairs(u2),
            "u3": matrix_pairs(u3),
            "residual": decision.residual,
        }
    if decision.bridge is not None:
        report["bridge"] = {
            "cut": decision.bridge.cut.value,
            "row_unitary": matrix_pairs(decision.bridge.u),
            "column_unitary": matrix_pairs(decision.bridge.v),
            "defect": decision.bridge.defect,
        }
    if decision.witness is not None:
        report["witness"] = {
            "cut": decision.witness.cut.value,
            "index": decision.witness.index,
            "left": decision.witness.left,
            "right": decision.witness.right,
        }
    return report


def _decision_text(decision: TripartiteDecision, inputs: tuple[str, str]) -> str:
    lines = [f"{inputs[0]} vs {inputs[1]}: {decision.verdict.value}"]
    if decision.verdict in EQUIVALENT_VERDICTS:
        lines.append(
            f"  residual: {decision.residual:.3e}"
            f"   bridge defect: {decision.bridge.defect:.3e}"
            f" (cut {decision.bridge.cut.value})"
        )
    elif decision.verdict is Verdict.INVARIANTS_DIFFER:
        w = decision.witness
        lines.append(
            f"  witness: cut {w.cut.value} spectrum index {w.index}: "
            f"{w.left:.12g} vs {w.right:.12g}"
        )
    elif decision.bridge is not None:
        lines.append(
            f"  best bridge defect: {decision.bridge.defect:.3e}"
            f" (cut {decision.bridge.cut.value})"
        )
    return "\n".join(lines)


def _run_pair(pair, args, tols) -> tuple[str, dict, int]:
    first_path, second_path = pair
    state = load_state(first_path, strict=args.strict)
    other = load_state(second_path, strict=args.strict)
    order = _parse_order(args.order, state.dims)
    start = time.perf_counter()
    decision = decide_equivalence(
        state,
        other,
        tols=tols,
        order=order,
        gauge_budget=args.gauge_iters,
        seed=args.seed,
    )
    elapsed = time.perf_counter() - start
    report = _decision_report(
        decision, state, other, tols, elapsed, (str(first_path), str(second_path))
    )
    text = _decision_text(decision, (str(first_path), str(second_path)))
    return text, report, _EXIT_FOR_VERDICT[decision.verdict]


def _cmd_check(args) -> int:
    paths = args.states
    if len(paths) < 2 or len(paths) % 2 != 0:
        raise UsageError("check expects an even number of state paths (pairs)")
    pairs = [(paths[i], paths[i + 1]) for i in range(0, len(paths), 2)]
    tols = _tolerances(args)

    if args.jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda p: _run_pair(p, args, tols), pairs))
    else:
        results = [_run_pair(pair, args, tols) for pair in pairs]

    if args.json:
        reports = [report for _, report, _ in results]
        if len(reports) == 1:
            sys.stdout.write(report_to_json(reports[0]))
        else:
            sys.stdout.write(json.dumps(reports, indent=2, sort_keys=True) + "\n")
    else:
        for text, _, _ in results:
            print(text)
    return max(code for _, _, code in results)


# ----------------------------------------------------------------- factorize


def _cmd_factorize(args) -> int:
    matrix = load_matrix(args.matrix)
    m, n = args.m, args.n
    if matrix.shape != (m * n, m * n):
        print(
            f"error: matrix has shape {matrix.shape}, expected ({m * n}, {m * n})",
            file=sys.stderr,
        )
        return EXIT_DATA
    try:
        f = is_unitarily_decomposable(matrix, m, n, rank1_tol=args.rank1_tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    u1, u2 = f.unitary_factors()
    residual = float(np.linalg.norm(matrix - f.product()))
    if args.json:
        report = {
            "schema": FACTORIZE_SCHEMA,
            "input": str(args.matrix),
            "split": [m, n],
            "decomposable": f.decomposable,
            "defect": f.defect,
            "scale": f.scale,
            "reconstruction_residual": residual,
            "unitary_left": matrix_pairs(u1),
            "unitary_right": matrix_pairs(u2),
        }
        sys.stdout.write(report_to_json(report))
    else:
        print(f"decomposable: {'yes' if f.decomposable else 'no'}")
        print(f"defect (sigma2/sigma1 of realignment): {f.defect:.6e}")
        if f.decomposable:
            print(f"scale: {f.scale:.12g}")
            print(f"reconstruction residual: {residual:.3e}")
            with np.printoptions(precision=9, suppress=True, linewidth=120):
                print(f"left factor ({m}x{m}):\n{u1}")
                print(f"right factor ({n}x{n}):\n{u2}")
    return 0 if f.decomposable else 1


# -------------------------------------------------------------------- random


def _cmd_random(args) -> int:
    k, m, n = args.dims
    if min(args.dims) < 1:
        raise UsageError("--dims components must be positive")
    out_dir = args.out
    written = []
    for idx in range(args.count):
        seq = np.random.SeedSequence(entropy=args.seed, spawn_key=(idx,))
        state_seed, u1_seed, u2_seed, u3_seed = seq.spawn(4)
        state = random_state((k, m, n), state_seed)
        base = f"{out_dir}/random-{k}x{m}x{n}-seed{args.seed}-{idx:03d}"
        path = f"{base}.state"
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(serialize_state(state, label=f"random seed={args.seed} idx={idx}"))
        written.append(path)
        if args.lu_pair:
            u1 = random_unitary(k, u1_seed)
            u2 = random_unitary(m, u2_seed)
            u3 = random_unitary(n, u3_seed)
            partner = apply_local_unitaries(state, u1, u2, u3)
            partner_path = f"{base}-lu.state"
            with open(partner_path, "w", encoding="utf-8") as handle:
                handle.write(
                    serialize_state(partner, label=f"lu partner seed={args.seed} idx={idx}")
                )
            written.append(partner_path)
            for name, mat in (("u1", u1), ("u2", u2), ("u3", u3)):
                mat_path = f"{base}-{name}.mat"
                with open(mat_path, "w", encoding="utf-8") as handle:
                    handle.write(serialize_matrix(mat, label=name))
                written.append(mat_path)
    for path in written:
        print(path)
    return 0


# --------------------------------------------------------------------- wiring


def build_parser() -> _Parser:
    parser = _Parser(
        prog="triequiv",
        description=(
            "Decide local-unitary equivalence of pure tripartite quantum states."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inv = sub.add_parser("invariants", help="print power-sum invariants of a state")
    p_inv.add_argument("state", help="state file")
    p_inv.add_argument(
        "--nested",
        nargs=4,
        type=int,
        metavar=("OUTER", "INNER", "ALPHA", "BETA"),
        help="also print one nested trace invariant",
    )
    p_inv.add_argument("--strict", action="store_true", help="reject off-norm input")
    p_inv.add_argument("--json", action="store_true", help="emit a JSON report")
    p_inv.set_defaults(func=_cmd_invariants)

    p_check = sub.add_parser("check", help="decide equivalence of state pairs")
    p_check.add_argument("states", nargs="+", help="state files, taken in pairs")
    p_check.add_argument("--tol", type=float, default=1e-9, help="residual tolerance")
    p_check.add_argument(
        "--spec-tol", type=float, default=1e-9, help="spectrum equality tolerance"
    )
    p_check.add_argument(
        "--rank1-tol", type=float, default=1e-8, help="realignment defect threshold"
    )
    p_check.add_argument(
        "--gauge-iters",
        type=int,
        default=DEFAULT_GAUGE_BUDGET,
        help="gauge search iteration budget (0 disables)",
    )
    p_check.add_argument(
        "--order",
        default="1,2,3",
        help="cut order: permutation of 1,2,3 or 'auto' (smallest bridge first)",
    )
    p_check.add_argument("--strict", action="store_true", help="reject off-norm input")
    p_check.add_argument("--json", action="store_true", help="emit JSON reports")
    p_check.add_argument("--seed", type=int, default=0, help="gauge search seed")
    p_check.add_argument(
        "--jobs", type=int, default=1, help="check pairs concurrently"
    )
    p_check.set_defaults(func=_cmd_check)

    p_fac = sub.add_parser(
        "factorize", help="test a unitary for Kronecker decomposability"
    )
    p_fac.add_argument("matrix", help="matrix file")
    p_fac.add_argument("-m", type=int, required=True, help="left factor dimension")
    p_fac.add_argument("-n", type=int, required=True, help="right factor dimension")
    p_fac.add_argument(
        "--rank1-tol", type=float, default=1e-8, help="realignment defect threshold"
    )
    p_fac.add_argument("--json", action="store_true", help="emit a JSON report")
    p_fac.set_defaults(func=_cmd_factorize)

    p_rand = sub.add_parser("random", help="emit seeded random states")
    p_rand.add_argument(
        "--dims", nargs=3, type=int, required=True, metavar=("K", "M", "N")
    )
    p_rand.add_argument("--seed", type=int, default=0)
    p_rand.add_argument("--count", type=int, default=1)
    p_rand.add_argument(
        "--lu-pair",
        action="store_true",
        help="also emit a locally rotated partner and the generating unitaries",
    )
    p_rand.add_argument("--out", default=".", help="output directory")
    p_rand.set_defaults(func=_cmd_random)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StateFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def cli_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    cli_main()
