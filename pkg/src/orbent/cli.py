"""Command-line front end.

Single results are printed as JSON records with snake_case keys; parameter
scans are written as CSV whose float fields use ``repr`` so the files parse
back bit-exactly.  Exit codes: 0 on success, 2 on usage errors, 3 on
numerical failure (an uncertified minimization).  Scans honor the
ORBENT_THREADS environment variable; rows are always emitted in
deterministic order.  Orbital indices on this interface are 0-based.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import channels, entanglement, fcidump, interacting, tightbinding
from .fock import DensityMatrix, pure_state_dm

USAGE_ERROR, NUMERICAL_ERROR = 2, 3


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ORBENT_THREADS", "1")))
    except ValueError:
        return 1


def _emit_json(record, out=None):
    text = json.dumps(record, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _matrix_json(mat):
    return {"real": np.real(mat).tolist(), "imag": np.imag(mat).tolist()}


def _matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        return np.asarray(obj["real"], dtype=float) + 1j * np.asarray(
            obj.get("imag", np.zeros_like(obj["real"])), dtype=float)
    return np.asarray(obj, dtype=complex)


def _log_base_value(result_value: float, base: str) -> float:
    return result_value / entanglement.LN2 if base == "2" else result_value


# ---------------------------------------------------------------------------
# subcommands


def cmd_tb(args) -> int:
    try:
        query = tightbinding.TbQuery(eta=args.eta, d=args.d, n_sites=args.finite_l)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    closed = tightbinding.tb_entanglement(query)
    record = {
        "model": "tightbinding",
        "eta": args.eta,
        "d": args.d,
        "n_sites": args.finite_l,
        "ssr": args.ssr,
        "log_base": args.log_base,
        "w": closed.w,
        "a": closed.a,
        "b": closed.b,
        "r": closed.r,
        "t": closed.t,
        "provenance": closed.provenance,
    }
    if args.ssr == "n":
        record.update(value=_log_base_value(closed.e_nssr, args.log_base),
                      entangled=closed.entangled, method="closed-form")
    else:
        from .freefermion import two_orbital_state_from_block
        dm, _ = two_orbital_state_from_block(args.eta, args.eta, closed.w)
        res = entanglement.pssr_entanglement(dm, tol=args.ree_tol,
                                             max_iters=args.ree_max_iters)
        record.update(value=_log_base_value(res.value, args.log_base),
                      method=res.method, gap=res.gap, iterations=res.iterations,
                      converged=res.converged)
        if not res.converged:
            _emit_json(record)
            print("error: minimization did not certify the requested gap",
                  file=sys.stderr)
            return NUMERICAL_ERROR
    _emit_json(record)
    return 0


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def cmd_tb_scan(args) -> int:
    try:
        d_list = [int(tok) for tok in args.d_list.split(",") if tok]
    except ValueError:
        print("error: --d-list must be comma-separated integers", file=sys.stderr)
        return USAGE_ERROR
    points = args.points if args.points is not None else \
        (2001 if args.scale == "linear" else 200)
    try:
        rows = tightbinding.scan_entanglement(d_list, args.eta_min, args.eta_max,
                                      points, args.scale)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    header = ["eta", "d", "E_nssr"]
    table = [[row["eta"], row["d"], row["E_nssr"]] for row in rows]
    if args.pssr:
        header.append("E_pssr")
        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            pssr = list(pool.map(
                lambda row: tightbinding.pssr_point(row["eta"], row["d"],
                                                    tol=args.ree_tol,
                                                    max_iters=args.ree_max_iters),
                rows))
        for line, value in zip(table, pssr):
            line.append(value)
    _write_csv(args.out, header, table)
    return 0


def cmd_dmin_scan(args) -> int:
    try:
        rows = tightbinding.scan_dmin(args.eta_min, args.eta_max, args.points,
                                      args.scale)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    _write_csv(args.out, ["eta", "dmin_exact", "dmin_asymptotic"],
               [[row["eta"], row["dmin_exact"], row["dmin_asymptotic"]] for row in rows])
    return 0


def cmd_swap_demo(args) -> int:
    if args.state is None:
        # one party swapping |+> x |+> between a spinless mode and a qubit
        plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
        rho = pure_state_dm(np.kron(plus, plus), (2, 2))
        out = channels.superselected_swap(rho, orbital=0, qubit=1)
        erased = float(np.linalg.norm(rho.mat - channels.gpi_local(rho, (0,)).mat))
        _emit_json({
            "mode": "single-superselected-swap",
            "input": _matrix_json(rho.mat),
            "output": _matrix_json(out.mat),
            "erased_coherence_norm": erased,
        }, args.out)
        return 0
    try:
        with open(args.state) as fh:
            payload = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read state file: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        rho_mat = _matrix_from_json(payload["rho"])
        dims = {4: (2, 2), 16: (4, 4)}.get(rho_mat.shape[0])
        if dims is None:
            raise ValueError("rho must be 4x4 (spinless modes) or 16x16 (spinful)")
        rho = DensityMatrix(rho_mat, dims)
        if "sigma" in payload:
            sigma = DensityMatrix(_matrix_from_json(payload["sigma"]), dims)
        else:
            ground = np.zeros(rho.dim)
            ground[0] = 1.0
            sigma = pure_state_dm(ground, dims)
    except (KeyError, ValueError) as exc:
        print(f"error: invalid state file: {exc}", file=sys.stderr)
        return USAGE_ERROR
    result = channels.run_swap_protocol(rho, sigma)
    gn = channels.gn_local(rho)
    _emit_json({
        "mode": "protocol",
        "rho_in": _matrix_json(rho.mat),
        "sigma_in": _matrix_json(sigma.mat),
        "qubit_out": _matrix_json(result.qubit_state.mat),
        "orbital_out": _matrix_json(result.orbital_state.mat),
        "erased_orbital_coherence": result.erased_orbital_coherence,
        "erased_qubit_coherence": result.erased_qubit_coherence,
        "erased_number_coherence": float(np.linalg.norm(rho.mat - gn.mat)),
        "simulation_residual": result.simulation_residual,
    }, args.out)
    return 0


def cmd_ed(args) -> int:
    if (args.fcidump is None) == (args.hubbard is None):
        print("error: give exactly one of --fcidump or --hubbard", file=sys.stderr)
        return USAGE_ERROR
    if (args.orbitals is None) == (not args.all_pairs):
        print("error: give exactly one of --orbitals or --all-pairs", file=sys.stderr)
        return USAGE_ERROR
    if args.fcidump is not None:
        try:
            data = fcidump.read_fcidump(args.fcidump)
        except OSError as exc:
            print(f"error: cannot read FCIDUMP: {exc}", file=sys.stderr)
            return USAGE_ERROR
        except fcidump.FcidumpError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return USAGE_ERROR
        model = {"model": "fcidump", "source": args.fcidump, "norb": data.norb}
    else:
        try:
            l_str, u_str = args.hubbard.split(",")
            params = interacting.HubbardParams(int(l_str), float(u_str))
        except ValueError:
            print("error: --hubbard expects 'L,U'", file=sys.stderr)
            return USAGE_ERROR
        data = params.integrals()
        model = {"model": "hubbard", "n_sites": params.n_sites, "u": params.u,
                 "hopping": params.hopping}
    n_elec = args.nelec if args.nelec is not None else data.nelec
    ms2 = args.ms2 if args.ms2 is not None else (data.ms2 if args.fcidump else n_elec % 2)
    try:
        op = interacting.build_hamiltonian(data, n_elec, ms2)
        gs = interacting.ground_state(op)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR if isinstance(exc, ValueError) else NUMERICAL_ERROR

    if args.all_pairs:
        pairs = [(0, lp) for lp in range(1, data.norb)]
    else:
        try:
            l_str, lp_str = args.orbitals.split(",")
            pairs = [(int(l_str), int(lp_str))]
        except ValueError:
            print("error: --orbitals expects 'i,j' (0-based)", file=sys.stderr)
            return USAGE_ERROR

    ssr = args.ssr.upper()

    def solve(pair):
        l, lp = pair
        kwargs = {"tol": args.ree_tol, "max_iters": args.ree_max_iters} \
            if ssr == "P" else {}
        return interacting.orbital_pair_entanglement(gs.state, l, lp, ssr=ssr,
                                                     **kwargs)
    try:
        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            results = list(pool.map(solve, pairs))
    except (ValueError, entanglement.SymmetryViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    lines = []
    failed = False
    for (l, lp), res in zip(pairs, results):
        d = abs(l - lp)
        if model["model"] == "hubbard" and params.periodic:
            d = min(d, params.n_sites - d)
        record = dict(model)
        record.update(n_elec=n_elec, ms2=ms2, energy=gs.energy,
                      degenerate_ground=gs.degenerate, l=l, lp=lp, d=d,
                      ssr=args.ssr, log_base=args.log_base,
                      value=_log_base_value(res.value, args.log_base),
                      method=res.method)
        if res.method == "numeric-ree":
            record.update(gap=res.gap, iterations=res.iterations,
                          converged=res.converged)
            failed |= not res.converged
        lines.append(json.dumps(record, sort_keys=True))
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if failed:
        print("error: minimization did not certify the requested gap", file=sys.stderr)
        return NUMERICAL_ERROR
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_ree_flags(parser):
    parser.add_argument("--ree-tol", type=float, default=1e-7,
                        help="duality-gap tolerance of the minimization")
    parser.add_argument("--ree-max-iters", type=int, default=5000,
                        help="outer iteration cap of the minimization")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbent",
        description="Superselection-constrained entanglement between localized "
                    "fermionic orbitals")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tb = sub.add_parser("tb", help="one tight-binding orbital pair")
    p_tb.add_argument("--eta", type=float, required=True, help="filling fraction")
    p_tb.add_argument("--d", type=int, required=True, help="orbital separation")
    p_tb.add_argument("--finite-L", dest="finite_l", type=int, default=None,
                      help="evaluate on a finite ring of this many sites")
    p_tb.add_argument("--ssr", choices=("n", "p"), default="n")
    p_tb.add_argument("--log-base", choices=("e", "2"), default="e")
    _add_ree_flags(p_tb)
    p_tb.set_defaults(func=cmd_tb)

    p_scan = sub.add_parser("tb-scan", help="entanglement-vs-filling CSV table")
    p_scan.add_argument("--d-list", default="1,2,10,100")
    p_scan.add_argument("--eta-min", type=float, default=1e-4)
    p_scan.add_argument("--eta-max", type=float, default=1 - 1e-4)
    p_scan.add_argument("--points", type=int, default=None,
                        help="grid size (default 2001 linear, 200 log)")
    p_scan.add_argument("--scale", choices=("linear", "log"), default="linear")
    p_scan.add_argument("--pssr", action="store_true",
                        help="add the numerically minimized parity column")
    p_scan.add_argument("--out", required=True)
    _add_ree_flags(p_scan)
    p_scan.set_defaults(func=cmd_tb_scan)

    p_dmin = sub.add_parser("dmin-scan", help="disentangling-distance CSV table")
    p_dmin.add_argument("--eta-min", type=float, default=1e-3)
    p_dmin.add_argument("--eta-max", type=float, default=0.5)
    p_dmin.add_argument("--points", type=int, default=60)
    p_dmin.add_argument("--scale", choices=("linear", "log"), default="log")
    p_dmin.add_argument("--out", required=True)
    p_dmin.set_defaults(func=cmd_dmin_scan)

    p_swap = sub.add_parser("swap-demo", help="superselected swap walkthrough")
    p_swap.add_argument("--state", default=None,
                        help="JSON file with 'rho' (and optional 'sigma') matrices")
    p_swap.add_argument("--out", default=None)
    p_swap.set_defaults(func=cmd_swap_demo)

    p_ed = sub.add_parser("ed", help="exact diagonalization orbital-pair records")
    p_ed.add_argument("--fcidump", default=None, help="FCIDUMP integrals file")
    p_ed.add_argument("--hubbard", default=None, help="ring parameters 'L,U'")
    p_ed.add_argument("--nelec", type=int, default=None)
    p_ed.add_argument("--ms2", type=int, default=None)
    p_ed.add_argument("--orbitals", default=None, help="pair 'i,j', 0-based")
    p_ed.add_argument("--all-pairs", action="store_true",
                      help="orbital 0 against every other orbital")
    p_ed.add_argument("--ssr", choices=("n", "p"), default="n")
    p_ed.add_argument("--log-base", choices=("e", "2"), default="e")
    p_ed.add_argument("--out", default=None)
    _add_ree_flags(p_ed)
    p_ed.set_defaults(func=cmd_ed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    return args.func(args)


def entry_point() -> None:
    sys.exit(main())
