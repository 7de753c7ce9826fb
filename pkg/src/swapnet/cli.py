"""``swapnet`` command line: route, ansatz, vqe, benchmark, exact."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ansatz import build_cry_hea, build_excitation_ansatz, embed_swap_network
from .bench import BenchmarkSpec, cmd_benchmark, resolve_graph, summary_path
from .circuit import Circuit, metrics
from .hamiltonian import exact_ground_energy, gen_spin_glass, parse_pauli_file
from .router import AnnealConfig, SwapProtocol, optimize_network, replay
from .vqe import VqeConfig, run_vqe

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_route(args) -> int:
    g = resolve_graph(args.graph)
    cfg = AnnealConfig(
        k=args.k, steps=args.steps, t0=args.t0, alpha=args.alpha, p_add=args.p_add,
        restarts=args.restarts, seed=args.seed, max_blocks=args.max_blocks, exponent=args.exponent,
    )
    protocol = optimize_network(g, cfg)
    replay(g, protocol)
    _write(protocol.to_json(), args.output)
    if args.trace:
        lines = ["block,cost"] + [f"{i},{c}" for i, c in enumerate(protocol.cost_trace)]
        Path(args.trace).write_text("\n".join(lines) + "\n", encoding="utf-8")
    status = "complete" if protocol.complete else "partial"
    print(
        f"{status}: {len(protocol.blocks)} blocks, {protocol.total_layers} layers, "
        f"{protocol.total_swaps} swaps, cost {protocol.initial_cost} -> {protocol.cost_trace[-1] if protocol.cost_trace else protocol.initial_cost}",
        file=sys.stderr,
    )
    return EXIT_OK if protocol.complete else EXIT_PARTIAL


def _load_protocol(path: str) -> SwapProtocol:
    return SwapProtocol.from_json(Path(path).read_text(encoding="utf-8"))


def cmd_ansatz(args) -> int:
    g = resolve_graph(args.graph)
    fermionic = args.flavor == "fermionic"
    if args.protocol:
        c = embed_swap_network(
            g, _load_protocol(args.protocol), args.layers_per_slot, args.repetitions,
            args.flavor, args.reference,
        )
    elif fermionic:
        c = build_excitation_ansatz(g, args.layers, args.reference)
    else:
        c = build_cry_hea(g, args.layers)
    _write(c.to_json(), args.output)
    print(json.dumps(metrics(c).to_dict()), file=sys.stderr)
    return EXIT_OK


def cmd_vqe(args) -> int:
    c = Circuit.from_json(Path(args.circuit).read_text(encoding="utf-8"))
    if args.hamiltonian:
        hm = parse_pauli_file(args.hamiltonian)
    else:
        hm = gen_spin_glass(c.n_qubits, args.instance_seed)[1]
    cfg = VqeConfig(args.optimizer, args.max_iters, args.init_scale, args.seed, args.tol)
    res = run_vqe(c, hm, cfg)
    if hm.n_qubits <= 14:
        e0 = exact_ground_energy(hm)
        res.extra.update(exact_energy=e0, energy_error=res.best_energy - e0)
    _write(res.to_json(), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    spec = BenchmarkSpec.from_file(args.spec)
    if args.output:
        spec = BenchmarkSpec.from_dict({**json.loads(spec.to_json()), "output": args.output})
    rows, summary = cmd_benchmark(spec, args.workers)
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"{len(rows)} rows ({failed} failed) -> {spec.output}, summary -> {summary_path(spec.output)}", file=sys.stderr)
    for cmp in summary["comparisons"]:
        print(
            f"swapped x{cmp['repetitions']} ({cmp['swapped_cnot']} CNOT) median {cmp['swapped_median']:.4g}"
            f" vs plain L={cmp['plain_layers']} ({cmp['plain_cnot']} CNOT) median {cmp['plain_median']:.4g}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_exact(args) -> int:
    hm = parse_pauli_file(args.hamiltonian)
    print(repr(exact_ground_energy(hm)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swapnet", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("route", help="synthesise a swap network for a connectivity graph")
    r.add_argument("graph", help="graph file or preset (linear-N, ring-N, grid-RxC, heavyhex-7, ...)")
    r.add_argument("-k", type=int, default=2, help="swap layers per block")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--steps", type=int, default=None)
    r.add_argument("--t0", type=float, default=None)
    r.add_argument("--alpha", type=float, default=0.995)
    r.add_argument("--p-add", type=float, default=0.5)
    r.add_argument("--restarts", type=int, default=4)
    r.add_argument("--max-blocks", type=int, default=None)
    r.add_argument("--exponent", type=float, default=2)
    r.add_argument("-o", "--output", default=None, help="protocol JSON (default stdout)")
    r.add_argument("--trace", default=None, help="write the per-block cost trace as CSV")
    r.set_defaults(func=cmd_route)

    a = sub.add_parser("ansatz", help="build a circuit and report its metrics")
    a.add_argument("graph")
    a.add_argument("--flavor", choices=("qubit", "fermionic"), default="qubit")
    a.add_argument("--layers", type=int, default=1, help="entangling layers (no protocol)")
    a.add_argument("--protocol", default=None, help="embed this swap protocol")
    a.add_argument("--repetitions", type=int, default=1)
    a.add_argument("--layers-per-slot", type=int, default=1)
    a.add_argument("--reference", type=int, nargs="*", default=[], help="qubits flipped before the ansatz")
    a.add_argument("-o", "--output", default=None)
    a.set_defaults(func=cmd_ansatz)

    v = sub.add_parser("vqe", help="optimise a circuit against a Hamiltonian")
    v.add_argument("circuit", help="circuit JSON")
    src = v.add_mutually_exclusive_group()
    src.add_argument("--hamiltonian", default=None, help="Pauli file")
    src.add_argument("--instance-seed", type=int, default=0, help="random spin glass sized to the circuit")
    v.add_argument("--optimizer", choices=("simplex_free", "quasi_newton"), default="simplex_free")
    v.add_argument("--max-iters", type=int, default=10000)
    v.add_argument("--init-scale", type=float, default=1e-2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("-o", "--output", default=None)
    v.set_defaults(func=cmd_vqe)

    b = sub.add_parser("benchmark", help="run a benchmark spec (JSON)")
    b.add_argument("spec")
    b.add_argument("-o", "--output", default=None, help="override the CSV path")
    b.add_argument("--workers", type=int, default=None, help="overrides SWAPNET_WORKERS")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("exact", help="exact ground energy of a Pauli file")
    e.add_argument("hamiltonian")
    e.set_defaults(func=cmd_exact)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
