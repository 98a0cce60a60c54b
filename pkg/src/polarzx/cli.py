"""Command-line entry point.

Exit status is 0 on success, 1 when the input is well formed but the
operation fails (bad circuit, malformed table, unsatisfiable request) and 2
for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bench import DEFAULT_SCHEDULE, benchmark, find_instance
from .bittable import CodecError, load_table, serialize, table_to_json
from .build import diagram_from_circuit
from .circuit import Circuit, CircuitError, parse_qasm
from .decompose import DecompositionError
from .diagram import DiagramError, ZXDiagram
from .kernel import AssignmentBatch, get_backend
from .phase import MissingParameterError
from .rewrite import RewriteError
from .simulate import MarginalSpec, SamplingError, WeakSampler, compile_diagram, marginal_doubling, marginal_summing, strong_amplitude

DOMAIN_ERRORS = (
    CircuitError,
    CodecError,
    DecompositionError,
    DiagramError,
    MissingParameterError,
    RewriteError,
    SamplingError,
    OSError,
    ValueError,
)


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def _read_circuit(path: str) -> Circuit:
    return parse_qasm(Path(path).read_text())


def _boundary_spec(text: str | None, n: int, prefix: str, default: str) -> list:
    """Per-wire plugs: ``0``/``1`` for basis states, ``p`` for a parameter
    named ``{prefix}{q}``.  A comma list may also give explicit names."""
    text = default * n if text is None else text
    tokens = text.split(",") if "," in text else list(text)
    if len(tokens) != n:
        raise CircuitError(f"expected {n} entries for the {prefix} wires, got {len(tokens)}")
    out = []
    for q, tok in enumerate(t.strip() for t in tokens):
        if tok in ("0", "1"):
            out.append(int(tok))
        elif tok == "p":
            out.append(f"{prefix}{q}")
        elif tok:
            out.append(tok)
        else:
            raise CircuitError(f"empty entry for {prefix} wire {q}")
    return out


def _bits(text: str, n: int, what: str) -> list[int]:
    if len(text) != n or set(text) - {"0", "1"}:
        raise CircuitError(f"{what} must be {n} characters of 0/1, got {text!r}")
    return [int(ch) for ch in text]


def _assignments(pairs: Sequence[str]) -> dict[str, int]:
    out = {}
    for item in pairs:
        name, sep, value = item.partition("=")
        if not sep or value not in ("0", "1"):
            raise CircuitError(f"parameter settings look like name=0 or name=1, got {item!r}")
        out[name] = int(value)
    return out


def _fixed(text: str | None) -> dict[int, int | str]:
    out: dict[int, int | str] = {}
    if not text:
        return out
    for item in text.split(","):
        q, sep, value = item.partition("=")
        if not sep or not q.strip().isdigit():
            raise CircuitError(f"fixed qubits look like 0=1,2=0, got {item!r}")
        value = value.strip()
        out[int(q)] = int(value) if value in ("0", "1") else value
    return out


def _backend(args):
    return get_backend(args.backend, args.chunk)


# -- subcommands -----------------------------------------------------------------


def cmd_compile(args) -> int:
    text = Path(args.source).read_text()
    if args.source.endswith(".json"):
        d = ZXDiagram.from_json(text)
    else:
        c = parse_qasm(text)
        ins = _boundary_spec(args.inputs, c.n_qubits, "in", "0")
        outs = _boundary_spec(args.outputs, c.n_qubits, "out", "p")
        d = diagram_from_circuit(c, ins, outs)
    trace = [] if args.trace else None
    compiled = compile_diagram(d, trace)
    if args.trace:
        with open(args.trace, "w") as fh:
            for event in trace:
                fh.write(json.dumps(event.to_dict()) + "\n")
    if args.format == "table-json":
        data = table_to_json(compiled.table).encode()
    else:
        data = serialize(compiled.expression, args.format)
    if args.output == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(args.output).write_bytes(data)
    s = compiled.stats
    print(
        f"terms={compiled.expression.m} n_max={compiled.table.n_max} params={','.join(compiled.params) or '-'} "
        f"leaves={s.leaves} pruned={s.pruned} seconds={compiled.seconds:.3f}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args) -> int:
    table = load_table(Path(args.table).read_bytes())
    n = table.num_params
    if args.all:
        batch = AssignmentBatch.exhaustive(n)
        labels = [format(w, f"0{n}b")[::-1] if n else "" for w in range(2**n)]
    else:
        labels = args.bits or [""]
        batch = AssignmentBatch.from_bitstrings(n, labels)
    for label, value in zip(labels, _backend(args).evaluate_batch(table, batch)):
        print(f"{label or '-'} {_format_complex(value.to_complex())}")
    return 0


def cmd_strong(args) -> int:
    c = _read_circuit(args.circuit)
    ins = _bits(args.inputs or "0" * c.n_qubits, c.n_qubits, "--inputs")
    outs = _bits(args.outputs, c.n_qubits, "--outputs")
    z = strong_amplitude(c, ins, outs, _assignments(args.set), _backend(args))
    print(f"amplitude {_format_complex(z)}")
    print(f"probability {abs(z) ** 2:.17g}")
    return 0


def cmd_marginal(args) -> int:
    c = _read_circuit(args.circuit)
    spec = MarginalSpec(c.n_qubits, _fixed(args.fix))
    params = _assignments(args.set)
    methods = ["summing", "doubling"] if args.method == "both" else [args.method]
    for method in methods:
        fn = marginal_summing if method == "summing" else marginal_doubling
        print(f"{method} {fn(c, spec, params, _backend(args)):.17g}")
    return 0


def cmd_sample(args) -> int:
    c = _read_circuit(args.circuit)
    sampler = WeakSampler(c, _assignments(args.set), _backend(args), literal=args.alg2_literal)
    lines = "\n".join(sampler.sample(args.N, args.seed)) + "\n"
    if args.output == "-":
        sys.stdout.write(lines)
    else:
        Path(args.output).write_text(lines)
    print(f"compilations={sampler.compilations}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    if args.circuit:
        c = _read_circuit(args.circuit)
    else:
        c, _ = find_instance(min_t=args.min_t, seed=args.seed)
    schedule = [int(x) for x in args.schedule.split(",")]
    report = benchmark(c, MarginalSpec(c.n_qubits, _fixed(args.fix)), schedule, args.baseline_samples, args.seed, _backend(args))
    if args.output:
        for path in report.write(args.output):
            print(f"wrote {path}", file=sys.stderr)
    sys.stdout.write(report.to_csv())
    print(
        f"t_count={report.t_count} terms={report.terms} S_inf={report.s_inf:.4g} "
        f"N_inflec={report.n_inflec:.4g} R2={report.r_squared:.4f} monotone={report.monotone} "
        f"values_match={report.values_match}",
        file=sys.stderr,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarzx", description="Parametric ZX-diagram simulation of Clifford+T circuits.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    backend = argparse.ArgumentParser(add_help=False)
    backend.add_argument("--backend", choices=["ref", "parallel"], default="parallel")
    backend.add_argument("--chunk", type=int, default=None, help="assignments per work unit")
    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--set", action="append", default=[], metavar="NAME=BIT", help="value of a circuit parameter")

    p = sub.add_parser("compile", help="reduce a circuit or diagram to a scalar table")
    p.add_argument("source", help="OpenQASM file, or a closed diagram as .json")
    p.add_argument("--inputs", help="input plugs, one of 0/1/p per qubit (default all 0)")
    p.add_argument("--outputs", help="output plugs, one of 0/1/p per qubit (default all p)")
    p.add_argument("-o", "--output", required=True, help="output path, or - for stdout")
    p.add_argument("--format", choices=["binary", "json", "table-json"], default="binary")
    p.add_argument("--trace", help="write the rewrite trace as JSON lines")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", parents=[backend], help="evaluate a compiled table")
    p.add_argument("table")
    p.add_argument("--bits", action="append", help="parameter values in table order, e.g. 0110")
    p.add_argument("--all", action="store_true", help="evaluate every assignment")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("strong", parents=[backend, params], help="amplitude <out|U|in>")
    p.add_argument("circuit")
    p.add_argument("--inputs", help="input bits (default all 0)")
    p.add_argument("--outputs", required=True, help="output bits")
    p.set_defaults(func=cmd_strong)

    p = sub.add_parser("marginal", parents=[backend, params], help="marginal probability of fixed outputs")
    p.add_argument("circuit")
    p.add_argument("--fix", default="", help="fixed qubits, e.g. 0=1,2=0")
    p.add_argument("--method", choices=["summing", "doubling", "both"], default="both")
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("sample", parents=[backend, params], help="draw measurement samples")
    p.add_argument("circuit")
    p.add_argument("-N", type=int, default=1, help="number of samples")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alg2-literal", action="store_true", help="compare draws with unnormalised prefix probabilities")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bench", parents=[backend], help="parametric vs non-parametric timing")
    p.add_argument("circuit", nargs="?", help="OpenQASM file (default: a generated instance)")
    p.add_argument("--fix", default="", help="fixed outputs; the others become parameters")
    p.add_argument("--schedule", default=",".join(map(str, DEFAULT_SCHEDULE)))
    p.add_argument("--baseline-samples", type=int, default=3)
    p.add_argument("--min-t", type=int, default=25, help="T-count floor for the generated instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="prefix for the .csv and .json reports")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"polarzx: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
