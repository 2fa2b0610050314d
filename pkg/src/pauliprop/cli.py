"""Command-line front end.

Examples::

    pauliprop --circuit example.circ --thetas=-0.8,1.0471975511965976,0.3 --observable ZI
    pauliprop --builder rectangle --rows 3 --cols 3 --tilted --layers 10 --dt 0.05 \\
        --hx 1.05 --hz 0.5 --observable Z5 --mode sweep --out sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time
from typing import Optional, Sequence

import numpy as np

from .analysis import ErrorLedger, MCConfig, mc_mse_estimate, pauli_purity_and_ose
from .circuits import bricklayer_topology, ising_angles, rectangle_topology, tfi_trotter_circuit
from .gates import (CLIFFORD_UNITARIES, AmplitudeDamping, CliffordGate, PauliNoise, PauliRotation,
                    ProjectorZero, TGate, TransferMapGate)
from .oracle import OracleGuardError
from .overlaps import ProductStabilizerState, overlap
from .pauli_bits import encode, from_symbols
from .pauli_sum import PauliSum, TruncationConfig, norms
from .propagation import Circuit, propagate, propagate_tracked
from .surrogate import SurrogateGraph, compile_surrogate, evaluate_surrogate

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_GUARD, EXIT_RESOURCE = 0, 1, 2, 3, 4


class CircuitParseError(ValueError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")


class UsageError(ValueError):
    """Malformed command-line input (observable, state, angles...)."""


# --------------------------------------------------------------------------
# circuit files

_ROT = {"RX": "X", "RY": "Y", "RZ": "Z", "RXX": "XX", "RYY": "YY", "RZZ": "ZZ"}
_KEYS = {"theta", "p", "px", "py", "pz", "gamma", "file"}


def parse_circuit_text(text: str, path: str = "<string>", base_dir: str = ".") -> Circuit:
    """Parse the line-oriented circuit format (gates in Schrödinger order)."""
    circ = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        op = toks[0].upper()
        args, kw = [], {}
        for t in toks[1:]:
            if "=" in t:
                k, _, v = t.partition("=")
                if k not in _KEYS or not v:
                    raise CircuitParseError(path, lineno, f"malformed key=value {t!r}")
                kw[k] = v
            else:
                args.append(t)
        try:
            if op == "NQ":
                if circ is not None:
                    raise ValueError("NQ given twice")
                if len(args) != 1:
                    raise ValueError("NQ takes one integer")
                circ = Circuit(int(args[0]))
                continue
            if circ is None:
                raise ValueError("NQ must come before any gate")
            gate = _make_gate(op, args, kw, base_dir)
            circ.append(gate)
        except CircuitParseError:
            raise
        except (ValueError, KeyError, IndexError, OSError) as e:
            raise CircuitParseError(path, lineno, str(e)) from None
    if circ is None:
        raise CircuitParseError(path, 0, "missing NQ line")
    return circ


def _floats(kw, *names):
    try:
        return [float(kw[k]) for k in names]
    except KeyError as e:
        raise ValueError(f"missing {e.args[0]}=") from None


def _make_gate(op, args, kw, base_dir):
    theta = float(kw["theta"]) if "theta" in kw else None
    if op in _ROT or op == "R":
        if op == "R":
            paulis, args = args[0].upper(), args[1:]
        else:
            paulis = _ROT[op]
        sites = [int(a) for a in args]
        if len(sites) != len(paulis):
            raise ValueError(f"{op} needs {len(paulis)} sites")
        return PauliRotation(paulis, sites, theta)
    sites = [int(a) for a in args]
    if op in CLIFFORD_UNITARIES:
        return CliffordGate(op, sites)
    if op == "T":
        (site,) = sites
        return TGate(site)
    if op == "DEPOL":
        return PauliNoise("depolarizing", sites, *_floats(kw, "p"))
    if op == "DEPH":
        return PauliNoise("dephasing", sites, *_floats(kw, "p"))
    if op == "PAULI":
        return PauliNoise("pauli", sites, _floats(kw, "px", "py", "pz"))
    if op == "AMPDAMP":
        (site,) = sites
        return AmplitudeDamping(site, *_floats(kw, "gamma"))
    if op == "PROJ0":
        (site,) = sites
        return ProjectorZero(site)
    if op == "TMAP":
        if "file" not in kw:
            raise ValueError("TMAP needs file=")
        return TransferMapGate.from_file(sites, os.path.join(base_dir, kw["file"]))
    raise ValueError(f"unknown mnemonic {op!r}")


def parse_circuit_file(path) -> Circuit:
    with open(path) as fh:
        text = fh.read()
    return parse_circuit_text(text, str(path), os.path.dirname(os.path.abspath(path)))


# --------------------------------------------------------------------------
# observables, states, angles

_SPARSE = re.compile(r"([IXYZ])(\d+)", re.I)


def parse_observable(spec: str, n: int) -> PauliSum:
    """Full symbol string (``"ZIZ"``), sparse form (``"Z5 X7"``) or a Pauli-sum file."""
    if os.path.isfile(spec):
        return read_sum_file(spec, n)
    s = spec.strip()
    if re.fullmatch(r"[IXYZ]+", s, re.I):
        w, m = from_symbols(s)
        if m != n:
            raise UsageError(f"observable {s!r} has {m} sites, circuit has {n}")
        return PauliSum(n, {w: 1.0})
    toks = re.split(r"[\s,*]+", s)
    pairs = []
    for t in toks:
        m = _SPARSE.fullmatch(t)
        if not m:
            raise UsageError(f"cannot parse observable {spec!r}")
        pairs.append((int(m.group(2)), m.group(1).upper()))
    try:
        return PauliSum(n, {encode(n, pairs): 1.0})
    except (IndexError, ValueError) as e:
        raise UsageError(f"observable {spec!r}: {e}") from None


def read_sum_file(path, n: Optional[int] = None) -> PauliSum:
    with open(path) as fh:
        text = fh.read()
    s = PauliSum.from_json(text) if text.lstrip().startswith("{") else PauliSum.from_text(text)
    if n is not None and s.nqubits != n:
        raise UsageError(f"{path}: sum has {s.nqubits} qubits, circuit has {n}")
    return s


def parse_state(spec: str, n: int):
    """``zero``, ``plus``, a bitstring, ``stab:+Z-X...``, a stabilizer file or a Pauli-sum file."""
    if spec in ("zero", "plus"):
        return spec
    if re.fullmatch(r"[01]+", spec):
        if len(spec) != n:
            raise UsageError(f"bitstring has {len(spec)} bits, circuit has {n}")
        return spec
    if spec.startswith("stab:"):
        st = ProductStabilizerState.from_string(spec[5:])
    elif os.path.isfile(spec):
        with open(spec) as fh:
            text = fh.read().strip()
        if re.fullmatch(r"[+\-XYZxyz\s]+", text):
            st = ProductStabilizerState.from_string(text)
        else:
            return read_sum_file(spec, n)
    else:
        raise UsageError(f"cannot parse state {spec!r}")
    if st.nqubits != n:
        raise UsageError(f"state has {st.nqubits} qubits, circuit has {n}")
    return st


def _parse_floats(text: str) -> list[float]:
    return [float(t) for t in re.split(r"[\s,]+", text.strip()) if t]


def resolve_thetas(args, circ: Circuit) -> list[list[float]]:
    """One or more parameter vectors from the angle flags."""
    n = circ.nparams
    if args.thetas is not None:
        vecs = [_parse_floats(args.thetas)]
    elif args.theta_file is not None:
        with open(args.theta_file) as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.startswith("#")]
        vecs = [_parse_floats(ln) for ln in lines]
        if len(vecs) > 1 and all(len(v) == 1 for v in vecs) and len(vecs) == n:
            vecs = [[v[0] for v in vecs]]
    elif args.angle is not None:
        vecs = [[args.angle] * n]
    elif args.dt is not None:
        vecs = [ising_angles(circ, args.dt, args.J, args.hx, args.hz)]
    else:
        vecs = [[]]
    for v in vecs:
        if len(v) != n:
            raise UsageError(f"circuit has {n} parameter slots, got {len(v)} angles")
    return vecs


def build_circuit(args) -> Circuit:
    if (args.circuit is None) == (args.builder is None):
        raise UsageError("give exactly one of --circuit and --builder")
    if args.circuit is not None:
        circ = parse_circuit_file(args.circuit)
        if args.nqubits is not None and args.nqubits != circ.nqubits:
            raise UsageError(f"--nqubits {args.nqubits} disagrees with the file's NQ {circ.nqubits}")
        return circ
    if args.builder == "bricklayer":
        if args.nqubits is None:
            raise UsageError("bricklayer builder needs --nqubits")
        n = args.nqubits
        topo = bricklayer_topology(n, args.periodic)
    else:
        if args.rows is None or args.cols is None:
            raise UsageError("rectangle builder needs --rows and --cols")
        n = args.rows * args.cols
        topo = rectangle_topology(args.rows, args.cols, args.periodic)
    return tfi_trotter_circuit(topo, n, args.layers, args.tilted)


def truncation_from_args(args, structural: bool = False) -> TruncationConfig:
    tau = 0.0 if structural and args.min_abs_coeff is None else (
        1e-10 if args.min_abs_coeff is None else args.min_abs_coeff)
    return TruncationConfig(min_abs_coeff=tau, max_weight=args.max_weight, max_freq=args.max_freq,
                            max_sins=args.max_sins, max_pathweight=args.max_pathweight)


def threshold_ladder(text: Optional[str]) -> list[float]:
    """``"a,b,c"`` or a geometric ladder ``"2^-10:2^-18"`` (powers of the base)."""
    if text is None:
        text = "2^-10:2^-18"
    m = re.fullmatch(r"\s*(\d+(?:\.\d*)?)\^(-?\d+)\s*:\s*\1\^(-?\d+)\s*", text)
    if m:
        base, lo, hi = float(m.group(1)), int(m.group(2)), int(m.group(3))
        step = 1 if hi >= lo else -1
        return [base ** e for e in range(lo, hi + step, step)]
    return _parse_floats(text)


# --------------------------------------------------------------------------
# modes


def _report_lines(expectation, psum, rep, seconds) -> list[str]:
    l1, l2sq, nterms = norms(psum)
    return [
        f"expectation {expectation:.17g}",
        f"nterms {nterms}",
        f"peak_nterms {rep.peak_nterms}",
        f"l1 {l1:.17g}",
        f"l2sq {l2sq:.17g}",
        f"delta_l1 {rep.cumulative_l1:.17g}",
        f"discarded_l2sq {rep.cumulative_l2sq:.17g}",
        f"seconds {seconds:.6f}",
    ]


def _mode_propagate(args, circ, out, tracked=False):
    obs = parse_observable(args.observable, circ.nqubits)
    state = parse_state(args.state, circ.nqubits)
    (th,) = resolve_thetas(args, circ)[:1]
    cfg = truncation_from_args(args)
    t0 = time.perf_counter()
    psum, rep = (propagate_tracked if tracked else propagate)(circ, obs, th, cfg)
    val = overlap(psum, state)
    lines = _report_lines(val, psum, rep, time.perf_counter() - t0)
    if args.mode == "analyze":
        if len(psum):
            p2, ose, l1n = pauli_purity_and_ose(psum)
            lines += [f"purity {p2:.17g}", f"ose {ose:.17g}", f"normalized_l1 {l1n:.17g}"]
        ledger = ErrorLedger.from_report(rep)
        lines.append(f"l2_bound {ledger.l2_bound:.17g}")
        lines.append(rep.to_text(per_gate=True).rstrip("\n"))
    out.write("\n".join(lines) + "\n")
    if args.dump_sum:
        with open(args.dump_sum, "w") as fh:
            fh.write(PauliSum(psum.nqubits, psum.values()).to_text())


def _mode_surrogate_compile(args, circ, out):
    if not args.surrogate:
        raise UsageError("surrogate-compile needs --surrogate PATH")
    obs = parse_observable(args.observable, circ.nqubits)
    state = parse_state(args.state, circ.nqubits)
    if isinstance(state, PauliSum):
        raise UsageError("surrogates support stabilizer product states only")
    g = compile_surrogate(circ, obs, truncation_from_args(args, structural=True), state)
    g.save(args.surrogate)
    out.write(f"nodes {g.nnodes}\nedges {g.nedges}\nnparams {g.nparams}\n"
              f"surviving_terms {g.metadata['surviving_terms']}\n")


def _mode_surrogate_eval(args, out):
    if not args.surrogate:
        raise UsageError("surrogate-eval needs --surrogate PATH")
    g = SurrogateGraph.load(args.surrogate)
    if args.thetas is not None:
        vecs = [_parse_floats(args.thetas)]
    elif args.theta_file is not None:
        with open(args.theta_file) as fh:
            vecs = [_parse_floats(ln) for ln in fh if ln.strip() and not ln.startswith("#")]
    elif args.angle is not None:
        vecs = [[args.angle] * g.nparams]
    else:
        vecs = [[]]
    vals = evaluate_surrogate(g, np.array(vecs, dtype=float).reshape(len(vecs), -1))
    for v in np.atleast_1d(vals):
        out.write(f"{v:.17g}\n")


def _mode_sweep(args, circ, out):
    obs = parse_observable(args.observable, circ.nqubits)
    state = parse_state(args.state, circ.nqubits)
    (th,) = resolve_thetas(args, circ)[:1]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["threshold", "expectation", "nterms", "delta_l1", "seconds"])
    for tau in threshold_ladder(args.thresholds):
        cfg = TruncationConfig(min_abs_coeff=tau, max_weight=args.max_weight)
        t0 = time.perf_counter()
        psum, rep = propagate(circ, obs, th, cfg)
        val = overlap(psum, state)
        w.writerow([f"{tau:.17g}", f"{val:.17g}", len(psum), f"{rep.cumulative_l1:.17g}",
                    f"{time.perf_counter() - t0:.6f}"])


def _mode_mc(args, circ, out):
    obs = parse_observable(args.observable, circ.nqubits)
    if len(obs) != 1:
        raise UsageError("mc-error needs a single Pauli string observable")
    (word,) = obs.terms
    state = parse_state(args.state, circ.nqubits)
    if isinstance(state, PauliSum):
        raise UsageError("mc-error supports stabilizer product states only")
    cfg = MCConfig(nsamples=args.samples, seed=args.seed,
                   truncation=truncation_from_args(args, structural=True), state=state)
    mse, se = mc_mse_estimate(circ, word, cfg)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["samples", "seed", "mse", "stderr"])
    w.writerow([args.samples, args.seed, f"{mse:.17g}", f"{se:.17g}"])


MODES = ("propagate", "tracked", "surrogate-compile", "surrogate-eval", "sweep", "mc-error", "analyze")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pauliprop", description="Heisenberg-picture Pauli propagation.")
    src = p.add_argument_group("circuit")
    src.add_argument("--circuit", help="circuit file")
    src.add_argument("--builder", choices=["bricklayer", "rectangle"], help="Ising Trotter circuit builder")
    src.add_argument("--nqubits", type=int)
    src.add_argument("--rows", type=int)
    src.add_argument("--cols", type=int)
    src.add_argument("--layers", type=int, default=1)
    src.add_argument("--periodic", action="store_true")
    src.add_argument("--tilted", action="store_true", help="add an RZ layer to every Trotter step")
    ang = p.add_argument_group("angles")
    ang.add_argument("--thetas", help="comma separated angles, one per free slot")
    ang.add_argument("--theta-file", help="file with one parameter vector per line")
    ang.add_argument("--angle", type=float, help="one shared angle for every slot")
    ang.add_argument("--dt", type=float, help="Ising time step; angles are 2*coef*dt")
    ang.add_argument("--J", type=float, default=1.0)
    ang.add_argument("--hx", type=float, default=1.0)
    ang.add_argument("--hz", type=float, default=0.0)
    p.add_argument("--observable", default=None, help="e.g. ZIZ, 'Z5 X7' or a Pauli-sum file")
    p.add_argument("--state", default="zero", help="zero, plus, bitstring, stab:+Z-X..., or a file")
    tr = p.add_argument_group("truncation")
    tr.add_argument("--min-abs-coeff", type=float, default=None, help="default 1e-10")
    tr.add_argument("--max-weight", type=int)
    tr.add_argument("--max-freq", type=int)
    tr.add_argument("--max-sins", type=int)
    tr.add_argument("--max-pathweight", type=int)
    p.add_argument("--mode", choices=MODES, default="propagate")
    p.add_argument("--thresholds", help="sweep ladder, e.g. 2^-10:2^-18 or 1e-3,1e-4")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--surrogate", help="surrogate graph file")
    p.add_argument("--out", help="write the report or CSV here instead of stdout")
    p.add_argument("--dump-sum", help="write the propagated sum here")
    return p


def run(args) -> int:
    buf = io.StringIO()
    if args.mode == "surrogate-eval":
        _mode_surrogate_eval(args, buf)
    else:
        if args.observable is None:
            raise UsageError("--observable is required")
        circ = build_circuit(args)
        if args.mode in ("propagate", "analyze"):
            _mode_propagate(args, circ, buf)
        elif args.mode == "tracked":
            _mode_propagate(args, circ, buf, tracked=True)
        elif args.mode == "surrogate-compile":
            _mode_surrogate_compile(args, circ, buf)
        elif args.mode == "sweep":
            _mode_sweep(args, circ, buf)
        elif args.mode == "mc-error":
            _mode_mc(args, circ, buf)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (CircuitParseError, UsageError, json.JSONDecodeError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (OracleGuardError, OverflowError) as e:
        print(f"guard exceeded: {e}", file=sys.stderr)
        return EXIT_GUARD
    except MemoryError as e:
        print(f"out of memory: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
