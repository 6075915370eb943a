"""``cvloop`` command-line interface.

Exit codes:
    0 success; 1 verification failed; 2 parse or usage error, or an
    unsupported input; 3 non-symplectic input; 4 insufficient ancillas;
    5 compiled program failed validation; 6 execution error;
    7 non-Gaussian program given to ``verify``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import jsonschema
import numpy as np

from . import fock
from . import gaussian as g
from .circuit import CircuitError, CircuitFile, compile_circuit, parse_input_state
from .compiler import ConstraintViolationError, InsufficientAncillaError
from .decomp import DecompositionError, bloch_messiah, euler_single_mode
from .gaussian import IDEAL, SymplecticOp
from .machine import ExecutionError
from .program import ControlProgram, ProgramError, SingularFeedforwardError
from .schemas import check
from .sim import NoiseConfig, UnsupportedProgramError, noise_budget, run, verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_NON_SYMPLECTIC = 3
EXIT_ANCILLAS = 4
EXIT_VALIDATION = 5
EXIT_EXECUTION = 6
EXIT_NON_GAUSSIAN = 7

log = logging.getLogger("cvloop")


class CLIError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: invalid JSON: {exc}") from None


def _emit(doc, out=None):
    text = json.dumps(doc, indent=2, sort_keys=True, default=_jsonable)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _report(command, config, metrics, passed, artifacts=None):
    return {
        "format": "cvloop-report/1",
        "command": command,
        "config": config,
        "metrics": metrics,
        "pass": passed,
        "artifacts": artifacts or {},
    }


def _load_program(path):
    data = _load_json(path)
    try:
        check(data)
        return ControlProgram.from_dict(data)
    except (jsonschema.ValidationError, ProgramError, KeyError, TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"{path}: not a valid program: {exc}") from None


def _load_target(path):
    """SymplecticOp from a matrix file or a Gaussian circuit file."""
    data = _load_json(path)
    if isinstance(data, dict) and data.get("format") == "cvloop-circuit/1":
        try:
            return CircuitFile.from_dict(data).circuit.symplectic()
        except CircuitError as exc:
            raise CLIError(EXIT_PARSE, f"{path}: {exc}") from None
    try:
        check(data)
    except jsonschema.ValidationError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: not a matrix file: {exc.message}") from None
    matrix = data if isinstance(data, list) else data["matrix"]
    disp = None if isinstance(data, list) else data.get("displacement")
    try:
        op = SymplecticOp(np.asarray(matrix, float), disp)
    except (ValueError, g.GaussianError) as exc:
        raise CLIError(EXIT_PARSE, f"{path}: {exc}") from None
    if not g.is_symplectic(op.matrix, tol=1e-8):
        raise CLIError(EXIT_NON_SYMPLECTIC, f"{path}: matrix is not symplectic (error {g.symplectic_error(op.matrix):.3e})")
    return op


def _ancilla_db(text):
    if text is None:
        return None
    if text.lower() == IDEAL:
        return IDEAL
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'ideal', got {text!r}") from None


def _noise(args):
    """Flags override the config file, which overrides defaults."""
    data = _load_json(args.noise) if getattr(args, "noise", None) else {}
    if getattr(args, "ancilla_db", None) is not None:
        data["ancilla_db"] = args.ancilla_db
    if getattr(args, "loop_loss", None) is not None:
        data["eta_in"] = 1.0 - args.loop_loss
    try:
        return NoiseConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"bad noise configuration: {exc}") from None


# --- subcommands ------------------------------------------------------------------------


def cmd_decompose(args):
    op = _load_target(args.input)
    try:
        if op.n_modes == 1:
            e = euler_single_mode(op.matrix)
            err = float(np.linalg.norm(e.symplectic().matrix - op.matrix))
            doc = {"format": "cvloop-decomposition/1", "kind": "euler", **e.to_dict()}
        else:
            dec = bloch_messiah(op)
            err = float(np.linalg.norm(dec.symplectic().matrix - op.matrix))
            doc = {"format": "cvloop-decomposition/1", "kind": "bloch_messiah", **dec.to_dict()}
    except DecompositionError as exc:
        raise CLIError(EXIT_NON_SYMPLECTIC, str(exc)) from None
    doc["displacement"] = op.displacement.tolist()
    doc["reconstruction_error"] = err
    _emit(doc, args.out)
    return EXIT_OK


def cmd_compile(args):
    data = _load_json(args.circuit)
    try:
        check(data)
        cf = CircuitFile.from_dict(data)
    except (jsonschema.ValidationError, CircuitError) as exc:
        raise CLIError(EXIT_PARSE, f"{args.circuit}: {getattr(exc, 'message', exc)}") from None
    try:
        prog = compile_circuit(cf.circuit, m=args.ancillas)
    except InsufficientAncillaError as exc:
        raise CLIError(EXIT_ANCILLAS, str(exc)) from None
    except ConstraintViolationError as exc:
        raise CLIError(EXIT_VALIDATION, f"compiler bug: {exc}") from None
    except DecompositionError as exc:
        raise CLIError(EXIT_NON_SYMPLECTIC, str(exc)) from None
    except (CircuitError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, str(exc)) from None
    log.info("compiled %d events over %d ticks", len(prog.events), prog.n_ticks)
    doc = prog.to_dict()
    if args.out:
        _emit(doc, args.out)
        print(f"n={prog.n} m={prog.m} tau_prime={prog.tau_prime} events={len(prog.events)}")
    else:
        _emit(doc)
    return EXIT_OK


def _gaussian_input(args, n):
    if not args.input:
        return g.vacuum(n)
    data = _load_json(args.input)
    spec = data.get("input_state", "vacuum") if isinstance(data, dict) and "format" in data else data
    try:
        return parse_input_state(spec, n)
    except (CircuitError, ValueError) as exc:
        raise CLIError(EXIT_PARSE, f"{args.input}: {exc}") from None


def _fock_input(state, N):
    """Product of coherent states matching a Gaussian input with vacuum covariance."""
    n = state.n_modes
    if not np.allclose(state.cov, g.VACUUM_VARIANCE * np.eye(2 * n)):
        raise CLIError(EXIT_PARSE, "the Fock backend accepts only vacuum or coherent inputs")
    st = None
    for k in range(n):
        single = fock.coherent(state.mean[k], state.mean[n + k], N)
        st = single if st is None else st.tensor(single)
    return st


def cmd_simulate(args):
    prog = _load_program(args.program)
    noise = _noise(args)
    inputs = _gaussian_input(args, prog.n)
    config = {"program": args.program, "noise": noise.to_dict(), "seed": args.seed}
    artifacts = {}
    use_fock = args.fock or not prog.is_gaussian
    if use_fock and not args.fock:
        raise CLIError(EXIT_PARSE, "program needs the Fock backend; pass --fock")
    try:
        if use_fock:
            metrics = _simulate_fock(prog, inputs, args, config)
        else:
            out, transcript = run(prog, inputs, noise, seed=args.seed)
            metrics = {"output_state": out.to_dict(), "outcomes": transcript.outcomes}
            if args.transcript:
                _emit(transcript.to_dict(), args.transcript)
                artifacts["transcript"] = args.transcript
    except (ExecutionError, fock.FockError, SingularFeedforwardError) as exc:
        raise CLIError(EXIT_EXECUTION, f"execution error: {exc}") from None
    except UnsupportedProgramError as exc:
        raise CLIError(EXIT_PARSE, str(exc)) from None
    _emit(_report("simulate", config, metrics, None, artifacts), args.out)
    return EXIT_OK


def _simulate_fock(prog, inputs, args, config):
    N = args.cutoff
    r = args.squeezing_r
    config.update(backend="fock", cutoff=N, squeezing_r=r, samples=args.samples, leakage_bound=args.leakage_bound)
    fin = _fock_input(inputs, N)
    seeds = np.random.SeedSequence(args.seed).spawn(args.samples)
    per_mode = []
    leak = 0.0
    for ss in seeds:
        out, _ = fock.run_program(prog, fin, r, seed=ss, leakage_bound=args.leakage_bound)
        per_mode.append([fock.mean_quadratures(out, k) for k in range(out.modes)])
        leak = max(leak, out.max_leakage)
    moments = np.mean(np.array(per_mode), axis=0)
    metrics = {
        "output_moments": [dict(zip(("mean_x", "mean_p", "var_x", "var_p"), m.tolist())) for m in moments],
        "max_leakage": leak,
    }
    cubic = [a for a in prog.ancilla_schedule if a.kind == "CUBIC"]
    if cubic and prog.n == 1:
        mx, mp = inputs.mean
        x2 = inputs.cov[0, 0] + mx**2
        gam = float(cubic[0].gamma)
        px, pp = fock.predicted_cubic_moments(mx, mp, x2, gam)
        if prog.m > 2:  # the trailing S(-ln sqrt 2) undoes the gate's squeezing
            px, pp = px * np.sqrt(2.0), pp / np.sqrt(2.0)
        metrics.update(
            gamma=gam,
            mean_x=float(moments[0][0]),
            mean_p=float(moments[0][1]),
            predicted_x=float(px),
            predicted_p=float(pp),
            abs_error={"x": abs(float(moments[0][0]) - px), "p": abs(float(moments[0][1]) - pp)},
        )
    return metrics


def cmd_verify(args):
    prog = _load_program(args.program)
    target = _load_target(args.target)
    noise = _noise(args)
    if not prog.is_gaussian:
        raise CLIError(EXIT_NON_GAUSSIAN, "verify needs a Gaussian program")
    log.info("verifying against a %d-mode target", target.n_modes)
    try:
        rep = verify(prog, target, noise, transfer_tol=args.transfer_tol, noise_tol=args.noise_tol)
    except ValueError as exc:
        raise CLIError(EXIT_PARSE, str(exc)) from None
    except ExecutionError as exc:
        raise CLIError(EXIT_EXECUTION, f"execution error: {exc}") from None
    d = rep.to_dict()
    config = {"program": args.program, "target": args.target, "noise": noise.to_dict(), "thresholds": d["thresholds"]}
    metrics = {k: d[k] for k in ("transfer_error", "displacement_error", "noise_norm")}
    metrics["channel"] = d["channel"]
    _emit(_report("verify", config, metrics, rep.passed), args.out)
    print(
        f"transfer_error={rep.transfer_error:.3e} noise_norm={rep.noise_norm:.3e} "
        f"{'PASS' if rep.passed else 'FAIL'}",
        file=sys.stderr,
    )
    return EXIT_OK if rep.passed else EXIT_VERIFY_FAILED


def cmd_budget(args):
    db = args.ancilla_db if args.ancilla_db is not None else 15.0
    try:
        noise = NoiseConfig(ancilla_db=db, eta_in=1.0 - args.loop_loss)
    except ValueError as exc:
        raise CLIError(EXIT_PARSE, str(exc)) from None
    rep = noise_budget(noise, args.round_trips)
    eff, thr = rep["effective_squeezing_db"], rep["threshold_db"]
    if args.json:
        _emit(_report("budget", noise.to_dict() | {"round_trips": args.round_trips}, rep, rep["meets_threshold"] and rep["loss_budget_ok"]))
        return EXIT_OK
    print(f"effective squeezing: {eff:.3f} dB after {args.round_trips} round trip(s)")
    if rep["meets_threshold"]:
        print(f"meets threshold ({eff:.1f} >= {thr} dB)")
    else:
        print(f"below threshold ({eff:.1f} < {thr} dB)")
    loss = rep["loss_per_round_trip"]
    verdict = "OK" if rep["loss_budget_ok"] else "FAIL"
    print(f"loss budget {verdict}: {100 * loss:.2f}% per round trip (must be below 1%)")
    return EXIT_OK


def cmd_schema(args):
    from .schemas import SCHEMAS

    if args.print:
        if args.print not in SCHEMAS:
            raise CLIError(EXIT_PARSE, f"unknown schema {args.print!r}; known: {sorted(SCHEMAS)}")
        _emit(SCHEMAS[args.print])
        return EXIT_OK
    if not args.check:
        raise CLIError(EXIT_PARSE, "give --check FILE or --print FORMAT")
    data = _load_json(args.check)
    try:
        check(data)
    except jsonschema.ValidationError as exc:
        raise CLIError(EXIT_PARSE, f"{args.check}: schema violation: {exc.message}") from None
    print(f"{args.check}: valid")
    return EXIT_OK


# --- parser -----------------------------------------------------------------------------


def _noise_flags(p):
    p.add_argument("--noise", help="noise config JSON (flags take precedence)")
    p.add_argument("--ancilla-db", type=_ancilla_db, help="ancilla squeezing in dB, or 'ideal'")
    p.add_argument("--loop-loss", type=float, help="loss per inner-loop round trip")


def build_parser():
    ap = argparse.ArgumentParser(prog="cvloop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="Euler or Bloch-Messiah decomposition of a Gaussian target")
    p.add_argument("input", help="circuit or matrix file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compile", help="compile a circuit into a control program")
    p.add_argument("circuit")
    p.add_argument("--ancillas", type=int, help="ancilla budget m (default n)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run a control program")
    p.add_argument("program")
    _noise_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="state or circuit file supplying the input state")
    p.add_argument("--transcript", help="write the transcript JSON here")
    p.add_argument("--fock", action="store_true", help="use the Fock backend")
    p.add_argument("--cutoff", type=int, default=fock.DEFAULT_CUTOFF)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--squeezing-r", type=float, default=1.0, help="ancilla squeezing r for --fock")
    p.add_argument("--leakage-bound", type=float, default=fock.DEFAULT_LEAKAGE_BOUND)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="compare a Gaussian program with a target")
    p.add_argument("program")
    p.add_argument("target", help="matrix or Gaussian circuit file")
    _noise_flags(p)
    p.add_argument("--transfer-tol", type=float)
    p.add_argument("--noise-tol", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("budget", help="squeezing and loss budget against the GKP threshold")
    p.add_argument("--ancilla-db", type=_ancilla_db)
    p.add_argument("--loop-loss", type=float, default=0.0)
    p.add_argument("--round-trips", type=int, default=1)
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("schema", help="check a document against its schema")
    p.add_argument("--check", metavar="FILE")
    p.add_argument("--print", metavar="FORMAT")
    p.set_defaults(func=cmd_schema)
    return ap


def main(argv=None):
    level = getattr(logging, os.environ.get("CVLOOP_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"cvloop {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
