"""Command-line front end.

Every command can be driven by flags, by a JSON scenario file, or both
(flags win).  Exit codes: 0 success, 2 invalid input, 3 a checked identity
failed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from . import atomlattice as al
from . import dynamics as dyn
from . import nonlocality as nl
from . import su2phase as su
from .qstate import ALGEBRA_TOL, StateVector

SCENARIO_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_ASSERT = 0, 2, 3


class ValidationError(Exception):
    pass


class AssertionFailure(Exception):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


# command -> {parameter: (type, default)}
SCHEMAS = {
    "phase-states": {"n": (int, 1), "psi": (float, 0.0)},
    "witness": {"state": (str, None), "state_file": (str, None), "psi": (float, 0.0)},
    "ghz": {"state": (str, "chi10"), "state_file": (str, None), "psi": (float, 0.0)},
    "chsh": {
        "state": (str, "chi10"), "state_file": (str, None), "psi": (float, 0.0),
        "theta_a": (float, math.pi), "theta_a_prime": (float, math.pi / 2),
        "theta_b": (float, -math.pi / 4), "theta_b_prime": (float, None),
        "grid": (int, 0),
    },
    "evolve": {
        "n": (int, 1), "delta": (float, 0.0), "omega0": (float, 1.0), "gamma": (float, 1.0),
        "kappa": (float, 0.0), "initial": (str, "photon"), "fock_cutoff": (int, None),
        "t_max": (float, 10.0), "steps": (int, 1001), "sector": (bool, False),
    },
    "scan": {
        "n": (int, 2), "delta": (float, 0.0), "omega0": (float, 1.0), "gamma": (float, 1.0),
        "kappa": (float, 0.0), "initial": (str, "photon"), "fock_cutoff": (int, None),
        "t_max": (float, 20.0), "steps": (int, 2001),
    },
    "verify": {"perturb_corner": (float, 0.0)},
}
DEFAULT_FORMAT = {"evolve": "csv"}


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def load_state(params: dict) -> StateVector:
    if params.get("state_file"):
        try:
            data = json.loads(Path(params["state_file"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read state file: {exc}") from exc
        return StateVector.from_json(data)
    if not params.get("state"):
        raise ValidationError("give --state TAG or --state-file FILE")
    return al.named_state(params["state"], params.get("psi") or 0.0)


def cmd_phase_states(p: dict) -> dict:
    spin = su.spin_for_pairs(p["n"])
    basis = al.embed_phase_states(p["n"], p["psi"])
    abstract = su.phase_states(spin, p["psi"])
    eps = su.phase_operator(spin, p["psi"]).matrix
    residual = max(
        float(np.linalg.norm(eps @ s.amplitudes - np.exp(1j * phi) * s.amplitudes))
        for s, phi in zip(abstract.states, abstract.eigenphases)
    )
    out = {
        "n": p["n"],
        "j": str(spin.j),
        "N": spin.N,
        "psi": p["psi"],
        "configurations": [str(c) for c in al.half_excited_basis(p["n"])],
        "eigenphases": [float(x) for x in basis.eigenphases],
        "eigen_residual": residual,
        "states": [s.to_json() for s in basis.states],
    }
    if residual >= ALGEBRA_TOL:
        raise AssertionFailure("phase states are not eigenstates of eps", out)
    return out


def cmd_witness(p: dict) -> dict:
    s = load_state(p)
    if al.atom_positions(s.factors):
        return al.witness_scan(s).to_json()
    ent = al.factor_entropies(s)
    dims = [f.dim for f in s.factors]
    maximal = all(abs(e - math.log(d)) < al.WITNESS_TOL for e, d in zip(ent, dims))
    return {
        "entropies": [float(x) for x in ent],
        "max_entropies": [math.log(d) for d in dims],
        "verdict": "passes-criterion" if maximal else "fails-criterion",
    }


def cmd_ghz(p: dict) -> dict:
    s = load_state(p)
    cons = nl.derive_constraints(s)
    found = nl.classical_search(cons)
    return {
        "uniform_words": {f"sigma{i}": v for i, v in nl.uniform_word_signs(s).items()},
        "constraints": [{"word": str(c.word), "sign": c.sign} for c in cons],
        "classical": "UNSAT" if found is None else "SAT",
        "assignment": None if found is None else {f"m{x}^({a})": v for (a, x), v in found.items()},
    }


def cmd_chsh(p: dict) -> dict:
    s = load_state(p)
    tbp = p["theta_b_prime"] if p["theta_b_prime"] is not None else -p["theta_b"]
    settings = nl.ChshSettings(p["theta_a"], p["theta_a_prime"], p["theta_b"], tbp)
    out = {
        "settings": {"theta_a": p["theta_a"], "theta_a_prime": p["theta_a_prime"], "theta_b": p["theta_b"], "theta_b_prime": tbp},
        **nl.chsh_scan(s, settings).to_json(),
    }
    if p["grid"]:
        out["grid_max"] = nl.chsh_grid_max(s, p["grid"])
    return out


def _sim_config(p: dict) -> dyn.SimConfig:
    if p["steps"] < 1 or p["t_max"] <= 0:
        raise ValidationError("need steps >= 1 and t_max > 0")
    return dyn.SimConfig(
        delta=p["delta"], omega0=p["omega0"], gamma=p["gamma"], kappa=p["kappa"],
        n_pairs=p["n"], fock_cutoff=p["fock_cutoff"], initial=p["initial"],
        times=np.linspace(0.0, p["t_max"], p["steps"]),
    )


def cmd_evolve(p: dict) -> dyn.Trace:
    trace = dyn.run_trace(_sim_config(p), sector=p["sector"])
    drift = max(float(np.max(np.abs(trace.column("norm") - 1))), float(np.ptp(trace.column("n_expect"))))
    if drift >= 1e-10:
        raise AssertionFailure(f"conservation violated (drift {drift:.3e})")
    return trace


def cmd_scan(p: dict) -> dict:
    return dyn.phase_overlap_scan(_sim_config(p)).to_json()


def cmd_verify(p: dict) -> dict:
    results = acceptance.run_all(corner_error=p["perturb_corner"])
    for r in results:
        print(r.line(), file=sys.stderr)
    out = {"passed": all(r.passed for r in results), "criteria": [r.to_json() for r in results]}
    if not out["passed"]:
        raise AssertionFailure("acceptance criteria failed", out)
    return out


COMMANDS = {
    "phase-states": cmd_phase_states,
    "witness": cmd_witness,
    "ghz": cmd_ghz,
    "chsh": cmd_chsh,
    "evolve": cmd_evolve,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atomphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, schema in SCHEMAS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--scenario", help="JSON scenario file; flags override its parameters")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        for name, (typ, _) in schema.items():
            if typ is bool:
                sp.add_argument(_flag(name), action="store_const", const=True, default=None)
            else:
                sp.add_argument(_flag(name), type=typ, default=None)
    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("scenario")
    run.add_argument("--format", choices=("json", "csv"), default=None)
    run.add_argument("--out", default=None)
    return parser


def _read_scenario(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("version") != SCENARIO_VERSION:
        raise ValidationError(f"scenario must be an object with \"version\": {SCENARIO_VERSION}")
    if data.get("command") not in SCHEMAS:
        raise ValidationError(f"unknown scenario command {data.get('command')!r}")
    return data


def resolve(args: argparse.Namespace) -> tuple[str, dict, dict]:
    """Merge scenario file and flags into (command, parameters, output)."""
    scenario = {}
    if getattr(args, "scenario", None):
        scenario = _read_scenario(args.scenario)
    command = scenario.get("command", args.command) if args.command == "run" else args.command
    if scenario and scenario["command"] != command:
        raise ValidationError(f"scenario is for {scenario['command']!r}, not {command!r}")
    schema = SCHEMAS[command]
    file_params = scenario.get("parameters", {})
    unknown = set(file_params) - set(schema)
    if unknown:
        raise ValidationError(f"unknown parameters for {command}: {sorted(unknown)}")
    params = {}
    for name, (typ, default) in schema.items():
        val = getattr(args, name, None)
        if val is None:
            val = file_params.get(name, default)
        if typ is bool and val is not None and not isinstance(val, bool):
            raise ValidationError(f"parameter {name} must be true or false")
        if val is not None:
            try:
                val = typ(val)
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"parameter {name}: {exc}") from exc
        params[name] = val
    output = dict(scenario.get("output", {}))
    if args.format:
        output["format"] = args.format
    if args.out:
        output["path"] = args.out
    output.setdefault("format", DEFAULT_FORMAT.get(command, "json"))
    return command, params, output


def _render(result, fmt: str) -> str:
    if isinstance(result, dyn.Trace):
        return result.to_csv() if fmt == "csv" else _dump_json(result.to_json())
    if fmt == "csv":
        raise ValidationError("csv output is only available for evolve")
    return _dump_json(result)


def _emit(text: str, output: dict) -> None:
    if output.get("path"):
        Path(output["path"]).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        command, params, output = resolve(args)
        result = COMMANDS[command](params)
        _emit(_render(result, output["format"]), output)
        return EXIT_OK
    except AssertionFailure as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        if exc.payload is not None and output.get("format", "json") == "json":
            _emit(_dump_json(exc.payload), output)
        return EXIT_ASSERT
    except (ValidationError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
