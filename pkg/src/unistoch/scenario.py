"""Scenario files: named objects plus an ordered list of tasks.

A scenario is a JSON object::

    {"schema": 1, "name": "...", "seed": 7,
     "objects": {"name": {"type": "...", ...}, ...},
     "tasks": [{"task": "...", ...}, ...]}

Objects are built lazily and may refer to each other by name.  Every
random draw comes from :func:`named_rng`, keyed by the scenario seed and
the name of the object or task that asks for it, so reports do not depend
on execution order.
"""
import json
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    HADAMARD,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    TOL_INT,
    UnistochError,
    ValidationError,
    configuration_pvm,
    is_projector,
    is_psd,
    is_self_adjoint,
    is_unitary,
)
from .correspondence import (
    FD_STEP,
    Beable,
    EvolutionOperator,
    born_probabilities,
    density_matrix,
    evolve_density,
    gamma_from_theta,
    initial_density,
)
from .dilation import (
    KrausSet,
    bit_flip_kraus,
    dilate_trivial,
    gamma_from_kraus,
    is_orthogonal,
    kraus_from_theta,
    realify,
    reconstruct_gamma,
    stinespring_unitary,
)
from .dynamics import (
    Hamiltonian,
    check_ehrenfest,
    family_from_constant_h,
    identity_family,
    integrate_schrodinger,
    integrate_von_neumann,
)
from .gauge import FWTransform, fw_invariance, sh_gauge, transform_hamiltonian
from .io import matrix_to_json, parse_matrix, parse_vector, process_from_json, vector_to_json
from .randmat import random_phases
from .stochastic import candidate_intermediate, is_stochastic, pauli_x_gamma, propagate, Process
from .symmetry import check_antiunitary_form, check_dynamical_symmetry, check_wigner, noether_check

__all__ = ["SCHEMA_VERSION", "ScenarioError", "Scenario", "named_rng", "load_scenario", "run_scenario"]

SCHEMA_VERSION = 1

_BUILTIN_MATRICES = {
    "pauli_x": PAULI_X,
    "pauli_y": PAULI_Y,
    "pauli_z": PAULI_Z,
    "hadamard": HADAMARD,
}


class ScenarioError(UnistochError, ValueError):
    """Malformed scenario: bad schema, unknown task, unresolved reference."""


def named_rng(seed: int, name: str) -> np.random.Generator:
    """Independent generator for ``name`` derived from the scenario seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(name.encode())]))


@dataclass
class Scenario:
    name: str
    seed: int
    objects: dict
    tasks: list
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "Scenario":
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        if data.get("schema") != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported scenario schema {data.get('schema')!r}; expected {SCHEMA_VERSION}")
        if "seed" not in data or isinstance(data["seed"], bool) or not isinstance(data["seed"], int):
            raise ScenarioError("scenario needs an integer 'seed'")
        tasks = data.get("tasks", [])
        if not isinstance(tasks, list):
            raise ScenarioError("'tasks' must be an array")
        for k, t in enumerate(tasks):
            if not isinstance(t, dict) or t.get("task") not in TASKS:
                kind = t.get("task") if isinstance(t, dict) else t
                raise ScenarioError(f"task #{k}: unknown task kind {kind!r}")
        objects = data.get("objects", {})
        if not isinstance(objects, dict):
            raise ScenarioError("'objects' must be a JSON object")
        return cls(
            name=str(data.get("name", "scenario")),
            seed=data["seed"],
            objects=objects,
            tasks=tasks,
            base_dir=Path(base_dir) if base_dir else Path.cwd(),
        )


def load_scenario(path) -> Scenario:
    """Parse a scenario file; ``json.JSONDecodeError`` propagates with line and column."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return Scenario.from_dict(data, base_dir=path.parent)


class _Context:
    def __init__(self, scenario: Scenario, tol: float, tol_int: float):
        self.scenario = scenario
        self.tol = tol
        self.tol_int = tol_int
        self._cache = {}
        self._building = set()

    def rng(self, name):
        return named_rng(self.scenario.seed, name)

    def get(self, ref, expect=None):
        """Resolve an object reference (a name) or an inline object spec."""
        if isinstance(ref, dict):
            return self._build("<inline>", ref, expect)
        if not isinstance(ref, str):
            raise ScenarioError(f"expected an object name, got {ref!r}")
        if ref in self._cache:
            obj = self._cache[ref]
        else:
            if ref not in self.scenario.objects:
                raise ScenarioError(f"unresolved reference {ref!r}")
            if ref in self._building:
                raise ScenarioError(f"circular reference through {ref!r}")
            self._building.add(ref)
            try:
                obj = self._build(ref, self.scenario.objects[ref], None)
            finally:
                self._building.discard(ref)
            self._cache[ref] = obj
        return obj

    def _build(self, name, spec, expect):
        if not isinstance(spec, dict) or "type" not in spec:
            raise ScenarioError(f"object {name!r}: spec must be an object with a 'type'")
        kind = spec["type"]
        if expect is not None and kind != expect:
            raise ScenarioError(f"object {name!r}: expected type {expect!r}, got {kind!r}")
        builder = _BUILDERS.get(kind)
        if builder is None:
            raise ScenarioError(f"object {name!r}: unknown type {kind!r}")
        try:
            return builder(self, name, spec)
        except KeyError as exc:
            raise ScenarioError(f"object {name!r}: missing field {exc}") from None
        except UnistochError as exc:
            raise type(exc)(f"object {name!r}: {exc}") from None


def _matrix_value(ctx, spec):
    if "builtin" in spec:
        b = spec["builtin"]
        if b == "identity":
            return np.eye(int(spec["dim"]), dtype=complex)
        if b == "zero":
            return np.zeros((int(spec["dim"]),) * 2, dtype=complex)
        if b in _BUILTIN_MATRICES:
            return np.array(_BUILTIN_MATRICES[b])
        raise ScenarioError(f"unknown builtin matrix {b!r}")
    if "diag" in spec:
        return np.diag(parse_vector(spec["diag"])).astype(complex)
    if "ref" in spec:
        return np.asarray(ctx.get(spec["ref"]))
    return parse_matrix(spec["value"])


def _build_matrix(ctx, name, spec):
    return _matrix_value(ctx, spec)


def _build_hamiltonian(ctx, name, spec):
    return Hamiltonian.constant(_matrix_value(ctx, spec))


def _build_family(ctx, name, spec):
    hbar = float(spec.get("hbar", 1.0))
    if spec.get("builtin") == "identity":
        return identity_family(int(spec["dim"]), hbar)
    if "hamiltonian" in spec:
        h = ctx.get(spec["hamiltonian"])
        return family_from_constant_h(h, hbar)
    return family_from_constant_h(Hamiltonian.constant(_matrix_value(ctx, spec)), hbar)


def _build_evolution(ctx, name, spec):
    if "family" in spec:
        t = float(spec["t"])
        return EvolutionOperator(ctx.get(spec["family"])(t), t=t, tol=ctx.tol)
    return EvolutionOperator(_matrix_value(ctx, spec), t=spec.get("t"), tol=ctx.tol)


def _build_process(ctx, name, spec):
    if "file" in spec:
        with open(ctx.scenario.base_dir / spec["file"], encoding="utf-8") as fh:
            return process_from_json(json.load(fh), ctx.tol)
    if spec.get("builtin") == "pauli_x_gamma":
        return Process.from_family(pauli_x_gamma, spec["times"], parse_vector(spec["initial"]), tol=ctx.tol)
    return process_from_json(spec, ctx.tol)


def _build_kraus(ctx, name, spec):
    if spec.get("builtin") == "bit_flip":
        return bit_flip_kraus(float(spec["p"]))
    if "from_evolution" in spec:
        return kraus_from_theta(ctx.get(spec["from_evolution"]))
    return KrausSet(tuple(parse_matrix(k) for k in spec["operators"]), tol=ctx.tol)


def _build_density(ctx, name, spec):
    if "probabilities" in spec:
        return initial_density(parse_vector(spec["probabilities"]), ctx.tol)
    return density_matrix(_matrix_value(ctx, spec), ctx.tol)


def _build_phases(ctx, name, spec):
    if "random" in spec:
        n = int(spec["dim"])
        return random_phases(n, named_rng(int(spec["random"]), f"phases:{name}"))
    return np.real(_matrix_value(ctx, spec))


def _build_transform(ctx, name, spec):
    b = spec.get("builtin", "constant")
    if b == "constant":
        # the matrix comes from "value", "ref" or "diag"; "builtin" names the transform kind here
        return FWTransform.constant(_matrix_value(ctx, {k: v for k, v in spec.items() if k != "builtin"}))
    if b == "exp":
        g = spec["generator"]
        return FWTransform.from_generator(ctx.get(g) if isinstance(g, str) else parse_matrix(g))
    if b == "adjoint_of_family":
        return FWTransform.adjoint_of(ctx.get(spec["family"]))
    raise ScenarioError(f"unknown transform builtin {b!r}")


def _build_observable(ctx, name, spec):
    if "beable" in spec:
        return Beable(parse_vector(spec["beable"]).real)
    return _matrix_value(ctx, spec)


_BUILDERS = {
    "matrix": _build_matrix,
    "hamiltonian": _build_hamiltonian,
    "family": _build_family,
    "evolution": _build_evolution,
    "process": _build_process,
    "kraus": _build_kraus,
    "density": _build_density,
    "phases": _build_phases,
    "fw_transform": _build_transform,
    "observable": _build_observable,
}


def _theta_of(ctx, ref):
    obj = ctx.get(ref)
    return obj if isinstance(obj, EvolutionOperator) else EvolutionOperator(obj, tol=ctx.tol)


def _expected(params, observed):
    """Verdict for informational findings: only checked when the task states ``expect``."""
    if "expect" not in params:
        return None
    return bool(observed) == bool(params["expect"])


def _task_validate(ctx, p, rng):
    obj = ctx.get(p["object"])
    check = p["check"]
    if check == "stochastic":
        m = getattr(obj, "gamma", obj)
        ok = is_stochastic(m, ctx.tol)
        return ok, {"check": check, "holds": ok}
    if check == "kraus":
        dev = obj.identity_violation()
        return dev <= ctx.tol, {"check": check, "deviation": dev}
    if check == "density":
        try:
            density_matrix(np.asarray(obj), ctx.tol)
            return True, {"check": check, "holds": True}
        except ValidationError as exc:
            return False, {"check": check, "holds": False, "reason": str(exc)}
    predicates = {
        "unitary": is_unitary,
        "self_adjoint": is_self_adjoint,
        "psd": is_psd,
        "projector": is_projector,
    }
    if check not in predicates:
        raise ScenarioError(f"unknown check {check!r}")
    res = predicates[check](np.asarray(obj), ctx.tol)
    return res.ok, {"check": check, "holds": res.ok, "deviation": res.deviation}


def _task_gamma_from_theta(ctx, p, rng):
    g = gamma_from_theta(_theta_of(ctx, p["theta"]), ctx.tol).gamma
    return is_stochastic(g, ctx.tol), {"gamma": matrix_to_json(g)}


def _task_evolve(ctx, p, rng):
    theta = _theta_of(ctx, p["theta"])
    n = theta.dim
    if "p0" in p:
        p0 = parse_vector(p["p0"]).real
        rho0 = initial_density(p0, ctx.tol)
    else:
        rho0 = np.asarray(ctx.get(p["rho"]))
        p0 = np.real(np.diag(rho0))
    diagonal = bool(np.max(np.abs(rho0 - np.diag(np.diag(rho0)))) <= ctx.tol)
    rho_t = evolve_density(rho0, theta, ctx.tol)
    born = born_probabilities(rho_t, configuration_pvm(n))
    result = {
        "rho": matrix_to_json(rho_t),
        "probabilities": vector_to_json(born),
        "initial_diagonal": diagonal,
    }
    if not diagonal:
        return None, result
    total = propagate(gamma_from_theta(theta, ctx.tol), p0, ctx.tol)
    err = float(np.max(np.abs(born - total)))
    result["total_probability"] = vector_to_json(total)
    result["born_vs_total_probability"] = err
    return err <= ctx.tol, result


def _task_divisibility(ctx, p, rng):
    proc = ctx.get(p["process"], "process")
    rep = candidate_intermediate(proc.at(float(p["t"])), proc.at(float(p["t_prime"])), ctx.tol)
    return _expected(p, rep.is_stochastic), rep.to_dict()


def _task_sh_gauge(ctx, p, rng):
    theta = _theta_of(ctx, p["theta"])
    phases = ctx.get(p["phases"]) if "phases" in p else random_phases(theta.dim, rng)
    moved = sh_gauge(theta, phases)
    dev = float(np.max(np.abs(gamma_from_theta(moved).gamma - gamma_from_theta(theta).gamma)))
    unitarity = is_unitary(moved.theta).deviation
    return dev <= ctx.tol, {"gamma_change": dev, "unitarity_deviation_after": unitarity}


def _task_fw_gauge(ctx, p, rng):
    theta = _theta_of(ctx, p["theta"])
    rho = np.asarray(ctx.get(p["rho"]))
    obs = [ctx.get(o) for o in p.get("observables", [])]
    devs = fw_invariance(theta.theta, rho, obs, ctx.get(p["transform"], "fw_transform"), float(p["t"]))
    return max(devs.values()) <= ctx.tol, devs


def _task_heisenberg_gauge(ctx, p, rng):
    fam = ctx.get(p["family"], "family")
    h = ctx.get(p["hamiltonian"], "hamiltonian")
    t = float(p["t"])
    h_v = transform_hamiltonian(h, FWTransform.adjoint_of(fam), t, FD_STEP, fam.hbar)
    norm = float(np.linalg.norm(h_v, 2))
    return norm <= ctx.tol_int, {"norm_transformed_hamiltonian": norm}


def _task_symmetry(ctx, p, rng):
    theta = _theta_of(ctx, p["theta"])
    v = np.asarray(ctx.get(p["v"]))
    verdict = check_dynamical_symmetry(v, theta.theta, ctx.tol)
    result = verdict.to_dict()
    result["antiunitary_form_conj_v"] = check_antiunitary_form(np.conj(v), theta.theta, ctx.tol).ok
    trials = int(p.get("wigner_trials", 0))
    if trials:
        w = check_wigner(v, theta.theta, trials, rng, ctx.tol)
        result["wigner"] = {
            "holds": w.holds,
            "trials_passed": w.trials_passed,
            "max_violation": w.max_violation,
            "counterexample_basis": None if w.counterexample_basis is None else matrix_to_json(w.counterexample_basis),
        }
    if "expect" in p:
        return _expected(p, verdict.holds), result
    return verdict.holds, result


def _task_noether(ctx, p, rng):
    g = np.asarray(ctx.get(p["generator"]))
    fam = ctx.get(p["family"], "family")
    rho0 = np.asarray(ctx.get(p["rho"]))
    times = [float(t) for t in p["times"]]
    rep = noether_check(g, fam, rho0, times, ctx.tol)
    result = {"max_drift": rep.max_drift, "commutes": rep.commutes, "max_commutator": rep.max_commutator}
    if not rep.commutes:
        return None, result
    return rep.max_drift <= 10 * ctx.tol, result


def _task_dilate(ctx, p, rng):
    theta = _theta_of(ctx, p["theta"])
    ds = dilate_trivial(theta, int(p.get("d", 2)), gamma_index=int(p.get("gamma_index", 0)))
    g = reconstruct_gamma(ds).gamma
    err = float(np.max(np.abs(g - gamma_from_theta(theta).gamma)))
    return err <= ctx.tol, {"dilated": ds.to_dict(), "gamma": matrix_to_json(g), "reconstruction_error": err}


def _task_stinespring(ctx, p, rng):
    ks = ctx.get(p["kraus"], "kraus")
    ds = stinespring_unitary(ks, seed=rng)
    g = reconstruct_gamma(ds).gamma
    err = float(np.max(np.abs(g - gamma_from_kraus(ks).gamma)))
    unit = is_unitary(ds.evolution, ctx.tol)
    return unit.ok and err <= ctx.tol, {
        "unitary": matrix_to_json(ds.evolution),
        "unitarity_deviation": unit.deviation,
        "gamma": matrix_to_json(g),
        "reconstruction_error": err,
        "system_dim": ds.system_dim,
        "internal_dim": ds.internal_dim,
        "gamma_index": ds.gamma_index,
    }


def _task_realify(ctx, p, rng):
    m = np.asarray(ctx.get(p["matrix"]), dtype=complex)
    r = realify(m)
    result = {"real": matrix_to_json(r)}
    if m.shape[0] == m.shape[1] and is_unitary(m, ctx.tol):
        orth = is_orthogonal(r, ctx.tol)
        result["orthogonality_deviation"] = orth.deviation
        return orth.ok, result
    return None, result


def _task_integrate(ctx, p, rng):
    h = ctx.get(p["hamiltonian"], "hamiltonian")
    t_end, dt = float(p["t_end"]), float(p.get("dt", 1e-3))
    u = family_from_constant_h(h)(t_end)
    if "psi" in p:
        psi0 = parse_vector(p["psi"]).astype(complex)
        psi, drift = integrate_schrodinger(h, psi0, t_end, dt, return_drift=True)
        exact = u @ psi0
        err = float(np.max(np.abs(psi - exact)))
        return err <= ctx.tol_int, {"psi": vector_to_json(psi), "norm_drift": drift, "error_vs_exact": err}
    rho0 = np.asarray(ctx.get(p["rho"]))
    rho = integrate_von_neumann(h, rho0, t_end, dt)
    err = float(np.max(np.abs(rho - u @ rho0 @ u.conj().T)))
    return err <= ctx.tol_int, {"rho": matrix_to_json(rho), "error_vs_exact": err}


def _task_ehrenfest(ctx, p, rng):
    h = ctx.get(p["hamiltonian"], "hamiltonian")
    a = ctx.get(p["observable"])
    rho0 = np.asarray(ctx.get(p["rho"]))
    res = check_ehrenfest(h, a, rho0, float(p["t"]), FD_STEP)
    bound = 10 * FD_STEP**2 + ctx.tol_int
    return res.residual <= bound, {"residual": res.residual, "lhs": res.lhs, "rhs": res.rhs}


TASKS = {
    "validate": _task_validate,
    "gamma_from_theta": _task_gamma_from_theta,
    "evolve": _task_evolve,
    "divisibility": _task_divisibility,
    "sh_gauge": _task_sh_gauge,
    "fw_gauge": _task_fw_gauge,
    "heisenberg_gauge": _task_heisenberg_gauge,
    "symmetry": _task_symmetry,
    "noether": _task_noether,
    "dilate": _task_dilate,
    "stinespring": _task_stinespring,
    "realify": _task_realify,
    "integrate": _task_integrate,
    "ehrenfest": _task_ehrenfest,
}


class TaskError(UnistochError):
    """Raised when a task cannot be evaluated; carries the task location."""

    def __init__(self, index, kind, exc):
        super().__init__(f"task #{index} ({kind}): {exc}")
        self.cause = exc


def _run_task(ctx, index, params):
    kind = params["task"]
    rng = ctx.rng(f"task:{index}")
    try:
        holds, result = TASKS[kind](ctx, params, rng)
    except KeyError as exc:
        raise TaskError(index, kind, ScenarioError(f"missing parameter {exc}")) from None
    except (UnistochError, ValueError, np.linalg.LinAlgError) as exc:
        raise TaskError(index, kind, exc) from None
    entry = {"index": index, "task": kind, "holds": None if holds is None else bool(holds), "result": result}
    if "label" in params:
        entry["label"] = str(params["label"])
    return entry


def run_scenario(scenario: Scenario, tol: float, tol_int: float = TOL_INT, jobs: int = 1) -> dict:
    """Execute every task and return the report.

    The report's ``timing`` entry is the only part that varies between runs
    of the same scenario.
    """
    start = time.perf_counter()
    ctx = _Context(scenario, tol, tol_int)
    # build all objects up front so concurrent tasks only read the cache
    for name in scenario.objects:
        ctx.get(name)
    indexed = list(enumerate(scenario.tasks))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(lambda it: _run_task(ctx, *it), indexed))
    else:
        entries = [_run_task(ctx, k, t) for k, t in indexed]
    verdicts = [e["holds"] for e in entries if e["holds"] is not None]
    return {
        "schema": SCHEMA_VERSION,
        "tool": "unistoch",
        "version": __version__,
        "scenario": scenario.name,
        "seed": scenario.seed,
        "tolerance": {"alg": tol, "int": tol_int},
        "tasks": entries,
        "all_hold": all(verdicts),
        "timing": {"elapsed_seconds": time.perf_counter() - start},
    }
