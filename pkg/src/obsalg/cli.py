"""Command-line front end.

Usage: ``obsalg <group> <action> [--file problem.json] [--seed N] [--format text|json|csv] [--output path]``.

Problem files are JSON documents ``{"version": "1", "task": "<group> <action>", "inputs": {...}}``;
the payload is validated against the task's schema before anything is computed.
Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import complementarity as cm
from . import gns, sectors, states, weyl
from .matrix_algebra import (
    AlgebraError,
    commutant,
    generate_algebra,
    verify_cstar_laws,
)
from .optimize import OptimizerConfig
from .poisson import (
    LambdaElement,
    LambdaError,
    format_element,
    format_xpoly,
    parse,
    run_identity_battery,
    specialize_classical,
    specialize_quantum,
)
from .poisson.scalars import GaussianRational, format_scalar
from .serialize import (
    algebra_from_json,
    algebra_to_json,
    matrix_from_json,
    matrix_to_json,
    state_from_json,
    state_to_json,
    triple_from_json,
    triple_to_json,
    vector_from_json,
    weyl_from_json,
)

VERSION = "1"
FORMATS = ("text", "json", "csv")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class InputError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


# ---------------------------------------------------------------- schemas

_MATRIX = {
    "oneOf": [
        {
            "type": "object",
            "required": ["rows", "cols", "entries"],
            "properties": {
                "rows": {"type": "integer", "minimum": 1},
                "cols": {"type": "integer", "minimum": 1},
                "entries": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                },
            },
        },
        {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": {"type": "number"}}},
    ]
}
_VECTOR = {
    "type": "array",
    "minItems": 1,
    "items": {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]},
}
_COMPLEX = {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]}
_STATE = {
    "type": "object",
    "oneOf": [{"required": ["rho"]}, {"required": ["psi"]}],
    "properties": {"rho": _MATRIX, "psi": _VECTOR},
}
_ALGEBRA = {
    "type": "object",
    "required": ["ambient_dim", "basis"],
    "properties": {
        "ambient_dim": {"type": "integer", "minimum": 1},
        "basis": {"type": "array", "minItems": 1, "items": _MATRIX},
        "tol": {"type": "number", "exclusiveMinimum": 0},
    },
}
_ALGEBRA_SOURCE = {
    "algebra": _ALGEBRA,
    "generators": {"type": "array", "items": _MATRIX},
    "dim": {"type": "integer", "minimum": 1},
    "tol": {"type": "number", "exclusiveMinimum": 0},
}


def _obj(required, props, any_of=None) -> dict:
    out = {"type": "object", "required": list(required), "properties": props}
    if any_of:
        out["anyOf"] = [{"required": r} for r in any_of]
    return out


_ALG_ANY = [["algebra"], ["generators"]]

PAYLOADS = {
    "generators": _obj(["generators"], _ALGEBRA_SOURCE),
    "algebra": _obj([], _ALGEBRA_SOURCE, _ALG_ANY),
    "state_observable": _obj(["state", "observable"], {"state": _STATE, "observable": _MATRIX}),
    "state_family": _obj(["states"], {**_ALGEBRA_SOURCE, "states": {"type": "array", "minItems": 1, "items": _STATE}}, _ALG_ANY),
    "algebra_state": _obj(["state"], {**_ALGEBRA_SOURCE, "state": _STATE}, _ALG_ANY),
    "triple": _obj(
        ["algebra", "triple"],
        {
            "algebra": _ALGEBRA,
            "state": _STATE,
            "triple": _obj(
                ["space_dim", "rep", "cyclic_vector", "embedding"],
                {
                    "space_dim": {"type": "integer", "minimum": 1},
                    "rep": {"type": "object", "additionalProperties": _MATRIX},
                    "cyclic_vector": _VECTOR,
                    "embedding": _MATRIX,
                    "tol": {"type": "number"},
                },
            ),
        },
    ),
    "sector_algebra": _obj([], {**_ALGEBRA_SOURCE, "kind": {"enum": list(sectors.KINDS)}}, _ALG_ANY),
    "phase": _obj(
        ["psi1", "psi2", "c1", "c2"],
        {
            **_ALGEBRA_SOURCE,
            "kind": {"enum": list(sectors.KINDS)},
            "psi1": _VECTOR,
            "psi2": _VECTOR,
            "c1": _COMPLEX,
            "c2": _COMPLEX,
            "phases": {"type": "array", "items": {"type": "number"}},
        },
        _ALG_ANY,
    ),
    "charge": _obj(["charge"], {**_ALGEBRA_SOURCE, "charge": _MATRIX}, _ALG_ANY),
    "robertson": _obj(["state", "a", "b"], {"state": _STATE, "a": _MATRIX, "b": _MATRIX}),
    "observables": _obj(["a"], {"a": _MATRIX, "b": _MATRIX}),
    "oscillator": _obj(
        [],
        {
            "n": {"type": "integer", "minimum": 4},
            "s": {"type": "number", "exclusiveMinimum": 0},
            "hbar": {"type": "number", "exclusiveMinimum": 0},
        },
    ),
    "expression": _obj(
        ["expression"],
        {
            "expression": {"type": "string"},
            "coords": {"type": "integer", "minimum": 1},
            "hbar": {"type": ["string", "integer"]},
            "psi": {"type": "array", "items": {"type": ["string", "integer"]}},
        },
    ),
    "battery": _obj(
        [],
        {
            "degree": {"type": "integer", "minimum": 0},
            "pairs": {"type": "integer", "minimum": 1},
            "coords": {"type": "integer", "minimum": 1},
        },
    ),
    "weyl_modulus": _obj([], {"n": {"type": "integer", "minimum": 2}}),
    "weyl_pair": _obj(
        [],
        {
            "n": {"type": "integer", "minimum": 2},
            "r1": {"type": "object", "required": ["modulus", "u", "v"]},
            "r2": {"type": "object", "required": ["modulus", "u", "v"]},
        },
    ),
    "weyl_system": _obj(["system"], {"system": {"type": "object", "required": ["modulus", "u", "v"]}}),
}

# task -> payload schema; documents are interchangeable between tasks sharing a schema
TASKS = {
    "algebra generate": "generators",
    "algebra verify": "algebra",
    "algebra commutant": "algebra",
    "state expect": "state_observable",
    "state deviate": "state_observable",
    "state measure": "state_observable",
    "state separates": "state_family",
    "gns build": "algebra_state",
    "gns direct-sum": "state_family",
    "gns verify": "triple",
    "sectors decompose": "sector_algebra",
    "sectors phase-check": "phase",
    "sectors charge-check": "charge",
    "bounds robertson": "robertson",
    "bounds minimize": "observables",
    "bounds certify": "observables",
    "bounds collapse": "observables",
    "bounds weyl-cosine": "oscillator",
    "lambda parse": "expression",
    "lambda check": "battery",
    "lambda classical": "expression",
    "lambda quantum": "expression",
    "weyl build": "weyl_modulus",
    "weyl intertwine": "weyl_pair",
    "weyl verify": "weyl_system",
}

DOCUMENT_SCHEMA = {
    "type": "object",
    "required": ["version", "task", "inputs"],
    "properties": {
        "version": {"enum": [VERSION]},
        "task": {"enum": sorted(TASKS)},
        "inputs": {"type": "object"},
    },
}


def load_problem(path: str | None, task: str) -> dict:
    """Read and validate a problem document for ``task``; {} when no file is given."""
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from None
    validate_document(doc, task)
    return doc["inputs"]


def validate_document(doc, task: str) -> None:
    try:
        jsonschema.validate(doc, DOCUMENT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(f"problem document: {exc.message}") from None
    if TASKS[doc["task"]] != TASKS[task]:
        raise InputError(f"document task {doc['task']!r} does not fit command {task!r}")
    try:
        jsonschema.validate(doc["inputs"], PAYLOADS[TASKS[task]])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "inputs"
        raise InputError(f"inputs/{where}: {exc.message}") from None


def problem_document(task: str, inputs: dict) -> dict:
    return {"version": VERSION, "task": task, "inputs": inputs}


# ---------------------------------------------------------------- reports


@dataclass
class Report:
    """Command result: JSON-ready ``data``, optional text lines and CSV table."""

    data: dict
    lines: list[str] | None = None
    table_header: list[str] | None = None
    table_rows: list[list] = field(default_factory=list)
    failed: str | None = None


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _default_lines(data: dict, prefix: str = "") -> list[str]:
    out = []
    for k, v in data.items():
        if isinstance(v, dict) and v and not {"rows", "cols", "entries"} <= set(v):
            out.extend(_default_lines(v, f"{prefix}{k}."))
        elif isinstance(v, dict):
            out.append(f"{prefix}{k}: <matrix {v.get('rows')}x{v.get('cols')}>")
        elif isinstance(v, list) and v and isinstance(v[0], list):
            out.append(f"{prefix}{k}: <{len(v)} entries>")
        elif isinstance(v, list):
            out.append(f"{prefix}{k}: " + ", ".join(_fmt(x) for x in v))
        else:
            out.append(f"{prefix}{k}: {_fmt(v)}")
    return out


def emit_report(result: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.data, indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        lines = result.lines if result.lines is not None else _default_lines(result.data)
        return "".join(line + "\n" for line in lines)
    if fmt == "csv":
        if result.table_header is None:
            raise InputError("this command has no tabular output; use --format text or json")
        buf = io.StringIO()
        buf.write(",".join(result.table_header) + "\n")
        for row in result.table_rows:
            buf.write(",".join(repr(x) if isinstance(x, float) else str(x) for x in row) + "\n")
        return buf.getvalue()
    raise InputError(f"unsupported format {fmt!r}; choose from {', '.join(FORMATS)}")


# ---------------------------------------------------------------- input helpers


def _algebra(inp: dict):
    if "algebra" in inp:
        return algebra_from_json(inp["algebra"])
    gens = [matrix_from_json(g) for g in inp.get("generators", [])]
    kwargs = {"tol": float(inp["tol"])} if "tol" in inp else {}
    return generate_algebra(gens, n=inp.get("dim"), **kwargs)


def _need(inp: dict, task: str) -> dict:
    if not inp:
        raise InputError(f"{task} needs --file with a problem document")
    return inp


def _complex(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _optimizer(args, record_trace: bool = False) -> OptimizerConfig:
    cfg = OptimizerConfig(seed=args.seed, record_trace=record_trace)
    if getattr(args, "starts", None):
        cfg.starts = args.starts
    if getattr(args, "threshold", None) is not None:
        cfg.threshold = args.threshold
    if getattr(args, "no_grid", False):
        cfg.grid_check = False
    return cfg


def _bound_report(rep: cm.BoundReport, extra_lines: list[str] = ()) -> Report:
    data = rep.to_dict()
    lines = [
        f"objective: {rep.objective_kind}",
        f"infimum_estimate: {_fmt(rep.infimum_estimate)}",
        f"starts: {rep.starts} (converged {rep.converged_starts})",
        f"iterations_total: {rep.iterations_total}",
        f"seed: {rep.seed}",
    ]
    if rep.oracle_value is not None:
        lines.append(f"grid_oracle: {_fmt(rep.oracle_value)} (gap {rep.oracle_gap:.3e})")
    lines.extend(extra_lines)
    return Report(data, lines, ["start", "iteration", "objective"], [list(r) for r in rep.trace])


# ---------------------------------------------------------------- commands


def cmd_algebra_generate(args, inp):
    alg = _algebra(_need(inp, "algebra generate"))
    data = {
        "dim": alg.dim,
        "closure_residual": alg.closure_residual(),
        "orthonormality_residual": alg.orthonormality_residual(),
        "algebra": algebra_to_json(alg),
    }
    return Report(data, [f"dim: {alg.dim}", f"closure_residual: {alg.closure_residual():.3e}"])


def cmd_algebra_verify(args, inp):
    alg = _algebra(_need(inp, "algebra verify"))
    rep = verify_cstar_laws(alg, args.samples, args.seed)
    tol = 1e3 * np.finfo(float).eps * alg.ambient_dim
    lines = [f"{k}: {v:.3e}" for k, v in rep.residuals.items()] + [f"samples: {rep.samples}", f"seed: {rep.seed}"]
    data = rep.to_dict() | {"tolerance": tol, "passed": rep.passed(tol)}
    return Report(data, lines, None, [], None if rep.passed(tol) else "C*-law residual above tolerance")


def cmd_algebra_commutant(args, inp):
    alg = _algebra(_need(inp, "algebra commutant"))
    com = commutant(alg)
    return Report({"dim": com.dim, "algebra": algebra_to_json(com)}, [f"commutant_dim: {com.dim}"])


def _state_obs(inp):
    return state_from_json(inp["state"]), matrix_from_json(inp["observable"])


def cmd_state_expect(args, inp):
    s, a = _state_obs(_need(inp, "state expect"))
    v = states.expectation(s, a)
    return Report({"expectation": [v.real, v.imag]}, [f"expectation: {_fmt(v.real)}" + (f" + {_fmt(v.imag)}i" if v.imag else "")])


def cmd_state_deviate(args, inp):
    s, a = _state_obs(_need(inp, "state deviate"))
    d = states.deviation(s, a)
    return Report({"deviation": d}, [f"deviation: {_fmt(d)}"])


def cmd_state_measure(args, inp):
    s, a = _state_obs(_need(inp, "state measure"))
    rec = states.simulate_measurements(s, a, args.samples, args.seed)
    exp = states.expectation(s, a).real
    data = {
        "empirical_mean": rec.empirical_mean,
        "expectation": exp,
        "sample_count": rec.sample_count,
        "seed": rec.seed,
        "outcomes": rec.outcomes.tolist(),
    }
    lines = [f"empirical_mean: {_fmt(rec.empirical_mean)}", f"expectation: {_fmt(exp)}", f"samples: {rec.sample_count}", f"seed: {rec.seed}"]
    rows = [[i, float(x)] for i, x in enumerate(rec.outcomes)]
    return Report(data, lines, ["index", "outcome"], rows)


def cmd_state_separates(args, inp):
    inp = _need(inp, "state separates")
    alg = _algebra(inp)
    fam = [state_from_json(x) for x in inp["states"]]
    ok = states.separates(fam, alg)
    return Report({"separates": ok, "algebra_dim": alg.dim, "states": len(fam)}, [f"separates: {_fmt(ok)}"])


def cmd_gns_build(args, inp):
    inp = _need(inp, "gns build")
    alg = _algebra(inp)
    s = state_from_json(inp["state"])
    t = gns.gns_construct(alg, s)
    chk = gns.verify_representation(t, alg, s)
    doc = problem_document("gns verify", {"algebra": algebra_to_json(alg), "state": state_to_json(s), "triple": triple_to_json(t)})
    lines = [f"space_dim: {t.space_dim}", f"algebra_dim: {alg.dim}"] + [f"{k}: {v:.3e}" for k, v in chk.residuals.items()]
    return Report(doc, lines)


def cmd_gns_direct_sum(args, inp):
    inp = _need(inp, "gns direct-sum")
    alg = _algebra(inp)
    fam = [state_from_json(x) for x in inp["states"]]
    ds = gns.gns_direct_sum(alg, fam)
    data = {
        "space_dim": ds.space_dim,
        "summand_dims": list(ds.summand_dims),
        "separating": ds.separating,
        "faithful": ds.faithful,
        "max_norm_deficit": float(np.max(np.abs(ds.norm_deficits))),
    }
    return Report(data)


def cmd_gns_verify(args, inp):
    inp = _need(inp, "gns verify")
    alg = algebra_from_json(inp["algebra"])
    t = triple_from_json(inp["triple"])
    s = state_from_json(inp["state"]) if "state" in inp else None
    chk = gns.verify_representation(t, alg, s, seed=args.seed)
    tol = 10 * t.tol * max(1.0, alg.dim)
    ok = chk.passed(max(tol, 1e-8))
    data = chk.to_dict() | {"passed": ok}
    lines = [f"{k}: {v:.3e}" for k, v in chk.residuals.items()] + [f"cyclic_rank: {chk.cyclic_rank}/{chk.space_dim}"]
    return Report(data, lines, None, [], None if ok else "representation residual above tolerance")


def cmd_sectors_decompose(args, inp):
    inp = _need(inp, "sectors decompose")
    alg = _algebra(inp)
    kind = args.kind or inp.get("kind", "irreducible")
    dec = sectors.decompose(alg, kind, args.seed)
    res = dec.off_block_residual(alg)
    data = dec.to_dict() | {"off_block_residual": res}
    lines = [f"kind: {kind}", "blocks: " + " ".join(f"({o},{s})" for o, s in dec.blocks), f"off_block_residual: {res:.3e}"]
    return Report(data, lines, None, [], None if res < 1e-8 else "off-block residual above tolerance")


def cmd_sectors_phase_check(args, inp):
    inp = _need(inp, "sectors phase-check")
    alg = _algebra(inp)
    dec = sectors.decompose(alg, args.kind or inp.get("kind", "irreducible"), args.seed)
    rep = sectors.phase_observability(
        alg,
        dec,
        vector_from_json(inp["psi1"]),
        vector_from_json(inp["psi2"]),
        _complex(inp["c1"]),
        _complex(inp["c2"]),
        inp.get("phases"),
    )
    return Report(rep.to_dict(), [f"blocks: {rep.blocks[0]} {rep.blocks[1]}", f"variation: {rep.variation:.3e}", f"mixture_deviation: {rep.mixture_deviation:.3e}"])


def cmd_sectors_charge_check(args, inp):
    inp = _need(inp, "sectors charge-check")
    alg = _algebra(inp)
    ok = sectors.is_superselected(matrix_from_json(inp["charge"]), alg)
    return Report({"superselected": ok}, [f"superselected: {_fmt(ok)}"])


def cmd_bounds_robertson(args, inp):
    inp = _need(inp, "bounds robertson")
    s = state_from_json(inp["state"])
    a, b = matrix_from_json(inp["a"]), matrix_from_json(inp["b"])
    bound = cm.robertson_bound(s, a, b)
    prod = states.deviation(s, a) * states.deviation(s, b)
    data = {"bound": bound, "deviation_product": prod, "slack": prod - bound}
    return Report(data, [f"bound: {_fmt(bound)}", f"deviation_product: {_fmt(prod)}", f"slack: {prod - bound:.3e}"])


def _pair(inp, task, need_b=True):
    a = matrix_from_json(inp["a"])
    b = matrix_from_json(inp["b"]) if "b" in inp else None
    if need_b and b is None:
        raise InputError(f"{task} needs observables 'a' and 'b'")
    return a, b


def cmd_bounds_minimize(args, inp):
    inp = _need(inp, "bounds minimize")
    a, b = _pair(inp, "bounds minimize", need_b=args.kind != "single")
    if args.kind == "single":
        b = None
    rep = cm.minimize_deviation_functional(a, b, args.kind, _optimizer(args, args.format == "csv"))
    return _bound_report(rep)


def cmd_bounds_certify(args, inp):
    inp = _need(inp, "bounds certify")
    a, b = _pair(inp, "bounds certify")
    ok, rep = cm.certify_complementarity(a, b, _optimizer(args, args.format == "csv"))
    out = _bound_report(rep, [f"threshold: {_fmt(rep.extras['threshold'])}", f"complementary: {_fmt(ok)}"])
    out.data["complementary"] = ok
    return out


def cmd_bounds_collapse(args, inp):
    inp = _need(inp, "bounds collapse")
    a, b = _pair(inp, "bounds collapse")
    rep = cm.bounded_product_collapse(a, b, _optimizer(args))
    return Report(rep.to_dict(), None, None, [], None if rep.holds else "product infimum exceeds the collapse bound")


def cmd_bounds_weyl_cosine(args, inp):
    n = args.n or inp.get("n", 40)
    s = args.s if args.s is not None else inp.get("s", 1.0)
    hbar = args.hbar if args.hbar is not None else inp.get("hbar", 1.0)
    model = cm.build_oscillator(int(n), float(s), float(hbar))
    rep = cm.weyl_cosine_experiment(model, _optimizer(args, args.format == "csv"))
    ex = rep.extras
    extra = [
        f"reference (small-argument estimate): {_fmt(ex['reference'])}",
        f"ground_state_value: {_fmt(ex['ground_state_value'])}",
    ]
    if "half_truncation_infimum" in ex:
        extra += [
            f"truncation N={ex['truncation_dim']}: {_fmt(rep.infimum_estimate)}",
            f"truncation N={ex['half_truncation_dim']}: {_fmt(ex['half_truncation_infimum'])}",
            f"relative_change: {_fmt(ex['relative_change'])}",
        ]
    return _bound_report(rep, extra)


def _expr_inputs(args, inp):
    text = args.expr if args.expr is not None else inp.get("expression")
    if text is None:
        raise InputError("give an expression with --expr or --file")
    coords = args.coords or inp.get("coords", 1)
    return text, int(coords)


def _scalar_text(x: str) -> GaussianRational:
    c = parse(str(x), 1).constant()
    if c is None:
        raise InputError(f"{x!r} is not a scalar")
    return c


def cmd_lambda_parse(args, inp):
    text, s = _expr_inputs(args, inp)
    x = parse(text, s)
    canon = format_element(x)
    return Report({"canonical": canon, "coords": s, "degree": x.degree(), "terms": len(x.terms)}, [canon])


def cmd_lambda_check(args, inp):
    degree = args.degree if args.degree is not None else inp.get("degree", 4)
    pairs = args.pairs if args.pairs is not None else inp.get("pairs", 200)
    coords = args.coords or inp.get("coords", 3)
    rows = run_identity_battery(int(degree), int(pairs), args.seed, int(coords))
    data = {"rows": [{"name": r.name, "passed": r.passed, "total": r.total} for r in rows], "seed": args.seed, "degree": degree}
    failed = [r.name for r in rows if not r.ok]
    return Report(
        data,
        [r.line() for r in rows],
        ["identity", "passed", "total"],
        [[r.name, r.passed, r.total] for r in rows],
        f"identities failed: {', '.join(failed)}" if failed else None,
    )


def cmd_lambda_classical(args, inp):
    text, s = _expr_inputs(args, inp)
    x = parse(text, s)
    poly = specialize_classical(x)
    as_elem = LambdaElement({(0, a, b): c for (a, b), c in poly.items()}, s)
    canon = format_element(as_elem)
    return Report({"classical": canon}, [canon])


def cmd_lambda_quantum(args, inp):
    text, s = _expr_inputs(args, inp)
    hbar = _scalar_text(args.hbar if args.hbar is not None else inp.get("hbar", "1"))
    if not hbar.is_real():
        raise InputError("hbar must be real")
    psi_src = args.psi.split(",") if args.psi else inp.get("psi", ["1", "1", "1"])
    psi = [_scalar_text(c) for c in psi_src]
    out = specialize_quantum(parse(text, s), hbar.re, psi)
    txt = format_xpoly(out)
    coeffs = {str(k): format_scalar(v) for k, v in sorted(out.items())}
    return Report({"result": txt, "coefficients": coeffs, "hbar": format_scalar(hbar)}, [txt])


def _weyl_report(sys_, res: dict) -> Report:
    lines = [f"{k}: {v:.3e}" for k, v in res.items()]
    return Report({"system": sys_.to_dict(), "residuals": res}, lines)


def cmd_weyl_build(args, inp):
    n = args.n or inp.get("n")
    if n is None:
        raise InputError("give the modulus with --n")
    sys_ = weyl.schrodinger_system(int(n))
    return _weyl_report(sys_, weyl.verify_weyl_relations(sys_))


def cmd_weyl_verify(args, inp):
    if inp:
        sys_ = weyl_from_json(inp["system"])
    elif args.n:
        sys_ = weyl.schrodinger_system(args.n)
    else:
        raise InputError("give --n or --file with a system")
    res = weyl.verify_weyl_relations(sys_)
    out = _weyl_report(sys_, res)
    if max(res.values()) > 1e-8 * sys_.modulus:
        out.failed = "Weyl relation residual above tolerance"
    return out


def cmd_weyl_intertwine(args, inp):
    if "r1" in inp and "r2" in inp:
        r1, r2 = weyl_from_json(inp["r1"]), weyl_from_json(inp["r2"])
        g = None
    else:
        n = args.n or inp.get("n")
        if n is None:
            raise InputError("give --n (random conjugation) or --file with systems r1, r2")
        if args.seed is None:
            raise InputError("--seed is required for a random conjugation")
        r1 = weyl.schrodinger_system(int(n))
        g = weyl.haar_unitary(int(n), np.random.default_rng(args.seed))
        r2 = weyl.conjugated_system(r1, g)
    sol = weyl.solve_intertwiner(r1, r2)
    res = dict(sol.residuals)
    lines = [f"modulus: {r1.modulus}", f"null_dim: {sol.null_dim}"] + [f"{k}: {v:.3e}" for k, v in res.items()]
    data = {"modulus": r1.modulus, "null_dim": sol.null_dim, "residuals": res, "w": matrix_to_json(sol.w)}
    if len(sol.singular_values) > 1:
        data["second_smallest_singular_value"] = float(sol.singular_values[-2])
    if g is not None:
        dist = weyl.phase_distance(sol.w, g)
        data["phase_distance_to_generator"] = dist
        lines.append(f"phase_distance_to_generator: {dist:.3e}")
    lines.append("w:")
    lines.extend("  " + " ".join(f"{z.real:+.6f}{z.imag:+.6f}i" for z in row) for row in sol.w)
    failed = None
    if max(res.values()) > 1e-8 * r1.modulus:
        failed = "intertwiner residual above tolerance"
    return Report(data, lines, None, [], failed)


# ---------------------------------------------------------------- parser

COMMANDS = {
    "algebra": {
        "generate": (cmd_algebra_generate, "Close a set of generator matrices into a unital *-algebra (orthonormal basis).", False),
        "verify": (cmd_algebra_verify, "Check the C*-norm laws on seeded random elements of an algebra.", True),
        "commutant": (cmd_algebra_commutant, "Compute the commutant of an algebra as a null space.", False),
    },
    "state": {
        "expect": (cmd_state_expect, "Expectation Tr(rho A) of an observable in a state.", False),
        "deviate": (cmd_state_deviate, "Standard deviation of an observable in a state.", False),
        "measure": (cmd_state_measure, "Simulate Born-rule measurements and report the empirical mean.", True),
        "separates": (cmd_state_separates, "Decide whether a family of states separates the elements of an algebra.", False),
    },
    "gns": {
        "build": (cmd_gns_build, "Build the GNS representation of an (algebra, state) pair; JSON output feeds 'gns verify'.", False),
        "direct-sum": (cmd_gns_direct_sum, "Direct sum of GNS representations of a state family, with a faithfulness verdict.", False),
        "verify": (cmd_gns_verify, "Check representation residuals of a stored GNS triple.", True),
    },
    "sectors": {
        "decompose": (cmd_sectors_decompose, "Split the space into isotypic or irreducible blocks of an algebra.", True),
        "phase-check": (cmd_sectors_phase_check, "Measure how visible a relative phase between two sectors is.", True),
        "charge-check": (cmd_sectors_charge_check, "Test whether a charge commutes with every element of an algebra.", False),
    },
    "bounds": {
        "robertson": (cmd_bounds_robertson, "Commutator lower bound on the product of deviations in a given state.", False),
        "minimize": (cmd_bounds_minimize, "Multistart infimum of a deviation functional over pure states.", True),
        "certify": (cmd_bounds_certify, "Certify a positive state-independent lower bound on the sum of deviations.", True),
        "weyl-cosine": (cmd_bounds_weyl_cosine, "Infimum of the cosine-of-canonical-pair deviation functional on a truncated oscillator.", True),
        "collapse": (cmd_bounds_collapse, "Compare the product-of-deviations infimum with the single-deviation bound.", True),
    },
    "lambda": {
        "parse": (cmd_lambda_parse, "Parse an expression in q_i, p_i, Z and print its normal form.", False),
        "check": (cmd_lambda_check, "Run the seeded exact identity battery and print a pass/fail table.", True),
        "classical": (cmd_lambda_classical, "Specialize an expression to Z = 0 (commuting variables).", False),
        "quantum": (cmd_lambda_quantum, "Act with an expression as a differential operator (Z = i hbar) on a polynomial.", False),
    },
    "weyl": {
        "build": (cmd_weyl_build, "Build the clock and shift pair of a given modulus and report its relation residuals.", False),
        "intertwine": (cmd_weyl_intertwine, "Solve for the unitary intertwiner between two clock-and-shift systems.", False),
        "verify": (cmd_weyl_verify, "Report relation residuals of a clock-and-shift system.", False),
    },
}


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    top = _ArgParser(prog="obsalg", description="Finite-dimensional operator-algebra workbench.")
    groups = top.add_subparsers(dest="group", required=True, parser_class=_ArgParser)
    for gname, actions in COMMANDS.items():
        gp = groups.add_parser(gname, help=f"{gname} commands")
        sub = gp.add_subparsers(dest="action", required=True, parser_class=_ArgParser)
        for aname, (func, help_text, stochastic) in actions.items():
            p = sub.add_parser(aname, help=help_text, description=help_text)
            p.set_defaults(func=func, task=f"{gname} {aname}")
            p.add_argument("--file", help="problem document (JSON)")
            p.add_argument("--seed", type=int, required=stochastic, help="seed for the PCG64 generator")
            p.add_argument("--format", choices=FORMATS, default="text")
            p.add_argument("--output", help="write the report here instead of stdout")
            _extra_options(p, gname, aname)
    return top


def _extra_options(p, group: str, action: str) -> None:
    if (group, action) == ("algebra", "verify"):
        p.add_argument("--samples", type=int, default=100)
    if (group, action) == ("state", "measure"):
        p.add_argument("--samples", type=int, default=10_000)
    if group == "sectors" and action in ("decompose", "phase-check"):
        p.add_argument("--kind", choices=sectors.KINDS)
    if group == "bounds" and action in ("minimize", "certify", "collapse", "weyl-cosine"):
        p.add_argument("--starts", type=int)
        p.add_argument("--no-grid", action="store_true", help="skip the dense-grid cross-check")
    if (group, action) == ("bounds", "minimize"):
        p.add_argument("--kind", choices=cm.KINDS, default="sum")
    if (group, action) == ("bounds", "certify"):
        p.add_argument("--threshold", type=float)
    if (group, action) == ("bounds", "weyl-cosine"):
        p.add_argument("--n", type=int)
        p.add_argument("--s", type=float)
        p.add_argument("--hbar", type=float)
    if group == "lambda" and action != "check":
        p.add_argument("--expr")
        p.add_argument("--coords", type=int)
    if (group, action) == ("lambda", "quantum"):
        p.add_argument("--hbar", help="exact rational, e.g. 1 or 3/2")
        p.add_argument("--psi", help="comma-separated ascending coefficients, default 1,1,1")
    if (group, action) == ("lambda", "check"):
        p.add_argument("--degree", type=int)
        p.add_argument("--pairs", type=int)
        p.add_argument("--coords", type=int)
    if group == "weyl":
        p.add_argument("--n", type=int)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        inp = load_problem(args.file, args.task)
        report = args.func(args, inp)
        text = emit_report(report, args.format)
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    except (InputError, AlgebraError, LambdaError, jsonschema.ValidationError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # module-level validation errors (states, GNS, sectors, bounds, Weyl)
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    if report.failed:
        print(f"numerical failure: {report.failed}", file=stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
