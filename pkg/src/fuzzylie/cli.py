"""Command line entry point: ``fll check <suite>``.

Exit status is 0 when every report passes, 1 when any fails or errors,
and 2 for configuration or IO problems.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from fractions import Fraction
from typing import Callable, Iterator

from . import enveloping, fuzzy_core, fuzzy_lie, lie, spherical, topology
from .errors import DomainError
from .fuzzy_core import FiniteFuzzySet, SampledFuzzySet
from .groups import HeisenbergModel, SU2Model
from .report import ERROR, FAIL, PASS, CheckReport

ALGEBRAS = ("so3_cross", "sl2", "heisenberg")

DEFAULTS: dict = {
    "seed": 42,
    "format": "json",
    "fuzzy_core": {"trials": 200, "size": 5, "q": 10},
    "topology": {"grid_q": 10},
    "lie": {"samples": 100, "trunc": 20, "tol": 1e-10},
    "fuzzy_lie": {"grid": None},
    "pbw": {"algebras": list(ALGEBRAS), "trials": 1000, "word_degree": 5, "degree": 4},
    "symmetrize": {"trials": 50, "max_degree": 2, "tol": 1e-5, "step": 1e-4},
    "adjoint": {"samples": 100, "max_degree": 3, "tol_op": 1e-9, "trunc": None, "aut_samples": 20,
                "tol_aut": 1e-8, "tol_bracket": 1e-4, "step": 1e-4},
    "spherical": {"lmax": 8, "circle_nodes": 64, "euler_nodes": [32, 32, 32], "pairs": 200,
                  "gate_samples": 10000, "tol_fe": 1e-10, "tol_conv": 1e-6, "tol_eig": 1e-3,
                  "seed": None},
}


class ConfigError(Exception):
    pass


def merge_config(base: dict, override: dict, path: str = "") -> dict:
    """Merge ``override`` into a copy of ``base``; unknown keys are errors."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be an object")
            out[key] = merge_config(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return merge_config(DEFAULTS, data)


def expected_fail(rep: CheckReport, matches: Callable[[object], bool]) -> CheckReport:
    """A report that passes when ``rep`` failed with a matching witness."""
    ok = rep.status == FAIL and matches(rep.witness)
    return CheckReport(f"{rep.name}[expected-fail]", PASS if ok else FAIL, max_error=rep.max_error,
                       witness=rep.witness if rep.witness is not None else {"observed_status": rep.status},
                       params={**rep.params, "expected_status": FAIL, "observed_status": rep.status},
                       duration_ms=rep.duration_ms)


class Context:
    def __init__(self, cfg: dict, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.used: set[str] = set()

    def run(self, fn: Callable[..., CheckReport], *args, **kwargs) -> CheckReport:
        key = f"{fn.__module__}.{fn.__qualname__}"
        self.used.add(key)
        try:
            return fn(*args, **kwargs)
        except (DomainError, ArithmeticError, RuntimeError, ValueError) as exc:
            return CheckReport(key, ERROR, params={"error": f"{type(exc).__name__}: {exc}"})


# -- suites --------------------------------------------------------------

def suite_fuzzy_core(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["fuzzy_core"]
    yield ctx.run(fuzzy_core.lattice_laws_check, trials=c["trials"], size=c["size"], q=c["q"], seed=ctx.seed)


def _pts(*names):
    return list(names)


def suite_topology(ctx: Context) -> Iterator[CheckReport]:
    q = ctx.cfg["topology"]["grid_q"]
    T = topology
    pts = _pts("a", "b", "c")
    gamma = FiniteFuzzySet.whole(pts)
    indiscrete = T.FuzzyTopSpace(gamma, T.indiscrete_family(gamma, q), q)
    yield ctx.run(T.is_fuzzy_topology, indiscrete)

    crisp = {s: FiniteFuzzySet.crisp(pts, [s]) for s in pts}
    broken = T.FuzzyTopSpace(gamma, [FiniteFuzzySet.empty(pts), gamma, crisp["a"], crisp["b"]], 1)
    want_missing = FiniteFuzzySet.crisp(pts, ["a", "b"])
    yield expected_fail(ctx.run(T.is_fuzzy_topology, broken),
                        lambda w: w["axiom"] == "ii" and set(w["pair"]) == {crisp["a"], crisp["b"]}
                        and w["missing"] == want_missing)

    small = _pts(0, 1)
    g2 = FiniteFuzzySet.whole(small)
    power = T.FuzzyTopSpace(g2, T.power_family(g2, 4), 4)
    yield ctx.run(T.is_fuzzy_topology, power)
    yield ctx.run(T.is_open_base, power.family, power)

    discrete = T.FuzzyTopSpace(g2, T.power_family(g2, 2), 2)
    yield ctx.run(T.is_hausdorff, discrete)
    half = FiniteFuzzySet.constant(pts, Fraction(1, 2))
    compact_space = T.FuzzyTopSpace(gamma, [FiniteFuzzySet.empty(pts), half, gamma], 2)
    yield ctx.run(T.is_compact, compact_space, Fraction(1, 4))
    yield ctx.run(T.is_connected, T.FuzzyTopSpace(gamma, [FiniteFuzzySet.empty(pts), gamma], 1))
    sep_space = T.FuzzyTopSpace(g2, [FiniteFuzzySet.empty(small), FiniteFuzzySet.crisp(small, [0]),
                                     FiniteFuzzySet.crisp(small, [1]), g2], 1)
    yield ctx.run(T.is_separated, g2, sep_space)
    ident = T.ProperFunction(indiscrete, indiscrete, lambda x: x)
    yield ctx.run(T.is_fuzzy_homeomorphism, ident)
    yield ctx.run(T.is_fuzzy_continuous, ident)
    yield ctx.run(T.is_fuzzy_open, ident)

    z3 = [0, 1, 2]
    g3 = FiniteFuzzySet.whole(z3)
    yield ctx.run(T.is_compatible_group_topology, T.cyclic_group_table(3),
                  T.FuzzyTopSpace(g3, T.indiscrete_family(g3, q), q))


def suite_lie(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["lie"]
    for name in _algebras(ctx, ALGEBRAS):
        yield ctx.run(lie.jacobi_check, lie.builtin(name))
    bad = lie.LieAlgebraSpec.from_brackets("not_antisymmetric", ("X1", "X2", "X3"),
                                           {(0, 1): {2: 1}, (1, 0): {2: 1}}, antisymmetrize=False)
    yield expected_fail(ctx.run(lie.jacobi_check, bad),
                        lambda w: w["axiom"] == "antisymmetry" and tuple(w["indices"]) == (0, 1, 2))
    yield ctx.run(lie.exp_ad_check, lie.builtin("so3_cross"), (0, 0, 0), trunc=1, tol=0)
    yield ctx.run(lie.exp_ad_sweep_check, lie.builtin("so3_cross"), samples=c["samples"], trunc=c["trunc"],
                  tol=c["tol"], seed=ctx.seed)
    yield ctx.run(lie.exp_ad_sweep_check, lie.builtin("heisenberg"), samples=c["samples"], trunc=3, tol=0,
                  seed=ctx.seed)


def _patched_span_e1() -> fuzzy_lie.FuzzyLieSet:
    # 1 on span{e1}, 3/5 on the rest of span{e1, e2}: a fuzzy subspace, but [e1, e2] = e3 drops to 0
    rule = fuzzy_lie.PiecewiseRule([("000", 1), ("n00", 1), ("*n0", Fraction(3, 5))])
    grid = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return fuzzy_lie.FuzzyLieSet("so3_cross", SampledFuzzySet(3, rule, grid), (0, 1, -1))


def _heisenberg_center() -> fuzzy_lie.FuzzyLieSet:
    rule = fuzzy_lie.PiecewiseRule([("00*", 1)])
    grid = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (2, -1, 3), (0, 0, 2)]
    return fuzzy_lie.FuzzyLieSet("heisenberg", SampledFuzzySet(3, rule, grid), (0, 1, -1, 2))


def suite_fuzzy_lie(ctx: Context) -> Iterator[CheckReport]:
    grid = ctx.cfg["fuzzy_lie"]["grid"]
    F = fuzzy_lie.example_2_2(grid)
    yield ctx.run(fuzzy_lie.is_fuzzy_subspace, F)
    yield ctx.run(fuzzy_lie.is_fuzzy_subalgebra, F)
    ones = fuzzy_lie.FuzzyLieSet("so3_cross", SampledFuzzySet(3, lambda _: 1, F.grid), F.scalars)
    yield ctx.run(fuzzy_lie.is_fuzzy_ideal, ones)
    yield expected_fail(ctx.run(fuzzy_lie.is_fuzzy_subalgebra, _patched_span_e1()),
                        lambda w: w.kind == "bracket" and w.points["[s,t]"] == (0, 0, 1))
    yield ctx.run(fuzzy_lie.is_fuzzy_ideal, _heisenberg_center())


EXPECTED_IDEAL_WITNESS = {"s": (1, 0, 0), "t": (1, 1, 1), "[s,t]": (0, -1, 1),
                          "lhs": Fraction(0), "rhs": Fraction(1, 2)}


def _matches_example_witness(w) -> bool:
    return (w is not None and w.kind == "ideal-bracket"
            and all(tuple(w.points[k]) == EXPECTED_IDEAL_WITNESS[k] for k in ("s", "t", "[s,t]"))
            and w.lhs == EXPECTED_IDEAL_WITNESS["lhs"] and w.rhs == EXPECTED_IDEAL_WITNESS["rhs"])


def suite_example(ctx: Context) -> Iterator[CheckReport]:
    F = fuzzy_lie.example_2_2()
    yield ctx.run(fuzzy_lie.is_fuzzy_subalgebra, F)
    yield expected_fail(ctx.run(fuzzy_lie.is_fuzzy_ideal, F), _matches_example_witness)


def _algebras(ctx: Context, default) -> list[str]:
    return [ctx.cfg["_algebra"]] if ctx.cfg.get("_algebra") else list(default)


def suite_pbw(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["pbw"]
    degree = ctx.cfg.get("_degree") or c["degree"]
    for name in _algebras(ctx, c["algebras"]):
        L = lie.builtin(name)
        yield ctx.run(enveloping.pbw_confluence_check, L, trials=c["trials"], max_degree=c["word_degree"],
                      seed=ctx.seed)
        yield ctx.run(enveloping.bijectivity_check, L, max_degree=degree)


def suite_symmetrize(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["symmetrize"]
    for model in ("su2", "heisenberg"):
        yield ctx.run(enveloping.eq3_consistency_check, model, trials=c["trials"], max_degree=c["max_degree"],
                      tol=c["tol"], step=c["step"], seed=ctx.seed)
    yield ctx.run(enveloping.pinned_value_check, tol=c["tol"], step=c["step"])


def suite_adjoint(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["adjoint"]
    for model in ("su2", "heisenberg"):
        yield ctx.run(enveloping.operator_ad_check, model, samples=c["samples"], max_degree=c["max_degree"],
                      tol=c["tol_op"], trunc=c["trunc"], seed=ctx.seed)
    for name in ("so3_cross", "heisenberg"):
        yield ctx.run(enveloping.automorphism_check, name, samples=c["aut_samples"],
                      max_degree=c["max_degree"], tol=c["tol_aut"], trunc=c["trunc"], seed=ctx.seed)
    for name in ALGEBRAS:
        yield ctx.run(enveloping.derivation_check, name, seed=ctx.seed)
    g_su2 = SU2Model.exp([0.3, -0.7, 1.1])
    g_heis = HeisenbergModel.exp([0.3, 0.2, -0.4])
    step, tol = c["step"], c["tol_bracket"]
    yield ctx.run(enveloping.vector_field_bracket_check, "su2", (1, 0, 0), (0, 1, 0), lambda q: q.w, g_su2,
                  step=step, tol=tol)
    yield ctx.run(enveloping.vector_field_bracket_check, "heisenberg", (1, 0, 0), (0, 1, 0),
                  lambda e: float(e.c), g_heis, step=step, tol=tol)
    yield ctx.run(enveloping.vector_field_bracket_check, "su2", (1, 2, 0), (2, 4, 0), lambda q: q.w, g_su2,
                  step=step, tol=tol)


def _sph_seed(ctx: Context) -> int:
    s = ctx.cfg["spherical"]["seed"]
    return ctx.seed if ctx.cfg.get("_seed_override") or s is None else s


def suite_spherical(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["spherical"]
    lmax = ctx.cfg.get("_lmax") if ctx.cfg.get("_lmax") is not None else c["lmax"]
    seed = _sph_seed(ctx)
    quad = spherical.CircleQuadrature(c["circle_nodes"])
    yield ctx.run(spherical.normalization_check, lmax)
    for l in range(lmax + 1):
        yield ctx.run(spherical.functional_equation_residual, spherical.zonal(l), quad=quad, tol=c["tol_fe"],
                      n_pairs=c["pairs"], seed=seed)
    control = spherical.HeightFunction(lambda u: u ** 2, label="h^2")
    yield expected_fail(ctx.run(spherical.functional_equation_residual, control, quad=quad, tol=c["tol_fe"],
                                n_pairs=c["pairs"], seed=seed),
                        lambda w: abs(w["average"] - w["product"]) > 1e-2)
    for l in range(min(lmax, 8) + 1):
        yield ctx.run(spherical.bi_invariance_check, spherical.zonal(l), seed=seed)
    yield expected_fail(ctx.run(spherical.bi_invariance_check, lambda q: q[..., 1], seed=seed, label="x"),
                        lambda w: w["difference"] > 1e-12)
    yield ctx.run(spherical.gelfand_homomorphism_check, lmax=lmax,
                  quads=[spherical.EulerQuadrature(*c["euler_nodes"])], tol=c["tol_conv"], seed=seed)
    for l in range(1, 7):
        yield ctx.run(spherical.casimir_eigen_ratio, l, tol=c["tol_eig"], seed=seed)


def suite_gate(ctx: Context) -> Iterator[CheckReport]:
    c = ctx.cfg["spherical"]
    seed = _sph_seed(ctx)
    yield ctx.run(spherical.gate_check, n_samples=c["gate_samples"], seed=seed)
    affine = spherical.HeightFunction(lambda u: (1 + u) / 2, label="(1+h)/2")
    yield ctx.run(spherical.tcut_nesting_check, affine, (0.25, 0.5, 0.75), n=c["gate_samples"], seed=seed)


SUITES: dict[str, tuple[Callable[[Context], Iterator[CheckReport]], tuple]] = {
    "fuzzy-core": (suite_fuzzy_core, (fuzzy_core.lattice_laws_check,)),
    "topology": (suite_topology, (topology.is_fuzzy_topology, topology.is_open_base, topology.is_hausdorff,
                                  topology.is_compact, topology.is_connected, topology.is_separated,
                                  topology.is_fuzzy_homeomorphism, topology.is_fuzzy_continuous,
                                  topology.is_fuzzy_open, topology.is_compatible_group_topology)),
    "lie": (suite_lie, (lie.jacobi_check, lie.exp_ad_check, lie.exp_ad_sweep_check)),
    "fuzzy-lie": (suite_fuzzy_lie, (fuzzy_lie.is_fuzzy_subspace, fuzzy_lie.is_fuzzy_subalgebra,
                                    fuzzy_lie.is_fuzzy_ideal)),
    "pbw": (suite_pbw, (enveloping.pbw_confluence_check, enveloping.bijectivity_check)),
    "symmetrize": (suite_symmetrize, (enveloping.eq3_consistency_check, enveloping.pinned_value_check)),
    "adjoint": (suite_adjoint, (enveloping.operator_ad_check, enveloping.automorphism_check,
                                enveloping.derivation_check, enveloping.vector_field_bracket_check)),
    "spherical": (suite_spherical, (spherical.normalization_check, spherical.functional_equation_residual,
                                    spherical.bi_invariance_check, spherical.gelfand_homomorphism_check,
                                    spherical.casimir_eigen_ratio)),
    "gate": (suite_gate, (spherical.gate_check, spherical.tcut_nesting_check)),
    "example-2-2": (suite_example, (fuzzy_lie.is_fuzzy_subalgebra, fuzzy_lie.is_fuzzy_ideal)),
}


def checker_key(fn) -> str:
    return f"{fn.__module__}.{fn.__qualname__}"


def listing() -> list[tuple[str, str]]:
    return [(suite, checker_key(fn)) for suite, (_, fns) in SUITES.items() for fn in fns]


def run(cfg: dict, suites: list[str], seed: int) -> tuple[list[CheckReport], Context]:
    ctx = Context(cfg, seed)
    reports: list[CheckReport] = []
    for name in suites:
        reports.extend(SUITES[name][0](ctx))
    return reports, ctx


def exit_code(reports: list[CheckReport]) -> int:
    return 0 if all(r.status == PASS for r in reports) else 1


def render(reports: list[CheckReport], fmt: str, timing: bool = True) -> str:
    if not timing:
        for r in reports:
            r.duration_ms = 0
    if fmt == "text":
        return "\n".join(r.text_line() for r in reports)
    return json.dumps([r.to_dict() for r in reports], indent=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fll", description="Mechanical checks for fuzzy Lie theory.")
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", help="run verification suites")
    check.add_argument("suite", nargs="?", choices=[*SUITES, "all"], help="suite to run")
    check.add_argument("--list", action="store_true", help="list suites and the checkers they reach")
    check.add_argument("--config", metavar="FILE", help="JSON config merged over the defaults")
    check.add_argument("--format", choices=("json", "text"), default=None)
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--algebra", choices=ALGEBRAS, default=None)
    check.add_argument("--degree", type=int, default=None, help="max degree for the bijectivity check")
    check.add_argument("--lmax", type=int, default=None)
    check.add_argument("--no-timing", action="store_true", help="report duration_ms as 0 (reproducible output)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        for suite, key in listing():
            print(f"{suite}\t{key}")
        return 0
    if args.suite is None:
        print("fll check: a suite name is required (or --list)", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        env_seed = os.environ.get("FLL_SEED")
        if args.seed is not None:
            seed = args.seed
        elif env_seed is not None:
            try:
                seed = int(env_seed)
            except ValueError:
                raise ConfigError(f"FLL_SEED must be an integer, got {env_seed!r}") from None
        else:
            seed = cfg["seed"]
        if not isinstance(seed, int):
            raise ConfigError("config key 'seed' must be an integer")
        fmt = args.format or cfg["format"]
        if fmt not in ("json", "text"):
            raise ConfigError(f"config key 'format' must be json or text, got {fmt!r}")
    except ConfigError as exc:
        print(f"fll: {exc}", file=sys.stderr)
        return 2
    cfg["_algebra"] = args.algebra
    cfg["_degree"] = args.degree
    cfg["_lmax"] = args.lmax
    cfg["_seed_override"] = args.seed is not None or os.environ.get("FLL_SEED") is not None
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    try:
        reports, _ = run(cfg, suites, seed)
    except (KeyError, TypeError) as exc:
        print(f"fll: bad configuration value: {exc}", file=sys.stderr)
        return 2
    print(render(reports, fmt, timing=not args.no_timing))
    return exit_code(reports)


if __name__ == "__main__":
    sys.exit(main())
