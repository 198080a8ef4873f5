"""Command-line front end.

Two commands: `spectrum` prints a truncated spectrum with its derived
constants; `verify` runs the claim pipelines (weak, character, similarity,
derivations, or all), writes report files, prints one summary line per check
naming the matching acceptance test, and exits 0 only if every verdict holds.
Reports are byte-identical across runs with the same configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

from .amenability import (approximate_identity_steps, bai_defect, idempotent_E,
                          idempotent_partial_sum, membership_residual, report_from_steps,
                          derivation_space, generation_defect, unit_approximation_steps)
from .polynomials import Polynomial, sup_norm
from .reports import ConvergenceReport, write_report
from .scalars import as_fraction, exact_sqrt
from .similarity import conjugate_by_upper_unipotent, minimal_intertwiner, similarity_growth_sweep
from .spectrum import (DiagonalOperator, SpectrumSequence, apply_poly_to_block, build_T,
                       make_spectrum, operator_norm)

WEAK_DEFAULT_COUNT = 64
CHARACTER_DEFAULT_COUNT = 16
SPECTRUM_DEFAULT_COUNT = 16
MEMBERSHIP_TRIALS = 100
MEMBERSHIP_SEED = 7
VERIFY_TARGETS = ("weak", "character", "similarity", "derivations")


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    kind: str
    ratio: Fraction
    count: int | None
    values: tuple | None
    truncations: tuple[int, ...]
    degrees: tuple[int, ...]
    tol_algebraic: float
    tol_analytic: float
    fmt: str
    out: str

    def canonical(self) -> dict:
        return {
            "spectrum": {
                "kind": self.kind,
                "ratio": str(self.ratio),
                "count": self.count,
                "values": None if self.values is None else [str(v) for v in self.values],
            },
            "truncations": list(self.truncations),
            "degrees": list(self.degrees),
            "tol_algebraic": self.tol_algebraic,
            "tol_analytic": self.tol_analytic,
            "format": self.fmt,
        }


def config_hash(cfg: RunConfig) -> str:
    blob = json.dumps(cfg.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str
    test_ref: str


def _parse_int_list(text: str, field: str) -> tuple[int, ...]:
    try:
        items = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"{field}: expected a comma-separated integer list")
    if not items:
        raise ConfigError(f"{field}: must not be empty")
    return items


def _parse_degrees(text: str) -> tuple[int, ...]:
    if ":" in text:
        lo_s, _, hi_s = text.partition(":")
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise ConfigError("degrees: expected 'a:b' or a comma-separated list")
        if lo < 2 or hi < lo:
            raise ConfigError("degrees: range bounds must satisfy 2 <= a <= b")
        out = []
        k = lo
        while k <= hi:
            out.append(k)
            k *= 2
        return tuple(out)
    return _parse_int_list(text, "degrees")


def _validate_increasing(items: Sequence[int], field: str):
    if any(b <= a for a, b in zip(items, items[1:])):
        raise ConfigError(f"{field}: must be strictly increasing")
    if any(x < 1 for x in items):
        raise ConfigError(f"{field}: entries must be positive")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg: dict = {}
    if getattr(args, "config", None):
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config: file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})")
    spec_cfg = file_cfg.get("spectrum", {})

    kind = args.kind or spec_cfg.get("kind", "geometric")
    if kind not in ("geometric", "harmonic", "explicit"):
        raise ConfigError(f"spectrum.kind: unknown kind {kind!r}")
    ratio_raw = args.ratio if args.ratio is not None else spec_cfg.get("ratio", 0.5)
    try:
        ratio = as_fraction(ratio_raw)
    except (TypeError, ValueError):
        raise ConfigError("spectrum.ratio: not a number")
    count = args.count if args.count is not None else spec_cfg.get("count")
    if count is not None:
        count = int(count)
        if count < 1:
            raise ConfigError("count: must be a positive integer")
    values = spec_cfg.get("values")
    if values is not None:
        values = tuple(as_fraction(v) for v in values)

    if args.truncations is not None:
        truncations = _parse_int_list(args.truncations, "truncations")
    else:
        truncations = tuple(int(x) for x in file_cfg.get("truncations", (4, 8, 16, 20)))
    _validate_increasing(truncations, "truncations")

    if args.degrees is not None:
        degrees = _parse_degrees(args.degrees)
    else:
        degrees = tuple(int(x) for x in file_cfg.get("degrees", (8, 16, 32, 64)))
    _validate_increasing(degrees, "degrees")
    if any(k < 2 for k in degrees):
        raise ConfigError("degrees: entries must be at least 2")

    tol_algebraic = args.tol_algebraic if args.tol_algebraic is not None \
        else float(file_cfg.get("tol_algebraic", 1e-12))
    tol_analytic = args.tol_analytic if args.tol_analytic is not None \
        else float(file_cfg.get("tol_analytic", 1e-3))
    if tol_algebraic <= 0:
        raise ConfigError("tol_algebraic: must be positive")
    if tol_analytic <= 0:
        raise ConfigError("tol_analytic: must be positive")

    fmt = args.format or file_cfg.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: must be 'csv' or 'json', got {fmt!r}")
    out = args.out or file_cfg.get("out", "reports")

    cfg = RunConfig(kind, ratio, count, values, truncations, degrees,
                    float(tol_algebraic), float(tol_analytic), fmt, str(out))
    _spectrum_at(cfg, _default_count(cfg, SPECTRUM_DEFAULT_COUNT))  # validates spectrum fields
    return cfg


def _default_count(cfg: RunConfig, fallback: int) -> int:
    if cfg.count is not None:
        return cfg.count
    if cfg.kind == "explicit" and cfg.values is not None:
        return len(cfg.values)
    return fallback


def _spectrum_at(cfg: RunConfig, count: int) -> SpectrumSequence:
    try:
        if cfg.kind == "explicit":
            if cfg.values is None:
                raise ConfigError("spectrum.values: required for an explicit spectrum")
            if count > len(cfg.values):
                raise ConfigError("truncations: exceed the explicit spectrum length")
            return make_spectrum("explicit", values=cfg.values[:count])
        return make_spectrum(cfg.kind, count, ratio=cfg.ratio)
    except ValueError as exc:
        raise ConfigError(str(exc))


# --- verify pipelines ---------------------------------------------------------

def _verify_weak(cfg: RunConfig):
    spectrum = _spectrum_at(cfg, _default_count(cfg, WEAK_DEFAULT_COUNT))
    m = len(spectrum)
    tol = cfg.tol_algebraic

    rows = []
    exact_zero = 0
    worst = 0.0
    norm_dev = 0.0
    for n in range(1, m + 1):
        e_n = idempotent_E(n, spectrum).operator
        defect_op = (e_n @ e_n) - e_n
        if defect_op.is_zero():
            exact_zero += 1
        resid = operator_norm(defect_op.to_float())
        worst = max(worst, resid)
        norm = operator_norm(e_n.to_float())
        closed = float(1 / spectrum.lam(n) + 1) ** 0.5
        norm_dev = max(norm_dev, abs(norm - closed))
        rows.append((n, resid, norm, closed))
    idem_report = ConvergenceReport(("index", "residual", "u_norm", "q_bound"),
                                    tuple(rows), worst <= tol, norm_dev <= tol, tol)
    checks = [
        Check("weak.idempotency", exact_zero == m and worst <= tol,
              f"exact zeros {exact_zero}/{m}, max float residual {worst!r}",
              "tests/test_acceptance.py::test_c01_idempotency"),
    ]

    rng = random.Random(MEMBERSHIP_SEED)
    T = build_T(spectrum)
    mem_rows = []
    mem_worst = 0.0
    for trial in range(1, MEMBERSHIP_TRIALS + 1):
        degree = rng.randint(1, 16)
        coeffs = [Fraction(0)] + [Fraction(rng.randint(-99, 99), rng.randint(1, 12))
                                  for _ in range(degree)]
        p = Polynomial(tuple(coeffs))
        image = apply_poly_to_block(p.coefficients, T)
        resid = membership_residual(image, spectrum)
        mem_worst = max(mem_worst, resid)
        mem_rows.append((trial, resid, operator_norm(image.to_float()),
                         sup_norm(p, spectrum)))
    mem_report = ConvergenceReport(("index", "residual", "u_norm", "q_bound"),
                                   tuple(mem_rows), mem_worst == 0.0, True, 0.0)
    checks.append(Check("weak.membership", mem_worst == 0.0,
                        f"{MEMBERSHIP_TRIALS} random polynomials, max residual {mem_worst!r}",
                        "tests/test_acceptance.py::test_c02_membership"))

    gen_rows = []
    closed_dev = 0.0
    defects = []
    running_sum = None
    for part in range(1, m + 1):
        d = generation_defect(part, spectrum)
        defects.append(d)
        tail = 0.0 if part == m else \
            float(spectrum.lam(part + 1) + spectrum.lam(part + 1) ** 2) ** 0.5
        closed_dev = max(closed_dev, abs(d - tail))
        term = idempotent_E(part, spectrum).operator.scale(spectrum.lam(part))
        running_sum = term if running_sum is None else running_sum + term
        gen_rows.append((part, d, operator_norm(running_sum.to_float()), tail))
    decreasing = all(b < a for a, b in zip(defects, defects[1:]))
    reconstructed = (build_T(spectrum) - idempotent_partial_sum(m, spectrum)).is_zero()
    gen_report = ConvergenceReport(("index", "residual", "u_norm", "q_bound"),
                                   tuple(gen_rows), defects[-1] <= tol,
                                   closed_dev <= tol and decreasing, tol)
    checks.append(Check("weak.generation",
                        closed_dev <= tol and decreasing and reconstructed and defects[-1] == 0.0,
                        f"max closed-form deviation {closed_dev!r}, strictly decreasing: "
                        f"{decreasing}, exact reconstruction: {reconstructed}",
                        "tests/test_acceptance.py::test_c03_generation"))

    files = [("weak_idempotency", idem_report), ("weak_membership", mem_report),
             ("weak_generation", gen_report)]
    return checks, files


def _verify_character(cfg: RunConfig):
    spectrum = _spectrum_at(cfg, _default_count(cfg, CHARACTER_DEFAULT_COUNT))
    m = len(spectrum)
    checks = []
    files = []
    for n in (1, 2, 3):
        if n > m:
            continue
        steps = approximate_identity_steps(n, spectrum, cfg.degrees)
        report = report_from_steps(steps, cfg.tol_analytic)
        monotone = all(b.residual <= a.residual + 1e-12 for a, b in zip(steps, steps[1:]))
        mvt_all = all(s.mvt_ok for s in steps)
        passed = report.threshold_met and report.bounded and monotone
        checks.append(Check(f"character.kernel_n{n}", passed,
                            f"top residual {steps[-1].residual!r} (tol {cfg.tol_analytic!r}), "
                            f"monotone: {monotone}, norms bounded: {report.bounded}",
                            "tests/test_acceptance.py::test_c05_bounded_approximate_identity"))
        checks.append(Check(f"character.mvt_n{n}", mvt_all,
                            f"mean-value bound held at every degree: {mvt_all}",
                            "tests/test_acceptance.py::test_c06_mvt_bound"))
        files.append((f"character_kernel_n{n}", report))

    unit_steps = unit_approximation_steps(spectrum, cfg.degrees)
    unit_report = report_from_steps(unit_steps, None)
    checks.append(Check("character.unit_trend",
                        unit_report.threshold_met and unit_report.bounded,
                        f"residuals decrease {unit_steps[0].residual!r} -> "
                        f"{unit_steps[-1].residual!r}, norms bounded: {unit_report.bounded}",
                        "tests/test_amenability.py::test_unit_approximation_trend"))
    files.append(("character_unit", unit_report))

    identity_sum = idempotent_E(1, spectrum).operator
    for n in range(2, m + 1):
        identity_sum = identity_sum + idempotent_E(n, spectrum).operator
    T = build_T(spectrum)
    unit_exact = ((T @ identity_sum) - T).is_zero()
    checks.append(Check("character.unit_exact_identity", unit_exact,
                        "unweighted idempotent sum is an exact identity on the truncation",
                        "tests/test_amenability.py::test_unit_exact_identity"))

    jordan2 = [[0, 1], [0, 0]]
    jordan3 = [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    bai_rows = []
    bai_ok = True
    for i, c in enumerate((10.0, 100.0, 1000.0), start=1):
        defect = bai_defect(jordan2, c)
        bai_rows.append((i, abs(defect - 1.0), defect, c))
        bai_ok = bai_ok and abs(defect - 1.0) <= 1e-9
    unit_defect = bai_defect([[1.0]], 10.0)
    bai_rows.append((4, unit_defect, unit_defect, 10.0))
    bai_ok = bai_ok and unit_defect <= 1e-9
    floor_defect = bai_defect(jordan3, 1000.0)
    bai_rows.append((5, max(0.0, 0.1 - floor_defect), floor_defect, 1000.0))
    bai_ok = bai_ok and floor_defect > 0.1
    bai_report = ConvergenceReport(("index", "residual", "u_norm", "q_bound"),
                                   tuple(bai_rows), bai_ok, True, 1e-9)
    checks.append(Check("character.bai_defect", bai_ok,
                        f"nilpotent defect pinned at 1 for caps 10..1000, invertible defect "
                        f"{unit_defect!r}, 3x3 floor {floor_defect!r}",
                        "tests/test_acceptance.py::test_c08_bai_defect"))
    files.append(("character_bai", bai_report))
    return checks, files


def _verify_similarity(cfg: RunConfig):
    factory = lambda m: _spectrum_at(cfg, m)
    report = similarity_growth_sweep(factory, cfg.truncations)
    residual_ok = all(minimal_intertwiner(factory(m)).residual == 0.0
                      for m in cfg.truncations)
    top = _spectrum_at(cfg, cfg.truncations[-1])
    T = build_T(top)
    negative_root_inverse = DiagonalOperator(tuple(-1 / exact_sqrt(v) for v in top.values))
    conj = conjugate_by_upper_unipotent(T, negative_root_inverse)
    zeroed = conj.b12.is_zero()
    checks = [
        Check("similarity.growth", report.bounded,
              "intertwiner norms strictly increasing: "
              + " ".join(repr(r[1]) for r in report.rows),
              "tests/test_acceptance.py::test_c09_similarity"),
        Check("similarity.exact_solve", residual_ok,
              "intertwiner residual exactly zero at every truncation",
              "tests/test_similarity.py::test_minimal_intertwiner_residual_exact"),
        Check("similarity.conjugation_zeroing", zeroed,
              "conjugation by the negative inverse root zeroes the upper-right block exactly",
              "tests/test_acceptance.py::test_c09_similarity"),
    ]
    return checks, [("similarity_growth", report)]


def _verify_derivations(cfg: RunConfig):
    rows = []
    ok = True
    case = 0
    for dim in range(1, 5):
        for mask in range(1, 2 ** dim):
            case += 1
            diag = [[Fraction(int(i == j and (mask >> i) & 1)) for j in range(dim)]
                    for i in range(dim)]
            space = derivation_space([diag])
            rows.append((case, space.dimension, space.dimension, space.algebra_dim))
            ok = ok and space.dimension == 0
    nilpotent_dims = []
    for size in (2, 3, 4):
        case += 1
        jordan = [[Fraction(int(j == i + 1)) for j in range(size)] for i in range(size)]
        space = derivation_space([jordan])
        nilpotent_dims.append(space.dimension)
        rows.append((case, 0 if space.dimension >= 1 else 1,
                     space.dimension, space.algebra_dim))
        ok = ok and space.dimension >= 1
    report = ConvergenceReport(("index", "residual", "u_norm", "q_bound"),
                               tuple(rows), ok, True, 0.0)
    checks = [Check("derivations.dichotomy", ok,
                    f"idempotent-generated algebras all trivial; nilpotent dimensions "
                    f"{nilpotent_dims}",
                    "tests/test_acceptance.py::test_c07_derivation_dichotomy")]
    return checks, [("derivations_dichotomy", report)]


RUNNERS: dict[str, Callable] = {
    "weak": _verify_weak,
    "character": _verify_character,
    "similarity": _verify_similarity,
    "derivations": _verify_derivations,
}


def cmd_verify(target: str, cfg: RunConfig) -> int:
    names = list(VERIFY_TARGETS) if target == "all" else [target]
    checks: list[Check] = []
    pending = []
    for name in names:
        got_checks, got_files = RUNNERS[name](cfg)
        checks.extend(got_checks)
        pending.extend(got_files)
    digest = config_hash(cfg)
    comment = f"amenalab verify {target} {digest}"
    out_dir = Path(cfg.out)
    for stem, report in pending:
        write_report(report, out_dir / f"{stem}.{cfg.fmt}", cfg.fmt, comment)
    for check in checks:
        flag = "PASS" if check.passed else "FAIL"
        print(f"[{flag}] {check.name}: {check.detail}  -> {check.test_ref}")
    failed = [c for c in checks if not c.passed]
    print(f"amenalab verify {target}: {len(checks) - len(failed)}/{len(checks)} checks passed"
          f" ({digest})")
    return 1 if failed else 0


def cmd_spectrum(cfg: RunConfig) -> int:
    spectrum = _spectrum_at(cfg, _default_count(cfg, SPECTRUM_DEFAULT_COUNT))
    m = len(spectrum)
    print(f"# amenalab spectrum {config_hash(cfg)}")
    print(f"spectrum: {spectrum.descriptor}")
    print(f"||T|| = {operator_norm(build_T(spectrum).to_float())!r}")
    print("  n  lambda_n  ||E_n||  tail_norm")
    for n in range(1, m + 1):
        lam = spectrum.lam(n)
        e_norm = float(1 / lam + 1) ** 0.5
        tail = 0.0 if n == m else float(spectrum.lam(n + 1) + spectrum.lam(n + 1) ** 2) ** 0.5
        print(f"  {n}  {float(lam)!r}  {e_norm!r}  {tail!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amenalab",
        description="Numerical laboratory for a compact triangular operator family: "
                    "idempotent generation, approximate identities, similarity growth.")
    sub = parser.add_subparsers(dest="command", required=True)
    spectrum_p = sub.add_parser("spectrum", help="print the spectrum and derived constants")
    verify_p = sub.add_parser("verify", help="run verification pipelines and write reports")
    verify_p.add_argument("target", choices=[*VERIFY_TARGETS, "all"])
    for p in (spectrum_p, verify_p):
        p.add_argument("--kind", choices=["geometric", "harmonic", "explicit"])
        p.add_argument("--ratio", type=float)
        p.add_argument("--count", type=int)
        p.add_argument("--truncations", help="comma-separated truncation sizes, e.g. 4,8,16")
        p.add_argument("--degrees", help="comma list or doubling range a:b, e.g. 8:64")
        p.add_argument("--tol-algebraic", dest="tol_algebraic", type=float)
        p.add_argument("--tol-analytic", dest="tol_analytic", type=float)
        p.add_argument("--config", help="JSON configuration file; flags override it")
        p.add_argument("--out", help="report output directory (default: reports)")
        p.add_argument("--format", choices=["csv", "json"])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        return cmd_verify(args.target, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
