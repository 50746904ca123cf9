"""The acceptance corpus behind ``sextic selftest``: golden answers plus seeded property checks."""
from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import MAX_MU, fast_path_applies, interval_contains, rigid_isotopy_classes, zariski_sets
from .config import REPO_ROOT, Settings, read_yaml
from .fqf import (
    FiniteQuadraticForm,
    FormBlock,
    brown_blocks,
    brown_gauss,
    brown_invariant,
    format_form,
    from_blocks,
    is_isomorphic,
    negate,
    parse_form,
)
from .lattice import Isometry, definite_isometries, discriminant_form
from .nikulin import GenusSymbol, exists_even_lattice
from .rank2 import all_reduced_forms, enumerate_genus, orthogonal_group, reduce
from .rootdata import SingularitySet, component_discriminant, symbol_rank, table_form

DATA_DIR = REPO_ROOT / "data"
EXPECTED_PATH = DATA_DIR / "expected.yaml"
ASSERTED_PATH = DATA_DIR / "asserted.yaml"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    asserted: bool = False


def load_expected(path: Path | None = None) -> dict:
    return read_yaml(path or EXPECTED_PATH)


def load_asserted(path: Path | None = None) -> dict[str, int]:
    return {str(k): int(v) for k, v in read_yaml(path or ASSERTED_PATH).items()}


# random generators


def random_block(rng: np.random.Generator) -> FormBlock:
    kind = rng.choice(["cyclic", "cyclic", "cyclic", "U", "V"])
    if kind != "cyclic":
        return FormBlock.plane(str(kind), int(rng.integers(1, 4)))
    n = int(rng.choice([2, 4, 8, 16, 3, 9, 27, 5, 25, 7, 11]))
    while True:
        m = int(rng.integers(1, 2 * n))
        if np.gcd(m, n) == 1 and (m * n) % 2 == 0:
            return FormBlock.cyclic(m, n)


def random_form(rng: np.random.Generator, max_order: int) -> FiniteQuadraticForm:
    while True:
        blocks = [random_block(rng) for _ in range(int(rng.integers(1, 4)))]
        f = from_blocks(blocks)
        if f.order <= max_order:
            return f


def random_unimodular(rng: np.random.Generator, steps: int = 6) -> Isometry:
    m = Isometry.identity(2)
    for _ in range(steps):
        k = int(rng.integers(-3, 4))
        if rng.integers(0, 2):
            m = m.compose(Isometry.from_columns([(1, 0), (k, 1)]))
        else:
            m = m.compose(Isometry.from_columns([(0, 1), (1, 0)]))
    return m


def random_singularity_set(rng: np.random.Generator, max_components: int = 4) -> SingularitySet:
    """A random Σ with ℓ(discr Σ) + μ <= 19, drawn by rejection."""
    symbols = [f"A{n}" for n in range(1, MAX_MU)] + [f"D{n}" for n in range(4, MAX_MU)] + ["E6", "E7", "E8"]
    while True:
        comps: list[str] = []
        mu = 0
        for _ in range(int(rng.integers(1, max_components + 1))):
            s = str(rng.choice(symbols))
            if mu + symbol_rank(s) < MAX_MU:
                comps.append(s)
                mu += symbol_rank(s)
        sigma = SingularitySet(tuple(comps))
        if comps and fast_path_applies(sigma):
            return sigma


# checks


def _golden(settings: Settings, quick: bool) -> Iterator[CheckResult]:
    expected = load_expected()
    names = expected["quick"] if quick else list(expected["classify"])
    for name in names:
        want = expected["classify"][name]
        report = rigid_isotopy_classes(SingularitySet.parse(name), settings=settings)
        reps = sorted({r for c in report.configurations for r in (c.complement.representatives or [])})
        problems = []
        if len(report.configurations) != want["configurations"]:
            problems.append(f"{len(report.configurations)} configurations")
        if report.class_count != want["class_count"]:
            problems.append(f"class count {report.class_count}")
        if "indices" in want and [c.index for c in report.configurations] != want["indices"]:
            problems.append(f"indices {[c.index for c in report.configurations]}")
        if "representatives" in want and reps != sorted(want["representatives"]):
            problems.append(f"complements {reps}")
        if "types" in want and sum(len(c.types) for c in report.configurations) != want["types"]:
            problems.append("type count")
        if want.get("reducible") and not all(c.reducible for c in report.configurations):
            problems.append("expected reducible")
        yield CheckResult(f"classify {name}", not problems, "; ".join(problems) or f"{report.class_count} classes")


def _asserted(settings: Settings) -> Iterator[CheckResult]:
    for name, value in load_asserted().items():
        report = rigid_isotopy_classes(SingularitySet.parse(name), settings=settings)
        yield CheckResult(
            f"classify {name}",
            interval_contains(report.class_count, value),
            f"computed {report.class_count}, asserted {value}",
            asserted=True,
        )


def _discriminants(quick: bool) -> Iterator[CheckResult]:
    top = 8 if quick else 19
    symbols = [f"A{n}" for n in range(1, top + 1)] + [f"D{n}" for n in range(4, top + 1)] + ["E6", "E7", "E8"]
    bad = [s for s in symbols if not is_isomorphic(component_discriminant(s).form, table_form(s))]
    yield CheckResult("discriminant table", not bad, ", ".join(bad) or f"{len(symbols)} root lattices")
    expected = load_expected()
    for symbol, text in expected["discr"].items():
        got = format_form(component_discriminant(symbol).form)
        yield CheckResult(f"discr {symbol}", got == text, got)


def _brown(settings: Settings, quick: bool) -> Iterator[CheckResult]:
    rng = np.random.default_rng(settings.seed)
    count, max_order = (50, 512) if quick else (500, settings.max_group_order)
    bad = []
    for _ in range(count):
        f = random_form(rng, max_order)
        values = {brown_gauss(f, max_order=max_order), brown_blocks(f, max_order=max_order), brown_invariant(f)}
        if len(values) != 1:
            bad.append(format_form(f))
    yield CheckResult(f"brown oracle (seed {settings.seed})", not bad, ", ".join(bad[:5]) or f"{count} forms")
    for text, value in load_expected()["brown"].items():
        got = brown_gauss(parse_form(text))
        yield CheckResult(f"brown {text}", got == value, f"gauss {got}")


def _rank2(settings: Settings, quick: bool) -> Iterator[CheckResult]:
    rng = np.random.default_rng(settings.seed)
    top = 60 if quick else 400
    forms = [m for det in range(3, top + 1) for m in all_reduced_forms(det)]
    blij = [str(m) for m in forms if brown_invariant(discriminant_form(m.lattice).form) != 2]
    yield CheckResult("van der Blij on M(a,b,c)", not blij, ", ".join(blij[:5]) or f"{len(forms)} forms")
    trials = 100 if quick else 1000
    bad = []
    for i in range(trials):
        m = forms[i % len(forms)]
        P = random_unimodular(rng)
        G = [[sum(P.matrix[k][r] * m.gram[k][l] * P.matrix[l][s] for k in range(2) for l in range(2)) for s in range(2)] for r in range(2)]
        if reduce(G)[0] != m:
            bad.append(str(m))
    yield CheckResult(f"reduction (seed {settings.seed})", not bad, ", ".join(bad[:5]) or f"{trials} re-bases")
    sample = forms[: 40 if quick else 400]
    orth = [
        str(m)
        for m in sample
        if len(definite_isometries(m.lattice, max_rank=settings.max_isometry_rank)) != orthogonal_group(m).order
    ]
    yield CheckResult("O(M) case table vs search", not orth, ", ".join(orth[:5]) or f"{len(sample)} forms")


def _genus(settings: Settings, quick: bool) -> Iterator[CheckResult]:
    top = 60 if quick else 400
    bad = []
    seen = 0
    for det in range(3, top + 1):
        targets = []
        for m in all_reduced_forms(det):
            f = discriminant_form(m.lattice).form
            targets += [f, negate(f)]
        for f in targets:
            seen += 1
            found = bool(enumerate_genus(f, max_order=settings.max_group_order))
            if exists_even_lattice(GenusSymbol((2, 0), f)).holds != found:
                bad.append(format_form(f))
    yield CheckResult("existence vs rank-2 genus", not bad, ", ".join(bad[:5]) or f"{seen} targets")


def _fast_path(settings: Settings, samples: int = 50) -> Iterator[CheckResult]:
    for sigma in zariski_sets(e_max=1):
        report = rigid_isotopy_classes(sigma, settings=settings)
        ok = len(report.configurations) == 2 and report.class_count == 2
        yield CheckResult(f"zariski {sigma}", ok, f"{len(report.configurations)} configurations, {report.class_count} classes")
    rng = np.random.default_rng(settings.seed)
    bad = []
    for _ in range(samples):
        sigma = random_singularity_set(rng)
        report = rigid_isotopy_classes(sigma, settings=settings)
        if not report.fast_path or any(c.class_count != 1 or len(c.types) != 1 for c in report.configurations):
            bad.append(str(sigma))
    yield CheckResult(f"fast path (seed {settings.seed})", not bad, ", ".join(bad[:5]) or f"{samples} sets")


def run_selftest(settings: Settings, *, quick: bool = False) -> list[CheckResult]:
    suites: list[Callable[[], Iterator[CheckResult]]] = [
        lambda: _discriminants(quick),
        lambda: _brown(settings, quick),
        lambda: _rank2(settings, quick),
        lambda: _genus(settings, quick),
        lambda: _golden(settings, quick),
    ]
    if not quick:
        suites += [lambda: _asserted(settings), lambda: _fast_path(settings)]
    out: list[CheckResult] = []
    for suite in suites:
        out.extend(suite())
    return out
