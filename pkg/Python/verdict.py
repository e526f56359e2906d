"""
Classification of maps and the corpus harness.

classify() runs both engines on a map: Kähler differentials (is Ω zero?)
and the relative Frobenius (onto? injective?). On finitely presented input
the two must agree on unramifiedness; a disagreement raises KunzViolation
with the full witness set. Flatness of alpha is decided only in the
module-finite case (restricted Fitting test).

Report builders here produce the JSON document consumed by kunz_cli:
corpus cases, the Kunz cross-check table, stability under base change and
composition, the deformation-bank oracle, adjunction counts and engine
self-checks.
"""

import fnmatch
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import dask
import numpy as np
import pandas as pd

from algebra import AlgebraMap, base_change, compose
from corpus import (
    COLIMIT_LABEL,
    AdjunctionCase,
    CorpusCase,
    FamilyCase,
    adjunction_cases,
    base_change_pairs,
    composition_cases,
    corpus_rings,
    proot_degrees_monotone,
    family_cases,
    map_cases,
)
from data_utils import config_value, debug_log
from deform import (
    P_INFINITESIMAL,
    bank,
    enumerate_lifts,
    section_count_vs_derivations,
    xi_uniqueness_check,
)
from differentials import omega, omega_is_zero
from dsl import CheckDirective, Elaborated, load, parse_poly, print_statement
from fpmodule import FLAT, NOT_DECIDED, ModulePresentation, restricted_flatness
from frobenius import (
    build_frobenius,
    frobenius_flatness,
    frobenius_injective,
    frobenius_surjective,
    frobenius_surjective_by_box,
    quotient_frobenius_identity,
    replay_surjectivity,
)
from groebner import is_groebner, normal_form
from kunz_errors import BudgetExceeded, IncompatibleBase, KunzError, KunzViolation, NotArtinian
from polycore import Poly, PolyRing

ENGINE_VERSION = "0.1.0"
SCHEMA_VERSION = "1"

PASS = "pass"
FAIL = "fail"
UNDECIDED = "not-decided"

ETALE = "etale"
UNRAMIFIED = "unramified"
NEITHER = "neither"


# -----------------------------------------------------------------------------
# Verdict
# -----------------------------------------------------------------------------

@dataclass
class Verdict:
    map_id: str
    omega_zero: Optional[bool] = None
    frob_surjective: Optional[bool] = None
    frob_injective: Optional[bool] = None
    frob_iso: Optional[bool] = None
    flatness: str = NOT_DECIDED
    iterate_coherent: Optional[bool] = None
    per_e: Dict[int, Dict[str, bool]] = field(default_factory=dict)
    frobenius_flatness: Dict[int, str] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    not_decided: List[str] = field(default_factory=list)
    millis: Optional[int] = None

    @property
    def kind(self) -> Optional[str]:
        if self.frob_iso:
            return ETALE
        if self.frob_iso is None and self.omega_zero is None:
            return None
        if self.omega_zero or self.frob_surjective:
            return UNRAMIFIED if self.frob_iso is False else None
        return NEITHER

    @property
    def classification(self) -> List[str]:
        """Labels derived from the boolean fields only."""
        if self.frob_iso:
            labels = ["formally étale", "pre-pristine"]
            if self.flatness == FLAT:
                labels.append("pristine (restricted: module-finite case only)")
            return labels
        if self.omega_zero and self.frob_iso is False:
            return ["formally unramified, not formally étale"]
        if self.omega_zero is False:
            return ["not formally unramified"]
        return []

    @property
    def budget_exhausted(self) -> bool:
        return bool(self.not_decided)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "map_id": self.map_id,
            "omega_zero": self.omega_zero,
            "frob_surjective": self.frob_surjective,
            "frob_injective": self.frob_injective,
            "frob_iso": self.frob_iso,
            "flatness": self.flatness,
            "kind": self.kind,
            "classification": self.classification,
            "iterate_coherent": self.iterate_coherent,
            "per_e": {str(e): dict(v) for e, v in sorted(self.per_e.items())},
            "frobenius_flatness": {str(e): s for e, s in sorted(self.frobenius_flatness.items())},
            "not_decided": list(self.not_decided),
            "witnesses": self.witnesses,
        }


def _fmt(f: Optional[Poly]) -> Optional[str]:
    return None if f is None else str(f)


def classify(alpha: AlgebraMap, e_max: int = 2, budget=None, *, flatness: bool = True,
             flatness_budget=None, max_generators: int = 8, max_minors: int = 20000,
             cross_check_box: bool = True, timings: bool = False,
             map_id: Optional[str] = None) -> Verdict:
    """
    Ω-vanishing, Frobenius verdicts for e = 1..e_max and restricted flatness.

    Budget exhaustion leaves the affected fields None and lists them in
    not_decided. Raises KunzViolation when Ω = 0 and F_alpha onto disagree,
    when a surjectivity certificate does not replay, when the two
    surjectivity routes disagree, or when the iso verdict depends on e.
    """
    start = time.perf_counter()
    v = Verdict(map_id or alpha.name or "alpha")
    flatness_budget = budget if flatness_budget is None else flatness_budget

    try:
        v.omega_zero = omega_is_zero(alpha, budget)
        v.witnesses["omega_generators"] = omega(alpha).fiber_names()
    except BudgetExceeded as exc:
        v.not_decided.append("omega_zero")
        v.witnesses["omega_budget"] = str(exc)

    for e in range(1, e_max + 1):
        try:
            fd = build_frobenius(alpha, e, budget)
            surj = frobenius_surjective(fd, budget)
            inj = frobenius_injective(fd, budget)
        except BudgetExceeded as exc:
            v.not_decided.append(f"frobenius[e={e}]")
            v.witnesses[f"frobenius_budget[e={e}]"] = str(exc)
            break
        v.per_e[e] = {"surjective": surj.surjective, "injective": inj.injective,
                      "iso": surj.surjective and inj.injective}
        if e == 1:
            v.witnesses["frobenius_preimages"] = {k: _fmt(b) for k, b in surj.preimages.items()}
            v.witnesses["frobenius_missing"] = list(surj.missing)
            v.witnesses["frobenius_kernel"] = [str(g) for g in inj.kernel.gens]
            if not replay_surjectivity(fd, surj):
                raise KunzViolation(f"{v.map_id}: surjectivity certificate does not replay",
                                    {"map": alpha.describe(), **v.witnesses})
            if cross_check_box:
                try:
                    by_box = frobenius_surjective_by_box(fd, budget)
                except BudgetExceeded:
                    by_box = None
                if by_box is not None and by_box != surj.surjective:
                    raise KunzViolation(
                        f"{v.map_id}: generator route says surjective={surj.surjective}, "
                        f"box route says {by_box}", {"map": alpha.describe(), **v.witnesses})
        if flatness:
            v.frobenius_flatness[e] = frobenius_flatness(fd, flatness_budget, max_generators,
                                                         max_minors).status

    if 1 in v.per_e:
        first = v.per_e[1]
        v.frob_surjective = first["surjective"]
        v.frob_injective = first["injective"]
        v.frob_iso = first["iso"]
    if len(v.per_e) == e_max and e_max > 1:
        v.iterate_coherent = len({d["iso"] for d in v.per_e.values()}) == 1
        if not v.iterate_coherent:
            raise KunzViolation(f"{v.map_id}: Frobenius iso verdict depends on e",
                                {"map": alpha.describe(), "per_e": v.per_e})

    if v.omega_zero is not None and v.frob_surjective is not None \
            and v.omega_zero != v.frob_surjective:
        witness = {"map": alpha.describe(), "omega_zero": v.omega_zero,
                   "frob_surjective": v.frob_surjective, **v.witnesses}
        debug_log("kunz", "verdict.classify", "biconditional failure", witness)
        raise KunzViolation(
            f"{v.map_id}: Omega zero is {v.omega_zero} but Frobenius surjective is "
            f"{v.frob_surjective}", witness)

    if flatness:
        fv = restricted_flatness(alpha, flatness_budget, max_generators, max_minors)
        v.flatness = fv.status
        v.witnesses["flatness"] = fv.as_dict()

    if timings:
        v.millis = int((time.perf_counter() - start) * 1000)
    return v


# -----------------------------------------------------------------------------
# Corpus
# -----------------------------------------------------------------------------

def _matches(name: str, family: Optional[str], pattern: Optional[str]) -> bool:
    if not pattern:
        return True
    if not any(ch in pattern for ch in "*?["):
        pattern = pattern + "*"
    return fnmatch.fnmatchcase(name, pattern) or bool(family and fnmatch.fnmatchcase(family, pattern))


def compare_expected(verdict: Verdict, expected: Dict[str, Any]) -> Dict[str, Any]:
    """Mismatches and undecided fields of a verdict against a partial expectation."""
    actual = verdict.as_dict()
    mismatches, undecided = [], []
    for key, want in expected.items():
        got = actual.get(key)
        if got is None or got == NOT_DECIDED:
            undecided.append(key)
        elif got != want:
            mismatches.append({"field": key, "expected": want, "actual": got})
    if mismatches:
        status = FAIL
    elif undecided:
        status = UNDECIDED
    else:
        status = PASS
    return {"status": status, "mismatches": mismatches, "undecided": undecided}


def run_map_case(case: CorpusCase, e_max: int = 2, budget=None, flatness_budget=None,
                 timings: bool = False, **limits) -> Dict[str, Any]:
    start = time.perf_counter()
    entry: Dict[str, Any] = {"name": case.name, "kind": "map", "dsl_source": case.dsl_source}
    try:
        alpha = case.alpha()
        verdict = classify(alpha, e_max, budget, flatness_budget=flatness_budget,
                           map_id=case.name, **limits)
        outcome = compare_expected(verdict, case.expected)
        entry["verdict"] = verdict.as_dict()
        entry["status"] = outcome["status"]
        entry["mismatches"] = outcome["mismatches"]
        entry["undecided"] = outcome["undecided"]
        identity = quotient_frobenius_identity(alpha, 1, budget)
        if identity is not None:
            entry["quotient_identity"] = identity
            if not identity:
                entry["status"] = FAIL
                entry["mismatches"] = entry["mismatches"] + [{"field": "quotient_identity",
                                                              "expected": True, "actual": False}]
    except KunzViolation:
        raise
    except BudgetExceeded as exc:
        entry.update(verdict=None, status=UNDECIDED, mismatches=[], undecided=["*"], error=str(exc))
    except KunzError as exc:
        entry.update(verdict=None, status=FAIL, mismatches=[], undecided=[], error=str(exc))
    entry["expected"] = dict(case.expected)
    entry["provenance"] = dict(case.provenance)
    entry["millis"] = int((time.perf_counter() - start) * 1000) if timings else None
    return entry


def run_family_case(case: FamilyCase, timings: bool = False) -> Dict[str, Any]:
    start = time.perf_counter()
    entry: Dict[str, Any] = {
        "name": case.name, "kind": "family", "family": case.family,
        "level": list(case.level) if isinstance(case.level, tuple) else case.level,
        "colimit_claim": f"{COLIMIT_LABEL}: {case.colimit_claim}",
    }
    try:
        result = case.run()
        entry["checks"] = result["checks"]
        entry["witnesses"] = result["witnesses"]
        entry["status"] = PASS if all(result["checks"].values()) else FAIL
    except KunzViolation:
        raise
    except BudgetExceeded as exc:
        entry.update(checks={}, witnesses={}, status=UNDECIDED, error=str(exc))
    except KunzError as exc:
        entry.update(checks={}, witnesses={}, status=FAIL, error=str(exc))
    entry["millis"] = int((time.perf_counter() - start) * 1000) if timings else None
    return entry


def _run_all(tasks: Sequence[Callable[[], Dict[str, Any]]], workers: int) -> List[Dict[str, Any]]:
    if workers > 1 and len(tasks) > 1:
        delayed = [dask.delayed(task)() for task in tasks]
        return list(dask.compute(*delayed, scheduler="threads", num_workers=workers))
    return [task() for task in tasks]


def corpus_run(pattern: Optional[str] = None, config: Optional[Dict[str, Any]] = None,
               budget=None, e_max: Optional[int] = None, workers: Optional[int] = None,
               timings: bool = False, verbose: bool = True) -> List[Dict[str, Any]]:
    """
    Run every matching map case and family level; entries sorted by name.
    Per-case failures are collected; KunzViolation propagates.
    """
    config = config or {}
    e_max = e_max or int(config_value(config, "frobenius.e_max", 2))
    workers = workers or int(config_value(config, "corpus.workers", 1))
    limits = {
        "max_generators": int(config_value(config, "flatness.max_generators", 8)),
        "max_minors": int(config_value(config, "flatness.max_minors", 20000)),
    }
    flatness_budget = config_value(config, "budget.flatness_steps", None)

    tasks: List[Callable[[], Dict[str, Any]]] = []
    for case in map_cases():
        if _matches(case.name, case.family, pattern):
            tasks.append(lambda c=case: run_map_case(c, e_max, budget, flatness_budget,
                                                     timings, **limits))
    for fcase in family_cases(config):
        if _matches(fcase.name, fcase.family, pattern):
            tasks.append(lambda c=fcase: run_family_case(c, timings))

    if verbose:
        print("=" * 60)
        print(f"Corpus run: {len(tasks)} cases (e_max={e_max}, workers={workers})")
        print("=" * 60)

    entries = _run_all(tasks, workers)

    towers = sorted((e for e in entries
                     if e.get("family") == "PROOT-TOWER-trunc" and e["status"] == PASS),
                    key=lambda e: e["level"])
    if len(towers) >= 2:
        monotone = proot_degrees_monotone(towers)
        entries.append({
            "name": "PROOT-TOWER-trunc:monotone", "kind": "family-summary",
            "family": "PROOT-TOWER-trunc",
            "checks": {"root_degree_strictly_increasing": monotone},
            "witnesses": {"root_relation_degrees": [e["witnesses"]["root_relation_degree"]
                                                    for e in towers]},
            "status": PASS if monotone else FAIL, "millis": None,
        })

    entries.sort(key=lambda e: e["name"])
    for e in entries:
        if e["status"] != PASS:
            debug_log("corpus", "verdict.corpus_run", f"case {e['status']}",
                      {"name": e["name"], "mismatches": e.get("mismatches"), "error": e.get("error")})
        if verbose:
            print(f"  [{e['status']}] {e['name']}")
    return entries


def kunz_crosscheck(entries: Optional[Sequence[Dict[str, Any]]] = None,
                    pattern: Optional[str] = None, **kwargs) -> Dict[str, Any]:
    """
    Table of (omega_zero, frob_surjective, frob_injective, frob_iso) over the
    corpus maps with the unramified column asserted equal to surjectivity.
    """
    if entries is None:
        entries = corpus_run(pattern, **kwargs)
    columns = ["name", "omega_zero", "frob_surjective", "frob_injective", "frob_iso",
               "unramified_iff_surjective", "kind"]
    rows = []
    disagreements = 0
    for e in entries:
        if e.get("kind") != "map" or not e.get("verdict"):
            continue
        v = e["verdict"]
        if v["omega_zero"] is None or v["frob_surjective"] is None:
            agree = None
        else:
            agree = v["omega_zero"] == v["frob_surjective"]
            disagreements += not agree
        rows.append([e["name"], v["omega_zero"], v["frob_surjective"], v["frob_injective"],
                     v["frob_iso"], agree, v["kind"]])
    return {"columns": columns, "rows": rows, "disagreements": disagreements}


def crosscheck_frame(table: Dict[str, Any]) -> pd.DataFrame:
    return pd.DataFrame(table["rows"], columns=table["columns"])


# -----------------------------------------------------------------------------
# Property suites
# -----------------------------------------------------------------------------

def _quick(alpha: AlgebraMap, budget, name: str) -> Verdict:
    return classify(alpha, 1, budget, flatness=False, cross_check_box=False, map_id=name)


def stability_suite(budget=None) -> Dict[str, Any]:
    """Étaleness and unramifiedness kept under base change and composition."""
    base_changes = []
    for pair in base_change_pairs():
        elab = load(pair.dsl_source)
        alpha, rho = elab.resolve(pair.alpha), elab.resolve(pair.rho)
        before = _quick(alpha, budget, pair.name)
        after = _quick(base_change(alpha, rho, pair.name), budget, pair.name)
        preserved = (not before.frob_iso or bool(after.frob_iso)) and \
                    (not before.omega_zero or bool(after.omega_zero))
        base_changes.append({
            "name": pair.name, "iso": before.frob_iso, "base_changed_iso": after.frob_iso,
            "omega_zero": before.omega_zero, "base_changed_omega_zero": after.omega_zero,
            "status": PASS if preserved else FAIL,
        })
    compositions = []
    for case in composition_cases():
        elab = load(case.dsl_source)
        first, second = elab.resolve(case.first), elab.resolve(case.second)
        v1, v2 = _quick(first, budget, case.first), _quick(second, budget, case.second)
        vc = _quick(compose(second, first, case.name), budget, case.name)
        preserved = (not (v1.frob_iso and v2.frob_iso) or bool(vc.frob_iso)) and \
                    (not (v1.omega_zero and v2.omega_zero) or bool(vc.omega_zero))
        compositions.append({
            "name": case.name, "first_iso": v1.frob_iso, "second_iso": v2.frob_iso,
            "composite_iso": vc.frob_iso, "status": PASS if preserved else FAIL,
        })
    return {"base_change": base_changes, "composition": compositions}


def deformation_checks(alpha: AlgebraMap, verdict: Verdict, budget=None,
                       limit: Optional[int] = None, max_points: int = 2) -> Dict[str, Any]:
    """
    Lift counts over the deformation bank of alpha, judged against the
    Frobenius verdict: onto means at most one lift, iso means exactly one,
    Ω != 0 needs some extension with two or more lifts.
    """
    cases = bank(alpha, max_points=max_points, budget=budget, limit=limit)
    fd = surj = None
    if verdict.frob_surjective:
        fd = build_frobenius(alpha, 1, budget)
        surj = frobenius_surjective(fd, budget)
    extensions = []
    for dc in cases:
        item: Dict[str, Any] = {"name": dc.name, "kind": dc.ext.kind}
        try:
            lifts = enumerate_lifts(alpha, dc.ext, dc.theta, budget, limit)
            item["lifts"] = len(lifts)
            if surj is not None and dc.ext.kind == P_INFINITESIMAL:
                item["xi"] = xi_uniqueness_check(alpha, dc.ext, dc.theta, fd, surj, budget, limit)
        except (BudgetExceeded, IncompatibleBase) as exc:
            item["lifts"] = None
            item["error"] = str(exc)
        extensions.append(item)
    counts = [x["lifts"] for x in extensions if x["lifts"] is not None]
    checks: Dict[str, bool] = {}
    if verdict.frob_surjective:
        checks["at_most_one_lift"] = all(c <= 1 for c in counts)
        xis = [x["xi"] for x in extensions if "xi" in x and x["xi"]["applicable"]]
        checks["xi_prediction"] = all(x["passed"] for x in xis)
    if verdict.frob_iso:
        checks["exactly_one_lift"] = all(c == 1 for c in counts)
    if verdict.omega_zero is False:
        checks["non_unique_witness"] = any(c >= 2 for c in counts)
    if not counts and any("error" in x for x in extensions):
        status = UNDECIDED
    else:
        status = PASS if all(checks.values()) else FAIL
    return {"extensions": extensions, "checks": checks, "status": status}


def deformation_suite(entries: Sequence[Dict[str, Any]], budget=None,
                      limit: Optional[int] = None) -> List[Dict[str, Any]]:
    by_name = {c.name: c for c in map_cases()}
    out = []
    for e in entries:
        if e.get("kind") != "map" or not e.get("verdict") or e["name"] not in by_name:
            continue
        v = e["verdict"]
        verdict = Verdict(e["name"], v["omega_zero"], v["frob_surjective"], v["frob_injective"],
                          v["frob_iso"])
        try:
            result = deformation_checks(by_name[e["name"]].alpha(), verdict, budget, limit)
        except (BudgetExceeded, NotArtinian) as exc:
            result = {"extensions": [], "checks": {}, "status": UNDECIDED, "error": str(exc)}
        out.append({"name": e["name"], **result})
    return out


def adjunction_suite(cases: Optional[Sequence[AdjunctionCase]] = None, budget=None,
                     limit: Optional[int] = None) -> List[Dict[str, Any]]:
    """Sections of Ξ(A, M) against p^dim Hom_A(Ω, M)."""
    out = []
    for case in cases or adjunction_cases():
        alpha = load(case.dsl_source).resolve(case.target)
        A = alpha.target
        M = ModulePresentation.cyclic(A, [parse_poly(s, A.ring) for s in case.module_ideal])
        sections, derivations = section_count_vs_derivations(alpha, M, budget, limit)
        ok = sections == derivations and (case.expected is None or sections == case.expected)
        out.append({"name": case.name, "sections": sections, "derivations": derivations,
                    "expected": case.expected, "status": PASS if ok else FAIL})
    return out


def _random_poly(rng: np.random.Generator, ring: PolyRing, max_terms: int = 4,
                 max_degree: int = 3) -> Poly:
    f = ring.zero()
    for _ in range(int(rng.integers(1, max_terms + 1))):
        exps = tuple(int(x) for x in rng.integers(0, max_degree + 1, size=ring.nvars))
        f = f + ring.monomial(exps, int(rng.integers(1, ring.p)))
    return f


def selfcheck(samples: int = 1000, seed: int = 0, budget=None) -> List[Dict[str, Any]]:
    """Buchberger criterion, NF idempotence and membership soundness per corpus ring."""
    rng = np.random.default_rng(seed)
    out = []
    for A in corpus_rings():
        gb = A.gb(budget=budget)
        idem = member = 0
        for _ in range(samples):
            f = _random_poly(rng, A.ring)
            nf = normal_form(f, gb)
            idem += normal_form(nf, gb) != nf
            combo = A.ring.zero()
            for rel in A.relations:
                combo = combo + _random_poly(rng, A.ring, 2, 2) * rel
            member += not normal_form(combo, gb).is_zero()
        ok = is_groebner(gb) and idem == 0 and member == 0
        out.append({"ring": str(A), "is_groebner": is_groebner(gb), "idempotence_failures": idem,
                    "membership_failures": member, "status": PASS if ok else FAIL})
    return out


# -----------------------------------------------------------------------------
# Check directives
# -----------------------------------------------------------------------------

def run_check(elab: Elaborated, chk: CheckDirective, budget=None, config=None,
              timings: bool = False) -> Dict[str, Any]:
    """Execute one check directive; status pass/fail/not-decided."""
    config = config or {}
    start = time.perf_counter()
    alpha = elab.resolve(chk.target, chk.span)
    entry: Dict[str, Any] = {"directive": print_statement(chk), "kind": chk.kind,
                             "target": chk.target}
    expect = chk.option("expect")
    try:
        if chk.kind == "omega":
            zero = omega_is_zero(alpha, budget)
            om = omega(alpha)
            entry["result"] = {"omega_zero": zero, "generators": om.fiber_names(),
                               "jacobian": [[str(c) for c in row] for row in om.jacobian]}
            entry["status"] = PASS if expect is None or (expect == "zero") == zero else FAIL
        elif chk.kind == "frobenius":
            e = int(chk.option("e", 1))
            mode = chk.option("mode", "iso")
            fd = build_frobenius(alpha, e, budget)
            surj = frobenius_surjective(fd, budget) if mode in ("surjective", "iso") else None
            inj = frobenius_injective(fd, budget) if mode in ("injective", "iso") else None
            value = {"surjective": lambda: surj.surjective, "injective": lambda: inj.injective,
                     "iso": lambda: surj.surjective and inj.injective}[mode]()
            entry["result"] = {"e": e, "mode": mode, "value": value, "B": str(fd.B)}
            if surj is not None:
                entry["result"]["preimages"] = {k: _fmt(b) for k, b in surj.preimages.items()}
            if inj is not None:
                entry["result"]["kernel"] = [str(g) for g in inj.kernel.gens]
            entry["status"] = PASS if expect is None or (expect == "true") == value else FAIL
        elif chk.kind in ("kunz", "classify"):
            e_max = int(chk.option("emax", config_value(config, "frobenius.e_max", 2)))
            v = classify(alpha, e_max, budget, flatness=chk.kind == "classify",
                         map_id=chk.target, timings=timings)
            entry["result"] = v.as_dict()
            if v.not_decided:
                entry["status"] = UNDECIDED
            else:
                entry["status"] = PASS if expect is None or expect == v.kind else FAIL
        elif chk.kind == "lifts":
            entry.update(_run_lifts(alpha, chk, budget, config))
        else:
            raise ValueError(f"unknown check kind {chk.kind}")
    except BudgetExceeded as exc:
        entry["status"] = UNDECIDED
        entry["error"] = str(exc)
    entry["millis"] = int((time.perf_counter() - start) * 1000) if timings else None
    return entry


_EXT_PREFIX = {"dual": "dual@", "residue": "residue-xi@", "two-param": "two-param@",
               "p-inf": "p-infinitesimal@"}


def _run_lifts(alpha: AlgebraMap, chk: CheckDirective, budget, config) -> Dict[str, Any]:
    ext = chk.option("ext", "bank")
    expect = chk.option("expect")
    limit = int(config_value(config, "budget.enumeration", 10 ** 6))
    if ext == "bank":
        v = classify(alpha, 1, budget, flatness=False, cross_check_box=False, map_id=chk.target)
        result = deformation_checks(alpha, v, budget, limit)
        counts = [x["lifts"] for x in result["extensions"]]
        ok = result["status"] != FAIL and (expect is None or all(c == int(expect) for c in counts))
        status = FAIL if not ok else result["status"]
        return {"result": result, "status": status}
    cases = [dc for dc in bank(alpha, max_points=1, budget=budget, limit=limit)
             if dc.name.startswith(_EXT_PREFIX[ext])]
    if not cases:
        return {"result": {"ext": ext, "lifts": None, "reason": "no rational point"},
                "status": UNDECIDED}
    dc = cases[0]
    lifts = enumerate_lifts(alpha, dc.ext, dc.theta, budget, limit)
    result = {"ext": dc.name, "lifts": len(lifts),
              "images": [[str(x) for x in l.images] for l in lifts]}
    status = PASS if expect is None or len(lifts) == int(expect) else FAIL
    return {"result": result, "status": status}


# -----------------------------------------------------------------------------
# Report
# -----------------------------------------------------------------------------

def summarize(statuses: Sequence[str]) -> Dict[str, int]:
    return {s: sum(1 for x in statuses if x == s) for s in (PASS, FAIL, UNDECIDED)}


def build_report(cases: Sequence[Dict[str, Any]], seed: int, budget: Optional[int],
                 extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Stable key order; cases sorted by name."""
    report: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "engine_version": ENGINE_VERSION,
        "seed": seed,
        "budget": budget,
        "cases": sorted(cases, key=lambda c: c["name"]),
    }
    statuses = [c["status"] for c in cases]
    for section in (extra or {}).values():
        if isinstance(section, list):
            statuses += [x["status"] for x in section if "status" in x]
        elif isinstance(section, dict):
            for rows in section.values():
                if isinstance(rows, list):
                    statuses += [x["status"] for x in rows if isinstance(x, dict) and "status" in x]
    report.update(extra or {})
    report["summary"] = summarize(statuses)
    return report
