"""Tests for the corpus definitions and the truncation families."""

import pytest

from corpus import (
    COLIMIT_LABEL,
    adjunction_cases,
    base_change_pairs,
    bg_source,
    bg_stage,
    composition_cases,
    corpus_rings,
    family_cases,
    map_cases,
    pbasis_level,
    proot_degrees_monotone,
    proot_tower_level,
    sqrt_tower_level,
)
from dsl import load


def test_default_family_levels():
    names = [c.name for c in family_cases()]
    assert len(names) == 3 + 6 + 6 + 3
    assert names[0] == "SQRT-TOWER-trunc(1)"
    assert "PROOT-TOWER-trunc(6)" in names
    assert "BG-trunc(2,2)" in names
    assert names[-1] == "FIELD-pbasis(3)"


def test_family_levels_from_config():
    cfg = {"corpus": {"prime": 5, "sqrt_tower_levels": [], "proot_tower_levels": [2],
                      "bg_stages": [], "pbasis_levels": []}}
    cases = family_cases(cfg)
    assert [c.name for c in cases] == ["PROOT-TOWER-trunc(2)"]
    assert cases[0].dsl_source.startswith("prime 5\n")
    assert cases[0].run()["witnesses"]["root_relation_degree"] == 25


def test_family_sources_parse():
    for case in family_cases():
        if case.dsl_source:
            load(case.dsl_source)
    assert COLIMIT_LABEL == "colimit claim - not machine-checked"


@pytest.mark.parametrize("N", [1, 2, 3])
def test_sqrt_tower(N):
    out = sqrt_tower_level(N)
    assert all(out["checks"].values())
    assert out["witnesses"]["dim_R/a^[p]"] == 3
    assert out["witnesses"]["dim_R/a"] == 1
    assert out["witnesses"]["independent_roots"] == [f"s{N - 1}", f"s{N}"]


@pytest.mark.parametrize("N,p", [(1, 3), (2, 3), (3, 2), (2, 5)])
def test_proot_tower(N, p):
    out = proot_tower_level(N, p)
    assert all(out["checks"].values())
    assert out["witnesses"]["root_relation_degree"] == p ** N
    assert out["witnesses"]["normal_form"] != "0"


@pytest.mark.parametrize("N", range(1, 7))
def test_proot_tower_shipped_levels(N):
    out = proot_tower_level(N)
    assert all(out["checks"].values())
    assert out["witnesses"]["normal_form"] == f"s{N}"
    assert out["witnesses"]["root_relation"] == [f"s{N}^{3 ** N} + 2*s0"]
    assert out["witnesses"]["root_relation_degree"] == 3 ** N


def test_proot_degrees_monotone():
    results = [proot_tower_level(N) for N in (1, 2, 3)]
    assert proot_degrees_monotone(results)
    assert not proot_degrees_monotone(list(reversed(results)))


def test_bg_source():
    assert bg_source(3, 0, 1) == "ring A = [e1_0, e1_1] / (e1_0, e1_1^3 - e1_0)\n"


@pytest.mark.parametrize("i,N", [(0, 1), (0, 2), (1, 1)])
def test_bg_stage(i, N):
    out = bg_stage(i, N)
    assert out["checks"] == {
        "nilpotent_witness": True,
        "interior_surjective": True,
        "top_level_not_surjective": True,
        "transition_well_defined": True,
    }
    assert out["witnesses"]["p_th_power"] == "0"


def test_bg_stage_needs_depth():
    with pytest.raises(ValueError):
        bg_stage(0, 0)


@pytest.mark.parametrize("N", [1, 2])
def test_pbasis_level(N):
    out = pbasis_level(N)
    assert all(out["checks"].values())
    assert out["witnesses"]["missing"] == ["s"]


def test_case_sources_elaborate():
    for case in map_cases():
        alpha = case.alpha()
        assert alpha.target.p == int(case.dsl_source.split()[1])
    for pair in base_change_pairs():
        elab = load(pair.dsl_source)
        assert elab.resolve(pair.alpha).source == elab.resolve(pair.rho).source
    for comp in composition_cases():
        elab = load(comp.dsl_source)
        assert elab.resolve(comp.first).target == elab.resolve(comp.second).source
    for adj in adjunction_cases():
        load(adj.dsl_source).resolve(adj.target)


def test_corpus_rings_unique():
    rings = corpus_rings()
    keys = [(A.ring, A.relations) for A in rings]
    assert len(keys) == len(set(keys))
    assert any(A.vars == ("t", "x") for A in rings)
