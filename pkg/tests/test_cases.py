"""The checked-in example files stay in sync with the library (golden tests)."""

import os
import subprocess
import sys

import pytest

from crnforge import jsonio
from crnforge.acceptance import ORACLE_PARAMS, example_cnt_system, example_rn_system
from crnforge.crn import canonicalize, load_network, serialize_network
from crnforge.homoclinic import CaseStudyParams, build_variant, published_networks
from crnforge.poly import PolySystem

CASES = os.path.join(os.path.dirname(__file__), "..", "cases")


def load_case(name):
    return PolySystem.from_json_dict(jsonio.load(os.path.join(CASES, name)))


@pytest.mark.parametrize(
    "name,k",
    [("ex_cnt_k1.json", 1.0), ("ex_cnt_km05.json", -0.5), ("ex_cnt_kneg2.json", -2.0)],
)
def test_classification_examples(name, k):
    assert load_case(name) == example_cnt_system(k)


def test_rn_example_files():
    assert load_case("ex_rn_system.json") == example_rn_system()
    net = load_network(os.path.join(CASES, "ex_rn_network.txt"))
    assert net.species == ("s1", "s2")
    assert net.n_reactions == 1
    canonical = load_network(os.path.join(CASES, "ex_cn_network.txt"))
    assert canonical == canonicalize(example_rn_system())


@pytest.mark.parametrize(
    "variant", ["translated", "xfact", "qssa", "hybrid"]
)
def test_casestudy_system_files(variant):
    expected = build_variant(ORACLE_PARAMS, variant).system
    assert load_case(f"casestudy_{variant}_system.json") == expected


def test_sheared_system_file():
    expected = build_variant(CaseStudyParams(a=-0.75, t=2.2), "sheared_xfact").system
    assert load_case("casestudy_sheared_xfact_system.json") == expected


def test_sec43_network_file():
    net = load_network(os.path.join(CASES, "casestudy_sec43_network.txt"))
    assert net.allclose(published_networks(ORACLE_PARAMS, "sec43"), 0.0)


def test_regeneration_script_is_idempotent(tmp_path):
    before = {}
    for name in os.listdir(CASES):
        with open(os.path.join(CASES, name), "rb") as fh:
            before[name] = fh.read()
    script = os.path.join(os.path.dirname(__file__), "..", "tools", "make_cases.py")
    subprocess.run([sys.executable, script], check=True, capture_output=True)
    for name, blob in before.items():
        with open(os.path.join(CASES, name), "rb") as fh:
            assert fh.read() == blob, f"{name} drifted from the generator"
