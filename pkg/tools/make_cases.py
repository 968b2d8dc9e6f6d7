#!/usr/bin/env python3
"""Regenerate the worked-example files in cases/.

These files double as executable documentation and golden test fixtures;
tests/test_cases.py checks they stay in sync with the library.
"""

from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from crnforge import jsonio
from crnforge.acceptance import ORACLE_PARAMS, example_cnt_system, example_rn_system
from crnforge.crn import canonicalize, save_network
from crnforge.homoclinic import CaseStudyParams, build_variant, published_networks
from crnforge.poly import AffineMap
from crnforge.transform import AffineStep, TransformSpec, XFactorStep

CASES = os.path.join(os.path.dirname(__file__), "..", "cases")


def main() -> None:
    os.makedirs(CASES, exist_ok=True)

    def put(name, payload):
        jsonio.dump(payload, os.path.join(CASES, name))

    # classification example at the three regimes
    put("ex_cnt_k1.json", example_cnt_system(1.0).to_json_dict())
    put("ex_cnt_km05.json", example_cnt_system(-0.5).to_json_dict())
    put("ex_cnt_kneg2.json", example_cnt_system(-2.0).to_json_dict())

    # the one-reaction autocatalytic network and its canonical counterpart
    rn = example_rn_system(1.0)
    put("ex_rn_system.json", rn.to_json_dict())
    with open(os.path.join(CASES, "ex_rn_network.txt"), "w", newline="\n") as fh:
        fh.write("# species: s1 s2\nr1: s1 + s2 -> 2 s2 ; k = 1\n")
    save_network(canonicalize(rn), os.path.join(CASES, "ex_cn_network.txt"))

    # case-study variants at the oracle parameters
    for variant in ("translated", "xfact", "qssa", "hybrid"):
        v = build_variant(ORACLE_PARAMS, variant)
        put(f"casestudy_{variant}_system.json", v.system.to_json_dict())
    sheared_params = CaseStudyParams(a=-0.75, t=2.2)
    put(
        "casestudy_sheared_xfact_system.json",
        build_variant(sheared_params, "sheared_xfact").system.to_json_dict(),
    )
    save_network(
        published_networks(ORACLE_PARAMS, "sec43"),
        os.path.join(CASES, "casestudy_sec43_network.txt"),
    )

    # a transformation pipeline: translate by (1, 1.5), then x-factorize
    spec = TransformSpec(
        (
            AffineStep(AffineMap.translation_by([1.0, 1.5])),
            XFactorStep((0, 1)),
        )
    )
    put("transform_translate_xfactor.json", spec.to_json_dict())
    print(f"wrote example files to {os.path.abspath(CASES)}")


if __name__ == "__main__":
    main()
